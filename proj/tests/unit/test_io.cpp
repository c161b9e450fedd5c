// File formats, PNG and rendering.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <string>

#include <json.hpp>

#include "pseg/errors.hpp"
#include "pseg/io.hpp"
#include "pseg/pairs.hpp"
#include "pseg/png_io.hpp"
#include "pseg/render.hpp"
#include "pseg/synthesis.hpp"

using namespace pseg;
using doctest::Approx;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pseg_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

SessionFile sample_session() {
  const ProbMaps gt = generate_probmaps({2, 5, 2.0, 1.5, 1});
  const ResponseDataset d = simulate_responses(gt, sample_pairset(GridSpec(5, 250), 2, Coverage::KPerPixel, 2), 3, 4,
                                               GridSpec(5, 250), "img01");
  SessionFile s = dataset_to_session(d, "p07");
  s.blocks[0].trials[1].rt_ms = 512.5;
  s.contour = Polyline{{1.5, 2.0}, {100.0, 40.25}};
  return s;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("session round trip") {
  const SessionFile s = sample_session();
  const std::string text = serialize_session(s);
  const SessionFile back = parse_session(text);
  CHECK(serialize_session(back) == text);
  CHECK(back.image_id == "img01");
  CHECK(back.participant_id == "p07");
  CHECK(back.grid == GridSpec(5, 250));
  CHECK(back.blocks[0].trials[1].rt_ms == 512.5);
  REQUIRE(back.contour);
  CHECK((*back.contour)[1].second == 40.25);
  const ResponseDataset d = session_to_dataset(back);
  CHECK(d.blocks.size() == 3);
  CHECK(d.trial_count() == 3 * 50);
}

TEST_CASE("session cells are written as column, row") {
  SessionFile s = sample_session();
  s.blocks[0].trials[0].i = 7;   // column 2, row 1
  s.blocks[0].trials[0].j = 13;  // column 3, row 2
  const json j = json::parse(serialize_session(s));
  const json& t = j["blocks"][0]["trials"][0];
  CHECK(t["i"] == json::array({2, 1}));
  CHECK(t["j"] == json::array({3, 2}));
}

TEST_CASE("session errors name the problem") {
  const std::string text = serialize_session(sample_session());
  const std::string cut = text.substr(0, 40);
  const std::string truncated = error_of([&] { parse_session(cut); });
  CHECK(truncated.find("malformed JSON at byte") != std::string::npos);

  json j = json::parse(text);
  j["blocks"][0]["trials"][3]["response"] = 2;
  const std::string bad = error_of([&] { parse_session(j.dump()); });
  CHECK(bad.find("blocks[0].trials[3].response") != std::string::npos);

  j = json::parse(text);
  j["schema_version"] = 2;
  CHECK(error_of([&] { parse_session(j.dump()); }).find("unsupported schema_version") != std::string::npos);

  j = json::parse(text);
  j["blocks"][1]["trials"][0]["j"] = j["blocks"][1]["trials"][0]["i"];
  CHECK_THROWS_AS(session_to_dataset(parse_session(j.dump())), DataError);
}

TEST_CASE("maps, pairs and features round trip") {
  MapsFile m;
  m.grid = GridSpec(6, 60);
  m.maps = generate_probmaps({3, 6, 0.7, 1.5, 9});
  m.provenance.command = "pseg fit";
  m.provenance.seed = 42;
  const std::string path = scratch("maps.json").string();
  save_maps(path, m);
  const MapsFile mb = load_maps(path);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.maps.tensor().values().size(); ++i)
    worst = std::max(worst, std::abs(mb.maps.tensor().values()[i] - m.maps.tensor().values()[i]));
  CHECK(worst <= 1e-12);
  CHECK(mb.provenance.seed == 42);
  CHECK_FALSE(mb.provenance.version.empty());

  PairsFile p;
  p.grid = GridSpec(11);
  p.k = 2;
  p.seed = 3;
  p.pairs = sample_pairset(p.grid, 2, Coverage::KPerPixel, 3);
  const PairsFile pb = parse_pairs(serialize_pairs(p));
  CHECK(pb.pairs.pairs == p.pairs.pairs);
  CHECK(pb.coverage == Coverage::KPerPixel);

  FeatureMaps f(4, 3);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::sin(0.37 * i) / 3.0;
  const FeatureMaps fb = parse_features(serialize_features(f));
  CHECK(fb.d == 3);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(std::abs(fb.values[i] - f.values[i]) <= 1e-12);
  CHECK_THROWS_AS(load_maps(scratch("missing.json").string()), DataError);
}

TEST_CASE("png round trip and corruption") {
  GrayImage g(9, 7);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) g.at(x, y) = 255.0 * (x + 9 * y) / 62.0;
  const std::string gp = scratch("g.png").string();
  write_png_gray(gp, g, 16);
  const GrayImage gb = read_png_gray(gp);
  REQUIRE(gb.width == 9);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) CHECK(std::abs(gb.pixels[i] - g.pixels[i]) <= 255.0 / 65535.0);

  RgbImage c(4, 3, {0.2, 0.4, 1.0});
  const std::string cp = scratch("c.png").string();
  write_png_rgb(cp, c);
  const RgbImage cb = read_png_rgb(cp);
  for (int ch = 0; ch < 3; ++ch) CHECK(std::abs(cb.at(3, 2)[ch] - c.at(3, 2)[ch]) <= 0.5 / 255.0);

  std::string bytes = read_text_file(gp);
  bytes.resize(bytes.size() / 2);
  const std::string broken = scratch("broken.png").string();
  write_text_file(broken, bytes);
  CHECK_THROWS_AS(read_png_gray(broken), DataError);
  write_text_file(broken, "not a png");
  CHECK_THROWS_AS(read_png_rgb(broken), DataError);
}

TEST_CASE("rendering") {
  const std::vector<int> labels{0, 1, 1, 0, 0, 1, 1, 1, 0};
  const ProbMaps hard = ProbMaps::one_hot(2, 3, labels);
  const auto arg = render(hard, RenderMode::Argmax, 4);
  REQUIRE(arg.size() == 1);
  CHECK(arg[0].name == "argmax");
  CHECK(arg[0].image.width == 12);
  std::set<Rgb> colors(arg[0].image.pixels.begin(), arg[0].image.pixels.end());
  CHECK(colors.size() == 2);
  CHECK(arg[0].image.at(5, 1) == segment_color(1));

  const auto ent = render(ProbMaps::uniform(3, 3), RenderMode::Entropy, 2);
  for (const Rgb& px : ent[0].image.pixels) CHECK(px[0] == Approx(1.0));
  const auto ent0 = render(hard, RenderMode::Entropy, 2);
  for (const Rgb& px : ent0[0].image.pixels) CHECK(px[0] == Approx(0.0));

  MapTensor t(2, 3, 0.5);
  t(0, 0) = 0.25;
  t(1, 0) = 0.75;
  const auto seg = render(ProbMaps(t), RenderMode::PerSegment, 2);
  REQUIRE(seg.size() == 2);
  CHECK(seg[1].name == "segment1");
  for (int ch = 0; ch < 3; ++ch) {
    CHECK(seg[0].image.at(0, 0)[ch] == Approx(0.25 * segment_color(0)[ch]));
    CHECK(seg[1].image.at(1, 1)[ch] == Approx(0.75 * segment_color(1)[ch]));
  }
}
