// pseg: command-line driver for map synthesis, pair design, simulation,
// fitting, evaluation, sweeps, statistics and rendering.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pseg/contour.hpp"
#include "pseg/errors.hpp"
#include "pseg/features.hpp"
#include "pseg/inference.hpp"
#include "pseg/io.hpp"
#include "pseg/pairs.hpp"
#include "pseg/parametric.hpp"
#include "pseg/png_io.hpp"
#include "pseg/render.hpp"
#include "pseg/stats.hpp"
#include "pseg/sweep.hpp"
#include "pseg/synthesis.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace pseg;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Raised for argument combinations CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g_command_line;

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += i == 0 ? std::filesystem::path(argv[0]).filename().string() : std::string(argv[i]);
  }
  return s;
}

// Every option of a subcommand with its effective value, numbers typed.
json options_json(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    std::vector<std::string> vals = opt->count() ? opt->results() : std::vector<std::string>{};
    if (vals.empty()) {
      const std::string def = opt->get_default_str();
      if (def.empty()) {
        if (opt->get_type_size() == 0) cfg[name] = false;
        continue;
      }
      vals.push_back(def);
    }
    auto typed = [](const std::string& v) -> json {
      if (v == "true") return true;
      if (v == "false") return false;
      if (!v.empty() && json::accept(v)) {
        json j = json::parse(v);
        if (j.is_number()) return j;
      }
      return v;
    };
    if (opt->get_type_size() == 0) {
      cfg[name] = opt->count() > 0;
    } else if (vals.size() == 1 && opt->get_expected_max() <= 1) {
      cfg[name] = typed(vals[0]);
    } else {
      json arr = json::array();
      for (const auto& v : vals) arr.push_back(typed(v));
      cfg[name] = arr;
    }
  }
  return cfg;
}

Provenance make_provenance(const CLI::App* app, std::uint64_t seed) {
  Provenance p;
  p.command = g_command_line;
  p.config_json = options_json(app).dump();
  p.seed = seed;
  p.version = version();
  return p;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + token + "' is not a number");
    }
  }
  return out;
}

// A comma-separated list, or a file with one value per line (or commas).
std::vector<double> read_sample(const std::string& spec, const std::string& what) {
  if (std::filesystem::is_regular_file(spec)) {
    std::string text = read_text_file(spec);
    std::replace(text.begin(), text.end(), '\n', ',');
    std::replace(text.begin(), text.end(), '\r', ',');
    try {
      return parse_number_list(text, what);
    } catch (const UsageError& e) {
      throw DataError(spec + ": " + e.what());
    }
  }
  return parse_number_list(spec, what);
}

json fit_result_json(const FitResult& r) {
  return json{{"iterations", r.iterations},
              {"converged", r.converged},
              {"final_loss", r.loss_trace.empty() ? 0.0 : r.loss_trace.back()},
              {"stationarity_gap", r.stationarity_gap},
              {"lr_halvings", r.lr_halvings},
              {"diagnostic", r.diagnostic}};
}

// ---------------------------------------------------------------- synth-maps

struct SynthMapsArgs {
  int k = 3;
  int n = 20;
  int image_px = 0;
  double sigma = 1.0;
  double xi = 2.0;
  std::uint64_t seed = 0;
  bool deterministic = false;
  std::string out;
};

void add_synth_maps(CLI::App& app, SynthMapsArgs& a) {
  auto* c = app.add_subcommand("synth-maps", "Generate ground-truth probabilistic maps");
  c->add_option("--k", a.k, "Number of segments")->capture_default_str();
  c->add_option("--n", a.n, "Grid size")->capture_default_str();
  c->add_option("--image-px", a.image_px, "Image size in pixels (default: n)")->capture_default_str();
  c->add_option("--sigma", a.sigma, "Field amplitude")->capture_default_str();
  c->add_option("--xi", a.xi, "Correlation length in cells")->capture_default_str();
  c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  c->add_flag("--deterministic", a.deterministic, "Store the one-hot argmax maps");
  c->add_option("--out,-o", a.out, "Output MapsFile (default: stdout)");
}

int run_synth_maps(const CLI::App* c, const SynthMapsArgs& a) {
  MapGenParams g;
  g.k = a.k;
  g.n = a.n;
  g.sigma_amp = a.sigma;
  g.xi = a.xi;
  g.seed = a.seed;
  ProbMaps maps = generate_probmaps(g);
  if (a.deterministic) maps = deterministic_maps(maps);
  MapsFile f;
  f.grid = GridSpec(a.n, a.image_px ? a.image_px : a.n);
  f.maps = std::move(maps);
  f.provenance = make_provenance(c, a.seed);
  write_output(a.out, serialize_maps(f));
  return 0;
}

// ------------------------------------------------------------- synth-texture

struct SynthTextureArgs {
  std::string maps;
  int px = 256;
  std::string preset;
  std::vector<double> theta0{-5.0, 5.0};
  double sigma_theta = 5.0;
  double mode = 16.0;
  std::string units = "cpi";
  double bandwidth = 2.0;
  double rms = 35.0;
  double mean_gray = 128.0;
  double blur = 2.5;
  int bit_depth = 16;
  std::uint64_t seed = 0;
  std::string out;
};

void add_synth_texture(CLI::App& app, SynthTextureArgs& a) {
  auto* c = app.add_subcommand("synth-texture", "Synthesize a two-segment oriented texture (16-bit PNG)");
  c->add_option("--maps", a.maps, "K=2 MapsFile giving the segment layout")->required();
  c->add_option("--px", a.px, "Image size in pixels (multiple of the grid size)")->capture_default_str();
  c->add_option("--preset", a.preset, "Stimulus preset (overrides the texture flags)")
      ->check(CLI::IsMember({"low", "high"}));
  c->add_option("--theta0", a.theta0, "Orientation per segment in degrees")->expected(2)->capture_default_str();
  c->add_option("--sigma-theta", a.sigma_theta, "Orientation bandwidth in degrees")->capture_default_str();
  c->add_option("--mode", a.mode, "Radial mode")->capture_default_str();
  c->add_option("--units", a.units, "Units of --mode: cpi (cycles/image) or cpd (cycles/degree)")
      ->check(CLI::IsMember({"cpi", "cpd"}))
      ->capture_default_str();
  c->add_option("--bandwidth", a.bandwidth, "Radial bandwidth in octaves")->capture_default_str();
  c->add_option("--rms", a.rms, "RMS contrast in gray levels")->capture_default_str();
  c->add_option("--mean-gray", a.mean_gray, "Mean gray level")->capture_default_str();
  c->add_option("--blur", a.blur, "Map blur in pixels")->capture_default_str();
  c->add_option("--bit-depth", a.bit_depth, "PNG bit depth")->check(CLI::IsMember({8, 16}))->capture_default_str();
  c->add_option("--seed", a.seed, "Noise seed")->capture_default_str();
  c->add_option("--out,-o", a.out, "Output PNG")->required();
}

int run_synth_texture(const CLI::App*, const SynthTextureArgs& a) {
  const MapsFile mf = load_maps(a.maps);
  TextureParams t;
  if (!a.preset.empty()) {
    t = texture_preset(a.preset == "low" ? UncertaintyPreset::Low : UncertaintyPreset::High);
  } else {
    t.theta0_deg = a.theta0;
    t.sigma_theta_deg = a.sigma_theta;
    t.mode = a.mode;
    t.units = a.units == "cpd" ? FrequencyUnits::CyclesPerDegree : FrequencyUnits::CyclesPerImage;
    t.bandwidth_oct = a.bandwidth;
    t.rms_contrast = a.rms;
  }
  t.mean_gray = a.mean_gray;
  t.map_blur_px = a.blur;
  t.seed = a.seed;
  if (a.px % mf.maps.n() != 0)
    throw UsageError("--px " + std::to_string(a.px) + " is not a multiple of the grid size " +
                     std::to_string(mf.maps.n()));
  const GrayImage img = synthesize_texture(mf.maps, t, a.px);
  write_png_gray(a.out, img, a.bit_depth);
  const ContrastStats st = contrast(img);
  std::cerr << "wrote " << a.out << " (" << a.px << "x" << a.px << ", mean " << st.mean << ", rms " << st.rms
            << ")\n";
  return 0;
}

// ----------------------------------------------------------------- synth-rgb

struct SynthRgbArgs {
  std::string maps;
  int cell_px = 4;
  double noise = 0.1;
  std::vector<double> palette;
  std::uint64_t seed = 0;
  std::string out;
};

void add_synth_rgb(CLI::App& app, SynthRgbArgs& a) {
  auto* c = app.add_subcommand("synth-rgb", "Synthesize an RGB cluster image from maps");
  c->add_option("--maps", a.maps, "MapsFile")->required();
  c->add_option("--cell-px", a.cell_px, "Pixels per grid cell")->capture_default_str();
  c->add_option("--noise", a.noise, "Per-channel noise standard deviation")->capture_default_str();
  c->add_option("--palette", a.palette, "3K channel values in [0,1] (default: categorical colors)");
  c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  c->add_option("--out,-o", a.out, "Output PNG")->required();
}

int run_synth_rgb(const CLI::App*, const SynthRgbArgs& a) {
  const MapsFile mf = load_maps(a.maps);
  const int k = mf.maps.k();
  std::vector<Rgb> palette;
  if (a.palette.empty()) {
    for (int s = 0; s < k; ++s) palette.push_back(segment_color(s));
  } else {
    if (static_cast<int>(a.palette.size()) != 3 * k)
      throw UsageError("--palette needs " + std::to_string(3 * k) + " values for K = " + std::to_string(k));
    for (int s = 0; s < k; ++s) palette.push_back({a.palette[3 * s], a.palette[3 * s + 1], a.palette[3 * s + 2]});
  }
  write_png_rgb(a.out, synthesize_rgb_clusters(mf.maps, palette, a.noise, a.seed, a.cell_px));
  return 0;
}

// --------------------------------------------------------------------- pairs

struct PairsArgs {
  int k = 2;
  int n = 11;
  int image_px = 0;
  std::string coverage = "k_per_pixel";
  std::uint64_t seed = 0;
  std::string out;
};

void add_pairs(CLI::App& app, PairsArgs& a) {
  auto* c = app.add_subcommand("pairs", "Draw a pair set for an experiment");
  c->add_option("--k", a.k, "Number of segments")->capture_default_str();
  c->add_option("--n", a.n, "Grid size")->capture_default_str();
  c->add_option("--image-px", a.image_px, "Image size in pixels (default: n)")->capture_default_str();
  c->add_option("--coverage", a.coverage, "minimal ((K-1)n^2 pairs) or k_per_pixel (Kn^2 pairs)")
      ->check(CLI::IsMember({"minimal", "k_per_pixel"}))
      ->capture_default_str();
  c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  c->add_option("--out,-o", a.out, "Output PairsFile (default: stdout)");
}

int run_pairs(const CLI::App* c, const PairsArgs& a) {
  PairsFile f;
  f.grid = GridSpec(a.n, a.image_px ? a.image_px : a.n);
  f.k = a.k;
  f.coverage = parse_coverage(a.coverage);
  f.seed = a.seed;
  f.pairs = sample_pairset(f.grid, a.k, f.coverage, a.seed);
  f.provenance = make_provenance(c, a.seed);
  write_output(a.out, serialize_pairs(f));
  std::cerr << f.pairs.size() << " pairs\n";
  return 0;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string gt;
  std::string pairs;
  int blocks = 10;
  std::uint64_t seed = 0;
  std::string participant = "simulated";
  std::string image_id;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* c = app.add_subcommand("simulate", "Simulate an observer's responses on a pair set");
  c->add_option("--gt", a.gt, "Ground-truth MapsFile")->required();
  c->add_option("--pairs", a.pairs, "PairsFile")->required();
  c->add_option("--blocks", a.blocks, "Number of blocks")->capture_default_str();
  c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  c->add_option("--participant", a.participant, "Participant id")->capture_default_str();
  c->add_option("--image-id", a.image_id, "Image id (default: the ground-truth file name)");
  c->add_option("--out,-o", a.out, "Output SessionFile (default: stdout)");
}

int run_simulate(const CLI::App*, const SimulateArgs& a) {
  const MapsFile gt = load_maps(a.gt);
  const PairsFile pf = load_pairs(a.pairs);
  if (gt.maps.n() != pf.grid.n())
    throw DataError("ground truth is " + std::to_string(gt.maps.n()) + "x" + std::to_string(gt.maps.n()) +
                    " but the pair file grid is " + std::to_string(pf.grid.n()) + "x" + std::to_string(pf.grid.n()));
  if (a.blocks < 1) throw UsageError("--blocks must be >= 1");
  const std::string image_id = a.image_id.empty() ? std::filesystem::path(a.gt).stem().string() : a.image_id;
  ResponseDataset d = simulate_responses(gt.maps, pf.pairs, a.blocks, a.seed, pf.grid, image_id);
  d.k_instructed = pf.k;
  write_output(a.out, serialize_session(dataset_to_session(d, a.participant)));
  return 0;
}

// ----------------------------------------------------------------------- fit

struct FitArgs {
  std::vector<std::string> sessions;
  int k = 0;
  std::string loss = "se";
  double lambda = 0.0;
  int kernel_width = 1;
  double lr = FitConfig{}.learning_rate;
  double eps = FitConfig{}.epsilon;
  int max_iter = FitConfig{}.max_iter;
  std::uint64_t seed = 0;
  std::string model = "nonparam";
  std::string features;
  std::string image;
  int restarts = 5;
  std::string out;
  std::string report;
  std::string params_out;
};

void add_fit(CLI::App& app, FitArgs& a) {
  auto* c = app.add_subcommand("fit", "Reconstruct probabilistic maps from one or more sessions");
  c->add_option("sessions", a.sessions, "SessionFile(s); sessions on the same grid are pooled")->required();
  c->add_option("--k", a.k, "Number of segments (default: k_instructed of the session)");
  c->add_option("--loss", a.loss, "Data term")->check(CLI::IsMember({"bce", "se"}))->capture_default_str();
  c->add_option("--lambda", a.lambda, "Spatial regularization weight")->capture_default_str();
  c->add_option("--kernel-width", a.kernel_width, "Regularization kernel half-width")->capture_default_str();
  c->add_option("--lr", a.lr, "Learning rate")->capture_default_str();
  c->add_option("--eps", a.eps, "Stopping tolerance on the loss change")->capture_default_str();
  c->add_option("--max-iter", a.max_iter, "Iteration cap")->capture_default_str();
  c->add_option("--seed", a.seed, "Initialization seed")->capture_default_str();
  c->add_option("--model", a.model, "Map model")
      ->check(CLI::IsMember({"nonparam", "logistic", "variance"}))
      ->capture_default_str();
  c->add_option("--features", a.features, "Features for parametric models: a features JSON file, rgb or wavelet");
  c->add_option("--image", a.image, "Stimulus PNG for --features rgb|wavelet");
  c->add_option("--restarts", a.restarts, "Parametric multi-start count")->capture_default_str();
  c->add_option("--out,-o", a.out, "Output MapsFile (default: stdout)");
  c->add_option("--report", a.report, "Write a JSON fit report (iterations, loss trace, gap)");
  c->add_option("--params-out", a.params_out, "Write fitted parametric model parameters as JSON");
}

ResponseDataset pooled_dataset(const std::vector<std::string>& paths, std::optional<int>& k_instructed) {
  ResponseDataset pooled;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const SessionFile s = load_session(paths[i]);
    ResponseDataset d = session_to_dataset(s);
    if (i == 0) {
      pooled.image_id = d.image_id;
      pooled.grid = d.grid;
      k_instructed = d.k_instructed;
    } else if (!(d.grid == pooled.grid)) {
      throw DataError(paths[i] + ": grid differs from " + paths[0]);
    }
    for (auto& b : d.blocks) pooled.blocks.push_back(std::move(b));
  }
  return pooled;
}

FeatureMaps load_feature_maps(const FitArgs& a, const GridSpec& grid) {
  if (a.features.empty()) throw UsageError("--model " + a.model + " needs --features");
  if (a.features == "rgb" || a.features == "wavelet") {
    if (a.image.empty()) throw UsageError("--features " + a.features + " needs --image");
    if (a.features == "rgb") {
      const RgbImage img = read_png_rgb(a.image);
      if (img.width != grid.image_px() || img.height != grid.image_px())
        throw DataError(a.image + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                        " but the session grid expects " + std::to_string(grid.image_px()) + " pixels");
      return rgb_features(img, grid);
    }
    const GrayImage img = read_png_gray(a.image);
    if (img.width != grid.image_px() || img.height != grid.image_px())
      throw DataError(a.image + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                      " but the session grid expects " + std::to_string(grid.image_px()) + " pixels");
    return wavelet_energy_features(img, grid);
  }
  FeatureMaps f = load_features(a.features);
  if (f.n != grid.n())
    throw DataError(a.features + ": features are on a " + std::to_string(f.n) + "x" + std::to_string(f.n) +
                    " grid, the session on " + std::to_string(grid.n()) + "x" + std::to_string(grid.n()));
  return f;
}

json params_json(const ParametricFit& pf) {
  json j;
  j["model"] = to_string(pf.model);
  j["k"] = pf.logistic.k;
  j["d"] = pf.logistic.d;
  json omega = json::array();
  for (int s = 0; s < pf.logistic.k; ++s) {
    json row = json::array();
    for (int f = 0; f < pf.logistic.d; ++f) row.push_back(pf.logistic.w(s, f));
    omega.push_back(row);
  }
  j["omega"] = omega;
  j["beta"] = pf.logistic.beta;
  if (pf.variance) {
    json sigma = json::array();
    for (int s = 0; s < pf.variance->k; ++s) {
      json row = json::array();
      for (int f = 0; f < pf.variance->d; ++f) row.push_back(pf.variance->s(s, f));
      sigma.push_back(row);
    }
    j["sigma"] = sigma;
    if (pf.variance->k == 2) j["differential_variance"] = differential_variance(*pf.variance);
  }
  j["best_restart"] = pf.best_restart;
  j["restart_losses"] = pf.restart_losses;
  return j;
}

int run_fit(const CLI::App* c, const FitArgs& a) {
  std::optional<int> k_instructed;
  const ResponseDataset d = pooled_dataset(a.sessions, k_instructed);
  const int k = a.k ? a.k : k_instructed.value_or(0);
  if (k < 2) throw UsageError("--k is required (the session has no k_instructed)");

  FitConfig cfg;
  cfg.loss = parse_loss(a.loss);
  cfg.lambda = a.lambda;
  cfg.kernel_width = a.kernel_width;
  cfg.learning_rate = a.lr;
  cfg.epsilon = a.eps;
  cfg.max_iter = a.max_iter;
  cfg.seed = a.seed;
  cfg.validate();

  FitResult result;
  std::optional<ParametricFit> pfit;
  if (a.model == "nonparam") {
    if (!a.features.empty()) throw UsageError("--features applies to --model logistic|variance only");
    result = fit_nonparametric(d, k, cfg);
  } else {
    const FeatureMaps features = load_feature_maps(a, d.grid);
    ParametricOptions opt;
    opt.model = parse_param_model(a.model);
    opt.restarts = a.restarts;
    pfit = fit_parametric(d, features, k, cfg, opt);
    result = pfit->result;
  }

  MapsFile out;
  out.grid = d.grid;
  out.maps = result.maps;
  out.provenance = make_provenance(c, a.seed);
  write_output(a.out, serialize_maps(out));

  if (!a.report.empty()) {
    json r = fit_result_json(result);
    r["loss_trace"] = result.loss_trace;
    r["provenance"] = json::parse(R"({})");
    r["provenance"]["command"] = g_command_line;
    r["provenance"]["seed"] = a.seed;
    r["provenance"]["version"] = version();
    write_text_file(a.report, r.dump(2) + "\n");
  }
  if (!a.params_out.empty()) {
    if (!pfit) throw UsageError("--params-out needs --model logistic|variance");
    write_text_file(a.params_out, params_json(*pfit).dump(2) + "\n");
  }
  std::cerr << "fit: " << result.iterations << " iterations, loss " << result.loss_trace.back() << ", gap "
            << result.stationarity_gap << (result.converged ? "" : " (" + result.diagnostic + ")") << "\n";
  return 0;
}

// ---------------------------------------------------------------------- eval

struct EvalArgs {
  std::string reference;
  std::string maps;
  std::string session;
  double tol = 2.0;
  std::string out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* c = app.add_subcommand("eval", "Compare fitted maps with a reference (MAE, entropy, contour f-score)");
  c->add_option("maps", a.maps, "Fitted MapsFile")->required();
  c->add_option("--reference,-r", a.reference, "Reference MapsFile");
  c->add_option("--session", a.session, "SessionFile whose drawn contour is scored against the fitted boundaries");
  c->add_option("--tol", a.tol, "Contour matching tolerance in pixels")->capture_default_str();
  c->add_option("--out,-o", a.out, "Output JSON (default: stdout)");
}

json fscore_json(const FScore& f) { return json{{"f", f.f}, {"precision", f.precision}, {"recall", f.recall}}; }

int run_eval(const CLI::App*, const EvalArgs& a) {
  const MapsFile fit = load_maps(a.maps);
  json r;
  const EntropySummary h = mean_entropy(fit.maps);
  r["k"] = fit.maps.k();
  r["n"] = fit.maps.n();
  r["mean_entropy"] = h.mean;
  r["entropy_standard_error"] = h.standard_error;
  r["segment_mass"] = segment_mass(fit.maps);
  const int cell_px = fit.grid.cell_px();
  const ContourMap predicted = segmap_boundaries(argmax_segmap(fit.maps), cell_px);

  if (!a.reference.empty()) {
    const MapsFile ref = load_maps(a.reference);
    if (ref.maps.n() != fit.maps.n())
      throw DataError("reference grid " + std::to_string(ref.maps.n()) + " differs from fitted grid " +
                      std::to_string(fit.maps.n()));
    const int k = std::max(ref.maps.k(), fit.maps.k());
    const ProbMaps p = pad_segments(fit.maps, k);
    const ProbMaps q = pad_segments(ref.maps, k);
    const Permutation perm = align_labels(p, q);
    r["mae"] = mae(permute_segments(p, perm), q);
    r["mae_unaligned"] = mae(p, q);
    r["permutation"] = perm;
    r["reference_mean_entropy"] = mean_entropy(ref.maps).mean;
    const ContourMap reference = segmap_boundaries(argmax_segmap(ref.maps), cell_px);
    r["boundary_fscore"] = fscore_json(contour_fscore(predicted, reference, a.tol));
  }
  if (!a.session.empty()) {
    const SessionFile s = load_session(a.session);
    if (!s.contour) throw DataError(a.session + ": session has no contour");
    const int px = fit.grid.image_px();
    const ContourMap drawn = rasterize_polyline(*s.contour, px, px);
    r["contour_fscore"] = fscore_json(contour_fscore(predicted, drawn, a.tol));
  }
  r["tol_px"] = a.tol;
  write_output(a.out, r.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string axis = "blocks";
  std::vector<double> levels;
  int resamples = 100;
  std::uint64_t seed = 0;
  int k = 3;
  int n = 20;
  double sigma = 1.0;
  double xi = 2.0;
  bool deterministic = false;
  int gt_n = 64;
  int blocks = 10;
  std::string coverage = "k_per_pixel";
  int fit_k = 0;
  std::vector<double> lambdas{0.0, 10.0};
  std::vector<int> kernel_widths;
  std::string loss = "se";
  double lr = FitConfig{}.learning_rate;
  double eps = FitConfig{}.epsilon;
  int max_iter = FitConfig{}.max_iter;
  int threads = 0;
  std::string csv;
  std::string json_out;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* c = app.add_subcommand("sweep", "Run a simulated experiment sweep with resampled pair sets");
  c->add_option("--axis", a.axis, "Swept parameter")
      ->check(CLI::IsMember({"blocks", "uncertainty", "resolution", "k"}))
      ->capture_default_str();
  c->add_option("--levels", a.levels, "Levels of the swept parameter")->required()->delimiter(',');
  c->add_option("--resamples", a.resamples, "Resamples per level")->capture_default_str();
  c->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  c->add_option("--k", a.k, "Ground-truth segments")->capture_default_str();
  c->add_option("--n", a.n, "Grid size")->capture_default_str();
  c->add_option("--sigma", a.sigma, "Ground-truth field amplitude")->capture_default_str();
  c->add_option("--xi", a.xi, "Ground-truth correlation length")->capture_default_str();
  c->add_flag("--deterministic", a.deterministic, "Use one-hot ground truth");
  c->add_option("--gt-n", a.gt_n, "Ground-truth size for the resolution axis")->capture_default_str();
  c->add_option("--blocks", a.blocks, "Blocks per simulated experiment")->capture_default_str();
  c->add_option("--coverage", a.coverage, "Pair design")
      ->check(CLI::IsMember({"minimal", "k_per_pixel"}))
      ->capture_default_str();
  c->add_option("--fit-k", a.fit_k, "Fitted segments (default: --k)")->capture_default_str();
  c->add_option("--lambda", a.lambdas, "One fit condition per value")->delimiter(',')->capture_default_str();
  c->add_option("--kernel-width", a.kernel_widths, "Kernel width per condition (default 1)")->delimiter(',');
  c->add_option("--loss", a.loss, "Data term")->check(CLI::IsMember({"bce", "se"}))->capture_default_str();
  c->add_option("--lr", a.lr, "Learning rate")->capture_default_str();
  c->add_option("--eps", a.eps, "Stopping tolerance")->capture_default_str();
  c->add_option("--max-iter", a.max_iter, "Iteration cap")->capture_default_str();
  c->add_option("--threads", a.threads, "Worker threads (0: all cores)")->capture_default_str();
  c->add_option("--csv", a.csv, "CSV table output (default: stdout)");
  c->add_option("--json", a.json_out, "JSON table output");
}

int run_sweep_cmd(const CLI::App* c, const SweepArgs& a) {
  SweepConfig cfg;
  cfg.axis = parse_sweep_axis(a.axis);
  cfg.levels = a.levels;
  cfg.resamples = a.resamples;
  cfg.seed = a.seed;
  cfg.gt.k = a.k;
  cfg.gt.n = a.n;
  cfg.gt.sigma_amp = a.sigma;
  cfg.gt.xi = a.xi;
  cfg.deterministic_gt = a.deterministic;
  cfg.gt_n = a.gt_n;
  cfg.n_blocks = a.blocks;
  cfg.coverage = parse_coverage(a.coverage);
  cfg.fit_k = a.fit_k;
  cfg.threads = a.threads;
  if (!a.kernel_widths.empty() && a.kernel_widths.size() != a.lambdas.size())
    throw UsageError("--kernel-width needs one value per --lambda value");
  for (std::size_t i = 0; i < a.lambdas.size(); ++i) {
    FitCondition fc;
    fc.fit.loss = parse_loss(a.loss);
    fc.fit.lambda = a.lambdas[i];
    fc.fit.kernel_width = a.kernel_widths.empty() ? 1 : a.kernel_widths[i];
    fc.fit.learning_rate = a.lr;
    fc.fit.epsilon = a.eps;
    fc.fit.max_iter = a.max_iter;
    std::ostringstream name;
    name << "lambda=" << fc.fit.lambda;
    if (fc.fit.kernel_width != 1) name << ",w=" << fc.fit.kernel_width;
    fc.name = name.str();
    cfg.conditions.push_back(fc);
  }
  const SweepTable table = run_sweep(cfg);
  if (a.csv.empty() || a.csv == "-") {
    write_sweep_csv(std::cout, table);
  } else {
    std::ofstream os(a.csv, std::ios::binary);
    if (!os) throw DataError("cannot write '" + a.csv + "'");
    write_sweep_csv(os, table);
  }
  if (!a.json_out.empty()) write_text_file(a.json_out, sweep_to_json(table, make_provenance(c, a.seed)));
  return 0;
}

// --------------------------------------------------------------------- stats

struct StatsArgs {
  std::string a;
  std::string b;
  std::vector<double> levels;
  int participants = 15;
  int k = 2;
  int n = 11;
  double xi = 2.0;
  int blocks = 5;
  std::string coverage = "k_per_pixel";
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

void add_stats(CLI::App& app, StatsArgs& a) {
  auto* c = app.add_subcommand("stats", "Group statistics");
  c->require_subcommand(1);
  auto* w = c->add_subcommand("welch", "Welch's t-test and Cohen's d between two samples");
  w->add_option("--a", a.a, "Sample A: comma list or file of numbers")->required();
  w->add_option("--b", a.b, "Sample B: comma list or file of numbers")->required();
  w->add_option("--out,-o", a.out, "Output JSON (default: stdout)");
  auto* u = c->add_subcommand("uncertainty", "Simulated participants at several ground-truth uncertainty levels");
  u->add_option("--levels", a.levels, "Field amplitude per level")->required()->delimiter(',');
  u->add_option("--participants", a.participants, "Participants per level")->capture_default_str();
  u->add_option("--k", a.k, "Segments")->capture_default_str();
  u->add_option("--n", a.n, "Grid size")->capture_default_str();
  u->add_option("--xi", a.xi, "Correlation length")->capture_default_str();
  u->add_option("--blocks", a.blocks, "Blocks per participant")->capture_default_str();
  u->add_option("--coverage", a.coverage, "Pair design")
      ->check(CLI::IsMember({"minimal", "k_per_pixel"}))
      ->capture_default_str();
  u->add_option("--lambda", a.lambda, "Regularization of the participant fits")->capture_default_str();
  u->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  u->add_option("--threads", a.threads, "Worker threads (0: all cores)")->capture_default_str();
  u->add_option("--out,-o", a.out, "Output JSON (default: stdout)");
}

json welch_json(const WelchResult& w) {
  json j{{"t", w.t}, {"dof", w.dof}, {"p", w.p}};
  j["cohens_d"] = w.cohens_d ? json(*w.cohens_d) : json(nullptr);
  return j;
}

int run_stats(const CLI::App* c, const StatsArgs& a) {
  const CLI::App* sub = c->get_subcommands().front();
  json r;
  if (sub->get_name() == "welch") {
    const auto xa = read_sample(a.a, "--a");
    const auto xb = read_sample(a.b, "--b");
    r = welch_json(welch_test(xa, xb));
    r["mean_a"] = mean(xa);
    r["mean_b"] = mean(xb);
    r["n_a"] = xa.size();
    r["n_b"] = xb.size();
  } else {
    UncertaintyStudyConfig cfg;
    cfg.levels = a.levels;
    cfg.participants = a.participants;
    cfg.k = a.k;
    cfg.n = a.n;
    cfg.xi = a.xi;
    cfg.n_blocks = a.blocks;
    cfg.coverage = parse_coverage(a.coverage);
    cfg.fit.lambda = a.lambda;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    const UncertaintyStudyResult res = uncertainty_study(cfg);
    json levels = json::array();
    for (const auto& l : res.levels)
      levels.push_back(json{{"sigma_amp", l.sigma_amp},
                            {"gt_entropy", l.gt_entropy},
                            {"mean_entropy", l.mean},
                            {"participant_entropy", l.participant_entropy}});
    r["levels"] = levels;
    r["test"] = res.test ? welch_json(*res.test) : json(nullptr);
    r["degenerate"] = res.degenerate;
    r["note"] = res.note;
    r["provenance"] = json{{"command", g_command_line}, {"config", options_json(sub)}, {"seed", a.seed},
                           {"version", version()}};
  }
  write_output(a.out, r.dump(2) + "\n");
  return 0;
}

// -------------------------------------------------------------------- render

struct RenderArgs {
  std::string maps;
  std::string mode = "all";
  int cell_px = 8;
  std::string prefix;
};

void add_render(CLI::App& app, RenderArgs& a) {
  auto* c = app.add_subcommand("render", "Render maps as PNG images");
  c->add_option("maps", a.maps, "MapsFile")->required();
  c->add_option("--mode", a.mode, "per_segment, argmax, entropy or all")
      ->check(CLI::IsMember({"per_segment", "argmax", "entropy", "all"}))
      ->capture_default_str();
  c->add_option("--cell-px", a.cell_px, "Pixels per grid cell")->capture_default_str();
  c->add_option("--prefix,-o", a.prefix, "Output prefix; files are <prefix>_<name>.png")->required();
}

int run_render(const CLI::App*, const RenderArgs& a) {
  if (a.cell_px < 1) throw UsageError("--cell-px must be >= 1");
  const MapsFile mf = load_maps(a.maps);
  std::vector<RenderMode> modes;
  if (a.mode == "all")
    modes = {RenderMode::PerSegment, RenderMode::Argmax, RenderMode::Entropy};
  else
    modes = {parse_render_mode(a.mode)};
  for (RenderMode m : modes)
    for (const RenderedImage& img : render(mf.maps, m, a.cell_px)) {
      const std::string path = a.prefix + "_" + img.name + ".png";
      write_png_rgb(path, img.image);
      std::cerr << "wrote " << path << "\n";
    }
  return 0;
}

// ---------------------------------------------------------------- dispatch

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Suggests the closest long option of the subcommand for each unknown flag.
void suggest_flags(const CLI::App& app, int argc, char** argv) {
  const CLI::App* sub = &app;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) {
      for (const CLI::App* s : sub->get_subcommands({}))
        if (s->get_name() == arg) {
          sub = s;
          break;
        }
      continue;
    }
    const std::string flag = arg.substr(0, arg.find('='));
    bool known = false;
    std::string best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (const CLI::Option* opt : sub->get_options()) {
      for (const std::string& ln : opt->get_lnames()) {
        const std::string cand = "--" + ln;
        if (cand == flag) known = true;
        const std::size_t d = edit_distance(flag, cand);
        if (d < best_d) {
          best_d = d;
          best = cand;
        }
      }
    }
    if (!known && !best.empty() && best_d <= std::max<std::size_t>(2, flag.size() / 3))
      std::cerr << "unknown option " << flag << "; did you mean " << best << "?\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  g_command_line = join_argv(argc, argv);
  CLI::App app{"Probabilistic segmentation maps from same/different judgments"};
  app.set_version_flag("--version", std::string(pseg::version()));
  app.require_subcommand(1);

  SynthMapsArgs synth_maps;
  SynthTextureArgs synth_texture;
  SynthRgbArgs synth_rgb;
  PairsArgs pairs;
  SimulateArgs simulate;
  FitArgs fit;
  EvalArgs eval;
  SweepArgs sweep;
  StatsArgs stats;
  RenderArgs render_args;
  add_synth_maps(app, synth_maps);
  add_synth_texture(app, synth_texture);
  add_synth_rgb(app, synth_rgb);
  add_pairs(app, pairs);
  add_simulate(app, simulate);
  add_fit(app, fit);
  add_eval(app, eval);
  add_sweep(app, sweep);
  add_stats(app, stats);
  add_render(app, render_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    suggest_flags(app, argc, argv);
    return kExitUsage;
  }

  const CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    if (name == "synth-maps") return run_synth_maps(cmd, synth_maps);
    if (name == "synth-texture") return run_synth_texture(cmd, synth_texture);
    if (name == "synth-rgb") return run_synth_rgb(cmd, synth_rgb);
    if (name == "pairs") return run_pairs(cmd, pairs);
    if (name == "simulate") return run_simulate(cmd, simulate);
    if (name == "fit") return run_fit(cmd, fit);
    if (name == "eval") return run_eval(cmd, eval);
    if (name == "sweep") return run_sweep_cmd(cmd, sweep);
    if (name == "stats") return run_stats(cmd, stats);
    if (name == "render") return run_render(cmd, render_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pseg::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pseg::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const pseg::FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  std::cerr << "error: unhandled subcommand " << name << "\n";
  return kExitUsage;
}
