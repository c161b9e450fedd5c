#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pseg/contour.hpp"
#include "pseg/dataset.hpp"
#include "pseg/pairs.hpp"
#include "pseg/parametric.hpp"
#include "pseg/probmaps.hpp"
#include "pseg/sweep.hpp"

namespace pseg {

inline constexpr int kSchemaVersion = 1;

/// Library version string embedded in provenance records.
const char* version() noexcept;

struct Provenance {
  std::string command;
  std::string config_json = "{}";  // JSON object text
  std::uint64_t seed = 0;
  std::string version;             // filled by the writers when empty
};

struct SessionTiming {
  double preview_ms = 3000.0;
  double cue_ms = 300.0;
  double stim_ms = 300.0;
};

struct SessionTrial {
  int i = 0;  // cell index (row-major); serialized as [column, row]
  int j = 0;
  int response = 0;
  std::optional<double> rt_ms;
};

struct SessionBlock {
  int block_index = 0;
  std::vector<SessionTrial> trials;
};

/// One participant's judgments on one image.
struct SessionFile {
  int schema_version = kSchemaVersion;
  std::string image_id;
  GridSpec grid;
  std::optional<int> k_instructed;
  SessionTiming timing;
  std::vector<SessionBlock> blocks;
  std::optional<Polyline> contour;
  std::string participant_id;
  bool incomplete = false;
};

struct MapsFile {
  int schema_version = kSchemaVersion;
  GridSpec grid;
  ProbMaps maps;
  Provenance provenance;
};

struct PairsFile {
  int schema_version = kSchemaVersion;
  GridSpec grid;
  int k = 2;
  Coverage coverage = Coverage::KPerPixel;
  std::uint64_t seed = 0;
  PairSet pairs;
  Provenance provenance;
};

// Parsers throw DataError naming the offending field (for example
// "blocks[0].trials[3].response") or, for malformed JSON, the byte offset.

SessionFile parse_session(const std::string& text);
std::string serialize_session(const SessionFile& s);
SessionFile load_session(const std::string& path);
void save_session(const std::string& path, const SessionFile& s);

/// Canonicalizes pairs; throws DataError if validate_dataset reports anything.
ResponseDataset session_to_dataset(const SessionFile& s);
SessionFile dataset_to_session(const ResponseDataset& d, const std::string& participant_id = "simulated");

MapsFile parse_maps(const std::string& text);
std::string serialize_maps(const MapsFile& m);
MapsFile load_maps(const std::string& path);
void save_maps(const std::string& path, const MapsFile& m);

PairsFile parse_pairs(const std::string& text);
std::string serialize_pairs(const PairsFile& p);
PairsFile load_pairs(const std::string& path);
void save_pairs(const std::string& path, const PairsFile& p);

/// {"schema_version", "n", "d", "values": [row][column][feature]}.
FeatureMaps parse_features(const std::string& text);
std::string serialize_features(const FeatureMaps& f);
FeatureMaps load_features(const std::string& path);
void save_features(const std::string& path, const FeatureMaps& f);

/// One CSV row per level x resample x condition, then one summary row per
/// level x condition (resample column "summary").
void write_sweep_csv(std::ostream& os, const SweepTable& table);
std::string sweep_to_json(const SweepTable& table, const Provenance& provenance);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pseg
