#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tspeval/core.hpp"

namespace tspeval {

struct DatasetSpec {
  std::vector<int> sizes;
  int per_size = 30;
  std::int64_t coord_min = 0;
  std::int64_t coord_max = 100;
  std::uint64_t seed = 0;
};

// The evaluation corpus defaults: sizes 10..22 plus 27, 30 journeys each.
DatasetSpec default_test_spec(std::uint64_t seed = 0);

struct Corpus {
  std::vector<Instance> instances;
  std::optional<DatasetSpec> spec;
  std::string note;

  int size() const { return static_cast<int>(instances.size()); }
};

// Per size, per_size instances of distinct integer points drawn uniformly
// from [coord_min, coord_max]^2. A pure function of spec.
Corpus generate_random(const DatasetSpec& spec);

// Reads every parseable TSPLIB file in the directory (EDGE_WEIGHT_TYPE
// EUC_2D with a NODE_COORD_SECTION) and keeps the first take_first
// coordinates of each. Files of other weight types, files with too few
// points, and unreadable files are skipped with a notice on `log`.
Corpus ingest_tsplib(const std::filesystem::path& directory, int take_first,
                     std::ostream* log = nullptr);

// JSONL: an optional {"meta": ...} header line carrying spec and note,
// then one {"id", "source", "points"} object per instance.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace tspeval
