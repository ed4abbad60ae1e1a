#include "tspeval/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tspeval/rng.hpp"

namespace tspeval {

namespace {

using nlohmann::json;

void validate_spec(const DatasetSpec& spec) {
  if (spec.sizes.empty()) {
    throw std::invalid_argument("dataset spec: sizes must be non-empty");
  }
  for (int s : spec.sizes) {
    if (s < 3) {
      throw std::invalid_argument("dataset spec: every size must be >= 3");
    }
  }
  if (spec.per_size < 1) {
    throw std::invalid_argument("dataset spec: per_size must be >= 1");
  }
  if (spec.coord_min > spec.coord_max) {
    throw std::invalid_argument("dataset spec: coord_min exceeds coord_max");
  }
  const auto span = static_cast<std::uint64_t>(spec.coord_max - spec.coord_min) + 1;
  const int largest = *std::max_element(spec.sizes.begin(), spec.sizes.end());
  if (span * span < static_cast<std::uint64_t>(largest)) {
    throw std::invalid_argument(
        "dataset spec: coordinate range too small for distinct points");
  }
}

json spec_to_json(const DatasetSpec& spec) {
  return json{{"sizes", spec.sizes},
              {"per_size", spec.per_size},
              {"coord_min", spec.coord_min},
              {"coord_max", spec.coord_max},
              {"seed", spec.seed}};
}

DatasetSpec spec_from_json(const json& j) {
  DatasetSpec spec;
  spec.sizes = j.at("sizes").get<std::vector<int>>();
  spec.per_size = j.at("per_size").get<int>();
  spec.coord_min = j.at("coord_min").get<std::int64_t>();
  spec.coord_max = j.at("coord_max").get<std::int64_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

DatasetSpec default_test_spec(std::uint64_t seed) {
  DatasetSpec spec;
  for (int s = 10; s <= 22; ++s) spec.sizes.push_back(s);
  spec.sizes.push_back(27);
  spec.per_size = 30;
  spec.seed = seed;
  return spec;
}

Corpus generate_random(const DatasetSpec& spec) {
  validate_spec(spec);
  const std::uint64_t span =
      static_cast<std::uint64_t>(spec.coord_max - spec.coord_min) + 1;

  Corpus corpus;
  corpus.spec = spec;
  corpus.note = "randomly generated";
  for (int size : spec.sizes) {
    for (int k = 0; k < spec.per_size; ++k) {
      // One sub-stream per (size, index) so any size subset regenerates
      // the same instances.
      Rng rng(mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(size)),
                       static_cast<std::uint64_t>(k)));
      Instance inst;
      char id[64];
      std::snprintf(id, sizeof(id), "rnd-n%d-%03d", size, k);
      inst.id = id;
      inst.source = Source::Random;
      std::set<std::pair<std::int64_t, std::int64_t>> seen;
      while (static_cast<int>(inst.points.size()) < size) {
        Point p{spec.coord_min + static_cast<std::int64_t>(rng.below(span)),
                spec.coord_min + static_cast<std::int64_t>(rng.below(span))};
        if (seen.insert({p.x, p.y}).second) {
          inst.points.push_back(p);
        }
      }
      corpus.instances.push_back(std::move(inst));
    }
  }
  return corpus;
}

Corpus ingest_tsplib(const std::filesystem::path& directory, int take_first,
                     std::ostream* log) {
  namespace fs = std::filesystem;
  if (take_first < 3) {
    throw std::invalid_argument("take_first must be at least 3");
  }
  auto notice = [&](const std::string& msg) {
    if (log) *log << "[ingest] " << msg << "\n";
  };

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  corpus.note = "ingested from " + directory.string();
  std::set<std::string> used_ids;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      notice("unreadable file skipped: " + path.string());
      continue;
    }
    std::string name;
    std::string weight_type;
    bool in_coords = false;
    std::vector<Point> points;
    std::string line;
    bool bad = false;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (!in_coords) {
        if (t == "NODE_COORD_SECTION") {
          in_coords = true;
          continue;
        }
        const auto colon = t.find(':');
        if (colon != std::string::npos) {
          const std::string key = trim(t.substr(0, colon));
          const std::string value = trim(t.substr(colon + 1));
          if (key == "NAME") name = value;
          if (key == "EDGE_WEIGHT_TYPE") weight_type = value;
        }
        continue;
      }
      if (t == "EOF") break;
      std::istringstream ls(t);
      long idx;
      double x, y;
      if (!(ls >> idx >> x >> y)) {
        notice("malformed coordinate line in " + path.string() + ": " + t);
        bad = true;
        break;
      }
      // Fractional coordinates are truncated toward zero.
      points.push_back(Point{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)});
      if (static_cast<int>(points.size()) >= take_first) break;
    }
    if (bad) continue;
    if (!in_coords) {
      notice("no NODE_COORD_SECTION, skipped: " + path.string());
      continue;
    }
    if (weight_type != "EUC_2D") {
      notice("EDGE_WEIGHT_TYPE '" + weight_type + "' not supported, skipped: " +
             path.string());
      continue;
    }
    if (static_cast<int>(points.size()) < take_first) {
      notice("fewer than " + std::to_string(take_first) + " points, skipped: " +
             path.string());
      continue;
    }
    Instance inst;
    inst.id = name.empty() ? path.stem().string() : name;
    while (!used_ids.insert(inst.id).second) inst.id += "+";
    inst.source = Source::Tsplib;
    inst.points = std::move(points);
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open corpus file for writing: " + path.string());
  }
  if (corpus.spec || !corpus.note.empty()) {
    json meta = json::object();
    if (corpus.spec) meta["spec"] = spec_to_json(*corpus.spec);
    if (!corpus.note.empty()) meta["note"] = corpus.note;
    out << json{{"meta", meta}}.dump() << "\n";
  }
  for (const auto& inst : corpus.instances) {
    json points = json::array();
    for (const auto& p : inst.points) points.push_back({p.x, p.y});
    out << json{{"id", inst.id},
                {"source", to_string(inst.source)},
                {"points", points}}
               .dump()
        << "\n";
  }
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }
  Corpus corpus;
  std::string line;
  int line_no = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("corpus parse error at line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (j.contains("meta")) {
        const json& meta = j.at("meta");
        if (meta.contains("spec")) corpus.spec = spec_from_json(meta.at("spec"));
        if (meta.contains("note")) corpus.note = meta.at("note").get<std::string>();
        continue;
      }
      Instance inst;
      inst.id = j.at("id").get<std::string>();
      inst.source = source_from_string(j.at("source").get<std::string>());
      for (const auto& p : j.at("points")) {
        inst.points.push_back(Point{p.at(0).get<std::int64_t>(),
                                    p.at(1).get<std::int64_t>()});
      }
      if (!ids.insert(inst.id).second) {
        throw std::runtime_error("duplicate instance id '" + inst.id + "'");
      }
      corpus.instances.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw std::runtime_error("corpus parse error at line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace tspeval
