#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tspeval/dataset.hpp"

using namespace tspeval;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tspeval_dataset_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("generation is a pure function of the spec") {
  DatasetSpec spec;
  spec.sizes = {4, 7, 10};
  spec.per_size = 5;
  spec.seed = 1234;
  const Corpus a = generate_random(spec);
  const Corpus b = generate_random(spec);
  REQUIRE(a.size() == 15);
  REQUIRE(b.size() == 15);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.instances[i].id == b.instances[i].id);
    CHECK(a.instances[i].points == b.instances[i].points);
  }

  spec.seed = 1235;
  const Corpus c = generate_random(spec);
  bool all_same = true;
  for (int i = 0; i < a.size(); ++i) {
    if (a.instances[i].points != c.instances[i].points) all_same = false;
  }
  CHECK_FALSE(all_same);
}

TEST_CASE("generated instances have the right shape") {
  DatasetSpec spec;
  spec.sizes = {10, 11};
  spec.per_size = 30;
  spec.coord_min = 0;
  spec.coord_max = 100;
  spec.seed = 7;
  const Corpus corpus = generate_random(spec);
  REQUIRE(corpus.size() == 60);
  for (const auto& inst : corpus.instances) {
    CHECK((inst.size() == 10 || inst.size() == 11));
    CHECK(inst.source == Source::Random);
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& p : inst.points) {
      CHECK(p.x >= 0);
      CHECK(p.x <= 100);
      CHECK(p.y >= 0);
      CHECK(p.y <= 100);
      CHECK(seen.insert({p.x, p.y}).second);  // stations are distinct
    }
  }
  std::set<std::string> ids;
  for (const auto& inst : corpus.instances) CHECK(ids.insert(inst.id).second);
}

TEST_CASE("the default evaluation spec covers sizes 10..22 and 27") {
  const DatasetSpec spec = default_test_spec(42);
  std::set<int> sizes(spec.sizes.begin(), spec.sizes.end());
  CHECK(sizes.size() == 14);
  for (int s = 10; s <= 22; ++s) CHECK(sizes.count(s) == 1);
  CHECK(sizes.count(27) == 1);
  CHECK(spec.per_size == 30);
  CHECK(generate_random(spec).size() == 420);
}

TEST_CASE("nonsense specs are refused") {
  DatasetSpec spec;
  spec.sizes = {};
  CHECK_THROWS_AS(generate_random(spec), std::invalid_argument);
  spec.sizes = {2};
  CHECK_THROWS_AS(generate_random(spec), std::invalid_argument);
  spec.sizes = {10};
  spec.per_size = 0;
  CHECK_THROWS_AS(generate_random(spec), std::invalid_argument);
  spec.per_size = 1;
  spec.coord_min = 0;
  spec.coord_max = 1;  // only 4 distinct points, 10 needed
  CHECK_THROWS_AS(generate_random(spec), std::invalid_argument);
}

TEST_CASE("corpus JSONL round-trips with its meta line") {
  DatasetSpec spec;
  spec.sizes = {5};
  spec.per_size = 3;
  spec.seed = 99;
  Corpus corpus = generate_random(spec);
  corpus.note = "round trip";

  const fs::path dir = fresh_dir("roundtrip");
  const fs::path path = dir / "corpus.jsonl";
  save_corpus(corpus, path);

  const Corpus loaded = load_corpus(path);
  REQUIRE(loaded.size() == corpus.size());
  REQUIRE(loaded.spec.has_value());
  CHECK(loaded.spec->sizes == spec.sizes);
  CHECK(loaded.spec->per_size == spec.per_size);
  CHECK(loaded.spec->seed == spec.seed);
  CHECK(loaded.note == "round trip");
  for (int i = 0; i < corpus.size(); ++i) {
    CHECK(loaded.instances[i].id == corpus.instances[i].id);
    CHECK(loaded.instances[i].points == corpus.instances[i].points);
    CHECK(loaded.instances[i].source == corpus.instances[i].source);
  }
}

TEST_CASE("corpus files without a meta line load too") {
  const fs::path dir = fresh_dir("nometa");
  const fs::path path = dir / "plain.jsonl";
  write_file(path,
             "{\"id\":\"a\",\"source\":\"inline\",\"points\":[[0,0],[5,0],[0,5]]}\n"
             "{\"id\":\"b\",\"source\":\"inline\",\"points\":[[1,1],[2,2],[3,1]]}\n");
  const Corpus corpus = load_corpus(path);
  REQUIRE(corpus.size() == 2);
  CHECK_FALSE(corpus.spec.has_value());
  CHECK(corpus.instances[0].id == "a");
  CHECK(corpus.instances[1].points[2] == Point{3, 1});
}

TEST_CASE("corpus loading reports the offending line") {
  const fs::path dir = fresh_dir("badline");
  const fs::path path = dir / "bad.jsonl";
  write_file(path,
             "{\"id\":\"a\",\"source\":\"inline\",\"points\":[[0,0],[5,0],[0,5]]}\n"
             "not json at all\n");
  try {
    load_corpus(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("duplicate instance ids are rejected at load") {
  const fs::path dir = fresh_dir("dupid");
  const fs::path path = dir / "dup.jsonl";
  write_file(path,
             "{\"id\":\"a\",\"source\":\"inline\",\"points\":[[0,0],[5,0],[0,5]]}\n"
             "{\"id\":\"a\",\"source\":\"inline\",\"points\":[[1,1],[2,2],[3,1]]}\n");
  CHECK_THROWS_AS(load_corpus(path), std::runtime_error);
}

TEST_CASE("missing corpus files raise") {
  CHECK_THROWS_AS(load_corpus(fs::temp_directory_path() / "tspeval_no_such.jsonl"),
                  std::runtime_error);
}

TEST_CASE("TSPLIB ingestion keeps the first points and skips other formats") {
  const fs::path dir = fresh_dir("tsplib");
  write_file(dir / "alpha.tsp",
             "NAME: alpha\n"
             "TYPE: TSP\n"
             "DIMENSION: 5\n"
             "EDGE_WEIGHT_TYPE: EUC_2D\n"
             "NODE_COORD_SECTION\n"
             "1 0 0\n"
             "2 10 0\n"
             "3 10 10\n"
             "4 0 10\n"
             "5 5 5\n"
             "EOF\n");
  write_file(dir / "beta.tsp",
             "NAME: beta\n"
             "EDGE_WEIGHT_TYPE: GEO\n"
             "NODE_COORD_SECTION\n"
             "1 0 0\n"
             "2 1 1\n"
             "3 2 2\n"
             "EOF\n");
  write_file(dir / "gamma.tsp", "not a tsplib file\n");
  write_file(dir / "delta.tsp",
             "NAME: delta\n"
             "EDGE_WEIGHT_TYPE: EUC_2D\n"
             "NODE_COORD_SECTION\n"
             "1 3.7 9.9\n"
             "2 100 200\n"
             "3 5 6\n"
             "4 7 8\n"
             "EOF\n");

  std::ostringstream log;
  const Corpus corpus = ingest_tsplib(dir, 4, &log);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.instances[0].id == "alpha");
  CHECK(corpus.instances[0].size() == 4);  // first 4 of 5 points
  CHECK(corpus.instances[0].source == Source::Tsplib);
  CHECK(corpus.instances[1].id == "delta");
  CHECK(corpus.instances[1].points[0] == Point{3, 9});  // truncated toward zero
  CHECK(log.str().find("beta") != std::string::npos);
  CHECK(log.str().find("gamma") != std::string::npos);
}

TEST_CASE("ingesting a missing directory raises") {
  CHECK_THROWS_AS(ingest_tsplib(fs::temp_directory_path() / "tspeval_no_dir", 10),
                  std::runtime_error);
}
