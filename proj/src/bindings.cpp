#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "tspeval/analysis.hpp"
#include "tspeval/dataset.hpp"
#include "tspeval/prompt.hpp"
#include "tspeval/runner.hpp"
#include "tspeval/solver.hpp"

namespace py = pybind11;
using namespace tspeval;

namespace {

using PyPoint = std::pair<std::int64_t, std::int64_t>;

Instance make_instance(std::string id, const std::vector<PyPoint>& points) {
  Instance inst;
  inst.id = std::move(id);
  inst.source = Source::Inline;
  inst.points.reserve(points.size());
  for (const auto& [x, y] : points) inst.points.push_back(Point{x, y});
  return inst;
}

std::vector<PyPoint> points_of(const Instance& inst) {
  std::vector<PyPoint> out;
  out.reserve(inst.points.size());
  for (const auto& p : inst.points) out.emplace_back(p.x, p.y);
  return out;
}

py::dict solver_result_dict(const SolverResult& r) {
  py::dict d;
  d["order"] = r.tour.order;
  d["cost"] = r.cost;
  d["method"] = to_string(r.method);
  d["exact"] = r.exact;
  return d;
}

py::dict verdict_dict(const Verdict& v) {
  py::list reasons;
  for (Reason r : v.reasons) reasons.append(to_string(r));
  py::dict d;
  d["valid"] = v.valid;
  d["reasons"] = reasons;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "TSP prompting evaluation core";

  py::class_<Instance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("id"), py::arg("points"))
      .def_readwrite("id", &Instance::id)
      .def_property_readonly("points", &points_of)
      .def("__len__", [](const Instance& i) { return i.size(); })
      .def("__repr__", [](const Instance& i) {
        return "Instance(id=" + i.id + ", n=" + std::to_string(i.size()) + ")";
      });

  m.def(
      "euclidean",
      [](const PyPoint& a, const PyPoint& b) {
        return euclidean(Point{a.first, a.second}, Point{b.first, b.second});
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "distance_matrix",
      [](const Instance& inst) {
        const DistanceMatrix d = distance_matrix(inst);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(d.size()));
        for (int i = 0; i < d.size(); ++i) {
          rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(d.size()));
          for (int j = 0; j < d.size(); ++j) {
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d.at(i, j);
          }
        }
        return rows;
      },
      py::arg("instance"));

  m.def(
      "tour_cost",
      [](const Instance& inst, const std::vector<int>& order) {
        return tour_cost(inst, Tour{order});
      },
      py::arg("instance"), py::arg("order"));

  m.def("format_number", &format_number, py::arg("value"), py::arg("decimals") = 2);

  m.def(
      "solve",
      [](const Instance& inst, const std::string& method, int exact_limit, int restarts,
         std::uint64_t seed) {
        if (method == "brute_force") return solver_result_dict(solve_brute_force(inst));
        if (method == "held_karp") {
          return solver_result_dict(solve_held_karp(inst, exact_limit));
        }
        if (method == "heuristic") {
          return solver_result_dict(solve_heuristic(inst, restarts, seed));
        }
        if (method == "reference") {
          return solver_result_dict(solve_reference(inst, exact_limit, restarts, seed));
        }
        throw std::invalid_argument("unknown method: " + method);
      },
      py::arg("instance"), py::arg("method") = "reference", py::arg("exact_limit") = 20,
      py::arg("restarts") = 8, py::arg("seed") = 0);

  m.def(
      "sample_random_costs",
      [](const Instance& inst, int n, std::uint64_t seed) {
        return sample_random_costs(inst, n, seed).costs;
      },
      py::arg("instance"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "build_prompt",
      [](const Instance& inst, const std::string& technique, bool corrected_formula) {
        PromptOptions options;
        options.corrected_formula = corrected_formula;
        const Technique t = parse_technique(technique);
        return build_prompt(inst, t,
                            t.few_shot() ? default_exemplars() : std::vector<Exemplar>{},
                            options)
            .text;
      },
      py::arg("instance"), py::arg("technique") = "zero_shot",
      py::arg("corrected_formula") = false);

  m.def(
      "parse_order",
      [](const std::string& raw_text) {
        const ParsedTour p = parse_order(raw_text);
        py::dict d;
        d["found"] = p.found;
        d["key"] = p.key_used;
        d["order"] = p.order;
        return d;
      },
      py::arg("raw_text"));

  m.def(
      "validate_order",
      [](const Instance& inst, const std::vector<int>& order, const std::string& finish) {
        ParsedTour p;
        p.order = order;
        p.found = !order.empty();
        return verdict_dict(validate(inst, p, finish_from_string(finish)));
      },
      py::arg("instance"), py::arg("order"), py::arg("finish") = "complete");

  m.def(
      "validate_response",
      [](const Instance& inst, const std::string& raw_text, const std::string& finish) {
        const ParsedTour p = parse_order(raw_text);
        py::dict d = verdict_dict(validate(inst, p, finish_from_string(finish)));
        d["order"] = p.order;
        return d;
      },
      py::arg("instance"), py::arg("raw_text"), py::arg("finish") = "complete");

  m.def("gap", &gap, py::arg("model_cost"), py::arg("reference_cost"));

  m.def(
      "randomness_score",
      [](double model_cost, const std::vector<double>& costs) {
        RandomCostSample sample;
        sample.costs = costs;
        return randomness_score(model_cost, sample);
      },
      py::arg("model_cost"), py::arg("costs"));

  m.def(
      "self_ensemble",
      [](const std::vector<std::optional<double>>& attempt_costs, int ensemble_size) {
        std::vector<EvalRecord> records;
        records.reserve(attempt_costs.size());
        for (std::size_t i = 0; i < attempt_costs.size(); ++i) {
          EvalRecord r;
          r.attempt = static_cast<int>(i);
          r.verdict.valid = attempt_costs[i].has_value();
          r.cost = attempt_costs[i];
          records.push_back(std::move(r));
        }
        const EnsembleChoice c = self_ensemble(records, ensemble_size);
        py::dict d;
        d["any_valid"] = c.any_valid;
        d["attempt"] = c.attempt;
        if (c.any_valid) {
          d["cost"] = c.cost;
        } else {
          d["cost"] = py::none();
        }
        return d;
      },
      py::arg("attempt_costs"), py::arg("ensemble_size"));

  m.def(
      "generate_corpus",
      [](const std::vector<int>& sizes, int per_size, std::int64_t coord_min,
         std::int64_t coord_max, std::uint64_t seed, const std::filesystem::path& out) {
        DatasetSpec spec;
        spec.sizes = sizes;
        spec.per_size = per_size;
        spec.coord_min = coord_min;
        spec.coord_max = coord_max;
        spec.seed = seed;
        const Corpus corpus = generate_random(spec);
        save_corpus(corpus, out);
        return corpus.size();
      },
      py::arg("sizes"), py::arg("per_size") = 30, py::arg("coord_min") = 0,
      py::arg("coord_max") = 100, py::arg("seed") = 0, py::arg("out") = "corpus.jsonl");

  m.def(
      "export_finetune",
      [](const std::filesystem::path& corpus, const std::filesystem::path& out,
         int exact_limit) {
        return export_finetune_jsonl(load_corpus(corpus), out, exact_limit);
      },
      py::arg("corpus"), py::arg("out"), py::arg("exact_limit") = 20);

  m.def(
      "run_eval",
      [](const std::filesystem::path& corpus, const std::filesystem::path& out,
         const std::vector<std::string>& techniques, const std::string& backend, int k,
         const std::vector<int>& ensemble_sizes, int randomness_n, int exact_limit,
         int restarts, std::uint64_t seed, double noise_p, std::uint64_t mock_seed,
         int parallelism) {
        RunConfig c;
        c.corpus = corpus;
        c.out = out;
        c.techniques = techniques;
        c.backend.kind = backend;
        c.backend.mock_noise_p = noise_p;
        c.backend.mock_seed = mock_seed;
        c.backend.parallelism = parallelism;
        c.backend.exact_limit = exact_limit;
        c.k = k;
        c.ensemble_sizes = ensemble_sizes;
        c.randomness_n = randomness_n;
        c.exact_limit = exact_limit;
        c.heuristic_restarts = restarts;
        c.seed = seed;
        const RunSummary s = run_eval(c);
        py::dict d;
        d["run_id"] = s.run_id;
        d["issued"] = s.issued;
        d["skipped"] = s.skipped;
        d["total"] = s.total;
        return d;
      },
      py::arg("corpus"), py::arg("out"),
      py::arg("techniques") =
          std::vector<std::string>{"zero_shot", "zero_shot_cot", "few_shot", "few_shot_cot"},
      py::arg("backend") = "mock:optimal", py::arg("k") = 11,
      py::arg("ensemble_sizes") = std::vector<int>{1, 3, 5, 7, 9, 11},
      py::arg("randomness_n") = 1000, py::arg("exact_limit") = 20, py::arg("restarts") = 8,
      py::arg("seed") = 0, py::arg("noise_p") = 0.3, py::arg("mock_seed") = 0,
      py::arg("parallelism") = 4);

  m.def("write_report",
        [](const std::filesystem::path& out_dir) { write_report(out_dir); },
        py::arg("out_dir"));
}
