#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tspeval/analysis.hpp"
#include "tspeval/dataset.hpp"
#include "tspeval/prompt.hpp"
#include "tspeval/runner.hpp"

namespace {

// "10-22,27" -> {10,...,22,27}, ascending, deduplicated.
std::vector<int> parse_sizes(const std::string& text) {
  std::set<int> sizes;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (token.empty()) continue;
    const std::size_t dash = token.find('-');
    try {
      if (dash == std::string::npos) {
        sizes.insert(std::stoi(token));
      } else {
        const int lo = std::stoi(token.substr(0, dash));
        const int hi = std::stoi(token.substr(dash + 1));
        if (lo > hi) throw std::invalid_argument("range is backwards");
        for (int s = lo; s <= hi; ++s) sizes.insert(s);
      }
    } catch (const std::exception&) {
      throw CLI::ValidationError("--sizes", "cannot parse size token '" + token + "'");
    }
  }
  if (sizes.empty()) throw CLI::ValidationError("--sizes", "no sizes given");
  return {sizes.begin(), sizes.end()};
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    if (comma > pos) out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

int require_out(const std::string& out, const CLI::App* sub) {
  if (!out.empty()) return 0;
  std::cerr << "error: --out is required for '" << sub->get_name() << "'\n\n"
            << sub->help();
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TSP prompting evaluation harness"};
  app.require_subcommand(1);

  std::string out;
  std::uint64_t seed = 0;
  app.add_option("--out", out, "Output file or directory (meaning depends on subcommand)");
  app.add_option("--seed", seed, "Root RNG seed");

  auto* generate = app.add_subcommand("generate", "Generate a random corpus");
  std::string sizes_text = "10-22,27";
  int per_size = 30;
  std::int64_t coord_min = 0;
  std::int64_t coord_max = 100;
  generate->add_option("--sizes", sizes_text, "Station counts, e.g. 10-22,27")
      ->capture_default_str();
  generate->add_option("--per-size", per_size, "Instances per size")->capture_default_str();
  generate->add_option("--coord-min", coord_min, "Minimum coordinate")->capture_default_str();
  generate->add_option("--coord-max", coord_max, "Maximum coordinate")->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Build a corpus from TSPLIB files");
  std::string tsplib_dir;
  int take_first = 10;
  ingest->add_option("--dir", tsplib_dir, "Directory of TSPLIB .tsp files")->required();
  ingest->add_option("--take", take_first, "Keep the first N coordinates of each file")
      ->capture_default_str();

  auto* run = app.add_subcommand("run", "Evaluate techniques over a corpus");
  run->set_config("--config", "", "Read options from an INI file (flat keys)");
  tspeval::RunConfig rc;
  std::string corpus_path;
  std::string techniques_text = "zero_shot,zero_shot_cot,few_shot,few_shot_cot";
  std::string ensemble_text = "1,3,5,7,9,11";
  run->add_option("--corpus", corpus_path, "Corpus JSONL file")->required();
  run->add_option("--techniques", techniques_text, "Comma-separated technique names")
      ->capture_default_str();
  run->add_option("--backend", rc.backend.kind,
                  "mock:optimal | mock:heuristic | mock:noisy | openai")
      ->capture_default_str();
  run->add_option("--endpoint", rc.backend.endpoint, "Chat completions base URL");
  run->add_option("--model", rc.backend.model, "Model name")->capture_default_str();
  run->add_option("--api-key-env", rc.backend.api_key_env,
                  "Environment variable holding the API key")
      ->capture_default_str();
  run->add_option("--temperature", rc.backend.temperature, "Sampling temperature")
      ->capture_default_str();
  run->add_option("--max-tokens", rc.backend.max_tokens,
                  "Response token cap (0 keeps the server default)")
      ->capture_default_str();
  run->add_option("--timeout-s", rc.backend.timeout_s, "Per-request timeout")
      ->capture_default_str();
  run->add_option("--max-retries", rc.backend.max_retries, "Retries on transient failures")
      ->capture_default_str();
  run->add_option("--retry-backoff-ms", rc.backend.retry_backoff_ms,
                  "Initial retry backoff, doubled per retry")
      ->capture_default_str();
  run->add_option("--parallelism", rc.backend.parallelism, "Concurrent requests")
      ->capture_default_str();
  run->add_option("--mock-noise-p", rc.backend.mock_noise_p,
                  "Corruption probability of mock:noisy")
      ->capture_default_str();
  run->add_option("--mock-seed", rc.backend.mock_seed, "Mock backend seed")
      ->capture_default_str();
  run->add_option("--k", rc.k, "Responses sampled per prompt")->capture_default_str();
  run->add_option("--ensemble-sizes", ensemble_text, "Ensemble sizes for the report")
      ->capture_default_str();
  run->add_option("--randomness-n", rc.randomness_n, "Random tours per instance")
      ->capture_default_str();
  run->add_option("--exact-limit", rc.exact_limit,
                  "Largest size solved exactly for references")
      ->capture_default_str();
  run->add_option("--restarts", rc.heuristic_restarts, "Heuristic reference restarts")
      ->capture_default_str();

  auto* rescore = app.add_subcommand("rescore", "Recompute scores from stored responses");
  std::string run_dir;
  std::string rescore_corpus;
  rescore->add_option("--run", run_dir, "Run directory")->required();
  rescore->add_option("--corpus", rescore_corpus,
                      "Corpus path override (content must match the original)");

  auto* ensemble = app.add_subcommand("ensemble", "Print per-instance ensemble choices");
  std::string ensemble_run;
  std::string ensemble_b_text;
  ensemble->add_option("--run", ensemble_run, "Run directory")->required();
  ensemble->add_option("--b", ensemble_b_text,
                       "Ensemble sizes to print (default: the run's configured sizes)");

  auto* report = app.add_subcommand("report", "Write report tables for a run");
  std::string report_run;
  report->add_option("--run", report_run, "Run directory")->required();

  auto* exportft = app.add_subcommand("export-finetune", "Export fine-tuning JSONL");
  std::string export_corpus;
  int export_exact_limit = tspeval::kDefaultExactLimit;
  exportft->add_option("--corpus", export_corpus, "Corpus JSONL file")->required();
  exportft->add_option("--exact-limit", export_exact_limit, "Largest size the solver accepts")
      ->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      if (int rc_exit = require_out(out, generate)) return rc_exit;
      tspeval::DatasetSpec spec;
      spec.sizes = parse_sizes(sizes_text);
      spec.per_size = per_size;
      spec.coord_min = coord_min;
      spec.coord_max = coord_max;
      spec.seed = seed;
      const auto corpus = tspeval::generate_random(spec);
      tspeval::save_corpus(corpus, out);
      std::cout << "wrote " << corpus.size() << " instances to " << out << "\n";
    } else if (ingest->parsed()) {
      if (int rc_exit = require_out(out, ingest)) return rc_exit;
      const auto corpus = tspeval::ingest_tsplib(tsplib_dir, take_first, &std::cerr);
      tspeval::save_corpus(corpus, out);
      std::cout << "wrote " << corpus.size() << " instances to " << out << "\n";
    } else if (run->parsed()) {
      if (int rc_exit = require_out(out, run)) return rc_exit;
      rc.corpus = corpus_path;
      rc.out = out;
      rc.seed = seed;
      rc.techniques = split_csv(techniques_text);
      rc.ensemble_sizes.clear();
      for (const auto& token : split_csv(ensemble_text)) {
        rc.ensemble_sizes.push_back(std::stoi(token));
      }
      rc.backend.exact_limit = rc.exact_limit;
      const auto summary = tspeval::run_eval(rc, &std::cerr);
      std::cout << "run " << summary.run_id << ": issued " << summary.issued
                << ", skipped " << summary.skipped << ", total " << summary.total << "\n";
    } else if (rescore->parsed()) {
      std::optional<std::filesystem::path> override_path;
      if (!rescore_corpus.empty()) override_path = rescore_corpus;
      const auto summary = tspeval::rescore(run_dir, override_path, &std::cerr);
      std::cout << "rescored " << summary.total << " records in " << run_dir << "\n";
    } else if (ensemble->parsed()) {
      const auto records = tspeval::load_records(ensemble_run);
      std::vector<int> ensemble_sizes;
      if (ensemble_b_text.empty()) {
        ensemble_sizes = {1, 3, 5, 7, 9, 11};
      } else {
        for (const auto& token : split_csv(ensemble_b_text)) {
          ensemble_sizes.push_back(std::stoi(token));
        }
      }
      std::map<std::string, std::map<std::string, std::vector<tspeval::EvalRecord>>> groups;
      std::map<std::string, double> ref_cost;
      for (const auto& r : records) {
        groups[r.technique][r.instance_id].push_back(tspeval::to_eval_record(r));
        ref_cost[r.instance_id] = r.ref_cost;
      }
      std::cout << "technique,instance,B,any_valid,attempt,cost,gap\n";
      for (const auto& [tech, insts] : groups) {
        for (const auto& [inst_id, attempts] : insts) {
          for (int b : ensemble_sizes) {
            const auto choice = tspeval::self_ensemble(attempts, b);
            std::cout << tech << "," << inst_id << "," << b << ","
                      << (choice.any_valid ? "1" : "0") << ",";
            if (choice.any_valid) {
              std::cout << choice.attempt << "," << choice.cost << ","
                        << tspeval::gap(choice.cost, ref_cost.at(inst_id));
            } else {
              std::cout << ",,";
            }
            std::cout << "\n";
          }
        }
      }
    } else if (report->parsed()) {
      tspeval::write_report(report_run, &std::cerr);
      std::cout << "report written to " << (std::filesystem::path(report_run) / "report")
                << "\n";
    } else if (exportft->parsed()) {
      if (int rc_exit = require_out(out, exportft)) return rc_exit;
      const auto corpus = tspeval::load_corpus(export_corpus);
      const int lines =
          tspeval::export_finetune_jsonl(corpus, out, export_exact_limit, &std::cerr);
      std::cout << "wrote " << lines << " training lines to " << out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
