#include "tspeval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "tspeval/prompt.hpp"
#include "tspeval/rng.hpp"
#include "tspeval/solver.hpp"

namespace tspeval {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fixed(double v, int dp) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", dp, v);
  return buf;
}

std::string opt_fixed(const std::optional<double>& v, int dp) {
  return v.has_value() ? fixed(*v, dp) : "None";
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_hash(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read corpus: " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

json config_to_json(const RunConfig& c) {
  json b;
  b["kind"] = c.backend.kind;
  b["endpoint"] = c.backend.endpoint;
  b["model"] = c.backend.model;
  b["api_key_env"] = c.backend.api_key_env;
  b["temperature"] = c.backend.temperature;
  b["max_tokens"] = c.backend.max_tokens;
  b["timeout_s"] = c.backend.timeout_s;
  b["max_retries"] = c.backend.max_retries;
  b["retry_backoff_ms"] = c.backend.retry_backoff_ms;
  b["parallelism"] = c.backend.parallelism;
  b["mock_noise_p"] = c.backend.mock_noise_p;
  b["mock_seed"] = c.backend.mock_seed;
  b["exact_limit"] = c.backend.exact_limit;

  json j;
  j["corpus"] = c.corpus.string();
  j["techniques"] = c.techniques;
  j["backend"] = std::move(b);
  j["k"] = c.k;
  j["ensemble_sizes"] = c.ensemble_sizes;
  j["randomness_n"] = c.randomness_n;
  j["exact_limit"] = c.exact_limit;
  j["heuristic_restarts"] = c.heuristic_restarts;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.corpus = j.at("corpus").get<std::string>();
  c.techniques = j.at("techniques").get<std::vector<std::string>>();
  const json& b = j.at("backend");
  c.backend.kind = b.at("kind").get<std::string>();
  c.backend.endpoint = b.value("endpoint", c.backend.endpoint);
  c.backend.model = b.value("model", c.backend.model);
  c.backend.api_key_env = b.value("api_key_env", c.backend.api_key_env);
  c.backend.temperature = b.value("temperature", c.backend.temperature);
  c.backend.max_tokens = b.value("max_tokens", c.backend.max_tokens);
  c.backend.timeout_s = b.value("timeout_s", c.backend.timeout_s);
  c.backend.max_retries = b.value("max_retries", c.backend.max_retries);
  c.backend.retry_backoff_ms = b.value("retry_backoff_ms", c.backend.retry_backoff_ms);
  c.backend.parallelism = b.value("parallelism", c.backend.parallelism);
  c.backend.mock_noise_p = b.value("mock_noise_p", c.backend.mock_noise_p);
  c.backend.mock_seed = b.value("mock_seed", c.backend.mock_seed);
  c.backend.exact_limit = b.value("exact_limit", c.backend.exact_limit);
  c.k = j.at("k").get<int>();
  c.ensemble_sizes = j.at("ensemble_sizes").get<std::vector<int>>();
  c.randomness_n = j.at("randomness_n").get<int>();
  c.exact_limit = j.at("exact_limit").get<int>();
  c.heuristic_restarts = j.at("heuristic_restarts").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json record_to_json(const RunRecord& r) {
  json j;
  j["run"] = r.run;
  j["instance"] = r.instance_id;
  j["size"] = r.size;
  j["technique"] = r.technique;
  j["attempt"] = r.attempt;
  j["prompt_hash"] = r.prompt_hash;
  j["raw"] = r.raw;
  j["finish"] = r.finish;
  j["valid"] = r.valid;
  j["reasons"] = r.reasons;
  if (r.cost) j["cost"] = *r.cost;
  if (r.gap) j["gap"] = *r.gap;
  if (r.randomness) j["randomness"] = *r.randomness;
  j["ref_cost"] = r.ref_cost;
  j["ref_exact"] = r.ref_exact;
  j["latency_ms"] = r.latency_ms;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.run = j.at("run").get<std::string>();
  r.instance_id = j.at("instance").get<std::string>();
  r.size = j.at("size").get<int>();
  r.technique = j.at("technique").get<std::string>();
  r.attempt = j.at("attempt").get<int>();
  r.prompt_hash = j.value("prompt_hash", std::string{});
  r.raw = j.at("raw").get<std::string>();
  r.finish = j.at("finish").get<std::string>();
  r.valid = j.at("valid").get<bool>();
  r.reasons = j.at("reasons").get<std::vector<std::string>>();
  if (j.contains("cost")) r.cost = j.at("cost").get<double>();
  if (j.contains("gap")) r.gap = j.at("gap").get<double>();
  if (j.contains("randomness")) r.randomness = j.at("randomness").get<double>();
  r.ref_cost = j.at("ref_cost").get<double>();
  r.ref_exact = j.at("ref_exact").get<bool>();
  r.latency_ms = j.value("latency_ms", 0.0);
  return r;
}

json read_manifest(const fs::path& out_dir) {
  const fs::path p = out_dir / "manifest.json";
  std::ifstream f(p);
  if (!f) throw std::runtime_error("no manifest at " + p.string());
  return json::parse(f);
}

void write_manifest(const fs::path& out_dir, const json& manifest) {
  std::ofstream f(out_dir / "manifest.json");
  f << manifest.dump(2) << "\n";
  if (!f) throw std::runtime_error("cannot write manifest in " + out_dir.string());
}

std::string record_key(const std::string& instance_id, const std::string& technique,
                       int attempt) {
  return instance_id + "\x1f" + technique + "\x1f" + std::to_string(attempt);
}

// Per-instance scoring context, computed once and shared by every attempt.
struct InstanceContext {
  SolverResult ref;
  RandomCostSample sample;
};

InstanceContext make_context(const Instance& inst, const RunConfig& config) {
  InstanceContext ctx;
  ctx.ref = solve_reference(inst, config.exact_limit, config.heuristic_restarts, config.seed);
  ctx.sample = sample_random_costs(inst, config.randomness_n,
                                   mix_seed(config.seed, fnv1a64(inst.id)));
  return ctx;
}

void score_into(const Instance& inst, const InstanceContext& ctx, RunRecord& r) {
  const ParsedTour parsed = parse_order(r.raw);
  const Verdict verdict = validate(inst, parsed, finish_from_string(r.finish));
  r.valid = verdict.valid;
  r.reasons.clear();
  for (Reason reason : verdict.reasons) r.reasons.push_back(to_string(reason));
  r.cost.reset();
  r.gap.reset();
  r.randomness.reset();
  if (verdict.valid) {
    const double c = tour_cost(inst, Tour{parsed.order});
    r.cost = c;
    r.gap = gap(c, ctx.ref.cost);
    r.randomness = randomness_score(c, ctx.sample);
  }
  r.ref_cost = ctx.ref.cost;
  r.ref_exact = ctx.ref.exact;
}

std::vector<LlmResponse> sample_attempts(Backend& backend, const PromptBundle& bundle,
                                         const std::vector<int>& attempts, int parallelism) {
  std::vector<LlmResponse> out(attempts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= attempts.size()) return;
      try {
        out[i] = backend.complete(bundle, attempts[i]);
      } catch (const std::exception& e) {
        out[i] = LlmResponse{};
        out[i].finish = Finish::Error;
        out[i].error = e.what();
      }
      out[i].attempt_index = attempts[i];
    }
  };
  const int workers =
      std::max(1, std::min<int>(parallelism, static_cast<int>(attempts.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

std::vector<const Instance*> sorted_instances(const Corpus& corpus) {
  std::vector<const Instance*> out;
  out.reserve(corpus.instances.size());
  for (const auto& inst : corpus.instances) out.push_back(&inst);
  std::sort(out.begin(), out.end(), [](const Instance* a, const Instance* b) {
    if (a->size() != b->size()) return a->size() < b->size();
    return a->id < b->id;
  });
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

std::string config_hash(const RunConfig& config) {
  // Result-affecting fields only; operational knobs (timeouts, retries,
  // parallelism) and file locations stay out. The corpus enters by
  // content, so a moved corpus file keeps its run identity.
  json identity;
  identity["corpus"] = file_hash(config.corpus);
  identity["techniques"] = config.techniques;
  identity["backend"] = {
      {"kind", config.backend.kind},       {"endpoint", config.backend.endpoint},
      {"model", config.backend.model},     {"temperature", config.backend.temperature},
      {"max_tokens", config.backend.max_tokens},
      {"mock_noise_p", config.backend.mock_noise_p},
      {"mock_seed", config.backend.mock_seed},
      {"exact_limit", config.backend.exact_limit},
  };
  identity["k"] = config.k;
  identity["ensemble_sizes"] = config.ensemble_sizes;
  identity["randomness_n"] = config.randomness_n;
  identity["exact_limit"] = config.exact_limit;
  identity["heuristic_restarts"] = config.heuristic_restarts;
  identity["seed"] = config.seed;
  return hex64(fnv1a64(identity.dump()));
}

EvalRecord to_eval_record(const RunRecord& r) {
  EvalRecord e;
  e.instance_id = r.instance_id;
  e.size = r.size;
  e.tag = r.technique;
  e.attempt = r.attempt;
  e.verdict.valid = r.valid;
  for (const auto& s : r.reasons) e.verdict.reasons.insert(reason_from_string(s));
  e.cost = r.cost;
  e.gap = r.gap;
  e.randomness = r.randomness;
  e.ref_exact = r.ref_exact;
  return e;
}

std::vector<RunRecord> load_records(const fs::path& out_dir) {
  const fs::path p = out_dir / "records.jsonl";
  std::vector<RunRecord> out;
  std::ifstream f(p);
  if (!f) return out;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(p.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

RunSummary run_eval(const RunConfig& config, std::ostream* log) {
  if (config.k <= 0) throw std::invalid_argument("k must be positive");
  for (int b : config.ensemble_sizes) {
    if (b < 1 || b > config.k) {
      throw std::invalid_argument("ensemble sizes must lie in 1..k");
    }
  }
  const Corpus corpus = load_corpus(config.corpus);
  const std::string run_id = config_hash(config);

  fs::create_directories(config.out);
  json manifest;
  if (fs::exists(config.out / "manifest.json")) {
    manifest = read_manifest(config.out);
    const std::string existing = manifest.value("run_id", "");
    if (existing != run_id) {
      throw std::runtime_error("run directory " + config.out.string() +
                               " belongs to run " + existing + ", not " + run_id +
                               "; use a fresh directory or the original config");
    }
  } else {
    if (fs::exists(config.out / "records.jsonl")) {
      throw std::runtime_error("records without a manifest in " + config.out.string());
    }
    manifest["run_id"] = run_id;
    manifest["config"] = config_to_json(config);
    manifest["created"] = iso_now();
    manifest["records"] = 0;
    manifest["updated"] = manifest["created"];
    write_manifest(config.out, manifest);
  }

  std::set<std::string> have;
  int total = 0;
  for (const auto& r : load_records(config.out)) {
    have.insert(record_key(r.instance_id, r.technique, r.attempt));
    ++total;
  }

  auto backend = make_backend(config.backend);
  std::ofstream store(config.out / "records.jsonl", std::ios::app);
  if (!store) throw std::runtime_error("cannot open record store in " + config.out.string());

  RunSummary summary;
  summary.run_id = run_id;
  summary.total = total;

  for (const Instance* inst : sorted_instances(corpus)) {
    std::optional<InstanceContext> ctx;
    for (const auto& tech_name : config.techniques) {
      const Technique technique = parse_technique(tech_name);
      std::vector<int> missing;
      for (int a = 0; a < config.k; ++a) {
        if (have.count(record_key(inst->id, tech_name, a))) {
          ++summary.skipped;
        } else {
          missing.push_back(a);
        }
      }
      if (missing.empty()) continue;
      if (!ctx) ctx = make_context(*inst, config);

      const PromptBundle bundle =
          build_prompt(*inst, technique, technique.few_shot() ? default_exemplars()
                                                              : std::vector<Exemplar>{});
      const auto responses =
          sample_attempts(*backend, bundle, missing, config.backend.parallelism);
      for (const auto& resp : responses) {
        RunRecord r;
        r.run = run_id;
        r.instance_id = inst->id;
        r.size = static_cast<int>(inst->size());
        r.technique = tech_name;
        r.attempt = resp.attempt_index;
        r.prompt_hash = hex64(fnv1a64(bundle.text));
        r.raw = resp.raw_text;
        r.finish = to_string(resp.finish);
        r.latency_ms = resp.latency_ms;
        score_into(*inst, *ctx, r);
        store << record_to_json(r).dump() << "\n";
        have.insert(record_key(r.instance_id, r.technique, r.attempt));
        ++summary.issued;
        ++summary.total;
      }
      store.flush();
      if (!store) throw std::runtime_error("record store write failed");
    }
    if (log && summary.issued > 0) {
      *log << "[run] " << inst->id << " done, issued " << summary.issued << " so far\n";
    }
  }

  manifest = read_manifest(config.out);
  manifest["records"] = summary.total;
  manifest["updated"] = iso_now();
  write_manifest(config.out, manifest);
  return summary;
}

RunSummary rescore(const fs::path& out_dir,
                   const std::optional<fs::path>& corpus_override, std::ostream* log) {
  json manifest = read_manifest(out_dir);
  RunConfig config = config_from_json(manifest.at("config"));
  if (corpus_override) config.corpus = *corpus_override;
  const std::string run_id = config_hash(config);
  if (run_id != manifest.value("run_id", "")) {
    throw std::runtime_error("corpus content does not match the one this run was made from");
  }

  const Corpus corpus = load_corpus(config.corpus);
  std::map<std::string, const Instance*> by_id;
  for (const auto& inst : corpus.instances) by_id[inst.id] = &inst;
  std::map<std::string, InstanceContext> contexts;

  auto records = load_records(out_dir);
  for (auto& r : records) {
    auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) {
      throw std::runtime_error("record references unknown instance " + r.instance_id);
    }
    auto ctx = contexts.find(r.instance_id);
    if (ctx == contexts.end()) {
      ctx = contexts.emplace(r.instance_id, make_context(*it->second, config)).first;
    }
    r.size = static_cast<int>(it->second->size());
    score_into(*it->second, ctx->second, r);
  }

  const fs::path tmp = out_dir / "records.jsonl.tmp";
  {
    std::ofstream f(tmp);
    for (const auto& r : records) f << record_to_json(r).dump() << "\n";
    if (!f) throw std::runtime_error("cannot rewrite record store");
  }
  fs::rename(tmp, out_dir / "records.jsonl");

  manifest["records"] = records.size();
  manifest["updated"] = iso_now();
  write_manifest(out_dir, manifest);
  if (log) *log << "[rescore] " << records.size() << " records rescored\n";

  RunSummary summary;
  summary.run_id = run_id;
  summary.total = static_cast<int>(records.size());
  return summary;
}

void write_report(const fs::path& out_dir, std::ostream* log) {
  const json manifest = read_manifest(out_dir);
  const RunConfig config = config_from_json(manifest.at("config"));
  const auto records = load_records(out_dir);

  const fs::path report = out_dir / "report";
  fs::create_directories(report);

  std::map<std::string, std::vector<EvalRecord>> by_technique;
  for (const auto& r : records) by_technique[r.technique].push_back(to_eval_record(r));

  // Technique rows follow the configured order; unknown tags (records made
  // by hand) go after, alphabetically.
  std::vector<std::string> techniques = config.techniques;
  for (const auto& [name, recs] : by_technique) {
    if (std::find(techniques.begin(), techniques.end(), name) == techniques.end()) {
      techniques.push_back(name);
    }
  }

  std::string good = "technique,size,count_valid,count_total,good_order_pct\n";
  std::string gaps = "technique,size,count_valid,count_total,median,iqr\n";
  std::string rand = "technique,size,count_valid,count_total,median,iqr\n";
  for (const auto& name : techniques) {
    const auto it = by_technique.find(name);
    if (it == by_technique.end()) continue;
    for (const auto& g : group_stats(it->second, Metric::GoodOrderPct)) {
      good += name + "," + std::to_string(g.size) + "," + std::to_string(g.count_valid) +
              "," + std::to_string(g.count_total) + "," + opt_fixed(g.median, 2) + "\n";
    }
    for (const auto& g : group_stats(it->second, Metric::Gap)) {
      gaps += name + "," + std::to_string(g.size) + "," + std::to_string(g.count_valid) +
              "," + std::to_string(g.count_total) + "," + opt_fixed(g.median, 6) + "," +
              opt_fixed(g.iqr, 6) + "\n";
    }
    for (const auto& g : group_stats(it->second, Metric::Randomness)) {
      rand += name + "," + std::to_string(g.size) + "," + std::to_string(g.count_valid) +
              "," + std::to_string(g.count_total) + "," + opt_fixed(g.median, 6) + "," +
              opt_fixed(g.iqr, 6) + "\n";
    }
  }
  write_text(report / "good_order.csv", good);
  write_text(report / "gap_stats.csv", gaps);
  write_text(report / "randomness_stats.csv", rand);

  // Ensemble curves. Reference costs ride on the records, so the chosen
  // cost converts to a gap without another solve.
  std::string curves = "technique,size,metric";
  for (int b : config.ensemble_sizes) curves += ",B" + std::to_string(b);
  curves += "\n";
  for (const auto& name : techniques) {
    std::map<int, std::map<std::string, std::vector<EvalRecord>>> by_size;
    std::map<std::string, double> ref_cost;
    for (const auto& r : records) {
      if (r.technique != name) continue;
      by_size[r.size][r.instance_id].push_back(to_eval_record(r));
      ref_cost[r.instance_id] = r.ref_cost;
    }
    for (const auto& [size, insts] : by_size) {
      std::vector<std::string> pct_row, med_row, iqr_row;
      for (int b : config.ensemble_sizes) {
        int any = 0;
        std::vector<double> gaps_b;
        for (const auto& [inst_id, attempts] : insts) {
          const EnsembleChoice choice = self_ensemble(attempts, b);
          if (!choice.any_valid) continue;
          ++any;
          gaps_b.push_back(gap(choice.cost, ref_cost.at(inst_id)));
        }
        pct_row.push_back(
            fixed(100.0 * static_cast<double>(any) / static_cast<double>(insts.size()), 2));
        if (gaps_b.empty()) {
          med_row.push_back("None");
          iqr_row.push_back("None");
        } else {
          med_row.push_back(fixed(quantile(gaps_b, 0.5), 6));
          iqr_row.push_back(fixed(quantile(gaps_b, 0.75) - quantile(gaps_b, 0.25), 6));
        }
      }
      auto emit = [&](const std::string& metric, const std::vector<std::string>& row) {
        curves += name + "," + std::to_string(size) + "," + metric;
        for (const auto& cell : row) curves += "," + cell;
        curves += "\n";
      };
      emit("good_order_pct", pct_row);
      emit("gap_median", med_row);
      emit("gap_iqr", iqr_row);
    }
  }
  write_text(report / "ensemble_curves.csv", curves);

  json summary;
  summary["run"] = manifest.value("run_id", "");
  summary["records"] = records.size();
  std::set<int> sizes;
  for (const auto& r : records) sizes.insert(r.size);
  summary["sizes"] = sizes;
  json technique_summaries = json::object();
  for (const auto& name : techniques) {
    const auto& recs = by_technique.at(name);
    int valid = 0;
    int reject = 0;
    std::vector<double> gap_values;
    for (const auto& e : recs) {
      if (!e.verdict.valid) continue;
      ++valid;
      if (e.gap) gap_values.push_back(*e.gap);
      if (e.randomness && *e.randomness < kRandomnessRejectThreshold) ++reject;
    }
    json t;
    t["count_total"] = recs.size();
    t["count_valid"] = valid;
    t["good_order_pct"] =
        recs.empty() ? json{} : json(100.0 * valid / static_cast<double>(recs.size()));
    t["gap_median"] = gap_values.empty() ? json{} : json(quantile(gap_values, 0.5));
    t["gap_iqr"] = gap_values.empty()
                       ? json{}
                       : json(quantile(gap_values, 0.75) - quantile(gap_values, 0.25));
    t["randomness_reject_pct"] =
        valid == 0 ? json{} : json(100.0 * reject / static_cast<double>(valid));
    technique_summaries[name] = std::move(t);
  }
  summary["techniques"] = std::move(technique_summaries);
  write_text(report / "summary.json", summary.dump(2) + "\n");

  if (log) {
    *log << "[report] " << records.size() << " records -> " << report.string() << "\n";
  }
}

}  // namespace tspeval
