#include "tspeval/llm.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <regex>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tspeval/rng.hpp"
#include "tspeval/solver.hpp"

namespace tspeval {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// The target instance is the last "station 0 (...)" block in the prompt;
// earlier blocks belong to exemplars.
Instance instance_from_prompt(const std::string& text) {
  static const std::regex station_re(
      R"(station\s+(\d+)\s+\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
  struct Hit {
    int index;
    Point p;
  };
  std::vector<Hit> hits;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), station_re);
       it != std::sregex_iterator(); ++it) {
    hits.push_back(Hit{std::stoi((*it)[1].str()),
                       Point{std::stoll((*it)[2].str()), std::stoll((*it)[3].str())}});
  }
  std::size_t begin = hits.size();
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i].index == 0) begin = i;
  }
  Instance inst;
  inst.id = "prompt";
  inst.source = Source::Inline;
  int expect = 0;
  for (std::size_t i = begin; i < hits.size() && hits[i].index == expect; ++i, ++expect) {
    inst.points.push_back(hits[i].p);
  }
  if (inst.points.size() < 3) {
    throw std::runtime_error("mock backend found no station list in the prompt");
  }
  return inst;
}

enum class MockProfile { Optimal, Heuristic, Noisy };

MockProfile parse_profile(const std::string& s) {
  if (s == "optimal") return MockProfile::Optimal;
  if (s == "heuristic") return MockProfile::Heuristic;
  if (s == "noisy") return MockProfile::Noisy;
  throw std::invalid_argument("unknown mock profile: " + s);
}

class MockBackend final : public Backend {
 public:
  MockBackend(MockProfile profile, BackendConfig config)
      : profile_(profile), config_(std::move(config)) {}

  std::string name() const override {
    switch (profile_) {
      case MockProfile::Optimal: return "mock:optimal";
      case MockProfile::Heuristic: return "mock:heuristic";
      case MockProfile::Noisy: return "mock:noisy";
    }
    return "mock";
  }

  LlmResponse complete(const PromptBundle& bundle, int attempt_index) override {
    const auto start = Clock::now();
    const Instance inst = instance_from_prompt(bundle.text);
    const DistanceMatrix d = distance_matrix(inst);
    Rng rng(mix_seed(mix_seed(config_.mock_seed, fnv1a64(bundle.text)),
                     static_cast<std::uint64_t>(attempt_index)));

    Tour tour;
    if (profile_ == MockProfile::Optimal) {
      tour = reference_tour(inst);
    } else {
      const int n = d.size();
      auto order = nearest_neighbor_order(d, static_cast<int>(rng.below(n)));
      order.push_back(order.front());
      tour = normalize_tour(Tour{std::move(order)});
    }

    bool truncate = false;
    if (profile_ == MockProfile::Noisy && rng.unit() < config_.mock_noise_p) {
      if (rng.below(2) == 0) {
        corrupt_order(tour.order, rng);
      } else {
        truncate = true;
      }
    }

    LlmResponse r;
    r.attempt_index = attempt_index;
    r.raw_text = render_answer_json(d, tour, tour_cost(d, tour), ListStyle::Spaced);
    if (truncate) {
      const std::size_t at = r.raw_text.find("minimum_distance_order");
      const std::size_t floor = (at == std::string::npos) ? 1 : at + 2;
      r.raw_text.resize(floor + rng.below(r.raw_text.size() - floor));
      r.finish = Finish::Truncated;
    }
    r.latency_ms = ms_since(start);
    return r;
  }

 private:
  // Overwrites one interior stop with another: one station is now visited
  // twice and one not at all, the shape seen in real hallucinated orders.
  static void corrupt_order(std::vector<int>& order, Rng& rng) {
    const std::size_t n = order.size() - 1;  // closing element stays
    std::size_t i = 1 + rng.below(n - 1);
    std::size_t j = 1 + rng.below(n - 1);
    while (j == i) j = 1 + rng.below(n - 1);
    order[i] = order[j];
  }

  Tour reference_tour(const Instance& inst) {
    std::string key;
    for (const auto& p : inst.points) {
      key += std::to_string(p.x) + "," + std::to_string(p.y) + ";";
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      auto solved = solve_reference(inst, config_.exact_limit, 8, config_.mock_seed);
      it = cache_.emplace(std::move(key), std::move(solved.tour)).first;
    }
    return it->second;
  }

  MockProfile profile_;
  BackendConfig config_;
  std::mutex mu_;
  std::map<std::string, Tour> cache_;
};

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint must be an http(s) URL: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return SplitUrl{endpoint, ""};
  return SplitUrl{endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
      throw std::invalid_argument("openai backend needs an endpoint");
    }
    auto url = split_url(config_.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.base.rfind("https://", 0) == 0) {
      throw std::invalid_argument("built without TLS; use an http endpoint");
    }
#endif
    base_ = url.base;
    path_ = url.path;
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    const std::string suffix = "/chat/completions";
    if (path_.size() < suffix.size() ||
        path_.compare(path_.size() - suffix.size(), suffix.size(), suffix) != 0) {
      path_ += suffix;
    }
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }

  std::string name() const override { return "openai:" + config_.model; }

  LlmResponse complete(const PromptBundle& bundle, int attempt_index) override {
    const auto start = Clock::now();
    LlmResponse r;
    r.attempt_index = attempt_index;

    nlohmann::ordered_json body{
        {"model", config_.model},
        {"messages", {{{"role", "user"}, {"content", bundle.text}}}},
        {"temperature", config_.temperature},
    };
    if (config_.max_tokens > 0) body["max_tokens"] = config_.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string failure;
    for (int try_i = 0; try_i <= config_.max_retries; ++try_i) {
      if (try_i > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(config_.retry_backoff_ms << (try_i - 1)));
      }
      httplib::Client cli(base_);
      cli.set_connection_timeout(config_.timeout_s);
      cli.set_read_timeout(config_.timeout_s);
      auto res = cli.Post(path_, headers, payload, "application/json");
      if (!res) {
        failure = "transport: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        failure = "http " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        r.finish = Finish::Error;
        r.error = "http " + std::to_string(res->status) + ": " + snippet(res->body);
        r.latency_ms = ms_since(start);
        return r;
      }
      parse_completion(res->body, r);
      r.latency_ms = ms_since(start);
      return r;
    }
    r.finish = Finish::Error;
    r.error = failure + " after " + std::to_string(config_.max_retries + 1) + " tries";
    r.latency_ms = ms_since(start);
    return r;
  }

 private:
  static std::string snippet(const std::string& s) {
    return s.size() <= 200 ? s : s.substr(0, 200) + "...";
  }

  static void parse_completion(const std::string& body, LlmResponse& r) {
    try {
      const auto j = nlohmann::json::parse(body);
      const auto& choice = j.at("choices").at(0);
      r.raw_text = choice.at("message").at("content").get<std::string>();
      const std::string reason = choice.value("finish_reason", "stop");
      r.finish = (reason == "length") ? Finish::Truncated : Finish::Complete;
    } catch (const nlohmann::json::exception& e) {
      r.finish = Finish::Error;
      r.error = std::string("bad completion payload: ") + e.what();
    }
  }

  BackendConfig config_;
  std::string base_;
  std::string path_;
  std::string api_key_;
};

}  // namespace

std::string to_string(Finish f) {
  switch (f) {
    case Finish::Complete: return "complete";
    case Finish::Truncated: return "truncated";
    case Finish::Error: return "error";
  }
  throw std::invalid_argument("unknown finish");
}

Finish finish_from_string(const std::string& s) {
  if (s == "complete") return Finish::Complete;
  if (s == "truncated") return Finish::Truncated;
  if (s == "error") return Finish::Error;
  throw std::invalid_argument("unknown finish: " + s);
}

std::unique_ptr<Backend> make_mock_backend(const std::string& profile,
                                           const BackendConfig& config) {
  return std::make_unique<MockBackend>(parse_profile(profile), config);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  if (config.kind.rfind("mock:", 0) == 0) {
    return make_mock_backend(config.kind.substr(5), config);
  }
  if (config.kind == "openai") return std::make_unique<HttpBackend>(config);
  throw std::invalid_argument("unknown backend kind: " + config.kind);
}

std::vector<LlmResponse> sample_k(Backend& backend, const PromptBundle& bundle, int k,
                                  int parallelism) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  std::vector<LlmResponse> out(static_cast<std::size_t>(k));
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= k) return;
      try {
        out[static_cast<std::size_t>(i)] = backend.complete(bundle, i);
      } catch (const std::exception& e) {
        LlmResponse r;
        r.finish = Finish::Error;
        r.error = e.what();
        out[static_cast<std::size_t>(i)] = std::move(r);
      }
      out[static_cast<std::size_t>(i)].attempt_index = i;
    }
  };

  const int workers = std::max(1, std::min(parallelism, k));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

}  // namespace tspeval
