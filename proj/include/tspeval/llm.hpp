#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tspeval/prompt.hpp"

namespace tspeval {

enum class Finish { Complete, Truncated, Error };

std::string to_string(Finish f);
Finish finish_from_string(const std::string& s);

struct BackendConfig {
  // mock:optimal | mock:heuristic | mock:noisy | openai
  std::string kind = "mock:optimal";
  std::string endpoint;  // base URL; /chat/completions is appended if absent
  std::string model = "gpt-4";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.7;
  int max_tokens = 0;  // 0 omits the field, leaving the server default
  int timeout_s = 120;
  int max_retries = 3;
  int retry_backoff_ms = 500;
  int parallelism = 4;
  double mock_noise_p = 0.3;
  std::uint64_t mock_seed = 0;
  int exact_limit = 20;
};

struct LlmResponse {
  std::string raw_text;
  Finish finish = Finish::Complete;
  double latency_ms = 0.0;
  int attempt_index = 0;
  std::string error;  // non-empty iff finish == Error
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Must be safe to call from multiple threads.
  virtual LlmResponse complete(const PromptBundle& bundle, int attempt_index) = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// profile: optimal | heuristic | noisy
std::unique_ptr<Backend> make_mock_backend(const std::string& profile, const BackendConfig& config);

// Issues attempts 0..k-1 through a bounded worker pool; the result vector
// is indexed by attempt, independent of completion order. A backend
// exception becomes an error response, it does not abort the batch.
std::vector<LlmResponse> sample_k(Backend& backend, const PromptBundle& bundle, int k,
                                  int parallelism);

}  // namespace tspeval
