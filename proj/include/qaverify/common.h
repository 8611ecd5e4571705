// Copyright 2026 The qaverify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAVERIFY_COMMON_H_
#define QAVERIFY_COMMON_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

namespace qaverify {

using json = nlohmann::json;

// Input that violates a documented contract (malformed records, bad spans,
// join mismatches, invalid config). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structured parse failure; `where` is a line number or a JSON path.
class ParseError : public ValidationError {
 public:
  ParseError(std::string where, const std::string &message)
      : ValidationError(where + ": " + message), where_(std::move(where)) {}
  const std::string &where() const { return where_; }

 private:
  std::string where_;
};

// Model backend failure. Transport failures are retriable; malformed
// responses (e.g. NaN scores) are not. Maps to CLI exit code 3.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string &message, bool retriable)
      : std::runtime_error(message), retriable_(retriable) {}
  bool retriable() const { return retriable_; }

 private:
  bool retriable_;
};

// Reads a whole file; throws ValidationError if it cannot be opened.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

// Splits text into lines, dropping a trailing empty line.
std::vector<std::string> SplitLines(std::string_view text);

// Line-delimited JSON. Parsing throws ParseError("line N", ...) on the first
// bad line; callers that need per-line recovery parse lines themselves.
std::vector<json> ReadJsonLines(const std::string &path);
void WriteJsonLines(const std::string &path, const std::vector<json> &rows);
std::string DumpJsonLines(const std::vector<json> &rows);

// 64-bit FNV-1a. Used for config hashes and mock template selection, so the
// value must never change.
uint64_t Fnv1a64(std::string_view data);
std::string HexDigest(uint64_t value);

// Correctly rounded floating-point sum (Shewchuk partials, as in Python's
// math.fsum). The result is independent of summation order.
double ExactSum(std::span<const double> values);

// Uniform integer in [0, bound) by rejection sampling on mt19937_64 output.
// Unlike std::uniform_int_distribution this is identical on every stdlib.
uint64_t UniformBelow(std::mt19937_64 &rng, uint64_t bound);

// Fisher-Yates shuffle driven by UniformBelow.
template <typename T>
void DeterministicShuffle(std::vector<T> &items, std::mt19937_64 &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = UniformBelow(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Applies fn to every input on up to `jobs` threads and returns results in
// input order. The first exception thrown by any call is rethrown after all
// workers stop.
template <typename In, typename Fn>
auto OrderedParallelMap(const std::vector<In> &inputs, int jobs, Fn fn)
    -> std::vector<decltype(fn(inputs.front()))> {
  using Out = decltype(fn(inputs.front()));
  std::vector<Out> outputs(inputs.size());
  if (jobs <= 1 || inputs.size() <= 1) {
    for (size_t i = 0; i < inputs.size(); ++i) outputs[i] = fn(inputs[i]);
    return outputs;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (!failed.load()) {
      size_t i = next.fetch_add(1);
      if (i >= inputs.size()) break;
      try {
        outputs[i] = fn(inputs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  size_t n = std::min<size_t>(static_cast<size_t>(jobs), inputs.size());
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto &t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return outputs;
}

// Warnings go to stderr with a component prefix. Tests can install a sink.
using WarningSink = std::function<void(const std::string &)>;
void SetWarningSink(WarningSink sink);
void Warn(const std::string &component, const std::string &message);

}  // namespace qaverify

#endif  // QAVERIFY_COMMON_H_
