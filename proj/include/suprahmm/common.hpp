// suprahmm/common.hpp

// Copyright 2026  The suprahmm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SUPRAHMM_COMMON_HPP_
#define SUPRAHMM_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace suprahmm {

inline constexpr const char* kVersion = "0.3.0";

/// Failure categories. The CLI maps some of these onto distinct exit codes.
enum class ErrorKind {
  kInvalidArgument,
  kEmptyInput,
  kTooShort,
  kNumeric,
  kDimensionMismatch,
  kUnsupportedOrder,
  kDegenerateSegment,
  kDuplicateKey,
  kParse,
  kIo,
  kConfig,
  kIncompleteBank,
  kIncompatibleFeatures,
  kUndefinedT,
};

inline const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kTooShort: return "too-short";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kUnsupportedOrder: return "unsupported-order";
    case ErrorKind::kDegenerateSegment: return "degenerate-segment";
    case ErrorKind::kDuplicateKey: return "duplicate-key";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIncompleteBank: return "incomplete-bank";
    case ErrorKind::kIncompatibleFeatures: return "incompatible-features";
    case ErrorKind::kUndefinedT: return "undefined-t";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double LogSumExp(std::span<const double> v) {
  double m = kLogZero;
  for (double x : v) m = std::max(m, x);
  if (m == kLogZero) return kLogZero;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double SafeLog(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

// Warnings go to stderr unless a test installs its own sink.
using WarningSink = std::function<void(const std::string&)>;

inline WarningSink& WarningSinkRef() {
  static WarningSink sink = [](const std::string& msg) {
    std::cerr << "WARNING: " << msg << '\n';
  };
  return sink;
}

inline std::mutex& WarningMutex() {
  static std::mutex m;
  return m;
}

inline void Warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(WarningMutex());
  WarningSinkRef()(msg);
}

/// Swaps the warning sink for the lifetime of the guard.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink) {
    std::lock_guard<std::mutex> lock(WarningMutex());
    previous_ = std::exchange(WarningSinkRef(), std::move(sink));
  }
  ~ScopedWarningSink() {
    std::lock_guard<std::mutex> lock(WarningMutex());
    WarningSinkRef() = std::move(previous_);
  }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

/// 64-bit FNV-1a; used for stable per-utterance sub-seeds and fingerprints.
inline std::uint64_t Fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
/// visited exactly once; callers write results into per-index slots.
inline void ParallelFor(std::size_t n, int jobs,
                        const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace suprahmm

#endif  // SUPRAHMM_COMMON_HPP_
