#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace cemsc {

/// Invalid user-facing parameters (mesh sizes, model settings, config files).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed (singular system, eigensolver breakdown, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularMatrixError : NumericalError {
  SingularMatrixError(const std::string& msg, std::ptrdiff_t pivot)
      : NumericalError(msg), pivot_index(pivot) {}
  std::ptrdiff_t pivot_index;
};

struct EigenSolveError : NumericalError {
  EigenSolveError(const std::string& msg, int elem) : NumericalError(msg), element(elem) {}
  int element;
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// FNV-1a accumulator used for provenance hashes of grids, fields and basis sets.
class HashStream {
 public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ull;
    }
  }

  template <typename T>
  void add(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    add_bytes(&value, sizeof(T));
  }

  template <typename T>
  void add_span(const T* data, std::size_t n) {
    static_assert(std::is_trivially_copyable_v<T>);
    add_bytes(data, n * sizeof(T));
  }

  template <typename T>
  void add_vector(const std::vector<T>& v) {
    add(v.size());
    if (!v.empty()) add_span(v.data(), v.size());
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

/// Pins BLAS/LAPACK backends to one thread. Call once at program start, before
/// any linear algebra; element-level parallelism is handled by parallel_for
/// instead, which keeps results bit-reproducible regardless of thread count.
void force_single_threaded_blas();

/// Maps a requested thread count (<=0 means "auto") to an actual one.
int resolve_thread_count(int requested);

/// Runs fn(0..n-1) on `threads` workers pulling indices from a shared queue.
/// Callers must make iterations independent; results keyed by index stay
/// deterministic under any schedule.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Locale-independent "%.12g" formatting used by every CSV writer.
std::string format_double(double v);

std::string hex_hash(std::uint64_t h);

}  // namespace cemsc
