#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hausdorff {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Points stored column-wise: a d x N matrix holds N points of dimension d.
template <typename Scalar>
using PointSet = Matrix<Scalar>;

using Vectord = Vector<double>;
using Matrixd = Matrix<double>;
using PointSetd = PointSet<double>;

/// Raised when inputs violate a documented precondition (dimension
/// mismatch, misaligned node lists, points outside the domain).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pairwise (cascade) summation in fixed index order. The result depends
/// only on the sequence of values, never on how they were produced.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    Scalar acc(0);
    for (const Scalar& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> flat = values.derived().reshaped();
  return pairwise_sum(std::span<const Scalar>(flat.data(), flat.size()));
}

/// Worker count, capped by HAUSDORFF_OP_THREADS when set.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HAUSDORFF_OP_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Runs body(begin, end) over contiguous chunks of [0, count). Each chunk
/// writes only to its own slots, so output is independent of scheduling.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, count / 1024)));
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&body, &errors, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace hausdorff
