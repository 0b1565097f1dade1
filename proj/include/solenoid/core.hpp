#ifndef SOLENOID_CORE_HPP
#define SOLENOID_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sol {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Error hierarchy. The C API maps each class onto an error code; the CLI maps
// RefusalError onto exit status 2 and everything else onto 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
  using Error::Error;
};

class ConstructionError : public Error {
public:
  using Error::Error;
};

class AddressError : public Error {
public:
  using Error::Error;
};

class DegreeError : public Error {
public:
  using Error::Error;
};

class ImmersionError : public Error {
public:
  using Error::Error;
};

// A contract refusal: the inputs are well formed but the requested
// computation's precondition does not hold (tangencies, non-null F, ...).
class RefusalError : public Error {
public:
  using Error::Error;
};

// Sum in a fixed binary-tree order so the result does not depend on how the
// terms were produced.
inline double pairwise_sum(std::span<const double> xs)
{
  if (xs.empty())
    return 0.0;
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs)
      s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Evaluates fn(i) for i in [0, count) on a few worker threads and returns the
// results in index order.
template <class Fn>
auto parallel_map(std::size_t count, Fn fn) -> std::vector<decltype(fn(std::size_t{}))>
{
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(count);
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, count / 64 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers)
          out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

// Representative of x modulo 1 in [-1/2, 1/2).
inline double wrap_centered(double x)
{
  return x - std::floor(x + 0.5);
}

inline double wrap_unit(double x)
{
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

} // namespace sol

#endif
