#pragma once

// Max-reduction sweeps shared by every verification in the library.
//
// Each sweep has an OpenMP version and a plain serial version. The serial
// versions are the reference implementations the tests compare against; the
// parallel ones are what the library calls by default. Ties are broken by the
// smallest index tuple so results never depend on how iterations were split
// across threads.

#include "qmlab/rational.hpp"

#include <cstddef>
#include <exception>
#include <optional>

#include <omp.h>

namespace qmlab::kernels {

enum class Execution { serial, parallel };

/// Largest value seen and the indices that produced it.
struct ArgMax {
  Rational value;
  std::size_t i = 0, j = 0, k = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  bool found = false;
};

namespace detail {

inline bool index_less(const ArgMax& x, const ArgMax& y) {
  if (x.i != y.i) return x.i < y.i;
  if (x.j != y.j) return x.j < y.j;
  return x.k < y.k;
}

inline void offer(ArgMax& best, const Rational& v, std::size_t i, std::size_t j, std::size_t k) {
  ArgMax cand;
  cand.i = i;
  cand.j = j;
  cand.k = k;
  if (!best.found || v > best.value || (v == best.value && index_less(cand, best))) {
    best.value = v;
    best.i = i;
    best.j = j;
    best.k = k;
    best.found = true;
  }
}

inline void merge(ArgMax& into, const ArgMax& other) {
  into.evaluated += other.evaluated;
  into.skipped += other.skipped;
  if (other.found) offer(into, other.value, other.i, other.j, other.k);
}

// Rethrows the first exception raised inside a parallel region.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(qmlab_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace detail

/// max over i < n of f(i); f returns std::optional<Rational>, nullopt = skipped.
template <class F>
ArgMax max_serial(std::size_t n, F&& f) {
  ArgMax best;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<Rational> v = f(i);
    if (!v) {
      ++best.skipped;
      continue;
    }
    ++best.evaluated;
    detail::offer(best, *v, i, 0, 0);
  }
  return best;
}

template <class F>
ArgMax max_parallel(std::size_t n, F&& f) {
  ArgMax best;
  detail::ExceptionSlot errors;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      errors.run([&] {
        std::optional<Rational> v = f(static_cast<std::size_t>(i));
        if (!v) {
          ++local.skipped;
          return;
        }
        ++local.evaluated;
        detail::offer(local, *v, static_cast<std::size_t>(i), 0, 0);
      });
    }
#pragma omp critical(qmlab_argmax_merge)
    detail::merge(best, local);
  }
  errors.rethrow();
  return best;
}

/// max over (i, j) of f(i, j).
template <class F>
ArgMax max_pairs_serial(std::size_t n, std::size_t m, F&& f) {
  ArgMax best;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::optional<Rational> v = f(i, j);
      if (!v) {
        ++best.skipped;
        continue;
      }
      ++best.evaluated;
      detail::offer(best, *v, i, j, 0);
    }
  }
  return best;
}

template <class F>
ArgMax max_pairs_parallel(std::size_t n, std::size_t m, F&& f) {
  ArgMax best;
  detail::ExceptionSlot errors;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(dynamic, 1) nowait
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      errors.run([&] {
        for (std::size_t j = 0; j < m; ++j) {
          std::optional<Rational> v = f(static_cast<std::size_t>(i), j);
          if (!v) {
            ++local.skipped;
            continue;
          }
          ++local.evaluated;
          detail::offer(local, *v, static_cast<std::size_t>(i), j, 0);
        }
      });
    }
#pragma omp critical(qmlab_argmax_merge)
    detail::merge(best, local);
  }
  errors.rethrow();
  return best;
}

/// Spread sweep: max over (i, j, k) of |f(i, j) - f(i, k)|.
///
/// Reference version: the literal triple loop.
template <class F>
ArgMax spread_naive(std::size_t n, std::size_t m, F&& f) {
  ArgMax best;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::optional<Rational> a = f(i, j);
      if (!a) {
        ++best.skipped;
        continue;
      }
      for (std::size_t k = 0; k < m; ++k) {
        std::optional<Rational> b = f(i, k);
        if (!b) continue;
        ++best.evaluated;
        detail::offer(best, abs(*a - *b), i, j, k);
      }
    }
  }
  return best;
}

/// Parallel version: per i the spread is max_j f - min_k f, so each i costs
/// m evaluations instead of m^2. The witness is (i, argmax, argmin); ties use
/// the smallest indices, which can differ from the naive witness but never
/// in value.
template <class F>
ArgMax spread_parallel(std::size_t n, std::size_t m, F&& f) {
  ArgMax best;
  detail::ExceptionSlot errors;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(dynamic, 1) nowait
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      errors.run([&] {
        const auto i = static_cast<std::size_t>(ii);
        std::optional<Rational> hi, lo;
        std::size_t j_hi = 0, j_lo = 0;
        std::size_t seen = 0;
        for (std::size_t j = 0; j < m; ++j) {
          std::optional<Rational> v = f(i, j);
          if (!v) {
            ++local.skipped;
            continue;
          }
          ++seen;
          if (!hi || *v > *hi) {
            hi = *v;
            j_hi = j;
          }
          if (!lo || *v < *lo) {
            lo = *v;
            j_lo = j;
          }
        }
        if (seen == 0) return;
        local.evaluated += seen * seen;
        detail::offer(local, *hi - *lo, i, j_hi, j_lo);
      });
    }
#pragma omp critical(qmlab_argmax_merge)
    detail::merge(best, local);
  }
  errors.rethrow();
  return best;
}

template <class F>
ArgMax max_over(Execution e, std::size_t n, F&& f) {
  return e == Execution::serial ? max_serial(n, f) : max_parallel(n, f);
}

template <class F>
ArgMax max_over_pairs(Execution e, std::size_t n, std::size_t m, F&& f) {
  return e == Execution::serial ? max_pairs_serial(n, m, f) : max_pairs_parallel(n, m, f);
}

template <class F>
ArgMax spread(Execution e, std::size_t n, std::size_t m, F&& f) {
  return e == Execution::serial ? spread_naive(n, m, f) : spread_parallel(n, m, f);
}

/// Applies QMLAB_THREADS (if set and positive) to the OpenMP runtime.
/// Returns the resulting thread limit.
int apply_thread_limit_from_env();

}  // namespace qmlab::kernels
