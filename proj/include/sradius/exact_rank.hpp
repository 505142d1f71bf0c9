#pragma once

// Exact rank of integer matrices: a rank computed modulo a 61-bit prime
// (a lower bound on the rational rank), confirmed by fraction-free Bareiss
// elimination over big integers when the modular rank is deficient.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace sradius::exact {

using BigInt = boost::multiprecision::cpp_int;

/// Row-major integer matrix.
template <class T>
struct IntMatrix {
  int rows = 0, cols = 0;
  std::vector<T> data;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {}
  T& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
  const T& operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)];
  }
};

namespace detail {

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kPrime) s -= kPrime;
  return s;
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a);
    a = mulmod(a, a);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t reduce(const BigInt& v) {
  BigInt m = v % BigInt(kPrime);
  if (m < 0) m += BigInt(kPrime);
  return static_cast<std::uint64_t>(m);
}

}  // namespace detail

inline int rank_mod_prime(const IntMatrix<BigInt>& m) {
  IntMatrix<std::uint64_t> a(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) a.data[i] = detail::reduce(m.data[i]);
  int rank = 0;
  for (int c = 0; c < a.cols && rank < a.rows; ++c) {
    int piv = -1;
    for (int r = rank; r < a.rows; ++r)
      if (a(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(rank, j));
    const std::uint64_t inv = detail::powmod(a(rank, c), detail::kPrime - 2);
    for (int r = rank + 1; r < a.rows; ++r) {
      if (a(r, c) == 0) continue;
      const std::uint64_t f = detail::mulmod(a(r, c), inv);
      for (int j = c; j < a.cols; ++j) {
        const std::uint64_t t = detail::mulmod(f, a(rank, j));
        a(r, j) = a(r, j) >= t ? a(r, j) - t : a(r, j) + detail::kPrime - t;
      }
    }
    ++rank;
  }
  return rank;
}

/// Fraction-free Gaussian elimination; every intermediate is an exact minor.
inline int rank_bareiss(IntMatrix<BigInt> a) {
  int rank = 0;
  BigInt prev = 1;
  for (int c = 0; c < a.cols && rank < a.rows; ++c) {
    int piv = -1;
    for (int r = rank; r < a.rows; ++r)
      if (a(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(rank, j));
    for (int r = rank + 1; r < a.rows; ++r) {
      for (int j = c + 1; j < a.cols; ++j) a(r, j) = (a(rank, c) * a(r, j) - a(r, c) * a(rank, j)) / prev;
      a(r, c) = 0;
    }
    prev = a(rank, c);
    ++rank;
  }
  return rank;
}

/// Exact rational rank of an integer matrix.
inline int rank(const IntMatrix<BigInt>& m) {
  const int full = std::min(m.rows, m.cols);
  const int r = rank_mod_prime(m);
  return r == full ? r : rank_bareiss(m);
}

}  // namespace sradius::exact
