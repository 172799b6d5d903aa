#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "pimsner/abgroup.hpp"

namespace oracle {

// k x k minors by cofactor expansion; only for tiny matrices.
inline mpz_class minor_det(const pimsner::IntMatrix& a, const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols) {
  if (rows.empty()) return 1;
  if (rows.size() == 1) return a(rows[0], cols[0]);
  mpz_class total = 0;
  std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::vector<std::size_t> sub_cols;
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (c != j) sub_cols.push_back(cols[c]);
    mpz_class term = a(rows[0], cols[j]) * minor_det(a, sub_rows, sub_cols);
    total += (j % 2 == 0) ? term : mpz_class(-term);
  }
  return total;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (cur.size() == k) {
    f(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, f);
    cur.pop_back();
  }
}

// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1}.
inline std::vector<mpz_class> determinantal_invariants(const pimsner::IntMatrix& a) {
  std::vector<mpz_class> out;
  mpz_class prev = 1;
  const std::size_t lim = std::min(a.rows(), a.cols());
  for (std::size_t k = 1; k <= lim; ++k) {
    mpz_class g = 0;
    std::vector<std::size_t> r, c;
    subsets(a.rows(), k, 0, r, [&](const std::vector<std::size_t>& rows) {
      subsets(a.cols(), k, 0, c, [&](const std::vector<std::size_t>& cols) {
        mpz_class d = minor_det(a, rows, cols);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      });
    });
    if (g == 0) {
      for (; k <= lim; ++k) out.push_back(0);
      break;
    }
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

// Size of the subgroup of (Z/m)^cols killed by A and of the image in (Z/m)^rows,
// by enumerating the whole domain.
struct ModCounts {
  long kernel_size = 0;
  long image_size = 0;
  std::map<long, long> kernel_orders;  // element order -> count
  std::map<long, long> coker_orders;
};

inline long element_order(const std::vector<long>& v, long m) {
  for (long k = 1; k <= m; ++k) {
    bool zero = true;
    for (long x : v)
      if ((x * k) % m != 0) zero = false;
    if (zero) return k;
  }
  return m;
}

inline ModCounts enumerate_mod(const std::vector<std::vector<long>>& a, std::size_t cols, long m) {
  ModCounts out;
  const std::size_t rows = a.size();
  long total = 1;
  for (std::size_t i = 0; i < cols; ++i) total *= m;
  std::set<std::vector<long>> image;
  for (long idx = 0; idx < total; ++idx) {
    std::vector<long> v(cols);
    long t = idx;
    for (std::size_t i = 0; i < cols; ++i) {
      v[i] = t % m;
      t /= m;
    }
    std::vector<long> w(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      long s = 0;
      for (std::size_t c = 0; c < cols; ++c) s += a[r][c] * v[c];
      w[r] = ((s % m) + m) % m;
    }
    bool zero = true;
    for (long x : w)
      if (x) zero = false;
    if (zero) {
      ++out.kernel_size;
      ++out.kernel_orders[element_order(v, m)];
    }
    image.insert(w);
  }
  out.image_size = static_cast<long>(image.size());
  return out;
}

// Order statistics of a finite abelian group given by invariant factors.
inline std::map<long, long> group_orders(const pimsner::FgAbelianGroup& g) {
  std::vector<long> ds;
  for (auto& d : g.torsion()) ds.push_back(d.get_si());
  std::map<long, long> out;
  long total = 1;
  for (long d : ds) total *= d;
  for (long idx = 0; idx < total; ++idx) {
    std::vector<long> v;
    long t = idx, l = 1;
    for (long d : ds) {
      long x = t % d;
      t /= d;
      long o = d / std::gcd(x, d);
      l = std::lcm(l, o);
    }
    ++out[l];
  }
  return out;
}

inline pimsner::IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                        long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  pimsner::IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

// Binary odometer by integer arithmetic, least significant letter first:
// a^k sends w to w + k mod 2^n and restricts to a^carry.
struct OdometerImage {
  std::vector<std::size_t> word;
  long carry = 0;
};

inline OdometerImage odometer_add(const std::vector<std::size_t>& w, long k) {
  long n = static_cast<long>(w.size());
  long v = 0;
  for (long i = n - 1; i >= 0; --i) v = 2 * v + static_cast<long>(w[i]);
  long total = v + k, mod = 1L << n;
  long carry = total >= 0 ? total / mod : -((-total + mod - 1) / mod);
  long r = total - carry * mod;
  OdometerImage out;
  out.carry = carry;
  for (long i = 0; i < n; ++i) out.word.push_back(static_cast<std::size_t>((r >> i) & 1));
  return out;
}

}  // namespace oracle
