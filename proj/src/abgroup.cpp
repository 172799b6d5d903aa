#include "pimsner/abgroup.hpp"

#include <algorithm>
#include <sstream>

#include "pimsner/coeff.hpp"
#include "pimsner/error.hpp"

namespace pimsner {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  for (auto& r : rows) {
    if (r.size() != cols_) throw DomainError("ragged matrix literal");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::parse(const std::string& text) {
  std::vector<std::vector<mpz_class>> rows;
  std::stringstream all(text);
  std::string row_text;
  while (std::getline(all, row_text, ';')) {
    std::stringstream rs(row_text);
    std::string tok;
    std::vector<mpz_class> row;
    while (rs >> tok) {
      mpz_class v;
      if (v.set_str(tok, 10) != 0) throw DomainError("bad matrix entry '" + tok + "'");
      row.push_back(v);
    }
    if (row.empty()) {
      if (rows.empty() && text.find_first_not_of(" \t\n;") == std::string::npos) continue;
      throw DomainError("empty matrix row");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DomainError("ragged matrix: rows have different lengths");
    rows.push_back(std::move(row));
  }
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw DomainError("matrix shape mismatch in product");
  IntMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const mpz_class& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix shape mismatch in difference");
  IntMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::permuted(const std::vector<std::size_t>& rp,
                              const std::vector<std::size_t>& cp) const {
  IntMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(rp[i], cp[j]);
  return r;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const mpz_class& v) { return v == 0; });
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << "; ";
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j).get_str();
  }
  os << "]";
  return os.str();
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row(std::size_t dst, std::size_t src, const mpz_class& f) {
  if (f == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += f * (*this)(src, j);
}

void IntMatrix::add_col(std::size_t dst, std::size_t src, const mpz_class& f) {
  if (f == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += f * (*this)(i, src);
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

mpz_class determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DomainError("determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  mpz_class sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = v;
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

// ---------------------------------------------------------------------------

std::vector<mpz_class> SnfResult::diagonal() const {
  std::vector<mpz_class> d;
  for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
  return d;
}

SnfResult smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  SnfResult r{a, IntMatrix::identity(m), IntMatrix::identity(n), 0};
  IntMatrix& S = r.S;
  const std::size_t lim = std::min(m, n);
  for (std::size_t t = 0; t < lim; ++t) {
    for (;;) {
      // Pivot: nonzero entry of least absolute value in the trailing block.
      bool found = false;
      std::size_t pi = t, pj = t;
      mpz_class best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j) {
          if (S(i, j) == 0) continue;
          mpz_class v = abs(S(i, j));
          if (!found || v < best) {
            found = true;
            best = v;
            pi = i;
            pj = j;
          }
        }
      if (!found) {
        r.rank = t;
        return r;
      }
      S.swap_rows(t, pi);
      r.U.swap_rows(t, pi);
      S.swap_cols(t, pj);
      r.V.swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (S(i, t) == 0) continue;
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), S(i, t).get_mpz_t(), S(t, t).get_mpz_t());
        S.add_row(i, t, -q);
        r.U.add_row(i, t, -q);
        if (S(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (S(t, j) == 0) continue;
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), S(t, j).get_mpz_t(), S(t, t).get_mpz_t());
        S.add_col(j, t, -q);
        r.V.add_col(j, t, -q);
        if (S(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility: fold an offending row into the pivot row and retry.
      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j) {
          if (!mpz_divisible_p(S(i, j).get_mpz_t(), S(t, t).get_mpz_t())) {
            S.add_row(t, i, 1);
            r.U.add_row(t, i, 1);
            divides = false;
            break;
          }
        }
      if (divides) break;
    }
    if (S(t, t) < 0) {
      S.negate_row(t);
      r.U.negate_row(t);
    }
  }
  r.rank = 0;
  for (std::size_t i = 0; i < lim; ++i)
    if (S(i, i) != 0) ++r.rank;
  return r;
}

std::size_t rank(const IntMatrix& a) { return smith_normal_form(a).rank; }

IntMatrix kernel_basis(const IntMatrix& a) {
  SnfResult snf = smith_normal_form(a);
  const std::size_t n = a.cols();
  IntMatrix k(n, n - snf.rank);
  for (std::size_t j = snf.rank; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) k(i, j - snf.rank) = snf.V(i, j);
  return k;
}

FgAbelianGroup cokernel(const IntMatrix& a) {
  SnfResult snf = smith_normal_form(a);
  std::vector<mpz_class> orders;
  for (std::size_t i = 0; i < snf.rank; ++i) orders.push_back(snf.S(i, i));
  return FgAbelianGroup::from_cyclic(a.rows() - snf.rank, orders);
}

// ---------------------------------------------------------------------------

FgAbelianGroup FgAbelianGroup::from_cyclic(std::size_t free_rank,
                                           const std::vector<mpz_class>& orders) {
  FgAbelianGroup g;
  g.free_rank_ = free_rank;
  std::vector<mpz_class> finite;
  for (auto& o : orders) {
    mpz_class a = abs(o);
    if (a == 0)
      ++g.free_rank_;
    else if (a != 1)
      finite.push_back(a);
  }
  if (finite.empty()) return g;
  IntMatrix d(finite.size(), finite.size());
  for (std::size_t i = 0; i < finite.size(); ++i) d(i, i) = finite[i];
  SnfResult snf = smith_normal_form(d);
  for (auto& v : snf.diagonal())
    if (v >= 2) g.torsion_.push_back(v);
  return g;
}

FgAbelianGroup FgAbelianGroup::direct_sum(const FgAbelianGroup& o) const {
  std::vector<mpz_class> orders = torsion_;
  orders.insert(orders.end(), o.torsion_.begin(), o.torsion_.end());
  return from_cyclic(free_rank_ + o.free_rank_, orders);
}

FgAbelianGroup FgAbelianGroup::power(std::size_t copies) const {
  std::vector<mpz_class> orders;
  for (std::size_t c = 0; c < copies; ++c) orders.insert(orders.end(), torsion_.begin(), torsion_.end());
  return from_cyclic(free_rank_ * copies, orders);
}

std::string FgAbelianGroup::to_string() const {
  if (is_trivial()) return "0";
  std::ostringstream os;
  bool first = true;
  if (free_rank_ > 0) {
    os << "Z";
    if (free_rank_ > 1) os << "^" << free_rank_;
    first = false;
  }
  for (auto& d : torsion_) {
    os << (first ? "" : " + ") << "Z/" << d.get_str();
    first = false;
  }
  return os.str();
}

LesSegment les_segment(const IntMatrix& map, const FgAbelianGroup& coeff) {
  LesSegment seg{{}, {}, map};
  if (coeff.is_trivial()) return seg;
  if (coeff.is_free()) {
    const std::size_t r = coeff.free_rank();
    SnfResult snf = smith_normal_form(map);
    seg.kernel = FgAbelianGroup::free((map.cols() - snf.rank) * r);
    seg.cokernel = cokernel(map).power(r);
    return seg;
  }
  if (coeff.free_rank() != 0 || coeff.torsion().size() != 1)
    throw DomainError("les_segment: coefficient group " + coeff.to_string() +
                      " mixes summands; split it into cyclic components first");
  const mpz_class& m = coeff.torsion().front();
  // Cokernel: Z^rows / (colspan(map) + m Z^rows).
  IntMatrix aug(map.rows(), map.cols() + map.rows());
  for (std::size_t i = 0; i < map.rows(); ++i) {
    for (std::size_t j = 0; j < map.cols(); ++j) aug(i, j) = map(i, j);
    aug(i, map.cols() + i) = m;
  }
  seg.cokernel = cokernel(aug);
  // Kernel: with U A V = S, A v = 0 mod m iff d_i w_i = 0 mod m for w = V^-1 v.
  SnfResult snf = smith_normal_form(map);
  std::vector<mpz_class> orders;
  for (std::size_t i = 0; i < map.cols(); ++i) {
    mpz_class d = i < std::min(map.rows(), map.cols()) ? snf.S(i, i) : mpz_class(0);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t());
    orders.push_back(g);
  }
  seg.kernel = FgAbelianGroup::from_cyclic(0, orders);
  return seg;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<mpz_class, unsigned>> factorize(const mpz_class& m) {
  std::vector<std::pair<mpz_class, unsigned>> out;
  mpz_class n = abs(m);
  if (n == 0) throw DomainError("cannot factor 0");
  for (mpz_class p = 2; p * p <= n; ++p) {
    if (p > 10000000) {
      if (!is_probable_prime(n)) throw DomainError("cannot factor " + m.get_str());
      break;
    }
    unsigned e = 0;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

CoeffGroup CoeffGroup::free(std::size_t rank) {
  CoeffGroup g;
  if (rank) g.components.push_back({CoeffComponent::Kind::Free, rank, 0});
  return g;
}

CoeffGroup CoeffGroup::cyclic(const mpz_class& m) {
  CoeffGroup g;
  if (m == 0) return free(1);
  for (auto& [p, e] : factorize(m)) {
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), p.get_mpz_t(), e);
    g.components.push_back({CoeffComponent::Kind::Cyclic, 0, q});
  }
  return g;
}

CoeffGroup CoeffGroup::countable_free() {
  CoeffGroup g;
  g.components.push_back({CoeffComponent::Kind::CountableFree, 0, 0});
  return g;
}

CoeffGroup& CoeffGroup::add(const CoeffGroup& o) {
  components.insert(components.end(), o.components.begin(), o.components.end());
  return *this;
}

void CoeffGroup::validate() const {
  for (auto& c : components) {
    if (c.kind != CoeffComponent::Kind::Cyclic) continue;
    auto f = c.order >= 2 ? factorize(c.order) : decltype(factorize(2)){};
    if (f.size() != 1)
      throw DomainError("coefficient component Z/" + c.order.get_str() +
                        " is not primary (expected a prime-power order)");
  }
}

std::string CoeffGroup::to_string() const {
  if (components.empty()) return "0";
  std::string s;
  for (auto& c : components) {
    if (!s.empty()) s += " + ";
    switch (c.kind) {
      case CoeffComponent::Kind::Free: s += c.rank == 1 ? "Z" : "Z^" + std::to_string(c.rank); break;
      case CoeffComponent::Kind::Cyclic: s += "Z/" + c.order.get_str(); break;
      case CoeffComponent::Kind::CountableFree: s += "Z^(N)"; break;
    }
  }
  return s;
}

GroupValue GroupValue::direct_sum(const GroupValue& o) const {
  GroupValue g{finite.direct_sum(o.finite), countable};
  if (o.countable) g.countable = g.countable ? g.countable->direct_sum(*o.countable) : *o.countable;
  if (g.countable && g.countable->is_trivial()) g.countable.reset();
  return g;
}

std::string GroupValue::to_string() const {
  if (!countable) return finite.to_string();
  std::string c = "(" + countable->to_string() + ")^(N)";
  return finite.is_trivial() ? c : finite.to_string() + " + " + c;
}

LesReport evaluate_les(const IntMatrix& map, const std::map<int, CoeffGroup>& presets) {
  LesReport rep{map, {}};
  std::map<int, std::pair<GroupValue, GroupValue>> ker_coker;
  for (auto& [n, group] : presets) {
    group.validate();
    GroupValue ker, cok;
    for (auto& c : group.components) {
      if (c.kind == CoeffComponent::Kind::CountableFree) {
        LesSegment s = les_segment(map, FgAbelianGroup::free(1));
        ker = ker.direct_sum({{}, s.kernel});
        cok = cok.direct_sum({{}, s.cokernel});
        continue;
      }
      FgAbelianGroup g = c.kind == CoeffComponent::Kind::Free ? FgAbelianGroup::free(c.rank)
                                                              : FgAbelianGroup::cyclic(c.order);
      LesSegment s = les_segment(map, g);
      ker = ker.direct_sum({s.kernel, std::nullopt});
      cok = cok.direct_sum({s.cokernel, std::nullopt});
    }
    ker_coker[n] = {ker, cok};
  }
  for (auto& [n, kc] : ker_coker) {
    LesDegree d;
    d.n = n;
    d.kernel = kc.first;
    d.cokernel = kc.second;
    auto prev = ker_coker.find(n - 1);
    if (prev == ker_coker.end()) {
      d.split_status = "unassembled";
    } else if (prev->second.first.is_free()) {
      d.assembled = kc.second.direct_sum(prev->second.first);
      d.split_status = "split-assembled";
    } else {
      d.split_status = "unassembled";
    }
    rep.degrees.push_back(std::move(d));
  }
  return rep;
}

}  // namespace pimsner

namespace pimsner {

namespace {

// Scales each row (and its right-hand side) to integers.
IntMatrix integer_rows(const RationalRows& a, std::size_t cols, std::vector<mpq_class>* b) {
  IntMatrix m(a.size(), cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_class l = 1;
    for (auto& v : a[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    if (b) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), (*b)[i].get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) {
      mpq_class v = a[i][j] * l;
      m(i, j) = v.get_num();
    }
    if (b) (*b)[i] *= l;
  }
  return m;
}

}  // namespace

std::optional<std::vector<mpq_class>> solve_linear(const RationalRows& a, std::size_t cols,
                                                   const std::vector<mpq_class>& rhs,
                                                   const CoeffRing& k) {
  if (rhs.size() != a.size()) throw DomainError("solve_linear: right-hand side has wrong length");
  std::vector<mpq_class> b = rhs;
  IntMatrix m = integer_rows(a, cols, &b);
  SnfResult snf = smith_normal_form(m);
  std::vector<mpz_class> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_class s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += snf.U(i, j) * b[j].get_num();
    c[i] = s;
  }
  std::vector<mpq_class> y(cols, 0);
  const std::size_t lim = std::min(a.size(), cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_class d = i < lim ? snf.S(i, i) : mpz_class(0);
    switch (k.kind()) {
      case CoeffRing::Kind::Rationals:
        if (d == 0) {
          if (c[i] != 0) return std::nullopt;
        } else {
          y[i] = mpq_class(c[i], d);
          y[i].canonicalize();
        }
        break;
      case CoeffRing::Kind::Integers:
        if (d == 0) {
          if (c[i] != 0) return std::nullopt;
        } else {
          if (!mpz_divisible_p(c[i].get_mpz_t(), d.get_mpz_t())) return std::nullopt;
          y[i] = mpq_class(c[i] / d);
        }
        break;
      case CoeffRing::Kind::Modular: {
        const mpz_class& mod = k.modulus();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), mod.get_mpz_t());
        if (!mpz_divisible_p(c[i].get_mpz_t(), g.get_mpz_t())) return std::nullopt;
        if (d == 0) break;
        mpz_class m2 = mod / g, inv;
        mpz_class dg = d / g;
        if (m2 == 1) break;
        mpz_invert(inv.get_mpz_t(), dg.get_mpz_t(), m2.get_mpz_t());
        mpz_class v = (c[i] / g) * inv;
        mpz_mod(v.get_mpz_t(), v.get_mpz_t(), m2.get_mpz_t());
        y[i] = mpq_class(v);
        break;
      }
    }
  }
  std::vector<mpq_class> x(cols, 0);
  for (std::size_t i = 0; i < cols; ++i) {
    mpq_class s = 0;
    for (std::size_t j = 0; j < cols; ++j)
      if (y[j] != 0) s += mpq_class(snf.V(i, j)) * y[j];
    x[i] = k.normalize(s);
  }
  return x;
}

bool has_trivial_kernel(const RationalRows& a, std::size_t cols, const CoeffRing& k) {
  IntMatrix m = integer_rows(a, cols, nullptr);
  if (k.kind() != CoeffRing::Kind::Modular) return smith_normal_form(m).rank == cols;
  return les_segment(m, FgAbelianGroup::cyclic(k.modulus())).kernel.is_trivial();
}

}  // namespace pimsner

namespace pimsner {

std::size_t rank_over(const RationalRows& a, std::size_t cols, const CoeffRing& k) {
  IntMatrix m = integer_rows(a, cols, nullptr);
  if (k.kind() != CoeffRing::Kind::Modular) return smith_normal_form(m).rank;
  if (!k.is_field()) throw DomainError("rank over Z/" + k.modulus().get_str() + " is not defined");
  return cols - les_segment(m, FgAbelianGroup::cyclic(k.modulus())).kernel.torsion().size();
}

}  // namespace pimsner
