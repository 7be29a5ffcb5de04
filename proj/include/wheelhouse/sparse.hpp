#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wheelhouse/rational.hpp"

namespace wheelhouse {

// Sparse vector: entries sorted by index, no zeros stored.
struct SparseVec {
  std::vector<std::pair<int, Rational>> e;

  bool empty() const { return e.empty(); }
  std::size_t nnz() const { return e.size(); }

  void set(int i, const Rational& v) {
    if (v.is_zero()) return;
    e.emplace_back(i, v);
  }
  void sort_combine() {
    std::sort(e.begin(), e.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, Rational>> out;
    out.reserve(e.size());
    for (auto& p : e) {
      if (!out.empty() && out.back().first == p.first)
        out.back().second += p.second;
      else
        out.push_back(p);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const auto& p) { return p.second.is_zero(); }),
              out.end());
    e = std::move(out);
  }
  Rational get(int i) const {
    auto it = std::lower_bound(e.begin(), e.end(), i, [](const auto& p, int k) {
      return p.first < k;
    });
    if (it != e.end() && it->first == i) return it->second;
    return Rational();
  }

  // this += c * x
  void axpy(const Rational& c, const SparseVec& x) {
    if (c.is_zero() || x.e.empty()) return;
    std::vector<std::pair<int, Rational>> out;
    out.reserve(e.size() + x.e.size());
    std::size_t i = 0, j = 0;
    while (i < e.size() || j < x.e.size()) {
      if (j == x.e.size() || (i < e.size() && e[i].first < x.e[j].first)) {
        out.push_back(e[i++]);
      } else if (i == e.size() || x.e[j].first < e[i].first) {
        Rational v = c * x.e[j].second;
        if (!v.is_zero()) out.emplace_back(x.e[j].first, v);
        ++j;
      } else {
        Rational v = e[i].second + c * x.e[j].second;
        if (!v.is_zero()) out.emplace_back(e[i].first, v);
        ++i;
        ++j;
      }
    }
    e = std::move(out);
  }
  void scale(const Rational& c) {
    if (c.is_zero()) {
      e.clear();
      return;
    }
    for (auto& p : e) p.second *= c;
  }
  friend SparseVec operator+(const SparseVec& a, const SparseVec& b) {
    SparseVec r = a;
    r.axpy(Rational(1), b);
    return r;
  }
  friend bool operator==(const SparseVec& a, const SparseVec& b) { return a.e == b.e; }
};

// Sparse rational matrix, row-major.
struct SparseMat {
  int rows = 0, cols = 0;
  std::vector<SparseVec> row;

  SparseMat() = default;
  SparseMat(int r, int c) : rows(r), cols(c), row(r) {}

  void set(int i, int j, const Rational& v) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) throw std::out_of_range("SparseMat::set");
    row[i].set(j, v);
  }
  void finish() {
    for (auto& r : row) r.sort_combine();
  }
  Rational get(int i, int j) const { return row[i].get(j); }
  bool is_zero() const {
    for (auto& r : row)
      if (!r.empty()) return false;
    return true;
  }
  std::size_t nnz() const {
    std::size_t s = 0;
    for (auto& r : row) s += r.nnz();
    return s;
  }

  // y = A x
  SparseVec apply(const SparseVec& x) const {
    SparseVec y;
    for (int i = 0; i < rows; ++i) {
      Rational s;
      std::size_t a = 0, b = 0;
      const auto& re = row[i].e;
      while (a < re.size() && b < x.e.size()) {
        if (re[a].first < x.e[b].first)
          ++a;
        else if (x.e[b].first < re[a].first)
          ++b;
        else {
          s += re[a].second * x.e[b].second;
          ++a;
          ++b;
        }
      }
      if (!s.is_zero()) y.e.emplace_back(i, s);
    }
    return y;
  }

  static SparseMat mul(const SparseMat& a, const SparseMat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("SparseMat::mul shape");
    SparseMat r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
      std::map<int, Rational> acc;
      for (auto& [k, v] : a.row[i].e)
        for (auto& [j, w] : b.row[k].e) acc[j] += v * w;
      for (auto& [j, v] : acc)
        if (!v.is_zero()) r.row[i].e.emplace_back(j, v);
    }
    return r;
  }

  static SparseMat identity(int n) {
    SparseMat r(n, n);
    for (int i = 0; i < n; ++i) r.row[i].e.emplace_back(i, Rational(1));
    return r;
  }
};

namespace detail {

// Integer sparse row for fraction-free elimination.
struct IntRow {
  std::vector<std::pair<int, BigInt>> e;
};

inline IntRow int_row_of(const SparseVec& v) {
  IntRow r;
  if (v.e.empty()) return r;
  BigInt l(1);
  for (auto& [j, q] : v.e) {
    BigInt g = BigInt::gcd(l, q.den());
    l = BigInt::div_exact(l * q.den(), g);
  }
  r.e.reserve(v.e.size());
  for (auto& [j, q] : v.e)
    r.e.emplace_back(j, q.num() * BigInt::div_exact(l, q.den()));
  return r;
}

inline void strip_content(IntRow& r) {
  if (r.e.empty()) return;
  BigInt g;
  for (auto& [j, v] : r.e) {
    g = BigInt::gcd(g, v);
    if (g.is_one()) return;
  }
  for (auto& [j, v] : r.e) v = BigInt::div_exact(v, g);
}

}  // namespace detail

// Exact rank over Q: sparse fraction-free elimination (cross-multiplication
// with content stripping) with Markowitz pivot selection. Deterministic.
inline int rank(const SparseMat& m) {
  using detail::IntRow;
  std::vector<IntRow> rows;
  rows.reserve(m.rows);
  for (auto& r : m.row) {
    IntRow ir = detail::int_row_of(r);
    if (!ir.e.empty()) {
      detail::strip_content(ir);
      rows.push_back(std::move(ir));
    }
  }
  std::vector<int> col_count(m.cols, 0);
  for (auto& r : rows)
    for (auto& [j, v] : r.e) ++col_count[j];

  int rk = 0;
  std::vector<char> alive(rows.size(), 1);
  std::size_t n_alive = rows.size();
  while (n_alive > 0) {
    // Markowitz: among a band of sparsest rows, minimize (nnz_r-1)*(colcount-1).
    std::size_t best_row = SIZE_MAX;
    int best_col = -1;
    long long best_score = -1;
    std::size_t min_nnz = SIZE_MAX;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (alive[i]) min_nnz = std::min(min_nnz, rows[i].e.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!alive[i] || rows[i].e.size() > min_nnz + 2) continue;
      for (auto& [j, v] : rows[i].e) {
        long long score = static_cast<long long>(rows[i].e.size() - 1) *
                          (col_count[j] - 1);
        if (best_score < 0 || score < best_score ||
            (score == best_score && (i < best_row || (i == best_row && j < best_col)))) {
          best_score = score;
          best_row = i;
          best_col = j;
        }
      }
      if (best_score == 0) break;
    }
    IntRow piv = std::move(rows[best_row]);
    alive[best_row] = 0;
    --n_alive;
    for (auto& [j, v] : piv.e) --col_count[j];
    ++rk;
    BigInt p;
    for (auto& [j, v] : piv.e)
      if (j == best_col) p = v;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!alive[i]) continue;
      BigInt a;
      bool hit = false;
      for (auto& [j, v] : rows[i].e)
        if (j == best_col) {
          a = v;
          hit = true;
          break;
        }
      if (!hit) continue;
      for (auto& [j, v] : rows[i].e) --col_count[j];
      // row_i := p * row_i - a * piv  (entry at best_col cancels)
      IntRow out;
      out.e.reserve(rows[i].e.size() + piv.e.size());
      std::size_t x = 0, y = 0;
      const auto& re = rows[i].e;
      while (x < re.size() || y < piv.e.size()) {
        if (y == piv.e.size() || (x < re.size() && re[x].first < piv.e[y].first)) {
          out.e.emplace_back(re[x].first, p * re[x].second);
          ++x;
        } else if (x == re.size() || piv.e[y].first < re[x].first) {
          out.e.emplace_back(piv.e[y].first, -(a * piv.e[y].second));
          ++y;
        } else {
          BigInt v = p * re[x].second - a * piv.e[y].second;
          if (!v.is_zero()) out.e.emplace_back(re[x].first, v);
          ++x;
          ++y;
        }
      }
      detail::strip_content(out);
      rows[i] = std::move(out);
      if (rows[i].e.empty()) {
        alive[i] = 0;
        --n_alive;
      } else {
        for (auto& [j, v] : rows[i].e) ++col_count[j];
      }
    }
  }
  return rk;
}

// Rank modulo a word-size prime; cross-check only, may undercount on unlucky
// primes (use two primes and compare).
inline int rank_mod_p(const SparseMat& m, std::uint64_t p) {
  std::vector<std::map<int, std::uint64_t>> rows;
  for (auto& r : m.row) {
    std::map<int, std::uint64_t> ir;
    for (auto& [j, q] : r.e) {
      std::uint64_t v = q.mod_u64(p);
      if (v) ir[j] = v;
    }
    if (!ir.empty()) rows.push_back(std::move(ir));
  }
  int rk = 0;
  std::vector<char> alive(rows.size(), 1);
  for (std::size_t pi = 0; pi < rows.size(); ++pi) {
    if (!alive[pi]) continue;
    if (rows[pi].empty()) continue;
    int c = rows[pi].begin()->first;
    std::uint64_t inv = Rational::invmod(rows[pi].begin()->second, p);
    ++rk;
    alive[pi] = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!alive[i]) continue;
      auto it = rows[i].find(c);
      if (it == rows[i].end()) continue;
      std::uint64_t f = Rational::mulmod(it->second, inv, p);
      for (auto& [j, v] : rows[pi]) {
        std::uint64_t sub = Rational::mulmod(f, v, p);
        auto jt = rows[i].find(j);
        std::uint64_t cur = jt == rows[i].end() ? 0 : jt->second;
        std::uint64_t nv = (cur + p - sub) % p;
        if (nv == 0) {
          if (jt != rows[i].end()) rows[i].erase(jt);
        } else {
          rows[i][j] = nv;
        }
      }
    }
  }
  return rk;
}

// Sparse row-echelon span with optional coefficient tracking. Rows are kept
// as primitive integer vectors (fraction-free); reduction tracks a single
// running denominator with content stripping, so coefficients stay at the
// size of the underlying minors. Residuals are supported on non-pivot
// columns only.
class RowSpan {
public:
  explicit RowSpan(int cols) : cols_(cols) {}

  int cols() const { return cols_; }
  int rank() const { return static_cast<int>(rows_.size()); }

  SparseVec reduce(SparseVec v) const {
    std::map<int, Rational> dummy;
    return reduce_impl(std::move(v), false, dummy);
  }

  // Reduces v, also reporting the coefficients used on tagged rows:
  // v = residual + sum coeff[t] * (tagged row t) + (untagged rows part).
  SparseVec reduce_tracked(SparseVec v, std::map<int, Rational>& coeff) const {
    return reduce_impl(std::move(v), true, coeff);
  }

  bool contains(const SparseVec& v) const { return reduce(v).empty(); }

  // Inserts v into the span. Returns false if v was already in the span.
  // tag >= 0 marks the row for coefficient tracking.
  bool insert(SparseVec v, int tag = -1) {
    std::map<int, Rational> coeff;
    v = reduce_tracked(std::move(v), coeff);
    if (v.empty()) return false;
    Rational lead = v.e.front().second;
    std::map<int, Rational> tc;
    if (tag >= 0) tc[tag] = Rational(1) / lead;
    for (auto& [t, w] : coeff) {
      Rational x = -(w / lead);
      if (!x.is_zero()) tc[t] += x;
    }
    // store as a primitive integer row with positive leading entry; tc
    // expresses (stored row / leading value) over the tagged originals.
    IRow row;
    BigInt lcm(1);
    for (auto& [i, q] : v.e) {
      BigInt g = BigInt::gcd(lcm, q.den());
      lcm = BigInt::div_exact(lcm * q.den(), g);
    }
    for (auto& [i, q] : v.e) row.e.emplace_back(i, q.num() * BigInt::div_exact(lcm, q.den()));
    BigInt content;
    for (auto& [i, x] : row.e) content = BigInt::gcd(content, x);
    if (!content.is_one())
      for (auto& [i, x] : row.e) x = BigInt::div_exact(x, content);
    if (row.e.front().second.sign() < 0)
      for (auto& [i, x] : row.e) x = -x;
    int pc = row.e.front().first;
    pivot_row_[pc] = static_cast<int>(rows_.size());
    pivot_val_.push_back(row.e.front().second);
    rows_.push_back(std::move(row));
    pivot_cols_.push_back(pc);
    row_tag_coeffs_.push_back(std::move(tc));
    return true;
  }

  // Columns not used as pivots, in increasing order: a basis of the quotient.
  std::vector<int> free_columns() const {
    std::vector<char> used(cols_, 0);
    for (int c : pivot_cols_) used[c] = 1;
    std::vector<int> out;
    for (int c = 0; c < cols_; ++c)
      if (!used[c]) out.push_back(c);
    return out;
  }

private:
  struct IRow {
    std::vector<std::pair<int, BigInt>> e;
  };

  int cols_;
  std::vector<IRow> rows_;
  std::vector<int> pivot_cols_;
  std::vector<BigInt> pivot_val_;
  std::vector<std::map<int, Rational>> row_tag_coeffs_;
  std::map<int, int> pivot_row_;

  SparseVec reduce_impl(SparseVec v, bool track, std::map<int, Rational>& coeff) const {
    // integer workspace w with running denominator den: v = w / den
    IRow w;
    BigInt den(1);
    for (auto& [i, q] : v.e) {
      BigInt g = BigInt::gcd(den, q.den());
      den = BigInt::div_exact(den * q.den(), g);
    }
    for (auto& [i, q] : v.e) w.e.emplace_back(i, q.num() * BigInt::div_exact(den, q.den()));
    std::size_t cursor = 0;
    while (cursor < w.e.size()) {
      auto it = pivot_row_.find(w.e[cursor].first);
      if (it == pivot_row_.end()) {
        ++cursor;
        continue;
      }
      int k = it->second;
      const BigInt& p = pivot_val_[k];
      BigInt c = w.e[cursor].second;
      if (track) {
        Rational cr(c, den);  // coefficient of (row_k / pivot) used on v
        for (auto& [t, x] : row_tag_coeffs_[k]) {
          Rational y = cr * x;
          if (!y.is_zero()) coeff[t] += y;
        }
      }
      // w := p*w - c*row_k   (den := den*p), entry at cursor cancels
      IRow out;
      out.e.reserve(w.e.size() + rows_[k].e.size());
      std::size_t x = 0, y = 0;
      const auto& re = rows_[k].e;
      while (x < w.e.size() || y < re.size()) {
        if (y == re.size() || (x < w.e.size() && w.e[x].first < re[y].first)) {
          out.e.emplace_back(w.e[x].first, p * w.e[x].second);
          ++x;
        } else if (x == w.e.size() || re[y].first < w.e[x].first) {
          out.e.emplace_back(re[y].first, -(c * re[y].second));
          ++y;
        } else {
          BigInt val = p * w.e[x].second - c * re[y].second;
          if (!val.is_zero()) out.e.emplace_back(w.e[x].first, val);
          ++x;
          ++y;
        }
      }
      w = std::move(out);
      den = den * p;
      // strip common content together with the denominator
      BigInt g = den;
      for (auto& [i, val] : w.e) {
        g = BigInt::gcd(g, val);
        if (g.is_one()) break;
      }
      if (!g.is_one() && !w.e.empty()) {
        den = BigInt::div_exact(den, g);
        for (auto& [i, val] : w.e) val = BigInt::div_exact(val, g);
      }
      if (w.e.empty()) den = BigInt(1);
    }
    SparseVec out;
    for (auto& [i, val] : w.e) out.e.emplace_back(i, Rational(val, den));
    return out;
  }
};

// Basis of the right kernel {x : A x = 0}, deterministic, one vector per
// free column of the RREF.
inline std::vector<SparseVec> nullspace(const SparseMat& a) {
  std::vector<SparseVec> rref;
  std::vector<int> pivots;
  for (auto& r0 : a.row) {
    SparseVec v = r0;
    for (std::size_t k = 0; k < rref.size(); ++k) {
      Rational c = v.get(pivots[k]);
      if (!c.is_zero()) v.axpy(-c, rref[k]);
    }
    if (v.empty()) continue;
    Rational inv = Rational(1) / v.e.front().second;
    v.scale(inv);
    int pc = v.e.front().first;
    for (std::size_t k = 0; k < rref.size(); ++k) {
      Rational c = rref[k].get(pc);
      if (!c.is_zero()) rref[k].axpy(-c, v);
    }
    rref.push_back(std::move(v));
    pivots.push_back(pc);
  }
  std::vector<char> is_pivot(a.cols, 0);
  std::vector<int> pivot_row(a.cols, -1);
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    is_pivot[pivots[k]] = 1;
    pivot_row[pivots[k]] = static_cast<int>(k);
  }
  std::vector<SparseVec> basis;
  for (int f = 0; f < a.cols; ++f) {
    if (is_pivot[f]) continue;
    SparseVec x;
    x.e.emplace_back(f, Rational(1));
    for (std::size_t k = 0; k < rref.size(); ++k) {
      Rational c = rref[k].get(f);
      if (!c.is_zero()) x.e.emplace_back(pivots[k], -c);
    }
    x.sort_combine();
    basis.push_back(std::move(x));
  }
  return basis;
}

// Runs fn(i) for i in [0, n) on up to `width` threads. Pure tasks only.
inline void parallel_for(int n, int width, const std::function<void(int)>& fn) {
  if (width <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  int w = std::min(width, n);
  std::vector<int> next(1, 0);
  std::mutex mu;
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        int i;
        {
          std::lock_guard<std::mutex> lk(mu);
          i = next[0]++;
        }
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace wheelhouse
