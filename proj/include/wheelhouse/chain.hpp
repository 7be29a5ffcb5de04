#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wheelhouse/partitions.hpp"
#include "wheelhouse/sparse.hpp"

namespace wheelhouse {

// Block coordinates: arity n, weight w, homological degree d.
struct BlockKey {
  int n = 0, w = 0, d = 0;
  friend bool operator<(const BlockKey& a, const BlockKey& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.w != b.w) return a.w < b.w;
    return a.d < b.d;
  }
  friend bool operator==(const BlockKey& a, const BlockKey& b) {
    return a.n == b.n && a.w == b.w && a.d == b.d;
  }
  std::string to_string() const {
    return "(" + std::to_string(n) + "," + std::to_string(w) + "," + std::to_string(d) + ")";
  }
};

struct Truncation {
  int max_arity = 0;
  int max_weight = 0;
  int max_degree = 0;
};

struct IsotypicReport {
  Partition lambda;
  std::map<std::pair<int, int>, long long> multiplicity;  // (w,d) -> mult
};

// Graded chain complex over Q with sparse differentials of degree -1 that
// preserve (n, w). Optional S_n generator actions per block.
class ChainComplex {
public:
  std::map<BlockKey, int> dims;
  std::map<BlockKey, std::vector<std::string>> basis_keys;  // optional
  // diff[k]: matrix of d : block k -> block (k.n, k.w, k.d-1)
  std::map<BlockKey, SparseMat> diff;
  // gen_action[k][i]: action of the adjacent transposition s_i (0-based) on block k
  std::map<BlockKey, std::map<int, SparseMat>> gen_action;
  std::set<BlockKey> untrusted;

  int dim(const BlockKey& k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
  }
  const SparseMat* differential(const BlockKey& k) const {
    auto it = diff.find(k);
    return it == diff.end() ? nullptr : &it->second;
  }

  // Asserts d o d = 0 entrywise on every block; returns the offending block
  // if the check fails.
  std::optional<BlockKey> d_squared_offender() const {
    for (auto& [k, m] : diff) {
      BlockKey below{k.n, k.w, k.d - 1};
      auto it = diff.find(below);
      if (it == diff.end()) {
        if (!m.is_zero() && dim(below) == 0)
          return k;  // maps into a missing block
        continue;
      }
      if (!SparseMat::mul(it->second, m).is_zero()) return k;
    }
    return std::nullopt;
  }
  void check_d_squared() const {
    if (auto off = d_squared_offender())
      throw std::logic_error("d^2 != 0 at block " + off->to_string());
  }

  // Checks that stored generator actions commute with the differential.
  std::optional<BlockKey> equivariance_offender() const {
    for (auto& [k, acts] : gen_action) {
      auto dk = diff.find(k);
      if (dk == diff.end()) continue;
      BlockKey below{k.n, k.w, k.d - 1};
      auto ab = gen_action.find(below);
      for (auto& [i, m] : acts) {
        SparseMat lhs = SparseMat::mul(dk->second, m);
        SparseMat rhs;
        if (ab != gen_action.end() && ab->second.count(i))
          rhs = SparseMat::mul(ab->second.at(i), dk->second);
        else
          rhs = SparseMat(lhs.rows, lhs.cols);
        SparseMat d = lhs;
        for (int r = 0; r < rhs.rows; ++r) d.row[r].axpy(Rational(-1), rhs.row[r]);
        if (!d.is_zero()) return k;
      }
    }
    return std::nullopt;
  }

  // dim H = dim block - rank(d out) - rank(d in), per block.
  std::map<BlockKey, int> homology_dims(int jobs = 1) const {
    check_d_squared();
    std::map<BlockKey, int> ranks;
    std::vector<const std::pair<const BlockKey, SparseMat>*> items;
    for (auto& kv : diff) items.push_back(&kv);
    std::vector<int> out(items.size());
    parallel_for(static_cast<int>(items.size()), jobs,
                 [&](int i) { out[i] = rank(items[i]->second); });
    for (std::size_t i = 0; i < items.size(); ++i) ranks[items[i]->first] = out[i];
    std::map<BlockKey, int> h;
    for (auto& [k, n] : dims) {
      int rk_out = ranks.count(k) ? ranks[k] : 0;
      BlockKey above{k.n, k.w, k.d + 1};
      int rk_in = ranks.count(above) ? ranks[above] : 0;
      h[k] = n - rk_out - rk_in;
      if (h[k] < 0) throw std::logic_error("negative homology dimension at " + k.to_string());
    }
    return h;
  }

  // Euler characteristic consistency per (n, w): sum (-1)^d dim C = sum (-1)^d dim H.
  bool euler_consistent(const std::map<BlockKey, int>& h) const {
    std::map<std::pair<int, int>, long long> ec, eh;
    for (auto& [k, n] : dims) ec[{k.n, k.w}] += (k.d % 2 ? -1 : 1) * n;
    for (auto& [k, n] : h) eh[{k.n, k.w}] += (k.d % 2 ? -1 : 1) * n;
    return ec == eh;
  }

  // Action of an arbitrary permutation on a block, composed from generators.
  SparseMat act(const BlockKey& k, const Perm& sigma) const {
    int n = dim(k);
    auto word = perm_reduced_word(sigma);
    SparseMat m = SparseMat::identity(n);
    auto it = gen_action.find(k);
    if (word.empty()) return m;
    if (it == gen_action.end()) throw std::logic_error("no action stored at " + k.to_string());
    // sigma = t_{w1} t_{w2} ... acting on the left
    for (auto w = word.rbegin(); w != word.rend(); ++w)
      m = SparseMat::mul(it->second.at(*w), m);
    return m;
  }

  // Isotypic multiplicities of homology at arity n: applies the central
  // idempotent e_lambda blockwise, restricts the differentials, computes the
  // homology of the restriction and divides by dim lambda.
  std::vector<IsotypicReport> isotypic_homology(int n, int jobs = 1) const {
    check_d_squared();
    if (equivariance_offender())
      throw std::logic_error("group action does not commute with the differential");
    auto& tab = CharacterTables::get(n);
    // all permutations with cycle-type class index
    std::vector<Perm> perms;
    {
      Perm p = perm_identity(n);
      do {
        perms.push_back(p);
      } while (std::next_permutation(p.begin(), p.end()));
    }
    std::vector<int> class_of(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) {
      Partition ct = cycle_type(perms[i]);
      class_of[i] = -1;
      for (std::size_t c = 0; c < tab.parts.size(); ++c)
        if (tab.parts[c] == ct) class_of[i] = static_cast<int>(c);
    }
    long long nfact = 1;
    for (int i = 2; i <= n; ++i) nfact *= i;

    // collect blocks at this arity
    std::vector<BlockKey> keys;
    for (auto& [k, dn] : dims)
      if (k.n == n && dn > 0) keys.push_back(k);

    // isotypic column bases per block per lambda
    std::map<BlockKey, std::vector<std::vector<SparseVec>>> comp;
    for (auto& k : keys) {
      // precompute permutation action matrices on this block
      std::vector<SparseMat> mats(perms.size());
      parallel_for(static_cast<int>(perms.size()), jobs,
                   [&](int i) { mats[i] = act(k, perms[i]); });
      auto& per_lambda = comp[k];
      per_lambda.resize(tab.parts.size());
      for (std::size_t l = 0; l < tab.parts.size(); ++l) {
        // P = (dim/n!) sum chi(sigma) M_sigma; collect a column basis of P
        SparseMat p(dim(k), dim(k));
        for (std::size_t i = 0; i < perms.size(); ++i) {
          long long chi = tab.chi[l][class_of[i]];
          if (!chi) continue;
          for (int r = 0; r < p.rows; ++r)
            p.row[r].axpy(Rational(chi), mats[i].row[r]);
        }
        // columns of p: transpose view
        SparseMat pt(p.cols, p.rows);
        for (int r = 0; r < p.rows; ++r)
          for (auto& [c, v] : p.row[r].e) pt.row[c].e.emplace_back(r, v);
        RowSpan span(p.rows);
        std::vector<SparseVec> cols;
        for (int c = 0; c < pt.rows; ++c)
          if (span.insert(pt.row[c])) cols.push_back(pt.row[c]);
        per_lambda[l] = std::move(cols);
      }
      // completeness: sum of isotypic dims = block dim
      std::size_t tot = 0;
      for (auto& v : per_lambda) tot += v.size();
      if (static_cast<int>(tot) != dim(k))
        throw std::logic_error("isotypic components do not fill block " + k.to_string());
    }

    // restricted ranks
    std::vector<IsotypicReport> reports(tab.parts.size());
    for (std::size_t l = 0; l < tab.parts.size(); ++l) reports[l].lambda = tab.parts[l];
    for (auto& k : keys) {
      for (std::size_t l = 0; l < tab.parts.size(); ++l) {
        long long cdim = static_cast<long long>(comp[k][l].size());
        if (cdim % tab.dims[l] != 0)
          throw std::logic_error("isotypic dimension not divisible at " + k.to_string());
        long long rk_out = 0, rk_in = 0;
        auto dk = diff.find(k);
        if (dk != diff.end() && cdim) {
          SparseMat img(static_cast<int>(comp[k][l].size()), dk->second.rows);
          for (std::size_t c = 0; c < comp[k][l].size(); ++c) {
            SparseVec y = dk->second.apply(comp[k][l][c]);
            img.row[c] = y;
          }
          rk_out = rank(img);
        }
        BlockKey above{k.n, k.w, k.d + 1};
        auto da = diff.find(above);
        if (da != diff.end() && comp.count(above) && !comp[above][l].empty()) {
          SparseMat img(static_cast<int>(comp[above][l].size()), da->second.rows);
          for (std::size_t c = 0; c < comp[above][l].size(); ++c)
            img.row[c] = da->second.apply(comp[above][l][c]);
          rk_in = rank(img);
        }
        long long h = cdim - rk_out - rk_in;
        if (h % tab.dims[l] != 0)
          throw std::logic_error("isotypic homology not divisible at " + k.to_string());
        if (h != 0) reports[l].multiplicity[{k.w, k.d}] = h / tab.dims[l];
      }
    }
    return reports;
  }
};

// Homology of one block with explicit representatives: reps are cycles that
// complete a basis of the boundary space; express() writes any cycle in the
// rep basis modulo boundaries.
struct HomologyBasis {
  int chain_dim = 0;
  std::vector<SparseVec> reps;
  RowSpan reduction;  // boundaries (untagged) + reps (tagged 0..)

  HomologyBasis() : reduction(0) {}

  static HomologyBasis compute(const ChainComplex& c, const BlockKey& k) {
    HomologyBasis h;
    h.chain_dim = c.dim(k);
    h.reduction = RowSpan(h.chain_dim);
    BlockKey above{k.n, k.w, k.d + 1};
    const SparseMat* din = c.differential(above);
    if (din) {
      // boundary span: images of the basis of the block above
      for (int col = 0; col < din->cols; ++col) {
        SparseVec e;
        e.set(col, Rational(1));
        // column extraction
        SparseVec y;
        for (int r = 0; r < din->rows; ++r) {
          Rational v = din->row[r].get(col);
          if (!v.is_zero()) y.e.emplace_back(r, v);
        }
        h.reduction.insert(y);
      }
    }
    const SparseMat* dout = c.differential(k);
    std::vector<SparseVec> cycles;
    if (dout) {
      SparseMat m = *dout;
      cycles = nullspace(m);
    } else {
      for (int i = 0; i < h.chain_dim; ++i) {
        SparseVec e;
        e.set(i, Rational(1));
        cycles.push_back(e);
      }
    }
    int tag = 0;
    for (auto& z : cycles) {
      if (h.reduction.insert(z, tag)) {
        h.reps.push_back(z);
        ++tag;
      }
    }
    return h;
  }

  // Expresses a cycle as a combination of reps modulo boundaries.
  SparseVec express(const SparseVec& cycle) const {
    std::map<int, Rational> coeff;
    SparseVec res = reduction.reduce_tracked(cycle, coeff);
    if (!res.empty()) throw std::logic_error("vector is not a cycle modulo boundaries");
    SparseVec out;
    for (auto& [t, v] : coeff) out.set(t, v);
    out.sort_combine();
    return out;
  }
};

}  // namespace wheelhouse
