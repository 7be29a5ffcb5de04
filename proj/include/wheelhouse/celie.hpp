#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wheelhouse/chain.hpp"
#include "wheelhouse/derlie.hpp"

namespace wheelhouse {

// Chevalley-Eilenberg chains of the derivation Lie algebras with bivariant
// coefficients Hom(V^{(x)p}, V^{(x)q}). The coefficient action of the
// positive part is trivial, so the differential only uses the bracket (plus,
// for the semidirect dg algebra, the action on the commutator quotient and
// the divergence terms). Blocks are keyed (0, w, d).
class CEComplex {
public:
  enum Algebra { DerPlus, SDerPlus, Semidirect };

  std::shared_ptr<DerLie> dl;
  Algebra alg = DerPlus;
  int p = 0, q = 0;
  int max_weight = 0, max_degree = 0;

  struct El {
    std::vector<std::pair<int, int>> ders;  // strictly increasing (weight, index)
    std::vector<std::pair<int, int>> ms;    // weakly increasing (weight, class)
    int cidx = 0;                           // coefficient word
  };
  std::map<BlockKey, std::vector<El>> basis;
  ChainComplex cx;

  int coeff_dim() const {
    int d = 1;
    for (int i = 0; i < p + q; ++i) d *= dl->dimv;
    return d;
  }
  // coefficient word: first p letters are the V^* slots, then q letters of V
  std::vector<int> coeff_word(int cidx) const {
    std::vector<int> w(p + q);
    for (int i = p + q - 1; i >= 0; --i) {
      w[i] = cidx % dl->dimv + 1;
      cidx /= dl->dimv;
    }
    return w;
  }
  int coeff_index(const std::vector<int>& w) const {
    int c = 0;
    for (int x : w) c = c * dl->dimv + (x - 1);
    return c;
  }

  static std::string el_key(const El& e) {
    std::string s;
    for (auto& [w, i] : e.ders) s += "D" + std::to_string(w) + "." + std::to_string(i);
    for (auto& [w, i] : e.ms) s += "M" + std::to_string(w) + "." + std::to_string(i);
    s += "#" + std::to_string(e.cidx);
    return s;
  }

  static CEComplex build(const std::shared_ptr<DerLie>& dl, Algebra alg, int p, int q,
                         int max_weight, int max_degree, bool with_diff = true) {
    CEComplex ce;
    ce.dl = dl;
    ce.alg = alg;
    ce.p = p;
    ce.q = q;
    ce.max_weight = max_weight;
    ce.max_degree = max_degree;
    if (alg == SDerPlus) ce.build_sder();
    ce.enumerate();
    if (with_diff) ce.assemble();
    return ce;
  }

  // Restricted to the chains whose gl-multidegree is zero or e_a - e_b: the
  // subcomplex the invariant computation actually touches. Avoids
  // materializing the full coefficient tensor blocks.
  static CEComplex build_for_invariants(const std::shared_ptr<DerLie>& dl, Algebra alg, int p,
                                        int q, int max_weight, int max_degree) {
    CEComplex ce;
    ce.dl = dl;
    ce.alg = alg;
    ce.p = p;
    ce.q = q;
    ce.max_weight = max_weight;
    ce.max_degree = max_degree;
    ce.restricted_ = true;
    std::vector<int> zero(dl->dimv, 0);
    ce.mu_targets_.insert(zero);
    for (int a = 0; a < dl->dimv; ++a)
      for (int b = 0; b < dl->dimv; ++b) {
        if (a == b) continue;
        std::vector<int> t = zero;
        ++t[a];
        --t[b];
        ce.mu_targets_.insert(t);
      }
    if (alg == SDerPlus) ce.build_sder();
    ce.enumerate();
    return ce;
  }

  // --- factor spaces ---
  int factor_dim(int w) const {
    return alg == SDerPlus ? static_cast<int>(sder_.count(w) ? sder_.at(w).size() : 0)
                           : dl->der_dim(w);
  }
  int min_factor_weight() const {
    for (int w = 0; w <= max_weight; ++w)
      if (factor_dim(w) > 0) return w;
    return max_weight + 1;
  }

  // bracket of two wedge factors, as a sparse vector over factors of w1+w2
  SparseVec factor_bracket(int w1, int e1, int w2, int e2) const {
    auto key = std::make_tuple(w1, e1, w2, e2);
    auto it = bracket_cache_.find(key);
    if (it != bracket_cache_.end()) return it->second;
    SparseVec out;
    if (alg == SDerPlus) {
      std::map<int, Rational> acc;
      const SparseVec& a = sder_.at(w1)[e1];
      const SparseVec& b = sder_.at(w2)[e2];
      for (auto& [i, c1] : a.e)
        for (auto& [j, c2] : b.e) {
          SparseVec br = dl->bracket(w1, i, w2, j);
          for (auto& [t, c] : br.e) acc[t] += c1 * c2 * c;
        }
      SparseVec raw;
      for (auto& [t, c] : acc)
        if (!c.is_zero()) raw.e.emplace_back(t, c);
      // express in the kernel basis; the bracket of divergence-free
      // derivations is divergence-free
      std::map<int, Rational> coords;
      SparseVec res = sder_span_.at(w1 + w2).reduce_tracked(raw, coords);
      if (!res.empty()) throw std::logic_error("sder bracket left the kernel");
      for (auto& [t, c] : coords)
        if (!c.is_zero()) out.set(t, c);
      out.sort_combine();
    } else {
      out = dl->bracket(w1, e1, w2, e2);
    }
    bracket_cache_[key] = out;
    return out;
  }

  // --- gl actions per factor kind (for the invariant complex) ---
  SparseVec factor_gl(int a, int b, int w, int e) const {
    if (alg == SDerPlus) {
      std::map<int, Rational> acc;
      for (auto& [i, c1] : sder_.at(w)[e].e) {
        SparseVec g = dl->gl_bracket(a, b, w, i);
        for (auto& [t, c] : g.e) acc[t] += c1 * c;
      }
      SparseVec raw;
      for (auto& [t, c] : acc)
        if (!c.is_zero()) raw.e.emplace_back(t, c);
      std::map<int, Rational> coords;
      SparseVec res = sder_span_.at(w).reduce_tracked(raw, coords);
      if (!res.empty()) throw std::logic_error("gl action left the kernel");
      SparseVec out;
      for (auto& [t, c] : coords)
        if (!c.is_zero()) out.set(t, c);
      out.sort_combine();
      return out;
    }
    return dl->gl_bracket(a, b, w, e);
  }
  std::vector<int> factor_content(int w, int e) const {
    if (alg == SDerPlus) {
      // all kernel-vector terms share the gl-weight (the divergence matrix
      // respects contents), so read it off the first term
      int i = sder_.at(w)[e].e.front().first;
      return dl->der_content(w, i);
    }
    return dl->der_content(w, e);
  }

  // multidegree of an element (content vector over generators)
  std::vector<int> multidegree(const El& e) const {
    std::vector<int> mu(dl->dimv, 0);
    auto add = [&](const std::vector<int>& c, int s) {
      for (int i = 0; i < dl->dimv; ++i) mu[i] += s * c[i];
    };
    for (auto& [w, i] : e.ders) add(factor_content(w, i), 1);
    for (auto& [w, i] : e.ms) add(dl->cq_content(w, i), 1);
    std::vector<int> cw = coeff_word(e.cidx);
    for (int i = 0; i < p; ++i) --mu[cw[i] - 1];
    for (int i = 0; i < q; ++i) ++mu[cw[p + i] - 1];
    return mu;
  }

  // --- homology of the assembled complex ---
  std::map<BlockKey, int> homology(int jobs = 1) const { return cx.homology_dims(jobs); }

  // --- invariant subcomplex: simultaneous kernel of all E_{ab} ---
  struct InvariantComplex {
    ChainComplex cx;
    std::map<BlockKey, std::vector<SparseVec>> inv_basis;  // vectors over the mu=0 subbasis
    std::map<BlockKey, std::vector<int>> mu0;              // indices of the mu=0 subbasis
  };

  InvariantComplex invariant_complex(int jobs = 1) const {
    InvariantComplex out;
    // group every block's basis by multidegree
    std::map<BlockKey, std::map<std::vector<int>, std::vector<int>>> groups;
    for (auto& [k, els] : basis) {
      for (std::size_t i = 0; i < els.size(); ++i)
        groups[k][multidegree(els[i])].push_back(static_cast<int>(i));
    }
    std::vector<int> zero(dl->dimv, 0);
    for (auto& [k, g] : groups) {
      auto z = g.find(zero);
      if (z == g.end()) {
        out.mu0[k] = {};
        out.inv_basis[k] = {};
        out.cx.dims[k] = 0;
        continue;
      }
      const std::vector<int>& sub = z->second;
      out.mu0[k] = sub;
      std::map<int, int> subpos;
      for (std::size_t i = 0; i < sub.size(); ++i) subpos[sub[i]] = static_cast<int>(i);
      // stack the E_ab operators restricted to the mu = 0 subspace
      SparseMat stacked(0, static_cast<int>(sub.size()));
      std::vector<SparseVec> rows;
      for (int a = 1; a <= dl->dimv; ++a)
        for (int b = 1; b <= dl->dimv; ++b) {
          if (a == b) continue;
          std::vector<int> target = zero;
          ++target[a - 1];
          --target[b - 1];
          auto t = g.find(target);
          std::map<int, int> tpos;
          if (t != g.end())
            for (std::size_t i = 0; i < t->second.size(); ++i)
              tpos[t->second[i]] = static_cast<int>(i);
          int rows0 = static_cast<int>(rows.size());
          if (t != g.end()) rows.resize(rows.size() + t->second.size());
          for (std::size_t ci = 0; ci < sub.size(); ++ci) {
            std::map<std::string, Rational> img;
            apply_gl(k, basis.at(k)[sub[ci]], a, b, img);
            for (auto& [key, c] : img) {
              if (c.is_zero()) continue;
              int idx = index_.at(k).at(key);
              auto pp = tpos.find(idx);
              if (pp == tpos.end()) throw std::logic_error("gl action left its multidegree block");
              rows[rows0 + pp->second].set(static_cast<int>(ci), c);
            }
          }
        }
      stacked.rows = static_cast<int>(rows.size());
      stacked.row = std::move(rows);
      for (auto& r : stacked.row) r.sort_combine();
      std::vector<SparseVec> inv = nullspace(stacked);
      out.inv_basis[k] = inv;
      out.cx.dims[k] = static_cast<int>(inv.size());
    }
    // restricted differential: express d(invariant) in the target's invariant basis
    for (auto& [k, inv] : out.inv_basis) {
      if (k.d == 0) continue;
      BlockKey below{k.n, k.w, k.d - 1};
      RowSpan span(out.mu0.count(below) ? static_cast<int>(out.mu0.at(below).size()) : 0);
      std::map<int, int> below_pos;
      if (out.mu0.count(below))
        for (std::size_t i = 0; i < out.mu0.at(below).size(); ++i)
          below_pos[out.mu0.at(below)[i]] = static_cast<int>(i);
      if (out.inv_basis.count(below)) {
        int tag = 0;
        for (auto& v : out.inv_basis.at(below)) span.insert(v, tag++);
      }
      SparseMat d(out.inv_basis.count(below) ? static_cast<int>(out.inv_basis.at(below).size())
                                             : 0,
                  static_cast<int>(inv.size()));
      for (std::size_t ci = 0; ci < inv.size(); ++ci) {
        // differential of the invariant vector, over the mu=0 subbasis below
        std::map<std::string, Rational> img;
        for (auto& [sb, c] : inv[ci].e)
          apply_diff(k, basis.at(k)[out.mu0.at(k)[sb]], c, img);
        SparseVec vec;
        for (auto& [key, c] : img) {
          if (c.is_zero()) continue;
          int idx = index_.at(below).at(key);
          auto bp = below_pos.find(idx);
          if (bp == below_pos.end())
            throw std::logic_error("differential left the multidegree-zero part");
          vec.set(bp->second, c);
        }
        vec.sort_combine();
        std::map<int, Rational> coords;
        SparseVec res = span.reduce_tracked(vec, coords);
        if (!res.empty())
          throw std::logic_error("differential does not preserve the invariant subspace");
        for (auto& [t, c] : coords)
          if (!c.is_zero()) d.set(t, static_cast<int>(ci), c);
      }
      d.finish();
      out.cx.diff[k] = std::move(d);
    }
    (void)jobs;
    return out;
  }

private:
  std::map<BlockKey, std::map<std::string, int>> index_;
  std::map<int, std::vector<SparseVec>> sder_;
  std::map<int, RowSpan> sder_span_;
  mutable std::map<std::tuple<int, int, int, int>, SparseVec> bracket_cache_;
  bool restricted_ = false;
  std::set<std::vector<int>> mu_targets_;
  std::map<std::vector<int>, std::vector<int>> coeff_content_;

  void build_sder() {
    for (int w = 0; w <= max_weight; ++w) {
      if (dl->der_dim(w) == 0) continue;
      auto ker = dl->sder_basis(w);
      RowSpan span(dl->der_dim(w));
      int tag = 0;
      for (auto& v : ker) span.insert(v, tag++);
      sder_[w] = std::move(ker);
      sder_span_.emplace(w, std::move(span));
    }
  }

  void enumerate() {
    // wedge factors in strictly increasing (w, e) order; then the m-part
    std::vector<std::pair<int, int>> ders;
    std::function<void(int, int, int, int)> rec = [&](int minw, int mine, int wsum, int d) {
      if (wsum <= max_weight && d <= max_degree) {
        finish_ms(ders, wsum, d);
        for (int w = minw; w <= max_weight - wsum; ++w) {
          int start = (w == minw) ? mine : 0;
          for (int e = start; e < factor_dim(w); ++e) {
            ders.emplace_back(w, e);
            rec(w, e + 1, wsum + w, d + 1);
            ders.pop_back();
          }
        }
      }
    };
    rec(min_factor_weight(), 0, 0, 0);
  }

  void finish_ms(const std::vector<std::pair<int, int>>& ders, int wsum, int d) {
    if (alg != Semidirect) {
      push_els(ders, {}, wsum, d);
      return;
    }
    // multisets of commutator-quotient classes (all of positive weight)
    std::vector<std::pair<int, int>> ms;
    std::function<void(int, int, int)> rec = [&](int minw, int mine, int tot) {
      push_els(ders, ms, tot, d);
      for (int w = std::max(1, minw); w <= max_weight - tot; ++w) {
        int start = (w == minw) ? mine : 0;
        for (int m = start; m < dl->cq_dim(w); ++m) {
          ms.emplace_back(w, m);
          rec(w, m, tot + w);
          ms.pop_back();
        }
      }
    };
    if (dl->cq_dim(0) > 0)
      throw std::invalid_argument("semidirect complex requires positively graded quotients");
    rec(1, 0, wsum);
  }

  void push_els(const std::vector<std::pair<int, int>>& ders,
                const std::vector<std::pair<int, int>>& ms, int w, int d) {
    BlockKey k{0, w, d};
    if (!restricted_) {
      for (int c = 0; c < coeff_dim(); ++c) {
        El e{ders, ms, c};
        index_[k][el_key(e)] = static_cast<int>(basis[k].size());
        basis[k].push_back(std::move(e));
      }
      return;
    }
    // content of the wedge and module parts
    std::vector<int> mu(dl->dimv, 0);
    for (auto& [w1, i] : ders) {
      std::vector<int> c = factor_content(w1, i);
      for (int x = 0; x < dl->dimv; ++x) mu[x] += c[x];
    }
    for (auto& [w1, i] : ms) {
      std::vector<int> c = dl->cq_content(w1, i);
      for (int x = 0; x < dl->dimv; ++x) mu[x] += c[x];
    }
    if (coeff_content_.empty()) build_coeff_contents();
    for (auto& target : mu_targets_) {
      std::vector<int> need(dl->dimv);
      for (int x = 0; x < dl->dimv; ++x) need[x] = target[x] - mu[x];
      auto it = coeff_content_.find(need);
      if (it == coeff_content_.end()) continue;
      for (int c : it->second) {
        El e{ders, ms, c};
        index_[k][el_key(e)] = static_cast<int>(basis[k].size());
        basis[k].push_back(std::move(e));
      }
    }
  }

  void build_coeff_contents() {
    for (int c = 0; c < coeff_dim(); ++c) {
      std::vector<int> w = coeff_word(c);
      std::vector<int> mu(dl->dimv, 0);
      for (int i = 0; i < p; ++i) --mu[w[i] - 1];
      for (int i = 0; i < q; ++i) ++mu[w[p + i] - 1];
      coeff_content_[mu].push_back(c);
    }
  }

  // inserts a factor into a sorted wedge; returns 0 on repeats, else the sign
  static int wedge_insert(std::vector<std::pair<int, int>>& ders, std::pair<int, int> f) {
    int pos = 0;
    for (auto& d : ders) {
      if (d == f) return 0;
      if (d < f) ++pos;
    }
    ders.insert(ders.begin() + pos, f);
    return pos % 2 ? -1 : 1;
  }

  void apply_diff(const BlockKey& k, const El& el, const Rational& coeff,
                  std::map<std::string, Rational>& out) const {
    (void)k;
    int d = static_cast<int>(el.ders.size());
    // bracket terms: consume the pair (x, y), merged factor to the front
    for (int x = 0; x < d; ++x)
      for (int y = x + 1; y < d; ++y) {
        // move (x, y) to the front among the odd factors
        int eps = ((x) + (y - 1)) % 2 ? -1 : 1;
        auto [w1, e1] = el.ders[x];
        auto [w2, e2] = el.ders[y];
        SparseVec br = factor_bracket(w1, e1, w2, e2);
        for (auto& [t, c] : br.e) {
          El nel = el;
          nel.ders.erase(nel.ders.begin() + y);
          nel.ders.erase(nel.ders.begin() + x);
          int s = wedge_insert(nel.ders, {w1 + w2, t});
          if (s == 0) continue;
          out[el_key(nel)] += coeff * c * Rational(eps * s);
        }
      }
    if (alg == Semidirect) {
      // action terms: D_x acting on each m_k
      for (int x = 0; x < d; ++x) {
        int eps = x % 2 ? -1 : 1;
        auto [w1, e1] = el.ders[x];
        for (std::size_t mk = 0; mk < el.ms.size(); ++mk) {
          auto [wm, mc] = el.ms[mk];
          SparseVec act = dl->dstar(w1, e1, wm, mc);
          for (auto& [t, c] : act.e) {
            El nel = el;
            nel.ders.erase(nel.ders.begin() + x);
            nel.ms.erase(nel.ms.begin() + mk);
            nel.ms.emplace_back(w1 + wm, t);
            std::sort(nel.ms.begin(), nel.ms.end());
            out[el_key(nel)] += coeff * c * Rational(eps);
          }
        }
        // divergence term
        SparseVec div = dl->divergence(w1, e1);
        for (auto& [t, c] : div.e) {
          El nel = el;
          nel.ders.erase(nel.ders.begin() + x);
          nel.ms.emplace_back(w1, t);
          std::sort(nel.ms.begin(), nel.ms.end());
          out[el_key(nel)] += coeff * c * Rational(eps);
        }
      }
    }
  }

  void apply_gl(const BlockKey& k, const El& el, int a, int b,
                std::map<std::string, Rational>& out) const {
    (void)k;
    int d = static_cast<int>(el.ders.size());
    for (int x = 0; x < d; ++x) {
      auto [w, e] = el.ders[x];
      SparseVec g = factor_gl(a, b, w, e);
      for (auto& [t, c] : g.e) {
        El nel = el;
        nel.ders.erase(nel.ders.begin() + x);
        int s = wedge_insert(nel.ders, {w, t});
        if (s == 0) continue;
        // even operator: only the resorting sign of the replaced factor
        int move = x % 2 ? -1 : 1;  // moving the factor out from position x
        out[el_key(nel)] += c * Rational(s * move);
      }
    }
    for (std::size_t mk = 0; mk < el.ms.size(); ++mk) {
      auto [w, mc] = el.ms[mk];
      SparseVec g = dl->gl_dstar(a, b, w, mc);
      for (auto& [t, c] : g.e) {
        El nel = el;
        nel.ms[mk] = {w, t};
        std::sort(nel.ms.begin(), nel.ms.end());
        out[el_key(nel)] += c;
      }
    }
    std::vector<int> cw = coeff_word(el.cidx);
    for (int i = 0; i < p; ++i) {
      if (cw[i] != a) continue;
      std::vector<int> nw = cw;
      nw[i] = b;
      El nel = el;
      nel.cidx = coeff_index(nw);
      out[el_key(nel)] += Rational(-1);
    }
    for (int i = 0; i < q; ++i) {
      if (cw[p + i] != b) continue;
      std::vector<int> nw = cw;
      nw[p + i] = a;
      El nel = el;
      nel.cidx = coeff_index(nw);
      out[el_key(nel)] += Rational(1);
    }
  }

  void assemble() {
    for (auto& [k, els] : basis) cx.dims[k] = static_cast<int>(els.size());
    for (auto& [k, els] : basis) {
      if (k.d == 0) continue;
      BlockKey below{k.n, k.w, k.d - 1};
      int bdim = cx.dims.count(below) ? cx.dims[below] : 0;
      SparseMat m(bdim, static_cast<int>(els.size()));
      for (std::size_t e = 0; e < els.size(); ++e) {
        std::map<std::string, Rational> img;
        apply_diff(k, els[e], Rational(1), img);
        for (auto& [key, c] : img) {
          if (c.is_zero()) continue;
          m.set(index_.at(below).at(key), static_cast<int>(e), c);
        }
      }
      m.finish();
      cx.diff[k] = std::move(m);
    }
  }

public:
  const std::map<BlockKey, std::map<std::string, int>>& index() const { return index_; }
};

}  // namespace wheelhouse
