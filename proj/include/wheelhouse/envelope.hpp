#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wheelhouse/operad.hpp"
#include "wheelhouse/species.hpp"

namespace wheelhouse {

// The derivative species d(O-bar): component at arity m is the augmentation
// ideal part of O(m+1), with the marked slot stored last. Indices below are
// "ideal coordinates": j in [0, ideal_dim(m+1)) for the ambient tag
// ideal_tag(m+1, j).
namespace dop {

inline int dim(const OperadTable& op, int m) { return op.ideal_dim(m + 1); }
inline int ambient(const OperadTable& op, int m, int j) { return op.ideal_tag(m + 1, j); }
inline int from_ambient(const OperadTable& op, int m, int a) {
  (void)op;
  return m + 1 == 1 ? a - 1 : a;
}
inline int weight(const OperadTable& op, int m, int j) {
  return op.weight(m + 1, ambient(op, m, j));
}
inline std::string key(const OperadTable& op, int m, int j) {
  return "d." + op.tag_key(m + 1, ambient(op, m, j));
}

// converts a full O(m+1)-coefficient vector to ideal coordinates; the unit
// coefficient must vanish (it does for products of ideal elements).
inline SparseVec to_ideal(const OperadTable& op, int m, const SparseVec& full) {
  (void)op;
  if (m + 1 != 1) return full;
  SparseVec v;
  for (auto& [a, c] : full.e) {
    if (a == 0) throw std::logic_error("dop: unexpected unit coefficient");
    v.e.emplace_back(a - 1, c);
  }
  return v;
}

// twisted product mu(a, b) = a o_marked b; regular slots of a first.
inline SparseVec mu(const OperadTable& op, int m1, int j1, int m2, int j2) {
  SparseVec full = op.compose(m1 + 1, m1 + 1, m2 + 1, ambient(op, m1, j1), ambient(op, m2, j2));
  return to_ideal(op, m1 + m2, full);
}

// right action rho: composition of o into the regular slot i (1-based, <= m).
inline SparseVec rho(const OperadTable& op, int m, int j, int i, int k, int o_ambient) {
  SparseVec full = op.compose(m + 1, i, k, ambient(op, m, j), o_ambient);
  return to_ideal(op, m + k - 1, full);
}

// S_m action through the stabilizer of the marked slot.
inline SparseVec act(const OperadTable& op, int m, const Perm& sigma, int j) {
  Perm ext(m + 1);
  for (int i = 0; i < m; ++i) ext[i] = sigma[i];
  ext[m] = m;
  SparseVec full = op.act(m + 1, ext, ambient(op, m, j));
  return to_ideal(op, m, full);
}

}  // namespace dop

// A twisted associative algebra presented by a species with a multiplication
// over the standard decomposition ({1..m1} first) and an exact action of
// arbitrary permutations.
struct TwistedAlgebra {
  std::string name;
  int max_arity = -1;
  std::vector<std::vector<SpTag>> tags;
  std::function<SparseVec(int, int, int, int)> mult;      // (m1, a, m2, b)
  std::function<SparseVec(int, const Perm&, int)> act;    // (m, sigma, a)

  int dim(int m) const {
    if (m < 0 || m > max_arity) return 0;
    return static_cast<int>(tags[m].size());
  }
  ExplicitSpecies to_species() const {
    ExplicitSpecies s(name, max_arity);
    for (int m = 0; m <= max_arity; ++m)
      for (auto& t : tags[m]) s.add_tag(m, t);
    for (int m = 0; m <= max_arity; ++m) {
      s.alloc_gen(m);
      for (int g = 0; g + 1 < m; ++g) {
        Perm sigma = perm_transposition(m, g);
        for (int a = 0; a < dim(m); ++a) {
          SparseVec v = act(m, sigma, a);
          for (auto& [r, c] : v.e) s.gen[m][g].set(r, a, c);
        }
        s.gen[m][g].finish();
      }
    }
    return s;
  }
};

// d(O-bar) as a twisted algebra under mu.
inline TwistedAlgebra dop_algebra(const std::shared_ptr<const OperadTable>& op, int max_m) {
  TwistedAlgebra t;
  t.name = "d(" + op->name + ")";
  t.max_arity = max_m;
  t.tags.resize(max_m + 1);
  for (int m = 0; m <= max_m; ++m)
    for (int j = 0; j < dop::dim(*op, m); ++j)
      t.tags[m].push_back({dop::key(*op, m, j), 0, dop::weight(*op, m, j)});
  t.mult = [op](int m1, int a, int m2, int b) { return dop::mu(*op, m1, a, m2, b); };
  t.act = [op](int m, const Perm& sigma, int a) { return dop::act(*op, m, sigma, a); };
  return t;
}

// Arity-indexed quotient of a species presented by relation spans; surviving
// ambient tags form the quotient basis.
class SpeciesQuotient {
public:
  int max_arity = -1;
  std::vector<RowSpan> rel;
  std::vector<std::vector<int>> keep;
  std::vector<std::map<int, int>> keep_pos;

  void init(int maxm, const std::vector<int>& ambient_dims) {
    max_arity = maxm;
    rel.clear();
    for (int m = 0; m <= maxm; ++m) rel.emplace_back(ambient_dims[m]);
    keep.assign(maxm + 1, {});
    keep_pos.assign(maxm + 1, {});
  }
  void add_relation(int m, const SparseVec& v) { rel[m].insert(v); }
  void finalize() {
    for (int m = 0; m <= max_arity; ++m) {
      keep[m] = rel[m].free_columns();
      for (std::size_t i = 0; i < keep[m].size(); ++i) keep_pos[m][keep[m][i]] = static_cast<int>(i);
    }
  }
  int dim(int m) const {
    if (m < 0 || m > max_arity) return 0;
    return static_cast<int>(keep[m].size());
  }
  int lift(int m, int q) const { return keep[m][q]; }
  SparseVec project(int m, const SparseVec& ambient) const {
    SparseVec r = rel[m].reduce(ambient);
    SparseVec out;
    for (auto& [i, c] : r.e) out.e.emplace_back(keep_pos[m].at(i), c);
    return out;
  }
};

// Closes a relation span under the S_m action (adjacent transpositions),
// making the quotient a species. act(sigma, tag) is applied tagwise.
inline void close_under_action(SpeciesQuotient& q, int m,
                               const std::function<SparseVec(int, const Perm&, int)>& act,
                               std::vector<SparseVec> seeds) {
  // generator actions cached per tag
  std::vector<std::map<int, SparseVec>> cache(std::max(0, m - 1));
  std::vector<Perm> gens;
  for (int g = 0; g + 1 < m; ++g) gens.push_back(perm_transposition(m, g));
  auto acted = [&](int g, int t) -> const SparseVec& {
    auto it = cache[g].find(t);
    if (it == cache[g].end()) it = cache[g].emplace(t, act(m, gens[g], t)).first;
    return it->second;
  };
  std::vector<SparseVec> queue;
  for (auto& v : seeds) {
    SparseVec r = q.rel[m].reduce(v);
    if (!r.empty()) {
      q.rel[m].insert(r);
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    SparseVec v = std::move(queue.back());
    queue.pop_back();
    for (int g = 0; g + 1 < m; ++g) {
      SparseVec w;
      for (auto& [t, c] : v.e) w.axpy(c, acted(g, t));
      SparseVec r = q.rel[m].reduce(w);
      if (!r.empty()) {
        q.rel[m].insert(r);
        queue.push_back(r);
      }
    }
  }
}

// Commutator quotient |A| of a twisted algebra: each component modulo the span
// of graded commutators over all decompositions (the standard decomposition
// closed under the S_m action). Not an algebra; carries the residual action.
inline SpeciesQuotient commutator_quotient(const TwistedAlgebra& alg, int max_m) {
  SpeciesQuotient q;
  std::vector<int> dims(max_m + 1);
  for (int m = 0; m <= max_m; ++m) dims[m] = alg.dim(m);
  q.init(max_m, dims);
  for (int m = 0; m <= max_m; ++m) {
    std::vector<SparseVec> seeds;
    for (int m1 = 0; m1 <= m; ++m1) {
      int m2 = m - m1;
      if (alg.dim(m1) == 0 || alg.dim(m2) == 0) continue;
      // b-slots-first layout for the (b a) term
      Perm tau(m);
      for (int j = 0; j < m2; ++j) tau[j] = m1 + j;
      for (int j = 0; j < m1; ++j) tau[m2 + j] = j;
      for (int a = 0; a < alg.dim(m1); ++a)
        for (int b = 0; b < alg.dim(m2); ++b) {
          int da = alg.tags[m1][a].degree, db = alg.tags[m2][b].degree;
          Rational sgn((da % 2) && (db % 2) ? -1 : 1);
          std::map<int, Rational> acc;
          for (auto& [tg, c] : alg.mult(m1, a, m2, b).e) acc[tg] += c;
          for (auto& [tg, c] : alg.mult(m2, b, m1, a).e) {
            SparseVec moved = alg.act(m, tau, tg);
            for (auto& [r, v] : moved.e) acc[r] -= sgn * c * v;
          }
          SparseVec relv;
          for (auto& [r, v] : acc)
            if (!v.is_zero()) relv.e.emplace_back(r, v);
          if (!relv.empty()) seeds.push_back(std::move(relv));
        }
    }
    close_under_action(q, m, alg.act, std::move(seeds));
  }
  q.finalize();
  return q;
}

// Quotient of d(O-bar) by the image of the right action of the augmentation
// ideal; the twisted product descends. Also reports the right-module freeness
// witness dims d(O)(m) = (d(O)_0 o O)(m) when asked.
struct Indecomposables {
  std::shared_ptr<const OperadTable> op;
  SpeciesQuotient quotient;

  TwistedAlgebra algebra(int max_m) const {
    TwistedAlgebra t;
    auto opp = op;
    auto qp = std::make_shared<SpeciesQuotient>(quotient);
    t.name = "d(" + op->name + ")_0";
    t.max_arity = max_m;
    t.tags.resize(max_m + 1);
    for (int m = 0; m <= max_m; ++m)
      for (int qi = 0; qi < qp->dim(m); ++qi) {
        int j = qp->lift(m, qi);
        t.tags[m].push_back({"q." + dop::key(*op, m, j), 0, dop::weight(*op, m, j)});
      }
    t.mult = [opp, qp](int m1, int a, int m2, int b) {
      SparseVec amb = dop::mu(*opp, m1, qp->lift(m1, a), m2, qp->lift(m2, b));
      return qp->project(m1 + m2, amb);
    };
    t.act = [opp, qp](int m, const Perm& sigma, int a) {
      SparseVec amb = dop::act(*opp, m, sigma, qp->lift(m, a));
      return qp->project(m, amb);
    };
    return t;
  }
};

inline Indecomposables indecomposables_zero(const std::shared_ptr<const OperadTable>& op,
                                            int max_m) {
  Indecomposables out;
  out.op = op;
  std::vector<int> dims(max_m + 1);
  for (int m = 0; m <= max_m; ++m) dims[m] = dop::dim(*op, m);
  out.quotient.init(max_m, dims);
  auto opp = op;
  auto act = [opp](int m, const Perm& sigma, int a) { return dop::act(*opp, m, sigma, a); };
  for (int m = 0; m <= max_m; ++m) {
    // relations rho(a, i, o) with o in the augmentation ideal, closed under S_m
    std::vector<SparseVec> seeds;
    for (int mp = 1; mp <= m; ++mp) {
      int k = m - mp + 1;
      if (k < 1 || k > op->max_arity) continue;
      int dk = op->ideal_dim(k);
      if (dk == 0 || dop::dim(*op, mp) == 0) continue;
      for (int a = 0; a < dop::dim(*op, mp); ++a)
        for (int i = 1; i <= mp; ++i)
          for (int oj = 0; oj < dk; ++oj) {
            SparseVec relv = dop::rho(*op, mp, a, i, k, op->ideal_tag(k, oj));
            if (!relv.empty()) seeds.push_back(std::move(relv));
          }
    }
    close_under_action(out.quotient, m, act, std::move(seeds));
  }
  out.quotient.finalize();
  return out;
}

// The reduced wheeled part of the wheeled completion: |d(O)| with the unit
// class removed, together with trace projection and right O-action.
struct WheeledPart {
  std::shared_ptr<const OperadTable> op;
  bool trivial = true;  // zero traces: U_w = 0
  int max_arity = -1;
  SpeciesQuotient quotient;  // only when !trivial

  int dim(int m) const { return trivial ? 0 : quotient.dim(m); }
  SpTag tag(int m, int u) const {
    int j = quotient.lift(m, u);
    return {"w." + dop::key(*op, m, j), 0, dop::weight(*op, m, j)};
  }
  // trace of an ideal-coordinate vector of d(O-bar)(m)
  SparseVec trace(int m, const SparseVec& v) const {
    if (trivial) return {};
    return quotient.project(m, v);
  }
  SparseVec rho(int m, int u, int i, int k, int o_ambient) const {
    SparseVec amb = dop::rho(*op, m, quotient.lift(m, u), i, k, o_ambient);
    return quotient.project(m + k - 1, amb);
  }
  SparseVec act(int m, const Perm& sigma, int u) const {
    SparseVec amb = dop::act(*op, m, sigma, quotient.lift(m, u));
    return quotient.project(m, amb);
  }
};

// The species of d(O)_0 including the marked-unit class at arity 0.
inline ExplicitSpecies indecomposables_species(const Indecomposables& ind, int maxm) {
  ExplicitSpecies gens = unit_cauchy(maxm, 0, 0, "unitclass");
  ExplicitSpecies red("d0", maxm);
  for (int m = 1; m <= maxm; ++m)
    for (int qi = 0; qi < ind.quotient.dim(m); ++qi)
      red.add_tag(m, {"d0_" + std::to_string(m) + "_" + std::to_string(qi), 0,
                      dop::weight(*ind.op, m, ind.quotient.lift(m, qi))});
  for (int m = 0; m <= maxm; ++m) {
    red.alloc_gen(m);
    for (int g = 0; g + 1 < m; ++g) {
      Perm sigma = perm_transposition(m, g);
      for (int qi = 0; qi < ind.quotient.dim(m); ++qi) {
        SparseVec amb = dop::act(*ind.op, m, sigma, ind.quotient.lift(m, qi));
        SparseVec pr = ind.quotient.project(m, amb);
        for (auto& [r, c] : pr.e) red.gen[m][g].set(r, qi, c);
      }
      red.gen[m][g].finish();
    }
  }
  return direct_sum(gens, red);
}

// Dimensionwise right-module freeness witness: d(O) = d(O)_0 o O.
inline bool freeness_witness(const Indecomposables& ind, int maxm) {
  Truncation t{maxm, 1 << 20, 1 << 20};
  ExplicitSpecies gens = indecomposables_species(ind, maxm);
  ExplicitSpecies ofull = ind.op->to_species(maxm, false);
  ExplicitSpecies composed = compose_species(gens, ofull, t);
  for (int m = 0; m <= maxm; ++m) {
    int lhs = dop::dim(*ind.op, m) + (m == 0 ? 1 : 0);
    if (lhs != composed.dim(m)) return false;
  }
  return true;
}

inline WheeledPart trivial_wheeling(const std::shared_ptr<const OperadTable>& op) {
  WheeledPart w;
  w.op = op;
  w.trivial = true;
  w.max_arity = op->max_arity - 1;
  return w;
}

inline WheeledPart wheeled_completion_part(const std::shared_ptr<const OperadTable>& op,
                                           int max_m) {
  WheeledPart w;
  w.op = op;
  w.trivial = false;
  w.max_arity = max_m;
  TwistedAlgebra amb = dop_algebra(op, max_m);
  w.quotient = commutator_quotient(amb, max_m);
  return w;
}

}  // namespace wheelhouse
