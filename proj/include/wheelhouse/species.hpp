#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wheelhouse/chain.hpp"
#include "wheelhouse/partitions.hpp"
#include "wheelhouse/sparse.hpp"

namespace wheelhouse {

struct SpTag {
  std::string key;
  int degree = 0;
  int weight = 0;
};

// Linear species with explicit bases and stored actions of the adjacent
// transpositions s_i on each component. All derived operations (Cauchy and
// composition products, derivative, cyclic words, symmetric powers) produce
// this same concrete form.
class ExplicitSpecies {
public:
  std::string name;
  int max_arity = -1;
  std::vector<std::vector<SpTag>> comp;
  std::vector<std::map<std::string, int>> index;
  std::vector<std::vector<SparseMat>> gen;  // gen[n][i] = action of s_i, 0 <= i <= n-2

  ExplicitSpecies() = default;
  explicit ExplicitSpecies(std::string nm, int maxn) : name(std::move(nm)), max_arity(maxn) {
    comp.resize(maxn + 1);
    index.resize(maxn + 1);
    gen.resize(maxn + 1);
  }

  int dim(int n) const {
    if (n < 0 || n > max_arity) return 0;
    return static_cast<int>(comp[n].size());
  }
  int find(int n, const std::string& key) const {
    auto it = index[n].find(key);
    return it == index[n].end() ? -1 : it->second;
  }
  int add_tag(int n, const SpTag& t) {
    int id = static_cast<int>(comp[n].size());
    comp[n].push_back(t);
    index[n][t.key] = id;
    return id;
  }
  void alloc_gen(int n) {
    gen[n].assign(std::max(0, n - 1), SparseMat(dim(n), dim(n)));
  }

  // Action of an arbitrary permutation, composed from the stored generators.
  SparseMat act(int n, const Perm& sigma) const {
    {
      std::lock_guard<std::mutex> lk(cache_mu_);
      auto it = act_cache_.find({n, sigma});
      if (it != act_cache_.end()) return it->second;
    }
    auto word = perm_reduced_word(sigma);
    SparseMat m = SparseMat::identity(dim(n));
    for (auto w = word.rbegin(); w != word.rend(); ++w) m = SparseMat::mul(gen[n][*w], m);
    std::lock_guard<std::mutex> lk(cache_mu_);
    act_cache_.emplace(std::make_pair(n, sigma), m);
    return m;
  }
  SparseVec act_tag(int n, const Perm& sigma, int tag) const {
    SparseMat m = act(n, sigma);
    SparseVec col;
    for (int r = 0; r < m.rows; ++r) {
      Rational v = m.row[r].get(tag);
      if (!v.is_zero()) col.e.emplace_back(r, v);
    }
    return col;
  }

  // Braid and involution relations for the stored generator actions.
  void validate() const {
    for (int n = 2; n <= max_arity; ++n) {
      int d = dim(n);
      if (d == 0) continue;
      SparseMat id = SparseMat::identity(d);
      for (int i = 0; i + 1 < n; ++i) {
        SparseMat sq = SparseMat::mul(gen[n][i], gen[n][i]);
        if (!(equal(sq, id)))
          throw std::logic_error(name + ": involution fails at n=" + std::to_string(n));
        if (i + 2 < n) {
          SparseMat lhs = SparseMat::mul(gen[n][i], SparseMat::mul(gen[n][i + 1], gen[n][i]));
          SparseMat rhs = SparseMat::mul(gen[n][i + 1], SparseMat::mul(gen[n][i], gen[n][i + 1]));
          if (!equal(lhs, rhs))
            throw std::logic_error(name + ": braid fails at n=" + std::to_string(n));
        }
        for (int j = i + 2; j + 1 < n; ++j) {
          SparseMat lhs = SparseMat::mul(gen[n][i], gen[n][j]);
          SparseMat rhs = SparseMat::mul(gen[n][j], gen[n][i]);
          if (!equal(lhs, rhs))
            throw std::logic_error(name + ": commutation fails at n=" + std::to_string(n));
        }
      }
      // degree and weight constant on orbits
      for (int i = 0; i + 1 < n; ++i)
        for (int c = 0; c < d; ++c)
          for (auto& [r, v] : column(gen[n][i], c).e)
            if (comp[n][r].degree != comp[n][c].degree || comp[n][r].weight != comp[n][c].weight)
              throw std::logic_error(name + ": degree/weight not orbit-constant");
    }
  }

  static bool equal(const SparseMat& a, const SparseMat& b) {
    if (a.rows != b.rows || a.cols != b.cols) return false;
    for (int i = 0; i < a.rows; ++i)
      if (!(a.row[i] == b.row[i])) return false;
    return true;
  }
  static SparseVec column(const SparseMat& m, int c) {
    SparseVec v;
    for (int r = 0; r < m.rows; ++r) {
      Rational x = m.row[r].get(c);
      if (!x.is_zero()) v.e.emplace_back(r, x);
    }
    return v;
  }

private:
  mutable std::mutex cache_mu_;
  mutable std::map<std::pair<int, Perm>, SparseMat> act_cache_;

public:
  ExplicitSpecies(const ExplicitSpecies& o)
      : name(o.name), max_arity(o.max_arity), comp(o.comp), index(o.index), gen(o.gen) {}
  ExplicitSpecies& operator=(const ExplicitSpecies& o) {
    name = o.name;
    max_arity = o.max_arity;
    comp = o.comp;
    index = o.index;
    gen = o.gen;
    return *this;
  }
  ExplicitSpecies(ExplicitSpecies&&) = default;
  ExplicitSpecies& operator=(ExplicitSpecies&&) = default;
};

// --- small builders ---------------------------------------------------------

// The species 1 (unit for the Cauchy product): k at the empty set.
inline ExplicitSpecies unit_cauchy(int maxn, int degree = 0, int weight = 0,
                                   const std::string& key = "1") {
  ExplicitSpecies s("1", maxn);
  s.add_tag(0, {key, degree, weight});
  for (int n = 0; n <= maxn; ++n) s.alloc_gen(n);
  return s;
}

// The species singleton (unit for composition): k at one-element sets.
inline ExplicitSpecies unit_compose(int maxn, int degree = 0, int weight = 0,
                                    const std::string& key = "x") {
  ExplicitSpecies s("singleton", maxn);
  if (maxn >= 1) s.add_tag(1, {key, degree, weight});
  for (int n = 0; n <= maxn; ++n) s.alloc_gen(n);
  return s;
}

inline ExplicitSpecies suspend(const ExplicitSpecies& a, int shift) {
  ExplicitSpecies s("s^" + std::to_string(shift) + "(" + a.name + ")", a.max_arity);
  s.comp = a.comp;
  s.index = a.index;
  s.gen = a.gen;
  for (auto& c : s.comp)
    for (auto& t : c) {
      t.degree += shift;
      t.key = "s" + std::to_string(shift) + "." + t.key;
    }
  for (int n = 0; n <= s.max_arity; ++n) {
    s.index[n].clear();
    for (int i = 0; i < s.dim(n); ++i) s.index[n][s.comp[n][i].key] = i;
  }
  return s;
}

inline ExplicitSpecies direct_sum(const ExplicitSpecies& a, const ExplicitSpecies& b) {
  int maxn = std::max(a.max_arity, b.max_arity);
  ExplicitSpecies s("(" + a.name + ")+(" + b.name + ")", maxn);
  for (int n = 0; n <= maxn; ++n) {
    for (int i = 0; i < a.dim(n); ++i)
      s.add_tag(n, {"A." + a.comp[n][i].key, a.comp[n][i].degree, a.comp[n][i].weight});
    for (int i = 0; i < b.dim(n); ++i)
      s.add_tag(n, {"B." + b.comp[n][i].key, b.comp[n][i].degree, b.comp[n][i].weight});
    s.alloc_gen(n);
    int da = a.dim(n);
    for (int g = 0; g + 1 < n; ++g) {
      if (da)
        for (int r = 0; r < da; ++r)
          for (auto& [c, v] : a.gen[n][g].row[r].e) s.gen[n][g].set(r, c, v);
      for (int r = 0; r < b.dim(n); ++r)
        for (auto& [c, v] : b.gen[n][g].row[r].e) s.gen[n][g].set(da + r, da + c, v);
      s.gen[n][g].finish();
    }
  }
  return s;
}

// --- block/item machinery shared by products --------------------------------

namespace sp {

inline std::string block_key(const std::vector<int>& b) {
  std::string s = "{";
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(b[i]);
  }
  return s + "}";
}

// ordered decompositions of {1..n} into k blocks (possibly empty).
inline void ordered_decompositions(int n, int k,
                                   const std::function<void(const std::vector<std::vector<int>>&)>& f) {
  std::vector<std::vector<int>> blocks(k);
  std::function<void(int)> rec = [&](int x) {
    if (x > n) {
      f(blocks);
      return;
    }
    for (int j = 0; j < k; ++j) {
      blocks[j].push_back(x);
      rec(x + 1);
      blocks[j].pop_back();
    }
  };
  if (k == 0) {
    if (n == 0) f(blocks);
    return;
  }
  rec(1);
}

// set partitions of {1..n} into exactly k nonempty blocks, blocks ordered by min.
inline void set_partitions(int n, int k,
                           const std::function<void(const std::vector<std::vector<int>>&)>& f) {
  std::vector<std::vector<int>> blocks;
  std::function<void(int)> rec = [&](int x) {
    if (static_cast<int>(blocks.size()) > k) return;
    if (n - x + 1 + static_cast<int>(blocks.size()) < k) return;  // cannot reach k blocks
    if (x > n) {
      if (static_cast<int>(blocks.size()) == k) f(blocks);
      return;
    }
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      blocks[bi].push_back(x);
      rec(x + 1);
      blocks[bi].pop_back();
    }
    blocks.push_back({x});
    rec(x + 1);
    blocks.pop_back();
  };
  rec(1);
}

// Relabels a sorted block through sigma (0-based permutation of {0..n-1} on
// labels-1); returns the new sorted block and the induced permutation of
// positions: position p of the old block maps to position induced[p].
inline std::vector<int> relabel_block(const std::vector<int>& block, const Perm& sigma,
                                      Perm& induced) {
  std::vector<std::pair<int, int>> img;  // (new label, old position)
  for (std::size_t p = 0; p < block.size(); ++p)
    img.emplace_back(sigma[block[p] - 1] + 1, static_cast<int>(p));
  std::sort(img.begin(), img.end());
  std::vector<int> nb(block.size());
  induced.assign(block.size(), 0);
  for (std::size_t q = 0; q < img.size(); ++q) {
    nb[q] = img[q].first;
    induced[img[q].second] = static_cast<int>(q);
  }
  return nb;
}

}  // namespace sp

// --- Cauchy product ----------------------------------------------------------

// (A (x) B)(n) = sum over I1 u I2 = {1..n} of A(I1) (x) B(I2); degrees and
// weights add. Stored with the A factor first, so no Koszul signs appear in
// the S_n action.
inline ExplicitSpecies cauchy(const ExplicitSpecies& a, const ExplicitSpecies& b,
                              const Truncation& t) {
  int maxn = t.max_arity;
  ExplicitSpecies s("(" + a.name + ")*(" + b.name + ")", maxn);
  struct El {
    std::vector<int> block_a;  // sorted subset for the A factor
    int ta, tb;
  };
  std::vector<std::vector<El>> els(maxn + 1);
  for (int n = 0; n <= maxn; ++n) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i + 1;
    // iterate subsets by size
    for (int k = 0; k <= n; ++k) {
      if (a.dim(k) == 0 || b.dim(n - k) == 0) continue;
      std::vector<int> idx(k);
      std::function<void(int, int)> rec = [&](int start, int got) {
        if (got == k) {
          std::vector<int> sa(idx.begin(), idx.end());
          for (int ta = 0; ta < a.dim(k); ++ta)
            for (int tb = 0; tb < b.dim(n - k); ++tb) {
              els[n].push_back({sa, ta, tb});
              SpTag tag;
              tag.key = sp::block_key(sa) + "|" + a.comp[k][ta].key + "|" + b.comp[n - k][tb].key;
              tag.degree = a.comp[k][ta].degree + b.comp[n - k][tb].degree;
              tag.weight = a.comp[k][ta].weight + b.comp[n - k][tb].weight;
              s.add_tag(n, tag);
            }
          return;
        }
        for (int v = start; v <= n; ++v) {
          idx[got] = v;
          rec(v + 1, got + 1);
        }
      };
      rec(1, 0);
    }
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      Perm sigma = perm_transposition(n, g);
      for (std::size_t e = 0; e < els[n].size(); ++e) {
        const El& el = els[n][e];
        int k = static_cast<int>(el.block_a.size());
        Perm ind_a, ind_b;
        std::vector<int> comp_b;
        {
          std::set<int> sa(el.block_a.begin(), el.block_a.end());
          for (int v = 1; v <= n; ++v)
            if (!sa.count(v)) comp_b.push_back(v);
        }
        std::vector<int> na = sp::relabel_block(el.block_a, sigma, ind_a);
        std::vector<int> nb = sp::relabel_block(comp_b, sigma, ind_b);
        SparseVec va = a.act_tag(k, ind_a, el.ta);
        SparseVec vb = b.act_tag(n - k, ind_b, el.tb);
        for (auto& [ra, ca] : va.e)
          for (auto& [rb, cb] : vb.e) {
            std::string key =
                sp::block_key(na) + "|" + a.comp[k][ra].key + "|" + b.comp[n - k][rb].key;
            int target = s.find(n, key);
            if (target < 0) throw std::logic_error("cauchy: missing target tag");
            s.gen[n][g].set(target, static_cast<int>(e), ca * cb);
          }
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// --- composition product -----------------------------------------------------

// (A o B)(n): pairs of an A-label at k with a set partition of {1..n} into k
// blocks carrying B-labels; blocks are stored sorted by their minima, and
// reordering odd B-labels introduces Koszul signs. B must be reduced.
inline ExplicitSpecies compose_species(const ExplicitSpecies& a, const ExplicitSpecies& b,
                                       const Truncation& t) {
  if (b.dim(0) != 0) throw std::invalid_argument("compose: right factor must be reduced");
  int maxn = t.max_arity;
  ExplicitSpecies s("(" + a.name + ")o(" + b.name + ")", maxn);
  struct El {
    std::vector<std::vector<int>> blocks;
    int ta;
    std::vector<int> tb;
  };
  std::vector<std::vector<El>> els(maxn + 1);
  for (int n = 0; n <= maxn; ++n) {
    int kmax = n;
    for (int k = (n == 0 ? 0 : 1); k <= kmax; ++k) {
      if (a.dim(k) == 0) continue;
      sp::set_partitions(n, k, [&](const std::vector<std::vector<int>>& blocks) {
        for (auto& blk : blocks)
          if (b.dim(static_cast<int>(blk.size())) == 0) return;
        std::vector<int> tb(k, 0);
        std::function<void(int)> rec = [&](int j) {
          if (j == k) {
            for (int ta = 0; ta < a.dim(k); ++ta) {
              El el{blocks, ta, tb};
              SpTag tag;
              tag.key = a.comp[k][ta].key + "o(";
              tag.degree = a.comp[k][ta].degree;
              tag.weight = a.comp[k][ta].weight;
              for (int q = 0; q < k; ++q) {
                int m = static_cast<int>(blocks[q].size());
                tag.key += sp::block_key(blocks[q]) + b.comp[m][tb[q]].key;
                tag.degree += b.comp[m][tb[q]].degree;
                tag.weight += b.comp[m][tb[q]].weight;
              }
              tag.key += ")";
              els[n].push_back(el);
              s.add_tag(n, tag);
            }
            return;
          }
          int m = static_cast<int>(blocks[j].size());
          for (int x = 0; x < b.dim(m); ++x) {
            tb[j] = x;
            rec(j + 1);
          }
        };
        rec(0);
      });
    }
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      Perm sigma = perm_transposition(n, g);
      for (std::size_t e = 0; e < els[n].size(); ++e) {
        const El& el = els[n][e];
        int k = static_cast<int>(el.blocks.size());
        // relabel blocks, then sort by min
        struct NB {
          std::vector<int> block;
          int oldpos;
          Perm induced;
        };
        std::vector<NB> nbs(k);
        for (int j = 0; j < k; ++j) {
          nbs[j].oldpos = j;
          nbs[j].block = sp::relabel_block(el.blocks[j], sigma, nbs[j].induced);
        }
        std::sort(nbs.begin(), nbs.end(),
                  [](const NB& x, const NB& y) { return x.block[0] < y.block[0]; });
        // Koszul sign: permutation restricted to odd-degree b labels
        std::vector<int> odd_positions;
        for (int j = 0; j < k; ++j) {
          int m = static_cast<int>(el.blocks[nbs[j].oldpos].size());
          if (b.comp[m][el.tb[nbs[j].oldpos]].degree % 2 != 0)
            odd_positions.push_back(nbs[j].oldpos);
        }
        int sign = 1;
        for (std::size_t x = 0; x < odd_positions.size(); ++x)
          for (std::size_t y = x + 1; y < odd_positions.size(); ++y)
            if (odd_positions[x] > odd_positions[y]) sign = -sign;
        // a label: new slot j holds old slot nbs[j].oldpos => act with perm
        // sending oldpos -> j.
        Perm pa(k);
        for (int j = 0; j < k; ++j) pa[nbs[j].oldpos] = j;
        SparseVec va = a.act_tag(k, pa, el.ta);
        // b labels act independently
        std::vector<SparseVec> vb(k);
        for (int j = 0; j < k; ++j) {
          int m = static_cast<int>(el.blocks[nbs[j].oldpos].size());
          vb[j] = b.act_tag(m, nbs[j].induced, el.tb[nbs[j].oldpos]);
        }
        std::function<void(int, std::string, Rational)> emit = [&](int j, std::string suffix,
                                                                   Rational c) {
          if (j == k) {
            for (auto& [ra, caa] : va.e) {
              std::string key = a.comp[k][ra].key + "o(" + suffix + ")";
              int target = s.find(n, key);
              if (target < 0) throw std::logic_error("compose: missing target tag " + key + " at n=" + std::to_string(n));
              s.gen[n][g].set(target, static_cast<int>(e), caa * c * Rational(sign));
            }
            return;
          }
          int m = static_cast<int>(nbs[j].block.size());
          for (auto& [rb, cb] : vb[j].e)
            emit(j + 1, suffix + sp::block_key(nbs[j].block) + b.comp[m][rb].key, c * cb);
        };
        emit(0, "", Rational(1));
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// --- derivative --------------------------------------------------------------

// d(S)(n) = S(n+1) with the extra slot marked; S_n acts through the stabilizer
// of the marked (last) slot.
inline ExplicitSpecies derivative(const ExplicitSpecies& a) {
  int maxn = a.max_arity - 1;
  if (maxn < 0) maxn = 0;
  ExplicitSpecies s("d(" + a.name + ")", maxn);
  for (int n = 0; n <= maxn; ++n) {
    for (int i = 0; i < a.dim(n + 1); ++i) s.add_tag(n, a.comp[n + 1][i]);
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) s.gen[n][g] = a.gen[n + 1][g];
  }
  return s;
}

// --- cyclic words, tensor and symmetric powers -------------------------------

namespace sp {

struct Item {
  std::vector<int> block;
  int tag = 0;
};

inline std::string item_key(const ExplicitSpecies& s, const Item& it) {
  return block_key(it.block) + s.comp[it.block.size()][it.tag].key;
}
inline int item_degree(const ExplicitSpecies& s, const Item& it) {
  return s.comp[it.block.size()][it.tag].degree;
}
inline int item_weight(const ExplicitSpecies& s, const Item& it) {
  return s.comp[it.block.size()][it.tag].weight;
}

// Enumerates tuples of l items over disjoint blocks covering {1..n}; empty
// blocks allowed only when s has arity-0 tags. Prunes with degree/weight
// budgets.
inline void item_tuples(const ExplicitSpecies& s, int n, int l, const Truncation& t,
                        const std::function<void(const std::vector<Item>&)>& f) {
  if (l > n && s.dim(0) == 0) return;
  ordered_decompositions(n, l, [&](const std::vector<std::vector<int>>& blocks) {
    for (auto& b : blocks)
      if (s.dim(static_cast<int>(b.size())) == 0) return;
    std::vector<Item> items(l);
    std::function<void(int, int, int)> rec = [&](int j, int deg, int wt) {
      if (deg > t.max_degree || wt > t.max_weight) return;
      if (j == l) {
        f(items);
        return;
      }
      int m = static_cast<int>(blocks[j].size());
      for (int x = 0; x < s.dim(m); ++x) {
        items[j] = {blocks[j], x};
        rec(j + 1, deg + s.comp[m][x].degree, wt + s.comp[m][x].weight);
      }
    };
    rec(0, 0, 0);
  });
}

// Canonical rotation representative of a cyclic tuple under the signed
// rotation. Returns false when the orbit is killed by a -1 stabilizer.
inline bool cyc_canonical(const ExplicitSpecies& s, std::vector<Item> items, Rational& sign_out,
                          std::vector<Item>& canon_out) {
  int l = static_cast<int>(items.size());
  int total_deg = 0;
  for (auto& it : items) total_deg += item_degree(s, it);
  auto tuple_key = [&](const std::vector<Item>& v) {
    std::string k;
    for (auto& it : v) k += item_key(s, it) + ";";
    return k;
  };
  std::vector<Item> cur = items;
  Rational cursign(1);
  std::string best_key = tuple_key(cur);
  Rational best_sign = cursign;
  std::vector<Item> best = cur;
  bool killed = false;
  for (int r = 1; r < l; ++r) {
    // rotate: move last to front, Koszul sign
    int dl = item_degree(s, cur.back());
    int rest = total_deg - dl;
    if ((dl % 2) && (rest % 2)) cursign = -cursign;
    std::rotate(cur.rbegin(), cur.rbegin() + 1, cur.rend());
    std::string key = tuple_key(cur);
    if (key < best_key) {
      best_key = key;
      best_sign = cursign;
      best = cur;
    } else if (key == best_key && !(cursign == best_sign)) {
      killed = true;
    }
  }
  if (killed) return false;
  // element(items) = best_sign * element(best)
  sign_out = best_sign;
  canon_out = best;
  return true;
}

}  // namespace sp

// Cyc(S): cyclic tensor powers of S under the signed rotation; orbits whose
// stabilizer acts by -1 are zero and do not appear in the basis.
inline ExplicitSpecies cyc(const ExplicitSpecies& a, const Truncation& t) {
  if (a.dim(0) > 0)
    for (int i = 0; i < a.dim(0); ++i)
      if (a.comp[0][i].degree + a.comp[0][i].weight <= 0)
        throw std::invalid_argument("cyc: arity-0 tags must have positive degree+weight");
  int maxn = t.max_arity;
  ExplicitSpecies s("Cyc(" + a.name + ")", maxn);
  struct El {
    std::vector<sp::Item> items;
  };
  std::vector<std::vector<El>> els(maxn + 1);
  int lmax_extra = a.dim(0) > 0 ? t.max_degree + t.max_weight : 0;
  for (int n = 0; n <= maxn; ++n) {
    for (int l = 1; l <= n + lmax_extra; ++l) {
      sp::item_tuples(a, n, l, t, [&](const std::vector<sp::Item>& items) {
        // keep only canonical representatives
        Rational sign(1);
        std::vector<sp::Item> canon;
        if (!sp::cyc_canonical(a, items, sign, canon)) return;
        std::string self;
        for (auto& it : items) self += sp::item_key(a, it) + ";";
        std::string ck;
        for (auto& it : canon) ck += sp::item_key(a, it) + ";";
        if (ck != self) return;  // not canonical
        SpTag tag;
        tag.key = "cyc[" + self + "]";
        tag.degree = 0;
        tag.weight = 0;
        for (auto& it : items) {
          tag.degree += sp::item_degree(a, it);
          tag.weight += sp::item_weight(a, it);
        }
        if (s.find(n, tag.key) >= 0) return;  // already seen via another rotation
        els[n].push_back({items});
        s.add_tag(n, tag);
      });
    }
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      Perm sigma = perm_transposition(n, g);
      for (std::size_t e = 0; e < els[n].size(); ++e) {
        const auto& items = els[n][e].items;
        int l = static_cast<int>(items.size());
        // relabel blocks and act on tags (combinations), then canonicalize
        std::vector<std::vector<int>> nblocks(l);
        std::vector<SparseVec> vtags(l);
        for (int j = 0; j < l; ++j) {
          Perm ind;
          nblocks[j] = sp::relabel_block(items[j].block, sigma, ind);
          vtags[j] = a.act_tag(static_cast<int>(items[j].block.size()), ind, items[j].tag);
        }
        std::vector<sp::Item> cur(l);
        std::function<void(int, Rational)> emit = [&](int j, Rational c) {
          if (j == l) {
            Rational sgn(1);
            std::vector<sp::Item> canon;
            if (!sp::cyc_canonical(a, cur, sgn, canon)) return;
            std::string ck = "cyc[";
            for (auto& it : canon) ck += sp::item_key(a, it) + ";";
            ck += "]";
            int target = s.find(n, ck);
            if (target < 0) throw std::logic_error("cyc: missing target tag");
            s.gen[n][g].set(target, static_cast<int>(e), c * sgn);
            return;
          }
          for (auto& [r, v] : vtags[j].e) {
            cur[j] = {nblocks[j], r};
            emit(j + 1, c * v);
          }
        };
        emit(0, Rational(1));
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// Ordered Cauchy tensor power with, additionally, the action of adjacent
// factor swaps (with Koszul signs); needed for coPROP blocks.
struct TensorPowerSpecies {
  ExplicitSpecies sp;
  // factor_swap[n][j]: swap of factors (j, j+1) on the arity-n component
  std::vector<std::vector<SparseMat>> factor_swap;
};

inline TensorPowerSpecies tensor_power(const ExplicitSpecies& a, int k, const Truncation& t) {
  if (a.dim(0) > 0)
    for (int i = 0; i < a.dim(0); ++i)
      if (a.comp[0][i].degree + a.comp[0][i].weight <= 0)
        throw std::invalid_argument("tensor_power: arity-0 tags must have positive degree+weight");
  int maxn = t.max_arity;
  TensorPowerSpecies out;
  out.sp = ExplicitSpecies("(" + a.name + ")^" + std::to_string(k), maxn);
  ExplicitSpecies& s = out.sp;
  struct El {
    std::vector<sp::Item> items;
  };
  std::vector<std::vector<El>> els(maxn + 1);
  auto el_key = [&](const std::vector<sp::Item>& items) {
    std::string kk = "t[";
    for (auto& it : items) kk += sp::item_key(a, it) + ";";
    return kk + "]";
  };
  for (int n = 0; n <= maxn; ++n) {
    sp::item_tuples(a, n, k, t, [&](const std::vector<sp::Item>& items) {
      SpTag tag;
      tag.key = el_key(items);
      for (auto& it : items) {
        tag.degree += sp::item_degree(a, it);
        tag.weight += sp::item_weight(a, it);
      }
      els[n].push_back({items});
      s.add_tag(n, tag);
    });
  }
  out.factor_swap.resize(maxn + 1);
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    // S_n generators
    for (int g = 0; g + 1 < n; ++g) {
      Perm sigma = perm_transposition(n, g);
      for (std::size_t e = 0; e < els[n].size(); ++e) {
        const auto& items = els[n][e].items;
        std::vector<SparseVec> vtags(k);
        std::vector<std::vector<int>> nblocks(k);
        for (int j = 0; j < k; ++j) {
          Perm ind;
          nblocks[j] = sp::relabel_block(items[j].block, sigma, ind);
          vtags[j] = a.act_tag(static_cast<int>(items[j].block.size()), ind, items[j].tag);
        }
        std::vector<sp::Item> cur(k);
        std::function<void(int, Rational)> emit = [&](int j, Rational c) {
          if (j == k) {
            int target = s.find(n, el_key(cur));
            if (target < 0) throw std::logic_error("tensor_power: missing target");
            s.gen[n][g].set(target, static_cast<int>(e), c);
            return;
          }
          for (auto& [r, v] : vtags[j].e) {
            cur[j] = {nblocks[j], r};
            emit(j + 1, c * v);
          }
        };
        emit(0, Rational(1));
      }
      s.gen[n][g].finish();
    }
    // factor swaps
    out.factor_swap[n].assign(std::max(0, k - 1), SparseMat(s.dim(n), s.dim(n)));
    for (int j = 0; j + 1 < k; ++j) {
      for (std::size_t e = 0; e < els[n].size(); ++e) {
        std::vector<sp::Item> items = els[n][e].items;
        int d1 = sp::item_degree(a, items[j]);
        int d2 = sp::item_degree(a, items[j + 1]);
        std::swap(items[j], items[j + 1]);
        int target = s.find(n, el_key(items));
        if (target < 0) throw std::logic_error("tensor_power: missing swap target");
        Rational c((d1 % 2) && (d2 % 2) ? -1 : 1);
        out.factor_swap[n][j].set(target, static_cast<int>(e), c);
      }
      out.factor_swap[n][j].finish();
    }
  }
  return out;
}

namespace sp {

// Sorts items by key with Koszul sign; zero (returns false) when two equal
// items of odd degree collide.
inline bool sym_normalize(const ExplicitSpecies& s, std::vector<Item>& items, Rational& sign) {
  sign = Rational(1);
  // insertion sort tracking Koszul signs
  for (std::size_t i = 1; i < items.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      std::string kj = item_key(s, items[j]);
      std::string kp = item_key(s, items[j - 1]);
      if (kp < kj) break;
      if (kp == kj) {
        if (item_degree(s, items[j]) % 2) return false;  // squares of odd elements vanish
        break;
      }
      if ((item_degree(s, items[j]) % 2) && (item_degree(s, items[j - 1]) % 2)) sign = -sign;
      std::swap(items[j], items[j - 1]);
    }
  }
  return true;
}

}  // namespace sp

// j-th symmetric power of a species in the graded sense (coinvariants of the
// Cauchy power with Koszul signs).
inline ExplicitSpecies sym_power(const ExplicitSpecies& a, int k, const Truncation& t) {
  if (a.dim(0) > 0)
    for (int i = 0; i < a.dim(0); ++i)
      if (a.comp[0][i].degree + a.comp[0][i].weight <= 0)
        throw std::invalid_argument("sym_power: arity-0 tags must have positive degree+weight");
  int maxn = t.max_arity;
  ExplicitSpecies s("S^" + std::to_string(k) + "(" + a.name + ")", maxn);
  struct El {
    std::vector<sp::Item> items;
  };
  std::vector<std::vector<El>> els(maxn + 1);
  auto el_key = [&](const std::vector<sp::Item>& items) {
    std::string kk = "sym[";
    for (auto& it : items) kk += sp::item_key(a, it) + ";";
    return kk + "]";
  };
  for (int n = 0; n <= maxn; ++n) {
    sp::item_tuples(a, n, k, t, [&](const std::vector<sp::Item>& items) {
      // keep sorted representatives only
      std::vector<sp::Item> v = items;
      Rational sgn;
      if (!sp::sym_normalize(a, v, sgn)) return;
      std::string self = el_key(items), canon = el_key(v);
      if (self != canon) return;
      if (s.find(n, self) >= 0) return;
      SpTag tag;
      tag.key = self;
      for (auto& it : items) {
        tag.degree += sp::item_degree(a, it);
        tag.weight += sp::item_weight(a, it);
      }
      els[n].push_back({items});
      s.add_tag(n, tag);
    });
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      Perm sigma = perm_transposition(n, g);
      for (std::size_t e = 0; e < els[n].size(); ++e) {
        const auto& items = els[n][e].items;
        std::vector<SparseVec> vtags(k);
        std::vector<std::vector<int>> nblocks(k);
        for (int j = 0; j < k; ++j) {
          Perm ind;
          nblocks[j] = sp::relabel_block(items[j].block, sigma, ind);
          vtags[j] = a.act_tag(static_cast<int>(items[j].block.size()), ind, items[j].tag);
        }
        std::vector<sp::Item> cur(k);
        std::function<void(int, Rational)> emit = [&](int j, Rational c) {
          if (j == k) {
            std::vector<sp::Item> v = cur;
            Rational sgn;
            if (!sp::sym_normalize(a, v, sgn)) return;
            int target = s.find(n, el_key(v));
            if (target < 0) throw std::logic_error("sym_power: missing target");
            s.gen[n][g].set(target, static_cast<int>(e), c * sgn);
            return;
          }
          for (auto& [r, v] : vtags[j].e) {
            cur[j] = {nblocks[j], r};
            emit(j + 1, c * v);
          }
        };
        emit(0, Rational(1));
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// Full graded-symmetric algebra S(A) = sum of sym powers, within truncation.
inline ExplicitSpecies sym_all(const ExplicitSpecies& a, const Truncation& t) {
  ExplicitSpecies acc = unit_cauchy(t.max_arity, 0, 0, "S0");
  acc.name = "S(" + a.name + ")";
  // minimal positive size of any tag bounds the number of factors
  int minsz = 1 << 20;
  for (int n = 0; n <= a.max_arity; ++n)
    for (int i = 0; i < a.dim(n); ++i)
      minsz = std::min(minsz, n + std::max(0, a.comp[n][i].degree) + a.comp[n][i].weight);
  if (minsz <= 0) throw std::invalid_argument("sym_all: species has a tag of size zero");
  int kmax = (t.max_arity + t.max_degree + t.max_weight) / minsz;
  if (a.dim(0) == 0) kmax = std::min(kmax, t.max_arity);
  for (int k = 1; k <= kmax; ++k) {
    ExplicitSpecies pk = sym_power(a, k, t);
    bool empty = true;
    for (int n = 0; n <= pk.max_arity; ++n)
      if (pk.dim(n)) empty = false;
    if (empty) continue;
    acc = direct_sum(acc, pk);
    acc.name = "S(" + a.name + ")";
  }
  return acc;
}

// dims by (arity, weight, degree)
inline std::map<BlockKey, int> species_dims(const ExplicitSpecies& s) {
  std::map<BlockKey, int> out;
  for (int n = 0; n <= s.max_arity; ++n)
    for (auto& t : s.comp[n]) ++out[BlockKey{n, t.weight, t.degree}];
  return out;
}

}  // namespace wheelhouse
