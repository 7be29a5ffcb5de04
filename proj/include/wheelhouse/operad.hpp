#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "wheelhouse/species.hpp"

namespace wheelhouse {

// Structure constants of a finite-dimensional unital augmented associative
// algebra, used for operads concentrated in arity one. Basis element 0 is the
// unit; elements 1..r span the augmentation ideal.
struct Alg1Data {
  std::string name;
  int ideal_dim = 0;
  // prod[a][b] = sparse vector of coefficients over the full basis (0..r)
  std::vector<std::vector<std::vector<std::pair<int, Rational>>>> prod;
  std::vector<int> ideal_weight;  // weight of e_1..e_r, nonnegative
};

// An operad with explicit basis, partial compositions and symmetric group
// actions. Compositions are returned as sparse coefficient vectors over the
// target basis; full composition tensors per (n, i, m) are memoized.
class OperadTable {
public:
  enum class Kind { Com, Ass, Lie, PreLie, Alg1 };

  std::string name;
  Kind kind = Kind::Com;
  int max_arity = 0;
  bool positively_graded = true;  // augmentation ideal in strictly positive weight
  Alg1Data alg1;

  static OperadTable builtin(const std::string& which, int max_arity);
  static OperadTable from_alg1(const Alg1Data& data, int max_arity);

  int dim(int n) const {
    if (n < 1 || n > max_arity) return 0;
    switch (kind) {
      case Kind::Com:
        return 1;
      case Kind::Ass:
        return factorial(n);
      case Kind::Lie:
        return factorial(n - 1);
      case Kind::PreLie:
        return static_cast<int>(trees(n).size());
      case Kind::Alg1:
        return n == 1 ? alg1.ideal_dim + 1 : 0;
    }
    return 0;
  }
  // dimension of the augmentation ideal component
  int ideal_dim(int n) const {
    if (n == 1) return kind == Kind::Alg1 ? alg1.ideal_dim : 0;
    return dim(n);
  }
  // ambient index of the j-th ideal basis element of arity n
  int ideal_tag(int n, int j) const { return n == 1 ? j + 1 : j; }
  bool is_ideal(int n, int a) const { return n != 1 || a >= 1; }
  int unit_tag() const { return 0; }

  int weight(int n, int a) const {
    if (kind == Kind::Alg1) return n == 1 && a >= 1 ? alg1.ideal_weight[a - 1] : 0;
    (void)a;
    return n - 1;
  }

  std::string tag_key(int n, int a) const {
    switch (kind) {
      case Kind::Com:
        return "c" + std::to_string(n);
      case Kind::Ass: {
        auto w = ass_word(n, a);
        std::string s = "a";
        for (int x : w) s += std::to_string(x);
        return s;
      }
      case Kind::Lie: {
        auto w = lie_tail(n, a);
        std::string s = "l1";
        for (int x : w) s += std::to_string(x);
        return s;
      }
      case Kind::PreLie: {
        std::string s = "p";
        for (int x : trees(n)[a]) s += std::to_string(x);
        return s;
      }
      case Kind::Alg1:
        return "e" + std::to_string(a);
    }
    return "";
  }

  // relabel inputs through sigma (0-based): input j of the result receives
  // what input sigma^{-1}(j) of a received; equivalently input j of a is
  // renamed sigma(j).
  SparseVec act(int n, const Perm& sigma, int a) const {
    switch (kind) {
      case Kind::Com: {
        SparseVec v;
        v.set(0, Rational(1));
        return v;
      }
      case Kind::Ass: {
        auto w = ass_word(n, a);
        for (auto& x : w) x = sigma[x - 1] + 1;
        SparseVec v;
        v.set(ass_rank(w), Rational(1));
        return v;
      }
      case Kind::Lie: {
        BracketTree t = lie_tree(n, a);
        for (auto& lf : t.leaves) lf = sigma[lf - 1] + 1;
        return lie_straighten(n, t);
      }
      case Kind::PreLie: {
        const auto& par = trees(n)[a];
        std::vector<int> np(n);
        for (int v = 1; v <= n; ++v) {
          int p = par[v - 1];
          np[sigma[v - 1]] = p == 0 ? 0 : sigma[p - 1] + 1;
        }
        SparseVec v;
        v.set(tree_rank(n, np), Rational(1));
        return v;
      }
      case Kind::Alg1: {
        SparseVec v;
        v.set(a, Rational(1));
        return v;
      }
    }
    return {};
  }

  // partial composition a o_i b : O(n) x O(m) -> O(n+m-1), slot i is 1-based.
  SparseVec compose(int n, int i, int m, int a, int b) const {
    if (i < 1 || i > n) throw std::out_of_range("compose: slot");
    if (n + m - 1 > max_arity) throw std::out_of_range("compose: truncation exceeded");
    switch (kind) {
      case Kind::Com: {
        SparseVec v;
        v.set(0, Rational(1));
        return v;
      }
      case Kind::Ass: {
        auto wa = ass_word(n, a);
        auto wb = ass_word(m, b);
        std::vector<int> w;
        for (int x : wa) {
          if (x < i)
            w.push_back(x);
          else if (x > i)
            w.push_back(x + m - 1);
          else
            for (int y : wb) w.push_back(i - 1 + y);
        }
        SparseVec v;
        v.set(ass_rank(w), Rational(1));
        return v;
      }
      case Kind::Lie: {
        BracketTree ta = lie_tree(n, a);
        BracketTree tb = lie_tree(m, b);
        BracketTree out = substitute(ta, i, tb, m);
        return lie_straighten(n + m - 1, out);
      }
      case Kind::PreLie: {
        return prelie_compose(n, i, m, a, b);
      }
      case Kind::Alg1: {
        SparseVec v;
        for (auto& [c, q] : alg1.prod[a][b]) v.set(c, q);
        v.sort_combine();
        return v;
      }
    }
    return {};
  }

  // full composition tensor for (n, i, m): column (a * dim(m) + b) holds
  // compose(n, i, m, a, b). Memoized; optionally persisted by the cache layer.
  const SparseMat& compose_tensor(int n, int i, int m) const {
    std::lock_guard<std::mutex> lk(caches_->mu);
    auto key = std::make_tuple(n, i, m);
    auto it = caches_->tensors.find(key);
    if (it != caches_->tensors.end()) return it->second;
    SparseMat t(dim(n + m - 1), dim(n) * dim(m));
    if (load_hook) {
      SparseMat loaded;
      if (load_hook(n, i, m, loaded)) {
        it = caches_->tensors.emplace(key, std::move(loaded)).first;
        return it->second;
      }
    }
    for (int a = 0; a < dim(n); ++a)
      for (int b = 0; b < dim(m); ++b) {
        SparseVec v = compose(n, i, m, a, b);
        for (auto& [r, c] : v.e) t.set(r, a * dim(m) + b, c);
      }
    t.finish();
    if (store_hook) store_hook(n, i, m, t);
    it = caches_->tensors.emplace(key, std::move(t)).first;
    return it->second;
  }

  // identity hash for the disk cache layer
  std::string content_hash() const;

  // hooks installed by the cache layer
  std::function<bool(int, int, int, SparseMat&)> load_hook;
  std::function<void(int, int, int, const SparseMat&)> store_hook;

  // the underlying species (ideal part only when reduced = true)
  ExplicitSpecies to_species(int maxn, bool reduced) const;

  static int factorial(int n) {
    int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }

  // --- Ass words ---
  std::vector<int> ass_word(int n, int rank) const {
    std::vector<int> pool(n), w;
    for (int i = 0; i < n; ++i) pool[i] = i + 1;
    for (int pos = n; pos >= 1; --pos) {
      int f = factorial(pos - 1);
      int idx = rank / f;
      rank %= f;
      w.push_back(pool[idx]);
      pool.erase(pool.begin() + idx);
    }
    return w;
  }
  int ass_rank(const std::vector<int>& w) const {
    int n = static_cast<int>(w.size());
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i + 1;
    int r = 0;
    for (int pos = 0; pos < n; ++pos) {
      auto it = std::find(pool.begin(), pool.end(), w[pos]);
      r += static_cast<int>(it - pool.begin()) * factorial(n - pos - 1);
      pool.erase(it);
    }
    return r;
  }

  // --- Lie left-normed basis ---
  // tag <-> tail permutation of {2..n}; the basis element is
  // [[...[x_1, x_{t_1}], x_{t_2}], ..., x_{t_{n-1}}].
  std::vector<int> lie_tail(int n, int rank) const {
    std::vector<int> pool, w;
    for (int i = 2; i <= n; ++i) pool.push_back(i);
    for (int pos = n - 1; pos >= 1; --pos) {
      int f = factorial(pos - 1);
      int idx = rank / f;
      rank %= f;
      w.push_back(pool[idx]);
      pool.erase(pool.begin() + idx);
    }
    return w;
  }
  int lie_tail_rank(const std::vector<int>& tail) const {
    int n = static_cast<int>(tail.size()) + 1;
    std::vector<int> pool;
    for (int i = 2; i <= n; ++i) pool.push_back(i);
    int r = 0;
    for (std::size_t pos = 0; pos < tail.size(); ++pos) {
      auto it = std::find(pool.begin(), pool.end(), tail[pos]);
      r += static_cast<int>(it - pool.begin()) * factorial(static_cast<int>(tail.size() - pos - 1));
      pool.erase(it);
    }
    return r;
  }

  // binary bracket trees in an arena; node: children indices, or a leaf
  struct BracketTree {
    // nodes: (left, right) with negative entries -leaf
    std::vector<std::pair<int, int>> nodes;
    std::vector<int> leaves;  // leaf labels by leaf id
    int root = 0;
    int add_leaf(int label) {
      leaves.push_back(label);
      return -static_cast<int>(leaves.size());
    }
    int add_node(int l, int r) {
      nodes.emplace_back(l, r);
      return static_cast<int>(nodes.size()) - 1;
    }
  };

  BracketTree lie_tree(int n, int rank) const {
    BracketTree t;
    auto tail = lie_tail(n, rank);
    int cur = t.add_leaf(1);
    for (int x : tail) cur = t.add_node(cur, t.add_leaf(x));
    t.root = cur;
    return t;
  }

  static BracketTree substitute(const BracketTree& a, int slot, const BracketTree& b, int m) {
    // relabel a's leaves (< slot keep, > slot shift), replace leaf == slot by b
    BracketTree t;
    std::vector<int> bmap(b.leaves.size());
    for (std::size_t i = 0; i < b.leaves.size(); ++i) t.add_leaf(slot - 1 + b.leaves[i]);
    for (std::size_t i = 0; i < b.leaves.size(); ++i) bmap[i] = -static_cast<int>(i + 1);
    std::vector<int> bnode(b.nodes.size());
    for (std::size_t i = 0; i < b.nodes.size(); ++i) {
      int l = b.nodes[i].first, r = b.nodes[i].second;
      int nl = l < 0 ? bmap[-l - 1] : bnode[l];
      int nr = r < 0 ? bmap[-r - 1] : bnode[r];
      bnode[i] = t.add_node(nl, nr);
    }
    int broot = b.root < 0 ? bmap[-b.root - 1] : bnode[b.root];
    std::vector<int> anode(a.nodes.size());
    std::vector<int> amap(a.leaves.size());
    for (std::size_t i = 0; i < a.leaves.size(); ++i) {
      int lbl = a.leaves[i];
      if (lbl == slot)
        amap[i] = broot;
      else
        amap[i] = t.add_leaf(lbl < slot ? lbl : lbl + m - 1);
    }
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      int l = a.nodes[i].first, r = a.nodes[i].second;
      int nl = l < 0 ? amap[-l - 1] : anode[l];
      int nr = r < 0 ? amap[-r - 1] : anode[r];
      anode[i] = t.add_node(nl, nr);
    }
    t.root = a.root < 0 ? amap[-a.root - 1] : anode[a.root];
    return t;
  }

  // expansion into associative words with signs
  static void lie_expand(const BracketTree& t, int node, std::map<std::vector<int>, long long>& out) {
    std::function<std::map<std::vector<int>, long long>(int)> rec =
        [&](int nd) -> std::map<std::vector<int>, long long> {
      std::map<std::vector<int>, long long> r;
      if (nd < 0) {
        r[{t.leaves[-nd - 1]}] = 1;
        return r;
      }
      auto L = rec(t.nodes[nd].first);
      auto R = rec(t.nodes[nd].second);
      for (auto& [wl, cl] : L)
        for (auto& [wr, cr] : R) {
          std::vector<int> lr = wl;
          lr.insert(lr.end(), wr.begin(), wr.end());
          r[lr] += cl * cr;
          std::vector<int> rl = wr;
          rl.insert(rl.end(), wl.begin(), wl.end());
          r[rl] -= cl * cr;
        }
      return r;
    };
    out = rec(node);
  }

  // Straightening to the left-normed basis: the coefficient of the basis
  // element with tail (t_1..t_{n-1}) is the coefficient of the word
  // 1 t_1 ... t_{n-1} in the associative expansion.
  SparseVec lie_straighten(int n, const BracketTree& t) const {
    std::map<std::vector<int>, long long> words;
    lie_expand(t, t.root, words);
    SparseVec v;
    for (auto& [w, c] : words) {
      if (c == 0 || w[0] != 1) continue;
      std::vector<int> tail(w.begin() + 1, w.end());
      v.set(lie_tail_rank(tail), Rational(c));
    }
    v.sort_combine();
    (void)n;
    return v;
  }

  // --- PreLie rooted trees ---
  // parent arrays par[v-1] in {0..n}, one root (0), acyclic
  const std::vector<std::vector<int>>& trees(int n) const {
    std::lock_guard<std::mutex> lk(caches_->mu);
    auto it = caches_->trees.find(n);
    if (it != caches_->trees.end()) return it->second;
    std::vector<std::vector<int>> list;
    std::vector<int> par(n, 0);
    std::function<void(int)> rec = [&](int v) {
      if (v == n) {
        int roots = 0;
        for (int x : par) roots += (x == 0);
        if (roots != 1) return;
        // acyclicity
        for (int s = 1; s <= n; ++s) {
          int steps = 0, cur = s;
          while (cur != 0 && steps <= n) {
            cur = par[cur - 1];
            ++steps;
          }
          if (steps > n) return;
        }
        list.push_back(par);
        return;
      }
      for (int p = 0; p <= n; ++p) {
        if (p == v + 1) continue;  // no self-loop
        par[v] = p;
        rec(v + 1);
      }
    };
    rec(0);
    auto r = caches_->trees.emplace(n, std::move(list));
    return r.first->second;
  }
  int tree_rank(int n, const std::vector<int>& par) const {
    const auto& ts = trees(n);
    auto it = std::lower_bound(ts.begin(), ts.end(), par);
    if (it == ts.end() || *it != par) throw std::logic_error("prelie: unknown tree");
    return static_cast<int>(it - ts.begin());
  }

  SparseVec prelie_compose(int n, int i, int m, int a, int b) const {
    const auto& ta = trees(n)[a];
    const auto& tb = trees(m)[b];
    // relabeling maps
    auto relab_a = [&](int v) { return v == 0 ? 0 : (v < i ? v : v + m - 1); };
    auto relab_b = [&](int v) { return v == 0 ? 0 : i - 1 + v; };
    int broot = 0;
    for (int v = 1; v <= m; ++v)
      if (tb[v - 1] == 0) broot = relab_b(v);
    std::vector<int> children;
    for (int v = 1; v <= n; ++v)
      if (v != i && ta[v - 1] == i) children.push_back(v);
    SparseVec out;
    std::vector<int> assign(children.size(), 1);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
      if (j == children.size()) {
        std::vector<int> np(n + m - 1, 0);
        for (int v = 1; v <= n; ++v) {
          if (v == i) continue;
          int p = ta[v - 1];
          int nv = relab_a(v);
          if (p == i) {
            np[nv - 1] = relab_b(assign[std::lower_bound(children.begin(), children.end(), v) -
                                        children.begin()]);
          } else {
            np[nv - 1] = relab_a(p);
          }
        }
        for (int v = 1; v <= m; ++v) {
          int p = tb[v - 1];
          int nv = relab_b(v);
          if (p == 0) {
            np[nv - 1] = relab_a(ta[i - 1]);  // root of b hangs where i hung
          } else {
            np[nv - 1] = relab_b(p);
          }
        }
        (void)broot;
        out.set(tree_rank(n + m - 1, np), Rational(1));
        return;
      }
      for (int tgt = 1; tgt <= m; ++tgt) {
        assign[j] = tgt;
        rec(j + 1);
      }
    };
    rec(0);
    out.sort_combine();
    return out;
  }

private:
  struct Caches {
    std::mutex mu;
    std::map<std::tuple<int, int, int>, SparseMat> tensors;
    std::map<int, std::vector<std::vector<int>>> trees;
  };
  std::shared_ptr<Caches> caches_ = std::make_shared<Caches>();
};

inline OperadTable OperadTable::builtin(const std::string& which, int max_arity) {
  OperadTable t;
  t.max_arity = max_arity;
  t.name = which;
  if (which == "com")
    t.kind = Kind::Com;
  else if (which == "ass")
    t.kind = Kind::Ass;
  else if (which == "lie")
    t.kind = Kind::Lie;
  else if (which == "prelie")
    t.kind = Kind::PreLie;
  else
    throw std::invalid_argument("unknown builtin operad: " + which);
  t.positively_graded = true;
  return t;
}

inline OperadTable OperadTable::from_alg1(const Alg1Data& data, int max_arity) {
  OperadTable t;
  t.kind = Kind::Alg1;
  t.max_arity = std::max(1, max_arity);
  t.name = "alg1:" + data.name;
  t.alg1 = data;
  // validate: unit, associativity, augmentation closure
  int r = data.ideal_dim;
  auto getc = [&](int a, int b, int c) {
    for (auto& [k, q] : data.prod[a][b])
      if (k == c) return q;
    return Rational(0);
  };
  for (int a = 0; a <= r; ++a) {
    for (int c = 0; c <= r; ++c) {
      if (getc(0, a, c) != (a == c ? Rational(1) : Rational(0)) ||
          getc(a, 0, c) != (a == c ? Rational(1) : Rational(0)))
        throw std::invalid_argument("alg1: basis element 0 is not a unit");
    }
  }
  for (int a = 1; a <= r; ++a)
    for (int b = 1; b <= r; ++b)
      if (!getc(a, b, 0).is_zero())
        throw std::invalid_argument("alg1: ideal not closed (augmentation fails)");
  for (int a = 0; a <= r; ++a)
    for (int b = 0; b <= r; ++b)
      for (int c = 0; c <= r; ++c) {
        // (ab)c = a(bc)
        std::map<int, Rational> lhs, rhs;
        for (auto& [x, q] : data.prod[a][b])
          for (auto& [y, p] : data.prod[x][c]) lhs[y] += q * p;
        for (auto& [x, q] : data.prod[b][c])
          for (auto& [y, p] : data.prod[a][x]) rhs[y] += q * p;
        for (auto& [k, v] : lhs)
          if (!(v == rhs[k])) throw std::invalid_argument("alg1: not associative");
        for (auto& [k, v] : rhs)
          if (!(v == lhs[k])) throw std::invalid_argument("alg1: not associative");
      }
  // weight additivity: w(ab) = w(a)+w(b) whenever ab has a component
  bool additive = true;
  auto wt = [&](int a) { return a == 0 ? 0 : data.ideal_weight[a - 1]; };
  for (int a = 1; a <= r; ++a)
    for (int b = 1; b <= r; ++b)
      for (auto& [c, q] : data.prod[a][b])
        if (!q.is_zero() && wt(c) != wt(a) + wt(b)) additive = false;
  bool positive = true;
  for (int a = 1; a <= r; ++a)
    if (wt(a) <= 0) positive = false;
  if (!(additive && positive)) {
    // fall back to the zero grading; complexes over this operad are truncated
    // by homological degree instead of weight
    t.positively_graded = false;
    t.alg1.ideal_weight.assign(r, 0);
  }
  return t;
}

inline std::string OperadTable::content_hash() const {
  // FNV-1a over a canonical description
  std::string desc = name + "#" + std::to_string(max_arity);
  if (kind == Kind::Alg1) {
    desc += "#" + std::to_string(alg1.ideal_dim);
    for (int a = 0; a <= alg1.ideal_dim; ++a)
      for (int b = 0; b <= alg1.ideal_dim; ++b)
        for (auto& [c, q] : alg1.prod[a][b])
          desc += "|" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                  ":" + q.to_string();
    for (int w : alg1.ideal_weight) desc += ";" + std::to_string(w);
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : desc) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline ExplicitSpecies OperadTable::to_species(int maxn, bool reduced) const {
  ExplicitSpecies s((reduced ? "bar_" : "") + name, maxn);
  for (int n = (reduced && kind != Kind::Alg1 ? 2 : 1); n <= maxn; ++n) {
    int d = reduced ? ideal_dim(n) : dim(n);
    for (int j = 0; j < d; ++j) {
      int a = reduced ? ideal_tag(n, j) : j;
      s.add_tag(n, {tag_key(n, a), 0, weight(n, a)});
    }
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      Perm sigma = perm_transposition(n, g);
      int d = s.dim(n);
      for (int j = 0; j < d; ++j) {
        int a = reduced ? ideal_tag(n, j) : j;
        SparseVec img = act(n, sigma, a);
        for (auto& [rr, c] : img.e) {
          int rj = reduced ? rr - (n == 1 ? 1 : 0) : rr;
          s.gen[n][g].set(rj, j, c);
        }
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// --- operad axiom checks ------------------------------------------------------

// Consecutive and parallel axioms on all basis triples within the truncation,
// plus equivariance of partial compositions for adjacent transpositions.
inline void validate_operad(const OperadTable& op, int nmax) {
  auto add_scaled = [](std::map<int, Rational>& acc, const SparseVec& v, const Rational& c) {
    for (auto& [i, q] : v.e) acc[i] += c * q;
  };
  auto is_zero = [](std::map<int, Rational>& m) {
    for (auto& [i, q] : m)
      if (!q.is_zero()) return false;
    return true;
  };
  for (int n = 1; n <= nmax; ++n)
    for (int m = 1; m <= nmax; ++m)
      for (int k = 1; k <= nmax; ++k) {
        if (n + m + k - 2 > op.max_arity || n + m + k - 2 > nmax + 2) continue;
        for (int a = 0; a < op.dim(n); ++a)
          for (int b = 0; b < op.dim(m); ++b)
            for (int c = 0; c < op.dim(k); ++c) {
              // consecutive: (a o_i b) o_{i-1+j} c = a o_i (b o_j c)
              for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= m; ++j) {
                  std::map<int, Rational> acc;
                  SparseVec ab = op.compose(n, i, m, a, b);
                  for (auto& [t, q] : ab.e)
                    add_scaled(acc, op.compose(n + m - 1, i - 1 + j, k, t, c), q);
                  SparseVec bc = op.compose(m, j, k, b, c);
                  for (auto& [t, q] : bc.e)
                    add_scaled(acc, op.compose(n, i, m + k - 1, a, t), -q);
                  if (!is_zero(acc)) throw std::logic_error(op.name + ": consecutive axiom fails");
                }
              // parallel: i < j: (a o_i b) o_{j+m-1} c = (a o_j c) o_i b
              for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j) {
                  std::map<int, Rational> acc;
                  SparseVec ab = op.compose(n, i, m, a, b);
                  for (auto& [t, q] : ab.e)
                    add_scaled(acc, op.compose(n + m - 1, j + m - 1, k, t, c), q);
                  SparseVec ac = op.compose(n, j, k, a, c);
                  for (auto& [t, q] : ac.e)
                    add_scaled(acc, op.compose(n + k - 1, i, m, t, b), -q);
                  if (!is_zero(acc)) throw std::logic_error(op.name + ": parallel axiom fails");
                }
            }
      }
  // equivariance for adjacent transpositions sigma of the outer factor:
  // act(sigma', a o_i b) = act(sigma, a) o_{sigma(i)} b, where sigma' moves
  // the m-block along with slot i.
  for (int n = 2; n <= nmax; ++n)
    for (int m = 1; m <= nmax; ++m) {
      if (n + m - 1 > op.max_arity) continue;
      for (int g = 0; g + 1 < n; ++g) {
        Perm sigma = perm_transposition(n, g);
        // induced permutation on n+m-1 slots when b sits in slot i
        for (int i = 1; i <= n; ++i) {
          int np = n + m - 1;
          Perm sp(np);
          auto newpos = [&](int oldslot) {
            // position of original a-slot under sigma, in the composed output
            int s = sigma[oldslot - 1] + 1;
            int si = sigma[i - 1] + 1;
            if (oldslot == i) return -1;  // handled separately
            return s < si ? (s <= 0 ? 0 : s) : s + m - 1;
          };
          int si = sigma[i - 1] + 1;
          for (int oldslot = 1; oldslot <= n; ++oldslot) {
            if (oldslot == i) continue;
            int from = oldslot < i ? oldslot : oldslot + m - 1;
            sp[from - 1] = newpos(oldslot) - 1;
          }
          for (int j = 0; j < m; ++j) sp[(i - 1 + j + 1) - 1] = si - 1 + j;
          for (int a = 0; a < op.dim(n); ++a)
            for (int b = 0; b < op.dim(m); ++b) {
              std::map<int, Rational> acc;
              SparseVec ab = op.compose(n, i, m, a, b);
              for (auto& [t, q] : ab.e) add_scaled(acc, op.act(np, sp, t), q);
              SparseVec sa = op.act(n, sigma, a);
              for (auto& [t, q] : sa.e) add_scaled(acc, op.compose(n, si, m, t, b), -q);
              if (!is_zero(acc)) throw std::logic_error(op.name + ": equivariance fails");
            }
        }
      }
    }
}

}  // namespace wheelhouse
