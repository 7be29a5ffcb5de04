#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wheelhouse/chain.hpp"
#include "wheelhouse/envelope.hpp"
#include "wheelhouse/species.hpp"

namespace wheelhouse {

// The cyclic complex s^{-1} Cyc(sA) of a twisted associative algebra: cyclic
// words of suspended letters modulo the signed rotation, with the quotient of
// the bar differential. A length-l word sits in homological degree l - 1, so
// the homology of this complex is HC_*(A) directly.
class CyclicComplex {
public:
  struct Letter {
    std::vector<int> block;
    int tag;
  };
  struct Necklace {
    std::vector<Letter> letters;
  };

  TwistedAlgebra alg;
  Truncation trunc;
  ChainComplex cx;
  std::map<BlockKey, std::vector<Necklace>> bases;

  static CyclicComplex build(const TwistedAlgebra& a, const Truncation& t,
                             bool with_actions = false) {
    CyclicComplex c;
    c.alg = a;
    c.trunc = t;
    // suspended letter degrees: 1 + tag degree (tags sit in degree 0 here)
    for (int n = 0; n <= t.max_arity; ++n) {
      for (int l = 1; l <= t.max_degree + 1; ++l) {
        c.enumerate_block(n, l);
      }
    }
    c.assemble(with_actions);
    return c;
  }

  // canonicalizes a tuple of letters under the signed rotation; false = killed
  bool canonical(std::vector<Letter> w, Rational& sign, std::string& key) const {
    int l = static_cast<int>(w.size());
    int total = 0;
    for (auto& lt : w) total += letter_degree(lt);
    auto keyof = [&](const std::vector<Letter>& v) {
      std::string k;
      for (auto& lt : v) k += letter_key(lt) + ";";
      return k;
    };
    std::vector<Letter> cur = w;
    Rational cursign(1);
    std::string best = keyof(cur);
    Rational best_sign = cursign;
    bool killed = false;
    for (int r = 1; r < l; ++r) {
      int dl = letter_degree(cur.back());
      if ((dl % 2) && ((total - dl) % 2)) cursign = -cursign;
      std::rotate(cur.rbegin(), cur.rbegin() + 1, cur.rend());
      std::string k = keyof(cur);
      if (k < best) {
        best = k;
        best_sign = cursign;
      } else if (k == best && !(cursign == best_sign)) {
        killed = true;
      }
    }
    if (killed) return false;
    sign = best_sign;
    key = best;
    return true;
  }

  int letter_degree(const Letter& lt) const {
    return 1 + alg.tags[lt.block.size()][lt.tag].degree;
  }
  int letter_weight(const Letter& lt) const {
    return alg.tags[lt.block.size()][lt.tag].weight;
  }
  std::string letter_key(const Letter& lt) const {
    return sp::block_key(lt.block) + alg.tags[lt.block.size()][lt.tag].key;
  }

  std::map<BlockKey, int> homology(int jobs = 1) const { return cx.homology_dims(jobs); }

private:
  std::map<BlockKey, std::map<std::string, int>> index_;

  void enumerate_block(int n, int l) {
    if (l > n && alg.dim(0) == 0) return;
    // tuples of letters over ordered decompositions, canonical under rotation
    sp::ordered_decompositions(n, l, [&](const std::vector<std::vector<int>>& blocks) {
      for (auto& b : blocks)
        if (alg.dim(static_cast<int>(b.size())) == 0) return;
      std::vector<Letter> w(l);
      std::function<void(int, int)> rec = [&](int j, int wt) {
        if (wt > trunc.max_weight) return;
        if (j == l) {
          Rational sgn;
          std::string key;
          if (!canonical(w, sgn, key)) return;
          std::string self;
          for (auto& lt : w) self += letter_key(lt) + ";";
          if (self != key) return;
          BlockKey bk{n, wt, l - 1};
          if (index_[bk].count(key)) return;
          int id = static_cast<int>(bases[bk].size());
          index_[bk][key] = id;
          bases[bk].push_back({w});
          return;
        }
        int m = static_cast<int>(blocks[j].size());
        for (int x = 0; x < alg.dim(m); ++x) {
          w[j] = {blocks[j], x};
          rec(j + 1, wt + alg.tags[m][x].weight);
        }
      };
      rec(0, 0);
    });
  }

  // merged letter i with letter i+1 through the product, blocks re-sorted
  void merged_letter(const Letter& a, const Letter& b, std::vector<std::pair<Letter, Rational>>& out) const {
    int m1 = static_cast<int>(a.block.size()), m2 = static_cast<int>(b.block.size());
    std::vector<int> joined = a.block;
    joined.insert(joined.end(), b.block.begin(), b.block.end());
    std::vector<int> sorted_b = joined;
    std::sort(sorted_b.begin(), sorted_b.end());
    // tau maps the standard layout to the actual labels
    Perm tau(m1 + m2);
    for (int j = 0; j < m1 + m2; ++j)
      tau[j] = static_cast<int>(std::lower_bound(sorted_b.begin(), sorted_b.end(), joined[j]) -
                                sorted_b.begin());
    SparseVec prod = alg.mult(m1, a.tag, m2, b.tag);
    std::map<int, Rational> acc;
    for (auto& [t, c] : prod.e) {
      SparseVec moved = alg.act(m1 + m2, tau, t);
      for (auto& [r, v] : moved.e) acc[r] += c * v;
    }
    for (auto& [t, c] : acc)
      if (!c.is_zero()) out.push_back({Letter{sorted_b, t}, c});
  }

  void assemble(bool with_actions) {
    for (auto& [bk, basis] : bases) cx.dims[bk] = static_cast<int>(basis.size());
    for (auto& [bk, basis] : bases) {
      std::vector<std::string> keys;
      for (auto& nl : basis) {
        std::string self;
        for (auto& lt : nl.letters) self += letter_key(lt) + ";";
        keys.push_back("hc[" + self + "]");
      }
      cx.basis_keys[bk] = keys;
      BlockKey below{bk.n, bk.w, bk.d - 1};
      int rows = cx.dims.count(below) ? cx.dims[below] : 0;
      SparseMat d(rows, static_cast<int>(basis.size()));
      for (std::size_t e = 0; e < basis.size(); ++e) {
        const auto& w = basis[e].letters;
        int l = static_cast<int>(w.size());
        if (l < 2) continue;
        // induced differential: all cyclically adjacent merges. For the
        // inner merges the operator passes the preceding suspended letters;
        // the wraparound merge rotates first (with its Koszul sign), then
        // merges in front.
        auto emit_term = [&](const std::vector<Letter>& nw, const Rational& coeff) {
          Rational sgn;
          std::string key;
          if (!canonical(nw, sgn, key)) return;
          auto bit = index_.find(below);
          if (bit == index_.end()) return;
          auto it = bit->second.find(key);
          if (it == bit->second.end()) return;  // outside truncation
          d.set(it->second, static_cast<int>(e), coeff * sgn);
        };
        for (int i = 0; i + 1 < l; ++i) {
          int before = 0;
          for (int j = 0; j < i; ++j) before += letter_degree(w[j]);
          Rational base_sign(before % 2 ? -1 : 1);
          std::vector<std::pair<Letter, Rational>> merged;
          merged_letter(w[i], w[i + 1], merged);
          for (auto& [lt, c] : merged) {
            std::vector<Letter> nw;
            for (int j = 0; j < i; ++j) nw.push_back(w[j]);
            nw.push_back(lt);
            for (int j = i + 2; j < l; ++j) nw.push_back(w[j]);
            emit_term(nw, base_sign * c);
          }
        }
        {
          int dl = letter_degree(w[l - 1]);
          int rest = 0;
          for (int j = 0; j < l - 1; ++j) rest += letter_degree(w[j]);
          Rational rot_sign((dl % 2) && (rest % 2) ? -1 : 1);
          std::vector<std::pair<Letter, Rational>> merged;
          merged_letter(w[l - 1], w[0], merged);
          for (auto& [lt, c] : merged) {
            std::vector<Letter> nw;
            nw.push_back(lt);
            for (int j = 1; j < l - 1; ++j) nw.push_back(w[j]);
            emit_term(nw, rot_sign * c);
          }
        }
      }
      d.finish();
      if (bk.d > 0) cx.diff[bk] = std::move(d);
      if (bk.d == trunc.max_degree) cx.untrusted.insert(bk);
    }
    if (with_actions) {
      for (auto& [bk, basis] : bases) {
        for (int g = 0; g + 1 < bk.n; ++g) {
          Perm sigma = perm_transposition(bk.n, g);
          SparseMat m(static_cast<int>(basis.size()), static_cast<int>(basis.size()));
          for (std::size_t e = 0; e < basis.size(); ++e) {
            const auto& w = basis[e].letters;
            int l = static_cast<int>(w.size());
            std::vector<std::vector<int>> nb(l);
            std::vector<SparseVec> vt(l);
            for (int j = 0; j < l; ++j) {
              Perm ind;
              nb[j] = sp::relabel_block(w[j].block, sigma, ind);
              vt[j] = alg.act(static_cast<int>(w[j].block.size()), ind, w[j].tag);
            }
            std::vector<Letter> cur(l);
            std::function<void(int, Rational)> emit = [&](int j, Rational c) {
              if (j == l) {
                Rational sgn;
                std::string key;
                if (!canonical(cur, sgn, key)) return;
                m.set(index_.at(bk).at(key), static_cast<int>(e), c * sgn);
                return;
              }
              for (auto& [r, v] : vt[j].e) {
                cur[j] = {nb[j], r};
                emit(j + 1, c * v);
              }
            };
            emit(0, Rational(1));
          }
          m.finish();
          cx.gen_action[bk][g] = std::move(m);
        }
      }
    }
    cx.check_d_squared();
  }
};

// HC of the bar-type twisted algebras in this project: dims per (n, w, d),
// where d is the cyclic homology degree.
inline std::map<BlockKey, int> cyclic_homology(const TwistedAlgebra& a, const Truncation& t,
                                               int jobs = 1) {
  CyclicComplex c = CyclicComplex::build(a, t);
  return c.homology(jobs);
}

// The species 1 with zero multiplication, as a twisted algebra.
inline TwistedAlgebra zero_mult_singleton(int maxn, int weight_of_letter = 1) {
  TwistedAlgebra t;
  t.name = "singleton_zero";
  t.max_arity = maxn;
  t.tags.resize(maxn + 1);
  if (maxn >= 1) t.tags[1].push_back({"x", 0, weight_of_letter});
  t.mult = [](int, int, int, int) { return SparseVec{}; };
  t.act = [](int, const Perm&, int a) {
    SparseVec v;
    v.set(a, Rational(1));
    return v;
  };
  return t;
}

// An ordinary algebra concentrated in arity zero, from alg1 structure
// constants restricted to the augmentation ideal.
inline TwistedAlgebra arity_zero_algebra(const Alg1Data& data) {
  TwistedAlgebra t;
  t.name = data.name;
  t.max_arity = 0;
  t.tags.resize(1);
  for (int j = 0; j < data.ideal_dim; ++j)
    t.tags[0].push_back({"e" + std::to_string(j + 1), 0, data.ideal_weight[j]});
  auto prod = data.prod;
  t.mult = [prod](int, int a, int, int b) {
    SparseVec v;
    for (auto& [c, q] : prod[a + 1][b + 1])
      if (c >= 1) v.set(c - 1, q);
    v.sort_combine();
    return v;
  };
  t.act = [](int, const Perm&, int a) {
    SparseVec v;
    v.set(a, Rational(1));
    return v;
  };
  return t;
}

}  // namespace wheelhouse
