#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wheelhouse/envelope.hpp"
#include "wheelhouse/operad.hpp"

namespace wheelhouse {

// Monomial bases of free operadic algebras O(V) = sum O(k) (x)_{S_k} V^{(x)k}.
// Per letter content the coinvariants are computed as the quotient of O(k) by
// the Young-subgroup relations of the repeated letters; basis elements are
// (content, surviving operad tag) pairs, graded by the operad weight.
class FreeAlgebra {
public:
  std::shared_ptr<const OperadTable> op;
  int dimv = 0;
  int max_weight = 0;

  struct Block {
    int k = 0;
    std::vector<int> content;  // sorted word, 1-based letters
    RowSpan rel{0};
    std::vector<int> keep;
    std::map<int, int> keep_pos;
    int weight_of(const OperadTable& o, int tag) const { return o.weight(k, tag); }
  };
  std::vector<Block> blocks;
  std::map<std::pair<int, std::string>, int> block_index;  // (k, content key)
  // global basis per weight: (block id, kept position)
  std::map<int, std::vector<std::pair<int, int>>> basis;
  std::map<std::pair<int, int>, int> basis_index;  // (block, keep position) -> index in its weight

  static std::string content_key(const std::vector<int>& c) {
    std::string s;
    for (int x : c) s += std::to_string(x) + ",";
    return s;
  }

  static FreeAlgebra build(const std::shared_ptr<const OperadTable>& op, int dimv,
                           int max_weight) {
    FreeAlgebra fa;
    fa.op = op;
    fa.dimv = dimv;
    fa.max_weight = max_weight;
    int kmax = op->kind == OperadTable::Kind::Alg1 ? 1 : max_weight + 1;
    kmax = std::min(kmax, op->max_arity);
    for (int k = 1; k <= kmax; ++k) {
      if (op->dim(k) == 0) continue;
      std::vector<int> content(k, 1);
      // enumerate weakly increasing words
      std::function<void(int, int)> rec = [&](int pos, int low) {
        if (pos == k) {
          fa.add_block(k, content);
          return;
        }
        for (int x = low; x <= dimv; ++x) {
          content[pos] = x;
          rec(pos + 1, x);
        }
      };
      rec(0, 1);
    }
    return fa;
  }

  void add_block(int k, const std::vector<int>& content) {
    Block b;
    b.k = k;
    b.content = content;
    b.rel = RowSpan(op->dim(k));
    // Young relations: t - act(s_j, t) whenever content[j] == content[j+1]
    for (int j = 0; j + 1 < k; ++j) {
      if (content[j] != content[j + 1]) continue;
      Perm s = perm_transposition(k, j);
      for (int t = 0; t < op->dim(k); ++t) {
        SparseVec v;
        v.set(t, Rational(1));
        v.axpy(Rational(-1), op->act(k, s, t));
        v.sort_combine();
        if (!v.empty()) b.rel.insert(v);
      }
    }
    b.keep = b.rel.free_columns();
    for (std::size_t i = 0; i < b.keep.size(); ++i) b.keep_pos[b.keep[i]] = static_cast<int>(i);
    int id = static_cast<int>(blocks.size());
    blocks.push_back(std::move(b));
    block_index[{k, content_key(content)}] = id;
    for (std::size_t i = 0; i < blocks[id].keep.size(); ++i) {
      int w = op->weight(k, blocks[id].keep[i]);
      if (w > max_weight) continue;
      basis_index[{id, static_cast<int>(i)}] = static_cast<int>(basis[w].size());
      basis[w].push_back({id, static_cast<int>(i)});
    }
  }

  int dim(int w) const {
    auto it = basis.find(w);
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
  }

  // projects the monomial (tag over O(k), word) to weight-graded coordinates;
  // out[w] accumulates coeff * class.
  void project(int k, int tag, const std::vector<int>& word, const Rational& coeff,
               std::map<int, SparseVec>& out) const {
    // stable sort by letter; slot j is renamed sigma[j]
    std::vector<int> ord(k);
    for (int i = 0; i < k; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return word[a] < word[b]; });
    Perm sigma(k);
    std::vector<int> sorted(k);
    for (int i = 0; i < k; ++i) {
      sigma[ord[i]] = i;
      sorted[i] = word[ord[i]];
    }
    auto bit = block_index.find({k, content_key(sorted)});
    if (bit == block_index.end()) return;  // outside truncation
    const Block& b = blocks[bit->second];
    SparseVec acted = op->act(k, sigma, tag);
    SparseVec red = b.rel.reduce(acted);
    for (auto& [t, c] : red.e) {
      int w = op->weight(k, t);
      if (w > max_weight) continue;
      auto idx = basis_index.find({bit->second, b.keep_pos.at(t)});
      if (idx == basis_index.end()) continue;
      SparseVec one;
      one.set(idx->second, coeff * c);
      out[w].axpy(Rational(1), one);
    }
  }

  // monomial data of a basis element of weight w
  void monomial(int w, int i, int& k, int& tag, std::vector<int>& word) const {
    auto [bid, kp] = basis.at(w)[i];
    k = blocks[bid].k;
    tag = blocks[bid].keep[kp];
    word = blocks[bid].content;
  }

  // independent dimension count via the permutation character of O(k)
  long long character_dim(int k) const {
    if (op->dim(k) == 0) return 0;
    Rational total;
    long long kfact = 1;
    for (int i = 2; i <= k; ++i) kfact *= i;
    Perm p = perm_identity(k);
    do {
      Rational tr;
      for (int t = 0; t < op->dim(k); ++t) tr += op->act(k, p, t).get(t);
      long long fixed = 1;
      for (std::size_t c = 0; c < cycle_type(p).size(); ++c) fixed *= dimv;
      total += tr * Rational(fixed);
    } while (std::next_permutation(p.begin(), p.end()));
    Rational d = total / Rational(kfact);
    if (!d.is_integer()) throw std::logic_error("character_dim: non-integral");
    return d.num().to_int64();
  }
};

// The universal multiplicative envelope of the free algebra: monomials
// (full tag of O(m+1) with the marked slot last, word of length m), graded by
// the operad weight. The unit is the monomial (operad unit, empty word).
class EnvelopeAlgebra {
public:
  std::shared_ptr<const OperadTable> op;
  int dimv = 0;
  int max_weight = 0;

  struct Block {
    int m = 0;
    std::vector<int> content;
    RowSpan rel{0};
    std::vector<int> keep;
    std::map<int, int> keep_pos;
  };
  std::vector<Block> blocks;
  std::map<std::pair<int, std::string>, int> block_index;
  std::map<int, std::vector<std::pair<int, int>>> basis;
  std::map<std::pair<int, int>, int> basis_index;

  static EnvelopeAlgebra build(const std::shared_ptr<const OperadTable>& op, int dimv,
                               int max_weight) {
    EnvelopeAlgebra ea;
    ea.op = op;
    ea.dimv = dimv;
    ea.max_weight = max_weight;
    int mmax = op->kind == OperadTable::Kind::Alg1 ? 0 : max_weight;
    mmax = std::min(mmax, op->max_arity - 1);
    for (int m = 0; m <= mmax; ++m) {
      if (op->dim(m + 1) == 0) continue;
      std::vector<int> content(m, 1);
      std::function<void(int, int)> rec = [&](int pos, int low) {
        if (pos == m) {
          ea.add_block(m, content);
          return;
        }
        for (int x = low; x <= dimv; ++x) {
          content[pos] = x;
          rec(pos + 1, x);
        }
      };
      if (m == 0)
        ea.add_block(0, {});
      else
        rec(0, 1);
    }
    return ea;
  }

  void add_block(int m, const std::vector<int>& content) {
    Block b;
    b.m = m;
    b.content = content;
    b.rel = RowSpan(op->dim(m + 1));
    for (int j = 0; j + 1 < m; ++j) {
      if (content[j] != content[j + 1]) continue;
      Perm s = perm_transposition(m + 1, j);  // fixes the marked slot (last)
      for (int t = 0; t < op->dim(m + 1); ++t) {
        SparseVec v;
        v.set(t, Rational(1));
        v.axpy(Rational(-1), op->act(m + 1, s, t));
        v.sort_combine();
        if (!v.empty()) b.rel.insert(v);
      }
    }
    b.keep = b.rel.free_columns();
    for (std::size_t i = 0; i < b.keep.size(); ++i) b.keep_pos[b.keep[i]] = static_cast<int>(i);
    int id = static_cast<int>(blocks.size());
    blocks.push_back(std::move(b));
    block_index[{m, FreeAlgebra::content_key(content)}] = id;
    for (std::size_t i = 0; i < blocks[id].keep.size(); ++i) {
      int w = op->weight(m + 1, blocks[id].keep[i]);
      if (w > max_weight) continue;
      basis_index[{id, static_cast<int>(i)}] = static_cast<int>(basis[w].size());
      basis[w].push_back({id, static_cast<int>(i)});
    }
  }

  int dim(int w) const {
    auto it = basis.find(w);
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
  }
  int unit_index() const {
    // the unit monomial: m = 0, operad unit tag, weight 0
    auto bit = block_index.find({0, ""});
    if (bit == block_index.end()) throw std::logic_error("envelope: no arity-zero block");
    const Block& b = blocks[bit->second];
    return basis_index.at({bit->second, b.keep_pos.at(op->unit_tag())});
  }

  void project(int m, int tag, const std::vector<int>& word, const Rational& coeff,
               std::map<int, SparseVec>& out) const {
    std::vector<int> ord(m);
    for (int i = 0; i < m; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return word[a] < word[b]; });
    Perm sigma(m + 1);
    std::vector<int> sorted(m);
    for (int i = 0; i < m; ++i) {
      sigma[ord[i]] = i;
      sorted[i] = word[ord[i]];
    }
    sigma[m] = m;
    auto bit = block_index.find({m, FreeAlgebra::content_key(sorted)});
    if (bit == block_index.end()) return;
    const Block& b = blocks[bit->second];
    SparseVec acted = op->act(m + 1, sigma, tag);
    SparseVec red = b.rel.reduce(acted);
    for (auto& [t, c] : red.e) {
      int w = op->weight(m + 1, t);
      if (w > max_weight) continue;
      auto idx = basis_index.find({bit->second, b.keep_pos.at(t)});
      if (idx == basis_index.end()) continue;
      SparseVec one;
      one.set(idx->second, coeff * c);
      out[w].axpy(Rational(1), one);
    }
  }

  void monomial(int w, int i, int& m, int& tag, std::vector<int>& word) const {
    auto [bid, kp] = basis.at(w)[i];
    m = blocks[bid].m;
    tag = blocks[bid].keep[kp];
    word = blocks[bid].content;
  }

  // product of basis monomials: compose through the marked slot, concatenate
  void mult(int w1, int i1, int w2, int i2, const Rational& coeff,
            std::map<int, SparseVec>& out) const {
    int m1, t1, m2, t2;
    std::vector<int> u, v;
    monomial(w1, i1, m1, t1, u);
    monomial(w2, i2, m2, t2, v);
    if (m1 + m2 + 1 > op->max_arity) throw std::out_of_range("envelope: truncation exceeded");
    SparseVec prod = op->compose(m1 + 1, m1 + 1, m2 + 1, t1, t2);
    std::vector<int> word = u;
    word.insert(word.end(), v.begin(), v.end());
    for (auto& [t, c] : prod.e) project(m1 + m2, t, word, coeff * c, out);
  }
};

}  // namespace wheelhouse
