#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "wheelhouse/freealg.hpp"

namespace wheelhouse {

// The positive part of the derivation Lie algebra of a free operadic algebra:
// weight-graded basis, pre-Lie product and bracket, divergence into the
// commutator quotient of the envelope, and the induced action on it.
// Derivations are pairs (generator, image monomial); images exclude the bare
// generator monomials, which matches the augmentation-kernel convention for
// arity-one operads and gives the positive-weight part for connected ones.
class DerLie {
public:
  std::shared_ptr<const OperadTable> op;
  int dimv = 0;
  int max_weight = 0;
  FreeAlgebra fa;
  EnvelopeAlgebra ea;

  struct Cq {
    RowSpan rel{0};
    std::vector<int> keep;
    std::map<int, int> keep_pos;
  };
  std::map<int, Cq> cq;

  static DerLie build(const std::shared_ptr<const OperadTable>& op, int dimv, int max_weight) {
    if (op->kind != OperadTable::Kind::Alg1 && op->max_arity < max_weight + 1)
      throw std::invalid_argument("DerLie: operad truncation too small for the weight bound");
    DerLie dl;
    dl.op = op;
    dl.dimv = dimv;
    dl.max_weight = max_weight;
    dl.fa = FreeAlgebra::build(op, dimv, max_weight);
    dl.ea = EnvelopeAlgebra::build(op, dimv, max_weight);
    dl.build_image_lists();
    dl.build_commutator_quotients();
    return dl;
  }

  // image monomials at weight w (fa indices, bare generators excluded)
  const std::vector<int>& image_list(int w) const {
    static const std::vector<int> empty;
    auto it = images_.find(w);
    return it == images_.end() ? empty : it->second;
  }
  int der_dim(int w) const { return dimv * static_cast<int>(image_list(w).size()); }
  void der_decode(int w, int e, int& gen, int& fa_idx) const {
    int sz = static_cast<int>(image_list(w).size());
    gen = e / sz + 1;
    fa_idx = image_list(w)[e % sz];
  }
  int der_encode(int w, int gen, int fa_idx) const {
    auto it = image_pos_.at(w).find(fa_idx);
    if (it == image_pos_.at(w).end()) return -1;
    return (gen - 1) * static_cast<int>(image_list(w).size()) + it->second;
  }

  // applies the derivation with image (ks, ts, ws) on the generator `gen` to
  // the monomial (k, tag, word), accumulating into fa coordinates per weight
  void substitute(int gen, int ks, int ts, const std::vector<int>& ws, int k, int tag,
                  const std::vector<int>& word, const Rational& coeff,
                  std::map<int, SparseVec>& out) const {
    for (int slot = 1; slot <= k; ++slot) {
      if (word[slot - 1] != gen) continue;
      if (k + ks - 1 > op->max_arity) throw std::out_of_range("derivation: truncation exceeded");
      SparseVec comp = op->compose(k, slot, ks, tag, ts);
      std::vector<int> nw;
      for (int x = 0; x < slot - 1; ++x) nw.push_back(word[x]);
      for (int x : ws) nw.push_back(x);
      for (int x = slot; x < k; ++x) nw.push_back(word[x]);
      for (auto& [t, c] : comp.e) fa.project(k + ks - 1, t, nw, coeff * c, out);
    }
  }

  // pre-Lie product (D1 <| D2): D1 applied to the images of D2
  SparseVec prelie(int w1, int e1, int w2, int e2) const {
    int g1, i1, g2, i2;
    der_decode(w1, e1, g1, i1);
    der_decode(w2, e2, g2, i2);
    int ks, ts, k, tag;
    std::vector<int> ws, word;
    fa.monomial(w1, i1, ks, ts, ws);
    fa.monomial(w2, i2, k, tag, word);
    std::map<int, SparseVec> img;
    substitute(g1, ks, ts, ws, k, tag, word, Rational(1), img);
    SparseVec out;
    auto it = img.find(w1 + w2);
    if (it != img.end()) {
      for (auto& [m, c] : it->second.e) {
        int idx = der_encode(w1 + w2, g2, m);
        if (idx >= 0) out.set(idx, c);
      }
    }
    out.sort_combine();
    return out;
  }

  SparseVec bracket(int w1, int e1, int w2, int e2) const {
    auto key = std::make_tuple(w1, e1, w2, e2);
    {
      std::lock_guard<std::mutex> lk(caches_->mu);
      auto it = caches_->bracket.find(key);
      if (it != caches_->bracket.end()) return it->second;
    }
    SparseVec out = prelie(w1, e1, w2, e2);
    out.axpy(Rational(-1), prelie(w2, e2, w1, e1));
    std::lock_guard<std::mutex> lk(caches_->mu);
    caches_->bracket[key] = out;
    return out;
  }

  // gl(V) element E_{ab} (x_b -> x_a) applied to a fa monomial
  void gl_apply(int a, int b, int w, int j, const Rational& coeff,
                std::map<int, SparseVec>& out) const {
    int k, tag;
    std::vector<int> word;
    fa.monomial(w, j, k, tag, word);
    for (int slot = 0; slot < k; ++slot) {
      if (word[slot] != b) continue;
      std::vector<int> nw = word;
      nw[slot] = a;
      fa.project(k, tag, nw, coeff, out);
    }
  }

  // bracket [E_{ab}, D] on a derivation basis element: E(D(x_i)) - delta_{ib} D(x_a)
  SparseVec gl_bracket(int a, int b, int w, int e) const {
    auto key = std::make_tuple(a, b, w, e);
    {
      std::lock_guard<std::mutex> lk(caches_->mu);
      auto it = caches_->glb.find(key);
      if (it != caches_->glb.end()) return it->second;
    }
    SparseVec out0 = gl_bracket_raw(a, b, w, e);
    std::lock_guard<std::mutex> lk(caches_->mu);
    caches_->glb[key] = out0;
    return out0;
  }
  SparseVec gl_bracket_raw(int a, int b, int w, int e) const {
    int gen, img;
    der_decode(w, e, gen, img);
    SparseVec out;
    std::map<int, SparseVec> t1;
    gl_apply(a, b, w, img, Rational(1), t1);
    auto it = t1.find(w);
    if (it != t1.end()) {
      for (auto& [m, c] : it->second.e) {
        int idx = der_encode(w, gen, m);
        if (idx >= 0) out.set(idx, c);
      }
    }
    if (gen == a) {
      // -(the same image hung on generator b): D(E(x_i)) with E(x_b)=x_a
      int idx = der_encode(w, b, img);
      if (idx >= 0) out.set(idx, Rational(-1));
    }
    out.sort_combine();
    return out;
  }

  // partial derivative of a fa monomial with respect to x_i, envelope coords
  void partial(int w, int j, int i, const Rational& coeff, std::map<int, SparseVec>& out) const {
    int k, tag;
    std::vector<int> word;
    fa.monomial(w, j, k, tag, word);
    for (int slot = 1; slot <= k; ++slot) {
      if (word[slot - 1] != i) continue;
      Perm sigma(k);
      for (int x = 0; x < k; ++x) {
        if (x + 1 < slot)
          sigma[x] = x;
        else if (x + 1 == slot)
          sigma[x] = k - 1;
        else
          sigma[x] = x - 1;
      }
      SparseVec acted = op->act(k, sigma, tag);
      std::vector<int> nw;
      for (int x = 1; x <= k; ++x)
        if (x != slot) nw.push_back(word[x - 1]);
      for (auto& [t, c] : acted.e) ea.project(k - 1, t, nw, coeff * c, out);
    }
  }

  int cq_dim(int w) const {
    auto it = cq.find(w);
    return it == cq.end() ? 0 : static_cast<int>(it->second.keep.size());
  }
  SparseVec cq_project(int w, const SparseVec& v) const {
    auto it = cq.find(w);
    if (it == cq.end()) return {};
    SparseVec r = it->second.rel.reduce(v);
    SparseVec out;
    for (auto& [i, c] : r.e) {
      auto kp = it->second.keep_pos.find(i);
      if (kp == it->second.keep_pos.end())
        throw std::logic_error("cq_project: residual hit the unit class");
      out.e.emplace_back(kp->second, c);
    }
    return out;
  }

  SparseVec divergence(int w, int e) const {
    int gen, img;
    der_decode(w, e, gen, img);
    std::map<int, SparseVec> env;
    partial(w, img, gen, Rational(1), env);
    auto it = env.find(w);
    if (it == env.end()) return {};
    return cq_project(w, it->second);
  }

  // induced action of a derivation basis element on the commutator quotient
  SparseVec dstar(int wD, int e, int wM, int mclass) const {
    int gen, img;
    der_decode(wD, e, gen, img);
    int amb = cq.at(wM).keep[mclass];
    int m, tag;
    std::vector<int> word;
    ea.monomial(wM, amb, m, tag, word);
    int ks, ts;
    std::vector<int> ws;
    fa.monomial(wD, img, ks, ts, ws);
    std::map<int, SparseVec> env;
    for (int slot = 1; slot <= m; ++slot) {
      if (word[slot - 1] != gen) continue;
      if (m + ks > op->max_arity) throw std::out_of_range("dstar: truncation exceeded");
      SparseVec comp = op->compose(m + 1, slot, ks, tag, ts);
      std::vector<int> nw;
      for (int x = 0; x < slot - 1; ++x) nw.push_back(word[x]);
      for (int x : ws) nw.push_back(x);
      for (int x = slot; x < m; ++x) nw.push_back(word[x]);
      for (auto& [t, c] : comp.e) ea.project(m + ks - 1, t, nw, c, env);
    }
    auto it = env.find(wD + wM);
    if (it == env.end()) return {};
    return cq_project(wD + wM, it->second);
  }

  // gl action on the commutator quotient
  SparseVec gl_dstar(int a, int b, int wM, int mclass) const {
    int amb = cq.at(wM).keep[mclass];
    int m, tag;
    std::vector<int> word;
    ea.monomial(wM, amb, m, tag, word);
    std::map<int, SparseVec> env;
    for (int slot = 0; slot < m; ++slot) {
      if (word[slot] != b) continue;
      std::vector<int> nw = word;
      nw[slot] = a;
      ea.project(m, tag, nw, Rational(1), env);
    }
    auto it = env.find(wM);
    if (it == env.end()) return {};
    return cq_project(wM, it->second);
  }

  SparseMat divergence_matrix(int w) const {
    SparseMat m(cq_dim(w), der_dim(w));
    for (int e = 0; e < der_dim(w); ++e) {
      SparseVec d = divergence(w, e);
      for (auto& [r, c] : d.e) m.set(r, e, c);
    }
    m.finish();
    return m;
  }

  std::vector<SparseVec> sder_basis(int w) const { return nullspace(divergence_matrix(w)); }

  // letter content of basis objects, for gl-weight bookkeeping
  std::vector<int> der_content(int w, int e) const {
    int gen, img;
    der_decode(w, e, gen, img);
    int k, tag;
    std::vector<int> word;
    fa.monomial(w, img, k, tag, word);
    std::vector<int> mu(dimv, 0);
    for (int x : word) ++mu[x - 1];
    --mu[gen - 1];
    return mu;
  }
  std::vector<int> cq_content(int w, int mclass) const {
    int amb = cq.at(w).keep[mclass];
    int m, tag;
    std::vector<int> word;
    ea.monomial(w, amb, m, tag, word);
    std::vector<int> mu(dimv, 0);
    for (int x : word) ++mu[x - 1];
    return mu;
  }

private:
  std::map<int, std::vector<int>> images_;
  std::map<int, std::map<int, int>> image_pos_;
  struct Caches {
    std::mutex mu;
    std::map<std::tuple<int, int, int, int>, SparseVec> bracket;
    std::map<std::tuple<int, int, int, int>, SparseVec> glb;
  };
  std::shared_ptr<Caches> caches_ = std::make_shared<Caches>();

  void build_image_lists() {
    for (auto& [w, lst] : fa.basis) {
      std::vector<int> keep;
      for (std::size_t i = 0; i < lst.size(); ++i) {
        int k, tag;
        std::vector<int> word;
        fa.monomial(w, static_cast<int>(i), k, tag, word);
        if (k == 1 && tag == op->unit_tag()) continue;  // bare generator
        keep.push_back(static_cast<int>(i));
      }
      for (std::size_t i = 0; i < keep.size(); ++i) image_pos_[w][keep[i]] = static_cast<int>(i);
      images_[w] = std::move(keep);
    }
  }

  void build_commutator_quotients() {
    int unit = ea.unit_index();
    for (int w = 0; w <= max_weight; ++w) {
      if (ea.dim(w) == 0) continue;
      Cq q;
      q.rel = RowSpan(ea.dim(w));
      for (int w1 = 0; w1 <= w; ++w1) {
        int w2 = w - w1;
        for (int a = 0; a < ea.dim(w1); ++a) {
          if (w1 == 0 && a == unit) continue;
          for (int b = 0; b < ea.dim(w2); ++b) {
            if (w2 == 0 && b == unit) continue;
            std::map<int, SparseVec> ab, ba;
            ea.mult(w1, a, w2, b, Rational(1), ab);
            ea.mult(w2, b, w1, a, Rational(1), ba);
            SparseVec rel;
            auto it = ab.find(w);
            if (it != ab.end()) rel = it->second;
            auto jt = ba.find(w);
            if (jt != ba.end()) rel.axpy(Rational(-1), jt->second);
            if (!rel.empty()) q.rel.insert(rel);
          }
        }
      }
      q.keep.clear();
      for (int c : q.rel.free_columns()) {
        if (w == 0 && c == unit) continue;  // reduced: no unit class
        q.keep.push_back(c);
      }
      for (std::size_t i = 0; i < q.keep.size(); ++i) q.keep_pos[q.keep[i]] = static_cast<int>(i);
      cq[w] = std::move(q);
    }
  }
};

}  // namespace wheelhouse
