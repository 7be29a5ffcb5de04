#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wheelhouse/celie.hpp"
#include "wheelhouse/wheeledbar.hpp"

namespace wheelhouse {

// Side-by-side verification of the stable-isomorphism statements: invariant
// Chevalley-Eilenberg blocks of derivation Lie algebras against coPROP
// completions of wheeled bar constructions, blockwise at desk scale.
struct ComparisonBlock {
  int w = 0, d = 0, p = 0, q = 0;
  long long left_chain = 0, right_chain = 0;
  long long left_h = 0, right_h = 0;
  bool in_range = false;
  bool chain_match = false, h_match = false;
};

struct ComparisonReport {
  std::string theorem;
  std::string operad;
  int dimv = 0;
  std::vector<ComparisonBlock> blocks;
  bool pass = true;
};

struct CompareOptions {
  int max_weight = 3;
  int max_degree = 4;
  int max_coeff = 3;  // bound on p
  std::vector<std::pair<int, int>> coeffs;  // (p, q) list
  int jobs = 1;
};

namespace stability_detail {

inline void run_side_by_side(ComparisonReport& rep, const std::shared_ptr<DerLie>& dl,
                             CEComplex::Algebra alg, const ExplicitSpecies& chain_o,
                             const ExplicitSpecies& chain_w, const ExplicitSpecies& h_o,
                             const ExplicitSpecies& h_w, const CompareOptions& opt,
                             bool need_weight_range) {
  for (auto& [p, q] : opt.coeffs) {
    CEComplex ce = CEComplex::build_for_invariants(dl, alg, p, q, opt.max_weight, opt.max_degree);
    auto inv = ce.invariant_complex(opt.jobs);
    auto left_h = inv.cx.homology_dims(opt.jobs);
    Truncation t{p, opt.max_weight, opt.max_degree};
    std::map<std::pair<int, int>, long long> right_chain = coprop_block(chain_o, chain_w, q, p, t);
    std::map<std::pair<int, int>, long long> right_h = coprop_block(h_o, h_w, q, p, t);
    std::map<std::pair<int, int>, long long> left_chain;
    for (auto& [k, dimn] : inv.cx.dims)
      if (dimn) left_chain[{k.w, k.d}] = dimn;
    std::set<std::pair<int, int>> keys;
    for (auto& [wd, v] : right_chain) keys.insert(wd);
    for (auto& [wd, v] : left_chain) keys.insert(wd);
    for (auto& [k, v] : left_h)
      if (v) keys.insert({k.w, k.d});
    for (auto& [wd, v] : right_h)
      if (v) keys.insert(wd);
    for (auto& [w, d] : keys) {
      if (w > opt.max_weight || d > opt.max_degree) continue;
      ComparisonBlock b;
      b.w = w;
      b.d = d;
      b.p = p;
      b.q = q;
      b.in_range = dl->dimv > d + p;
      // the divergence-free comparison also needs surjectivity of the
      // divergence up to the weight, so use the conservative bound
      if (need_weight_range && dl->dimv <= w) b.in_range = false;
      b.left_chain = left_chain.count({w, d}) ? left_chain[{w, d}] : 0;
      b.right_chain = right_chain.count({w, d}) ? right_chain[{w, d}] : 0;
      BlockKey bk{0, w, d};
      b.left_h = left_h.count(bk) ? left_h[bk] : 0;
      b.right_h = right_h.count({w, d}) ? right_h[{w, d}] : 0;
      b.chain_match = b.left_chain == b.right_chain;
      b.h_match = b.left_h == b.right_h;
      if (b.in_range && (!b.chain_match || !b.h_match)) rep.pass = false;
      rep.blocks.push_back(b);
    }
  }
}

}  // namespace stability_detail

// Theorem of the first kind: invariant CE complexes of Der^+(O(V)) against
// the coPROP completion of the wheeled bar construction with zero traces.
inline ComparisonReport compare_main1(const std::shared_ptr<const OperadTable>& op, int dimv,
                                      const CompareOptions& opt) {
  ComparisonReport rep;
  rep.theorem = "main1";
  rep.operad = op->name;
  rep.dimv = dimv;
  auto dl = std::make_shared<DerLie>(DerLie::build(op, dimv, opt.max_weight));
  int arity = opt.max_coeff;
  Truncation bt{arity, std::max(arity, opt.max_weight), std::max(arity, opt.max_degree) + 1};
  WheeledBar wb = build_wheeled_bar(op, trivial_wheeling(op), bt, true);
  ExplicitSpecies chain_o = chain_species(wb.operadic, "To", arity, true);
  ExplicitSpecies chain_w = chain_species(wb.wheeled, "Tw", arity, false);
  ExplicitSpecies h_o = homology_species(wb.operadic, "Ho", arity, true);
  ExplicitSpecies h_w = homology_species(wb.wheeled, "Hw", arity, false);
  stability_detail::run_side_by_side(rep, dl, CEComplex::DerPlus, chain_o, chain_w, h_o, h_w,
                                     opt, false);
  return rep;
}

// Theorem of the second kind: the semidirect dg Lie algebra against the
// wheeled bar construction of the wheeled completion.
inline ComparisonReport compare_main2(const std::shared_ptr<const OperadTable>& op, int dimv,
                                      const CompareOptions& opt) {
  ComparisonReport rep;
  rep.theorem = "main2";
  rep.operad = op->name;
  rep.dimv = dimv;
  auto dl = std::make_shared<DerLie>(DerLie::build(op, dimv, opt.max_weight));
  int arity = opt.max_coeff;
  Truncation bt{arity, std::max(arity, opt.max_weight), std::max(arity, opt.max_degree) + 1};
  WheeledPart wp = wheeled_completion_part(op, arity);
  WheeledBar wb = build_wheeled_bar(op, wp, bt, true);
  ExplicitSpecies chain_o = chain_species(wb.operadic, "To", arity, true);
  ExplicitSpecies chain_w = chain_species(wb.wheeled, "Tw", arity, false);
  ExplicitSpecies h_o = homology_species(wb.operadic, "Ho", arity, true);
  ExplicitSpecies h_w = homology_species(wb.wheeled, "Hw", arity, false);
  stability_detail::run_side_by_side(rep, dl, CEComplex::Semidirect, chain_o, chain_w, h_o, h_w,
                                     opt, true);
  return rep;
}

// Uniform mixed representation stability multiplicities: the coinvariants of
// a coPROP block against a pair of irreducibles. alpha indexes the tensor
// factors (the one-output components), beta the total arity.
inline std::map<std::pair<int, int>, long long> repstab_multiplicities(
    const ExplicitSpecies& h_o, const ExplicitSpecies& h_w, const Partition& alpha,
    const Partition& beta, const Truncation& t) {
  int q = partition_sum(alpha);
  int p = partition_sum(beta);
  Truncation tt{p, t.max_weight, t.max_degree};
  TensorPowerSpecies tp = tensor_power(h_o, q, tt);
  ExplicitSpecies sw = sym_all(h_w, tt);
  ExplicitSpecies prod = cauchy(tp.sp, sw, tt);
  int dim = prod.dim(p);
  if (dim == 0) return {};
  // factor-swap matrices transported to the product
  std::vector<SparseMat> swaps;
  for (int j = 0; j + 1 < q; ++j) {
    SparseMat m(dim, dim);
    for (int e = 0; e < dim; ++e) {
      // parse the cauchy key: find the tensor-factor part
      const std::string& key = prod.comp[p][e].key;
      auto bar1 = key.find('|');
      auto bar2 = key.rfind('|');
      std::string skey = key.substr(0, bar1);
      std::string akey = key.substr(bar1 + 1, bar2 - bar1 - 1);
      std::string bkey = key.substr(bar2 + 1);
      // arity of the tensor-power part: count the letters in its blocks
      int ka = 0;
      for (char c : akey)
        if (c == '{') ++ka;
      // find the factor tag
      int arity_a = -1, tag_a = -1;
      for (int n = 0; n <= tp.sp.max_arity && tag_a < 0; ++n) {
        int f = tp.sp.find(n, akey);
        if (f >= 0) {
          arity_a = n;
          tag_a = f;
        }
      }
      (void)ka;
      if (tag_a < 0) throw std::logic_error("repstab: tensor factor not found");
      const SparseMat& sw_m = tp.factor_swap[arity_a][j];
      for (int r = 0; r < sw_m.rows; ++r) {
        Rational c = sw_m.get(r, tag_a);
        if (c.is_zero()) continue;
        std::string nkey = skey + "|" + tp.sp.comp[arity_a][r].key + "|" + bkey;
        int target = prod.find(p, nkey);
        if (target < 0) throw std::logic_error("repstab: swapped element not found");
        m.set(target, e, c);
      }
    }
    m.finish();
    swaps.push_back(std::move(m));
  }
  auto perm_matrix = [&](const Perm& sigma, bool factor) -> SparseMat {
    if (!factor) return prod.act(p, sigma);
    auto word = perm_reduced_word(sigma);
    SparseMat m = SparseMat::identity(dim);
    for (auto w = word.rbegin(); w != word.rend(); ++w) m = SparseMat::mul(swaps[*w], m);
    return m;
  };
  // characters over the two symmetric groups
  auto& tabp = CharacterTables::get(p);
  auto& tabq = CharacterTables::get(q);
  long long pfact = 1, qfact = 1;
  for (int i = 2; i <= p; ++i) pfact *= i;
  for (int i = 2; i <= q; ++i) qfact *= i;
  int ai = -1, bi = -1;
  for (std::size_t i = 0; i < tabq.parts.size(); ++i)
    if (tabq.parts[i] == alpha) ai = static_cast<int>(i);
  for (std::size_t i = 0; i < tabp.parts.size(); ++i)
    if (tabp.parts[i] == beta) bi = static_cast<int>(i);
  if ((q > 0 && ai < 0) || (p > 0 && bi < 0)) throw std::invalid_argument("repstab: bad partition");
  std::map<std::pair<int, int>, Rational> acc;
  Perm sp0 = perm_identity(p);
  std::vector<Perm> perms_p, perms_q;
  {
    Perm x = perm_identity(p);
    do perms_p.push_back(x);
    while (std::next_permutation(x.begin(), x.end()));
    Perm y = perm_identity(q);
    do perms_q.push_back(y);
    while (std::next_permutation(y.begin(), y.end()));
  }
  for (auto& sigma : perms_p) {
    long long chi_b = 1;
    if (p > 0) {
      Partition ct = cycle_type(sigma);
      for (std::size_t c = 0; c < tabp.parts.size(); ++c)
        if (tabp.parts[c] == ct) chi_b = tabp.chi[bi][c];
    }
    if (chi_b == 0) continue;
    SparseMat ms = perm_matrix(sigma, false);
    for (auto& tau : perms_q) {
      long long chi_a = 1;
      if (q > 0) {
        Partition ct = cycle_type(tau);
        for (std::size_t c = 0; c < tabq.parts.size(); ++c)
          if (tabq.parts[c] == ct) chi_a = tabq.chi[ai][c];
      }
      if (chi_a == 0) continue;
      SparseMat mt = perm_matrix(tau, true);
      SparseMat mm = SparseMat::mul(ms, mt);
      // trace per (w, d) graded piece
      for (int e = 0; e < dim; ++e) {
        Rational diag = mm.get(e, e);
        if (diag.is_zero()) continue;
        auto& tag = prod.comp[p][e];
        acc[{tag.weight, tag.degree}] += Rational(chi_a * chi_b) * diag;
      }
    }
  }
  std::map<std::pair<int, int>, long long> out;
  for (auto& [k, v] : acc) {
    Rational m = v / Rational(pfact * qfact);
    if (!m.is_integer()) throw std::logic_error("repstab: non-integral multiplicity");
    long long val = m.num().to_int64();
    if (val < 0) throw std::logic_error("repstab: negative multiplicity");
    if (val) out[k] = val;
  }
  return out;
}

}  // namespace wheelhouse
