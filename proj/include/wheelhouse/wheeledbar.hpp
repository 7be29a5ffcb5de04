#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wheelhouse/chain.hpp"
#include "wheelhouse/cyclic.hpp"
#include "wheelhouse/graphs.hpp"
#include "wheelhouse/species.hpp"

namespace wheelhouse {

namespace graphs {

struct Fragment {
  std::vector<Graph::Vertex> v;
  int root = 0;
  int degree = 0;
  int weight = 0;
};

// order-preserving leaf relabeling of a fragment
inline Fragment relabel(const Fragment& f, const std::vector<int>& leafmap) {
  Fragment g = f;
  for (auto& vx : g.v)
    for (auto& in : vx.in)
      if (in.leaf > 0) in.leaf = leafmap[in.leaf - 1];
  return g;
}

// All rooted trees with suspended ideal labels over {1..size}, memoized by
// (leaf count, exact vertex count). Arity-one labels produce chains, which is
// why the vertex count is part of the recursion.
class TreeEnumerator {
public:
  GraphContext cx;
  int max_degree, max_weight;

  TreeEnumerator(const GraphContext& c, int maxd, int maxw)
      : cx(c), max_degree(maxd), max_weight(maxw) {}

  // trees with exactly d vertices over {1..s}
  const std::vector<Fragment>& exact(int s, int d) {
    auto key = std::make_pair(s, d);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    memo_[key] = {};  // guard
    std::vector<Fragment> out;
    if (d >= 1 && s >= 1) {
      for (int m = 1; m <= s && m <= cx.op->max_arity; ++m) {
        if (cx.op->ideal_dim(m) == 0) continue;
        std::vector<int> leaves(s);
        for (int i = 0; i < s; ++i) leaves[i] = i + 1;
        sp::set_partitions(s, m, [&](const std::vector<std::vector<int>>& blocks) {
          // fill slots with leaves or subtrees using exactly d-1 inner vertices
          std::vector<Graph::Input> inputs(m);
          Fragment acc;
          std::function<void(int, int)> fill = [&](int j, int left) {
            if (acc.weight > max_weight) return;
            if (j == m) {
              if (left != 0) return;
              for (int lab = 0; lab < cx.op->ideal_dim(m); ++lab) {
                Fragment g = acc;
                Graph::Vertex rootv;
                rootv.kind = 0;
                rootv.label = lab;
                rootv.in = inputs;
                g.v.push_back(rootv);
                g.root = static_cast<int>(g.v.size()) - 1;
                g.degree = d;
                g.weight = acc.weight + cx.op->weight(m, cx.op->ideal_tag(m, lab));
                if (g.weight > max_weight) continue;
                out.push_back(std::move(g));
              }
              return;
            }
            const auto& blk = blocks[j];
            if (blk.size() == 1) {
              inputs[j] = Graph::Input{blk[0], -1};
              fill(j + 1, left);
            }
            for (int dj = 1; dj <= left; ++dj) {
              // guard against requesting the in-progress entry
              if (static_cast<int>(blk.size()) == s && dj >= d) break;
              const auto& subs = exact(static_cast<int>(blk.size()), dj);
              for (auto& sub0 : subs) {
                Fragment sub = relabel(sub0, blk);
                std::size_t save = acc.v.size();
                int wsave = acc.weight;
                int off = static_cast<int>(acc.v.size());
                for (auto vx : sub.v) {
                  for (auto& in : vx.in)
                    if (in.child >= 0) in.child += off;
                  acc.v.push_back(vx);
                }
                acc.weight += sub.weight;
                inputs[j] = Graph::Input{0, off + sub.root};
                fill(j + 1, left - dj);
                acc.v.resize(save);
                acc.weight = wsave;
              }
            }
          };
          fill(0, d - 1);
        });
      }
    }
    memo_[key] = std::move(out);
    return memo_[key];
  }

  std::vector<Fragment> over(const std::vector<int>& leaves) {
    std::vector<Fragment> out;
    int s = static_cast<int>(leaves.size());
    for (int d = 1; d <= max_degree; ++d)
      for (auto& f : exact(s, d)) out.push_back(relabel(f, leaves));
    return out;
  }
  std::vector<Fragment> over_size(int s) {
    std::vector<int> leaves(s);
    for (int i = 0; i < s; ++i) leaves[i] = i + 1;
    return over(leaves);
  }

private:
  std::map<std::pair<int, int>, std::vector<Fragment>> memo_;
};

}  // namespace graphs

// Bar and wheeled bar constructions assembled as chain complexes over
// canonical decorated-graph bases.
class WheeledBar {
public:
  GraphContext cx;
  std::shared_ptr<const OperadTable> op;
  std::shared_ptr<WheeledPart> wheeling;
  Truncation trunc;
  ChainComplex operadic;
  ChainComplex wheeled;
  std::map<BlockKey, std::vector<Graph>> tree_basis;
  std::map<BlockKey, std::vector<Graph>> wheel_basis;  // cul-de-sac and wheel graphs

  static WheeledBar build(const std::shared_ptr<const OperadTable>& op, const WheeledPart& wp,
                          const Truncation& t, bool with_actions = false,
                          bool operadic_only = false) {
    WheeledBar b;
    b.op = op;
    b.wheeling = std::make_shared<WheeledPart>(wp);
    b.cx.op = op;
    b.cx.wheeled = b.wheeling.get();
    b.trunc = t;
    if (!op->positively_graded && op->kind != OperadTable::Kind::Alg1)
      throw std::invalid_argument("bar: augmentation ideal must be positively graded");
    b.enumerate(operadic_only);
    b.assemble(b.tree_basis, b.operadic, with_actions);
    if (!operadic_only) b.assemble(b.wheel_basis, b.wheeled, with_actions);
    return b;
  }

  // --- basis enumeration ---
  void enumerate(bool operadic_only) {
    graphs::TreeEnumerator te(cx, trunc.max_degree, trunc.max_weight);
    for (int n = 1; n <= trunc.max_arity; ++n) {
      for (auto& f : te.over_size(n)) {
        Graph g;
        g.shape = Graph::Tree;
        g.nleaves = n;
        g.v = f.v;
        g.root = f.root;
        for (std::size_t i = 0; i < g.v.size(); ++i) g.odd_order.push_back(static_cast<int>(i));
        add_basis(tree_basis, g);
      }
    }
    if (operadic_only) return;
    // cul-de-sac graphs
    if (!wheeling->trivial) {
      for (int n = 0; n <= trunc.max_arity; ++n) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i + 1;
        for (int m = 0; m <= n; ++m) {
          if (wheeling->dim(m) == 0) continue;
          enumerate_zone_bodies(te, all, m, [&](const std::vector<Graph::Input>& inputs,
                                                const std::vector<Graph::Vertex>& subverts,
                                                int deg, int wt) {
            for (int u = 0; u < wheeling->dim(m); ++u) {
              int w = wt + wheeling->tag(m, u).weight;
              if (w > trunc.max_weight || deg > trunc.max_degree) continue;
              Graph g;
              g.shape = Graph::CulDeSac;
              g.nleaves = n;
              g.v = subverts;
              Graph::Vertex cds;
              cds.kind = 2;
              cds.label = u;
              cds.in = inputs;
              g.v.push_back(cds);
              g.root = static_cast<int>(g.v.size()) - 1;
              for (std::size_t i = 0; i < g.v.size(); ++i)
                if (g.v[i].kind != 2) g.odd_order.push_back(static_cast<int>(i));
              add_basis(wheel_basis, g);
            }
          });
        }
      }
    }
    // wheels: cycle of length L, zones of leaves per cycle vertex
    for (int n = 0; n <= trunc.max_arity; ++n) {
      for (int L = 1; L <= trunc.max_degree; ++L) {
        if (L > n && dop::dim(*op, 0) == 0) break;
        std::vector<std::vector<int>> zones(L);
        std::function<void(int)> assign = [&](int x) {
          if (x > n) {
            build_wheel(te, n, zones);
            return;
          }
          for (int z = 0; z < L; ++z) {
            zones[z].push_back(x);
            assign(x + 1);
            zones[z].pop_back();
          }
        };
        assign(1);
      }
    }
  }

  void build_wheel(graphs::TreeEnumerator& te, int n, const std::vector<std::vector<int>>& zones) {
    int L = static_cast<int>(zones.size());
    Graph g;
    g.shape = Graph::Wheel;
    g.nleaves = n;
    std::vector<int> cyc(L, -1);
    std::function<void(int, int, int)> vertex = [&](int z, int deg, int wt) {
      if (deg > trunc.max_degree || wt > trunc.max_weight) return;
      if (z == L) {
        Graph h = g;
        h.cycle = cyc;
        for (std::size_t i = 0; i < h.v.size(); ++i)
          if (h.v[i].kind != 2) h.odd_order.push_back(static_cast<int>(i));
        add_basis(wheel_basis, h);
        return;
      }
      int zn = static_cast<int>(zones[z].size());
      for (int m = 0; m <= zn; ++m) {
        if (dop::dim(*op, m) == 0) continue;
        // bodies over this zone
        enumerate_zone_bodies(te, zones[z], m, [&](const std::vector<Graph::Input>& inputs,
                                                   const std::vector<Graph::Vertex>& subverts,
                                                   int sdeg, int swt) {
          for (int lab = 0; lab < dop::dim(*op, m); ++lab) {
            int wtot = swt + dop::weight(*op, m, lab);
            std::size_t save = g.v.size();
            int off = static_cast<int>(g.v.size());
            for (auto vx : subverts) {
              for (auto& in : vx.in)
                if (in.child >= 0) in.child += off;
              g.v.push_back(vx);
            }
            Graph::Vertex cv;
            cv.kind = 1;
            cv.label = lab;
            cv.in = inputs;
            for (auto& in : cv.in)
              if (in.child >= 0) in.child += off;
            g.v.push_back(cv);
            cyc[z] = static_cast<int>(g.v.size()) - 1;
            vertex(z + 1, deg + sdeg + 1, wt + wtot);
            g.v.resize(save);
            cyc[z] = -1;
          }
        });
      }
    };
    vertex(0, 0, 0);
  }

  void enumerate_zone_bodies(
      graphs::TreeEnumerator& te, const std::vector<int>& zone, int m,
      const std::function<void(const std::vector<Graph::Input>&, const std::vector<Graph::Vertex>&,
                               int, int)>& f) {
    int zn = static_cast<int>(zone.size());
    if (m == 0) {
      if (zn == 0) f({}, {}, 0, 0);
      return;
    }
    if (zn == 0) return;
    sp::set_partitions(zn, m, [&](const std::vector<std::vector<int>>& blocks01) {
      std::vector<std::vector<int>> blocks;
      for (auto& b : blocks01) {
        std::vector<int> bb;
        for (int x : b) bb.push_back(zone[x - 1]);
        blocks.push_back(bb);
      }
      std::vector<Graph::Input> inputs(m);
      std::vector<Graph::Vertex> verts;
      std::function<void(int, int, int)> fill = [&](int j, int deg, int wt) {
        if (deg > trunc.max_degree || wt > trunc.max_weight) return;
        if (j == m) {
          f(inputs, verts, deg, wt);
          return;
        }
        if (blocks[j].size() == 1) {
          inputs[j] = Graph::Input{blocks[j][0], -1};
          fill(j + 1, deg, wt);
        }
        for (auto& sub : te.over(blocks[j])) {
          int off = static_cast<int>(verts.size());
          std::size_t save = verts.size();
          for (auto vx : sub.v) {
            for (auto& in : vx.in)
              if (in.child >= 0) in.child += off;
            verts.push_back(vx);
          }
          inputs[j] = Graph::Input{0, off + sub.root};
          fill(j + 1, deg + sub.degree, wt + sub.weight);
          verts.resize(save);
        }
      };
      fill(0, 0, 0);
    });
  }

  void add_basis(std::map<BlockKey, std::vector<Graph>>& store, const Graph& g) {
    std::vector<graphs::NormalTerm> terms;
    graphs::normalize(cx, g, Rational(1), terms);
    if (terms.empty()) return;  // killed orbit
    if (terms.size() != 1) throw std::logic_error("basis candidate normalized to a combination");
    BlockKey k{g.nleaves, graph_weight(cx, terms[0].graph), terms[0].graph.degree()};
    if (k.w > trunc.max_weight || k.d > trunc.max_degree) return;
    auto& idx = index_[&store == &tree_basis ? 0 : 1][k];
    if (idx.count(terms[0].key)) return;
    idx[terms[0].key] = static_cast<int>(store[k].size());
    store[k].push_back(terms[0].graph);
  }

  // --- differential ---
  void differential_terms(const Graph& g, std::vector<graphs::NormalTerm>& out) const {
    // tree-edge collapses
    for (int u = 0; u < static_cast<int>(g.v.size()); ++u) {
      for (int s = 0; s < static_cast<int>(g.v[u].in.size()); ++s) {
        int c = g.v[u].in[s].child;
        if (c < 0) continue;
        collapse_tree_edge(g, u, s, c, out);
      }
    }
    if (g.shape == Graph::Wheel) {
      int L = static_cast<int>(g.cycle.size());
      if (L >= 2) {
        for (int i = 0; i < L; ++i) collapse_cycle_edge(g, i, out);
      } else if (!wheeling->trivial) {
        erase_loop(g, out);
      }
    }
  }

  SparseMat block_diff(const BlockKey& k, const std::vector<Graph>& basis,
                       const std::map<std::string, int>& below_index, int below_dim) const {
    (void)k;
    SparseMat d(below_dim, static_cast<int>(basis.size()));
    for (std::size_t e = 0; e < basis.size(); ++e) {
      std::vector<graphs::NormalTerm> terms;
      differential_terms(basis[e], terms);
      std::map<int, Rational> acc;
      for (auto& t : terms) {
        auto it = below_index.find(t.key);
        if (it == below_index.end()) throw std::logic_error("differential leaves the basis");
        acc[it->second] += t.coeff;
      }
      for (auto& [r, cfc] : acc)
        if (!cfc.is_zero()) d.set(r, static_cast<int>(e), cfc);
    }
    d.finish();
    return d;
  }

  void assemble(std::map<BlockKey, std::vector<Graph>>& store, ChainComplex& cxx,
                bool with_actions) {
    int which = (&store == &tree_basis) ? 0 : 1;
    for (auto& [k, basis] : store) {
      cxx.dims[k] = static_cast<int>(basis.size());
      std::vector<std::string> keys(basis.size());
      for (auto& [key, id] : index_[which][k]) keys[id] = key;
      cxx.basis_keys[k] = keys;
    }
    for (auto& [k, basis] : store) {
      BlockKey below{k.n, k.w, k.d - 1};
      static const std::map<std::string, int> empty_index;
      const auto& bidx =
          index_[which].count(below) ? index_[which].at(below) : empty_index;
      int bdim = cxx.dims.count(below) ? cxx.dims[below] : 0;
      if (k.d >= 1) cxx.diff[k] = block_diff(k, basis, bidx, bdim);
      // the differential preserves (n, w), so only the degree boundary can
      // cut a block's incoming differential
      if (k.d == trunc.max_degree) cxx.untrusted.insert(k);
    }
    if (with_actions) {
      for (auto& [k, basis] : store) {
        for (int ggen = 0; ggen + 1 < k.n; ++ggen) {
          Perm sigma = perm_transposition(k.n, ggen);
          SparseMat m(static_cast<int>(basis.size()), static_cast<int>(basis.size()));
          for (std::size_t e = 0; e < basis.size(); ++e) {
            Graph h = basis[e];
            for (auto& vx : h.v)
              for (auto& in : vx.in)
                if (in.leaf > 0) in.leaf = sigma[in.leaf - 1] + 1;
            std::vector<graphs::NormalTerm> terms;
            graphs::normalize(cx, h, Rational(1), terms);
            for (auto& t : terms) {
              auto it = index_[which].at(k).find(t.key);
              if (it == index_[which].at(k).end())
                throw std::logic_error("action leaves the basis");
              m.set(it->second, static_cast<int>(e), t.coeff);
            }
          }
          m.finish();
          cxx.gen_action[k][ggen] = std::move(m);
        }
      }
    }
  }

private:
  std::map<BlockKey, std::map<std::string, int>> index_[2];

  static Rational move_to_front_sign(const std::vector<int>& odd, const std::vector<int>& front) {
    // parity of reordering odd -> [front..., rest in order]
    std::vector<int> target = front;
    for (int x : odd) {
      bool skip = false;
      for (int y : front)
        if (x == y) skip = true;
      if (!skip) target.push_back(x);
    }
    std::vector<int> pos(odd.size());
    std::map<int, int> where;
    for (std::size_t i = 0; i < odd.size(); ++i) where[odd[i]] = static_cast<int>(i);
    Perm p(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) p[i] = where[target[i]];
    return Rational(perm_sign(p));
  }

  // removes vertex c, remapping ids; returns the map old -> new
  static Graph remove_vertex(const Graph& g, int c, std::vector<int>& remap) {
    Graph h;
    h.shape = g.shape;
    h.nleaves = g.nleaves;
    remap.assign(g.v.size(), -1);
    for (int u = 0; u < static_cast<int>(g.v.size()); ++u) {
      if (u == c) continue;
      remap[u] = static_cast<int>(h.v.size());
      h.v.push_back(g.v[u]);
    }
    for (auto& vx : h.v)
      for (auto& in : vx.in)
        if (in.child >= 0) in.child = remap[in.child];
    return h;
  }

  void collapse_tree_edge(const Graph& g, int p, int s, int c,
                          std::vector<graphs::NormalTerm>& out) const {
    int mp = static_cast<int>(g.v[p].in.size());
    int mc = static_cast<int>(g.v[c].in.size());
    SparseVec lab;
    if (g.v[p].kind == 0) {
      SparseVec full = op->compose(mp, s + 1, mc, op->ideal_tag(mp, g.v[p].label),
                                   op->ideal_tag(mc, g.v[c].label));
      lab = ideal_vec(full, mp + mc - 1);
    } else if (g.v[p].kind == 1) {
      lab = dop::rho(*op, mp, g.v[p].label, s + 1, mc, op->ideal_tag(mc, g.v[c].label));
    } else {
      lab = wheeling->rho(mp, g.v[p].label, s + 1, mc, op->ideal_tag(mc, g.v[c].label));
    }
    if (lab.empty()) return;
    // sign: bring (p, c) to the front when p is odd, else (c) alone; the
    // cul-de-sac action carries an extra minus so that collapsing into a
    // traced vertex anticommutes with the loop erasure
    std::vector<int> front;
    Rational eps(1);
    if (g.v[p].kind != 2) {
      front = {p, c};
    } else {
      front = {c};
      eps = Rational(-1);
    }
    eps *= move_to_front_sign(g.odd_order, front);
    std::vector<int> remap;
    Graph h = remove_vertex(g, c, remap);
    int np = remap[p];
    // splice c's inputs at slot s
    std::vector<Graph::Input> ni;
    for (int j = 0; j < mp; ++j) {
      if (j == s) {
        for (auto in : g.v[c].in) {
          if (in.child >= 0) in.child = remap[in.child];
          ni.push_back(in);
        }
      } else {
        auto in = g.v[p].in[j];
        if (in.child >= 0) in.child = remap[in.child];
        ni.push_back(in);
      }
    }
    h.v[np].in = ni;
    if (g.shape != Graph::Wheel) h.root = remap[g.root];
    if (g.shape == Graph::Wheel) {
      h.cycle.clear();
      for (int x : g.cycle) h.cycle.push_back(remap[x]);
    }
    // orientation: merged vertex first (if odd), then the rest in old order
    h.odd_order.clear();
    if (g.v[p].kind != 2) h.odd_order.push_back(np);
    for (int x : g.odd_order)
      if (x != p && x != c) h.odd_order.push_back(remap[x]);
    for (auto& [tag, cf] : lab.e) {
      Graph h2 = h;
      h2.v[np].label = tag;
      graphs::normalize(cx, h2, eps * cf, out);
    }
  }

  void collapse_cycle_edge(const Graph& g, int i, std::vector<graphs::NormalTerm>& out) const {
    int L = static_cast<int>(g.cycle.size());
    int fed = g.cycle[i];
    int recv = g.cycle[(i + 1) % L];
    int mr = static_cast<int>(g.v[recv].in.size());
    int mf = static_cast<int>(g.v[fed].in.size());
    SparseVec lab = dop::mu(*op, mr, g.v[recv].label, mf, g.v[fed].label);
    if (lab.empty()) return;
    Rational eps = move_to_front_sign(g.odd_order, {recv, fed});
    std::vector<int> remap;
    Graph h = remove_vertex(g, fed, remap);
    int nr = remap[recv];
    std::vector<Graph::Input> ni = g.v[recv].in;
    for (auto in : g.v[fed].in) ni.push_back(in);
    for (auto& in : ni)
      if (in.child >= 0) in.child = remap[in.child];
    h.v[nr].in = ni;
    h.cycle.clear();
    for (int j = 0; j < L; ++j) {
      int x = g.cycle[(i + 1 + j) % L];
      if (x == fed) continue;
      h.cycle.push_back(remap[x]);
    }
    h.odd_order.clear();
    h.odd_order.push_back(nr);
    for (int x : g.odd_order)
      if (x != recv && x != fed) h.odd_order.push_back(remap[x]);
    for (auto& [tag, cf] : lab.e) {
      Graph h2 = h;
      h2.v[nr].label = tag;
      graphs::normalize(cx, h2, eps * cf, out);
    }
  }

  void erase_loop(const Graph& g, std::vector<graphs::NormalTerm>& out) const {
    int c = g.cycle[0];
    int m = static_cast<int>(g.v[c].in.size());
    SparseVec one;
    one.set(g.v[c].label, Rational(1));
    SparseVec tr = wheeling->trace(m, one);
    if (tr.empty()) return;
    Rational eps = move_to_front_sign(g.odd_order, {c});
    Graph h = g;
    h.shape = Graph::CulDeSac;
    h.cycle.clear();
    h.root = c;
    h.v[c].kind = 2;
    h.odd_order.clear();
    for (int x : g.odd_order)
      if (x != c) h.odd_order.push_back(x);
    for (auto& [u, cf] : tr.e) {
      Graph h2 = h;
      h2.v[c].label = u;
      graphs::normalize(cx, h2, eps * cf, out);
    }
  }

  SparseVec ideal_vec(const SparseVec& full, int n) const {
    if (n != 1) return full;
    SparseVec v;
    for (auto& [a, cf] : full.e) {
      if (a == 0) throw std::logic_error("bar: composite hit the operad unit");
      v.e.emplace_back(a - 1, cf);
    }
    return v;
  }
};

// Operadic bar construction B(O): the tree part alone.
inline WheeledBar build_bar(const std::shared_ptr<const OperadTable>& op, const Truncation& t,
                            bool with_actions = false) {
  WheeledPart wp = trivial_wheeling(op);
  return WheeledBar::build(op, wp, t, with_actions, true);
}

inline WheeledBar build_wheeled_bar(const std::shared_ptr<const OperadTable>& op,
                                    const WheeledPart& wp, const Truncation& t,
                                    bool with_actions = false) {
  return WheeledBar::build(op, wp, t, with_actions, false);
}

// The chain species of one part of a wheeled bar complex (basis graphs with
// their degrees and weights, actions from the stored generator matrices).
// with_unit adjoins the bare-edge component at arity one.
inline ExplicitSpecies chain_species(const ChainComplex& cxx, const std::string& name,
                                     int max_arity, bool with_unit) {
  ExplicitSpecies s(name, max_arity);
  std::map<BlockKey, int> offset;
  if (with_unit && max_arity >= 1) s.add_tag(1, {"unit_edge", 0, 0});
  for (auto& [k, dm] : cxx.dims) {
    if (k.n > max_arity) continue;
    offset[k] = s.dim(k.n);
    for (int i = 0; i < dm; ++i)
      s.add_tag(k.n, {cxx.basis_keys.count(k) ? cxx.basis_keys.at(k)[i]
                                              : k.to_string() + "#" + std::to_string(i),
                      k.d, k.w});
  }
  for (int n = 0; n <= max_arity; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      for (auto& [k, dm] : cxx.dims) {
        if (k.n != n || dm == 0) continue;
        const SparseMat& m = cxx.gen_action.at(k).at(g);
        int off = offset[k];
        for (int r = 0; r < m.rows; ++r)
          for (auto& [c, v] : m.row[r].e) s.gen[n][g].set(off + r, off + c, v);
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// Homology of a complex as an explicit species: representatives per block
// with the induced symmetric group action.
inline ExplicitSpecies homology_species(const ChainComplex& cxx, const std::string& name,
                                        int max_arity, bool with_unit) {
  ExplicitSpecies s(name, max_arity);
  std::map<BlockKey, HomologyBasis> hb;
  std::map<BlockKey, int> offset;
  if (with_unit && max_arity >= 1) s.add_tag(1, {"unit_edge", 0, 0});
  for (auto& [k, dm] : cxx.dims) {
    if (k.n > max_arity) continue;
    HomologyBasis b = HomologyBasis::compute(cxx, k);
    offset[k] = s.dim(k.n);
    for (std::size_t i = 0; i < b.reps.size(); ++i)
      s.add_tag(k.n, {"H" + k.to_string() + "#" + std::to_string(i), k.d, k.w});
    hb[k] = std::move(b);
  }
  for (int n = 0; n <= max_arity; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      for (auto& [k, b] : hb) {
        if (k.n != n || b.reps.empty()) continue;
        const SparseMat& m = cxx.gen_action.at(k).at(g);
        int off = offset[k];
        for (std::size_t i = 0; i < b.reps.size(); ++i) {
          SparseVec img = m.apply(b.reps[i]);
          SparseVec coords = b.express(img);
          for (auto& [r, v] : coords.e) s.gen[n][g].set(off + r, off + static_cast<int>(i), v);
        }
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// coPROP completion blocks: (W_o^{(x) q} (x) S(W_w))(p), dims per (w, d).
// q counts the one-output tensor factors, p is the total arity.
inline std::map<std::pair<int, int>, long long> coprop_block(const ExplicitSpecies& w_o,
                                                             const ExplicitSpecies& w_w, int q,
                                                             int p, const Truncation& t) {
  Truncation tt{p, t.max_weight, t.max_degree};
  TensorPowerSpecies tp = tensor_power(w_o, q, tt);
  ExplicitSpecies sw = sym_all(w_w, tt);
  ExplicitSpecies prod = cauchy(tp.sp, sw, tt);
  std::map<std::pair<int, int>, long long> dims;
  for (auto& tag : prod.comp[p]) ++dims[{tag.weight, tag.degree}];
  return dims;
}

// Theorem pipeline: for an operad with free derivative right module, the
// wheeled bar homology splits as the operadic bar homology plus the shifted
// cyclic homology of the indecomposables.
struct CalchomReport {
  bool freeness = false;
  bool skipped = false;
  bool match = false;
  std::vector<std::string> mismatches;
};

inline CalchomReport calchom_check(const std::shared_ptr<const OperadTable>& op,
                                   const Truncation& t, int jobs = 1) {
  CalchomReport rep;
  Indecomposables ind = indecomposables_zero(op, t.max_arity);
  rep.freeness = freeness_witness(ind, t.max_arity);
  if (!rep.freeness) {
    rep.skipped = true;
    return rep;
  }
  WheeledPart wp = trivial_wheeling(op);
  WheeledBar wb = build_wheeled_bar(op, wp, t, false);
  auto hw = wb.wheeled.homology_dims(jobs);
  TwistedAlgebra a = ind.algebra(t.max_arity);
  Truncation tc{t.max_arity, t.max_weight, t.max_degree};
  CyclicComplex cyc = CyclicComplex::build(a, tc);
  auto hc = cyc.homology(jobs);
  // aggregate by (n, d); compare H_d(wheel part) with HC_{d-1}
  std::map<std::pair<int, int>, long long> left, right;
  std::set<std::pair<int, int>> untrusted;
  for (auto& [k, d] : hw) {
    if (wb.wheeled.untrusted.count(k)) {
      untrusted.insert({k.n, k.d});
      continue;
    }
    if (d) left[{k.n, k.d}] += d;
  }
  for (auto& [k, d] : hc) {
    if (cyc.cx.untrusted.count(k)) {
      untrusted.insert({k.n, k.d + 1});
      continue;
    }
    if (d) right[{k.n, k.d + 1}] += d;
  }
  rep.match = true;
  for (auto& [key, d] : left) {
    if (untrusted.count(key)) continue;
    if (right.count(key) ? right[key] != d : d != 0) {
      rep.match = false;
      rep.mismatches.push_back("n=" + std::to_string(key.first) + " d=" +
                               std::to_string(key.second));
    }
  }
  for (auto& [key, d] : right) {
    if (untrusted.count(key)) continue;
    if (!left.count(key) && d != 0) {
      rep.match = false;
      rep.mismatches.push_back("n=" + std::to_string(key.first) + " d=" +
                               std::to_string(key.second));
    }
  }
  return rep;
}

}  // namespace wheelhouse
