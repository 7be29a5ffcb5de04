#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wheelhouse/envelope.hpp"
#include "wheelhouse/operad.hpp"

namespace wheelhouse {

// Decorated graphs underlying the bar and wheeled bar constructions: rooted
// trees with suspended operad labels, cul-de-sac trees with a wheeled-part
// label on top, and wheels whose cycle vertices carry labels of the
// derivative species (marked slot = incoming cycle edge, stored last).
//
// An element is a graph together with an ordering of its odd (suspended)
// vertices; reordering multiplies by the sign of the permutation. Stored
// basis elements use the canonical traversal order.
struct Graph {
  enum Shape { Tree = 0, CulDeSac = 1, Wheel = 2 };
  struct Input {
    int leaf = 0;    // > 0 when the input is a leaf
    int child = -1;  // >= 0 when the input is an internal edge
  };
  struct Vertex {
    int kind = 0;  // 0 operadic (ideal coords of O(m)), 1 cycle (dop coords), 2 cul-de-sac
    int label = 0;
    std::vector<Input> in;
  };

  int shape = Tree;
  int nleaves = 0;
  std::vector<Vertex> v;
  int root = -1;           // tree root or the cul-de-sac vertex
  std::vector<int> cycle;  // wheel only: cycle[i] output feeds the marked slot of cycle[i+1]
  std::vector<int> odd_order;  // orientation: odd vertices in order

  bool vertex_odd(int i) const { return v[i].kind != 2; }

  int degree() const {
    int d = 0;
    for (auto& vx : v)
      if (vx.kind != 2) ++d;
    return d;
  }
};

// Context for labels: the operad plus the wheeled part for cul-de-sac labels.
struct GraphContext {
  std::shared_ptr<const OperadTable> op;
  const WheeledPart* wheeled = nullptr;

  int label_weight(const Graph::Vertex& vx) const {
    int m = static_cast<int>(vx.in.size());
    switch (vx.kind) {
      case 0:
        return op->weight(m, op->ideal_tag(m, vx.label));
      case 1:
        return dop::weight(*op, m, vx.label);
      default:
        return wheeled->tag(m, vx.label).weight;
    }
  }
  std::string label_key(const Graph::Vertex& vx) const {
    int m = static_cast<int>(vx.in.size());
    switch (vx.kind) {
      case 0:
        return op->tag_key(m, op->ideal_tag(m, vx.label));
      case 1:
        return dop::key(*op, m, vx.label);
      default:
        return "w" + std::to_string(vx.label);
    }
  }
  // species action on a single label, inputs renamed through sigma
  SparseVec label_act(const Graph::Vertex& vx, const Perm& sigma) const {
    int m = static_cast<int>(vx.in.size());
    switch (vx.kind) {
      case 0: {
        SparseVec amb = op->act(m, sigma, op->ideal_tag(m, vx.label));
        SparseVec out;
        for (auto& [a, c] : amb.e) out.e.emplace_back(m == 1 ? a - 1 : a, c);
        return out;
      }
      case 1:
        return dop::act(*op, m, sigma, vx.label);
      default:
        return wheeled->act(m, sigma, vx.label);
    }
  }
};

inline int graph_weight(const GraphContext& cx, const Graph& g) {
  int w = 0;
  for (auto& vx : g.v) w += cx.label_weight(vx);
  return w;
}

namespace graphs {

// minimal leaf reachable through each input of each vertex
inline void min_leaves(const Graph& g, std::vector<int>& vmin) {
  vmin.assign(g.v.size(), 1 << 30);
  // iterate until fixpoint (graphs are small); downward edges only
  std::function<int(int)> down = [&](int u) -> int {
    if (vmin[u] != (1 << 30)) return vmin[u];
    int best = 1 << 30;
    vmin[u] = (1 << 29);  // cycle guard; cycles are handled via tree edges only
    for (auto& in : g.v[u].in) {
      if (in.leaf > 0)
        best = std::min(best, in.leaf);
      else
        best = std::min(best, down(in.child));
    }
    vmin[u] = best;
    return best;
  };
  for (std::size_t u = 0; u < g.v.size(); ++u) down(static_cast<int>(u));
}

struct NormalTerm {
  std::string key;
  Rational coeff;
  Graph graph;  // canonical form
};

// Canonicalizes a graph: sorts every vertex's inputs by minimal leaf (acting
// on labels, which may branch into combinations), chooses the minimal cycle
// rotation, renumbers vertices in traversal order, and computes the
// orientation sign. Killed orbits contribute nothing.
inline void normalize(const GraphContext& cx, const Graph& g0, const Rational& coeff,
                      std::vector<NormalTerm>& out) {
  if (coeff.is_zero()) return;
  // 1. input sorting permutations per vertex
  std::vector<int> vmin;
  min_leaves(g0, vmin);
  auto input_min = [&](const Graph::Input& in) {
    return in.leaf > 0 ? in.leaf : vmin[in.child];
  };
  struct VertexPlan {
    std::vector<int> order;  // sorted positions: order[k] = original position
    Perm sigma;              // label action: slot p renamed sigma[p]
    bool nontrivial = false;
  };
  std::vector<VertexPlan> plan(g0.v.size());
  for (std::size_t u = 0; u < g0.v.size(); ++u) {
    int m = static_cast<int>(g0.v[u].in.size());
    std::vector<int> ord(m);
    for (int i = 0; i < m; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return input_min(g0.v[u].in[a]) < input_min(g0.v[u].in[b]);
    });
    plan[u].order = ord;
    plan[u].sigma.assign(m, 0);
    for (int k = 0; k < m; ++k) plan[u].sigma[ord[k]] = k;
    plan[u].nontrivial = ord != [&] {
      std::vector<int> id(m);
      for (int i = 0; i < m; ++i) id[i] = i;
      return id;
    }();
  }
  // 2. expand label actions
  std::vector<SparseVec> lab(g0.v.size());
  for (std::size_t u = 0; u < g0.v.size(); ++u) {
    if (plan[u].nontrivial) {
      lab[u] = cx.label_act(g0.v[u], plan[u].sigma);
    } else {
      lab[u].set(g0.v[u].label, Rational(1));
    }
  }
  // graph with sorted inputs (labels filled per expansion)
  Graph base = g0;
  for (std::size_t u = 0; u < g0.v.size(); ++u) {
    std::vector<Graph::Input> ni;
    for (int k = 0; k < static_cast<int>(plan[u].order.size()); ++k)
      ni.push_back(g0.v[u].in[plan[u].order[k]]);
    base.v[u].in = std::move(ni);
  }
  // 3. expansion loop
  std::vector<std::pair<int, Rational>> choice(g0.v.size());
  std::function<void(std::size_t, Rational)> emit = [&](std::size_t u, Rational c) {
    if (u < g0.v.size()) {
      for (auto& [tag, cc] : lab[u].e) {
        choice[u] = {tag, cc};
        emit(u + 1, c * cc);
      }
      return;
    }
    Graph h = base;
    for (std::size_t x = 0; x < h.v.size(); ++x) h.v[x].label = choice[x].first;
    // 4. canonical encoding + vertex traversal
    auto enc_vertex = [&](int u2, auto&& self) -> std::string {
      std::string s = "(" + std::to_string(h.v[u2].kind) + ":" + std::to_string(h.v[u2].label) +
                      ";" + std::to_string(h.v[u2].in.size()) + ":";
      for (auto& in : h.v[u2].in) {
        if (in.leaf > 0)
          s += "x" + std::to_string(in.leaf) + ",";
        else
          s += self(in.child, self) + ",";
      }
      return s + ")";
    };
    auto traverse = [&](int start, std::vector<int>& order, auto&& self) -> void {
      order.push_back(start);
      for (auto& in : h.v[start].in)
        if (in.child >= 0) self(in.child, order, self);
    };
    std::string key;
    std::vector<int> new_order;  // vertex ids in canonical traversal order
    Rational extra_sign(1);
    if (h.shape == Graph::Tree) {
      key = "T" + enc_vertex(h.root, enc_vertex);
      traverse(h.root, new_order, traverse);
    } else if (h.shape == Graph::CulDeSac) {
      key = "C" + enc_vertex(h.root, enc_vertex);
      traverse(h.root, new_order, traverse);
    } else {
      int L = static_cast<int>(h.cycle.size());
      // candidate encodings by rotation
      std::string best;
      int best_r = -1;
      std::vector<std::pair<std::string, int>> cands;
      for (int r = 0; r < L; ++r) {
        std::string s = "W[";
        for (int i = 0; i < L; ++i) s += enc_vertex(h.cycle[(r + i) % L], enc_vertex) + ";";
        s += "]";
        cands.push_back({s, r});
        if (best_r < 0 || s < best) {
          best = s;
          best_r = r;
        }
      }
      // orientation order per rotation
      auto order_of = [&](int r) {
        std::vector<int> o;
        for (int i = 0; i < L; ++i) traverse(h.cycle[(r + i) % L], o, traverse);
        return o;
      };
      std::vector<int> best_order = order_of(best_r);
      // stabilizer check: equal encodings with opposite reordering sign kill
      for (auto& [s, r] : cands) {
        if (r == best_r || s != best) continue;
        std::vector<int> alt = order_of(r);
        // parity of the permutation best_order -> alt on odd vertices
        std::vector<int> pos(h.v.size(), -1);
        std::vector<int> bo, ao;
        for (int x : best_order)
          if (h.vertex_odd(x)) bo.push_back(x);
        for (int x : alt)
          if (h.vertex_odd(x)) ao.push_back(x);
        for (std::size_t i2 = 0; i2 < bo.size(); ++i2) pos[bo[i2]] = static_cast<int>(i2);
        Perm p(ao.size());
        for (std::size_t i2 = 0; i2 < ao.size(); ++i2) p[i2] = pos[ao[i2]];
        if (perm_sign(p) < 0) return;  // orbit killed
      }
      key = best;
      new_order = best_order;
    }
    // 5. orientation sign: permutation from h.odd_order to canonical odd order
    std::vector<int> canon_odd;
    for (int x : new_order)
      if (h.vertex_odd(x)) canon_odd.push_back(x);
    std::vector<int> pos(h.v.size(), -1);
    for (std::size_t i2 = 0; i2 < h.odd_order.size(); ++i2) pos[h.odd_order[i2]] = static_cast<int>(i2);
    Perm p(canon_odd.size());
    for (std::size_t i2 = 0; i2 < canon_odd.size(); ++i2) p[i2] = pos[canon_odd[i2]];
    Rational sgn(perm_sign(p));
    // 6. renumber vertices into traversal order for the canonical graph
    std::vector<int> newid(h.v.size(), -1);
    for (std::size_t i2 = 0; i2 < new_order.size(); ++i2) newid[new_order[i2]] = static_cast<int>(i2);
    Graph canon;
    canon.shape = h.shape;
    canon.nleaves = h.nleaves;
    canon.v.resize(new_order.size());
    for (std::size_t i2 = 0; i2 < new_order.size(); ++i2) {
      canon.v[i2] = h.v[new_order[i2]];
      for (auto& in : canon.v[i2].in)
        if (in.child >= 0) in.child = newid[in.child];
    }
    if (h.shape == Graph::Wheel) {
      // rebuild the cycle starting from the canonical rotation
      canon.cycle.clear();
      for (int x : h.cycle) (void)x;
      // cycle vertices are exactly the kind-1 vertices, in traversal order
      // the canonical rotation starts at new_order.front()
      std::vector<int> cyc;
      int L = static_cast<int>(h.cycle.size());
      int start = -1;
      for (int i2 = 0; i2 < L; ++i2)
        if (newid[h.cycle[i2]] == 0) start = i2;
      for (int i2 = 0; i2 < L; ++i2) cyc.push_back(newid[h.cycle[(start + i2) % L]]);
      canon.cycle = cyc;
      canon.root = -1;
    } else {
      canon.root = newid[h.root];
    }
    for (std::size_t i2 = 0; i2 < canon.v.size(); ++i2)
      if (canon.v[i2].kind != 2) canon.odd_order.push_back(static_cast<int>(i2));
    out.push_back({key, coeff * c * sgn * extra_sign, std::move(canon)});
  };
  emit(0, Rational(1));
}

}  // namespace graphs

}  // namespace wheelhouse
