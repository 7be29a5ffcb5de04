#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "wheelhouse/chain.hpp"
#include "wheelhouse/operad.hpp"
#include "wheelhouse/species.hpp"
#include "wheelhouse/stability.hpp"

namespace wheelhouse {

using nlohmann::json;

// --- species serialization (cache layer format) ------------------------------

inline json species_to_json(const ExplicitSpecies& s) {
  json j;
  j["name"] = s.name;
  j["max_arity"] = s.max_arity;
  json comps = json::array();
  for (int n = 0; n <= s.max_arity; ++n) {
    json cn = json::array();
    for (auto& t : s.comp[n]) cn.push_back({{"key", t.key}, {"degree", t.degree}, {"weight", t.weight}});
    comps.push_back(cn);
  }
  j["components"] = comps;
  json acts = json::array();
  for (int n = 0; n <= s.max_arity; ++n) {
    json an = json::array();
    for (int g = 0; g + 1 < n; ++g) {
      json triplets = json::array();
      const SparseMat& m = s.gen[n][g];
      for (int r = 0; r < m.rows; ++r)
        for (auto& [c, v] : m.row[r].e)
          triplets.push_back({r, c, v.num().to_string(), v.den().to_string()});
      an.push_back(triplets);
    }
    acts.push_back(an);
  }
  j["actions"] = acts;
  return j;
}

inline ExplicitSpecies species_from_json(const json& j) {
  ExplicitSpecies s(j.at("name").get<std::string>(), j.at("max_arity").get<int>());
  const json& comps = j.at("components");
  for (int n = 0; n <= s.max_arity; ++n)
    for (auto& t : comps.at(n))
      s.add_tag(n, {t.at("key").get<std::string>(), t.at("degree").get<int>(),
                    t.at("weight").get<int>()});
  const json& acts = j.at("actions");
  for (int n = 0; n <= s.max_arity; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      for (auto& tr : acts.at(n).at(g)) {
        Rational v(BigInt::from_string(tr.at(2).get<std::string>()),
                   BigInt::from_string(tr.at(3).get<std::string>()));
        s.gen[n][g].set(tr.at(0).get<int>(), tr.at(1).get<int>(), v);
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

// --- operad spec files --------------------------------------------------------

// { "name": "com"|"ass"|"lie"|"prelie"|"alg1", "max_arity": n,
//   "arity1_structure_constants"?: { "ideal_dim": r, "products": [[a,b,c,"num/den"], ...] },
//   "weight_rule"?: [w_1, ..., w_r] }
inline OperadTable operad_from_json(const json& j) {
  std::string name = j.at("name").get<std::string>();
  int maxa = j.at("max_arity").get<int>();
  if (name != "alg1") return OperadTable::builtin(name, maxa);
  Alg1Data data;
  data.name = j.value("label", std::string("custom"));
  const json& sc = j.at("arity1_structure_constants");
  data.ideal_dim = sc.at("ideal_dim").get<int>();
  int r = data.ideal_dim;
  data.prod.assign(r + 1, std::vector<std::vector<std::pair<int, Rational>>>(r + 1));
  for (auto& p : sc.at("products")) {
    int a = p.at(0).get<int>(), b = p.at(1).get<int>(), c = p.at(2).get<int>();
    data.prod[a][b].push_back({c, Rational::from_string(p.at(3).get<std::string>())});
  }
  if (j.count("weight_rule"))
    for (auto& w : j.at("weight_rule")) data.ideal_weight.push_back(w.get<int>());
  else
    data.ideal_weight.assign(r, 1);
  return OperadTable::from_alg1(data, maxa);
}

inline OperadTable operad_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open operad spec: " + path);
  json j;
  in >> j;
  return operad_from_json(j);
}

// --- composition tensor disk cache --------------------------------------------

// cache/<operad-hash>/comp_<n>_<i>_<m>.json, written atomically.
inline void attach_disk_cache(OperadTable& op, const std::string& dir) {
  namespace fs = std::filesystem;
  std::string base = dir + "/" + op.content_hash();
  op.load_hook = [base](int n, int i, int m, SparseMat& out) {
    std::string path =
        base + "/comp_" + std::to_string(n) + "_" + std::to_string(i) + "_" + std::to_string(m) +
        ".json";
    std::ifstream in(path);
    if (!in) return false;
    json j;
    in >> j;
    out = SparseMat(j.at("rows").get<int>(), j.at("cols").get<int>());
    for (auto& tr : j.at("entries"))
      out.set(tr.at(0).get<int>(), tr.at(1).get<int>(),
              Rational(BigInt::from_string(tr.at(2).get<std::string>()),
                       BigInt::from_string(tr.at(3).get<std::string>())));
    out.finish();
    return true;
  };
  op.store_hook = [base](int n, int i, int m, const SparseMat& t) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(base, ec);
    std::string path =
        base + "/comp_" + std::to_string(n) + "_" + std::to_string(i) + "_" + std::to_string(m) +
        ".json";
    json j;
    j["rows"] = t.rows;
    j["cols"] = t.cols;
    json entries = json::array();
    for (int r = 0; r < t.rows; ++r)
      for (auto& [c, v] : t.row[r].e)
        entries.push_back({r, c, v.num().to_string(), v.den().to_string()});
    j["entries"] = entries;
    std::string tmp = path + ".tmp";
    {
      std::ofstream outf(tmp);
      outf << j.dump();
    }
    fs::rename(tmp, path, ec);  // atomic publish
  };
}

// --- homology reports -----------------------------------------------------------

struct ReportBlock {
  int n, w, d;
  std::string part;  // "operadic" | "wheeled" | "total"
  long long dim;
  bool untrusted = false;
  std::vector<std::pair<Partition, long long>> isotypic;
};

struct HomologyReport {
  std::string operad;
  std::string wheeling;  // "", "trivial", "completion"
  std::string algebra;   // "", "der+", "sder+", "semidirect", "cyclic"
  int dimv = -1, p = -1, q = -1;
  Truncation trunc;
  std::vector<ReportBlock> blocks;
};

inline json report_to_json(const HomologyReport& r) {
  json j;
  j["operad"] = r.operad;
  if (!r.wheeling.empty()) j["wheeling"] = r.wheeling;
  if (!r.algebra.empty()) j["algebra"] = r.algebra;
  if (r.dimv >= 0) j["dimV"] = r.dimv;
  if (r.p >= 0) j["p"] = r.p;
  if (r.q >= 0) j["q"] = r.q;
  j["truncation"] = {{"max_arity", r.trunc.max_arity},
                     {"max_weight", r.trunc.max_weight},
                     {"max_degree", r.trunc.max_degree}};
  json blocks = json::array();
  for (auto& b : r.blocks) {
    json jb = {{"n", b.n}, {"w", b.w}, {"d", b.d}, {"part", b.part}, {"dim", b.dim}};
    if (b.untrusted) jb["untrusted"] = true;
    if (!b.isotypic.empty()) {
      json iso = json::array();
      for (auto& [lam, mult] : b.isotypic) {
        json jl = {{"lambda", lam}, {"mult", mult}};
        iso.push_back(jl);
      }
      jb["isotypic"] = iso;
    }
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  return j;
}

inline json comparison_to_json(const ComparisonReport& r) {
  json j;
  j["theorem"] = r.theorem;
  j["operad"] = r.operad;
  j["dimV"] = r.dimv;
  j["pass"] = r.pass;
  json blocks = json::array();
  for (auto& b : r.blocks)
    blocks.push_back({{"w", b.w},
                      {"d", b.d},
                      {"p", b.p},
                      {"q", b.q},
                      {"left_chain", b.left_chain},
                      {"right_chain", b.right_chain},
                      {"left_h", b.left_h},
                      {"right_h", b.right_h},
                      {"in_stable_range", b.in_range},
                      {"match", b.chain_match && b.h_match}});
  j["blocks"] = blocks;
  return j;
}

}  // namespace wheelhouse
