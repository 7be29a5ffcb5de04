#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wheelhouse/cyclic.hpp"
#include "wheelhouse/json_io.hpp"

namespace wheelhouse {

// Batch front end. Subcommands: bar, wbar, hc, ce, compare, mult. Identical
// configurations produce byte-identical output. Exit codes: 0 success,
// 1 invalid configuration, 2 failed assertion (d^2 != 0, a stable-range
// mismatch, or a theorem-check failure).
struct RunConfig {
  std::string subcommand;
  std::string operad = "com";
  std::string spec_file;
  std::string wheeling = "trivial";
  std::string algebra = "der+";
  std::string theorem = "main1";
  std::string format = "text";
  std::string out_path;
  std::string cache_dir;
  bool no_cache = false;
  bool isotypic = false;
  bool invariants = false;
  int max_arity = 4;
  int max_weight = -1;
  int max_degree = -1;
  int dimv = 3;
  int p = 0, q = 0;
  int weight = -1;
  int max_coeff = 2;
  int jobs = 1;
  std::string alpha, beta;
  std::string report_dir;
};

namespace cli_detail {

inline std::string csv_quote(const std::string& s) {
  bool need = s.find_first_of(",\"\n") != std::string::npos;
  if (!need) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

inline std::string pad(const std::string& s, std::size_t width) {
  std::string r = s;
  while (r.size() < width) r += ' ';
  return r;
}

inline std::string render_report(const HomologyReport& rep, const std::string& format) {
  if (format == "json") return report_to_json(rep).dump(2) + "\n";
  std::ostringstream os;
  if (format == "csv") {
    os << "n,w,d,part,dim,untrusted\n";
    for (auto& b : rep.blocks)
      os << b.n << "," << b.w << "," << b.d << "," << csv_quote(b.part) << "," << b.dim << ","
         << (b.untrusted ? "1" : "0") << "\n";
    return os.str();
  }
  os << "operad: " << rep.operad;
  if (!rep.wheeling.empty()) os << "  wheeling: " << rep.wheeling;
  if (!rep.algebra.empty()) os << "  algebra: " << rep.algebra;
  if (rep.dimv >= 0) os << "  dimV: " << rep.dimv;
  if (rep.p >= 0) os << "  p: " << rep.p << "  q: " << rep.q;
  os << "\n";
  os << pad("n", 4) << pad("w", 4) << pad("d", 4) << pad("part", 10) << pad("dim", 8)
     << "isotypic\n";
  for (auto& b : rep.blocks) {
    os << pad(std::to_string(b.n), 4) << pad(std::to_string(b.w), 4)
       << pad(std::to_string(b.d), 4) << pad(b.part, 10) << pad(std::to_string(b.dim), 8);
    std::string iso;
    for (auto& [lam, mult] : b.isotypic) {
      if (!iso.empty()) iso += " ";
      iso += partition_to_string(lam) + ":" + std::to_string(mult);
    }
    os << iso;
    if (b.untrusted) os << "  [untrusted]";
    os << "\n";
  }
  return os.str();
}

inline std::string render_comparison(const ComparisonReport& rep, const std::string& format) {
  if (format == "json") return comparison_to_json(rep).dump(2) + "\n";
  std::ostringstream os;
  if (format == "csv") {
    os << "w,d,p,q,left_chain,right_chain,left_h,right_h,in_stable_range,match\n";
    for (auto& b : rep.blocks)
      os << b.w << "," << b.d << "," << b.p << "," << b.q << "," << b.left_chain << ","
         << b.right_chain << "," << b.left_h << "," << b.right_h << "," << b.in_range << ","
         << (b.chain_match && b.h_match) << "\n";
    os << "pass," << rep.pass << "\n";
    return os.str();
  }
  os << "theorem: " << rep.theorem << "  operad: " << rep.operad << "  dimV: " << rep.dimv
     << "\n";
  os << pad("w", 4) << pad("d", 4) << pad("p", 4) << pad("q", 4) << pad("chain L/R", 14)
     << pad("H L/R", 12) << "range\n";
  for (auto& b : rep.blocks) {
    os << pad(std::to_string(b.w), 4) << pad(std::to_string(b.d), 4)
       << pad(std::to_string(b.p), 4) << pad(std::to_string(b.q), 4)
       << pad(std::to_string(b.left_chain) + "/" + std::to_string(b.right_chain), 14)
       << pad(std::to_string(b.left_h) + "/" + std::to_string(b.right_h), 12)
       << (b.in_range ? "stable" : "-");
    if (b.in_range && !(b.chain_match && b.h_match)) os << "  MISMATCH";
    os << "\n";
  }
  os << (rep.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

inline void fill_isotypic(const ChainComplex& cx, const std::string& part,
                          std::vector<ReportBlock>& blocks, bool isotypic, int jobs) {
  auto h = cx.homology_dims(jobs);
  std::map<int, std::vector<IsotypicReport>> iso;
  if (isotypic) {
    std::set<int> arities;
    for (auto& [k, dm] : cx.dims)
      if (dm) arities.insert(k.n);
    for (int n : arities)
      if (n >= 1) iso[n] = cx.isotypic_homology(n, jobs);
  }
  for (auto& [k, dim] : h) {
    if (dim == 0 && !cx.dims.count(k)) continue;
    ReportBlock b{k.n, k.w, k.d, part, dim, cx.untrusted.count(k) > 0, {}};
    if (isotypic && iso.count(k.n)) {
      for (auto& rep : iso[k.n]) {
        auto it = rep.multiplicity.find({k.w, k.d});
        if (it != rep.multiplicity.end() && it->second)
          b.isotypic.push_back({rep.lambda, it->second});
      }
    }
    if (b.dim || !b.isotypic.empty()) blocks.push_back(b);
  }
}

}  // namespace cli_detail

// Runs the tool; output goes to `sink` (or --out), diagnostics to stderr.
inline int run_cli(const std::vector<std::string>& args, std::ostream& sink) {
  using namespace cli_detail;
  std::ostringstream out;
  RunConfig cfg;
  CLI::App app{"wheelhouse: exact homology of operadic bar constructions and derivation Lie algebras"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--operad", cfg.operad, "builtin operad: com|ass|lie|prelie");
    sub->add_option("--spec", cfg.spec_file, "operad spec file (JSON)");
    sub->add_option("--max-arity", cfg.max_arity, "arity truncation");
    sub->add_option("--max-weight", cfg.max_weight, "weight truncation");
    sub->add_option("--max-degree", cfg.max_degree, "degree truncation");
    sub->add_option("--format", cfg.format, "text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--out", cfg.out_path, "write output to a file");
    sub->add_option("--jobs", cfg.jobs, "worker threads for block-level tasks");
    sub->add_option("--cache", cfg.cache_dir, "composition tensor cache directory");
    sub->add_flag("--no-cache", cfg.no_cache, "disable the disk cache");
  };
  CLI::App* bar = app.add_subcommand("bar", "operadic bar homology");
  add_common(bar);
  bar->add_flag("--isotypic", cfg.isotypic, "isotypic multiplicities per arity");
  CLI::App* wbar = app.add_subcommand("wbar", "wheeled bar homology");
  add_common(wbar);
  wbar->add_option("--wheeling", cfg.wheeling, "trivial|completion")
      ->check(CLI::IsMember({"trivial", "completion"}));
  wbar->add_flag("--isotypic", cfg.isotypic, "isotypic multiplicities per arity");
  CLI::App* hc = app.add_subcommand("hc", "cyclic homology of the derivative indecomposables");
  add_common(hc);
  CLI::App* ce = app.add_subcommand("ce", "Chevalley-Eilenberg homology");
  add_common(ce);
  ce->add_option("--algebra", cfg.algebra, "der+|sder+|semidirect")
      ->check(CLI::IsMember({"der+", "sder+", "semidirect"}));
  ce->add_option("--dimv", cfg.dimv, "number of generators");
  ce->add_option("--p", cfg.p, "contravariant coefficient slots");
  ce->add_option("--q", cfg.q, "covariant coefficient slots");
  ce->add_flag("--invariants", cfg.invariants, "restrict to gl(V)-invariants");
  CLI::App* cmp = app.add_subcommand("compare", "theorem verification harness");
  add_common(cmp);
  cmp->add_option("--theorem", cfg.theorem, "main1|main2|newfuchs|lqt|calchom")
      ->check(CLI::IsMember({"main1", "main2", "newfuchs", "lqt", "calchom"}));
  cmp->add_option("--dimv", cfg.dimv, "number of generators");
  cmp->add_option("--weight", cfg.weight, "single weight (newfuchs)");
  cmp->add_option("--max-coeff", cfg.max_coeff, "bound on coefficient slots");
  cmp->add_option("--report-dir", cfg.report_dir, "write <theorem>_<operad>.json and .txt here");
  CLI::App* mult = app.add_subcommand("mult", "representation stability multiplicities");
  add_common(mult);
  mult->add_option("--alpha", cfg.alpha, "partition for the tensor factors, e.g. 1,1");
  mult->add_option("--beta", cfg.beta, "partition for the arity, e.g. 2,1");
  mult->add_option("--wheeling", cfg.wheeling, "trivial|completion");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    std::stringstream ss;
    int code = app.exit(e, ss, ss);
    sink << ss.str();
    return code == 0 ? 0 : 1;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    // resolve the operad
    std::shared_ptr<OperadTable> op;
    int need_arity = std::max(cfg.max_arity + 2, 4);
    if (cfg.subcommand == "ce" || cfg.subcommand == "compare")
      need_arity = std::max({cfg.max_weight + 2, cfg.max_coeff + 2, 4});
    if (!cfg.spec_file.empty()) {
      op = std::make_shared<OperadTable>(operad_from_file(cfg.spec_file));
    } else {
      if (cfg.operad == "prelie") need_arity = std::min(need_arity, 6);
      op = std::make_shared<OperadTable>(OperadTable::builtin(cfg.operad, need_arity));
    }
    const char* env_cache = std::getenv("WHEELHOUSE_CACHE");
    if (!cfg.no_cache) {
      if (!cfg.cache_dir.empty())
        attach_disk_cache(*op, cfg.cache_dir);
      else if (env_cache && *env_cache)
        attach_disk_cache(*op, env_cache);
    }
    int mw = cfg.max_weight >= 0 ? cfg.max_weight : cfg.max_arity;
    int md = cfg.max_degree >= 0 ? cfg.max_degree : cfg.max_arity + 1;
    Truncation t{cfg.max_arity, mw, md};

    if (cfg.subcommand == "bar") {
      WheeledBar wb = build_bar(op, t, cfg.isotypic);
      if (wb.operadic.d_squared_offender()) return 2;
      HomologyReport rep;
      rep.operad = op->name;
      rep.trunc = t;
      fill_isotypic(wb.operadic, "operadic", rep.blocks, cfg.isotypic, cfg.jobs);
      out << render_report(rep, cfg.format);
    } else if (cfg.subcommand == "wbar") {
      WheeledPart wp = cfg.wheeling == "completion"
                           ? wheeled_completion_part(op, t.max_arity)
                           : trivial_wheeling(op);
      WheeledBar wb = build_wheeled_bar(op, wp, t, cfg.isotypic);
      if (wb.operadic.d_squared_offender() || wb.wheeled.d_squared_offender()) return 2;
      HomologyReport rep;
      rep.operad = op->name;
      rep.wheeling = cfg.wheeling;
      rep.trunc = t;
      fill_isotypic(wb.operadic, "operadic", rep.blocks, cfg.isotypic, cfg.jobs);
      fill_isotypic(wb.wheeled, "wheeled", rep.blocks, cfg.isotypic, cfg.jobs);
      out << render_report(rep, cfg.format);
    } else if (cfg.subcommand == "hc") {
      Indecomposables ind = indecomposables_zero(op, t.max_arity);
      TwistedAlgebra a = ind.algebra(t.max_arity);
      CyclicComplex cyc = CyclicComplex::build(a, t);
      HomologyReport rep;
      rep.operad = op->name;
      rep.algebra = "cyclic";
      rep.trunc = t;
      auto h = cyc.homology(cfg.jobs);
      for (auto& [k, dim] : h)
        if (dim) rep.blocks.push_back({k.n, k.w, k.d, "cyclic", dim,
                                       cyc.cx.untrusted.count(k) > 0, {}});
      out << render_report(rep, cfg.format);
    } else if (cfg.subcommand == "ce") {
      int ce_w = cfg.max_weight >= 0 ? cfg.max_weight : 2;
      int ce_d = cfg.max_degree >= 0 ? cfg.max_degree : 3;
      auto dl = std::make_shared<DerLie>(DerLie::build(op, cfg.dimv, ce_w));
      CEComplex::Algebra alg = cfg.algebra == "sder+"
                                   ? CEComplex::SDerPlus
                                   : cfg.algebra == "semidirect" ? CEComplex::Semidirect
                                                                 : CEComplex::DerPlus;
      HomologyReport rep;
      rep.operad = op->name;
      rep.algebra = cfg.algebra;
      rep.dimv = cfg.dimv;
      rep.p = cfg.p;
      rep.q = cfg.q;
      rep.trunc = Truncation{0, ce_w, ce_d};
      if (cfg.invariants) {
        CEComplex ce2 = CEComplex::build_for_invariants(dl, alg, cfg.p, cfg.q, ce_w, ce_d);
        auto inv = ce2.invariant_complex(cfg.jobs);
        if (inv.cx.d_squared_offender()) return 2;
        auto h = inv.cx.homology_dims(cfg.jobs);
        for (auto& [k, dim] : h)
          if (dim) rep.blocks.push_back({k.n, k.w, k.d, "invariant", dim, false, {}});
      } else {
        CEComplex ce2 = CEComplex::build(dl, alg, cfg.p, cfg.q, ce_w, ce_d);
        if (ce2.cx.d_squared_offender()) return 2;
        auto h = ce2.homology(cfg.jobs);
        for (auto& [k, dim] : h)
          if (dim) rep.blocks.push_back({k.n, k.w, k.d, "full", dim, false, {}});
      }
      out << render_report(rep, cfg.format);
    } else if (cfg.subcommand == "compare") {
      if (cfg.theorem == "calchom") {
        CalchomReport rep = calchom_check(op, t, cfg.jobs);
        json j = {{"theorem", "calchom"},
                  {"operad", op->name},
                  {"freeness", rep.freeness},
                  {"skipped", rep.skipped},
                  {"match", rep.match},
                  {"mismatches", rep.mismatches}};
        if (cfg.format == "json")
          out << j.dump(2) << "\n";
        else
          out << "calchom " << op->name << ": freeness=" << (rep.freeness ? "yes" : "no")
              << (rep.skipped ? " SKIPPED (hypothesis unmet)"
                              : (rep.match ? " PASS" : " FAIL"))
              << "\n";
        {
          int code = rep.skipped ? 0 : (rep.match ? 0 : 2);
          if (!cfg.out_path.empty()) {
            std::ofstream f(cfg.out_path);
            f << out.str();
          } else {
            sink << out.str();
          }
          return code;
        }
      }
      if (cfg.theorem == "newfuchs") {
        int r = cfg.weight >= 0 ? cfg.weight : 1;
        auto dl = std::make_shared<DerLie>(DerLie::build(op, cfg.dimv, r));
        CEComplex ce2 = CEComplex::build(dl, CEComplex::DerPlus, 0, 0, r, r + 1);
        auto h = ce2.homology(cfg.jobs);
        bool pass = true;
        std::ostringstream table;
        for (int d = 0; d <= r + 1; ++d) {
          BlockKey k{0, r, d};
          long long dim = h.count(k) ? h[k] : 0;
          table << "H^(" << r << ")_" << d << " = " << dim << "\n";
          bool in_range = cfg.dimv > r + 2 * d;
          if (d != r && dim != 0 && in_range) pass = false;
        }
        out << "newfuchs " << op->name << " dimV=" << cfg.dimv << " r=" << r << "\n"
            << table.str() << (pass ? "PASS" : "FAIL") << "\n";
        if (!cfg.out_path.empty()) {
          std::ofstream f(cfg.out_path);
          f << out.str();
        } else {
          sink << out.str();
        }
        return pass ? 0 : 2;
      }
      if (cfg.theorem == "lqt") {
        // stable gl homology of the arity-one operad against the coPROP block
        if (op->kind != OperadTable::Kind::Alg1) {
          std::cerr << "error: lqt expects an arity-one operad (use --spec)\n";
          return 1;
        }
        Truncation tt{1, std::max(6, md), std::max(6, md)};
        WheeledBar wb = build_wheeled_bar(op, trivial_wheeling(op), tt, true);
        ExplicitSpecies h_o = homology_species(wb.operadic, "Ho", 1, true);
        ExplicitSpecies h_w = homology_species(wb.wheeled, "Hw", 0, false);
        auto dims = coprop_block(h_o, h_w, 0, 0, Truncation{0, tt.max_weight, md});
        auto dl = std::make_shared<DerLie>(DerLie::build(op, cfg.dimv, 0));
        CEComplex ce2 = CEComplex::build(dl, CEComplex::DerPlus, 0, 0, 0, md);
        auto h = ce2.homology(cfg.jobs);
        bool pass = true;
        out << "lqt " << op->name << " dimV=" << cfg.dimv << "\n";
        for (int d = 0; d + 1 <= md; ++d) {
          long long left = h.count(BlockKey{0, 0, d}) ? h[BlockKey{0, 0, d}] : 0;
          long long right = 0;
          for (auto& [wd, v] : dims)
            if (wd.second == d) right += v;
          bool in_range = cfg.dimv > d;
          out << "d=" << d << " lie=" << left << " coprop=" << right
              << (in_range ? " stable" : " -") << "\n";
          if (in_range && left != right) pass = false;
        }
        out << (pass ? "PASS" : "FAIL") << "\n";
        if (!cfg.out_path.empty()) {
          std::ofstream f(cfg.out_path);
          f << out.str();
        } else {
          sink << out.str();
        }
        return pass ? 0 : 2;
      }
      CompareOptions opt;
      opt.max_weight = mw;
      opt.max_degree = md;
      opt.max_coeff = cfg.max_coeff;
      opt.jobs = cfg.jobs;
      for (int pp = 0; pp <= cfg.max_coeff; ++pp)
        for (int qq = 0; qq <= pp; ++qq) opt.coeffs.push_back({pp, qq});
      ComparisonReport rep = cfg.theorem == "main2" ? compare_main2(op, cfg.dimv, opt)
                                                    : compare_main1(op, cfg.dimv, opt);
      out << render_comparison(rep, cfg.format);
      if (!cfg.report_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.report_dir, ec);
        std::string stem = cfg.report_dir + "/" + rep.theorem + "_" + op->name;
        std::ofstream(stem + ".json") << comparison_to_json(rep).dump(2) << "\n";
        std::ofstream(stem + ".txt") << render_comparison(rep, "text");
      }
      if (!cfg.out_path.empty()) {
        std::ofstream f(cfg.out_path);
        f << out.str();
      } else {
        sink << out.str();
      }
      return rep.pass ? 0 : 2;
    } else if (cfg.subcommand == "mult") {
      Partition alpha = parse_partition(cfg.alpha);
      Partition beta = parse_partition(cfg.beta);
      int arity = std::max(partition_sum(beta), 1);
      Truncation tt{arity, mw, md};
      WheeledPart wp = cfg.wheeling == "completion" ? wheeled_completion_part(op, arity)
                                                    : trivial_wheeling(op);
      WheeledBar wb = build_wheeled_bar(op, wp, tt, true);
      ExplicitSpecies h_o = homology_species(wb.operadic, "Ho", arity, true);
      ExplicitSpecies h_w = homology_species(wb.wheeled, "Hw", arity, false);
      auto mults = repstab_multiplicities(h_o, h_w, alpha, beta, tt);
      if (cfg.format == "json") {
        json j;
        j["operad"] = op->name;
        j["alpha"] = alpha;
        j["beta"] = beta;
        json rows = json::array();
        for (auto& [wd, v] : mults) rows.push_back({{"w", wd.first}, {"d", wd.second}, {"mult", v}});
        j["multiplicities"] = rows;
        out << j.dump(2) << "\n";
      } else {
        out << "mult " << op->name << " alpha=" << partition_to_string(alpha)
            << " beta=" << partition_to_string(beta) << "\n";
        out << pad("w", 4) << pad("d", 4) << "mult\n";
        for (auto& [wd, v] : mults)
          out << pad(std::to_string(wd.first), 4) << pad(std::to_string(wd.second), 4) << v
              << "\n";
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) {
      std::cerr << "error: cannot write " << cfg.out_path << "\n";
      return 1;
    }
    f << out.str();
  } else {
    sink << out.str();
  }
  return 0;
}

inline int run_cli_to(const std::vector<std::string>& args, std::string& output) {
  std::ostringstream os;
  int code = run_cli(args, os);
  output = os.str();
  return code;
}

}  // namespace wheelhouse
