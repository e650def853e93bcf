#include "fcl/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fcl/aps.hpp"
#include "fcl/fctl.hpp"
#include "fcl/fltlflat.hpp"
#include "fcl/logic.hpp"
#include "fcl/model.hpp"
#include "fcl/oracle.hpp"
#include "fcl/ph.hpp"

namespace fcl {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  int loop_bound = 16;
  long long horizon = 0;
  std::int64_t domain_bound = 64;
  std::int64_t universal_bound = 0;
  bool exhaustive = false;
  std::string certificate;
  std::uint64_t seed = 0;  // no command draws random numbers yet
  bool quiet = false;
  std::string logic;
  long long position = 0;
  int limit = 1000;
  std::string output;
  std::string formula_path;
  std::vector<std::string> sets;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw UsageError("cannot write " + path);
  o << text;
}

Fragment fragment_by_name(const std::string& s) {
  for (Fragment f : {Fragment::LTL, Fragment::CTL, Fragment::CTLStar, Fragment::FLTL, Fragment::FCTL,
                     Fragment::FCTLStar, Fragment::CLTL, Fragment::CCTL, Fragment::CCTLStar})
    if (s == fragment_name(f)) return f;
  throw UsageError("unknown logic " + s);
}

int exit_for(const std::string& verdict) {
  if (verdict == "True" || verdict == "Holds") return kExitTrue;
  if (verdict == "False" || verdict == "Fails") return kExitFalse;
  return kExitUnknown;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  }
};

int report(std::ostream& out, const std::string& verdict, const std::string& logic, const Timer& t) {
  out << "RESULT " << verdict << " LOGIC " << logic << " TIME " << t.ms() << "\n";
  return exit_for(verdict);
}

PhEvalOptions ph_options(const Flags& fl) {
  PhEvalOptions o;
  o.domain_bound = fl.domain_bound;
  o.universal_bound = fl.universal_bound;
  return o;
}

FltlConfig fltl_config(const Flags& fl) {
  FltlConfig c;
  c.loop_bound = fl.loop_bound;
  c.horizon = fl.horizon;
  c.exhaustive = fl.exhaustive;
  return c;
}

int cmd_check(const Flags& fl, const std::string& ks, const std::string& fp, std::ostream& out) {
  Timer t;
  KripkeStructure k = load_kripke_file(ks);
  FormulaPtr f = parse_formula(read_file(fp));
  Fragment frag = classify_fragment(f);
  if (!fl.logic.empty()) {
    Fragment o = fragment_by_name(fl.logic);
    if (!fragment_leq(frag, o))
      throw UsageError(std::string("logic ") + fragment_name(o) + " is below the formula's fragment " +
                       fragment_name(frag));
    frag = o;
  }
  const std::string logic = fragment_name(frag);
  auto say = [&](const std::string& s) {
    if (!fl.quiet) out << s << "\n";
  };
  std::string verdict;
  switch (frag) {
    case Fragment::LTL:
    case Fragment::FLTL: {
      say("METHOD path-schema search with certificate");
      CheckVerdict v = model_check_fltl_flat(k, f, fltl_config(fl));
      verdict = check_kind_name(v.kind);
      if (v.kind == CheckKind::Holds) {
        say("RUN " + lasso_to_string(k, v.run));
        if (!fl.certificate.empty()) {
          write_file(fl.certificate, aps_to_text(k, v.certificate, f));
          say("CERTIFICATE " + fl.certificate);
        }
      }
      if (!v.diagnostics.empty()) say(v.diagnostics);
      break;
    }
    case Fragment::CTL:
    case Fragment::FCTL: {
      say("METHOD counter-system labelling");
      verdict = model_check_fctl(k, f).holds ? "True" : "False";
      break;
    }
    case Fragment::CTLStar:
    case Fragment::FCTLStar: {
      say("METHOD nested path-schema search");
      verdict = verdict_name(model_check_fctl_star_flat(k, f, fltl_config(fl)).verdict);
      break;
    }
    case Fragment::CLTL:
    case Fragment::CCTL:
    case Fragment::CCTLStar: {
      say("SEMI-DECISION (bounded PH)");
      CctlBoundedResult r = check_cctl_bounded(k, f, ph_options(fl));
      verdict = verdict_name(r.verdict);
      say("PH size " + std::to_string(r.sentence_size) + ", steps " + std::to_string(r.stats.steps) +
          ", domain bound " + std::to_string(fl.domain_bound));
      if (r.stats.budget_exhausted) say("step budget exhausted");
      break;
    }
  }
  if (!fl.certificate.empty() && frag != Fragment::LTL && frag != Fragment::FLTL)
    say("no certificate for " + logic);
  return report(out, verdict, logic, t);
}

int cmd_flatness(const std::string& ks, std::ostream& out) {
  KripkeStructure k = load_kripke_file(ks);
  FlatnessResult r = is_flat(k);
  out << "FLAT " << (r.flat ? "true" : "false") << "\n";
  if (!r.flat) {
    auto path = [&](const SimpleLoop& l) {
      std::string s;
      for (int v : l.path) s += (s.empty() ? "" : " ") + k.name(v);
      return s;
    };
    out << "LOOPS at " << k.name(r.state) << ": " << path(r.first) << " | " << path(r.second) << "\n";
  }
  return r.flat ? kExitTrue : kExitFalse;
}

int cmd_schemas(const Flags& fl, const std::string& ks, std::ostream& out) {
  KripkeStructure k = load_kripke_file(ks);
  if (!is_flat(k).flat) throw NotFlat("structure is not flat");
  int n = 0;
  bool more = false;
  for_each_path_schema(k, k.initial(), [&](const PathSchemaSkeleton& sk) {
    if (n == fl.limit) {
      more = true;
      return false;
    }
    out << skeleton_to_string(k, sk) << "\n";
    ++n;
    return true;
  });
  out << "SCHEMAS " << n << (more ? " (limit reached)" : "") << "\n";
  return kExitTrue;
}

int cmd_eval_lasso(const Flags& fl, const std::string& ks, const std::string& lp, const std::string& fp,
                   std::ostream& out) {
  Timer t;
  KripkeStructure k = load_kripke_file(ks);
  LassoRun run = parse_lasso(k, read_file(lp));
  FormulaPtr f = parse_formula(read_file(fp));
  Verdict v = eval_linear(k, run, f, fl.position, {}, fl.horizon > 0 ? fl.horizon : 200);
  return report(out, verdict_name(v), fragment_name(classify_fragment(f)), t);
}

int cmd_verify_aps(const Flags& fl, const std::string& ks, const std::string& ap, std::ostream& out) {
  Timer t;
  KripkeStructure k = load_kripke_file(ks);
  ParsedAps p = parse_aps(k, read_file(ap));
  FormulaPtr f = fl.formula_path.empty() ? p.formula : parse_formula(read_file(fl.formula_path));
  if (!f) throw UsageError("the certificate names no formula; pass --formula");
  CertificateCheck c = verify_certificate(k, f, p.aps);
  if (!fl.quiet)
    for (const auto& d : c.diagnostics) out << d << "\n";
  return report(out, c.ok ? "True" : "False", fragment_name(classify_fragment(f)), t);
}

int cmd_encode_ph(const Flags& fl, const std::string& ks, const std::string& fp, std::ostream& out) {
  KripkeStructure k = load_kripke_file(ks);
  FormulaPtr f = parse_formula(read_file(fp));
  PhEncoding e = encode_cctls_to_ph(k, f);
  std::string text = ph_to_text(e.sentence, e.defs);
  if (fl.output.empty())
    out << text;
  else
    write_file(fl.output, text);
  return kExitTrue;
}

int cmd_ph2cltl(const std::string& pp, std::ostream& out) {
  ParsedPh p = parse_ph(read_file(pp));
  CltlTranslation tr = translate_ph_to_cltl(ph_expand(p.formula, p.defs));
  out << tr.k.to_text() << "formula: " << to_string(tr.formula) << "\n";
  return kExitTrue;
}

int cmd_ph_eval(const Flags& fl, const std::string& pp, std::ostream& out) {
  Timer t;
  ParsedPh p = parse_ph(read_file(pp));
  std::map<std::string, std::int64_t> env;
  for (const auto& s : fl.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects name=value, got " + s);
    try {
      std::size_t used = 0;
      long long v = std::stoll(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1 || v < 0) throw std::invalid_argument(s);
      env[s.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw UsageError("--set expects a natural value, got " + s);
    }
  }
  if (!fl.quiet) out << "SEMI-DECISION (bounded PH)\n";
  PhEvalOptions opt = ph_options(fl);
  Verdict v;
  if (env.empty() && ph_free_vars(p.formula).empty()) {
    PhSat s = sat_ph_bounded(p.formula, p.defs, opt);
    v = s.verdict;
    if (!fl.quiet)
      for (const auto& [x, val] : s.witness) out << "WITNESS " << x << " = " << val << "\n";
  } else {
    v = eval_ph(p.formula, p.defs, env, opt);
  }
  return report(out, verdict_name(v), "PH", t);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model checking with frequency and counting constraints", "fcl"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags fl;
  app.add_option("--seed", fl.seed, "Random seed (recorded; every command is deterministic)");
  app.add_option("--loop-bound", fl.loop_bound, "Largest loop count tried per loop")->check(CLI::PositiveNumber);
  app.add_option("--horizon", fl.horizon, "Evaluation horizon (0 picks a sufficient one)")->check(CLI::NonNegativeNumber);
  app.add_option("--domain-bound", fl.domain_bound, "Search bound for PH quantifiers")->check(CLI::PositiveNumber);
  app.add_option("--universal-bound", fl.universal_bound, "Search bound for refuting PH quantifiers (0 = derived)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--exhaustive", fl.exhaustive, "Exhaust the run space before reporting Fails");
  app.add_flag("-q,--quiet", fl.quiet, "Print only the RESULT line");

  std::string a, b, c;
  auto* check = app.add_subcommand("check", "Model check a formula on a Kripke structure");
  check->add_option("structure", a)->required();
  check->add_option("formula", b)->required();
  check->add_option("--logic", fl.logic, "Treat the formula as belonging to this (larger) logic");
  check->add_option("--certificate", fl.certificate, "Write the certificate here when one is produced");

  auto* flat = app.add_subcommand("flatness", "Decide whether a structure is flat");
  flat->add_option("structure", a)->required();

  auto* schemas = app.add_subcommand("schemas", "List path schemas from the initial state");
  schemas->add_option("structure", a)->required();
  schemas->add_option("--limit", fl.limit, "Stop after this many")->check(CLI::PositiveNumber);

  auto* lasso = app.add_subcommand("eval-lasso", "Evaluate a linear formula on a lasso run");
  lasso->add_option("structure", a)->required();
  lasso->add_option("lasso", b)->required();
  lasso->add_option("formula", c)->required();
  lasso->add_option("--position", fl.position, "Position to evaluate at")->check(CLI::NonNegativeNumber);

  auto* vaps = app.add_subcommand("verify-aps", "Check a certificate (augmented path schema)");
  vaps->add_option("structure", a)->required();
  vaps->add_option("certificate", b)->required();
  vaps->add_option("--formula", fl.formula_path, "Formula file overriding the certificate header");

  auto* enc = app.add_subcommand("encode-ph", "Encode a CCTL* model checking instance into PH");
  enc->add_option("structure", a)->required();
  enc->add_option("formula", b)->required();
  enc->add_option("-o,--output", fl.output, "Output file");

  auto* tocltl = app.add_subcommand("ph2cltl", "Translate a PH sentence into CLTL");
  tocltl->add_option("ph", a)->required();

  auto* pheval = app.add_subcommand("ph-eval", "Evaluate a PH formula within bounds");
  pheval->add_option("ph", a)->required();
  pheval->add_option("--set", fl.sets, "Value of a free variable, name=value");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(fl, a, b, out);
    if (flat->parsed()) return cmd_flatness(a, out);
    if (schemas->parsed()) return cmd_schemas(fl, a, out);
    if (lasso->parsed()) return cmd_eval_lasso(fl, a, b, c, out);
    if (vaps->parsed()) return cmd_verify_aps(fl, a, b, out);
    if (enc->parsed()) return cmd_encode_ph(fl, a, b, out);
    if (tocltl->parsed()) return cmd_ph2cltl(a, out);
    if (pheval->parsed()) return cmd_ph_eval(fl, a, out);
  } catch (const NotFlat& e) {
    err << "error: NotFlat: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fcl
