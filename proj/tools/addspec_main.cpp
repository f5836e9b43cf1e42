// addspec: experiment runner for the additive-spectrum toolkit.
//
// Every subcommand prints one JSON report (stdout or --output) that conforms
// to the schema printed by --json-schema.  Exit codes: 0 success, 2 when a
// mathematical precondition fails on the given input, 1 for anything else.

#include "addspec/addspec.h"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

const char* const kSubcommands[] = {"stability",    "rearrange", "supersequence",
                                    "sumset",       "verify-basis", "dilute",
                                    "spectrum",     "impossible", "adversarial"};

struct Str {
  char* p = nullptr;
  ~Str() { as_string_free(p); }
  std::string text() const { return p ? std::string(p) : std::string(); }
};

struct Growth {
  as_growth* p = nullptr;
  ~Growth() { as_growth_free(p); }
};

struct Sequence {
  as_sequence* p = nullptr;
  ~Sequence() { as_sequence_free(p); }
};

Json parse_or_wrap(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) return Json(text);
  return j;
}

int fail_last(as_status st) {
  Json err{{"error", as_last_error()}, {"status", static_cast<int>(st)}};
  std::string detail = as_last_error_detail();
  if (!detail.empty()) err["detail"] = parse_or_wrap(detail);
  std::cerr << err.dump(2) << "\n";
  return as_status_is_precondition(st) ? 2 : 1;
}

int fail_usage(const std::string& msg) {
  std::cerr << Json{{"error", msg}}.dump(2) << "\n";
  return 1;
}

#define TRY(call)                                 \
  do {                                            \
    as_status try_st = (call);                    \
    if (try_st != AS_OK) return fail_last(try_st); \
  } while (0)

struct Global {
  std::string output;
  std::string trace;
  std::int64_t seed = 0;
  unsigned threads = 1;
};

int emit_report(const std::string& sub, const Json& report, const Global& global) {
  Str schema;
  TRY(as_report_schema(sub.c_str(), &schema.p));
  std::string text = report.dump(2);
  TRY(as_validate_schema(schema.p, text.c_str()));
  text += '\n';
  if (global.output.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(global.output, std::ios::binary);
  if (!out) return fail_usage("cannot open output path: " + global.output);
  out << text;
  return 0;
}

// Options shared by build_supersequence and the pipelines wrapping it.
struct SuperOpts {
  double seed_epsilon = 0.1;
  double verdict_epsilon = 0.05;
  double stability_delta = 1.0;
  double stability_grid_max = 1e6;
  double stability_tolerance = 0.01;
  bool skip_hypothesis_checks = false;

  std::string to_json() const {
    return Json{{"seed_epsilon", seed_epsilon},
                {"verdict_epsilon", verdict_epsilon},
                {"stability_delta", stability_delta},
                {"stability_grid_max", stability_grid_max},
                {"stability_tolerance", stability_tolerance},
                {"skip_hypothesis_checks", skip_hypothesis_checks}}
        .dump();
  }
};

void add_super_opts(CLI::App* sub, SuperOpts& o) {
  sub->add_option("--seed-epsilon", o.seed_epsilon, "tolerance for A against f");
  sub->add_option("--verdict-epsilon", o.verdict_epsilon, "tolerance for B against g");
  sub->add_option("--stability-delta", o.stability_delta, "shift used by the stability probe");
  sub->add_option("--stability-grid-max", o.stability_grid_max, "stability probe grid end");
  sub->add_option("--stability-tolerance", o.stability_tolerance, "stability probe tolerance");
  sub->add_flag("--skip-hypothesis-checks", o.skip_hypothesis_checks,
                "run the construction even when hypotheses fail (experiments)");
}

int print_schema(int argc, char** argv) {
  std::string sub;
  for (int i = 1; i < argc; ++i)
    for (const char* name : kSubcommands)
      if (std::string(argv[i]) == name) {
        sub = name;
        break;
      }
  if (sub.empty())
    return fail_usage("--json-schema needs a subcommand (e.g. `addspec impossible --json-schema`)");
  Str schema;
  TRY(as_report_schema(sub.c_str(), &schema.p));
  std::cout << Json::parse(schema.text()).dump(2) << "\n";
  return 0;
}

std::string read_inline_or_file(const std::string& arg) {
  if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return arg;
  std::ifstream in(arg, std::ios::binary);
  if (!in) return arg;  // let the library report the parse failure
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--json-schema") return print_schema(argc, argv);

  CLI::App app{"additive-spectrum toolkit: sumsets, rearrangements, supersequences,\n"
               "and exact power-approximation scans.  Reports are JSON; see --json-schema."};
  // `--h` is a documented option name; keep help on --help only.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Global global;
  app.add_option("--output", global.output, "write the JSON report to this path");
  app.add_option("--trace", global.trace, "CSV trace path (used by `impossible`)");
  app.add_option("--seed", global.seed, "seed echoed into reproducibility logs");
  app.add_option("--threads", global.threads, "worker threads for sumset kernels")
      ->check(CLI::Range(1u, 512u));
  app.add_flag("--json-schema", "print the subcommand's report schema and exit");

  int rc = 0;

  // stability ---------------------------------------------------------------
  struct {
    std::string f;
    double delta = 1.0, grid_max = 1e6, tolerance = 0.01;
  } st;
  auto* stab = app.add_subcommand("stability", "probe a growth function for asymptotic stability");
  stab->fallthrough();
  stab->set_help_flag("--help", "print help and exit");
  stab->add_option("--f", st.f, "growth function (JSON or power:a:h | exp:b | expsqrt:c)")
      ->required();
  stab->add_option("--delta", st.delta, "shift to test");
  stab->add_option("--grid-max", st.grid_max, "geometric grid end")->check(CLI::PositiveNumber);
  stab->add_option("--tolerance", st.tolerance, "tail ratio tolerance")->check(CLI::PositiveNumber);
  stab->callback([&] {
    rc = [&]() -> int {
      Growth f;
      TRY(as_growth_parse(st.f.c_str(), &f.p));
      Str rep;
      TRY(as_growth_stability(f.p, st.delta, st.grid_max, st.tolerance, &rep.p));
      return emit_report("stability", Json::parse(rep.text()), global);
    }();
  });

  // rearrange ---------------------------------------------------------------
  struct {
    std::string a, sigma, g;
    bool sort = false;
    double epsilon = 0.1;
  } re;
  auto* rear = app.add_subcommand("rearrange", "apply a permutation (or sort) to a sequence");
  rear->fallthrough();
  rear->set_help_flag("--help", "print help and exit");
  rear->add_option("--A", re.a, "sequence file (one value per line, or JSON array)")->required();
  auto* sigma_opt = rear->add_option("--sigma", re.sigma, "permutation spec (JSON or path)");
  auto* sort_opt = rear->add_flag("--sort", re.sort, "use the sorting permutation");
  sigma_opt->excludes(sort_opt);
  rear->add_option("--g", re.g, "also report an asymptotic verdict against this growth function");
  rear->add_option("--epsilon", re.epsilon, "verdict tolerance")->check(CLI::PositiveNumber);
  rear->callback([&] {
    rc = [&]() -> int {
      if (!re.sort && re.sigma.empty()) return fail_usage("rearrange needs --sigma or --sort");
      Sequence a;
      TRY(as_sequence_from_file(re.a.c_str(), &a.p));
      Sequence out;
      Json sigma_used;
      if (re.sort) {
        Str sj;
        TRY(as_sort_rearrangement(a.p, &out.p, &sj.p));
        sigma_used = Json::parse(sj.text());
      } else {
        std::string sigma = read_inline_or_file(re.sigma);
        TRY(as_rearrange(a.p, sigma.c_str(), &out.p));
        sigma_used = parse_or_wrap(sigma);
      }
      Str values;
      TRY(as_sequence_to_json(out.p, &values.p));
      Json report{{"values", Json::parse(values.text())}, {"sigma", sigma_used}};
      if (!re.g.empty()) {
        Growth g;
        TRY(as_growth_parse(re.g.c_str(), &g.p));
        Str verdict;
        TRY(as_asymptotic_verdict(out.p, g.p, re.epsilon, &verdict.p));
        report["verdict"] = Json::parse(verdict.text());
      }
      return emit_report("rearrange", report, global);
    }();
  });

  // supersequence -----------------------------------------------------------
  struct {
    std::string f, g, a;
    std::uint64_t n = 0;
    SuperOpts opts;
  } ss;
  auto* super = app.add_subcommand("supersequence",
                                   "embed A into a strictly increasing B tracking g");
  super->fallthrough();
  super->set_help_flag("--help", "print help and exit");
  super->add_option("--f", ss.f, "growth function A tracks")->required();
  super->add_option("--g", ss.g, "growth function B must track")->required();
  super->add_option("--A", ss.a, "sequence file")->required();
  super->add_option("--N", ss.n, "length of B")->required()->check(CLI::PositiveNumber);
  add_super_opts(super, ss.opts);
  super->callback([&] {
    rc = [&]() -> int {
      Growth f, g;
      TRY(as_growth_parse(ss.f.c_str(), &f.p));
      TRY(as_growth_parse(ss.g.c_str(), &g.p));
      Sequence a;
      TRY(as_sequence_from_file(ss.a.c_str(), &a.p));
      Str rep;
      TRY(as_build_supersequence(a.p, f.p, g.p, ss.n, ss.opts.to_json().c_str(), nullptr,
                                 &rep.p));
      return emit_report("supersequence", Json::parse(rep.text()), global);
    }();
  });

  // sumset ------------------------------------------------------------------
  struct {
    std::string a, bitmap;
    unsigned h = 0;
    std::uint64_t x = 0;
  } sm;
  auto* sum = app.add_subcommand("sumset", "h-fold sumset of A on [0, X] (bit-vector kernel)");
  sum->fallthrough();
  sum->set_help_flag("--help", "print help and exit");
  sum->add_option("--A", sm.a, "sequence file")->required();
  sum->add_option("--h", sm.h, "number of summands")->required()->check(CLI::Range(1u, 64u));
  sum->add_option("--X", sm.x, "inclusive upper end")->required();
  sum->add_option("--bitmap", sm.bitmap, "also write the raw little-endian bitmap here");
  sum->callback([&] {
    rc = [&]() -> int {
      Sequence a;
      TRY(as_sequence_from_file(sm.a.c_str(), &a.p));
      Str rep;
      TRY(as_sumset(a.p, sm.h, sm.x, global.threads,
                    sm.bitmap.empty() ? nullptr : sm.bitmap.c_str(), &rep.p));
      return emit_report("sumset", Json::parse(rep.text()), global);
    }();
  });

  // verify-basis ------------------------------------------------------------
  struct {
    std::string a;
    unsigned h = 0;
    std::uint64_t x = 0;
  } vb;
  auto* verify = app.add_subcommand("verify-basis",
                                    "coverage report: is A an asymptotic basis on [0, X]?");
  verify->fallthrough();
  verify->set_help_flag("--help", "print help and exit");
  verify->add_option("--A", vb.a, "sequence file")->required();
  verify->add_option("--h", vb.h, "number of summands")->required()->check(CLI::Range(1u, 64u));
  verify->add_option("--X", vb.x, "inclusive upper end")->required();
  verify->callback([&] {
    rc = [&]() -> int {
      Sequence a;
      TRY(as_sequence_from_file(vb.a.c_str(), &a.p));
      Str rep;
      TRY(as_verify_basis(a.p, vb.h, vb.x, global.threads, &rep.p));
      return emit_report("verify-basis", Json::parse(rep.text()), global);
    }();
  });

  // dilute ------------------------------------------------------------------
  struct {
    std::string a;
    unsigned h = 0;
    double alpha = 0, beta = 0;
    std::uint64_t n = 0, x = 0, pad = 50, seed_count = 0;
    SuperOpts opts;
  } dl;
  auto* dil = app.add_subcommand("dilute",
                                 "thin an eigenvalue-alpha basis down to eigenvalue beta");
  dil->fallthrough();
  dil->set_help_flag("--help", "print help and exit");
  dil->add_option("--alpha", dl.alpha, "eigenvalue of the seed basis")
      ->required()
      ->check(CLI::PositiveNumber);
  dil->add_option("--beta", dl.beta, "target eigenvalue (0 < beta < alpha)")
      ->required()
      ->check(CLI::PositiveNumber);
  dil->add_option("--h", dl.h, "basis order")->required()->check(CLI::Range(1u, 64u));
  dil->add_option("--N", dl.n, "length of the constructed B")->required();
  dil->add_option("--X", dl.x, "sumset window end")->required();
  dil->add_option("--A", dl.a, "seed sequence file (default: synthetic round(alpha k^h) seed)");
  dil->add_option("--pad", dl.pad, "initial segment [0, pad] for the synthetic seed");
  dil->add_option("--seed-count", dl.seed_count, "synthetic seed length (default N)");
  add_super_opts(dil, dl.opts);
  dil->callback([&] {
    rc = [&]() -> int {
      Sequence a;
      if (dl.a.empty()) {
        std::uint64_t count = dl.seed_count ? dl.seed_count : dl.n;
        TRY(as_synthetic_seed(dl.alpha, dl.h, count, dl.pad, &a.p));
      } else {
        TRY(as_sequence_from_file(dl.a.c_str(), &a.p));
      }
      Str rep;
      TRY(as_dilute(a.p, dl.h, dl.alpha, dl.beta, dl.n, dl.x, dl.opts.to_json().c_str(),
                    global.threads, &rep.p));
      return emit_report("dilute", Json::parse(rep.text()), global);
    }();
  });

  // spectrum ----------------------------------------------------------------
  struct {
    unsigned h = 0, betas = 3;
    std::vector<double> alphas;
    std::uint64_t n = 0, x = 0, pad = 50;
    SuperOpts opts;
  } sp;
  auto* spec = app.add_subcommand("spectrum",
                                  "dilution grid: downward-closure evidence for order h");
  spec->fallthrough();
  spec->set_help_flag("--help", "print help and exit");
  spec->add_option("--h", sp.h, "basis order")->required()->check(CLI::Range(1u, 64u));
  spec->add_option("--alphas", sp.alphas, "seed eigenvalues to dilute from")
      ->required()
      ->check(CLI::PositiveNumber);
  spec->add_option("--betas-per-alpha", sp.betas, "equispaced betas below each alpha")
      ->check(CLI::Range(1u, 64u));
  spec->add_option("--N", sp.n, "length of each constructed B")->required();
  spec->add_option("--X", sp.x, "sumset window end")->required();
  spec->add_option("--pad", sp.pad, "initial segment [0, pad] for synthetic seeds");
  add_super_opts(spec, sp.opts);
  spec->callback([&] {
    rc = [&]() -> int {
      Str rep;
      TRY(as_spectrum(sp.h, sp.alphas.data(), sp.alphas.size(), sp.betas, sp.n, sp.x,
                      sp.pad, sp.opts.to_json().c_str(), global.threads, &rep.p));
      return emit_report("spectrum", Json::parse(rep.text()), global);
    }();
  });

  // impossible --------------------------------------------------------------
  struct {
    std::uint64_t u = 0, v = 0, k = 100000;
  } im;
  auto* imp = app.add_subcommand("impossible",
                                 "can powers of v approximate powers of u?  Exact dichotomy");
  imp->fallthrough();
  imp->set_help_flag("--help", "print help and exit");
  imp->add_option("--u", im.u, "target power base (u > v)")->required();
  imp->add_option("--v", im.v, "approximating power base (v >= 2)")->required();
  imp->add_option("--K", im.k, "scan/witness exponent range");
  imp->callback([&] {
    rc = [&]() -> int {
      Str rel;
      TRY(as_power_relation(im.u, im.v, &rel.p));
      Json relation = Json::parse(rel.text());
      Json report{{"u", im.u}, {"v", im.v}, {"relation", relation}};
      std::string kind = relation.at("kind").get<std::string>();
      if (kind == "perfect_power") {
        // u = v^r: b_n = v^n hits every u^k at n = rk.
        report["embedding"] = Json{{"base", im.v}, {"stride", relation.at("r")}};
      } else if (kind == "rational_log") {
        Str wit;
        TRY(as_rational_witness(im.u, im.v, relation.at("r").get<std::uint64_t>(),
                                relation.at("s").get<std::uint64_t>(), im.k, &wit.p));
        report["witness"] = Json::parse(wit.text());
      } else {
        Str scan;
        TRY(as_impossibility_scan(im.u, im.v, im.k,
                                  global.trace.empty() ? nullptr : global.trace.c_str(),
                                  &scan.p));
        report["scan"] = Json::parse(scan.text());
      }
      return emit_report("impossible", report, global);
    }();
  });

  // adversarial -------------------------------------------------------------
  struct {
    std::string g;
    std::uint64_t k = 50;
    std::vector<std::uint64_t> m;
    double gamma = 0.05;
  } ad;
  auto* adv = app.add_subcommand("adversarial",
                                 "growth function with no integer-sequence shadow of g");
  adv->fallthrough();
  adv->set_help_flag("--help", "print help and exit");
  adv->add_option("--g", ad.g, "base growth function (needs exponential growth)")->required();
  adv->add_option("--K", ad.k, "use indices m_k = 1..K");
  adv->add_option("--m", ad.m, "explicit strictly increasing indices (overrides --K)");
  adv->add_option("--gamma", ad.gamma, "growth margin")->check(CLI::PositiveNumber);
  adv->callback([&] {
    rc = [&]() -> int {
      Growth g;
      TRY(as_growth_parse(ad.g.c_str(), &g.p));
      std::vector<std::uint64_t> m = ad.m;
      if (m.empty())
        for (std::uint64_t i = 1; i <= ad.k; ++i) m.push_back(i);
      Str rep;
      TRY(as_adversarial(g.p, m.data(), m.size(), ad.gamma, &rep.p));
      return emit_report("adversarial", Json::parse(rep.text()), global);
    }();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return rc;
}
