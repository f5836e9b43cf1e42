#include "addspec/addspec.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "addspec/basis.hpp"
#include "addspec/equidist.hpp"
#include "addspec/schema.hpp"

struct as_growth {
  addspec::GrowthFunction fn;
};

struct as_sequence {
  addspec::SequencePrefix seq;
};

namespace {

using addspec::AsError;
using addspec::ErrorCode;
using addspec::Json;

thread_local std::string g_message;
thread_local std::string g_detail;

as_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return AS_EINVAL;
    case ErrorCode::domain: return AS_EDOMAIN;
    case ErrorCode::range: return AS_ERANGE;
    case ErrorCode::hypothesis: return AS_EHYPOTHESIS;
    case ErrorCode::capacity: return AS_ECAPACITY;
    case ErrorCode::nonconvergence: return AS_ENOCONVERGE;
    case ErrorCode::internal: return AS_EINTERNAL;
  }
  return AS_EINTERNAL;
}

template <typename Fn>
as_status guard(Fn&& fn) noexcept {
  try {
    fn();
    g_message.clear();
    g_detail.clear();
    return AS_OK;
  } catch (const AsError& e) {
    g_message = e.what();
    g_detail = e.detail().is_null() ? "" : e.detail().dump();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_message = e.what();
    g_detail.clear();
    return AS_EINTERNAL;
  } catch (...) {
    g_message = "unknown failure";
    g_detail.clear();
    return AS_EINTERNAL;
  }
}

void check(bool ok, const char* what) {
  if (!ok) throw AsError(ErrorCode::invalid_argument, std::string("null ") + what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void emit(char** out, const std::string& s) {
  check(out != nullptr, "output pointer");
  *out = dup_string(s);
}

void emit_json(char** out, const Json& j) { emit(out, j.dump()); }

Json parse_json(const char* text, const char* what) {
  check(text != nullptr, what);
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw AsError(ErrorCode::invalid_argument, std::string("malformed JSON for ") + what,
                  Json{{"parse_error", e.what()}});
  }
}

mpz_class parse_mpz(const char* text, const char* what) {
  check(text != nullptr, what);
  mpz_class z;
  if (z.set_str(text, 10) != 0)
    throw AsError(ErrorCode::invalid_argument, std::string("not a decimal integer: ") + what,
                  Json{{"text", text}});
  return z;
}

addspec::SupersequenceConfig parse_config(const char* opts_json) {
  addspec::SupersequenceConfig cfg;
  if (!opts_json || !*opts_json) return cfg;
  Json j = parse_json(opts_json, "options");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "seed_epsilon") cfg.seed_epsilon = it.value().get<double>();
    else if (key == "verdict_epsilon") cfg.verdict_epsilon = it.value().get<double>();
    else if (key == "stability_delta") cfg.stability_delta = it.value().get<double>();
    else if (key == "stability_grid_max") cfg.stability_grid_max = it.value().get<double>();
    else if (key == "stability_tolerance") cfg.stability_tolerance = it.value().get<double>();
    else if (key == "skip_hypothesis_checks") cfg.skip_hypothesis_checks = it.value().get<bool>();
    else
      throw AsError(ErrorCode::invalid_argument, "unknown option key", Json{{"key", key}});
  }
  return cfg;
}

}  // namespace

extern "C" {

const char* as_last_error(void) { return g_message.c_str(); }

const char* as_last_error_detail(void) { return g_detail.c_str(); }

int as_status_is_precondition(as_status st) {
  return st == AS_EDOMAIN || st == AS_ERANGE || st == AS_EHYPOTHESIS;
}

void as_string_free(char* s) { std::free(s); }

/* ----- growth ----- */

as_status as_growth_parse(const char* text, as_growth** out) {
  return guard([&] {
    check(text != nullptr, "text");
    check(out != nullptr, "output pointer");
    *out = new as_growth{addspec::GrowthFunction::parse(text)};
  });
}

void as_growth_free(as_growth* g) { delete g; }

as_status as_growth_to_json(const as_growth* g, char** out_json) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    emit_json(out_json, g->fn.to_json());
  });
}

as_status as_growth_eval(const as_growth* g, double x, double* out) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    check(out != nullptr, "output pointer");
    *out = g->fn.eval(x);
  });
}

as_status as_growth_eval_log(const as_growth* g, double x, double* out) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    check(out != nullptr, "output pointer");
    *out = g->fn.eval_log(x);
  });
}

as_status as_growth_inverse(const as_growth* g, double y, double* out) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    check(out != nullptr, "output pointer");
    *out = g->fn.inverse(y);
  });
}

as_status as_growth_interpolate_above(const as_growth* g, const double* knots, size_t n,
                                      as_growth** out) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    check(knots != nullptr, "knots");
    check(out != nullptr, "output pointer");
    std::vector<addspec::GrowthFunction::Knot> ks;
    ks.reserve(n);
    for (size_t i = 0; i < n; ++i)
      ks.push_back({static_cast<std::int64_t>(std::llround(knots[2 * i])), knots[2 * i + 1]});
    *out = new as_growth{addspec::interpolate_above(g->fn, ks)};
  });
}

as_status as_growth_stability(const as_growth* g, double delta, double grid_max,
                              double tolerance, char** out_json) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    emit_json(out_json, addspec::probe_stability(g->fn, delta, grid_max, tolerance).to_json());
  });
}

/* ----- sequences ----- */

as_status as_sequence_from_text(const char* text, as_sequence** out) {
  return guard([&] {
    check(text != nullptr, "text");
    check(out != nullptr, "output pointer");
    *out = new as_sequence{addspec::SequencePrefix::from_text(text)};
  });
}

as_status as_sequence_from_json(const char* json, as_sequence** out) {
  return guard([&] {
    check(out != nullptr, "output pointer");
    *out = new as_sequence{addspec::SequencePrefix::from_json(parse_json(json, "sequence"))};
  });
}

as_status as_sequence_from_file(const char* path, as_sequence** out) {
  return guard([&] {
    check(path != nullptr, "path");
    check(out != nullptr, "output pointer");
    *out = new as_sequence{addspec::SequencePrefix::from_file(path)};
  });
}

void as_sequence_free(as_sequence* a) { delete a; }

size_t as_sequence_size(const as_sequence* a) { return a ? a->seq.size() : 0; }

as_status as_sequence_to_json(const as_sequence* a, char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    emit_json(out_json, a->seq.to_json());
  });
}

as_status as_sequence_value(const as_sequence* a, size_t n, char** out) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    emit(out, a->seq.at(n).get_str());
  });
}

as_status as_sequence_counting(const as_sequence* a, const char* y, const char* x,
                               char** out) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    emit(out, a->seq.counting(parse_mpz(y, "y"), parse_mpz(x, "x")).get_str());
  });
}

as_status as_rearrange(const as_sequence* a, const char* sigma_json, as_sequence** out) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    check(out != nullptr, "output pointer");
    addspec::PermutationSpec sigma =
        addspec::PermutationSpec::from_json(parse_json(sigma_json, "sigma"));
    *out = new as_sequence{addspec::rearrange(a->seq, sigma)};
  });
}

as_status as_sort_rearrangement(const as_sequence* a, as_sequence** out_sorted,
                                char** out_sigma_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    auto [sorted, sigma] = addspec::sort_rearrangement(a->seq);
    if (out_sigma_json) emit_json(out_sigma_json, sigma.to_json());
    if (out_sorted) *out_sorted = new as_sequence{std::move(sorted)};
  });
}

as_status as_asymptotic_verdict(const as_sequence* a, const as_growth* f, double epsilon,
                                char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    check(f != nullptr, "growth handle");
    emit_json(out_json, addspec::asymptotic_verdict(a->seq, f->fn, epsilon).to_json());
  });
}

as_status as_density_estimate(const as_sequence* c, const char* x_max, char** out_json) {
  return guard([&] {
    check(c != nullptr, "sequence handle");
    emit_json(out_json,
              addspec::density_estimate(c->seq, parse_mpz(x_max, "x_max")).to_json());
  });
}

/* ----- supersequence ----- */

as_status as_index_schedule(const as_growth* f, const as_growth* g, uint64_t K,
                            uint64_t** out, size_t* out_len) {
  return guard([&] {
    check(f != nullptr, "growth handle");
    check(g != nullptr, "growth handle");
    check(out != nullptr && out_len != nullptr, "output pointer");
    std::vector<std::uint64_t> idx = addspec::index_schedule(f->fn, g->fn, K);
    auto* p = static_cast<uint64_t*>(std::malloc(idx.size() * sizeof(uint64_t)));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, idx.data(), idx.size() * sizeof(uint64_t));
    *out = p;
    *out_len = idx.size();
  });
}

void as_indices_free(uint64_t* p) { std::free(p); }

as_status as_select_from_complement(const as_sequence* excluded, const as_growth* g,
                                    uint64_t N, as_sequence** out_values,
                                    char** out_json) {
  return guard([&] {
    check(excluded != nullptr, "sequence handle");
    check(g != nullptr, "growth handle");
    addspec::ComplementIntegerSet complement(excluded->seq);
    addspec::SelectionResult sel = addspec::select_from_complement(complement, g->fn, N);
    if (out_json)
      emit_json(out_json, Json{{"values", sel.values.to_json()},
                               {"schedule", sel.schedule.to_json()},
                               {"density_lower", sel.density_lower}});
    if (out_values) *out_values = new as_sequence{std::move(sel.values)};
  });
}

as_status as_build_supersequence(const as_sequence* a, const as_growth* f,
                                 const as_growth* g, uint64_t N, const char* opts_json,
                                 as_sequence** out_b, char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    check(f != nullptr, "growth handle");
    check(g != nullptr, "growth handle");
    addspec::SupersequenceResult res =
        addspec::build_supersequence(a->seq, f->fn, g->fn, N, parse_config(opts_json));
    if (out_json) emit_json(out_json, res.to_json());
    if (out_b) *out_b = new as_sequence{std::move(res.b)};
  });
}

as_status as_adversarial(const as_growth* g, const uint64_t* m, size_t m_len,
                         double gamma, char** out_json) {
  return guard([&] {
    check(g != nullptr, "growth handle");
    check(m != nullptr, "m");
    std::vector<std::uint64_t> mv(m, m + m_len);
    emit_json(out_json, addspec::adversarial_construction(g->fn, mv, gamma).to_json());
  });
}

/* ----- basis ----- */

as_status as_sumset(const as_sequence* a, unsigned h, uint64_t x_max, unsigned threads,
                    const char* bitmap_path, char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    addspec::Bitmap bits = addspec::iterated_sumset(a->seq, h, x_max, threads);
    Json j{{"h", h}, {"x_max", x_max}, {"popcount", bits.popcount()}};
    if (bitmap_path) {
      std::ofstream out(bitmap_path, std::ios::binary | std::ios::trunc);
      if (!out)
        throw AsError(ErrorCode::invalid_argument, "cannot open bitmap output",
                      Json{{"path", bitmap_path}});
      std::vector<std::uint8_t> bytes = bits.to_le_bytes();
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
      j["bitmap_path"] = bitmap_path;
    }
    emit_json(out_json, j);
  });
}

as_status as_verify_basis(const as_sequence* a, unsigned h, uint64_t x_max,
                          unsigned threads, char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    emit_json(out_json, addspec::verify_basis(a->seq, h, x_max, threads).to_json());
  });
}

as_status as_counting_inequality(const as_sequence* a, unsigned h, uint64_t x_max,
                                 unsigned threads, int* out_ok) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    check(out_ok != nullptr, "output pointer");
    addspec::CoverageReport rep = addspec::verify_basis(a->seq, h, x_max, threads);
    *out_ok = addspec::check_counting_inequality(a->seq, h, rep) ? 1 : 0;
  });
}

as_status as_eigenvalue_report(const as_sequence* a, unsigned h, uint64_t x_max,
                               unsigned threads, char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    addspec::CoverageReport rep = addspec::verify_basis(a->seq, h, x_max, threads);
    emit_json(out_json, addspec::eigenvalue_report(a->seq, h, rep).to_json());
  });
}

as_status as_synthetic_seed(double alpha, unsigned h, size_t count, uint64_t pad,
                            as_sequence** out) {
  return guard([&] {
    check(out != nullptr, "output pointer");
    *out = new as_sequence{addspec::synthetic_eigen_seed(alpha, h, count, pad)};
  });
}

as_status as_dilute(const as_sequence* a, unsigned h, double alpha, double beta,
                    uint64_t n, uint64_t x_max, const char* opts_json, unsigned threads,
                    char** out_json) {
  return guard([&] {
    check(a != nullptr, "sequence handle");
    emit_json(out_json, addspec::dilute_eigenvalue(a->seq, h, alpha, beta, n, x_max,
                                                   parse_config(opts_json), threads)
                            .to_json());
  });
}

as_status as_spectrum(unsigned h, const double* alphas, size_t n_alphas,
                      unsigned betas_per_alpha, uint64_t n, uint64_t x_max, uint64_t pad,
                      const char* opts_json, unsigned threads, char** out_json) {
  return guard([&] {
    check(alphas != nullptr, "alphas");
    std::vector<double> av(alphas, alphas + n_alphas);
    emit_json(out_json, addspec::run_spectrum_grid(h, av, betas_per_alpha, n, x_max, pad,
                                                   parse_config(opts_json), threads)
                            .to_json());
  });
}

/* ----- equidist ----- */

as_status as_bracket_power(uint64_t u, uint64_t v, uint64_t k, uint64_t* out_floor_n) {
  return guard([&] {
    check(out_floor_n != nullptr, "output pointer");
    *out_floor_n = addspec::bracket_power(u, v, k).floor_n;
  });
}

as_status as_fracpart_compare(uint64_t k, uint64_t u, uint64_t v, uint64_t p, uint64_t q,
                              int* out_cmp) {
  return guard([&] {
    check(out_cmp != nullptr, "output pointer");
    switch (addspec::fracpart_compare(k, u, v, p, q)) {
      case addspec::Ordering::less: *out_cmp = -1; break;
      case addspec::Ordering::equal: *out_cmp = 0; break;
      case addspec::Ordering::greater: *out_cmp = 1; break;
    }
  });
}

as_status as_power_relation(uint64_t u, uint64_t v, char** out_json) {
  return guard([&] { emit_json(out_json, addspec::power_relation(u, v).to_json()); });
}

as_status as_impossibility_scan(uint64_t u, uint64_t v, uint64_t K,
                                const char* trace_path, char** out_json) {
  return guard([&] {
    addspec::TraceSink sink;
    std::ofstream trace;
    if (trace_path) {
      trace.open(trace_path, std::ios::trunc);
      if (!trace)
        throw AsError(ErrorCode::invalid_argument, "cannot open trace output",
                      Json{{"path", trace_path}});
      trace << "k,floor_n,zone\n";
      sink = [&trace](std::uint64_t k, std::uint64_t n, std::string_view zone) {
        trace << k << ',' << n << ',' << zone << '\n';
      };
    }
    emit_json(out_json, addspec::impossibility_scan(u, v, K, sink).to_json());
  });
}

as_status as_rational_witness(uint64_t u, uint64_t v, uint64_t r, uint64_t s, uint64_t K,
                              char** out_json) {
  return guard([&] {
    emit_json(out_json, addspec::rational_case_witness(u, v, r, s, K).to_json());
  });
}

/* ----- schemas ----- */

as_status as_report_schema(const char* subcommand, char** out_json) {
  return guard([&] {
    check(subcommand != nullptr, "subcommand");
    emit_json(out_json, addspec::report_schema(subcommand));
  });
}

as_status as_validate_schema(const char* schema_json, const char* value_json) {
  return guard([&] {
    addspec::validate_schema(parse_json(schema_json, "schema"),
                             parse_json(value_json, "value"));
  });
}

}  // extern "C"
