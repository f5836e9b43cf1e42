/* C interface to the additive-spectrum toolkit.
 *
 * Conventions:
 *   - Every fallible call returns an as_status; AS_OK means success.
 *   - On failure, as_last_error() / as_last_error_detail() describe the
 *     problem for the calling thread until its next library call.
 *   - Strings returned through char** are heap-allocated; release them with
 *     as_string_free().  Reports are JSON documents.
 *   - Handles are opaque; free them with the matching *_free().
 */
#ifndef ADDSPEC_H
#define ADDSPEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum as_status {
  AS_OK = 0,
  AS_EINVAL = 1,       /* malformed argument */
  AS_EDOMAIN = 2,      /* input outside a function's domain */
  AS_ERANGE = 3,       /* requested value outside the reachable range */
  AS_EHYPOTHESIS = 4,  /* a mathematical precondition fails on this input */
  AS_ECAPACITY = 5,    /* configured size/memory guard exceeded */
  AS_ENOCONVERGE = 6,  /* iteration cap reached */
  AS_EINTERNAL = 7     /* invariant breach; a bug, not an input problem */
} as_status;

/* Message and JSON detail of this thread's last failure ("" when none). */
const char* as_last_error(void);
const char* as_last_error_detail(void);

/* 1 when the status reports a violated mathematical precondition
 * (AS_EDOMAIN, AS_ERANGE, AS_EHYPOTHESIS) — the CLI maps these to exit 2. */
int as_status_is_precondition(as_status st);

void as_string_free(char* s);

typedef struct as_growth as_growth;
typedef struct as_sequence as_sequence;

/* ----- growth functions ----- */

/* Accepts JSON ({"kind":"power","alpha":2,"h":2}, ...) or the shorthand
 * "power:alpha:h" | "exp:base" | "expsqrt:rate". */
as_status as_growth_parse(const char* text, as_growth** out);
void as_growth_free(as_growth* g);
as_status as_growth_to_json(const as_growth* g, char** out_json);
as_status as_growth_eval(const as_growth* g, double x, double* out);
as_status as_growth_eval_log(const as_growth* g, double x, double* out);
as_status as_growth_inverse(const as_growth* g, double y, double* out);
/* knots: k1,lambda1,k2,lambda2,... (2*n doubles, integer k strictly rising) */
as_status as_growth_interpolate_above(const as_growth* g, const double* knots,
                                      size_t n, as_growth** out);
as_status as_growth_stability(const as_growth* g, double delta, double grid_max,
                              double tolerance, char** out_json);

/* ----- sequences ----- */

as_status as_sequence_from_text(const char* text, as_sequence** out);
as_status as_sequence_from_json(const char* json, as_sequence** out);
as_status as_sequence_from_file(const char* path, as_sequence** out);
void as_sequence_free(as_sequence* a);
size_t as_sequence_size(const as_sequence* a);
as_status as_sequence_to_json(const as_sequence* a, char** out_json);
/* Decimal value of a_n (1-based). */
as_status as_sequence_value(const as_sequence* a, size_t n, char** out);
/* Distinct values in [y, x]; y, x, result are decimal strings. */
as_status as_sequence_counting(const as_sequence* a, const char* y, const char* x,
                               char** out);

/* sigma_json: {"kind":"explicit","map":[...]} | {"kind":"swaps","pairs":[[i,j],...]}
 * | {"kind":"powerswap"} */
as_status as_rearrange(const as_sequence* a, const char* sigma_json, as_sequence** out);
as_status as_sort_rearrangement(const as_sequence* a, as_sequence** out_sorted,
                                char** out_sigma_json);
as_status as_asymptotic_verdict(const as_sequence* a, const as_growth* f,
                                double epsilon, char** out_json);
/* x_max: decimal string. */
as_status as_density_estimate(const as_sequence* c, const char* x_max, char** out_json);

/* ----- supersequence construction ----- */

as_status as_index_schedule(const as_growth* f, const as_growth* g, uint64_t K,
                            uint64_t** out, size_t* out_len);
void as_indices_free(uint64_t* p);

as_status as_select_from_complement(const as_sequence* excluded, const as_growth* g,
                                    uint64_t N, as_sequence** out_values,
                                    char** out_json);

/* opts_json (NULL for defaults): {"seed_epsilon":0.1,"verdict_epsilon":0.05,
 * "stability_delta":1,"stability_grid_max":1e6,"stability_tolerance":0.01,
 * "skip_hypothesis_checks":false} */
as_status as_build_supersequence(const as_sequence* a, const as_growth* f,
                                 const as_growth* g, uint64_t N, const char* opts_json,
                                 as_sequence** out_b, char** out_json);

/* m: strictly increasing indices (m_len >= 1). */
as_status as_adversarial(const as_growth* g, const uint64_t* m, size_t m_len,
                         double gamma, char** out_json);

/* ----- sumsets and basis verification ----- */

/* Report {"h","x_max","popcount"}; when bitmap_path is non-NULL the h-fold
 * sumset bit-vector is also written there (little-endian, bit i = byte i/8,
 * bit i%8) and the path is echoed in the report. */
as_status as_sumset(const as_sequence* a, unsigned h, uint64_t x_max, unsigned threads,
                    const char* bitmap_path, char** out_json);
as_status as_verify_basis(const as_sequence* a, unsigned h, uint64_t x_max,
                          unsigned threads, char** out_json);
as_status as_counting_inequality(const as_sequence* a, unsigned h, uint64_t x_max,
                                 unsigned threads, int* out_ok);
as_status as_eigenvalue_report(const as_sequence* a, unsigned h, uint64_t x_max,
                               unsigned threads, char** out_json);
as_status as_synthetic_seed(double alpha, unsigned h, size_t count, uint64_t pad,
                            as_sequence** out);
as_status as_dilute(const as_sequence* a, unsigned h, double alpha, double beta,
                    uint64_t n, uint64_t x_max, const char* opts_json, unsigned threads,
                    char** out_json);
as_status as_spectrum(unsigned h, const double* alphas, size_t n_alphas,
                      unsigned betas_per_alpha, uint64_t n, uint64_t x_max,
                      uint64_t pad, const char* opts_json, unsigned threads,
                      char** out_json);

/* ----- exact power comparisons ----- */

as_status as_bracket_power(uint64_t u, uint64_t v, uint64_t k, uint64_t* out_floor_n);
/* out_cmp: -1, 0, 1 for frac(k log_v u) <, ==, > p/q. */
as_status as_fracpart_compare(uint64_t k, uint64_t u, uint64_t v, uint64_t p,
                              uint64_t q, int* out_cmp);
as_status as_power_relation(uint64_t u, uint64_t v, char** out_json);
/* trace_path (optional): CSV "k,floor_n,zone" with zone in {low,middle,high}. */
as_status as_impossibility_scan(uint64_t u, uint64_t v, uint64_t K,
                                const char* trace_path, char** out_json);
as_status as_rational_witness(uint64_t u, uint64_t v, uint64_t r, uint64_t s,
                              uint64_t K, char** out_json);

/* ----- report schemas ----- */

as_status as_report_schema(const char* subcommand, char** out_json);
/* AS_OK when value_json conforms to schema_json. */
as_status as_validate_schema(const char* schema_json, const char* value_json);

#ifdef __cplusplus
}
#endif

#endif /* ADDSPEC_H */
