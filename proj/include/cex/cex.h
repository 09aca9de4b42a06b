/* C interface to the causal-explanation engine. All queries exchange JSON
 * strings: requests are JSON objects, results are JSON objects or arrays
 * (schemas documented in README.md). Returned strings are heap-allocated;
 * release them with cex_free_string. Models are opaque handles; release with
 * cex_model_free. Every entry point is thread-safe on distinct handles. */

#ifndef CEX_H
#define CEX_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cex_status {
  CEX_OK = 0,
  CEX_SYNTAX_ERROR = 1,
  CEX_UNKNOWN_IDENTIFIER = 2,
  CEX_UNKNOWN_VARIABLE = 3,
  CEX_VALUE_OUT_OF_RANGE = 4,
  CEX_RANGE_VIOLATION = 5,
  CEX_NESTED_INTERVENTION = 6,
  CEX_MISSING_EQUATION = 7,
  CEX_DUPLICATE_EQUATION = 8,
  CEX_CYCLIC_MODEL = 9,
  CEX_OUT_OF_RANGE_EQUATION_OUTPUT = 10,
  CEX_SCALE_EXCEEDED = 11,
  CEX_PROB_SUM_ERROR = 12,
  CEX_WEIGHT_SUM_NOT_ONE = 13,
  CEX_ZERO_PROBABILITY_CONDITION = 14,
  CEX_EMPTY_RESTRICTION = 15,
  CEX_EMPTY_CANDIDATE = 16,
  CEX_NOT_DEPTH_TWO = 17,
  CEX_INVALID_ARGUMENT = 18,
  CEX_IO_ERROR = 19,
  CEX_INTERNAL_ERROR = 20
} cex_status;

/* Stable name for a status value, e.g. "ZeroProbabilityCondition". */
const char* cex_status_name(cex_status status);

typedef struct cex_model cex_model;

void cex_free_string(char* text);
void cex_model_free(cex_model* model);

/* On failure every function returns a non-OK status and, when `error` is
 * non-NULL, stores a JSON diagnostic:
 *   {"code": "...", "message": "...", "span": {"line": L, "column": C,
 *    "offset": O, "length": N}?}                                          */

/* ---- models ---------------------------------------------------------- */

cex_status cex_model_parse(const char* text, cex_model** out, char** error);
cex_status cex_model_load(const char* path, cex_model** out, char** error);

/* Canonical model text (LF line endings, sorted declarations). */
cex_status cex_model_serialize(const cex_model* model, char** out, char** error);

/* ---- causation ------------------------------------------------------- */

/* request: {"context": "u1", "cause": "ML1=1 & ML2=1", "phi": "FB=1",
 *           "mode": "actual" | "butfor" | "sufficient"}
 * result: verdict, clause breakdown, canonical witness.                  */
cex_status cex_check_cause(const cex_model* model, const char* request, char** result,
                           char** error);

/* request: {"context": "u1", "phi": "FB=1"}
 * result: all actual causes with witnesses, canonical order.             */
cex_status cex_find_causes(const cex_model* model, const char* request, char** result,
                           char** error);

/* ---- explanations ----------------------------------------------------- */

/* request: {"phi": "WIN=1",
 *           "k": "all" | "<named K>" (default: the file's K),
 *           "definition": "halpern" | "mmts",
 *           "necessity": "conjunct-extendable" | "subset-is-cause",
 *           "witness": "actual-values" | "unconstrained",
 *           "scope": "given-k" | "all-contexts",
 *           "alpha": "1/8", "beta": "9/10",        (partial mode)
 *           "max_size": N,
 *           "candidate": "A=1 & B=1"}              (check instead of enumerate)
 * result: enumeration array or a single verdict object.                  */
cex_status cex_explain(const cex_model* model, const char* request, char** result,
                       char** error);

/* ---- classifier bridge ------------------------------------------------ */

/* request: {"width": W, "height": H,
 *           "pixel_values": [0, 1],
 *           "labeler": "any-on" | "parity-first-pixel" | "threshold" | "table",
 *           "threshold": K, "table": [labels...], "label_values": [0, 1],
 *           "distribution": "uniform" | "parity" | "corpus",
 *           "corpus": "<corpus text>"}
 * Produces a depth-2 model handle (serialize it to get a model file).    */
cex_status cex_classifier_lift(const char* request, cex_model** out, char** error);

/* request: {"label": <value>, "alpha": "9/10", "beta": "9/10",
 *           "k": "suspicious" | "all", "max_size": N,
 *           "mask": ["P0_0", ...], "fill": <value>}
 * result: minimal partial explanations of O=label with achieved goodness. */
cex_status cex_classifier_absence(const cex_model* model, const char* request, char** result,
                                  char** error);

/* request: {"condition": "O=1", "corpus": "<text>"?}
 * Conditions the model's distribution (or the given corpus) on the formula;
 * result: {"corpus": "<conditioned corpus text>", ...}.                  */
cex_status cex_classifier_reweight(const cex_model* model, const char* request, char** result,
                                   char** error);

/* request: {"width": W, "height": H, "min_size": S}
 * result: {"coords": [[r, c], ...], "pixels": ["P1_1", ...]}             */
cex_status cex_classifier_net(const char* request, char** result, char** error);

/* ---- theorem checks ---------------------------------------------------- */

/* Random mode (model == NULL):
 *   {"theorem": 1 | 2, "trials": N, "seed": S}
 * Model sweep (model != NULL):
 *   theorem 1: {"theorem": 1, "phi": "O=1"?, "superset": ["A", ...]?}
 *   theorem 2: {"theorem": 2, "alpha": "1/2", "beta": "1/2", "max_cand_size": N?}
 * result: {"trials": N, "conditions_met": N, "implication_failures": N,
 *          "first_failure": "..."}                                        */
cex_status cex_verify(const cex_model* model, const char* request, char** result, char** error);

#ifdef __cplusplus
}
#endif

#endif /* CEX_H */
