#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "cex/cex.h"
#include "cex/core/classifier.hpp"
#include "cex/core/dsl.hpp"
#include "cex/core/verify.hpp"
#include "enumeration.hpp"
#include "json.hpp"

using json = nlohmann::json;

struct cex_model {
  cex::ModelBundle bundle;
};

namespace {

using namespace cex;

cex_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return CEX_SYNTAX_ERROR;
    case ErrorCode::UnknownIdentifier: return CEX_UNKNOWN_IDENTIFIER;
    case ErrorCode::UnknownVariable: return CEX_UNKNOWN_VARIABLE;
    case ErrorCode::ValueOutOfRange: return CEX_VALUE_OUT_OF_RANGE;
    case ErrorCode::RangeViolation: return CEX_RANGE_VIOLATION;
    case ErrorCode::NestedIntervention: return CEX_NESTED_INTERVENTION;
    case ErrorCode::MissingEquation: return CEX_MISSING_EQUATION;
    case ErrorCode::DuplicateEquation: return CEX_DUPLICATE_EQUATION;
    case ErrorCode::CyclicModel: return CEX_CYCLIC_MODEL;
    case ErrorCode::OutOfRangeEquationOutput: return CEX_OUT_OF_RANGE_EQUATION_OUTPUT;
    case ErrorCode::ScaleExceeded: return CEX_SCALE_EXCEEDED;
    case ErrorCode::ProbSumError: return CEX_PROB_SUM_ERROR;
    case ErrorCode::WeightSumNotOne: return CEX_WEIGHT_SUM_NOT_ONE;
    case ErrorCode::ZeroProbabilityCondition: return CEX_ZERO_PROBABILITY_CONDITION;
    case ErrorCode::EmptyRestriction: return CEX_EMPTY_RESTRICTION;
    case ErrorCode::EmptyCandidate: return CEX_EMPTY_CANDIDATE;
    case ErrorCode::NotDepthTwo: return CEX_NOT_DEPTH_TWO;
    case ErrorCode::InvalidArgument: return CEX_INVALID_ARGUMENT;
    case ErrorCode::IoError: return CEX_IO_ERROR;
  }
  return CEX_INTERNAL_ERROR;
}

char* dup_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void set_error(char** error, const std::string& code, const std::string& message,
               const std::optional<SourceSpan>& span = std::nullopt) {
  if (!error) return;
  json diag;
  diag["code"] = code;
  diag["message"] = message;
  if (span) {
    diag["span"] = {{"column", span->column},
                    {"length", span->length},
                    {"line", span->line},
                    {"offset", span->offset}};
  }
  *error = dup_string(diag.dump());
}

template <typename Fn>
cex_status guard(char** error, Fn&& fn) {
  try {
    fn();
    return CEX_OK;
  } catch (const CexError& e) {
    set_error(error, error_code_name(e.code()), e.what(), e.span());
    return map_code(e.code());
  } catch (const json::exception& e) {
    set_error(error, "InvalidArgument", std::string("bad request JSON: ") + e.what());
    return CEX_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(error, "InternalError", e.what());
    return CEX_INTERNAL_ERROR;
  }
}

// ---- request helpers -----------------------------------------------------------

json parse_request(const char* request) {
  if (!request) fail(ErrorCode::InvalidArgument, "request JSON is null");
  json req = json::parse(request, nullptr, false);
  if (req.is_discarded()) fail(ErrorCode::InvalidArgument, "request is not valid JSON");
  if (!req.is_object()) fail(ErrorCode::InvalidArgument, "request must be a JSON object");
  return req;
}

std::string need_string(const json& req, const char* key) {
  if (!req.contains(key) || !req[key].is_string())
    fail(ErrorCode::InvalidArgument, std::string("request needs a string field '") + key + "'");
  return req[key].get<std::string>();
}

std::optional<std::string> opt_string(const json& req, const char* key) {
  if (!req.contains(key)) return std::nullopt;
  if (!req[key].is_string())
    fail(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a string");
  return req[key].get<std::string>();
}

int opt_int(const json& req, const char* key, int fallback) {
  if (!req.contains(key)) return fallback;
  if (!req[key].is_number_integer())
    fail(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be an integer");
  return req[key].get<int>();
}

Value value_from_json(const json& v, const char* key) {
  if (v.is_number_integer()) return Value(v.get<std::int64_t>());
  if (v.is_string()) return Value(v.get<std::string>());
  fail(ErrorCode::InvalidArgument,
       std::string("field '") + key + "' must be an integer or a string");
}

// ---- rendering helpers -----------------------------------------------------------

json value_json(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return json(std::get<std::int64_t>(v));
  return json(std::get<std::string>(v));
}

std::string context_label(const ModelBundle& bundle, ContextCode u) {
  for (const auto& [name, code] : bundle.contexts)
    if (code == u) return name;
  const CausalModel& m = bundle.model;
  std::vector<int> digits = m.decode_context(u);
  std::string out;
  for (int i = 0; i < m.exo_count(); ++i) {
    if (i) out += ", ";
    out += m.var(i).name + "=" + value_str(m.var(i).range.at(digits[static_cast<std::size_t>(i)]));
  }
  return out;
}

json assignment_json(const CausalModel& m, const std::vector<std::pair<int, int>>& pairs) {
  json out = json::object();
  for (const auto& [ordinal, index] : pairs)
    out[m.var(ordinal).name] = value_json(m.var(ordinal).range.at(index));
  return out;
}

json actual_witness_json(const CausalModel& m, const Conjunction& cand,
                         const ActualCauseWitness& w) {
  json alt = json::object();
  for (std::size_t i = 0; i < cand.events.size(); ++i)
    alt[m.var(cand.events[i].first).name] =
        value_json(m.var(cand.events[i].first).range.at(w.alt_values[i]));
  return json{{"alt", alt}, {"frozen", assignment_json(m, w.fixed)}};
}

json goodness_json(const GoodnessPair& g) {
  return json{{"alpha", rational_str(g.alpha)}, {"beta", rational_str(g.beta)}};
}

// Hyphens are accepted as underscores in context/K names so callers can say
// "both-throw" for a context declared as both_throw (identifiers cannot
// contain '-').
std::string dehyphen(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (c == '-') c = '_';
  return out;
}

ContextCode need_context(const ModelBundle& bundle, const json& req) {
  std::string name = need_string(req, "context");
  auto code = bundle.context_by_name(name);
  if (!code) code = bundle.context_by_name(dehyphen(name));
  if (!code) fail(ErrorCode::UnknownIdentifier, "unknown context '" + name + "'");
  return *code;
}

ContextSet resolve_k(const ModelBundle& bundle, const json& req) {
  auto name = opt_string(req, "k");
  if (!name) {
    if (bundle.k_default) return *bundle.k_default;
    return ContextSet::everything();
  }
  if (*name == "all") return ContextSet::everything();
  auto set = bundle.k_by_name(*name);
  if (!set) set = bundle.k_by_name(dehyphen(*name));
  if (!set) fail(ErrorCode::UnknownIdentifier, "unknown K set '" + *name + "'");
  return *set;
}

json k_json(const ModelBundle& bundle, const ContextSet& k) {
  if (k.all) return json{{"all", true}};
  json contexts = json::array();
  for (ContextCode u : k.codes) contexts.push_back(context_label(bundle, u));
  return json{{"all", false}, {"contexts", contexts}};
}

const ContextDistribution& need_distribution(const ModelBundle& bundle) {
  if (!bundle.distribution)
    fail(ErrorCode::InvalidArgument, "the model file declares no prob block");
  return *bundle.distribution;
}

DefinitionVariant resolve_variant(const json& req) {
  DefinitionVariant variant = DefinitionVariant::halpern();
  if (auto preset = opt_string(req, "definition")) {
    if (*preset == "halpern")
      variant = DefinitionVariant::halpern();
    else if (*preset == "mmts")
      variant = DefinitionVariant::mmts();
    else
      fail(ErrorCode::InvalidArgument, "definition must be 'halpern' or 'mmts'");
  }
  if (auto necessity = opt_string(req, "necessity")) {
    if (*necessity == "conjunct-extendable")
      variant.necessity = NecessityMode::ConjunctExtendable;
    else if (*necessity == "subset-is-cause")
      variant.necessity = NecessityMode::SubsetIsCause;
    else
      fail(ErrorCode::InvalidArgument,
           "necessity must be 'conjunct-extendable' or 'subset-is-cause'");
  }
  if (auto witness = opt_string(req, "witness")) {
    if (*witness == "actual-values")
      variant.witness = WitnessConstraint::ActualValues;
    else if (*witness == "unconstrained")
      variant.witness = WitnessConstraint::Unconstrained;
    else
      fail(ErrorCode::InvalidArgument, "witness must be 'actual-values' or 'unconstrained'");
  }
  if (auto scope = opt_string(req, "scope")) {
    if (*scope == "given-k")
      variant.scope = ContextScope::GivenK;
    else if (*scope == "all-contexts")
      variant.scope = ContextScope::AllContexts;
    else
      fail(ErrorCode::InvalidArgument, "scope must be 'given-k' or 'all-contexts'");
  }
  return variant;
}

json variant_json(const DefinitionVariant& v) {
  return json{
      {"necessity", v.necessity == NecessityMode::ConjunctExtendable ? "conjunct-extendable"
                                                                     : "subset-is-cause"},
      {"scope", v.scope == ContextScope::GivenK ? "given-k" : "all-contexts"},
      {"witness",
       v.witness == WitnessConstraint::ActualValues ? "actual-values" : "unconstrained"}};
}

Rat parse_threshold(const json& req, const char* key) {
  std::string text = need_string(req, key);
  Rat value = parse_rational(text);
  if (value <= 0 || value > 1)
    fail(ErrorCode::InvalidArgument, std::string(key) + " must lie in (0, 1]");
  return value;
}

json explanation_verdict_json(const ModelBundle& bundle, const ExplanationVerdict& v) {
  const CausalModel& m = bundle.model;
  json out;
  out["clauses"] = json{{"ex1_necessity", v.ex1_necessity},
                        {"ex1_sufficiency", v.ex1_sufficiency},
                        {"ex2_minimal", v.ex2_minimal},
                        {"ex3_possible", v.ex3_possible}};
  out["failed"] = v.failed ? json(v.failed) : json(nullptr);
  out["verdict"] = v.holds;
  out["achieved"] = v.achieved ? goodness_json(*v.achieved) : json(nullptr);
  out["ex1b_failure_context"] =
      v.ex1b_failure_context ? json(context_label(bundle, *v.ex1b_failure_context))
                             : json(nullptr);
  out["ex3_witness"] = v.ex3_witness ? json(context_label(bundle, *v.ex3_witness))
                                     : json(nullptr);
  out["ex2_violating_subset"] =
      v.ex2_violating_subset ? json(conjunction_str(m, *v.ex2_violating_subset)) : json(nullptr);
  return out;
}

// ---- classifier plumbing -----------------------------------------------------------

GridSpec grid_from_request(const json& req) {
  GridSpec grid;
  grid.width = opt_int(req, "width", 0);
  grid.height = opt_int(req, "height", 1);
  if (grid.width <= 0 || grid.height <= 0)
    fail(ErrorCode::InvalidArgument, "request needs positive 'width' and 'height'");
  if (req.contains("pixel_values")) {
    if (!req["pixel_values"].is_array() || req["pixel_values"].empty())
      fail(ErrorCode::InvalidArgument, "'pixel_values' must be a non-empty array");
    grid.pixel_range.values.clear();
    for (const auto& v : req["pixel_values"])
      grid.pixel_range.values.push_back(value_from_json(v, "pixel_values"));
  }
  return grid;
}

Labeler labeler_from_request(const json& req, const GridSpec& grid) {
  Labeler labeler;
  std::string kind = need_string(req, "labeler");
  if (kind == "any-on") {
    labeler.kind = Labeler::Kind::AnyOn;
  } else if (kind == "parity-first-pixel") {
    labeler.kind = Labeler::Kind::ParityFirstPixel;
  } else if (kind == "threshold") {
    labeler.kind = Labeler::Kind::Threshold;
    labeler.threshold = opt_int(req, "threshold", 1);
  } else if (kind == "table") {
    labeler.kind = Labeler::Kind::Table;
    if (!req.contains("table") || !req["table"].is_array())
      fail(ErrorCode::InvalidArgument, "table labelers need a 'table' array");
    for (const auto& v : req["table"]) labeler.table.push_back(value_from_json(v, "table"));
  } else {
    fail(ErrorCode::InvalidArgument,
         "labeler must be any-on, parity-first-pixel, threshold or table");
  }
  if (req.contains("label_values")) {
    if (!req["label_values"].is_array() || req["label_values"].empty())
      fail(ErrorCode::InvalidArgument, "'label_values' must be a non-empty array");
    labeler.label_range.values.clear();
    for (const auto& v : req["label_values"])
      labeler.label_range.values.push_back(value_from_json(v, "label_values"));
  }
  (void)grid;
  return labeler;
}

ImageDistribution distribution_from_request(const json& req, const GridSpec& grid) {
  std::string kind = req.contains("distribution") ? need_string(req, "distribution") : "uniform";
  if (kind == "uniform") return ImageDistribution::uniform(grid);
  if (kind == "parity") {
    int pixels = grid.pixel_count();
    if (pixels < 3 || pixels % 2 == 0 || grid.pixel_range.size() != 2)
      fail(ErrorCode::InvalidArgument,
           "the parity distribution needs an odd number (>= 3) of binary pixels");
    return parity_distribution((pixels - 1) / 2);
  }
  if (kind == "corpus") return parse_image_corpus(need_string(req, "corpus"), grid);
  fail(ErrorCode::InvalidArgument, "distribution must be uniform, parity or corpus");
}

std::string lift_model_name(const json& req, const std::string& kind) {
  std::string name = "lift_" + std::to_string(opt_int(req, "width", 0)) + "x" +
                     std::to_string(opt_int(req, "height", 1)) + "_" + kind;
  for (char& c : name)
    if (c == '-') c = '_';
  return name;
}

/// Wraps a lifted model into a bundle: img-named contexts over the support,
/// the lifted distribution, default K.
ModelBundle bundle_from_lift(const ProbabilisticModel& pm, std::string name,
                             const GridSpec& grid, const Labeler& labeler) {
  ModelBundle bundle;
  bundle.name = std::move(name);

  int n = grid.pixel_count();
  for (int i = 0; i < n; ++i) {
    std::string pixel = pixel_name(grid, i);
    bundle.signature.exogenous.push_back({"U_" + pixel, grid.pixel_range});
    bundle.signature.endogenous.push_back({pixel, grid.pixel_range});
    EquationSpec eq;
    eq.target = pixel;
    eq.expr = Expr::make_var("U_" + pixel);
    bundle.equations.push_back(std::move(eq));
  }
  bundle.signature.endogenous.push_back({"O", labeler.label_range});
  {
    TableSpec table;
    for (int i = 0; i < n; ++i) table.parents.push_back(pixel_name(grid, i));
    table.fallback = labeler.label_range.values.front();
    std::vector<int> radixes(static_cast<std::size_t>(n), grid.pixel_range.size());
    detail::for_each_tuple(radixes, [&](const std::vector<int>& image) {
      TableRowSpec row;
      for (int v : image) row.inputs.push_back(grid.pixel_range.at(v));
      row.output = labeler.label_of(grid, image);
      table.rows.push_back(std::move(row));
      return true;
    });
    EquationSpec eq;
    eq.target = "O";
    eq.table = std::move(table);
    bundle.equations.push_back(std::move(eq));
  }

  bundle.model = pm.model;
  bundle.distribution = pm.dist;
  bundle.k_default = pm.k;

  std::uint64_t space = pm.model.context_space();
  std::size_t width = std::to_string(space == 0 ? 0 : space - 1).size();
  for (const auto& [code, weight] : pm.dist.weights) {
    std::string digits = std::to_string(code);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    bundle.contexts.emplace_back("img" + digits, code);
  }
  return bundle;
}

}  // namespace

// ---- C surface -----------------------------------------------------------------

extern "C" {

const char* cex_status_name(cex_status status) {
  switch (status) {
    case CEX_OK: return "Ok";
    case CEX_SYNTAX_ERROR: return "SyntaxError";
    case CEX_UNKNOWN_IDENTIFIER: return "UnknownIdentifier";
    case CEX_UNKNOWN_VARIABLE: return "UnknownVariable";
    case CEX_VALUE_OUT_OF_RANGE: return "ValueOutOfRange";
    case CEX_RANGE_VIOLATION: return "RangeViolation";
    case CEX_NESTED_INTERVENTION: return "NestedIntervention";
    case CEX_MISSING_EQUATION: return "MissingEquation";
    case CEX_DUPLICATE_EQUATION: return "DuplicateEquation";
    case CEX_CYCLIC_MODEL: return "CyclicModel";
    case CEX_OUT_OF_RANGE_EQUATION_OUTPUT: return "OutOfRangeEquationOutput";
    case CEX_SCALE_EXCEEDED: return "ScaleExceeded";
    case CEX_PROB_SUM_ERROR: return "ProbSumError";
    case CEX_WEIGHT_SUM_NOT_ONE: return "WeightSumNotOne";
    case CEX_ZERO_PROBABILITY_CONDITION: return "ZeroProbabilityCondition";
    case CEX_EMPTY_RESTRICTION: return "EmptyRestriction";
    case CEX_EMPTY_CANDIDATE: return "EmptyCandidate";
    case CEX_NOT_DEPTH_TWO: return "NotDepthTwo";
    case CEX_INVALID_ARGUMENT: return "InvalidArgument";
    case CEX_IO_ERROR: return "IoError";
    case CEX_INTERNAL_ERROR: return "InternalError";
  }
  return "Unknown";
}

void cex_free_string(char* text) { std::free(text); }

void cex_model_free(cex_model* model) { delete model; }

cex_status cex_model_parse(const char* text, cex_model** out, char** error) {
  return guard(error, [&] {
    if (!text || !out) fail(ErrorCode::InvalidArgument, "text and out must be non-null");
    auto handle = std::make_unique<cex_model>();
    handle->bundle = parse_model(text);
    *out = handle.release();
  });
}

cex_status cex_model_load(const char* path, cex_model** out, char** error) {
  return guard(error, [&] {
    if (!path || !out) fail(ErrorCode::InvalidArgument, "path and out must be non-null");
    auto handle = std::make_unique<cex_model>();
    handle->bundle = load_model_file(path);
    *out = handle.release();
  });
}

cex_status cex_model_serialize(const cex_model* model, char** out, char** error) {
  return guard(error, [&] {
    if (!model || !out) fail(ErrorCode::InvalidArgument, "model and out must be non-null");
    *out = dup_string(serialize_model(model->bundle));
  });
}

cex_status cex_check_cause(const cex_model* model, const char* request, char** result,
                           char** error) {
  return guard(error, [&] {
    if (!model || !result) fail(ErrorCode::InvalidArgument, "model and result must be non-null");
    const ModelBundle& bundle = model->bundle;
    const CausalModel& m = bundle.model;
    json req = parse_request(request);

    ContextCode u = need_context(bundle, req);
    Conjunction cause = parse_conjunction(need_string(req, "cause"), m);
    Formula phi = parse_formula(need_string(req, "phi"), m);
    std::string mode = need_string(req, "mode");

    json out;
    out["cause"] = conjunction_str(m, cause);
    out["context"] = need_string(req, "context");
    out["mode"] = mode;
    out["phi"] = need_string(req, "phi");

    if (mode == "actual") {
      CauseVerdict v = is_actual_cause(m, u, cause, phi);
      out["clauses"] = json{{"ac1", v.ac1}, {"ac2", v.ac2}, {"ac3", v.ac3}};
      out["failed"] = v.failed ? json(v.failed) : json(nullptr);
      out["verdict"] = v.holds;
      out["witness"] = v.witness ? actual_witness_json(m, cause, *v.witness) : json(nullptr);
    } else if (mode == "butfor") {
      ButForVerdict v = is_but_for_cause(m, u, cause, phi);
      out["clauses"] = json{{"ac1", v.ac1}, {"ac3", v.ac3}, {"flip", v.flip}};
      out["failed"] = v.failed ? json(v.failed) : json(nullptr);
      out["verdict"] = v.holds;
      if (v.alt_values) {
        json alt = json::object();
        for (std::size_t i = 0; i < cause.events.size(); ++i)
          alt[m.var(cause.events[i].first).name] =
              value_json(m.var(cause.events[i].first).range.at((*v.alt_values)[i]));
        out["witness"] = json{{"alt", alt}};
      } else {
        out["witness"] = nullptr;
      }
    } else if (mode == "sufficient") {
      SufficientVerdict v = is_sufficient_cause(m, u, cause, phi);
      out["clauses"] = json{{"sc1", v.sc1}, {"sc2", v.sc2}, {"sc3", v.sc3}, {"sc4", v.sc4}};
      out["failed"] = v.failed ? json(v.failed) : json(nullptr);
      out["verdict"] = v.holds;
      if (v.witness) {
        const SufficientCauseWitness& w = *v.witness;
        out["witness"] =
            json{{"conjunct", m.var(w.conjunct.first).name + "=" +
                                  value_str(m.var(w.conjunct.first).range.at(w.conjunct.second))},
                 {"extension", conjunction_str(m, w.extension_or_self)},
                 {"inner", actual_witness_json(m, w.extension_or_self, w.inner)}};
      } else {
        out["witness"] = nullptr;
      }
      out["sc3_failure_context"] = v.sc3_failure_context
                                       ? json(context_label(bundle, *v.sc3_failure_context))
                                       : json(nullptr);
      out["sc4_violating_subset"] =
          v.sc4_violating_subset ? json(conjunction_str(m, *v.sc4_violating_subset))
                                 : json(nullptr);
    } else {
      fail(ErrorCode::InvalidArgument, "mode must be actual, butfor or sufficient");
    }
    *result = dup_string(out.dump(2));
  });
}

cex_status cex_find_causes(const cex_model* model, const char* request, char** result,
                           char** error) {
  return guard(error, [&] {
    if (!model || !result) fail(ErrorCode::InvalidArgument, "model and result must be non-null");
    const ModelBundle& bundle = model->bundle;
    const CausalModel& m = bundle.model;
    json req = parse_request(request);
    ContextCode u = need_context(bundle, req);
    Formula phi = parse_formula(need_string(req, "phi"), m);

    auto causes = find_actual_causes(m, u, phi);
    json arr = json::array();
    for (const auto& [cand, witness] : causes)
      arr.push_back(json{{"cause", conjunction_str(m, cand)},
                         {"witness", actual_witness_json(m, cand, witness)}});
    json out;
    out["causes"] = arr;
    out["context"] = need_string(req, "context");
    out["count"] = causes.size();
    out["phi"] = need_string(req, "phi");
    *result = dup_string(out.dump(2));
  });
}

cex_status cex_explain(const cex_model* model, const char* request, char** result, char** error) {
  return guard(error, [&] {
    if (!model || !result) fail(ErrorCode::InvalidArgument, "model and result must be non-null");
    const ModelBundle& bundle = model->bundle;
    const CausalModel& m = bundle.model;
    json req = parse_request(request);

    Formula phi = parse_formula(need_string(req, "phi"), m);
    ContextSet k = resolve_k(bundle, req);
    DefinitionVariant variant = resolve_variant(req);
    int max_size = opt_int(req, "max_size", 0);

    bool partial = req.contains("alpha") || req.contains("beta");
    GoodnessPair goodness;
    if (partial) {
      goodness.alpha = parse_threshold(req, "alpha");
      goodness.beta = parse_threshold(req, "beta");
    }

    json out;
    out["definition"] = variant_json(variant);
    out["k"] = k_json(bundle, k);
    out["mode"] = partial ? "partial" : "exact";
    out["phi"] = need_string(req, "phi");

    if (auto cand_text = opt_string(req, "candidate")) {
      Conjunction cand = parse_conjunction(*cand_text, m);
      ExplanationVerdict v =
          partial ? is_partial_explanation(m, need_distribution(bundle), k, cand, phi, goodness,
                                           variant)
                  : is_explanation(m, k, cand, phi, variant);
      json entry = explanation_verdict_json(bundle, v);
      entry["candidate"] = conjunction_str(m, cand);
      out["result"] = entry;
      *result = dup_string(out.dump(2));
      return;
    }

    out["max_size"] = max_size;
    json arr = json::array();
    if (partial) {
      out["goodness"] = goodness_json(goodness);
      auto found = evaluate_partial_candidates(m, need_distribution(bundle), k, phi, goodness,
                                               variant, max_size);
      for (const auto& [cand, v] : found) {
        json entry;
        entry["achieved"] = v.achieved ? goodness_json(*v.achieved) : json(nullptr);
        entry["candidate"] = conjunction_str(m, cand);
        entry["failed"] = v.failed ? json(v.failed) : json(nullptr);
        entry["verdict"] = v.holds;
        arr.push_back(entry);
      }
    } else {
      auto found = find_explanations(m, k, phi, variant, max_size);
      for (const auto& [cand, v] : found) {
        json entry;
        entry["candidate"] = conjunction_str(m, cand);
        entry["verdict"] = v.holds;
        arr.push_back(entry);
      }
    }
    out["explanations"] = arr;
    *result = dup_string(out.dump(2));
  });
}

cex_status cex_classifier_lift(const char* request, cex_model** out, char** error) {
  return guard(error, [&] {
    if (!out) fail(ErrorCode::InvalidArgument, "out must be non-null");
    json req = parse_request(request);
    GridSpec grid = grid_from_request(req);
    Labeler labeler = labeler_from_request(req, grid);
    ImageDistribution dist = distribution_from_request(req, grid);
    ProbabilisticModel pm = lift_classifier(grid, labeler, dist);
    auto handle = std::make_unique<cex_model>();
    handle->bundle =
        bundle_from_lift(pm, lift_model_name(req, need_string(req, "labeler")), grid, labeler);
    *out = handle.release();
  });
}

cex_status cex_classifier_absence(const cex_model* model, const char* request, char** result,
                                  char** error) {
  return guard(error, [&] {
    if (!model || !result) fail(ErrorCode::InvalidArgument, "model and result must be non-null");
    const ModelBundle& bundle = model->bundle;
    json req = parse_request(request);

    ProbabilisticModel pm;
    pm.model = bundle.model;
    pm.dist = need_distribution(bundle);
    if (!is_depth2_lift(pm.model, &pm.pixel_ordinals, &pm.output_ordinal))
      fail(ErrorCode::NotDepthTwo, "absence explanations need a depth-2 lifted model");
    pm.k = resolve_k(bundle, req);

    if (!req.contains("label")) fail(ErrorCode::InvalidArgument, "request needs 'label'");
    Value label = value_from_json(req["label"], "label");
    GoodnessPair goodness{parse_threshold(req, "alpha"), parse_threshold(req, "beta")};
    int max_size = opt_int(req, "max_size", 0);

    ContextSet k = pm.k;
    std::vector<int> exclude;
    if (req.contains("mask")) {
      if (!req["mask"].is_array()) fail(ErrorCode::InvalidArgument, "'mask' must be an array");
      RegionMask mask;
      for (const auto& p : req["mask"]) {
        if (!p.is_string()) fail(ErrorCode::InvalidArgument, "'mask' entries must be names");
        mask.pixels.push_back(p.get<std::string>());
      }
      if (!req.contains("fill")) fail(ErrorCode::InvalidArgument, "masks need a 'fill' value");
      mask.fill = value_from_json(req["fill"], "fill");
      k = restrict_contexts(pm, mask);
      for (const std::string& name : mask.pixels)
        exclude.push_back(pm.model.require_endogenous(name));
    }

    auto found = explain_absence(pm, k, label, goodness, max_size, exclude);
    json arr = json::array();
    for (const auto& [cand, achieved] : found) {
      arr.push_back(json{{"achieved", goodness_json(achieved)},
                         {"candidate", conjunction_str(pm.model, cand)}});
    }
    json out;
    out["explanations"] = arr;
    out["goodness"] = goodness_json(goodness);
    out["k"] = k_json(bundle, k);
    out["label"] = value_json(label);
    *result = dup_string(out.dump(2));
  });
}

cex_status cex_classifier_reweight(const cex_model* model, const char* request, char** result,
                                   char** error) {
  return guard(error, [&] {
    if (!model || !result) fail(ErrorCode::InvalidArgument, "model and result must be non-null");
    const ModelBundle& bundle = model->bundle;
    json req = parse_request(request);

    ProbabilisticModel pm;
    pm.model = bundle.model;
    if (!is_depth2_lift(pm.model, &pm.pixel_ordinals, &pm.output_ordinal))
      fail(ErrorCode::NotDepthTwo, "re-weighting needs a depth-2 lifted model");

    // Reconstruct the grid: pixels in ordinal order, one row.
    GridSpec grid;
    grid.width = static_cast<int>(pm.pixel_ordinals.size());
    grid.height = 1;
    grid.pixel_range = pm.model.var(pm.pixel_ordinals.front()).range;
    for (int p : pm.pixel_ordinals)
      if (pm.model.var(p).range.size() != grid.pixel_range.size())
        fail(ErrorCode::InvalidArgument, "pixels must share one value range");

    ImageDistribution dist;
    if (auto corpus = opt_string(req, "corpus")) {
      dist = parse_image_corpus(*corpus, grid);
    } else {
      const ContextDistribution& cd = need_distribution(bundle);
      for (const auto& [code, weight] : cd.weights) {
        if (weight <= 0) continue;
        Assignment a = pm.model.evaluate(code);
        std::vector<int> image;
        image.reserve(pm.pixel_ordinals.size());
        for (int p : pm.pixel_ordinals) image.push_back(a[static_cast<std::size_t>(p)]);
        dist.entries.emplace_back(std::move(image), weight);
      }
    }

    Formula condition = parse_formula(need_string(req, "condition"), pm.model);
    ImageDistribution conditioned = rare_event_reweight(dist, grid, condition, pm);

    json out;
    out["condition"] = need_string(req, "condition");
    out["corpus"] = format_image_corpus(conditioned, grid);
    out["images"] = conditioned.entries.size();
    out["pixels"] = [&] {
      json names = json::array();
      for (int p : pm.pixel_ordinals) names.push_back(pm.model.var(p).name);
      return names;
    }();
    *result = dup_string(out.dump(2));
  });
}

cex_status cex_classifier_net(const char* request, char** result, char** error) {
  return guard(error, [&] {
    if (!result) fail(ErrorCode::InvalidArgument, "result must be non-null");
    json req = parse_request(request);
    int width = opt_int(req, "width", 0);
    int height = opt_int(req, "height", 1);
    int min_size = opt_int(req, "min_size", 2);
    auto net = pixel_net(width, height, min_size);

    GridSpec grid{width, height, ValueRange::boolean()};
    json coords = json::array();
    json names = json::array();
    for (const auto& [r, c] : net) {
      coords.push_back(json::array({r, c}));
      names.push_back(pixel_name(grid, r, c));
    }
    json out;
    out["coords"] = coords;
    out["min_size"] = min_size;
    out["pixels"] = names;
    *result = dup_string(out.dump(2));
  });
}

cex_status cex_verify(const cex_model* model, const char* request, char** result, char** error) {
  return guard(error, [&] {
    if (!result) fail(ErrorCode::InvalidArgument, "result must be non-null");
    json req = parse_request(request);
    int theorem = opt_int(req, "theorem", 0);
    if (theorem != 1 && theorem != 2)
      fail(ErrorCode::InvalidArgument, "theorem must be 1 or 2");

    TrialSummary summary;
    if (!model) {
      int trials = opt_int(req, "trials", 0);
      if (trials <= 0)
        fail(ErrorCode::InvalidArgument, "random mode needs a positive 'trials'");
      if (!req.contains("seed") || !req["seed"].is_number_unsigned())
        fail(ErrorCode::InvalidArgument, "random mode needs a non-negative 'seed'");
      auto seed = req["seed"].get<std::uint64_t>();
      summary = theorem == 1 ? run_theorem1_trials(trials, seed)
                             : run_theorem2_trials(trials, seed);
    } else if (theorem == 1) {
      std::optional<std::vector<std::string>> superset;
      if (req.contains("superset")) {
        if (!req["superset"].is_array())
          fail(ErrorCode::InvalidArgument, "'superset' must be an array of names");
        superset.emplace();
        for (const auto& name : req["superset"]) {
          if (!name.is_string())
            fail(ErrorCode::InvalidArgument, "'superset' must be an array of names");
          superset->push_back(name.get<std::string>());
        }
      }
      summary = run_theorem1_on_model(model->bundle, opt_string(req, "phi"), superset);
    } else {
      GoodnessPair goodness{parse_threshold(req, "alpha"), parse_threshold(req, "beta")};
      summary = run_theorem2_on_model(model->bundle, goodness, opt_int(req, "max_cand_size", 0));
    }

    json out;
    out["conditions_met"] = summary.conditions_met;
    out["first_failure"] =
        summary.first_failure.empty() ? json(nullptr) : json(summary.first_failure);
    out["implication_failures"] = summary.implication_failures;
    out["theorem"] = theorem;
    out["trials"] = summary.trials;
    *result = dup_string(out.dump(2));
  });
}

}  // extern "C"
