// Command-line front end over the C API: every engine query as a subcommand,
// JSON with --json, terse tables otherwise. Exit codes: 0 = verdict true /
// non-empty result, 1 = false / empty / failed implication, 2 = any error.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cex/cex.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

struct CliError {
  std::string text;
  int exit_code = 2;
};

[[noreturn]] void die(const std::string& text) { throw CliError{text, 2}; }

std::string take(char* raw) {
  if (!raw) return {};
  std::string s(raw);
  cex_free_string(raw);
  return s;
}

[[noreturn]] void die_api(cex_status status, char* error_raw) {
  std::string payload = take(error_raw);
  std::string text = "error[";
  text += cex_status_name(status);
  text += "]";
  if (!payload.empty()) {
    json e = json::parse(payload, nullptr, false);
    if (!e.is_discarded()) {
      text += ": ";
      text += e.value("message", "");
      if (e.contains("span")) {
        const json& s = e["span"];
        text += " (line " + std::to_string(s.value("line", 0)) + ", column " +
                std::to_string(s.value("column", 0)) + ")";
      }
    } else {
      text += ": " + payload;
    }
  }
  throw CliError{text, 2};
}

struct Model {
  cex_model* handle = nullptr;
  ~Model() { cex_model_free(handle); }
};

void load_model(const std::string& path, Model& m) {
  char* err = nullptr;
  cex_status st = cex_model_load(path.c_str(), &m.handle, &err);
  if (st != CEX_OK) die_api(st, err);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("error[IoError]: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die("error[IoError]: cannot write '" + path + "'");
  out << text;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Runs a C API call that fills `result`, returns the parsed JSON.
template <typename Fn>
json run_api(Fn&& fn) {
  char* result = nullptr;
  char* err = nullptr;
  cex_status st = fn(&result, &err);
  if (st != CEX_OK) die_api(st, err);
  return json::parse(take(result));
}

void emit(bool as_json, const json& out, const Timer& timer, const std::string& table) {
  if (as_json) {
    json with_time = out;
    with_time["timing_ms"] = timer.ms();
    std::cout << with_time.dump(2) << "\n";
  } else {
    std::cout << table;
  }
}

std::string opt_str(const json& v) { return v.is_null() ? "-" : v.get<std::string>(); }

std::string assignment_text(const json& obj) {
  if (obj.is_null() || obj.empty()) return "(none)";
  std::string s;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!s.empty()) s += ", ";
    s += it.key() + "=";
    s += it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
  }
  return s;
}

std::string goodness_text(const json& g) {
  if (g.is_null()) return "-";
  return "(" + g.value("alpha", "?") + ", " + g.value("beta", "?") + ")";
}

// ---- subcommand bodies --------------------------------------------------

int cmd_check_cause(const std::string& model_path, const std::string& context,
                    const std::string& cause, const std::string& phi, const std::string& mode,
                    bool as_json) {
  Model m;
  load_model(model_path, m);
  json req{{"context", context}, {"cause", cause}, {"phi", phi}, {"mode", mode}};
  Timer timer;
  json out = run_api([&](char** result, char** err) {
    return cex_check_cause(m.handle, req.dump().c_str(), result, err);
  });

  std::ostringstream t;
  t << "verdict: " << (out["verdict"].get<bool>() ? "true" : "false") << "\n";
  t << "clauses:";
  for (auto it = out["clauses"].begin(); it != out["clauses"].end(); ++it) {
    std::string key = it.key();
    for (auto& ch : key) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    t << " " << key << "=" << (it.value().get<bool>() ? "true" : "false");
  }
  t << "\n";
  if (!out["verdict"].get<bool>()) t << "failed: " << opt_str(out["failed"]) << "\n";
  const json& w = out["witness"];
  if (!w.is_null()) {
    if (mode == "sufficient") {
      t << "witness: conjunct " << w["conjunct"].get<std::string>() << "; cause "
        << w["extension"].get<std::string>() << "; alt "
        << assignment_text(w["inner"]["alt"]) << "; frozen "
        << assignment_text(w["inner"]["frozen"]) << "\n";
    } else if (mode == "actual") {
      t << "witness: alt " << assignment_text(w["alt"]) << "; frozen "
        << assignment_text(w["frozen"]) << "\n";
    } else {
      t << "witness: alt " << assignment_text(w["alt"]) << "\n";
    }
  }
  emit(as_json, out, timer, t.str());
  return out["verdict"].get<bool>() ? 0 : 1;
}

int cmd_find_causes(const std::string& model_path, const std::string& context,
                    const std::string& phi, bool as_json) {
  Model m;
  load_model(model_path, m);
  json req{{"context", context}, {"phi", phi}};
  Timer timer;
  json out = run_api([&](char** result, char** err) {
    return cex_find_causes(m.handle, req.dump().c_str(), result, err);
  });

  std::ostringstream t;
  t << "actual causes of " << phi << " at " << context << ": " << out["count"].get<int>()
    << "\n";
  for (const json& entry : out["causes"]) {
    t << "  " << entry["cause"].get<std::string>() << "  (alt "
      << assignment_text(entry["witness"]["alt"]) << "; frozen "
      << assignment_text(entry["witness"]["frozen"]) << ")\n";
  }
  emit(as_json, out, timer, t.str());
  return out["count"].get<int>() > 0 ? 0 : 1;
}

int cmd_explain(const std::string& model_path, const std::string& phi,
                const std::optional<std::string>& k, const std::string& definition,
                const std::optional<std::string>& necessity,
                const std::optional<std::string>& witness, const std::optional<std::string>& scope,
                const std::optional<std::string>& alpha, const std::optional<std::string>& beta,
                int max_size, const std::optional<std::string>& candidate, bool as_json) {
  Model m;
  load_model(model_path, m);
  json req{{"phi", phi}, {"definition", definition}, {"max_size", max_size}};
  if (k) req["k"] = *k;
  if (necessity) req["necessity"] = *necessity;
  if (witness) req["witness"] = *witness;
  if (scope) req["scope"] = *scope;
  if (alpha) req["alpha"] = *alpha;
  if (beta) req["beta"] = *beta;
  if (candidate) req["candidate"] = *candidate;
  Timer timer;
  json out = run_api([&](char** result, char** err) {
    return cex_explain(m.handle, req.dump().c_str(), result, err);
  });

  std::ostringstream t;
  int exit_code = 1;
  if (out.contains("result")) {
    const json& r = out["result"];
    bool holds = r["verdict"].get<bool>();
    exit_code = holds ? 0 : 1;
    t << "candidate: " << *candidate << "\n";
    t << "verdict: " << (holds ? "true" : "false") << "\n";
    if (!holds) t << "failed: " << opt_str(r["failed"]) << "\n";
    if (!r["achieved"].is_null()) t << "achieved: " << goodness_text(r["achieved"]) << "\n";
  } else {
    const json& entries = out["explanations"];
    bool partial = out.contains("goodness");
    int holders = 0;
    for (const json& e : entries)
      if (e["verdict"].get<bool>()) ++holders;
    exit_code = holders > 0 ? 0 : 1;
    const json& d = out["definition"];
    t << "explanations of " << phi << " (" << d["necessity"].get<std::string>() << ", "
      << d["witness"].get<std::string>() << ", " << d["scope"].get<std::string>()
      << (partial ? ", partial" : "") << "): " << holders << "\n";
    for (const json& e : entries) {
      if (!partial && !e["verdict"].get<bool>()) continue;
      t << "  " << e["candidate"].get<std::string>();
      if (partial) {
        t << "  " << (e["verdict"].get<bool>() ? "ok" : "rejected") << "  achieved "
          << goodness_text(e["achieved"]);
        if (!e["verdict"].get<bool>()) t << "  (" << opt_str(e["failed"]) << ")";
      }
      t << "\n";
    }
  }
  emit(as_json, out, timer, t.str());
  return exit_code;
}

struct GridArg {
  int width = 0;
  int height = 0;
};

GridArg parse_grid(const std::string& text) {
  auto x = text.find('x');
  if (x == std::string::npos) die("error[InvalidArgument]: --grid expects WIDTHxHEIGHT");
  try {
    GridArg g;
    g.width = std::stoi(text.substr(0, x));
    g.height = std::stoi(text.substr(x + 1));
    return g;
  } catch (const std::exception&) {
    die("error[InvalidArgument]: --grid expects WIDTHxHEIGHT");
  }
}

json values_csv(const std::string& text) {
  json arr = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used == item.size()) {
        arr.push_back(v);
        continue;
      }
    } catch (const std::exception&) {
    }
    arr.push_back(item);
  }
  return arr;
}

int cmd_lift(const std::string& grid, const std::string& labeler, int threshold,
             const std::optional<std::string>& table_file,
             const std::optional<std::string>& pixel_values,
             const std::optional<std::string>& label_values, bool uniform, bool parity,
             const std::optional<std::string>& corpus_file, std::optional<std::string> out_path,
             bool as_json) {
  GridArg g = parse_grid(grid);
  json req{{"width", g.width}, {"height", g.height}, {"labeler", labeler}};
  if (labeler == "threshold") req["threshold"] = threshold;
  if (table_file) {
    // One label per image in code order (row-major, first pixel most
    // significant); whitespace separated, '#' starts a comment.
    json table = json::array();
    std::stringstream raw(slurp(*table_file));
    std::ostringstream kept;
    std::string line;
    while (std::getline(raw, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      kept << line << '\n';
    }
    std::stringstream ss(kept.str());
    std::string item;
    while (ss >> item) {
      try {
        size_t used = 0;
        long long v = std::stoll(item, &used);
        if (used == item.size()) {
          table.push_back(v);
          continue;
        }
      } catch (const std::exception&) {
      }
      table.push_back(item);
    }
    req["table"] = table;
  }
  if (pixel_values) req["pixel_values"] = values_csv(*pixel_values);
  if (label_values) req["label_values"] = values_csv(*label_values);
  int picked = (uniform ? 1 : 0) + (parity ? 1 : 0) + (corpus_file ? 1 : 0);
  if (picked != 1) die("error[InvalidArgument]: pick exactly one of --uniform, --parity, --corpus");
  if (uniform) req["distribution"] = "uniform";
  if (parity) req["distribution"] = "parity";
  if (corpus_file) {
    req["distribution"] = "corpus";
    req["corpus"] = slurp(*corpus_file);
  }

  Timer timer;
  Model lifted;
  {
    char* err = nullptr;
    cex_status st = cex_classifier_lift(req.dump().c_str(), &lifted.handle, &err);
    if (st != CEX_OK) die_api(st, err);
  }
  std::string text;
  {
    char* raw = nullptr;
    char* err = nullptr;
    cex_status st = cex_model_serialize(lifted.handle, &raw, &err);
    if (st != CEX_OK) die_api(st, err);
    text = take(raw);
  }
  std::string name = "lift";
  if (text.rfind("model ", 0) == 0) {
    auto end = text.find(' ', 6);
    if (end != std::string::npos) name = text.substr(6, end - 6);
  }
  if (!out_path) out_path = name + ".cm";
  spill(*out_path, text);

  json out{{"model", name}, {"path", *out_path}};
  emit(as_json, out, timer, "wrote " + *out_path + " (model " + name + ")\n");
  return 0;
}

int cmd_absence(const std::string& model_path, const std::string& label,
                const std::string& alpha, const std::string& beta,
                const std::optional<std::string>& k, const std::optional<std::string>& mask,
                const std::optional<std::string>& fill, int max_size, bool as_json) {
  Model m;
  load_model(model_path, m);
  json label_v;
  try {
    size_t used = 0;
    long long v = std::stoll(label, &used);
    label_v = used == label.size() ? json(v) : json(label);
  } catch (const std::exception&) {
    label_v = label;
  }
  json req{{"label", label_v}, {"alpha", alpha}, {"beta", beta}, {"max_size", max_size}};
  if (k) req["k"] = *k;
  if (mask) {
    json arr = json::array();
    std::stringstream ss(*mask);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(item);
    req["mask"] = arr;
    if (!fill) die("error[InvalidArgument]: --mask needs --fill");
    try {
      size_t used = 0;
      long long v = std::stoll(*fill, &used);
      req["fill"] = used == fill->size() ? json(v) : json(*fill);
    } catch (const std::exception&) {
      req["fill"] = *fill;
    }
  }
  Timer timer;
  json out = run_api([&](char** result, char** err) {
    return cex_classifier_absence(m.handle, req.dump().c_str(), result, err);
  });

  std::ostringstream t;
  const json& ex = out["explanations"];
  t << "absence explanations of O=" << label << " at goodness " << goodness_text(out["goodness"])
    << ": " << ex.size() << "\n";
  for (const json& e : ex)
    t << "  " << e["candidate"].get<std::string>() << "  achieved "
      << goodness_text(e["achieved"]) << "\n";
  emit(as_json, out, timer, t.str());
  return ex.empty() ? 1 : 0;
}

int cmd_reweight(const std::string& model_path, const std::string& condition,
                 const std::optional<std::string>& corpus_file,
                 const std::optional<std::string>& out_path, bool as_json) {
  Model m;
  load_model(model_path, m);
  json req{{"condition", condition}};
  if (corpus_file) req["corpus"] = slurp(*corpus_file);
  Timer timer;
  json out = run_api([&](char** result, char** err) {
    return cex_classifier_reweight(m.handle, req.dump().c_str(), result, err);
  });
  std::string corpus = out["corpus"].get<std::string>();
  if (out_path) {
    spill(*out_path, corpus);
    emit(as_json, out, timer,
         "wrote " + *out_path + " (" + std::to_string(out["images"].get<int>()) + " images)\n");
  } else {
    emit(as_json, out, timer, corpus);
  }
  return 0;
}

int cmd_net(const std::string& grid, int min_size, bool as_json) {
  GridArg g = parse_grid(grid);
  json req{{"width", g.width}, {"height", g.height}, {"min_size", min_size}};
  Timer timer;
  json out = run_api(
      [&](char** result, char** err) { return cex_classifier_net(req.dump().c_str(), result, err); });
  std::ostringstream t;
  t << "pixel net for " << grid << " against tumors >= " << min_size << "x" << min_size << ": ";
  const json& px = out["pixels"];
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (i) t << ", ";
    t << px[i].get<std::string>();
  }
  t << "\n";
  emit(as_json, out, timer, t.str());
  return 0;
}

int cmd_verify(int theorem, const std::optional<std::string>& model_path, int trials,
               std::int64_t seed, const std::optional<std::string>& phi,
               const std::optional<std::string>& superset, const std::optional<std::string>& alpha,
               const std::optional<std::string>& beta, int max_cand_size, bool as_json) {
  Model m;
  json req{{"theorem", theorem}};
  if (model_path) {
    load_model(*model_path, m);
    if (phi) req["phi"] = *phi;
    if (superset) {
      json arr = json::array();
      std::stringstream ss(*superset);
      std::string item;
      while (std::getline(ss, item, ',')) arr.push_back(item);
      req["superset"] = arr;
    }
    if (alpha) req["alpha"] = *alpha;
    if (beta) req["beta"] = *beta;
    if (max_cand_size > 0) req["max_cand_size"] = max_cand_size;
  } else {
    req["trials"] = trials;
    req["seed"] = seed;
  }
  Timer timer;
  json out = run_api([&](char** result, char** err) {
    return cex_verify(model_path ? m.handle : nullptr, req.dump().c_str(), result, err);
  });

  std::ostringstream t;
  t << "theorem " << theorem << ": " << out["trials"].get<std::int64_t>() << " trials, "
    << out["conditions_met"].get<std::int64_t>() << " with all conditions, "
    << out["implication_failures"].get<std::int64_t>() << " implication failures\n";
  if (!out["first_failure"].is_null())
    t << "first failure: " << out["first_failure"].get<std::string>() << "\n";
  emit(as_json, out, timer, t.str());
  return out["implication_failures"].get<std::int64_t>() == 0 ? 0 : 1;
}

int cmd_fmt(const std::string& model_path, bool as_json) {
  Model m;
  load_model(model_path, m);
  Timer timer;
  char* raw = nullptr;
  char* err = nullptr;
  cex_status st = cex_model_serialize(m.handle, &raw, &err);
  if (st != CEX_OK) die_api(st, err);
  std::string text = take(raw);
  emit(as_json, json{{"text", text}}, timer, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact causal-explanation engine"};
  app.require_subcommand(1);
  app.fallthrough();  // lets the global --json trail the subcommand
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable JSON output");

  // check-cause
  std::string cc_model, cc_context, cc_cause, cc_phi, cc_mode = "actual";
  auto* cc = app.add_subcommand("check-cause", "decide a cause query in one context");
  cc->add_option("model", cc_model, "model file (.cm)")->required();
  cc->add_option("--context", cc_context, "named context")->required();
  cc->add_option("--cause", cc_cause, "candidate conjunction, e.g. \"ML1=1 & ML2=1\"")->required();
  cc->add_option("--phi", cc_phi, "effect formula")->required();
  cc->add_option("--mode", cc_mode, "actual | butfor | sufficient")
      ->check(CLI::IsMember({"actual", "butfor", "sufficient"}));

  // find-causes
  std::string fc_model, fc_context, fc_phi;
  auto* fc = app.add_subcommand("find-causes", "enumerate all actual causes in one context");
  fc->add_option("model", fc_model, "model file (.cm)")->required();
  fc->add_option("--context", fc_context, "named context")->required();
  fc->add_option("--phi", fc_phi, "effect formula")->required();

  // explain
  std::string ex_model, ex_phi, ex_definition = "halpern";
  std::optional<std::string> ex_k, ex_necessity, ex_witness, ex_scope, ex_alpha, ex_beta,
      ex_candidate;
  int ex_max_size = 0;
  auto* ex = app.add_subcommand("explain", "enumerate or check explanations relative to K");
  ex->add_option("model", ex_model, "model file (.cm)")->required();
  ex->add_option("--phi", ex_phi, "explanandum formula")->required();
  ex->add_option("--k", ex_k, "context set: 'all' or a named K (default: the file's K)");
  ex->add_option("--definition", ex_definition, "halpern | mmts")
      ->check(CLI::IsMember({"halpern", "mmts"}));
  ex->add_option("--necessity", ex_necessity, "conjunct-extendable | subset-is-cause")
      ->check(CLI::IsMember({"conjunct-extendable", "subset-is-cause"}));
  ex->add_option("--witness", ex_witness, "actual-values | unconstrained")
      ->check(CLI::IsMember({"actual-values", "unconstrained"}));
  ex->add_option("--scope", ex_scope, "given-k | all-contexts")
      ->check(CLI::IsMember({"given-k", "all-contexts"}));
  ex->add_option("--alpha", ex_alpha, "partial mode: necessity threshold, exact rational");
  ex->add_option("--beta", ex_beta, "partial mode: sufficiency threshold, exact rational");
  ex->add_option("--max-size", ex_max_size, "candidate size cap (default: all endogenous)");
  ex->add_option("--candidate", ex_candidate, "check one conjunction instead of enumerating");

  // classifier
  auto* cl = app.add_subcommand("classifier", "depth-2 image-classifier bridge");
  cl->require_subcommand(1);

  std::string li_grid, li_labeler = "any-on";
  int li_threshold = 1;
  std::optional<std::string> li_table, li_pixel_values, li_label_values, li_corpus, li_out;
  bool li_uniform = false, li_parity = false;
  auto* li = cl->add_subcommand("lift", "lift a labeler to a causal model file");
  li->add_option("--grid", li_grid, "WIDTHxHEIGHT")->required();
  li->add_option("--labeler", li_labeler, "any-on | parity-first-pixel | threshold | table");
  li->add_option("--threshold", li_threshold, "on-pixel count for --labeler threshold");
  li->add_option("--table", li_table, "file with one label per image code for --labeler table");
  li->add_option("--pixel-values", li_pixel_values, "comma-separated pixel range (default 0,1)");
  li->add_option("--label-values", li_label_values, "comma-separated label range (default 0,1)");
  li->add_flag("--uniform", li_uniform, "uniform distribution over images");
  li->add_flag("--parity", li_parity, "the rare-event parity distribution");
  li->add_option("--corpus", li_corpus, "weighted image corpus file");
  li->add_option("--out", li_out, "output path (default <model>.cm)");

  std::string ab_model, ab_label, ab_alpha, ab_beta;
  std::optional<std::string> ab_k, ab_mask, ab_fill;
  int ab_max_size = 0;
  auto* ab = cl->add_subcommand("absence", "minimal partial explanations of a negative label");
  ab->add_option("--model", ab_model, "lifted model file")->required();
  ab->add_option("--label", ab_label, "output value to explain")->required();
  ab->add_option("--alpha", ab_alpha, "necessity threshold")->required();
  ab->add_option("--beta", ab_beta, "sufficiency threshold")->required();
  ab->add_option("--k", ab_k, "context set: 'all' or a named K");
  ab->add_option("--mask", ab_mask, "comma-separated pixels to clamp out of the search");
  ab->add_option("--fill", ab_fill, "value the masked pixels are clamped to");
  ab->add_option("--max-size", ab_max_size, "candidate size cap");

  std::string rw_model, rw_condition;
  std::optional<std::string> rw_corpus, rw_out;
  auto* rw = cl->add_subcommand("reweight", "condition the image distribution on a formula");
  rw->add_option("--model", rw_model, "lifted model file")->required();
  rw->add_option("--condition", rw_condition, "conditioning formula over the lifted model")
      ->required();
  rw->add_option("--corpus", rw_corpus, "corpus file (default: the model's distribution)");
  rw->add_option("--out", rw_out, "write the conditioned corpus here (default stdout)");

  std::string ne_grid;
  int ne_min_size = 2;
  auto* ne = cl->add_subcommand("net", "pixel lattice hitting every possible tumor square");
  ne->add_option("--grid", ne_grid, "WIDTHxHEIGHT")->required();
  ne->add_option("--min-size", ne_min_size, "smallest tumor side length");

  // verify
  int ve_theorem = 0, ve_trials = 100, ve_max_cand = 0;
  std::int64_t ve_seed = 0;
  std::optional<std::string> ve_model, ve_phi, ve_superset, ve_alpha, ve_beta;
  auto* ve = app.add_subcommand("verify", "check a theorem on a model or on random models");
  ve->add_option("theorem", ve_theorem, "1 | 2")->required()->check(CLI::IsMember({1, 2}));
  ve->add_option("--model", ve_model, "model file to sweep exhaustively");
  ve->add_option("--trials", ve_trials, "random-mode trial count (default 100)");
  ve->add_option("--seed", ve_seed, "random-mode seed");
  ve->add_option("--phi", ve_phi, "restrict the theorem-1 sweep to one formula");
  ve->add_option("--superset", ve_superset, "comma-separated theorem-1 superset");
  ve->add_option("--alpha", ve_alpha, "theorem-2 necessity threshold (default achieved)");
  ve->add_option("--beta", ve_beta, "theorem-2 sufficiency threshold (default achieved)");
  ve->add_option("--max-cand-size", ve_max_cand, "theorem-2 candidate size cap");

  // fmt
  std::string fm_model;
  auto* fm = app.add_subcommand("fmt", "print the canonical form of a model file");
  fm->add_option("model", fm_model, "model file (.cm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*cc) return cmd_check_cause(cc_model, cc_context, cc_cause, cc_phi, cc_mode, as_json);
    if (*fc) return cmd_find_causes(fc_model, fc_context, fc_phi, as_json);
    if (*ex)
      return cmd_explain(ex_model, ex_phi, ex_k, ex_definition, ex_necessity, ex_witness, ex_scope,
                         ex_alpha, ex_beta, ex_max_size, ex_candidate, as_json);
    if (*li)
      return cmd_lift(li_grid, li_labeler, li_threshold, li_table, li_pixel_values,
                      li_label_values, li_uniform, li_parity, li_corpus, li_out, as_json);
    if (*ab)
      return cmd_absence(ab_model, ab_label, ab_alpha, ab_beta, ab_k, ab_mask, ab_fill,
                         ab_max_size, as_json);
    if (*rw) return cmd_reweight(rw_model, rw_condition, rw_corpus, rw_out, as_json);
    if (*ne) return cmd_net(ne_grid, ne_min_size, as_json);
    if (*ve)
      return cmd_verify(ve_theorem, ve_model, ve_trials, ve_seed, ve_phi, ve_superset, ve_alpha,
                        ve_beta, ve_max_cand, as_json);
    if (*fm) return cmd_fmt(fm_model, as_json);
  } catch (const CliError& e) {
    std::cerr << e.text << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error[InternalError]: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
