#include "cex/core/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>

#include "enumeration.hpp"

namespace cex {

using detail::for_each_tuple;

std::string pixel_name(const GridSpec& grid, int row, int col) {
  if (row < 0 || row >= grid.height || col < 0 || col >= grid.width)
    fail(ErrorCode::InvalidArgument, "pixel coordinates outside the grid");
  if (grid.height == 1) return "X" + std::to_string(col + 1);
  return "P" + std::to_string(row) + "_" + std::to_string(col);
}

std::string pixel_name(const GridSpec& grid, int index) {
  if (grid.width <= 0) fail(ErrorCode::InvalidArgument, "grid width must be positive");
  return pixel_name(grid, index / grid.width, index % grid.width);
}

static void check_grid(const GridSpec& grid) {
  if (grid.width <= 0 || grid.height <= 0)
    fail(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  if (grid.pixel_range.size() == 0)
    fail(ErrorCode::InvalidArgument, "pixel range must be non-empty");
}

/// Number of images, guarded against overflow and the practical lift limit.
static std::uint64_t image_space(const GridSpec& grid, std::uint64_t cap) {
  std::uint64_t total = 1;
  auto r = static_cast<std::uint64_t>(grid.pixel_range.size());
  for (int i = 0; i < grid.pixel_count(); ++i) {
    if (r != 0 && total > cap / r)
      fail(ErrorCode::ScaleExceeded, "image space exceeds the scale guard");
    total *= r;
  }
  return total;
}

// A practical ceiling for dense image enumeration (lift tables, uniform and
// parity distributions); the context-space guard alone admits row lists too
// large to hold in memory.
static constexpr std::uint64_t kImageEnumerationCap = 1u << 18;

static std::uint64_t lift_cap() {
  return std::min(default_context_cap(), kImageEnumerationCap);
}

Value Labeler::label_of(const GridSpec& grid, const std::vector<int>& pixel_value_indexes) const {
  check_grid(grid);
  int n = grid.pixel_count();
  if (static_cast<int>(pixel_value_indexes.size()) != n)
    fail(ErrorCode::InvalidArgument, "image has wrong pixel count");
  for (int v : pixel_value_indexes)
    if (v < 0 || v >= grid.pixel_range.size())
      fail(ErrorCode::ValueOutOfRange, "pixel value index outside the pixel range");

  if (kind == Kind::Table) {
    std::uint64_t total = image_space(grid, default_context_cap());
    if (table.size() != total)
      fail(ErrorCode::InvalidArgument, "label table must cover every image exactly once");
    std::uint64_t code = 0;  // row-major, first pixel most significant
    for (int v : pixel_value_indexes)
      code = code * static_cast<std::uint64_t>(grid.pixel_range.size()) +
             static_cast<std::uint64_t>(v);
    const Value& out = table[code];
    if (label_range.index_of(out) < 0)
      fail(ErrorCode::ValueOutOfRange, "label table entry outside the label range");
    return out;
  }

  if (label_range.size() < 2)
    fail(ErrorCode::InvalidArgument, "builtin labelers need a binary label range");
  int bit = 0;
  switch (kind) {
    case Kind::AnyOn: {
      for (int v : pixel_value_indexes)
        if (v != 0) bit = 1;
      break;
    }
    case Kind::ParityFirstPixel: {
      // Label 0 iff the tail has an even number of zeros and either the first
      // pixel is 0 or some tail pixel is 0.
      int zeros = 0;
      for (std::size_t i = 1; i < pixel_value_indexes.size(); ++i)
        if (pixel_value_indexes[i] == 0) ++zeros;
      bool label0 = zeros % 2 == 0 && (pixel_value_indexes[0] == 0 || zeros > 0);
      bit = label0 ? 0 : 1;
      break;
    }
    case Kind::Threshold: {
      int on = 0;
      for (int v : pixel_value_indexes)
        if (v != 0) ++on;
      bit = on >= threshold ? 1 : 0;
      break;
    }
    case Kind::Table:
      break;  // unreachable
  }
  return label_range.at(bit);
}

ImageDistribution ImageDistribution::uniform(const GridSpec& grid) {
  check_grid(grid);
  std::uint64_t total = image_space(grid, lift_cap());
  ImageDistribution dist;
  dist.entries.reserve(total);
  Rat weight = Rat(1) / Rat(total);
  std::vector<int> radixes(static_cast<std::size_t>(grid.pixel_count()), grid.pixel_range.size());
  for_each_tuple(radixes, [&](const std::vector<int>& image) {
    dist.entries.emplace_back(image, weight);
    return true;
  });
  return dist;
}

/// Image (row-major indexes) -> context code of the lifted model.
static ContextCode image_code(const CausalModel& m, const std::vector<int>& pixel_exo,
                              const std::vector<int>& image) {
  std::vector<int> digits(static_cast<std::size_t>(m.exo_count()), 0);
  for (std::size_t i = 0; i < image.size(); ++i)
    digits[static_cast<std::size_t>(pixel_exo[i])] = image[i];
  return m.encode_context(digits);
}

ProbabilisticModel lift_classifier(const GridSpec& grid, const Labeler& labeler,
                                   const ImageDistribution& dist) {
  check_grid(grid);
  if (labeler.label_range.size() == 0)
    fail(ErrorCode::InvalidArgument, "label range must be non-empty");
  int n = grid.pixel_count();
  image_space(grid, lift_cap());

  Signature sig;
  std::vector<EquationSpec> eqs;
  std::vector<std::string> pixels;
  pixels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::string name = pixel_name(grid, i);
    pixels.push_back(name);
    sig.exogenous.push_back({"U_" + name, grid.pixel_range});
    sig.endogenous.push_back({name, grid.pixel_range});
    EquationSpec eq;
    eq.target = name;
    eq.expr = Expr::make_var("U_" + name);
    eqs.push_back(std::move(eq));
  }
  sig.endogenous.push_back({"O", labeler.label_range});

  TableSpec table;
  table.parents = pixels;
  table.fallback = labeler.label_range.values.front();
  std::vector<int> radixes(static_cast<std::size_t>(n), grid.pixel_range.size());
  for_each_tuple(radixes, [&](const std::vector<int>& image) {
    TableRowSpec row;
    row.inputs.reserve(image.size());
    for (int v : image) row.inputs.push_back(grid.pixel_range.at(v));
    row.output = labeler.label_of(grid, image);
    table.rows.push_back(std::move(row));
    return true;
  });
  EquationSpec out;
  out.target = "O";
  out.table = std::move(table);
  eqs.push_back(std::move(out));

  ProbabilisticModel pm;
  pm.model = CausalModel::build(std::move(sig), std::move(eqs));
  pm.k = ContextSet::everything();
  pm.output_ordinal = pm.model.require_endogenous("O");
  std::vector<int> pixel_exo;
  for (const std::string& name : pixels) {
    pm.pixel_ordinals.push_back(pm.model.require_endogenous(name));
    pixel_exo.push_back(pm.model.ordinal_of("U_" + name));
  }

  for (const auto& [image, weight] : dist.entries) {
    if (static_cast<int>(image.size()) != n)
      fail(ErrorCode::InvalidArgument, "distribution image has wrong pixel count");
    for (int v : image)
      if (v < 0 || v >= grid.pixel_range.size())
        fail(ErrorCode::ValueOutOfRange, "distribution image value outside the pixel range");
    if (weight <= 0)
      fail(ErrorCode::InvalidArgument, "image weights must be positive");
    pm.dist.weights.emplace_back(image_code(pm.model, pixel_exo, image), weight);
  }
  std::sort(pm.dist.weights.begin(), pm.dist.weights.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < pm.dist.weights.size(); ++i)
    if (pm.dist.weights[i - 1].first == pm.dist.weights[i].first)
      fail(ErrorCode::InvalidArgument, "duplicate image in the distribution");
  pm.dist.validate(pm.model);
  return pm;
}

bool is_depth2_lift(const CausalModel& m, std::vector<int>* pixels_out, int* output_out) {
  if (m.endo_count() < 1 || m.exo_count() < 1) return false;
  int output = -1;
  std::vector<int> pixels;
  std::vector<int> claimed_exo;
  for (int e = m.exo_count(); e < m.var_count(); ++e) {
    const auto& parents = m.graph().parents[static_cast<std::size_t>(e)];
    if (parents.size() == 1 && m.is_exogenous(parents[0])) {
      pixels.push_back(e);
      claimed_exo.push_back(parents[0]);
    } else {
      if (output != -1) return false;
      output = e;
    }
  }
  if (output == -1) return false;
  for (int p : m.graph().parents[static_cast<std::size_t>(output)]) {
    if (m.is_exogenous(p)) return false;
    if (!std::binary_search(pixels.begin(), pixels.end(), p)) return false;
  }
  std::sort(claimed_exo.begin(), claimed_exo.end());
  if (std::adjacent_find(claimed_exo.begin(), claimed_exo.end()) != claimed_exo.end())
    return false;  // shared exogenous parent: pixels not dedicated
  if (static_cast<int>(claimed_exo.size()) != m.exo_count()) return false;

  // Copy property: each pixel reproduces its parent's value index.
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    int e = pixels[i];
    int x = m.graph().parents[static_cast<std::size_t>(e)][0];
    if (m.var(e).range.size() != m.var(x).range.size()) return false;
    std::vector<int> digits(static_cast<std::size_t>(m.exo_count()), 0);
    for (int v = 0; v < m.var(x).range.size(); ++v) {
      digits[static_cast<std::size_t>(x)] = v;
      Assignment a = m.evaluate(m.encode_context(digits));
      if (a[static_cast<std::size_t>(e)] != v) return false;
    }
  }
  if (pixels_out) *pixels_out = pixels;
  if (output_out) *output_out = output;
  return true;
}

ImageDistribution parity_distribution(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "parity distribution needs n >= 1");
  int count = 2 * n + 1;
  if (count >= 63 || (std::uint64_t{1} << count) > lift_cap())
    fail(ErrorCode::ScaleExceeded, "parity image space exceeds the scale guard");

  // Tail parity classes split 9/10 (even number of zeros) to 1/10, uniform
  // within each class; the first pixel is fair and independent.
  Rat even_image = Rat(9, 10) / Rat(std::uint64_t{1} << (2 * n - 1)) / 2;
  Rat odd_image = Rat(1, 10) / Rat(std::uint64_t{1} << (2 * n - 1)) / 2;

  ImageDistribution dist;
  dist.entries.reserve(std::size_t{1} << count);
  std::vector<int> radixes(static_cast<std::size_t>(count), 2);
  for_each_tuple(radixes, [&](const std::vector<int>& image) {
    int zeros = 0;
    for (std::size_t i = 1; i < image.size(); ++i)
      if (image[i] == 0) ++zeros;
    dist.entries.emplace_back(image, zeros % 2 == 0 ? even_image : odd_image);
    return true;
  });
  return dist;
}

ContextSet restrict_contexts(const ProbabilisticModel& pm, const RegionMask& mask) {
  if (mask.pixels.empty()) return pm.k;
  const CausalModel& m = pm.model;
  std::vector<std::pair<int, int>> required;  // (pixel ordinal, fill index)
  for (const std::string& name : mask.pixels) {
    int ordinal = m.ordinal_of(name);
    if (ordinal < 0) fail(ErrorCode::UnknownVariable, "unknown pixel '" + name + "'");
    if (std::find(pm.pixel_ordinals.begin(), pm.pixel_ordinals.end(), ordinal) ==
        pm.pixel_ordinals.end())
      fail(ErrorCode::InvalidArgument, "'" + name + "' is not a pixel variable");
    int fill = m.var(ordinal).range.index_of(mask.fill);
    if (fill < 0)
      fail(ErrorCode::ValueOutOfRange,
           "fill value " + value_str(mask.fill) + " outside the range of '" + name + "'");
    required.emplace_back(ordinal, fill);
  }
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());

  std::vector<ContextCode> kept;
  pm.k.for_each(m, [&](ContextCode u) {
    Assignment a = m.evaluate(u);
    for (const auto& [ordinal, fill] : required)
      if (a[static_cast<std::size_t>(ordinal)] != fill) return;
    kept.push_back(u);
  });
  if (kept.empty()) fail(ErrorCode::EmptyRestriction, "no context survives the mask");
  return ContextSet::of(std::move(kept));
}

ImageDistribution rare_event_reweight(const ImageDistribution& dist, const GridSpec& grid,
                                      const Formula& condition, const ProbabilisticModel& pm) {
  check_grid(grid);
  int n = grid.pixel_count();
  if (static_cast<int>(pm.pixel_ordinals.size()) != n)
    fail(ErrorCode::InvalidArgument, "model does not match the grid");
  std::vector<int> pixel_exo;
  for (int p : pm.pixel_ordinals) {
    const auto& parents = pm.model.graph().parents[static_cast<std::size_t>(p)];
    if (parents.size() != 1 || !pm.model.is_exogenous(parents[0]))
      fail(ErrorCode::NotDepthTwo, "pixel variables must copy dedicated exogenous variables");
    pixel_exo.push_back(parents[0]);
  }

  ImageDistribution kept;
  Rat total = 0;
  for (const auto& [image, weight] : dist.entries) {
    if (static_cast<int>(image.size()) != n)
      fail(ErrorCode::InvalidArgument, "distribution image has wrong pixel count");
    for (int v : image)
      if (v < 0 || v >= grid.pixel_range.size())
        fail(ErrorCode::ValueOutOfRange, "distribution image value outside the pixel range");
    if (weight <= 0) fail(ErrorCode::InvalidArgument, "image weights must be positive");
    ContextCode u = image_code(pm.model, pixel_exo, image);
    if (satisfies(pm.model, u, condition)) {
      kept.entries.emplace_back(image, weight);
      total += weight;
    }
  }
  if (total == 0)
    fail(ErrorCode::ZeroProbabilityCondition, "the conditioning event has probability zero");
  for (auto& [image, weight] : kept.entries) weight /= total;
  return kept;
}

std::vector<std::pair<Conjunction, GoodnessPair>> explain_absence(
    const ProbabilisticModel& pm, const ContextSet& k, const Value& negative_label,
    const GoodnessPair& goodness, int max_size, const std::vector<int>& exclude_ordinals) {
  const CausalModel& m = pm.model;
  if (pm.output_ordinal < 0 || pm.output_ordinal < m.exo_count() ||
      pm.output_ordinal >= m.var_count())
    fail(ErrorCode::InvalidArgument, "model has no output variable");
  int label = m.var(pm.output_ordinal).range.index_of(negative_label);
  if (label < 0)
    fail(ErrorCode::ValueOutOfRange,
         "label " + value_str(negative_label) + " outside the output range");
  if (goodness.alpha <= 0 || goodness.alpha > 1 || goodness.beta <= 0 || goodness.beta > 1)
    fail(ErrorCode::InvalidArgument, "goodness thresholds must lie in (0, 1]");

  Formula phi = Formula::prim(pm.output_ordinal, label);
  auto candidates = evaluate_partial_candidates(m, pm.dist, k, phi, goodness,
                                                DefinitionVariant::halpern(), max_size,
                                                exclude_ordinals);
  std::vector<std::pair<Conjunction, GoodnessPair>> result;
  for (auto& [cand, verdict] : candidates)
    if (verdict.holds && verdict.achieved) result.emplace_back(cand, *verdict.achieved);
  return result;
}

ImageDistribution parse_image_corpus(const std::string& text, const GridSpec& grid) {
  check_grid(grid);
  ImageDistribution dist;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream in(line);
    std::vector<std::string> fields;
    std::string field;
    while (in >> field) fields.push_back(field);
    if (fields.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (static_cast<int>(fields.size()) != grid.pixel_count() + 1)
      fail(ErrorCode::SyntaxError, "corpus line " + std::to_string(line_no) + " needs " +
                                       std::to_string(grid.pixel_count()) +
                                       " pixel values and a weight");
    std::vector<int> image;
    image.reserve(fields.size() - 1);
    for (int i = 0; i < grid.pixel_count(); ++i) {
      Value v;
      const std::string& f = fields[static_cast<std::size_t>(i)];
      if (!f.empty() && (std::isdigit(static_cast<unsigned char>(f[0])) || f[0] == '-')) {
        try {
          v = Value(static_cast<std::int64_t>(std::stoll(f)));
        } catch (const std::exception&) {
          fail(ErrorCode::SyntaxError,
               "corpus line " + std::to_string(line_no) + ": bad pixel value '" + f + "'");
        }
      } else {
        v = Value(f);
      }
      int index = grid.pixel_range.index_of(v);
      if (index < 0)
        fail(ErrorCode::ValueOutOfRange, "corpus line " + std::to_string(line_no) +
                                             ": pixel value " + value_str(v) +
                                             " outside the pixel range");
      image.push_back(index);
    }
    dist.entries.emplace_back(std::move(image), parse_rational(fields.back()));
    if (pos > text.size()) break;
  }
  return dist;
}

std::string format_image_corpus(const ImageDistribution& dist, const GridSpec& grid) {
  check_grid(grid);
  std::string out;
  for (const auto& [image, weight] : dist.entries) {
    if (static_cast<int>(image.size()) != grid.pixel_count())
      fail(ErrorCode::InvalidArgument, "distribution image has wrong pixel count");
    for (int v : image) {
      if (v < 0 || v >= grid.pixel_range.size())
        fail(ErrorCode::ValueOutOfRange, "distribution image value outside the pixel range");
      out += value_str(grid.pixel_range.at(v));
      out += ' ';
    }
    out += rational_str(weight);
    out += '\n';
  }
  return out;
}

std::vector<std::pair<int, int>> pixel_net(int width, int height, int min_tumor_size) {
  if (width <= 0 || height <= 0)
    fail(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  if (min_tumor_size < 2) fail(ErrorCode::InvalidArgument, "minimum tumor size must be >= 2");
  if (width < min_tumor_size || height < min_tumor_size)
    return {{0, 0}};  // no square fits; a single pixel suffices

  // Rows/columns congruent to s-1 (mod s): any s consecutive indexes contain
  // exactly one, so every s-by-s square holds a lattice point.
  std::vector<int> rows, cols;
  for (int r = min_tumor_size - 1; r < height; r += min_tumor_size) rows.push_back(r);
  for (int c = min_tumor_size - 1; c < width; c += min_tumor_size) cols.push_back(c);
  std::vector<std::pair<int, int>> net;
  for (int r : rows)
    for (int c : cols) net.emplace_back(r, c);
  return net;
}

}  // namespace cex
