#pragma once

#include <string>
#include <vector>

#include "cex/core/explanation.hpp"

namespace cex {

struct GridSpec {
  int width = 0;
  int height = 0;
  ValueRange pixel_range = ValueRange::boolean();

  int pixel_count() const { return width * height; }
};

/// Pixel naming: X1..Xn for one-row grids, P<row>_<col> otherwise.
std::string pixel_name(const GridSpec& grid, int row, int col);
std::string pixel_name(const GridSpec& grid, int index);  // row-major

/// Total function from images to labels. Builtins cover the corpus; arbitrary
/// classifiers are given as a dense table over row-major image codes.
struct Labeler {
  enum class Kind { AnyOn, ParityFirstPixel, Threshold, Table };
  Kind kind = Kind::AnyOn;
  int threshold = 1;                 // Kind::Threshold
  std::vector<Value> table;          // Kind::Table, indexed by image code
  ValueRange label_range = ValueRange::boolean();

  Value label_of(const GridSpec& grid, const std::vector<int>& pixel_value_indexes) const;
};

/// Weights over images (pixel value-index tuples, row-major).
struct ImageDistribution {
  std::vector<std::pair<std::vector<int>, Rat>> entries;

  static ImageDistribution uniform(const GridSpec& grid);
};

struct RegionMask {
  std::vector<std::string> pixels;  // masked pixel names
  Value fill;
};

/// Depth-2 lift: one exogenous variable per pixel, pixel equations copy them,
/// a single output variable applies the labeler.
struct ProbabilisticModel {
  CausalModel model;
  ContextDistribution dist;
  ContextSet k = ContextSet::everything();
  std::vector<int> pixel_ordinals;
  int output_ordinal = -1;
};

ProbabilisticModel lift_classifier(const GridSpec& grid, const Labeler& labeler,
                                   const ImageDistribution& dist);

/// Shape test: every endogenous variable except one copies a dedicated
/// exogenous variable; the remaining output depends only on those copies.
bool is_depth2_lift(const CausalModel& m, std::vector<int>* pixels_out = nullptr,
                    int* output_out = nullptr);

/// First-pixel parity family over 2n+1 binary pixels: the even-parity tail
/// class carries mass 9/10, uniform within each class, first pixel fair.
ImageDistribution parity_distribution(int n);

/// Contexts whose images assign `fill` to every masked pixel.
ContextSet restrict_contexts(const ProbabilisticModel& pm, const RegionMask& mask);

/// Exact conditional distribution given a formula over pixels and label.
ImageDistribution rare_event_reweight(const ImageDistribution& dist, const GridSpec& grid,
                                      const Formula& condition, const ProbabilisticModel& pm);

/// Minimal partial explanations of O = negative_label meeting the goodness
/// thresholds, with achieved values. Thresholds must lie in (0, 1].
std::vector<std::pair<Conjunction, GoodnessPair>> explain_absence(
    const ProbabilisticModel& pm, const ContextSet& k, const Value& negative_label,
    const GoodnessPair& goodness, int max_size, const std::vector<int>& exclude_ordinals = {});

/// Lattice of (row, col) pixels hitting every axis-aligned square of side
/// `min_tumor_size` that fits in the grid. min_tumor_size >= 2.
std::vector<std::pair<int, int>> pixel_net(int width, int height, int min_tumor_size);

/// Corpus text: one image per line, pixel values space-separated in row-major
/// order, then a rational weight (p/q or exact decimal); '#' starts a comment.
ImageDistribution parse_image_corpus(const std::string& text, const GridSpec& grid);
std::string format_image_corpus(const ImageDistribution& dist, const GridSpec& grid);

}  // namespace cex
