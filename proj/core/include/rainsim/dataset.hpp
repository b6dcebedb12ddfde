#pragma once
// Batch dataset generation: for every clear/depth pair in the input
// directories, draw a fixed number of parameter sets from published
// sampling ranges and emit one rainy variant per draw, together with a
// JSON manifest that makes every output bit-reproducible and a CSV of
// PSNR/SSIM against the clear input.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rainsim/pipeline.hpp"
#include "rainsim/raster.hpp"

namespace rainsim {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Per-variant sampling ranges. Streak length and width scale with the
// image: the drawn fraction is multiplied by s = min(width, height) to get
// pixels. Defaults reproduce the published generation protocol.
struct SamplingRanges {
  Interval mu{0.005, 0.05};
  Interval length_frac{0.05, 0.2};
  Interval width_frac{0.005, 0.025};
  Interval direction_deg{-30.0, 30.0};
  Interval A{0.7, 1.0};
  Interval alpha{0.6, 0.9};
  int variants_per_image = 14;
};

void validate(const SamplingRanges& r);

// Canonical JSON echo of the ranges; fixed key order and number formatting
// so configuration can be compared by string equality.
std::string ranges_to_json(const SamplingRanges& r);

// Draws one parameter set, each value uniform in its range, as a pure
// function of the seed. min_side_px scales the fractional streak sizes.
RainParams sample_params(const SamplingRanges& ranges, int min_side_px,
                         std::uint64_t seed);

// Everything needed to reproduce one emitted file bit-for-bit.
struct SynthesisRecord {
  std::string source_path;
  std::string depth_path;
  std::string output_path;
  std::string model_variant;  // "unified" for dataset outputs
  int image_index = 0;
  int variant_index = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;
  double length_px = 0.0;
  double width_px = 0.0;
  double direction_deg = 0.0;
  double alpha = 0.0;
  double A = 0.0;
  double d_step = 0.5;
  int p_max = 8;
  double max_depth_cap = 100.0;
  double depth_scale = 1.0;
  std::string software_version;
};

RainParams params_from_record(const SynthesisRecord& rec);

// Re-runs the synthesis a record describes, loading its inputs from disk.
ClearImage synthesize_from_record(const SynthesisRecord& rec);

struct Manifest {
  std::string created;  // UTC timestamp; excluded from determinism checks
  std::string software_version;
  std::uint64_t master_seed = 0;
  double d_step = 0.5;
  int p_max = 8;
  double max_depth_cap = 100.0;
  double depth_scale = 1.0;
  SamplingRanges ranges;
  std::vector<std::string> notes;  // skipped inputs and other warnings
  std::vector<SynthesisRecord> records;
};

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

struct DatasetOptions {
  SamplingRanges ranges;
  std::uint64_t master_seed = 0;
  double d_step = 0.5;
  int p_max = 8;
  double max_depth_cap = 100.0;
  double depth_scale = 1.0;
  int threads = 0;  // image-level workers; 0 = hardware count
};

// Pairs every PNG in clear_dir with a same-stem depth file in depth_dir
// (.pfm preferred, then .png), synthesizes ranges.variants_per_image
// variants per pair with per-variant seeds derived from (master_seed,
// image index, variant index), and writes outputs, manifest.json and
// metrics.csv into out_dir. Unpaired images are skipped with a note.
Manifest build_dataset(const std::filesystem::path& clear_dir,
                       const std::filesystem::path& depth_dir,
                       const std::filesystem::path& out_dir,
                       const DatasetOptions& options);

}  // namespace rainsim
