#include "rainsim/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <deque>
#include <fstream>
#include <future>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rainsim/image_io.hpp"
#include "rainsim/metrics.hpp"
#include "rainsim/rng.hpp"
#include "rainsim/version.hpp"

namespace rainsim {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_interval(const Interval& iv, const char* name, double lo_min, double hi_max) {
  if (!(iv.lo <= iv.hi)) {
    throw std::invalid_argument(std::string("SamplingRanges: ") + name +
                                " low bound exceeds high bound");
  }
  if (!(iv.lo >= lo_min && iv.hi <= hi_max)) {
    throw std::invalid_argument(std::string("SamplingRanges: ") + name +
                                " outside its admissible domain");
  }
}

// Shortest decimal form, matching common JSON emitters ("0.05", "1", "-30").
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string interval_json(const Interval& iv) {
  return "[" + num(iv.lo) + "," + num(iv.hi) + "]";
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

ordered_json ranges_to_node(const SamplingRanges& r) {
  ordered_json j;
  j["mu"] = {r.mu.lo, r.mu.hi};
  j["length_frac"] = {r.length_frac.lo, r.length_frac.hi};
  j["width_frac"] = {r.width_frac.lo, r.width_frac.hi};
  j["direction_deg"] = {r.direction_deg.lo, r.direction_deg.hi};
  j["A"] = {r.A.lo, r.A.hi};
  j["alpha"] = {r.alpha.lo, r.alpha.hi};
  j["variants_per_image"] = r.variants_per_image;
  return j;
}

SamplingRanges ranges_from_node(const ordered_json& j) {
  SamplingRanges r;
  const auto iv = [&j](const char* key) {
    const auto& a = j.at(key);
    return Interval{a.at(0).get<double>(), a.at(1).get<double>()};
  };
  r.mu = iv("mu");
  r.length_frac = iv("length_frac");
  r.width_frac = iv("width_frac");
  r.direction_deg = iv("direction_deg");
  r.A = iv("A");
  r.alpha = iv("alpha");
  r.variants_per_image = j.at("variants_per_image").get<int>();
  return r;
}

ordered_json record_to_node(const SynthesisRecord& rec) {
  ordered_json j;
  j["source_path"] = rec.source_path;
  j["depth_path"] = rec.depth_path;
  j["output_path"] = rec.output_path;
  j["model_variant"] = rec.model_variant;
  j["image_index"] = rec.image_index;
  j["variant_index"] = rec.variant_index;
  j["seed"] = rec.seed;
  j["mu"] = rec.mu;
  j["length_px"] = rec.length_px;
  j["width_px"] = rec.width_px;
  j["direction_deg"] = rec.direction_deg;
  j["alpha"] = rec.alpha;
  j["A"] = rec.A;
  j["d_step"] = rec.d_step;
  j["p_max"] = rec.p_max;
  j["max_depth_cap"] = rec.max_depth_cap;
  j["depth_scale"] = rec.depth_scale;
  j["software_version"] = rec.software_version;
  return j;
}

SynthesisRecord record_from_node(const ordered_json& j) {
  SynthesisRecord rec;
  rec.source_path = j.at("source_path").get<std::string>();
  rec.depth_path = j.at("depth_path").get<std::string>();
  rec.output_path = j.at("output_path").get<std::string>();
  rec.model_variant = j.at("model_variant").get<std::string>();
  rec.image_index = j.at("image_index").get<int>();
  rec.variant_index = j.at("variant_index").get<int>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.mu = j.at("mu").get<double>();
  rec.length_px = j.at("length_px").get<double>();
  rec.width_px = j.at("width_px").get<double>();
  rec.direction_deg = j.at("direction_deg").get<double>();
  rec.alpha = j.at("alpha").get<double>();
  rec.A = j.at("A").get<double>();
  rec.d_step = j.at("d_step").get<double>();
  rec.p_max = j.at("p_max").get<int>();
  rec.max_depth_cap = j.at("max_depth_cap").get<double>();
  rec.depth_scale = j.at("depth_scale").get<double>();
  rec.software_version = j.at("software_version").get<std::string>();
  return rec;
}

}  // namespace

void validate(const SamplingRanges& r) {
  check_interval(r.mu, "mu", 0.0, 1.0);
  check_interval(r.length_frac, "length_frac", 0.0, 1.0);
  check_interval(r.width_frac, "width_frac", 0.0, 1.0);
  check_interval(r.direction_deg, "direction_deg", -90.0, 90.0);
  check_interval(r.A, "A", 0.0, 1.0);
  check_interval(r.alpha, "alpha", 0.0, 1.0);
  if (!(r.width_frac.hi <= r.length_frac.lo)) {
    throw std::invalid_argument(
        "SamplingRanges: width_frac must stay below length_frac so every "
        "drawn kernel is valid");
  }
  if (r.variants_per_image < 1) {
    throw std::invalid_argument("SamplingRanges: variants_per_image must be at least 1");
  }
}

std::string ranges_to_json(const SamplingRanges& r) {
  return std::string("{\"mu\":") + interval_json(r.mu) +
         ",\"length_frac\":" + interval_json(r.length_frac) +
         ",\"width_frac\":" + interval_json(r.width_frac) +
         ",\"direction_deg\":" + interval_json(r.direction_deg) +
         ",\"A\":" + interval_json(r.A) + ",\"alpha\":" + interval_json(r.alpha) +
         ",\"variants_per_image\":" + std::to_string(r.variants_per_image) + "}";
}

RainParams sample_params(const SamplingRanges& ranges, int min_side_px,
                         std::uint64_t seed) {
  validate(ranges);
  if (min_side_px < 1) {
    throw std::invalid_argument("sample_params: min_side_px must be positive");
  }
  Rng rng(seed);
  RainParams p;
  p.seed = seed;
  // Draw order is part of the determinism contract; do not reorder.
  p.mu = rng.uniform(ranges.mu.lo, ranges.mu.hi);
  p.kernel.length = rng.uniform(ranges.length_frac.lo, ranges.length_frac.hi) *
                    static_cast<double>(min_side_px);
  p.kernel.width = rng.uniform(ranges.width_frac.lo, ranges.width_frac.hi) *
                   static_cast<double>(min_side_px);
  p.kernel.direction_deg = rng.uniform(ranges.direction_deg.lo, ranges.direction_deg.hi);
  p.A = rng.uniform(ranges.A.lo, ranges.A.hi);
  p.alpha = rng.uniform(ranges.alpha.lo, ranges.alpha.hi);
  return p;
}

RainParams params_from_record(const SynthesisRecord& rec) {
  RainParams p;
  p.seed = rec.seed;
  p.mu = rec.mu;
  p.kernel.length = rec.length_px;
  p.kernel.width = rec.width_px;
  p.kernel.direction_deg = rec.direction_deg;
  p.alpha = rec.alpha;
  p.A = rec.A;
  p.d_step = rec.d_step;
  p.p_max = rec.p_max;
  p.max_depth_cap = rec.max_depth_cap;
  return p;
}

ClearImage synthesize_from_record(const SynthesisRecord& rec) {
  const ClearImage clear = load_image(rec.source_path);
  const DepthMap depth = load_depth(rec.depth_path, rec.depth_scale);
  return synthesize_rain(clear, depth, params_from_record(rec));
}

std::string manifest_to_json(const Manifest& m) {
  ordered_json j;
  j["created"] = m.created;
  j["software_version"] = m.software_version;
  j["master_seed"] = m.master_seed;
  j["d_step"] = m.d_step;
  j["p_max"] = m.p_max;
  j["max_depth_cap"] = m.max_depth_cap;
  j["depth_scale"] = m.depth_scale;
  j["ranges"] = ranges_to_node(m.ranges);
  j["notes"] = m.notes;
  j["records"] = ordered_json::array();
  for (const SynthesisRecord& rec : m.records) {
    j["records"].push_back(record_to_node(rec));
  }
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  Manifest m;
  m.created = j.at("created").get<std::string>();
  m.software_version = j.at("software_version").get<std::string>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.d_step = j.at("d_step").get<double>();
  m.p_max = j.at("p_max").get<int>();
  m.max_depth_cap = j.at("max_depth_cap").get<double>();
  m.depth_scale = j.at("depth_scale").get<double>();
  m.ranges = ranges_from_node(j.at("ranges"));
  m.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& rec : j.at("records")) {
    m.records.push_back(record_from_node(rec));
  }
  return m;
}

namespace {

struct WorkItem {
  int image_index = 0;
  std::filesystem::path clear_path;
  std::filesystem::path depth_path;
};

struct ImageResult {
  std::vector<SynthesisRecord> records;
  std::vector<std::pair<double, double>> metrics;  // psnr, ssim per record
  std::string note;  // nonempty if the image was skipped
};

bool iequals_ext(const std::filesystem::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

ImageResult process_image(const WorkItem& item, const std::filesystem::path& out_dir,
                          const DatasetOptions& opt) {
  ImageResult result;
  const ClearImage clear = load_image(item.clear_path);
  const DepthMap depth = load_depth(item.depth_path, opt.depth_scale);
  if (!same_size(clear, depth)) {
    throw std::runtime_error(item.clear_path.string() +
                             ": depth dimensions do not match the image");
  }
  const int min_side = std::min(clear.width, clear.height);
  const std::string stem = item.clear_path.stem().string();

  for (int v = 0; v < opt.ranges.variants_per_image; ++v) {
    const std::uint64_t seed =
        mix64(opt.master_seed, static_cast<std::uint64_t>(item.image_index),
              static_cast<std::uint64_t>(v));
    RainParams params = sample_params(opt.ranges, min_side, seed);
    params.d_step = opt.d_step;
    params.p_max = opt.p_max;
    params.max_depth_cap = opt.max_depth_cap;
    params.threads = 1;

    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_rain_v%02d.png", v);
    const std::filesystem::path out_path = out_dir / (stem + suffix);

    const ClearImage rainy = synthesize_rain(clear, depth, params);
    save_image(rainy, out_path);

    SynthesisRecord rec;
    rec.source_path = item.clear_path.string();
    rec.depth_path = item.depth_path.string();
    rec.output_path = out_path.string();
    rec.model_variant = "unified";
    rec.image_index = item.image_index;
    rec.variant_index = v;
    rec.seed = seed;
    rec.mu = params.mu;
    rec.length_px = params.kernel.length;
    rec.width_px = params.kernel.width;
    rec.direction_deg = params.kernel.direction_deg;
    rec.alpha = params.alpha;
    rec.A = params.A;
    rec.d_step = opt.d_step;
    rec.p_max = opt.p_max;
    rec.max_depth_cap = opt.max_depth_cap;
    rec.depth_scale = opt.depth_scale;
    rec.software_version = kVersion;
    result.records.push_back(std::move(rec));
    result.metrics.emplace_back(psnr(clear, rainy), ssim(clear, rainy));
  }
  return result;
}

}  // namespace

Manifest build_dataset(const std::filesystem::path& clear_dir,
                       const std::filesystem::path& depth_dir,
                       const std::filesystem::path& out_dir,
                       const DatasetOptions& opt) {
  validate(opt.ranges);
  if (!(opt.d_step > 0.0) || opt.p_max < 1 || !(opt.max_depth_cap > 0.0) ||
      !(opt.depth_scale > 0.0)) {
    throw std::invalid_argument("build_dataset: invalid slicing or depth options");
  }
  if (!std::filesystem::is_directory(clear_dir)) {
    throw std::runtime_error(clear_dir.string() + ": not a directory");
  }
  if (!std::filesystem::is_directory(depth_dir)) {
    throw std::runtime_error(depth_dir.string() + ": not a directory");
  }
  std::filesystem::create_directories(out_dir);

  std::vector<std::filesystem::path> clear_paths;
  for (const auto& entry : std::filesystem::directory_iterator(clear_dir)) {
    if (entry.is_regular_file() && iequals_ext(entry.path(), ".png")) {
      clear_paths.push_back(entry.path());
    }
  }
  std::sort(clear_paths.begin(), clear_paths.end(),
            [](const std::filesystem::path& a, const std::filesystem::path& b) {
              return a.filename().string() < b.filename().string();
            });

  Manifest manifest;
  manifest.created = timestamp_utc();
  manifest.software_version = kVersion;
  manifest.master_seed = opt.master_seed;
  manifest.d_step = opt.d_step;
  manifest.p_max = opt.p_max;
  manifest.max_depth_cap = opt.max_depth_cap;
  manifest.depth_scale = opt.depth_scale;
  manifest.ranges = opt.ranges;

  std::vector<WorkItem> items;
  for (std::size_t i = 0; i < clear_paths.size(); ++i) {
    WorkItem item;
    item.image_index = static_cast<int>(i);
    item.clear_path = clear_paths[i];
    const std::string stem = clear_paths[i].stem().string();
    const std::filesystem::path pfm = depth_dir / (stem + ".pfm");
    const std::filesystem::path png = depth_dir / (stem + ".png");
    if (std::filesystem::is_regular_file(pfm)) {
      item.depth_path = pfm;
    } else if (std::filesystem::is_regular_file(png)) {
      item.depth_path = png;
    } else {
      manifest.notes.push_back("skipped " + clear_paths[i].string() +
                               ": no depth map named " + stem + ".pfm or " + stem +
                               ".png in " + depth_dir.string());
      std::fprintf(stderr, "warning: %s\n", manifest.notes.back().c_str());
      continue;
    }
    items.push_back(std::move(item));
  }

  std::vector<ImageResult> results(items.size());
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers =
      opt.threads > 0 ? opt.threads : static_cast<int>(hw == 0 ? 1 : std::min(hw, 64u));

  if (workers <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      results[i] = process_image(items[i], out_dir, opt);
    }
  } else {
    std::deque<std::pair<std::size_t, std::future<ImageResult>>> pending;
    std::size_t next = 0;
    while (next < items.size() || !pending.empty()) {
      while (next < items.size() && pending.size() < static_cast<std::size_t>(workers)) {
        const std::size_t i = next++;
        pending.emplace_back(i, std::async(std::launch::async, [&items, &out_dir, &opt, i] {
                               return process_image(items[i], out_dir, opt);
                             }));
      }
      auto& front = pending.front();
      results[front.first] = front.second.get();
      pending.pop_front();
    }
  }

  struct Row {
    SynthesisRecord record;
    double psnr_db = 0.0;
    double ssim_value = 0.0;
  };
  std::vector<Row> rows;
  for (ImageResult& res : results) {
    for (std::size_t r = 0; r < res.records.size(); ++r) {
      rows.push_back(Row{std::move(res.records[r]), res.metrics[r].first,
                         res.metrics[r].second});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.record.source_path != b.record.source_path) {
      return a.record.source_path < b.record.source_path;
    }
    return a.record.variant_index < b.record.variant_index;
  });

  std::string csv = "source,variant,model,PSNR_dB,SSIM\n";
  for (Row& row : rows) {
    char line[512];
    std::snprintf(line, sizeof(line), "%s,%s,%s,%.6f,%.6f\n",
                  row.record.source_path.c_str(),
                  std::filesystem::path(row.record.output_path).filename().string().c_str(),
                  row.record.model_variant.c_str(), row.psnr_db, row.ssim_value);
    csv += line;
    manifest.records.push_back(std::move(row.record));
  }

  {
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest_to_json(manifest);
  }
  {
    std::ofstream out(out_dir / "metrics.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write metrics.csv");
    out << csv;
  }
  return manifest;
}

}  // namespace rainsim
