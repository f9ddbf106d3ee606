#include "mdp/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include "config_json.hpp"
#include "json_util.hpp"
#include "mdp/error.hpp"

namespace mdp::corpus {
namespace fs = std::filesystem;
using detail::json;

std::string_view to_string(ModalityType type) {
  switch (type) {
    case ModalityType::kReal: return "real";
    case ModalityType::kVisualOnly: return "visual_only";
    case ModalityType::kAudioOnly: return "audio_only";
    case ModalityType::kAudioVisual: return "audio_visual";
  }
  return "real";
}

ModalityType modality_type_from_string(std::string_view name) {
  if (name == "real") return ModalityType::kReal;
  if (name == "visual_only") return ModalityType::kVisualOnly;
  if (name == "audio_only") return ModalityType::kAudioOnly;
  if (name == "audio_visual") return ModalityType::kAudioVisual;
  throw ValidationError("unknown modality_type '" + std::string(name) + "'");
}

void validate(const VideoAnnotation& a) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("video '" + a.video_id + "': " + what);
  };
  if (a.video_id.empty()) throw ValidationError("video with empty video_id");
  if (!(a.duration_s > 0.0) || !std::isfinite(a.duration_s)) fail("duration_s must be > 0");
  if (a.label != 0 && a.label != 1) fail("label must be 0 or 1");
  if (a.label == 0 && !a.segments.empty()) fail("genuine video has segments");
  if (a.label == 1 && a.segments.empty()) fail("forged video has no segments");
  if (a.label == 1 && a.modality_type == ModalityType::kReal) {
    fail("forged video has modality_type real");
  }
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    const auto& s = a.segments[i];
    if (!(s.start_s >= 0.0) || !(s.start_s < s.end_s) || !(s.end_s <= a.duration_s)) {
      fail("segment " + std::to_string(i) + " outside [0, duration] or empty");
    }
    if (i > 0 && !(a.segments[i - 1].end_s <= s.start_s)) {
      fail("segments " + std::to_string(i - 1) + " and " + std::to_string(i) +
           " overlap or are unsorted");
    }
  }
}

// ---------------------------------------------------------------- MDPF --

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_features(const FeatureMatrix& f) {
  if (f.data.size() != static_cast<std::size_t>(f.n_frames) * f.raw_dim) {
    throw DimensionError("feature matrix data length does not match " +
                         std::to_string(f.n_frames) + "x" + std::to_string(f.raw_dim));
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * f.data.size());
  for (char c : {'M', 'D', 'P', 'F'}) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(1);  // version
  out.push_back(1);  // dtype f32
  out.push_back(static_cast<std::uint8_t>(f.modality));
  out.push_back(0);
  put_u32(out, std::bit_cast<std::uint32_t>(f.frames_per_s));
  put_u32(out, f.n_frames);
  put_u32(out, f.raw_dim);
  for (float v : f.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

FeatureMatrix decode_features(std::span<const std::uint8_t> in) {
  if (in.size() < 4) throw LengthError("MDPF: file shorter than magic");
  if (!(in[0] == 'M' && in[1] == 'D' && in[2] == 'P' && in[3] == 'F')) {
    throw FormatError("MDPF: bad magic");
  }
  if (in.size() < kHeaderBytes) throw LengthError("MDPF: truncated header");
  if (in[4] != 1) throw FormatError("MDPF: unsupported version " + std::to_string(in[4]));
  if (in[5] != 1) throw FormatError("MDPF: unsupported dtype " + std::to_string(in[5]));
  if (in[6] > 1) throw FormatError("MDPF: unknown modality " + std::to_string(in[6]));
  if (in[7] != 0) throw FormatError("MDPF: nonzero pad byte");

  FeatureMatrix f;
  f.modality = static_cast<Modality>(in[6]);
  f.frames_per_s = std::bit_cast<float>(get_u32(in, 8));
  f.n_frames = get_u32(in, 12);
  f.raw_dim = get_u32(in, 16);
  if (!(f.frames_per_s > 0.0f) || !std::isfinite(f.frames_per_s)) {
    throw FormatError("MDPF: frames_per_s must be > 0");
  }
  const std::uint64_t count = static_cast<std::uint64_t>(f.n_frames) * f.raw_dim;
  const std::uint64_t payload = in.size() - kHeaderBytes;
  if (payload != count * 4) {
    throw LengthError("MDPF: header declares " + std::to_string(f.n_frames) + "x" +
                      std::to_string(f.raw_dim) + " floats but payload has " +
                      std::to_string(payload) + " bytes");
  }
  f.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    f.data[i] = std::bit_cast<float>(get_u32(in, kHeaderBytes + 4 * i));
  }
  return f;
}

void write_features(const fs::path& path, const FeatureMatrix& f) {
  const auto bytes = encode_features(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureMatrix read_features(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_features(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const LengthError& e) {
    throw LengthError(path.string() + ": " + e.what());
  }
}

// --------------------------------------------------------- annotations --

namespace {

using Reader = detail::ObjectReader<ValidationError>;

json annotation_to_json(const VideoAnnotation& a) {
  json segs = json::array();
  for (const auto& s : a.segments) segs.push_back({{"start_s", s.start_s}, {"end_s", s.end_s}});
  return {{"video_id", a.video_id},
          {"duration_s", a.duration_s},
          {"label", a.label},
          {"modality_type", std::string(to_string(a.modality_type))},
          {"segments", segs}};
}

VideoAnnotation annotation_from_json(const json& j, const std::string& where) {
  Reader r(j, where);
  VideoAnnotation a;
  a.video_id = r.get<std::string>("video_id");
  a.duration_s = r.get<double>("duration_s");
  a.label = r.get<int>("label");
  a.modality_type = modality_type_from_string(r.get<std::string>("modality_type"));
  const json& segs = r.required("segments");
  if (!segs.is_array()) Reader::fail(r.field("segments"), "expected an array");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    Reader sr(segs[i], r.field("segments") + "[" + std::to_string(i) + "]");
    a.segments.push_back({sr.get<double>("start_s"), sr.get<double>("end_s")});
    sr.reject_unknown();
  }
  r.reject_unknown();
  return a;
}

const json& videos_array(const json& doc, const fs::path& path) {
  if (!doc.is_object() || !doc.contains("videos") || !doc.at("videos").is_array()) {
    throw ValidationError(path.string() + ": videos: missing or not an array");
  }
  return doc.at("videos");
}

}  // namespace

void write_annotations(const fs::path& path, const std::vector<VideoAnnotation>& videos) {
  json arr = json::array();
  for (const auto& v : videos) {
    validate(v);
    arr.push_back(annotation_to_json(v));
  }
  detail::save_json_file(path, json{{"videos", arr}});
}

std::vector<VideoAnnotation> read_annotations(const fs::path& path) {
  const json doc = detail::load_json_file(path);
  const json& arr = videos_array(doc, path);
  std::vector<VideoAnnotation> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto a = annotation_from_json(arr[i], "videos[" + std::to_string(i) + "]");
    validate(a);
    if (!ids.insert(a.video_id).second) {
      throw ValidationError("duplicate video_id '" + a.video_id + "'");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<VideoLabel> read_video_labels(const fs::path& path) {
  const json doc = detail::load_json_file(path);
  const json& arr = videos_array(doc, path);
  std::vector<VideoLabel> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader r(arr[i], "videos[" + std::to_string(i) + "]");
    VideoLabel v{r.get<std::string>("video_id"), r.get<double>("duration_s"),
                 r.get<int>("label")};
    if (v.label != 0 && v.label != 1) {
      throw ValidationError("video '" + v.video_id + "': label must be 0 or 1");
    }
    out.push_back(std::move(v));
  }
  return out;
}

// ----------------------------------------------------------- generator --

void validate(const GenConfig& c) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ConfigError("data." + field + ": " + what);
  };
  auto positive = [&](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be > 0");
  };
  positive("duration_min_s", c.duration_min_s);
  positive("duration_max_s", c.duration_max_s);
  if (c.duration_max_s < c.duration_min_s) fail("duration_max_s", "must be >= duration_min_s");
  positive("fps_v", c.fps_v);
  positive("fps_a", c.fps_a);
  if (c.raw_dim_v == 0) fail("raw_dim_v", "must be > 0");
  if (c.raw_dim_a == 0) fail("raw_dim_a", "must be > 0");
  if (c.latent_dim == 0) fail("latent_dim", "must be > 0");
  if (c.smooth_w == 0) fail("smooth_w", "must be > 0");
  if (!(c.latent_step >= 0.0)) fail("latent_step", "must be >= 0");
  if (!(c.noise_std >= 0.0)) fail("noise_std", "must be >= 0");
  if (!(c.forged_ratio >= 0.0 && c.forged_ratio <= 1.0)) fail("forged_ratio", "must be in [0, 1]");
  const auto& m = c.modality_mix;
  if (m.visual_only < 0 || m.audio_only < 0 || m.audio_visual < 0 ||
      !(m.visual_only + m.audio_only + m.audio_visual > 0.0)) {
    fail("modality_mix", "weights must be >= 0 with a positive sum");
  }
  const auto& f = c.forgery;
  positive("forgery.dur_min_s", f.dur_min_s);
  if (f.dur_max_s < f.dur_min_s) fail("forgery.dur_max_s", "must be >= dur_min_s");
  if (!std::isfinite(f.shift)) fail("forgery.shift", "must be finite");
}

MixingMatrices make_mixing(const GenConfig& cfg, std::uint64_t dataset_seed) {
  Xoshiro256 rng(derive_seed(dataset_seed, 0xA11CE));
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));
  MixingMatrices m{Tensor2D(cfg.raw_dim_v, cfg.latent_dim),
                   Tensor2D(cfg.raw_dim_a, cfg.latent_dim)};
  for (double& v : m.visual.data()) v = rng.normal(0.0, scale);
  for (double& v : m.audio.data()) v = rng.normal(0.0, scale);
  return m;
}

namespace {

// Seeded random walk followed by a trailing moving average (edge padded).
Tensor2D smooth_walk(Xoshiro256& rng, std::size_t n, const GenConfig& cfg) {
  const std::size_t k = cfg.latent_dim;
  Tensor2D walk(n, k);
  for (std::size_t j = 0; j < k; ++j) walk(0, j) = rng.normal();
  for (std::size_t t = 1; t < n; ++t)
    for (std::size_t j = 0; j < k; ++j) walk(t, j) = walk(t - 1, j) + rng.normal(0.0, cfg.latent_step);

  const std::size_t w = cfg.smooth_w;
  Tensor2D out(n, k);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < w; ++q) {
        const std::size_t src = t >= q ? t - q : 0;
        s += walk(src, j);
      }
      out(t, j) = s / static_cast<double>(w);
    }
  }
  return out;
}

std::size_t latent_index(std::size_t frame, double fps, double rate, std::size_t n_latent) {
  const auto idx = static_cast<std::size_t>(std::floor(static_cast<double>(frame) * rate / fps));
  return std::min(idx, n_latent - 1);
}

void render_frame(FeatureMatrix& f, std::size_t frame, const Tensor2D& mixing,
                  std::span<const double> z, double noise_std, double shift,
                  Xoshiro256& rng) {
  for (std::size_t r = 0; r < f.raw_dim; ++r) {
    double v = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) v += mixing(r, j) * z[j];
    v += rng.normal(0.0, noise_std) + shift;
    f.data[frame * f.raw_dim + r] = static_cast<float>(v);
  }
}

FeatureMatrix render(Modality modality, double fps, std::size_t raw_dim,
                     std::size_t n_frames, const Tensor2D& mixing,
                     const Tensor2D& latent, double rate, double noise_std,
                     Xoshiro256& rng) {
  FeatureMatrix f;
  f.modality = modality;
  f.frames_per_s = static_cast<float>(fps);
  f.n_frames = static_cast<std::uint32_t>(n_frames);
  f.raw_dim = static_cast<std::uint32_t>(raw_dim);
  f.data.assign(n_frames * raw_dim, 0.0f);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const auto idx = latent_index(i, fps, rate, latent.rows());
    render_frame(f, i, mixing, latent.row(idx), noise_std, 0.0, rng);
  }
  return f;
}

}  // namespace

SyntheticVideo generate_genuine(const GenConfig& cfg, const MixingMatrices& mix,
                                std::uint64_t seed, std::string video_id) {
  validate(cfg);
  Xoshiro256 rng(seed);
  const double duration = rng.uniform(cfg.duration_min_s, cfg.duration_max_s);
  const double rate = std::max(cfg.fps_v, cfg.fps_a);
  const auto n_v = static_cast<std::size_t>(std::llround(duration * cfg.fps_v));
  const auto n_a = static_cast<std::size_t>(std::llround(duration * cfg.fps_a));
  const auto n_latent = static_cast<std::size_t>(std::ceil(duration * rate)) + 1;

  SyntheticVideo v;
  v.latent = smooth_walk(rng, n_latent, cfg);
  v.latent_rate = rate;
  v.visual = render(Modality::kVisual, cfg.fps_v, cfg.raw_dim_v, n_v, mix.visual,
                    v.latent, rate, cfg.noise_std, rng);
  v.audio = render(Modality::kAudio, cfg.fps_a, cfg.raw_dim_a, n_a, mix.audio,
                   v.latent, rate, cfg.noise_std, rng);
  v.annotation.video_id = std::move(video_id);
  v.annotation.duration_s = duration;
  v.annotation.label = 0;
  v.annotation.modality_type = ModalityType::kReal;
  return v;
}

SyntheticVideo inject_forgery(const SyntheticVideo& genuine, const GenConfig& cfg,
                              const MixingMatrices& mix, const ForgerySpec& spec,
                              std::uint64_t seed) {
  if (spec.k_segments == 0) return genuine;
  if (spec.modality_type == ModalityType::kReal) {
    throw ContractError("inject_forgery: modality_type real cannot carry forged segments");
  }
  const double duration = genuine.annotation.duration_s;
  Xoshiro256 rng(seed);

  // Sequential rejection sampling of disjoint spans, restarting the whole
  // placement when one span cannot be fit.
  constexpr int kMaxRestarts = 200;
  constexpr int kMaxTriesPerSpan = 100;
  std::vector<SegmentSpan> spans;
  bool placed = false;
  for (int restart = 0; restart < kMaxRestarts && !placed; ++restart) {
    spans.clear();
    placed = true;
    for (std::size_t k = 0; k < spec.k_segments && placed; ++k) {
      const double len = rng.uniform(spec.dur_min_s, spec.dur_max_s);
      if (len >= duration) {
        placed = false;
        break;
      }
      bool ok = false;
      for (int attempt = 0; attempt < kMaxTriesPerSpan && !ok; ++attempt) {
        const double start = rng.uniform(0.0, duration - len);
        const SegmentSpan cand{start, start + len};
        ok = std::none_of(spans.begin(), spans.end(), [&](const SegmentSpan& s) {
          return cand.start_s <= s.end_s && s.start_s <= cand.end_s;
        });
        if (ok) spans.push_back(cand);
      }
      placed = ok;
    }
  }
  if (!placed) {
    throw PlacementError("cannot place " + std::to_string(spec.k_segments) +
                         " disjoint segments in a " + std::to_string(duration) + " s video");
  }
  std::sort(spans.begin(), spans.end(),
            [](const SegmentSpan& a, const SegmentSpan& b) { return a.start_s < b.start_s; });

  SyntheticVideo out = genuine;
  const Tensor2D fresh = spec.decouple ? smooth_walk(rng, genuine.latent.rows(), cfg) : Tensor2D();
  const Tensor2D& source = spec.decouple ? fresh : genuine.latent;

  auto in_span = [&](double t) {
    return std::any_of(spans.begin(), spans.end(),
                       [t](const SegmentSpan& s) { return t >= s.start_s && t < s.end_s; });
  };
  auto rewrite = [&](FeatureMatrix& f, const Tensor2D& mixing) {
    const double fps = f.frames_per_s;
    for (std::size_t i = 0; i < f.n_frames; ++i) {
      if (!in_span(static_cast<double>(i) / fps)) continue;
      const auto idx = latent_index(i, fps, genuine.latent_rate, source.rows());
      render_frame(f, i, mixing, source.row(idx), cfg.noise_std, spec.shift, rng);
    }
  };
  const bool visual = spec.modality_type == ModalityType::kVisualOnly ||
                      spec.modality_type == ModalityType::kAudioVisual;
  const bool audio = spec.modality_type == ModalityType::kAudioOnly ||
                     spec.modality_type == ModalityType::kAudioVisual;
  if (visual) rewrite(out.visual, mix.visual);
  if (audio) rewrite(out.audio, mix.audio);

  out.annotation.label = 1;
  out.annotation.segments = spans;
  out.annotation.modality_type = spec.modality_type;
  return out;
}

double mean_adjacent_difference(const FeatureMatrix& f) {
  if (f.n_frames < 2) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < f.n_frames; ++t) {
    const auto a = f.frame(t);
    const auto b = f.frame(t + 1);
    double s = 0.0;
    for (std::size_t j = 0; j < f.raw_dim; ++j) {
      const double d = static_cast<double>(b[j]) - static_cast<double>(a[j]);
      s += d * d;
    }
    total += std::sqrt(s);
  }
  return total / static_cast<double>(f.n_frames - 1);
}

// ------------------------------------------------------------ datasets --

std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(sum > 0.0)) throw ContractError("apportion: weights must sum > 0");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) counts[order[i % order.size()]]++;
  return counts;
}

void write_manifest(const fs::path& dir, const DatasetManifest& m) {
  json records = json::array();
  for (const auto& r : m.records) {
    records.push_back({{"video_id", r.video_id},
                       {"visual", r.visual.generic_string()},
                       {"audio", r.audio.generic_string()}});
  }
  json doc = {{"split", m.split},
              {"seed", m.seed},
              {"annotations", m.annotations.generic_string()},
              {"config", detail::gen_config_to_json(m.config)},
              {"records", records}};
  detail::save_json_file(dir / "manifest.json", doc);
}

DatasetManifest read_manifest(const fs::path& dir) {
  const json doc = detail::load_json_file(dir / "manifest.json");
  Reader r(doc, "manifest");
  DatasetManifest m;
  m.root = dir;
  m.split = r.get<std::string>("split");
  m.seed = r.get<std::uint64_t>("seed");
  m.annotations = r.get<std::string>("annotations");
  try {
    m.config = detail::gen_config_from_json(r.required("config"), "manifest.config");
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }
  const json& recs = r.required("records");
  if (!recs.is_array()) Reader::fail("manifest.records", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    Reader rr(recs[i], "manifest.records[" + std::to_string(i) + "]");
    ManifestRecord rec{rr.get<std::string>("video_id"), rr.get<std::string>("visual"),
                       rr.get<std::string>("audio")};
    rr.reject_unknown();
    if (!ids.insert(rec.video_id).second) {
      throw ValidationError("manifest: duplicate video_id '" + rec.video_id + "'");
    }
    for (const auto* p : {&rec.visual, &rec.audio}) {
      if (!fs::exists(dir / *p)) {
        throw IoError("manifest: missing feature file " + (dir / *p).string());
      }
    }
    m.records.push_back(std::move(rec));
  }
  r.reject_unknown();
  return m;
}

DatasetManifest generate_split(const GenConfig& cfg, std::string_view split,
                               std::size_t count, const fs::path& dir) {
  validate(cfg);
  if (count == 0) throw ConfigError("data: split '" + std::string(split) + "' has no videos");
  const std::uint64_t split_seed = derive_seed(cfg.seed, split == "train" ? 1 : 2);
  const MixingMatrices mix = make_mixing(cfg, cfg.seed);

  const std::array<double, 2> class_w{1.0 - cfg.forged_ratio, cfg.forged_ratio};
  const auto classes = apportion(count, class_w);
  const auto& mm = cfg.modality_mix;
  const std::array<double, 3> type_w{mm.visual_only, mm.audio_only, mm.audio_visual};
  const auto types = apportion(classes[1], type_w);

  std::vector<ModalityType> plan(classes[0], ModalityType::kReal);
  plan.insert(plan.end(), types[0], ModalityType::kVisualOnly);
  plan.insert(plan.end(), types[1], ModalityType::kAudioOnly);
  plan.insert(plan.end(), types[2], ModalityType::kAudioVisual);
  Xoshiro256 shuffle_rng(split_seed);
  for (std::size_t i = plan.size(); i > 1; --i) {
    std::swap(plan[i - 1], plan[shuffle_rng.below(i)]);
  }

  std::error_code ec;
  fs::create_directories(dir / "features", ec);
  if (ec) throw IoError("cannot create " + (dir / "features").string() + ": " + ec.message());

  DatasetManifest m;
  m.split = std::string(split);
  m.seed = cfg.seed;
  m.config = cfg;
  m.root = dir;
  std::vector<VideoAnnotation> annotations;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s_%05zu", m.split.c_str(), i);
    const std::uint64_t video_seed = derive_seed(split_seed, 1000 + i);
    SyntheticVideo v = generate_genuine(cfg, mix, derive_seed(video_seed, 0), id);
    if (plan[i] != ModalityType::kReal) {
      ForgerySpec spec = cfg.forgery;
      spec.modality_type = plan[i];
      v = inject_forgery(v, cfg, mix, spec, derive_seed(video_seed, 1));
    }
    ManifestRecord rec{id, fs::path("features") / (std::string(id) + ".visual.mdpf"),
                       fs::path("features") / (std::string(id) + ".audio.mdpf")};
    write_features(dir / rec.visual, v.visual);
    write_features(dir / rec.audio, v.audio);
    annotations.push_back(v.annotation);
    m.records.push_back(std::move(rec));
  }
  write_annotations(dir / m.annotations, annotations);
  write_manifest(dir, m);
  return m;
}

Dataset generate_dataset(const GenConfig& cfg, const fs::path& out) {
  Dataset d;
  d.train = generate_split(cfg, "train", cfg.n_train, out / "train");
  d.test = generate_split(cfg, "test", cfg.n_test, out / "test");
  return d;
}

}  // namespace mdp::corpus
