#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdp/rng.hpp"
#include "mdp/tensor.hpp"

namespace mdp::corpus {

enum class Modality : std::uint8_t { kVisual = 0, kAudio = 1 };

enum class ModalityType { kReal, kVisualOnly, kAudioOnly, kAudioVisual };

std::string_view to_string(ModalityType type);
ModalityType modality_type_from_string(std::string_view name);

struct SegmentSpan {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }
  friend bool operator==(const SegmentSpan&, const SegmentSpan&) = default;
};

struct VideoAnnotation {
  std::string video_id;
  double duration_s = 0.0;
  int label = 0;  // 0 genuine, 1 forged
  std::vector<SegmentSpan> segments;
  ModalityType modality_type = ModalityType::kReal;

  friend bool operator==(const VideoAnnotation&, const VideoAnnotation&) = default;
};

// Throws ValidationError naming the video when an invariant is broken:
// label/segment consistency, sorted disjoint spans inside [0, duration].
void validate(const VideoAnnotation& annotation);

// One modality's frame-level stream. Stored at 32-bit (on-disk) precision;
// align::tokenize widens to double.
struct FeatureMatrix {
  Modality modality = Modality::kVisual;
  float frames_per_s = 1.0f;
  std::uint32_t n_frames = 0;
  std::uint32_t raw_dim = 0;
  std::vector<float> data;  // n_frames x raw_dim, row-major

  std::span<const float> frame(std::size_t t) const {
    return {data.data() + t * raw_dim, raw_dim};
  }
  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

// MDPF layout (little-endian):
//   "MDPF" | version u8=1 | dtype u8=1 (f32) | modality u8 | pad u8=0 |
//   frames_per_s f32 | rows u32 | cols u32 | rows*cols f32
void write_features(const std::filesystem::path& path, const FeatureMatrix& f);
FeatureMatrix read_features(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_features(const FeatureMatrix& f);
FeatureMatrix decode_features(std::span<const std::uint8_t> bytes);

// {"videos":[{"video_id","duration_s","label","modality_type","segments":[...]}]}
void write_annotations(const std::filesystem::path& path,
                       const std::vector<VideoAnnotation>& videos);
std::vector<VideoAnnotation> read_annotations(const std::filesystem::path& path);

// Video-level labels only. Segment spans are never parsed, so nothing on
// the training path can depend on them.
struct VideoLabel {
  std::string video_id;
  double duration_s = 0.0;
  int label = 0;
};
std::vector<VideoLabel> read_video_labels(const std::filesystem::path& path);

struct ForgerySpec {
  std::size_t k_segments = 1;
  double dur_min_s = 0.4;
  double dur_max_s = 1.6;
  ModalityType modality_type = ModalityType::kAudioVisual;
  double shift = 0.5;
  bool decouple = true;
};

struct ModalityMix {
  double visual_only = 0.0;
  double audio_only = 0.0;
  double audio_visual = 1.0;
};

struct GenConfig {
  double duration_min_s = 8.0;
  double duration_max_s = 16.0;
  double fps_v = 8.0;
  double fps_a = 32.0;
  std::size_t raw_dim_v = 48;
  std::size_t raw_dim_a = 24;
  std::size_t latent_dim = 8;
  double latent_step = 0.05;
  std::size_t smooth_w = 8;
  double noise_std = 0.05;
  // Upper bound on the mean adjacent-frame L2 difference of a genuine
  // visual stream under this config (calibrated over 100 seeds: max 0.70).
  double genuine_diff_cap = 0.75;
  std::size_t n_train = 500;
  std::size_t n_test = 100;
  double forged_ratio = 0.5;
  ModalityMix modality_mix;
  // Everything except modality_type, which is drawn from modality_mix.
  ForgerySpec forgery;
  std::uint64_t seed = 0;
};

// Throws ConfigError naming the offending field.
void validate(const GenConfig& cfg);

// Fixed per-dataset projections from the latent space to each modality.
struct MixingMatrices {
  Tensor2D visual;  // raw_dim_v x latent_dim
  Tensor2D audio;   // raw_dim_a x latent_dim
};
MixingMatrices make_mixing(const GenConfig& cfg, std::uint64_t dataset_seed);

// A genuine pair plus the latent trajectory it was rendered from; the
// latent is in-memory only and lets inject_forgery re-render spans.
struct SyntheticVideo {
  FeatureMatrix visual;
  FeatureMatrix audio;
  VideoAnnotation annotation;
  Tensor2D latent;  // n_latent x latent_dim, sampled at max(fps_v, fps_a)
  double latent_rate = 0.0;
};

SyntheticVideo generate_genuine(const GenConfig& cfg, const MixingMatrices& mix,
                                std::uint64_t seed, std::string video_id = "video");

// Replaces the affected modality frames inside k sampled disjoint spans.
// Throws PlacementError when the spans cannot be placed.
SyntheticVideo inject_forgery(const SyntheticVideo& genuine, const GenConfig& cfg,
                              const MixingMatrices& mix, const ForgerySpec& spec,
                              std::uint64_t seed);

// Mean L2 distance between consecutive frames.
double mean_adjacent_difference(const FeatureMatrix& f);

struct ManifestRecord {
  std::string video_id;
  std::filesystem::path visual;  // relative to the manifest directory
  std::filesystem::path audio;
};

struct DatasetManifest {
  std::string split;
  std::uint64_t seed = 0;
  GenConfig config;
  std::filesystem::path annotations = "annotations.json";
  std::vector<ManifestRecord> records;
  // Directory the manifest was loaded from or written to.
  std::filesystem::path root;
};

void write_manifest(const std::filesystem::path& dir, const DatasetManifest& m);
// Validates unique ids and that every referenced feature file exists.
DatasetManifest read_manifest(const std::filesystem::path& dir);

// Writes <dir>/manifest.json, annotations.json and features/*.mdpf for one
// split. Class and modality mixes follow cfg exactly (largest remainder).
DatasetManifest generate_split(const GenConfig& cfg, std::string_view split,
                               std::size_t count, const std::filesystem::path& dir);

struct Dataset {
  DatasetManifest train;
  DatasetManifest test;
};
// <out>/train and <out>/test.
Dataset generate_dataset(const GenConfig& cfg, const std::filesystem::path& out);

// Largest-remainder apportionment of `total` over `weights` (ties to the
// lower index).
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights);

}  // namespace mdp::corpus
