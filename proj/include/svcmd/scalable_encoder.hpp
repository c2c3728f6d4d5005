#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svcmd/frame.hpp"
#include "svcmd/mode_classifier.hpp"
#include "svcmd/motion_search.hpp"

namespace svcmd {

// ---------------------------------------------------------------------------
// Temporal structure

enum class FrameKind : uint8_t { Key, B };

struct GopEntry {
  int index = 0;
  int level = 0;
  FrameKind kind = FrameKind::Key;
  std::optional<int> fwd_ref;  // nearest earlier frame of lower level
  std::optional<int> bwd_ref;  // nearest later frame of lower level
};

struct GopSchedule {
  int gop_size = 1;
  int max_level = 0;
  std::vector<GopEntry> entries;  // indexed by frame number

  /// Frames sorted by (level, index): every frame follows both of its references.
  std::vector<int> decode_order() const;
  /// Frame numbers with temporal level <= max_kept, ascending.
  std::vector<int> frames_up_to_level(int max_kept) const;
};

// Dyadic hierarchy: offset o inside a GOP gets level log2(gop) - ctz(o), o == 0
// is a key frame. A trailing partial GOP is closed by turning the last frame
// into a key frame. gop_size must be a power of two in [1, 32].
GopSchedule build_gop_schedule(int gop_size, int num_frames);

// ---------------------------------------------------------------------------
// Configuration

enum class Strategy : uint8_t { Proposed, Baseline };
enum class LayerMode : uint8_t { Single, Scalable };
enum class LayerRole : uint8_t { Base, Enhancement };

std::string_view strategy_name(Strategy s);
std::string_view layer_mode_name(LayerMode m);
std::string_view role_name(LayerRole r);

/// One operating point: QPs for the base layer, the enhancement layer below its
/// top temporal level (EL1) and the top level itself (EL2).
struct QpPoint {
  int bl = 28;
  int el1 = 28;
  int el2 = 28;

  static QpPoint uniform(int qp) { return {qp, qp, qp}; }
  /// "28" when all three agree, "24/28/32" otherwise.
  std::string label() const;
  void validate() const;
  bool operator==(const QpPoint&) const = default;
};

/// Default operating points, lowest QP first.
inline const std::vector<QpPoint> kDefaultQpPoints = {{16, 20, 24}, {20, 24, 30}, {24, 28, 32}, {28, 32, 36}};

struct EncoderConfig {
  int gop_size = 16;
  QpPoint qp;
  Thresholds thresholds;
  LayerMode layers = LayerMode::Scalable;
  int jobs = 1;
};

struct LayerConfig {
  int id = 0;
  LayerRole role = LayerRole::Enhancement;
  int width = 0;
  int height = 0;
  int frame_rate_divisor = 1;
  int gop_size = 16;
  int qp = 28;      // key frames and every level below the top one
  int qp_top = 28;  // top temporal level
  bool inter_layer = false;
};

struct LayerInput {
  LayerConfig config;
  Sequence frames;
};

// Single: one layer at source resolution. Scalable: a base layer made of every
// second source frame mean-pooled to half size, plus the full-rate enhancement
// layer at source size. The base layer uses half the GOP length so both layers
// share key instants.
std::vector<LayerInput> build_layer_inputs(const Sequence& source, const EncoderConfig& config);

// ---------------------------------------------------------------------------
// Reports

struct MbRecord {
  int mb_x = 0;
  int mb_y = 0;
  int32_t sod = 0;
  double dcog = 0.0;
  std::optional<ClassLabel> label;  // empty on key frames
  PartitionMode mode = PartitionMode::Intra;
  PredictionDirection direction = PredictionDirection::None;
  std::vector<MotionVector> mvs_fwd;
  std::vector<MotionVector> mvs_bwd;
  int64_t bits = 0;
  int64_t residual_bits = 0;
  int64_t distortion = 0;
  int64_t evaluations = 0;
};

using ClassCounts = std::array<int64_t, 4>;
using ModeCounts = std::array<int64_t, 9>;
using DirectionCounts = std::array<int64_t, 5>;

struct FrameReport {
  int index = 0;
  int level = 0;
  FrameKind kind = FrameKind::Key;
  int qp = 0;
  int64_t bits = 0;
  double psnr_y = 0.0;
  int64_t evaluations = 0;
  ClassCounts class_counts{};
  ModeCounts mode_counts{};
  DirectionCounts direction_counts{};
  std::vector<MbRecord> mbs;
};

struct LayerReport {
  LayerConfig config;
  double frame_rate = 0.0;
  int frame_count = 0;
  double avg_psnr_y = 0.0;
  int64_t total_bits = 0;
  double rate_kbps = 0.0;
  int64_t evaluations = 0;
  double wall_ms = 0.0;
  int64_t mb_total = 0;
  int64_t key_mbs = 0;
  int64_t inter_mbs = 0;
  ClassCounts class_counts{};  // over inter (B-frame) MBs; sums to inter_mbs
  ModeCounts mode_counts{};    // over all MBs; sums to mb_total
  DirectionCounts direction_counts{};
  std::vector<FrameReport> frames;
};

struct RdSample {
  std::string qp_label;
  double rate_kbps = 0.0;
  double psnr_y = 0.0;
};

struct EncodeReport {
  Strategy strategy = Strategy::Proposed;
  EncoderConfig config;
  std::vector<LayerReport> layers;
  /// Whole stream: summed layer rates against the top layer's mean PSNR.
  RdSample operating_point;
  int64_t total_evaluations = 0;
  double total_wall_ms = 0.0;
};

// ---------------------------------------------------------------------------
// Encoding

struct FrameRefs {
  const Frame* fwd_recon = nullptr;
  const Frame* bwd_recon = nullptr;
  const Frame* fwd_source = nullptr;   // original picture the classifier compares against
  const Frame* inter_layer = nullptr;  // upsampled base reconstruction, enhancement layer only
};

struct EncodedFrame {
  Frame recon;
  FrameReport report;
};

// Key frames: DC intra for every MB. B frames: raster-order MB loop with
// classification against the co-located MB of the forward reference, then
// choose_mb_mode under the strategy's plan. Chroma is carried over unchanged.
EncodedFrame encode_frame(const Frame& source, const GopEntry& entry, const FrameRefs& refs, int qp,
                          Strategy strategy, const Thresholds& thresholds);

EncodeReport encode_sequence(const Sequence& source, const EncoderConfig& config, Strategy strategy);

}  // namespace svcmd
