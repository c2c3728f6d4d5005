#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "svcmd/block_metrics.hpp"
#include "svcmd/frame.hpp"
#include "svcmd/mode_classifier.hpp"

namespace svcmd {

/// Integer-pel displacement; positive points right/down in the reference.
struct MotionVector {
  int dx = 0;
  int dy = 0;

  bool operator==(const MotionVector&) const = default;
};

inline MotionVector operator-(MotionVector a, MotionVector b) { return {a.dx - b.dx, a.dy - b.dy}; }

double lambda_mode(int qp);
double lambda_motion(int qp);

/// Componentwise median; unavailable neighbours count as (0,0).
MotionVector median_pmv(std::optional<MotionVector> left, std::optional<MotionVector> top,
                        std::optional<MotionVector> top_right);

/// Exp-Golomb length of both MVD components under signed code mapping.
int mv_bits(MotionVector mv, MotionVector pmv);

/// A w x h block of the current picture.
struct Block {
  PlaneView plane;
  int x = 0;
  int y = 0;
  int w = 16;
  int h = 16;
};

struct Position {
  int x = 0;
  int y = 0;
};

struct SearchResult {
  MotionVector mv;
  uint32_t sad = 0;
  double cost = 0.0;
  int64_t evaluations = 0;
};

inline constexpr std::array<int, 4> kSearchRanges = {2, 4, 8, 32};

// Exhaustive integer search of every displacement with |dx|,|dy| <= range whose
// window lies inside ref. `center` is where the zero displacement lands in ref.
// Cost is SAD + lambda_motion(qp) * mv_bits; ties go to the smaller |dx|+|dy|,
// then smaller dy, then smaller dx.
SearchResult full_search_mv(const Block& block, PlaneView ref, Position center, int range, MotionVector pmv, int qp);

/// Which reference pictures a prediction reads from.
enum class PredictionDirection : uint8_t { None, Forward, Backward, Bi, InterLayer };

std::string_view direction_name(PredictionDirection dir);

struct ModeCost {
  PartitionMode mode = PartitionMode::Skip;
  PredictionDirection direction = PredictionDirection::None;
  std::vector<MotionVector> mvs_fwd;  // one per partition when the forward list is used
  std::vector<MotionVector> mvs_bwd;  // one per partition when the backward list is used
  int64_t distortion = 0;             // SSD of reconstruction vs source
  int64_t bits = 0;
  int64_t residual_bits = 0;  // 0 when every quantized level is zero
  double j_cost = 0.0;
  int64_t evaluations = 0;
  std::array<uint8_t, 256> recon{};
};

/// Everything a macroblock decision reads. Planes must outlive the context.
struct MbContext {
  PlaneView source;
  int mb_x = 0;
  int mb_y = 0;
  int qp = 28;
  std::optional<PlaneView> fwd_ref;
  std::optional<PlaneView> bwd_ref;
  std::optional<PlaneView> inter_layer;  // upsampled base-layer reconstruction
  std::optional<PlaneView> recon;        // current picture, reconstructed up to this MB
  MotionVector pmv_fwd;
  MotionVector pmv_bwd;

  MacroblockView mb() const { return {source, mb_x, mb_y}; }
};

struct ModeDecision {
  ModeCost best;
  ClassLabel label = ClassLabel::C4;
  DecisionPlan plan;
  int64_t total_evaluations = 0;
};

/// Reconstructed border samples available to DC intra prediction.
struct IntraNeighbors {
  std::optional<std::array<uint8_t, 16>> top;
  std::optional<std::array<uint8_t, 16>> left;

  static IntraNeighbors from_plane(PlaneView recon, int mb_x, int mb_y);
};

struct PartitionRect {
  int x = 0;  // offsets inside the MB, in pixels
  int y = 0;
  int w = 16;
  int h = 16;
};

/// Partition layout of an inter mode in raster order.
std::vector<PartitionRect> partitions_of(PartitionMode mode);

/// Pixel-domain residual coding against a 16x16 prediction.
struct ResidualCoding {
  std::array<uint8_t, 256> recon{};
  int64_t distortion = 0;
  int64_t bits = 0;
};

// Every sample goes through quant_recon. A 4x4 block whose levels are all zero
// costs no bits; otherwise it costs the sum of ue_golomb_len(|level|).
ResidualCoding code_residual(const MacroblockView& mb, std::span<const uint8_t, 256> prediction, int qp);

// Motion search of one macroblock against one reference. The SAD of every 4x4
// unit at every candidate displacement is computed once and the best vector of
// all 41 inter partitions is tracked in the same pass. Results match
// full_search_mv run on each partition separately.
class MbMotionSearch {
 public:
  MbMotionSearch(const MacroblockView& mb, PlaneView ref, int range, MotionVector pmv, int qp);

  /// One result per partition of `mode`, in partitions_of order.
  std::vector<SearchResult> search(PartitionMode mode) const;
  int range() const { return range_; }

 private:
  int range_;
  std::array<std::vector<SearchResult>, 7> results_;  // indexed by mode_index - 1
};

ModeCost skip_cost(const MacroblockView& mb, PlaneView ref, MotionVector pmv, int qp);

ModeCost intra_dc_cost(const MacroblockView& mb, const IntraNeighbors& neighbors, int qp);

/// Inter-layer candidate: zero-displacement copy of the upsampled base layer plus residual and a 1-bit flag.
ModeCost inter_layer_cost(const MacroblockView& mb, PlaneView upsampled_base, int qp);

// Runs the plan's range over every available reference for one inter mode and
// returns the cheapest direction. Throws if the mode is not in the plan.
ModeCost evaluate_partition_mode(const MbContext& ctx, PartitionMode mode, const DecisionPlan& plan);

// Evaluates exactly the plan's modes and returns the minimum-J candidate; ties
// keep the earlier mode in plan order.
ModeDecision choose_mb_mode(const MbContext& ctx, const DecisionPlan& plan);

}  // namespace svcmd
