#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace svcmd {

enum class PartitionMode : uint8_t { Skip, P16x16, P16x8, P8x16, P8x8, P8x4, P4x8, P4x4, Intra };

inline constexpr std::array<PartitionMode, 9> kAllModes = {
    PartitionMode::Skip, PartitionMode::P16x16, PartitionMode::P16x8, PartitionMode::P8x16, PartitionMode::P8x8,
    PartitionMode::P8x4, PartitionMode::P4x8,   PartitionMode::P4x4,  PartitionMode::Intra};

std::string_view mode_name(PartitionMode mode);
/// Fixed index used for mode signaling bits (Skip = 0 ... Intra = 8).
inline int mode_index(PartitionMode mode) { return static_cast<int>(mode); }
bool is_inter_partition(PartitionMode mode);

enum class ClassLabel : uint8_t { C1 = 1, C2 = 2, C3 = 3, C4 = 4 };

std::string_view class_name(ClassLabel label);
inline int class_index(ClassLabel label) { return static_cast<int>(label); }

/// QP-scaled tier multipliers: tier n accepts sod <= qp*k_n and dcog <= qp*d_n.
struct Thresholds {
  double k1 = 4.0;
  double k2 = 10.0;
  double k3 = 20.0;
  double d1 = 0.5;
  double d2 = 1.5;
  double d3 = 3.0;

  bool valid() const { return 0 < k1 && k1 < k2 && k2 < k3 && 0 < d1 && d1 < d2 && d2 < d3; }
  /// Throws std::invalid_argument when the ordering constraints fail.
  void validate() const;

  bool operator==(const Thresholds&) const = default;
};

struct DecisionPlan {
  ClassLabel label = ClassLabel::C4;
  int search_range = 32;
  std::vector<PartitionMode> modes;

  bool allows(PartitionMode mode) const;
};

ClassLabel classify_mb(int64_t sod, double dcog, int qp, const Thresholds& t);

DecisionPlan plan_for_class(ClassLabel label);

/// Exhaustive reference plan: range 32, every mode. Its label is recorded as C4.
inline DecisionPlan baseline_plan() { return plan_for_class(ClassLabel::C4); }

}  // namespace svcmd
