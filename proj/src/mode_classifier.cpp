#include "svcmd/mode_classifier.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace svcmd {

std::string_view mode_name(PartitionMode mode) {
  switch (mode) {
    case PartitionMode::Skip: return "SKIP";
    case PartitionMode::P16x16: return "16x16";
    case PartitionMode::P16x8: return "16x8";
    case PartitionMode::P8x16: return "8x16";
    case PartitionMode::P8x8: return "8x8";
    case PartitionMode::P8x4: return "8x4";
    case PartitionMode::P4x8: return "4x8";
    case PartitionMode::P4x4: return "4x4";
    case PartitionMode::Intra: return "INTRA";
  }
  return "?";
}

bool is_inter_partition(PartitionMode mode) {
  return mode != PartitionMode::Skip && mode != PartitionMode::Intra;
}

std::string_view class_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::C1: return "C1";
    case ClassLabel::C2: return "C2";
    case ClassLabel::C3: return "C3";
    case ClassLabel::C4: return "C4";
  }
  return "?";
}

void Thresholds::validate() const {
  if (!valid()) {
    throw std::invalid_argument("thresholds must satisfy 0 < k1 < k2 < k3 and 0 < d1 < d2 < d3");
  }
}

bool DecisionPlan::allows(PartitionMode mode) const {
  return std::find(modes.begin(), modes.end(), mode) != modes.end();
}

ClassLabel classify_mb(int64_t sod, double dcog, int qp, const Thresholds& t) {
  t.validate();
  if (qp < 0 || qp > 51) throw std::out_of_range("qp " + std::to_string(qp) + " outside [0, 51]");

  const double s = static_cast<double>(sod);
  if (s <= qp * t.k1 && dcog <= qp * t.d1) return ClassLabel::C1;
  if (s <= qp * t.k2 && dcog <= qp * t.d2) return ClassLabel::C2;
  if (s <= qp * t.k3 && dcog <= qp * t.d3) return ClassLabel::C3;
  return ClassLabel::C4;
}

DecisionPlan plan_for_class(ClassLabel label) {
  using M = PartitionMode;
  switch (label) {
    case ClassLabel::C1:
      return {label, 2, {M::Skip, M::P16x16}};
    case ClassLabel::C2:
      return {label, 4, {M::P16x16, M::P16x8, M::P8x16, M::P8x8}};
    case ClassLabel::C3:
      return {label, 8, {M::P16x16, M::P16x8, M::P8x16, M::P8x8, M::P8x4, M::P4x8, M::P4x4}};
    case ClassLabel::C4:
      break;
  }
  return {ClassLabel::C4, 32, {kAllModes.begin(), kAllModes.end()}};
}

}  // namespace svcmd
