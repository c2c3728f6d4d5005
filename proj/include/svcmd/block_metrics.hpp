#pragma once

#include <cstdint>

#include "svcmd/frame.hpp"

namespace svcmd {

/// 16x16 luma window at an MB-aligned position. p(i, j): i horizontal, j vertical.
class MacroblockView {
 public:
  MacroblockView(PlaneView plane, int mb_x, int mb_y);

  uint8_t operator()(int i, int j) const { return plane_.at(x0_ + i, y0_ + j); }
  const uint8_t* row(int j) const { return plane_.row(y0_ + j) + x0_; }

  int mb_x() const { return mb_x_; }
  int mb_y() const { return mb_y_; }
  int x() const { return x0_; }
  int y() const { return y0_; }
  const PlaneView& plane() const { return plane_; }

 private:
  PlaneView plane_;
  int mb_x_;
  int mb_y_;
  int x0_;
  int y0_;
};

/// Top-left corner of an arbitrary block window inside a plane.
struct BlockWindow {
  PlaneView plane;
  int x = 0;
  int y = 0;
};

/// Intensity centroid in MB-local coordinates.
struct Centroid {
  double gx = 7.5;
  double gy = 7.5;
};

// Absolute value of the signed sum of co-located differences over all 256
// samples. Zero-mean perturbations cancel, unlike SAD.
int32_t sod(const MacroblockView& current, const MacroblockView& reference);

// (7.5, 7.5) for an all-zero block.
Centroid cog(const MacroblockView& mb);

// Euclidean distance between the two centroids; in [0, 15*sqrt(2)].
double dcog(const MacroblockView& current, const MacroblockView& reference);

// w, h in {4, 8, 16}; both windows must lie inside their planes.
uint32_t block_sad(const BlockWindow& current, const BlockWindow& reference, int w, int h);

inline constexpr double kPsnrCap = 99.99;

double frame_psnr_y(const Frame& a, const Frame& b);

/// Length of the unsigned Exp-Golomb code for v: 2*floor(log2(v+1)) + 1.
int ue_golomb_len(uint32_t v);

double quant_step(int qp);

struct QuantResult {
  int level = 0;
  int recon = 0;
};

// Scalar quantizer on one residual sample. Rounding is to nearest with ties to
// even, so any |r| <= Qstep/2 maps to level 0.
QuantResult quant_recon(int residual, int qp);

}  // namespace svcmd
