#include "svcmd/block_metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace svcmd {

MacroblockView::MacroblockView(PlaneView plane, int mb_x, int mb_y)
    : plane_(plane), mb_x_(mb_x), mb_y_(mb_y), x0_(mb_x * kMbSize), y0_(mb_y * kMbSize) {
  if (mb_x < 0 || mb_y < 0 || !plane_.contains(x0_, y0_, kMbSize, kMbSize)) {
    throw std::out_of_range("macroblock (" + std::to_string(mb_x) + "," + std::to_string(mb_y) +
                            ") lies outside the plane");
  }
}

int32_t sod(const MacroblockView& current, const MacroblockView& reference) {
  int32_t sum = 0;
  for (int j = 0; j < kMbSize; ++j) {
    const uint8_t* c = current.row(j);
    const uint8_t* r = reference.row(j);
    for (int i = 0; i < kMbSize; ++i) sum += static_cast<int32_t>(c[i]) - r[i];
  }
  return std::abs(sum);
}

Centroid cog(const MacroblockView& mb) {
  int64_t mass = 0;
  int64_t moment_x = 0;
  int64_t moment_y = 0;
  for (int j = 0; j < kMbSize; ++j) {
    const uint8_t* row = mb.row(j);
    int64_t row_mass = 0;
    for (int i = 0; i < kMbSize; ++i) {
      row_mass += row[i];
      moment_x += static_cast<int64_t>(row[i]) * i;
    }
    mass += row_mass;
    moment_y += row_mass * j;
  }
  if (mass == 0) return {};
  return {static_cast<double>(moment_x) / static_cast<double>(mass),
          static_cast<double>(moment_y) / static_cast<double>(mass)};
}

double dcog(const MacroblockView& current, const MacroblockView& reference) {
  const Centroid c = cog(current);
  const Centroid r = cog(reference);
  return std::hypot(c.gx - r.gx, c.gy - r.gy);
}

uint32_t block_sad(const BlockWindow& current, const BlockWindow& reference, int w, int h) {
  auto valid_size = [](int s) { return s == 4 || s == 8 || s == 16; };
  if (!valid_size(w) || !valid_size(h)) throw std::invalid_argument("block_sad: block size must be 4, 8 or 16");
  if (!current.plane.contains(current.x, current.y, w, h) ||
      !reference.plane.contains(reference.x, reference.y, w, h)) {
    throw std::out_of_range("block_sad: window outside plane");
  }
  uint32_t sad = 0;
  for (int j = 0; j < h; ++j) {
    const uint8_t* c = current.plane.row(current.y + j) + current.x;
    const uint8_t* r = reference.plane.row(reference.y + j) + reference.x;
    for (int i = 0; i < w; ++i) sad += static_cast<uint32_t>(std::abs(c[i] - r[i]));
  }
  return sad;
}

double frame_psnr_y(const Frame& a, const Frame& b) {
  if (a.width != b.width || a.height != b.height) throw std::invalid_argument("frame_psnr_y: dimension mismatch");
  uint64_t sse = 0;
  for (size_t k = 0; k < a.y.size(); ++k) {
    const int d = static_cast<int>(a.y[k]) - b.y[k];
    sse += static_cast<uint64_t>(d * d);
  }
  if (sse == 0) return kPsnrCap;
  const double mse = static_cast<double>(sse) / static_cast<double>(a.y.size());
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

int ue_golomb_len(uint32_t v) {
  const uint64_t n = static_cast<uint64_t>(v) + 1;
  return 2 * (std::bit_width(n) - 1) + 1;
}

double quant_step(int qp) {
  static constexpr double kBase[6] = {0.625, 0.6875, 0.8125, 0.875, 1.0, 1.125};
  if (qp < 0 || qp > 51) throw std::out_of_range("qp " + std::to_string(qp) + " outside [0, 51]");
  return kBase[qp % 6] * static_cast<double>(1 << (qp / 6));
}

QuantResult quant_recon(int residual, int qp) {
  const double step = quant_step(qp);
  const double magnitude = std::nearbyint(std::abs(residual) / step);
  const int level = static_cast<int>(residual < 0 ? -magnitude : magnitude);
  return {level, static_cast<int>(std::lround(level * step))};
}

}  // namespace svcmd
