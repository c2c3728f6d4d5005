#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svcmd {

inline constexpr int kMbSize = 16;

/// Malformed or unsupported input data (Y4M headers, raw file sizes, CSVs).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read-only view of one 8-bit sample plane, row-major with stride == width.
struct PlaneView {
  std::span<const uint8_t> samples;
  int width = 0;
  int height = 0;

  uint8_t at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
  const uint8_t* row(int y) const { return samples.data() + static_cast<size_t>(y) * width; }
  bool contains(int x, int y, int w, int h) const {
    return x >= 0 && y >= 0 && x + w <= width && y + h <= height;
  }
};

struct FrameRate {
  int num = 30;
  int den = 1;

  double hz() const { return static_cast<double>(num) / den; }
  bool operator==(const FrameRate&) const = default;
};

/// Planar 8-bit 4:2:0 picture. Width and height are multiples of 16.
struct Frame {
  int index = 0;
  int width = 0;
  int height = 0;
  std::vector<uint8_t> y;
  std::vector<uint8_t> u;
  std::vector<uint8_t> v;

  Frame() = default;
  Frame(int index, int width, int height, uint8_t fill_luma = 0, uint8_t fill_chroma = 128);

  int chroma_width() const { return width / 2; }
  int chroma_height() const { return height / 2; }
  int mb_cols() const { return width / kMbSize; }
  int mb_rows() const { return height / kMbSize; }

  PlaneView luma() const { return {y, width, height}; }
  PlaneView cb() const { return {u, chroma_width(), chroma_height()}; }
  PlaneView cr() const { return {v, chroma_width(), chroma_height()}; }

  uint8_t& luma_at(int x, int y_pos) { return y[static_cast<size_t>(y_pos) * width + x]; }
  uint8_t luma_at(int x, int y_pos) const { return y[static_cast<size_t>(y_pos) * width + x]; }

  size_t byte_size() const { return y.size() + u.size() + v.size(); }

  bool operator==(const Frame&) const = default;
};

/// Ordered frames sharing one size; dimensions are kept even when empty.
struct Sequence {
  int width = 0;
  int height = 0;
  FrameRate frame_rate;
  std::vector<Frame> frames;

  bool operator==(const Sequence&) const = default;
};

/// Throws std::invalid_argument unless w and h are positive multiples of 16.
void require_mb_aligned(int width, int height);

}  // namespace svcmd
