#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "svcmd/frame.hpp"

namespace svcmd {

enum class PatternKind : uint8_t { Static, Pan, Object, Noise, Mixed };

struct PatternSpec {
  PatternKind kind = PatternKind::Static;
  int dx = 0;         // pan: pixels per frame
  int dy = 0;
  int speed = 0;      // object: horizontal pixels per frame
  int amplitude = 0;  // noise: checkerboard amplitude, 1..16

  // "static", "pan(2,1)", "object(3)", "noise(4)", "mixed"; a colon may replace
  // the parentheses ("pan:2,1").
  static PatternSpec parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const PatternSpec&) const = default;
};

struct FrameSize {
  int width = 352;
  int height = 288;
};

/// "qcif", "cif", "4cif" or "<w>x<h>".
FrameSize parse_frame_size(std::string_view text);

// Deterministic for a given (spec, size, frames, seed).
//   static: one textured picture repeated.
//   pan:    frame t samples the texture at ((x + t*dx) mod W, (y + t*dy) mod H).
//   object: textured 64x64 square moving right by `speed` per frame over the
//           static background, wrapping at the right edge.
//   noise:  static picture plus a +-a checkerboard whose sign flips every frame.
//   mixed:  quadrants static | pan(2,1) / object(3) | noise(4).
// Chroma planes are flat 128.
Sequence synthesize(const PatternSpec& spec, FrameSize size, int frames, uint64_t seed,
                    FrameRate rate = {30, 1});

}  // namespace svcmd
