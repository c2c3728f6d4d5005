#include "svcmd/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace svcmd {

namespace {

constexpr int kObjectSize = 64;

struct Canvas {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> samples;

  uint8_t at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
};

constexpr int kTile = 16;
constexpr int kDetailAmplitude = 24;

// Zero-mean sequence with period kTile: any kTile consecutive entries sum to 0.
std::array<double, kTile> periodic_zero_mean(std::mt19937& rng, int amplitude) {
  std::array<double, kTile> v{};
  double mean = 0.0;
  for (double& x : v) {
    x = static_cast<int>(rng() % static_cast<unsigned>(2 * amplitude + 1)) - amplitude;
    mean += x / kTile;
  }
  for (double& x : v) x -= mean;
  return v;
}

// Random sign times a magnitude in [0.5, 1].
std::vector<double> unit_noise(std::mt19937& rng, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (double& x : v) {
    const double magnitude = 0.5 + static_cast<double>(rng() % 1001) / 2000.0;
    x = (rng() % 2 == 0) ? magnitude : -magnitude;
  }
  return v;
}

// Ramp plus detail f(x)g(y) + h(y)k(x) with f, h zero-mean of period 16. The
// detail sums to zero over every 16x16 window, so block sums follow the ramp,
// while g and k keep the picture from repeating.
Canvas make_texture(int width, int height, uint64_t seed, double base, double slope_x, double slope_y) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  const auto f = periodic_zero_mean(rng, kDetailAmplitude);
  const auto h = periodic_zero_mean(rng, kDetailAmplitude);
  const auto g = unit_noise(rng, height);
  const auto k = unit_noise(rng, width);

  Canvas c{width, height, std::vector<uint8_t>(static_cast<size_t>(width) * height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double detail = f[x % kTile] * g[y] + h[y % kTile] * k[x];
      const double v = base + slope_x * x + slope_y * y + detail;
      c.samples[static_cast<size_t>(y) * width + x] = static_cast<uint8_t>(std::clamp(std::lround(v), 16L, 235L));
    }
  }
  return c;
}

Canvas background(int width, int height, uint64_t seed) {
  return make_texture(width, height, seed, 70.0, 0.2, 0.1);
}

int wrap(int v, int n) { return ((v % n) + n) % n; }

// Renders frame t of a single (non-mixed) pattern on a width x height canvas.
Canvas render(const PatternSpec& spec, int width, int height, int t, const Canvas& bg, const Canvas& object) {
  Canvas out{width, height, std::vector<uint8_t>(static_cast<size_t>(width) * height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      uint8_t v = bg.at(x, y);
      switch (spec.kind) {
        case PatternKind::Pan:
          v = bg.at(wrap(x + t * spec.dx, width), wrap(y + t * spec.dy, height));
          break;
        case PatternKind::Noise: {
          const int sign = ((x + y + t) % 2 == 0) ? 1 : -1;
          v = static_cast<uint8_t>(std::clamp(v + sign * spec.amplitude, 0, 255));
          break;
        }
        default:
          break;
      }
      out.samples[static_cast<size_t>(y) * width + x] = v;
    }
  }
  if (spec.kind == PatternKind::Object) {
    const int side = std::min({kObjectSize, width, height});
    const int x0 = width / 4 + t * spec.speed;
    const int y0 = (height - side) / 2;
    for (int j = 0; j < side; ++j) {
      for (int i = 0; i < side; ++i) {
        out.samples[static_cast<size_t>(y0 + j) * width + wrap(x0 + i, width)] = object.at(i, j);
      }
    }
  }
  return out;
}

void validate(const PatternSpec& spec) {
  switch (spec.kind) {
    case PatternKind::Noise:
      if (spec.amplitude < 1 || spec.amplitude > 16) throw std::invalid_argument("noise amplitude must be in [1, 16]");
      break;
    case PatternKind::Pan:
      if (std::abs(spec.dx) > 64 || std::abs(spec.dy) > 64) throw std::invalid_argument("pan step must be within 64");
      break;
    case PatternKind::Object:
      if (std::abs(spec.speed) > 64) throw std::invalid_argument("object speed must be within 64");
      break;
    default:
      break;
  }
}

std::vector<int> parse_ints(std::string_view text) {
  std::vector<int> values;
  while (!text.empty()) {
    const size_t comma = text.find(',');
    std::string_view token = text.substr(0, comma);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
      throw std::invalid_argument("bad number '" + std::string(token) + "' in pattern");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw std::invalid_argument("trailing comma in pattern");
  }
  return values;
}

}  // namespace

PatternSpec PatternSpec::parse(std::string_view text) {
  std::string_view name = text;
  std::string_view args;
  if (const size_t open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw std::invalid_argument("pattern '" + std::string(text) + "' lacks ')'");
    name = text.substr(0, open);
    args = text.substr(open + 1, text.size() - open - 2);
  } else if (const size_t colon = text.find(':'); colon != std::string_view::npos) {
    name = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  const std::vector<int> v = parse_ints(args);
  auto expect = [&](size_t n) {
    if (v.size() != n) {
      throw std::invalid_argument("pattern '" + std::string(name) + "' takes " + std::to_string(n) + " argument(s)");
    }
  };

  PatternSpec spec;
  if (name == "static") {
    expect(0);
  } else if (name == "pan") {
    expect(2);
    spec.kind = PatternKind::Pan;
    spec.dx = v[0];
    spec.dy = v[1];
  } else if (name == "object") {
    expect(1);
    spec.kind = PatternKind::Object;
    spec.speed = v[0];
  } else if (name == "noise") {
    expect(1);
    spec.kind = PatternKind::Noise;
    spec.amplitude = v[0];
  } else if (name == "mixed") {
    expect(0);
    spec.kind = PatternKind::Mixed;
  } else {
    throw std::invalid_argument("unknown pattern '" + std::string(text) + "'");
  }
  validate(spec);
  return spec;
}

std::string PatternSpec::to_string() const {
  switch (kind) {
    case PatternKind::Static: return "static";
    case PatternKind::Pan: return "pan(" + std::to_string(dx) + "," + std::to_string(dy) + ")";
    case PatternKind::Object: return "object(" + std::to_string(speed) + ")";
    case PatternKind::Noise: return "noise(" + std::to_string(amplitude) + ")";
    case PatternKind::Mixed: return "mixed";
  }
  return "?";
}

FrameSize parse_frame_size(std::string_view text) {
  if (text == "qcif") return {176, 144};
  if (text == "cif") return {352, 288};
  if (text == "4cif") return {704, 576};
  const size_t x = text.find('x');
  if (x == std::string_view::npos) throw std::invalid_argument("bad frame size '" + std::string(text) + "'");
  FrameSize size;
  const auto parse = [&](std::string_view s, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("bad frame size '" + std::string(text) + "'");
    }
  };
  parse(text.substr(0, x), size.width);
  parse(text.substr(x + 1), size.height);
  require_mb_aligned(size.width, size.height);
  return size;
}

Sequence synthesize(const PatternSpec& spec, FrameSize size, int frames, uint64_t seed, FrameRate rate) {
  validate(spec);
  require_mb_aligned(size.width, size.height);
  if (frames < 0) throw std::invalid_argument("frame count must be non-negative");

  Sequence seq;
  seq.width = size.width;
  seq.height = size.height;
  seq.frame_rate = rate;

  struct Part {
    PatternSpec spec;
    int x0, y0, w, h;
    Canvas bg, object;
  };
  std::vector<Part> parts;
  auto add_part = [&](PatternSpec s, int x0, int y0, int w, int h, uint64_t part_seed) {
    parts.push_back({s, x0, y0, w, h, background(w, h, part_seed),
                     make_texture(kObjectSize, kObjectSize, part_seed + 1, 150.0, 0.5, 0.0)});
  };
  if (spec.kind == PatternKind::Mixed) {
    const int hw = size.width / 2;
    const int hh = size.height / 2;
    add_part(PatternSpec{}, 0, 0, hw, hh, seed);
    add_part(PatternSpec{PatternKind::Pan, 2, 1, 0, 0}, hw, 0, size.width - hw, hh, seed + 10);
    add_part(PatternSpec{PatternKind::Object, 0, 0, 3, 0}, 0, hh, hw, size.height - hh, seed + 20);
    add_part(PatternSpec{PatternKind::Noise, 0, 0, 0, 4}, hw, hh, size.width - hw, size.height - hh, seed + 30);
  } else {
    add_part(spec, 0, 0, size.width, size.height, seed);
  }

  for (int t = 0; t < frames; ++t) {
    Frame f(t, size.width, size.height, 0, 128);
    for (const Part& p : parts) {
      const Canvas c = render(p.spec, p.w, p.h, t, p.bg, p.object);
      for (int y = 0; y < p.h; ++y) {
        std::copy_n(c.samples.begin() + static_cast<ptrdiff_t>(y) * p.w, p.w,
                    f.y.begin() + static_cast<ptrdiff_t>(p.y0 + y) * size.width + p.x0);
      }
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace svcmd
