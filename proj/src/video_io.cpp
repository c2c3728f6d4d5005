#include "svcmd/video_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace svcmd {

Frame::Frame(int index_, int width_, int height_, uint8_t fill_luma, uint8_t fill_chroma)
    : index(index_),
      width(width_),
      height(height_),
      y(static_cast<size_t>(width_) * height_, fill_luma),
      u(static_cast<size_t>(width_ / 2) * (height_ / 2), fill_chroma),
      v(static_cast<size_t>(width_ / 2) * (height_ / 2), fill_chroma) {}

void require_mb_aligned(int width, int height) {
  if (width <= 0 || height <= 0 || width % kMbSize != 0 || height % kMbSize != 0) {
    throw std::invalid_argument("dimensions " + std::to_string(width) + "x" + std::to_string(height) +
                                " are not positive multiples of 16");
  }
}

namespace {

constexpr std::string_view kY4mMagic = "YUV4MPEG2";
constexpr std::string_view kFrameTag = "FRAME";
constexpr size_t kMaxHeaderLength = 4096;

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("y4m: bad " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return value;
}

// Reads up to and including '\n'. Returns false on clean EOF before any byte.
bool read_line(std::istream& in, std::string& line) {
  line.clear();
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') return true;
    line.push_back(c);
    if (line.size() > kMaxHeaderLength) throw FormatError("y4m: header line too long");
  }
  if (line.empty()) return false;
  throw FormatError("y4m: truncated header line");
}

struct Y4mHeader {
  int width = 0;
  int height = 0;
  FrameRate rate;
};

Y4mHeader parse_stream_header(const std::string& line) {
  std::istringstream tokens(line);
  std::string token;
  tokens >> token;
  if (token != kY4mMagic) throw FormatError("y4m: missing YUV4MPEG2 signature");

  Y4mHeader header;
  bool have_w = false;
  bool have_h = false;
  bool have_f = false;
  while (tokens >> token) {
    const char tag = token[0];
    const std::string_view value = std::string_view(token).substr(1);
    switch (tag) {
      case 'W':
        header.width = parse_int(value, "width");
        have_w = true;
        break;
      case 'H':
        header.height = parse_int(value, "height");
        have_h = true;
        break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) throw FormatError("y4m: frame rate must be num:den");
        header.rate.num = parse_int(value.substr(0, colon), "frame rate numerator");
        header.rate.den = parse_int(value.substr(colon + 1), "frame rate denominator");
        if (header.rate.num <= 0 || header.rate.den <= 0) throw FormatError("y4m: non-positive frame rate");
        have_f = true;
        break;
      }
      case 'C':
        if (value != "420" && value != "420jpeg" && value != "420mpeg2" && value != "420paldv") {
          throw FormatError("y4m: unsupported chroma mode C" + std::string(value));
        }
        break;
      case 'I':
        if (value != "p" && value != "?") throw FormatError("y4m: interlaced content is not supported");
        break;
      case 'A':
      case 'X':
        break;
      default:
        throw FormatError("y4m: unknown header tag '" + token + "'");
    }
  }
  if (!have_w || !have_h || !have_f) throw FormatError("y4m: header lacks W, H or F");
  if (header.width <= 0 || header.height <= 0) throw FormatError("y4m: non-positive dimensions");
  if (header.width % kMbSize != 0 || header.height % kMbSize != 0) {
    throw FormatError("y4m: dimensions must be multiples of 16");
  }
  return header;
}

void read_planes(std::istream& in, Frame& frame) {
  for (auto* plane : {&frame.y, &frame.u, &frame.v}) {
    in.read(reinterpret_cast<char*>(plane->data()), static_cast<std::streamsize>(plane->size()));
    if (static_cast<size_t>(in.gcount()) != plane->size()) {
      throw FormatError("truncated frame payload at frame " + std::to_string(frame.index));
    }
  }
}

}  // namespace

Sequence parse_y4m(std::istream& in) {
  std::string line;
  if (!read_line(in, line)) throw FormatError("y4m: empty stream");
  const Y4mHeader header = parse_stream_header(line);

  Sequence seq;
  seq.width = header.width;
  seq.height = header.height;
  seq.frame_rate = header.rate;
  while (read_line(in, line)) {
    if (line.compare(0, kFrameTag.size(), kFrameTag) != 0 ||
        (line.size() > kFrameTag.size() && line[kFrameTag.size()] != ' ')) {
      throw FormatError("y4m: expected FRAME marker");
    }
    Frame frame(static_cast<int>(seq.frames.size()), header.width, header.height);
    read_planes(in, frame);
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

Sequence parse_y4m(std::span<const uint8_t> bytes) {
  std::string buffer(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  std::istringstream in(std::move(buffer));
  return parse_y4m(in);
}

Sequence read_y4m_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_y4m(in);
}

Sequence read_raw_yuv(const std::filesystem::path& path, int width, int height, FrameRate rate) {
  if (width <= 0 || height <= 0 || width % kMbSize != 0 || height % kMbSize != 0) {
    throw FormatError("raw yuv: dimensions must be positive multiples of 16");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  const auto file_size = std::filesystem::file_size(path);
  const auto frame_size = static_cast<uintmax_t>(width) * height * 3 / 2;
  if (file_size % frame_size != 0) {
    throw FormatError("raw yuv: file size " + std::to_string(file_size) + " is not a multiple of frame size " +
                      std::to_string(frame_size));
  }

  Sequence seq;
  seq.width = width;
  seq.height = height;
  seq.frame_rate = rate;
  const auto count = static_cast<int>(file_size / frame_size);
  seq.frames.reserve(count);
  for (int i = 0; i < count; ++i) {
    Frame frame(i, width, height);
    read_planes(in, frame);
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

size_t write_y4m(const Sequence& seq, std::ostream& out) {
  require_mb_aligned(seq.width, seq.height);
  const int width = seq.width;
  const int height = seq.height;
  std::string header = std::string(kY4mMagic) + " W" + std::to_string(width) + " H" + std::to_string(height) +
                       " F" + std::to_string(seq.frame_rate.num) + ":" + std::to_string(seq.frame_rate.den) +
                       " C420\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  size_t written = header.size();

  for (const Frame& frame : seq.frames) {
    if (frame.width != width || frame.height != height) {
      throw std::invalid_argument("write_y4m: frames differ in size");
    }
    out.write("FRAME\n", 6);
    for (const auto* plane : {&frame.y, &frame.u, &frame.v}) {
      out.write(reinterpret_cast<const char*>(plane->data()), static_cast<std::streamsize>(plane->size()));
    }
    written += 6 + frame.byte_size();
  }
  if (!out) throw std::runtime_error("write_y4m: sink write failed");
  return written;
}

namespace {

void pool_plane(const std::vector<uint8_t>& src, int src_w, std::vector<uint8_t>& dst, int dst_w, int dst_h) {
  for (int y = 0; y < dst_h; ++y) {
    const uint8_t* r0 = src.data() + static_cast<size_t>(2 * y) * src_w;
    const uint8_t* r1 = r0 + src_w;
    uint8_t* out = dst.data() + static_cast<size_t>(y) * dst_w;
    for (int x = 0; x < dst_w; ++x) {
      const int sum = r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1];
      out[x] = static_cast<uint8_t>((sum + 2) >> 2);
    }
  }
}

void upsample_plane(const std::vector<uint8_t>& src, int w, int h, std::vector<uint8_t>& dst) {
  const int out_w = 2 * w;
  // Horizontal pass at 2x scale: even = 2*s[x], odd = s[x] + s[x+1].
  std::vector<int> horiz(static_cast<size_t>(out_w) * h);
  for (int y = 0; y < h; ++y) {
    const uint8_t* s = src.data() + static_cast<size_t>(y) * w;
    int* row = horiz.data() + static_cast<size_t>(y) * out_w;
    for (int x = 0; x < w; ++x) {
      const int next = s[std::min(x + 1, w - 1)];
      row[2 * x] = 2 * s[x];
      row[2 * x + 1] = s[x] + next;
    }
  }
  for (int y = 0; y < 2 * h; ++y) {
    const int y0 = y / 2;
    const int y1 = (y % 2 == 0) ? y0 : std::min(y0 + 1, h - 1);
    const int* a = horiz.data() + static_cast<size_t>(y0) * out_w;
    const int* b = horiz.data() + static_cast<size_t>(y1) * out_w;
    uint8_t* out = dst.data() + static_cast<size_t>(y) * out_w;
    for (int x = 0; x < out_w; ++x) {
      const int value = (a[x] + b[x] + 2) >> 2;
      out[x] = static_cast<uint8_t>(std::clamp(value, 0, 255));
    }
  }
}

}  // namespace

Frame downsample_2x2(const Frame& frame) {
  if (frame.width % 32 != 0 || frame.height % 32 != 0) {
    throw std::invalid_argument("downsample_2x2: dimensions must be divisible by 32");
  }
  Frame out(frame.index, frame.width / 2, frame.height / 2);
  pool_plane(frame.y, frame.width, out.y, out.width, out.height);
  pool_plane(frame.u, frame.chroma_width(), out.u, out.chroma_width(), out.chroma_height());
  pool_plane(frame.v, frame.chroma_width(), out.v, out.chroma_width(), out.chroma_height());
  return out;
}

Frame upsample_bilinear_2x(const Frame& frame) {
  Frame out(frame.index, frame.width * 2, frame.height * 2);
  upsample_plane(frame.y, frame.width, frame.height, out.y);
  upsample_plane(frame.u, frame.chroma_width(), frame.chroma_height(), out.u);
  upsample_plane(frame.v, frame.chroma_width(), frame.chroma_height(), out.v);
  return out;
}

}  // namespace svcmd
