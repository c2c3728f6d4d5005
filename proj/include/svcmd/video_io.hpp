#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>

#include "svcmd/frame.hpp"

namespace svcmd {

// YUV4MPEG2 input. Accepts 8-bit 4:2:0 (C420, C420jpeg, C420mpeg2, C420paldv or
// no C tag) progressive streams with MB-aligned dimensions. Everything else is a
// FormatError.
Sequence parse_y4m(std::istream& in);
Sequence parse_y4m(std::span<const uint8_t> bytes);
Sequence read_y4m_file(const std::filesystem::path& path);

// Headerless I420. The file size must be a whole number of frames.
Sequence read_raw_yuv(const std::filesystem::path& path, int width, int height, FrameRate rate);

// Writes `YUV4MPEG2 W<w> H<h> F<n>:<d> C420` followed by one `FRAME` block per
// picture. Returns the number of bytes written; throws std::runtime_error when
// the sink fails.
size_t write_y4m(const Sequence& seq, std::ostream& out);

// Mean-pools each 2x2 block with (a+b+c+d+2)>>2 on every plane. Dimensions must
// be divisible by 32 so the result stays MB-aligned.
Frame downsample_2x2(const Frame& frame);

// 2x upsampling, co-sited with the source grid: even output positions copy the
// source sample, odd positions interpolate linearly towards the next sample
// (replicated past the border). Both directions are accumulated at full
// precision and rounded once.
Frame upsample_bilinear_2x(const Frame& frame);

}  // namespace svcmd
