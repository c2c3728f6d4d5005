#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "svcmd/video_io.hpp"

using namespace svcmd;

namespace {

std::string header(int w, int h, const std::string& extra = " C420") {
  return "YUV4MPEG2 W" + std::to_string(w) + " H" + std::to_string(h) + " F15:1" + extra + "\n";
}

Sequence parse_string(const std::string& s) {
  std::istringstream in(s);
  return parse_y4m(in);
}

std::string payload(int w, int h, uint8_t fill) { return "FRAME\n" + std::string(static_cast<size_t>(w) * h * 3 / 2, static_cast<char>(fill)); }

std::filesystem::path temp_file(const std::string& name, size_t bytes) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary);
  out << std::string(bytes, '\x40');
  return p;
}

Sequence random_sequence(std::mt19937& rng) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> count(0, 3);
  Sequence seq;
  seq.width = 16 * dim(rng);
  seq.height = 16 * dim(rng);
  seq.frame_rate = {std::uniform_int_distribution<int>(1, 60000)(rng), std::uniform_int_distribution<int>(1, 1001)(rng)};
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Frame f = oracle::random_frame(rng, seq.width, seq.height);
    f.index = i;
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace

TEST(ParseY4m, EmptyStreamWithValidHeader) {
  const Sequence s = parse_string(header(176, 144));
  EXPECT_TRUE(s.frames.empty());
  EXPECT_EQ(s.width, 176);
  EXPECT_EQ(s.height, 144);
}

TEST(ParseY4m, ThreeQcifFramesAt15Hz) {
  const Sequence s = parse_string(header(176, 144) + payload(176, 144, 1) + payload(176, 144, 2) + payload(176, 144, 3));
  ASSERT_EQ(s.frames.size(), 3u);
  EXPECT_EQ(s.frame_rate, (FrameRate{15, 1}));
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s.frames[i].index, i);
    EXPECT_EQ(s.frames[i].width, 176);
    EXPECT_EQ(s.frames[i].y.front(), i + 1);
    EXPECT_EQ(s.frames[i].v.back(), i + 1);
  }
}

TEST(ParseY4m, Rejects422) { EXPECT_THROW(parse_string(header(176, 144, " C422")), FormatError); }

TEST(ParseY4m, RejectsInterlacedAndUnalignedAndBadHeaders) {
  EXPECT_THROW(parse_string(header(176, 144, " C420 It")), FormatError);
  EXPECT_THROW(parse_string(header(170, 144)), FormatError);
  EXPECT_THROW(parse_string("YUV4MPEG2 W176 H144 C420\n"), FormatError);
  EXPECT_THROW(parse_string("YUV4MPEG W176 H144 F1:1\n"), FormatError);
  EXPECT_THROW(parse_string(""), FormatError);
  EXPECT_THROW(parse_string(header(16, 16) + "FRAMX\n"), FormatError);
}

TEST(ParseY4m, AcceptsFrameParametersAndMissingChromaTag) {
  const Sequence s = parse_string("YUV4MPEG2 W16 H16 F30000:1001 Ip A1:1 XYSCSS=420JPEG\nFRAME Ixyz\n" +
                                  std::string(384, 'a'));
  ASSERT_EQ(s.frames.size(), 1u);
  EXPECT_EQ(s.frame_rate, (FrameRate{30000, 1001}));
}

TEST(ParseY4m, TruncatedPayloadThrows) {
  std::string data = header(16, 16) + payload(16, 16, 7);
  data.pop_back();
  EXPECT_THROW(parse_string(data), FormatError);
}

TEST(ReadRawYuv, SizeArithmetic) {
  const auto one = temp_file("svcmd_one.yuv", 176 * 144 * 3 / 2);
  EXPECT_EQ(read_raw_yuv(one, 176, 144, {15, 1}).frames.size(), 1u);

  const auto partial = temp_file("svcmd_partial.yuv", 176 * 144 * 3 / 2 * 5 / 2);
  EXPECT_THROW(read_raw_yuv(partial, 176, 144, {15, 1}), FormatError);

  const auto cif = temp_file("svcmd_cif.yuv", static_cast<size_t>(352) * 288 * 3 / 2 * 10);
  const Sequence s = read_raw_yuv(cif, 352, 288, {30, 1});
  ASSERT_EQ(s.frames.size(), 10u);
  EXPECT_EQ(s.frames[9].index, 9);
  EXPECT_EQ(s.frames[9].width, 352);

  EXPECT_THROW(read_raw_yuv(one, 170, 144, {15, 1}), FormatError);
  for (const auto& p : {one, partial, cif}) std::filesystem::remove(p);
}

TEST(WriteY4m, EmptySequenceIsHeaderOnly) {
  Sequence s;
  s.width = 32;
  s.height = 16;
  std::ostringstream out;
  const size_t n = write_y4m(s, out);
  EXPECT_EQ(out.str(), "YUV4MPEG2 W32 H16 F30:1 C420\n");
  EXPECT_EQ(n, out.str().size());
}

TEST(WriteY4m, OneGrayFrame) {
  Sequence s;
  s.width = 176;
  s.height = 144;
  s.frames.emplace_back(0, 176, 144, 128, 128);
  std::ostringstream out;
  const size_t n = write_y4m(s, out);
  const size_t head = std::string("YUV4MPEG2 W176 H144 F30:1 C420\n").size();
  EXPECT_EQ(n, head + 6 + 176 * 144 * 3 / 2);
  EXPECT_EQ(out.str().size(), n);
}

TEST(WriteY4m, RoundTripRandomSequences) {
  std::mt19937 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Sequence s = random_sequence(rng);
    std::ostringstream out;
    write_y4m(s, out);
    const Sequence back = parse_string(out.str());
    EXPECT_EQ(back, s);
    std::ostringstream again;
    write_y4m(back, again);
    EXPECT_EQ(again.str(), out.str());
  }
}

TEST(WriteY4m, FailingSinkThrows) {
  Sequence s;
  s.width = 16;
  s.height = 16;
  s.frames.emplace_back(0, 16, 16);
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  EXPECT_THROW(write_y4m(s, out), std::runtime_error);
}

TEST(Downsample, Examples) {
  Frame f(0, 32, 32, 1);
  EXPECT_EQ(downsample_2x2(f).y[0], 1);
  f.y.assign(f.y.size(), 0);
  f.y[32 + 1] = 4;  // (1,1) of the first 2x2 block
  EXPECT_EQ(downsample_2x2(f).y[0], 1);
  EXPECT_THROW(downsample_2x2(Frame(0, 48, 32)), std::invalid_argument);
}

TEST(Downsample, CifToQcifMatchesMeanPoolOracle) {
  std::mt19937 rng(3);
  const Frame f = oracle::random_frame(rng, 352, 288);
  const Frame q = downsample_2x2(f);
  ASSERT_EQ(q.width, 176);
  ASSERT_EQ(q.height, 144);
  EXPECT_EQ(q.y, oracle::mean_pool(f.y, 352, 288));
  EXPECT_EQ(q.u, oracle::mean_pool(f.u, 176, 144));
  EXPECT_EQ(q.v, oracle::mean_pool(f.v, 176, 144));
}

TEST(Upsample, ConstantFrameStaysConstant) {
  const Frame f(0, 32, 16, 128, 128);
  const Frame up = upsample_bilinear_2x(f);
  EXPECT_EQ(up.width, 64);
  EXPECT_EQ(up.height, 32);
  for (uint8_t s : up.y) EXPECT_EQ(s, 128);
  for (uint8_t s : up.u) EXPECT_EQ(s, 128);
  EXPECT_EQ(downsample_2x2(up), f);
}

TEST(Upsample, MidpointIsRoundedAverage) {
  Frame f(0, 16, 16, 0);
  f.y[0] = 10;
  f.y[1] = 21;
  const Frame up = upsample_bilinear_2x(f);
  EXPECT_EQ(up.y[0], 10);
  EXPECT_EQ(up.y[1], 16);  // (10 + 21 + 1) / 2 rounded half up
  EXPECT_EQ(up.y[2], 21);
}

TEST(Upsample, BordersReplicate) {
  Frame f(0, 16, 16, 0);
  for (int y = 0; y < 16; ++y) f.y[y * 16 + 15] = 200;
  const Frame up = upsample_bilinear_2x(f);
  EXPECT_EQ(up.y[31], 200);
  EXPECT_EQ(up.y[31 * 32 + 31], 200);
}

TEST(Upsample, DownUpOnGradientsWithinTwo) {
  for (int slope = 0; slope <= 6; ++slope) {
    Frame f(0, 64, 48);
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) f.y[y * 64 + x] = static_cast<uint8_t>(std::min(255, 10 + slope * x / 2 + slope * y / 3));
    }
    const Frame back = downsample_2x2(upsample_bilinear_2x(f));
    for (size_t i = 0; i < f.y.size(); ++i) {
      ASSERT_LE(std::abs(back.y[i] - f.y[i]), 2) << "slope " << slope << " sample " << i;
    }
  }
}
