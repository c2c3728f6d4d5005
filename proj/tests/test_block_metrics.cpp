#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "svcmd/block_metrics.hpp"

using namespace svcmd;

namespace {

Frame flat(uint8_t v) { return Frame(0, 16, 16, v); }

MacroblockView mbv(const Frame& f, int mx = 0, int my = 0) { return {f.luma(), mx, my}; }

void set(Frame& f, int i, int j, uint8_t v) { f.y[static_cast<size_t>(j) * f.width + i] = v; }

}  // namespace

TEST(MacroblockView, RejectsOutOfPlane) {
  const Frame f(0, 32, 16);
  EXPECT_NO_THROW(MacroblockView(f.luma(), 1, 0));
  EXPECT_THROW(MacroblockView(f.luma(), 2, 0), std::out_of_range);
  EXPECT_THROW(MacroblockView(f.luma(), 0, -1), std::out_of_range);
}

TEST(Sod, Examples) {
  const Frame a = flat(10);
  const Frame b = flat(9);
  EXPECT_EQ(sod(mbv(a), mbv(a)), 0);
  EXPECT_EQ(sod(mbv(a), mbv(b)), 256);

  Frame c = flat(100);
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) set(c, i, j, static_cast<uint8_t>((i + j) % 2 ? 101 : 99));
  }
  const Frame r = flat(100);
  EXPECT_EQ(sod(mbv(c), mbv(r)), 0);
  EXPECT_EQ(block_sad({c.luma(), 0, 0}, {r.luma(), 0, 0}, 16, 16), 256u);
}

TEST(Sod, MaximumRange) {
  EXPECT_EQ(sod(mbv(flat(255)), mbv(flat(0))), 65280);
  EXPECT_EQ(sod(mbv(flat(0)), mbv(flat(255))), 65280);
}

TEST(Cog, Examples) {
  Centroid c = cog(mbv(flat(77)));
  EXPECT_DOUBLE_EQ(c.gx, 7.5);
  EXPECT_DOUBLE_EQ(c.gy, 7.5);

  Frame p = flat(0);
  set(p, 3, 12, 200);
  c = cog(mbv(p));
  EXPECT_DOUBLE_EQ(c.gx, 3.0);
  EXPECT_DOUBLE_EQ(c.gy, 12.0);

  Frame two = flat(0);
  set(two, 0, 0, 100);
  set(two, 15, 0, 100);
  c = cog(mbv(two));
  EXPECT_DOUBLE_EQ(c.gx, 7.5);
  EXPECT_DOUBLE_EQ(c.gy, 0.0);

  c = cog(mbv(flat(0)));
  EXPECT_DOUBLE_EQ(c.gx, 7.5);
  EXPECT_DOUBLE_EQ(c.gy, 7.5);
}

TEST(Dcog, Examples) {
  Frame a = flat(0);
  set(a, 10, 4, 50);
  Frame b = flat(0);
  set(b, 7, 0, 50);
  EXPECT_DOUBLE_EQ(dcog(mbv(a), mbv(a)), 0.0);
  EXPECT_DOUBLE_EQ(dcog(mbv(a), mbv(b)), 5.0);
  EXPECT_DOUBLE_EQ(dcog(mbv(flat(0)), mbv(flat(0))), 0.0);
}

TEST(BlockSad, Examples) {
  const Frame a = flat(9);
  const Frame b = flat(10);
  EXPECT_EQ(block_sad({a.luma(), 0, 0}, {a.luma(), 0, 0}, 16, 16), 0u);
  EXPECT_EQ(block_sad({a.luma(), 0, 0}, {b.luma(), 0, 0}, 16, 16), 256u);
  EXPECT_EQ(block_sad({a.luma(), 4, 8}, {b.luma(), 12, 0}, 4, 4), 16u);
  EXPECT_THROW(block_sad({a.luma(), 13, 0}, {b.luma(), 0, 0}, 4, 4), std::out_of_range);
  EXPECT_THROW(block_sad({a.luma(), 0, 0}, {b.luma(), 0, 0}, 5, 4), std::invalid_argument);
}

TEST(BlockMetrics, RandomPairsMatchOracles) {
  std::mt19937 rng(42);
  const Frame a = oracle::random_frame(rng, 64, 64);
  const Frame b = oracle::random_frame(rng, 64, 64);
  std::uniform_int_distribution<int> mb(0, 3);
  std::uniform_int_distribution<int> pos(0, 48);
  const int sizes[] = {4, 8, 16};
  for (int k = 0; k < 2000; ++k) {
    const int ax = mb(rng), ay = mb(rng), bx = mb(rng), by = mb(rng);
    const MacroblockView va(a.luma(), ax, ay);
    const MacroblockView vb(b.luma(), bx, by);
    EXPECT_EQ(sod(va, vb), oracle::sod(a, ax * 16, ay * 16, b, bx * 16, by * 16));
    const auto ca = oracle::cog(a, ax * 16, ay * 16);
    const auto cb = oracle::cog(b, bx * 16, by * 16);
    EXPECT_NEAR(cog(va).gx, ca.x, 1e-9);
    EXPECT_NEAR(cog(va).gy, ca.y, 1e-9);
    EXPECT_NEAR(dcog(va, vb), std::sqrt((ca.x - cb.x) * (ca.x - cb.x) + (ca.y - cb.y) * (ca.y - cb.y)), 1e-9);
    const int w = sizes[k % 3], h = sizes[(k / 3) % 3];
    const int px = pos(rng), py = pos(rng), qx = pos(rng), qy = pos(rng);
    EXPECT_EQ(block_sad({a.luma(), px, py}, {b.luma(), qx, qy}, w, h), oracle::sad(a, px, py, b, qx, qy, w, h));
  }
}

TEST(BlockMetrics, Properties) {
  std::mt19937 rng(7);
  const Frame a = oracle::random_frame(rng, 160, 160);
  const Frame b = oracle::random_frame(rng, 160, 160);
  for (int my = 0; my < 10; ++my) {
    for (int mx = 0; mx < 10; ++mx) {
      const MacroblockView va(a.luma(), mx, my);
      const MacroblockView vb(b.luma(), mx, my);
      EXPECT_LE(static_cast<uint32_t>(sod(va, vb)), block_sad({a.luma(), mx * 16, my * 16}, {b.luma(), mx * 16, my * 16}, 16, 16));
      EXPECT_EQ(sod(va, vb), sod(vb, va));
      EXPECT_DOUBLE_EQ(dcog(va, vb), dcog(vb, va));
      const Centroid c = cog(va);
      EXPECT_GE(c.gx, 0.0);
      EXPECT_LE(c.gx, 15.0);
      EXPECT_GE(c.gy, 0.0);
      EXPECT_LE(c.gy, 15.0);
    }
  }
}

TEST(FramePsnr, Examples) {
  const Frame a(0, 32, 32, 100);
  Frame b(0, 32, 32, 101);
  EXPECT_DOUBLE_EQ(frame_psnr_y(a, a), 99.99);
  EXPECT_NEAR(frame_psnr_y(a, b), 48.1308, 1e-3);
  EXPECT_DOUBLE_EQ(frame_psnr_y(Frame(0, 16, 16, 0), Frame(0, 16, 16, 255)), 0.0);
  EXPECT_THROW(frame_psnr_y(a, Frame(0, 16, 16)), std::invalid_argument);
}

TEST(UeGolomb, ExamplesAndMonotoneOdd) {
  EXPECT_EQ(ue_golomb_len(0), 1);
  EXPECT_EQ(ue_golomb_len(1), 3);
  EXPECT_EQ(ue_golomb_len(2), 3);
  EXPECT_EQ(ue_golomb_len(6), 5);
  EXPECT_EQ(ue_golomb_len(7), 7);
  int prev = 0;
  for (uint32_t v = 0; v < 100000; ++v) {
    const int n = ue_golomb_len(v);
    EXPECT_EQ(n % 2, 1);
    EXPECT_GE(n, prev);
    EXPECT_EQ(n, oracle::ue_len(v));
    prev = n;
  }
  EXPECT_EQ(ue_golomb_len(0xFFFFFFFFu), 65);
}

TEST(Quant, Examples) {
  EXPECT_DOUBLE_EQ(quant_step(28), 16.0);
  EXPECT_DOUBLE_EQ(quant_step(4), 1.0);
  QuantResult q = quant_recon(33, 28);
  EXPECT_EQ(q.level, 2);
  EXPECT_EQ(q.recon, 32);
  q = quant_recon(7, 28);
  EXPECT_EQ(q.level, 0);
  EXPECT_EQ(q.recon, 0);
  q = quant_recon(-10, 4);
  EXPECT_EQ(q.level, -10);
  EXPECT_EQ(q.recon, -10);
  EXPECT_THROW(quant_recon(1, 52), std::out_of_range);
  EXPECT_THROW(quant_recon(1, -1), std::out_of_range);
}

TEST(Quant, HalfStepRoundsToEven) {
  EXPECT_EQ(quant_recon(8, 28).level, 0);
  EXPECT_EQ(quant_recon(-8, 28).level, 0);
  EXPECT_EQ(quant_recon(24, 28).level, 2);
}

TEST(Quant, MonotoneInQpAndBoundedError) {
  for (int r = -255; r <= 255; ++r) {
    int prev = std::abs(quant_recon(r, 0).level);
    for (int qp = 0; qp <= 51; ++qp) {
      const QuantResult q = quant_recon(r, qp);
      EXPECT_LE(std::abs(q.level), prev) << "r=" << r << " qp=" << qp;
      prev = std::abs(q.level);
      EXPECT_LE(std::abs(r - q.recon), quant_step(qp) / 2 + 0.5) << "r=" << r << " qp=" << qp;
    }
  }
}
