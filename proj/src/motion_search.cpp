#include "svcmd/motion_search.hpp"

#include <algorithm>
#if defined(__SSE2__)
#include <emmintrin.h>
#endif
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace svcmd {

namespace {

bool valid_range(int range) {
  return std::find(kSearchRanges.begin(), kSearchRanges.end(), range) != kSearchRanges.end();
}

// Lexicographic order on (cost, |dx|+|dy|, dy, dx).
bool better_candidate(double cost, MotionVector mv, double best_cost, MotionVector best_mv) {
  if (cost != best_cost) return cost < best_cost;
  const int norm = std::abs(mv.dx) + std::abs(mv.dy);
  const int best_norm = std::abs(best_mv.dx) + std::abs(best_mv.dy);
  if (norm != best_norm) return norm < best_norm;
  if (mv.dy != best_mv.dy) return mv.dy < best_mv.dy;
  return mv.dx < best_mv.dx;
}

inline uint8_t abs_diff(uint8_t a, uint8_t b) { return static_cast<uint8_t>(a > b ? a - b : b - a); }

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int ceil_div(int a, int b) { return -floor_div(-a, b); }

uint32_t signed_code_number(int v) { return v > 0 ? static_cast<uint32_t>(2 * v - 1) : static_cast<uint32_t>(-2 * v); }

struct QuantEntry {
  int16_t level;
  int16_t recon;
};

constexpr int kResidualOffset = 255;
using QuantTable = std::array<QuantEntry, 2 * kResidualOffset + 1>;

const QuantTable& quant_table(int qp) {
  static const auto tables = [] {
    std::vector<QuantTable> all(52);
    for (int q = 0; q <= 51; ++q) {
      for (int r = -kResidualOffset; r <= kResidualOffset; ++r) {
        const QuantResult res = quant_recon(r, q);
        all[q][r + kResidualOffset] = {static_cast<int16_t>(res.level), static_cast<int16_t>(res.recon)};
      }
    }
    return all;
  }();
  if (qp < 0 || qp > 51) throw std::out_of_range("qp " + std::to_string(qp) + " outside [0, 51]");
  return tables[qp];
}

int mode_bits(PartitionMode mode) { return ue_golomb_len(static_cast<uint32_t>(mode_index(mode))); }

int direction_bits(PredictionDirection dir, bool two_references) {
  if (!two_references) return 0;
  switch (dir) {
    case PredictionDirection::Forward: return ue_golomb_len(0);
    case PredictionDirection::Backward: return ue_golomb_len(1);
    case PredictionDirection::Bi: return ue_golomb_len(2);
    default: return 0;
  }
}

ModeCost finish(ModeCost cost, const MacroblockView& mb, std::span<const uint8_t, 256> prediction, int qp,
                int64_t side_bits) {
  const ResidualCoding coded = code_residual(mb, prediction, qp);
  cost.recon = coded.recon;
  cost.distortion = coded.distortion;
  cost.residual_bits = coded.bits;
  cost.bits = side_bits + coded.bits;
  cost.j_cost = static_cast<double>(cost.distortion) + lambda_mode(qp) * static_cast<double>(cost.bits);
  return cost;
}

void predict_partitions(const MacroblockView& mb, PlaneView ref, const std::vector<PartitionRect>& parts,
                        const std::vector<MotionVector>& mvs, std::array<uint8_t, 256>& pred) {
  for (size_t p = 0; p < parts.size(); ++p) {
    const PartitionRect& r = parts[p];
    for (int j = 0; j < r.h; ++j) {
      const uint8_t* src = ref.row(mb.y() + r.y + j + mvs[p].dy) + mb.x() + r.x + mvs[p].dx;
      std::copy(src, src + r.w, pred.begin() + (r.y + j) * kMbSize + r.x);
    }
  }
}

}  // namespace

double lambda_mode(int qp) { return 0.85 * std::pow(2.0, (qp - 12) / 3.0); }

double lambda_motion(int qp) { return std::sqrt(lambda_mode(qp)); }

MotionVector median_pmv(std::optional<MotionVector> left, std::optional<MotionVector> top,
                        std::optional<MotionVector> top_right) {
  const MotionVector a = left.value_or(MotionVector{});
  const MotionVector b = top.value_or(MotionVector{});
  const MotionVector c = top_right.value_or(MotionVector{});
  auto median3 = [](int x, int y, int z) { return std::max(std::min(x, y), std::min(std::max(x, y), z)); };
  return {median3(a.dx, b.dx, c.dx), median3(a.dy, b.dy, c.dy)};
}

int mv_bits(MotionVector mv, MotionVector pmv) {
  const MotionVector d = mv - pmv;
  return ue_golomb_len(signed_code_number(d.dx)) + ue_golomb_len(signed_code_number(d.dy));
}

std::string_view direction_name(PredictionDirection dir) {
  switch (dir) {
    case PredictionDirection::None: return "none";
    case PredictionDirection::Forward: return "fwd";
    case PredictionDirection::Backward: return "bwd";
    case PredictionDirection::Bi: return "bi";
    case PredictionDirection::InterLayer: return "inter_layer";
  }
  return "?";
}

SearchResult full_search_mv(const Block& block, PlaneView ref, Position center, int range, MotionVector pmv, int qp) {
  if (!valid_range(range)) throw std::invalid_argument("search range must be one of 2, 4, 8, 32");
  if (!block.plane.contains(block.x, block.y, block.w, block.h)) {
    throw std::out_of_range("full_search_mv: block outside its plane");
  }
  const double lm = lambda_motion(qp);
  const BlockWindow current{block.plane, block.x, block.y};

  SearchResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int dy = -range; dy <= range; ++dy) {
    for (int dx = -range; dx <= range; ++dx) {
      const int rx = center.x + dx;
      const int ry = center.y + dy;
      if (!ref.contains(rx, ry, block.w, block.h)) continue;
      ++best.evaluations;
      const uint32_t sad = block_sad(current, BlockWindow{ref, rx, ry}, block.w, block.h);
      const MotionVector mv{dx, dy};
      const double cost = static_cast<double>(sad) + lm * static_cast<double>(mv_bits(mv, pmv));
      if (better_candidate(cost, mv, best.cost, best.mv)) {
        best.cost = cost;
        best.mv = mv;
        best.sad = sad;
      }
    }
  }
  if (best.evaluations == 0) throw std::out_of_range("full_search_mv: no candidate window inside the reference");
  return best;
}

IntraNeighbors IntraNeighbors::from_plane(PlaneView recon, int mb_x, int mb_y) {
  IntraNeighbors n;
  const int x0 = mb_x * kMbSize;
  const int y0 = mb_y * kMbSize;
  if (mb_y > 0) {
    std::array<uint8_t, 16> top{};
    std::copy_n(recon.row(y0 - 1) + x0, kMbSize, top.begin());
    n.top = top;
  }
  if (mb_x > 0) {
    std::array<uint8_t, 16> left{};
    for (int j = 0; j < kMbSize; ++j) left[j] = recon.at(x0 - 1, y0 + j);
    n.left = left;
  }
  return n;
}

std::vector<PartitionRect> partitions_of(PartitionMode mode) {
  int w = 16;
  int h = 16;
  switch (mode) {
    case PartitionMode::P16x16: break;
    case PartitionMode::P16x8: h = 8; break;
    case PartitionMode::P8x16: w = 8; break;
    case PartitionMode::P8x8: w = h = 8; break;
    case PartitionMode::P8x4: w = 8; h = 4; break;
    case PartitionMode::P4x8: w = 4; h = 8; break;
    case PartitionMode::P4x4: w = h = 4; break;
    default: throw std::invalid_argument("partitions_of: not an inter partition mode");
  }
  std::vector<PartitionRect> parts;
  for (int y = 0; y < kMbSize; y += h) {
    for (int x = 0; x < kMbSize; x += w) parts.push_back({x, y, w, h});
  }
  return parts;
}

ResidualCoding code_residual(const MacroblockView& mb, std::span<const uint8_t, 256> prediction, int qp) {
  const QuantTable& table = quant_table(qp);
  ResidualCoding out;
  for (int by = 0; by < kMbSize; by += 4) {
    for (int bx = 0; bx < kMbSize; bx += 4) {
      int64_t block_bits = 0;
      bool coded = false;
      for (int j = by; j < by + 4; ++j) {
        const uint8_t* src = mb.row(j);
        for (int i = bx; i < bx + 4; ++i) {
          const int k = j * kMbSize + i;
          const int pred = prediction[k];
          const QuantEntry q = table[src[i] - pred + kResidualOffset];
          const int rec = std::clamp(pred + q.recon, 0, 255);
          out.recon[k] = static_cast<uint8_t>(rec);
          const int err = src[i] - rec;
          out.distortion += err * err;
          if (q.level != 0) coded = true;
          block_bits += ue_golomb_len(static_cast<uint32_t>(std::abs(q.level)));
        }
      }
      if (coded) out.bits += block_bits;
    }
  }
  return out;
}

namespace {

// All inter partitions in unit coordinates (4x4 units), grouped by mode in
// partitions_of order.
struct UnitRect {
  int mode_slot;
  int part;
  int ux0, ux1, uy0, uy1;
};

const std::vector<UnitRect>& unit_partitions() {
  static const std::vector<UnitRect> table = [] {
    std::vector<UnitRect> t;
    for (PartitionMode m : kAllModes) {
      if (!is_inter_partition(m)) continue;
      const std::vector<PartitionRect> parts = partitions_of(m);
      for (size_t p = 0; p < parts.size(); ++p) {
        const PartitionRect& r = parts[p];
        t.push_back({mode_index(m) - 1, static_cast<int>(p), r.x / 4, (r.x + r.w) / 4, r.y / 4, (r.y + r.h) / 4});
      }
    }
    return t;
  }();
  return table;
}

using UnitSads = std::array<uint32_t, 16>;

constexpr int kPartitionCount = 41;

// Partition SADs in unit_partitions order, built bottom-up from the 4x4 units.
void partition_sums(const UnitSads& u, std::array<uint32_t, kPartitionCount>& out) {
  uint32_t s84[8];
  uint32_t s48[8];
  uint32_t s88[4];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 2; ++c) s84[r * 2 + c] = u[r * 4 + 2 * c] + u[r * 4 + 2 * c + 1];
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) s48[r * 4 + c] = u[2 * r * 4 + c] + u[(2 * r + 1) * 4 + c];
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) s88[r * 2 + c] = s84[2 * r * 2 + c] + s84[(2 * r + 1) * 2 + c];
  }
  const uint32_t s168[2] = {s88[0] + s88[1], s88[2] + s88[3]};
  const uint32_t s816[2] = {s88[0] + s88[2], s88[1] + s88[3]};
  int k = 0;
  out[k++] = s168[0] + s168[1];
  for (uint32_t v : s168) out[k++] = v;
  for (uint32_t v : s816) out[k++] = v;
  for (uint32_t v : s88) out[k++] = v;
  for (uint32_t v : s84) out[k++] = v;
  for (uint32_t v : s48) out[k++] = v;
  for (uint32_t v : u) out[k++] = v;
}

// Every 16-wide row in bounds, rows [row_begin, row_end) of units valid.
void unit_sads_full_width(const uint8_t* const* cur_rows, PlaneView ref, int rx, int ry, int row_begin, int row_end,
                          UnitSads& units) {
#if defined(__SSE2__)
  const __m128i zero = _mm_setzero_si128();
  const __m128i ones = _mm_set1_epi16(1);
  for (int uy = row_begin; uy < row_end; ++uy) {
    __m128i acc_lo = zero;
    __m128i acc_hi = zero;
    for (int j = 4 * uy; j < 4 * uy + 4; ++j) {
      const __m128i c = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cur_rows[j]));
      const __m128i r = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ref.row(ry + j) + rx));
      const __m128i d = _mm_or_si128(_mm_subs_epu8(c, r), _mm_subs_epu8(r, c));
      acc_lo = _mm_add_epi16(acc_lo, _mm_unpacklo_epi8(d, zero));
      acc_hi = _mm_add_epi16(acc_hi, _mm_unpackhi_epi8(d, zero));
    }
    alignas(16) int32_t lo[4];
    alignas(16) int32_t hi[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(lo), _mm_madd_epi16(acc_lo, ones));
    _mm_store_si128(reinterpret_cast<__m128i*>(hi), _mm_madd_epi16(acc_hi, ones));
    units[uy * 4 + 0] = static_cast<uint32_t>(lo[0] + lo[1]);
    units[uy * 4 + 1] = static_cast<uint32_t>(lo[2] + lo[3]);
    units[uy * 4 + 2] = static_cast<uint32_t>(hi[0] + hi[1]);
    units[uy * 4 + 3] = static_cast<uint32_t>(hi[2] + hi[3]);
  }
#else
  for (int uy = row_begin; uy < row_end; ++uy) {
    std::array<uint32_t, 16> acc{};
    for (int j = 4 * uy; j < 4 * uy + 4; ++j) {
      const uint8_t* r = ref.row(ry + j) + rx;
      for (int i = 0; i < kMbSize; ++i) acc[i] += abs_diff(cur_rows[j][i], r[i]);
    }
    for (int ux = 0; ux < 4; ++ux) units[uy * 4 + ux] = acc[4 * ux] + acc[4 * ux + 1] + acc[4 * ux + 2] + acc[4 * ux + 3];
  }
#endif
}

void unit_sads_partial(const uint8_t* const* cur_rows, PlaneView ref, int rx, int ry, int col_begin, int col_end,
                       int row_begin, int row_end, UnitSads& units) {
  for (int uy = row_begin; uy < row_end; ++uy) {
    for (int ux = col_begin; ux < col_end; ++ux) {
      uint32_t sad = 0;
      for (int j = 4 * uy; j < 4 * uy + 4; ++j) {
        const uint8_t* r = ref.row(ry + j) + rx;
        for (int i = 4 * ux; i < 4 * ux + 4; ++i) sad += abs_diff(cur_rows[j][i], r[i]);
      }
      units[uy * 4 + ux] = sad;
    }
  }
}

}  // namespace

MbMotionSearch::MbMotionSearch(const MacroblockView& mb, PlaneView ref, int range, MotionVector pmv, int qp)
    : range_(range) {
  if (!valid_range(range)) throw std::invalid_argument("search range must be one of 2, 4, 8, 32");
  if (ref.width != mb.plane().width || ref.height != mb.plane().height) {
    throw std::invalid_argument("reference plane size differs from the current picture");
  }
  const double lm = lambda_motion(qp);
  const int x0 = mb.x();
  const int y0 = mb.y();
  const uint8_t* cur_rows[kMbSize];
  for (int j = 0; j < kMbSize; ++j) cur_rows[j] = mb.row(j);

  const std::vector<UnitRect>& rects = unit_partitions();
  std::array<SearchResult, kPartitionCount> best;
  for (SearchResult& b : best) b.cost = std::numeric_limits<double>::infinity();
  std::array<uint32_t, kPartitionCount> sums{};
  int64_t interior = 0;  // candidates with every unit in bounds

  UnitSads units{};
  for (int dy = -range; dy <= range; ++dy) {
    const int row_begin = std::max(0, ceil_div(-(y0 + dy), 4));
    const int row_end = std::min(4, floor_div(ref.height - y0 - dy - 4, 4) + 1);
    if (row_begin >= row_end) continue;
    for (int dx = -range; dx <= range; ++dx) {
      const int col_begin = std::max(0, ceil_div(-(x0 + dx), 4));
      const int col_end = std::min(4, floor_div(ref.width - x0 - dx - 4, 4) + 1);
      if (col_begin >= col_end) continue;

      const bool full_width = col_begin == 0 && col_end == 4;
      if (full_width) {
        unit_sads_full_width(cur_rows, ref, x0 + dx, y0 + dy, row_begin, row_end, units);
      } else {
        unit_sads_partial(cur_rows, ref, x0 + dx, y0 + dy, col_begin, col_end, row_begin, row_end, units);
      }
      const MotionVector mv{dx, dy};
      const double mv_cost = lm * static_cast<double>(mv_bits(mv, pmv));

      if (full_width && row_begin == 0 && row_end == 4) {
        partition_sums(units, sums);
        ++interior;
        for (int k = 0; k < kPartitionCount; ++k) {
          SearchResult& b = best[k];
          const double cost = static_cast<double>(sums[k]) + mv_cost;
          if (cost <= b.cost && better_candidate(cost, mv, b.cost, b.mv)) {
            b.cost = cost;
            b.mv = mv;
            b.sad = sums[k];
          }
        }
        continue;
      }
      for (int k = 0; k < kPartitionCount; ++k) {
        const UnitRect& u = rects[k];
        if (u.ux0 < col_begin || u.ux1 > col_end || u.uy0 < row_begin || u.uy1 > row_end) continue;
        uint32_t sad = 0;
        for (int uy = u.uy0; uy < u.uy1; ++uy) {
          for (int ux = u.ux0; ux < u.ux1; ++ux) sad += units[uy * 4 + ux];
        }
        SearchResult& b = best[k];
        ++b.evaluations;
        const double cost = static_cast<double>(sad) + mv_cost;
        if (cost <= b.cost && better_candidate(cost, mv, b.cost, b.mv)) {
          b.cost = cost;
          b.mv = mv;
          b.sad = sad;
        }
      }
    }
  }
  for (int k = 0; k < kPartitionCount; ++k) {
    best[k].evaluations += interior;
    results_[rects[k].mode_slot].push_back(best[k]);
  }
}

std::vector<SearchResult> MbMotionSearch::search(PartitionMode mode) const {
  if (!is_inter_partition(mode)) throw std::invalid_argument("MbMotionSearch::search: not an inter mode");
  return results_[mode_index(mode) - 1];
}

ModeCost skip_cost(const MacroblockView& mb, PlaneView ref, MotionVector pmv, int qp) {
  const MotionVector mv{std::clamp(pmv.dx, -mb.x(), ref.width - kMbSize - mb.x()),
                        std::clamp(pmv.dy, -mb.y(), ref.height - kMbSize - mb.y())};
  ModeCost cost;
  cost.mode = PartitionMode::Skip;
  cost.direction = PredictionDirection::Forward;
  cost.mvs_fwd = {mv};
  cost.evaluations = 1;
  cost.bits = 1;
  for (int j = 0; j < kMbSize; ++j) {
    const uint8_t* src = mb.row(j);
    const uint8_t* r = ref.row(mb.y() + j + mv.dy) + mb.x() + mv.dx;
    for (int i = 0; i < kMbSize; ++i) {
      const int d = static_cast<int>(src[i]) - r[i];
      cost.distortion += d * d;
      cost.recon[j * kMbSize + i] = r[i];
    }
  }
  cost.j_cost = static_cast<double>(cost.distortion) + lambda_mode(qp) * static_cast<double>(cost.bits);
  return cost;
}

ModeCost intra_dc_cost(const MacroblockView& mb, const IntraNeighbors& neighbors, int qp) {
  int sum = 0;
  int count = 0;
  for (const auto* border : {&neighbors.top, &neighbors.left}) {
    if (!border->has_value()) continue;
    for (uint8_t s : **border) sum += s;
    count += kMbSize;
  }
  const uint8_t dc = count == 0 ? uint8_t{128} : static_cast<uint8_t>((sum + count / 2) / count);
  std::array<uint8_t, 256> prediction;
  prediction.fill(dc);

  ModeCost cost;
  cost.mode = PartitionMode::Intra;
  cost.direction = PredictionDirection::None;
  cost.evaluations = 1;
  return finish(std::move(cost), mb, prediction, qp, mode_bits(PartitionMode::Intra));
}

ModeCost inter_layer_cost(const MacroblockView& mb, PlaneView upsampled_base, int qp) {
  if (upsampled_base.width != mb.plane().width || upsampled_base.height != mb.plane().height) {
    throw std::invalid_argument("inter-layer plane size differs from the current picture");
  }
  std::array<uint8_t, 256> prediction;
  for (int j = 0; j < kMbSize; ++j) {
    std::copy_n(upsampled_base.row(mb.y() + j) + mb.x(), kMbSize, prediction.begin() + j * kMbSize);
  }
  ModeCost cost;
  cost.mode = PartitionMode::P16x16;
  cost.direction = PredictionDirection::InterLayer;
  cost.mvs_fwd = {MotionVector{}};
  cost.evaluations = 1;
  return finish(std::move(cost), mb, prediction, qp, 1);
}

namespace {

ModeCost evaluate_with(const MbContext& ctx, PartitionMode mode, const MbMotionSearch* fwd,
                       const MbMotionSearch* bwd) {
  if (fwd == nullptr && bwd == nullptr) throw std::invalid_argument("inter mode needs at least one reference");
  const MacroblockView mb = ctx.mb();
  const std::vector<PartitionRect> parts = partitions_of(mode);
  const bool two_refs = fwd != nullptr && bwd != nullptr;

  std::vector<MotionVector> mvs_f;
  std::vector<MotionVector> mvs_b;
  int64_t evaluations = 0;
  int64_t mv_bits_f = 0;
  int64_t mv_bits_b = 0;
  std::array<uint8_t, 256> pred_f{};
  std::array<uint8_t, 256> pred_b{};
  if (fwd != nullptr) {
    for (const SearchResult& r : fwd->search(mode)) {
      mvs_f.push_back(r.mv);
      evaluations += r.evaluations;
      mv_bits_f += mv_bits(r.mv, ctx.pmv_fwd);
    }
    predict_partitions(mb, *ctx.fwd_ref, parts, mvs_f, pred_f);
  }
  if (bwd != nullptr) {
    for (const SearchResult& r : bwd->search(mode)) {
      mvs_b.push_back(r.mv);
      evaluations += r.evaluations;
      mv_bits_b += mv_bits(r.mv, ctx.pmv_bwd);
    }
    predict_partitions(mb, *ctx.bwd_ref, parts, mvs_b, pred_b);
  }

  const int64_t header = mode_bits(mode);
  auto make = [&](PredictionDirection dir) {
    ModeCost c;
    c.mode = mode;
    c.direction = dir;
    c.evaluations = evaluations;
    if (dir != PredictionDirection::Backward) c.mvs_fwd = mvs_f;
    if (dir != PredictionDirection::Forward) c.mvs_bwd = mvs_b;
    return c;
  };

  std::optional<ModeCost> best;
  auto consider = [&](ModeCost c) {
    if (!best || c.j_cost < best->j_cost) best = std::move(c);
  };
  if (fwd != nullptr) {
    consider(finish(make(PredictionDirection::Forward), mb, pred_f, ctx.qp,
                    header + direction_bits(PredictionDirection::Forward, two_refs) + mv_bits_f));
  }
  if (bwd != nullptr) {
    consider(finish(make(PredictionDirection::Backward), mb, pred_b, ctx.qp,
                    header + direction_bits(PredictionDirection::Backward, two_refs) + mv_bits_b));
  }
  if (two_refs) {
    std::array<uint8_t, 256> pred_bi;
    for (size_t k = 0; k < pred_bi.size(); ++k) {
      pred_bi[k] = static_cast<uint8_t>((pred_f[k] + pred_b[k] + 1) >> 1);
    }
    consider(finish(make(PredictionDirection::Bi), mb, pred_bi, ctx.qp,
                    header + direction_bits(PredictionDirection::Bi, true) + mv_bits_f + mv_bits_b));
  }
  return std::move(*best);
}

}  // namespace

ModeCost evaluate_partition_mode(const MbContext& ctx, PartitionMode mode, const DecisionPlan& plan) {
  if (!is_inter_partition(mode)) throw std::invalid_argument("evaluate_partition_mode: not an inter mode");
  if (!plan.allows(mode)) {
    throw std::invalid_argument("mode " + std::string(mode_name(mode)) + " is not in the decision plan");
  }
  const MacroblockView mb = ctx.mb();
  std::optional<MbMotionSearch> fwd;
  std::optional<MbMotionSearch> bwd;
  if (ctx.fwd_ref) fwd.emplace(mb, *ctx.fwd_ref, plan.search_range, ctx.pmv_fwd, ctx.qp);
  if (ctx.bwd_ref) bwd.emplace(mb, *ctx.bwd_ref, plan.search_range, ctx.pmv_bwd, ctx.qp);
  return evaluate_with(ctx, mode, fwd ? &*fwd : nullptr, bwd ? &*bwd : nullptr);
}

ModeDecision choose_mb_mode(const MbContext& ctx, const DecisionPlan& plan) {
  if (plan.modes.empty()) throw std::invalid_argument("choose_mb_mode: empty plan");
  const MacroblockView mb = ctx.mb();

  std::optional<MbMotionSearch> fwd;
  std::optional<MbMotionSearch> bwd;
  bool searched = false;

  ModeDecision decision;
  decision.label = plan.label;
  decision.plan = plan;
  bool have_best = false;
  auto consider = [&](ModeCost c) {
    decision.total_evaluations += c.evaluations;
    if (!have_best || c.j_cost < decision.best.j_cost) {
      decision.best = std::move(c);
      have_best = true;
    }
  };

  for (PartitionMode mode : plan.modes) {
    if (mode == PartitionMode::Skip) {
      if (ctx.fwd_ref) consider(skip_cost(mb, *ctx.fwd_ref, ctx.pmv_fwd, ctx.qp));
    } else if (mode == PartitionMode::Intra) {
      const IntraNeighbors neighbors =
          ctx.recon ? IntraNeighbors::from_plane(*ctx.recon, ctx.mb_x, ctx.mb_y) : IntraNeighbors{};
      consider(intra_dc_cost(mb, neighbors, ctx.qp));
    } else {
      if (!ctx.fwd_ref && !ctx.bwd_ref) continue;
      if (!searched) {
        if (ctx.fwd_ref) fwd.emplace(mb, *ctx.fwd_ref, plan.search_range, ctx.pmv_fwd, ctx.qp);
        if (ctx.bwd_ref) bwd.emplace(mb, *ctx.bwd_ref, plan.search_range, ctx.pmv_bwd, ctx.qp);
        searched = true;
      }
      // Evaluations are counted once per mode; directions share the searches.
      consider(evaluate_with(ctx, mode, fwd ? &*fwd : nullptr, bwd ? &*bwd : nullptr));
      if (mode == PartitionMode::P16x16 && ctx.inter_layer) consider(inter_layer_cost(mb, *ctx.inter_layer, ctx.qp));
    }
  }
  if (!have_best) throw std::invalid_argument("choose_mb_mode: no mode of the plan is applicable");
  return decision;
}

}  // namespace svcmd
