#include "svcmd/scalable_encoder.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "svcmd/block_metrics.hpp"
#include "svcmd/video_io.hpp"

namespace svcmd {

// ---------------------------------------------------------------------------
// GOP schedule

std::vector<int> GopSchedule::decode_order() const {
  std::vector<int> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [this](int a, int b) { return entries[a].level < entries[b].level; });
  return order;
}

std::vector<int> GopSchedule::frames_up_to_level(int max_kept) const {
  std::vector<int> kept;
  for (const GopEntry& e : entries) {
    if (e.level <= max_kept) kept.push_back(e.index);
  }
  return kept;
}

GopSchedule build_gop_schedule(int gop_size, int num_frames) {
  if (gop_size < 1 || gop_size > 32 || !std::has_single_bit(static_cast<unsigned>(gop_size))) {
    throw std::invalid_argument("gop size must be a power of two in [1, 32]");
  }
  if (num_frames < 1) throw std::invalid_argument("schedule needs at least one frame");

  GopSchedule schedule;
  schedule.gop_size = gop_size;
  schedule.max_level = std::countr_zero(static_cast<unsigned>(gop_size));
  schedule.entries.resize(num_frames);
  for (int i = 0; i < num_frames; ++i) {
    GopEntry& e = schedule.entries[i];
    e.index = i;
    const int offset = i % gop_size;
    const bool closes_partial_gop = (i == num_frames - 1);
    if (offset == 0 || closes_partial_gop) {
      e.kind = FrameKind::Key;
      e.level = 0;
    } else {
      e.kind = FrameKind::B;
      e.level = schedule.max_level - std::countr_zero(static_cast<unsigned>(offset));
    }
  }
  for (GopEntry& e : schedule.entries) {
    if (e.kind == FrameKind::Key) continue;
    for (int j = e.index - 1; j >= 0; --j) {
      if (schedule.entries[j].level < e.level) {
        e.fwd_ref = j;
        break;
      }
    }
    for (int j = e.index + 1; j < num_frames; ++j) {
      if (schedule.entries[j].level < e.level) {
        e.bwd_ref = j;
        break;
      }
    }
  }
  return schedule;
}

// ---------------------------------------------------------------------------
// Configuration helpers

std::string_view strategy_name(Strategy s) { return s == Strategy::Proposed ? "proposed" : "baseline"; }
std::string_view layer_mode_name(LayerMode m) { return m == LayerMode::Single ? "single" : "scalable"; }
std::string_view role_name(LayerRole r) { return r == LayerRole::Base ? "base" : "enhancement"; }

std::string QpPoint::label() const {
  if (bl == el1 && el1 == el2) return std::to_string(bl);
  return std::to_string(bl) + "/" + std::to_string(el1) + "/" + std::to_string(el2);
}

void QpPoint::validate() const {
  for (int q : {bl, el1, el2}) {
    if (q < 0 || q > 51) throw std::invalid_argument("qp " + std::to_string(q) + " outside [0, 51]");
  }
}

std::vector<LayerInput> build_layer_inputs(const Sequence& source, const EncoderConfig& config) {
  require_mb_aligned(source.width, source.height);
  config.qp.validate();
  if (source.frames.empty()) throw std::invalid_argument("source sequence has no frames");

  std::vector<LayerInput> layers;
  if (config.layers == LayerMode::Single) {
    LayerInput single;
    single.config = {0, LayerRole::Enhancement, source.width, source.height, 1, config.gop_size,
                     config.qp.el1, config.qp.el2, false};
    single.frames = source;
    layers.push_back(std::move(single));
    return layers;
  }

  if (source.width % 32 != 0 || source.height % 32 != 0) {
    throw std::invalid_argument("scalable coding needs source dimensions divisible by 32");
  }
  if (source.frames.size() < 2) throw std::invalid_argument("scalable coding needs at least two frames");

  LayerInput base;
  base.config = {0, LayerRole::Base, source.width / 2, source.height / 2, 2, std::max(1, config.gop_size / 2),
                 config.qp.bl, config.qp.bl, false};
  base.frames.width = source.width / 2;
  base.frames.height = source.height / 2;
  base.frames.frame_rate = {source.frame_rate.num, source.frame_rate.den * 2};
  for (size_t i = 0; i < source.frames.size(); i += 2) {
    Frame f = downsample_2x2(source.frames[i]);
    f.index = static_cast<int>(base.frames.frames.size());
    base.frames.frames.push_back(std::move(f));
  }

  LayerInput enhancement;
  enhancement.config = {1, LayerRole::Enhancement, source.width, source.height, 1, config.gop_size,
                        config.qp.el1, config.qp.el2, true};
  enhancement.frames = source;

  layers.push_back(std::move(base));
  layers.push_back(std::move(enhancement));
  return layers;
}

// ---------------------------------------------------------------------------
// Frame encoding

namespace {

void store_block(Frame& recon, int mb_x, int mb_y, const std::array<uint8_t, 256>& block) {
  for (int j = 0; j < kMbSize; ++j) {
    std::copy_n(block.begin() + j * kMbSize, kMbSize,
                recon.y.begin() + static_cast<ptrdiff_t>(mb_y * kMbSize + j) * recon.width + mb_x * kMbSize);
  }
}

void tally(FrameReport& report, const MbRecord& rec) {
  report.bits += rec.bits;
  report.evaluations += rec.evaluations;
  report.mode_counts[mode_index(rec.mode)]++;
  report.direction_counts[static_cast<size_t>(rec.direction)]++;
  if (rec.label) report.class_counts[class_index(*rec.label) - 1]++;
}

}  // namespace

EncodedFrame encode_frame(const Frame& source, const GopEntry& entry, const FrameRefs& refs, int qp,
                          Strategy strategy, const Thresholds& thresholds) {
  thresholds.validate();
  EncodedFrame out;
  out.recon = Frame(source.index, source.width, source.height);
  out.recon.u = source.u;
  out.recon.v = source.v;
  out.report.index = source.index;
  out.report.level = entry.level;
  out.report.kind = entry.kind;
  out.report.qp = qp;

  const PlaneView src = source.luma();
  const PlaneView recon_plane = out.recon.luma();
  const int cols = source.mb_cols();
  const int rows = source.mb_rows();
  out.report.mbs.reserve(static_cast<size_t>(cols) * rows);

  if (entry.kind == FrameKind::Key) {
    for (int mb_y = 0; mb_y < rows; ++mb_y) {
      for (int mb_x = 0; mb_x < cols; ++mb_x) {
        const MacroblockView mb(src, mb_x, mb_y);
        const ModeCost cost = intra_dc_cost(mb, IntraNeighbors::from_plane(recon_plane, mb_x, mb_y), qp);
        store_block(out.recon, mb_x, mb_y, cost.recon);
        MbRecord rec;
        rec.mb_x = mb_x;
        rec.mb_y = mb_y;
        rec.mode = cost.mode;
        rec.direction = cost.direction;
        rec.bits = cost.bits;
        rec.residual_bits = cost.residual_bits;
        rec.distortion = cost.distortion;
        rec.evaluations = cost.evaluations;
        tally(out.report, rec);
        out.report.mbs.push_back(std::move(rec));
      }
    }
    out.report.psnr_y = frame_psnr_y(source, out.recon);
    return out;
  }

  if (refs.fwd_recon == nullptr || refs.bwd_recon == nullptr || refs.fwd_source == nullptr) {
    throw std::invalid_argument("B frame " + std::to_string(source.index) + " is missing a reference");
  }
  for (const Frame* f : {refs.fwd_recon, refs.bwd_recon, refs.fwd_source, refs.inter_layer}) {
    if (f != nullptr && (f->width != source.width || f->height != source.height)) {
      throw std::invalid_argument("reference size differs from the current frame");
    }
  }

  // Representative MVs per MB for spatial prediction.
  std::vector<std::optional<MotionVector>> fwd_field(static_cast<size_t>(cols) * rows);
  std::vector<std::optional<MotionVector>> bwd_field(static_cast<size_t>(cols) * rows);
  auto neighbour = [&](const std::vector<std::optional<MotionVector>>& field, int x, int y) {
    if (x < 0 || y < 0 || x >= cols) return std::optional<MotionVector>{};
    return field[static_cast<size_t>(y) * cols + x];
  };

  const PlaneView fwd_source = refs.fwd_source->luma();
  for (int mb_y = 0; mb_y < rows; ++mb_y) {
    for (int mb_x = 0; mb_x < cols; ++mb_x) {
      const MacroblockView mb(src, mb_x, mb_y);
      const MacroblockView colocated(fwd_source, mb_x, mb_y);
      MbRecord rec;
      rec.mb_x = mb_x;
      rec.mb_y = mb_y;
      rec.sod = sod(mb, colocated);
      rec.dcog = dcog(mb, colocated);

      const DecisionPlan plan = strategy == Strategy::Proposed
                                    ? plan_for_class(classify_mb(rec.sod, rec.dcog, qp, thresholds))
                                    : baseline_plan();

      MbContext ctx;
      ctx.source = src;
      ctx.mb_x = mb_x;
      ctx.mb_y = mb_y;
      ctx.qp = qp;
      ctx.fwd_ref = refs.fwd_recon->luma();
      ctx.bwd_ref = refs.bwd_recon->luma();
      if (refs.inter_layer != nullptr) ctx.inter_layer = refs.inter_layer->luma();
      ctx.recon = recon_plane;
      ctx.pmv_fwd = median_pmv(neighbour(fwd_field, mb_x - 1, mb_y), neighbour(fwd_field, mb_x, mb_y - 1),
                               neighbour(fwd_field, mb_x + 1, mb_y - 1));
      ctx.pmv_bwd = median_pmv(neighbour(bwd_field, mb_x - 1, mb_y), neighbour(bwd_field, mb_x, mb_y - 1),
                               neighbour(bwd_field, mb_x + 1, mb_y - 1));

      ModeDecision decision = choose_mb_mode(ctx, plan);
      store_block(out.recon, mb_x, mb_y, decision.best.recon);

      const size_t slot = static_cast<size_t>(mb_y) * cols + mb_x;
      if (!decision.best.mvs_fwd.empty() && decision.best.direction != PredictionDirection::InterLayer) {
        fwd_field[slot] = decision.best.mvs_fwd.front();
      }
      if (!decision.best.mvs_bwd.empty()) bwd_field[slot] = decision.best.mvs_bwd.front();

      rec.label = decision.label;
      rec.mode = decision.best.mode;
      rec.direction = decision.best.direction;
      rec.mvs_fwd = std::move(decision.best.mvs_fwd);
      rec.mvs_bwd = std::move(decision.best.mvs_bwd);
      rec.bits = decision.best.bits;
      rec.residual_bits = decision.best.residual_bits;
      rec.distortion = decision.best.distortion;
      rec.evaluations = decision.total_evaluations;
      tally(out.report, rec);
      out.report.mbs.push_back(std::move(rec));
    }
  }
  out.report.psnr_y = frame_psnr_y(source, out.recon);
  return out;
}

// ---------------------------------------------------------------------------
// Sequence encoding

namespace {

template <typename Fn>
void run_parallel(const std::vector<int>& items, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  if (workers == 1) {
    for (int item : items) fn(item);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t k = next++; k < items.size(); k = next++) {
        try {
          fn(items[k]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

LayerReport encode_layer(const LayerInput& layer, const std::vector<Frame>* base_recon, Strategy strategy,
                         const EncoderConfig& config, std::vector<Frame>& recon_out) {
  const auto start = std::chrono::steady_clock::now();
  const Sequence& seq = layer.frames;
  const int n = static_cast<int>(seq.frames.size());
  const GopSchedule schedule = build_gop_schedule(layer.config.gop_size, n);

  recon_out.assign(n, Frame{});
  std::vector<FrameReport> reports(n);

  auto qp_for = [&](const GopEntry& e) {
    return (schedule.max_level > 0 && e.level == schedule.max_level) ? layer.config.qp_top : layer.config.qp;
  };

  auto encode_one = [&](int i) {
    const GopEntry& e = schedule.entries[i];
    FrameRefs refs;
    std::optional<Frame> upsampled;
    if (e.kind == FrameKind::B) {
      refs.fwd_recon = &recon_out[*e.fwd_ref];
      refs.bwd_recon = &recon_out[*e.bwd_ref];
      refs.fwd_source = &seq.frames[*e.fwd_ref];
      if (layer.config.inter_layer && base_recon != nullptr && i % 2 == 0 &&
          static_cast<size_t>(i / 2) < base_recon->size()) {
        upsampled = upsample_bilinear_2x((*base_recon)[i / 2]);
        refs.inter_layer = &*upsampled;
      }
    }
    EncodedFrame encoded = encode_frame(seq.frames[i], e, refs, qp_for(e), strategy, config.thresholds);
    recon_out[i] = std::move(encoded.recon);
    reports[i] = std::move(encoded.report);
  };

  // Frames of one temporal level only reference lower levels, so each level is
  // a batch of independent encodes.
  for (int level = 0; level <= schedule.max_level; ++level) {
    std::vector<int> batch;
    for (const GopEntry& e : schedule.entries) {
      if (e.level == level) batch.push_back(e.index);
    }
    run_parallel(batch, config.jobs, encode_one);
  }

  LayerReport report;
  report.config = layer.config;
  report.frame_rate = seq.frame_rate.hz();
  report.frame_count = n;
  double psnr_sum = 0.0;
  for (FrameReport& f : reports) {
    psnr_sum += f.psnr_y;
    report.total_bits += f.bits;
    report.evaluations += f.evaluations;
    const auto mbs = static_cast<int64_t>(f.mbs.size());
    report.mb_total += mbs;
    (f.kind == FrameKind::Key ? report.key_mbs : report.inter_mbs) += mbs;
    for (size_t k = 0; k < report.class_counts.size(); ++k) report.class_counts[k] += f.class_counts[k];
    for (size_t k = 0; k < report.mode_counts.size(); ++k) report.mode_counts[k] += f.mode_counts[k];
    for (size_t k = 0; k < report.direction_counts.size(); ++k) report.direction_counts[k] += f.direction_counts[k];
  }
  report.avg_psnr_y = psnr_sum / n;
  report.rate_kbps = static_cast<double>(report.total_bits) * report.frame_rate / n / 1000.0;
  report.frames = std::move(reports);
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

EncodeReport encode_sequence(const Sequence& source, const EncoderConfig& config, Strategy strategy) {
  config.thresholds.validate();
  if (config.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  const std::vector<LayerInput> layers = build_layer_inputs(source, config);

  EncodeReport report;
  report.strategy = strategy;
  report.config = config;

  std::vector<Frame> previous_recon;
  for (const LayerInput& layer : layers) {
    std::vector<Frame> recon;
    const std::vector<Frame>* base = layer.config.inter_layer ? &previous_recon : nullptr;
    report.layers.push_back(encode_layer(layer, base, strategy, config, recon));
    previous_recon = std::move(recon);
  }

  report.operating_point.qp_label = config.qp.label();
  for (const LayerReport& l : report.layers) {
    report.operating_point.rate_kbps += l.rate_kbps;
    report.total_evaluations += l.evaluations;
    report.total_wall_ms += l.wall_ms;
  }
  report.operating_point.psnr_y = report.layers.back().avg_psnr_y;
  return report;
}

}  // namespace svcmd
