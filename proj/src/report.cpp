#include "svcmd/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace svcmd {

namespace {

using nlohmann::ordered_json;

ordered_json class_counts_json(const ClassCounts& c) {
  ordered_json j;
  for (size_t k = 0; k < c.size(); ++k) j[std::string(class_name(static_cast<ClassLabel>(k + 1)))] = c[k];
  return j;
}

ordered_json mode_counts_json(const ModeCounts& c) {
  ordered_json j;
  for (PartitionMode m : kAllModes) j[std::string(mode_name(m))] = c[mode_index(m)];
  return j;
}

ordered_json direction_counts_json(const DirectionCounts& c) {
  ordered_json j;
  for (size_t k = 0; k < c.size(); ++k) {
    j[std::string(direction_name(static_cast<PredictionDirection>(k)))] = c[k];
  }
  return j;
}

std::string_view kind_name(FrameKind kind) { return kind == FrameKind::Key ? "KEY" : "B"; }

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

double parse_double(const std::string& s, size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("rd csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ordered_json encode_report_json(const EncodeReport& report, const ReportOptions& opts) {
  const EncoderConfig& cfg = report.config;
  ordered_json j;
  j["strategy"] = strategy_name(report.strategy);
  j["layer_mode"] = layer_mode_name(cfg.layers);
  j["gop_size"] = cfg.gop_size;
  j["qp"] = {{"label", cfg.qp.label()}, {"bl", cfg.qp.bl}, {"el1", cfg.qp.el1}, {"el2", cfg.qp.el2}};
  j["thresholds"] = {{"k1", cfg.thresholds.k1}, {"k2", cfg.thresholds.k2}, {"k3", cfg.thresholds.k3},
                     {"d1", cfg.thresholds.d1}, {"d2", cfg.thresholds.d2}, {"d3", cfg.thresholds.d3}};
  j["operating_point"] = {{"qp", report.operating_point.qp_label},
                          {"rate_kbps", report.operating_point.rate_kbps},
                          {"psnr_db", report.operating_point.psnr_y}};
  j["total_evaluations"] = report.total_evaluations;
  if (opts.include_timing) j["total_wall_ms"] = report.total_wall_ms;

  ordered_json layers = ordered_json::array();
  for (const LayerReport& l : report.layers) {
    ordered_json lj;
    lj["id"] = l.config.id;
    lj["role"] = role_name(l.config.role);
    lj["width"] = l.config.width;
    lj["height"] = l.config.height;
    lj["frame_rate"] = l.frame_rate;
    lj["frame_count"] = l.frame_count;
    lj["gop_size"] = l.config.gop_size;
    lj["qp"] = l.config.qp;
    lj["qp_top"] = l.config.qp_top;
    lj["inter_layer"] = l.config.inter_layer;
    lj["avg_psnr_y"] = l.avg_psnr_y;
    lj["total_bits"] = l.total_bits;
    lj["rate_kbps"] = l.rate_kbps;
    lj["evaluations"] = l.evaluations;
    if (opts.include_timing) lj["wall_ms"] = l.wall_ms;
    lj["mb_total"] = l.mb_total;
    lj["key_mbs"] = l.key_mbs;
    lj["inter_mbs"] = l.inter_mbs;
    lj["class_counts"] = class_counts_json(l.class_counts);
    lj["mode_counts"] = mode_counts_json(l.mode_counts);
    lj["direction_counts"] = direction_counts_json(l.direction_counts);
    ordered_json frames = ordered_json::array();
    for (const FrameReport& f : l.frames) {
      frames.push_back({{"index", f.index},
                        {"level", f.level},
                        {"kind", kind_name(f.kind)},
                        {"qp", f.qp},
                        {"bits", f.bits},
                        {"psnr_y", f.psnr_y},
                        {"evaluations", f.evaluations},
                        {"class_counts", class_counts_json(f.class_counts)}});
    }
    lj["frames"] = std::move(frames);
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j;
}

ordered_json source_json(const SourceInfo& source) {
  return {{"description", source.description},
          {"width", source.width},
          {"height", source.height},
          {"frames", source.frames},
          {"frame_rate", source.frame_rate}};
}

ordered_json encode_run_json(const SourceInfo& source, const std::vector<EncodeReport>& runs,
                             const ReportOptions& opts) {
  ordered_json j;
  j["schema"] = kEncodeSchema;
  j["source"] = source_json(source);
  ordered_json list = ordered_json::array();
  for (const EncodeReport& r : runs) list.push_back(encode_report_json(r, opts));
  j["runs"] = std::move(list);
  return j;
}

std::string rd_csv(const std::vector<RdSample>& samples) {
  std::string out = "qp,rate_kbps,psnr_db\n";
  for (const RdSample& s : samples) {
    out += s.qp_label + "," + format_number(s.rate_kbps) + "," + format_number(s.psnr_y) + "\n";
  }
  return out;
}

std::vector<RdPoint> parse_rd_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<RdPoint> points;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (trimmed != "qp,rate_kbps,psnr_db") {
        throw FormatError("rd csv: expected header 'qp,rate_kbps,psnr_db', got '" + trimmed + "'");
      }
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream row(trimmed);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(trim(f));
    if (fields.size() != 3) throw FormatError("rd csv line " + std::to_string(line_no) + ": expected 3 fields");
    points.push_back({parse_double(fields[1], line_no), parse_double(fields[2], line_no)});
  }
  if (!header_seen) throw FormatError("rd csv: empty input");
  return points;
}

std::vector<RdPoint> read_rd_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rd_csv(buf.str());
}

std::string class_map_csv(const EncodeReport& report) {
  std::string out = "layer,frame,mb_x,mb_y,sod,dcog,class,mode\n";
  for (const LayerReport& l : report.layers) {
    const std::string layer = std::to_string(l.config.id);
    for (const FrameReport& f : l.frames) {
      const std::string frame = std::to_string(f.index);
      for (const MbRecord& mb : f.mbs) {
        out += layer;
        out += ',' + frame + ',' + std::to_string(mb.mb_x) + ',' + std::to_string(mb.mb_y) + ',';
        out += std::to_string(mb.sod) + ',' + format_number(mb.dcog) + ',';
        out += mb.label ? std::string(class_name(*mb.label)) : std::string("KEY");
        out += ',';
        out += mode_name(mb.mode);
        out += '\n';
      }
    }
  }
  return out;
}

std::string class_map_pgm(const EncodeReport& report) {
  if (report.layers.empty()) throw std::invalid_argument("class map needs at least one layer");
  const LayerReport& top = report.layers.back();
  const int cols = top.config.width / kMbSize;
  const int rows = top.config.height / kMbSize;
  std::vector<int> max_class(static_cast<size_t>(cols) * rows, 0);
  for (const FrameReport& f : top.frames) {
    for (const MbRecord& mb : f.mbs) {
      if (!mb.label) continue;
      int& slot = max_class[static_cast<size_t>(mb.mb_y) * cols + mb.mb_x];
      slot = std::max(slot, class_index(*mb.label));
    }
  }
  static constexpr uint8_t kGray[5] = {0, 64, 128, 192, 255};
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  for (int c : max_class) out.push_back(static_cast<char>(kGray[c]));
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace svcmd
