#include "svcmd/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "svcmd/bd_metrics.hpp"
#include "svcmd/report.hpp"
#include "svcmd/synth.hpp"
#include "svcmd/video_io.hpp"

namespace svcmd {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string input;
  std::string pattern = "static";
  std::string size = "cif";
  std::optional<int> frames;
  uint64_t seed = 1;
  int fps = 30;
  int gop = 16;
  std::vector<std::string> qp;
  Thresholds thresholds;
  std::string strategy = "proposed";
  std::string layers = "scalable";
  std::string report;
  std::string rd_csv;
  std::string map;
  std::string pgm;
  std::string out;
  int jobs = 1;
  bool timing = false;
  std::vector<double> scales = {0.5, 1.0, 2.0};
};

constexpr int kDefaultSynthFrames = 33;

// Copies fields named by `name` from one Options to another.
using FieldCopy = std::function<void(Options&, const Options&)>;

const std::vector<std::pair<std::string, FieldCopy>>& field_table() {
  static const std::vector<std::pair<std::string, FieldCopy>> table = {
      {"input", [](Options& d, const Options& s) { d.input = s.input; }},
      {"pattern", [](Options& d, const Options& s) { d.pattern = s.pattern; }},
      {"size", [](Options& d, const Options& s) { d.size = s.size; }},
      {"frames", [](Options& d, const Options& s) { d.frames = s.frames; }},
      {"seed", [](Options& d, const Options& s) { d.seed = s.seed; }},
      {"fps", [](Options& d, const Options& s) { d.fps = s.fps; }},
      {"gop", [](Options& d, const Options& s) { d.gop = s.gop; }},
      {"qp", [](Options& d, const Options& s) { d.qp = s.qp; }},
      {"k1", [](Options& d, const Options& s) { d.thresholds.k1 = s.thresholds.k1; }},
      {"k2", [](Options& d, const Options& s) { d.thresholds.k2 = s.thresholds.k2; }},
      {"k3", [](Options& d, const Options& s) { d.thresholds.k3 = s.thresholds.k3; }},
      {"d1", [](Options& d, const Options& s) { d.thresholds.d1 = s.thresholds.d1; }},
      {"d2", [](Options& d, const Options& s) { d.thresholds.d2 = s.thresholds.d2; }},
      {"d3", [](Options& d, const Options& s) { d.thresholds.d3 = s.thresholds.d3; }},
      {"strategy", [](Options& d, const Options& s) { d.strategy = s.strategy; }},
      {"layers", [](Options& d, const Options& s) { d.layers = s.layers; }},
      {"report", [](Options& d, const Options& s) { d.report = s.report; }},
      {"rd-csv", [](Options& d, const Options& s) { d.rd_csv = s.rd_csv; }},
      {"map", [](Options& d, const Options& s) { d.map = s.map; }},
      {"pgm", [](Options& d, const Options& s) { d.pgm = s.pgm; }},
      {"out", [](Options& d, const Options& s) { d.out = s.out; }},
      {"jobs", [](Options& d, const Options& s) { d.jobs = s.jobs; }},
      {"timing", [](Options& d, const Options& s) { d.timing = s.timing; }},
      {"scale", [](Options& d, const Options& s) { d.scales = s.scales; }},
  };
  return table;
}

// Config file: a JSON object whose keys are the long flag names.
Options options_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError("config " + path.string() + " must hold a JSON object");

  Options o;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "input") o.input = value.get<std::string>();
      else if (key == "pattern") o.pattern = value.get<std::string>();
      else if (key == "size") o.size = value.get<std::string>();
      else if (key == "frames") o.frames = value.get<int>();
      else if (key == "seed") o.seed = value.get<uint64_t>();
      else if (key == "fps") o.fps = value.get<int>();
      else if (key == "gop") o.gop = value.get<int>();
      else if (key == "qp") {
        o.qp.clear();
        for (const auto& q : value) o.qp.push_back(q.is_string() ? q.get<std::string>() : std::to_string(q.get<int>()));
      } else if (key == "k1") o.thresholds.k1 = value.get<double>();
      else if (key == "k2") o.thresholds.k2 = value.get<double>();
      else if (key == "k3") o.thresholds.k3 = value.get<double>();
      else if (key == "d1") o.thresholds.d1 = value.get<double>();
      else if (key == "d2") o.thresholds.d2 = value.get<double>();
      else if (key == "d3") o.thresholds.d3 = value.get<double>();
      else if (key == "strategy") o.strategy = value.get<std::string>();
      else if (key == "layers") o.layers = value.get<std::string>();
      else if (key == "report") o.report = value.get<std::string>();
      else if (key == "rd-csv") o.rd_csv = value.get<std::string>();
      else if (key == "map") o.map = value.get<std::string>();
      else if (key == "pgm") o.pgm = value.get<std::string>();
      else if (key == "out") o.out = value.get<std::string>();
      else if (key == "jobs") o.jobs = value.get<int>();
      else if (key == "timing") o.timing = value.get<bool>();
      else if (key == "scale") o.scales = value.get<std::vector<double>>();
      else throw FormatError("config " + path.string() + ": unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("config " + path.string() + ": key '" + key + "': " + e.what());
    }
  }
  return o;
}

struct Loaded {
  Sequence sequence;
  SourceInfo info;
};

Loaded load_source(const Options& o) {
  Loaded l;
  if (!o.input.empty()) {
    const std::filesystem::path path = o.input;
    if (path.extension() == ".y4m") {
      l.sequence = read_y4m_file(path);
    } else {
      const FrameSize size = parse_frame_size(o.size);
      l.sequence = read_raw_yuv(path, size.width, size.height, FrameRate{o.fps, 1});
    }
    if (o.frames && *o.frames < static_cast<int>(l.sequence.frames.size())) {
      l.sequence.frames.resize(static_cast<size_t>(std::max(0, *o.frames)));
    }
    l.info.description = path.filename().string();
  } else {
    const PatternSpec spec = PatternSpec::parse(o.pattern);
    const FrameSize size = parse_frame_size(o.size);
    l.sequence = synthesize(spec, size, o.frames.value_or(kDefaultSynthFrames), o.seed, FrameRate{o.fps, 1});
    l.info.description = "synth " + spec.to_string() + " seed " + std::to_string(o.seed);
  }
  l.info.width = l.sequence.width;
  l.info.height = l.sequence.height;
  l.info.frames = static_cast<int>(l.sequence.frames.size());
  l.info.frame_rate = l.sequence.frame_rate.hz();
  return l;
}

std::vector<QpPoint> qp_points(const Options& o) {
  if (o.qp.empty()) return kDefaultQpPoints;
  std::vector<QpPoint> points;
  for (const std::string& q : o.qp) points.push_back(parse_qp_point(q));
  return points;
}

std::vector<Strategy> strategies(const Options& o) {
  if (o.strategy == "proposed") return {Strategy::Proposed};
  if (o.strategy == "baseline") return {Strategy::Baseline};
  if (o.strategy == "both") return {Strategy::Proposed, Strategy::Baseline};
  throw std::invalid_argument("strategy must be proposed, baseline or both");
}

EncoderConfig encoder_config(const Options& o, QpPoint qp) {
  EncoderConfig cfg;
  cfg.gop_size = o.gop;
  cfg.qp = qp;
  cfg.thresholds = o.thresholds;
  cfg.thresholds.validate();
  if (o.layers == "single") cfg.layers = LayerMode::Single;
  else if (o.layers == "scalable") cfg.layers = LayerMode::Scalable;
  else throw std::invalid_argument("layers must be single or scalable");
  if (o.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  cfg.jobs = o.jobs;
  return cfg;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct Artifact {
  std::filesystem::path path;
  std::string contents;
};

void write_all(const std::vector<Artifact>& artifacts, std::ostream& out) {
  for (const Artifact& a : artifacts) {
    write_file_atomic(a.path, a.contents);
    out << "wrote " << a.path.string() << "\n";
  }
}

std::vector<EncodeReport> encode_points(const Sequence& seq, const Options& o, const std::vector<QpPoint>& points,
                                        Strategy strategy) {
  std::vector<EncodeReport> runs;
  for (const QpPoint& qp : points) runs.push_back(encode_sequence(seq, encoder_config(o, qp), strategy));
  return runs;
}

std::vector<RdSample> rd_samples(const std::vector<EncodeReport>& runs) {
  std::vector<RdSample> s;
  for (const EncodeReport& r : runs) s.push_back(r.operating_point);
  return s;
}

std::vector<RdPoint> rd_points(const std::vector<EncodeReport>& runs) {
  std::vector<RdPoint> p;
  for (const EncodeReport& r : runs) p.push_back({r.operating_point.rate_kbps, r.operating_point.psnr_y});
  return p;
}

int64_t total_evaluations(const std::vector<EncodeReport>& runs) {
  int64_t n = 0;
  for (const EncodeReport& r : runs) n += r.total_evaluations;
  return n;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_synth(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw std::invalid_argument("synth needs --out");
  const Loaded l = load_source(o);
  std::ostringstream buf;
  write_y4m(l.sequence, buf);
  write_all({{o.out, buf.str()}}, out);
}

void cmd_encode(const Options& o, std::ostream& out) {
  const Loaded l = load_source(o);
  const std::vector<QpPoint> points = qp_points(o);
  const std::vector<Strategy> which = strategies(o);
  const ReportOptions ropts{o.timing};

  std::vector<Artifact> artifacts;
  for (Strategy s : which) {
    const std::vector<EncodeReport> runs = encode_points(l.sequence, o, points, s);
    auto target = [&](const std::string& p) {
      return which.size() > 1 ? with_strategy_suffix(p, s) : std::filesystem::path(p);
    };
    if (!o.report.empty()) artifacts.push_back({target(o.report), dump(encode_run_json(l.info, runs, ropts))});
    if (!o.rd_csv.empty()) artifacts.push_back({target(o.rd_csv), rd_csv(rd_samples(runs))});
    if (!o.map.empty()) artifacts.push_back({target(o.map), class_map_csv(runs.front())});
    if (!o.pgm.empty()) artifacts.push_back({target(o.pgm), class_map_pgm(runs.front())});
    for (const EncodeReport& r : runs) {
      out << strategy_name(s) << " qp " << r.operating_point.qp_label << ": " << fixed(r.operating_point.rate_kbps, 2)
          << " kbps, " << fixed(r.operating_point.psnr_y, 3) << " dB, " << r.total_evaluations << " evaluations\n";
    }
  }
  write_all(artifacts, out);
}

void cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const Loaded l = load_source(o);
  const std::vector<QpPoint> points = qp_points(o);
  const std::vector<EncodeReport> prop = encode_points(l.sequence, o, points, Strategy::Proposed);
  const std::vector<EncodeReport> base = encode_points(l.sequence, o, points, Strategy::Baseline);

  const int64_t prop_evals = total_evaluations(prop);
  const int64_t base_evals = total_evaluations(base);
  const double reduction = base_evals > 0 ? (1.0 - static_cast<double>(prop_evals) / base_evals) * 100.0 : 0.0;

  out << "qp,proposed_kbps,proposed_db,proposed_evals,proposed_ms,baseline_kbps,baseline_db,baseline_evals,baseline_ms\n";
  ordered_json rows = ordered_json::array();
  for (size_t i = 0; i < points.size(); ++i) {
    const EncodeReport& p = prop[i];
    const EncodeReport& b = base[i];
    out << p.operating_point.qp_label << "," << fixed(p.operating_point.rate_kbps, 3) << ","
        << fixed(p.operating_point.psnr_y, 4) << "," << p.total_evaluations << "," << fixed(p.total_wall_ms, 1) << ","
        << fixed(b.operating_point.rate_kbps, 3) << "," << fixed(b.operating_point.psnr_y, 4) << ","
        << b.total_evaluations << "," << fixed(b.total_wall_ms, 1) << "\n";
    ordered_json row;
    row["qp"] = p.operating_point.qp_label;
    for (const auto& [name, r] : {std::pair<const char*, const EncodeReport*>{"proposed", &p}, {"baseline", &b}}) {
      ordered_json side = {{"rate_kbps", r->operating_point.rate_kbps},
                           {"psnr_db", r->operating_point.psnr_y},
                           {"evaluations", r->total_evaluations}};
      if (o.timing) side["wall_ms"] = r->total_wall_ms;
      row[name] = std::move(side);
    }
    rows.push_back(std::move(row));
  }

  ordered_json j;
  j["schema"] = kCompareSchema;
  j["source"] = source_json(l.info);
  j["rows"] = std::move(rows);
  j["evaluation_reduction_pct"] = reduction;
  out << "evaluation reduction: " << fixed(reduction, 2) << " %\n";
  if (points.size() >= 4) {
    const double dp = bd_psnr(rd_points(base), rd_points(prop));
    const double dr = bd_rate(rd_points(base), rd_points(prop));
    j["bd_psnr_db"] = dp;
    j["bd_rate_pct"] = dr;
    out << "BD-PSNR: " << fixed(dp, 4) << " dB\nBD-rate: " << fixed(dr, 4) << " %\n";
  } else {
    j["bd_psnr_db"] = nullptr;
    j["bd_rate_pct"] = nullptr;
    err << "warning: BD metrics need at least 4 QP points; " << points.size() << " given\n";
  }

  std::vector<Artifact> artifacts;
  if (!o.report.empty()) artifacts.push_back({o.report, dump(j)});
  if (!o.rd_csv.empty()) {
    artifacts.push_back({with_strategy_suffix(o.rd_csv, Strategy::Proposed), rd_csv(rd_samples(prop))});
    artifacts.push_back({with_strategy_suffix(o.rd_csv, Strategy::Baseline), rd_csv(rd_samples(base))});
  }
  write_all(artifacts, out);
}

void cmd_bd(const std::string& ref_path, const std::string& test_path, std::ostream& out) {
  const std::vector<RdPoint> ref = read_rd_csv(ref_path);
  const std::vector<RdPoint> test = read_rd_csv(test_path);
  out << "BD-PSNR: " << fixed(bd_psnr(ref, test), 4) << " dB\n";
  out << "BD-rate: " << fixed(bd_rate(ref, test), 4) << " %\n";
}

void cmd_classify_map(const Options& o, std::ostream& out) {
  if (o.map.empty()) throw std::invalid_argument("classify-map needs --map");
  const Loaded l = load_source(o);
  const QpPoint qp = o.qp.empty() ? QpPoint::uniform(28) : parse_qp_point(o.qp.front());
  const std::vector<Strategy> which = strategies(o);
  if (which.size() != 1) throw std::invalid_argument("classify-map takes a single strategy");
  const EncodeReport r = encode_sequence(l.sequence, encoder_config(o, qp), which.front());

  std::vector<Artifact> artifacts{{o.map, class_map_csv(r)}};
  if (!o.pgm.empty()) artifacts.push_back({o.pgm, class_map_pgm(r)});
  for (const LayerReport& layer : r.layers) {
    out << "layer " << layer.config.id << " (" << role_name(layer.config.role) << "):";
    for (size_t k = 0; k < layer.class_counts.size(); ++k) {
      out << " " << class_name(static_cast<ClassLabel>(k + 1)) << "=" << layer.class_counts[k];
    }
    out << " KEY=" << layer.key_mbs << "\n";
  }
  write_all(artifacts, out);
}

void cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Loaded l = load_source(o);
  const std::vector<QpPoint> points = qp_points(o);
  const std::vector<EncodeReport> base = encode_points(l.sequence, o, points, Strategy::Baseline);
  const int64_t base_evals = total_evaluations(base);
  const bool with_bd = points.size() >= 4;
  if (!with_bd) err << "warning: BD metrics need at least 4 QP points; " << points.size() << " given\n";

  std::string table = "scale,k1,k2,k3,d1,d2,d3,evaluation_reduction_pct,bd_psnr_db,bd_rate_pct\n";
  for (double scale : o.scales) {
    if (!(scale > 0.0)) throw std::invalid_argument("sweep scales must be positive");
    Options scaled = o;
    Thresholds& t = scaled.thresholds;
    for (double* v : {&t.k1, &t.k2, &t.k3, &t.d1, &t.d2, &t.d3}) *v *= scale;
    const std::vector<EncodeReport> prop = encode_points(l.sequence, scaled, points, Strategy::Proposed);
    const double reduction = (1.0 - static_cast<double>(total_evaluations(prop)) / base_evals) * 100.0;
    table += format_number(scale);
    for (double v : {t.k1, t.k2, t.k3, t.d1, t.d2, t.d3}) table += "," + format_number(v);
    table += "," + fixed(reduction, 4);
    if (with_bd) {
      table += "," + fixed(bd_psnr(rd_points(base), rd_points(prop)), 4);
      table += "," + fixed(bd_rate(rd_points(base), rd_points(prop)), 4);
    } else {
      table += ",,";
    }
    table += "\n";
  }
  out << table;
  if (!o.out.empty()) write_all({{o.out, table}}, out);
}

// ---------------------------------------------------------------------------
// Option wiring

struct Registered {
  CLI::App* app;
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

Registered register_options(CLI::App& parent, const std::string& name, const std::string& help, Options& o,
                            const std::vector<std::string>& wanted) {
  Registered r{parent.add_subcommand(name, help), {}};
  CLI::App* app = r.app;
  auto want = [&](const std::string& key) { return std::find(wanted.begin(), wanted.end(), key) != wanted.end(); };
  auto keep = [&](const std::string& key, CLI::Option* opt) { r.options.emplace_back(key, opt); };

  if (want("input")) keep("input", app->add_option("--input", o.input, "Y4M file, or raw I420 with --size/--fps"));
  if (want("pattern")) keep("pattern", app->add_option("--pattern", o.pattern, "static | pan(dx,dy) | object(v) | noise(a) | mixed"));
  if (want("size")) keep("size", app->add_option("--size", o.size, "qcif | cif | 4cif | WxH"));
  if (want("frames")) keep("frames", app->add_option("--frames", o.frames, "frame count"));
  if (want("seed")) keep("seed", app->add_option("--seed", o.seed, "synthesis seed"));
  if (want("fps")) keep("fps", app->add_option("--fps", o.fps, "frame rate for synthetic or raw input"));
  if (want("gop")) keep("gop", app->add_option("--gop", o.gop, "GOP size, power of two up to 32"));
  if (want("qp")) keep("qp", app->add_option("--qp", o.qp, "QP point, '28' or 'BL/EL1/EL2'; repeatable"));
  if (want("k1")) {
    keep("k1", app->add_option("--k1", o.thresholds.k1, "SOD multiplier, tier 1"));
    keep("k2", app->add_option("--k2", o.thresholds.k2, "SOD multiplier, tier 2"));
    keep("k3", app->add_option("--k3", o.thresholds.k3, "SOD multiplier, tier 3"));
    keep("d1", app->add_option("--d1", o.thresholds.d1, "DCOG multiplier, tier 1"));
    keep("d2", app->add_option("--d2", o.thresholds.d2, "DCOG multiplier, tier 2"));
    keep("d3", app->add_option("--d3", o.thresholds.d3, "DCOG multiplier, tier 3"));
  }
  if (want("strategy")) {
    keep("strategy", app->add_option("--strategy", o.strategy, "proposed | baseline | both")
                         ->check(CLI::IsMember({"proposed", "baseline", "both"})));
  }
  if (want("layers")) {
    keep("layers", app->add_option("--layers", o.layers, "single | scalable")->check(CLI::IsMember({"single", "scalable"})));
  }
  if (want("report")) keep("report", app->add_option("--report", o.report, "JSON report path"));
  if (want("rd-csv")) keep("rd-csv", app->add_option("--rd-csv", o.rd_csv, "RD point CSV path"));
  if (want("map")) keep("map", app->add_option("--map", o.map, "class map CSV path"));
  if (want("pgm")) keep("pgm", app->add_option("--pgm", o.pgm, "class map PGM path"));
  if (want("out")) keep("out", app->add_option("--out", o.out, "output path"));
  if (want("jobs")) keep("jobs", app->add_option("--jobs", o.jobs, "parallel frame encodes"));
  if (want("timing")) keep("timing", app->add_flag("--timing", o.timing, "include wall-clock times in JSON output"));
  if (want("scale")) keep("scale", app->add_option("--scale", o.scales, "threshold scale factor; repeatable"));
  return r;
}

Options resolve(const Registered& reg, const Options& flags, const std::string& config_path) {
  Options resolved = config_path.empty() ? Options{} : options_from_json(config_path);
  for (const auto& [key, opt] : reg.options) {
    if (opt->count() == 0) continue;
    for (const auto& [name, copy] : field_table()) {
      if (name == key) copy(resolved, flags);
    }
  }
  return resolved;
}

}  // namespace

QpPoint parse_qp_point(std::string_view text) {
  std::vector<int> values;
  size_t start = 0;
  while (true) {
    const size_t slash = text.find('/', start);
    const std::string_view token = text.substr(start, slash == std::string_view::npos ? slash : slash - start);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw std::invalid_argument("bad QP '" + std::string(text) + "'");
    }
    values.push_back(v);
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  QpPoint p;
  if (values.size() == 1) p = QpPoint::uniform(values[0]);
  else if (values.size() == 3) p = {values[0], values[1], values[2]};
  else throw std::invalid_argument("QP '" + std::string(text) + "' needs one value or three (BL/EL1/EL2)");
  p.validate();
  return p;
}

std::filesystem::path with_strategy_suffix(const std::filesystem::path& path, Strategy strategy) {
  std::filesystem::path out = path.parent_path() / path.stem();
  out += "." + std::string(strategy_name(strategy));
  out += path.extension();
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fast mode decision for scalable video coding: encoder model and benchmark harness", "svcmd"};
  app.require_subcommand(1);

  Options flags;
  std::string config_path;
  const std::vector<std::string> input_opts = {"input", "pattern", "size", "frames", "seed", "fps"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> all = input_opts;
    all.insert(all.end(), extra.begin(), extra.end());
    return all;
  };
  const std::vector<std::string> coding = {"gop", "qp", "k1", "layers", "jobs"};
  auto concat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };

  Registered synth = register_options(app, "synth", "Write a synthetic Y4M sequence", flags, with({"out"}));
  Registered encode = register_options(app, "encode", "Encode and write reports", flags,
                                       with(concat(coding, {"strategy", "report", "rd-csv", "map", "pgm", "timing"})));
  Registered compare = register_options(app, "compare", "Run both strategies over a QP list", flags,
                                        with(concat(coding, {"report", "rd-csv", "timing"})));
  Registered classify = register_options(app, "classify-map", "Dump per-MB classes and modes", flags,
                                         with(concat(coding, {"strategy", "map", "pgm"})));
  Registered sweep = register_options(app, "sweep", "Scale the thresholds and measure the trade-off", flags,
                                      with(concat(coding, {"scale", "out"})));
  for (Registered* r : {&synth, &encode, &compare, &classify, &sweep}) {
    r->app->add_option("--config", config_path, "JSON file with default option values");
  }

  CLI::App* bd = app.add_subcommand("bd", "BD-PSNR and BD-rate between two RD CSV files");
  std::string ref_csv;
  std::string test_csv;
  bd->add_option("ref", ref_csv, "reference curve CSV")->required();
  bd->add_option("test", test_csv, "test curve CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (bd->parsed()) {
      cmd_bd(ref_csv, test_csv, out);
    } else if (synth.app->parsed()) {
      cmd_synth(resolve(synth, flags, config_path), out);
    } else if (encode.app->parsed()) {
      cmd_encode(resolve(encode, flags, config_path), out);
    } else if (compare.app->parsed()) {
      cmd_compare(resolve(compare, flags, config_path), out, err);
    } else if (classify.app->parsed()) {
      cmd_classify_map(resolve(classify, flags, config_path), out);
    } else if (sweep.app->parsed()) {
      cmd_sweep(resolve(sweep, flags, config_path), out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace svcmd
