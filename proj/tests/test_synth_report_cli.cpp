#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "svcmd/block_metrics.hpp"
#include "svcmd/cli.hpp"
#include "svcmd/report.hpp"
#include "svcmd/synth.hpp"
#include "svcmd/video_io.hpp"

using namespace svcmd;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "svcmd");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("svcmd_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

int64_t luma_sum(const Frame& f) { return std::accumulate(f.y.begin(), f.y.end(), int64_t{0}); }

}  // namespace

// ---------------------------------------------------------------------------
// synth

TEST(PatternSpec, ParseAndPrint) {
  EXPECT_EQ(PatternSpec::parse("static").kind, PatternKind::Static);
  const PatternSpec pan = PatternSpec::parse("pan(2,1)");
  EXPECT_EQ(pan.kind, PatternKind::Pan);
  EXPECT_EQ(pan.dx, 2);
  EXPECT_EQ(pan.dy, 1);
  EXPECT_EQ(PatternSpec::parse("pan:2,1"), pan);
  EXPECT_EQ(PatternSpec::parse("pan(-3, 4)").dx, -3);
  EXPECT_EQ(PatternSpec::parse("object(3)").speed, 3);
  EXPECT_EQ(PatternSpec::parse("noise(4)").amplitude, 4);
  for (const char* s : {"static", "pan(2,1)", "object(3)", "noise(4)", "mixed"}) {
    EXPECT_EQ(PatternSpec::parse(s).to_string(), s);
  }
}

TEST(PatternSpec, RejectsBadSpecs) {
  for (const char* s : {"pan(1)", "pan(1,2", "noise(0)", "noise(17)", "object(x)", "wobble", "static(1)", "pan(1,)",
                        "pan(100,0)"}) {
    EXPECT_THROW(PatternSpec::parse(s), std::invalid_argument) << s;
  }
}

TEST(FrameSizeParse, NamesAndExplicit) {
  EXPECT_EQ(parse_frame_size("qcif").width, 176);
  EXPECT_EQ(parse_frame_size("cif").height, 288);
  EXPECT_EQ(parse_frame_size("4cif").width, 704);
  EXPECT_EQ(parse_frame_size("64x48").height, 48);
  EXPECT_THROW(parse_frame_size("65x48"), std::invalid_argument);
  EXPECT_THROW(parse_frame_size("big"), std::invalid_argument);
}

TEST(Synthesize, StaticFramesAreIdentical) {
  const Sequence s = synthesize(PatternSpec::parse("static"), parse_frame_size("cif"), 16, 1);
  ASSERT_EQ(s.frames.size(), 16u);
  for (const Frame& f : s.frames) {
    EXPECT_EQ(f.y, s.frames[0].y);
    for (uint8_t c : f.u) ASSERT_EQ(c, 128);
  }
}

TEST(Synthesize, PanIsGlobalTranslation) {
  const Sequence s = synthesize(PatternSpec::parse("pan(1,0)"), {64, 48}, 5, 3);
  for (int t = 0; t < 5; ++t) {
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) {
        ASSERT_EQ(s.frames[t].luma_at(x, y), s.frames[0].luma_at((x + t) % 64, y));
      }
    }
  }
}

TEST(Synthesize, NoiseKeepsTheFrameMean) {
  const Sequence st = synthesize(PatternSpec::parse("static"), parse_frame_size("cif"), 1, 5);
  const Sequence noisy = synthesize(PatternSpec::parse("noise(1)"), parse_frame_size("cif"), 4, 5);
  for (const Frame& f : noisy.frames) EXPECT_EQ(luma_sum(f), luma_sum(st.frames[0]));
  EXPECT_NE(noisy.frames[0].y, noisy.frames[1].y);
  EXPECT_EQ(noisy.frames[0].y, noisy.frames[2].y);
}

TEST(Synthesize, ObjectMovesOverStaticBackground) {
  const Sequence s = synthesize(PatternSpec::parse("object(3)"), parse_frame_size("cif"), 3, 2);
  int changed = 0;
  for (size_t i = 0; i < s.frames[0].y.size(); ++i) changed += s.frames[0].y[i] != s.frames[1].y[i];
  EXPECT_GT(changed, 0);
  EXPECT_LT(changed, 2 * 64 * 64);
  EXPECT_EQ(s.frames[0].y[0], s.frames[1].y[0]);
}

TEST(Synthesize, DeterministicAndSeeded) {
  const Sequence a = synthesize(PatternSpec::parse("mixed"), parse_frame_size("qcif"), 3, 9);
  const Sequence b = synthesize(PatternSpec::parse("mixed"), parse_frame_size("qcif"), 3, 9);
  const Sequence c = synthesize(PatternSpec::parse("mixed"), parse_frame_size("qcif"), 3, 10);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.frames[0].y, c.frames[0].y);
}

TEST(Synthesize, PanSodFollowsTheRamp) {
  const Sequence s = synthesize(PatternSpec::parse("pan(2,1)"), parse_frame_size("cif"), 3, 1);
  for (int t = 1; t < 3; ++t) {
    for (int my = 0; my + 1 < s.frames[t].mb_rows(); ++my) {
      for (int mx = 0; mx + 1 < s.frames[t].mb_cols(); ++mx) {
        const int32_t v = sod(MacroblockView(s.frames[t].luma(), mx, my), MacroblockView(s.frames[t - 1].luma(), mx, my));
        EXPECT_NEAR(v, 128, 16) << mx << "," << my;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// report

TEST(Report, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1451.0), "1451");
  for (double v : {39.81512345678901, 1e-7, 123456.789, 1.0 / 3.0}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Report, RdCsvRoundTrip) {
  const std::vector<RdSample> samples = {{"24", 1451.123456789, 39.8151}, {"24/28/32", 0.1 + 0.2, 1.0 / 3.0}};
  const std::string text = rd_csv(samples);
  EXPECT_EQ(text.substr(0, text.find('\n')), "qp,rate_kbps,psnr_db");
  const std::vector<RdPoint> back = parse_rd_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].rate, 1451.123456789);
  EXPECT_EQ(back[1].rate, 0.1 + 0.2);
  EXPECT_EQ(back[1].psnr, 1.0 / 3.0);
}

TEST(Report, RdCsvErrors) {
  EXPECT_THROW(parse_rd_csv(""), FormatError);
  EXPECT_THROW(parse_rd_csv("24,1,2\n"), FormatError);
  EXPECT_THROW(parse_rd_csv("qp,rate_kbps,psnr_db\n24,1\n"), FormatError);
  EXPECT_THROW(parse_rd_csv("qp,rate_kbps,psnr_db\n24,abc,2\n"), FormatError);
  EXPECT_EQ(parse_rd_csv("qp,rate_kbps,psnr_db\r\n\n24, 10 ,30\r\n").size(), 1u);
}

class ReportFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const Sequence src = synthesize(PatternSpec::parse("mixed"), {64, 64}, 9, 3);
    EncoderConfig c;
    c.gop_size = 4;
    c.qp = {26, 28, 30};
    report_ = new EncodeReport(encode_sequence(src, c, Strategy::Proposed));
  }
  static void TearDownTestSuite() { delete report_; }
  static EncodeReport* report_;
};

EncodeReport* ReportFixture::report_ = nullptr;

TEST_F(ReportFixture, JsonShapeAndTiming) {
  const SourceInfo info{"test", 64, 64, 9, 30.0};
  const auto j = encode_run_json(info, {*report_});
  EXPECT_EQ(j["schema"], std::string(kEncodeSchema));
  const auto& run = j["runs"][0];
  EXPECT_EQ(run["strategy"], "proposed");
  EXPECT_EQ(run["qp"]["label"], "26/28/30");
  EXPECT_FALSE(run.contains("total_wall_ms"));
  EXPECT_FALSE(run["layers"][0].contains("wall_ms"));
  EXPECT_EQ(run["layers"].size(), 2u);
  EXPECT_EQ(run["layers"][1]["frames"].size(), 9u);
  const auto timed = encode_report_json(*report_, {true});
  EXPECT_TRUE(timed.contains("total_wall_ms"));
  EXPECT_TRUE(timed["layers"][0].contains("wall_ms"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : run.items()) keys.push_back(k);
  EXPECT_EQ(keys.front(), "strategy");
  EXPECT_EQ(keys.back(), "layers");
}

TEST_F(ReportFixture, ClassMapMatchesCounts) {
  const std::string csv = class_map_csv(*report_);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "layer,frame,mb_x,mb_y,sod,dcog,class,mode");
  std::map<std::pair<int, std::string>, int64_t> counts;
  size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> f;
    std::istringstream row(line);
    for (std::string x; std::getline(row, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 8u);
    counts[std::make_pair(std::stoi(f[0]), f[6])]++;
  }
  size_t mbs = 0;
  for (const LayerReport& l : report_->layers) {
    mbs += static_cast<size_t>(l.mb_total);
    EXPECT_EQ(counts[std::make_pair(l.config.id, std::string("KEY"))], l.key_mbs);
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(counts[std::make_pair(l.config.id, "C" + std::to_string(k + 1))], l.class_counts[k]);
    }
  }
  EXPECT_EQ(rows, mbs);
}

TEST_F(ReportFixture, PgmHeaderAndSize) {
  const std::string pgm = class_map_pgm(*report_);
  const std::string header = "P5\n4 4\n255\n";
  ASSERT_EQ(pgm.substr(0, header.size()), header);
  EXPECT_EQ(pgm.size(), header.size() + 16);
  for (size_t i = header.size(); i < pgm.size(); ++i) {
    const auto v = static_cast<uint8_t>(pgm[i]);
    EXPECT_TRUE(v == 0 || v == 64 || v == 128 || v == 192 || v == 255);
  }
}

TEST(Report, AtomicWrite) {
  TempDir dir;
  const fs::path p = dir / "out.txt";
  write_file_atomic(p, "hello");
  EXPECT_EQ(slurp(p), "hello");
  write_file_atomic(p, "bye");
  EXPECT_EQ(slurp(p), "bye");
  EXPECT_FALSE(fs::exists(dir / "out.txt.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.txt", "a"), std::runtime_error);
}

// ---------------------------------------------------------------------------
// cli helpers

TEST(CliHelpers, QpPoints) {
  EXPECT_EQ(parse_qp_point("28"), QpPoint::uniform(28));
  EXPECT_EQ(parse_qp_point("24/28/32"), (QpPoint{24, 28, 32}));
  for (const char* bad : {"", "24/28", "a", "24//32", "60", "24/28/32/36"}) {
    EXPECT_THROW(parse_qp_point(bad), std::invalid_argument) << bad;
  }
}

TEST(CliHelpers, StrategySuffix) {
  EXPECT_EQ(with_strategy_suffix("out/report.json", Strategy::Baseline), fs::path("out/report.baseline.json"));
  EXPECT_EQ(with_strategy_suffix("rd.csv", Strategy::Proposed), fs::path("rd.proposed.csv"));
}

// ---------------------------------------------------------------------------
// cli commands

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"encode", "--strategy", "fastest"}).code, 2);
  const CliResult bad_qp = cli({"encode", "--size", "64x64", "--frames", "3", "--qp", "99"});
  EXPECT_EQ(bad_qp.code, 2);
  EXPECT_NE(bad_qp.err.find("qp"), std::string::npos);
}

TEST(Cli, SynthWritesY4m) {
  TempDir dir;
  const CliResult r = cli({"synth", "--pattern", "pan(1,0)", "--size", "64x32", "--frames", "4", "--out",
                           (dir / "p.y4m").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Sequence s = read_y4m_file(dir / "p.y4m");
  EXPECT_EQ(s, synthesize(PatternSpec::parse("pan(1,0)"), {64, 32}, 4, 1));
}

TEST(Cli, EncodeWritesAllArtifacts) {
  TempDir dir;
  const CliResult r = cli({"encode", "--pattern", "mixed", "--size", "64x64", "--frames", "5", "--gop", "4", "--qp", "28",
                           "--qp", "32", "--strategy", "both", "--report", (dir / "r.json").string(), "--rd-csv",
                           (dir / "rd.csv").string(), "--map", (dir / "m.csv").string(), "--pgm",
                           (dir / "m.pgm").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"r.proposed.json", "r.baseline.json", "rd.proposed.csv", "rd.baseline.csv", "m.proposed.csv",
                           "m.baseline.pgm"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  const auto j = nlohmann::json::parse(slurp(dir / "r.baseline.json"));
  EXPECT_EQ(j["runs"].size(), 2u);
  EXPECT_EQ(j["runs"][0]["strategy"], "baseline");
  EXPECT_EQ(read_rd_csv(dir / "rd.proposed.csv").size(), 2u);
  const auto prop = nlohmann::json::parse(slurp(dir / "r.proposed.json"));
  EXPECT_LT(prop["runs"][0]["total_evaluations"].get<int64_t>(), j["runs"][0]["total_evaluations"].get<int64_t>());
}

TEST(Cli, MalformedY4mFailsWithoutReport) {
  TempDir dir;
  {
    std::ofstream bad(dir / "bad.y4m", std::ios::binary);
    bad << "YUV4MPEG2 W64 H64 F30:1 C422\nFRAME\n";
  }
  const CliResult r = cli({"encode", "--input", (dir / "bad.y4m").string(), "--report", (dir / "r.json").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(dir / "r.json"));
  EXPECT_FALSE(fs::exists(dir / "r.json.tmp"));
}

TEST(Cli, ConfigPrecedence) {
  TempDir dir;
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"gop": 4, "qp": ["30"], "size": "64x64", "frames": 5, "layers": "single"})";
  }
  auto gop_of = [&](const fs::path& report) {
    return nlohmann::json::parse(slurp(report))["runs"][0]["gop_size"].get<int>();
  };
  const std::string cfg = (dir / "cfg.json").string();
  ASSERT_EQ(cli({"encode", "--config", cfg, "--report", (dir / "a.json").string()}).code, 0);
  EXPECT_EQ(gop_of(dir / "a.json"), 4);
  ASSERT_EQ(cli({"encode", "--config", cfg, "--gop", "2", "--report", (dir / "b.json").string()}).code, 0);
  EXPECT_EQ(gop_of(dir / "b.json"), 2);
  ASSERT_EQ(cli({"encode", "--size", "64x64", "--frames", "3", "--qp", "30", "--report", (dir / "c.json").string()}).code, 0);
  EXPECT_EQ(gop_of(dir / "c.json"), 16);

  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({"gopp": 4})";
  }
  EXPECT_NE(cli({"encode", "--config", (dir / "bad.json").string()}).code, 0);
}

TEST(Cli, CompareWithThreeQpsWarnsAndSkipsBd) {
  TempDir dir;
  const CliResult r = cli({"compare", "--pattern", "static", "--size", "64x64", "--frames", "5", "--gop", "4", "--layers",
                           "single", "--qp", "26", "--qp", "30", "--qp", "34", "--report", (dir / "c.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(r.out.find("BD-PSNR"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "c.json"));
  EXPECT_TRUE(j["bd_psnr_db"].is_null());
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_GE(j["evaluation_reduction_pct"].get<double>(), 90.0);
}

TEST(Cli, BdOfACurveAgainstItselfIsZero) {
  TempDir dir;
  write_file_atomic(dir / "a.csv", rd_csv({{"24", 100, 30}, {"28", 180, 33}, {"32", 320, 36}, {"36", 600, 39}}));
  const std::string a = (dir / "a.csv").string();
  const CliResult r = cli({"bd", a, a});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "BD-PSNR: 0.0000 dB\nBD-rate: 0.0000 %\n");
  EXPECT_NE(cli({"bd", a, (dir / "missing.csv").string()}).code, 0);
}

TEST(Cli, ClassifyMapOnStaticClipIsAllC1) {
  TempDir dir;
  const CliResult r = cli({"classify-map", "--pattern", "static", "--size", "64x64", "--frames", "5", "--gop", "4",
                           "--layers", "single", "--map", (dir / "m.csv").string(), "--pgm", (dir / "m.pgm").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "m.csv");
  EXPECT_EQ(csv.find(",C2,"), std::string::npos);
  EXPECT_EQ(csv.find(",C3,"), std::string::npos);
  EXPECT_EQ(csv.find(",C4,"), std::string::npos);
  EXPECT_NE(csv.find(",C1,SKIP"), std::string::npos);
  EXPECT_EQ(cli({"classify-map", "--size", "64x64", "--frames", "3"}).code, 2);
}
