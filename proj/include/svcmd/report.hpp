#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "svcmd/bd_metrics.hpp"
#include "svcmd/scalable_encoder.hpp"

namespace svcmd {

inline constexpr std::string_view kEncodeSchema = "svcmd.encode/1";
inline constexpr std::string_view kCompareSchema = "svcmd.compare/1";

struct ReportOptions {
  bool include_timing = false;  // wall-clock fields make reports non-reproducible
};

/// What was encoded, for report headers.
struct SourceInfo {
  std::string description;
  int width = 0;
  int height = 0;
  int frames = 0;
  double frame_rate = 0.0;
};

nlohmann::ordered_json source_json(const SourceInfo& source);

// One encode at one operating point. Stable key order; per-MB records are not
// included (see class_map_csv).
nlohmann::ordered_json encode_report_json(const EncodeReport& report, const ReportOptions& opts = {});

/// {"schema", "source", "runs": [encode_report_json...]}
nlohmann::ordered_json encode_run_json(const SourceInfo& source, const std::vector<EncodeReport>& runs,
                                       const ReportOptions& opts = {});

/// `qp,rate_kbps,psnr_db` with a header row; numbers in shortest round-trip form.
std::string rd_csv(const std::vector<RdSample>& samples);
/// Inverse of rd_csv. Throws FormatError on malformed input.
std::vector<RdPoint> parse_rd_csv(std::string_view text);
std::vector<RdPoint> read_rd_csv(const std::filesystem::path& path);

/// One row per MB of every layer: layer,frame,mb_x,mb_y,sod,dcog,class,mode. Key frames carry class KEY.
std::string class_map_csv(const EncodeReport& report);

// Binary P5 image of the top layer's MB grid. Each pixel is the highest class
// the MB received on any B frame (C1 64, C2 128, C3 192, C4 255; 0 if never classified).
std::string class_map_pgm(const EncodeReport& report);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace svcmd
