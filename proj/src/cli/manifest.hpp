#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "marlow/degrade.hpp"
#include "marlow/quality.hpp"
#include "marlow/solver.hpp"

namespace marlow::cli {

using json = nlohmann::json;

json to_json(const SolverConfig& cfg);
SolverConfig config_from_json(const json& j);

json to_json(const DegradeSpec& spec);
DegradeSpec degrade_spec_from_json(const json& j);

json to_json(const IterationTrace& trace);

/// PSNR with two decimals ("inf" for identical images), as shown in reports.
std::string format_psnr(double psnr_db);
/// SSIM with four decimals.
std::string format_ssim(double ssim);
/// {"psnr_db": 34.70, "ssim": 0.9070}; an infinite PSNR is written as the string "inf".
std::string quality_json(const QualityReport& q);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace marlow::cli
