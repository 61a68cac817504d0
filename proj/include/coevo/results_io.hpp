#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "coevo/engine.hpp"

namespace coevo {

/// Results file: a '#'-prefixed header line, then one tab-separated line
/// per record with columns
///   sample_id s_t_pre s_v_pre s_pre delta decision s_t_post s_v_post s_post
///   predicted_class predicted_negative
/// Reals use 9 significant digits; absent indices are written as '-'.
inline constexpr std::size_t kResultColumns = 11;

std::string results_header();
std::string format_result_line(const ScoreRecord& r);

void write_results(std::ostream& out, std::span<const ScoreRecord> records);
void write_results(const std::filesystem::path& path, std::span<const ScoreRecord> records);

/// Parses a results file back into records; malformed lines raise
/// FormatError with the line's byte offset. The negatives field is not
/// stored in the file and comes back as 0.
std::vector<ScoreRecord> read_results(const std::filesystem::path& path);
std::vector<ScoreRecord> parse_results(std::istream& in, const std::string& source);

}  // namespace coevo
