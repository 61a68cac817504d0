#include "coevo/results_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coevo/table_io.hpp"

namespace coevo {

namespace {

std::string real9(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string index_or_dash(const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : "-";
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

}  // namespace

std::string results_header() {
    return "#sample_id\ts_t_pre\ts_v_pre\ts_pre\tdelta\tdecision\ts_t_post\ts_v_post\ts_post\t"
           "predicted_class\tpredicted_negative";
}

std::string format_result_line(const ScoreRecord& r) {
    std::string s = std::to_string(r.sample_id);
    for (double x : {r.s_t_pre, r.s_v_pre, r.s_pre, r.delta}) s += '\t' + real9(x);
    s += '\t';
    s += to_string(r.decision);
    for (double x : {r.s_t_post, r.s_v_post, r.s_post}) s += '\t' + real9(x);
    s += '\t' + index_or_dash(r.predicted_class);
    s += '\t' + index_or_dash(r.predicted_negative);
    return s;
}

void write_results(std::ostream& out, std::span<const ScoreRecord> records) {
    out << results_header() << '\n';
    for (const auto& r : records) out << format_result_line(r) << '\n';
}

void write_results(const std::filesystem::path& path, std::span<const ScoreRecord> records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    write_results(out, records);
    out.close();
    if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<ScoreRecord> parse_results(std::istream& in, const std::string& source) {
    std::vector<ScoreRecord> out;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::uint64_t line_start = offset;
        offset += line.size() + 1;
        if (line.empty() || line.front() == '#') continue;
        const auto fail = [&](const std::string& why) {
            throw FormatError(source, line_start, "line " + std::to_string(line_no) + ": " + why);
        };
        const auto cols = split_tabs(line);
        if (cols.size() != kResultColumns) fail("expected " + std::to_string(kResultColumns) + " columns");

        auto real = [&](const std::string& s) {
            char* end = nullptr;
            const double x = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0' || !std::isfinite(x)) fail("bad number '" + s + "'");
            return x;
        };
        auto index = [&](const std::string& s) -> std::optional<std::size_t> {
            if (s == "-") return std::nullopt;
            std::uint64_t x = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) fail("bad index '" + s + "'");
            return static_cast<std::size_t>(x);
        };

        ScoreRecord r;
        const auto id = index(cols[0]);
        if (!id) fail("missing sample_id");
        r.sample_id = *id;
        r.s_t_pre = real(cols[1]);
        r.s_v_pre = real(cols[2]);
        r.s_pre = real(cols[3]);
        r.delta = real(cols[4]);
        if (cols[5] == "id") {
            r.decision = Decision::PredID;
        } else if (cols[5] == "ood") {
            r.decision = Decision::PredOOD;
        } else if (cols[5] == "ambiguous") {
            r.decision = Decision::Ambiguous;
        } else {
            fail("bad decision '" + cols[5] + "'");
        }
        r.s_t_post = real(cols[6]);
        r.s_v_post = real(cols[7]);
        r.s_post = real(cols[8]);
        r.predicted_class = index(cols[9]);
        r.predicted_negative = index(cols[10]);
        out.push_back(r);
    }
    return out;
}

std::vector<ScoreRecord> read_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    return parse_results(in, path.string());
}

}  // namespace coevo
