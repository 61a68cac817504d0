#include "coevo/config.hpp"

#include <charconv>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <sstream>

namespace coevo {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string canonical_key(std::string_view key) {
    std::string k(key);
    for (char& c : k) {
        if (c == '-') c = '_';
    }
    return k;
}

double parse_real(const std::string& key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x)) {
        throw ConfigError(key, "expected a real number, got '" + s + "'");
    }
    return x;
}

std::uint64_t parse_uint(const std::string& key, std::string_view v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return x;
}

// shortest form that parses back to the same double
std::string format_real(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

void apply_setting(EngineConfig& cfg, std::string_view raw_key, std::string_view raw_value) {
    const std::string key = canonical_key(trim(raw_key));
    const std::string_view value = trim(raw_value);
    if (key == "tau") {
        cfg.tau = parse_real(key, value);
    } else if (key == "lambda") {
        cfg.lambda = parse_real(key, value);
    } else if (key == "beta") {
        cfg.beta = parse_real(key, value);
    } else if (key == "queue_len") {
        cfg.queue_len = parse_uint(key, value);
    } else if (key == "top_n") {
        cfg.top_n = parse_uint(key, value);
    } else if (key == "gamma") {
        cfg.gamma = parse_real(key, value);
    } else if (key == "window") {
        cfg.window = parse_uint(key, value);
    } else if (key == "bins") {
        cfg.bins = parse_uint(key, value);
    } else if (key == "ablation") {
        const auto a = parse_ablation(value);
        if (!a) throw ConfigError(key, "expected full|textual-only|visual-only|static");
        cfg.ablation = *a;
    } else if (key == "margin_form" || key == "lower_margin_form") {
        if (value == "alg1") {
            cfg.margin_form = MarginForm::Alg1;
        } else if (value == "maintext") {
            cfg.margin_form = MarginForm::MainText;
        } else {
            throw ConfigError(key, "expected alg1|maintext");
        }
    } else if (key == "seed") {
        cfg.seed = parse_uint(key, value);
    } else if (key == "init_negatives") {
        cfg.init_negatives = parse_uint(key, value);
    } else if (key == "init_mode") {
        if (value == "farthest") {
            cfg.init_mode = NegativeInit::Farthest;
        } else if (value == "given-list" || value == "given_list") {
            cfg.init_mode = NegativeInit::GivenList;
        } else {
            throw ConfigError(key, "expected farthest|given-list");
        }
    } else if (key == "max_negatives") {
        if (value == "none") {
            cfg.max_negatives.reset();
        } else {
            cfg.max_negatives = parse_uint(key, value);
        }
    } else {
        throw ConfigError(key, "unknown key");
    }
}

void apply_config_text(EngineConfig& cfg, std::string_view text) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_config_file(EngineConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str());
}

std::string format_config(const EngineConfig& cfg) {
    std::ostringstream os;
    os << "tau = " << format_real(cfg.tau) << '\n'
       << "lambda = " << format_real(cfg.lambda) << '\n'
       << "beta = " << format_real(cfg.beta) << '\n'
       << "queue_len = " << cfg.queue_len << '\n'
       << "top_n = " << cfg.top_n << '\n'
       << "gamma = " << format_real(cfg.gamma) << '\n'
       << "window = " << cfg.window << '\n'
       << "bins = " << cfg.bins << '\n'
       << "ablation = " << to_string(cfg.ablation) << '\n'
       << "margin_form = " << (cfg.margin_form == MarginForm::Alg1 ? "alg1" : "maintext") << '\n'
       << "seed = " << cfg.seed << '\n'
       << "init_negatives = " << cfg.init_negatives << '\n'
       << "init_mode = " << (cfg.init_mode == NegativeInit::Farthest ? "farthest" : "given-list") << '\n'
       << "max_negatives = " << (cfg.max_negatives ? std::to_string(*cfg.max_negatives) : "none") << '\n';
    return os.str();
}

}  // namespace coevo
