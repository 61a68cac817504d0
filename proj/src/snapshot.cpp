#include "coevo/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace coevo {

namespace {

std::vector<float> to_floats(std::span<const double> v) {
    return {v.begin(), v.end()};
}

std::string entropy_text(double h) {
    if (h == kSeedEntropy) return "seed";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", h);
    return buf;
}

// Splits into at most max_fields pieces; the last piece keeps any '|'.
std::vector<std::string> split_bar(const std::string& s, std::size_t max_fields) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (out.size() + 1 < max_fields) {
        const auto bar = s.find('|', start);
        if (bar == std::string::npos) break;
        out.push_back(s.substr(start, bar - start));
        start = bar + 1;
    }
    out.push_back(s.substr(start));
    return out;
}

}  // namespace

Table snapshot_table(const Engine& engine) {
    Table t;
    t.dim = static_cast<std::uint32_t>(engine.dim());
    const auto add = [&](RecordFlag flag, std::size_t idx, std::string label, const Embedding& e) {
        t.records.push_back({flag, static_cast<std::uint32_t>(idx), std::move(label), to_floats(e.values())});
    };
    const auto& tp = engine.positive();
    for (std::size_t k = 0; k < tp.size(); ++k) {
        add(RecordFlag::ID, k, "tp|" + std::to_string(k) + "|" + tp[k].label, tp[k].embedding);
    }
    const auto& tn = engine.negative();
    const auto& origin = engine.negative_origin();
    for (std::size_t m = 0; m < tn.size(); ++m) {
        const std::string from = origin[m] ? std::to_string(*origin[m]) : "init";
        add(RecordFlag::Unlabeled, m, "tn|" + std::to_string(m) + "|" + from + "|" + tn[m].label,
            tn[m].embedding);
    }
    const auto slots = [&](const char* kind, RecordFlag flag, const std::vector<VisualQueue>& queues) {
        for (std::size_t q = 0; q < queues.size(); ++q) {
            const auto& ss = queues[q].slots();
            for (std::size_t l = 0; l < ss.size(); ++l) {
                add(flag, q,
                    std::string(kind) + "|" + std::to_string(q) + "|" + std::to_string(l) + "|" +
                        entropy_text(ss[l].entropy) + "|" + std::to_string(ss[l].seq),
                    ss[l].embedding);
            }
        }
    };
    slots("vp", RecordFlag::ID, engine.cache().positive);
    slots("vn", RecordFlag::OOD, engine.cache().negative);
    return t;
}

void write_snapshot(const std::filesystem::path& path, const Engine& engine) {
    write_table(path, snapshot_table(engine));
}

CacheSnapshot parse_snapshot(const Table& table, const std::string& source) {
    CacheSnapshot snap;
    for (std::size_t r = 0; r < table.records.size(); ++r) {
        const auto& rec = table.records[r];
        const auto fail = [&](const std::string& why) -> void {
            throw FormatError(source, 0, "snapshot record " + std::to_string(r) + ": " + why);
        };
        const auto kind = rec.label.substr(0, 2);
        const std::size_t idx = rec.class_index;
        if (kind == "tp") {
            const auto f = split_bar(rec.label, 3);
            if (f.size() != 3 || idx != snap.positive_labels.size()) fail("bad tp descriptor");
            snap.positive_labels.push_back(f[2]);
        } else if (kind == "tn") {
            const auto f = split_bar(rec.label, 4);
            if (f.size() != 4 || idx != snap.negative_labels.size()) fail("bad tn descriptor");
            snap.negative_labels.push_back(f[3]);
            if (f[2] == "init") {
                snap.negative_origin.push_back(std::nullopt);
            } else {
                snap.negative_origin.push_back(std::strtoull(f[2].c_str(), nullptr, 10));
            }
        } else if (kind == "vp" || kind == "vn") {
            const auto f = split_bar(rec.label, 5);
            if (f.size() != 5) fail("bad slot descriptor");
            auto& queues = kind == "vp" ? snap.positive_slots : snap.negative_slots;
            if (idx > queues.size()) fail("slot queue index out of order");
            if (idx == queues.size()) queues.emplace_back();
            const double h = f[3] == "seed" ? kSeedEntropy : std::strtod(f[3].c_str(), nullptr);
            queues[idx].push_back({h, std::strtoull(f[4].c_str(), nullptr, 10)});
        } else {
            fail("unknown descriptor '" + rec.label + "'");
        }
    }
    return snap;
}

}  // namespace coevo
