#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coevo/engine.hpp"
#include "coevo/table_io.hpp"

namespace coevo {

// Cache snapshots reuse the EmbeddingTable format. Each record's label is a
// '|'-separated descriptor:
//   tp|<k>|<class label>                    flag 1, class_index k
//   tn|<m>|<origin sample id or init>|<label>  flag 2, class_index m
//   vp|<k>|<slot>|<entropy or seed>|<seq>     flag 1, class_index k
//   vn|<m>|<slot>|<entropy or seed>|<seq>     flag 0, class_index m

struct SlotInfo {
    double entropy;  // kSeedEntropy for text seeds
    std::uint64_t seq;
};

struct CacheSnapshot {
    std::vector<std::string> positive_labels;
    std::vector<std::string> negative_labels;
    std::vector<std::optional<std::uint64_t>> negative_origin;
    std::vector<std::vector<SlotInfo>> positive_slots;
    std::vector<std::vector<SlotInfo>> negative_slots;
};

Table snapshot_table(const Engine& engine);
void write_snapshot(const std::filesystem::path& path, const Engine& engine);

/// Decodes a snapshot table; throws FormatError on a malformed descriptor.
CacheSnapshot parse_snapshot(const Table& table, const std::string& source);

}  // namespace coevo
