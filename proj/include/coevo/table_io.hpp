#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coevo/numeric.hpp"

namespace coevo {

// EmbeddingTable layout, all integers little-endian:
//   header  "CEVT" | u32 version (=1) | u32 dim | u64 count        (20 bytes)
//   record  u8 flag | u32 class_index | u16 label_len | label bytes (UTF-8)
//           | dim x f32 (IEEE-754)
// flag: 0 = OOD, 1 = ID, 2 = unlabeled / corpus. class_index is
// 0xFFFFFFFF when absent and must be present when flag = 1.

inline constexpr char kTableMagic[4] = {'C', 'E', 'V', 'T'};
inline constexpr std::uint32_t kTableVersion = 1;
inline constexpr std::uint32_t kNoClass = 0xFFFFFFFFu;
inline constexpr std::size_t kTableHeaderSize = 20;

/// Loader tolerance on |norm - 1|: silent up to kNormWarn, renormalize with
/// a warning up to kNormReject, reject beyond.
inline constexpr double kNormWarn = 1e-3;
inline constexpr double kNormReject = 1e-1;

enum class RecordFlag : std::uint8_t { OOD = 0, ID = 1, Unlabeled = 2 };

struct TableRecord {
    RecordFlag flag = RecordFlag::Unlabeled;
    std::uint32_t class_index = kNoClass;
    std::string label;
    std::vector<float> vector;

    bool has_class() const noexcept { return class_index != kNoClass; }
    Embedding embedding() const { return Embedding::from_floats(vector); }
    bool operator==(const TableRecord&) const = default;
};

struct Table {
    std::uint32_t dim = 0;
    std::vector<TableRecord> records;

    bool operator==(const Table&) const = default;
};

/// Malformed or unreadable table. offset is the byte position where the
/// problem was detected.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& path, std::uint64_t offset, const std::string& what);
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool valid_utf8(std::string_view s);

void write_table(const std::filesystem::path& path, const Table& table);
std::vector<std::uint8_t> encode_table(const Table& table);

/// Streaming reader. Validates the header on open and each record as it is
/// read.
class TableReader {
public:
    explicit TableReader(const std::filesystem::path& path, bool load_labels = true);

    std::uint32_t dim() const noexcept { return dim_; }
    std::uint64_t count() const noexcept { return count_; }
    std::optional<TableRecord> next();
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    void read_exact(void* dst, std::size_t n, const char* what);

    std::string path_;
    std::ifstream in_;
    bool load_labels_;
    std::uint32_t dim_ = 0;
    std::uint64_t count_ = 0;
    std::uint64_t read_ = 0;
    std::uint64_t offset_ = 0;
    std::vector<std::string> warnings_;
};

struct LoadedTable {
    Table table;
    std::vector<std::string> warnings;
};

LoadedTable read_table(const std::filesystem::path& path, bool load_labels = true);

}  // namespace coevo
