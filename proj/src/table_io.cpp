#include "coevo/table_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <iterator>
#include <limits>

namespace coevo {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

}  // namespace

FormatError::FormatError(const std::string& path, std::uint64_t offset, const std::string& what)
    : std::runtime_error(path + ": byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += extra + 1;
    }
    return true;
}

std::vector<std::uint8_t> encode_table(const Table& table) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), std::begin(kTableMagic), std::end(kTableMagic));
    put_le<std::uint32_t>(out, kTableVersion);
    put_le<std::uint32_t>(out, table.dim);
    put_le<std::uint64_t>(out, table.records.size());
    for (std::size_t r = 0; r < table.records.size(); ++r) {
        const auto& rec = table.records[r];
        const std::string where = "record " + std::to_string(r) + ": ";
        if (rec.vector.size() != table.dim) throw IoError(where + "vector length differs from table dim");
        if (static_cast<std::uint8_t>(rec.flag) > 2) throw IoError(where + "invalid flag");
        if (rec.flag == RecordFlag::ID && !rec.has_class()) throw IoError(where + "ID record without class index");
        if (rec.label.size() > 0xFFFF) throw IoError(where + "label longer than 65535 bytes");
        if (!valid_utf8(rec.label)) throw IoError(where + "label is not valid UTF-8");
        out.push_back(static_cast<std::uint8_t>(rec.flag));
        put_le<std::uint32_t>(out, rec.class_index);
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(rec.label.size()));
        out.insert(out.end(), rec.label.begin(), rec.label.end());
        for (float x : rec.vector) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
    }
    return out;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    const auto bytes = encode_table(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError(path.string() + ": write failed");
}

TableReader::TableReader(const std::filesystem::path& path, bool load_labels)
    : path_(path.string()), in_(path, std::ios::binary), load_labels_(load_labels) {
    if (!in_) throw IoError(path_ + ": cannot open for reading");
    std::uint8_t header[kTableHeaderSize];
    read_exact(header, sizeof header, "header");
    if (std::memcmp(header, kTableMagic, 4) != 0) throw FormatError(path_, 0, "bad magic (expected CEVT)");
    const auto version = get_le<std::uint32_t>(header + 4);
    if (version != kTableVersion) {
        throw FormatError(path_, 4, "unsupported version " + std::to_string(version));
    }
    dim_ = get_le<std::uint32_t>(header + 8);
    count_ = get_le<std::uint64_t>(header + 12);
    if (dim_ == 0 && count_ > 0) throw FormatError(path_, 8, "zero dimension with non-empty table");
    // reject impossible headers before allocating anything sized by them
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (!ec && count_ > 0) {
        const std::uint64_t body = size - kTableHeaderSize;
        const std::uint64_t min_record = 7 + 4 * static_cast<std::uint64_t>(dim_);
        if (min_record > body) throw FormatError(path_, 8, "dimension " + std::to_string(dim_) + " exceeds file size");
        if (count_ > body / min_record) {
            throw FormatError(path_, 12, "record count " + std::to_string(count_) + " exceeds file size");
        }
    }
}

void TableReader::read_exact(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
        throw FormatError(path_, offset_ + static_cast<std::uint64_t>(in_.gcount()),
                          std::string("truncated ") + what);
    }
    offset_ += n;
}

std::optional<TableRecord> TableReader::next() {
    if (read_ == count_) {
        if (in_.peek() != std::char_traits<char>::eof()) {
            throw FormatError(path_, offset_, "trailing bytes after last record");
        }
        return std::nullopt;
    }
    const std::uint64_t start = offset_;
    const std::string which = "record " + std::to_string(read_) + ": ";
    std::uint8_t fixed[7];
    read_exact(fixed, sizeof fixed, "record header");

    TableRecord rec;
    if (fixed[0] > 2) throw FormatError(path_, start, which + "invalid flag " + std::to_string(fixed[0]));
    rec.flag = static_cast<RecordFlag>(fixed[0]);
    rec.class_index = get_le<std::uint32_t>(fixed + 1);
    if (rec.flag == RecordFlag::ID && !rec.has_class()) {
        throw FormatError(path_, start + 1, which + "ID record without class index");
    }
    const auto label_len = get_le<std::uint16_t>(fixed + 5);
    if (load_labels_) {
        rec.label.resize(label_len);
        read_exact(rec.label.data(), label_len, "label");
        if (!valid_utf8(rec.label)) throw FormatError(path_, start + 7, which + "label is not valid UTF-8");
    } else {
        in_.seekg(label_len, std::ios::cur);
        offset_ += label_len;
    }

    std::vector<std::uint8_t> raw(static_cast<std::size_t>(dim_) * 4);
    const std::uint64_t vec_offset = offset_;
    read_exact(raw.data(), raw.size(), "vector");
    rec.vector.resize(dim_);
    double sq = 0;
    for (std::uint32_t d = 0; d < dim_; ++d) {
        const float x = std::bit_cast<float>(get_le<std::uint32_t>(raw.data() + 4 * d));
        if (!std::isfinite(x)) throw FormatError(path_, vec_offset + 4 * d, which + "non-finite component");
        rec.vector[d] = x;
        sq += static_cast<double>(x) * x;
    }
    const double n = std::sqrt(sq);
    const double dev = std::abs(n - 1.0);
    if (dev > kNormReject) {
        throw FormatError(path_, vec_offset, which + "vector norm " + std::to_string(n) + " is not unit");
    }
    if (dev > kNormWarn) {
        warnings_.push_back(path_ + ": " + which + "norm " + std::to_string(n) + " renormalized");
        for (float& x : rec.vector) x = static_cast<float>(x / n);
    }
    ++read_;
    return rec;
}

LoadedTable read_table(const std::filesystem::path& path, bool load_labels) {
    TableReader reader(path, load_labels);
    LoadedTable out;
    out.table.dim = reader.dim();
    while (auto rec = reader.next()) out.table.records.push_back(std::move(*rec));
    out.warnings = reader.warnings();
    return out;
}

}  // namespace coevo
