#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::util {

// Little-endian encoder for the on-disk formats (operator cache, model, snapshot).
class ByteWriter {
public:
    template <class T>
        requires std::is_arithmetic_v<T>
    void put(T v) {
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
            std::reverse(raw, raw + sizeof(T));
        buf_.append(reinterpret_cast<const char*>(raw), sizeof(T));
    }

    void put_doubles(std::span<const double> v) {
        if constexpr (std::endian::native == std::endian::little) {
            buf_.append(reinterpret_cast<const char*>(v.data()), v.size_bytes());
        } else {
            for (double x : v) put(x);
        }
    }

    void put_bytes(std::string_view s) { buf_.append(s); }

    std::size_t size() const { return buf_.size(); }
    const std::string& bytes() const { return buf_; }
    std::string& bytes() { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    template <class T>
        requires std::is_arithmetic_v<T>
    T get() {
        need(sizeof(T));
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
            std::reverse(raw, raw + sizeof(T));
        pos_ += sizeof(T);
        T v;
        std::memcpy(&v, raw, sizeof(T));
        return v;
    }

    void get_doubles(std::span<double> out) {
        need(out.size_bytes());
        if constexpr (std::endian::native == std::endian::little) {
            std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
            pos_ += out.size_bytes();
        } else {
            for (double& x : out) x = get<double>();
        }
    }

    std::string_view get_bytes(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    std::string_view rest() const { return data_.substr(pos_); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw FormatError("truncated binary payload");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace fcsdnn::util
