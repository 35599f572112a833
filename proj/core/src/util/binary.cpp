#include "fcsdnn/util/binary.hpp"

#include <fstream>
#include <sstream>

#include <unistd.h>
#include <zlib.h>

namespace fcsdnn::util {

std::uint32_t crc32(std::string_view bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
    std::size_t left = bytes.size();
    while (left > 0) {
        const uInt chunk = left > (1u << 30) ? (1u << 30) : uInt(left);
        crc = ::crc32(crc, p, chunk);
        p += chunk;
        left -= chunk;
    }
    return std::uint32_t(crc);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw FormatError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace fcsdnn::util
