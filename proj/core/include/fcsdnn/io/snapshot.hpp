#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/solver/ownership.hpp"
#include "fcsdnn/solver/state.hpp"

namespace fcsdnn::io {

// Binary container:
//   "FCSNAP" u16 version | u64 meta length | meta JSON |
//   u32 array count | { u16 name length | name | u64 count | f64 x count } |
//   u32 crc32 of everything before it.
// All integers and floats little-endian.
inline constexpr std::uint16_t kSnapshotVersion = 1;

struct NamedArray {
    std::string name;
    std::vector<double> values;
};

struct Snapshot {
    nlohmann::json meta = nlohmann::json::object();
    std::vector<NamedArray> arrays;

    bool has(std::string_view name) const;
    // Throws FormatError naming the array when absent.
    const std::vector<double>& array(std::string_view name) const;
    void add(std::string name, std::vector<double> values);
};

std::string encode_snapshot(const Snapshot& s);
// FormatError on bad magic, version, truncation or checksum mismatch.
Snapshot decode_snapshot(std::string_view bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);

// Per subpatch k: "sp<k>/x", "sp<k>/y", "sp<k>/rho", "sp<k>/rhou", "sp<k>/rhov",
// "sp<k>/E" and, when mu is given, "sp<k>/mu". meta gains t, step and the
// subpatch sizes; `extra` is merged in.
Snapshot make_snapshot(const geometry::Decomposition& dec, const solver::State& state, const exchange::Field* mu,
                       double t, long step, const nlohmann::json& extra = nlohmann::json::object());

std::string array_name(std::size_t subpatch, std::string_view quantity);

// Checks subpatch count and sizes against dec.
solver::State state_from_snapshot(const Snapshot& s, const geometry::Decomposition& dec);
exchange::Field field_from_snapshot(const Snapshot& s, const geometry::Decomposition& dec,
                                    std::string_view quantity);

// Ownership as runs [start, length] of owned j * n + i indices per subpatch.
nlohmann::json ownership_runs(const solver::OwnershipMask& mask);
solver::OwnershipMask ownership_from_runs(const nlohmann::json& runs, const geometry::Decomposition& dec);

// One row per grid point: subpatch, patch, i, j, x, y, rho, u, v, p, E, mu,
// owned. With owned_only, points owned by another subpatch are skipped.
void write_csv(std::ostream& os, const Snapshot& s, const geometry::Decomposition& dec,
               const solver::OwnershipMask& mask, bool owned_only, double gamma = solver::kGamma);

} // namespace fcsdnn::io
