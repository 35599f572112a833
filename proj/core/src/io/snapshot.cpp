#include "fcsdnn/io/snapshot.hpp"

#include <cstdio>
#include <ostream>

#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::io {

namespace {

constexpr std::string_view kMagic = "FCSNAP";
constexpr const char* kQuantities[] = {"rho", "rhou", "rhov", "E"};

} // namespace

bool Snapshot::has(std::string_view name) const {
    for (auto& a : arrays)
        if (a.name == name) return true;
    return false;
}

const std::vector<double>& Snapshot::array(std::string_view name) const {
    for (auto& a : arrays)
        if (a.name == name) return a.values;
    throw FormatError("snapshot has no array '" + std::string(name) + "'");
}

void Snapshot::add(std::string name, std::vector<double> values) {
    if (name.empty() || name.size() > 0xffff) throw FormatError("bad snapshot array name");
    if (has(name)) throw FormatError("duplicate snapshot array '" + name + "'");
    arrays.push_back({std::move(name), std::move(values)});
}

std::string encode_snapshot(const Snapshot& s) {
    util::ByteWriter w;
    w.put_bytes(kMagic);
    w.put<std::uint16_t>(kSnapshotVersion);
    const std::string meta = s.meta.dump();
    w.put<std::uint64_t>(meta.size());
    w.put_bytes(meta);
    w.put<std::uint32_t>(std::uint32_t(s.arrays.size()));
    for (auto& a : s.arrays) {
        w.put<std::uint16_t>(std::uint16_t(a.name.size()));
        w.put_bytes(a.name);
        w.put<std::uint64_t>(a.values.size());
        w.put_doubles(a.values);
    }
    w.put<std::uint32_t>(util::crc32(w.bytes()));
    return std::move(w.bytes());
}

Snapshot decode_snapshot(std::string_view bytes) {
    if (bytes.size() < kMagic.size() + 2 + 4 || bytes.substr(0, kMagic.size()) != kMagic)
        throw FormatError("not a snapshot file (bad magic)");
    const auto body = bytes.substr(0, bytes.size() - 4);
    util::ByteReader tail(bytes.substr(bytes.size() - 4));
    if (tail.get<std::uint32_t>() != util::crc32(body)) throw FormatError("snapshot checksum mismatch");

    util::ByteReader r(body);
    r.get_bytes(kMagic.size());
    const auto version = r.get<std::uint16_t>();
    if (version != kSnapshotVersion) throw FormatError("unsupported snapshot version " + std::to_string(version));
    Snapshot s;
    const auto meta_len = r.get<std::uint64_t>();
    if (meta_len > r.remaining()) throw FormatError("truncated binary payload");
    try {
        s.meta = nlohmann::json::parse(r.get_bytes(std::size_t(meta_len)));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("snapshot metadata: ") + e.what());
    }
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto len = r.get<std::uint16_t>();
        std::string name(r.get_bytes(len));
        const auto n = r.get<std::uint64_t>();
        if (n > r.remaining() / sizeof(double)) throw FormatError("truncated binary payload");
        std::vector<double> v(static_cast<std::size_t>(n));
        r.get_doubles(v);
        s.add(std::move(name), std::move(v));
    }
    if (r.remaining() != 0) throw FormatError("trailing bytes in snapshot");
    return s;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
    util::write_file_atomic(path, encode_snapshot(s));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    const auto bytes = util::read_file(path);
    try {
        return decode_snapshot(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string array_name(std::size_t subpatch, std::string_view quantity) {
    return "sp" + std::to_string(subpatch) + "/" + std::string(quantity);
}

Snapshot make_snapshot(const geometry::Decomposition& dec, const solver::State& state, const exchange::Field* mu,
                       double t, long step, const nlohmann::json& extra) {
    Snapshot s;
    s.meta = extra.is_object() ? extra : nlohmann::json::object();
    s.meta["format"] = "fcsdnn-snapshot";
    s.meta["t"] = t;
    s.meta["step"] = step;
    auto& subs = s.meta["subpatches"] = nlohmann::json::array();
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k) {
        const auto& sp = dec.subpatches[k];
        subs.push_back({{"patch", sp.patch}, {"n", sp.n}});
        s.add(array_name(k, "x"), sp.x.vec());
        s.add(array_name(k, "y"), sp.y.vec());
        for (int c = 0; c < 4; ++c) s.add(array_name(k, kQuantities[c]), state[std::size_t(c)][k].vec());
        if (mu) s.add(array_name(k, "mu"), (*mu)[k].vec());
    }
    return s;
}

namespace {

void check_layout(const Snapshot& s, const geometry::Decomposition& dec) {
    const auto it = s.meta.find("subpatches");
    if (it == s.meta.end() || !it->is_array() || it->size() != dec.subpatches.size())
        throw FormatError("snapshot does not match the decomposition (subpatch count)");
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k)
        if ((*it)[k].value("n", -1) != dec.subpatches[k].n)
            throw FormatError("snapshot does not match the decomposition (subpatch " + std::to_string(k) + ")");
}

} // namespace

exchange::Field field_from_snapshot(const Snapshot& s, const geometry::Decomposition& dec, std::string_view quantity) {
    check_layout(s, dec);
    auto f = exchange::make_field(dec);
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k) {
        const auto& v = s.array(array_name(k, quantity));
        if (v.size() != f[k].size())
            throw FormatError("array " + array_name(k, quantity) + " has the wrong length");
        std::copy(v.begin(), v.end(), f[k].vec().begin());
    }
    return f;
}

solver::State state_from_snapshot(const Snapshot& s, const geometry::Decomposition& dec) {
    return {field_from_snapshot(s, dec, kQuantities[0]), field_from_snapshot(s, dec, kQuantities[1]),
            field_from_snapshot(s, dec, kQuantities[2]), field_from_snapshot(s, dec, kQuantities[3])};
}

nlohmann::json ownership_runs(const solver::OwnershipMask& mask) {
    auto out = nlohmann::json::array();
    for (auto& m : mask) {
        auto runs = nlohmann::json::array();
        std::size_t k = 0;
        while (k < m.size()) {
            if (!m[k]) {
                ++k;
                continue;
            }
            const std::size_t start = k;
            while (k < m.size() && m[k]) ++k;
            runs.push_back({start, k - start});
        }
        out.push_back(std::move(runs));
    }
    return out;
}

solver::OwnershipMask ownership_from_runs(const nlohmann::json& runs, const geometry::Decomposition& dec) {
    if (!runs.is_array() || runs.size() != dec.subpatches.size())
        throw FormatError("ownership runs do not match the decomposition");
    solver::OwnershipMask mask(dec.subpatches.size());
    for (std::size_t k = 0; k < mask.size(); ++k) {
        const auto n = std::size_t(dec.subpatches[k].n);
        mask[k].assign(n * n, 0);
        for (auto& run : runs[k]) {
            const auto start = run.at(0).get<std::size_t>(), len = run.at(1).get<std::size_t>();
            if (start + len > n * n) throw FormatError("ownership run out of range");
            std::fill_n(mask[k].begin() + std::ptrdiff_t(start), len, std::uint8_t(1));
        }
    }
    return mask;
}

void write_csv(std::ostream& os, const Snapshot& s, const geometry::Decomposition& dec,
               const solver::OwnershipMask& mask, bool owned_only, double gamma) {
    const auto st = state_from_snapshot(s, dec);
    os << "subpatch,patch,i,j,x,y,rho,u,v,p,E,mu,owned\n";
    char line[512];
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k) {
        const auto& sp = dec.subpatches[k];
        const bool has_mu = s.has(array_name(k, "mu"));
        const std::vector<double>* mu = has_mu ? &s.array(array_name(k, "mu")) : nullptr;
        for (int j = 0; j < sp.n; ++j)
            for (int i = 0; i < sp.n; ++i) {
                const auto idx = std::size_t(j) * std::size_t(sp.n) + std::size_t(i);
                const bool owned = mask[k][idx] != 0;
                if (owned_only && !owned) continue;
                const auto e = solver::at(st, int(k), idx);
                const auto w = solver::to_primitive(e, gamma);
                std::snprintf(line, sizeof line, "%zu,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                              k, sp.patch, i, j, sp.x.vec()[idx], sp.y.vec()[idx], w.rho, w.u, w.v, w.p, e[3],
                              mu ? (*mu)[idx] : 0.0, owned ? 1 : 0);
                os << line;
            }
    }
}

} // namespace fcsdnn::io
