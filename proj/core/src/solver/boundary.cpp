#include "fcsdnn/solver/boundary.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::solver {

using geometry::Side;

namespace {

constexpr std::pair<BcKind, const char*> kNames[] = {
    {BcKind::SupersonicInflow, "supersonic-inflow"},
    {BcKind::SupersonicOutflow, "supersonic-outflow"},
    {BcKind::PressureOutflow, "pressure-outflow"},
    {BcKind::SlipWall, "slip-wall"},
    {BcKind::AdiabaticWall, "adiabatic-wall"},
    {BcKind::ZeroNormalDerivative, "zero-normal-derivative"},
};

int priority(BcKind k) {
    switch (k) {
    case BcKind::ZeroNormalDerivative: return 0;
    case BcKind::PressureOutflow: return 1;
    case BcKind::SlipWall: return 2;
    case BcKind::AdiabaticWall: return 3;
    case BcKind::SupersonicInflow: return 4;
    case BcKind::SupersonicOutflow: return 5;
    }
    return 5;
}

std::ptrdiff_t side_index(const SideLines& L, int n, int k) {
    return L.first + k * L.line_stride + (L.end == fc::End::Right ? (n - 1) * L.elem_stride : 0);
}

} // namespace

const char* to_string(BcKind k) {
    for (auto& [kind, name] : kNames)
        if (kind == k) return name;
    return "?";
}

BcKind bc_kind_from_string(const std::string& s) {
    for (auto& [kind, name] : kNames)
        if (s == name) return kind;
    throw ConfigError("unknown boundary condition '" + s + "'");
}

nlohmann::json to_json(const BoundarySpec& spec) {
    nlohmann::json out = nlohmann::json::object();
    for (auto& [id, bc] : spec) {
        nlohmann::json j{{"kind", to_string(bc.kind)}};
        if (bc.kind == BcKind::SupersonicInflow)
            j["state"] = {bc.state.rho, bc.state.u, bc.state.v, bc.state.p};
        if (bc.kind == BcKind::PressureOutflow) j["pressure"] = bc.pressure;
        out[std::to_string(id)] = j;
    }
    return out;
}

BoundarySpec boundary_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("boundary spec must be an object keyed by boundary id");
    BoundarySpec spec;
    for (auto& [key, v] : j.items()) {
        int id = 0;
        try {
            std::size_t used = 0;
            id = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ConfigError("boundary id '" + key + "' is not an integer");
        }
        BoundaryCondition bc;
        try {
            bc.kind = bc_kind_from_string(v.at("kind").get<std::string>());
            if (bc.kind == BcKind::SupersonicInflow) {
                auto s = v.at("state").get<std::vector<double>>();
                if (s.size() != 4) throw ConfigError("inflow state needs (rho, u, v, p)");
                bc.state = {s[0], s[1], s[2], s[3]};
                if (!(bc.state.rho > 0.0 && bc.state.p > 0.0))
                    throw ConfigError("inflow state needs rho > 0 and p > 0");
            }
            if (bc.kind == BcKind::PressureOutflow) {
                bc.pressure = v.at("pressure").get<double>();
                if (!(bc.pressure > 0.0)) throw ConfigError("outflow pressure must be positive");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("boundary " + key + ": " + e.what());
        }
        spec[id] = bc;
    }
    return spec;
}

void validate_boundary_spec(const geometry::Decomposition& dec, const BoundarySpec& spec) {
    std::set<int> used;
    for (auto& sp : dec.subpatches)
        for (int s = 0; s < 4; ++s)
            if (sp.external[std::size_t(s)]) used.insert(sp.boundary_id[std::size_t(s)]);
    std::ostringstream err;
    for (int id : used)
        if (!spec.count(id)) err << " missing condition for boundary " << id << " ("
                                 << geometry::DomainShape::boundary_name(id) << ");";
    for (auto& [id, bc] : spec)
        if (!used.count(id)) err << " boundary " << id << " (" << to_string(bc.kind)
                                 << ") lies on no external side;";
    if (!err.str().empty()) throw ConfigError("boundary spec:" + err.str());
}

SideLines side_lines(const geometry::Subpatch& sp, Side side) {
    const std::ptrdiff_t n = sp.n;
    switch (side) {
    case geometry::kLeft: return {0, n, 1, fc::End::Left, sp.h1};
    case geometry::kRight: return {0, n, 1, fc::End::Right, sp.h1};
    case geometry::kBottom: return {0, 1, n, fc::End::Left, sp.h2};
    case geometry::kTop: return {0, 1, n, fc::End::Right, sp.h2};
    }
    throw Error("bad side");
}

geometry::Vec2 side_normal(const geometry::Subpatch& sp, Side side, int k) {
    const auto L = side_lines(sp, side);
    const auto idx = std::size_t(side_index(L, sp.n, k));
    geometry::Vec2 g = (side == geometry::kLeft || side == geometry::kRight)
                           ? geometry::Vec2(sp.q1x.vec()[idx], sp.q1y.vec()[idx])
                           : geometry::Vec2(sp.q2x.vec()[idx], sp.q2y.vec()[idx]);
    g.normalize();
    return L.end == fc::End::Left ? geometry::Vec2(-g) : g;
}

BoundaryOperator::BoundaryOperator(const geometry::Decomposition& dec, BoundarySpec spec, double gamma)
    : dec_(&dec), spec_(std::move(spec)), gamma_(gamma) {
    validate_boundary_spec(dec, spec_);
    const auto N = dec.subpatches.size();
    rules_.resize(N);
    adiabatic_.resize(N);
    engine_.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        const auto& sp = dec.subpatches[k];
        engine_[k] = fc::line_engine(sp.n);
        for (int s = 0; s < 4; ++s) {
            if (!sp.external[std::size_t(s)]) continue;
            const auto& bc = spec_.at(sp.boundary_id[std::size_t(s)]);
            if (bc.kind == BcKind::SupersonicOutflow) continue;
            rules_[k].push_back({Side(s), &bc});
            if (bc.kind == BcKind::AdiabaticWall) adiabatic_[k].push_back(Side(s));
        }
        std::stable_sort(rules_[k].begin(), rules_[k].end(),
                         [](const SideRule& a, const SideRule& b) { return priority(a.bc->kind) < priority(b.bc->kind); });
    }
}

void BoundaryOperator::apply(State& state) const {
    const int N = int(dec_->subpatches.size());
#pragma omp parallel for schedule(dynamic)
    for (int sp = 0; sp < N; ++sp) apply(state, sp);
}

void BoundaryOperator::apply(State& state, int spi) const {
    const auto& rules = rules_[std::size_t(spi)];
    if (rules.empty()) return;
    const auto& sp = dec_->subpatches[std::size_t(spi)];
    const auto& eng = *engine_[std::size_t(spi)];
    const int n = sp.n;
    double* e[4];
    for (int c = 0; c < 4; ++c) e[c] = state[std::size_t(c)][std::size_t(spi)].data();
    auto load = [&](std::ptrdiff_t k) { return to_primitive({e[0][k], e[1][k], e[2][k], e[3][k]}, gamma_); };
    auto store = [&](std::ptrdiff_t k, const Primitive& w) {
        const auto c = to_conserved(w, gamma_);
        for (int q = 0; q < 4; ++q) e[q][k] = c[std::size_t(q)];
    };

    for (const auto& rule : rules) {
        const auto L = side_lines(sp, rule.side);
        switch (rule.bc->kind) {
        case BcKind::ZeroNormalDerivative:
            for (int c = 0; c < 4; ++c)
                for (int k = 0; k < n; ++k) {
                    const double* base = e[c] + L.first + k * L.line_stride;
                    e[c][side_index(L, n, k)] = eng.neumann_endpoint(base, L.elem_stride, 0.0, L.h, L.end);
                }
            break;
        case BcKind::PressureOutflow:
            for (int k = 0; k < n; ++k) {
                const auto idx = side_index(L, n, k);
                auto w = load(idx);
                w.p = rule.bc->pressure;
                store(idx, w);
            }
            break;
        case BcKind::SlipWall:
            for (int k = 0; k < n; ++k) {
                const auto idx = side_index(L, n, k);
                auto w = load(idx);
                const auto nv = side_normal(sp, rule.side, k);
                const double un = w.u * nv.x() + w.v * nv.y();
                w.u -= un * nv.x();
                w.v -= un * nv.y();
                store(idx, w);
            }
            break;
        case BcKind::AdiabaticWall: {
            // theta along each normal line, wall value from the Neumann continuation.
            std::vector<double> theta(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                for (int m = 0; m < n; ++m) {
                    const auto idx = L.first + k * L.line_stride + m * L.elem_stride;
                    const auto w = load(idx);
                    theta[std::size_t(m)] = w.p / w.rho;
                }
                const double tw = eng.neumann_endpoint(theta, 0.0, L.h, L.end);
                const auto idx = side_index(L, n, k);
                e[1][idx] = 0.0;
                e[2][idx] = 0.0;
                e[3][idx] = total_energy_from_theta(e[0][idx], 0.0, 0.0, tw, gamma_);
            }
            break;
        }
        case BcKind::SupersonicInflow:
            for (int k = 0; k < n; ++k) store(side_index(L, n, k), rule.bc->state);
            break;
        case BcKind::SupersonicOutflow:
            break;
        }
    }
}

void BoundaryOperator::adiabatic_theta(int spi, Grid& theta) const {
    const auto& sp = dec_->subpatches[std::size_t(spi)];
    const auto& eng = *engine_[std::size_t(spi)];
    double* t = theta.data();
    for (Side s : adiabatic_[std::size_t(spi)]) {
        const auto L = side_lines(sp, s);
        for (int k = 0; k < sp.n; ++k)
            t[side_index(L, sp.n, k)] =
                eng.neumann_endpoint(t + L.first + k * L.line_stride, L.elem_stride, 0.0, L.h, L.end);
    }
}

} // namespace fcsdnn::solver
