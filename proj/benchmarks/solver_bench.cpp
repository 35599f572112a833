#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/fc/spectral.hpp"
#include "fcsdnn/geometry/layouts.hpp"
#include "fcsdnn/sdnn/model.hpp"
#include "fcsdnn/solver/solver.hpp"
#include "fcsdnn/viscosity/viscosity.hpp"

using namespace fcsdnn;

namespace {

const geometry::Decomposition& cylinder() {
    static const auto dec = [] {
        geometry::DecompositionParams p;
        p.h_bar = 0.02;
        return geometry::build_cylinder_channel(geometry::channel_cylinder_layout(), p);
    }();
    return dec;
}

solver::State wavy_state(const geometry::Decomposition& dec) {
    auto s = solver::make_state(dec);
    solver::fill_state(s, dec, [](const geometry::Vec2& x) {
        return solver::Primitive{1.4 + 0.1 * std::sin(3 * x.x()) * std::cos(2 * x.y()), 3.0, 0.1 * std::sin(x.y()), 1.0};
    });
    return s;
}

std::shared_ptr<const sdnn::SmoothnessClassifier> ann() {
    static const auto c = std::make_shared<sdnn::AnnClassifier>(sdnn::load_model(sdnn::default_model_path()));
    return c;
}

} // namespace

// All n lines of an n x n subpatch grid along the first index.
static void BM_FcDifferentiateGrid(benchmark::State& st) {
    const int n = int(st.range(0));
    const auto eng = fc::line_engine(n);
    const auto K = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<double> f(K), d(K);
    for (std::size_t k = 0; k < K; ++k) f[k] = std::sin(2 * std::numbers::pi * double(k % std::size_t(n)) / (n - 1.0));
    for (auto _ : st) {
        eng->differentiate({f.data(), n, 1, n}, {d.data(), n, 1, n}, 1.0 / (n - 1));
        benchmark::DoNotOptimize(d.data());
    }
    st.SetItemsProcessed(st.iterations() * std::int64_t(K));
}
BENCHMARK(BM_FcDifferentiateGrid)->Arg(101)->Arg(201);

static void BM_RhsCylinder(benchmark::State& st) {
    const auto& dec = cylinder();
    solver::BoundarySpec bc;
    for (int id = 0; id < 4; ++id) bc[id] = {solver::BcKind::SupersonicInflow, solver::mach_flow_state(3.0)};
    bc[4] = {solver::BcKind::AdiabaticWall};
    const auto op = std::make_shared<solver::BoundaryOperator>(dec, bc);
    const solver::RhsOperator rhs(dec, op);
    const auto s = wavy_state(dec);
    auto out = s;
    const auto mu = exchange::make_field(dec, st.range(0) ? 1e-3 : 0.0);
    for (auto _ : st) rhs.evaluate(s, st.range(0) ? &mu : nullptr, out);
    st.SetItemsProcessed(st.iterations() * std::int64_t(dec.total_points()));
}
BENCHMARK(BM_RhsCylinder)->Arg(0)->Arg(1)->ArgNames({"viscous"})->Unit(benchmark::kMillisecond);

static void BM_ExchangeCylinder(benchmark::State& st) {
    const auto& dec = cylinder();
    const auto plan = exchange::build_comm_plan(dec, dec.params.nf);
    auto s = wavy_state(dec);
    std::array<exchange::Field*, 4> f{&s[0], &s[1], &s[2], &s[3]};
    for (auto _ : st) exchange::apply_exchange(plan, f);
    st.SetItemsProcessed(st.iterations() * std::int64_t(plan.records.size()) * 4);
}
BENCHMARK(BM_ExchangeCylinder)->Unit(benchmark::kMillisecond);

static void BM_ViscosityCylinder(benchmark::State& st) {
    const auto& dec = cylinder();
    const viscosity::ViscosityOperator visc(dec, ann());
    auto s = wavy_state(dec);
    exchange::Field mu;
    for (auto _ : st) visc.compute(s, mu);
    st.SetItemsProcessed(st.iterations() * std::int64_t(dec.total_points()));
}
BENCHMARK(BM_ViscosityCylinder)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
