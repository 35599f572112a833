#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fcsdnn/io/config.hpp"
#include "fcsdnn/io/diagnostics.hpp"
#include "fcsdnn/io/run.hpp"
#include "fcsdnn/io/scenario.hpp"
#include "fcsdnn/io/snapshot.hpp"
#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

using namespace fcsdnn;
using namespace fcsdnn::io;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("fcsdnn-io-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

json minimal(const std::string& scenario = "sod-channel") { return {{"schema_version", 1}, {"scenario", scenario}}; }

const geometry::Decomposition& cylinder() {
    static const auto dec = [] {
        geometry::DecompositionParams p;
        p.h_bar = 0.02;
        return geometry::build_cylinder_channel(geometry::wide_channel_cylinder_layout(), p);
    }();
    return dec;
}

} // namespace

TEST_CASE("config defaults and validation") {
    const auto c = parse_config(minimal());
    CHECK(c.scenario == "sod-channel");
    CHECK(c.solver.cfl == 0.5);
    CHECK(c.solver.filter_params.alpha == 10.0);
    CHECK(c.solver.filter_params.order == 14);
    CHECK(c.solver.smear.order == 2);
    CHECK(c.solver.smear.c == 18);
    CHECK(c.solver.smear.r == 9);
    CHECK(c.geometry.n0 == 83);
    CHECK(c.geometry.nv == 9);
    CHECK(c.geometry.nf == 5);
    CHECK(c.classifier == ClassifierKind::Ann);

    auto bad = minimal();
    bad["solver"] = {{"cfl", 0.0}};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad["solver"] = {{"cfl", -1.0}};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = minimal();
    bad["solver"] = {{"cfll", 0.5}};
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("solver.cfll"), ConfigError);
    bad = minimal();
    bad.erase("schema_version");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = minimal();
    bad["schema_version"] = 2;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal("mystery")), ConfigError);
    bad = minimal();
    bad["solver"] = {{"filter_params", {{"order", 3}}}};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = minimal();
    bad["solver"] = {{"classifier", "oracle"}};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = minimal();
    bad["final_time"] = "soon";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("config files, round trip and hash") {
    const auto dir = scratch("config");
    {
        std::ofstream f(dir / "run.json");
        f << "// desk run\n{\n  \"schema_version\": 1, /* required */\n  \"scenario\": \"shock-cylinder\",\n"
             "  \"mach\": 10, \"final_time\": 0.05,\n  \"solver\": {\"cfl\": 0.4, \"classifier\": \"decay\"},\n"
             "  \"boundary\": {\"0\": {\"kind\": \"slip-wall\"}, \"1\": {\"kind\": \"slip-wall\"},"
             " \"2\": {\"kind\": \"slip-wall\"}, \"3\": {\"kind\": \"slip-wall\"}, \"4\": {\"kind\": \"adiabatic-wall\"}}\n}\n";
    }
    const auto c = load_config(dir / "run.json");
    CHECK(c.mach == 10.0);
    CHECK(c.solver.cfl == 0.4);
    CHECK(c.classifier == ClassifierKind::Decay);
    REQUIRE(c.boundary);
    CHECK(c.boundary->at(4).kind == solver::BcKind::AdiabaticWall);

    const auto again = parse_config(to_json(c));
    CHECK(to_json(again) == to_json(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    auto other = c;
    other.solver.cfl = 0.45;
    CHECK(config_hash(other) != config_hash(c));

    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    {
        std::ofstream f(dir / "broken.json");
        f << "{\"schema_version\": 1,";
    }
    CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
}

TEST_CASE("scenarios") {
    CHECK(scenario_ids().size() == 4);
    CHECK(default_final_time("shock-cylinder", 3.0) == 0.45);
    CHECK(default_final_time("shock-cylinder", 10.0) == 0.15);
    CHECK(default_final_time("channel-cylinder-flow", 3.0) == 2.0);

    SUBCASE("sod") {
        const auto s = make_scenario(parse_config(minimal()));
        CHECK(s.dec.subpatches.size() == 5);
        CHECK(s.final_time == 0.2);
        REQUIRE(s.exact);
        CHECK(s.exact({0.1, 0.1}, 0.2).rho == 1.0);
        CHECK(s.exact({0.95, 0.1}, 0.2).rho == 0.125);
        CHECK(s.ic({0.4, 0.1}).p == 1.0);
        for (auto& [id, bc] : s.bc) CHECK(bc.kind == solver::BcKind::SlipWall);
    }
    SUBCASE("shock-cylinder") {
        auto j = minimal("shock-cylinder");
        j["mach"] = 3.0;
        const auto s = make_scenario(parse_config(j));
        const auto st = solver::mach_shock_states(3.0);
        CHECK(s.bc.at(0).kind == solver::BcKind::SupersonicInflow);
        CHECK(s.bc.at(0).state.rho == st.left.rho);
        CHECK(s.bc.at(1).kind == solver::BcKind::PressureOutflow);
        CHECK(s.bc.at(1).pressure == 1.0);
        CHECK(s.bc.at(2).kind == solver::BcKind::SlipWall);
        CHECK(s.bc.at(4).kind == solver::BcKind::AdiabaticWall);
        CHECK(s.ic({0.2, 0.0}).p == doctest::Approx(31.0 / 3.0));
        CHECK(s.ic({0.7, 0.0}).rho == 1.4);
        CHECK(s.final_time == 0.45);
        REQUIRE(s.cylinder);
        CHECK(s.cylinder->center.x() == 1.25);
        j["shock_x"] = 1.2;
        CHECK_THROWS_AS(make_scenario(parse_config(j)), ConfigError);
    }
    SUBCASE("wide channel boxes") {
        auto j = minimal("wide-channel-cylinder-flow");
        j["mach"] = 3.5;
        auto l = scenario_layout(parse_config(j));
        CHECK(l.lo.y() == -1.75);
        CHECK(l.hi.x() == 2.0);
        CHECK(l.center.x() == 1.0);
        j["mach"] = 25.0;
        l = scenario_layout(parse_config(j));
        CHECK(l.lo.y() == -1.5);
        CHECK(l.hi.x() == 2.5);
        j["mach"] = 3.5;
        const auto s = make_scenario(parse_config(j));
        CHECK(s.bc.at(2).kind == solver::BcKind::ZeroNormalDerivative);
        CHECK(s.bc.at(1).kind == solver::BcKind::SupersonicOutflow);
        CHECK(s.ic({0.1, 0.5}).u == 3.5);
    }
    SUBCASE("boundary override must cover every side") {
        auto j = minimal();
        j["boundary"] = {{"0", {{"kind", "slip-wall"}}}};
        CHECK_THROWS_AS(make_scenario(parse_config(j)), ConfigError);
    }
}

TEST_CASE("snapshot container round trip is bit exact") {
    Snapshot s;
    s.meta = {{"t", 0.125}, {"note", "x"}};
    std::vector<double> odd{0.0, -0.0, 1e-310, std::numeric_limits<double>::max(),
                            std::numeric_limits<double>::infinity(), std::nan("7"), M_PI};
    s.add("odd", odd);
    s.add("empty", {});
    const auto bytes = encode_snapshot(s);
    CHECK(bytes.substr(0, 6) == "FCSNAP");
    const auto back = decode_snapshot(bytes);
    CHECK(back.meta == s.meta);
    REQUIRE(back.arrays.size() == 2);
    const auto& v = back.array("odd");
    REQUIRE(v.size() == odd.size());
    CHECK(std::memcmp(v.data(), odd.data(), odd.size() * sizeof(double)) == 0);
    CHECK(back.array("empty").empty());
    CHECK_THROWS_WITH_AS(back.array("rho"), doctest::Contains("rho"), FormatError);

    auto corrupt = bytes;
    corrupt[corrupt.size() / 2] ^= 0x10;
    CHECK_THROWS_AS(decode_snapshot(corrupt), FormatError);
    CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 9)), FormatError);
    CHECK_THROWS_AS(decode_snapshot("NOTSNAP-----------"), FormatError);
    CHECK_THROWS_AS(s.add("odd", {}), FormatError);
}

TEST_CASE("solver state snapshots") {
    const auto c = parse_config(minimal());
    const auto setup = make_scenario(c);
    auto st = solver::make_state(setup.dec);
    solver::fill_state(st, setup.dec, setup.ic);
    auto mu = exchange::make_field(setup.dec, 0.25);
    const auto dir = scratch("snap");
    write_snapshot(dir / "a.fcsnap", make_snapshot(setup.dec, st, &mu, 0.01, 7, {{"scenario", "sod-channel"}}));
    const auto back = read_snapshot(dir / "a.fcsnap");
    CHECK(back.meta["step"] == 7);
    CHECK(back.meta["scenario"] == "sod-channel");
    const auto st2 = state_from_snapshot(back, setup.dec);
    for (int q = 0; q < 4; ++q)
        for (std::size_t k = 0; k < st.size(); ++k)
            for (std::size_t k2 = 0; k2 < st[0].size(); ++k2)
                CHECK(st2[std::size_t(q)][k2].vec() == st[std::size_t(q)][k2].vec());
    CHECK(field_from_snapshot(back, setup.dec, "mu")[3].vec() == mu[3].vec());
    CHECK(back.array(array_name(2, "x")) == setup.dec.subpatches[2].x.vec());

    const auto box = geometry::build_box({0, 0}, {1, 1}, {}, 1, 1, 0.0, 1, 1);
    CHECK_THROWS_AS(state_from_snapshot(back, box), FormatError);

    const auto mask = solver::ownership_partition(setup.dec);
    const auto runs = ownership_runs(mask);
    CHECK(ownership_from_runs(runs, setup.dec) == mask);
    CHECK(runs.size() == setup.dec.subpatches.size());

    std::ostringstream csv;
    write_csv(csv, back, setup.dec, mask, true);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "subpatch,patch,i,j,x,y,rho,u,v,p,E,mu,owned");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == solver::owned_count(mask));
}

TEST_CASE("schlieren") {
    const auto dec = geometry::build_box({0, 0}, {1, 1}, {}, 1, 1, 0.0, 2, 1);
    const auto mask = solver::ownership_partition(dec);
    SUBCASE("uniform density is white") {
        const auto rho = exchange::make_field(dec, 1.4);
        for (auto& g : schlieren(rho, dec, mask))
            for (double v : g.vec()) CHECK(v == 1.0);
    }
    SUBCASE("extremes and bounds") {
        auto rho = exchange::make_field(dec);
        for (std::size_t k = 0; k < dec.subpatches.size(); ++k)
            for (std::size_t p = 0; p < rho[k].size(); ++p) {
                const double x = dec.subpatches[k].x.vec()[p];
                rho[k].vec()[p] = 1.0 + 0.5 * std::tanh((x - 0.4) / 0.05);
            }
        const auto s = schlieren(rho, dec, mask);
        double lo = 2, hi = -1;
        for (std::size_t k = 0; k < s.size(); ++k)
            for (std::size_t p = 0; p < s[k].size(); ++p) {
                CHECK(s[k].vec()[p] >= std::exp(-10.0) * (1 - 1e-15));
                CHECK(s[k].vec()[p] <= 1.0);
                if (mask[k][p]) {
                    lo = std::min(lo, s[k].vec()[p]);
                    hi = std::max(hi, s[k].vec()[p]);
                }
            }
        CHECK(lo == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
        CHECK(lo == doctest::Approx(4.54e-5).epsilon(1e-3));
        CHECK(hi == 1.0);
    }
}

TEST_CASE("point interpolation is exact for quadratics") {
    const auto& dec = cylinder();
    auto f = exchange::make_field(dec);
    auto q = [](double x, double y) { return 1.0 + 0.3 * x - 0.2 * y + 0.5 * x * y - 0.25 * x * x + 0.1 * y * y; };
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k)
        for (std::size_t p = 0; p < f[k].size(); ++p)
            f[k].vec()[p] = q(dec.subpatches[k].x.vec()[p], dec.subpatches[k].y.vec()[p]);
    // Rectangular patches only: quadratic in x, y is quadratic in q there.
    for (double x : {0.05, 0.3, 1.7, 1.95})
        for (double y : {-1.6, -0.2, 0.9}) {
            const auto v = interpolate_at(f, dec, {x, y});
            REQUIRE(v);
            CHECK(std::abs(*v - q(x, y)) <= 1e-12);
        }
    CHECK_FALSE(interpolate_at(f, dec, {1.0, 0.0}));  // cylinder centre
    CHECK_FALSE(interpolate_at(f, dec, {-0.5, 0.0}));
}

TEST_CASE("bow-shock standoff measurement") {
    CHECK(billig_standoff(3.5) == doctest::Approx(0.283).epsilon(2e-3));
    CHECK(billig_standoff(25.0) == doctest::Approx(0.194).epsilon(2e-3));
    CHECK(0.193 * std::exp(4.67 / (3.5 * 3.5)) == doctest::Approx(0.2826).epsilon(1e-3));

    const auto& dec = cylinder();
    const auto layout = geometry::wide_channel_cylinder_layout();
    auto rho = exchange::make_field(dec, 1.4);
    CHECK_THROWS_AS(measure_standoff(rho, dec, layout), Error);

    // Smooth jump centred at x = 0.6: d0 / (2R) = (0.75 - 0.6) / 0.5 = 0.3.
    for (std::size_t k = 0; k < dec.subpatches.size(); ++k)
        for (std::size_t p = 0; p < rho[k].size(); ++p) {
            const double x = dec.subpatches[k].x.vec()[p];
            rho[k].vec()[p] = 1.4 + 1.5 * (1.0 + std::tanh((x - 0.6) / 0.02));
        }
    const auto r = measure_standoff(rho, dec, layout);
    CHECK(r.x_leading_edge == 0.75);
    CHECK(r.x_shock == doctest::Approx(0.6).epsilon(0.005));
    CHECK(r.ratio == doctest::Approx(0.3).epsilon(0.01));
    CHECK(r.peak > 5 * r.median);
}

TEST_CASE("scenario driver writes snapshots, manifest and dt history") {
    auto j = minimal();
    j["max_steps"] = 3;
    j["output"] = {{"csv", true}, {"snapshot_every", 2}};
    auto run = [&](const std::string& name) {
        auto jj = j;
        jj["output"]["dir"] = scratch(name).string();
        return run_scenario(parse_config(jj));
    };
    const auto a = run("run-a");
    CHECK_FALSE(a.completed);
    CHECK(a.steps == 3);
    REQUIRE(a.snapshots.size() == 2);
    CHECK(a.snapshots[0].step == 2);
    const auto manifest = json::parse(util::read_file(a.output_dir / "manifest.json"));
    CHECK(manifest["status"] == "stopped");
    CHECK(manifest["config_hash"] == a.config_hash);
    CHECK(manifest["snapshots"].size() == 2);
    CHECK(manifest["ownership"]["runs"].size() == 5);
    CHECK(std::filesystem::exists(a.output_dir / "final.csv"));
    const auto snap = read_snapshot(a.output_dir / a.snapshots[1].file);
    CHECK(snap.meta["step"] == 3);
    CHECK(snap.meta["config_hash"] == a.config_hash);

    const auto b = run("run-b");
    CHECK(util::read_file(a.output_dir / "dt_history.csv") == util::read_file(b.output_dir / "dt_history.csv"));
    CHECK(util::read_file(a.output_dir / "dt_history.csv").find("\n3,") != std::string::npos);
}

TEST_CASE("scenario driver records a positivity abort") {
    auto j = minimal();
    j["solver"] = {{"cfl", 8.0}, {"viscosity", false}, {"filter", false}};
    j["output"] = {{"dir", scratch("abort").string()}};
    CHECK_THROWS_AS(run_scenario(parse_config(j)), PositivityError);
    const auto manifest = json::parse(util::read_file(scratch("abort-check").parent_path() /
                                                      "fcsdnn-io-test-abort" / "manifest.json"));
    CHECK(manifest["status"] == "positivity-abort");
    CHECK(manifest["error"]["step"].get<long>() >= 1);
}
