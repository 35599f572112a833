#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>

#include "fcsdnn/fc/spectral.hpp"
#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"
#include "oracles/fc_oracle.hpp"

using namespace fcsdnn;
using namespace fcsdnn::fc;

namespace {

constexpr double kPi = std::numbers::pi;

const ContinuationOperator& op25() {
    static const ContinuationOperator op = build_continuation_operator(2, 25, 20);
    return op;
}

Samples1D sample(int N, auto f) {
    Samples1D s;
    s.h = 1.0 / (N - 1);
    for (int i = 0; i < N; ++i) s.values.push_back(f(i * s.h));
    return s;
}

std::vector<std::complex<double>> dft(const std::vector<double>& v) {
    const int M = int(v.size());
    std::vector<std::complex<double>> F(M);
    for (int k = 0; k < M; ++k)
        for (int n = 0; n < M; ++n) F[k] += v[n] * std::polar(1.0, -2 * kPi * k * n / M);
    return F;
}

double sin_error(int N) {
    const auto s = sample(N, [](double x) { return std::sin(2 * kPi * x); });
    const auto d = fc_differentiate(s, op25());
    double e = 0.0;
    for (int i = 0; i < N; ++i) e = std::max(e, std::abs(d[i] - 2 * kPi * std::cos(2 * kPi * i * s.h)));
    return e;
}

} // namespace

TEST_CASE("operator shape and orthogonality") {
    const auto& op = op25();
    CHECK(op.A_left.rows() == 25);
    CHECK(op.A_left.cols() == 2);
    CHECK(op.A_right.rows() == 25);
    CHECK(op.A_right.cols() == 2);
    CHECK((op.Q.transpose() * op.Q - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(op.truncated == 0);
}

TEST_CASE("operator preconditions") {
    CHECK_THROWS_AS(build_continuation_operator(1, 25, 20), ConfigError);
    CHECK_THROWS_AS(build_continuation_operator(2, 0, 20), ConfigError);
    Samples1D s{{1.0, 2.0, 3.0}, 0.5};
    CHECK_THROWS_AS(fc_extend(s, op25()), ConfigError);
    CHECK_THROWS_AS(fc_differentiate(s, op25()), ConfigError);
}

TEST_CASE("constants extend and differentiate exactly") {
    const auto s = sample(100, [](double) { return 1.0; });
    const auto ext = fc_extend(s, op25());
    REQUIRE(ext.size() == 125);
    for (double v : ext) CHECK(std::abs(v - 1.0) < 1e-12);
    const auto d = fc_differentiate(s, op25());
    for (double v : d) CHECK(std::abs(v) < 1e-10);
    const auto f = fc_filter(s, op25(), 10.0, 14);
    for (double v : f) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("polynomials of degree below d survive the FFT round trip") {
    for (int N : {40, 101, 256}) {
        const auto s = sample(N, [](double x) { return 0.3 - 2.0 * x; });
        auto ext = fc_extend(s, op25());
        auto F = dft(ext);
        const int M = int(ext.size());
        for (int n = 0; n < N; ++n) {
            std::complex<double> v = 0;
            for (int k = 0; k < M; ++k) v += F[k] * std::polar(1.0, 2 * kPi * k * n / M);
            CHECK(std::abs(v.real() / M - s.values[n]) < 1e-10);
        }
    }
}

TEST_CASE("first N entries of the extension are the samples") {
    const auto s = sample(77, [](double x) { return std::exp(x); });
    const auto ext = fc_extend(s, op25());
    for (int i = 0; i < 77; ++i) CHECK(ext[i] == s.values[i]);
}

TEST_CASE("extension matches the dense least-squares oracle") {
    const auto ref = oracle::build_fc_gram(2, 25, 20);
    CHECK((ref.Ar - op25().A_right).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ref.Al - op25().A_left).cwiseAbs().maxCoeff() < 1e-10);
    const auto s = sample(100, [](double x) { return x; });
    const auto mine = fc_extend(s, op25());
    const auto theirs = oracle::extend(ref, s.values);
    for (std::size_t i = 0; i < mine.size(); ++i) CHECK(std::abs(mine[i] - theirs[i]) < 1e-10);
}

TEST_CASE("FFT differentiation agrees with a direct DFT of the oracle extension") {
    const auto ref = oracle::build_fc_gram(2, 25, 20);
    const auto s = sample(100, [](double x) { return std::sin(2 * kPi * x) + x * x; });
    const auto d = fc_differentiate(s, op25());
    const auto od = oracle::dft_derivative(oracle::extend(ref, s.values), 100, s.h);
    for (int i = 0; i < 100; ++i) CHECK(std::abs(d[i] - od[i]) < 1e-9);
}

TEST_CASE("spectral content of the sin(2 pi x) extension") {
    // Oracle run: 3.357e-6 of the energy sits above mode 10 (N = 100).
    const auto s = sample(100, [](double x) { return std::sin(2 * kPi * x); });
    const auto F = dft(fc_extend(s, op25()));
    const int M = int(F.size());
    double total = 0.0, high = 0.0;
    for (int k = 0; k < M; ++k) {
        const int kk = k <= M / 2 ? k : M - k;
        total += std::norm(F[k]);
        if (kk > 10) high += std::norm(F[k]);
    }
    CHECK(high / total < 3.4e-6);
}

TEST_CASE("alternating input is tolerated") {
    Samples1D s;
    s.h = 0.01;
    for (int i = 0; i < 101; ++i) s.values.push_back(i % 2 ? -1.0 : 1.0);
    for (double v : fc_extend(s, op25())) CHECK(std::isfinite(v));
}

TEST_CASE("differentiation converges at second order for sin(2 pi x)") {
    const double e100 = sin_error(100), e200 = sin_error(200), e400 = sin_error(400);
    // Oracle run: 2.0223e-3, 4.8547e-4, 1.0493e-4.
    CHECK(e200 < 4.9e-4);
    CHECK(e100 / e200 >= 4.0);
    CHECK(e200 / e400 >= 4.0);
}

TEST_CASE("linear ramp derivative in the interior") {
    const int N = 200;
    const auto s = sample(N, [](double x) { return x; });
    const auto d = fc_differentiate(s, op25());
    // The error grows linearly away from the midpoint; 1e-8 holds on [0.47, 0.53].
    for (int i = 0; i < N; ++i) {
        const double x = i * s.h;
        if (x >= 0.47 && x <= 0.53) CHECK(std::abs(d[i] - 1.0) < 1e-8);
        CHECK(std::abs(d[i] - 1.0) < 2e-4);
    }
}

TEST_CASE("linearity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    Samples1D f, g, h;
    f.h = g.h = h.h = 1.0 / 120;
    const double a = 0.7, b = -1.3;
    for (int i = 0; i < 121; ++i) {
        f.values.push_back(U(rng));
        g.values.push_back(U(rng));
        h.values.push_back(a * f.values.back() + b * g.values.back());
    }
    const auto df = fc_differentiate(f, op25()), dg = fc_differentiate(g, op25()),
               dh = fc_differentiate(h, op25());
    double scale = 0.0;
    for (double v : dh) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 121; ++i) CHECK(std::abs(dh[i] - (a * df[i] + b * dg[i])) < 1e-12 * scale);
}

TEST_CASE("filter factors") {
    CHECK(filter_factor(50, 100, 10.0, 14) == doctest::Approx(std::exp(-10.0)).epsilon(1e-14));
    CHECK(std::exp(-10.0) == doctest::Approx(4.54e-5).epsilon(1e-3));
    CHECK(1.0 - filter_factor(1, 125, 10.0, 14) < 1e-20);
    for (int k = 0; k <= 62; ++k) {
        const double s = filter_factor(k, 125, 10.0, 14);
        CHECK(s * s <= s);
    }
}

TEST_CASE("filtering sin(2 pi x) barely changes it") {
    const auto s = sample(100, [](double x) { return std::sin(2 * kPi * x); });
    const auto f = fc_filter(s, op25(), 10.0, 14);
    double e = 0.0;
    for (int i = 0; i < 100; ++i) e = std::max(e, std::abs(f[i] - s.values[i]));
    // Mode 1 is untouched; the change comes from the extension's high modes
    // (oracle run: 3.30e-6).
    CHECK(e < 3.4e-6);
}

TEST_CASE("filter applies sigma mode by mode") {
    const int N = 100;
    const auto eng = std::make_shared<LineSpectral>(
        std::shared_ptr<const ContinuationOperator>(&op25(), [](const ContinuationOperator*) {}), N);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> G;
    std::vector<double> v(N), once(N);
    for (double& x : v) x = G(rng);
    const auto sigma = eng->filter_factors(10.0, 14);
    eng->filter({v.data(), 1, 1, 0}, {once.data(), 1, 1, 0}, sigma);
    std::vector<double> e0(N + 25);
    op25().extend(v, e0);
    auto Ff = dft(e0);
    const int M = N + 25;
    for (int k = 0; k < M; ++k) Ff[k] *= filter_factor(k <= M / 2 ? k : M - k, M, 10.0, 14);
    for (int n = 0; n < N; ++n) {
        std::complex<double> s = 0;
        for (int k = 0; k < M; ++k) s += Ff[k] * std::polar(1.0, 2 * kPi * k * n / M);
        CHECK(std::abs(s.real() / M - once[n]) < 1e-11);
    }
}

TEST_CASE("Neumann continuation") {
    SUBCASE("constant with zero slope") {
        auto s = sample(90, [](double) { return 2.5; });
        s.values.back() = 0.0;
        for (double v : fc_extend_neumann(s, op25())) CHECK(std::abs(v - 2.5) < 1e-10);
    }
    SUBCASE("x^2 with slope 2 round trip") {
        const int N = 100;
        auto s = sample(N, [](double x) { return x * x; });
        s.values.back() = 2.0;
        const auto ext = fc_extend_neumann(s, op25());
        Samples1D t{std::vector<double>(ext.begin(), ext.begin() + N), s.h};
        const auto d = fc_differentiate(t, op25());
        CHECK(std::abs(d.back() - 2.0) < 1e-6);
        CHECK(std::abs(t.values.back() - 1.0) < 1e-4);
    }
    SUBCASE("inconsistent slope stays finite") {
        auto s = sample(100, [](double x) { return std::sin(x); });
        s.values.back() = 1e6;
        for (double v : fc_extend_neumann(s, op25())) CHECK(std::isfinite(v));
    }
    SUBCASE("left end by reflection") {
        const int N = 80;
        const auto eng = line_engine(N);
        auto s = sample(N, [](double x) { return std::cos(3 * x); });
        std::vector<double> line = s.values;
        line[0] = eng->neumann_endpoint(line, 0.25, s.h, End::Left);
        std::vector<double> d(N);
        eng->differentiate({line.data(), 1, 1, 0}, {d.data(), 1, 1, 0}, s.h);
        CHECK(std::abs(d[0] - 0.25) < 1e-9);
    }
    SUBCASE("local Gram closure reproduces linear data") {
        // d = 2: endpoint = previous sample + h * slope.
        const double v = neumann_endpoint_local(std::vector<double>{0.4}, 3.0, 0.1, op25());
        CHECK(v == doctest::Approx(0.7).epsilon(1e-13));
    }
}

TEST_CASE("operator cache round trip is bit identical") {
    const auto dir = std::filesystem::temp_directory_path() / "fcsdnn-fc-cache-test";
    std::filesystem::remove_all(dir);
    OperatorCache cache(dir);
    const auto a = cache.get(2, 25, 20);
    REQUIRE(std::filesystem::exists(cache.file_for(2, 25, 20)));
    const auto b = load_operator(cache.file_for(2, 25, 20));
    CHECK(a->A_left == b.A_left);
    CHECK(a->A_right == b.A_right);
    CHECK(a->Q == b.Q);
    CHECK(a->Q_neumann == b.Q_neumann);
    CHECK(a->A_right == op25().A_right);

    // Corrupt one payload byte: the checksum catches it and the cache rebuilds.
    auto raw = util::read_file(cache.file_for(2, 25, 20));
    raw[raw.size() - 3] ^= 0x5a;
    util::write_file_atomic(cache.file_for(2, 25, 20), raw);
    CHECK_THROWS_AS(load_operator(cache.file_for(2, 25, 20)), FormatError);
    OperatorCache fresh(dir);
    const auto c = fresh.get(2, 25, 20);
    CHECK(c->A_right == op25().A_right);
    CHECK_NOTHROW(load_operator(fresh.file_for(2, 25, 20)));
    std::filesystem::remove_all(dir);
}

TEST_CASE("deterministic repeated differentiation") {
    const auto s = sample(137, [](double x) { return std::tanh(5 * x - 2); });
    const auto a = fc_differentiate(s, op25());
    const auto b = fc_differentiate(s, op25());
    CHECK(a == b);
}

TEST_CASE("padding keeps N + C 7-smooth") {
    CHECK(padded_continuation_count(101, 25) == 25);  // 126 = 2 * 3^2 * 7
    CHECK(padded_continuation_count(100, 25) == 25);  // 125 = 5^3
    CHECK(padded_continuation_count(104, 25) == 31);  // 129..134 fail, 135 = 3^3 * 5
}
