#include "fcsdnn/fc/continuation.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::fc {

namespace {

constexpr std::uint32_t kMagic = 0x504f4346; // "FCOP"
constexpr std::uint32_t kVersion = 1;
constexpr double kTruncation = 1e-14;

Eigen::VectorXd linspace(double a, double b, int n) {
    return Eigen::VectorXd::LinSpaced(n, a, b);
}

Eigen::MatrixXd vandermonde(const Eigen::VectorXd& t, int d) {
    Eigen::MatrixXd V(t.size(), d);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        double p = 1.0;
        for (int m = 0; m < d; ++m) {
            V(i, m) = p;
            p *= t(i);
        }
    }
    return V;
}

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

MatL trig_basis(const VecL& t, int K, long double period) {
    MatL B(t.size(), 2 * K + 1);
    const long double w = 2.0L * std::numbers::pi_v<long double> / period;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        B(i, 0) = 1.0L;
        for (int k = 1; k <= K; ++k) {
            B(i, k) = std::cos(w * k * t(i));
            B(i, K + k) = std::sin(w * k * t(i));
        }
    }
    return B;
}

} // namespace

void ContinuationOperator::extend(std::span<const double> in, std::span<double> out) const {
    const std::size_t N = in.size();
    if (N < std::size_t(2 * d)) throw ConfigError("fc_extend: fewer than 2d samples");
    if (out.size() != N + std::size_t(C)) throw ConfigError("fc_extend: output length must be N + C");
    std::copy(in.begin(), in.end(), out.begin());
    const double* fl = in.data();
    const double* fr = in.data() + N - d;
    for (int c = 0; c < C; ++c) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += left_blend(c, j) * fl[j] + right_blend(c, j) * fr[j];
        out[N + c] = s;
    }
}

void ContinuationOperator::finalize() {
    left_blend = A_left * Q.transpose();
    right_blend = A_right * Q.transpose();
}

ContinuationOperator build_continuation_operator(int d, int C, int oversampling) {
    if (d < 2) throw ConfigError("build_continuation_operator: d must be at least 2");
    if (C < 1) throw ConfigError("build_continuation_operator: C must be at least 1");
    if (oversampling < 1) throw ConfigError("build_continuation_operator: oversampling must be positive");

    ContinuationOperator op;
    op.d = d;
    op.C = C;
    op.oversampling = oversampling;
    op.zero_points = C;
    op.free_points = C + 5;
    const double period = double((d - 1) + (C + 1) + op.zero_points + op.free_points);
    op.modes = int(std::lround(0.122 * period));
    const int K = op.modes;

    // Orthonormal Gram basis on the d matching points, diag(R) > 0.
    const Eigen::VectorXd tc = linspace(0.0, d - 1, d);
    const Eigen::MatrixXd V = vandermonde(tc, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd R = Q.transpose() * V;
    for (int m = 0; m < d; ++m) {
        if (R(m, m) < 0) {
            Q.col(m) *= -1.0;
            R.row(m) *= -1.0;
        }
    }
    R = R.triangularView<Eigen::Upper>();

    // Gram polynomials on the oversampled matching interval, zeros past the gap.
    // The fit is ill-conditioned (cond ~ 1e7), so it runs in extended precision
    // and the result is accurate to double rounding.
    const int nf = (d - 1) * oversampling + 1;
    const int nz = op.zero_points * oversampling + 1;
    VecL tfit(nf + nz);
    tfit.head(nf) = VecL::LinSpaced(nf, 0.0L, (long double)(d - 1));
    tfit.tail(nz) = VecL::LinSpaced(nz, (long double)(d + C), (long double)(d + C + op.zero_points));
    MatL Vf(nf, d);
    for (int i = 0; i < nf; ++i)
        for (int m = 0; m < d; ++m) Vf(i, m) = std::pow(tfit(i), m);
    const MatL RL = R.cast<long double>();
    const MatL P = RL.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(Vf);

    const MatL B = trig_basis(tfit, K, period);
    Eigen::JacobiSVD<MatL> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecL& s = svd.singularValues();
    Eigen::Index keep = 0;
    while (keep < s.size() && s(keep) > kTruncation * s(0)) ++keep;
    op.truncated = int(s.size() - keep);
    const MatL Uk = svd.matrixU().leftCols(keep);
    const MatL Vk = svd.matrixV().leftCols(keep);
    const VecL sinv = s.head(keep).cwiseInverse();

    const MatL Bc = trig_basis(VecL::LinSpaced(C, (long double)d, (long double)(d + C - 1)), K, period);
    op.A_right.resize(C, d);
    for (int j = 0; j < d; ++j) {
        VecL rhs = VecL::Zero(nf + nz);
        rhs.head(nf) = P.col(j);
        const VecL coef = Vk * (sinv.asDiagonal() * (Uk.transpose() * rhs));
        op.fit_residual = std::max(op.fit_residual, double((B * coef - rhs).cwiseAbs().maxCoeff()));
        op.A_right.col(j) = (Bc * coef).cast<double>();
    }

    // The P_0 blend and its mirror must sum to the constant, so constants extend exactly.
    const double c0 = Q(0, 0);
    const Eigen::VectorXd b = op.A_right.col(0);
    for (int c = 0; c < C; ++c) op.A_right(c, 0) = 0.5 * (b(c) + c0 - b(C - 1 - c));

    // Left blend: mirror image of the right blend under t -> d-1-t.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
    for (int m = 0; m < d; ++m) J(m, d - 1 - m) = 1.0;
    const Eigen::MatrixXd S = Q.transpose() * J * Q;
    op.A_left = op.A_right.colwise().reverse() * S;

    // Right-end Neumann data [F_{N-d}, ..., F_{N-2}, h F'_{N-1}] -> matching values.
    Eigen::MatrixXd G(d, d);
    for (int i = 0; i < d - 1; ++i)
        for (int m = 0; m < d; ++m) G(i, m) = std::pow(double(i), m);
    for (int m = 0; m < d; ++m) G(d - 1, m) = m == 0 ? 0.0 : m * std::pow(double(d - 1), m - 1);
    const Eigen::MatrixXd values_from_data = V * G.inverse();
    op.Q_neumann = values_from_data.transpose() * Q;

    op.Q = Q;
    op.finalize();
    return op;
}

void save_operator(const ContinuationOperator& op, const std::filesystem::path& path) {
    util::ByteWriter payload;
    auto put_matrix = [&](const Eigen::MatrixXd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) payload.put(m(i, j));
    };
    put_matrix(op.Q);
    put_matrix(op.A_left);
    put_matrix(op.A_right);
    put_matrix(op.Q_neumann);

    util::ByteWriter out;
    out.put(kMagic);
    out.put(kVersion);
    out.put(std::int32_t(op.d));
    out.put(std::int32_t(op.C));
    out.put(std::int32_t(op.oversampling));
    out.put(std::int32_t(op.zero_points));
    out.put(std::int32_t(op.free_points));
    out.put(std::int32_t(op.modes));
    out.put(std::int32_t(op.truncated));
    out.put(op.fit_residual);
    out.put(std::uint64_t(payload.size()));
    out.put(util::crc32(payload.bytes()));
    out.put_bytes(payload.bytes());
    util::write_file_atomic(path, out.bytes());
}

ContinuationOperator load_operator(const std::filesystem::path& path) {
    const std::string raw = util::read_file(path);
    util::ByteReader in(raw);
    if (in.get<std::uint32_t>() != kMagic) throw FormatError("not an operator cache file");
    if (in.get<std::uint32_t>() != kVersion) throw FormatError("operator cache version mismatch");
    ContinuationOperator op;
    op.d = in.get<std::int32_t>();
    op.C = in.get<std::int32_t>();
    op.oversampling = in.get<std::int32_t>();
    op.zero_points = in.get<std::int32_t>();
    op.free_points = in.get<std::int32_t>();
    op.modes = in.get<std::int32_t>();
    op.truncated = in.get<std::int32_t>();
    op.fit_residual = in.get<double>();
    const auto len = in.get<std::uint64_t>();
    const auto crc = in.get<std::uint32_t>();
    if (op.d < 2 || op.C < 1 || in.remaining() != len) throw FormatError("operator cache header corrupt");
    const std::string_view payload = in.rest();
    if (util::crc32(payload) != crc) throw FormatError("operator cache checksum mismatch");
    if (len != sizeof(double) * std::uint64_t(2 * op.d * op.d + 2 * op.C * op.d))
        throw FormatError("operator cache payload size mismatch");

    util::ByteReader body(payload);
    auto get_matrix = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = body.get<double>();
        return m;
    };
    op.Q = get_matrix(op.d, op.d);
    op.A_left = get_matrix(op.C, op.d);
    op.A_right = get_matrix(op.C, op.d);
    op.Q_neumann = get_matrix(op.d, op.d);
    op.finalize();
    return op;
}

OperatorCache::OperatorCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path OperatorCache::default_directory() {
    if (const char* env = std::getenv("FCSDNN_CACHE_DIR"); env && *env) return env;
    return std::filesystem::current_path() / ".fcsdnn-cache";
}

OperatorCache& OperatorCache::global() {
    static OperatorCache cache;
    return cache;
}

std::filesystem::path OperatorCache::file_for(int d, int C, int oversampling) const {
    return dir_ / ("fcgram_d" + std::to_string(d) + "_C" + std::to_string(C) + "_o" +
                   std::to_string(oversampling) + ".bin");
}

std::shared_ptr<const ContinuationOperator> OperatorCache::get(int d, int C, int oversampling) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(d, C, oversampling);
    if (auto it = ops_.find(key); it != ops_.end()) return it->second;

    const auto path = file_for(d, C, oversampling);
    std::shared_ptr<const ContinuationOperator> op;
    try {
        auto loaded = load_operator(path);
        if (loaded.d == d && loaded.C == C && loaded.oversampling == oversampling)
            op = std::make_shared<const ContinuationOperator>(std::move(loaded));
    } catch (const Error&) {
    } catch (const std::filesystem::filesystem_error&) {
    }
    if (!op) {
        auto built = std::make_shared<ContinuationOperator>(build_continuation_operator(d, C, oversampling));
        try {
            save_operator(*built, path);
        } catch (const std::exception&) {
            // Read-only cache location: keep the in-memory copy only.
        }
        op = built;
    }
    ops_.emplace(key, op);
    return op;
}

int padded_continuation_count(int N, int C) {
    auto smooth = [](int n) {
        for (int p : {2, 3, 5, 7})
            while (n % p == 0) n /= p;
        return n == 1;
    };
    int c = C;
    while (!smooth(N + c)) ++c;
    return c;
}

} // namespace fcsdnn::fc
