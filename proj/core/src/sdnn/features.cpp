#include "fcsdnn/sdnn/features.hpp"

#include <cmath>
#include <numbers>

#include "fcsdnn/fc/continuation.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::sdnn {

FeatureExtractor::FeatureExtractor(int window, int C) : W_(window), C_(C), K_((window + C) / 2) {
    if (window < 4 || C < 1) throw ConfigError("feature window must have at least 4 samples");
    const auto op = fc::OperatorCache::global().get(2, C);
    const int M = W_ + C_;
    Eigen::MatrixXd ext(M, W_);
    std::vector<double> e(static_cast<std::size_t>(W_), 0.0), out(static_cast<std::size_t>(M));
    for (int n = 0; n < W_; ++n) {
        e[std::size_t(n)] = 1.0;
        op->extend(e, out);
        for (int m = 0; m < M; ++m) ext(m, n) = out[std::size_t(m)];
        e[std::size_t(n)] = 0.0;
    }
    Eigen::MatrixXd dft(2 * K_, M);
    for (int k = 1; k <= K_; ++k)
        for (int m = 0; m < M; ++m) {
            const double a = 2.0 * std::numbers::pi * double(k) * m / M;
            dft(2 * (k - 1), m) = std::cos(a);
            dft(2 * (k - 1) + 1, m) = -std::sin(a);
        }
    map_ = dft * ext;
}

Eigen::MatrixXd FeatureExtractor::normalize(const Eigen::MatrixXd& re_im, const Eigen::MatrixXd& windows) const {
    const Eigen::Index B = re_im.cols();
    Eigen::MatrixXd out(K_, B);
    const double M = W_ + C_;
    for (Eigen::Index b = 0; b < B; ++b) {
        double smax = 0.0;
        for (int k = 0; k < K_; ++k) {
            out(k, b) = std::sqrt(re_im(2 * k, b) * re_im(2 * k, b) + re_im(2 * k + 1, b) * re_im(2 * k + 1, b));
            smax = std::max(smax, out(k, b));
        }
        const double scale = windows.col(b).cwiseAbs().maxCoeff();
        if (!(smax > 1e-12 * M * scale) || !std::isfinite(smax)) {
            out.col(b).setZero();
            continue;
        }
        for (int k = 0; k < K_; ++k) out(k, b) = std::log10(out(k, b) / smax + 1e-12) / 12.0 + 1.0;
    }
    return out;
}

std::vector<double> FeatureExtractor::magnitudes(std::span<const double> samples) const {
    if (int(samples.size()) != W_) throw ConfigError("feature window length mismatch");
    const Eigen::Map<const Eigen::VectorXd> v(samples.data(), W_);
    const Eigen::VectorXd c = map_ * v;
    std::vector<double> out(static_cast<std::size_t>(K_));
    for (int k = 0; k < K_; ++k) out[std::size_t(k)] = std::hypot(c(2 * k), c(2 * k + 1));
    return out;
}

std::vector<double> FeatureExtractor::compute(std::span<const double> samples) const {
    if (int(samples.size()) != W_) throw ConfigError("feature window length mismatch");
    const Eigen::Map<const Eigen::VectorXd> v(samples.data(), W_);
    const Eigen::MatrixXd f = normalize(map_ * v, v);
    return {f.data(), f.data() + K_};
}

Eigen::MatrixXd FeatureExtractor::compute_batch(const Eigen::MatrixXd& windows) const {
    if (windows.rows() != W_) throw ConfigError("feature window length mismatch");
    return normalize(map_ * windows, windows);
}

} // namespace fcsdnn::sdnn
