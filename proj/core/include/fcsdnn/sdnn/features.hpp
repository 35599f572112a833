#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fcsdnn::sdnn {

inline constexpr int kWindow = 12;
inline constexpr int kFeatureC = 25;

// Feature map for one window of samples: FC-extend to period W + C, take the
// DFT magnitudes |c_k| for k = 1..(W+C)/2 and map each to
// log10(|c_k| / max|c| + 1e-12) / 12 + 1. Flat windows (max|c| at round-off
// level) give the zero vector. Linear in the samples before the normalization,
// so the result is invariant under offsets and positive rescaling.
class FeatureExtractor {
public:
    explicit FeatureExtractor(int window = kWindow, int C = kFeatureC);

    int window() const { return W_; }
    int continuation() const { return C_; }
    int length() const { return K_; }

    std::vector<double> compute(std::span<const double> samples) const;
    // Raw magnitudes |c_k|, k = 1..length().
    std::vector<double> magnitudes(std::span<const double> samples) const;
    // Columns are windows (W x B); returns length() x B.
    Eigen::MatrixXd compute_batch(const Eigen::MatrixXd& windows) const;

private:
    Eigen::MatrixXd normalize(const Eigen::MatrixXd& re_im, const Eigen::MatrixXd& windows) const;

    int W_, C_, K_;
    Eigen::MatrixXd map_; // 2K x W: rows (Re c_k, Im c_k) as linear functionals of the samples
};

} // namespace fcsdnn::sdnn
