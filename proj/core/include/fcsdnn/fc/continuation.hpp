#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace fcsdnn::fc {

// FC-Gram continuation matrices. The extension of F (N samples, spacing h)
// is [F; A_left Q^T F[0:d] + A_right Q^T F[N-d:N]], periodic with period (N+C)h.
struct ContinuationOperator {
    int d = 2;
    int C = 25;
    int oversampling = 20;

    // Blend-to-zero fit parameters: zero-region and free-region lengths
    // (in grid units) and the number of trigonometric modes.
    int zero_points = 0;
    int free_points = 0;
    int modes = 0;
    int truncated = 0;           // singular values dropped by the 1e-14 cutoff
    double fit_residual = 0.0;   // max residual of the least-squares fits

    Eigen::MatrixXd Q;           // d x d orthonormal Gram basis at t = 0..d-1
    Eigen::MatrixXd A_left;      // C x d
    Eigen::MatrixXd A_right;     // C x d
    Eigen::MatrixXd Q_neumann;   // d x d, Gram coefficients from (values, h*derivative) data

    // Cached products A Q^T.
    Eigen::MatrixXd left_blend;  // C x d
    Eigen::MatrixXd right_blend; // C x d

    // Extended period over the unit interval: (N+C)/(N-1).
    double beta_ratio(int N) const { return double(N + C) / double(N - 1); }

    // out must hold N + C values; in holds N >= 2d values.
    void extend(std::span<const double> in, std::span<double> out) const;

    void finalize();
};

ContinuationOperator build_continuation_operator(int d, int C, int oversampling = 20);

// Binary cache file: "FCOP" magic, version, d, C, oversampling, fit parameters,
// payload length and CRC-32, then Q, A_left, A_right, Q_neumann as LE doubles.
void save_operator(const ContinuationOperator& op, const std::filesystem::path& path);
ContinuationOperator load_operator(const std::filesystem::path& path);

// Process-wide operator registry backed by an on-disk cache directory.
// A missing, corrupt or mismatched cache file is rebuilt and rewritten.
class OperatorCache {
public:
    explicit OperatorCache(std::filesystem::path dir = default_directory());

    std::shared_ptr<const ContinuationOperator> get(int d, int C, int oversampling = 20);

    const std::filesystem::path& directory() const { return dir_; }
    std::filesystem::path file_for(int d, int C, int oversampling) const;

    // FCSDNN_CACHE_DIR, else ./.fcsdnn-cache
    static std::filesystem::path default_directory();
    static OperatorCache& global();

private:
    std::filesystem::path dir_;
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, std::shared_ptr<const ContinuationOperator>> ops_;
};

// Smallest C' >= C such that N + C' has no prime factor above 7.
int padded_continuation_count(int N, int C);

} // namespace fcsdnn::fc
