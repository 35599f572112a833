#include "fcsdnn/fc/spectral.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::fc {

namespace {

std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

// Per-thread FFT buffers. Always fftw_malloc'ed so every execution sees the
// same alignment the plans were created with.
struct Scratch {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    int capacity = 0;

    void ensure(int M) {
        if (M <= capacity) return;
        release();
        real = static_cast<double*>(fftw_malloc(sizeof(double) * M));
        spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (M / 2 + 1)));
        capacity = M;
    }
    void release() {
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
        real = nullptr;
        spec = nullptr;
        capacity = 0;
    }
    ~Scratch() { release(); }
};

thread_local Scratch scratch;

void check_samples(const Samples1D& s, const ContinuationOperator& op) {
    if (s.values.size() < std::size_t(2 * op.d)) throw ConfigError("FC line shorter than 2d samples");
    if (!(s.h > 0.0) || !std::isfinite(s.h)) throw ConfigError("FC spacing must be positive and finite");
}

std::shared_ptr<const ContinuationOperator> borrow(const ContinuationOperator& op) {
    return std::shared_ptr<const ContinuationOperator>(&op, [](const ContinuationOperator*) {});
}

} // namespace

double filter_factor(int k, int M, double alpha, int p) {
    return std::exp(-alpha * std::pow(2.0 * std::abs(k) / M, p));
}

LineSpectral::LineSpectral(std::shared_ptr<const ContinuationOperator> op, int N)
    : op_(std::move(op)), N_(N), M_(N + op_->C) {
    if (N < 2 * op_->d) throw ConfigError("FC line shorter than 2d samples");
    wavenumber_.resize(M_ / 2 + 1);
    for (int k = 0; k <= M_ / 2; ++k) wavenumber_[k] = 2.0 * std::numbers::pi * k / M_;
    if (M_ % 2 == 0) wavenumber_[M_ / 2] = 0.0;

    std::lock_guard lock(planner_mutex());
    double* r = static_cast<double*>(fftw_malloc(sizeof(double) * M_));
    auto* c = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (M_ / 2 + 1)));
    forward_ = fftw_plan_dft_r2c_1d(M_, r, c, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(M_, c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
}

LineSpectral::~LineSpectral() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void LineSpectral::transform(const double* in, std::ptrdiff_t stride, double* out, std::ptrdiff_t ostride,
                             const double* mult, bool imaginary) const {
    scratch.ensure(M_);
    double* r = scratch.real;
    fftw_complex* c = scratch.spec;
    const int N = N_;
    const int d = op_->d;
    for (int n = 0; n < N; ++n) r[n] = in[n * stride];
    const auto& L = op_->left_blend;
    const auto& R = op_->right_blend;
    for (int k = 0; k < op_->C; ++k) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += L(k, j) * r[j] + R(k, j) * r[N - d + j];
        r[N + k] = s;
    }
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), r, c);
    const int K = M_ / 2 + 1;
    if (imaginary) {
        for (int k = 0; k < K; ++k) {
            const double re = c[k][0];
            c[k][0] = -c[k][1] * mult[k];
            c[k][1] = re * mult[k];
        }
    } else {
        for (int k = 0; k < K; ++k) {
            c[k][0] *= mult[k];
            c[k][1] *= mult[k];
        }
    }
    fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), c, r);
    for (int n = 0; n < N; ++n) out[n * ostride] = r[n];
}

void LineSpectral::differentiate(ConstLineSet in, LineSet out, double h) const {
    std::vector<double> mult(wavenumber_.size());
    const double scale = 1.0 / (M_ * h);
    for (std::size_t k = 0; k < mult.size(); ++k) mult[k] = wavenumber_[k] * scale;
    for (int l = 0; l < in.count; ++l)
        transform(in.base + l * in.line_stride, in.elem_stride, out.base + l * out.line_stride,
                  out.elem_stride, mult.data(), true);
}

void LineSpectral::filter(ConstLineSet in, LineSet out, std::span<const double> sigma) const {
    if (sigma.size() != wavenumber_.size()) throw ConfigError("filter factor table has wrong length");
    std::vector<double> mult(sigma.begin(), sigma.end());
    for (double& m : mult) m /= M_;
    for (int l = 0; l < in.count; ++l)
        transform(in.base + l * in.line_stride, in.elem_stride, out.base + l * out.line_stride,
                  out.elem_stride, mult.data(), false);
}

std::vector<double> LineSpectral::filter_factors(double alpha, int p) const {
    std::vector<double> s(M_ / 2 + 1);
    for (int k = 0; k <= M_ / 2; ++k) s[k] = filter_factor(k, M_, alpha, p);
    return s;
}

const std::vector<double>& LineSpectral::right_derivative_weights() const {
    std::call_once(weights_once_, [this] {
        weights_.assign(N_, 0.0);
        std::vector<double> e(N_, 0.0), d(N_);
        for (int j = 0; j < N_; ++j) {
            e[j] = 1.0;
            differentiate({e.data(), 1, 1, 0}, {d.data(), 1, 1, 0}, 1.0);
            weights_[j] = d[N_ - 1];
            e[j] = 0.0;
        }
    });
    return weights_;
}

double LineSpectral::neumann_endpoint(const double* base, std::ptrdiff_t stride, double derivative, double h,
                                      End end) const {
    const auto& w = right_derivative_weights();
    double s = 0.0;
    if (end == End::Right) {
        for (int j = 0; j < N_ - 1; ++j) s += w[j] * base[j * stride];
        return (derivative * h - s) / w[N_ - 1];
    }
    for (int j = 0; j < N_ - 1; ++j) s += w[j] * base[(N_ - 1 - j) * stride];
    return (-derivative * h - s) / w[N_ - 1];
}

double LineSpectral::neumann_endpoint(std::span<const double> line, double derivative, double h, End end) const {
    if (line.size() != std::size_t(N_)) throw ConfigError("Neumann line length mismatch");
    return neumann_endpoint(line.data(), 1, derivative, h, end);
}

std::shared_ptr<const LineSpectral> line_engine(int N, int d, int C, int oversampling) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const LineSpectral>> engines;
    std::lock_guard lock(mu);
    const auto key = std::make_tuple(N, d, C, oversampling);
    if (auto it = engines.find(key); it != engines.end()) return it->second;
    const int Cp = padded_continuation_count(N, C);
    auto engine = std::make_shared<const LineSpectral>(OperatorCache::global().get(d, Cp, oversampling), N);
    engines.emplace(key, engine);
    return engine;
}

std::vector<double> fc_extend(const Samples1D& s, const ContinuationOperator& op) {
    check_samples(s, op);
    std::vector<double> out(s.values.size() + op.C);
    op.extend(s.values, out);
    return out;
}

std::vector<double> fc_differentiate(const Samples1D& s, const ContinuationOperator& op) {
    check_samples(s, op);
    const int N = int(s.values.size());
    LineSpectral eng(borrow(op), N);
    std::vector<double> out(N);
    eng.differentiate({s.values.data(), 1, 1, 0}, {out.data(), 1, 1, 0}, s.h);
    return out;
}

std::vector<double> fc_filter(const Samples1D& s, const ContinuationOperator& op, double alpha_f, int p_f) {
    check_samples(s, op);
    if (!(alpha_f > 0.0)) throw ConfigError("filter strength must be positive");
    if (p_f <= 0 || p_f % 2 != 0) throw ConfigError("filter order must be even and positive");
    const int N = int(s.values.size());
    LineSpectral eng(borrow(op), N);
    std::vector<double> out(N);
    const auto sigma = eng.filter_factors(alpha_f, p_f);
    eng.filter({s.values.data(), 1, 1, 0}, {out.data(), 1, 1, 0}, sigma);
    return out;
}

std::vector<double> fc_extend_neumann(const Samples1D& s, const ContinuationOperator& op) {
    check_samples(s, op);
    const int N = int(s.values.size());
    LineSpectral eng(borrow(op), N);
    Samples1D filled = s;
    filled.values[N - 1] = eng.neumann_endpoint(s.values, s.values[N - 1], s.h, End::Right);
    return fc_extend(filled, op);
}

double neumann_endpoint_local(std::span<const double> tail, double derivative, double h,
                              const ContinuationOperator& op) {
    const int d = op.d;
    if (tail.size() != std::size_t(d - 1)) throw ConfigError("local Neumann closure needs d-1 samples");
    Eigen::VectorXd data(d);
    for (int i = 0; i < d - 1; ++i) data(i) = tail[i];
    data(d - 1) = derivative * h;
    const Eigen::VectorXd values = op.Q * (op.Q_neumann.transpose() * data);
    return values(d - 1);
}

} // namespace fcsdnn::fc
