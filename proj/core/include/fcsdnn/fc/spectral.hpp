#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "fcsdnn/fc/continuation.hpp"

namespace fcsdnn::fc {

struct Samples1D {
    std::vector<double> values;
    double h = 1.0;
};

enum class End { Left, Right };

// exp(-alpha (2k/M)^p)
double filter_factor(int k, int M, double alpha, int p);

// Strided view of `count` lines of length N: element n of line l sits at
// base[l * line_stride + n * elem_stride].
struct LineSet {
    double* base = nullptr;
    int count = 0;
    std::ptrdiff_t elem_stride = 1;
    std::ptrdiff_t line_stride = 0;
};

struct ConstLineSet {
    const double* base = nullptr;
    int count = 0;
    std::ptrdiff_t elem_stride = 1;
    std::ptrdiff_t line_stride = 0;
};

// Batched FC differentiation and filtering for lines of a fixed length N.
// Immutable after construction apart from lazily built Neumann weights;
// safe to share between threads.
class LineSpectral {
public:
    LineSpectral(std::shared_ptr<const ContinuationOperator> op, int N);
    ~LineSpectral();
    LineSpectral(const LineSpectral&) = delete;
    LineSpectral& operator=(const LineSpectral&) = delete;

    int N() const { return N_; }
    int M() const { return M_; }
    const ContinuationOperator& op() const { return *op_; }

    void differentiate(ConstLineSet in, LineSet out, double h) const;
    void filter(ConstLineSet in, LineSet out, std::span<const double> sigma) const;

    // sigma_k for k = 0..M/2.
    std::vector<double> filter_factors(double alpha, int p) const;

    // Endpoint value making the FC derivative at `end` equal `derivative`
    // exactly, other samples held fixed. line[end index] is ignored.
    double neumann_endpoint(std::span<const double> line, double derivative, double h, End end) const;

    // Same, for a strided line.
    double neumann_endpoint(const double* base, std::ptrdiff_t stride, double derivative, double h,
                            End end) const;

    // w with (d/dx F)(x_{N-1}) = sum_j w_j F_j / h.
    const std::vector<double>& right_derivative_weights() const;

private:
    void transform(const double* in, std::ptrdiff_t stride, double* out, std::ptrdiff_t ostride,
                   const double* mult, bool imaginary) const;

    std::shared_ptr<const ContinuationOperator> op_;
    int N_;
    int M_;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
    std::vector<double> wavenumber_; // 2 pi k / M, Nyquist zeroed
    mutable std::once_flag weights_once_;
    mutable std::vector<double> weights_;
};

// Shared engines keyed by (d, C, oversampling, N). The operator is padded so
// that N + C has only factors 2, 3, 5, 7.
std::shared_ptr<const LineSpectral> line_engine(int N, int d = 2, int C = 25, int oversampling = 20);

std::vector<double> fc_extend(const Samples1D& s, const ContinuationOperator& op);
std::vector<double> fc_differentiate(const Samples1D& s, const ContinuationOperator& op);
std::vector<double> fc_filter(const Samples1D& s, const ContinuationOperator& op, double alpha_f, int p_f);

// s.values[N-1] holds dF/dx at the right end instead of a sample. Returns the
// N + C extension whose FC derivative at x_{N-1} equals that value.
std::vector<double> fc_extend_neumann(const Samples1D& s, const ContinuationOperator& op);

// Endpoint value from the local degree d-1 polynomial through the d-1 nearest
// samples with the prescribed slope (Gram form, via Q_neumann).
double neumann_endpoint_local(std::span<const double> tail, double derivative, double h,
                              const ContinuationOperator& op);

} // namespace fcsdnn::fc
