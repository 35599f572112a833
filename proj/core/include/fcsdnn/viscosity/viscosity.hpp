#pragma once

#include <array>
#include <memory>
#include <vector>

#include "fcsdnn/exchange/comm_plan.hpp"
#include "fcsdnn/geometry/decomposition.hpp"
#include "fcsdnn/sdnn/model.hpp"
#include "fcsdnn/solver/state.hpp"
#include "fcsdnn/util/grid_array.hpp"

namespace fcsdnn::viscosity {

using TauGrid = GridArray<int>;
// tau per subpatch; 0 marks indices outside the generation set.
using SmoothnessField = std::vector<TauGrid>;

// R(1..4) = 1.5, 1, 0.5, 0.
double weight_R(int tau);

// Local Mach number |u| sqrt(rho / (gamma p)). Throws PositivityError for
// rho <= 0 or p <= 0.
double proxy_variable(const solver::Primitive& w, double gamma = solver::kGamma);

// |u| + |v| + a. Same errors as proxy_variable.
double mwsb(const solver::Primitive& w, double gamma = solver::kGamma);

// 1 for |x| < (c/2) h, cos^2(pi (|x| - (c/2) h) / (2 r h)) up to
// |x| = (c/2 + r) h, 0 beyond.
double window_weight(double x, int c, int r, double h);

// Generation set: subpatch indices outside the n_v fringe. Sides on the
// domain boundary have no fringe, so boundary-adjacent indices are included.
inline bool in_generation_set(const geometry::Subpatch& sp, int i, int j, int nv) { return !sp.in_fringe(i, j, nv); }

// Classifies phi on one subpatch grid. Windows of classifier.window() samples
// run along both grid directions, starting every `stride` samples, the last
// one aligned with the grid end; a point takes the minimum tau over all
// windows containing it in either direction. Indices outside the generation
// set are 0.
TauGrid classify_subpatch(const Grid& phi, const geometry::Subpatch& sp, const sdnn::SmoothnessClassifier& classifier,
                          int nv, int stride = 4);

// R(tau) * max of S over the 7x7 stencil (clipped at the grid edges) * hhat on
// the generation set, 0 elsewhere.
Grid preliminary_viscosity(const TauGrid& tau, const Grid& S, double hhat);

// Precomputed smoothing-blending operator. For every grid point x of every
// subpatch it lists the subpatches whose region contains x together with the
// index of the rounded-half-up nearest grid node; window sums over the
// generation set are separable convolutions evaluated there.
class BlendPlan {
public:
    BlendPlan(const geometry::Decomposition& dec, int nv, int r = 9);

    // mu_hat is zero outside generation sets. mu receives the blended field.
    void apply(const exchange::Field& mu_hat, exchange::Field& mu) const;

    int r() const { return r_; }
    int nv() const { return nv_; }
    // Mean number of contributing subpatches per grid point.
    double mean_fan_in() const;
    const std::vector<double>& weights() const { return w_; }

private:
    struct Entry {
        int subpatch;
        int index; // j * n + i
    };
    void convolve(const Grid& in, const std::vector<char>& mask, Grid& out, Grid& tmp) const;

    int nv_, r_;
    std::vector<double> w_; // w_[k + r - 1], |k| < r
    std::vector<std::vector<char>> mask_;                     // generation set per subpatch
    std::vector<std::vector<std::size_t>> offsets_;           // CSR per subpatch
    std::vector<std::vector<Entry>> entries_;
    exchange::Field den_;                                     // convolved masks
};

struct ViscosityParams {
    int nv = geometry::kDefaultNv;
    int window_r = 9;
    int stride = 4;
    double gamma = solver::kGamma;
};

struct ViscosityDiagnostics {
    SmoothnessField tau;
    exchange::Field mu_hat;
};

// Full pipeline: proxy, classification, preliminary viscosity, blending.
class ViscosityOperator {
public:
    ViscosityOperator(const geometry::Decomposition& dec, std::shared_ptr<const sdnn::SmoothnessClassifier> classifier,
                      ViscosityParams params = {});

    // Throws PositivityError (step and stage -1) at the first point with
    // rho <= 0 or p <= 0.
    exchange::Field compute(const solver::State& state, ViscosityDiagnostics* diag = nullptr) const;
    void compute(const solver::State& state, exchange::Field& mu, ViscosityDiagnostics* diag = nullptr) const;

    const BlendPlan& plan() const { return plan_; }
    const sdnn::SmoothnessClassifier& classifier() const { return *classifier_; }
    const ViscosityParams& params() const { return params_; }

private:
    const geometry::Decomposition* dec_;
    std::shared_ptr<const sdnn::SmoothnessClassifier> classifier_;
    ViscosityParams params_;
    BlendPlan plan_;
};

} // namespace fcsdnn::viscosity
