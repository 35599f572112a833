#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fcsdnn/sdnn/model.hpp"

namespace fcsdnn::sdnn {

struct Dataset {
    Eigen::MatrixXd windows;  // W x n raw samples
    Eigen::MatrixXd features; // K x n
    std::vector<int> labels;  // tau in 1..4
    std::size_t size() const { return labels.size(); }
};

// Synthetic windows, cycling tau = 1, 2, 3, 4 so classes are balanced:
// a smooth background (1-3 sinusoids of wavelength 10-80 samples plus a ramp)
// with, for tau < 4, a jump, kink or curvature jump of random sign placed
// inside the window; then a random positive rescaling and offset. One in
// twenty tau = 4 windows is constant.
Dataset generate_training_set(std::uint64_t seed, int count, int window = kWindow);

// One synthetic window of a given class (exposed for tests).
std::vector<double> synthetic_window(std::uint64_t seed, int tau, int window = kWindow);

struct TrainParams {
    std::vector<int> hidden{32, 32};
    int epochs = 60;
    int batch = 128;
    double learning_rate = 2e-3;
    double l2 = 1e-5;
    std::uint64_t seed = 1;
    double holdout_fraction = 0.1;
    double min_accuracy = 0.95;
};

struct TrainReport {
    double train_accuracy = 0.0;
    double holdout_accuracy = 0.0;
    std::vector<double> loss;                   // mean loss per epoch
    std::array<std::array<int, 4>, 4> confusion{}; // [true][predicted] on the holdout
};

// Adam on softmax cross-entropy. The last holdout_fraction of the dataset is
// held out. Throws ModelError with the confusion matrix when the held-out
// accuracy is below min_accuracy.
ClassifierModel train_classifier(const Dataset& data, const TrainParams& params, TrainReport* report = nullptr);

double accuracy(const ClassifierModel& model, const Dataset& data, std::size_t begin = 0,
                std::size_t end = std::size_t(-1), std::array<std::array<int, 4>, 4>* confusion = nullptr);

} // namespace fcsdnn::sdnn
