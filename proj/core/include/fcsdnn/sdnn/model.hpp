#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fcsdnn/sdnn/features.hpp"

namespace fcsdnn::sdnn {

enum class Activation : int { Tanh = 1 };

// Feedforward classifier over FeatureExtractor output; 4 outputs for
// tau = 1..4.
struct ClassifierModel {
    int window = kWindow;
    int continuation = kFeatureC;
    Activation activation = Activation::Tanh;
    std::vector<Eigen::MatrixXd> weights; // layer l: out x in
    std::vector<Eigen::VectorXd> biases;

    int input_size() const { return weights.empty() ? 0 : int(weights.front().cols()); }
    std::vector<int> layer_sizes() const;

    // Columns are feature vectors; returns 4 x B scores (pre-softmax).
    Eigen::MatrixXd scores(const Eigen::MatrixXd& features) const;
    std::array<double, 4> scores(std::span<const double> features) const;

    void validate() const;
};

// Index of the largest score plus one; ties go to the larger tau.
int argmax_tau(const double* scores);

int infer(const ClassifierModel& model, std::span<const double> features);

// "FCNN" magic, version, activation, window, continuation, layer count and
// sizes, payload length, CRC-32; payload is row-major LE doubles, weights
// then bias for each layer.
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);
// $FCSDNN_MODEL if set, else the model committed with the sources.
std::filesystem::path default_model_path();

std::string serialize_model(const ClassifierModel& model);
ClassifierModel deserialize_model(std::string_view bytes);

// Window-level smoothness classifier used by the viscosity module.
class SmoothnessClassifier {
public:
    virtual ~SmoothnessClassifier() = default;
    virtual int window() const = 0;
    // windows: W x B samples; writes B values of tau.
    virtual void classify(const Eigen::MatrixXd& windows, int* tau) const = 0;
    virtual const char* name() const = 0;
};

class AnnClassifier final : public SmoothnessClassifier {
public:
    explicit AnnClassifier(ClassifierModel model);
    int window() const override { return model_.window; }
    void classify(const Eigen::MatrixXd& windows, int* tau) const override;
    const char* name() const override { return "ann"; }
    const ClassifierModel& model() const { return model_; }

private:
    ClassifierModel model_;
    FeatureExtractor features_;
};

// Least-squares slope p of log|c_k| against log k over the lower half of the
// spectrum; p < 1.6 -> 1, p < 2.35 -> 2, p < 2.75 -> 3, else 4. Classes 3 and
// 4 overlap strongly in p, so the last cut leans towards "smooth".
class DecayClassifier final : public SmoothnessClassifier {
public:
    explicit DecayClassifier(int window = kWindow);
    int window() const override { return features_.window(); }
    void classify(const Eigen::MatrixXd& windows, int* tau) const override;
    const char* name() const override { return "decay"; }
    double decay_rate(std::span<const double> samples) const;

private:
    FeatureExtractor features_;
};

// Flat windows (range at round-off level relative to the magnitude) are
// smooth by definition.
bool is_flat(const double* v, int n);

} // namespace fcsdnn::sdnn
