#include "fcsdnn/sdnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fcsdnn/util/error.hpp"

namespace fcsdnn::sdnn {

namespace {

using Rng = std::mt19937_64;

std::vector<double> draw_window(Rng& rng, int tau, int W) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };

    std::vector<double> f(static_cast<std::size_t>(W), 0.0);
    if (tau == 4 && U(rng) < 0.05) {
        const double c = 10.0 * N(rng);
        std::fill(f.begin(), f.end(), c);
        return f;
    }
    const double x0 = uni(1.5, W - 2.5);
    const int waves = 1 + int(U(rng) * 3.0);
    for (int k = 0; k < waves; ++k) {
        const double lambda = uni(10.0, 80.0);
        const double amp = N(rng);
        const double phase = uni(0.0, 2.0 * std::numbers::pi);
        for (int t = 0; t < W; ++t) f[std::size_t(t)] += amp * std::sin(2.0 * std::numbers::pi * t / lambda + phase);
    }
    const double ramp = N(rng);
    for (int t = 0; t < W; ++t) f[std::size_t(t)] += ramp * t / W;
    double B = 1e-12;
    for (double v : f) B = std::max(B, std::abs(v));

    if (tau < 4) {
        const double A = std::pow(10.0, uni(0.0, 1.5)) * B * (U(rng) < 0.5 ? 1.0 : -1.0);
        for (int t = 0; t < W; ++t) {
            const double s = t - x0;
            if (tau == 1) f[std::size_t(t)] += s > 0 ? A : 0.0;
            if (tau == 2) f[std::size_t(t)] += A * std::abs(s) * 4.0 / W;
            if (tau == 3) f[std::size_t(t)] += A * std::pow(std::max(s, 0.0), 2) * 16.0 / (double(W) * W);
        }
    }
    const double scale = std::pow(10.0, uni(-3.0, 3.0));
    const double offset = 10.0 * N(rng);
    for (double& v : f) v = v * scale + offset;
    return f;
}

} // namespace

std::vector<double> synthetic_window(std::uint64_t seed, int tau, int window) {
    if (tau < 1 || tau > 4) throw ConfigError("tau must be in 1..4");
    Rng rng(seed);
    return draw_window(rng, tau, window);
}

Dataset generate_training_set(std::uint64_t seed, int count, int window) {
    if (count < 4) throw ConfigError("training set needs at least 4 samples");
    Rng rng(seed);
    Dataset d;
    d.windows.resize(window, count);
    d.labels.resize(std::size_t(count));
    for (int n = 0; n < count; ++n) {
        const int tau = n % 4 + 1;
        const auto w = draw_window(rng, tau, window);
        for (int t = 0; t < window; ++t) d.windows(t, n) = w[std::size_t(t)];
        d.labels[std::size_t(n)] = tau;
    }
    d.features = FeatureExtractor(window).compute_batch(d.windows);
    return d;
}

double accuracy(const ClassifierModel& model, const Dataset& data, std::size_t begin, std::size_t end,
                std::array<std::array<int, 4>, 4>* confusion) {
    end = std::min(end, data.size());
    if (end <= begin) return 0.0;
    const Eigen::MatrixXd s = model.scores(data.features.middleCols(Eigen::Index(begin), Eigen::Index(end - begin)));
    std::size_t hits = 0;
    for (Eigen::Index b = 0; b < s.cols(); ++b) {
        const int want = data.labels[begin + std::size_t(b)];
        const int got = argmax_tau(s.col(b).data());
        hits += got == want;
        if (confusion) (*confusion)[std::size_t(want - 1)][std::size_t(got - 1)]++;
    }
    return double(hits) / double(end - begin);
}

ClassifierModel train_classifier(const Dataset& data, const TrainParams& params, TrainReport* report) {
    const std::size_t n = data.size();
    const std::size_t n_hold = std::size_t(std::floor(params.holdout_fraction * double(n)));
    const std::size_t n_train = n - n_hold;
    if (n_train < 4 || params.batch < 1 || params.epochs < 1) throw ConfigError("training set or batch too small");
    std::array<std::size_t, 4> counts{};
    for (std::size_t k = 0; k < n_train; ++k) counts[std::size_t(data.labels[k] - 1)]++;
    for (auto c : counts)
        if (std::abs(double(c) / double(n_train) - 0.25) > 0.01) throw ConfigError("training set is not class balanced");

    Rng rng(params.seed);
    ClassifierModel m;
    m.window = int(data.windows.rows());
    m.continuation = kFeatureC;
    std::vector<int> sizes{int(data.features.rows())};
    sizes.insert(sizes.end(), params.hidden.begin(), params.hidden.end());
    sizes.push_back(4);
    const std::size_t L = sizes.size() - 1;
    for (std::size_t l = 0; l < L; ++l) {
        // Glorot uniform.
        const double lim = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
        std::uniform_real_distribution<double> U(-lim, lim);
        Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
        for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = U(rng);
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
    }

    // Adam moments.
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
    for (std::size_t l = 0; l < L; ++l) {
        mw.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
        vw.push_back(mw.back());
        mb.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
        vb.push_back(mb.back());
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    long step = 0;

    std::vector<std::size_t> order(n_train);
    for (std::size_t k = 0; k < n_train; ++k) order[k] = k;
    TrainReport rep;
    std::vector<Eigen::MatrixXd> act(L + 1);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        // Cosine learning-rate decay to 5% of the initial value.
        const double lr = params.learning_rate *
                          (0.05 + 0.95 * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / params.epochs)));
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n_train; start += std::size_t(params.batch)) {
            const std::size_t B = std::min<std::size_t>(std::size_t(params.batch), n_train - start);
            act[0].resize(data.features.rows(), Eigen::Index(B));
            Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(4, Eigen::Index(B));
            for (std::size_t b = 0; b < B; ++b) {
                act[0].col(Eigen::Index(b)) = data.features.col(Eigen::Index(order[start + b]));
                Y(data.labels[order[start + b]] - 1, Eigen::Index(b)) = 1.0;
            }
            for (std::size_t l = 0; l < L; ++l) {
                Eigen::MatrixXd z = m.weights[l] * act[l];
                z.colwise() += m.biases[l];
                act[l + 1] = (l + 1 < L) ? Eigen::MatrixXd(z.array().tanh()) : z;
            }
            // Softmax.
            Eigen::MatrixXd P = act[L];
            for (Eigen::Index b = 0; b < P.cols(); ++b) {
                const double mx = P.col(b).maxCoeff();
                P.col(b) = (P.col(b).array() - mx).exp();
                P.col(b) /= P.col(b).sum();
                loss_sum -= std::log(std::max(1e-300, (P.col(b).array() * Y.col(b).array()).sum()));
            }
            Eigen::MatrixXd delta = (P - Y) / double(B);
            ++step;
            const double c1 = 1.0 - std::pow(b1, double(step)), c2 = 1.0 - std::pow(b2, double(step));
            for (std::size_t l = L; l-- > 0;) {
                const Eigen::MatrixXd gw = delta * act[l].transpose() + params.l2 * m.weights[l];
                const Eigen::VectorXd gb = delta.rowwise().sum();
                if (l > 0) {
                    delta = (m.weights[l].transpose() * delta).array() * (1.0 - act[l].array().square());
                }
                mw[l] = b1 * mw[l] + (1 - b1) * gw;
                vw[l] = b2 * vw[l] + (1 - b2) * gw.cwiseProduct(gw);
                mb[l] = b1 * mb[l] + (1 - b1) * gb;
                vb[l] = b2 * vb[l] + (1 - b2) * gb.cwiseProduct(gb);
                m.weights[l].array() -= lr * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + eps);
                m.biases[l].array() -= lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
            }
        }
        rep.loss.push_back(loss_sum / double(n_train));
    }

    rep.train_accuracy = accuracy(m, data, 0, n_train);
    rep.holdout_accuracy = n_hold ? accuracy(m, data, n_train, n, &rep.confusion) : rep.train_accuracy;
    if (report) *report = rep;
    if (rep.holdout_accuracy < params.min_accuracy) {
        std::ostringstream s;
        s << "held-out accuracy " << rep.holdout_accuracy << " below " << params.min_accuracy
          << " (train " << rep.train_accuracy << "); confusion [true][pred]:";
        for (const auto& row : rep.confusion) {
            s << "\n ";
            for (int c : row) s << " " << c;
        }
        throw ModelError(s.str());
    }
    return m;
}

} // namespace fcsdnn::sdnn
