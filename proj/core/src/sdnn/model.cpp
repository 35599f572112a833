#include "fcsdnn/sdnn/model.hpp"

#include <cmath>
#include <cstdlib>

#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::sdnn {

namespace {
constexpr std::uint32_t kMagic = 0x4e4e4346; // "FCNN"
constexpr std::uint32_t kVersion = 1;
} // namespace

std::vector<int> ClassifierModel::layer_sizes() const {
    std::vector<int> s;
    if (weights.empty()) return s;
    s.push_back(int(weights.front().cols()));
    for (const auto& w : weights) s.push_back(int(w.rows()));
    return s;
}

void ClassifierModel::validate() const {
    if (weights.empty() || weights.size() != biases.size()) throw ModelError("model has no layers");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (biases[l].size() != weights[l].rows()) throw ModelError("bias size mismatch in layer " + std::to_string(l));
        if (l > 0 && weights[l].cols() != weights[l - 1].rows())
            throw ModelError("layer size mismatch at layer " + std::to_string(l));
        if (!weights[l].allFinite() || !biases[l].allFinite()) throw ModelError("non-finite model weights");
    }
    if (weights.back().rows() != 4) throw ModelError("model must have 4 outputs");
    if (activation != Activation::Tanh) throw ModelError("unknown activation");
    if (input_size() != (window + continuation) / 2) throw ModelError("model input size does not match its feature window");
}

Eigen::MatrixXd ClassifierModel::scores(const Eigen::MatrixXd& features) const {
    if (features.rows() != input_size()) throw ModelError("feature length does not match model input");
    Eigen::MatrixXd a = features;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Eigen::MatrixXd z = weights[l] * a;
        z.colwise() += biases[l];
        a = (l + 1 < weights.size()) ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return a;
}

std::array<double, 4> ClassifierModel::scores(std::span<const double> features) const {
    if (int(features.size()) != input_size()) throw ModelError("feature length does not match model input");
    const Eigen::MatrixXd s = scores(Eigen::Map<const Eigen::MatrixXd>(features.data(), Eigen::Index(features.size()), 1));
    return {s(0, 0), s(1, 0), s(2, 0), s(3, 0)};
}

int argmax_tau(const double* s) {
    int best = 3;
    for (int k = 2; k >= 0; --k)
        if (s[k] > s[best]) best = k;
    return best + 1;
}

int infer(const ClassifierModel& model, std::span<const double> features) {
    const auto s = model.scores(features);
    return argmax_tau(s.data());
}

std::string serialize_model(const ClassifierModel& model) {
    model.validate();
    util::ByteWriter payload;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = model.weights[l];
        payload.put_doubles({w.data(), std::size_t(w.size())});
        payload.put_doubles({model.biases[l].data(), std::size_t(model.biases[l].size())});
    }
    util::ByteWriter out;
    out.put(kMagic);
    out.put(kVersion);
    out.put(std::int32_t(model.activation));
    out.put(std::int32_t(model.window));
    out.put(std::int32_t(model.continuation));
    const auto sizes = model.layer_sizes();
    out.put(std::int32_t(sizes.size()));
    for (int s : sizes) out.put(std::int32_t(s));
    out.put(std::uint64_t(payload.size()));
    out.put(util::crc32(payload.bytes()));
    out.put_bytes(payload.bytes());
    return out.bytes();
}

ClassifierModel deserialize_model(std::string_view bytes) {
    util::ByteReader in(bytes);
    if (in.get<std::uint32_t>() != kMagic) throw FormatError("not a classifier model file");
    const auto version = in.get<std::uint32_t>();
    if (version != kVersion) throw FormatError("unsupported model version " + std::to_string(version));
    ClassifierModel m;
    m.activation = Activation(in.get<std::int32_t>());
    m.window = in.get<std::int32_t>();
    m.continuation = in.get<std::int32_t>();
    const int nsizes = in.get<std::int32_t>();
    if (nsizes < 2 || nsizes > 64) throw FormatError("bad layer count in model file");
    std::vector<int> sizes(static_cast<std::size_t>(nsizes));
    for (int& s : sizes) {
        s = in.get<std::int32_t>();
        if (s < 1 || s > 1 << 16) throw FormatError("bad layer size in model file");
    }
    const auto len = in.get<std::uint64_t>();
    const auto crc = in.get<std::uint32_t>();
    const std::string_view payload = in.get_bytes(std::size_t(len));
    if (in.remaining() != 0) throw FormatError("trailing bytes in model file");
    if (util::crc32(payload) != crc) throw FormatError("model checksum mismatch");
    util::ByteReader p(payload);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(sizes[l + 1], sizes[l]);
        p.get_doubles({w.data(), std::size_t(w.size())});
        Eigen::VectorXd b(sizes[l + 1]);
        p.get_doubles({b.data(), std::size_t(b.size())});
        m.weights.emplace_back(w);
        m.biases.push_back(std::move(b));
    }
    if (p.remaining() != 0) throw FormatError("model payload size mismatch");
    try {
        m.validate();
    } catch (const ModelError& e) {
        throw FormatError(std::string("invalid model: ") + e.what());
    }
    return m;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
    util::write_file_atomic(path, serialize_model(model));
}

ClassifierModel load_model(const std::filesystem::path& path) { return deserialize_model(util::read_file(path)); }

std::filesystem::path default_model_path() {
    if (const char* env = std::getenv("FCSDNN_MODEL"); env && *env) return env;
    return FCSDNN_DEFAULT_MODEL;
}

bool is_flat(const double* v, int n) {
    double lo = v[0], hi = v[0], sum = 0.0;
    for (int k = 0; k < n; ++k) {
        lo = std::min(lo, v[k]);
        hi = std::max(hi, v[k]);
        sum += v[k];
    }
    return hi - lo <= 1e-6 * std::max(1.0, std::abs(sum / n));
}

AnnClassifier::AnnClassifier(ClassifierModel model)
    : model_(std::move(model)), features_(model_.window, model_.continuation) {
    model_.validate();
}

void AnnClassifier::classify(const Eigen::MatrixXd& windows, int* tau) const {
    // Flat windows are tau = 4 without consulting the network; the rest go
    // through it as one packed batch.
    std::vector<Eigen::Index> live;
    live.reserve(std::size_t(windows.cols()));
    for (Eigen::Index b = 0; b < windows.cols(); ++b) {
        if (is_flat(windows.col(b).data(), int(windows.rows())))
            tau[b] = 4;
        else
            live.push_back(b);
    }
    if (live.empty()) return;
    Eigen::MatrixXd packed(windows.rows(), Eigen::Index(live.size()));
    for (std::size_t c = 0; c < live.size(); ++c) packed.col(Eigen::Index(c)) = windows.col(live[c]);
    const Eigen::MatrixXd s = model_.scores(features_.compute_batch(packed));
    for (std::size_t c = 0; c < live.size(); ++c) tau[live[c]] = argmax_tau(s.col(Eigen::Index(c)).data());
}

DecayClassifier::DecayClassifier(int window) : features_(window) {}

double DecayClassifier::decay_rate(std::span<const double> samples) const {
    const auto c = features_.magnitudes(samples);
    const int K = std::max(2, int(c.size()) / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 1; k <= K; ++k) {
        const double x = std::log(double(k));
        const double y = std::log(c[std::size_t(k - 1)] + 1e-300);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (K * sxy - sx * sy) / (K * sxx - sx * sx);
    return -slope;
}

void DecayClassifier::classify(const Eigen::MatrixXd& windows, int* tau) const {
    for (Eigen::Index b = 0; b < windows.cols(); ++b) {
        const double* v = windows.col(b).data();
        if (is_flat(v, int(windows.rows()))) {
            tau[b] = 4;
            continue;
        }
        const double p = decay_rate({v, std::size_t(windows.rows())});
        tau[b] = p < 1.6 ? 1 : p < 2.35 ? 2 : p < 2.75 ? 3 : 4;
    }
}

} // namespace fcsdnn::sdnn
