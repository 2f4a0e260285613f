#include "imblab/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace imblab {
namespace {

double activate(Activation a, double v) {
    switch (a) {
        case Activation::Relu: return v > 0.0 ? v : 0.0;
        case Activation::Tanh: return std::tanh(v);
        case Activation::Identity: return v;
    }
    return v;
}

// derivative as a function of the pre-activation
double activate_grad(Activation a, double v) {
    switch (a) {
        case Activation::Relu: return v > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            double t = std::tanh(v);
            return 1.0 - t * t;
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

}  // namespace

Model Model::linear(std::size_t input_dim, int num_classes, std::uint64_t seed) {
    Model m;
    m.kind = Kind::Linear;
    m.input_dim = input_dim;
    m.num_classes = num_classes;
    m.params.assign(static_cast<std::size_t>(num_classes) * input_dim + num_classes, 0.0);
    RngStream rng(seed, stream_tag("model-init"));
    double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (std::size_t i = 0; i < static_cast<std::size_t>(num_classes) * input_dim; ++i)
        m.params[i] = scale * rng.next_normal();
    return m;
}

Model Model::mlp(std::size_t input_dim, std::size_t hidden, int num_classes, Activation act,
                 std::uint64_t seed) {
    Model m;
    m.kind = Kind::Mlp;
    m.input_dim = input_dim;
    m.hidden = hidden;
    m.num_classes = num_classes;
    m.act = act;
    m.params.assign(hidden * input_dim + hidden + static_cast<std::size_t>(num_classes) * hidden +
                        num_classes,
                    0.0);
    RngStream rng(seed, stream_tag("model-init"));
    double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::size_t i = 0;
    for (; i < hidden * input_dim; ++i) m.params[i] = s1 * rng.next_normal();
    i += hidden;  // b1 = 0
    for (; i < hidden * input_dim + hidden + static_cast<std::size_t>(num_classes) * hidden; ++i)
        m.params[i] = s2 * rng.next_normal();
    return m;
}

DenseMatrix Model::forward(const DenseMatrix& x, DenseMatrix* hidden_out) const {
    if (x.cols() != input_dim) throw std::invalid_argument("Model::forward: feature dim mismatch");
    const std::size_t n = x.rows();
    const std::size_t C = static_cast<std::size_t>(num_classes);
    DenseMatrix logits(n, C);

    if (kind == Kind::Linear) {
        const double* W = params.data();
        const double* b = params.data() + C * input_dim;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            for (std::size_t c = 0; c < C; ++c) {
                double s = b[c];
                const double* wc = W + c * input_dim;
                for (std::size_t j = 0; j < input_dim; ++j) s += wc[j] * row[j];
                logits(i, c) = s;
            }
        }
        return logits;
    }

    const double* W1 = params.data();
    const double* b1 = params.data() + hidden * input_dim;
    const double* W2 = b1 + hidden;
    const double* b2 = W2 + C * hidden;
    DenseMatrix h(n, hidden);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        for (std::size_t k = 0; k < hidden; ++k) {
            double s = b1[k];
            const double* w = W1 + k * input_dim;
            for (std::size_t j = 0; j < input_dim; ++j) s += w[j] * row[j];
            h(i, k) = activate(act, s);
        }
        for (std::size_t c = 0; c < C; ++c) {
            double s = b2[c];
            const double* w = W2 + c * hidden;
            for (std::size_t k = 0; k < hidden; ++k) s += w[k] * h(i, k);
            logits(i, c) = s;
        }
    }
    if (hidden_out) *hidden_out = std::move(h);
    return logits;
}

DenseMatrix Model::features(const DenseMatrix& x) const {
    if (kind == Kind::Linear) return x;
    DenseMatrix h;
    forward(x, &h);
    return h;
}

DenseMatrix Model::head_weights() const {
    const std::size_t C = static_cast<std::size_t>(num_classes);
    const std::size_t f = feature_dim();
    const double* W = kind == Kind::Linear ? params.data()
                                           : params.data() + hidden * input_dim + hidden;
    DenseMatrix out(C, f);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t j = 0; j < f; ++j) out(c, j) = W[c * f + j];
    return out;
}

std::vector<double> Model::backward(const DenseMatrix& x, const DenseMatrix& dlogits) const {
    const std::size_t n = x.rows();
    const std::size_t C = static_cast<std::size_t>(num_classes);
    if (dlogits.rows() != n || dlogits.cols() != C)
        throw std::invalid_argument("Model::backward: dlogits shape mismatch");
    std::vector<double> grad(params.size(), 0.0);

    if (kind == Kind::Linear) {
        double* gW = grad.data();
        double* gb = grad.data() + C * input_dim;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            for (std::size_t c = 0; c < C; ++c) {
                double g = dlogits(i, c);
                if (g == 0.0) continue;
                double* w = gW + c * input_dim;
                for (std::size_t j = 0; j < input_dim; ++j) w[j] += g * row[j];
                gb[c] += g;
            }
        }
        return grad;
    }

    const double* W1 = params.data();
    const double* b1 = params.data() + hidden * input_dim;
    const double* W2 = b1 + hidden;
    double* gW1 = grad.data();
    double* gb1 = grad.data() + hidden * input_dim;
    double* gW2 = gb1 + hidden;
    double* gb2 = gW2 + C * hidden;

    std::vector<double> pre(hidden), h(hidden), dh(hidden);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        for (std::size_t k = 0; k < hidden; ++k) {
            double s = b1[k];
            const double* w = W1 + k * input_dim;
            for (std::size_t j = 0; j < input_dim; ++j) s += w[j] * row[j];
            pre[k] = s;
            h[k] = activate(act, s);
        }
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t c = 0; c < C; ++c) {
            double g = dlogits(i, c);
            if (g == 0.0) continue;
            const double* w = W2 + c * hidden;
            double* gw = gW2 + c * hidden;
            for (std::size_t k = 0; k < hidden; ++k) {
                gw[k] += g * h[k];
                dh[k] += g * w[k];
            }
            gb2[c] += g;
        }
        for (std::size_t k = 0; k < hidden; ++k) {
            double g = dh[k] * activate_grad(act, pre[k]);
            if (g == 0.0) continue;
            double* gw = gW1 + k * input_dim;
            for (std::size_t j = 0; j < input_dim; ++j) gw[j] += g * row[j];
            gb1[k] += g;
        }
    }
    return grad;
}

DenseMatrix Model::jvp(const DenseMatrix& x, std::span<const double> dir) const {
    if (dir.size() != params.size()) throw std::invalid_argument("Model::jvp: direction size mismatch");
    const std::size_t n = x.rows();
    const std::size_t C = static_cast<std::size_t>(num_classes);
    DenseMatrix out(n, C);

    if (kind == Kind::Linear) {
        const double* dW = dir.data();
        const double* db = dir.data() + C * input_dim;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            for (std::size_t c = 0; c < C; ++c) {
                double s = db[c];
                const double* w = dW + c * input_dim;
                for (std::size_t j = 0; j < input_dim; ++j) s += w[j] * row[j];
                out(i, c) = s;
            }
        }
        return out;
    }

    const double* W1 = params.data();
    const double* b1 = params.data() + hidden * input_dim;
    const double* W2 = b1 + hidden;
    const double* dW1 = dir.data();
    const double* db1 = dir.data() + hidden * input_dim;
    const double* dW2 = db1 + hidden;
    const double* db2 = dW2 + C * hidden;

    std::vector<double> pre(hidden), h(hidden), dhid(hidden);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        for (std::size_t k = 0; k < hidden; ++k) {
            double s = b1[k];
            double ds = db1[k];
            const double* w = W1 + k * input_dim;
            const double* dw = dW1 + k * input_dim;
            for (std::size_t j = 0; j < input_dim; ++j) {
                s += w[j] * row[j];
                ds += dw[j] * row[j];
            }
            pre[k] = s;
            h[k] = activate(act, s);
            dhid[k] = activate_grad(act, s) * ds;
        }
        for (std::size_t c = 0; c < C; ++c) {
            double s = db2[c];
            const double* w = W2 + c * hidden;
            const double* dw = dW2 + c * hidden;
            for (std::size_t k = 0; k < hidden; ++k) s += dw[k] * h[k] + w[k] * dhid[k];
            out(i, c) = s;
        }
    }
    return out;
}

namespace {
constexpr char kModelMagic[4] = {'I', 'M', 'B', 'M'};
}

void save_model(const std::string& path, const Model& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_model: cannot open " + path);
    os.write(kModelMagic, 4);
    auto put_u64 = [&](std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(1);  // version
    put_u64(m.kind == Model::Kind::Linear ? 0 : 1);
    put_u64(static_cast<std::uint64_t>(m.act));
    put_u64(m.input_dim);
    put_u64(m.hidden);
    put_u64(static_cast<std::uint64_t>(m.num_classes));
    put_u64(m.params.size());
    os.write(reinterpret_cast<const char*>(m.params.data()),
             static_cast<std::streamsize>(m.params.size() * sizeof(double)));
}

Model load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kModelMagic, 4) != 0)
        throw std::runtime_error("load_model: bad magic");
    auto get_u64 = [&]() {
        std::uint64_t v;
        is.read(reinterpret_cast<char*>(&v), 8);
        if (!is) throw std::runtime_error("load_model: truncated file");
        return v;
    };
    if (get_u64() != 1) throw std::runtime_error("load_model: unsupported version");
    Model m;
    m.kind = get_u64() == 0 ? Model::Kind::Linear : Model::Kind::Mlp;
    m.act = static_cast<Activation>(get_u64());
    m.input_dim = get_u64();
    m.hidden = get_u64();
    m.num_classes = static_cast<int>(get_u64());
    m.params.resize(get_u64());
    is.read(reinterpret_cast<char*>(m.params.data()),
            static_cast<std::streamsize>(m.params.size() * sizeof(double)));
    if (!is) throw std::runtime_error("load_model: truncated parameters");
    return m;
}

}  // namespace imblab
