#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imblab/matrix.hpp"
#include "imblab/rng.hpp"

namespace imblab {

enum class Activation { Relu, Tanh, Identity };

/// Minimal differentiable classifier: a linear map or a one-hidden-layer
/// MLP, parameters in one flat array. Forward/backward/JVP are exact and
/// deterministic; initialization is seeded.
///
/// Parameter layout: Linear = [W (C*d), b (C)];
/// Mlp = [W1 (h*d), b1 (h), W2 (C*h), b2 (C)].
struct Model {
    enum class Kind { Linear, Mlp };

    Kind kind = Kind::Linear;
    std::size_t input_dim = 0;
    std::size_t hidden = 0;
    int num_classes = 0;
    Activation act = Activation::Relu;
    std::vector<double> params;

    static Model linear(std::size_t input_dim, int num_classes, std::uint64_t seed);
    static Model mlp(std::size_t input_dim, std::size_t hidden, int num_classes, Activation act,
                     std::uint64_t seed);

    std::size_t param_count() const { return params.size(); }

    /// Logits for a batch (n x C). For the MLP, `hidden_out` receives the
    /// hidden activations when non-null.
    DenseMatrix forward(const DenseMatrix& x, DenseMatrix* hidden_out = nullptr) const;

    /// The "final feature" seen by the classifier head: the raw input for
    /// Linear, the hidden activation for Mlp.
    DenseMatrix features(const DenseMatrix& x) const;
    std::size_t feature_dim() const { return kind == Kind::Linear ? input_dim : hidden; }

    /// Head rows w_c (C x feature_dim); the weights entering the
    /// perturbation terms.
    DenseMatrix head_weights() const;

    /// Gradient of sum_i loss_i over the flat parameters, given per-row
    /// d loss_i / d logits_i (n x C). Scale the rows by 1/n for means.
    std::vector<double> backward(const DenseMatrix& x, const DenseMatrix& dlogits) const;

    /// Directional derivative of the logits along a flat parameter
    /// direction (n x C); the transpose counterpart of backward.
    DenseMatrix jvp(const DenseMatrix& x, std::span<const double> dir) const;
};

void save_model(const std::string& path, const Model& m);
Model load_model(const std::string& path);

}  // namespace imblab
