#pragma once

#include "wifimec/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wifimec::nn {

/// SiLU activation x * sigmoid(x), evaluated over a whole matrix.
template <typename Derived>
auto silu(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return (x.array() / (Scalar(1) + (-x.array()).exp())).matrix();
}

/// d/dx SiLU = sigmoid(x) * (1 + x * (1 - sigmoid(x))).
template <typename Derived>
auto silu_derivative(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Array sig = Scalar(1) / (Scalar(1) + (-x.array()).exp());
  return (sig * (Scalar(1) + x.array() * (Scalar(1) - sig))).matrix().eval();
}

/// Fully connected network with SiLU hidden activations and a linear
/// output. Samples are columns.
template <typename Scalar>
class Mlp {
 public:
  using Mat = MatrixX<Scalar>;
  using Vec = VectorX<Scalar>;

  /// Activations kept by a forward pass for the matching backward pass.
  struct Tape {
    std::vector<Mat> inputs;  // input of each layer
    std::vector<Mat> pre;     // pre-activation of each hidden layer
  };

  struct Grad {
    std::vector<Mat> dw;
    std::vector<Vec> db;

    Grad& operator+=(const Grad& o) {
      for (std::size_t l = 0; l < dw.size(); ++l) {
        dw[l] += o.dw[l];
        db[l] += o.db[l];
      }
      return *this;
    }
    Scalar squared_norm() const {
      Scalar s = 0;
      for (std::size_t l = 0; l < dw.size(); ++l) s += dw[l].squaredNorm() + db[l].squaredNorm();
      return s;
    }
  };

  Mlp() = default;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization of weights and biases.
  Mlp(std::vector<int> sizes, Rng& rng) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(Scalar(sizes_[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      Mat w(sizes_[l + 1], sizes_[l]);
      Vec b(sizes_[l + 1]);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = Scalar(u(rng));
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = Scalar(u(rng));
      weights_.push_back(std::move(w));
      biases_.push_back(std::move(b));
    }
  }

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(weights_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  std::vector<Mat>& weights() { return weights_; }
  const std::vector<Mat>& weights() const { return weights_; }
  std::vector<Vec>& biases() { return biases_; }
  const std::vector<Vec>& biases() const { return biases_; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (int l = 0; l < layer_count(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  Mat forward(const Mat& x) const {
    check_input(x);
    Mat h = x;
    for (int l = 0; l < layer_count(); ++l) {
      Mat z = (weights_[l] * h).colwise() + biases_[l];
      if (l + 1 < layer_count()) z = silu(z);
      h = std::move(z);
    }
    return h;
  }

  Mat forward(const Mat& x, Tape& tape) const {
    check_input(x);
    tape.inputs.clear();
    tape.pre.clear();
    Mat h = x;
    for (int l = 0; l < layer_count(); ++l) {
      tape.inputs.push_back(h);
      Mat z = (weights_[l] * h).colwise() + biases_[l];
      if (l + 1 < layer_count()) {
        h = silu(z);
        tape.pre.push_back(std::move(z));
      } else {
        h = std::move(z);
      }
    }
    return h;
  }

  /// Back-propagates d(loss)/d(output). Parameter gradients are added to
  /// `grad` when it is non-null; returns d(loss)/d(input).
  Mat backward(const Tape& tape, const Mat& dout, Grad* grad) const {
    Mat g = dout;
    for (int l = layer_count() - 1; l >= 0; --l) {
      if (l + 1 < layer_count())
        g = g.cwiseProduct(silu_derivative(tape.pre[l]));
      if (grad) {
        grad->dw[l].noalias() += g * tape.inputs[l].transpose();
        grad->db[l] += g.rowwise().sum();
      }
      g = weights_[l].transpose() * g;
    }
    return g;
  }

  Grad zero_grad() const {
    Grad g;
    for (int l = 0; l < layer_count(); ++l) {
      g.dw.push_back(Mat::Zero(weights_[l].rows(), weights_[l].cols()));
      g.db.push_back(Vec::Zero(biases_[l].size()));
    }
    return g;
  }

  /// Parameters flattened layer by layer, weights (column-major) then bias.
  Vec flat() const {
    Vec out(parameter_count());
    Eigen::Index at = 0;
    for (int l = 0; l < layer_count(); ++l) {
      out.segment(at, weights_[l].size()) = weights_[l].reshaped();
      at += weights_[l].size();
      out.segment(at, biases_[l].size()) = biases_[l];
      at += biases_[l].size();
    }
    return out;
  }

  void set_flat(const Vec& params) {
    if (params.size() != parameter_count()) throw std::invalid_argument("Mlp::set_flat: parameter count mismatch");
    Eigen::Index at = 0;
    for (int l = 0; l < layer_count(); ++l) {
      weights_[l].reshaped() = params.segment(at, weights_[l].size());
      at += weights_[l].size();
      biases_[l] = params.segment(at, biases_[l].size());
      at += biases_[l].size();
    }
  }

  static Vec flat(const Grad& g) {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < g.dw.size(); ++l) n += g.dw[l].size() + g.db[l].size();
    Vec out(n);
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < g.dw.size(); ++l) {
      out.segment(at, g.dw[l].size()) = g.dw[l].reshaped();
      at += g.dw[l].size();
      out.segment(at, g.db[l].size()) = g.db[l];
      at += g.db[l].size();
    }
    return out;
  }

  bool same_shape(const Mlp& o) const { return sizes_ == o.sizes_; }

  bool all_finite() const {
    for (int l = 0; l < layer_count(); ++l)
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
  }

 private:
  void check_input(const Mat& x) const {
    if (x.rows() != input_dim())
      throw std::invalid_argument("Mlp: input has " + std::to_string(x.rows()) + " rows, expected " +
                                  std::to_string(input_dim()));
  }

  std::vector<int> sizes_;
  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
};

/// Polyak averaging: target <- rho * online + (1 - rho) * target.
template <typename Scalar>
void soft_update(Mlp<Scalar>& target, const Mlp<Scalar>& online, Scalar rho) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: network shapes differ");
  for (int l = 0; l < target.layer_count(); ++l) {
    target.weights()[l] = rho * online.weights()[l] + (Scalar(1) - rho) * target.weights()[l];
    target.biases()[l] = rho * online.biases()[l] + (Scalar(1) - rho) * target.biases()[l];
  }
}

template <typename Scalar>
class Adam {
 public:
  explicit Adam(const Mlp<Scalar>& net, Scalar lr = Scalar(3e-4), Scalar beta1 = Scalar(0.9),
                Scalar beta2 = Scalar(0.999), Scalar eps = Scalar(1e-8))
      : m_(net.zero_grad()), v_(net.zero_grad()), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  Adam() = default;

  void step(Mlp<Scalar>& net, const typename Mlp<Scalar>::Grad& g) {
    ++t_;
    const Scalar c1 = Scalar(1) - std::pow(beta1_, Scalar(t_));
    const Scalar c2 = Scalar(1) - std::pow(beta2_, Scalar(t_));
    for (int l = 0; l < net.layer_count(); ++l) {
      update(net.weights()[l], m_.dw[l], v_.dw[l], g.dw[l], c1, c2);
      update(net.biases()[l], m_.db[l], v_.db[l], g.db[l], c1, c2);
    }
  }

  long steps() const { return t_; }
  Scalar learning_rate() const { return lr_; }

 private:
  template <typename P, typename G>
  void update(P& param, G& m, G& v, const G& g, Scalar c1, Scalar c2) {
    m = beta1_ * m + (Scalar(1) - beta1_) * g;
    v = beta2_ * v + (Scalar(1) - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  typename Mlp<Scalar>::Grad m_, v_;
  Scalar lr_ = Scalar(3e-4), beta1_ = Scalar(0.9), beta2_ = Scalar(0.999), eps_ = Scalar(1e-8);
  long t_ = 0;
};

}  // namespace wifimec::nn
