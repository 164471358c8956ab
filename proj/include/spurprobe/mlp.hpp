#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spurprobe/errors.hpp"
#include "spurprobe/rng.hpp"

namespace spurprobe {

// All internal arithmetic is double; float32 appears only in file payloads.
using Matrix = Eigen::MatrixXd;

// [U, V, U-V, U.*V] along columns; works for a single row vector or a batch.
template <typename DerivedU, typename DerivedV>
Matrix siamese_features(const Eigen::MatrixBase<DerivedU>& u,
                        const Eigen::MatrixBase<DerivedV>& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw UserError("siamese_features: dimension mismatch");
  }
  Matrix out(u.rows(), 4 * u.cols());
  out << u, v, u - v, u.cwiseProduct(v);
  return out;
}

// Numerically stable row-wise softmax (log-sum-exp shifted by the row max).
Matrix softmax_rows(const Matrix& logits);

struct CrossEntropy {
  double loss = 0.0;
  Matrix dlogits;  // (softmax - onehot) / n
};

// Mean of -log softmax(logits)[gold] over rows. gold values must lie in [0, C).
CrossEntropy cross_entropy(const Matrix& logits, const std::vector<int>& gold);

struct LinearLayer {
  Matrix w;  // in x out
  Matrix b;  // 1 x out

  LinearLayer() = default;
  LinearLayer(Eigen::Index in, Eigen::Index out) : w(Matrix::Zero(in, out)), b(Matrix::Zero(1, out)) {}
};

// Residual bottleneck: x + Up(ReLU(Down(x))). Bottleneck width is
// max(1, dim / reduction).
struct AdapterBlock {
  LinearLayer down;
  LinearLayer up;
  bool residual = true;

  static AdapterBlock zero(Eigen::Index dim, int reduction = 16);
  static AdapterBlock init(Eigen::Index dim, int reduction, Rng& rng);
  Eigen::Index dim() const { return down.w.rows(); }
  Eigen::Index bottleneck() const { return down.w.cols(); }
};

Matrix adapter_forward(const AdapterBlock& a, const Matrix& x);

struct AdapterCache {
  Matrix input;
  Matrix mid;  // post-ReLU bottleneck activations
};

Matrix adapter_forward_cached(const AdapterBlock& a, const Matrix& x, AdapterCache& cache);

// Accumulates parameter gradients into `grads` (same shapes as `a`) and
// returns the gradient w.r.t. the block input.
Matrix adapter_backward(const AdapterBlock& a, const AdapterCache& cache, const Matrix& dout,
                        AdapterBlock& grads);

// Fully connected net: ReLU between layers, raw logits at the end. An
// optional adapter block sits after the ReLU of hidden layer `adapter_at`.
struct Mlp {
  std::vector<LinearLayer> layers;
  std::optional<AdapterBlock> adapter;
  int adapter_at = -1;

  // Glorot-uniform weights, zero biases, seeded.
  static Mlp init(const std::vector<Eigen::Index>& dims, Rng& rng);

  Eigen::Index input_dim() const { return layers.front().w.rows(); }
  Eigen::Index output_dim() const { return layers.back().w.cols(); }

  Matrix forward(const Matrix& x) const;

  // Pointers in a fixed order (layer w/b pairs, then adapter params); the
  // optimizer state is aligned with this order.
  std::vector<Matrix*> param_list();
  std::vector<const Matrix*> param_list() const;
};

struct MlpCache {
  Matrix input;
  std::vector<Matrix> lin_out;  // pre-activation output of every linear layer
  std::vector<Matrix> act_out;  // hidden activations feeding the next layer
  AdapterCache adapter;
};

struct MlpGrads {
  std::vector<LinearLayer> layers;
  std::optional<AdapterBlock> adapter;

  static MlpGrads zeros_like(const Mlp& m);
  std::vector<const Matrix*> param_list() const;
};

Matrix mlp_forward_cached(const Mlp& m, const Matrix& x, MlpCache& cache);

// Returns gradient w.r.t. the input batch; parameter gradients accumulate
// into `grads`.
Matrix mlp_backward(const Mlp& m, const MlpCache& cache, const Matrix& dlogits, MlpGrads& grads);

void fill_glorot_uniform(Matrix& w, Rng& rng);

}  // namespace spurprobe
