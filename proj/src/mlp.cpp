#include "spurprobe/mlp.hpp"

#include <cmath>

namespace spurprobe {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(r).array() - m).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

CrossEntropy cross_entropy(const Matrix& logits, const std::vector<int>& gold) {
  const Eigen::Index n = logits.rows();
  const Eigen::Index c = logits.cols();
  if (static_cast<Eigen::Index>(gold.size()) != n) {
    throw UserError("cross_entropy: " + std::to_string(gold.size()) + " labels for " +
                    std::to_string(n) + " rows");
  }
  CrossEntropy res;
  res.dlogits = Matrix::Zero(n, c);
  if (n == 0) return res;

  double total = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const int g = gold[static_cast<std::size_t>(r)];
    if (g < 0 || g >= c) {
      throw UserError("cross_entropy: class " + std::to_string(g) + " out of range [0, " +
                      std::to_string(c) + ")");
    }
    const double m = logits.row(r).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(r).array() - m).exp();
    const double z = e.sum();
    // -log softmax[g] = log(sum exp(l - m)) - (l_g - m)
    total += std::log(z) - (logits(r, g) - m);
    res.dlogits.row(r) = e / z;
    res.dlogits(r, g) -= 1.0;
  }
  res.dlogits /= static_cast<double>(n);
  res.loss = total / static_cast<double>(n);
  return res;
}

void fill_glorot_uniform(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      w(r, c) = rng.uniform(-limit, limit);
    }
  }
}

AdapterBlock AdapterBlock::zero(Eigen::Index dim, int reduction) {
  if (dim < 1 || reduction < 1) throw UserError("adapter: dim and reduction must be positive");
  const Eigen::Index mid = std::max<Eigen::Index>(1, dim / reduction);
  AdapterBlock a;
  a.down = LinearLayer(dim, mid);
  a.up = LinearLayer(mid, dim);
  return a;
}

AdapterBlock AdapterBlock::init(Eigen::Index dim, int reduction, Rng& rng) {
  AdapterBlock a = zero(dim, reduction);
  fill_glorot_uniform(a.down.w, rng);
  fill_glorot_uniform(a.up.w, rng);
  return a;
}

Matrix adapter_forward(const AdapterBlock& a, const Matrix& x) {
  AdapterCache cache;
  return adapter_forward_cached(a, x, cache);
}

Matrix adapter_forward_cached(const AdapterBlock& a, const Matrix& x, AdapterCache& cache) {
  if (x.cols() != a.dim()) {
    throw UserError("adapter_forward: input width " + std::to_string(x.cols()) +
                    " does not match block dim " + std::to_string(a.dim()));
  }
  cache.input = x;
  cache.mid = ((x * a.down.w).rowwise() + a.down.b.row(0)).cwiseMax(0.0);
  Matrix out = (cache.mid * a.up.w).rowwise() + a.up.b.row(0);
  if (a.residual) out += x;
  return out;
}

Matrix adapter_backward(const AdapterBlock& a, const AdapterCache& cache, const Matrix& dout,
                        AdapterBlock& grads) {
  grads.up.w += cache.mid.transpose() * dout;
  grads.up.b += dout.colwise().sum();
  Matrix dmid = (dout * a.up.w.transpose()).cwiseProduct(
      (cache.mid.array() > 0.0).cast<double>().matrix());
  grads.down.w += cache.input.transpose() * dmid;
  grads.down.b += dmid.colwise().sum();
  Matrix dx = dmid * a.down.w.transpose();
  if (a.residual) dx += dout;
  return dx;
}

Mlp Mlp::init(const std::vector<Eigen::Index>& dims, Rng& rng) {
  if (dims.size() < 2) throw UserError("mlp: need at least input and output dims");
  Mlp m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    LinearLayer layer(dims[i], dims[i + 1]);
    fill_glorot_uniform(layer.w, rng);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

Matrix Mlp::forward(const Matrix& x) const {
  MlpCache cache;
  return mlp_forward_cached(*this, x, cache);
}

std::vector<Matrix*> Mlp::param_list() {
  std::vector<Matrix*> out;
  for (LinearLayer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  if (adapter) {
    out.push_back(&adapter->down.w);
    out.push_back(&adapter->down.b);
    out.push_back(&adapter->up.w);
    out.push_back(&adapter->up.b);
  }
  return out;
}

std::vector<const Matrix*> Mlp::param_list() const {
  std::vector<const Matrix*> out;
  for (const LinearLayer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  if (adapter) {
    out.push_back(&adapter->down.w);
    out.push_back(&adapter->down.b);
    out.push_back(&adapter->up.w);
    out.push_back(&adapter->up.b);
  }
  return out;
}

MlpGrads MlpGrads::zeros_like(const Mlp& m) {
  MlpGrads g;
  for (const LinearLayer& l : m.layers) {
    g.layers.emplace_back(l.w.rows(), l.w.cols());
  }
  if (m.adapter) {
    AdapterBlock a;
    a.down = LinearLayer(m.adapter->down.w.rows(), m.adapter->down.w.cols());
    a.up = LinearLayer(m.adapter->up.w.rows(), m.adapter->up.w.cols());
    a.residual = m.adapter->residual;
    g.adapter = std::move(a);
  }
  return g;
}

std::vector<const Matrix*> MlpGrads::param_list() const {
  std::vector<const Matrix*> out;
  for (const LinearLayer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  if (adapter) {
    out.push_back(&adapter->down.w);
    out.push_back(&adapter->down.b);
    out.push_back(&adapter->up.w);
    out.push_back(&adapter->up.b);
  }
  return out;
}

Matrix mlp_forward_cached(const Mlp& m, const Matrix& x, MlpCache& cache) {
  if (x.cols() != m.input_dim()) {
    throw UserError("mlp_forward: input width " + std::to_string(x.cols()) +
                    " does not match first layer (" + std::to_string(m.input_dim()) + ")");
  }
  cache.input = x;
  cache.lin_out.assign(m.layers.size(), Matrix());
  cache.act_out.assign(m.layers.size() > 0 ? m.layers.size() - 1 : 0, Matrix());

  const Matrix* cur = &cache.input;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    cache.lin_out[l] = ((*cur) * m.layers[l].w).rowwise() + m.layers[l].b.row(0);
    if (l + 1 < m.layers.size()) {
      Matrix act = cache.lin_out[l].cwiseMax(0.0);
      if (m.adapter && m.adapter_at == static_cast<int>(l)) {
        act = adapter_forward_cached(*m.adapter, act, cache.adapter);
      }
      cache.act_out[l] = std::move(act);
      cur = &cache.act_out[l];
    }
  }
  return cache.lin_out.back();
}

Matrix mlp_backward(const Mlp& m, const MlpCache& cache, const Matrix& dlogits, MlpGrads& grads) {
  Matrix d = dlogits;
  for (std::size_t l = m.layers.size(); l-- > 0;) {
    const Matrix& in = (l == 0) ? cache.input : cache.act_out[l - 1];
    grads.layers[l].w += in.transpose() * d;
    grads.layers[l].b += d.colwise().sum();
    if (l == 0) {
      d = d * m.layers[l].w.transpose();
      break;
    }
    Matrix da = d * m.layers[l].w.transpose();
    if (m.adapter && m.adapter_at == static_cast<int>(l - 1)) {
      da = adapter_backward(*m.adapter, cache.adapter, da, *grads.adapter);
    }
    d = da.cwiseProduct((cache.lin_out[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return d;
}

}  // namespace spurprobe
