#include "spurprobe/adamw.hpp"

#include <cmath>

namespace spurprobe {

AdamW::AdamW(const AdamWConfig& cfg, const std::vector<const Matrix*>& params) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Matrix* p : params) {
    m_.push_back(Matrix::Zero(p->rows(), p->cols()));
    v_.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
}

bool AdamW::step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw UserError("adamw: parameter list size changed");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != m_[i].rows() || params[i]->cols() != m_[i].cols() ||
        grads[i]->rows() != m_[i].rows() || grads[i]->cols() != m_[i].cols()) {
      throw UserError("adamw: shape mismatch at parameter " + std::to_string(i));
    }
    if (!grads[i]->allFinite()) {
      ++skipped_;
      return false;
    }
  }

  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i];
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    Matrix update =
        (m_[i] / bc1).cwiseQuotient(((v_[i] / bc2).cwiseSqrt().array() + cfg_.eps).matrix());
    *params[i] -= cfg_.lr * (update + cfg_.weight_decay * (*params[i]));
  }
  return true;
}

}  // namespace spurprobe
