#include "spurprobe/train.hpp"

#include <cmath>
#include <numeric>

namespace spurprobe {

int argmax_row(const Matrix& m, Eigen::Index row) {
  int best = 0;
  double best_v = m(row, 0);
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > best_v) {
      best_v = m(row, c);
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<int> predict_classes(const Mlp& model, const Matrix& features) {
  const Matrix logits = model.forward(features);
  std::vector<int> pred(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    pred[static_cast<std::size_t>(r)] = argmax_row(logits, r);
  }
  return pred;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& gold) {
  if (pred.size() != gold.size()) throw UserError("accuracy: size mismatch");
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gold[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

TrainResult train_mlp(const TrainConfig& cfg, const Matrix& features, const std::vector<int>& gold,
                      int num_classes, const std::vector<std::string>& ids, std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (static_cast<Eigen::Index>(gold.size()) != n || static_cast<Eigen::Index>(ids.size()) != n) {
    throw UserError("train_mlp: features, gold and ids must align");
  }
  if (num_classes < 2) throw UserError("train_mlp: need at least 2 classes");
  if (cfg.batch_size < 1) throw UserError("train_mlp: batch_size must be >= 1");

  std::vector<Eigen::Index> dims;
  dims.push_back(features.cols());
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(num_classes);

  Rng init_rng(derive_seed(seed, {fnv1a64("init")}));
  TrainResult res;
  res.model = Mlp::init(dims, init_rng);
  if (cfg.adapter_reduction > 0) {
    if (cfg.hidden.empty()) throw UserError("train_mlp: adapter requires a hidden layer");
    res.model.adapter = AdapterBlock::init(cfg.hidden.front(), cfg.adapter_reduction, init_rng);
    res.model.adapter_at = 0;
  }
  if (cfg.epochs <= 0 || n == 0) return res;

  AdamW opt(cfg.opt, std::vector<const Matrix*>(
                         const_cast<const Mlp&>(res.model).param_list()));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(seed + static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const Eigen::Index bn = static_cast<Eigen::Index>(stop - start);
      Matrix xb(bn, features.cols());
      std::vector<int> yb(static_cast<std::size_t>(bn));
      for (Eigen::Index i = 0; i < bn; ++i) {
        xb.row(i) = features.row(order[start + static_cast<std::size_t>(i)]);
        yb[static_cast<std::size_t>(i)] = gold[static_cast<std::size_t>(order[start + static_cast<std::size_t>(i)])];
      }

      MlpCache cache;
      const Matrix logits = mlp_forward_cached(res.model, xb, cache);
      CrossEntropy ce = cross_entropy(logits, yb);
      if (!std::isfinite(ce.loss)) {
        throw UserError("train_mlp: training diverged (non-finite loss) at epoch " +
                        std::to_string(epoch + 1) + ", batch starting at " + std::to_string(start));
      }
      loss_sum += ce.loss * static_cast<double>(bn);

      MlpGrads grads = MlpGrads::zeros_like(res.model);
      mlp_backward(res.model, cache, ce.dlogits, grads);
      opt.step(res.model.param_list(), grads.param_list());
    }
    res.epoch_loss.push_back(loss_sum / static_cast<double>(n));

    // end-of-epoch dynamics snapshot over the full training set
    const Matrix logits = res.model.forward(features);
    const Matrix probs = softmax_rows(logits);
    for (Eigen::Index i = 0; i < n; ++i) {
      DynamicsRow row;
      row.epoch = epoch + 1;
      row.id = ids[static_cast<std::size_t>(i)];
      row.gold_prob = probs(i, gold[static_cast<std::size_t>(i)]);
      row.correct = argmax_row(logits, i) == gold[static_cast<std::size_t>(i)];
      res.dynamics.push_back(std::move(row));
    }
  }
  return res;
}

}  // namespace spurprobe
