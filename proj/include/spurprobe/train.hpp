#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spurprobe/adamw.hpp"
#include "spurprobe/dynamics.hpp"
#include "spurprobe/mlp.hpp"

namespace spurprobe {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  std::vector<Eigen::Index> hidden = {512};
  int adapter_reduction = 0;  // 0 = no adapter; >0 inserts one after the first hidden layer
  AdamWConfig opt;
};

struct TrainResult {
  Mlp model;
  std::vector<DynamicsRow> dynamics;  // one row per (epoch, example), epochs 1-based
  std::vector<double> epoch_loss;
};

// Deterministic given the seed: fixed init, per-epoch shuffle seeded with
// seed+epoch. After each epoch the whole training set is scored once and the
// gold-class probability of every example is logged.
TrainResult train_mlp(const TrainConfig& cfg, const Matrix& features, const std::vector<int>& gold,
                      int num_classes, const std::vector<std::string>& ids, std::uint64_t seed);

std::vector<int> predict_classes(const Mlp& model, const Matrix& features);
double accuracy(const std::vector<int>& pred, const std::vector<int>& gold);

// First index of the row maximum; explicit loop so tie-breaking (lowest
// index) never depends on Eigen traversal order.
int argmax_row(const Matrix& m, Eigen::Index row);

}  // namespace spurprobe
