#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spurprobe {

// One line of the training-dynamics log:
// {"epoch": int, "id": str, "gold_prob": float, "correct": bool}
struct DynamicsRow {
  int epoch = 0;
  std::string id;
  double gold_prob = 0.0;
  bool correct = false;
};

void write_dynamics_jsonl(const std::vector<DynamicsRow>& rows, const std::filesystem::path& path);
std::vector<DynamicsRow> read_dynamics_jsonl(const std::filesystem::path& path);

// Per-example epoch sequences, ordered by epoch. Every example must cover
// the same epochs.
struct ExampleDynamics {
  std::string id;
  std::vector<double> gold_prob;
  std::vector<bool> correct;
};

std::vector<ExampleDynamics> group_dynamics(const std::vector<DynamicsRow>& rows);

}  // namespace spurprobe
