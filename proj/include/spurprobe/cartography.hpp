#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spurprobe/dynamics.hpp"

namespace spurprobe {

struct CartographyPoint {
  std::string id;
  double confidence = 0.0;   // mean gold-class probability over epochs
  double variability = 0.0;  // population std of gold-class probability
  double correctness = 0.0;  // fraction of epochs predicted correctly
};

std::vector<CartographyPoint> compute_map(const std::vector<ExampleDynamics>& log);

enum class RankKey { confidence_asc, confidence_desc, variability_desc };

// Stable total order; ties broken by lexicographic id.
std::vector<std::string> rank(const std::vector<CartographyPoint>& points, RankKey key);

struct Partition {
  // hard: lowest confidence first; ambiguous: highest variability first;
  // easy: highest confidence first. Disjoint, covering all ids.
  std::vector<std::string> easy;
  std::vector<std::string> ambiguous;
  std::vector<std::string> hard;
  double hard_q = 0.0;
  double ambiguous_q = 0.0;
  double hard_confidence_max = 0.0;        // confidence of the least-hard hard example
  double ambiguous_variability_min = 0.0;  // variability of the least-ambiguous ambiguous example
};

// hard = bottom floor(n*hard_q) by confidence; ambiguous = top
// floor(n*ambiguous_q) by variability among the remainder; easy = the rest.
// easy_q is accepted for symmetry and validated, but easy always absorbs the
// remainder so the three lists cover every id.
Partition partition(const std::vector<CartographyPoint>& points, double easy_q, double hard_q,
                    double ambiguous_q);

enum class CurriculumSource { hard, ambiguous };

struct CurriculumSchedule {
  double easy_fraction = 0.25;
  int easy_epochs = 2;
  std::vector<double> hard_fractions = {0.01, 0.05, 0.10, 0.17, 0.25, 0.33, 0.50, 0.75};
  CurriculumSource source = CurriculumSource::hard;
};

struct CurriculumPhase {
  int index = 0;
  std::string source;     // "easy", "hard" or "ambiguous"
  double fraction = 0.0;  // of the source category
  int passes = 1;
  bool truncated = false;  // requested fraction floored to zero ids
  std::vector<std::string> ids;  // full multiset: one entry per presentation
};

// Phase 0: top easy_fraction of easy ids repeated easy_epochs times. Phases
// 1..k: cumulative top hard_fractions[i] of the chosen source, hardest first.
std::vector<CurriculumPhase> curriculum_order(const Partition& part,
                                              const CurriculumSchedule& schedule);

// id,confidence,variability,correctness with RFC4180-style quoting for ids.
void write_map_csv(const std::vector<CartographyPoint>& points, const std::filesystem::path& path);
std::vector<CartographyPoint> read_map_csv(const std::filesystem::path& path);

void write_partition_json(const Partition& part, const std::filesystem::path& path);
Partition read_partition_json(const std::filesystem::path& path);

void write_schedule_json(const std::vector<CurriculumPhase>& phases,
                         const std::filesystem::path& path);

}  // namespace spurprobe
