#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spurprobe {

enum class LabelScheme { three_class, two_class };

// three_class: 0 entailment, 1 neutral, 2 contradiction.
// two_class:   0 entailment, 1 non_entailment.
inline constexpr int kEntailment = 0;
inline constexpr int kNeutral = 1;
inline constexpr int kContradiction = 2;
inline constexpr int kNonEntailment = 1;

enum class Heuristic { lexical_overlap, subsequence, constituent };

std::string label_name(LabelScheme scheme, int label);
int parse_label(LabelScheme scheme, const std::string& name);  // throws UserError
std::string heuristic_name(Heuristic h);
Heuristic parse_heuristic(const std::string& name);
std::string scheme_name(LabelScheme scheme);
LabelScheme parse_scheme(const std::string& name);
int num_classes(LabelScheme scheme);

struct Example {
  std::string id;
  std::string premise;
  std::string hypothesis;
  int label = 0;
  std::optional<Heuristic> heuristic;
};

// Immutable after construction; iteration order is file order.
struct Corpus {
  std::string name;
  LabelScheme scheme = LabelScheme::three_class;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
};

// One JSON object per line: id/premise/hypothesis/label, optional heuristic.
Corpus ingest_corpus(const std::filesystem::path& path, LabelScheme scheme);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Tab-separated (premise, hypothesis, label[, heuristic]) with a header row;
// ids are generated sequentially since the TSV carries none.
Corpus convert_tsv(const std::filesystem::path& path, LabelScheme scheme);

// Row-major float32 storage, matching the on-disk payload exactly.
struct EmbeddingMatrix {
  std::vector<std::string> ids;
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> data;

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index cols() const { return data.cols(); }
};

// Binary format: "EMB1" + u32le rows + u32le cols + rows*cols float32le,
// row-major. Sidecar "<stem>.ids" holds one id per line.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);

// (Example, vector) pairs in corpus order. Holds references; keep the corpus
// and matrix alive while using the view.
struct JoinedView {
  const Corpus* corpus = nullptr;
  const EmbeddingMatrix* emb = nullptr;
  std::vector<Eigen::Index> row_of;  // row in emb for each corpus example

  std::size_t size() const { return row_of.size(); }
  const Example& example(std::size_t i) const { return corpus->examples[i]; }
  auto vector(std::size_t i) const { return emb->data.row(row_of[i]); }

  // Corpus-aligned feature matrix widened to double for computation.
  Eigen::MatrixXd gather() const;
};

JoinedView join(const Corpus& corpus, const EmbeddingMatrix& m);

}  // namespace spurprobe
