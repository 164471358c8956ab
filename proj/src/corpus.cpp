#include "spurprobe/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "spurprobe/errors.hpp"
#include "json.hpp"

namespace spurprobe {

using json = nlohmann::json;

std::string label_name(LabelScheme scheme, int label) {
  if (scheme == LabelScheme::three_class) {
    switch (label) {
      case kEntailment: return "entailment";
      case kNeutral: return "neutral";
      case kContradiction: return "contradiction";
    }
  } else {
    switch (label) {
      case kEntailment: return "entailment";
      case kNonEntailment: return "non_entailment";
    }
  }
  throw UserError("label index " + std::to_string(label) + " out of range for scheme " +
                  scheme_name(scheme));
}

namespace {

std::string normalize_label(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

}  // namespace

int parse_label(LabelScheme scheme, const std::string& name) {
  const std::string s = normalize_label(name);
  if (scheme == LabelScheme::three_class) {
    if (s == "entailment") return kEntailment;
    if (s == "neutral") return kNeutral;
    if (s == "contradiction") return kContradiction;
  } else {
    if (s == "entailment") return kEntailment;
    if (s == "non_entailment") return kNonEntailment;
  }
  throw UserError("label \"" + name + "\" not in scheme " + scheme_name(scheme));
}

std::string heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::lexical_overlap: return "lexical_overlap";
    case Heuristic::subsequence: return "subsequence";
    case Heuristic::constituent: return "constituent";
  }
  throw std::logic_error("bad heuristic enum");
}

Heuristic parse_heuristic(const std::string& name) {
  const std::string s = normalize_label(name);
  if (s == "lexical_overlap") return Heuristic::lexical_overlap;
  if (s == "subsequence") return Heuristic::subsequence;
  if (s == "constituent") return Heuristic::constituent;
  throw UserError("unknown heuristic \"" + name + "\"");
}

std::string scheme_name(LabelScheme scheme) {
  return scheme == LabelScheme::three_class ? "three_class" : "two_class";
}

LabelScheme parse_scheme(const std::string& name) {
  const std::string s = normalize_label(name);
  if (s == "three_class") return LabelScheme::three_class;
  if (s == "two_class") return LabelScheme::two_class;
  throw UserError("unknown label scheme \"" + name + "\" (expected three_class or two_class)");
}

int num_classes(LabelScheme scheme) {
  return scheme == LabelScheme::three_class ? 3 : 2;
}

namespace {

Example parse_example_line(const std::string& line, LabelScheme scheme, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw UserError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw UserError("line " + std::to_string(line_no) + ": expected a JSON object");
  }
  Example ex;
  try {
    ex.id = j.at("id").get<std::string>();
    ex.premise = j.at("premise").get<std::string>();
    ex.hypothesis = j.at("hypothesis").get<std::string>();
    ex.label = parse_label(scheme, j.at("label").get<std::string>());
  } catch (const json::exception& e) {
    throw UserError("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (ex.id.empty()) {
    throw UserError("line " + std::to_string(line_no) + ": empty id");
  }
  if (ex.premise.empty() || ex.hypothesis.empty()) {
    throw UserError("line " + std::to_string(line_no) + ": empty premise or hypothesis (id \"" +
                    ex.id + "\")");
  }
  if (j.contains("heuristic") && !j["heuristic"].is_null()) {
    if (scheme == LabelScheme::three_class) {
      throw UserError("line " + std::to_string(line_no) +
                      ": heuristic tag not allowed under three_class (id \"" + ex.id + "\")");
    }
    ex.heuristic = parse_heuristic(j["heuristic"].get<std::string>());
  }
  return ex;
}

}  // namespace

Corpus ingest_corpus(const std::filesystem::path& path, LabelScheme scheme) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open corpus file " + path.string());

  Corpus corpus;
  corpus.name = path.stem().string();
  corpus.scheme = scheme;

  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Example ex = parse_example_line(line, scheme, line_no);
    if (!seen.insert(ex.id).second) {
      throw UserError("line " + std::to_string(line_no) + ": duplicate id \"" + ex.id + "\"");
    }
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write corpus file " + path.string());
  for (const Example& ex : corpus.examples) {
    json j;
    j["id"] = ex.id;
    j["premise"] = ex.premise;
    j["hypothesis"] = ex.hypothesis;
    j["label"] = label_name(corpus.scheme, ex.label);
    if (ex.heuristic) j["heuristic"] = heuristic_name(*ex.heuristic);
    out << j.dump() << '\n';
  }
  if (!out) throw UserError("I/O failure writing " + path.string());
}

Corpus convert_tsv(const std::filesystem::path& path, LabelScheme scheme) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open TSV file " + path.string());

  Corpus corpus;
  corpus.name = path.stem().string();
  corpus.scheme = scheme;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) continue;  // header row
    if (line.empty()) continue;

    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 3 || cols.size() > 4) {
      throw UserError("line " + std::to_string(line_no) + ": expected 3 or 4 tab-separated " +
                      "columns, got " + std::to_string(cols.size()));
    }

    Example ex;
    char buf[16];
    std::snprintf(buf, sizeof buf, "ex%06zu", line_no - 1);
    ex.id = buf;
    ex.premise = cols[0];
    ex.hypothesis = cols[1];
    ex.label = parse_label(scheme, cols[2]);
    if (ex.premise.empty() || ex.hypothesis.empty()) {
      throw UserError("line " + std::to_string(line_no) + ": empty premise or hypothesis");
    }
    if (cols.size() == 4 && !cols[3].empty()) {
      if (scheme == LabelScheme::three_class) {
        throw UserError("line " + std::to_string(line_no) +
                        ": heuristic column not allowed under three_class");
      }
      ex.heuristic = parse_heuristic(cols[3]);
    }
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// EMB1 binary embedding files
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p.replace_extension(".ids");
  return p;
}

}  // namespace

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  if (static_cast<std::size_t>(m.rows()) != m.ids.size()) {
    throw UserError("embedding matrix has " + std::to_string(m.rows()) + " rows but " +
                    std::to_string(m.ids.size()) + " ids");
  }
  std::string buf;
  buf.reserve(12 + static_cast<std::size_t>(m.rows()) * m.cols() * 4);
  buf.append(kMagic, 4);
  put_u32le(buf, static_cast<std::uint32_t>(m.rows()));
  put_u32le(buf, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_u32le(buf, std::bit_cast<std::uint32_t>(m.data(r, c)));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write embedding file " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw UserError("I/O failure writing " + path.string());

  std::ofstream ids(sidecar_path(path), std::ios::binary);
  if (!ids) throw UserError("cannot write id sidecar for " + path.string());
  for (const std::string& id : m.ids) ids << id << '\n';
  if (!ids) throw UserError("I/O failure writing id sidecar for " + path.string());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open embedding file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || bytes.compare(0, 4, kMagic, 4) != 0) {
    throw UserError("embedding file " + path.string() + ": magic mismatch (want \"EMB1\")");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t n = get_u32le(p + 4);
  const std::uint32_t d = get_u32le(p + 8);
  const std::size_t payload = static_cast<std::size_t>(n) * d * 4;
  if (bytes.size() != 12 + payload) {
    throw UserError("embedding file " + path.string() + ": size mismatch, header says " +
                    std::to_string(n) + "x" + std::to_string(d) + " (" +
                    std::to_string(12 + payload) + " bytes) but file has " +
                    std::to_string(bytes.size()));
  }

  EmbeddingMatrix m;
  m.data.resize(n, d);
  const unsigned char* q = p + 12;
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t c = 0; c < d; ++c, q += 4) {
      const float v = std::bit_cast<float>(get_u32le(q));
      if (!std::isfinite(v)) {
        throw UserError("embedding file " + path.string() + ": non-finite value at row " +
                        std::to_string(r) + " col " + std::to_string(c));
      }
      m.data(r, c) = v;
    }
  }

  const std::filesystem::path ids_path = sidecar_path(path);
  std::ifstream ids_in(ids_path, std::ios::binary);
  if (!ids_in) throw UserError("cannot open id sidecar " + ids_path.string());
  std::string line;
  while (std::getline(ids_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    m.ids.push_back(line);
  }
  if (m.ids.size() != n) {
    throw UserError("id sidecar " + ids_path.string() + " has " + std::to_string(m.ids.size()) +
                    " ids, expected " + std::to_string(n));
  }
  return m;
}

Eigen::MatrixXd JoinedView::gather() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(row_of.size()), emb->cols());
  for (std::size_t i = 0; i < row_of.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = emb->data.row(row_of[i]).cast<double>();
  }
  return out;
}

JoinedView join(const Corpus& corpus, const EmbeddingMatrix& m) {
  std::unordered_map<std::string, Eigen::Index> index;
  index.reserve(m.ids.size());
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    index.emplace(m.ids[i], static_cast<Eigen::Index>(i));
  }
  JoinedView view;
  view.corpus = &corpus;
  view.emb = &m;
  view.row_of.reserve(corpus.size());
  for (const Example& ex : corpus.examples) {
    auto it = index.find(ex.id);
    if (it == index.end()) {
      throw UserError("id \"" + ex.id + "\" missing from embedding matrix");
    }
    view.row_of.push_back(it->second);
  }
  return view;
}

}  // namespace spurprobe
