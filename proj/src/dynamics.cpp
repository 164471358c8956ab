#include "spurprobe/dynamics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "spurprobe/errors.hpp"
#include "json.hpp"

namespace spurprobe {

using json = nlohmann::json;

void write_dynamics_jsonl(const std::vector<DynamicsRow>& rows,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write dynamics log " + path.string());
  for (const DynamicsRow& r : rows) {
    json j;
    j["epoch"] = r.epoch;
    j["id"] = r.id;
    j["gold_prob"] = r.gold_prob;
    j["correct"] = r.correct;
    out << j.dump() << '\n';
  }
  if (!out) throw UserError("I/O failure writing " + path.string());
}

std::vector<DynamicsRow> read_dynamics_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open dynamics log " + path.string());
  std::vector<DynamicsRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      DynamicsRow r;
      r.epoch = j.at("epoch").get<int>();
      r.id = j.at("id").get<std::string>();
      r.gold_prob = j.at("gold_prob").get<double>();
      r.correct = j.at("correct").get<bool>();
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw UserError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<ExampleDynamics> group_dynamics(const std::vector<DynamicsRow>& rows) {
  // first-appearance order for ids, epochs sorted within each id
  std::vector<ExampleDynamics> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<int, std::pair<double, bool>>>> buckets;
  for (const DynamicsRow& r : rows) {
    auto [it, inserted] = index.emplace(r.id, out.size());
    if (inserted) {
      out.push_back(ExampleDynamics{r.id, {}, {}});
      buckets.emplace_back();
    }
    buckets[it->second].push_back({r.epoch, {r.gold_prob, r.correct}});
  }
  std::size_t epochs = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& b = buckets[i];
    std::stable_sort(b.begin(), b.end(),
                     [](const auto& a, const auto& c) { return a.first < c.first; });
    if (i == 0) {
      epochs = b.size();
    } else if (b.size() != epochs) {
      throw UserError("dynamics log: id \"" + out[i].id + "\" has " +
                      std::to_string(b.size()) + " epochs, expected " + std::to_string(epochs));
    }
    for (const auto& [epoch, pc] : b) {
      const auto [prob, correct] = pc;
      if (prob < 0.0 || prob > 1.0) {
        throw UserError("dynamics log: id \"" + out[i].id + "\" has gold_prob outside [0,1]");
      }
      out[i].gold_prob.push_back(prob);
      out[i].correct.push_back(correct);
    }
  }
  if (!out.empty() && epochs == 0) {
    throw UserError("dynamics log: zero epochs");
  }
  return out;
}

}  // namespace spurprobe
