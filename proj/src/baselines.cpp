#include "fsec/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "fsec/error.hpp"

namespace fsec {

std::vector<double> prototype(const std::vector<std::vector<double>>& representations) {
  if (representations.empty()) throw Error("prototype: empty representation list");
  const std::size_t dim = representations[0].size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& r : representations) {
    if (r.size() != dim) throw Error("prototype: representation length mismatch");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += r[i];
  }
  const double inv = 1.0 / static_cast<double>(representations.size());
  for (double& v : mean) v *= inv;
  return mean;
}

std::vector<double> proto_probabilities(const std::vector<double>& query_repr,
                                        const std::vector<std::vector<double>>& prototypes) {
  if (prototypes.empty()) throw Error("proto_probabilities: no prototypes");
  std::vector<double> dist(prototypes.size());
  for (std::size_t k = 0; k < prototypes.size(); ++k) {
    if (prototypes[k].size() != query_repr.size()) {
      throw Error("proto_probabilities: dimension mismatch");
    }
    dist[k] = l2_distance(std::span<const double>(query_repr), std::span<const double>(prototypes[k]));
  }
  const double shift = *std::min_element(dist.begin(), dist.end());
  std::vector<double> probs(dist.size());
  double z = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    probs[k] = std::exp(-(dist[k] - shift));
    z += probs[k];
  }
  for (double& p : probs) p /= z;
  return probs;
}

Prediction string_match_predict(const Corpus& corpus, const MetaTask& task, Rng& rng) {
  const std::string& query_form = corpus.trigger_form(task.query);
  std::vector<int> overlapped;
  for (std::size_t i = 0; i < task.support.size(); ++i) {
    for (int id : task.support[i]) {
      if (corpus.trigger_form(id) == query_form) {
        overlapped.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  Prediction pred;
  if (overlapped.empty()) {
    pred.label_index = static_cast<int>(rng.uniform_index(task.support.size()));
  } else {
    pred.label_index = overlapped[rng.uniform_index(overlapped.size())];
  }
  return pred;
}

Prediction glove_match_predict(const Corpus& corpus, const MetaTask& task,
                               const EmbeddingTable& table) {
  auto trigger_repr = [&](int id) {
    const auto span = table.lookup(corpus.trigger_form(id));
    return std::vector<double>(span.begin(), span.end());
  };
  std::vector<std::vector<double>> prototypes;
  prototypes.reserve(task.support.size());
  for (const auto& row : task.support) {
    std::vector<std::vector<double>> reprs;
    reprs.reserve(row.size());
    for (int id : row) reprs.push_back(trigger_repr(id));
    prototypes.push_back(prototype(reprs));
  }
  Prediction pred;
  pred.probabilities = proto_probabilities(trigger_repr(task.query), prototypes);
  const auto& probs = *pred.probabilities;
  pred.label_index =
      static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  return pred;
}

}  // namespace fsec
