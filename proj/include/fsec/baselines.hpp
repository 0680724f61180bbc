#pragma once

#include <optional>
#include <vector>

#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"
#include "fsec/rng.hpp"
#include "fsec/sampling.hpp"

namespace fsec {

struct Prediction {
  int label_index = -1;
  // When present: nonnegative, sums to 1, and label_index is the argmax.
  std::optional<std::vector<double>> probabilities;
};

// Elementwise mean of the K representations.
std::vector<double> prototype(const std::vector<std::vector<double>>& representations);

// Softmax over negative L2 distances to the prototypes, max-shifted.
std::vector<double> proto_probabilities(const std::vector<double>& query_repr,
                                        const std::vector<std::vector<double>>& prototypes);

// Predicts from trigger forms alone: a uniformly random event among those
// whose support contains the query's trigger form, or uniform over all N when
// no form overlaps.
Prediction string_match_predict(const Corpus& corpus, const MetaTask& task, Rng& rng);

// Nearest-prototype over trigger embeddings only; deterministic, exact ties
// resolved by lowest event index.
Prediction glove_match_predict(const Corpus& corpus, const MetaTask& task,
                               const EmbeddingTable& table);

}  // namespace fsec
