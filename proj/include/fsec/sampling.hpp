#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"
#include "fsec/rng.hpp"

namespace fsec {

enum class SampleMethod { kIus, kTus, kCos };

std::string to_string(SampleMethod method);
SampleMethod parse_method(const std::string& name);

struct SamplerConfig {
  int n_way = 5;
  int k_shot = 5;
  SampleMethod method = SampleMethod::kIus;
  double cos_p = 1.0;
  int cos_u = 6;
  std::uint64_t seed = 0;
  // Whether the query-side draw mirrors the support-side confusing rule.
  bool cos_query_confusing = true;
};

// One N-way-K-shot episode. Holds instance ids into the corpus it was
// sampled from; support row i carries label event_types[i].
struct MetaTask {
  std::vector<std::string> event_types;
  std::vector<std::vector<int>> support;  // N rows of K ids
  int query = -1;
  int gold_index = -1;
};

struct TriggerScores {
  double d_inner = 0.0;
  double d_inter = 0.0;
  double d_com = 0.0;  // = -d_inner + d_inter
};

struct TriggerPartition {
  std::vector<std::string> confusing;      // sorted
  std::vector<std::string> non_confusing;  // sorted
  // other event -> trigger form -> scores from that pass
  std::map<std::string, std::map<std::string, TriggerScores>> scores_by_other;
};

// Splits an event's triggers into confusing and non-confusing sets against
// the other events of a task. For each other event, the U triggers with the
// smallest combined distance (mean embedding distance to the other event's
// triggers minus mean distance within the event's own triggers) are marked
// confusing; the final confusing set is the union over the other events.
TriggerPartition partition_triggers(const std::string& event,
                                    const std::vector<std::string>& others,
                                    const Corpus& corpus, const EmbeddingTable& table,
                                    int top_u);

// Episode construction under one of the three schemes. Deterministic given
// (corpus, config, rng state); partitions are memoized per event combination
// since they do not depend on the rng.
class EpisodeSampler {
 public:
  EpisodeSampler(const Corpus& corpus, SamplerConfig cfg, const EmbeddingTable* table = nullptr);

  MetaTask sample(Rng& rng);

  const std::vector<std::string>& eligible_events() const { return eligible_; }
  const SamplerConfig& config() const { return cfg_; }
  const TriggerPartition& partition_for(const std::string& event,
                                        const std::vector<std::string>& others);

 private:
  std::vector<int> draw_support_row(const std::string& event, const std::vector<std::string>& all_events, Rng& rng);
  int draw_query(const MetaTask& task, Rng& rng);

  const Corpus& corpus_;
  SamplerConfig cfg_;
  const EmbeddingTable* table_;
  std::vector<std::string> eligible_;
  std::map<std::string, std::vector<std::string>> trigger_lists_;
  std::unordered_map<std::string, TriggerPartition> partition_memo_;
};

// One-shot conveniences over a fresh sampler.
MetaTask sample_ius(const Corpus& corpus, const SamplerConfig& cfg, Rng& rng);
MetaTask sample_tus(const Corpus& corpus, const SamplerConfig& cfg, Rng& rng);
MetaTask sample_cos(const Corpus& corpus, const SamplerConfig& cfg, const EmbeddingTable& table, Rng& rng);

// Throws if the task violates its invariants (distinct support, disjoint
// query, labels consistent with rows).
void validate_task(const Corpus& corpus, const MetaTask& task);

}  // namespace fsec
