#include "fsec/sampling.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "fsec/error.hpp"

namespace fsec {

namespace {

constexpr int kMaxDrawAttempts = 1000;

}  // namespace

std::string to_string(SampleMethod method) {
  switch (method) {
    case SampleMethod::kIus: return "ius";
    case SampleMethod::kTus: return "tus";
    case SampleMethod::kCos: return "cos";
  }
  return "?";
}

SampleMethod parse_method(const std::string& name) {
  if (name == "ius" || name == "IUS") return SampleMethod::kIus;
  if (name == "tus" || name == "TUS") return SampleMethod::kTus;
  if (name == "cos" || name == "COS") return SampleMethod::kCos;
  throw Error("unknown sampling method: " + name + " (expected ius, tus, or cos)");
}

TriggerPartition partition_triggers(const std::string& event,
                                    const std::vector<std::string>& others,
                                    const Corpus& corpus, const EmbeddingTable& table,
                                    int top_u) {
  if (top_u < 1) throw Error("partition_triggers: U must be >= 1");
  if (others.empty()) throw Error("partition_triggers: need at least one other event");
  const EventBucket& bucket = corpus.event(event);
  std::vector<std::string> triggers;
  triggers.reserve(bucket.by_trigger.size());
  for (const auto& [form, ids] : bucket.by_trigger) {
    (void)ids;
    triggers.push_back(form);
  }
  if (triggers.empty()) throw Error("partition_triggers: event has no triggers: " + event);

  std::vector<std::span<const float>> emb(triggers.size());
  for (std::size_t i = 0; i < triggers.size(); ++i) emb[i] = table.lookup(triggers[i]);

  // Mean distance to the event's own triggers, self term included (zero).
  std::vector<double> d_inner(triggers.size(), 0.0);
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < triggers.size(); ++j) sum += l2_distance(emb[i], emb[j]);
    d_inner[i] = sum / static_cast<double>(triggers.size());
  }

  TriggerPartition out;
  std::set<std::string> confusing;
  for (const std::string& other : others) {
    const EventBucket& other_bucket = corpus.event(other);
    std::vector<std::span<const float>> other_emb;
    other_emb.reserve(other_bucket.by_trigger.size());
    for (const auto& [form, ids] : other_bucket.by_trigger) {
      (void)ids;
      other_emb.push_back(table.lookup(form));
    }
    std::vector<std::pair<double, std::size_t>> scored;  // (d_com, trigger index)
    scored.reserve(triggers.size());
    auto& score_map = out.scores_by_other[other];
    for (std::size_t i = 0; i < triggers.size(); ++i) {
      double sum = 0.0;
      for (const auto& oe : other_emb) sum += l2_distance(emb[i], oe);
      const double d_inter = sum / static_cast<double>(other_emb.size());
      const double d_com = -d_inner[i] + d_inter;
      score_map[triggers[i]] = TriggerScores{d_inner[i], d_inter, d_com};
      scored.emplace_back(d_com, i);
    }
    // Smallest combined distance first; ties by trigger form (the list is
    // sorted, so the index order is lexicographic).
    std::sort(scored.begin(), scored.end());
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(top_u), scored.size());
    for (std::size_t r = 0; r < take; ++r) confusing.insert(triggers[scored[r].second]);
  }

  out.confusing.assign(confusing.begin(), confusing.end());
  for (const std::string& t : triggers) {
    if (!confusing.count(t)) out.non_confusing.push_back(t);
  }
  return out;
}

EpisodeSampler::EpisodeSampler(const Corpus& corpus, SamplerConfig cfg, const EmbeddingTable* table)
    : corpus_(corpus), cfg_(cfg), table_(table) {
  if (cfg_.n_way < 1) throw Error("sampler: N must be >= 1");
  if (cfg_.k_shot < 1) throw Error("sampler: K must be >= 1");
  if (cfg_.cos_p < 0.0 || cfg_.cos_p > 1.0) throw Error("sampler: p must be in [0, 1]");
  if (cfg_.cos_u < 1) throw Error("sampler: U must be >= 1");
  if (cfg_.method == SampleMethod::kCos && table_ == nullptr) {
    throw Error("COS requires an embedding table");
  }
  for (const auto& [name, bucket] : corpus_.events()) {
    // Strictly more than K instances so a query disjoint from the support
    // always exists.
    if (bucket.instance_ids.size() > static_cast<std::size_t>(cfg_.k_shot)) {
      eligible_.push_back(name);
      std::vector<std::string> triggers;
      triggers.reserve(bucket.by_trigger.size());
      for (const auto& [form, ids] : bucket.by_trigger) {
        (void)ids;
        triggers.push_back(form);
      }
      trigger_lists_[name] = std::move(triggers);
    }
  }
  if (eligible_.size() < static_cast<std::size_t>(cfg_.n_way)) {
    throw Error("sampler: need " + std::to_string(cfg_.n_way) +
                " event types with more than " + std::to_string(cfg_.k_shot) +
                " instances, corpus has " + std::to_string(eligible_.size()));
  }
}

const TriggerPartition& EpisodeSampler::partition_for(const std::string& event,
                                                      const std::vector<std::string>& others) {
  std::vector<std::string> sorted_others = others;
  std::sort(sorted_others.begin(), sorted_others.end());
  std::string key = event;
  for (const std::string& o : sorted_others) {
    key.push_back('\x1f');
    key += o;
  }
  auto it = partition_memo_.find(key);
  if (it != partition_memo_.end()) return it->second;
  TriggerPartition part = partition_triggers(event, sorted_others, corpus_, *table_, cfg_.cos_u);
  return partition_memo_.emplace(std::move(key), std::move(part)).first->second;
}

std::vector<int> EpisodeSampler::draw_support_row(const std::string& event,
                                                  const std::vector<std::string>& all_events,
                                                  Rng& rng) {
  const EventBucket& bucket = corpus_.event(event);
  const std::size_t k = static_cast<std::size_t>(cfg_.k_shot);

  if (cfg_.method == SampleMethod::kIus) {
    return rng.sample_without_replacement(bucket.instance_ids, k);
  }

  const std::vector<std::string>& triggers = trigger_lists_.at(event);
  std::vector<int> row;
  row.reserve(k);
  std::unordered_set<int> chosen;
  auto draw_instance_for = [&](const std::string& trigger) -> int {
    const std::vector<int>& ids = bucket.by_trigger.at(trigger);
    return ids[rng.uniform_index(ids.size())];
  };

  if (cfg_.method == SampleMethod::kTus) {
    if (triggers.size() >= k) {
      // Without replacement: distinct triggers give distinct instances.
      for (const std::string& t : rng.sample_without_replacement(triggers, k)) {
        const int id = draw_instance_for(t);
        row.push_back(id);
        chosen.insert(id);
      }
      return row;
    }
    // Trigger-poor event: fall back to with-replacement trigger draws and
    // reject instance collisions.
    for (std::size_t shot = 0; shot < k; ++shot) {
      int attempts = 0;
      for (;;) {
        if (++attempts > kMaxDrawAttempts) throw Error("cannot draw disjoint support");
        const std::string& t = triggers[rng.uniform_index(triggers.size())];
        const int id = draw_instance_for(t);
        if (chosen.insert(id).second) {
          row.push_back(id);
          break;
        }
      }
    }
    return row;
  }

  // COS: per-draw choice between the confusing and non-confusing sets.
  std::vector<std::string> others;
  others.reserve(all_events.size() - 1);
  for (const std::string& e : all_events) {
    if (e != event) others.push_back(e);
  }
  const TriggerPartition& part = partition_for(event, others);
  for (std::size_t shot = 0; shot < k; ++shot) {
    int attempts = 0;
    for (;;) {
      if (++attempts > kMaxDrawAttempts) throw Error("cannot draw disjoint support");
      const bool want_confusing = rng.bernoulli(cfg_.cos_p);
      const std::vector<std::string>* set = want_confusing ? &part.confusing : &part.non_confusing;
      const std::vector<std::string>* fallback = want_confusing ? &part.non_confusing : &part.confusing;
      if (set->empty()) set = fallback;
      const std::string& t = (*set)[rng.uniform_index(set->size())];
      const int id = draw_instance_for(t);
      if (chosen.insert(id).second) {
        row.push_back(id);
        break;
      }
    }
  }
  return row;
}

int EpisodeSampler::draw_query(const MetaTask& task, Rng& rng) {
  const std::string& event = task.event_types[static_cast<std::size_t>(task.gold_index)];
  const EventBucket& bucket = corpus_.event(event);

  if (cfg_.method == SampleMethod::kIus) {
    const std::vector<int>& gold_row = task.support[static_cast<std::size_t>(task.gold_index)];
    std::vector<int> row_sorted = gold_row;
    std::sort(row_sorted.begin(), row_sorted.end());
    std::vector<int> candidates;
    candidates.reserve(bucket.instance_ids.size() - row_sorted.size());
    std::set_difference(bucket.instance_ids.begin(), bucket.instance_ids.end(),
                        row_sorted.begin(), row_sorted.end(), std::back_inserter(candidates));
    if (candidates.empty()) throw Error("cannot draw disjoint query");
    return candidates[rng.uniform_index(candidates.size())];
  }

  std::unordered_set<int> support_ids;
  for (const auto& row : task.support) support_ids.insert(row.begin(), row.end());

  const std::vector<std::string>& triggers = trigger_lists_.at(event);
  const TriggerPartition* part = nullptr;
  if (cfg_.method == SampleMethod::kCos && cfg_.cos_query_confusing) {
    std::vector<std::string> others;
    for (const std::string& e : task.event_types) {
      if (e != event) others.push_back(e);
    }
    part = &partition_for(event, others);
  }

  int attempts = 0;
  for (;;) {
    if (++attempts > kMaxDrawAttempts) throw Error("cannot draw disjoint query");
    const std::string* trigger = nullptr;
    if (part != nullptr) {
      const bool want_confusing = rng.bernoulli(cfg_.cos_p);
      const std::vector<std::string>* set = want_confusing ? &part->confusing : &part->non_confusing;
      const std::vector<std::string>* fallback = want_confusing ? &part->non_confusing : &part->confusing;
      if (set->empty()) set = fallback;
      trigger = &(*set)[rng.uniform_index(set->size())];
    } else {
      trigger = &triggers[rng.uniform_index(triggers.size())];
    }
    const std::vector<int>& ids = bucket.by_trigger.at(*trigger);
    const int id = ids[rng.uniform_index(ids.size())];
    if (!support_ids.count(id)) return id;
  }
}

MetaTask EpisodeSampler::sample(Rng& rng) {
  MetaTask task;
  task.event_types = rng.sample_without_replacement(eligible_, static_cast<std::size_t>(cfg_.n_way));
  task.support.reserve(task.event_types.size());
  for (const std::string& event : task.event_types) {
    task.support.push_back(draw_support_row(event, task.event_types, rng));
  }
  task.gold_index = static_cast<int>(rng.uniform_index(task.event_types.size()));
  task.query = draw_query(task, rng);
  return task;
}

MetaTask sample_ius(const Corpus& corpus, const SamplerConfig& cfg, Rng& rng) {
  SamplerConfig c = cfg;
  c.method = SampleMethod::kIus;
  return EpisodeSampler(corpus, c).sample(rng);
}

MetaTask sample_tus(const Corpus& corpus, const SamplerConfig& cfg, Rng& rng) {
  SamplerConfig c = cfg;
  c.method = SampleMethod::kTus;
  return EpisodeSampler(corpus, c).sample(rng);
}

MetaTask sample_cos(const Corpus& corpus, const SamplerConfig& cfg, const EmbeddingTable& table,
                    Rng& rng) {
  SamplerConfig c = cfg;
  c.method = SampleMethod::kCos;
  return EpisodeSampler(corpus, c, &table).sample(rng);
}

void validate_task(const Corpus& corpus, const MetaTask& task) {
  const std::size_t n = task.event_types.size();
  if (n == 0) throw Error("task: no event types");
  if (task.support.size() != n) throw Error("task: support row count mismatch");
  if (task.gold_index < 0 || static_cast<std::size_t>(task.gold_index) >= n) {
    throw Error("task: gold index out of range");
  }
  std::set<std::string> distinct_events(task.event_types.begin(), task.event_types.end());
  if (distinct_events.size() != n) throw Error("task: duplicate event types");

  std::unordered_set<int> seen;
  const std::size_t k = task.support.empty() ? 0 : task.support[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (task.support[i].size() != k) throw Error("task: ragged support rows");
    for (int id : task.support[i]) {
      if (!seen.insert(id).second) throw Error("task: duplicate support instance");
      if (corpus.instance(id).event_type != task.event_types[i]) {
        throw Error("task: support label mismatch in row " + std::to_string(i));
      }
    }
  }
  if (seen.count(task.query)) throw Error("task: query appears in support");
  if (corpus.instance(task.query).event_type !=
      task.event_types[static_cast<std::size_t>(task.gold_index)]) {
    throw Error("task: query label does not match gold event type");
  }
}

}  // namespace fsec
