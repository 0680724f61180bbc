#include "fsec/bias_stats.hpp"

#include <algorithm>
#include <set>

#include "fsec/error.hpp"

namespace fsec {

namespace {

// (form, count) by count descending, form ascending. by_trigger iterates in
// form order, so a stable sort on count keeps the lexicographic tie-break.
std::vector<std::pair<std::string, int>> ranked_triggers(const EventBucket& bucket) {
  std::vector<std::pair<std::string, int>> ranked;
  ranked.reserve(bucket.by_trigger.size());
  for (const auto& [form, ids] : bucket.by_trigger) {
    ranked.emplace_back(form, static_cast<int>(ids.size()));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

}  // namespace

EventTriggerStats event_trigger_stats(const Corpus& corpus, int top_m) {
  if (corpus.empty()) throw Error("event_trigger_stats: empty corpus");
  if (top_m < 1) throw Error("event_trigger_stats: top_m must be >= 1");
  EventTriggerStats stats;
  stats.top_m = top_m;
  stats.n_event_types = static_cast<int>(corpus.events().size());
  double trigger_sum = 0.0;
  double fraction_sum = 0.0;
  for (const auto& [name, bucket] : corpus.events()) {
    (void)name;
    const auto ranked = ranked_triggers(bucket);
    trigger_sum += static_cast<double>(ranked.size());
    std::int64_t covered = 0;
    for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(top_m); ++i) {
      covered += ranked[i].second;
    }
    fraction_sum += static_cast<double>(covered) / static_cast<double>(bucket.instance_ids.size());
  }
  stats.avg_triggers_per_event = trigger_sum / static_cast<double>(stats.n_event_types);
  stats.avg_topm_instance_fraction = fraction_sum / static_cast<double>(stats.n_event_types);
  return stats;
}

TriggerEventStats trigger_event_stats(const Corpus& corpus, int top_m,
                                      const std::vector<int>& top_x) {
  if (corpus.empty()) throw Error("trigger_event_stats: empty corpus");
  if (top_m < 1) throw Error("trigger_event_stats: top_m must be >= 1");
  for (int x : top_x) {
    if (x < 1) throw Error("trigger_event_stats: top_x values must be >= 1");
  }

  // The distinct forms appearing in some event's top-M list.
  std::set<std::string> collected;
  for (const auto& [name, bucket] : corpus.events()) {
    (void)name;
    const auto ranked = ranked_triggers(bucket);
    for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(top_m); ++i) {
      collected.insert(ranked[i].first);
    }
  }

  // Corpus-wide per-event counts for each collected form.
  std::map<std::string, std::vector<int>> counts_by_form;  // descending counts
  for (const std::string& form : collected) {
    std::vector<int> counts;
    for (const auto& [name, bucket] : corpus.events()) {
      (void)name;
      auto it = bucket.by_trigger.find(form);
      if (it != bucket.by_trigger.end()) counts.push_back(static_cast<int>(it->second.size()));
    }
    std::sort(counts.begin(), counts.end(), std::greater<int>());
    counts_by_form.emplace(form, std::move(counts));
  }

  TriggerEventStats stats;
  stats.n_triggers = static_cast<int>(collected.size());
  stats.top_x = top_x;
  stats.topx_fractions.assign(top_x.size(), 0.0);

  auto fraction_for = [](const std::vector<int>& counts, int x) {
    std::int64_t total = 0;
    std::int64_t covered = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      total += counts[i];
      if (i < static_cast<std::size_t>(x)) covered += counts[i];
    }
    return static_cast<double>(covered) / static_cast<double>(total);
  };

  double events_sum = 0.0;
  double top1_sum = 0.0;
  double top2_sum = 0.0;
  for (const auto& [form, counts] : counts_by_form) {
    (void)form;
    events_sum += static_cast<double>(counts.size());
    top1_sum += fraction_for(counts, 1);
    top2_sum += fraction_for(counts, 2);
    for (std::size_t i = 0; i < top_x.size(); ++i) {
      stats.topx_fractions[i] += fraction_for(counts, top_x[i]);
    }
  }
  const double n = static_cast<double>(stats.n_triggers);
  stats.avg_events_per_top_trigger = events_sum / n;
  stats.top1_fraction = top1_sum / n;
  stats.top2_fraction = top2_sum / n;
  for (double& f : stats.topx_fractions) f /= n;
  return stats;
}

std::pair<std::int64_t, std::int64_t> count_trigger_overlap(const Corpus& corpus,
                                                            const std::vector<MetaTask>& tasks) {
  std::int64_t overlapping = 0;
  for (const MetaTask& task : tasks) {
    const std::string& query_form = corpus.trigger_form(task.query);
    bool overlap = false;
    for (const auto& row : task.support) {
      for (int id : row) {
        if (corpus.trigger_form(id) == query_form) {
          overlap = true;
          break;
        }
      }
      if (overlap) break;
    }
    if (overlap) ++overlapping;
  }
  return {overlapping, static_cast<std::int64_t>(tasks.size())};
}

}  // namespace fsec
