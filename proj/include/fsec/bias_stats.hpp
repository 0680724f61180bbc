#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fsec/corpus.hpp"
#include "fsec/sampling.hpp"

namespace fsec {

struct EventTriggerStats {
  int n_event_types = 0;
  double avg_triggers_per_event = 0.0;
  double avg_topm_instance_fraction = 0.0;  // in [0, 1]
  int top_m = 0;
};

struct TriggerEventStats {
  double avg_events_per_top_trigger = 0.0;
  double top1_fraction = 0.0;
  double top2_fraction = 0.0;
  std::vector<int> top_x;               // requested x values
  std::vector<double> topx_fractions;   // parallel to top_x
  int n_triggers = 0;                   // distinct top-trigger forms collected
};

// Per event type, triggers ranked by instance count (ties broken
// lexicographically); the top-M fraction is the share of the event's
// instances covered by its top-M triggers. Means are unweighted over events.
EventTriggerStats event_trigger_stats(const Corpus& corpus, int top_m);

// Collects every event's top-M triggers (deduplicated to distinct forms);
// for each such form, ranks its event types by corpus-wide instance count
// and reports the mean fraction covered by the top-x dominant events.
TriggerEventStats trigger_event_stats(const Corpus& corpus, int top_m,
                                      const std::vector<int>& top_x = {1, 2});

// A task overlaps iff the query's trigger form equals the trigger form of at
// least one support instance, of any event type. Returns (overlapping, total).
std::pair<std::int64_t, std::int64_t> count_trigger_overlap(const Corpus& corpus,
                                                            const std::vector<MetaTask>& tasks);

}  // namespace fsec
