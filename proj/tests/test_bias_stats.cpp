#include "doctest.h"

#include "fsec/bias_stats.hpp"
#include "fsec/error.hpp"
#include "fsec/rng.hpp"
#include "support/fixtures.hpp"

using namespace fsec;
using namespace fsec::testing;

namespace {

Corpus counts_corpus(const std::vector<std::pair<std::string, int>>& trigger_counts,
                     const std::string& event = "E") {
  std::vector<Instance> v;
  for (const auto& [trigger, count] : trigger_counts) {
    for (int i = 0; i < count; ++i) v.push_back(mention(trigger, event));
  }
  return Corpus::from_instances(std::move(v));
}

}  // namespace

TEST_SUITE_BEGIN("bias_stats");

TEST_CASE("fewer triggers than M yields fraction one") {
  const Corpus corpus = counts_corpus({{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}});
  const EventTriggerStats stats = event_trigger_stats(corpus, 5);
  CHECK(stats.n_event_types == 1);
  CHECK(stats.avg_triggers_per_event == doctest::Approx(4.0));
  CHECK(stats.avg_topm_instance_fraction == doctest::Approx(1.0));
}

TEST_CASE("top-1 fraction of a skewed event") {
  const Corpus corpus = counts_corpus({{"a", 8}, {"b", 1}, {"c", 1}});
  const EventTriggerStats stats = event_trigger_stats(corpus, 1);
  CHECK(stats.avg_topm_instance_fraction == doctest::Approx(0.8));
}

TEST_CASE("top-M ranking breaks count ties lexicographically") {
  // two triggers with count 2; top-1 must pick "a" (same count, smaller form)
  const Corpus corpus = counts_corpus({{"b", 2}, {"a", 2}, {"z", 1}});
  const EventTriggerStats stats = event_trigger_stats(corpus, 1);
  CHECK(stats.avg_topm_instance_fraction == doctest::Approx(0.4));

  const TriggerEventStats tstats = trigger_event_stats(corpus, 1);
  CHECK(tstats.n_triggers == 1);  // only the tie-broken top-1 form collected
}

TEST_CASE("single-event trigger has one dominant event covering everything") {
  const Corpus corpus = counts_corpus({{"only", 4}});
  const TriggerEventStats stats = trigger_event_stats(corpus, 5);
  CHECK(stats.avg_events_per_top_trigger == doctest::Approx(1.0));
  CHECK(stats.top1_fraction == doctest::Approx(1.0));
  CHECK(stats.top2_fraction == doctest::Approx(1.0));
}

TEST_CASE("trigger shared across events ranks dominant events by count") {
  // one form "t" with event counts A:7, B:2, C:1
  std::vector<Instance> v;
  for (int i = 0; i < 7; ++i) v.push_back(mention("t", "A"));
  for (int i = 0; i < 2; ++i) v.push_back(mention("t", "B"));
  v.push_back(mention("t", "C"));
  const Corpus corpus = Corpus::from_instances(std::move(v));
  const TriggerEventStats stats = trigger_event_stats(corpus, 5, {1, 2, 3});
  CHECK(stats.avg_events_per_top_trigger == doctest::Approx(3.0));
  CHECK(stats.top1_fraction == doctest::Approx(0.7));
  CHECK(stats.top2_fraction == doctest::Approx(0.9));
  REQUIRE(stats.topx_fractions.size() == 3);
  CHECK(stats.topx_fractions[2] == doctest::Approx(1.0));
}

TEST_CASE("stats are invariant to instance order") {
  SyntheticSpec spec;
  spec.n_events = 4;
  spec.dominant_count = 9;
  spec.n_rare = 3;
  spec.rare_count = 1;
  spec.shared_rares = true;
  const Corpus corpus = synthetic_corpus(spec);

  std::vector<Instance> shuffled = corpus.instances();
  Rng rng(3);
  rng.shuffle(shuffled);
  const Corpus reordered = Corpus::from_instances(std::move(shuffled));

  const EventTriggerStats a = event_trigger_stats(corpus, 2);
  const EventTriggerStats b = event_trigger_stats(reordered, 2);
  CHECK(a.avg_triggers_per_event == b.avg_triggers_per_event);
  CHECK(a.avg_topm_instance_fraction == b.avg_topm_instance_fraction);

  const TriggerEventStats ta = trigger_event_stats(corpus, 2);
  const TriggerEventStats tb = trigger_event_stats(reordered, 2);
  CHECK(ta.avg_events_per_top_trigger == tb.avg_events_per_top_trigger);
  CHECK(ta.top1_fraction == tb.top1_fraction);
  CHECK(ta.top2_fraction == tb.top2_fraction);
}

TEST_CASE("top-M fraction reaches exactly one as M grows past every trigger count") {
  SyntheticSpec spec;
  spec.n_events = 3;
  spec.dominant_count = 5;
  spec.n_rare = 4;
  spec.rare_count = 2;
  const Corpus corpus = synthetic_corpus(spec);
  const EventTriggerStats stats = event_trigger_stats(corpus, 1000000);
  CHECK(stats.avg_topm_instance_fraction == 1.0);
}

TEST_CASE("empty corpus and bad arguments are rejected") {
  CHECK_THROWS_AS(event_trigger_stats(Corpus(), 5), Error);
  CHECK_THROWS_AS(trigger_event_stats(Corpus(), 5), Error);
  const Corpus corpus = counts_corpus({{"a", 2}});
  CHECK_THROWS_AS(event_trigger_stats(corpus, 0), Error);
}

TEST_CASE("overlap counting matches the definition") {
  const Corpus corpus = toy_corpus_six();
  // A: ids {0,1,2} with forms left,left,went; B: ids {3,4,5} with left,ran,ran
  MetaTask task;
  task.event_types = {"A", "B"};
  task.support = {{0, 2}, {4, 5}};
  task.gold_index = 1;
  task.query = 3;  // form "left" matches support id 0

  MetaTask no_overlap;
  no_overlap.event_types = {"A", "B"};
  no_overlap.support = {{2}, {4}};  // went, ran
  no_overlap.gold_index = 0;
  no_overlap.query = 0;  // form "left": no support instance has it

  const auto [count, total] = count_trigger_overlap(corpus, {task, no_overlap});
  CHECK(count == 1);
  CHECK(total == 2);

  const auto [zero, none] = count_trigger_overlap(corpus, {});
  CHECK(zero == 0);
  CHECK(none == 0);
}

TEST_CASE("unique single-trigger events overlap on every IUS task") {
  std::vector<Instance> v;
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i < 4; ++i) v.push_back(mention("trig" + std::to_string(e), "E" + std::to_string(e)));
  }
  const Corpus corpus = Corpus::from_instances(std::move(v));
  SamplerConfig cfg;
  cfg.n_way = 3;
  cfg.k_shot = 2;
  EpisodeSampler sampler(corpus, cfg);
  Rng rng(11);
  std::vector<MetaTask> tasks;
  for (int i = 0; i < 500; ++i) tasks.push_back(sampler.sample(rng));
  const auto [count, total] = count_trigger_overlap(corpus, tasks);
  CHECK(count == total);
}

TEST_SUITE_END();
