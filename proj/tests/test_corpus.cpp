#include "doctest.h"

#include <algorithm>

#include "fsec/corpus.hpp"
#include "fsec/error.hpp"
#include "fsec/rng.hpp"
#include "support/fixtures.hpp"

using namespace fsec;
using namespace fsec::testing;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("single-record file loads with a lowercased trigger form") {
  TempDir dir;
  const std::string path = dir.path("one.jsonl");
  write_file(path,
             R"({"tokens": ["he", "Left", "home"], "trigger_index": 1, "event_type": "Death"})"
             "\n");
  const Corpus corpus = load_canonical(path);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus.trigger_form(0) == "left");
  const EventBucket& bucket = corpus.event("Death");
  CHECK(bucket.instance_ids.size() == 1);
  CHECK(bucket.by_trigger.size() == 1);
  CHECK(bucket.by_trigger.count("left") == 1);
}

TEST_CASE("trigger index out of range is rejected with the line number") {
  TempDir dir;
  const std::string path = dir.path("bad.jsonl");
  write_file(path, R"({"tokens": ["a", "b", "c"], "trigger_index": 5, "event_type": "X"})"
                   "\n");
  CHECK_THROWS_WITH_AS(load_canonical(path), doctest::Contains("trigger index out of range"),
                       Error);
  CHECK_THROWS_WITH_AS(load_canonical(path), doctest::Contains(":1"), Error);
}

TEST_CASE("malformed json and empty files are rejected") {
  TempDir dir;
  const std::string path = dir.path("bad.jsonl");
  write_file(path, "{not json\n");
  CHECK_THROWS_WITH_AS(load_canonical(path), doctest::Contains("malformed"), Error);
  const std::string empty = dir.path("empty.jsonl");
  write_file(empty, "");
  CHECK_THROWS_WITH_AS(load_canonical(empty), doctest::Contains("empty"), Error);
}

TEST_CASE("six-record toy corpus builds four trigger buckets of sizes 2,1,1,2") {
  const Corpus corpus = toy_corpus_six();
  REQUIRE(corpus.events().size() == 2);
  std::vector<std::size_t> sizes;
  for (const auto& [event, bucket] : corpus.events()) {
    (void)event;
    for (const auto& [form, ids] : bucket.by_trigger) {
      (void)form;
      sizes.push_back(ids.size());
    }
  }
  // A: left x2, went x1; B: left x1, ran x2 (map order: left < went, left < ran)
  CHECK(sizes == std::vector<std::size_t>{2, 1, 1, 2});

  // every instance appears in exactly one event bucket and one trigger bucket
  std::size_t in_events = 0, in_triggers = 0;
  for (const auto& [event, bucket] : corpus.events()) {
    (void)event;
    in_events += bucket.instance_ids.size();
    for (const auto& [form, ids] : bucket.by_trigger) {
      (void)form;
      in_triggers += ids.size();
    }
  }
  CHECK(in_events == corpus.size());
  CHECK(in_triggers == corpus.size());
}

TEST_CASE("canonical round trip reproduces the corpus field-wise") {
  TempDir dir;
  const Corpus corpus = toy_corpus_six();
  const std::string path = dir.path("roundtrip.jsonl");
  save_canonical(corpus, path);
  const Corpus reloaded = load_canonical(path);
  CHECK(corpus == reloaded);

  // and the serialization itself is stable
  const std::string again = dir.path("again.jsonl");
  save_canonical(reloaded, again);
  CHECK(read_file(path) == read_file(again));
}

TEST_CASE("filter keeps only event types at the threshold and is idempotent") {
  std::vector<Instance> v;
  for (int i = 0; i < 5; ++i) v.push_back(mention("t" + std::to_string(i), "A"));
  for (int i = 0; i < 2; ++i) v.push_back(mention("u" + std::to_string(i), "B"));
  const Corpus corpus = Corpus::from_instances(std::move(v));

  const Corpus filtered = filter_min_instances(corpus, 3);
  CHECK(filtered.events().size() == 1);
  CHECK(filtered.has_event("A"));
  CHECK(filtered.size() == 5);

  const Corpus twice = filter_min_instances(filtered, 3);
  CHECK(filtered == twice);

  CHECK_THROWS_WITH_AS(filter_min_instances(corpus, 100),
                       doctest::Contains("no event types survive"), Error);
  CHECK_THROWS_AS(filter_min_instances(corpus, 0), Error);
}

TEST_CASE("split partitions listed events and drops the rest with a count") {
  std::vector<Instance> v;
  for (int i = 0; i < 3; ++i) v.push_back(mention("a", "A"));
  for (int i = 0; i < 2; ++i) v.push_back(mention("b", "B"));
  for (int i = 0; i < 4; ++i) v.push_back(mention("c", "C"));
  v.push_back(mention("d", "Dropped"));
  const Corpus corpus = Corpus::from_instances(std::move(v));

  SplitSpec spec;
  spec.train_events = {"A"};
  spec.dev_events = {"B"};
  spec.test_events = {"C"};
  const SplitResult result = split_by_event_types(corpus, spec);
  CHECK(result.train.size() == 3);
  CHECK(result.dev.size() == 2);
  CHECK(result.test.size() == 4);
  CHECK(result.dropped_instances == 1);

  // disjoint event-type sets; instance multiset preserved
  for (const std::string& ev : result.train.event_types()) {
    CHECK_FALSE(result.dev.has_event(ev));
    CHECK_FALSE(result.test.has_event(ev));
  }
  CHECK(result.train.size() + result.dev.size() + result.test.size() +
            static_cast<std::size_t>(result.dropped_instances) ==
        corpus.size());
}

TEST_CASE("degenerate split sends everything to train") {
  const Corpus corpus = toy_corpus_six();
  SplitSpec spec;
  spec.train_events = {"A", "B"};
  const SplitResult result = split_by_event_types(corpus, spec);
  CHECK(result.train == corpus);
  CHECK(result.dev.empty());
  CHECK(result.test.empty());
}

TEST_CASE("split rejects overlapping lists and unknown event types") {
  const Corpus corpus = toy_corpus_six();
  SplitSpec overlapping;
  overlapping.train_events = {"A"};
  overlapping.test_events = {"A"};
  CHECK_THROWS_WITH_AS(split_by_event_types(corpus, overlapping),
                       doctest::Contains("multiple split lists"), Error);

  SplitSpec unknown;
  unknown.train_events = {"A", "Nope"};
  CHECK_THROWS_WITH_AS(split_by_event_types(corpus, unknown), doctest::Contains("unknown"),
                       Error);
}

TEST_CASE("maven conversion maps mentions to instances") {
  TempDir dir;
  const std::string path = dir.path("maven.jsonl");
  write_file(path, R"({"id": "doc0", "title": "t",
    "content": [{"sentence": "s", "tokens": ["the", "army", "attacked", "at", "dawn"]},
                {"sentence": "s", "tokens": ["they", "died"]}],
    "events": [
      {"id": "e1", "type": "Attack", "type_id": 1,
       "mention": [{"id": "m1", "trigger_word": "attacked", "sent_id": 0, "offset": [2, 3]}]},
      {"id": "e2", "type": "Death", "type_id": 2,
       "mention": [{"id": "m2", "trigger_word": "died", "sent_id": 1, "offset": [1, 2]}]}
    ],
    "negative_triggers": [{"id": "n1", "trigger_word": "dawn", "sent_id": 0, "offset": [4, 5]}]})"
                   "\n");
  const auto instances = convert_maven(path);
  REQUIRE(instances.size() == 2);
  CHECK(instances[0].event_type == "Attack");
  CHECK(instances[0].trigger_index == 2);
  CHECK(instances[0].tokens.size() == 5);
  CHECK(instances[1].event_type == "Death");
  CHECK(instances[1].tokens == std::vector<std::string>{"they", "died"});
}

TEST_CASE("maven conversion rejects out-of-range offsets and names the document") {
  TempDir dir;
  const std::string path = dir.path("maven_bad.jsonl");
  write_file(path, R"({"id": "doc7",
    "content": [{"sentence": "s", "tokens": ["a", "b"]}],
    "events": [{"id": "e", "type": "X",
      "mention": [{"id": "m", "trigger_word": "z", "sent_id": 0, "offset": [9, 10]}]}]})"
                   "\n");
  CHECK_THROWS_WITH_AS(convert_maven(path), doctest::Contains("doc7"), Error);
  CHECK_THROWS_WITH_AS(convert_maven(path), doctest::Contains("offset exceeds"), Error);

  const std::string missing = dir.path("maven_missing.jsonl");
  write_file(missing, R"({"id": "doc9",
    "content": [{"sentence": "s", "tokens": ["a"]}],
    "events": [{"id": "e", "mention": [{"id": "m", "sent_id": 0, "offset": [0, 1]}]}]})"
                      "\n");
  CHECK_THROWS_WITH_AS(convert_maven(missing), doctest::Contains("doc9"), Error);
}

TEST_CASE("maven conversion tolerates test-split documents without events") {
  TempDir dir;
  const std::string path = dir.path("maven_test.jsonl");
  write_file(path, R"({"id": "doc1", "content": [{"sentence": "s", "tokens": ["a"]}],
    "candidates": [{"id": "c", "trigger_word": "a", "sent_id": 0, "offset": [0, 1]}]})"
                   "\n");
  CHECK(convert_maven(path).empty());
}

TEST_CASE("reordering instances leaves the index structure unchanged") {
  const Corpus corpus = toy_corpus_six();
  std::vector<Instance> shuffled = corpus.instances();
  Rng rng(7);
  rng.shuffle(shuffled);
  const Corpus reshuffled = Corpus::from_instances(std::move(shuffled));
  for (const auto& [event, bucket] : corpus.events()) {
    const EventBucket& other = reshuffled.event(event);
    REQUIRE(other.by_trigger.size() == bucket.by_trigger.size());
    for (const auto& [form, ids] : bucket.by_trigger) {
      CHECK(other.by_trigger.at(form).size() == ids.size());
    }
  }
}

TEST_SUITE_END();
