#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fsec {

// One event mention: a tokenized sentence, the trigger position, and the
// event-type label.
struct Instance {
  std::vector<std::string> tokens;
  int trigger_index = 0;
  std::string event_type;

  bool operator==(const Instance&) const = default;
};

struct EventBucket {
  std::vector<int> instance_ids;
  // trigger form -> ids of instances of this event bearing it
  std::map<std::string, std::vector<int>> by_trigger;
};

// ASCII case folding; non-ASCII bytes pass through verbatim.
std::string ascii_lower(std::string_view s);

// Immutable after construction; safe for concurrent reads.
class Corpus {
 public:
  Corpus() = default;
  static Corpus from_instances(std::vector<Instance> instances);

  const std::vector<Instance>& instances() const { return instances_; }
  const Instance& instance(int id) const { return instances_[static_cast<std::size_t>(id)]; }
  // Lowercased surface form of the token at the trigger position.
  const std::string& trigger_form(int id) const { return trigger_forms_[static_cast<std::size_t>(id)]; }

  const std::map<std::string, EventBucket>& events() const { return events_; }
  const EventBucket& event(const std::string& event_type) const;
  bool has_event(const std::string& event_type) const { return events_.count(event_type) > 0; }
  std::vector<std::string> event_types() const;

  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }

  bool operator==(const Corpus& other) const { return instances_ == other.instances_; }

 private:
  std::vector<Instance> instances_;
  std::vector<std::string> trigger_forms_;
  std::map<std::string, EventBucket> events_;
};

struct SplitSpec {
  std::vector<std::string> train_events;
  std::vector<std::string> dev_events;
  std::vector<std::string> test_events;
};

struct SplitResult {
  Corpus train;
  Corpus dev;
  Corpus test;
  std::int64_t dropped_instances = 0;  // instances of event types absent from the spec
};

// Canonical line-delimited format: one JSON object per line with fields
// `tokens`, `trigger_index`, `event_type`.
Corpus load_canonical(const std::string& path);
void save_canonical(const Corpus& corpus, const std::string& path);

// Adapter for the public MAVEN release format (documents with sentence lists
// and event mentions carrying a sentence id and token offset). Non-event
// candidate mentions are discarded.
std::vector<Instance> convert_maven(const std::string& path);

Corpus filter_min_instances(const Corpus& corpus, int min_count);

SplitResult split_by_event_types(const Corpus& corpus, const SplitSpec& spec);

// JSON object with `train`, `dev`, `test` arrays of event-type strings.
SplitSpec load_split_spec(const std::string& path);

}  // namespace fsec
