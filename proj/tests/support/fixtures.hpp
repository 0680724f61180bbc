#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"

namespace fsec::testing {

inline Instance make_instance(std::vector<std::string> tokens, int trigger_index,
                              std::string event_type) {
  Instance ins;
  ins.tokens = std::move(tokens);
  ins.trigger_index = trigger_index;
  ins.event_type = std::move(event_type);
  return ins;
}

// Mention sentence: "<ctx> <trigger> <ctx>", trigger at position 1.
inline Instance mention(const std::string& trigger, const std::string& event,
                        const std::string& ctx = "ctx") {
  return make_instance({ctx, trigger, "now"}, 1, event);
}

// A{left x2, went x1}, B{left x1, ran x2}: four trigger buckets 2,1,1,2.
inline Corpus toy_corpus_six() {
  std::vector<Instance> v;
  v.push_back(mention("left", "A"));
  v.push_back(mention("Left", "A"));
  v.push_back(mention("went", "A"));
  v.push_back(mention("left", "B"));
  v.push_back(mention("ran", "B"));
  v.push_back(mention("ran", "B"));
  return Corpus::from_instances(std::move(v));
}

struct SyntheticSpec {
  int n_events = 20;
  int dominant_count = 180;  // instances with the dominant trigger
  int n_rare = 10;           // rare trigger forms per event
  int rare_count = 2;        // instances per rare trigger
  bool shared_rares = false;     // rare forms drawn from one global pool
  bool shared_dominant = false;  // one global dominant form as well
};

// Long-tail synthetic corpus: per event one dominant trigger plus a tail of
// rare ones. Trigger forms are event-specific unless shared_* is set.
inline Corpus synthetic_corpus(const SyntheticSpec& spec) {
  std::vector<Instance> v;
  for (int e = 0; e < spec.n_events; ++e) {
    const std::string event = "Event" + std::to_string(e);
    const std::string dom =
        spec.shared_dominant ? "dom" : "dom" + std::to_string(e);
    for (int i = 0; i < spec.dominant_count; ++i) v.push_back(mention(dom, event));
    for (int r = 0; r < spec.n_rare; ++r) {
      const std::string rare = (spec.shared_rares || spec.shared_dominant)
                                   ? "rare" + std::to_string(r)
                                   : "rare" + std::to_string(e) + "x" + std::to_string(r);
      for (int i = 0; i < spec.rare_count; ++i) v.push_back(mention(rare, event));
    }
  }
  return Corpus::from_instances(std::move(v));
}

// Two separable event types with disjoint vocabularies, four instances each.
inline Corpus separable_two_event_corpus() {
  std::vector<Instance> v;
  v.push_back(make_instance({"alpha", "beta", "gamma"}, 1, "A"));
  v.push_back(make_instance({"gamma", "alpha", "beta"}, 1, "A"));
  v.push_back(make_instance({"beta", "gamma", "alpha"}, 1, "A"));
  v.push_back(make_instance({"alpha", "gamma", "beta"}, 1, "A"));
  v.push_back(make_instance({"omega", "sigma", "tau"}, 1, "B"));
  v.push_back(make_instance({"tau", "omega", "sigma"}, 1, "B"));
  v.push_back(make_instance({"sigma", "tau", "omega"}, 1, "B"));
  v.push_back(make_instance({"omega", "tau", "sigma"}, 1, "B"));
  return Corpus::from_instances(std::move(v));
}

// 1-D table for hand-computed partition examples.
inline EmbeddingTable tiny_table_1d() {
  EmbeddingTable table(1);
  table.insert("t1", {0.0f});
  table.insert("t2", {10.0f});
  table.insert("t3", {0.5f});
  return table;
}

class TempDir {
 public:
  TempDir() {
    static const auto pid = std::random_device{}();
    base_ = std::filesystem::temp_directory_path() /
            ("fsec_test_" + std::to_string(pid) + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  std::string path(const std::string& name) const { return (base_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path base_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace fsec::testing
