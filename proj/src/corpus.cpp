#include "fsec/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fsec/error.hpp"

namespace fsec {

using nlohmann::json;

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {

void validate_instance(const Instance& ins, const std::string& where) {
  if (ins.tokens.empty()) throw Error(where + ": empty token sequence");
  if (ins.event_type.empty()) throw Error(where + ": empty event type");
  if (ins.trigger_index < 0 || static_cast<std::size_t>(ins.trigger_index) >= ins.tokens.size()) {
    throw Error(where + ": trigger index out of range (" + std::to_string(ins.trigger_index) +
                " for " + std::to_string(ins.tokens.size()) + " tokens)");
  }
}

Instance parse_record(const json& j, const std::string& where) {
  if (!j.is_object()) throw Error(where + ": record is not an object");
  if (!j.contains("tokens") || !j["tokens"].is_array()) throw Error(where + ": missing `tokens` array");
  if (!j.contains("trigger_index") || !j["trigger_index"].is_number_integer()) {
    throw Error(where + ": missing integer `trigger_index`");
  }
  if (!j.contains("event_type") || !j["event_type"].is_string()) {
    throw Error(where + ": missing string `event_type`");
  }
  Instance ins;
  for (const auto& tok : j["tokens"]) {
    if (!tok.is_string()) throw Error(where + ": non-string token");
    ins.tokens.push_back(tok.get<std::string>());
  }
  ins.trigger_index = j["trigger_index"].get<int>();
  ins.event_type = j["event_type"].get<std::string>();
  validate_instance(ins, where);
  return ins;
}

}  // namespace

Corpus Corpus::from_instances(std::vector<Instance> instances) {
  Corpus c;
  c.instances_ = std::move(instances);
  c.trigger_forms_.reserve(c.instances_.size());
  for (std::size_t i = 0; i < c.instances_.size(); ++i) {
    const Instance& ins = c.instances_[i];
    validate_instance(ins, "instance " + std::to_string(i));
    std::string form = ascii_lower(ins.tokens[static_cast<std::size_t>(ins.trigger_index)]);
    EventBucket& bucket = c.events_[ins.event_type];
    bucket.instance_ids.push_back(static_cast<int>(i));
    bucket.by_trigger[form].push_back(static_cast<int>(i));
    c.trigger_forms_.push_back(std::move(form));
  }
  return c;
}

const EventBucket& Corpus::event(const std::string& event_type) const {
  auto it = events_.find(event_type);
  if (it == events_.end()) throw Error("unknown event type: " + event_type);
  return it->second;
}

std::vector<std::string> Corpus::event_types() const {
  std::vector<std::string> out;
  out.reserve(events_.size());
  for (const auto& [name, bucket] : events_) out.push_back(name);
  return out;
}

Corpus load_canonical(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  std::vector<Instance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where + ": malformed record: " + e.what());
    }
    instances.push_back(parse_record(j, where));
  }
  if (instances.empty()) throw Error(path + ": empty corpus file");
  return Corpus::from_instances(std::move(instances));
}

void save_canonical(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  for (const Instance& ins : corpus.instances()) {
    json j;
    j["tokens"] = ins.tokens;
    j["trigger_index"] = ins.trigger_index;
    j["event_type"] = ins.event_type;
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<Instance> convert_maven(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open MAVEN file: " + path);
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": malformed document: " + e.what());
    }
    const std::string doc_id =
        doc.contains("id") && doc["id"].is_string() ? doc["id"].get<std::string>()
                                                    : "line " + std::to_string(line_no);
    if (!doc.contains("content") || !doc["content"].is_array()) {
      throw Error("document " + doc_id + ": missing `content`");
    }
    std::vector<std::vector<std::string>> sentences;
    for (const auto& sent : doc["content"]) {
      if (!sent.contains("tokens") || !sent["tokens"].is_array()) {
        throw Error("document " + doc_id + ": sentence without `tokens`");
      }
      sentences.push_back(sent["tokens"].get<std::vector<std::string>>());
    }
    if (!doc.contains("events")) continue;  // test-split documents carry only candidates
    if (!doc["events"].is_array()) throw Error("document " + doc_id + ": `events` is not an array");
    for (const auto& event : doc["events"]) {
      if (!event.contains("type") || !event["type"].is_string()) {
        throw Error("document " + doc_id + ": event without `type`");
      }
      const std::string type = event["type"].get<std::string>();
      if (!event.contains("mention") || !event["mention"].is_array()) {
        throw Error("document " + doc_id + ": event without `mention` list");
      }
      for (const auto& mention : event["mention"]) {
        if (!mention.contains("sent_id") || !mention["sent_id"].is_number_integer()) {
          throw Error("document " + doc_id + ": mention without `sent_id`");
        }
        if (!mention.contains("offset") || !mention["offset"].is_array() || mention["offset"].empty()) {
          throw Error("document " + doc_id + ": mention without `offset`");
        }
        const int sent_id = mention["sent_id"].get<int>();
        if (sent_id < 0 || static_cast<std::size_t>(sent_id) >= sentences.size()) {
          throw Error("document " + doc_id + ": mention sentence id out of range");
        }
        Instance ins;
        ins.tokens = sentences[static_cast<std::size_t>(sent_id)];
        // Multi-token triggers are represented by their first token.
        ins.trigger_index = mention["offset"][0].get<int>();
        ins.event_type = type;
        if (ins.trigger_index < 0 ||
            static_cast<std::size_t>(ins.trigger_index) >= ins.tokens.size()) {
          throw Error("document " + doc_id + ": mention offset exceeds sentence length");
        }
        out.push_back(std::move(ins));
      }
    }
  }
  return out;
}

Corpus filter_min_instances(const Corpus& corpus, int min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::vector<Instance> kept;
  for (const Instance& ins : corpus.instances()) {
    const EventBucket& bucket = corpus.event(ins.event_type);
    if (bucket.instance_ids.size() >= static_cast<std::size_t>(min_count)) kept.push_back(ins);
  }
  if (kept.empty()) throw Error("no event types survive filter");
  return Corpus::from_instances(std::move(kept));
}

SplitResult split_by_event_types(const Corpus& corpus, const SplitSpec& spec) {
  std::map<std::string, int> where;  // 0 train, 1 dev, 2 test
  auto claim = [&](const std::vector<std::string>& events, int slot, const char* name) {
    for (const std::string& ev : events) {
      if (!corpus.has_event(ev)) throw Error("split spec lists unknown event type: " + ev);
      auto [it, inserted] = where.emplace(ev, slot);
      (void)it;
      if (!inserted) throw Error("event type appears in multiple split lists: " + ev);
      (void)name;
    }
  };
  claim(spec.train_events, 0, "train");
  claim(spec.dev_events, 1, "dev");
  claim(spec.test_events, 2, "test");

  std::vector<Instance> parts[3];
  std::int64_t dropped = 0;
  for (const Instance& ins : corpus.instances()) {
    auto it = where.find(ins.event_type);
    if (it == where.end()) {
      ++dropped;
      continue;
    }
    parts[it->second].push_back(ins);
  }
  SplitResult result;
  result.train = Corpus::from_instances(std::move(parts[0]));
  result.dev = Corpus::from_instances(std::move(parts[1]));
  result.test = Corpus::from_instances(std::move(parts[2]));
  result.dropped_instances = dropped;
  return result;
}

SplitSpec load_split_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open split config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path + ": malformed split config: " + e.what());
  }
  SplitSpec spec;
  auto read_list = [&](const char* key, std::vector<std::string>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw Error(path + ": `" + key + "` must be an array");
    out = j[key].get<std::vector<std::string>>();
  };
  read_list("train", spec.train_events);
  read_list("dev", spec.dev_events);
  read_list("test", spec.test_events);
  return spec;
}

}  // namespace fsec
