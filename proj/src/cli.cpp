#include "fsec/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fsec/bias_stats.hpp"
#include "fsec/checkpoint.hpp"
#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"
#include "fsec/error.hpp"
#include "fsec/train_eval.hpp"

namespace fsec::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config files and manifests.
//
// Every subcommand takes `--config <file>`: a JSON object whose keys are the
// long flag names. Precedence is flags > config file > built-in defaults,
// implemented by loading the config into the option variables before CLI11
// binds any flags given on the command line. A run manifest is itself a valid
// config file (its `config` member is used), so any artifact can be
// reproduced with `--config <artifact>.manifest.json`.

json load_config_object(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path + ": malformed config: " + e.what());
  }
  if (j.is_object() && j.contains("config") && j["config"].is_object()) return j["config"];
  if (!j.is_object()) throw Error(path + ": config must be a JSON object");
  return j;
}

std::optional<std::string> scan_config_flag(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

template <typename T>
void from_config(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void write_manifest(const std::string& artifact, const std::string& subcommand,
                    const json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double duration_seconds) {
  json manifest;
  manifest["tool"] = "fsec";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["config"] = config;
  manifest["inputs"] = inputs;
  manifest["outputs"] = outputs;
  manifest["duration_seconds"] = duration_seconds;
  const std::string path = artifact + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path);
  out << manifest.dump(2) << '\n';
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string default_embeddings_path() {
  const char* env = std::getenv("FSEC_EMB_PATH");
  return env != nullptr ? env : "";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw Error("empty seed list");
  return seeds;
}

std::string format2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// corpus convert / filter / split

struct ConvertOpts {
  std::string from = "maven";
  std::string in;
  std::string out;
};

int run_convert(const ConvertOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.in.empty() || opts.out.empty()) throw Error("corpus convert requires --in and --out");
  if (opts.from != "maven") throw Error("unknown source format: " + opts.from);
  std::vector<Instance> instances = convert_maven(opts.in);
  if (instances.empty()) throw Error("no event mentions found in " + opts.in);
  Corpus corpus = Corpus::from_instances(std::move(instances));
  save_canonical(corpus, opts.out);
  write_manifest(opts.out, "corpus convert", config_echo, {opts.in}, {opts.out}, timer.seconds());
  std::cout << "converted " << corpus.size() << " instances across " << corpus.events().size()
            << " event types\n";
  return 0;
}

struct FilterOpts {
  std::string in;
  std::string out;
  int min_count = 1;
};

int run_filter(const FilterOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.in.empty() || opts.out.empty()) throw Error("corpus filter requires --in and --out");
  Corpus corpus = load_canonical(opts.in);
  Corpus filtered = filter_min_instances(corpus, opts.min_count);
  save_canonical(filtered, opts.out);
  write_manifest(opts.out, "corpus filter", config_echo, {opts.in}, {opts.out}, timer.seconds());
  std::cout << "kept " << filtered.events().size() << " of " << corpus.events().size()
            << " event types (" << filtered.size() << " instances)\n";
  return 0;
}

struct SplitOpts {
  std::string in;
  std::string spec;
  std::string out_train;
  std::string out_dev;
  std::string out_test;
};

int run_split(const SplitOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.in.empty() || opts.spec.empty()) throw Error("corpus split requires --in and --spec");
  if (opts.out_train.empty() || opts.out_dev.empty() || opts.out_test.empty()) {
    throw Error("corpus split requires --out-train, --out-dev, and --out-test");
  }
  Corpus corpus = load_canonical(opts.in);
  SplitResult result = split_by_event_types(corpus, load_split_spec(opts.spec));
  save_canonical(result.train, opts.out_train);
  save_canonical(result.dev, opts.out_dev);
  save_canonical(result.test, opts.out_test);
  write_manifest(opts.out_train, "corpus split", config_echo, {opts.in, opts.spec},
                 {opts.out_train, opts.out_dev, opts.out_test}, timer.seconds());
  std::cout << "train/dev/test instances: " << result.train.size() << "/" << result.dev.size()
            << "/" << result.test.size() << "\n";
  if (result.dropped_instances > 0) {
    std::cerr << "warning: dropped " << result.dropped_instances
              << " instances of event types absent from the split config\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOpts {
  std::string corpus;
  std::string report;
  int top_m = 5;
  std::string top_x = "1,2";
  int min_count = 0;  // 0 = analyze as loaded
};

std::string analyze_table(const EventTriggerStats& ev, const TriggerEventStats& tr) {
  std::ostringstream out;
  out << "Event-type trigger statistics\n";
  out << "  event types              : " << ev.n_event_types << "\n";
  out << "  triggers per event       : " << format2(ev.avg_triggers_per_event) << "\n";
  out << "  top-" << ev.top_m << " instance fraction : " << format2(ev.avg_topm_instance_fraction)
      << "\n";
  out << "Top-trigger event statistics\n";
  out << "  distinct top triggers    : " << tr.n_triggers << "\n";
  out << "  events per top trigger   : " << format2(tr.avg_events_per_top_trigger) << "\n";
  for (std::size_t i = 0; i < tr.top_x.size(); ++i) {
    out << "  top-" << tr.top_x[i] << " instance fraction : " << format2(tr.topx_fractions[i])
        << "\n";
  }
  return out.str();
}

json analyze_json(const EventTriggerStats& ev, const TriggerEventStats& tr) {
  json j;
  j["event_trigger_stats"] = {{"n_event_types", ev.n_event_types},
                              {"avg_triggers_per_event", ev.avg_triggers_per_event},
                              {"avg_topm_instance_fraction", ev.avg_topm_instance_fraction},
                              {"top_m", ev.top_m}};
  j["trigger_event_stats"] = {{"avg_events_per_top_trigger", tr.avg_events_per_top_trigger},
                              {"top1_fraction", tr.top1_fraction},
                              {"top2_fraction", tr.top2_fraction},
                              {"top_x", tr.top_x},
                              {"topx_fractions", tr.topx_fractions},
                              {"n_triggers", tr.n_triggers}};
  return j;
}

int run_analyze(const AnalyzeOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.corpus.empty()) throw Error("analyze requires --corpus");
  Corpus corpus = load_canonical(opts.corpus);
  if (opts.min_count > 0) corpus = filter_min_instances(corpus, opts.min_count);

  std::vector<int> top_x;
  for (std::uint64_t x : parse_seed_list(opts.top_x)) top_x.push_back(static_cast<int>(x));
  const EventTriggerStats ev = event_trigger_stats(corpus, opts.top_m);
  const TriggerEventStats tr = trigger_event_stats(corpus, opts.top_m, top_x);

  const std::string table = analyze_table(ev, tr);
  std::cout << table;
  if (!opts.report.empty()) {
    std::ofstream out(opts.report);
    if (!out) throw Error("cannot write report: " + opts.report);
    out << table;
    std::ofstream jout(opts.report + ".json");
    if (!jout) throw Error("cannot write report: " + opts.report + ".json");
    jout << analyze_json(ev, tr).dump(2) << '\n';
    write_manifest(opts.report, "analyze", config_echo, {opts.corpus},
                   {opts.report, opts.report + ".json"}, timer.seconds());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sample

struct SampleOpts {
  std::string corpus;
  std::string method = "ius";
  int n_way = 5;
  int k_shot = 5;
  int count = 10000;
  std::uint64_t seed = 42;
  std::string out;
  std::string embeddings = default_embeddings_path();
  int emb_dim = 300;
  double cos_p = 1.0;
  int cos_u = 6;
  bool cos_query_uniform = false;
};

SamplerConfig sampler_config_of(const SampleOpts& opts) {
  SamplerConfig cfg;
  cfg.n_way = opts.n_way;
  cfg.k_shot = opts.k_shot;
  cfg.method = parse_method(opts.method);
  cfg.cos_p = opts.cos_p;
  cfg.cos_u = opts.cos_u;
  cfg.seed = opts.seed;
  cfg.cos_query_confusing = !opts.cos_query_uniform;
  return cfg;
}

int run_sample(const SampleOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.corpus.empty() || opts.out.empty()) throw Error("sample requires --corpus and --out");
  Corpus corpus = load_canonical(opts.corpus);
  SamplerConfig cfg = sampler_config_of(opts);

  std::optional<EmbeddingTable> table;
  if (cfg.method == SampleMethod::kCos) {
    if (opts.embeddings.empty()) throw Error("COS requires an embedding table");
    table = load_table(opts.embeddings, opts.emb_dim);
  }

  EpisodeSampler sampler(corpus, cfg, table ? &*table : nullptr);
  Rng rng(cfg.seed);
  std::ofstream out(opts.out);
  if (!out) throw Error("cannot write task file: " + opts.out);

  auto emit = [&](int task_id, const char* role, int way, int instance_id) {
    const Instance& ins = corpus.instance(instance_id);
    json j;
    j["task_id"] = task_id;
    j["role"] = role;
    j["way"] = way;
    j["tokens"] = ins.tokens;
    j["trigger_index"] = ins.trigger_index;
    j["event_type"] = ins.event_type;
    out << j.dump() << '\n';
  };

  std::int64_t overlapping = 0;
  for (int t = 0; t < opts.count; ++t) {
    const MetaTask task = sampler.sample(rng);
    for (std::size_t i = 0; i < task.support.size(); ++i) {
      for (int id : task.support[i]) emit(t, "support", static_cast<int>(i), id);
    }
    emit(t, "query", task.gold_index, task.query);
    const std::string& qf = corpus.trigger_form(task.query);
    bool overlap = false;
    for (const auto& row : task.support) {
      for (int id : row) {
        if (corpus.trigger_form(id) == qf) {
          overlap = true;
          break;
        }
      }
      if (overlap) break;
    }
    if (overlap) ++overlapping;
  }
  if (!out) throw Error("write failed: " + opts.out);
  out.close();
  write_manifest(opts.out, "sample", config_echo, {opts.corpus}, {opts.out}, timer.seconds());
  std::cout << "wrote " << opts.count << " tasks; trigger overlap " << overlapping << "/"
            << opts.count << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string corpus;
  std::string dev;
  std::string out;
  std::string embeddings = default_embeddings_path();
  int emb_dim = 300;
  std::string method = "ius";
  int n_way = 5;
  int k_shot = 5;
  double lr = 1e-4;
  int episodes_per_epoch = 1000;
  int patience = 3;
  int max_epochs = 50;
  double alpha = 1.0;
  double beta = 0.1;
  double eps = 0.5;
  std::uint64_t seed = 42;
  int dev_tasks = 1000;
  double cos_p = 1.0;
  int cos_u = 6;
  int token_dim = 300;
  int pos_dim = 50;
  int window = 3;
  int filters = 300;
  int max_len = 128;
  int vocab_cap = 20000;
  bool quiet = false;
};

int run_train(const TrainOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.corpus.empty() || opts.dev.empty() || opts.out.empty()) {
    throw Error("train requires --corpus, --dev, and --out");
  }
  Corpus train_corpus = load_canonical(opts.corpus);
  Corpus dev_corpus = load_canonical(opts.dev);

  std::optional<EmbeddingTable> table;
  if (!opts.embeddings.empty()) {
    table = load_table(opts.embeddings, opts.emb_dim);
  } else {
    std::cerr << "note: training without pretrained embeddings (random token rows)\n";
  }

  TrainConfig cfg;
  cfg.n_way = opts.n_way;
  cfg.k_shot = opts.k_shot;
  cfg.train_method = parse_method(opts.method);
  cfg.lr = opts.lr;
  cfg.episodes_per_epoch = opts.episodes_per_epoch;
  cfg.patience = opts.patience;
  cfg.max_epochs = opts.max_epochs;
  cfg.alpha = opts.alpha;
  cfg.beta = opts.beta;
  cfg.eps = opts.eps;
  cfg.seed = opts.seed;
  cfg.dev_tasks = opts.dev_tasks;
  cfg.cos_p = opts.cos_p;
  cfg.cos_u = opts.cos_u;
  cfg.encoder.token_dim = table ? table->dim() : opts.token_dim;
  cfg.encoder.pos_dim = opts.pos_dim;
  cfg.encoder.window = opts.window;
  cfg.encoder.filters = opts.filters;
  cfg.encoder.max_len = opts.max_len;
  cfg.encoder.vocab_cap = opts.vocab_cap;
  if (!opts.quiet) {
    cfg.on_epoch = [](int epoch, double acc, bool improved) {
      std::cerr << "epoch " << epoch << ": dev accuracy " << format2(acc * 100.0)
                << (improved ? " *" : "") << "\n";
    };
  }

  EncoderParams params = train(train_corpus, dev_corpus, table ? &*table : nullptr, cfg);
  save_checkpoint(params, config_echo, opts.out);
  write_manifest(opts.out, "train", config_echo, {opts.corpus, opts.dev}, {opts.out},
                 timer.seconds());
  std::cout << "wrote checkpoint " << opts.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval / report

struct EvalOpts {
  std::string model;  // string-match, glove-match, or a checkpoint path
  std::string corpus;
  std::string method = "ius";
  int n_way = 5;
  int k_shot = 5;
  int tasks = 10000;
  std::string seeds = "1,2,3,4,5";
  std::string report;
  std::string embeddings = default_embeddings_path();
  int emb_dim = 300;
  double cos_p = 1.0;
  int cos_u = 6;
  bool cos_query_uniform = false;
  int workers = 1;
};

std::string eval_table(const EvalReport& r) {
  std::ostringstream out;
  out << "model         : " << r.model << "\n";
  out << "sampler       : " << r.method << "\n";
  out << "n-way/k-shot  : " << r.n_way << "/" << r.k_shot << "\n";
  out << "tasks per seed: " << r.n_tasks << "\n";
  out << "seeds         :";
  for (std::uint64_t s : r.seeds) out << " " << s;
  out << "\n";
  out << "per-seed acc  :";
  for (double a : r.per_seed_accuracy) out << " " << format2(a * 100.0);
  out << "\n";
  out << "accuracy      : " << format2(r.mean * 100.0) << " +/- " << format2(r.stddev * 100.0)
      << "\n";
  return out.str();
}

json eval_json(const EvalReport& r) {
  json j;
  j["model"] = r.model;
  j["method"] = r.method;
  j["n_way"] = r.n_way;
  j["k_shot"] = r.k_shot;
  j["n_tasks"] = r.n_tasks;
  j["seeds"] = r.seeds;
  j["per_seed_accuracy"] = r.per_seed_accuracy;
  j["mean"] = r.mean;
  j["stddev"] = r.stddev;
  return j;
}

int run_eval(const EvalOpts& opts, const json& config_echo) {
  Stopwatch timer;
  if (opts.model.empty() || opts.corpus.empty()) throw Error("eval requires --model and --corpus");
  Corpus corpus = load_canonical(opts.corpus);

  SamplerConfig cfg;
  cfg.n_way = opts.n_way;
  cfg.k_shot = opts.k_shot;
  cfg.method = parse_method(opts.method);
  cfg.cos_p = opts.cos_p;
  cfg.cos_u = opts.cos_u;
  cfg.cos_query_confusing = !opts.cos_query_uniform;

  ModelKind kind;
  std::optional<EncoderParams> encoder_params;
  if (opts.model == "string-match") {
    kind = ModelKind::kStringMatch;
  } else if (opts.model == "glove-match") {
    kind = ModelKind::kGloveMatch;
  } else {
    kind = ModelKind::kEncoder;
    encoder_params = load_checkpoint(opts.model).first;
  }

  std::optional<EmbeddingTable> table;
  const bool needs_table = kind == ModelKind::kGloveMatch || cfg.method == SampleMethod::kCos;
  if (needs_table) {
    if (opts.embeddings.empty()) {
      throw Error(cfg.method == SampleMethod::kCos ? "COS requires an embedding table"
                                                   : "glove-match requires an embedding table");
    }
    table = load_table(opts.embeddings, opts.emb_dim);
  }

  const EvalReport report =
      evaluate(corpus, table ? &*table : nullptr, encoder_params ? &*encoder_params : nullptr,
               kind, cfg, opts.tasks, parse_seed_list(opts.seeds), opts.workers);

  const std::string table_text = eval_table(report);
  std::cout << table_text;
  if (!opts.report.empty()) {
    std::ofstream out(opts.report);
    if (!out) throw Error("cannot write report: " + opts.report);
    out << table_text;
    std::ofstream jout(opts.report + ".json");
    if (!jout) throw Error("cannot write report: " + opts.report + ".json");
    jout << eval_json(report).dump(2) << '\n';
    write_manifest(opts.report, "eval", config_echo, {opts.corpus},
                   {opts.report, opts.report + ".json"}, timer.seconds());
  }
  return 0;
}

struct ReportOpts {
  std::string in;
};

int run_report(const ReportOpts& opts) {
  if (opts.in.empty()) throw Error("report requires --in");
  std::ifstream in(opts.in);
  if (!in) throw Error("cannot open report: " + opts.in);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(opts.in + ": malformed report: " + e.what());
  }
  if (j.contains("per_seed_accuracy")) {
    EvalReport r;
    r.model = j.at("model").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.n_way = j.at("n_way").get<int>();
    r.k_shot = j.at("k_shot").get<int>();
    r.n_tasks = j.at("n_tasks").get<int>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    r.per_seed_accuracy = j.at("per_seed_accuracy").get<std::vector<double>>();
    r.mean = j.at("mean").get<double>();
    r.stddev = j.at("stddev").get<double>();
    std::cout << eval_table(r);
    return 0;
  }
  if (j.contains("event_trigger_stats")) {
    const json& ev_j = j["event_trigger_stats"];
    const json& tr_j = j["trigger_event_stats"];
    EventTriggerStats ev;
    ev.n_event_types = ev_j.at("n_event_types").get<int>();
    ev.avg_triggers_per_event = ev_j.at("avg_triggers_per_event").get<double>();
    ev.avg_topm_instance_fraction = ev_j.at("avg_topm_instance_fraction").get<double>();
    ev.top_m = ev_j.at("top_m").get<int>();
    TriggerEventStats tr;
    tr.avg_events_per_top_trigger = tr_j.at("avg_events_per_top_trigger").get<double>();
    tr.top1_fraction = tr_j.at("top1_fraction").get<double>();
    tr.top2_fraction = tr_j.at("top2_fraction").get<double>();
    tr.top_x = tr_j.at("top_x").get<std::vector<int>>();
    tr.topx_fractions = tr_j.at("topx_fractions").get<std::vector<double>>();
    tr.n_triggers = tr_j.at("n_triggers").get<int>();
    std::cout << analyze_table(ev, tr);
    return 0;
  }
  throw Error(opts.in + ": unrecognized report format");
}

// ---------------------------------------------------------------------------

json echo_convert(const ConvertOpts& o) {
  return {{"from", o.from}, {"in", o.in}, {"out", o.out}};
}

json echo_filter(const FilterOpts& o) {
  return {{"in", o.in}, {"out", o.out}, {"min", o.min_count}};
}

json echo_split(const SplitOpts& o) {
  return {{"in", o.in},
          {"spec", o.spec},
          {"out-train", o.out_train},
          {"out-dev", o.out_dev},
          {"out-test", o.out_test}};
}

json echo_analyze(const AnalyzeOpts& o) {
  return {{"corpus", o.corpus},
          {"report", o.report},
          {"top-m", o.top_m},
          {"top-x", o.top_x},
          {"min-count", o.min_count}};
}

json echo_sample(const SampleOpts& o) {
  return {{"corpus", o.corpus}, {"method", o.method},       {"n", o.n_way},
          {"k", o.k_shot},      {"count", o.count},         {"seed", o.seed},
          {"out", o.out},       {"embeddings", o.embeddings}, {"emb-dim", o.emb_dim},
          {"cos-p", o.cos_p},   {"cos-u", o.cos_u},         {"cos-query-uniform", o.cos_query_uniform}};
}

json echo_train(const TrainOpts& o) {
  return {{"corpus", o.corpus},
          {"dev", o.dev},
          {"out", o.out},
          {"embeddings", o.embeddings},
          {"emb-dim", o.emb_dim},
          {"method", o.method},
          {"n", o.n_way},
          {"k", o.k_shot},
          {"lr", o.lr},
          {"episodes-per-epoch", o.episodes_per_epoch},
          {"patience", o.patience},
          {"max-epochs", o.max_epochs},
          {"alpha", o.alpha},
          {"beta", o.beta},
          {"eps", o.eps},
          {"seed", o.seed},
          {"dev-tasks", o.dev_tasks},
          {"cos-p", o.cos_p},
          {"cos-u", o.cos_u},
          {"token-dim", o.token_dim},
          {"pos-dim", o.pos_dim},
          {"window", o.window},
          {"filters", o.filters},
          {"max-len", o.max_len},
          {"vocab-cap", o.vocab_cap},
          {"quiet", o.quiet}};
}

json echo_eval(const EvalOpts& o) {
  return {{"model", o.model},   {"corpus", o.corpus},       {"method", o.method},
          {"n", o.n_way},       {"k", o.k_shot},            {"tasks", o.tasks},
          {"seeds", o.seeds},   {"report", o.report},       {"embeddings", o.embeddings},
          {"emb-dim", o.emb_dim}, {"cos-p", o.cos_p},       {"cos-u", o.cos_u},
          {"cos-query-uniform", o.cos_query_uniform},       {"workers", o.workers}};
}

void apply_config_convert(const json& c, ConvertOpts& o) {
  from_config(c, "from", o.from);
  from_config(c, "in", o.in);
  from_config(c, "out", o.out);
}

void apply_config_filter(const json& c, FilterOpts& o) {
  from_config(c, "in", o.in);
  from_config(c, "out", o.out);
  from_config(c, "min", o.min_count);
}

void apply_config_split(const json& c, SplitOpts& o) {
  from_config(c, "in", o.in);
  from_config(c, "spec", o.spec);
  from_config(c, "out-train", o.out_train);
  from_config(c, "out-dev", o.out_dev);
  from_config(c, "out-test", o.out_test);
}

void apply_config_analyze(const json& c, AnalyzeOpts& o) {
  from_config(c, "corpus", o.corpus);
  from_config(c, "report", o.report);
  from_config(c, "top-m", o.top_m);
  from_config(c, "top-x", o.top_x);
  from_config(c, "min-count", o.min_count);
}

void apply_config_sample(const json& c, SampleOpts& o) {
  from_config(c, "corpus", o.corpus);
  from_config(c, "method", o.method);
  from_config(c, "n", o.n_way);
  from_config(c, "k", o.k_shot);
  from_config(c, "count", o.count);
  from_config(c, "seed", o.seed);
  from_config(c, "out", o.out);
  from_config(c, "embeddings", o.embeddings);
  from_config(c, "emb-dim", o.emb_dim);
  from_config(c, "cos-p", o.cos_p);
  from_config(c, "cos-u", o.cos_u);
  from_config(c, "cos-query-uniform", o.cos_query_uniform);
}

void apply_config_train(const json& c, TrainOpts& o) {
  from_config(c, "corpus", o.corpus);
  from_config(c, "dev", o.dev);
  from_config(c, "out", o.out);
  from_config(c, "embeddings", o.embeddings);
  from_config(c, "emb-dim", o.emb_dim);
  from_config(c, "method", o.method);
  from_config(c, "n", o.n_way);
  from_config(c, "k", o.k_shot);
  from_config(c, "lr", o.lr);
  from_config(c, "episodes-per-epoch", o.episodes_per_epoch);
  from_config(c, "patience", o.patience);
  from_config(c, "max-epochs", o.max_epochs);
  from_config(c, "alpha", o.alpha);
  from_config(c, "beta", o.beta);
  from_config(c, "eps", o.eps);
  from_config(c, "seed", o.seed);
  from_config(c, "dev-tasks", o.dev_tasks);
  from_config(c, "cos-p", o.cos_p);
  from_config(c, "cos-u", o.cos_u);
  from_config(c, "token-dim", o.token_dim);
  from_config(c, "pos-dim", o.pos_dim);
  from_config(c, "window", o.window);
  from_config(c, "filters", o.filters);
  from_config(c, "max-len", o.max_len);
  from_config(c, "vocab-cap", o.vocab_cap);
  from_config(c, "quiet", o.quiet);
}

void apply_config_eval(const json& c, EvalOpts& o) {
  from_config(c, "model", o.model);
  from_config(c, "corpus", o.corpus);
  from_config(c, "method", o.method);
  from_config(c, "n", o.n_way);
  from_config(c, "k", o.k_shot);
  from_config(c, "tasks", o.tasks);
  from_config(c, "seeds", o.seeds);
  from_config(c, "report", o.report);
  from_config(c, "embeddings", o.embeddings);
  from_config(c, "emb-dim", o.emb_dim);
  from_config(c, "cos-p", o.cos_p);
  from_config(c, "cos-u", o.cos_u);
  from_config(c, "cos-query-uniform", o.cos_query_uniform);
  from_config(c, "workers", o.workers);
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"fsec: few-shot event classification benchmark toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (or a run manifest)");

  json config = json::object();
  if (auto path = scan_config_flag(args)) {
    try {
      config = load_config_object(*path);
    } catch (const Error& e) {
      std::cerr << "fsec: error: " << e.what() << "\n";
      return 1;
    }
  }

  ConvertOpts convert_opts;
  FilterOpts filter_opts;
  SplitOpts split_opts;
  AnalyzeOpts analyze_opts;
  SampleOpts sample_opts;
  TrainOpts train_opts;
  EvalOpts eval_opts;
  ReportOpts report_opts;
  try {
    apply_config_convert(config, convert_opts);
    apply_config_filter(config, filter_opts);
    apply_config_split(config, split_opts);
    apply_config_analyze(config, analyze_opts);
    apply_config_sample(config, sample_opts);
    apply_config_train(config, train_opts);
    apply_config_eval(config, eval_opts);
    from_config(config, "in", report_opts.in);
  } catch (const json::exception& e) {
    std::cerr << "fsec: error: bad config value: " << e.what() << "\n";
    return 1;
  }

  CLI::App* corpus_cmd = app.add_subcommand("corpus", "corpus conversion, filtering, splitting");
  corpus_cmd->require_subcommand(1);
  CLI::App* convert_cmd = corpus_cmd->add_subcommand("convert", "convert a source dataset");
  convert_cmd->add_option("--from", convert_opts.from, "source format (maven)");
  convert_cmd->add_option("--in", convert_opts.in, "input file");
  convert_cmd->add_option("--out", convert_opts.out, "canonical output file");
  convert_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* filter_cmd = corpus_cmd->add_subcommand("filter", "drop rare event types");
  filter_cmd->add_option("--in", filter_opts.in, "canonical corpus");
  filter_cmd->add_option("--out", filter_opts.out, "filtered output");
  filter_cmd->add_option("--min", filter_opts.min_count, "minimum instances per event type");
  filter_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* split_cmd = corpus_cmd->add_subcommand("split", "split by event-type lists");
  split_cmd->add_option("--in", split_opts.in, "canonical corpus");
  split_cmd->add_option("--spec", split_opts.spec, "split config (train/dev/test arrays)");
  split_cmd->add_option("--out-train", split_opts.out_train, "train output");
  split_cmd->add_option("--out-dev", split_opts.out_dev, "dev output");
  split_cmd->add_option("--out-test", split_opts.out_test, "test output");
  split_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "unbalanced-distribution diagnostics");
  analyze_cmd->add_option("--corpus", analyze_opts.corpus, "canonical corpus");
  analyze_cmd->add_option("--report", analyze_opts.report, "report output path");
  analyze_cmd->add_option("--top-m", analyze_opts.top_m, "top-M triggers per event");
  analyze_cmd->add_option("--top-x", analyze_opts.top_x, "comma-separated dominant-event cutoffs");
  analyze_cmd->add_option("--min-count", analyze_opts.min_count,
                          "apply the frequency filter before analyzing (0 = off)");
  analyze_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* sample_cmd = app.add_subcommand("sample", "construct N-way-K-shot meta tasks");
  sample_cmd->add_option("--corpus", sample_opts.corpus, "canonical corpus");
  sample_cmd->add_option("--method", sample_opts.method, "ius, tus, or cos");
  sample_cmd->add_option("--n", sample_opts.n_way, "ways per task");
  sample_cmd->add_option("--k", sample_opts.k_shot, "shots per way");
  sample_cmd->add_option("--count", sample_opts.count, "number of tasks");
  sample_cmd->add_option("--seed", sample_opts.seed, "random seed");
  sample_cmd->add_option("--out", sample_opts.out, "task output file");
  sample_cmd->add_option("--embeddings", sample_opts.embeddings, "embedding table (for cos)");
  sample_cmd->add_option("--emb-dim", sample_opts.emb_dim, "embedding dimension");
  sample_cmd->add_option("--cos-p", sample_opts.cos_p, "confusing-draw probability");
  sample_cmd->add_option("--cos-u", sample_opts.cos_u, "confusing-set size per other event");
  sample_cmd->add_flag("--cos-query-uniform", sample_opts.cos_query_uniform,
                       "draw the query trigger uniformly instead of mirroring the support rule");
  sample_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* train_cmd = app.add_subcommand("train", "train the prototypical encoder");
  train_cmd->add_option("--corpus", train_opts.corpus, "train corpus");
  train_cmd->add_option("--dev", train_opts.dev, "dev corpus");
  train_cmd->add_option("--out", train_opts.out, "checkpoint output");
  train_cmd->add_option("--embeddings", train_opts.embeddings, "embedding table");
  train_cmd->add_option("--emb-dim", train_opts.emb_dim, "embedding dimension");
  train_cmd->add_option("--method", train_opts.method, "training sampler");
  train_cmd->add_option("--n", train_opts.n_way, "ways per episode");
  train_cmd->add_option("--k", train_opts.k_shot, "shots per way");
  train_cmd->add_option("--lr", train_opts.lr, "learning rate");
  train_cmd->add_option("--episodes-per-epoch", train_opts.episodes_per_epoch, "episodes per epoch");
  train_cmd->add_option("--patience", train_opts.patience, "early-stopping patience");
  train_cmd->add_option("--max-epochs", train_opts.max_epochs, "epoch cap");
  train_cmd->add_option("--alpha", train_opts.alpha, "adversarial loss weight");
  train_cmd->add_option("--beta", train_opts.beta, "reconstruction loss weight");
  train_cmd->add_option("--eps", train_opts.eps, "adversarial perturbation norm");
  train_cmd->add_option("--seed", train_opts.seed, "random seed");
  train_cmd->add_option("--dev-tasks", train_opts.dev_tasks, "dev tasks per epoch check");
  train_cmd->add_option("--cos-p", train_opts.cos_p, "confusing-draw probability");
  train_cmd->add_option("--cos-u", train_opts.cos_u, "confusing-set size per other event");
  train_cmd->add_option("--token-dim", train_opts.token_dim,
                        "token embedding width (ignored when --embeddings is given)");
  train_cmd->add_option("--pos-dim", train_opts.pos_dim, "position embedding width");
  train_cmd->add_option("--window", train_opts.window, "convolution window");
  train_cmd->add_option("--filters", train_opts.filters, "convolution filters");
  train_cmd->add_option("--max-len", train_opts.max_len, "maximum sentence length");
  train_cmd->add_option("--vocab-cap", train_opts.vocab_cap, "vocabulary cap");
  train_cmd->add_flag("--quiet", train_opts.quiet, "suppress progress output");
  train_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a predictor");
  eval_cmd->add_option("--model", eval_opts.model, "string-match, glove-match, or checkpoint path");
  eval_cmd->add_option("--corpus", eval_opts.corpus, "canonical corpus");
  eval_cmd->add_option("--method", eval_opts.method, "ius, tus, or cos");
  eval_cmd->add_option("--n", eval_opts.n_way, "ways per task");
  eval_cmd->add_option("--k", eval_opts.k_shot, "shots per way");
  eval_cmd->add_option("--tasks", eval_opts.tasks, "tasks per seed");
  eval_cmd->add_option("--seeds", eval_opts.seeds, "comma-separated seeds");
  eval_cmd->add_option("--report", eval_opts.report, "report output path");
  eval_cmd->add_option("--embeddings", eval_opts.embeddings, "embedding table");
  eval_cmd->add_option("--emb-dim", eval_opts.emb_dim, "embedding dimension");
  eval_cmd->add_option("--cos-p", eval_opts.cos_p, "confusing-draw probability");
  eval_cmd->add_option("--cos-u", eval_opts.cos_u, "confusing-set size per other event");
  eval_cmd->add_flag("--cos-query-uniform", eval_opts.cos_query_uniform,
                     "draw the query trigger uniformly instead of mirroring the support rule");
  eval_cmd->add_option("--workers", eval_opts.workers, "evaluation fan-out");
  eval_cmd->add_option("--config", config_path, "JSON config file");

  CLI::App* report_cmd = app.add_subcommand("report", "render a machine-readable report");
  report_cmd->add_option("--in", report_opts.in, "report JSON");
  report_cmd->add_option("--config", config_path, "JSON config file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (convert_cmd->parsed()) return run_convert(convert_opts, echo_convert(convert_opts));
    if (filter_cmd->parsed()) return run_filter(filter_opts, echo_filter(filter_opts));
    if (split_cmd->parsed()) return run_split(split_opts, echo_split(split_opts));
    if (analyze_cmd->parsed()) return run_analyze(analyze_opts, echo_analyze(analyze_opts));
    if (sample_cmd->parsed()) return run_sample(sample_opts, echo_sample(sample_opts));
    if (train_cmd->parsed()) return run_train(train_opts, echo_train(train_opts));
    if (eval_cmd->parsed()) return run_eval(eval_opts, echo_eval(eval_opts));
    if (report_cmd->parsed()) return run_report(report_opts);
  } catch (const std::exception& e) {
    std::cerr << "fsec: error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "fsec: no subcommand given\n";
  return 2;
}

}  // namespace fsec::cli
