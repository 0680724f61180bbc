#include "fsec/train_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fsec/baselines.hpp"
#include "fsec/error.hpp"

namespace fsec {

namespace {

constexpr std::uint64_t kInitStreamTag = 0x696e6974ull;   // parameter init
constexpr std::uint64_t kDevStreamTag = 0x64657600ull;    // dev task pool
constexpr std::uint64_t kTrainStreamTag = 0x747261696eull;  // episode streams

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
};

// Tensor list pairing params with grads; order fixed.
template <typename Params, typename Grads>
auto tensor_pairs(Params& p, Grads& g) {
  return std::array{
      std::pair{&p.token_embeddings, &g.token_embeddings},
      std::pair{&p.position_embeddings, &g.position_embeddings},
      std::pair{&p.conv_weight, &g.conv_weight},
      std::pair{&p.conv_bias, &g.conv_bias},
      std::pair{&p.rec_weight, &g.rec_weight},
      std::pair{&p.rec_bias, &g.rec_bias},
  };
}

class Adam {
 public:
  Adam(const EncoderParams& params, double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    EncoderGrads zeros = EncoderGrads::zeros_like(params);
    for (auto [p, g] : tensor_pairs(params, zeros)) {
      (void)p;
      states_.push_back(AdamState{*g, *g});
    }
  }

  void step(EncoderParams& params, const EncoderGrads& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    std::size_t slot = 0;
    for (auto [p, g] : tensor_pairs(params, grads)) {
      AdamState& s = states_[slot++];
      for (std::size_t i = 0; i < p->size(); ++i) {
        const double gi = (*g)[i];
        s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * gi;
        s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * gi * gi;
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        (*p)[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<AdamState> states_;
};

}  // namespace

EncoderParams train(const Corpus& train_corpus, const Corpus& dev_corpus,
                    const EmbeddingTable* table, const TrainConfig& cfg) {
  if (cfg.patience < 1) throw Error("train: patience must be >= 1");
  if (cfg.lr < 0.0) throw Error("train: learning rate must be >= 0");
  if (cfg.episodes_per_epoch < 1) throw Error("train: episodes_per_epoch must be >= 1");
  if (cfg.max_epochs < 1) throw Error("train: max_epochs must be >= 1");

  SamplerConfig train_scfg;
  train_scfg.n_way = cfg.n_way;
  train_scfg.k_shot = cfg.k_shot;
  train_scfg.method = cfg.train_method;
  train_scfg.cos_p = cfg.cos_p;
  train_scfg.cos_u = cfg.cos_u;
  EpisodeSampler train_sampler(train_corpus, train_scfg, table);

  SamplerConfig dev_scfg = train_scfg;
  dev_scfg.method = SampleMethod::kIus;
  EpisodeSampler dev_sampler(dev_corpus, dev_scfg);

  Vocabulary vocab = Vocabulary::build(train_corpus, cfg.encoder.vocab_cap);
  EncoderParams params =
      EncoderParams::init(cfg.encoder, std::move(vocab), table, splitmix64(cfg.seed ^ kInitStreamTag));

  // Fixed dev pool so epoch accuracies are comparable.
  std::vector<MetaTask> dev_pool;
  {
    Rng dev_rng(splitmix64(cfg.seed ^ kDevStreamTag));
    dev_pool.reserve(static_cast<std::size_t>(cfg.dev_tasks));
    for (int i = 0; i < cfg.dev_tasks; ++i) dev_pool.push_back(dev_sampler.sample(dev_rng));
  }

  Adam optimizer(params, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  const std::uint64_t episode_stream_base = splitmix64(cfg.seed ^ kTrainStreamTag);

  EncoderParams best = params;
  double best_acc = -1.0;
  int epochs_without_improvement = 0;
  std::int64_t episode_counter = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (int i = 0; i < cfg.episodes_per_epoch; ++i) {
      const std::uint64_t episode_seed =
          splitmix64(episode_stream_base + static_cast<std::uint64_t>(episode_counter));
      Rng rng(episode_seed);
      const MetaTask task = train_sampler.sample(rng);
      CombinedResult result;
      try {
        result = combined_loss(params, train_corpus, task, cfg.alpha, cfg.beta, cfg.eps);
      } catch (const Error& e) {
        throw Error(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", episode " +
                    std::to_string(episode_counter) + ", episode seed " +
                    std::to_string(episode_seed) + ")");
      }
      optimizer.step(params, result.grads);
      if (cfg.on_episode) cfg.on_episode(epoch, episode_counter, result.loss);
      ++episode_counter;
    }

    int correct = 0;
    for (const MetaTask& task : dev_pool) {
      if (predict_task(params, dev_corpus, task) == task.gold_index) ++correct;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(dev_pool.size());
    const bool improved = acc > best_acc;
    if (improved) {
      best_acc = acc;
      best = params;
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
    }
    if (cfg.on_epoch) cfg.on_epoch(epoch, acc, improved);
    if (epochs_without_improvement >= cfg.patience) break;
  }
  return best;
}

EvalReport evaluate_with(const Corpus& corpus, const EmbeddingTable* table,
                         const SamplerConfig& sampler_cfg, int n_tasks,
                         const std::vector<std::uint64_t>& seeds, const Predictor& predictor,
                         int workers, const std::string& model_name) {
  if (n_tasks < 1) throw Error("evaluate: n_tasks must be >= 1");
  if (seeds.empty()) throw Error("evaluate: need at least one seed");
  if (workers < 1) throw Error("evaluate: workers must be >= 1");

  EvalReport report;
  report.model = model_name;
  report.method = to_string(sampler_cfg.method);
  report.n_way = sampler_cfg.n_way;
  report.k_shot = sampler_cfg.k_shot;
  report.n_tasks = n_tasks;
  report.seeds = seeds;

  for (const std::uint64_t seed : seeds) {
    std::vector<std::int64_t> correct(static_cast<std::size_t>(workers), 0);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

    auto run_worker = [&](int w) {
      try {
        EpisodeSampler sampler(corpus, sampler_cfg, table);
        Rng rng(seed + static_cast<std::uint64_t>(w));
        const int base = n_tasks / workers;
        const int extra = w < n_tasks % workers ? 1 : 0;
        const int share = base + extra;
        for (int i = 0; i < share; ++i) {
          const MetaTask task = sampler.sample(rng);
          if (predictor(task, rng) == task.gold_index) ++correct[static_cast<std::size_t>(w)];
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    };

    if (workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) threads.emplace_back(run_worker, w);
      for (auto& t : threads) t.join();
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    std::int64_t total_correct = 0;
    for (std::int64_t c : correct) total_correct += c;
    report.per_seed_accuracy.push_back(static_cast<double>(total_correct) /
                                       static_cast<double>(n_tasks));
  }

  double mean = 0.0;
  for (double a : report.per_seed_accuracy) mean += a;
  mean /= static_cast<double>(report.per_seed_accuracy.size());
  double var = 0.0;
  for (double a : report.per_seed_accuracy) var += (a - mean) * (a - mean);
  var /= static_cast<double>(report.per_seed_accuracy.size());
  report.mean = mean;
  report.stddev = std::sqrt(var);
  return report;
}

EvalReport evaluate(const Corpus& corpus, const EmbeddingTable* table,
                    const EncoderParams* encoder_params, ModelKind kind,
                    const SamplerConfig& sampler_cfg, int n_tasks,
                    const std::vector<std::uint64_t>& seeds, int workers) {
  Predictor predictor;
  std::string name;
  switch (kind) {
    case ModelKind::kStringMatch:
      name = "string-match";
      predictor = [&corpus](const MetaTask& task, Rng& rng) {
        return string_match_predict(corpus, task, rng).label_index;
      };
      break;
    case ModelKind::kGloveMatch:
      if (table == nullptr) throw Error("glove-match requires an embedding table");
      name = "glove-match";
      predictor = [&corpus, table](const MetaTask& task, Rng&) {
        return glove_match_predict(corpus, task, *table).label_index;
      };
      break;
    case ModelKind::kEncoder:
      if (encoder_params == nullptr) throw Error("encoder evaluation requires a checkpoint");
      name = "encoder";
      predictor = [&corpus, encoder_params](const MetaTask& task, Rng&) {
        return predict_task(*encoder_params, corpus, task);
      };
      break;
  }
  return evaluate_with(corpus, table, sampler_cfg, n_tasks, seeds, predictor, workers, name);
}

}  // namespace fsec
