#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"
#include "fsec/encoder.hpp"
#include "fsec/sampling.hpp"

namespace fsec {

struct TrainConfig {
  int n_way = 5;
  int k_shot = 5;
  SampleMethod train_method = SampleMethod::kIus;
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
  // Standard published Adam moments.
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  EncoderConfig encoder;

  // Optional observers; not part of the persisted configuration.
  std::function<void(int epoch, std::int64_t episode, const EpisodeLoss&)> on_episode;
  std::function<void(int epoch, double dev_accuracy, bool improved)> on_epoch;
};

// Episode training with Adam and dev-accuracy early stopping. The dev set is
// a fixed pool of IUS tasks sampled once from a seed-derived stream; training
// stops after `patience` epochs without improvement and the best-dev
// checkpoint is returned. Deterministic given (corpora, config).
EncoderParams train(const Corpus& train_corpus, const Corpus& dev_corpus,
                    const EmbeddingTable* table, const TrainConfig& cfg);

struct EvalReport {
  std::string model;
  std::string method;
  int n_way = 0;
  int k_shot = 0;
  int n_tasks = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> per_seed_accuracy;  // in [0, 1]
  double mean = 0.0;
  double stddev = 0.0;  // population std over seeds
};

// Returns the predicted way index for a task; may consume randomness.
using Predictor = std::function<int(const MetaTask&, Rng&)>;

// Per seed, samples n_tasks episodes and counts exact-match predictions.
// Workers shard a seed's tasks; worker w draws from stream (seed + w), so a
// single-worker run equals the plain sequential run.
EvalReport evaluate_with(const Corpus& corpus, const EmbeddingTable* table,
                         const SamplerConfig& sampler_cfg, int n_tasks,
                         const std::vector<std::uint64_t>& seeds, const Predictor& predictor,
                         int workers, const std::string& model_name);

enum class ModelKind { kStringMatch, kGloveMatch, kEncoder };

EvalReport evaluate(const Corpus& corpus, const EmbeddingTable* table,
                    const EncoderParams* encoder_params, ModelKind kind,
                    const SamplerConfig& sampler_cfg, int n_tasks,
                    const std::vector<std::uint64_t>& seeds, int workers = 1);

}  // namespace fsec
