#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"
#include "fsec/encoder.hpp"
#include "fsec/rng.hpp"
#include "fsec/sampling.hpp"

namespace fsec::testing {

// ---------------------------------------------------------------------------
// Independent re-implementation of the trigger partition, written directly
// from the procedure's definition with no shared code: for every other event
// and every trigger of the target event, compute the mean distance to the
// event's own triggers and to the other event's triggers, combine, and take
// the U smallest per other event.

struct OraclePartition {
  std::set<std::string> confusing;
  std::set<std::string> non_confusing;
  // (other event, trigger) -> (d_inner, d_inter, d_com)
  std::map<std::pair<std::string, std::string>, std::array<double, 3>> scores;
};

inline OraclePartition oracle_partition(const std::string& event,
                                        const std::vector<std::string>& others,
                                        const Corpus& corpus, const EmbeddingTable& table,
                                        int top_u) {
  auto triggers_of = [&](const std::string& ev) {
    std::vector<std::string> out;
    for (const auto& [form, ids] : corpus.event(ev).by_trigger) {
      (void)ids;
      out.push_back(form);
    }
    return out;
  };
  auto dist = [&](const std::string& a, const std::string& b) {
    const auto va = table.lookup(a);
    const auto vb = table.lookup(b);
    double sq = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double d = static_cast<double>(va[i]) - static_cast<double>(vb[i]);
      sq += d * d;
    }
    return std::sqrt(sq);
  };

  const std::vector<std::string> te = triggers_of(event);
  OraclePartition out;
  for (const std::string& other : others) {
    const std::vector<std::string> to = triggers_of(other);
    std::vector<std::pair<double, std::string>> scored;
    for (const std::string& t : te) {
      double inner = 0.0;
      for (const std::string& t2 : te) inner += dist(t, t2);
      inner /= static_cast<double>(te.size());
      double inter = 0.0;
      for (const std::string& t2 : to) inter += dist(t, t2);
      inter /= static_cast<double>(to.size());
      const double com = -inner + inter;
      out.scores[{other, t}] = {inner, inter, com};
      scored.emplace_back(com, t);
    }
    std::sort(scored.begin(), scored.end());
    for (std::size_t r = 0; r < scored.size() && r < static_cast<std::size_t>(top_u); ++r) {
      out.confusing.insert(scored[r].second);
    }
  }
  for (const std::string& t : te) {
    if (!out.confusing.count(t)) out.non_confusing.insert(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Central finite differences over every parameter tensor. The loss functor
// must evaluate the loss for a given parameter setting without touching
// gradients.

template <typename LossFn>
inline std::vector<double> fd_gradient(EncoderParams params, std::vector<double> EncoderParams::*tensor,
                                       const LossFn& loss, double h = 1e-4) {
  std::vector<double>& values = params.*tensor;
  std::vector<double> grad(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double above = loss(params);
    values[i] = saved - h;
    const double below = loss(params);
    values[i] = saved;
    grad[i] = (above - below) / (2.0 * h);
  }
  return grad;
}

// |a - n| / max(|a|, |n|, 1e-4): relative where the gradient is appreciable,
// absolute (at 1e-8 scale) in the noise regime.
inline double gradient_mismatch(const std::vector<double>& analytic,
                                const std::vector<double>& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-4});
    worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

struct GradCheckReport {
  double worst = 0.0;
  std::string worst_tensor;
};

template <typename LossFn>
inline GradCheckReport check_all_tensors(const EncoderParams& params, const EncoderGrads& grads,
                                         const LossFn& loss, double h = 1e-4) {
  GradCheckReport report;
  auto check = [&](const char* name, std::vector<double> EncoderParams::*p,
                   const std::vector<double>& analytic) {
    const std::vector<double> numeric = fd_gradient(params, p, loss, h);
    const double err = gradient_mismatch(analytic, numeric);
    if (err > report.worst) {
      report.worst = err;
      report.worst_tensor = name;
    }
  };
  check("token_embeddings", &EncoderParams::token_embeddings, grads.token_embeddings);
  check("position_embeddings", &EncoderParams::position_embeddings, grads.position_embeddings);
  check("conv_weight", &EncoderParams::conv_weight, grads.conv_weight);
  check("conv_bias", &EncoderParams::conv_bias, grads.conv_bias);
  check("rec_weight", &EncoderParams::rec_weight, grads.rec_weight);
  check("rec_bias", &EncoderParams::rec_bias, grads.rec_bias);
  return report;
}

// Small random episodes over a tiny corpus, for the gradient suite.
struct TinyEpisode {
  Corpus corpus;
  MetaTask task;
  EncoderParams params;
};

inline TinyEpisode make_tiny_episode(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<std::string> words = {"aa", "bb", "cc", "dd", "ee", "ff", "gg", "hh"};
  std::vector<Instance> instances;
  for (int e = 0; e < 3; ++e) {
    for (int i = 0; i < 3; ++i) {
      const int len = 2 + static_cast<int>(rng.uniform_index(5));  // 2..6 tokens
      std::vector<std::string> tokens;
      for (int t = 0; t < len; ++t) tokens.push_back(words[rng.uniform_index(words.size())]);
      instances.push_back(
          make_instance(std::move(tokens), static_cast<int>(rng.uniform_index(
                                               static_cast<std::size_t>(len))),
                        "E" + std::to_string(e)));
    }
  }

  TinyEpisode ep;
  ep.corpus = Corpus::from_instances(std::move(instances));

  SamplerConfig scfg;
  scfg.n_way = 2;
  scfg.k_shot = 2;
  scfg.method = SampleMethod::kIus;
  EpisodeSampler sampler(ep.corpus, scfg);
  ep.task = sampler.sample(rng);

  EncoderConfig ecfg;
  ecfg.token_dim = 3;
  ecfg.pos_dim = 2;
  ecfg.window = 3;
  ecfg.filters = 4;
  ecfg.max_len = 8;
  ecfg.vocab_cap = 8;
  Vocabulary vocab = Vocabulary::build(ep.corpus, ecfg.vocab_cap);
  ep.params = EncoderParams::init(ecfg, std::move(vocab), nullptr, splitmix64(seed));
  // Widen activation margins so the h=1e-4 probes stay clear of the ReLU and
  // max-pool kinks.
  for (auto* tensor : {&ep.params.token_embeddings, &ep.params.position_embeddings,
                       &ep.params.conv_weight, &ep.params.rec_weight}) {
    for (double& x : *tensor) x *= 5.0;
  }
  return ep;
}

}  // namespace fsec::testing
