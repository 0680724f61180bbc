#include "fsec/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "fsec/error.hpp"
#include "fsec/rng.hpp"

namespace fsec {

namespace {

constexpr double kDistFloor = 1e-12;
constexpr double kGradNormFloor = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  tokens_ = {"<oov>", "<mask>"};
  ids_ = {{"<oov>", kOovId}, {"<mask>", kMaskId}};
}

Vocabulary Vocabulary::build(const Corpus& corpus, int cap) {
  if (cap < 1) throw Error("vocabulary cap must be >= 1");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const Instance& ins : corpus.instances()) {
    for (const std::string& tok : ins.tokens) ++counts[ascii_lower(tok)];
  }
  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  const std::size_t take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(cap));
  for (std::size_t i = 0; i < take; ++i) {
    vocab.ids_.emplace(ranked[i].first, static_cast<int>(vocab.tokens_.size()));
    vocab.tokens_.push_back(ranked[i].first);
  }
  return vocab;
}

Vocabulary Vocabulary::from_token_list(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != "<oov>" || tokens[1] != "<mask>") {
    throw Error("vocabulary token list must start with <oov>, <mask>");
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.ids_.clear();
  for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
    vocab.ids_.emplace(vocab.tokens_[i], static_cast<int>(i));
  }
  return vocab;
}

int Vocabulary::id_of(std::string_view token) const {
  auto it = ids_.find(ascii_lower(token));
  if (it == ids_.end()) return kOovId;
  return it->second;
}

// ---------------------------------------------------------------------------
// Parameters

EncoderParams EncoderParams::init(const EncoderConfig& config, Vocabulary vocab,
                                  const EmbeddingTable* table, std::uint64_t seed) {
  if (config.token_dim < 1 || config.pos_dim < 0 || config.window < 1 || config.filters < 1 ||
      config.max_len < 1) {
    throw Error("invalid encoder configuration");
  }
  if (table != nullptr && table->dim() != config.token_dim) {
    throw Error("embedding table dimension " + std::to_string(table->dim()) +
                " does not match encoder token_dim " + std::to_string(config.token_dim));
  }
  EncoderParams p;
  p.config = config;
  p.vocab = std::move(vocab);
  const std::size_t v = static_cast<std::size_t>(p.vocab.size());
  const std::size_t dw = static_cast<std::size_t>(config.token_dim);
  const std::size_t dp = static_cast<std::size_t>(config.pos_dim);
  const std::size_t f = static_cast<std::size_t>(config.filters);
  const std::size_t w = static_cast<std::size_t>(config.window);
  const std::size_t pos_rows = 2 * static_cast<std::size_t>(config.max_len) + 1;

  Rng rng(seed);
  auto uniform = [&rng]() { return rng.uniform_real() * 0.2 - 0.1; };

  p.token_embeddings.resize(v * dw);
  for (std::size_t row = 0; row < v; ++row) {
    const std::string& tok = p.vocab.tokens()[row];
    const bool from_table = table != nullptr && row >= 2 && table->contains(tok);
    if (from_table) {
      const auto span = table->lookup(tok);
      for (std::size_t c = 0; c < dw; ++c) p.token_embeddings[row * dw + c] = span[c];
    } else {
      for (std::size_t c = 0; c < dw; ++c) p.token_embeddings[row * dw + c] = uniform();
    }
  }
  p.position_embeddings.resize(pos_rows * dp);
  for (double& x : p.position_embeddings) x = uniform();
  p.conv_weight.resize(f * w * (dw + dp));
  for (double& x : p.conv_weight) x = uniform();
  p.conv_bias.assign(f, 0.0);
  p.rec_weight.resize(f * v);
  for (double& x : p.rec_weight) x = uniform();
  p.rec_bias.assign(v, 0.0);
  return p;
}

EncoderGrads EncoderGrads::zeros_like(const EncoderParams& params) {
  EncoderGrads g;
  g.token_embeddings.assign(params.token_embeddings.size(), 0.0);
  g.position_embeddings.assign(params.position_embeddings.size(), 0.0);
  g.conv_weight.assign(params.conv_weight.size(), 0.0);
  g.conv_bias.assign(params.conv_bias.size(), 0.0);
  g.rec_weight.assign(params.rec_weight.size(), 0.0);
  g.rec_bias.assign(params.rec_bias.size(), 0.0);
  return g;
}

void EncoderGrads::add_scaled(const EncoderGrads& other, double scale) {
  auto add = [scale](std::vector<double>& dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
  };
  add(token_embeddings, other.token_embeddings);
  add(position_embeddings, other.position_embeddings);
  add(conv_weight, other.conv_weight);
  add(conv_bias, other.conv_bias);
  add(rec_weight, other.rec_weight);
  add(rec_bias, other.rec_bias);
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

struct ForwardCache {
  int length = 0;
  int trigger_pos = 0;
  std::vector<int> token_ids;  // after masking
  std::vector<int> pos_rows;
  std::vector<double> input;  // length x (dw+dp)
  std::vector<double> pre;    // length x filters
  std::vector<double> act;    // length x filters
  std::vector<int> argmax;    // per filter, first maximum
  std::vector<double> repr;   // filters
};

void forward_instance(const EncoderParams& params, const Instance& instance, bool masked,
                      std::span<const double> trigger_delta, ForwardCache& cache) {
  const EncoderConfig& cfg = params.config;
  const int dw = cfg.token_dim;
  const int dp = cfg.pos_dim;
  const int channels = dw + dp;
  const int n_filters = cfg.filters;
  const int window = cfg.window;
  const int left_pad = (window - 1) / 2;

  if (instance.tokens.empty()) throw Error("encode: empty instance");
  if (instance.trigger_index < 0 ||
      static_cast<std::size_t>(instance.trigger_index) >= instance.tokens.size()) {
    throw Error("encode: trigger index out of range");
  }
  if (!trigger_delta.empty() && trigger_delta.size() != static_cast<std::size_t>(dw)) {
    throw Error("encode: trigger delta has wrong length");
  }

  // Truncate around the trigger so it always stays inside the window.
  int total = static_cast<int>(instance.tokens.size());
  int start = 0;
  int length = total;
  if (total > cfg.max_len) {
    length = cfg.max_len;
    start = instance.trigger_index - cfg.max_len / 2;
    start = std::clamp(start, 0, total - cfg.max_len);
  }
  const int trigger_pos = instance.trigger_index - start;

  cache.length = length;
  cache.trigger_pos = trigger_pos;
  cache.token_ids.resize(static_cast<std::size_t>(length));
  cache.pos_rows.resize(static_cast<std::size_t>(length));
  cache.input.assign(static_cast<std::size_t>(length) * channels, 0.0);
  for (int t = 0; t < length; ++t) {
    int id = params.vocab.id_of(instance.tokens[static_cast<std::size_t>(start + t)]);
    if (masked && t == trigger_pos) id = Vocabulary::kMaskId;
    cache.token_ids[static_cast<std::size_t>(t)] = id;
    const int offset = std::clamp(t - trigger_pos, -cfg.max_len, cfg.max_len);
    const int pos_row = offset + cfg.max_len;
    cache.pos_rows[static_cast<std::size_t>(t)] = pos_row;

    double* row = &cache.input[static_cast<std::size_t>(t) * channels];
    const double* tok = &params.token_embeddings[static_cast<std::size_t>(id) * dw];
    for (int c = 0; c < dw; ++c) row[c] = tok[c];
    if (!trigger_delta.empty() && t == trigger_pos) {
      for (int c = 0; c < dw; ++c) row[c] += trigger_delta[static_cast<std::size_t>(c)];
    }
    if (dp > 0) {
      const double* pos = &params.position_embeddings[static_cast<std::size_t>(pos_row) * dp];
      for (int c = 0; c < dp; ++c) row[dw + c] = pos[c];
    }
  }

  cache.pre.assign(static_cast<std::size_t>(length) * n_filters, 0.0);
  cache.act.assign(static_cast<std::size_t>(length) * n_filters, 0.0);
  for (int i = 0; i < length; ++i) {
    for (int f = 0; f < n_filters; ++f) {
      double acc = params.conv_bias[static_cast<std::size_t>(f)];
      const double* wrow =
          &params.conv_weight[static_cast<std::size_t>(f) * window * channels];
      for (int j = 0; j < window; ++j) {
        const int p = i - left_pad + j;
        if (p < 0 || p >= length) continue;  // zero padding
        const double* in = &cache.input[static_cast<std::size_t>(p) * channels];
        const double* wj = wrow + static_cast<std::size_t>(j) * channels;
        for (int c = 0; c < channels; ++c) acc += wj[c] * in[c];
      }
      cache.pre[static_cast<std::size_t>(i) * n_filters + f] = acc;
      cache.act[static_cast<std::size_t>(i) * n_filters + f] = acc > 0.0 ? acc : 0.0;
    }
  }

  cache.repr.assign(static_cast<std::size_t>(n_filters), 0.0);
  cache.argmax.assign(static_cast<std::size_t>(n_filters), 0);
  for (int f = 0; f < n_filters; ++f) {
    double best = cache.act[static_cast<std::size_t>(f)];
    int best_i = 0;
    for (int i = 1; i < length; ++i) {
      const double v = cache.act[static_cast<std::size_t>(i) * n_filters + f];
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    cache.repr[static_cast<std::size_t>(f)] = best;
    cache.argmax[static_cast<std::size_t>(f)] = best_i;
  }
}

// Backpropagates gradients that arrive on activation entries (position,
// filter, value). Accumulates into grads and, when trigger_grad is given,
// writes the gradient w.r.t. the trigger-embedding input vector.
void backward_instance(const EncoderParams& params, const ForwardCache& cache,
                       const std::vector<std::pair<int, double>>& act_grads_by_filter,
                       const std::vector<int>& filters_touched, EncoderGrads& grads,
                       std::vector<double>* trigger_grad) {
  const EncoderConfig& cfg = params.config;
  const int dw = cfg.token_dim;
  const int dp = cfg.pos_dim;
  const int channels = dw + dp;
  const int n_filters = cfg.filters;
  const int window = cfg.window;
  const int left_pad = (window - 1) / 2;
  const int length = cache.length;

  std::vector<double> grad_input(static_cast<std::size_t>(length) * channels, 0.0);
  for (int f : filters_touched) {
    const auto& [pos, g_act] = act_grads_by_filter[static_cast<std::size_t>(f)];
    if (g_act == 0.0) continue;
    if (cache.pre[static_cast<std::size_t>(pos) * n_filters + f] <= 0.0) continue;  // ReLU
    const double g = g_act;
    grads.conv_bias[static_cast<std::size_t>(f)] += g;
    double* gwrow = &grads.conv_weight[static_cast<std::size_t>(f) * window * channels];
    const double* wrow = &params.conv_weight[static_cast<std::size_t>(f) * window * channels];
    for (int j = 0; j < window; ++j) {
      const int p = pos - left_pad + j;
      if (p < 0 || p >= length) continue;
      const double* in = &cache.input[static_cast<std::size_t>(p) * channels];
      double* gin = &grad_input[static_cast<std::size_t>(p) * channels];
      double* gwj = gwrow + static_cast<std::size_t>(j) * channels;
      const double* wj = wrow + static_cast<std::size_t>(j) * channels;
      for (int c = 0; c < channels; ++c) {
        gwj[c] += g * in[c];
        gin[c] += g * wj[c];
      }
    }
  }

  for (int t = 0; t < length; ++t) {
    const double* gin = &grad_input[static_cast<std::size_t>(t) * channels];
    double* gtok =
        &grads.token_embeddings[static_cast<std::size_t>(cache.token_ids[static_cast<std::size_t>(t)]) * dw];
    for (int c = 0; c < dw; ++c) gtok[c] += gin[c];
    if (dp > 0) {
      double* gpos =
          &grads.position_embeddings[static_cast<std::size_t>(cache.pos_rows[static_cast<std::size_t>(t)]) * dp];
      for (int c = 0; c < dp; ++c) gpos[c] += gin[dw + c];
    }
  }

  if (trigger_grad != nullptr) {
    trigger_grad->assign(static_cast<std::size_t>(dw), 0.0);
    const double* gin = &grad_input[static_cast<std::size_t>(cache.trigger_pos) * channels];
    for (int c = 0; c < dw; ++c) (*trigger_grad)[static_cast<std::size_t>(c)] = gin[c];
  }
}

std::vector<const Instance*> episode_instances(const Corpus& corpus, const MetaTask& task) {
  std::vector<const Instance*> out;
  for (const auto& row : task.support) {
    for (int id : row) out.push_back(&corpus.instance(id));
  }
  out.push_back(&corpus.instance(task.query));
  return out;
}

struct CeForwardState {
  std::vector<ForwardCache> caches;           // episode order
  std::vector<std::vector<double>> prototypes;
  std::vector<double> dist;
  std::vector<double> probs;
  double loss = 0.0;
};

void ce_forward_pass(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                     const std::vector<std::vector<double>>* deltas, CeForwardState& state) {
  const std::size_t n = task.event_types.size();
  const std::size_t k = task.support.empty() ? 0 : task.support[0].size();
  if (n == 0 || k == 0) throw Error("episode has no support instances");
  const std::size_t total = n * k + 1;
  if (deltas != nullptr && deltas->size() != total) {
    throw Error("episode deltas must cover every instance");
  }
  const auto instances = episode_instances(corpus, task);

  state.caches.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::span<const double> delta;
    if (deltas != nullptr && !(*deltas)[i].empty()) delta = (*deltas)[i];
    forward_instance(params, *instances[i], /*masked=*/false, delta, state.caches[i]);
  }

  const std::size_t f = static_cast<std::size_t>(params.config.filters);
  state.prototypes.assign(n, std::vector<double>(f, 0.0));
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t shot = 0; shot < k; ++shot) {
      const auto& repr = state.caches[row * k + shot].repr;
      for (std::size_t c = 0; c < f; ++c) state.prototypes[row][c] += repr[c];
    }
    for (std::size_t c = 0; c < f; ++c) state.prototypes[row][c] /= static_cast<double>(k);
  }

  const auto& q = state.caches[total - 1].repr;
  state.dist.assign(n, 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    double sq = 0.0;
    for (std::size_t c = 0; c < f; ++c) {
      const double d = q[c] - state.prototypes[row][c];
      sq += d * d;
    }
    state.dist[row] = std::sqrt(sq);
  }

  const double shift = *std::min_element(state.dist.begin(), state.dist.end());
  state.probs.assign(n, 0.0);
  double z = 0.0;
  for (std::size_t row = 0; row < n; ++row) {
    state.probs[row] = std::exp(-(state.dist[row] - shift));
    z += state.probs[row];
  }
  for (double& p : state.probs) p /= z;

  const std::size_t gold = static_cast<std::size_t>(task.gold_index);
  state.loss = (state.dist[gold] - shift) + std::log(z);
  if (!std::isfinite(state.loss)) throw Error("numerical overflow in episode loss");
}

CeResult ce_backward_pass(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                          const std::vector<std::vector<double>>* deltas) {
  CeForwardState state;
  ce_forward_pass(params, corpus, task, deltas, state);

  const std::size_t n = task.event_types.size();
  const std::size_t k = task.support[0].size();
  const std::size_t total = n * k + 1;
  const std::size_t f = static_cast<std::size_t>(params.config.filters);
  const std::size_t gold = static_cast<std::size_t>(task.gold_index);
  const auto& q = state.caches[total - 1].repr;

  CeResult result;
  result.l_ce = state.loss;
  result.grads = EncoderGrads::zeros_like(params);
  result.trigger_grads.resize(total);

  // d loss / d dist_k = 1[k = gold] - P_k
  std::vector<double> grad_query(f, 0.0);
  std::vector<std::vector<double>> grad_proto(n, std::vector<double>(f, 0.0));
  for (std::size_t row = 0; row < n; ++row) {
    const double gdist = (row == gold ? 1.0 : 0.0) - state.probs[row];
    const double denom = std::max(state.dist[row], kDistFloor);
    for (std::size_t c = 0; c < f; ++c) {
      const double unit = (q[c] - state.prototypes[row][c]) / denom;
      grad_query[c] += gdist * unit;
      grad_proto[row][c] = -gdist * unit;
    }
  }

  auto backprop_repr = [&](std::size_t idx, const std::vector<double>& grad_repr) {
    const ForwardCache& cache = state.caches[idx];
    std::vector<std::pair<int, double>> by_filter(f, {0, 0.0});
    std::vector<int> touched;
    for (std::size_t c = 0; c < f; ++c) {
      if (grad_repr[c] != 0.0) {
        by_filter[c] = {cache.argmax[c], grad_repr[c]};
        touched.push_back(static_cast<int>(c));
      }
    }
    backward_instance(params, cache, by_filter, touched, result.grads,
                      &result.trigger_grads[idx]);
  };

  std::vector<double> grad_repr(f);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t c = 0; c < f; ++c) grad_repr[c] = grad_proto[row][c] / static_cast<double>(k);
    for (std::size_t shot = 0; shot < k; ++shot) backprop_repr(row * k + shot, grad_repr);
  }
  backprop_repr(total - 1, grad_query);
  return result;
}

}  // namespace

EncodeResult encode(const EncoderParams& params, const Instance& instance, bool masked,
                    std::span<const double> trigger_delta) {
  ForwardCache cache;
  forward_instance(params, instance, masked, trigger_delta, cache);
  EncodeResult out;
  out.length = cache.length;
  out.trigger_pos = cache.trigger_pos;
  out.repr = std::move(cache.repr);
  out.per_position = std::move(cache.act);
  return out;
}

CeResult episode_loss_ce(const EncoderParams& params, const Corpus& corpus, const MetaTask& task) {
  return ce_backward_pass(params, corpus, task, nullptr);
}

double ce_forward(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                  const std::vector<std::vector<double>>* deltas) {
  CeForwardState state;
  ce_forward_pass(params, corpus, task, deltas, state);
  return state.loss;
}

std::vector<double> fgm_delta(std::span<const double> g_tri, double eps) {
  if (eps <= 0.0) throw Error("fgm_delta: eps must be positive");
  double sq = 0.0;
  for (double g : g_tri) sq += g * g;
  const double norm = std::sqrt(sq);
  std::vector<double> delta(g_tri.size(), 0.0);
  if (norm < kGradNormFloor) return delta;
  const double scale = eps / norm;
  for (std::size_t i = 0; i < g_tri.size(); ++i) delta[i] = scale * g_tri[i];
  return delta;
}

AdvResult adversarial_loss(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                           const std::vector<std::vector<double>>& deltas) {
  CeResult ce = ce_backward_pass(params, corpus, task, &deltas);
  AdvResult result;
  result.l_adv = ce.l_ce;
  result.grads = std::move(ce.grads);
  return result;
}

AdvResult adversarial_loss(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                           double eps) {
  if (eps < 0.0) throw Error("adversarial_loss: eps must be >= 0");
  CeResult ce = episode_loss_ce(params, corpus, task);
  std::vector<std::vector<double>> deltas(ce.trigger_grads.size());
  if (eps > 0.0) {
    for (std::size_t i = 0; i < deltas.size(); ++i) deltas[i] = fgm_delta(ce.trigger_grads[i], eps);
  } else {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      deltas[i].assign(static_cast<std::size_t>(params.config.token_dim), 0.0);
    }
  }
  return adversarial_loss(params, corpus, task, deltas);
}

namespace {

struct RecInstanceState {
  ForwardCache cache;
  std::vector<double> probs;
  int target = 0;
  double loss = 0.0;
};

void rec_forward_instance(const EncoderParams& params, const Instance& instance,
                          RecInstanceState& state) {
  forward_instance(params, instance, /*masked=*/true, {}, state.cache);
  const std::size_t f = static_cast<std::size_t>(params.config.filters);
  const std::size_t v = static_cast<std::size_t>(params.vocab.size());
  state.target =
      params.vocab.id_of(instance.tokens[static_cast<std::size_t>(instance.trigger_index)]);

  const double* h =
      &state.cache.act[static_cast<std::size_t>(state.cache.trigger_pos) * f];
  std::vector<double> logits(params.rec_bias);
  for (std::size_t c = 0; c < f; ++c) {
    const double hc = h[c];
    if (hc == 0.0) continue;
    const double* wrow = &params.rec_weight[c * v];
    for (std::size_t t = 0; t < v; ++t) logits[t] += hc * wrow[t];
  }
  const double shift = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  state.probs.assign(v, 0.0);
  for (std::size_t t = 0; t < v; ++t) {
    state.probs[t] = std::exp(logits[t] - shift);
    z += state.probs[t];
  }
  for (double& p : state.probs) p /= z;
  state.loss = -(logits[static_cast<std::size_t>(state.target)] - shift - std::log(z));
  if (!std::isfinite(state.loss)) throw Error("numerical overflow in reconstruction loss");
}

}  // namespace

RecResult reconstruction_loss(const EncoderParams& params, const Corpus& corpus,
                              const MetaTask& task) {
  const auto instances = episode_instances(corpus, task);
  const double inv = 1.0 / static_cast<double>(instances.size());
  const std::size_t f = static_cast<std::size_t>(params.config.filters);
  const std::size_t v = static_cast<std::size_t>(params.vocab.size());

  RecResult result;
  result.grads = EncoderGrads::zeros_like(params);
  RecInstanceState state;
  for (const Instance* instance : instances) {
    rec_forward_instance(params, *instance, state);
    result.l_rec += inv * state.loss;

    // grad logits = (P - onehot) / M
    const double* h = &state.cache.act[static_cast<std::size_t>(state.cache.trigger_pos) * f];
    std::vector<double> grad_logits(v);
    for (std::size_t t = 0; t < v; ++t) {
      double gl = state.probs[t];
      if (t == static_cast<std::size_t>(state.target)) gl -= 1.0;
      gl *= inv;
      grad_logits[t] = gl;
      result.grads.rec_bias[t] += gl;
    }
    std::vector<double> grad_h(f, 0.0);
    for (std::size_t c = 0; c < f; ++c) {
      const double hc = h[c];
      const double* wrow = &params.rec_weight[c * v];
      double* gwrow = &result.grads.rec_weight[c * v];
      double acc = 0.0;
      for (std::size_t t = 0; t < v; ++t) {
        gwrow[t] += hc * grad_logits[t];
        acc += wrow[t] * grad_logits[t];
      }
      grad_h[c] = acc;
    }

    std::vector<std::pair<int, double>> by_filter(f, {0, 0.0});
    std::vector<int> touched;
    for (std::size_t c = 0; c < f; ++c) {
      if (grad_h[c] != 0.0) {
        by_filter[c] = {state.cache.trigger_pos, grad_h[c]};
        touched.push_back(static_cast<int>(c));
      }
    }
    backward_instance(params, state.cache, by_filter, touched, result.grads, nullptr);
  }
  return result;
}

double rec_forward(const EncoderParams& params, const Corpus& corpus, const MetaTask& task) {
  const auto instances = episode_instances(corpus, task);
  const double inv = 1.0 / static_cast<double>(instances.size());
  double loss = 0.0;
  RecInstanceState state;
  for (const Instance* instance : instances) {
    rec_forward_instance(params, *instance, state);
    loss += inv * state.loss;
  }
  return loss;
}

CombinedResult combined_loss(const EncoderParams& params, const Corpus& corpus,
                             const MetaTask& task, double alpha, double beta, double eps) {
  if (alpha < 0.0 || beta < 0.0) throw Error("combined_loss: alpha and beta must be >= 0");
  CombinedResult result;
  CeResult ce = episode_loss_ce(params, corpus, task);
  result.loss.l_ce = ce.l_ce;
  result.grads = std::move(ce.grads);

  if (alpha > 0.0) {
    std::vector<std::vector<double>> deltas(ce.trigger_grads.size());
    if (eps > 0.0) {
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        deltas[i] = fgm_delta(ce.trigger_grads[i], eps);
      }
    } else {
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        deltas[i].assign(static_cast<std::size_t>(params.config.token_dim), 0.0);
      }
    }
    AdvResult adv = adversarial_loss(params, corpus, task, deltas);
    result.loss.l_adv = adv.l_adv;
    result.grads.add_scaled(adv.grads, alpha);
  }
  if (beta > 0.0) {
    RecResult rec = reconstruction_loss(params, corpus, task);
    result.loss.l_rec = rec.l_rec;
    result.grads.add_scaled(rec.grads, beta);
  }
  result.loss.total = result.loss.l_ce + alpha * result.loss.l_adv + beta * result.loss.l_rec;
  return result;
}

int predict_task(const EncoderParams& params, const Corpus& corpus, const MetaTask& task) {
  CeForwardState state;
  MetaTask probe = task;
  probe.gold_index = 0;  // forward pass only; the gold label is not used below
  ce_forward_pass(params, corpus, probe, nullptr, state);
  int best = 0;
  for (std::size_t k = 1; k < state.probs.size(); ++k) {
    if (state.probs[k] > state.probs[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace fsec
