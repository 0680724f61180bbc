#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsec/corpus.hpp"
#include "fsec/embeddings.hpp"
#include "fsec/sampling.hpp"

namespace fsec {

struct EncoderConfig {
  int token_dim = 300;  // word-embedding width
  int pos_dim = 50;     // relative-position embedding width
  int window = 3;       // convolution window
  int filters = 300;
  int max_len = 128;       // sentences are truncated around the trigger
  int vocab_cap = 20000;   // most frequent corpus tokens kept
};

// Lowercased token vocabulary with reserved ids for unknown tokens and the
// reconstruction mask.
class Vocabulary {
 public:
  static constexpr int kOovId = 0;
  static constexpr int kMaskId = 1;

  Vocabulary();
  static Vocabulary build(const Corpus& corpus, int cap);
  static Vocabulary from_token_list(std::vector<std::string> tokens);  // incl. specials

  int id_of(std::string_view token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// All trainable tensors, row-major.
struct EncoderParams {
  EncoderConfig config;
  Vocabulary vocab;
  std::vector<double> token_embeddings;     // V x token_dim
  std::vector<double> position_embeddings;  // (2*max_len+1) x pos_dim
  std::vector<double> conv_weight;          // filters x (window*(token_dim+pos_dim))
  std::vector<double> conv_bias;            // filters
  std::vector<double> rec_weight;           // filters x V
  std::vector<double> rec_bias;             // V

  // Token rows come from the table where available; everything else is
  // seeded-uniform in [-0.1, 0.1]. Biases start at zero.
  static EncoderParams init(const EncoderConfig& config, Vocabulary vocab,
                            const EmbeddingTable* table, std::uint64_t seed);
};

struct EncoderGrads {
  std::vector<double> token_embeddings;
  std::vector<double> position_embeddings;
  std::vector<double> conv_weight;
  std::vector<double> conv_bias;
  std::vector<double> rec_weight;
  std::vector<double> rec_bias;

  static EncoderGrads zeros_like(const EncoderParams& params);
  void add_scaled(const EncoderGrads& other, double scale);
};

struct EncodeResult {
  int length = 0;       // positions after truncation
  int trigger_pos = 0;  // trigger position after truncation
  std::vector<double> repr;          // filters (max over positions)
  std::vector<double> per_position;  // length x filters, row-major

  double activation(int pos, int filter) const {
    return per_position[static_cast<std::size_t>(pos) * repr.size() +
                        static_cast<std::size_t>(filter)];
  }
};

// Forward pass for one instance. When masked, the trigger token id is
// replaced by the mask id before embedding lookup. trigger_delta, when
// nonempty, is added to the token-embedding input at the trigger position.
EncodeResult encode(const EncoderParams& params, const Instance& instance, bool masked,
                    std::span<const double> trigger_delta = {});

// Episode instances are ordered support row-major, query last. Deltas and
// per-instance trigger gradients follow that order; each has token_dim
// entries.
struct CeResult {
  double l_ce = 0.0;
  EncoderGrads grads;
  std::vector<std::vector<double>> trigger_grads;
};

CeResult episode_loss_ce(const EncoderParams& params, const Corpus& corpus, const MetaTask& task);

// Loss-only forward, optionally with per-instance trigger deltas. Used by the
// finite-difference checks, which hold deltas fixed.
double ce_forward(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                  const std::vector<std::vector<double>>* deltas = nullptr);

// eps * g / ||g||2; the zero vector when ||g||2 < 1e-12.
std::vector<double> fgm_delta(std::span<const double> g_tri, double eps);

struct AdvResult {
  double l_adv = 0.0;
  EncoderGrads grads;
};

// Cross-entropy with the given deltas added to every instance's trigger
// embedding; deltas are treated as constants.
AdvResult adversarial_loss(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                           const std::vector<std::vector<double>>& deltas);
// Convenience: runs the clean pass first and perturbs along its trigger
// gradients. eps == 0 reduces to the clean loss exactly.
AdvResult adversarial_loss(const EncoderParams& params, const Corpus& corpus, const MetaTask& task,
                           double eps);

struct RecResult {
  double l_rec = 0.0;
  EncoderGrads grads;
};

// Masked forward per episode instance; predicts the true trigger token id
// from the hidden state at the trigger position. Mean over instances.
RecResult reconstruction_loss(const EncoderParams& params, const Corpus& corpus,
                              const MetaTask& task);
double rec_forward(const EncoderParams& params, const Corpus& corpus, const MetaTask& task);

struct EpisodeLoss {
  double l_ce = 0.0;
  double l_adv = 0.0;
  double l_rec = 0.0;
  double total = 0.0;  // l_ce + alpha*l_adv + beta*l_rec
};

struct CombinedResult {
  EpisodeLoss loss;
  EncoderGrads grads;
};

// alpha == 0 / beta == 0 skip the corresponding pass entirely.
CombinedResult combined_loss(const EncoderParams& params, const Corpus& corpus,
                             const MetaTask& task, double alpha, double beta, double eps);

// Nearest-prototype prediction with the trained encoder; ties resolved by
// lowest event index.
int predict_task(const EncoderParams& params, const Corpus& corpus, const MetaTask& task);

}  // namespace fsec
