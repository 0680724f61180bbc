#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fsec {

// Token -> fixed-dimension vector with a total, case-insensitive lookup.
// Unknown tokens map to the all-zero vector. Immutable after load.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  bool contains(std::string_view token) const;
  std::span<const float> lookup(std::string_view token) const;
  std::span<const float> oov() const { return oov_; }

  // Keeps the first occurrence of a (case-folded) token.
  void insert(std::string_view token, std::vector<float> vec);

 private:
  int dim_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
  std::vector<float> oov_;
};

// Text format: one `<token> <f1> ... <fdim>` line per entry. A leading
// `<count> <dim>` header line is detected and skipped.
EmbeddingTable load_table(const std::string& path, int dim);

double l2_distance(std::span<const float> a, std::span<const float> b);
double l2_distance(std::span<const double> a, std::span<const double> b);

}  // namespace fsec
