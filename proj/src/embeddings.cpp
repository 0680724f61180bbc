#include "fsec/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "fsec/corpus.hpp"
#include "fsec/error.hpp"

namespace fsec {

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim) {
  if (dim < 1) throw Error("embedding dimension must be >= 1");
  oov_.assign(static_cast<std::size_t>(dim), 0.0f);
}

bool EmbeddingTable::contains(std::string_view token) const {
  return vectors_.count(ascii_lower(token)) > 0;
}

std::span<const float> EmbeddingTable::lookup(std::string_view token) const {
  auto it = vectors_.find(ascii_lower(token));
  if (it == vectors_.end()) return oov_;
  return it->second;
}

void EmbeddingTable::insert(std::string_view token, std::vector<float> vec) {
  if (vec.size() != static_cast<std::size_t>(dim_)) {
    throw Error("embedding vector has wrong length for token: " + std::string(token));
  }
  vectors_.emplace(ascii_lower(token), std::move(vec));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

EmbeddingTable load_table(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file: " + path);
  EmbeddingTable table(dim);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (line_no == 1 && fields.size() == 2 && all_digits(fields[0]) && all_digits(fields[1])) {
      continue;  // word2vec-style count/dim header
    }
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw Error(path + ":" + std::to_string(line_no) + ": expected token plus " +
                  std::to_string(dim) + " floats, got " + std::to_string(fields.size()) +
                  " fields");
    }
    std::vector<float> vec(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const std::string_view f = fields[static_cast<std::size_t>(d) + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[static_cast<std::size_t>(d)]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(path + ":" + std::to_string(line_no) + ": bad float field");
      }
    }
    table.insert(fields[0], std::move(vec));
  }
  return table;
}

namespace {

template <typename T>
double l2_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw Error("l2_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_distance(std::span<const float> a, std::span<const float> b) { return l2_impl(a, b); }
double l2_distance(std::span<const double> a, std::span<const double> b) { return l2_impl(a, b); }

}  // namespace fsec
