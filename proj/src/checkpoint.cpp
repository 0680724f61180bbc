#include "fsec/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "fsec/error.hpp"

namespace fsec {

using nlohmann::json;

namespace {

constexpr char kMagic[6] = {'F', 'S', 'E', 'C', '1', '\n'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_string(std::ofstream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_tensor(std::ofstream& out, const std::string& name,
                  const std::vector<std::uint64_t>& dims, const std::vector<double>& data) {
  write_string(out, name);
  write_u32(out, static_cast<std::uint32_t>(dims.size()));
  std::uint64_t count = 1;
  for (std::uint64_t d : dims) {
    write_u64(out, d);
    count *= d;
  }
  if (count != data.size()) throw Error("checkpoint tensor size mismatch: " + name);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::string read_string(std::ifstream& in) {
  const std::uint64_t len = read_u64(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  return s;
}

std::vector<double> read_tensor(std::ifstream& in, const std::string& expected_name,
                                std::vector<std::uint64_t>& dims) {
  const std::string name = read_string(in);
  if (name != expected_name) {
    throw Error("checkpoint: expected tensor " + expected_name + ", found " + name);
  }
  const std::uint32_t ndim = read_u32(in);
  dims.resize(ndim);
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    dims[i] = read_u64(in);
    count *= dims[i];
  }
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  return data;
}

}  // namespace

void save_checkpoint(const EncoderParams& params, const json& extra, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open checkpoint file for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);

  json meta;
  meta["config"] = {{"token_dim", params.config.token_dim},
                    {"pos_dim", params.config.pos_dim},
                    {"window", params.config.window},
                    {"filters", params.config.filters},
                    {"max_len", params.config.max_len},
                    {"vocab_cap", params.config.vocab_cap}};
  meta["vocab"] = params.vocab.tokens();
  meta["extra"] = extra;
  write_string(out, meta.dump());

  const auto v = static_cast<std::uint64_t>(params.vocab.size());
  const auto dw = static_cast<std::uint64_t>(params.config.token_dim);
  const auto dp = static_cast<std::uint64_t>(params.config.pos_dim);
  const auto f = static_cast<std::uint64_t>(params.config.filters);
  const auto w = static_cast<std::uint64_t>(params.config.window);
  const auto pos_rows = 2ull * static_cast<std::uint64_t>(params.config.max_len) + 1ull;

  write_u32(out, 6);
  write_tensor(out, "token_embeddings", {v, dw}, params.token_embeddings);
  write_tensor(out, "position_embeddings", {pos_rows, dp}, params.position_embeddings);
  write_tensor(out, "conv_weight", {f, w * (dw + dp)}, params.conv_weight);
  write_tensor(out, "conv_bias", {f}, params.conv_bias);
  write_tensor(out, "rec_weight", {f, v}, params.rec_weight);
  write_tensor(out, "rec_bias", {v}, params.rec_bias);
  if (!out) throw Error("checkpoint write failed: " + path);
}

std::pair<EncoderParams, json> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint file: " + path);
  char magic[6] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("not an FSEC1 checkpoint: " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  json meta;
  try {
    meta = json::parse(read_string(in));
  } catch (const json::exception& e) {
    throw Error("checkpoint metadata is malformed: " + std::string(e.what()));
  }

  EncoderParams params;
  const json& cfg = meta.at("config");
  params.config.token_dim = cfg.at("token_dim").get<int>();
  params.config.pos_dim = cfg.at("pos_dim").get<int>();
  params.config.window = cfg.at("window").get<int>();
  params.config.filters = cfg.at("filters").get<int>();
  params.config.max_len = cfg.at("max_len").get<int>();
  params.config.vocab_cap = cfg.at("vocab_cap").get<int>();
  params.vocab = Vocabulary::from_token_list(meta.at("vocab").get<std::vector<std::string>>());

  const std::uint32_t tensor_count = read_u32(in);
  if (tensor_count != 6) throw Error("checkpoint: unexpected tensor count");
  std::vector<std::uint64_t> dims;
  params.token_embeddings = read_tensor(in, "token_embeddings", dims);
  params.position_embeddings = read_tensor(in, "position_embeddings", dims);
  params.conv_weight = read_tensor(in, "conv_weight", dims);
  params.conv_bias = read_tensor(in, "conv_bias", dims);
  params.rec_weight = read_tensor(in, "rec_weight", dims);
  params.rec_bias = read_tensor(in, "rec_bias", dims);
  if (!in) throw Error("checkpoint truncated: " + path);

  const auto v = static_cast<std::size_t>(params.vocab.size());
  if (params.token_embeddings.size() != v * static_cast<std::size_t>(params.config.token_dim) ||
      params.rec_bias.size() != v) {
    throw Error("checkpoint tensor shapes do not match metadata");
  }
  return {std::move(params), meta.contains("extra") ? meta["extra"] : json::object()};
}

}  // namespace fsec
