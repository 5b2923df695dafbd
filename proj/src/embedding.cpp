#include "igel/embedding.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

namespace igel {

static_assert(std::endian::native == std::endian::little,
              "embedding files are written in native little-endian order");

namespace {

constexpr std::array<char, 8> kMagic{'I', 'G', 'E', 'L', 'E', 'M', 'B', '\0'};
constexpr std::uint32_t kVersion = 1;

struct Header {
  std::uint32_t version;
  std::uint32_t alpha;
  std::uint32_t delta_max;
  std::uint32_t flags;
  std::uint64_t rows;
  std::uint64_t cols;
  std::uint64_t init_seed;
};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(std::string("corrupt embedding file: truncated ") + what);
  }
  return v;
}

std::uint32_t encode_flags(const EncoderConfig& cfg) {
  return (cfg.apply_log ? 1u : 0u) | (cfg.apply_unit_norm ? 2u : 0u) |
         (cfg.log_bins ? 4u : 0u);
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw Error("embedding matrix needs rows, cols >= 1");
}

EmbeddingMatrix init_embedding(std::size_t rows, std::size_t cols, std::uint64_t seed,
                               double scale) {
  EmbeddingMatrix w(rows, cols);
  w.init_seed = seed;
  if (scale == 0.0) return w;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-scale, scale);
  for (double& v : w.values()) v = unit(rng);
  return w;
}

void forward_into(const SparseFeatures& x, const EmbeddingMatrix& w, std::span<double> out) {
  if (x.dim != w.rows()) {
    throw Error("feature dimension " + std::to_string(x.dim) +
                " does not match embedding rows " + std::to_string(w.rows()));
  }
  if (out.size() != w.cols()) throw Error("output length does not match embedding width");
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t d = w.cols();
  for (const auto& e : x.entries) {
    const double* r = w.row(e.index).data();
    for (std::size_t k = 0; k < d; ++k) out[k] += e.value * r[k];
  }
}

DenseEmbedding forward(const SparseFeatures& x, const EmbeddingMatrix& w) {
  DenseEmbedding e(w.cols());
  forward_into(x, w, e);
  return e;
}

void accumulate_gradient(const SparseFeatures& x, std::span<const double> grad_e,
                         GradientBuffer& grad_w) {
  if (x.dim != grad_w.rows() || grad_e.size() != grad_w.cols()) {
    throw Error("gradient shape mismatch");
  }
  const std::size_t d = grad_w.cols();
  for (const auto& e : x.entries) {
    double* r = grad_w.row(e.index).data();
    for (std::size_t k = 0; k < d; ++k) r[k] += e.value * grad_e[k];
  }
}

void write_embedding(std::ostream& out, const EmbeddingMatrix& w) {
  out.write(kMagic.data(), kMagic.size());
  put(out, Header{kVersion, w.encoder.alpha, w.encoder.delta_max, encode_flags(w.encoder),
                  w.rows(), w.cols(), w.init_seed});
  const auto values = w.values();
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
  if (!out) throw Error("failed writing embedding matrix");
}

void save_embedding(const std::string& path, const EmbeddingMatrix& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_embedding(out, w);
}

EmbeddingMatrix read_embedding(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error("corrupt embedding file: bad magic");
  }
  const auto h = get<Header>(in, "header");
  if (h.version != kVersion) {
    throw Error("unsupported embedding file version " + std::to_string(h.version));
  }
  EncoderConfig enc;
  enc.alpha = h.alpha;
  enc.delta_max = h.delta_max;
  enc.apply_log = (h.flags & 1u) != 0;
  enc.apply_unit_norm = (h.flags & 2u) != 0;
  enc.log_bins = (h.flags & 4u) != 0;
  if (h.rows == 0 || h.cols == 0 || h.delta_max == 0 || h.rows != enc.dim()) {
    throw Error("corrupt embedding file: inconsistent shape " + std::to_string(h.rows) +
                "x" + std::to_string(h.cols) + " for alpha=" + std::to_string(h.alpha) +
                ", delta_max=" + std::to_string(h.delta_max));
  }
  EmbeddingMatrix w(h.rows, h.cols);
  w.encoder = enc;
  w.init_seed = h.init_seed;
  auto values = w.values();
  if (!in.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size_bytes()))) {
    throw Error("corrupt embedding file: truncated values (expected " +
                std::to_string(values.size()) + " doubles)");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error("corrupt embedding file: trailing bytes after values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("corrupt embedding file: non-finite value");
  }
  return w;
}

EmbeddingMatrix load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file '" + path + "'");
  try {
    return read_embedding(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void check_compatible(const EmbeddingMatrix& w, const EncoderConfig& cfg) {
  const auto& h = w.encoder;
  if (h.alpha != cfg.alpha) {
    throw Error("embedding was trained with alpha=" + std::to_string(h.alpha) +
                " but the encoder uses alpha=" + std::to_string(cfg.alpha));
  }
  if (h.delta_max != cfg.delta_max) {
    throw Error("embedding was trained with delta_max=" + std::to_string(h.delta_max) +
                " but the encoder uses delta_max=" + std::to_string(cfg.delta_max));
  }
  if (h.log_bins != cfg.log_bins || h.apply_log != cfg.apply_log ||
      h.apply_unit_norm != cfg.apply_unit_norm) {
    throw Error("embedding and encoder disagree on normalization or binning flags");
  }
  if (w.rows() != cfg.dim()) {
    throw Error("embedding has " + std::to_string(w.rows()) + " rows, encoder expects " +
                std::to_string(cfg.dim()));
  }
}

void write_node_embeddings(std::ostream& out, std::span<const double> table,
                           std::size_t dim, std::span<const std::string> labels) {
  char buf[64];
  const std::size_t n = dim == 0 ? 0 : table.size() / dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.empty()) {
      out << i;
    } else {
      out << labels[i];
    }
    for (std::size_t k = 0; k < dim; ++k) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, table[i * dim + k]);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

}  // namespace igel
