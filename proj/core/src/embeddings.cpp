#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "seedlab/dataset.hpp"
#include "seedlab/error.hpp"
#include "seedlab/rng.hpp"

namespace seedlab::data {

std::string_view embedding_quality_name(EmbeddingQuality q) noexcept {
  return q == EmbeddingQuality::random ? "random" : "informative";
}

EmbeddingQuality parse_embedding_quality(std::string_view name) {
  if (name == "random") return EmbeddingQuality::random;
  if (name == "informative") return EmbeddingQuality::informative;
  throw ConfigError("unknown embedding quality '" + std::string(name) + "'");
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, std::size_t dim,
                               std::vector<double> values)
    : words_(std::move(words)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != words_.size() * dim_)
    throw InvalidInput("embedding table value count does not match words x dim");
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (!index_.emplace(words_[i], i).second)
      throw InvalidInput("duplicate word in embedding table: " + words_[i]);
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable make_embeddings(const std::vector<LexiconEntry>& vocabulary, std::size_t dim,
                               EmbeddingQuality quality, std::uint64_t seed) {
  if (dim == 0) throw InvalidInput("embedding dimension must be at least 1");
  Rng rng = Rng::derive(seed, quality == EmbeddingQuality::random ? 0x72616e64 : 0x696e666f);
  const double r = std::sqrt(3.0 / static_cast<double>(dim));
  std::vector<std::string> words;
  words.reserve(vocabulary.size());
  std::vector<double> values;
  values.reserve(vocabulary.size() * dim);

  std::map<std::string, std::vector<double>> centroids;
  double radius = 0.0;
  if (quality == EmbeddingQuality::informative) {
    for (const auto& e : vocabulary) {
      if (e.type.empty() || centroids.count(e.type)) continue;
      std::vector<double> c(dim);
      for (auto& v : c) v = rng.uniform(-r, r);
      centroids.emplace(e.type, std::move(c));
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (auto a = centroids.begin(); a != centroids.end(); ++a) {
      for (auto b = std::next(a); b != centroids.end(); ++b) {
        double ss = 0.0;
        for (std::size_t i = 0; i < dim; ++i) ss += (a->second[i] - b->second[i]) * (a->second[i] - b->second[i]);
        min_dist = std::min(min_dist, std::sqrt(ss));
      }
    }
    if (!std::isfinite(min_dist)) min_dist = r * std::sqrt(static_cast<double>(dim));
    radius = kClusterRadiusFraction * min_dist;
  }

  std::vector<double> noise(dim);
  for (const auto& e : vocabulary) {
    words.push_back(e.word);
    const auto c = centroids.find(e.type);
    if (quality == EmbeddingQuality::random || c == centroids.end()) {
      for (std::size_t i = 0; i < dim; ++i) values.push_back(rng.uniform(-r, r));
      continue;
    }
    double ss = 0.0;
    for (auto& v : noise) {
      v = rng.uniform(-1.0, 1.0);
      ss += v * v;
    }
    const double scale = ss > 0.0 ? rng.uniform() * radius / std::sqrt(ss) : 0.0;
    for (std::size_t i = 0; i < dim; ++i) values.push_back(c->second[i] + scale * noise[i]);
  }
  return EmbeddingTable(std::move(words), dim, std::move(values));
}

namespace {

double parse_double(std::string_view s, std::size_t line) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) throw ParseError("bad number '" + tmp + "'", line);
  return v;
}

}  // namespace

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw ParseError("missing '<count> <dim>' header", 1);
  std::istringstream header(line);
  std::size_t count = 0;
  std::size_t dim = 0;
  if (!(header >> count >> dim) || dim == 0) throw ParseError("malformed '<count> <dim>' header", 1);

  std::vector<std::string> words;
  std::vector<double> values;
  words.reserve(count);
  values.reserve(count * dim);
  std::size_t line_no = 1;
  while (words.size() < count && std::getline(is, line)) {
    ++line_no;
    std::istringstream row(line);
    std::string word;
    if (!(row >> word)) throw ParseError("empty embedding line", line_no);
    std::string field;
    std::size_t n = 0;
    while (row >> field) {
      values.push_back(parse_double(field, line_no));
      ++n;
    }
    if (n != dim)
      throw ParseError("expected " + std::to_string(dim) + " values, found " + std::to_string(n),
                       line_no);
    words.push_back(std::move(word));
  }
  if (words.size() != count)
    throw ParseError("header announces " + std::to_string(count) + " vectors, file has " +
                         std::to_string(words.size()),
                     line_no);
  return EmbeddingTable(std::move(words), dim, std::move(values));
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << table.words()[i];
    for (double v : table.vector(i)) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace seedlab::data
