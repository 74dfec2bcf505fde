#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "seedlab/dataset.hpp"
#include "seedlab/error.hpp"

using namespace seedlab;
using namespace seedlab::data;
using codec::TagScheme;

namespace {

TaskSpec small_spec() {
  TaskSpec s;
  s.vocab_size = 400;
  s.lexicon_size = 60;
  s.train_size = 120;
  s.dev_size = 30;
  s.test_size = 30;
  s.seed = 5;
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("seedlab_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace

TEST(Generate, StandardSpecIsFrozen) {
  const auto s = TaskSpec::standard_span_task();
  EXPECT_EQ(s.kind, TaskKind::span_task);
  EXPECT_EQ(s.vocab_size, 2000u);
  EXPECT_EQ(s.label_types.size(), 4u);
  EXPECT_EQ(s.lexicon_size, 200u);
  EXPECT_EQ(s.noise_rate, 0.15);
  EXPECT_EQ(s.train_size, 800u);
  EXPECT_EQ(s.dev_size, 100u);
  EXPECT_EQ(s.test_size, 200u);
  EXPECT_EQ(s.seed, 13u);
}

TEST(Generate, DeterministicByteIdentical) {
  const auto a = generate(small_spec());
  const auto b = generate(small_spec());
  EXPECT_EQ(format_conll(a.train), format_conll(b.train));
  EXPECT_EQ(a.test, b.test);
  auto other = small_spec();
  other.seed = 6;
  EXPECT_NE(format_conll(generate(other).train), format_conll(a.train));
}

TEST(Generate, SplitSizesAndDisjointness) {
  const auto d = generate(small_spec());
  EXPECT_EQ(d.train.sentences.size(), 120u);
  EXPECT_EQ(d.dev.sentences.size(), 30u);
  EXPECT_EQ(d.test.sentences.size(), 30u);
  std::set<std::pair<std::vector<std::string>, codec::TagSequence>> seen;
  for (const auto* c : {&d.train, &d.dev, &d.test})
    for (const auto& s : c->sentences) EXPECT_TRUE(seen.insert({s.tokens, s.tags}).second);
}

TEST(Generate, TagsAreWellFormed) {
  for (auto kind : {TaskKind::span_task, TaskKind::token_task}) {
    auto spec = small_spec();
    spec.kind = kind;
    if (kind == TaskKind::token_task) spec.label_types = {"ADJ", "DET", "NOUN", "VERB"};
    const auto d = generate(spec);
    for (const auto& s : d.train.sentences) {
      ASSERT_EQ(s.tokens.size(), s.tags.size());
      ASSERT_FALSE(s.tokens.empty());
      if (kind == TaskKind::span_task) {
        for (const auto& t : s.tags) ASSERT_TRUE(codec::is_valid_tag(t, TagScheme::BIO)) << t;
        // Well-formed: decoding and re-encoding changes nothing.
        const auto segs = codec::decode_segments(s.tags, TagScheme::BIO);
        ASSERT_EQ(codec::encode_segments(segs, s.tags.size(), TagScheme::BIO), s.tags);
      }
    }
    EXPECT_TRUE(std::is_sorted(d.train.label_inventory.begin(), d.train.label_inventory.end()));
  }
}

TEST(Generate, ConvertCorpusToIobes) {
  const auto d = generate(small_spec());
  const auto conv = convert_corpus(d.train, TagScheme::IOBES, TaskKind::span_task);
  EXPECT_EQ(conv.scheme, TagScheme::IOBES);
  for (std::size_t i = 0; i < conv.sentences.size(); ++i) {
    ASSERT_EQ(codec::decode_segments(conv.sentences[i].tags, TagScheme::IOBES),
              codec::decode_segments(d.train.sentences[i].tags, TagScheme::BIO));
  }
}

TEST(Generate, RejectsInvalidSpecs) {
  auto s = small_spec();
  s.label_types.clear();
  EXPECT_THROW(generate(s), InvalidInput);
  s = small_spec();
  s.noise_rate = 1.0;
  EXPECT_THROW(generate(s), InvalidInput);
  s = small_spec();
  s.dev_size = 0;
  EXPECT_THROW(generate(s), InvalidInput);
  EXPECT_THROW(parse_task_kind("parsing"), ConfigError);
}

TEST(Conll, ParsesSimpleSentence) {
  const auto c = parse_conll("Obama B-PER\nspoke O\n\n");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].tokens, (std::vector<std::string>{"Obama", "spoke"}));
  EXPECT_EQ(c.sentences[0].tags, (codec::TagSequence{"B-PER", "O"}));
  EXPECT_EQ(c.label_inventory, (std::vector<std::string>{"PER"}));
}

TEST(Conll, EmptyDocstartAndColumns) {
  EXPECT_TRUE(parse_conll("").sentences.empty());
  const auto c = parse_conll("-DOCSTART- -X- O\n\nEU NNP B-ORG\nrejects VBZ O\n\n\n");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].tags[0], "B-ORG");
  ConllOptions pos;
  pos.tag_column = 1;
  pos.scheme.reset();
  const auto p = parse_conll("EU NNP B-ORG\nrejects VBZ O\n", pos);
  EXPECT_EQ(p.sentences[0].tags, (codec::TagSequence{"NNP", "VBZ"}));
}

TEST(Conll, ErrorsCarryLineNumbers) {
  try {
    parse_conll("a O\nb O extra\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse_conll("a O\n\nb Q-PER\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  ConllOptions iobes;
  iobes.scheme = TagScheme::IOBES;
  EXPECT_NO_THROW(parse_conll("a S-PER\n", iobes));
  EXPECT_THROW(parse_conll("a S-PER\n"), ParseError);
  EXPECT_THROW(read_conll(temp_path("does_not_exist.conll")), IoError);
}

TEST(Conll, WriteReadRoundTrip) {
  const auto d = generate(small_spec());
  const auto path = temp_path("roundtrip.conll");
  write_conll(d.dev, path);
  const auto text = slurp(path);
  EXPECT_EQ(text, format_conll(d.dev));
  EXPECT_EQ(text.back(), '\n');
  const auto back = read_conll(path);
  EXPECT_EQ(back.sentences, d.dev.sentences);
  write_conll(back, path);
  EXPECT_EQ(slurp(path), text);
  std::filesystem::remove(path);

  Corpus empty;
  EXPECT_EQ(format_conll(empty), "");
  EXPECT_THROW(write_conll(d.dev, temp_path("missing_dir") / "x" / "y.conll"), IoError);
}

TEST(Conll, NormalizesWhitespace) {
  const auto c = parse_conll("Obama\t  B-PER\r\nspoke   O\n");
  EXPECT_EQ(format_conll(c), "Obama B-PER\nspoke O\n");
}

TEST(Embeddings, DeterministicAndComplete) {
  const auto d = generate(small_spec());
  const auto a = make_embeddings(d.vocabulary, 16, EmbeddingQuality::random, 3);
  const auto b = make_embeddings(d.vocabulary, 16, EmbeddingQuality::random, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), d.vocabulary.size());
  for (const auto& e : d.vocabulary) EXPECT_TRUE(a.find(e.word).has_value());
  const double limit = std::sqrt(3.0 / 16.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (double v : a.vector(i)) ASSERT_LE(std::fabs(v), limit);
  EXPECT_THROW(make_embeddings(d.vocabulary, 0, EmbeddingQuality::random, 3), InvalidInput);
}

TEST(Embeddings, InformativeClustersByType) {
  const auto d = generate(small_spec());
  const auto t = make_embeddings(d.vocabulary, 24, EmbeddingQuality::informative, 3);
  double intra = 0, inter = 0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < d.vocabulary.size(); ++i) {
    if (d.vocabulary[i].type.empty()) continue;
    for (std::size_t j = i + 1; j < d.vocabulary.size(); ++j) {
      if (d.vocabulary[j].type.empty()) continue;
      const double c = cosine(t.vector(*t.find(d.vocabulary[i].word)),
                              t.vector(*t.find(d.vocabulary[j].word)));
      if (d.vocabulary[i].type == d.vocabulary[j].type) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  ASSERT_GT(n_intra, 0u);
  ASSERT_GT(n_inter, 0u);
  EXPECT_GT(intra / static_cast<double>(n_intra), inter / static_cast<double>(n_inter));
}

TEST(Embeddings, TextRoundTripAndErrors) {
  const auto d = generate(small_spec());
  const auto t = make_embeddings(d.vocabulary, 8, EmbeddingQuality::informative, 9);
  const auto path = temp_path("emb.txt");
  write_embeddings(t, path);
  EXPECT_EQ(read_embeddings(path), t);
  {
    std::ofstream os(path);
    os << "2 3\nfoo 1 2 3\nbar 1 2\n";
  }
  try {
    read_embeddings(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  {
    std::ofstream os(path);
    os << "3 2\nfoo 1 2\n";
  }
  EXPECT_THROW(read_embeddings(path), ParseError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_embeddings(path), IoError);
  EXPECT_THROW(parse_embedding_quality("glove"), ConfigError);
}
