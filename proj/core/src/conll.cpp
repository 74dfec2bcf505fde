#include <fstream>
#include <set>
#include <sstream>

#include "seedlab/dataset.hpp"
#include "seedlab/error.hpp"

namespace seedlab::data {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

Corpus parse_conll(std::string_view text, const ConllOptions& options) {
  Corpus corpus;
  corpus.scheme = options.scheme.value_or(codec::TagScheme::BIO);
  std::set<std::string> inventory;
  std::optional<std::size_t> expected_columns;
  Sentence current;

  auto flush = [&] {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = {};
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto cols = split_ws(line);
    if (cols.empty()) {
      flush();
      continue;
    }
    if (cols[0].starts_with("-DOCSTART-")) continue;
    if (!expected_columns) expected_columns = cols.size();
    if (cols.size() != *expected_columns)
      throw ParseError("expected " + std::to_string(*expected_columns) + " columns, found " +
                           std::to_string(cols.size()),
                       line_no);
    const long tag_col = options.tag_column < 0
                             ? static_cast<long>(cols.size()) + options.tag_column
                             : options.tag_column;
    if (tag_col < 0 || static_cast<std::size_t>(tag_col) >= cols.size() ||
        options.token_column >= cols.size())
      throw ParseError("column index out of range", line_no);

    const std::string_view tag = cols[static_cast<std::size_t>(tag_col)];
    if (options.scheme) {
      if (!codec::is_valid_tag(tag, *options.scheme))
        throw ParseError("invalid tag '" + std::string(tag) + "' for the " +
                             std::string(codec::scheme_name(*options.scheme)) + " scheme",
                         line_no);
      if (const auto parsed = codec::parse_tag(tag); parsed && parsed->prefix != 'O')
        inventory.emplace(parsed->type);
    } else {
      inventory.emplace(tag);
    }
    current.tokens.emplace_back(cols[options.token_column]);
    current.tags.emplace_back(tag);
  }
  flush();
  corpus.label_inventory.assign(inventory.begin(), inventory.end());
  return corpus;
}

Corpus read_conll(const std::filesystem::path& path, const ConllOptions& options) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_conll(buf.str(), options);
}

std::string format_conll(const Corpus& corpus) {
  std::string out;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const auto& sent = corpus.sentences[s];
    if (sent.tokens.size() != sent.tags.size())
      throw InvalidInput("sentence " + std::to_string(s) + " has mismatched tokens and tags");
    if (s > 0) out += '\n';
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      const auto& tok = sent.tokens[i];
      if (tok.empty() || tok.find_first_of(" \t\r\n") != std::string::npos)
        throw InvalidInput("token '" + tok + "' cannot be written in column format");
      out += tok;
      out += ' ';
      out += sent.tags[i];
      out += '\n';
    }
  }
  return out;
}

void write_conll(const Corpus& corpus, const std::filesystem::path& path) {
  const std::string text = format_conll(corpus);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace seedlab::data
