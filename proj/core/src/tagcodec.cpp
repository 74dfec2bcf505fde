#include "seedlab/tagcodec.hpp"

#include <algorithm>
#include <cctype>

#include "seedlab/error.hpp"

namespace seedlab::codec {

std::string_view scheme_name(TagScheme scheme) noexcept {
  return scheme == TagScheme::BIO ? "BIO" : "IOBES";
}

TagScheme parse_scheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "BIO") return TagScheme::BIO;
  if (upper == "IOBES") return TagScheme::IOBES;
  throw ConfigError("unknown tag scheme '" + std::string(name) + "'");
}

std::optional<ParsedTag> parse_tag(std::string_view tag) noexcept {
  if (tag == "O") return ParsedTag{'O', {}};
  if (tag.size() < 3 || tag[1] != '-') return std::nullopt;
  const char prefix = tag[0];
  if (prefix != 'B' && prefix != 'I' && prefix != 'E' && prefix != 'S') return std::nullopt;
  return ParsedTag{prefix, tag.substr(2)};
}

bool is_valid_tag(std::string_view tag, TagScheme scheme) noexcept {
  const auto parsed = parse_tag(tag);
  if (!parsed) return false;
  if (scheme == TagScheme::BIO) return parsed->prefix != 'E' && parsed->prefix != 'S';
  return true;
}

TagSequence encode_segments(std::span<const Segment> segments, std::size_t length,
                            TagScheme scheme) {
  TagSequence tags(length, "O");
  std::size_t cursor = 0;
  for (const auto& seg : segments) {
    if (seg.start >= seg.end) throw InvalidInput("segment with empty extent");
    if (seg.end > length) throw InvalidInput("segment end beyond sentence length");
    if (seg.start < cursor) throw InvalidInput("segments overlap or are not sorted");
    if (seg.label.empty()) throw InvalidInput("segment without a label");
    cursor = seg.end;

    const bool single = seg.end - seg.start == 1;
    if (scheme == TagScheme::IOBES && single) {
      tags[seg.start] = "S-" + seg.label;
      continue;
    }
    tags[seg.start] = "B-" + seg.label;
    for (std::size_t i = seg.start + 1; i < seg.end; ++i) tags[i] = "I-" + seg.label;
    if (scheme == TagScheme::IOBES) tags[seg.end - 1] = "E-" + seg.label;
  }
  return tags;
}

std::vector<Segment> decode_segments(std::span<const std::string> tags, TagScheme /*scheme*/) {
  // The repair rules are the same for both schemes; a BIO sequence never
  // contains E-/S- and an IOBES reading of it gives the same segments.
  std::vector<Segment> out;
  std::optional<Segment> open;
  auto close = [&] {
    if (open) {
      out.push_back(std::move(*open));
      open.reset();
    }
  };

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto parsed = parse_tag(tags[i]);
    if (!parsed || parsed->prefix == 'O') {
      close();
      continue;
    }
    const std::string_view type = parsed->type;
    const bool continues = open && open->label == type;
    switch (parsed->prefix) {
      case 'B':
        close();
        open = Segment{i, i + 1, std::string(type)};
        break;
      case 'I':
        if (continues) {
          open->end = i + 1;
        } else {
          close();
          open = Segment{i, i + 1, std::string(type)};
        }
        break;
      case 'E':
        if (continues) {
          open->end = i + 1;
        } else {
          close();
          open = Segment{i, i + 1, std::string(type)};
        }
        close();
        break;
      case 'S':
        close();
        out.push_back(Segment{i, i + 1, std::string(type)});
        break;
      default:
        close();
    }
  }
  close();
  return out;
}

TagSequence convert_scheme(std::span<const std::string> tags, TagScheme from, TagScheme to) {
  const auto segments = decode_segments(tags, from);
  return encode_segments(segments, tags.size(), to);
}

}  // namespace seedlab::codec
