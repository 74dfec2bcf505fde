#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seedlab::codec {

enum class TagScheme { BIO, IOBES };

std::string_view scheme_name(TagScheme scheme) noexcept;
// Accepts "BIO"/"IOBES" (case-insensitive); throws ConfigError otherwise.
TagScheme parse_scheme(std::string_view name);

// Half-open token span [start, end) carrying a type label.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  friend auto operator<=>(const Segment&, const Segment&) = default;
};

using TagSequence = std::vector<std::string>;

// A tag split on its first hyphen: "B-ORG-X" -> {'B', "ORG-X"}; "O" -> {'O', ""}.
struct ParsedTag {
  char prefix = 'O';
  std::string_view type;
};

// nullopt for anything that is not "O" or a known prefix followed by '-' and a non-empty type.
std::optional<ParsedTag> parse_tag(std::string_view tag) noexcept;
bool is_valid_tag(std::string_view tag, TagScheme scheme) noexcept;

TagSequence encode_segments(std::span<const Segment> segments, std::size_t length,
                            TagScheme scheme);

// Total function. Dangling I-/E- tags open a new segment, a type change
// closes the open segment, and strings that do not parse are read as "O".
std::vector<Segment> decode_segments(std::span<const std::string> tags, TagScheme scheme);

TagSequence convert_scheme(std::span<const std::string> tags, TagScheme from, TagScheme to);

}  // namespace seedlab::codec
