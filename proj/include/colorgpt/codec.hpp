#pragma once

#include <json.hpp>
#include <string>
#include <string_view>

#include "colorgpt/color.hpp"
#include "colorgpt/embedding.hpp"
#include "colorgpt/naming.hpp"

namespace colorgpt {

/// Writes colors in one Representation and reads them back.
///
///   Hexcode  "#rrggbb"                 (JSON string)
///   Rgb      [r, g, b]                 (JSON array of integers)
///   Cielab   [L*, a*, b*]              (JSON array, 2 decimals)
///   Word     "white"                   (nearest dictionary word)
///   WordHex  "white (#ffffff)"         H reads the hex part, W the word part
///
/// Decoding also accepts the textual forms "[r, g, b]" and "(L*, a*, b*)" for
/// Rgb and Cielab, since models often quote them. Word decoding goes through
/// word_to_hex and therefore needs a dictionary and an embedder; the other
/// representations work without either.
class ColorCodec {
 public:
  explicit ColorCodec(Representation repr = {}, const ColorDictionary* dict = nullptr,
                      const EmbeddingProvider* embedder = nullptr)
      : repr_(repr), dict_(dict), embedder_(embedder) {}

  const Representation& representation() const { return repr_; }

  nlohmann::ordered_json encode(Color c) const;
  /// Inline text form used in flat palette lists and prose.
  std::string encode_text(Color c) const;

  /// Throws ReplyError(Format) on anything undecodable, including "[MASK]".
  Color decode(const nlohmann::ordered_json& value) const;
  Color decode_text(std::string_view text) const;

 private:
  const ColorDictionary& dict() const;

  Representation repr_;
  const ColorDictionary* dict_;
  const EmbeddingProvider* embedder_;
};

/// Two-decimal rounding used for CIELAB output and report numbers.
double round2(double v);

}  // namespace colorgpt
