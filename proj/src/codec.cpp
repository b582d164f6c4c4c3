#include "colorgpt/codec.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "colorgpt/errors.hpp"

namespace colorgpt {
namespace {

using Kind = Representation::Kind;

ReplyError format_error(const std::string& what) {
  return ReplyError(ReplyError::Kind::Format, what);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"'`");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"'`,");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<double> numbers_in(std::string_view text) {
  static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  std::vector<double> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator();
       ++it) {
    out.push_back(std::stod(it->str()));
  }
  return out;
}

std::string format_number(double v) {
  v = round2(v);
  if (v == 0.0) v = 0.0;  // no "-0"
  std::ostringstream os;
  os << v;
  return os.str();
}

Color rgb_from(const std::vector<double>& v, std::string_view source) {
  if (v.size() != 3) throw format_error("expected an [R, G, B] triplet, got '" + std::string(source) + "'");
  std::uint8_t ch[3];
  for (int i = 0; i < 3; ++i) {
    const double x = std::round(v[i]);
    if (!(x >= 0.0 && x <= 255.0)) {
      throw format_error("RGB channel out of range in '" + std::string(source) + "'");
    }
    ch[i] = static_cast<std::uint8_t>(x);
  }
  return {ch[0], ch[1], ch[2]};
}

Color lab_from(const std::vector<double>& v, std::string_view source) {
  if (v.size() != 3) {
    throw format_error("expected an (L*, a*, b*) triplet, got '" + std::string(source) + "'");
  }
  return lab_to_color({v[0], v[1], v[2]});
}

bool is_mask_token(std::string_view s) { return s == "[MASK]" || s == "_" || s == "MASK"; }

}  // namespace

double round2(double v) { return std::round(v * 100.0) / 100.0; }

const ColorDictionary& ColorCodec::dict() const {
  if (!dict_) throw ValidationError("representation '" + repr_.name() + "' needs a color dictionary");
  return *dict_;
}

nlohmann::ordered_json ColorCodec::encode(Color c) const {
  switch (repr_.kind) {
    case Kind::Rgb:
      return nlohmann::ordered_json::array({c.r, c.g, c.b});
    case Kind::Cielab: {
      const auto lab = color_to_lab(c);
      auto clean = [](double v) { v = round2(v); return v == 0.0 ? 0.0 : v; };
      return nlohmann::ordered_json::array({clean(lab.l), clean(lab.a), clean(lab.b)});
    }
    default:
      return encode_text(c);
  }
}

std::string ColorCodec::encode_text(Color c) const {
  switch (repr_.kind) {
    case Kind::Hexcode: return color_to_hex(c);
    case Kind::Rgb:
      return "[" + std::to_string(c.r) + ", " + std::to_string(c.g) + ", " + std::to_string(c.b) + "]";
    case Kind::Cielab: {
      const auto lab = color_to_lab(c);
      return "(" + format_number(lab.l) + ", " + format_number(lab.a) + ", " +
             format_number(lab.b) + ")";
    }
    case Kind::Word: return hex_to_word(c, dict());
    case Kind::WordHex: return hex_to_word(c, dict()) + " (" + color_to_hex(c) + ")";
  }
  return color_to_hex(c);
}

Color ColorCodec::decode(const nlohmann::ordered_json& value) const {
  if (value.is_string()) return decode_text(value.get_ref<const std::string&>());
  if (value.is_array() && (repr_.kind == Kind::Rgb || repr_.kind == Kind::Cielab)) {
    std::vector<double> v;
    for (const auto& x : value) {
      if (!x.is_number()) throw format_error("non-numeric color component in " + value.dump());
      v.push_back(x.get<double>());
    }
    return repr_.kind == Kind::Rgb ? rgb_from(v, value.dump()) : lab_from(v, value.dump());
  }
  throw format_error("cannot read a " + repr_.name() + " color from " + value.dump());
}

Color ColorCodec::decode_text(std::string_view raw) const {
  const std::string text = trim(raw);
  if (text.empty()) throw format_error("empty color value");
  if (is_mask_token(text)) throw format_error("unresolved mask token '" + text + "'");

  switch (repr_.kind) {
    case Kind::Hexcode: {
      try {
        return hex_to_color(text.front() == '#' ? text : "#" + text);
      } catch (const ParseError& e) {
        throw format_error(e.what());
      }
    }
    case Kind::Rgb: return rgb_from(numbers_in(text), text);
    case Kind::Cielab: return lab_from(numbers_in(text), text);
    case Kind::Word: {
      if (!embedder_) throw ValidationError("word representation needs an embedding provider");
      return word_to_hex(text, dict(), *embedder_);
    }
    case Kind::WordHex: {
      if (repr_.mode == Representation::Mode::H) {
        static const std::regex hex(R"(#[0-9a-fA-F]{6}(?![0-9a-fA-F]))");
        std::smatch m;
        if (!std::regex_search(text, m, hex)) {
          throw format_error("no hex code in word(hex) value '" + text + "'");
        }
        return hex_to_color(m.str());
      }
      const std::string word = trim(text.substr(0, text.find('(')));
      if (word.empty()) throw format_error("no color word in word(hex) value '" + text + "'");
      if (!embedder_) throw ValidationError("word representation needs an embedding provider");
      return word_to_hex(word, dict(), *embedder_);
    }
  }
  throw format_error("unsupported representation");
}

}  // namespace colorgpt
