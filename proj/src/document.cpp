#include "colorgpt/document.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "colorgpt/errors.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw ValidationError(field + ": " + why);
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(where + "." + key, "missing");
  return *it;
}

std::string get_string(const ordered_json& v, const std::string& field) {
  if (!v.is_string()) invalid(field, "expected a string");
  return v.get<std::string>();
}

double get_number(const ordered_json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "expected a number");
  return v.get<double>();
}

Palette palette_from_json(const ordered_json& v, const ColorCodec& codec, const std::string& field) {
  if (!v.is_array()) invalid(field, "expected an array");
  Palette p;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& entry = v[i];
    if (entry.is_string() && entry.get_ref<const std::string&>() == kMaskToken) {
      p.slots.emplace_back(std::nullopt);
      continue;
    }
    try {
      p.slots.emplace_back(codec.decode(entry));
    } catch (const ReplyError& e) {
      invalid(field + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return p;
}

}  // namespace

std::size_t Palette::filled() const {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [](const PaletteSlot& s) { return s.has_value(); }));
}

std::vector<Color> Palette::colors() const {
  std::vector<Color> out;
  for (const auto& s : slots) {
    if (s) out.push_back(*s);
  }
  return out;
}

Palette Palette::of(std::span<const Color> colors) {
  Palette p;
  for (Color c : colors) p.slots.emplace_back(c);
  return p;
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Text: return "text";
    case ElementKind::ColoredBackground: return "colored_background";
    case ElementKind::Svg: return "svg";
    case ElementKind::Raster: return "raster";
  }
  return "svg";
}

ElementKind parse_element_kind(std::string_view name) {
  if (name == "text") return ElementKind::Text;
  if (name == "colored_background") return ElementKind::ColoredBackground;
  if (name == "svg") return ElementKind::Svg;
  if (name == "raster") return ElementKind::Raster;
  throw ValidationError("unknown element type '" + std::string(name) + "'");
}

const Element* Document::find_element(std::string_view element_id) const {
  for (const auto& e : elements) {
    if (e.id == element_id) return &e;
  }
  return nullptr;
}

std::size_t Document::filled_count() const {
  std::size_t n = 0;
  for (const auto& e : elements) n += e.palette.filled();
  return n;
}

std::size_t Document::masked_count() const {
  std::size_t n = 0;
  for (const auto& e : elements) n += e.palette.size() - e.palette.filled();
  return n;
}

std::vector<SlotRef> MaskRecord::targets() const {
  std::vector<SlotRef> out;
  for (const auto& e : entries) out.push_back(e.target);
  return out;
}

std::vector<Color> MaskRecord::ground_truth() const {
  std::vector<Color> out;
  for (const auto& e : entries) out.push_back(e.ground_truth);
  return out;
}

ordered_json to_json(const MaskRecord& record) {
  ordered_json masked = ordered_json::array();
  for (const auto& e : record.entries) {
    masked.push_back({{"element", e.target.element_id},
                      {"slot", e.target.slot},
                      {"ground_truth", color_to_hex(e.ground_truth)}});
  }
  return {{"document", record.document_id},
          {"seed", record.seed},
          {"k", record.k()},
          {"masked", std::move(masked)}};
}

MaskRecord mask_record_from_json(const ordered_json& j) {
  try {
    MaskRecord r;
    r.document_id = j.at("document").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& m : j.at("masked")) {
      r.entries.push_back({{m.at("element").get<std::string>(), m.at("slot").get<std::size_t>()},
                           hex_to_color(m.at("ground_truth").get<std::string>())});
    }
    if (j.contains("k") && j.at("k").get<std::size_t>() != r.k()) {
      throw ValidationError("mask record: k does not match the masked entry count");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mask record: ") + e.what());
  }
}

void validate(const Document& d) {
  const auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_positive(d.canvas_width) || !finite_positive(d.canvas_height)) {
    invalid("layout", "canvas dimensions must be positive");
  }
  if (std::abs(std::max(d.canvas_width, d.canvas_height) - 1.0) > 1e-9) {
    invalid("layout", "longer canvas side must be 1.0 in unit space");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < d.elements.size(); ++i) {
    const auto& e = d.elements[i];
    const std::string where = "elements[" + std::to_string(i) + "]";
    if (e.id.empty()) invalid(where + ".id", "empty element id");
    if (!ids.insert(e.id).second) invalid(where + ".id", "duplicate element id '" + e.id + "'");
    const auto& f = e.frame;
    if (!std::isfinite(f.x) || !std::isfinite(f.y) || !std::isfinite(f.width) ||
        !std::isfinite(f.height)) {
      invalid(where + ".layout", "non-finite coordinate");
    }
    if (f.width < 0.0 || f.height < 0.0) invalid(where + ".layout", "negative size");
    if (!(e.opacity >= 0.0 && e.opacity <= 1.0)) invalid(where + ".opacity", "outside [0, 1]");
    if (e.text && e.kind != ElementKind::Text) {
      invalid(where + ".text", "only text elements carry text");
    }
    if (e.palette.size() < 1 || e.palette.size() > kMaxPaletteSize) {
      invalid(where + ".palette", "length " + std::to_string(e.palette.size()) + " outside [1, 5]");
    }
  }
}

Document document_from_json(const ordered_json& j, const ColorCodec& codec) {
  if (!j.is_object()) invalid("document", "expected a JSON object");
  Document d;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    const auto& v = it.value();
    if (key == "id") {
      d.id = get_string(v, "id");
    } else if (key == "title") {
      d.title = get_string(v, "title");
    } else if (key == "category") {
      d.category = get_string(v, "category");
    } else if (key == "keywords") {
      if (!v.is_array()) invalid("keywords", "expected an array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        d.keywords.push_back(get_string(v[i], "keywords[" + std::to_string(i) + "]"));
      }
    } else if (key == "layout") {
      if (!v.is_object()) invalid("layout", "expected an object");
      d.canvas_width = get_number(require(v, "width", "layout"), "layout.width");
      d.canvas_height = get_number(require(v, "height", "layout"), "layout.height");
    } else if (key == "elements") {
      if (!v.is_array()) invalid("elements", "expected an array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& ej = v[i];
        const std::string where = "elements[" + std::to_string(i) + "]";
        if (!ej.is_object()) invalid(where, "expected an object");
        Element e;
        bool has_palette = false;
        for (auto eit = ej.begin(); eit != ej.end(); ++eit) {
          const auto& ek = eit.key();
          const auto& ev = eit.value();
          if (ek == "id") {
            e.id = get_string(ev, where + ".id");
          } else if (ek == "type") {
            try {
              e.kind = parse_element_kind(get_string(ev, where + ".type"));
            } catch (const ValidationError& err) {
              invalid(where + ".type", err.what());
            }
          } else if (ek == "layout") {
            if (!ev.is_object()) invalid(where + ".layout", "expected an object");
            e.frame.x = get_number(require(ev, "x", where + ".layout"), where + ".layout.x");
            e.frame.y = get_number(require(ev, "y", where + ".layout"), where + ".layout.y");
            e.frame.width =
                get_number(require(ev, "width", where + ".layout"), where + ".layout.width");
            e.frame.height =
                get_number(require(ev, "height", where + ".layout"), where + ".layout.height");
          } else if (ek == "opacity") {
            e.opacity = get_number(ev, where + ".opacity");
          } else if (ek == "text") {
            e.text = get_string(ev, where + ".text");
          } else if (ek == "palette") {
            e.palette = palette_from_json(ev, codec, where + ".palette");
            has_palette = true;
          } else {
            e.extras[ek] = ev;
          }
        }
        if (!ej.contains("type")) invalid(where + ".type", "missing");
        if (!has_palette) invalid(where + ".palette", "missing");
        d.elements.push_back(std::move(e));
      }
    } else {
      d.extras[key] = v;
    }
  }
  validate(d);
  return d;
}

Document parse_document(std::string_view json_text, const ColorCodec& codec) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("document JSON syntax error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  return document_from_json(j, codec);
}

ordered_json document_to_json(const Document& d, const ColorCodec& codec) {
  ordered_json j;
  j["id"] = d.id;
  j["title"] = d.title;
  j["category"] = d.category;
  j["keywords"] = d.keywords;
  j["layout"] = {{"width", d.canvas_width}, {"height", d.canvas_height}};
  ordered_json elements = ordered_json::array();
  for (const auto& e : d.elements) {
    ordered_json ej;
    ej["id"] = e.id;
    ej["type"] = to_string(e.kind);
    ej["layout"] = {{"x", e.frame.x},
                    {"y", e.frame.y},
                    {"width", e.frame.width},
                    {"height", e.frame.height}};
    ej["opacity"] = e.opacity;
    if (e.text) ej["text"] = *e.text;
    ordered_json palette = ordered_json::array();
    for (const auto& s : e.palette.slots) {
      palette.push_back(s ? codec.encode(*s) : ordered_json(kMaskToken));
    }
    ej["palette"] = std::move(palette);
    for (auto it = e.extras.begin(); it != e.extras.end(); ++it) ej[it.key()] = it.value();
    elements.push_back(std::move(ej));
  }
  j["elements"] = std::move(elements);
  for (auto it = d.extras.begin(); it != d.extras.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string serialize_document(const Document& d, const ColorCodec& codec, int indent) {
  return document_to_json(d, codec).dump(indent);
}

std::pair<Document, MaskRecord> mask_palette(const Document& d, int k, std::uint64_t seed) {
  if (k < 1 || k > 3) throw ValidationError("mask count k must be 1, 2 or 3");
  std::vector<std::pair<std::size_t, std::size_t>> filled;
  for (std::size_t e = 0; e < d.elements.size(); ++e) {
    const auto& slots = d.elements[e].palette.slots;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (slots[s]) filled.emplace_back(e, s);
    }
  }
  if (filled.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("cannot mask " + std::to_string(k) + " slots: document '" + d.id +
                          "' has only " + std::to_string(filled.size()) + " filled");
  }
  // partial Fisher-Yates: the first k positions are a uniform k-subset
  Rng rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + rng.below(filled.size() - i);
    std::swap(filled[i], filled[j]);
  }
  filled.resize(static_cast<std::size_t>(k));
  std::sort(filled.begin(), filled.end());

  Document masked = d;
  MaskRecord record;
  record.document_id = d.id;
  record.seed = seed;
  for (const auto& [e, s] : filled) {
    auto& slot = masked.elements[e].palette.slots[s];
    record.entries.push_back({{d.elements[e].id, s}, *slot});
    slot.reset();
  }
  return {std::move(masked), std::move(record)};
}

std::vector<SlotRef> masked_slots(const Document& d) {
  std::vector<SlotRef> out;
  for (const auto& e : d.elements) {
    for (std::size_t s = 0; s < e.palette.slots.size(); ++s) {
      if (!e.palette.slots[s]) out.push_back({e.id, s});
    }
  }
  return out;
}

Document apply_colors(const Document& d, std::span<const SlotRef> targets,
                      std::span<const Color> colors) {
  if (targets.size() != colors.size()) {
    throw ValidationError("apply_colors: " + std::to_string(colors.size()) + " colors for " +
                          std::to_string(targets.size()) + " masked slots");
  }
  Document out = d;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& t = targets[i];
    auto it = std::find_if(out.elements.begin(), out.elements.end(),
                           [&](const Element& e) { return e.id == t.element_id; });
    if (it == out.elements.end()) {
      throw ValidationError("apply_colors: no element '" + t.element_id + "'");
    }
    if (t.slot >= it->palette.slots.size()) {
      throw ValidationError("apply_colors: element '" + t.element_id + "' has no slot " +
                            std::to_string(t.slot));
    }
    auto& slot = it->palette.slots[t.slot];
    if (slot) {
      throw ValidationError("apply_colors: slot " + std::to_string(t.slot) + " of '" +
                            t.element_id + "' is not masked");
    }
    slot = colors[i];
  }
  return out;
}

Document apply_colors(const Document& d, const MaskRecord& record, std::span<const Color> colors) {
  const auto targets = record.targets();
  return apply_colors(d, targets, colors);
}

}  // namespace colorgpt
