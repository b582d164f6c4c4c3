#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colorgpt/codec.hpp"
#include "colorgpt/color.hpp"

namespace colorgpt {

using ordered_json = nlohmann::ordered_json;

inline constexpr std::string_view kMaskToken = "[MASK]";
inline constexpr std::size_t kMaxPaletteSize = 5;

/// A palette slot: a color, or nullopt when masked.
using PaletteSlot = std::optional<Color>;

struct Palette {
  std::vector<PaletteSlot> slots;

  std::size_t size() const { return slots.size(); }
  std::size_t filled() const;
  bool fully_filled() const { return filled() == slots.size(); }
  /// Filled colors in slot order.
  std::vector<Color> colors() const;

  static Palette of(std::span<const Color> colors);

  friend bool operator==(const Palette&, const Palette&) = default;
};

enum class ElementKind { Text, ColoredBackground, Svg, Raster };

std::string_view to_string(ElementKind kind);
ElementKind parse_element_kind(std::string_view name);

/// Position and size in canvas unit space.
struct Frame {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Element {
  std::string id;
  ElementKind kind = ElementKind::Svg;
  Frame frame;
  double opacity = 1.0;
  std::optional<std::string> text;  // text elements only
  Palette palette;
  ordered_json extras = ordered_json::object();  // unknown fields, kept verbatim

  friend bool operator==(const Element&, const Element&) = default;
};

struct Document {
  std::string id;
  std::string title;
  std::string category;
  std::vector<std::string> keywords;
  double canvas_width = 1.0;
  double canvas_height = 1.0;
  std::vector<Element> elements;
  ordered_json extras = ordered_json::object();

  const Element* find_element(std::string_view element_id) const;
  std::size_t filled_count() const;
  std::size_t masked_count() const;

  friend bool operator==(const Document&, const Document&) = default;
};

/// One palette position inside a document.
struct SlotRef {
  std::string element_id;
  std::size_t slot = 0;

  friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

struct MaskRecord {
  struct Entry {
    SlotRef target;
    Color ground_truth;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  std::string document_id;
  std::uint64_t seed = 0;
  std::vector<Entry> entries;  // document order

  std::size_t k() const { return entries.size(); }
  std::vector<SlotRef> targets() const;
  std::vector<Color> ground_truth() const;

  friend bool operator==(const MaskRecord&, const MaskRecord&) = default;
};

ordered_json to_json(const MaskRecord& record);
MaskRecord mask_record_from_json(const ordered_json& j);

/// Throws ParseError (with byte offset) on bad JSON and ValidationError
/// naming the field on invariant violations. Palette entries are read with
/// `codec` (hex by default); "[MASK]" marks a masked slot.
Document parse_document(std::string_view json_text, const ColorCodec& codec = ColorCodec{});
Document document_from_json(const ordered_json& j, const ColorCodec& codec = ColorCodec{});

/// Canonical key order: id, title, category, keywords, layout, elements, then
/// extras; per element: id, type, layout, opacity, text, palette, then extras.
ordered_json document_to_json(const Document& d, const ColorCodec& codec = ColorCodec{});
/// document_to_json(d).dump(indent); indent < 0 gives a single line.
std::string serialize_document(const Document& d, const ColorCodec& codec = ColorCodec{},
                               int indent = -1);

/// Checks every document invariant; throws ValidationError.
void validate(const Document& d);

/// Masks exactly k filled slots chosen uniformly (seeded) over the
/// document-order list of all filled slots. k must be in [1, 3].
std::pair<Document, MaskRecord> mask_palette(const Document& d, int k, std::uint64_t seed);

/// Masked slots of `d` in document order.
std::vector<SlotRef> masked_slots(const Document& d);

/// Fills the targeted masked slots with `colors`, in target order.
Document apply_colors(const Document& d, std::span<const SlotRef> targets,
                      std::span<const Color> colors);
Document apply_colors(const Document& d, const MaskRecord& record, std::span<const Color> colors);

}  // namespace colorgpt
