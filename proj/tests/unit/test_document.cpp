#include <colorgpt/document.hpp>
#include <colorgpt/errors.hpp>
#include <colorgpt/ingest.hpp>
#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"

using namespace colorgpt;

namespace {

constexpr const char* kMinimal = R"({
  "id": "mini", "title": "Hello", "category": "greeting", "keywords": ["hi"],
  "layout": {"width": 1.0, "height": 0.5},
  "elements": [{"id": "t", "type": "text", "layout": {"x": 0.1, "y": 0.1, "width": 0.5, "height": 0.1},
                "opacity": 1.0, "text": "Hello", "palette": ["#112233"]}]
})";

const std::vector<Document>& corpus() {
  static const auto docs = ingest_completion_corpus(colorgpt::testing::fixture("corpus.jsonl"));
  return docs;
}

Document single_element(std::vector<std::string> colors) {
  ordered_json j = ordered_json::parse(kMinimal);
  j["elements"][0]["palette"] = colors;
  return document_from_json(j);
}

}  // namespace

TEST(Document, ParsesMinimalFixture) {
  const auto d = parse_document(kMinimal);
  EXPECT_EQ(d.id, "mini");
  ASSERT_EQ(d.elements.size(), 1u);
  EXPECT_EQ(d.elements[0].kind, ElementKind::Text);
  EXPECT_EQ(d.elements[0].text, "Hello");
  EXPECT_EQ(d.elements[0].palette.colors(), (std::vector<Color>{{0x11, 0x22, 0x33}}));
  EXPECT_EQ(d.canvas_height, 0.5);
}

TEST(Document, SyntaxErrorsAreParseErrors) {
  EXPECT_THROW(parse_document(""), ParseError);
  try {
    parse_document(R"({"id": "x", )");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(Document, InvariantViolationsNameTheField) {
  auto j = ordered_json::parse(kMinimal);
  j["elements"].push_back(j["elements"][0]);
  try {
    document_from_json(j);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("elements[1].id"), std::string::npos) << e.what();
  }

  const auto expect_invalid = [](ordered_json bad, const std::string& field) {
    try {
      document_from_json(bad);
      ADD_FAILURE() << "accepted " << bad.dump();
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  auto canvas = ordered_json::parse(kMinimal);
  canvas["layout"]["width"] = 0.8;
  expect_invalid(canvas, "layout");
  auto opacity = ordered_json::parse(kMinimal);
  opacity["elements"][0]["opacity"] = 1.5;
  expect_invalid(opacity, "elements[0].opacity");
  auto empty_palette = ordered_json::parse(kMinimal);
  empty_palette["elements"][0]["palette"] = ordered_json::array();
  expect_invalid(empty_palette, "elements[0].palette");
  auto six = ordered_json::parse(kMinimal);
  six["elements"][0]["palette"] = {"#000000", "#000000", "#000000", "#000000", "#000000", "#000000"};
  expect_invalid(six, "elements[0].palette");
  auto type = ordered_json::parse(kMinimal);
  type["elements"][0]["type"] = "video";
  expect_invalid(type, "elements[0].type");
  auto size = ordered_json::parse(kMinimal);
  size["elements"][0]["layout"]["width"] = -1;
  expect_invalid(size, "elements[0].layout");
}

TEST(Document, BadColorIsRejected) {
  auto j = ordered_json::parse(kMinimal);
  j["elements"][0]["palette"] = {"#12345"};
  EXPECT_ANY_THROW(document_from_json(j));
}

TEST(Document, CanonicalKeyOrderAndMaskToken) {
  auto j = ordered_json::parse(kMinimal);
  j["elements"][0]["palette"] = {"#112233", "[MASK]"};
  j["elements"][0]["font"] = "serif";
  j["source"] = "unit";
  const auto d = document_from_json(j);
  EXPECT_EQ(d.masked_count(), 1u);
  const auto out = document_to_json(d);
  std::vector<std::string> keys;
  for (auto it = out.begin(); it != out.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "title", "category", "keywords", "layout", "elements", "source"}));
  std::vector<std::string> ekeys;
  for (auto it = out["elements"][0].begin(); it != out["elements"][0].end(); ++it) ekeys.push_back(it.key());
  EXPECT_EQ(ekeys, (std::vector<std::string>{"id", "type", "layout", "opacity", "text", "palette", "font"}));
  EXPECT_EQ(out["elements"][0]["palette"][1], "[MASK]");
}

TEST(Document, SerializesPerRepresentation) {
  const auto d = single_element({"#ffffff"});
  const ColorCodec rgb(Representation::parse("rgb"));
  const auto j = document_to_json(d, rgb);
  EXPECT_EQ(j["elements"][0]["palette"][0], ordered_json::parse("[255,255,255]"));
  EXPECT_EQ(document_from_json(j, rgb), d);
}

TEST(Document, RoundTripOnFixtureCorpus) {
  ASSERT_EQ(corpus().size(), 20u);
  for (const auto& d : corpus()) {
    const auto text = serialize_document(d);
    EXPECT_EQ(parse_document(text), d);
    EXPECT_EQ(serialize_document(parse_document(text)), text);
  }
}

TEST(Mask, DeterministicPerSeed) {
  const auto& d = corpus()[0];
  const auto [a, ra] = mask_palette(d, 1, 99);
  const auto [b, rb] = mask_palette(d, 1, 99);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ra, rb);
  EXPECT_EQ(a.masked_count(), 1u);
  EXPECT_EQ(ra.k(), 1u);
  EXPECT_EQ(ra.seed, 99u);
  EXPECT_EQ(ra.document_id, d.id);
}

TEST(Mask, ExhaustsSmallDocument) {
  const auto d = single_element({"#010101", "#020202", "#030303"});
  const auto [masked, record] = mask_palette(d, 3, 5);
  EXPECT_EQ(masked.masked_count(), 3u);
  EXPECT_EQ(masked.filled_count(), 0u);
  EXPECT_EQ(record.ground_truth(), d.elements[0].palette.colors());
}

TEST(Mask, RejectsBadK) {
  const auto d = single_element({"#010101", "#020202"});
  EXPECT_THROW(mask_palette(d, 3, 1), ValidationError);
  EXPECT_THROW(mask_palette(d, 0, 1), ValidationError);
  EXPECT_THROW(mask_palette(d, 4, 1), ValidationError);
}

TEST(Mask, UniformOverSlots) {
  // 10 filled slots over two elements.
  auto j = ordered_json::parse(kMinimal);
  j["elements"][0]["palette"] = {"#000001", "#000002", "#000003", "#000004", "#000005"};
  auto second = j["elements"][0];
  second["id"] = "u";
  second["palette"] = {"#000006", "#000007", "#000008", "#000009", "#00000a"};
  j["elements"].push_back(second);
  const auto d = document_from_json(j);
  std::map<std::pair<std::string, std::size_t>, int> counts;
  constexpr int kSeeds = 10000;
  for (int s = 0; s < kSeeds; ++s) {
    const auto [masked, record] = mask_palette(d, 1, s);
    counts[{record.entries[0].target.element_id, record.entries[0].target.slot}]++;
  }
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [slot, n] : counts) EXPECT_NEAR(n / double(kSeeds), 0.1, 0.02);
}

TEST(Mask, TouchesOnlySelectedSlots) {
  for (const auto& d : corpus()) {
    for (int k = 1; k <= 3; ++k) {
      const auto [masked, record] = mask_palette(d, k, 1234);
      ASSERT_EQ(masked.elements.size(), d.elements.size());
      std::size_t changed = 0;
      for (std::size_t e = 0; e < d.elements.size(); ++e) {
        auto a = d.elements[e], b = masked.elements[e];
        ASSERT_EQ(a.palette.size(), b.palette.size());
        for (std::size_t s = 0; s < a.palette.size(); ++s) {
          if (a.palette.slots[s] != b.palette.slots[s]) {
            ++changed;
            EXPECT_FALSE(b.palette.slots[s].has_value());
          }
        }
        a.palette = b.palette;
        EXPECT_EQ(a, b);
      }
      EXPECT_EQ(changed, std::size_t(k));
    }
  }
}

TEST(ApplyColors, GroundTruthRestoresOriginal) {
  for (const auto& d : corpus()) {
    const auto [masked, record] = mask_palette(d, 2, 77);
    EXPECT_EQ(apply_colors(masked, record, record.ground_truth()), d);
    EXPECT_EQ(serialize_document(apply_colors(masked, record, record.ground_truth())), serialize_document(d));
  }
}

TEST(ApplyColors, Locality) {
  const auto& d = corpus()[3];
  const auto [masked, record] = mask_palette(d, 2, 8);
  const std::vector<Color> fill{{1, 2, 3}, {4, 5, 6}};
  const auto out = apply_colors(masked, record, fill);
  std::size_t differ = 0;
  for (std::size_t e = 0; e < out.elements.size(); ++e) {
    for (std::size_t s = 0; s < out.elements[e].palette.size(); ++s) {
      differ += out.elements[e].palette.slots[s] != masked.elements[e].palette.slots[s];
    }
  }
  EXPECT_EQ(differ, 2u);
  EXPECT_EQ(out.masked_count(), 0u);
}

TEST(ApplyColors, RepeatedColorsOnlyChangeRecordedSlot) {
  const auto d = single_element({"#abcdef", "#abcdef", "#abcdef"});
  const std::vector<SlotRef> target{{"t", 1}};
  auto masked = d;
  masked.elements[0].palette.slots[1].reset();
  const auto out = apply_colors(masked, target, std::vector<Color>{{0, 0, 0}});
  EXPECT_EQ(out.elements[0].palette.colors(),
            (std::vector<Color>{{0xab, 0xcd, 0xef}, {0, 0, 0}, {0xab, 0xcd, 0xef}}));
}

TEST(ApplyColors, LengthMismatch) {
  const auto [masked, record] = mask_palette(corpus()[0], 2, 1);
  EXPECT_THROW(apply_colors(masked, record, std::vector<Color>{{0, 0, 0}}), ValidationError);
}

TEST(MaskRecord, JsonRoundTrip) {
  const auto [masked, record] = mask_palette(corpus()[1], 3, 42);
  EXPECT_EQ(mask_record_from_json(to_json(record)), record);
  EXPECT_EQ(masked_slots(masked), record.targets());
}

TEST(ElementKind, Names) {
  for (const char* n : {"text", "colored_background", "svg", "raster"}) {
    EXPECT_EQ(to_string(parse_element_kind(n)), n);
  }
  EXPECT_THROW(parse_element_kind("video"), ValidationError);
}
