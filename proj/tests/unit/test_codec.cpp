#include <colorgpt/codec.hpp>
#include <colorgpt/errors.hpp>
#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace colorgpt;
using nlohmann::ordered_json;
using colorgpt::testing::xkcd;

namespace {

ColorCodec codec(const char* name, const EmbeddingProvider* embedder = nullptr) {
  return ColorCodec(Representation::parse(name), &xkcd(), embedder);
}

ReplyError::Kind reply_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ReplyError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ReplyError";
  return ReplyError::Kind::Extraction;
}

}  // namespace

TEST(Codec, EncodesEachRepresentation) {
  const Color white{255, 255, 255};
  EXPECT_EQ(codec("hex").encode(white), "#ffffff");
  EXPECT_EQ(codec("rgb").encode(white), ordered_json::parse("[255,255,255]"));
  EXPECT_EQ(codec("cielab").encode(white), ordered_json::parse("[100.0,0.0,0.0]"));
  EXPECT_EQ(codec("word").encode(white), "white");
  EXPECT_EQ(codec("wordhex-h").encode(white), "white (#ffffff)");
  EXPECT_EQ(codec("rgb").encode_text({1, 2, 3}), "[1, 2, 3]");
  EXPECT_EQ(codec("cielab").encode_text(white), "(100, 0, 0)");
}

TEST(Codec, DecodesWordHexHexPart) {
  EXPECT_EQ(codec("wordhex-h").decode("white (#ffffff)"), (Color{255, 255, 255}));
  // The hex part wins even when the word disagrees.
  EXPECT_EQ(codec("wordhex-h").decode("black (#ffffff)"), (Color{255, 255, 255}));
}

TEST(Codec, DecodesWordHexWordPart) {
  HashingEmbedder embedder;
  EXPECT_EQ(codec("wordhex-w", &embedder).decode("black (#ffffff)"), (Color{0, 0, 0}));
}

TEST(Codec, DecodesTextualTriplets) {
  EXPECT_EQ(codec("rgb").decode("[12, 34, 56]"), (Color{12, 34, 56}));
  EXPECT_EQ(codec("rgb").decode("rgb(12,34,56)"), (Color{12, 34, 56}));
  EXPECT_EQ(codec("cielab").decode("(100, 0, 0)"), (Color{255, 255, 255}));
  EXPECT_EQ(codec("cielab").decode(ordered_json::parse("[0, 0, 0]")), (Color{0, 0, 0}));
}

TEST(Codec, HexWithoutHashAndQuotes) {
  EXPECT_EQ(codec("hex").decode(" \"#A0B0C0\" "), (Color{0xa0, 0xb0, 0xc0}));
  EXPECT_EQ(codec("hex").decode("a0b0c0"), (Color{0xa0, 0xb0, 0xc0}));
}

TEST(Codec, RejectsMaskAndGarbage) {
  EXPECT_EQ(reply_kind([] { codec("hex").decode("[MASK]"); }), ReplyError::Kind::Format);
  EXPECT_EQ(reply_kind([] { codec("hex").decode("teal-ish"); }), ReplyError::Kind::Format);
  EXPECT_EQ(reply_kind([] { codec("rgb").decode("[1, 2]"); }), ReplyError::Kind::Format);
  EXPECT_EQ(reply_kind([] { codec("rgb").decode("[1, 2, 300]"); }), ReplyError::Kind::Format);
  EXPECT_EQ(reply_kind([] { codec("wordhex-h").decode("white"); }), ReplyError::Kind::Format);
  EXPECT_EQ(reply_kind([] { codec("hex").decode(ordered_json(5)); }), ReplyError::Kind::Format);
}

TEST(Codec, WordNeedsDictionaryAndEmbedder) {
  EXPECT_THROW(ColorCodec(Representation::parse("word")).encode({1, 2, 3}), ValidationError);
  EXPECT_THROW(codec("word").decode("bluish"), ValidationError);
}

// Echoing an encoded color back must recover it for every lossless form.
TEST(Codec, RoundTripPerRepresentation) {
  HashingEmbedder embedder;
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    const Color c = colorgpt::testing::random_color(rng);
    for (const char* name : {"hex", "rgb", "wordhex-h"}) {
      const auto cc = codec(name, &embedder);
      EXPECT_EQ(cc.decode(cc.encode(c)), c) << name;
      EXPECT_EQ(cc.decode_text(cc.encode_text(c)), c) << name;
    }
    const auto lab = codec("cielab");
    const Color back = lab.decode(lab.encode(c));
    EXPECT_LE(std::abs(int(back.r) - c.r), 1);
    EXPECT_LE(std::abs(int(back.g) - c.g), 1);
    EXPECT_LE(std::abs(int(back.b) - c.b), 1);
    // Word forms quantize to the nearest dictionary color.
    const auto word = codec("word", &embedder);
    const Color named = word.decode(word.encode(c));
    EXPECT_EQ(hex_to_word(named, xkcd()), hex_to_word(c, xkcd()));
  }
}

TEST(Round2, HalfAwayFromZero) {
  EXPECT_DOUBLE_EQ(round2(1.005000001), 1.01);
  EXPECT_DOUBLE_EQ(round2(-2.346), -2.35);
  EXPECT_DOUBLE_EQ(round2(0.125), 0.13);
  EXPECT_DOUBLE_EQ(round2(3.0), 3.0);
}
