// Copyright 2026 The noisekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <set>
#include <string>

#include <gtest/gtest.h>

#include "noisekit/errors.h"
#include "noisekit/fileio.h"
#include "noisekit/hashing.h"
#include "noisekit/random.h"
#include "noisekit/record.h"
#include "noisekit/text.h"
#include "test_util.h"

namespace noisekit {
namespace {

TEST(Utf8Test, DecodesMultiByteSequences) {
  const auto units = text::DecodeUtf8("aé日🙂");
  ASSERT_EQ(units.size(), 4u);
  EXPECT_EQ(units[1].code_point, U'é');
  EXPECT_EQ(units[2].code_point, U'日');
  EXPECT_EQ(units[3].code_point, U'🙂');
  for (const auto& u : units) EXPECT_TRUE(u.valid);
}

TEST(Utf8Test, InvalidBytesBecomeSingleUnits) {
  // Truncated two-byte lead, overlong '/', and a lone surrogate.
  for (std::string bad : {std::string("\xC3"), std::string("\xC0\xAF"),
                          std::string("\xED\xA0\x80")}) {
    const auto units = text::DecodeUtf8(bad);
    EXPECT_EQ(units.size(), bad.size()) << bad.size();
    for (const auto& u : units) EXPECT_FALSE(u.valid);
    EXPECT_FALSE(text::IsValidUtf8(bad));
  }
}

TEST(Utf8Test, AppendRoundTrips) {
  std::string s;
  for (char32_t cp : {U'A', U'ß', U'€', U'𝄞'}) text::AppendUtf8(s, cp);
  EXPECT_EQ(s, "Aß€𝄞");
}

TEST(TextTest, WhitespaceHelpers) {
  EXPECT_EQ(text::Trim("  a b \n"), "a b");
  EXPECT_EQ(text::CollapseWhitespace("\t a \n\n b  c "), "a b c");
  EXPECT_EQ(text::AsciiLower("MiXeD É"), "mixed É");
  EXPECT_EQ(text::SplitWhitespace(" x  y\tz\n").size(), 3u);
  EXPECT_EQ(text::Join({"a", "b", "c"}, "-"), "a-b-c");
  EXPECT_TRUE(text::StartsWith("prefix", "pre"));
}

TEST(HashingTest, Sha256KnownVectors) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashingTest, DeriveSeedIsLabelSensitive) {
  EXPECT_EQ(DeriveSeed(7, "irr_train"), DeriveSeed(7, "irr_train"));
  EXPECT_NE(DeriveSeed(7, "irr_train"), DeriveSeed(7, "shots"));
  EXPECT_NE(DeriveSeed(7, "irr_train"), DeriveSeed(8, "irr_train"));
}

TEST(RngTest, UniformBelowStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(rng.UniformBelow(7), 7u);
}

TEST(RngTest, SampleHasDistinctIndices) {
  Rng rng(42);
  const auto s = rng.Sample(100, 50);
  EXPECT_EQ(s.size(), 50u);
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 50u);
  Rng again(42);
  EXPECT_EQ(again.Sample(100, 50), s);
}

TEST(RecordTest, EnumNamesRoundTrip) {
  for (auto k : {NoiseKind::kNone, NoiseKind::kWordFlip, NoiseKind::kCharFlip,
                 NoiseKind::kIrrelevant, NoiseKind::kCounterfactual}) {
    EXPECT_EQ(ParseNoiseKind(ToString(k)), k);
  }
  for (auto r : {Role::kPlain, Role::kPositive, Role::kNegative}) {
    EXPECT_EQ(ParseRole(ToString(r)), r);
  }
  EXPECT_THROW(ParseNoiseKind("sideways"), ValidationError);
}

TEST(FileIoTest, AtomicWriteLeavesNoTempFile) {
  testing::TempDir dir;
  const auto path = dir / "state.json";
  WriteFileAtomic(path, "one");
  WriteFileAtomic(path, "two");
  EXPECT_EQ(ReadFile(path), "two");
  EXPECT_FALSE(std::filesystem::exists(dir / "state.json.tmp"));
  EXPECT_THROW(ReadFile(dir / "missing"), IoError);
}

}  // namespace
}  // namespace noisekit
