#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qclif/events.hpp"
#include "test_util.hpp"

using namespace qclif;

TEST(Poisson, RateWithinThreeSigma) {
  // 200 Hz at 1 ms: p = 0.2, mean 20,000 over 1e5 cycles, sigma = 126.49.
  const std::uint64_t cycles = 100000;
  const auto s = poisson_stream(200.0, 1.0, 100, cycles, 7);
  std::vector<std::uint64_t> counts(100, 0);
  for (const auto &e : s.events)
    ++counts[e.channel];
  const double sigma = std::sqrt(cycles * 0.2 * 0.8);
  EXPECT_NEAR(sigma, 126.49110640673517, 1e-9);
  int inside = 0;
  for (auto c : counts)
    inside += std::abs(static_cast<double>(c) - 20000.0) <= 3 * sigma;
  EXPECT_GE(inside, 99);
}

TEST(Poisson, EdgeRates) {
  EXPECT_TRUE(poisson_stream(0.0, 1.0, 8, 1000, 1).events.empty());
  EXPECT_EQ(poisson_stream(1000.0, 1.0, 3, 10, 1).events.size(), 30u);
  EXPECT_THROW(poisson_stream(1500.0, 1.0, 3, 10, 1), RateOutOfRange);
  EXPECT_THROW(poisson_stream(-1.0, 1.0, 3, 10, 1), RateOutOfRange);
  EXPECT_THROW(poisson_stream(std::nan(""), 1.0, 3, 10, 1), RateOutOfRange);
}

TEST(Poisson, SeededAndDeterministic) {
  const auto a = poisson_stream(50.0, 1.0, 20, 500, 99);
  EXPECT_EQ(a, poisson_stream(50.0, 1.0, 20, 500, 99));
  EXPECT_NE(a, poisson_stream(50.0, 1.0, 20, 500, 100));
  EXPECT_NO_THROW(a.validate());
}

TEST(Poisson, FirstDrawsFollowDocumentedOrder) {
  // Cycle 0 channels 0..3, then cycle 1: u = (next() >> 11) * 2^-53.
  std::mt19937_64 gen(5);
  std::vector<Event> want;
  for (std::uint32_t t = 0; t < 2; ++t)
    for (std::uint32_t c = 0; c < 4; ++c)
      if (static_cast<double>(gen() >> 11) / 9007199254740992.0 < 0.5)
        want.push_back({t, c});
  EXPECT_EQ(poisson_stream(500.0, 1.0, 4, 2, 5).events, want);
}

TEST(Stream, CanonicalizeAndValidate) {
  EventStream s{{{3, 1}, {0, 2}, {3, 1}, {1, 0}}, 3, 2};
  const auto c = canonicalize(s);
  EXPECT_EQ(c.events, (std::vector<Event>{{0, 2}, {1, 0}, {3, 1}}));
  EXPECT_EQ(c.duration, 4u);
  EXPECT_THROW(s.validate(), InvariantViolation);
  EXPECT_THROW((EventStream{{{0, 5}}, 3, 1}.validate()), InvariantViolation);
  EXPECT_THROW((EventStream{{{4, 0}}, 3, 4}.validate()), InvariantViolation);
}

TEST(Stream, RasterRoundTrip) {
  std::mt19937_64 g(1);
  const auto s = testutil::random_stream(g, 9, 50, 0.3);
  const auto r = events_to_raster(s);
  EXPECT_EQ(r.total_spikes(), s.events.size());
  EXPECT_EQ(raster_to_events(r), s);
  StreamCursor cur(s);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto &v = cur.at(t);
    for (std::size_t c = 0; c < 9; ++c)
      EXPECT_EQ(v[c], r.at(t, c));
  }
}

TEST(TextFormat, RoundTrip) {
  std::mt19937_64 g(2);
  auto s = testutil::random_stream(g, 12, 80, 0.2);
  s.duration = 100; // trailing silent cycles survive via the comment line
  std::stringstream io;
  write_events_text(io, s);
  EXPECT_EQ(read_events_text(io), s);
}

TEST(TextFormat, InfersShapeWithoutComment) {
  std::istringstream is("timestep,channel\n0,3\n2,1\n");
  const auto s = read_events_text(is);
  EXPECT_EQ(s.channel_count, 4u);
  EXPECT_EQ(s.duration, 3u);
}

TEST(TextFormat, Errors) {
  std::istringstream bad_header("t,c\n0,1\n");
  EXPECT_THROW(read_events_text(bad_header), ParseError);
  std::istringstream bad_field("timestep,channel\n0,x\n");
  try {
    read_events_text(bad_field);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.position(), 2u);
  }
  std::istringstream decreasing("timestep,channel\n5,0\n4,0\n");
  EXPECT_THROW(read_events_text(decreasing), InvariantViolation);
  std::istringstream out_of_range("# channels=2\ntimestep,channel\n0,2\n");
  EXPECT_THROW(read_events_text(out_of_range), InvariantViolation);
}

TEST(BinaryFormat, RoundTripAndLayout) {
  const EventStream s{{{0, 1}, {0xA0B0C0D0, 2}}, 3, 0xA0B0C0D1ULL};
  const auto b = encode_events_binary(s);
  ASSERT_EQ(b.size(), 17u + 16u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "QSNN");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 3); // channel_count, little-endian
  EXPECT_EQ(b[9], 2); // event count
  EXPECT_EQ(b[25], 0xD0);
  EXPECT_EQ(b[28], 0xA0);
  EXPECT_EQ(decode_events_binary(b), s);
}

TEST(BinaryFormat, MillionEvents) {
  std::mt19937_64 g(3);
  const auto s = testutil::random_stream(g, 100, 20000, 0.5);
  ASSERT_GT(s.events.size(), 990000u);
  auto d = decode_events_binary(encode_events_binary(s));
  EXPECT_EQ(d.events, s.events);
  EXPECT_EQ(d.channel_count, s.channel_count);
}

TEST(BinaryFormat, TruncationReportsOffset) {
  const EventStream s{{{0, 1}, {1, 2}, {2, 0}}, 3, 3};
  auto b = encode_events_binary(s);
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{10},
                          b.size() - 1}) {
    const std::vector<std::uint8_t> part(b.begin(),
                                         b.begin() + static_cast<long>(cut));
    EXPECT_THROW(decode_events_binary(part), ParseError) << cut;
  }
  b[4] = 9;
  try {
    decode_events_binary(b);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(EventFile, ExtensionPicksFormat) {
  const auto dir = std::filesystem::temp_directory_path() / "qclif_events";
  std::filesystem::create_directories(dir);
  const EventStream s{{{0, 0}, {2, 1}}, 2, 3};
  write_event_file(dir / "a.qsnn", s);
  write_event_file(dir / "a.csv", s);
  EXPECT_EQ(read_event_file(dir / "a.qsnn"), s);
  EXPECT_EQ(read_event_file(dir / "a.csv"), s);
  EXPECT_THROW(read_event_file(dir / "missing.csv"), IoError);
}
