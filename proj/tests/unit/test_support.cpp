#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "adkyle/csv.hpp"
#include "adkyle/rng.hpp"
#include "adkyle/svg.hpp"

using namespace adkyle;

TEST(Rng, DerivedSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t b = 0; b < 64; ++b)
    for (std::uint64_t j = 0; j < 64; ++j) seen.insert(derive_seed(42, {b, j}));
  EXPECT_EQ(seen.size(), 64u * 64u);
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(Rng, ParallelForCoversEveryIndexOnce) {
  for (unsigned w : {1u, 2u, 5u}) {
    set_max_workers(w);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t b) { hits[b] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  set_max_workers(0);
}

TEST(Rng, ParallelForPropagatesExceptions) {
  set_max_workers(3);
  EXPECT_THROW(parallel_for(10, [](std::size_t b) {
                 if (b == 7) throw std::runtime_error("x");
               }),
               std::runtime_error);
  set_max_workers(0);
}

TEST(Csv, Formatting) {
  std::ostringstream os;
  CsvWriter w(os, {"a", "b", "c"});
  w.row(1, 0.1, "put");
  w.row(std::vector<double>{-0.0, 1e-300, 2.5});
  EXPECT_EQ(os.str(), "a,b,c\n1,0.1,put\n0,1e-300,2.5\n");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
}

TEST(Svg, Standalone) {
  SvgChart c;
  c.title = "t <1>";
  c.series.push_back({"s", {0, 1, 2}, {1, 4, 9}, ""});
  c.series.push_back({"d", {0, 1, 2}, {2, 2, 2}, "4 2"});
  const auto s = render_svg(c);
  EXPECT_EQ(s.rfind("<?xml", 0), 0u);
  EXPECT_NE(s.find("xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(s.find("t &lt;1&gt;"), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_EQ(s, render_svg(c));
}
