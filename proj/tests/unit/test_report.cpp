#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gstruct/error.hpp"
#include "gstruct/report.hpp"

using namespace gstruct;

TEST(Report, CheckComparesResidualWithThreshold) {
  Report r;
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.worst(), nullptr);
  EXPECT_TRUE(r.check("equal", 1e-9, 1e-9).pass);
  EXPECT_FALSE(r.check("above", 2e-9, 1e-9).pass);
  EXPECT_FALSE(r.check("nan", std::nan(""), 1.0).pass);
  EXPECT_FALSE(r.check("inf", std::numeric_limits<double>::infinity(), 1.0).pass);
  EXPECT_FALSE(r.passed());
}

TEST(Report, WorstPrefersFailures) {
  Report r;
  r.check("big but fine", 5.0, 10.0);
  r.check("small failure", 2.0, 1.0);
  r.check("larger failure", 3.0, 1.0);
  ASSERT_NE(r.worst(), nullptr);
  EXPECT_EQ(r.worst()->name, "larger failure");
  EXPECT_DOUBLE_EQ(r.max_residual(), 5.0);
}

TEST(Report, MergePrefixesNamesAndNotes) {
  Report inner;
  inner.check("x", 0.0, 1.0, "here");
  inner.note("hello");
  Report outer;
  outer.flag("own", true);
  outer.merge(inner, "target");
  outer.merge(inner);
  ASSERT_EQ(outer.entries.size(), 3u);
  EXPECT_NE(outer.find("target: x"), nullptr);
  EXPECT_EQ(outer.find("target: x")->location, "here");
  EXPECT_NE(outer.find("x"), nullptr);
  EXPECT_EQ(outer.notes[0], "target: hello");
  EXPECT_EQ(outer.notes[1], "hello");
}

TEST(Error, CarriesCodeAndName) {
  const Error e(ErrorCode::NotMember, "outside");
  EXPECT_EQ(e.code(), ErrorCode::NotMember);
  EXPECT_STREQ(e.what(), "NotMember: outside");
  EXPECT_EQ(error_name(ErrorCode::IncoherentSequence), "IncoherentSequence");
}
