#include <sstream>

#include <gtest/gtest.h>

#include "okfrac/io.hpp"

namespace okfrac {
namespace {

using Q = Rational;

TEST(ParseRational, Forms) {
  EXPECT_EQ(parse_rational("3"), Q(3));
  EXPECT_EQ(parse_rational(" -7/14 "), Q(-1, 2));
  EXPECT_EQ(parse_rational("0.125"), Q(1, 8));
  EXPECT_EQ(parse_rational("1.5e2"), Q(150));
  EXPECT_EQ(parse_rational("25e-2"), Q(1, 4));
  EXPECT_EQ(parse_rational("+.5"), Q(1, 2));
  EXPECT_THROW(parse_rational(""), InvalidInstance);
  EXPECT_THROW(parse_rational("1/0"), InvalidInstance);
  EXPECT_THROW(parse_rational("abc"), InvalidInstance);
  EXPECT_THROW(parse_rational("1/2/3"), InvalidInstance);
}

TEST(FormatRational, RoundTrip) {
  EXPECT_EQ(format_rational(Q(4)), "4");
  EXPECT_EQ(format_rational(Q(-3, 6)), "-1/2");
  for (const Q& q : {Q(0), Q(22, 7), Q(-5), Q(1, 1048576)}) EXPECT_EQ(parse_rational(format_rational(q)), q);
}

TEST(InstanceJson, ExactRoundTrip) {
  const auto doc = io::json::parse(R"({"capacity": "5", "items": [
      {"id": 1, "value": 6, "size": "3"}, {"id": 2, "value": "4", "size": "1/3"}]})");
  const auto inst = io::instance_from_json<Q>(doc);
  ASSERT_EQ(inst.items.size(), 2u);
  EXPECT_EQ(inst.capacity, Q(5));
  const auto back = io::instance_from_json<Q>(io::instance_to_json(inst));
  EXPECT_EQ(back.capacity, inst.capacity);
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    EXPECT_EQ(back.items[i].id, inst.items[i].id);
    EXPECT_EQ(back.items[i].value, inst.items[i].value);
    EXPECT_EQ(back.items[i].size, inst.items[i].size);
  }
}

TEST(InstanceJson, FloatNumbersConvertExactly) {
  const auto doc = io::json::parse(R"({"capacity": 1, "items": [{"id": 1, "value": 0.1, "size": 0.5}]})");
  const auto inst = io::instance_from_json<Q>(doc);
  EXPECT_EQ(inst.items[0].value, Q(0.1));
  EXPECT_EQ(inst.items[0].size, Q(1, 2));
}

TEST(InstanceJson, Rejects) {
  EXPECT_THROW(io::instance_from_json<Q>(io::json::parse(R"({"items": []})")), InvalidInstance);
  EXPECT_THROW(io::instance_from_json<Q>(io::json::parse(R"({"capacity": 1})")), InvalidInstance);
  EXPECT_THROW(io::instance_from_json<Q>(io::json::parse(
                   R"({"capacity": 1, "items": [{"id": 1, "value": "x", "size": 1}]})")),
               InvalidInstance);
  EXPECT_THROW(io::read_instance<Q>("/nonexistent/instance.json"), InvalidInstance);
}

TEST(SolutionOutput, JsonAndCsv) {
  const auto inst = normalize(Instance<Q>{{{1, Q(6), Q(3)}, {2, Q(4), Q(4)}}, Q(5)});
  const auto sol = solve_fractional(inst);
  const auto j = io::solution_to_json(sol);
  EXPECT_EQ(j.at("schema_version"), io::kSchemaVersion);
  EXPECT_EQ(j.at("objective"), "8");
  EXPECT_EQ(j.at("support_size"), 2);
  std::ostringstream csv;
  io::write_solution_csv(csv, sol);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "id,fraction,utilization");
}

}  // namespace
}  // namespace okfrac
