#include "pkr/harness.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

using namespace pkr;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(ParseAngle, Forms) {
  EXPECT_DOUBLE_EQ(parse_angle("0.25"), 0.25);
  EXPECT_DOUBLE_EQ(parse_angle(" 0.005pi "), 0.005 * pi);
  EXPECT_DOUBLE_EQ(parse_angle("pi"), pi);
  EXPECT_DOUBLE_EQ(parse_angle("-pi"), -pi);
  EXPECT_DOUBLE_EQ(parse_angle("pi/3"), pi / 3);
  EXPECT_DOUBLE_EQ(parse_angle("2pi/5"), 2 * pi / 5);
  EXPECT_DOUBLE_EQ(parse_angle("0.1*pi"), 0.1 * pi);
  EXPECT_DOUBLE_EQ(parse_angle("+0.5"), 0.5);
  for (const char* bad : {"", "abc", "pi/0", "pix", "1.0.0", "0.1pi/"}) {
    EXPECT_THROW(parse_angle(bad), std::invalid_argument) << bad;
  }
}

TEST(FormatAngle, SimpleMultiples) {
  EXPECT_EQ(format_angle(pi), "pi");
  EXPECT_EQ(format_angle(pi / 3), "pi/3");
  EXPECT_EQ(format_angle(0.005 * pi), "0.005pi");
  EXPECT_DOUBLE_EQ(parse_angle(format_angle(2 * pi / 7)), 2 * pi / 7);
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, pi}) EXPECT_EQ(parse_double_field(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_TRUE(std::isnan(parse_double_field("nan")));
}

TEST(ChannelSpecParsing, AllKinds) {
  const auto d = parse_channel_spec("depolarizing:p=0.1");
  EXPECT_EQ(d.kind, ChannelSpec::Kind::depolarizing);
  EXPECT_DOUBLE_EQ(d.p, 0.1);
  EXPECT_EQ(parse_channel_spec("phaseflip:p=0.3").kind, ChannelSpec::Kind::phaseflip);
  const auto p = parse_channel_spec("pauli:p1=0.7,p2=0.1,p3=0.1,p4=0.1");
  EXPECT_DOUBLE_EQ(p.pauli.p4, 0.1);
  const auto t = parse_channel_spec("trig:u=0.1pi,v=0.05pi");
  EXPECT_DOUBLE_EQ(t.trig.u, 0.1 * pi);
  EXPECT_DOUBLE_EQ(t.trig.v, 0.05 * pi);
  EXPECT_EQ(parse_channel_spec("none").kind, ChannelSpec::Kind::none);
  EXPECT_FALSE(parse_channel_spec("none").build().has_value());
  EXPECT_EQ(parse_channel_spec(t.to_string()).trig.u, t.trig.u);
  EXPECT_EQ(parse_channel_spec(p.to_string()).pauli.p1, 0.7);
}

TEST(ChannelSpecParsing, Errors) {
  for (const char* bad : {"depolarizing", "depolarizing:p=2", "depolarizing:p=0.1,q=1", "bitflip:p=0.1",
                          "pauli:p1=0.5,p2=0.5,p3=0.5,p4=0.5", "pauli:p1=1,p2=0,p3=0", "trig:u=0.1",
                          "phaseflip:p"}) {
    EXPECT_THROW(parse_channel_spec(bad), std::invalid_argument) << bad;
  }
}

TEST(BaseStateParsing, KindsAndErrors) {
  EXPECT_EQ(parse_base_state("swap").kind, BaseStateSpec::Kind::swap);
  EXPECT_EQ(parse_base_state("mswap").kind, BaseStateSpec::Kind::mswap);
  const auto m = parse_base_state("mixture:p=0.4");
  EXPECT_EQ(m.kind, BaseStateSpec::Kind::mixture);
  EXPECT_DOUBLE_EQ(m.p, 0.4);
  EXPECT_EQ(m.to_string(), "mixture:p=0.4");
  EXPECT_THROW(parse_base_state("mixture"), std::invalid_argument);
  EXPECT_THROW(parse_base_state("mixture:p=1.5"), std::invalid_argument);
  EXPECT_THROW(parse_base_state("werner"), std::invalid_argument);
}

TEST(Scenarios, BuiltinParameters) {
  const auto all = builtin_scenarios();
  ASSERT_EQ(all.size(), 5u);
  const auto f3 = find_scenario("fig3");
  EXPECT_DOUBLE_EQ(f3.rotation.theta, pi / 3);
  EXPECT_EQ(f3.channel.kind, ChannelSpec::Kind::none);
  const auto f4 = find_scenario("fig4");
  EXPECT_EQ(f4.channel.kind, ChannelSpec::Kind::depolarizing);
  EXPECT_DOUBLE_EQ(f4.channel.p, 0.1);
  EXPECT_DOUBLE_EQ(f4.rotation.theta, pi / 4);
  const auto f5 = find_scenario("fig5");
  EXPECT_EQ(f5.channel.kind, ChannelSpec::Kind::phaseflip);
  EXPECT_DOUBLE_EQ(f5.channel.p, 0.3);
  EXPECT_DOUBLE_EQ(f5.rotation.theta, pi / 7);
  const auto f6 = find_scenario("fig6");
  EXPECT_EQ(f6.base.kind, BaseStateSpec::Kind::mixture);
  EXPECT_DOUBLE_EQ(f6.base.p, 0.4);
  EXPECT_DOUBLE_EQ(f6.rotation.theta, pi / 8);
  const auto f7 = find_scenario("fig7");
  EXPECT_EQ(f7.channel.kind, ChannelSpec::Kind::trig);
  EXPECT_DOUBLE_EQ(f7.rotation.theta, pi / 8);
  EXPECT_THROW(find_scenario("fig8"), std::invalid_argument);
  for (const auto& s : all) {
    EXPECT_EQ(s.start.theta, 0.0);
    EXPECT_LT((s.true_axis() - to_cartesian(s.rotation)).norm(), 1e-15);
  }
}

TEST(Scenarios, DefaultGrids) {
  const auto t = default_theta1_list();
  ASSERT_EQ(t.size(), 4u);
  EXPECT_DOUBLE_EQ(t.front(), 0.0025 * pi);
  EXPECT_DOUBLE_EQ(t.back(), 0.01 * pi);
  const auto n = default_points_list();
  ASSERT_EQ(n.size(), 10u);
  EXPECT_EQ(n.front(), 10u);
  EXPECT_EQ(n.back(), 100u);
}

TEST(Sweep, RowOrderAndDeterminism) {
  const auto spec = find_scenario("fig3");
  const std::vector<double> t1{0.005 * pi, 0.01 * pi};
  const std::vector<std::size_t> n{20, 40, 60};
  SweepOptions opt;
  opt.record_timing = false;
  const auto a = run_sweep(spec, t1, n, opt);
  const auto b = run_sweep(spec, t1, n, opt);
  ASSERT_EQ(a.size(), 6u);
  EXPECT_EQ(a[0].theta1, t1[0]);
  EXPECT_EQ(a[2].n_points, 60u);
  EXPECT_EQ(a[3].theta1, t1[1]);
  EXPECT_EQ(a[3].n_points, 20u);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  for (const auto& r : a) {
    EXPECT_TRUE(r.trusted());
    EXPECT_LE(r.actual_error, r.bound);
    EXPECT_EQ(r.wall_ms, 0.0);
  }
}

TEST(Sweep, FailingRowIsRecorded) {
  const auto rows = run_sweep(find_scenario("fig3"), {0.0, 0.01}, {3, 20});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(std::isnan(rows[0].bound));
  EXPECT_FALSE(rows[0].trusted());
  EXPECT_TRUE(rows[3].error.empty());
}

TEST(Csv, HeaderOnlyAndRoundTrip) {
  std::ostringstream empty;
  write_csv(empty, {});
  EXPECT_EQ(empty.str(), std::string(kCsvHeader) + "\n");
  std::istringstream ein(empty.str());
  EXPECT_TRUE(read_csv(ein).empty());

  auto rows = run_sweep(find_scenario("fig5"), {0.005 * pi, 0.0}, {30});
  std::ostringstream os;
  write_csv(os, rows);
  std::istringstream is(os.str());
  const auto back = read_csv(is);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].scenario, rows[i].scenario);
    EXPECT_EQ(back[i].n_points, rows[i].n_points);
    EXPECT_EQ(back[i].theta1, rows[i].theta1);
    EXPECT_EQ(back[i].wall_ms, rows[i].wall_ms);
    if (rows[i].error.empty()) {
      EXPECT_EQ(back[i].bound, rows[i].bound);
      EXPECT_EQ(back[i].theta_est, rows[i].theta_est);
      EXPECT_EQ(back[i].invariance_dev, rows[i].invariance_dev);
    } else {
      EXPECT_TRUE(std::isnan(back[i].bound));
    }
  }
}

TEST(Csv, MalformedInput) {
  std::istringstream none("");
  EXPECT_THROW(read_csv(none), std::runtime_error);
  std::istringstream header("a,b,c\n");
  EXPECT_THROW(read_csv(header), std::runtime_error);
  std::istringstream short_row(std::string(kCsvHeader) + "\nfig3,1,2\n");
  EXPECT_THROW(read_csv(short_row), std::runtime_error);
}

TEST(Json, RoundTripWithFlagsAndErrors) {
  auto rows = run_sweep(find_scenario("fig7"), {0.005 * pi}, {4, 30});
  rows.push_back(run_sweep(find_scenario("fig3"), {0.0}, {10}).front());
  std::ostringstream os;
  write_json(os, rows);
  const auto j = nlohmann::ordered_json::parse(os.str());
  EXPECT_TRUE(j.back()["bound"].is_null());
  EXPECT_TRUE(j.back().contains("error"));
  std::istringstream is(os.str());
  const auto back = read_json(is);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].symmetry_broken, rows[i].symmetry_broken);
    EXPECT_EQ(back[i].low_confidence, rows[i].low_confidence);
    EXPECT_EQ(back[i].error, rows[i].error);
    if (rows[i].error.empty()) EXPECT_EQ(back[i].phi_est, rows[i].phi_est);
  }
  EXPECT_TRUE(back[1].symmetry_broken);
}

TEST(Emit, WritesFileAndReportsBadPath) {
  const auto path = std::filesystem::temp_directory_path() / "pkr_emit_test.csv";
  const auto rows = run_sweep(find_scenario("fig4"), {0.005 * pi}, {20});
  emit(rows, OutputFormat::csv, path.string());
  std::ifstream in(path);
  EXPECT_EQ(read_csv(in).size(), 1u);
  std::filesystem::remove(path);
  EXPECT_THROW(emit(rows, OutputFormat::csv, "/nonexistent-dir/x.csv"), std::runtime_error);
  EXPECT_EQ(parse_format("json"), OutputFormat::json);
  EXPECT_THROW(parse_format("xml"), std::invalid_argument);
}
