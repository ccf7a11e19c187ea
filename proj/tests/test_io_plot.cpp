#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "stabkit/io.hpp"
#include "stabkit/plot.hpp"

using namespace stabkit;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

Trajectory small_trajectory() {
  Trajectory tr;
  for (int i = 0; i <= 4; ++i) {
    const double t = 0.25 * i;
    tr.times.push_back(t);
    tr.states.push_back({std::exp(-t), 1.0 / 3.0 + t});
    tr.outputs.push_back({std::exp(-t)});
  }
  return tr;
}

std::filesystem::path temp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(INFINITY), "inf");
  EXPECT_EQ(io::format_double(-INFINITY), "-inf");
  EXPECT_EQ(io::format_double(NAN), "nan");
  EXPECT_TRUE(std::isnan(io::parse_double("nan")));
  EXPECT_THROW(io::parse_double("1.5x"), ParameterError);
  EXPECT_THROW(io::parse_double(""), ParameterError);
}

TEST(TrajectoryCsv, HeaderAndExactValues) {
  const auto tr = small_trajectory();
  const std::vector<double> u{1, 2, 3, 4, 5};
  const auto t = io::parse_csv(io::trajectory_csv(tr, &u));
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "x1", "x2", "y1", "u"}));
  ASSERT_EQ(t.rows.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(t.rows[k][0], tr.times[k]);
    EXPECT_EQ(t.rows[k][2], tr.states[k][1]);
    EXPECT_EQ(t.rows[k][4], u[k]);
  }
  EXPECT_EQ(io::parse_csv(io::trajectory_csv(tr)).header.size(), 4u);
}

TEST(EstimateCsv, CommentsAndRows) {
  StabilityEstimate e;
  e.kind = EstimateKind::gain_curve;
  e.seed = 42;
  e.horizon = 30;
  e.abscissae = {0, 0.5};
  e.values = {0, INFINITY};
  e.label = "demo";
  const auto t = io::parse_csv(io::estimate_csv(e));
  EXPECT_TRUE(plot::is_estimate_table(t));
  EXPECT_EQ(t.comments.front(), (std::pair<std::string, std::string>{"kind", "gain-curve"}));
  EXPECT_EQ(t.comments[1].second, "42");
  EXPECT_TRUE(std::isinf(t.rows[1][1]));
}

TEST(ParseCsv, Errors) {
  EXPECT_THROW(io::parse_csv("# only a comment\n"), ParameterError);
  EXPECT_THROW(io::parse_csv("a,b\n1\n"), ParameterError);
  EXPECT_THROW(io::parse_csv("a,b\n1,zz\n"), ParameterError);
  EXPECT_NO_THROW(io::parse_csv("a,b\n"));
}

TEST(Svg, PanelsPerStyle) {
  const std::vector<double> u{1, 2, 3, 4, 5};
  const auto t = io::parse_csv(io::trajectory_csv(small_trajectory(), &u));
  EXPECT_EQ(count(plot::render_svg(t, plot::Style::states), "<polyline"), 3u);
  EXPECT_EQ(count(plot::render_svg(t, plot::Style::all), "<polyline"), 4u);
  EXPECT_EQ(plot::default_style(t), plot::Style::states);
  const auto e = io::parse_csv("abscissa,value\n0,0\n1,2\n");
  EXPECT_EQ(plot::default_style(e), plot::Style::curve);
  EXPECT_EQ(count(plot::render_svg(e, plot::Style::curve), "<polyline"), 1u);
}

TEST(Svg, DeterministicAndWellFormed) {
  const auto t = io::parse_csv(io::trajectory_csv(small_trajectory()));
  const auto a = plot::render_svg(t, plot::Style::states, "title");
  EXPECT_EQ(a, plot::render_svg(t, plot::Style::states, "title"));
  EXPECT_EQ(a.rfind("<?xml", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST(Svg, DecimatesLongSeries) {
  io::Table t;
  t.header = {"t", "x1"};
  for (int i = 0; i < 50000; ++i) t.rows.push_back({i * 0.01, std::sin(i * 0.01)});
  const auto svg = plot::render_svg(t, plot::Style::states);
  const auto pts = svg.substr(svg.find("points=\""));
  EXPECT_LE(count(pts, ","), 2000u);
}

TEST(Svg, SchemaMismatchAndEmptyRows) {
  const auto e = io::parse_csv("abscissa,value\n0,0\n");
  EXPECT_THROW(plot::render_svg(e, plot::Style::states), ParameterError);
  const auto t = io::parse_csv(io::trajectory_csv(small_trajectory()));
  EXPECT_THROW(plot::render_svg(t, plot::Style::curve), ParameterError);
  EXPECT_THROW(plot::render_svg(io::parse_csv("t,x1\n"), plot::Style::states), ParameterError);
  EXPECT_THROW(plot::render_svg(io::parse_csv("t,y1\n0,1\n"), plot::Style::states), ParameterError);
  EXPECT_THROW(plot::parse_style("bars"), ParameterError);
}

TEST(PlotFile, NoOutputOnError) {
  const auto csv = temp("stabkit_empty.csv"), svg = temp("stabkit_empty.svg");
  std::filesystem::remove(svg);
  io::write_text(csv.string(), "t,x1,y1\n");
  EXPECT_THROW(plot::plot_file(csv.string(), svg.string()), ParameterError);
  EXPECT_FALSE(std::filesystem::exists(svg));
  io::write_text(csv.string(), "t,x1,y1\n0,1,1\n1,2,2\n");
  plot::plot_file(csv.string(), svg.string());
  EXPECT_TRUE(std::filesystem::exists(svg));
  std::filesystem::remove(csv);
  std::filesystem::remove(svg);
  EXPECT_THROW(io::read_text(temp("stabkit_missing_file.csv").string()), ParameterError);
}
