#include <wavedens/io.hpp>
#include <wavedens/risk.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace wavedens;

TEST(Ise, SelfTestIsZero)
{
  for (const auto& s : { TestSignal::gauss(), TestSignal::bumps(), TestSignal::mixture_hk(4) }) {
    const GridSpec grid = covering_grid(s.ise_core(), 1.0 / 1024.0);
    const double v = ise(
      [&s](std::span<const double> x) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          out[i] = s.pdf(x[i]);
        return out;
      },
      std::nullopt, s, grid);
    EXPECT_NEAR(v, 0.0, 1e-10) << s.id();
  }
}

TEST(Ise, AnalyticExamples)
{
  const auto u = TestSignal::uniform01();
  const GridSpec grid{ -1.0, 2.0, 1.0 / 1024.0 };
  const DensityEstimate zero(haar_basis(), {}, true, 10, Practical{}, 0);
  EXPECT_NEAR(ise(zero, u, grid), 1.0, 1e-6);
  const DensityEstimate half(haar_basis(), { { { -1, 0 }, 0.5, 0.0 }, { { 0, 0 }, 0.5, 0.0 } }, true, 10,
                             Practical{}, 1);
  // (phi + psi) / 2 = 1_[0,1/2).
  EXPECT_NEAR(ise(half, u, grid), 0.5, 1e-6);
  const DensityEstimate exact(haar_basis(), { { { -1, 0 }, 1.0, 0.0 } }, true, 10, Practical{}, 0);
  EXPECT_NEAR(ise(exact, u, grid), 0.0, 1e-12);
}

TEST(Ise, CoverageViolationNamesInterval)
{
  const DensityEstimate e(haar_basis(), { { { -1, 5 }, 1.0, 0.0 } }, true, 10, Practical{}, 0);
  try {
    ise(e, TestSignal::uniform01(), GridSpec{ -1.0, 2.0, 1.0 / 64.0 });
    FAIL() << "expected coverage error";
  } catch (const std::invalid_argument& err) {
    EXPECT_NE(std::string(err.what()).find("[2.000000, 6.000000]"), std::string::npos)
      << err.what();
  }
  EXPECT_THROW((GridSpec{ 0.0, 1.0, 1e-9 }.validate()), std::invalid_argument);
  EXPECT_THROW((GridSpec{ 1.0, 0.0, 0.1 }.validate()), std::invalid_argument);
}

TEST(Ise, StableUnderGridRefinement)
{
  const auto g = TestSignal::gauss();
  const auto e = estimate(g.sample(10, 2048), { .basis = spline_basis() });
  const Interval span = hull(g.ise_core(), *e.support());
  const double coarse = ise(e, g, covering_grid(span, default_grid_step(2048)));
  const double fine = ise(e, g, covering_grid(span, default_grid_step(2048) / 4.0));
  EXPECT_LE(std::abs(coarse - fine), 0.01 * fine);
}

TEST(Ise, HeavyTailAddsOutsideMass)
{
  const auto h = TestSignal::mixture_hk(2);
  const DensityEstimate zero(spline_basis(), {}, true, 10, Practical{}, 0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(ise(zero, h, covering_grid(h.ise_core(), 1.0 / 4096.0)),
              h.square_integral(-inf, inf), 1e-6);
}

TEST(Quantile, TypeSeven)
{
  EXPECT_EQ(quantile({ 1.0, 2.0, 3.0, 4.0 }, 0.5), 2.5);
  EXPECT_EQ(quantile({ 4.0, 1.0, 3.0, 2.0 }, 0.25), 1.75);
  EXPECT_EQ(quantile({ 7.0 }, 0.75), 7.0);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}

TEST(Sweep, SingleReplicationReportsItsIse)
{
  const auto methods = std::vector<Method>{ method_from_code("H") };
  const auto r = mise_sweep(TestSignal::uniform01(), methods, { .n = 256, .replications = 1 });
  ASSERT_EQ(r.size(), 1u);
  ASSERT_EQ(r[0].ise_values.size(), 1u);
  EXPECT_EQ(r[0].mean, r[0].ise_values[0]);
  EXPECT_EQ(r[0].median, r[0].ise_values[0]);
  EXPECT_EQ(r[0].replications, 1u);
}

TEST(Sweep, DeterministicAndWorkerIndependent)
{
  const std::vector<Method> methods{ method_from_code("S"), method_from_code("K") };
  const SweepOptions a{ .n = 300, .replications = 6, .master_seed = 9, .workers = 1 };
  SweepOptions b = a;
  b.workers = 3;
  const auto r1 = mise_sweep(TestSignal::bumps(), methods, a);
  const auto r2 = mise_sweep(TestSignal::bumps(), methods, a);
  const auto r3 = mise_sweep(TestSignal::bumps(), methods, b);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].ise_values, r2[i].ise_values);
    EXPECT_EQ(r1[i].ise_values, r3[i].ise_values);
    EXPECT_EQ(r1[i].kept_counts, r3[i].kept_counts);
  }
  SweepOptions c = a;
  c.master_seed = 10;
  EXPECT_NE(mise_sweep(TestSignal::bumps(), methods, c)[0].ise_values, r1[0].ise_values);
}

TEST(Sweep, AggregatesRecomputable)
{
  const std::vector<Method> methods{ method_from_code("S*") };
  const auto r = mise_sweep(TestSignal::gauss(), methods, { .n = 256, .replications = 9 })[0];
  double s = 0.0;
  for (double v : r.ise_values)
    s += v;
  EXPECT_DOUBLE_EQ(r.mean, s / 9.0);
  EXPECT_EQ(r.median, quantile(r.ise_values, 0.5));
  EXPECT_LE(r.q25, r.median);
  EXPECT_LE(r.median, r.q75);
  for (double v : r.ise_values)
    EXPECT_GE(v, 0.0);
}

TEST(Sweep, UnknownMethodListsValidCodes)
{
  try {
    method_from_code("Q");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("S, H, S*, K"), std::string::npos);
  }
}

TEST(Sweep, SupportAndTailParameters)
{
  const std::vector<Method> methods{ method_from_code("H") };
  const std::vector<double> ds{ 10.0 };
  const auto s = support_sweep(ds, methods, { .n = 128, .replications = 2 });
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].parameter, 10.0);
  EXPECT_EQ(s[0].signal_id, "gd(10)");
  const std::vector<double> ks{ 2.0, 8.0 };
  const auto t = tail_sweep(ks, methods, { .n = 128, .replications = 2 });
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].parameter, 8.0);
  const std::vector<double> gammas{ 0.5, 2.0 };
  const auto c = calibration_sweep(TestSignal::uniform01(), haar_basis(), gammas,
                                   { .n = 128, .replications = 2 });
  EXPECT_EQ(c[0].method_id, "gamma=0.5");
  EXPECT_EQ(c[1].parameter, 2.0);
}

TEST(Seeds, ReplicationSeedsDistinct)
{
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < 1000; ++r)
    seen.insert(replication_seed(1, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
}

TEST(Io, EstimateJsonRoundTrip)
{
  const auto e = estimate(TestSignal::gauss().sample(3, 700), { .basis = spline_basis() });
  const auto j = to_json(e);
  const auto back = estimate_from_json(nlohmann::json::parse(j.dump()), spline_basis());
  EXPECT_EQ(back.kept(), e.kept());
  EXPECT_EQ(back.j0(), e.j0());
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_THROW(estimate_from_json(j, haar_basis()), std::invalid_argument);
}

TEST(Io, ModeJsonRoundTrip)
{
  for (const ThresholdMode m : { ThresholdMode{ Practical{} }, ThresholdMode{ PracticalGamma{ 0.5 } },
                                 ThresholdMode{ TheoreticalGamma{ 2.0, 1.5, -1.0 } } }) {
    const auto back = mode_from_json(mode_to_json(m));
    EXPECT_EQ(mode_to_json(back), mode_to_json(m));
  }
  EXPECT_THROW(mode_from_json({ { "name", "hard" } }), std::invalid_argument);
}

TEST(Io, SampleCsvParsing)
{
  std::istringstream ok("# header comment\n0.5\n\n1.25,\n  -3e-2 \n");
  const auto s = read_sample_csv(ok);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.min(), -0.03);

  std::istringstream bad("1.0\n2.0\nabc\n");
  try {
    read_sample_csv(bad);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(read_sample_csv(empty), std::runtime_error);
  std::istringstream one("4.0\n");
  EXPECT_THROW(read_sample_csv(one), std::runtime_error);
  std::istringstream two_cols("1.0,2.0\n3.0\n");
  EXPECT_THROW(read_sample_csv(two_cols), std::runtime_error);
}

TEST(Io, SampleCsvRoundTripIsExact)
{
  const auto s = TestSignal::mixture_hk(2).sample(1, 300);
  std::stringstream ss;
  write_sample_csv(ss, s);
  const auto back = read_sample_csv(ss);
  for (std::size_t i = 0; i < s.size(); ++i)
    ASSERT_EQ(back[i], s[i]);
}
