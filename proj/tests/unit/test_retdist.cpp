#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "golden.hpp"

#include "stvol/error.hpp"
#include "stvol/numeric/quadrature.hpp"
#include "stvol/numeric/special.hpp"
#include "stvol/numeric/stats.hpp"
#include "stvol/retdist.hpp"

using namespace stvol;
using namespace stvol::retdist;

namespace {

const std::vector<ModelParams> kPresets{ModelParams::st11(), ModelParams::st01(), ModelParams::st12()};

double integrate_abs_moment(const ReturnDist& d, double alpha) {
  const double s = d.scale().w0();
  std::vector<double> pts{0.0};
  for (double p = 0.25 * s; p < 2000.0 * s; p *= 2.0) pts.push_back(p);
  numeric::QuadOptions o;
  o.rel_tol = 1e-11;
  o.max_intervals = 2000;
  return 2.0 * numeric::integrate([&](double x) { return std::pow(x, alpha) * return_pdf(d, x); },
                                  std::span<const double>(pts), o)
                   .value;
}

}  // namespace

TEST_CASE("raw ST11 density anchors") {
  const auto d = ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0));
  CHECK(return_pdf(d, 0.0) == doctest::Approx(3.0 / (2.0 * numeric::kSqrt2Pi)).epsilon(1e-13));
  CHECK(return_pdf(d, 0.0) == doctest::Approx(golden::st11_pdf_mean_w1_x0).epsilon(1e-13));
  CHECK(return_pdf(d, 2.0) == doctest::Approx(golden::st11_pdf_mean_w1_x2).epsilon(1e-12));
  for (const auto& m : kPresets) {
    const auto dm = ReturnDist::raw(VolScale::from_w0(m, 0.8));
    for (double x : {0.1, 1.0, 7.0}) CHECK(return_pdf(dm, x) == return_pdf(dm, -x));
  }
  CHECK_THROWS_AS(return_pdf(d, NAN), DomainError);
}

TEST_CASE("Meijer-G closed form") {
  CHECK(return_pdf_st11_analytic(1.0, 0.0) == doctest::Approx(golden::st11_pdf_mean_w1_x0).epsilon(1e-12));
  for (double x : {0.3, 2.0, 6.5}) {
    CHECK(return_pdf_st11_analytic(1.0, x) == return_pdf_st11_analytic(1.0, -x));
    CHECK(return_pdf_st11_analytic(2.0, 2.0 * x) == doctest::Approx(0.5 * return_pdf_st11_analytic(1.0, x)).epsilon(1e-13));
  }
  const auto st01 = ReturnDist::raw(VolScale::from_mean_w(ModelParams::st01(), 1.0));
  CHECK_THROWS_AS(return_pdf_st11_analytic(st01, 0.0), ContractError);
  const auto scaled = ReturnDist::scaled(ModelParams::st11(), 2.0);
  CHECK_THROWS_AS(return_pdf_st11_analytic(scaled, 0.0), ContractError);
  // G^{30}_{03}(0 | 0, 1, 3/2) = Gamma(1) Gamma(3/2)
  CHECK(meijer_g30_03(0.0, 0.0, 1.0, 1.5) == doctest::Approx(std::sqrt(numeric::kPi) / 2.0).epsilon(1e-14));
}

TEST_CASE("frozen Meijer-G reference table") {
  const auto table = read_reference_table(STVOL_TEST_DATA_DIR "/st11_meijer_reference.txt");
  REQUIRE(table.x.size() == 41);
  CHECK(table.oracle.find("mpmath") != std::string::npos);
  const auto d = ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0));
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    CHECK(return_pdf(d, table.x[i]) == doctest::Approx(table.pdf[i]).epsilon(1e-10));
    CHECK(return_pdf_st11_analytic(1.0, table.x[i]) == doctest::Approx(table.pdf[i]).epsilon(1e-10));
  }
  const std::string tmp = "stvol_table_roundtrip.txt";
  write_reference_table(tmp, table);
  const auto back = read_reference_table(tmp);
  std::remove(tmp.c_str());
  CHECK(back.oracle == table.oracle);
  CHECK(back.x == table.x);
  CHECK(back.pdf == table.pdf);
  CHECK_THROWS_AS(read_reference_table("does/not/exist.txt"), DomainError);
}

TEST_CASE("CDF and CCDF") {
  const auto sc = ReturnDist::scaled(ModelParams::st11(), 2.0);
  CHECK(return_ccdf_abs(sc, 0.0) == 1.0);
  CHECK(return_ccdf_abs(sc, 1.0) == doctest::Approx(golden::st11_scaled_ccdf_t1).epsilon(1e-11));
  CHECK(return_ccdf_abs(sc, 3.0) == doctest::Approx(golden::st11_scaled_ccdf_t3).epsilon(1e-11));
  CHECK(return_ccdf_abs(sc, 5.0) == doctest::Approx(golden::st11_scaled_ccdf_t5).epsilon(1e-11));
  CHECK(return_ccdf_abs(sc, 1.0) > 0.2);
  CHECK(return_ccdf_abs(sc, 1.0) < 0.5);
  CHECK_THROWS_AS(return_ccdf_abs(sc, -1.0), DomainError);
  for (const auto& m : kPresets) {
    const auto d = ReturnDist::raw(VolScale::from_mean_w(m, 0.5));
    CHECK(return_cdf(d, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    double prev = 1.0;
    for (double t = 0.05; t < 20.0; t *= 1.3) {
      const double c = return_ccdf_abs(d, t);
      CHECK(c <= prev);
      prev = c;
      CHECK(return_cdf(d, t) + return_cdf(d, -t) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(return_cdf(d, t) - return_cdf(d, -t) == doctest::Approx(1.0 - c).epsilon(1e-11));
    }
  }
}

TEST_CASE("absolute moments") {
  const auto d = ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0));
  CHECK(return_moment_abs(d, 2.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(return_moment_abs(d, 0.0) == doctest::Approx(1.0));
  const auto sc = ReturnDist::scaled(ModelParams::st11(), 2.0);
  CHECK(return_moment_abs(sc, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(return_moment_abs(sc, 4.0) == doctest::Approx(7.5).epsilon(1e-13));
  for (const auto& m : kPresets) {
    const auto dm = ReturnDist::raw(VolScale::from_w0(m, 1.0));
    for (double a : {1.0, 2.0, 3.0, 4.0})
      CHECK(integrate_abs_moment(dm, a) == doctest::Approx(return_moment_abs(dm, a)).epsilon(1e-6));
  }
}

TEST_CASE("normalization and scale equivariance") {
  for (const auto& m : kPresets) {
    for (double w0 : {0.01, 1.0, 30.0}) {
      const auto d = ReturnDist::raw(VolScale::from_w0(m, w0));
      CHECK(std::abs(integrate_abs_moment(d, 0.0) - 1.0) < 1e-8);
    }
    const auto base = ReturnDist::raw(VolScale::from_w0(m, 1.0));
    for (double c : {0.5, 2.0, 10.0}) {
      const auto dc = ReturnDist::raw(VolScale::from_w0(m, c));
      for (double x : {0.0, 0.3, 1.7, 6.0})
        CHECK(return_pdf(dc, c * x) == doctest::Approx(return_pdf(base, x) / c).epsilon(1e-10));
    }
  }
}

TEST_CASE("scaled law carries no scale") {
  CHECK(scaled_return_pdf(ModelParams::st11(), 0.0, 2.0) ==
        doctest::Approx(golden::st11_pdf_mean_w1_x0 * std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  CHECK(scaled_return_pdf(ModelParams::st11(), 0.0, 2.0) == doctest::Approx(0.690988).epsilon(1e-6));
  CHECK(scaled_return_pdf(ModelParams::st01(), 1.3, 1.0) == scaled_return_pdf(ModelParams::st01(), -1.3, 1.0));
  for (const auto& m : kPresets) {
    const auto a = ReturnDist::scaled(VolScale::from_mean_w(m, 0.01), 2.0);
    const auto b = ReturnDist::scaled(VolScale::from_mean_w(m, 5.0), 2.0);
    for (double x : {0.0, 0.5, 3.0, 9.0}) {
      CHECK(return_pdf(a, x) == return_pdf(b, x));
      CHECK(return_ccdf_abs(a, x) == return_ccdf_abs(b, x));
    }
    std::vector<double> pts{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
    const double m2 = 2.0 * numeric::integrate([&](double x) { return x * x * scaled_return_pdf(m, x, 2.0); },
                                               std::span<const double>(pts))
                                .value;
    CHECK(std::abs(m2 - 1.0) < 1e-6);
  }
  CHECK_THROWS_AS(ReturnDist::scaled(ModelParams::st11(), 0.0), DomainError);
}

TEST_CASE("return sampler") {
  const auto d = ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0));
  const auto x = sample_returns(d, 1'000'000, 77);
  const auto mo = numeric::sample_moments(x);
  double m2 = 0.0;
  for (double v : x) m2 += v * v;
  CHECK(std::abs(m2 / 1e6 - 4.0 / 3.0) < 0.01);
  CHECK(std::abs(mo.kurtosis - 7.5) < 0.2);
  CHECK(sample_returns(d, 0, 1).empty());
  CHECK(sample_returns(d, 5000, 3, Exec::serial) == sample_returns(d, 5000, 3, Exec::parallel));
  CHECK(sample_returns(d, 5000, 3) != sample_returns(d, 5000, 4));
}

TEST_CASE("grid evaluation matches pointwise calls") {
  const auto d = ReturnDist::raw(VolScale::from_mean_w(ModelParams::st01(), 0.2));
  const std::vector<double> xs{-1.0, -0.1, 0.0, 0.05, 0.5, 2.0};
  const auto pdf = evaluate_grid(d, xs, Quantity::pdf, Exec::parallel);
  const auto cdf = evaluate_grid(d, xs, Quantity::cdf, Exec::serial);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(pdf[i] == return_pdf(d, xs[i]));
    CHECK(cdf[i] == return_cdf(d, xs[i]));
  }
  const std::vector<double> ts{0.0, 0.1, 1.0};
  const auto cc = evaluate_grid(d, ts, Quantity::ccdf_abs);
  CHECK(cc[0] == 1.0);
}
