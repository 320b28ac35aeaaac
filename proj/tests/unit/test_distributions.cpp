#include <gtest/gtest.h>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "qpplab/distributions.hpp"
#include "qpplab/random.hpp"

using namespace qpplab;

namespace {

double relative_gap(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST(IncompleteBeta, MatchesBoost) {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const double a = 0.05 + rng.uniform() * 300.0;
    const double b = 0.05 + rng.uniform() * 300.0;
    const double x = rng.uniform();
    EXPECT_LT(std::fabs(dist::incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)), 1e-12)
        << "a=" << a << " b=" << b << " x=" << x;
  }
  EXPECT_EQ(dist::incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(dist::incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(StudentT, TwoTailedMatchesBoost) {
  Rng rng(32);
  for (int i = 0; i < 1000; ++i) {
    const double df = 1.0 + static_cast<double>(rng.below(700));
    const double t = rng.normal() * 4.0;
    boost::math::students_t d(df);
    const double expected = 2.0 * boost::math::cdf(boost::math::complement(d, std::fabs(t)));
    const double got = dist::student_t_two_tailed(t, df);
    EXPECT_LT(relative_gap(got, expected), 1e-9) << "t=" << t << " df=" << df;
  }
}

TEST(FSurvival, MatchesBoost) {
  Rng rng(33);
  for (int i = 0; i < 1000; ++i) {
    const double d1 = 1.0 + static_cast<double>(rng.below(10));
    const double d2 = 1.0 + static_cast<double>(rng.below(800));
    const double f = rng.uniform() * 20.0;
    boost::math::fisher_f d(d1, d2);
    const double expected = boost::math::cdf(boost::math::complement(d, f));
    EXPECT_LT(relative_gap(dist::f_survival(f, d1, d2), expected), 1e-9) << f << " " << d1 << " " << d2;
  }
  EXPECT_EQ(dist::f_survival(0.0, 3, 10), 1.0);
}

TEST(Normal, TwoTailedMatchesBoost) {
  boost::math::normal n;
  for (double z : {0.0, 0.5, 1.0, 1.959963984540054, 2.5758293035489, 4.0, -3.0, 8.0}) {
    const double expected = 2.0 * boost::math::cdf(boost::math::complement(n, std::fabs(z)));
    EXPECT_LT(relative_gap(dist::normal_two_tailed(z), expected), 1e-12);
  }
}
