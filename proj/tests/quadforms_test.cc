#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.h"
#include "sigmak/cones.h"
#include "sigmak/jacobi.h"
#include "sigmak/quadforms.h"
#include "sigmak/rng.h"
#include "sigmak/sampling.h"

namespace {

sigmak::SampleSpec make_spec(int n, int k, double kappa1) {
  sigmak::SampleSpec s;
  s.n = n;
  s.k = k;
  s.kappa1_target = kappa1;
  return s;
}

using Eigen::MatrixXd;
using Eigen::VectorXd;
using sigmak::CounterRng;

VectorXd gaussian(int n, CounterRng& rng) {
  VectorXd v(n);
  for (int j = 0; j < n; ++j) v(j) = rng.normal();
  return v;
}

// Point of Gamma_k at unit-ish scale, by rejection.
VectorXd cone_point(int n, int k, CounterRng& rng) {
  for (;;) {
    if (auto p = sigmak::try_box(n, k, rng)) return *p;
  }
}

double quad(const MatrixXd& m, const VectorXd& x) { return x.dot(m * x); }

TEST(MinEig, Examples) {
  EXPECT_NEAR(sigmak::min_eig(MatrixXd::Identity(4, 4)), 1.0, 1e-15);
  const MatrixXd d = Eigen::Vector3d(3, -2, 5).asDiagonal();
  EXPECT_EQ(sigmak::min_eig(d), -2.0);
  const VectorXd w = Eigen::Vector4d(1, -2, 3, 0.5);
  EXPECT_NEAR(sigmak::min_eig(MatrixXd(w * w.transpose())), 0.0, 1e-14 * w.squaredNorm());
  EXPECT_THROW(sigmak::min_eig(MatrixXd(2, 3)), sigmak::invalid_input);
}

TEST(MinEig, AgreesWithEigenSolver) {
  CounterRng rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 12;
    MatrixXd a(n, n);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) a(p, q) = rng.normal() * std::pow(10.0, rng.uniform(-3, 3));
    }
    const MatrixXd s = (a + a.transpose()) / 2;
    const auto e = sigmak::jacobi_eigen(s);
    const auto ref = Eigen::SelfAdjointEigenSolver<MatrixXd>(s).eigenvalues();
    for (int j = 0; j < n; ++j) EXPECT_NEAR(e.values(j), ref(j), 1e-12 * s.norm());
    // Columns are orthonormal eigenvectors.
    EXPECT_NEAR((e.vectors.transpose() * e.vectors - MatrixXd::Identity(n, n)).norm(), 0.0,
                1e-12);
    EXPECT_NEAR((s * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 0.0,
                1e-11 * s.norm());
  }
}

TEST(KeyMatrix, AllOnesExample) {
  const VectorXd x = VectorXd::Ones(5);
  const auto prm = sigmak::make_key_params(x, 3, 0, 1.0);
  EXPECT_DOUBLE_EQ(prm.c, 1.0 / 5.0);
  const MatrixXd m = sigmak::key_matrix(x, prm);
  EXPECT_DOUBLE_EQ(m(0, 0), 30.0);
  for (int j = 1; j < 5; ++j) EXPECT_DOUBLE_EQ(m(j, j), 48.0);
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      if (p != q) {
        EXPECT_DOUBLE_EQ(m(p, q), 33.0);
      }
    }
  }
  EXPECT_EQ(quad(m, VectorXd::Zero(5)), 0.0);
}

TEST(KeyMatrix, DomainError) {
  const VectorXd x = VectorXd::Ones(5);
  EXPECT_THROW(sigmak::make_key_params(x, 3, 0, 0.1), sigmak::domain_error);
  sigmak::KeyParams<double> bad{3, 0, 0.1, 1.0};
  EXPECT_THROW(sigmak::key_matrix(x, bad), sigmak::domain_error);
  EXPECT_THROW(sigmak::make_key_params(x, 3, 5, 1.0), sigmak::invalid_input);
}

TEST(KeyMatrix, MatchesScalarSum) {
  CounterRng rng(31);
  for (int t = 0; t < 60; ++t) {
    const int n = 4 + t % 5;
    const int k = 2 + t % (n - 2);
    const VectorXd x = cone_point(n, k, rng);
    const int i = rng.integer(0, k - 1);
    const double K = 10.0 / (x(i) * sigmak::sigma_excl(k - 1, x, {i})) + rng.uniform(0, 5);
    const MatrixXd m = sigmak::key_matrix(x, sigmak::make_key_params(x, k, i, K));
    ASSERT_EQ(m, m.transpose());
    for (int r = 0; r < 100; ++r) {
      const VectorXd xi = gaussian(n, rng);
      const double want = oracle::key_form(oracle::to_std(x), k, i, K, oracle::to_std(xi));
      const double scale = m.cwiseAbs().sum() * xi.squaredNorm();
      EXPECT_NEAR(quad(m, xi), want, 1e-9 * scale);
    }
  }
}

TEST(KeyMatrix, DilationDegrees) {
  CounterRng rng(32);
  const int n = 6, k = 4, i = 1;
  const VectorXd x = cone_point(n, k, rng);
  const double K = 5.0 / (x(i) * sigmak::sigma_excl(k - 1, x, {i}));
  const double t = 3.0;
  const VectorXd y = t * x;
  // K vv^T scales by t^{2k-1}; rescaling K by t^{-k} brings it to degree k-1 like the rest.
  const MatrixXd a = sigmak::key_matrix(x, sigmak::make_key_params(x, k, i, K));
  const double Ky = K * std::pow(t, -k);
  const MatrixXd b = sigmak::key_matrix(y, sigmak::make_key_params(y, k, i, Ky));
  EXPECT_NEAR((b - std::pow(t, k - 1) * a).norm(), 0.0, 1e-12 * b.norm());
}

TEST(Abcd, AllOnesB) {
  const auto f = sigmak::abcd_matrices(VectorXd::Ones(5), 3, 0);
  for (int a = 0; a < 4; ++a) {
    EXPECT_DOUBLE_EQ(f.B(a, a), 6.0);
    for (int b = 0; b < 4; ++b) {
      if (a != b) {
        EXPECT_DOUBLE_EQ(f.B(a, b), -2.0);
      }
    }
  }
  EXPECT_EQ(f.index, (std::vector<int>{1, 2, 3, 4}));
}

TEST(Abcd, MatchesScalarSums) {
  CounterRng rng(33);
  for (int t = 0; t < 60; ++t) {
    const int n = 5 + t % 4;
    const int k = 3 + t % (n - 3);
    const VectorXd x = cone_point(n, k, rng);
    const int i = rng.integer(0, n - 1);
    const auto f = sigmak::abcd_matrices(x, k, i);
    for (const MatrixXd* m : {&f.A, &f.B, &f.C, &f.D}) ASSERT_EQ(*m, m->transpose());
    for (int r = 0; r < 100; ++r) {
      const VectorXd full = gaussian(n, rng);
      VectorXd red(n - 1);
      for (int a = 0; a < n - 1; ++a) red(a) = full(f.index[a]);
      const auto o = oracle::abcd_forms(oracle::to_std(x), k, i, oracle::to_std(full));
      const double s2 = red.squaredNorm();
      EXPECT_NEAR(quad(f.A, red), o.A, 1e-9 * f.A.cwiseAbs().sum() * s2);
      EXPECT_NEAR(quad(f.B, red), o.B, 1e-9 * f.B.cwiseAbs().sum() * s2);
      EXPECT_NEAR(quad(f.C, red), o.C, 1e-9 * f.C.cwiseAbs().sum() * s2);
      EXPECT_NEAR(quad(f.D, red), o.D, 1e-9 * f.D.cwiseAbs().sum() * s2);
    }
  }
}

TEST(Abcd, DIsRankOneGram) {
  CounterRng rng(34);
  for (int t = 0; t < 50; ++t) {
    const int n = 5 + t % 4;
    const VectorXd x = cone_point(n, n - 2, rng);
    const auto f = sigmak::abcd_matrices(x, n - 2, rng.integer(0, n - 1));
    const double s = f.D.cwiseAbs().maxCoeff();
    for (int a = 0; a < n - 1; ++a) {
      for (int b = a + 1; b < n - 1; ++b) {
        EXPECT_NEAR(f.D(a, a) * f.D(b, b) - f.D(a, b) * f.D(b, a), 0.0, 1e-9 * s * s);
      }
    }
  }
}

// A when (kappa|i) is in Gamma_{k-1}; B when (kappa|i) is in Gamma_{n-3}
// and k = n-2; D always.
TEST(Abcd, PsdUnderConeHypotheses) {
  CounterRng rng(35);
  int a_checked = 0, b_checked = 0;
  for (int t = 0; t < 600; ++t) {
    const int n = 5 + t % 4;
    const int k = n - 2;
    const VectorXd x = cone_point(n, k, rng);
    const int i = rng.integer(0, n - 1);
    const auto f = sigmak::abcd_matrices(x, k, i);
    const VectorXd red = sigmak::remove_entries(x, {i});
    EXPECT_GE(oracle::min_eig(f.D), -1e-9 * f.D.norm());
    if (sigmak::in_gamma(k - 1, red)) {
      ++a_checked;
      EXPECT_GE(oracle::min_eig(f.A), -1e-9 * f.A.norm());
    }
    if (sigmak::in_gamma(n - 3, red)) {
      ++b_checked;
      EXPECT_GE(oracle::min_eig(f.B), -1e-9 * f.B.norm());
    }
  }
  EXPECT_GT(a_checked, 100);
  EXPECT_GT(b_checked, 100);
}

TEST(Rhs, AlphaIsOneAtUnitKappa) {
  const VectorXd x = VectorXd::Ones(6);
  const auto prm = sigmak::make_key_params(x, 4, 2, 2.0);
  EXPECT_EQ(sigmak::rhs_combination(x, prm, true), sigmak::rhs_combination(x, prm, false));
}

TEST(Rhs, MatchesDefinition) {
  CounterRng rng(36);
  const int n = 6, k = 4;
  const VectorXd x = cone_point(n, k, rng);
  const int i = 1;
  const double base = x(i) * sigmak::sigma_excl(k - 1, x, {i});
  const auto p1 = sigmak::make_key_params(x, k, i, 10.0 / base);
  const auto p2 = sigmak::make_key_params(x, k, i, 20.0 / base);
  // c = 1/(K t - 1): doubling K takes c from 1/9 to 1/19.
  EXPECT_NEAR(p1.c, 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(p2.c, 1.0 / 19.0, 1e-14);
  const auto f = sigmak::abcd_matrices(x, k, i);
  const double sk = sigmak::sigma(k, x);
  const MatrixXd want = (x(i) * x(i) * f.A + sk * f.B + f.C) / p2.c - f.D;
  const MatrixXd got = sigmak::rhs_combination(x, p2, true);
  EXPECT_NEAR((got - want).norm(), 0.0, 1e-13 * want.norm());
  const MatrixXd e = sigmak::embed(got, i);
  EXPECT_EQ(e.row(i).norm(), 0.0);
  EXPECT_EQ(e(0, 0), got(0, 0));
  EXPECT_EQ(e(2, 3), got(1, 2));
}

TEST(Lemma41, ProofFormPsdOnSamples) {
  CounterRng rng(37);
  for (int n : {5, 6}) {
    const int k = n - 2;
    sigmak::SampleSpec spec = make_spec(n, k, 1e3);
    spec.near_top_index = 1;
    spec.sigma_k_range = {{1.0, 10.0}};
    for (int t = 0; t < 50; ++t) {
      const VectorXd x = sigmak::sample_gamma(spec, rng);
      const auto prm = sigmak::make_key_params(x, k, 1, 1e3);
      const MatrixXd g = sigmak::lemma41_gap(x, prm, true, sigmak::Lemma41Form::kProof);
      EXPECT_GE(oracle::min_eig(g) / g.norm(), -1e-8);
    }
  }
}

// Scalar oracle for the H form on the reduced vector.
TEST(HForm, MatchesScalarSumAndLowerBound) {
  CounterRng rng(38);
  for (int t = 0; t < 60; ++t) {
    const int n = 5 + t % 3;
    const VectorXd x = cone_point(n, n - 2, rng);
    const int i = rng.integer(0, n - 1);
    const auto h = sigmak::h_matrix(x, i);
    const auto kb = oracle::without(oracle::to_std(x), {i});
    std::vector<double> sq(kb.size());
    for (std::size_t j = 0; j < kb.size(); ++j) sq[j] = kb[j] * kb[j];
    const double r = 2 * static_cast<double>(oracle::sigma(n - 3, kb) / (3 * oracle::sigma(n - 5, kb)));
    const int m = n - 1;
    for (int a = 0; a < m; ++a) {
      EXPECT_NEAR(h.H(a, a), oracle::sigma_excl(n - 3, sq, {a}), 1e-10 * h.H.norm());
      for (int b = a + 1; b < m; ++b) {
        const double s5 = oracle::sigma_excl(n - 5, kb, {a, b});
        const double s3 = oracle::sigma_excl(n - 3, kb, {a, b});
        EXPECT_NEAR(h.H(a, b), r * s5 * s3 - s3 * s3, 1e-10 * h.H.norm());
      }
    }
    // xi^T H xi >= sum lower_j xi_j^2 when the reduced vector sits in Gamma_{n-3}.
    if (sigmak::in_gamma(n - 3, sigmak::remove_entries(x, {i}))) {
      const MatrixXd gap = h.H - MatrixXd(h.lower.asDiagonal());
      EXPECT_GE(oracle::min_eig(gap), -1e-8 * (h.H.norm() + h.lower.norm()));
    }
  }
  EXPECT_THROW(sigmak::h_matrix(VectorXd::Ones(4), 0), sigmak::invalid_input);
}

TEST(HForm, DimensionFiveHasUnitDenominator) {
  const VectorXd x = (VectorXd(5) << 3, 2, 1, 0.5, -0.2).finished();
  EXPECT_EQ(sigmak::sigma(0, sigmak::remove_entries(x, {0})), 1.0);
  EXPECT_NO_THROW(sigmak::h_matrix(x, 0));
}

TEST(TestFn, ZeroDerivativeGivesZeroTerms) {
  const VectorXd x = (VectorXd(5) << 9, 8, 3, 1, -0.5).finished();
  const auto t = sigmak::testfn_terms(x, 3, 1, VectorXd::Zero(5), 10.0);
  EXPECT_EQ(t.Ai, 0.0);
  EXPECT_EQ(t.Bi, 0.0);
  EXPECT_EQ(t.Ci, 0.0);
  EXPECT_EQ(t.Di, 0.0);
  EXPECT_EQ(t.Ei, 0.0);
  EXPECT_FALSE(t.vacuous);
}

TEST(TestFn, DividedDifferenceLimit) {
  EXPECT_NEAR(sigmak::scaled_divided_difference(2.0, 2.0, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(sigmak::scaled_divided_difference(2.0, 2.0 + 1e-9, 3.0), std::exp(-1.0), 1e-9);
  EXPECT_NEAR(sigmak::scaled_divided_difference(1.0, 3.0, 3.0),
              (std::exp(1.0) - std::exp(3.0)) / (1.0 - 3.0) * std::exp(-3.0), 1e-15);
  EXPECT_NEAR(sigmak::exprel(0.0), 1.0, 0.0);
  EXPECT_NEAR(sigmak::exprel(1e-3), std::expm1(1e-3) / 1e-3, 1e-15);
}

TEST(TestFn, MatchesUnscaledDefinition) {
  CounterRng rng(39);
  for (int t = 0; t < 100; ++t) {
    const int n = 5 + t % 3;
    const int k = n - 2;
    VectorXd x = cone_point(n, k, rng) * rng.uniform(1.0, 4.0);
    const int i = rng.integer(0, n - 1);
    const double K = rng.uniform(1, 100);
    const VectorXd h = gaussian(n, rng);
    const auto xs = oracle::to_std(x);
    long double P = 0, q = 0;
    for (int l = 0; l < n; ++l) {
      P += std::exp(x(l));
      q += std::exp(x(l)) * h(l);
    }
    double lin = 0, cross = 0, B = 0, C = 0, D = 0;
    for (int l = 0; l < n; ++l) {
      lin += oracle::sigma_excl(k - 1, xs, {l}) * h(l);
      for (int p = 0; p < n; ++p) {
        if (p != l) cross += oracle::sigma_excl(k - 2, xs, {l, p}) * h(l) * h(p);
      }
      C += std::exp(x(l)) * h(l) * h(l);
      if (l == i) continue;
      B += 2 * oracle::sigma_excl(k - 2, xs, {i, l}) * std::exp(x(l)) * h(l) * h(l);
      D += 2 * oracle::sigma_excl(k - 1, xs, {l}) * (std::exp(x(l)) - std::exp(x(i))) /
           (x(l) - x(i)) * h(l) * h(l);
    }
    const double sii = oracle::sigma_excl(k - 1, xs, {i});
    const double A = std::exp(x(i)) * (K * lin * lin - cross);
    C *= sii;
    const double E = static_cast<double>((1 + std::log(P)) / (P * std::log(P)) * sii * q * q);
    const double top = x.maxCoeff();
    const auto terms = sigmak::testfn_terms(x, k, i, h, K);
    const double s = std::exp(-top);
    const double scale = (std::abs(A) + std::abs(B) + C + std::abs(D) + std::abs(E)) * s;
    EXPECT_NEAR(terms.Ai, A * s, 1e-9 * scale);
    EXPECT_NEAR(terms.Bi, B * s, 1e-9 * scale);
    EXPECT_NEAR(terms.Ci, C * s, 1e-9 * scale);
    EXPECT_NEAR(terms.Di, D * s, 1e-9 * scale);
    EXPECT_NEAR(terms.Ei, E * s, 1e-9 * scale);
    const MatrixXd m = sigmak::testfn_matrix(x, k, i, K);
    EXPECT_NEAR(quad(m, h), terms.total(), 1e-10 * scale);
  }
}

TEST(TestFn, CAndDNonnegativeInCone) {
  CounterRng rng(40);
  for (int t = 0; t < 300; ++t) {
    const int n = 5 + t % 3;
    const VectorXd x = cone_point(n, n - 2, rng) * rng.uniform(1, 200);
    const auto terms =
        sigmak::testfn_terms(x, n - 2, rng.integer(0, n - 1), gaussian(n, rng), 10.0);
    EXPECT_GE(terms.Ci, 0.0);
    EXPECT_GE(terms.Di, 0.0);
    EXPECT_TRUE(std::isfinite(terms.Ei));
  }
}

TEST(TestFn, NoOverflowAtLargeScale) {
  const VectorXd x = (VectorXd(5) << 2000, 1999, 1500, 20, -3).finished();
  const auto terms = sigmak::testfn_terms(x, 3, 1, VectorXd::Ones(5), 1e3);
  for (double v : {terms.Ai, terms.Bi, terms.Ci, terms.Di, terms.Ei}) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(sigmak::testfn_matrix(x, 3, 1, 1e3).allFinite());
}

}  // namespace
