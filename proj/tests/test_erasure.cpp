#include <gtest/gtest.h>

#include "selectkit/embeddings.hpp"
#include "selectkit/erasure.hpp"
#include "selectkit/errors.hpp"
#include "support.hpp"

using namespace selectkit;
using Eigen::MatrixXd;

namespace {

EditProblem<double> random_problem(int d_out, int d_in, int n1, int n0, double lambda,
                                   std::uint64_t seed) {
  EditProblem<double> p;
  p.W = random_normal_matrix(d_out, d_in, seed);
  p.C1 = random_normal_matrix(d_in, n1, seed + 1);
  p.Cstar = random_normal_matrix(d_in, n1, seed + 2);
  p.C0 = random_normal_matrix(d_in, n0, seed + 3);
  p.lambda = lambda;
  return p;
}

double lmax(const MatrixXd& M) { return Eigen::SelfAdjointEigenSolver<MatrixXd>(M).eigenvalues().maxCoeff(); }

}  // namespace

TEST(Erasure, AnchorEqualsTargetGivesZeroDelta) {
  auto p = random_problem(4, 8, 2, 3, 0.1, 11);
  p.Cstar = p.C1;
  auto s = solve_closed_form(p);
  EXPECT_LT(s.delta.norm(), 1e-12);
  EXPECT_LT(s.e1, 1e-20);
}

TEST(Erasure, ExactInterpolationWithoutPreservation) {
  auto p = random_problem(5, 4, 4, 3, 0.0, 21);
  auto s = solve_closed_form(p);
  EXPECT_LT(((p.W + s.delta) * p.C1 - p.W * p.Cstar).norm(), 1e-9);
  EXPECT_LT(s.e1, 1e-18);
  EXPECT_EQ(s.rank, 4);
}

TEST(Erasure, ClosedFormNoWorseThanGradientOracle) {
  auto p = random_problem(4, 8, 2, 3, 0.1, 31);
  const double lr = 1.0 / (2.0 * lmax(p.normal_matrix()));
  auto o = solve_gradient_oracle(p, lr, 200000, 1e-11);
  auto s = solve_closed_form(p);
  const double lo = loss_eval(p, o.delta).total;
  EXPECT_LE(s.total_loss, lo + 1e-6);
  EXPECT_NEAR(s.total_loss, lo, 1e-6);
}

TEST(Erasure, RankDeficientSystemSolvedMinNorm) {
  // n1 + n0 < d_in leaves M singular; the min-norm solution still zeroes
  // the gradient and has no component in the null space.
  auto p = random_problem(3, 10, 2, 2, 0.5, 41);
  auto s = solve_closed_form(p);
  EXPECT_EQ(s.rank, 4);
  EXPECT_LT(gradient(p, s.delta).norm(), 1e-9);
  MatrixXd basis(10, 4);
  basis << p.C1, p.C0;
  auto q = basis.fullPivHouseholderQr();
  MatrixXd Q = q.matrixQ().leftCols(4);
  EXPECT_LT((s.delta - s.delta * Q * Q.transpose()).norm(), 1e-9);
}

TEST(Erasure, LossAtZeroDelta) {
  auto p = random_problem(3, 5, 2, 2, 0.3, 51);
  auto z = MatrixXd::Zero(3, 5).eval();
  auto l = loss_eval(p, z);
  EXPECT_DOUBLE_EQ(l.e0, 0.0);
  EXPECT_NEAR(l.e1, (p.W * (p.C1 - p.Cstar)).squaredNorm(), 1e-12);
  p.Cstar = p.C1;
  auto l0 = loss_eval(p, z);
  EXPECT_DOUBLE_EQ(l0.total, 0.0);
  EXPECT_DOUBLE_EQ(l0.e1, 0.0);
}

TEST(Erasure, ScalarHandCase) {
  EditProblem<double> p;
  p.W = MatrixXd::Constant(1, 1, 2.0);
  p.C1 = MatrixXd::Constant(1, 1, 1.0);
  p.Cstar = MatrixXd::Constant(1, 1, 3.0);
  p.C0 = MatrixXd(1, 0);
  auto l = loss_eval(p, MatrixXd::Constant(1, 1, 4.0).eval());
  EXPECT_DOUBLE_EQ(l.e1, 0.0);
  EXPECT_DOUBLE_EQ(solve_closed_form(p).delta(0, 0), 4.0);
}

TEST(Erasure, OracleStopsImmediatelyWhenAlreadyOptimal) {
  auto p = random_problem(4, 6, 2, 2, 0.1, 61);
  p.Cstar = p.C1;
  auto o = solve_gradient_oracle(p, 0.01, 10, 1e-12);
  EXPECT_EQ(o.iterations, 0);
  EXPECT_LT(o.delta.norm(), 1e-15);
}

TEST(Erasure, OracleDivergesWithLargeStep) {
  auto p = random_problem(3, 4, 2, 3, 10.0, 71);
  p.C0 *= 30.0;
  const double lr = 10.0 / lmax(p.normal_matrix());
  EXPECT_THROW(solve_gradient_oracle(p, lr, 10000, 1e-10), ConvergenceError);
}

TEST(Erasure, OracleReportsNonConvergence) {
  auto p = random_problem(3, 4, 2, 3, 0.1, 81);
  try {
    solve_gradient_oracle(p, 1e-6, 3, 1e-12);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.gradient_norm(), 0.0);
  }
}

TEST(Erasure, ApplyEdit) {
  MatrixXd W = random_normal_matrix(3, 4, 5);
  EXPECT_EQ(apply_edit<double>(W, MatrixXd::Zero(3, 4)), W);
  EXPECT_LT(apply_edit<double>(W, -W).norm(), 1e-300);
  EXPECT_THROW(apply_edit<double>(W, MatrixXd::Zero(4, 3)), PreconditionError);
}

TEST(Erasure, ShapeChecks) {
  auto p = random_problem(3, 4, 2, 1, 0.1, 91);
  p.Cstar = MatrixXd::Zero(4, 3);
  EXPECT_THROW(solve_closed_form(p), PreconditionError);
  p = random_problem(3, 4, 2, 1, 0.1, 91);
  p.C1 = MatrixXd::Zero(5, 2);
  EXPECT_THROW(solve_closed_form(p), PreconditionError);
  p = random_problem(3, 4, 2, 1, -1.0, 91);
  EXPECT_THROW(solve_closed_form(p), PreconditionError);
}

TEST(Erasure, FloatInstantiation) {
  // Needs a well-conditioned M: single precision drops eigenvalues below
  // ~1e-4 of the largest, so an ill-conditioned instance legitimately differs.
  auto pd = random_problem(3, 4, 2, 6, 1.0, 101);
  const auto ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(pd.normal_matrix()).eigenvalues();
  ASSERT_GT(ev.minCoeff() / ev.maxCoeff(), 1e-2);
  EditProblem<float> pf{pd.W.cast<float>(), pd.C1.cast<float>(), pd.Cstar.cast<float>(),
                        pd.C0.cast<float>(), 1.0f};
  auto sf = solve_closed_form(pf);
  auto sd = solve_closed_form(pd);
  EXPECT_LT((sf.delta.cast<double>() - sd.delta).norm(), 1e-3 * (1.0 + sd.delta.norm()));
  EXPECT_EQ(sf.rank, sd.rank);
}

TEST(Embeddings, HashVectorsAreDeterministicUnitNorm) {
  auto e = EmbeddingProvider::hash_synthetic(16, 3);
  auto a = e.embed(Concept("Cat"));
  auto b = e.embed(Concept(" cat "));
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  EXPECT_NE(a, e.embed(Concept("dog")));
  EXPECT_NE(a, EmbeddingProvider::hash_synthetic(16, 4).embed(Concept("cat")));
}

TEST(Embeddings, FileModeLookupAndMissingConcept) {
  auto e = EmbeddingProvider::from_json({{"cat", {1.0, 0.0}}, {"dog", {0.0, 1.0}}});
  EXPECT_EQ(e.dimension(), 2);
  EXPECT_EQ(e.stack({Concept("dog"), Concept("cat")}), (MatrixXd(2, 2) << 0, 1, 1, 0).finished());
  EXPECT_THROW(e.embed(Concept("wolf")), Error);
  EXPECT_THROW(EmbeddingProvider::from_json({{"cat", {1.0}}, {"dog", {0.0, 1.0}}}), Error);
}

TEST(Embeddings, MatrixJsonRoundTrip) {
  MatrixXd m = random_normal_matrix(3, 2, 8);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
  EXPECT_THROW(matrix_from_json({{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3}}}), Error);
}
