#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "spinsq/collective.hpp"
#include "spinsq/errors.hpp"
#include "spinsq/models.hpp"

using namespace spinsq;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityOperator all_up(int n) {
  return product_state(std::vector<BlochVector>(n, BlochVector{0, 0, 1}));
}

DensityOperator singlet() {
  Vector psi = Vector::Zero(4);
  psi[1] = 1.0 / std::sqrt(2.0);
  psi[2] = -1.0 / std::sqrt(2.0);
  return DensityOperator::pure(psi, {2, 2});
}

void check_moments_close(const CollectiveMoments& m, const Vec3& j, const Mat3& c, double tol) {
  CHECK((m.j() - j).cwiseAbs().maxCoeff() < tol);
  CHECK((m.c() - c).cwiseAbs().maxCoeff() < tol);
}

}  // namespace

TEST_CASE("collective operators") {
  CHECK(max_abs(collective_operator(Axis::z, 1).matrix() - 0.5 * oracle::pauli(2)) == 0.0);
  Matrix jz2 = Matrix::Zero(4, 4);
  jz2.diagonal() << 1, 0, 0, -1;
  CHECK(max_abs(collective_operator(Axis::z, 2).matrix() - jz2) == 0.0);
  for (Axis a : kAxes) {
    const auto j4 = collective_operator(a, 4);
    CHECK(herm_eigenvalues(j4.matrix())[15] == doctest::Approx(2.0));
    CHECK(max_abs(j4.matrix() - oracle::collective(static_cast<int>(a), 4)) < 1e-15);
  }
  const int saved = max_qubits();
  set_max_qubits(4);
  CHECK_THROWS_AS(collective_operator(Axis::x, 5), CapacityError);
  set_max_qubits(saved);
}

TEST_CASE("apply_collective matches the dense product") {
  oracle::Rng rng(21);
  const Matrix m = oracle::random_density(8, 8, rng);
  for (Axis a : kAxes) {
    CHECK(max_abs(apply_collective(a, 3, m) - oracle::collective(static_cast<int>(a), 3) * m) < 1e-14);
  }
}

TEST_CASE("moments examples") {
  const auto up = moments(all_up(4));
  CHECK((up.j() - Vec3(0, 0, 2)).norm() < 1e-12);
  CHECK((up.k2() - Vec3(1, 1, 4)).norm() < 1e-12);
  CHECK((up.gamma() - Vec3(1, 1, 0).asDiagonal().toDenseMatrix()).norm() < 1e-12);

  const auto d = moments(dicke_state(4, 2));
  CHECK(d.j().norm() < 1e-12);
  CHECK((d.k2() - Vec3(3, 3, 0)).norm() < 1e-12);

  const auto s = moments(singlet());
  CHECK(s.j().norm() < 1e-12);
  CHECK(s.k2().norm() < 1e-12);

  CHECK_THROWS_AS(moments(DensityOperator::maximally_mixed({3})), ArgumentError);
}

TEST_CASE("moments agree with the trace oracle and satisfy the moment invariants") {
  oracle::Rng rng(22);
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      const Matrix r = oracle::random_density(1 << n, 1 + trial, rng);
      const DensityOperator rho(ComplexOperator::qubits(r));
      const auto m = moments(rho);
      const auto o = oracle::moments(r, n);
      check_moments_close(m, o.j, o.c, 1e-12);
      const double nn = n;
      CHECK((m.gamma() - (m.c() - m.j() * m.j().transpose())).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((m.chi() - ((nn - 1) * m.gamma() + m.c())).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(m.c().trace() <= nn * (nn + 2) / 4 + 1e-9);
      CHECK(m.c().trace() ==
            doctest::Approx(m.chi().trace() / nn + (nn - 1) / nn * m.j().squaredNorm()).epsilon(1e-9));
      CHECK(m.gamma().trace() ==
            doctest::Approx(m.chi().trace() / nn - m.j().squaredNorm() / nn).epsilon(1e-9));
    }
  }
}

TEST_CASE("symmetric states saturate Tr C = N(N+2)/4") {
  oracle::Rng rng(23);
  for (int n = 2; n <= 6; ++n) {
    const auto m = moments(DensityOperator::pure(oracle::random_symmetric(n, rng), std::vector<int>(n, 2)));
    CHECK(m.c().trace() == doctest::Approx(n * (n + 2) / 4.0).epsilon(1e-9));
  }
}

TEST_CASE("moment validation from raw numbers") {
  CHECK_THROWS_AS(CollectiveMoments::from_diagonal(2, Vec3::Zero(), Vec3(1, 1, 1)),
                  InconsistentMomentsError);
  CHECK_THROWS_AS(CollectiveMoments::from_diagonal(2, Vec3(0, 0, 1.5), Vec3(0, 0, 0.6)), ArgumentError);
  // Variance of J_z would be negative.
  CHECK_THROWS_AS(CollectiveMoments::from_diagonal(4, Vec3(0, 0, 2), Vec3(1, 1, 3)), ArgumentError);
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(CollectiveMoments::from_correlations(4, Vec3::Zero(), asym), ArgumentError);
  CHECK_NOTHROW(CollectiveMoments::from_diagonal(4, Vec3::Zero(), Vec3(1, 1, 1)));
}

TEST_CASE("rotate_moments") {
  const auto up = moments(all_up(4));
  const auto same = rotate_moments(up, Mat3::Identity());
  CHECK((same.c() - up.c()).norm() == 0.0);

  Mat3 cyc;
  cyc << 0, 0, 1, 1, 0, 0, 0, 1, 0;  // z -> x, x -> y, y -> z
  const auto r = rotate_moments(up, cyc);
  CHECK((r.j() - Vec3(2, 0, 0)).norm() < 1e-12);
  CHECK((r.k2() - Vec3(4, 1, 1)).norm() < 1e-12);

  oracle::Rng rng(24);
  const DensityOperator rho(ComplexOperator::qubits(oracle::random_density(16, 2, rng)));
  const auto m = moments(rho);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat3 o = oracle::random_rotation(rng);
    const auto mr = rotate_moments(m, o);
    CHECK(mr.c().trace() == doctest::Approx(m.c().trace()).epsilon(1e-9));
    CHECK(mr.gamma().trace() == doctest::Approx(m.gamma().trace()).epsilon(1e-9));
    CHECK(mr.j().squaredNorm() == doctest::Approx(m.j().squaredNorm()).epsilon(1e-9));
    const Vec3 e0 = Eigen::SelfAdjointEigenSolver<Mat3>(m.chi()).eigenvalues();
    const Vec3 e1 = Eigen::SelfAdjointEigenSolver<Mat3>(mr.chi()).eigenvalues();
    CHECK((e0 - e1).cwiseAbs().maxCoeff() < 1e-9);
  }
  Mat3 skew = Mat3::Identity();
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(rotate_moments(m, skew), ArgumentError);
}

TEST_CASE("reduced_av2") {
  Vector ket00 = Vector::Zero(4);
  ket00[0] = 1;
  const Matrix p00 = ket00 * ket00.adjoint();
  CHECK(max_abs(reduced_av2(all_up(2)).matrix() - p00) < 1e-14);
  CHECK(max_abs(reduced_av2(all_up(3)).matrix() - p00) < 1e-14);
  CHECK_THROWS_AS(reduced_av2(all_up(1)), ArgumentError);

  HamiltonianSpec spec;
  spec.kind = ModelKind::heisenberg_complete;
  spec.n = 4;
  const auto ground = thermal_state(build_hamiltonian(spec), 0.0);
  const auto av2 = reduced_av2(ground);
  const double d4 = trace_distance(av2.matrix(), 0.25 * Matrix::Identity(4, 4));
  CHECK(d4 <= 0.25);
  spec.n = 6;
  const double d6 =
      trace_distance(reduced_av2(thermal_state(build_hamiltonian(spec), 0.0)).matrix(),
                     0.25 * Matrix::Identity(4, 4));
  CHECK(d6 < d4);
}

TEST_CASE("reduced_av2 equals the average of the oracle pair traces") {
  oracle::Rng rng(25);
  const int n = 4;
  const Matrix r = oracle::random_density(16, 3, rng);
  Matrix avg = Matrix::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) avg += oracle::partial_trace(r, {2, 2, 2, 2}, {i, j});
    }
  }
  avg /= n * (n - 1);
  CHECK(max_abs(reduced_av2(DensityOperator(ComplexOperator::qubits(r))).matrix() - avg) < 1e-14);
}

TEST_CASE("twirl") {
  const auto s = twirl(singlet());
  CHECK(max_abs(s.matrix() - singlet().matrix()) < 1e-14);

  const auto t = moments(twirl(all_up(4)));
  CHECK(t.j().norm() < 1e-12);
  CHECK((t.k2() - Vec3(1, 1, 4)).norm() < 1e-12);

  oracle::Rng rng(26);
  for (int n = 1; n <= 4; ++n) {
    const DensityOperator rho(ComplexOperator::qubits(oracle::random_density(1 << n, 2, rng)));
    const auto tw = twirl(rho);
    CHECK_NOTHROW(DensityOperator(tw.op()));
    const auto before = moments(rho);
    const auto after = moments(tw);
    CHECK(after.j().norm() < 1e-9);
    CHECK((after.k2() - before.k2()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((after.variances() - before.k2()).cwiseAbs().maxCoeff() < 1e-9);
  }
  // Separable in, separable out: a product state twirls to a mixture of
  // product states, so every bipartition stays PPT.
  const std::vector<BlochVector> b{{0.6, 0, 0.8}, {0, 1, 0}, {0.3, -0.4, 0.5}};
  const auto tp = twirl(product_state(b));
  for (const auto& part : all_bipartitions(3)) {
    CHECK(herm_eigenvalues(partial_transpose(tp, part).matrix())[0] >= -1e-12);
  }
}

TEST_CASE("product_moments") {
  const std::vector<BlochVector> up(4, {0, 0, 1});
  const auto pm = product_moments(up);
  const auto dm = moments(all_up(4));
  CHECK((pm.c() - dm.c()).norm() < 1e-12);
  CHECK((pm.j() - dm.j()).norm() < 1e-12);

  const std::vector<BlochVector> alt{{0, 0, 1}, {0, 0, -1}};
  const auto a = product_moments(alt);
  CHECK(a.j().norm() < 1e-12);
  CHECK((a.k2() - Vec3(0.5, 0.5, 0)).norm() < 1e-12);

  const std::vector<BlochVector> xs(5, {1, 0, 0});
  CHECK(std::abs(product_moments(xs).variances()[0]) < 1e-12);

  const std::vector<BlochVector> bad{{1, 1, 0}};
  CHECK_THROWS_AS(product_moments(bad), ArgumentError);
}

TEST_CASE("product_moments agrees with the explicit tensor build") {
  oracle::Rng rng(27);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<BlochVector> b(n);
      for (auto& v : b) {
        Vec3 r(g(rng), g(rng), g(rng));
        r = r.normalized() * (trial == 0 ? 1.0 : u(rng));
        v = {r[0], r[1], r[2]};
      }
      const auto closed = product_moments(b);
      const auto dense = moments(product_state(b));
      CHECK((closed.c() - dense.c()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((closed.j() - dense.j()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}
