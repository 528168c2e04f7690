#include <doctest.h>

#include <algorithm>
#include <random>

#include "fluxkit/constants.hpp"
#include "fluxkit/operators.hpp"

using namespace fluxkit;

namespace {

Matrix random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

Matrix random_complex(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("pauli-x eigenvalues at Delta/2pi = 5 GHz") {
  Matrix h(2, 2);
  h << 0.0, 2.5, 2.5, 0.0;
  EigenSolution es = eigendecompose(HermitianOperator(h), 2);
  CHECK(es.energies(0) == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(es.energies(1) == doctest::Approx(+2.5).epsilon(1e-12));
}

TEST_CASE("diagonal matrix sorts ascending with permuted basis vectors") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 1;
  h(1, 1) = 3;
  h(2, 2) = 2;
  EigenSolution es = eigendecompose(HermitianOperator(h), 3);
  CHECK(es.energies(0) == doctest::Approx(1));
  CHECK(es.energies(1) == doctest::Approx(2));
  CHECK(es.energies(2) == doctest::Approx(3));
  CHECK(std::abs(es.states(0, 0)) == doctest::Approx(1));
  CHECK(std::abs(es.states(2, 1)) == doctest::Approx(1));
  CHECK(std::abs(es.states(1, 2)) == doctest::Approx(1));
}

TEST_CASE("random 16x16: residual contract and reconstruction") {
  Matrix h = random_hermitian(16, 12345);
  HermitianOperator op(h);
  EigenSolution es = eigendecompose(op, 16);
  CHECK(es.residual < 1e-10 * std::max(1.0, es.spectral_range));
  // reconstruction oracle: H = sum lambda_i v_i v_i^dag
  Matrix rec = Matrix::Zero(16, 16);
  for (int i = 0; i < 16; ++i)
    rec += es.energies(i) * (es.states.col(i) * es.states.col(i).adjoint());
  CHECK((rec - h).cwiseAbs().maxCoeff() < 1e-12 * h.cwiseAbs().maxCoeff() * 16);
  // orthonormality
  Matrix overlap = es.states.adjoint() * es.states;
  CHECK((overlap - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("non-Hermitian input rejected") {
  Matrix h(2, 2);
  h << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(HermitianOperator{h}, ValidationError);
}

TEST_CASE("k out of range rejected") {
  Matrix h = random_hermitian(4, 7);
  CHECK_THROWS_AS(eigendecompose(HermitianOperator(h), 0), ValidationError);
  CHECK_THROWS_AS(eigendecompose(HermitianOperator(h), 5), ValidationError);
}

TEST_CASE("harmonic mode operators: zero-point flux and commutator") {
  ModeBasis basis{10, BasisKind::harmonic, 0.137};
  ModeOperators ops = mode_operators(basis);
  // <0| x^2 |0> = x_zpf^2
  const Complex x2 = (ops.flux * ops.flux)(0, 0);
  CHECK(x2.real() == doctest::Approx(0.137 * 0.137).epsilon(1e-12));
  // [x, q] = i/(2 pi) on the interior of the truncated space
  Matrix comm = ops.flux * ops.charge - ops.charge * ops.flux;
  const Complex expected(0, units::hbar_reduced);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(comm(i, i) - expected) < 1e-12);
  // equivalently [Phi, Q] = i hbar in SI units
  const double si = units::hbar_reduced * units::flux_quantum_Wb * 2.0 *
                    units::electron_charge_C;
  CHECK(si == doctest::Approx(units::hbar_J_s).epsilon(1e-12));
}

TEST_CASE("charge basis: e^{i phi} raises the charge index") {
  ModeBasis basis{21, BasisKind::charge, 0.0};
  ModeOperators ops = mode_operators(basis);
  CHECK(ops.charge(0, 0).real() == doctest::Approx(-10));
  CHECK(ops.charge(20, 20).real() == doctest::Approx(10));
  for (int n = 0; n + 1 < 21; ++n) {
    CHECK(ops.phase_shift(n + 1, n) == Complex(1, 0));
    // raises n by one: q (e^{i phi} |n>) = (n+1) (e^{i phi} |n>)
    Matrix lifted = ops.charge * ops.phase_shift - ops.phase_shift * ops.charge;
    CHECK(std::abs(lifted(n + 1, n) - Complex(1, 0)) < 1e-14);
  }
}

TEST_CASE("levels below 4 rejected") {
  CHECK_THROWS_AS(mode_operators(ModeBasis{3, BasisKind::harmonic, 1.0}),
                  ValidationError);
}

TEST_CASE("tensor embed block structure") {
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  std::vector<int> dims{2, 2};
  Matrix a = tensor_embed(sx, 0, dims);
  Matrix b = tensor_embed(sx, 1, dims);
  // sx (x) I
  CHECK(a(0, 2).real() == doctest::Approx(1));
  CHECK(a(1, 3).real() == doctest::Approx(1));
  CHECK(a(0, 1).real() == doctest::Approx(0));
  // I (x) sx
  CHECK(b(0, 1).real() == doctest::Approx(1));
  CHECK(b(2, 3).real() == doctest::Approx(1));
  CHECK(b(0, 2).real() == doctest::Approx(0));
  CHECK_THROWS_AS(tensor_embed(sx, 2, dims), ValidationError);
}

TEST_CASE("(A x I)(I x B) = A x B") {
  Matrix a = random_complex(3, 1);
  Matrix b = random_complex(3, 2);
  std::vector<int> dims{3, 3};
  Matrix lhs = tensor_embed(a, 0, dims) * tensor_embed(b, 1, dims);
  Matrix rhs = tensor_embed_product({{0, a}, {1, b}}, dims);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spectrum of A x I + I x B is all pairwise sums") {
  Matrix a = random_hermitian(3, 11);
  Matrix b = random_hermitian(4, 22);
  std::vector<int> dims{3, 4};
  Matrix sum = tensor_embed(a, 0, dims) + tensor_embed(b, 1, dims);
  EigenSolution es = eigendecompose(HermitianOperator(sum), 12);
  EigenSolution ea = eigendecompose(HermitianOperator(a), 3);
  EigenSolution eb = eigendecompose(HermitianOperator(b), 4);
  std::vector<double> pairwise;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) pairwise.push_back(ea.energies(i) + eb.energies(j));
  std::sort(pairwise.begin(), pairwise.end());
  for (int i = 0; i < 12; ++i)
    CHECK(es.energies(i) == doctest::Approx(pairwise[i]).epsilon(1e-10));
}

TEST_CASE("energies invariant under per-vector phase change of basis") {
  Matrix h = random_hermitian(8, 33);
  std::mt19937 rng(44);
  std::uniform_real_distribution<double> u(0, 2 * units::pi);
  Matrix d = Matrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) d(i, i) = std::exp(Complex(0, u(rng)));
  Matrix h2 = d.adjoint() * h * d;
  EigenSolution e1 = eigendecompose(HermitianOperator(h), 8);
  EigenSolution e2 = eigendecompose(HermitianOperator(h2), 8);
  CHECK((e1.energies - e2.energies).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("displacement exponential: exact oscillator matrix elements") {
  // <0|e^{icx}|0> = exp(-c^2 x_zpf^2 / 2) for x = x_zpf(a+a^dag)
  const double xz = 0.31, c = 1.7;
  Matrix e = ho_displacement_exp(12, xz, c, 0.0);
  CHECK(std::abs(e(0, 0) - std::exp(-c * c * xz * xz / 2.0)) < 1e-13);
  // cosine/sine split is consistent
  RealMatrix co = ho_cosine(12, xz, c, 0.4);
  RealMatrix si = ho_sine(12, xz, c, 0.4);
  Matrix full = ho_displacement_exp(12, xz, c, 0.4);
  CHECK((co - full.real()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((si - full.imag()).cwiseAbs().maxCoeff() < 1e-14);
}

}  // TEST_SUITE
