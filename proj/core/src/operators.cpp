#include "fluxkit/operators.hpp"

#include <cmath>
#include <string>

#include "fluxkit/constants.hpp"

namespace fluxkit {

HermitianOperator::HermitianOperator(Matrix entries, double hermiticity_rtol) {
  if (entries.rows() != entries.cols())
    throw ValidationError("HermitianOperator: matrix not square");
  if (entries.rows() < 2)
    throw ValidationError("HermitianOperator: dim must be >= 2");
  double scale = entries.cwiseAbs().maxCoeff();
  if (scale == 0) scale = 1.0;
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (dev > hermiticity_rtol * scale)
    throw ValidationError("HermitianOperator: not Hermitian (max deviation " +
                          std::to_string(dev / scale) + " relative)");
  const double imax = entries.imag().cwiseAbs().maxCoeff();
  if (imax <= hermiticity_rtol * scale) {
    is_real_ = true;
    real_ = entries.real();
    real_ = 0.5 * (real_ + real_.transpose()).eval();
  } else {
    cplx_ = 0.5 * (entries + entries.adjoint());
  }
}

HermitianOperator::HermitianOperator(RealMatrix entries, double hermiticity_rtol) {
  if (entries.rows() != entries.cols())
    throw ValidationError("HermitianOperator: matrix not square");
  if (entries.rows() < 2)
    throw ValidationError("HermitianOperator: dim must be >= 2");
  double scale = entries.cwiseAbs().maxCoeff();
  if (scale == 0) scale = 1.0;
  const double dev = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (dev > hermiticity_rtol * scale)
    throw ValidationError("HermitianOperator: not symmetric (max deviation " +
                          std::to_string(dev / scale) + " relative)");
  is_real_ = true;
  real_ = 0.5 * (entries + entries.transpose());
}

const RealMatrix& HermitianOperator::real_entries() const {
  if (!is_real_)
    throw ValidationError("HermitianOperator: complex operator has no real view");
  return real_;
}

Matrix HermitianOperator::dense_complex() const {
  return is_real_ ? real_.cast<Complex>() : cplx_;
}

EigenSolution eigendecompose(const HermitianOperator& h, int k) {
  const Eigen::Index n = h.dim();
  if (k < 1 || k > n)
    throw ValidationError("eigendecompose: k out of range [1, dim]");

  EigenSolution sol;
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.real_entries());
    if (es.info() != Eigen::Success)
      throw SolverError(
          "eigendecompose: real symmetric solver did not converge (dim " +
          std::to_string(n) + ", QL iteration limit)");
    sol.energies = es.eigenvalues().head(k);
    sol.states = es.eigenvectors().leftCols(k).cast<Complex>();
    sol.spectral_range = es.eigenvalues()(n - 1) - es.eigenvalues()(0);
    RealMatrix r =
        h.real_entries() * es.eigenvectors().leftCols(k) -
        es.eigenvectors().leftCols(k) * es.eigenvalues().head(k).asDiagonal();
    sol.residual = r.colwise().norm().maxCoeff();
  } else {
    Matrix hm = h.dense_complex();
    Eigen::SelfAdjointEigenSolver<Matrix> es(hm);
    if (es.info() != Eigen::Success)
      throw SolverError(
          "eigendecompose: Hermitian solver did not converge (dim " +
          std::to_string(n) + ", QL iteration limit)");
    sol.energies = es.eigenvalues().head(k);
    sol.states = es.eigenvectors().leftCols(k);
    sol.spectral_range = es.eigenvalues()(n - 1) - es.eigenvalues()(0);
    Matrix r = hm * sol.states - sol.states * sol.energies.asDiagonal();
    sol.residual = r.colwise().norm().maxCoeff();
  }
  const double bound = 1e-9 * std::max(sol.spectral_range, 1e-300);
  if (sol.residual >= bound)
    throw SolverError("eigendecompose: residual " + std::to_string(sol.residual) +
                      " exceeds contract " + std::to_string(bound));
  return sol;
}

ModeOperators mode_operators(const ModeBasis& basis) {
  if (basis.levels < 4)
    throw ValidationError("mode_operators: levels must be >= 4");
  ModeOperators out;
  const int n = basis.levels;
  if (basis.kind == BasisKind::harmonic) {
    if (!(basis.flux_zpf > 0))
      throw ValidationError("mode_operators: flux_zpf must be positive");
    const double qz = units::hbar_reduced / (2.0 * basis.flux_zpf);
    out.flux = ho_position(n, basis.flux_zpf).cast<Complex>();
    Matrix a = Matrix::Zero(n, n);
    for (int m = 1; m < n; ++m) a(m - 1, m) = std::sqrt(double(m));
    out.charge = Complex(0, 1) * qz * (a.adjoint() - a);
  } else {
    const int half = (n - 1) / 2;
    Matrix q = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) q(m, m) = m - half;
    out.charge = q;
    Matrix shift = Matrix::Zero(n, n);
    for (int m = 0; m + 1 < n; ++m) shift(m + 1, m) = 1.0;  // e^{i phi}|n> = |n+1>
    out.phase_shift = shift;
    out.flux = Matrix();  // no flux matrix in the compact charge basis
  }
  return out;
}

Matrix tensor_embed(const Matrix& op, int slot, const std::vector<int>& dims) {
  return tensor_embed_product({{slot, op}}, dims);
}

Matrix tensor_embed_product(const std::vector<std::pair<int, Matrix>>& ops,
                            const std::vector<int>& dims) {
  const int modes = static_cast<int>(dims.size());
  for (const auto& [slot, op] : ops) {
    if (slot < 0 || slot >= modes)
      throw ValidationError("tensor_embed: slot out of range");
    if (op.rows() != dims[slot] || op.cols() != dims[slot])
      throw ValidationError("tensor_embed: operator dim mismatch at slot " +
                            std::to_string(slot));
  }
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < modes; ++i) {
    const Matrix* m = nullptr;
    for (const auto& [slot, op] : ops)
      if (slot == i) m = &op;
    Matrix factor = m ? *m : Matrix::Identity(dims[i], dims[i]);
    Matrix next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(),
                   factor.cols()) = out(r, c) * factor;
    out = std::move(next);
  }
  return out;
}

RealMatrix ho_position(int levels, double x_zpf) {
  RealMatrix m = RealMatrix::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) {
    m(k - 1, k) = x_zpf * std::sqrt(double(k));
    m(k, k - 1) = m(k - 1, k);
  }
  return m;
}

RealMatrix ho_position_sq(int levels, double x_zpf) {
  RealMatrix m = RealMatrix::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) {
    m(k, k) = x_zpf * x_zpf * (2.0 * k + 1.0);
    if (k + 2 < levels) {
      m(k, k + 2) = x_zpf * x_zpf * std::sqrt(double(k + 1) * double(k + 2));
      m(k + 2, k) = m(k, k + 2);
    }
  }
  return m;
}

RealMatrix ho_momentum_sq(int levels, double p_zpf) {
  RealMatrix m = RealMatrix::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) {
    m(k, k) = p_zpf * p_zpf * (2.0 * k + 1.0);
    if (k + 2 < levels) {
      m(k, k + 2) = -p_zpf * p_zpf * std::sqrt(double(k + 1) * double(k + 2));
      m(k + 2, k) = m(k, k + 2);
    }
  }
  return m;
}

Matrix ho_displacement_exp(int levels, double x_zpf, double c, double theta0) {
  // pad so truncation error at the top of the basis cannot reach the retained
  // block
  const int pad = 24 + static_cast<int>(4.0 * std::abs(c) * x_zpf);
  const int n = levels + pad;
  RealMatrix x = ho_position(n, x_zpf);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(x);
  if (es.info() != Eigen::Success)
    throw SolverError("ho_displacement_exp: position eigensolver failed");
  Eigen::VectorXcd phase(n);
  for (int k = 0; k < n; ++k)
    phase(k) = std::exp(Complex(0, theta0 + c * es.eigenvalues()(k)));
  Matrix full = es.eigenvectors().cast<Complex>() * phase.asDiagonal() *
                es.eigenvectors().transpose().cast<Complex>();
  return full.topLeftCorner(levels, levels);
}

RealMatrix ho_cosine(int levels, double x_zpf, double c, double theta0) {
  return ho_displacement_exp(levels, x_zpf, c, theta0).real();
}

RealMatrix ho_sine(int levels, double x_zpf, double c, double theta0) {
  return ho_displacement_exp(levels, x_zpf, c, theta0).imag();
}

}  // namespace fluxkit
