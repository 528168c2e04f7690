#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "fluxkit/error.hpp"

namespace fluxkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense Hermitian operator. Entries are frequencies (E/h, GHz) unless a
// caller documents otherwise (current operators store nA). Numerically real
// matrices are stored as real symmetric; the eigensolver exploits that.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Matrix entries, double hermiticity_rtol = 1e-12);
  explicit HermitianOperator(RealMatrix entries, double hermiticity_rtol = 1e-12);

  Eigen::Index dim() const { return is_real_ ? real_.cols() : cplx_.cols(); }
  bool is_real() const { return is_real_; }
  const RealMatrix& real_entries() const;
  Matrix dense_complex() const;
  // element access that works for either storage
  Complex at(Eigen::Index r, Eigen::Index c) const {
    return is_real_ ? Complex(real_(r, c), 0.0) : cplx_(r, c);
  }

 private:
  bool is_real_ = false;
  RealMatrix real_;
  Matrix cplx_;
};

struct EigenSolution {
  Vector energies;      // ascending, GHz
  Matrix states;        // orthonormal columns
  double residual = 0;  // max ||Hv - lambda v|| over retained pairs
  double spectral_range = 0;
};

enum class BasisKind { harmonic, charge };

// Truncated single-mode basis. For the harmonic kind, flux_zpf is the
// zero-point flux amplitude in Phi0 units; the conjugate charge scale follows
// from [phi, q] = i/(2 pi). For the charge kind, levels counts charge states
// n = -(levels-1)/2 ... +(levels-1)/2 and flux_zpf is unused.
struct ModeBasis {
  int levels = 0;
  BasisKind kind = BasisKind::harmonic;
  double flux_zpf = 0.0;
};

struct ModeOperators {
  Matrix flux;         // Phi0 units (harmonic kind)
  Matrix charge;       // 2e units
  Matrix phase_shift;  // e^{i phi}: raises the charge index (charge kind only)
};

// k lowest eigenpairs of a Hermitian operator.
// Residual contract: residual < 1e-9 * spectral range.
EigenSolution eigendecompose(const HermitianOperator& h, int k);

ModeOperators mode_operators(const ModeBasis& basis);

// Operator acting on mode `slot` of a product space, identity elsewhere.
Matrix tensor_embed(const Matrix& op, int slot, const std::vector<int>& dims);

// Product of one operator per listed slot (each slot at most once),
// identity on the others.
Matrix tensor_embed_product(const std::vector<std::pair<int, Matrix>>& ops,
                            const std::vector<int>& dims);

// ---- harmonic-oscillator band matrices (exact truncated matrix elements) ----

// x = x_zpf (a + a^dag)
RealMatrix ho_position(int levels, double x_zpf);
// x^2 with exact <m|x^2|n> elements
RealMatrix ho_position_sq(int levels, double x_zpf);
// p^2 with exact elements; p = i p_zpf (a^dag - a)
RealMatrix ho_momentum_sq(int levels, double p_zpf);

// exp(i (theta0 + c x)) for x = x_zpf(a+a^dag), evaluated in a padded basis
// and truncated back, so retained elements are exact to machine precision.
Matrix ho_displacement_exp(int levels, double x_zpf, double c, double theta0);

// cos(theta0 + c x) and sin(theta0 + c x), real symmetric
RealMatrix ho_cosine(int levels, double x_zpf, double c, double theta0);
RealMatrix ho_sine(int levels, double x_zpf, double c, double theta0);

}  // namespace fluxkit
