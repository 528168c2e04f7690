#include "fluxkit/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fluxkit/constants.hpp"
#include "fluxkit/parallel.hpp"
#include "fluxkit/semiclassical.hpp"

namespace fluxkit {

namespace {

Matrix kron3(const Matrix& a, const Matrix& b, const Matrix& c) {
  auto kron = [](const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index cc = 0; cc < x.cols(); ++cc)
        out.block(r * y.rows(), cc * y.cols(), y.rows(), y.cols()) = x(r, cc) * y;
    return out;
  };
  return kron(kron(a, b), c);
}

struct InteractionCoefficients {
  double m_tilde_a, m_tilde_b, m_direct;
};

InteractionCoefficients interaction_coefficients(const DeviceParams& p) {
  const RenormalizedInductances ra =
      galvanic_to_mutual(p.qubit_a.l_q_pH, p.l_coupler_pH, p.m_pH);
  const RenormalizedInductances rb =
      galvanic_to_mutual(p.qubit_b.l_q_pH, p.l_coupler_pH, p.m_pH);
  InteractionCoefficients c;
  c.m_tilde_a = ra.m_tilde_pH;
  c.m_tilde_b = rb.m_tilde_pH;
  // geometric qubit-qubit term of the eliminated shared-inductor network;
  // cancels the -M~^2/L_C artifact so the second-order coupling follows
  // 1/L_eff exactly
  c.m_direct = ra.m_tilde_pH * rb.m_tilde_pH / p.l_coupler_pH;
  return c;
}

CompositeSystem assemble_composite(const Vector& ea, const Matrix& ia,
                                   const Vector& eb, const Matrix& ib,
                                   const Vector& ec, const Matrix& ic,
                                   const InteractionCoefficients& coeff,
                                   const std::array<int, 3>& retained,
                                   const FluxPoint& flux) {
  CompositeSystem sys;
  sys.retained = retained;
  sys.flux = flux;
  sys.m_tilde_a_pH = coeff.m_tilde_a;
  sys.m_tilde_b_pH = coeff.m_tilde_b;
  sys.m_direct_pH = coeff.m_direct;
  const int na = retained[0], nb = retained[1], nc = retained[2];
  sys.bare_a = ea.head(na);
  sys.bare_b = eb.head(nb);
  sys.bare_c = ec.head(nc);
  sys.i_a = ia.topLeftCorner(na, na);
  sys.i_b = ib.topLeftCorner(nb, nb);
  sys.i_c = ic.topLeftCorner(nc, nc);

  const Matrix ea_d = sys.bare_a.cast<Complex>().asDiagonal();
  const Matrix eb_d = sys.bare_b.cast<Complex>().asDiagonal();
  const Matrix ec_d = sys.bare_c.cast<Complex>().asDiagonal();
  const Matrix ident_a = Matrix::Identity(na, na);
  const Matrix ident_b = Matrix::Identity(nb, nb);
  const Matrix ident_c = Matrix::Identity(nc, nc);

  Matrix h = kron3(ea_d, ident_b, ident_c) + kron3(ident_a, eb_d, ident_c) +
             kron3(ident_a, ident_b, ec_d);
  h += (units::mutual_GHz * coeff.m_tilde_a) * kron3(sys.i_a, ident_b, sys.i_c);
  h += (units::mutual_GHz * coeff.m_tilde_b) * kron3(ident_a, sys.i_b, sys.i_c);
  h += (units::mutual_GHz * coeff.m_direct) * kron3(sys.i_a, sys.i_b, ident_c);
  sys.hamiltonian = HermitianOperator(std::move(h));
  return sys;
}

std::string classify(int na, int nb, int nc) {
  if (na > 0 && nb == 0 && nc == 0) return "qubit-A-like";
  if (na == 0 && nb > 0 && nc == 0) return "qubit-B-like";
  if (na == 0 && nb == 0 && nc > 0) return "coupler-like";
  return "multi";
}

}  // namespace

CompositeBuilder::CompositeBuilder(DeviceParams p, CompositeOptions opts)
    : params_(std::move(p)), opts_(std::move(opts)) {
  params_.validate();
  const InteractionCoefficients c = interaction_coefficients(params_);
  m_tilde_a_ = c.m_tilde_a;
  m_tilde_b_ = c.m_tilde_b;
  m_direct_ = c.m_direct;
}

const CompositeBuilder::Bare& CompositeBuilder::bare(int subsystem,
                                                     double f) const {
  bool check = false;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_[subsystem].find(f);
    if (it != cache_[subsystem].end()) return it->second;
    // the bare truncation contract is flux-insensitive here; certify it on
    // the first build of each subsystem and reuse the levels afterwards
    if (!bare_checked_[subsystem]) {
      check = true;
      bare_checked_[subsystem] = true;
    }
  }
  const int kmax = *std::max_element(opts_.retained.begin(), opts_.retained.end()) + 2;
  CircuitHamiltonian ch;
  if (subsystem == 2) {
    BuildOptions o = opts_.coupler_opts;
    o.check_convergence = o.check_convergence && check;
    ch = build_coupler(params_, f, o);
  } else {
    BuildOptions o = opts_.qubit_opts;
    o.check_convergence = o.check_convergence && check;
    ch = build_flux_qubit(params_, subsystem == 0 ? QubitId::A : QubitId::B, f,
                          {}, o);
  }
  EigenSolution es = eigendecompose(ch.hamiltonian, kmax);
  Bare b;
  b.energies = es.energies.array() - es.energies(0);
  b.current = es.states.adjoint() * ch.current_op.dense_complex() * es.states;
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_[subsystem].emplace(f, std::move(b)).first->second;
}

CompositeSystem CompositeBuilder::at(const FluxPoint& flux) const {
  const Bare& a = bare(0, flux.f_a);
  const Bare& b = bare(1, flux.f_b);
  const Bare& c = bare(2, flux.f_c);
  InteractionCoefficients coeff{m_tilde_a_, m_tilde_b_, m_direct_};
  CompositeSystem sys = assemble_composite(a.energies, a.current, b.energies,
                                           b.current, c.energies, c.current,
                                           coeff, opts_.retained, flux);
  if (opts_.check_convergence) {
    std::array<int, 3> bumped{};
    for (int i = 0; i < 3; ++i) bumped[i] = opts_.retained[i] + 2;
    CompositeSystem big = assemble_composite(a.energies, a.current, b.energies,
                                             b.current, c.energies, c.current,
                                             coeff, bumped, flux);
    EigenSolution es0 = eigendecompose(sys.hamiltonian, 4);
    EigenSolution es1 = eigendecompose(big.hamiltonian, 4);
    double shift = 0;
    for (int i = 1; i < 4; ++i)
      shift = std::max(shift, std::abs((es0.energies(i) - es0.energies(0)) -
                                       (es1.energies(i) - es1.energies(0))));
    if (shift >= opts_.tolerance_GHz) {
      // name the subsystem whose retained count matters most
      int worst = 0;
      double worst_shift = -1;
      for (int s = 0; s < 3; ++s) {
        std::array<int, 3> one = opts_.retained;
        one[s] += 2;
        CompositeSystem trial = assemble_composite(
            a.energies, a.current, b.energies, b.current, c.energies,
            c.current, coeff, one, flux);
        EigenSolution est = eigendecompose(trial.hamiltonian, 4);
        double sh = 0;
        for (int i = 1; i < 4; ++i)
          sh = std::max(sh, std::abs((es0.energies(i) - es0.energies(0)) -
                                     (est.energies(i) - est.energies(0))));
        if (sh > worst_shift) {
          worst_shift = sh;
          worst = s;
        }
      }
      static const char* names[] = {"qubit A", "qubit B", "coupler"};
      throw ConvergenceError(
          std::string("build_composite: retained levels not converged; ") +
          names[worst] + " at " + std::to_string(opts_.retained[worst]) +
          " levels moves transitions by " + std::to_string(shift * 1e6) +
          " kHz");
    }
    sys.convergence.checked = true;
    sys.convergence.max_shift_GHz = shift;
  }
  sys.convergence.levels.assign(sys.retained.begin(), sys.retained.end());
  return sys;
}

CompositeSystem build_composite(const DeviceParams& p, const FluxPoint& flux,
                                const CompositeOptions& opts) {
  CompositeBuilder builder(p, opts);
  return builder.at(flux);
}

TransitionSpectrum spectroscopy_sweep(const CompositeBuilder& builder, char axis,
                                      const std::vector<double>& grid,
                                      FluxPoint fixed, const SweepOptions& opts) {
  if (axis != 'a' && axis != 'b' && axis != 'c')
    throw ValidationError("spectroscopy_sweep: axis must be 'a', 'b' or 'c'");
  if (grid.empty()) throw ValidationError("spectroscopy_sweep: empty grid");

  TransitionSpectrum out;
  out.axis = axis;
  out.grid = grid;
  out.n_branches = opts.n_branches;
  out.points.resize(grid.size() * opts.n_branches);

  // warm the fixed-axis caches once before the parallel section
  {
    FluxPoint fp = fixed;
    if (axis == 'a') fp.f_a = grid.front();
    if (axis == 'b') fp.f_b = grid.front();
    if (axis == 'c') fp.f_c = grid.front();
    (void)builder.at(fp);
  }

  parallel_for(int(grid.size()), opts.threads, [&](int gi) {
    FluxPoint fp = fixed;
    if (axis == 'a') fp.f_a = grid[gi];
    if (axis == 'b') fp.f_b = grid[gi];
    if (axis == 'c') fp.f_c = grid[gi];
    CompositeSystem sys = builder.at(fp);
    EigenSolution es = eigendecompose(sys.hamiltonian, opts.n_branches + 1);
    for (int b = 0; b < opts.n_branches; ++b) {
      TransitionPoint tp;
      tp.flux = grid[gi];
      tp.branch_index = b;
      tp.freq_GHz = es.energies(b + 1) - es.energies(0);
      // tag by dominant bare product state
      int best = 0;
      double best_p = -1;
      for (int idx = 0; idx < sys.dim(); ++idx) {
        const double prob = std::norm(es.states(idx, b + 1));
        if (prob > best_p) {
          best_p = prob;
          best = idx;
        }
      }
      const int nc = sys.retained[2], nb = sys.retained[1];
      const int ia = best / (nb * nc), ib = (best / nc) % nb, ic = best % nc;
      tp.tag = best_p > 0.5 ? classify(ia, ib, ic) : "hybridized";
      out.points[gi * opts.n_branches + b] = std::move(tp);
    }
  });
  return out;
}

ExtractedSplitting extract_splitting(const TransitionSpectrum& spectrum) {
  const int n = int(spectrum.grid.size());
  if (n < 5 || spectrum.n_branches < 2)
    throw ValidationError("extract_splitting: need >= 5 points and 2 branches");

  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i)
    dist[i] = spectrum.freq(i, 1) - spectrum.freq(i, 0);
  int imin = 0;
  for (int i = 1; i < n; ++i)
    if (dist[i] < dist[imin]) imin = i;
  if (imin == 0 || imin == n - 1)
    throw RangeError(
        "extract_splitting: branch-distance minimum not interior to the sweep");

  // quadratic fit of the squared distance over the 5 nearest points;
  // dist^2 = a^2 (f-f0)^2 + (2J)^2 exactly for a two-level crossing
  const int lo = std::max(0, imin - 2), hi = std::min(n - 1, imin + 2);
  Eigen::MatrixXd vand(hi - lo + 1, 3);
  Eigen::VectorXd rhs(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) {
    const double f = spectrum.grid[i] - spectrum.grid[imin];
    vand(i - lo, 0) = f * f;
    vand(i - lo, 1) = f;
    vand(i - lo, 2) = 1.0;
    rhs(i - lo) = dist[i] * dist[i];
  }
  const Eigen::Vector3d c = vand.colPivHouseholderQr().solve(rhs);
  ExtractedSplitting out;
  double d2min = c(2) - c(1) * c(1) / (4.0 * c(0));
  double f0 = -c(1) / (2.0 * c(0));
  if (!(c(0) > 0)) {  // degenerate fit: fall back to the sampled minimum
    d2min = dist[imin] * dist[imin];
    f0 = 0;
  }
  out.resonance_flux = spectrum.grid[imin] + f0;
  const double step = std::abs(spectrum.grid[std::min(imin + 1, n - 1)] -
                               spectrum.grid[std::max(imin - 1, 0)]) / 2.0;
  out.floor_rad_s = std::sqrt(std::max(c(0), 0.0)) * step *
                    units::GHz_to_rad_s;  // slope * grid step
  const double two_j_GHz = std::sqrt(std::max(d2min, 0.0));
  out.two_j_rad_s = two_j_GHz * units::GHz_to_rad_s;
  out.resolved = out.two_j_rad_s >= out.floor_rad_s;
  return out;
}

ExtractedSplitting splitting_at(const CompositeBuilder& builder, char axis,
                                double center, double halfwidth,
                                FluxPoint fixed, double resolution,
                                const SweepOptions& opts) {
  // coarse scan, then shrink around the minimum until the step reaches the
  // requested resolution
  double c = center, h = halfwidth;
  ExtractedSplitting best;
  for (int round = 0;; ++round) {
    const int npts = 11;
    std::vector<double> grid(npts);
    for (int i = 0; i < npts; ++i)
      grid[i] = c - h + 2.0 * h * i / (npts - 1);
    TransitionSpectrum sp = spectroscopy_sweep(builder, axis, grid, fixed, opts);
    std::vector<double> dist(npts);
    for (int i = 0; i < npts; ++i) dist[i] = sp.freq(i, 1) - sp.freq(i, 0);
    int imin = 0;
    for (int i = 1; i < npts; ++i)
      if (dist[i] < dist[imin]) imin = i;
    if ((imin == 0 || imin == npts - 1) && round == 0)
      throw RangeError("splitting_at: resonance not bracketed by initial scan");
    const double step = 2.0 * h / (npts - 1);
    if (step <= resolution || round >= 12) {
      best = extract_splitting(sp);
      break;
    }
    c = grid[imin];
    h = std::max(2.0 * step, h / 4.0);
  }
  return best;
}

T1Element t1_matrix_element(const CompositeSystem& system) {
  const int dim = system.dim();
  EigenSolution es =
      eigendecompose(system.hamiltonian, std::min(dim, 8));
  const int target = system.product_index(0, 1, 0);
  int best_state = -1;
  double best_amp = 0;
  for (int j = 1; j < es.states.cols(); ++j) {
    const double amp = std::abs(es.states(target, j));
    if (amp > best_amp) {
      best_amp = amp;
      best_state = j;
    }
  }
  if (best_state < 0 || best_amp < 0.5)
    throw IdentificationError(
        "t1_matrix_element: no eigenstate overlaps the bare qubit-B excitation "
        "by >= 0.5 (max amplitude " +
        std::to_string(best_amp) + ")");
  const int na = system.retained[0], nb = system.retained[1],
            nc = system.retained[2];
  Matrix ic_full = kron3(Matrix::Identity(na, na), Matrix::Identity(nb, nb),
                         system.i_c);
  const Complex el =
      (es.states.col(0).adjoint() * ic_full * es.states.col(best_state))(0, 0);
  T1Element out;
  out.element_nA = std::abs(el);
  out.omega01_rad_s =
      (es.energies(best_state) - es.energies(0)) * units::GHz_to_rad_s;
  out.state_index = best_state;
  out.overlap = best_amp;
  return out;
}

}  // namespace fluxkit
