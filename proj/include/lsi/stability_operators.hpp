#ifndef LSI_STABILITY_OPERATORS_HPP
#define LSI_STABILITY_OPERATORS_HPP

// Linearized operators around the ground state (R1, R2):
//
//   L0 = -d^2/dx^2 + Omega - gamma (R1^2 + R2^2)
//   L1 = -d^2/dx^2 + Omega - gamma (3 R1^2 + R2^2)
//   L2 = -d^2/dx^2 + Omega - gamma (R1^2 + 3 R2^2)
//   L3 = -2 gamma R1 R2            (multiplication)
//
// their quadratic forms, and constrained minima of the Rayleigh quotient by
// projected block inverse iteration.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsi/errors.hpp"
#include "lsi/model.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

enum class OperatorKind { L0, L1, L2, L3 };

class LinearizedOperator {
 public:
  LinearizedOperator(OperatorKind kind, const SolitonProfile& prof)
      : kind_(kind), grid_(prof.grid()), potential_(prof.grid()) {
    const auto& p = prof.params;
    for (std::size_t j = 0; j < grid_.n(); ++j) {
      const double a = prof.r1[j] * prof.r1[j];
      const double b = prof.r2[j] * prof.r2[j];
      switch (kind) {
        case OperatorKind::L0: potential_[j] = p.Omega - p.gamma * (a + b); break;
        case OperatorKind::L1: potential_[j] = p.Omega - p.gamma * (3.0 * a + b); break;
        case OperatorKind::L2: potential_[j] = p.Omega - p.gamma * (a + 3.0 * b); break;
        case OperatorKind::L3: potential_[j] = -2.0 * p.gamma * prof.r1[j] * prof.r2[j]; break;
      }
    }
  }

  OperatorKind kind() const noexcept { return kind_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  const RealField& potential() const noexcept { return potential_; }
  bool has_laplacian() const noexcept { return kind_ != OperatorKind::L3; }

 private:
  OperatorKind kind_;
  PeriodicGrid grid_;
  RealField potential_;
};

inline RealField apply(const LinearizedOperator& op, const RealField& f) {
  require_same_grid(f.grid(), op.grid(), "apply");
  auto out = multiply(op.potential(), f);
  if (op.has_laplacian()) out -= deriv(f, 2);
  return out;
}

inline RealField apply(OperatorKind kind, const SolitonProfile& prof, const RealField& f) {
  return apply(LinearizedOperator(kind, prof), f);
}

/// <L0 q1, q1> + <L0 q2, q2>.
inline double quad_form_q(const SolitonProfile& prof, const RealField& q1, const RealField& q2) {
  const LinearizedOperator l0(OperatorKind::L0, prof);
  return dot(apply(l0, q1), q1) + dot(apply(l0, q2), q2);
}

/// <L1 p1, p1> + <L2 p2, p2> + 2 <L3 p1, p2>.
inline double quad_form_p(const SolitonProfile& prof, const RealField& p1, const RealField& p2) {
  const LinearizedOperator l1(OperatorKind::L1, prof);
  const LinearizedOperator l2(OperatorKind::L2, prof);
  const LinearizedOperator l3(OperatorKind::L3, prof);
  return dot(apply(l1, p1), p1) + dot(apply(l2, p2), p2) + 2.0 * dot(apply(l3, p1), p2);
}

/// Sup norms of L0 R1, L0 R2 and max(|L1 R1x + L3 R2x|, |L2 R2x + L3 R1x|).
inline std::array<double, 3> kernel_identities(const SolitonProfile& prof) {
  const LinearizedOperator l0(OperatorKind::L0, prof);
  const LinearizedOperator l1(OperatorKind::L1, prof);
  const LinearizedOperator l2(OperatorKind::L2, prof);
  const LinearizedOperator l3(OperatorKind::L3, prof);
  const auto r1x = deriv(prof.r1, 1);
  const auto r2x = deriv(prof.r2, 1);
  const double k3 = std::max(sup_norm(apply(l1, r1x) + apply(l3, r2x)),
                             sup_norm(apply(l2, r2x) + apply(l3, r1x)));
  return {sup_norm(apply(l0, prof.r1)), sup_norm(apply(l0, prof.r2)), k3};
}

// ---------------------------------------------------------------------------
// Constrained Rayleigh quotients

/// Tuple of real fields on one grid; the L0 form acts on one component, the
/// p-form on two.
using BlockField = std::vector<RealField>;

enum class QuadraticForm { l0, p_block };

struct RayleighOptions {
  std::size_t block = 12;
  double tol = 1e-9;  // residual |P A x - mu x| for a Euclidean unit vector x
  std::size_t max_iter = 3000;
  double inner_tol = 1e-12;
  std::size_t inner_max_iter = 400;
  std::uint64_t seed = 1;
};

struct RayleighResult {
  double mu = 0.0;
  BlockField minimizer;       // L2-normalized, sign fixed by its largest entry
  std::vector<double> ritz;   // Ritz values of the final block, ascending
  std::size_t iterations = 0;
  double residual = 0.0;
  double shift = 0.0;
};

namespace detail {

struct NegativeCurvature {};

class FlatForm {
 public:
  FlatForm(const SolitonProfile& prof, QuadraticForm form)
      : grid_(prof.grid()), form_(form), omega_(prof.params.Omega) {
    if (form == QuadraticForm::l0) {
      ops_.emplace_back(OperatorKind::L0, prof);
    } else {
      ops_.emplace_back(OperatorKind::L1, prof);
      ops_.emplace_back(OperatorKind::L2, prof);
      ops_.emplace_back(OperatorKind::L3, prof);
    }
    double peak = 0.0;
    for (std::size_t j = 0; j < grid_.n(); ++j) {
      peak = std::max(peak, prof.r1[j] * prof.r1[j] + prof.r2[j] * prof.r2[j]);
    }
    // Pointwise lower bound of the potential: the 2x2 block has eigenvalues
    // Omega - gamma rho and Omega - 3 gamma rho.
    const double factor = form == QuadraticForm::l0 ? 1.0 : 3.0;
    lower_bound_ = prof.params.Omega - factor * prof.params.gamma * peak;
  }

  std::size_t components() const noexcept { return form_ == QuadraticForm::l0 ? 1 : 2; }
  std::size_t dof() const noexcept { return components() * grid_.n(); }
  double lower_bound() const noexcept { return lower_bound_; }
  double omega() const noexcept { return omega_; }

  RealField component(const Eigen::VectorXd& x, std::size_t c) const {
    const std::size_t n = grid_.n();
    std::vector<double> v(x.data() + c * n, x.data() + (c + 1) * n);
    return RealField(grid_, std::move(v));
  }

  void store(const RealField& f, std::size_t c, Eigen::VectorXd& out) const {
    const std::size_t n = grid_.n();
    for (std::size_t j = 0; j < n; ++j) out[static_cast<Eigen::Index>(c * n + j)] = f[j];
  }

  Eigen::VectorXd apply_flat(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(x.size());
    if (form_ == QuadraticForm::l0) {
      store(apply(ops_[0], component(x, 0)), 0, out);
    } else {
      const auto p1 = component(x, 0);
      const auto p2 = component(x, 1);
      store(apply(ops_[0], p1) + apply(ops_[2], p2), 0, out);
      store(apply(ops_[1], p2) + apply(ops_[2], p1), 1, out);
    }
    return out;
  }

  /// Fourier preconditioner 1 / (k^2 + Omega - shift) on each component.
  Eigen::VectorXd precondition(const Eigen::VectorXd& r, double shift) const {
    Eigen::VectorXd out(r.size());
    const double floor = std::max(omega_ - shift, 1e-3 * omega_);
    for (std::size_t c = 0; c < components(); ++c) {
      const auto f = apply_multiplier(component(r, c), [&](std::size_t j) {
        const double k = grid_.wavenumber(j);
        return cplx(1.0 / (k * k + floor), 0.0);
      });
      store(f, c, out);
    }
    return out;
  }

  BlockField unflatten(const Eigen::VectorXd& x) const {
    BlockField out;
    for (std::size_t c = 0; c < components(); ++c) out.push_back(component(x, c));
    return out;
  }

 private:
  PeriodicGrid grid_;
  QuadraticForm form_;
  double omega_;
  double lower_bound_ = 0.0;
  std::vector<LinearizedOperator> ops_;
};

class Projector {
 public:
  Projector(const Eigen::MatrixXd& constraints) {
    if (constraints.cols() == 0) return;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(constraints);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(constraints.cols()).triangularView<Eigen::Upper>();
    const double scale = r.diagonal().cwiseAbs().maxCoeff();
    if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-10 * scale)) {
      throw std::invalid_argument("constrained_rayleigh: constraint fields are linearly dependent");
    }
    q_ = qr.householderQ() * Eigen::MatrixXd::Identity(constraints.rows(), constraints.cols());
  }

  void apply(Eigen::VectorXd& x) const {
    if (q_.cols() == 0) return;
    x -= q_ * (q_.transpose() * x);
  }

  void apply(Eigen::MatrixXd& x) const {
    if (q_.cols() == 0) return;
    x -= q_ * (q_.transpose() * x);
  }

 private:
  Eigen::MatrixXd q_;
};

/// Projected preconditioned CG for P (A - shift) P y = b, b in range(P).
inline Eigen::VectorXd projected_pcg(const FlatForm& form, const Projector& proj, const Eigen::VectorXd& b,
                                     double shift, double tol, std::size_t max_iter) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return y;
  Eigen::VectorXd z = form.precondition(r, shift);
  proj.apply(z);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  for (std::size_t it = 0; it < max_iter; ++it) {
    Eigen::VectorXd ad = form.apply_flat(d) - shift * d;
    proj.apply(ad);
    const double curv = d.dot(ad);
    if (!(curv > 0.0)) throw NegativeCurvature{};
    const double alpha = rz / curv;
    y += alpha * d;
    r -= alpha * ad;
    if (r.norm() <= tol * bnorm) break;
    z = form.precondition(r, shift);
    proj.apply(z);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  return y;
}

inline void orthonormalize(Eigen::MatrixXd& x, const Projector& proj) {
  for (int pass = 0; pass < 2; ++pass) {
    proj.apply(x);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    x = qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
  }
}

inline RayleighResult block_inverse_iteration(const FlatForm& form, const Projector& proj, std::size_t nconstraints,
                                              double shift, const RayleighOptions& opt) {
  const auto dof = static_cast<Eigen::Index>(form.dof());
  const auto avail = dof - static_cast<Eigen::Index>(nconstraints);
  const auto b = std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.block), avail);
  if (b < 1) throw std::invalid_argument("constrained_rayleigh: constraints leave no free directions");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd x(dof, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < dof; ++i) x(i, j) = nd(rng);
  }
  orthonormalize(x, proj);

  RayleighResult res;
  res.shift = shift;
  double last_residual = 0.0;
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    Eigen::MatrixXd y(dof, b);
    for (Eigen::Index j = 0; j < b; ++j) {
      y.col(j) = projected_pcg(form, proj, x.col(j), shift, opt.inner_tol, opt.inner_max_iter);
    }
    orthonormalize(y, proj);

    Eigen::MatrixXd ay(dof, b);
    for (Eigen::Index j = 0; j < b; ++j) ay.col(j) = form.apply_flat(y.col(j));
    proj.apply(ay);
    Eigen::MatrixXd h = y.transpose() * ay;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    x = y * eig.eigenvectors();
    const Eigen::MatrixXd ax = ay * eig.eigenvectors();
    const double mu = eig.eigenvalues()[0];
    last_residual = (ax.col(0) - mu * x.col(0)).norm();

    if (last_residual <= opt.tol) {
      res.mu = mu;
      res.iterations = it;
      res.residual = last_residual;
      res.ritz.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + b);
      Eigen::VectorXd v = x.col(0);
      Eigen::Index imax = 0;
      v.cwiseAbs().maxCoeff(&imax);
      if (v[imax] < 0.0) v = -v;
      auto fields = form.unflatten(v);
      double nrm = 0.0;
      for (const auto& f : fields) nrm += norm2_sq(f);
      for (auto& f : fields) f *= 1.0 / std::sqrt(nrm);
      res.minimizer = std::move(fields);
      return res;
    }
  }
  throw ConvergenceError("constrained_rayleigh: block inverse iteration did not converge", opt.max_iter,
                         last_residual);
}

}  // namespace detail

/// Minimum of <A f, f> / <f, f> over f L2-orthogonal to every constraint, A the
/// L0 operator (one component) or the p-form block [[L1, L3], [L3, L2]].
inline RayleighResult constrained_rayleigh(const SolitonProfile& prof, QuadraticForm form,
                                           const std::vector<BlockField>& constraints,
                                           const RayleighOptions& opt = {}) {
  const detail::FlatForm flat(prof, form);
  const auto dof = static_cast<Eigen::Index>(flat.dof());
  Eigen::MatrixXd cmat(dof, static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& bf = constraints[k];
    if (bf.size() != flat.components()) {
      std::ostringstream os;
      os << "constrained_rayleigh: constraint " << k << " has " << bf.size() << " components, expected "
         << flat.components();
      throw std::invalid_argument(os.str());
    }
    Eigen::VectorXd col(dof);
    for (std::size_t c = 0; c < bf.size(); ++c) {
      require_same_grid(bf[c].grid(), prof.grid(), "constrained_rayleigh");
      flat.store(bf[c], c, col);
    }
    cmat.col(static_cast<Eigen::Index>(k)) = col;
  }
  const detail::Projector proj(cmat);

  // Slightly below zero so that a kernel does not make the shifted system singular.
  const double shift = -0.05 * flat.omega();
  try {
    auto res = detail::block_inverse_iteration(flat, proj, constraints.size(), shift, opt);
    if (res.mu > shift) return res;
  } catch (const detail::NegativeCurvature&) {
  }
  // Something sits below the default shift: restart below the spectrum.
  const double safe = flat.lower_bound() - flat.omega();
  return detail::block_inverse_iteration(flat, proj, constraints.size(), safe, opt);
}

/// Cosine similarity of two block fields in L2.
inline double block_cosine(const BlockField& a, const BlockField& b) {
  if (a.size() != b.size()) throw std::invalid_argument("block_cosine: component counts differ");
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    ab += dot(a[c], b[c]);
    aa += norm2_sq(a[c]);
    bb += norm2_sq(b[c]);
  }
  return std::abs(ab) / std::sqrt(aa * bb);
}

/// Constraint set for q_k: orthogonal to (R1^2 + R2^2) R_k.
inline std::vector<BlockField> l0_constraints(const SolitonProfile& prof, int k) {
  const auto rho = zip(prof.r1, prof.r2, [](double a, double b) { return a * a + b * b; });
  return {BlockField{multiply(rho, k == 1 ? prof.r1 : prof.r2)}};
}

/// Constraint set for the p-form: <p1, R1> = <p2, R2> = 0.
inline std::vector<BlockField> p_constraints(const SolitonProfile& prof) {
  const RealField zero(prof.grid());
  return {BlockField{prof.r1, zero}, BlockField{zero, prof.r2}};
}

}  // namespace lsi

#endif  // LSI_STABILITY_OPERATORS_HPP
