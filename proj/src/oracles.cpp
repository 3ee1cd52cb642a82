#include "cimeter/oracles.hpp"

#include "cimeter/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace cimeter {

namespace {

std::vector<double> log_nodes(const QuadratureGrid& grid) {
  grid.validate();
  const auto count = static_cast<std::size_t>(grid.points_per_axis);
  const double lo = std::log(grid.singularity_cutoff);
  const double step = (std::log(grid.half_width) - lo) / static_cast<double>(count - 1);
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = std::exp(lo + step * static_cast<double>(i));
  t.back() = grid.half_width;
  return t;
}

// integral over [a, b] of L(t) (1 - cos(u t)), L linear through (a, 1/a^2) and (b, 1/b^2)
double panel_integral(double a, double b, double u) {
  const double fa = 1.0 / (a * a);
  const double fb = 1.0 / (b * b);
  const double beta = (fb - fa) / (b - a);
  const double alpha = fa - beta * a;
  if (u * b <= 1.0) {
    // 1 - cos(ut) = sum_k (-1)^(k+1) (ut)^(2k) / (2k)!
    double total = 0.0;
    double coeff = 1.0;  // u^(2k) / (2k)!, signed
    double ak = a * a;   // a^(2k)
    double bk = b * b;
    for (int k = 1; k <= 12; ++k) {
      coeff *= u * u / static_cast<double>((2 * k - 1) * (2 * k));
      const double m1 = 2.0 * k + 1.0;
      const double term = alpha * (bk * b - ak * a) / m1 + beta * (bk * b * b - ak * a * a) / (m1 + 1.0);
      total += (k % 2 == 1 ? coeff : -coeff) * term;
      ak *= a * a;
      bk *= b * b;
    }
    return total;
  }
  return alpha * (b - a) + 0.5 * beta * (b * b - a * a) - (fb * std::sin(u * b) - fa * std::sin(u * a)) / u -
         beta * (std::cos(u * b) - std::cos(u * a)) / (u * u);
}

// Product-integration rule for 2 * int_eps^T (1 - cos(u t)) / (pi t^2) dt on log-spaced panels.
double one_minus_cos_rule(const std::vector<double>& t, double u) {
  u = std::abs(u);
  if (u == 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) total += panel_integral(t[i], t[i + 1], u);
  return 2.0 * total / std::numbers::pi;
}

Eigen::MatrixXd signed_pair_measure(const Eigen::VectorXd& w) {
  Eigen::MatrixXd m = -w * w.transpose();
  m.diagonal() += w;
  return m;
}

void require_square(const Eigen::MatrixXd& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw InputError(std::string(what) + " has the wrong shape");
}

Eigen::MatrixXd feature_factor(const Eigen::MatrixXd& k) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed in operator oracle");
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

void QuadratureGrid::validate() const {
  if (!(singularity_cutoff > 0.0) || !(half_width > singularity_cutoff)) {
    throw InputError("quadrature grid needs half_width > singularity_cutoff > 0");
  }
  if (points_per_axis < 16) throw InputError("quadrature grid needs at least 16 points per axis");
}

double cp_constant(int p) {
  if (p < 1) throw InputError("cp_constant needs p >= 1");
  const double half = 0.5 * (p + 1);
  return std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double weight_identity_check(double x, const QuadratureGrid& grid) {
  return one_minus_cos_rule(log_nodes(grid), x);
}

double cf_h_oracle(const Dataset& d, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                   const QuadratureGrid& grid) {
  d.validate();
  if (d.x.cols() != 1 || d.y.cols() != 1) {
    throw InputError("cf_h_oracle supports univariate X and Y only (got p=" + std::to_string(d.x.cols()) +
                     ", q=" + std::to_string(d.y.cols()) + ")");
  }
  validate_weights(w1, d.n(), "first weights");
  validate_weights(w2, d.n(), "second weights");

  // The integrand is Re sum_{ab,cd} M1(a,b) M2(c,d) exp(i t (X_a - X_c)) exp(i s (Y_b - Y_d)) / (pi^2 t^2 s^2).
  // Odd parts vanish on the symmetric domain, the product rule factorizes over the two axes, and the
  // zero marginals of M1, M2 turn each cos into -(1 - cos).
  const std::vector<double> t = log_nodes(grid);
  const Eigen::Index n = d.n();
  Eigen::MatrixXd qx(n, n), qy(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index c = a; c < n; ++c) {
      qx(a, c) = qx(c, a) = one_minus_cos_rule(t, d.x(a, 0) - d.x(c, 0));
      qy(a, c) = qy(c, a) = one_minus_cos_rule(t, d.y(a, 0) - d.y(c, 0));
    }
  }
  const Eigen::MatrixXd m1 = signed_pair_measure(w1);
  const Eigen::MatrixXd m2 = signed_pair_measure(w2);
  return m1.cwiseProduct(qx * m2 * qy).sum();
}

double operator_hs_oracle(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz,
                          double lambda) {
  const Eigen::Index n = kx.rows();
  require_square(kx, n, "K_X");
  require_square(ky, n, "K_Y");
  require_square(kz, n, "K_Z");
  if (n > kOperatorOracleMaxN) {
    throw InputError("operator oracle refuses n = " + std::to_string(n) + " (limit " +
                     std::to_string(kOperatorOracleMaxN) + ")");
  }
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (n <= 1) return 0.0;

  const Eigen::MatrixXd phi_y = feature_factor(ky);
  const Eigen::MatrixXd phi_z = feature_factor(kz);
  const Eigen::MatrixXd phi_a = feature_factor(kx.cwiseProduct(kz));  // augmented (X, Z)

  const double nn = static_cast<double>(n);
  Eigen::MatrixXd h = -Eigen::MatrixXd::Constant(n, n, 1.0 / nn);
  h.diagonal().array() += 1.0;
  h /= nn;

  const Eigen::MatrixXd cov_ya = phi_y.transpose() * h * phi_a;
  const Eigen::MatrixXd cov_yz = phi_y.transpose() * h * phi_z;
  const Eigen::MatrixXd cov_za = phi_z.transpose() * h * phi_a;
  Eigen::MatrixXd cov_zz = phi_z.transpose() * h * phi_z;
  cov_zz.diagonal().array() += lambda;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov_zz);
  if (ldlt.info() != Eigen::Success) throw NumericalError("regularized covariance solve failed in operator oracle");
  const Eigen::MatrixXd conditional = cov_ya - cov_yz * ldlt.solve(cov_za);
  return conditional.squaredNorm();
}

double operator_hs_oracle(const KernelSpec& kx, const KernelSpec& ky, const KernelSpec& kz, const Dataset& d,
                          const RegularizationSpec& reg) {
  d.validate();
  const Eigen::MatrixXd gz = gram_matrix(kz, d.z).entries;
  const double lambda = reg.lambda ? *reg.lambda : 1e-3 * gz.diagonal().mean();
  return operator_hs_oracle(gram_matrix(kx, d.x).entries, gram_matrix(ky, d.y).entries, gz, lambda);
}

double signed_measure_form(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy, const Eigen::VectorXd& w1,
                           const Eigen::VectorXd& w2) {
  const Eigen::Index n = dx.rows();
  if (n > kSignedMeasureMaxN) throw InputError("signed_measure_form is an oracle for n <= 32");
  require_square(dy, n, "D_Y");
  const auto mass = [](const Eigen::VectorXd& w, Eigen::Index a, Eigen::Index b) {
    return (a == b ? w[a] : 0.0) - w[a] * w[b];
  };
  double total = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double m1 = mass(w1, a, b);
      if (m1 == 0.0) continue;
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index e = 0; e < n; ++e) total += m1 * mass(w2, c, e) * dx(a, c) * dy(b, e);
      }
    }
  }
  return total;
}

double naive_avg_hscic(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& w) {
  const Eigen::Index n = kx.rows();
  if (n > kNaiveAvgMaxN) throw InputError("naive_avg_hscic is an oracle for n <= 16");
  double outer = 0.0;
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        t1 += w(j, a) * w(j, b) * kx(a, b) * ky(a, b);
        for (Eigen::Index c = 0; c < n; ++c) {
          t2 += w(j, a) * w(j, b) * w(j, c) * kx(a, b) * ky(a, c);
          for (Eigen::Index e = 0; e < n; ++e) t3 += w(j, a) * w(j, b) * w(j, c) * w(j, e) * kx(a, b) * ky(c, e);
        }
      }
    }
    outer += t1 - 2.0 * t2 + t3;
  }
  return outer / static_cast<double>(w.rows());
}

double naive_hscic_vstat(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz,
                         const Eigen::MatrixXd& w) {
  const Eigen::Index n = kx.rows();
  if (n > kNaiveVstatMaxN) throw InputError("naive_hscic_vstat is an oracle for n <= 8");
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          s1 += w(j, a) * w(l, b) * kx(a, b) * ky(a, b);
          for (Eigen::Index c = 0; c < n; ++c) {
            s2 += w(j, a) * w(l, b) * w(l, c) * kx(a, b) * ky(a, c);
            s3 += w(l, a) * w(j, b) * w(j, c) * kx(a, b) * ky(a, c);
            for (Eigen::Index e = 0; e < n; ++e) {
              s4 += w(j, a) * w(l, b) * w(j, c) * w(l, e) * kx(a, b) * ky(c, e);
            }
          }
        }
      }
      total += kz(j, l) * (s1 - s2 - s3 + s4);
    }
  }
  const double nn = static_cast<double>(n);
  return total / (nn * nn);
}

double stratified_hscic_vstat(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::VectorXd& labels) {
  const Eigen::Index n = kx.rows();
  std::map<double, std::vector<Eigen::Index>> strata;
  for (Eigen::Index i = 0; i < n; ++i) strata[labels[i]].push_back(i);

  double total = 0.0;
  for (const auto& [label, rows] : strata) {
    const double m = static_cast<double>(rows.size());
    double joint = 0.0, cross = 0.0, sx = 0.0, sy = 0.0;
    for (const Eigen::Index a : rows) {
      for (const Eigen::Index b : rows) {
        joint += kx(a, b) * ky(a, b);
        sx += kx(a, b);
        sy += ky(a, b);
        for (const Eigen::Index c : rows) cross += kx(a, b) * ky(a, c);
      }
    }
    const double value = joint / (m * m) - 2.0 * cross / (m * m * m) + sx * sy / (m * m * m * m);
    const double p = m / static_cast<double>(n);
    total += p * p * value;
  }
  return total;
}

}  // namespace cimeter
