#include "fluxepr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fluxepr/constants.hpp"
#include "fluxepr/errors.hpp"

namespace fluxepr {

double FitReport::value(const std::string& name) const {
  for (std::size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return parameters(static_cast<Eigen::Index>(i));
  throw std::invalid_argument("unknown fit parameter: " + name);
}

double FitReport::standard_error(const std::string& name) const {
  for (std::size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name)
      return std::sqrt(std::max(covariance(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(i)), 0.0));
  throw std::invalid_argument("unknown fit parameter: " + name);
}

namespace {

Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& p, const std::vector<double>& scales, double rel_step,
    Eigen::Index n_res) {
  const Eigen::Index np = p.size();
  Eigen::MatrixXd jac(n_res, np);
  for (Eigen::Index j = 0; j < np; ++j) {
    const double step = rel_step * std::max(std::abs(p(j)), scales[static_cast<std::size_t>(j)]);
    Eigen::VectorXd hi = p, lo = p;
    hi(j) += step;
    lo(j) -= step;
    jac.col(j) = (residuals(hi) - residuals(lo)) / (2.0 * step);
  }
  return jac;
}

}  // namespace

FitReport levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& initial, const std::vector<std::string>& names,
    const LmOptions& options) {
  const Eigen::Index np = initial.size();
  if (static_cast<Eigen::Index>(names.size()) != np)
    throw std::invalid_argument("parameter name count mismatch");

  std::vector<double> scales = options.parameter_scales;
  if (scales.empty())
    for (Eigen::Index j = 0; j < np; ++j)
      scales.push_back(std::max(std::abs(initial(j)), 1.0));
  if (static_cast<Eigen::Index>(scales.size()) != np)
    throw std::invalid_argument("parameter scale count mismatch");

  Eigen::VectorXd p = initial;
  Eigen::VectorXd r = residuals(p);
  const Eigen::Index n_res = r.size();
  if (n_res < np) throw DataError("insufficient data: fewer residuals than parameters");

  // gradient norm in scaled units, so Hz-sized and order-one parameters are
  // weighted comparably in the stopping rule
  auto scaled_gradient_norm = [&scales, np](const Eigen::VectorXd& g) {
    double norm = 0.0;
    for (Eigen::Index j = 0; j < np; ++j)
      norm = std::max(norm, std::abs(g(j)) * scales[static_cast<std::size_t>(j)]);
    return norm;
  };

  double cost = 0.5 * r.squaredNorm();
  Eigen::MatrixXd jac = numeric_jacobian(residuals, p, scales, options.relative_step, n_res);
  Eigen::VectorXd gradient = jac.transpose() * r;
  const double gradient0 = std::max(scaled_gradient_norm(gradient), 1e-300);
  const double gradient_goal = options.gradient_tolerance * gradient0;

  double lambda = 1e-3;
  int iterations = 0;
  bool converged = scaled_gradient_norm(gradient) <= gradient_goal;

  while (!converged && iterations < options.max_iterations) {
    ++iterations;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index j = 0; j < np; ++j)
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      const Eigen::VectorXd delta = damped.ldlt().solve(-gradient);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const Eigen::VectorXd p_try = p + delta;
      const Eigen::VectorXd r_try = residuals(p_try);
      const double cost_try = 0.5 * r_try.squaredNorm();
      if (cost_try < cost) {
        p = p_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        break;
      }
      lambda *= 4.0;
    }
    jac = numeric_jacobian(residuals, p, scales, options.relative_step, n_res);
    gradient = jac.transpose() * r;
    if (scaled_gradient_norm(gradient) <= gradient_goal) {
      converged = true;
      break;
    }
    if (!stepped) break;  // no downhill step at any damping
  }

  FitReport report;
  report.parameter_names = names;
  report.parameters = p;
  report.residual_norm = r.norm();
  report.iterations = iterations;
  report.converged = converged;

  // covariance s^2 (J^T J)^-1 with s^2 = RSS / (n - p)
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const double dof = static_cast<double>(n_res - np);
  const double s2 = dof > 0 ? r.squaredNorm() / dof : 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  if (lu.isInvertible())
    report.covariance = s2 * lu.inverse();
  else
    report.covariance = Eigen::MatrixXd::Constant(np, np,
                                                  std::numeric_limits<double>::quiet_NaN());
  return report;
}

FitReport fit_lorentzian(const std::vector<FrequencyPoint>& points,
                         std::optional<Eigen::Vector3d> initial) {
  if (points.size() < 4) throw DataError("insufficient data: need at least 4 points");
  std::set<double> distinct;
  for (const auto& pt : points) distinct.insert(pt.frequency_hz);
  if (distinct.size() < 3)
    throw DataError("insufficient data: need at least 3 distinct frequencies");

  Eigen::Vector3d p0;
  if (initial) {
    p0 = *initial;
  } else {
    // peak and half-width heuristics
    std::size_t peak = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].p_e > points[peak].p_e) peak = i;
    const double v0 = std::max(points[peak].p_e, 1e-6);
    const double f0 = points[peak].frequency_hz;
    // half width from the span of points above half maximum
    double half_left = f0, half_right = f0;
    for (const auto& pt : points) {
      if (pt.p_e >= 0.5 * v0) {
        half_left = std::min(half_left, pt.frequency_hz);
        half_right = std::max(half_right, pt.frequency_hz);
      }
    }
    double gamma0 = 0.5 * (half_right - half_left);
    if (!(gamma0 > 0.0)) gamma0 = 0.25 * (*distinct.rbegin() - *distinct.begin());
    if (!(gamma0 > 0.0)) gamma0 = 1.0;
    p0 << v0, f0, gamma0;
  }

  auto residuals = [&points](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    const double v = p(0), f0 = p(1), g = p(2);
    const double g2 = g * g;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = points[i].frequency_hz - f0;
      r(static_cast<Eigen::Index>(i)) = v * g2 / (d * d + g2) - points[i].p_e;
    }
    return r;
  };

  LmOptions options;
  options.parameter_scales = {std::max(std::abs(p0(0)), 1e-3), std::max(std::abs(p0(1)), 1.0),
                              std::max(std::abs(p0(2)), 1.0)};
  FitReport report = levenberg_marquardt(residuals, p0, {"visibility", "f_q0_hz", "gamma_q_hz"},
                                         options);
  // the Lorentzian is even in gamma
  report.parameters(2) = std::abs(report.parameters(2));
  return report;
}

FitReport fit_linear(const std::vector<XyPoint>& points) {
  if (points.size() < 2) throw DataError("insufficient data: need at least 2 points");
  std::set<double> distinct;
  for (const auto& pt : points) distinct.insert(pt.x);
  if (distinct.size() < 2) throw DataError("insufficient data: need at least 2 distinct x");

  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& pt : points) {
    sx += pt.x;
    sy += pt.y;
    sxx += pt.x * pt.x;
    sxy += pt.x * pt.y;
  }
  const double det = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;

  double rss = 0.0;
  for (const auto& pt : points) {
    const double r = slope * pt.x + intercept - pt.y;
    rss += r * r;
  }
  const double dof = n - 2.0;
  const double s2 = dof > 0 ? rss / dof : 0.0;

  FitReport report;
  report.parameter_names = {"slope", "intercept"};
  report.parameters = Eigen::Vector2d(slope, intercept);
  report.covariance.resize(2, 2);
  report.covariance << n, -sx, -sx, sxx;
  report.covariance *= s2 / det;
  report.residual_norm = std::sqrt(rss);
  report.iterations = 0;
  report.converged = true;
  return report;
}

FitReport fit_spin_hamiltonian(const std::vector<PeakObservation>& peaks,
                               const SpinHamModel& model, const SpinHamFreeMask& free_mask) {
  const int n_free = (free_mask.g_e ? 1 : 0) + (free_mask.zfs_d ? 1 : 0) +
                     (free_mask.misalignment ? 1 : 0);
  if (n_free == 0) throw DataError("no free parameters requested");
  if (static_cast<int>(peaks.size()) < n_free)
    throw DataError("insufficient data: fewer peaks than free parameters");
  if (free_mask.g_e) {
    std::set<double> fields;
    for (const auto& pk : peaks) fields.insert(pk.b_parallel_t);
    const bool has_nonzero = *fields.rbegin() > 0.0;
    if (fields.size() < 2 || !has_nonzero)
      throw DataError("unidentifiable: g_e requires peaks at >= 2 field values");
  }
  for (const auto& pk : peaks) {
    if (pk.branch < 1 || pk.branch >= model.spin_template.multiplicity())
      throw DataError("branch index out of range for the spin multiplicity");
  }

  std::vector<std::string> names;
  Eigen::VectorXd p0(n_free);
  std::vector<double> scales;
  int idx = 0;
  const double base_g = model.spin_template.g_tensor.trace() / 3.0;
  if (free_mask.g_e) {
    names.push_back("g_e");
    p0(idx++) = base_g;
    scales.push_back(1.0);
  }
  if (free_mask.zfs_d) {
    names.push_back("zfs_d_hz");
    p0(idx++) = model.spin_template.zfs_d_hz;
    scales.push_back(std::max(std::abs(model.spin_template.zfs_d_hz), 1e6));
  }
  if (free_mask.misalignment) {
    names.push_back("misalignment_deg");
    p0(idx++) = model.field_template.misalignment_deg;
    scales.push_back(1.0);
  }

  auto evaluate = [&](const Eigen::VectorXd& p) {
    SpinSystem sys = model.spin_template;
    FieldConfig field = model.field_template;
    int k = 0;
    // keep g positive so the tensor stays positive semidefinite while the
    // optimizer explores
    if (free_mask.g_e) sys.g_tensor = Eigen::Matrix3d::Identity() * std::max(p(k++), 1e-6);
    if (free_mask.zfs_d) sys.zfs_d_hz = p(k++);
    if (free_mask.misalignment) field.misalignment_deg = p(k++);

    Eigen::VectorXd r(static_cast<Eigen::Index>(peaks.size()));
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      field.b_parallel_t = peaks[i].b_parallel_t;
      double mean = 0.0;
      for (const auto& orientation : model.orientations) {
        const SpinSystem oriented_sys = oriented(sys, orientation.rotation);
        const SpinSpectrum spec = diagonalize(build_hamiltonian(oriented_sys, field));
        mean += orientation.weight *
                (spec.eigenvalues(peaks[i].branch) - spec.eigenvalues(0));
      }
      r(static_cast<Eigen::Index>(i)) = mean - peaks[i].frequency_hz;
    }
    return r;
  };

  LmOptions options;
  options.parameter_scales = scales;
  return levenberg_marquardt(evaluate, p0, names, options);
}

SensitivityEstimate estimate_sensitivity(const SensitivityInputs& in, SensitivityRoute route) {
  if (!(in.dpe > 0.0) || !(in.visibility > 0.0) || !(in.gamma_q_hz > 0.0))
    throw std::invalid_argument("dpe, visibility, and gamma_q must be positive");
  if (in.per_spin_shift_factor != 1.0 && in.per_spin_shift_factor != 2.0)
    throw std::invalid_argument("per_spin_shift_factor must be 1 or 2");

  const double prefactor = 8.0 * in.dpe * in.gamma_q_hz /
                           (3.0 * std::sqrt(3.0) * in.visibility);
  double n_min = 0.0;
  double rel2 = 0.0;
  auto add_rel = [&rel2](double err, double value) {
    if (value != 0.0) rel2 += (err / value) * (err / value);
  };
  add_rel(in.dpe_err, in.dpe);
  add_rel(in.visibility_err, in.visibility);
  add_rel(in.gamma_q_err, in.gamma_q_hz);

  if (route == SensitivityRoute::coupling) {
    if (!in.g_z_hz || !(*in.g_z_hz > 0.0))
      throw std::invalid_argument("coupling route requires a positive g_z");
    n_min = prefactor / (in.per_spin_shift_factor * *in.g_z_hz);
    add_rel(in.g_z_err, *in.g_z_hz);
  } else {
    if (!in.persistent_current_a || !(*in.persistent_current_a > 0.0))
      throw std::invalid_argument("flux route requires a positive persistent current");
    if (!in.flux_per_spin_wb || !(*in.flux_per_spin_wb > 0.0))
      throw std::invalid_argument("flux route requires a positive flux per spin");
    // dN/dPhi = 1 / (dPhi/dN); per-spin frequency shift inferred through I_p/h
    n_min = prefactor * constants::planck /
            (*in.persistent_current_a * *in.flux_per_spin_wb);
    add_rel(in.persistent_current_err, *in.persistent_current_a);
    add_rel(in.flux_per_spin_err, *in.flux_per_spin_wb);
  }
  return SensitivityEstimate{n_min, n_min * std::sqrt(rel2)};
}

double sensitivity_route_inconsistency(const SensitivityInputs& in) {
  if (!in.g_z_hz || !in.persistent_current_a || !in.flux_per_spin_wb)
    throw std::invalid_argument("consistency check needs g_z, I_p, and flux per spin");
  const double expected =
      constants::planck * in.per_spin_shift_factor * *in.g_z_hz / *in.persistent_current_a;
  const double deviation = *in.flux_per_spin_wb - expected;
  const double dg = expected * (in.g_z_err / std::max(*in.g_z_hz, 1e-300));
  const double di = expected * (in.persistent_current_err /
                                std::max(*in.persistent_current_a, 1e-300));
  const double var = in.flux_per_spin_err * in.flux_per_spin_err + dg * dg + di * di;
  const double sigma = std::sqrt(var);
  if (sigma <= 0.0) return deviation == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(deviation) / sigma;
}

std::vector<Peak> detect_peaks(const std::vector<SweepRecord>& records,
                               double prominence_threshold_hz) {
  if (records.size() < 5)
    throw std::invalid_argument("peak detection needs at least 5 records");

  const std::size_t n = records.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = records[i].qubit_shift_hz;

  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // dips: strict drop from the left, ties resolve to the lower frequency
    if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;

    // topographic prominence: highest low saddle on either side before a
    // deeper dip (or the edge)
    double left_max = v[i];
    for (std::size_t j = i; j-- > 0;) {
      left_max = std::max(left_max, v[j]);
      if (v[j] < v[i]) break;
    }
    double right_max = v[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      right_max = std::max(right_max, v[j]);
      if (v[j] < v[i]) break;
    }
    const double prominence = std::min(left_max, right_max) - v[i];
    if (prominence < prominence_threshold_hz) continue;

    // parabolic apex through the three samples around the dip
    const double denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
    double offset = 0.0;
    if (std::abs(denom) > 1e-300) offset = 0.5 * (v[i - 1] - v[i + 1]) / denom;
    offset = std::clamp(offset, -0.5, 0.5);
    const double df = i + 1 < n ? records[i + 1].drive_frequency_hz -
                                      records[i].drive_frequency_hz
                                : 0.0;
    peaks.push_back({records[i].drive_frequency_hz + offset * df, prominence});
  }
  return peaks;
}

}  // namespace fluxepr
