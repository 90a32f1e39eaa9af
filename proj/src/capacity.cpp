#include "fracheat/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "fracheat/errors.hpp"
#include "fracheat/util.hpp"

namespace fracheat {

CapacityInstance::CapacityInstance(const FracHeatOperator& op, double p,
                                   std::vector<std::pair<double, Point>> constraints)
    : op_(&op), p_(p), constraints_(std::move(constraints)) {
  if (!(p > 1.0) || std::isinf(p)) throw input_error("capacity: p must be in (1, infinity)");
  const auto& w = op.grid().weights();
  for (const auto& [t, x] : constraints_) {
    if (!(t > 0.0)) throw input_error("capacity: constraint with t <= 0");
    auto row = op.kernel_row(t, x);
    B_.push_back(row);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] *= w[i];
    double rowmax = 0.0;
    for (double v : row) rowmax = std::max(rowmax, v);
    if (!(rowmax > 0.0)) throw infeasible_error("capacity: constraint row identically zero");
    A_.push_back(std::move(row));
  }
}

namespace {

double objective(const CapacityInstance& inst, const std::vector<double>& f) {
  const auto& w = inst.op().grid().weights();
  double J = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) J += w[i] * std::pow(f[i], inst.p());
  return J;
}

std::vector<double> apply_A(const CapacityInstance& inst, const std::vector<double>& f) {
  std::vector<double> out(inst.A().size(), 0.0);
  for (std::size_t k = 0; k < inst.A().size(); ++k) {
    const auto& row = inst.A()[k];
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += row[i] * f[i];
    out[k] = acc;
  }
  return out;
}

// min_{mu >= 0} || g - A_S^T mu ||^2 by cyclic coordinate descent; S is small.
std::vector<double> nnls_multipliers(const CapacityInstance& inst,
                                     const std::vector<std::size_t>& S,
                                     const std::vector<double>& g) {
  const std::size_t m = S.size();
  std::vector<double> mu(m, 0.0);
  if (m == 0) return mu;
  std::vector<std::vector<double>> G(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    const auto& ra = inst.A()[S[a]];
    for (std::size_t c = a; c < m; ++c) {
      const auto& rc = inst.A()[S[c]];
      double acc = 0.0;
      for (std::size_t i = 0; i < ra.size(); ++i) acc += ra[i] * rc[i];
      G[a][c] = G[c][a] = acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) acc += ra[i] * g[i];
    b[a] = acc;
  }
  for (int sweep = 0; sweep < 200; ++sweep) {
    double change = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      double r = b[a];
      for (std::size_t c = 0; c < m; ++c)
        if (c != a) r -= G[a][c] * mu[c];
      const double nv = (G[a][a] > 0.0) ? std::max(0.0, r / G[a][a]) : 0.0;
      change = std::max(change, std::abs(nv - mu[a]));
      mu[a] = nv;
    }
    if (change < 1e-14) break;
  }
  return mu;
}

bool solve_dense(std::vector<std::vector<double>> M, std::vector<double>& rhs) {
  const std::size_t n = M.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[best][c])) best = r;
    if (std::abs(M[best][c]) < 1e-300) return false;
    std::swap(M[c], M[best]);
    std::swap(rhs[c], rhs[best]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double fct = M[r][c] / M[c][c];
      if (fct == 0.0) continue;
      for (std::size_t cc = c; cc < n; ++cc) M[r][cc] -= fct * M[c][cc];
      rhs[r] -= fct * rhs[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t cc = c + 1; cc < n; ++cc) rhs[c] -= M[c][cc] * rhs[cc];
    rhs[c] /= M[c][c];
  }
  return true;
}

// Equality-constrained minimization on the active set S (A_S f = 1) via
// Newton on the multipliers: f(lam) solves stationarity in closed form, the
// residual is A_S f(lam) - 1.
bool polish_primal(const CapacityInstance& inst, const std::vector<std::size_t>& S,
                   std::vector<double>& f, std::vector<double>& lambda_out) {
  const double p = inst.p();
  const auto& w = inst.op().grid().weights();
  const std::size_t n = f.size(), m = S.size();
  if (m == 0) {
    std::fill(f.begin(), f.end(), 0.0);
    lambda_out.clear();
    return true;
  }
  std::vector<double> lam(m, 0.0);
  {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = p * w[i] * std::pow(std::max(f[i], 1e-12), p - 1.0);
    lam = nnls_multipliers(inst, S, g);
    for (double& v : lam) v = std::max(v, 1e-12);
  }
  for (int it = 0; it < 80; ++it) {
    std::vector<double> phi(n, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      const auto& row = inst.A()[S[a]];
      for (std::size_t i = 0; i < n; ++i) phi[i] += lam[a] * row[i];
    }
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (phi[i] <= 0.0) {
        f[i] = 0.0;
        continue;
      }
      f[i] = std::pow(phi[i] / (p * w[i]), 1.0 / (p - 1.0));
      ok = ok && std::isfinite(f[i]);
    }
    if (!ok) return false;
    std::vector<double> r(m, 0.0);
    double rmax = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const auto& row = inst.A()[S[a]];
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += row[i] * f[i];
      r[a] = acc - 1.0;
      rmax = std::max(rmax, std::abs(r[a]));
    }
    if (rmax < 1e-13) break;
    // Jacobian A_S diag(df/dphi) A_S^T with df/dphi = f/((p-1) phi)
    std::vector<std::vector<double>> J(m, std::vector<double>(m, 0.0));
    for (std::size_t a = 0; a < m; ++a) {
      const auto& ra = inst.A()[S[a]];
      for (std::size_t c = a; c < m; ++c) {
        const auto& rc = inst.A()[S[c]];
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (phi[i] <= 0.0) continue;
          acc += ra[i] * rc[i] * f[i] / ((p - 1.0) * phi[i]);
        }
        J[a][c] = J[c][a] = acc;
      }
    }
    std::vector<double> step = r;
    if (!solve_dense(J, step)) return false;
    double scale = 1.0;
    for (int bt = 0; bt < 60; ++bt) {
      bool positive = true;
      for (std::size_t a = 0; a < m; ++a)
        if (lam[a] - scale * step[a] < 0.0) positive = false;
      if (positive) break;
      scale *= 0.5;
    }
    double move = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const double nv = std::max(0.0, lam[a] - scale * step[a]);
      move = std::max(move, std::abs(nv - lam[a]));
      lam[a] = nv;
    }
    if (move == 0.0) break;
  }
  lambda_out = lam;
  return true;
}

} // namespace

CapacityResult capacity_primal(const CapacityInstance& inst, double tol) {
  CapacityResult res;
  const std::size_t n = inst.op().grid().size();
  const std::size_t m = inst.A().size();
  if (m == 0) {
    res.minimizer.assign(n, 0.0);
    res.value = 0.0;
    return res;
  }
  const double p = inst.p();
  const auto& w = inst.op().grid().weights();

  // feasible start: constant field scaled to the worst constraint
  std::vector<double> f(n, 0.0);
  {
    double worst = 1e300;
    for (std::size_t k = 0; k < m; ++k) {
      double rowsum = 0.0;
      for (double v : inst.A()[k]) rowsum += v;
      worst = std::min(worst, rowsum);
    }
    if (!(worst > 0.0)) throw infeasible_error("capacity_primal: infeasible instance");
    std::fill(f.begin(), f.end(), 1.0 / worst);
  }

  std::vector<double> g(n), prev_f, prev_g;
  double step = 1.0;
  int it = 0;
  double J = objective(inst, f);
  for (; it < 4000; ++it) {
    for (std::size_t i = 0; i < n; ++i) g[i] = p * w[i] * std::pow(std::max(f[i], 0.0), p - 1.0);
    auto Af = apply_A(inst, f);
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < m; ++k)
      if (Af[k] <= 1.0 + 1e-7) active.push_back(k);
    // steepest feasible direction: gradient minus its cone projection
    auto mu = nnls_multipliers(inst, active, g);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& row = inst.A()[active[a]];
      for (std::size_t i = 0; i < n; ++i) d[i] += mu[a] * row[i];
    }
    double dnorm = 0.0;
    for (double v : d) dnorm += v * v;
    dnorm = std::sqrt(dnorm);
    if (dnorm < 1e-12 * (1.0 + std::abs(J))) break;

    if (!prev_f.empty()) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = f[i] - prev_f[i];
        const double y = g[i] - prev_g[i];
        sy += s * y;
        yy += y * y;
      }
      if (yy > 0 && sy > 0) step = sy / yy;
    }
    prev_f = f;
    prev_g = g;

    auto Ad = apply_A(inst, d);
    double tmax = 1e300;
    for (std::size_t k = 0; k < m; ++k)
      if (Ad[k] < -1e-300) tmax = std::min(tmax, (Af[k] - 1.0) / (-Ad[k]));
    for (std::size_t i = 0; i < n; ++i)
      if (d[i] < -1e-300) tmax = std::min(tmax, f[i] / (-d[i]));
    double t = std::min(step, tmax);
    double gd = 0.0;
    for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
    std::vector<double> trial(n);
    double Jt = J;
    for (int bt = 0; bt < 50; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(0.0, f[i] + t * d[i]);
      Jt = objective(inst, trial);
      if (Jt <= J + 1e-4 * t * gd || t < 1e-16) break;
      t *= 0.5;
    }
    const double rel_change = std::abs(J - Jt) / std::max(J, 1e-300);
    f = trial;
    J = Jt;
    if (rel_change < 0.1 * tol && it > 10) break;
  }

  // active-constraint Newton polish with multiplier/feasibility exchange
  auto Af = apply_A(inst, f);
  std::vector<std::size_t> S;
  for (std::size_t k = 0; k < m; ++k)
    if (Af[k] <= 1.0 + 1e-5) S.push_back(k);
  if (S.empty()) S.push_back(0);
  std::vector<double> lam;
  for (int round = 0; round < 2 * (int)m + 4; ++round) {
    std::vector<double> fp = f;
    if (!polish_primal(inst, S, fp, lam)) break;
    std::size_t drop = S.size();
    double most_neg = 1e-11;
    for (std::size_t a = 0; a < lam.size(); ++a)
      if (lam[a] < most_neg) {
        most_neg = lam[a];
        drop = a;
      }
    if (drop < S.size() && S.size() > 1) {
      S.erase(S.begin() + drop);
      continue;
    }
    auto Afp = apply_A(inst, fp);
    std::size_t add = m;
    double worst = 1e-11;
    for (std::size_t k = 0; k < m; ++k) {
      const double viol = 1.0 - Afp[k];
      if (viol > worst && std::find(S.begin(), S.end(), k) == S.end()) {
        worst = viol;
        add = k;
      }
    }
    if (add < m) {
      f = fp;
      S.push_back(add);
      continue;
    }
    f = fp;
    break;
  }

  res.minimizer = f;
  res.value = objective(inst, f);
  res.iterations = it;
  res.dual_masses.assign(m, 0.0);
  // KKT multipliers induce the extremal measure nu_K = lambda/p
  // (sum lambda = p C by complementary slackness)
  auto Af2 = apply_A(inst, f);
  std::vector<std::size_t> S2;
  for (std::size_t k = 0; k < m; ++k)
    if (Af2[k] <= 1.0 + 1e-7) S2.push_back(k);
  {
    std::vector<double> gg(n);
    for (std::size_t i = 0; i < n; ++i)
      gg[i] = p * w[i] * std::pow(std::max(f[i], 0.0), p - 1.0);
    auto mu = nnls_multipliers(inst, S2, gg);
    for (std::size_t a = 0; a < S2.size(); ++a) res.dual_masses[S2[a]] = mu[a] / p;
  }
  double viol = 0.0;
  for (std::size_t k = 0; k < m; ++k) viol = std::max(viol, 1.0 - Af2[k]);
  res.converged = viol <= 1e-7;
  return res;
}

CapacityResult capacity_dual(const CapacityInstance& inst, double tol) {
  CapacityResult res;
  const std::size_t n = inst.op().grid().size();
  const std::size_t m = inst.A().size();
  res.minimizer.assign(n, 0.0);
  if (m == 0) {
    res.value = 0.0;
    return res;
  }
  const double p = inst.p();
  const double pp = p / (p - 1.0);
  const auto& w = inst.op().grid().weights();
  const auto& B = inst.B();

  auto adjoint = [&](const std::vector<double>& mm) {
    std::vector<double> phi(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      if (mm[k] == 0.0) continue;
      const auto& row = B[k];
      for (std::size_t i = 0; i < n; ++i) phi[i] += mm[k] * row[i];
    }
    return phi;
  };
  auto value_of = [&](const std::vector<double>& phi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::pow(phi[i], pp);
    return acc; // sigma^{p'}
  };
  auto grad_of = [&](const std::vector<double>& phi) {
    std::vector<double> gk(m, 0.0);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] * std::pow(phi[i], pp - 1.0);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& row = B[k];
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += tmp[i] * row[i];
      gk[k] = acc;
    }
    return gk;
  };

  std::vector<double> mm(m, 1.0 / m);
  auto phi = adjoint(mm);
  double val = value_of(phi);
  std::vector<double> prev_m, prev_g;
  double step = 1.0;
  int it = 0;
  for (; it < 3000; ++it) {
    auto gk = grad_of(phi);
    if (!prev_m.empty()) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double s = mm[k] - prev_m[k];
        const double y = gk[k] - prev_g[k];
        sy += s * y;
        yy += y * y;
      }
      if (yy > 0 && sy > 0) step = sy / yy;
    }
    prev_m = mm;
    prev_g = gk;
    double t = step;
    std::vector<double> trial(m);
    double tval = val;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t k = 0; k < m; ++k) trial[k] = mm[k] - t * gk[k];
      trial = project_simplex(trial);
      auto tphi = adjoint(trial);
      tval = value_of(tphi);
      if (tval <= val || t < 1e-18) {
        phi = std::move(tphi);
        break;
      }
      t *= 0.5;
    }
    const double rel = std::abs(val - tval) / std::max(val, 1e-300);
    mm = trial;
    val = tval;
    if (rel < 0.01 * tol && it > 5) break;
  }

  // support polish: Newton for min sigma^{p'} subject to sum_{S} m = 1.
  // Loose tolerances (screening-scale solves) stop at the projected-gradient
  // answer.
  std::vector<std::size_t> S;
  if (tol >= 1e-5) goto finish;
  for (std::size_t k = 0; k < m; ++k)
    if (mm[k] > 1e-10) S.push_back(k);
  if (S.empty()) S.push_back(0);
  for (int round = 0; round < (int)m + 4; ++round) {
    bool changed = false;
    for (int newton = 0; newton < 60; ++newton) {
      phi = adjoint(mm);
      std::vector<double> tmp(n), tmp2(n);
      for (std::size_t i = 0; i < n; ++i) {
        tmp[i] = w[i] * std::pow(phi[i], pp - 1.0);
        tmp2[i] = (phi[i] > 0.0) ? w[i] * (pp - 1.0) * std::pow(phi[i], pp - 2.0) : 0.0;
      }
      const std::size_t s = S.size();
      std::vector<std::vector<double>> Hs(s + 1, std::vector<double>(s + 1, 0.0));
      std::vector<double> rhs(s + 1, 0.0);
      for (std::size_t a = 0; a < s; ++a) {
        const auto& ra = B[S[a]];
        double gacc = 0.0;
        for (std::size_t i = 0; i < n; ++i) gacc += tmp[i] * ra[i];
        rhs[a] = -gacc;
        for (std::size_t c = a; c < s; ++c) {
          const auto& rc = B[S[c]];
          double hacc = 0.0;
          for (std::size_t i = 0; i < n; ++i) hacc += tmp2[i] * ra[i] * rc[i];
          Hs[a][c] = Hs[c][a] = hacc;
        }
        Hs[a][s] = Hs[s][a] = 1.0;
      }
      double mass = 0.0;
      for (std::size_t a = 0; a < s; ++a) mass += mm[S[a]];
      rhs[s] = 1.0 - mass;
      if (!solve_dense(Hs, rhs)) break;
      double scale = 1.0;
      for (int bt = 0; bt < 60; ++bt) {
        bool ok = true;
        for (std::size_t a = 0; a < s; ++a)
          if (mm[S[a]] + scale * rhs[a] < 0.0) ok = false;
        if (ok) break;
        scale *= 0.5;
      }
      double move = 0.0;
      for (std::size_t a = 0; a < s; ++a) {
        mm[S[a]] += scale * rhs[a];
        move = std::max(move, std::abs(scale * rhs[a]));
      }
      if (move < 1e-15) break;
    }
    // exchange: drop zero components, add any constraint that lowers sigma
    phi = adjoint(mm);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] * std::pow(phi[i], pp - 1.0);
    double rho = 0.0;
    for (std::size_t a = 0; a < S.size(); ++a) {
      const auto& ra = B[S[a]];
      double gacc = 0.0;
      for (std::size_t i = 0; i < n; ++i) gacc += tmp[i] * ra[i];
      rho += gacc;
    }
    rho /= (double)S.size();
    std::size_t best = m;
    double bestg = rho * (1.0 - 1e-10);
    for (std::size_t k = 0; k < m; ++k) {
      if (std::find(S.begin(), S.end(), k) != S.end()) continue;
      const auto& rk = B[k];
      double gacc = 0.0;
      for (std::size_t i = 0; i < n; ++i) gacc += tmp[i] * rk[i];
      if (gacc < bestg) {
        bestg = gacc;
        best = k;
      }
    }
    for (std::size_t a = 0; a < S.size();) {
      if (mm[S[a]] <= 1e-14 && S.size() > 1) {
        mm[S[a]] = 0.0;
        S.erase(S.begin() + a);
        changed = true;
      } else {
        ++a;
      }
    }
    if (best < m) {
      S.push_back(best);
      changed = true;
    }
    if (!changed) break;
  }

finish:
  phi = adjoint(mm);
  const double sigma_pow = value_of(phi); // sigma^{p'}
  const double sigma = std::pow(sigma_pow, 1.0 / pp);
  res.value = std::pow(sigma, -p);
  res.iterations = it;
  res.dual_masses.resize(m);
  for (std::size_t k = 0; k < m; ++k) res.dual_masses[k] = res.value * mm[k];
  // induced primal candidate f_K = (A* nu_K)^{1/(p-1)}
  for (std::size_t i = 0; i < n; ++i)
    res.minimizer[i] = std::pow(res.value * phi[i], 1.0 / (p - 1.0));
  return res;
}

DualityReport duality_check(const CapacityInstance& inst, double tol) {
  DualityReport rep;
  auto pr = capacity_primal(inst, tol);
  auto du = capacity_dual(inst, tol);
  rep.primal = pr.value;
  rep.dual = du.value;
  rep.gap = (pr.value - du.value) / std::max(pr.value, 1e-300);

  double supf = 0.0, supdiff = 0.0;
  for (std::size_t i = 0; i < pr.minimizer.size(); ++i) {
    supf = std::max(supf, du.minimizer[i]);
    supdiff = std::max(supdiff, std::abs(du.minimizer[i] - pr.minimizer[i]));
  }
  rep.extremal_residual = supdiff / std::max(supf, 1e-300);

  const double p = inst.p();
  const double pp = p / (p - 1.0);
  double mass = 0.0;
  for (double v : du.dual_masses) mass += v;
  const auto& w = inst.op().grid().weights();
  std::vector<double> phi(inst.op().grid().size(), 0.0);
  for (std::size_t k = 0; k < inst.B().size(); ++k)
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += du.dual_masses[k] * inst.B()[k][i];
  double integral = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) integral += w[i] * std::pow(phi[i], pp);
  const double C = du.value;
  rep.threeway_residual =
      std::max(std::abs(mass - C), std::abs(integral - C)) / std::max(C, 1e-300);

  auto Af = apply_A(inst, pr.minimizer);
  double tight_mass = 0.0;
  for (std::size_t k = 0; k < Af.size(); ++k)
    if (Af[k] <= 1.0 + 10.0 * tol) tight_mass += du.dual_masses[k];
  rep.complementarity = (mass > 0.0) ? tight_mass / mass : 1.0;
  return rep;
}

PropertiesReport capacity_properties_check(const FracHeatOperator& op, double p,
                                           const std::vector<std::pair<double, Point>>& k_small,
                                           const std::vector<std::pair<double, Point>>& k_large) {
  PropertiesReport rep;
  CapacityInstance empty(op, p, {});
  rep.empty_value = capacity_primal(empty).value;

  CapacityInstance small(op, p, k_small);
  CapacityInstance large(op, p, k_large);
  const double cs = capacity_dual(small).value;
  const double cl = capacity_dual(large).value;
  rep.monotonicity_violation = std::max(0.0, cs - cl);

  std::vector<std::pair<double, Point>> h1(k_large.begin(),
                                           k_large.begin() + k_large.size() / 2);
  std::vector<std::pair<double, Point>> h2(k_large.begin() + k_large.size() / 2, k_large.end());
  double sum = 0.0;
  if (!h1.empty()) sum += capacity_dual(CapacityInstance(op, p, h1)).value;
  if (!h2.empty()) sum += capacity_dual(CapacityInstance(op, p, h2)).value;
  rep.subadditivity_violation = std::max(0.0, cl - sum);
  return rep;
}

SphericalScanReport spherical_capacity_scan(const FracHeatOperator& op, double p,
                                            const std::vector<double>& r_list, const Point& x0,
                                            int n_constraint_times, int n_constraint_points) {
  SphericalScanReport rep;
  rep.r_list = r_list;
  const double alpha = op.alpha();
  rep.min_lower_ratio = 1e300;
  rep.max_upper_ratio = 0.0;
  for (double r : r_list) {
    const double t0 = std::pow(r, 2.0 * alpha);
    std::vector<std::pair<double, Point>> pts;
    for (int a = 0; a < n_constraint_times; ++a) {
      const double tt = t0 + std::pow(r, 2.0 * alpha) * (1.0 + (a + 0.5) / n_constraint_times);
      for (int b = 0; b < n_constraint_points; ++b) {
        Point x = x0;
        x[0] += -0.9 * r + 1.8 * r * b / std::max(1, n_constraint_points - 1);
        pts.push_back({tt, x});
      }
    }
    CapacityInstance inst(op, p, pts);
    const double C = capacity_dual(inst).value;
    rep.capacities.push_back(C);
    rep.min_lower_ratio = std::min(rep.min_lower_ratio, C / std::pow(r, op.space().beta_star()));
    rep.max_upper_ratio = std::max(rep.max_upper_ratio, C / std::pow(r, op.space().beta()));
  }
  if (r_list.size() >= 2) {
    std::vector<double> lr(r_list.size()), lc(r_list.size());
    for (std::size_t i = 0; i < r_list.size(); ++i) {
      lr[i] = std::log(r_list[i]);
      lc[i] = std::log(std::max(rep.capacities[i], 1e-300));
    }
    rep.slope = fit_slope(lr, lc);
  }
  return rep;
}

StrongTypeReport strong_type_check(const FracHeatOperator& op, double p, int n_samples,
                                   unsigned long long seed, int n_lattice_times,
                                   int n_lattice_points) {
  StrongTypeReport rep;
  rep.samples = n_samples;
  Rng rng(seed);
  const auto& nodes = op.grid().nodes();
  const auto& w = op.grid().weights();
  const std::size_t n = nodes.size();

  std::vector<double> lat_times;
  for (int i = 0; i < n_lattice_times; ++i)
    lat_times.push_back(0.05 * std::pow(100.0, (double)i / (n_lattice_times - 1)));
  std::vector<std::size_t> lat_nodes;
  const std::size_t stride = std::max<std::size_t>(1, n / n_lattice_points);
  for (std::size_t j = 0; j < n; j += stride) lat_nodes.push_back(j);

  for (int sample = 0; sample < n_samples; ++sample) {
    std::vector<double> f(n, 0.0);
    const int kb = 1 + (int)(rng.next_u64() % 5);
    for (int b = 0; b < kb; ++b) {
      const double c = rng.uniform(-4.0, 4.0);
      const double width = rng.uniform(0.3, 1.5);
      const double amp = rng.uniform(0.5, 1.5);
      for (std::size_t j = 0; j < n; ++j) {
        const double d = nodes[j][0] - c;
        f[j] += amp * std::exp(-d * d / (width * width));
      }
    }
    const double fnorm_p = std::pow(weighted_p_norm(f, w, p), p);
    if (fnorm_p == 0.0) continue;

    std::vector<std::vector<double>> u;
    double umax = 0.0, umin_pos = 1e300;
    for (double t : lat_times) {
      auto slice = op.semigroup_apply(t, f);
      std::vector<double> vals;
      for (std::size_t j : lat_nodes) {
        vals.push_back(slice[j]);
        if (slice[j] > 0.0) {
          umax = std::max(umax, slice[j]);
          umin_pos = std::min(umin_pos, slice[j]);
        }
      }
      u.push_back(std::move(vals));
    }
    if (umax == 0.0) continue;
    const int jhi = (int)std::ceil(std::log2(umax));
    // Levels far below the maximum contribute at most
    // 2^{jp} C(lattice) / (1 - 2^{-p}); cover them by that exact bound
    // instead of solving near-full instances.
    const int jlo = std::max((int)std::floor(std::log2(umin_pos)), jhi - 14);
    double S = 0.0, weak = 0.0;
    std::vector<std::pair<double, Point>> prev_pts;
    double prev_C = 0.0;
    for (int j = jlo; j <= jhi; ++j) {
      const double level = std::pow(2.0, j);
      std::vector<std::pair<double, Point>> pts;
      for (std::size_t a = 0; a < lat_times.size(); ++a)
        for (std::size_t b = 0; b < lat_nodes.size(); ++b)
          if (u[a][b] >= level) pts.push_back({lat_times[a], nodes[lat_nodes[b]]});
      if (pts.empty()) continue;
      const double C = (pts == prev_pts)
                           ? prev_C
                           : capacity_dual(CapacityInstance(op, p, pts), 1e-4).value;
      prev_pts = std::move(pts);
      prev_C = C;
      S += std::pow(level, p) * C;
      weak = std::max(weak, std::pow(level, p) * C);
    }
    if (std::floor(std::log2(umin_pos)) < jlo) {
      std::vector<std::pair<double, Point>> all;
      for (std::size_t a = 0; a < lat_times.size(); ++a)
        for (std::size_t b = 0; b < lat_nodes.size(); ++b)
          all.push_back({lat_times[a], nodes[lat_nodes[b]]});
      const double c_full = capacity_dual(CapacityInstance(op, p, all), 1e-4).value;
      S += c_full * std::pow(2.0, (jlo - 1) * p) / (1.0 - std::pow(2.0, -p));
    }
    rep.max_ratio = std::max(rep.max_ratio, S / fnorm_p);
    rep.max_weak_ratio = std::max(rep.max_weak_ratio, weak / fnorm_p);
  }
  return rep;
}

KappaTable::KappaTable(const FracHeatOperator& op, double p, const DiscreteMeasure& nu,
                       int max_exact_atoms) {
  p_ = p;
  total_mass_ = nu.total_mass();
  const int n = (int)nu.atoms.size();
  std::vector<std::pair<double, double>> subsets; // (mass, capacity)
  if (n == 0) return;
  if (n <= max_exact_atoms) {
    for (unsigned long long mask = 1; mask < (1ull << n); ++mask) {
      double mass = 0.0;
      std::vector<std::pair<double, Point>> pts;
      for (int k = 0; k < n; ++k)
        if (mask & (1ull << k)) {
          mass += nu.atoms[k].mass;
          pts.push_back({nu.atoms[k].t, nu.atoms[k].x});
        }
      const double C = capacity_dual(CapacityInstance(op, p, pts), 1e-7).value;
      subsets.push_back({mass, C});
    }
  } else {
    heuristic_ = true;
    // greedy: grow by the atom with the smallest capacity increment
    std::vector<int> remaining(n);
    for (int k = 0; k < n; ++k) remaining[k] = k;
    std::vector<std::pair<double, Point>> pts;
    double mass = 0.0;
    while (!remaining.empty()) {
      int best = -1;
      double bestC = 1e300;
      for (std::size_t r = 0; r < remaining.size(); ++r) {
        auto trial = pts;
        trial.push_back({nu.atoms[remaining[r]].t, nu.atoms[remaining[r]].x});
        const double C = capacity_dual(CapacityInstance(op, p, trial), 1e-6).value;
        if (C < bestC) {
          bestC = C;
          best = (int)r;
        }
      }
      pts.push_back({nu.atoms[remaining[best]].t, nu.atoms[remaining[best]].x});
      mass += nu.atoms[remaining[best]].mass;
      remaining.erase(remaining.begin() + best);
      subsets.push_back({mass, bestC});
    }
  }
  // kappa(lambda) = min capacity among subsets with mass >= lambda
  std::sort(subsets.begin(), subsets.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double running = 1e300;
  for (const auto& [mass, C] : subsets) {
    running = std::min(running, C);
    if (steps_.empty() || mass < steps_.back().first - 1e-15)
      steps_.push_back({mass, running});
    else
      steps_.back().second = running;
  }
  std::reverse(steps_.begin(), steps_.end()); // ascending mass
}

KappaTable::Value KappaTable::kappa(double lambda) const {
  Value v;
  v.heuristic = heuristic_;
  if (lambda > total_mass_ + 1e-15 || steps_.empty()) {
    v.infinite = true;
    return v;
  }
  for (const auto& [mass, C] : steps_)
    if (mass >= lambda - 1e-15) {
      v.value = C;
      return v;
    }
  v.infinite = true;
  return v;
}

double KappaTable::trace_integral(double q) const {
  if (steps_.empty()) return 0.0;
  // I = int (lambda^{p/q}/kappa)^{q/(p-q)} dlambda/lambda with kappa
  // piecewise constant: exact per piece, exponent e = p/(p-q)
  const double e = p_ / (p_ - q);
  double I = 0.0;
  double lo = 0.0;
  for (const auto& [mass, C] : steps_) {
    const double hi = mass;
    if (hi > lo) {
      I += std::pow(C, -q / (p_ - q)) * (std::pow(hi, e) - std::pow(lo, e)) / e;
      lo = hi;
    }
  }
  return I;
}

double embedding_norm_estimate(const FracHeatOperator& op, double p, double q,
                               const DiscreteMeasure& nu, int trials, unsigned long long seed) {
  Rng rng(seed);
  const auto& nodes = op.grid().nodes();
  const auto& w = op.grid().weights();
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> rows;
  for (const auto& a : nu.atoms) rows.push_back(op.kernel_row(a.t, a.x));
  double best = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> f(n, 0.0);
    const int kb = 1 + (int)(rng.next_u64() % 5);
    for (int b = 0; b < kb; ++b) {
      const double width = rng.uniform(0.2, 1.5);
      const double amp = rng.uniform(0.5, 1.5);
      // center near a random atom so the mass actually illuminates nu
      Point c = nu.atoms.empty() ? op.space().origin()
                                 : nu.atoms[rng.next_u64() % nu.atoms.size()].x;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = op.space().distance(nodes[j], c);
        f[j] += amp * std::exp(-d * d / (width * width));
      }
    }
    const double fp = weighted_p_norm(f, w, p);
    if (fp == 0.0) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k < nu.atoms.size(); ++k) {
      double u = 0.0;
      for (std::size_t i = 0; i < n; ++i) u += w[i] * rows[k][i] * f[i];
      acc += nu.atoms[k].mass * std::pow(std::abs(u), q);
    }
    best = std::max(best, std::pow(acc, 1.0 / q) / fp);
  }
  return best;
}

TraceLowerReport trace_lower_sector(const FracHeatOperator& op, double p, double q,
                                    const DiscreteMeasure& nu, int mc_trials,
                                    unsigned long long seed) {
  if (!(p > 1.0 && p <= q && !std::isinf(q)))
    throw input_error("trace_lower_sector: need 1 < p <= q < infinity");
  TraceLowerReport rep;
  KappaTable table(op, p, nu);
  rep.kappa_heuristic = table.heuristic();
  const double total = nu.total_mass();
  if (total > 0.0) {
    double min_mass = 1e300;
    for (const auto& a : nu.atoms)
      if (a.mass > 0) min_mass = std::min(min_mass, a.mass);
    for (int i = 0; i < 16; ++i) {
      const double lam = 0.3 * min_mass * std::pow(total / (0.3 * min_mass), (double)i / 15.0);
      auto kv = table.kappa(lam);
      if (kv.infinite) continue;
      rep.sup_lambda_ratio = std::max(rep.sup_lambda_ratio, std::pow(lam, p / q) / kv.value);
    }
  }
  // ball-condition scan with t0 <~ r^{2 alpha}
  const double expo = q * op.space().beta() / p;
  for (const auto& a : nu.atoms) {
    for (int i = 0; i < 12; ++i) {
      const double r = 0.1 * std::pow(40.0, i / 11.0);
      for (double c : {0.25, 0.5, 1.0}) {
        const double t0 = c * std::pow(r, 2.0 * op.alpha());
        ParabolicBall ball{t0, a.x, r};
        double mass = 0.0;
        for (const auto& b : nu.atoms)
          if (ball.contains(b.t, b.x, op.alpha(), [&](const Point& u, const Point& v) {
                return op.space().distance(u, v);
              }))
            mass += b.mass;
        if (mass > 0.0)
          rep.sup_ball_ratio = std::max(rep.sup_ball_ratio, mass / std::pow(r, expo));
      }
    }
  }
  rep.embedding_estimate = embedding_norm_estimate(op, p, q, nu, mc_trials, seed);
  return rep;
}

TraceUpperReport trace_upper_sector(const FracHeatOperator& op, double p, double q,
                                    const DiscreteMeasure& nu, int mc_trials,
                                    unsigned long long seed) {
  if (!(q > 1.0 && q < p)) throw input_error("trace_upper_sector: need 1 < q < p");
  TraceUpperReport rep;
  KappaTable table(op, p, nu);
  rep.kappa_heuristic = table.heuristic();
  rep.integral = table.trace_integral(q);
  rep.finite = std::isfinite(rep.integral);
  rep.embedding_estimate = embedding_norm_estimate(op, p, q, nu, mc_trials, seed);
  return rep;
}

} // namespace fracheat
