// Bounded revised primal simplex with an explicit dense basis inverse.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "safe_field/lp_core.hpp"

namespace safe_field::lp {

namespace {

enum class VarState : char { Basic, AtLower, AtUpper, FreeZero };

class Simplex {
 public:
  Simplex(const StandardLp& lp, const SolverOptions& opts) : lp_(lp), opts_(opts) {
    build();
  }

  LpSolution run();

 private:
  enum class Outcome { Optimal, Unbounded };

  void build();
  void add_column(const std::vector<std::pair<int, double>>& entries, double lo,
                  double hi, double cost, bool artificial);
  double column_dot(int j, const Eigen::VectorXd& y) const;
  Eigen::VectorXd column_times_binv(int j) const;
  void refactor();
  void pivot(int r, int j, const Eigen::VectorXd& alpha);
  Outcome iterate(const std::vector<double>& cost);
  Outcome solve_phase(const std::vector<double>& cost);
  bool perturb_degenerate();
  bool remove_perturbation();
  bool repair();
  void drive_out_artificials();
  [[noreturn]] void numerical_failure(const std::string& why) const;

  const StandardLp& lp_;
  SolverOptions opts_;
  int m_ = 0;
  int n_struct_ = 0;
  std::vector<int> cstart_{0};
  std::vector<int> crow_;
  std::vector<double> cval_;
  std::vector<double> lo_, hi_, cost2_, x_;
  std::vector<char> artificial_;
  std::vector<VarState> state_;
  std::vector<int> head_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd binv_;
  long iterations_ = 0;
  long since_refactor_ = 0;
  long max_iterations_ = 0;
  // Bound shifts applied while stalled; the original bounds are kept here.
  std::vector<double> lo0_, hi0_;
  std::vector<char> shifted_;
  bool perturbed_ = false;
  bool allow_perturb_ = true;
  std::mt19937_64 perturb_rng_{12345};
};

void Simplex::add_column(const std::vector<std::pair<int, double>>& entries,
                         double lo, double hi, double cost, bool artificial) {
  for (const auto& [r, v] : entries) {
    if (v == 0.0) continue;
    crow_.push_back(r);
    cval_.push_back(v);
  }
  cstart_.push_back(static_cast<int>(crow_.size()));
  lo_.push_back(lo);
  hi_.push_back(hi);
  cost2_.push_back(cost);
  artificial_.push_back(artificial ? 1 : 0);
}

void Simplex::build() {
  const int n_ub = static_cast<int>(lp_.ub.size());
  m_ = n_ub + static_cast<int>(lp_.eq.size());
  n_struct_ = lp_.num_vars();
  const double sgn = lp_.sense == Sense::Maximize ? -1.0 : 1.0;

  std::vector<std::vector<std::pair<int, double>>> cols(n_struct_);
  b_.resize(m_);
  for (int i = 0; i < n_ub; ++i) {
    for (const auto& [j, a] : lp_.ub[i].terms) cols[j].emplace_back(i, a);
    b_(i) = lp_.ub[i].rhs;
  }
  for (size_t k = 0; k < lp_.eq.size(); ++k) {
    const int i = n_ub + static_cast<int>(k);
    for (const auto& [j, a] : lp_.eq[k].terms) cols[j].emplace_back(i, a);
    b_(i) = lp_.eq[k].rhs;
  }
  for (int j = 0; j < n_struct_; ++j) {
    // Merge duplicate row entries.
    auto& c = cols[j];
    std::sort(c.begin(), c.end());
    std::vector<std::pair<int, double>> merged;
    for (const auto& e : c) {
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    if (lp_.lower[j] > lp_.upper[j]) {
      lo_.clear();
      return;  // inconsistent bounds; reported as infeasible in run()
    }
    add_column(merged, lp_.lower[j], lp_.upper[j], sgn * lp_.cost[j], false);
  }
  for (int i = 0; i < n_ub; ++i) add_column({{i, 1.0}}, 0.0, kInf, 0.0, false);
}

double Simplex::column_dot(int j, const Eigen::VectorXd& y) const {
  double s = 0.0;
  for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) s += cval_[k] * y(crow_[k]);
  return s;
}

Eigen::VectorXd Simplex::column_times_binv(int j) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
  for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) a += cval_[k] * binv_.col(crow_[k]);
  return a;
}

void Simplex::numerical_failure(const std::string& why) const {
  std::ostringstream os;
  os << why << " (rows " << m_ << ", columns " << lo_.size() << ", iterations "
     << iterations_ << ")";
  fail(ErrorKind::NumericalFailure, os.str());
}

void Simplex::refactor() {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) B(crow_[k], r) = cval_[k];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  binv_ = lu.inverse();
  if (!binv_.allFinite()) numerical_failure("singular basis");
  Eigen::VectorXd rhs = b_;
  const int ncols = static_cast<int>(lo_.size());
  for (int j = 0; j < ncols; ++j) {
    if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
    for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) rhs(crow_[k]) -= cval_[k] * x_[j];
  }
  const Eigen::VectorXd xb = binv_ * rhs;
  for (int r = 0; r < m_; ++r) x_[head_[r]] = xb(r);
  since_refactor_ = 0;
}

void Simplex::pivot(int r, int j, const Eigen::VectorXd& alpha) {
  const double p = alpha(r);
  binv_.row(r) /= p;
  const Eigen::RowVectorXd pivot_row = binv_.row(r);
  Eigen::VectorXd a = alpha;
  a(r) = 0.0;
  binv_.noalias() -= a * pivot_row;
  head_[r] = j;
  state_[j] = VarState::Basic;
  if (++since_refactor_ >= std::max(opts_.refactor_every, m_ / 2)) refactor();
}

Simplex::Outcome Simplex::iterate(const std::vector<double>& cost) {
  const int ncols = static_cast<int>(lo_.size());
  bool bland = false;
  long degenerate = 0;
  std::mt19937_64 rng(opts_.seed);
  std::uniform_real_distribution<double> jitter(0.1, 1.0);
  Eigen::VectorXd cb(m_);
  while (true) {
    if (++iterations_ > max_iterations_) numerical_failure("iteration limit reached");
    for (int r = 0; r < m_; ++r) cb(r) = cost[head_[r]];
    const Eigen::VectorXd y = binv_.transpose() * cb;

    int enter = -1;
    double best = 0.0, enter_dir = 0.0;
    for (int j = 0; j < ncols; ++j) {
      const VarState s = state_[j];
      if (s == VarState::Basic || lo_[j] == hi_[j]) continue;
      const double d = cost[j] - column_dot(j, y);
      double dir = 0.0;
      if (d < -opts_.optimality_tol && (s == VarState::AtLower || s == VarState::FreeZero)) {
        dir = 1.0;
      } else if (d > opts_.optimality_tol &&
                 (s == VarState::AtUpper || s == VarState::FreeZero)) {
        dir = -1.0;
      }
      if (dir == 0.0) continue;
      if (bland) {
        enter = j;
        enter_dir = dir;
        break;
      }
      const double score =
          degenerate > opts_.degenerate_before_random ? std::abs(d) * jitter(rng) : std::abs(d);
      if (score > best) {
        best = score;
        enter = j;
        enter_dir = dir;
      }
    }
    if (enter < 0) return Outcome::Optimal;

    const Eigen::VectorXd alpha = column_times_binv(enter);
    const double ptol = opts_.pivot_tol * std::max(1.0, alpha.cwiseAbs().maxCoeff());
    // Harris two-pass ratio test.
    double relaxed = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha(i) * enter_dir;
      const int k = head_[i];
      if (a > ptol && std::isfinite(lo_[k])) {
        relaxed = std::min(relaxed, (x_[k] - lo_[k] + opts_.feasibility_tol) / a);
      } else if (a < -ptol && std::isfinite(hi_[k])) {
        relaxed = std::min(relaxed, (hi_[k] - x_[k] + opts_.feasibility_tol) / -a);
      }
    }
    if (bland) {
      // Exact minimum ratio; ties go to the smallest basic index.
      double min_lim = kInf;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i) * enter_dir;
        const int k = head_[i];
        if (a > ptol && std::isfinite(lo_[k])) {
          min_lim = std::min(min_lim, std::max(x_[k] - lo_[k], 0.0) / a);
        } else if (a < -ptol && std::isfinite(hi_[k])) {
          min_lim = std::min(min_lim, std::max(hi_[k] - x_[k], 0.0) / -a);
        }
      }
      relaxed = min_lim * (1.0 + 1e-12) + 1e-15;
    }
    int leave = -1;
    double theta = kInf, leave_mag = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha(i) * enter_dir;
      const int k = head_[i];
      double lim = kInf;
      if (a > ptol && std::isfinite(lo_[k])) {
        lim = (x_[k] - lo_[k]) / a;
      } else if (a < -ptol && std::isfinite(hi_[k])) {
        lim = (hi_[k] - x_[k]) / -a;
      }
      if (!std::isfinite(lim) || lim > relaxed) continue;
      const bool take = bland ? (leave < 0 || head_[i] < head_[leave])
                              : std::abs(a) > leave_mag;
      if (take) {
        leave = i;
        leave_mag = std::abs(a);
        theta = std::max(lim, 0.0);
      }
    }
    const double span = hi_[enter] - lo_[enter];
    const bool flip = std::isfinite(span) && span <= theta;
    if (flip) theta = span;
    if (!std::isfinite(theta)) return Outcome::Unbounded;

    if (theta <= 1e-12) {
      ++degenerate;
      if (allow_perturb_ && degenerate > opts_.degenerate_before_perturb &&
          perturb_degenerate()) {
        degenerate = 0;
        continue;
      }
      if (degenerate > opts_.degenerate_before_bland) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    x_[enter] += enter_dir * theta;
    if (theta != 0.0) {
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= theta * enter_dir * alpha(i);
    }
    if (flip) {
      state_[enter] = enter_dir > 0 ? VarState::AtUpper : VarState::AtLower;
      x_[enter] = enter_dir > 0 ? hi_[enter] : lo_[enter];
      continue;
    }
    const int k = head_[leave];
    const double a = alpha(leave) * enter_dir;
    if (a > 0) {
      x_[k] = lo_[k];
      state_[k] = VarState::AtLower;
    } else {
      x_[k] = hi_[k];
      state_[k] = VarState::AtUpper;
    }
    pivot(leave, enter, alpha);
  }
}

// Shifts the bounds of basic variables sitting on them outward by a small
// random amount so the ratio test becomes strictly positive.
bool Simplex::perturb_degenerate() {
  if (!perturbed_) {
    lo0_ = lo_;
    hi0_ = hi_;
    shifted_.assign(lo_.size(), 0);
    perturbed_ = true;
  }
  std::uniform_real_distribution<double> U(1.0, 10.0);
  bool any = false;
  for (int r = 0; r < m_; ++r) {
    const int k = head_[r];
    if (shifted_[k] || lo_[k] == hi_[k]) continue;
    if (std::isfinite(lo_[k]) && x_[k] - lo_[k] <= opts_.feasibility_tol) {
      lo_[k] -= opts_.perturbation * (1.0 + std::abs(lo_[k])) * U(perturb_rng_);
      shifted_[k] = 1;
    }
    if (std::isfinite(hi_[k]) && hi_[k] - x_[k] <= opts_.feasibility_tol) {
      hi_[k] += opts_.perturbation * (1.0 + std::abs(hi_[k])) * U(perturb_rng_);
      shifted_[k] = 1;
    }
    any = any || shifted_[k];
  }
  return any;
}

bool Simplex::remove_perturbation() {
  perturbed_ = false;
  const int ncols = static_cast<int>(lo_.size());
  for (int j = 0; j < ncols; ++j) {
    if (!shifted_[j]) continue;
    lo_[j] = lo0_[j];
    hi_[j] = hi0_[j];
    if (state_[j] == VarState::AtLower) x_[j] = lo_[j];
    if (state_[j] == VarState::AtUpper) x_[j] = hi_[j];
  }
  refactor();
  return repair();
}

// Minimizes the sum of bound violations of basic variables from the current
// basis. Returns false when no pivot reduces it.
bool Simplex::repair() {
  const int ncols = static_cast<int>(lo_.size());
  const double tol = opts_.feasibility_tol;
  while (true) {
    if (++iterations_ > max_iterations_) numerical_failure("iteration limit reached in repair");
    Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
    bool any = false;
    for (int r = 0; r < m_; ++r) {
      const int k = head_[r];
      if (x_[k] < lo_[k] - tol) cb(r) = -1.0;
      if (x_[k] > hi_[k] + tol) cb(r) = 1.0;
      any = any || cb(r) != 0.0;
    }
    if (!any) return true;
    const Eigen::VectorXd y = binv_.transpose() * cb;
    int enter = -1;
    double best = 0.0, dir = 0.0;
    for (int j = 0; j < ncols; ++j) {
      const VarState st = state_[j];
      if (st == VarState::Basic || lo_[j] == hi_[j]) continue;
      const double d = -column_dot(j, y);
      if (d < -opts_.optimality_tol && (st == VarState::AtLower || st == VarState::FreeZero) &&
          -d > best) {
        best = -d;
        enter = j;
        dir = 1.0;
      } else if (d > opts_.optimality_tol &&
                 (st == VarState::AtUpper || st == VarState::FreeZero) && d > best) {
        best = d;
        enter = j;
        dir = -1.0;
      }
    }
    if (enter < 0) return false;
    const Eigen::VectorXd alpha = column_times_binv(enter);
    const double ptol = opts_.pivot_tol * std::max(1.0, alpha.cwiseAbs().maxCoeff());
    int leave = -1;
    double theta = kInf, mag = 0.0;
    bool to_lower = false;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha(i) * dir;
      const int k = head_[i];
      double lim = kInf;
      bool lower = false;
      // Violators may pass through their bounds toward the far side.
      if (a > ptol && x_[k] >= lo_[k] - tol && std::isfinite(lo_[k])) {
        lim = std::max(x_[k] - lo_[k], 0.0) / a;
        lower = true;
      } else if (a < -ptol && x_[k] <= hi_[k] + tol && std::isfinite(hi_[k])) {
        lim = std::max(hi_[k] - x_[k], 0.0) / -a;
      }
      if (lim < theta - 1e-12 || (lim <= theta + 1e-12 && std::abs(a) > mag)) {
        theta = lim;
        leave = i;
        mag = std::abs(a);
        to_lower = lower;
      }
    }
    if (!std::isfinite(theta)) {
      // Nothing blocks: stop where the last violator becomes feasible.
      theta = 0.0;
      leave = -1;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i) * dir;
        const int k = head_[i];
        double brk = -1.0;
        if (a < -ptol && x_[k] < lo_[k] - tol) brk = (lo_[k] - x_[k]) / -a;
        if (a > ptol && x_[k] > hi_[k] + tol) brk = (x_[k] - hi_[k]) / a;
        if (brk > theta) {
          theta = brk;
          leave = i;
          to_lower = a < 0;
        }
      }
      if (leave < 0) return false;
    }
    const double span = hi_[enter] - lo_[enter];
    const bool flip = std::isfinite(span) && span <= theta;
    if (flip) theta = span;
    x_[enter] += dir * theta;
    for (int i = 0; i < m_; ++i) x_[head_[i]] -= theta * dir * alpha(i);
    if (flip) {
      state_[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
      x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
      continue;
    }
    const int k = head_[leave];
    x_[k] = to_lower ? lo_[k] : hi_[k];
    state_[k] = to_lower ? VarState::AtLower : VarState::AtUpper;
    pivot(leave, enter, alpha);
  }
}

Simplex::Outcome Simplex::solve_phase(const std::vector<double>& cost) {
  allow_perturb_ = true;
  for (int round = 0;; ++round) {
    const Outcome out = iterate(cost);
    if (!perturbed_) return out;
    if (!remove_perturbation()) numerical_failure("infeasible after removing bound perturbation");
    if (out == Outcome::Unbounded) return out;
    if (round >= 4) allow_perturb_ = false;
  }
}

void Simplex::drive_out_artificials() {
  const int ncols = static_cast<int>(lo_.size());
  for (int r = 0; r < m_; ++r) {
    if (!artificial_[head_[r]]) continue;
    int best = -1;
    double mag = 1e-7;
    for (int j = 0; j < ncols; ++j) {
      if (state_[j] == VarState::Basic || artificial_[j]) continue;
      double v = 0.0;
      for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) v += cval_[k] * binv_(r, crow_[k]);
      if (std::abs(v) > mag) {
        mag = std::abs(v);
        best = j;
      }
    }
    if (best < 0) continue;  // redundant row; the artificial stays basic at 0
    const int k = head_[r];
    const Eigen::VectorXd alpha = column_times_binv(best);
    state_[k] = VarState::AtLower;
    x_[k] = 0.0;
    pivot(r, best, alpha);
  }
}

LpSolution Simplex::run() {
  LpSolution sol;
  if (lo_.size() < static_cast<size_t>(n_struct_)) {
    sol.status = Status::Infeasible;
    return sol;
  }
  const int n_ub = static_cast<int>(lp_.ub.size());
  const int base_cols = static_cast<int>(lo_.size());
  x_.assign(base_cols, 0.0);
  state_.assign(base_cols, VarState::AtLower);
  for (int j = 0; j < n_struct_; ++j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      state_[j] = VarState::AtLower;
    } else if (std::isfinite(hi_[j])) {
      x_[j] = hi_[j];
      state_[j] = VarState::AtUpper;
    } else {
      x_[j] = 0.0;
      state_[j] = VarState::FreeZero;
    }
  }
  Eigen::VectorXd resid = b_;
  for (int j = 0; j < n_struct_; ++j) {
    if (x_[j] == 0.0) continue;
    for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) resid(crow_[k]) -= cval_[k] * x_[j];
  }
  head_.assign(m_, -1);
  std::vector<double> diag(m_, 1.0);
  bool need_phase1 = false;
  for (int i = 0; i < m_; ++i) {
    const int slack = n_struct_ + i;
    if (i < n_ub && resid(i) >= -opts_.feasibility_tol) {
      head_[i] = slack;
      state_[slack] = VarState::Basic;
      x_[slack] = resid(i);
      continue;
    }
    const double s = resid(i) >= 0.0 ? 1.0 : -1.0;
    add_column({{i, s}}, 0.0, kInf, 0.0, true);
    x_.push_back(std::abs(resid(i)));
    state_.push_back(VarState::Basic);
    head_[i] = static_cast<int>(lo_.size()) - 1;
    diag[i] = s;
    need_phase1 = true;
  }
  const int ncols = static_cast<int>(lo_.size());
  binv_ = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) binv_(i, i) = 1.0 / diag[i];
  max_iterations_ = opts_.max_iterations > 0 ? opts_.max_iterations
                                             : 50L * (m_ + ncols) + 20000;

  if (need_phase1) {
    std::vector<double> c1(ncols, 0.0);
    for (int j = 0; j < ncols; ++j) {
      if (artificial_[j]) c1[j] = 1.0;
    }
    solve_phase(c1);
    refactor();
    double infeas = 0.0;
    for (int j = 0; j < ncols; ++j) {
      if (artificial_[j]) infeas += std::abs(x_[j]);
    }
    const double scale = std::max(1.0, b_.cwiseAbs().maxCoeff());
    if (infeas > 1e-7 * scale) {
      sol.status = Status::Infeasible;
      sol.iterations = iterations_;
      return sol;
    }
    for (int j = 0; j < ncols; ++j) {
      if (artificial_[j]) {
        hi_[j] = 0.0;
        if (state_[j] != VarState::Basic) x_[j] = 0.0;
      }
    }
    drive_out_artificials();
    refactor();
  }

  std::vector<double> c2(ncols, 0.0);
  for (int j = 0; j < n_struct_; ++j) c2[j] = cost2_[j];
  const Outcome out = solve_phase(c2);
  sol.iterations = iterations_;
  if (out == Outcome::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }
  refactor();

  sol.status = Status::Optimal;
  sol.x.assign(x_.begin(), x_.begin() + n_struct_);
  Eigen::VectorXd cb(m_);
  for (int r = 0; r < m_; ++r) cb(r) = c2[head_[r]];
  const Eigen::VectorXd y = binv_.transpose() * cb;
  const double sgn = lp_.sense == Sense::Maximize ? -1.0 : 1.0;
  sol.ub_duals.resize(n_ub);
  sol.eq_duals.resize(lp_.eq.size());
  for (int i = 0; i < n_ub; ++i) sol.ub_duals[i] = sgn * y(i);
  for (size_t k = 0; k < lp_.eq.size(); ++k) sol.eq_duals[k] = sgn * y(n_ub + k);
  sol.reduced_costs.resize(n_struct_);
  for (int j = 0; j < n_struct_; ++j) {
    sol.reduced_costs[j] = sgn * (c2[j] - column_dot(j, y));
  }
  sol.objective = objective_value(lp_, sol.x);
  return sol;
}

LpSolution solve_direct(const StandardLp& lp, const SolverOptions& opts) {
  Simplex s(lp, opts);
  return s.run();
}

LpSolution solve_through_dual(const StandardLp& lp, const SolverOptions& opts) {
  const Dualized<double> d = dualize(lp);
  SolverOptions inner = opts;
  inner.allow_dual_route = false;
  const LpSolution ds = solve_direct(d.lp, inner);
  if (ds.status == Status::Infeasible) return solve_direct(lp, inner);
  LpSolution sol;
  sol.via_dual = true;
  sol.iterations = ds.iterations;
  if (ds.status == Status::Unbounded) {
    sol.status = Status::Infeasible;
    return sol;
  }
  sol.status = Status::Optimal;
  const int n = lp.num_vars();
  sol.x.resize(n);
  for (int j = 0; j < n; ++j) {
    const double pi = d.var_row_is_eq[j] ? ds.eq_duals[d.var_row[j]]
                                         : ds.ub_duals[d.var_row[j]];
    sol.x[j] = d.var_row_sign[j] * pi;
  }
  sol.ub_duals.resize(lp.ub.size());
  sol.eq_duals.resize(lp.eq.size());
  for (size_t i = 0; i < lp.ub.size(); ++i) sol.ub_duals[i] = ds.x[d.ub_var[i]];
  for (size_t i = 0; i < lp.eq.size(); ++i) sol.eq_duals[i] = ds.x[d.eq_var[i]];
  sol.reduced_costs.assign(lp.cost.begin(), lp.cost.end());
  for (size_t i = 0; i < lp.ub.size(); ++i) {
    for (const auto& [j, a] : lp.ub[i].terms) sol.reduced_costs[j] -= a * sol.ub_duals[i];
  }
  for (size_t i = 0; i < lp.eq.size(); ++i) {
    for (const auto& [j, a] : lp.eq[i].terms) sol.reduced_costs[j] -= a * sol.eq_duals[i];
  }
  sol.objective = objective_value(lp, sol.x);
  return sol;
}

}  // namespace

LpSolution solve_lp(const StandardLp& lp, const SolverOptions& opts) {
  const int rows = lp.num_rows();
  const int vars = lp.num_vars();
  if (opts.allow_dual_route && rows > 200 && rows > 3 * vars) {
    spdlog::debug("solving {}x{} LP through its dual", rows, vars);
    return solve_through_dual(lp, opts);
  }
  return solve_direct(lp, opts);
}

}  // namespace safe_field::lp
