#include "sfa/lmi/transition.hpp"

#include <algorithm>
#include <cmath>

#include "sfa/errors.hpp"
#include "sfa/json_io.hpp"

namespace sfa {

namespace {

// Adds v at (i, j) and (j, i); a diagonal entry receives v once.
void add_sym(Matrix& M, Eigen::Index i, Eigen::Index j, double v) {
  M(i, j) += v;
  if (i != j) M(j, i) += v;
}

void check_data(const TransitionData& d) {
  const Eigen::Index nx = d.mode.state_dim();
  const Eigen::Index nu = d.mode.input_dim();
  if (d.mode.A.cols() != nx || d.mode.B.rows() != nx || d.mode.g.size() != nx) {
    throw ContractError("transition data: inconsistent mode dimensions");
  }
  validate_ellipsoid(d.source, "source ellipsoid");
  validate_ellipsoid(d.target, "target ellipsoid");
  if (d.source.dim() != nx || d.target.dim() != nx) throw ContractError("transition data: ellipsoid dimension mismatch");
  if (d.noise_vertices.empty()) throw ContractError("transition data: at least one noise vertex is required");
  for (const Vector& w : d.noise_vertices) {
    if (w.size() != nx) throw ContractError("transition data: noise vertex dimension mismatch");
  }
  for (const Matrix& U : d.input_rows) {
    if (U.cols() != nu || U.rows() < 1) throw ContractError("transition data: input row dimension mismatch");
  }
}

}  // namespace

double Ellipsoid::membership(const Vector& x) const {
  if (x.size() != c.size()) throw ContractError("Ellipsoid::membership: dimension mismatch");
  const Vector d = x - c;
  return d.dot(P * d);
}

Ellipsoid Ellipsoid::ball(const Vector& center, double radius) {
  if (!(radius > 0.0)) throw ContractError("Ellipsoid::ball: radius must be positive");
  const auto n = center.size();
  return Ellipsoid{Matrix::Identity(n, n) / (radius * radius), center};
}

void validate_ellipsoid(const Ellipsoid& e, const char* what) {
  if (e.P.rows() != e.c.size() || e.P.cols() != e.c.size()) {
    throw ContractError(std::string(what) + ": P and c dimensions differ");
  }
  require_symmetric(e.P, what);
  if (!(min_eigenvalue(e.P) > 0.0)) throw ContractError(std::string(what) + ": P is not positive definite");
}

std::vector<std::string> VariableLayout::names() const {
  std::vector<std::string> out(count());
  for (std::size_t b = 0; b < nx; ++b) {
    for (std::size_t a = 0; a < nu; ++a) out[K(a, b)] = "K" + std::to_string(a) + "_" + std::to_string(b);
  }
  for (std::size_t a = 0; a < nu; ++a) out[l(a)] = "l" + std::to_string(a);
  for (std::size_t i = 0; i < n_noise; ++i) out[beta(i)] = "beta" + std::to_string(i);
  for (std::size_t i = 0; i < n_rows; ++i) out[tau(i)] = "tau" + std::to_string(i);
  if (with_cost) {
    out[gamma()] = "gamma";
    out[J()] = "J";
  }
  return out;
}

VariableLayout layout_for(const TransitionData& data, bool with_cost) {
  VariableLayout v;
  v.nx = static_cast<std::size_t>(data.mode.state_dim());
  v.nu = static_cast<std::size_t>(data.mode.input_dim());
  v.n_noise = data.noise_vertices.size();
  v.n_rows = data.input_rows.size();
  v.with_cost = with_cost;
  return v;
}

sdp::LinearSdp assemble_transition_lmis(const TransitionData& data, bool with_cost_vars) {
  check_data(data);
  const VariableLayout v = layout_for(data, with_cost_vars);
  const auto nx = static_cast<Eigen::Index>(v.nx);
  const auto nu = static_cast<Eigen::Index>(v.nu);
  const Eigen::Index one = nx;
  const AffineMode& m = data.mode;
  const Matrix& P = data.source.P;
  const Matrix Pinv_target = spd_inverse(data.target.P, kMaxTargetCondition);

  sdp::LinearSdp sdp(v.count());
  sdp.var_names = v.names();

  const Vector drift = m.g + m.A * data.source.c - data.target.c;
  for (std::size_t i = 0; i < v.n_noise; ++i) {
    const Eigen::Index dim = 2 * nx + 1;
    Matrix F0 = Matrix::Zero(dim, dim);
    F0(one, one) = 1.0;
    F0.bottomRightCorner(nx, nx) = Pinv_target;
    const Vector mu0 = drift + data.noise_vertices[i];
    for (Eigen::Index r = 0; r < nx; ++r) {
      for (Eigen::Index b = 0; b < nx; ++b) add_sym(F0, nx + 1 + r, b, m.A(r, b));
      add_sym(F0, nx + 1 + r, one, mu0(r));
    }
    const std::size_t blk = sdp.add_block(std::move(F0), "containment[" + std::to_string(i) + "]");
    for (Eigen::Index a = 0; a < nu; ++a) {
      for (Eigen::Index b = 0; b < nx; ++b) {
        Matrix& F = sdp.coefficient(blk, v.K(a, b));
        for (Eigen::Index r = 0; r < nx; ++r) add_sym(F, nx + 1 + r, b, m.B(r, a));
      }
      Matrix& Fl = sdp.coefficient(blk, v.l(a));
      for (Eigen::Index r = 0; r < nx; ++r) add_sym(Fl, nx + 1 + r, one, m.B(r, a));
    }
    Matrix& Fb = sdp.coefficient(blk, v.beta(i));
    Fb.topLeftCorner(nx, nx) = P;
    Fb(one, one) = -1.0;
  }

  for (std::size_t i = 0; i < v.n_rows; ++i) {
    const Matrix& U = data.input_rows[i];
    const Eigen::Index q = U.rows();
    const Eigen::Index dim = nx + 1 + q;
    Matrix F0 = Matrix::Zero(dim, dim);
    F0(one, one) = 1.0;
    F0.bottomRightCorner(q, q).setIdentity();
    const std::size_t blk = sdp.add_block(std::move(F0), "input[" + std::to_string(i) + "]");
    for (Eigen::Index a = 0; a < nu; ++a) {
      for (Eigen::Index b = 0; b < nx; ++b) {
        Matrix& F = sdp.coefficient(blk, v.K(a, b));
        for (Eigen::Index r = 0; r < q; ++r) add_sym(F, nx + 1 + r, b, U(r, a));
      }
      Matrix& Fl = sdp.coefficient(blk, v.l(a));
      for (Eigen::Index r = 0; r < q; ++r) add_sym(Fl, nx + 1 + r, one, U(r, a));
    }
    Matrix& Ft = sdp.coefficient(blk, v.tau(i));
    Ft.topLeftCorner(nx, nx) = P;
    Ft(one, one) = -1.0;
  }

  for (std::size_t i = 0; i < v.n_noise; ++i) sdp.add_nonnegative(v.beta(i), "beta[" + std::to_string(i) + "]>=0");
  for (std::size_t i = 0; i < v.n_rows; ++i) sdp.add_nonnegative(v.tau(i), "tau[" + std::to_string(i) + "]>=0");
  return sdp;
}

sdp::SdpBlock assemble_cost_lmi(const CostModel& cost, const Ellipsoid& source, const VariableLayout& v) {
  const auto nx = static_cast<Eigen::Index>(v.nx);
  const auto nu = static_cast<Eigen::Index>(v.nu);
  if (!v.with_cost) throw ContractError("assemble_cost_lmi: layout has no cost variables");
  if (cost.L.cols() != nx + nu + 1) throw ContractError("assemble_cost_lmi: cost factor has the wrong width");
  if (source.dim() != nx) throw ContractError("assemble_cost_lmi: source dimension mismatch");
  const Eigen::Index p = cost.L.rows();
  const Eigen::Index one = nx;
  const Eigen::Index dim = nx + 1 + p;
  const Matrix Lx = cost.L.leftCols(nx);
  const Matrix Lu = cost.L.middleCols(nx, nu);
  const Vector Lc = Lx * source.c + cost.L.col(nx + nu);

  sdp::SdpBlock blk;
  blk.label = "cost";
  blk.F0 = Matrix::Zero(dim, dim);
  blk.F0.bottomRightCorner(p, p).setIdentity();
  for (Eigen::Index r = 0; r < p; ++r) {
    for (Eigen::Index s = 0; s < nx; ++s) add_sym(blk.F0, nx + 1 + r, s, Lx(r, s));
    add_sym(blk.F0, nx + 1 + r, one, Lc(r));
  }
  blk.F.assign(v.count(), Matrix::Zero(dim, dim));
  for (Eigen::Index a = 0; a < nu; ++a) {
    for (Eigen::Index b = 0; b < nx; ++b) {
      for (Eigen::Index r = 0; r < p; ++r) add_sym(blk.F[v.K(a, b)], nx + 1 + r, b, Lu(r, a));
    }
    for (Eigen::Index r = 0; r < p; ++r) add_sym(blk.F[v.l(a)], nx + 1 + r, one, Lu(r, a));
  }
  blk.F[v.gamma()].topLeftCorner(nx, nx) = source.P;
  blk.F[v.gamma()](one, one) = -1.0;
  blk.F[v.J()](one, one) = 1.0;
  return blk;
}

sdp::LinearSdp assemble_cost_program(const TransitionData& data, const CostModel& cost) {
  sdp::LinearSdp sdp = assemble_transition_lmis(data, true);
  const VariableLayout v = layout_for(data, true);
  sdp.blocks.push_back(assemble_cost_lmi(cost, data.source, v));
  sdp.add_nonnegative(v.gamma(), "gamma>=0");
  sdp.objective = Vector::Zero(static_cast<Eigen::Index>(v.count()));
  sdp.objective(static_cast<Eigen::Index>(v.J())) = 1.0;
  return sdp;
}

SynthesisResult synthesize_transition(const TransitionData& data, const CostModel& cost,
                                      const sdp::SdpTolerances& tol) {
  SynthesisResult res;
  auto& diag = res.diagnostics;

  const sdp::LinearSdp feas = assemble_transition_lmis(data, false);
  const sdp::FeasibilityMargin margin = sdp::feasibility_margin(feas, tol);
  diag.phase1_margin = margin.margin;
  diag.phase1_iterations = margin.iterations;
  if (margin.status != sdp::SdpStatus::Optimal) {
    res.status = sdp::SdpStatus::NumericalFailure;
    diag.message = "phase-1: " + margin.message;
    return res;
  }
  if (margin.margin < -tol.infeasible_margin) {
    res.status = sdp::SdpStatus::Infeasible;
    diag.message = "phase-1 margin is negative";
    return res;
  }

  const sdp::LinearSdp prog = assemble_cost_program(data, cost);
  const sdp::SdpSolution sol = sdp::solve(prog, tol);
  diag.iterations = sol.iterations;
  diag.min_eig_slack = sol.min_eig_slack;
  diag.duality_gap = sol.duality_gap;
  diag.message = sol.message;
  res.status = sol.status;
  if (sol.status != sdp::SdpStatus::Optimal) return res;

  const VariableLayout v = layout_for(data, true);
  const auto at = [&](std::size_t k) { return sol.y(static_cast<Eigen::Index>(k)); };
  TransitionController ctrl;
  ctrl.K.resize(static_cast<Eigen::Index>(v.nu), static_cast<Eigen::Index>(v.nx));
  for (std::size_t a = 0; a < v.nu; ++a) {
    for (std::size_t b = 0; b < v.nx; ++b) ctrl.K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = at(v.K(a, b));
  }
  ctrl.l.resize(static_cast<Eigen::Index>(v.nu));
  for (std::size_t a = 0; a < v.nu; ++a) ctrl.l(static_cast<Eigen::Index>(a)) = at(v.l(a));
  ctrl.c = data.source.c;

  const auto multiplier = [&](std::size_t k, const std::string& name) {
    const double val = at(k);
    if (val < 1e-7) diag.boundary_multipliers.push_back(name);
    return std::max(0.0, val);
  };
  ctrl.beta.resize(static_cast<Eigen::Index>(v.n_noise));
  for (std::size_t i = 0; i < v.n_noise; ++i) {
    ctrl.beta(static_cast<Eigen::Index>(i)) = multiplier(v.beta(i), "beta" + std::to_string(i));
  }
  ctrl.tau.resize(static_cast<Eigen::Index>(v.n_rows));
  for (std::size_t i = 0; i < v.n_rows; ++i) {
    ctrl.tau(static_cast<Eigen::Index>(i)) = multiplier(v.tau(i), "tau" + std::to_string(i));
  }
  ctrl.gamma = multiplier(v.gamma(), "gamma");
  ctrl.cost_bound = std::max(0.0, at(v.J()));
  ctrl.diagnostics = diag;
  res.controller = std::move(ctrl);
  return res;
}

double closed_loop_spectral_radius(const AffineMode& mode, const Matrix& K) {
  if (K.rows() != mode.input_dim() || K.cols() != mode.state_dim()) {
    throw ContractError("closed_loop_spectral_radius: K has the wrong shape");
  }
  return spectral_radius(mode.A + mode.B * K);
}

nlohmann::json ellipsoid_to_json(const Ellipsoid& e) {
  return {{"P", matrix_to_json(e.P)}, {"c", vector_to_json(e.c)}};
}

Ellipsoid ellipsoid_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("P") || !j.contains("c")) throw ConfigError("ellipsoid: expected {P, c}");
  Ellipsoid e{matrix_from_json(j.at("P"), "ellipsoid.P"), vector_from_json(j.at("c"), "ellipsoid.c")};
  try {
    validate_ellipsoid(e, "ellipsoid");
  } catch (const ContractError& err) {
    throw ConfigError(err.what());
  }
  return e;
}

nlohmann::json controller_to_json(const TransitionController& ctrl) {
  const auto& d = ctrl.diagnostics;
  return {
      {"K", matrix_to_json(ctrl.K)},
      {"l", vector_to_json(ctrl.l)},
      {"c", vector_to_json(ctrl.c)},
      {"cost_bound", ctrl.cost_bound},
      {"beta", vector_to_json(ctrl.beta)},
      {"tau", vector_to_json(ctrl.tau)},
      {"gamma", ctrl.gamma},
      {"diagnostics",
       {{"phase1_margin", d.phase1_margin},
        {"phase1_iterations", d.phase1_iterations},
        {"iterations", d.iterations},
        {"min_eig_slack", d.min_eig_slack},
        {"duality_gap", d.duality_gap},
        {"boundary_multipliers", d.boundary_multipliers},
        {"message", d.message}}},
  };
}

TransitionController controller_from_json(const nlohmann::json& j) {
  try {
    TransitionController c;
    c.K = matrix_from_json(j.at("K"), "K");
    c.l = vector_from_json(j.at("l"), "l");
    c.c = vector_from_json(j.at("c"), "c");
    c.cost_bound = j.at("cost_bound").get<double>();
    c.beta = vector_from_json(j.at("beta"), "beta");
    c.tau = vector_from_json(j.at("tau"), "tau");
    c.gamma = j.at("gamma").get<double>();
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      c.diagnostics.phase1_margin = d.value("phase1_margin", 0.0);
      c.diagnostics.phase1_iterations = d.value("phase1_iterations", 0);
      c.diagnostics.iterations = d.value("iterations", 0);
      c.diagnostics.min_eig_slack = d.value("min_eig_slack", 0.0);
      c.diagnostics.duality_gap = d.value("duality_gap", 0.0);
      c.diagnostics.boundary_multipliers = d.value("boundary_multipliers", std::vector<std::string>{});
      c.diagnostics.message = d.value("message", std::string{});
    }
    if (c.K.rows() != c.l.size() || c.K.cols() != c.c.size()) throw ConfigError("controller: K, l, c shapes disagree");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }
}

}  // namespace sfa
