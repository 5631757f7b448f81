#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "sfa/config.hpp"
#include "sfa/errors.hpp"
#include "sfa/experiments/experiments.hpp"
#include "sfa/json_io.hpp"

namespace sfa {

namespace {

std::vector<double> positive_grid(const nlohmann::json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const Vector v = vector_from_json(j.at(key), key);
  if (v.size() == 0) throw ConfigError(std::string(key) + ": empty grid");
  std::vector<double> out(v.data(), v.data() + v.size());
  for (double x : out) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(key) + ": grid values must be positive");
  }
  return out;
}

}  // namespace

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  SweepSpec spec;
  spec.nu = positive_grid(j, "nu", spec.nu);
  spec.eta = positive_grid(j, "eta", spec.eta);
  spec.omega_max = positive_grid(j, "omega_max", spec.omega_max);
  return spec;
}

Matrix chain_p0() {
  Matrix p(3, 3);
  p << 2.8106, 1.6583, 1.0143, 1.6583, 4.4629, 1.4071, 1.0143, 1.4071, 2.3453;
  return p;
}

TransitionData chain_transition(double nu, double eta, double omega_max) {
  if (!(nu > 0) || !(eta > 0) || !(omega_max >= 0)) throw ContractError("chain_transition: bad parameters");
  Matrix Ac(3, 3);
  Ac << 0, 1, 0, 0, 0, 1, 1, -1, -1;
  Matrix Bc(3, 1);
  Bc << 0, 0, 1;
  const DiscreteModel dm = discretize(Ac, Bc, 0.5);
  TransitionData d;
  d.mode = AffineMode{dm.A, dm.B, Vector::Zero(3)};
  const Matrix P = chain_p0() / nu;
  Vector c_plus(3);
  c_plus << 0.1, 0.5, 1.9;
  d.source = Ellipsoid{P, Vector::Zero(3)};
  d.target = Ellipsoid{eta * P, c_plus};
  d.noise_vertices = box_vertices(Box::symmetric(Vector::Constant(3, omega_max)));
  d.input_rows = input_box_to_ellipsoid_rows(Box::symmetric(Vector::Constant(1, 10.0)));
  return d;
}

CostModel chain_cost() {
  Matrix q = Matrix::Zero(5, 5);
  q.topLeftCorner(4, 4).setIdentity();
  return CostModel::from_matrix(q);
}

TransitionProblem transition_problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("transition: expected an object");
  const auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ConfigError(std::string("transition: missing '") + key + "'");
    return j.at(key);
  };
  Matrix A, B;
  if (j.contains("Ac")) {
    double T = 0;
    try {
      T = need("T").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("transition: T: ") + e.what());
    }
    if (!(T > 0)) throw ConfigError("transition: T must be positive");
    const Matrix Ac = matrix_from_json(j.at("Ac"), "Ac");
    const Matrix Bc = matrix_from_json(need("Bc"), "Bc");
    if (Ac.rows() != Ac.cols() || Bc.rows() != Ac.rows()) throw ConfigError("transition: Ac/Bc shape mismatch");
    const DiscreteModel dm = discretize(Ac, Bc, T);
    A = dm.A;
    B = dm.B;
  } else {
    A = matrix_from_json(need("A"), "A");
    B = matrix_from_json(need("B"), "B");
  }
  const Vector g = j.contains("g") ? vector_from_json(j.at("g"), "g") : Vector::Zero(A.rows());
  TransitionData d;
  d.mode = AffineMode{A, B, g};
  d.source = ellipsoid_from_json(need("source"));
  d.target = ellipsoid_from_json(need("target"));
  const Box input = box_from_json(need("input_box"), "input_box");
  const Box noise = box_from_json(need("noise_box"), "noise_box");
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || g.size() != n || d.source.c.size() != n || d.target.c.size() != n ||
      noise.dim() != n || input.dim() != B.cols())
    throw ConfigError("transition: dimension mismatch");
  d.noise_vertices = box_vertices(noise);
  d.input_rows = input_box_to_ellipsoid_rows(input);
  return TransitionProblem{std::move(d), cost_from_json(j)};
}

std::vector<SweepRow> run_single_transition_sweep(const SweepSpec& spec, const AuditOptions& audit) {
  const CostModel cost = chain_cost();
  std::vector<SweepRow> rows;
  for (double nu : spec.nu) {
    for (double eta : spec.eta) {
      for (double om : spec.omega_max) {
        SweepRow row;
        row.nu = nu;
        row.eta = eta;
        row.omega_max = om;
        row.cost_bound = std::numeric_limits<double>::infinity();
        row.spectral_radius = std::numeric_limits<double>::quiet_NaN();
        const TransitionData data = chain_transition(nu, eta, om);
        const auto t0 = std::chrono::steady_clock::now();
        SynthesisResult res;
        try {
          res = synthesize_transition(data, cost);
        } catch (const Error& e) {
          res.status = sdp::SdpStatus::NumericalFailure;
          res.diagnostics.message = e.what();
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.status = res.status;
        row.message = res.diagnostics.message;
        if (res.controller) {
          row.cost_bound = res.controller->cost_bound;
          row.spectral_radius = closed_loop_spectral_radius(data.mode, res.controller->K);
          const AuditReport rep = audit_transition(*res.controller, data, cost, audit);
          row.audit_passed = rep.passed;
          if (!rep.passed) row.message = "audit failed: " + rep.failure;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t;
  t.header = {"nu", "eta", "omega_max", "status", "feasible", "cost_bound", "spectral_radius", "audit_passed",
              "solve_seconds"};
  for (const SweepRow& r : rows) {
    t.rows.push_back({format_number(r.nu), format_number(r.eta), format_number(r.omega_max), sdp::to_string(r.status),
                      r.feasible() ? "1" : "0", format_number(r.cost_bound), format_number(r.spectral_radius),
                      r.audit_passed ? "1" : "0", format_number(r.seconds)});
  }
  return t;
}

SweepTrends check_sweep_trends(const SweepSpec& spec, const std::vector<SweepRow>& rows, double tol) {
  SweepTrends tr;
  std::map<std::tuple<double, double, double>, const SweepRow*> at;
  for (const SweepRow& r : rows) at[{r.nu, r.eta, r.omega_max}] = &r;
  const auto row = [&](double nu, double eta, double om) -> const SweepRow& {
    const auto it = at.find({nu, eta, om});
    if (it == at.end()) throw ContractError("check_sweep_trends: missing grid point");
    return *it->second;
  };
  const auto note = [&](bool& flag, const std::string& what, const SweepRow& a, const SweepRow& b) {
    flag = false;
    std::ostringstream os;
    os << what << ": (" << a.nu << ", " << a.eta << ", " << a.omega_max << ") -> " << format_number(a.cost_bound)
       << " but (" << b.nu << ", " << b.eta << ", " << b.omega_max << ") -> " << format_number(b.cost_bound);
    tr.failures.push_back(os.str());
  };

  // Infeasible points count as +inf, so feasible after infeasible breaks monotonicity.
  for (double eta : spec.eta) {
    for (double om : spec.omega_max) {
      for (std::size_t i = 1; i < spec.nu.size(); ++i) {
        const SweepRow& a = row(spec.nu[i - 1], eta, om);
        const SweepRow& b = row(spec.nu[i], eta, om);
        if (b.cost_bound < a.cost_bound - tol * std::max(1.0, std::abs(a.cost_bound)))
          note(tr.monotone_in_nu, "cost decreases in nu", a, b);
      }
    }
  }
  for (double nu : spec.nu) {
    for (double om : spec.omega_max) {
      for (std::size_t i = 1; i < spec.eta.size(); ++i) {
        const SweepRow& a = row(nu, spec.eta[i - 1], om);
        const SweepRow& b = row(nu, spec.eta[i], om);
        if (b.cost_bound < a.cost_bound - tol * std::max(1.0, std::abs(a.cost_bound)))
          note(tr.monotone_in_eta, "cost decreases in eta", a, b);
      }
    }
  }
  const double eta0 = *std::min_element(spec.eta.begin(), spec.eta.end());
  const double lo = *std::min_element(spec.omega_max.begin(), spec.omega_max.end());
  const double hi = *std::max_element(spec.omega_max.begin(), spec.omega_max.end());
  for (double nu : spec.nu) {
    const SweepRow& a = row(nu, eta0, lo);
    const SweepRow& b = row(nu, eta0, hi);
    if (!a.feasible() || !b.feasible()) {
      tr.spectrum_shrinks = false;
      tr.failures.push_back("spectral radius trend: infeasible point at nu = " + format_number(nu));
    } else if (b.spectral_radius > a.spectral_radius + tol) {
      tr.spectrum_shrinks = false;
      tr.failures.push_back("spectral radius grows with noise at nu = " + format_number(nu) + ": " +
                            format_number(a.spectral_radius) + " -> " + format_number(b.spectral_radius));
    }
  }
  return tr;
}

}  // namespace sfa
