#include "cbf/ledger.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "cbf/exceptions.hpp"
#include "cbf/norms.hpp"

namespace cbf {

namespace {

constexpr Real kMonotoneTolFactor = 1e-8;
constexpr Real kGronwallBoundTol = 1e-6;
constexpr Real kGronwallDiffTol = 1e-6;

// Integral of the cubic Hermite interpolant of (value, rate) samples.
Real hermite_increment(Real dt, Real v0, Real r0, Real v1, Real r1) {
  return dt / 2 * (v0 + v1) + dt * dt / 12 * (r0 - r1);
}

// Derivative at t[i] of the quadratic through three (t, f) samples; handles
// nonuniform spacing and the one-sided end stencils.
Real quadratic_derivative(const std::vector<LedgerRow>& rows, std::size_t i) {
  const std::size_t n = rows.size();
  const std::size_t m = i == 0 ? 1 : (i == n - 1 ? n - 2 : i);
  const Real t0 = rows[m - 1].t, t1 = rows[m].t, t2 = rows[m + 1].t;
  const Real f0 = rows[m - 1].G, f1 = rows[m].G, f2 = rows[m + 1].G;
  const Real t = rows[i].t;
  return f0 * (2 * t - t1 - t2) / ((t0 - t1) * (t0 - t2)) +
         f1 * (2 * t - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
         f2 * (2 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
}

} // namespace

EnergyLedger::EnergyLedger(const ModelParams& p) : p_(p) { validate(p_); }

Real EnergyLedger::reference_energy() const {
  if (!have_ref_) throw LedgerError("ledger has no reference energy yet");
  return e_ref_;
}

const LedgerRow& EnergyLedger::record(const SpectralField& u,
                                      const SpectralField& dudt, Real t) {
  if (have_prev_ && !(t > t_prev_))
    throw LedgerError("ledger samples must have strictly increasing times");

  const Real energy = l2_norm_sq(u);
  const Real grad_sq = gradient_norm_sq(u);
  const Real g = 2 * p_.mu * grad_sq;
  const Real gdot = 4 * p_.mu * inner_grad(u, dudt);
  Real a = 0, adot = 0;
  if (p_.beta > 0) {
    const LpPowPair pair = lp_norm_pow_with_rate(u, dudt, p_.r + 1);
    a = 2 * p_.beta * pair.value;
    adot = 2 * p_.beta * pair.rate;
  }
  Real d = 0, ddot = 0;
  if (p_.alpha > 0) {
    d = 2 * p_.alpha * energy;
    ddot = 4 * p_.alpha * inner_l2(u, dudt);
  }

  if (have_prev_) {
    const Real dt = t - t_prev_;
    diss_ += hermite_increment(dt, g_prev_, gdot_prev_, g, gdot);
    absn_ += hermite_increment(dt, a_prev_, adot_prev_, a, adot);
    darcy_ += hermite_increment(dt, d_prev_, ddot_prev_, d, ddot);
  }
  if (!have_ref_) {
    e_ref_ = energy;
    have_ref_ = true;
  }

  t_prev_ = t;
  g_prev_ = g;
  gdot_prev_ = gdot;
  a_prev_ = a;
  adot_prev_ = adot;
  d_prev_ = d;
  ddot_prev_ = ddot;
  have_prev_ = true;

  LedgerRow row;
  row.t = t;
  row.E = energy;
  row.D = diss_;
  row.A = absn_;
  row.G = grad_sq;
  row.R = std::abs(energy + diss_ + absn_ - e_ref_);
  rows_.push_back(row);
  return rows_.back();
}

void EnergyLedger::seed(const SpectralField& u, const SpectralField& dudt,
                        Real t, Real dissipation_cum, Real absorption_cum,
                        Real reference_energy) {
  if (have_prev_ || !rows_.empty())
    throw LedgerError("ledger can only be seeded before the first record");

  diss_ = dissipation_cum;
  absn_ = absorption_cum;
  e_ref_ = reference_energy;
  have_ref_ = true;

  const Real energy = l2_norm_sq(u);
  t_prev_ = t;
  g_prev_ = 2 * p_.mu * gradient_norm_sq(u);
  gdot_prev_ = 4 * p_.mu * inner_grad(u, dudt);
  a_prev_ = 0;
  adot_prev_ = 0;
  if (p_.beta > 0) {
    const LpPowPair pair = lp_norm_pow_with_rate(u, dudt, p_.r + 1);
    a_prev_ = 2 * p_.beta * pair.value;
    adot_prev_ = 2 * p_.beta * pair.rate;
  }
  d_prev_ = 0;
  ddot_prev_ = 0;
  if (p_.alpha > 0) {
    d_prev_ = 2 * p_.alpha * energy;
    ddot_prev_ = 4 * p_.alpha * inner_l2(u, dudt);
  }
  have_prev_ = true;
}

Observer EnergyLedger::observer() {
  return [this](const Sample& s) { record(s.u, s.dudt, s.t); };
}

// --- NDJSON ------------------------------------------------------------------

void append_ndjson(std::ostream& os, const LedgerRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"t\":%.17g,\"E\":%.17g,\"D\":%.17g,\"A\":%.17g,"
                "\"G\":%.17g,\"R\":%.17g}\n",
                row.t, row.E, row.D, row.A, row.G, row.R);
  os << buf;
}

void write_ndjson(const std::string& path,
                  const std::vector<LedgerRow>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw LedgerError("cannot open ledger file for writing: " + path);
  for (const LedgerRow& r : rows) append_ndjson(os, r);
  if (!os) throw LedgerError("short write to ledger file: " + path);
}

std::vector<LedgerRow> read_ndjson(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LedgerError("cannot open ledger file: " + path);
  std::vector<LedgerRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": bad ledger row: " << e.what();
      throw LedgerError(msg.str());
    }
    for (const char* key : {"t", "E", "D", "A", "G", "R"})
      if (!j.contains(key) || !j[key].is_number()) {
        std::ostringstream msg;
        msg << path << ":" << lineno << ": ledger row misses numeric key "
            << key;
        throw LedgerError(msg.str());
      }
    LedgerRow r;
    r.t = j["t"].get<Real>();
    r.E = j["E"].get<Real>();
    r.D = j["D"].get<Real>();
    r.A = j["A"].get<Real>();
    r.G = j["G"].get<Real>();
    r.R = j["R"].get<Real>();
    rows.push_back(r);
  }
  return rows;
}

// --- Monitors ------------------------------------------------------------------

MonotonicityReport monotonicity_monitor(const std::vector<LedgerRow>& rows,
                                        const ModelParams& p) {
  if (p.r != 3)
    throw LedgerError("gradient-monotonicity monitor applies to r = 3 only");

  MonotonicityReport rep;
  rep.assertion_active = 4 * p.mu * p.beta >= 1;

  Real max_g = 0;
  for (const LedgerRow& r : rows) max_g = std::max(max_g, r.G);
  rep.tolerance = kMonotoneTolFactor * max_g;

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Real inc = rows[i].G - rows[i - 1].G;
    rep.max_increase = std::max(rep.max_increase, inc);
    if (inc > rep.tolerance) ++rep.violations;
  }
  rep.passed = !rep.assertion_active || rep.violations == 0;
  return rep;
}

Real gronwall_constant(const ModelParams& p) {
  if (!(p.r > 3))
    throw LedgerError("exponential a priori bound needs r > 3");
  const Real base = 2 / (p.beta * p.mu * (p.r - 1));
  return std::pow(base, 2 / (p.r - 3)) * (p.r - 3) / (p.r - 1);
}

GronwallReport gronwall_monitor(const std::vector<LedgerRow>& rows,
                                const std::vector<RegularitySample>& trace,
                                const ModelParams& p) {
  GronwallReport rep;
  rep.c = gronwall_constant(p);
  if (rows.empty()) return rep;

  if (!trace.empty() && trace.size() != rows.size())
    throw LedgerError("regularity trace does not align with the ledger rows");

  const Real g0 = rows.front().G;
  const Real t0 = rows.front().t;
  for (const LedgerRow& r : rows) {
    const Real envelope = g0 * std::exp(rep.c * (r.t - t0) / p.mu);
    if (r.G > envelope * (1 + kGronwallBoundTol)) rep.bound_passed = false;
    if (envelope > 0)
      rep.bound_max_ratio = std::max(rep.bound_max_ratio, r.G / envelope);
    else if (r.G > 0)
      rep.bound_passed = false;
  }

  if (!trace.empty() && rows.size() >= 3) {
    rep.diff_max_excess = -std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::abs(trace[i].t - rows[i].t) >
          1e-12 * std::max(Real(1), std::abs(rows[i].t)))
        throw LedgerError("regularity trace does not align with the ledger rows");
      const Real dgdt = quadratic_derivative(rows, i);
      const Real lhs = dgdt + p.mu * trace[i].lap_sq +
                       p.beta * trace[i].weighted_dirichlet;
      const Real rhs = rep.c / p.mu * rows[i].G;
      const Real scale = std::abs(dgdt) + p.mu * trace[i].lap_sq +
                         p.beta * trace[i].weighted_dirichlet +
                         rep.c / p.mu * rows[i].G;
      const Real excess = (lhs - rhs) / std::max(scale, Real(1e-300));
      rep.diff_max_excess = std::max(rep.diff_max_excess, excess);
      if (excess > kGronwallDiffTol) rep.diff_passed = false;
    }
  }

  rep.passed = rep.bound_passed && rep.diff_passed;
  return rep;
}

} // namespace cbf
