// cbf3d -- command-line driver for the damped Navier-Stokes solver and its
// verification harness.
//
//   run                 integrate a configured trajectory; stream the energy
//                       ledger (NDJSON) and binary checkpoints to --out
//   sweep               grid of runs over (mu, beta, r); one CSV row per cell
//   check-inequalities  sandwich / embedding checks on random solenoidal fields
//   rescale-test        operator-level parabolic-rescaling identity
//   energy-audit        recompute ledger columns from checkpoints and cross-check
//
// Exit codes: 0 success, 2 bad configuration or unreadable input, 3 a
// verified assertion failed, 4 the blow-up guard tripped.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "cbf/checkpoint.hpp"
#include "cbf/config.hpp"
#include "cbf/dynamics.hpp"
#include "cbf/exceptions.hpp"
#include "cbf/inequalities.hpp"
#include "cbf/initial_conditions.hpp"
#include "cbf/ledger.hpp"
#include "cbf/norms.hpp"
#include "cbf/stepper.hpp"

namespace fs = std::filesystem;
using namespace cbf;

namespace {

constexpr int kOkExit = 0;
constexpr int kConfigExit = 2;
constexpr int kAssertExit = 3;
constexpr int kBlowupExit = 4;

//======================================================================
// shared helpers
//======================================================================

int worker_count() {
  const char* env = std::getenv("CBF3D_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1)
    throw ConfigError(std::string("CBF3D_WORKERS must be a positive integer, got '") +
                      env + "'");
  return (int)std::min(n, 64L);
}

std::string checkpoint_name(std::uint64_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "checkpoint_%09llu.ck",
                (unsigned long long)step);
  return buf;
}

bool is_checkpoint_name(const std::string& name) {
  if (name.size() != 23) return false; // checkpoint_ + 9 digits + .ck
  if (name.rfind("checkpoint_", 0) != 0 || name.substr(20) != ".ck") return false;
  for (int i = 11; i < 20; ++i)
    if (!std::isdigit((unsigned char)name[i])) return false;
  return true;
}

std::vector<fs::path> list_checkpoints(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir))
    throw ConfigError(dir.string() + ": not a directory");
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_checkpoint_name(entry.path().filename().string()))
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Assembled du/dt at a restored state, matching what the scheme would use.
SpectralField rhs_at(const SpectralField& u, const ModelParams& p) {
  NonlinearEval ev = nonlinear_term(u, p);
  return time_derivative(u, ev.term, p);
}

void require_matching_params(const ModelParams& a, const ModelParams& b) {
  if (a.mu != b.mu || a.alpha != b.alpha || a.beta != b.beta || a.r != b.r)
    throw ConfigError("checkpoint model parameters disagree with the config");
}

std::vector<Real> parse_real_list(const std::string& csv, const char* flag) {
  std::vector<Real> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const char* s = tok.c_str();
    char* end = nullptr;
    Real v = std::strtod(s, &end);
    if (end == s || *end != '\0')
      throw ConfigError(std::string(flag) + ": expected comma-separated numbers, got '" +
                        csv + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

//======================================================================
// run
//======================================================================

int cmd_run(const std::string& cfg_path, const std::string& out_dir, bool resume) {
  RunConfig cfg = load_config(cfg_path);
  fs::create_directories(out_dir);
  const fs::path ledger_path = fs::path(out_dir) / "ledger.ndjson";

  EnergyLedger ledger(cfg.params);
  StepperState st;
  st.params = cfg.params;
  std::vector<LedgerRow> kept;

  if (resume) {
    std::vector<fs::path> cks = list_checkpoints(out_dir);
    if (cks.empty())
      throw ConfigError(out_dir + ": no checkpoints to resume from");
    st = load_checkpoint(cks.back().string());
    require_matching_params(st.params, cfg.params);
    if (st.field.K != cfg.K)
      throw ConfigError("checkpoint K = " + std::to_string(st.field.K) +
                        " disagrees with config K = " + std::to_string(cfg.K));
    st.field.grid_n = cfg.N;
    kept = read_ndjson(ledger_path.string());
    while (!kept.empty() && kept.back().t > st.time) kept.pop_back();
    if (kept.empty() || kept.back().t != st.time)
      throw ConfigError(ledger_path.string() +
                        ": no row at the checkpoint time; cannot resume");
    ledger.seed(st.field, rhs_at(st.field, cfg.params), st.time,
                kept.back().D, kept.back().A, kept.front().E);
    std::printf("resuming from %s (t = %.17g, step %llu)\n",
                cks.back().filename().string().c_str(), st.time,
                (unsigned long long)st.step_count);
  } else {
    st.field = initial_condition(cfg);
  }

  // Keep a canonical copy of the configuration beside the outputs.
  {
    std::ofstream cf(fs::path(out_dir) / "run.cfg", std::ios::trunc);
    cf << serialize_config(cfg);
  }

  write_ndjson(ledger_path.string(), kept); // truncates; empty on fresh runs
  std::ofstream lf(ledger_path, std::ios::app);
  if (!lf) throw ConfigError(ledger_path.string() + ": cannot open for writing");

  auto emit_checkpoint = [&](const StepperState& s) {
    save_checkpoint(s, (fs::path(out_dir) / checkpoint_name(s.step_count)).string());
  };

  long recorded = 0, stepped = 0;
  Observer obs = [&](const Sample& smp) {
    const LedgerRow& row = ledger.record(smp.u, smp.dudt, smp.t);
    append_ndjson(lf, row);
    lf.flush();
    ++recorded;
    if (smp.dt > 0 && cfg.checkpoint_cadence > 0 &&
        ++stepped % cfg.checkpoint_cadence == 0) {
      StepperState snap;
      snap.field = smp.u;
      snap.time = smp.t;
      snap.dt = smp.dt;
      snap.step_count = smp.step;
      snap.params = cfg.params;
      emit_checkpoint(snap);
    }
  };

  IntegrateOptions opt;
  opt.t_end = cfg.T;
  opt.sample_cadence = cfg.sample_cadence;
  opt.record_initial = !resume;

  int code = kOkExit;
  std::string note;
  IntegrateStats stats{};
  try {
    stats = integrate(st, cfg.control, opt, obs);
  } catch (const BlowupError& e) {
    code = kBlowupExit;
    note = e.what();
  }
  emit_checkpoint(st); // resume point: carries the controller's next dt

  const LedgerRow* last = !ledger.rows().empty() ? &ledger.rows().back()
                          : !kept.empty()        ? &kept.back()
                                                 : nullptr;
  if (last)
    std::printf("run: t = %.17g, steps = %llu, E = %.12g, balance residual = %.3e\n",
                st.time, (unsigned long long)st.step_count, last->E, last->R);
  std::printf("ledger: %s (+%ld rows), accepted %llu, rejected %llu\n",
              ledger_path.string().c_str(), recorded,
              (unsigned long long)stats.accepted,
              (unsigned long long)stats.rejected);
  if (code == kBlowupExit)
    std::fprintf(stderr, "blow-up guard tripped: %s\n", note.c_str());
  return code;
}

//======================================================================
// sweep
//======================================================================

struct CellResult {
  std::size_t violations = 0;
  bool has_violations = false; // monotonicity monitor defined (r == 3)
  Real residual = std::numeric_limits<Real>::quiet_NaN();
  bool blowup = false;
  double wall = 0;
};

CellResult run_cell(const RunConfig& cfg) {
  CellResult res;
  const auto t0 = std::chrono::steady_clock::now();
  EnergyLedger ledger(cfg.params);
  StepperState st;
  st.params = cfg.params;
  st.field = initial_condition(cfg);
  IntegrateOptions opt;
  opt.t_end = cfg.T;
  opt.sample_cadence = cfg.sample_cadence;
  try {
    integrate(st, cfg.control, opt, ledger.observer());
  } catch (const BlowupError&) {
    res.blowup = true;
  }
  const auto& rows = ledger.rows();
  if (!rows.empty()) {
    const Real e0 = rows.front().E;
    res.residual = rows.back().R / (e0 > 0 ? e0 : 1);
    if (cfg.params.r == 3) {
      res.violations = monotonicity_monitor(rows, cfg.params).violations;
      res.has_violations = true;
    }
  }
  res.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

int cmd_sweep(const std::string& cfg_path, const std::string& mu_csv,
              const std::string& beta_csv, const std::string& r_csv,
              const std::string& out_csv) {
  RunConfig base = load_config(cfg_path);
  std::vector<Real> mus = parse_real_list(mu_csv, "--mu");
  std::vector<Real> betas = parse_real_list(beta_csv, "--beta");
  std::vector<Real> rs = parse_real_list(r_csv, "--r");

  std::vector<RunConfig> cells;
  for (Real mu : mus)
    for (Real beta : betas)
      for (Real r : rs) {
        RunConfig c = base;
        c.params.mu = mu;
        c.params.beta = beta;
        c.params.r = r;
        validate(c); // reject the whole sweep before running anything
        cells.push_back(c);
      }

  const int workers = std::min<int>(worker_count(), (int)cells.size());
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> cursor{0};
  auto drain = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= cells.size()) return;
      results[i] = run_cell(cells[i]);
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }

  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) throw ConfigError(out_csv + ": cannot open for writing");
  csv << "mu,beta,r,final_residual,monotonicity_violations,blowup,wall_seconds\n";
  char line[256];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const ModelParams& p = cells[i].params;
    const CellResult& c = results[i];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.9e,%lld,%d,%.3f\n",
                  p.mu, p.beta, p.r, c.residual,
                  c.has_violations ? (long long)c.violations : -1LL,
                  c.blowup ? 1 : 0, c.wall);
    csv << line;
    std::printf("cell mu=%g beta=%g r=%g: residual %.3e, violations %lld%s (%.2fs)\n",
                p.mu, p.beta, p.r, c.residual,
                c.has_violations ? (long long)c.violations : -1LL,
                c.blowup ? ", BLOW-UP" : "", c.wall);
  }
  std::printf("sweep: %zu cells, %d worker%s -> %s\n", cells.size(), workers,
              workers == 1 ? "" : "s", out_csv.c_str());
  return kOkExit;
}

//======================================================================
// check-inequalities
//======================================================================

int cmd_check_inequalities(std::uint64_t seed, const std::string& r_csv,
                           int fields, int K) {
  if (fields < 1) throw ConfigError("--fields must be >= 1");
  if (K < 1) throw ConfigError("--K must be >= 1");
  std::vector<Real> rs = parse_real_list(r_csv, "--r");
  constexpr Real kSlackTol = 1e-8; // relative to the sandwich upper bound

  long violations = 0;
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    const Real r = rs[ri];
    Real min_slack = std::numeric_limits<Real>::infinity();
    Real max_ident = 0;
    for (int i = 0; i < fields; ++i) {
      SpectralField u =
          ic_random_spectrum(K, seed + 100000 * ri + (std::uint64_t)i, -1.5, 1.0);
      SandwichResult sw = weighted_gradient_sandwich(u, r);
      const Real scale = std::max(sw.upper, (Real)1e-300);
      const Real slack =
          std::min({sw.lower, sw.middle - sw.lower, sw.upper - sw.middle}) / scale;
      min_slack = std::min(min_slack, slack);
      if (slack < -kSlackTol) ++violations;
      if (r >= 3) {
        const Real ident = std::abs(sw.middle - sw.lower - sw.correction) / scale;
        max_ident = std::max(max_ident, ident);
        if (ident > kSlackTol) ++violations;
      }
      std::optional<Real> ratio = sobolev_absorption_ratio(u, r);
      if (!ratio || !std::isfinite(*ratio) || *ratio <= 0) ++violations;
    }
    if (r >= 3)
      std::printf("r = %-4g %d fields: min slack %+.3e, identity defect %.3e\n", r,
                  fields, min_slack, max_ident);
    else
      std::printf("r = %-4g %d fields: min slack %+.3e\n", r, fields, min_slack);
  }
  if (violations) {
    std::fprintf(stderr, "check-inequalities: %ld violation%s\n", violations,
                 violations == 1 ? "" : "s");
    return kAssertExit;
  }
  std::printf("check-inequalities: all bounds hold (tolerance %.0e relative)\n",
              kSlackTol);
  return kOkExit;
}

//======================================================================
// rescale-test
//======================================================================

int cmd_rescale_test(int lambda, Real r) {
  ModelParams p;
  p.mu = 0.7;
  p.alpha = 0.0;
  p.beta = 0.8;
  p.r = r;
  validate(p);
  constexpr Real kTol = 1e-10;
  constexpr int K = 5;

  struct Probe {
    const char* name;
    SpectralField u;
  };
  const Probe probes[] = {
      {"taylor_green", ic_taylor_green(K)},
      {"beltrami", ic_beltrami(K)},
      {"random_11", ic_random_spectrum(K, 11, -1.5, 1.0)},
      {"random_12", ic_random_spectrum(K, 12, -1.5, 1.0)},
  };
  Real worst = 0;
  for (const Probe& pr : probes) {
    const Real defect = rescale_defect(pr.u, lambda, p);
    worst = std::max(worst, defect);
    std::printf("  %-12s defect = %.3e\n", pr.name, defect);
  }
  std::printf("rescale-test: lambda = %d, r = %g (beta scaled by lambda^%g), "
              "worst defect %.3e vs %.0e -> %s\n",
              lambda, r, 3 - r, worst, kTol, worst <= kTol ? "pass" : "FAIL");
  return worst <= kTol ? kOkExit : kAssertExit;
}

//======================================================================
// energy-audit
//======================================================================

int cmd_energy_audit(const std::string& dir) {
  const fs::path ledger_path = fs::path(dir) / "ledger.ndjson";
  std::vector<LedgerRow> rows = read_ndjson(ledger_path.string());
  if (rows.empty()) throw ConfigError(ledger_path.string() + ": empty ledger");
  std::vector<fs::path> cks = list_checkpoints(dir);
  if (cks.empty()) throw ConfigError(dir + ": no checkpoints to audit against");

  const Real e_ref = rows.front().E;
  long failures = 0;

  // Row-local identity: R restates |E + D + A - E(0)| from the same row.
  Real max_r_defect = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const LedgerRow& row = rows[i];
    const Real defect = std::abs(row.R - std::abs(row.E + row.D + row.A - e_ref));
    max_r_defect = std::max(max_r_defect, defect);
    if (defect > 1e-13 * std::max((Real)1, e_ref)) {
      std::fprintf(stderr, "row %zu (t = %.17g): balance defect %.3e\n", i, row.t,
                   defect);
      ++failures;
    }
    if (i > 0 && !(row.t > rows[i - 1].t)) {
      std::fprintf(stderr, "row %zu: sample times not increasing\n", i);
      ++failures;
    }
  }

  // Instantaneous columns recomputed from the stored fields.
  Real max_de = 0, max_dg = 0;
  std::size_t matched = 0;
  for (const fs::path& ck : cks) {
    StepperState st = load_checkpoint(ck.string());
    const LedgerRow* row = nullptr;
    for (const LedgerRow& cand : rows)
      if (cand.t == st.time) {
        row = &cand;
        break;
      }
    if (!row) {
      std::fprintf(stderr, "%s: no ledger row at t = %.17g\n",
                   ck.filename().string().c_str(), st.time);
      ++failures;
      continue;
    }
    ++matched;
    const Real de = std::abs(l2_norm_sq(st.field) - row->E);
    const Real dg = std::abs(gradient_norm_sq(st.field) - row->G);
    max_de = std::max(max_de, de);
    max_dg = std::max(max_dg, dg);
    if (de > 1e-12 * std::max((Real)1, row->E) ||
        dg > 1e-12 * std::max((Real)1, row->G)) {
      std::fprintf(stderr, "%s: recomputed energies disagree (dE %.3e, dG %.3e)\n",
                   ck.filename().string().c_str(), de, dg);
      ++failures;
    }
  }

  std::printf("energy-audit: %zu rows, %zu/%zu checkpoints matched, "
              "max |dE| %.3e, max |dG| %.3e, max balance defect %.3e -> %s\n",
              rows.size(), matched, cks.size(), max_de, max_dg, max_r_defect,
              failures == 0 ? "OK" : "FAIL");
  return failures == 0 ? kOkExit : kAssertExit;
}

} // namespace

//======================================================================
// entry point
//======================================================================

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral solver and verification harness for the 3D "
               "periodic convective Brinkman-Forchheimer equations"};
  app.require_subcommand(1);
  std::function<int()> action;

  {
    auto* run = app.add_subcommand("run", "integrate a configured trajectory");
    auto cfg = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto resume = std::make_shared<bool>(false);
    run->add_option("--config", *cfg, "run description file")->required();
    run->add_option("--out", *out, "output directory (ledger + checkpoints)")
        ->required();
    run->add_flag("--resume", *resume,
                  "continue from the latest checkpoint in --out");
    run->callback([=, &action] {
      action = [=] { return cmd_run(*cfg, *out, *resume); };
    });
  }
  {
    auto* sweep = app.add_subcommand("sweep", "parameter grid of runs");
    auto cfg = std::make_shared<std::string>();
    auto mu = std::make_shared<std::string>();
    auto beta = std::make_shared<std::string>();
    auto r = std::make_shared<std::string>("3");
    auto out = std::make_shared<std::string>();
    sweep->add_option("--config", *cfg, "base run description file")->required();
    sweep->add_option("--mu", *mu, "comma-separated viscosities")->required();
    sweep->add_option("--beta", *beta, "comma-separated absorption strengths")
        ->required();
    sweep->add_option("--r", *r, "absorption exponent(s), comma-separated");
    sweep->add_option("--out", *out, "CSV output path")->required();
    sweep->callback([=, &action] {
      action = [=] { return cmd_sweep(*cfg, *mu, *beta, *r, *out); };
    });
  }
  {
    auto* chk = app.add_subcommand(
        "check-inequalities", "functional bounds on random solenoidal fields");
    auto seed = std::make_shared<std::uint64_t>(1);
    auto r = std::make_shared<std::string>("2,3,4,7");
    auto fields = std::make_shared<int>(25);
    auto K = std::make_shared<int>(4);
    chk->add_option("--seed", *seed, "base RNG seed");
    chk->add_option("--r", *r, "absorption exponents, comma-separated");
    chk->add_option("--fields", *fields, "fields per exponent");
    chk->add_option("--K", *K, "spectral truncation of the samples");
    chk->callback([=, &action] {
      action = [=] { return cmd_check_inequalities(*seed, *r, *fields, *K); };
    });
  }
  {
    auto* rsc = app.add_subcommand("rescale-test",
                                   "parabolic-rescaling operator identity");
    auto lambda = std::make_shared<int>(2);
    auto r = std::make_shared<Real>(3.0);
    rsc->add_option("--lambda", *lambda, "integer scaling factor")
        ->check(CLI::PositiveNumber);
    rsc->add_option("--r", *r, "absorption exponent");
    rsc->callback([=, &action] {
      action = [=] { return cmd_rescale_test(*lambda, *r); };
    });
  }
  {
    auto* audit = app.add_subcommand(
        "energy-audit", "cross-check a run directory's ledger against its checkpoints");
    auto dir = std::make_shared<std::string>();
    audit->add_option("dir", *dir, "run output directory")->required();
    audit->callback([=, &action] {
      action = [=] { return cmd_energy_audit(*dir); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOkExit : kConfigExit;
  }

  try {
    return action ? action() : kConfigExit;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const BlowupError& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    return kBlowupExit;
  } catch (const StepControlError& e) {
    std::fprintf(stderr, "step control: %s\n", e.what());
    return kAssertExit;
  } catch (const VerificationError& e) {
    std::fprintf(stderr, "verification: %s\n", e.what());
    return kAssertExit;
  } catch (const std::exception& e) {
    // Resolution/shape/ledger/checkpoint problems are input errors.
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigExit;
  }
}
