// Copyright 2026 The diqkd-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diqkd/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "diqkd/errors.hpp"
#include "diqkd/link.hpp"
#include "diqkd/mathcore.hpp"
#include "diqkd/quantum.hpp"
#include "diqkd/rng.hpp"

namespace diqkd {
namespace {

constexpr double kSqrt2x2 = 2.8284271247461900976;

ModelPrediction predict_from_behavior(const protocol::Behavior& beh) {
  ModelPrediction m;
  double win = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (protocol::payoff(a, b, x, y)) win += beh.prob(a, b, x, y);
        }
      }
    }
  }
  m.omega = win / 4.0;
  m.S = math::winprob_to_chsh(m.omega);
  m.Q = beh.prob(0, 1, 0, 2) + beh.prob(1, 0, 0, 2);
  return m;
}

protocol::Behavior behavior_for(const quantum::NoiseParams& noise) {
  const auto rho = quantum::build_heralded_state<double>(noise);
  return protocol::behavior_from_state(rho, protocol::MeasurementSettings::standard(), noise.readout_flip, true);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  if (points == 1) return {std::round(lo)};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) out.push_back(std::round(std::pow(10.0, a + (b - a) * i / (points - 1))));
  return out;
}

std::vector<double> lin_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
  return out;
}

// Key lengths of both methods at one (n, model).
struct MethodRates {
  std::optional<eat::EatKeyLength> eat;
  std::optional<renyi::RenyiKeyLength> renyi;
  std::optional<renyi::AcceptanceSet> acc;
  eat::LeakEc leak;
};

MethodRates evaluate_methods(const RunConfig& cfg, std::int64_t n, const eat::HonestModel& m, double delta,
                             bool want_eat, bool want_renyi) {
  MethodRates out;
  const double nd = static_cast<double>(n);
  out.leak = eat::leak_ec(nd, m, cfg.eat.eps_EC_com, cfg.eat.eps_tilde);
  if (want_eat) {
    eat::EatBudget budget = cfg.eat;
    budget.eps_tilde = out.leak.eps_tilde;
    out.eat = eat::key_length_eat(nd, m, budget, delta, cfg.delta_norm);
  }
  if (want_renyi) {
    if (!(cfg.renyi.eps_sec > 0.0)) throw InfeasibleError("key_length_renyi: eps_snd leaves no room for secrecy after eps_EC");
    const auto q_hon = renyi::q_honest(m.gamma_A, m.gamma_B, m.omega);
    out.acc = renyi::build_acceptance_set(q_hon, n, cfg.renyi.eps_com_AT);
    out.renyi = renyi::key_length_renyi(nd, m, cfg.renyi, *out.acc, out.leak.bits);
  }
  return out;
}

double delta_for(const RunConfig& cfg, double n, double omega_exp) {
  if (cfg.delta_given) return cfg.protocol.delta;
  return eat::delta_for_completeness(n, cfg.protocol.gamma_A, cfg.protocol.gamma_B, omega_exp,
                                     cfg.completeness_target);
}

}  // namespace

ModelPrediction predict(const quantum::NoiseParams& noise) {
  auto m = predict_from_behavior(behavior_for(noise));
  const auto rho = quantum::build_heralded_state<double>(noise);
  m.fidelity = quantum::bell_fidelity<double>(rho, noise.sign, noise.delta_phi);
  return m;
}

KeyRateReport run_pipeline(const RunConfig& cfg, bool analytic, int workers) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t draws_before = rng::draws_total();

  KeyRateReport rep;
  rep.config_hash = cfg.hash();
  rep.seed = cfg.protocol.seed;
  rep.analytic = analytic;
  rep.method = cfg.method;
  rep.inputs = cfg.entries;
  rep.model = predict(cfg.noise);

  rep.params = cfg.protocol;
  if (analytic) {
    if (!cfg.omega_given) rep.params.omega_exp = math::chsh_to_winprob(cfg.analytic_S);
    rep.q_exp = cfg.analytic_Q;
  } else {
    if (!cfg.omega_given) rep.params.omega_exp = rep.model.omega;
    rep.q_exp = rep.model.Q;
  }
  const double n = static_cast<double>(rep.params.n);
  rep.params.delta = delta_for(cfg, n, rep.params.omega_exp);
  try {
    rep.params.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("protocol: ") + e.what());
  }

  eat::HonestModel m;
  m.omega = rep.params.omega_exp;
  m.q = rep.q_exp;
  m.gamma_A = rep.params.gamma_A;
  m.gamma_B = rep.params.gamma_B;
  m.validate();

  const bool want_eat = cfg.method != Method::kRenyi;
  const bool want_renyi = cfg.method != Method::kEat;
  auto rates = evaluate_methods(cfg, rep.params.n, m, rep.params.delta, want_eat, want_renyi);
  rep.leak = rates.leak;
  rep.eat = rates.eat;
  rep.renyi = rates.renyi;
  rep.acceptance = rates.acc;

  const double S_in = math::winprob_to_chsh(m.omega);
  rep.rate_asym_sifted = eat::asymptotic_rate_sifted(S_in, m.q, m.gamma_A, m.gamma_B);
  rep.rate_asym_nosift = eat::asymptotic_rate_nosift(S_in, m.q);

  if (!analytic) {
    const auto beh = behavior_for(cfg.noise);
    const auto tr = protocol::generate_transcript(beh, rep.params, workers);
    const auto sifted = protocol::sift(tr);
    rep.estimate = protocol::estimate(sifted);
    rep.beta_freq = protocol::test_statistic(sifted);
    for (int c = 0; c < 3; ++c) rep.c_freq[c] = static_cast<double>(rep.estimate.c_counts[c]) / n;
    rep.accepted_eat = protocol::accept(rep.beta_freq, rep.params);
    if (rep.acceptance) {
      math::Distribution3 freq{rep.c_freq[0], rep.c_freq[1], rep.c_freq[2]};
      rep.accepted_renyi = rep.acceptance->contains(freq);
    }
    if (rep.eat && !rep.accepted_eat) {
      rep.eat->bits = 0.0;
      rep.eat->rate = 0.0;
    }
    if (rep.renyi && !rep.accepted_renyi) {
      rep.renyi->bits = 0.0;
      rep.renyi->rate = 0.0;
    }
    rep.aborted = (want_eat && !rep.accepted_eat) || (want_renyi && !rep.accepted_renyi);
  }

  rep.rng_draws = rng::draws_total() - draws_before;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::size_t Table::column(const std::string& col) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == col) return i;
  }
  throw std::out_of_range("table " + name + " has no column " + col);
}

double Table::number(std::size_t row, const std::string& col) const {
  const Cell& c = rows.at(row).at(column(col));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column " + col + " is not numeric");
}

Table sweep_keyrate_vs_n(const RunConfig& cfg, int workers) {
  return sweep_keyrate_vs_n(cfg, log_grid(cfg.sweep.n_min, cfg.sweep.n_max, cfg.sweep.n_points), workers);
}

Table sweep_keyrate_vs_n(const RunConfig& cfg, const std::vector<double>& n_grid, int workers) {
  cfg.validate();
  std::vector<double> grid = n_grid;
  std::sort(grid.begin(), grid.end());

  eat::HonestModel m = eat::HonestModel::from_chsh(cfg.analytic_S, cfg.analytic_Q, cfg.protocol.gamma_A,
                                                   cfg.protocol.gamma_B);
  if (cfg.omega_given) m.omega = cfg.protocol.omega_exp;
  const double asym =
      eat::asymptotic_rate_sifted(math::winprob_to_chsh(m.omega), m.q, m.gamma_A, m.gamma_B);

  Table t;
  t.name = "sweep_n";
  t.columns = {"n", "rate_eat", "rate_renyi", "rate_asym"};
  auto rows = parallel_map(grid.size(), workers, [&](std::size_t i) {
    const auto n = static_cast<std::int64_t>(grid[i]);
    const double delta = delta_for(cfg, grid[i], m.omega);
    double r_eat = 0.0;
    double r_renyi = 0.0;
    try {
      const auto r = evaluate_methods(cfg, n, m, delta, true, false);
      r_eat = r.eat->rate;
    } catch (const InfeasibleError&) {
    }
    try {
      const auto r = evaluate_methods(cfg, n, m, delta, false, true);
      r_renyi = r.renyi->rate;
    } catch (const InfeasibleError&) {
      // An empty acceptance box certifies nothing.
    }
    return std::vector<Cell>{n, r_eat, r_renyi, asym};
  });
  t.rows = std::move(rows);
  return t;
}

ContourResult sweep_asymptotic_contour(const RunConfig& cfg, int workers) {
  cfg.validate();
  const auto S = lin_grid(cfg.sweep.S_min, cfg.sweep.S_max, cfg.sweep.S_points);
  const auto Q = lin_grid(cfg.sweep.Q_min, cfg.sweep.Q_max, cfg.sweep.Q_points);
  ContourResult out;
  out.grid.name = "contour";
  out.grid.columns = {"S", "Q", "rate"};
  auto blocks = parallel_map(S.size(), workers, [&](std::size_t i) {
    std::vector<std::vector<Cell>> rows;
    for (double q : Q) rows.push_back({S[i], q, eat::asymptotic_rate_nosift(S[i], q)});
    return rows;
  });
  for (auto& b : blocks) {
    for (auto& r : b) out.grid.rows.push_back(std::move(r));
  }

  out.zero.name = "contour_zero";
  out.zero.columns = {"Q", "S_zero"};
  for (double q : Q) {
    // g(ω(S)) is increasing in S from 0 at S = 2 to 1 at 2√2.
    const double target = math::binary_entropy(q);
    double lo = 2.0;
    double hi = kSqrt2x2;
    double s0 = std::nan("");
    if (target <= 0.0) {
      s0 = 2.0;
    } else if (target <= 1.0) {
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eat::asymptotic_rate_nosift(mid, q) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      s0 = 0.5 * (lo + hi);
    }
    out.zero.rows.push_back({q, s0});
  }
  return out;
}

Table sweep_rate_vs_distance(const RunConfig& cfg, const std::vector<DistanceRow>& input, int workers) {
  cfg.validate();
  std::vector<DistanceRow> rows = input;
  std::sort(rows.begin(), rows.end(),
            [](const DistanceRow& a, const DistanceRow& b) { return a.length_km < b.length_km; });
  Table t;
  t.name = "distance";
  t.columns = {"length_km",   "arm_efficiency", "p_spi",      "p_tpi",      "rate_spi_hz", "rate_tpi_hz",
               "S_pred",      "Q_pred",         "F_pred",     "F_target",   "key_per_event", "key_per_s",
               "reconstructed"};
  t.rows = parallel_map(rows.size(), workers, [&](std::size_t i) {
    const auto& r = rows[i];
    link::LinkBudget budget = cfg.link;
    budget.length_km = r.length_km;
    budget.measured_arm_transmission = r.fiber_transmission;
    const double eta = link::arm_efficiency(budget);
    const double p_spi = link::success_probability_spi(r.excitation, eta, r.excitation, eta);
    const double p_tpi = link::success_probability_tpi(eta, eta);
    const double rate_spi = link::event_rate(p_spi, cfg.timing, r.length_km);
    const double rate_tpi = link::event_rate(p_tpi, cfg.timing, r.length_km);

    quantum::NoiseParams noise = cfg.noise;
    const auto cal = quantum::calibrate_noise(r.v_z, r.v_x);
    noise.alpha_exc = cal.alpha_exc;
    noise.dephase_lambda = cal.dephase_lambda;
    const auto pred = predict(noise);
    const double key = eat::asymptotic_rate_nosift(pred.S, pred.Q);
    return std::vector<Cell>{r.length_km, eta,       p_spi,           p_tpi,      rate_spi,
                             rate_tpi,    pred.S,    pred.Q,          pred.fidelity, r.fidelity_target,
                             key,         key * rate_spi, std::int64_t{r.reconstructed ? 1 : 0}};
  });
  return t;
}

}  // namespace diqkd
