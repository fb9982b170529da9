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

#include "diqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "diqkd/io.hpp"
#include "diqkd/rng.hpp"

namespace diqkd::protocol {
namespace {

constexpr std::uint32_t kBlocksPerRound = 2;

struct SamplingTable {
  std::array<std::array<std::array<double, 4>, 3>, 2> cdf{};

  explicit SamplingTable(const Behavior& beh) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 3; ++y) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          acc += beh.p[x][y][k];
          cdf[x][y][k] = acc;
        }
        cdf[x][y][3] = 1.0;
      }
    }
  }
};

RoundRecord draw_round(const SamplingTable& table, const ProtocolParams& params, std::uint64_t i) {
  const rng::Counter w0 = rng::round_block(params.seed, i, 0);
  const rng::Counter w1 = rng::round_block(params.seed, i, 1);
  RoundRecord r;
  r.s = rng::to_unit(w0[0], w0[1]) < params.gamma_A ? 0 : 1;
  r.t = rng::to_unit(w0[2], w0[3]) < params.gamma_B ? 0 : 1;
  r.x = r.s == 0 ? static_cast<std::uint8_t>(w1[0] & 1u) : 0;
  r.y = r.t == 0 ? static_cast<std::uint8_t>((w1[0] >> 1) & 1u) : 2;
  const double u = rng::to_unit(w1[2], w1[3]);
  const auto& cdf = table.cdf[r.x][r.y];
  int k = 0;
  while (k < 3 && u >= cdf[k]) ++k;
  r.a = static_cast<std::uint8_t>(k >> 1);
  r.b = static_cast<std::uint8_t>(k & 1);
  r.c = (r.s == 0 && r.t == 0) ? static_cast<std::uint8_t>(payoff(r.a, r.b, r.x, r.y)) : kBot;
  return r;
}

std::map<std::string, std::string> parse_header_fields(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

}  // namespace

void ProtocolParams::validate() const {
  if (n < 1) throw std::domain_error("ProtocolParams: n must be positive");
  if (!(gamma_A > 0.0 && gamma_A < 1.0) || !(gamma_B > 0.0 && gamma_B < 1.0)) {
    throw std::domain_error("ProtocolParams: test probabilities must lie in (0,1)");
  }
  if (!(omega_exp > 0.75 && omega_exp <= (2.0 + std::sqrt(2.0)) / 4.0 + 1e-15)) {
    throw std::domain_error("ProtocolParams: omega_exp must lie in (3/4, (2+sqrt2)/4]");
  }
  if (!(delta >= 0.0)) throw std::domain_error("ProtocolParams: delta must be nonnegative");
}

void Behavior::validate() const {
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 3; ++y) {
      double sum = 0.0;
      for (double v : p[x][y]) {
        if (!(v >= 0.0)) throw std::domain_error("Behavior: negative entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw std::domain_error("Behavior: distribution not normalized");
    }
  }
}

double Behavior::signaling_gap() const {
  double gap = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 1; y < 3; ++y) {
      // P(a | x, y) against P(a | x, 0).
      gap = std::max(gap, std::abs((p[x][y][0] + p[x][y][1]) - (p[x][0][0] + p[x][0][1])));
    }
  }
  for (int y = 0; y < 3; ++y) {
    gap = std::max(gap, std::abs((p[1][y][0] + p[1][y][2]) - (p[0][y][0] + p[0][y][2])));
  }
  return gap;
}

MeasurementSettings MeasurementSettings::standard() {
  using B = quantum::BlochVector<double>;
  MeasurementSettings s;
  s.a = {B::Z(), B::X()};
  s.b = {B::from(1, 0, 1), B::from(-1, 0, 1), B::Z()};
  return s;
}

int payoff(int a, int b, int x, int y) {
  if (x < 0 || x > 1 || y < 0 || y > 1) throw std::invalid_argument("payoff: settings must be test settings");
  return ((a ^ b) == (x & y)) ? 1 : 0;
}

Behavior behavior_from_state(const quantum::TwoQubitState<double>& rho,
                             const MeasurementSettings& settings, double readout_flip, bool flip_b) {
  Behavior beh;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 3; ++y) {
      const auto d = quantum::outcome_distribution(rho, settings.a[x], settings.b[y], readout_flip, flip_b);
      const double total = d[0] + d[1] + d[2] + d[3];
      for (int k = 0; k < 4; ++k) beh.p[x][y][k] = d[k] / total;
    }
  }
  beh.validate();
  return beh;
}

Transcript generate_transcript(const Behavior& behavior, const ProtocolParams& params, int workers) {
  params.validate();
  behavior.validate();
  const SamplingTable table(behavior);
  Transcript tr;
  tr.params = params;
  const auto n = static_cast<std::size_t>(params.n);
  tr.rounds.resize(n);

  const std::size_t nw = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, n);
  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) tr.rounds[i] = draw_round(table, params, i);
  };
  if (nw == 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(fill, n * w / nw, n * (w + 1) / nw);
    for (auto& th : pool) th.join();
  }
  tr.rng_draws = static_cast<std::uint64_t>(n) * kBlocksPerRound;
  rng::note_draws(tr.rng_draws);
  return tr;
}

Transcript sift(const Transcript& tr) {
  Transcript out = tr;
  for (auto& r : out.rounds) {
    const bool key_only_test = r.s == 1 && r.t == 0;
    const bool unmatched = r.s == 0 && r.t == 1 && r.x == 1 && r.y == 2;
    if (key_only_test || unmatched) {
      r.a = 0;
      r.b = 0;
    }
  }
  return out;
}

double test_statistic(const Transcript& tr) {
  if (tr.rounds.empty()) return 0.0;
  std::int64_t wins = 0;
  for (const auto& r : tr.rounds) {
    if (r.c != kBot) wins += r.c;
  }
  return static_cast<double>(wins) / static_cast<double>(tr.rounds.size());
}

bool accept(double beta, const ProtocolParams& params) {
  return beta >= params.gamma_A * params.gamma_B * params.omega_exp - params.delta;
}

void Tally::add(const RoundRecord& r) {
  ++rounds;
  ++c_counts[r.c];
  if (r.s == 0 && r.t == 0) ++test[2 * r.x + r.y][2 * r.a + r.b];
  if (r.x == 0 && r.y == 2) {
    ++key_rounds;
    key_errors += r.a != r.b;
  }
}

Tally& Tally::merge(const Tally& o) {
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) test[i][k] += o.test[i][k];
  }
  key_rounds += o.key_rounds;
  key_errors += o.key_errors;
  for (int c = 0; c < 3; ++c) c_counts[c] += o.c_counts[c];
  rounds += o.rounds;
  return *this;
}

Tally tally(const Transcript& tr) {
  Tally t;
  for (const auto& r : tr.rounds) t.add(r);
  return t;
}

Estimate estimate(const Tally& t) {
  Estimate e;
  e.c_counts = t.c_counts;
  double var_s = 0.0;
  for (int xy = 0; xy < 4; ++xy) {
    const auto& cell = t.test[xy];
    const std::int64_t total = cell[0] + cell[1] + cell[2] + cell[3];
    if (total < 2) {
      e.flagged = true;
      continue;
    }
    const double corr = static_cast<double>((cell[0] + cell[3]) - (cell[1] + cell[2])) / static_cast<double>(total);
    e.S_hat += xy == 3 ? -corr : corr;
    var_s += (1.0 - corr * corr) / static_cast<double>(total);
  }
  if (e.flagged) e.S_hat = 0.0;
  e.S_err = e.flagged ? 0.0 : std::sqrt(var_s);
  if (t.key_rounds < 2) {
    e.flagged = true;
  } else {
    const double kr = static_cast<double>(t.key_rounds);
    e.Q_hat = static_cast<double>(t.key_errors) / kr;
    e.Q_err = std::sqrt(std::max(e.Q_hat * (1.0 - e.Q_hat), 1.0 / kr) / kr);
  }
  return e;
}

Estimate estimate(const Transcript& tr) { return estimate(tally(tr)); }

void write_transcript(std::ostream& out, const Transcript& tr) {
  const auto& p = tr.params;
  out << "# diqkd-transcript v1\n";
  out << "# n=" << p.n << " gamma_A=" << io::fmt17(p.gamma_A) << " gamma_B=" << io::fmt17(p.gamma_B)
      << " omega_exp=" << io::fmt17(p.omega_exp) << " delta=" << io::fmt17(p.delta) << " seed=" << p.seed
      << " rng=" << tr.rng << "\n";
  out << "s,t,x,y,a,b,c\n";
  std::string line;
  for (const auto& r : tr.rounds) {
    line.clear();
    for (std::uint8_t v : {r.s, r.t, r.x, r.y, r.a, r.b, r.c}) {
      if (!line.empty()) line.push_back(',');
      line.push_back(static_cast<char>('0' + v));
    }
    line.push_back('\n');
    out << line;
  }
}

Transcript read_transcript(std::istream& in) {
  Transcript tr;
  std::string line;
  if (!std::getline(in, line) || line != "# diqkd-transcript v1") {
    throw std::runtime_error("read_transcript: missing format line");
  }
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("read_transcript: missing parameter line");
  }
  auto fields = parse_header_fields(line.substr(2));
  try {
    tr.params.n = std::stoll(fields.at("n"));
    tr.params.gamma_A = io::parse_double(fields.at("gamma_A"));
    tr.params.gamma_B = io::parse_double(fields.at("gamma_B"));
    tr.params.omega_exp = io::parse_double(fields.at("omega_exp"));
    tr.params.delta = io::parse_double(fields.at("delta"));
    tr.params.seed = std::stoull(fields.at("seed"));
    tr.rng = fields.at("rng");
  } catch (const std::out_of_range&) {
    throw std::runtime_error("read_transcript: incomplete parameter line");
  }
  if (!std::getline(in, line) || line != "s,t,x,y,a,b,c") {
    throw std::runtime_error("read_transcript: missing column header");
  }
  tr.rounds.reserve(static_cast<std::size_t>(std::max<std::int64_t>(tr.params.n, 0)));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.size() != 13) throw std::runtime_error("read_transcript: malformed record '" + line + "'");
    std::array<std::uint8_t, 7> v{};
    for (int f = 0; f < 7; ++f) {
      const char ch = line[2 * f];
      if (ch < '0' || ch > '2' || (f < 6 && line[2 * f + 1] != ',')) {
        throw std::runtime_error("read_transcript: malformed record '" + line + "'");
      }
      v[f] = static_cast<std::uint8_t>(ch - '0');
    }
    const RoundRecord r{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    const bool test = r.s == 0 && r.t == 0;
    const bool ok = r.s <= 1 && r.t <= 1 && r.x <= 1 && r.a <= 1 && r.b <= 1 && (r.s == 0 || r.x == 0) &&
                    ((r.t == 1) == (r.y == 2)) && (test ? r.c == payoff(r.a, r.b, r.x, r.y) : r.c == kBot);
    if (!ok) throw std::runtime_error("read_transcript: inconsistent record '" + line + "'");
    tr.rounds.push_back(r);
  }
  if (static_cast<std::int64_t>(tr.rounds.size()) != tr.params.n) {
    throw std::runtime_error("read_transcript: record count does not match n");
  }
  return tr;
}

}  // namespace diqkd::protocol
