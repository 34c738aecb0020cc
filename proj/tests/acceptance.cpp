// Copyright 2026 The rwre-boundary Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "rwre/exact_kernel.hpp"
#include "rwre/phase_scan.hpp"
#include "rwre/rate_functions.hpp"
#include "rwre/stochastics.hpp"

using namespace rwre;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

JumpLaw RandomJumpLaw(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> w(static_cast<std::size_t>(2 * d));
  double s = 0.0;
  for (double& v : w) s += (v = u(rng));
  for (double& v : w) v /= s;
  return JumpLaw(w);
}

std::vector<double> RandomDirection(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(static_cast<std::size_t>(m));
  double s = 0.0;
  for (double& x : v) s += (x = g(rng)) * x;
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

std::vector<Face> AllFaces(int d) {
  std::vector<Face> out;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<int> s(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) s[i] = (mask >> i) & 1 ? -1 : 1;
    out.emplace_back(s);
  }
  return out;
}

DisorderSpec TwoPointUniform(double eps) {
  const JumpLaw a = JumpLaw::Uniform(4);
  return DisorderSpec(a, EtaLaw::TwoPoint(a), eps);
}

// 1. DP against exhaustive path enumeration.
Outcome PathSumOracle() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  std::size_t checks = 0;
  for (int d = 2; d <= 4; ++d) {
    const JumpLaw a = RandomJumpLaw(d, rng);
    std::vector<double> raw(static_cast<std::size_t>(2 * d));
    for (double& r : raw) r = std::uniform_real_distribution<double>(-1, 1)(rng);
    const DisorderSpec spec(a, EtaLaw::TwoPoint(a, raw), 0.6);
    std::vector<int> signs(static_cast<std::size_t>(d));
    for (int& s : signs) s = (rng() & 1) ? 1 : -1;
    const Face f(signs);
    const auto theta = RandomDirection(d - 1, rng);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const KeyedEnvironment env(spec, seed);
      const oracle::OmegaFn omega = [&](const LatticeSite& x, const Direction& e) { return env.Omega(x, e); };
      for (int n = 1; n <= 6; ++n) {
        ForEachComposition(n, d, [&](std::span<const int> m) {
          const std::vector<int> counts(m.begin(), m.end());
          const auto ref = oracle::EnumerateFacePaths(a, f, n, theta, counts, omega);
          worst = std::max(worst, std::abs(QuenchedPointLogProb(env, f, counts) - std::log(ref.point)));
          worst = std::max(worst, std::abs(LogPartitionFunction(env, f, theta, n) - std::log(ref.partition)));
          checks += 2;
        });
      }
    }
  }
  return {worst <= 1e-12, Fmt("max |log DP - log enumeration| = %.3g over %.0f comparisons", worst,
                              static_cast<double>(checks))};
}

// 2. Mean-one partition function and the first-step recursion.
Outcome Martingale() {
  std::mt19937_64 rng(2);
  const JumpLaw a = JumpLaw::Uniform(4);
  const DisorderSpec spec(a, EtaLaw::TwoPoint(a, {1, -1, -1, 1, 1, -1, -1, 1}), 0.7);
  const Face f({1, -1, 1, 1});
  double mean_err = 0.0;
  for (int rep = 0; rep < 4; ++rep) {
    auto theta = RandomDirection(3, rng);
    for (double& t : theta) t *= 0.25 * (rep + 1);
    for (int n = 1; n <= 3; ++n) {
      double mean = 0.0;
      oracle::EnumerateEta(spec, oracle::SitesBelowLevel(f, n), [&](const oracle::AtomMapEnv& env, double p) {
        AssignedEnvironment assigned(spec);
        for (const auto& [coords, atom] : env.atom) {
          assigned.Assign(LatticeSite(std::span<const int>(coords)), static_cast<std::uint32_t>(atom));
        }
        mean += p * std::exp(LogPartitionFunction(assigned, f, theta, n));
      });
      mean_err = std::max(mean_err, std::abs(mean - 1.0));
    }
  }
  double rec_err = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KeyedEnvironment env(spec, seed);
    auto theta = RandomDirection(3, rng);
    const double log_psi = LogPsi(a, f, theta);
    for (int n = 1; n <= 10; ++n) {
      const double z = std::exp(LogPartitionFunction(env, f, theta, n));
      double rhs = 0.0;
      const LatticeSite origin(4);
      for (int i = 0; i < 4; ++i) {
        const Direction e = f.jump(i);
        const LatticeSite y = origin.Step(e);
        const double rest = n == 1 ? 1.0 : std::exp(LogPartitionFunction(env, f, theta, n - 1, &y));
        rhs += env.Omega(origin, e) * std::exp(TiltExponent(theta, i) - log_psi) * rest;
      }
      rec_err = std::max(rec_err, std::abs(z - rhs));
    }
  }
  return {mean_err <= 1e-12 && rec_err <= 1e-14,
          Fmt("max |E Z - 1| = %.3g (n <= 3); max recursion residual = %.3g (n <= 10)", mean_err, rec_err)};
}

// 3. Second moment: enumeration, Monte Carlo and the occupation bound.
Outcome SecondMoment() {
  Outcome out;
  const JumpLaw a = JumpLaw::Uniform(4);
  const Face f = Face::Positive(4);
  const std::vector<double> theta{0.2, -0.1, 0.15};

  const DisorderSpec strong(a, EtaLaw::TwoPoint(a, {1, -0.5, -1, 0.2, 0.3, -0.2, 0.6, -1}), 0.8);
  double enum_err = 0.0;
  for (int n = 1; n <= 3; ++n) {
    double second = 0.0;
    oracle::EnumerateEta(strong, oracle::SitesBelowLevel(f, n), [&](const oracle::AtomMapEnv& env, double p) {
      const auto ref = oracle::EnumerateFacePaths(
          a, f, n, theta, {}, [&](const LatticeSite& x, const Direction& e) { return env.Omega(x, e); });
      second += p * ref.partition * ref.partition;
    });
    enum_err = std::max(enum_err, std::abs(SecondMomentExact(strong, f, theta, n) - second));
  }

  double worst_z = 0.0;
  for (int n : {4, 8, 12}) {
    const std::size_t m = 10000;
    std::vector<double> z2(m);
    ParallelFor(m, 4, [&](std::size_t k) {
      const KeyedEnvironment env(strong, TaskSeed(33, k));
      z2[k] = std::exp(2.0 * LogPartitionFunction(env, f, theta, n));
    });
    const SampleStats s = Summarize(z2);
    const double z = std::abs(s.mean - SecondMomentExact(strong, f, theta, n)) / s.std_error;
    worst_z = std::max(worst_z, z);
  }

  int applicable = 0;
  bool bounded = true;
  for (double eps : {0.1, 0.3, 0.5}) {
    const DisorderSpec spec = TwoPointUniform(eps);
    const double v = MaxCollisionPotential(spec, f);
    const TiltedLaw law(a, f, theta);
    const auto g = GreenFunction(law, 10000);
    const auto k = KhasminskiiBound(v, g.partial_sum + g.tail_estimate);
    if (!k) continue;
    ++applicable;
    for (int n : {4, 12, 40}) bounded = bounded && SecondMomentExact(spec, f, theta, n) <= *k;
  }
  out.pass = enum_err <= 1e-12 && worst_z <= 4.0 && bounded && applicable > 0;
  out.detail = Fmt("enumeration error %.3g (n <= 3); MC deviation %.2f se (M = 1e4, n <= 12); ", enum_err, worst_z) +
               (bounded ? "bound holds" : "bound violated") + " in " + std::to_string(applicable) +
               " applicable cases";
  return out;
}

// 4. Legendre supremum equals the closed-form rate at random interior points.
Outcome Duality() {
  std::mt19937_64 rng(4);
  const JumpLaw a = RandomJumpLaw(4, rng);
  double value_err = 0.0;
  double grad_err = 0.0;
  std::exponential_distribution<double> ex(1.0);
  for (const Face& f : AllFaces(4)) {
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<double> delta(4);
      double s = 0.0;
      for (double& v : delta) s += (v = ex(rng) + 1e-6);
      for (double& v : delta) v /= s;
      delta[3] = 1.0 - delta[0] - delta[1] - delta[2];
      const BoundaryPoint x(f, delta);
      const TiltResult t = LegendreSup(a, x);
      value_err = std::max(value_err, std::abs(t.value - AnnealedRateBoundary(a, x)));
      const auto g = GradLogPsi(a, f, t.theta);
      const auto p = x.Projected();
      for (int i = 0; i < 3; ++i) grad_err = std::max(grad_err, std::abs(g[i] - p[i]));
    }
  }
  return {value_err <= 1e-8 && grad_err <= 1e-10,
          Fmt("max value gap %.3g, max gradient residual %.3g over 16000 points", value_err, grad_err)};
}

// 5. Multinomial rate convergence.
Outcome Stirling() {
  const JumpLaw a = JumpLaw::Uniform(4);
  const BoundaryPoint x(Face::Positive(4), {0.4, 0.3, 0.2, 0.1});
  const double rate = AnnealedRateBoundary(a, x);
  std::vector<double> gaps;
  std::string detail = "gaps";
  for (int n : {8, 16, 32, 64, 128}) {
    const auto counts = AdmissibleSequence(x, n);
    gaps.push_back(std::abs(-AnnealedPointLogProb(a, x.face(), counts) / n - rate));
    detail += Fmt(" %.4f", gaps.back());
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < gaps.size(); ++k) decreasing = decreasing && gaps[k] < gaps[k - 1];
  return {decreasing && gaps.back() <= 0.05, detail};
}

// 6. D_n <= 0.
Outcome Jensen() {
  const Face f = Face::Positive(4);
  const BoundaryPoint x(f, {0.4, 0.3, 0.2, 0.1});
  double worst_exact = -1.0;
  double worst_mc = -1e300;
  std::size_t cells = 0;
  for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const DisorderSpec spec = TwoPointUniform(eps);
    for (int n : {2, 3, 4}) {
      DnOptions o;
      o.mode = Mode::kExact;
      worst_exact = std::max(worst_exact, DnValue(spec, f, AdmissibleSequence(x, n), o).value);
      ++cells;
    }
    for (int n : {8, 16}) {
      for (std::uint64_t batch = 0; batch < 3; ++batch) {
        DnOptions o;
        o.mode = Mode::kMonteCarlo;
        o.samples = 1000;
        o.seed = 100 + batch;
        o.workers = 4;
        const auto d = DnValue(spec, f, AdmissibleSequence(x, n), o);
        worst_mc = std::max(worst_mc, d.value / std::max(d.std_error, 1e-300));
        ++cells;
      }
    }
  }
  return {worst_exact <= 0.0 && worst_mc <= 3.0,
          Fmt("max exact D_n = %.3g; max MC D_n/se = %.3g; %.0f cells", worst_exact, worst_mc,
              static_cast<double>(cells))};
}

// 7. Monotone D_n(eps) with nonpositive exact derivative.
Outcome Monotonicity() {
  const Face f = Face::Positive(4);
  const BoundaryPoint x(f, {0.4, 0.3, 0.2, 0.1});
  DnOptions o;
  o.mode = Mode::kExact;
  bool ok = true;
  double max_rise = -1e300;
  double max_der = -1e300;
  double fd_err = 0.0;
  for (int n : {2, 3}) {
    const auto counts = AdmissibleSequence(x, n);
    ok = ok && DnValue(TwoPointUniform(0.0), f, counts, o).value == 0.0;
    double prev = 0.0;
    for (int k = 1; k <= 21; ++k) {
      const double eps = 0.045 * k;
      const double v = DnValue(TwoPointUniform(eps), f, counts, o).value;
      max_rise = std::max(max_rise, v - prev);
      prev = v;
      const double der = DnDerivative(TwoPointUniform(eps), f, counts, o).value;
      max_der = std::max(max_der, der);
      const double h = 1e-5;
      const double fd = (DnValue(TwoPointUniform(eps + h), f, counts, o).value -
                         DnValue(TwoPointUniform(eps - h), f, counts, o).value) / (2 * h);
      fd_err = std::max(fd_err, std::abs(der - fd));
    }
  }
  ok = ok && max_rise <= 0.0 && max_der <= 0.0 && fd_err <= 1e-6;
  return {ok, Fmt("max D_n increment %.3g, max derivative %.3g, max |derivative - central difference| %.3g",
                  max_rise, max_der, fd_err)};
}

// 8. Green sums, Fourier domination and the emitted threshold.
Outcome GreenStack() {
  const JumpLaw a = JumpLaw::Uniform(4);
  const Face f = Face::Positive(4);
  const std::vector<double> u{1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  const int J = 10000;
  double last_increment = 0.0;
  bool dominated = true;
  bool positive = true;
  for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const TiltedLaw law(a, f, {t * u[0], t * u[1], t * u[2]});
    const auto g = GreenFunction(law, J);
    const auto fb = FourierBound(law);
    double partial = 0.0;
    for (double term : g.terms) {
      partial += term;
      dominated = dominated && fb.bound >= partial;
    }
    last_increment = std::max(last_increment, g.terms[J - 1]);
    positive = positive && 1.0 / g.partial_sum > 0.0;
  }
  const bool converged = last_increment < 1e-10;
  return {converged && dominated && positive,
          Fmt("largest increment before J = 1e4: %.3g (needs < 1e-10); ", last_increment) +
              (dominated ? "Fourier bound dominates" : "Fourier bound fails") + "; threshold " +
              (positive ? "positive" : "not positive")};
}

// 9. Low-disorder equality at n = 32.
Outcome LowDisorder() {
  const JumpLaw a = JumpLaw::Uniform(4);
  const Face f = Face::Positive(4);
  const DisorderSpec spec = TwoPointUniform(0.02);
  std::string detail;
  bool ok = true;
  for (const auto& x : {FaceMinimizer(a, f).minimizer, BoundaryPoint(f, {0.4, 0.3, 0.2, 0.1})}) {
    DnOptions o;
    o.mode = Mode::kMonteCarlo;
    o.samples = 1000;
    o.seed = 2026;
    o.workers = 4;
    const auto d = DnValue(spec, f, AdmissibleSequence(x, 32), o);
    ok = ok && std::abs(d.value) <= 0.01;
    detail += Fmt("D_32 = %.3g (se %.2g) ", d.value, d.std_error);
  }
  return {ok, detail + "at eps = 0.02"};
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Byte-identical CLI output.
Outcome Determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rwre_acceptance";
  fs::create_directories(dir);
  struct Case {
    std::string command;
    std::string config;
    std::string format;
  };
  const std::vector<Case> cases = {
      {"exact", R"({"d": 4, "n": 8, "eps": 0.4, "mode": "mc", "samples": 200})", "json"},
      {"phase", R"({"d": 4, "n_list": [2, 6], "eps_grid": [0.0, 0.3, 0.6], "samples": 100})", "csv"},
      {"simulate", R"({"d": 4, "n": 10, "eps": 0.5, "runs": 5000, "trajectory": true})", "csv"},
      {"green", R"({"d": 4, "J": 500, "eps": 0.2})", "json"},
      {"rate", R"({"d": 4, "delta": [0.4, 0.3, 0.2, 0.1]})", "json"},
  };
  int identical = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const fs::path cfg = dir / ("config" + std::to_string(i) + ".json");
    std::ofstream(cfg) << cases[i].config;
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("out" + std::to_string(i) + "_" + std::to_string(rep));
      const std::string cmd = std::string("\"") + RWRE_CLI_PATH + "\" " + cases[i].command + " --config \"" +
                              cfg.string() + "\" --seed 77 --format " + cases[i].format + " --workers " +
                              std::to_string(1 + 3 * rep) + " --out \"" + out.string() + "\" 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
      outputs[rep] = ReadFile(out);
      if (cases[i].command == "phase") outputs[rep] += ReadFile(out.string() + ".json");
    }
    identical += !outputs[0].empty() && outputs[0] == outputs[1];
  }
  return {identical == static_cast<int>(cases.size()),
          std::to_string(identical) + "/" + std::to_string(cases.size()) +
              " commands byte-identical across repeated runs (1 and 4 workers)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "path-sum oracle equivalence", 60, PathSumOracle},
      {2, "martingale identities", 60, Martingale},
      {3, "second-moment chain", 300, SecondMoment},
      {4, "Legendre duality", 30, Duality},
      {5, "multinomial rate convergence", 1, Stirling},
      {6, "Jensen dominance", 0, Jensen},
      {7, "monotonicity in eps", 300, Monotonicity},
      {8, "Green/Khasminskii/Fourier stack", 120, GreenStack},
      {9, "low-disorder equality", 600, LowDisorder},
      {10, "determinism", 0, Determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += Fmt(" [runtime %.1f s exceeds %.0f s]", secs, c.limit_seconds);
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << Fmt(" [%.2f s]", secs) << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
