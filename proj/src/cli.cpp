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

#include "rwre/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "rwre/phase_scan.hpp"
#include "rwre/rate_functions.hpp"
#include "rwre/stochastics.hpp"

namespace rwre::cli {

namespace {

// Keys present in every record; the CSV writer lifts them into columns.
constexpr const char* kCommonKeys[] = {"record", "config_hash", "seed", "mode"};

template <class T>
T Get(const Json& raw, const char* key, T fallback) {
  return raw.contains(key) ? raw.at(key).get<T>() : fallback;
}

struct Laws {
  int d = 4;
  Face face;
  JumpLaw alpha;
  EtaLaw eta;
};

EtaLaw ParseEta(const Json& spec, const JumpLaw& alpha) {
  if (spec.is_string()) {
    if (spec.get<std::string>() == "two_point") return EtaLaw::TwoPoint(alpha);
    throw ValidationError("unknown eta preset: " + spec.get<std::string>());
  }
  if (!spec.is_object()) throw ValidationError("eta must be a preset name or an object");
  if (spec.contains("file")) {
    std::ifstream in(spec.at("file").get<std::string>());
    if (!in) throw ValidationError("cannot open eta file " + spec.at("file").get<std::string>());
    return ParseEta(Json::parse(in), alpha);
  }
  if (spec.contains("preset")) {
    const auto preset = spec.at("preset").get<std::string>();
    if (preset != "two_point") throw ValidationError("unknown eta preset: " + preset);
    if (spec.contains("raw")) return EtaLaw::TwoPoint(alpha, spec.at("raw").get<std::vector<double>>());
    return EtaLaw::TwoPoint(alpha);
  }
  auto support = spec.at("support").get<std::vector<std::vector<double>>>();
  if (spec.contains("weights")) {
    return EtaLaw(std::move(support), spec.at("weights").get<std::vector<double>>());
  }
  return EtaLaw::UniformDiscrete(std::move(support));
}

Laws ParseLaws(const Json& raw) {
  Laws laws;
  int inferred = 4;
  if (raw.contains("face")) {
    inferred = static_cast<int>(raw.at("face").size());
  } else if (raw.contains("alpha") && raw.at("alpha").is_array()) {
    inferred = static_cast<int>(raw.at("alpha").size() / 2);
  }
  laws.d = Get(raw, "d", inferred);
  if (laws.d < kMinDimension || laws.d > kMaxDimension) {
    throw ValidationError("d must lie in [2, 8]");
  }
  laws.face = raw.contains("face") ? Face(raw.at("face").get<std::vector<int>>())
                                   : Face::Positive(laws.d);
  if (laws.face.dimension() != laws.d) throw ValidationError("face length must equal d");
  const Json alpha = raw.value("alpha", Json("uniform"));
  if (alpha.is_string()) {
    if (alpha.get<std::string>() != "uniform") throw ValidationError("alpha must be \"uniform\" or an array");
    laws.alpha = JumpLaw::Uniform(laws.d);
  } else {
    laws.alpha = JumpLaw(alpha.get<std::vector<double>>());
  }
  if (laws.alpha.dimension() != laws.d) throw ValidationError("alpha must have 2d entries");
  laws.eta = ParseEta(raw.value("eta", Json("two_point")), laws.alpha);
  return laws;
}

Mode ParseMode(const std::string& s) {
  if (s == "exact") return Mode::kExact;
  if (s == "mc") return Mode::kMonteCarlo;
  throw ValidationError("mode must be auto, exact or mc");
}

Json Stamp(const RunConfig& config, Json record, const char* mode) {
  record["config_hash"] = config.hash;
  record["seed"] = config.seed;
  record["mode"] = mode;
  return record;
}

BoundaryPoint TargetPoint(const RunConfig& config) {
  if (config.delta) return BoundaryPoint(config.face, *config.delta);
  return FaceMinimizer(config.alpha, config.face).minimizer;
}

DisorderSpec SpecOf(const RunConfig& config, double eps) {
  return DisorderSpec(config.alpha, config.eta, eps);
}

std::string DirectionName(const Direction& e) {
  return std::string(e.sign > 0 ? "+" : "-") + "e" + std::to_string(e.axis + 1);
}

// Plain recursion over all d^n face paths; independent of the DP sweeps.
template <EnvironmentView Env>
void EnumeratePaths(const Env& env, const Face& face, const std::vector<double>& tilt,
                    std::span<const int> target, int remaining, LatticeSite x, std::vector<int>& used,
                    double plain, double tilted, double& z, double& p) {
  if (remaining == 0) {
    z += tilted;
    if (std::equal(used.begin(), used.end(), target.begin())) p += plain;
    return;
  }
  for (int i = 0; i < face.dimension(); ++i) {
    const Direction e = face.jump(i);
    const double w = env.Omega(x, e);
    ++used[i];
    EnumeratePaths(env, face, tilt, target, remaining - 1, x.Step(e), used, plain * w,
                   tilted * w * tilt[i], z, p);
    --used[i];
  }
}

std::string CsvField(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string ConfigHash(const Json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig ParseRunConfig(const Json& raw) {
  if (!raw.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  try {
    Laws laws = ParseLaws(raw);
    c.d = laws.d;
    c.face = laws.face;
    c.alpha = laws.alpha;
    c.eta = laws.eta;
    c.eps = Get(raw, "eps", 0.0);
    c.eps_grid = Get(raw, "eps_grid", DefaultEpsGrid());
    c.n = Get(raw, "n", 6);
    c.n_list = Get(raw, "n_list", c.n_list);
    c.theta = Get(raw, "theta", ProjectedVector(static_cast<std::size_t>(c.d - 1), 0.0));
    c.theta_grid = Get(raw, "theta_grid", std::vector<ProjectedVector>{c.theta});
    if (raw.contains("delta")) c.delta = raw.at("delta").get<std::vector<double>>();
    if (raw.contains("counts")) c.counts = raw.at("counts").get<Composition>();
    c.samples = Get<std::size_t>(raw, "samples", 1000);
    c.seed = Get<std::uint64_t>(raw, "seed", 0);
    c.green_j = Get(raw, "J", 1000);
    c.runs = Get<std::size_t>(raw, "runs", 10000);
    if (raw.contains("tau")) c.tau = raw.at("tau").get<double>();
    if (raw.contains("eps_prime")) c.eps_prime = raw.at("eps_prime").get<double>();
    const auto mode = Get<std::string>(raw, "mode", "auto");
    if (mode != "auto") c.mode = ParseMode(mode);
    c.assignment_budget = Get<std::uint64_t>(raw, "assignment_budget", kDefaultAssignmentBudget);
    c.oracle = Get(raw, "oracle", false);
    c.trajectory = Get(raw, "trajectory", false);
    c.workers = Get(raw, "workers", 1);
    const double budget_mb = Get(raw, "budget_mb", static_cast<double>(kDefaultBudgetBytes >> 20));
    if (!(budget_mb > 0.0)) throw ValidationError("budget_mb must be positive");
    c.budget_bytes = static_cast<std::size_t>(budget_mb * 1024.0 * 1024.0);
    c.format = Get<std::string>(raw, "format", "json");
    c.out = Get<std::string>(raw, "out", "");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }

  if (c.format != "json" && c.format != "csv") throw ValidationError("format must be json or csv");
  if (c.n < 1) throw ValidationError("n must be >= 1");
  for (int n : c.n_list) {
    if (n < 1) throw ValidationError("n_list entries must be >= 1");
  }
  for (const auto& th : c.theta_grid) {
    if (static_cast<int>(th.size()) != c.d - 1) throw ValidationError("theta must have d-1 entries");
  }
  if (static_cast<int>(c.theta.size()) != c.d - 1) throw ValidationError("theta must have d-1 entries");
  if (c.green_j < 1) throw ValidationError("J must be >= 1");
  if (c.workers < 1) throw ValidationError("workers must be >= 1");
  if (c.delta) BoundaryPoint(c.face, *c.delta);
  // Constructing the disorder spec validates eps and the eta law.
  SpecOf(c, c.eps);

  Json canon;
  canon["d"] = c.d;
  canon["face"] = c.face.signs();
  canon["alpha"] = c.alpha.values();
  canon["eta"] = {{"support", c.eta.support()}, {"weights", c.eta.weights()}};
  canon["eps"] = c.eps;
  canon["eps_grid"] = c.eps_grid;
  canon["n"] = c.n;
  canon["n_list"] = c.n_list;
  canon["theta"] = c.theta;
  canon["theta_grid"] = c.theta_grid;
  canon["delta"] = c.delta ? Json(*c.delta) : Json(nullptr);
  canon["counts"] = c.counts ? Json(*c.counts) : Json(nullptr);
  canon["samples"] = c.samples;
  canon["seed"] = c.seed;
  canon["J"] = c.green_j;
  canon["runs"] = c.runs;
  canon["tau"] = c.tau ? Json(*c.tau) : Json(nullptr);
  canon["eps_prime"] = c.eps_prime ? Json(*c.eps_prime) : Json(nullptr);
  canon["mode"] = c.mode ? ToString(*c.mode) : "auto";
  canon["assignment_budget"] = c.assignment_budget;
  canon["oracle"] = c.oracle;
  canon["trajectory"] = c.trajectory;
  canon["budget_bytes"] = c.budget_bytes;
  canon["format"] = c.format;
  c.canonical = canon;
  c.hash = ConfigHash(canon);
  return c;
}

std::vector<Json> CmdRate(const RunConfig& config) {
  std::vector<Json> out;
  const FaceSummary summary = FaceMinimizer(config.alpha, config.face);
  out.push_back(Stamp(config,
                      {{"record", "face_summary"},
                       {"face", config.face.signs()},
                       {"min_value", summary.min_value},
                       {"minimizer", summary.minimizer.delta()}},
                      "exact"));
  const BoundaryPoint x = TargetPoint(config);
  out.push_back(Stamp(config,
                      {{"record", "annealed_rate"},
                       {"delta", x.delta()},
                       {"value", AnnealedRateBoundary(config.alpha, x)}},
                      "exact"));
  const TiltResult tilt = LegendreSup(config.alpha, x);
  out.push_back(Stamp(config,
                      {{"record", "tilt"},
                       {"delta", x.delta()},
                       {"theta", tilt.attained ? Json(tilt.theta) : Json(nullptr)},
                       {"value", tilt.value},
                       {"attained", tilt.attained},
                       {"iterations", tilt.iterations}},
                      "exact"));
  return out;
}

std::vector<Json> CmdExact(const RunConfig& config) {
  std::vector<Json> out;
  const DisorderSpec spec = SpecOf(config, config.eps);
  const Composition counts = config.counts ? *config.counts : AdmissibleSequence(TargetPoint(config), config.n);
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  const KeyedEnvironment env(spec, config.seed);
  const Face& face = config.face;

  auto dp_record = [&](DpKind kind, double log_value, bool with_theta, bool with_seed) {
    Json r = {{"record", "dp"},
              {"kind", ToString(kind)},
              {"n", n},
              {"eps", config.eps},
              {"counts", counts},
              {"log_value", log_value},
              {"stderr", 0.0}};
    r["theta"] = with_theta ? Json(config.theta) : Json(nullptr);
    r["env_seed"] = with_seed ? Json(config.seed) : Json(nullptr);
    return Stamp(config, r, "exact");
  };

  const double annealed = AnnealedPointLogProb(config.alpha, face, counts);
  const double quenched = QuenchedPointLogProb(env, face, counts);
  const double log_z = LogPartitionFunction(env, face, config.theta, n);
  out.push_back(dp_record(DpKind::kAnnealedProb, annealed, false, false));
  out.push_back(dp_record(DpKind::kQuenchedProb, quenched, false, true));
  out.push_back(dp_record(DpKind::kPartition, log_z, true, true));
  out.push_back(dp_record(DpKind::kSecondMoment,
                          std::log(SecondMomentExact(spec, face, config.theta, n, config.budget_bytes)),
                          true, false));

  DnOptions opts;
  opts.mode = config.mode;
  opts.samples = config.samples;
  opts.seed = config.seed;
  opts.assignment_budget = config.assignment_budget;
  opts.workers = config.workers;
  const DnEstimate dn = DnValue(spec, face, counts, opts);
  out.push_back(Stamp(config,
                      {{"record", "dn"},
                       {"n", n},
                       {"eps", config.eps},
                       {"counts", counts},
                       {"value", dn.value},
                       {"stderr", dn.std_error},
                       {"samples", dn.samples}},
                      ToString(dn.mode)));
  if (config.eps > 0.0) {
    const DnEstimate der = DnDerivative(spec, face, counts, opts);
    const double per_env = QuenchedPointLogProbWithDerivative(env, face, counts).d_log_prob;
    out.push_back(Stamp(config,
                        {{"record", "dn_derivative"},
                         {"n", n},
                         {"eps", config.eps},
                         {"counts", counts},
                         {"value", der.value},
                         {"stderr", der.std_error},
                         {"samples", der.samples},
                         {"per_env_d_log_prob", per_env}},
                        ToString(der.mode)));
  }

  if (config.oracle) {
    if (n > 10) throw ValidationError("the brute-force oracle is limited to n <= 10");
    const double log_psi = LogPsi(config.alpha, face, config.theta);
    std::vector<double> tilt(static_cast<std::size_t>(face.dimension()));
    for (int i = 0; i < face.dimension(); ++i) tilt[i] = std::exp(TiltExponent(config.theta, i) - log_psi);
    std::vector<int> used(static_cast<std::size_t>(face.dimension()), 0);
    double z = 0.0;
    double p = 0.0;
    EnumeratePaths(env, face, tilt, counts, n, LatticeSite(face.dimension()), used, 1.0, 1.0, z, p);
    const double diff = std::max(std::abs(std::log(z) - log_z), std::abs(std::log(p) - quenched));
    out.push_back(Stamp(config,
                        {{"record", "oracle"},
                         {"n", n},
                         {"max_abs_diff", diff},
                         {"oracle", diff <= 1e-12 ? "match" : "mismatch"}},
                        "exact"));
  }
  return out;
}

std::vector<Json> CmdGreen(const RunConfig& config) {
  std::vector<Json> out;
  const DisorderSpec spec = SpecOf(config, config.eps);
  const double v_max = MaxCollisionPotential(spec, config.face);
  for (const auto& theta : config.theta_grid) {
    const TiltedLaw law(config.alpha, config.face, theta);
    const GreenResult g = GreenFunction(law, config.green_j);
    const int J = g.truncation;
    out.push_back(Stamp(config,
                        {{"record", "green"},
                         {"theta", theta},
                         {"J", J},
                         {"partial_sum", g.partial_sum},
                         {"last_term", g.terms[J]},
                         {"tail_estimate", g.tail_estimate},
                         {"tail_label", "heuristic"},
                         {"divergence_warning", g.divergence_warning},
                         {"eps_prime", 1.0 / g.partial_sum}},
                        "exact"));
    if (g.divergence_warning) {
      out.push_back(Stamp(config,
                          {{"record", "warning"},
                           {"theta", theta},
                           {"message", "difference walk is recurrent for d <= 3; green sums diverge"}},
                          "exact"));
    }
    const FourierReport f = FourierBound(law);
    out.push_back(Stamp(config,
                        {{"record", "fourier"},
                         {"theta", theta},
                         {"bound", f.bound},
                         {"constant", f.constant},
                         {"radius", f.radius},
                         {"inner_radius", f.inner_radius},
                         {"c0", f.c0},
                         {"dominates", f.bound >= g.partial_sum}},
                        "exact"));
    const auto k = KhasminskiiBound(v_max, g.partial_sum);
    out.push_back(Stamp(config,
                        {{"record", "khasminskii"},
                         {"theta", theta},
                         {"v_max", v_max},
                         {"eta", g.partial_sum},
                         {"product", v_max * g.partial_sum},
                         {"applicable", k.has_value()},
                         {"bound", k ? Json(*k) : Json("inapplicable")}},
                        "exact"));
  }
  return out;
}

std::vector<Json> CmdPhase(const RunConfig& config) {
  std::vector<Json> out;
  if (config.d < 4) {
    out.push_back(Stamp(config,
                        {{"record", "warning"},
                         {"message", "equality diagnostics are only meaningful for d >= 4"}},
                        "exact"));
  }
  const DisorderSpec family = SpecOf(config, 0.0);
  const BoundaryPoint x = TargetPoint(config);
  ScanOptions opts;
  opts.samples = config.samples;
  opts.seed = config.seed;
  opts.assignment_budget = config.assignment_budget;
  opts.mode = config.mode;
  opts.workers = config.workers;
  const ScanResult scan = Scan(family, x, config.n_list, config.eps_grid, opts);
  for (std::size_t c = 0; c < scan.n_list.size(); ++c) {
    for (std::size_t k = 0; k < scan.eps_grid.size(); ++k) {
      const DnEstimate& cell = scan.table[c][k];
      out.push_back(Stamp(config,
                          {{"record", "dn_cell"},
                           {"n", scan.n_list[c]},
                           {"eps", scan.eps_grid[k]},
                           {"counts", scan.counts[c]},
                           {"value", cell.value},
                           {"stderr", cell.std_error}},
                          ToString(cell.mode)));
    }
  }
  const EpsCEstimate est = EstimateEpsC(scan, config.tau);
  out.push_back(Stamp(config,
                      {{"record", "eps_c"},
                       {"n", est.n},
                       {"eps_c_hat", est.eps_c_hat},
                       {"lower", est.lower},
                       {"upper", est.upper},
                       {"tau", est.tau},
                       {"no_crossing", est.no_crossing},
                       {"label", est.label}},
                      ToString(scan.table.back().back().mode)));
  const LipschitzReport lip = LipschitzCheck(scan, config.eps_prime.value_or(scan.eps_grid.back()));
  Json cols = Json::array();
  for (const auto& col : lip.columns) {
    cols.push_back({{"n", col.n}, {"c_hat", col.c_hat}, {"max_increment", col.max_increment}});
  }
  out.push_back(Stamp(config,
                      {{"record", "lipschitz"},
                       {"eps_prime", lip.eps_prime},
                       {"bound", lip.bound},
                       {"columns", cols},
                       {"finite", lip.finite},
                       {"within_bound", lip.within_bound}},
                      ToString(scan.table.back().back().mode)));
  const std::set<int> distinct(scan.n_list.begin(), scan.n_list.end());
  if (distinct.size() >= 2) {
    const Extrapolation ex = RichardsonExtrapolate(scan);
    for (std::size_t k = 0; k < scan.eps_grid.size(); ++k) {
      out.push_back(Stamp(config,
                          {{"record", "dn_extrapolated"},
                           {"eps", scan.eps_grid[k]},
                           {"n_small", ex.n_small},
                           {"n_large", ex.n_large},
                           {"value", ex.values[k]},
                           {"label", ex.label}},
                          ToString(scan.table.back()[k].mode)));
    }
  }
  return out;
}

std::vector<Json> CmdSimulate(const RunConfig& config) {
  std::vector<Json> out;
  if (config.runs < 2) throw ValidationError("simulate needs runs >= 2");
  const DisorderSpec spec = SpecOf(config, config.eps);
  const Face& face = config.face;
  const int n = config.n;
  const double log_psi = LogPsi(config.alpha, face, config.theta);
  std::vector<double> in_face(config.runs);
  std::vector<double> weight(config.runs);
  ParallelFor(config.runs, config.workers, [&](std::size_t r) {
    const std::uint64_t task = TaskSeed(config.seed, r);
    const KeyedEnvironment env(spec, task);
    const Trajectory t = SimulateWalk(env, face, n, task);
    in_face[r] = t.in_face ? 1.0 : 0.0;
    double w = 0.0;
    if (t.in_face) {
      double dot = 0.0;
      for (std::size_t k = 0; k < config.theta.size(); ++k) dot += config.theta[k] * t.projected_sum[k];
      w = std::exp(dot - n * log_psi);
    }
    weight[r] = w;
  });
  const SampleStats pb = Summarize(in_face);
  const SampleStats zw = Summarize(weight);
  out.push_back(Stamp(config,
                      {{"record", "simulate"},
                       {"n", n},
                       {"eps", config.eps},
                       {"runs", config.runs},
                       {"p_bn", pb.mean},
                       {"stderr", pb.std_error},
                       {"annealed_p_bn", std::pow(config.alpha.FaceMass(face), n)},
                       {"z_mean", zw.mean},
                       {"z_stderr", zw.std_error}},
                      "mc"));
  if (config.trajectory) {
    const std::uint64_t task = TaskSeed(config.seed, 0);
    const Trajectory t = SimulateWalk(KeyedEnvironment(spec, task), face, n, task);
    for (int j = 0; j <= n; ++j) {
      const auto coords = t.sites[j].coords();
      out.push_back(Stamp(config,
                          {{"record", "trajectory_step"},
                           {"step", j},
                           {"coords", std::vector<int>(coords.begin(), coords.end())},
                           {"jump", j == 0 ? Json(nullptr) : Json(DirectionName(t.jumps[j - 1]))}},
                          "mc"));
    }
  }
  return out;
}

std::vector<Json> CmdValidate(const Json& raw) {
  Json record = {{"record", "validation"}};
  std::vector<std::string> messages;
  bool ok = true;
  try {
    const Laws laws = ParseLaws(raw);
    const EtaLawReport rep = ValidateEtaLaw(laws.eta, laws.alpha);
    record["not_singleton"] = rep.not_singleton;
    record["support_in_e_alpha"] = rep.support_in_e_alpha;
    record["mean_zero"] = rep.mean_zero;
    record["dimensions_match"] = rep.dimensions_match;
    messages = rep.messages;
    ok = rep.ok();
    if (laws.d < 4) messages.push_back("d < 4: equality diagnostics are not meaningful");
    if (ok) ParseRunConfig(raw);
  } catch (const ValidationError& e) {
    ok = false;
    messages.push_back(e.what());
  } catch (const nlohmann::json::exception& e) {
    ok = false;
    messages.push_back(std::string("malformed config: ") + e.what());
  }
  record["ok"] = ok;
  record["messages"] = messages;
  record["config_hash"] = ConfigHash(raw);
  record["seed"] = raw.is_object() ? raw.value("seed", Json(0)) : Json(0);
  record["mode"] = "exact";
  std::vector<Json> out{record};
  if (ok) {
    const RunConfig config = ParseRunConfig(raw);
    const DisorderSpec spec = SpecOf(config, config.eps);
    // The window is the set of sites a length-n face path can leave from.
    const EnvironmentWindow window =
        SampleWindow(spec, config.seed, LevelRelevantSites(config.face, config.n), config.budget_bytes);
    out.push_back(Stamp(config,
                        {{"record", "disorder_spec"},
                         {"alpha", spec.alpha().values()},
                         {"eta", {{"support", spec.eta().support()}, {"weights", spec.eta().weights()}}},
                         {"eps", spec.eps()},
                         {"kappa", spec.Ellipticity()},
                         {"dis_spec", spec.eps()},
                         {"dis_window", Disorder(window)},
                         {"imb_spec", spec.ImbalanceBound(config.face)},
                         {"imb_window", Imbalance(window, config.face)},
                         {"window_sites", window.size()}},
                        "exact"));
  }
  return out;
}

void WriteJson(std::ostream& out, const std::vector<Json>& records) {
  out << Json{{"records", records}}.dump(2) << '\n';
}

void WriteCsv(std::ostream& out, const std::vector<Json>& records) {
  out << "record_index,record,config_hash,seed,mode,field,value\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Json& r = records[i];
    const std::string prefix = std::to_string(i) + "," + CsvField(r.at("record")) + "," +
                               CsvField(r.at("config_hash")) + "," + CsvField(r.at("seed")) + "," +
                               CsvField(r.at("mode")) + ",";
    for (const auto& [key, value] : r.items()) {
      if (std::find(std::begin(kCommonKeys), std::end(kCommonKeys), key) != std::end(kCommonKeys)) {
        continue;
      }
      out << prefix << key << "," << CsvField(value) << '\n';
    }
  }
}

void WritePhaseTableCsv(std::ostream& out, const std::vector<Json>& records) {
  std::vector<int> ns;
  std::map<double, std::map<int, const Json*>> rows;
  for (const Json& r : records) {
    if (r.at("record") != "dn_cell") continue;
    const int n = r.at("n").get<int>();
    if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
    rows[r.at("eps").get<double>()][n] = &r;
  }
  out << "eps";
  for (int n : ns) out << ",D_" << n << ",stderr_" << n << ",mode_" << n;
  out << '\n';
  for (const auto& [eps, cells] : rows) {
    out << Json(eps).dump();
    for (int n : ns) {
      const Json& c = *cells.at(n);
      out << ',' << c.at("value").dump() << ',' << c.at("stderr").dump() << ','
          << c.at("mode").get<std::string>();
    }
    out << '\n';
  }
}

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo diagnostics for random walks in random environment"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<int> workers;
  std::optional<double> budget_mb;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--budget-mb", budget_mb, "memory budget for DP state spaces")->check(CLI::PositiveNumber);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"rate", "face minimizer, annealed rate and Legendre tilt at x"},
      {"exact", "point probabilities, partition function, second moment and D_n"},
      {"green", "collision Green function with Khas'minskii and Fourier bounds"},
      {"phase", "D_n(eps) scan, eps_c bracket and Lipschitz check"},
      {"simulate", "quenched walk simulation"},
      {"validate", "check a configuration without running anything"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  auto fail = [&](ExitCode code, const char* type, const std::string& message) {
    err << Json{{"record", "error"}, {"type", type}, {"message", message}}.dump() << '\n';
    return static_cast<int>(code);
  };

  try {
    Json raw = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) return fail(ExitCode::kValidation, "validation", "cannot open config " + config_path);
      raw = Json::parse(in);
    }
    if (seed) raw["seed"] = *seed;
    if (out_path) raw["out"] = *out_path;
    if (format) raw["format"] = *format;
    if (workers) raw["workers"] = *workers;
    if (budget_mb) raw["budget_mb"] = *budget_mb;

    std::vector<Json> records;
    std::string fmt = raw.is_object() ? raw.value("format", std::string("json")) : "json";
    std::string dest = raw.is_object() ? raw.value("out", std::string()) : "";
    bool validation_failed = false;
    if (command == "validate") {
      records = CmdValidate(raw);
      validation_failed = !records.front().at("ok").get<bool>();
    } else {
      const RunConfig config = ParseRunConfig(raw);
      if (command == "rate") records = CmdRate(config);
      if (command == "exact") records = CmdExact(config);
      if (command == "green") records = CmdGreen(config);
      if (command == "phase") records = CmdPhase(config);
      if (command == "simulate") records = CmdSimulate(config);
      for (const Json& r : records) {
        if (r.at("record") == "warning") err << "warning: " << r.at("message").get<std::string>() << '\n';
      }
    }

    std::ofstream file;
    if (!dest.empty()) {
      file.open(dest, std::ios::binary);
      if (!file) return fail(ExitCode::kValidation, "validation", "cannot open output " + dest);
    }
    std::ostream& sink = dest.empty() ? out : file;
    if (fmt == "csv" && command == "phase") {
      WritePhaseTableCsv(sink, records);
      if (!dest.empty()) {
        std::ofstream sidecar(dest + ".json", std::ios::binary);
        WriteJson(sidecar, records);
      }
    } else if (fmt == "csv") {
      WriteCsv(sink, records);
    } else {
      WriteJson(sink, records);
    }
    return static_cast<int>(validation_failed ? ExitCode::kValidation : ExitCode::kOk);
  } catch (const ValidationError& e) {
    return fail(ExitCode::kValidation, "validation", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ExitCode::kValidation, "validation", e.what());
  } catch (const ResourceLimitError& e) {
    return fail(ExitCode::kResourceLimit, "resource_limit", e.what());
  } catch (const NumericalError& e) {
    return fail(ExitCode::kNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(ExitCode::kFailure, "internal", e.what());
  }
}

}  // namespace rwre::cli
