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

#include "rwre/environment.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace rwre {

namespace {

constexpr double kSimplexTol = 1e-12;

}  // namespace

JumpLaw::JumpLaw(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() % 2 != 0) throw ValidationError("jump law needs an even number (2d) of entries");
  const int d = dimension();
  if (d < kMinDimension || d > kMaxDimension) {
    throw ValidationError("jump law dimension must lie in [2, 8]");
  }
  double sum = 0.0;
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("jump law entries must be positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) throw ValidationError("jump law must sum to 1");
}

JumpLaw JumpLaw::Uniform(int d) {
  return JumpLaw(std::vector<double>(static_cast<std::size_t>(2 * d), 1.0 / (2.0 * d)));
}

double JumpLaw::Min() const { return *std::min_element(alpha_.begin(), alpha_.end()); }

double JumpLaw::FaceMass(const Face& face) const {
  double s = 0.0;
  for (int i = 0; i < face.dimension(); ++i) s += (*this)(face.jump(i));
  return s;
}

EtaLaw::EtaLaw(std::vector<std::vector<double>> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.empty()) throw ValidationError("eta support is empty");
  if (weights_.size() != support_.size()) {
    throw ValidationError("eta support and weights differ in length");
  }
  const std::size_t width = support_.front().size();
  double total = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (support_[k].size() != width) throw ValidationError("eta support vectors differ in length");
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k])) {
      throw ValidationError("eta weights must be positive");
    }
    total += weights_[k];
  }
  cumulative_.resize(weights_.size());
  double run = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    weights_[k] /= total;
    run += weights_[k];
    cumulative_[k] = run;
  }
  cumulative_.back() = 1.0;
}

EtaLaw EtaLaw::TwoPoint(const JumpLaw& alpha, const std::vector<double>& raw) {
  if (raw.size() != alpha.values().size()) {
    throw ValidationError("two-point direction must have 2d entries");
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) mean += alpha.at(static_cast<int>(i)) * raw[i];
  std::vector<double> r(raw.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    r[i] = raw[i] - mean;
    sup = std::max(sup, std::abs(r[i]));
  }
  if (!(sup > 0.0)) throw ValidationError("two-point direction is constant; eta would vanish");
  std::vector<double> neg(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] /= sup;
    neg[i] = -r[i];
  }
  return EtaLaw({r, neg}, {0.5, 0.5});
}

EtaLaw EtaLaw::TwoPoint(const JumpLaw& alpha) {
  std::vector<double> raw(alpha.values().size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return TwoPoint(alpha, raw);
}

EtaLaw EtaLaw::UniformDiscrete(std::vector<std::vector<double>> support) {
  std::vector<double> w(support.size(), 1.0);
  return EtaLaw(std::move(support), std::move(w));
}

double EtaLaw::Covariance(const Direction& e, const Direction& e2) const {
  double c = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    c += weights_[k] * support_[k][e.Index()] * support_[k][e2.Index()];
  }
  return c;
}

std::uint32_t EtaLaw::AtomForUniform(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = static_cast<std::size_t>(it - cumulative_.begin());
  return static_cast<std::uint32_t>(std::min(k, cumulative_.size() - 1));
}

EtaLawReport ValidateEtaLaw(const EtaLaw& eta, const JumpLaw& alpha) {
  EtaLawReport rep;
  const std::size_t width = alpha.values().size();
  rep.dimensions_match = eta.size() > 0 && eta.support().front().size() == width;
  if (!rep.dimensions_match) {
    rep.messages.push_back("eta support vectors must have 2d entries");
    return rep;
  }
  // distinct atoms, not merely several copies of one vector
  rep.not_singleton = false;
  for (std::size_t k = 1; k < eta.size() && !rep.not_singleton; ++k) {
    for (std::size_t i = 0; i < width; ++i) {
      if (std::abs(eta.support()[k][i] - eta.support()[0][i]) > kSimplexTol) {
        rep.not_singleton = true;
        break;
      }
    }
  }
  if (!rep.not_singleton) rep.messages.push_back("support of the eta law is a singleton");

  rep.support_in_e_alpha = true;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const auto& r = eta.support()[k];
    double drift = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      drift += alpha.at(static_cast<int>(i)) * r[i];
      sup = std::max(sup, std::abs(r[i]));
    }
    if (std::abs(drift) > kSimplexTol || std::abs(sup - 1.0) > kSimplexTol) {
      rep.support_in_e_alpha = false;
      std::ostringstream msg;
      msg << "atom " << k << " is not in E_alpha (sum alpha r = " << drift
          << ", sup |r| = " << sup << ")";
      rep.messages.push_back(msg.str());
    }
  }

  rep.mean_zero = true;
  for (std::size_t i = 0; i < width; ++i) {
    double m = 0.0;
    for (std::size_t k = 0; k < eta.size(); ++k) m += eta.weights()[k] * eta.support()[k][i];
    if (std::abs(m) > kSimplexTol) {
      rep.mean_zero = false;
      std::ostringstream msg;
      msg << "eta has nonzero mean " << m << " in direction " << i;
      rep.messages.push_back(msg.str());
    }
  }
  return rep;
}

DisorderSpec::DisorderSpec(JumpLaw alpha, EtaLaw eta, double eps)
    : alpha_(std::move(alpha)), eta_(std::move(eta)), eps_(eps) {
  if (!(eps_ >= 0.0 && eps_ < 1.0)) throw ValidationError("eps must lie in [0, 1)");
  const auto rep = ValidateEtaLaw(eta_, alpha_);
  if (!rep.ok()) {
    std::string msg = "eta law is invalid:";
    for (const auto& m : rep.messages) msg += " " + m + ";";
    throw ValidationError(msg);
  }
}

double DisorderSpec::PairMoment(const Direction& e, const Direction& e2) const {
  return alpha_(e) * alpha_(e2) * (1.0 + eps_ * eps_ * eta_.Covariance(e, e2));
}

double DisorderSpec::ImbalanceBound(const Face& face) const {
  const double mass = alpha_.FaceMass(face);
  double worst = 0.0;
  for (std::size_t k = 0; k < eta_.size(); ++k) {
    double shift = 0.0;
    for (int i = 0; i < face.dimension(); ++i) {
      shift += alpha_(face.jump(i)) * eps_ * eta_.value(k, face.jump(i));
    }
    worst = std::max(worst, std::abs(shift) / mass);
  }
  return worst;
}

std::uint32_t AssignedEnvironment::AtomAt(const LatticeSite& x) const {
  const auto it = atoms_.find(x);
  if (it == atoms_.end()) throw ValidationError("site has no assigned eta atom");
  return it->second;
}

EnvironmentWindow SampleWindow(const DisorderSpec& spec, std::uint64_t seed,
                               std::vector<LatticeSite> region, std::size_t budget_bytes) {
  const std::size_t width = spec.alpha().values().size();
  const std::size_t per_site = width * sizeof(double) + sizeof(LatticeSite) * 2 + 32;
  if (region.size() > budget_bytes / per_site) {
    throw ResourceLimitError("environment window of " + std::to_string(region.size()) +
                             " sites exceeds the memory budget");
  }
  EnvironmentWindow w;
  w.spec_ = spec;
  w.seed_ = seed;
  w.region_ = std::move(region);
  const KeyedEnvironment keyed(spec, seed);
  w.atoms_.reserve(w.region_.size());
  w.omega_.reserve(w.region_.size() * width);
  w.index_.reserve(w.region_.size());
  for (std::size_t i = 0; i < w.region_.size(); ++i) {
    const auto& x = w.region_[i];
    if (x.dimension() != spec.dimension()) throw ValidationError("region site has wrong dimension");
    const std::uint32_t atom = keyed.AtomAt(x);
    w.atoms_.push_back(atom);
    for (std::size_t k = 0; k < width; ++k) {
      w.omega_.push_back(spec.Omega(atom, Direction::FromIndex(static_cast<int>(k))));
    }
    w.index_.emplace(x, i);
  }
  return w;
}

std::size_t EnvironmentWindow::Find(const LatticeSite& x) const {
  const auto it = index_.find(x);
  if (it == index_.end()) throw ValidationError("site lies outside the environment window");
  return it->second;
}

std::span<const double> EnvironmentWindow::WeightsAt(std::size_t i) const {
  const std::size_t width = spec_.alpha().values().size();
  return {omega_.data() + i * width, width};
}

double EnvironmentWindow::Omega(const LatticeSite& x, const Direction& e) const {
  return WeightsAt(Find(x))[e.Index()];
}

double EnvironmentWindow::Eta(const LatticeSite& x, const Direction& e) const {
  return spec_.eta().value(atoms_[Find(x)], e);
}

void EnvironmentWindow::WriteCsv(std::ostream& out) const {
  const int d = spec_.dimension();
  for (int i = 0; i < d; ++i) out << "x" << (i + 1) << ",";
  for (int k = 0; k < 2 * d; ++k) {
    const Direction e = Direction::FromIndex(k);
    out << "w(" << (e.sign > 0 ? "+" : "-") << "e" << (e.axis + 1) << ")" << (k + 1 < 2 * d ? "," : "\n");
  }
  const auto old_prec = out.precision(17);
  for (std::size_t s = 0; s < region_.size(); ++s) {
    for (int c : region_[s].coords()) out << c << ",";
    const auto w = WeightsAt(s);
    for (std::size_t k = 0; k < w.size(); ++k) out << w[k] << (k + 1 < w.size() ? "," : "\n");
  }
  out.precision(old_prec);
}

double Disorder(const EnvironmentWindow& window) {
  // omega/alpha - 1 = eps * eta exactly; evaluating it that way avoids
  // round-off pushing the result above eps.
  const double eps = window.spec().eps();
  const int width = 2 * window.spec().dimension();
  double worst = 0.0;
  for (const auto& x : window.region()) {
    for (int k = 0; k < width; ++k) {
      worst = std::max(worst, eps * std::abs(window.Eta(x, Direction::FromIndex(k))));
    }
  }
  return worst;
}

double Imbalance(const EnvironmentWindow& window, const Face& face) {
  const auto& alpha = window.spec().alpha();
  const double mass = alpha.FaceMass(face);
  double worst = 0.0;
  for (std::size_t s = 0; s < window.size(); ++s) {
    const auto w = window.WeightsAt(s);
    double total = 0.0;
    for (int i = 0; i < face.dimension(); ++i) total += w[face.jump(i).Index()];
    worst = std::max(worst, std::abs(total / mass - 1.0));
  }
  return worst;
}

}  // namespace rwre
