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

// Environment laws and realizations.
//
// The environment family is omega_eps(x, e) = alpha(e) (1 + eps eta(x, e)),
// where eta(x) is drawn i.i.d. over sites from a finite-support law on
// vectors r with sum_e alpha(e) r(e) = 0 and sup_e |r(e)| = 1. A realized
// environment is represented by the index of the support atom at each site.

#ifndef RWRE_ENVIRONMENT_HPP_
#define RWRE_ENVIRONMENT_HPP_

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwre/common.hpp"
#include "rwre/geometry.hpp"
#include "rwre/random.hpp"

namespace rwre {

/// Mean kernel alpha over the 2d directions, indexed by Direction::Index().
class JumpLaw {
 public:
  JumpLaw() = default;
  /// Throws ValidationError unless the entries are positive and sum to 1
  /// within 1e-12.
  explicit JumpLaw(std::vector<double> alpha);
  static JumpLaw Uniform(int d);

  int dimension() const { return static_cast<int>(alpha_.size() / 2); }
  double operator()(const Direction& e) const { return alpha_[e.Index()]; }
  double at(int index) const { return alpha_[index]; }
  const std::vector<double>& values() const { return alpha_; }
  double Min() const;

  /// sum_i alpha(s_i e_i) = psi(0).
  double FaceMass(const Face& face) const;

 private:
  std::vector<double> alpha_;
};

/// Finite-support law of the perturbation vector eta(x).
class EtaLaw {
 public:
  EtaLaw() = default;
  /// Weights are normalized. Structural errors (ragged support, negative
  /// weights) throw ValidationError; the E_alpha and mean-zero conditions
  /// are checked by ValidateEtaLaw.
  EtaLaw(std::vector<std::vector<double>> support, std::vector<double> weights);

  /// Atoms {r, -r} with equal weights, where r is `raw` centered so that
  /// sum_e alpha(e) r(e) = 0 and scaled so that sup |r| = 1.
  static EtaLaw TwoPoint(const JumpLaw& alpha, const std::vector<double>& raw);
  /// Default two-point preset: raw(+e_i) = +1, raw(-e_i) = -1.
  static EtaLaw TwoPoint(const JumpLaw& alpha);
  /// Uniform weights over the given vectors.
  static EtaLaw UniformDiscrete(std::vector<std::vector<double>> support);

  std::size_t size() const { return support_.size(); }
  const std::vector<std::vector<double>>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  double value(std::size_t atom, const Direction& e) const { return support_[atom][e.Index()]; }

  /// sum_k w_k r_k(e) r_k(e').
  double Covariance(const Direction& e, const Direction& e2) const;

  /// Atom selected by inverse CDF of a uniform u in [0, 1).
  std::uint32_t AtomForUniform(double u) const;

 private:
  std::vector<std::vector<double>> support_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

struct EtaLawReport {
  bool not_singleton = false;
  bool support_in_e_alpha = false;
  bool mean_zero = false;
  bool dimensions_match = false;
  std::vector<std::string> messages;

  bool ok() const { return not_singleton && support_in_e_alpha && mean_zero && dimensions_match; }
};

/// Checks the non-singleton, E_alpha-membership and mean-zero conditions.
/// The i.i.d. condition holds by construction of every environment here.
EtaLawReport ValidateEtaLaw(const EtaLaw& eta, const JumpLaw& alpha);

class DisorderSpec {
 public:
  DisorderSpec() = default;
  /// Validates the eta law and eps in [0, 1); throws ValidationError.
  DisorderSpec(JumpLaw alpha, EtaLaw eta, double eps);

  const JumpLaw& alpha() const { return alpha_; }
  const EtaLaw& eta() const { return eta_; }
  double eps() const { return eps_; }
  int dimension() const { return alpha_.dimension(); }

  /// Same alpha and eta law with a different disorder strength.
  DisorderSpec WithEps(double eps) const { return DisorderSpec(alpha_, eta_, eps); }

  /// (1 - eps) min_e alpha(e).
  double Ellipticity() const { return (1.0 - eps_) * alpha_.Min(); }

  double Omega(std::size_t atom, const Direction& e) const {
    return alpha_(e) * (1.0 + eps_ * eta_.value(atom, e));
  }

  /// E[omega(0,e) omega(0,e')] = alpha(e) alpha(e') (1 + eps^2 C(e,e')).
  double PairMoment(const Direction& e, const Direction& e2) const;

  /// Essential supremum of |zeta_s(x) - 1| computed from the finite support.
  double ImbalanceBound(const Face& face) const;

 private:
  JumpLaw alpha_;
  EtaLaw eta_;
  double eps_ = 0.0;
};

/// Read access to a realized environment: the jump weights and the
/// underlying eta value at a site. Kernels are templated on this.
template <class E>
concept EnvironmentView = requires(const E& env, const LatticeSite& x, const Direction& e) {
  { env.Omega(x, e) } -> std::convertible_to<double>;
  { env.Eta(x, e) } -> std::convertible_to<double>;
  { env.spec() } -> std::convertible_to<const DisorderSpec&>;
};

/// Environment regenerated on the fly: the atom at x is a pure function of
/// (seed, coords(x)).
class KeyedEnvironment {
 public:
  KeyedEnvironment(DisorderSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {}

  const DisorderSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  std::uint32_t AtomAt(const LatticeSite& x) const {
    if (spec_.eta().size() == 1) return 0;
    return spec_.eta().AtomForUniform(
        ToUnitInterval(KeyedBits(seed_, Stream::kEnvironment, x.coords())));
  }
  double Omega(const LatticeSite& x, const Direction& e) const {
    return spec_.Omega(AtomAt(x), e);
  }
  double Eta(const LatticeSite& x, const Direction& e) const {
    return spec_.eta().value(AtomAt(x), e);
  }

 private:
  DisorderSpec spec_;
  std::uint64_t seed_;
};

/// Environment with an explicit atom per site; used by exact expectations
/// that enumerate all eta-assignments on a finite set of sites.
class AssignedEnvironment {
 public:
  explicit AssignedEnvironment(DisorderSpec spec) : spec_(std::move(spec)) {}

  const DisorderSpec& spec() const { return spec_; }
  void Assign(const LatticeSite& x, std::uint32_t atom) { atoms_[x] = atom; }
  std::uint32_t AtomAt(const LatticeSite& x) const;
  double Omega(const LatticeSite& x, const Direction& e) const {
    return spec_.Omega(AtomAt(x), e);
  }
  double Eta(const LatticeSite& x, const Direction& e) const {
    return spec_.eta().value(AtomAt(x), e);
  }

 private:
  DisorderSpec spec_;
  std::unordered_map<LatticeSite, std::uint32_t, LatticeSiteHash> atoms_;
};

/// T_y omega: the view seen from `offset`.
template <EnvironmentView Base>
class ShiftedEnvironment {
 public:
  ShiftedEnvironment(const Base& base, LatticeSite offset) : base_(&base), offset_(offset) {}
  const DisorderSpec& spec() const { return base_->spec(); }
  double Omega(const LatticeSite& x, const Direction& e) const { return base_->Omega(x + offset_, e); }
  double Eta(const LatticeSite& x, const Direction& e) const { return base_->Eta(x + offset_, e); }

 private:
  const Base* base_;
  LatticeSite offset_;
};

/// A realized environment stored on a finite region.
class EnvironmentWindow {
 public:
  const DisorderSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<LatticeSite>& region() const { return region_; }
  std::size_t size() const { return region_.size(); }
  bool Contains(const LatticeSite& x) const { return index_.contains(x); }

  /// The 2d weights at the i-th region site.
  std::span<const double> WeightsAt(std::size_t i) const;

  /// Throws ValidationError for sites outside the region.
  double Omega(const LatticeSite& x, const Direction& e) const;
  double Eta(const LatticeSite& x, const Direction& e) const;

  /// CSV with header x1..xd,w(+e1),w(-e1),...; one row per site.
  void WriteCsv(std::ostream& out) const;

 private:
  friend EnvironmentWindow SampleWindow(const DisorderSpec&, std::uint64_t,
                                        std::vector<LatticeSite>, std::size_t);
  std::size_t Find(const LatticeSite& x) const;

  DisorderSpec spec_;
  std::uint64_t seed_ = 0;
  std::vector<LatticeSite> region_;
  std::vector<std::uint32_t> atoms_;
  std::vector<double> omega_;
  std::unordered_map<LatticeSite, std::size_t, LatticeSiteHash> index_;
};

/// Realizes the environment on `region`; identical to KeyedEnvironment with
/// the same seed. Throws ResourceLimitError when the stored window would
/// exceed `budget_bytes`.
EnvironmentWindow SampleWindow(const DisorderSpec& spec, std::uint64_t seed,
                               std::vector<LatticeSite> region,
                               std::size_t budget_bytes = kDefaultBudgetBytes);

/// Empirical disorder: max over stored sites and directions of
/// |omega(x,e)/alpha(e) - 1|. Never exceeds eps.
double Disorder(const EnvironmentWindow& window);

/// Empirical imbalance on a face: max over stored sites of |zeta_s(x) - 1|.
double Imbalance(const EnvironmentWindow& window, const Face& face);

}  // namespace rwre

#endif  // RWRE_ENVIRONMENT_HPP_
