#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bellsim/geometry.hpp"
#include "bellsim/outcomes.hpp"
#include "bellsim/parallel.hpp"

namespace bellsim {

// Hidden-variable densities that live on integer "time slabs": the carrier
// is Omega = [-3, 3n), sliced into unit slabs [i-1, i) for
// i in {-2, -1, ..., 3n}, and the joint density of the two wings'
// variables (u, v) is supported on the diagonal squares where both fall in
// the same slab. The point of the audit is that the slab index i behaves
// like a hidden variable, so its distribution must not depend on either
// wing's detector direction; a sound locality claim requires the same
// per-slab mass for every choice of (a, b).

inline constexpr double kOmegaLo = -3.0;
inline constexpr int kFirstSlab = -2;

// Weight of direction `dir` at position u within a slab, and likewise for
// the other wing. Values must be nonnegative.
using WingWeight = std::function<double(const Direction& dir, double u)>;

// Deterministic per-wing outcome field; values must be exactly +1 or -1.
using OutcomeField = std::function<double(const Direction& dir, double u)>;

struct SlabDensitySpec {
  int n = 1;  // slabs run from kFirstSlab to 3n
  Direction a, b;
  WingWeight sigma;  // left wing weight
  WingWeight tau;    // right wing weight

  int last_slab() const { return 3 * n; }
  double omega_hi() const { return 3.0 * n; }
};

struct OutcomeFields {
  OutcomeField left;
  OutcomeField right;
};

// Indicator that u lies in slab i and v lies in slab j with i = j.
int kappa2(double u, double v, int i, int j);

// Diagonal form: both positions inside slab i.
int kappa(double u, double v, int i);

// Joint density at (u, v) on slab i: sigma_a(u) * tau_b(v) * kappa(u,v,i).
// Factorizes by construction; negative weights raise ContractError.
double density(const SlabDensitySpec& spec, double u, double v, int i);

struct QuadratureConfig {
  int cells_per_unit = 32;  // midpoint cells per unit length, >= 4
  double tolerance = 1e-9;  // refinement agreement threshold
};

struct Integral {
  double value = 0.0;             // finer of the two refinements
  double refinement_delta = 0.0;  // |fine - coarse|
  bool converged = true;          // refinement_delta <= tolerance
};

// Mass that slab i contributes to the outcome product:
// integral of A_a(u) B_b(v) density(u, v, i) du dv over the slab square,
// by midpoint quadrature at two refinements (a non-converged pair is
// reported, not fatal). With A = B = +1 this is the slab's probability mass.
Integral marginal_i(const SlabDensitySpec& spec, const OutcomeFields& fields,
                    int i, const QuadratureConfig& quad = {},
                    Backend backend = Backend::openmp);

// Sum over all slabs: the full expectation of the outcome product.
Integral expectation(const SlabDensitySpec& spec, const OutcomeFields& fields,
                     const QuadratureConfig& quad = {},
                     Backend backend = Backend::openmp);

// Verdict tolerance: per-slab masses differing by more than this across
// settings mark the slab variable as setting-dependent.
inline constexpr double kLocalityTolerance = 1e-6;

enum class LocalityVerdict { local, non_local };

std::string to_string(LocalityVerdict v);

struct LocalityWitness {
  int slab = 0;
  Wing varied = Wing::right;  // which wing's grid was swept
  Direction fixed_dir;        // the other wing's direction, held fixed
  Direction dir1, dir2;       // the sweep pair realizing the deviation
  double deviation = 0.0;
};

struct LocalityAuditReport {
  // max_{fixed, d, d'} |m(..d..) - m(..d'..)| per slab, for each swept wing
  std::map<int, double> per_slab_b_dependence;
  std::map<int, double> per_slab_a_dependence;
  std::vector<LocalityWitness> witnesses;  // one per slab and wing over tolerance
  LocalityVerdict verdict = LocalityVerdict::local;
  double tolerance = kLocalityTolerance;
  bool quadrature_warning = false;  // some integral failed its refinement check
  // Sum of per-slab masses for each grid pair; reported, never asserted.
  std::vector<std::vector<double>> marginal_totals;
};

// Builds the density for every (a, b) on the grids, computes each slab's
// mass with A = B = +1, and sweeps each wing's grid with the other held
// fixed. Any per-slab deviation beyond `tolerance` flips the verdict to
// non_local and is recorded with its witness directions.
using DensityBuilder =
    std::function<SlabDensitySpec(const Direction& a, const Direction& b)>;

LocalityAuditReport locality_audit(const DensityBuilder& builder,
                                   const std::vector<Direction>& a_grid,
                                   const std::vector<Direction>& b_grid,
                                   const QuadratureConfig& quad = {},
                                   double tolerance = kLocalityTolerance,
                                   Backend backend = Backend::openmp);

// Built-in density families.

struct ReferenceFamilyParams {
  // Setting-independent weight placed on every slab except the first; the
  // first slab always carries sigma = |a.x| and tau = |b.x|.
  double residual_sigma = 0.0;
  double residual_tau = 0.0;
};

// The audited family: slab -2 weights depend on the detector directions
// (sigma = |a.x|, tau = |b.x| on [-3, -2)), so the slab variable's
// distribution shifts with the settings. Its slab -2 mass is exactly
// |a.x| * |b.x| under the +1 outcome fields.
SlabDensitySpec reference_family(const Direction& a, const Direction& b, int n,
                                 const ReferenceFamilyParams& params = {});

// Control family: constant weights on all slabs, no direction dependence.
SlabDensitySpec uniform_local_family(const Direction& a, const Direction& b,
                                     int n, double weight_sigma = 0.25,
                                     double weight_tau = 0.25);

// Outcome fields identically +1 on both wings (mass probes).
OutcomeFields unit_outcome_fields();

}  // namespace bellsim
