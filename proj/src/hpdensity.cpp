#include "bellsim/hpdensity.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

bool in_slab(double u, int i) {
  return static_cast<double>(i - 1) <= u && u < static_cast<double>(i);
}

void check_slab_range(const SlabDensitySpec& spec, int i) {
  if (spec.n < 1) throw ContractError("slab density needs n >= 1");
  if (i < kFirstSlab || i > spec.last_slab())
    throw ContractError("slab index " + std::to_string(i) + " outside [" +
                        std::to_string(kFirstSlab) + ", " +
                        std::to_string(spec.last_slab()) + "]");
}

void check_quadrature(const QuadratureConfig& quad) {
  if (quad.cells_per_unit < 4)
    throw ContractError("quadrature needs at least 4 cells per unit");
  if (!(quad.tolerance > 0.0))
    throw ContractError("quadrature tolerance must be positive");
}

double outcome_at(const OutcomeField& field, const Direction& d, double u) {
  const double val = field(d, u);
  if (val != 1.0 && val != -1.0)
    throw ContractError("outcome field returned " + std::to_string(val) +
                        "; values must be exactly +1 or -1");
  return val;
}

// Midpoint rule over the slab square at a fixed cell count. Rows may be
// evaluated in parallel; each row is summed serially and the rows are
// reduced in index order, so the result is bit-identical for any worker
// layout and for the serial reference.
double slab_square_integral(const SlabDensitySpec& spec,
                            const OutcomeFields& fields, int i, int cells,
                            Backend backend) {
  const double lo = static_cast<double>(i - 1);
  const double h = 1.0 / static_cast<double>(cells);
  std::vector<double> row_sum(static_cast<std::size_t>(cells), 0.0);

  // Contract violations (bad outcome fields, negative weights) surface inside
  // the loop body; an exception must not unwind across the OpenMP region, so
  // the first one is parked and rethrown after the join.
  std::exception_ptr error;
  std::mutex error_mu;
  std::atomic<bool> failed{false};

  const auto eval_row = [&](int r) noexcept {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      const double u = lo + (static_cast<double>(r) + 0.5) * h;
      const double left = outcome_at(fields.left, spec.a, u);
      double acc = 0.0;
      for (int c = 0; c < cells; ++c) {
        const double v = lo + (static_cast<double>(c) + 0.5) * h;
        acc += outcome_at(fields.right, spec.b, v) * density(spec, u, v, i);
      }
      row_sum[static_cast<std::size_t>(r)] = left * acc;
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };

  if (backend == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < cells; ++r) eval_row(r);
  } else {
    for (int r = 0; r < cells; ++r) eval_row(r);
  }
  if (error) std::rethrow_exception(error);

  double total = 0.0;
  for (const double rs : row_sum) total += rs;
  return total * h * h;
}

}  // namespace

int kappa2(double u, double v, int i, int j) {
  return (i == j && in_slab(u, i) && in_slab(v, j)) ? 1 : 0;
}

int kappa(double u, double v, int i) {
  return (in_slab(u, i) && in_slab(v, i)) ? 1 : 0;
}

double density(const SlabDensitySpec& spec, double u, double v, int i) {
  check_slab_range(spec, i);
  if (!kappa(u, v, i)) return 0.0;
  const double su = spec.sigma(spec.a, u);
  const double tv = spec.tau(spec.b, v);
  if (su < 0.0 || tv < 0.0)
    throw ContractError("wing weights must be nonnegative");
  return su * tv;
}

Integral marginal_i(const SlabDensitySpec& spec, const OutcomeFields& fields,
                    int i, const QuadratureConfig& quad, Backend backend) {
  check_slab_range(spec, i);
  check_quadrature(quad);
  const double coarse =
      slab_square_integral(spec, fields, i, quad.cells_per_unit, backend);
  const double fine =
      slab_square_integral(spec, fields, i, 2 * quad.cells_per_unit, backend);
  const double delta = std::fabs(fine - coarse);
  return {fine, delta, delta <= quad.tolerance};
}

Integral expectation(const SlabDensitySpec& spec, const OutcomeFields& fields,
                     const QuadratureConfig& quad, Backend backend) {
  check_slab_range(spec, kFirstSlab);
  check_quadrature(quad);
  double coarse = 0.0, fine = 0.0;
  for (int i = kFirstSlab; i <= spec.last_slab(); ++i) {
    coarse += slab_square_integral(spec, fields, i, quad.cells_per_unit, backend);
    fine += slab_square_integral(spec, fields, i, 2 * quad.cells_per_unit, backend);
  }
  const double delta = std::fabs(fine - coarse);
  return {fine, delta, delta <= quad.tolerance};
}

std::string to_string(LocalityVerdict v) {
  return v == LocalityVerdict::local ? "local" : "non_local";
}

LocalityAuditReport locality_audit(const DensityBuilder& builder,
                                   const std::vector<Direction>& a_grid,
                                   const std::vector<Direction>& b_grid,
                                   const QuadratureConfig& quad,
                                   double tolerance, Backend backend) {
  if (a_grid.empty() || b_grid.empty())
    throw ContractError("locality audit needs nonempty direction grids");
  if (!(tolerance > 0.0)) throw ContractError("audit tolerance must be positive");

  const OutcomeFields mass = unit_outcome_fields();
  const SlabDensitySpec probe = builder(a_grid.front(), b_grid.front());
  const int first = kFirstSlab, last = probe.last_slab();
  const std::size_t slabs = static_cast<std::size_t>(last - first + 1);

  LocalityAuditReport rep;
  rep.tolerance = tolerance;

  // Slab mass per grid pair: masses[ai][bi][slab].
  std::vector<std::vector<std::vector<double>>> masses(
      a_grid.size(),
      std::vector<std::vector<double>>(b_grid.size(),
                                       std::vector<double>(slabs, 0.0)));
  rep.marginal_totals.assign(a_grid.size(),
                             std::vector<double>(b_grid.size(), 0.0));

  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    for (std::size_t bi = 0; bi < b_grid.size(); ++bi) {
      const SlabDensitySpec spec = builder(a_grid[ai], b_grid[bi]);
      if (spec.last_slab() != last)
        throw ContractError("density builder changed the slab count");
      double total = 0.0;
      for (int i = first; i <= last; ++i) {
        const Integral m = marginal_i(spec, mass, i, quad, backend);
        rep.quadrature_warning |= !m.converged;
        masses[ai][bi][static_cast<std::size_t>(i - first)] = m.value;
        total += m.value;
      }
      rep.marginal_totals[ai][bi] = total;
    }
  }

  // Sweep one wing's grid with the other fixed; any spread in a slab's mass
  // is direction dependence of the slab variable.
  for (int i = first; i <= last; ++i) {
    const std::size_t s = static_cast<std::size_t>(i - first);
    LocalityWitness bw, aw;
    bw.slab = aw.slab = i;
    bw.varied = Wing::right;
    aw.varied = Wing::left;

    double b_dep = 0.0;
    for (std::size_t ai = 0; ai < a_grid.size(); ++ai)
      for (std::size_t b1 = 0; b1 < b_grid.size(); ++b1)
        for (std::size_t b2 = b1 + 1; b2 < b_grid.size(); ++b2) {
          const double dev = std::fabs(masses[ai][b1][s] - masses[ai][b2][s]);
          if (dev > b_dep) {
            b_dep = dev;
            bw.fixed_dir = a_grid[ai];
            bw.dir1 = b_grid[b1];
            bw.dir2 = b_grid[b2];
            bw.deviation = dev;
          }
        }

    double a_dep = 0.0;
    for (std::size_t bi = 0; bi < b_grid.size(); ++bi)
      for (std::size_t a1 = 0; a1 < a_grid.size(); ++a1)
        for (std::size_t a2 = a1 + 1; a2 < a_grid.size(); ++a2) {
          const double dev = std::fabs(masses[a1][bi][s] - masses[a2][bi][s]);
          if (dev > a_dep) {
            a_dep = dev;
            aw.fixed_dir = b_grid[bi];
            aw.dir1 = a_grid[a1];
            aw.dir2 = a_grid[a2];
            aw.deviation = dev;
          }
        }

    rep.per_slab_b_dependence[i] = b_dep;
    rep.per_slab_a_dependence[i] = a_dep;
    if (b_dep > tolerance) rep.witnesses.push_back(bw);
    if (a_dep > tolerance) rep.witnesses.push_back(aw);
  }

  for (const auto& [slab, dep] : rep.per_slab_b_dependence)
    if (dep > tolerance) rep.verdict = LocalityVerdict::non_local;
  for (const auto& [slab, dep] : rep.per_slab_a_dependence)
    if (dep > tolerance) rep.verdict = LocalityVerdict::non_local;
  return rep;
}

SlabDensitySpec reference_family(const Direction& a, const Direction& b, int n,
                                 const ReferenceFamilyParams& params) {
  if (n < 1) throw ContractError("reference family needs n >= 1");
  SlabDensitySpec spec;
  spec.n = n;
  spec.a = a;
  spec.b = b;
  const double rs = params.residual_sigma;
  const double rt = params.residual_tau;
  if (rs < 0.0 || rt < 0.0)
    throw ContractError("residual weights must be nonnegative");
  // Positions below -2 lie in the first slab [-3, -2), the one whose weight
  // tracks the detector directions.
  spec.sigma = [rs](const Direction& dir, double u) {
    return u < -2.0 ? std::fabs(dir.x) : rs;
  };
  spec.tau = [rt](const Direction& dir, double v) {
    return v < -2.0 ? std::fabs(dir.x) : rt;
  };
  return spec;
}

SlabDensitySpec uniform_local_family(const Direction& a, const Direction& b,
                                     int n, double weight_sigma,
                                     double weight_tau) {
  if (n < 1) throw ContractError("uniform family needs n >= 1");
  if (weight_sigma < 0.0 || weight_tau < 0.0)
    throw ContractError("weights must be nonnegative");
  SlabDensitySpec spec;
  spec.n = n;
  spec.a = a;
  spec.b = b;
  spec.sigma = [weight_sigma](const Direction&, double) { return weight_sigma; };
  spec.tau = [weight_tau](const Direction&, double) { return weight_tau; };
  return spec;
}

OutcomeFields unit_outcome_fields() {
  return {[](const Direction&, double) { return 1.0; },
          [](const Direction&, double) { return 1.0; }};
}

}  // namespace bellsim
