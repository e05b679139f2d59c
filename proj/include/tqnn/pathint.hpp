#pragma once

#include "tqnn/group.hpp"

#include <cstdint>
#include <vector>

namespace tqnn {

/// Uniform 1D space grid times a uniform time slicing.
struct PathLattice {
    double x_min = -1.0;
    double x_max = 1.0;
    int n_points = 3;   // >= 3 grid points
    double t_in = 0.0;
    double t_out = 1.0;
    int n_slices = 2;   // N >= 2 time slices (points in time)

    double dx() const { return (x_max - x_min) / (n_points - 1); }
    double dt() const { return (t_out - t_in) / (n_slices - 1); }
    double x(int i) const { return x_min + i * dx(); }
    void require_valid() const;
    /// Index of a grid point within tolerance; throws if off-grid.
    int grid_index(double x) const;
};

enum class Signature { Lorentzian, Euclidean };

struct Potential {
    enum class Kind { Free, Harmonic, Tabulated };
    Kind kind = Kind::Free;
    double omega = 1.0;             // Harmonic
    double table_x0 = 0.0;          // Tabulated: value grid origin/spacing
    double table_dx = 1.0;
    std::vector<double> values;

    static Potential free_particle() { return {}; }
    static Potential harmonic(double omega);
    static Potential tabulated(double x0, double dx, std::vector<double> values);

    double operator()(double x) const;  // linear interpolation for Tabulated
    bool covers(double lo, double hi) const;
};

struct ParticleModel {
    double mass = 1.0;
    double hbar = 1.0;
    Signature signature = Signature::Lorentzian;
    Potential potential;
};

/// Single-interval amplitude with the free normalization sqrt(m/(2 pi i hbar dt))
/// (Euclidean: sqrt(m/(2 pi hbar dt))) and the midpoint rule for the potential.
cplx short_time_kernel(const ParticleModel& model, double x, double xp, double dt);

enum class PropagateMethod {
    /// Short-time kernel matrix composed N-1 times with dx-weighted
    /// quadrature; identical term-by-term to the brute-force path sum, but
    /// divergent when the Lorentzian kernel is undersampled (see the
    /// Nyquist flag).
    PlainQuadrature,
    /// Free particle only: the N-1 kinetic slices composed exactly in the
    /// momentum band |k| <= pi/dx, then transformed to the grid.  Avoids
    /// the spatial truncation that makes flagged lattices diverge; the
    /// residual error is the band tail, not aliasing.
    BandLimited,
};

struct PropagateOptions {
    PropagateMethod method = PropagateMethod::PlainQuadrature;
};

struct PropagateResult {
    Eigen::MatrixXcd k;  // K(x_out, x_in); rows = out index
    bool nyquist_flagged = false;
    PropagateMethod method = PropagateMethod::PlainQuadrature;
};

/// Transfer-matrix propagator over the lattice.  Flags (but still computes)
/// Lorentzian configurations whose kernel oscillates below the grid's
/// Nyquist wavelength at maximal separation; plain quadrature amplifies the
/// aliased modes exponentially there, so flagged runs that need physical
/// values should request the spectral method.
PropagateResult propagate(const ParticleModel& model, const PathLattice& lattice,
                          const PropagateOptions& opts = {});

/// Explicit sum over all grid paths; the oracle for propagate.
cplx brute_force_path_sum(const ParticleModel& model, const PathLattice& lattice, double x_in,
                          double x_out, long long budget = 10'000'000);

/// Discretized action of a full path (endpoints included), midpoint rule.
double discrete_action(const ParticleModel& model, const PathLattice& lattice,
                       const std::vector<double>& xs);

struct ClassicalPath {
    std::vector<double> xs;  // x_1 .. x_N including endpoints
    double action = 0.0;
};

/// Extremal path of the discretized action: linear Euler-Lagrange solve for
/// free/harmonic potentials (either signature), damped gradient descent for
/// tabulated potentials in Euclidean signature.
ClassicalPath classical_path(const ParticleModel& model, const PathLattice& lattice, double x_in,
                             double x_out);

struct ConcentrationRow {
    double hbar = 0.0;
    double fraction = 0.0;
    double stderr_est = 0.0;  // 0 for exact enumeration
    bool exact = true;
};

struct ConcentrationOptions {
    enum class Method { Auto, Exact, Metropolis };
    Method method = Method::Auto;
    long long enumeration_budget = 10'000'000;
    int chains = 8;
    int sweeps = 4000;
    int burn_in = 1000;
    std::uint64_t seed = 1;
    double rhat_threshold = 1.1;
};

/// Fraction of Euclidean path weight exp(-S/hbar) carried by paths inside
/// the tube max_k |x_k - x^cl_k| <= r, per hbar.  Exact enumeration within
/// budget, otherwise seeded Metropolis with an R-hat convergence check.
std::vector<ConcentrationRow> concentration_profile(const ParticleModel& model,
                                                    const PathLattice& lattice, double x_in,
                                                    double x_out, double tube_radius,
                                                    const std::vector<double>& hbars,
                                                    const ConcentrationOptions& opts = {});

/// Worker cap for parallel sections; results are independent of the value.
void set_max_threads(int n);
int max_threads();

} // namespace tqnn
