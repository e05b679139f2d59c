#include "tqnn/pathint.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace tqnn {

namespace {

constexpr double kPi = std::numbers::pi;

std::atomic<int> g_max_threads{1};

} // namespace

void set_max_threads(int n) { g_max_threads = std::max(1, n); }
int max_threads() { return g_max_threads; }

void PathLattice::require_valid() const {
    if (!(x_min < x_max)) throw Error("lattice needs x_min < x_max");
    if (n_points < 3) throw Error("lattice needs at least 3 grid points");
    if (!(t_in < t_out)) throw Error("lattice needs t_in < t_out");
    if (n_slices < 2) throw Error("lattice needs at least 2 time slices");
}

int PathLattice::grid_index(double xq) const {
    const double pos = (xq - x_min) / dx();
    const int i = static_cast<int>(std::lround(pos));
    if (i < 0 || i >= n_points || std::abs(pos - i) > 1e-9)
        throw Error("point is not on the spatial grid");
    return i;
}

Potential Potential::harmonic(double omega) {
    Potential p;
    p.kind = Kind::Harmonic;
    p.omega = omega;
    return p;
}

Potential Potential::tabulated(double x0, double dx, std::vector<double> values) {
    if (values.size() < 2 || dx <= 0.0) throw Error("tabulated potential needs a grid");
    Potential p;
    p.kind = Kind::Tabulated;
    p.table_x0 = x0;
    p.table_dx = dx;
    p.values = std::move(values);
    return p;
}

double Potential::operator()(double x) const {
    switch (kind) {
        case Kind::Free: return 0.0;
        case Kind::Harmonic: return 0.5 * omega * omega * x * x;
        case Kind::Tabulated: {
            const double pos = (x - table_x0) / table_dx;
            if (pos < -1e-9 || pos > values.size() - 1 + 1e-9)
                throw Error("tabulated potential does not cover the point");
            const int i = std::clamp(static_cast<int>(std::floor(pos)), 0,
                                     static_cast<int>(values.size()) - 2);
            const double f = pos - i;
            return values[i] * (1.0 - f) + values[i + 1] * f;
        }
    }
    throw Error("unreachable");
}

bool Potential::covers(double lo, double hi) const {
    if (kind != Kind::Tabulated) return true;
    return table_x0 <= lo + 1e-12 && table_x0 + table_dx * (values.size() - 1) >= hi - 1e-12;
}

cplx short_time_kernel(const ParticleModel& model, double x, double xp, double dt) {
    if (dt <= 0.0) throw Error("short_time_kernel needs dt > 0");
    const double m = model.mass, hbar = model.hbar;
    const double kinetic = m * (x - xp) * (x - xp) / (2.0 * dt);
    const double v = model.potential(0.5 * (x + xp));
    if (model.signature == Signature::Euclidean) {
        const double norm = std::sqrt(m / (2.0 * kPi * hbar * dt));
        return norm * std::exp(-(kinetic + v * dt) / hbar);
    }
    const cplx norm = std::sqrt(cplx{0.0, -m / (2.0 * kPi * hbar * dt)});
    return norm * std::exp(cplx{0.0, (kinetic - v * dt) / hbar});
}

namespace {

Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd base, long long e) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

// Free propagator with the kinetic slice phases composed in the momentum
// band: K(x, x') = (1/2pi) int_{|k|<pi/dx} e^{ik(x-x')} [phase(dt)]^(N-1) dk,
// evaluated by composite Simpson quadrature on a fixed node count.
Eigen::MatrixXcd band_limited_free(const ParticleModel& model, const PathLattice& lattice) {
    if (model.potential.kind != Potential::Kind::Free)
        throw Error("band-limited propagation is implemented for the free particle only");
    const int n = lattice.n_points;
    const double dx = lattice.dx(), dt = lattice.dt();
    const double kmax = kPi / dx;
    const long long slices = lattice.n_slices - 1;

    const int nodes = 128 * n + 1;  // odd, Simpson-ready
    const double dk = 2.0 * kmax / (nodes - 1);
    std::vector<cplx> sep_values(2 * n - 1, cplx{0.0, 0.0});
    for (int q = 0; q < nodes; ++q) {
        const double k = -kmax + q * dk;
        const double e1 = model.hbar * k * k * dt / (2.0 * model.mass);
        const cplx phase = model.signature == Signature::Lorentzian
                               ? std::polar(1.0, -e1 * slices)
                               : cplx(std::exp(-e1 * slices));
        const double w = (q == 0 || q == nodes - 1) ? 1.0 : (q % 2 ? 4.0 : 2.0);
        const cplx step = std::polar(1.0, k * dx);
        cplx osc = std::polar(1.0, -k * (n - 1.0) * dx);
        for (int s = 0; s < 2 * n - 1; ++s) {
            sep_values[s] += w * phase * osc;
            osc *= step;
        }
    }
    for (auto& v : sep_values) v *= dk / (3.0 * 2.0 * kPi);

    Eigen::MatrixXcd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = sep_values[(i - j) + (n - 1)];
    return k;
}

} // namespace

PropagateResult propagate(const ParticleModel& model, const PathLattice& lattice,
                          const PropagateOptions& opts) {
    lattice.require_valid();
    if (!model.potential.covers(lattice.x_min, lattice.x_max))
        throw Error("potential table does not cover the lattice");
    const int n = lattice.n_points;
    const double dt = lattice.dt(), dx = lattice.dx();

    PropagateResult out;
    out.method = opts.method;
    out.nyquist_flagged =
        model.signature == Signature::Lorentzian &&
        model.mass * (lattice.x_max - lattice.x_min) * dx / (model.hbar * dt) > kPi;

    if (opts.method == PropagateMethod::BandLimited) {
        out.k = band_limited_free(model, lattice);
        return out;
    }

    Eigen::MatrixXcd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = short_time_kernel(model, lattice.x(i), lattice.x(j), dt);
    out.k = k * matrix_power(dx * k, lattice.n_slices - 2);
    return out;
}

cplx brute_force_path_sum(const ParticleModel& model, const PathLattice& lattice, double x_in,
                          double x_out, long long budget) {
    lattice.require_valid();
    const int n = lattice.n_points;
    const int interior = lattice.n_slices - 2;
    long long paths = 1;
    for (int i = 0; i < interior; ++i) {
        paths *= n;
        if (paths > budget) throw BudgetError("path enumeration exceeds budget");
    }
    const int i_in = lattice.grid_index(x_in), i_out = lattice.grid_index(x_out);

    Eigen::MatrixXcd k(n, n);
    const double dt = lattice.dt();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = short_time_kernel(model, lattice.x(i), lattice.x(j), dt);

    const double measure = std::pow(lattice.dx(), interior);
    cplx sum{0.0, 0.0};
    std::vector<int> idx(interior, 0);
    for (long long p = 0; p < paths; ++p) {
        cplx amp{1.0, 0.0};
        int prev = i_in;
        for (int s = 0; s < interior; ++s) {
            amp *= k(idx[s], prev);
            prev = idx[s];
        }
        amp *= k(i_out, prev);
        sum += amp;
        for (int s = interior - 1; s >= 0; --s) {
            if (++idx[s] < n) break;
            idx[s] = 0;
        }
    }
    return sum * measure;
}

double discrete_action(const ParticleModel& model, const PathLattice& lattice,
                       const std::vector<double>& xs) {
    if (static_cast<int>(xs.size()) != lattice.n_slices)
        throw Error("path length does not match the slicing");
    const double dt = lattice.dt();
    const double sgn = model.signature == Signature::Euclidean ? 1.0 : -1.0;
    double s = 0.0;
    for (int i = 0; i + 1 < lattice.n_slices; ++i) {
        const double dxk = xs[i + 1] - xs[i];
        s += model.mass * dxk * dxk / (2.0 * dt) +
             sgn * model.potential(0.5 * (xs[i] + xs[i + 1])) * dt;
    }
    return s;
}

ClassicalPath classical_path(const ParticleModel& model, const PathLattice& lattice, double x_in,
                             double x_out) {
    lattice.require_valid();
    lattice.grid_index(x_in);
    lattice.grid_index(x_out);
    const int n = lattice.n_slices;
    const double dt = lattice.dt(), m = model.mass;
    const double sgn = model.signature == Signature::Euclidean ? 1.0 : -1.0;

    ClassicalPath cp;
    cp.xs.assign(n, 0.0);
    cp.xs.front() = x_in;
    cp.xs.back() = x_out;
    if (n == 2) {
        cp.action = discrete_action(model, lattice, cp.xs);
        return cp;
    }
    const int ni = n - 2;

    if (model.potential.kind != Potential::Kind::Tabulated) {
        // linear Euler-Lagrange system (omega = 0 recovers the free line)
        const double w2 = model.potential.kind == Potential::Kind::Harmonic
                              ? model.potential.omega * model.potential.omega
                              : 0.0;
        const double diag = 2.0 * m / dt + sgn * dt * m * w2 / 2.0;
        const double off = -m / dt + sgn * dt * m * w2 / 4.0;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ni, ni);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
        for (int i = 0; i < ni; ++i) {
            a(i, i) = diag;
            if (i > 0) a(i, i - 1) = off;
            if (i + 1 < ni) a(i, i + 1) = off;
        }
        rhs(0) -= off * x_in;
        rhs(ni - 1) -= off * x_out;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible())
            throw Error("no unique extremal path (resonant discretized action)");
        Eigen::VectorXd sol = lu.solve(rhs);
        for (int i = 0; i < ni; ++i) cp.xs[i + 1] = sol(i);
        cp.action = discrete_action(model, lattice, cp.xs);
        return cp;
    }

    if (model.signature == Signature::Lorentzian)
        throw Error("Lorentzian extremization is only supported for quadratic actions");
    // damped gradient descent on the Euclidean action
    for (int i = 0; i < ni; ++i)
        cp.xs[i + 1] = x_in + (x_out - x_in) * double(i + 1) / (n - 1);
    double step = dt / m;
    double s_cur = discrete_action(model, lattice, cp.xs);
    const int max_iters = 20000;
    const double h = 1e-6;
    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<double> grad(ni, 0.0);
        double gnorm = 0.0;
        for (int i = 0; i < ni; ++i) {
            std::vector<double> xp = cp.xs;
            xp[i + 1] += h;
            const double sp = discrete_action(model, lattice, xp);
            xp[i + 1] -= 2.0 * h;
            const double sm = discrete_action(model, lattice, xp);
            grad[i] = (sp - sm) / (2.0 * h);
            gnorm += grad[i] * grad[i];
        }
        if (std::sqrt(gnorm) < 1e-9) {
            cp.action = s_cur;
            return cp;
        }
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            std::vector<double> xp = cp.xs;
            for (int i = 0; i < ni; ++i) xp[i + 1] -= step * grad[i];
            const double sp = discrete_action(model, lattice, xp);
            if (sp < s_cur) {
                cp.xs = std::move(xp);
                s_cur = sp;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            cp.action = s_cur;
            return cp;
        }
    }
    throw Error("classical path minimizer did not converge within the iteration budget");
}

namespace {

struct ChainResult {
    double mean = 0.0;
    long long samples = 0;
};

ChainResult run_chain(const ParticleModel& model, const PathLattice& lattice,
                      const std::vector<int>& start, const std::vector<double>& tube_lo,
                      const std::vector<double>& tube_hi, double hbar,
                      const ConcentrationOptions& opts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int ni = static_cast<int>(start.size());
    const int n = lattice.n_points;
    std::vector<int> path = start;
    std::vector<double> xs(lattice.n_slices);
    xs.front() = tube_lo[0];  // placeholder, endpoints set by caller through start
    auto fill = [&](const std::vector<int>& p, std::vector<double>& buf) {
        for (int i = 0; i < ni; ++i) buf[i + 1] = lattice.x(p[i]);
    };

    // endpoints are encoded in tube arrays' first/last entries: lo == hi there
    xs.front() = tube_lo.front();
    xs.back() = tube_lo.back();
    fill(path, xs);
    double s_cur = discrete_action(model, lattice, xs);

    auto in_tube = [&](const std::vector<double>& buf) {
        for (size_t k = 0; k < buf.size(); ++k)
            if (buf[k] < tube_lo[k] - 1e-12 || buf[k] > tube_hi[k] + 1e-12) return false;
        return true;
    };

    ChainResult res;
    const int total_sweeps = opts.burn_in + opts.sweeps;
    for (int sweep = 0; sweep < total_sweeps; ++sweep) {
        for (int site = 0; site < ni; ++site) {
            const int shift = 1 + static_cast<int>(rng() % 3);
            const int dir = (rng() & 1) ? 1 : -1;
            const int prop = path[site] + dir * shift;
            if (prop < 0 || prop >= n) continue;
            const int old = path[site];
            path[site] = prop;
            fill(path, xs);
            const double s_new = discrete_action(model, lattice, xs);
            const double d = (s_new - s_cur) / hbar;
            bool accept = d <= 0.0;
            if (!accept) {
                const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
                accept = u < std::exp(-d);
            }
            if (accept)
                s_cur = s_new;
            else
                path[site] = old;
        }
        if (sweep >= opts.burn_in) {
            fill(path, xs);
            res.mean += in_tube(xs) ? 1.0 : 0.0;
            ++res.samples;
        }
    }
    res.mean /= std::max<long long>(res.samples, 1);
    return res;
}

} // namespace

std::vector<ConcentrationRow> concentration_profile(const ParticleModel& model,
                                                    const PathLattice& lattice, double x_in,
                                                    double x_out, double tube_radius,
                                                    const std::vector<double>& hbars,
                                                    const ConcentrationOptions& opts) {
    if (model.signature != Signature::Euclidean)
        throw Error("concentration_profile requires the Euclidean signature");
    lattice.require_valid();
    if (tube_radius <= 0.0) throw Error("tube radius must be positive");

    const int n = lattice.n_points;
    const int interior = lattice.n_slices - 2;
    ParticleModel m = model;  // hbar swapped per row below
    const ClassicalPath cl = classical_path(model, lattice, x_in, x_out);

    long long paths = 1;
    bool within_budget = true;
    for (int i = 0; i < interior; ++i) {
        paths *= n;
        if (paths > opts.enumeration_budget) {
            within_budget = false;
            break;
        }
    }
    const bool exact = opts.method == ConcentrationOptions::Method::Exact ||
                       (opts.method == ConcentrationOptions::Method::Auto && within_budget);
    if (exact && !within_budget) throw BudgetError("exact enumeration exceeds budget");

    std::vector<ConcentrationRow> rows;

    if (exact) {
        // two passes: min action, then shifted Boltzmann sums per hbar
        std::vector<double> actions(paths);
        std::vector<bool> tube(paths);
        std::vector<int> idx(interior, 0);
        std::vector<double> xs(lattice.n_slices);
        xs.front() = x_in;
        xs.back() = x_out;
        double s_min = 1e300;
        for (long long p = 0; p < paths; ++p) {
            bool inside = true;
            for (int s = 0; s < interior; ++s) {
                xs[s + 1] = lattice.x(idx[s]);
                if (std::abs(xs[s + 1] - cl.xs[s + 1]) > tube_radius + 1e-12) inside = false;
            }
            actions[p] = discrete_action(model, lattice, xs);
            tube[p] = inside;
            s_min = std::min(s_min, actions[p]);
            for (int s = interior - 1; s >= 0; --s) {
                if (++idx[s] < n) break;
                idx[s] = 0;
            }
        }
        for (double hbar : hbars) {
            double num = 0.0, den = 0.0;
            for (long long p = 0; p < paths; ++p) {
                const double w = std::exp(-(actions[p] - s_min) / hbar);
                den += w;
                if (tube[p]) num += w;
            }
            rows.push_back({hbar, num / den, 0.0, true});
        }
        return rows;
    }

    // Metropolis: seeded chains, combined in chain order
    std::vector<double> tube_lo(lattice.n_slices), tube_hi(lattice.n_slices);
    tube_lo.front() = tube_hi.front() = x_in;
    tube_lo.back() = tube_hi.back() = x_out;
    for (int k = 1; k + 1 < lattice.n_slices; ++k) {
        tube_lo[k] = cl.xs[k] - tube_radius;
        tube_hi[k] = cl.xs[k] + tube_radius;
    }
    std::vector<int> start(interior);
    for (int i = 0; i < interior; ++i) start[i] = lattice.grid_index(x_in);
    for (int i = 0; i < interior; ++i) {
        // nearest grid point to the classical path as the start state
        const double pos = (cl.xs[i + 1] - lattice.x_min) / lattice.dx();
        start[i] = std::clamp(static_cast<int>(std::lround(pos)), 0, n - 1);
    }

    for (size_t hi = 0; hi < hbars.size(); ++hi) {
        m.hbar = model.hbar;  // action uses the model's hbar only through weights
        const double hbar = hbars[hi];
        std::vector<ChainResult> results(opts.chains);
        const int workers = std::min(max_threads(), opts.chains);
        std::atomic<int> next{0};
        auto work = [&]() {
            int c;
            while ((c = next.fetch_add(1)) < opts.chains)
                results[c] = run_chain(model, lattice, start, tube_lo, tube_hi, hbar, opts,
                                       opts.seed * 0x9e3779b97f4a7c15ULL + hi * 1009 + c);
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();

        double mean = 0.0;
        for (const auto& r : results) mean += r.mean;
        mean /= opts.chains;
        double between = 0.0;
        for (const auto& r : results) between += (r.mean - mean) * (r.mean - mean);
        between /= std::max(opts.chains - 1, 1);
        const double se = std::sqrt(between / opts.chains);
        // R-hat style diagnostic on the chain means
        double within = 0.0;
        for (const auto& r : results) within += r.mean * (1.0 - r.mean);
        within /= opts.chains;
        const double rhat = within > 1e-12 ? std::sqrt(1.0 + between / within) : 1.0;
        if (rhat > opts.rhat_threshold)
            throw Error("Metropolis sampling did not converge (R-hat diagnostic above threshold)");
        rows.push_back({hbar, mean, se, false});
    }
    return rows;
}

} // namespace tqnn
