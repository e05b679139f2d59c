#include "tqnn/group.hpp"
#include "tqnn/su2.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace tqnn {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Finite catalog construction

std::vector<int> make_inverses(const std::vector<std::vector<int>>& mult) {
    const int n = static_cast<int>(mult.size());
    std::vector<int> inv(n, -1);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (mult[u][v] == 0) {
                inv[u] = v;
                break;
            }
        }
        if (inv[u] < 0) throw Error("group table has no inverse for element");
    }
    return inv;
}

// Conjugacy classes, ordered by their smallest element index.
void make_classes(FiniteGroupData& g) {
    const int n = g.order;
    g.class_of.assign(n, -1);
    for (int u = 0; u < n; ++u) {
        if (g.class_of[u] >= 0) continue;
        const int c = static_cast<int>(g.class_representative.size());
        g.class_representative.push_back(u);
        for (int v = 0; v < n; ++v) {
            const int w = g.mult[g.mult[v][u]][g.inverse[v]];
            g.class_of[w] = c;
        }
    }
    g.class_sizes.assign(g.class_representative.size(), 0);
    for (int u = 0; u < n; ++u) ++g.class_sizes[g.class_of[u]];
    for (int rep : g.class_representative)
        g.class_names.push_back(g.element_names[rep]);
}

FiniteGroupData make_cyclic(int n) {
    FiniteGroupData g;
    g.spec = GroupSpec{GroupKind::Cyclic, n, 0};
    g.order = n;
    g.mult.assign(n, std::vector<int>(n));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) g.mult[u][v] = (u + v) % n;
    for (int u = 0; u < n; ++u) g.element_names.push_back("g^" + std::to_string(u));
    g.inverse = make_inverses(g.mult);
    make_classes(g);

    g.irrep_dims.assign(n, 1);
    g.characters.assign(n, std::vector<cplx>(n));
    g.irrep_matrices.assign(n, std::vector<Matrix>(n));
    for (int k = 0; k < n; ++k) {
        g.irrep_names.push_back("chi" + std::to_string(k));
        for (int m = 0; m < n; ++m) {
            const double phase = 2.0 * kPi * k * m / n;
            const cplx w = std::polar(1.0, phase);
            g.characters[k][m] = w;  // classes are singletons in element order
            g.irrep_matrices[k][m] = Matrix::Constant(1, 1, w);
        }
    }
    return g;
}

// Permutations of {0,1,2} in a fixed order: e, (01), (02), (12), (012), (021).
const int kS3Perms[6][3] = {
    {0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1},
};

FiniteGroupData make_s3() {
    FiniteGroupData g;
    g.spec = GroupSpec::s3();
    g.order = 6;
    g.element_names = {"e", "(01)", "(02)", "(12)", "(012)", "(021)"};

    auto find_perm = [](const int p[3]) {
        for (int i = 0; i < 6; ++i)
            if (kS3Perms[i][0] == p[0] && kS3Perms[i][1] == p[1] && kS3Perms[i][2] == p[2])
                return i;
        throw Error("S3 composition escaped the table");
    };
    g.mult.assign(6, std::vector<int>(6));
    for (int u = 0; u < 6; ++u) {
        for (int v = 0; v < 6; ++v) {
            int w[3];  // (u*v)(x) = u(v(x))
            for (int x = 0; x < 3; ++x) w[x] = kS3Perms[u][kS3Perms[v][x]];
            g.mult[u][v] = find_perm(w);
        }
    }
    g.inverse = make_inverses(g.mult);
    make_classes(g);  // classes: {e}, transpositions, 3-cycles

    g.irrep_names = {"trivial", "sign", "standard"};
    g.irrep_dims = {1, 1, 2};
    g.characters = {
        {1.0, 1.0, 1.0},
        {1.0, -1.0, 1.0},
        {2.0, 0.0, -1.0},
    };

    // Standard 2-dim irrep: permutation action on the sum-zero plane of R^3,
    // in the orthonormal basis (1,-1,0)/sqrt(2), (1,1,-2)/sqrt(6).
    const double b1[3] = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0};
    const double b2[3] = {1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0)};
    g.irrep_matrices.assign(3, std::vector<Matrix>(6));
    for (int u = 0; u < 6; ++u) {
        g.irrep_matrices[0][u] = Matrix::Constant(1, 1, 1.0);
        const double sgn = (u == 0 || u >= 4) ? 1.0 : -1.0;
        g.irrep_matrices[1][u] = Matrix::Constant(1, 1, sgn);

        double pb1[3], pb2[3];  // permuted basis vectors: (P v)_i = v_{p^{-1}(i)}
        for (int i = 0; i < 3; ++i) {
            pb1[kS3Perms[u][i]] = b1[i];
            pb2[kS3Perms[u][i]] = b2[i];
        }
        Matrix m(2, 2);
        m(0, 0) = pb1[0] * b1[0] + pb1[1] * b1[1] + pb1[2] * b1[2];
        m(1, 0) = pb1[0] * b2[0] + pb1[1] * b2[1] + pb1[2] * b2[2];
        m(0, 1) = pb2[0] * b1[0] + pb2[1] * b1[1] + pb2[2] * b1[2];
        m(1, 1) = pb2[0] * b2[0] + pb2[1] * b2[1] + pb2[2] * b2[2];
        g.irrep_matrices[2][u] = m;
    }
    return g;
}

FiniteGroupData make_q8() {
    FiniteGroupData g;
    g.spec = GroupSpec::q8();
    g.order = 8;
    // Elements encoded as (axis, sign): 0:+1 1:-1 2:+i 3:-i 4:+j 5:-j 6:+k 7:-k
    g.element_names = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};

    auto axis = [](int u) { return u / 2; };        // 0:1, 1:i, 2:j, 3:k
    auto sign = [](int u) { return u % 2 == 0 ? 1 : -1; };
    auto encode = [](int ax, int sg) { return 2 * ax + (sg > 0 ? 0 : 1); };
    // quaternion unit products: table[a][b] = (axis, sign) of e_a * e_b
    static const int ax_tab[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sg_tab[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};

    g.mult.assign(8, std::vector<int>(8));
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            const int ax = ax_tab[axis(u)][axis(v)];
            const int sg = sg_tab[axis(u)][axis(v)] * sign(u) * sign(v);
            g.mult[u][v] = encode(ax, sg);
        }
    g.inverse = make_inverses(g.mult);
    make_classes(g);  // {1}, {-1}, {+-i}, {+-j}, {+-k}

    g.irrep_names = {"trivial", "chi_i", "chi_j", "chi_k", "spinor"};
    g.irrep_dims = {1, 1, 1, 1, 2};
    g.characters = {
        {1.0, 1.0, 1.0, 1.0, 1.0},
        {1.0, 1.0, 1.0, -1.0, -1.0},
        {1.0, 1.0, -1.0, 1.0, -1.0},
        {1.0, 1.0, -1.0, -1.0, 1.0},
        {2.0, -2.0, 0.0, 0.0, 0.0},
    };

    const cplx I{0.0, 1.0};
    std::vector<Matrix> unit(4, Matrix(2, 2));
    unit[0] << 1, 0, 0, 1;
    unit[1] << I, 0, 0, -I;    // i
    unit[2] << 0, 1, -1, 0;    // j
    unit[3] << 0, I, I, 0;     // k = i*j
    g.irrep_matrices.assign(5, std::vector<Matrix>(8));
    for (int u = 0; u < 8; ++u) {
        for (int r = 0; r < 4; ++r) {
            const int cls = g.class_of[u];
            g.irrep_matrices[r][u] = Matrix::Constant(1, 1, g.characters[r][cls]);
        }
        g.irrep_matrices[4][u] = double(sign(u)) * unit[axis(u)];
    }
    return g;
}

const std::shared_ptr<const FiniteGroupData>& finite_cache(const GroupSpec& spec) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const FiniteGroupData>> cache;
    std::lock_guard lock(mu);
    auto key = std::make_pair(static_cast<int>(spec.kind), spec.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    FiniteGroupData data;
    switch (spec.kind) {
        case GroupKind::Cyclic: data = make_cyclic(spec.n); break;
        case GroupKind::Symmetric3: data = make_s3(); break;
        case GroupKind::Quaternion8: data = make_q8(); break;
        default: throw Error("not a finite group");
    }
    auto ptr = std::make_shared<const FiniteGroupData>(std::move(data));
    return cache.emplace(key, std::move(ptr)).first->second;
}

} // namespace

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::cyclic(int n) {
    if (n < 1 || n > 12) throw Error("cyclic catalog covers Z_n with 1 <= n <= 12");
    return GroupSpec{GroupKind::Cyclic, n, 0};
}

GroupSpec GroupSpec::su2(int two_jmax) {
    if (two_jmax < 1) throw Error("SU2 cutoff must satisfy J_max >= 1/2");
    return GroupSpec{GroupKind::SU2, 0, two_jmax};
}

int GroupSpec::order() const {
    switch (kind) {
        case GroupKind::Cyclic: return n;
        case GroupKind::Symmetric3: return 6;
        case GroupKind::Quaternion8: return 8;
        default: throw Error("SU2 has no finite order");
    }
}

std::string GroupSpec::name() const {
    switch (kind) {
        case GroupKind::Cyclic: return "Z" + std::to_string(n);
        case GroupKind::Symmetric3: return "S3";
        case GroupKind::Quaternion8: return "Q8";
        default: {
            std::ostringstream os;
            os << "SU2(jmax=" << (two_jmax / 2);
            if (two_jmax % 2) os << ".5";
            os << ")";
            return os.str();
        }
    }
}

GroupSpec GroupSpec::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(std::toupper(static_cast<unsigned char>(c)));
    if (s == "S3") return s3();
    if (s == "Q8") return q8();
    if (s == "SU2" || s == "SU(2)") return GroupSpec{GroupKind::SU2, 0, 0};
    if (s.size() >= 2 && s[0] == 'Z') {
        int n = std::stoi(s.substr(1));
        return cyclic(n);
    }
    throw Error("unknown group '" + text + "' (expected Z<n>, S3, Q8 or SU2)");
}

// ---------------------------------------------------------------------------
// Elements

double GroupElement::class_angle() const {
    if (group.kind != GroupKind::SU2) throw Error("class_angle only applies to SU2 elements");
    const double c = std::clamp(a.real(), -1.0, 1.0);
    return 2.0 * std::acos(c);
}

GroupElement identity(const GroupSpec& g) {
    GroupElement e;
    e.group = g;
    e.index = 0;
    e.a = cplx{1.0, 0.0};
    e.b = cplx{0.0, 0.0};
    return e;
}

GroupElement finite_element(const GroupSpec& g, int index) {
    if (!g.is_finite()) throw Error("finite_element requires a finite group");
    if (index < 0 || index >= g.order()) throw Error("element index out of range");
    GroupElement u;
    u.group = g;
    u.index = index;
    return u;
}

GroupElement su2_rotation(const GroupSpec& g, double theta) {
    if (g.kind != GroupKind::SU2) throw Error("su2_rotation requires an SU2 group spec");
    GroupElement u;
    u.group = g;
    u.a = std::polar(1.0, theta / 2.0);
    u.b = cplx{0.0, 0.0};
    return u;
}

GroupElement su2_axis_angle(const GroupSpec& g, double theta, double nx, double ny, double nz) {
    if (g.kind != GroupKind::SU2) throw Error("su2_axis_angle requires an SU2 group spec");
    const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (norm == 0.0) return identity(g);
    nx /= norm; ny /= norm; nz /= norm;
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    GroupElement u;
    u.group = g;
    // U = cos(t/2) 1 - i sin(t/2) n.sigma, cell convention [[a, b], [-conj b, conj a]]
    u.a = cplx{c, -s * nz};
    u.b = cplx{-s * ny, -s * nx};
    return u;
}

GroupElement su2_from_cell(const GroupSpec& g, cplx a, cplx b) {
    if (g.kind != GroupKind::SU2) throw Error("su2_from_cell requires an SU2 group spec");
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    if (n == 0.0) throw Error("zero cell is not a group element");
    GroupElement u;
    u.group = g;
    u.a = a / n;
    u.b = b / n;
    return u;
}

static void require_same_group(const GroupElement& u, const GroupElement& v) {
    if (!(u.group == v.group)) throw Error("cannot mix elements of different groups");
}

GroupElement compose(const GroupElement& u, const GroupElement& v) {
    require_same_group(u, v);
    GroupElement w;
    w.group = u.group;
    if (u.group.is_finite()) {
        const auto& data = *finite_cache(u.group);
        w.index = data.mult[u.index][v.index];
    } else {
        // [[a1,b1],[-b1*,a1*]] [[a2,b2],[-b2*,a2*]]
        w.a = u.a * v.a - u.b * std::conj(v.b);
        w.b = u.a * v.b + u.b * std::conj(v.a);
    }
    return w;
}

GroupElement invert(const GroupElement& u) {
    GroupElement w;
    w.group = u.group;
    if (u.group.is_finite()) {
        const auto& data = *finite_cache(u.group);
        w.index = data.inverse[u.index];
    } else {
        w.a = std::conj(u.a);
        w.b = -u.b;
    }
    return w;
}

// ---------------------------------------------------------------------------
// SU2 class characters

double su2_character(int two_j, double theta) {
    // chi^j = U_{2j}(x), x = cos(theta/2)
    const double x = std::cos(theta / 2.0);
    double um = 1.0, u = 2.0 * x;  // U_0, U_1
    if (two_j == 0) return um;
    for (int k = 1; k < two_j; ++k) {
        const double next = 2.0 * x * u - um;
        um = u;
        u = next;
    }
    return u;
}

// ---------------------------------------------------------------------------
// IrrepTable

IrrepTable::IrrepTable(const GroupSpec& spec) : spec_(spec) {
    if (spec.is_finite()) {
        finite_ = finite_cache(spec);
    } else if (spec.two_jmax < 1) {
        throw Error("SU2 irrep table needs a cutoff J_max >= 1/2");
    }
}

int IrrepTable::num_irreps() const {
    return spec_.is_finite() ? static_cast<int>(finite_->irrep_dims.size())
                             : spec_.two_jmax + 1;
}

std::vector<IrrepLabel> IrrepTable::irreps() const {
    std::vector<IrrepLabel> out;
    const int n = num_irreps();
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(IrrepLabel{i});
    return out;
}

void IrrepTable::require_irrep(IrrepLabel r) const {
    if (r.id < 0 || r.id >= num_irreps())
        throw Error("unknown irrep label " + std::to_string(r.id) + " for " + spec_.name());
}

void IrrepTable::require_member(const GroupElement& u) const {
    if (u.group.kind != spec_.kind ||
        (spec_.is_finite() && !(u.group == spec_)))
        throw Error("element does not belong to " + spec_.name());
    if (spec_.is_finite() && (u.index < 0 || u.index >= spec_.order()))
        throw Error("element index out of range for " + spec_.name());
}

int IrrepTable::dim(IrrepLabel r) const {
    require_irrep(r);
    return spec_.is_finite() ? finite_->irrep_dims[r.id] : r.id + 1;
}

std::string IrrepTable::irrep_name(IrrepLabel r) const {
    require_irrep(r);
    if (spec_.is_finite()) return finite_->irrep_names[r.id];
    std::ostringstream os;
    os << "j=" << (r.id / 2);
    if (r.id % 2) os << ".5";
    return os.str();
}

cplx IrrepTable::character(IrrepLabel r, const GroupElement& u) const {
    require_irrep(r);
    require_member(u);
    if (spec_.is_finite()) return finite_->characters[r.id][finite_->class_of[u.index]];
    return su2_character(r.id, u.class_angle());
}

Matrix IrrepTable::irrep_matrix(IrrepLabel r, const GroupElement& u) const {
    require_irrep(r);
    require_member(u);
    if (spec_.is_finite()) return finite_->irrep_matrices[r.id][u.index];
    return su2::wigner_matrix(r.id, u);
}

cplx IrrepTable::haar_integrate(const std::function<cplx(const GroupElement&)>& f,
                                const HaarOptions& opts) const {
    if (spec_.is_finite()) {
        cplx sum = 0.0;
        for (int u = 0; u < spec_.order(); ++u) sum += f(finite_element(spec_, u));
        return sum / double(spec_.order());
    }
    // Gauss quadrature for (1/pi) int_0^{2pi} sin^2(t/2) f(t) dt: nodes
    // t_k = 2 pi k/(n+1), weights 2 sin^2(t_k/2)/(n+1) (Chebyshev second kind
    // in cos(t/2)); exact for character products of total degree <= 2n-1.
    auto quad = [&](int n) {
        cplx sum = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double t = 2.0 * kPi * k / (n + 1);
            const double s = std::sin(t / 2.0);
            sum += (2.0 / (n + 1)) * s * s * f(su2_rotation(spec_, t));
        }
        return sum;
    };
    const int n = std::max(opts.nodes, 2);
    const cplx v = quad(n);
    if (opts.check_convergence) {
        const cplx v2 = quad(2 * n);
        if (std::abs(v - v2) > opts.tolerance)
            throw Error("Haar quadrature did not converge at " + std::to_string(n) +
                        " nodes (drift " + std::to_string(std::abs(v - v2)) + ")");
        return v2;
    }
    return v;
}

cplx IrrepTable::delta_kernel(const GroupElement& u) const {
    require_member(u);
    cplx sum = 0.0;
    for (const auto& r : irreps()) sum += double(dim(r)) * character(r, u);
    return sum;
}

const FiniteGroupData& IrrepTable::finite() const {
    if (!finite_) throw Error("no finite-group data for " + spec_.name());
    return *finite_;
}

} // namespace tqnn
