#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tqnn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Thrown on contract violations (bad labels, mixed groups, inapplicable moves...).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an enumeration or contraction would exceed its declared budget.
struct BudgetError : Error {
    using Error::Error;
};

enum class GroupKind { Cyclic, Symmetric3, Quaternion8, SU2 };

/// Identifies a group from the catalog: Z_n (n <= 12), S_3, Q_8, or SU(2)
/// truncated at a half-integer spin cutoff.  Spins are carried as twice
/// their value (two_j) so that half-integers stay exact.
struct GroupSpec {
    GroupKind kind = GroupKind::Cyclic;
    int n = 1;          // cyclic order, Cyclic only
    int two_jmax = 0;   // SU2 cutoff (2*J_max), SU2 only

    static GroupSpec cyclic(int n);
    static GroupSpec s3() { return GroupSpec{GroupKind::Symmetric3, 6, 0}; }
    static GroupSpec q8() { return GroupSpec{GroupKind::Quaternion8, 8, 0}; }
    static GroupSpec su2(int two_jmax);

    bool is_finite() const { return kind != GroupKind::SU2; }
    /// Group order for finite groups.
    int order() const;

    std::string name() const;
    /// Parses "Z4", "S3", "Q8", "SU2" (case-insensitive). SU2 takes the
    /// cutoff separately, so "SU2" yields two_jmax = 0 to be filled in.
    static GroupSpec parse(const std::string& text);

    bool operator==(const GroupSpec&) const = default;
};

/// Irrep label: for finite groups an index into the character table rows,
/// for SU(2) the value 2j.
struct IrrepLabel {
    int id = 0;
    auto operator<=>(const IrrepLabel&) const = default;
};

/// A group element.  Finite groups use an index into the multiplication
/// table.  SU(2) elements carry the full 2x2 special-unitary cell
/// [[a, b], [-conj(b), conj(a)]]; class functions only see the class angle
/// theta in [0, 2pi] with tr U = 2 cos(theta/2).
struct GroupElement {
    GroupSpec group;
    int index = 0;
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};

    double class_angle() const;
};

GroupElement identity(const GroupSpec& g);
GroupElement compose(const GroupElement& u, const GroupElement& v);
GroupElement invert(const GroupElement& u);
/// Finite-group element by table index.
GroupElement finite_element(const GroupSpec& g, int index);
/// SU(2) class representative diag(e^{i theta/2}, e^{-i theta/2}).
GroupElement su2_rotation(const GroupSpec& g, double theta);
/// SU(2) element from axis-angle (axis need not be normalized).
GroupElement su2_axis_angle(const GroupSpec& g, double theta,
                            double nx, double ny, double nz);
GroupElement su2_from_cell(const GroupSpec& g, cplx a, cplx b);

/// Multiplication table, conjugacy classes, character table and explicit
/// unitary irrep matrices for one catalog finite group.  Immutable.
struct FiniteGroupData {
    GroupSpec spec;
    int order = 0;
    std::vector<std::vector<int>> mult;     // mult[u][v] = u*v
    std::vector<int> inverse;
    std::vector<std::string> element_names;
    std::vector<int> class_of;              // element -> class index
    std::vector<int> class_representative;  // class -> smallest element
    std::vector<std::string> class_names;
    std::vector<int> class_sizes;
    std::vector<std::string> irrep_names;
    std::vector<int> irrep_dims;
    // characters[r][c] = chi^r on class c
    std::vector<std::vector<cplx>> characters;
    // irrep_matrices[r][u] = unitary matrix of element u in irrep r
    std::vector<std::vector<Matrix>> irrep_matrices;
};

struct HaarOptions {
    int nodes = 256;           // SU2 quadrature nodes (ignored for finite groups)
    bool check_convergence = false;
    double tolerance = 1e-10;  // allowed drift under node doubling
};

/// Irrep labels, dimensions and character data of a group; the finite
/// catalog is exact, SU(2) is truncated at the spec's two_jmax.
class IrrepTable {
public:
    explicit IrrepTable(const GroupSpec& spec);

    const GroupSpec& group() const { return spec_; }
    int num_irreps() const;
    std::vector<IrrepLabel> irreps() const;
    int dim(IrrepLabel r) const;
    std::string irrep_name(IrrepLabel r) const;

    /// chi^r(u).
    cplx character(IrrepLabel r, const GroupElement& u) const;

    /// Unitary representation matrix of u in irrep r.
    Matrix irrep_matrix(IrrepLabel r, const GroupElement& u) const;

    /// Normalized Haar integral of a class function.  Finite groups sum
    /// exactly over all elements; SU(2) uses a Gauss quadrature in the
    /// class angle that is exact for polynomial class functions (products
    /// of characters) up to degree 2*nodes - 1.
    cplx haar_integrate(const std::function<cplx(const GroupElement&)>& f,
                        const HaarOptions& opts = {}) const;

    /// delta(u) = sum_r dim(r) chi^r(u) over the full table.  For SU(2)
    /// the sum is truncated at two_jmax; that truncation is this module's
    /// regularization of the formal group delta function.
    cplx delta_kernel(const GroupElement& u) const;

    /// Finite-group data (throws for SU2).
    const FiniteGroupData& finite() const;

    void require_member(const GroupElement& u) const;
    void require_irrep(IrrepLabel r) const;

private:
    GroupSpec spec_;
    std::shared_ptr<const FiniteGroupData> finite_;
};

/// SU(2) character chi^j(theta) = U_{2j}(cos(theta/2)) via the Chebyshev
/// recurrence (stable at theta = 0 and 2pi).
double su2_character(int two_j, double theta);

} // namespace tqnn
