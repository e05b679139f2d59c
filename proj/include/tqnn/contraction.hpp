#pragma once

#include "tqnn/group.hpp"

#include <vector>

namespace tqnn {

/// Dense multilinear factor over integer-dimension variables.  The table is
/// row-major over `vars` in the order given (which must be ascending).
struct Factor {
    std::vector<int> vars;
    std::vector<cplx> table;
};

/// A sum of products of dense factors over shared discrete variables,
/// evaluated by variable elimination.  The elimination order is greedy by
/// minimal intermediate support, ties broken by smallest variable id, so
/// results are bit-for-bit deterministic.
class FactorNetwork {
public:
    /// Declares a variable and returns its id.  `weight` multiplies every
    /// summand when the variable is summed out (1/|G| for Haar sums).
    int add_variable(int dim, double weight = 1.0);
    void add_factor(Factor f);
    void add_scalar(cplx value);

    /// Sums out every variable and returns the resulting scalar.
    cplx contract(long long max_table_entries = 40'000'000);

private:
    std::vector<int> dims_;
    std::vector<double> weights_;
    std::vector<Factor> factors_;
    cplx scalar_{1.0, 0.0};
};

} // namespace tqnn
