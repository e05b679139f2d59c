#include "tqnn/contraction.hpp"

#include <algorithm>
#include <set>

namespace tqnn {

namespace {

long long table_size(const std::vector<int>& vars, const std::vector<int>& dims) {
    long long s = 1;
    for (int v : vars) s *= dims[v];
    return s;
}

} // namespace

int FactorNetwork::add_variable(int dim, double weight) {
    if (dim < 1) throw Error("factor variable needs positive dimension");
    dims_.push_back(dim);
    weights_.push_back(weight);
    return static_cast<int>(dims_.size()) - 1;
}

void FactorNetwork::add_factor(Factor f) {
    if (!std::is_sorted(f.vars.begin(), f.vars.end()) ||
        std::adjacent_find(f.vars.begin(), f.vars.end()) != f.vars.end())
        throw Error("factor variables must be strictly ascending");
    for (int v : f.vars)
        if (v < 0 || v >= static_cast<int>(dims_.size())) throw Error("factor references unknown variable");
    if (static_cast<long long>(f.table.size()) != table_size(f.vars, dims_))
        throw Error("factor table size does not match variable dimensions");
    if (f.vars.empty()) {
        scalar_ *= f.table[0];
        return;
    }
    factors_.push_back(std::move(f));
}

void FactorNetwork::add_scalar(cplx value) { scalar_ *= value; }

cplx FactorNetwork::contract(long long max_table_entries) {
    std::set<int> pending;
    for (const auto& f : factors_)
        for (int v : f.vars) pending.insert(v);

    while (!pending.empty()) {
        // greedy: eliminate the variable with the smallest resulting support
        int best = -1;
        long long best_size = -1;
        for (int v : pending) {
            std::set<int> support;
            for (const auto& f : factors_)
                if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
                    support.insert(f.vars.begin(), f.vars.end());
            support.erase(v);
            long long s = 1;
            for (int u : support) s *= dims_[u];
            if (best < 0 || s < best_size) {
                best = v;
                best_size = s;
            }
        }
        if (best_size > max_table_entries)
            throw BudgetError("contraction intermediate exceeds table budget");

        // product of all factors containing `best`, summed over `best`
        std::vector<Factor> keep;
        std::vector<Factor> bucket;
        for (auto& f : factors_) {
            if (std::find(f.vars.begin(), f.vars.end(), best) != f.vars.end())
                bucket.push_back(std::move(f));
            else
                keep.push_back(std::move(f));
        }
        std::set<int> union_set;
        for (const auto& f : bucket) union_set.insert(f.vars.begin(), f.vars.end());
        std::vector<int> uvars(union_set.begin(), union_set.end());
        std::vector<int> out_vars;
        for (int v : uvars)
            if (v != best) out_vars.push_back(v);

        // strides of each bucket factor and of the output w.r.t. uvars
        std::vector<std::vector<long long>> strides(bucket.size(),
                                                    std::vector<long long>(uvars.size(), 0));
        for (size_t b = 0; b < bucket.size(); ++b) {
            long long stride = 1;
            for (int k = static_cast<int>(bucket[b].vars.size()) - 1; k >= 0; --k) {
                const int v = bucket[b].vars[k];
                const auto pos = std::lower_bound(uvars.begin(), uvars.end(), v) - uvars.begin();
                strides[b][pos] = stride;
                stride *= dims_[v];
            }
        }
        std::vector<long long> out_stride(uvars.size(), 0);
        {
            long long stride = 1;
            for (int k = static_cast<int>(uvars.size()) - 1; k >= 0; --k) {
                if (uvars[k] == best) continue;
                out_stride[k] = stride;
                stride *= dims_[uvars[k]];
            }
        }

        Factor result;
        result.vars = out_vars;
        result.table.assign(table_size(out_vars, dims_), cplx{0.0, 0.0});
        const cplx haar_w{weights_[best], 0.0};

        const long long usize = table_size(uvars, dims_);
        std::vector<int> assign(uvars.size(), 0);
        std::vector<long long> offs(bucket.size(), 0);
        long long out_index = 0;
        for (long long it = 0; it < usize; ++it) {
            cplx prod = haar_w;
            for (size_t b = 0; b < bucket.size() && prod != cplx{0.0, 0.0}; ++b)
                prod *= bucket[b].table[offs[b]];
            result.table[out_index] += prod;

            // odometer over uvars, last index fastest
            for (int k = static_cast<int>(uvars.size()) - 1; k >= 0; --k) {
                ++assign[k];
                for (size_t b = 0; b < bucket.size(); ++b) offs[b] += strides[b][k];
                out_index += out_stride[k];
                if (assign[k] < dims_[uvars[k]]) break;
                assign[k] = 0;
                for (size_t b = 0; b < bucket.size(); ++b)
                    offs[b] -= strides[b][k] * dims_[uvars[k]];
                out_index -= out_stride[k] * dims_[uvars[k]];
            }
        }

        factors_ = std::move(keep);
        if (result.vars.empty())
            scalar_ *= result.table[0];
        else
            factors_.push_back(std::move(result));
        pending.erase(best);
    }

    if (!factors_.empty()) throw Error("factor left after eliminating all variables");
    return scalar_;
}

} // namespace tqnn
