#pragma once

#include "tqnn/statesum.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace tqnn {

/// Coherent superposition input: a graph whose spins are Gaussian-smeared
/// around the weight means.
struct CoherentInput {
    Graph graph;
    CoherentWeights weights;
};

struct DatasetItem {
    std::variant<SpinNetwork, CoherentInput> input;
    std::string label;
};

struct LabeledDataset {
    GroupSpec group;
    std::map<std::string, SpinNetwork> classes;  // class id -> reference output state
    std::vector<DatasetItem> items;
    std::vector<int> train_idx;
    std::vector<int> test_idx;
    std::uint64_t seed = 0;
};

/// Throws on broken invariants (unknown labels, overlapping or incomplete splits).
void validate_dataset(const LabeledDataset& ds);

struct ClassifyOptions {
    StateSumOptions statesum;
    /// Coherent sums run over admissible spins within this many spreads.
    double smear_window_sigmas = 4.0;
    /// Bulk used for every class channel; when absent each class uses the
    /// cylinder over its own reference graph.
    std::optional<TwoComplex> template_complex;
};

struct ClassifyResult {
    std::map<std::string, double> probabilities;
    std::map<std::string, cplx> amplitudes;
    std::map<std::string, bool> mismatched;  // exact-zero topological channel
    bool degenerate = false;                 // all channels zero -> uniform
    /// Argmax class (ties broken by ascending class id).
    std::string decision() const;
};

/// Channel amplitudes A_c = <class_c | Z | input> with coherent smearing on
/// either side; probabilities are the normalized |A_c|^2.
class ClassifierEngine {
public:
    ClassifierEngine(GroupSpec group, std::map<std::string, SpinNetwork> classes,
                     ClassifyOptions opts = {});

    const std::map<std::string, SpinNetwork>& classes() const { return classes_; }
    const GroupSpec& group() const { return group_; }

    /// Per-class coherent weights; empty means "use the reference spins as is".
    ClassifyResult classify(const std::variant<SpinNetwork, CoherentInput>& input,
                            const std::map<std::string, CoherentWeights>& class_weights = {},
                            int cache_tag = -1);

private:
    cplx pair_amplitude(const std::string& cls, const SpinNetwork& class_state, int input_tag,
                        const SpinNetwork& input);

    GroupSpec group_;
    std::map<std::string, SpinNetwork> classes_;
    std::map<std::string, TwoComplex> templates_;
    std::map<std::string, bool> class_template_ok_;
    ClassifyOptions opts_;
    std::map<std::string, cplx> cache_;
};

struct TrainingConfig {
    double step_size = 0.5;
    int max_iters = 200;
    double tolerance = 1e-7;
    double fd_epsilon = 1e-3;
    ClassifyOptions classify;
    std::uint64_t seed = 0;
};

struct TrainLogRow {
    int iter = 0;
    double objective = 0.0;
    double train_error = 0.0;
    double erm_metric = 0.0;
    double step = 0.0;
    bool accepted = false;
};

struct TrainResult {
    std::map<std::string, CoherentWeights> weights;
    std::vector<TrainLogRow> log;
    bool converged = false;
    double final_objective = 0.0;
    double final_train_error = 0.0;
    double final_erm = 0.0;
};

/// Finite-difference ascent on the mean log-probability of the true class,
/// over the class coherent means (projected to [0, J_max]).  Deterministic
/// given (dataset, config, seed).
TrainResult train(const LabeledDataset& ds, const TrainingConfig& cfg);

/// Applies a bijection on class ids to the train labels only.
LabeledDataset apply_label_permutation(const LabeledDataset& ds,
                                       const std::map<std::string, std::string>& perm);

/// Seeded uniform random permutation of the class labels on the train split.
LabeledDataset randomize_labels(const LabeledDataset& ds, std::uint64_t seed);

/// The permutation randomize_labels(seed) would draw.
std::map<std::string, std::string> label_permutation_for_seed(const LabeledDataset& ds,
                                                              std::uint64_t seed);

struct RandomLabelRow {
    std::uint64_t seed = 0;
    std::map<std::string, std::string> permutation;
    double mismatch_fraction = 0.0;   // measured through amplitude channels
    double best_train_accuracy = 0.0; // ceiling given the vanishing channels
    double trained_accuracy = 0.0;    // argmax accuracy after training
};

struct RandomLabelReport {
    RandomLabelRow control;
    std::vector<RandomLabelRow> runs;
};

/// Trains on randomized labels per seed and reports how often the true-class
/// amplitude channel vanishes identically, against the unrandomized control.
RandomLabelReport random_label_experiment(const LabeledDataset& ds, const TrainingConfig& cfg,
                                          const std::vector<std::uint64_t>& seeds);

struct SweepRow {
    int two_jmax = 0;
    int petals = 0;
    int total_valence = 0;
    long long dim_hilbert = 0;
    double train_error = 0.0;
    double test_error = 0.0;
};

struct SweepConfig {
    std::vector<int> two_jmax_list;
    std::vector<int> petal_list;  // flower graphs, valence = 2 * petals
    int items_per_class = 4;
    std::uint64_t seed = 1;
    TrainingConfig training;
};

/// Metric (spin cutoff) x topological (valence) capacity grid; exploratory
/// output for plotting, asserted only for determinism and completeness.
std::vector<SweepRow> capacity_sweep(const SweepConfig& cfg);

struct PerceptronReport {
    std::string encoding;  // human-readable description of the spin encoding
    struct Row {
        double scale = 0.0;       // mean-spin scale s (hbar-analog = 1/s)
        double agreement = 0.0;   // fraction matching sign(w.x + b)
        int ties_excluded = 0;
    };
    std::vector<Row> rows;
};

struct PerceptronConfig {
    int two_jmax = 16;
    double base_mean = 4.0;   // lattice center M
    double coupling = 1.0;    // class mean offset kappa
    double spread = 0.5;
    ClassifyOptions classify;
};

/// Compares the amplitude-classifier decision on coherent single-node loop
/// encodings against the linear rule sign(w.x + b) across mean-spin scales.
PerceptronReport semiclassical_perceptron_check(const std::vector<double>& w, double b,
                                                const std::vector<std::vector<double>>& inputs,
                                                const std::vector<double>& scales,
                                                const PerceptronConfig& cfg = {});

namespace datasets {

/// Two loop classes separable by spin magnitude; items sampled from the
/// discretized Gaussians around the class means.
LabeledDataset separable_loops(const GroupSpec& su2, double mean_a, double mean_b, int per_class,
                               std::uint64_t seed);

/// Three classes with pairwise non-isomorphic graphs: loop, theta and a
/// two-petal flower.
LabeledDataset topological_trio(const GroupSpec& su2, int per_class);

} // namespace datasets

} // namespace tqnn
