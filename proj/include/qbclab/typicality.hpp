// Method of types over finite alphabets and the spectral (projector) versions
// used on tensor-power states.
//
// Support conventions are strict: the unconditional typical set requires
// p(x) = 0 <=> N(x|word) = 0 exactly (every positive-probability letter must
// occur), and the conditional set applies t(y|x) = 0 <=> N(x,y) = 0 for each
// conditioning letter x that occurs in the conditioning word. Typical
// projectors are built letter-wise from deterministic eigendecompositions and
// select eigenvalue-index sequences that are conditionally typical for the
// spectral law given the letter pattern.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qbclab/quantum.hpp"
#include "qbclab/rng.hpp"

namespace qbclab {

inline constexpr std::uint64_t kTypeGuard = 1000000;      // enumerate_types
inline constexpr std::uint64_t kWordGuard = 10000000;     // word enumerations

struct TypeVector {
    std::vector<std::int64_t> counts;  // per letter, summing to n
    int n() const;
};

std::uint64_t count_types(std::size_t alphabet, int n);  // C(n+|X|-1, |X|-1)
std::vector<TypeVector> enumerate_types(std::size_t alphabet, int n);

TypeVector word_type(const Word& w, std::size_t alphabet);

// delta-typical words for p over {0..|p|-1}: per-letter count window plus the
// literal support biconditional.
std::vector<Word> typical_set(const std::vector<double>& p, int n, double delta);

// delta-conditionally-typical words for the row-stochastic t (row x = t(.|x))
// given x_word: joint-count window |N(x,y) - t(y|x) N(x)| <= n*delta plus the
// support biconditional on conditioning letters present in x_word.
std::vector<Word> conditionally_typical_set(const Eigen::MatrixXd& t, const Word& x_word,
                                            double delta);

// i.i.d. law renormalized on its typical set. l1 distance to the unpruned law
// is exactly 2*(1 - iid_mass).
struct PrunedDistribution {
    int n = 0;
    std::vector<Word> support;
    std::vector<double> prob;        // renormalized, sums to 1 within 1e-12
    std::vector<double> cumulative;  // prefix sums of prob
    double iid_mass = 0.0;           // mass of support under the unpruned law

    double l1_to_iid() const { return 2.0 * (1.0 - iid_mass); }
    double tv_to_iid() const { return 1.0 - iid_mass; }
    const Word& sample(rng::Stream& stream) const;
};

PrunedDistribution pruned(const std::vector<double>& p, int n, double delta);
PrunedDistribution pruned_conditional(const Eigen::MatrixXd& t, const Word& x_word, double delta);

enum class ProjectorKind { Unconditional, Conditional, TotalConditional };

struct ProjectorStats {
    double overlap = 0.0;     // tr(reference-word state * projector)
    std::int64_t rank = 0;    // number of selected eigen-index sequences
    double log2_rank = -std::numeric_limits<double>::infinity();
    double lambda_max = 0.0;  // largest selected eigenvalue product
};

struct TypicalProjector {
    Operator projector;  // idempotent Hermitian within 1e-8
    ProjectorKind kind = ProjectorKind::Unconditional;
    int n = 0;
    double delta = 0.0;
    double entropy_rate = 0.0;  // pattern-weighted mean spectral entropy S(A|pattern)
    ProjectorStats stats;
};

// Projector for the word state (x) states[x_i], eigen-index sequences
// conditionally typical given the letter pattern of x_word.
TypicalProjector state_typical_projector(const std::vector<DensityOperator>& states_by_letter,
                                         const Word& x_word, double delta);

// Projector for the channel word state (x) outputs[y_i], conditioned on the
// (x_i, y_i) pair pattern. If r is supplied, y_word must be delta-conditionally
// typical for r given x_word.
TypicalProjector channel_conditional_projector(const std::vector<DensityOperator>& outputs_by_y,
                                               const Word& x_word, const Word& y_word,
                                               double delta,
                                               const std::optional<Eigen::MatrixXd>& r = {});

// Projector of the averaged letter states rho_x = sum_y r(y|x) outputs[y],
// conditioned on x_word.
TypicalProjector total_conditional_projector(const std::vector<DensityOperator>& outputs_by_y,
                                             const Eigen::MatrixXd& r, const Word& x_word,
                                             double delta);

struct ProjectorConditioning {
    std::optional<Eigen::MatrixXd> r;
    std::optional<Word> y_word;
};

TypicalProjector typical_projector(const std::vector<DensityOperator>& states, const Word& x_word,
                                   double delta, ProjectorKind kind,
                                   const std::optional<ProjectorConditioning>& conditioning = {});

// tr(projector * (x)_i states[word_i]) for an arbitrary word over the same
// per-letter state family.
double projector_overlap(const TypicalProjector& proj,
                         const std::vector<DensityOperator>& states_by_letter, const Word& word);

}  // namespace qbclab
