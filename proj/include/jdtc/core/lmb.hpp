#pragma once

#include "jdtc/core/gaussian.hpp"

#include <Eigen/Dense>

#include <compare>
#include <optional>
#include <vector>

namespace jdtc {

/// Track label: the scan a target was born on plus a slot index among the
/// births of that scan.
struct Label {
    int birth_time = 0;
    int birth_index = 0;

    auto operator<=>(const Label&) const = default;
};

/// Density of one class hypothesis. A class with several motion models holds
/// one mixture per model plus the model probabilities.
struct ClassDensity {
    std::vector<GaussianMixture> models;
    Eigen::VectorXd model_probs;
};

/// Joint state/class density of one track: p(x | H^j) for every class j and
/// the class probabilities P(H^j). Class ids are 0-based.
struct ClassConditionedDensity {
    std::vector<ClassDensity> classes;
    Eigen::VectorXd class_probs;

    [[nodiscard]] int num_classes() const { return static_cast<int>(classes.size()); }
};

struct Track {
    Label label;
    double existence = 0.0;
    ClassConditionedDensity density;
};

struct LmbDensity {
    std::vector<Track> tracks;

    [[nodiscard]] std::vector<Label> labels() const;
    [[nodiscard]] std::optional<std::size_t> find(const Label& label) const;
    [[nodiscard]] double mean_cardinality() const;
};

inline constexpr int kMiss = -1;

/// Measurement indices assigned to one track; kMiss marks a missed detection.
struct Assignment {
    int radar = kMiss;
    int esm = kMiss;

    [[nodiscard]] bool is_miss() const { return radar == kMiss && esm == kMiss; }
    bool operator==(const Assignment&) const = default;
};

/// One assignment per track, indexed like LmbDensity::tracks.
struct AssociationMap {
    std::vector<Assignment> per_track;

    [[nodiscard]] bool is_injective() const;
    bool operator==(const AssociationMap&) const = default;
};

struct HypothesisWeight {
    std::vector<Label> label_set;
    AssociationMap assoc;
    double weight = 0.0;
};

/// Probability that exactly the labels in label_set exist:
/// prod_{i not in L}(1 - r_i) * prod_{l in L} r_l. Throws DomainError on an
/// unknown label.
[[nodiscard]] double lmb_set_weight(const LmbDensity& density,
                                    const std::vector<Label>& label_set);

/// Moments of p(x | H^j), mixing over the class's motion models.
[[nodiscard]] Moments class_moments(const ClassDensity& cd);

/// Throws DomainError if any track invariant is broken (labels distinct,
/// existence in [0,1], normalized class and model probabilities, normalized
/// mixtures, valid covariances).
void validate(const LmbDensity& density, double tol = 1e-9);

} // namespace jdtc
