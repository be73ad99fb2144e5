#include "jdtc/core/lmb.hpp"

#include "jdtc/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace jdtc {

std::vector<Label> LmbDensity::labels() const {
    std::vector<Label> out;
    out.reserve(tracks.size());
    for (const auto& t : tracks) out.push_back(t.label);
    return out;
}

std::optional<std::size_t> LmbDensity::find(const Label& label) const {
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (tracks[i].label == label) return i;
    }
    return std::nullopt;
}

double LmbDensity::mean_cardinality() const {
    double n = 0.0;
    for (const auto& t : tracks) n += t.existence;
    return n;
}

bool AssociationMap::is_injective() const {
    std::set<int> radar;
    std::set<int> esm;
    for (const auto& a : per_track) {
        if (a.radar != kMiss && !radar.insert(a.radar).second) return false;
        if (a.esm != kMiss && !esm.insert(a.esm).second) return false;
    }
    return true;
}

double lmb_set_weight(const LmbDensity& density, const std::vector<Label>& label_set) {
    std::vector<bool> included(density.tracks.size(), false);
    for (const auto& l : label_set) {
        const auto pos = density.find(l);
        if (!pos) {
            throw DomainError("lmb_set_weight: label (" + std::to_string(l.birth_time) + "," +
                              std::to_string(l.birth_index) + ") not in density");
        }
        included[*pos] = true;
    }
    double w = 1.0;
    for (std::size_t i = 0; i < density.tracks.size(); ++i) {
        const double r = density.tracks[i].existence;
        w *= included[i] ? r : (1.0 - r);
    }
    return w;
}

Moments class_moments(const ClassDensity& cd) {
    std::vector<double> weights;
    std::vector<Moments> parts;
    for (std::size_t m = 0; m < cd.models.size(); ++m) {
        for (const auto& c : cd.models[m].components) {
            weights.push_back(cd.model_probs(static_cast<Eigen::Index>(m)) * c.weight);
            parts.push_back({c.mean, c.cov});
        }
    }
    if (parts.empty()) throw DomainError("class_moments: empty class density");
    return combine_moments(weights, parts);
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("invalid LMB density: " + what);
}

} // namespace

void validate(const LmbDensity& density, double tol) {
    std::set<Label> seen;
    for (const auto& t : density.tracks) {
        require(seen.insert(t.label).second, "duplicate label");
        require(t.existence >= 0.0 && t.existence <= 1.0, "existence outside [0,1]");
        const auto& d = t.density;
        require(d.class_probs.size() == d.num_classes(), "class probability size");
        require(d.class_probs.minCoeff() >= -tol, "negative class probability");
        require(std::abs(d.class_probs.sum() - 1.0) <= tol, "class probabilities not normalized");
        for (const auto& cd : d.classes) {
            require(cd.model_probs.size() == static_cast<Eigen::Index>(cd.models.size()),
                    "model probability size");
            require(std::abs(cd.model_probs.sum() - 1.0) <= tol,
                    "model probabilities not normalized");
            for (const auto& gm : cd.models) {
                require(!gm.empty(), "empty mixture");
                require(std::abs(gm.total_weight() - 1.0) <= tol, "mixture not normalized");
                for (const auto& c : gm.components) {
                    require(c.weight >= 0.0, "negative component weight");
                    require(is_valid_covariance(c.cov), "invalid covariance");
                }
            }
        }
    }
}

} // namespace jdtc
