#include "jdtc/harness/config_io.hpp"

#include "jdtc/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

namespace jdtc {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Minimal JSON scanner used only to map pointers back to source lines.
class Scanner {
public:
    explicit Scanner(std::string_view text) : t_(text) {}

    std::size_t pos() const { return p_; }

    void skip_ws() {
        while (p_ < t_.size() && (t_[p_] == ' ' || t_[p_] == '\n' || t_[p_] == '\r' ||
                                  t_[p_] == '\t')) {
            ++p_;
        }
    }

    bool peek(char c) {
        skip_ws();
        return p_ < t_.size() && t_[p_] == c;
    }

    bool consume(char c) {
        if (!peek(c)) return false;
        ++p_;
        return true;
    }

    std::string read_string() {
        std::string out;
        if (!consume('"')) return out;
        while (p_ < t_.size() && t_[p_] != '"') {
            if (t_[p_] == '\\' && p_ + 1 < t_.size()) {
                out.push_back(t_[p_ + 1]);
                p_ += 2;
                continue;
            }
            out.push_back(t_[p_++]);
        }
        ++p_;
        return out;
    }

    void skip_value() {
        skip_ws();
        if (p_ >= t_.size()) return;
        const char c = t_[p_];
        if (c == '"') {
            read_string();
        } else if (c == '{' || c == '[') {
            const char close = c == '{' ? '}' : ']';
            ++p_;
            if (consume(close)) return;
            while (p_ < t_.size()) {
                if (c == '{') {
                    read_string();
                    if (!consume(':')) return;
                }
                skip_value();
                if (consume(close)) return;
                if (!consume(',')) return;
            }
        } else {
            while (p_ < t_.size() && t_[p_] != ',' && t_[p_] != '}' && t_[p_] != ']' &&
                   t_[p_] != ' ' && t_[p_] != '\n' && t_[p_] != '\r' && t_[p_] != '\t') {
                ++p_;
            }
        }
    }

    /// Move to the value of member `key`; false (position unchanged) when absent.
    bool enter_member(const std::string& key) {
        const std::size_t start = p_;
        if (!consume('{')) return false;
        if (peek('}')) {
            p_ = start;
            return false;
        }
        while (p_ < t_.size()) {
            const std::string name = read_string();
            if (!consume(':')) break;
            skip_ws();
            if (name == key) return true;
            skip_value();
            if (!consume(',')) break;
        }
        p_ = start;
        return false;
    }

    bool enter_element(std::size_t index) {
        const std::size_t start = p_;
        if (!consume('[')) return false;
        if (peek(']')) {
            p_ = start;
            return false;
        }
        for (std::size_t i = 0; i < index; ++i) {
            skip_value();
            if (!consume(',')) {
                p_ = start;
                return false;
            }
        }
        skip_ws();
        return true;
    }

private:
    std::string_view t_;
    std::size_t p_ = 0;
};

std::vector<std::string> split_pointer(std::string_view pointer) {
    std::vector<std::string> tokens;
    if (pointer.empty()) return tokens;
    std::size_t i = pointer.front() == '/' ? 1 : 0;
    std::string cur;
    for (; i <= pointer.size(); ++i) {
        if (i == pointer.size() || pointer[i] == '/') {
            tokens.push_back(cur);
            cur.clear();
        } else if (pointer[i] == '~' && i + 1 < pointer.size()) {
            cur.push_back(pointer[i + 1] == '1' ? '/' : '~');
            ++i;
        } else {
            cur.push_back(pointer[i]);
        }
    }
    return tokens;
}

std::string join(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string join(const std::string& ptr, std::size_t index) {
    return ptr + "/" + std::to_string(index);
}

/// Typed access to the document with pointer-anchored errors.
class Reader {
public:
    Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& ptr, const std::string& message) const {
        throw ConfigFileError(source_, locate_pointer(text_, ptr),
                              (ptr.empty() ? std::string("document") : ptr) + ": " + message);
    }

    void expect_object(const json& j, const std::string& ptr,
                       std::initializer_list<std::string_view> allowed) const {
        if (!j.is_object()) fail(ptr, "expected an object");
        for (const auto& [key, value] : j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(join(ptr, key), "unknown key '" + key + "'");
            }
        }
    }

    double number(const json& j, const std::string& ptr) const {
        if (!j.is_number()) fail(ptr, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(ptr, "expected a finite number");
        return v;
    }

    double nonnegative(const json& j, const std::string& ptr) const {
        const double v = number(j, ptr);
        if (v < 0.0) fail(ptr, "expected a nonnegative number");
        return v;
    }

    double probability(const json& j, const std::string& ptr) const {
        const double v = number(j, ptr);
        if (v < 0.0 || v > 1.0) fail(ptr, "expected a probability in [0, 1]");
        return v;
    }

    long long integer(const json& j, const std::string& ptr) const {
        if (!j.is_number_integer()) fail(ptr, "expected an integer");
        return j.get<long long>();
    }

    int small_int(const json& j, const std::string& ptr) const {
        const long long v = integer(j, ptr);
        if (v < -1000000000LL || v > 1000000000LL) fail(ptr, "integer out of range");
        return static_cast<int>(v);
    }

    bool boolean(const json& j, const std::string& ptr) const {
        if (!j.is_boolean()) fail(ptr, "expected true or false");
        return j.get<bool>();
    }

    std::string string(const json& j, const std::string& ptr) const {
        if (!j.is_string()) fail(ptr, "expected a string");
        return j.get<std::string>();
    }

    const json& array(const json& j, const std::string& ptr) const {
        if (!j.is_array()) fail(ptr, "expected an array");
        return j;
    }

    Eigen::VectorXd vector(const json& j, const std::string& ptr, Eigen::Index size = -1) const {
        array(j, ptr);
        if (size >= 0 && static_cast<Eigen::Index>(j.size()) != size) {
            fail(ptr, "expected " + std::to_string(size) + " numbers, got " +
                          std::to_string(j.size()));
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) {
            v(static_cast<Eigen::Index>(i)) = number(j[i], join(ptr, i));
        }
        return v;
    }

    Eigen::MatrixXd matrix(const json& j, const std::string& ptr) const {
        array(j, ptr);
        if (j.empty()) fail(ptr, "expected a nonempty matrix");
        const auto rows = static_cast<Eigen::Index>(j.size());
        Eigen::Index cols = -1;
        Eigen::MatrixXd m;
        for (std::size_t r = 0; r < j.size(); ++r) {
            const Eigen::VectorXd row = vector(j[r], join(ptr, r), cols);
            if (cols < 0) {
                cols = row.size();
                if (cols == 0) fail(join(ptr, r), "matrix rows must be nonempty");
                m.resize(rows, cols);
            }
            m.row(static_cast<Eigen::Index>(r)) = row.transpose();
        }
        return m;
    }

    /// Run a validator and anchor its ConfigError at `ptr`.
    template <class F>
    void checked(const std::string& ptr, F&& f) const {
        try {
            f();
        } catch (const ConfigFileError&) {
            throw;
        } catch (const ConfigError& e) {
            fail(ptr, e.what());
        }
    }

private:
    std::string_view text_;
    std::string source_;
};

MotionKind parse_motion(const Reader& rd, const json& j, const std::string& ptr) {
    const std::string s = rd.string(j, ptr);
    if (s == "cv") return MotionKind::CV;
    if (s == "ca") return MotionKind::CA;
    rd.fail(ptr, "unknown motion kind '" + s + "' (expected cv or ca)");
}

const char* motion_name(MotionKind k) { return k == MotionKind::CV ? "cv" : "ca"; }

StateVec parse_state(const Reader& rd, const json& j, const std::string& ptr) {
    return rd.vector(j, ptr, kStateDim);
}

void parse_classes(const Reader& rd, const json& j, const std::string& ptr, ScenarioConfig& c) {
    rd.array(j, ptr);
    if (j.empty()) rd.fail(ptr, "at least one class is required");
    c.classes.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = join(ptr, i);
        const json& cj = j[i];
        rd.expect_object(cj, p, {"models", "switch_matrix", "initial_model_probs"});
        if (!cj.contains("models")) rd.fail(p, "missing 'models'");
        ClassMotionSpec spec;
        const std::string mp = join(p, "models");
        rd.array(cj["models"], mp);
        if (cj["models"].empty()) rd.fail(mp, "at least one motion model is required");
        for (std::size_t m = 0; m < cj["models"].size(); ++m) {
            const std::string q = join(mp, m);
            const json& mj = cj["models"][m];
            rd.expect_object(mj, q, {"kind", "noise_var"});
            if (!mj.contains("kind")) rd.fail(q, "missing 'kind'");
            spec.kinds.push_back(parse_motion(rd, mj["kind"], join(q, "kind")));
            spec.noise_vars.push_back(
                mj.contains("noise_var") ? rd.nonnegative(mj["noise_var"], join(q, "noise_var"))
                : spec.kinds.back() == MotionKind::CV ? 1.0
                                                      : 10.0);
        }
        const auto M = static_cast<Eigen::Index>(spec.kinds.size());
        spec.switch_matrix = cj.contains("switch_matrix")
                                 ? rd.matrix(cj["switch_matrix"], join(p, "switch_matrix"))
                                 : Eigen::MatrixXd(Eigen::MatrixXd::Identity(M, M));
        spec.initial_model_probs =
            cj.contains("initial_model_probs")
                ? rd.vector(cj["initial_model_probs"], join(p, "initial_model_probs"), M)
                : Eigen::VectorXd(Eigen::VectorXd::Constant(M, 1.0 / static_cast<double>(M)));
        c.classes.push_back(std::move(spec));
    }
}

void parse_targets(const Reader& rd, const json& j, const std::string& ptr, ScenarioConfig& c) {
    rd.array(j, ptr);
    c.targets.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = join(ptr, i);
        const json& tj = j[i];
        rd.expect_object(tj, p, {"birth", "death", "state", "class", "segments"});
        for (const char* key : {"birth", "death", "state", "class"}) {
            if (!tj.contains(key)) rd.fail(p, std::string("missing '") + key + "'");
        }
        TargetSpec t;
        t.birth = rd.small_int(tj["birth"], join(p, "birth"));
        t.death = rd.small_int(tj["death"], join(p, "death"));
        t.initial = parse_state(rd, tj["state"], join(p, "state"));
        t.true_class = rd.small_int(tj["class"], join(p, "class")) - 1;
        if (tj.contains("segments")) {
            const std::string sp = join(p, "segments");
            rd.array(tj["segments"], sp);
            for (std::size_t s = 0; s < tj["segments"].size(); ++s) {
                const std::string q = join(sp, s);
                const json& sj = tj["segments"][s];
                rd.expect_object(sj, q, {"start", "motion", "acceleration"});
                if (!sj.contains("start")) rd.fail(q, "missing 'start'");
                if (!sj.contains("motion")) rd.fail(q, "missing 'motion'");
                MotionSegment seg;
                seg.start = rd.small_int(sj["start"], join(q, "start"));
                seg.kind = parse_motion(rd, sj["motion"], join(q, "motion"));
                if (sj.contains("acceleration")) {
                    seg.acceleration = rd.vector(sj["acceleration"], join(q, "acceleration"), 2);
                } else if (seg.kind == MotionKind::CA) {
                    rd.fail(q, "a ca segment needs 'acceleration'");
                }
                t.segments.push_back(seg);
            }
        }
        c.targets.push_back(std::move(t));
    }
}

void parse_births(const Reader& rd, const json& j, const std::string& ptr, ScenarioConfig& c) {
    rd.array(j, ptr);
    c.births.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = join(ptr, i);
        const json& bj = j[i];
        rd.expect_object(bj, p, {"existence", "mean", "cov_diag", "class_prior"});
        if (!bj.contains("mean")) rd.fail(p, "missing 'mean'");
        if (!bj.contains("cov_diag")) rd.fail(p, "missing 'cov_diag'");
        BirthSpec b;
        if (bj.contains("existence")) b.existence = rd.probability(bj["existence"], join(p, "existence"));
        b.mean = parse_state(rd, bj["mean"], join(p, "mean"));
        const Eigen::VectorXd d = rd.vector(bj["cov_diag"], join(p, "cov_diag"), kStateDim);
        if (d.minCoeff() <= 0.0) rd.fail(join(p, "cov_diag"), "variances must be positive");
        b.cov = StateCov::Zero();
        b.cov.diagonal() = d;
        b.class_prior = bj.contains("class_prior")
                            ? rd.vector(bj["class_prior"], join(p, "class_prior"))
                            : Eigen::VectorXd(Eigen::VectorXd::Constant(
                                  c.num_classes(), 1.0 / std::max(1, c.num_classes())));
        c.births.push_back(std::move(b));
    }
}

Region parse_region(const Reader& rd, const json& j, const std::string& ptr, Region r) {
    rd.expect_object(j, ptr, {"x_min", "x_max", "y_min", "y_max"});
    if (j.contains("x_min")) r.x_min = rd.number(j["x_min"], join(ptr, "x_min"));
    if (j.contains("x_max")) r.x_max = rd.number(j["x_max"], join(ptr, "x_max"));
    if (j.contains("y_min")) r.y_min = rd.number(j["y_min"], join(ptr, "y_min"));
    if (j.contains("y_max")) r.y_max = rd.number(j["y_max"], join(ptr, "y_max"));
    if (r.area() <= 0.0) rd.fail(ptr, "region must have positive area");
    return r;
}

void parse_radar(const Reader& rd, const json& j, const std::string& ptr, RadarModel& r) {
    rd.expect_object(j, ptr,
                     {"mode", "noise_cov", "p_d", "clutter_rate", "region", "position", "max_range"});
    if (j.contains("mode")) {
        const std::string m = rd.string(j["mode"], join(ptr, "mode"));
        if (m == "linear") {
            r.mode = RadarMode::LinearPosition;
        } else if (m == "range-bearing") {
            r.mode = RadarMode::RangeBearing;
        } else {
            rd.fail(join(ptr, "mode"), "unknown radar mode '" + m + "' (expected linear or range-bearing)");
        }
    }
    if (j.contains("noise_cov")) {
        const Eigen::MatrixXd m = rd.matrix(j["noise_cov"], join(ptr, "noise_cov"));
        if (m.rows() != 2 || m.cols() != 2) rd.fail(join(ptr, "noise_cov"), "expected a 2 x 2 matrix");
        r.noise_cov = m;
    }
    if (j.contains("p_d")) r.p_d = rd.probability(j["p_d"], join(ptr, "p_d"));
    if (j.contains("clutter_rate")) r.clutter_rate = rd.nonnegative(j["clutter_rate"], join(ptr, "clutter_rate"));
    if (j.contains("region")) r.region = parse_region(rd, j["region"], join(ptr, "region"), r.region);
    if (j.contains("position")) r.position = rd.vector(j["position"], join(ptr, "position"), 2);
    if (j.contains("max_range")) r.max_range = rd.number(j["max_range"], join(ptr, "max_range"));
}

void parse_esm(const Reader& rd, const json& j, const std::string& ptr, EsmModel& e) {
    rd.expect_object(j, ptr, {"enabled", "position", "bearing_std_deg", "bearing_noise_var", "p_d",
                              "confusion", "clutter_rate"});
    if (j.contains("bearing_std_deg") && j.contains("bearing_noise_var")) {
        rd.fail(join(ptr, "bearing_noise_var"), "give bearing_std_deg or bearing_noise_var, not both");
    }
    if (j.contains("enabled")) e.enabled = rd.boolean(j["enabled"], join(ptr, "enabled"));
    if (j.contains("position")) e.position = rd.vector(j["position"], join(ptr, "position"), 2);
    if (j.contains("bearing_std_deg")) {
        const double s = rd.number(j["bearing_std_deg"], join(ptr, "bearing_std_deg"));
        if (s <= 0.0) rd.fail(join(ptr, "bearing_std_deg"), "expected a positive number");
        e.bearing_noise_var = std::pow(s * std::numbers::pi / 180.0, 2);
    }
    if (j.contains("bearing_noise_var")) {
        e.bearing_noise_var = rd.number(j["bearing_noise_var"], join(ptr, "bearing_noise_var"));
        if (e.bearing_noise_var <= 0.0) rd.fail(join(ptr, "bearing_noise_var"), "expected a positive number");
    }
    if (j.contains("p_d")) e.p_d = rd.probability(j["p_d"], join(ptr, "p_d"));
    if (j.contains("confusion")) e.confusion = rd.matrix(j["confusion"], join(ptr, "confusion"));
    if (j.contains("clutter_rate")) e.clutter_rate = rd.nonnegative(j["clutter_rate"], join(ptr, "clutter_rate"));
    rd.checked(ptr, [&] { e.validate(); });
}

Eigen::MatrixXd scalar_or_matrix(const Reader& rd, const json& j, const std::string& ptr, int J) {
    if (j.is_number()) return Eigen::MatrixXd::Constant(J, J, rd.nonnegative(j, ptr));
    Eigen::MatrixXd m = rd.matrix(j, ptr);
    if (m.rows() != J || m.cols() != J) {
        rd.fail(ptr, "expected a number or a " + std::to_string(J) + " x " + std::to_string(J) + " matrix");
    }
    return m;
}

void parse_risk(const Reader& rd, const json& j, const std::string& ptr, ScenarioConfig& c) {
    rd.expect_object(j, ptr, {"alpha", "beta", "gamma", "c"});
    const int J = c.num_classes();
    RiskCoefficients& r = c.coeffs;
    if (r.num_classes() != J) r = RiskCoefficients::uniform(J, 20.0, 1.0, r.gamma);
    if (j.contains("alpha")) r.alpha = scalar_or_matrix(rd, j["alpha"], join(ptr, "alpha"), J);
    if (j.contains("beta")) r.beta = scalar_or_matrix(rd, j["beta"], join(ptr, "beta"), J);
    if (j.contains("gamma")) r.gamma = rd.nonnegative(j["gamma"], join(ptr, "gamma"));
    if (j.contains("c")) r.c = scalar_or_matrix(rd, j["c"], join(ptr, "c"), J);
    rd.checked(ptr, [&] { r.validate(); });
}

void parse_filter(const Reader& rd, const json& j, const std::string& ptr, FilterParams& f) {
    rd.expect_object(j, ptr, {"survival_probability", "gate_probability", "k_best",
                              "existence_prune", "extraction_threshold", "prune_threshold",
                              "merge_distance", "max_components", "miss_existence_override",
                              "exhaustive_decisions", "exhaustive_decision_limit"});
    if (j.contains("survival_probability")) f.p_survival = rd.probability(j["survival_probability"], join(ptr, "survival_probability"));
    if (j.contains("gate_probability")) f.gate_probability = rd.number(j["gate_probability"], join(ptr, "gate_probability"));
    if (j.contains("k_best")) f.k_best = rd.small_int(j["k_best"], join(ptr, "k_best"));
    if (j.contains("existence_prune")) f.existence_prune = rd.probability(j["existence_prune"], join(ptr, "existence_prune"));
    if (j.contains("extraction_threshold")) f.extraction_threshold = rd.probability(j["extraction_threshold"], join(ptr, "extraction_threshold"));
    if (j.contains("prune_threshold")) f.mixture_limits.prune_threshold = rd.nonnegative(j["prune_threshold"], join(ptr, "prune_threshold"));
    if (j.contains("merge_distance")) f.mixture_limits.merge_distance = rd.nonnegative(j["merge_distance"], join(ptr, "merge_distance"));
    if (j.contains("max_components")) {
        f.mixture_limits.max_components = rd.small_int(j["max_components"], join(ptr, "max_components"));
        if (f.mixture_limits.max_components < 1) rd.fail(join(ptr, "max_components"), "expected at least 1");
    }
    if (j.contains("miss_existence_override")) f.miss_existence_override = rd.boolean(j["miss_existence_override"], join(ptr, "miss_existence_override"));
    if (j.contains("exhaustive_decisions")) f.exhaustive_decisions = rd.boolean(j["exhaustive_decisions"], join(ptr, "exhaustive_decisions"));
    if (j.contains("exhaustive_decision_limit")) f.exhaustive_decision_limit = rd.small_int(j["exhaustive_decision_limit"], join(ptr, "exhaustive_decision_limit"));
    rd.checked(ptr, [&] { f.validate(); });
}

void parse_baseline(const Reader& rd, const json& j, const std::string& ptr, GnnParams& g) {
    rd.expect_object(j, ptr, {"gate_probability", "confirm_hits", "confirm_window", "max_misses",
                              "init_velocity_std", "init_acceleration_std", "etd_recursive",
                              "birth_gated_initiation"});
    if (j.contains("gate_probability")) g.gate_probability = rd.number(j["gate_probability"], join(ptr, "gate_probability"));
    if (j.contains("confirm_hits")) g.confirm_hits = rd.small_int(j["confirm_hits"], join(ptr, "confirm_hits"));
    if (j.contains("confirm_window")) g.confirm_window = rd.small_int(j["confirm_window"], join(ptr, "confirm_window"));
    if (j.contains("max_misses")) g.max_misses = rd.small_int(j["max_misses"], join(ptr, "max_misses"));
    if (j.contains("init_velocity_std")) g.init_velocity_std = rd.nonnegative(j["init_velocity_std"], join(ptr, "init_velocity_std"));
    if (j.contains("init_acceleration_std")) g.init_acceleration_std = rd.nonnegative(j["init_acceleration_std"], join(ptr, "init_acceleration_std"));
    if (j.contains("etd_recursive")) g.etd_recursive = rd.boolean(j["etd_recursive"], join(ptr, "etd_recursive"));
    if (j.contains("birth_gated_initiation")) g.birth_gated_initiation = rd.boolean(j["birth_gated_initiation"], join(ptr, "birth_gated_initiation"));
    rd.checked(ptr, [&] { g.validate(); });
}

void parse_metrics(const Reader& rd, const json& j, const std::string& ptr, OspaParams& o) {
    rd.expect_object(j, ptr, {"ospa_cutoff", "ospa_order"});
    if (j.contains("ospa_cutoff")) {
        o.cutoff = rd.number(j["ospa_cutoff"], join(ptr, "ospa_cutoff"));
        if (o.cutoff <= 0.0) rd.fail(join(ptr, "ospa_cutoff"), "expected a positive number");
    }
    if (j.contains("ospa_order")) {
        o.order = rd.number(j["ospa_order"], join(ptr, "ospa_order"));
        if (o.order < 1.0) rd.fail(join(ptr, "ospa_order"), "expected a number >= 1");
    }
}

/// Pointer of the section named at the start of a ScenarioConfig::validate message.
std::string pointer_for_message(const std::string& msg) {
    const std::pair<std::string_view, std::string_view> sections[] = {
        {"class ", "/classes"}, {"target ", "/targets"}, {"birth ", "/births"}};
    for (const auto& [prefix, ptr] : sections) {
        if (msg.rfind(prefix, 0) != 0) continue;
        const std::size_t end = msg.find(':');
        try {
            const int n = std::stoi(msg.substr(prefix.size(), end - prefix.size()));
            return std::string(ptr) + "/" + std::to_string(n - 1);
        } catch (const std::exception&) {
            return std::string(ptr);
        }
    }
    if (msg.rfind("risk", 0) == 0) return "/risk";
    if (msg.rfind("radar", 0) == 0) return "/radar";
    if (msg.rfind("ESM", 0) == 0) return "/esm";
    if (msg.rfind("OSPA", 0) == 0) return "/metrics";
    if (msg.rfind("trials", 0) == 0) return "/trials";
    if (msg.rfind("horizon", 0) == 0) return "/horizon";
    if (msg.rfind("scan_period", 0) == 0) return "/scan_period";
    return "";
}

ordered_json vec_json(const Eigen::VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

ordered_json mat_json(const Eigen::MatrixXd& m) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
    return a;
}

} // namespace

ConfigFileError::ConfigFileError(std::string source, int line, const std::string& detail)
    : ConfigError(source + ":" + std::to_string(line) + ": error: " + detail),
      source_(std::move(source)),
      line_(line),
      detail_(detail) {}

ScenarioConfig builtin_scenario(std::string_view name, std::vector<std::string>* warnings) {
    if (name == "example1") return build_example1();
    if (name == "example2") return build_example2(10.0, warnings);
    if (name == "fusion-demo") return build_fusion_demo();
    throw ConfigError("unknown scenario '" + std::string(name) +
                      "' (expected example1, example2 or fusion-demo)");
}

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int locate_pointer(std::string_view text, std::string_view pointer) {
    Scanner sc(text);
    sc.skip_ws();
    for (const std::string& token : split_pointer(pointer)) {
        bool moved = false;
        if (sc.peek('{')) {
            moved = sc.enter_member(token);
        } else if (sc.peek('[') && !token.empty() &&
                   std::all_of(token.begin(), token.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            moved = sc.enter_element(std::stoul(token));
        }
        if (!moved) break;
    }
    sc.skip_ws();
    return line_of_offset(text, sc.pos());
}

ScenarioConfig parse_scenario_config(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // byte is 1-based and points just past the offending character.
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        const std::size_t colon = what.find(": ");
        throw ConfigFileError(source, line_of_offset(text, offset),
                              "invalid JSON: " + (colon == std::string::npos ? what : what.substr(colon + 2)));
    }
    const Reader rd(text, source);
    rd.expect_object(doc, "",
                     {"name", "base", "scan_period", "horizon", "classes", "targets", "births", "radar",
                      "esm", "risk", "filter", "baseline", "metrics", "trials", "seed", "algorithm"});

    ScenarioConfig c;
    {
        const std::string base = doc.contains("base") ? rd.string(doc["base"], "/base") : "example1";
        try {
            c = builtin_scenario(base);
        } catch (const ConfigError& e) {
            rd.fail("/base", e.what());
        }
    }
    if (doc.contains("name")) c.name = rd.string(doc["name"], "/name");
    if (doc.contains("scan_period")) {
        c.scan_period = rd.number(doc["scan_period"], "/scan_period");
        if (c.scan_period <= 0.0) rd.fail("/scan_period", "expected a positive number");
    }
    if (doc.contains("horizon")) c.horizon = rd.small_int(doc["horizon"], "/horizon");
    if (doc.contains("classes")) parse_classes(rd, doc["classes"], "/classes", c);
    if (doc.contains("targets")) parse_targets(rd, doc["targets"], "/targets", c);
    if (doc.contains("births")) parse_births(rd, doc["births"], "/births", c);
    if (doc.contains("radar")) parse_radar(rd, doc["radar"], "/radar", c.sensors.radar);
    if (doc.contains("esm")) parse_esm(rd, doc["esm"], "/esm", c.sensors.esm);
    if (doc.contains("risk")) {
        parse_risk(rd, doc["risk"], "/risk", c);
    } else if (c.coeffs.num_classes() != c.num_classes()) {
        c.coeffs = RiskCoefficients::uniform(c.num_classes(), 20.0, 1.0, c.coeffs.gamma);
    }
    if (doc.contains("filter")) parse_filter(rd, doc["filter"], "/filter", c.filter);
    if (doc.contains("baseline")) parse_baseline(rd, doc["baseline"], "/baseline", c.baseline);
    if (doc.contains("metrics")) parse_metrics(rd, doc["metrics"], "/metrics", c.ospa);
    if (doc.contains("trials")) c.trials = rd.small_int(doc["trials"], "/trials");
    if (doc.contains("seed")) {
        const long long s = rd.integer(doc["seed"], "/seed");
        if (s < 0) rd.fail("/seed", "expected a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (doc.contains("algorithm")) {
        rd.checked("/algorithm", [&] { c.algorithm = parse_algorithm(rd.string(doc["algorithm"], "/algorithm")); });
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        rd.fail(pointer_for_message(e.what()), e.what());
    }
    return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigFileError(path.string(), 1, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str(), path.string());
}

ordered_json scenario_to_json(const ScenarioConfig& c) {
    ordered_json j;
    j["name"] = c.name;
    j["scan_period"] = c.scan_period;
    j["horizon"] = c.horizon;

    ordered_json classes = ordered_json::array();
    for (const auto& spec : c.classes) {
        ordered_json models = ordered_json::array();
        for (std::size_t m = 0; m < spec.kinds.size(); ++m) {
            models.push_back({{"kind", motion_name(spec.kinds[m])}, {"noise_var", spec.noise_vars[m]}});
        }
        classes.push_back({{"models", models},
                           {"switch_matrix", mat_json(spec.switch_matrix)},
                           {"initial_model_probs", vec_json(spec.initial_model_probs)}});
    }
    j["classes"] = classes;

    ordered_json targets = ordered_json::array();
    for (const auto& t : c.targets) {
        ordered_json segs = ordered_json::array();
        for (const auto& s : t.segments) {
            segs.push_back({{"start", s.start},
                            {"motion", motion_name(s.kind)},
                            {"acceleration", vec_json(s.acceleration)}});
        }
        targets.push_back({{"birth", t.birth},
                           {"death", t.death},
                           {"state", vec_json(t.initial)},
                           {"class", t.true_class + 1},
                           {"segments", segs}});
    }
    j["targets"] = targets;

    ordered_json births = ordered_json::array();
    for (const auto& b : c.births) {
        births.push_back({{"existence", b.existence},
                          {"mean", vec_json(b.mean)},
                          {"cov_diag", vec_json(b.cov.diagonal())},
                          {"class_prior", vec_json(b.class_prior)}});
    }
    j["births"] = births;

    const auto& r = c.sensors.radar;
    j["radar"] = {{"mode", r.mode == RadarMode::LinearPosition ? "linear" : "range-bearing"},
                  {"noise_cov", mat_json(r.noise_cov)},
                  {"p_d", r.p_d},
                  {"clutter_rate", r.clutter_rate},
                  {"region", {{"x_min", r.region.x_min}, {"x_max", r.region.x_max},
                              {"y_min", r.region.y_min}, {"y_max", r.region.y_max}}},
                  {"position", vec_json(r.position)},
                  {"max_range", r.max_range}};
    const auto& e = c.sensors.esm;
    j["esm"] = {{"enabled", e.enabled},
                {"position", vec_json(e.position)},
                {"bearing_noise_var", e.bearing_noise_var},
                {"p_d", e.p_d},
                {"confusion", mat_json(e.confusion)},
                {"clutter_rate", e.clutter_rate}};
    j["risk"] = {{"alpha", mat_json(c.coeffs.alpha)},
                 {"beta", mat_json(c.coeffs.beta)},
                 {"gamma", c.coeffs.gamma},
                 {"c", mat_json(c.coeffs.c)}};
    const auto& f = c.filter;
    j["filter"] = {{"survival_probability", f.p_survival},
                   {"gate_probability", f.gate_probability},
                   {"k_best", f.k_best},
                   {"existence_prune", f.existence_prune},
                   {"extraction_threshold", f.extraction_threshold},
                   {"prune_threshold", f.mixture_limits.prune_threshold},
                   {"merge_distance", f.mixture_limits.merge_distance},
                   {"max_components", f.mixture_limits.max_components},
                   {"miss_existence_override", f.miss_existence_override},
                   {"exhaustive_decisions", f.exhaustive_decisions},
                   {"exhaustive_decision_limit", f.exhaustive_decision_limit}};
    const auto& g = c.baseline;
    j["baseline"] = {{"gate_probability", g.gate_probability},
                     {"confirm_hits", g.confirm_hits},
                     {"confirm_window", g.confirm_window},
                     {"max_misses", g.max_misses},
                     {"init_velocity_std", g.init_velocity_std},
                     {"init_acceleration_std", g.init_acceleration_std},
                     {"etd_recursive", g.etd_recursive},
                     {"birth_gated_initiation", g.birth_gated_initiation}};
    j["metrics"] = {{"ospa_cutoff", c.ospa.cutoff}, {"ospa_order", c.ospa.order}};
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["algorithm"] = std::string(to_string(c.algorithm));
    return j;
}

ordered_json make_manifest(const ScenarioConfig& config, const MonteCarloResult& result,
                           const RunInfo& info) {
    ordered_json m;
    m["tool"] = "jdtc";
    m["version"] = info.version;
    m["git_describe"] = info.git_describe;
    m["scenario"] = config.name;
    m["algorithm"] = std::string(to_string(config.algorithm));
    m["seed"] = config.seed;
    m["trials"] = config.trials;
    m["threads"] = info.threads;
    m["failures"] = result.failures;
    m["outputs"] = info.outputs;
    m["warnings"] = info.warnings;
    const JpmWeights w = JpmWeights::from(config.coeffs);
    m["jpm"] = {{"formula", "alpha * misclassified_fraction + beta * ospa^2 + gamma * |est_n - true_n|"},
                {"alpha", w.alpha},
                {"beta", w.beta},
                {"gamma", w.gamma},
                {"note", "stand-in formula; the exact joint performance metric is not published"}};
    m["config"] = scenario_to_json(config);
    return m;
}

} // namespace jdtc
