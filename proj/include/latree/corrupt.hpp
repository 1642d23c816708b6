#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latree/data.hpp"
#include "latree/model.hpp"
#include "latree/random.hpp"

namespace latree {

enum class CorruptionPattern {
    uniform,
    constant_magnitude,
    gaussian,
    hmm_model,
    double_binary_model,
    gaussian_outliers,
    hmm_outliers,
    double_binary_outliers,
};

inline CorruptionPattern corruption_pattern_from_string(const std::string& s) {
    if (s == "uniform") return CorruptionPattern::uniform;
    if (s == "constant_magnitude") return CorruptionPattern::constant_magnitude;
    if (s == "gaussian") return CorruptionPattern::gaussian;
    if (s == "hmm_model") return CorruptionPattern::hmm_model;
    if (s == "double_binary_model") return CorruptionPattern::double_binary_model;
    if (s == "gaussian_outliers") return CorruptionPattern::gaussian_outliers;
    if (s == "hmm_outliers") return CorruptionPattern::hmm_outliers;
    if (s == "double_binary_outliers") return CorruptionPattern::double_binary_outliers;
    throw std::invalid_argument("unknown corruption pattern '" + s + "'");
}

inline std::string corruption_pattern_to_string(CorruptionPattern p) {
    switch (p) {
        case CorruptionPattern::uniform: return "uniform";
        case CorruptionPattern::constant_magnitude: return "constant_magnitude";
        case CorruptionPattern::gaussian: return "gaussian";
        case CorruptionPattern::hmm_model: return "hmm_model";
        case CorruptionPattern::double_binary_model: return "double_binary_model";
        case CorruptionPattern::gaussian_outliers: return "gaussian_outliers";
        case CorruptionPattern::hmm_outliers: return "hmm_outliers";
        case CorruptionPattern::double_binary_outliers: return "double_binary_outliers";
    }
    return "?";
}

inline bool is_outlier_pattern(CorruptionPattern p) {
    return p == CorruptionPattern::gaussian_outliers || p == CorruptionPattern::hmm_outliers ||
           p == CorruptionPattern::double_binary_outliers;
}

inline bool is_model_pattern(CorruptionPattern p) {
    return p == CorruptionPattern::hmm_model || p == CorruptionPattern::double_binary_model ||
           p == CorruptionPattern::hmm_outliers || p == CorruptionPattern::double_binary_outliers;
}

/// Corruption request: exactly n1/2 entries are rewritten in each column
/// (non-outlier patterns pick rows per column independently; outlier
/// patterns pick one row set and rewrite whole rows).
struct CorruptionSpec {
    CorruptionPattern pattern = CorruptionPattern::uniform;
    int n1 = 0;                // even, total budget; n1/2 per column
    double amplitude = 1.0;    // A
    std::uint64_t seed = 0;
    std::optional<GroundTruthModel> alt_model;  // required for model patterns
};

namespace detail {

inline std::vector<int> pick_rows(Rng& rng, int n, int k) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline void validate_spec(const DataMatrix& data, const CorruptionSpec& spec) {
    if (spec.n1 < 0) throw std::invalid_argument("n1 must be nonnegative");
    if (spec.n1 % 2 != 0) throw std::invalid_argument("n1 must be even");
    if (spec.n1 > data.n) throw std::invalid_argument("n1 must not exceed the sample count");
    if (spec.amplitude <= 0 && !is_model_pattern(spec.pattern))
        throw std::invalid_argument("amplitude must be positive");
    if (is_model_pattern(spec.pattern)) {
        if (!spec.alt_model) throw std::invalid_argument("model-based pattern requires alt_model");
        const auto& t = spec.alt_model->tree;
        if (spec.alt_model->params.l_max != data.l_max)
            throw std::invalid_argument("alt_model l_max mismatch");
        if (t.observed_count() != data.o)
            throw std::invalid_argument("alt_model observed count mismatch");
    }
}

}  // namespace detail

/// Returns a corrupted copy; the input is untouched. Deterministic in
/// spec.seed, with per-column substreams derived from (seed, column).
inline DataMatrix inject(const DataMatrix& data, const CorruptionSpec& spec) {
    detail::validate_spec(data, spec);
    DataMatrix out = data;
    const int half = spec.n1 / 2;
    if (half == 0) return out;
    const Rng base(spec.seed);

    DataMatrix alt;
    if (is_model_pattern(spec.pattern)) {
        Rng alt_rng = base.fork(0xA17u);
        alt = sample(*spec.alt_model, data.n, alt_rng.next_u64());
    }

    if (is_outlier_pattern(spec.pattern)) {
        Rng row_rng = base.fork(0x0117u);
        const auto rows = detail::pick_rows(row_rng, data.n, half);
        if (spec.pattern == CorruptionPattern::gaussian_outliers) {
            Rng val_rng = base.fork(0x6A05u);
            for (int r : rows)
                for (int c = 0; c < data.cols(); ++c) {
                    double v = spec.amplitude * val_rng.normal();
                    while (v == data.values(r, c)) v = spec.amplitude * val_rng.normal();
                    out.values(r, c) = v;
                }
        } else {
            for (int r : rows)
                for (int c = 0; c < data.cols(); ++c) out.values(r, c) = alt.values(r, c);
        }
        return out;
    }

    for (int c = 0; c < data.cols(); ++c) {
        Rng rng = base.fork(static_cast<std::uint64_t>(c) + 1);
        const auto rows = detail::pick_rows(rng, data.n, half);
        for (int r : rows) {
            switch (spec.pattern) {
                case CorruptionPattern::uniform: {
                    double delta = rng.uniform(-2.0 * spec.amplitude, 2.0 * spec.amplitude);
                    while (delta == 0.0)
                        delta = rng.uniform(-2.0 * spec.amplitude, 2.0 * spec.amplitude);
                    out.values(r, c) = data.values(r, c) + delta;
                    break;
                }
                case CorruptionPattern::constant_magnitude:
                    out.values(r, c) =
                        data.values(r, c) + (rng.coin() ? spec.amplitude : -spec.amplitude);
                    break;
                case CorruptionPattern::gaussian: {
                    double delta = spec.amplitude * rng.normal();
                    while (delta == 0.0) delta = spec.amplitude * rng.normal();
                    out.values(r, c) = data.values(r, c) + delta;
                    break;
                }
                case CorruptionPattern::hmm_model:
                case CorruptionPattern::double_binary_model: {
                    double v = alt.values(r, c);
                    // substitution must actually change the entry
                    if (v == data.values(r, c)) v = std::nextafter(v, v + 1.0);
                    out.values(r, c) = v;
                    break;
                }
                default:
                    throw std::logic_error("unreachable");
            }
        }
    }
    return out;
}

/// Count of entries differing between two equal-shaped matrices, per column.
inline std::vector<int> audit_budget(const DataMatrix& clean, const DataMatrix& dirty) {
    if (clean.n != dirty.n || clean.o != dirty.o || clean.l_max != dirty.l_max)
        throw std::invalid_argument("audit_budget: shape mismatch");
    std::vector<int> counts(clean.cols(), 0);
    for (int c = 0; c < clean.cols(); ++c)
        for (int r = 0; r < clean.n; ++r)
            if (clean.values(r, c) != dirty.values(r, c)) ++counts[c];
    return counts;
}

inline int max_column_changes(const std::vector<int>& counts) {
    return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

/// Default alternate model for model-based patterns: same topology with the
/// per-edge distance doubled. value_scale multiplies the node standard
/// deviation, which ties the pattern to the amplitude A when desired.
inline GroundTruthModel default_alt_model(const GroundTruthModel& base, double rho_scale = 2.0,
                                          double value_scale = 1.0) {
    auto audit_rho = [&] {
        // per-edge distance of the homogeneous family from A
        const Eigen::MatrixXd gram = base.params.A.transpose() * base.params.A / base.params.alpha;
        return -0.5 * std::log(gram.determinant());
    };
    const double rho_edge = audit_rho();
    ModelParams p =
        make_homogeneous_params(base.params.l_max, rho_scale * rho_edge, base.params.alpha);
    p.sigma_r *= value_scale * value_scale;
    p.sigma_n *= value_scale * value_scale;
    return make_model(base.tree, p);
}

}  // namespace latree
