#include "progdet/progression_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace progdet {

namespace {

void check_config(const ProgressionConfig& config) {
    if (config.K < 1) throw DataError("progression config: K must be >= 1");
}

void check_rank(int rank, const ProgressionConfig& config) {
    if (rank < 0 || rank > config.K)
        throw DataError("rank " + std::to_string(rank) + " outside [0, " + std::to_string(config.K) + "]");
}

void check_shape(const HeadOutput& output, const ProgressionConfig& config) {
    if (output.method != config.method)
        throw DataError("head output method does not match config");
    const std::size_t want = expected_output_size(config);
    if (output.values.size() != want)
        throw DataError("head output size " + std::to_string(output.values.size()) +
                        ", expected " + std::to_string(want));
    for (double v : output.values)
        if (!std::isfinite(v)) throw DataError("non-finite head output");
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// softmax into `out`, numerically stable
void softmax(const std::vector<double>& v, std::vector<double>& out) {
    out.resize(v.size());
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        s += out[i];
    }
    for (double& x : out) x /= s;
}

constexpr double kSaturatedLogit = 1000.0;

}  // namespace

std::vector<FrameLabel> generate_labels(const ActionSegment& segment, const ProgressionConfig& config) {
    check_config(config);
    const std::int64_t l = segment.length();
    if (l < 1) throw DataError("empty segment");
    std::vector<FrameLabel> labels;
    labels.reserve(static_cast<std::size_t>(l));
    const std::int64_t K = config.K;
    for (std::int64_t tau = 1; tau <= l; ++tau) {
        // round-half-away-from-zero of K*tau/l, exactly, in integers
        const int rank = static_cast<int>((2 * K * tau + l) / (2 * l));
        labels.push_back({segment.start + tau - 1, rank});
    }
    return labels;
}

std::vector<std::int64_t> volume_indices(std::int64_t center, const InputVolumeSpec& spec,
                                         std::int64_t total_frames) {
    if (spec.num_frames < 2 || spec.num_frames % 2 != 0)
        throw DataError("input volume: num_frames must be a positive even number");
    if (spec.stride < 1) throw DataError("input volume: stride must be >= 1");
    if (total_frames < 1) throw DataError("input volume: total_frames must be >= 1");
    const std::int64_t half = spec.num_frames / 2;
    std::vector<std::int64_t> indices;
    indices.reserve(static_cast<std::size_t>(spec.num_frames));
    for (std::int64_t offset = -(half - 1); offset <= half; ++offset) {
        const std::int64_t idx = center + offset * spec.stride;
        indices.push_back(std::clamp<std::int64_t>(idx, 0, total_frames - 1));
    }
    return indices;
}

std::size_t expected_output_size(const ProgressionConfig& config) {
    switch (config.method) {
        case OrdinalMethod::Regression: return 1;
        case OrdinalMethod::NominalClassification:
        case OrdinalMethod::CostSensitive: return static_cast<std::size_t>(config.K) + 1;
        case OrdinalMethod::BinaryDecomposition: return static_cast<std::size_t>(config.K) * 2;
        case OrdinalMethod::ThresholdModel: return static_cast<std::size_t>(config.K);
    }
    throw DataError("unknown ordinal method");
}

OrdinalTarget encode_target(int rank, const ProgressionConfig& config) {
    check_config(config);
    check_rank(rank, config);
    OrdinalTarget t;
    t.method = config.method;
    t.rank = rank;
    switch (config.method) {
        case OrdinalMethod::Regression:
            t.scalar = static_cast<double>(rank) / config.K;
            break;
        case OrdinalMethod::NominalClassification:
            break;  // the rank index is the whole target
        case OrdinalMethod::CostSensitive: {
            // soft label q_j proportional to exp(-sqrt(|j - p|))
            t.soft.resize(static_cast<std::size_t>(config.K) + 1);
            double sum = 0.0;
            for (int j = 0; j <= config.K; ++j) {
                t.soft[j] = std::exp(-std::sqrt(static_cast<double>(std::abs(j - rank))));
                sum += t.soft[j];
            }
            for (double& q : t.soft) q /= sum;
            break;
        }
        case OrdinalMethod::BinaryDecomposition:
        case OrdinalMethod::ThresholdModel:
            t.bits.resize(static_cast<std::size_t>(config.K));
            for (int j = 1; j <= config.K; ++j) t.bits[j - 1] = rank >= j ? 1 : 0;
            break;
    }
    return t;
}

LossGrad compute_loss(const HeadOutput& output, const OrdinalTarget& target,
                      const ProgressionConfig& config) {
    check_config(config);
    check_shape(output, config);
    if (target.method != config.method) throw DataError("target method does not match config");
    check_rank(target.rank, config);

    LossGrad result;
    result.grad.assign(output.values.size(), 0.0);
    const std::vector<double>& o = output.values;

    switch (config.method) {
        case OrdinalMethod::Regression: {
            const double g = clamp01(o[0]);
            const double diff = g - target.scalar;
            result.loss = std::abs(diff);
            // subgradient convention: 0 outside the clamp region and at the kink
            if (o[0] >= 0.0 && o[0] <= 1.0 && diff != 0.0)
                result.grad[0] = diff > 0.0 ? 1.0 : -1.0;
            break;
        }
        case OrdinalMethod::NominalClassification: {
            const double lse = log_sum_exp(o);
            result.loss = lse - o[target.rank];
            softmax(o, result.grad);
            result.grad[target.rank] -= 1.0;
            break;
        }
        case OrdinalMethod::CostSensitive: {
            if (target.soft.size() != o.size()) throw DataError("soft target size mismatch");
            // KL(q || softmax(o)) = sum q log q + logsumexp(o) - sum q o
            const double lse = log_sum_exp(o);
            double loss = 0.0;
            for (std::size_t j = 0; j < o.size(); ++j) {
                const double q = target.soft[j];
                loss += q * std::log(q) + q * (lse - o[j]);
            }
            result.loss = std::max(0.0, loss);  // guard the last-ulp negative
            softmax(o, result.grad);
            for (std::size_t j = 0; j < o.size(); ++j) result.grad[j] -= target.soft[j];
            break;
        }
        case OrdinalMethod::BinaryDecomposition: {
            if (target.bits.size() != static_cast<std::size_t>(config.K))
                throw DataError("binary target size mismatch");
            const double scale = config.binary_mean_reduction ? 1.0 / config.K : 1.0;
            double loss = 0.0;
            for (int j = 0; j < config.K; ++j) {
                const double yes = o[2 * j], no = o[2 * j + 1];
                // two-class log-softmax: F_1 = -softplus(no - yes), F_2 = -softplus(yes - no)
                const double p_yes = sigmoid(yes - no);
                if (target.bits[j]) {
                    loss += softplus(no - yes);
                    result.grad[2 * j] = (p_yes - 1.0) * scale;
                    result.grad[2 * j + 1] = (1.0 - p_yes) * scale;
                } else {
                    loss += softplus(yes - no);
                    result.grad[2 * j] = p_yes * scale;
                    result.grad[2 * j + 1] = -p_yes * scale;
                }
            }
            result.loss = loss * scale;
            break;
        }
        case OrdinalMethod::ThresholdModel: {
            if (target.bits.size() != static_cast<std::size_t>(config.K))
                throw DataError("threshold target size mismatch");
            double loss = 0.0;
            for (int j = 0; j < config.K; ++j) {
                // BCE against bit t_j: -t log sigma(o) - (1-t) log(1 - sigma(o))
                loss += target.bits[j] ? softplus(-o[j]) : softplus(o[j]);
                result.grad[j] = sigmoid(o[j]) - (target.bits[j] ? 1.0 : 0.0);
            }
            result.loss = loss;
            break;
        }
    }
    return result;
}

double decode(const HeadOutput& output, const ProgressionConfig& config) {
    check_config(config);
    check_shape(output, config);
    const std::vector<double>& o = output.values;

    switch (config.method) {
        case OrdinalMethod::Regression:
            return config.K * clamp01(o[0]);
        case OrdinalMethod::NominalClassification:
        case OrdinalMethod::CostSensitive: {
            if (config.decode_mode == DecodeMode::ArgMax) {
                // ties resolve to the lowest rank
                return static_cast<double>(std::max_element(o.begin(), o.end()) - o.begin());
            }
            std::vector<double> p;
            softmax(o, p);
            double expectation = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) expectation += static_cast<double>(j) * p[j];
            return std::min(expectation, static_cast<double>(config.K));
        }
        case OrdinalMethod::BinaryDecomposition: {
            // softmax(pair)_yes >= 0.5 is exactly yes-logit >= no-logit
            int count = 0;
            for (int j = 0; j < config.K; ++j)
                if (o[2 * j] >= o[2 * j + 1]) ++count;
            return count;
        }
        case OrdinalMethod::ThresholdModel: {
            // sigmoid(o_j) >= 0.5 is exactly o_j >= 0
            int count = 0;
            for (int j = 0; j < config.K; ++j)
                if (o[j] >= 0.0) ++count;
            return count;
        }
    }
    throw DataError("unknown ordinal method");
}

HeadOutput ideal_output(int rank, const ProgressionConfig& config) {
    check_config(config);
    check_rank(rank, config);
    HeadOutput out;
    out.method = config.method;
    switch (config.method) {
        case OrdinalMethod::Regression:
            out.values = {static_cast<double>(rank) / config.K};
            break;
        case OrdinalMethod::NominalClassification:
        case OrdinalMethod::CostSensitive:
            // margin so large the softmax is exactly one-hot in doubles
            out.values.assign(static_cast<std::size_t>(config.K) + 1, 0.0);
            out.values[rank] = kSaturatedLogit;
            break;
        case OrdinalMethod::BinaryDecomposition:
            out.values.assign(static_cast<std::size_t>(config.K) * 2, 0.0);
            for (int j = 1; j <= config.K; ++j)
                out.values[2 * (j - 1) + (rank >= j ? 0 : 1)] = kSaturatedLogit;
            break;
        case OrdinalMethod::ThresholdModel:
            out.values.assign(static_cast<std::size_t>(config.K), -kSaturatedLogit);
            for (int j = 1; j <= rank; ++j) out.values[j - 1] = kSaturatedLogit;
            break;
    }
    return out;
}

}  // namespace progdet
