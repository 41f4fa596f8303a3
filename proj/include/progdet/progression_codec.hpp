#pragma once

#include <cstdint>
#include <vector>

#include "progdet/types.hpp"

namespace progdet {

// The five ordinal-regression schemes for encoding progression ranks.
// NominalClassification is the order-blind baseline; the other four exploit
// the rank order in different ways.
enum class OrdinalMethod {
    Regression,            // scalar output, L1 loss on the normalized rank
    NominalClassification, // K+1 logits, cross-entropy on the exact rank
    CostSensitive,         // K+1 logits, KL divergence to a soft rank label
    BinaryDecomposition,   // K independent two-logit "is p >= j?" classifiers
    ThresholdModel,        // K logits sharing one latent score, per-rank bias
};

inline constexpr int kNumOrdinalMethods = 5;

enum class DecodeMode { ArgMax, Expectation };

struct ProgressionConfig {
    int K = 100;
    OrdinalMethod method = OrdinalMethod::ThresholdModel;
    // Only consulted for NominalClassification / CostSensitive. Expectation is
    // the default: it consistently yields lower rank errors than arg-max.
    DecodeMode decode_mode = DecodeMode::Expectation;
    // BinaryDecomposition reduction: the canonical loss is the sum over the K
    // binary problems; this flag divides by K instead (rescales gradients only).
    bool binary_mean_reduction = false;
};

// Input-volume geometry: L frames around a center frame at stride d. Index
// arithmetic only — no pixel data anywhere in this library.
struct InputVolumeSpec {
    int num_frames = 32;  // L, positive even
    int stride = 4;       // d, frames
};

struct FrameLabel {
    std::int64_t frame = 0;  // absolute frame index in the video
    int rank = 0;            // progression in [0, K]
};

// Method-specific encoding of one integer progression rank.
struct OrdinalTarget {
    OrdinalMethod method = OrdinalMethod::Regression;
    int rank = 0;                    // the original p, kept for every method
    double scalar = 0.0;             // Regression: p / K
    std::vector<double> soft;        // CostSensitive: length K+1, sums to 1
    std::vector<std::uint8_t> bits;  // Binary/Threshold: bits[j-1] = (p >= j), j = 1..K
};

// Raw model output. `values` is the flattened payload:
//   Regression: 1; Nominal/CostSensitive: K+1; BinaryDecomposition: K*2
//   row-major as (yes_1, no_1, yes_2, no_2, ...); ThresholdModel: K.
struct HeadOutput {
    OrdinalMethod method = OrdinalMethod::Regression;
    std::vector<double> values;
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;  // d(loss)/d(output), same shape as HeadOutput.values
};

// Per-frame progression labels for one annotated segment: frame tau (1-based
// within the segment) gets round(K * tau / l), so the last frame is exactly K.
// Rounding is half-away-from-zero, done in integer arithmetic.
std::vector<FrameLabel> generate_labels(const ActionSegment& segment, const ProgressionConfig& config);

// The L frame indices feeding the volume centered at `center`:
// offsets {-(L/2-1)d, ..., -d, 0, +d, ..., +(L/2)d}, clamped to [0, total_frames-1].
std::vector<std::int64_t> volume_indices(std::int64_t center, const InputVolumeSpec& spec,
                                         std::int64_t total_frames);

std::size_t expected_output_size(const ProgressionConfig& config);

OrdinalTarget encode_target(int rank, const ProgressionConfig& config);

// Loss and its exact analytic gradient with respect to the raw output.
LossGrad compute_loss(const HeadOutput& output, const OrdinalTarget& target,
                      const ProgressionConfig& config);

// Predicted progression in [0, K].
double decode(const HeadOutput& output, const ProgressionConfig& config);

// Saturating output that decodes back to exactly `rank` (huge logit margins;
// the regression payload is rank/K, whose decode is exact up to the last ulp).
HeadOutput ideal_output(int rank, const ProgressionConfig& config);

}  // namespace progdet
