#pragma once

#include "progdet/detection_engine.hpp"
#include "progdet/progression_codec.hpp"
#include "progdet/rng.hpp"
#include "progdet/simulator.hpp"
#include "progdet/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace progdet {

struct SyntheticFeatureSpec {
    int dim = 16;  // D >= 2
    std::uint64_t embed_seed = 42;
    double feature_noise_sigma = 0.0;
};

// Fixed random affine map of (rank/K, one-hot class) into R^D. The first
// weight on the rank coordinate is forced away from zero, so distinct ranks
// always embed to distinct clean vectors.
class FeatureEmbedding {
public:
    FeatureEmbedding(const SyntheticFeatureSpec& spec, int K, int num_classes);

    std::vector<double> clean(int rank, int class_id) const;
    // clean + per-dimension Gaussian(0, feature_noise_sigma) from the caller's stream
    std::vector<double> noisy(int rank, int class_id, Rng& rng) const;

    int dim() const { return spec_.dim; }
    int max_rank() const { return K_; }
    int num_classes() const { return num_classes_; }

private:
    SyntheticFeatureSpec spec_;
    int K_;
    int num_classes_;
    std::vector<double> weights_;  // D x (1 + C), row-major
    std::vector<double> bias_;     // D
};

std::vector<double> make_features(int rank, int class_id, const FeatureEmbedding& embedding,
                                  Rng& rng);

struct ToySample {
    std::vector<double> features;
    int rank;
    int class_id;
};

struct ToyDataset {
    std::vector<ToySample> samples;
    int K = 100;
    int num_classes = 5;
    int dim = 16;
};

// num_samples draws of (rank ~ U{0..K}, class ~ U{0..C-1}) embedded with noise.
ToyDataset make_toy_dataset(const FeatureEmbedding& embedding, int num_samples, std::uint64_t seed);

struct TrainConfig {
    ProgressionConfig codec;
    int hidden_units = 0;  // 0 = linear head
    double learning_rate = 1e-2;
    double momentum = 0.0;
    int epochs = 50;       // 0 = evaluate the initialized head only
    int batch_size = 0;    // 0 = full batch
    std::uint64_t seed = 1;
};

// Linear or one-hidden-layer (tanh) head. The threshold-model head is
// CORAL-shaped: one shared output row producing a scalar plus K rank biases;
// all other methods use a full output row per logit.
struct ToyHead {
    OrdinalMethod method = OrdinalMethod::ThresholdModel;
    int K = 100;
    int input_dim = 0;
    int hidden_units = 0;
    int output_rows = 0;  // rows of the final weight matrix (1 for threshold)
    int output_dim = 0;   // logits produced (expected_output_size)
    std::vector<double> w1;  // hidden x input when hidden_units > 0, else final rows x input
    std::vector<double> b1;  // hidden biases (empty for linear heads)
    std::vector<double> w2;  // final rows x hidden (empty for linear heads)
    std::vector<double> b2;  // output_dim biases

    HeadOutput forward(const std::vector<double>& x) const;
};

struct TrainResult {
    ToyHead head;
    std::vector<double> epoch_loss;  // mean pre-update loss; index 0 = initial head
    std::vector<double> epoch_mae;   // index 0 = initial head
    double final_mae = 0.0;
};

// Spread-calibrated initialization: the untrained head decodes to a roughly
// uniform rank distribution (MAE near the 33.33 random baseline), so training
// curves start from the documented no-knowledge point.
ToyHead init_head(const ToyDataset& data, const TrainConfig& config);

// Plain (optionally momentum) gradient descent with the codec's analytic
// gradients. MAE is measured on `val` when given, else on the training set.
// A non-finite loss raises DataError naming the epoch.
TrainResult train(const ToyDataset& data, const TrainConfig& config,
                  const ToyDataset* val = nullptr);

double predict_rank(const ToyHead& head, const ProgressionConfig& cfg,
                    const std::vector<double>& features);

ProgressionSequence predict_sequence(const ToyHead& head, const ProgressionConfig& cfg,
                                     const std::vector<std::vector<double>>& frame_features);

struct CompareConfig {
    CompareConfig() { base_train.epochs = 600; }

    SyntheticFeatureSpec features{12, 42, 0.5};
    int K = 100;
    int num_classes = 5;
    int train_samples = 600;
    int test_samples = 2000;
    // epochs/momentum/batch apply to every head; base_train's learning_rate and
    // seed are ignored (the rate is per method, the train seed derives from seed).
    TrainConfig base_train;
    // One rate per head, indexed by OrdinalMethod order. The five losses put
    // gradients on wildly different scales (an L1 subgradient vs a sum of K
    // sigmoid terms), so no shared rate trains all of them.
    std::array<double, kNumOrdinalMethods> learning_rates{5e-3, 10.0, 10.0, 0.3, 2e-4};
    SimConfig sim;                   // evaluation videos template
    int num_eval_videos = 4;
    DetectorParams detector;
    std::uint64_t seed = 7;
};

struct MethodResult {
    OrdinalMethod method;
    double mae = 0.0;
    double map_at_05 = 0.0;
};

struct Comparison {
    std::vector<MethodResult> rows;  // one per method, fixed enum order
};

// Trains all five heads on identical data, maps each head over identical
// per-frame features of simulated videos, and evaluates detection mAP with
// shared simulator class scores, so rows differ only in the ordinal method.
Comparison compare_methods(const CompareConfig& config);

std::string format_comparison(const Comparison& comparison);

const char* method_name(OrdinalMethod method);

}  // namespace progdet
