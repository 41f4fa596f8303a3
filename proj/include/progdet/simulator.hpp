#pragma once

#include "progdet/rng.hpp"
#include "progdet/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace progdet {

enum class BackgroundModel { UniformRandom, ConstantMid };

struct SimConfig {
    std::int64_t num_frames = 1000;
    int num_classes = 5;  // >= 2 so score rows stay strictly inside (0, 1)
    int num_actions = 3;
    double incomplete_fraction = 0.0;       // llround(fraction * num_actions) actions truncated
    double truncation_lo = 0.5;             // incomplete actions evolve to U[lo, hi] * K
    double truncation_hi = 0.8;
    double progression_noise_sigma = 0.0;   // rank units, foreground frames only
    BackgroundModel background = BackgroundModel::UniformRandom;
    double class_score_temperature = 0.1;
    std::int64_t min_action_length = 100;
    std::int64_t max_action_length = 300;
    int K = 100;
    std::uint64_t seed = 0;
    std::string video_id = "sim-0";
};

struct SimInstance {
    VideoGroundTruth gt;
    ProgressionSequence seq;
    ClassScoreMatrix scores;
    SimConfig config;
};

// Deterministic given config.seed. Segment layout by rejection sampling
// (no overlap); a complete action's clean signal is the exact 0..K ramp
// K*i/(l-1), an incomplete one stops at truncation*K; Gaussian noise is
// added per foreground frame and clamped to [0, K]; background frames come
// from the background model. Class score rows are softmax over
// indicator/temperature + unit Gaussian noise.
SimInstance simulate(const SimConfig& config);

// Cartesian sweep over noise levels and rank counts, row-major with sigma as
// the slow axis. Cell i runs with seed derive_seed(base.seed, i), so a
// singleton grid reproduces simulate(base) exactly.
struct SimGrid {
    SimConfig base;
    std::vector<double> sigmas;
    std::vector<int> max_ranks;
};

std::vector<SimInstance> sweep(const SimGrid& grid);

}  // namespace progdet
