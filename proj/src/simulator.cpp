#include "progdet/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace progdet {

namespace {

void check_config(const SimConfig& c) {
    if (c.num_frames < 1) throw DataError("sim config: num_frames must be >= 1");
    if (c.num_classes < 2) throw DataError("sim config: need at least 2 classes");
    if (c.num_actions < 0) throw DataError("sim config: num_actions must be >= 0");
    if (c.incomplete_fraction < 0.0 || c.incomplete_fraction > 1.0)
        throw DataError("sim config: incomplete_fraction outside [0, 1]");
    if (!(c.truncation_lo > 0.0 && c.truncation_lo <= c.truncation_hi && c.truncation_hi < 1.0))
        throw DataError("sim config: truncation range must satisfy 0 < lo <= hi < 1");
    if (c.progression_noise_sigma < 0.0) throw DataError("sim config: sigma must be >= 0");
    if (!(c.class_score_temperature > 0.0))
        throw DataError("sim config: class_score_temperature must be positive");
    if (c.num_actions > 0 &&
        (c.min_action_length < 2 || c.min_action_length > c.max_action_length ||
         c.max_action_length > c.num_frames))
        throw DataError("sim config: need 2 <= min_action_length <= max_action_length <= num_frames");
    if (c.K < 1) throw DataError("sim config: K must be >= 1");
}

struct Placed {
    ActionSegment seg;
    double truncation = 1.0;  // fraction of the evolution reached
};

}  // namespace

SimInstance simulate(const SimConfig& config) {
    check_config(config);
    Rng rng(config.seed);
    const std::int64_t T = config.num_frames;
    const int K = config.K;

    // layout: rejection-sample non-overlapping inclusive segments
    std::vector<Placed> placed;
    std::int64_t attempts = 1000 * static_cast<std::int64_t>(std::max(config.num_actions, 1));
    const std::int64_t n_incomplete =
        std::llround(config.incomplete_fraction * config.num_actions);
    for (int a = 0; a < config.num_actions; ++a) {
        bool ok = false;
        while (attempts-- > 0) {
            const std::int64_t len = rng.uniform_int(config.min_action_length, config.max_action_length);
            const std::int64_t start = rng.uniform_int(0, T - len);
            const std::int64_t end = start + len - 1;
            bool overlaps = false;
            for (const Placed& p : placed)
                if (!(end < p.seg.start || p.seg.end < start)) {
                    overlaps = true;
                    break;
                }
            if (overlaps) continue;
            Placed p;
            p.seg.start = start;
            p.seg.end = end;
            p.seg.complete = (a >= n_incomplete);
            placed.push_back(p);
            ok = true;
            break;
        }
        if (!ok) throw DataError("layout infeasible: cannot place " +
                                 std::to_string(config.num_actions) + " actions in " +
                                 std::to_string(T) + " frames");
    }

    for (Placed& p : placed) p.seg.class_id = static_cast<int>(rng.uniform_int(0, config.num_classes - 1));
    for (Placed& p : placed)
        if (!p.seg.complete) p.truncation = rng.uniform(config.truncation_lo, config.truncation_hi);

    std::sort(placed.begin(), placed.end(),
              [](const Placed& a, const Placed& b) { return a.seg.start < b.seg.start; });

    // frame -> owning segment
    std::vector<int> owner(static_cast<std::size_t>(T), -1);
    for (std::size_t i = 0; i < placed.size(); ++i)
        for (std::int64_t t = placed[i].seg.start; t <= placed[i].seg.end; ++t)
            owner[static_cast<std::size_t>(t)] = static_cast<int>(i);

    SimInstance inst;
    inst.config = config;
    inst.gt.video_id = config.video_id;
    inst.gt.num_frames = T;
    for (const Placed& p : placed) inst.gt.segments.push_back(p.seg);

    inst.seq.K = K;
    inst.seq.values.resize(static_cast<std::size_t>(T));
    for (std::int64_t t = 0; t < T; ++t) {
        const int o = owner[static_cast<std::size_t>(t)];
        double v;
        if (o < 0) {
            v = config.background == BackgroundModel::UniformRandom ? rng.uniform(0.0, K)
                                                                    : K / 2.0;
        } else {
            const Placed& p = placed[static_cast<std::size_t>(o)];
            const std::int64_t i = t - p.seg.start;
            const std::int64_t l = p.seg.length();
            const double clean =
                p.truncation * static_cast<double>(K) * static_cast<double>(i) / static_cast<double>(l - 1);
            v = clean + rng.normal(0.0, config.progression_noise_sigma);
        }
        inst.seq.values[static_cast<std::size_t>(t)] = std::clamp(v, 0.0, static_cast<double>(K));
    }

    inst.scores.num_classes = config.num_classes;
    inst.scores.scores.resize(static_cast<std::size_t>(T) * config.num_classes);
    std::vector<double> logits(static_cast<std::size_t>(config.num_classes));
    for (std::int64_t t = 0; t < T; ++t) {
        const int o = owner[static_cast<std::size_t>(t)];
        const int true_class = o < 0 ? -1 : placed[static_cast<std::size_t>(o)].seg.class_id;
        double max_logit = -1e300;
        for (int c = 0; c < config.num_classes; ++c) {
            const double base = (c == true_class) ? 1.0 / config.class_score_temperature : 0.0;
            logits[static_cast<std::size_t>(c)] = base + rng.normal(0.0, 1.0);
            max_logit = std::max(max_logit, logits[static_cast<std::size_t>(c)]);
        }
        double denom = 0.0;
        for (int c = 0; c < config.num_classes; ++c)
            denom += std::exp(logits[static_cast<std::size_t>(c)] - max_logit);
        for (int c = 0; c < config.num_classes; ++c)
            inst.scores.scores[static_cast<std::size_t>(t) * config.num_classes + c] =
                std::exp(logits[static_cast<std::size_t>(c)] - max_logit) / denom;
    }

    return inst;
}

std::vector<SimInstance> sweep(const SimGrid& grid) {
    if (grid.sigmas.empty()) throw DataError("sweep: empty sigma axis");
    if (grid.max_ranks.empty()) throw DataError("sweep: empty rank axis");
    std::vector<SimInstance> out;
    out.reserve(grid.sigmas.size() * grid.max_ranks.size());
    std::uint64_t index = 0;
    for (double sigma : grid.sigmas) {
        for (int k : grid.max_ranks) {
            SimConfig cell = grid.base;
            cell.progression_noise_sigma = sigma;
            cell.K = k;
            cell.seed = derive_seed(grid.base.seed, index++);
            out.push_back(simulate(cell));
        }
    }
    return out;
}

}  // namespace progdet
