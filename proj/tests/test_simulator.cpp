#include <doctest.h>

#include "progdet/detection_engine.hpp"
#include "progdet/evaluation.hpp"
#include "progdet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

using namespace progdet;

namespace {

bool identical(const SimInstance& a, const SimInstance& b) {
    if (a.gt.video_id != b.gt.video_id || a.gt.num_frames != b.gt.num_frames) return false;
    if (a.gt.segments.size() != b.gt.segments.size()) return false;
    for (std::size_t i = 0; i < a.gt.segments.size(); ++i) {
        const ActionSegment &x = a.gt.segments[i], &y = b.gt.segments[i];
        if (x.start != y.start || x.end != y.end || x.class_id != y.class_id ||
            x.complete != y.complete)
            return false;
    }
    return a.seq.values == b.seq.values && a.scores.scores == b.scores.scores;
}

}  // namespace

TEST_CASE("simulate: identical seeds give bit-identical instances") {
    SimConfig cfg;
    cfg.num_frames = 1200;
    cfg.num_actions = 3;
    cfg.incomplete_fraction = 0.4;
    cfg.progression_noise_sigma = 7.0;
    cfg.seed = 123456;
    CHECK(identical(simulate(cfg), simulate(cfg)));

    SimConfig other = cfg;
    other.seed = 123457;
    CHECK(!identical(simulate(cfg), simulate(other)));
}

TEST_CASE("simulate: noiseless complete actions carry the exact ramp") {
    SimConfig cfg;
    cfg.num_frames = 1000;
    cfg.num_actions = 1;
    cfg.min_action_length = 101;
    cfg.max_action_length = 101;
    cfg.progression_noise_sigma = 0.0;
    cfg.background = BackgroundModel::ConstantMid;
    cfg.seed = 9;
    const SimInstance inst = simulate(cfg);
    REQUIRE(inst.gt.segments.size() == 1);
    const ActionSegment& s = inst.gt.segments[0];
    REQUIRE(s.end - s.start + 1 == 101);
    for (int i = 0; i <= 100; ++i)
        CHECK(inst.seq.values[static_cast<std::size_t>(s.start + i)] ==
              100.0 * i / 100.0);  // exact, no tolerance
    // background is exactly K/2 under the constant model
    for (std::int64_t t = 0; t < cfg.num_frames; ++t) {
        if (t >= s.start && t <= s.end) continue;
        CHECK(inst.seq.values[static_cast<std::size_t>(t)] == 50.0);
    }
}

TEST_CASE("simulate: truncated instances stop exactly at the truncation rank") {
    SimConfig cfg;
    cfg.num_frames = 2000;
    cfg.num_actions = 4;
    cfg.incomplete_fraction = 1.0;
    cfg.truncation_lo = 0.6;
    cfg.truncation_hi = 0.6;
    cfg.progression_noise_sigma = 0.0;
    cfg.background = BackgroundModel::ConstantMid;
    cfg.seed = 31;
    const SimInstance inst = simulate(cfg);
    REQUIRE(inst.gt.segments.size() == 4);
    for (const ActionSegment& s : inst.gt.segments) {
        CHECK(!s.complete);
        double top = 0.0;
        for (std::int64_t t = s.start; t <= s.end; ++t)
            top = std::max(top, inst.seq.values[static_cast<std::size_t>(t)]);
        CHECK(top == doctest::Approx(60.0).epsilon(1e-12));
    }
}

TEST_CASE("simulate: the incomplete count follows the fraction") {
    SimConfig cfg;
    cfg.num_frames = 3000;
    cfg.num_actions = 5;
    cfg.incomplete_fraction = 0.4;  // llround(0.4 * 5) = 2
    cfg.seed = 77;
    const SimInstance inst = simulate(cfg);
    int incomplete = 0;
    for (const ActionSegment& s : inst.gt.segments) incomplete += s.complete ? 0 : 1;
    CHECK(incomplete == 2);
}

TEST_CASE("simulate: segments never overlap and respect the length bounds") {
    SimConfig cfg;
    cfg.num_frames = 2500;
    cfg.num_actions = 6;
    cfg.min_action_length = 120;
    cfg.max_action_length = 260;
    cfg.seed = 5;
    const SimInstance inst = simulate(cfg);
    REQUIRE(inst.gt.segments.size() == 6);
    for (std::size_t i = 0; i < inst.gt.segments.size(); ++i) {
        const ActionSegment& s = inst.gt.segments[i];
        const std::int64_t l = s.end - s.start + 1;
        CHECK(l >= 120);
        CHECK(l <= 260);
        CHECK(s.start >= 0);
        CHECK(s.end < cfg.num_frames);
        if (i > 0) CHECK(s.start > inst.gt.segments[i - 1].end);
    }
}

TEST_CASE("simulate: impossible layouts are reported") {
    SimConfig cfg;
    cfg.num_frames = 100;
    cfg.num_actions = 2;
    cfg.min_action_length = 60;
    cfg.max_action_length = 60;
    try {
        simulate(cfg);
        FAIL("expected a layout error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("layout infeasible") != std::string::npos);
    }
}

TEST_CASE("simulate: score rows are valid distributions") {
    SimConfig cfg;
    cfg.num_frames = 500;
    cfg.num_actions = 2;
    cfg.progression_noise_sigma = 5.0;
    cfg.seed = 11;
    const SimInstance inst = simulate(cfg);
    validate_scores(inst.scores, "simulated scores");
    validate_sequence(inst.seq, "simulated sequence");
}

TEST_CASE("sweep: grid shape, distinct seeds, singleton identity") {
    SimGrid grid;
    grid.base.num_frames = 600;
    grid.base.num_actions = 2;
    grid.base.seed = 99;
    grid.sigmas = {0.0, 5.0, 10.0};
    grid.max_ranks = {10, 100};
    const auto cells = sweep(grid);
    REQUIRE(cells.size() == 6);
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            CHECK(cells[i].config.seed != cells[j].config.seed);
    // row-major: sigma is the slow axis
    CHECK(cells[0].config.progression_noise_sigma == 0.0);
    CHECK(cells[0].seq.K == 10);
    CHECK(cells[1].seq.K == 100);
    CHECK(cells[2].config.progression_noise_sigma == 5.0);

    SimGrid singleton;
    singleton.base = grid.base;
    singleton.sigmas = {grid.base.progression_noise_sigma};
    singleton.max_ranks = {grid.base.K};
    const auto one = sweep(singleton);
    REQUIRE(one.size() == 1);
    CHECK(identical(one[0], simulate(grid.base)));
}

TEST_CASE("sweep: empty grid axes are rejected") {
    SimGrid grid;
    grid.sigmas = {};
    grid.max_ranks = {100};
    CHECK_THROWS_AS(sweep(grid), DataError);
}

TEST_CASE("noiseless detection recovers every planted segment") {
    SimConfig cfg;
    cfg.num_frames = 900;
    cfg.num_actions = 2;
    cfg.min_action_length = 120;
    cfg.max_action_length = 220;
    cfg.progression_noise_sigma = 0.0;
    cfg.seed = 1234;
    const SimInstance inst = simulate(cfg);
    const auto dets = detect(inst.seq, inst.scores, short_action_params());
    for (const ActionSegment& s : inst.gt.segments) {
        bool found = false;
        for (const Detection& d : dets) {
            if (std::llabs(d.start - s.start) <= 1 && std::llabs(d.end - s.end) <= 1 &&
                d.grade >= 0.999) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
    const auto m = mean_average_precision({dets}, {inst.gt}, {0.5});
    CHECK(m.at(0.5) == 1.0);
}

TEST_CASE("deep truncation below the end threshold filters every incomplete instance") {
    // constant-mid background: end candidates can only come from foreground
    // frames, and a ramp truncated at rank 60 never crosses threshold 80
    SimConfig cfg;
    cfg.num_frames = 2000;
    cfg.num_actions = 4;
    cfg.incomplete_fraction = 1.0;
    cfg.truncation_lo = 0.6;
    cfg.truncation_hi = 0.6;
    cfg.progression_noise_sigma = 4.0;
    cfg.background = BackgroundModel::ConstantMid;
    cfg.seed = 606;
    DetectorParams params = short_action_params();
    params.min_end_rank = 80.0;  // truncation 0.6 <= 80/100 - 0.05
    const SimInstance inst = simulate(cfg);
    const auto dets = detect(inst.seq, inst.scores, params);
    for (const ActionSegment& s : inst.gt.segments) {
        for (const Detection& d : dets) {
            const double iou = segment_iou(static_cast<double>(d.start), static_cast<double>(d.end),
                                           static_cast<double>(s.start), static_cast<double>(s.end));
            CHECK(iou < 0.5);
        }
    }
    CHECK(incomplete_detection_rate({dets}, {inst.gt}, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("mAP degrades monotonically with progression noise") {
    // averaged over seeds, more noise never helps
    const std::vector<double> sigmas = {0.0, 5.0, 10.0, 20.0};
    std::vector<double> mean_map;
    for (double sigma : sigmas) {
        double sum = 0.0;
        const int seeds = 20;
        for (int s = 0; s < seeds; ++s) {
            SimConfig cfg;
            cfg.num_frames = 1000;
            cfg.num_actions = 3;
            cfg.progression_noise_sigma = sigma;
            cfg.seed = 9000 + static_cast<std::uint64_t>(s);
            const SimInstance inst = simulate(cfg);
            const auto dets = detect(inst.seq, inst.scores, short_action_params());
            sum += mean_average_precision({dets}, {inst.gt}, {0.5}).at(0.5);
        }
        mean_map.push_back(sum / seeds);
    }
    for (std::size_t i = 1; i < mean_map.size(); ++i)
        CHECK(mean_map[i] <= mean_map[i - 1] + 0.01);
}
