#pragma once

#include <cstdint>
#include <vector>

#include "progdet/types.hpp"

namespace progdet {

struct DetectorParams {
    std::int64_t min_length = 60;      // candidate length e-s+1 must exceed this
    double max_start_rank = 40.0;      // start frames: predicted rank strictly below
    double min_end_rank = 60.0;        // end frames: predicted rank strictly above
    double nms_iou = 0.4;              // suppression threshold on segment IoU
    std::int64_t max_candidates = 1'000'000;  // start/end pair cap, thinned if exceeded
};

// Presets tuned for short-action and long-action regimes respectively.
DetectorParams short_action_params();  // 40 / 60, min length 60
DetectorParams long_action_params();   // 20 / 80, min length 600

// Ideal profile of a complete action: l points linearly spaced from 0 to K
// inclusive. Needs l >= 2 so both endpoints exist.
std::vector<double> make_template(std::int64_t length, int K);

// Profile-match confidence: 1 - MSE(profile, tmpl) / (K^2/6). The normalizer
// is E[(X-Y)^2] for X, Y uniform on [0, K], so two random profiles grade ~0
// and only a perfect match grades 1.
double grade(const std::vector<double>& profile, const std::vector<double>& tmpl, int K);

// Same arithmetic as grade(slice, make_template(l, K), K), without the
// temporaries. Shared by the detector and the brute-force oracle so their
// grades are bit-identical.
double grade_segment(const ProgressionSequence& seq, std::int64_t s, std::int64_t e);

// Candidate search over (start, end) pairs screened by the rank thresholds,
// graded against the template, class scores averaged over the segment,
// followed by NMS. Output sorted by grade descending.
std::vector<Detection> detect(const ProgressionSequence& seq, const ClassScoreMatrix& scores,
                              const DetectorParams& params);

// Oracle: identical contract, but enumerates every (s, e) pair with no
// screening shortcuts and no candidate cap. Test use only; T is guarded.
std::vector<Detection> detect_bruteforce(const ProgressionSequence& seq,
                                         const ClassScoreMatrix& scores,
                                         const DetectorParams& params);

// Segments as real intervals [s, e]: overlap length / union length.
double segment_iou(double s1, double e1, double s2, double e2);

// Greedy class-agnostic suppression: keep the highest grade, drop everything
// overlapping it beyond t_iou, repeat. Ties break by (start, end) ascending.
std::vector<Detection> nms(std::vector<Detection> detections, double t_iou);

struct Subsampled {
    ProgressionSequence seq;
    ClassScoreMatrix scores;
    std::vector<std::int64_t> frame_index;  // subsample position -> original frame
};

// n evenly spaced frames, first and last always included. n >= T returns the
// input unchanged with an identity map.
Subsampled subsample(const ProgressionSequence& seq, const ClassScoreMatrix& scores, std::int64_t n);

// Detect on an n-frame subsample, with min_length rescaled from original-frame
// units, then map boundaries back to original frame coordinates.
std::vector<Detection> detect_sampled(const ProgressionSequence& seq, const ClassScoreMatrix& scores,
                                      const DetectorParams& params, std::int64_t n);

// Drop class scores, keeping (start, end, grade) for proposal evaluation.
std::vector<Proposal> to_proposals(const std::vector<Detection>& detections);

// Per-class ranking score for detection mAP: grade x mean class score.
// Isolated here so the combination rule has exactly one home.
double detection_class_score(const Detection& det, int class_id);

}  // namespace progdet
