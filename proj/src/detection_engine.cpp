#include "progdet/detection_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace progdet {

namespace {

void check_params(const DetectorParams& params, int K) {
    if (params.max_start_rank < 0.0 || params.min_end_rank > K ||
        params.max_start_rank >= params.min_end_rank)
        throw DataError("detector params: need 0 <= max_start_rank < min_end_rank <= K");
    if (params.nms_iou < 0.0 || params.nms_iou > 1.0)
        throw DataError("detector params: nms_iou outside [0, 1]");
    if (params.max_candidates < 1)
        throw DataError("detector params: max_candidates must be >= 1");
}

void check_inputs(const ProgressionSequence& seq, const ClassScoreMatrix& scores) {
    if (seq.size() != scores.rows())
        throw DataError("sequence length " + std::to_string(seq.size()) +
                        " does not match score rows " + std::to_string(scores.rows()));
}

// Emit the detection for a qualifying candidate, or nothing if grade <= 0.
void try_candidate(const ProgressionSequence& seq, const ClassScoreMatrix& scores,
                   std::int64_t s, std::int64_t e, std::vector<Detection>& out) {
    const double g = grade_segment(seq, s, e);
    if (!(g > 0.0)) return;
    Detection det;
    det.start = s;
    det.end = e;
    det.grade = g;
    const std::int64_t l = e - s + 1;
    det.class_scores.assign(scores.num_classes, 0.0);
    for (std::int64_t t = s; t <= e; ++t)
        for (int c = 0; c < scores.num_classes; ++c) det.class_scores[c] += scores.at(t, c);
    for (double& v : det.class_scores) v /= static_cast<double>(l);
    out.push_back(std::move(det));
}

bool grade_order(const Detection& a, const Detection& b) {
    if (a.grade != b.grade) return a.grade > b.grade;
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
}

// Keep every 2nd element (from index 0) until the pair count fits the cap.
void thin_candidates(std::vector<std::int64_t>& starts, std::vector<std::int64_t>& ends,
                     std::int64_t cap) {
    auto halve = [](std::vector<std::int64_t>& v) {
        std::vector<std::int64_t> kept;
        kept.reserve(v.size() / 2 + 1);
        for (std::size_t i = 0; i < v.size(); i += 2) kept.push_back(v[i]);
        v = std::move(kept);
    };
    while (!starts.empty() && !ends.empty() &&
           static_cast<std::int64_t>(starts.size()) >
               cap / static_cast<std::int64_t>(ends.size())) {
        if (starts.size() >= ends.size()) halve(starts); else halve(ends);
    }
}

}  // namespace

DetectorParams short_action_params() {
    DetectorParams p;
    p.min_length = 60;
    p.max_start_rank = 40.0;
    p.min_end_rank = 60.0;
    p.nms_iou = 0.4;
    return p;
}

DetectorParams long_action_params() {
    DetectorParams p;
    p.min_length = 600;
    p.max_start_rank = 20.0;
    p.min_end_rank = 80.0;
    p.nms_iou = 0.4;
    return p;
}

std::vector<double> make_template(std::int64_t length, int K) {
    if (length < 2) throw DataError("template length must be >= 2");
    std::vector<double> tmpl(static_cast<std::size_t>(length));
    for (std::int64_t i = 0; i < length; ++i)
        tmpl[i] = static_cast<double>(K) * static_cast<double>(i) / static_cast<double>(length - 1);
    return tmpl;
}

double grade(const std::vector<double>& profile, const std::vector<double>& tmpl, int K) {
    if (profile.size() != tmpl.size()) throw DataError("grade: profile/template length mismatch");
    if (profile.empty()) throw DataError("grade: empty profiles");
    double sum = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double d = profile[i] - tmpl[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(profile.size());
    const double normalizer = static_cast<double>(K) * static_cast<double>(K) / 6.0;
    return 1.0 - mse / normalizer;
}

double grade_segment(const ProgressionSequence& seq, std::int64_t s, std::int64_t e) {
    const std::int64_t l = e - s + 1;
    if (l < 2) throw DataError("grade_segment: need at least two frames");
    // identical expression order to grade(slice, make_template(l, K), K)
    double sum = 0.0;
    for (std::int64_t i = 0; i < l; ++i) {
        const double t = static_cast<double>(seq.K) * static_cast<double>(i) / static_cast<double>(l - 1);
        const double d = seq.values[static_cast<std::size_t>(s + i)] - t;
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(l);
    const double normalizer = static_cast<double>(seq.K) * static_cast<double>(seq.K) / 6.0;
    return 1.0 - mse / normalizer;
}

std::vector<Detection> detect(const ProgressionSequence& seq, const ClassScoreMatrix& scores,
                              const DetectorParams& params) {
    check_inputs(seq, scores);
    check_params(params, seq.K);
    const std::int64_t T = seq.size();

    std::vector<std::int64_t> starts, ends;
    for (std::int64_t t = 0; t < T; ++t) {
        if (seq.values[static_cast<std::size_t>(t)] < params.max_start_rank) starts.push_back(t);
        if (seq.values[static_cast<std::size_t>(t)] > params.min_end_rank) ends.push_back(t);
    }
    thin_candidates(starts, ends, params.max_candidates);

    std::vector<Detection> found;
    for (std::int64_t s : starts) {
        for (std::int64_t e : ends) {
            const std::int64_t l = e - s + 1;
            if (l > params.min_length && l >= 2) try_candidate(seq, scores, s, e, found);
        }
    }

    found = nms(std::move(found), params.nms_iou);
    std::sort(found.begin(), found.end(), grade_order);
    return found;
}

std::vector<Detection> detect_bruteforce(const ProgressionSequence& seq,
                                         const ClassScoreMatrix& scores,
                                         const DetectorParams& params) {
    check_inputs(seq, scores);
    check_params(params, seq.K);
    const std::int64_t T = seq.size();
    if (T > 2000) throw DataError("detect_bruteforce: T > 2000");

    std::vector<Detection> found;
    for (std::int64_t s = 0; s < T; ++s) {
        for (std::int64_t e = 0; e < T; ++e) {
            if (!(seq.values[static_cast<std::size_t>(s)] < params.max_start_rank)) continue;
            if (!(seq.values[static_cast<std::size_t>(e)] > params.min_end_rank)) continue;
            const std::int64_t l = e - s + 1;
            if (l > params.min_length && l >= 2) try_candidate(seq, scores, s, e, found);
        }
    }

    found = nms(std::move(found), params.nms_iou);
    std::sort(found.begin(), found.end(), grade_order);
    return found;
}

double segment_iou(double s1, double e1, double s2, double e2) {
    const double overlap = std::min(e1, e2) - std::max(s1, s2);
    if (overlap <= 0.0) return 0.0;
    const double uni = (e1 - s1) + (e2 - s2) - overlap;
    return uni > 0.0 ? overlap / uni : 0.0;
}

std::vector<Detection> nms(std::vector<Detection> detections, double t_iou) {
    std::sort(detections.begin(), detections.end(), grade_order);
    std::vector<Detection> kept;
    std::vector<bool> suppressed(detections.size(), false);
    for (std::size_t i = 0; i < detections.size(); ++i) {
        if (suppressed[i]) continue;
        const Detection& top = detections[i];
        for (std::size_t j = i + 1; j < detections.size(); ++j) {
            if (suppressed[j]) continue;
            const double iou = segment_iou(static_cast<double>(top.start), static_cast<double>(top.end),
                                           static_cast<double>(detections[j].start),
                                           static_cast<double>(detections[j].end));
            if (iou > t_iou) suppressed[j] = true;
        }
        kept.push_back(top);
    }
    return kept;
}

Subsampled subsample(const ProgressionSequence& seq, const ClassScoreMatrix& scores, std::int64_t n) {
    check_inputs(seq, scores);
    if (n < 2) throw DataError("subsample: n must be >= 2");
    const std::int64_t T = seq.size();
    Subsampled out;
    if (n >= T) {
        out.seq = seq;
        out.scores = scores;
        out.frame_index.resize(static_cast<std::size_t>(T));
        for (std::int64_t i = 0; i < T; ++i) out.frame_index[static_cast<std::size_t>(i)] = i;
        return out;
    }
    out.seq.K = seq.K;
    out.scores.num_classes = scores.num_classes;
    out.frame_index.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t idx = std::llround(static_cast<double>(i) * static_cast<double>(T - 1) /
                                              static_cast<double>(n - 1));
        out.frame_index.push_back(idx);
        out.seq.values.push_back(seq.values[static_cast<std::size_t>(idx)]);
        for (int c = 0; c < scores.num_classes; ++c) out.scores.scores.push_back(scores.at(idx, c));
    }
    return out;
}

std::vector<Detection> detect_sampled(const ProgressionSequence& seq, const ClassScoreMatrix& scores,
                                      const DetectorParams& params, std::int64_t n) {
    const std::int64_t T = seq.size();
    if (n >= T) return detect(seq, scores, params);
    Subsampled sub = subsample(seq, scores, n);
    // min_length is in original-frame units; rescale to subsample spacing
    DetectorParams sub_params = params;
    sub_params.min_length = std::llround(static_cast<double>(params.min_length) *
                                         static_cast<double>(n - 1) / static_cast<double>(T - 1));
    std::vector<Detection> found = detect(sub.seq, sub.scores, sub_params);
    for (Detection& det : found) {
        det.start = sub.frame_index[static_cast<std::size_t>(det.start)];
        det.end = sub.frame_index[static_cast<std::size_t>(det.end)];
    }
    return found;
}

std::vector<Proposal> to_proposals(const std::vector<Detection>& detections) {
    std::vector<Proposal> proposals;
    proposals.reserve(detections.size());
    for (const Detection& det : detections) proposals.push_back({det.start, det.end, det.grade});
    return proposals;
}

double detection_class_score(const Detection& det, int class_id) {
    return det.grade * det.class_scores[static_cast<std::size_t>(class_id)];
}

}  // namespace progdet
