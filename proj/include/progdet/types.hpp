#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace progdet {

// Malformed input: bad shapes, bad files, impossible configurations.
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Ground-truth action instance. Frames are inclusive [start, end].
struct ActionSegment {
    std::int64_t start = 0;
    std::int64_t end = 0;
    int class_id = 0;
    bool complete = true;

    std::int64_t length() const { return end - start + 1; }
};

struct VideoGroundTruth {
    std::string video_id;
    std::int64_t num_frames = 0;
    double fps = 0.0;  // optional, 0 = unknown
    std::vector<ActionSegment> segments;
};

// Per-frame predicted progression ranks for one video, values in [0, K].
struct ProgressionSequence {
    int K = 100;
    std::vector<double> values;

    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
};

// T x C per-frame class scores in (0, 1), each row summing to 1. Row-major.
struct ClassScoreMatrix {
    int num_classes = 0;
    std::vector<double> scores;

    std::int64_t rows() const {
        return num_classes > 0 ? static_cast<std::int64_t>(scores.size()) / num_classes : 0;
    }
    double at(std::int64_t t, int c) const { return scores[static_cast<std::size_t>(t) * num_classes + c]; }
    double& at(std::int64_t t, int c) { return scores[static_cast<std::size_t>(t) * num_classes + c]; }
};

// One detected action: inclusive segment, per-class scores, confidence grade.
struct Detection {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::vector<double> class_scores;
    double grade = 0.0;
};

// Class-free segment hypothesis for proposal evaluation.
struct Proposal {
    std::int64_t start = 0;
    std::int64_t end = 0;
    double grade = 0.0;
};

inline void validate_sequence(const ProgressionSequence& seq, const std::string& context) {
    if (seq.K < 1) throw DataError(context + ": K must be >= 1");
    if (seq.values.empty()) throw DataError(context + ": empty progression sequence");
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        const double v = seq.values[i];
        if (!std::isfinite(v) || v < 0.0 || v > seq.K)
            throw DataError(context + ": progression value out of [0, K] at frame " + std::to_string(i));
    }
}

inline void validate_scores(const ClassScoreMatrix& m, const std::string& context) {
    if (m.num_classes < 1) throw DataError(context + ": num_classes must be >= 1");
    if (m.scores.size() % m.num_classes != 0)
        throw DataError(context + ": score matrix size is not a multiple of num_classes");
    const std::int64_t T = m.rows();
    for (std::int64_t t = 0; t < T; ++t) {
        double sum = 0.0;
        for (int c = 0; c < m.num_classes; ++c) {
            const double s = m.at(t, c);
            if (!std::isfinite(s) || s <= 0.0 || s >= 1.0)
                throw DataError(context + ": class score outside (0, 1) at row " + std::to_string(t));
            sum += s;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw DataError(context + ": class score row " + std::to_string(t) + " does not sum to 1");
    }
}

}  // namespace progdet
