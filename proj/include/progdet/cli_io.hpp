#pragma once

#include "progdet/detection_engine.hpp"
#include "progdet/evaluation.hpp"
#include "progdet/types.hpp"

#include <string>
#include <vector>

namespace progdet {

// One video's model outputs: per-frame progression values plus class scores.
struct VideoSequence {
    std::string id;
    ProgressionSequence seq;
    ClassScoreMatrix scores;
};

struct VideoDetections {
    std::string id;
    std::vector<Detection> detections;
};

struct VideoProposals {
    std::string id;
    std::vector<Proposal> proposals;
};

// JSON annotation file: {"videos": [{"id", "num_frames", "fps"?, "segments":
// [{"start", "end", "class", "complete"}]}]}. Inclusive [start, end].
std::vector<VideoGroundTruth> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<VideoGroundTruth>& videos);

// Flat text, one block per video:
//   video <id> frames <T> ranks <K> classes <C>
// followed by T rows of 1+C %.17g numbers (progression, then scores).
std::vector<VideoSequence> read_sequences(const std::string& path);
void write_sequences(const std::string& path, const std::vector<VideoSequence>& videos);

std::vector<VideoDetections> read_detections(const std::string& path);
void write_detections(const std::string& path, const std::vector<VideoDetections>& videos);

std::vector<VideoProposals> read_proposals(const std::string& path);
void write_proposals(const std::string& path, const std::vector<VideoProposals>& videos);

EvalReport read_report(const std::string& path);
void write_report(const std::string& path, const EvalReport& report);

// Full command-line surface. Returns the process exit code: 0 success,
// 1 usage error, 2 data/validation error. Callable in-process.
int run_cli(int argc, const char* const* argv);

}  // namespace progdet
