#pragma once

#include "progdet/detection_engine.hpp"
#include "progdet/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace progdet {

// Mean absolute error normalized to the 0..100 scale regardless of K.
double mae(const std::vector<double>& predictions, const std::vector<double>& labels, int K);

double top1_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

// IoU grids. Recall uses 0.50:0.05:0.95; the two detection sets are the
// default report columns (loose and strict).
std::vector<double> recall_iou_thresholds();
std::vector<double> detection_iou_thresholds();  // {0.3, 0.4, 0.5, 0.6, 0.7}
std::vector<double> strict_iou_thresholds();     // {0.5, 0.7, 0.9}

// AR@AN. proposals[v] pairs with gt[v]. Per video the top ceil(AN) proposals
// (by grade) are kept; a complete ground-truth segment counts as recalled at
// a threshold when some kept proposal reaches that IoU. Recall is pooled
// over videos and averaged over recall_iou_thresholds(). Incomplete
// instances are not recallable positives.
std::map<double, double> average_recall(const std::vector<std::vector<Proposal>>& proposals,
                                        const std::vector<VideoGroundTruth>& gt,
                                        const std::vector<double>& an_values);

// mAP over the given IoU thresholds. detections[v] pairs with gt[v]. Per
// class, every detection enters the ranking with score grade x mean class
// score; greedy matching against unmatched complete ground truth of that
// class; detections whose only >= threshold overlap is with an incomplete
// instance (any class) are ignored rather than counted as false positives.
// AP uses all-point interpolation; the mean runs over classes with at least
// one complete instance. No complete ground truth anywhere -> DataError.
std::map<double, double> mean_average_precision(const std::vector<std::vector<Detection>>& detections,
                                                const std::vector<VideoGroundTruth>& gt,
                                                const std::vector<double>& iou_thresholds);

// Fraction of incomplete ground-truth instances overlapped (IoU >= threshold)
// by at least one detection. The complement of the "avoided" statistic.
double incomplete_detection_rate(const std::vector<std::vector<Detection>>& detections,
                                 const std::vector<VideoGroundTruth>& gt, double iou_threshold);

struct EvalReport {
    std::optional<double> mae;
    std::optional<double> accuracy;
    std::map<double, double> ar_at_an;    // AN -> recall
    std::map<double, double> map_at_iou;  // IoU -> mAP
};

// Aligned plain-text table; sections with no data are omitted.
std::string format_report(const EvalReport& report);

}  // namespace progdet
