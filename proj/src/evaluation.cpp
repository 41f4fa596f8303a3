#include "progdet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace progdet {

namespace {

void check_paired(std::size_t per_video, std::size_t gt_videos, const char* what) {
    if (per_video != gt_videos)
        throw DataError(std::string(what) + " count " + std::to_string(per_video) +
                        " does not match ground-truth video count " + std::to_string(gt_videos));
}

double iou_gt(double s1, double e1, const ActionSegment& g) {
    return segment_iou(s1, e1, static_cast<double>(g.start), static_cast<double>(g.end));
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string format_an(double an) {
    char buf[32];
    if (an == std::floor(an))
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(an));
    else
        std::snprintf(buf, sizeof buf, "%g", an);
    return buf;
}

}  // namespace

double mae(const std::vector<double>& predictions, const std::vector<double>& labels, int K) {
    if (predictions.empty()) throw DataError("mae: empty input");
    if (predictions.size() != labels.size()) throw DataError("mae: prediction/label length mismatch");
    if (K < 1) throw DataError("mae: K must be >= 1");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) sum += std::fabs(predictions[i] - labels[i]);
    return (100.0 / K) * (sum / static_cast<double>(predictions.size()));
}

double top1_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.empty()) throw DataError("top1_accuracy: empty input");
    if (predicted.size() != truth.size()) throw DataError("top1_accuracy: length mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::vector<double> recall_iou_thresholds() {
    std::vector<double> out;
    // integer construction keeps e.g. 60/100 comparable with == against 0.6
    for (int k = 0; k < 10; ++k) out.push_back(static_cast<double>(50 + 5 * k) / 100.0);
    return out;
}

std::vector<double> detection_iou_thresholds() { return {0.3, 0.4, 0.5, 0.6, 0.7}; }

std::vector<double> strict_iou_thresholds() { return {0.5, 0.7, 0.9}; }

std::map<double, double> average_recall(const std::vector<std::vector<Proposal>>& proposals,
                                        const std::vector<VideoGroundTruth>& gt,
                                        const std::vector<double>& an_values) {
    check_paired(proposals.size(), gt.size(), "proposal video");

    std::vector<std::vector<Proposal>> ranked = proposals;
    for (auto& list : ranked)
        std::stable_sort(list.begin(), list.end(),
                         [](const Proposal& a, const Proposal& b) { return a.grade > b.grade; });

    std::size_t total_complete = 0;
    for (const auto& video : gt)
        for (const auto& seg : video.segments)
            if (seg.complete) ++total_complete;

    const std::vector<double> thresholds = recall_iou_thresholds();
    std::map<double, double> out;
    for (double an : an_values) {
        if (!(an > 0.0)) throw DataError("average_recall: AN values must be positive");
        const std::size_t budget = static_cast<std::size_t>(std::ceil(an));
        if (total_complete == 0) {
            out[an] = 0.0;
            continue;
        }
        double recall_sum = 0.0;
        for (double thr : thresholds) {
            std::size_t recalled = 0;
            for (std::size_t v = 0; v < gt.size(); ++v) {
                const std::size_t kept = std::min(budget, ranked[v].size());
                for (const auto& seg : gt[v].segments) {
                    if (!seg.complete) continue;
                    for (std::size_t i = 0; i < kept; ++i) {
                        if (segment_iou(static_cast<double>(ranked[v][i].start),
                                        static_cast<double>(ranked[v][i].end),
                                        static_cast<double>(seg.start),
                                        static_cast<double>(seg.end)) >= thr) {
                            ++recalled;
                            break;
                        }
                    }
                }
            }
            recall_sum += static_cast<double>(recalled) / static_cast<double>(total_complete);
        }
        out[an] = recall_sum / static_cast<double>(thresholds.size());
    }
    return out;
}

std::map<double, double> mean_average_precision(const std::vector<std::vector<Detection>>& detections,
                                                const std::vector<VideoGroundTruth>& gt,
                                                const std::vector<double>& iou_thresholds) {
    check_paired(detections.size(), gt.size(), "detection video");
    if (iou_thresholds.empty()) throw DataError("mean_average_precision: no IoU thresholds");

    // complete instances per class, plus per-video segment index lists
    std::map<int, std::size_t> npos;
    std::vector<std::vector<const ActionSegment*>> incomplete(gt.size());
    for (std::size_t v = 0; v < gt.size(); ++v) {
        for (const auto& seg : gt[v].segments) {
            if (seg.complete)
                ++npos[seg.class_id];
            else
                incomplete[v].push_back(&seg);
        }
    }
    if (npos.empty()) throw DataError("mean_average_precision: no complete ground truth");

    std::map<double, double> ap_sum;
    for (double thr : iou_thresholds) ap_sum[thr] = 0.0;

    struct Entry {
        double score;
        std::size_t video;
        const Detection* det;
    };

    for (const auto& [cls, positives] : npos) {
        std::vector<std::vector<const ActionSegment*>> targets(gt.size());
        for (std::size_t v = 0; v < gt.size(); ++v)
            for (const auto& seg : gt[v].segments)
                if (seg.complete && seg.class_id == cls) targets[v].push_back(&seg);

        std::vector<Entry> entries;
        for (std::size_t v = 0; v < detections.size(); ++v)
            for (const auto& det : detections[v])
                if (cls < static_cast<int>(det.class_scores.size()))
                    entries.push_back({detection_class_score(det, cls), v, &det});
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.video != b.video) return a.video < b.video;
            if (a.det->start != b.det->start) return a.det->start < b.det->start;
            return a.det->end < b.det->end;
        });

        for (double thr : iou_thresholds) {
            std::vector<std::vector<char>> matched(gt.size());
            for (std::size_t v = 0; v < gt.size(); ++v) matched[v].assign(targets[v].size(), 0);

            std::vector<char> is_tp;   // one flag per counted (non-ignored) entry
            for (const Entry& entry : entries) {
                const double ds = static_cast<double>(entry.det->start);
                const double de = static_cast<double>(entry.det->end);
                double best_iou = 0.0;
                std::size_t best_idx = 0;
                bool found = false;
                for (std::size_t i = 0; i < targets[entry.video].size(); ++i) {
                    if (matched[entry.video][i]) continue;
                    const double iou = iou_gt(ds, de, *targets[entry.video][i]);
                    if (!found || iou > best_iou) {
                        best_iou = iou;
                        best_idx = i;
                        found = true;
                    }
                }
                if (found && best_iou >= thr) {
                    matched[entry.video][best_idx] = 1;
                    is_tp.push_back(1);
                    continue;
                }
                bool ignored = false;
                for (const ActionSegment* seg : incomplete[entry.video]) {
                    if (iou_gt(ds, de, *seg) >= thr) {
                        ignored = true;
                        break;
                    }
                }
                if (!ignored) is_tp.push_back(0);
            }

            // all-point interpolation: recall moves 1/positives at each TP,
            // weighted by the running max precision from that rank onward
            std::vector<double> precision(is_tp.size());
            std::size_t tp = 0;
            for (std::size_t i = 0; i < is_tp.size(); ++i) {
                tp += is_tp[i] ? 1u : 0u;
                precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
            }
            double envelope = 0.0, ap = 0.0;
            for (std::size_t i = is_tp.size(); i-- > 0;) {
                envelope = std::max(envelope, precision[i]);
                if (is_tp[i]) ap += envelope / static_cast<double>(positives);
            }
            ap_sum[thr] += ap;
        }
    }

    std::map<double, double> out;
    for (double thr : iou_thresholds)
        out[thr] = ap_sum[thr] / static_cast<double>(npos.size());
    return out;
}

double incomplete_detection_rate(const std::vector<std::vector<Detection>>& detections,
                                 const std::vector<VideoGroundTruth>& gt, double iou_threshold) {
    check_paired(detections.size(), gt.size(), "detection video");
    std::size_t total = 0, hit = 0;
    for (std::size_t v = 0; v < gt.size(); ++v) {
        for (const auto& seg : gt[v].segments) {
            if (seg.complete) continue;
            ++total;
            for (const auto& det : detections[v]) {
                if (iou_gt(static_cast<double>(det.start), static_cast<double>(det.end), seg) >=
                    iou_threshold) {
                    ++hit;
                    break;
                }
            }
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

std::string format_report(const EvalReport& report) {
    std::vector<std::pair<std::string, std::string>> rows;
    if (report.mae) rows.emplace_back("MAE", format_value(*report.mae));
    if (report.accuracy) rows.emplace_back("accuracy", format_value(*report.accuracy));
    for (const auto& [an, recall] : report.ar_at_an)
        rows.emplace_back("AR@" + format_an(an), format_value(recall));
    for (const auto& [iou, value] : report.map_at_iou) {
        char key[32];
        std::snprintf(key, sizeof key, "mAP@%.2f", iou);
        rows.emplace_back(key, format_value(value));
    }

    std::size_t width = std::string("metric").size();
    for (const auto& [name, _] : rows) width = std::max(width, name.size());

    std::ostringstream os;
    os << "metric";
    os << std::string(width - 6 + 2, ' ') << "value\n";
    for (const auto& [name, value] : rows)
        os << name << std::string(width - name.size() + 2, ' ') << value << "\n";
    return os.str();
}

}  // namespace progdet
