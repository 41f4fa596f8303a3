#include "progdet/cli_io.hpp"

#include "progdet/progression_codec.hpp"
#include "progdet/simulator.hpp"
#include "progdet/toy_trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace progdet {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- utilities

ordered_json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open for reading");
    try {
        return ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError(tmp + ": cannot open for writing");
        out << content;
        out.flush();
        if (!out) throw DataError(tmp + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError(path + ": rename failed: " + ec.message());
}

const ordered_json& need(const ordered_json& obj, const char* key, const std::string& ctx) {
    if (!obj.is_object()) throw DataError(ctx + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(ctx + ": missing '" + key + "'");
    return *it;
}

std::int64_t need_int(const ordered_json& obj, const char* key, const std::string& ctx) {
    const ordered_json& v = need(obj, key, ctx);
    if (!v.is_number_integer()) throw DataError(ctx + ": '" + std::string(key) + "' must be an integer");
    return v.get<std::int64_t>();
}

double need_num(const ordered_json& obj, const char* key, const std::string& ctx) {
    const ordered_json& v = need(obj, key, ctx);
    if (!v.is_number()) throw DataError(ctx + ": '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

bool need_bool(const ordered_json& obj, const char* key, const std::string& ctx) {
    const ordered_json& v = need(obj, key, ctx);
    if (!v.is_boolean()) throw DataError(ctx + ": '" + std::string(key) + "' must be a boolean");
    return v.get<bool>();
}

std::string need_str(const ordered_json& obj, const char* key, const std::string& ctx) {
    const ordered_json& v = need(obj, key, ctx);
    if (!v.is_string()) throw DataError(ctx + ": '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

const ordered_json& need_array(const ordered_json& obj, const char* key, const std::string& ctx) {
    const ordered_json& v = need(obj, key, ctx);
    if (!v.is_array()) throw DataError(ctx + ": '" + std::string(key) + "' must be an array");
    return v;
}

void check_video_id(const std::string& id, const std::string& ctx) {
    if (id.empty()) throw DataError(ctx + ": empty video id");
    for (char c : id)
        if (std::isspace(static_cast<unsigned char>(c)))
            throw DataError(ctx + ": video id '" + id + "' contains whitespace");
}

void check_unique_id(std::set<std::string>& seen, const std::string& id, const std::string& ctx) {
    if (!seen.insert(id).second) throw DataError(ctx + ": duplicate video id '" + id + "'");
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// shortest-round-trip decimal text of a double, used for JSON map keys
std::string double_key(double v) { return ordered_json(v).dump(); }

double parse_double_key(const std::string& key, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(key, &pos);
        if (pos != key.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw DataError(ctx + ": key '" + key + "' is not a number");
    }
}

void run_parallel(int jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

// ---------------------------------------------------------------- file formats

std::vector<VideoGroundTruth> read_annotations(const std::string& path) {
    const ordered_json root = parse_file(path);
    const ordered_json& videos = need_array(root, "videos", path);
    std::vector<VideoGroundTruth> out;
    std::set<std::string> seen;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const std::string vctx = path + ": video " + std::to_string(v);
        const ordered_json& jv = videos[v];
        VideoGroundTruth gt;
        gt.video_id = need_str(jv, "id", vctx);
        check_video_id(gt.video_id, vctx);
        check_unique_id(seen, gt.video_id, vctx);
        const std::string idctx = vctx + " ('" + gt.video_id + "')";
        gt.num_frames = need_int(jv, "num_frames", idctx);
        if (gt.num_frames < 1) throw DataError(idctx + ": num_frames must be >= 1");
        if (jv.contains("fps")) {
            if (!jv.at("fps").is_number()) throw DataError(idctx + ": 'fps' must be a number");
            gt.fps = jv.at("fps").get<double>();
            if (!(gt.fps >= 0.0) || !std::isfinite(gt.fps))
                throw DataError(idctx + ": 'fps' must be a finite non-negative number");
        }
        const ordered_json& segments = need_array(jv, "segments", idctx);
        for (std::size_t s = 0; s < segments.size(); ++s) {
            const std::string sctx = idctx + " segment " + std::to_string(s);
            const ordered_json& js = segments[s];
            ActionSegment seg;
            seg.start = need_int(js, "start", sctx);
            seg.end = need_int(js, "end", sctx);
            seg.class_id = static_cast<int>(need_int(js, "class", sctx));
            seg.complete = need_bool(js, "complete", sctx);
            if (seg.start < 0 || seg.start >= seg.end || seg.end >= gt.num_frames)
                throw DataError(sctx + ": need 0 <= start < end < num_frames");
            if (seg.class_id < 0) throw DataError(sctx + ": class must be >= 0");
            gt.segments.push_back(seg);
        }
        for (std::size_t a = 0; a < gt.segments.size(); ++a) {
            if (!gt.segments[a].complete) continue;
            for (std::size_t b = a + 1; b < gt.segments.size(); ++b) {
                if (!gt.segments[b].complete) continue;
                if (!(gt.segments[a].end < gt.segments[b].start ||
                      gt.segments[b].end < gt.segments[a].start))
                    throw DataError(idctx + ": complete segments " + std::to_string(a) + " and " +
                                    std::to_string(b) + " overlap");
            }
        }
        out.push_back(std::move(gt));
    }
    return out;
}

void write_annotations(const std::string& path, const std::vector<VideoGroundTruth>& videos) {
    ordered_json jv_list = ordered_json::array();
    std::set<std::string> seen;
    for (const VideoGroundTruth& gt : videos) {
        const std::string ctx = path + ": video '" + gt.video_id + "'";
        check_video_id(gt.video_id, path);
        check_unique_id(seen, gt.video_id, path);
        ordered_json jv;
        jv["id"] = gt.video_id;
        jv["num_frames"] = gt.num_frames;
        if (gt.fps > 0.0) jv["fps"] = gt.fps;
        ordered_json segs = ordered_json::array();
        for (const ActionSegment& seg : gt.segments) {
            if (seg.start < 0 || seg.start >= seg.end || seg.end >= gt.num_frames)
                throw DataError(ctx + ": segment violates 0 <= start < end < num_frames");
            segs.push_back({{"start", seg.start},
                            {"end", seg.end},
                            {"class", seg.class_id},
                            {"complete", seg.complete}});
        }
        jv["segments"] = std::move(segs);
        jv_list.push_back(std::move(jv));
    }
    ordered_json root;
    root["videos"] = std::move(jv_list);
    atomic_write(path, root.dump(2) + "\n");
}

std::vector<VideoSequence> read_sequences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open for reading");
    std::vector<VideoSequence> out;
    std::set<std::string> seen;
    std::string tok;
    while (in >> tok) {
        std::string ctx = path + ": video block " + std::to_string(out.size());
        if (tok != "video") throw DataError(ctx + ": expected 'video', got '" + tok + "'");
        VideoSequence v;
        if (!(in >> v.id)) throw DataError(ctx + ": missing video id");
        ctx = path + ": video '" + v.id + "'";
        check_unique_id(seen, v.id, ctx);
        auto expect_kw = [&](const char* kw) {
            std::string t;
            if (!(in >> t) || t != kw) throw DataError(ctx + ": expected '" + std::string(kw) + "'");
        };
        auto read_count = [&](const char* what) {
            std::int64_t x;
            if (!(in >> x)) throw DataError(ctx + ": unreadable " + std::string(what));
            return x;
        };
        expect_kw("frames");
        const std::int64_t T = read_count("frame count");
        expect_kw("ranks");
        const std::int64_t K = read_count("rank count");
        expect_kw("classes");
        const std::int64_t C = read_count("class count");
        if (T < 1) throw DataError(ctx + ": frame count must be >= 1");
        if (K < 1 || K > 1'000'000) throw DataError(ctx + ": rank count outside [1, 1e6]");
        if (C < 2 || C > 100'000) throw DataError(ctx + ": class count outside [2, 1e5]");
        v.seq.K = static_cast<int>(K);
        v.seq.values.resize(static_cast<std::size_t>(T));
        v.scores.num_classes = static_cast<int>(C);
        v.scores.scores.resize(static_cast<std::size_t>(T * C));
        for (std::int64_t t = 0; t < T; ++t) {
            if (!(in >> v.seq.values[static_cast<std::size_t>(t)]))
                throw DataError(ctx + ": unreadable progression value at row " + std::to_string(t));
            for (std::int64_t c = 0; c < C; ++c) {
                if (!(in >> v.scores.scores[static_cast<std::size_t>(t * C + c)]))
                    throw DataError(ctx + ": unreadable class score at row " + std::to_string(t) +
                                    " column " + std::to_string(c));
            }
        }
        validate_sequence(v.seq, ctx);
        validate_scores(v.scores, ctx);
        out.push_back(std::move(v));
    }
    return out;
}

void write_sequences(const std::string& path, const std::vector<VideoSequence>& videos) {
    std::string content;
    std::set<std::string> seen;
    for (const VideoSequence& v : videos) {
        const std::string ctx = path + ": video '" + v.id + "'";
        check_video_id(v.id, path);
        check_unique_id(seen, v.id, ctx);
        validate_sequence(v.seq, ctx);
        validate_scores(v.scores, ctx);
        if (v.seq.size() != v.scores.rows())
            throw DataError(ctx + ": sequence length does not match score rows");
        content += "video " + v.id + " frames " + std::to_string(v.seq.size()) + " ranks " +
                   std::to_string(v.seq.K) + " classes " + std::to_string(v.scores.num_classes) +
                   "\n";
        for (std::int64_t t = 0; t < v.seq.size(); ++t) {
            content += g17(v.seq.values[static_cast<std::size_t>(t)]);
            for (int c = 0; c < v.scores.num_classes; ++c) {
                content += ' ';
                content += g17(v.scores.at(t, c));
            }
            content += '\n';
        }
    }
    atomic_write(path, content);
}

std::vector<VideoDetections> read_detections(const std::string& path) {
    const ordered_json root = parse_file(path);
    const ordered_json& videos = need_array(root, "videos", path);
    std::vector<VideoDetections> out;
    std::set<std::string> seen;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const std::string vctx = path + ": video " + std::to_string(v);
        VideoDetections vd;
        vd.id = need_str(videos[v], "id", vctx);
        check_video_id(vd.id, vctx);
        check_unique_id(seen, vd.id, vctx);
        const std::string idctx = vctx + " ('" + vd.id + "')";
        const ordered_json& dets = need_array(videos[v], "detections", idctx);
        for (std::size_t d = 0; d < dets.size(); ++d) {
            const std::string dctx = idctx + " detection " + std::to_string(d);
            const ordered_json& jd = dets[d];
            Detection det;
            det.start = need_int(jd, "start", dctx);
            det.end = need_int(jd, "end", dctx);
            det.grade = need_num(jd, "grade", dctx);
            if (det.start < 0 || det.start >= det.end)
                throw DataError(dctx + ": need 0 <= start < end");
            if (!std::isfinite(det.grade)) throw DataError(dctx + ": non-finite grade");
            const ordered_json& scores = need_array(jd, "class_scores", dctx);
            for (std::size_t c = 0; c < scores.size(); ++c) {
                if (!scores[c].is_number())
                    throw DataError(dctx + ": class score " + std::to_string(c) + " must be a number");
                const double s = scores[c].get<double>();
                if (!std::isfinite(s))
                    throw DataError(dctx + ": non-finite class score " + std::to_string(c));
                det.class_scores.push_back(s);
            }
            vd.detections.push_back(std::move(det));
        }
        out.push_back(std::move(vd));
    }
    return out;
}

void write_detections(const std::string& path, const std::vector<VideoDetections>& videos) {
    ordered_json jv_list = ordered_json::array();
    std::set<std::string> seen;
    for (const VideoDetections& vd : videos) {
        const std::string ctx = path + ": video '" + vd.id + "'";
        check_video_id(vd.id, path);
        check_unique_id(seen, vd.id, ctx);
        ordered_json jv;
        jv["id"] = vd.id;
        ordered_json dets = ordered_json::array();
        for (const Detection& det : vd.detections) {
            if (det.start < 0 || det.start >= det.end)
                throw DataError(ctx + ": detection violates 0 <= start < end");
            if (!std::isfinite(det.grade)) throw DataError(ctx + ": non-finite grade");
            ordered_json jd;
            jd["start"] = det.start;
            jd["end"] = det.end;
            jd["grade"] = det.grade;
            jd["class_scores"] = det.class_scores;
            for (double s : det.class_scores)
                if (!std::isfinite(s)) throw DataError(ctx + ": non-finite class score");
            dets.push_back(std::move(jd));
        }
        jv["detections"] = std::move(dets);
        jv_list.push_back(std::move(jv));
    }
    ordered_json root;
    root["videos"] = std::move(jv_list);
    atomic_write(path, root.dump(2) + "\n");
}

std::vector<VideoProposals> read_proposals(const std::string& path) {
    const ordered_json root = parse_file(path);
    const ordered_json& videos = need_array(root, "videos", path);
    std::vector<VideoProposals> out;
    std::set<std::string> seen;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const std::string vctx = path + ": video " + std::to_string(v);
        VideoProposals vp;
        vp.id = need_str(videos[v], "id", vctx);
        check_video_id(vp.id, vctx);
        check_unique_id(seen, vp.id, vctx);
        const std::string idctx = vctx + " ('" + vp.id + "')";
        const ordered_json& props = need_array(videos[v], "proposals", idctx);
        for (std::size_t p = 0; p < props.size(); ++p) {
            const std::string pctx = idctx + " proposal " + std::to_string(p);
            Proposal prop;
            prop.start = need_int(props[p], "start", pctx);
            prop.end = need_int(props[p], "end", pctx);
            prop.grade = need_num(props[p], "grade", pctx);
            if (prop.start < 0 || prop.start >= prop.end)
                throw DataError(pctx + ": need 0 <= start < end");
            if (!std::isfinite(prop.grade)) throw DataError(pctx + ": non-finite grade");
            vp.proposals.push_back(prop);
        }
        out.push_back(std::move(vp));
    }
    return out;
}

void write_proposals(const std::string& path, const std::vector<VideoProposals>& videos) {
    ordered_json jv_list = ordered_json::array();
    std::set<std::string> seen;
    for (const VideoProposals& vp : videos) {
        const std::string ctx = path + ": video '" + vp.id + "'";
        check_video_id(vp.id, path);
        check_unique_id(seen, vp.id, ctx);
        ordered_json jv;
        jv["id"] = vp.id;
        ordered_json props = ordered_json::array();
        for (const Proposal& prop : vp.proposals) {
            if (prop.start < 0 || prop.start >= prop.end)
                throw DataError(ctx + ": proposal violates 0 <= start < end");
            if (!std::isfinite(prop.grade)) throw DataError(ctx + ": non-finite grade");
            props.push_back({{"start", prop.start}, {"end", prop.end}, {"grade", prop.grade}});
        }
        jv["proposals"] = std::move(props);
        jv_list.push_back(std::move(jv));
    }
    ordered_json root;
    root["videos"] = std::move(jv_list);
    atomic_write(path, root.dump(2) + "\n");
}

EvalReport read_report(const std::string& path) {
    const ordered_json root = parse_file(path);
    if (!root.is_object()) throw DataError(path + ": expected an object");
    EvalReport report;
    if (root.contains("mae")) {
        if (!root.at("mae").is_number()) throw DataError(path + ": 'mae' must be a number");
        report.mae = root.at("mae").get<double>();
    }
    if (root.contains("accuracy")) {
        if (!root.at("accuracy").is_number()) throw DataError(path + ": 'accuracy' must be a number");
        report.accuracy = root.at("accuracy").get<double>();
    }
    auto read_map = [&](const char* key, std::map<double, double>& dst) {
        if (!root.contains(key)) return;
        const ordered_json& m = root.at(key);
        if (!m.is_object()) throw DataError(path + ": '" + std::string(key) + "' must be an object");
        for (auto it = m.begin(); it != m.end(); ++it) {
            if (!it.value().is_number())
                throw DataError(path + ": '" + std::string(key) + "." + it.key() +
                                "' must be a number");
            dst[parse_double_key(it.key(), path + ": " + key)] = it.value().get<double>();
        }
    };
    read_map("ar_at_an", report.ar_at_an);
    read_map("map_at_iou", report.map_at_iou);
    return report;
}

void write_report(const std::string& path, const EvalReport& report) {
    ordered_json root;
    if (report.mae) root["mae"] = *report.mae;
    if (report.accuracy) root["accuracy"] = *report.accuracy;
    if (!report.ar_at_an.empty()) {
        ordered_json m;
        for (const auto& [an, v] : report.ar_at_an) m[double_key(an)] = v;
        root["ar_at_an"] = std::move(m);
    }
    if (!report.map_at_iou.empty()) {
        ordered_json m;
        for (const auto& [iou, v] : report.map_at_iou) m[double_key(iou)] = v;
        root["map_at_iou"] = std::move(m);
    }
    atomic_write(path, root.dump(2) + "\n");
}

// ---------------------------------------------------------------- CLI

namespace {

std::string out_path(const std::string& dir, const char* name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError(dir + ": cannot create output directory: " + ec.message());
    return (fs::path(dir) / name).string();
}

struct DetectorCliOpts {
    std::string preset = "short";
    std::int64_t min_length = -1;
    double t_start = -1.0;
    double t_end = -1.0;
    double nms_iou = -1.0;
    std::int64_t max_candidates = -1;
    std::int64_t sample = 0;  // 0 = every frame
};

void add_detector_options(CLI::App* sub, DetectorCliOpts& o, bool with_sample) {
    sub->add_option("--preset", o.preset, "parameter preset: short or long actions")
        ->check(CLI::IsMember({"short", "long"}));
    sub->add_option("--min-length", o.min_length, "minimum candidate length (frames)");
    sub->add_option("--t-start", o.t_start, "start candidates need progression below this rank");
    sub->add_option("--t-end", o.t_end, "end candidates need progression above this rank");
    sub->add_option("--nms-iou", o.nms_iou, "NMS suppression IoU");
    sub->add_option("--max-candidates", o.max_candidates, "candidate pair cap before thinning");
    if (with_sample)
        sub->add_option("--sample", o.sample, "evaluate only this many uniformly spaced frames");
}

DetectorParams resolve_detector(const DetectorCliOpts& o) {
    DetectorParams p = o.preset == "long" ? long_action_params() : short_action_params();
    if (o.min_length >= 0) p.min_length = o.min_length;
    if (o.t_start >= 0.0) p.max_start_rank = o.t_start;
    if (o.t_end >= 0.0) p.min_end_rank = o.t_end;
    if (o.nms_iou >= 0.0) p.nms_iou = o.nms_iou;
    if (o.max_candidates >= 0) p.max_candidates = o.max_candidates;
    return p;
}

// pair items carrying an `id` with annotation videos; null = no entry
template <typename T>
std::vector<const T*> align_with_annotations(const std::vector<T>& items,
                                             const std::vector<VideoGroundTruth>& gt,
                                             const std::string& what) {
    std::map<std::string, const T*> by_id;
    for (const T& item : items) by_id.emplace(item.id, &item);
    std::set<std::string> known;
    for (const VideoGroundTruth& g : gt) known.insert(g.video_id);
    for (const T& item : items)
        if (!known.count(item.id))
            throw DataError(what + ": video '" + item.id + "' is not in the annotations");
    std::vector<const T*> out;
    out.reserve(gt.size());
    for (const VideoGroundTruth& g : gt) {
        auto it = by_id.find(g.video_id);
        out.push_back(it == by_id.end() ? nullptr : it->second);
    }
    return out;
}

const std::map<std::string, OrdinalMethod>& method_map() {
    static const std::map<std::string, OrdinalMethod> m = {
        {"regression", OrdinalMethod::Regression},
        {"nominal", OrdinalMethod::NominalClassification},
        {"cost_sensitive", OrdinalMethod::CostSensitive},
        {"binary_decomposition", OrdinalMethod::BinaryDecomposition},
        {"threshold", OrdinalMethod::ThresholdModel},
    };
    return m;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"progression-profile temporal action detection toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a TOML/INI file");

    std::uint64_t seed = 0;
    int K = 100;
    std::string out_dir = ".";
    int jobs = 1;
    app.add_option("--seed", seed, "master random seed")->capture_default_str();
    app.add_option("--k", K, "maximum progression rank")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--jobs", jobs, "parallel video workers")->check(CLI::Range(1, 1024))->capture_default_str();

    // ---- simulate
    auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic annotated videos");
    sim_cmd->fallthrough();
    SimConfig sim_base;
    int sim_videos = 1;
    std::string sim_background = "uniform";
    sim_cmd->add_option("--videos", sim_videos, "number of videos")->check(CLI::PositiveNumber)->capture_default_str();
    sim_cmd->add_option("--frames", sim_base.num_frames, "frames per video")->capture_default_str();
    sim_cmd->add_option("--classes", sim_base.num_classes, "action classes")->capture_default_str();
    sim_cmd->add_option("--actions", sim_base.num_actions, "actions per video")->capture_default_str();
    sim_cmd->add_option("--incomplete-fraction", sim_base.incomplete_fraction,
                        "fraction of actions left incomplete")->capture_default_str();
    sim_cmd->add_option("--truncation-lo", sim_base.truncation_lo,
                        "incomplete evolution lower bound")->capture_default_str();
    sim_cmd->add_option("--truncation-hi", sim_base.truncation_hi,
                        "incomplete evolution upper bound")->capture_default_str();
    sim_cmd->add_option("--sigma", sim_base.progression_noise_sigma,
                        "progression noise sigma (rank units)")->capture_default_str();
    sim_cmd->add_option("--background", sim_background, "background model: uniform or mid")
        ->check(CLI::IsMember({"uniform", "mid"}))->capture_default_str();
    sim_cmd->add_option("--temperature", sim_base.class_score_temperature,
                        "class score softmax temperature")->capture_default_str();
    sim_cmd->add_option("--min-len", sim_base.min_action_length, "minimum action length")->capture_default_str();
    sim_cmd->add_option("--max-len", sim_base.max_action_length, "maximum action length")->capture_default_str();
    sim_cmd->callback([&] {
        std::vector<VideoGroundTruth> gts;
        std::vector<VideoSequence> seqs;
        for (int v = 0; v < sim_videos; ++v) {
            SimConfig cfg = sim_base;
            cfg.K = K;
            cfg.background = sim_background == "mid" ? BackgroundModel::ConstantMid
                                                     : BackgroundModel::UniformRandom;
            cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(v));
            cfg.video_id = "sim-" + std::to_string(v);
            SimInstance inst = simulate(cfg);
            gts.push_back(inst.gt);
            seqs.push_back({cfg.video_id, std::move(inst.seq), std::move(inst.scores)});
        }
        const std::string ann = out_path(out_dir, "annotations.json");
        const std::string sq = out_path(out_dir, "sequences.txt");
        write_annotations(ann, gts);
        write_sequences(sq, seqs);
        std::cout << "wrote " << ann << "\nwrote " << sq << "\n";
    });

    // ---- label
    auto* label_cmd = app.add_subcommand("label", "per-frame progression labels for complete segments");
    label_cmd->fallthrough();
    std::string label_annotations;
    label_cmd->add_option("--annotations", label_annotations, "annotation file")->required();
    label_cmd->callback([&] {
        const auto gts = read_annotations(label_annotations);
        ProgressionConfig cfg;
        cfg.K = K;
        ordered_json jv_list = ordered_json::array();
        for (const VideoGroundTruth& gt : gts) {
            ordered_json jv;
            jv["id"] = gt.video_id;
            ordered_json segs = ordered_json::array();
            for (const ActionSegment& seg : gt.segments) {
                if (!seg.complete) continue;
                ordered_json js;
                js["start"] = seg.start;
                js["end"] = seg.end;
                js["class"] = seg.class_id;
                ordered_json labels = ordered_json::array();
                for (const FrameLabel& fl : generate_labels(seg, cfg))
                    labels.push_back({fl.frame, fl.rank});
                js["labels"] = std::move(labels);
                segs.push_back(std::move(js));
            }
            jv["segments"] = std::move(segs);
            jv_list.push_back(std::move(jv));
        }
        ordered_json root;
        root["k"] = K;
        root["videos"] = std::move(jv_list);
        const std::string out = out_path(out_dir, "labels.json");
        atomic_write(out, root.dump(2) + "\n");
        std::cout << "wrote " << out << "\n";
    });

    // ---- detect / propose share options
    auto* detect_cmd = app.add_subcommand("detect", "run the profile-matching detector");
    detect_cmd->fallthrough();
    std::string detect_sequences;
    DetectorCliOpts detect_opts;
    detect_cmd->add_option("--sequences", detect_sequences, "sequence file")->required();
    add_detector_options(detect_cmd, detect_opts, true);
    detect_cmd->callback([&] {
        const auto videos = read_sequences(detect_sequences);
        const DetectorParams params = resolve_detector(detect_opts);
        std::vector<VideoDetections> results(videos.size());
        run_parallel(jobs, videos.size(), [&](std::size_t i) {
            const VideoSequence& v = videos[i];
            try {
                results[i].id = v.id;
                results[i].detections =
                    detect_opts.sample > 0
                        ? detect_sampled(v.seq, v.scores, params, detect_opts.sample)
                        : detect(v.seq, v.scores, params);
            } catch (const DataError& e) {
                throw DataError("video '" + v.id + "': " + e.what());
            }
        });
        const std::string out = out_path(out_dir, "detections.json");
        write_detections(out, results);
        std::cout << "wrote " << out << "\n";
    });

    auto* propose_cmd = app.add_subcommand("propose", "emit class-free proposals");
    propose_cmd->fallthrough();
    std::string propose_sequences;
    DetectorCliOpts propose_opts;
    propose_cmd->add_option("--sequences", propose_sequences, "sequence file")->required();
    add_detector_options(propose_cmd, propose_opts, true);
    propose_cmd->callback([&] {
        const auto videos = read_sequences(propose_sequences);
        const DetectorParams params = resolve_detector(propose_opts);
        std::vector<VideoProposals> results(videos.size());
        run_parallel(jobs, videos.size(), [&](std::size_t i) {
            const VideoSequence& v = videos[i];
            try {
                results[i].id = v.id;
                results[i].proposals = to_proposals(
                    propose_opts.sample > 0
                        ? detect_sampled(v.seq, v.scores, params, propose_opts.sample)
                        : detect(v.seq, v.scores, params));
            } catch (const DataError& e) {
                throw DataError("video '" + v.id + "': " + e.what());
            }
        });
        const std::string out = out_path(out_dir, "proposals.json");
        write_proposals(out, results);
        std::cout << "wrote " << out << "\n";
    });

    // ---- eval-det
    auto* evaldet_cmd = app.add_subcommand("eval-det", "detection mAP against annotations");
    evaldet_cmd->fallthrough();
    std::string evaldet_detections, evaldet_annotations;
    std::vector<double> evaldet_ious;
    bool evaldet_strict = false;
    evaldet_cmd->add_option("--detections", evaldet_detections, "detections file")->required();
    evaldet_cmd->add_option("--annotations", evaldet_annotations, "annotation file")->required();
    evaldet_cmd->add_option("--iou", evaldet_ious, "IoU thresholds (default 0.3..0.7)");
    evaldet_cmd->add_flag("--strict", evaldet_strict, "use the strict default set {0.5, 0.7, 0.9}");
    evaldet_cmd->callback([&] {
        const auto gts = read_annotations(evaldet_annotations);
        const auto det_videos = read_detections(evaldet_detections);
        const auto aligned = align_with_annotations(det_videos, gts, evaldet_detections);
        std::vector<std::vector<Detection>> dets;
        dets.reserve(gts.size());
        for (const VideoDetections* vd : aligned)
            dets.push_back(vd ? vd->detections : std::vector<Detection>{});
        std::vector<double> ious = evaldet_ious;
        if (ious.empty()) ious = evaldet_strict ? strict_iou_thresholds() : detection_iou_thresholds();
        EvalReport report;
        report.map_at_iou = mean_average_precision(dets, gts, ious);
        const std::string out = out_path(out_dir, "report.json");
        write_report(out, report);
        std::cout << format_report(report) << "wrote " << out << "\n";
    });

    // ---- eval-prop
    auto* evalprop_cmd = app.add_subcommand("eval-prop", "proposal AR@AN against annotations");
    evalprop_cmd->fallthrough();
    std::string evalprop_proposals, evalprop_annotations;
    std::vector<double> evalprop_an;
    evalprop_cmd->add_option("--proposals", evalprop_proposals, "proposals file")->required();
    evalprop_cmd->add_option("--annotations", evalprop_annotations, "annotation file")->required();
    evalprop_cmd->add_option("--an", evalprop_an, "AN budgets (default 1 10 50 100)");
    evalprop_cmd->callback([&] {
        const auto gts = read_annotations(evalprop_annotations);
        const auto prop_videos = read_proposals(evalprop_proposals);
        const auto aligned = align_with_annotations(prop_videos, gts, evalprop_proposals);
        std::vector<std::vector<Proposal>> props;
        props.reserve(gts.size());
        for (const VideoProposals* vp : aligned)
            props.push_back(vp ? vp->proposals : std::vector<Proposal>{});
        std::vector<double> an = evalprop_an;
        if (an.empty()) an = {1.0, 10.0, 50.0, 100.0};
        EvalReport report;
        report.ar_at_an = average_recall(props, gts, an);
        const std::string out = out_path(out_dir, "report.json");
        write_report(out, report);
        std::cout << format_report(report) << "wrote " << out << "\n";
    });

    // ---- eval-mae
    auto* evalmae_cmd = app.add_subcommand("eval-mae",
                                           "frame MAE and class accuracy inside complete segments");
    evalmae_cmd->fallthrough();
    std::string evalmae_sequences, evalmae_annotations;
    evalmae_cmd->add_option("--sequences", evalmae_sequences, "sequence file")->required();
    evalmae_cmd->add_option("--annotations", evalmae_annotations, "annotation file")->required();
    evalmae_cmd->callback([&] {
        const auto gts = read_annotations(evalmae_annotations);
        const auto seq_videos = read_sequences(evalmae_sequences);
        const auto aligned = align_with_annotations(seq_videos, gts, evalmae_sequences);
        std::vector<double> preds, labels;
        std::vector<int> pred_classes, true_classes;
        int common_k = -1;
        for (std::size_t v = 0; v < gts.size(); ++v) {
            const VideoGroundTruth& gt = gts[v];
            if (!aligned[v])
                throw DataError(evalmae_sequences + ": no sequence for video '" + gt.video_id + "'");
            const VideoSequence& vs = *aligned[v];
            if (vs.seq.size() != gt.num_frames)
                throw DataError(evalmae_sequences + ": video '" + gt.video_id + "' has " +
                                std::to_string(vs.seq.size()) + " frames, annotations say " +
                                std::to_string(gt.num_frames));
            if (common_k < 0) common_k = vs.seq.K;
            if (vs.seq.K != common_k)
                throw DataError(evalmae_sequences + ": videos disagree on the rank count K");
            ProgressionConfig cfg;
            cfg.K = vs.seq.K;
            for (const ActionSegment& seg : gt.segments) {
                if (!seg.complete) continue;
                if (seg.class_id >= vs.scores.num_classes)
                    throw DataError(evalmae_annotations + ": video '" + gt.video_id +
                                    "' class id " + std::to_string(seg.class_id) +
                                    " exceeds the sequence file's " +
                                    std::to_string(vs.scores.num_classes) + " classes");
                for (const FrameLabel& fl : generate_labels(seg, cfg)) {
                    preds.push_back(vs.seq.values[static_cast<std::size_t>(fl.frame)]);
                    labels.push_back(static_cast<double>(fl.rank));
                }
                for (std::int64_t t = seg.start; t <= seg.end; ++t) {
                    int best = 0;
                    for (int c = 1; c < vs.scores.num_classes; ++c)
                        if (vs.scores.at(t, c) > vs.scores.at(t, best)) best = c;
                    pred_classes.push_back(best);
                    true_classes.push_back(seg.class_id);
                }
            }
        }
        if (preds.empty())
            throw DataError(evalmae_annotations + ": no complete segments to evaluate");
        EvalReport report;
        report.mae = mae(preds, labels, common_k);
        report.accuracy = top1_accuracy(pred_classes, true_classes);
        const std::string out = out_path(out_dir, "report.json");
        write_report(out, report);
        std::cout << format_report(report) << "wrote " << out << "\n";
    });

    // ---- train-toy
    auto* train_cmd = app.add_subcommand("train-toy", "gradient-descent training on synthetic features");
    train_cmd->fallthrough();
    std::string train_method = "threshold";
    std::string train_decode = "expectation";
    SyntheticFeatureSpec train_spec;
    int train_classes = 5, train_samples = 4000, train_test_samples = 2000;
    TrainConfig train_cfg;
    train_cmd->add_option("--method", train_method, "ordinal method")
        ->check(CLI::IsMember({"regression", "nominal", "cost_sensitive", "binary_decomposition",
                               "threshold"}))
        ->capture_default_str();
    train_cmd->add_option("--decode", train_decode, "decode mode for nominal/cost-sensitive")
        ->check(CLI::IsMember({"argmax", "expectation"}))->capture_default_str();
    train_cmd->add_option("--dim", train_spec.dim, "feature dimension")->capture_default_str();
    train_cmd->add_option("--embed-seed", train_spec.embed_seed, "feature embedding seed")->capture_default_str();
    train_cmd->add_option("--feature-noise", train_spec.feature_noise_sigma, "feature noise sigma")->capture_default_str();
    train_cmd->add_option("--classes", train_classes, "action classes")->capture_default_str();
    train_cmd->add_option("--samples", train_samples, "training samples")->capture_default_str();
    train_cmd->add_option("--test-samples", train_test_samples, "held-out samples")->capture_default_str();
    train_cmd->add_option("--hidden", train_cfg.hidden_units, "hidden units (0 = linear)")->capture_default_str();
    train_cmd->add_option("--lr", train_cfg.learning_rate, "learning rate")->capture_default_str();
    train_cmd->add_option("--momentum", train_cfg.momentum, "momentum coefficient")->capture_default_str();
    train_cmd->add_option("--epochs", train_cfg.epochs, "training epochs")->capture_default_str();
    train_cmd->add_option("--batch", train_cfg.batch_size, "batch size (0 = full batch)")->capture_default_str();
    bool train_binary_mean = false;
    train_cmd->add_flag("--binary-mean", train_binary_mean,
                        "average the binary-decomposition loss over ranks");
    train_cmd->callback([&] {
        train_cfg.codec.K = K;
        train_cfg.codec.method = method_map().at(train_method);
        train_cfg.codec.decode_mode =
            train_decode == "argmax" ? DecodeMode::ArgMax : DecodeMode::Expectation;
        train_cfg.codec.binary_mean_reduction = train_binary_mean;
        train_cfg.seed = derive_seed(seed, 3);
        FeatureEmbedding embedding(train_spec, K, train_classes);
        const ToyDataset train_set = make_toy_dataset(embedding, train_samples, derive_seed(seed, 1));
        const ToyDataset test_set =
            make_toy_dataset(embedding, train_test_samples, derive_seed(seed, 2));
        const TrainResult res = train(train_set, train_cfg, &test_set);
        ordered_json root;
        root["method"] = train_method;
        root["k"] = K;
        root["epochs"] = train_cfg.epochs;
        root["final_mae"] = res.final_mae;
        root["epoch_loss"] = res.epoch_loss;
        root["epoch_mae"] = res.epoch_mae;
        const std::string out = out_path(out_dir, "training.json");
        atomic_write(out, root.dump(2) + "\n");
        std::cout << "final MAE " << res.final_mae << " after " << train_cfg.epochs
                  << " epochs\nwrote " << out << "\n";
    });

    // ---- compare-methods
    auto* cmp_cmd = app.add_subcommand("compare-methods", "train all five heads on identical data");
    cmp_cmd->fallthrough();
    CompareConfig cmp;
    DetectorCliOpts cmp_det;
    cmp_cmd->add_option("--dim", cmp.features.dim, "feature dimension")->capture_default_str();
    cmp_cmd->add_option("--embed-seed", cmp.features.embed_seed, "feature embedding seed")->capture_default_str();
    cmp_cmd->add_option("--feature-noise", cmp.features.feature_noise_sigma, "feature noise sigma")->capture_default_str();
    cmp_cmd->add_option("--classes", cmp.num_classes, "action classes")->capture_default_str();
    cmp_cmd->add_option("--train-samples", cmp.train_samples, "training samples")->capture_default_str();
    cmp_cmd->add_option("--test-samples", cmp.test_samples, "held-out samples")->capture_default_str();
    cmp_cmd->add_option("--epochs", cmp.base_train.epochs, "training epochs")->capture_default_str();
    cmp_cmd->add_option("--hidden", cmp.base_train.hidden_units, "hidden units")->capture_default_str();
    cmp_cmd->add_option("--momentum", cmp.base_train.momentum, "momentum coefficient")->capture_default_str();
    cmp_cmd->add_option("--batch", cmp.base_train.batch_size, "batch size")->capture_default_str();
    cmp_cmd->add_option("--lr-regression", cmp.learning_rates[0],
                        "regression head learning rate")->capture_default_str();
    cmp_cmd->add_option("--lr-nominal", cmp.learning_rates[1],
                        "nominal classification head learning rate")->capture_default_str();
    cmp_cmd->add_option("--lr-cost-sensitive", cmp.learning_rates[2],
                        "cost-sensitive head learning rate")->capture_default_str();
    cmp_cmd->add_option("--lr-binary", cmp.learning_rates[3],
                        "binary decomposition head learning rate")->capture_default_str();
    cmp_cmd->add_option("--lr-threshold", cmp.learning_rates[4],
                        "threshold model head learning rate")->capture_default_str();
    cmp_cmd->add_option("--videos", cmp.num_eval_videos, "evaluation videos")->capture_default_str();
    cmp_cmd->add_option("--frames", cmp.sim.num_frames, "frames per evaluation video")->capture_default_str();
    cmp_cmd->add_option("--actions", cmp.sim.num_actions, "actions per evaluation video")->capture_default_str();
    cmp_cmd->add_option("--sim-min-len", cmp.sim.min_action_length, "minimum action length")->capture_default_str();
    cmp_cmd->add_option("--sim-max-len", cmp.sim.max_action_length, "maximum action length")->capture_default_str();
    add_detector_options(cmp_cmd, cmp_det, false);
    cmp_cmd->callback([&] {
        cmp.K = K;
        cmp.seed = seed;
        cmp.sim.video_id = "cmp";
        cmp.detector = resolve_detector(cmp_det);
        const Comparison comparison = compare_methods(cmp);
        ordered_json rows = ordered_json::array();
        for (const MethodResult& row : comparison.rows)
            rows.push_back({{"method", method_name(row.method)},
                            {"mae", row.mae},
                            {"map_at_05", row.map_at_05}});
        ordered_json root;
        root["k"] = K;
        root["rows"] = std::move(rows);
        const std::string out = out_path(out_dir, "comparison.json");
        atomic_write(out, root.dump(2) + "\n");
        std::cout << format_comparison(comparison) << "wrote " << out << "\n";
    });

    // ---- report
    auto* report_cmd = app.add_subcommand("report", "merge evaluation reports into one table");
    report_cmd->fallthrough();
    std::vector<std::string> report_inputs;
    report_cmd->add_option("--in", report_inputs, "report files to merge")->required();
    report_cmd->callback([&] {
        EvalReport merged;
        for (const std::string& path : report_inputs) {
            const EvalReport r = read_report(path);
            if (r.mae) merged.mae = r.mae;
            if (r.accuracy) merged.accuracy = r.accuracy;
            for (const auto& [an, v] : r.ar_at_an) merged.ar_at_an[an] = v;
            for (const auto& [iou, v] : r.map_at_iou) merged.map_at_iou[iou] = v;
        }
        const std::string out = out_path(out_dir, "report.json");
        write_report(out, merged);
        std::cout << format_report(merged) << "wrote " << out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace progdet
