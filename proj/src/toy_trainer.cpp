#include "progdet/toy_trainer.hpp"

#include "progdet/detection_engine.hpp"
#include "progdet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace progdet {

namespace {

constexpr std::size_t kCalibrationSamples = 2048;

void check_train_config(const TrainConfig& c) {
    if (c.codec.K < 1) throw DataError("train config: K must be >= 1");
    if (!(c.learning_rate > 0.0)) throw DataError("train config: learning rate must be positive");
    if (c.momentum < 0.0 || c.momentum >= 1.0) throw DataError("train config: momentum outside [0, 1)");
    if (c.epochs < 0) throw DataError("train config: epochs must be >= 0");
    if (c.batch_size < 0) throw DataError("train config: batch_size must be >= 0");
    if (c.hidden_units < 0) throw DataError("train config: hidden_units must be >= 0");
}

// logits; optionally exposes the hidden activation for backprop
std::vector<double> forward_impl(const ToyHead& head, const std::vector<double>& x,
                                 std::vector<double>* hidden_out) {
    if (static_cast<int>(x.size()) != head.input_dim)
        throw DataError("head forward: feature size " + std::to_string(x.size()) +
                        " does not match input_dim " + std::to_string(head.input_dim));
    std::vector<double> h;
    const std::vector<double>* v = &x;
    int vin = head.input_dim;
    if (head.hidden_units > 0) {
        h.resize(static_cast<std::size_t>(head.hidden_units));
        for (int k = 0; k < head.hidden_units; ++k) {
            double z = head.b1[static_cast<std::size_t>(k)];
            const double* row = head.w1.data() + static_cast<std::size_t>(k) * head.input_dim;
            for (int i = 0; i < head.input_dim; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
            h[static_cast<std::size_t>(k)] = std::tanh(z);
        }
        v = &h;
        vin = head.hidden_units;
    }
    const std::vector<double>& fw = head.hidden_units > 0 ? head.w2 : head.w1;
    std::vector<double> out(static_cast<std::size_t>(head.output_dim));
    if (head.method == OrdinalMethod::ThresholdModel) {
        double z = 0.0;
        for (int k = 0; k < vin; ++k) z += fw[static_cast<std::size_t>(k)] * (*v)[static_cast<std::size_t>(k)];
        for (int j = 0; j < head.output_dim; ++j) out[static_cast<std::size_t>(j)] = z + head.b2[static_cast<std::size_t>(j)];
    } else {
        for (int r = 0; r < head.output_rows; ++r) {
            double z = 0.0;
            const double* row = fw.data() + static_cast<std::size_t>(r) * vin;
            for (int k = 0; k < vin; ++k) z += row[k] * (*v)[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(r)] = z + head.b2[static_cast<std::size_t>(r)];
        }
    }
    if (hidden_out) *hidden_out = std::move(h);
    return out;
}

struct Grads {
    std::vector<double> w1, b1, w2, b2;
    explicit Grads(const ToyHead& head)
        : w1(head.w1.size(), 0.0), b1(head.b1.size(), 0.0), w2(head.w2.size(), 0.0),
          b2(head.b2.size(), 0.0) {}
    void reset() {
        std::fill(w1.begin(), w1.end(), 0.0);
        std::fill(b1.begin(), b1.end(), 0.0);
        std::fill(w2.begin(), w2.end(), 0.0);
        std::fill(b2.begin(), b2.end(), 0.0);
    }
};

void accumulate_backward(const ToyHead& head, const std::vector<double>& x,
                         const std::vector<double>& h, const std::vector<double>& g, Grads& grads) {
    std::vector<double> dz(static_cast<std::size_t>(head.output_rows), 0.0);
    if (head.method == OrdinalMethod::ThresholdModel) {
        double s = 0.0;
        for (int j = 0; j < head.output_dim; ++j) {
            s += g[static_cast<std::size_t>(j)];
            grads.b2[static_cast<std::size_t>(j)] += g[static_cast<std::size_t>(j)];
        }
        dz[0] = s;
    } else {
        for (int r = 0; r < head.output_rows; ++r) {
            dz[static_cast<std::size_t>(r)] = g[static_cast<std::size_t>(r)];
            grads.b2[static_cast<std::size_t>(r)] += g[static_cast<std::size_t>(r)];
        }
    }
    const bool hidden = head.hidden_units > 0;
    const std::vector<double>& v = hidden ? h : x;
    const int vin = hidden ? head.hidden_units : head.input_dim;
    std::vector<double>& gfw = hidden ? grads.w2 : grads.w1;
    const std::vector<double>& fw = hidden ? head.w2 : head.w1;
    for (int r = 0; r < head.output_rows; ++r) {
        const double d = dz[static_cast<std::size_t>(r)];
        if (d == 0.0) continue;
        double* grow = gfw.data() + static_cast<std::size_t>(r) * vin;
        for (int k = 0; k < vin; ++k) grow[k] += d * v[static_cast<std::size_t>(k)];
    }
    if (hidden) {
        for (int k = 0; k < head.hidden_units; ++k) {
            double dv = 0.0;
            for (int r = 0; r < head.output_rows; ++r)
                dv += dz[static_cast<std::size_t>(r)] * fw[static_cast<std::size_t>(r) * vin + k];
            const double hk = h[static_cast<std::size_t>(k)];
            const double dpre = dv * (1.0 - hk * hk);
            grads.b1[static_cast<std::size_t>(k)] += dpre;
            double* grow = grads.w1.data() + static_cast<std::size_t>(k) * head.input_dim;
            for (int i = 0; i < head.input_dim; ++i) grow[i] += dpre * x[static_cast<std::size_t>(i)];
        }
    }
}

void apply_update(std::vector<double>& param, std::vector<double>& velocity,
                  const std::vector<double>& grad, double lr, double momentum, double inv_batch) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        velocity[i] = momentum * velocity[i] - lr * grad[i] * inv_batch;
        param[i] += velocity[i];
    }
}

double dataset_mae(const ToyHead& head, const ProgressionConfig& cfg, const ToyDataset& data) {
    std::vector<double> preds, labels;
    preds.reserve(data.samples.size());
    labels.reserve(data.samples.size());
    for (const ToySample& s : data.samples) {
        preds.push_back(decode(HeadOutput{head.method, forward_impl(head, s.features, nullptr)}, cfg));
        labels.push_back(static_cast<double>(s.rank));
    }
    return mae(preds, labels, cfg.K);
}

// mean and population std of final-layer inputs dotted with `row`
std::pair<double, double> response_stats(const std::vector<std::vector<double>>& inputs,
                                         const double* row, int dim) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& v : inputs) {
        double r = 0.0;
        for (int i = 0; i < dim; ++i) r += row[i] * v[static_cast<std::size_t>(i)];
        sum += r;
        sum2 += r * r;
    }
    const double n = static_cast<double>(inputs.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var)};
}

}  // namespace

FeatureEmbedding::FeatureEmbedding(const SyntheticFeatureSpec& spec, int K, int num_classes)
    : spec_(spec), K_(K), num_classes_(num_classes) {
    if (spec.dim < 2) throw DataError("feature spec: dim must be >= 2");
    if (K < 1) throw DataError("feature embedding: K must be >= 1");
    if (num_classes < 1) throw DataError("feature embedding: need at least 1 class");
    if (spec.feature_noise_sigma < 0.0) throw DataError("feature spec: noise sigma must be >= 0");
    Rng rng(spec.embed_seed);
    const int cols = 1 + num_classes;
    weights_.resize(static_cast<std::size_t>(spec.dim) * cols);
    for (double& w : weights_) w = rng.normal(0.0, 1.0);
    if (std::fabs(weights_[0]) < 0.5) weights_[0] = std::copysign(0.5, weights_[0]);
    bias_.resize(static_cast<std::size_t>(spec.dim));
    for (double& b : bias_) b = rng.normal(0.0, 1.0);
}

std::vector<double> FeatureEmbedding::clean(int rank, int class_id) const {
    if (rank < 0 || rank > K_) throw DataError("embed: rank outside [0, K]");
    if (class_id < 0 || class_id >= num_classes_) throw DataError("embed: class id out of range");
    const int cols = 1 + num_classes_;
    const double p = static_cast<double>(rank) / K_;
    std::vector<double> x(static_cast<std::size_t>(spec_.dim));
    for (int d = 0; d < spec_.dim; ++d) {
        const double* row = weights_.data() + static_cast<std::size_t>(d) * cols;
        x[static_cast<std::size_t>(d)] = row[0] * p + row[1 + class_id] + bias_[static_cast<std::size_t>(d)];
    }
    return x;
}

std::vector<double> FeatureEmbedding::noisy(int rank, int class_id, Rng& rng) const {
    std::vector<double> x = clean(rank, class_id);
    for (double& v : x) v += rng.normal(0.0, spec_.feature_noise_sigma);
    return x;
}

std::vector<double> make_features(int rank, int class_id, const FeatureEmbedding& embedding,
                                  Rng& rng) {
    return embedding.noisy(rank, class_id, rng);
}

ToyDataset make_toy_dataset(const FeatureEmbedding& embedding, int num_samples, std::uint64_t seed) {
    if (num_samples < 1) throw DataError("toy dataset: num_samples must be >= 1");
    ToyDataset data;
    data.K = embedding.max_rank();
    data.num_classes = embedding.num_classes();
    data.dim = embedding.dim();
    data.samples.reserve(static_cast<std::size_t>(num_samples));
    Rng rng(seed);
    for (int i = 0; i < num_samples; ++i) {
        ToySample s;
        s.rank = static_cast<int>(rng.uniform_int(0, embedding.max_rank()));
        s.class_id = static_cast<int>(rng.uniform_int(0, embedding.num_classes() - 1));
        s.features = embedding.noisy(s.rank, s.class_id, rng);
        data.samples.push_back(std::move(s));
    }
    return data;
}

HeadOutput ToyHead::forward(const std::vector<double>& x) const {
    return {method, forward_impl(*this, x, nullptr)};
}

ToyHead init_head(const ToyDataset& data, const TrainConfig& config) {
    check_train_config(config);
    if (data.samples.empty()) throw DataError("init_head: empty dataset");
    if (data.K != config.codec.K)
        throw DataError("init_head: dataset K " + std::to_string(data.K) +
                        " does not match codec K " + std::to_string(config.codec.K));

    ToyHead head;
    head.method = config.codec.method;
    head.K = config.codec.K;
    head.input_dim = data.dim;
    head.hidden_units = config.hidden_units;
    head.output_dim = static_cast<int>(expected_output_size(config.codec));
    const bool coral = head.method == OrdinalMethod::ThresholdModel;
    head.output_rows = coral ? 1 : head.output_dim;

    Rng rng(config.seed);
    const bool hidden = head.hidden_units > 0;
    if (hidden) {
        head.w1.resize(static_cast<std::size_t>(head.hidden_units) * head.input_dim);
        const double scale = 1.0 / std::sqrt(static_cast<double>(head.input_dim));
        for (double& w : head.w1) w = rng.normal(0.0, 1.0) * scale;
        head.b1.assign(static_cast<std::size_t>(head.hidden_units), 0.0);
    }

    // raw final-layer rows; binary decomposition shares one raw "yes" row
    const int fin = hidden ? head.hidden_units : head.input_dim;
    const bool binary = head.method == OrdinalMethod::BinaryDecomposition;
    const int raw_rows = (coral || binary) ? 1 : head.output_rows;
    std::vector<double> raw(static_cast<std::size_t>(raw_rows) * fin);
    for (double& w : raw) w = rng.normal(0.0, 1.0);

    head.b2.assign(static_cast<std::size_t>(head.output_dim), 0.0);
    std::vector<double> raw_bias;
    if (coral || binary) {
        raw_bias.resize(static_cast<std::size_t>(head.K));
        for (double& b : raw_bias) b = rng.normal(0.0, 1.0);
    }

    // calibration inputs: final-layer view of the first few samples
    const std::size_t n_cal = std::min(kCalibrationSamples, data.samples.size());
    std::vector<std::vector<double>> inputs;
    inputs.reserve(n_cal);
    for (std::size_t i = 0; i < n_cal; ++i) {
        const std::vector<double>& x = data.samples[i].features;
        if (static_cast<int>(x.size()) != data.dim)
            throw DataError("init_head: sample " + std::to_string(i) + " has wrong feature size");
        if (!hidden) {
            inputs.push_back(x);
        } else {
            std::vector<double> h(static_cast<std::size_t>(head.hidden_units));
            for (int k = 0; k < head.hidden_units; ++k) {
                double z = head.b1[static_cast<std::size_t>(k)];
                const double* row = head.w1.data() + static_cast<std::size_t>(k) * head.input_dim;
                for (int i2 = 0; i2 < head.input_dim; ++i2) z += row[i2] * x[static_cast<std::size_t>(i2)];
                h[static_cast<std::size_t>(k)] = std::tanh(z);
            }
            inputs.push_back(std::move(h));
        }
    }

    // Spread calibration. Targets were fixed empirically so an untrained head
    // decodes near-uniformly over ranks (MAE about the 33.33 baseline):
    // regression responses ~ (0.5, 0.32); threshold/binary latent z ~ (0, 1)
    // with N(0,1) rank biases; nominal/cost-sensitive rows ~ (0, 30).
    std::vector<double>& fw = hidden ? head.w2 : head.w1;
    switch (head.method) {
        case OrdinalMethod::Regression: {
            auto [m, s] = response_stats(inputs, raw.data(), fin);
            const double scale = s > 1e-12 ? 0.32 / s : 1.0;
            fw.resize(static_cast<std::size_t>(fin));
            for (int i = 0; i < fin; ++i) fw[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>(i)] * scale;
            head.b2[0] = 0.5 - scale * m;
            break;
        }
        case OrdinalMethod::ThresholdModel: {
            auto [m, s] = response_stats(inputs, raw.data(), fin);
            const double scale = s > 1e-12 ? 1.0 / s : 1.0;
            fw.resize(static_cast<std::size_t>(fin));
            for (int i = 0; i < fin; ++i) fw[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>(i)] * scale;
            for (int j = 0; j < head.K; ++j) head.b2[static_cast<std::size_t>(j)] = raw_bias[static_cast<std::size_t>(j)] - scale * m;
            break;
        }
        case OrdinalMethod::BinaryDecomposition: {
            auto [m, s] = response_stats(inputs, raw.data(), fin);
            const double scale = s > 1e-12 ? 1.0 / s : 1.0;
            fw.assign(static_cast<std::size_t>(head.output_rows) * fin, 0.0);
            for (int j = 0; j < head.K; ++j) {
                double* yes_row = fw.data() + static_cast<std::size_t>(2 * j) * fin;
                for (int i = 0; i < fin; ++i) yes_row[i] = raw[static_cast<std::size_t>(i)] * scale;
                head.b2[static_cast<std::size_t>(2 * j)] = raw_bias[static_cast<std::size_t>(j)] - scale * m;
            }
            break;
        }
        case OrdinalMethod::NominalClassification:
        case OrdinalMethod::CostSensitive: {
            fw.resize(static_cast<std::size_t>(head.output_rows) * fin);
            for (int r = 0; r < head.output_rows; ++r) {
                const double* rrow = raw.data() + static_cast<std::size_t>(r) * fin;
                auto [m, s] = response_stats(inputs, rrow, fin);
                const double scale = s > 1e-12 ? 30.0 / s : 1.0;
                double* row = fw.data() + static_cast<std::size_t>(r) * fin;
                for (int i = 0; i < fin; ++i) row[i] = rrow[i] * scale;
                head.b2[static_cast<std::size_t>(r)] = -scale * m;
            }
            break;
        }
    }
    if (!hidden) head.w2.clear();
    return head;
}

TrainResult train(const ToyDataset& data, const TrainConfig& config, const ToyDataset* val) {
    check_train_config(config);
    if (data.samples.empty()) throw DataError("train: empty dataset");
    const ProgressionConfig& cfg = config.codec;

    TrainResult result;
    result.head = init_head(data, config);
    ToyHead& head = result.head;
    const ToyDataset& eval_set = val ? *val : data;

    std::vector<OrdinalTarget> targets;
    targets.reserve(data.samples.size());
    for (const ToySample& s : data.samples) targets.push_back(encode_target(s.rank, cfg));

    Grads grads(head);
    Grads velocity(head);  // zero-initialized buffers of matching shape
    Rng shuffle_rng(derive_seed(config.seed, 0xA5u));

    const std::size_t n = data.samples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = config.batch_size == 0 ? n : static_cast<std::size_t>(config.batch_size);

    result.epoch_mae.push_back(dataset_mae(head, cfg, eval_set));

    std::vector<double> h;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.batch_size != 0) {
            for (std::size_t i = n; i-- > 1;) {
                const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i)));
                std::swap(order[i], order[j]);
            }
        }
        double epoch_loss_sum = 0.0;
        for (std::size_t begin = 0; begin < n; begin += batch) {
            const std::size_t end = std::min(begin + batch, n);
            grads.reset();
            double batch_loss = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const ToySample& s = data.samples[order[i]];
                std::vector<double> out = forward_impl(head, s.features, &h);
                LossGrad lg = compute_loss(HeadOutput{head.method, std::move(out)},
                                           targets[order[i]], cfg);
                batch_loss += lg.loss;
                accumulate_backward(head, s.features, h, lg.grad, grads);
            }
            if (!std::isfinite(batch_loss))
                throw DataError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
            epoch_loss_sum += batch_loss;
            const double inv = 1.0 / static_cast<double>(end - begin);
            apply_update(head.w1, velocity.w1, grads.w1, config.learning_rate, config.momentum, inv);
            apply_update(head.b1, velocity.b1, grads.b1, config.learning_rate, config.momentum, inv);
            apply_update(head.w2, velocity.w2, grads.w2, config.learning_rate, config.momentum, inv);
            apply_update(head.b2, velocity.b2, grads.b2, config.learning_rate, config.momentum, inv);
        }
        result.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(n));
        result.epoch_mae.push_back(dataset_mae(head, cfg, eval_set));
    }

    // closing loss so the recorded curve covers the final parameters too
    double final_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const ToySample& s = data.samples[i];
        LossGrad lg = compute_loss(HeadOutput{head.method, forward_impl(head, s.features, nullptr)},
                                   targets[i], cfg);
        final_loss += lg.loss;
    }
    if (!std::isfinite(final_loss))
        throw DataError("training diverged: non-finite loss at epoch " + std::to_string(config.epochs));
    result.epoch_loss.push_back(final_loss / static_cast<double>(n));
    result.final_mae = result.epoch_mae.back();
    return result;
}

double predict_rank(const ToyHead& head, const ProgressionConfig& cfg,
                    const std::vector<double>& features) {
    return decode(HeadOutput{head.method, forward_impl(head, features, nullptr)}, cfg);
}

ProgressionSequence predict_sequence(const ToyHead& head, const ProgressionConfig& cfg,
                                     const std::vector<std::vector<double>>& frame_features) {
    ProgressionSequence seq;
    seq.K = cfg.K;
    seq.values.reserve(frame_features.size());
    for (const auto& x : frame_features) seq.values.push_back(predict_rank(head, cfg, x));
    return seq;
}

const char* method_name(OrdinalMethod method) {
    switch (method) {
        case OrdinalMethod::Regression: return "regression";
        case OrdinalMethod::NominalClassification: return "nominal";
        case OrdinalMethod::CostSensitive: return "cost_sensitive";
        case OrdinalMethod::BinaryDecomposition: return "binary_decomposition";
        case OrdinalMethod::ThresholdModel: return "threshold";
    }
    return "unknown";
}

Comparison compare_methods(const CompareConfig& config) {
    if (config.num_eval_videos < 1) throw DataError("compare: need at least one eval video");
    FeatureEmbedding embedding(config.features, config.K, config.num_classes);
    const ToyDataset train_set =
        make_toy_dataset(embedding, config.train_samples, derive_seed(config.seed, 1));
    const ToyDataset test_set =
        make_toy_dataset(embedding, config.test_samples, derive_seed(config.seed, 2));

    // shared evaluation videos + per-frame features (identical across methods)
    std::vector<SimInstance> videos;
    std::vector<std::vector<std::vector<double>>> features;
    std::vector<VideoGroundTruth> gts;
    for (int v = 0; v < config.num_eval_videos; ++v) {
        SimConfig sc = config.sim;
        sc.K = config.K;
        sc.num_classes = config.num_classes;
        sc.incomplete_fraction = 0.0;  // method ranking uses complete actions only
        sc.seed = derive_seed(config.seed, 100 + static_cast<std::uint64_t>(v));
        sc.video_id = config.sim.video_id + "-" + std::to_string(v);
        videos.push_back(simulate(sc));
        const SimInstance& inst = videos.back();

        Rng frng(derive_seed(config.seed, 200 + static_cast<std::uint64_t>(v)));
        std::vector<std::vector<double>> frames;
        frames.reserve(static_cast<std::size_t>(sc.num_frames));
        std::vector<int> owner(static_cast<std::size_t>(sc.num_frames), -1);
        for (std::size_t s = 0; s < inst.gt.segments.size(); ++s)
            for (std::int64_t t = inst.gt.segments[s].start; t <= inst.gt.segments[s].end; ++t)
                owner[static_cast<std::size_t>(t)] = static_cast<int>(s);
        for (std::int64_t t = 0; t < sc.num_frames; ++t) {
            const int o = owner[static_cast<std::size_t>(t)];
            int rank, cls;
            if (o >= 0) {
                const ActionSegment& seg = inst.gt.segments[static_cast<std::size_t>(o)];
                const std::int64_t l = seg.length();
                rank = static_cast<int>(std::llround(static_cast<double>(config.K) *
                                                     static_cast<double>(t - seg.start) /
                                                     static_cast<double>(l - 1)));
                cls = seg.class_id;
            } else {
                rank = static_cast<int>(frng.uniform_int(0, config.K));
                cls = static_cast<int>(frng.uniform_int(0, config.num_classes - 1));
            }
            frames.push_back(embedding.noisy(rank, cls, frng));
        }
        features.push_back(std::move(frames));
        gts.push_back(inst.gt);
    }

    const OrdinalMethod methods[] = {
        OrdinalMethod::Regression, OrdinalMethod::NominalClassification,
        OrdinalMethod::CostSensitive, OrdinalMethod::BinaryDecomposition,
        OrdinalMethod::ThresholdModel};

    Comparison out;
    for (OrdinalMethod m : methods) {
        TrainConfig tc = config.base_train;
        tc.codec.method = m;
        tc.codec.K = config.K;
        tc.learning_rate = config.learning_rates[static_cast<std::size_t>(m)];
        tc.seed = derive_seed(config.seed, 3);  // matched init/shuffle seed for every head
        TrainResult tr = train(train_set, tc, &test_set);

        std::vector<std::vector<Detection>> dets;
        for (int v = 0; v < config.num_eval_videos; ++v) {
            ProgressionSequence seq =
                predict_sequence(tr.head, tc.codec, features[static_cast<std::size_t>(v)]);
            dets.push_back(detect(seq, videos[static_cast<std::size_t>(v)].scores, config.detector));
        }
        const double map05 = mean_average_precision(dets, gts, {0.5}).at(0.5);
        out.rows.push_back({m, tr.final_mae, map05});
    }
    return out;
}

std::string format_comparison(const Comparison& comparison) {
    std::size_t width = std::string("method").size();
    for (const MethodResult& row : comparison.rows)
        width = std::max(width, std::string(method_name(row.method)).size());
    std::ostringstream os;
    os << "method" << std::string(width - 6 + 2, ' ') << "     MAE  mAP@0.50\n";
    for (const MethodResult& row : comparison.rows) {
        const std::string name = method_name(row.method);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%8.4f  %8.4f", row.mae, row.map_at_05);
        os << name << std::string(width - name.size() + 2, ' ') << buf << "\n";
    }
    return os.str();
}

}  // namespace progdet
