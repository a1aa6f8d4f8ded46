#include "invc/nn.hpp"

#include "binio.hpp"
#include "invc/errors.hpp"
#include "invc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <thread>

namespace invc {

namespace {

constexpr char kMagic[4] = {'I', 'N', 'V', 'W'};
constexpr std::uint32_t kVersion = 1;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// acc[0..n) += a * row[0..n); the elementwise form keeps the accumulation
// order fixed while still vectorizing.
inline void axpy(double* __restrict acc, double a, const double* __restrict row, int n) {
    for (int i = 0; i < n; ++i) acc[i] += a * row[i];
}

// fixed-order dot product with four independent partial sums
inline double dot(const double* __restrict a, const double* __restrict b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    SplitMix64 rng(seed ^ salt);
    return rng.next();
}

} // namespace

double* LstmStack::tensor(const std::string& name) {
    return params.data() + tensor_info(name).offset;
}

const double* LstmStack::tensor(const std::string& name) const {
    return params.data() + tensor_info(name).offset;
}

const TensorInfo& LstmStack::tensor_info(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw IndexOutOfRange("no tensor named " + name);
}

LstmStack make_stack(int layers, int units) {
    if (layers < 1 || units < 1)
        throw IndexOutOfRange("stack needs at least 1 layer and 1 unit");
    LstmStack s;
    s.layers = layers;
    s.units = units;

    const auto u = static_cast<std::uint32_t>(units);
    std::size_t offset = 0;
    auto add = [&](const std::string& name, std::vector<std::uint32_t> dims) {
        TensorInfo info;
        info.name = name;
        info.dims = std::move(dims);
        info.offset = offset;
        info.size = 1;
        for (auto d : info.dims) info.size *= d;
        offset += info.size;
        s.tensors.push_back(std::move(info));
    };
    for (int l = 0; l < layers; ++l) {
        const auto in = static_cast<std::uint32_t>(s.input_dim(l));
        const std::string prefix = "layer" + std::to_string(l) + ".";
        add(prefix + "w_x", {in, 4 * u});
        add(prefix + "w_h", {u, 4 * u});
        add(prefix + "b", {4 * u});
    }
    add("head.w", {u});
    add("head.b", {1});
    s.params.assign(offset, 0.0);
    return s;
}

LstmStack init_params(int layers, int units, std::uint64_t seed) {
    LstmStack s = make_stack(layers, units);
    SplitMix64 rng(seed);

    const int u = units;
    for (int l = 0; l < layers; ++l) {
        const int in = s.input_dim(l);
        // one Glorot limit for the combined (in + units) x 4*units kernel
        const double limit = std::sqrt(6.0 / static_cast<double>(in + u + 4 * u));
        const std::string prefix = "layer" + std::to_string(l) + ".";
        double* wx = s.tensor(prefix + "w_x");
        for (std::size_t i = 0; i < s.tensor_info(prefix + "w_x").size; ++i)
            wx[i] = rng.next_uniform(-limit, limit);
        double* wh = s.tensor(prefix + "w_h");
        for (std::size_t i = 0; i < s.tensor_info(prefix + "w_h").size; ++i)
            wh[i] = rng.next_uniform(-limit, limit);
        double* b = s.tensor(prefix + "b");
        for (int k = 0; k < u; ++k) b[u + k] = 1.0; // forget-gate bias
    }
    const double head_limit = std::sqrt(6.0 / static_cast<double>(u + 1));
    double* hw = s.tensor("head.w");
    for (int k = 0; k < u; ++k) hw[k] = rng.next_uniform(-head_limit, head_limit);
    return s;
}

std::vector<double> forward(const LstmStack& stack, const std::vector<double>& audio,
                            ForwardCache* cache) {
    const int L = stack.layers;
    const int U = stack.units;
    const int G = 4 * U;
    const std::size_t T = audio.size();
    if (T == 0) throw EmptyInput("forward: empty segment");

    std::vector<const double*> wx(L), wh(L), b(L);
    for (int l = 0; l < L; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        wx[l] = stack.tensor(prefix + "w_x");
        wh[l] = stack.tensor(prefix + "w_h");
        b[l] = stack.tensor(prefix + "b");
    }
    const double* head_w = stack.tensor("head.w");
    const double head_b = *stack.tensor("head.b");

    if (cache) {
        cache->input = audio;
        cache->steps = T;
        cache->layers.assign(static_cast<std::size_t>(L), {});
        for (auto& lc : cache->layers) {
            lc.gates.resize(T * static_cast<std::size_t>(G));
            lc.c.resize(T * static_cast<std::size_t>(U));
            lc.tanh_c.resize(T * static_cast<std::size_t>(U));
            lc.h.resize(T * static_cast<std::size_t>(U));
        }
    }

    std::vector<double> h_state(static_cast<std::size_t>(L) * U, 0.0);
    std::vector<double> c_state(static_cast<std::size_t>(L) * U, 0.0);
    std::vector<double> acts(static_cast<std::size_t>(G));
    std::vector<double> gate_buf(static_cast<std::size_t>(G));
    std::vector<double> pred(T);

    for (std::size_t t = 0; t < T; ++t) {
        const double* x = &audio[t];
        int in_dim = 1;
        for (int l = 0; l < L; ++l) {
            double* h = &h_state[static_cast<std::size_t>(l) * U];
            double* c = &c_state[static_cast<std::size_t>(l) * U];

            std::copy(b[l], b[l] + G, acts.begin());
            for (int j = 0; j < in_dim; ++j) axpy(acts.data(), x[j], wx[l] + j * G, G);
            for (int j = 0; j < U; ++j) axpy(acts.data(), h[j], wh[l] + j * G, G);

            double* gates = cache ? &cache->layers[l].gates[t * G] : gate_buf.data();
            for (int k = 0; k < U; ++k) {
                const double ig = sigmoid(acts[k]);
                const double fg = sigmoid(acts[U + k]);
                const double gg = std::tanh(acts[2 * U + k]);
                const double og = sigmoid(acts[3 * U + k]);
                gates[k] = ig;
                gates[U + k] = fg;
                gates[2 * U + k] = gg;
                gates[3 * U + k] = og;

                const double cn = fg * c[k] + ig * gg;
                const double tc = std::tanh(cn);
                c[k] = cn;
                h[k] = og * tc;
                if (cache) {
                    cache->layers[l].c[t * U + k] = cn;
                    cache->layers[l].tanh_c[t * U + k] = tc;
                    cache->layers[l].h[t * U + k] = h[k];
                }
            }
            x = h;
            in_dim = U;
        }
        pred[t] = dot(head_w, &h_state[static_cast<std::size_t>(L - 1) * U], U) + head_b;
    }
    return pred;
}

double mse_loss(const std::vector<double>& prediction, const std::vector<double>& target) {
    if (prediction.size() != target.size() || prediction.empty())
        throw ShapeMismatch("mse_loss: prediction has " + std::to_string(prediction.size()) +
                            " samples, target " + std::to_string(target.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(prediction.size());
}

std::vector<double> mse_gradient(const std::vector<double>& prediction,
                                 const std::vector<double>& target) {
    if (prediction.size() != target.size() || prediction.empty())
        throw ShapeMismatch("mse_gradient: shape mismatch");
    std::vector<double> g(prediction.size());
    const double scale = 2.0 / static_cast<double>(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i)
        g[i] = scale * (prediction[i] - target[i]);
    return g;
}

void backward(const LstmStack& stack, const ForwardCache& cache,
              const std::vector<double>& dloss_dpred, std::vector<double>& grads) {
    const int L = stack.layers;
    const int U = stack.units;
    const int G = 4 * U;
    const std::size_t T = cache.steps;
    if (dloss_dpred.size() != T) throw ShapeMismatch("backward: gradient length != cached steps");
    if (grads.size() != stack.params.size())
        throw ShapeMismatch("backward: gradient buffer size != parameter count");

    std::vector<const double*> wx(L), wh(L);
    std::vector<double*> gwx(L), gwh(L), gb(L);
    for (int l = 0; l < L; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        wx[l] = stack.tensor(prefix + "w_x");
        wh[l] = stack.tensor(prefix + "w_h");
        gwx[l] = grads.data() + stack.tensor_info(prefix + "w_x").offset;
        gwh[l] = grads.data() + stack.tensor_info(prefix + "w_h").offset;
        gb[l] = grads.data() + stack.tensor_info(prefix + "b").offset;
    }
    const double* head_w = stack.tensor("head.w");
    double* ghead_w = grads.data() + stack.tensor_info("head.w").offset;
    double* ghead_b = grads.data() + stack.tensor_info("head.b").offset;

    // gradients carried backwards in time, per layer
    std::vector<double> dh_carry(static_cast<std::size_t>(L) * U, 0.0);
    std::vector<double> dc_carry(static_cast<std::size_t>(L) * U, 0.0);
    std::vector<double> incoming(static_cast<std::size_t>(U));
    std::vector<double> incoming_below(static_cast<std::size_t>(U));
    std::vector<double> da(static_cast<std::size_t>(G));

    for (std::size_t t = T; t-- > 0;) {
        const double dp = dloss_dpred[t];
        const double* h_top = &cache.layers[L - 1].h[t * U];
        *ghead_b += dp;
        axpy(ghead_w, dp, h_top, U);
        for (int k = 0; k < U; ++k) incoming[k] = dp * head_w[k];

        for (int l = L - 1; l >= 0; --l) {
            const auto& lc = cache.layers[l];
            const double* gates = &lc.gates[t * G];
            const double* tanh_c = &lc.tanh_c[t * U];
            const double* c_prev = t > 0 ? &lc.c[(t - 1) * U] : nullptr;
            const double* h_prev = t > 0 ? &lc.h[(t - 1) * U] : nullptr;
            const int in_dim = stack.input_dim(l);
            const double* x = l > 0 ? &cache.layers[l - 1].h[t * U] : &cache.input[t];

            double* dh = &dh_carry[static_cast<std::size_t>(l) * U];
            double* dc = &dc_carry[static_cast<std::size_t>(l) * U];
            for (int k = 0; k < U; ++k) {
                const double dht = dh[k] + incoming[k];
                const double ig = gates[k];
                const double fg = gates[U + k];
                const double gg = gates[2 * U + k];
                const double og = gates[3 * U + k];
                const double tc = tanh_c[k];

                const double dog = dht * tc;
                const double dct = dc[k] + dht * og * (1.0 - tc * tc);
                const double dig = dct * gg;
                const double dfg = dct * (t > 0 ? c_prev[k] : 0.0);
                const double dgg = dct * ig;

                dc[k] = dct * fg; // flows to t-1
                da[k] = dig * ig * (1.0 - ig);
                da[U + k] = dfg * fg * (1.0 - fg);
                da[2 * U + k] = dgg * (1.0 - gg * gg);
                da[3 * U + k] = dog * og * (1.0 - og);
            }

            axpy(gb[l], 1.0, da.data(), G);
            for (int j = 0; j < in_dim; ++j) axpy(gwx[l] + j * G, x[j], da.data(), G);
            if (t > 0)
                for (int j = 0; j < U; ++j) axpy(gwh[l] + j * G, h_prev[j], da.data(), G);

            for (int j = 0; j < U; ++j) dh[j] = dot(wh[l] + j * G, da.data(), G);
            if (l > 0) {
                for (int j = 0; j < U; ++j) incoming_below[j] = dot(wx[l] + j * G, da.data(), G);
                std::swap(incoming, incoming_below);
            }
        }
    }
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state) {
    if (grads.size() != params.size() || state.m.size() != params.size() ||
        state.v.size() != params.size())
        throw ShapeMismatch("adam_step: shape mismatch");

    state.step += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double mc = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double vc = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
        const double mhat = state.m[i] / mc;
        const double vhat = state.v[i] / vc;
        params[i] -= state.alpha * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

namespace {

std::vector<double> scaled_target(const SegmentPair& seg) {
    std::vector<double> y(seg.gesture.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = static_cast<double>(seg.gesture[i]) * kGestureScale;
    return y;
}

std::vector<double> segment_audio(const SegmentPair& seg) {
    return std::vector<double>(seg.audio.begin(), seg.audio.end());
}

// forward + backward for one segment; returns the segment's mean loss
double segment_pass(const LstmStack& stack, const SegmentPair& seg, ForwardCache& cache,
                    std::vector<double>& grads) {
    const std::vector<double> audio = segment_audio(seg);
    const std::vector<double> target = scaled_target(seg);
    const std::vector<double> pred = forward(stack, audio, &cache);
    const double loss = mse_loss(pred, target);
    backward(stack, cache, mse_gradient(pred, target), grads);
    return loss;
}

double split_mse(const LstmStack& stack, const Dataset& data, Split split) {
    const std::size_t n = data.split_size(split);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const SegmentPair& seg = data.segment(split, i);
        const std::vector<double> pred = forward(stack, segment_audio(seg));
        acc += mse_loss(pred, scaled_target(seg));
    }
    return acc / static_cast<double>(n);
}

// Batch gradient (mean over segments). Sequential mode accumulates in
// segment order; threaded mode accumulates per-thread over contiguous
// blocks and reduces in thread order, which stays within 1e-9 relative of
// the sequential result.
double batch_gradient(const LstmStack& stack, const Dataset& data, const Batch& batch,
                      int threads, std::vector<double>& grads) {
    const std::size_t B = batch.segment_indices.size();
    std::fill(grads.begin(), grads.end(), 0.0);
    double loss_sum = 0.0;

    const int nthreads = std::min<int>(threads, static_cast<int>(B));
    if (nthreads <= 1) {
        ForwardCache cache;
        for (std::size_t k = 0; k < B; ++k)
            loss_sum += segment_pass(stack, data.segments[batch.segment_indices[k]], cache, grads);
    } else {
        std::vector<std::vector<double>> thread_grads(
            static_cast<std::size_t>(nthreads), std::vector<double>(grads.size(), 0.0));
        std::vector<double> thread_loss(static_cast<std::size_t>(nthreads), 0.0);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int th = 0; th < nthreads; ++th) {
            pool.emplace_back([&, th] {
                ForwardCache cache;
                const std::size_t lo = B * static_cast<std::size_t>(th) / nthreads;
                const std::size_t hi = B * static_cast<std::size_t>(th + 1) / nthreads;
                for (std::size_t k = lo; k < hi; ++k)
                    thread_loss[th] += segment_pass(stack, data.segments[batch.segment_indices[k]],
                                                    cache, thread_grads[th]);
            });
        }
        for (auto& t : pool) t.join();
        for (int th = 0; th < nthreads; ++th) {
            loss_sum += thread_loss[th];
            axpy(grads.data(), 1.0, thread_grads[th].data(), static_cast<int>(grads.size()));
        }
    }

    const double inv = 1.0 / static_cast<double>(B);
    for (auto& g : grads) g *= inv;
    return loss_sum;
}

} // namespace

TrainResult train(const Dataset& data, const TrainConfig& config) {
    if (data.split_size(Split::Train) == 0 || data.split_size(Split::Val) == 0)
        throw TooShort("train: dataset needs nonempty train and val splits");

    TrainResult result;
    result.stack = init_params(config.layers, config.units, config.seed);
    result.adam = AdamState(result.stack.params.size());
    result.adam.alpha = config.learning_rate;

    LstmStack& stack = result.stack;
    std::vector<double> grads(stack.params.size(), 0.0);
    std::vector<double> best_params = stack.params;
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t epoch_seed =
            mix_seed(config.seed, 0x6A09E667F3BCC909ULL + static_cast<std::uint64_t>(epoch));

        double loss_sum = 0.0;
        std::size_t seg_count = 0;
        for (const Batch& batch : batches(data, Split::Train, epoch_seed, config.batch_size)) {
            loss_sum += batch_gradient(stack, data, batch, config.threads, grads);
            seg_count += batch.segment_indices.size();
            adam_step(stack.params, grads, result.adam);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = loss_sum / static_cast<double>(seg_count);
        stats.val_mse = split_mse(stack, data, Split::Val);
        stats.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(stats);

        if (stats.val_mse < best_val) {
            best_val = stats.val_mse;
            best_params = stack.params;
            result.best_epoch = epoch;
        }
    }

    stack.params = best_params;
    return result;
}

void save_checkpoint(const std::string& path, const LstmStack& stack, const AdamState& adam) {
    using detail::put_f64;
    using detail::put_le;
    if (adam.m.size() != stack.params.size() || adam.v.size() != stack.params.size())
        throw ShapeMismatch("save_checkpoint: optimizer state size != parameter count");

    std::string out;
    out.append(kMagic, 4);
    put_le(out, kVersion);
    put_le(out, static_cast<std::uint32_t>(3 * stack.tensors.size()));

    auto put_tensor = [&](const std::string& name, const TensorInfo& info, const double* data) {
        put_le(out, static_cast<std::uint16_t>(name.size()));
        out += name;
        out.push_back(static_cast<char>(info.dims.size()));
        for (auto d : info.dims) put_le(out, d);
        for (std::size_t i = 0; i < info.size; ++i) put_f64(out, data[info.offset + i]);
    };
    for (const auto& t : stack.tensors) put_tensor(t.name, t, stack.params.data());
    for (const auto& t : stack.tensors) put_tensor("adam.m." + t.name, t, adam.m.data());
    for (const auto& t : stack.tensors) put_tensor("adam.v." + t.name, t, adam.v.data());
    put_le(out, adam.step);

    detail::write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
    detail::Reader r(path, "checkpoint file");

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw BadMagic("checkpoint file has wrong magic");
    const auto version = r.le<std::uint32_t>();
    if (version != kVersion)
        throw BadVersion("checkpoint version " + std::to_string(version) + ", expected 1");

    struct RawTensor {
        std::vector<std::uint32_t> dims;
        std::vector<double> data;
    };
    std::map<std::string, RawTensor> raw;
    const auto count = r.le<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = r.le<std::uint16_t>();
        std::string name(name_len, '\0');
        if (name_len) r.bytes(name.data(), name_len);
        std::uint8_t rank;
        r.bytes(&rank, 1);
        RawTensor t;
        std::size_t size = 1;
        for (int d = 0; d < rank; ++d) {
            t.dims.push_back(r.le<std::uint32_t>());
            size *= t.dims.back();
        }
        t.data.resize(size);
        for (auto& v : t.data) v = r.f64();
        raw.emplace(std::move(name), std::move(t));
    }
    const std::uint64_t step = r.le<std::uint64_t>();

    // infer the stack shape from the stored tensors
    auto head = raw.find("head.w");
    if (head == raw.end()) throw BadVersion("checkpoint has no head.w tensor");
    const int units = static_cast<int>(head->second.dims.at(0));
    int layers = 0;
    while (raw.count("layer" + std::to_string(layers) + ".w_x")) ++layers;
    if (layers == 0) throw BadVersion("checkpoint has no layer tensors");

    Checkpoint ck{make_stack(layers, units), AdamState()};
    ck.adam = AdamState(ck.stack.params.size());
    ck.adam.step = step;

    auto fetch = [&](const std::string& name, const TensorInfo& info, double* dst) {
        auto it = raw.find(name);
        if (it == raw.end()) throw BadVersion("checkpoint missing tensor " + name);
        if (it->second.dims != info.dims || it->second.data.size() != info.size)
            throw BadVersion("checkpoint tensor " + name + " has unexpected shape");
        std::copy(it->second.data.begin(), it->second.data.end(), dst + info.offset);
    };
    for (const auto& t : ck.stack.tensors) {
        fetch(t.name, t, ck.stack.params.data());
        fetch("adam.m." + t.name, t, ck.adam.m.data());
        fetch("adam.v." + t.name, t, ck.adam.v.data());
    }
    return ck;
}

} // namespace invc
