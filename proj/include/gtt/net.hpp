#ifndef GTT_NET_HPP
#define GTT_NET_HPP

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gtt/bbox.hpp"
#include "gtt/config.hpp"
#include "gtt/image.hpp"
#include "gtt/kernels.hpp"
#include "gtt/rng.hpp"
#include "gtt/tensor.hpp"

namespace gtt {

struct ConvStageSpec {
    int filters = 8;
    int ksize = 3;
    int stride = 1;
    int pool = 2;  // 1 = no pooling
};

// Two-branch comparator topology: shared conv feature branches, feature
// concatenation, fully-connected stack, 4 outputs in CornerCode units.
struct NetConfig {
    int input_size = 64;
    int input_channels = 3;
    std::vector<ConvStageSpec> conv_stages{{8, 3, 1, 2}, {16, 3, 1, 2}, {32, 3, 1, 2}};
    int fc_layers = 3;   // hidden layers before the 4-unit output
    int fc_width = 256;  // desk default; the reference design used 4096
    double dropout = 0.5;
    double output_scale = kDefaultOutputScale;
    bool freeze_conv = false;
    bool single_input = false;  // current-frame-only variant
    bool tied_branches = true;

    void validate() const;
    int feature_size_per_branch() const;  // flattened conv output
    int fc_input_size() const;

    KeyValueFile to_kv() const;
    static NetConfig from_kv(const KeyValueFile& kv);
    std::string serialize() const { return to_kv().to_text(); }
};

inline void NetConfig::validate() const {
    if (input_size <= 0 || input_channels != 3)
        throw std::invalid_argument("net config: bad input spec");
    if (fc_layers < 2 || fc_layers > 4)
        throw std::invalid_argument("net config: fc_layers must be 2, 3 or 4");
    if (fc_width < 1) throw std::invalid_argument("net config: fc_width must be >= 1");
    if (dropout < 0 || dropout >= 1)
        throw std::invalid_argument("net config: dropout must be in [0,1)");
    if (output_scale <= 0) throw std::invalid_argument("net config: output_scale must be > 0");
    if (conv_stages.empty()) throw std::invalid_argument("net config: need conv stages");
    int sz = input_size;
    for (const auto& s : conv_stages) {
        if (s.filters < 1 || s.ksize < 1 || s.stride < 1 || (s.pool != 1 && s.pool != 2))
            throw std::invalid_argument("net config: bad conv stage");
        sz = (sz + 2 * (s.ksize / 2) - s.ksize) / s.stride + 1;
        if (s.pool == 2) {
            if (sz % 2 != 0)
                throw std::invalid_argument("net config: odd extent before 2x2 pool");
            sz /= 2;
        }
        if (sz < 1) throw std::invalid_argument("net config: feature map collapsed");
    }
}

inline int NetConfig::feature_size_per_branch() const {
    int sz = input_size;
    for (const auto& s : conv_stages) {
        sz = (sz + 2 * (s.ksize / 2) - s.ksize) / s.stride + 1;
        if (s.pool == 2) sz /= 2;
    }
    return sz * sz * conv_stages.back().filters;
}

inline int NetConfig::fc_input_size() const {
    return feature_size_per_branch() * (single_input ? 1 : 2);
}

inline KeyValueFile NetConfig::to_kv() const {
    KeyValueFile kv;
    kv.set("input_size", static_cast<long>(input_size));
    std::string stages;
    for (const auto& s : conv_stages) {
        if (!stages.empty()) stages += ';';
        stages += std::to_string(s.filters) + "," + std::to_string(s.ksize) + "," +
                  std::to_string(s.stride) + "," + std::to_string(s.pool);
    }
    kv.set("conv_stages", stages);
    kv.set("fc_layers", static_cast<long>(fc_layers));
    kv.set("fc_width", static_cast<long>(fc_width));
    kv.set("dropout", dropout);
    kv.set("output_scale", output_scale);
    kv.set("freeze_conv", freeze_conv);
    kv.set("single_input", single_input);
    kv.set("tied_branches", tied_branches);
    return kv;
}

inline NetConfig NetConfig::from_kv(const KeyValueFile& kv) {
    NetConfig c;
    c.input_size = static_cast<int>(kv.get_int("input_size", c.input_size));
    if (kv.has("conv_stages")) {
        c.conv_stages.clear();
        std::string s = kv.get_string("conv_stages");
        std::size_t pos = 0;
        while (pos < s.size()) {
            auto end = s.find(';', pos);
            if (end == std::string::npos) end = s.size();
            ConvStageSpec st;
            if (std::sscanf(s.substr(pos, end - pos).c_str(), "%d,%d,%d,%d", &st.filters,
                            &st.ksize, &st.stride, &st.pool) != 4)
                throw std::runtime_error("net config: bad conv_stages entry");
            c.conv_stages.push_back(st);
            pos = end + 1;
        }
    }
    c.fc_layers = static_cast<int>(kv.get_int("fc_layers", c.fc_layers));
    c.fc_width = static_cast<int>(kv.get_int("fc_width", c.fc_width));
    c.dropout = kv.get_double("dropout", c.dropout);
    c.output_scale = kv.get_double("output_scale", c.output_scale);
    c.freeze_conv = kv.get_bool("freeze_conv", c.freeze_conv);
    c.single_input = kv.get_bool("single_input", c.single_input);
    c.tied_branches = kv.get_bool("tied_branches", c.tied_branches);
    c.validate();
    return c;
}

// L1 / L2 losses over 4-vectors; the |.| subgradient at 0 is 0.
template <class S>
S l1_loss(const std::array<S, 4>& pred, const std::array<S, 4>& target) {
    S acc = 0;
    for (int i = 0; i < 4; ++i) acc += std::abs(pred[i] - target[i]);
    return acc;
}
template <class S>
S l2_loss(const std::array<S, 4>& pred, const std::array<S, 4>& target) {
    S acc = 0;
    for (int i = 0; i < 4; ++i) acc += (pred[i] - target[i]) * (pred[i] - target[i]);
    return acc;
}
template <class S>
std::array<S, 4> l1_loss_grad(const std::array<S, 4>& pred, const std::array<S, 4>& target) {
    std::array<S, 4> g;
    for (int i = 0; i < 4; ++i) {
        const S d = pred[i] - target[i];
        g[i] = d > 0 ? S(1) : (d < 0 ? S(-1) : S(0));
    }
    return g;
}
template <class S>
std::array<S, 4> l2_loss_grad(const std::array<S, 4>& pred, const std::array<S, 4>& target) {
    std::array<S, 4> g;
    for (int i = 0; i < 4; ++i) g[i] = 2 * (pred[i] - target[i]);
    return g;
}

// Crop image -> network input tensor (C,H,W), normalized to [-0.5, 0.5].
template <class S>
Tensor<S> tensor_from_image(const Image& img) {
    Tensor<S> t({3, img.height, img.width});
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                t.v[c * plane + static_cast<std::size_t>(y) * img.width + x] =
                    static_cast<S>(img.at(x, y, c) / 255.0f - 0.5f);
    return t;
}

enum class NetMode { train, eval };

template <class S>
class Network {
public:
    explicit Network(NetConfig cfg, std::uint64_t seed = 0)
        : cfg_(std::move(cfg)), dropout_rng_(Rng::stream(seed, 0x0d120u)) {
        cfg_.validate();
        build();
        init_params(Rng::stream(seed, 0x1417u));
    }

    // params_/grads_ point into the layer tensors; rebuild them whenever
    // the object is copied or moved.
    Network(const Network& o) { *this = o; }
    Network(Network&& o) noexcept { *this = std::move(o); }
    Network& operator=(const Network& o) {
        if (this != &o) {
            copy_members(o);
            register_tensors();
        }
        return *this;
    }
    Network& operator=(Network&& o) noexcept {
        if (this != &o) {
            move_members(std::move(o));
            register_tensors();
        }
        return *this;
    }

    const NetConfig& config() const { return cfg_; }
    void set_mode(NetMode m) { mode_ = m; }
    NetMode mode() const { return mode_; }

    // Both crops are (3, input_size, input_size); target is ignored in
    // single-input mode. Activations are retained for backward().
    std::array<S, 4> forward(const Tensor<S>& target_crop, const Tensor<S>& search_crop);

    // Accumulates parameter gradients; requires a preceding forward().
    void backward(const std::array<S, 4>& d_output);

    // p <- p - lr * grad for non-frozen parameters, then clears all
    // gradients. Throws on non-finite gradients without touching params.
    void sgd_step(double learning_rate);

    void zero_grads() {
        for (auto* g : grads_) g->zero();
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto* p : params_) n += p->size();
        return n;
    }

    // Flat views for gradient checking and serialization.
    const std::vector<Tensor<S>*>& parameters() { return params_; }
    const std::vector<Tensor<S>*>& gradients() { return grads_; }

    void save(const std::string& path) const;
    static Network load(const std::string& path);
    static Network load(const std::string& path, const NetConfig& expected);

    bool operator==(const Network& o) const {
        if (cfg_.serialize() != o.cfg_.serialize()) return false;
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (params_[i]->v != o.params_[i]->v) return false;
        return true;
    }

private:
    struct ConvLayer {
        ConvStageSpec spec;
        int in_channels = 0, in_size = 0, out_size = 0, pooled_size = 0;
        Tensor<S> w, b, gw, gb;
    };
    struct FcLayer {
        Tensor<S> w, b, gw, gb;  // w: rows x cols
        int rows = 0, cols = 0;
    };
    struct BranchCache {
        std::vector<Tensor<S>> conv_out;   // pre-relu, per stage
        std::vector<Tensor<S>> relu_out;   // post-relu
        std::vector<Tensor<S>> pool_out;   // post-pool (== relu_out when pool=1)
        std::vector<std::vector<int>> argmax;
        Tensor<S> input;
        bool active = false;
    };

    void build();
    void init_params(Rng rng);
    void register_tensors();
    void copy_members(const Network& o) {
        cfg_ = o.cfg_;
        mode_ = o.mode_;
        dropout_rng_ = o.dropout_rng_;
        conv_ = o.conv_;
        conv_target_ = o.conv_target_;
        fc_ = o.fc_;
        out_ = o.out_;
        cache_target_ = o.cache_target_;
        cache_search_ = o.cache_search_;
        concat_ = o.concat_;
        fc_in_ = o.fc_in_;
        fc_pre_ = o.fc_pre_;
        fc_post_ = o.fc_post_;
        dropout_mask_ = o.dropout_mask_;
        have_activations_ = o.have_activations_;
        frozen_ = o.frozen_;
    }
    void move_members(Network&& o) {
        cfg_ = std::move(o.cfg_);
        mode_ = o.mode_;
        dropout_rng_ = o.dropout_rng_;
        conv_ = std::move(o.conv_);
        conv_target_ = std::move(o.conv_target_);
        fc_ = std::move(o.fc_);
        out_ = std::move(o.out_);
        cache_target_ = std::move(o.cache_target_);
        cache_search_ = std::move(o.cache_search_);
        concat_ = std::move(o.concat_);
        fc_in_ = std::move(o.fc_in_);
        fc_pre_ = std::move(o.fc_pre_);
        fc_post_ = std::move(o.fc_post_);
        dropout_mask_ = std::move(o.dropout_mask_);
        have_activations_ = o.have_activations_;
        frozen_ = std::move(o.frozen_);
    }
    const Tensor<S>* branch_forward(const Tensor<S>& in, std::vector<ConvLayer>& layers,
                                    BranchCache& cache);
    void branch_backward(const S* d_feat, std::vector<ConvLayer>& layers, BranchCache& cache);

    NetConfig cfg_;
    NetMode mode_ = NetMode::eval;
    Rng dropout_rng_ = Rng(0);

    std::vector<ConvLayer> conv_;         // search branch; also target when tied
    std::vector<ConvLayer> conv_target_;  // only when untied
    std::vector<FcLayer> fc_;             // hidden layers
    FcLayer out_;

    BranchCache cache_target_, cache_search_;
    Tensor<S> concat_;
    std::vector<Tensor<S>> fc_in_;    // inputs to each hidden linear
    std::vector<Tensor<S>> fc_pre_;   // pre-relu
    std::vector<Tensor<S>> fc_post_;  // post relu (+dropout in train mode)
    std::vector<std::vector<S>> dropout_mask_;
    bool have_activations_ = false;

    std::vector<Tensor<S>*> params_;
    std::vector<Tensor<S>*> grads_;
    std::vector<bool> frozen_;  // aligned with params_
};

template <class S>
void Network<S>::build() {
    auto build_stack = [&](std::vector<ConvLayer>& stack) {
        stack.clear();
        int channels = cfg_.input_channels;
        int size = cfg_.input_size;
        for (const auto& spec : cfg_.conv_stages) {
            ConvLayer l;
            l.spec = spec;
            l.in_channels = channels;
            l.in_size = size;
            l.out_size = (size + 2 * (spec.ksize / 2) - spec.ksize) / spec.stride + 1;
            l.pooled_size = spec.pool == 2 ? l.out_size / 2 : l.out_size;
            l.w = Tensor<S>({spec.filters, channels, spec.ksize, spec.ksize});
            l.b = Tensor<S>({spec.filters});
            l.gw = Tensor<S>(l.w.shape);
            l.gb = Tensor<S>(l.b.shape);
            channels = spec.filters;
            size = l.pooled_size;
            stack.push_back(std::move(l));
        }
    };
    build_stack(conv_);
    if (!cfg_.tied_branches && !cfg_.single_input) build_stack(conv_target_);

    int in = cfg_.fc_input_size();
    fc_.clear();
    for (int i = 0; i < cfg_.fc_layers; ++i) {
        FcLayer l;
        l.rows = cfg_.fc_width;
        l.cols = in;
        l.w = Tensor<S>({l.rows, l.cols});
        l.b = Tensor<S>({l.rows});
        l.gw = Tensor<S>(l.w.shape);
        l.gb = Tensor<S>(l.b.shape);
        fc_.push_back(std::move(l));
        in = cfg_.fc_width;
    }
    out_.rows = 4;
    out_.cols = in;
    out_.w = Tensor<S>({4, in});
    out_.b = Tensor<S>({4});
    out_.gw = Tensor<S>(out_.w.shape);
    out_.gb = Tensor<S>(out_.b.shape);

    fc_in_.assign(fc_.size(), {});
    fc_pre_.assign(fc_.size(), {});
    fc_post_.assign(fc_.size(), {});
    dropout_mask_.assign(fc_.size(), {});

    register_tensors();
}

template <class S>
void Network<S>::register_tensors() {
    params_.clear();
    grads_.clear();
    frozen_.clear();
    auto reg = [&](Tensor<S>& p, Tensor<S>& g, bool frozen) {
        params_.push_back(&p);
        grads_.push_back(&g);
        frozen_.push_back(frozen);
    };
    for (auto& l : conv_) {
        reg(l.w, l.gw, cfg_.freeze_conv);
        reg(l.b, l.gb, cfg_.freeze_conv);
    }
    for (auto& l : conv_target_) {
        reg(l.w, l.gw, cfg_.freeze_conv);
        reg(l.b, l.gb, cfg_.freeze_conv);
    }
    for (auto& l : fc_) {
        reg(l.w, l.gw, false);
        reg(l.b, l.gb, false);
    }
    reg(out_.w, out_.gw, false);
    reg(out_.b, out_.gb, false);
}

template <class S>
void Network<S>::init_params(Rng rng) {
    auto init_conv = [&](std::vector<ConvLayer>& stack) {
        for (auto& l : stack) {
            const double fan_in = l.in_channels * l.spec.ksize * l.spec.ksize;
            const double bound = std::sqrt(6.0 / fan_in);
            for (auto& x : l.w.v) x = static_cast<S>(rng.uniform(-bound, bound));
            l.b.zero();
        }
    };
    init_conv(conv_);
    init_conv(conv_target_);
    for (auto& l : fc_) {
        const double bound = std::sqrt(6.0 / l.cols);
        for (auto& x : l.w.v) x = static_cast<S>(rng.uniform(-bound, bound));
        l.b.zero();
    }
    // Near-zero output weights plus a bias at the no-motion prior: the
    // code of a box centered in a search region kDefaultContextFactor
    // times its own size. A fresh net therefore predicts "box unchanged"
    // and training only has to learn the residual motion; with a
    // zero-initialized bias the constant-magnitude L1 gradients would
    // spend thousands of iterations just walking the bias to the label
    // mean.
    for (auto& x : out_.w.v) x = static_cast<S>(rng.uniform(-1e-4, 1e-4));
    const double lo = cfg_.output_scale * 0.5 * (1.0 - 1.0 / kDefaultContextFactor);
    const double hi = cfg_.output_scale * 0.5 * (1.0 + 1.0 / kDefaultContextFactor);
    out_.b.v[0] = static_cast<S>(lo);
    out_.b.v[1] = static_cast<S>(lo);
    out_.b.v[2] = static_cast<S>(hi);
    out_.b.v[3] = static_cast<S>(hi);
}

template <class S>
const Tensor<S>* Network<S>::branch_forward(const Tensor<S>& in,
                                            std::vector<ConvLayer>& layers,
                                            BranchCache& cache) {
    cache.conv_out.resize(layers.size());
    cache.relu_out.resize(layers.size());
    cache.pool_out.resize(layers.size());
    cache.argmax.resize(layers.size());
    cache.input = in;
    cache.active = true;

    const Tensor<S>* x = &cache.input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        ConvLayer& l = layers[i];
        const int pad = l.spec.ksize / 2;
        cache.conv_out[i] = Tensor<S>({l.spec.filters, l.out_size, l.out_size});
        kernels::conv2d_forward(x->data(), l.in_channels, l.in_size, l.in_size, l.w.data(),
                                l.b.data(), l.spec.filters, l.spec.ksize, l.spec.stride, pad,
                                cache.conv_out[i].data(), l.out_size, l.out_size);
        cache.relu_out[i] = Tensor<S>(cache.conv_out[i].shape);
        kernels::relu_forward(cache.conv_out[i].data(), cache.conv_out[i].size(),
                              cache.relu_out[i].data());
        if (l.spec.pool == 2) {
            cache.pool_out[i] = Tensor<S>({l.spec.filters, l.pooled_size, l.pooled_size});
            cache.argmax[i].resize(cache.pool_out[i].size());
            kernels::maxpool2_forward(cache.relu_out[i].data(), l.spec.filters, l.out_size,
                                      l.out_size, cache.pool_out[i].data(),
                                      cache.argmax[i].data());
            x = &cache.pool_out[i];
        } else {
            cache.pool_out[i] = cache.relu_out[i];
            x = &cache.pool_out[i];
        }
    }
    return x;
}

template <class S>
std::array<S, 4> Network<S>::forward(const Tensor<S>& target_crop,
                                     const Tensor<S>& search_crop) {
    const std::vector<int> want{cfg_.input_channels, cfg_.input_size, cfg_.input_size};
    if (search_crop.shape != want || (!cfg_.single_input && target_crop.shape != want))
        throw std::invalid_argument("network forward: crop shape mismatch");

    const Tensor<S>* feat_s = branch_forward(search_crop, conv_, cache_search_);
    const Tensor<S>* feat_t = nullptr;
    if (!cfg_.single_input) {
        auto& stack = cfg_.tied_branches ? conv_ : conv_target_;
        feat_t = branch_forward(target_crop, stack, cache_target_);
    } else {
        cache_target_.active = false;
    }

    // concatenate: target features then search features
    concat_ = Tensor<S>({cfg_.fc_input_size()});
    const int per = cfg_.feature_size_per_branch();
    S* dst = concat_.data();
    if (feat_t) {
        std::memcpy(dst, feat_t->data(), sizeof(S) * per);
        dst += per;
    }
    std::memcpy(dst, feat_s->data(), sizeof(S) * per);

    const Tensor<S>* x = &concat_;
    for (std::size_t i = 0; i < fc_.size(); ++i) {
        fc_in_[i] = *x;
        fc_pre_[i] = Tensor<S>({fc_[i].rows});
        kernels::linear_forward(fc_[i].w.data(), fc_[i].b.data(), fc_[i].rows, fc_[i].cols,
                                x->data(), fc_pre_[i].data());
        fc_post_[i] = Tensor<S>(fc_pre_[i].shape);
        kernels::relu_forward(fc_pre_[i].data(), fc_pre_[i].size(), fc_post_[i].data());
        if (mode_ == NetMode::train && cfg_.dropout > 0) {
            // inverted dropout: expected activation preserved
            dropout_mask_[i].resize(fc_post_[i].size());
            const S keep_inv = static_cast<S>(1.0 / (1.0 - cfg_.dropout));
            for (std::size_t j = 0; j < fc_post_[i].size(); ++j) {
                const bool keep = dropout_rng_.uniform() >= cfg_.dropout;
                dropout_mask_[i][j] = keep ? keep_inv : S(0);
                fc_post_[i].v[j] *= dropout_mask_[i][j];
            }
        } else {
            dropout_mask_[i].clear();
        }
        x = &fc_post_[i];
    }

    std::array<S, 4> out;
    kernels::linear_forward(out_.w.data(), out_.b.data(), 4, out_.cols, x->data(), out.data());
    have_activations_ = true;
    return out;
}

template <class S>
void Network<S>::branch_backward(const S* d_feat, std::vector<ConvLayer>& layers,
                                 BranchCache& cache) {
    Tensor<S> d_next;
    const S* d_cur = d_feat;
    for (std::size_t ii = layers.size(); ii-- > 0;) {
        ConvLayer& l = layers[ii];
        Tensor<S> d_relu;
        if (l.spec.pool == 2) {
            d_relu = Tensor<S>({l.spec.filters, l.out_size, l.out_size});
            kernels::maxpool2_backward(d_cur, l.spec.filters, l.out_size, l.out_size,
                                       cache.argmax[ii].data(), d_relu.data());
        } else {
            d_relu = Tensor<S>({l.spec.filters, l.out_size, l.out_size});
            std::memcpy(d_relu.data(), d_cur, sizeof(S) * d_relu.size());
        }
        Tensor<S> d_conv(d_relu.shape);
        kernels::relu_backward(cache.conv_out[ii].data(), d_relu.data(), d_relu.size(),
                               d_conv.data());
        const Tensor<S>& in = ii == 0 ? cache.input : cache.pool_out[ii - 1];
        const int pad = l.spec.ksize / 2;
        Tensor<S>* d_in = nullptr;
        if (ii > 0) {
            d_next = Tensor<S>(in.shape);
            d_in = &d_next;
        }
        kernels::conv2d_backward(in.data(), l.in_channels, l.in_size, l.in_size, l.w.data(),
                                 l.spec.filters, l.spec.ksize, l.spec.stride, pad,
                                 d_conv.data(), l.out_size, l.out_size,
                                 d_in ? d_in->data() : nullptr,
                                 cfg_.freeze_conv ? nullptr : l.gw.data(),
                                 cfg_.freeze_conv ? nullptr : l.gb.data());
        d_cur = d_in ? d_in->data() : nullptr;
    }
}

template <class S>
void Network<S>::backward(const std::array<S, 4>& d_output) {
    if (!have_activations_)
        throw std::runtime_error("network backward: no retained forward pass");

    const Tensor<S>& last = fc_.empty() ? concat_ : fc_post_.back();
    Tensor<S> d_x({static_cast<int>(last.size())});
    kernels::linear_backward(out_.w.data(), 4, out_.cols, last.data(), d_output.data(),
                             d_x.data(), out_.gw.data(), out_.gb.data());

    for (std::size_t ii = fc_.size(); ii-- > 0;) {
        if (!dropout_mask_[ii].empty())
            for (std::size_t j = 0; j < d_x.size(); ++j) d_x.v[j] *= dropout_mask_[ii][j];
        Tensor<S> d_pre(d_x.shape);
        kernels::relu_backward(fc_pre_[ii].data(), d_x.data(), d_x.size(), d_pre.data());
        Tensor<S> d_prev({fc_[ii].cols});
        kernels::linear_backward(fc_[ii].w.data(), fc_[ii].rows, fc_[ii].cols,
                                 fc_in_[ii].data(), d_pre.data(), d_prev.data(),
                                 fc_[ii].gw.data(), fc_[ii].gb.data());
        d_x = std::move(d_prev);
    }

    const int per = cfg_.feature_size_per_branch();
    if (cfg_.single_input) {
        if (!cfg_.freeze_conv) branch_backward(d_x.data(), conv_, cache_search_);
    } else {
        if (!cfg_.freeze_conv) {
            auto& target_stack = cfg_.tied_branches ? conv_ : conv_target_;
            branch_backward(d_x.data(), target_stack, cache_target_);
            branch_backward(d_x.data() + per, conv_, cache_search_);
        }
    }
    have_activations_ = false;
}

template <class S>
void Network<S>::sgd_step(double learning_rate) {
    for (std::size_t i = 0; i < grads_.size(); ++i) {
        if (frozen_[i]) continue;
        for (const S g : grads_[i]->v)
            if (!std::isfinite(static_cast<double>(g)))
                throw std::runtime_error("sgd_step: non-finite gradient, step aborted");
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (!frozen_[i]) {
            S* p = params_[i]->data();
            const S* g = grads_[i]->data();
            const S lr = static_cast<S>(learning_rate);
            for (std::size_t j = 0; j < params_[i]->size(); ++j) p[j] -= lr * g[j];
        }
    }
    zero_grads();
}

// ---- serialization ----
// magic, version, scalar width, config text, then raw little-endian
// tensor dumps with shapes.

namespace detail {
template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T read_pod(std::istream& is, const std::string& path) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("weight file truncated: " + path);
    return v;
}
} // namespace detail

template <class S>
void Network<S>::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write weight file: " + path);
    f.write("GTTN", 4);
    detail::write_pod<std::uint32_t>(f, 1);  // format version
    detail::write_pod<std::uint8_t>(f, sizeof(S));
    const std::string cfg_text = cfg_.serialize();
    detail::write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(cfg_text.size()));
    f.write(cfg_text.data(), static_cast<std::streamsize>(cfg_text.size()));
    detail::write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(params_.size()));
    for (const auto* p : params_) {
        detail::write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(p->shape.size()));
        for (int d : p->shape) detail::write_pod<std::int32_t>(f, d);
        f.write(reinterpret_cast<const char*>(p->v.data()),
                static_cast<std::streamsize>(sizeof(S) * p->v.size()));
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

template <class S>
Network<S> Network<S>::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open weight file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "GTTN", 4) != 0)
        throw std::runtime_error("not a weight file: " + path);
    const auto version = detail::read_pod<std::uint32_t>(f, path);
    if (version != 1) throw std::runtime_error("unsupported weight file version");
    const auto scalar = detail::read_pod<std::uint8_t>(f, path);
    if (scalar != sizeof(S))
        throw std::runtime_error("weight file scalar width mismatch: " + path);
    const auto cfg_len = detail::read_pod<std::uint32_t>(f, path);
    std::string cfg_text(cfg_len, '\0');
    f.read(cfg_text.data(), cfg_len);
    if (!f) throw std::runtime_error("weight file truncated: " + path);
    NetConfig cfg = NetConfig::from_kv(KeyValueFile::parse_text(cfg_text, path));

    Network net(cfg, 0);
    const auto n_tensors = detail::read_pod<std::uint32_t>(f, path);
    if (n_tensors != net.params_.size())
        throw std::runtime_error("weight file tensor count mismatch: " + path);
    for (auto* p : net.params_) {
        const auto ndim = detail::read_pod<std::uint32_t>(f, path);
        std::vector<int> dims(ndim);
        for (auto& d : dims) d = detail::read_pod<std::int32_t>(f, path);
        if (dims != p->shape) throw std::runtime_error("weight file shape mismatch: " + path);
        f.read(reinterpret_cast<char*>(p->v.data()),
               static_cast<std::streamsize>(sizeof(S) * p->v.size()));
        if (!f) throw std::runtime_error("weight file truncated: " + path);
    }
    return net;
}

template <class S>
Network<S> Network<S>::load(const std::string& path, const NetConfig& expected) {
    Network net = load(path);
    if (net.cfg_.serialize() != expected.serialize())
        throw std::runtime_error("weight file config mismatch: " + path);
    return net;
}

} // namespace gtt

#endif
