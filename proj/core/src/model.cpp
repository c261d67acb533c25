#include <utility>

#include "loadcast/error.hpp"
#include "loadcast/model.hpp"

namespace loadcast::model {

Variant variant_from_name(const std::string& name) {
    if (name == "a2clnet") return Variant::a2clnet;
    if (name == "vanilla-cnn") return Variant::vanilla_cnn;
    if (name == "vanilla-lstm") return Variant::vanilla_lstm;
    if (name == "hybrid-cnn-lstm") return Variant::hybrid_cnn_lstm;
    throw errors::config("unknown model variant '" + name +
                         "' (expected a2clnet, vanilla-cnn, vanilla-lstm or hybrid-cnn-lstm)");
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::a2clnet: return "a2clnet";
        case Variant::vanilla_cnn: return "vanilla-cnn";
        case Variant::vanilla_lstm: return "vanilla-lstm";
        case Variant::hybrid_cnn_lstm: return "hybrid-cnn-lstm";
    }
    return "?";
}

namespace {

constexpr std::size_t k_pool_window = 2;
constexpr std::size_t k_pool_stride = 2;

bool uses_conv(Variant v) { return v != Variant::vanilla_lstm; }

std::size_t conv_out_steps(const ArchitectureConfig& c) {
    return c.lookback_window - c.conv_kernel + 1;
}

std::size_t pool_out_steps(const ArchitectureConfig& c) {
    return (conv_out_steps(c) - k_pool_window) / k_pool_stride + 1;
}

std::size_t head_in_size(const ArchitectureConfig& c) {
    switch (c.variant) {
        case Variant::vanilla_cnn: return c.conv_filters * pool_out_steps(c);
        default: return c.lstm3_hidden;
    }
}

std::size_t lstm3_in_size(const ArchitectureConfig& c) {
    switch (c.variant) {
        case Variant::a2clnet: return 2 * c.lstm2_hidden;
        case Variant::vanilla_lstm: return c.input_features;
        case Variant::hybrid_cnn_lstm: return c.conv_filters;
        case Variant::vanilla_cnn: return 0;
    }
    return 0;
}

void visit_lstm(const std::string& prefix, nn::LstmParams& p,
                const std::function<void(const std::string&, Tensor&)>& fn) {
    fn(prefix + ".w_f", p.w_f);
    fn(prefix + ".w_i", p.w_i);
    fn(prefix + ".w_c", p.w_c);
    fn(prefix + ".w_o", p.w_o);
    fn(prefix + ".b_f", p.b_f);
    fn(prefix + ".b_i", p.b_i);
    fn(prefix + ".b_c", p.b_c);
    fn(prefix + ".b_o", p.b_o);
}

void init_lstm(nn::LstmParams& p, InitScheme scheme, Rng& rng) {
    const std::size_t fan_in = p.w_f.dim(1);
    const std::size_t fan_out = p.w_f.dim(0);
    init_tensor(p.w_f, scheme, fan_in, fan_out, rng);
    init_tensor(p.w_i, scheme, fan_in, fan_out, rng);
    init_tensor(p.w_c, scheme, fan_in, fan_out, rng);
    init_tensor(p.w_o, scheme, fan_in, fan_out, rng);
}

Tensor flat(const Tensor& t) { return t.reshaped({t.size()}); }

}  // namespace

void validate(const ArchitectureConfig& c) {
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw errors::config(msg);
    };
    require(c.lookback_window >= 1, "lookback_window must be at least 1");
    require(c.input_features >= 1, "input_features must be at least 1");
    require(c.conv_filters >= 1, "conv_filters must be at least 1");
    require(c.conv_kernel >= 1, "conv_kernel must be at least 1");
    require(c.lstm1_hidden >= 1, "lstm1_hidden must be at least 1");
    require(c.lstm2_hidden >= 1, "lstm2_hidden must be at least 1");
    require(c.lstm3_hidden >= 1, "lstm3_hidden must be at least 1");
    require(c.attn_heads >= 1, "attn_heads must be at least 1");
    require(c.attn_key_dim >= 1, "attn_key_dim must be at least 1");
    require(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0, "dropout_rate must lie in [0, 1)");
    if (uses_conv(c.variant)) {
        require(c.lookback_window >= c.conv_kernel,
                "lookback_window must be at least conv_kernel for convolutional variants");
    }
    if (c.variant == Variant::vanilla_cnn) {
        require(conv_out_steps(c) >= k_pool_window,
                "lookback_window leaves fewer conv output steps than the pool window");
    }
}

Model build(const ArchitectureConfig& config, InitScheme scheme, Rng& rng) {
    validate(config);
    Model m;
    m.config = config;
    const std::size_t d_model = 2 * config.lstm1_hidden;

    if (uses_conv(config.variant)) {
        m.conv = nn::conv1d_zeros(config.conv_filters, config.input_features, config.conv_kernel);
        init_tensor(m.conv.filters, scheme, config.input_features * config.conv_kernel,
                    config.conv_filters * config.conv_kernel, rng);
    }
    if (config.variant == Variant::a2clnet) {
        const std::size_t conv_out = config.conv_filters;
        m.bilstm1 = nn::bilstm_zeros(config.lstm1_hidden, conv_out);
        init_lstm(m.bilstm1.fwd, scheme, rng);
        init_lstm(m.bilstm1.bwd, scheme, rng);
        m.norm = nn::layer_norm_identity(d_model);
        m.attn = nn::attention_zeros(config.attn_heads, d_model, config.attn_key_dim);
        init_tensor(m.attn.w_q, scheme, d_model, config.attn_key_dim, rng);
        init_tensor(m.attn.w_k, scheme, d_model, config.attn_key_dim, rng);
        init_tensor(m.attn.w_v, scheme, d_model, config.attn_key_dim, rng);
        init_tensor(m.attn.w_o, scheme, config.attn_heads * config.attn_key_dim, d_model, rng);
        m.bilstm2 = nn::bilstm_zeros(config.lstm2_hidden, d_model);
        init_lstm(m.bilstm2.fwd, scheme, rng);
        init_lstm(m.bilstm2.bwd, scheme, rng);
    }
    if (config.variant != Variant::vanilla_cnn) {
        m.lstm3 = nn::lstm_zeros(config.lstm3_hidden, lstm3_in_size(config));
        init_lstm(m.lstm3, scheme, rng);
    }
    m.head = nn::dense_zeros(1, head_in_size(config), Activation::linear);
    init_tensor(m.head.w, scheme, m.head.in_size(), 1, rng);
    return m;
}

Model zeros_like(const Model& m) {
    Model z;
    z.config = m.config;
    z.conv.filters = Tensor(m.conv.filters.shape());
    z.conv.bias = Tensor(m.conv.bias.shape());
    z.conv.stride = m.conv.stride;
    const auto zero_lstm = [](const nn::LstmParams& p) {
        nn::LstmParams out;
        out.w_f = Tensor(p.w_f.shape());
        out.w_i = Tensor(p.w_i.shape());
        out.w_c = Tensor(p.w_c.shape());
        out.w_o = Tensor(p.w_o.shape());
        out.b_f = Tensor(p.b_f.shape());
        out.b_i = Tensor(p.b_i.shape());
        out.b_c = Tensor(p.b_c.shape());
        out.b_o = Tensor(p.b_o.shape());
        return out;
    };
    z.bilstm1 = {zero_lstm(m.bilstm1.fwd), zero_lstm(m.bilstm1.bwd)};
    z.bilstm2 = {zero_lstm(m.bilstm2.fwd), zero_lstm(m.bilstm2.bwd)};
    z.norm.gain = Tensor(m.norm.gain.shape());
    z.norm.shift = Tensor(m.norm.shift.shape());
    z.norm.epsilon = m.norm.epsilon;
    z.attn.w_q = Tensor(m.attn.w_q.shape());
    z.attn.w_k = Tensor(m.attn.w_k.shape());
    z.attn.w_v = Tensor(m.attn.w_v.shape());
    z.attn.w_o = Tensor(m.attn.w_o.shape());
    z.lstm3 = zero_lstm(m.lstm3);
    z.head.w = Tensor(m.head.w.shape());
    z.head.b = Tensor(m.head.b.shape());
    z.head.activation = m.head.activation;
    return z;
}

double forward(const Model& m, const Tensor& window, bool train, Rng& rng, ModelCache* cache) {
    const auto& c = m.config;
    if (window.rank() != 2 || window.dim(0) != c.lookback_window ||
        window.dim(1) != c.input_features) {
        throw errors::input("input window " + window.shape_str() + " does not match (" +
                            std::to_string(c.lookback_window) + " x " +
                            std::to_string(c.input_features) + ")");
    }
    Tensor seq;  // (time x features) entering the recurrent stages
    if (uses_conv(c.variant)) {
        const Tensor conv_out =
            nn::conv1d_forward(m.conv, transpose(window), cache ? &cache->conv : nullptr);
        if (c.variant == Variant::vanilla_cnn) {
            const Tensor pooled = nn::maxpool1d_forward(conv_out, k_pool_window, k_pool_stride,
                                                        cache ? &cache->pool : nullptr);
            const Tensor y = nn::dense_forward(m.head, flat(pooled),
                                               cache ? &cache->head : nullptr);
            return y(0);
        }
        seq = transpose(conv_out);
    } else {
        seq = window;
    }

    if (c.variant == Variant::a2clnet) {
        seq = nn::dropout_forward(seq, c.dropout_rate, train, rng,
                                  cache ? &cache->drop1 : nullptr);
        seq = nn::bilstm_forward(m.bilstm1, seq, cache ? &cache->bilstm1 : nullptr);
        seq = nn::layer_norm_forward(m.norm, seq, cache ? &cache->norm : nullptr);
        seq = nn::dropout_forward(seq, c.dropout_rate, train, rng,
                                  cache ? &cache->drop2 : nullptr);
        seq = nn::attention_forward(m.attn, seq, cache ? &cache->attn : nullptr);
        seq = nn::bilstm_forward(m.bilstm2, seq, cache ? &cache->bilstm2 : nullptr);
        seq = nn::dropout_forward(seq, c.dropout_rate, train, rng,
                                  cache ? &cache->drop3 : nullptr);
    }

    const Tensor hs = nn::lstm_sequence_forward(m.lstm3, seq, cache ? &cache->lstm3 : nullptr);
    const std::size_t steps = hs.dim(0);
    const std::size_t hid = hs.dim(1);
    Tensor last({hid});
    std::copy(hs.data() + (steps - 1) * hid, hs.data() + steps * hid, last.data());
    const Tensor y = nn::dense_forward(m.head, last, cache ? &cache->head : nullptr);
    return y(0);
}

Tensor backward(const Model& m, const ModelCache& cache, double dy, Model& grads) {
    const auto& c = m.config;
    const Tensor dy_vec = Tensor::vector({dy});

    if (c.variant == Variant::vanilla_cnn) {
        const Tensor dflat = nn::dense_backward(m.head, cache.head, dy_vec, grads.head);
        const std::size_t pooled = dflat.size() / c.conv_filters;
        const Tensor dpool = nn::maxpool1d_backward(cache.pool,
                                                    dflat.reshaped({c.conv_filters, pooled}));
        const Tensor dconv = nn::conv1d_backward(m.conv, cache.conv, dpool, grads.conv);
        return transpose(dconv);
    }

    const Tensor dlast = nn::dense_backward(m.head, cache.head, dy_vec, grads.head);
    const std::size_t steps = cache.lstm3.x.dim(0);
    const std::size_t hid = c.lstm3_hidden;
    Tensor dh_seq({steps, hid});
    std::copy(dlast.data(), dlast.data() + hid, dh_seq.data() + (steps - 1) * hid);
    Tensor dseq = nn::lstm_sequence_backward(m.lstm3, cache.lstm3, dh_seq, grads.lstm3);

    if (c.variant == Variant::a2clnet) {
        dseq = nn::dropout_backward(cache.drop3, dseq);
        dseq = nn::bilstm_backward(m.bilstm2, cache.bilstm2, dseq, grads.bilstm2);
        dseq = nn::attention_backward(m.attn, cache.attn, dseq, grads.attn);
        dseq = nn::dropout_backward(cache.drop2, dseq);
        dseq = nn::layer_norm_backward(m.norm, cache.norm, dseq, grads.norm);
        dseq = nn::bilstm_backward(m.bilstm1, cache.bilstm1, dseq, grads.bilstm1);
        dseq = nn::dropout_backward(cache.drop1, dseq);
    }

    if (uses_conv(c.variant)) {
        const Tensor dconv = nn::conv1d_backward(m.conv, cache.conv, transpose(dseq), grads.conv);
        return transpose(dconv);
    }
    return dseq;
}

void for_each_param(Model& m, const std::function<void(const std::string&, Tensor&)>& fn) {
    const Variant v = m.config.variant;
    if (uses_conv(v)) {
        fn("conv.filters", m.conv.filters);
        fn("conv.bias", m.conv.bias);
    }
    if (v == Variant::a2clnet) {
        visit_lstm("bilstm1.fwd", m.bilstm1.fwd, fn);
        visit_lstm("bilstm1.bwd", m.bilstm1.bwd, fn);
        fn("norm.gain", m.norm.gain);
        fn("norm.shift", m.norm.shift);
        fn("attn.w_q", m.attn.w_q);
        fn("attn.w_k", m.attn.w_k);
        fn("attn.w_v", m.attn.w_v);
        fn("attn.w_o", m.attn.w_o);
        visit_lstm("bilstm2.fwd", m.bilstm2.fwd, fn);
        visit_lstm("bilstm2.bwd", m.bilstm2.bwd, fn);
    }
    if (v != Variant::vanilla_cnn) {
        visit_lstm("lstm3", m.lstm3, fn);
    }
    fn("head.w", m.head.w);
    fn("head.b", m.head.b);
}

void for_each_param(const Model& m,
                    const std::function<void(const std::string&, const Tensor&)>& fn) {
    for_each_param(const_cast<Model&>(m),
                   [&fn](const std::string& path, Tensor& t) { fn(path, t); });
}

std::size_t param_count(const Model& m) {
    std::size_t total = 0;
    for_each_param(m, [&total](const std::string&, const Tensor& t) { total += t.size(); });
    return total;
}

}  // namespace loadcast::model
