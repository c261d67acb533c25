#include "loadcast/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "loadcast/error.hpp"

namespace loadcast::ckpt {

namespace {

constexpr char k_b64_alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += k_b64_alphabet[(v >> 18) & 63];
        out += k_b64_alphabet[(v >> 12) & 63];
        out += k_b64_alphabet[(v >> 6) & 63];
        out += k_b64_alphabet[v & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = bytes[i] << 16;
        out += k_b64_alphabet[(v >> 18) & 63];
        out += k_b64_alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += k_b64_alphabet[(v >> 18) & 63];
        out += k_b64_alphabet[(v >> 12) & 63];
        out += k_b64_alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

std::vector<std::uint8_t> base64_decode(const std::string& text, const std::string& what) {
    if (text.size() % 4 != 0) {
        throw errors::corrupt("tensor '" + what + "' has a base64 payload of length " +
                              std::to_string(text.size()) + ", not a multiple of 4");
    }
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                // padding is only legal in the last one or two slots
                if (i + 4 != text.size() || k < 2) {
                    throw errors::corrupt("tensor '" + what + "' has misplaced base64 padding");
                }
                vals[k] = 0;
                ++pad;
            } else {
                if (pad > 0) {
                    throw errors::corrupt("tensor '" + what + "' has misplaced base64 padding");
                }
                vals[k] = b64_value(c);
                if (vals[k] < 0) {
                    throw errors::corrupt("tensor '" + what + "' contains a byte that is not base64");
                }
            }
        }
        const std::uint32_t v = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                (static_cast<std::uint32_t>(vals[1]) << 12) |
                                (static_cast<std::uint32_t>(vals[2]) << 6) |
                                static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

std::string encode_tensor(const Tensor& t) {
    std::vector<std::uint8_t> bytes(t.size() * 8);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &t.data()[i], 8);
        for (int b = 0; b < 8; ++b) {  // least significant byte first
            bytes[i * 8 + b] = static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff);
        }
    }
    return base64_encode(bytes);
}

void decode_tensor_into(Tensor& t, const std::string& b64, const std::string& path) {
    const auto bytes = base64_decode(b64, path);
    if (bytes.size() != t.size() * 8) {
        throw errors::corrupt("tensor '" + path + "' decodes to " + std::to_string(bytes.size()) +
                              " bytes; its shape " + t.shape_str() + " needs " +
                              std::to_string(t.size() * 8));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
            bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        }
        std::memcpy(&t.data()[i], &bits, 8);
    }
}

template <typename Fn>
auto json_field(const nlohmann::ordered_json& j, const char* key, Fn get) {
    if (!j.contains(key)) {
        throw errors::corrupt(std::string("checkpoint is missing the '") + key + "' field");
    }
    try {
        return get(j.at(key));
    } catch (const nlohmann::json::exception& e) {
        throw errors::corrupt(std::string("checkpoint field '") + key +
                              "' has the wrong type: " + e.what());
    }
}

nlohmann::ordered_json architecture_json(const model::ArchitectureConfig& c) {
    return {{"lookback_window", c.lookback_window},
            {"input_features", c.input_features},
            {"conv_filters", c.conv_filters},
            {"conv_kernel", c.conv_kernel},
            {"lstm1_hidden", c.lstm1_hidden},
            {"lstm2_hidden", c.lstm2_hidden},
            {"lstm3_hidden", c.lstm3_hidden},
            {"attn_heads", c.attn_heads},
            {"attn_key_dim", c.attn_key_dim},
            {"dropout_rate", c.dropout_rate},
            {"variant", to_string(c.variant)}};
}

model::ArchitectureConfig architecture_from_json(const nlohmann::ordered_json& j) {
    model::ArchitectureConfig c;
    c.lookback_window = json_field(j, "lookback_window", [](auto& v) { return v.template get<std::size_t>(); });
    c.input_features = json_field(j, "input_features", [](auto& v) { return v.template get<std::size_t>(); });
    c.conv_filters = json_field(j, "conv_filters", [](auto& v) { return v.template get<std::size_t>(); });
    c.conv_kernel = json_field(j, "conv_kernel", [](auto& v) { return v.template get<std::size_t>(); });
    c.lstm1_hidden = json_field(j, "lstm1_hidden", [](auto& v) { return v.template get<std::size_t>(); });
    c.lstm2_hidden = json_field(j, "lstm2_hidden", [](auto& v) { return v.template get<std::size_t>(); });
    c.lstm3_hidden = json_field(j, "lstm3_hidden", [](auto& v) { return v.template get<std::size_t>(); });
    c.attn_heads = json_field(j, "attn_heads", [](auto& v) { return v.template get<std::size_t>(); });
    c.attn_key_dim = json_field(j, "attn_key_dim", [](auto& v) { return v.template get<std::size_t>(); });
    c.dropout_rate = json_field(j, "dropout_rate", [](auto& v) { return v.template get<double>(); });
    c.variant = model::variant_from_name(
        json_field(j, "variant", [](auto& v) { return v.template get<std::string>(); }));
    return c;
}

}  // namespace

std::string serialize(const model::Model& m, const train::HyperParams& hp,
                      const data::NormStats& stats, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["format_version"] = k_format_version;
    j["seed"] = seed;
    j["architecture"] = architecture_json(m.config);
    j["hyperparams"] = {{"learning_rate", hp.learning_rate},
                        {"batch_size", hp.batch_size},
                        {"epochs", hp.epochs},
                        {"init_scheme", to_string(hp.init_scheme)},
                        {"loss_metric", train::to_string(hp.loss_metric)}};
    j["normalization"] = {
        {"columns", stats.names}, {"min", stats.col_min}, {"max", stats.col_max}};
    auto tensors = nlohmann::ordered_json::object();
    model::for_each_param(m, [&](const std::string& path, const Tensor& t) {
        tensors[path] = {{"shape", t.shape()}, {"data", encode_tensor(t)}};
    });
    j["tensors"] = std::move(tensors);
    return j.dump(2) + "\n";
}

LoadedCheckpoint deserialize(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw errors::corrupt(std::string("checkpoint is not valid JSON: ") + e.what());
    }

    const int version = json_field(j, "format_version", [](auto& v) { return v.template get<int>(); });
    if (version != k_format_version) {
        throw errors::version("checkpoint format version " + std::to_string(version) +
                              " is not supported; this build reads version " +
                              std::to_string(k_format_version));
    }

    LoadedCheckpoint cp;
    cp.seed = json_field(j, "seed", [](auto& v) { return v.template get<std::uint64_t>(); });

    const auto arch = json_field(j, "architecture", [](auto& v) { return v; });
    const auto config = architecture_from_json(arch);

    const auto hyper = json_field(j, "hyperparams", [](auto& v) { return v; });
    cp.hyperparams.learning_rate =
        json_field(hyper, "learning_rate", [](auto& v) { return v.template get<double>(); });
    cp.hyperparams.batch_size =
        json_field(hyper, "batch_size", [](auto& v) { return v.template get<std::size_t>(); });
    cp.hyperparams.epochs =
        json_field(hyper, "epochs", [](auto& v) { return v.template get<std::size_t>(); });
    cp.hyperparams.init_scheme = init_scheme_from_name(
        json_field(hyper, "init_scheme", [](auto& v) { return v.template get<std::string>(); }));
    cp.hyperparams.loss_metric = train::loss_metric_from_name(
        json_field(hyper, "loss_metric", [](auto& v) { return v.template get<std::string>(); }));

    const auto norm = json_field(j, "normalization", [](auto& v) { return v; });
    cp.stats.names = json_field(norm, "columns",
                                [](auto& v) { return v.template get<std::vector<std::string>>(); });
    cp.stats.col_min =
        json_field(norm, "min", [](auto& v) { return v.template get<std::vector<double>>(); });
    cp.stats.col_max =
        json_field(norm, "max", [](auto& v) { return v.template get<std::vector<double>>(); });
    if (cp.stats.names.size() != cp.stats.col_min.size() ||
        cp.stats.names.size() != cp.stats.col_max.size() || cp.stats.names.empty()) {
        throw errors::corrupt("normalization stats have mismatched column counts");
    }

    const auto tensors = json_field(j, "tensors", [](auto& v) { return v; });
    if (!tensors.is_object()) throw errors::corrupt("checkpoint 'tensors' is not an object");

    // Rebuild the skeleton (head activation follows the loss choice), then
    // overwrite every tensor from the envelope.
    Rng rng(0);
    cp.model = train::build_for_loss(config, cp.hyperparams, rng);

    std::size_t used = 0;
    model::for_each_param(cp.model, [&](const std::string& path, Tensor& t) {
        if (!tensors.contains(path)) {
            throw errors::corrupt("checkpoint is missing tensor '" + path + "'");
        }
        const auto& entry = tensors.at(path);
        const auto shape = json_field(entry, "shape", [](auto& v) {
            return v.template get<std::vector<std::size_t>>();
        });
        if (shape != t.shape()) {
            Tensor expected(t.shape());
            Tensor got(shape);
            throw errors::shape("tensor '" + path + "' has shape " + got.shape_str() +
                                " but the declared architecture needs " + expected.shape_str());
        }
        const auto b64 =
            json_field(entry, "data", [](auto& v) { return v.template get<std::string>(); });
        decode_tensor_into(t, b64, path);
        ++used;
    });
    if (used != tensors.size()) {
        for (const auto& [key, value] : tensors.items()) {
            (void)value;
            bool known = false;
            model::for_each_param(cp.model, [&](const std::string& path, Tensor&) {
                if (path == key) known = true;
            });
            if (!known) {
                throw errors::corrupt("checkpoint contains stray tensor '" + key + "'");
            }
        }
    }
    return cp;
}

void save_checkpoint(const std::string& path, const model::Model& m,
                     const train::HyperParams& hp, const data::NormStats& stats,
                     std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw errors::io("cannot open '" + path + "' for writing");
    out << serialize(m, hp, stats, seed);
    if (!out) throw errors::io("failed while writing '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw errors::io("cannot open checkpoint '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize(buffer.str());
}

}  // namespace loadcast::ckpt
