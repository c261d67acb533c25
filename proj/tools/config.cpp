#include "config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>

#include "loadcast/error.hpp"

namespace loadcast::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Line {
    std::string file;
    std::size_t number = 0;

    std::string where() const { return file + " line " + std::to_string(number); }
};

double parse_double(const std::string& v, const Line& at) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty()) {
        throw errors::config(at.where() + ": '" + v + "' is not a number");
    }
    return x;
}

std::uint64_t parse_u64(const std::string& v, const Line& at) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty() || v[0] == '-') {
        throw errors::config(at.where() + ": '" + v + "' is not a non-negative integer");
    }
    return x;
}

std::size_t parse_size(const std::string& v, const Line& at) {
    return static_cast<std::size_t>(parse_u64(v, at));
}

bool parse_bool(const std::string& v, const Line& at) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw errors::config(at.where() + ": '" + v + "' is not a boolean (true/false)");
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value, const Line& at) {
    if (section == "data") {
        if (key == "path") {
            cfg.data_path = value;
        } else if (key == "synthetic") {
            cfg.synthetic = parse_bool(value, at);
        } else if (key == "days") {
            cfg.synthetic_days = parse_size(value, at);
        } else if (key == "seed") {
            cfg.data_seed = parse_u64(value, at);
        } else if (key == "schema") {
            cfg.schema = value;
        } else {
            throw errors::config(at.where() + ": unknown [data] key '" + key + "'");
        }
    } else if (section == "model") {
        if (key == "lookback") {
            cfg.arch.lookback_window = parse_size(value, at);
        } else if (key == "input_features") {
            cfg.arch.input_features = parse_size(value, at);
        } else if (key == "conv_filters") {
            cfg.arch.conv_filters = parse_size(value, at);
        } else if (key == "conv_kernel") {
            cfg.arch.conv_kernel = parse_size(value, at);
        } else if (key == "lstm1_hidden") {
            cfg.arch.lstm1_hidden = parse_size(value, at);
        } else if (key == "lstm2_hidden") {
            cfg.arch.lstm2_hidden = parse_size(value, at);
        } else if (key == "lstm3_hidden") {
            cfg.arch.lstm3_hidden = parse_size(value, at);
        } else if (key == "attn_heads") {
            cfg.arch.attn_heads = parse_size(value, at);
        } else if (key == "attn_key_dim") {
            cfg.arch.attn_key_dim = parse_size(value, at);
        } else if (key == "dropout") {
            cfg.arch.dropout_rate = parse_double(value, at);
        } else if (key == "variant") {
            cfg.arch.variant = model::variant_from_name(value);
        } else {
            throw errors::config(at.where() + ": unknown [model] key '" + key + "'");
        }
    } else if (section == "train") {
        cfg.explicit_hp = true;
        if (key == "learning_rate") {
            cfg.hp.learning_rate = parse_double(value, at);
        } else if (key == "batch_size") {
            cfg.hp.batch_size = parse_size(value, at);
        } else if (key == "epochs") {
            cfg.hp.epochs = parse_size(value, at);
        } else if (key == "init_scheme") {
            cfg.hp.init_scheme = init_scheme_from_name(value);
        } else if (key == "loss_metric") {
            cfg.hp.loss_metric = train::loss_metric_from_name(value);
        } else if (key == "from") {
            cfg.hp_from = value;
        } else {
            throw errors::config(at.where() + ": unknown [train] key '" + key + "'");
        }
    } else if (section == "pso") {
        if (key == "enabled") {
            cfg.pso_mode = parse_bool(value, at);
        } else if (key == "swarm_size") {
            cfg.swarm.swarm_size = parse_size(value, at);
        } else if (key == "iterations") {
            cfg.swarm.max_iterations = parse_size(value, at);
        } else if (key == "inertia") {
            cfg.swarm.inertia = parse_double(value, at);
        } else if (key == "cognitive") {
            cfg.swarm.cognitive = parse_double(value, at);
        } else if (key == "social") {
            cfg.swarm.social = parse_double(value, at);
        } else if (key == "velocity_clamp") {
            cfg.swarm.velocity_clamp = parse_double(value, at);
        } else if (key == "stall_window") {
            cfg.swarm.stall_window = parse_size(value, at);
        } else if (key == "stall_tolerance") {
            cfg.swarm.stall_tolerance = parse_double(value, at);
        } else {
            throw errors::config(at.where() + ": unknown [pso] key '" + key + "'");
        }
    } else if (section == "run") {
        if (key == "seed") {
            cfg.seed = parse_u64(value, at);
            cfg.has_seed = true;
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "epoch_budget") {
            cfg.epoch_budget = parse_size(value, at);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_u64(value, at));
        } else {
            throw errors::config(at.where() + ": unknown [run] key '" + key + "'");
        }
    } else {
        throw errors::config(at.where() + ": unknown section [" + section + "]");
    }
}

void parse_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw errors::io("cannot open config file '" + path + "'");
    std::string raw;
    std::string section;
    Line at{path, 0};
    while (std::getline(in, raw)) {
        ++at.number;
        // strip whole-line and trailing " #" comments
        std::string line = raw;
        if (auto pos = line.find(" #"); pos != std::string::npos) line.erase(pos);
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw errors::config(at.where() + ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw errors::config(at.where() + ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw errors::config(at.where() + ": key '" + key + "' appears before any section");
        }
        if (key.empty()) throw errors::config(at.where() + ": empty key");
        apply_key(cfg, section, key, value, at);
    }
}

}  // namespace

RunConfig load_run_config(const std::string& config_path, const Overrides& o) {
    RunConfig cfg;
    if (!config_path.empty()) parse_file(cfg, config_path);

    if (o.data) cfg.data_path = *o.data;
    if (o.schema) cfg.schema = *o.schema;
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.has_seed = true;
    }
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.epoch_budget) cfg.epoch_budget = *o.epoch_budget;
    if (o.days) cfg.synthetic_days = *o.days;
    if (o.data_seed) cfg.data_seed = *o.data_seed;
    if (o.variant) cfg.arch.variant = model::variant_from_name(*o.variant);
    if (o.learning_rate) {
        cfg.hp.learning_rate = *o.learning_rate;
        cfg.explicit_hp = true;
    }
    if (o.batch_size) {
        cfg.hp.batch_size = *o.batch_size;
        cfg.explicit_hp = true;
    }
    if (o.epochs) {
        cfg.hp.epochs = *o.epochs;
        cfg.explicit_hp = true;
    }
    if (o.init_scheme) {
        cfg.hp.init_scheme = init_scheme_from_name(*o.init_scheme);
        cfg.explicit_hp = true;
    }
    if (o.loss_metric) {
        cfg.hp.loss_metric = train::loss_metric_from_name(*o.loss_metric);
        cfg.explicit_hp = true;
    }
    if (o.hp_from) cfg.hp_from = *o.hp_from;
    if (o.pso) cfg.pso_mode = *o.pso;
    if (o.swarm_size) cfg.swarm.swarm_size = *o.swarm_size;
    if (o.iterations) cfg.swarm.max_iterations = *o.iterations;
    if (o.threads) cfg.threads = *o.threads;

    if (cfg.data_path == "synthetic") {
        cfg.synthetic = true;
        cfg.data_path.clear();
    }
    if (!cfg.hp_from.empty()) cfg.explicit_hp = true;

    if (!cfg.has_seed) {
        throw errors::config("a seed is required; pass --seed or set [run] seed");
    }
    if (cfg.pso_mode && cfg.explicit_hp) {
        throw errors::config(
            "hyperparameter search and explicit hyperparameters are mutually exclusive; "
            "drop the [train] settings or disable pso");
    }
    return cfg;
}

}  // namespace loadcast::cli
