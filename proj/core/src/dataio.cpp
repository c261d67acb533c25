#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "loadcast/dataio.hpp"
#include "loadcast/error.hpp"
#include "loadcast/rng.hpp"

namespace loadcast::data {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool looks_like_epoch(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) return false;
    }
    return true;
}

// Epoch seconds or ISO-8601 "YYYY-MM-DD[{T| }HH:MM[:SS]][Z]", interpreted as UTC.
std::int64_t parse_timestamp(const std::string& raw, std::size_t line_no) {
    std::string s = raw;
    if (!s.empty() && s.back() == 'Z') s.pop_back();
    if (looks_like_epoch(s)) return std::strtoll(s.c_str(), nullptr, 10);

    int year = 0;
    unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char sep = 'T';
    const int got =
        std::sscanf(s.c_str(), "%d-%u-%u%c%u:%u:%u", &year, &month, &day, &sep, &hour, &minute,
                    &second);
    const bool date_ok = got >= 3 && month >= 1 && month <= 12 && day >= 1 && day <= 31;
    const bool time_ok = got == 3 || ((sep == 'T' || sep == ' ') && got >= 6 && hour < 24 &&
                                      minute < 60 && second < 60);
    if (!date_ok || !time_ok) {
        throw errors::data("line " + std::to_string(line_no) + ": unparseable timestamp '" +
                           raw + "'");
    }
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

double parse_number(const std::string& s, std::size_t line_no, const std::string& column) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw errors::data("line " + std::to_string(line_no) + ": unparseable value '" + s +
                           "' in column '" + column + "'");
    }
    return v;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::string& path) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw errors::data("column '" + name + "' not found in header of " + path);
}

struct Row {
    std::int64_t ts;
    std::vector<double> values;  // load first, then features
};

}  // namespace

CsvSchema schema_from_string(const std::string& spec) {
    CsvSchema schema;
    bool saw_ts = false;
    bool saw_load = false;
    for (const std::string& part : split(spec, ',')) {
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos) {
            throw errors::config("schema entry '" + part + "' is not key=value");
        }
        const std::string key = trim(part.substr(0, eq));
        const std::string value = trim(part.substr(eq + 1));
        if (value.empty()) throw errors::config("schema entry '" + part + "' has no value");
        if (key == "ts") {
            schema.timestamp_column = value;
            saw_ts = true;
        } else if (key == "load") {
            schema.load_column = value;
            saw_load = true;
        } else if (key == "features") {
            schema.feature_columns = split(value, '+');
        } else {
            throw errors::config("unknown schema key '" + key + "' (expected ts, load, features)");
        }
    }
    if (!saw_ts || !saw_load) {
        throw errors::config("schema must name both ts= and load= columns, got '" + spec + "'");
    }
    return schema;
}

LoadSeries ingest_csv(const std::string& path, const CsvSchema& schema, IngestReport* report) {
    std::ifstream in(path);
    if (!in) throw errors::io("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw errors::data(path + " is empty (header row required)");
    const std::vector<std::string> header = split(line, ',');
    const std::size_t ts_col = column_index(header, schema.timestamp_column, path);
    const std::size_t load_col = column_index(header, schema.load_column, path);
    std::vector<std::size_t> feat_cols;
    for (const std::string& name : schema.feature_columns) {
        feat_cols.push_back(column_index(header, name, path));
    }

    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw errors::data("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
        }
        Row row;
        row.ts = parse_timestamp(fields[ts_col], line_no);
        row.values.push_back(parse_number(fields[load_col], line_no, schema.load_column));
        for (std::size_t f = 0; f < feat_cols.size(); ++f) {
            row.values.push_back(
                parse_number(fields[feat_cols[f]], line_no, schema.feature_columns[f]));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw errors::data(path + " has no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.ts < b.ts; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].ts == rows[i - 1].ts) {
            throw errors::data("duplicate timestamp " + std::to_string(rows[i].ts) + " in " +
                               path);
        }
    }

    IngestReport rep;
    rep.rows_in = rows.size();

    // Gap policy. The base interval is the smallest observed difference; gaps
    // of 2-3 intervals are filled linearly, anything longer (or off-grid)
    // splits the series, of which the longest piece survives.
    std::size_t seg_begin = 0;
    std::size_t best_begin = 0;
    std::size_t best_len = 1;
    std::int64_t interval = 0;
    if (rows.size() > 1) {
        interval = rows[1].ts - rows[0].ts;
        for (std::size_t i = 2; i < rows.size(); ++i) {
            interval = std::min(interval, rows[i].ts - rows[i - 1].ts);
        }
        std::size_t segments = 0;
        const auto close_segment = [&](std::size_t end) {  // [seg_begin, end)
            ++segments;
            if (end - seg_begin > best_len) {
                best_len = end - seg_begin;
                best_begin = seg_begin;
            }
            seg_begin = end;
        };
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const std::int64_t d = rows[i].ts - rows[i - 1].ts;
            const bool on_grid = d % interval == 0;
            if (!on_grid || d / interval > 3) close_segment(i);
        }
        close_segment(rows.size());
        rep.segments_discarded = segments - 1;
    }

    LoadSeries series;
    series.feature_names = schema.feature_columns;
    series.features.resize(schema.feature_columns.size());
    const auto push_row = [&series](std::int64_t ts, const std::vector<double>& values) {
        series.timestamps.push_back(ts);
        series.load.push_back(values[0]);
        for (std::size_t f = 0; f < series.features.size(); ++f) {
            series.features[f].push_back(values[f + 1]);
        }
    };
    for (std::size_t i = best_begin; i < best_begin + best_len; ++i) {
        if (i > best_begin) {
            const std::int64_t d = rows[i].ts - rows[i - 1].ts;
            const auto steps = static_cast<std::size_t>(d / interval);
            for (std::size_t j = 1; j < steps; ++j) {
                const double frac = static_cast<double>(j) / static_cast<double>(steps);
                std::vector<double> mixed(rows[i].values.size());
                for (std::size_t v = 0; v < mixed.size(); ++v) {
                    mixed[v] = rows[i - 1].values[v] +
                               frac * (rows[i].values[v] - rows[i - 1].values[v]);
                }
                push_row(rows[i - 1].ts + static_cast<std::int64_t>(j) * interval, mixed);
                ++rep.rows_interpolated;
            }
        }
        push_row(rows[i].ts, rows[i].values);
    }
    rep.rows_kept = best_len;
    rep.rows_dropped = rows.size() - best_len;
    if (rep.segments_discarded > 0) {
        rep.note = "kept longest contiguous segment (" + std::to_string(best_len) + " of " +
                   std::to_string(rows.size()) + " rows); discarded " +
                   std::to_string(rep.segments_discarded) + " segment(s)";
    }
    if (report != nullptr) *report = rep;
    return series;
}

NormStats fit_normalization(const LoadSeries& series, std::size_t train_rows) {
    if (train_rows == 0) throw errors::config("training split is empty; cannot fit normalization");
    if (train_rows > series.size()) {
        throw errors::internal("normalization asked for more rows than the series holds");
    }
    NormStats stats;
    stats.names.push_back("load");
    for (const std::string& name : series.feature_names) stats.names.push_back(name);

    const auto fit_column = [&](const std::vector<double>& col, const std::string& name) {
        double lo = col[0];
        double hi = col[0];
        for (std::size_t i = 1; i < train_rows; ++i) {
            lo = std::min(lo, col[i]);
            hi = std::max(hi, col[i]);
        }
        if (hi == lo) {
            throw errors::config("column '" + name +
                                 "' is constant over the training rows; min-max undefined");
        }
        stats.col_min.push_back(lo);
        stats.col_max.push_back(hi);
    };
    fit_column(series.load, "load");
    for (std::size_t f = 0; f < series.features.size(); ++f) {
        fit_column(series.features[f], series.feature_names[f]);
    }
    return stats;
}

LoadSeries apply_normalization(const LoadSeries& series, const NormStats& stats) {
    LoadSeries out = series;
    const auto map_column = [](std::vector<double>& col, double lo, double hi) {
        for (double& v : col) v = (v - lo) / (hi - lo);
    };
    map_column(out.load, stats.col_min[0], stats.col_max[0]);
    for (std::size_t f = 0; f < out.features.size(); ++f) {
        map_column(out.features[f], stats.col_min[f + 1], stats.col_max[f + 1]);
    }
    return out;
}

Tensor WindowedDataset::window(std::size_t i) const {
    Tensor w({lookback, features});
    const double* src = x.data() + i * lookback * features;
    std::copy(src, src + lookback * features, w.data());
    return w;
}

WindowedDataset window(const LoadSeries& series, std::size_t lookback, const NormStats& stats,
                       std::size_t horizon) {
    if (horizon != 1) {
        throw errors::config("only horizon 1 is supported, got " + std::to_string(horizon));
    }
    if (lookback == 0) throw errors::config("lookback must be at least 1");
    const std::size_t n = series.size();
    if (n <= lookback) {
        throw errors::data("series of length " + std::to_string(n) +
                           " is too short for lookback " + std::to_string(lookback));
    }
    const std::size_t b1 = n * 7 / 10;
    const std::size_t b2 = n * 17 / 20;

    // A window's rows are [e-lookback, e] where e indexes its target row; it
    // belongs to the split containing all of those rows, else it is dropped.
    std::vector<std::size_t> train_e, val_e, test_e;
    std::size_t dropped = 0;
    for (std::size_t e = lookback; e < n; ++e) {
        if (e < b1) {
            train_e.push_back(e);
        } else if (e < b1 + lookback || (e >= b2 && e < b2 + lookback)) {
            ++dropped;
        } else if (e < b2) {
            val_e.push_back(e);
        } else {
            test_e.push_back(e);
        }
    }

    WindowedDataset ds;
    ds.stats = stats;
    ds.lookback = lookback;
    ds.features = series.column_count();
    ds.train_count = train_e.size();
    ds.val_count = val_e.size();
    ds.test_count = test_e.size();
    ds.dropped = dropped;

    const std::size_t kept = train_e.size() + val_e.size() + test_e.size();
    ds.x = Tensor({kept, lookback, ds.features});
    ds.y.resize(kept);

    std::vector<std::size_t> order;
    order.reserve(kept);
    order.insert(order.end(), train_e.begin(), train_e.end());
    order.insert(order.end(), val_e.begin(), val_e.end());
    order.insert(order.end(), test_e.begin(), test_e.end());
    for (std::size_t w = 0; w < kept; ++w) {
        const std::size_t e = order[w];
        for (std::size_t t = 0; t < lookback; ++t) {
            const std::size_t row = e - lookback + t;
            ds.x(w, t, 0) = series.load[row];
            for (std::size_t f = 0; f < series.features.size(); ++f) {
                ds.x(w, t, f + 1) = series.features[f][row];
            }
        }
        ds.y[w] = series.load[e];
    }
    return ds;
}

WindowedDataset build_dataset(const LoadSeries& raw, std::size_t lookback) {
    const NormStats stats = fit_normalization(raw, raw.size() * 7 / 10);
    return window(apply_normalization(raw, stats), lookback, stats);
}

std::vector<double> persistence_forecast(const WindowedDataset& ds,
                                         std::pair<std::size_t, std::size_t> range) {
    std::vector<double> out;
    out.reserve(range.second - range.first);
    for (std::size_t i = range.first; i < range.second; ++i) {
        out.push_back(ds.x(i, ds.lookback - 1, 0));
    }
    return out;
}

LoadSeries synthetic_load(std::size_t days, std::uint64_t seed, const SyntheticSpec& spec) {
    if (days < 2) throw errors::domain("synthetic series needs at least 2 days");
    Rng rng(seed);
    LoadSeries series;
    const std::size_t hours = days * 24;
    series.timestamps.reserve(hours);
    series.load.reserve(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        const auto t = static_cast<double>(h);
        const double daily = spec.daily_amp * std::sin(2.0 * std::numbers::pi * t / 24.0);
        const double weekly = spec.weekly_amp * std::sin(2.0 * std::numbers::pi * t / 168.0);
        const double noise = spec.noise_sigma == 0.0 ? 0.0 : rng.normal(0.0, spec.noise_sigma);
        series.timestamps.push_back(spec.start_epoch + static_cast<std::int64_t>(h) * 3600);
        series.load.push_back(spec.base + daily + weekly + spec.trend_per_hour * t + noise);
    }
    return series;
}

void write_csv(const LoadSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw errors::io("cannot write " + path);
    out << "timestamp,load";
    for (const std::string& name : series.feature_names) out << ',' << name;
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.timestamps[i];
        std::snprintf(buf, sizeof(buf), ",%.17g", series.load[i]);
        out << buf;
        for (const auto& col : series.features) {
            std::snprintf(buf, sizeof(buf), ",%.17g", col[i]);
            out << buf;
        }
        out << '\n';
    }
    if (!out.good()) throw errors::io("failed while writing " + path);
}

}  // namespace loadcast::data
