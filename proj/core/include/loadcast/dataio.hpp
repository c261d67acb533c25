#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "loadcast/tensor.hpp"

namespace loadcast::data {

/// A cleaned, strictly increasing time series of load values plus optional
/// exogenous feature columns.
struct LoadSeries {
    std::vector<std::int64_t> timestamps;  // epoch seconds, strictly increasing
    std::vector<double> load;              // kWh per interval
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> features;  // one column per name

    std::size_t size() const { return load.size(); }
    std::size_t column_count() const { return 1 + features.size(); }
};

/// Column mapping for CSV ingestion. Parsed from "ts=<col>,load=<col>" with an
/// optional ",features=<col>+<col>+..." part.
struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string load_column = "load";
    std::vector<std::string> feature_columns;
};

CsvSchema schema_from_string(const std::string& spec);

/// Row accounting for the gap policy; rows_in == rows_kept + rows_dropped and
/// the returned series holds rows_kept + rows_interpolated rows.
struct IngestReport {
    std::size_t rows_in = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_interpolated = 0;
    std::size_t rows_dropped = 0;
    std::size_t segments_discarded = 0;
    std::string note;
};

/// Reads a headered CSV, sorts by timestamp, rejects duplicate timestamps,
/// linearly interpolates gaps of up to 3 base intervals and otherwise keeps
/// only the longest contiguous segment. Timestamps may be epoch seconds or
/// ISO-8601 (auto-detected); the base interval is the smallest observed
/// timestamp difference.
LoadSeries ingest_csv(const std::string& path, const CsvSchema& schema,
                      IngestReport* report = nullptr);

/// Per-column min/max taken from training rows only. Column 0 is the load;
/// exogenous features follow in schema order.
struct NormStats {
    std::vector<std::string> names;
    std::vector<double> col_min;
    std::vector<double> col_max;

    double norm_load(double v) const { return (v - col_min[0]) / (col_max[0] - col_min[0]); }
    double denorm_load(double v) const { return v * (col_max[0] - col_min[0]) + col_min[0]; }
    double load_scale() const { return col_max[0] - col_min[0]; }
};

/// Fits min/max per column over the first `train_rows` rows. A constant
/// column raises a configuration error naming it.
NormStats fit_normalization(const LoadSeries& series, std::size_t train_rows);

/// Min-max maps every column to [0,1] on training rows; values outside the
/// training range map outside [0,1] (no clamping).
LoadSeries apply_normalization(const LoadSeries& series, const NormStats& stats);

/// Supervised windows over a (normalized) series with a chronological
/// 70/15/15 split. Feature 0 of every window is the load column.
struct WindowedDataset {
    Tensor x;               // (n x lookback x features)
    std::vector<double> y;  // load at each window's next step
    NormStats stats;
    std::size_t lookback = 0;
    std::size_t features = 0;
    std::size_t train_count = 0;
    std::size_t val_count = 0;
    std::size_t test_count = 0;
    std::size_t dropped = 0;  // windows straddling a split boundary

    std::size_t size() const { return y.size(); }
    Tensor window(std::size_t i) const;

    // [begin, end) index ranges into x/y per split, in chronological order.
    std::pair<std::size_t, std::size_t> train_range() const { return {0, train_count}; }
    std::pair<std::size_t, std::size_t> val_range() const {
        return {train_count, train_count + val_count};
    }
    std::pair<std::size_t, std::size_t> test_range() const {
        return {train_count + val_count, train_count + val_count + test_count};
    }
};

/// Builds all length-`lookback` windows with next-step targets, splits them
/// chronologically by row boundaries at 70% and 85%, and drops windows that
/// straddle a boundary. `series` must already be normalized with `stats`.
/// Only horizon 1 is supported.
WindowedDataset window(const LoadSeries& series, std::size_t lookback, const NormStats& stats,
                       std::size_t horizon = 1);

/// fit_normalization on the 70% training rows + apply_normalization + window.
WindowedDataset build_dataset(const LoadSeries& raw, std::size_t lookback);

/// Naive last-value forecast for the windows in [range.first, range.second):
/// the prediction for each window is its final load value (normalized scale).
std::vector<double> persistence_forecast(const WindowedDataset& ds,
                                         std::pair<std::size_t, std::size_t> range);

/// Generator constants for the synthetic hourly benchmark series; documented
/// so thresholds computed against it stay stable.
struct SyntheticSpec {
    double base = 1000.0;        // kWh level
    double daily_amp = 250.0;    // 24 h sinusoid amplitude
    double weekly_amp = 120.0;   // 168 h sinusoid amplitude
    double trend_per_hour = 0.02;
    double noise_sigma = 15.0;   // Gaussian, seeded
    std::int64_t start_epoch = 1609459200;  // 2021-01-01T00:00:00Z
};

/// Hourly synthetic series: base + daily + weekly sinusoids + linear trend +
/// seeded Gaussian noise. Requires days >= 2.
LoadSeries synthetic_load(std::size_t days, std::uint64_t seed, const SyntheticSpec& spec = {});

/// Writes a series as CSV with epoch-second timestamps (header: timestamp,load[,features...]).
void write_csv(const LoadSeries& series, const std::string& path);

}  // namespace loadcast::data
