#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "loadcast/error.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/rng.hpp"

using namespace loadcast;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

double oracle_r2(const std::vector<double>& y, const std::vector<double>& yhat) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double res = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        tot += (y[i] - mean) * (y[i] - mean);
    }
    return 1.0 - res / tot;
}

}  // namespace

TEST_CASE("perfect predictions score r2 of one") {
    CHECK(metrics::r_squared({1, 2, 3}, {1, 2, 3}) == 1.0);
}

TEST_CASE("predicting the mean scores r2 of zero") {
    CHECK(std::fabs(metrics::r_squared({1, 2, 3}, {2, 2, 2})) < 1e-15);
}

TEST_CASE("r2 rejects constant targets and tiny samples") {
    CHECK_THROWS_AS(metrics::r_squared({5, 5, 5}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(metrics::r_squared({5}, {1}), Error);
    try {
        metrics::r_squared({5, 5}, {1, 2});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("exact predictions give zero mape and mae") {
    CHECK(metrics::mape_percent({10, 20}, {10, 20}) == 0.0);
    CHECK(metrics::mae({10, 20}, {10, 20}) == 0.0);
}

TEST_CASE("mape hand arithmetic") {
    CHECK(std::fabs(metrics::mape_percent({100, 200}, {110, 180}) - 10.0) < 1e-12);
}

TEST_CASE("the two-percent example is exact, not approximate") {
    CHECK(metrics::mape_percent({100}, {98}) == 2.0);
}

TEST_CASE("mape rejects zero targets and lists the offending index") {
    try {
        metrics::mape_fraction({1.0, 0.0, 2.0}, {1, 1, 1});
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("mae hand arithmetic") {
    CHECK(metrics::mae({1, 2}, {2, 4}) == 1.5);
}

TEST_CASE("length mismatch is a shape error") {
    CHECK_THROWS_AS(metrics::mae({1, 2}, {1}), Error);
}

TEST_CASE("metrics match direct-formula oracles on a thousand random cases") {
    Rng rng(2024);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 2 + rng.below(40);
        auto y = random_vector(rng, n, 10.0, 500.0);
        auto yhat = random_vector(rng, n, 10.0, 500.0);
        y[0] += 1.0;  // guarantees a non-constant target
        worst = std::max(worst, std::fabs(metrics::r_squared(y, yhat) - oracle_r2(y, yhat)));
        double m = 0.0, a = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m += std::fabs(y[i] - yhat[i]) / std::fabs(y[i]);
            a += std::fabs(y[i] - yhat[i]);
        }
        worst = std::max(worst,
                         std::fabs(metrics::mape_fraction(y, yhat) - m / static_cast<double>(n)));
        worst = std::max(worst, std::fabs(metrics::mae(y, yhat) - a / static_cast<double>(n)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("mae scales with the data while mape does not") {
    Rng rng(5);
    const auto y = random_vector(rng, 20, 50.0, 100.0);
    const auto yhat = random_vector(rng, 20, 50.0, 100.0);
    std::vector<double> y3(20), yhat3(20);
    for (std::size_t i = 0; i < 20; ++i) {
        y3[i] = 3.0 * y[i];
        yhat3[i] = 3.0 * yhat[i];
    }
    CHECK(std::fabs(metrics::mae(y3, yhat3) - 3.0 * metrics::mae(y, yhat)) < 1e-9);
    CHECK(std::fabs(metrics::mape_percent(y3, yhat3) - metrics::mape_percent(y, yhat)) < 1e-9);
}

TEST_CASE("pointwise better predictions never lower r2") {
    Rng rng(6);
    const auto y = random_vector(rng, 30, 100.0, 200.0);
    std::vector<double> worse(30), better(30);
    for (std::size_t i = 0; i < 30; ++i) {
        const double r = rng.uniform(-20.0, 20.0);
        worse[i] = y[i] + r;
        better[i] = y[i] + r / 2.0;  // strictly smaller absolute residual
    }
    CHECK(metrics::r_squared(y, better) >= metrics::r_squared(y, worse));
}

TEST_CASE("report JSON carries exactly the four fields") {
    const auto report = metrics::evaluate({100, 120, 140}, {102, 118, 143});
    const auto j = nlohmann::json::parse(metrics::to_json(report));
    CHECK(j.size() == 4);
    CHECK(j.contains("r2"));
    CHECK(j.contains("mape_percent"));
    CHECK(j.contains("mae"));
    CHECK(j.at("n").get<std::size_t>() == 3);
    CHECK(report.residuals.size() == 3);
}

TEST_CASE("report CSV uses the table column order") {
    const auto report = metrics::evaluate({100, 120, 140}, {102, 118, 143});
    const auto csv = metrics::to_csv(report);
    CHECK(csv.rfind("r2,mape_percent,mae\n", 0) == 0);
}
