#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "spdtest/ingest.hpp"

using namespace spdtest;
using namespace spdtest::testing;

namespace {

namespace fs = std::filesystem;

/// Scratch directory shared by the file-based tests.
fs::path scratch_dir() {
    const fs::path p = fs::temp_directory_path() / "spdtest_ingest_tests";
    fs::create_directories(p);
    return p;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

SeriesTable series_from(const std::vector<std::vector<double>>& cols) {
    SeriesTable s;
    for (std::size_t c = 0; c < cols.size(); ++c)
        s.column_names.push_back("c" + std::to_string(c));
    s.columns = cols;
    for (std::size_t r = 0; r < cols[0].size(); ++r) {
        s.timestamps.push_back(std::to_string(r));
        s.time_keys.push_back(static_cast<long long>(r));
    }
    return s;
}

}  // namespace

TEST_CASE("timestamp parsing") {
    CHECK(parse_timestamp("123") == 123000);
    CHECK(parse_timestamp("2017-11-08") ==
          parse_timestamp("2017-11-07") + 86400000);
    CHECK(parse_timestamp("2017-11-08 13:45") ==
          parse_timestamp("2017-11-08") + (13 * 60 + 45) * 60000);
    CHECK(parse_timestamp("2017-11-08T13:45:30") ==
          parse_timestamp("2017-11-08 13:45") + 30000);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), CsvFormatError);
    CHECK_THROWS_AS(parse_timestamp("2017-13-01"), CsvFormatError);
}

TEST_CASE("series CSV loading drops bad rows and enforces order") {
    const auto p = write_file("series.csv",
                              "time,btc,eth\n"
                              "1,100.0,10.0\n"
                              "2,101.0,\n"       // missing cell -> dropped
                              "3,abc,10.5\n"     // bad cell -> dropped
                              "4,102.0,10.5\n");
    ReadReport report;
    const SeriesTable s = read_series_csv(p.string(), {}, &report);
    CHECK(s.rows() == 2);
    CHECK(report.dropped_rows == 2);
    CHECK(s.column_names == std::vector<std::string>{"btc", "eth"});

    const SeriesTable one = read_series_csv(p.string(), {"eth"});
    CHECK(one.width() == 1);
    CHECK(one.columns[0][1] == 10.5);
    CHECK_THROWS_AS(read_series_csv(p.string(), {"doge"}), CsvFormatError);

    const auto bad = write_file("unordered.csv", "t,v\n5,1.0\n4,2.0\n");
    CHECK_THROWS_AS(read_series_csv(bad.string()), CsvFormatError);
}

TEST_CASE("log returns") {
    const double e = std::exp(1.0);
    const SeriesTable s = series_from({{1.0, e, e * e}});
    const SeriesTable r = log_returns(s);
    CHECK(r.rows() == 2);
    CHECK(r.columns[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.columns[0][1] == doctest::Approx(1.0).epsilon(1e-14));

    const SeriesTable flat = log_returns(series_from({{5.0, 5.0, 5.0, 5.0}}));
    for (double v : flat.columns[0]) CHECK(v == 0.0);

    CHECK_THROWS_AS(log_returns(series_from({{1.0, -2.0, 3.0}})),
                    NonPositiveValueError);
    CHECK_THROWS_AS(log_returns(series_from({{1.0}})), TooShortError);
}

TEST_CASE("log returns reconstruct the series") {
    RngStream rng(501, 0);
    std::vector<double> prices = {50.0};
    for (int k = 0; k < 200; ++k)
        prices.push_back(prices.back() * std::exp(0.01 * rng.normal()));
    const SeriesTable r = log_returns(series_from({prices}));
    double level = prices[0];
    for (std::size_t k = 0; k < r.rows(); ++k) {
        level *= std::exp(r.columns[0][k]);
        CHECK(level == doctest::Approx(prices[k + 1]).epsilon(1e-12));
    }
}

TEST_CASE("windowed covariances") {
    RngStream rng(502, 0);
    std::vector<double> a(2880), b(2880);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = rng.normal();
        b[k] = 0.5 * a[k] + rng.normal();
    }
    const MatrixSample sample = windowed_covariances(series_from({a, b}), 60);
    CHECK(sample.size() == 48);
    CHECK(sample.dim() == 2);
    for (std::size_t k = 0; k < sample.size(); ++k) {
        CHECK(sample[k](0, 1) == sample[k](1, 0));
        CHECK_NOTHROW(validate_spd(sample[k].entries(), Definiteness::Psd));
    }

    // identical rows give the zero matrix, still PSD-accepted
    const MatrixSample zeros =
        windowed_covariances(series_from({{3.0, 3.0, 3.0, 3.0}}), 2);
    CHECK(zeros.size() == 2);
    CHECK(zeros[0](0, 0) == 0.0);

    // partial last window is dropped
    CHECK(windowed_covariances(series_from({{1, 2, 3, 4, 5, 6, 7}}), 3).size() == 2);

    // population divisor rescales by (window-1)/window
    const SeriesTable two = series_from({{1.0, 3.0}});
    const double sample_est = windowed_covariances(two, 2)[0](0, 0);
    const double pop_est = windowed_covariances(two, 2, CovDivisor::N)[0](0, 0);
    CHECK(sample_est == doctest::Approx(2.0));
    CHECK(pop_est == doctest::Approx(1.0));

    CHECK_THROWS_AS(windowed_covariances(series_from({{1.0, 2.0}}), 1), TooShortError);
    CHECK_THROWS_AS(windowed_covariances(series_from({{1.0, 2.0}}), 5), TooShortError);
}

TEST_CASE("grouped covariances split and validate") {
    // two groups of identical records -> two zero matrices
    GroupedRecords g;
    g.feature_names = {"f1", "f2"};
    for (int k = 0; k < 3; ++k) {
        g.group_keys.push_back("north");
        g.features.push_back({1.0, 2.0});
    }
    for (int k = 0; k < 2; ++k) {
        g.group_keys.push_back("south");
        g.features.push_back({5.0, 5.0});
    }
    const auto [a, b] = group_covariances(
        g, [](const std::string& key) { return key == "north"; });
    CHECK(a.size() == 1);
    CHECK(b.size() == 1);
    CHECK(a[0](0, 0) == 0.0);
    CHECK(b[0](1, 1) == 0.0);

    GroupedRecords small = g;
    small.group_keys.push_back("lonely");
    small.features.push_back({0.0, 0.0});
    try {
        group_covariances(small, [](const std::string&) { return true; });
        CHECK(false);
    } catch (const GroupTooSmallError& e) {
        CHECK(std::string(e.what()).find("lonely") != std::string::npos);
    }

    CHECK_THROWS_AS(group_covariances(
                        g, [](const std::string&) { return true; }),
                    EmptySideError);
}

TEST_CASE("large group split mirrors regional sample sizes") {
    RngStream rng(503, 0);
    GroupedRecords g;
    g.feature_names = {"x", "y", "z"};
    for (int prov = 0; prov < 103; ++prov) {
        const std::string key = "prov" + std::to_string(prov);
        for (int rec = 0; rec < 5; ++rec) {
            g.group_keys.push_back(key);
            g.features.push_back({rng.normal(), rng.normal(), rng.normal()});
        }
    }
    const auto [north, south] = group_covariances(g, [](const std::string& key) {
        return std::stoi(key.substr(4)) < 67;
    });
    CHECK(north.size() == 67);
    CHECK(south.size() == 36);
    CHECK(north.dim() == 3);
}

TEST_CASE("grouped CSV loading") {
    const auto p = write_file("groups.csv",
                              "prov,PPCD,AGEN,RGDP\n"
                              "TO,1.0,2.0,3.0\n"
                              "TO,1.5,2.5,3.5\n"
                              "PA,4.0,5.0,6.0\n"
                              "PA,,5.0,6.0\n"  // dropped
                              "PA,4.5,5.5,6.5\n");
    ReadReport report;
    const GroupedRecords g =
        read_grouped_csv(p.string(), "prov", {"PPCD", "AGEN", "RGDP"}, &report);
    CHECK(g.group_keys.size() == 4);
    CHECK(report.dropped_rows == 1);
    CHECK_THROWS_AS(read_grouped_csv(p.string(), "region", {"PPCD"}, nullptr),
                    CsvFormatError);
}

TEST_CASE("matrix sample files round-trip") {
    RngStream rng(504, 0);
    MatrixSample sample;
    for (int k = 0; k < 5; ++k) sample.push_back(random_spd(3, rng));

    const auto p = scratch_dir() / "sample.csv";
    write_matrix_sample(sample, p.string());
    const MatrixSample back = read_matrix_sample(p.string());
    CHECK(back.size() == sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k)
        CHECK(back[k].entries() == sample[k].entries());

    CHECK_THROWS_AS(read_matrix_sample(write_file("bad1.csv", "2\n1,0,0,1\n").string()),
                    CsvFormatError);
    CHECK_THROWS_AS(read_matrix_sample(write_file("bad2.csv", "dim,2\n1,0,0\n").string()),
                    CsvFormatError);
    // symmetry is re-validated on load
    CHECK_THROWS_AS(
        read_matrix_sample(write_file("bad3.csv", "dim,2\n1,0.5,0,1\n").string()),
        NotSymmetricError);
    CHECK_THROWS_AS(
        read_matrix_sample(write_file("bad4.csv", "dim,2\n1,2,2,1\n").string()),
        NotPsdError);
}

TEST_CASE("matrix argument parsing") {
    CHECK(parse_matrix_arg("identity", 3, Definiteness::StrictPd)(2, 2) == 1.0);
    CHECK(parse_matrix_arg("identity*2.5", 2, Definiteness::StrictPd)(0, 0) == 2.5);
    CHECK(parse_matrix_arg("identity*0", 2, Definiteness::Psd)(0, 0) == 0.0);
    CHECK_THROWS_AS(parse_matrix_arg("identity*x", 2, Definiteness::Psd),
                    CsvFormatError);

    const auto p = write_file("mat.csv", "2,1\n1,2\n");
    const SpdMatrix m = parse_matrix_arg(p.string(), 2, Definiteness::StrictPd);
    CHECK(m(0, 1) == 1.0);
    CHECK_THROWS_AS(parse_matrix_arg(p.string(), 3, Definiteness::StrictPd),
                    DimensionMismatchError);
}
