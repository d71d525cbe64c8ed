#include "reference.hpp"
#include "taraarch/json_io.hpp"
#include "taraarch/simulate.hpp"
#include "taraarch/csv_io.hpp"
#include "taraarch_cli/cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace taraarch;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run call(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Scratch {
public:
    Scratch() : dir_(fs::temp_directory_path() / ("taraarch_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }
    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string series_csv(std::size_t n, std::uint64_t seed) {
    const auto path = simulate_path(testing::reference_spec(), SimConfig{.n = n, .seed = seed});
    std::ostringstream s;
    write_column(s, path.series.values(), "x");
    return s.str();
}

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(call({"--help"}).code == cli::kOk);
    CHECK(call({}).code == cli::kUsageError);
    CHECK(call({"price", "--spot", "100"}).code == cli::kUsageError);
    CHECK(call({"transform", "--input", "x.csv", "--bogus"}).code == cli::kUsageError);
    CHECK(call({"--format", "xml", "price", "--spot", "1", "--strike", "1", "--rate", "0", "--sigma", "1", "--tau", "1"})
              .code == cli::kUsageError);
}

TEST_CASE("price prints the call value") {
    const auto r = call({"price", "--spot", "100", "--strike", "100", "--rate", "0", "--sigma", "0.2", "--tau", "1"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "7.965567455\n");
    const auto j = call({"--format", "json", "price", "--spot", "100", "--strike", "100", "--rate", "0", "--sigma",
                         "0.2", "--tau", "1"});
    const auto doc = Json::parse(j.out);
    CHECK(doc["price"].get<double>() == Catch::Approx(7.96556745540579664).epsilon(1e-15));
    CHECK(doc["config"]["sigma"].get<double>() == 0.2);
    CHECK(call({"price", "--spot", "100", "--strike", "100", "--rate", "0", "--sigma", "0", "--tau", "1"}).code ==
          cli::kUsageError);
}

TEST_CASE("transform writes returns") {
    const Scratch s;
    const auto in = s.write("p.csv", "close\n100\n101\n");
    const auto r = call({"transform", "--input", in, "--method", "log100"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out == "log100\n0.99503308531680923\n");
    const auto bad = s.write("bad.csv", "close\n100\nabc\n");
    const auto b = call({"transform", "--input", bad, "--method", "log100"});
    CHECK(b.code == cli::kDataError);
    CHECK_THAT(b.err, ContainsSubstring("bad.csv:3"));
    const auto zero = s.write("z.csv", "100\n0\n");
    CHECK(call({"transform", "--input", zero, "--method", "relative"}).code == cli::kDataError);
    CHECK(call({"transform", "--input", s.path("missing.csv"), "--method", "log"}).code == cli::kDataError);
    CHECK(call({"transform", "--input", in, "--method", "sqrt"}).code == cli::kUsageError);
}

TEST_CASE("simulate is reproducible and warns on nonstationary specs") {
    const Scratch s;
    const auto spec = s.write("spec.json", spec_to_json(testing::reference_spec()).dump());
    const auto a = call({"--seed", "5", "simulate", "--spec", spec, "--n", "50"});
    const auto b = call({"--seed", "5", "simulate", "--spec", spec, "--n", "50"});
    const auto c = call({"--seed", "6", "simulate", "--spec", spec, "--n", "50"});
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(a.out.rfind("index,x,h,z\n", 0) == 0);
    CHECK(a.err.empty());

    const auto file = s.path("out.csv");
    CHECK(call({"--seed", "5", "--output", file, "simulate", "--spec", spec, "--n", "50"}).code == cli::kOk);
    CHECK(slurp(file) == a.out);

    const auto lynx = call({"--seed", "1", "simulate", "--canned", "lynx", "--n", "20"});
    CHECK(lynx.code == cli::kOk);
    CHECK_THAT(lynx.err, ContainsSubstring("warning"));

    CHECK(call({"simulate", "--n", "10"}).code == cli::kUsageError);
    CHECK(call({"simulate", "--canned", "nile", "--n", "10"}).code == cli::kUsageError);
    CHECK(call({"simulate", "--spec", spec, "--canned", "lynx", "--n", "10"}).code == cli::kUsageError);
    CHECK(call({"simulate", "--canned", "sunspot", "--n", "10"}).code == cli::kDataError);
    const auto broken = s.write("broken.json", "{\"p\": 1");
    CHECK(call({"simulate", "--spec", broken, "--n", "10"}).code == cli::kDataError);
}

TEST_CASE("explosive simulation is a data error naming the index") {
    const Scratch s;
    const ModelSpec wild(ThresholdPartition::single_regime(), TarParams::zeros(1, 0), AarchParams(1.0, {3.0}, {0.0}));
    const auto spec = s.write("wild.json", spec_to_json(wild).dump());
    const auto r = call({"simulate", "--spec", spec, "--n", "5000", "--burn-in", "0"});
    CHECK(r.code == cli::kDataError);
    CHECK_THAT(r.err, ContainsSubstring("time index"));
    CHECK_THAT(r.err, ContainsSubstring("warning"));
}

TEST_CASE("fit reports estimates as json or csv") {
    const Scratch s;
    const auto data = s.write("x.csv", series_csv(1500, 3));
    const auto j = call({"fit", "--input", data, "--threshold", "0"});
    REQUIRE(j.code == cli::kOk);
    const auto doc = Json::parse(j.out);
    CHECK(doc["estimator"] == "concentrated");
    CHECK(doc["converged"].get<bool>());
    CHECK(doc["params"].size() == 7);
    CHECK(doc["config"]["thresholds"][0].get<double>() == 0.0);
    CHECK(call({"fit", "--input", data, "--threshold", "0"}).out == j.out);

    const auto c = call({"--format", "csv", "fit", "--input", data, "--threshold", "0", "--variance-form", "symmetric"});
    REQUIRE(c.code == cli::kOk);
    CHECK(c.out.rfind("name,estimate,std_error\nphi[0][0],", 0) == 0);

    const auto full = call({"fit", "--input", data, "--threshold", "0", "--variance-form", "symmetric", "--estimator",
                            "full_symmetric"});
    CHECK(full.code == cli::kOk);
    CHECK(Json::parse(full.out)["estimator"] == "full_symmetric");
    CHECK(call({"fit", "--input", data, "--threshold", "0", "--estimator", "full_symmetric"}).code == cli::kUsageError);
    CHECK(call({"fit", "--input", data, "--threshold", "1,0"}).code == cli::kUsageError);
}

TEST_CASE("fit search selects a partition") {
    const Scratch s;
    const auto data = s.write("x.csv", series_csv(1500, 4));
    const auto r = call({"fit", "--input", data, "--search", "--delays", "1,2", "--quantile-step", "0.1"});
    REQUIRE(r.code == cli::kOk);
    const auto doc = Json::parse(r.out);
    CHECK(doc.contains("search"));
    CHECK(doc["partition"]["delay"] == 1);
    CHECK(call({"fit", "--input", data, "--search"}).code == cli::kUsageError);
}

TEST_CASE("fit refuses series that are too short") {
    const Scratch s;
    const auto data = s.write("short.csv", series_csv(60, 5));
    const auto r = call({"fit", "--input", data, "--threshold", "0"});
    CHECK(r.code == cli::kUsageError);
    CHECK_THAT(r.err, ContainsSubstring("n > 10 k"));
    CHECK(call({"fit", "--input", s.path("nope.csv"), "--threshold", "0"}).code == cli::kDataError);
}

TEST_CASE("fit with an empty regime is a data error") {
    const Scratch s;
    const auto data = s.write("x.csv", series_csv(800, 6));
    CHECK(call({"fit", "--input", data, "--threshold", "100"}).code == cli::kDataError);
}

TEST_CASE("mc runs plans deterministically across thread counts") {
    const Scratch s;
    ExperimentPlan plan{.true_spec = testing::reference_spec(), .sample_sizes = {300, 600}, .replicates = 6,
                        .base_seed = 42, .burn_in = 100};
    auto doc = plan_to_json(plan);
    doc["diagnostics"] = {"monotone"};
    const auto p = s.write("plan.json", doc.dump());
    const auto rows = s.path("rows.csv");
    const auto a = call({"mc", "--plan", p, "--threads", "1", "--rows", rows});
    const auto b = call({"mc", "--plan", p, "--threads", "3"});
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    const auto body = Json::parse(a.out);
    CHECK(body["kind"] == "experiment");
    CHECK(body.contains("variances_monotone"));
    CHECK(body["summary"]["cells"].size() == 2);

    const auto again = call({"mc", "--plan", p, "--from-rows", rows});
    REQUIRE(again.code == cli::kOk);
    CHECK(again.out == a.out);

    const auto reseeded = call({"--seed", "43", "mc", "--plan", p, "--threads", "1"});
    CHECK(reseeded.out != a.out);

    plan.sample_sizes = {8};
    plan.replicates = 2;
    const auto failing = s.write("fail.json", plan_to_json(plan).dump());
    CHECK(call({"mc", "--plan", failing}).code == cli::kFailedExperiment);

    auto bad = plan_to_json(plan);
    bad["diagnostics"] = {"chi2"};
    CHECK(call({"mc", "--plan", s.write("bad.json", bad.dump())}).code == cli::kDataError);
}
