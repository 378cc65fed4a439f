#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = PARTDIST_CLI_PATH;
const fs::path data_dir = PARTDIST_DATA_DIR;

const fs::path& scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "partdist_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs the tool through the shell; captures stdout, silences stderr.
RunResult run(const std::string& args) {
    const std::string cmd = cli + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    RunResult res;
    if (WIFEXITED(status)) res.code = WEXITSTATUS(status);
    res.out = std::move(out);
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("compare reports exact criteria for a stored matrix") {
    const fs::path out = scratch() / "iris.json";
    const RunResult res =
        run("compare --matrix " + (data_dir / "iris.csv").string() + " --out " + out.string());
    REQUIRE(res.code == 0);
    // stdout keeps the human-readable table even when JSON goes to a file
    CHECK(res.out.find("1/50") != std::string::npos);
    CHECK(res.out.find("criterion") != std::string::npos);

    const json j = load_json(out);
    CHECK(j["input"]["r"] == 3);
    CHECK(j["input"]["s"] == 3);
    CHECK(j["input"]["n"] == 150);
    CHECK(j["input"]["matrix"] == json::parse("[[50,0,0],[0,48,2],[0,1,49]]"));
    CHECK(j["pair_counts"]["a"] == 3530);
    CHECK(j["pair_counts"]["b"].get<long long>() + j["pair_counts"]["c"].get<long long>() == 291);
    CHECK(j["criteria"]["med"]["exact"] == "1/50");
    CHECK(j["criteria"]["rd"]["exact"] == "97/3725");
    CHECK(j["criteria"]["ard"]["exact"] == "14453/245017");
    CHECK(j["criteria"]["hamming"]["exact"] == "97/3750");
    CHECK(j["provenance"]["subcommand"] == "compare");
    CHECK(j["notes"].empty());
}

TEST_CASE("compare accepts two-column label files") {
    const fs::path labels = scratch() / "labels.txt";
    spit(labels, "# two labelings, one object per line\na x\na x\nb y\nb y\nb z\n");
    const fs::path out = scratch() / "labels.json";
    const RunResult res =
        run("compare --labels " + labels.string() + " --out " + out.string());
    REQUIRE(res.code == 0);
    const json j = load_json(out);
    CHECK(j["input"]["r"] == 2);
    CHECK(j["input"]["s"] == 3);
    CHECK(j["input"]["n"] == 5);
    CHECK(j["input"]["matrix"] == json::parse("[[2,0,0],[0,2,1]]"));
    CHECK(j["criteria"]["med"]["exact"] == "1/5");
}

TEST_CASE("compare emits a criterion,exact,value csv") {
    const fs::path out = scratch() / "iris.csv";
    const RunResult res = run("compare --matrix " + (data_dir / "iris.csv").string() +
                              " --format csv --out " + out.string());
    REQUIRE(res.code == 0);
    const std::string text = slurp(out);
    CHECK(text.find("criterion,exact,value") != std::string::npos);
    CHECK(text.find("med,1/50,0.02") != std::string::npos);
    CHECK(text.find("# subcommand=compare") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1, help and version with 0") {
    CHECK(run("compare").code == 1);                      // neither input given
    CHECK(run("compare --matrix " + (scratch() / "missing.csv").string()).code == 1);
    CHECK(run("compare --matrix " + (data_dir / "iris.csv").string() + " --nope").code == 1);
    CHECK(run("no-such-subcommand").code == 1);
    CHECK(run("").code == 1);                             // a subcommand is required

    const fs::path bad = scratch() / "bad.csv";
    spit(bad, "1,x\n");
    CHECK(run("compare --matrix " + bad.string()).code == 1);

    CHECK(run("--help").code == 0);
    const RunResult ver = run("--version");
    CHECK(ver.code == 0);
    CHECK(ver.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("extremes reports closed forms and witnesses") {
    const fs::path out = scratch() / "ext55.json";
    REQUIRE(run("extremes --r 5 --s 5 --n 100 --out " + out.string()).code == 0);
    const json j = load_json(out);
    CHECK(j["max_med"]["exact"] == "4/5");
    CHECK(j["rd"]["max_rd"]["exact"] == "151/198");
    CHECK(j["rd"]["witness_first_row"] == json::parse("[22,19,19,18,18]"));
    CHECK(j["rd"]["witness_attains"] == true);
    CHECK(j["independence"]["nrd"]["exact"] == "64/151");

    const fs::path out2 = scratch() / "ext22.json";
    REQUIRE(run("extremes --r 2 --s 2 --n 20 --out " + out2.string()).code == 0);
    const json k = load_json(out2);
    CHECK(k["two_by_two_ard"]["max_ard"]["exact"] == "95/84");
    CHECK(k["two_by_two_ard"]["d1"] == 12);
    CHECK(k["two_by_two_ard"]["witness"] == json::parse("[[12,4],[4,0]]"));
    CHECK(k["independence"]["nrd"]["exact"] == "1");

    // Small n puts the rand-distance closed form out of scope.
    const fs::path out3 = scratch() / "ext_small.json";
    REQUIRE(run("extremes --r 3 --s 3 --n 4 --out " + out3.string()).code == 0);
    CHECK(load_json(out3)["rd"].is_null());
}

TEST_CASE("enumerate counts families and respects the guard") {
    const fs::path out = scratch() / "count2220.json";
    REQUIRE(run("enumerate --r 2 --s 2 --n 20 --count-only --out " + out.string()).code == 0);
    CHECK(load_json(out)["family_size"] == "1691");

    // Guard smaller than the family: infeasible, exit code 2.
    CHECK(run("enumerate --r 3 --s 3 --n 20 --max-enum 1000").code == 2);

    const fs::path cond = scratch() / "cond2220.json";
    REQUIRE(run("enumerate --r 2 --s 2 --n 20 --out " + cond.string()).code == 0);
    const json j = load_json(cond);
    CHECK(j["family_size"] == "1691");
    CHECK(j["conditional"]["ard_max"]["exact"] == "95/84");
    CHECK(j["med_marginal"]["count"] == 1691);
}

TEST_CASE("sample rejects an empty family with exit code 2") {
    CHECK(run("sample --r 5 --s 5 --n 3 --samples 10").code == 2);
}

TEST_CASE("seeded commands replay byte for byte") {
    const fs::path a = scratch() / "rep_a.json", b = scratch() / "rep_b.json";

    const std::string sample_args = "sample --r 3 --s 3 --n 30 --samples 5000 --seed 42 --out ";
    REQUIRE(run(sample_args + a.string()).code == 0);
    REQUIRE(run(sample_args + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));

    const std::string null_args = "null-sim --r 2 --s 2 --n 50 --reps 500 --seed 7 --out ";
    REQUIRE(run(null_args + a.string()).code == 0);
    REQUIRE(run(null_args + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));

    const std::string pert_args =
        "perturb --s 3 --n 20 --moves 13 --reps 50 --seed 9 --format csv --out ";
    REQUIRE(run(pert_args + a.string()).code == 0);
    REQUIRE(run(pert_args + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find(",13/20,") != std::string::npos);
    CHECK(slurp(a).find("rep,moves,overlap_exact") != std::string::npos);
}

TEST_CASE("seeds can come from the environment") {
    const fs::path a = scratch() / "env_a.json", b = scratch() / "env_b.json";
    REQUIRE(run("null-sim --r 2 --s 2 --n 30 --reps 200 --seed 99 --out " + a.string()).code == 0);
    const std::string cmd = "PARTDIST_SEED=99 " + cli +
                            " null-sim --r 2 --s 2 --n 30 --reps 200 --out " + b.string() +
                            " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("reproduce writes per-target artifacts deterministically") {
    const fs::path d1 = scratch() / "fig1_a", d2 = scratch() / "fig1_b";
    REQUIRE(run("reproduce figure1 --n 20 --out " + d1.string()).code == 0);
    REQUIRE(run("reproduce figure1 --n 20 --out " + d2.string()).code == 0);
    REQUIRE(fs::exists(d1 / "figure1_profile.csv"));
    const std::string csv = slurp(d1 / "figure1_profile.csv");
    CHECK(csv == slurp(d2 / "figure1_profile.csv"));
    CHECK(csv.find("95/84") != std::string::npos);
}

TEST_CASE("reproduce tables verifies the stored expectations") {
    const fs::path dir = scratch() / "tables";
    const RunResult res = run("reproduce tables --expected " +
                              (data_dir / "reference_values.json").string() + " --out " +
                              dir.string());
    REQUIRE(res.code == 0);
    const std::string report = slurp(dir / "tables_report.csv");
    CHECK(report.find(",false") == std::string::npos);
    CHECK(report.find("iris_med,") != std::string::npos);
}
