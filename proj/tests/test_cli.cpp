#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wrist/features.hpp"
#include "wrist/gbdt.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(WRISTCTL_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("wristctl_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const TempDir& tmp() {
    static TempDir d;
    return d;
}

}  // namespace

TEST_CASE("every subcommand documents its flags and defaults") {
    auto top = run("--help");
    CHECK(top.code == 0);
    CHECK(top.out.find("--seed UINT [42]") != std::string::npos);
    for (const char* sub : {"generate", "extract", "pca-report", "train", "grid-search", "evaluate", "replay", "pipeline"}) {
        auto r = run(std::string(sub) + " --help");
        CHECK_MESSAGE(r.code == 0, sub);
        CHECK_MESSAGE(r.out.find("Options:") != std::string::npos, sub);
    }
    auto train = run("train --help");
    for (const char* flag : {"--n-estimators INT [100]", "--learning-rate FLOAT [0.1]", "--max-depth INT [6]",
                             "--tree-algorithm TEXT [exact]"})
        CHECK_MESSAGE(train.out.find(flag) != std::string::npos, flag);
    CHECK(run("generate --help").out.find("--n-per-class") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("train --no-such-flag").code == 2);
    CHECK(run("train").code == 2);
    CHECK(run("generate --n-per-class notanumber").code == 2);
}

TEST_CASE("generate, extract, train and evaluate chain together") {
    const auto& d = tmp();
    auto g = run("--seed 42 --quiet generate --n-per-class 200 --out " + d / "corpus.csv");
    REQUIRE(g.code == 0);
    auto e = run("--quiet extract --in " + d / "corpus.csv --out " + d / "features.csv");
    REQUIRE(e.code == 0);
    auto features = slurp(d.path / "features.csv");
    CHECK(lines(features) == 401);
    CHECK(features.rfind("ax_min,ax_mean,ax_max", 0) == 0);

    auto t = run("--quiet train --in " + d / "features.csv --out " + d / "model.json" +
                 " --n-estimators 1000 --tree-algorithm hist --max-depth 1 --learning-rate 0.1");
    REQUIRE(t.code == 0);
    auto model = wrist::load_model(slurp(d.path / "model.json"));
    CHECK(model.trees.size() == 1000);
    CHECK(model.config.tree_algorithm == wrist::TreeAlgorithm::hist);
    CHECK(model.config.max_depth == 1);
    CHECK(model.feature_names == wrist::feature_names());

    auto ev = run("evaluate --model " + d / "model.json --in " + d / "features.csv --roc-out " + d / "roc.csv");
    CHECK(ev.code == 0);
    CHECK(ev.out.find("AUROC") != std::string::npos);
    CHECK(fs::exists(d.path / "roc.csv"));

    // the trace input path gives the same evaluation
    auto ev2 = run("evaluate --model " + d / "model.json --in " + d / "corpus.csv");
    CHECK(ev2.code == 0);
    CHECK(ev2.out == ev.out);
}

TEST_CASE("outputs are byte-identical across runs") {
    const auto& d = tmp();
    REQUIRE(run("--seed 7 --quiet generate --n-per-class 20 --out " + d / "a.csv").code == 0);
    REQUIRE(run("--seed 7 --quiet generate --n-per-class 20 --out " + d / "b.csv").code == 0);
    CHECK(slurp(d.path / "a.csv") == slurp(d.path / "b.csv"));
    REQUIRE(run("--seed 8 --quiet generate --n-per-class 20 --out " + d / "c.csv").code == 0);
    CHECK(slurp(d.path / "a.csv") != slurp(d.path / "c.csv"));

    REQUIRE(run("--quiet train --in " + d / "a.csv --out " + d / "m1.json --n-estimators 30").code == 0);
    REQUIRE(run("--quiet train --in " + d / "a.csv --out " + d / "m2.json --n-estimators 30").code == 0);
    CHECK(slurp(d.path / "m1.json") == slurp(d.path / "m2.json"));
}

TEST_CASE("bad inputs exit 1 with a message") {
    const auto& d = tmp();
    {
        std::ofstream bad(d / "bad.csv");
        bad << "t,ax,ay,az,gx,gy,gz,switch,label\n0,1,2,3,4,5,6,1,0\n0.01,x,2,3,4,5,6,1,0\n";
    }
    auto r = run("extract --in " + d / "bad.csv");
    CHECK(r.code == 1);
    CHECK(r.out.find("line 3") != std::string::npos);
    CHECK(run("evaluate --model " + d / "missing.json --in " + d / "bad.csv").code == 1);
    {
        std::ofstream junk(d / "junk.json");
        junk << "{\"format\":\"nope\"}";
    }
    auto m = run("evaluate --model " + d / "junk.json --in " + d / "bad.csv");
    CHECK(m.code == 1);
    CHECK(m.out.find("model") != std::string::npos);
    CHECK(run("generate --n-per-class 0").code == 1);
}

TEST_CASE("replay prints one prediction per segment") {
    const auto& d = tmp();
    REQUIRE(run("--seed 3 --quiet generate --n-per-class 4 --out " + d / "r.csv").code == 0);
    REQUIRE(run("--quiet train --in " + d / "r.csv --out " + d / "rm.json --n-estimators 20 --min-child-weight 0.1")
                .code == 0);
    auto r = run("--quiet replay --model " + d / "rm.json --input " + d / "r.csv");
    REQUIRE(r.code == 0);
    CHECK(lines(r.out) == 8);
    std::istringstream in(r.out);
    std::string line;
    while (std::getline(in, line)) {
        auto comma = std::count(line.begin(), line.end(), ',');
        CHECK(comma == 3);
        auto prob = line.substr(line.rfind(',') + 1);
        CHECK(prob.size() == 8);  // d.dddddd
    }
}

TEST_CASE("grid search writes a config that train accepts") {
    const auto& d = tmp();
    REQUIRE(run("--seed 5 --quiet generate --n-per-class 30 --out " + d / "g.csv").code == 0);
    auto g = run("--quiet grid-search --in " + d / "g.csv --folds 3 --out " + d / "grid.csv --best-config " +
                 d / "best.json --grid-n-estimators 20,40 --grid-tree-algorithm hist --grid-max-depth 1,2 "
                 "--grid-learning-rate 0.3");
    REQUIRE(g.code == 0);
    CHECK(lines(slurp(d.path / "grid.csv")) == 5);
    auto best = wrist::config_from_json(slurp(d.path / "best.json"));
    CHECK(best.tree_algorithm == wrist::TreeAlgorithm::hist);
    REQUIRE(run("--quiet train --in " + d / "g.csv --out " + d / "gm.json --config " + d / "best.json").code == 0);
    auto m = wrist::load_model(slurp(d.path / "gm.json"));
    CHECK(m.config == best);
    // explicit flags override the file
    REQUIRE(run("--quiet train --in " + d / "g.csv --out " + d / "gm2.json --config " + d / "best.json" +
                " --max-depth 3")
                .code == 0);
    CHECK(wrist::load_model(slurp(d.path / "gm2.json")).config.max_depth == 3);
}

TEST_CASE("smoke pipeline runs in both PCA modes") {
    const auto& d = tmp();
    for (const char* mode : {"projection", "loadings"}) {
        std::string out = d / (std::string("pipe_") + mode);
        auto r = run("--quiet pipeline --smoke --n-per-class 40 --folds 3 --pca-mode " + std::string(mode) +
                     " --out-dir " + out);
        REQUIRE_MESSAGE(r.code == 0, r.out);
        for (const char* f : {"corpus.csv", "features.csv", "grid_full.csv", "grid_pca3.csv", "best_config.json",
                              "model.json", "roc_full.csv", "roc_pca3.csv", "replay.csv", "summary.txt"})
            CHECK_MESSAGE(fs::exists(fs::path(out) / f), f);
        auto summary = slurp(fs::path(out) / "summary.txt");
        CHECK(summary.find("test AUROC") != std::string::npos);
        CHECK(summary.find(mode) != std::string::npos);
    }
}
