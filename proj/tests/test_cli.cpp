#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "dlsc/archive.hpp"
#include "dlsc/netio.hpp"

using namespace dlsc;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir()
{
    static const fs::path d = [] {
        const fs::path p = fs::temp_directory_path() / ("dlsc_cli_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

int run(const std::string& args)
{
    const std::string cmd = std::string(DLSC_CLI_PATH) + " " + args + " >" + (work_dir() / "stdout").string() +
                            " 2>" + (work_dir() / "stderr").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

struct Cleanup
{
    ~Cleanup() { fs::remove_all(work_dir()); }
} cleanup;

std::string path(const std::string& name) { return (work_dir() / name).string(); }

std::vector<Record> records(const std::string& file)
{
    std::istringstream in(read_file(file));
    return parse_records(in);
}

double record(const std::vector<Record>& recs, const std::string& name, const std::string& key,
              const std::string& value)
{
    for (const auto& r : recs) {
        if (r.name != name) continue;
        for (const auto& [k, v] : r.context)
            if (k == key && v == value) return r.value;
    }
    FAIL("record not found: " << name);
    return 0.0;
}

} // namespace

TEST_CASE("simulate is byte-reproducible")
{
    const std::string opts = " --geometry projection --n 30 --T 4 --G 2 --next-step --seed 11";
    REQUIRE(run("simulate" + opts + " --out " + path("simA")) == 0);
    REQUIRE(run("simulate" + opts + " --out " + path("simB")) == 0);
    for (const char* f : {"network.txt", "truth_labels.tsv", "next_probs.tsv"}) {
        CHECK(read_file(path("simA") + "/" + f) == read_file(path("simB") + "/" + f));
    }
    REQUIRE(run("simulate --geometry projection --n 30 --T 4 --G 2 --seed 12 --out " + path("simC")) == 0);
    CHECK(read_file(path("simC") + "/network.txt") != read_file(path("simA") + "/network.txt"));
    CHECK_FALSE(fs::exists(path("simC") + "/next_probs.tsv"));
}

TEST_CASE("usage errors exit with 2")
{
    REQUIRE(run("simulate --n 10 --T 2 --G 2 --seed 1 --out " + path("simU")) == 0);
    const std::string net = path("simU") + "/network.txt";
    CHECK(run("fit --network " + net + " --geometry distance --engine vb --G 2 --seed 1 --out " + path("x.json")) == 2);
    CHECK(run("fit --network " + net + " --G 2 --out " + path("x.json")) == 2);
    CHECK(run("simulate --sticky --transitory --seed 1 --out " + path("simV")) == 2);
    CHECK(run("nonsense") == 2);
    CHECK(run("") == 2);
    CHECK_FALSE(fs::exists(path("x.json")));
}

TEST_CASE("malformed data exits with 3")
{
    write_file_atomic(path("bad.txt"), "3 1 directed binary\n1 0 0\n");
    CHECK(run("fit --network " + path("bad.txt") + " --G 2 --seed 1 --out " + path("y.json")) == 3);
    CHECK(read_file(path("stderr")).find("line 2") != std::string::npos);
}

TEST_CASE("simulate, fit, evaluate, predict, coassign")
{
    REQUIRE(run("simulate --geometry projection --n 30 --T 4 --G 2 --next-step --seed 11 --out " + path("sim")) == 0);
    const std::string net = path("sim") + "/network.txt";
    REQUIRE(run("fit --network " + net + " --engine vb --G 2 --seed 5 --out " + path("vb.json") + " --report " +
                path("vb_report.tsv")) == 0);
    const FitArchive a = load_archive(path("vb.json"));
    CHECK(a.engine == "vb");
    CHECK(a.G == 2);
    CHECK(a.seed == 5u);

    REQUIRE(run("evaluate --archive " + path("vb.json") + " --network " + net + " --truth " + path("sim") +
                "/truth_labels.tsv --out " + path("eval.tsv")) == 0);
    const auto recs = records(path("eval.tsv"));
    CHECK(record(recs, "cri", "scope", "pooled") >= 0.8);
    CHECK(record(recs, "auc", "scope", "in-sample") > 0.8);
    CHECK(record(recs, "vi", "t", "4") >= 0.0);

    REQUIRE(run("fit --network " + net + " --engine mcmc --G 2 --iterations 60 --burn-in 30 --thin 5 --seed 6 --out " +
                path("mc.json")) == 0);
    REQUIRE(run("predict --archive " + path("mc.json") + " --reps 2 --seed 1 --out " + path("pred.tsv")) == 0);
    std::istringstream pin(read_file(path("pred.tsv")));
    const Eigen::MatrixXd P = parse_matrix(pin);
    REQUIRE(P.rows() == 30);
    REQUIRE(P.cols() == 30);
    CHECK((P.array() >= 0.0).all());
    CHECK((P.array() <= 1.0).all());
    // same seed, same bytes
    REQUIRE(run("predict --archive " + path("mc.json") + " --reps 2 --seed 1 --out " + path("pred2.tsv")) == 0);
    CHECK(read_file(path("pred.tsv")) == read_file(path("pred2.tsv")));

    REQUIRE(run("evaluate --predicted " + path("pred.tsv") + " --next-probs " + path("sim") + "/next_probs.tsv --out " +
                path("corr.tsv")) == 0);
    const auto corr = records(path("corr.tsv"));
    REQUIRE(corr.size() == 1u);
    CHECK(corr[0].name == "next_step_correlation");
    CHECK(corr[0].value > 0.0);

    REQUIRE(run("coassign --archive " + path("vb.json") + " --t 2 --out " + path("co.tsv")) == 0);
    std::istringstream cin(read_file(path("co.tsv")));
    const Eigen::MatrixXd C = parse_matrix(cin);
    REQUIRE(C.rows() == 30);
    CHECK(C.isApprox(C.transpose()));
    CHECK((C.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(run("coassign --archive " + path("vb.json") + " --t 9") == 2);
}

TEST_CASE("select and bench write tables")
{
    REQUIRE(run("simulate --geometry projection --n 16 --T 3 --G 2 --seed 3 --out " + path("sel")) == 0);
    REQUIRE(run("select --network " + path("sel") + "/network.txt --G-range 1..2 --geometries projection" +
                " --projection-iterations 1100 --projection-burn-in 100 --projection-thin 10 --restarts 1 --seed 2 --out " +
                path("winners.tsv") + " --table " + path("table.tsv")) == 0);
    std::istringstream tin(read_file(path("table.tsv")));
    const auto rows = parse_summary_table(tin);
    CHECK(rows.size() == 2u);
    // DIC is run only at the BIC winner
    int with_dic = 0;
    for (const auto& r : rows) {
        CHECK(r.ok);
        CHECK(r.error.empty());
        with_dic += std::isfinite(r.dic) ? 1 : 0;
    }
    CHECK(with_dic == 1);
    CHECK_FALSE(read_file(path("winners.tsv")).empty());
    CHECK(run("select --network " + path("sel") + "/network.txt --G-range 3..1 --seed 2") == 2);

    REQUIRE(run("bench --n 12 --T 2 --gibbs-draws 100 --measure-draws 5 --vb-sweeps 5 --seed 1 --out " +
                path("bench.tsv")) == 0);
    // header plus one Gibbs and one VB row
    std::istringstream bin(read_file(path("bench.tsv")));
    std::string line;
    std::getline(bin, line);
    CHECK(line.rfind("n\tengine", 0) == 0);
    int n_rows = 0;
    while (std::getline(bin, line)) {
        ++n_rows;
        CHECK(line.rfind("12\t", 0) == 0);
    }
    CHECK(n_rows == 2);
}
