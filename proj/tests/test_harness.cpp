#include "klab/errors.hpp"
#include "klab/harness/config.hpp"
#include "klab/harness/report.hpp"
#include "klab/harness/suites.hpp"
#include "klab/parallel.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace klab;
using namespace klab::harness;
using klab::test::R;

namespace {

int lab_exit(const std::string& args) {
    const std::string cmd = std::string(KLAB_LAB_PATH) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string lab_output(const std::string& args) {
    const auto path = std::filesystem::temp_directory_path() / "klab_test_out.csv";
    const std::string cmd = std::string(KLAB_LAB_PATH) + " " + args + " > " + path.string() + " 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) return {};
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Config, DefaultsValidateAndRoundTrip) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    const std::string text = dump_config(c);
    EXPECT_EQ(dump_config(parse_config(text)), text);
}

TEST(Config, PartialOverride) {
    ExperimentConfig c = parse_config(R"({"seed": 3, "params": {"sigma": "3/5"}, "qia": {"U": 6}})");
    EXPECT_EQ(c.seed, 3u);
    EXPECT_EQ(c.params.sigma, R(3, 5));
    EXPECT_EQ(c.qia.U, 6);
    EXPECT_EQ(c.residues.q_max, ExperimentConfig{}.residues.q_max);
    ExperimentConfig d = parse_config(dump_config(c));
    EXPECT_EQ(dump_config(d), dump_config(c));
}

TEST(Config, Rejections) {
    EXPECT_THROW(parse_config("{"), ValidityError);
    EXPECT_THROW(parse_config(R"({"params": {"sigma": "3/2"}})"), ValidityError);
    EXPECT_THROW(parse_config(R"({"params": {"rho": "1/2"}})"), ValidityError);
    EXPECT_THROW(parse_config(R"({"params": {"tau": "x"}})"), ValidityError);
    EXPECT_THROW(parse_config(R"({"qia": {"U": 0}})"), ValidityError);
    EXPECT_THROW(parse_config(R"({"workers": 0})"), ValidityError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ValidityError);
}

TEST(Report, Cells) {
    EXPECT_EQ(exact(R(3, 4)), "3/4");
    EXPECT_EQ(exact(R(5)), "5/1");
    EXPECT_EQ(decimal(R(1, 3)), "0.333333333333");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    Table t{"x", {"a", "b"}, {}};
    t.add({"1", "2"});
    EXPECT_THROW(t.add({"1"}), std::exception);
    EXPECT_EQ(to_csv(t, "# h"), "# h\na,b\n1,2\n");
    const std::string h = header_line("verify all", 12);
    EXPECT_EQ(h.rfind("# lab verify all ", 0), 0u);
    EXPECT_NE(h.find("wall_ms=12"), std::string::npos);
}

TEST(Parallel, DeterministicByIndex) {
    auto f = [](std::size_t i) { return static_cast<std::int64_t>(i * i + 1); };
    auto a = parallel_map(1000, 1, f), b = parallel_map(1000, 4, f), c = parallel_map(1000, 17, f);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_TRUE(parallel_map(0, 4, f).empty());
}

TEST(Parallel, RethrowsLowestIndex) {
    for (int w : {1, 3}) {
        try {
            parallel_map(200, w, [](std::size_t i) -> int {
                if (i == 50 || i == 150) throw std::runtime_error("fail " + std::to_string(i));
                return 0;
            });
            FAIL();
        } catch (const std::runtime_error& e) {
            // with one worker the first failure stops the loop; with several the lowest index seen wins
            EXPECT_EQ(std::string(e.what()).rfind("fail ", 0), 0u);
            if (w == 1) {
                EXPECT_EQ(std::string(e.what()), "fail 50");
            }
        }
    }
}

TEST(Stats, SlopeAndMedian) {
    EXPECT_DOUBLE_EQ(ls_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0);
    EXPECT_DOUBLE_EQ(ls_slope({0, 1, 2}, {4, 4, 4}), 0.0);
    EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(Generators, SeededAndInRange) {
    ApproxFunction a = sparse_psi(4, 8, 10, 99), b = sparse_psi(4, 8, 10, 99);
    EXPECT_EQ(a.values(), b.values());
    for (auto& [q, v] : a.values()) {
        EXPECT_GT(q, 16);
        EXPECT_LE(q, 512);
        EXPECT_GT(v, R(0));
        EXPECT_LE(v, R(1, 2));
    }
    ApproxFunction p = make_psi("power:1/2", 4, 6, 10, 5);
    for (auto& [q, v] : p.values()) EXPECT_EQ(v, power_law_value(q, R(1, 2)));
    EXPECT_THROW(make_psi("dense", 4, 6, 10, 5), ValidityError);
    EXPECT_NE(model_trial_seed(7, 0), model_trial_seed(7, 1));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(lab_exit("--help"), 0);
    EXPECT_EQ(lab_exit("approx --gamma quad-sqrt2 --k-max 8"), 0);
    EXPECT_EQ(lab_exit("approx --gamma nosuch"), 1);
    EXPECT_EQ(lab_exit("frobnicate"), 1);
    EXPECT_EQ(lab_exit("--validity 1000 approx --gamma quad-sqrt2 --k-max 30"), 1);
    EXPECT_EQ(lab_exit("measure --gamma quad-pair --q 12 --r 8 --psi-q 1/16 --psi-r 1/8 --brute"), 0);
    EXPECT_EQ(lab_exit("measure --gamma quad-pair --q 8 --r 12 --psi-q 1/16 --psi-r 1/8"), 1);
    EXPECT_EQ(lab_exit("bohr --rational 1,2/3 --eps 1/5"), 0);
    EXPECT_EQ(lab_exit("bohr --rational 2,4/6 --eps 1/5"), 1);
    EXPECT_EQ(lab_exit("bohr --gamma quad-sqrt2 --N 100 --eps 1/8"), 0);
    EXPECT_EQ(lab_exit("qia --U 6"), 0);
    EXPECT_EQ(lab_exit("model --variant shiftB --M 16..64 --trials 2"), 0);
    EXPECT_EQ(lab_exit("model --variant nope --M 16"), 1);
}

TEST(Cli, TablesAreCsvWithHeader) {
    const std::string out = lab_output("approx --gamma quad-sqrt2 --k-min 1 --k-max 7");
    ASSERT_FALSE(out.empty());
    std::istringstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# lab ", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line.rfind("k,B,", 0), 0u);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 7);
    // worker count does not change the table body
    auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    EXPECT_EQ(body(lab_output("--workers 1 qia --U 7")), body(lab_output("--workers 3 qia --U 7")));
}
