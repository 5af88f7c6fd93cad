#pragma once

#include "klab/harness/config.hpp"
#include "klab/harness/report.hpp"
#include "klab/shiftred.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace klab::harness {

struct Check {
    std::string id;
    std::string what;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string name;
    std::vector<Table> tables;
    std::vector<Check> checks;
    // Named outputs read by the acceptance binary.
    std::map<std::string, Ratio> values;
    std::map<std::string, std::int64_t> counts;
    std::map<std::string, double> stats;

    bool pass() const;
};

// Thresholds used by `lab verify` for its own pass/fail lines.
struct VerifyThresholds {
    double adhoc_stability = 2.0;      // max <= factor * median block maximum
    double block_trend_slope = 0.05;   // slope of per-ratio maxima vs log2(Q/R)
    Ratio f_constant{60};              // C4
    double model_slope = 0.05;         // slope of max model_sum vs ln M
    double equid_spread = 2.0;         // max/min of per-family C_eq
    Ratio qia_constant{10};            // C5
};

// The psi generators of the block suites, seeded per family-independent stream.
ApproxFunction sparse_psi(long a_min, long a_max, std::int64_t points, std::uint64_t seed);
ApproxFunction power_psi(long a_min, long a_max, std::int64_t points, const Ratio& s, std::uint64_t seed);
ApproxFunction make_psi(const std::string& generator, long a_min, long a_max, std::int64_t points,
                        std::uint64_t seed);

// Seed of model trial `trial`, shared by `lab model` and the model suite.
std::uint64_t model_trial_seed(std::uint64_t seed, std::int64_t trial);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> v);

SuiteResult suite_residues(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_overlaps(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_bohr(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_adhoc(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_blocks(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_qia(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_model(const ExperimentConfig& cfg, const VerifyThresholds& th = {});
SuiteResult suite_convergence(const ExperimentConfig& cfg, const VerifyThresholds& th = {});

std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg, const VerifyThresholds& th = {});

// Writes every table as <out_dir>/<table>.csv plus summary.csv with the checks.
void write_suite_reports(const std::vector<SuiteResult>& results, const std::string& out_dir,
                         const std::string& command, std::int64_t wall_ms);

} // namespace klab::harness
