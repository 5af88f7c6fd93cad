#pragma once

#include "klab/bohr.hpp"
#include "klab/ratio.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace klab::harness {

struct ResidueConfig {
    std::int64_t q_max = 500;
    long k_max = 24;
    std::int64_t grid = 8;
};

struct OverlapConfig {
    std::int64_t q_max = 120;
    std::int64_t pairs = 200;
};

struct BohrConfig {
    std::int64_t b_max = 200;
    long j_max = 8;
    std::int64_t beta_grid = 8;
    std::int64_t a_per_b = 16;
    std::int64_t once_around = 1000;
};

struct BlockConfig {
    long a_min = 6;
    long a_max = 12;
    long max_log_ratio = 6;
    std::int64_t points = 40;
    std::vector<std::string> generators{"sparse", "power:1/2"};
};

struct AdhocConfig {
    long a_min = 6;
    long a_max = 11;
    long max_log_ratio = 6;
};

struct QiaConfig {
    long U = 12;
    std::vector<std::string> families{"liouville"};
};

struct ModelConfig {
    std::int64_t T = std::int64_t{1} << 30;
    long log_M_min = 4;
    long log_M_max = 10;
    std::int64_t trials = 20;
    std::vector<std::string> variants{"shiftB", "shiftb"};
    std::vector<std::string> families{"liouville", "quad-sqrt2", "quad-pair"};
    std::string support = "clusters";
    std::string contrast_family = "zero";
};

struct ConvergenceConfig {
    std::vector<std::int64_t> Q0{2, 4, 8, 16, 32};
    std::int64_t tail_Q0 = 1'000'000;
};

struct ExperimentConfig {
    std::uint64_t seed = 7;
    int workers = 1;
    std::int64_t validity = std::int64_t{1} << 40;
    std::vector<std::string> families{"quad-sqrt2", "quad-pair", "liouville"};
    BohrParams params;
    ResidueConfig residues;
    OverlapConfig overlaps;
    BohrConfig bohr;
    BlockConfig blocks;
    AdhocConfig adhoc;
    QiaConfig qia;
    ModelConfig model;
    ConvergenceConfig convergence;
    std::string out_dir = "reports";

    // sigma < tau < 1, 0 < rho < sigma/2, ranges non-empty; throws ValidityError.
    void validate() const;
};

// LAB_WORKERS if set to a positive integer, else 1.
int default_workers();

// Missing keys keep their defaults. Throws ValidityError on bad input.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string dump_config(const ExperimentConfig& cfg);

} // namespace klab::harness
