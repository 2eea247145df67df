#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "capdrop/energy.hpp"
#include "capdrop/errors.hpp"

namespace capdrop::cli {

class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& key, const std::string& msg)
        : ValidationError(key.empty() ? msg : key + ": " + msg), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// one additive term of a perturbation; kind is "cos", "sin" or "rand"
struct PerturbTerm {
    std::string kind;
    int k = 0;
    double amp = 0.0;
};

struct RunConfig {
    PhysicalParams params;
    int grid_n = 400;
    std::vector<double> eps_schedule{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    std::string solver = "minimize";  // minimize | shoot
    std::uint64_t seed = 0;
    double t_end = 8.0;
    double dt0 = 1e-5;
    int snapshots = 200;
    std::vector<PerturbTerm> perturb{{"cos", 2, 0.05}};
    double shift = 0.0;
    std::string subspace = "doubly-constrained";
    int eigen_count = 10;
    bool eigvec_csv = false;
    std::array<double, 4> xi56{1.0, 1.0, 0.0, 0.0};
    int lower_bound_samples = 1000;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::vector<PerturbTerm> parse_perturbation(const std::string& spec);

}  // namespace capdrop::cli
