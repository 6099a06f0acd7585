#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "monodromy/pipeline.hpp"

namespace mono::cli {

using nlohmann::json;

struct JobSpec {
    RankOneSystem system;
    std::optional<double> eta;
    int series_order = 80;
    double tol = 1e-12;
    std::optional<long long> seed;
    // rays, connection, monodromy, stokes, verify
    std::vector<std::string> commands;
    // the input object as given, entries untouched
    json echo;
};

const std::vector<std::string>& all_commands();

// throws Error("cli", "ParseError", ...)
JobSpec parse_job(const json& input, const std::vector<std::string>& commands);

struct Outcome {
    json report;
    // 0 ok, 2 numeric failure, 3 verification failure
    int status = 0;
};

Outcome run(const JobSpec& job);

// one line per matrix entry: section,row,col,re,im
std::string to_csv(const json& report);

json complex_json(cplx v);
json matrix_json(const CMat& m);

}  // namespace mono::cli
