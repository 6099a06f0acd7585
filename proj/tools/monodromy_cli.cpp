#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "report.hpp"

using mono::cli::json;

int main(int argc, char** argv) {
    CLI::App app{"Monodromy data of dY/dz = (A0 + A1/z) Y"};
    app.require_subcommand(1);

    std::string input, output, format = "json";
    std::optional<double> eta;
    std::optional<int> order;
    std::optional<double> tol;

    const std::vector<std::pair<std::string, std::string>> subs{
        {"rays", "critical directions and dominance"},
        {"connection", "connection coefficients"},
        {"monodromy", "monodromy matrices and traces"},
        {"stokes", "Stokes matrices and factors"},
        {"verify", "compare the Stokes matrices with direct integration"},
        {"analyze", "all of the above"},
    };
    for (auto& [name, help] : subs) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("--input", input, "job file")->required()->check(CLI::ExistingFile);
        s->add_option("--output", output, "report file, stdout if omitted");
        s->add_option("--eta", eta, "cut direction");
        s->add_option("--order", order, "local series order");
        s->add_option("--tol", tol, "continuation tolerance");
        s->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::string name = app.get_subcommands().front()->get_name();
    std::vector<std::string> commands;
    if (name == "analyze")
        commands = mono::cli::all_commands();
    else
        commands = {name};

    mono::cli::JobSpec job;
    try {
        std::ifstream in(input);
        json j = json::parse(in);
        if (eta) j["eta"] = *eta;
        if (order) j["series_order"] = *order;
        if (tol) j["tol"] = *tol;
        job = mono::cli::parse_job(j, commands);
    } catch (const json::exception& e) {
        std::cerr << "cli/ParseError: " << e.what() << "\n";
        return 1;
    } catch (const mono::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    mono::cli::Outcome out = mono::cli::run(job);
    std::string text = format == "csv" ? mono::cli::to_csv(out.report) : out.report.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(output);
        if (!f) {
            std::cerr << "cannot write " << output << "\n";
            return 1;
        }
        f << text;
    }
    if (out.report.contains("error")) std::cerr << out.report["error"]["message"].get<std::string>() << "\n";
    return out.status;
}
