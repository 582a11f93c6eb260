// trace-lab: command-line front end. Each subcommand's flags come from the
// parameter table in cli.hpp; parsing and dispatch live there too.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include <trace_lab/cli.hpp>

namespace tl = trace_lab::cli;

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of Poisson summation and trace formulae on R, Q_p, the circle and the adeles"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, CLI::App*> subs;
    std::string format = "json";
    std::string output;

    for (const auto& cmd : tl::commands()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        auto add = [&](const tl::ParamSpec& p) {
            auto* opt = sub->add_option("--" + p.name, values[cmd.name][p.name], p.help);
            if (!p.default_value.empty()) opt->default_str(p.default_value);
            if (p.required) opt->required();
        };
        for (const auto& p : cmd.params) add(p);
        if (cmd.name != "replay" && cmd.name != "reproduce-paper")
            for (const auto& p : tl::common_params()) add(p);
        sub->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->default_str("json");
        sub->add_option("--output,-o", output, "write the report here instead of standard output");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        // Flag-level errors are precondition failures too; emit the machine-readable form.
        std::cout << trace_lab::Json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump(2) << "\n";
        return tl::precondition;
    }

    tl::CommandRequest request;
    for (const auto& [name, sub] : subs) {
        if (!sub->parsed()) continue;
        request.command = name;
        for (const auto& [key, value] : values[name])
            if (sub->get_option("--" + key)->count() > 0) request.params[key] = value;
    }
    request.format = format == "csv" ? tl::Format::csv : tl::Format::json;
    request.output = output;

    const tl::RunResult result = tl::run(request);
    const std::string text = tl::render(result, request.format);
    if (request.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(request.output);
        if (!out) {
            std::cerr << "cannot write " << request.output << "\n";
            return tl::precondition;
        }
        out << text;
    }
    if (result.report.contains("error")) std::cerr << "error: " << result.report["error"]["message"].get<std::string>() << "\n";
    return result.exit_code;
}
