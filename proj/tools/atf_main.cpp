// Command-line experiment runner for the accumulate-then-forward relaying
// model: closed-form outage analysis, Monte Carlo simulation, parameter
// sweeps, and the optimal-threshold search.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atf/atf.hpp"

namespace {

struct OutputTarget {
    std::unique_ptr<std::ofstream> file;
    std::ostream& stream() { return file ? *file : std::cout; }
};

OutputTarget open_output(const std::string& path)
{
    OutputTarget out;
    if (!path.empty()) {
        out.file = std::make_unique<std::ofstream>(path);
        if (!*out.file)
            throw atf::invalid_parameter("cannot open output file: " + path);
    }
    out.stream() << std::setprecision(12);
    return out;
}

std::vector<double> build_grid(const std::vector<double>& values, double from,
                               double to, double step)
{
    if (!values.empty()) return values;
    if (!(step > 0.0) || to < from)
        throw atf::invalid_parameter("grid: need from <= to and step > 0");
    std::vector<double> grid;
    for (double v = from; v <= to + 1e-12 * std::fabs(step); v += step)
        grid.push_back(v);
    return grid;
}

atf::SweepMethod parse_method(const std::string& name)
{
    if (name == "analytic") return atf::SweepMethod::analytic;
    if (name == "sim-continuous") return atf::SweepMethod::sim_continuous;
    if (name == "sim-discrete") return atf::SweepMethod::sim_discrete;
    if (name == "direct") return atf::SweepMethod::direct;
    throw atf::invalid_parameter("unknown method: " + name);
}

void write_report_csv(const atf::OutageReport& r, std::ostream& os)
{
    os << "p_out,p_mode_I,p_mode_II,p_mode_III,phi_I,phi_II,phi_III,p_direct\n"
       << r.p_out << ',' << r.p_mode_I << ',' << r.p_mode_II << ','
       << r.p_mode_III << ',' << r.phi_I << ',' << r.phi_II << ','
       << r.phi_III << ',' << r.p_direct << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outage analysis and simulation of a wireless-powered "
                 "accumulate-then-forward relay network"};
    app.require_subcommand(1);
    // global flags (--config, --set, --out, ...) may follow the subcommand
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::uint64_t seed = 0;
    std::uint64_t blocks = 0;
    app.add_option("--config", config_path, "configuration file (key = value)");
    app.add_option("--set", overrides, "override a config entry, key=value")
        ->take_all();
    app.add_option("--seed", seed, "random stream seed");
    app.add_option("--blocks", blocks, "simulated blocks");
    app.add_option("--out", out_path, "output CSV path (default: stdout)");

    auto* cmd_analytic =
        app.add_subcommand("analytic", "closed-form outage at the configured point");
    std::string dump_matrix_path, dump_pi_path;
    cmd_analytic->add_option("--dump-matrix", dump_matrix_path,
                             "write the battery transition matrix as CSV");
    cmd_analytic->add_option("--dump-pi", dump_pi_path,
                             "write the stationary distribution as CSV");

    auto* cmd_simulate =
        app.add_subcommand("simulate", "Monte Carlo block simulation");
    std::string model_name;
    unsigned replications_flag = 0;
    std::string trace_path, hist_path;
    cmd_simulate->add_option("--model", model_name,
                             "battery model: continuous or discrete");
    cmd_simulate->add_option("--replications", replications_flag,
                             "independent replications to pool");
    cmd_simulate->add_option("--trace", trace_path,
                             "per-block trace CSV (block,mode,battery,outage)");
    cmd_simulate->add_option("--hist", hist_path,
                             "battery level histogram CSV (discrete model)");

    auto* cmd_sweep = app.add_subcommand("sweep", "evaluate along one parameter axis");
    std::string var_name = "P_S";
    std::vector<double> grid_values;
    double grid_from = 10.0, grid_to = 36.0, grid_step = 2.0;
    std::string unit = "";
    std::vector<std::string> method_names{"analytic"};
    cmd_sweep->add_option("--var", var_name, "swept variable: P_S, E_T, N, or L");
    cmd_sweep->add_option("--values", grid_values, "explicit grid values")
        ->delimiter(',');
    cmd_sweep->add_option("--from", grid_from, "grid start");
    cmd_sweep->add_option("--to", grid_to, "grid end (inclusive)");
    cmd_sweep->add_option("--step", grid_step, "grid step");
    cmd_sweep->add_option("--unit", unit,
                          "P_S grid unit: dbm (default) or si");
    cmd_sweep
        ->add_option("--methods", method_names,
                     "outputs: analytic, sim-continuous, sim-discrete, direct")
        ->delimiter(',');

    app.add_subcommand("optimal-et",
                       "exhaustive search of the cooperation threshold");

    auto* cmd_compare = app.add_subcommand(
        "compare", "direct transmission vs the protocol at optimal E_T");
    double cmp_from = 10.0, cmp_to = 36.0, cmp_step = 2.0;
    cmd_compare->add_option("--from", cmp_from, "P_S grid start, dBm");
    cmd_compare->add_option("--to", cmp_to, "P_S grid end, dBm");
    cmd_compare->add_option("--step", cmp_step, "P_S grid step, dB");

    CLI11_PARSE(app, argc, argv);

    try {
        atf::RunConfig cfg;
        if (!config_path.empty()) cfg = atf::load_config(config_path);
        for (const std::string& assignment : overrides)
            atf::apply_override(cfg, assignment);
        if (app.count("--seed")) cfg.sim.seed = seed;
        if (app.count("--blocks")) cfg.sim.blocks = blocks;
        atf::validate(cfg.params);

        OutputTarget out = open_output(out_path);

        if (app.got_subcommand("analytic")) {
            const atf::LinkGains g = atf::derive_link_gains(cfg.params);
            const atf::BatteryGrid grid = atf::make_battery_grid(
                cfg.params.C, cfg.params.L, cfg.params.E_T);
            const atf::TransitionMatrix m =
                atf::build_transition_matrix(cfg.params, g, grid);
            const atf::StationaryDistribution pi = atf::stationary_distribution(m);
            if (!dump_matrix_path.empty()) {
                std::ofstream f(dump_matrix_path);
                atf::write_matrix_csv(m, f);
            }
            if (!dump_pi_path.empty()) {
                std::ofstream f(dump_pi_path);
                atf::write_stationary_csv(pi, f);
            }
            write_report_csv(atf::atf_outage(cfg.params, g, grid, pi),
                             out.stream());
        } else if (app.got_subcommand("simulate")) {
            if (!model_name.empty()) {
                atf::apply_setting(cfg, "battery_model", model_name);
            }
            if (replications_flag != 0) cfg.replications = replications_flag;
            const atf::LinkGains g = atf::derive_link_gains(cfg.params);
            const atf::BatteryGrid grid = atf::make_battery_grid(
                cfg.params.C, cfg.params.L, cfg.params.E_T);
            atf::SimResult r;
            if (!trace_path.empty()) {
                std::ofstream trace(trace_path);
                trace << "block,mode,battery,outage\n";
                r = atf::run(cfg.params, g, grid, cfg.sim, &trace);
            } else {
                r = atf::run_replicated(cfg.params, g, grid, cfg.sim,
                                        cfg.replications);
            }
            if (!hist_path.empty() && !r.level_histogram.empty()) {
                std::ofstream f(hist_path);
                f << "level,count\n";
                for (std::size_t i = 0; i < r.level_histogram.size(); ++i)
                    f << i << ',' << r.level_histogram[i] << '\n';
            }
            atf::write_sim_csv_header(out.stream());
            atf::write_sim_csv_row(r, out.stream());
        } else if (app.got_subcommand("sweep")) {
            atf::SweepSpec spec;
            spec.base = cfg.params;
            if (var_name == "P_S") spec.variable = atf::SweepVariable::P_S;
            else if (var_name == "E_T") spec.variable = atf::SweepVariable::E_T;
            else if (var_name == "N") spec.variable = atf::SweepVariable::N;
            else if (var_name == "L") spec.variable = atf::SweepVariable::L;
            else throw atf::invalid_parameter("unknown sweep variable: " + var_name);
            spec.grid = build_grid(grid_values, grid_from, grid_to, grid_step);
            if (unit.empty())
                spec.grid_in_dbm = spec.variable == atf::SweepVariable::P_S;
            else if (unit == "dbm")
                spec.grid_in_dbm = true;
            else if (unit == "si")
                spec.grid_in_dbm = false;
            else
                throw atf::invalid_parameter("unknown unit: " + unit);
            if (spec.grid_in_dbm && spec.variable != atf::SweepVariable::P_S)
                throw atf::invalid_parameter("--unit dbm only applies to P_S");
            spec.methods.clear();
            for (const std::string& m : method_names)
                spec.methods.push_back(parse_method(m));
            const auto rows = atf::sweep(spec, cfg.sim, cfg.replications);
            atf::write_sweep_csv(spec, rows, out.stream());
        } else if (app.got_subcommand("optimal-et")) {
            const atf::OptimalEt opt = atf::optimal_et(cfg.params);
            out.stream() << "E_T_opt,outage,direct_outage\n"
                         << opt.E_T << ',' << opt.report.p_out << ','
                         << opt.report.p_direct << '\n';
        } else if (app.got_subcommand("compare")) {
            const std::vector<double> grid =
                build_grid({}, cmp_from, cmp_to, cmp_step);
            const auto rows = atf::compare_direct(cfg.params, grid);
            atf::write_compare_csv(rows, out.stream());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
