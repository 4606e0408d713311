// qsw_main.cpp — Command-line front end
//
// Subcommands:
//   est        single-point expected survival time
//   sweep      parameter grid -> CSV
//   evolve     trajectory -> CSV
//   analyze    dark states and source overlaps, text report
//   reproduce  golden figure datasets (fig2 | fig3 | all) + plot scripts
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qsw/qsw.hpp"

namespace {

struct NetworkOptions {
    bool paper_trimer{false};
    std::string network_file;
};

struct ParamOptions {
    std::optional<double> alpha;
    std::optional<double> phi;
    std::optional<double> lambda;
    std::optional<double> source_rate;
    std::optional<double> drain_rate;
    std::string mode;          // "", "independent", "correlated", "both"
    std::string alpha_grid;    // "lo:hi:n"
    std::string phi_grid;
    std::string lambda_set;    // "a,b,c"
    std::string method{"solve"};
    std::string out_path;
    int threads{0};            // 0 -> QSW_THREADS env -> 1
    double horizon{400.0};
    double tol{1e-6};
};

void add_network_flags(CLI::App* cmd, NetworkOptions& net) {
    auto* trimer = cmd->add_flag("--paper-trimer", net.paper_trimer,
                                 "use the canonical V-shaped trimer");
    cmd->add_option("--network-file", net.network_file, "network description JSON file")
        ->excludes(trimer);
}

qsw::NetworkSystem resolve_network(const NetworkOptions& net, const ParamOptions& par) {
    qsw::NetworkSystem sys;
    if (net.paper_trimer) {
        sys = qsw::trimer_paper(par.source_rate.value_or(0.5), par.drain_rate.value_or(1.0));
    } else if (!net.network_file.empty()) {
        sys = qsw::load_network_file(net.network_file);
        if (par.source_rate) sys.source.rate = *par.source_rate;
        if (par.drain_rate) sys.drain.rate = *par.drain_rate;
    } else {
        throw CLI::ValidationError("--paper-trimer or --network-file is required");
    }
    if (par.mode == "independent") sys.source.mode = qsw::SourceMode::Independent;
    if (par.mode == "correlated") sys.source.mode = qsw::SourceMode::Correlated;
    if (par.phi) sys.source.phase = *par.phi;
    return sys;
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    double lo = 0, hi = 0;
    int n = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &extra) != 3 || n < 1) {
        throw CLI::ValidationError(flag + ": expected lo:hi:n, got \"" + text + "\"");
    }
    return qsw::linspace(lo, hi, n);
}

std::vector<double> parse_set(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag + ": expected a comma-separated number list, got \"" +
                                       text + "\"");
        }
    }
    if (out.empty()) {
        throw CLI::ValidationError(flag + ": empty list");
    }
    return out;
}

std::vector<qsw::ESTMethod> parse_methods(const std::string& text) {
    using qsw::ESTMethod;
    if (text == "time") return {ESTMethod::TimeDomain};
    if (text == "solve") return {ESTMethod::LinearSolve};
    if (text == "resolvent") return {ESTMethod::ResolventLimit};
    if (text == "all") {
        return {ESTMethod::TimeDomain, ESTMethod::LinearSolve, ESTMethod::ResolventLimit};
    }
    throw CLI::ValidationError("--method: expected time|solve|resolvent|all, got \"" + text + "\"");
}

// Human-friendly number: always shows a decimal point ("6.0", not "6").
std::string format_human(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s = buf;
    if (s.find_first_of(".einf") == std::string::npos) s += ".0";
    return s;
}

std::string divergence_annotation(const qsw::NetworkSystem& sys) {
    const auto dark = qsw::dark_states(sys.network, sys.drain);
    if (dark.empty()) return "inf";
    return "inf (dark state " + qsw::ket_string(dark.front().amplitudes) + ")";
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw CLI::ValidationError("--out: cannot open \"" + out_path + "\" for writing");
    }
    out << content;
}

int run_est(const NetworkOptions& net, const ParamOptions& par) {
    const qsw::NetworkSystem sys = resolve_network(net, par);
    const qsw::MixingParams mix{par.alpha.value_or(0.0), par.lambda.value_or(1.0)};
    const qsw::Generator g = qsw::assemble_generator(sys, mix);
    const qsw::DensityMatrix rho0 = qsw::DensityMatrix::source_seed(g.dims);
    const auto methods = parse_methods(par.method);

    std::string text;
    for (const auto method : methods) {
        qsw::ESTValue est;
        switch (method) {
            case qsw::ESTMethod::LinearSolve: est = qsw::est_linear_solve(g, rho0); break;
            case qsw::ESTMethod::TimeDomain:
                est = qsw::est_time_domain(g, rho0, par.horizon, par.tol);
                break;
            case qsw::ESTMethod::ResolventLimit: est = qsw::est_resolvent_limit(g, rho0); break;
        }
        std::string line = est.divergent ? divergence_annotation(sys) : format_human(est.value);
        if (!est.converged && !est.divergent) line += "  (not converged; lower bound)";
        if (methods.size() > 1) line = std::string(qsw::est_method_name(method)) + ": " + line;
        text += line + "\n";
    }
    write_output(par.out_path, text);
    return 0;
}

int run_sweep_cmd(const NetworkOptions& net, const ParamOptions& par) {
    const qsw::NetworkSystem sys = resolve_network(net, par);

    qsw::SweepGrid grid;
    grid.alpha_values = !par.alpha_grid.empty() ? parse_grid(par.alpha_grid, "--alpha-grid")
                        : par.alpha ? std::vector<double>{*par.alpha}
                                    : qsw::linspace(0.01, 1.0, 100);
    grid.phi_values = !par.phi_grid.empty() ? parse_grid(par.phi_grid, "--phi-grid")
                      : par.phi ? std::vector<double>{*par.phi}
                                : std::vector<double>{0.0};
    grid.lambda_values = !par.lambda_set.empty() ? parse_set(par.lambda_set, "--lambda-set")
                         : par.lambda ? std::vector<double>{*par.lambda}
                                      : std::vector<double>{1.0};
    grid.source_rate = sys.source.rate;
    grid.drain_rate = sys.drain.rate;
    if (par.mode == "independent") {
        grid.modes = {qsw::SourceMode::Independent};
    } else if (par.mode == "correlated") {
        grid.modes = {qsw::SourceMode::Correlated};
    }
    grid.methods = parse_methods(par.method);

    qsw::ESTOptions opts;
    opts.horizon = par.horizon;
    opts.tol = par.tol;
    const auto records =
        qsw::run_sweep(sys.network, sys.source, sys.drain, grid, opts, par.threads);
    write_output(par.out_path, qsw::to_csv(records));
    return 0;
}

int run_evolve(const NetworkOptions& net, const ParamOptions& par, double t_max, double dt_out) {
    if (!(t_max > 0.0) || !(dt_out > 0.0)) {
        throw CLI::ValidationError("--t-max and --dt must be positive");
    }
    const qsw::NetworkSystem sys = resolve_network(net, par);
    const qsw::MixingParams mix{par.alpha.value_or(0.0), par.lambda.value_or(1.0)};
    const qsw::Generator g = qsw::assemble_generator(sys, mix);

    std::vector<double> times;
    for (double t = 0.0; t <= t_max + 1e-12; t += dt_out) times.push_back(t);
    const qsw::Trajectory traj =
        qsw::evolve(g, qsw::DensityMatrix::source_seed(g.dims), times);

    std::ostringstream os;
    qsw::write_trajectory_csv(os, traj);
    write_output(par.out_path, os.str());
    return 0;
}

int run_analyze(const NetworkOptions& net, const ParamOptions& par) {
    const qsw::NetworkSystem sys = resolve_network(net, par);
    std::ostringstream os;
    os << "network: " << sys.network.n_nodes << " nodes, source -> {";
    for (std::size_t i = 0; i < sys.source.targets.size(); ++i) {
        os << (i ? "," : "") << sys.source.targets[i];
    }
    os << "} (rate " << format_human(sys.source.rate) << ", "
       << qsw::source_mode_name(sys.source.mode) << "), drain -> " << sys.drain.target
       << " (rate " << format_human(sys.drain.rate) << ")\n";

    const auto dark = qsw::dark_states(sys.network, sys.drain);
    os << "dark states: " << dark.size() << "\n";
    for (std::size_t i = 0; i < dark.size(); ++i) {
        os << "  [" << i + 1 << "] eigenvalue " << format_human(dark[i].eigenvalue)
           << "  amplitudes " << qsw::ket_string(dark[i].amplitudes) << "  (drain overlap "
           << qsw::format_g17(dark[i].drain_overlap) << ")\n";
    }
    if (!dark.empty() && sys.source.targets.size() >= 2) {
        qsw::SourceConfig probe = sys.source;
        probe.mode = qsw::SourceMode::Correlated;
        os << "correlated-source overlap with dark state [1]:\n";
        os << "  phi        |<D|psi(phi)>|\n";
        const double phis[] = {0.0, qsw::kPi / 2.0, qsw::kPi};
        const char* labels[] = {"0", "pi/2", "pi"};
        for (int i = 0; i < 3; ++i) {
            probe.phase = phis[i];
            char buf[64];
            std::snprintf(buf, sizeof buf, "  %-9s  %.8f\n", labels[i],
                          qsw::dark_overlap(probe, dark.front()));
            os << buf;
        }
    }
    write_output(par.out_path, os.str());
    return 0;
}

int run_reproduce(const std::string& which, const std::string& out_dir, int threads) {
    std::vector<qsw::DatasetFile> files;
    if (which == "fig2" || which == "all") {
        const auto f = qsw::reproduce_fig2(qsw::resolve_threads(threads));
        files.insert(files.end(), f.begin(), f.end());
    }
    if (which == "fig3" || which == "all") {
        const auto f = qsw::reproduce_fig3(qsw::resolve_threads(threads));
        files.insert(files.end(), f.begin(), f.end());
    }
    if (files.empty()) {
        throw CLI::ValidationError("reproduce: expected fig2, fig3, or all, got \"" + which + "\"");
    }
    std::filesystem::create_directories(out_dir);
    for (const auto& file : files) {
        const auto path = std::filesystem::path(out_dir) / file.name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw CLI::ValidationError("reproduce: cannot write " + path.string());
        }
        out << file.content;
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-stochastic-walk transport on small open networks"};
    app.require_subcommand(1);

    NetworkOptions net;
    ParamOptions par;
    double t_max = 20.0, dt_out = 0.1;
    std::string reproduce_which;
    std::string reproduce_out = ".";

    auto add_param_flags = [&](CLI::App* cmd, bool with_grids) {
        cmd->add_option("--alpha", par.alpha, "mixing weight in [0,1]");
        cmd->add_option("--phi", par.phi, "correlated-source phase (radians)");
        cmd->add_option("--lambda", par.lambda, "global dephasing rate");
        cmd->add_option("--Gamma", par.source_rate, "source injection rate");
        cmd->add_option("--gamma", par.drain_rate, "drain absorption rate");
        cmd->add_option("--mode", par.mode, "independent|correlated" +
                                                std::string(with_grids ? "|both" : ""));
        cmd->add_option("--out", par.out_path, "output path (default: stdout)");
        if (with_grids) {
            cmd->add_option("--alpha-grid", par.alpha_grid, "alpha grid lo:hi:n");
            cmd->add_option("--phi-grid", par.phi_grid, "phi grid lo:hi:n");
            cmd->add_option("--lambda-set", par.lambda_set, "comma-separated dephasing rates");
            cmd->add_option("--threads", par.threads, "worker threads (env QSW_THREADS)");
        }
    };

    auto* est_cmd = app.add_subcommand("est", "single-point expected survival time");
    add_network_flags(est_cmd, net);
    add_param_flags(est_cmd, false);
    est_cmd->add_option("--method", par.method, "time|solve|resolvent|all");
    est_cmd->add_option("--horizon", par.horizon, "time-domain horizon");
    est_cmd->add_option("--tol", par.tol, "time-domain tolerance");

    auto* sweep_cmd = app.add_subcommand("sweep", "parameter grid -> CSV");
    add_network_flags(sweep_cmd, net);
    add_param_flags(sweep_cmd, true);
    sweep_cmd->add_option("--method", par.method, "time|solve|resolvent|all");
    sweep_cmd->add_option("--horizon", par.horizon, "time-domain horizon");
    sweep_cmd->add_option("--tol", par.tol, "time-domain tolerance");

    auto* evolve_cmd = app.add_subcommand("evolve", "trajectory -> CSV");
    add_network_flags(evolve_cmd, net);
    add_param_flags(evolve_cmd, false);
    evolve_cmd->add_option("--t-max", t_max, "final time");
    evolve_cmd->add_option("--dt", dt_out, "output spacing");

    auto* analyze_cmd = app.add_subcommand("analyze", "dark states and overlaps");
    add_network_flags(analyze_cmd, net);
    add_param_flags(analyze_cmd, false);

    auto* reproduce_cmd = app.add_subcommand("reproduce", "golden figure datasets");
    reproduce_cmd->add_option("target", reproduce_which, "fig2|fig3|all")->required();
    reproduce_cmd->add_option("--out", reproduce_out, "output directory (default: .)");
    reproduce_cmd->add_option("--threads", par.threads, "worker threads (env QSW_THREADS)");

    try {
        app.parse(argc, argv);
        if (est_cmd->parsed()) {
            if (!par.alpha) throw CLI::ValidationError("--alpha is required for est");
            return run_est(net, par);
        }
        if (sweep_cmd->parsed()) return run_sweep_cmd(net, par);
        if (evolve_cmd->parsed()) {
            if (!par.alpha) throw CLI::ValidationError("--alpha is required for evolve");
            return run_evolve(net, par, t_max, dt_out);
        }
        if (analyze_cmd->parsed()) return run_analyze(net, par);
        if (reproduce_cmd->parsed()) {
            return run_reproduce(reproduce_which, reproduce_out, par.threads);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qsw::SpecParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qsw::SolverBreakdown& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
