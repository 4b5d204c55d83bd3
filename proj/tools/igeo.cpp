// igeo: command-line driver for divergence tables, submanifold geometry,
// geodesics, parallel transport, natural-gradient descent, and the
// invariant verification sweep. Configs are JSON; results are CSV with a
// '#'-prefixed metadata block echoing the resolved configuration.
//
// Exit codes: 0 ok, 1 invariant failure, 2 bad input, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "igeo/igeo.hpp"
#include "igeo/json_io.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("IGEO_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[igeo] " << msg << "\n";
}

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
};

igeo::Json resolved_config(igeo::Json config, const CliOptions& opts) {
    if (opts.seed) config["seed"] = *opts.seed;
    return config;
}

void attach_metadata(igeo::ResultTable& table, const std::string& command, const igeo::Json& config) {
    table.meta("tool", "igeo");
    table.meta("version", "1.0.0");
    table.meta("command", command);
    table.meta("rng", igeo::Rng::algorithm());
    table.meta("config", config.dump());
}

void emit(const igeo::ResultTable& table, const CliOptions& opts) {
    const std::string csv = table.to_csv();
    if (opts.out_path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw igeo::ConfigError("cannot open output file: " + opts.out_path);
    out << csv;
}

double json_number(const igeo::Json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw igeo::ConfigError("config needs numeric field \"" + key + "\"");
    return j.at(key).get<double>();
}

Eigen::VectorXd json_vector_eigen(const igeo::Json& j, const std::string& key, int dim) {
    if (!j.contains(key)) throw igeo::ConfigError("config needs array field \"" + key + "\"");
    const igeo::Vec v = igeo::parse_number_array(j.at(key), key);
    if (static_cast<int>(v.size()) != dim)
        throw igeo::ConfigError("field \"" + key + "\" must have " + std::to_string(dim) + " entries");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

igeo::SampleSpace config_space(const igeo::Json& config) {
    if (!config.contains("space")) throw igeo::ConfigError("config needs a \"space\" object");
    return igeo::parse_space(config.at("space"));
}

igeo::FamilyHandle config_family(const igeo::Json& config, const igeo::SampleSpace& space) {
    if (!config.contains("family")) throw igeo::ConfigError("config needs a \"family\" object");
    return igeo::parse_family(config.at("family"), space);
}

igeo::ResultTable cmd_divergence(const igeo::Json& config) {
    const igeo::SampleSpace space = config_space(config);
    if (!config.contains("p") || !config.contains("q"))
        throw igeo::ConfigError("divergence config needs \"p\" and \"q\" measures");
    const igeo::FiniteMeasure P = igeo::parse_measure(config.at("p"), space);
    const igeo::FiniteMeasure Q = igeo::parse_measure(config.at("q"), space);
    if (!config.contains("alphas")) throw igeo::ConfigError("divergence config needs an \"alphas\" array");
    const igeo::Vec alphas = igeo::parse_number_array(config.at("alphas"), "alphas");

    igeo::ResultTable table;
    table.columns = {"alpha", "div_pq", "div_qp_dual"};
    for (double a : alphas) {
        igeo::AlphaParam alpha(a);
        table.add_row({a, igeo::divergence(alpha, P, Q), igeo::divergence(alpha.dual(), Q, P)});
    }
    return table;
}

igeo::ResultTable cmd_geometry(const igeo::Json& config) {
    const igeo::SampleSpace space = config_space(config);
    const igeo::FamilyHandle handle = config_family(config, space);
    const int d = handle.family.dim;
    const Eigen::VectorXd y = json_vector_eigen(config, "y", d);
    const igeo::AlphaParam alpha(json_number(config, "alpha"));

    const igeo::ConnectionData conn = igeo::christoffel(handle.family, y, alpha);
    igeo::ResultTable table;
    table.label_column = "quantity";
    table.columns = {"k", "i", "j", "value"};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) table.add_row("g", {0.0, double(i), double(j), conn.g(i, j)});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) table.add_row("g_inv", {0.0, double(i), double(j), conn.g_inv(i, j)});
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                table.add_row("christoffel", {double(k), double(i), double(j), conn.christoffel[k](i, j)});
    return table;
}

igeo::ResultTable cmd_geodesic(const igeo::Json& config) {
    const igeo::SampleSpace space = config_space(config);
    const igeo::FamilyHandle handle = config_family(config, space);
    const int d = handle.family.dim;
    const igeo::AlphaParam alpha(json_number(config, "alpha"));
    const Eigen::VectorXd y0 = json_vector_eigen(config, "y0", d);
    const Eigen::VectorXd v0 = json_vector_eigen(config, "ydot0", d);
    const double t_end = json_number(config, "t_end");
    const double step = json_number(config, "step");

    const igeo::GeodesicTrace trace = igeo::geodesic(handle.family, alpha, y0, v0, t_end, step);
    igeo::ResultTable table;
    table.columns = {"t"};
    for (int i = 0; i < d; ++i) table.columns.push_back("y" + std::to_string(i));
    for (int i = 0; i < d; ++i) table.columns.push_back("ydot" + std::to_string(i));
    table.columns.push_back("metric_speed");
    for (std::size_t r = 0; r < trace.t.size(); ++r) {
        std::vector<double> row{trace.t[r]};
        for (int i = 0; i < d; ++i) row.push_back(trace.y[r][i]);
        for (int i = 0; i < d; ++i) row.push_back(trace.ydot[r][i]);
        row.push_back(trace.metric_speed[r]);
        table.add_row(std::move(row));
    }
    table.meta("status", trace.status == igeo::TraceStatus::ok ? "ok" : "out_of_domain");
    return table;
}

igeo::ResultTable cmd_transport(const igeo::Json& config) {
    const igeo::SampleSpace space = config_space(config);
    const igeo::FamilyHandle handle = config_family(config, space);
    const int d = handle.family.dim;
    const igeo::AlphaParam alpha(json_number(config, "alpha"));
    const Eigen::VectorXd y_start = json_vector_eigen(config, "y_start", d);
    const Eigen::VectorXd y_end = json_vector_eigen(config, "y_end", d);
    const Eigen::VectorXd u0 = json_vector_eigen(config, "u0", d);
    const double step = json_number(config, "step");
    std::optional<Eigen::VectorXd> v0;
    if (config.contains("v0")) v0 = json_vector_eigen(config, "v0", d);

    const Eigen::VectorXd delta = y_end - y_start;
    auto path = [y_start, delta](double t) -> Eigen::VectorXd { return y_start + t * delta; };
    auto path_dot = [delta](double) -> Eigen::VectorXd { return delta; };

    const igeo::TransportTrace trace =
        igeo::parallel_transport(handle.family, alpha, path, path_dot, u0, 1.0, step, v0);
    igeo::ResultTable table;
    table.columns = {"t"};
    for (int i = 0; i < d; ++i) table.columns.push_back("y" + std::to_string(i));
    for (int i = 0; i < d; ++i) table.columns.push_back("u" + std::to_string(i));
    if (v0)
        for (int i = 0; i < d; ++i) table.columns.push_back("v" + std::to_string(i));
    table.columns.push_back("conserved");
    for (std::size_t r = 0; r < trace.t.size(); ++r) {
        std::vector<double> row{trace.t[r]};
        for (int i = 0; i < d; ++i) row.push_back(trace.y[r][i]);
        for (int i = 0; i < d; ++i) row.push_back(trace.u[r][i]);
        if (v0)
            for (int i = 0; i < d; ++i) row.push_back(trace.v[r][i]);
        row.push_back(trace.conserved[r]);
        table.add_row(std::move(row));
    }
    table.meta("status", trace.status == igeo::TraceStatus::ok ? "ok" : "out_of_domain");
    return table;
}

igeo::ResultTable cmd_ngd(const igeo::Json& config) {
    const igeo::SampleSpace space = config_space(config);
    const igeo::FamilyHandle handle = config_family(config, space);
    const int d = handle.family.dim;
    const igeo::AlphaParam alpha(json_number(config, "alpha"));
    if (!config.contains("target")) throw igeo::ConfigError("ngd config needs a \"target\" measure");
    const igeo::FiniteMeasure target = igeo::parse_measure(config.at("target"), space);
    const Eigen::VectorXd y_init = json_vector_eigen(config, "y_init", d);
    const int max_iters = config.contains("max_iters") ? config.at("max_iters").get<int>() : 100;
    igeo::StepRule rule;
    if (config.contains("step_rule")) {
        const auto& sr = config.at("step_rule");
        if (sr.contains("initial")) rule.initial = sr.at("initial").get<double>();
        if (sr.contains("backtrack")) rule.backtrack = sr.at("backtrack").get<double>();
    }

    const igeo::DescentTrace trace =
        igeo::natural_gradient_descent(handle.family, alpha, target, y_init, rule, max_iters);
    igeo::ResultTable table;
    table.columns = {"iter"};
    for (int i = 0; i < d; ++i) table.columns.push_back("y" + std::to_string(i));
    table.columns.insert(table.columns.end(), {"objective", "grad_norm", "step_size"});
    for (std::size_t r = 0; r < trace.steps.size(); ++r) {
        std::vector<double> row{double(r)};
        for (int i = 0; i < d; ++i) row.push_back(trace.steps[r].y[i]);
        row.push_back(trace.steps[r].objective);
        row.push_back(trace.steps[r].grad_norm);
        row.push_back(trace.steps[r].step_size);
        table.add_row(std::move(row));
    }
    const char* reason = trace.reason == igeo::DescentTrace::Reason::converged ? "converged"
                       : trace.reason == igeo::DescentTrace::Reason::stalled   ? "stalled"
                                                                               : "max_iterations";
    table.meta("termination", reason);
    return table;
}

igeo::ResultTable cmd_verify(const igeo::Json& config, bool& all_pass) {
    igeo::VerifyConfig vcfg;
    if (!config.contains("seed"))
        throw igeo::ConfigError("verify config needs a \"seed\" (randomized sweeps must be seeded)");
    vcfg.seed = config.at("seed").get<std::uint64_t>();
    if (config.contains("space_size")) vcfg.space_size = config.at("space_size").get<int>();
    if (config.contains("samples")) vcfg.samples = config.at("samples").get<int>();
    if (config.contains("inequality_samples")) vcfg.inequality_samples = config.at("inequality_samples").get<int>();
    if (config.contains("tolerance_override")) vcfg.tolerance_override = config.at("tolerance_override").get<double>();
    if (config.contains("tolerance_scale")) vcfg.tolerance_scale = config.at("tolerance_scale").get<double>();
    if (vcfg.space_size < 1 || vcfg.samples < 1 || vcfg.inequality_samples < 1)
        throw igeo::ConfigError("verify sizes must be positive");

    const std::vector<igeo::InvariantResult> results = igeo::run_invariant_suite(vcfg);
    all_pass = igeo::all_invariants_pass(results);

    igeo::ResultTable table;
    table.label_column = "invariant";
    table.columns = {"samples", "max_violation", "tolerance", "pass"};
    for (const auto& r : results) {
        log_info(r.name + (r.pass ? " pass" : " FAIL"));
        table.add_row(r.name, {double(r.samples), r.max_violation, r.tolerance, r.pass ? 1.0 : 0.0});
    }
    return table;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"balanced-chart information geometry toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    const std::vector<std::string> commands{"divergence", "geometry", "geodesic", "transport", "ngd", "verify"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "JSON config path")->required();
        sub->add_option("--out", opts.out_path, "output CSV path (stdout if omitted)");
        sub->add_option("--seed", opts.seed, "override the config seed");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        igeo::Json config = igeo::load_json_file(opts.config_path);
        igeo::require_schema_version(config);
        config = resolved_config(std::move(config), opts);
        log_info("running " + command);

        igeo::ResultTable table;
        bool verify_pass = true;
        if (command == "divergence")
            table = cmd_divergence(config);
        else if (command == "geometry")
            table = cmd_geometry(config);
        else if (command == "geodesic")
            table = cmd_geodesic(config);
        else if (command == "transport")
            table = cmd_transport(config);
        else if (command == "ngd")
            table = cmd_ngd(config);
        else
            table = cmd_verify(config, verify_pass);

        if (config.contains("seed")) table.meta("seed", std::to_string(config.at("seed").get<std::uint64_t>()));
        attach_metadata(table, command, config);
        emit(table, opts);
        return verify_pass ? 0 : 1;
    } catch (const igeo::NumericsError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const igeo::SingularMetricError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const igeo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
