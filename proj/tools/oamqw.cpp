// Command-line driver.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad configuration, command
// line or input data, 3 computation error, 4 file-system error.

#include "oamqw/analysis.hpp"
#include "oamqw/errors.hpp"
#include "oamqw/io/bundle.hpp"
#include "oamqw/io/config.hpp"
#include "oamqw/io/csv.hpp"
#include "oamqw/modes.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace oamqw;

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::uint64_t seed = 12345;

    int m = 0;
    int p_max = 10;
    int m_min = -5;
    int m_max = 5;
    double sigma = 1.0;

    std::string counts;
    std::string kind = "both";
    bool no_merge = false;
    int bootstrap = 0;
};

io::ExperimentConfig load(const Options& o, std::optional<io::Mode> mode) {
    if (o.config.empty()) {
        throw ConfigError("--config is required");
    }
    io::ExperimentConfig cfg = io::load_config(o.config);
    if (mode && cfg.source.contains("mode") && cfg.mode != *mode) {
        throw ConfigError("config mode '" + io::to_string(cfg.mode) + "' does not match the subcommand");
    }
    if (mode) {
        cfg.mode = *mode;
    }
    if (o.format == "csv") {
        cfg.format = io::OutputFormat::csv;
    } else if (o.format == "json") {
        cfg.format = io::OutputFormat::json;
    }
    return cfg;
}

fs::path out_dir(const Options& o, const io::ExperimentConfig& cfg) {
    return o.out.empty() ? fs::path(cfg.output_path) : fs::path(o.out);
}

// Writes to `<out>/<name>` when --out is given, else to stdout.
void emit(const Options& o, const std::string& name, const std::string& content) {
    if (o.out.empty()) {
        std::cout << content;
    } else {
        io::write_file(fs::path(o.out) / name, content);
    }
}

void cmd_run(const Options& o, io::Mode mode) {
    const io::ExperimentConfig cfg = load(o, mode);
    const fs::path dir = out_dir(o, cfg);
    const io::ResultBundle b = io::run(cfg, dir);
    if (b.distribution) {
        std::cout << "variance " << io::format_double(b.distribution->variance()) << '\n';
    }
    for (const auto& r : b.models) {
        std::cout << to_string(r.model) << ": " << r.classical.pairs.size()
                  << " classical-bound violations, " << r.distinguishable.pairs.size()
                  << " distinguishable-bound violations\n";
    }
    std::cout << "wrote " << dir.string() << '\n';
}

void cmd_sweep(const Options& o) {
    const io::ExperimentConfig cfg = load(o, std::nullopt);
    const fs::path dir = out_dir(o, cfg);
    const io::SweepResult s = io::sweep(cfg, dir);
    std::cout << s.summary_csv << "wrote " << s.points.size() << " points to " << dir.string() << '\n';
}

void cmd_coeffs(const Options& o) {
    const RadialCoeffs rc = qp_radial_coeffs(o.m, o.p_max);
    std::string csv = "m,p,c_p,power\n";
    for (std::size_t p = 0; p < rc.coeffs.size(); ++p) {
        csv += std::to_string(rc.m) + "," + std::to_string(p) + "," + io::format_double(rc.coeffs[p]) +
               "," + io::format_double(rc.coeffs[p] * rc.coeffs[p]) + "\n";
    }
    emit(o, "radial_coeffs.csv", csv);
}

void cmd_coupling(const Options& o) {
    if (o.m_min > o.m_max) {
        throw ConfigError("--m-min must not exceed --m-max");
    }
    std::string csv = "m,eta\n";
    for (int m = o.m_min; m <= o.m_max; ++m) {
        csv += std::to_string(m) + "," + io::format_double(coupling_efficiency(m, o.sigma)) + "\n";
    }
    emit(o, "coupling_efficiency.csv", csv);
}

void cmd_counts(const Options& o) {
    const CountTable table = io::ingest_counts(o.counts, !o.no_merge);
    std::vector<InequalityKind> kinds;
    if (o.kind == "classical" || o.kind == "both") {
        kinds.push_back(InequalityKind::classical);
    }
    if (o.kind == "distinguishable" || o.kind == "both") {
        kinds.push_back(InequalityKind::distinguishable);
    }
    std::ostringstream out;
    if (o.bootstrap > 0) {
        out << "kind,pol1,m1,pol2,m2,t,sigma_t,significance,bootstrap_sigma_t\n";
    } else {
        out << "kind,pol1,m1,pol2,m2,t,sigma_t,significance\n";
    }
    for (const auto kind : kinds) {
        const ViolationReport r = significance(table, kind);
        for (const auto& v : r.pairs) {
            out << to_string(kind) << ',' << to_string(v.p.pol) << ',' << v.p.m << ','
                << to_string(v.q.pol) << ',' << v.q.m << ',' << io::format_double(v.t) << ','
                << io::format_double(*v.sigma_t) << ',' << io::format_double(*v.significance);
            if (o.bootstrap > 0) {
                out << ',' << io::format_double(bootstrap_sigma(table, v.p, v.q, kind, o.bootstrap, o.seed));
            }
            out << '\n';
        }
    }
    emit(o, "violations.csv", out.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photonic spin-orbit quantum-walk simulator"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* c, bool with_config) {
        if (with_config) {
            c->add_option("--config", o.config, "JSON experiment config")->required();
        }
        c->add_option("--out", o.out, "Output directory");
        c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        c->add_option("--seed", o.seed, "Seed for bootstrap cross-checks");
    };

    auto* walk = app.add_subcommand("walk", "Single-photon walk");
    add_common(walk, true);
    auto* two = app.add_subcommand("two-photon", "Two-photon walk statistics");
    add_common(two, true);
    auto* sweep = app.add_subcommand("sweep", "Run a config over its ranged parameter");
    add_common(sweep, true);

    auto* modes = app.add_subcommand("modes", "Radial-mode numerics");
    modes->require_subcommand(1);
    auto* coeffs = modes->add_subcommand("coeffs", "Radial expansion coefficients of the q-plate output");
    add_common(coeffs, false);
    coeffs->add_option("--m", o.m, "Input OAM (>= 0)");
    coeffs->add_option("--p-max", o.p_max, "Highest radial index");
    auto* coupling = modes->add_subcommand("coupling", "Fiber-coupling efficiency per OAM");
    add_common(coupling, false);
    coupling->add_option("--m-min", o.m_min, "Lowest OAM");
    coupling->add_option("--m-max", o.m_max, "Highest OAM");
    coupling->add_option("--sigma", o.sigma, "Fiber mode radius over beam waist");

    auto* analyze = app.add_subcommand("analyze", "Analyze measured data");
    analyze->require_subcommand(1);
    auto* counts = analyze->add_subcommand("counts", "Inequality violations from coincidence counts");
    add_common(counts, false);
    counts->add_option("--counts", o.counts, "CSV with header pol1,m1,pol2,m2,counts")->required();
    counts->add_option("--kind", o.kind, "Which bound to test")
        ->check(CLI::IsMember({"classical", "distinguishable", "both"}));
    counts->add_flag("--no-merge", o.no_merge, "Keep (p,q) and (q,p) as separate cells");
    counts->add_option("--bootstrap", o.bootstrap, "Bootstrap samples for a sigma cross-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*walk) {
            cmd_run(o, io::Mode::single);
        } else if (*two) {
            cmd_run(o, io::Mode::two_photon);
        } else if (*sweep) {
            cmd_sweep(o);
        } else if (*coeffs) {
            cmd_coeffs(o);
        } else if (*coupling) {
            cmd_coupling(o);
        } else if (*counts) {
            cmd_counts(o);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const NegativeCount& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
