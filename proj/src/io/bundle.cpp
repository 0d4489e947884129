#include "oamqw/io/bundle.hpp"

#include "oamqw/errors.hpp"
#include "oamqw/io/csv.hpp"
#include "oamqw/modes.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>
#include <sstream>
#include <thread>

namespace oamqw::io {

using nlohmann::json;

namespace {

std::string render(const auto& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

json distribution_json(const OamDistribution& d) {
    json rows = json::array();
    for (int m : support_span(d)) {
        rows.push_back({{"m", m}, {"probability", d.at(m)}});
    }
    return rows;
}

json label_json(const Label& l) { return {{"pol", to_string(l.pol)}, {"m", l.m}}; }

json joint_json(const JointDistribution& j) {
    json rows = json::array();
    const auto n = static_cast<Eigen::Index>(j.labels.size());
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = j.stage == Stage::pre_bs ? a : 0; b < n; ++b) {
            if (j.probs(a, b) != 0.0) {
                rows.push_back({{"p", label_json(j.labels[static_cast<std::size_t>(a)])},
                                {"q", label_json(j.labels[static_cast<std::size_t>(b)])},
                                {"probability", j.probs(a, b)}});
            }
        }
    }
    return rows;
}

json violations_json(const ViolationReport& r) {
    json rows = json::array();
    for (const auto& v : r.pairs) {
        rows.push_back({{"p", label_json(v.p)}, {"q", label_json(v.q)}, {"t", v.t}});
    }
    return rows;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string point_dir(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%03zu", i);
    return buf;
}

double range_value(const ResultBundle& b, const std::string& parameter) {
    json::json_pointer ptr("/" + [&] {
        std::string s = parameter;
        std::replace(s.begin(), s.end(), '.', '/');
        return s;
    }());
    return b.config.source.at(ptr).get<double>();
}

}  // namespace

ResultBundle compute(const ExperimentConfig& cfg) {
    if (cfg.range && cfg.range->values.size() > 1) {
        throw ConfigError("'" + cfg.range->parameter + "' carries several values; use sweep");
    }
    ExperimentConfig point = cfg.range ? expand_sweep(cfg).front() : cfg;

    ResultBundle b;
    b.config = point;
    const WalkHooks hooks = make_hooks(point);

    if (point.mode == Mode::single) {
        b.distribution = run_walk(point.walk, hooks);
        b.intermediate = intermediate_distributions(point.walk, hooks);
        if (point.correct_bias) {
            OamDistribution raw = *b.distribution;
            double total = 0.0;
            for (auto& [m, p] : raw.probs) {
                const double eta = coupling_efficiency(m, point.sigma_over_w0);
                b.efficiency[m] = eta;
                p *= eta;
                total += p;
            }
            for (auto& [m, p] : raw.probs) {
                p /= total;
            }
            b.detected_raw = raw;
            b.detected_corrected = apply_detection_correction(raw, b.efficiency);
        }
        return b;
    }

    const SingleParticleUnitary u = single_particle_unitary(point.walk, point.inputs, point.basis, hooks);
    for (const JointModel model : point.models) {
        ModelResult r;
        r.model = model;
        r.pre = joint(model, u);
        r.post = bs_postselect(r.pre);
        r.oam = symmetrized_oam_joint(r.post);
        r.classical = classical_inequality(r.post);
        r.distinguishable = distinguishable_inequality(r.post);
        b.models.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < b.models.size(); ++i) {
        for (std::size_t j = i + 1; j < b.models.size(); ++j) {
            b.comparisons.push_back({b.models[i].model, b.models[j].model,
                                     similarity(b.models[i].oam, b.models[j].oam),
                                     total_variation(b.models[i].oam, b.models[j].oam)});
        }
    }
    return b;
}

std::map<std::string, std::string> render_payloads(const ResultBundle& b) {
    std::map<std::string, std::string> files;
    if (b.config.format == OutputFormat::json) {
        json doc;
        doc["mode"] = to_string(b.config.mode);
        if (b.distribution) {
            doc["distribution"] = distribution_json(*b.distribution);
            json steps = json::array();
            for (const auto& d : b.intermediate) {
                steps.push_back(distribution_json(d));
            }
            doc["intermediate"] = steps;
            doc["mean"] = b.distribution->mean();
            doc["variance"] = b.distribution->variance();
        }
        if (!b.efficiency.empty()) {
            json eff = json::array();
            for (const auto& [m, eta] : b.efficiency) {
                eff.push_back({{"m", m}, {"eta", eta}});
            }
            doc["efficiency"] = eff;
            doc["detected_raw"] = distribution_json(*b.detected_raw);
            doc["detected_corrected"] = distribution_json(*b.detected_corrected);
        }
        for (const auto& r : b.models) {
            json oam = json::array();
            for (const auto& [key, p] : r.oam) {
                if (p != 0.0) {
                    oam.push_back({{"m1", key.first}, {"m2", key.second}, {"probability", p}});
                }
            }
            doc["models"][to_string(r.model)] = {{"pre_bs", joint_json(r.pre)},
                                                 {"post_bs", joint_json(r.post)},
                                                 {"post_bs_total", r.post.total()},
                                                 {"oam_joint", oam},
                                                 {"violations_classical", violations_json(r.classical)},
                                                 {"violations_distinguishable",
                                                  violations_json(r.distinguishable)}};
        }
        for (const auto& c : b.comparisons) {
            doc["comparisons"].push_back({{"a", to_string(c.a)},
                                          {"b", to_string(c.b)},
                                          {"similarity", c.similarity},
                                          {"total_variation", c.total_variation}});
        }
        files["bundle.json"] = doc.dump(2) + "\n";
        return files;
    }

    if (b.distribution) {
        files["distribution.csv"] = render([&](std::ostream& o) { write_distribution_csv(o, *b.distribution); });
        files["intermediate.csv"] = render([&](std::ostream& o) { write_intermediate_csv(o, b.intermediate); });
        files["summary.csv"] = "n_steps,mean,variance\n" + std::to_string(b.distribution->n_steps) + "," +
                               format_double(b.distribution->mean()) + "," +
                               format_double(b.distribution->variance()) + "\n";
    }
    if (!b.efficiency.empty()) {
        std::string eff = "m,eta\n";
        for (const auto& [m, eta] : b.efficiency) {
            eff += std::to_string(m) + "," + format_double(eta) + "\n";
        }
        files["efficiency.csv"] = eff;
        files["detected_raw.csv"] = render([&](std::ostream& o) { write_distribution_csv(o, *b.detected_raw); });
        files["detected_corrected.csv"] =
            render([&](std::ostream& o) { write_distribution_csv(o, *b.detected_corrected); });
    }
    for (const auto& r : b.models) {
        const std::string name = to_string(r.model);
        files["joint_" + name + "_pre_bs.csv"] = render([&](std::ostream& o) { write_joint_csv(o, r.pre); });
        files["joint_" + name + "_post_bs.csv"] = render([&](std::ostream& o) { write_joint_csv(o, r.post); });
        files["oam_joint_" + name + ".csv"] = render([&](std::ostream& o) { write_oam_joint_csv(o, r.oam); });
        files["violations_" + name + ".csv"] = render([&](std::ostream& o) {
            write_violations_csv(o, r.classical);
            std::ostringstream rest;
            write_violations_csv(rest, r.distinguishable);
            const std::string s = rest.str();
            o << s.substr(s.find('\n') + 1);
        });
    }
    if (!b.comparisons.empty()) {
        std::string cmp = "model_a,model_b,similarity,total_variation\n";
        for (const auto& c : b.comparisons) {
            cmp += to_string(c.a) + "," + to_string(c.b) + "," + format_double(c.similarity) + "," +
                   format_double(c.total_variation) + "\n";
        }
        files["comparison.csv"] = cmp;
    }
    return files;
}

std::string render_metadata(const ResultBundle& b) {
    json meta;
    meta["config"] = b.config.source;
    meta["config_hash"] = config_hash(b.config.source);
    meta["version"] = version;
    meta["generated_utc"] = utc_timestamp();
    meta["mode"] = to_string(b.config.mode);
    json files = json::array();
    for (const auto& [name, content] : render_payloads(b)) {
        files.push_back(name);
    }
    meta["files"] = files;
    return meta.dump(2) + "\n";
}

void write_bundle(const ResultBundle& b, const std::filesystem::path& dir) {
    for (const auto& [name, content] : render_payloads(b)) {
        write_file(dir / name, content);
    }
    write_file(dir / "metadata.json", render_metadata(b));
}

ResultBundle run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    ResultBundle b = compute(cfg);
    write_bundle(b, out_dir);
    return b;
}

std::string sweep_summary_csv(const std::vector<ResultBundle>& points) {
    if (points.empty()) {
        return "";
    }
    const ExperimentConfig& first = points.front().config;
    const std::string parameter = first.range ? first.range->parameter : "";
    std::ostringstream out;
    out << "index";
    if (!parameter.empty()) {
        out << ',' << parameter;
    }
    if (first.mode == Mode::single) {
        out << ",mean,variance";
    } else {
        for (const auto m : first.models) {
            out << ',' << to_string(m) << "_classical_violations," << to_string(m)
                << "_distinguishable_violations";
        }
        for (const auto& c : points.front().comparisons) {
            out << ",similarity_" << to_string(c.a) << '_' << to_string(c.b);
        }
    }
    out << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ResultBundle& b = points[i];
        out << i;
        if (!parameter.empty()) {
            out << ',' << format_double(range_value(b, parameter));
        }
        if (b.distribution) {
            out << ',' << format_double(b.distribution->mean()) << ','
                << format_double(b.distribution->variance());
        }
        for (const auto& r : b.models) {
            out << ',' << r.classical.pairs.size() << ',' << r.distinguishable.pairs.size();
        }
        for (const auto& c : b.comparisons) {
            out << ',' << format_double(c.similarity);
        }
        out << '\n';
    }
    return out.str();
}

SweepResult sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::vector<ExperimentConfig> grid = expand_sweep(cfg);
    // Keep the range description on each point for the summary.
    for (auto& g : grid) {
        g.range = cfg.range;
    }

    SweepResult result;
    result.points.resize(grid.size());
    const std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < grid.size(); start += workers) {
        const std::size_t stop = std::min(grid.size(), start + workers);
        std::vector<std::future<ResultBundle>> jobs;
        for (std::size_t i = start; i < stop; ++i) {
            jobs.push_back(std::async(std::launch::async, [&grid, &out_dir, i] {
                ExperimentConfig point = grid[i];
                point.range.reset();
                ResultBundle b = compute(point);
                write_bundle(b, out_dir / point_dir(i));
                return b;
            }));
        }
        for (std::size_t i = start; i < stop; ++i) {
            result.points[i] = jobs[i - start].get();
            result.points[i].config.range = cfg.range;
        }
    }
    result.summary_csv = sweep_summary_csv(result.points);
    write_file(out_dir / "summary.csv", result.summary_csv);
    return result;
}

}  // namespace oamqw::io
