#include "oamqw/io/config.hpp"

#include "oamqw/errors.hpp"
#include "oamqw/modes.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace oamqw::io {

using nlohmann::json;

namespace {

constexpr cplx I{0.0, 1.0};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        fail(where, "expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.contains(key)) {
            fail(where, "unknown key '" + key + "'");
        }
    }
}

double parse_number_token(const std::string& tok, const std::string& where) {
    if (tok == "pi") {
        return pi;
    }
    double v = 0.0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || tok.empty()) {
        fail(where, "cannot read '" + tok + "' as a number");
    }
    return v;
}

bool is_range(const json& v) {
    return v.is_object() && (v.contains("values") || v.contains("linspace"));
}

std::vector<double> range_values(const json& v, const std::string& where) {
    check_keys(v, where, {"values", "linspace"});
    if (v.contains("values") == v.contains("linspace")) {
        fail(where, "a range takes exactly one of 'values' or 'linspace'");
    }
    std::vector<double> out;
    if (v.contains("values")) {
        const json& vals = v.at("values");
        if (!vals.is_array() || vals.empty()) {
            fail(where + ".values", "expected a non-empty array");
        }
        for (const auto& x : vals) {
            out.push_back(parse_angle(x, where + ".values"));
        }
        return out;
    }
    const json& ls = v.at("linspace");
    const std::string lw = where + ".linspace";
    check_keys(ls, lw, {"start", "stop", "num"});
    if (!ls.contains("start") || !ls.contains("stop") || !ls.contains("num")) {
        fail(lw, "needs start, stop and num");
    }
    const double a = parse_angle(ls.at("start"), lw + ".start");
    const double b = parse_angle(ls.at("stop"), lw + ".stop");
    if (!ls.at("num").is_number_integer() || ls.at("num").get<int>() < 1) {
        fail(lw + ".num", "expected a positive integer");
    }
    const int num = ls.at("num").get<int>();
    for (int i = 0; i < num; ++i) {
        out.push_back(num == 1 ? a : a + (b - a) * i / (num - 1));
    }
    return out;
}

bool get_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) {
        fail(where, "expected true or false");
    }
    return v.get<bool>();
}

cplx parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    fail(where, "expected a number or [re, im]");
}

CoinState parse_coin(const json& v, const std::string& where) {
    const double r = 1.0 / std::sqrt(2.0);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "L") return {1.0, 0.0};
        if (s == "R") return {0.0, 1.0};
        if (s == "H") return {r, r};
        if (s == "V") return {-I * r, I * r};
        fail(where, "coin shorthand must be L, R, H or V");
    }
    check_keys(v, where, {"L", "R"});
    const cplx l = v.contains("L") ? parse_complex(v.at("L"), where + ".L") : cplx{};
    const cplx rr = v.contains("R") ? parse_complex(v.at("R"), where + ".R") : cplx{};
    CoinState c{l, rr};
    if (!(c.norm_squared() > 0.0) || !std::isfinite(c.norm_squared())) {
        fail(where, "coin state must have nonzero finite norm");
    }
    return c.normalized();
}

Label parse_input_label(const json& v, const std::string& where) {
    try {
        if (v.is_array() && v.size() == 2 && v[0].is_string() && v[1].is_number_integer()) {
            return {parse_pol_label(v[0].get<std::string>()), v[1].get<int>()};
        }
        if (v.is_object()) {
            check_keys(v, where, {"pol", "m"});
            if (v.contains("pol") && v.contains("m") && v.at("pol").is_string() &&
                v.at("m").is_number_integer()) {
                return {parse_pol_label(v.at("pol").get<std::string>()), v.at("m").get<int>()};
            }
        }
    } catch (const InvalidParameter& e) {
        fail(where, e.what());
    }
    fail(where, "expected [pol, m] or {\"pol\": .., \"m\": ..}");
}

JointModel parse_model(const json& v, const std::string& where) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "bosonic") return JointModel::bosonic;
        if (s == "distinguishable") return JointModel::distinguishable;
        if (s == "classical") return JointModel::classical;
    }
    fail(where, "model must be bosonic, distinguishable or classical");
}

// Walks the document, records ranged fields and fills in the config using the
// first value of any range.
class Parser {
public:
    std::vector<RangeSpec> ranges;

    double scalar_or_range(const json& v, const std::string& where) {
        if (is_range(v)) {
            RangeSpec r{where, range_values(v, where)};
            ranges.push_back(r);
            return r.values.front();
        }
        return parse_angle(v, where);
    }

    ExperimentConfig parse(const json& doc) {
        check_keys(doc, "config",
                   {"schema_version", "mode", "walk", "two_photon", "models", "imperfections",
                    "detection", "output"});
        if (!doc.contains("schema_version")) {
            fail("config", "missing schema_version");
        }
        if (!doc.at("schema_version").is_number_integer() ||
            doc.at("schema_version").get<int>() != schema_version) {
            fail("schema_version", "unsupported version (expected " + std::to_string(schema_version) + ")");
        }

        ExperimentConfig cfg;
        if (doc.contains("mode")) {
            const json& m = doc.at("mode");
            if (m == "single") {
                cfg.mode = Mode::single;
            } else if (m == "two_photon") {
                cfg.mode = Mode::two_photon;
            } else {
                fail("mode", "must be single or two_photon");
            }
        }

        if (!doc.contains("walk")) {
            fail("config", "missing walk section");
        }
        parse_walk(doc.at("walk"), cfg);

        if (doc.contains("two_photon")) {
            const json& tp = doc.at("two_photon");
            check_keys(tp, "two_photon", {"inputs", "basis"});
            if (tp.contains("inputs")) {
                const json& in = tp.at("inputs");
                if (!in.is_array() || in.size() != 2) {
                    fail("two_photon.inputs", "expected exactly two input labels");
                }
                cfg.inputs = {parse_input_label(in[0], "two_photon.inputs[0]"),
                              parse_input_label(in[1], "two_photon.inputs[1]")};
                if (cfg.inputs[0] == cfg.inputs[1]) {
                    fail("two_photon.inputs", "the two inputs must differ");
                }
            }
            if (tp.contains("basis")) {
                const json& b = tp.at("basis");
                if (b == "circular") {
                    cfg.basis = PolBasis::circular;
                } else if (b == "linear") {
                    cfg.basis = PolBasis::linear;
                } else {
                    fail("two_photon.basis", "must be circular or linear");
                }
            }
        }

        if (doc.contains("models")) {
            const json& ms = doc.at("models");
            if (!ms.is_array() || ms.empty()) {
                fail("models", "expected a non-empty array");
            }
            cfg.models.clear();
            for (std::size_t i = 0; i < ms.size(); ++i) {
                const JointModel jm = parse_model(ms[i], "models[" + std::to_string(i) + "]");
                for (const auto existing : cfg.models) {
                    if (existing == jm) {
                        fail("models", "duplicate model '" + to_string(jm) + "'");
                    }
                }
                cfg.models.push_back(jm);
            }
        }

        if (doc.contains("imperfections")) {
            const json& im = doc.at("imperfections");
            check_keys(im, "imperfections", {"gouy_d_over_zR", "radial_damping"});
            if (im.contains("gouy_d_over_zR")) {
                cfg.gouy_d_over_zR =
                    scalar_or_range(im.at("gouy_d_over_zR"), "imperfections.gouy_d_over_zR");
                if (!(cfg.gouy_d_over_zR >= 0.0)) {
                    fail("imperfections.gouy_d_over_zR", "must be >= 0");
                }
            }
            if (im.contains("radial_damping")) {
                cfg.radial_damping = get_bool(im.at("radial_damping"), "imperfections.radial_damping");
            }
        }

        if (doc.contains("detection")) {
            const json& d = doc.at("detection");
            check_keys(d, "detection", {"correct_bias", "sigma_over_w0"});
            if (d.contains("correct_bias")) {
                cfg.correct_bias = get_bool(d.at("correct_bias"), "detection.correct_bias");
            }
            if (d.contains("sigma_over_w0")) {
                cfg.sigma_over_w0 = scalar_or_range(d.at("sigma_over_w0"), "detection.sigma_over_w0");
                if (!(cfg.sigma_over_w0 > 0.0)) {
                    fail("detection.sigma_over_w0", "must be > 0");
                }
            }
        }

        if (doc.contains("output")) {
            const json& o = doc.at("output");
            check_keys(o, "output", {"path", "format"});
            if (o.contains("path")) {
                if (!o.at("path").is_string() || o.at("path").get<std::string>().empty()) {
                    fail("output.path", "expected a non-empty string");
                }
                cfg.output_path = o.at("path").get<std::string>();
            }
            if (o.contains("format")) {
                const json& f = o.at("format");
                if (f == "csv") {
                    cfg.format = OutputFormat::csv;
                } else if (f == "json") {
                    cfg.format = OutputFormat::json;
                } else {
                    fail("output.format", "must be csv or json");
                }
            }
        }

        if (cfg.walk.dephase_sites && cfg.gouy_d_over_zR > 0.0) {
            fail("walk.dephase_sites", "cannot be combined with Gouy dephasing");
        }
        if (cfg.walk.dephase_sites && cfg.mode == Mode::two_photon) {
            fail("walk.dephase_sites", "only available for single-photon runs");
        }
        if (ranges.size() > 1) {
            fail("config", "at most one parameter may carry a range (found " +
                               std::to_string(ranges.size()) + ")");
        }
        if (!ranges.empty()) {
            cfg.range = ranges.front();
        }
        try {
            cfg.walk.validate();
        } catch (const InvalidParameter& e) {
            fail("walk", e.what());
        }
        cfg.source = doc;
        return cfg;
    }

private:
    void parse_walk(const json& w, ExperimentConfig& cfg) {
        check_keys(w, "walk",
                   {"n_steps", "delta", "include_hwp", "coin", "q", "alpha0", "qwp_orientation",
                    "hwp_orientation", "dephase_sites"});
        if (!w.contains("n_steps")) {
            fail("walk", "missing n_steps");
        }
        WalkConfig& wc = cfg.walk;
        const json& n = w.at("n_steps");
        if (is_range(n)) {
            RangeSpec r{"walk.n_steps", range_values(n, "walk.n_steps")};
            for (double v : r.values) {
                if (v < 0.0 || v != std::floor(v)) {
                    fail("walk.n_steps", "range values must be non-negative integers");
                }
            }
            ranges.push_back(r);
            wc.n_steps = static_cast<int>(r.values.front());
        } else if (n.is_number_integer() && n.get<int>() >= 0) {
            wc.n_steps = n.get<int>();
        } else {
            fail("walk.n_steps", "expected a non-negative integer");
        }
        const auto steps = static_cast<std::size_t>(wc.n_steps);

        wc.delta_schedule.assign(steps, pi);
        if (w.contains("delta")) {
            const json& d = w.at("delta");
            if (d.is_array()) {
                wc.delta_schedule.clear();
                for (std::size_t i = 0; i < d.size(); ++i) {
                    wc.delta_schedule.push_back(parse_angle(d[i], "walk.delta[" + std::to_string(i) + "]"));
                }
                if (wc.delta_schedule.size() != steps) {
                    fail("walk.delta", "per-step list needs n_steps entries");
                }
            } else {
                wc.delta_schedule.assign(steps, scalar_or_range(d, "walk.delta"));
            }
            for (double x : wc.delta_schedule) {
                if (!(x >= 0.0 && x <= pi)) {
                    fail("walk.delta", "retardation must lie in [0, pi]");
                }
            }
        }

        wc.include_hwp.assign(steps, true);
        if (w.contains("include_hwp")) {
            const json& h = w.at("include_hwp");
            if (h.is_array()) {
                wc.include_hwp.clear();
                for (std::size_t i = 0; i < h.size(); ++i) {
                    wc.include_hwp.push_back(get_bool(h[i], "walk.include_hwp[" + std::to_string(i) + "]"));
                }
                if (wc.include_hwp.size() != steps) {
                    fail("walk.include_hwp", "per-step list needs n_steps entries");
                }
            } else {
                wc.include_hwp.assign(steps, get_bool(h, "walk.include_hwp"));
            }
        }

        wc.coin_init = w.contains("coin") ? parse_coin(w.at("coin"), "walk.coin") : CoinState{1.0, 0.0};

        if (w.contains("q")) {
            const json& q = w.at("q");
            if (!q.is_number()) {
                fail("walk.q", "expected a number");
            }
            const double twice = 2.0 * q.get<double>();
            if (twice != std::round(twice) || twice == 0.0) {
                fail("walk.q", "must be a nonzero half-integer");
            }
            wc.twice_q = static_cast<int>(twice);
        }
        if (w.contains("alpha0")) {
            wc.alpha0 = scalar_or_range(w.at("alpha0"), "walk.alpha0");
        }
        if (w.contains("qwp_orientation")) {
            wc.qwp_orientation = parse_angle(w.at("qwp_orientation"), "walk.qwp_orientation");
        }
        if (w.contains("hwp_orientation")) {
            wc.hwp_orientation = parse_angle(w.at("hwp_orientation"), "walk.hwp_orientation");
        }
        if (w.contains("dephase_sites")) {
            wc.dephase_sites = get_bool(w.at("dephase_sites"), "walk.dephase_sites");
        }
    }
};

json::json_pointer pointer_for(const std::string& dotted) {
    std::string p;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        p += "/" + part;
    }
    return json::json_pointer(p);
}

json substitute(const json& doc, const RangeSpec& r, double value) {
    json out = doc;
    if (r.parameter == "walk.n_steps") {
        out[pointer_for(r.parameter)] = static_cast<int>(value);
    } else {
        out[pointer_for(r.parameter)] = value;
    }
    return out;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::single ? "single" : "two_photon"; }

double parse_angle(const json& v, const std::string& where) {
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(where, "expected a finite number");
        }
        return x;
    }
    if (!v.is_string()) {
        fail(where, "expected a number or an expression such as \"pi/2\"");
    }
    std::string s;
    for (char c : v.get<std::string>()) {
        if (c != ' ') {
            s.push_back(c);
        }
    }
    double sign = 1.0;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        sign = s.front() == '-' ? -1.0 : 1.0;
        s.erase(0, 1);
    }
    if (s.empty()) {
        fail(where, "empty expression");
    }
    double denom = 1.0;
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        denom = parse_number_token(s.substr(slash + 1), where);
        s = s.substr(0, slash);
        if (denom == 0.0) {
            fail(where, "division by zero");
        }
    }
    double value = 1.0;
    std::stringstream ss(s);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
        value *= parse_number_token(factor, where);
    }
    return sign * value / denom;
}

ExperimentConfig parse_config(const json& doc) {
    Parser parser;
    ExperimentConfig cfg = parser.parse(doc);
    if (cfg.range) {
        // Every grid point must be valid before anything runs.
        for (double v : cfg.range->values) {
            Parser point;
            point.parse(substitute(doc, *cfg.range, v));
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg) {
    if (!cfg.range) {
        return {cfg};
    }
    std::vector<ExperimentConfig> out;
    out.reserve(cfg.range->values.size());
    for (double v : cfg.range->values) {
        Parser point;
        out.push_back(point.parse(substitute(cfg.source, *cfg.range, v)));
    }
    return out;
}

std::string config_hash(const json& doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : doc.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

WalkHooks make_hooks(const ExperimentConfig& cfg) {
    WalkHooks hooks;
    if (cfg.radial_damping) {
        hooks.qplate_weight = radial_retention_weight();
    }
    if (cfg.gouy_d_over_zR > 0.0) {
        const double d = cfg.gouy_d_over_zR;
        hooks.between_steps = [d](const WalkState& s) { return gouy_dephase(s, d); };
    }
    return hooks;
}

}  // namespace oamqw::io
