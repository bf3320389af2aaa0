#include "tdi/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdi/enumeration.hpp"
#include "tdi/expsums.hpp"
#include "tdi/gowers.hpp"
#include "tdi/io.hpp"
#include "tdi/local.hpp"
#include "tdi/mainterm.hpp"
#include "tdi/parallel.hpp"

namespace tdi {

namespace {

using Json = nlohmann::ordered_json;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    Json result = Json::object();
    std::optional<Table> table;
    bool prefer_csv = false;
};

std::string real_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::int64_t> int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const auto& t : split(text, ',')) {
        std::size_t used = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size()) throw Error(Errc::parse_error, "bad integer '" + t + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<double> real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& t : split(text, ',')) {
        if (t.find('/') != std::string::npos) {
            out.push_back(parse_rational(t).get_d());
            continue;
        }
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size()) throw Error(Errc::parse_error, "bad real '" + t + "'");
        out.push_back(v);
    }
    return out;
}

Json biglog_json(const BigLogNumber& v) {
    Json j;
    j["repr"] = v.to_string();
    j["sign"] = v.sign();
    if (v.sign() != 0 && v.log2_abs().level() == 0)
        j["log2"] = v.log2_abs().raw();
    else
        j["log2"] = nullptr;
    return j;
}

Json wide_json(const WideReal& v) {
    if (v.level() == 0) return v.raw();
    return (v.sign() < 0 ? "-2^(" : "2^(") + real_str(v.raw()) + ")";
}

Json complex_json(std::complex<double> z) {
    Json j;
    j["re"] = z.real();
    j["im"] = z.imag();
    j["abs"] = std::abs(z);
    return j;
}

struct Inputs {
    std::string system_path;
    int k = 0;
    std::string lambda;
    std::string set_path;
    std::int64_t n = 0;
};

void add_system_options(CLI::App* sub, Inputs& in) {
    sub->add_option("--system", in.system_path, "System JSON file {\"k\", \"lambda\"}");
    sub->add_option("--k", in.k, "Degree (with --lambda instead of --system)");
    sub->add_option("--lambda", in.lambda, "Comma separated coefficients");
}

void add_window_options(CLI::App* sub, Inputs& in) {
    sub->add_option("--set", in.set_path, "Set file");
    sub->add_option("--n", in.n, "Use the full interval [1,N]");
}

DiagonalSystem load_system(const Inputs& in) {
    if (!in.system_path.empty()) return read_system_file(in.system_path);
    if (in.lambda.empty()) throw Error(Errc::parse_error, "need --system FILE or --k K --lambda l1,...,ls");
    return DiagonalSystem(in.k, int_list(in.lambda));
}

SetWindow load_window(const Inputs& in) {
    if (!in.set_path.empty()) return read_set_file(in.set_path);
    if (in.n < 1) throw Error(Errc::parse_error, "need --set FILE or --n N");
    return SetWindow::full(in.n);
}

Json int_array(std::span<const std::int64_t> v) {
    Json a = Json::array();
    for (auto x : v) a.push_back(x);
    return a;
}

Json system_json(const DiagonalSystem& sys) {
    Json j;
    j["k"] = sys.degree();
    j["s"] = sys.arity();
    j["lambda"] = int_array(sys.coefficients());
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string json_scalar(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

CliResult run_cli(const std::vector<std::string>& raw_args) {
    CliResult res;
    CLI::App app{"Translation/dilation invariant diagonal systems toolkit", "tdi"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();

    std::string output = "auto";
    int threads = 0;
    double budget_ops = 1e9;
    std::uint64_t seed = 1;
    bool timing = false;
    app.add_option("--output", output, "json, csv or auto")->check(CLI::IsMember({"auto", "json", "csv"}));
    app.add_option("--threads", threads, "Worker cap (results do not depend on it)");
    app.add_option("--budget", budget_ops, "Operation budget");
    app.add_option("--seed", seed, "Seed for randomized generators");
    app.add_flag("--timing", timing, "Print wall time to stderr");

    std::function<Report()> handler;
    std::string command;
    auto sub = [&](const char* name, const char* help) {
        return app.add_subcommand(name, help);
    };
    auto budget = [&] {
        Budget b;
        b.max_ops = budget_ops;
        return b;
    };

    Inputs in;

    // validate
    std::string tuple;
    {
        auto* s = sub("validate", "Validate a system and optionally classify a tuple");
        add_system_options(s, in);
        s->add_option("--tuple", tuple, "Comma separated tuple to classify");
        s->final_callback([&] {
            handler = [&] {
                Report r;
                DiagonalSystem sys = load_system(in);
                r.result["valid"] = true;
                r.result["system"] = system_json(sys);
                if (!tuple.empty()) {
                    auto x = int_list(tuple);
                    if (static_cast<int>(x.size()) != sys.arity())
                        throw Error(Errc::arity_mismatch, "tuple length differs from arity");
                    ClassificationReport c = classify(sys, x);
                    r.result["tuple"] = int_array(x);
                    r.result["is_solution"] = c.is_solution;
                    r.result["is_trivial"] = c.is_trivial;
                    r.result["is_nonsingular"] = c.is_nonsingular;
                    r.result["distinct_values"] = c.distinct_values;
                }
                return r;
            };
        });
    }

    // count
    std::string count_method = "auto";
    {
        auto* s = sub("count", "Exact solution count in a window");
        add_system_options(s, in);
        add_window_options(s, in);
        s->add_option("--method", count_method)->check(CLI::IsMember({"naive", "mitm", "auto"}));
        s->final_callback([&] {
            handler = [&] {
                DiagonalSystem sys = load_system(in);
                SetWindow w = load_window(in);
                CountMethod m = count_method == "naive" ? CountMethod::naive
                                : count_method == "mitm" ? CountMethod::mitm
                                                         : CountMethod::automatic;
                SolutionTally t = count_solutions(sys, w, m, budget());
                Report r;
                r.result["n"] = w.length();
                r.result["cardinality"] = w.cardinality();
                r.result["total"] = to_string(t.total);
                r.result["trivial"] = to_string(t.trivial);
                r.result["nontrivial"] = to_string(t.nontrivial);
                return r;
            };
        });
    }

    // stream
    std::string filter = "all";
    std::int64_t limit = 0;
    {
        auto* s = sub("stream", "List solutions in lexicographic order");
        add_system_options(s, in);
        add_window_options(s, in);
        s->add_option("--filter", filter)->check(CLI::IsMember({"all", "nontrivial"}));
        s->add_option("--limit", limit, "Stop after this many solutions (0 = all)");
        s->final_callback([&] {
            handler = [&] {
                DiagonalSystem sys = load_system(in);
                SetWindow w = load_window(in);
                SolutionStream stream(sys, w, filter == "all" ? StreamFilter::all : StreamFilter::nontrivial, budget());
                Report r;
                Table t;
                for (int i = 1; i <= sys.arity(); ++i) t.columns.push_back("x" + std::to_string(i));
                Json list = Json::array();
                bool truncated = false;
                while (auto x = stream.next()) {
                    if (limit > 0 && static_cast<std::int64_t>(list.size()) == limit) {
                        truncated = true;
                        break;
                    }
                    list.push_back(int_array(*x));
                    std::vector<std::string> row;
                    for (auto v : *x) row.push_back(std::to_string(v));
                    t.rows.push_back(std::move(row));
                }
                r.result["emitted"] = list.size();
                r.result["truncated"] = truncated;
                r.result["solutions"] = std::move(list);
                r.table = std::move(t);
                return r;
            };
        });
    }

    // moment
    int moment_k = 2, moment_t = 1;
    std::int64_t moment_n = 0;
    {
        auto* s = sub("moment", "Vinogradov moment count");
        s->add_option("--n", moment_n)->required();
        s->add_option("--k", moment_k)->required();
        s->add_option("--t", moment_t)->required();
        s->final_callback([&] {
            handler = [&] {
                Report r;
                r.result["n"] = moment_n;
                r.result["k"] = moment_k;
                r.result["t"] = moment_t;
                r.result["value"] = to_string(vinogradov_moment(moment_n, moment_k, moment_t, budget()));
                return r;
            };
        });
    }

    // gowers
    int gowers_degree = 2;
    bool naive_check = false;
    int weyl_samples = 0;
    {
        auto* s = sub("gowers", "Exact uniformity sum of the balanced function");
        add_window_options(s, in);
        s->add_option("--degree", gowers_degree)->required();
        s->add_flag("--naive-check", naive_check, "Cross-check against the direct (k+2)-fold sum");
        s->add_option("--weyl-samples", weyl_samples, "Random phase points for the sup-norm check");
        s->final_callback([&] {
            handler = [&] {
                SetWindow w = load_window(in);
                UniformityReport u = uniformity_parameter(w, gowers_degree, budget());
                Report r;
                r.result["n"] = w.length();
                r.result["degree"] = gowers_degree;
                r.result["difference_sum"] = to_string(u.difference_sum);
                r.result["parameter"] = to_string(u.parameter);
                if (naive_check) r.result["naive_match"] = difference_sum_naive(w, gowers_degree, budget()) == u.difference_sum;
                if (weyl_samples > 0) {
                    std::mt19937_64 rng(seed);
                    std::vector<PhasePoint> phases;
                    for (int i = 0; i < weyl_samples; ++i) {
                        std::vector<double> a(static_cast<std::size_t>(gowers_degree));
                        for (auto& v : a) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                        phases.emplace_back(std::move(a));
                    }
                    WeylChainReport wr = weyl_chain_check(w, u, phases);
                    Json j;
                    j["points"] = wr.points;
                    j["chain_violations"] = wr.chain_violations;
                    j["bound_violations"] = wr.bound_violations;
                    j["max_ratio"] = wr.max_ratio;
                    r.result["weyl"] = j;
                }
                return r;
            };
        });
    }

    // expsum
    std::string expsum_kind;
    std::string alpha_text;
    {
        auto* s = sub("expsum", "Evaluate f, g or E at a phase point");
        s->add_option("kind", expsum_kind)->required()->check(CLI::IsMember({"f", "g", "E"}));
        add_window_options(s, in);
        s->add_option("--alpha", alpha_text, "alpha_1,...,alpha_k (ascending degree)")->required();
        s->final_callback([&] {
            handler = [&] {
                SetWindow w = load_window(in);
                PhasePoint alpha(real_list(alpha_text));
                std::complex<double> z = expsum_kind == "f"   ? eval_f(w, alpha)
                                         : expsum_kind == "g" ? eval_g(w.length(), alpha)
                                                              : eval_E(w, alpha);
                Report r;
                r.result["kind"] = expsum_kind;
                r.result["n"] = w.length();
                nlohmann::json parts = complex_json(z);
                for (auto& [key, value] : parts.items()) r.result[key] = value;
                return r;
            };
        });
    }

    // arcs
    std::int64_t arcs_n = 0;
    int arcs_k = 0;
    std::optional<double> arc_exponent;
    {
        auto* s = sub("arcs", "Major/minor arc classification");
        s->add_option("--n", arcs_n)->required();
        s->add_option("--k", arcs_k, "Degree (defaults to the length of --alpha)");
        s->add_option("--alpha", alpha_text)->required();
        s->add_option("--arc-exponent", arc_exponent, "Replace delta(k) by this exponent");
        s->final_callback([&] {
            handler = [&] {
                PhasePoint alpha(real_list(alpha_text));
                if (arcs_k != 0 && arcs_k != alpha.degree())
                    throw Error(Errc::bad_params, "--alpha must have k components");
                auto label = classify_arc(alpha, arcs_n, arc_exponent);
                Report r;
                r.result["n"] = arcs_n;
                r.result["exponent"] = arc_exponent ? *arc_exponent : arc_delta(alpha.degree());
                r.result["member"] = label.has_value();
                if (label) {
                    r.result["q"] = label->q;
                    r.result["a"] = int_array(label->a);
                    r.result["beta"] = label->beta;
                } else {
                    r.result["q"] = nullptr;
                    r.result["a"] = nullptr;
                    r.result["beta"] = nullptr;
                }
                return r;
            };
        });
    }

    // series
    std::int64_t qmax = 1;
    std::string series_method = "auto";
    {
        auto* s = sub("series", "Truncated singular series");
        add_system_options(s, in);
        s->add_option("--qmax", qmax)->required();
        s->add_option("--method", series_method)->check(CLI::IsMember({"direct", "moebius", "both", "auto"}));
        s->final_callback([&] {
            handler = [&] {
                DiagonalSystem sys = load_system(in);
                SeriesMethod m = series_method == "direct"    ? SeriesMethod::direct
                                 : series_method == "moebius" ? SeriesMethod::moebius
                                 : series_method == "both"    ? SeriesMethod::both
                                                              : SeriesMethod::automatic;
                SeriesTruncation st = truncated_singular_series(sys, qmax, m, budget());
                Report r;
                r.prefer_csv = true;
                Table t;
                t.columns = {"q", "S_q", "exact", "method", "residual", "cumulative", "tail_reference"};
                Json rows = Json::array();
                for (const auto& row : st.rows) {
                    std::string exact = row.exact ? to_string(*row.exact) : "";
                    t.rows.push_back({std::to_string(row.q), real_str(row.value), exact, row.method,
                                      real_str(row.residual), real_str(row.cumulative), real_str(row.tail_reference)});
                    Json j;
                    j["q"] = row.q;
                    j["S_q"] = row.value;
                    j["exact"] = row.exact ? Json(exact) : Json(nullptr);
                    j["method"] = row.method;
                    j["residual"] = row.residual;
                    j["cumulative"] = row.cumulative;
                    j["tail_reference"] = row.tail_reference;
                    rows.push_back(j);
                }
                r.result["system"] = system_json(sys);
                r.result["qmax"] = qmax;
                r.result["partial_sum"] = st.partial_sum;
                r.result["exact_partial_sum"] =
                    st.exact_partial_sum ? Json(to_string(*st.exact_partial_sum)) : Json(nullptr);
                r.result["rows"] = std::move(rows);
                r.table = std::move(t);
                return r;
            };
        });
    }

    // local
    std::int64_t local_q = 1, local_r = 0, local_p = 0;
    int local_h = 0;
    {
        auto* s = sub("local", "Congruence counts, series terms, Euler factors");
        add_system_options(s, in);
        s->add_option("--q", local_q, "Modulus");
        s->add_option("--r", local_r, "Second modulus for the multiplicativity check");
        s->add_option("--p", local_p, "Prime for the Euler factor");
        s->add_option("--hmax", local_h, "Euler factor depth");
        s->final_callback([&] {
            handler = [&] {
                DiagonalSystem sys = load_system(in);
                Report r;
                r.result["system"] = system_json(sys);
                r.result["q"] = local_q;
                r.result["count"] = to_string(congruence_count(sys, local_q, budget()));
                r.result["series_term"] = to_string(series_term_moebius(sys, local_q, budget()));
                r.result["series_term_direct"] = complex_json(series_term_direct(sys, local_q, budget()));
                if (local_r > 0) {
                    MultiplicativityReport m = multiplicativity_check(sys, local_q, local_r, true, budget());
                    Json j;
                    j["r"] = local_r;
                    j["s_qr"] = to_string(m.s_qr);
                    j["product"] = to_string(m.product);
                    j["direct_gap"] = m.direct_gap;
                    j["passed"] = m.passed;
                    r.result["multiplicativity"] = j;
                }
                if (local_p > 0) {
                    EulerFactorReport e = euler_factor(sys, local_p, local_h, budget());
                    Json j;
                    j["p"] = local_p;
                    j["h_max"] = local_h;
                    Json nc = Json::array(), ps = Json::array();
                    for (const auto& v : e.normalized_counts) nc.push_back(to_string(v));
                    for (const auto& v : e.partial_sums) ps.push_back(to_string(v));
                    j["normalized_counts"] = nc;
                    j["partial_sums"] = ps;
                    j["gaps"] = e.gaps;
                    j["value"] = to_string(e.value);
                    r.result["euler_factor"] = j;
                }
                return r;
            };
        });
    }

    // lift
    std::int64_t lift_p = 0;
    int lift_t = 1;
    std::string lift_seed, lift_free;
    {
        auto* s = sub("lift", "Hensel lift of a non-singular solution mod p");
        add_system_options(s, in);
        s->add_option("-p,--prime", lift_p)->required();
        s->add_option("-t,--level", lift_t)->required();
        s->add_option("--seed", lift_seed, "Seed tuple v1,...,vs")->required();
        s->add_option("--free", lift_free, "1-based free indices (default: greedy)");
        s->final_callback([&] {
            handler = [&] {
                DiagonalSystem sys = load_system(in);
                std::optional<std::vector<int>> free;
                if (!lift_free.empty()) {
                    std::vector<int> f;
                    for (auto v : int_list(lift_free)) f.push_back(static_cast<int>(v) - 1);
                    free = f;
                }
                PadicLift lift = hensel_lift(sys, int_list(lift_seed), lift_p, lift_t, free);
                Report r;
                r.result["p"] = lift.p;
                r.result["t"] = lift.level;
                Json values = Json::array();
                for (const auto& v : lift.values) values.push_back(to_string(v));
                r.result["values"] = values;
                Json fi = Json::array();
                for (auto i : lift.free_indices) fi.push_back(i + 1);
                r.result["free_indices"] = fi;
                r.result["certified"] = lift.certified;
                r.result["u"] = lift.u;
                r.result["iterations"] = lift.iterations;
                return r;
            };
        });
    }

    // constants
    int const_k = 2;
    std::optional<double> cs;
    std::string bracket = "floor";
    {
        auto* s = sub("constants", "Constant sheet for degree k");
        s->add_option("--k", const_k)->required();
        s->add_option("--cs", cs, "Value of C * S for the K constants");
        s->add_option("--bracket", bracket)->check(CLI::IsMember({"floor", "truncate"}));
        s->final_callback([&] {
            handler = [&] {
                ConstantSheet c = constants(const_k, cs, bracket == "floor" ? BracketConvention::floor
                                                                           : BracketConvention::truncate);
                Report r;
                r.result["k"] = c.k;
                r.result["bracket"] = bracket;
                r.result["s0"] = c.s0;
                r.result["s0_truncate"] = s0_of(c.k, BracketConvention::truncate);
                r.result["sigma"] = c.sigma;
                r.result["delta"] = c.delta;
                r.result["gamma"] = biglog_json(c.gamma);
                r.result["C"] = biglog_json(c.C_exp);
                r.result["c"] = biglog_json(c.c_exp);
                r.result["K_increment"] = c.K_const ? biglog_json(*c.K_const) : Json(nullptr);
                r.result["K_uniformity"] = c.K_uniform ? biglog_json(*c.K_uniform) : Json(nullptr);
                r.result["notes"] = c.notes;
                return r;
            };
        });
    }

    // predict
    std::int64_t predict_qmax = 50;
    std::string cs_method = "band";
    double predict_delta = 1.0;
    std::uint64_t samples = 1000000;
    bool exact_count = false;
    {
        auto* s = sub("predict", "Main-term prediction");
        add_system_options(s, in);
        s->add_option("--n", in.n)->required();
        s->add_option("--qmax", predict_qmax);
        s->add_option("--cs-method", cs_method)->check(CLI::IsMember({"band", "ratio"}));
        s->add_option("--delta", predict_delta);
        s->add_option("--samples", samples, "Monte Carlo samples for the band estimator");
        s->add_flag("--exact", exact_count, "Also count solutions on [1,N] exactly");
        s->final_callback([&] {
            handler = [&] {
                DiagonalSystem sys = load_system(in);
                double series = truncated_singular_series(sys, predict_qmax, SeriesMethod::automatic, budget()).partial_sum;
                IntegralEstimate est;
                if (cs_method == "band") {
                    BandVolumeParams bp;
                    bp.samples = samples;
                    bp.seed = seed;
                    est = band_volume_estimate(sys, bp, budget());
                } else {
                    std::vector<std::int64_t> ns;
                    if (in.n >= 4) ns.push_back(in.n / 2);
                    ns.push_back(in.n);
                    est = count_ratio_estimate(sys, ns, predict_qmax, budget());
                }
                double predicted = predicted_count(sys, predict_delta, in.n, est.value * series);
                Report r;
                r.result["system"] = system_json(sys);
                r.result["n"] = in.n;
                r.result["delta"] = predict_delta;
                r.result["singular_series"] = series;
                r.result["C_method"] = est.method;
                r.result["C_estimate"] = est.value;
                r.result["C_error"] = est.error;
                r.result["C_levels"] = est.levels;
                r.result["C_level_values"] = est.level_values;
                r.result["predicted"] = predicted;
                if (exact_count) {
                    SolutionTally t = count_solutions(sys, SetWindow::full(in.n), CountMethod::automatic, budget());
                    r.result["exact_total"] = to_string(t.total);
                    r.result["exact_over_predicted"] = t.total.get_d() / predicted;
                }
                return r;
            };
        });
    }

    // increment
    double inc_delta = 0.5, inc_loglog = 10.0;
    std::int64_t inc_y = 3;
    int inc_k = 2, max_iter = 100000;
    std::optional<double> kconst_log2, cexp;
    double inc_cs = 1.0;
    {
        auto* s = sub("increment", "Density-increment iteration arithmetic");
        s->add_option("--delta", inc_delta)->required();
        s->add_option("--loglogn", inc_loglog)->required();
        s->add_option("--y", inc_y)->required();
        s->add_option("--k", inc_k)->required();
        s->add_option("--cs", inc_cs, "C * S used for K = (CS/4)^gamma");
        s->add_option("--kconst-log2", kconst_log2, "Override log2 K");
        s->add_option("--cexp", cexp, "Override the exponent C");
        s->add_option("--max-iter", max_iter);
        s->final_callback([&] {
            handler = [&] {
                ConstantSheet c = constants(inc_k, inc_cs);
                BigLogNumber K = kconst_log2 ? BigLogNumber::from_log2(*kconst_log2) : *c.K_const;
                BigLogNumber C = cexp ? BigLogNumber::from_double(*cexp) : c.C_exp;
                IncrementTrace tr = increment_iteration(inc_delta, inc_loglog, inc_y, K, C, max_iter);
                Report r;
                r.result["K"] = biglog_json(K);
                r.result["C"] = biglog_json(C);
                r.result["outcome"] = outcome_name(tr.outcome);
                r.result["iterations_used"] = tr.iterations_used;
                r.result["ambient_exponent"] = biglog_json(tr.ambient_exponent);
                r.result["density_threshold"] = biglog_json(tr.density_threshold);
                r.result["loglog_threshold"] = biglog_json(tr.loglog_threshold);
                r.result["max_iterations"] = biglog_json(tr.max_iterations);
                Json steps = Json::array();
                Table t;
                t.columns = {"r", "density", "loglog_n", "D"};
                for (std::size_t i = 0; i < tr.steps.size(); ++i) {
                    const auto& st = tr.steps[i];
                    Json j;
                    j["density"] = st.density;
                    j["loglog_n"] = wide_json(st.loglog_n);
                    j["D"] = st.D.to_string();
                    steps.push_back(j);
                    t.rows.push_back({std::to_string(i), real_str(st.density), json_scalar(wide_json(st.loglog_n)),
                                      st.D.to_string()});
                }
                r.result["steps"] = steps;
                r.table = std::move(t);
                return r;
            };
        });
    }

    // concentrate
    std::int64_t min_len = 1;
    {
        auto* s = sub("concentrate", "Densest arithmetic progression search");
        add_window_options(s, in);
        s->add_option("--min-len", min_len)->required();
        s->final_callback([&] {
            handler = [&] {
                SetWindow w = load_window(in);
                Progression p = progression_concentration_search(w, min_len, budget());
                Report r;
                r.result["n"] = w.length();
                r.result["set_density"] = to_string(w.density());
                r.result["start"] = p.start;
                r.result["step"] = p.step;
                r.result["length"] = p.length;
                r.result["hits"] = p.hits;
                r.result["density"] = to_string(p.density);
                return r;
            };
        });
    }

    // gen-set
    std::string kind;
    std::string density_text = "1/2";
    std::int64_t prog_a = 1, prog_d = 1;
    std::string write_path;
    {
        auto* s = sub("gen-set", "Generate a set file");
        s->add_option("--kind", kind)->required()->check(
            CLI::IsMember({"random_density", "squares", "progression", "greedy_free"}));
        s->add_option("--n", in.n)->required();
        s->add_option("--density", density_text, "Rational density for random_density");
        s->add_option("--a", prog_a, "Progression start");
        s->add_option("--d", prog_d, "Progression step");
        add_system_options(s, in);
        s->add_option("--write", write_path, "Also write the set file here");
        s->final_callback([&] {
            handler = [&] {
                if (in.n < 1) throw Error(Errc::bad_params, "N must be positive");
                SetWindow w(in.n);
                if (kind == "random_density") {
                    Rational d = parse_rational(density_text);
                    if (d < 0 || d > 1) throw Error(Errc::bad_params, "density must lie in [0,1]");
                    double p = d.get_d();
                    std::mt19937_64 rng(seed);
                    for (std::int64_t x = 1; x <= in.n; ++x)
                        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) w.insert(x);
                } else if (kind == "squares") {
                    for (std::int64_t m = 1; m * m <= in.n; ++m) w.insert(m * m);
                } else if (kind == "progression") {
                    if (prog_d < 1) throw Error(Errc::bad_params, "step must be positive");
                    for (std::int64_t x = prog_a; x <= in.n; x += prog_d)
                        if (x >= 1) w.insert(x);
                } else {
                    w = greedy_solution_free(load_system(in), in.n, budget());
                }
                if (!write_path.empty()) {
                    std::ofstream f(write_path, std::ios::binary);
                    if (!f) throw Error(Errc::parse_error, "cannot write '" + write_path + "'");
                    f << format_set_mask(w);
                }
                Report r;
                r.result["kind"] = kind;
                r.result["n"] = w.length();
                r.result["cardinality"] = w.cardinality();
                r.result["mask"] = mask_hex(w);
                r.result["elements"] = w.elements();
                r.table = Table{{"x"}, {}};
                for (auto x : w.elements()) r.table->rows.push_back({std::to_string(x)});
                return r;
            };
        });
    }

    auto started = std::chrono::steady_clock::now();
    try {
        std::vector<std::string> reversed(raw_args.rbegin(), raw_args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        res.out = app.help();
        return res;
    } catch (const CLI::CallForAllHelp&) {
        res.out = app.help("", CLI::AppFormatMode::All);
        return res;
    } catch (const CLI::ParseError& e) {
        res.err = std::string("ParseError: ") + e.what() + "\n";
        res.exit_code = exit_code(Errc::parse_error);
        return res;
    }
    if (!handler) {
        res.err = "ParseError: no command\n";
        res.exit_code = exit_code(Errc::parse_error);
        return res;
    }
    for (CLI::App* s : app.get_subcommands()) command = s->get_name();
    set_threads(threads);

    try {
        Report report = handler();
        const bool csv = output == "csv" || (output == "auto" && report.prefer_csv);

        Json header;
        header["tool"] = kToolVersion;
        header["command"] = command;
        header["seed"] = seed;
        Json config;
        config["output"] = output;
        config["budget"] = budget_ops;
        for (CLI::App* s : app.get_subcommands()) {
            for (const CLI::Option* opt : s->get_options()) {
                if (opt->get_name() == "--help") continue;
                std::string value;
                if (opt->count() > 0) {
                    for (const auto& v : opt->results()) value += (value.empty() ? "" : ",") + v;
                } else {
                    value = opt->get_default_str();
                }
                config[opt->get_name()] = value;
            }
        }
        header["config"] = config;

        if (!csv) {
            Json doc;
            doc["header"] = header;
            doc["result"] = report.result;
            res.out = doc.dump(2) + "\n";
        } else {
            std::string out = "# tool: " + std::string(kToolVersion) + "\n# command: " + command +
                              "\n# seed: " + std::to_string(seed) + "\n# config: " + config.dump() + "\n";
            if (report.table) {
                for (std::size_t i = 0; i < report.table->columns.size(); ++i)
                    out += (i ? "," : "") + csv_field(report.table->columns[i]);
                out += "\n";
                for (const auto& row : report.table->rows) {
                    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
                    out += "\n";
                }
            } else {
                out += "key,value\n";
                for (const auto& [key, value] : report.result.items())
                    out += csv_field(key) + "," + csv_field(json_scalar(value)) + "\n";
            }
            res.out = out;
        }
    } catch (const Error& e) {
        res.err = std::string(e.what()) + "\n";
        res.exit_code = exit_code(e.code());
    } catch (const std::bad_alloc&) {
        res.err = "BudgetExceeded: out of memory\n";
        res.exit_code = exit_code(Errc::budget_exceeded);
    }

    if (timing) {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        res.err += "wall_time_s: " + real_str(secs) + "\n";
    }
    return res;
}

}  // namespace tdi
