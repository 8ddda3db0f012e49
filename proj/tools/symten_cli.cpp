// symten: command-line front end for the symmetric-tensor calculus library.
//
// Subcommands:
//   verify     run the identity suites and emit a JSON report
//   ck         compute polynomial conformal-Killing kernels and their dims
//   decompose  split a sampled rank-1/2 field into dv + i(lambda) + trace-free
//   kinetic    cross-check the moment transport relations against quadrature
//   coeffs     dump boundary-ladder coefficient tables as CSV
//
// Every subcommand accepts --config FILE with flat key=value lines; flags
// given on the command line win. Reports embed the resolved configuration,
// and with --no-timestamp two runs with the same seed are byte-identical.
//
// Exit codes: 0 success, 2 a check or tolerance failed, 3 usage or config
// error, 4 I/O error.

#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "symten/boundary_coeffs.hpp"
#include "symten/ckt.hpp"
#include "symten/decomp.hpp"
#include "symten/io.hpp"
#include "symten/kinetic.hpp"
#include "symten/suites.hpp"

using ojson = nlohmann::ordered_json;
using namespace symten;

namespace {

constexpr int kExitCheckFailed = 2;
constexpr int kExitUsage = 3;
constexpr int kExitIo = 4;

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const ojson& doc, const std::string& out_path) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw IoError("cannot open for writing: " + out_path);
    os << text;
    if (!os) throw IoError("write failed: " + out_path);
}

ojson checks_json(const SuiteReport& rep) {
    ojson arr = ojson::array();
    for (const auto& c : rep.checks) {
        ojson e;
        e["suite"] = rep.suite;
        e["name"] = c.name;
        e["anchor"] = c.anchor;
        e["residual"] = c.residual;
        e["budget"] = c.budget;
        e["cases"] = c.cases;
        e["pass"] = c.pass;
        arr.push_back(std::move(e));
    }
    return arr;
}

// ---------------------------------------------------------------- verify --

struct VerifyOpts {
    std::string suite = "all";
    std::uint64_t seed = 1;
    int cases = 200;
    int n_max = -1;
    int m_max = -1;
    double tol = -1.0;
    int threads = 0;
    std::string out;
    bool no_timestamp = false;
};

int cmd_verify(const VerifyOpts& o) {
    std::vector<SuiteReport> reports;
    auto want = [&](const char* s) { return o.suite == "all" || o.suite == s; };

    if (want("algebra"))
        reports.push_back(run_algebra_suite(o.seed, o.cases, o.n_max > 0 ? o.n_max : 4,
                                            o.m_max >= 0 ? o.m_max : 5,
                                            o.tol > 0 ? o.tol : 1e-10, o.threads));
    if (want("norm"))
        reports.push_back(run_norm_constant_suite(o.seed, o.n_max > 0 ? o.n_max : 3,
                                                  o.m_max >= 0 ? o.m_max : 4,
                                                  o.tol > 0 ? o.tol : 1e-9));
    if (want("differential"))
        reports.push_back(run_differential_suite(o.seed, o.m_max >= 0 ? o.m_max : 3, 2,
                                                 o.tol > 0 ? o.tol : 1e-8));
    if (want("flat-exact"))
        reports.push_back(run_flat_exact_suite(o.seed, 3, o.m_max >= 0 ? o.m_max : 3));
    if (want("coeffs"))
        reports.push_back(run_coeff_suite(o.seed, o.n_max > 0 ? o.n_max : 8,
                                          o.m_max >= 0 ? o.m_max : 8,
                                          std::min(o.m_max >= 0 ? o.m_max : 6, 6)));
    if (reports.empty()) {
        std::cerr << "unknown suite: " << o.suite << "\n";
        return kExitUsage;
    }

    ojson doc;
    doc["config"] = {{"subcommand", "verify"}, {"suite", o.suite},
                     {"seed", o.seed},         {"cases", o.cases},
                     {"n_max", o.n_max},       {"m_max", o.m_max},
                     {"tol", o.tol},           {"threads", o.threads}};
    if (!o.no_timestamp) doc["timestamp"] = utc_now();

    ojson checks = ojson::array();
    bool all_pass = true;
    long long total = 0, failed = 0;
    for (const auto& rep : reports) {
        for (auto& e : checks_json(rep)) checks.push_back(std::move(e));
        all_pass = all_pass && rep.all_pass;
        for (const auto& c : rep.checks) {
            ++total;
            if (!c.pass) ++failed;
        }
    }
    doc["checks"] = std::move(checks);
    ojson summary;
    summary["suites"] = ojson::array();
    for (const auto& rep : reports) {
        ojson s = {{"suite", rep.suite}, {"all_pass", rep.all_pass}};
        if (!o.no_timestamp) s["seconds"] = rep.seconds;
        summary["suites"].push_back(std::move(s));
    }
    summary["total_checks"] = total;
    summary["failed_checks"] = failed;
    summary["all_pass"] = all_pass;
    doc["summary"] = std::move(summary);

    emit(doc, o.out);
    return all_pass ? 0 : kExitCheckFailed;
}

// -------------------------------------------------------------------- ck --

struct CkOpts {
    int n = 3;
    int m = 1;
    int degree = 3;
    std::string constraint = "none";
    long long expect_dim = -1;
    std::string out;
    bool no_timestamp = false;
};

int cmd_ck(const CkOpts& o) {
    std::vector<CKConstraint> cons;
    if (o.constraint == "hyperplane") {
        cons.push_back(CKConstraint::hyperplane());
    } else if (o.constraint == "line") {
        cons.push_back(CKConstraint::line());
    } else if (o.constraint.rfind("jet:", 0) == 0) {
        const int order = std::stoi(o.constraint.substr(4));
        if (order < 0) throw CLI::ValidationError("--constraint", "jet order must be >= 0");
        cons.push_back(CKConstraint::jet(order));
    } else if (o.constraint != "none") {
        throw CLI::ValidationError("--constraint",
                                   "expected none, hyperplane, line, or jet:K");
    }

    const auto kernel = constrained_ck_kernel(o.n, o.m, o.degree, cons);
    const long long dim = static_cast<long long>(kernel.size());

    // Spot-check a few kernel elements through the floating-point operators;
    // the exact nullspace should sit at rounding level.
    double worst = 0.0;
    if (!kernel.empty()) {
        auto poly_to_double = [](const Polynomial<Rational>& p) {
            Polynomial<double> q(p.nvars());
            std::vector<int> e(p.nvars());
            for (const auto& [key, c] : p.terms()) {
                for (int v = 0; v < p.nvars(); ++v)
                    e[v] = static_cast<int>((key >> (8 * v)) & 0xff);
                q.add_term(e, scalar_traits<Rational>::to_double(c));
            }
            return q;
        };
        auto chart = chart_euclidean(o.n, 0.0, 1.0);
        const int take = std::min<std::size_t>(kernel.size(), 3);
        for (int t = 0; t < take; ++t) {
            std::vector<Polynomial<double>> comps;
            comps.reserve(kernel[t].comps.size());
            for (const auto& c : kernel[t].comps) comps.push_back(poly_to_double(c));
            const TensorField u = field_from_poly(chart, comps, o.m);
            const CKReport r = ck_residual(u, 1e-9, 5);
            worst = std::max(worst, std::max(r.pdu_sup, r.ju_sup));
        }
    }

    ojson doc;
    doc["config"] = {{"subcommand", "ck"},           {"n", o.n},
                     {"m", o.m},                     {"degree", o.degree},
                     {"constraint", o.constraint},   {"expect_dim", o.expect_dim}};
    if (!o.no_timestamp) doc["timestamp"] = utc_now();
    ojson result;
    result["kernel_dim"] = dim;
    if (o.n >= 3 && o.constraint == "none")
        result["dimension_bound"] = ck_dimension_bound(o.n, o.m);
    result["sampled_residual"] = worst;
    doc["result"] = std::move(result);
    emit(doc, o.out);

    if (o.expect_dim >= 0 && dim != o.expect_dim) return kExitCheckFailed;
    return 0;
}

// ------------------------------------------------------------- decompose --

struct DecompOpts {
    std::string input;
    double tol = 0.0;
    std::string out;
    std::string dump_prefix;
    bool no_timestamp = false;
};

int cmd_decompose(const DecompOpts& o) {
    const TensorFile tf = read_tf_file(o.input);
    const GridField f = to_grid(tf);
    const DecompositionResult res = decompose_field(f, o.tol);

    if (!o.dump_prefix.empty()) {
        write_tf_file(o.dump_prefix + "v.tf", from_grid(res.v));
        write_tf_file(o.dump_prefix + "lambda.tf", from_grid(res.lambda));
        write_tf_file(o.dump_prefix + "ftilde.tf", from_grid(res.f_tilde));
    }

    ojson doc;
    doc["config"] = {{"subcommand", "decompose"},
                     {"input", o.input},
                     {"tol", o.tol},
                     {"dump_prefix", o.dump_prefix}};
    if (!o.no_timestamp) doc["timestamp"] = utc_now();
    ojson result;
    result["m"] = f.rank;
    result["mesh"] = f.N;
    result["h"] = f.h();
    result["dofs"] = res.dofs;
    result["cg"] = {{"iterations", res.solve.iterations},
                    {"relative_residual", res.solve.relative_residual},
                    {"converged", res.solve.converged}};
    result["residuals"] = {{"reconstruct", res.recon_residual},
                           {"trace", res.jf_residual},
                           {"interior_divergence", res.delta_f_residual}};
    result["norms"] = {{"f", res.f_norm},
                       {"v", res.v_norm},
                       {"lambda", res.lambda_norm},
                       {"f_tilde", res.f_tilde_norm}};
    result["tolerances"] = {{"reconstruct", res.tol_reconstruct},
                            {"constraint", res.tol_constraint}};
    result["within_tol"] = res.within_tol;
    doc["result"] = std::move(result);
    emit(doc, o.out);
    return res.within_tol ? 0 : kExitCheckFailed;
}

// --------------------------------------------------------------- kinetic --

struct KineticOpts {
    std::string mu = "zero";
    int M = 3;
    std::uint64_t seed = 1;
    double tol = 1e-6;
    int per_axis = 7;
    std::string out;
    bool no_timestamp = false;
};

int cmd_kinetic(const KineticOpts& o) {
    if (o.M < 0 || o.M > 6)
        throw CLI::ValidationError("--M", "supported range is 0..6");
    const ScalarJet mu_jet = o.mu == "x" ? scalar_jet_x(2) : scalar_jet_zero(2);
    auto chart = chart_conformal(2, mu_jet, 0.0, 1.0);

    std::mt19937_64 rng(suites_detail::splitmix64(o.seed));
    auto rand_poly = [&](int deg) {
        std::uniform_real_distribution<double> dist(-0.6, 0.6);
        Polynomial<double> p(2);
        std::vector<int> e(2, 0);
        for (int dx = 0; dx <= deg; ++dx)
            for (int dy = 0; dx + dy <= deg; ++dy) {
                e[0] = dx;
                e[1] = dy;
                p.add_term(e, dist(rng));
            }
        return p;
    };

    std::vector<TensorField> parts;
    for (int m = 0; m <= o.M; ++m) {
        if (m == 0) {
            parts.push_back(field_from_poly(chart, {rand_poly(2)}, 0));
        } else if (m == 1) {
            parts.push_back(field_from_poly(chart, {rand_poly(2), rand_poly(2)}, 1));
        } else {
            parts.push_back(angular_pair_field(chart, m,
                                               scalar_jet_from_poly(rand_poly(2)),
                                               scalar_jet_from_poly(rand_poly(2))));
        }
    }
    const KineticStack U = make_kinetic_stack(chart, parts);
    const KineticStack lhs = transport_relations(U);
    const KineticStack rhs = fourier_of_HU(U, mu_jet);
    const double sup = kinetic_sup_diff(lhs, rhs, o.per_axis);

    ojson doc;
    doc["config"] = {{"subcommand", "kinetic"}, {"mu", o.mu},
                     {"M", o.M},                {"seed", o.seed},
                     {"tol", o.tol},            {"per_axis", o.per_axis}};
    if (!o.no_timestamp) doc["timestamp"] = utc_now();
    doc["result"] = {{"sup_difference", sup}, {"pass", sup <= o.tol}};
    emit(doc, o.out);
    return sup <= o.tol ? 0 : kExitCheckFailed;
}

// ---------------------------------------------------------------- coeffs --

struct CoeffOpts {
    int n = 3;
    int m = 2;
    std::string family = "ab";
    std::string out;
};

int cmd_coeffs(const CoeffOpts& o) {
    std::ostringstream csv;
    csv << "family,s,k,numerator,denominator\n";
    auto row = [&](const char* fam, int s, int k, const Rational& r) {
        csv << fam << ',' << s << ',' << k << ',' << numerator(r) << ','
            << denominator(r) << '\n';
    };
    const bool all = o.family == "all";
    if (all || o.family == "ab" || o.family == "a")
        for (int s = 0; s <= o.m; ++s)
            for (int k = 0; k <= s; ++k) row("a", s, k, a_coeff(o.n, o.m, s, k));
    if (all || o.family == "ab" || o.family == "b")
        for (int s = 0; s <= o.m; ++s)
            for (int k = 0; k <= s; ++k) row("b", s, k, b_coeff(o.n, o.m, s, k));
    // For the reduction families the row indices are (l, p).
    if (all || o.family == "ap")
        for (int l = 0; l <= 2 * o.m; ++l) {
            const auto [lo, hi] = ap_support(o.m, l);
            for (int p = lo; p <= hi; ++p) row("ap", l, p, ap_coeff(o.n, o.m, l, p));
        }
    if (all || o.family == "bp")
        for (int l = 0; l <= 2 * o.m; ++l) {
            const auto [lo, hi] = bp_support(o.m, l);
            for (int p = lo; p <= hi; ++p) row("bp", l, p, bp_coeff(o.m, l, p));
        }

    if (o.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream os(o.out);
        if (!os) throw IoError("cannot open for writing: " + o.out);
        os << csv.str();
        if (!os) throw IoError("write failed: " + o.out);
    }
    return 0;
}

// Flat key=value config files. CLI11's own config reader only runs on the
// root command, so the mapping onto subcommand options is done by hand:
// values fill any option the command line left untouched.
std::map<std::string, std::string> read_flat_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct ConfigBinder {
    CLI::App* sub = nullptr;
    std::string path;
    std::map<std::string, std::function<void(const std::string&)>> setters;

    template <class T>
    void bind(const std::string& key, T& target) {
        setters[key] = [key, &target](const std::string& s) {
            T tmp{};
            if (!CLI::detail::lexical_cast(s, tmp))
                throw std::invalid_argument("config value for '" + key +
                                            "' is not parseable: " + s);
            target = tmp;
        };
    }

    void apply() const {
        if (path.empty()) return;
        for (const auto& [k, v] : read_flat_config(path)) {
            const auto it = setters.find(k);
            if (it == setters.end())
                throw std::invalid_argument("unknown config key: " + k);
            const CLI::Option* opt = sub->get_option_no_throw("--" + k);
            if (opt && opt->count() > 0) continue;
            it->second(v);
        }
    }
};

void add_common(CLI::App* sub, ConfigBinder& binder, std::string& out,
                bool& no_timestamp) {
    sub->add_option("--out", out, "Write the report to this path instead of stdout");
    sub->add_flag("--no-timestamp", no_timestamp,
                  "Omit wall-clock fields so identical runs are byte-identical");
    sub->add_option("--config", binder.path, "Read defaults from a key=value file");
    binder.sub = sub;
    binder.bind("out", out);
    binder.bind("no-timestamp", no_timestamp);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetric-tensor operator calculus toolkit"};
    app.require_subcommand(1);

    VerifyOpts vo;
    ConfigBinder vb;
    CLI::App* verify = app.add_subcommand("verify", "Run identity suites");
    verify->add_option("--suite", vo.suite,
                       "algebra, norm, differential, flat-exact, coeffs, or all");
    verify->add_option("--seed", vo.seed, "Base seed for all random draws");
    verify->add_option("--cases", vo.cases, "Randomized case count (algebra suite)");
    verify->add_option("--n-max", vo.n_max, "Largest ambient dimension");
    verify->add_option("--m-max", vo.m_max, "Largest tensor rank");
    verify->add_option("--tol", vo.tol, "Override the residual budget");
    verify->add_option("--threads", vo.threads,
                       "Worker threads (0 = honor SYMTEN_THREADS)");
    add_common(verify, vb, vo.out, vo.no_timestamp);
    vb.bind("suite", vo.suite);
    vb.bind("seed", vo.seed);
    vb.bind("cases", vo.cases);
    vb.bind("n-max", vo.n_max);
    vb.bind("m-max", vo.m_max);
    vb.bind("tol", vo.tol);
    vb.bind("threads", vo.threads);

    CkOpts co;
    ConfigBinder cb;
    CLI::App* ck = app.add_subcommand("ck", "Polynomial conformal-Killing kernels");
    ck->add_option("--n", co.n, "Ambient dimension")->required();
    ck->add_option("--m", co.m, "Tensor rank")->required();
    ck->add_option("--degree", co.degree, "Polynomial degree cap");
    ck->add_option("--constraint", co.constraint, "none, hyperplane, line, or jet:K");
    ck->add_option("--expect-dim", co.expect_dim,
                   "Exit nonzero unless the kernel has this dimension");
    add_common(ck, cb, co.out, co.no_timestamp);
    cb.bind("degree", co.degree);
    cb.bind("constraint", co.constraint);
    cb.bind("expect-dim", co.expect_dim);

    DecompOpts dopt;
    ConfigBinder db;
    CLI::App* dec = app.add_subcommand("decompose", "Decompose a sampled tensor field");
    dec->add_option("--input", dopt.input, "Input .tf file")->required();
    dec->add_option("--tol", dopt.tol, "Acceptance tolerance floor");
    dec->add_option("--dump-prefix", dopt.dump_prefix,
                    "Also write <prefix>{v,lambda,ftilde}.tf");
    add_common(dec, db, dopt.out, dopt.no_timestamp);
    db.bind("tol", dopt.tol);
    db.bind("dump-prefix", dopt.dump_prefix);

    KineticOpts ko;
    ConfigBinder kb;
    CLI::App* kin = app.add_subcommand("kinetic", "Moment transport cross-check");
    kin->add_option("--mu", ko.mu, "Conformal factor: zero or x");
    kin->add_option("--M", ko.M, "Top tensor rank of the stack");
    kin->add_option("--seed", ko.seed, "Seed for the random stack");
    kin->add_option("--tol", ko.tol, "Sup-difference budget");
    kin->add_option("--per-axis", ko.per_axis, "Comparison lattice density");
    add_common(kin, kb, ko.out, ko.no_timestamp);
    kb.bind("mu", ko.mu);
    kb.bind("M", ko.M);
    kb.bind("seed", ko.seed);
    kb.bind("tol", ko.tol);
    kb.bind("per-axis", ko.per_axis);

    CoeffOpts fo;
    ConfigBinder fb;
    CLI::App* cf = app.add_subcommand("coeffs", "Dump coefficient tables as CSV");
    cf->add_option("--n", fo.n, "Ambient dimension")->required();
    cf->add_option("--m", fo.m, "Ladder depth")->required();
    cf->add_option("--family", fo.family, "a, b, ab, ap, bp, or all");
    cf->add_option("--out", fo.out, "Write CSV here instead of stdout");
    cf->add_option("--config", fb.path, "Read defaults from a key=value file");
    fb.sub = cf;
    fb.bind("family", fo.family);
    fb.bind("out", fo.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*verify) {
            vb.apply();
            return cmd_verify(vo);
        }
        if (*ck) {
            cb.apply();
            return cmd_ck(co);
        }
        if (*dec) {
            db.apply();
            return cmd_decompose(dopt);
        }
        if (*kin) {
            kb.apply();
            return cmd_kinetic(ko);
        }
        if (*cf) {
            fb.apply();
            return cmd_coeffs(fo);
        }
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
