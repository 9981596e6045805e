// hlx: command-line reports for the circle-method toolkit.
//
// Every subcommand writes CSV: a `#` header block echoing the full parameter
// set and the constants-file version, then a column row and data rows.
// Exit codes: 0 success, 1 runtime failure or failed verification, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>

#include "hlx/hlx.hpp"

using namespace hlx;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v + 0.0);  // + 0.0 folds -0
    return buf;
}
std::string num(u64 v) { return std::to_string(v); }
std::string num(i64 v) { return std::to_string(v); }
std::string num(bool v) { return v ? "1" : "0"; }

struct Report {
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> notes;  ///< summary lines placed in the header block
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const Report& r, std::ostream& out) {
    for (const auto& [k, v] : r.config) out << "# " << k << " = " << v << "\n";
    for (const auto& n : r.notes) out << "# " << n << "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
    out << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_json(const Report& r, const std::string& path) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : r.config) j["config"][k] = v;
    j["notes"] = r.notes;
    j["columns"] = r.columns;
    j["rows"] = r.rows;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(1) << "\n";
}

/// Echo every option of the app and the subcommand, explicit or defaulted.
void echo_options(const CLI::App& app, Report& r) {
    for (const CLI::Option* o : app.get_options()) {
        const std::string name = o->get_lnames().empty() ? o->get_name() : o->get_lnames()[0];
        if (name == "help") continue;
        std::string v;
        if (o->get_expected_min() == 0) {
            v = o->count() ? "true" : "false";
        } else if (o->count()) {
            for (const auto& s : o->results()) v += (v.empty() ? "" : " ") + s;
        } else {
            v = o->get_default_str().empty() ? "(unset)" : o->get_default_str();
        }
        r.config.emplace_back(name, v);
    }
}

/// "a:b" or "a:b:step"; a single m is "m".
std::vector<i64> parse_m_range(const std::string& s) {
    std::vector<i64> parts;
    std::stringstream ss(s);
    std::string tok;
    try {
        while (std::getline(ss, tok, ':')) parts.push_back(std::stoll(tok));
    } catch (const std::logic_error&) {
        throw UsageError("bad m-range '" + s + "', expected a:b[:step]");
    }
    if (parts.empty() || parts.size() > 3) throw UsageError("bad m-range '" + s + "', expected a:b[:step]");
    if (parts.size() == 1) return {parts[0]};
    const i64 step = parts.size() == 3 ? parts[2] : 1;
    if (step <= 0 || parts[1] < parts[0]) throw UsageError("bad m-range '" + s + "'");
    std::vector<i64> out;
    for (i64 m = parts[0]; m <= parts[1]; m += step) out.push_back(m);
    return out;
}

/// Deterministic subsample, kept in increasing order.
std::vector<i64> sample(std::vector<i64> ms, std::size_t n, u64 seed) {
    if (n == 0 || n >= ms.size()) return ms;
    std::mt19937_64 rng(seed);
    std::shuffle(ms.begin(), ms.end(), rng);
    ms.resize(n);
    std::sort(ms.begin(), ms.end());
    return ms;
}

class Progress {
public:
    Progress(std::string what, std::size_t total) : what_(std::move(what)), total_(total) {}
    void tick() {
        const std::size_t pct = total_ ? 100 * ++done_ / total_ : 100;
        if (pct >= next_) {
            std::cerr << what_ << ": " << pct << "%\n";
            next_ = pct + 10;
        }
    }

private:
    std::string what_;
    std::size_t total_, done_ = 0, next_ = 10;
};

DirichletCharacter primitive_from_label(const std::string& label) {
    const auto c = DirichletCharacter::from_label(label);
    if (!c.is_primitive()) throw UsageError("character " + label + " is not primitive");
    return c;
}

ZeroTable compute_zeros_for(const DirichletCharacter& chi, double T, unsigned threads) {
    ZeroTable t;
    if (chi.modulus() == 1) {
        t.add_scan(compute_zeta_zeros(T, threads), chi);
        return t;
    }
    t.add_scan(compute_dirichlet_zeros(chi, T, threads), chi);
    const auto c = chi.conjugate();
    if (c.index() != chi.index()) t.add_scan(compute_dirichlet_zeros(c, T, threads), c);
    return t;
}

std::vector<std::string> singular_row(const DirichletCharacter& a, const DirichletCharacter& b, i64 m, Variant v,
                                      const SingularPair& pair) {
    const auto s = pair.closed(m);
    const auto br = pair.bounds(m, s);
    return {num(a.modulus()), num(a.modulus() == 1 ? u64(1) : a.index()), num(b.modulus()),
            num(b.modulus() == 1 ? u64(1) : b.index()), num(m), to_string(v), num(s.value.real()), num(s.value.imag()),
            num(br.smod), num(s.A), num(br.U), num(br.ok()), to_string(s.vanish)};
}

const std::vector<std::string> kSingularColumns{"q1", "chi1", "q2", "chi2", "m", "variant", "re", "im",
                                                "Smod", "A", "U", "bounds_ok", "vanish_reason"};

std::vector<Variant> variants_of(const std::string& s) {
    if (s == "both") return {Variant::goldbach, Variant::twin};
    return {parse_variant(s)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hlx: singular series, prime pair counts and circle-method reports"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    unsigned threads = 1;
    std::string json_path, constants_path;
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
    app.add_option("--json", json_path, "also write a JSON mirror of the report");
    app.add_option("--constants", constants_path, "constants file (overrides HLX_CONSTANTS)");

    std::string out_path;
    auto add_out = [&](CLI::App* s) { s->add_option("--out", out_path, "CSV output path (default stdout)"); };

    // characters
    auto* c_chars = app.add_subcommand("characters", "enumerate Dirichlet characters mod q");
    u64 ch_q = 1;
    bool ch_prim = false;
    c_chars->add_option("--q", ch_q, "modulus")->required()->check(CLI::Range(u64(1), u64(100000)));
    c_chars->add_flag("--primitive-only", ch_prim, "only primitive characters");
    add_out(c_chars);

    // gauss-verify
    auto* c_gauss = app.add_subcommand("gauss-verify", "check |tau(chi)|^2 = q for primitive chi");
    u64 gv_qmax = 200;
    double gv_tol = 1e-6;
    c_gauss->add_option("--q-max", gv_qmax, "largest modulus")->check(CLI::Range(u64(1), u64(5000)));
    c_gauss->add_option("--tol", gv_tol, "tolerance on ||tau|^2 - q|");
    add_out(c_gauss);

    // singular-scan
    auto* c_scan = app.add_subcommand("singular-scan", "closed-form singular series over character pairs");
    u64 ss_lcm = 40;
    i64 ss_mmin = 1, ss_mmax = 200;
    std::string ss_variant = "both";
    c_scan->add_option("--lcm-max", ss_lcm, "bound on [r1, r2]")->check(CLI::Range(u64(1), u64(1000)));
    c_scan->add_option("--m-min", ss_mmin, "smallest m (m = 0 is skipped)");
    c_scan->add_option("--m-max", ss_mmax, "largest m");
    c_scan->add_option("--variant", ss_variant, "goldbach, twin or both")
        ->check(CLI::IsMember({"goldbach", "twin", "both"}));
    add_out(c_scan);

    // singular-eval
    auto* c_eval = app.add_subcommand("singular-eval", "singular series for one character pair");
    std::string se_chi1, se_chi2, se_variant = "goldbach";
    i64 se_m = 0;
    c_eval->add_option("--chi1", se_chi1, "first character q.index")->required();
    c_eval->add_option("--chi2", se_chi2, "second character q.index")->required();
    c_eval->add_option("--m", se_m, "shift m")->required();
    c_eval->add_option("--variant", se_variant, "goldbach or twin")->check(CLI::IsMember({"goldbach", "twin"}));
    add_out(c_eval);

    // goldbach / twin
    double pc_x = 0, pc_eps = 0.1, pc_x1 = -1;
    i64 pc_m = 0;
    std::string pc_range;
    std::size_t pc_samples = 0;
    u64 pc_seed = 1;
    auto add_count_opts = [&](CLI::App* s) {
        s->add_option("--x", pc_x, "X")->required()->check(CLI::Range(4.0, double(kMaxSieveLimit)));
        s->add_option("--x1-epsilon", pc_eps, "X1 = X^(1 - eps0)")->check(CLI::Range(0.0, 1.0));
        s->add_option("--x1", pc_x1, "explicit X1, overrides --x1-epsilon");
        auto* om = s->add_option("--m", pc_m, "single m");
        auto* orange = s->add_option("--m-range", pc_range, "a:b[:step]");
        om->excludes(orange);
        s->add_option("--samples", pc_samples, "random subsample size (0 keeps all)");
        s->add_option("--seed", pc_seed, "subsample seed");
        add_out(s);
    };
    auto* c_gold = app.add_subcommand("goldbach", "R(m) and R'(m) against S(m) I(m)");
    add_count_opts(c_gold);
    auto* c_twin = app.add_subcommand("twin", "R(m) and R'(m) against S(m) I'(m)");
    add_count_opts(c_twin);

    // zeros-compute
    auto* c_zc = app.add_subcommand("zeros-compute", "zeros of L(s, chi) on the critical line");
    u64 zc_q = 1, zc_index = 1;
    double zc_height = 0, zc_step = 0.05, zc_tol = 1e-10;
    std::string zc_out, zc_report;
    c_zc->add_option("--q", zc_q, "modulus")->required();
    c_zc->add_option("--index", zc_index, "Conrey index");
    c_zc->add_option("--height", zc_height, "scan height T")->required()->check(CLI::PositiveNumber);
    c_zc->add_option("--step", zc_step, "scan step")->check(CLI::PositiveNumber);
    c_zc->add_option("--tol", zc_tol, "bisection tolerance")->check(CLI::PositiveNumber);
    c_zc->add_option("--out", zc_out, "zero file to write")->required();
    c_zc->add_option("--report", zc_report, "CSV output path (default stdout)");

    // zeros-verify
    auto* c_zv = app.add_subcommand("zeros-verify", "explicit formula for psi(x, chi)");
    std::vector<double> zv_x;
    std::string zv_chi = "1.1", zv_file;
    double zv_height = 0, zv_c = -1;
    c_zv->add_option("--x", zv_x, "one or more x")->required()->check(CLI::Range(2.0, 1e8));
    c_zv->add_option("--chi", zv_chi, "primitive character q.index");
    c_zv->add_option("--height", zv_height, "zero height T (default max(sqrt x, 100))");
    c_zv->add_option("--zeros-file", zv_file, "zero file (computed when absent)");
    c_zv->add_option("--c", zv_c, "budget constant (default from constants file)");
    add_out(c_zv);

    // circle-run
    auto* c_circ = app.add_subcommand("circle-run", "major/minor split of R(m) against the prediction");
    c_circ->set_help_flag("--help", "print this help message and exit");  // -h would clash with --h
    double cr_x = 0, cr_eps = 0.1, cr_H = 20, cr_h = 0.05, cr_u = 0;
    u64 cr_p = 0;
    std::string cr_range, cr_zeros, cr_variant = "goldbach";
    std::size_t cr_samples = 0;
    u64 cr_seed = 1;
    bool cr_full = false, cr_mediant = false, cr_asym = false;
    c_circ->add_option("--x", cr_x, "X")->required()->check(CLI::Range(16.0, 2e7));
    c_circ->add_option("--x1-epsilon", cr_eps, "X1 = X^(1 - eps0)")->check(CLI::Range(0.0, 1.0));
    c_circ->add_option("--p", cr_p, "major-arc parameter P");
    c_circ->add_option("--m-range", cr_range, "a:b[:step] (default X/2:X:2)");
    c_circ->add_option("--samples", cr_samples, "random subsample size (0 keeps all)");
    c_circ->add_option("--seed", cr_seed, "subsample seed");
    c_circ->add_option("--zeros-file", cr_zeros, "zero file for the exceptional set (pole only when absent)");
    c_circ->add_option("--H", cr_H, "exceptional threshold H");
    c_circ->add_option("--h", cr_h, "Siegel threshold h");
    c_circ->add_option("--u", cr_u, "truncation U (0 disables)");
    c_circ->add_option("--variant", cr_variant, "goldbach or twin")->check(CLI::IsMember({"goldbach", "twin"}));
    c_circ->add_flag("--full-circle", cr_full, "take every grid point as major");
    c_circ->add_flag("--mediant", cr_mediant, "Farey-mediant overlap policy");
    c_circ->add_flag("--asymptotic", cr_asym, "Gamma-form main terms instead of exact window sums");
    add_out(c_circ);

    // dh-bound
    auto* c_dh = app.add_subcommand("dh-bound", "Deuring-Heilbronn lower bound");
    double dh_delta = 0, dh_gamma = 0, dh_eps = 0.01;
    u64 dh_q1 = 1, dh_q2 = 1, dh_k = 1;
    c_dh->add_option("--delta", dh_delta, "1 - beta of the exceptional zero")->required();
    c_dh->add_option("--gamma", dh_gamma, "ordinate");
    c_dh->add_option("--q1", dh_q1, "first modulus");
    c_dh->add_option("--q2", dh_q2, "second modulus");
    c_dh->add_option("--k", dh_k, "k");
    c_dh->add_option("--eps", dh_eps, "epsilon");
    add_out(c_dh);

    // diagnostics
    auto* c_diag = app.add_subcommand("diagnostics", "grid, minor-arc and R2 statistics");
    double dg_x = 0, dg_eps0 = 0.1, dg_eps = 0.1;
    u64 dg_p = 0;
    bool dg_mediant = false;
    c_diag->add_option("--x", dg_x, "X")->required()->check(CLI::Range(16.0, 2e7));
    c_diag->add_option("--x1-epsilon", dg_eps0, "X1 = X^(1 - eps0)")->check(CLI::Range(0.0, 1.0));
    c_diag->add_option("--p", dg_p, "major-arc parameter P")->required();
    c_diag->add_option("--eps", dg_eps, "exponent for the |R2| > X^(1-eps) count");
    c_diag->add_flag("--mediant", dg_mediant, "Farey-mediant overlap policy");
    add_out(c_diag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    Report r;
    bool verification_failed = false;
    try {
        const EmpiricalConstants constants =
            constants_path.empty() ? EmpiricalConstants::load_default() : EmpiricalConstants::load(constants_path);
        r.config.emplace_back("subcommand", sub->get_name());
        echo_options(app, r);
        echo_options(*sub, r);
        r.config.emplace_back("constants_file", constants.origin());
        r.config.emplace_back("constants_version", constants.version());

        const std::string name = sub->get_name();
        if (name == "characters") {
            r.columns = {"label", "q", "index", "order", "conductor", "primitive", "parity", "real"};
            for (const auto& c : enumerate_characters(ch_q)) {
                if (ch_prim && !c.is_primitive()) continue;
                r.rows.push_back({c.label(), num(c.modulus()), num(c.modulus() == 1 ? u64(1) : c.index()), num(c.order()),
                                  num(c.conductor()), num(c.is_primitive()), c.parity() == 1 ? "even" : "odd",
                                  num(c.is_real())});
            }
        } else if (name == "gauss-verify") {
            r.columns = {"label", "q", "index", "tau_re", "tau_im", "abs2_minus_q", "ok"};
            std::size_t fails = 0, total = 0;
            for (const auto& c : primitive_characters_up_to(gv_qmax)) {
                const cplx t = tau(c);
                const double d = std::norm(t) - double(c.modulus());
                const bool ok = std::abs(d) <= gv_tol;
                fails += !ok;
                ++total;
                r.rows.push_back({c.label(), num(c.modulus()), num(c.modulus() == 1 ? u64(1) : c.index()), num(t.real()),
                                  num(t.imag()), num(d), num(ok)});
            }
            r.notes.push_back("checked = " + num(total) + ", failures = " + num(fails));
            verification_failed = fails > 0;
        } else if (name == "singular-scan") {
            r.columns = kSingularColumns;
            const auto chars = primitive_characters_up_to(ss_lcm);
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            for (std::size_t i = 0; i < chars.size(); ++i)
                for (std::size_t j = 0; j < chars.size(); ++j)
                    if (lcm(chars[i].modulus(), chars[j].modulus()) <= ss_lcm) pairs.emplace_back(i, j);
            const auto vs = variants_of(ss_variant);
            std::vector<std::vector<std::vector<std::string>>> rows(pairs.size());
            std::vector<std::size_t> fails(pairs.size(), 0);
            Progress prog("singular-scan", pairs.size());
            std::mutex mu;
            parallel_for(pairs.size(), threads, [&](std::size_t k) {
                const auto& a = chars[pairs[k].first];
                const auto& b = chars[pairs[k].second];
                for (Variant v : vs) {
                    const SingularPair pair(a, b, v);
                    for (i64 m = ss_mmin; m <= ss_mmax; ++m) {
                        if (m == 0) continue;
                        rows[k].push_back(singular_row(a, b, m, v, pair));
                        fails[k] += rows[k].back()[11] == "0";
                    }
                }
                std::lock_guard<std::mutex> lock(mu);
                prog.tick();
            });
            for (auto& v : rows)
                for (auto& row : v) r.rows.push_back(std::move(row));
            r.notes.push_back("pairs = " + num(pairs.size()) + ", bound failures = " +
                              num(std::accumulate(fails.begin(), fails.end(), std::size_t(0))));
        } else if (name == "singular-eval") {
            r.columns = kSingularColumns;
            if (se_m == 0) throw UsageError("--m must be nonzero");
            const auto a = primitive_from_label(se_chi1), b = primitive_from_label(se_chi2);
            const Variant v = parse_variant(se_variant);
            r.rows.push_back(singular_row(a, b, se_m, v, SingularPair(a, b, v)));
        } else if (name == "goldbach" || name == "twin") {
            const bool twin = name == "twin";
            if (pc_range.empty() && sub->get_option("--m")->count() == 0) throw UsageError("one of --m, --m-range is required");
            auto ms = pc_range.empty() ? std::vector<i64>{pc_m} : parse_m_range(pc_range);
            ms = sample(ms, pc_samples, pc_seed);
            const double X1 = pc_x1 >= 0 ? pc_x1 : window_start(pc_x, pc_eps);
            r.config.emplace_back("X1", num(X1));
            if (!(X1 < pc_x)) throw UsageError("need X1 < X");
            const auto primes = sieve(u64(pc_x), threads);
            r.columns = {"m", "R", "Rprime", "singular_prediction", "ratio"};
            for (i64 m : ms) {
                const double R = goldbach_count(primes, m, X1, pc_x);
                const double Rp = twin_count(primes, m, X1, pc_x);
                const double s = m == 0 ? 0 : classical_singular_series(m < 0 ? -m : m);
                const double I = twin ? pair_sum_exact_twin(ZeroPoint::pole(), ZeroPoint::pole(), m, X1, pc_x).real()
                                      : hl_count(m, X1, pc_x);
                const double pred = s * I;
                const double ratio = pred != 0 ? (twin ? Rp : R) / pred : std::numeric_limits<double>::quiet_NaN();
                r.rows.push_back({num(m), num(R), num(Rp), num(pred), num(ratio)});
            }
        } else if (name == "zeros-compute") {
            const DirichletCharacter chi(zc_q, zc_index);
            if (!chi.is_primitive()) throw UsageError("character " + chi.label() + " is not primitive");
            if (zc_q == 1 && (zc_step != 0.05 || zc_tol != 1e-10)) {
                throw UsageError("--step and --tol are fixed for q = 1");
            }
            const auto scan = zc_q == 1 ? compute_zeta_zeros(zc_height, threads)
                                        : scan_zeros(chi, zc_height, zc_step, zc_tol, threads);
            ZeroTable t;
            t.add_scan(scan, chi);
            save_zeros(t, zc_out);
            for (const auto& w : scan.warnings) {
                std::cerr << "warning: " << w << "\n";
                r.notes.push_back("warning: " + w);
            }
            r.notes.push_back("zeros = " + num(scan.zeros.size()));
            r.columns = {"q", "index", "n", "gamma", "beta"};
            for (const auto& z : t.records())
                r.rows.push_back({num(z.q), num(z.index), num(z.index), num(z.gamma), num(z.beta)});
            // n is the ordinal within the scan
            for (std::size_t i = 0; i < r.rows.size(); ++i) r.rows[i][2] = num(i + 1);
            out_path = zc_report;
        } else if (name == "zeros-verify") {
            const auto chi = primitive_from_label(zv_chi);
            const double C = zv_c > 0 ? zv_c : constants.get("explicit_formula_C");
            r.config.emplace_back("C", num(C));
            const double xmax = *std::max_element(zv_x.begin(), zv_x.end());
            const double T = zv_height > 0 ? zv_height : std::max(std::sqrt(xmax), 100.0);
            r.config.emplace_back("T", num(T));
            const ZeroTable zeros = zv_file.empty() ? compute_zeros_for(chi, T, threads) : load_zeros(zv_file);
            const auto primes = sieve(u64(xmax), threads);
            r.columns = {"x", "chi", "T", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "budget", "zeros_used", "ok"};
            for (double x : zv_x) {
                const auto c = verify_explicit_formula(primes, x, chi, T, zeros, C);
                verification_failed |= !c.ok();
                r.rows.push_back({num(x), chi.label(), num(T), num(c.lhs.real()), num(c.lhs.imag()), num(c.rhs.real()),
                                  num(c.rhs.imag()), num(c.residual), num(c.budget), num(c.zeros_used), num(c.ok())});
            }
        } else if (name == "circle-run") {
            const u64 X = u64(cr_x);
            const Variant variant = parse_variant(cr_variant);
            const double X1 = window_start(cr_x, cr_eps);
            const u64 P = cr_p ? cr_p : u64(std::floor(std::pow(cr_x, 0.4)));
            r.config.emplace_back("X1", num(X1));
            r.config.emplace_back("P_used", num(P));
            std::vector<i64> ms = cr_range.empty() ? parse_m_range(num(X / 2 + (X / 2) % 2) + ":" + num(X) + ":2")
                                                   : parse_m_range(cr_range);
            ms = sample(ms, cr_samples, cr_seed);
            const auto primes = sieve(X, threads);
            const std::size_t N = grid_size_for(cr_x);
            r.config.emplace_back("N", num(N));
            std::cerr << "circle-run: grid of size " << N << "\n";
            const auto grid = build_grid(primes, X1, cr_x, N);
            const ArcDissection d = cr_full ? full_circle_dissection(X)
                                            : dissect(X, P, cr_mediant ? OverlapPolicy::farey_mediant : OverlapPolicy::strict);
            r.config.emplace_back("arcs", num(d.arcs.size()));
            const auto mask = major_mask(d, N);
            const auto R1 = masked_convolution(grid, mask, variant);
            const auto R2 = masked_convolution(grid, mask, variant, true);
            GeneralizedExceptionalSet E;
            if (cr_zeros.empty()) {
                E.H = cr_H;
                E.P = double(P);
                E.X = cr_x;
                E.h = cr_h;
                ExceptionalMember pole;
                pole.pole = true;
                E.members.push_back(pole);
            } else {
                E = build_exceptional_set(load_zeros(cr_zeros), cr_H, double(P), cr_x, cr_h);
            }
            r.config.emplace_back("exceptional_set_size", num(E.members.size()));
            PredictionOptions opt;
            opt.variant = variant;
            opt.X1 = X1;
            opt.X = cr_x;
            opt.exact_window = !cr_asym;
            opt.twin_asymptotic = cr_asym;
            if (cr_u > 0) opt.U = cr_u;
            opt.P = double(P);
            r.columns = {"m", "R", "R1", "R2", "prediction_re", "prediction_im", "ratio", "n_terms"};
            Progress prog("circle-run", ms.size());
            for (i64 m : ms) {
                const std::size_t k = std::size_t(mod_floor(m, N));
                const double R = variant == Variant::goldbach ? goldbach_count(primes, m, X1, cr_x)
                                                              : twin_count(primes, m, X1, cr_x);
                const auto p = m == 0 ? Prediction{} : predict_r1(m, E, opt);
                const double ratio = p.value.real() != 0 ? R1[k].real() / p.value.real()
                                                         : std::numeric_limits<double>::quiet_NaN();
                r.rows.push_back({num(m), num(R), num(R1[k].real()), num(R2[k].real()), num(p.value.real()),
                                  num(p.value.imag()), num(ratio), num(p.n_terms)});
                prog.tick();
            }
        } else if (name == "dh-bound") {
            const auto b = dh_lower_bound(dh_delta, dh_gamma, dh_q1, dh_q2, dh_k, dh_eps);
            r.columns = {"delta", "gamma", "q1", "q2", "k", "eps", "Y", "bound"};
            r.rows.push_back({num(dh_delta), num(dh_gamma), num(dh_q1), num(dh_q2), num(dh_k), num(dh_eps), num(b.Y),
                              num(b.bound)});
        } else if (name == "diagnostics") {
            const u64 X = u64(dg_x);
            const double X1 = window_start(dg_x, dg_eps0);
            r.config.emplace_back("X1", num(X1));
            const auto primes = sieve(X, threads);
            const std::size_t N = grid_size_for(dg_x);
            r.config.emplace_back("N", num(N));
            const auto grid = build_grid(primes, X1, dg_x, N);
            const auto d = dissect(X, dg_p, dg_mediant ? OverlapPolicy::farey_mediant : OverlapPolicy::strict);
            const auto gc = check_grid(grid, primes);
            const double cv = constants.get("vaughan_envelope_C"), cp = constants.get("parseval_minor_C"),
                         ce = constants.get("r2_exception_C");
            const auto md = minor_arc_diagnostics(grid, d, dg_eps, cv);
            r.columns = {"quantity", "value", "reference", "ok"};
            auto row = [&](const std::string& q, double v, double ref) {
                r.rows.push_back({q, num(v), num(ref), num(v <= ref)});
            };
            row("grid_s0_rel_error", gc.s0_rel_error, 1e-9);
            row("grid_hermitian_error", gc.hermitian_error, 1e-6);
            row("grid_parseval_rel_error", gc.parseval_rel_error, 1e-9);
            r.rows.push_back({"minor_points", num(md.minor_points), "", ""});
            r.rows.push_back({"minor_max_abs_s", num(md.max_abs_s), "", ""});
            row("minor_max_envelope_ratio", md.max_ratio, 1);
            r.rows.push_back({"minor_mean_envelope_ratio", num(md.mean_ratio), "", ""});
            r.rows.push_back({"minor_median_envelope_ratio", num(md.median_ratio), "", ""});
            row("r2_parseval_identity_rel_error",
                std::abs(md.sum_r2_squared - md.minor_fourth_moment) / std::max(1.0, md.minor_fourth_moment), 1e-9);
            row("r2_sum_squares", md.sum_r2_squared, cp * md.parseval_envelope);
            row("r2_count_above_x_over_sqrt_log", double(md.count_above_sqrtL), ce * md.exception_envelope_52);
            row("r2_count_above_x_pow", double(md.count_above_power), md.exception_envelope_53);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (out_path.empty()) {
            write_csv(r, std::cout);
        } else {
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            write_csv(r, out);
        }
        if (!json_path.empty()) write_json(r, json_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (verification_failed) {
        std::cerr << "verification failed\n";
        return 1;
    }
    return 0;
}
