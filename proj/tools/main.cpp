// pspin: command-line surface over the p-spin sector/semiclassics library.
// Every subcommand emits one table, as CSV (default) or JSON conforming to
// schemas/pspin-output-1.json. Identical flags produce byte-identical output.

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pspin/dicke.hpp"
#include "pspin/gapalpha.hpp"
#include "pspin/model.hpp"
#include "pspin/oracle.hpp"
#include "pspin/phase.hpp"
#include "pspin/semiclassical.hpp"
#include "pspin/spectral.hpp"

namespace {

using Cell = std::variant<std::monostate, double, long long, std::string>;
using Row = std::vector<Cell>;
using json = nlohmann::ordered_json;

struct Table {
    std::string command;
    json params = json::object();
    std::vector<std::string> columns;
    std::vector<Row> rows;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const Row& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            const Cell& cell = row[c];
            if (std::holds_alternative<double>(cell))
                out += format_double(std::get<double>(cell));
            else if (std::holds_alternative<long long>(cell))
                out += std::to_string(std::get<long long>(cell));
            else if (std::holds_alternative<std::string>(cell))
                out += std::get<std::string>(cell);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t) {
    json doc;
    doc["schema"] = "pspin-output-1";
    doc["command"] = t.command;
    doc["params"] = t.params;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const Row& row : t.rows) {
        json jrow = json::array();
        for (const Cell& cell : row) {
            if (std::holds_alternative<double>(cell))
                jrow.push_back(std::get<double>(cell));
            else if (std::holds_alternative<long long>(cell))
                jrow.push_back(std::get<long long>(cell));
            else if (std::holds_alternative<std::string>(cell))
                jrow.push_back(std::get<std::string>(cell));
            else
                jrow.push_back(nullptr);
        }
        rows.push_back(std::move(jrow));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void emit(const Table& t, const std::string& format, const std::string& out_path) {
    const std::string text = format == "json" ? to_json(t) : to_csv(t);
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("cannot open output file: " + out_path);
    f << text;
    if (!f)
        throw std::runtime_error("write failed: " + out_path);
}

// Evenly spaced grid of `steps` points on [lo, hi]; steps == 1 yields {lo}.
std::vector<double> linear_grid(double lo, double hi, int steps) {
    if (steps < 1)
        throw std::invalid_argument("grid needs at least one point");
    std::vector<double> g(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i)
        g[static_cast<size_t>(i)] =
            steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
    return g;
}

struct CommonOpts {
    std::string format = "csv";
    std::string out_path;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out_path,
                    "Write output to this file instead of standard output");
    cmd->add_option("--threads", o.threads,
                    "Worker threads for sweep commands; output order never "
                    "depends on this")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

struct LambdaGrid {
    double single = 1.0;
    double lo = 0.0, hi = 1.0;
    int steps = 0;  // 0: use `single`
};

void add_lambda_grid(CLI::App* cmd, LambdaGrid& g, bool grid_default) {
    cmd->add_option("--lambda", g.single, "Single lambda value")
        ->capture_default_str();
    auto* lmin = cmd->add_option("--lambda-min", g.lo, "Lambda grid lower end");
    auto* lmax = cmd->add_option("--lambda-max", g.hi, "Lambda grid upper end");
    auto* lsteps =
        cmd->add_option("--lambda-steps", g.steps, "Lambda grid point count");
    lmin->needs(lmax);
    lmax->needs(lmin);
    lsteps->needs(lmin);
    if (grid_default) {
        g.lo = 0.0;
        g.hi = 1.0;
        g.steps = -1;  // marker: library default grid
    }
}

std::vector<double> resolve_lambda_grid(const CLI::App* cmd, const LambdaGrid& g,
                                        json& params) {
    if (cmd->count("--lambda-min")) {
        const int steps = cmd->count("--lambda-steps") ? g.steps : 2;
        params["lambda_min"] = g.lo;
        params["lambda_max"] = g.hi;
        params["lambda_steps"] = steps;
        return linear_grid(g.lo, g.hi, steps);
    }
    if (cmd->count("--lambda") || g.steps == 0) {
        params["lambda"] = g.single;
        return {g.single};
    }
    params["lambda_grid"] = "default";
    return {};  // empty: caller uses the library default
}

Cell num(double v) { return Cell(v); }
Cell integer(long long v) { return Cell(v); }
Cell text(std::string v) { return Cell(std::move(v)); }
Cell null() { return Cell(std::monostate{}); }

Table run_critical_point(int p) {
    Table t;
    t.command = "critical-point";
    t.params["p"] = p;
    t.columns = {"p",      "m_star", "lambda_star", "s_star",
                 "resid1", "resid2", "resid3"};
    const pspin::CriticalPoint cp = pspin::critical_point(p);
    t.rows.push_back({integer(p), num(cp.m_star), num(cp.lambda_star),
                      num(cp.s_star), num(cp.theta_residuals[0]),
                      num(cp.theta_residuals[1]), num(cp.theta_residuals[2])});
    return t;
}

Table run_phase_diagram(int p, const std::vector<double>& grid, json params) {
    Table t;
    t.command = "phase-diagram";
    t.params = std::move(params);
    t.columns = {"line", "lambda", "s", "m1", "m2", "e_c"};
    const pspin::PhaseDiagram pd = grid.empty()
                                       ? pspin::trace_phase_diagram(p)
                                       : pspin::trace_phase_diagram(p, grid);
    for (const pspin::TransitionPoint& tp : pd.first_order)
        t.rows.push_back({text("first_order"), num(tp.lambda), num(tp.s_c),
                          num(tp.m1), num(tp.m2), num(tp.e_c)});
    if (pd.terminus)
        t.rows.push_back({text("critical_point"), num(pd.terminus->lambda_star),
                          num(pd.terminus->s_star), num(pd.terminus->m_star),
                          num(pd.terminus->m_star), null()});
    if (pd.meeting_lambda) {
        const double lm = *pd.meeting_lambda;
        t.rows.push_back({text("meeting"), num(lm),
                          num(pspin::second_order_line(lm)), null(), null(),
                          null()});
    }
    for (const auto& [lambda, s] : pd.second_order)
        t.rows.push_back(
            {text("second_order"), num(lambda), num(s), null(), null(), null()});
    return t;
}

Table run_alpha_curve(int p, const std::vector<double>& grid, json params) {
    Table t;
    t.command = "alpha-curve";
    t.params = std::move(params);
    t.columns = {"lambda", "s_c",        "alpha", "m1",
                 "m2",     "e_c",        "quad_error", "status"};
    std::vector<double> g = grid;
    if (g.empty()) g = {1.0};
    for (const pspin::AlphaEntry& e : pspin::alpha_curve(p, g)) {
        if (e.result) {
            const pspin::AlphaResult& r = *e.result;
            t.rows.push_back({num(e.lambda), num(r.s_c), num(r.alpha),
                              num(r.m1), num(r.m2), num(r.e_c),
                              num(r.quad_error), text("ok")});
        } else {
            t.rows.push_back({num(e.lambda), null(), null(), null(), null(),
                              null(), null(), text("none")});
        }
    }
    return t;
}

Table run_gap_scaling(int p, double lambda, std::vector<int> n_list,
                      std::pair<double, double> bracket, double s_tol,
                      bool self_test, int threads) {
    Table t;
    t.command = "gap-scaling";
    t.columns = {"n",        "s_min",        "gap_min", "fit_slope",
                 "fit_intercept", "fit_r2",  "alpha",   "slope_ratio"};

    std::vector<std::pair<int, double>> points;
    std::vector<double> s_mins;
    double alpha_ref = 0.0;
    if (self_test) {
        // Synthetic gaps e^{-0.3 N}: the fit must recover slope -0.3 exactly.
        t.params["self_test"] = true;
        alpha_ref = 0.3;
        for (int n = 10; n <= 100; n += 10) {
            points.emplace_back(n, std::exp(-0.3 * n));
            s_mins.push_back(0.5);
        }
    } else {
        t.params["p"] = p;
        t.params["lambda"] = lambda;
        t.params["n_list"] = n_list;
        t.params["s_min_bracket"] = bracket.first;
        t.params["s_max_bracket"] = bracket.second;
        t.params["s_tol"] = s_tol;
        alpha_ref = pspin::alpha(p, lambda).alpha;

        std::vector<pspin::MinGapResult> results(n_list.size());
        size_t next = 0;
        while (next < n_list.size()) {
            const size_t batch =
                std::min(n_list.size() - next, static_cast<size_t>(threads));
            std::vector<std::future<pspin::MinGapResult>> futs;
            futs.reserve(batch);
            for (size_t j = 0; j < batch; ++j) {
                const int n = n_list[next + j];
                futs.push_back(std::async(std::launch::async, [=] {
                    return pspin::min_gap(p, lambda, n, bracket, 101, s_tol);
                }));
            }
            for (size_t j = 0; j < batch; ++j)
                results[next + j] = futs[j].get();
            next += batch;
        }
        for (size_t i = 0; i < n_list.size(); ++i) {
            points.emplace_back(n_list[i], results[i].gap_min);
            s_mins.push_back(results[i].s_min);
        }
    }

    const pspin::GapScalingFit fit = pspin::fit_gap_scaling(points);
    const double ratio = std::abs(fit.slope) / alpha_ref;
    for (size_t i = 0; i < points.size(); ++i)
        t.rows.push_back({integer(points[i].first), num(s_mins[i]),
                          num(points[i].second), num(fit.slope),
                          num(fit.intercept), num(fit.r_squared),
                          num(alpha_ref), num(ratio)});
    return t;
}

Table run_spectrum(int p, double lambda, int n, int k,
                   const std::vector<double>& s_grid, json params) {
    Table t;
    t.command = "spectrum";
    t.params = std::move(params);
    if (k < 2)
        throw std::invalid_argument("spectrum: k must be >= 2 (gap column needs two levels)");
    t.columns = {"s"};
    for (int i = 0; i < k; ++i) t.columns.push_back("e" + std::to_string(i));
    t.columns.push_back("gap");
    for (double s : s_grid) {
        const pspin::SectorHamiltonian h =
            pspin::build_sector_hamiltonian({p, s, lambda}, n);
        const std::vector<double> eigs = pspin::lowest_eigenvalues(h, k);
        Row row{num(s)};
        for (double e : eigs) row.push_back(num(e));
        row.push_back(num(n * (eigs[1] - eigs[0])));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table run_validate(int p, double lambda, int n, const std::vector<double>& s_grid,
                   double tol, json params) {
    Table t;
    t.command = "validate";
    t.params = std::move(params);
    t.columns = {"p", "lambda", "s", "n", "eig_rel_dev", "proj_abs_dev", "gap"};
    double worst = 0.0;
    for (double s : s_grid) {
        const pspin::ModelParams mp{p, s, lambda};
        const pspin::FullSpectrumResult full =
            pspin::full_hamiltonian_lowest(mp, n, 2);
        const pspin::SectorHamiltonian banded =
            pspin::build_sector_hamiltonian(mp, n);
        const std::vector<double> sector = pspin::lowest_eigenvalues(banded, 2);

        double eig_dev = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ref = full.lowest[static_cast<size_t>(i)];
            const double dev =
                std::abs(n * sector[static_cast<size_t>(i)] - ref) /
                std::max(1.0, std::abs(ref));
            eig_dev = std::max(eig_dev, dev);
        }

        const pspin::SectorHamiltonian proj = pspin::project_to_dicke(mp, n);
        double proj_dev = 0.0;
        for (size_t i = 0; i < banded.diag.size(); ++i)
            proj_dev = std::max(proj_dev, std::abs(proj.diag[i] - banded.diag[i]));
        for (size_t i = 0; i < banded.off1.size(); ++i)
            proj_dev = std::max(proj_dev, std::abs(proj.off1[i] - banded.off1[i]));
        for (size_t i = 0; i < banded.off2.size(); ++i)
            proj_dev = std::max(proj_dev, std::abs(proj.off2[i] - banded.off2[i]));

        worst = std::max({worst, eig_dev, proj_dev});
        t.rows.push_back({integer(p), num(lambda), num(s), integer(n),
                          num(eig_dev), num(proj_dev),
                          num(n * (sector[1] - sector[0]))});
    }
    if (worst > tol) {
        std::ostringstream msg;
        msg << "validate: worst deviation " << worst << " exceeds tolerance "
            << tol;
        throw pspin::numerical_error(msg.str());
    }
    return t;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pspin: exact sector spectra and semiclassical transition lines for "
        "the ferromagnetic p-spin model with antiferromagnetic transverse "
        "interactions.\n\n"
        "Conventions: energies are per spin (E = H/N) unless a column is "
        "named gap, which is extensive (N * (e1 - e0)). The coefficient "
        "alpha is the natural-log closing rate per spin, gap ~ e^{-alpha N}; "
        "plot alpha curves on a logarithmic axis to see the collapse toward "
        "the first-order terminus. Exit codes: 0 success, 2 invalid "
        "arguments or domain errors, 3 numerical failure."};
    app.require_subcommand(1);

    int p = 3;
    int n = 100;
    int k = 2;
    double lambda = 1.0;
    double s_lo = 0.0, s_hi = 1.0;
    int s_steps = 1;
    double tol = 0.0;
    std::vector<int> n_list;
    bool self_test = false;
    CommonOpts critical_o, phase_o, alpha_o, gap_o, spectrum_o, validate_o;
    LambdaGrid phase_g, alpha_g;

    auto* c_crit = app.add_subcommand(
        "critical-point",
        "Closed-form first-order-line terminus (m*, lambda*, s*) with "
        "theta-derivative residuals; p = 3 has no critical point and exits "
        "with an error");
    c_crit->add_option("--p", p, "Ferromagnetic exponent (odd, >= 3)")
        ->required();
    add_common(c_crit, critical_o);

    auto* c_phase = app.add_subcommand(
        "phase-diagram",
        "First-order line (traced), second-order line, meeting point, and "
        "terminus over a lambda grid; default grid is adaptive around the "
        "terminus");
    c_phase->add_option("--p", p, "Ferromagnetic exponent (odd, >= 3)")
        ->required();
    add_lambda_grid(c_phase, phase_g, true);
    add_common(c_phase, phase_o);

    auto* c_alpha = app.add_subcommand(
        "alpha-curve",
        "Gap-closing coefficient alpha (natural log, per spin) along the "
        "first-order line over a lambda grid; lambda values without a "
        "first-order transition get status=none rows");
    c_alpha->add_option("--p", p, "Ferromagnetic exponent (odd, >= 3)")
        ->required();
    add_lambda_grid(c_alpha, alpha_g, false);
    add_common(c_alpha, alpha_o);

    auto* c_gap = app.add_subcommand(
        "gap-scaling",
        "Minimum spectral gap vs N with a least-squares fit of ln(gap) "
        "against N, compared to the semiclassical alpha");
    c_gap->add_option("--p", p, "Ferromagnetic exponent (odd, >= 3)");
    c_gap->add_option("--lambda", lambda, "Interaction parameter in (0, 1]")
        ->capture_default_str();
    c_gap->add_option("--n-list", n_list, "Comma-separated system sizes")
        ->delimiter(',');
    c_gap->add_option("--s-min", s_lo, "Lower end of the s bracket")
        ->default_val(0.25);
    c_gap->add_option("--s-max", s_hi, "Upper end of the s bracket")
        ->default_val(0.75);
    c_gap->add_option("--tol", tol, "s tolerance of the minimum search")
        ->default_val(1e-8);
    c_gap->add_flag("--self-test", self_test,
                    "Fit synthetic gaps e^{-0.3 N} instead of computing");
    add_common(c_gap, gap_o);

    auto* c_spec = app.add_subcommand(
        "spectrum",
        "k lowest per-spin eigenvalues and the extensive gap over an s grid");
    c_spec->add_option("--p", p, "Ferromagnetic exponent (>= 2)")->required();
    c_spec->add_option("--lambda", lambda, "Interaction parameter in [0, 1]")
        ->capture_default_str();
    c_spec->add_option("--n", n, "Number of spins")->required();
    c_spec->add_option("--k", k, "Number of eigenvalues (>= 2)")
        ->capture_default_str();
    c_spec->add_option("--s-min", s_lo, "s grid lower end")->default_val(0.0);
    c_spec->add_option("--s-max", s_hi, "s grid upper end")->default_val(1.0);
    c_spec->add_option("--s-steps", s_steps, "s grid point count")
        ->default_val(101);
    add_common(c_spec, spectrum_o);

    auto* c_val = app.add_subcommand(
        "validate",
        "Cross-check the banded sector construction against dense "
        "2^N diagonalization and Dicke-basis projection (N <= 12)");
    c_val->add_option("--p", p, "Ferromagnetic exponent (>= 2)")->required();
    c_val->add_option("--lambda", lambda, "Interaction parameter in [0, 1]")
        ->capture_default_str();
    c_val->add_option("--n", n, "Number of spins (<= 12)")->required();
    c_val->add_option("--s-min", s_lo, "s grid lower end")->default_val(0.0);
    c_val->add_option("--s-max", s_hi, "s grid upper end")->default_val(1.0);
    c_val->add_option("--s-steps", s_steps, "s grid point count")
        ->default_val(1);
    c_val->add_option("--tol", tol, "Failure threshold on deviations")
        ->default_val(1e-10);
    add_common(c_val, validate_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_crit) {
            emit(run_critical_point(p), critical_o.format, critical_o.out_path);
        } else if (*c_phase) {
            json params;
            params["p"] = p;
            const std::vector<double> grid =
                resolve_lambda_grid(c_phase, phase_g, params);
            emit(run_phase_diagram(p, grid, std::move(params)), phase_o.format,
                 phase_o.out_path);
        } else if (*c_alpha) {
            json params;
            params["p"] = p;
            const std::vector<double> grid =
                resolve_lambda_grid(c_alpha, alpha_g, params);
            emit(run_alpha_curve(p, grid, std::move(params)), alpha_o.format,
                 alpha_o.out_path);
        } else if (*c_gap) {
            if (!self_test && n_list.empty())
                throw std::invalid_argument(
                    "gap-scaling: --n-list is required unless --self-test");
            emit(run_gap_scaling(p, lambda, n_list, {s_lo, s_hi}, tol,
                                 self_test, gap_o.threads),
                 gap_o.format, gap_o.out_path);
        } else if (*c_spec) {
            json params;
            params["p"] = p;
            params["lambda"] = lambda;
            params["n"] = n;
            params["k"] = k;
            params["s_min"] = s_lo;
            params["s_max"] = s_hi;
            params["s_steps"] = s_steps;
            emit(run_spectrum(p, lambda, n, k, linear_grid(s_lo, s_hi, s_steps),
                              std::move(params)),
                 spectrum_o.format, spectrum_o.out_path);
        } else if (*c_val) {
            json params;
            params["p"] = p;
            params["lambda"] = lambda;
            params["n"] = n;
            params["s_min"] = s_lo;
            params["s_max"] = s_hi;
            params["s_steps"] = s_steps;
            params["tol"] = tol;
            emit(run_validate(p, lambda, n, linear_grid(s_lo, s_hi, s_steps),
                              tol, std::move(params)),
                 validate_o.format, validate_o.out_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const pspin::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
