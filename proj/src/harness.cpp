#include "clv/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "clv/admissibility.hpp"
#include "clv/cocycle.hpp"
#include "clv/geometry.hpp"
#include "clv/ginelli.hpp"
#include "clv/lyapunov_index.hpp"
#include "clv/verify.hpp"

namespace clv::harness {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "clv 0.1.0";

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

struct ExperimentOutput {
    ResultTable table;
    ResultTable series;
    std::vector<Check> checks;
};

// --- config helpers --------------------------------------------------------

double jnum(const json& cfg, const std::string& field, double fallback,
            bool required = false) {
    if (!cfg.contains(field)) {
        if (required) throw ConfigError("missing field '" + field + "'");
        return fallback;
    }
    if (!cfg[field].is_number())
        throw ConfigError("field '" + field + "' must be a number");
    return cfg[field].get<double>();
}

std::vector<double> jvec(const json& cfg, const std::string& field) {
    if (!cfg.contains(field) || !cfg[field].is_array())
        throw ConfigError("field '" + field + "' must be an array of numbers");
    std::vector<double> v;
    for (const auto& x : cfg[field]) {
        if (!x.is_number())
            throw ConfigError("field '" + field + "' must contain numbers only");
        v.push_back(x.get<double>());
    }
    return v;
}

CocyclePtr cocycle_from_config(const json& cfg) {
    if (!cfg.contains("cocycle") || !cfg["cocycle"].is_object())
        throw ConfigError("missing object field 'cocycle'");
    const json& cc = cfg["cocycle"];
    if (!cc.contains("name") || !cc["name"].is_string())
        throw ConfigError("field 'cocycle.name' must be a string");
    std::vector<double> params;
    if (cc.contains("params")) {
        for (const auto& x : cc["params"]) {
            if (!x.is_number())
                throw ConfigError("field 'cocycle.params' must contain numbers");
            params.push_back(x.get<double>());
        }
    }
    TimeDomain td = TimeDomain::discrete_time();
    if (cc.contains("time")) {
        std::string kind = cc["time"].get<std::string>();
        if (kind == "continuous")
            td = TimeDomain::continuous_time(jnum(cc, "base_step", 0.0, true));
        else if (kind != "discrete")
            throw ConfigError("field 'cocycle.time' must be discrete|continuous");
    }
    return make_cocycle(cc["name"].get<std::string>(), params, td);
}

DegeneracyPattern pattern_from_config(const json& cfg, int dim) {
    if (cfg.contains("pattern")) {
        std::vector<int> sizes;
        for (const auto& x : cfg["pattern"])
            sizes.push_back(x.get<int>());
        DegeneracyPattern p(sizes);
        if (p.total() != dim)
            throw ConfigError("field 'pattern' must sum to the cocycle dimension");
        return p;
    }
    return DegeneracyPattern::nondegenerate(dim);
}

std::vector<std::pair<double, double>> grid_from_config(const json& cfg) {
    if (!cfg.contains("grid") || !cfg["grid"].is_object())
        throw ConfigError("missing object field 'grid'");
    std::vector<double> t1 = jvec(cfg["grid"], "t1");
    std::vector<double> t2 = jvec(cfg["grid"], "t2");
    bool paired = cfg["grid"].value("paired", t1.size() == t2.size());
    std::vector<std::pair<double, double>> grid;
    if (paired) {
        if (t1.size() != t2.size())
            throw ConfigError("paired grid requires equal 't1'/'t2' lengths");
        for (size_t i = 0; i < t1.size(); ++i) grid.emplace_back(t1[i], t2[i]);
    } else {
        for (double a : t1)
            for (double b : t2) grid.emplace_back(a, b);
    }
    if (grid.empty()) throw ConfigError("field 'grid' is empty");
    return grid;
}

std::string fraction_detail(const std::string& label, double v) {
    return label + "=" + format_double(v);
}

// --- experiments -------------------------------------------------------------

ExperimentOutput exp_convergence_study(const json& cfg, std::uint64_t seed) {
    CocyclePtr c = cocycle_from_config(cfg);
    OseledetsData analytic = c->analytic_oseledets();
    auto grid = grid_from_config(cfg);
    int trials = static_cast<int>(jnum(cfg, "trials", 20));
    if (trials < 1) throw ConfigError("field 'trials' must be >= 1");
    double oi = cfg.contains("ginelli")
                    ? jnum(cfg["ginelli"], "ortho_interval", 1.0)
                    : 1.0;
    double rate_tol =
        cfg.contains("checks") ? jnum(cfg["checks"], "rate_tol", 0.1) : 0.1;

    ConvergenceStudy study = convergence_study(*c, c->origin(), analytic, grid,
                                               trials, seed, oi);

    ExperimentOutput out;
    out.table = ResultTable({{"block", ""},
                             {"multiplicity", ""},
                             {"expected_rate", "1/time"},
                             {"fitted_rate", "1/time"},
                             {"fit_residual", ""},
                             {"min_fraction_rate", ""},
                             {"min_fraction_dist", ""}});
    const int p = analytic.spectrum.blocks();
    for (int i = 0; i < p; ++i) {
        double min_fr = 1.0, min_fd = 1.0;
        for (const auto& cell : study.cells) {
            min_fr = std::min(min_fr, cell.fraction_rate);
            min_fd = std::min(min_fd, cell.fraction_dist);
        }
        out.table.add_row({static_cast<long long>(i + 1),
                           static_cast<long long>(analytic.spectrum.pattern.size(i)),
                           study.expected_rates[static_cast<size_t>(i)],
                           study.block_rates[static_cast<size_t>(i)].rate,
                           study.block_rates[static_cast<size_t>(i)].residual,
                           min_fr, min_fd});
        double diff = std::abs(study.block_rates[static_cast<size_t>(i)].rate -
                               study.expected_rates[static_cast<size_t>(i)]);
        out.checks.push_back(
            {"block " + std::to_string(i + 1) + " rate within " +
                 format_short(rate_tol) + " of expected",
             diff <= rate_tol,
             "fitted=" + format_double(
                             study.block_rates[static_cast<size_t>(i)].rate) +
                 " expected=" +
                 format_double(study.expected_rates[static_cast<size_t>(i)])});
    }
    if (cfg.contains("checks") && cfg["checks"].value("expect_full_success", false)) {
        double worst = 1.0;
        for (const auto& cell : study.cells)
            worst = std::min(worst, cell.fraction_dist);
        out.checks.push_back({"success fraction 1.0 at every grid cell",
                              worst == 1.0,
                              fraction_detail("min_fraction", worst)});
    }

    out.series = ResultTable({{"time", "time"},
                              {"t1", "time"},
                              {"t2", "time"},
                              {"block", ""},
                              {"distance", ""},
                              {"log10_distance", ""}});
    for (const auto& cell : study.cells) {
        for (int i = 0; i < p; ++i) {
            double v = cell.sup_distance[static_cast<size_t>(i)];
            out.series.add_row({std::min(cell.t1, cell.t2), cell.t1, cell.t2,
                                static_cast<long long>(i + 1), v,
                                std::log10(std::max(v, 1e-300))});
        }
    }
    return out;
}

ExperimentOutput exp_rotating_failure(const json& cfg, std::uint64_t seed) {
    double lambda1 = jnum(cfg, "lambda1", 0.5);
    double lambda2 = jnum(cfg, "lambda2", -0.5);
    double base_step = jnum(cfg, "base_step", 0.05);
    double oi = jnum(cfg, "ortho_interval", 0.25);
    double t1 = jnum(cfg, "t1", 30.25);
    std::vector<double> t2s = cfg.contains("t2_values")
                                  ? jvec(cfg, "t2_values")
                                  : std::vector<double>{10, 20, 30, 40};
    int trials = static_cast<int>(jnum(cfg, "trials", 100));
    double gap = lambda1 - lambda2;
    double eps = 0.1 * gap;

    CocyclePtr c = rotating_cocycle(lambda1, lambda2,
                                    TimeDomain::continuous_time(base_step));
    OseledetsData analytic = c->analytic_oseledets();
    DegeneracyPattern pattern({1, 1});
    const State w0 = c->origin();
    auto e_at_origin = analytic.spaces(w0);

    // Adversarial init: b_1 spans E_2 at the past state theta_{-t1} w0, so
    // its forward image stays in E_2 and the first output block misses E_1.
    State past = c->flow(-t1, w0);
    Eigen::MatrixXd init(2, 2);
    init.col(0) = analytic.spaces(past)[1].basis().col(0);
    init.col(1) = Eigen::Vector2d(1.0, 0.0);
    if (std::abs(init.col(0).dot(init.col(1))) > 1.0 - 1e-9)
        init.col(1) = Eigen::Vector2d(0.0, 1.0);

    ExperimentOutput out;
    out.table = ResultTable({{"t2", "time"},
                             {"dist_fixed_b1", ""},
                             {"success_fraction_random", ""}});
    out.series = ResultTable({{"t2", "time"},
                              {"block", ""},
                              {"distance", ""},
                              {"log10_distance", ""}});

    double min_fixed = 1.0;
    double min_fraction = 1.0;
    for (size_t k = 0; k < t2s.size(); ++k) {
        GinelliConfig gc;
        gc.t1 = t1;
        gc.t2 = t2s[k];
        gc.ortho_interval = oi;
        gc.pattern = pattern;
        ForwardRecord rec = forward_phase(*c, w0, gc, VectorTuple(init));
        Rng arng(derive_seed(seed, 7, k));
        BackwardResult back =
            backward_phase(rec, random_alpha(pattern, arng), gc);
        double dist_fixed = distance(back.at_origin[0], e_at_origin[0]);
        min_fixed = std::min(min_fixed, dist_fixed);
        out.series.add_row({t2s[k], 1LL, dist_fixed,
                            std::log10(std::max(dist_fixed, 1e-300))});
        double d2 = distance(back.at_origin[1], e_at_origin[1]);
        out.series.add_row({t2s[k], 2LL, d2,
                            std::log10(std::max(d2, 1e-300))});

        int ok = 0;
        for (int trial = 0; trial < trials; ++trial) {
            GinelliConfig rc = gc;
            rc.seed = derive_seed(seed, static_cast<std::uint64_t>(trial), k);
            GinelliResult run = run_ginelli(*c, w0, rc);
            bool good = true;
            for (int i = 0; i < 2; ++i)
                if (distance(run.subspaces_at_origin[static_cast<size_t>(i)],
                             e_at_origin[static_cast<size_t>(i)]) > eps)
                    good = false;
            ok += good;
        }
        double fraction = static_cast<double>(ok) / trials;
        min_fraction = std::min(min_fraction, fraction);
        out.table.add_row({t2s[k], dist_fixed, fraction});
    }

    out.checks.push_back(
        {"fixed b1 in E2: d(U_1, E_1) stays > 0.9 for all t2",
         min_fixed > 0.9, fraction_detail("min_distance", min_fixed)});
    out.checks.push_back(
        {"random seeds: success fraction 1.0 at eps = 0.1*gap",
         min_fraction == 1.0, fraction_detail("min_fraction", min_fraction)});
    return out;
}

ExperimentOutput exp_degenerate_block(const json& cfg, std::uint64_t seed) {
    double lambda1 = jnum(cfg, "lambda1", 0.5);
    double lambda2 = jnum(cfg, "lambda2", -0.5);
    double rot_speed = jnum(cfg, "rot_speed", 0.05);
    double t = jnum(cfg, "t", 30);
    double dist_tol = jnum(cfg, "dist_tol", 1e-6);
    double residual_min = jnum(cfg, "residual_min", 0.1);

    CocyclePtr c = degenerate_rotating_cocycle(lambda1, lambda2, rot_speed);
    OseledetsData analytic = c->analytic_oseledets();
    GinelliConfig gc;
    gc.t1 = t;
    gc.t2 = t;
    gc.pattern = analytic.spectrum.pattern;
    gc.seed = seed;
    GinelliResult run = run_ginelli(*c, c->origin(), gc);
    auto e = analytic.spaces(c->origin());

    ExperimentOutput out;
    out.table = ResultTable({{"block", ""},
                             {"multiplicity", ""},
                             {"distance", ""},
                             {"min_column_fit_residual", ""}});
    double worst_block = 0.0;
    double min_residual = std::numeric_limits<double>::infinity();
    for (int i = 0; i < gc.pattern.blocks(); ++i) {
        double dist = distance(run.subspaces_at_origin[static_cast<size_t>(i)],
                               e[static_cast<size_t>(i)]);
        worst_block = std::max(worst_block, dist);
        double block_res = std::numeric_limits<double>::infinity();
        for (int j = gc.pattern.offset(i); j < gc.pattern.prefix(i); ++j) {
            RateEstimate fit = lyapunov_index_estimate(
                run.column_distance_series[static_cast<size_t>(j)]);
            block_res = std::min(block_res, fit.residual);
        }
        min_residual = std::min(min_residual, block_res);
        out.table.add_row({static_cast<long long>(i + 1),
                           static_cast<long long>(gc.pattern.size(i)), dist,
                           block_res});
    }

    out.series = ResultTable({{"time", "time"},
                              {"column", ""},
                              {"distance", ""},
                              {"log10_distance", ""}});
    for (size_t j = 0; j < run.column_distance_series.size(); ++j)
        for (const auto& s : run.column_distance_series[j].samples())
            out.series.add_row({s.t, static_cast<long long>(j + 1), s.value,
                                std::log10(std::max(s.value, 1e-300))});

    out.checks.push_back({"block subspaces within " + format_short(dist_tol) +
                              " of Oseledets spaces",
                          worst_block < dist_tol,
                          fraction_detail("max_distance", worst_block)});
    out.checks.push_back(
        {"no single-vector convergence (column fit residual > " +
             format_short(residual_min) + ")",
         min_residual > residual_min,
         fraction_detail("min_residual", min_residual)});
    return out;
}

ExperimentOutput exp_lorenz_les(const json& cfg, std::uint64_t seed) {
    double sigma = jnum(cfg, "sigma", 10.0);
    double rho = jnum(cfg, "rho", 28.0);
    double beta = jnum(cfg, "beta", 8.0 / 3.0);
    double step = jnum(cfg, "step", 1e-3);
    double t_les = jnum(cfg, "t_les", 500.0);
    double t_clv = jnum(cfg, "t_clv", 20.0);
    double oi = jnum(cfg, "ortho_interval", 0.1);
    double transient = jnum(cfg, "transient", 100.0);

    CocyclePtr c = lorenz63_cocycle(sigma, rho, beta, step, transient);
    const int d = 3;

    // Benettin run anchored at the post-transient state.
    GinelliConfig les_cfg;
    les_cfg.t1 = oi;
    les_cfg.t2 = t_les;
    les_cfg.ortho_interval = oi;
    les_cfg.pattern = DegeneracyPattern::nondegenerate(d);
    State les_origin = c->flow(oi, c->origin());
    ForwardRecord rec =
        forward_phase(*c, les_origin, les_cfg, VectorTuple::standard_basis(d));
    Eigen::VectorXd rates = benettin_rates(rec);
    std::sort(rates.begin(), rates.end(), std::greater<double>());
    double sum = rates.sum();
    double expected_sum = -(sigma + 1.0 + beta);

    // Zero-exponent CLV from a Ginelli run vs the flow direction.
    GinelliConfig gc;
    gc.t1 = t_clv;
    gc.t2 = t_clv;
    gc.ortho_interval = oi;
    gc.pattern = DegeneracyPattern::nondegenerate(d);
    gc.seed = seed;
    State w0 = c->flow(t_clv, c->origin());
    GinelliResult run = run_ginelli(*c, w0, gc);
    Eigen::VectorXd field = c->flow_direction(w0);
    Subspace flow_line = Subspace::span_of(field.normalized());
    double dist = distance(run.subspaces_at_origin[1], flow_line);
    double angle = std::asin(std::min(1.0, dist));

    ExperimentOutput out;
    out.table = ResultTable({{"lambda1", "1/time"},
                             {"lambda2", "1/time"},
                             {"lambda3", "1/time"},
                             {"sum", "1/time"},
                             {"expected_sum", "1/time"},
                             {"clv2_flow_angle", "rad"}});
    out.table.add_row({rates(0), rates(1), rates(2), sum, expected_sum, angle});

    out.series = ResultTable(
        {{"time", "time"}, {"column", ""}, {"rate", "1/time"}});
    const long stride = std::max<long>(1, rec.steps() / 200);
    for (long k = stride; k <= rec.steps(); k += stride) {
        double tk = static_cast<double>(k) * rec.ortho_interval;
        for (int j = 0; j < d; ++j)
            out.series.add_row({tk, static_cast<long long>(j + 1),
                                rec.log_r_diag_sums(k, j) / tk});
    }

    out.checks.push_back(
        {"sum of exponents within 0.1 of -(sigma+1+beta)",
         std::abs(sum - expected_sum) <= 0.1,
         "sum=" + format_double(sum) + " expected=" +
             format_double(expected_sum)});
    out.checks.push_back({"|lambda2| < 0.05", std::abs(rates(1)) < 0.05,
                          "lambda2=" + format_double(rates(1))});
    out.checks.push_back(
        {"zero-exponent CLV aligns with flow direction (angle < 0.05 rad)",
         angle < 0.05, "angle=" + format_double(angle)});
    return out;
}

ExperimentOutput exp_admissibility_scaling(const json& cfg,
                                           std::uint64_t seed) {
    int d = static_cast<int>(jnum(cfg, "d", 3));
    double radius = jnum(cfg, "radius", 1.0);
    int n_samples = static_cast<int>(jnum(cfg, "n_samples", 20000));
    std::vector<double> deltas = cfg.contains("deltas")
                                     ? jvec(cfg, "deltas")
                                     : std::vector<double>{0.3, 0.1, 0.03, 0.01};
    double final_tol = jnum(cfg, "final_tol", 0.02);
    DegeneracyPattern pattern = pattern_from_config(cfg, d);
    if (n_samples < 1000)
        throw ConfigError("field 'n_samples' must be >= 1000 for stable fractions");

    std::vector<double> fractions;
    for (size_t k = 0; k < deltas.size(); ++k)
        fractions.push_back(sample_nonadmissible_fraction(
            d, radius, pattern, deltas[k], n_samples, derive_seed(seed, k)));

    double exponent = 1.0 / (d - 1);
    double eta = fractions[0] / std::pow(deltas[0], exponent);

    ExperimentOutput out;
    out.table = ResultTable(
        {{"delta", ""}, {"fraction", ""}, {"envelope", ""}});
    out.series = ResultTable({{"delta", ""},
                              {"fraction", ""},
                              {"log10_delta", ""},
                              {"log10_fraction", ""}});
    bool decreasing = true, under = true;
    for (size_t k = 0; k < deltas.size(); ++k) {
        double env = eta * std::pow(deltas[k], exponent);
        out.table.add_row({deltas[k], fractions[k], env});
        out.series.add_row({deltas[k], fractions[k], std::log10(deltas[k]),
                            std::log10(std::max(fractions[k], 1e-300))});
        if (k > 0 && !(fractions[k] < fractions[k - 1])) decreasing = false;
        if (fractions[k] > env + 1e-12) under = false;
    }
    out.checks.push_back({"fraction strictly decreasing in delta", decreasing,
                          ""});
    out.checks.push_back(
        {"final fraction < " + format_short(final_tol),
         fractions.back() < final_tol,
         fraction_detail("final", fractions.back())});
    out.checks.push_back(
        {"fractions under the eta*delta^(1/(d-1)) envelope", under,
         "eta=" + format_double(eta)});
    return out;
}

ExperimentOutput exp_intersection_check(const json& cfg, std::uint64_t seed) {
    CocyclePtr c = cfg.contains("cocycle")
                       ? cocycle_from_config(cfg)
                       : rotating_cocycle(0.5, -0.5);
    double t = jnum(cfg, "t", 30);
    double tol = jnum(cfg, "tol", 1e-5);
    OseledetsData analytic = c->analytic_oseledets();
    const DegeneracyPattern& pattern = analytic.spectrum.pattern;
    const State w0 = c->origin();

    GinelliConfig gc;
    gc.t1 = t;
    gc.t2 = t;
    gc.pattern = pattern;
    gc.seed = seed;
    GinelliResult run = run_ginelli(*c, w0, gc);
    auto inter = intersection_variant(*c, w0, t, t, derive_seed(seed, 1),
                                      derive_seed(seed, 2), pattern);
    auto e = analytic.spaces(w0);

    ExperimentOutput out;
    out.table = ResultTable({{"block", ""},
                             {"dist_ginelli_vs_intersection", ""},
                             {"dist_ginelli_vs_analytic", ""},
                             {"dist_intersection_vs_analytic", ""}});
    double worst = 0;
    for (int i = 0; i < pattern.blocks(); ++i) {
        double dgi = distance(run.subspaces_at_origin[static_cast<size_t>(i)],
                              inter[static_cast<size_t>(i)]);
        out.table.add_row(
            {static_cast<long long>(i + 1), dgi,
             distance(run.subspaces_at_origin[static_cast<size_t>(i)],
                      e[static_cast<size_t>(i)]),
             distance(inter[static_cast<size_t>(i)], e[static_cast<size_t>(i)])});
        worst = std::max(worst, dgi);
    }

    double cov = 0;
    for (double tt : {1.0, -1.0, 5.0, -5.0, 20.0, -20.0}) {
        Eigen::MatrixXd phi = propagate(*c, tt, w0);
        auto e_there = analytic.spaces(c->flow(tt, w0));
        for (int i = 0; i < pattern.blocks(); ++i)
            cov = std::max(cov,
                           distance(apply_map(phi, e[static_cast<size_t>(i)]),
                                    e_there[static_cast<size_t>(i)]));
    }

    out.series = ResultTable({{"block", ""}, {"distance", ""}});
    for (int i = 0; i < pattern.blocks(); ++i)
        out.series.add_row(
            {static_cast<long long>(i + 1),
             distance(run.subspaces_at_origin[static_cast<size_t>(i)],
                      inter[static_cast<size_t>(i)])});

    out.checks.push_back(
        {"intersection variant agrees with backward phase within " +
             format_short(tol),
         worst < tol, fraction_detail("max_distance", worst)});
    out.checks.push_back({"Oseledets covariance under the cocycle (1e-9)",
                          cov < 1e-9, fraction_detail("max_distance", cov)});
    return out;
}

using ExperimentFn =
    std::function<ExperimentOutput(const json&, std::uint64_t)>;

const std::map<std::string, ExperimentFn>& registry() {
    static const std::map<std::string, ExperimentFn> reg{
        {"convergence_study", exp_convergence_study},
        {"rotating_failure", exp_rotating_failure},
        {"degenerate_block", exp_degenerate_block},
        {"lorenz_les", exp_lorenz_les},
        {"admissibility_scaling", exp_admissibility_scaling},
        {"intersection_check", exp_intersection_check},
    };
    return reg;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_short(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != schema_.size())
        throw ConfigError("row does not match table schema");
    rows_.push_back(std::move(row));
}

namespace {

std::string cell_to_string(const Cell& c) {
    if (std::holds_alternative<double>(c))
        return format_double(std::get<double>(c));
    if (std::holds_alternative<long long>(c))
        return std::to_string(std::get<long long>(c));
    return std::get<std::string>(c);
}

nlohmann::json cell_to_json(const Cell& c) {
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
    return std::get<std::string>(c);
}

}  // namespace

void write_table(const ResultTable& table, const Metadata& meta,
                 const std::string& path, const std::string& format) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");

    if (format == "csv") {
        f << "# config_hash=" << meta.config_hash << "\n";
        f << "# seed=" << meta.seed << "\n";
        f << "# version=" << meta.version << "\n";
        f << "# wall_clock=" << meta.wall_clock << "\n";
        for (size_t j = 0; j < table.schema().size(); ++j) {
            const Column& col = table.schema()[j];
            f << (j ? "," : "") << col.name;
            if (!col.unit.empty()) f << "(" << col.unit << ")";
        }
        f << "\n";
        for (const auto& row : table.rows()) {
            for (size_t j = 0; j < row.size(); ++j)
                f << (j ? "," : "") << cell_to_string(row[j]);
            f << "\n";
        }
    } else if (format == "json") {
        nlohmann::json doc;
        doc["metadata"] = {{"config_hash", meta.config_hash},
                           {"seed", meta.seed},
                           {"version", meta.version},
                           {"wall_clock", meta.wall_clock}};
        nlohmann::json schema = nlohmann::json::array();
        for (const auto& col : table.schema())
            schema.push_back({{"name", col.name}, {"unit", col.unit}});
        doc["schema"] = schema;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : table.rows()) {
            nlohmann::json jrow = nlohmann::json::array();
            for (const auto& c : row) jrow.push_back(cell_to_json(c));
            rows.push_back(jrow);
        }
        doc["rows"] = rows;
        f << doc.dump(2) << "\n";
    } else {
        throw ConfigError("field 'format' must be csv|json");
    }
}

std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : registry()) names.push_back(name);
    return names;
}

int list(std::ostream& out) {
    out << "registered experiments:\n";
    for (const auto& name : experiment_names()) out << "  " << name << "\n";
    return 0;
}

int run(const std::string& config_path, const CliOverrides& overrides,
        std::ostream& out) {
    try {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot read config '" + config_path + "'");
        json cfg;
        try {
            cfg = json::parse(f);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }

        if (overrides.out) cfg["output"] = *overrides.out;
        if (overrides.format) cfg["format"] = *overrides.format;
        if (overrides.seed) cfg["seed"] = *overrides.seed;

        if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
            throw ConfigError("missing string field 'experiment'");
        std::string name = cfg["experiment"].get<std::string>();
        auto it = registry().find(name);
        if (it == registry().end()) {
            std::ostringstream msg;
            msg << "unknown experiment '" << name << "'; registered:";
            for (const auto& n : experiment_names()) msg << " " << n;
            throw ConfigError(msg.str());
        }
        if (!cfg.contains("output") || !cfg["output"].is_string())
            throw ConfigError("missing string field 'output'");
        std::string prefix = cfg["output"].get<std::string>();
        std::string format = cfg.value("format", std::string("csv"));
        if (format != "csv" && format != "json")
            throw ConfigError("field 'format' must be csv|json");
        std::uint64_t seed = cfg.value("seed", 0ULL);

        // Hash the effective config minus the output location.
        json canonical = cfg;
        canonical.erase("output");
        Metadata meta;
        meta.config_hash = hex64(fnv1a64(canonical.dump()));
        meta.seed = seed;
        meta.version = kVersion;
        meta.wall_clock = now_iso8601();

        ExperimentOutput result = it->second(cfg, seed);

        std::string ext = format == "csv" ? ".csv" : ".json";
        write_table(result.table, meta, prefix + "_table" + ext, format);
        write_table(result.series, meta, prefix + "_series" + ext, format);

        bool all_pass = true;
        for (const auto& check : result.checks) {
            out << (check.pass ? "PASS" : "FAIL") << ": " << check.name;
            if (!check.detail.empty()) out << " [" << check.detail << "]";
            out << "\n";
            all_pass = all_pass && check.pass;
        }
        out << (all_pass ? "OK" : "FAILED") << " (" << result.checks.size()
            << " checks, wrote " << prefix << "_table" << ext << ", " << prefix
            << "_series" << ext << ")\n";
        return all_pass ? 0 : 1;
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

int verify(const std::string& suite, std::ostream& out) {
    try {
        auto checks = verify::run_suite(suite, 42);
        bool all_pass = true;
        for (const auto& c : checks) {
            out << (c.pass ? "PASS" : "FAIL") << ": " << c.name
                << " [margin=" << format_double(c.margin);
            if (!c.detail.empty()) out << ", " << c.detail;
            out << "]\n";
            all_pass = all_pass && c.pass;
        }
        out << (all_pass ? "OK" : "FAILED") << " (" << checks.size()
            << " properties)\n";
        return all_pass ? 0 : 1;
    } catch (const ConfigError& e) {
        out << "usage error: " << e.what() << "; suites:";
        for (const auto& n : verify::suite_names()) out << " " << n;
        out << "\n";
        return 2;
    }
}

}  // namespace clv::harness
