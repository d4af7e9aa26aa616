#include "hyperbound/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "hyperbound/bounds.hpp"
#include "hyperbound/errors.hpp"
#include "hyperbound/gkernel.hpp"
#include "hyperbound/monotone.hpp"
#include "hyperbound/representations.hpp"
#include "hyperbound/series.hpp"

namespace hyperbound::cli {
namespace {

using json = nlohmann::json;

constexpr const char* tol_env = "HYPERBOUND_TOL";

// ---------------------------------------------------------------- parsing

double parse_real(std::string_view text, std::string_view what) {
    const std::string s(text);
    if (s.empty()) throw UsageError(std::string(what) + ": empty number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw UsageError(std::string(what) + ": '" + s + "' is not a finite real");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

// ---------------------------------------------------------------- rows

enum class Status { ok, hypothesis_failed, property_failed, numerical_error, invalid };

std::string_view to_string(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::hypothesis_failed: return "hypothesis_failed";
        case Status::property_failed: return "property_failed";
        case Status::numerical_error: return "numerical_error";
        case Status::invalid: return "invalid";
    }
    return "invalid";
}

int exit_for(Status s) {
    switch (s) {
        case Status::ok: return exit_ok;
        case Status::hypothesis_failed: return exit_hypothesis;
        case Status::property_failed: return exit_property;
        case Status::numerical_error: return exit_numerical;
        case Status::invalid: return exit_usage;
    }
    return exit_usage;
}

/// Precedence when rows disagree: usage, numerical, hypothesis, property.
int severity(Status s) {
    switch (s) {
        case Status::ok: return 0;
        case Status::property_failed: return 1;
        case Status::hypothesis_failed: return 2;
        case Status::numerical_error: return 3;
        case Status::invalid: return 4;
    }
    return 4;
}

Status classify(const std::exception& e) {
    if (dynamic_cast<const NonConvergence*>(&e) || dynamic_cast<const NoConvergence*>(&e) ||
        dynamic_cast<const ContourDivergence*>(&e)) {
        return Status::numerical_error;
    }
    if (dynamic_cast<const SpecViolation*>(&e) || dynamic_cast<const HypothesisFailed*>(&e)) {
        return Status::hypothesis_failed;
    }
    if (dynamic_cast<const Error*>(&e)) return Status::invalid;
    return Status::numerical_error;
}

struct Row {
    json data;
    Status status = Status::ok;
};

Row make_row(json inputs, Status status) {
    Row r{json::object(), status};
    r.data["inputs"] = std::move(inputs);
    return r;
}

Row error_row(json inputs, const std::exception& e) {
    Row r = make_row(std::move(inputs), classify(e));
    r.data["error"] = e.what();
    return r;
}

json params_json(const ParamVec& p) {
    json a = json::array();
    for (double v : p) a.push_back(v);
    return a;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json predicate_json(const Predicate& p) {
    json j{{"verdict", hyperbound::to_string(p.verdict)}, {"note", p.note}};
    j["witness"] = p.witness ? json(*p.witness) : json(nullptr);
    return j;
}

json hypotheses_json(const std::vector<HypothesisEntry>& hs) {
    json a = json::array();
    for (const auto& h : hs) {
        json j{{"name", h.name}, {"status", hyperbound::to_string(h.status)}, {"note", h.note}};
        j["witness"] = h.witness ? json(*h.witness) : json(nullptr);
        a.push_back(std::move(j));
    }
    return a;
}

json report_json(const MonotoneReport& r) {
    json failures = json::array();
    for (const auto& f : r.failures) failures.push_back({{"x", f.x}, {"error", f.error}});
    json j{{"kind", hyperbound::to_string(r.kind)},
           {"grid", r.grid},
           {"min_margin", r.min_margin},
           {"tolerance", r.tolerance},
           {"pass", r.pass},
           {"failures", std::move(failures)},
           {"hypotheses", hypotheses_json(r.hypotheses)},
           {"hypotheses_hold", r.hypotheses_hold()},
           {"note", r.note}};
    j["n_max"] = r.n_max ? json(*r.n_max) : json(nullptr);
    j["argmin"] = optional_json(r.argmin);
    j["argmin_order"] = r.argmin_order ? json(*r.argmin_order) : json(nullptr);
    return j;
}

Status report_status(const MonotoneReport& r) {
    if (!r.failures.empty()) return Status::numerical_error;
    if (!r.hypotheses_hold()) return Status::hypothesis_failed;
    return r.pass ? Status::ok : Status::property_failed;
}

Row report_row(json inputs, const MonotoneReport& r) {
    Row row = make_row(std::move(inputs), report_status(r));
    row.data["report"] = report_json(r);
    return row;
}

json certificate_json(const BoundCertificate& c) {
    json envelopes = json::array();
    for (const auto& e : c.envelopes) {
        envelopes.push_back({{"name", e.name},
                             {"side", hyperbound::to_string(e.side)},
                             {"value", e.value},
                             {"needs", e.needs},
                             {"certified", e.certified}});
    }
    json constants = json::object();
    for (const auto& [k, v] : c.constants) constants[k] = v;
    json j{{"family", c.family},
           {"x", c.x},
           {"hypotheses", hypotheses_json(c.hypotheses)},
           {"envelopes", std::move(envelopes)},
           {"lower_certified", c.lower_certified},
           {"upper_certified", c.upper_certified},
           {"constants", std::move(constants)},
           {"reference_method", c.reference_method}};
    j["lower"] = optional_json(c.lower);
    j["upper"] = optional_json(c.upper);
    if (c.reference) {
        j["reference"] = {{"value", c.reference->value}, {"abs_err", c.reference->abs_err}};
    } else {
        j["reference"] = nullptr;
    }
    return j;
}

json conditions_json(const ConditionReport& r) {
    json j{{"psi", r.psi},
           {"weak_supermajorized", predicate_json(r.weak_supermajorized)},
           {"majorized", predicate_json(r.majorized)},
           {"v_nonneg", predicate_json(r.v_nonneg)},
           {"symmetric_chain", predicate_json(r.symmetric_chain)},
           {"symmetric_geq1", predicate_json(r.symmetric_geq1)},
           {"coeff_dominance", predicate_json(r.coeff_dominance)},
           {"ratio_decreasing", predicate_json(r.ratio_decreasing)},
           {"q2_exact", predicate_json(r.q2_exact)}};
    j["v_min"] = optional_json(r.v_min);
    j["q2_agrees_with_v"] = r.q2_agrees_with_v ? json(*r.q2_agrees_with_v) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------- output

json round_numbers(const json& j) {
    if (j.is_number_float()) return std::strtod(format_number(j.get<double>()).c_str(), nullptr);
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : j.items()) out[k] = round_numbers(v);
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(round_numbers(v));
        return out;
    }
    return j;
}

std::string scalar_text(const json& j) {
    if (j.is_null()) return "";
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_float()) return format_number(j.get<double>());
    return j.dump();
}

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    if (j.is_array()) {
        const bool scalars = std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); });
        if (scalars) {
            std::string s;
            for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ";" : "") + scalar_text(j[i]);
            out[prefix] = s;
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
        return;
    }
    out[prefix] = scalar_text(j);
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

void write_output(std::ostream& out, OutputFormat format, const json& request, const std::vector<Row>& rows) {
    std::vector<json> data;
    for (const auto& r : rows) {
        json d = r.data;
        d["status"] = std::string(to_string(r.status));
        data.push_back(round_numbers(d));
    }
    if (format == OutputFormat::json) {
        json doc{{"request", round_numbers(request)}, {"results", data}};
        out << doc.dump(2) << '\n';
        return;
    }
    std::vector<std::map<std::string, std::string>> flat;
    std::set<std::string> columns;
    for (const auto& d : data) {
        flat.emplace_back();
        flatten(d, "", flat.back());
        for (const auto& [k, v] : flat.back()) columns.insert(k);
    }
    if (format == OutputFormat::csv) {
        bool first = true;
        for (const auto& c : columns) {
            out << (first ? "" : ",") << csv_cell(c);
            first = false;
        }
        out << '\n';
        for (const auto& row : flat) {
            first = true;
            for (const auto& c : columns) {
                const auto it = row.find(c);
                out << (first ? "" : ",") << (it == row.end() ? "" : csv_cell(it->second));
                first = false;
            }
            out << '\n';
        }
        return;
    }
    std::map<std::string, std::string> req;
    flatten(round_numbers(request), "", req);
    for (const auto& [k, v] : req) out << k << ": " << v << '\n';
    for (std::size_t i = 0; i < flat.size(); ++i) {
        out << "\n[" << i << "]\n";
        for (const auto& [k, v] : flat[i]) out << "  " << k << ": " << v << '\n';
    }
}

// ---------------------------------------------------------------- options

struct Options {
    std::string format = "json";
    std::optional<double> tol;
    std::string A, B, A1, B1, A2, B2, alphas;
    std::optional<double> x, t, z, sigma, mu, c;
    std::string grid, mu_grid = "0:2:5";
    std::string family, sign = "positive", method = "automatic", rep, scan;
    bool refined = false, log_cm = false, dominated = false;
    int n_max = default_cm_order;
    int points = 0;
    int count = 100;
    int q_max = 3;
    int threads = 0;
    unsigned long long seed = 1;
    double lo = 0.2, hi = 5.0;
};

struct Context {
    Options o;
    std::optional<double> env_tol;

    [[nodiscard]] double tol(double fallback) const {
        if (o.tol) return *o.tol;
        if (env_tol) return *env_tol;
        return fallback;
    }
};

std::vector<double> points_from(const std::optional<double>& single, const std::string& grid, const char* name) {
    if (single && !grid.empty()) throw UsageError(std::string("give either --") + name + " or --grid, not both");
    if (single) return {*single};
    if (!grid.empty()) return parse_grid(grid);
    throw UsageError(std::string("one of --") + name + " or --grid is required");
}

struct Result {
    json request;
    std::vector<Row> rows;
};

json base_request(const std::string& command, double tol) {
    return json{{"command", command}, {"tolerance", tol}};
}

// ---------------------------------------------------------------- commands

Result cmd_eval(const Context& ctx) {
    const auto& o = ctx.o;
    const HyperSpec spec{parse_params(o.A), parse_params(o.B)};
    spec.validate();
    const auto xs = points_from(o.x, o.grid, "x");
    const double tol = ctx.tol(default_series_tol);
    Result res{base_request("eval", tol), {}};
    res.request["A"] = params_json(spec.A);
    res.request["B"] = params_json(spec.B);
    res.request["grid"] = o.grid;
    const PfqEvaluator f(spec, tol);
    for (double x : xs) {
        try {
            const auto v = f(x);
            Row r = make_row({{"x", x}}, Status::ok);
            r.data["value"] = v.result.value;
            r.data["error_estimate"] = v.result.abs_err;
            r.data["method"] = v.method;
            res.rows.push_back(std::move(r));
        } catch (const Error& e) {
            res.rows.push_back(error_row({{"x", x}}, e));
        }
    }
    return res;
}

Result cmd_kernel(const Context& ctx) {
    const auto& o = ctx.o;
    const KernelSpec spec{parse_params(o.A), parse_params(o.B)};
    spec.validate();
    const auto method = parse_kernel_method(o.method);
    Result res{base_request("kernel", ctx.tol(0.0)), {}};
    res.request["bottom"] = params_json(spec.bottom);
    res.request["top"] = params_json(spec.top);
    res.request["method"] = std::string(to_string(method));
    res.request["grid"] = o.grid;
    res.request["scan_points"] = o.points;
    if (o.t || !o.grid.empty()) {
        const GKernel g(spec);
        for (double t : points_from(o.t, o.grid, "t")) {
            try {
                const auto v = g(t, method);
                Row r = make_row({{"t", t}}, Status::ok);
                r.data["value"] = v.value;
                r.data["error_estimate"] = v.abs_err;
                res.rows.push_back(std::move(r));
            } catch (const Error& e) {
                res.rows.push_back(error_row({{"t", t}}, e));
            }
        }
    } else if (o.points <= 0) {
        throw UsageError("give --t, --grid or --scan");
    }
    if (o.points > 0) {
        const json inputs{{"scan_points", o.points}};
        try {
            const auto rep = kernel_nonneg_scan(spec, o.points);
            Row r = report_row(inputs, rep);
            const auto pos = kernel_positivity(spec.bottom, spec.top);
            r.data["kernel_positivity"] = predicate_json(pos);
            if (r.status == Status::ok || r.status == Status::property_failed) {
                if (!pos.holds()) r.status = Status::hypothesis_failed;
            }
            res.rows.push_back(std::move(r));
        } catch (const Error& e) {
            res.rows.push_back(error_row(inputs, e));
        }
    }
    return res;
}

Result cmd_check(const Context& ctx) {
    const auto& o = ctx.o;
    const ParamVec A = parse_params(o.A), B = parse_params(o.B);
    Result res{base_request("check", ctx.tol(0.0)), {}};
    res.request["A"] = params_json(A);
    res.request["B"] = params_json(B);
    const json inputs{{"A", params_json(A)}, {"B", params_json(B)}};
    try {
        const auto rep = condition_report(A, B);
        Status s = Status::ok;
        if (!rep.v_nonneg.holds()) s = Status::hypothesis_failed;
        if (rep.q2_agrees_with_v && !*rep.q2_agrees_with_v) s = Status::property_failed;
        Row r = make_row(inputs, s);
        r.data["conditions"] = conditions_json(rep);
        res.rows.push_back(std::move(r));
    } catch (const Error& e) {
        res.rows.push_back(error_row(inputs, e));
    }
    return res;
}

Result cmd_bounds(const Context& ctx) {
    const auto& o = ctx.o;
    const ParamVec A = parse_params(o.A), B = parse_params(o.B);
    const double tol = ctx.tol(1e-9);
    Result res{base_request("bounds", tol), {}};
    res.request["family"] = o.family;
    res.request["refined"] = o.refined;
    res.request["A"] = params_json(A);
    res.request["B"] = params_json(B);
    res.request["grid"] = o.grid;

    std::function<BoundCertificate(double)> certify;
    if (o.family == "luke") {
        certify = [&](double x) { return luke_bounds(A, B, x, o.refined); };
    } else if (o.family == "stieltjes") {
        if (!o.sigma) throw UsageError("--sigma is required for the stieltjes family");
        const auto sign = parse_stieltjes_sign(o.sign);
        res.request["sigma"] = *o.sigma;
        res.request["sign"] = std::string(to_string(sign));
        certify = [&, sign](double x) { return stieltjes_bounds(*o.sigma, A, B, x, o.refined, sign); };
    } else if (o.family == "jensen") {
        certify = [&](double x) { return jensen_bounds(A, B, x); };
    } else if (o.family == "p-lt-q") {
        certify = [&](double x) { return upper_bounds_p_lt_q(A, B, x); };
    } else if (o.family == "bessel") {
        certify = [&](double x) { return bessel_bounds(A, B, x); };
    } else if (o.family == "f01") {
        if (!o.c) throw UsageError("--c is required for the f01 family");
        res.request["c"] = *o.c;
        certify = [&](double x) { return f01_bounds(*o.c, x); };
    } else {
        throw UsageError("unknown bound family '" + o.family + "'");
    }
    for (double x : points_from(o.x, o.grid, "x")) {
        try {
            const auto cert = certify(x);
            Status s = Status::ok;
            if (!cert.all_hypotheses_hold()) {
                s = Status::hypothesis_failed;
            } else if (!cert.sandwich_holds(tol)) {
                s = Status::property_failed;
            }
            Row r = make_row({{"x", x}}, s);
            r.data["lower"] = optional_json(cert.lower);
            r.data["upper"] = optional_json(cert.upper);
            r.data["value"] = cert.reference ? json(cert.reference->value) : json(nullptr);
            r.data["error_estimate"] = cert.reference ? json(cert.reference->abs_err) : json(nullptr);
            r.data["certificate"] = certificate_json(cert);
            res.rows.push_back(std::move(r));
        } catch (const Error& e) {
            res.rows.push_back(error_row({{"x", x}}, e));
        }
    }
    return res;
}

Result cmd_verify_rep(const Context& ctx) {
    const auto& o = ctx.o;
    RepDescriptor d;
    d.kind = parse_rep_kind(o.rep);
    d.sigma = o.sigma.value_or(1.0);
    d.A = parse_params(o.A);
    d.B = parse_params(o.B);
    d.split = {parse_params(o.A1), parse_params(o.B1), parse_params(o.A2), parse_params(o.B2)};
    d.alphas = parse_params(o.alphas);
    const auto zs = points_from(o.z, o.grid, "z");
    const double tol = ctx.tol(1e-7);
    Result res{base_request("verify-rep", tol), {}};
    res.request["rep"] = std::string(to_string(d.kind));
    res.request["sigma"] = d.sigma;
    res.request["A"] = params_json(d.A);
    res.request["B"] = params_json(d.B);
    res.request["A1"] = params_json(d.split.A1);
    res.request["B1"] = params_json(d.split.B1);
    res.request["A2"] = params_json(d.split.A2);
    res.request["B2"] = params_json(d.split.B2);
    res.request["alphas"] = params_json(d.alphas);
    res.request["grid"] = o.grid;
    RepReport rep;
    try {
        rep = rep_vs_series(d, zs);
    } catch (const Error& e) {
        res.rows.push_back(error_row({{"grid", o.grid}}, e));
        return res;
    }
    for (const auto& p : rep.points) {
        const json inputs{{"z", p.z}};
        if (p.error) {
            Row r = make_row(inputs, Status::numerical_error);
            r.data["error"] = *p.error;
            res.rows.push_back(std::move(r));
            continue;
        }
        Row r = make_row(inputs, p.rel_diff <= tol ? Status::ok : Status::property_failed);
        r.data["rep"] = p.rep;
        r.data["series"] = p.series;
        r.data["abs_diff"] = p.abs_diff;
        r.data["rel_diff"] = p.rel_diff;
        r.data["error_estimate"] = p.budget;
        res.rows.push_back(std::move(r));
    }
    return res;
}

Result cmd_cm_scan(const Context& ctx) {
    const auto& o = ctx.o;
    const ParamVec A = parse_params(o.A), B = parse_params(o.B);
    const auto grid = o.grid.empty() ? default_cm_grid() : parse_grid(o.grid);
    const DerivativeMethod method = o.method == "fd" ? DerivativeMethod::finite_difference
                                                     : DerivativeMethod::analytic;
    if (o.method != "fd" && o.method != "analytic" && o.method != "automatic") {
        throw UsageError("--method must be analytic or fd");
    }
    if (o.log_cm && !o.sigma) throw UsageError("--log-cm needs --sigma");
    ScanOptions opts;
    opts.tol = ctx.tol(opts.tol);
    Result res{base_request("cm-scan", opts.tol), {}};
    res.request["A"] = params_json(A);
    res.request["B"] = params_json(B);
    res.request["grid"] = o.grid.empty() ? "log:0.01:20:64" : o.grid;
    res.request["n_max"] = o.n_max;
    res.request["log_cm"] = o.log_cm;
    res.request["sigma"] = optional_json(o.sigma);
    res.request["method"] = method == DerivativeMethod::analytic ? "analytic" : "fd";
    json inputs{{"A", params_json(A)}, {"B", params_json(B)}, {"sigma", optional_json(o.sigma)}};
    try {
        MonotoneReport rep;
        if (o.log_cm) {
            rep = log_cm_check(*o.sigma, A, B, grid, opts);
        } else if (o.sigma) {
            rep = cm_check(StieltjesTriple{*o.sigma, A, B}, o.n_max, grid, opts, method);
        } else {
            rep = cm_check(HyperSpec{A, B}, o.n_max, grid, opts);
        }
        res.rows.push_back(report_row(std::move(inputs), rep));
    } catch (const Error& e) {
        res.rows.push_back(error_row(std::move(inputs), e));
    }
    return res;
}

SplitSpec split_from(const Options& o) {
    return {parse_params(o.A1), parse_params(o.B1), parse_params(o.A2), parse_params(o.B2)};
}

json split_json(const SplitSpec& s) {
    return {{"A1", params_json(s.A1)}, {"B1", params_json(s.B1)}, {"A2", params_json(s.A2)}, {"B2", params_json(s.B2)}};
}

Result cmd_ratio_scan(const Context& ctx) {
    const auto& o = ctx.o;
    const auto split = split_from(o);
    if (!o.mu) throw UsageError("--mu is required");
    if (o.grid.empty()) throw UsageError("--grid is required");
    const auto grid = parse_grid(o.grid);
    ScanOptions opts;
    opts.tol = ctx.tol(opts.tol);
    Result res{base_request("ratio-scan", opts.tol), {}};
    res.request["split"] = split_json(split);
    res.request["mu"] = *o.mu;
    res.request["grid"] = o.grid;
    json inputs = split_json(split);
    inputs["mu"] = *o.mu;
    try {
        res.rows.push_back(report_row(inputs, ratio_monotone_check(split, *o.mu, grid, opts)));
    } catch (const Error& e) {
        res.rows.push_back(error_row(inputs, e));
    }
    return res;
}

Result cmd_convexity_scan(const Context& ctx) {
    const auto& o = ctx.o;
    const auto split = split_from(o);
    if (!o.x) throw UsageError("--x is required");
    const auto mus = parse_grid(o.mu_grid);
    ScanOptions opts;
    opts.tol = ctx.tol(opts.tol);
    Result res{base_request("convexity-scan", opts.tol), {}};
    res.request["split"] = split_json(split);
    res.request["x"] = *o.x;
    res.request["mu_grid"] = o.mu_grid;
    json inputs = split_json(split);
    inputs["x"] = *o.x;
    try {
        res.rows.push_back(report_row(inputs, logconvex_check(split, mus, *o.x, opts)));
    } catch (const Error& e) {
        res.rows.push_back(error_row(inputs, e));
    }
    return res;
}

// ---------------------------------------------------------------- campaign

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

struct CampaignTask {
    json inputs;
    std::function<MonotoneReport()> scan;
};

Result cmd_campaign(const Context& ctx) {
    const auto& o = ctx.o;
    if (o.count < 1) throw UsageError("--count must be positive");
    if (o.q_max < 1 || o.q_max > 6) throw UsageError("--q-max must lie in [1, 6]");
    if (!(o.lo > 0.0) || !(o.lo < o.hi)) throw UsageError("need 0 < --lo < --hi");
    const std::set<std::string> scans{"cm", "log-cm", "kernel", "ratio", "convexity"};
    if (!scans.contains(o.scan)) throw UsageError("unknown campaign scan '" + o.scan + "'");
    ScanOptions opts;
    opts.tol = ctx.tol(opts.tol);
    Result res{base_request("campaign", opts.tol), {}};
    res.request["scan"] = o.scan;
    res.request["count"] = o.count;
    res.request["seed"] = o.seed;
    res.request["q_max"] = o.q_max;
    res.request["lo"] = o.lo;
    res.request["hi"] = o.hi;
    res.request["dominated"] = o.dominated;
    res.request["n_max"] = o.n_max;

    std::mt19937_64 rng(o.seed);
    auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto row = [&](std::size_t n) {
        std::vector<double> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(uniform(o.lo, o.hi));
        return v;
    };
    std::vector<CampaignTask> tasks;
    for (int i = 0; i < o.count; ++i) {
        const auto q = static_cast<std::size_t>(1 + std::uniform_int_distribution<int>(0, o.q_max - 1)(rng));
        auto a = row(q);
        std::sort(a.begin(), a.end());
        std::vector<double> b;
        if (o.dominated) {
            for (double ai : a) b.push_back(std::min(o.hi, ai + uniform(0.0, 0.5 * (o.hi - o.lo))));
        } else {
            b = row(q);
        }
        const ParamVec A(a), B(b);
        json inputs{{"index", i}, {"A", params_json(A)}, {"B", params_json(B)}};
        CampaignTask task;
        if (o.scan == "cm") {
            const int n_max = o.n_max;
            task.scan = [A, B, n_max, opts] { return cm_check(HyperSpec{A, B}, n_max, default_cm_grid(), opts); };
        } else if (o.scan == "log-cm") {
            const double sigma = uniform(0.1, 1.0);
            inputs["sigma"] = sigma;
            task.scan = [A, B, sigma, opts] { return log_cm_check(sigma, A, B, default_cm_grid(), opts); };
        } else if (o.scan == "kernel") {
            task.scan = [A, B] { return kernel_nonneg_scan(KernelSpec{A, B}); };
        } else {
            const std::size_t k = std::uniform_int_distribution<int>(0, 1)(rng);
            const SplitSpec s{ParamVec(row(k)), ParamVec(row(k)), A, B};
            inputs = split_json(s);
            inputs["index"] = i;
            if (o.scan == "ratio") {
                const double mu = uniform(0.1, 2.0);
                inputs["mu"] = mu;
                task.scan = [s, mu, opts] {
                    const auto d = clause_domain(s);
                    const double lo = std::isfinite(d.lo) ? d.lo + 0.01 : -5.0;
                    const double hi = std::isfinite(d.hi) ? d.hi : 10.0;
                    return ratio_monotone_check(s, mu, linspace(lo, hi, 32), opts);
                };
            } else {
                const double u = uniform(0.0, 1.0);
                inputs["u"] = u;
                task.scan = [s, u, opts] {
                    const auto d = clause_domain(s);
                    const double lo = std::isfinite(d.lo) ? d.lo + 0.01 : -5.0;
                    const double hi = std::isfinite(d.hi) ? d.hi : 10.0;
                    return logconvex_check(s, linspace(0.0, 3.0, 7), lo + u * (hi - lo), opts);
                };
            }
        }
        task.inputs = std::move(inputs);
        tasks.push_back(std::move(task));
    }

    std::vector<Row> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                const auto rep = tasks[i].scan();
                rows[i] = report_row(tasks[i].inputs, rep);
                if (o.scan == "kernel" && rows[i].status != Status::numerical_error) {
                    const auto& in = tasks[i].inputs;
                    const auto pos = kernel_positivity(ParamVec(in["A"].get<std::vector<double>>()),
                                                       ParamVec(in["B"].get<std::vector<double>>()));
                    rows[i].data["kernel_positivity"] = predicate_json(pos);
                    if (!pos.holds()) rows[i].status = Status::hypothesis_failed;
                }
            } catch (const std::exception& e) {
                rows[i] = error_row(tasks[i].inputs, e);
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = o.threads > 0 ? static_cast<unsigned>(o.threads) : std::min(hw, 8u);
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    res.rows = std::move(rows);
    return res;
}

// ---------------------------------------------------------------- wiring

void add_format(CLI::App* sub, Options& o) {
    sub->add_option("--format", o.format, "json, csv or text")->capture_default_str();
    sub->add_option("--tol", o.tol, "tolerance override (default from " + std::string(tol_env) + ")");
}

void add_AB(CLI::App* sub, Options& o, bool required) {
    auto* a = sub->add_option("--A", o.A, "upper parameters, comma separated");
    auto* b = sub->add_option("--B", o.B, "lower parameters, comma separated");
    if (required) {
        a->required();
        b->required();
    }
}

void add_split(CLI::App* sub, Options& o) {
    sub->add_option("--A1", o.A1, "kernel-side upper parameters");
    sub->add_option("--B1", o.B1, "kernel-side lower parameters");
    sub->add_option("--A2", o.A2, "measure-side upper parameters")->required();
    sub->add_option("--B2", o.B2, "measure-side lower parameters")->required();
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    if (name == "text") return OutputFormat::text;
    throw UsageError("unknown output format '" + std::string(name) + "'");
}

std::vector<double> parse_grid(std::string_view spec) {
    bool log = false;
    if (spec.starts_with("log:")) {
        log = true;
        spec.remove_prefix(4);
    }
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:count or log:start:stop:count");
    const double a = parse_real(parts[0], "grid start");
    const double b = parse_real(parts[1], "grid stop");
    const double n = parse_real(parts[2], "grid count");
    if (n != std::floor(n) || n < 2 || n > 1e6) throw UsageError("grid count must be an integer >= 2");
    if (!(a < b)) throw UsageError("grid needs start < stop");
    if (log && !(a > 0.0)) throw UsageError("log grid needs start > 0");
    const int count = static_cast<int>(n);
    std::vector<double> g;
    g.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double s = static_cast<double>(i) / (count - 1);
        g.push_back(log ? std::exp(std::log(a) + s * (std::log(b) - std::log(a))) : a + s * (b - a));
    }
    g.front() = a;
    g.back() = b;
    return g;
}

ParamVec parse_params(std::string_view text) {
    if (text.empty()) return {};
    std::vector<double> v;
    for (auto part : split(text, ',')) v.push_back(parse_real(part, "parameter"));
    return ParamVec(std::move(v));
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx;
    Options& o = ctx.o;
    CLI::App app{"hyperbound: generalized hypergeometric functions, kernels, bounds and monotonicity scans", "hyperbound"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "evaluate pFq(A; B; x)");
    add_AB(eval, o, true);
    eval->add_option("--x", o.x, "argument");
    eval->add_option("--grid", o.grid, "start:stop:count or log:start:stop:count");
    add_format(eval, o);

    auto* kernel = app.add_subcommand("kernel", "evaluate the G-function kernel");
    kernel->add_option("--bottom,--A", o.A, "bottom row (numerator gammas)")->required();
    kernel->add_option("--top,--B", o.B, "top row (denominator gammas)")->required();
    kernel->add_option("--t", o.t, "point");
    kernel->add_option("--grid", o.grid, "t grid");
    kernel->add_option("--method", o.method, "automatic, residue, mellin_barnes or closed_form")
        ->capture_default_str();
    kernel->add_option("--scan", o.points, "also scan the kernel for negative values on this many points");
    add_format(kernel, o);

    auto* check = app.add_subcommand("check", "parameter conditions for A, B");
    add_AB(check, o, true);
    add_format(check, o);

    auto* bounds = app.add_subcommand("bounds", "certified two-sided bounds");
    bounds->add_option("--family", o.family, "luke, stieltjes, jensen, p-lt-q, bessel or f01")->required();
    add_AB(bounds, o, false);
    bounds->add_option("--x", o.x, "argument");
    bounds->add_option("--grid", o.grid, "x grid");
    bounds->add_flag("--refined", o.refined, "refined envelopes (luke, stieltjes)");
    bounds->add_option("--sigma", o.sigma, "sigma (stieltjes)");
    bounds->add_option("--sign", o.sign, "positive or negative argument (stieltjes)")->capture_default_str();
    bounds->add_option("--c", o.c, "c (f01)");
    add_format(bounds, o);

    auto* verify = app.add_subcommand("verify-rep", "compare an integral representation with the series");
    verify->add_option("--rep", o.rep, "representation kind")->required();
    add_AB(verify, o, false);
    verify->add_option("--sigma", o.sigma, "sigma (stieltjes)");
    verify->add_option("--A1", o.A1, "kernel-side upper parameters (split)");
    verify->add_option("--B1", o.B1, "kernel-side lower parameters (split)");
    verify->add_option("--A2", o.A2, "measure-side upper parameters (split)");
    verify->add_option("--B2", o.B2, "measure-side lower parameters (split)");
    verify->add_option("--alphas", o.alphas, "auxiliary parameters (small_p)");
    verify->add_option("--z", o.z, "point (series at -z)");
    verify->add_option("--grid", o.grid, "z grid");
    add_format(verify, o);

    auto* cm = app.add_subcommand("cm-scan", "complete monotonicity scan");
    add_AB(cm, o, true);
    cm->add_option("--sigma", o.sigma, "scan x^-sigma F(sigma, A; B; -1/x) instead");
    cm->add_flag("--log-cm", o.log_cm, "logarithmic complete monotonicity (needs --sigma)");
    cm->add_option("--n-max", o.n_max, "highest derivative order")->capture_default_str();
    cm->add_option("--grid", o.grid, "x grid (default log:0.01:20:64)");
    cm->add_option("--method", o.method, "analytic or fd (composite only)");
    add_format(cm, o);

    auto* convex = app.add_subcommand("convexity-scan", "log-convexity in the shift mu");
    add_split(convex, o);
    convex->add_option("--x", o.x, "argument")->required();
    convex->add_option("--mu-grid", o.mu_grid, "mu grid")->capture_default_str();
    add_format(convex, o);

    auto* ratio = app.add_subcommand("ratio-scan", "monotonicity of the shifted ratio in x");
    add_split(ratio, o);
    ratio->add_option("--mu", o.mu, "shift")->required();
    ratio->add_option("--grid", o.grid, "x grid")->required();
    add_format(ratio, o);

    auto* campaign = app.add_subcommand("campaign", "random scan campaign");
    campaign->add_option("--scan", o.scan, "cm, log-cm, kernel, ratio or convexity")->required();
    campaign->add_option("--count", o.count, "number of random specs")->capture_default_str();
    campaign->add_option("--seed", o.seed, "random seed")->capture_default_str();
    campaign->add_option("--q-max", o.q_max, "largest row length")->capture_default_str();
    campaign->add_option("--lo", o.lo, "smallest parameter")->capture_default_str();
    campaign->add_option("--hi", o.hi, "largest parameter")->capture_default_str();
    campaign->add_flag("--dominated", o.dominated, "draw b_i >= a_i");
    campaign->add_option("--n-max", o.n_max, "derivative order for cm")->capture_default_str();
    campaign->add_option("--threads", o.threads, "worker threads (0: automatic)");
    add_format(campaign, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (const char* env = std::getenv(tol_env); env != nullptr && *env != '\0') {
            ctx.env_tol = parse_real(env, tol_env);
        }
        if (o.tol && !(*o.tol >= 0.0)) throw UsageError("--tol must be nonnegative");
        if (ctx.env_tol && !(*ctx.env_tol >= 0.0)) throw UsageError(std::string(tol_env) + " must be nonnegative");
        const auto format = parse_format(o.format);
        Result res;
        if (eval->parsed()) res = cmd_eval(ctx);
        else if (kernel->parsed()) res = cmd_kernel(ctx);
        else if (check->parsed()) res = cmd_check(ctx);
        else if (bounds->parsed()) res = cmd_bounds(ctx);
        else if (verify->parsed()) res = cmd_verify_rep(ctx);
        else if (cm->parsed()) res = cmd_cm_scan(ctx);
        else if (convex->parsed()) res = cmd_convexity_scan(ctx);
        else if (ratio->parsed()) res = cmd_ratio_scan(ctx);
        else res = cmd_campaign(ctx);

        write_output(out, format, res.request, res.rows);
        Status worst = Status::ok;
        for (const auto& r : res.rows) {
            if (severity(r.status) > severity(worst)) worst = r.status;
        }
        return exit_for(worst);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

}  // namespace hyperbound::cli
