#include "hyperbound/monotone.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "hyperbound/errors.hpp"
#include "hyperbound/series.hpp"

namespace hyperbound {
namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double endpoint_gap = 1e-3;
constexpr double series_switch = 0.5;

std::string describe_grid(const std::vector<double>& grid) {
    std::ostringstream out;
    out.precision(6);
    if (grid.empty()) {
        out << "empty grid";
        return out.str();
    }
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    out << grid.size() << " points in [" << *lo << ", " << *hi << "]";
    return out.str();
}

void check_order(int n_max, int limit) {
    if (n_max < 0 || n_max > limit) {
        throw DomainError("derivative order must lie in [0, " + std::to_string(limit) + "], got " +
                          std::to_string(n_max));
    }
}

void require_positive_grid(const std::vector<double>& grid) {
    for (double x : grid) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("complete monotonicity is scanned on (0, inf)");
    }
}

HypothesisEntry entry(std::string name, const Predicate& p) {
    return {std::move(name), p.verdict, p.witness, p.note};
}

HypothesisEntry entry(std::string name, bool ok, std::string note = {}) {
    return {std::move(name), ok ? Verdict::holds : Verdict::fails, std::nullopt, std::move(note)};
}

bool all_positive(const ParamVec& A, const ParamVec& B) { return A.all_positive() && B.all_positive(); }

/// Running minimum of signed margins with their location.
struct MarginTracker {
    double min = inf;
    double max_err = 0.0;
    std::optional<double> at;
    std::optional<int> order;

    void add(double margin, double err, double x, std::optional<int> n = std::nullopt) {
        max_err = std::max(max_err, err);
        if (margin < min) {
            min = margin;
            at = x;
            order = n;
        }
    }

    void write(MonotoneReport& rep, double tol, double err_factor) const {
        rep.min_margin = std::isfinite(min) ? min : 0.0;
        rep.argmin = at;
        rep.argmin_order = order;
        rep.tolerance = tol + err_factor * max_err;
        rep.finalize();
    }
};

/// z -> F(s, A; B; -z) for z >= 0, |A| = |B|.
class ShiftedStieltjes {
public:
    ShiftedStieltjes(double s, ParamVec A, ParamVec B)
        : s_(s), A_(std::move(A)), B_(std::move(B)), spec_{A_.with(s_), B_}, identity_(A_.sorted() == B_.sorted()) {}

    EvalResult operator()(double z) const {
        if (identity_) {
            const double v = std::exp(-s_ * std::log1p(z));
            return {v, 4.0 * eps * v, 1};
        }
        if (z < series_switch) {
            try {
                return eval_pfq(spec_, -z);
            } catch (const NonConvergence&) {
            }
        }
        if (!rep_) rep_ = make_stieltjes_rep(s_, A_, B_);
        return (*rep_)(z);
    }

private:
    double s_;
    ParamVec A_;
    ParamVec B_;
    HyperSpec spec_;
    bool identity_;
    mutable std::optional<IntegralRep> rep_;
};

void validate_triple(const StieltjesTriple& g) {
    if (g.A.size() != g.B.size()) throw ShapeError("the composite needs |A| = |B|");
    if (!(g.sigma > 0.0)) throw DomainError("sigma must be positive");
    if (!all_positive(g.A, g.B)) throw NonPositiveParameter("the composite needs positive parameters");
}

double pochhammer_real(double a, int n) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= a + k;
    return p;
}

/// (sigma)_n x^{-sigma-n} F(sigma+n, A; B; -1/x), given F at order n.
EvalResult scale_composite(double sigma, int n, double x, const EvalResult& f) {
    const double c = pochhammer_real(sigma, n) * std::exp(-(sigma + n) * std::log(x));
    return {c * f.value, std::abs(c) * f.abs_err + 4.0 * eps * std::abs(c * f.value), f.terms_used};
}

std::vector<ShiftedStieltjes> composite_orders(const StieltjesTriple& g, int n_max) {
    std::vector<ShiftedStieltjes> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) out.emplace_back(g.sigma + n, g.A, g.B);
    return out;
}

std::vector<HypothesisEntry> composite_hypotheses(const StieltjesTriple& g) {
    std::vector<HypothesisEntry> h;
    h.push_back(entry("sigma_positive", g.sigma > 0.0));
    h.push_back(entry("positive_parameters", all_positive(g.A, g.B)));
    h.push_back(entry("kernel_positivity", kernel_positivity(g.A, g.B)));
    return h;
}

std::vector<HypothesisEntry> cm_hypotheses(const HyperSpec& s) {
    std::vector<HypothesisEntry> h;
    h.push_back(entry("positive_parameters", all_positive(s.A, s.B)));
    const std::size_t p = s.p(), q = s.q();
    if (p == q) {
        h.push_back(entry("kernel_positivity", kernel_positivity(s.A, s.B)));
    } else if (p == q + 1) {
        HypothesisEntry e{"kernel_positivity", Verdict::fails, std::nullopt, "no choice of sigma in A leaves v(t) >= 0"};
        for (std::size_t i = 0; i < p; ++i) {
            std::vector<double> rest;
            for (std::size_t j = 0; j < p; ++j) {
                if (j != i) rest.push_back(s.A[j]);
            }
            if (kernel_positivity(ParamVec(std::move(rest)), s.B).holds()) {
                std::ostringstream note;
                note << "sigma = " << s.A[i];
                e = {"kernel_positivity", Verdict::holds, std::nullopt, note.str()};
                break;
            }
        }
        h.push_back(std::move(e));
    } else {
        h.push_back(entry("shape", false, "needs p = q or p = q + 1"));
    }
    return h;
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

SplitSpec shift_measure_side(const SplitSpec& s, double mu) {
    return {s.A1, s.B1, s.A2.shifted(mu), s.B2.shifted(mu)};
}

bool in_domain(const ClauseDomain& d, double x) {
    const double lo = std::isfinite(d.lo) ? d.lo + endpoint_gap : d.lo;
    return x >= lo && x <= d.hi;
}

}  // namespace

std::vector<double> default_cm_grid() {
    constexpr int n = 64;
    const double a = std::log(0.01), b = std::log(20.0);
    std::vector<double> g;
    g.reserve(n);
    for (int i = 0; i < n; ++i) g.push_back(std::exp(a + (b - a) * i / (n - 1)));
    g.front() = 0.01;
    g.back() = 20.0;
    return g;
}

EvalResult cm_derivative(const HyperSpec& spec, double x, int n) {
    check_order(n, max_cm_order);
    const auto f = coeff_f(spec.A, spec.B, static_cast<unsigned>(n));
    const auto v = evaluate_pfq({spec.A.shifted(n), spec.B.shifted(n)}, -x).result;
    return {f * v.value, std::abs(f) * v.abs_err, v.terms_used};
}

MonotoneReport cm_check(const HyperSpec& spec, int n_max, const std::vector<double>& x_grid,
                        const ScanOptions& opts) {
    check_order(n_max, max_cm_order);
    require_positive_grid(x_grid);
    spec.validate();
    MonotoneReport rep;
    rep.kind = ScanKind::cm;
    rep.grid = describe_grid(x_grid);
    rep.n_max = n_max;
    rep.hypotheses = cm_hypotheses(spec);

    std::vector<PfqEvaluator> orders;
    std::vector<double> coeff;
    for (int n = 0; n <= n_max; ++n) {
        orders.emplace_back(HyperSpec{spec.A.shifted(n), spec.B.shifted(n)});
        coeff.push_back(coeff_f(spec.A, spec.B, static_cast<unsigned>(n)));
    }
    MarginTracker m;
    for (double x : x_grid) {
        for (int n = 0; n <= n_max; ++n) {
            try {
                const auto v = orders[n](-x).result;
                const double c = coeff[n];
                m.add(c * v.value, std::abs(c) * v.abs_err, x, n);
            } catch (const Error& e) {
                rep.failures.push_back({x, "order " + std::to_string(n) + ": " + e.what()});
            }
        }
    }
    m.write(rep, opts.tol, 2.0);
    return rep;
}

EvalResult composite_value(const StieltjesTriple& g, double x) { return composite_derivative(g, x, 0); }

EvalResult composite_derivative(const StieltjesTriple& g, double x, int n) {
    check_order(n, max_cm_order);
    validate_triple(g);
    if (!(x > 0.0)) throw DomainError("the composite is defined for x > 0");
    const ShiftedStieltjes f(g.sigma + n, g.A, g.B);
    return scale_composite(g.sigma, n, x, f(1.0 / x));
}

double composite_derivative_fd(const StieltjesTriple& g, double x, int n) {
    check_order(n, max_fd_order);
    validate_triple(g);
    const double h = std::max(1e-3 * x, 1e-4);
    if (!(x - 0.5 * n * h > 0.0)) throw DomainError("stencil reaches x <= 0");
    const ShiftedStieltjes f(g.sigma, g.A, g.B);
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        const double y = x + (0.5 * n - k) * h;
        const double gy = std::exp(-g.sigma * std::log(y)) * f(1.0 / y).value;
        sum += (k % 2 == 0 ? 1.0 : -1.0) * binom * gy;
        binom = binom * (n - k) / (k + 1);
    }
    const double d = sum / std::pow(h, n);
    return n % 2 == 0 ? d : -d;
}

MonotoneReport cm_check(const StieltjesTriple& g, int n_max, const std::vector<double>& x_grid,
                        const ScanOptions& opts, DerivativeMethod method) {
    check_order(n_max, method == DerivativeMethod::analytic ? max_cm_order : max_fd_order);
    require_positive_grid(x_grid);
    validate_triple(g);
    MonotoneReport rep;
    rep.kind = ScanKind::cm;
    rep.grid = describe_grid(x_grid);
    rep.n_max = n_max;
    rep.hypotheses = composite_hypotheses(g);
    rep.note = method == DerivativeMethod::analytic ? "composite, analytic derivatives"
                                                    : "composite, finite differences";

    MarginTracker m;
    if (method == DerivativeMethod::analytic) {
        const auto orders = composite_orders(g, n_max);
        for (double x : x_grid) {
            for (int n = 0; n <= n_max; ++n) {
                try {
                    const auto d = scale_composite(g.sigma, n, x, orders[n](1.0 / x));
                    m.add(d.value, d.abs_err, x, n);
                } catch (const Error& e) {
                    rep.failures.push_back({x, "order " + std::to_string(n) + ": " + e.what()});
                }
            }
        }
        m.write(rep, opts.tol, 2.0);
        return rep;
    }
    for (double x : x_grid) {
        for (int n = 0; n <= n_max; ++n) {
            try {
                m.add(composite_derivative_fd(g, x, n), 0.0, x, n);
            } catch (const Error& e) {
                rep.failures.push_back({x, "order " + std::to_string(n) + ": " + e.what()});
            }
        }
    }
    m.write(rep, opts.tol, 0.0);
    return rep;
}

MonotoneReport log_cm_check(double sigma, const ParamVec& A, const ParamVec& B, const std::vector<double>& x_grid,
                            const ScanOptions& opts) {
    constexpr int order = max_fd_order;
    require_positive_grid(x_grid);
    const StieltjesTriple g{sigma, A, B};
    validate_triple(g);
    MonotoneReport rep;
    rep.kind = ScanKind::log_cm;
    rep.grid = describe_grid(x_grid);
    rep.n_max = order;
    rep.hypotheses = composite_hypotheses(g);
    rep.hypotheses.insert(rep.hypotheses.begin() + 1, entry("sigma_at_most_one", sigma <= 1.0));

    const auto orders = composite_orders(g, order + 1);
    MarginTracker m;
    for (double x : x_grid) {
        try {
            // d[k] = g^{(k)}(x); L[k] = (log g)^{(k)}; M bounds the magnitudes in the recursion.
            std::array<double, order + 2> d{}, L{}, M{};
            double rel = 0.0;
            for (int k = 0; k <= order + 1; ++k) {
                const auto v = scale_composite(sigma, k, x, orders[k](1.0 / x));
                if (!(v.value > 0.0)) throw DomainError("derivative of the composite is not positive");
                rel = std::max(rel, v.abs_err / v.value);
                d[k] = k % 2 == 0 ? v.value : -v.value;
            }
            for (int n = 0; n <= order; ++n) {
                double s = d[n + 1], a = std::abs(d[n + 1]);
                double binom = 1.0;
                for (int k = 1; k <= n; ++k) {
                    binom = binom * (n - k + 1) / k;
                    s -= binom * d[k] * L[n + 1 - k];
                    a += binom * std::abs(d[k]) * M[n + 1 - k];
                }
                L[n + 1] = s / d[0];
                M[n + 1] = a / d[0];
            }
            double scale = x, fact = 1.0;
            for (int k = 0; k <= order; ++k) {
                if (k > 0) {
                    scale *= x;
                    fact *= k;
                }
                const double sign = k % 2 == 0 ? -1.0 : 1.0;
                const double margin = sign * L[k + 1] * scale / fact;
                const double err = 4.0 * (k + 2) * (rel + 8.0 * eps) * M[k + 1] * scale / fact;
                m.add(margin, err, x, k);
            }
        } catch (const Error& e) {
            rep.failures.push_back({x, e.what()});
        }
    }
    m.write(rep, opts.tol, 1.0);
    return rep;
}

ClauseDomain clause_domain(const SplitSpec& split) {
    ClauseDomain d;
    const std::size_t p = split.A1.size() + split.A2.size();
    const std::size_t q = split.B1.size() + split.B2.size();
    const bool p2q2 = split.A2.size() == split.B2.size();
    d.hypotheses.push_back(entry("positive_A1_B1", all_positive(split.A1, split.B1)));
    d.hypotheses.push_back(entry("p2_eq_q2", p2q2));
    if (p2q2) {
        d.hypotheses.push_back(entry("kernel_positivity", kernel_positivity(split.A2, split.B2)));
    } else {
        d.hypotheses.push_back({"kernel_positivity", Verdict::not_applicable, std::nullopt, "needs p2 = q2"});
    }
    d.base_holds = std::all_of(d.hypotheses.begin(), d.hypotheses.end(),
                               [](const HypothesisEntry& h) { return h.status == Verdict::holds; });
    if (p == q + 1) d.lo = -1.0;
    if (p > q + 1) throw ShapeError("p must not exceed q + 1");

    auto clause = [&](std::string name, bool applies, const ParamVec& A, const ParamVec& B) {
        HypothesisEntry e{std::move(name), Verdict::not_applicable, std::nullopt, {}};
        if (!applies) {
            e.note = "shape does not match";
        } else {
            const auto pred = kernel_positivity(A, B);
            if (pred.holds()) {
                e.status = Verdict::holds;
            } else {
                e.note = "clause not satisfied: " + pred.note;
            }
        }
        const bool extends = e.status == Verdict::holds;
        d.hypotheses.push_back(std::move(e));
        return extends;
    };
    const bool full = clause("clause_p_eq_q", p == q, split.A1, split.B1);
    const bool half = clause("clause_p_eq_q_plus_1", p == q + 1 && !split.A1.empty(),
                             split.A1.empty() ? ParamVec{} : split.A1.without_max(), split.B1);
    if (d.base_holds && (full || half)) d.hi = inf;
    return d;
}

MonotoneReport ratio_monotone_check(const SplitSpec& split, double mu, const std::vector<double>& x_grid,
                                    const ScanOptions& opts) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be nonnegative");
    split.validate();
    const auto dom = clause_domain(split);
    if (opts.require_hypotheses && !dom.base_holds) throw HypothesisFailed("ratio monotonicity hypotheses fail");
    MonotoneReport rep;
    rep.kind = ScanKind::ratio_decreasing;
    rep.hypotheses = dom.hypotheses;

    std::vector<double> xs;
    std::size_t skipped = 0;
    for (double x : sorted_unique(x_grid)) {
        if (in_domain(dom, x)) {
            xs.push_back(x);
        } else {
            ++skipped;
        }
    }
    rep.grid = describe_grid(xs);
    if (skipped > 0) rep.note = std::to_string(skipped) + " grid points outside the admissible domain skipped";

    const PfqEvaluator base(split.target());
    const PfqEvaluator shifted(shift_measure_side(split, mu).target());
    std::vector<std::pair<double, EvalResult>> r;
    for (double x : xs) {
        try {
            const auto num = shifted(-x).result;
            const auto den = base(-x).result;
            if (!(den.value > 0.0)) throw DomainError("denominator is not positive");
            const double v = num.value / den.value;
            const double err = std::abs(v) * (num.abs_err / std::abs(num.value) + den.abs_err / den.value) +
                               2.0 * eps * std::abs(v);
            r.push_back({x, {v, err, 1}});
        } catch (const Error& e) {
            rep.failures.push_back({x, e.what()});
        }
    }
    MarginTracker m;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        m.add(r[i].second.value - r[i + 1].second.value, r[i].second.abs_err + r[i + 1].second.abs_err,
              r[i].first);
    }
    m.write(rep, opts.tol, 1.0);
    return rep;
}

MonotoneReport logconvex_check(const SplitSpec& split, const std::vector<double>& mu_grid, double x,
                               const ScanOptions& opts) {
    const auto mus = sorted_unique(mu_grid);
    if (mus.size() < 3) throw DomainError("log-convexity needs at least three distinct mu values");
    if (!(mus.front() >= 0.0) || !std::isfinite(mus.back())) throw DomainError("mu values must be nonnegative");
    if (!std::isfinite(x)) throw DomainError("x must be finite");
    split.validate();
    const auto dom = clause_domain(split);
    MonotoneReport rep;
    rep.kind = ScanKind::log_convex;
    rep.grid = describe_grid(mus);
    rep.hypotheses = dom.hypotheses;
    rep.hypotheses.push_back(entry("x_in_domain", in_domain(dom, x)));
    if (opts.require_hypotheses && !rep.hypotheses_hold()) {
        throw HypothesisFailed("log-convexity hypotheses fail at this x");
    }
    std::ostringstream note;
    note.precision(15);
    note << "x = " << x;
    rep.note = note.str();

    std::vector<std::pair<double, EvalResult>> logs;
    for (double mu : mus) {
        try {
            const auto f = evaluate_pfq(shift_measure_side(split, mu).target(), -x).result;
            if (!(f.value > 0.0)) throw DomainError("function value is not positive");
            logs.push_back({mu, {std::log(f.value), f.abs_err / f.value + eps, 1}});
        } catch (const Error& e) {
            rep.failures.push_back({mu, e.what()});
        }
    }
    MarginTracker m;
    for (std::size_t i = 0; i + 2 < logs.size(); ++i) {
        const auto& [m1, l1] = logs[i];
        const auto& [m2, l2] = logs[i + 1];
        const auto& [m3, l3] = logs[i + 2];
        const double h1 = m2 - m1, h2 = m3 - m2;
        const double second = 2.0 * ((l3.value - l2.value) / h2 - (l2.value - l1.value) / h1) / (h1 + h2);
        const double err =
            2.0 * (l3.abs_err / h2 + l2.abs_err * (1.0 / h1 + 1.0 / h2) + l1.abs_err / h1) / (h1 + h2);
        m.add(second, err, m2);
    }
    m.write(rep, opts.tol, 1.0);
    return rep;
}

}  // namespace hyperbound
