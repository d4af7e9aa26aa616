#include "hyperbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperbound/errors.hpp"
#include "hyperbound/representations.hpp"
#include "hyperbound/series.hpp"

namespace hyperbound {

namespace {

HypothesisEntry entry(std::string name, const Predicate& p) {
    return {std::move(name), p.verdict, p.witness, p.note};
}

HypothesisEntry positivity_entry(const ParamVec& A, const ParamVec& B) {
    const bool ok = A.all_positive() && B.all_positive();
    return {"positive_parameters", ok ? Verdict::holds : Verdict::fails, std::nullopt,
            ok ? "" : "some parameter is not positive"};
}

void add_envelope(BoundCertificate& c, std::string name, BoundSide side, double value,
                  std::vector<std::string> needs) {
    bool ok = true;
    for (const auto& n : needs) {
        const auto* h = c.hypothesis(n);
        ok = ok && h != nullptr && h->status == Verdict::holds;
    }
    c.envelopes.push_back({std::move(name), side, value, std::move(needs), ok});
}

// Tightest certified envelope per side; advisory envelopes only when nothing is certified.
void summarise(BoundCertificate& c) {
    for (BoundSide side : {BoundSide::lower, BoundSide::upper}) {
        std::optional<double> best_cert, best_any;
        for (const auto& e : c.envelopes) {
            if (e.side != side) continue;
            auto tighter = [&](const std::optional<double>& cur) {
                return !cur || (side == BoundSide::lower ? e.value > *cur : e.value < *cur);
            };
            if (tighter(best_any)) best_any = e.value;
            if (e.certified && tighter(best_cert)) best_cert = e.value;
        }
        auto& slot = side == BoundSide::lower ? c.lower : c.upper;
        auto& cert = side == BoundSide::lower ? c.lower_certified : c.upper_certified;
        slot = best_cert ? best_cert : best_any;
        cert = best_cert.has_value();
    }
}

void attach_reference(BoundCertificate& c, const HyperSpec& spec, double arg, const BoundOptions& opts) {
    if (!opts.with_reference) return;
    const auto r = evaluate_pfq(spec, arg, opts.reference_tol);
    c.reference = r.result;
    c.reference_method = r.method;
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

void require_same_length(const ParamVec& A, const ParamVec& B) {
    if (A.size() != B.size()) throw ShapeError("needs |A| = |B|");
}

// (1 - u)^{-sigma} - 1
double inv_power_m1(double u, double sigma) { return std::expm1(-sigma * std::log1p(-u)); }

}  // namespace

std::string_view to_string(BoundSide s) noexcept { return s == BoundSide::lower ? "lower" : "upper"; }

std::string_view to_string(StieltjesSign s) noexcept {
    return s == StieltjesSign::positive_arg ? "positive_arg" : "negative_arg";
}

StieltjesSign parse_stieltjes_sign(std::string_view name) {
    if (name == "positive_arg" || name == "positive") return StieltjesSign::positive_arg;
    if (name == "negative_arg" || name == "negative") return StieltjesSign::negative_arg;
    throw UsageError("unknown argument sign '" + std::string(name) + "'");
}

std::string_view to_string(CoeffLemma l) noexcept {
    switch (l) {
        case CoeffLemma::decreasing: return "decreasing";
        case CoeffLemma::power_lower: return "power_lower";
        case CoeffLemma::bessel_lower: return "bessel_lower";
        case CoeffLemma::bessel_upper: return "bessel_upper";
    }
    return "unknown";
}

bool BoundCertificate::all_hypotheses_hold() const noexcept {
    return std::all_of(hypotheses.begin(), hypotheses.end(),
                       [](const HypothesisEntry& h) { return h.status == Verdict::holds; });
}

const HypothesisEntry* BoundCertificate::hypothesis(std::string_view name) const noexcept {
    for (const auto& h : hypotheses) {
        if (h.name == name) return &h;
    }
    return nullptr;
}

const Envelope* BoundCertificate::envelope(std::string_view name) const noexcept {
    for (const auto& e : envelopes) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

bool BoundCertificate::sandwich_holds(double tol) const {
    if (!reference) return true;
    const double ref = reference->value;
    const double slack = tol * std::max(1.0, std::abs(ref)) + reference->abs_err;
    for (const auto& e : envelopes) {
        if (!e.certified) continue;
        if (e.side == BoundSide::lower && e.value > ref + slack) return false;
        if (e.side == BoundSide::upper && e.value < ref - slack) return false;
    }
    return true;
}

BoundCertificate luke_bounds(const ParamVec& A, const ParamVec& B, double x, bool refined,
                             const BoundOptions& opts) {
    require_same_length(A, B);
    require_finite(x, "x");
    if (x < 0.0) throw DomainError("Luke bounds need x >= 0");
    BoundCertificate c;
    c.family = refined ? "luke_refined" : "luke";
    c.x = x;
    c.hypotheses.push_back(entry("symmetric_chain", symmetric_ratio_chain(A, B)));
    c.hypotheses.push_back(entry("symmetric_geq1", symmetric_ratios_geq1(A, B)));
    const double f1 = coeff_f(A, B, 1);
    c.constants.emplace_back("f1", f1);
    const double em1 = std::expm1(x);
    if (!refined) {
        add_envelope(c, "exp_f1x", BoundSide::lower, std::exp(f1 * x), {"symmetric_chain"});
        add_envelope(c, "one_minus_f1_plus_f1_exp", BoundSide::upper, 1.0 + f1 * em1, {"symmetric_geq1"});
    } else {
        const double f2 = coeff_f(A, B, 2);
        if (f2 == 0.0 || f1 == 0.0) throw PoleError("refined bounds divide by f1 and f2");
        c.constants.emplace_back("f2", f2);
        add_envelope(c, "refined_lower", BoundSide::lower, 1.0 + (f1 * f1 / f2) * std::expm1((f2 / f1) * x),
                     {"symmetric_chain"});
        add_envelope(c, "refined_upper", BoundSide::upper, 1.0 + f1 * x + f2 * (em1 - x), {"symmetric_geq1"});
    }
    summarise(c);
    attach_reference(c, {A, B}, x, opts);
    return c;
}

BoundCertificate stieltjes_bounds(double sigma, const ParamVec& A, const ParamVec& B, double x, bool refined,
                                  StieltjesSign sign, const BoundOptions& opts) {
    require_same_length(A, B);
    require_finite(x, "x");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
    if (x < 0.0) throw DomainError("x must be nonnegative; the sign selects the argument");
    BoundCertificate c;
    c.x = x;
    const double f1 = coeff_f(A, B, 1);
    c.constants.emplace_back("sigma", sigma);
    c.constants.emplace_back("f1", f1);
    if (sign == StieltjesSign::positive_arg) {
        if (x >= 1.0) throw DomainError("positive-argument Stieltjes bounds need 0 <= x < 1");
        c.family = refined ? "stieltjes_positive_refined" : "stieltjes_positive";
        c.hypotheses.push_back(entry("symmetric_chain", symmetric_ratio_chain(A, B)));
        c.hypotheses.push_back(entry("symmetric_geq1", symmetric_ratios_geq1(A, B)));
        const double pole = inv_power_m1(x, sigma);
        if (!refined) {
            add_envelope(c, "inv_power_f1x", BoundSide::lower, 1.0 + inv_power_m1(f1 * x, sigma),
                         {"symmetric_chain"});
            add_envelope(c, "one_minus_f1_plus_f1_pole", BoundSide::upper, 1.0 + f1 * pole, {"symmetric_geq1"});
        } else {
            const double f2 = coeff_f(A, B, 2);
            if (f2 == 0.0 || f1 == 0.0) throw PoleError("refined bounds divide by f1 and f2");
            c.constants.emplace_back("f2", f2);
            add_envelope(c, "refined_lower", BoundSide::lower, 1.0 + (f1 * f1 / f2) * inv_power_m1(f2 * x / f1, sigma),
                         {"symmetric_chain"});
            add_envelope(c, "refined_upper", BoundSide::upper, 1.0 + sigma * f1 * x + f2 * (pole - sigma * x),
                         {"symmetric_geq1"});
        }
        summarise(c);
        attach_reference(c, {A.with(sigma), B}, x, opts);
        return c;
    }
    if (refined) throw DomainError("no refined bounds for the negative argument");
    c.family = "stieltjes_negative";
    c.hypotheses.push_back(positivity_entry(A, B));
    c.hypotheses.push_back(entry("kernel_positivity", kernel_positivity(A, B)));
    add_envelope(c, "inv_power_f1x", BoundSide::lower, 1.0 + inv_power_m1(-f1 * x, sigma),
                 {"positive_parameters", "kernel_positivity"});
    add_envelope(c, "one_minus_f1_plus_f1_pole", BoundSide::upper, 1.0 + f1 * inv_power_m1(-x, sigma),
                 {"positive_parameters", "kernel_positivity"});
    summarise(c);
    attach_reference(c, {A.with(sigma), B}, -x, opts);
    return c;
}

BoundCertificate jensen_bounds(const ParamVec& A, const ParamVec& B, double x, const BoundOptions& opts) {
    require_same_length(A, B);
    require_finite(x, "x");
    BoundCertificate c;
    c.family = "jensen";
    c.x = x;
    c.hypotheses.push_back(positivity_entry(A, B));
    c.hypotheses.push_back(entry("kernel_positivity", kernel_positivity(A, B)));
    const double f1 = coeff_f(A, B, 1);
    c.constants.emplace_back("f1", f1);
    add_envelope(c, "exp_minus_f1x", BoundSide::lower, std::exp(-f1 * x), {"positive_parameters", "kernel_positivity"});
    add_envelope(c, "one_minus_f1_plus_f1_exp", BoundSide::upper, 1.0 + f1 * std::expm1(-x),
                 {"positive_parameters", "kernel_positivity"});
    summarise(c);
    attach_reference(c, {A, B}, -x, opts);
    return c;
}

BoundCertificate upper_bounds_p_lt_q(const ParamVec& A, const ParamVec& B, double x, const BoundOptions& opts) {
    if (A.size() >= B.size()) throw ShapeError("needs |A| < |B|");
    require_finite(x, "x");
    if (x < 0.0) throw DomainError("upper bounds for p < q need x >= 0");
    BoundCertificate c;
    c.family = "upper_p_lt_q";
    c.x = x;
    c.hypotheses.push_back(entry("coeff_dominance", coeff_dominance(A, B)));
    c.hypotheses.push_back(entry("ratio_decreasing", ratio_decreasing_chain(A, B)));
    const double f1 = coeff_f(A, B, 1);
    c.constants.emplace_back("f1", f1);
    add_envelope(c, "one_minus_f1_plus_f1_exp", BoundSide::upper, 1.0 + f1 * std::expm1(x), {"coeff_dominance"});
    add_envelope(c, "exp_f1x", BoundSide::upper, std::exp(f1 * x), {"ratio_decreasing"});
    summarise(c);
    attach_reference(c, {A, B}, x, opts);
    return c;
}

double log_f01_lower(double c, double x) {
    if (!(c > 0.0)) throw DomainError("0F1 bounds need c > 0");
    if (!(x >= 0.0)) throw DomainError("0F1 bounds need x >= 0");
    const double s = std::sqrt(4.0 * x + c * c);
    // s - c and log((c + s)/(2c)) both vanish at x = 0; keep them accurate there
    const double s_minus_c = 4.0 * x / (s + c);
    return s_minus_c - c * std::log1p(s_minus_c / (2.0 * c));
}

double log_f01_upper(double c, double x) {
    if (!(c > 0.0)) throw DomainError("0F1 bounds need c > 0");
    if (!(x >= 0.0)) throw DomainError("0F1 bounds need x >= 0");
    const double c1 = c + 1.0;
    const double s = std::sqrt(4.0 * x + c1 * c1);
    const double s_minus_c1 = 4.0 * x / (s + c1);
    if (c == 1.0) return s_minus_c1;
    return s_minus_c1 + (1.0 - c) * std::log1p(s_minus_c1 / (2.0 * c));
}

BoundCertificate f01_bounds(double c, double x, const BoundOptions& opts) {
    require_finite(x, "x");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("0F1 bounds need c > 0");
    if (x < 0.0) throw DomainError("0F1 bounds need x >= 0");
    BoundCertificate cert;
    cert.family = "f01";
    cert.x = x;
    cert.constants.emplace_back("c", c);
    add_envelope(cert, "amos_lower", BoundSide::lower, std::exp(log_f01_lower(c, x)), {});
    add_envelope(cert, "amos_upper", BoundSide::upper, std::exp(log_f01_upper(c, x)), {});
    summarise(cert);
    attach_reference(cert, {{}, {c}}, x, opts);
    return cert;
}

BoundCertificate bessel_bounds(const ParamVec& A, const ParamVec& B, double x, const BoundOptions& opts) {
    require_finite(x, "x");
    if (x < 0.0) throw DomainError("Bessel-type bounds need x >= 0");
    const auto rates = bessel_rates(A, B);
    BoundCertificate c;
    c.family = "bessel";
    c.x = x;
    c.constants.emplace_back("c", rates.c);
    c.constants.emplace_back("d", rates.d);
    c.constants.emplace_back("d_positive", rates.d_positive ? 1.0 : 0.0);
    c.hypotheses.push_back(positivity_entry(A, B));
    c.hypotheses.push_back({"d_positive", rates.d_positive ? Verdict::holds : Verdict::fails, std::nullopt,
                            rates.d_positive ? "" : "d <= 0 leaves no upper envelope"});
    add_envelope(c, "f01_lower_c", BoundSide::lower, std::exp(log_f01_lower(rates.c, x)), {"positive_parameters"});
    if (rates.d_positive) {
        add_envelope(c, "f01_upper_d", BoundSide::upper, std::exp(log_f01_upper(rates.d, x)),
                     {"positive_parameters", "d_positive"});
    }
    summarise(c);
    attach_reference(c, {A, B}, x, opts);
    return c;
}

CoeffLemmaReport check_coeff_lemma(CoeffLemma lemma, const ParamVec& A, const ParamVec& B, unsigned n_max) {
    if (!A.all_positive() || !B.all_positive()) throw NonPositiveParameter("coefficient lemmas need positive parameters");
    CoeffLemmaReport r;
    r.lemma = lemma;
    r.n_max = n_max;
    r.min_log_slack = std::numeric_limits<double>::infinity();
    double rate = 0.0;
    if (lemma == CoeffLemma::bessel_lower || lemma == CoeffLemma::bessel_upper) {
        const auto rates = bessel_rates(A, B);
        rate = lemma == CoeffLemma::bessel_lower ? rates.c : rates.d;
        if (lemma == CoeffLemma::bessel_upper && !rates.d_positive) {
            throw DomainError("the upper coefficient lemma needs d > 0");
        }
    }
    const double log_f1 = log_coeff_f(A, B, 1).log_abs;
    bool ok = true;
    for (unsigned n = 1; n <= n_max; ++n) {
        const double log_fn = log_coeff_f(A, B, n).log_abs;
        double slack = 0.0;
        double scale = 1.0 + std::abs(log_fn);
        switch (lemma) {
            case CoeffLemma::decreasing: {
                const double log_next = log_coeff_f(A, B, n + 1).log_abs;
                slack = log_fn - log_next;
                scale += std::abs(log_next);
                break;
            }
            case CoeffLemma::power_lower:
                slack = log_fn - n * log_f1;
                scale += n * std::abs(log_f1);
                break;
            case CoeffLemma::bessel_lower: {
                const double log_cn = log_rising_factorial(rate, n).log_abs;
                slack = log_fn + log_cn;
                scale += std::abs(log_cn);
                break;
            }
            case CoeffLemma::bessel_upper: {
                const double log_dn = log_rising_factorial(rate, n).log_abs;
                slack = -(log_fn + log_dn);
                scale += std::abs(log_dn);
                break;
            }
        }
        const double allowance = 16.0 * std::numeric_limits<double>::epsilon() * (n + 1.0) * scale;
        if (slack < r.min_log_slack) {
            r.min_log_slack = slack;
            r.argmin = n;
        }
        if (slack < -allowance) ok = false;
    }
    r.holds = ok;
    return r;
}

}  // namespace hyperbound
