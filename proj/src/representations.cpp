#include "hyperbound/representations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "hyperbound/detail/gamma_real.hpp"
#include "hyperbound/errors.hpp"

namespace hyperbound {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double half_pi = std::numbers::pi / 2.0;
// psi within this distance of a boundary value selects the boundary form
constexpr double psi_tie = 1e-12;

std::string rows(const ParamVec& v) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << ')';
    return out.str();
}

void require_positive(const ParamVec& v, std::string_view what) {
    if (!v.all_positive()) {
        throw SpecViolation(std::string(what) + " " + rows(v) + " must be positive");
    }
}

}  // namespace

HyperSpec SplitSpec::target() const { return {A1.concat(A2), B1.concat(B2)}; }

void SplitSpec::validate() const {
    const std::size_t p1 = A1.size(), q1 = B1.size(), p2 = A2.size(), q2 = B2.size();
    if (p2 < 1) throw SpecViolation("measure side needs at least one upper parameter (p2 >= 1)");
    if (p2 < q2) {
        throw SpecViolation("p2 < q2: the measure vanishes identically, no representation exists");
    }
    if (p1 + p2 > q1 + q2 + 1) throw SpecViolation("p = p1 + p2 must not exceed q + 1");
    require_positive(A2, "measure-side upper parameters A2");
    if (p2 == q2 && psi2() < -psi_tie) {
        std::ostringstream msg;
        msg << "p2 = q2 needs psi2 = sum(B2) - sum(A2) >= 0 (got " << psi2() << ")";
        throw SpecViolation(msg.str());
    }
}

KernelMeasure::KernelMeasure(KernelSpec spec, QuadratureConfig cfg,
                             const std::function<double(double)>& log_growth)
    : spec_(std::move(spec)), kind_(spec_.kind()), cfg_(cfg) {
    spec_.validate();
    cfg_.validate();
    if (kind_ == KernelKind::zero) throw SpecViolation("fewer bottom than top entries: the kernel is zero");
    require_positive(spec_.bottom, "kernel bottom row");
    const double psi = spec_.psi();
    if (kind_ == KernelKind::balanced && psi < -psi_tie) {
        throw SpecViolation("balanced kernel with negative psi has no finite measure");
    }
    double log_norm = 0.0;
    int sign = 1;
    for (double b : spec_.top) {
        if (detail::is_nonpositive_integer(b)) throw SpecViolation("kernel top row hits a pole of Gamma");
        const auto lg = detail::log_gamma_signed(b);
        log_norm += lg.log_abs;
        sign *= lg.sign;
    }
    for (double a : spec_.bottom) log_norm -= detail::lgamma_abs(a);
    norm_ = sign * std::exp(log_norm);
    const bool atom = kind_ == KernelKind::balanced && std::abs(psi) <= psi_tie;
    atom_ = atom ? norm_ : 0.0;
    // Below psi = 1 the density is singular at t = 1; integrate f - f(1) against
    // it and add f(1) times the exact unit mass.
    subtract_ = kind_ == KernelKind::balanced && !atom && psi < 1.0;
    kernel_ = std::make_shared<const GKernel>(spec_);

    const auto asym = kernel_asymptotics(spec_);
    QuadratureConfig range_cfg = cfg_;
    range_cfg.endpoint_exponents = {asym.zero_exponent - 1.0, atom ? 0.0 : (subtract_ ? psi : psi - 1.0)};
    if (kind_ == KernelKind::balanced) {
        const URange r = tanh_sinh_range(range_cfg);
        u_lo_ = r.lo;
        u_hi_ = r.hi;
    } else {
        u_lo_ = exp_sinh_range(range_cfg).lo;
        // Cut the tail where the large-t envelope, times the integrand growth,
        // drops below abs_tol / 100.
        const double m = static_cast<double>(*asym.inf_mu);
        const double alpha = *asym.inf_alpha;
        const double log_c = std::log(*asym.inf_constant) + log_norm;
        const double cut = std::log(1e-2 * cfg_.abs_tol);
        auto log_env = [&](double t) {
            const double g = log_growth ? log_growth(t) : 0.0;
            return log_c + (1.0 - alpha) / m * std::log(t) - m * std::pow(t, 1.0 / m) + g;
        };
        double t = 4.0;
        while (t < 1e12 && log_env(t) > cut) t *= 1.25;
        if (t >= 1e12) throw SpecViolation("integrand growth outpaces the kernel decay");
        const double log_kernel = log_env(t) - (log_growth ? log_growth(t) : 0.0);
        if (log_kernel < std::log(std::numeric_limits<double>::min()) + 40.0) {
            throw NoConvergence("the integrand still matters where the kernel underflows double precision");
        }
        u_hi_ = std::asinh(std::log(t) / half_pi);
    }

    // Keep refining until the mass settles, then one level more for the integrands.
    double raw = 0.0, raw_err = 0.0, prev = 0.0;
    for (int level = 0; level <= cfg_.max_levels; ++level) {
        levels_.push_back(build_level(level));
        for (const auto& nd : levels_.back()) {
            const double f = subtract_ ? -nd.tc : 1.0;
            raw += nd.w * f;
            raw_err += nd.err * std::abs(f);
        }
        const double h = level_step(level);
        const double est = raw * h;
        const double tol = std::max({cfg_.abs_tol, cfg_.rel_tol * std::abs(est), 2.0 * raw_err * h});
        if (level >= 4 && std::abs(est - prev) <= tol) {
            if (level < cfg_.max_levels) levels_.push_back(build_level(level + 1));
            break;
        }
        prev = est;
    }
}

std::vector<KernelMeasure::Node> KernelMeasure::build_level(int level) const {
    std::vector<Node> out;
    const bool unit = kind_ == KernelKind::balanced;
    const auto nodes = unit ? tanh_sinh_level(level, u_lo_, u_hi_) : exp_sinh_level(level, u_lo_, u_hi_, 1.0);
    out.reserve(nodes.size());
    for (const auto& nd : nodes) {
        const double tc = unit ? nd.xc : std::numeric_limits<double>::quiet_NaN();
        const auto g = unit ? kernel_->eval_split(nd.x, tc) : (*kernel_)(nd.x);
        const double scale = nd.weight / nd.x;
        out.push_back({nd.x, tc, scale * norm_ * g.value, scale * std::abs(norm_) * g.abs_err});
    }
    return out;
}

std::size_t KernelMeasure::node_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : levels_) n += l.size();
    return n;
}

EvalResult KernelMeasure::mass() const {
    if (subtract_) return {1.0, 0.0, 0};
    return integrate([](double, double) { return 1.0; });
}

EvalResult KernelMeasure::integrate(const std::function<double(double, double)>& f) const {
    return integrate_uncertain([&](double t, double tc) { return EvalResult{f(t, tc), 0.0, 1}; });
}

EvalResult KernelMeasure::integrate_uncertain(const std::function<EvalResult(double, double)>& f) const {
    double raw = 0.0, raw_abs = 0.0, raw_err = 0.0;
    std::size_t count = 0;
    double est = 0.0, prev = 0.0, noise = 0.0;
    const EvalResult f1 = subtract_ ? f(1.0, 0.0) : EvalResult{0.0, 0.0, 0};
    if (!std::isfinite(f1.value)) throw NoConvergence("integrand is not finite at t = 1");
    auto absorb = [&](const std::vector<Node>& level_nodes, int level) {
        for (const auto& nd : level_nodes) {
            if (nd.w == 0.0 && nd.err == 0.0) continue;
            const auto fv = f(nd.t, nd.tc);
            if (!std::isfinite(fv.value)) {
                throw NoConvergence("integrand is not finite on the support of the measure");
            }
            const double g = fv.value - f1.value;
            raw += nd.w * g;
            raw_abs += std::abs(nd.w * fv.value);
            raw_err += nd.err * std::abs(g) + std::abs(nd.w) * (fv.abs_err + f1.abs_err);
        }
        count += level_nodes.size();
        const double h = level_step(level);
        est = raw * h;
        noise = raw_err * h;
    };
    auto settled = [&] {
        return std::abs(est - prev) <= std::max({cfg_.abs_tol, cfg_.rel_tol * std::abs(est), 2.0 * noise});
    };
    int level = 0;
    for (; level < static_cast<int>(levels_.size()); ++level) {
        prev = est;
        absorb(levels_[level], level);
    }
    // Oscillatory integrands may need more than the cached levels.
    while (!settled() && level <= cfg_.max_levels) {
        prev = est;
        absorb(build_level(level), level);
        ++level;
    }
    if (!settled()) {
        std::ostringstream msg;
        msg << "measure integral did not settle within " << cfg_.max_levels << " levels (estimate " << est << ")";
        throw NoConvergence(msg.str());
    }
    const double h = level_step(level - 1);
    const double rounding = 10.0 * eps * raw_abs * h * std::sqrt(static_cast<double>(count));
    return {est + f1.value, std::abs(est - prev) + noise + rounding + f1.abs_err, count};
}

std::string_view to_string(RepKind k) noexcept {
    switch (k) {
        case RepKind::stieltjes: return "stieltjes";
        case RepKind::general_split: return "split";
        case RepKind::laplace_q_plus_1: return "laplace_q_plus_1";
        case RepKind::laplace_q_q: return "laplace_q_q";
        case RepKind::laplace_q_q_psi0: return "laplace_q_q_psi0";
        case RepKind::cosine_psi_gt_half: return "cosine_psi_gt_half";
        case RepKind::cosine_psi_eq_half: return "cosine_psi_eq_half";
        case RepKind::small_p: return "small_p";
    }
    return "unknown";
}

RepKind parse_rep_kind(std::string_view name) {
    for (auto k : {RepKind::stieltjes, RepKind::general_split, RepKind::laplace_q_plus_1, RepKind::laplace_q_q,
                   RepKind::laplace_q_q_psi0, RepKind::cosine_psi_gt_half, RepKind::cosine_psi_eq_half,
                   RepKind::small_p}) {
        if (to_string(k) == name) return k;
    }
    throw UsageError("unknown representation '" + std::string(name) + "'");
}

EvalResult IntegralRep::operator()(double z) const {
    if (!std::isfinite(z) || z < z_min_ || (z == z_min_ && !z_min_closed_)) {
        std::ostringstream msg;
        msg << to_string(kind_) << " representation needs z " << (z_min_closed_ ? ">= " : "> ") << z_min_
            << " (got " << z << ")";
        throw DomainError(msg.str());
    }
    const KernelMeasure* mu = measure_.get();
    std::optional<KernelMeasure> widened;
    if (z < 0.0 && measure_->kind() == KernelKind::laplace && log_growth_) {
        widened.emplace(measure_->spec(), cfg_, [&](double t) { return log_growth_(-z * t); });
        mu = &*widened;
    }
    EvalResult out = mu->integrate_uncertain([&](double t, double) { return kernel_(z * t); });
    if (mu->atom() != 0.0) {
        const auto k = kernel_(z);
        out.value += mu->atom() * k.value;
        out.abs_err += std::abs(mu->atom()) * k.abs_err;
    }
    return out;
}

namespace {

EvalResult exp_kernel(double y) {
    const double v = std::exp(-y);
    return {v, 2.0 * eps * v * (1.0 + std::abs(y)), 1};
}

EvalResult power_kernel(double sigma, double y) {
    if (!(y > -1.0)) throw DomainError("kernel (1 + y)^(-sigma) needs y > -1");
    const double l = -sigma * std::log1p(y);
    const double v = std::exp(l);
    return {v, 4.0 * eps * v * (1.0 + std::abs(l)), 1};
}

EvalResult cosine_kernel(double y) {
    if (y >= 0.0) {
        const double r = 2.0 * std::sqrt(y);
        return {std::cos(r), 2.0 * eps * (1.0 + r), 1};
    }
    const double r = 2.0 * std::sqrt(-y);
    const double v = std::cosh(r);
    return {v, 2.0 * eps * v * (1.0 + r), 1};
}

}  // namespace

IntegralRep make_stieltjes_rep(double sigma, const ParamVec& A, const ParamVec& B, const QuadratureConfig& cfg) {
    if (!(sigma > 0.0)) throw SpecViolation("sigma must be positive");
    if (A.size() != B.size()) throw ShapeError("the Stieltjes form needs |A| = |B| = q");
    require_positive(A, "upper parameters A");
    IntegralRep r;
    r.kind_ = RepKind::stieltjes;
    r.target_ = {ParamVec{sigma}.concat(A), B};
    r.measure_ = std::make_shared<const KernelMeasure>(KernelSpec{A, B}, cfg);
    r.kernel_ = [sigma](double y) { return power_kernel(sigma, y); };
    r.z_min_ = -1.0;
    r.cfg_ = cfg;
    return r;
}

IntegralRep make_split_rep(const SplitSpec& split, const QuadratureConfig& cfg) {
    split.validate();
    IntegralRep r;
    r.kind_ = RepKind::general_split;
    r.target_ = split.target();
    r.cfg_ = cfg;
    r.measure_ = std::make_shared<const KernelMeasure>(KernelSpec{split.A2, split.B2}, cfg);
    const std::size_t p1 = split.A1.size(), q1 = split.B1.size();
    const bool half_line = split.A2.size() > split.B2.size();
    if (p1 == 0 && q1 == 0) {
        r.kernel_ = exp_kernel;
        r.log_growth_ = [](double w) { return w; };
    } else if (p1 == 1 && q1 == 0) {
        const double sigma = split.A1[0];
        r.kernel_ = [sigma](double y) { return power_kernel(sigma, y); };
    } else {
        const HyperSpec kspec{split.A1, split.B1};
        kspec.validate();
        r.kernel_ = [kspec](double y) { return evaluate_pfq(kspec, -y).result; };
        if (p1 <= q1) {
            const double n = static_cast<double>(q1 - p1 + 1);
            r.log_growth_ = [n](double w) { return n * std::pow(w, 1.0 / n); };
        }
    }
    if (p1 == q1 + 1) {
        // the kernel is singular at z t = -1
        r.z_min_ = half_line ? 0.0 : -1.0;
        r.z_min_closed_ = half_line;
    } else if (half_line) {
        const auto mu = static_cast<std::size_t>(r.measure_->spec().mu());
        if (mu == q1 - p1 + 1) r.z_min_ = -1.0;
    }
    return r;
}

IntegralRep make_laplace_rep(const ParamVec& A, const ParamVec& B, RepKind kind, const QuadratureConfig& cfg) {
    require_positive(A, "upper parameters A");
    const double psi = B.sum() - A.sum();
    switch (kind) {
        case RepKind::laplace_q_plus_1:
            if (A.size() != B.size() + 1) throw ShapeError("the q+1Fq Laplace form needs |A| = |B| + 1");
            break;
        case RepKind::laplace_q_q:
            if (A.size() != B.size()) throw ShapeError("the qFq Laplace form needs |A| = |B|");
            if (!(psi > psi_tie)) throw SpecViolation("the qFq Laplace form needs psi > 0");
            break;
        case RepKind::laplace_q_q_psi0:
            if (A.size() != B.size()) throw ShapeError("the qFq Laplace form needs |A| = |B|");
            if (std::abs(psi) > psi_tie) throw SpecViolation("the atom form needs psi = 0");
            break;
        default: throw UsageError("not a Laplace representation");
    }
    IntegralRep r;
    r.kind_ = kind;
    r.target_ = {A, B};
    r.cfg_ = cfg;
    r.measure_ = std::make_shared<const KernelMeasure>(KernelSpec{A, B}, cfg);
    r.kernel_ = exp_kernel;
    r.log_growth_ = [](double w) { return w; };
    if (kind == RepKind::laplace_q_plus_1) r.z_min_ = -1.0;
    return r;
}

IntegralRep make_cosine_rep(const ParamVec& A, const ParamVec& B, RepKind kind, const QuadratureConfig& cfg) {
    if (A.size() + 1 != B.size()) throw ShapeError("the cosine form needs |A| = |B| - 1");
    if (!A.empty()) require_positive(A, "upper parameters A");
    const double psi = B.sum() - A.sum();
    if (kind == RepKind::cosine_psi_gt_half) {
        if (!(psi > 0.5 + psi_tie)) throw SpecViolation("the cosine form needs psi > 1/2");
    } else if (kind == RepKind::cosine_psi_eq_half) {
        if (std::abs(psi - 0.5) > psi_tie) throw SpecViolation("the cosine atom form needs psi = 1/2");
    } else {
        throw UsageError("not a cosine representation");
    }
    IntegralRep r;
    r.kind_ = kind;
    r.target_ = {A, B};
    r.cfg_ = cfg;
    r.measure_ = std::make_shared<const KernelMeasure>(KernelSpec{A.with(0.5), B}, cfg);
    r.kernel_ = cosine_kernel;
    return r;
}

IntegralRep make_small_p_rep(const ParamVec& A, const ParamVec& B, const ParamVec& alphas,
                             const QuadratureConfig& cfg) {
    if (A.size() >= B.size()) throw ShapeError("artificial parameters need p < q");
    if (alphas.size() != B.size() - A.size()) throw ShapeError("need exactly q - p artificial parameters");
    if (!alphas.all_positive()) throw SpecViolation("artificial parameters must be positive");
    if (!A.empty()) require_positive(A, "upper parameters A");
    if (!(B.sum() > A.sum() + alphas.sum())) {
        std::ostringstream msg;
        msg << "convergence needs sum(B) > sum(A) + sum(alphas) (" << B.sum() << " <= " << A.sum() + alphas.sum()
            << ")";
        throw ConvergenceConditionViolated(msg.str());
    }
    IntegralRep r;
    r.kind_ = RepKind::small_p;
    r.target_ = {A, B};
    r.cfg_ = cfg;
    r.measure_ = std::make_shared<const KernelMeasure>(KernelSpec{A.concat(alphas), B}, cfg);
    const HyperSpec kspec{{}, alphas};
    r.kernel_ = [kspec](double y) { return eval_pfq(kspec, -y); };
    const double n = static_cast<double>(alphas.size() + 1);
    r.log_growth_ = [n](double w) { return n * std::pow(w, 1.0 / n); };
    return r;
}

EvalResult stieltjes_rep_eval(double sigma, const ParamVec& A, const ParamVec& B, double z,
                              const QuadratureConfig& cfg) {
    return make_stieltjes_rep(sigma, A, B, cfg)(z);
}

EvalResult general_split_eval(const SplitSpec& split, double z, const QuadratureConfig& cfg) {
    return make_split_rep(split, cfg)(z);
}

EvalResult laplace_rep_eval(const ParamVec& A, const ParamVec& B, double z, RepKind kind,
                            const QuadratureConfig& cfg) {
    return make_laplace_rep(A, B, kind, cfg)(z);
}

EvalResult cosine_rep_eval(const ParamVec& A, const ParamVec& B, double z, RepKind kind,
                           const QuadratureConfig& cfg) {
    return make_cosine_rep(A, B, kind, cfg)(z);
}

EvalResult small_p_rep_eval(const ParamVec& A, const ParamVec& B, const ParamVec& alphas, double z,
                            const QuadratureConfig& cfg) {
    return make_small_p_rep(A, B, alphas, cfg)(z);
}

IntegralRep RepDescriptor::build(const QuadratureConfig& cfg) const {
    switch (kind) {
        case RepKind::stieltjes: return make_stieltjes_rep(sigma, A, B, cfg);
        case RepKind::general_split: return make_split_rep(split, cfg);
        case RepKind::laplace_q_plus_1:
        case RepKind::laplace_q_q:
        case RepKind::laplace_q_q_psi0: return make_laplace_rep(A, B, kind, cfg);
        case RepKind::cosine_psi_gt_half:
        case RepKind::cosine_psi_eq_half: return make_cosine_rep(A, B, kind, cfg);
        case RepKind::small_p: return make_small_p_rep(A, B, alphas, cfg);
    }
    throw UsageError("unknown representation");
}

RepReport rep_vs_series(const RepDescriptor& desc, const std::vector<double>& z_grid, const QuadratureConfig& cfg) {
    RepReport report;
    std::optional<IntegralRep> rep;
    std::string build_error;
    try {
        rep.emplace(desc.build(cfg));
    } catch (const Error& e) {
        build_error = e.what();
    }
    for (double z : z_grid) {
        RepPoint pt;
        pt.z = z;
        if (!rep) {
            pt.error = build_error;
        } else {
            try {
                const auto r = (*rep)(z);
                const auto s = eval_pfq(rep->target(), -z);
                pt.rep = r.value;
                pt.series = s.value;
                pt.budget = r.abs_err + s.abs_err;
                pt.abs_diff = std::abs(r.value - s.value);
                pt.rel_diff = s.value != 0.0 ? pt.abs_diff / std::abs(s.value) : pt.abs_diff;
                report.max_abs = std::max(report.max_abs, pt.abs_diff);
                report.max_rel = std::max(report.max_rel, pt.rel_diff);
                const double ratio = pt.budget > 0.0 ? pt.abs_diff / pt.budget
                                                     : (pt.abs_diff > 0.0 ? std::numeric_limits<double>::infinity()
                                                                          : 0.0);
                report.max_budget_ratio = std::max(report.max_budget_ratio, ratio);
            } catch (const Error& e) {
                pt.error = e.what();
            }
        }
        if (pt.error) ++report.failures;
        report.points.push_back(std::move(pt));
    }
    return report;
}

namespace {

std::vector<double> cosine_alphas(std::size_t m) {
    std::vector<double> out;
    for (std::size_t i = 1; i <= m; ++i) out.push_back(static_cast<double>(i) / static_cast<double>(m + 1));
    return out;
}

}  // namespace

PfqEvaluator::PfqEvaluator(HyperSpec spec, double tol) : spec_(std::move(spec)), tol_(tol) { spec_.validate(); }

void PfqEvaluator::prepare_fallback() const {
    if (fallback_ready_) return;
    fallback_ready_ = true;
    const std::size_t p = spec_.p(), q = spec_.q();
    const double psi = spec_.B.sum() - spec_.A.sum();
    if (!spec_.A.all_positive()) {
        failure_ = "upper parameters must be positive";
        return;
    }
    if (p == q + 1) {
        const double sigma = spec_.A.max();
        const ParamVec rest = spec_.A.without_max();
        if (rest.empty()) {
            closed_sigma_ = sigma;
            method_ = "closed form";
            return;
        }
        if (spec_.B.sum() - rest.sum() < -psi_tie) {
            failure_ = "sum(B) < sum(A) - max(A)";
            return;
        }
        rep_ = make_stieltjes_rep(sigma, rest, spec_.B);
        method_ = "stieltjes";
        return;
    }
    if (p == q) {
        if (psi < -psi_tie) {
            failure_ = "psi < 0";
            return;
        }
        const auto kind = psi > psi_tie ? RepKind::laplace_q_q : RepKind::laplace_q_q_psi0;
        rep_ = make_laplace_rep(spec_.A, spec_.B, kind);
        method_ = to_string(kind);
        return;
    }
    if (p + 1 == q && psi >= 0.5 - psi_tie) {
        const auto kind = psi > 0.5 + psi_tie ? RepKind::cosine_psi_gt_half : RepKind::cosine_psi_eq_half;
        rep_ = make_cosine_rep(spec_.A, spec_.B, kind);
        method_ = to_string(kind);
        return;
    }
    const ParamVec alphas(cosine_alphas(q - p));
    if (!(spec_.B.sum() > spec_.A.sum() + alphas.sum())) {
        failure_ = "sum(B) <= sum(A) + sum(alphas)";
        return;
    }
    rep_ = make_small_p_rep(spec_.A, spec_.B, alphas);
    method_ = "small_p";
}

RobustValue PfqEvaluator::by_representation(double x, const std::string& why) const {
    if (spec_.p() == spec_.q() + 1 && x >= 1.0) throw DomainError("x >= 1 lies on the branch cut of (q+1)Fq");
    prepare_fallback();
    if (!failure_.empty()) throw NonConvergence(why + "; no integral representation applies: " + failure_);
    if (closed_sigma_) return {power_kernel(*closed_sigma_, -x), method_};
    return {(*rep_)(-x), method_};
}

RobustValue PfqEvaluator::operator()(double x) const {
    if (!std::isfinite(x)) throw DomainError("argument must be finite");
    if (std::abs(x) < spec_.radius()) {
        try {
            return {eval_pfq(spec_, x, tol_), "series"};
        } catch (const NonConvergence& e) {
            return by_representation(x, e.what());
        }
    }
    return by_representation(x, "outside the disk of convergence");
}

RobustValue evaluate_pfq(const HyperSpec& spec, double x, double tol) { return PfqEvaluator(spec, tol)(x); }

}  // namespace hyperbound
