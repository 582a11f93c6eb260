#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "json.hpp"
#include "trace_lab.hpp"

namespace trace_lab::cli {

enum class Format { json, csv };

/// One invocation: a subcommand with string parameters, validated in run().
struct CommandRequest {
    std::string command;
    std::map<std::string, std::string> params;
    Format format = Format::json;
    std::string output; // empty: standard output
};

enum ExitCode : int { ok = 0, precondition = 2, non_convergence = 3, identity_failure = 4 };

struct ParamSpec {
    std::string name;
    std::string default_value; // empty with required = true means no default
    std::string help;
    bool required = false;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
};

inline const std::vector<ParamSpec>& common_params() {
    static const std::vector<ParamSpec> p{
        {"tail-tol", "1e-12", "truncation tolerance for shell and lattice sums"},
        {"quad-tol", "1e-8", "absolute quadrature tolerance"},
    };
    return p;
}

namespace detail {

inline std::vector<ParamSpec> law_params(const std::string& default_law) {
    return {{"law", default_law, "gaussian | stable"},
            {"alpha", "1.5", "stable index in (0, 2]"},
            {"sigma", "1", "stable scale"}};
}

inline std::vector<ParamSpec> bs_params(const std::string& real, const std::string& alpha, const std::string& S) {
    return {{"real", real, "real factor: gaussian | stable"},
            {"alpha", alpha, "stable index of the real factor"},
            {"sigma", "1", "stable scale of the real factor"},
            {"t", "1", "time of the real factor"},
            {"S", S, "semistable primes as p:gamma:C:t, comma separated"}};
}

template <class... Vs>
std::vector<ParamSpec> join(Vs&&... vs) {
    std::vector<ParamSpec> out;
    (out.insert(out.end(), vs.begin(), vs.end()), ...);
    return out;
}

} // namespace detail

/// Every subcommand with its parameters and defaults.
inline const std::vector<CommandSpec>& commands() {
    using detail::join;
    using V = std::vector<ParamSpec>;
    static const std::vector<CommandSpec> table{
        {"theta", "Jacobi theta sum", {{"t", "1", "positive time"}}},
        {"theta-integral", "integral of theta(t) - 1 over (0, inf) against pi/3", {{"tol", "1e-6", "identity tolerance"}}},
        {"psf-check", "lattice vs spectral wrapped density on the circle",
         join(detail::law_params("gaussian"),
              V{{"t", "1", "positive time"},
                {"x", "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "points of [0,1), comma separated"},
                {"tol", "1e-10", "identity tolerance"}})},
        {"trace-check", "wrapped density at 0 against the spectral trace",
         join(detail::law_params("gaussian"),
              V{{"t", "1", "positive time"}, {"d", "1", "dimension 1..3"}, {"tol", "1e-10", "identity tolerance"}})},
        {"potential-identity", "integrated trace minus one against the sum of 1/eta",
         join(detail::law_params("stable"), V{{"terms", "1000", "explicit terms"}, {"tol", "1e-3", "identity tolerance"}})},
        {"padic-gamma", "Gel'fand-Graev gamma function",
         {{"p", "2", "prime"}, {"s", "0.5", "real argument"}, {"mode", "both", "closed | shell | both"},
          {"tol", "1e-10", "identity tolerance"}}},
        {"padic-integral", "integrals of exp(-tau |y|^gamma) over Z_p and Q_p",
         {{"p", "2", "prime"}, {"gamma", "1", "index"}, {"tau", "1", "scale"},
          {"reading", "iteration", "iteration | as-displayed weights for the Q_p series"},
          {"tol", "1e-12", "identity tolerance"}}},
        {"padic-density", "semistable density on Q_p",
         {{"p", "2", "prime"}, {"gamma", "1", "index"}, {"C", "1", "constant"}, {"t", "1", "time"},
          {"x", "1", "rational point"}, {"method", "both", "series | shell | both"},
          {"tol", "1e-8", "relative identity tolerance"}}},
        {"padic-mass", "total mass and minimum of the semistable density",
         {{"p", "2", "prime"}, {"gamma", "1", "index"}, {"C", "1", "constant"}, {"t", "1", "time"},
          {"tol", "1e-10", "identity tolerance"}}},
        {"mc-haar", "Monte Carlo Haar sampling of Z_p",
         {{"p", "2", "prime"}, {"depth", "64", "digits"}, {"samples", "1000000", "sample count"},
          {"seed", "1", "generator seed"}, {"gamma", "1", "index of the test integrand"},
          {"tau", "1", "scale of the test integrand"}}},
        {"cauchy-report", "Cauchy summation report",
         {{"convention", "", "paper | consistent", true}}},
        {"idele-norm", "idelic norm",
         {{"idele", "", "idele as JSON {\"inf\": ..., \"p\": \"a/b\"}"}, {"q", "", "nonzero rational, embedded diagonally"}}},
        {"adele-eval", "Bruhat-Schwartz product at an adele point",
         join(detail::bs_params("gaussian", "1.5", ""),
              V{{"point", "{\"inf\": \"0\"}", "adele point as JSON"},
                {"side", "density", "density | transform"},
                {"char-y", "", "optional adele y: also report the character at the point"}})},
        {"rr-check", "idele scaling: mass and Fourier scaling",
         join(detail::bs_params("gaussian", "1.5", ""),
              V{{"idele", "{\"inf\": \"2\", \"2\": \"2\"}", "idele as JSON"},
                {"tol-mass", "1e-9", "mass tolerance"},
                {"tol", "1e-8", "transform tolerance"}})},
        {"adelic-theta", "Poisson summation over Q for the gaussian with S empty",
         {{"t", "1", "time"}, {"lambda", "2", "positive real idele component"},
          {"height", "64", "summation range"}, {"tol", "1e-12", "identity tolerance"}}},
        {"char-sum", "sum of the transform over Q",
         join(detail::bs_params("stable", "1", "2:1:1:1"),
              V{{"mode", "direct", "direct | paper-bound"},
                {"heights", "8,16,32,64,128,256,512", "height schedule"},
                {"A", "1", "numerator for the bound series"},
                {"M", "100", "terms of the bound series"}})},
        {"reproduce-paper", "run every acceptance criterion", {}},
        {"replay", "re-run the request recorded in a report", {{"from-report", "", "report JSON path", true}}},
    };
    return table;
}

inline const CommandSpec* find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

/// One result row: {name, value, error_bound, reference, defect, pass}.
struct Row {
    std::string name;
    Json value;
    std::optional<double> error_bound;
    std::optional<double> reference;
    std::optional<double> defect;
    std::optional<bool> pass;
    std::optional<bool> converged;
};

inline Json row_json(const Row& r) {
    auto opt = [](const auto& o) -> Json { return o ? Json(number_json(double(*o))) : Json(nullptr); };
    Json j{{"name", r.name},
           {"value", r.value},
           {"error_bound", opt(r.error_bound)},
           {"reference", opt(r.reference)},
           {"defect", opt(r.defect)},
           {"pass", r.pass ? Json(*r.pass) : Json(nullptr)}};
    if (r.converged) j["converged"] = *r.converged;
    return j;
}

struct RunResult {
    int exit_code = ok;
    Json report;
};

namespace detail {

class Params {
public:
    Params(const CommandSpec& spec, const std::map<std::string, std::string>& given) {
        for (const auto& [k, v] : given) {
            bool known = false;
            for (const auto& p : spec.params) known = known || p.name == k;
            for (const auto& p : common_params()) known = known || p.name == k;
            require(known, "unknown parameter --" + k + " for " + spec.name);
        }
        auto take = [&](const ParamSpec& p) {
            auto it = given.find(p.name);
            if (it != given.end()) {
                values_[p.name] = it->second;
            } else {
                require(!p.required, "missing required parameter --" + p.name);
                values_[p.name] = p.default_value;
            }
        };
        for (const auto& p : spec.params) take(p);
        for (const auto& p : common_params()) take(p);
    }

    [[nodiscard]] const std::string& str(const std::string& k) const { return values_.at(k); }

    [[nodiscard]] double real(const std::string& k) const { return parse_real(k, str(k)); }

    [[nodiscard]] double positive(const std::string& k) const {
        const double v = real(k);
        require(v > 0.0, "parameter --" + k + " must be positive");
        return v;
    }

    [[nodiscard]] std::int64_t integer(const std::string& k) const {
        const auto& s = str(k);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        require(ec == std::errc() && ptr == s.data() + s.size(), "parameter --" + k + ": '" + s + "' is not an integer");
        return v;
    }

    [[nodiscard]] Prime prime(const std::string& k) const {
        const auto v = integer(k);
        require(v >= 2 && is_prime(static_cast<std::uint64_t>(v)), "parameter --" + k + " must be a prime");
        return Prime(static_cast<std::uint64_t>(v));
    }

    [[nodiscard]] Rational rational(const std::string& k) const {
        try {
            return Rational::parse(str(k));
        } catch (const ParameterError&) {
            throw ParameterError("parameter --" + k + ": '" + str(k) + "' is not a rational");
        }
    }

    [[nodiscard]] std::string choice(const std::string& k, std::initializer_list<const char*> options) const {
        const auto& s = str(k);
        for (const char* o : options)
            if (s == o) return s;
        std::string all;
        for (const char* o : options) all += std::string(all.empty() ? "" : " | ") + o;
        throw ParameterError("parameter --" + k + " must be one of: " + all);
    }

    [[nodiscard]] std::vector<double> reals(const std::string& k) const {
        std::vector<double> out;
        std::stringstream ss(str(k));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_real(k, item));
        require(!out.empty(), "parameter --" + k + " must list at least one value");
        return out;
    }

    [[nodiscard]] std::vector<std::int64_t> integers(const std::string& k) const {
        std::vector<std::int64_t> out;
        for (double v : reals(k)) {
            require(v == std::floor(v) && std::abs(v) < 9e15, "parameter --" + k + " must list integers");
            out.push_back(static_cast<std::int64_t>(v));
        }
        return out;
    }

    [[nodiscard]] Json json(const std::string& k) const {
        try {
            return Json::parse(str(k));
        } catch (const Json::exception& e) {
            throw ParameterError("parameter --" + k + ": invalid JSON (" + e.what() + ")");
        }
    }

    [[nodiscard]] ShellSumPlan plan() const {
        ShellSumPlan p;
        p.tail_tolerance = positive("tail-tol");
        return p;
    }

    [[nodiscard]] QuadratureConfig quad() const {
        QuadratureConfig q;
        q.abs_tolerance = positive("quad-tol");
        return q;
    }

    [[nodiscard]] Json echo() const {
        Json j = Json::object();
        for (const auto& [k, v] : values_) j[k] = v;
        return j;
    }

    /// Locale-independent decimal parsing; "a/b" is accepted as well.
    static double parse_real(const std::string& k, const std::string& s) {
        if (s.find('/') != std::string::npos) {
            try {
                return Rational::parse(s).to_double();
            } catch (const ParameterError&) {
            }
        }
        double v = 0.0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        if (b != e && *b == '+') ++b;
        auto [ptr, ec] = std::from_chars(b, e, v);
        require(ec == std::errc() && ptr == e && std::isfinite(v), "parameter --" + k + ": '" + s + "' is not a number");
        return v;
    }

private:
    std::map<std::string, std::string> values_;
};

inline LatticeLawSpec lattice_law(const Params& p, int d = 1) {
    const auto law = p.choice("law", {"gaussian", "stable"});
    if (law == "gaussian") return LatticeLawSpec::gaussian(d);
    return LatticeLawSpec::stable(p.real("alpha"), p.real("sigma"), d);
}

inline BruhatSchwartzSpec bs_spec(const Params& p) {
    BruhatSchwartzSpec spec;
    const auto real = p.choice("real", {"gaussian", "stable"});
    spec.real = real == "gaussian" ? RealFactor::gaussian(p.positive("t"))
                                   : RealFactor::stable(p.real("alpha"), p.real("sigma"), p.positive("t"));
    std::stringstream ss(p.str("S"));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream is(item);
        std::string part;
        while (std::getline(is, part, ':')) parts.push_back(part);
        require(parts.size() == 4, "parameter --S: entries must read p:gamma:C:t");
        std::int64_t prime = 0;
        auto [ptr, ec] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), prime);
        require(ec == std::errc() && ptr == parts[0].data() + parts[0].size() && prime >= 2 &&
                    is_prime(static_cast<std::uint64_t>(prime)),
                "parameter --S: '" + parts[0] + "' is not a prime");
        spec.S[static_cast<std::uint64_t>(prime)] = {Params::parse_real("S", parts[1]), Params::parse_real("S", parts[2]),
                                                     Params::parse_real("S", parts[3])};
    }
    spec.validate();
    return spec;
}

inline Row value_row(std::string name, const EvalResult& r) {
    Row row;
    row.name = std::move(name);
    row.value = number_json(r.value);
    row.error_bound = r.error_bound;
    row.converged = r.converged;
    return row;
}

/// Pass iff |value - reference| <= error_bound + tol.
inline Row compare_row(std::string name, double value, double reference, double error_bound, double tol,
                       std::optional<bool> converged = {}) {
    Row row;
    row.name = std::move(name);
    row.value = number_json(value);
    row.reference = reference;
    row.error_bound = error_bound;
    row.defect = std::abs(value - reference);
    row.pass = *row.defect <= error_bound + tol;
    row.converged = converged;
    return row;
}

inline Row flag_row(std::string name, bool value) {
    Row row;
    row.name = std::move(name);
    row.value = value;
    return row;
}

struct Output {
    std::vector<Row> rows;
    Json extra = Json::object();
    std::vector<std::string> notes;
};

inline Output cmd_theta(const Params& p) {
    Output o;
    o.rows.push_back(value_row("theta", theta(p.positive("t"), p.plan())));
    return o;
}

inline Output cmd_theta_integral(const Params& p) {
    Output o;
    const auto r = theta_potential_integral(p.quad());
    Row total = compare_row("integral", r.total.value, r.reference, r.total.error_bound, p.positive("tol"),
                            r.total.converged);
    o.rows.push_back(total);
    o.rows.push_back(compare_row("upper_part", r.upper_part.value, r.upper_part_termwise, r.upper_part.error_bound,
                                 p.positive("tol"), r.upper_part.converged));
    return o;
}

inline Output cmd_psf_check(const Params& p) {
    Output o;
    const auto law = lattice_law(p);
    const double t = p.positive("t");
    for (double x : p.reals("x")) {
        require(x >= 0.0 && x < 1.0, "parameter --x: points must lie in [0, 1)");
        const auto lat = wrapped_density(law, t, x, WrapMode::lattice, p.plan(), p.quad());
        const auto spe = wrapped_density(law, t, x, WrapMode::spectral, p.plan());
        Row row = compare_row("x=" + Json(x).dump(), lat.value, spe.value, lat.error_bound + spe.error_bound,
                              p.positive("tol"), lat.converged && spe.converged);
        o.rows.push_back(row);
    }
    return o;
}

inline Output cmd_trace_check(const Params& p) {
    Output o;
    const auto d = p.integer("d");
    require(d >= 1 && d <= 3, "parameter --d must be 1, 2 or 3");
    const auto law = lattice_law(p, static_cast<int>(d));
    const auto r = trace_defect(law, p.positive("t"), p.plan(), p.quad());
    o.rows.push_back(value_row("lattice", r.lattice));
    o.rows.push_back(value_row("spectral", r.spectral));
    o.rows.push_back(compare_row("defect", r.lattice.value, r.spectral.value, r.combined_bound, p.positive("tol"),
                                 r.lattice.converged && r.spectral.converged));
    o.extra["trace_report"] = r;
    return o;
}

inline Output cmd_potential_identity(const Params& p) {
    Output o;
    const auto law = lattice_law(p);
    const auto r = potential_identity(law, p.integer("terms"));
    o.rows.push_back(flag_row("diverged", r.diverged));
    if (r.diverged) {
        o.notes.push_back("sum of 1/eta(n) diverges for alpha <= 1; no value is reported");
        return o;
    }
    o.rows.push_back(compare_row("sum_inverse_symbol", r.value.value, r.reference, r.value.error_bound,
                                 p.positive("tol"), r.value.converged));
    return o;
}

inline Output cmd_padic_gamma(const Params& p) {
    Output o;
    const Prime pr = p.prime("p");
    const double s = p.real("s");
    const auto mode = p.choice("mode", {"closed", "shell", "both"});
    std::optional<double> closed;
    if (mode != "shell") {
        closed = gamma_p_closed(pr, s);
        Row row;
        row.name = "closed";
        row.value = number_json(*closed);
        o.rows.push_back(row);
        if (s != 1.0) {
            const double refl = *closed * gamma_p_closed(pr, 1.0 - s);
            o.rows.push_back(compare_row("reflection", refl, 1.0, 0.0, 1e-14));
        }
    }
    if (mode != "closed") {
        const auto shell = gamma_p_shell(pr, s, p.plan());
        if (closed)
            o.rows.push_back(compare_row("shell_oracle", shell.value, *closed, shell.error_bound, p.positive("tol"),
                                         shell.converged));
        else
            o.rows.push_back(value_row("shell_oracle", shell));
    }
    return o;
}

inline Output cmd_padic_integral(const Params& p) {
    Output o;
    const Prime pr = p.prime("p");
    const double gamma = p.positive("gamma");
    const double tau = p.positive("tau");
    const auto reading = p.choice("reading", {"iteration", "as-displayed"}) == "iteration"
                             ? maxstab::PsiReading::iteration
                             : maxstab::PsiReading::as_displayed;
    auto g = [&](const PAdicNormValue& y) {
        return y.is_zero ? 1.0 : std::exp(-tau * pr.pow(static_cast<double>(y.exponent) * gamma));
    };
    ShellSumPlan plan = p.plan();
    const auto ball = integrate_radial(g, pr, RadialDomain::unit_ball, plan);
    const auto full = integrate_radial(g, pr, RadialDomain::full, plan);
    const auto ball_closed = maxstab::unit_ball(pr, gamma, tau);
    const auto full_closed = maxstab::full(pr, gamma, tau, reading);
    const double tol = p.positive("tol");
    o.rows.push_back(compare_row("unit_ball", ball_closed.value, ball.value, ball.error_bound + ball_closed.error_bound,
                                 tol, ball.converged));
    o.rows.push_back(compare_row("full", full_closed.value, full.value, full.error_bound + full_closed.error_bound, tol,
                                 full.converged));
    if (reading == maxstab::PsiReading::as_displayed)
        o.notes.push_back("as-displayed weights: 1/p + exp(-tau p^gamma) at n = 0 and exp(-tau p^gamma) for n > 0");
    return o;
}

inline Output cmd_padic_density(const Params& p) {
    Output o;
    const SemistableLaw law(p.prime("p"), p.positive("gamma"), p.positive("C"));
    const double t = p.positive("t");
    const Rational x = p.rational("x");
    auto mode = p.choice("method", {"series", "shell", "both"});
    if (x.is_zero()) {
        require(mode != "series", "series expansion needs x != 0");
        if (mode == "both") o.notes.push_back("x = 0: series expansion unavailable, shell value only");
        mode = "shell";
    }
    const auto norm = padic_norm(x, law.p);
    std::optional<EvalResult> series;
    std::optional<EvalResult> shell;
    if (mode != "shell") series = density_series(law, t, norm, p.plan());
    if (mode != "series") shell = density_shell(law, t, norm, p.plan());
    if (series) o.rows.push_back(value_row("series", *series));
    if (shell) o.rows.push_back(value_row("shell", *shell));
    if (series && shell) {
        const double tol = p.positive("tol") * std::abs(shell->value);
        o.rows.push_back(compare_row("series_vs_shell", series->value, shell->value,
                                     series->error_bound + shell->error_bound, tol,
                                     series->converged && shell->converged));
    }
    o.extra["norm_exponent"] = norm.is_zero ? Json(nullptr) : Json(norm.exponent);
    o.notes.push_back("series coefficients: (-1)^n (Ct)^n / n! * Gamma_p(n gamma + 1) |x|^-(n gamma + 1); "
                      "the (Ct)^(n gamma) reading and the real gamma function are not used");
    return o;
}

inline Output cmd_padic_mass(const Params& p) {
    Output o;
    const SemistableLaw law(p.prime("p"), p.positive("gamma"), p.positive("C"));
    const auto m = mass_check(law, p.positive("t"), p.plan());
    o.rows.push_back(compare_row("mass", m.mass.value, 1.0, m.mass.error_bound, p.positive("tol"), m.mass.converged));
    Row minimum;
    minimum.name = "min_density";
    minimum.value = number_json(m.min_density);
    minimum.pass = m.min_density >= 0.0;
    o.rows.push_back(minimum);
    o.extra["min_density_exponent"] = m.min_density_exponent;
    o.extra["shells_scanned"] = m.shells_scanned;
    return o;
}

inline Output cmd_mc_haar(const Params& p) {
    Output o;
    const Prime pr = p.prime("p");
    const auto depth = p.integer("depth");
    const auto samples = p.integer("samples");
    const auto seed = p.integer("seed");
    require(depth >= 1 && depth <= 4096, "parameter --depth must lie in [1, 4096]");
    require(samples >= 1, "parameter --samples must be positive");
    require(seed >= 0, "parameter --seed must be nonnegative");
    const double gamma = p.positive("gamma");
    const double tau = p.positive("tau");
    const auto s = mc_haar_zp(pr, static_cast<int>(depth), samples, static_cast<std::uint64_t>(seed));
    auto g = [&](const PAdicNormValue& y) {
        return y.is_zero ? 1.0 : std::exp(-tau * pr.pow(static_cast<double>(y.exponent) * gamma));
    };
    const auto mc = mc_mean(s, g);
    const double exact = maxstab::unit_ball(pr, gamma, tau).value;
    o.rows.push_back(compare_row("mean", mc.mean, exact, 0.0, 3.0 * mc.std_error));
    const double pu = 1.0 - 1.0 / pr.as_double();
    o.rows.push_back(compare_row("P(|y|=1)", s.shell_frequency(0), pu, 0.0, 3.0 * binomial_std_error(pu, samples)));
    o.extra["std_error"] = mc.std_error;
    Json hist = Json::array();
    for (std::size_t k = 0; k < s.counts.size() && k < 16; ++k) hist.push_back(s.counts[k]);
    o.extra["shell_counts_head"] = hist;
    return o;
}

inline Output cmd_cauchy_report(const Params& p) {
    Output o;
    const auto conv = p.choice("convention", {"paper", "consistent"}) == "paper" ? CauchyConvention::paper
                                                                                  : CauchyConvention::consistent;
    const auto r = cauchy_psf_report(conv);
    Row lat;
    lat.name = "lattice_side";
    lat.value = r.lattice_side;
    o.rows.push_back(lat);
    Row tr;
    tr.name = "transform_side";
    tr.value = r.transform_side;
    o.rows.push_back(tr);
    Row diff;
    diff.name = "difference";
    diff.value = r.difference;
    o.rows.push_back(diff);
    o.rows.push_back(value_row("lattice_sum_computed", EvalResult{r.lattice_sum_computed, r.lattice_error_bound, 0, true}));
    if (conv == CauchyConvention::paper)
        o.notes.push_back("transform side uses exp(-|x|), which is not the transform of 1/(pi(1+x^2)) under the "
                          "exp(-2 pi i x y) kernel; lattice side is the bound (1 + pi^2/3)/pi");
    else
        o.notes.push_back("kernel exp(-2 pi i x y): transform exp(-2 pi |y|), both sides equal coth(pi)");
    return o;
}

inline Output cmd_idele_norm(const Params& p) {
    Output o;
    const bool has_idele = !p.str("idele").empty();
    const bool has_q = !p.str("q").empty();
    require(has_idele != has_q, "give exactly one of --idele or --q");
    Idele a;
    if (has_q) {
        a = Idele::diagonal(p.rational("q"));
    } else {
        from_json(p.json("idele"), a);
    }
    const Rational n = idele_norm(a);
    Row row;
    row.name = "norm";
    row.value = n.str();
    o.rows.push_back(row);
    Row approx;
    approx.name = "norm_decimal";
    approx.value = number_json(n.to_double());
    o.rows.push_back(approx);
    o.extra["idele"] = a;
    return o;
}

inline Output cmd_adele_eval(const Params& p) {
    Output o;
    const auto spec = bs_spec(p);
    AdelePoint x;
    from_json(p.json("point"), x);
    const auto side = p.choice("side", {"density", "transform"}) == "density" ? BsSide::density : BsSide::transform;
    o.rows.push_back(value_row(side == BsSide::density ? "density" : "transform", bs_eval(spec, x, side, p.plan(), p.quad())));
    if (!p.str("char-y").empty()) {
        AdelePoint y;
        from_json(p.json("char-y"), y);
        const auto c = adele_char(y, x);
        Row re;
        re.name = "char_re";
        re.value = number_json(c.re);
        Row im;
        im.name = "char_im";
        im.value = number_json(c.im);
        o.rows.push_back(re);
        o.rows.push_back(im);
    }
    o.extra["point"] = x;
    return o;
}

inline Output cmd_rr_check(const Params& p) {
    Output o;
    const auto spec = bs_spec(p);
    Idele a;
    from_json(p.json("idele"), a);
    const auto rep = scale_by_idele(spec, a, {}, p.plan(), p.quad());
    o.rows.push_back(compare_row("mass", rep.mass.value, 1.0, rep.mass.error_bound, p.positive("tol-mass"),
                                 rep.mass.converged));
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
        o.rows.push_back(compare_row("transform y=" + rep.grid[i].str(), rep.transform_numeric[i].value,
                                     rep.transform_expected[i], rep.transform_numeric[i].error_bound, p.positive("tol"),
                                     rep.transform_numeric[i].converged));
    Row norm;
    norm.name = "idele_norm";
    norm.value = rep.scaled.norm.str();
    o.rows.push_back(norm);
    Json masses = Json::object();
    for (const auto& c : rep.component_masses) masses[c.place] = c.value;
    o.extra["component_masses"] = masses;
    return o;
}

inline Output cmd_adelic_theta(const Params& p) {
    Output o;
    BruhatSchwartzSpec spec;
    spec.real = RealFactor::gaussian(p.positive("t"));
    const auto r = adelic_theta_reduction(spec, p.positive("lambda"), p.integer("height"));
    o.rows.push_back(value_row("left", r.left));
    o.rows.push_back(value_row("right", r.right));
    o.rows.push_back(compare_row("defect", r.left.value, r.right.value, r.left.error_bound + r.right.error_bound,
                                 p.positive("tol"), r.left.converged && r.right.converged));
    return o;
}

inline Output cmd_char_sum(const Params& p) {
    Output o;
    const auto spec = bs_spec(p);
    if (p.choice("mode", {"direct", "paper-bound"}) == "direct") {
        const auto r = rational_char_sum(spec, p.integers("heights"));
        for (std::size_t i = 0; i < r.heights.size(); ++i) {
            Row row;
            row.name = "H=" + std::to_string(r.heights[i]);
            row.value = r.partial_sums[i];
            o.rows.push_back(row);
        }
        Row mono;
        mono.name = "monotone";
        mono.value = r.monotone;
        mono.pass = r.monotone;
        o.rows.push_back(mono);
        Json diffs = Json::array();
        Json ratios = Json::array();
        for (double d : r.differences) diffs.push_back(number_json(d));
        for (double q : r.difference_ratios) ratios.push_back(number_json(q));
        o.extra["heights"] = r.heights;
        o.extra["terms"] = r.terms;
        o.extra["differences"] = diffs;
        o.extra["difference_ratios"] = ratios;
        o.notes.push_back("convergence diagnostic only; the sum is not asserted to diverge");
    } else {
        const auto r = paper_bound_series(spec, p.integer("A"), p.integer("M"));
        Row first;
        first.name = "first_series";
        first.value = r.first_partial.back();
        Row last;
        last.name = "first_series_last_term";
        last.value = r.first_last_term;
        Row second;
        second.name = "second_series";
        second.value = r.second_partial.back();
        o.rows.push_back(first);
        o.rows.push_back(last);
        o.rows.push_back(second);
        o.extra["p0"] = r.p0;
        o.notes.push_back("first: sum_n exp(-sigma t (A/p0^n)^alpha); second: sum_m exp(-C t p0^(m gamma))");
    }
    return o;
}

inline Output cmd_reproduce(const Params&) {
    Output o;
    Json timings = Json::array();
    for (const auto& c : acceptance::run_all()) {
        char id[8];
        std::snprintf(id, sizeof id, "[%02d]", c.id);
        for (const auto& k : c.checks) {
            Row row;
            row.name = std::string(id) + " " + k.name;
            row.value = number_json(k.value);
            row.error_bound = k.error_bound;
            row.reference = k.reference;
            if (k.reference) row.defect = k.defect;
            if (k.gating) row.pass = k.pass;
            o.rows.push_back(row);
        }
        Row verdict;
        verdict.name = std::string(id) + " " + c.title;
        verdict.value = static_cast<std::int64_t>(c.failures());
        verdict.pass = c.pass();
        o.rows.push_back(verdict);
        timings.push_back(Json{{"criterion", c.id}, {"seconds", c.seconds}, {"budget", c.budget_seconds}});
        for (const auto& n : c.notes) o.notes.push_back(std::string(id) + " " + n);
    }
    o.extra["timings"] = timings;
    return o;
}

} // namespace detail

inline RunResult run(const CommandRequest& request);

namespace detail {

inline Output cmd_replay(const Params& p, Json& replayed_from) {
    std::ifstream in(p.str("from-report"));
    require(static_cast<bool>(in), "cannot open report '" + p.str("from-report") + "'");
    Json old;
    try {
        old = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("report is not valid JSON: ") + e.what());
    }
    require(old.contains("command") && old.contains("params") && old.contains("results"),
            "report lacks command, params or results");
    CommandRequest again;
    again.command = old["command"].get<std::string>();
    require(again.command != "replay", "cannot replay a replay report");
    for (const auto& [k, v] : old["params"].items()) again.params[k] = v.get<std::string>();
    const RunResult r = run(again);
    Output o;
    const bool identical = r.report.contains("results") && r.report["results"] == old["results"];
    Row row;
    row.name = "identical_results";
    row.value = identical;
    row.pass = identical;
    o.rows.push_back(row);
    replayed_from = r.report;
    return o;
}

} // namespace detail

/// Dispatches a request; errors become {code, message} reports.
inline RunResult run(const CommandRequest& request) {
    RunResult out;
    auto error = [&](int code, const std::string& msg) {
        out.exit_code = code;
        out.report = Json{{"command", request.command}, {"error", Json{{"code", code}, {"message", msg}}}};
        return out;
    };
    const CommandSpec* spec = find_command(request.command);
    if (spec == nullptr) return error(precondition, "unknown subcommand '" + request.command + "'");
    try {
        const detail::Params params(*spec, request.params);
        detail::Output o;
        Json replayed;
        const auto& c = request.command;
        if (c == "theta") o = detail::cmd_theta(params);
        else if (c == "theta-integral") o = detail::cmd_theta_integral(params);
        else if (c == "psf-check") o = detail::cmd_psf_check(params);
        else if (c == "trace-check") o = detail::cmd_trace_check(params);
        else if (c == "potential-identity") o = detail::cmd_potential_identity(params);
        else if (c == "padic-gamma") o = detail::cmd_padic_gamma(params);
        else if (c == "padic-integral") o = detail::cmd_padic_integral(params);
        else if (c == "padic-density") o = detail::cmd_padic_density(params);
        else if (c == "padic-mass") o = detail::cmd_padic_mass(params);
        else if (c == "mc-haar") o = detail::cmd_mc_haar(params);
        else if (c == "cauchy-report") o = detail::cmd_cauchy_report(params);
        else if (c == "idele-norm") o = detail::cmd_idele_norm(params);
        else if (c == "adele-eval") o = detail::cmd_adele_eval(params);
        else if (c == "rr-check") o = detail::cmd_rr_check(params);
        else if (c == "adelic-theta") o = detail::cmd_adelic_theta(params);
        else if (c == "char-sum") o = detail::cmd_char_sum(params);
        else if (c == "reproduce-paper") o = detail::cmd_reproduce(params);
        else if (c == "replay") o = detail::cmd_replay(params, replayed);

        Json results = Json::array();
        bool failed = false;
        bool unconverged = false;
        for (const auto& r : o.rows) {
            results.push_back(row_json(r));
            failed = failed || (r.pass && !*r.pass);
            unconverged = unconverged || (r.converged && !*r.converged);
        }
        out.report = Json{{"command", request.command}, {"params", params.echo()}, {"results", results}};
        if (!o.extra.empty()) out.report["details"] = o.extra;
        if (!o.notes.empty()) out.report["notes"] = o.notes;
        if (!replayed.is_null()) out.report["replayed"] = replayed;
        out.exit_code = unconverged ? non_convergence : (failed ? identity_failure : ok);
        return out;
    } catch (const ParameterError& e) {
        return error(precondition, e.what());
    } catch (const CapabilityError& e) {
        return error(precondition, e.what());
    } catch (const Json::exception& e) {
        return error(precondition, std::string("malformed JSON input: ") + e.what());
    }
}

namespace detail {

inline std::string csv_field(const Json& v) {
    if (v.is_null()) return "";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    return s;
}

} // namespace detail

/// One row per result: name,value,error_bound,reference,defect,pass.
inline std::string to_csv(const Json& report) {
    std::ostringstream os;
    if (report.contains("error")) {
        os << "code,message\n"
           << report["error"]["code"].dump() << "," << detail::csv_field(report["error"]["message"]) << "\n";
        return os.str();
    }
    os << "name,value,error_bound,reference,defect,pass\n";
    for (const auto& r : report["results"]) {
        os << detail::csv_field(r["name"]) << "," << detail::csv_field(r["value"]) << ","
           << detail::csv_field(r["error_bound"]) << "," << detail::csv_field(r["reference"]) << ","
           << detail::csv_field(r["defect"]) << "," << detail::csv_field(r["pass"]) << "\n";
    }
    return os.str();
}

inline std::string render(const RunResult& r, Format format) {
    return format == Format::csv ? to_csv(r.report) : r.report.dump(2) + "\n";
}

} // namespace trace_lab::cli
