#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "adele.hpp"
#include "lattice.hpp"
#include "rational.hpp"
#include "summation.hpp"

namespace trace_lab {

using Json = nlohmann::ordered_json;

/// Non-finite doubles become strings ("inf", "-inf", "nan") so reports stay valid JSON.
inline Json number_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v == 0.0 ? 0.0 : v;
}

inline double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
}

inline void to_json(Json& j, const Rational& r) { j = r.str(); }
inline void from_json(const Json& j, Rational& r) {
    if (j.is_number_integer()) {
        r = Rational(j.get<long long>());
        return;
    }
    if (j.is_number_float()) {
        r = Rational::from_double(j.get<double>());
        return;
    }
    r = Rational::parse(j.get<std::string>());
}

inline void to_json(Json& j, const EvalResult& r) {
    j = Json{{"value", number_json(r.value)},
             {"error_bound", number_json(r.error_bound)},
             {"terms_used", r.terms_used},
             {"converged", r.converged}};
}
inline void from_json(const Json& j, EvalResult& r) {
    r.value = number_from_json(j.at("value"));
    r.error_bound = number_from_json(j.at("error_bound"));
    r.terms_used = j.at("terms_used").get<std::int64_t>();
    r.converged = j.at("converged").get<bool>();
}

inline void to_json(Json& j, const TraceReport& r) {
    j = Json{{"t", r.t},
             {"lattice", r.lattice},
             {"spectral", r.spectral},
             {"defect", number_json(r.defect)},
             {"tolerances", Json{{"lattice_error_bound", number_json(r.lattice.error_bound)},
                                 {"spectral_error_bound", number_json(r.spectral.error_bound)},
                                 {"combined", number_json(r.combined_bound)}}}};
}

namespace detail {

template <class Point>
Json places_to_json(const Point& x, const Rational& default_fill) {
    Json j = Json::object();
    j["inf"] = x.real.str();
    for (const auto& [p, v] : x.finite) j[std::to_string(p)] = v.str();
    if (x.fill != default_fill) j["fill"] = x.fill.str();
    return j;
}

template <class Point>
Point places_from_json(const Json& j, const Rational& default_fill) {
    require(j.is_object(), "expected an object of places");
    Rational real = default_fill == Rational(0) ? Rational(0) : Rational(1);
    std::map<std::uint64_t, Rational> finite;
    Rational fill = default_fill;
    for (const auto& [key, value] : j.items()) {
        Rational v;
        from_json(value, v);
        if (key == "inf") {
            real = v;
        } else if (key == "fill") {
            fill = v;
        } else {
            require(!key.empty() && key.find_first_not_of("0123456789") == std::string::npos,
                    "place '" + key + "' is neither 'inf' nor a prime");
            finite[std::stoull(key)] = v;
        }
    }
    return Point(real, finite, fill);
}

} // namespace detail

inline void to_json(Json& j, const AdelePoint& x) { j = detail::places_to_json(x, Rational(0)); }
inline void from_json(const Json& j, AdelePoint& x) { x = detail::places_from_json<AdelePoint>(j, Rational(0)); }
inline void to_json(Json& j, const Idele& a) { j = detail::places_to_json(a, Rational(1)); }
inline void from_json(const Json& j, Idele& a) { a = detail::places_from_json<Idele>(j, Rational(1)); }

} // namespace trace_lab
