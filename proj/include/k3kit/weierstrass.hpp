#pragma once

#include "k3kit/factor.hpp"
#include "k3kit/fibers.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace k3kit {

/* Valuation marker for an identically zero polynomial. */
inline constexpr long kValInfinity = std::numeric_limits<long>::max();

/* Multiplicity of the irreducible u in f; f nonzero, u nonconstant. */
inline long poly_valuation(const QPoly& f, const QPoly& u) {
    if (poly::is_zero(f)) throw std::invalid_argument("valuation of the zero polynomial");
    if (poly::degree(u) < 1) throw std::invalid_argument("valuation at a constant");
    long v = 0;
    QPoly rem = f;
    for (;;) {
        auto [q, r] = poly::divmod(rem, u);
        if (!poly::is_zero(r)) return v;
        ++v;
        rem = std::move(q);
    }
}

/* The elliptic surface y^2 = x^3 + p(t) x + q(t) over the rational function
   field, with the degree bounds deg p <= 4r, deg q <= 6r. */
struct WeierstrassModel {
    long r = 1;
    QPoly p, q;

    static WeierstrassModel make(long r, QPoly p, QPoly q) {
        if (r < 1) throw std::invalid_argument("family parameter r must be >= 1");
        poly::normalize(p);
        poly::normalize(q);
        if (poly::degree(p) > 4 * r) throw std::invalid_argument("deg p exceeds 4r");
        if (poly::degree(q) > 6 * r) throw std::invalid_argument("deg q exceeds 6r");
        WeierstrassModel w{r, std::move(p), std::move(q)};
        if (poly::is_zero(w.discriminant_raw()))
            throw std::invalid_argument("identically zero discriminant: singular family");
        return w;
    }

    QPoly discriminant_raw() const {
        return poly::add(poly::scale(poly::pow(p, 3), Rat(4)), poly::scale(poly::mul(q, q), Rat(27)));
    }

    /* 4 p^3 + 27 q^2, nonzero by construction. */
    QPoly discriminant() const { return discriminant_raw(); }

    json to_json() const {
        return json{{"r", r}, {"p", poly::to_json(p)}, {"q", poly::to_json(q)}};
    }

    static WeierstrassModel from_json(const json& j) {
        if (!j.contains("r") || !j.contains("p") || !j.contains("q"))
            throw std::invalid_argument("model needs fields r, p, q");
        return make(j.at("r").get<long>(), poly::from_json(j.at("p")), poly::from_json(j.at("q")));
    }
};

// ---------------------------------------------------------------------------
// j-map

struct JMapResult {
    QPoly numerator;   // lowest terms; denominator primitive integer, positive lead
    QPoly denominator;
    long degree = 0;   // max of the two degrees after cancellation
    bool isotrivial = false;

    json to_json() const {
        return json{{"numerator", poly::to_json(numerator)},
                    {"denominator", poly::to_json(denominator)},
                    {"degree", degree},
                    {"isotrivial", isotrivial}};
    }
};

/* The map t -> 4p^3 / (4p^3 + 27q^2) in lowest terms. */
inline JMapResult j_map(const WeierstrassModel& w) {
    QPoly num = poly::scale(poly::pow(w.p, 3), Rat(4));
    QPoly den = w.discriminant();
    if (poly::is_zero(num)) {
        den = QPoly{Rat(1)}; // the zero map in lowest terms
    } else {
        QPoly g = poly::gcd(num, den);
        if (poly::degree(g) > 0) {
            num = poly::divmod(num, g).first;
            den = poly::divmod(den, g).first;
        }
    }
    // Scale so the denominator is a primitive integer polynomial.
    auto [dc, dz] = poly::rational_content(den);
    den = poly::from_integer(dz);
    num = poly::scale(num, Rat(1) / dc);

    JMapResult res;
    res.degree = std::max<long>(std::max(poly::degree(num), 0), std::max(poly::degree(den), 0));
    res.isotrivial = res.degree == 0;
    res.numerator = std::move(num);
    res.denominator = std::move(den);
    if (res.degree > 12 * w.r) throw std::domain_error("j-map degree exceeds 12r");
    return res;
}

// ---------------------------------------------------------------------------
// Per-place analysis

struct PlaceAnalysis {
    std::optional<ZPoly> place;  // nullopt for the place at infinity
    long place_degree = 1;       // number of geometric places this row covers
    long v_p = 0, v_q = 0, v_delta = 0;       // valuations of the given model
    long red_v_p = 0, red_v_q = 0, red_v_delta = 0; // after minimality reduction
    bool minimal = true;
    std::optional<FiberDescriptor> kodaira;  // absent when the reduced fiber is smooth

    json to_json() const {
        auto val = [](long v) { return v == kValInfinity ? json("infinity") : json(v); };
        json j;
        j["place"] = place ? poly::to_string(poly::from_integer(*place)) : "infinity";
        if (place) j["place_coefficients"] = poly::to_json(poly::from_integer(*place));
        j["degree"] = place_degree;
        j["v_p"] = val(v_p);
        j["v_q"] = val(v_q);
        j["v_delta"] = v_delta;
        j["minimal"] = minimal;
        if (!minimal)
            j["reduced"] = json{{"v_p", val(red_v_p)}, {"v_q", val(red_v_q)}, {"v_delta", red_v_delta}};
        j["type"] = kodaira ? json(kodaira->name()) : json(nullptr);
        return j;
    }
};

struct PlacesReport {
    long r = 1;
    std::vector<PlaceAnalysis> places;
    long sum_v_delta = 0;  // weighted by place degree, including infinity
    long sum_chi = 0;      // weighted Euler numbers of the assigned types
    bool model_minimal = true;

    json to_json() const {
        json rows = json::array();
        for (const auto& pl : places) rows.push_back(pl.to_json());
        return json{{"r", r},
                    {"places", rows},
                    {"sum_v_delta", sum_v_delta},
                    {"sum_chi", sum_chi},
                    {"model_minimal", model_minimal}};
    }
};

namespace detail {

/* Kodaira type from the valuation triple of a minimal place.  The reduced
   triple always lands in exactly one row; each assignment is cross-checked
   against chi = v_delta and the component-count relation. */
inline std::optional<FiberDescriptor> type_from_valuations(long vp, long vq, long vd) {
    if (vd == 0) return std::nullopt; // smooth fiber
    std::optional<FiberDescriptor> f;
    if (vp == 0) f = FiberDescriptor::make(KodairaType::In, vd);
    else if (vq == 1) f = FiberDescriptor::make(KodairaType::II);
    else if (vp == 1) f = FiberDescriptor::make(KodairaType::III);
    else if (vq == 2) f = FiberDescriptor::make(KodairaType::IV);
    else if (vd == 6) f = FiberDescriptor::make(KodairaType::I0star);
    else if (vp == 2 && vq == 3) f = FiberDescriptor::make(KodairaType::Instar, vd - 6);
    else if (vq == 4) f = FiberDescriptor::make(KodairaType::IVstar);
    else if (vp == 3) f = FiberDescriptor::make(KodairaType::IIIstar);
    else if (vq == 5) f = FiberDescriptor::make(KodairaType::IIstar);
    else throw std::domain_error("valuation triple outside the reduced table");
    if (f->euler() != vd) throw std::domain_error("type table inconsistency: chi != v_delta");
    long gap = f->euler() - f->rank_r();
    if (gap != (f->is_multiplicative() ? 1 : 2))
        throw std::domain_error("type table inconsistency: chi - r relation");
    return f;
}

inline PlaceAnalysis analyze_triple(std::optional<ZPoly> place, long place_degree, long vp, long vq,
                                    long vd) {
    PlaceAnalysis a;
    a.place = std::move(place);
    a.place_degree = place_degree;
    a.v_p = vp;
    a.v_q = vq;
    a.v_delta = vd;
    while ((vp == kValInfinity || vp >= 4) && (vq == kValInfinity || vq >= 6)) {
        if (vp != kValInfinity) vp -= 4;
        if (vq != kValInfinity) vq -= 6;
        vd -= 12;
        a.minimal = false;
    }
    a.red_v_p = vp;
    a.red_v_q = vq;
    a.red_v_delta = vd;
    a.kodaira = type_from_valuations(vp == kValInfinity ? 1000000 : vp,
                                     vq == kValInfinity ? 1000000 : vq, vd);
    return a;
}

} // namespace detail

/* Factors the discriminant and assigns a Kodaira type at every place with
   positive discriminant valuation, the place at infinity included.  A row
   with degree e stands for the e geometric places of that irreducible
   factor; conjugate places share one valuation triple. */
inline PlacesReport analyze_places(const WeierstrassModel& w, unsigned long long seed = 0) {
    PlacesReport rep;
    rep.r = w.r;
    QPoly delta = w.discriminant();

    auto fact = factor::factor_rational(delta, seed);
    for (const auto& [u, mult] : fact.factors) {
        QPoly uq = poly::from_integer(u);
        long vp = poly::is_zero(w.p) ? kValInfinity : poly_valuation(w.p, uq);
        long vq = poly::is_zero(w.q) ? kValInfinity : poly_valuation(w.q, uq);
        rep.places.push_back(detail::analyze_triple(u, poly::degree(uq), vp, vq, mult));
    }

    // Place at infinity via the weighted reversal p*(s) = s^{4r} p(1/s).
    long vp_inf = poly::is_zero(w.p) ? kValInfinity : 4 * w.r - poly::degree(w.p);
    long vq_inf = poly::is_zero(w.q) ? kValInfinity : 6 * w.r - poly::degree(w.q);
    long vd_inf = 12 * w.r - poly::degree(delta);
    if (vd_inf > 0 || ((vp_inf == kValInfinity || vp_inf >= 4) && vq_inf >= 6))
        rep.places.push_back(detail::analyze_triple(std::nullopt, 1, vp_inf, vq_inf, vd_inf));

    for (const auto& a : rep.places) {
        rep.sum_v_delta += a.place_degree * a.v_delta;
        if (a.kodaira) rep.sum_chi += a.place_degree * a.kodaira->euler();
        if (!a.minimal) rep.model_minimal = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Monodromy index bound

struct IndexBoundReport {
    bool applicable = false;  // false for isotrivial families
    long deg_j = 0;
    long two_deg_j = 0;
    long twenty_four_r = 0;
    std::optional<Int> claimed_index;
    std::optional<bool> pass;

    json to_json() const {
        json j{{"applicable", applicable},
               {"deg_j", deg_j},
               {"two_deg_j", two_deg_j},
               {"bound_24r", twenty_four_r}};
        if (claimed_index) j["claimed_index"] = int_to_json(*claimed_index);
        if (pass) j["pass"] = *pass;
        return j;
    }
};

/* Bounds on the index of the monodromy group: twice the j-map degree, and
   24r.  A claimed index passes when it respects both. */
inline IndexBoundReport index_bound(const WeierstrassModel& w, std::optional<Int> claimed = {}) {
    IndexBoundReport rep;
    auto j = j_map(w);
    rep.deg_j = j.degree;
    rep.two_deg_j = 2 * j.degree;
    rep.twenty_four_r = 24 * w.r;
    rep.applicable = !j.isotrivial;
    if (claimed) {
        rep.claimed_index = claimed;
        if (rep.applicable)
            rep.pass = *claimed <= rep.two_deg_j && *claimed <= rep.twenty_four_r;
    }
    return rep;
}

} // namespace k3kit
