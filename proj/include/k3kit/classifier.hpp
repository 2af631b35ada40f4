#pragma once

#include "k3kit/local.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace k3kit {

enum class DensityStatus { PotentiallyDense, Unknown, UnknownExceptionalCandidate };

inline const char* density_status_name(DensityStatus s) {
    switch (s) {
        case DensityStatus::PotentiallyDense: return "potentially_dense";
        case DensityStatus::Unknown: return "unknown";
        default: return "unknown_exceptional_candidate";
    }
}

struct DensityVerdict {
    DensityStatus status = DensityStatus::Unknown;
    std::string rule_id;           // R1..R7, or "none"
    std::vector<json> evidence;    // rank data and representation results
    std::string citation;          // the mathematical statement behind the rule
    long search_bound = 0;
    bool unknown_within_bound = false; // some bounded search was inconclusive

    json to_json() const {
        return json{{"status", density_status_name(status)},
                    {"rule_id", rule_id},
                    {"citation", citation},
                    {"evidence", evidence},
                    {"search_bound", search_bound},
                    {"unknown_within_bound", unknown_within_bound}};
    }
};

namespace detail {

inline json lattice_evidence(const GramLattice& L) {
    auto sig = L.signature();
    return json{{"kind", "lattice"},
                {"rank", L.rank()},
                {"determinant", int_to_json(L.determinant())},
                {"signature", json::array({sig.n_plus, sig.n_minus})}};
}

inline json rep_evidence(const char* label, const RepresentationResult& r) {
    json j = r.to_json();
    j["kind"] = label;
    return j;
}

inline std::vector<Int> primitive_of(std::vector<Int> v) {
    Int c = vector_content(v);
    if (c > 1)
        for (auto& x : v) x /= c;
    return v;
}

} // namespace detail

/* Density verdict for an even indefinite (or rank-one) lattice, by the
   first matching rule: R1 rank 1; R2 isotropic witness; R3 no square-0 and
   no square minus two classes; R4 rank 2 without square minus two classes; R5 rank >= 5;
   R6 rank 20; R7 rank 3 or 4 with a square minus two class and no isotropic
   witness.  The rules built on automorphism groups of surfaces (R3, R4, R6,
   R7) fire only for the hyperbolic signature (1, rank-1); R2 and R5 are
   signature-free.  Definite lattices of rank >= 2 and lattices without a
   positive direction are rejected. */
inline DensityVerdict classify(const GramLattice& L, long search_bound) {
    if (search_bound < 1) throw std::invalid_argument("search bound must be >= 1");
    if (!L.is_even()) throw std::invalid_argument("lattice is not even");
    if (L.determinant() == 0) throw std::invalid_argument("lattice is degenerate");
    auto sig = L.signature();
    if (sig.n_plus < 1)
        throw std::invalid_argument("no positive square direction: not a Picard-type lattice");
    if (L.rank() >= 2 && sig.n_minus < 1)
        throw std::invalid_argument("positive definite of rank >= 2: not a Picard-type lattice");
    bool hyperbolic = L.is_hyperbolic();

    DensityVerdict v;
    v.search_bound = search_bound;
    v.evidence.push_back(detail::lattice_evidence(L));
    long rank = L.rank();

    if (rank == 1) {
        v.status = DensityStatus::Unknown;
        v.rule_id = "R1";
        v.citation =
            "a rank-one lattice has no nonzero isotropic class and offers no automorphism "
            "certificate; the verdict stays open";
        return v;
    }

    RepresentationResult rep0 = represents(L, 0, search_bound);
    if (rep0.status == RepStatus::Witness) {
        rep0.witness = detail::primitive_of(std::move(rep0.witness));
        v.status = DensityStatus::PotentiallyDense;
        v.rule_id = "R2";
        v.citation =
            "a primitive class of square zero supports an elliptic fibration, and fiberwise "
            "translations spread rational points over the surface";
        v.evidence.push_back(detail::rep_evidence("isotropic_witness", rep0));
        return v;
    }

    RepresentationResult rep_m2 = represents(L, -2, search_bound);
    bool no_zero = rep0.status == RepStatus::LocallyObstructed;
    bool no_m2 = rep_m2.status == RepStatus::LocallyObstructed;

    if (hyperbolic && rank >= 2 && no_zero && no_m2) {
        v.status = DensityStatus::PotentiallyDense;
        v.rule_id = "R3";
        v.citation =
            "a hyperbolic lattice representing neither 0 nor -2 is the Picard lattice of a "
            "surface with infinite automorphism group, which moves an ample class densely";
        v.evidence.push_back(detail::rep_evidence("square_zero_excluded", rep0));
        v.evidence.push_back(detail::rep_evidence("square_minus_two_excluded", rep_m2));
        return v;
    }

    if (hyperbolic && rank == 2 && no_m2) {
        v.status = DensityStatus::PotentiallyDense;
        v.rule_id = "R4";
        v.citation =
            "a rank-two hyperbolic lattice without square minus two classes forces an elliptic "
            "fibration or an infinite automorphism group, either of which gives density";
        v.evidence.push_back(detail::rep_evidence("square_minus_two_excluded", rep_m2));
        v.evidence.push_back(detail::rep_evidence("square_zero_search", rep0));
        return v;
    }

    if (rank >= 5) {
        v.status = DensityStatus::PotentiallyDense;
        v.rule_id = "R5";
        v.citation =
            "an indefinite form in five or more variables represents zero, so an isotropic "
            "class exists and an elliptic fibration follows";
        v.evidence.push_back(detail::rep_evidence("square_zero_search", rep0));
        v.unknown_within_bound = rep0.status == RepStatus::UnknownWithinBound;
        return v;
    }

    if (hyperbolic && rank == 20) {
        v.status = DensityStatus::PotentiallyDense;
        v.rule_id = "R6";
        v.citation = "lattices of rank twenty carry infinite automorphism groups";
        v.evidence.push_back(detail::rep_evidence("square_zero_search", rep0));
        return v;
    }

    if (hyperbolic && (rank == 3 || rank == 4) && rep_m2.status == RepStatus::Witness) {
        v.status = DensityStatus::UnknownExceptionalCandidate;
        v.rule_id = "R7";
        v.citation =
            "rank three or four with a square minus two class and no isotropic class found: the "
            "lattice may have finite automorphism group and no elliptic fibration, one of "
            "finitely many exceptional types; undecided";
        rep_m2.witness = detail::primitive_of(std::move(rep_m2.witness));
        v.evidence.push_back(detail::rep_evidence("square_minus_two_witness", rep_m2));
        v.evidence.push_back(detail::rep_evidence("square_zero_search", rep0));
        v.unknown_within_bound = rep0.status == RepStatus::UnknownWithinBound;
        return v;
    }

    v.status = DensityStatus::Unknown;
    v.rule_id = "none";
    v.citation = "no decision rule matched within the search bound";
    v.evidence.push_back(detail::rep_evidence("square_zero_search", rep0));
    v.evidence.push_back(detail::rep_evidence("square_minus_two_search", rep_m2));
    v.unknown_within_bound = rep0.status == RepStatus::UnknownWithinBound ||
                             rep_m2.status == RepStatus::UnknownWithinBound;
    return v;
}

/* Reruns classify with doubled bounds until the verdict leaves the open
   states or the rounds run out. */
inline DensityVerdict classify_with_escalation(const GramLattice& L, long search_bound,
                                               int max_rounds = 4) {
    DensityVerdict v = classify(L, search_bound);
    long bound = search_bound;
    for (int round = 1; round < max_rounds; ++round) {
        if (!v.unknown_within_bound) break;
        bound *= 2;
        v = classify(L, bound);
    }
    return v;
}

inline std::string explain(const DensityVerdict& v) {
    std::ostringstream out;
    out << "verdict: " << density_status_name(v.status) << " (rule " << v.rule_id << ")\n";
    out << "basis: " << v.citation << "\n";
    for (const auto& e : v.evidence) {
        out << "  - ";
        if (e.contains("kind")) out << e.at("kind").get<std::string>() << ": ";
        if (e.at("kind") == "lattice") {
            out << "rank " << e.at("rank") << ", determinant " << e.at("determinant")
                << ", signature " << e.at("signature").dump();
        } else {
            out << "status " << e.at("status").get<std::string>();
            if (e.contains("witness")) out << ", witness " << e.at("witness").dump();
            if (e.contains("obstruction")) out << ", obstruction at " << e.at("obstruction").dump();
            if (e.contains("search_bound")) out << ", bound " << e.at("search_bound");
        }
        out << "\n";
    }
    if (v.status != DensityStatus::PotentiallyDense) {
        if (v.unknown_within_bound)
            out << "hint: a bounded search was inconclusive; raise the search bound beyond "
                << v.search_bound << " or escalate with doubled bounds\n";
        else if (v.status == DensityStatus::UnknownExceptionalCandidate)
            out << "hint: deciding this candidate needs the classification of lattices with "
                   "finite automorphism group, which is outside this tool\n";
        else
            out << "hint: no further certificate is available at rank "
                << (v.evidence.empty() ? json(0) : v.evidence.front().at("rank")) << "\n";
    }
    return out.str();
}

} // namespace k3kit
