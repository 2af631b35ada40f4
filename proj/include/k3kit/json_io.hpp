#pragma once

#include "k3kit/numeric.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace k3kit {

using json = nlohmann::json;

/* Integers are emitted as JSON numbers while exactly representable in a
   double (|x| <= 2^53) and as decimal strings beyond that. */
inline json int_to_json(const Int& v) {
    static const Int kSafe = Int(1) << 53;
    if (abs_int(v) <= kSafe) return json(static_cast<std::int64_t>(v));
    return json(v.str());
}

inline Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_string()) return Int(j.get<std::string>());
    throw std::invalid_argument("expected integer or decimal string");
}

/* Exact rationals travel as "num/den" strings (integers when den = 1). */
inline json rat_to_json(const Rat& r) {
    if (rat_den(r) == 1) return int_to_json(rat_num(r));
    return json(rat_num(r).str() + "/" + rat_den(r).str());
}

inline Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
    if (!j.is_string()) throw std::invalid_argument("expected rational as integer or string");
    std::string s = j.get<std::string>();
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rat(num, den);
}

inline json vector_to_json(const std::vector<Int>& v) {
    json arr = json::array();
    for (const auto& x : v) arr.push_back(int_to_json(x));
    return arr;
}

inline std::vector<Int> vector_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected array of integers");
    std::vector<Int> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(int_from_json(x));
    return out;
}

inline json matrix_to_json(const std::vector<std::vector<Int>>& m) {
    json arr = json::array();
    for (const auto& row : m) arr.push_back(vector_to_json(row));
    return arr;
}

inline std::vector<std::vector<Int>> matrix_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected array of rows");
    std::vector<std::vector<Int>> out;
    out.reserve(j.size());
    for (const auto& row : j) out.push_back(vector_from_json(row));
    return out;
}

} // namespace k3kit
