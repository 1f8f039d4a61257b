#pragma once

#include "tropkp/rational.hpp"
#include "tropkp/riemann_theta.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace tropkp {

// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i" (j is accepted for i).
Complex parse_complex(std::string_view text);

// Number, string as above, or [re, im]. `where` is the JSON path used in
// error messages.
Complex complex_from_json(const nlohmann::json& value, const std::string& where);
// As above, but "inf" / "infinity" yield nullopt (the point at infinity).
std::optional<Complex> projective_from_json(const nlohmann::json& value, const std::string& where);

ComplexVector complex_vector_from_json(const nlohmann::json& value, const std::string& where);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& value, const std::string& where);
RationalVector rational_vector_from_json(const nlohmann::json& value, const std::string& where);

nlohmann::json to_json(Complex value);  // [re, im]
nlohmann::json to_json(const ComplexVector& v);
nlohmann::json to_json(const ComplexMatrix& m);

// Reads and parses a JSON file; errors name the path and parse position.
nlohmann::json read_json_file(const std::string& path);

}  // namespace tropkp
