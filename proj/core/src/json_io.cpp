#include "tropkp/json_io.hpp"

#include "tropkp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tropkp {
namespace {

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string path_index(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

}  // namespace

Complex parse_complex(std::string_view raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text.push_back(ch);
  }
  auto fail = [&]() -> Complex { throw ValidationError("", "not a complex number: '" + std::string(raw) + "'"); };
  if (text.empty()) return fail();
  const char last = text.back();
  if (last != 'i' && last != 'j') {
    double re = 0;
    if (!parse_double(text, re)) return fail();
    return {re, 0.0};
  }
  text.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = text.size(); k-- > 1;) {
    if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re_part = split == std::string::npos ? "" : text.substr(0, split);
  std::string im_part = split == std::string::npos ? text : text.substr(split);
  double re = 0, im = 0;
  if (!re_part.empty() && !parse_double(re_part, re)) return fail();
  if (im_part.empty() || im_part == "+") {
    im = 1;
  } else if (im_part == "-") {
    im = -1;
  } else if (!parse_double(im_part, im)) {
    return fail();
  }
  return {re, im};
}

Complex complex_from_json(const nlohmann::json& value, const std::string& where) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_string()) {
    try {
      return parse_complex(value.get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(where, e.what());
    }
  }
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  throw ValidationError(where, "expected a complex number (number, string or [re, im])");
}

std::optional<Complex> projective_from_json(const nlohmann::json& value, const std::string& where) {
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "inf" || s == "infinity") return std::nullopt;
  }
  return complex_from_json(value, where);
}

ComplexVector complex_vector_from_json(const nlohmann::json& value, const std::string& where) {
  if (!value.is_array()) throw ValidationError(where, "expected an array");
  ComplexVector out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) out(static_cast<Eigen::Index>(i)) = complex_from_json(value[i], path_index(where, i));
  return out;
}

ComplexMatrix complex_matrix_from_json(const nlohmann::json& value, const std::string& where) {
  if (!value.is_array()) throw ValidationError(where, "expected an array of rows");
  const std::size_t rows = value.size();
  std::size_t cols = 0;
  if (rows > 0) {
    if (!value[0].is_array()) throw ValidationError(path_index(where, 0), "expected a row array");
    cols = value[0].size();
  }
  ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = value[i];
    if (!row.is_array() || row.size() != cols) throw ValidationError(path_index(where, i), "ragged matrix row");
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          complex_from_json(row[j], path_index(path_index(where, i), j));
    }
  }
  return out;
}

RationalVector rational_vector_from_json(const nlohmann::json& value, const std::string& where) {
  if (!value.is_array()) throw ValidationError(where, "expected an array");
  RationalVector out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const auto& v = value[i];
    try {
      if (v.is_number_integer()) {
        out.emplace_back(std::to_string(v.get<long long>()));
      } else if (v.is_string()) {
        out.push_back(parse_rational(v.get<std::string>()));
      } else if (v.is_number()) {
        out.push_back(parse_rational(v.dump()));
      } else {
        throw ValidationError("", "expected a rational number");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(path_index(where, i), e.what());
    }
  }
  return out;
}

nlohmann::json to_json(Complex value) { return nlohmann::json::array({value.real(), value.imag()}); }

nlohmann::json to_json(const ComplexVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

nlohmann::json to_json(const ComplexMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace tropkp
