#include "confcoh/rational.hpp"

#include <cctype>

namespace confcoh {

std::optional<Rational> parse_rational(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) return std::nullopt;
  // mpq_set_str accepts hex-ish forms and leading junk less strictly than we
  // want; pre-screen to sign digits [ / digits ].
  auto all_digits = [](const std::string& t, size_t from, size_t to) {
    if (from >= to) return false;
    for (size_t p = from; p < to; ++p)
      if (!std::isdigit(static_cast<unsigned char>(t[p]))) return false;
    return true;
  };
  size_t slash = s.find('/');
  size_t num_begin = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (slash == std::string::npos) {
    if (!all_digits(s, num_begin, s.size())) return std::nullopt;
  } else {
    if (!all_digits(s, num_begin, slash)) return std::nullopt;
    if (!all_digits(s, slash + 1, s.size())) return std::nullopt;
  }
  Rational value;
  if (mpq_set_str(value.get_mpq_t(), s.c_str(), 10) != 0) return std::nullopt;
  if (mpz_sgn(mpq_denref(value.get_mpq_t())) == 0) return std::nullopt;
  value.canonicalize();
  return value;
}

std::string rational_to_string(const Rational& value) {
  return value.get_str();
}

}  // namespace confcoh
