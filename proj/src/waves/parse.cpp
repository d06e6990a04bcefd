#include <cctype>
#include <charconv>

#include "hardy/errors.hpp"
#include "hardy/partial_waves.hpp"

namespace hardy::waves {

namespace {

std::string_view trim(std::string_view s, std::size_t& offset) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
    ++offset;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, std::size_t offset) {
  s = trim(s, offset);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
    ++offset;
  }
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected a number, got '" + std::string(s) + "'", offset);
  return value;
}

bool is_exponent_sign(std::string_view s, std::size_t i) {
  return i >= 2 && (s[i - 1] == 'e' || s[i - 1] == 'E') &&
         (std::isdigit(static_cast<unsigned char>(s[i - 2])) || s[i - 2] == '.');
}

ExpTerm parse_term(std::string_view s, std::size_t offset) {
  s = trim(s, offset);
  ExpTerm term;
  if (const auto star = s.find('*'); star != std::string_view::npos) {
    term.c = parse_number<double>(s.substr(0, star), offset);
    s.remove_prefix(star + 1);
    offset += star + 1;
    s = trim(s, offset);
  }
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ParseError("expected 'exp:p,a' or 'gauss:p,a'", offset);
  const auto head = s.substr(0, colon);
  if (head == "exp") {
    term.q = 1;
  } else if (head == "gauss") {
    term.q = 2;
  } else {
    throw ParseError("unknown profile family '" + std::string(head) + "'", offset);
  }
  const auto body = s.substr(colon + 1);
  const auto comma = body.find(',');
  if (comma == std::string_view::npos)
    throw ParseError("expected ',' in profile parameters", offset + colon + 1 + body.size());
  term.p = parse_number<double>(body.substr(0, comma), offset + colon + 1);
  term.a = parse_number<double>(body.substr(comma + 1), offset + colon + 2 + comma);
  if (term.a < 0.0) throw ParseError("profile decay rate must be >= 0", offset + colon + 2 + comma);
  return term;
}

RadialProfile parse_profile_at(std::string_view text, std::size_t offset) {
  std::vector<ExpTerm> terms;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == '+' && !is_exponent_sign(text, i))) {
      std::size_t local = offset + start;
      const auto piece = trim(text.substr(start, i - start), local);
      if (piece.empty()) throw ParseError("empty profile term", local);
      terms.push_back(parse_term(piece, local));
      start = i + 1;
    }
  }
  return RadialProfile::closed_form(std::move(terms));
}

}  // namespace

RadialProfile parse_profile(std::string_view text) { return parse_profile_at(text, 0); }

std::pair<int, RadialProfile> parse_field_term(std::string_view text) {
  std::size_t offset = 0;
  const auto s = trim(text, offset);
  if (!s.starts_with("k=")) throw ParseError("field term must start with 'k=<int>:'", offset);
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ParseError("expected ':' after channel", offset + s.size());
  const int k = parse_number<int>(s.substr(2, colon - 2), offset + 2);
  if (k == -1) throw ParseError("channel k = -1 is not in the spectrum of sigma.L", offset + 2);
  return {k, parse_profile_at(s.substr(colon + 1), offset + colon + 1)};
}

SpinorField parse_field(std::span<const std::string> terms) {
  SpinorField field;
  for (const auto& t : terms) {
    auto [k, profile] = parse_field_term(t);
    field.add(k, std::move(profile));
  }
  return field;
}

}  // namespace hardy::waves
