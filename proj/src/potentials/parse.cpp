#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hardy/errors.hpp"
#include "hardy/potentials.hpp"

namespace hardy::potentials {

namespace {

struct Token {
  std::string_view text;
  std::size_t offset;
};

std::string_view trim(std::string_view s, std::size_t& offset) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
    ++offset;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_exponent_sign(std::string_view s, std::size_t i) {
  return i >= 2 && (s[i - 1] == 'e' || s[i - 1] == 'E') &&
         (std::isdigit(static_cast<unsigned char>(s[i - 2])) || s[i - 2] == '.') &&
         i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
}

std::vector<Token> split_terms(std::string_view text) {
  std::vector<Token> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == '+' && !is_exponent_sign(text, i))) {
      std::size_t offset = start;
      const auto piece = trim(text.substr(start, i - start), offset);
      if (piece.empty()) throw ParseError("empty term", offset);
      out.push_back({piece, offset});
      start = i + 1;
    }
  }
  return out;
}

double parse_number(std::string_view s, std::size_t offset) {
  std::size_t local = offset;
  s = trim(s, local);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
    ++local;
  }
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw ParseError("expected a number, got '" + std::string(s) + "'", local);
  }
  return value;
}

// Splits "x<sep>y" into two numbers.
std::pair<double, double> parse_two(std::string_view s, char sep, std::size_t offset,
                                    const char* what) {
  const auto pos = s.find(sep);
  if (pos == std::string_view::npos) {
    throw ParseError(std::string("expected '") + sep + "' in " + what, offset + s.size());
  }
  return {parse_number(s.substr(0, pos), offset), parse_number(s.substr(pos + 1), offset + pos + 1)};
}

void require_nonnegative(double v, std::size_t offset, const char* what) {
  if (v < 0.0) {
    throw ParseError(std::string("negative coupling in a weight slot (") + what + ")", offset);
  }
}

PotentialComponent parse_component_at(std::string_view s, std::size_t offset) {
  const auto colon = s.find(':');
  const auto head = s.substr(0, colon);
  if (colon == std::string_view::npos) {
    if (head == "zero") return PotentialComponent(Zero{});
    throw ParseError("unknown component '" + std::string(s) + "'", offset);
  }
  const auto body = s.substr(colon + 1);
  const auto body_offset = offset + colon + 1;
  try {
    if (head == "coulomb") {
      const double nu = parse_number(body, body_offset);
      require_nonnegative(nu, body_offset, "coulomb");
      return PotentialComponent(Coulomb{nu});
    }
    if (head == "power") {
      const auto [a, p] = parse_two(body, ',', body_offset, "power:a,p");
      require_nonnegative(a, body_offset, "power");
      return PotentialComponent(Power{a, p});
    }
    if (head == "table") {
      if (body.empty()) throw ParseError("table needs a path", body_offset);
      auto table = load_table(std::string(body));
      for (double v : *table.value) {
        if (v < 0.0) throw ParseError("negative coupling in a weight slot (table)", body_offset);
      }
      return PotentialComponent(std::move(table));
    }
    if (head == "mshell") {
      const auto at = body.find('@');
      if (at == std::string_view::npos)
        throw ParseError("expected '@' in mshell:c,eps@R", body_offset + body.size());
      const auto [c, eps] = parse_two(body.substr(0, at), ',', body_offset, "mshell:c,eps@R");
      const double radius = parse_number(body.substr(at + 1), body_offset + at + 1);
      require_nonnegative(c, body_offset, "mshell");
      return PotentialComponent(MollifiedShell{c, eps, radius});
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), offset);
  }
  throw ParseError("unknown component '" + std::string(head) + "'", offset);
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

PotentialComponent parse_component(std::string_view text) {
  std::size_t offset = 0;
  return parse_component_at(trim(text, offset), offset);
}

V1Slot parse_v1_slot(std::string_view text) {
  V1Slot slot;
  std::vector<PotentialComponent> terms;
  for (const auto& tok : split_terms(text)) {
    if (tok.text.starts_with("shell:")) {
      const auto body = tok.text.substr(6);
      const auto [a, radius] = parse_two(body, '@', tok.offset + 6, "shell:a@R");
      if (!(a > 0.0)) throw ParseError("shell mass must be positive", tok.offset + 6);
      if (!(radius > 0.0)) throw ParseError("shell radius must be positive", tok.offset + 6);
      slot.shells.push_back({radius, a});
    } else {
      terms.push_back(parse_component_at(tok.text, tok.offset));
    }
  }
  slot.regular = RadialWeight(std::move(terms));
  return slot;
}

RadialWeight parse_weight(std::string_view text) {
  std::vector<PotentialComponent> terms;
  for (const auto& tok : split_terms(text)) {
    if (tok.text.starts_with("shell:")) {
      throw ParseError("shell measures are only allowed in the V1 slot", tok.offset);
    }
    terms.push_back(parse_component_at(tok.text, tok.offset));
  }
  return RadialWeight(std::move(terms));
}

std::string to_string(const PotentialComponent& component) {
  std::string out;
  std::visit(
      [&out](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Zero>) {
          out = "zero";
        } else if constexpr (std::is_same_v<T, Coulomb>) {
          out = "coulomb:";
          append_number(out, k.nu);
        } else if constexpr (std::is_same_v<T, Power>) {
          out = "power:";
          append_number(out, k.a);
          out += ',';
          append_number(out, k.p);
        } else if constexpr (std::is_same_v<T, Table>) {
          out = "table:" + k.source;
        } else {
          out = "mshell:";
          append_number(out, k.c);
          out += ',';
          append_number(out, k.eps);
          out += '@';
          append_number(out, k.radius);
        }
      },
      component.kind());
  return out;
}

std::string to_string(const RadialWeight& weight) {
  if (weight.terms().empty()) return "zero";
  std::string out;
  for (const auto& t : weight.terms()) {
    if (!out.empty()) out += " + ";
    out += to_string(t);
  }
  return out;
}

std::string to_string(const V1Slot& slot) {
  std::string out = slot.regular.terms().empty() && !slot.shells.empty()
                        ? std::string()
                        : to_string(slot.regular);
  for (const auto& s : slot.shells) {
    if (!out.empty()) out += " + ";
    out += "shell:";
    append_number(out, s.mass);
    out += '@';
    append_number(out, s.radius);
  }
  return out;
}

Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open table file '" + path + "'");
  auto r = std::make_shared<std::vector<double>>();
  auto v = std::make_shared<std::vector<double>>();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.front() == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x = 0.0;
    double y = 0.0;
    if (!(fields >> x >> y)) {
      if (r->empty() && line_no == 1) continue;  // header
      throw InputError("table '" + path + "': malformed line " + std::to_string(line_no));
    }
    r->push_back(x);
    v->push_back(y);
  }
  Table t{path, std::move(r), std::move(v)};
  PotentialComponent check{t};  // validates ordering and size
  return t;
}

}  // namespace hardy::potentials
