#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

#include "doctest.h"
#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"
#include "hardy/potentials.hpp"

using namespace hardy;
using namespace hardy::potentials;

namespace {

PotentialPair pair_of(std::string_view v1, std::string_view v2, double c1 = 1.0,
                        double c2 = 1.0) {
  auto slot = parse_v1_slot(v1);
  PotentialPair p;
  p.v1 = std::move(slot.regular);
  p.v1_shells = std::move(slot.shells);
  p.v2 = parse_weight(v2);
  p.c1 = c1;
  p.c2 = c2;
  return p;
}

// Brute-force channel constant for a Coulomb pair with coupling nu1 + nu2,
// using the closed-form integral of (nu/s) s^e.
double coulomb_channel_oracle(double nu, int k) {
  const double e = 2.0 * (k + 1);
  double best = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = std::pow(10.0, -3.0 + 6.0 * i / 2000.0);
    const double integral = k >= 0 ? nu * std::pow(r, e) / e : nu * std::pow(r, e) / (-e);
    best = std::max(best, integral * std::pow(r, -e));
  }
  return best;
}

// Brute-force A+ / A- for unit shell at R plus Coulomb V2 = 1/r.
std::pair<double, double> shell_coulomb_oracle(double R) {
  double plus = 0.0;
  double minus = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double r = R * std::pow(10.0, -2.0 + 4.0 * i / 20000.0);
    plus = std::max(plus, 0.5 + (R <= r ? R * R / (r * r) : 0.0));
    minus = std::max(minus, 0.5 + (r <= R ? r * r / (R * R) : 0.0));
  }
  // The grid contains r = R exactly at i = 10000.
  return {plus, minus};
}

std::vector<PotentialPair> class_a_gallery() {
  return {
      pair_of("coulomb:1", "coulomb:1"),
      pair_of("shell:1@3", "coulomb:1"),
      pair_of("coulomb:0.5 + mshell:1,0.2@2", "coulomb:1"),
      pair_of("mshell:2,0.5@1.5", "coulomb:0.5 + mshell:1,0.3@1"),
      pair_of("coulomb:1 + shell:0.5@2", "power:2,-1"),
      pair_of("zero", "coulomb:0.3"),
  };
}

}  // namespace

TEST_CASE("component evaluation") {
  CHECK(PotentialComponent(Coulomb{2.0})(4.0) == doctest::Approx(0.5));
  CHECK(PotentialComponent(Power{3.0, 2.0})(2.0) == doctest::Approx(12.0));
  CHECK(PotentialComponent(Zero{})(1.0) == 0.0);
  const PotentialComponent ms(MollifiedShell{2.0, 0.5, 1.0});
  CHECK(ms(0.4) == 0.0);
  CHECK(ms(1.6) == 0.0);
  CHECK(ms(1.0) > 0.0);
  // Bump has unit mass, so the mollified shell integrates to c.
  const double mass = numerics::integrate_radial(
                          [&](double r) { return ms(r); }, 0.0,
                          std::numeric_limits<double>::infinity(), numerics::SingularityHint::none,
                          ms.breakpoints())
                          .value;
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(bump(0.0) > 0.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);

  CHECK_THROWS_AS(PotentialComponent(MollifiedShell{1.0, 0.0, 1.0}), InputError);
  CHECK_THROWS_AS(PotentialComponent(MollifiedShell{1.0, 2.0, 1.0}), InputError);
}

TEST_CASE("parse examples") {
  const auto c = parse_component("coulomb:1");
  REQUIRE(std::holds_alternative<Coulomb>(c.kind()));
  CHECK(std::get<Coulomb>(c.kind()).nu == 1.0);

  const auto slot = parse_v1_slot("shell:1@2 + coulomb:0.5");
  REQUIRE(slot.shells.size() == 1);
  CHECK(slot.shells[0].mass == 1.0);
  CHECK(slot.shells[0].radius == 2.0);
  REQUIRE(slot.regular.terms().size() == 1);
  CHECK(slot.regular(2.0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(parse_weight("power:-1,2"), ParseError);
  CHECK_THROWS_AS(parse_weight("coulomb:-1"), ParseError);
  CHECK_THROWS_AS(parse_weight("shell:1@2"), ParseError);
  CHECK_THROWS_AS(parse_v1_slot("shell:0@2"), ParseError);
  CHECK_THROWS_AS(parse_v1_slot("shell:1@-2"), ParseError);

  const auto tiny = parse_weight("power:1e+2,-1");
  CHECK(tiny(1.0) == doctest::Approx(100.0));
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_weight("coulomb:1 + bogus:3");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 12);
  }
  try {
    parse_weight("coulomb:1 + ");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() >= 11);
  }
  try {
    parse_weight("power:1,x");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 8);
  }
}

TEST_CASE("parse and print round-trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  std::uniform_int_distribution<int> kind(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PotentialComponent> terms;
    V1Slot slot;
    const int n = 1 + trial % 3;
    for (int i = 0; i < n; ++i) {
      switch (kind(rng)) {
        case 0: terms.emplace_back(Coulomb{u(rng)}); break;
        case 1: terms.emplace_back(Power{u(rng), u(rng) - 5.0}); break;
        case 2: {
          const double R = u(rng);
          terms.emplace_back(MollifiedShell{u(rng), R * 0.5, R});
          break;
        }
        case 3: terms.emplace_back(Zero{}); break;
        default: slot.shells.push_back({u(rng), u(rng)}); break;
      }
    }
    slot.regular = RadialWeight(terms);
    if (slot.regular.terms().empty() && slot.shells.empty()) continue;
    const auto text = to_string(slot);
    const auto back = parse_v1_slot(text);
    CHECK(to_string(back) == text);
    REQUIRE(back.shells.size() == slot.shells.size());
    for (std::size_t i = 0; i < slot.shells.size(); ++i) {
      CHECK(back.shells[i].mass == slot.shells[i].mass);
      CHECK(back.shells[i].radius == slot.shells[i].radius);
    }
    for (double r : {0.01, 0.3, 1.0, 2.7, 9.0}) CHECK(back.regular(r) == slot.regular(r));
  }
}

TEST_CASE("table components") {
  const auto path = std::filesystem::temp_directory_path() / "hardy_table_test.csv";
  {
    std::ofstream out(path);
    out << "r,value\n# comment\n";
    for (int i = 1; i <= 400; ++i) {
      const double r = 0.05 * i;
      out << std::setprecision(17) << r << "," << 1.0 / r << "\n";
    }
  }
  const auto w = parse_weight("table:" + path.string());
  CHECK(w(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w(1.025) == doctest::Approx(0.5 * (1.0 / 1.0 + 1.0 / 1.05)).epsilon(1e-12));
  CHECK(w(0.01) == 0.0);
  CHECK(w(30.0) == 0.0);
  const auto scaled = w.scaled(2.0);
  CHECK(scaled(0.5) == doctest::Approx(2.0 * w(1.0)));

  {
    std::ofstream out(path);
    out << "1,1\n0.5,2\n";
  }
  CHECK_THROWS_AS(parse_weight("table:" + path.string()), InputError);
  {
    std::ofstream out(path);
    out << "1,1\n2,-2\n";
  }
  CHECK_THROWS_AS(parse_weight("table:" + path.string()), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(parse_weight("table:/nonexistent/file.csv"), InputError);
}

TEST_CASE("Coulomb pair constants") {
  const auto p = pair_of("coulomb:1", "coulomb:1");
  CHECK(std::abs(a_plus(p) - 1.0) <= 1e-9);
  CHECK(std::abs(a_minus(p) - 1.0) <= 1e-9);
  CHECK(std::abs(a_k(p, 0) - 1.0) <= 1e-9);
  CHECK(std::abs(a_k(p, -2) - 1.0) <= 1e-9);
  for (int k : {1, 2, 3, 5, -3, -4, -6}) {
    const double closed = 1.0 / std::abs(k + 1);
    CHECK(std::abs(a_k(p, k) - closed) <= 1e-9);
    CHECK(std::abs(coulomb_channel_oracle(2.0, k) - closed) <= 1e-12);
  }
  CHECK_THROWS_AS(a_k(p, -1), InputError);

  // Each single weight 1/r gives r^-2 int_0^r t dt = 1/2 and
  // r^2 int_r^inf t^-3 dt = 1/2, so the separate suprema sum to 1.
  const auto t = tilde_constants(p);
  CHECK(std::abs(t.plus - 1.0) <= 1e-9);
  CHECK(std::abs(t.minus - 1.0) <= 1e-9);
  const auto uneven = tilde_constants(pair_of("shell:1@2", "coulomb:1"));
  CHECK(std::abs(uneven.plus - 1.5) <= 1e-9);
  CHECK(std::abs(uneven.minus - 1.5) <= 1e-9);

  const auto half = pair_of("zero", "coulomb:1");
  const auto th = tilde_constants(half);
  CHECK(std::abs(th.plus - a_plus(half)) <= 1e-12);
  CHECK(std::abs(th.minus - a_minus(half)) <= 1e-12);
}

TEST_CASE("zero pair") {
  const auto z = pair_of("zero", "zero");
  CHECK(a_plus(z) == 0.0);
  CHECK(a_minus(z) == 0.0);
  const auto t = tilde_constants(z);
  CHECK(t.plus == 0.0);
  CHECK(t.minus == 0.0);
}

TEST_CASE("unit shell with Coulomb V2 gives 3/2 for every radius") {
  for (double R : {0.1, 0.5, 1.0, 3.0, 10.0, 40.0}) {
    const auto p = pair_of("shell:1@" + std::to_string(R), "coulomb:1");
    const auto [plus_oracle, minus_oracle] = shell_coulomb_oracle(R);
    CHECK(plus_oracle == doctest::Approx(1.5));
    CHECK(minus_oracle == doctest::Approx(1.5));
    CHECK(std::abs(a_plus(p) - 1.5) <= 1e-9);
    CHECK(std::abs(a_minus(p) - 1.5) <= 1e-9);
  }
}

TEST_CASE("channel average of a shell") {
  const std::vector<ShellMeasure> shells{{3.0, 1.0}};
  const RadialWeight none;
  CHECK(channel_average(none, shells, 0, 3.0) == doctest::Approx(1.0));
  CHECK(channel_average(none, shells, 0, 6.0) == doctest::Approx(0.25));
  CHECK(channel_average(none, shells, 0, 2.0) == 0.0);
  CHECK(channel_average(none, shells, -2, 1.5) == doctest::Approx(0.25));
  CHECK(channel_average(none, shells, -2, 4.0) == 0.0);
}

TEST_CASE("not in class A") {
  CHECK_THROWS_AS(a_plus(pair_of("power:1,0", "zero")), NotInClassA);
  CHECK_THROWS_AS(a_plus(pair_of("power:1,-3.5", "zero")), NotInClassA);
  CHECK_THROWS_AS(a_minus(pair_of("power:1,0", "zero")), NotInClassA);
}

TEST_CASE("pair validation") {
  auto p = pair_of("coulomb:1", "coulomb:1");
  CHECK_NOTHROW(p.validate());
  p.c1 = -1.0;
  CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("scaling examples") {
  const auto c = PotentialComponent(Coulomb{1.0}).scaled(2.0);
  REQUIRE(std::holds_alternative<Coulomb>(c.kind()));
  CHECK(std::get<Coulomb>(c.kind()).nu == 1.0);

  const auto pw = PotentialComponent(Power{1.0, 0.0}).scaled(2.0);
  REQUIRE(std::holds_alternative<Power>(pw.kind()));
  CHECK(std::get<Power>(pw.kind()).a == doctest::Approx(2.0));
  CHECK(std::get<Power>(pw.kind()).p == 0.0);

  CHECK_THROWS_AS(scale_pair(pair_of("coulomb:1", "coulomb:1"), 0.0), InputError);
  CHECK(std::abs(a_plus(scale_pair(pair_of("coulomb:1", "coulomb:1"), 0.5)) - 1.0) <= 1e-9);
}

TEST_CASE("scaled densities satisfy alpha V(alpha r) pointwise") {
  const auto pair = pair_of("coulomb:0.5 + mshell:1,0.2@2 + power:0.3,-1.5", "power:2,0.7");
  for (double alpha : {0.5, 2.0, 3.7}) {
    const auto s = scale_pair(pair, alpha);
    for (double r : {0.05, 0.4, 0.9, 1.0, 1.1, 2.5, 7.0}) {
      CHECK(s.v1(r) == doctest::Approx(alpha * pair.v1(alpha * r)).epsilon(1e-12));
      CHECK(s.v2(r) == doctest::Approx(alpha * pair.v2(alpha * r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gallery invariants") {
  for (const auto& pair : class_a_gallery()) {
    CAPTURE(to_string(pair.v1));
    const int channels[] = {-5, -4, -3, 1, 2, 3};
    auto hc = hardy_constants(pair, channels);
    CHECK(hc.a_plus <= hc.a_tilde_plus + 1e-12);
    CHECK(hc.a_minus <= hc.a_tilde_minus + 1e-12);
    for (const auto& [k, value] : hc.per_channel) {
      if (k >= 0) CHECK(value <= hc.a_plus * (1 + 1e-9));
      if (k <= -2) CHECK(value <= hc.a_minus * (1 + 1e-9));
    }
    CHECK(hc.theorem_constant() ==
          doctest::Approx(std::max(hc.a_plus * hc.a_plus, hc.a_minus * hc.a_minus)));

    for (double alpha : {0.5, 2.0}) {
      const auto s = scale_pair(pair, alpha);
      CHECK(std::abs(a_plus(s) - hc.a_plus) <= 1e-8 * (1 + hc.a_plus));
      CHECK(std::abs(a_minus(s) - hc.a_minus) <= 1e-8 * (1 + hc.a_minus));
    }
  }
}
