#include "doctest.h"

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "szego/errors.hpp"
#include "szego/verify.hpp"

using namespace szego;

namespace {
const Polynomial kSq(1, {{{2}, 1.0}});
const Polynomial kDisc(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
const Polynomial kWiggle(1, {{{2}, 1.0}, {{3}, -1.0}, {{4}, 1.0}});
}  // namespace

TEST_CASE("sphere average examples") {
  CHECK(sphere_average(kDisc, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sphere_average(kSq, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Circle moments: mean cos^2 = 1/2, mean sin^6 = 5/16.
  CHECK(sphere_average(Polynomial(2, {{{2, 0}, 1.0}, {{0, 6}, 1.0}}), 1.0) == doctest::Approx(0.8125).epsilon(1e-12));
}

TEST_CASE("corpus construction") {
  const Corpus c = Corpus::default_corpus();
  CHECK(c.entries.size() >= 8);
  CHECK(c.hash() == Corpus::default_corpus().hash());
  CHECK(c.hash() != Corpus::default_corpus(1).hash());
  CHECK(c.hash().size() == 16);
  for (const auto& e : c.one_variable().entries) CHECK(e.g.dim() == 1);
  CHECK_THROWS_AS(Corpus::make({{"affine", Polynomial(1, {{{1}, 1.0}, {{2}, 1.0}})}}), ConfigError);
  CHECK_THROWS_AS(Corpus::make({{"cubic", Polynomial(1, {{{3}, 1.0}})}}), ConfigError);
  CHECK_THROWS_AS(Corpus::make({{"nonconvex", Polynomial(1, {{{2}, 1.0}, {{3}, 2.0}, {{4}, 0.1}})}}), ConfigError);
}

TEST_CASE("coefficient bound suite") {
  const SuiteReport r = coeff_bound_suite(Corpus::make({{"sq", kSq}}), 1.0);
  CHECK(r.passed());
  CHECK(r.constants.at("ratio[sq]") == doctest::Approx(1.0).epsilon(1e-12));
  const SuiteReport a = coeff_bound_suite(Corpus::make({{"g", kWiggle}}), 1.0);
  const SuiteReport b = coeff_bound_suite(Corpus::make({{"g", 7.0 * kWiggle}}), 1.0);
  CHECK(std::abs(a.constants.at("ratio[g]") - b.constants.at("ratio[g]")) <= 1e-12 * a.constants.at("ratio[g]"));
  const SuiteReport full = coeff_bound_suite(Corpus::default_corpus(), 1.0);
  CHECK(full.passed());
  CHECK(full.constants_finite());
}

TEST_CASE("BNW suite") {
  const SuiteReport r = bnw_suite(Corpus::make({{"sq", kSq}, {"wiggle", kWiggle}}));
  CHECK(r.passed());
  CHECK(r.constants.at("C_M[sq]") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.constants.at("C_M[wiggle]") == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(r.constants.at("C_M") > 0.0);
}

TEST_CASE("appendix suite") {
  const SuiteReport r = appendix_suite(Corpus::make({{"sq", kSq}, {"disc", kDisc}}));
  CHECK(r.passed());
  CHECK(r.constants.at("I_over_V[sq]") == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-4));
  CHECK(r.constants.at("I_over_V[disc]") == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("decay suite on single-variable powers") {
  const SuiteReport r = decay_suite(Corpus::make({{"sq", kSq}, {"quartic", Polynomial(1, {{{4}, 1.0}})}}));
  CHECK(r.passed());
  CHECK(r.constants.at("exponent[sq,axis 0]") == doctest::Approx(2.0).epsilon(0.025));
  CHECK(r.constants.at("exponent[quartic,axis 0]") == doctest::Approx(4.0 / 3.0).epsilon(0.0375));
}

TEST_CASE("report JSON is well formed") {
  SuiteReport r;
  r.suite = "demo";
  r.corpus_hash = "00ff";
  r.cases = 2;
  r.failures.push_back({"case \"a\"", "detail"});
  r.constants["x"] = 0.1;
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["suite"] == "demo");
  CHECK(j["failures"][0]["case"] == "case \"a\"");
  CHECK(j["constants"]["x"].get<double>() == 0.1);
  CHECK_FALSE(r.passed());
}
