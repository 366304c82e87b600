#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "mcm/particles.hpp"
#include "mcm/sampling.hpp"

using mcm::Particles;
using mcm::StaticParticles;

namespace {

template <class P>
P make(const std::vector<double>& xs) {
  return P::from_samples(xs);
}

std::vector<double> ramp(std::size_t n, double lo, double step) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Restores the process-wide comparison policy at scope exit.
struct PolicyGuard {
  mcm::ComparisonPolicy saved = mcm::default_comparison_policy();
  ~PolicyGuard() { mcm::set_default_comparison_policy(saved); }
};

// --- random expression trees ---------------------------------------------

enum class Op { X, Y, Z, Const, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Tanh, SqrtAbs, Atan2, Hypot, Min };

struct Node {
  Op op;
  double c = 0.0;
  std::unique_ptr<Node> a, b;
};

std::unique_ptr<Node> random_tree(std::mt19937_64& gen, int depth) {
  auto node = std::make_unique<Node>();
  std::uniform_int_distribution<int> leaf(0, 3);
  std::uniform_int_distribution<int> inner(4, 16);
  if (depth == 0) {
    node->op = static_cast<Op>(leaf(gen));
    node->c = std::uniform_real_distribution<double>(-2.0, 2.0)(gen);
    return node;
  }
  node->op = static_cast<Op>(inner(gen));
  node->a = random_tree(gen, depth - 1);
  node->b = random_tree(gen, std::uniform_int_distribution<int>(0, depth - 1)(gen));
  return node;
}

template <class T>
T eval(const Node& n, const T& x, const T& y, const T& z) {
  using mcm::math::abs, mcm::math::atan2, mcm::math::cos, mcm::math::exp, mcm::math::hypot, mcm::math::min,
      mcm::math::sin, mcm::math::sqrt, mcm::math::tanh;
  switch (n.op) {
    case Op::X: return x;
    case Op::Y: return y;
    case Op::Z: return z;
    case Op::Const: return x * 0.0 + n.c;
    case Op::Add: return eval(*n.a, x, y, z) + eval(*n.b, x, y, z);
    case Op::Sub: return eval(*n.a, x, y, z) - eval(*n.b, x, y, z);
    case Op::Mul: return eval(*n.a, x, y, z) * eval(*n.b, x, y, z);
    case Op::Div: return eval(*n.a, x, y, z) / (1.5 + abs(eval(*n.b, x, y, z)));
    case Op::Neg: return -eval(*n.a, x, y, z);
    case Op::Sin: return sin(eval(*n.a, x, y, z));
    case Op::Cos: return cos(eval(*n.a, x, y, z));
    case Op::Exp: return exp(tanh(eval(*n.a, x, y, z)));
    case Op::Tanh: return tanh(eval(*n.a, x, y, z));
    case Op::SqrtAbs: return sqrt(abs(eval(*n.a, x, y, z)));
    case Op::Atan2: return atan2(eval(*n.a, x, y, z), eval(*n.b, x, y, z));
    case Op::Hypot: return hypot(eval(*n.a, x, y, z), eval(*n.b, x, y, z));
    case Op::Min: return min(eval(*n.a, x, y, z), 2.0 * eval(*n.b, x, y, z));
  }
  return x;
}

}  // namespace

TEST_CASE_TEMPLATE("construction and accessors", P, Particles, StaticParticles<4>) {
  const P p = make<P>({1.0, 2.0, 3.0, 4.0});
  CHECK(p.size() == 4);
  CHECK(p[2] == 3.0);
  CHECK(p.at(3) == 4.0);
  CHECK_THROWS_AS(p.at(4), std::out_of_range);
  CHECK(std::vector<double>(p.begin(), p.end()) == std::vector<double>{1, 2, 3, 4});
  CHECK(mcm::mean(p) == 2.5);
}

TEST_CASE("invalid construction") {
  CHECK_THROWS_AS(Particles::from_samples(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(Particles::filled(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(StaticParticles<4>::from_samples({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Particles(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE_TEMPLATE("self-correlation is exact", P, Particles, StaticParticles<100>) {
  mcm::Rng rng(3);
  const Particles src = mcm::pm(std::numbers::pi, 0.1, rng, 100);
  const P a = P::from_samples(src.samples());
  const P zero = a - a;
  const P one = a / a;
  for (double v : zero) CHECK(v == 0.0);
  for (double v : one) CHECK(v == 1.0);
  CHECK(mcm::stddev(zero) == 0.0);
  const P r = sin(a) / cos(a) - tan(a);
  CHECK(mcm::maximum(abs(r)) <= 1e-12);
  const P pyth = sin(a) * sin(a) + cos(a) * cos(a);
  CHECK(mcm::maximum(abs(pyth - 1.0)) <= 4e-16);
}

TEST_CASE_TEMPLATE("broadcast with plain reals", P, Particles, StaticParticles<8>) {
  const auto xs = ramp(8, -1.0, 0.25);
  const P p = make<P>(xs);
  const P q1 = p + 2.0;
  const P q2 = 2.0 - p;
  const P q3 = 3.0 * p;
  const P q4 = p / 4.0;
  const P q5 = pow(p, 2.0);
  const P q6 = max(p, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(q1[i] == xs[i] + 2.0);
    CHECK(q2[i] == 2.0 - xs[i]);
    CHECK(q3[i] == 3.0 * xs[i]);
    CHECK(q4[i] == xs[i] / 4.0);
    CHECK(q5[i] == std::pow(xs[i], 2.0));
    CHECK(q6[i] == std::max(xs[i], 0.0));
  }
}

TEST_CASE("operands with different sample counts are rejected") {
  const Particles a = Particles::filled(3, 1.0);
  const Particles b = Particles::filled(4, 1.0);
  CHECK_THROWS_WITH_AS(a + b, "particle count mismatch: 3 vs 4", std::invalid_argument);
  CHECK_THROWS_AS(Particles(a) * b, std::invalid_argument);
  CHECK_THROWS_AS(a - Particles(b), std::invalid_argument);
  CHECK_THROWS_AS(mcm::compare(a, b, mcm::Relation::Less), std::invalid_argument);
}

TEST_CASE("rvalue buffer reuse gives the same bits as the copying path") {
  mcm::Rng rng(11);
  const Particles a = mcm::pm(0.3, 1.0, rng, 64);
  const Particles b = mcm::pm(-0.2, 2.0, rng, 64);
  const Particles lvalue = sin(a) * b + cos(b) / (2.0 + a * a) - exp(tanh(a));
  Particles ca = a;
  Particles cb = b;
  const Particles rvalue =
      sin(Particles(a)) * Particles(b) + cos(std::move(cb)) / (2.0 + Particles(a) * a) -
      exp(tanh(std::move(ca)));
  for (std::size_t i = 0; i < 64; ++i) CHECK(same_bits(lvalue[i], rvalue[i]));
}

TEST_CASE("random expression trees: batched evaluation equals per-sample scalar evaluation bitwise") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 16)(gen);
    std::normal_distribution<double> nd(0.0, 2.0);
    std::vector<double> xs(n), ys(n), zs(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = nd(gen);
      ys[i] = nd(gen);
      zs[i] = nd(gen);
    }
    const auto tree = random_tree(gen, 5);
    const Particles px = Particles::from_samples(xs);
    const Particles py = Particles::from_samples(ys);
    const Particles pz = Particles::from_samples(zs);
    const Particles batched = eval(*tree, px, py, pz);
    REQUIRE(batched.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      const double scalar = eval(*tree, xs[i], ys[i], zs[i]);
      INFO("trial " << trial << " sample " << i);
      REQUIRE(same_bits(batched[i], scalar));
    }
    if (n == 16) {
      const auto sx = StaticParticles<16>::from_samples(xs);
      const auto sy = StaticParticles<16>::from_samples(ys);
      const auto sz = StaticParticles<16>::from_samples(zs);
      const auto st = eval(*tree, sx, sy, sz);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(st[i], batched[i]));
    }
  }
}

TEST_CASE("statistics") {
  const Particles p = Particles::from_samples({4.0, 1.0, 3.0, 2.0});
  CHECK(mcm::mean(p) == 2.5);
  CHECK(mcm::var(p) == doctest::Approx(5.0 / 3.0));
  CHECK(mcm::pvar(p) == doctest::Approx(1.25));
  CHECK(mcm::minimum(p) == 1.0);
  CHECK(mcm::maximum(p) == 4.0);
  CHECK(mcm::median(p) == 2.5);
  CHECK(mcm::quantile(p, 0.0) == 1.0);
  CHECK(mcm::quantile(p, 1.0) == 4.0);
  CHECK(mcm::quantile(p, 1.0 / 3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(mcm::quantile(p, 1.5), std::domain_error);
  CHECK(std::isnan(mcm::quantile(Particles::from_samples({1.0, std::nan("")}), 0.5)));
  CHECK(mcm::var(Particles::filled(1, 7.0)) == 0.0);
}

TEST_CASE("translation and scale equivariance of summaries") {
  mcm::Rng rng(5);
  const Particles p = mcm::pm(1.0, 2.0, rng, 200);
  const Particles q = 3.0 * p + 10.0;
  CHECK(mcm::mean(q) == doctest::Approx(3.0 * mcm::mean(p) + 10.0).epsilon(1e-14));
  CHECK(mcm::stddev(q) == doctest::Approx(3.0 * mcm::stddev(p)).epsilon(1e-13));
  for (double pr : {0.05, 0.5, 0.95})
    CHECK(mcm::quantile(q, pr) == doctest::Approx(3.0 * mcm::quantile(p, pr) + 10.0).epsilon(1e-13));
  const Particles r = -p;
  CHECK(mcm::quantile(r, 0.05) == doctest::Approx(-mcm::quantile(p, 0.95)).epsilon(1e-14));
}

TEST_CASE("rendering") {
  mcm::Rng rng(1);
  CHECK(mcm::to_string(mcm::pm(std::numbers::pi, 0.1, rng)) == "P500(3.142 ± 0.1)");
  CHECK(mcm::to_string(Particles::filled(4, 2.0)) == "P4(2.0)");
  CHECK(mcm::to_string(StaticParticles<2>::from_samples({1.0, 3.0})) == "SP2(2.0 ± 1.41)");
  std::ostringstream os;
  os << Particles::filled(3, -0.5);
  CHECK(os.str() == "P3(-0.5)");
}

TEST_CASE("comparison policies") {
  PolicyGuard guard;
  const Particles lo = Particles::from_samples({1.0, 2.0, 3.0, 4.0});
  const Particles hi = lo + 10.0;
  const Particles mixed = Particles::from_samples({0.0, 5.0, 0.0, 5.0});

  mcm::set_default_comparison_policy(mcm::ComparisonPolicy::Unanimous);
  CHECK(lo < hi);
  CHECK_FALSE(hi < lo);
  CHECK(lo <= 4.0);
  CHECK(0.5 < lo);
  CHECK(lo == lo);
  CHECK_FALSE(lo == hi);
  try {
    (void)(mixed < lo);
    FAIL("expected UncertainComparisonError");
  } catch (const mcm::UncertainComparisonError& e) {
    CHECK(e.fraction_true() == doctest::Approx(0.5));
    CHECK(std::string(e.what()).find("50") != std::string::npos);
  }

  mcm::set_default_comparison_policy(mcm::ComparisonPolicy::ByMean);
  CHECK_FALSE(mixed < lo);  // 2.5 vs 2.5 is not less
  CHECK(mixed <= lo);
  CHECK_FALSE(mixed > lo);

  mcm::set_default_comparison_policy(mcm::ComparisonPolicy::Forbidden);
  CHECK_THROWS_AS((void)(lo < hi), mcm::UncertainComparisonError);

  // explicit policy overrides the default
  CHECK(mcm::compare(lo, hi, mcm::Relation::Less, mcm::ComparisonPolicy::Unanimous));
}

TEST_CASE("mean comparison is strict") {
  const Particles a = Particles::from_samples({0.0, 5.0});
  const Particles b = Particles::from_samples({2.5, 2.5});
  CHECK_FALSE(mcm::compare(a, b, mcm::Relation::Less, mcm::ComparisonPolicy::ByMean));
  CHECK(mcm::compare(a, b, mcm::Relation::LessEqual, mcm::ComparisonPolicy::ByMean));
}

TEST_CASE_TEMPLATE("lifted branching functions see plain reals", P, Particles, StaticParticles<6>) {
  const P p = make<P>({-2.0, -1.0, 0.0, 1.0, 2.0, 3.0});
  const auto relu = mcm::lift_unary([](double x) { return x > 0.0 ? x : 0.0; });
  const P r = relu(p);
  CHECK(std::vector<double>(r.begin(), r.end()) == std::vector<double>{0, 0, 0, 1, 2, 3});

  const auto par = mcm::lift_unary([](double x) { return x > 0.0 ? x : 0.0; }, mcm::Execution::Parallel);
  const P rp = par(p);
  CHECK(std::vector<double>(rp.begin(), rp.end()) == std::vector<double>(r.begin(), r.end()));

  const auto clamp3 = mcm::lift_nary([](double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); });
  const P c = clamp3(p, -1.0, make<P>({1, 1, 1, 1, 1, 2}));
  CHECK(std::vector<double>(c.begin(), c.end()) == std::vector<double>{-1, -1, 0, 1, 1, 2});
}

TEST_CASE("lift_nary rejects mismatched sample counts") {
  const auto add = mcm::lift_nary([](double a, double b) { return a + b; });
  CHECK_THROWS_AS(add(Particles::filled(2, 1.0), Particles::filled(3, 1.0)), std::invalid_argument);
  const Particles s = add(1.0, Particles::filled(2, 1.0));
  CHECK(s[1] == 2.0);
}

TEST_CASE("map and zip") {
  const Particles a = Particles::from_samples({1.0, 2.0});
  const Particles b = Particles::from_samples({10.0, 20.0});
  const Particles z = Particles::zip(a, b, [](double x, double y) { return x * y + 1.0; });
  CHECK(z[0] == 11.0);
  CHECK(z[1] == 41.0);
  const Particles m = a.map([](double x) { return -x; });
  CHECK(m[1] == -2.0);
}

TEST_CASE("is_finite") {
  CHECK(is_finite(Particles::filled(3, 1.0)));
  CHECK_FALSE(is_finite(Particles::from_samples({1.0, std::numeric_limits<double>::infinity()})));
  CHECK_FALSE(is_finite(log(Particles::from_samples({1.0, -1.0}))));
}
