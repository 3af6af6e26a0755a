#pragma once

// Helpers shared by the unit tests and the acceptance runner: fixture paths,
// a generator of random valid model specs, and independent oracles.

#include "dynex/graph.hpp"
#include "dynex/loops.hpp"
#include "dynex/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dynex::testing {

inline std::string model_path(const std::string& name) { return std::string(DYNEX_MODELS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Random valid specs. Constants are nonnegative (the parser reads "-2" as a
// negation), divisors and delay times are positive constants, auxiliaries
// read only earlier ones before their declarations are shuffled, and every
// declaration shares one unit or none.

class SpecGenerator {
public:
  explicit SpecGenerator(std::uint64_t seed) : rng_(seed) {}

  ModelSpec operator()() {
    ModelSpec m;
    m.name = "random_" + std::to_string(counter_++);
    const std::string unit = pick<std::string>({"", "people", "money/time", "1/time"});
    auto maybe_unit = [&] { return coin(0.5) ? unit : std::string(); };

    const int n_params = uniform(1, 5);
    for (int i = 0; i < n_params; ++i) {
      ParamDef p{"p_" + std::to_string(i), coin(0.3) ? -number() : number(), maybe_unit()};
      m.params.push_back(p);
      params_.push_back(p.id);
    }
    const int n_lookups = uniform(0, 2);
    for (int i = 0; i < n_lookups; ++i)
      m.lookups.push_back({"curve_" + std::to_string(i), random_curve()});

    const int n_stocks = uniform(1, 4);
    std::vector<std::string> stocks;
    for (int i = 0; i < n_stocks; ++i)
      stocks.push_back("s_" + std::to_string(i));
    const int n_auxes = uniform(0, 6);

    lookups_.clear();
    for (const auto& l : m.lookups)
      lookups_.push_back(l.id);

    // Initial expressions may read parameters only and no stateful builtins.
    vars_ = params_;
    stateful_ = false;
    for (const auto& s : stocks) {
      m.stocks.push_back({s, expr(2), {}, {}, maybe_unit()});
    }

    vars_ = params_;
    vars_.insert(vars_.end(), stocks.begin(), stocks.end());
    stateful_ = true;
    for (int i = 0; i < n_auxes; ++i) {
      const std::string id = "a_" + std::to_string(i);
      m.auxes.push_back({id, expr(3), maybe_unit()});
      vars_.push_back(id);
    }
    for (auto& s : m.stocks) {
      s.inflow = expr(3);
      s.outflow = expr(3);
    }
    std::shuffle(m.auxes.begin(), m.auxes.end(), rng_);
    params_.clear();
    return m;
  }

  // Nonnegative numbers in a mix of short, long and extreme forms.
  double number() {
    switch (uniform(0, 5)) {
    case 0:
      return static_cast<double>(uniform(0, 100));
    case 1:
      return uniform(1, 999) / 100.0;
    case 2:
      return std::uniform_real_distribution<double>(0.0, 10.0)(rng_);
    case 3:
      return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng_), uniform(-30, 30));
    case 4:
      return std::pow(10.0, uniform(-8, 8)) * uniform(1, 9);
    default:
      return 0.1 * uniform(1, 30);
    }
  }

  std::mt19937_64& rng() { return rng_; }

private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  T pick(std::initializer_list<T> xs) {
    return *(xs.begin() + uniform(0, static_cast<int>(xs.size()) - 1));
  }

  double positive() { return number() + 0.5; }

  LookupSource random_curve() {
    if (coin(0.5)) {
      const double median = 0.5 + uniform(0, 20) / 10.0;
      return AnchoredCurve{coin(0.5) ? CurveKind::normal : CurveKind::lognormal, median,
                           median * (1.1 + uniform(0, 10) / 10.0)};
    }
    PointTable t;
    const int n = uniform(2, 5);
    double r = 0.0, f = 0.0;
    for (int i = 0; i < n; ++i) {
      t.points.push_back({r, i == 0 ? 0.0 : (i == n - 1 ? 1.0 : f)});
      r += 0.25 * uniform(1, 8);
      f = std::min(1.0, f + 0.05 * uniform(0, 8));
    }
    return t;
  }

  Expr leaf() {
    if (vars_.empty() || coin(0.35))
      return Expr::constant(number());
    return Expr::ref(vars_[static_cast<std::size_t>(uniform(0, static_cast<int>(vars_.size()) - 1))]);
  }

  Expr expr(int depth) {
    if (depth <= 0 || coin(0.25))
      return leaf();
    const int choice = uniform(0, stateful_ ? 14 : 10);
    switch (choice) {
    case 0:
      return expr(depth - 1) + expr(depth - 1);
    case 1:
      return expr(depth - 1) - expr(depth - 1);
    case 2:
      return expr(depth - 1) * expr(depth - 1);
    case 3:
      return expr(depth - 1) / Expr::constant(positive());
    case 4:
      return -expr(depth - 1);
    case 5:
      return pow(expr(depth - 1), Expr::constant(static_cast<double>(uniform(0, 2))));
    case 6:
      return Expr::call(coin(0.5) ? Builtin::min : Builtin::max, {expr(depth - 1), expr(depth - 1)});
    case 7:
      return Expr::call(Builtin::clip, {expr(depth - 1), Expr::constant(0.0), Expr::constant(positive())});
    case 8:
      return Expr::call(Builtin::step, {expr(depth - 1), Expr::constant(number())});
    case 9:
      return Expr::call(Builtin::pulse, {Expr::constant(number()), Expr::constant(positive())});
    case 10:
      return Expr::call(Builtin::time, {}) * expr(depth - 1);
    case 11:
      if (!lookups_.empty())
        return Expr::call(Builtin::lookup,
                          {Expr::ref(lookups_[static_cast<std::size_t>(
                               uniform(0, static_cast<int>(lookups_.size()) - 1))]),
                           expr(depth - 1)});
      return leaf();
    case 12:
      return Expr::call(Builtin::smooth, {expr(depth - 1), Expr::constant(positive())});
    case 13:
      return Expr::call(Builtin::delay1, {expr(depth - 1), Expr::constant(positive())});
    default:
      return Expr::call(Builtin::delay3, {expr(depth - 1), Expr::constant(positive())});
    }
  }

  std::mt19937_64 rng_;
  std::uint64_t counter_ = 0;
  std::vector<std::string> params_, vars_, lookups_;
  bool stateful_ = false;
};

// ---------------------------------------------------------------------------
// Brute-force cycle enumeration: every subset, every ordering of it starting
// at the subset's smallest node, kept when all edges exist.

inline std::vector<Cycle> brute_force_cycles(const SignedDigraph& g, std::size_t max_len) {
  const auto& nodes = g.nodes();
  const std::size_t n = nodes.size();
  std::vector<Cycle> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i))
        members.push_back(i);
    if (members.size() > max_len)
      continue;
    std::vector<std::size_t> rest(members.begin() + 1, members.end());
    do {
      std::vector<std::size_t> order{members.front()};
      order.insert(order.end(), rest.begin(), rest.end());
      Cycle c;
      bool ok = true;
      for (std::size_t i = 0; i < order.size() && ok; ++i) {
        const auto s = g.sign(nodes[order[i]], nodes[order[(i + 1) % order.size()]]);
        if (!s)
          ok = false;
        else
          c.signs.push_back(*s);
        c.nodes.push_back(nodes[order[i]]);
      }
      if (ok)
        out.push_back(std::move(c));
    } while (std::next_permutation(rest.begin(), rest.end()));
  }
  std::sort(out.begin(), out.end(), [](const Cycle& a, const Cycle& b) { return a.nodes < b.nodes; });
  return out;
}

inline SignedDigraph random_digraph(std::mt19937_64& rng, std::size_t max_nodes) {
  std::uniform_int_distribution<std::size_t> count(1, max_nodes);
  const std::size_t n = count(rng);
  const double density = std::uniform_real_distribution<double>(0.1, 0.6)(rng);
  SignedDigraph g;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::string(1, static_cast<char>('a' + i)));
    g.add_node(names.back());
  }
  std::bernoulli_distribution edge(density), negative(0.4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (edge(rng))
        g.add_edge(names[i], names[j], negative(rng) ? -1 : 1);
  return g;
}

// ---------------------------------------------------------------------------
// Numeric oracles.

inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals = 4000) {
  if (intervals % 2)
    ++intervals;
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

// Share of a normal(mu, sigma) population truncated at 0 lying below r.
inline double truncated_normal_cdf_by_quadrature(double r, double mu, double sigma) {
  auto pdf = [&](double x) { return normal_pdf(x, mu, sigma); };
  const double upper = mu + 12.0 * sigma;
  return simpson(pdf, 0.0, r) / simpson(pdf, 0.0, upper);
}

// Linear fixture: demand a - b w, supply (w / (2 w_d)) pool, employment
// min(demand, supply).
struct LinearOracle {
  double a = 1000, b = 200, pool = 1000, demanded_wage = 1;

  double supply(double w) const { return std::min(w / (2.0 * demanded_wage), 1.0) * pool; }
  double demand(double w) const { return a - b * w; }
  double equilibrium_wage() const { return a / (b + pool / (2.0 * demanded_wage)); }
  double employment(double w) const { return std::min(demand(w), supply(w)); }
  double unhired(double w) const { return supply(w) - employment(w); }
};

} // namespace dynex::testing
