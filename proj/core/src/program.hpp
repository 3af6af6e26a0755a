#pragma once

// Compiled form of a ModelSpec: every variable gets a value slot (params,
// then stocks, then auxes) and every expression becomes postfix code for a
// small stack machine. The integration state vector holds the stocks followed
// by the hidden levels of SMOOTH/DELAY1/DELAY3 call sites.

#include "dynex/model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynex::detail {

enum class Op : std::uint8_t {
  konst,
  load,
  neg,
  add,
  sub,
  mul,
  div,
  pow,
  min,
  max,
  clip,
  step,
  pulse,
  time,
  lookup,
  delay,
};

struct Instr {
  Op op;
  std::uint32_t arg;
};

using Code = std::vector<Instr>;

// How stateful builtins behave during an evaluation.
//  dynamic:     output the stored level (normal simulation)
//  equilibrium: output equals input (operating-point analysis)
//  initialize:  set every level to the input, output the input
enum class DelayMode { dynamic, equilibrium, initialize };

struct DelaySite {
  Builtin kind;
  std::uint32_t offset; // first level in the state vector
  std::uint32_t levels; // 1 or 3
};

class Program {
public:
  struct Workspace {
    std::vector<double> values;
    std::vector<double> inflow;
    std::vector<double> outflow;
    std::vector<double> delay_in;
    std::vector<double> delay_tau;
    std::vector<double> stack;
  };

  // The spec must be free of structural validation errors.
  explicit Program(const ModelSpec& spec);

  std::size_t param_count() const noexcept { return n_params_; }
  std::size_t stock_count() const noexcept { return n_stocks_; }
  std::size_t aux_count() const noexcept { return n_auxes_; }
  std::size_t variable_count() const noexcept { return names_.size(); }
  std::size_t state_size() const noexcept { return state_size_; }

  std::size_t stock_slot(std::size_t i) const noexcept { return n_params_ + i; }
  std::size_t aux_slot(std::size_t i) const noexcept { return n_params_ + n_stocks_ + i; }

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> slot(std::string_view name) const;

  // Aux indices in evaluation order.
  const std::vector<std::size_t>& aux_order() const noexcept { return order_; }
  const Code& aux_code(std::size_t i) const { return aux_code_[i]; }
  const Code& inflow_code(std::size_t i) const { return inflow_code_[i]; }
  const Code& outflow_code(std::size_t i) const { return outflow_code_[i]; }
  const Code& initial_code(std::size_t i) const { return initial_code_[i]; }

  // Workspace with parameter slots set to the spec's values.
  Workspace make_workspace() const;

  // Writes stock initial values into y[0, stock_count) and the stock slots.
  void initial_stocks(Workspace& ws, double t, double* y) const;

  // Copies stocks from y into their slots, then evaluates auxes in order and
  // every stock's inflow and outflow. In initialize mode delay levels in y
  // are overwritten.
  void evaluate(Workspace& ws, double t, double* y, DelayMode mode) const;

  // Derivatives of the state vector from the last evaluate() call.
  void rates(const Workspace& ws, const double* y, double* dydt) const;

  double run(const Code& code, Workspace& ws, double t, double* y, DelayMode mode) const;

private:
  void emit(const Expr& e, Code& out, std::size_t& depth, std::size_t& max_depth,
            bool allow_state);

  std::size_t n_params_ = 0, n_stocks_ = 0, n_auxes_ = 0, state_size_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<double> param_values_;
  std::vector<double> constants_;
  std::vector<WillingnessCurve> curves_;
  std::vector<std::string> curve_ids_;
  std::vector<DelaySite> delays_;
  std::vector<std::size_t> order_;
  std::vector<Code> aux_code_, inflow_code_, outflow_code_, initial_code_;
  std::size_t max_stack_ = 1;
};

} // namespace dynex::detail
