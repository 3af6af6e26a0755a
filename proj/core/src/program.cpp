#include "program.hpp"

#include "dynex/error.hpp"
#include "dynex/validate.hpp"
#include "overloaded.hpp"

#include <cmath>

namespace dynex::detail {

namespace {

double nan_min(double a, double b) {
  if (std::isnan(a) || std::isnan(b))
    return std::numeric_limits<double>::quiet_NaN();
  return b < a ? b : a;
}

double nan_max(double a, double b) {
  if (std::isnan(a) || std::isnan(b))
    return std::numeric_limits<double>::quiet_NaN();
  return a < b ? b : a;
}

} // namespace

Program::Program(const ModelSpec& spec) {
  n_params_ = spec.params.size();
  n_stocks_ = spec.stocks.size();
  n_auxes_ = spec.auxes.size();
  for (const auto& p : spec.params) {
    names_.push_back(p.id);
    param_values_.push_back(p.value);
  }
  for (const auto& s : spec.stocks)
    names_.push_back(s.id);
  for (const auto& a : spec.auxes)
    names_.push_back(a.id);
  for (std::size_t i = 0; i < names_.size(); ++i)
    index_.emplace(names_[i], i);
  for (const auto& l : spec.lookups) {
    curve_ids_.push_back(l.id);
    curves_.push_back(resolve_curve(l.source));
  }
  state_size_ = n_stocks_;

  auto compile = [&](const Expr& e, bool allow_state) {
    Code code;
    std::size_t depth = 0, max_depth = 0;
    emit(e, code, depth, max_depth, allow_state);
    max_stack_ = std::max(max_stack_, max_depth);
    return code;
  };
  for (const auto& s : spec.stocks) {
    initial_code_.push_back(compile(s.initial, false));
    inflow_code_.push_back(compile(s.inflow, true));
    outflow_code_.push_back(compile(s.outflow, true));
  }
  for (const auto& a : spec.auxes)
    aux_code_.push_back(compile(a.expr, true));

  for (const auto& id : evaluation_order(spec))
    order_.push_back(index_.find(id)->second - n_params_ - n_stocks_);
}

std::optional<std::size_t> Program::slot(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

void Program::emit(const Expr& e, Code& out, std::size_t& depth, std::size_t& max_depth,
                   bool allow_state) {
  auto push = [&](Op op, std::uint32_t arg) {
    out.push_back({op, arg});
    ++depth;
    max_depth = std::max(max_depth, depth);
  };
  auto reduce = [&](Op op, std::uint32_t arg, std::size_t popped) {
    out.push_back({op, arg});
    depth = depth - popped + 1;
  };
  if (e.empty())
    throw ConfigError("missing expression");
  std::visit(
      Overloaded{
          [&](const Constant& c) {
            constants_.push_back(c.value);
            push(Op::konst, static_cast<std::uint32_t>(constants_.size() - 1));
          },
          [&](const VarRef& r) {
            auto it = index_.find(r.name);
            if (it == index_.end())
              throw UnknownVariable(r.name);
            push(Op::load, static_cast<std::uint32_t>(it->second));
          },
          [&](const Negate& n) {
            emit(n.arg, out, depth, max_depth, allow_state);
            reduce(Op::neg, 0, 1);
          },
          [&](const Binary& b) {
            emit(b.lhs, out, depth, max_depth, allow_state);
            emit(b.rhs, out, depth, max_depth, allow_state);
            static constexpr Op ops[] = {Op::add, Op::sub, Op::mul, Op::div, Op::pow};
            reduce(ops[static_cast<std::size_t>(b.op)], 0, 2);
          },
          [&](const Call& c) {
            if (c.args.size() != builtin_arity(c.fn))
              throw ConfigError(std::string(builtin_name(c.fn)) + " takes " +
                                std::to_string(builtin_arity(c.fn)) + " arguments");
            if (c.fn == Builtin::lookup) {
              const auto* id = std::get_if<VarRef>(&c.args[0].node().value);
              auto it = id ? std::find(curve_ids_.begin(), curve_ids_.end(), id->name)
                           : curve_ids_.end();
              if (it == curve_ids_.end())
                throw ConfigError("LOOKUP needs a declared curve id as its first argument");
              emit(c.args[1], out, depth, max_depth, allow_state);
              reduce(Op::lookup, static_cast<std::uint32_t>(it - curve_ids_.begin()), 1);
              return;
            }
            for (const auto& a : c.args)
              emit(a, out, depth, max_depth, allow_state);
            switch (c.fn) {
            case Builtin::min:
              return reduce(Op::min, 0, 2);
            case Builtin::max:
              return reduce(Op::max, 0, 2);
            case Builtin::clip:
              return reduce(Op::clip, 0, 3);
            case Builtin::step:
              return reduce(Op::step, 0, 2);
            case Builtin::pulse:
              return reduce(Op::pulse, 0, 2);
            case Builtin::time:
              return push(Op::time, 0);
            case Builtin::smooth:
            case Builtin::delay1:
            case Builtin::delay3: {
              if (!allow_state)
                throw ConfigError(std::string(builtin_name(c.fn)) +
                                  " is not allowed in an initial expression");
              const std::uint32_t levels = c.fn == Builtin::delay3 ? 3 : 1;
              delays_.push_back({c.fn, static_cast<std::uint32_t>(state_size_), levels});
              state_size_ += levels;
              return reduce(Op::delay, static_cast<std::uint32_t>(delays_.size() - 1), 2);
            }
            case Builtin::lookup:
              break;
            }
          },
      },
      e.node().value);
}

Program::Workspace Program::make_workspace() const {
  Workspace ws;
  ws.values.assign(names_.size(), 0.0);
  std::copy(param_values_.begin(), param_values_.end(), ws.values.begin());
  ws.inflow.assign(n_stocks_, 0.0);
  ws.outflow.assign(n_stocks_, 0.0);
  ws.delay_in.assign(delays_.size(), 0.0);
  ws.delay_tau.assign(delays_.size(), 1.0);
  ws.stack.assign(max_stack_, 0.0);
  return ws;
}

double Program::run(const Code& code, Workspace& ws, double t, double* y, DelayMode mode) const {
  double* st = ws.stack.data();
  std::size_t sp = 0;
  for (const Instr& in : code) {
    switch (in.op) {
    case Op::konst:
      st[sp++] = constants_[in.arg];
      break;
    case Op::load:
      st[sp++] = ws.values[in.arg];
      break;
    case Op::neg:
      st[sp - 1] = -st[sp - 1];
      break;
    case Op::add:
      --sp;
      st[sp - 1] += st[sp];
      break;
    case Op::sub:
      --sp;
      st[sp - 1] -= st[sp];
      break;
    case Op::mul:
      --sp;
      st[sp - 1] *= st[sp];
      break;
    case Op::div:
      --sp;
      st[sp - 1] /= st[sp];
      break;
    case Op::pow:
      --sp;
      st[sp - 1] = std::pow(st[sp - 1], st[sp]);
      break;
    case Op::min:
      --sp;
      st[sp - 1] = nan_min(st[sp - 1], st[sp]);
      break;
    case Op::max:
      --sp;
      st[sp - 1] = nan_max(st[sp - 1], st[sp]);
      break;
    case Op::clip:
      sp -= 2;
      st[sp - 1] = nan_min(nan_max(st[sp - 1], st[sp]), st[sp + 1]);
      break;
    case Op::step:
      --sp;
      st[sp - 1] = t > st[sp] ? st[sp - 1] : 0.0;
      break;
    case Op::pulse: {
      --sp;
      const double start = st[sp - 1];
      st[sp - 1] = (t > start && t <= start + st[sp]) ? 1.0 : 0.0;
      break;
    }
    case Op::time:
      st[sp++] = t;
      break;
    case Op::lookup: {
      const double x = st[sp - 1];
      // Negative inputs read the curve's value at 0.
      st[sp - 1] = std::isnan(x) ? x : fraction_willing(curves_[in.arg], x < 0.0 ? 0.0 : x);
      break;
    }
    case Op::delay: {
      --sp;
      const double input = st[sp - 1];
      const double tau = st[sp];
      if (!(tau > 0.0))
        throw DomainError("delay time constant must be > 0");
      ws.delay_in[in.arg] = input;
      ws.delay_tau[in.arg] = tau;
      const DelaySite& d = delays_[in.arg];
      switch (mode) {
      case DelayMode::dynamic:
        st[sp - 1] = y[d.offset + d.levels - 1];
        break;
      case DelayMode::equilibrium:
        break;
      case DelayMode::initialize:
        for (std::uint32_t k = 0; k < d.levels; ++k)
          y[d.offset + k] = input;
        break;
      }
      break;
    }
    }
  }
  return st[0];
}

void Program::initial_stocks(Workspace& ws, double t, double* y) const {
  for (std::size_t i = 0; i < n_stocks_; ++i) {
    y[i] = run(initial_code_[i], ws, t, y, DelayMode::equilibrium);
    ws.values[stock_slot(i)] = y[i];
  }
}

void Program::evaluate(Workspace& ws, double t, double* y, DelayMode mode) const {
  for (std::size_t i = 0; i < n_stocks_; ++i)
    ws.values[n_params_ + i] = y[i];
  for (std::size_t i : order_)
    ws.values[aux_slot(i)] = run(aux_code_[i], ws, t, y, mode);
  for (std::size_t i = 0; i < n_stocks_; ++i) {
    ws.inflow[i] = run(inflow_code_[i], ws, t, y, mode);
    ws.outflow[i] = run(outflow_code_[i], ws, t, y, mode);
  }
}

void Program::rates(const Workspace& ws, const double* y, double* dydt) const {
  for (std::size_t i = 0; i < n_stocks_; ++i)
    dydt[i] = ws.inflow[i] - ws.outflow[i];
  for (std::size_t k = 0; k < delays_.size(); ++k) {
    const DelaySite& d = delays_[k];
    const double in = ws.delay_in[k];
    if (d.levels == 1) {
      dydt[d.offset] = (in - y[d.offset]) / ws.delay_tau[k];
    } else {
      const double stage = ws.delay_tau[k] / 3.0;
      const double* l = y + d.offset;
      dydt[d.offset] = (in - l[0]) / stage;
      dydt[d.offset + 1] = (l[0] - l[1]) / stage;
      dydt[d.offset + 2] = (l[1] - l[2]) / stage;
    }
  }
}

} // namespace dynex::detail
