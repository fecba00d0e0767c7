#include "fieldc/engine.hpp"

#include <cassert>
#include <sstream>
#include <vector>

#include "fieldc/builtins.hpp"

namespace fieldc {

namespace {

std::string keyToString(const PathKey& k) {
  if (std::holds_alternative<int>(k)) return std::to_string(std::get<int>(k));
  return std::get<std::string>(k);
}

class Evaluator {
 public:
  Evaluator(const Program& program, const RoundContext& ctx, const EvalOptions& opts)
      : program_(program), ctx_(ctx), opts_(opts) {
    builtinCtx_.round = &ctx_;
    builtinCtx_.applyPointwise = [this](const FuncValue& f, std::span<const Value> args) {
      NoExportScope guard(*this);
      return apply(f, std::vector<Value>(args.begin(), args.end()));
    };
  }

  RoundResult run() {
    if (!program_.main)
      throw EvalError({}, "program has no main expression");
    Value v = eval(*program_.main);
    if (v.isNbrMap())
      throw EvalError({}, "round result is a neighbour map; fold it with a hood function");
    return {std::move(v), std::move(exports_)};
  }

 private:
  struct Binding {
    std::string name;
    Value value;
  };

  // Restores the path on scope exit.
  struct PathScope {
    PathScope(Evaluator& ev, PathKey key) : ev(ev) { ev.path_.push_back(std::move(key)); }
    ~PathScope() { ev.path_.pop_back(); }
    Evaluator& ev;
  };

  // Function bodies see only their own bindings (captures + parameters),
  // never the caller's locals.
  struct ScopeSwap {
    ScopeSwap(Evaluator& ev, std::vector<Binding> fresh)
        : ev(ev), saved(std::move(ev.scope_)) {
      ev.scope_ = std::move(fresh);
    }
    ~ScopeSwap() { ev.scope_ = std::move(saved); }
    Evaluator& ev;
    std::vector<Binding> saved;
  };

  // Inside pointwise-applied functions exports are forbidden: the body may
  // run once per neighbour, so a rep or nbr there would write one path
  // several times.
  struct NoExportScope {
    NoExportScope(Evaluator& ev) : ev(ev), prev(ev.noExport_) { ev.noExport_ = true; }
    ~NoExportScope() { ev.noExport_ = prev; }
    Evaluator& ev;
    bool prev;
  };

  [[noreturn]] void fail(const std::string& msg) { throw EvalError(path_, msg); }

  const Value* lookupVar(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return &it->value;
    return nullptr;
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        if (std::holds_alternative<bool>(e.lit)) return Value::boolean(std::get<bool>(e.lit));
        if (std::holds_alternative<double>(e.lit)) return Value::num(std::get<double>(e.lit));
        return Value::str(std::get<std::string>(e.lit));

      case Expr::Kind::Var: {
        const Value* v = lookupVar(e.name);
        if (!v) fail("unbound variable '" + e.name + "'");
        return *v;
      }

      case Expr::Kind::BuiltinRef: {
        FuncValue f;
        f.kind = FuncValue::Kind::Builtin;
        f.tag = e.name;
        f.name = e.name;
        return Value::func(std::move(f));
      }

      case Expr::Kind::DefRef: {
        FuncValue f;
        f.kind = FuncValue::Kind::Def;
        f.tag = e.name;
        f.name = e.name;
        return Value::func(std::move(f));
      }

      case Expr::Kind::Lambda: {
        FuncValue f;
        f.kind = FuncValue::Kind::Lambda;
        f.tag = e.tag;
        f.name = e.tag;
        f.lambda = &e;
        auto captured = std::make_shared<std::map<std::string, Value>>();
        for (const Binding& b : scope_) (*captured)[b.name] = b.value;
        f.captured = std::move(captured);
        return Value::func(std::move(f));
      }

      case Expr::Kind::Apply: {
        Value target;
        {
          PathScope ps(*this, e.kids[0]->slot);
          target = eval(*e.kids[0]);
        }
        if (!target.isFunc())
          fail(std::string("applying a non-function (") + target.typeName() + ")");
        std::vector<Value> args;
        args.reserve(e.kids.size() - 1);
        for (size_t i = 1; i < e.kids.size(); ++i) {
          PathScope ps(*this, e.kids[i]->slot);
          args.push_back(eval(*e.kids[i]));
        }
        return apply(target.asFunc(), std::move(args));
      }

      case Expr::Kind::Rep:
        return evalRep(e);

      case Expr::Kind::Nbr:
        return evalNbr(e);
    }
    fail("corrupt expression node");
  }

  // rep(e0){ e }: the field holds e0 at the device's first event and is
  // updated at each later event by applying e to the previous value.
  Value evalRep(const Expr& e) {
    if (noExport_) fail("rep is not allowed inside a pointwise-applied function");
    const Value* prev =
        ctx_.prevExport ? ctx_.prevExport->find(path_) : nullptr;
    Value v;
    if (prev) {
      Value update;
      {
        PathScope ps(*this, e.kids[1]->slot);
        update = eval(*e.kids[1]);
      }
      if (!update.isFunc()) fail("rep update must be a function");
      std::vector<Value> args;
      args.push_back(*prev);
      v = apply(update.asFunc(), std::move(args));
    } else {
      PathScope ps(*this, e.kids[0]->slot);
      v = eval(*e.kids[0]);
      if (opts_.randomizeRepInit) v = randomizeLeaves(v);
    }
    writeExport(v);
    return v;
  }

  // nbr{e}: publish own value of e at this path and gather the latest values
  // the current neighbours published at the same path. Self is excluded.
  Value evalNbr(const Expr& e) {
    if (noExport_) fail("nbr is not allowed inside a pointwise-applied function");
    Value own;
    {
      PathScope ps(*this, e.kids[0]->slot);
      own = eval(*e.kids[0]);
    }
    writeExport(own);
    NbrMap m;
    for (const auto& [d, exp] : ctx_.nbrExports) {
      assert(d != ctx_.self);
      if (const Value* v = exp->find(path_)) m.emplace(d, *v);
    }
    return Value::nbrs(std::move(m));
  }

  void writeExport(const Value& v) {
    if (v.isNbrMap()) fail("a neighbour map cannot be shared or kept as rep state");
    exports_.put(path_, v);
  }

  Value apply(const FuncValue& f, std::vector<Value> args) {
    switch (f.kind) {
      case FuncValue::Kind::Builtin: {
        const BuiltinSpec* spec = findBuiltin(f.name);
        if (!spec) fail("unknown builtin '" + f.name + "'");
        if (!spec->acceptsArity(args.size()))
          fail("'" + f.name + "' called with " + std::to_string(args.size()) + " argument(s)");
        try {
          return invokeBuiltin(*spec, args, builtinCtx_);
        } catch (const TypeError& te) {
          fail(te.what());
        }
      }
      case FuncValue::Kind::Def: {
        const Def* d = program_.findDef(f.name);
        if (!d) fail("unknown function '" + f.name + "'");
        if (d->params.size() != args.size())
          fail("'" + f.name + "' expects " + std::to_string(d->params.size()) +
               " argument(s), got " + std::to_string(args.size()));
        std::vector<Binding> frame;
        frame.reserve(args.size());
        for (size_t i = 0; i < args.size(); ++i)
          frame.push_back({d->params[i], std::move(args[i])});
        ScopeSwap ss(*this, std::move(frame));
        PathScope ps(*this, f.tag);
        return eval(*d->body);
      }
      case FuncValue::Kind::Lambda: {
        const Expr* lam = f.lambda;
        if (!lam) fail("dangling lambda value");
        if (lam->params.size() != args.size())
          fail("lambda expects " + std::to_string(lam->params.size()) +
               " argument(s), got " + std::to_string(args.size()));
        std::vector<Binding> frame;
        if (f.captured)
          for (const auto& [n, v] : *f.captured) frame.push_back({n, v});
        for (size_t i = 0; i < args.size(); ++i)
          frame.push_back({lam->params[i], std::move(args[i])});
        ScopeSwap ss(*this, std::move(frame));
        PathScope ps(*this, f.tag);
        return eval(*lam->kids[0]);
      }
    }
    fail("corrupt function value");
  }

  Value randomizeLeaves(const Value& v) {
    Rng& rng = *opts_.randomizeRepInit;
    if (v.isNum()) return Value::num(rng.nextDouble() * opts_.randomizeRange);
    if (v.isBool()) return Value::boolean(rng.nextBool());
    if (v.isTuple()) {
      Tuple out;
      for (const Value& x : v.asTuple()) out.push_back(randomizeLeaves(x));
      return Value::tuple(std::move(out));
    }
    return v;
  }

  const Program& program_;
  const RoundContext& ctx_;
  const EvalOptions& opts_;
  BuiltinCallCtx builtinCtx_;
  ExportTree exports_;
  Path path_;
  std::vector<Binding> scope_;
  bool noExport_ = false;
};

}  // namespace

std::string pathToString(const Path& p) {
  if (p.empty()) return "/";
  std::string out;
  for (const PathKey& k : p) {
    out += "/";
    out += keyToString(k);
  }
  return out;
}

uint64_t ExportTree::digest() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [path, value] : entries_) {
    mix(pathToString(path));
    mix(value.toString());
  }
  return h;
}

bool ExportTree::operator==(const ExportTree& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  auto ia = entries_.begin();
  auto ib = o.entries_.begin();
  for (; ia != entries_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!valueEquals(ia->second, ib->second)) return false;
  }
  return true;
}

RoundResult evalRound(const Program& program, const RoundContext& ctx,
                      const EvalOptions& options) {
  Evaluator ev(program, ctx, options);
  return ev.run();
}

}  // namespace fieldc
