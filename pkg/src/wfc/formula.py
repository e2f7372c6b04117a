"""Predicate algebra for workflow components.

Formulas mix two universes: boolean *state atoms* (places and executed flags)
and *user atoms* v(x) where v is an authorization, history, or constraint
predicate applied to a user variable.  Equality and disequality between user
variables and existential quantification over users complete the fragment
(monadic first-order logic with equality over the user domain, propositional
over the state atoms).

Textual syntax::

    true  false  p0_1  a_t1(u)  u1=u2  u1!=u2  !F  F & G  F | G  exists u. F

``!`` binds tightest, then ``&``, then ``|``; ``exists u.`` extends as far
right as possible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

__all__ = [
    "Formula", "Const", "Atom", "UserAtom", "UserEq", "UserNeq",
    "Not", "And", "Or", "Exists",
    "TRUE", "FALSE", "conj", "disj", "neg",
    "simplify", "alpha_canonical",
    "state_atoms", "user_preds", "free_user_vars", "exists_depth", "node_count",
    "subst_exec", "subst_hist", "subst_user_var", "eliminate_constraints",
    "parse_formula", "format_formula", "FormulaParseError",
    "eval_concrete", "equivalent", "EquivalenceBudgetError",
]


# --------------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Formula:
    """Base class; all nodes are immutable and compare structurally."""


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    """Boolean state atom: a place or an executed flag."""
    name: str


@dataclass(frozen=True)
class UserAtom(Formula):
    """Unary predicate applied to a user variable, e.g. a_t1(u)."""
    pred: str
    var: str


@dataclass(frozen=True)
class UserEq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class UserNeq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


TRUE = Const(True)
FALSE = Const(False)


def conj(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(args)


def disj(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(args)


def neg(f: Formula) -> Formula:
    return Not(f)


# ----------------------------------------------------------------- collectors

def state_atoms(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    _walk(f, lambda n: out.add(n.name) if isinstance(n, Atom) else None)
    return frozenset(out)


def user_preds(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    _walk(f, lambda n: out.add(n.pred) if isinstance(n, UserAtom) else None)
    return frozenset(out)


def _walk(f: Formula, visit: Callable[[Formula], None]) -> None:
    visit(f)
    if isinstance(f, Not):
        _walk(f.arg, visit)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            _walk(a, visit)
    elif isinstance(f, Exists):
        _walk(f.body, visit)


def free_user_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Const, Atom)):
        return frozenset()
    if isinstance(f, UserAtom):
        return frozenset((f.var,))
    if isinstance(f, (UserEq, UserNeq)):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_user_vars(f.arg)
    if isinstance(f, (And, Or)):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= free_user_vars(a)
        return out
    if isinstance(f, Exists):
        return free_user_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def bound_user_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    _walk(f, lambda n: out.add(n.var) if isinstance(n, Exists) else None)
    return frozenset(out)


def exists_depth(f: Formula) -> int:
    """Maximum number of nested existential binders."""
    if isinstance(f, Not):
        return exists_depth(f.arg)
    if isinstance(f, (And, Or)):
        return max((exists_depth(a) for a in f.args), default=0)
    if isinstance(f, Exists):
        return 1 + exists_depth(f.body)
    return 0


def node_count(f: Formula) -> int:
    n = 0

    def bump(_: Formula) -> None:
        nonlocal n
        n += 1

    _walk(f, bump)
    return n


# -------------------------------------------------------------- normalization

_RANK = {Const: 0, Atom: 1, UserAtom: 2, UserEq: 3, UserNeq: 4,
         Not: 5, And: 6, Or: 7, Exists: 8}


def _key(f: Formula):
    """Total structural order used to canonicalize And/Or argument order."""
    r = _RANK[type(f)]
    if isinstance(f, Const):
        return (r, f.value)
    if isinstance(f, Atom):
        return (r, f.name)
    if isinstance(f, UserAtom):
        return (r, f.pred, f.var)
    if isinstance(f, (UserEq, UserNeq)):
        return (r, f.left, f.right)
    if isinstance(f, Not):
        return (r, _key(f.arg))
    if isinstance(f, (And, Or)):
        return (r, tuple(_key(a) for a in f.args))
    return (r, f.var, _key(f.body))


def _complement(f: Formula) -> Formula | None:
    """Complement of a literal-shaped formula, or None if not literal-shaped."""
    if isinstance(f, (Atom, UserAtom, Const)):
        return Not(f) if not isinstance(f, Const) else Const(not f.value)
    if isinstance(f, UserEq):
        return UserNeq(f.left, f.right)
    if isinstance(f, UserNeq):
        return UserEq(f.left, f.right)
    if isinstance(f, Not):
        return f.arg
    return None


def _nnf(f: Formula) -> Formula:
    if isinstance(f, Not):
        a = f.arg
        if isinstance(a, Const):
            return Const(not a.value)
        if isinstance(a, Not):
            return _nnf(a.arg)
        if isinstance(a, And):
            return Or(tuple(_nnf(Not(x)) for x in a.args))
        if isinstance(a, Or):
            return And(tuple(_nnf(Not(x)) for x in a.args))
        if isinstance(a, UserEq):
            return UserNeq(a.left, a.right)
        if isinstance(a, UserNeq):
            return UserEq(a.left, a.right)
        if isinstance(a, Exists):
            # No universal quantifier in the fragment; negation stays put.
            return Not(Exists(a.var, _nnf(a.body)))
        return Not(a)
    if isinstance(f, And):
        return And(tuple(_nnf(x) for x in f.args))
    if isinstance(f, Or):
        return Or(tuple(_nnf(x) for x in f.args))
    if isinstance(f, Exists):
        return Exists(f.var, _nnf(f.body))
    return f


def _simp_junction(cls, args: tuple[Formula, ...]) -> Formula:
    is_and = cls is And
    unit, absorb = (TRUE, FALSE) if is_and else (FALSE, TRUE)
    flat: list[Formula] = []
    for a in args:
        a = _simp(a)
        if isinstance(a, cls):
            flat.extend(a.args)
        elif a == absorb:
            return absorb
        elif a != unit:
            flat.append(a)
    # dedupe, keep canonical order
    seen: dict = {}
    for a in flat:
        seen.setdefault(_key(a), a)
    items = [seen[k] for k in sorted(seen)]
    # complementary literals next to each other -> contradiction/tautology
    keys = set(seen)
    for a in items:
        c = _complement(a)
        if c is not None and _key(c) in keys:
            return absorb
    # absorption and unit propagation against the dual junction
    dual = Or if is_and else And
    lit_keys = {k for k, a in seen.items() if not isinstance(a, (And, Or))}
    out: list[Formula] = []
    changed = False
    for a in items:
        if isinstance(a, dual):
            inner = list(a.args)
            # absorption: And(x, Or(x, y)) -> And(x); Or(x, And(x, y)) -> Or(x)
            if any(_key(x) in lit_keys for x in inner):
                changed = True
                continue
            # unit propagation: And(x, Or(!x, y)) -> And(x, y)
            kept = [x for x in inner
                    if (c := _complement(x)) is None or _key(c) not in lit_keys]
            if len(kept) != len(inner):
                changed = True
                if not kept:
                    # the inner dual junction collapsed to its unit, which is
                    # the absorbing element of the outer junction
                    return absorb
                a = _simp(kept[0] if len(kept) == 1 else dual(tuple(kept)))
                if a == absorb:
                    return absorb
                if a == unit:
                    continue
        out.append(a)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    res = cls(tuple(out))
    return _simp(res) if changed else res


def _simp(f: Formula) -> Formula:
    if isinstance(f, Const):
        return f
    if isinstance(f, (Atom, UserAtom)):
        return f
    if isinstance(f, UserEq):
        if f.left == f.right:
            return TRUE
        l, r = sorted((f.left, f.right))
        return UserEq(l, r)
    if isinstance(f, UserNeq):
        if f.left == f.right:
            return FALSE
        l, r = sorted((f.left, f.right))
        return UserNeq(l, r)
    if isinstance(f, Not):
        a = _simp(f.arg)
        if isinstance(a, Const):
            return Const(not a.value)
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, And):
        return _simp_junction(And, f.args)
    if isinstance(f, Or):
        return _simp_junction(Or, f.args)
    if isinstance(f, Exists):
        body = _simp(f.body)
        if f.var not in free_user_vars(body):
            return body
        if isinstance(body, Or):
            return _simp(Or(tuple(Exists(f.var, a) for a in body.args)))
        if isinstance(body, And):
            dep = [a for a in body.args if f.var in free_user_vars(a)]
            indep = [a for a in body.args if f.var not in free_user_vars(a)]
            if indep:
                return _simp(And(tuple(indep) + (Exists(f.var, conj(dep)),)))
        return Exists(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


def simplify(f: Formula) -> Formula:
    """Negation normal form + constant folding + absorption, to a fixpoint.

    And/Or arguments come out in a canonical order, so structurally equal
    results of different construction orders compare equal.
    """
    g = _nnf(f)
    for _ in range(50):
        h = _simp(g)
        if h == g:
            return h
        g = h
    return g


def alpha_canonical(f: Formula) -> Formula:
    """Rename bound user variables to depth-indexed names (_e0, _e1, ...).

    Structurally identical formulas that differ only in bound-variable names
    become equal, which lets fixpoint computations deduplicate disjuncts.
    """

    def go(g: Formula, ren: dict[str, str], depth: int) -> Formula:
        if isinstance(g, (Const, Atom)):
            return g
        if isinstance(g, UserAtom):
            return UserAtom(g.pred, ren.get(g.var, g.var))
        if isinstance(g, UserEq):
            return _simp(UserEq(ren.get(g.left, g.left), ren.get(g.right, g.right)))
        if isinstance(g, UserNeq):
            return _simp(UserNeq(ren.get(g.left, g.left), ren.get(g.right, g.right)))
        if isinstance(g, Not):
            return Not(go(g.arg, ren, depth))
        if isinstance(g, And):
            return And(tuple(go(a, ren, depth) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a, ren, depth) for a in g.args))
        if isinstance(g, Exists):
            fresh = f"_e{depth}"
            ren2 = dict(ren)
            ren2[g.var] = fresh
            return Exists(fresh, go(g.body, ren2, depth + 1))
        raise TypeError(f"not a formula: {g!r}")

    return go(f, {}, 0)


# -------------------------------------------------------------- substitutions

def subst_user_var(f: Formula, old: str, new: str) -> Formula:
    """Rename free occurrences of user variable `old` to `new` (capture-avoiding)."""
    if isinstance(f, (Const, Atom)):
        return f
    if isinstance(f, UserAtom):
        return UserAtom(f.pred, new if f.var == old else f.var)
    if isinstance(f, UserEq):
        return UserEq(new if f.left == old else f.left,
                      new if f.right == old else f.right)
    if isinstance(f, UserNeq):
        return UserNeq(new if f.left == old else f.left,
                       new if f.right == old else f.right)
    if isinstance(f, Not):
        return Not(subst_user_var(f.arg, old, new))
    if isinstance(f, And):
        return And(tuple(subst_user_var(a, old, new) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(subst_user_var(a, old, new) for a in f.args))
    if isinstance(f, Exists):
        if f.var == old:
            return f
        if f.var == new:
            fresh = _fresh_var(new, free_user_vars(f.body) | {old, new})
            body = subst_user_var(f.body, f.var, fresh)
            return Exists(fresh, subst_user_var(body, old, new))
        return Exists(f.var, subst_user_var(f.body, old, new))
    raise TypeError(f"not a formula: {f!r}")


def _fresh_var(base: str, taken: frozenset[str] | set[str]) -> str:
    i = 0
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def subst_exec(f: Formula, values: Mapping[str, bool]) -> Formula:
    """Substitute boolean constants for the given state atoms, then simplify."""

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom) and g.name in values:
            return Const(values[g.name])
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(tuple(go(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a) for a in g.args))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        return g

    return simplify(go(f))


def subst_hist(f: Formula, hpred: str, user_var: str, value: bool) -> Formula:
    """Record a history update h(user_var) := value inside `f`, then simplify.

    Every occurrence h(w) becomes (w = user_var and value) or
    (w != user_var and h(w)): the predicate changed at exactly one user.
    """
    if user_var in bound_user_vars(f):
        f = _rename_colliding_binders(f, {user_var})

    def go(g: Formula) -> Formula:
        if isinstance(g, UserAtom) and g.pred == hpred:
            w = g.var
            updated = And((UserEq(w, user_var), Const(value)))
            kept = And((UserNeq(w, user_var), g))
            return Or((updated, kept))
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(tuple(go(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a) for a in g.args))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        return g

    return simplify(go(f))


def _rename_colliding_binders(f: Formula, names: set[str]) -> Formula:
    if isinstance(f, Not):
        return Not(_rename_colliding_binders(f.arg, names))
    if isinstance(f, And):
        return And(tuple(_rename_colliding_binders(a, names) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_rename_colliding_binders(a, names) for a in f.args))
    if isinstance(f, Exists):
        body = _rename_colliding_binders(f.body, names)
        if f.var in names:
            fresh = _fresh_var(f.var, free_user_vars(body) | names)
            return Exists(fresh, subst_user_var(body, f.var, fresh))
        return Exists(f.var, body)
    return f


def eliminate_constraints(f: Formula, constraints: Iterable) -> Formula:
    """Replace constraint atoms c(x) by their defining history formulas.

    `constraints` yields objects with attributes head (the constraint
    predicate), var (the universally quantified user variable of the
    definition), and body (a formula over history atoms of that variable).
    Raises ValueError on duplicate heads or definitions whose bodies mention
    other constraint heads (the expansion must terminate).
    """
    defs: dict[str, tuple[str, Formula]] = {}
    for c in constraints:
        if c.head in defs:
            raise ValueError(f"duplicate always-constraint head: {c.head}")
        defs[c.head] = (c.var, c.body)
    for head, (_, body) in defs.items():
        bad = user_preds(body) & set(defs)
        if bad:
            raise ValueError(
                f"always-constraint body of {head} mentions constraint "
                f"head(s) {sorted(bad)}; bodies must be over history atoms")

    def go(g: Formula) -> Formula:
        if isinstance(g, UserAtom) and g.pred in defs:
            var, body = defs[g.pred]
            return go(subst_user_var(body, var, g.var))
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(tuple(go(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a) for a in g.args))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        return g

    return simplify(go(f))


# ------------------------------------------------------------------- parsing

class FormulaParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_PUNCT = ("!=", "&", "|", "(", ")", ".", "=", "!")


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        matched = False
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(("punct", p, line, col))
                i += len(p)
                col += len(p)
                matched = True
                break
        if matched:
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise FormulaParseError(f"unexpected character {ch!r}", line, col)
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[tuple[str, str, int, int]]):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, value: str | None = None):
        k, v, line, col = self.next()
        if k != kind or (value is not None and v != value):
            want = value if value is not None else kind
            raise FormulaParseError(f"expected {want!r}, found {v or k!r}", line, col)
        return v

    def error(self, msg: str):
        _, v, line, col = self.peek()
        raise FormulaParseError(msg, line, col)

    def parse(self) -> Formula:
        f = self.or_expr()
        k, v, line, col = self.peek()
        if k != "eof":
            raise FormulaParseError(f"unexpected trailing input {v!r}", line, col)
        return f

    def or_expr(self) -> Formula:
        args = [self.and_expr()]
        while self.peek()[:2] == ("punct", "|"):
            self.next()
            args.append(self.and_expr())
        return disj(args)

    def and_expr(self) -> Formula:
        args = [self.unary()]
        while self.peek()[:2] == ("punct", "&"):
            self.next()
            args.append(self.unary())
        return conj(args)

    def unary(self) -> Formula:
        k, v, _, _ = self.peek()
        if (k, v) == ("punct", "!"):
            self.next()
            return Not(self.unary())
        if (k, v) == ("ident", "exists"):
            self.next()
            var = self.expect("ident")
            self.expect("punct", ".")
            return Exists(var, self.or_expr())
        return self.primary()

    def primary(self) -> Formula:
        k, v, line, col = self.next()
        if (k, v) == ("punct", "("):
            f = self.or_expr()
            self.expect("punct", ")")
            return f
        if k == "ident":
            if v == "true":
                return TRUE
            if v == "false":
                return FALSE
            nk, nv, _, _ = self.peek()
            if (nk, nv) == ("punct", "("):
                self.next()
                var = self.expect("ident")
                self.expect("punct", ")")
                return UserAtom(v, var)
            if (nk, nv) == ("punct", "="):
                self.next()
                return UserEq(v, self.expect("ident"))
            if (nk, nv) == ("punct", "!="):
                self.next()
                return UserNeq(v, self.expect("ident"))
            return Atom(v)
        raise FormulaParseError(f"expected a formula, found {v or k!r}", line, col)


def parse_formula(text: str) -> Formula:
    """Parse the textual formula syntax; raises FormulaParseError with position."""
    return _Parser(_tokenize(text)).parse()


def format_formula(f: Formula) -> str:
    """Render a formula in the textual syntax; parse_formula inverts it."""
    return _fmt(f, 0)


# context levels: 0 = top, 1 = Or argument, 2 = And argument, 3 = Not argument.
# Arguments are parenthesized exactly when re-parsing could regroup them, so
# printing is an exact inverse of parsing (same tree back, no flattening).
def _fmt(f: Formula, level: int) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, UserAtom):
        return f"{f.pred}({f.var})"
    if isinstance(f, UserEq):
        return f"{f.left}={f.right}"
    if isinstance(f, UserNeq):
        return f"{f.left}!={f.right}"
    if isinstance(f, Not):
        return "!" + _fmt(f.arg, 3)
    if isinstance(f, And):
        s = " & ".join(_fmt(a, 2) for a in f.args)
        return f"({s})" if level >= 2 else s
    if isinstance(f, Or):
        s = " | ".join(_fmt(a, 1) for a in f.args)
        return f"({s})" if level >= 1 else s
    if isinstance(f, Exists):
        s = f"exists {f.var}. {_fmt(f.body, 0)}"
        return f"({s})" if level >= 1 else s
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- evaluation

def eval_concrete(f: Formula,
                  state: Mapping[str, bool],
                  users: Iterable[str],
                  pred_holds: Callable[[str, str], bool],
                  env: Mapping[str, str] | None = None) -> bool:
    """Evaluate under a concrete state, user domain, and predicate valuation.

    `pred_holds(pred, user)` decides every user atom; `env` assigns users to
    free user variables.  Existentials range over `users`.
    """
    users = tuple(users)
    env = dict(env or {})

    def go(g: Formula, e: dict[str, str]) -> bool:
        if isinstance(g, Const):
            return g.value
        if isinstance(g, Atom):
            return bool(state[g.name])
        if isinstance(g, UserAtom):
            return bool(pred_holds(g.pred, e[g.var]))
        if isinstance(g, UserEq):
            return e[g.left] == e[g.right]
        if isinstance(g, UserNeq):
            return e[g.left] != e[g.right]
        if isinstance(g, Not):
            return not go(g.arg, e)
        if isinstance(g, And):
            return all(go(a, e) for a in g.args)
        if isinstance(g, Or):
            return any(go(a, e) for a in g.args)
        if isinstance(g, Exists):
            for u in users:
                e2 = dict(e)
                e2[g.var] = u
                if go(g.body, e2):
                    return True
            return False
        raise TypeError(f"not a formula: {g!r}")

    return go(f, env)


# --------------------------------------------------------------- equivalence

class EquivalenceBudgetError(RuntimeError):
    """The exhaustive equivalence sweep would exceed the operation budget."""


DEFAULT_EQUIV_BUDGET = 4_000_000_000


def equivalent(k1: Formula, k2: Formula, *,
               budget: int = DEFAULT_EQUIV_BUDGET) -> bool:
    """Decide logical equivalence by finite enumeration.

    The user domain is enumerated at sizes 1..n+1 where n is the number of
    free user variables plus the maximum existential nesting depth (the live
    variable width; a small-model bound for this monadic fragment).  For each
    domain size, every interpretation of the unary user predicates and every
    assignment of free variables is combined with a vectorized sweep over all
    valuations of the boolean state atoms.

    Raises ValueError if a name is used as a state atom in one formula and as
    a user predicate in the other, and EquivalenceBudgetError if the sweep
    would exceed `budget` elementary operations.
    """
    a = alpha_canonical(simplify(k1))
    b = alpha_canonical(simplify(k2))
    if a == b:
        return True

    atoms = sorted(state_atoms(a) | state_atoms(b))
    preds = sorted(user_preds(a) | user_preds(b))
    clash = set(atoms) & set(preds)
    if clash:
        raise ValueError(
            f"name(s) used both as state atom and user predicate: {sorted(clash)}")
    free = sorted(free_user_vars(a) | free_user_vars(b))
    n = len(free) + max(exists_depth(a), exists_depth(b))
    sizes = range(1, n + 2)

    nodes = node_count(a) + node_count(b)
    width = 1 << len(atoms)
    total = sum(((1 << s) ** len(preds)) * (s ** len(free)) for s in sizes)
    if total * nodes * width > budget:
        raise EquivalenceBudgetError(
            f"equivalence sweep needs ~{total * nodes * width:.3g} ops "
            f"(budget {budget:.3g}); {len(atoms)} state atoms, "
            f"{len(preds)} user predicates, domain bound {n + 1}")

    index = {name: i for i, name in enumerate(atoms)}
    grid = np.arange(width, dtype=np.uint32)
    columns = [((grid >> i) & 1).astype(bool) for i in range(len(atoms))]

    def eval_vec(g: Formula, interp: dict[str, int], env: dict[str, int]):
        if isinstance(g, Const):
            return np.full(width, g.value, dtype=bool)
        if isinstance(g, Atom):
            return columns[index[g.name]]
        if isinstance(g, UserAtom):
            val = bool((interp[g.pred] >> env[g.var]) & 1)
            return np.full(width, val, dtype=bool)
        if isinstance(g, UserEq):
            return np.full(width, env[g.left] == env[g.right], dtype=bool)
        if isinstance(g, UserNeq):
            return np.full(width, env[g.left] != env[g.right], dtype=bool)
        if isinstance(g, Not):
            return ~eval_vec(g.arg, interp, env)
        if isinstance(g, And):
            acc = eval_vec(g.args[0], interp, env)
            for x in g.args[1:]:
                acc = acc & eval_vec(x, interp, env)
            return acc
        if isinstance(g, Or):
            acc = eval_vec(g.args[0], interp, env)
            for x in g.args[1:]:
                acc = acc | eval_vec(x, interp, env)
            return acc
        if isinstance(g, Exists):
            acc = np.zeros(width, dtype=bool)
            for d in range(env["__size__"]):
                env2 = dict(env)
                env2[g.var] = d
                acc = acc | eval_vec(g.body, interp, env2)
            return acc
        raise TypeError(f"not a formula: {g!r}")

    for s in sizes:
        for masks in itertools.product(range(1 << s), repeat=len(preds)):
            interp = dict(zip(preds, masks))
            for assign in itertools.product(range(s), repeat=len(free)):
                env = dict(zip(free, assign))
                env["__size__"] = s
                va = eval_vec(a, interp, env)
                vb = eval_vec(b, interp, env)
                if not np.array_equal(va, vb):
                    return False
    return True
