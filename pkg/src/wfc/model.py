"""Workflow components as symbolic transition systems.

A component bundles five disjoint variable sets (places, executed flags,
authorization / history / constraint predicates), a set of one-shot
transitions, "always" constraints tying constraint predicates to history, and
an interface that marks which variables are open for composition.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .formula import (
    And, Atom, Const, Formula, Not, TRUE, UserAtom, conj, eliminate_constraints,
    exists_depth, format_formula, free_user_vars, state_atoms, user_preds,
)

__all__ = [
    "USER_VAR", "PLACE", "EXECUTED", "AUTH", "HISTORY", "CONSTRAINT",
    "VarId", "VarSets", "Transition", "AlwaysConstraint", "Interface",
    "Component", "Config", "ComponentError", "ValidationReport",
    "make_transition", "make_component", "validate_component",
    "initial_config", "structural_eq", "resolved_guard",
]

USER_VAR = "u"   # canonical bound user variable of a transition

PLACE = "place"
EXECUTED = "executed"
AUTH = "auth"
HISTORY = "history"
CONSTRAINT = "constraint"


class ComponentError(ValueError):
    """A component or an operation precondition is malformed."""


@dataclass(frozen=True)
class VarId:
    kind: str
    name: str


@dataclass(frozen=True)
class VarSets:
    """The five pairwise disjoint variable sets of a component."""
    places: frozenset[str]
    executed: frozenset[str]
    auth: frozenset[str]
    history: frozenset[str]
    constraint: frozenset[str]

    def kind_of(self, name: str) -> str | None:
        if name in self.places:
            return PLACE
        if name in self.executed:
            return EXECUTED
        if name in self.auth:
            return AUTH
        if name in self.history:
            return HISTORY
        if name in self.constraint:
            return CONSTRAINT
        return None

    def state_vars(self) -> frozenset[str]:
        return self.places | self.executed

    def user_vars(self) -> frozenset[str]:
        return self.auth | self.history | self.constraint

    def all_names(self) -> frozenset[str]:
        return self.state_vars() | self.user_vars()

    def all_ids(self) -> tuple[VarId, ...]:
        out = [VarId(PLACE, n) for n in sorted(self.places)]
        out += [VarId(EXECUTED, n) for n in sorted(self.executed)]
        out += [VarId(AUTH, n) for n in sorted(self.auth)]
        out += [VarId(HISTORY, n) for n in sorted(self.history)]
        out += [VarId(CONSTRAINT, n) for n in sorted(self.constraint)]
        return tuple(out)


def _canon_assign(m: Mapping[str, bool] | Iterable[tuple[str, bool]]) -> tuple[tuple[str, bool], ...]:
    items = dict(m)
    return tuple(sorted(items.items()))


@dataclass(frozen=True)
class Transition:
    """One-shot transition; fires at most once, guarded by its executed flag.

    en_ec is a formula over places/executed flags, en_auth a quantifier-free
    formula over user atoms at the canonical bound variable.  act_ec assigns
    booleans to places/flags, act_auth records history updates at the bound
    user.  Dummy transitions (user_bound=False) have en_auth true and no
    history updates.
    """
    task: str
    user_bound: bool
    done_flag: str
    en_ec: Formula
    en_auth: Formula
    act_ec: tuple[tuple[str, bool], ...]
    act_auth: tuple[tuple[str, bool], ...]

    @property
    def act_ec_map(self) -> dict[str, bool]:
        return dict(self.act_ec)

    @property
    def act_auth_map(self) -> dict[str, bool]:
        return dict(self.act_auth)

    def history_pred(self) -> str | None:
        """The history predicate this transition sets true, if any."""
        for h, v in self.act_auth:
            if v:
                return h
        return None


@dataclass(frozen=True)
class AlwaysConstraint:
    """For all users: head(var) holds iff body (a formula over history atoms)."""
    head: str
    var: str
    body: Formula


@dataclass(frozen=True)
class Interface:
    auth: frozenset[str]
    places_in: frozenset[str]
    places_out: frozenset[str]
    hist_out: frozenset[str]
    constr_in: frozenset[str]


@dataclass(frozen=True)
class Component:
    name: str
    vars: VarSets
    transitions: tuple[Transition, ...]
    always: tuple[AlwaysConstraint, ...]
    interface: Interface
    final: Formula

    def transition(self, task: str) -> Transition:
        for tr in self.transitions:
            if tr.task == task:
                return tr
        raise KeyError(f"no transition named {task!r} in component {self.name!r}")

    def human_transitions(self) -> tuple[Transition, ...]:
        return tuple(tr for tr in self.transitions if tr.user_bound)

    def dummy_transitions(self) -> tuple[Transition, ...]:
        return tuple(tr for tr in self.transitions if not tr.user_bound)

    def task_of_history(self) -> dict[str, str]:
        """Map history predicate -> task that records it."""
        out: dict[str, str] = {}
        for tr in self.transitions:
            h = tr.history_pred()
            if h is not None:
                out[h] = tr.task
        return out


@dataclass(frozen=True)
class Config:
    """A runtime configuration: marking over places/flags plus ordered history."""
    marking: tuple[tuple[str, bool], ...]
    executed: frozenset[str]
    history: tuple[tuple[str, str], ...]

    @property
    def marking_map(self) -> dict[str, bool]:
        return dict(self.marking)

    def history_atoms(self, c: "Component") -> frozenset[tuple[str, str]]:
        """The (history predicate, user) pairs recorded by this history."""
        facts: set[tuple[str, str]] = set()
        for task, user in self.history:
            for h, v in c.transition(task).act_auth:
                if v:
                    facts.add((h, user))
                else:
                    facts.discard((h, user))
        return frozenset(facts)


# ------------------------------------------------------------------ builders

def make_transition(task: str, *,
                    frm: Iterable[str],
                    to: Iterable[str],
                    user_bound: bool,
                    auth_atom: str | None = None,
                    guard: Formula = TRUE,
                    done_flag: str | None = None) -> Transition:
    """Build a one-shot transition from its consumed and produced places.

    en_ec = (all `frm` places marked) and not-yet-executed; act_ec clears
    `frm`, marks `to`, and sets the executed flag.  For user-bound
    transitions, en_auth = auth_atom(u) & guard and the history predicate
    h_<task> is recorded; dummies take neither an auth atom nor a guard.
    """
    frm = tuple(sorted(set(frm)))
    to = tuple(sorted(set(to)))
    overlap = set(frm) & set(to)
    if overlap:
        raise ComponentError(
            f"transition {task!r} both consumes and produces {sorted(overlap)}")
    d = done_flag if done_flag is not None else f"d_{task}"
    en_ec = conj([Atom(p) for p in frm] + [Not(Atom(d))])
    act_ec: dict[str, bool] = {p: False for p in frm}
    act_ec.update({p: True for p in to})
    act_ec[d] = True
    if user_bound:
        a = auth_atom if auth_atom is not None else f"a_{task}"
        en_auth = conj([UserAtom(a, USER_VAR)] +
                       ([guard] if guard != TRUE else []))
        act_auth = {f"h_{task}": True}
    else:
        if auth_atom is not None or guard != TRUE:
            raise ComponentError(
                f"dummy transition {task!r} cannot carry an auth atom or guard")
        en_auth = TRUE
        act_auth = {}
    return Transition(task=task, user_bound=user_bound, done_flag=d,
                      en_ec=en_ec, en_auth=en_auth,
                      act_ec=_canon_assign(act_ec),
                      act_auth=_canon_assign(act_auth))


def default_final(places_out: Iterable[str]) -> Formula:
    return conj([Atom(p) for p in sorted(places_out)])


def make_component(name: str, *,
                   places: Iterable[str],
                   transitions: Iterable[Transition],
                   always: Iterable[AlwaysConstraint] = (),
                   places_in: Iterable[str],
                   places_out: Iterable[str],
                   hist_out: Iterable[str] = (),
                   constr_in: Iterable[str] = (),
                   extra_constraints: Iterable[str] = (),
                   auth: Iterable[str] | None = None,
                   final: Formula | None = None) -> Component:
    """Assemble a component, deriving executed/auth/history/constraint sets.

    Executed flags and history predicates come from the transitions; auth
    defaults to every auth atom mentioned in a guard; constraint variables are
    the always-constraint heads, the imported ones, any guard atom that is
    neither auth nor history, and `extra_constraints` (declared but inert).
    """
    transitions = tuple(sorted(transitions, key=lambda tr: tr.task))
    always = tuple(sorted(always, key=lambda a: a.head))
    executed = frozenset(tr.done_flag for tr in transitions)
    history: set[str] = set()
    for tr in transitions:
        history.update(h for h, _ in tr.act_auth)
    heads = {a.head for a in always}
    constr = set(heads) | set(constr_in) | set(extra_constraints)
    guard_preds: set[str] = set()
    for tr in transitions:
        guard_preds |= set(user_preds(tr.en_auth))
    auth_atoms = set(auth) if auth is not None else set()
    if auth is None:
        # first user atom of each human guard is its auth atom by construction;
        # classify the rest: history stays history, known constraints stay,
        # anything else referenced in a guard is an inert constraint variable
        for tr in transitions:
            if tr.user_bound:
                preds = _guard_pred_order(tr.en_auth)
                if preds:
                    auth_atoms.add(preds[0])
    for p in guard_preds:
        if p not in auth_atoms and p not in history and p not in constr:
            constr.add(p)
    vs = VarSets(places=frozenset(places),
                 executed=executed,
                 auth=frozenset(auth_atoms),
                 history=frozenset(history),
                 constraint=frozenset(constr))
    iface = Interface(auth=frozenset(auth_atoms),
                      places_in=frozenset(places_in),
                      places_out=frozenset(places_out),
                      hist_out=frozenset(hist_out),
                      constr_in=frozenset(constr_in))
    fin = final if final is not None else default_final(places_out)
    return Component(name=name, vars=vs, transitions=transitions,
                     always=always, interface=iface, final=fin)


def _guard_pred_order(f: Formula) -> list[str]:
    """User predicates of a guard in syntactic (left-to-right) order."""
    from .formula import Exists, Or

    out: list[str] = []

    def go(g: Formula) -> None:
        if isinstance(g, UserAtom):
            if g.pred not in out:
                out.append(g.pred)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                go(a)
        elif isinstance(g, Exists):
            go(g.body)

    go(f)
    return out


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_component(c: Component) -> ValidationReport:
    """Check the structural invariants of a component.

    Violations make the component unusable for the algebra; warnings flag
    benign oddities (most notably constraint atoms that are neither imported
    nor defined, which evaluate to vacuously true).
    """
    rep = ValidationReport()
    v = c.vars
    sets = {"places": v.places, "executed": v.executed, "auth": v.auth,
            "history": v.history, "constraint": v.constraint}
    names = list(sets.items())
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            shared = names[i][1] & names[j][1]
            if shared:
                rep.violations.append(
                    f"{names[i][0]} and {names[j][0]} share variable(s) "
                    f"{sorted(shared)}")

    tasks_seen: set[str] = set()
    defined_heads = {a.head for a in c.always}
    for tr in c.transitions:
        where = f"transition {tr.task!r}"
        if tr.task in tasks_seen:
            rep.violations.append(f"duplicate task name {tr.task!r}")
        tasks_seen.add(tr.task)
        if tr.done_flag not in v.executed:
            rep.violations.append(
                f"{where}: executed flag {tr.done_flag!r} not in executed set")
        bad = state_atoms(tr.en_ec) - v.state_vars()
        if bad:
            rep.violations.append(
                f"{where}: en_ec mentions unknown state variable(s) {sorted(bad)}")
        if user_preds(tr.en_ec) or free_user_vars(tr.en_ec):
            rep.violations.append(f"{where}: en_ec must be user-free")
        if not _has_conjunct(tr.en_ec, Not(Atom(tr.done_flag))):
            rep.violations.append(
                f"{where}: en_ec lacks the one-shot literal !{tr.done_flag}")
        acts = tr.act_ec_map
        bad = set(acts) - v.state_vars()
        if bad:
            rep.violations.append(
                f"{where}: act_ec assigns unknown variable(s) {sorted(bad)}")
        if acts.get(tr.done_flag) is not True:
            rep.violations.append(
                f"{where}: act_ec must set {tr.done_flag} := true")
        bad = {h for h, _ in tr.act_auth} - v.history
        if bad:
            rep.violations.append(
                f"{where}: act_auth assigns non-history variable(s) {sorted(bad)}")
        if tr.user_bound:
            if state_atoms(tr.en_auth):
                rep.violations.append(f"{where}: en_auth must be state-free")
            if exists_depth(tr.en_auth) > 0:
                rep.violations.append(f"{where}: en_auth must be quantifier-free")
            vs = free_user_vars(tr.en_auth)
            if vs - {USER_VAR}:
                rep.violations.append(
                    f"{where}: en_auth mentions foreign user variable(s) "
                    f"{sorted(vs - {USER_VAR})}")
            bad = user_preds(tr.en_auth) - (v.auth | v.constraint)
            if bad:
                rep.violations.append(
                    f"{where}: en_auth mentions unknown predicate(s) {sorted(bad)}")
            for p in sorted(user_preds(tr.en_auth) & v.constraint):
                if p not in c.interface.constr_in and p not in defined_heads:
                    rep.warnings.append(
                        f"{where}: constraint atom {p} is neither imported nor "
                        f"defined; it evaluates to vacuously true")
        else:
            if tr.en_auth != TRUE or tr.act_auth:
                rep.violations.append(
                    f"{where}: dummy transitions take no auth guard or history update")

    i = c.interface
    if not i.auth <= v.auth:
        rep.violations.append(
            f"interface auth not a subset of auth variables: "
            f"{sorted(i.auth - v.auth)}")
    if not i.places_in <= v.places:
        rep.violations.append(
            f"places_in not a subset of places: {sorted(i.places_in - v.places)}")
    if not i.places_out <= v.places:
        rep.violations.append(
            f"places_out not a subset of places: {sorted(i.places_out - v.places)}")
    if not i.hist_out <= v.history:
        rep.violations.append(
            f"hist_out not a subset of history variables: "
            f"{sorted(i.hist_out - v.history)}")
    if not i.constr_in <= v.constraint:
        rep.violations.append(
            f"constr_in not a subset of constraint variables: "
            f"{sorted(i.constr_in - v.constraint)}")
    produced_true: dict[str, int] = {}
    produced_false: set[str] = set()
    for tr in c.transitions:
        for p, b in tr.act_ec:
            if p in v.places:
                if b:
                    produced_true[p] = produced_true.get(p, 0) + 1
                else:
                    produced_false.add(p)
    for p in sorted(i.places_in):
        if p in produced_true:
            rep.violations.append(
                f"input place {p} is assigned true by a transition")
    for p in sorted(i.places_out):
        if p not in produced_true:
            rep.violations.append(
                f"output place {p} is never assigned true")
        if p in produced_false:
            rep.violations.append(
                f"output place {p} is assigned false by a transition")

    heads_seen: set[str] = set()
    for a in c.always:
        where = f"always constraint for {a.head!r}"
        if a.head in heads_seen:
            rep.violations.append(f"duplicate always-constraint head {a.head!r}")
        heads_seen.add(a.head)
        if a.head not in v.constraint:
            rep.violations.append(
                f"{where}: head is not a constraint variable")
        if a.head in i.constr_in:
            rep.violations.append(
                f"{where}: always constraint mentions constr_in variable")
        if state_atoms(a.body):
            rep.violations.append(f"{where}: body must be state-free")
        bad = user_preds(a.body) - i.hist_out
        if bad:
            rep.violations.append(
                f"{where}: body mentions variable(s) outside hist_out: {sorted(bad)}")
        extra_vars = free_user_vars(a.body) - {a.var}
        if extra_vars:
            rep.violations.append(
                f"{where}: body mentions foreign user variable(s) {sorted(extra_vars)}")

    bad = state_atoms(c.final) - v.state_vars()
    if bad:
        rep.violations.append(
            f"final predicate mentions unknown state variable(s) {sorted(bad)}")
    bad = user_preds(c.final) - v.user_vars()
    if bad:
        rep.violations.append(
            f"final predicate mentions unknown predicate(s) {sorted(bad)}")
    return rep


def _has_conjunct(f: Formula, lit: Formula) -> bool:
    if f == lit:
        return True
    if isinstance(f, And):
        return any(_has_conjunct(a, lit) for a in f.args)
    return False


def require_valid(c: Component) -> None:
    rep = validate_component(c)
    if not rep.ok:
        raise ComponentError(
            f"component {c.name!r} is invalid: " + "; ".join(rep.violations))


# ----------------------------------------------------------------- semantics

def initial_config(c: Component) -> Config:
    """Initial marking (a token in every input place), nothing executed."""
    marking = {p: (p in c.interface.places_in) for p in sorted(c.vars.places)}
    marking.update({d: False for d in sorted(c.vars.executed)})
    return Config(marking=tuple(sorted(marking.items())),
                  executed=frozenset(), history=())


def resolved_guard(c: Component, tr: Transition) -> Formula:
    """en_auth with defined constraint atoms replaced by their history bodies.

    Imported or undeclared constraint atoms remain as atoms; callers decide
    whether those are vacuously true (standalone evaluation) or resolved by a
    composition.
    """
    return eliminate_constraints(tr.en_auth, c.always)


def structural_eq(a: Component, b: Component) -> bool:
    """Structural equality ignoring the component name."""
    return dataclasses.replace(a, name=b.name) == b


def describe(c: Component) -> str:
    """One-paragraph human summary (used by the CLI check command)."""
    i = c.interface
    return (f"component {c.name}: {len(c.vars.places)} places, "
            f"{len(c.transitions)} transitions "
            f"({len(c.human_transitions())} user-bound), "
            f"{len(c.always)} always constraint(s); "
            f"in={sorted(i.places_in)} out={sorted(i.places_out)} "
            f"hist_out={sorted(i.hist_out)} constr_in={sorted(i.constr_in)}; "
            f"final: {format_formula(c.final)}")
