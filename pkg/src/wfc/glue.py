"""Composition of workflow components by gluing.

A gluing spec pairs input places of one component with output places of the
other (execution-flow gluing) and defines imported constraint predicates in
terms of the other component's exported history (authorization gluing).
Gluing is commutative and associative up to structural equality, so n-ary
composition folds the binary operator in any order.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass

from .formula import Formula, free_user_vars, state_atoms, user_preds
from .model import (
    AlwaysConstraint, Component, ComponentError, Interface, Transition,
    VarSets, _canon_assign, default_final, make_component, make_transition,
    require_valid,
)

__all__ = ["GluingSpec", "glue", "glue_fold", "seq", "parallel", "alternative"]


@dataclass(frozen=True)
class GluingSpec:
    """Execution-flow pairs (input place, output place) and cross-component
    always constraints defining imported constraint predicates."""
    ec: tuple[tuple[str, str], ...] = ()
    auth: tuple[AlwaysConstraint, ...] = ()

    def union(self, other: "GluingSpec") -> "GluingSpec":
        return GluingSpec(ec=self.ec + other.ec, auth=self.auth + other.auth)


def _check_spec(c1: Component, c2: Component, g: GluingSpec) -> None:
    seen_in: set[str] = set()
    for pin, pout in g.ec:
        fits = ((pin in c1.interface.places_in and pout in c2.interface.places_out)
                or (pin in c2.interface.places_in and pout in c1.interface.places_out))
        if not fits:
            raise ComponentError(
                f"flow pair ({pin}, {pout}) does not connect an input place of "
                f"one component to an output place of the other")
        if pin in seen_in:
            raise ComponentError(f"input place {pin} glued more than once")
        seen_in.add(pin)
    heads: set[str] = set()
    for a in g.auth:
        if a.head in heads:
            raise ComponentError(f"duplicate gluing constraint head {a.head}")
        heads.add(a.head)
        if a.head in c1.interface.constr_in:
            exporter = c2
        elif a.head in c2.interface.constr_in:
            exporter = c1
        else:
            raise ComponentError(
                f"gluing constraint head {a.head} is not an imported "
                f"constraint variable of either component")
        if state_atoms(a.body):
            raise ComponentError(
                f"gluing constraint for {a.head} must be state-free")
        bad = user_preds(a.body) - exporter.interface.hist_out
        if bad:
            raise ComponentError(
                f"gluing constraint for {a.head} mentions non-exported "
                f"history variable(s) {sorted(bad)}")
        extra = free_user_vars(a.body) - {a.var}
        if extra:
            raise ComponentError(
                f"gluing constraint for {a.head} mentions foreign user "
                f"variable(s) {sorted(extra)}")


def _rewrite(tr: Transition, pairs: tuple[tuple[str, str], ...]) -> Transition:
    """Add pin := b for every flow pair whose output place the transition
    assigns b; this is how a token crosses the component boundary."""
    acts = tr.act_ec_map
    adds = {pin: acts[pout] for pin, pout in pairs if pout in acts}
    if not adds:
        return tr
    acts.update(adds)
    return dataclasses.replace(tr, act_ec=_canon_assign(acts))


def glue(c1: Component, c2: Component, g: GluingSpec, *,
         name: str | None = None) -> Component:
    """Glue two disjointly-named components along a gluing spec."""
    require_valid(c1)
    require_valid(c2)
    shared = c1.vars.all_names() & c2.vars.all_names()
    if shared:
        raise ComponentError(
            f"components {c1.name!r} and {c2.name!r} share variable name(s) "
            f"{sorted(shared)}")
    shared_tasks = ({tr.task for tr in c1.transitions}
                    & {tr.task for tr in c2.transitions})
    if shared_tasks:
        raise ComponentError(
            f"components share task name(s) {sorted(shared_tasks)}")
    _check_spec(c1, c2, g)

    transitions = tuple(sorted(
        (_rewrite(tr, g.ec) for tr in c1.transitions + c2.transitions),
        key=lambda tr: tr.task))
    always = tuple(sorted(c1.always + c2.always + g.auth, key=lambda a: a.head))
    v1, v2 = c1.vars, c2.vars
    vs = VarSets(places=v1.places | v2.places,
                 executed=v1.executed | v2.executed,
                 auth=v1.auth | v2.auth,
                 history=v1.history | v2.history,
                 constraint=v1.constraint | v2.constraint)
    glued_places = {p for pair in g.ec for p in pair}
    heads = {a.head for a in g.auth}
    i1, i2 = c1.interface, c2.interface
    iface = Interface(
        auth=i1.auth | i2.auth,
        places_in=(i1.places_in | i2.places_in) - glued_places,
        places_out=(i1.places_out | i2.places_out) - glued_places,
        hist_out=i1.hist_out | i2.hist_out,
        constr_in=(i1.constr_in | i2.constr_in) - heads)
    out = Component(name=name or f"{c1.name}+{c2.name}",
                    vars=vs, transitions=transitions, always=always,
                    interface=iface, final=default_final(iface.places_out))
    require_valid(out)
    return out


def glue_fold(components: list[Component], g: GluingSpec, *,
              name: str | None = None) -> Component:
    """Left-fold binary gluing over `components`, applying at each step the
    subset of `g` that connects the operands; unused assertions are an error."""
    if not components:
        raise ComponentError("nothing to compose")
    used_ec: set[tuple[str, str]] = set()
    used_auth: set[str] = set()
    acc = components[0]
    for nxt in components[1:]:
        ec = tuple(p for p in g.ec if p not in used_ec and _ec_fits(acc, nxt, p))
        auth = tuple(a for a in g.auth
                     if a.head not in used_auth and _auth_fits(acc, nxt, a))
        acc = glue(acc, nxt, GluingSpec(ec=ec, auth=auth))
        used_ec.update(ec)
        used_auth.update(a.head for a in auth)
    left_ec = [p for p in g.ec if p not in used_ec]
    left_auth = [a.head for a in g.auth if a.head not in used_auth]
    if left_ec or left_auth:
        raise ComponentError(
            f"gluing assertions never became applicable: "
            f"flows {left_ec}, constraints {left_auth}")
    if name is not None:
        acc = dataclasses.replace(acc, name=name)
    return acc


def _ec_fits(c1: Component, c2: Component, pair: tuple[str, str]) -> bool:
    pin, pout = pair
    return ((pin in c1.interface.places_in and pout in c2.interface.places_out)
            or (pin in c2.interface.places_in and pout in c1.interface.places_out))


def _auth_fits(c1: Component, c2: Component, a: AlwaysConstraint) -> bool:
    if a.head in c1.interface.constr_in:
        return user_preds(a.body) <= c2.interface.hist_out
    if a.head in c2.interface.constr_in:
        return user_preds(a.body) <= c1.interface.hist_out
    return False


# ----------------------------------------------------------------- patterns

_instances = itertools.count()


def _tag(tag: str | None) -> str:
    return tag if tag is not None else str(next(_instances))


def _single_io(c: Component) -> tuple[str, str]:
    i = c.interface
    if len(i.places_in) != 1 or len(i.places_out) != 1:
        raise ComponentError(
            f"pattern composition needs single-input single-output "
            f"components; {c.name!r} has in={sorted(i.places_in)} "
            f"out={sorted(i.places_out)}")
    (pin,), (pout,) = i.places_in, i.places_out
    return pin, pout


def seq(c1: Component, c2: Component, *,
        name: str | None = None) -> tuple[Component, GluingSpec]:
    """Sequential pattern: c2's input place is fed by c1's output place."""
    _, pout = _single_io(c1)
    pin, _ = _single_io(c2)
    g = GluingSpec(ec=((pin, pout),))
    return glue(c1, c2, g, name=name or f"seq({c1.name},{c2.name})"), g


def parallel(c1: Component, c2: Component, *, tag: str | None = None,
             name: str | None = None) -> Component:
    """Parallel pattern: an and-split feeds both components, an and-join
    collects both outputs."""
    t = _tag(tag)
    asplit = make_component(
        f"and_split_{t}",
        places=[f"p0_as{t}", f"p1_as{t}", f"p2_as{t}"],
        transitions=[make_transition(
            f"as{t}", frm=[f"p0_as{t}"], to=[f"p1_as{t}", f"p2_as{t}"],
            user_bound=False)],
        places_in=[f"p0_as{t}"],
        places_out=[f"p1_as{t}", f"p2_as{t}"])
    ajoin = make_component(
        f"and_join_{t}",
        places=[f"q0_aj{t}", f"q1_aj{t}", f"q2_aj{t}"],
        transitions=[make_transition(
            f"aj{t}", frm=[f"q0_aj{t}", f"q1_aj{t}"], to=[f"q2_aj{t}"],
            user_bound=False)],
        places_in=[f"q0_aj{t}", f"q1_aj{t}"],
        places_out=[f"q2_aj{t}"])
    pin1, pout1 = _single_io(c1)
    pin2, pout2 = _single_io(c2)
    acc = glue(asplit, c1, GluingSpec(ec=((pin1, f"p1_as{t}"),)))
    acc = glue(acc, c2, GluingSpec(ec=((pin2, f"p2_as{t}"),)))
    acc = glue(acc, ajoin, GluingSpec(ec=((f"q0_aj{t}", pout1),
                                          (f"q1_aj{t}", pout2))))
    return dataclasses.replace(acc, name=name or f"par({c1.name},{c2.name})")


def alternative(c1: Component, c2: Component, *, tag: str | None = None,
                name: str | None = None) -> Component:
    """Alternative pattern: an or-split routes the token to exactly one
    component, an or-join forwards whichever output arrives.

    Both or-split transitions share one executed flag, so firing either
    disables the other; likewise for the or-join."""
    t = _tag(tag)
    osplit = make_component(
        f"or_split_{t}",
        places=[f"p0_os{t}", f"p1_os{t}", f"p2_os{t}"],
        transitions=[
            make_transition(f"os{t}a", frm=[f"p0_os{t}"], to=[f"p1_os{t}"],
                            user_bound=False, done_flag=f"d_os{t}"),
            make_transition(f"os{t}b", frm=[f"p0_os{t}"], to=[f"p2_os{t}"],
                            user_bound=False, done_flag=f"d_os{t}"),
        ],
        places_in=[f"p0_os{t}"],
        places_out=[f"p1_os{t}", f"p2_os{t}"])
    ojoin = make_component(
        f"or_join_{t}",
        places=[f"q0_oj{t}", f"q1_oj{t}", f"q2_oj{t}"],
        transitions=[
            make_transition(f"oj{t}a", frm=[f"q0_oj{t}"], to=[f"q2_oj{t}"],
                            user_bound=False, done_flag=f"d_oj{t}"),
            make_transition(f"oj{t}b", frm=[f"q1_oj{t}"], to=[f"q2_oj{t}"],
                            user_bound=False, done_flag=f"d_oj{t}"),
        ],
        places_in=[f"q0_oj{t}", f"q1_oj{t}"],
        places_out=[f"q2_oj{t}"])
    pin1, pout1 = _single_io(c1)
    pin2, pout2 = _single_io(c2)
    acc = glue(osplit, c1, GluingSpec(ec=((pin1, f"p1_os{t}"),)))
    acc = glue(acc, c2, GluingSpec(ec=((pin2, f"p2_os{t}"),)))
    acc = glue(acc, ojoin, GluingSpec(ec=((f"q0_oj{t}", pout1),
                                          (f"q1_oj{t}", pout2))))
    return dataclasses.replace(acc, name=name or f"alt({c1.name},{c2.name})")
