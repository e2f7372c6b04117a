"""Tests for the component model, validation, and the built-in catalog."""

from __future__ import annotations

import dataclasses

import pytest

from wfc import catalog
from wfc.formula import Atom, Not, TRUE, parse_formula
from wfc.model import (
    AlwaysConstraint, ComponentError, USER_VAR, initial_config,
    make_component, make_transition, resolved_guard, structural_eq,
    validate_component,
)


def test_catalog_components_validate():
    for make in (catalog.c1, catalog.c5, catalog.c234, catalog.c67):
        rep = validate_component(make())
        assert rep.ok, rep.violations


def test_c1_shape():
    c = catalog.c1()
    assert c.vars.places == {"p0_1", "p1_1"}
    assert c.vars.executed == {"d_t1"}
    assert c.vars.auth == {"a_t1"}
    assert c.vars.history == {"h_t1"}
    assert c.vars.constraint == {"c_i_t1"}   # declared but inert
    t1 = c.transition("t1")
    assert t1.en_ec == parse_formula("p0_1 & !d_t1")
    assert t1.en_auth == parse_formula("a_t1(u)")
    assert t1.act_ec_map == {"p0_1": False, "p1_1": True, "d_t1": True}
    assert t1.act_auth_map == {"h_t1": True}
    assert c.interface.places_in == {"p0_1"}
    assert c.interface.places_out == {"p1_1"}
    assert c.interface.hist_out == {"h_t1"}
    assert c.interface.constr_in == set()
    assert c.final == Atom("p1_1")


def test_c234_shape_and_vacuous_warning():
    c = catalog.c234()
    assert c.vars.places == {f"p{i}_234" for i in range(8)}
    assert c.vars.executed == {"d_s_234", "d_j_234", "d_t2", "d_t3", "d_t4"}
    assert c.vars.auth == {"a_t2", "a_t3", "a_t4"}
    assert c.vars.history == {"h_t2", "h_t3", "h_t4"}
    assert c.vars.constraint == {"c_t2", "c_t3", "c_i_t2", "c_i_t3", "c_i_t4"}
    assert c.interface.constr_in == {"c_i_t2", "c_i_t4"}
    rep = validate_component(c)
    assert rep.ok
    assert any("c_i_t3" in w and "vacuously true" in w for w in rep.warnings)


def test_c67_vacuous_warning():
    rep = validate_component(catalog.c67())
    assert rep.ok
    assert any("c_i_t7" in w for w in rep.warnings)


def test_always_constraint_may_not_define_an_import():
    c = catalog.c234()
    bad = c.always + (AlwaysConstraint("c_i_t2", "u", parse_formula("!h_t2(u)")),)
    rep = validate_component(dataclasses.replace(c, always=bad))
    assert not rep.ok
    assert any("constr_in" in v for v in rep.violations)


def test_always_constraint_body_restricted_to_hist_out():
    c = catalog.c234()
    bad = (AlwaysConstraint("c_t2", "u", parse_formula("!h_t4(u)")),
           c.always[1])
    rep = validate_component(dataclasses.replace(c, always=bad))
    assert not rep.ok
    assert any("hist_out" in v for v in rep.violations)


def test_one_shot_literal_required():
    c = catalog.c1()
    t1 = c.transition("t1")
    broken = dataclasses.replace(t1, en_ec=Atom("p0_1"))
    rep = validate_component(dataclasses.replace(c, transitions=(broken,)))
    assert not rep.ok
    assert any("one-shot" in v for v in rep.violations)


def test_output_place_never_assigned_false():
    c = catalog.c1()
    t1 = c.transition("t1")
    broken = dataclasses.replace(
        t1, act_ec=tuple(sorted({"p0_1": False, "p1_1": False,
                                 "d_t1": True}.items())))
    rep = validate_component(dataclasses.replace(c, transitions=(broken,)))
    assert not rep.ok
    assert any("assigned false" in v or "never assigned true" in v
               for v in rep.violations)


def test_dummy_transitions_have_no_auth():
    with pytest.raises(ComponentError, match="dummy"):
        make_transition("s", frm=["p"], to=["q"], user_bound=False,
                        guard=parse_formula("a(u)"))


def test_transition_cannot_consume_and_produce_same_place():
    with pytest.raises(ComponentError, match="consumes and produces"):
        make_transition("t", frm=["p"], to=["p"], user_bound=True)


def test_initial_config():
    cfg = initial_config(catalog.c234())
    marked = {n for n, b in cfg.marking if b}
    assert marked == {"p0_234"}
    assert cfg.executed == frozenset()
    assert cfg.history == ()


def test_resolved_guard_inlines_internal_constraints():
    c = catalog.c234()
    g = resolved_guard(c, c.transition("t2"))
    assert g == parse_formula("a_t2(u) & !h_t3(u) & c_i_t2(u)") or \
        g == parse_formula("a_t2(u) & c_i_t2(u) & !h_t3(u)")
    # canonical ordering makes the two spellings identical anyway
    from wfc.formula import simplify
    assert g == simplify(parse_formula("a_t2(u) & !h_t3(u) & c_i_t2(u)"))


def test_history_atoms_replay():
    c = catalog.c234()
    cfg = initial_config(c)
    cfg = dataclasses.replace(cfg, history=(("t2", "alice"), ("t3", "bob")))
    assert cfg.history_atoms(c) == {("h_t2", "alice"), ("h_t3", "bob")}


def test_structural_eq_ignores_name():
    a, b = catalog.c1(), catalog.c1()
    assert structural_eq(a, dataclasses.replace(b, name="other"))
    assert not structural_eq(a, catalog.c5())


def test_user_var_constant():
    assert USER_VAR == "u"


def test_make_component_classifies_unknown_guard_preds_as_constraints():
    c = make_component(
        "w",
        places=["x0", "x1"],
        transitions=[make_transition("t", frm=["x0"], to=["x1"],
                                     user_bound=True,
                                     guard=parse_formula("mystery(u)"))],
        places_in=["x0"], places_out=["x1"])
    assert "mystery" in c.vars.constraint
    rep = validate_component(c)
    assert rep.ok
    assert any("mystery" in w for w in rep.warnings)
