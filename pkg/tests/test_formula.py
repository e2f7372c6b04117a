"""Tests for the formula algebra: substitution, elimination, equivalence."""

from __future__ import annotations

import itertools
import random

import pytest

from wfc.formula import (
    And, Atom, Const, EquivalenceBudgetError, Exists, FALSE, FormulaParseError,
    Not, Or, TRUE, UserAtom, UserEq, UserNeq, alpha_canonical, conj, disj,
    eliminate_constraints, equivalent, eval_concrete, format_formula,
    free_user_vars, parse_formula, simplify, subst_exec, subst_hist,
)


class _Always:
    def __init__(self, head, var, body):
        self.head = head
        self.var = var
        self.body = body


# ------------------------------------------------------------------ simplify

def test_simplify_constants_and_flattening():
    f = And((TRUE, Atom("p"), And((Atom("q"), TRUE))))
    assert simplify(f) == And((Atom("p"), Atom("q")))
    assert simplify(Or((FALSE, Atom("p")))) == Atom("p")
    assert simplify(And((Atom("p"), FALSE))) == FALSE
    assert simplify(Not(Not(Atom("p")))) == Atom("p")


def test_simplify_complementary_literals():
    assert simplify(And((Atom("p"), Not(Atom("p"))))) == FALSE
    assert simplify(Or((Atom("p"), Not(Atom("p"))))) == TRUE
    assert simplify(UserEq("u", "u")) == TRUE
    assert simplify(UserNeq("u", "u")) == FALSE


def test_simplify_absorption_and_unit_propagation():
    p, q = Atom("p"), Atom("q")
    assert simplify(And((p, Or((p, q))))) == p
    assert simplify(Or((p, And((p, q))))) == p
    # unit propagation: p & (!p | q) -> p & q
    assert simplify(And((p, Or((Not(p), q))))) == And((p, q))


def test_simplify_canonical_order():
    f = And((Atom("q"), Atom("p")))
    g = And((Atom("p"), Atom("q")))
    assert simplify(f) == simplify(g)


def test_simplify_exists():
    a = UserAtom("a", "u")
    p = Atom("p")
    # unused binder drops
    assert simplify(Exists("u", p)) == p
    # distributes over disjunction
    b = UserAtom("b", "u")
    s = simplify(Exists("u", Or((a, b))))
    assert s == simplify(Or((Exists("u", a), Exists("u", b))))
    # miniscoping pulls the u-free conjunct out
    s = simplify(Exists("u", And((p, a))))
    assert s == simplify(And((p, Exists("u", a))))


def test_alpha_canonical_identifies_renamed_binders():
    f = Exists("u3", And((UserAtom("a", "u3"), Atom("p"))))
    g = Exists("w9", And((UserAtom("a", "w9"), Atom("p"))))
    assert alpha_canonical(simplify(f)) == alpha_canonical(simplify(g))


# ------------------------------------------------------------- substitutions

def test_subst_exec_closes_formula():
    f = And((Atom("p0_5"), Not(Atom("d_t5"))))
    assert subst_exec(f, {"p0_5": False}) == FALSE
    assert subst_exec(f, {"p0_5": True, "d_t5": False}) == TRUE
    assert subst_exec(f, {"d_t5": False}) == Atom("p0_5")


def test_subst_hist_away_from_updated_user():
    # recording h_t2(u) := true inside !h_t2(w) forces w to differ from u
    f = Not(UserAtom("h_t2", "w"))
    got = subst_hist(f, "h_t2", "u", True)
    want = simplify(And((UserNeq("u", "w"), Not(UserAtom("h_t2", "w")))))
    assert got == want


def test_subst_hist_same_user_contradiction():
    f = And((Not(UserAtom("h_t2", "u")), Not(UserAtom("h_t3", "u"))))
    assert subst_hist(f, "h_t2", "u", True) == FALSE


def test_subst_hist_avoids_capture():
    f = Exists("u", UserAtom("h", "u"))
    got = subst_hist(f, "h", "u", False)
    # the bound u is renamed, then the update erases h at the free u only:
    # some *other* user must still satisfy h
    assert equivalent(got, parse_formula("exists w. w!=u & h(w)"))
    assert not equivalent(got, f)


def test_subst_hist_false_update_erases_only_that_user():
    f = UserAtom("h", "w")
    got = subst_hist(f, "h", "u", False)
    want = simplify(And((UserNeq("u", "w"), UserAtom("h", "w"))))
    assert got == want


# ------------------------------------------------------------- elimination

def test_eliminate_constraints_inlines_bodies():
    guard = And((UserAtom("a_t2", "u"), UserAtom("c_t2", "u")))
    b = [_Always("c_t2", "w", Not(UserAtom("h_t3", "w")))]
    got = eliminate_constraints(guard, b)
    assert got == simplify(And((UserAtom("a_t2", "u"), Not(UserAtom("h_t3", "u")))))


def test_eliminate_constraints_untouched_without_definition():
    guard = UserAtom("c_i_t5", "u")
    assert eliminate_constraints(guard, []) == guard


def test_eliminate_constraints_rejects_duplicate_heads():
    b = [_Always("c", "u", TRUE), _Always("c", "u", FALSE)]
    with pytest.raises(ValueError, match="duplicate"):
        eliminate_constraints(Atom("p"), b)


def test_eliminate_constraints_rejects_constraint_in_body():
    b = [_Always("c1", "u", UserAtom("c2", "u")),
         _Always("c2", "u", Not(UserAtom("h", "u")))]
    with pytest.raises(ValueError, match="mentions constraint"):
        eliminate_constraints(Atom("p"), b)


# --------------------------------------------------------------- parse/print

def test_parse_basic_forms():
    assert parse_formula("true") == TRUE
    assert parse_formula("p0_1") == Atom("p0_1")
    assert parse_formula("a_t1(u)") == UserAtom("a_t1", "u")
    assert parse_formula("u1=u2") == UserEq("u1", "u2")
    assert parse_formula("u1!=u2") == UserNeq("u1", "u2")
    assert parse_formula("!p & q | r") == Or((And((Not(Atom("p")), Atom("q"))), Atom("r")))
    assert parse_formula("exists u. a(u) & b(u)") == \
        Exists("u", And((UserAtom("a", "u"), UserAtom("b", "u"))))
    assert parse_formula("(exists u. a(u)) & p") == \
        And((Exists("u", UserAtom("a", "u")), Atom("p")))


def test_parse_error_positions():
    with pytest.raises(FormulaParseError) as err:
        parse_formula("p &\n& q")
    assert err.value.line == 2 and err.value.col == 1
    with pytest.raises(FormulaParseError) as err:
        parse_formula("a(u")
    assert err.value.line == 1


def _random_formula(rng: random.Random, depth: int, allow_same: type | None = None):
    atoms = ["p", "q", "r", "s"]
    preds = ["a", "b", "h"]
    uvars = ["u", "w", "v"]
    choices = ["atom", "uatom", "eq", "neq", "const"]
    if depth > 0:
        choices += ["not", "and", "or", "exists"] * 3
    kind = rng.choice(choices)
    if kind == "and" and allow_same is And or kind == "or" and allow_same is Or:
        kind = "not"
    if kind == "atom":
        return Atom(rng.choice(atoms))
    if kind == "uatom":
        return UserAtom(rng.choice(preds), rng.choice(uvars))
    if kind == "eq":
        return UserEq(rng.choice(uvars), rng.choice(uvars))
    if kind == "neq":
        return UserNeq(rng.choice(uvars), rng.choice(uvars))
    if kind == "const":
        return rng.choice((TRUE, FALSE))
    if kind == "not":
        return Not(_random_formula(rng, depth - 1))
    if kind == "exists":
        return Exists(rng.choice(uvars), _random_formula(rng, depth - 1))
    cls = And if kind == "and" else Or
    args = tuple(_random_formula(rng, depth - 1, allow_same=cls)
                 for _ in range(rng.randint(2, 3)))
    return cls(args)


def test_format_parse_round_trip_random():
    rng = random.Random(20260823)
    for _ in range(300):
        f = _random_formula(rng, depth=4)
        assert parse_formula(format_formula(f)) == f


# --------------------------------------------------------------- equivalence

def test_equivalent_reordered_conjunction():
    f = parse_formula("p & q & a(u) & !h(u)")
    g = parse_formula("!h(u) & a(u) & q & p")
    assert equivalent(f, g)


def test_equivalent_distribution():
    f = parse_formula("p & (q | r)")
    g = parse_formula("(p & q) | (p & r)")
    assert equivalent(f, g)
    assert not equivalent(f, parse_formula("p & q"))


def test_equivalent_quantifier_semantics():
    joint = parse_formula("exists u. a(u) & b(u)")
    split = parse_formula("(exists u. a(u)) & (exists u. b(u))")
    assert not equivalent(joint, split)  # split admits two witnesses
    assert equivalent(parse_formula("exists u. a(u) & u=w"), parse_formula("a(w)"))
    assert not equivalent(parse_formula("exists u. exists w. u!=w"), TRUE)
    assert equivalent(parse_formula("exists u. exists w. u=w"), TRUE)


def test_equivalent_universe_clash():
    with pytest.raises(ValueError, match="state atom and user predicate"):
        equivalent(Atom("x"), UserAtom("x", "u"))


def test_equivalent_budget_error():
    big = conj([Atom(f"p{i}") for i in range(26)])
    f = And((big, parse_formula("exists u. exists w. exists v. a(u) & b(w) & c(v) & d(u) & e(w) & f(v)")))
    g = And((big, Atom("extra")))
    with pytest.raises(EquivalenceBudgetError):
        equivalent(f, g)


def _truth_table(f, atoms):
    rows = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        state = dict(zip(atoms, bits))
        rows.append(eval_concrete(f, state, (), lambda p, u: False))
    return rows


def test_equivalent_matches_truth_tables_exhaustively():
    # purely boolean formulas: equivalent() must agree with truth-table equality
    rng = random.Random(7)
    atoms = ["p", "q", "r", "s", "t", "x"]

    def bool_formula(depth):
        if depth == 0 or rng.random() < 0.3:
            return rng.choice([Atom(a) for a in atoms] + [TRUE, FALSE])
        k = rng.choice(["not", "and", "or"])
        if k == "not":
            return Not(bool_formula(depth - 1))
        cls = And if k == "and" else Or
        return cls(tuple(bool_formula(depth - 1) for _ in range(rng.randint(2, 3))))

    for _ in range(120):
        f, g = bool_formula(3), bool_formula(3)
        want = _truth_table(f, atoms) == _truth_table(g, atoms)
        assert equivalent(f, g) == want


def _mutate(rng: random.Random, f):
    """A random semantics-preserving rewrite."""
    kind = rng.choice(["dneg", "commute", "idem", "demorgan"])
    if kind == "dneg":
        return Not(Not(f))
    if kind == "idem":
        return And((f, f))
    if kind == "commute" and isinstance(f, (And, Or)):
        args = list(f.args)
        rng.shuffle(args)
        return type(f)(tuple(args))
    if kind == "demorgan" and isinstance(f, And):
        return Not(Or(tuple(Not(a) for a in f.args)))
    return f


def test_equivalent_is_an_equivalence_relation():
    rng = random.Random(99)
    for _ in range(60):
        f = _random_formula(rng, depth=3)
        g = _mutate(rng, f)
        h = _mutate(rng, g)
        assert equivalent(f, f)
        assert equivalent(f, g) and equivalent(g, f)
        assert equivalent(g, h) and equivalent(f, h)


def test_eval_concrete_with_users():
    f = parse_formula("exists u. a(u) & !h(u)")
    holds = {("a", "u1"), ("a", "u2"), ("h", "u1")}
    assert eval_concrete(f, {}, ("u1", "u2"), lambda p, x: (p, x) in holds)
    assert not eval_concrete(f, {}, ("u1",), lambda p, x: (p, x) in holds)


def test_free_user_vars():
    f = parse_formula("a(u) & exists w. b(w) & u!=v")
    assert free_user_vars(f) == {"u", "v"}
