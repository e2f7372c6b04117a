"""Built-in example components and their glued workflows.

Two five-task business workflows are shipped, both reusing the same request
component (one task t1) and finalization component (one task t5):

* TRW, a travel request workflow: t1 request, then t2/t3/t4 (flight, hotel,
  car — a parallel block with separation-of-duty between t2 and t3), then t5.
  Separation-of-duty pairs: (t1,t2), (t1,t4), (t2,t3), (t2,t5), (t3,t5).
* MDW, a moderated discussion workflow: t1 request, then t6/t7 (review and
  counter-review in parallel, distinct users), then t5.
  Separation-of-duty pairs: (t1,t6), (t6,t7), (t6,t5), (t7,t5).

These exercise every feature of the algebra: internal always constraints,
imported constraint predicates, exported history, and flow gluing.
"""

from __future__ import annotations

from .formula import parse_formula
from .glue import GluingSpec, glue_fold
from .model import AlwaysConstraint, Component, make_component, make_transition

__all__ = [
    "c1", "c5", "c234", "c67",
    "trw_gluing", "mdw_gluing", "trw", "mdw",
]


def c1() -> Component:
    """Single-task request component; exports its history."""
    return make_component(
        "c1",
        places=["p0_1", "p1_1"],
        transitions=[make_transition("t1", frm=["p0_1"], to=["p1_1"],
                                     user_bound=True)],
        places_in=["p0_1"],
        places_out=["p1_1"],
        hist_out=["h_t1"],
        extra_constraints=["c_i_t1"],
    )


def c5() -> Component:
    """Single-task finalization component; imports a constraint on who may run it."""
    return make_component(
        "c5",
        places=["p0_5", "p1_5"],
        transitions=[make_transition("t5", frm=["p0_5"], to=["p1_5"],
                                     user_bound=True,
                                     guard=parse_formula("c_i_t5(u)"))],
        places_in=["p0_5"],
        places_out=["p1_5"],
        hist_out=["h_t5"],
        constr_in=["c_i_t5"],
    )


def c234() -> Component:
    """Three parallel tasks between an and-split and an and-join.

    t2 and t3 constrain each other to distinct users through internal always
    constraints; t2 and t4 additionally import constraints resolved only at
    composition time (c_i_t3 is referenced but never wired — vacuously true).
    """
    return make_component(
        "c234",
        places=[f"p{i}_234" for i in range(8)],
        transitions=[
            make_transition("s_234", frm=["p0_234"],
                            to=["p1_234", "p2_234", "p3_234"],
                            user_bound=False),
            make_transition("t2", frm=["p1_234"], to=["p4_234"],
                            user_bound=True,
                            guard=parse_formula("c_t2(u) & c_i_t2(u)")),
            make_transition("t3", frm=["p2_234"], to=["p5_234"],
                            user_bound=True,
                            guard=parse_formula("c_t3(u) & c_i_t3(u)")),
            make_transition("t4", frm=["p3_234"], to=["p6_234"],
                            user_bound=True,
                            guard=parse_formula("c_i_t4(u)")),
            make_transition("j_234", frm=["p4_234", "p5_234", "p6_234"],
                            to=["p7_234"], user_bound=False),
        ],
        always=[
            AlwaysConstraint("c_t2", "u", parse_formula("!h_t3(u)")),
            AlwaysConstraint("c_t3", "u", parse_formula("!h_t2(u)")),
        ],
        places_in=["p0_234"],
        places_out=["p7_234"],
        hist_out=["h_t2", "h_t3"],
        constr_in=["c_i_t2", "c_i_t4"],
    )


def c67() -> Component:
    """Two parallel tasks between an and-split and an and-join.

    t6 and t7 exclude each other's users via internal always constraints; t6
    additionally imports a constraint (c_i_t7 is referenced but never wired).
    """
    return make_component(
        "c67",
        places=[f"p{i}_67" for i in range(6)],
        transitions=[
            make_transition("s_67", frm=["p0_67"], to=["p1_67", "p2_67"],
                            user_bound=False),
            make_transition("t6", frm=["p1_67"], to=["p3_67"],
                            user_bound=True,
                            guard=parse_formula("c_t6(u) & c_i_t6(u)")),
            make_transition("t7", frm=["p2_67"], to=["p4_67"],
                            user_bound=True,
                            guard=parse_formula("c_t7(u) & c_i_t7(u)")),
            make_transition("j_67", frm=["p3_67", "p4_67"], to=["p5_67"],
                            user_bound=False),
        ],
        always=[
            AlwaysConstraint("c_t6", "u", parse_formula("!h_t7(u)")),
            AlwaysConstraint("c_t7", "u", parse_formula("!h_t6(u)")),
        ],
        places_in=["p0_67"],
        places_out=["p5_67"],
        hist_out=["h_t6", "h_t7"],
        constr_in=["c_i_t6"],
    )


def trw_gluing() -> GluingSpec:
    """Flow: t1's output feeds the parallel block, whose output feeds t5.
    Auth: t2/t4 must differ from t1's user; t5 from t2's and t3's."""
    return GluingSpec(
        ec=(("p0_234", "p1_1"), ("p0_5", "p7_234")),
        auth=(
            AlwaysConstraint("c_i_t2", "u", parse_formula("!h_t1(u)")),
            AlwaysConstraint("c_i_t4", "u", parse_formula("!h_t1(u)")),
            AlwaysConstraint("c_i_t5", "u", parse_formula("!h_t2(u) & !h_t3(u)")),
        ))


def mdw_gluing() -> GluingSpec:
    """Flow: t1's output feeds the review block, whose output feeds t5.
    Auth: t6 must differ from t1's user; t5 from t6's and t7's."""
    return GluingSpec(
        ec=(("p0_67", "p1_1"), ("p0_5", "p5_67")),
        auth=(
            AlwaysConstraint("c_i_t6", "u", parse_formula("!h_t1(u)")),
            AlwaysConstraint("c_i_t5", "u", parse_formula("!h_t6(u) & !h_t7(u)")),
        ))


def trw() -> Component:
    return glue_fold([c1(), c234(), c5()], trw_gluing(), name="trw")


def mdw() -> Component:
    return glue_fold([c1(), c67(), c5()], mdw_gluing(), name="mdw")
