"""Domain-independent Event Calculus axioms over a signature's fluent sort."""

from typing import List

from src.logic.formulas import And, Atom, Formula, Implies, Not
from src.logic.terms import HOLDS_AT, INITIATED_AT, TERMINATED_AT, TIME_SORT, Signature, Succ, Var


def event_calculus_axioms(signature: Signature) -> List[Formula]:
    """
    The four axioms, in order: initiation effect, positive inertia,
    termination effect, negative inertia.
    """
    fluent = Var("F", signature.fluent_sort)
    time = Var("T", TIME_SORT)
    holds_now = Atom(HOLDS_AT, (fluent, time))
    holds_next = Atom(HOLDS_AT, (fluent, Succ(time)))
    initiated = Atom(INITIATED_AT, (fluent, time))
    terminated = Atom(TERMINATED_AT, (fluent, time))
    return [
        Implies(initiated, holds_next),
        Implies(And((holds_now, Not(terminated))), holds_next),
        Implies(terminated, Not(holds_next)),
        Implies(And((Not(holds_now), Not(initiated))), Not(holds_next)),
    ]
