"""Logic-only forward evaluation of the effect rules (the crisp Event Calculus baseline)."""

import logging
from collections import defaultdict
from typing import Dict, FrozenSet, List, Tuple

from src.compiler.completion import CompiledKB
from src.logic.formulas import Atom, Formula, Not, evaluate
from src.logic.substitution import formula_groundings
from src.logic.terms import HOLDS_AT, Const
from src.models.dataclasses import Narrative, atom_time

logger = logging.getLogger(__name__)


def _conclusion(formula: Formula) -> Tuple[Atom, bool]:
    consequent = formula.consequent
    if isinstance(consequent, Not):
        return consequent.operand, False
    return consequent, True


def crisp_holds(ckb: CompiledKB, narrative: Narrative) -> FrozenSet[Atom]:
    """
    Run the effect rules forward from time 0 under strict inertia.

    A fluent holds at 0 only if the narrative says so. At t+1 it is false if a
    termination body fired at t, true if an initiation body fired, otherwise it
    keeps its value. holdsAt entries in the narrative override the result at
    their time-point. Constraints and weights are ignored.

    Args:
        ckb: Compiled program
        narrative: Evidence; absent atoms are false

    Returns:
        Set of holdsAt atoms that are true
    """
    signature = ckb.signature.with_horizon(narrative.horizon)
    clamped = narrative.clamped
    by_time: Dict[int, List[Tuple[Formula, Atom, bool]]] = defaultdict(list)
    for compiled in ckb.sigma:
        for ground in formula_groundings(compiled.formula, signature):
            head, positive = _conclusion(ground)
            by_time[atom_time(head)].append((ground.antecedent, head, positive))

    fluents = signature.domain(signature.fluent_sort)
    state: Dict[Atom, bool] = {}
    for fluent in fluents:
        atom = Atom(HOLDS_AT, (fluent, Const("0")))
        state[atom] = clamped.get(atom, False)

    def truth(atom: Atom) -> bool:
        if atom.predicate == HOLDS_AT:
            return state.get(atom, False)
        return narrative.value(atom)

    for t in range(1, narrative.horizon + 1):
        initiated, terminated = set(), set()
        for body, head, positive in by_time.get(t, ()):
            if evaluate(body, truth):
                (initiated if positive else terminated).add(head.args[0])
        for fluent in fluents:
            before = state[Atom(HOLDS_AT, (fluent, Const(str(t - 1))))]
            atom = Atom(HOLDS_AT, (fluent, Const(str(t))))
            if fluent in initiated and fluent in terminated:
                logger.warning("%s initiated and terminated at %d; termination wins", fluent, t - 1)
            if fluent in terminated:
                value = False
            elif fluent in initiated:
                value = True
            else:
                value = before
            state[atom] = clamped.get(atom, value)

    true_atoms = frozenset(a for a, v in state.items() if v)
    logger.debug("crisp evaluation of %s: %d true holdsAt atom(s)", narrative.name, len(true_atoms))
    return true_atoms

