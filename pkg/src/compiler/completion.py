"""
Predicate completion of initiatedAt/terminatedAt and axiom specialisation.

The initiation (termination) rules of every fluent are merged into one
equivalence ``initiatedAt(f(X..), T) <=> body_1 v ... v body_n`` (``false``
when a fluent has no such rules). The equivalences are then substituted into
the four Event Calculus axioms, which removes both predicates and leaves two
rule sets over holdsAt and evidence only:

    effect rules   holdsAt(f, T+1) :- body_i          (one per initiation body)
                   !holdsAt(f, T+1) :- body_j         (one per termination body)
    inertia rules  holdsAt(f, T+1) :- holdsAt(f, T) ^ !(terminating bodies)
                   !holdsAt(f, T+1) :- !holdsAt(f, T) ^ !(initiating bodies)
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.errors import CompilationError
from src.kb.source import FormulaGroup, KnowledgeBaseSource, Rule, RuleKind, rule_head
from src.logic.formulas import (
    HARD,
    And,
    Atom,
    Exists,
    Formula,
    Iff,
    Implies,
    Not,
    children,
    disjunction,
    predicates,
    variables,
)
from src.logic.substitution import substitute
from src.logic.terms import (
    EFFECT_PREDICATES,
    HOLDS_AT,
    INITIATED_AT,
    TERMINATED_AT,
    TIME_SORT,
    Const,
    Func,
    Signature,
    Succ,
    Term,
    Var,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Disjunct:
    body: Formula
    weight: Optional[float]
    rule: str


@dataclass(frozen=True)
class Definition:
    """Completed definition of initiatedAt or terminatedAt for one fluent."""

    fluent: str
    predicate: str
    head: Atom
    disjuncts: Tuple[Disjunct, ...] = ()

    @property
    def body(self) -> Formula:
        return disjunction(d.body for d in self.disjuncts)

    @property
    def formula(self) -> Formula:
        return Iff(self.head, self.body)


@dataclass(frozen=True)
class CompletedKB:
    signature: Signature
    definitions: Tuple[Definition, ...]
    constraints: Tuple[Rule, ...] = ()

    @property
    def fluents(self) -> List[str]:
        seen: Dict[str, None] = {}
        for definition in self.definitions:
            seen.setdefault(definition.fluent, None)
        return list(seen)

    def definition(self, fluent: str, predicate: str) -> Definition:
        for definition in self.definitions:
            if definition.fluent == fluent and definition.predicate == predicate:
                return definition
        raise KeyError((fluent, predicate))


@dataclass(frozen=True)
class CompiledFormula:
    """
    Formula of the compiled program.

    Attributes:
        name: Stable identifier (``<fluent>:<group>[:<k>]``)
        formula: Rule over holdsAt and evidence predicates
        group: Effect, inertia or constraint
        weight: Finite weight, HARD, or None before a policy is applied
        fluent: Fluent symbol the formula is about ("" for constraints)
        source: Names of the knowledge base rules it came from
        tie: Shared parameter name, when several formulas learn one weight
    """

    name: str
    formula: Formula
    group: FormulaGroup
    weight: Optional[float] = None
    fluent: str = ""
    source: str = ""
    tie: Optional[str] = None

    @property
    def is_soft(self) -> bool:
        return self.weight is not None and self.weight != HARD

    @property
    def parameter(self) -> str:
        return self.tie or self.name


@dataclass(frozen=True)
class CompiledKB:
    signature: Signature
    formulas: Tuple[CompiledFormula, ...]

    @property
    def sigma(self) -> List[CompiledFormula]:
        return [f for f in self.formulas if f.group.is_effect]

    @property
    def sigma_prime(self) -> List[CompiledFormula]:
        return [f for f in self.formulas if f.group.is_inertia]

    @property
    def constraints(self) -> List[CompiledFormula]:
        return [f for f in self.formulas if f.group == FormulaGroup.CONSTRAINT]

    @property
    def parameters(self) -> Tuple[str, ...]:
        """Names of the learnable weights, one per soft formula or tie group"""
        seen: Dict[str, None] = {}
        for formula in self.formulas:
            if formula.is_soft:
                seen.setdefault(formula.parameter, None)
        return tuple(seen)

    @property
    def weights(self) -> np.ndarray:
        values: Dict[str, float] = {}
        for formula in self.formulas:
            if formula.is_soft:
                values.setdefault(formula.parameter, float(formula.weight))
        return np.asarray([values[p] for p in self.parameters], dtype=float)

    def with_weights(self, weights) -> "CompiledKB":
        """Copy with every soft formula's weight replaced by its parameter value."""
        values = dict(zip(self.parameters, np.asarray(weights, dtype=float)))
        formulas = tuple(
            replace(f, weight=float(values[f.parameter])) if f.is_soft else f for f in self.formulas
        )
        return replace(self, formulas=formulas)

    def to_source(self) -> KnowledgeBaseSource:
        """Tagged rules that :meth:`from_source` turns back into this program."""
        rules = [
            Rule(
                f.formula,
                f.weight,
                RuleKind.CONSTRAINT if f.group == FormulaGroup.CONSTRAINT else RuleKind.AXIOM,
                f.name,
                f.group,
                f.tie,
            )
            for f in self.formulas
        ]
        return KnowledgeBaseSource(self.signature, rules)

    @classmethod
    def from_source(cls, kb: KnowledgeBaseSource) -> "CompiledKB":
        """Rebuild a compiled program from a knowledge base whose rules all carry group tags."""
        if not kb.is_compiled:
            raise CompilationError("knowledge base mixes compiled and source rules")
        counters: Dict[Tuple[str, FormulaGroup], int] = defaultdict(int)
        formulas = []
        for rule in kb.rules:
            if predicates(rule.formula) & set(EFFECT_PREDICATES):
                raise CompilationError(f"{rule.name}: compiled rules cannot mention {INITIATED_AT}/{TERMINATED_AT}")
            fluent = ""
            if rule.group != FormulaGroup.CONSTRAINT:
                head = rule_head(rule.formula)
                if head is None or head.predicate != HOLDS_AT:
                    raise CompilationError(f"{rule.name}: @{rule.group.value} rules must conclude {HOLDS_AT}")
                fluent = _fluent_symbol(head.args[0])
            counters[(fluent, rule.group)] += 1
            name = _formula_name(fluent, rule.group, counters[(fluent, rule.group)])
            formulas.append(CompiledFormula(name, rule.formula, rule.group, rule.weight, fluent, rule.name, rule.tie))
        signature = kb.signature.without_predicates(EFFECT_PREDICATES)
        return cls(signature, tuple(formulas))


def _formula_name(fluent: str, group: FormulaGroup, index: int) -> str:
    if group.is_inertia:
        return f"{fluent}:{group.value}"
    if group == FormulaGroup.CONSTRAINT:
        return f"constraint:{index}"
    return f"{fluent}:{group.value}:{index}"


def _fluent_symbol(term: Term) -> str:
    if isinstance(term, (Func, Const)):
        return term.name
    raise CompilationError(f"fluent argument {term} is neither a constructor nor a constant")


def _contains_exists(formula: Formula) -> bool:
    return isinstance(formula, Exists) or any(_contains_exists(c) for c in children(formula))


def _check_form(rule: Rule) -> Tuple[Term, Var, Formula]:
    """Head fluent term, time variable and body of an initiation/termination rule."""
    head = rule_head(rule.formula)
    if head is None or len(head.args) != 2:
        raise CompilationError(f"{rule.name}: head must be initiatedAt(f(X..), T) or terminatedAt(f(X..), T)")
    fluent_term, time_term = head.args
    if not (isinstance(time_term, Var) and time_term.sort == TIME_SORT):
        raise CompilationError(f"{rule.name}: head time argument must be a time variable, got {time_term}")
    if isinstance(fluent_term, Func):
        names = [a.name for a in fluent_term.args if isinstance(a, Var)]
        if len(names) != len(fluent_term.args) or len(set(names)) != len(names):
            raise CompilationError(f"{rule.name}: head fluent {fluent_term} must take distinct variables")
        if time_term.name in names:
            raise CompilationError(f"{rule.name}: time variable reused inside the fluent term")
    elif not isinstance(fluent_term, Const):
        raise CompilationError(f"{rule.name}: head fluent must be a constructor term or a fluent constant")
    body = rule.formula.antecedent
    if predicates(body) & set(EFFECT_PREDICATES):
        raise CompilationError(f"{rule.name}: body mentions {INITIATED_AT}/{TERMINATED_AT}")
    if _contains_exists(body):
        raise CompilationError(f"{rule.name}: existential quantifiers are not supported")
    head_names = {v.name for v in variables(head)}
    free = sorted(v.name for v in variables(body) if v.name not in head_names)
    if free:
        raise CompilationError(f"{rule.name}: body variables {free} are not bound by the head")
    return fluent_term, time_term, body


def _default_head(signature: Signature, symbol: str) -> Tuple[Term, Var]:
    decl = signature.functions.get(symbol)
    time = Var("T", TIME_SORT)
    if decl is None:
        return Const(symbol), time
    return Func(symbol, tuple(Var(f"X{i + 1}", s) for i, s in enumerate(decl.arg_sorts))), time


def complete(kb: KnowledgeBaseSource) -> CompletedKB:
    """
    Replace the initiation/termination rules by one equivalence per fluent and predicate.

    Every rule of a fluent is renamed onto the variables of that fluent's first
    rule, so the disjuncts of a definition share one head.

    Raises:
        CompilationError: Rule head not in initiation/termination form, body
            variables missing from the head, or initiatedAt/terminatedAt
            used outside a rule head
    """
    signature = kb.signature
    fluent_sort = signature.fluent_sort
    symbols = [d.name for d in signature.constructors(fluent_sort)]
    symbols.extend(signature.sorts[fluent_sort].constants)

    heads: Dict[str, Tuple[Term, Var]] = {}
    collected: Dict[Tuple[str, str], List[Disjunct]] = defaultdict(list)
    constraints = []
    for rule in kb.rules:
        if rule.group is not None:
            raise CompilationError(f"{rule.name}: rule is already compiled (@{rule.group.value})")
        if rule.kind not in (RuleKind.INITIATION, RuleKind.TERMINATION):
            if predicates(rule.formula) & set(EFFECT_PREDICATES):
                raise CompilationError(
                    f"{rule.name}: {INITIATED_AT}/{TERMINATED_AT} may only head initiation/termination rules"
                )
            constraints.append(rule)
            continue
        fluent_term, time_var, body = _check_form(rule)
        symbol = _fluent_symbol(fluent_term)
        canonical_term, canonical_time = heads.setdefault(symbol, (fluent_term, time_var))
        renaming: Dict[str, Term] = {time_var.name: canonical_time}
        if isinstance(fluent_term, Func):
            renaming.update({a.name: c for a, c in zip(fluent_term.args, canonical_term.args)})
        predicate = rule_head(rule.formula).predicate
        collected[(symbol, predicate)].append(Disjunct(substitute(body, renaming), rule.weight, rule.name))

    definitions = []
    for symbol in symbols:
        fluent_term, time_var = heads.get(symbol) or _default_head(signature, symbol)
        for predicate in (INITIATED_AT, TERMINATED_AT):
            definitions.append(
                Definition(
                    symbol,
                    predicate,
                    Atom(predicate, (fluent_term, time_var)),
                    tuple(collected.get((symbol, predicate), ())),
                )
            )
    logger.info("completed %d fluent(s), %d constraint(s)", len(symbols), len(constraints))
    return CompletedKB(signature, tuple(definitions), tuple(constraints))


def specialize_axioms(completed: CompletedKB) -> CompiledKB:
    """
    Substitute the completed definitions into the Event Calculus axioms.

    Each disjunct of a definition becomes its own effect formula carrying the
    source rule's weight; inertia formulas are left unweighted for the policy.
    """
    formulas: List[CompiledFormula] = []
    for symbol in completed.fluents:
        initiation = completed.definition(symbol, INITIATED_AT)
        termination = completed.definition(symbol, TERMINATED_AT)
        fluent_term, time_var = initiation.head.args
        # Both definitions share the fluent's canonical head.
        holds_now = Atom(HOLDS_AT, (fluent_term, time_var))
        holds_next = Atom(HOLDS_AT, (fluent_term, Succ(time_var)))

        for group, definition, conclusion in (
            (FormulaGroup.EFFECT_HOLDS, initiation, holds_next),
            (FormulaGroup.EFFECT_NOT_HOLDS, termination, Not(holds_next)),
        ):
            for k, disjunct in enumerate(definition.disjuncts, start=1):
                formulas.append(
                    CompiledFormula(
                        _formula_name(symbol, group, k),
                        Implies(disjunct.body, conclusion),
                        group,
                        disjunct.weight,
                        symbol,
                        disjunct.rule,
                    )
                )

        if termination.disjuncts:
            persist_body: Formula = And((holds_now, Not(termination.body)))
        else:
            persist_body = holds_now
        if initiation.disjuncts:
            absent_body: Formula = And((Not(holds_now), Not(initiation.body)))
        else:
            absent_body = Not(holds_now)
        formulas.append(
            CompiledFormula(
                _formula_name(symbol, FormulaGroup.INERTIA_HOLDS, 1),
                Implies(persist_body, holds_next),
                FormulaGroup.INERTIA_HOLDS,
                fluent=symbol,
                source=",".join(d.rule for d in termination.disjuncts),
            )
        )
        formulas.append(
            CompiledFormula(
                _formula_name(symbol, FormulaGroup.INERTIA_NOT_HOLDS, 1),
                Implies(absent_body, Not(holds_next)),
                FormulaGroup.INERTIA_NOT_HOLDS,
                fluent=symbol,
                source=",".join(d.rule for d in initiation.disjuncts),
            )
        )

    for k, rule in enumerate(completed.constraints, start=1):
        weight = HARD if rule.weight is None else rule.weight
        formulas.append(
            CompiledFormula(
                _formula_name("", FormulaGroup.CONSTRAINT, k),
                rule.formula,
                FormulaGroup.CONSTRAINT,
                weight,
                source=rule.name,
            )
        )
    signature = completed.signature.without_predicates(EFFECT_PREDICATES)
    logger.info(
        "compiled %d effect and %d inertia formula(s)",
        sum(f.group.is_effect for f in formulas),
        sum(f.group.is_inertia for f in formulas),
    )
    return CompiledKB(signature, tuple(formulas))
