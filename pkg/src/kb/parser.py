"""
Parsers for knowledge base, narrative and annotation text.

Key Functions:
    - parse_kb: DSL text to a type-checked KnowledgeBaseSource
    - parse_narrative: evidence lines to a Narrative
    - parse_annotation: holdsAt lines to the set of true CE atoms
    - parse_ground_atom: single ground atom, checked against a signature
"""

import logging
from typing import Dict, FrozenSet, Optional, Set

import pyparsing as pp

from src.errors import KBSyntaxError, NarrativeError, SignatureError
from src.kb import grammar
from src.kb.source import FormulaGroup, KnowledgeBaseSource, Rule, classify
from src.logic.formulas import (
    And,
    Atom,
    Exists,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Truth,
)
from src.logic.terms import (
    HOLDS_AT,
    TIME_SORT,
    Const,
    Func,
    FunctionDecl,
    PredicateDecl,
    Role,
    Signature,
    Sort,
    Succ,
    Term,
    Var,
    is_ground_term,
)
from src.models.dataclasses import Narrative, atom_time

logger = logging.getLogger(__name__)


def _type_term(term: Term, sort: str, scope: Dict[str, str], signature: Signature) -> Term:
    if isinstance(term, Var):
        known = scope.setdefault(term.name, sort)
        if known != sort:
            raise SignatureError(f"variable {term.name} used with sorts {known} and {sort}")
        return Var(term.name, sort)
    if isinstance(term, Succ):
        if sort != TIME_SORT:
            raise SignatureError(f"successor {term} in a {sort} position")
        return Succ(_type_term(term.term, TIME_SORT, scope, signature))
    if isinstance(term, Const):
        if sort == TIME_SORT:
            if not term.name.isdigit():
                raise SignatureError(f"{term.name} is not a time-point")
        elif not signature.contains(sort, term):
            raise SignatureError(f"unknown constant {term.name} of sort {sort}")
        return term
    if isinstance(term, Func):
        decl = signature.function(term.name)
        if decl.result_sort != sort:
            raise SignatureError(f"{term.name} builds a {decl.result_sort}, expected {sort}")
        if decl.arity != len(term.args):
            raise SignatureError(f"arity mismatch: {term.name} expects {decl.arity} argument(s), got {len(term.args)}")
        return Func(
            term.name,
            tuple(_type_term(a, s, scope, signature) for a, s in zip(term.args, decl.arg_sorts)),
        )
    raise SignatureError(f"unexpected term {term!r}")


def _type_atom(atom: Atom, scope: Dict[str, str], signature: Signature) -> Atom:
    decl = signature.predicate(atom.predicate)
    if decl.arity != len(atom.args):
        raise SignatureError(
            f"arity mismatch: {atom.predicate} expects {decl.arity} argument(s), got {len(atom.args)}"
        )
    return Atom(
        atom.predicate,
        tuple(_type_term(a, s, scope, signature) for a, s in zip(atom.args, decl.arg_sorts)),
    )


def type_formula(formula: Formula, signature: Signature, scope: Optional[Dict[str, str]] = None) -> Formula:
    """Attach sorts to every variable and check predicates, constructors and arities."""
    scope = {} if scope is None else scope
    if isinstance(formula, Atom):
        return _type_atom(formula, scope, signature)
    if isinstance(formula, Truth):
        return formula
    if isinstance(formula, Not):
        return Not(type_formula(formula.operand, signature, scope))
    if isinstance(formula, And):
        return And(tuple(type_formula(f, signature, scope) for f in formula.operands))
    if isinstance(formula, Or):
        return Or(tuple(type_formula(f, signature, scope) for f in formula.operands))
    if isinstance(formula, Implies):
        antecedent = type_formula(formula.antecedent, signature, scope)
        return Implies(antecedent, type_formula(formula.consequent, signature, scope))
    if isinstance(formula, Iff):
        left = type_formula(formula.left, signature, scope)
        return Iff(left, type_formula(formula.right, signature, scope))
    if isinstance(formula, Exists):
        body = type_formula(formula.body, signature, scope)
        return Exists(tuple(Var(v.name, scope.get(v.name)) for v in formula.variables), body)
    raise SignatureError(f"unexpected formula node {type(formula).__name__}")


def _build_signature(statements) -> Signature:
    sorts: Dict[str, Sort] = {}
    implicit: Set[str] = set()
    functions: Dict[str, FunctionDecl] = {}
    predicates: Dict[str, PredicateDecl] = {}
    for stmt in statements:
        if isinstance(stmt, grammar.SortStatement):
            if stmt.name in sorts and stmt.name not in implicit:
                raise SignatureError(f"line {stmt.line}: sort {stmt.name} declared twice")
            implicit.discard(stmt.name)
            sorts[stmt.name] = Sort(stmt.name, stmt.constants or ())
        elif isinstance(stmt, grammar.ConstructorStatement):
            if stmt.name in functions:
                raise SignatureError(f"line {stmt.line}: {stmt.name} declared twice")
            if stmt.result_sort not in sorts:
                sorts[stmt.result_sort] = Sort(stmt.result_sort)
                implicit.add(stmt.result_sort)
            functions[stmt.name] = FunctionDecl(stmt.name, stmt.arg_sorts, stmt.result_sort)
        elif isinstance(stmt, grammar.PredicateStatement):
            if stmt.name in predicates:
                raise SignatureError(f"line {stmt.line}: predicate {stmt.name} declared twice")
            predicates[stmt.name] = PredicateDecl(stmt.name, stmt.arg_sorts, Role(stmt.role))
    uses_time = any(TIME_SORT in d.arg_sorts for d in list(predicates.values()) + list(functions.values()))
    if uses_time and TIME_SORT not in sorts:
        sorts[TIME_SORT] = Sort(TIME_SORT)
    signature = Signature(sorts=sorts, predicates=predicates, functions=functions)
    signature.validate()
    return signature


def parse_kb(text: str) -> KnowledgeBaseSource:
    """
    Parse knowledge base DSL text.

    Args:
        text: Full file contents

    Returns:
        KnowledgeBaseSource with a validated signature and typed rules named
        ``rule1``, ``rule2``... in file order

    Raises:
        KBSyntaxError: Lexical or syntax error, with line and column
        SignatureError: Undeclared sort/predicate/constructor or arity mismatch
    """
    try:
        statements = grammar.knowledge_base.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise KBSyntaxError(exc.msg, exc.lineno, exc.col, exc.line) from None

    signature = _build_signature(statements)
    rules = []
    for stmt in statements:
        if not isinstance(stmt, grammar.RuleStatement):
            continue
        try:
            formula = type_formula(stmt.formula, signature)
            group = FormulaGroup(stmt.tag) if stmt.tag is not None else None
        except (SignatureError, ValueError) as exc:
            raise SignatureError(f"line {stmt.line}, column {stmt.column}: {exc}") from None
        rules.append(Rule(formula, stmt.weight, classify(formula), f"rule{len(rules) + 1}", group, stmt.tie))
    logger.info(
        "parsed knowledge base: %d sorts, %d predicates, %d rules",
        len(signature.sorts),
        len(signature.predicates),
        len(rules),
    )
    return KnowledgeBaseSource(signature, rules)


def _parse_line(element: pp.ParserElement, line: str, lineno: int):
    try:
        return element.parse_string(line, parse_all=True)
    except pp.ParseBaseException as exc:
        raise KBSyntaxError(exc.msg, lineno, exc.col, line) from None


def _ground_atom(atom: Atom, signature: Signature, lineno: int) -> Atom:
    try:
        typed = _type_atom(atom, {}, signature)
    except SignatureError as exc:
        raise NarrativeError(f"line {lineno}: {exc}") from None
    if not all(is_ground_term(a) for a in typed.args):
        raise NarrativeError(f"line {lineno}: {atom} is not ground")
    if signature.predicate(typed.predicate).role == Role.AUXILIARY:
        raise NarrativeError(f"line {lineno}: {typed.predicate} cannot appear in a narrative")
    return typed


def parse_ground_atom(text: str, signature: Signature) -> Atom:
    literal = _parse_line(grammar.narrative_atom, text.strip(), 1)[0]
    atom = literal.operand if isinstance(literal, Not) else literal
    return _ground_atom(atom, signature, 1)


def parse_narrative(text: str, signature: Signature, name: str = "") -> Narrative:
    """
    Parse a narrative: one ground atom per line, ``!`` for explicit False.

    An optional ``@horizon N`` line fixes the last time-point; otherwise the
    horizon is the largest time stamp (0 for an empty file).

    Raises:
        KBSyntaxError: Malformed line
        NarrativeError: Unknown constant, contradictory or out-of-horizon entry
    """
    horizon: Optional[int] = None
    evidence: Dict[Atom, bool] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            horizon = int(_parse_line(grammar.horizon_directive, line, lineno)[0])
            continue
        literal = _parse_line(grammar.narrative_atom, line, lineno)[0]
        positive = not isinstance(literal, Not)
        atom = _ground_atom(literal if positive else literal.operand, signature, lineno)
        if evidence.get(atom, positive) != positive:
            raise NarrativeError(f"line {lineno}: contradictory entries for {atom}")
        evidence[atom] = positive

    times = [t for t in (atom_time(a) for a in evidence) if t is not None]
    if horizon is None:
        horizon = max(times, default=0)
    elif times and max(times) > horizon:
        raise NarrativeError(f"time stamp {max(times)} beyond horizon {horizon}")
    logger.debug("narrative %s: %d entries, horizon %d", name, len(evidence), horizon)
    return Narrative(horizon=horizon, evidence=evidence, name=name)


def parse_annotation(text: str, signature: Signature) -> FrozenSet[Atom]:
    """True holdsAt atoms listed in an annotation file; ``!`` lines are skipped."""
    annotation = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        literal = _parse_line(grammar.narrative_atom, line, lineno)[0]
        if isinstance(literal, Not):
            continue
        atom = _ground_atom(literal, signature, lineno)
        if atom.predicate != HOLDS_AT:
            raise NarrativeError(f"line {lineno}: annotations list {HOLDS_AT} atoms only")
        annotation.add(atom)
    return frozenset(annotation)
