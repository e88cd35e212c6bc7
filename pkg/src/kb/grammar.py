"""
pyparsing grammar for knowledge base and narrative files.

Statements end with a period; ``//`` starts a comment::

    sort person = {id1, id2}.
    sort time.
    event walking(person).
    fluent meeting(person, person).
    evidence happens(event, time).
    query holdsAt(fluent, time).
    auxiliary initiatedAt(fluent, time).
    1.386 initiatedAt(meeting(ID1, ID2), T) :- happens(active(ID1), T) ^ close(ID1, ID2, 25, T).
    hard !holdsAt(meeting(X, X), T).

Variables start with an upper-case letter, constants with a lower-case
letter or a digit. A rule without a weight is left to the inertia policy.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import pyparsing as pp

from src.logic.formulas import FALSE, HARD, TRUE, And, Atom, Exists, Formula, Iff, Implies, Not, Or
from src.logic.terms import Const, Func, Succ, Var

pp.ParserElement.enable_packrat()


@dataclass(frozen=True)
class SortStatement:
    name: str
    constants: Optional[Tuple[str, ...]]
    line: int


@dataclass(frozen=True)
class ConstructorStatement:
    result_sort: str
    name: str
    arg_sorts: Tuple[str, ...]
    line: int


@dataclass(frozen=True)
class PredicateStatement:
    role: str
    name: str
    arg_sorts: Tuple[str, ...]
    line: int


@dataclass(frozen=True)
class RuleStatement:
    formula: Formula
    weight: Optional[float]
    tag: Optional[str]
    line: int
    column: int
    tie: Optional[str] = None


def _simple_term(tokens):
    text = tokens[0]
    if text[0].isupper():
        return Var(text)
    return Const(text)


def _func_term(tokens):
    return Func(tokens[0], tuple(tokens[1]))


def _succ_term(tokens):
    return Succ(Var(tokens[0]))


def _next_time(tokens):
    return Const(str(int(tokens[0]) + 1))


def _atom(tokens):
    args = tuple(tokens[1]) if len(tokens) > 1 else ()
    return Atom(tokens[0], args)


def _not(tokens):
    return Not(tokens[0][1])


def _and(tokens):
    return And(tuple(tokens[0][0::2]))


def _or(tokens):
    return Or(tuple(tokens[0][0::2]))


def _implies(tokens):
    parts = list(tokens[0][0::2])
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Implies(part, result)
    return result


def _iff(tokens):
    parts = list(tokens[0][0::2])
    result = parts[0]
    for part in parts[1:]:
        result = Iff(result, part)
    return result


def _exists(tokens):
    return Exists(tuple(Var(name) for name in tokens[0]), tokens[1])


def _head(tokens):
    if len(tokens) == 2:
        return Not(tokens[1])
    return tokens[0]


def _rule_body(tokens):
    return Implies(tokens[1], tokens[0])


LPAR, RPAR, LBRACE, RBRACE, DOT, EQUALS = map(pp.Suppress, "(){}.=")

RESERVED = pp.MatchFirst(pp.Keyword(k) for k in ("v", "true", "false", "EXIST", "hard"))
identifier = ~RESERVED + pp.Word(pp.alphas + "_", pp.alphanums + "_")
integer = pp.Word(pp.nums)

term = pp.Forward()
arguments = LPAR + pp.Group(pp.Optional(pp.DelimitedList(term))) + RPAR
term <<= (
    (identifier + arguments).set_parse_action(_func_term)
    | (identifier + pp.Suppress("+") + pp.Suppress("1")).set_parse_action(_succ_term)
    | (integer + pp.Suppress("+") + pp.Suppress("1")).set_parse_action(_next_time)
    | (identifier | integer).set_parse_action(_simple_term)
)

atom = (identifier + pp.Optional(arguments)).set_parse_action(_atom)

formula = pp.Forward()
truth = pp.Keyword("true").set_parse_action(lambda: TRUE) | pp.Keyword("false").set_parse_action(
    lambda: FALSE
)
exists = (pp.Suppress(pp.Keyword("EXIST")) + pp.Group(pp.DelimitedList(identifier)) + LPAR + formula + RPAR)
exists.set_parse_action(_exists)
formula <<= pp.infix_notation(
    exists | truth | atom,
    [
        (pp.Literal("!"), 1, pp.OpAssoc.RIGHT, _not),
        (pp.Literal("^"), 2, pp.OpAssoc.LEFT, _and),
        (pp.Keyword("v"), 2, pp.OpAssoc.LEFT, _or),
        (pp.Literal("=>"), 2, pp.OpAssoc.RIGHT, _implies),
        (pp.Literal("<=>"), 2, pp.OpAssoc.LEFT, _iff),
    ],
)

head = (pp.Optional(pp.Literal("!")) + atom).set_parse_action(_head)
rule_body = (head + pp.Suppress(":-") + formula).set_parse_action(_rule_body) | formula

weight = pp.Keyword("hard").set_parse_action(lambda: HARD) | pp.Regex(
    r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?"
).set_parse_action(lambda t: float(t[0]))
tag = pp.Suppress("@") + identifier("group") + pp.Optional(EQUALS + identifier("tie"))

sort_statement = (
    pp.Suppress(pp.Keyword("sort"))
    - identifier
    + pp.Optional(EQUALS + LBRACE + pp.Group(pp.Optional(pp.DelimitedList(identifier | integer))) + RBRACE)
    + DOT
)
constructor_statement = (
    (pp.Keyword("event") | pp.Keyword("fluent"))
    + identifier
    + pp.Optional(LPAR + pp.Group(pp.DelimitedList(identifier)) + RPAR)
    + DOT
)
predicate_statement = (
    (pp.Keyword("evidence") | pp.Keyword("query") | pp.Keyword("auxiliary"))
    - identifier
    + LPAR
    + pp.Group(pp.DelimitedList(identifier))
    + RPAR
    + DOT
)
rule_statement = (
    pp.Optional(tag) + pp.Optional(weight)("weight") + rule_body("formula") - DOT
)


def _sort_action(s, loc, tokens):
    constants = tuple(tokens[1]) if len(tokens) > 1 else None
    return SortStatement(tokens[0], constants, pp.lineno(loc, s))


def _constructor_action(s, loc, tokens):
    arg_sorts = tuple(tokens[2]) if len(tokens) > 2 else ()
    return ConstructorStatement(tokens[0], tokens[1], arg_sorts, pp.lineno(loc, s))


def _predicate_action(s, loc, tokens):
    return PredicateStatement(tokens[0], tokens[1], tuple(tokens[2]), pp.lineno(loc, s))


def _single(value):
    # a results name on a compound expression comes back as a one-token ParseResults
    if isinstance(value, pp.ParseResults) and len(value) == 1:
        return value[0]
    return value


def _rule_action(s, loc, tokens):
    weight_value = _single(tokens["weight"]) if "weight" in tokens else None
    return RuleStatement(
        _single(tokens["formula"]),
        weight_value,
        _single(tokens.get("group")),
        pp.lineno(loc, s),
        pp.col(loc, s),
        _single(tokens.get("tie")),
    )


sort_statement.set_parse_action(_sort_action)
constructor_statement.set_parse_action(_constructor_action)
predicate_statement.set_parse_action(_predicate_action)
rule_statement.set_parse_action(_rule_action)

comment = pp.dbl_slash_comment
statement = sort_statement | constructor_statement | predicate_statement | rule_statement
knowledge_base = pp.ZeroOrMore(statement) + pp.StringEnd()
knowledge_base.ignore(comment)

narrative_atom = (pp.Optional(pp.Literal("!")) + atom + pp.Optional(DOT)).set_parse_action(_head)
horizon_directive = pp.Suppress("@") + pp.Suppress(pp.Keyword("horizon")) + integer
