"""
Terms and many-sorted signatures.

Constants, variables, constructor applications (``meeting(id1, id2)``) and the
successor ``T+1`` on the time sort. A :class:`Signature` owns the finite sort
domains; the time sort is bound to ``0..horizon`` once a narrative is known.

Key Types:
    - Var, Const, Func, Succ: term nodes
    - Sort, PredicateDecl, FunctionDecl: declarations
    - Signature: sorts, predicates and constructors with domain enumeration
"""

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple, Union

from src.errors import SignatureError

TIME_SORT = "time"

HAPPENS = "happens"
HOLDS_AT = "holdsAt"
INITIATED_AT = "initiatedAt"
TERMINATED_AT = "terminatedAt"
EFFECT_PREDICATES = (INITIATED_AT, TERMINATED_AT)


@dataclass(frozen=True)
class Var:
    name: str
    sort: Optional[str] = None

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Func:
    """Constructor application such as ``walking(id1)``."""

    name: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Succ:
    """Successor of a time term, written ``T+1``."""

    term: "Term"

    def __str__(self) -> str:
        return f"{self.term}+1"


@dataclass(frozen=True)
class BoundaryTerm:
    """Successor of the last time-point; atoms containing it do not exist."""

    def __str__(self) -> str:
        return "<boundary>"


BOUNDARY = BoundaryTerm()

Term = Union[Var, Const, Func, Succ, BoundaryTerm]


def is_ground_term(term: Term) -> bool:
    if isinstance(term, Const):
        return True
    if isinstance(term, Func):
        return all(is_ground_term(a) for a in term.args)
    return False


def term_variables(term: Term) -> Iterator[Var]:
    if isinstance(term, Var):
        yield term
    elif isinstance(term, Func):
        for arg in term.args:
            yield from term_variables(arg)
    elif isinstance(term, Succ):
        yield from term_variables(term.term)


class Role(str, Enum):
    EVIDENCE = "evidence"
    QUERY = "query"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class Sort:
    """Finite sort; ``constants`` is empty for the time sort and for constructed sorts."""

    name: str
    constants: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.constants)) != len(self.constants):
            raise SignatureError(f"duplicate constant in sort {self.name}")


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    arg_sorts: Tuple[str, ...]
    role: Role

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def time_position(self) -> Optional[int]:
        """Index of the trailing time argument, if any."""
        if self.arg_sorts and self.arg_sorts[-1] == TIME_SORT:
            return len(self.arg_sorts) - 1
        return None


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    arg_sorts: Tuple[str, ...]
    result_sort: str

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass(frozen=True)
class Signature:
    """
    Sorted vocabulary of a knowledge base.

    Attributes:
        sorts: Sort name to declaration
        predicates: Predicate name to declaration (with evidence/query/auxiliary role)
        functions: Constructor name to declaration (event and fluent constructors)
        horizon: Last time-point; ``None`` until bound to a narrative
    """

    sorts: Dict[str, Sort] = field(default_factory=dict)
    predicates: Dict[str, PredicateDecl] = field(default_factory=dict)
    functions: Dict[str, FunctionDecl] = field(default_factory=dict)
    horizon: Optional[int] = None
    _domains: Dict[str, Tuple[Term, ...]] = field(
        default_factory=dict, init=False, compare=False, repr=False
    )

    def with_horizon(self, horizon: int) -> "Signature":
        if horizon < 0:
            raise SignatureError(f"negative horizon {horizon}")
        return replace(self, horizon=horizon)

    def without_predicates(self, names) -> "Signature":
        kept = {k: v for k, v in self.predicates.items() if k not in set(names)}
        return replace(self, predicates=kept)

    def predicate(self, name: str) -> PredicateDecl:
        try:
            return self.predicates[name]
        except KeyError:
            raise SignatureError(f"undeclared predicate {name}") from None

    def function(self, name: str) -> FunctionDecl:
        try:
            return self.functions[name]
        except KeyError:
            raise SignatureError(f"undeclared function {name}") from None

    def has_sort(self, name: str) -> bool:
        return name in self.sorts

    @property
    def fluent_sort(self) -> str:
        return self.predicate(HOLDS_AT).arg_sorts[0]

    def constructors(self, result_sort: str) -> List[FunctionDecl]:
        return [f for f in self.functions.values() if f.result_sort == result_sort]

    def domain(self, sort: str) -> Tuple[Term, ...]:
        """
        Enumerate the ground terms of a sort.

        Time yields ``0..horizon``; other sorts yield their declared constants
        followed by every constructor application with that result sort.
        """
        cached = self._domains.get(sort)
        if cached is not None:
            return cached
        if sort == TIME_SORT:
            if self.horizon is None:
                raise SignatureError("time domain requested before a horizon was set")
            terms: Tuple[Term, ...] = tuple(Const(str(t)) for t in range(self.horizon + 1))
        else:
            if sort not in self.sorts:
                raise SignatureError(f"undeclared sort {sort}")
            built: List[Term] = [Const(c) for c in self.sorts[sort].constants]
            for decl in self.constructors(sort):
                arg_domains = [self.domain(s) for s in decl.arg_sorts]
                for args in itertools.product(*arg_domains):
                    built.append(Func(decl.name, tuple(args)))
            terms = tuple(built)
        self._domains[sort] = terms
        return terms

    def contains(self, sort: str, term: Term) -> bool:
        """Whether a ground term belongs to a sort, without enumerating the domain."""
        if isinstance(term, Const):
            if sort == TIME_SORT:
                if not term.name.isdigit():
                    return False
                return self.horizon is None or int(term.name) <= self.horizon
            declared = self.sorts.get(sort)
            return declared is not None and term.name in declared.constants
        if isinstance(term, Func):
            decl = self.functions.get(term.name)
            if decl is None or decl.result_sort != sort or decl.arity != len(term.args):
                return False
            return all(self.contains(s, a) for s, a in zip(decl.arg_sorts, term.args))
        return False

    def validate(self) -> None:
        """Check that every declaration references declared sorts and EC arities."""
        for decl in list(self.predicates.values()) + list(self.functions.values()):
            for sort in decl.arg_sorts:
                if sort != TIME_SORT and sort not in self.sorts:
                    raise SignatureError(f"{decl.name} uses undeclared sort {sort}")
        for decl in self.functions.values():
            if decl.result_sort not in self.sorts:
                raise SignatureError(f"{decl.name} has undeclared result sort {decl.result_sort}")
        for name in (HAPPENS, HOLDS_AT, INITIATED_AT, TERMINATED_AT):
            decl = self.predicates.get(name)
            if decl is None:
                continue
            if decl.arity != 2 or decl.arg_sorts[1] != TIME_SORT:
                raise SignatureError(f"{name} must be declared as {name}(<sort>, {TIME_SORT})")
        holds = self.predicates.get(HOLDS_AT)
        for name in EFFECT_PREDICATES:
            decl = self.predicates.get(name)
            if decl is not None and holds is not None and decl.arg_sorts[0] != holds.arg_sorts[0]:
                raise SignatureError(f"{name} and {HOLDS_AT} must range over the same fluent sort")
