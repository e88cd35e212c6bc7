from src.logic.cnf import to_cnf
from src.logic.formulas import (
    FALSE,
    HARD,
    TRUE,
    And,
    Atom,
    Clause,
    Exists,
    Formula,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    evaluate,
    format_formula,
)
from src.logic.substitution import formula_groundings, groundings, substitute
from src.logic.terms import (
    BOUNDARY,
    TIME_SORT,
    Const,
    Func,
    FunctionDecl,
    PredicateDecl,
    Role,
    Signature,
    Sort,
    Succ,
    Var,
)

__all__ = [
    "FALSE",
    "HARD",
    "TRUE",
    "And",
    "Atom",
    "Clause",
    "Exists",
    "Formula",
    "Iff",
    "Implies",
    "Literal",
    "Not",
    "Or",
    "evaluate",
    "format_formula",
    "to_cnf",
    "formula_groundings",
    "groundings",
    "substitute",
    "BOUNDARY",
    "TIME_SORT",
    "Const",
    "Func",
    "FunctionDecl",
    "PredicateDecl",
    "Role",
    "Signature",
    "Sort",
    "Succ",
    "Var",
]
