"""Knowledge base text output; ``parse_kb(serialize_kb(kb))`` rebuilds the same rules."""

from typing import List

from src.kb.source import KnowledgeBaseSource, Rule
from src.logic.formulas import HARD, Atom, Implies, Not, format_formula
from src.logic.terms import Signature


def format_weight(weight) -> str:
    if weight is None:
        return ""
    if weight == HARD:
        return "hard"
    return repr(float(weight))


def format_rule(rule: Rule) -> str:
    formula = rule.formula
    consequent = formula.consequent if isinstance(formula, Implies) else None
    is_literal = isinstance(consequent, Atom) or (
        isinstance(consequent, Not) and isinstance(consequent.operand, Atom)
    )
    if is_literal:
        text = f"{format_formula(consequent)} :- {format_formula(formula.antecedent)}"
    else:
        text = format_formula(formula)
    prefix = []
    if rule.group is not None:
        prefix.append(f"@{rule.group.value}={rule.tie}" if rule.tie else f"@{rule.group.value}")
    weight = format_weight(rule.weight)
    if weight:
        prefix.append(weight)
    return " ".join(prefix + [text]) + "."


def format_signature(signature: Signature) -> List[str]:
    lines = []
    for sort in signature.sorts.values():
        if sort.constants:
            lines.append(f"sort {sort.name} = {{{', '.join(sort.constants)}}}.")
        else:
            lines.append(f"sort {sort.name}.")
    for decl in signature.functions.values():
        args = f"({', '.join(decl.arg_sorts)})" if decl.arg_sorts else ""
        lines.append(f"{decl.result_sort} {decl.name}{args}.")
    for decl in signature.predicates.values():
        lines.append(f"{decl.role.value} {decl.name}({', '.join(decl.arg_sorts)}).")
    return lines


def serialize_kb(kb: KnowledgeBaseSource, header: str = "") -> str:
    """
    Render a knowledge base in the DSL.

    Args:
        kb: Source or compiled knowledge base
        header: Optional comment placed on top of the file

    Returns:
        DSL text ending with a newline
    """
    lines = [f"// {line}" for line in header.splitlines()]
    lines.extend(format_signature(kb.signature))
    lines.append("")
    lines.extend(format_rule(rule) for rule in kb.rules)
    return "\n".join(lines) + "\n"
