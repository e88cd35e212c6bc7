from src.kb.parser import parse_annotation, parse_ground_atom, parse_kb, parse_narrative
from src.kb.serializer import serialize_kb
from src.kb.source import FormulaGroup, KnowledgeBaseSource, Rule, RuleKind

__all__ = [
    "parse_annotation",
    "parse_ground_atom",
    "parse_kb",
    "parse_narrative",
    "serialize_kb",
    "FormulaGroup",
    "KnowledgeBaseSource",
    "Rule",
    "RuleKind",
]
