"""Exception hierarchy shared by every stage of the recognition pipeline."""

from typing import Optional, Sequence


class ECError(Exception):
    """Base class for all errors raised by this package."""


class KBSyntaxError(ECError, ValueError):
    """Lexical or syntax error in a knowledge base, narrative or annotation file."""

    def __init__(self, message: str, line: int, column: int, text: str = ""):
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"{message} (line {line}, column {column})")


class SignatureError(ECError, ValueError):
    """Undeclared sort, predicate or function, or an arity/sort mismatch."""


class UnsupportedFormulaError(ECError, ValueError):
    """Formula construct that cannot be turned into clauses."""


class CompilationError(ECError):
    """Knowledge base rule that does not fit the initiation/termination form."""


class PolicyError(ECError, ValueError):
    """Inconsistent inertia policy for a compiled knowledge base."""


class NarrativeError(ECError, ValueError):
    """Narrative or annotation inconsistent with the signature or horizon."""


class EvidenceContradictionError(ECError):
    """Hard ground clause falsified by the evidence alone."""

    def __init__(self, clause: str, source: str):
        self.clause = clause
        self.source = source
        super().__init__(f"evidence falsifies hard clause {clause} (from {source})")


class UnsatisfiableError(ECError):
    """No world satisfies the hard clauses of a ground network."""


class InferenceCapError(ECError):
    """Network too large for the requested exact procedure."""


class InvalidTrainingInstanceError(ECError):
    """Annotation violates hard clauses of its ground network."""

    def __init__(self, name: str, violated: Sequence[str]):
        self.name = name
        self.violated = list(violated)
        shown = "; ".join(self.violated[:5])
        super().__init__(
            f"annotation of {name or 'instance'} violates {len(self.violated)} hard clause(s): {shown}"
        )


class LearningError(ECError):
    """Weight update produced non-finite values."""


class StageError(ECError):
    """Error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception, subject: Optional[str] = None):
        self.stage = stage
        self.cause = cause
        self.subject = subject
        where = f" [{subject}]" if subject else ""
        super().__init__(f"{stage}{where}: {cause}")


class ConfigurationError(ECError, ValueError):
    """Invalid settings file, manifest or scenario specification."""
