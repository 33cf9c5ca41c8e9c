"""Exception types and validation reports shared across lenslab."""

from __future__ import annotations

from typing import NamedTuple


class Violation(NamedTuple):
    """One failed law, with the identifiers that witness the failure."""

    law: str
    witness: tuple
    message: str = ""

    def __str__(self):
        text = f"{self.law}: {', '.join(map(str, self.witness))}"
        return f"{text} ({self.message})" if self.message else text


class LensLabError(Exception):
    pass


class ValidationError(LensLabError):
    def __init__(self, what, report):
        self.report = list(report)
        lines = "\n".join(f"  - {v}" for v in self.report[:20])
        more = f"\n  ... {len(self.report) - 20} more" if len(self.report) > 20 else ""
        super().__init__(f"invalid {what}:\n{lines}{more}")


class UnknownIdentifier(LensLabError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class CospanMismatch(LensLabError):
    pass


class NotCommuting(LensLabError):
    pass


class NotAcyclic(LensLabError):
    """Free products of categories with cycles have infinitely many morphisms."""


class NotDiscreteOpfibration(LensLabError):
    pass


class PreconditionError(LensLabError):
    def __init__(self, failed, detail=""):
        self.failed = tuple(failed)
        msg = "precondition violated: " + ", ".join(self.failed)
        super().__init__(f"{msg} ({detail})" if detail else msg)


class BudgetExceeded(LensLabError):
    pass


class GenerationFailed(LensLabError):
    pass
