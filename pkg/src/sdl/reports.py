from __future__ import annotations

from dataclasses import dataclass, field

PASS_TOL = 1e-9


@dataclass
class InequalityReport:
    """One instance of an inequality ``lhs <= rhs``."""

    inequality: str
    graph: str
    params: dict
    lhs: float
    rhs: float
    passed: bool
    hard: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @classmethod
    def compare(cls, inequality, graph, params, lhs, rhs, hard=True, notes=None, tol=PASS_TOL):
        return cls(inequality, graph, params, float(lhs), float(rhs), bool(lhs <= rhs + tol), hard, list(notes or []))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tag = "" if self.hard else " (reported only)"
        return f"{status} {self.inequality} {self.graph}: lhs={self.lhs:.12g} rhs={self.rhs:.12g}{tag}"
