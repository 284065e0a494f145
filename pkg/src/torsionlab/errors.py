"""Exception hierarchy shared by every torsionlab module.

Each error carries a stable ``code`` (used by the CLI's JSON error output)
and an optional ``context`` mapping with the offending values.
"""

from __future__ import annotations

from typing import Any


class TorsionLabError(Exception):
    code = "TorsionLabError"

    def __init__(self, message: str = "", **context: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.context = context

    def to_dict(self) -> dict:
        return {
            "error": self.code,
            "message": self.message,
            "context": {k: str(v) for k, v in self.context.items()},
        }


def _make(name: str, doc: str) -> type:
    cls = type(name, (TorsionLabError,), {"code": name, "__doc__": doc})
    return cls


# exact algebra
DivideByZeroPoly = _make("DivideByZeroPoly", "Polynomial division by the zero polynomial.")
FieldMismatch = _make("FieldMismatch", "Operands live over different coefficient fields.")
OddDegree = _make("OddDegree", "Square root of an odd-degree polynomial is not a Laurent series in 1/x.")
NonSquareLeadingCoeff = _make("NonSquareLeadingCoeff", "Leading coefficient has no square root in the field.")
PrecisionExhausted = _make("PrecisionExhausted", "Root certification failed at every rung of the precision ladder.")
ParseError = _make("ParseError", "Malformed polynomial or number-field text.")

# pell
NotSquarefree = _make("NotSquarefree", "Polynomial has a repeated factor.")
InternalCheckFailed = _make("InternalCheckFailed", "An exact self-check failed; this is a bug.")
PellUnsolvable = _make("PellUnsolvable", "No fundamental Pell solution within the step budget.")
RhoOnCurveBranch = _make("RhoOnCurveBranch", "The double root is also a root of the quartic.")
BudgetExceeded = _make("BudgetExceeded", "Coefficient size or step budget exhausted.")

# elliptic
PointNotOnCurve = _make("PointNotOnCurve", "Point does not satisfy the curve equation.")
SingularCurve = _make("SingularCurve", "Curve discriminant vanishes.")
DegenerateFamily = _make("DegenerateFamily", "Torsion condition is identically zero in the family parameter.")
BranchNotInField = _make("BranchNotInField", "Square root needed for the branch is not in the field.")
DenominatorZero = _make("DenominatorZero", "Guarded division by zero.")
RootSelectorInvalid = _make("RootSelectorInvalid", "Root selector does not index an available root.")

# analytic
DegenerateCurve = _make("DegenerateCurve", "g2^3 - 27 g3^2 vanishes.")
PoleProximity = _make("PoleProximity", "Argument too close to a lattice point (pole or zero).")
IllConditioned = _make("IllConditioned", "Linear system for Betti coordinates is ill conditioned.")
BranchJump = _make("BranchJump", "Continuation detected a discontinuity beyond threshold.")

# semi-abelian
TorsionZeroQ = _make("TorsionZeroQ", "Extension parameter v lies in the period lattice.")
NotCM = _make("NotCM", "Lattice is not certified to have complex multiplication.")
AlphaNotAntisymmetric = _make("AlphaNotAntisymmetric", "alpha is not purely imaginary.")
AlphaParity = _make("AlphaParity", "alpha is not divisible by 2 in the endomorphism ring.")
RecognitionFailed = _make("RecognitionFailed", "Betti coordinates not recognized as rationals within bounds.")
