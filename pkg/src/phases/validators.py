"""
Parameter Validation for Phase Constructors
===========================================

Checks that phase parameters meet the constraints each family needs for
a positive, non-degenerate phase:
- Positive amplitudes
- Strictly increasing spectral parameters
- Distinct k's for two-term phases
- Exact rationals only (no floats)
"""

from fractions import Fraction
from typing import Any, Dict, List, Sequence

from src.algebra.expalg import AlgebraError, ExpPoly, as_fraction


class ValidationError(ValueError):
    """Raised when phase parameters violate their family's constraints."""
    pass


def validate_line_params(a1: Fraction, a2: Fraction, k1: Fraction, k2: Fraction) -> None:
    """
    Validate line-soliton parameters.

    Checks:
    - a1, a2 > 0
    - k1 != k2
    """
    _check_positive([a1, a2], 'a', 'line')
    if k1 == k2:
        raise ValidationError(f"line: k1 and k2 must differ (got {k1} and {k2})")


def validate_resonant_params(a: Sequence[Fraction], k: Sequence[Fraction]) -> None:
    """
    Validate resonant-phase parameters.

    Checks:
    - At least one exponential
    - One amplitude per k
    - a_i > 0
    - k_1 < k_2 < ... < k_M
    """
    if not k:
        raise ValidationError("resonant: at least one k is required (M >= 1)")
    if len(a) != len(k):
        raise ValidationError(f"resonant: {len(a)} amplitudes for {len(k)} k's")
    _check_positive(a, 'a', 'resonant')
    _check_strictly_increasing(k, 'resonant')


def validate_resonant_general_params(
    a1: Sequence[Fraction],
    a2: Sequence[Fraction],
    k: Sequence[Fraction],
) -> None:
    if not k:
        raise ValidationError("resonant_general: at least one k is required (M >= 1)")
    if len(a1) != len(k) or len(a2) != len(k):
        raise ValidationError(
            f"resonant_general: amplitude lists of length {len(a1)}/{len(a2)} for {len(k)} k's"
        )
    _check_positive(a1, 'a1', 'resonant_general')
    _check_positive(a2, 'a2', 'resonant_general')
    _check_strictly_increasing(k, 'resonant_general')


def validate_two_soliton_params(k: Sequence[Fraction]) -> None:
    """Validate 2-soliton parameters: exactly four k's with k1 < k2 < k3 < k4."""
    if len(k) != 4:
        raise ValidationError(f"two_soliton: exactly 4 k's required (got {len(k)})")
    _check_strictly_increasing(k, 'two_soliton')


def validate_positive_scalar(value: Fraction, name: str, context: str) -> None:
    if value <= 0:
        raise ValidationError(f"{context}: {name} must be positive (got {value})")


def validate_phase_theta(theta: ExpPoly, context: str) -> None:
    """A phase must be a non-zero ring element."""
    if theta.is_zero():
        raise ValidationError(f"{context}: phase expands to zero")


def is_positive_phase(theta: ExpPoly) -> bool:
    """Sufficient criterion for pointwise positivity: a pure exponential sum with positive coefficients."""
    return (
        not theta.is_zero()
        and theta.is_pure_exponential()
        and all(t.coeff > 0 for t in theta.terms)
    )


def rationals(values: Sequence[Any], name: str, context: str) -> List[Fraction]:
    """Coerce a parameter list to Fractions, re-raising as ValidationError."""
    try:
        return [as_fraction(v) for v in values]
    except AlgebraError as exc:
        raise ValidationError(f"{context}: {name} must be exact rationals ({exc})") from exc


def rational(value: Any, name: str, context: str) -> Fraction:
    return rationals([value], name, context)[0]


def _check_positive(values: Sequence[Fraction], name: str, context: str) -> None:
    """Check every entry is strictly positive."""
    for i, value in enumerate(values, start=1):
        if value <= 0:
            raise ValidationError(f"{context}: {name}{i} must be positive (got {value})")


def _check_strictly_increasing(k: Sequence[Fraction], context: str) -> None:
    """Check k_1 < k_2 < ... (strict)."""
    for i in range(len(k) - 1):
        if not k[i] < k[i + 1]:
            raise ValidationError(
                f"{context}: k's must be strictly increasing "
                f"(k{i + 1}={k[i]} >= k{i + 2}={k[i + 1]})"
            )


def describe_params(params: Dict[str, Any]) -> str:
    """Compact 'name=value' rendering used in log lines."""
    parts = []
    for name, value in params.items():
        if isinstance(value, (list, tuple)):
            parts.append(f"{name}=[{','.join(str(v) for v in value)}]")
        else:
            parts.append(f'{name}={value}')
    return ' '.join(parts)
