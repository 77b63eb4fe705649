"""
Exponential-Polynomial Ring
===========================

Exact arithmetic on finite sums of terms

    coeff * v1^m1 ... vn^mn * exp(f1*v1 + ... + fn*vn)

with rational coefficients and frequencies over an ordered set of variables.
Every phase, operator output and cleared Wronskian in this package is an
element of this ring, so all "functional vanishes identically" questions
reduce to a normal-form comparison: distinct (monomial, frequency) pairs are
linearly independent functions.

Values are immutable. All operations return new normal forms.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Key = Tuple[Tuple[Fraction, ...], Tuple[int, ...]]


class AlgebraError(ValueError):
    """Raised for malformed ring input."""
    pass


class VariableMismatchError(AlgebraError):
    """Raised when operands live over different variable sets or a variable is unknown."""
    pass


class EvaluationRangeError(AlgebraError):
    """Raised when floating evaluation leaves the double range."""
    pass


def as_fraction(value: Union[Rational, str, float]) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction. Floats are rejected."""
    if isinstance(value, bool):
        raise AlgebraError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise AlgebraError(f"Not a rational literal: {value!r}") from exc
    raise AlgebraError(f"Exact rational required, got {type(value).__name__} {value!r}")


@dataclass(frozen=True)
class VarSet:
    """Ordered, duplicate-free tuple of variable names."""

    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, 'names', names)
        if any(not isinstance(n, str) or not n for n in names):
            raise AlgebraError(f"Variable names must be non-empty strings: {names}")
        if len(set(names)) != len(names):
            raise AlgebraError(f"Duplicate variable names: {names}")

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        if name not in self.names:
            raise VariableMismatchError(f"Unknown variable '{name}'. Available: {', '.join(self.names)}")
        return self.names.index(name)

    def without(self, name: str) -> 'VarSet':
        self.index(name)
        return VarSet(tuple(n for n in self.names if n != name))


KP_VARS = VarSet(('t', 'x', 'y'))
KDV_VARS = VarSet(('t', 'x'))


def zk_vars(d: int) -> VarSet:
    """Variables (t, x1, ..., xd) of the ZK/mZK models."""
    if d < 2:
        raise AlgebraError(f"ZK dimension must be >= 2 (got {d})")
    return VarSet(('t',) + tuple(f'x{i}' for i in range(1, d + 1)))


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    mono: Tuple[int, ...]
    freq: Tuple[Fraction, ...]

    @property
    def key(self) -> Key:
        return (self.freq, self.mono)


class ExpPoly:
    """
    Element of the exponential-polynomial ring over a VarSet.

    Normal form: no two terms share (mono, freq), no zero coefficients,
    terms sorted by (freq, mono) lexicographically. The zero element has
    no terms.

    Example:
        >>> x = ExpPoly.variable(KP_VARS, 'x')
        >>> e = ExpPoly.exponential(KP_VARS, {'x': 2})
        >>> (x * e).diff('x') == e + 2 * x * e
        True
    """

    __slots__ = ('_vars', '_terms')

    def __init__(self, vars: VarSet, terms: Iterable[Term] = ()):
        collected: Dict[Key, Fraction] = {}
        n = len(vars)
        for term in terms:
            if len(term.mono) != n or len(term.freq) != n:
                raise AlgebraError(
                    f"Term arity {len(term.mono)}/{len(term.freq)} does not match {n} variables"
                )
            if any(m < 0 for m in term.mono):
                raise AlgebraError(f"Negative monomial exponent in {term.mono}")
            key = (tuple(Fraction(f) for f in term.freq), tuple(int(m) for m in term.mono))
            collected[key] = collected.get(key, Fraction(0)) + Fraction(term.coeff)
        self._vars = vars
        self._terms = _normalize(collected)

    @classmethod
    def _from_map(cls, vars: VarSet, collected: Dict[Key, Fraction]) -> 'ExpPoly':
        obj = cls.__new__(cls)
        obj._vars = vars
        obj._terms = _normalize(collected)
        return obj

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, vars: VarSet) -> 'ExpPoly':
        return cls(vars)

    @classmethod
    def constant(cls, vars: VarSet, value: Rational) -> 'ExpPoly':
        n = len(vars)
        return cls(vars, [Term(as_fraction(value), (0,) * n, (Fraction(0),) * n)])

    @classmethod
    def variable(cls, vars: VarSet, name: str) -> 'ExpPoly':
        mono = [0] * len(vars)
        mono[vars.index(name)] = 1
        return cls(vars, [Term(Fraction(1), tuple(mono), (Fraction(0),) * len(vars))])

    @classmethod
    def exponential(
        cls,
        vars: VarSet,
        freq: Mapping[str, Rational],
        coeff: Rational = 1,
        mono: Optional[Mapping[str, int]] = None,
    ) -> 'ExpPoly':
        """coeff * prod(v^mono[v]) * exp(sum(freq[v] * v)); missing names count as zero."""
        f = [Fraction(0)] * len(vars)
        for name, value in freq.items():
            f[vars.index(name)] = as_fraction(value)
        m = [0] * len(vars)
        for name, power in (mono or {}).items():
            m[vars.index(name)] = int(power)
        return cls(vars, [Term(as_fraction(coeff), tuple(m), tuple(f))])

    # -- accessors ------------------------------------------------------

    @property
    def vars(self) -> VarSet:
        return self._vars

    @property
    def terms(self) -> Tuple[Term, ...]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __hash__(self) -> int:
        return hash((self._vars, self._terms))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._vars == other._vars and self._terms == other._terms

    def __repr__(self) -> str:
        return f'ExpPoly({to_text(self)!r})'

    def is_zero(self) -> bool:
        return not self._terms

    def frequencies(self) -> List[Tuple[Fraction, ...]]:
        """Distinct frequency vectors in normal-form order."""
        seen: List[Tuple[Fraction, ...]] = []
        for term in self._terms:
            if not seen or seen[-1] != term.freq:
                seen.append(term.freq)
        return seen

    def is_pure_exponential(self) -> bool:
        """True when no term carries a polynomial prefactor."""
        return all(not any(t.mono) for t in self._terms)

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other: object) -> 'ExpPoly':
        if isinstance(other, ExpPoly):
            if other._vars != self._vars:
                raise VariableMismatchError(
                    f"Variable sets differ: {self._vars.names} vs {other._vars.names}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return ExpPoly.constant(self._vars, other)
        raise AlgebraError(f"Cannot combine ExpPoly with {type(other).__name__}")

    def __add__(self, other: object) -> 'ExpPoly':
        other = self._coerce(other)
        collected = {t.key: t.coeff for t in self._terms}
        for term in other._terms:
            collected[term.key] = collected.get(term.key, Fraction(0)) + term.coeff
        return ExpPoly._from_map(self._vars, collected)

    __radd__ = __add__

    def __neg__(self) -> 'ExpPoly':
        return ExpPoly._from_map(self._vars, {t.key: -t.coeff for t in self._terms})

    def __sub__(self, other: object) -> 'ExpPoly':
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> 'ExpPoly':
        return self._coerce(other) - self

    def __mul__(self, other: object) -> 'ExpPoly':
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            scale = Fraction(other)
            return ExpPoly._from_map(self._vars, {t.key: scale * t.coeff for t in self._terms})
        other = self._coerce(other)
        collected: Dict[Key, Fraction] = {}
        for a in self._terms:
            for b in other._terms:
                key = (
                    tuple(fa + fb for fa, fb in zip(a.freq, b.freq)),
                    tuple(ma + mb for ma, mb in zip(a.mono, b.mono)),
                )
                collected[key] = collected.get(key, Fraction(0)) + a.coeff * b.coeff
        return ExpPoly._from_map(self._vars, collected)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> 'ExpPoly':
        if not isinstance(power, int) or power < 0:
            raise AlgebraError(f"Only non-negative integer powers are supported (got {power!r})")
        result = ExpPoly.constant(self._vars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def diff(self, var: str, order: int = 1) -> 'ExpPoly':
        return diff(self, var, order)


def _normalize(collected: Dict[Key, Fraction]) -> Tuple[Term, ...]:
    return tuple(
        Term(coeff, mono, freq)
        for (freq, mono), coeff in sorted(collected.items())
        if coeff != 0
    )


def _check_same_vars(p: ExpPoly, q: ExpPoly) -> None:
    if p.vars != q.vars:
        raise VariableMismatchError(f"Variable sets differ: {p.vars.names} vs {q.vars.names}")


def add(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    _check_same_vars(p, q)
    return p + q


def mul(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    _check_same_vars(p, q)
    return p * q


def diff(p: ExpPoly, var: str, order: int = 1) -> ExpPoly:
    """
    Partial derivative of p with respect to var, applied order times.

    Each term c * v^m * exp(f.v) differentiates by the product rule into
    c*m_i * v^(m - e_i) * exp(f.v) + c*f_i * v^m * exp(f.v).

    Raises:
        VariableMismatchError: var is not one of p's variables
        AlgebraError: order is not a positive integer
    """
    i = p.vars.index(var)
    if not isinstance(order, int) or order < 1:
        raise AlgebraError(f"Derivative order must be a positive integer (got {order!r})")
    terms = p.terms
    for _ in range(order):
        collected: Dict[Key, Fraction] = {}
        for t in terms:
            if t.mono[i]:
                mono = t.mono[:i] + (t.mono[i] - 1,) + t.mono[i + 1:]
                key = (t.freq, mono)
                collected[key] = collected.get(key, Fraction(0)) + t.coeff * t.mono[i]
            if t.freq[i]:
                collected[t.key] = collected.get(t.key, Fraction(0)) + t.coeff * t.freq[i]
        terms = _normalize(collected)
        if not terms:
            break
    return ExpPoly._from_map(p.vars, {t.key: t.coeff for t in terms})


def substitute_affine(
    p: ExpPoly,
    A: Sequence[Sequence[Rational]],
    b: Optional[Sequence[Rational]] = None,
) -> ExpPoly:
    """
    Compose p with the affine map v -> A v + b.

    Row i of A gives the new value of variable i as a linear form in the
    variables. Frequencies map through the transpose of A and monomials
    expand multinomially. A shift b that pairs non-trivially with an
    exponential frequency would create an irrational constant exp(f.b) and
    is rejected.

    Args:
        p: polynomial to transform
        A: square matrix of rationals, one row per variable of p
        b: optional shift vector, zero by default

    Returns:
        ExpPoly q with q(v) = p(A v + b)

    Raises:
        AlgebraError: dimension mismatch or a non-representable shift
    """
    n = len(p.vars)
    if len(A) != n or any(len(row) != n for row in A):
        raise AlgebraError(f"Affine matrix must be {n}x{n} for variables {p.vars.names}")
    matrix = [[as_fraction(a) for a in row] for row in A]
    shift = [as_fraction(v) for v in b] if b is not None else [Fraction(0)] * n
    if len(shift) != n:
        raise AlgebraError(f"Affine shift must have {n} entries (got {len(shift)})")

    images = []
    for i in range(n):
        collected: Dict[Key, Fraction] = {}
        zero_freq = (Fraction(0),) * n
        for j in range(n):
            if matrix[i][j]:
                mono = tuple(1 if k == j else 0 for k in range(n))
                collected[(zero_freq, mono)] = matrix[i][j]
        if shift[i]:
            collected[(zero_freq, (0,) * n)] = shift[i]
        images.append(ExpPoly._from_map(p.vars, collected))

    result = ExpPoly.zero(p.vars)
    for term in p.terms:
        if sum(f * s for f, s in zip(term.freq, shift)) != 0:
            raise AlgebraError(
                f"Shift {tuple(str(s) for s in shift)} would give exponential term "
                f"with frequency {tuple(str(f) for f in term.freq)} an irrational constant"
            )
        freq = tuple(sum(matrix[i][j] * term.freq[i] for i in range(n)) for j in range(n))
        piece = ExpPoly(p.vars, [Term(term.coeff, (0,) * n, freq)])
        for i, power in enumerate(term.mono):
            if power:
                piece = piece * images[i] ** power
        result = result + piece
    return result


def evaluate(p: ExpPoly, point: Sequence[Union[Rational, float]]) -> float:
    """
    Evaluate p at a point in double precision.

    The result is the plain term sum; its rounding error is bounded by
    roughly len(p) relative ulps of the largest term. When every coordinate
    is rational and every frequency pairs to zero with the point, the sum is
    formed exactly and rounded once.

    Raises:
        VariableMismatchError: point arity differs from the variable count
        EvaluationRangeError: an exponential or the sum overflows
    """
    if len(point) != len(p.vars):
        raise VariableMismatchError(
            f"Point has {len(point)} coordinates, expected {len(p.vars)} for {p.vars.names}"
        )
    exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in point)
    if exact:
        coords = [Fraction(v) for v in point]
        if all(sum(f * v for f, v in zip(t.freq, coords)) == 0 for t in p.terms):
            total = Fraction(0)
            for t in p.terms:
                value = t.coeff
                for v, m in zip(coords, t.mono):
                    value *= v ** m
                total += value
            return float(total)
    coords_f = [float(v) for v in point]
    total_f = 0.0
    for t in p.terms:
        exponent = sum(float(f) * v for f, v in zip(t.freq, coords_f))
        try:
            value = float(t.coeff) * math.exp(exponent)
        except OverflowError as exc:
            raise EvaluationRangeError(
                f"exp({exponent:.6g}) overflows at point {tuple(point)}"
            ) from exc
        for v, m in zip(coords_f, t.mono):
            value *= v ** m
        total_f += value
    if math.isinf(total_f) or math.isnan(total_f):
        raise EvaluationRangeError(f"Evaluation left the double range at point {tuple(point)}")
    return total_f


def term_exponents(p: ExpPoly, coords: Mapping[str, np.ndarray]) -> List[np.ndarray]:
    """Per-term exponent arrays f.v on broadcastable coordinate arrays."""
    arrays = [np.asarray(coords[name], dtype=float) for name in p.vars]
    out = []
    for t in p.terms:
        exponent = np.zeros(np.broadcast(*arrays).shape)
        for f, arr in zip(t.freq, arrays):
            if f:
                exponent = exponent + float(f) * arr
        out.append(exponent)
    return out


def eval_terms(
    p: ExpPoly,
    coords: Mapping[str, np.ndarray],
    shift: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Vectorized evaluation of exp(-shift) * p on numpy coordinate arrays.

    A common shift lets callers evaluate ratios of large exponential sums
    without overflow: scaling numerator and denominator by the same factor
    leaves the ratio unchanged.
    """
    arrays = [np.asarray(coords[name], dtype=float) for name in p.vars]
    shape = np.broadcast(*arrays).shape
    total = np.zeros(shape)
    for t, exponent in zip(p.terms, term_exponents(p, coords)):
        if shift is not None:
            exponent = exponent - shift
        value = float(t.coeff) * np.exp(exponent)
        for arr, m in zip(arrays, t.mono):
            if m:
                value = value * arr ** m
        total = total + value
    return total


def max_exponent(p: ExpPoly, coords: Mapping[str, np.ndarray]) -> np.ndarray:
    """Pointwise maximum of the term exponents; zero for the zero polynomial."""
    exps = term_exponents(p, coords)
    if not exps:
        arrays = [np.asarray(coords[name], dtype=float) for name in p.vars]
        return np.zeros(np.broadcast(*arrays).shape)
    return np.maximum.reduce(exps)


def is_zero(p: ExpPoly) -> bool:
    return p.is_zero()


def equals(p: ExpPoly, q: ExpPoly) -> bool:
    """Normal-form equality; polynomials over different VarSets are never equal."""
    return p == q


def group_by_frequency(p: ExpPoly, var: str) -> List[Tuple[Fraction, ExpPoly, int]]:
    """
    Partition p by the frequency of its terms in var.

    Returns a list of (frequency, coefficient, degree) in increasing
    frequency order. The coefficient lives over the remaining variables and
    collects the terms with their var-power stripped; degree is the highest
    power of var seen in the group, so any positive degree flags a
    polynomial prefactor.
    """
    i = p.vars.index(var)
    rest = p.vars.without(var)
    groups: Dict[Fraction, Dict[Key, Fraction]] = {}
    degrees: Dict[Fraction, int] = {}
    for t in p.terms:
        f = t.freq[i]
        key = (t.freq[:i] + t.freq[i + 1:], t.mono[:i] + t.mono[i + 1:])
        bucket = groups.setdefault(f, {})
        bucket[key] = bucket.get(key, Fraction(0)) + t.coeff
        degrees[f] = max(degrees.get(f, 0), t.mono[i])
    out = []
    for f in sorted(groups):
        coeff = ExpPoly._from_map(rest, groups[f])
        if not coeff.is_zero():
            out.append((f, coeff, degrees[f]))
    return out


def embed(p: ExpPoly, vars: VarSet) -> ExpPoly:
    """Re-express p over a VarSet containing all of p's variables."""
    positions = [vars.index(name) for name in p.vars]
    n = len(vars)
    terms = []
    for t in p.terms:
        mono = [0] * n
        freq = [Fraction(0)] * n
        for src, dst in enumerate(positions):
            mono[dst] = t.mono[src]
            freq[dst] = t.freq[src]
        terms.append(Term(t.coeff, tuple(mono), tuple(freq)))
    return ExpPoly(vars, terms)


def gauge(p: ExpPoly, var: str, k: Rational) -> ExpPoly:
    """Multiply p by exp(k * var)."""
    return p * ExpPoly.exponential(p.vars, {var: k})


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def to_text(p: ExpPoly) -> str:
    """
    Canonical serialization, one `coeff * v^m ... * exp(f*v + ...)` block per
    term joined by ' + '. Every variable is printed in VarSet order so the
    text parses back without knowing which powers are zero.
    """
    if p.is_zero():
        return '0'
    blocks = []
    for t in p.terms:
        mono = ' '.join(f'{name}^{m}' for name, m in zip(p.vars, t.mono))
        freq = ' + '.join(f'{_format_rational(f)}*{name}' for name, f in zip(p.vars, t.freq))
        blocks.append(f'{_format_rational(t.coeff)} * {mono} * exp({freq})')
    return ' + '.join(blocks)
