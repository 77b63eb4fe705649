"""
Phase Reconstruction
====================

Inverts ΘW_y back to resonant phase parameters, and splits a 4-term phase
into 2-soliton parameters.

For a resonant phase Σ a_i e^{θ(k_i)} the cleared y-Wronskian has one
entry per pair i < j with y-frequency k_i² + k_j², x-frequency k_i + k_j
and coefficient b_ij = a_i a_j (k_i² - k_j²)². Reconstruction runs in
three stages:

1. turnpike: recover the squares q_i = k_i² from their pairwise sums by
   backtracking
2. signs: choose k_i = ±√q_i so every entry's x-frequency is k_i + k_j
3. amplitudes: solve a_i a_j = b_ij / (k_i² - k_j²)² exactly

Every candidate is confirmed by rebuilding ΘW_y and comparing normal forms.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.algebra.expalg import ExpPoly
from src.analysis.cones import ConeDecomposition, decompose
from src.analysis.identities import predicted_resonant_wy
from src.phases.constructors import two_soliton
from src.phases.validators import ValidationError

logger = logging.getLogger(__name__)


class ReconstructionError(ValueError):
    """Raised when the input is not the image of the expected phase family."""
    pass


@dataclass(frozen=True)
class ResonantParameters:
    k: Tuple[Fraction, ...]
    a: Tuple[Fraction, ...]

    def pairs(self) -> List[Tuple[Fraction, Fraction]]:
        return list(zip(self.k, self.a))

    def to_dict(self) -> Dict[str, Any]:
        return {'k': [str(v) for v in self.k], 'a': [str(v) for v in self.a]}


def exact_sqrt(value: Fraction) -> Optional[Fraction]:
    """Nonnegative rational square root, or None when value is not a rational square."""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Fraction(rn, rd)


def _remove(pool: List[Fraction], values: Sequence[Fraction]) -> Optional[List[Fraction]]:
    remaining = list(pool)
    for v in values:
        try:
            remaining.remove(v)
        except ValueError:
            return None
    return remaining


def turnpike_sums(sums: Sequence[Fraction], m: int) -> List[List[Fraction]]:
    """
    All sorted m-sets whose pairwise sums are exactly the multiset `sums`.

    The two smallest sums are q1+q2 and q1+q3; each remaining sum is tried
    as q2+q3, which fixes q1. The rest follow greedily: the smallest unused
    sum is always q1 plus the next element. Dead ends backtrack.
    """
    ordered = sorted(sums)
    if len(ordered) != m * (m - 1) // 2 or m < 3:
        return []
    solutions: List[List[Fraction]] = []

    def extend(points: List[Fraction], pool: List[Fraction], depth: int) -> None:
        if not pool:
            if len(points) == m:
                solutions.append(sorted(points))
            return
        candidate = pool[0] - points[0]
        if candidate < points[-1]:
            return
        rest = _remove(pool, [candidate + p for p in points])
        logger.debug("turnpike depth %d: try %s -> %s", depth, candidate, 'ok' if rest is not None else 'dead end')
        if rest is not None:
            extend(points + [candidate], rest, depth + 1)

    tried = set()
    for j in range(2, len(ordered)):
        s23 = ordered[j]
        if s23 in tried:
            continue
        tried.add(s23)
        q1 = (ordered[0] + ordered[1] - s23) / 2
        q2, q3 = ordered[0] - q1, ordered[1] - q1
        if not q1 <= q2 <= q3:
            continue
        pool = _remove(ordered, [ordered[0], ordered[1], s23])
        if pool is not None:
            extend([q1, q2, q3], pool, 3)
    unique = []
    for s in solutions:
        if s not in unique:
            unique.append(s)
    return unique


def _entry_data(decomp: ConeDecomposition) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """(y-freq, x-freq, coefficient) per entry; each coefficient must be a single term."""
    data = []
    for freq, coeff in decomp.entries:
        if len(coeff) != 1:
            raise ReconstructionError(
                f"entry at y-frequency {freq} has {len(coeff)} terms; resonant images have one"
            )
        term = coeff.terms[0]
        if any(term.mono):
            raise ReconstructionError(f"entry at y-frequency {freq} carries a polynomial prefactor")
        data.append((freq, term.freq[coeff.vars.index('x')], term.coeff))
    return data


def _infer_m(n: int) -> int:
    m = 2
    while m * (m - 1) // 2 < n:
        m += 1
    if m * (m - 1) // 2 != n:
        triangular = [str(k * (k - 1) // 2) for k in range(2, m + 2)]
        raise ReconstructionError(
            f"{n} entries is not M(M-1)/2 for any M (expected one of {', '.join(triangular)}, ...)"
        )
    return m


def _square_candidates(data: List[Tuple[Fraction, Fraction, Fraction]], m: int) -> List[List[Fraction]]:
    if m == 2:
        y_freq, x_freq, _ = data[0]
        gap = exact_sqrt(2 * y_freq - x_freq ** 2)
        if gap is None:
            return []
        k_low, k_high = (x_freq - gap) / 2, (x_freq + gap) / 2
        return [sorted([k_low ** 2, k_high ** 2])]
    return turnpike_sums([y for y, _, _ in data], m)


def _sign_choices(squares: List[Fraction], data) -> List[List[Fraction]]:
    roots = [exact_sqrt(q) for q in squares]
    if any(r is None for r in roots):
        return []
    by_y = {y: x for y, x, _ in data}
    found = []
    for signs in product((1, -1), repeat=len(roots)):
        k = [s * r for s, r in zip(signs, roots)]
        if len(set(k)) != len(k):
            continue
        ok = all(
            by_y.get(k[i] ** 2 + k[j] ** 2) == k[i] + k[j]
            for i in range(len(k))
            for j in range(i + 1, len(k))
        )
        if ok and sorted(k) not in found:
            found.append(sorted(k))
    return found


def _amplitudes(k: List[Fraction], data, m: int) -> Optional[List[Fraction]]:
    coeff = {y: b for y, _, b in data}
    c = {}
    for i in range(m):
        for j in range(i + 1, m):
            b = coeff[k[i] ** 2 + k[j] ** 2]
            c[(i, j)] = b / (k[i] ** 2 - k[j] ** 2) ** 2
            if c[(i, j)] <= 0:
                raise ReconstructionError(
                    f"coefficient {b} for pair ({i + 1},{j + 1}) is not positive; no a_i > 0 fit"
                )
    if m == 2:
        return [Fraction(1), c[(0, 1)]]
    a1 = exact_sqrt(c[(0, 1)] * c[(0, 2)] / c[(1, 2)])
    if a1 is None or a1 == 0:
        return None
    return [a1] + [c[(0, j)] / a1 for j in range(1, m)]


def reconstruct_resonant(decomp: ConeDecomposition, m: Optional[int] = None) -> ResonantParameters:
    """
    Recover (k, a) of a resonant phase from the y-decomposition of its ΘW_y.

    Args:
        decomp: decomposition in y of ΘW_y(Θ)
        m: number of exponentials; inferred from the entry count when omitted

    Returns:
        ResonantParameters with k strictly increasing and a > 0. For m = 2
        the amplitudes are normalised by a_1 = 1.

    Raises:
        ReconstructionError: entry count, term shape, signs or sums do not
            fit any resonant phase
    """
    if decomp.var != 'y':
        raise ReconstructionError(f"expected a decomposition in y, got '{decomp.var}'")
    n = len(decomp.entries)
    if m is None:
        m = _infer_m(n)
    if m < 2:
        raise ReconstructionError(f"M must be at least 2 (got {m})")
    if n != m * (m - 1) // 2:
        raise ReconstructionError(f"{n} entries do not match M(M-1)/2 = {m * (m - 1) // 2} for M={m}")
    data = _entry_data(decomp)

    for squares in _square_candidates(data, m):
        for k in _sign_choices(squares, data):
            a = _amplitudes(k, data, m)
            if a is None or any(v <= 0 for v in a):
                continue
            if m == 2:
                logger.info("Reconstructed M=2 phase up to gauge: k=%s", [str(v) for v in k])
                return ResonantParameters(tuple(k), tuple(a))
            if decompose(predicted_resonant_wy(a, k), 'y').entries == decomp.entries:
                logger.info("Reconstructed M=%d phase: k=%s", m, [str(v) for v in k])
                return ResonantParameters(tuple(k), tuple(a))
    raise ReconstructionError(f"no resonant phase with M={m} maps to this decomposition")


def reconstruct_two_soliton(theta: ExpPoly) -> Tuple[Tuple[Fraction, ...], Fraction]:
    """
    Split a 4-term phase into 2-soliton parameters.

    Each term e^{θ_i + θ_j} has x-frequency k_i + k_j and y-frequency
    k_i² + k_j², which fix {k_i, k_j}. The four pairs must be {1,2} x {3,4}
    of four increasing k's with coefficients proportional to k_j - k_i.

    Returns:
        ((k1, k2, k3, k4), scale) with theta == scale * two_soliton(k).theta

    Raises:
        ReconstructionError: theta does not have the 2-soliton pattern
    """
    if len(theta) != 4 or not theta.is_pure_exponential():
        raise ReconstructionError(f"a 2-soliton phase has 4 pure exponential terms (got {len(theta)} terms)")
    ix, iy = theta.vars.index('x'), theta.vars.index('y')
    values = set()
    for term in theta.terms:
        s, q = term.freq[ix], term.freq[iy]
        gap = exact_sqrt(2 * q - s ** 2)
        if gap is None or gap == 0:
            raise ReconstructionError(f"term with x-frequency {s} and y-frequency {q} is not a pair of distinct rationals")
        values.update({(s - gap) / 2, (s + gap) / 2})
    if len(values) != 4:
        raise ReconstructionError(f"terms involve {len(values)} distinct k's, expected 4")
    k = tuple(sorted(values))
    try:
        reference = two_soliton(*k).theta
    except ValidationError as exc:
        raise ReconstructionError(str(exc)) from exc
    scale = theta.terms[0].coeff / reference.terms[0].coeff
    if scale <= 0 or scale * reference != theta:
        raise ReconstructionError(f"terms do not match the 2-soliton pattern for k={[str(v) for v in k]}")
    return k, scale
