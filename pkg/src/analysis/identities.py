"""
Closed-Form Operator Predictions
================================

Independent closed forms for operator outputs on the standard phase
families. Tests and the self-test compare these term by term with the
generic operators, so a bug in either side shows up as a mismatch.

For a pure exponential sum Θ = Σ c_p e^{φ_p} the cleared Wronskians have
the pairwise form

    ΘΘ_yy - Θ_y²     = Σ_{p<q} c_p c_q (m_p - m_q)² e^{φ_p + φ_q}
    ΘΘ_xxxx - Θ_xx²  = Σ_{p<q} c_p c_q (l_p² - l_q²)² e^{φ_p + φ_q}

where m and l are the y- and x-frequencies of each term.
"""

from fractions import Fraction
from typing import Dict, Sequence, Tuple

from src.algebra.expalg import KP_VARS, AlgebraError, ExpPoly, Rational, as_fraction, substitute_affine
from src.analysis.operators import airy, cleared_wronskian, heat, wx_cleared, wy_cleared
from src.phases.constructors import galilean_matrix, wave

Row = Tuple[ExpPoly, ExpPoly]

_PAIRS = ((1, 3), (1, 4), (2, 3), (2, 4))


def pairwise_cleared_wronskian(theta: ExpPoly, var: str) -> ExpPoly:
    """
    Pairwise closed form of the cleared y- (var='y') or x- (var='x') Wronskian.

    Raises:
        AlgebraError: theta carries polynomial prefactors
    """
    if not theta.is_pure_exponential():
        raise AlgebraError("pairwise form needs a pure exponential sum")
    i = theta.vars.index(var)
    power = 1 if var == 'y' else 2
    terms = theta.terms
    total = ExpPoly.zero(theta.vars)
    for p in range(len(terms)):
        for q in range(p + 1, len(terms)):
            weight = (terms[p].freq[i] ** power - terms[q].freq[i] ** power) ** 2
            if weight == 0:
                continue
            freq = {name: fp + fq for name, fp, fq in zip(theta.vars, terms[p].freq, terms[q].freq)}
            total = total + ExpPoly.exponential(
                theta.vars, freq, coeff=terms[p].coeff * terms[q].coeff * weight
            )
    return total


def predicted_line_wy(a1: Rational, a2: Rational, k1: Rational, k2: Rational) -> ExpPoly:
    """a1 a2 (k1² - k2²)² e^{θ1 + θ2}."""
    a1, a2, k1, k2 = (as_fraction(v) for v in (a1, a2, k1, k2))
    return a1 * a2 * (k1 ** 2 - k2 ** 2) ** 2 * wave(k1) * wave(k2)


def predicted_resonant_wy(a: Sequence[Rational], k: Sequence[Rational]) -> ExpPoly:
    a = [as_fraction(v) for v in a]
    k = [as_fraction(v) for v in k]
    total = ExpPoly.zero(KP_VARS)
    for i in range(len(k)):
        for j in range(i + 1, len(k)):
            total = total + a[i] * a[j] * (k[i] ** 2 - k[j] ** 2) ** 2 * wave(k[i]) * wave(k[j])
    return total


def _e(k: Sequence[Fraction], i: int, j: int) -> ExpPoly:
    """E_ij = (k_j - k_i) e^{θi + θj}, 1-based."""
    ki, kj = k[i - 1], k[j - 1]
    return (kj - ki) * wave(ki) * wave(kj)


def predicted_two_soliton_heat(k: Sequence[Rational]) -> ExpPoly:
    """H = -2 Σ k_i k_j E_ij over (i, j) in {1,2} x {3,4}."""
    k = [as_fraction(v) for v in k]
    total = ExpPoly.zero(KP_VARS)
    for i, j in _PAIRS:
        total = total + (-2 * k[i - 1] * k[j - 1]) * _e(k, i, j)
    return total


def predicted_two_soliton_airy(k: Sequence[Rational]) -> ExpPoly:
    """Ai = -3 Σ k_i k_j (k_i + k_j) E_ij."""
    k = [as_fraction(v) for v in k]
    total = ExpPoly.zero(KP_VARS)
    for i, j in _PAIRS:
        ki, kj = k[i - 1], k[j - 1]
        total = total + (-3 * ki * kj * (ki + kj)) * _e(k, i, j)
    return total


def _weight(k: Sequence[Fraction], i: int, j: int, var: str) -> Fraction:
    ki, kj = k[i - 1], k[j - 1]
    return ki ** 2 + kj ** 2 if var == 'y' else (ki + kj) ** 2


def k1234(k: Sequence[Rational], var: str = 'y') -> Fraction:
    """
    Coefficient of e^{θ1+θ2+θ3+θ4} in the cleared 2-soliton Wronskian.

    Both diagonal pairs {13, 24} and {14, 23} land on this frequency:
    (k3-k1)(k4-k2)(w13 - w24)² + (k4-k1)(k3-k2)(w14 - w23)², with w the
    y-weights k_i² + k_j² (var='y') or squared x-weights (k_i + k_j)² (var='x').
    """
    k = [as_fraction(v) for v in k]
    k1, k2, k3, k4 = k
    return (
        (k3 - k1) * (k4 - k2) * (_weight(k, 1, 3, var) - _weight(k, 2, 4, var)) ** 2
        + (k4 - k1) * (k3 - k2) * (_weight(k, 1, 4, var) - _weight(k, 2, 3, var)) ** 2
    )


def _predicted_two_soliton_wronskian(k: Sequence[Rational], var: str) -> ExpPoly:
    k = [as_fraction(v) for v in k]
    c = {(i, j): k[j - 1] - k[i - 1] for i, j in _PAIRS}
    w = {(i, j): _weight(k, i, j, var) for i, j in _PAIRS}
    exp = {(i, j): wave(k[i - 1]) * wave(k[j - 1]) for i, j in _PAIRS}
    total = k1234(k, var) * wave(k[0]) * wave(k[1]) * wave(k[2]) * wave(k[3])
    # pairs sharing an index give the four outer frequencies
    for p, q in (((1, 3), (1, 4)), ((1, 3), (2, 3)), ((1, 4), (2, 4)), ((2, 3), (2, 4))):
        total = total + c[p] * c[q] * (w[p] - w[q]) ** 2 * exp[p] * exp[q]
    return total


def predicted_two_soliton_wy(k: Sequence[Rational]) -> ExpPoly:
    return _predicted_two_soliton_wronskian(k, 'y')


def predicted_two_soliton_wx(k: Sequence[Rational]) -> ExpPoly:
    return _predicted_two_soliton_wronskian(k, 'x')


def galilean_rows(theta: ExpPoly, beta: Rational) -> Dict[str, Row]:
    """
    Both sides of the Galilean covariance rows, with ~ denoting the
    substituted quantity:

        heat: H(Θ_β)   = -(4β/3) Θ~_x + H~
        airy: Ai(Θ_β)  = (4β²/3) Θ~_x - 2β Θ~_y + Ai~
        wy:   Θ_βW_y   = (ΘW_y)~ + (16β²/9)(ΘΘ_xx - Θ_x²)~ - (8β/3)(ΘΘ_xy - Θ_xΘ_y)~
        wx:   Θ_βW_x   = (ΘW_x)~
    """
    beta = as_fraction(beta)
    matrix = galilean_matrix(beta)

    def sub(p: ExpPoly) -> ExpPoly:
        return substitute_affine(p, matrix)

    theta_beta = sub(theta)
    theta_x = theta.diff('x')
    theta_y = theta.diff('y')
    mixed = theta * theta.diff('x').diff('y') - theta_x * theta_y

    return {
        'heat': (
            heat(theta_beta).expr,
            Fraction(-4, 3) * beta * sub(theta_x) + sub(heat(theta).expr),
        ),
        'airy': (
            airy(theta_beta).expr,
            Fraction(4, 3) * beta ** 2 * sub(theta_x) - 2 * beta * sub(theta_y) + sub(airy(theta).expr),
        ),
        'wy': (
            wy_cleared(theta_beta).expr,
            sub(wy_cleared(theta).expr)
            + Fraction(16, 9) * beta ** 2 * sub(cleared_wronskian(theta, 'x', 1))
            - Fraction(8, 3) * beta * sub(mixed),
        ),
        'wx': (wx_cleared(theta_beta).expr, sub(wx_cleared(theta).expr)),
    }
