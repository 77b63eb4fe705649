"""
Phase Constructors
==================

Builds the exponential-sum phases Θ(t, x, y) of KP-II solitons and the
symmetry transforms acting on them. Every constructor returns a Phase: the
exact ExpPoly together with the PhaseSpec that produced it, so that a phase
can be echoed in reports, serialized to JSON and rebuilt.

Each exponential is e^{θ(k)} with θ(k) = k x + k² y + k³ t.

Usage:
    from src.phases.constructors import line_soliton, two_soliton

    theta = line_soliton(1, 1, Fraction(-1, 2), 1).theta
    phase = two_soliton(-1, Fraction(-1, 2), Fraction(1, 2), 1)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.algebra.expalg import (
    KDV_VARS,
    KP_VARS,
    ExpPoly,
    Rational,
    Term,
    VarSet,
    as_fraction,
    embed,
    substitute_affine,
    to_text,
    zk_vars,
)
from src.phases.validators import (
    ValidationError,
    describe_params,
    rational,
    rationals,
    validate_line_params,
    validate_phase_theta,
    validate_positive_scalar,
    validate_resonant_general_params,
    validate_resonant_params,
    validate_two_soliton_params,
)

logger = logging.getLogger(__name__)

PHASE_KINDS = (
    'Line',
    'KdVVertical',
    'Resonant',
    'ResonantGeneral',
    'TwoSoliton',
    'Wronskian',
    'Transformed',
    'Raw',
)

# String-valued params that are not rationals
_TEXT_PARAMS = {'transform'}


@dataclass
class PhaseSpec:
    """Recipe for a phase: family, its exact parameters and nested sources."""

    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    source: List['PhaseSpec'] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in PHASE_KINDS:
            raise ValidationError(
                f"Unknown phase kind '{self.kind}'. Available: {', '.join(PHASE_KINDS)}"
            )

    def to_dict(self) -> Dict[str, Any]:
        """JSON object {kind, params, source}; rationals become 'p/q' strings."""
        return {
            'kind': self.kind,
            'params': {name: _encode(value) for name, value in self.params.items()},
            'source': [s.to_dict() for s in self.source],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PhaseSpec':
        params = {
            name: value if name in _TEXT_PARAMS else _decode(value)
            for name, value in data.get('params', {}).items()
        }
        return cls(
            kind=data['kind'],
            params=params,
            source=[cls.from_dict(s) for s in data.get('source', [])],
        )


def _encode(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _decode(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, str):
        return as_fraction(value)
    if isinstance(value, int):
        return value
    if isinstance(value, (list, tuple)):
        return [_decode(v) for v in value]
    return value


@dataclass(frozen=True)
class Phase:
    spec: PhaseSpec
    theta: ExpPoly

    def to_dict(self) -> Dict[str, Any]:
        return {'spec': self.spec.to_dict(), 'theta': to_text(self.theta), 'terms': len(self.theta)}


def wave(k: Rational, a: Rational = 1, vars: VarSet = KP_VARS) -> ExpPoly:
    """a * exp(k x + k² y + k³ t)."""
    k = as_fraction(k)
    return ExpPoly.exponential(vars, {'x': k, 'y': k ** 2, 't': k ** 3}, coeff=a)


def _finish(spec: PhaseSpec, theta: ExpPoly) -> Phase:
    validate_phase_theta(theta, spec.kind)
    logger.debug("Built %s phase (%s) with %d terms", spec.kind, describe_params(spec.params), len(theta))
    return Phase(spec=spec, theta=theta)


def line_soliton(a1: Rational, a2: Rational, k1: Rational, k2: Rational) -> Phase:
    """
    Line soliton Θ = a1 e^{θ1} + a2 e^{θ2}.

    Args:
        a1, a2: positive amplitudes
        k1, k2: distinct spectral parameters

    Raises:
        ValidationError: non-positive amplitude or k1 == k2
    """
    a1, a2, k1, k2 = rationals([a1, a2, k1, k2], 'line parameters', 'line')
    validate_line_params(a1, a2, k1, k2)
    spec = PhaseSpec('Line', {'a1': a1, 'a2': a2, 'k1': k1, 'k2': k2})
    return _finish(spec, wave(k1, a1) + wave(k2, a2))


def kdv_vertical(k: Rational, a1: Rational = 1, a2: Rational = 1) -> Phase:
    """Vertical soliton e^{kx+k²y+k³t} + e^{-kx+k²y-k³t}, constant along y up to a gauge."""
    k = rational(k, 'k', 'kdv_vertical')
    a1, a2 = rationals([a1, a2], 'a', 'kdv_vertical')
    validate_line_params(a1, a2, k, -k)
    spec = PhaseSpec('KdVVertical', {'k': k, 'a1': a1, 'a2': a2})
    return _finish(spec, wave(k, a1) + wave(-k, a2))


def resonant(a: Sequence[Rational], k: Sequence[Rational]) -> Phase:
    """Resonant multi-soliton Σ a_i e^{θ(k_i)} with k_1 < ... < k_M and a_i > 0."""
    a = rationals(a, 'a', 'resonant')
    k = rationals(k, 'k', 'resonant')
    validate_resonant_params(a, k)
    theta = ExpPoly.zero(KP_VARS)
    for ai, ki in zip(a, k):
        theta = theta + wave(ki, ai)
    return _finish(PhaseSpec('Resonant', {'a': a, 'k': k}), theta)


def resonant_general(
    a1: Sequence[Rational],
    a2: Sequence[Rational],
    k: Sequence[Rational],
) -> Phase:
    """Σ (a_{i,1} e^{θ(k_i)} + a_{i,2} e^{θ(-k_i)}), the ±k generalization of resonant."""
    a1 = rationals(a1, 'a1', 'resonant_general')
    a2 = rationals(a2, 'a2', 'resonant_general')
    k = rationals(k, 'k', 'resonant_general')
    validate_resonant_general_params(a1, a2, k)
    theta = ExpPoly.zero(KP_VARS)
    for c1, c2, ki in zip(a1, a2, k):
        theta = theta + wave(ki, c1) + wave(-ki, c2)
    return _finish(PhaseSpec('ResonantGeneral', {'a1': a1, 'a2': a2, 'k': k}), theta)


def _two_soliton_theta(k: Sequence[Fraction]) -> ExpPoly:
    k1, k2, k3, k4 = k
    theta = ExpPoly.zero(KP_VARS)
    for i, ki in ((1, k1), (2, k2)):
        for j, kj in ((3, k3), (4, k4)):
            theta = theta + (kj - ki) * wave(ki) * wave(kj)
    return theta


def two_soliton(k1: Rational, k2: Rational, k3: Rational, k4: Rational) -> Phase:
    """
    Classical 2-soliton in expanded form:

        (k3-k1)e^{θ1+θ3} + (k4-k1)e^{θ1+θ4} + (k3-k2)e^{θ2+θ3} + (k4-k2)e^{θ2+θ4}

    Raises:
        ValidationError: unless k1 < k2 < k3 < k4
    """
    k = rationals([k1, k2, k3, k4], 'k', 'two_soliton')
    validate_two_soliton_params(k)
    return _finish(PhaseSpec('TwoSoliton', {'k': k, 'ordered': True}), _two_soliton_theta(k))


def two_soliton_unchecked(k1: Rational, k2: Rational, k3: Rational, k4: Rational) -> Phase:
    """Same expansion as two_soliton without the ordering requirement."""
    k = rationals([k1, k2, k3, k4], 'k', 'two_soliton')
    return _finish(PhaseSpec('TwoSoliton', {'k': k, 'ordered': False}), _two_soliton_theta(k))


def _determinant(matrix: Tuple[Tuple[ExpPoly, ...], ...]) -> ExpPoly:
    """Laplace expansion along rows, memoized on the surviving column set."""
    n = len(matrix)

    @lru_cache(maxsize=None)
    def minor(row: int, cols: Tuple[int, ...]) -> ExpPoly:
        if row == n - 1:
            return matrix[row][cols[0]]
        total = ExpPoly.zero(matrix[0][0].vars)
        for pos, col in enumerate(cols):
            entry = matrix[row][col]
            if entry.is_zero():
                continue
            rest = minor(row + 1, cols[:pos] + cols[pos + 1:])
            term = entry * rest
            total = total - term if pos % 2 else total + term
        return total

    return minor(0, tuple(range(n)))


def wronskian(thetas: Sequence[ExpPoly]) -> ExpPoly:
    """
    x-Wronskian det[∂x^i θ_j], i = 0..n-1, by exact cofactor expansion.

    Raises:
        ValidationError: empty input, mixed variable sets or no 'x' variable
    """
    if not thetas:
        raise ValidationError("wronskian: at least one function is required")
    vars = thetas[0].vars
    if any(t.vars != vars for t in thetas):
        raise ValidationError("wronskian: all entries must share one variable set")
    if 'x' not in vars:
        raise ValidationError(f"wronskian: variable 'x' missing from {vars.names}")
    rows = [list(thetas)]
    for _ in range(1, len(thetas)):
        rows.append([entry.diff('x') for entry in rows[-1]])
    return _determinant(tuple(tuple(row) for row in rows))


def wronskian_phase(phases: Sequence[Phase]) -> Phase:
    theta = wronskian([p.theta for p in phases])
    spec = PhaseSpec('Wronskian', {'n': len(phases)}, [p.spec for p in phases])
    return _finish(spec, theta)


def galilean_matrix(beta: Rational) -> List[List[Fraction]]:
    """Rows giving (t, x - (4β/3)y + (4β²/3)t, y - 2βt) over (t, x, y)."""
    beta = as_fraction(beta)
    return [
        [Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(4, 3) * beta ** 2, Fraction(1), Fraction(-4, 3) * beta],
        [-2 * beta, Fraction(0), Fraction(1)],
    ]


def scaling_matrix(lam: Rational, y_sign: int = 1) -> List[List[Fraction]]:
    """Rows giving (λ³t, λx, ±λ²y) over (t, x, y)."""
    lam = as_fraction(lam)
    return [
        [lam ** 3, Fraction(0), Fraction(0)],
        [Fraction(0), lam, Fraction(0)],
        [Fraction(0), Fraction(0), y_sign * lam ** 2],
    ]


def galilean_theta(theta: ExpPoly, beta: Rational) -> ExpPoly:
    return substitute_affine(theta, galilean_matrix(beta))


def galilean(phase: Phase, beta: Rational) -> Phase:
    """Galilean image Θ_β(t,x,y) = Θ(t, x - (4β/3)y + (4β²/3)t, y - 2βt)."""
    beta = rational(beta, 'beta', 'galilean')
    spec = PhaseSpec('Transformed', {'transform': 'galilean', 'beta': beta}, [phase.spec])
    return _finish(spec, galilean_theta(phase.theta, beta))


def scale(phase: Phase, lam: Rational, y_sign: int = 1) -> Phase:
    """
    Scaled phase Θ(λ³t, λx, ±λ²y).

    Raises:
        ValidationError: λ <= 0 or y_sign not ±1
    """
    lam = rational(lam, 'lambda', 'scale')
    validate_positive_scalar(lam, 'lambda', 'scale')
    if y_sign not in (1, -1):
        raise ValidationError(f"scale: y_sign must be +1 or -1 (got {y_sign})")
    spec = PhaseSpec(
        'Transformed',
        {'transform': 'scale', 'lambda': lam, 'y_sign': int(y_sign)},
        [phase.spec],
    )
    return _finish(spec, substitute_affine(phase.theta, scaling_matrix(lam, y_sign)))


def raw_phase(theta: ExpPoly) -> Phase:
    """Wrap an arbitrary KP ExpPoly as a Phase."""
    if theta.vars != KP_VARS:
        raise ValidationError(f"raw: phases live over {KP_VARS.names}, got {theta.vars.names}")
    terms = [[t.coeff, list(t.mono), list(t.freq)] for t in theta.terms]
    return _finish(PhaseSpec('Raw', {'terms': terms}), theta)


def phase_from_spec(spec: PhaseSpec) -> Phase:
    """Rebuild a Phase from its spec; the inverse of Phase.spec."""
    p = spec.params
    if spec.kind == 'Line':
        return line_soliton(p['a1'], p['a2'], p['k1'], p['k2'])
    if spec.kind == 'KdVVertical':
        return kdv_vertical(p['k'], p.get('a1', 1), p.get('a2', 1))
    if spec.kind == 'Resonant':
        return resonant(p['a'], p['k'])
    if spec.kind == 'ResonantGeneral':
        return resonant_general(p['a1'], p['a2'], p['k'])
    if spec.kind == 'TwoSoliton':
        build = two_soliton if p.get('ordered', True) else two_soliton_unchecked
        return build(*p['k'])
    if spec.kind == 'Wronskian':
        return wronskian_phase([phase_from_spec(s) for s in spec.source])
    if spec.kind == 'Transformed':
        inner = phase_from_spec(spec.source[0])
        if p['transform'] == 'galilean':
            return galilean(inner, p['beta'])
        return scale(inner, p['lambda'], p.get('y_sign', 1))
    terms = [Term(as_fraction(c), tuple(int(m) for m in mono), tuple(as_fraction(f) for f in freq))
             for c, mono, freq in p['terms']]
    return raw_phase(ExpPoly(KP_VARS, terms))


# -- companion-model phases over (t, x) --------------------------------

def kdv_soliton(a: Rational, c: Rational = 1) -> ExpPoly:
    """KdV soliton phase 1 + c e^{ax + a³t/4} over (t, x)."""
    a = rational(a, 'a', 'kdv_soliton')
    c = rational(c, 'c', 'kdv_soliton')
    validate_positive_scalar(c, 'c', 'kdv_soliton')
    return ExpPoly.constant(KDV_VARS, 1) + ExpPoly.exponential(
        KDV_VARS, {'x': a, 't': a ** 3 / 4}, coeff=c
    )


def kdv_two_soliton(a1: Rational, a2: Rational) -> ExpPoly:
    """KdV 2-soliton 1 + e^{η1} + e^{η2} + ((a1-a2)/(a1+a2))² e^{η1+η2}, η = ax + a³t/4."""
    a1, a2 = rationals([a1, a2], 'a', 'kdv_two_soliton')
    validate_positive_scalar(a1, 'a1', 'kdv_two_soliton')
    validate_positive_scalar(a2, 'a2', 'kdv_two_soliton')
    if a1 == a2:
        raise ValidationError(f"kdv_two_soliton: a1 and a2 must differ (got {a1} and {a2})")
    eta1 = ExpPoly.exponential(KDV_VARS, {'x': a1, 't': a1 ** 3 / 4})
    eta2 = ExpPoly.exponential(KDV_VARS, {'x': a2, 't': a2 ** 3 / 4})
    interaction = ((a1 - a2) / (a1 + a2)) ** 2
    return 1 + eta1 + eta2 + interaction * eta1 * eta2


def mkdv_soliton(k: Rational, c: Rational = 1) -> ExpPoly:
    """mKdV phase c e^{kx + k³t/4} over (t, x)."""
    k = rational(k, 'k', 'mkdv_soliton')
    c = rational(c, 'c', 'mkdv_soliton')
    validate_positive_scalar(c, 'c', 'mkdv_soliton')
    return ExpPoly.exponential(KDV_VARS, {'x': k, 't': k ** 3 / 4}, coeff=c)


def lift(theta: ExpPoly, d: int = 2, vars: Optional[VarSet] = None) -> ExpPoly:
    """
    Embed a (t, x) phase into (t, x1, ..., xd), constant in x2..xd.

    When vars is given the phase is embedded there instead, with x kept as
    x (e.g. lifting a KdV phase to KP variables, constant in y).
    """
    if theta.vars != KDV_VARS:
        raise ValidationError(f"lift: expected a phase over {KDV_VARS.names}, got {theta.vars.names}")
    if vars is not None:
        return embed(theta, vars)
    renamed = ExpPoly(VarSet(('t', 'x1')), theta.terms)
    return embed(renamed, zk_vars(d))


# -- geometry ----------------------------------------------------------

@dataclass(frozen=True)
class LineGeometry:
    """Crest data of an [i, j]-soliton."""

    i: int
    j: int
    amplitude: Fraction
    wave_vector: Tuple[Fraction, Fraction]
    frequency: Fraction
    tan_psi: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            'leg': [self.i, self.j],
            'amplitude': str(self.amplitude),
            'wave_vector': [str(v) for v in self.wave_vector],
            'frequency': str(self.frequency),
            'tan_psi': str(self.tan_psi),
        }


def _leg(i: int, j: int, ki: Fraction, kj: Fraction) -> LineGeometry:
    return LineGeometry(
        i=i,
        j=j,
        amplitude=(kj - ki) ** 2 / 2,
        wave_vector=(kj - ki, kj ** 2 - ki ** 2),
        frequency=-(kj ** 3 - ki ** 3),
        tan_psi=ki + kj,
    )


def line_geometry(a1: Rational, a2: Rational, k1: Rational, k2: Rational) -> LineGeometry:
    """Amplitude ½(k2-k1)², wave vector, frequency and direction tan ψ = k1 + k2."""
    a1, a2, k1, k2 = rationals([a1, a2, k1, k2], 'line parameters', 'line_geometry')
    validate_line_params(a1, a2, k1, k2)
    return _leg(1, 2, k1, k2)


def resonant_legs(k: Sequence[Rational]) -> Dict[str, Any]:
    """
    Asymptotic legs of a resonant phase.

    For y >> 1 the crest is the [1, M]-soliton; for y << -1 the crests are
    the [i, i+1]-solitons. The phase is resonant when the [1, M] wave
    vector and frequency equal the sums over the lower legs.
    """
    k = rationals(k, 'k', 'resonant_legs')
    validate_resonant_params([Fraction(1)] * len(k), k)
    if len(k) < 2:
        raise ValidationError("resonant_legs: at least two k's are needed for a crest")
    m = len(k)
    upper = _leg(1, m, k[0], k[-1])
    lower = [_leg(i + 1, i + 2, k[i], k[i + 1]) for i in range(m - 1)]
    summed = (sum(l.wave_vector[0] for l in lower), sum(l.wave_vector[1] for l in lower))
    is_resonant = summed == upper.wave_vector and sum(l.frequency for l in lower) == upper.frequency
    return {'upper': [upper], 'lower': lower, 'resonant': is_resonant}


def galilean_straightening_beta(k1: Rational, k2: Rational) -> Fraction:
    """
    β whose Galilean image of a line soliton has ΘW_y = 0.

    The map sends each y-frequency k² to k² - 4βk/3, so the two
    frequencies coincide exactly when β = 3(k1 + k2)/4.
    """
    k1, k2 = rationals([k1, k2], 'k', 'galilean_straightening_beta')
    return Fraction(3, 4) * (k1 + k2)
