"""
Exponential Cone Analysis
=========================

Decomposes an operator output by its frequency in one variable (normally
y) and decides membership in the cones 𝒲ₙ of sums

    a_1(t,x) e^{k_1 y} + ... + a_n(t,x) e^{k_n y},  0 <= k_1 < ... < k_n,

with nonnegative amplitudes. Membership is checked syntactically:

- strict mode: no polynomial prefactor in the variable, all frequencies
  nonnegative and every coefficient term positive
- signed mode: only the prefactor condition; the dimension is the span size

classify() combines the operators and cone dimensions into the hypothesis
checks of the vertical, oblique, resonant and 2-soliton characterizations.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from src.algebra.expalg import ExpPoly, group_by_frequency, to_text
from src.analysis.operators import (
    airy,
    heat,
    kp_residual_cleared,
    log_numerator,
    t_operator_cleared,
    wx_cleared,
    wy_cleared,
)

logger = logging.getLogger(__name__)

CONE_MODES = ('strict', 'signed')


@dataclass(frozen=True)
class ConeDecomposition:
    var: str
    entries: Tuple[Tuple[Fraction, ExpPoly], ...]
    degrees: Tuple[int, ...]
    all_freq_nonneg: bool
    all_coeff_syntactically_positive: bool
    no_poly_prefactor: bool

    def __len__(self) -> int:
        return len(self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'var': self.var,
            'entries': [
                {'freq': str(f), 'coeff': to_text(c), 'degree': d}
                for (f, c), d in zip(self.entries, self.degrees)
            ],
            'flags': {
                'all_freq_nonneg': self.all_freq_nonneg,
                'all_coeff_syntactically_positive': self.all_coeff_syntactically_positive,
                'no_poly_prefactor': self.no_poly_prefactor,
            },
            'dim_strict': cone_dim(self, 'strict'),
            'dim_signed': cone_dim(self, 'signed'),
        }


def decompose(p: ExpPoly, var: str = 'y') -> ConeDecomposition:
    """Group p by its frequency in var and record the cone flags."""
    groups = group_by_frequency(p, var)
    entries = tuple((f, coeff) for f, coeff, _ in groups)
    degrees = tuple(d for _, _, d in groups)
    return ConeDecomposition(
        var=var,
        entries=entries,
        degrees=degrees,
        all_freq_nonneg=all(f >= 0 for f, _ in entries),
        all_coeff_syntactically_positive=all(
            t.coeff > 0 for _, coeff in entries for t in coeff.terms
        ),
        no_poly_prefactor=all(d == 0 for d in degrees),
    )


def cone_dim(decomp: ConeDecomposition, mode: str = 'strict') -> Optional[int]:
    """
    Number of exponentials in the decomposition, or None when the flags of
    the mode rule out every cone.
    """
    if mode not in CONE_MODES:
        raise ValueError(f"Unknown cone mode '{mode}'. Available: {', '.join(CONE_MODES)}")
    if not decomp.no_poly_prefactor:
        return None
    if mode == 'strict' and not (decomp.all_freq_nonneg and decomp.all_coeff_syntactically_positive):
        return None
    return len(decomp.entries)


def in_cone(decomp: ConeDecomposition, n: int, mode: str = 'strict') -> bool:
    dim = cone_dim(decomp, mode)
    return dim is not None and dim <= n


def resonant_m_for_dim(dim: int) -> int:
    """Smallest M >= 2 with dim <= M(M-1)/2."""
    m = 2
    while m * (m - 1) // 2 < dim:
        m += 1
    return m


@dataclass
class ClassificationReport:
    heat_zero: bool
    airy_zero: bool
    wx_eq_wy: bool
    wy_zero: bool
    kernel: bool
    t_zero: bool
    kp_residual_zero: bool
    airy_heat_identity: bool
    wy_cone_dim: Optional[int]
    wx_cone_dim: Optional[int]
    heat_cone_dim: Dict[str, Optional[int]]
    airy_cone_dim: Dict[str, Optional[int]]
    theorem_flags: Dict[str, Any]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'heat_zero': self.heat_zero,
            'airy_zero': self.airy_zero,
            'wx_eq_wy': self.wx_eq_wy,
            'wy_zero': self.wy_zero,
            'kernel': self.kernel,
            't_zero': self.t_zero,
            'kp_residual_zero': self.kp_residual_zero,
            'airy_heat_identity': self.airy_heat_identity,
            'wy_cone_dim': self.wy_cone_dim,
            'wx_cone_dim': self.wx_cone_dim,
            'heat_cone_dim': dict(self.heat_cone_dim),
            'airy_cone_dim': dict(self.airy_cone_dim),
            'theorem_flags': dict(self.theorem_flags),
            'notes': list(self.notes),
        }


def classify(theta: ExpPoly) -> ClassificationReport:
    """
    Run every KP functional on theta and evaluate the characterization
    hypotheses syntactically.

    Flags:
        kdv_vertical: H = Ai = ΘW_y = 0
        oblique_line: H = Ai = 0 and ΘW_y = A(t,x) e^{k(t,x) y} (strict dim <= 1)
        resonant / resonant_M: H = Ai = 0 and ΘW_y in 𝒲_{M(M-1)/2}, M minimal
        two_soliton: H, Ai of signed dim <= 4, ΘW_x, ΘW_y of strict dim <= 5,
            Ai = (3/2)∂x H, H != 0

    All flags except two_soliton additionally require that theta is not in
    the kernel of the log ansatz (a single x-exponential gives u = 0).
    """
    h = heat(theta).expr
    ai = airy(theta).expr
    wx = wx_cleared(theta).expr
    wy = wy_cleared(theta).expr
    kernel = log_numerator(theta).is_zero
    identity = (ai - Fraction(3, 2) * h.diff('x')).is_zero()

    wy_dec = decompose(wy, 'y')
    wx_dec = decompose(wx, 'y')
    h_dec = decompose(h, 'y')
    ai_dec = decompose(ai, 'y')
    wy_dim = cone_dim(wy_dec, 'strict')
    wx_dim = cone_dim(wx_dec, 'strict')

    notes: List[str] = []
    characterized = h.is_zero() and ai.is_zero() and not kernel
    if kernel:
        notes.append('log numerator vanishes: phase is e^{a x + b}, the field u is identically zero')

    kdv_vertical = characterized and wy.is_zero()
    oblique_line = characterized and wy_dim is not None and wy_dim <= 1
    resonant_m = resonant_m_for_dim(wy_dim) if characterized and wy_dim is not None else None
    if characterized and wy_dim is None:
        notes.append('heat and Airy vanish but ΘW_y is outside every strict cone')

    two = (
        not h.is_zero()
        and in_cone(h_dec, 4, 'signed')
        and in_cone(ai_dec, 4, 'signed')
        and in_cone(wy_dec, 5, 'strict')
        and in_cone(wx_dec, 5, 'strict')
        and identity
    )
    if in_cone(h_dec, 4, 'signed') and not in_cone(h_dec, 4, 'strict') and not h.is_zero():
        notes.append('H lies in the signed span of at most 4 exponentials but not in the positive cone')

    report = ClassificationReport(
        heat_zero=h.is_zero(),
        airy_zero=ai.is_zero(),
        wx_eq_wy=(wx - wy).is_zero(),
        wy_zero=wy.is_zero(),
        kernel=kernel,
        t_zero=t_operator_cleared(theta).is_zero,
        kp_residual_zero=kp_residual_cleared(theta).is_zero,
        airy_heat_identity=identity,
        wy_cone_dim=wy_dim,
        wx_cone_dim=wx_dim,
        heat_cone_dim={mode: cone_dim(h_dec, mode) for mode in CONE_MODES},
        airy_cone_dim={mode: cone_dim(ai_dec, mode) for mode in CONE_MODES},
        theorem_flags={
            'kdv_vertical': kdv_vertical,
            'oblique_line': oblique_line,
            'resonant': resonant_m is not None,
            'resonant_M': resonant_m,
            'two_soliton': two,
        },
        notes=notes,
    )
    logger.info("Classified phase with %d terms: %s", len(theta), report.theorem_flags)
    return report
