"""
Seeded Random Phase Parameters
==============================

Draws exact rational parameters for every phase family. Randomized
property tests, `sweep` and `selftest` all go through these helpers so a
failing draw reproduces from its seed.

Seed resolution: an explicit seed wins, then the SOLITON_FORGE_SEED
environment variable, then DEFAULT_SEED.
"""

import logging
import os
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from src.algebra.expalg import KP_VARS, ExpPoly, Term
from src.phases.constructors import (
    Phase,
    line_soliton,
    resonant,
    resonant_general,
    two_soliton,
)

logger = logging.getLogger(__name__)

SEED_ENV_VAR = 'SOLITON_FORGE_SEED'
DEFAULT_SEED = 20240501


def resolve_seed(seed: Optional[int] = None) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env)
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", SEED_ENV_VAR, env)
    return DEFAULT_SEED


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    resolved = resolve_seed(seed)
    logger.debug("Random parameters drawn with seed %d", resolved)
    return np.random.default_rng(resolved)


def random_rational(
    rng: np.random.Generator,
    low: int = -3,
    high: int = 3,
    max_den: int = 4,
) -> Fraction:
    """Uniform-ish rational in [low, high] with denominator at most max_den."""
    den = int(rng.integers(1, max_den + 1))
    num = int(rng.integers(low * den, high * den + 1))
    return Fraction(num, den)


def random_positive(rng: np.random.Generator, high: int = 4, max_den: int = 4) -> Fraction:
    den = int(rng.integers(1, max_den + 1))
    num = int(rng.integers(1, high * den + 1))
    return Fraction(num, den)


def random_sorted_ks(
    rng: np.random.Generator,
    m: int,
    low: int = -3,
    high: int = 3,
    max_den: int = 4,
) -> List[Fraction]:
    """m distinct rationals in increasing order."""
    values = set()
    while len(values) < m:
        values.add(random_rational(rng, low, high, max_den))
    return sorted(values)


def random_generic_ks(rng: np.random.Generator, m: int) -> List[Fraction]:
    """Sorted k's with distinct squares whose pairwise sums k_i + k_j and k_i² + k_j² are all distinct."""
    while True:
        k = random_sorted_ks(rng, m)
        if len({v * v for v in k}) != m:
            continue
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
        if len({k[i] ** 2 + k[j] ** 2 for i, j in pairs}) == len(pairs) and \
                len({k[i] + k[j] for i, j in pairs}) == len(pairs):
            return k


def random_colliding_ks(rng: np.random.Generator, m: int) -> List[Fraction]:
    """Sorted k's engineered so that some k_i² + k_j² coincide (a ±c pair plus extras)."""
    c = random_positive(rng, high=2)
    values = {-c, c}
    while len(values) < m:
        values.add(random_rational(rng))
    return sorted(values)


def random_line(rng: np.random.Generator) -> Phase:
    k1, k2 = random_sorted_ks(rng, 2)
    if rng.random() < 0.5:
        k1, k2 = k2, k1
    return line_soliton(random_positive(rng), random_positive(rng), k1, k2)


def random_resonant(rng: np.random.Generator, m: int, generic: bool = False) -> Phase:
    k = random_generic_ks(rng, m) if generic else random_sorted_ks(rng, m)
    return resonant([random_positive(rng) for _ in range(m)], k)


def random_resonant_general(rng: np.random.Generator, m: int) -> Phase:
    k = random_sorted_ks(rng, m)
    return resonant_general(
        [random_positive(rng) for _ in range(m)],
        [random_positive(rng) for _ in range(m)],
        k,
    )


def random_two_soliton(rng: np.random.Generator) -> Phase:
    return two_soliton(*random_sorted_ks(rng, 4))


def random_exppoly(
    rng: np.random.Generator,
    n_terms: int = 4,
    max_degree: int = 1,
    vars=KP_VARS,
) -> ExpPoly:
    """Arbitrary ring element with small rational data, polynomial prefactors allowed."""
    n = len(vars)
    terms = []
    for _ in range(n_terms):
        coeff = random_rational(rng)
        if coeff == 0:
            coeff = Fraction(1)
        mono = tuple(int(rng.integers(0, max_degree + 1)) for _ in range(n))
        freq = tuple(random_rational(rng, -2, 2, 2) for _ in range(n))
        terms.append(Term(coeff, mono, freq))
    return ExpPoly(vars, terms)


def random_phase_corpus(rng: np.random.Generator, count: int) -> List[Tuple[str, Phase]]:
    """Mixed list of (family, phase) covering every constructor family."""
    corpus: List[Tuple[str, Phase]] = []
    for i in range(count):
        family = i % 4
        if family == 0:
            corpus.append(('line', random_line(rng)))
        elif family == 1:
            corpus.append(('resonant', random_resonant(rng, int(rng.integers(1, 7)))))
        elif family == 2:
            corpus.append(('resonant_general', random_resonant_general(rng, int(rng.integers(1, 4)))))
        else:
            corpus.append(('two_soliton', random_two_soliton(rng)))
    return corpus
