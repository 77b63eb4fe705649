"""
Self-Test Suite
===============

Runs the acceptance checks end to end with seeded random parameters and
returns one report entry per criterion:

1.  exact KP residual of random line, resonant, resonant_general and
    2-soliton phases
2.  𝒯 equals the KP residual for solitons and arbitrary ring elements
3.  line-soliton ΘW_y closed form, zero iff k1 = ±k2
4.  strict cone dimension of ΘW_y for resonant phases
5.  2-soliton Wronskian closed forms, cone dimension 5, Ai = (3/2)∂x H
6.  heat zero implies ΘW_y = ΘW_x
7.  Galilean covariance rows
8.  resonant reconstruction round trip; the 2-soliton image is rejected
9.  KdV, mKdV, ZK and mZK companion checks
10. finite-difference residuals, line crest height and profile ODE checks
11. DSL print/parse round trip and byte-deterministic reports

Every criterion returns {'id', 'name', 'passed', 'details'}; failures list
the offending phases by their DSL or canonical text.
"""

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.algebra.expalg import KDV_VARS, ExpPoly, to_text
from src.analysis.companions import companion_ops, kdv_ai, kdv_w, mkdv_res
from src.analysis.cones import cone_dim, decompose
from src.analysis.identities import (
    galilean_rows,
    predicted_line_wy,
    predicted_two_soliton_wx,
    predicted_two_soliton_wy,
)
from src.analysis.operators import airy, heat, kp_residual_cleared, t_operator_cleared, wx_cleared, wy_cleared
from src.analysis.reconstruction import ReconstructionError, reconstruct_resonant
from src.cli.commands import EXIT_FAILED, EXIT_OK, SCHEMA_VERSION, TOOL_VERSION, CommandResult, cmd_check, cmd_classify
from src.cli.dsl import parse, print_expr
from src.numeric.fields import breather, eval_field, mkdv_rational_two_soliton
from src.numeric.grids import Grid
from src.numeric.profiles import profile_checks
from src.numeric.residuals import fd_residual
from src.phases.constructors import galilean, kdv_soliton, kdv_vertical, lift, mkdv_soliton, resonant, two_soliton
from src.phases.presets import build_preset
from src.phases.sampling import (
    make_rng,
    random_colliding_ks,
    random_exppoly,
    random_line,
    random_phase_corpus,
    random_positive,
    random_rational,
    random_resonant,
    random_resonant_general,
    random_sorted_ks,
    random_two_soliton,
    resolve_seed,
)

logger = logging.getLogger(__name__)

SELFTEST_COUNTS: Dict[str, int] = {
    'solitons': 50,
    'structural': 100,
    'lines': 50,
    'cone_draws': 200,
    'two_solitons': 50,
    'galilean': 20,
    'reconstruct': 10,
}

# Divisor applied to every count by --quick
QUICK_FACTOR = 10

MAX_REPORTED_FAILURES = 5

DSL_CORPUS: List[str] = [
    'line(1,1,-1/2,1)',
    'line(2,3,0,1)',
    'line(1,1,1,-1)',
    'line(1/2,5/3,1,2)',
    'two(-1,-1/2,1/2,1)',
    'two(-2,-1,1/3,3/2)',
    'two_unchecked(1,0,-1,2)',
    'resonant(k=[-3/10,0,1/2],a=[1,1,1])',
    'resonant(k=[-1,0,1/2,2],a=[1,2,3,4])',
    'resonant(k=[1],a=[2])',
    'resonant(k=[-2,-1,0,1,2],a=[1,1,1,1,1])',
    'resgen(k=[1],a1=[1],a2=[1])',
    'resgen(k=[-1,1/2],a1=[1,2],a2=[3,1/4])',
    'wr(line(1,1,-1,-1/2),line(1,1,1/2,1))',
    'wr(resonant(k=[0,1],a=[1,1]))',
    'galilean(line(1,1,1,-1),1/2)',
    'galilean(two(-1,-1/2,1/2,1),-3/4)',
    'scale(line(1,1,-1/2,1),2,1)',
    'scale(resonant(k=[-3/10,0,1/2],a=[1,1,1]),1/3,-1)',
    'sum(term(1,[0,0,0],[1,1,1]),term(2,[0,0,0],[-1,1,-1]))',
    'sum(term(-3/2,[1,0,0],[0,0,0]),term(1,[0,2,1],[1/2,1/4,1/8]))',
    'preset(fig1_left)',
    'preset(resonant_4)',
    'kdv(1,1)',
    'kdv(2/3,5)',
    'kdv2(1,2)',
    'mkdv(1/2,1)',
    'lift(kdv(1,1),2)',
    'lift(mkdv(1,2),3)',
    'galilean(scale(wr(line(1,1,-1,0),line(1,1,1,2)),1/2,1),1)',
]


def _criterion(cid: int, name: str, failures: List[str], **details: Any) -> Dict[str, Any]:
    return {
        'id': cid,
        'name': name,
        'passed': not failures,
        'details': {**details, 'failures': failures[:MAX_REPORTED_FAILURES], 'failure_count': len(failures)},
    }


def _label(phase) -> str:
    return to_text(phase.theta) if phase.spec.kind == 'Raw' else str(phase.spec.to_dict())


def check_soliton_residuals(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    families: Dict[str, Callable[[int], Any]] = {
        'line': lambda i: random_line(rng),
        'resonant': lambda i: random_resonant(rng, 1 + i % 6),
        'resonant_general': lambda i: random_resonant_general(rng, 1 + i % 3),
        'two_soliton': lambda i: random_two_soliton(rng),
    }
    failures = []
    for family, draw in families.items():
        for i in range(n):
            phase = draw(i)
            if not kp_residual_cleared(phase.theta).is_zero:
                failures.append(f'{family}: {_label(phase)}')
    return _criterion(1, 'exact KP residual of soliton phases', failures, per_family=n)


def check_t_operator(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    thetas = [phase.theta for _, phase in random_phase_corpus(rng, n // 2)]
    thetas += [random_exppoly(rng, n_terms=3) for _ in range(n - len(thetas))]
    failures = [
        to_text(theta) for theta in thetas
        if t_operator_cleared(theta).expr != kp_residual_cleared(theta).expr
    ]
    return _criterion(2, '𝒯 equals the KP residual', failures, samples=len(thetas))


def check_line_wy(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    failures = []
    for _ in range(n):
        phase = random_line(rng)
        p = phase.spec.params
        wy = wy_cleared(phase.theta).expr
        if wy != predicted_line_wy(p['a1'], p['a2'], p['k1'], p['k2']):
            failures.append(_label(phase))
        if wy.is_zero() != (p['k1'] == -p['k2']):
            failures.append(f'zero test: {_label(phase)}')
    k = random_positive(rng)
    if not wy_cleared(kdv_vertical(k).theta).is_zero:
        failures.append(f'kdv_vertical({k}) has non-zero ΘW_y')
    return _criterion(3, 'line-soliton ΘW_y closed form', failures, samples=n)


def check_resonant_cones(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    failures = []
    for m in range(2, 7):
        phase = random_resonant(rng, m, generic=True)
        dim = cone_dim(decompose(wy_cleared(phase.theta).expr, 'y'), 'strict')
        if dim != m * (m - 1) // 2:
            failures.append(f'generic M={m}: dim {dim}: {_label(phase)}')
    for i in range(n):
        m = 2 + i % 5
        if i % 2:
            k = random_colliding_ks(rng, m)
            a = [random_positive(rng) for _ in range(m)]
            phase = resonant(a, k)
        else:
            phase = random_resonant(rng, m)
        dim = cone_dim(decompose(wy_cleared(phase.theta).expr, 'y'), 'strict')
        if dim is None or dim > m * (m - 1) // 2:
            failures.append(f'M={m}: dim {dim}: {_label(phase)}')
    return _criterion(4, 'strict cone dimension of resonant ΘW_y', failures, draws=n)


def check_two_soliton(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    failures = []
    for _ in range(n):
        k = random_sorted_ks(rng, 4)
        theta = two_soliton(*k).theta
        wy = wy_cleared(theta).expr
        label = f"two({','.join(str(v) for v in k)})"
        if wy != predicted_two_soliton_wy(k):
            failures.append(f'ΘW_y: {label}')
        if wx_cleared(theta).expr != predicted_two_soliton_wx(k):
            failures.append(f'ΘW_x: {label}')
        squares = [v ** 2 for v in k]
        y_freqs = {
            2 * squares[0] + squares[2] + squares[3],
            squares[0] + squares[1] + 2 * squares[2],
            sum(squares),
            squares[0] + squares[1] + 2 * squares[3],
            2 * squares[1] + squares[2] + squares[3],
        }
        dim = cone_dim(decompose(wy, 'y'), 'strict')
        generic = len(set(squares)) == 4 and len(y_freqs) == 5
        if dim is None or dim > 5 or (generic and dim != 5):
            failures.append(f'cone dim {dim}: {label}')
        if not (airy(theta).expr - Fraction(3, 2) * heat(theta).expr.diff('x')).is_zero():
            failures.append(f'Ai - (3/2)∂x H: {label}')
    return _criterion(5, '2-soliton Wronskians and Airy-heat identity', failures, samples=n)


def check_heat_implies_wx_eq_wy(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    failures = []
    checked = 0
    for _, phase in random_phase_corpus(rng, n):
        if heat(phase.theta).is_zero:
            checked += 1
            if not (wy_cleared(phase.theta).expr - wx_cleared(phase.theta).expr).is_zero():
                failures.append(_label(phase))
    return _criterion(6, 'heat zero implies ΘW_y = ΘW_x', failures, heat_free_phases=checked)


def check_galilean(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    failures = []
    for _, phase in random_phase_corpus(rng, n):
        beta = random_rational(rng)
        if beta == 0:
            beta = Fraction(1, 2)
        for row, (lhs, rhs) in galilean_rows(phase.theta, beta).items():
            if lhs != rhs:
                failures.append(f'{row} row, beta={beta}: {_label(phase)}')
    vertical = kdv_vertical(random_positive(rng))
    beta = random_positive(rng)
    if heat(galilean(vertical, beta).theta).is_zero:
        failures.append(f'heat of Galilean vertical soliton vanished for beta={beta}')
    return _criterion(7, 'Galilean covariance rows', failures, samples=n)


def check_reconstruction(rng: np.random.Generator, n: int) -> Dict[str, Any]:
    failures = []
    for m in (3, 4, 5):
        for _ in range(n):
            phase = random_resonant(rng, m, generic=True)
            expected = (tuple(phase.spec.params['k']), tuple(phase.spec.params['a']))
            try:
                found = reconstruct_resonant(decompose(wy_cleared(phase.theta).expr, 'y'))
                if (found.k, found.a) != expected:
                    failures.append(f'M={m}: recovered {found.to_dict()}: {_label(phase)}')
            except ReconstructionError as exc:
                failures.append(f'M={m}: {exc}: {_label(phase)}')
    two = build_preset('fig1_center').theta
    try:
        reconstruct_resonant(decompose(wy_cleared(two).expr, 'y'))
        failures.append('2-soliton ΘW_y was accepted as a resonant image')
    except ReconstructionError:
        pass
    return _criterion(8, 'resonant reconstruction round trip', failures, per_m=n)


def check_companions() -> Dict[str, Any]:
    failures = []
    for a in (Fraction(1), Fraction(-2, 3), Fraction(3, 2)):
        theta = kdv_soliton(a)
        if not (kdv_ai(theta).is_zero and kdv_w(theta).is_zero):
            failures.append(f'KdV soliton a={a}')
    t = ExpPoly.variable(KDV_VARS, 't')
    x = ExpPoly.variable(KDV_VARS, 'x')
    rational = t + Fraction(2, 3) * x ** 3 + 1
    if not kdv_ai(rational).is_zero or kdv_w(rational).expr != 8 * x ** 2:
        failures.append('rational KdV phase t + (2/3)x³ + 1')
    for k in (Fraction(1), Fraction(-1, 2)):
        if not mkdv_res(mkdv_soliton(k, 2)).is_zero:
            failures.append(f'mKdV soliton k={k}')
    for d in (2, 3):
        zk = companion_ops(lift(kdv_soliton(Fraction(1, 2)), d), 'ZK')
        failures += [f'ZK d={d}: {name}' for name, r in zk.items() if not r.is_zero]
        mzk = companion_ops(lift(mkdv_soliton(Fraction(1, 2)), d), 'mZK')
        failures += [f'mZK d={d}: {name}' for name, r in mzk.items() if not r.is_zero]
    return _criterion(9, 'companion model checks', failures)


def check_numeric() -> Dict[str, Any]:
    failures = []
    residuals = {}
    grid = Grid()
    for name in ('fig1_left', 'fig1_center', 'fig1_right'):
        report = fd_residual(build_preset(name).theta, 'KP', grid)
        residuals[name] = report.to_dict()
        if not report.passed:
            failures.append(f'{name}: residual {report.residual_h:.3e}, order {report.order}')
    crest = eval_field(build_preset('fig1_left').theta, 'log', grid, 'KP').max
    if abs(crest - 1.125) > 1e-9:
        failures.append(f'line crest {crest!r} != 1.125')
    closed_forms = {
        'breather': breather(1.0, 0.5),
        'mkdv_two_soliton': mkdv_rational_two_soliton(0.25, 1.0),
    }
    for name, u in closed_forms.items():
        report = fd_residual(u, 'mKdV', grid)
        residuals[name] = report.to_dict()
        if not report.passed:
            failures.append(f'{name}: residual {report.residual_h:.3e}, order {report.order}')
    profiles = {name: profile_checks(name)['passed'] for name in ('log', 'arctan2')}
    failures += [f'profile {name}' for name, ok in profiles.items() if not ok]
    return _criterion(10, 'numeric cross-checks', failures, residuals=residuals, crest=crest, profiles=profiles)


def check_cli() -> Dict[str, Any]:
    failures = []
    for text in DSL_CORPUS:
        ast = parse(text)
        printed = print_expr(ast)
        if parse(printed) != ast or printed != text:
            failures.append(text)
    runs = [
        (cmd_classify('preset(fig1_right)').render(), cmd_classify('preset(fig1_right)').render()),
        (cmd_check('two(-1,-1/2,1/2,1)', 'airy,heat,T').render(),
         cmd_check('two(-1,-1/2,1/2,1)', 'airy,heat,T').render()),
    ]
    failures += [f'non-deterministic report #{i}' for i, (a, b) in enumerate(runs) if a != b]
    return _criterion(11, 'DSL round trip and deterministic reports', failures, corpus=len(DSL_CORPUS))


def run_selftest(seed: Optional[int] = None, quick: bool = False) -> CommandResult:
    """
    Run every criterion with one seeded generator.

    Args:
        seed: overrides SOLITON_FORGE_SEED and the default seed
        quick: divide the random sample counts by QUICK_FACTOR
    """
    resolved = resolve_seed(seed)
    rng = make_rng(resolved)
    counts = {
        name: max(2, n // QUICK_FACTOR) if quick else n for name, n in SELFTEST_COUNTS.items()
    }
    criteria = [
        check_soliton_residuals(rng, counts['solitons']),
        check_t_operator(rng, counts['structural']),
        check_line_wy(rng, counts['lines']),
        check_resonant_cones(rng, counts['cone_draws']),
        check_two_soliton(rng, counts['two_solitons']),
        check_heat_implies_wx_eq_wy(rng, counts['solitons']),
        check_galilean(rng, counts['galilean']),
        check_reconstruction(rng, counts['reconstruct']),
        check_companions(),
        check_numeric(),
        check_cli(),
    ]
    for c in criteria:
        logger.info("criterion %d (%s): %s", c['id'], c['name'], 'passed' if c['passed'] else 'FAILED')
    passed = all(c['passed'] for c in criteria)
    report = {
        'schema_version': SCHEMA_VERSION,
        'version': TOOL_VERSION,
        'command': 'selftest',
        'invocation': {'seed': resolved, 'quick': quick, 'counts': counts},
        'criteria': criteria,
        'passed': passed,
    }
    return CommandResult(report, EXIT_OK if passed else EXIT_FAILED)
