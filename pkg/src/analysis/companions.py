"""
Companion Model Functionals
===========================

Cleared functionals for the (1+1)- and higher-dimensional relatives of
KP-II. The KdV-family Airy operator uses the scaling -4Θ_t + Θ_xxx.

| Model | Variables       | Profile    | Outputs                                  |
|-------|-----------------|------------|------------------------------------------|
| KdV   | (t, x)          | log        | kdv_ai, kdv_w, kdv_T (Θ²)                |
| mKdV  | (t, x)          | 2 arctan   | mkdv_res ((1+Θ²))                        |
| ZK    | (t, x1, ..., xd)| log        | zk_ai, zk_w1, zk_wx<j> (Θ), j = 2..d      |
| mZK   | (t, x1, ..., xd)| 2 arctan   | zk_ai, zk_w1, mzk_lambda<j> ((1+Θ²)²)    |
"""

import logging
from typing import Callable, Dict, List, Optional

from src.algebra.expalg import KDV_VARS, ExpPoly, zk_vars
from src.analysis.operators import OperatorError, OperatorResult, cleared_wronskian, require_vars

logger = logging.getLogger(__name__)

COMPANION_MODELS = ('KdV', 'mKdV', 'ZK', 'mZK')


def _airy4(theta: ExpPoly, var: str) -> ExpPoly:
    return -4 * theta.diff('t') + theta.diff(var, 3)


def _w3(theta: ExpPoly, var: str) -> ExpPoly:
    """Θ_xx² - Θ_x Θ_xxx."""
    second = theta.diff(var, 2)
    return second * second - theta.diff(var) * theta.diff(var, 3)


def kdv_ai(theta: ExpPoly) -> OperatorResult:
    require_vars(theta, KDV_VARS, 'KdV')
    return OperatorResult('kdv_ai', _airy4(theta, 'x'), 0, 'KdV')


def kdv_w(theta: ExpPoly) -> OperatorResult:
    """W(Θ) = Θ_xx² - Θ_xΘ_xxx."""
    require_vars(theta, KDV_VARS, 'KdV')
    return OperatorResult('kdv_w', _w3(theta, 'x'), 0, 'KdV')


def kdv_T(theta: ExpPoly) -> OperatorResult:
    """Θ²𝒯 = Θ²(Ai)_x + Θ(3W - Θ_x Ai) for F = log."""
    require_vars(theta, KDV_VARS, 'KdV')
    ai = _airy4(theta, 'x')
    expr = theta * theta * ai.diff('x') + theta * (3 * _w3(theta, 'x') - theta.diff('x') * ai)
    return OperatorResult('kdv_T', expr, 2, 'KdV')


def mkdv_res(theta: ExpPoly) -> OperatorResult:
    """(1+Θ²)(4Θ_t - Θ_xxx) + 6Θ_x(ΘΘ_xx - Θ_x²), the mKdV equation for u = 2∂x arctan Θ."""
    require_vars(theta, KDV_VARS, 'mKdV')
    expr = (1 + theta * theta) * (4 * theta.diff('t') - theta.diff('x', 3)) + 6 * theta.diff(
        'x'
    ) * cleared_wronskian(theta, 'x', 1)
    return OperatorResult('mkdv_res', expr, 1, 'mKdV', clearing='one_plus_theta_sq')


def _zk_dimension(theta: ExpPoly, d: Optional[int]) -> int:
    if d is None:
        d = len(theta.vars) - 1
    try:
        expected = zk_vars(d)
    except ValueError as exc:
        raise OperatorError(str(exc)) from exc
    require_vars(theta, expected, 'ZK')
    return d


def zk_ai(theta: ExpPoly, d: Optional[int] = None) -> OperatorResult:
    _zk_dimension(theta, d)
    return OperatorResult('zk_ai', _airy4(theta, 'x1'), 0, 'ZK')


def zk_w1(theta: ExpPoly, d: Optional[int] = None) -> OperatorResult:
    """W_1(Θ) = Θ_{x1x1}² - Θ_{x1}Θ_{x1x1x1}."""
    _zk_dimension(theta, d)
    return OperatorResult('zk_w1', _w3(theta, 'x1'), 0, 'ZK')


def zk_wxj(theta: ExpPoly, d: Optional[int] = None) -> List[OperatorResult]:
    """ΘΘ_{xjxj} - Θ_{xj}² for each transverse variable x2..xd."""
    d = _zk_dimension(theta, d)
    return [
        OperatorResult(f'zk_wx{j}', cleared_wronskian(theta, f'x{j}', 1), 1, 'ZK')
        for j in range(2, d + 1)
    ]


def mzk_lambda(theta: ExpPoly, d: Optional[int] = None) -> List[OperatorResult]:
    """2(1+Θ²)Θ_{xjxj} - 4ΘΘ_{xj}² for each transverse variable x2..xd."""
    d = _zk_dimension(theta, d)
    results = []
    for j in range(2, d + 1):
        var = f'x{j}'
        first = theta.diff(var)
        expr = 2 * (1 + theta * theta) * theta.diff(var, 2) - 4 * theta * first * first
        results.append(
            OperatorResult(f'mzk_lambda{j}', expr, 2, 'mZK', clearing='one_plus_theta_sq')
        )
    return results


def companion_ops(theta: ExpPoly, model: str, d: Optional[int] = None) -> Dict[str, OperatorResult]:
    """
    All cleared functionals of a companion model.

    Raises:
        OperatorError: unknown model or wrong variable set
    """
    if model == 'KdV':
        results = [kdv_ai(theta), kdv_w(theta), kdv_T(theta)]
    elif model == 'mKdV':
        results = [mkdv_res(theta)]
    elif model == 'ZK':
        results = [zk_ai(theta, d), zk_w1(theta, d)] + zk_wxj(theta, d)
    elif model == 'mZK':
        ai = zk_ai(theta, d)
        w = zk_w1(theta, d)
        results = [
            OperatorResult('mzk_ai', ai.expr, 0, 'mZK'),
            OperatorResult('mzk_w', w.expr, 0, 'mZK'),
        ] + mzk_lambda(theta, d)
    else:
        raise OperatorError(
            f"Unknown companion model '{model}'. Available: {', '.join(COMPANION_MODELS)}"
        )
    logger.debug("%s companion checks: %s", model, {r.name: r.is_zero for r in results})
    return {r.name: r for r in results}


COMPANION_OPERATORS: Dict[str, Callable[[ExpPoly], List[OperatorResult]]] = {
    'kdv_ai': lambda theta: [kdv_ai(theta)],
    'kdv_w': lambda theta: [kdv_w(theta)],
    'kdv_T': lambda theta: [kdv_T(theta)],
    'mkdv_res': lambda theta: [mkdv_res(theta)],
    'zk_ai': lambda theta: [zk_ai(theta)],
    'zk_w1': lambda theta: [zk_w1(theta)],
    'zk_wxj': zk_wxj,
    'mzk_lambda': mzk_lambda,
}
