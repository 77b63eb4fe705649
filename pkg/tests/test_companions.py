"""
Tests for Companion Model Functionals
=====================================
"""

from fractions import Fraction

import pytest

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra.expalg import KDV_VARS, ExpPoly, zk_vars
from src.analysis.companions import (
    COMPANION_OPERATORS,
    companion_ops,
    kdv_ai,
    kdv_T,
    kdv_w,
    mkdv_res,
    mzk_lambda,
    zk_ai,
    zk_wxj,
)
from src.analysis.operators import OperatorError
from src.phases.constructors import kdv_soliton, kdv_two_soliton, lift, line_soliton, mkdv_soliton

HALF = Fraction(1, 2)


class TestKdV:
    @pytest.mark.parametrize('a', [Fraction(1), HALF, Fraction(-3, 2)])
    def test_soliton(self, a):
        theta = kdv_soliton(a, 2)
        assert kdv_ai(theta).is_zero
        assert kdv_w(theta).is_zero
        assert kdv_T(theta).is_zero

    def test_two_soliton(self):
        theta = kdv_two_soliton(1, 2)
        assert not kdv_ai(theta).is_zero
        result = kdv_T(theta)
        assert result.is_zero
        assert result.cleared_by == 2

    def test_wrong_interaction_coefficient(self):
        e1 = ExpPoly.exponential(KDV_VARS, {'x': 1, 't': Fraction(1, 4)})
        e2 = ExpPoly.exponential(KDV_VARS, {'x': 2, 't': 2})
        theta = 1 + e1 + e2 + e1 * e2
        assert not kdv_T(theta).is_zero

    def test_rational_phase(self):
        x = ExpPoly.variable(KDV_VARS, 'x')
        t = ExpPoly.variable(KDV_VARS, 't')
        theta = t + Fraction(2, 3) * x * x * x + 1
        assert kdv_ai(theta).is_zero
        assert kdv_w(theta).expr == 8 * x * x
        assert not kdv_T(theta).is_zero


class TestMKdV:
    @pytest.mark.parametrize('k', [Fraction(1), Fraction(-2), Fraction(3, 4)])
    def test_soliton(self, k):
        result = mkdv_res(mkdv_soliton(k, 3))
        assert result.is_zero
        assert result.clearing == 'one_plus_theta_sq'

    def test_kdv_dispersion_is_not_mkdv(self):
        assert not mkdv_res(kdv_soliton(1)).is_zero


class TestZK:
    @pytest.mark.parametrize('d', [2, 3, 4])
    def test_lifted_kdv_soliton(self, d):
        theta = lift(kdv_soliton(HALF), d)
        results = companion_ops(theta, 'ZK')
        assert set(results) == {'zk_ai', 'zk_w1'} | {f'zk_wx{j}' for j in range(2, d + 1)}
        assert all(r.is_zero for r in results.values())

    def test_transverse_dependence(self):
        vars = zk_vars(2)
        theta = 1 + ExpPoly.exponential(vars, {'x2': 1})
        (wx2,) = zk_wxj(theta)
        assert wx2.expr == ExpPoly.exponential(vars, {'x2': 1})

    def test_lifted_mkdv_soliton(self):
        theta = lift(mkdv_soliton(2), 3)
        results = companion_ops(theta, 'mZK')
        assert set(results) == {'mzk_ai', 'mzk_w', 'mzk_lambda2', 'mzk_lambda3'}
        assert all(r.is_zero for r in results.values())

    def test_mzk_lambda_detects_transverse_terms(self):
        vars = zk_vars(2)
        theta = ExpPoly.exponential(vars, {'x2': 1})
        (result,) = mzk_lambda(theta)
        assert not result.is_zero
        assert result.cleared_by == 2

    def test_explicit_dimension(self):
        theta = lift(kdv_soliton(1), 3)
        assert zk_ai(theta, 3).is_zero
        with pytest.raises(OperatorError):
            zk_ai(theta, 2)


class TestErrors:
    def test_unknown_model(self):
        with pytest.raises(OperatorError, match='Available: KdV'):
            companion_ops(kdv_soliton(1), 'Boussinesq')

    def test_kdv_on_kp_phase(self):
        with pytest.raises(OperatorError, match='KdV operators need'):
            kdv_ai(line_soliton(1, 1, -HALF, 1).theta)

    def test_zk_on_kdv_phase(self):
        with pytest.raises(OperatorError):
            zk_ai(kdv_soliton(1))

    def test_zk_on_kp_phase(self):
        with pytest.raises(OperatorError, match='ZK operators need'):
            zk_wxj(line_soliton(1, 1, -HALF, 1).theta)

    def test_registry_names(self):
        assert set(COMPANION_OPERATORS) == {
            'kdv_ai', 'kdv_w', 'kdv_T', 'mkdv_res', 'zk_ai', 'zk_w1', 'zk_wxj', 'mzk_lambda',
        }


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
