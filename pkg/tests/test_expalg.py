"""
Tests for the Exponential-Polynomial Ring
=========================================
"""

import math
from fractions import Fraction

import pytest
import numpy as np
import sympy as sp

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra.expalg import (
    KDV_VARS,
    KP_VARS,
    AlgebraError,
    EvaluationRangeError,
    ExpPoly,
    Term,
    VariableMismatchError,
    VarSet,
    add,
    diff,
    embed,
    equals,
    eval_terms,
    evaluate,
    gauge,
    group_by_frequency,
    is_zero,
    mul,
    substitute_affine,
    to_text,
    zk_vars,
)
from src.phases.sampling import make_rng, random_exppoly

SEED = 1234


def exp_kp(fx=0, fy=0, ft=0, coeff=1, mono=None):
    return ExpPoly.exponential(KP_VARS, {'x': fx, 'y': fy, 't': ft}, coeff=coeff, mono=mono)


def theta_wave(k, coeff=1):
    k = Fraction(k)
    return exp_kp(k, k ** 2, k ** 3, coeff)


def to_sympy(p: ExpPoly):
    symbols = sp.symbols(' '.join(p.vars.names))
    expr = sp.Integer(0)
    for t in p.terms:
        factor = sp.Rational(t.coeff.numerator, t.coeff.denominator)
        for s, m, f in zip(symbols, t.mono, t.freq):
            factor *= s ** m * sp.exp(sp.Rational(f.numerator, f.denominator) * s)
        expr += factor
    return expr


class TestVarSet:
    def test_names_kept_in_order(self):
        assert KP_VARS.names == ('t', 'x', 'y')
        assert KP_VARS.index('y') == 2

    def test_duplicate_names_rejected(self):
        with pytest.raises(AlgebraError):
            VarSet(('x', 'x'))

    def test_empty_name_rejected(self):
        with pytest.raises(AlgebraError):
            VarSet(('t', ''))

    def test_unknown_variable(self):
        with pytest.raises(VariableMismatchError):
            KP_VARS.index('z')

    def test_zk_vars(self):
        assert zk_vars(3).names == ('t', 'x1', 'x2', 'x3')
        with pytest.raises(AlgebraError):
            zk_vars(1)


class TestNormalForm:
    def test_like_terms_merge(self):
        e = exp_kp(fx=1)
        assert e + e == exp_kp(fx=1, coeff=2)

    def test_zero_is_identity(self):
        p = theta_wave(Fraction(-1, 2)) + theta_wave(1)
        assert p + ExpPoly.zero(KP_VARS) == p
        assert ExpPoly.zero(KP_VARS).terms == ()

    def test_cancellation_gives_zero(self):
        p = theta_wave(2) + ExpPoly.variable(KP_VARS, 'x')
        assert (p - p).is_zero()
        assert is_zero(p - p)

    def test_input_order_does_not_matter(self):
        terms = [
            Term(Fraction(1), (0, 1, 0), (Fraction(0), Fraction(1), Fraction(0))),
            Term(Fraction(3), (0, 0, 0), (Fraction(0), Fraction(-1), Fraction(2))),
            Term(Fraction(-2), (1, 0, 0), (Fraction(0), Fraction(0), Fraction(0))),
        ]
        assert ExpPoly(KP_VARS, terms) == ExpPoly(KP_VARS, list(reversed(terms)))

    def test_terms_sorted_by_freq_then_mono(self):
        p = exp_kp(fx=2) + exp_kp(fx=-1) + ExpPoly.variable(KP_VARS, 'x') + ExpPoly.constant(KP_VARS, 5)
        keys = [t.key for t in p.terms]
        assert keys == sorted(keys)

    def test_canonicalization_is_idempotent(self):
        p = random_exppoly(make_rng(SEED))
        assert ExpPoly(p.vars, p.terms) == p

    def test_arity_mismatch_rejected(self):
        with pytest.raises(AlgebraError):
            ExpPoly(KP_VARS, [Term(Fraction(1), (0, 0), (Fraction(0),) * 3)])

    def test_line_soliton_phase_from_sum(self):
        p = theta_wave(Fraction(-1, 2)) + theta_wave(1)
        assert len(p) == 2
        assert sorted(t.freq[1] for t in p.terms) == [Fraction(-1, 2), Fraction(1)]


class TestArithmetic:
    def test_frequency_addition(self):
        assert exp_kp(fx=1) * exp_kp(fx=2) == exp_kp(fx=3)

    def test_monomial_addition(self):
        x = ExpPoly.variable(KP_VARS, 'x')
        assert x * x == exp_kp(mono={'x': 2})

    def test_product_of_sums(self):
        e1, e2 = theta_wave(1), theta_wave(2)
        product = (e1 + e2) * (e1 + 4 * e2)
        assert product == e1 * e1 + 5 * e1 * e2 + 4 * e2 * e2
        assert len(product) == 3

    def test_product_matches_sympy(self):
        rng = make_rng(SEED)
        p = random_exppoly(rng, n_terms=3)
        q = random_exppoly(rng, n_terms=3)
        assert sp.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0

    def test_module_level_functions(self):
        p, q = theta_wave(1), theta_wave(-1)
        assert add(p, q) == p + q
        assert mul(p, q) == p * q
        assert equals(p + q, q + p)

    def test_variable_mismatch(self):
        p = ExpPoly.constant(KP_VARS, 1)
        q = ExpPoly.constant(KDV_VARS, 1)
        with pytest.raises(VariableMismatchError):
            p + q
        with pytest.raises(VariableMismatchError):
            mul(p, q)

    def test_float_scalars_rejected(self):
        with pytest.raises(AlgebraError):
            theta_wave(1) * 1.5

    def test_power(self):
        x = ExpPoly.variable(KP_VARS, 'x')
        assert (1 + x) ** 2 == 1 + 2 * x + x * x
        assert x ** 0 == ExpPoly.constant(KP_VARS, 1)
        with pytest.raises(AlgebraError):
            x ** -1


class TestDiff:
    def test_product_rule(self):
        x = ExpPoly.variable(KP_VARS, 'x')
        e = exp_kp(fx=2)
        assert (x * e).diff('x') == e + 2 * x * e

    def test_exponential_sum_in_y(self):
        ks = [Fraction(-1, 2), Fraction(1), Fraction(3, 2)]
        theta = sum((theta_wave(k, coeff=i + 1) for i, k in enumerate(ks)), ExpPoly.zero(KP_VARS))
        expected = sum((theta_wave(k, coeff=(i + 1) * k ** 2) for i, k in enumerate(ks)), ExpPoly.zero(KP_VARS))
        assert diff(theta, 'y') == expected

    def test_fourth_derivative(self):
        k = Fraction(3, 2)
        assert diff(exp_kp(fx=k), 'x', 4) == exp_kp(fx=k, coeff=k ** 4)

    def test_polynomial_runs_out(self):
        x = ExpPoly.variable(KP_VARS, 'x')
        assert (x ** 2).diff('x', 3).is_zero()

    def test_unknown_variable(self):
        with pytest.raises(VariableMismatchError):
            theta_wave(1).diff('z')

    def test_order_must_be_positive(self):
        with pytest.raises(AlgebraError):
            theta_wave(1).diff('x', 0)


class TestRingProperties:
    @pytest.fixture
    def samples(self):
        rng = make_rng(SEED)
        return [tuple(random_exppoly(rng, n_terms=3) for _ in range(3)) for _ in range(15)]

    def test_associativity_and_commutativity(self, samples):
        for p, q, r in samples:
            assert (p + q) + r == p + (q + r)
            assert (p * q) * r == p * (q * r)
            assert p * q == q * p

    def test_distributivity(self, samples):
        for p, q, r in samples:
            assert p * (q + r) == p * q + p * r

    def test_leibniz(self, samples):
        for p, q, _ in samples:
            assert (p * q).diff('x') == p.diff('x') * q + p * q.diff('x')

    def test_derivatives_commute(self, samples):
        for p, _, _ in samples:
            assert p.diff('x').diff('y') == p.diff('y').diff('x')
            assert p.diff('t').diff('x', 2) == p.diff('x', 2).diff('t')


class TestSubstituteAffine:
    IDENTITY = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_identity(self):
        p = random_exppoly(make_rng(SEED))
        assert substitute_affine(p, self.IDENTITY) == p

    def test_scaling_frequencies(self):
        lam = 2
        matrix = [[lam ** 3, 0, 0], [0, lam, 0], [0, 0, lam ** 2]]
        assert substitute_affine(exp_kp(1, 1, 1), matrix) == exp_kp(2, 4, 8)

    def test_composition(self):
        rng = make_rng(SEED)
        p = random_exppoly(rng, n_terms=3)
        a1 = [[1, 0, 0], [Fraction(1, 2), 1, -2], [3, 0, 1]]
        a2 = [[2, 0, 0], [0, 1, Fraction(1, 3)], [-1, 0, 1]]
        product = np.array(a1, dtype=object).dot(np.array(a2, dtype=object)).tolist()
        assert substitute_affine(substitute_affine(p, a1), a2) == substitute_affine(p, product)

    def test_shift_expands_monomials(self):
        x = ExpPoly.variable(KP_VARS, 'x')
        shifted = substitute_affine(x ** 2, self.IDENTITY, [0, 1, 0])
        assert shifted == x ** 2 + 2 * x + 1

    def test_shift_with_exponential_rejected(self):
        with pytest.raises(AlgebraError):
            substitute_affine(exp_kp(fx=1), self.IDENTITY, [0, 1, 0])

    def test_shift_orthogonal_to_frequency_allowed(self):
        p = exp_kp(fx=1) * ExpPoly.variable(KP_VARS, 'y')
        shifted = substitute_affine(p, self.IDENTITY, [0, 0, 2])
        assert shifted == p + 2 * exp_kp(fx=1)

    def test_dimension_mismatch(self):
        with pytest.raises(AlgebraError):
            substitute_affine(theta_wave(1), [[1, 0], [0, 1]])


class TestEvaluate:
    def test_exponential_at_origin(self):
        assert evaluate(exp_kp(fx=1), [0, 0, 0]) == 1.0

    def test_sum_at_origin(self):
        assert evaluate(2 * exp_kp(fx=1) + 3, [0, 0, 0]) == 5.0

    def test_exact_path_for_polynomials(self):
        x = ExpPoly.variable(KP_VARS, 'x')
        p = Fraction(1, 3) * x ** 2 + x
        assert evaluate(p, [0, Fraction(3, 2), 0]) == pytest.approx(0.75 + 1.5)

    def test_floating_point(self):
        p = theta_wave(Fraction(1, 2)) + theta_wave(-1)
        expected = math.exp(0.5 * 0.3 + 0.25 * 0.2 + 0.125 * 0.1) + math.exp(-0.3 + 0.2 - 0.1)
        assert evaluate(p, [0.1, 0.3, 0.2]) == pytest.approx(expected, rel=1e-14)

    def test_overflow_is_range_error(self):
        with pytest.raises(EvaluationRangeError):
            evaluate(exp_kp(fx=1), [0.0, 1000.0, 0.0])

    def test_arity_mismatch(self):
        with pytest.raises(VariableMismatchError):
            evaluate(exp_kp(fx=1), [0, 0])

    def test_derivative_matches_central_difference(self):
        rng = make_rng(SEED)
        p = random_exppoly(rng, n_terms=4)
        point = [0.2, -0.4, 0.3]
        exact = evaluate(p.diff('x'), point)
        errors = []
        for h in (1e-2, 5e-3):
            up = evaluate(p, [point[0], point[1] + h, point[2]])
            down = evaluate(p, [point[0], point[1] - h, point[2]])
            errors.append(abs((up - down) / (2 * h) - exact))
        assert errors[0] < 1e-1
        assert errors[1] <= errors[0] / 3 or errors[0] < 1e-10

    def test_eval_terms_matches_evaluate_with_shift(self):
        p = theta_wave(Fraction(1, 2)) + 3 * theta_wave(-1)
        coords = {'t': np.array([0.0, 0.5]), 'x': np.array([1.0, -2.0]), 'y': np.array([0.0, 1.0])}
        shift = np.array([2.0, 3.0])
        values = eval_terms(p, coords, shift) * np.exp(shift)
        for i in range(2):
            assert values[i] == pytest.approx(evaluate(p, [coords[v][i] for v in ('t', 'x', 'y')]))


class TestGroupByFrequency:
    def test_grouping_in_y(self):
        p = exp_kp(fy=2) * (exp_kp(fx=1) + exp_kp(fx=3)) + 5 * exp_kp(fy=7)
        groups = group_by_frequency(p, 'y')
        rest = KP_VARS.without('y')
        assert [(f, d) for f, _, d in groups] == [(2, 0), (7, 0)]
        assert groups[0][1] == ExpPoly.exponential(rest, {'x': 1}) + ExpPoly.exponential(rest, {'x': 3})
        assert groups[1][1] == ExpPoly.constant(rest, 5)

    def test_polynomial_prefactor_recorded(self):
        p = ExpPoly.variable(KP_VARS, 'y') * exp_kp(fy=2)
        assert [(f, d) for f, _, d in group_by_frequency(p, 'y')] == [(2, 1)]

    def test_line_soliton_wronskian_single_frequency(self):
        theta = theta_wave(Fraction(-1, 2)) + theta_wave(1)
        wy = theta * theta.diff('y', 2) - theta.diff('y') ** 2
        groups = group_by_frequency(wy, 'y')
        assert len(groups) == 1
        assert groups[0][0] == Fraction(1, 4) + 1


class TestTextAndEmbedding:
    def test_zero_text(self):
        assert to_text(ExpPoly.zero(KP_VARS)) == '0'

    def test_term_text(self):
        p = exp_kp(fx=Fraction(1, 2), coeff=3, mono={'y': 2})
        assert to_text(p) == '3 * t^0 x^0 y^2 * exp(0*t + 1/2*x + 0*y)'

    def test_embed_kdv_into_kp(self):
        p = ExpPoly.exponential(KDV_VARS, {'x': 2, 't': 1}, coeff=3)
        assert embed(p, KP_VARS) == exp_kp(fx=2, ft=1, coeff=3)

    def test_gauge(self):
        p = theta_wave(1)
        assert gauge(p, 'y', -1) == p * exp_kp(fy=-1)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
