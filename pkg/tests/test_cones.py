"""
Tests for Cone Analysis, Classification and Reconstruction
==========================================================
"""

from fractions import Fraction

import pytest

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra.expalg import KP_VARS, ExpPoly, gauge
from src.analysis.cones import classify, cone_dim, decompose, in_cone, resonant_m_for_dim
from src.analysis.operators import wy_cleared
from src.analysis.reconstruction import (
    ReconstructionError,
    exact_sqrt,
    reconstruct_resonant,
    reconstruct_two_soliton,
    turnpike_sums,
)
from src.phases.constructors import (
    galilean,
    galilean_straightening_beta,
    kdv_vertical,
    line_soliton,
    resonant,
    two_soliton,
    wave,
)
from src.phases.presets import build_preset
from src.phases.sampling import (
    make_rng,
    random_generic_ks,
    random_phase_corpus,
    random_positive,
    random_rational,
    random_resonant,
    random_two_soliton,
)

HALF = Fraction(1, 2)


def wy_decomposition(theta: ExpPoly):
    return decompose(wy_cleared(theta).expr, 'y')


class TestDecompose:
    def test_groups_by_y_frequency(self):
        p = wave(1) + wave(-1) + wave(2)
        decomp = decompose(p, 'y')
        assert [f for f, _ in decomp.entries] == [Fraction(1), Fraction(4)]
        assert len(decomp.entries[0][1]) == 2
        assert decomp.degrees == (0, 0)

    def test_flags_for_positive_sum(self):
        decomp = decompose(wave(1) + 2 * wave(2), 'y')
        assert decomp.all_freq_nonneg
        assert decomp.all_coeff_syntactically_positive
        assert decomp.no_poly_prefactor
        assert cone_dim(decomp) == 2

    def test_negative_coefficient(self):
        decomp = decompose(wave(1) - wave(2), 'y')
        assert cone_dim(decomp, 'strict') is None
        assert cone_dim(decomp, 'signed') == 2

    def test_negative_frequency(self):
        p = ExpPoly.exponential(KP_VARS, {'y': -1})
        decomp = decompose(p, 'y')
        assert not decomp.all_freq_nonneg
        assert cone_dim(decomp, 'strict') is None
        assert cone_dim(decomp, 'signed') == 1

    def test_polynomial_prefactor_in_y(self):
        decomp = decompose(ExpPoly.variable(KP_VARS, 'y') * wave(1), 'y')
        assert decomp.degrees == (1,)
        assert cone_dim(decomp, 'strict') is None
        assert cone_dim(decomp, 'signed') is None

    def test_prefactor_in_x_allowed(self):
        decomp = decompose(ExpPoly.variable(KP_VARS, 'x') * wave(1), 'y')
        assert decomp.no_poly_prefactor
        assert cone_dim(decomp, 'signed') == 1

    def test_zero_is_in_every_cone(self):
        decomp = decompose(ExpPoly.zero(KP_VARS), 'y')
        assert cone_dim(decomp) == 0
        assert in_cone(decomp, 0)

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match='Available'):
            cone_dim(decompose(wave(1), 'y'), 'loose')

    def test_to_dict(self):
        data = decompose(wave(1), 'y').to_dict()
        assert data['var'] == 'y'
        assert data['entries'][0]['freq'] == '1'
        assert data['dim_strict'] == 1
        assert set(data['flags']) == {'all_freq_nonneg', 'all_coeff_syntactically_positive', 'no_poly_prefactor'}


class TestResonantM:
    @pytest.mark.parametrize('dim,expected', [(0, 2), (1, 2), (2, 3), (3, 3), (4, 4), (6, 4), (7, 5), (10, 5)])
    def test_smallest_m(self, dim, expected):
        assert resonant_m_for_dim(dim) == expected


class TestClassify:
    def test_oblique_line(self):
        report = classify(build_preset('fig1_left').theta)
        assert report.heat_zero and report.airy_zero
        assert report.wy_cone_dim == 1
        assert report.theorem_flags['oblique_line'] is True
        assert report.theorem_flags['kdv_vertical'] is False
        assert report.theorem_flags['resonant_M'] == 2
        assert report.theorem_flags['two_soliton'] is False

    def test_vertical_soliton(self):
        report = classify(build_preset('kdv_vertical').theta)
        assert report.wy_zero
        assert report.theorem_flags['kdv_vertical'] is True
        assert report.wx_eq_wy

    def test_y_shaped_resonant(self):
        report = classify(build_preset('fig1_right').theta)
        assert report.wy_cone_dim == 3
        assert report.theorem_flags['resonant'] is True
        assert report.theorem_flags['resonant_M'] == 3
        assert report.theorem_flags['oblique_line'] is False

    def test_generic_resonant_m(self):
        rng = make_rng(99)
        for m in (2, 3, 4):
            k = random_generic_ks(rng, m)
            theta = resonant([random_positive(rng) for _ in range(m)], k).theta
            report = classify(theta)
            assert report.wy_cone_dim == m * (m - 1) // 2
            assert report.theorem_flags['resonant_M'] == m

    def test_x_shaped_two_soliton(self):
        report = classify(build_preset('fig1_center').theta)
        assert not report.heat_zero
        assert report.airy_heat_identity
        assert report.t_zero and report.kp_residual_zero
        assert report.heat_cone_dim['signed'] <= 4
        assert report.wy_cone_dim <= 5
        assert report.theorem_flags['two_soliton'] is True
        assert report.theorem_flags['resonant'] is False

    def test_random_two_solitons(self):
        rng = make_rng(5)
        for _ in range(5):
            report = classify(random_two_soliton(rng).theta)
            assert report.theorem_flags['two_soliton'] is True

    def test_single_exponential_is_kernel(self):
        report = classify(wave(HALF))
        assert report.kernel
        assert report.theorem_flags['kdv_vertical'] is False
        assert report.theorem_flags['resonant_M'] is None
        assert any('identically zero' in note for note in report.notes)

    def test_straightened_line_has_zero_wy(self):
        beta = galilean_straightening_beta(-HALF, 1)
        report = classify(galilean(line_soliton(1, 1, -HALF, 1), beta).theta)
        assert report.wy_zero
        assert report.kp_residual_zero
        assert not report.heat_zero

    def test_non_solution(self):
        theta = wave(1) + ExpPoly.variable(KP_VARS, 'x') * wave(2)
        report = classify(theta)
        assert not report.t_zero
        assert not any(report.theorem_flags[name] for name in ('kdv_vertical', 'oblique_line', 'two_soliton'))

    def test_to_dict_keys(self):
        data = classify(build_preset('fig1_right').theta).to_dict()
        assert data['theorem_flags']['resonant_M'] == 3
        assert set(data['heat_cone_dim']) == {'strict', 'signed'}


def y_frequency_count(theta: ExpPoly) -> int:
    return len({t.freq[KP_VARS.index('y')] for t in theta.terms})


class TestGaugeCovariance:
    def test_gauge_doubles_on_wy(self):
        rng = make_rng(41)
        phases = [random_resonant(rng, m) for m in (1, 2, 3, 4)]
        phases += [random_two_soliton(rng) for _ in range(3)]
        for phase in phases:
            k = random_rational(rng)
            lhs = wy_cleared(gauge(phase.theta, 'y', k)).expr
            rhs = gauge(wy_cleared(phase.theta).expr, 'y', 2 * k)
            assert lhs == rhs

    def test_gauge_keeps_cone_dimension(self):
        theta = build_preset('fig1_right').theta
        gauged = gauge(theta, 'y', Fraction(3, 2))
        assert cone_dim(wy_decomposition(gauged)) == cone_dim(wy_decomposition(theta)) == 3


class TestWyRigidity:
    def test_zero_exactly_for_single_y_frequency(self):
        rng = make_rng(57)
        phases = [phase.theta for _, phase in random_phase_corpus(rng, 40)]
        phases += [
            kdv_vertical(Fraction(3, 4)).theta,
            wave(Fraction(-2, 3)),
            galilean(line_soliton(1, 1, -HALF, 1), galilean_straightening_beta(-HALF, 1)).theta,
            galilean(line_soliton(2, 5, 1, 3), galilean_straightening_beta(1, 3)).theta,
        ]
        for theta in phases:
            assert wy_cleared(theta).expr.is_zero() == (y_frequency_count(theta) == 1)

    def test_straightened_image_has_one_y_frequency(self):
        beta = galilean_straightening_beta(-HALF, 1)
        image = galilean(line_soliton(1, 1, -HALF, 1), beta).theta
        assert beta == Fraction(3, 8)
        assert y_frequency_count(image) == 1
        assert wy_cleared(image).expr.is_zero()

    def test_unstraightened_image_keeps_wy(self):
        image = galilean(line_soliton(1, 1, -HALF, 1), HALF).theta
        assert y_frequency_count(image) == 2
        assert not wy_cleared(image).expr.is_zero()


class TestTurnpike:
    def test_exact_sqrt(self):
        assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
        assert exact_sqrt(Fraction(0)) == 0
        assert exact_sqrt(Fraction(2)) is None
        assert exact_sqrt(Fraction(-1)) is None

    def test_three_points(self):
        assert turnpike_sums([Fraction(1, 4), Fraction(1), Fraction(5, 4)], 3) == [
            [Fraction(0), Fraction(1, 4), Fraction(1)]
        ]

    def test_four_points(self):
        points = [Fraction(0), Fraction(1, 4), Fraction(1), Fraction(4)]
        sums = [points[i] + points[j] for i in range(4) for j in range(i + 1, 4)]
        assert points in turnpike_sums(sums, 4)

    def test_every_solution_reproduces_sums(self):
        points = [Fraction(v) for v in (0, 1, 3, 7, 8)]
        sums = sorted(points[i] + points[j] for i in range(5) for j in range(i + 1, 5))
        solutions = turnpike_sums(sums, 5)
        assert points in solutions
        for s in solutions:
            assert sorted(s[i] + s[j] for i in range(5) for j in range(i + 1, 5)) == sums

    def test_wrong_count(self):
        assert turnpike_sums([Fraction(1), Fraction(2)], 3) == []


class TestReconstructResonant:
    def test_preset_round_trip(self):
        params = reconstruct_resonant(wy_decomposition(build_preset('resonant_4').theta))
        assert params.k == (Fraction(-1), Fraction(0), HALF, Fraction(2))
        assert params.a == (1, 1, 1, 1)

    def test_random_round_trip(self):
        rng = make_rng(17)
        for m in (3, 4):
            for _ in range(3):
                k = random_generic_ks(rng, m)
                a = [random_positive(rng) for _ in range(m)]
                params = reconstruct_resonant(wy_decomposition(resonant(a, k).theta), m)
                assert list(params.k) == k
                assert list(params.a) == a

    def test_two_exponentials_up_to_gauge(self):
        params = reconstruct_resonant(wy_decomposition(line_soliton(2, 3, -HALF, 1).theta), 2)
        assert params.k == (-HALF, Fraction(1))
        assert params.a == (1, 6)
        assert params.to_dict() == {'k': ['-1/2', '1'], 'a': ['1', '6']}

    def test_two_soliton_image_rejected(self):
        with pytest.raises(ReconstructionError):
            reconstruct_resonant(wy_decomposition(build_preset('fig1_center').theta))

    def test_non_triangular_count(self):
        decomp = decompose(wave(1) + wave(2) + wave(Fraction(3, 2)) + wave(Fraction(5, 2)), 'y')
        with pytest.raises(ReconstructionError, match='M\\(M-1\\)/2'):
            reconstruct_resonant(decomp)

    def test_count_must_match_m(self):
        with pytest.raises(ReconstructionError):
            reconstruct_resonant(wy_decomposition(build_preset('fig1_right').theta), 4)

    def test_requires_y_decomposition(self):
        with pytest.raises(ReconstructionError, match="decomposition in y"):
            reconstruct_resonant(decompose(wave(1), 'x'))


class TestReconstructTwoSoliton:
    def test_recovers_k_and_scale(self):
        k = (-1, -HALF, HALF, 1)
        theta = 3 * two_soliton(*k).theta
        recovered, scale = reconstruct_two_soliton(theta)
        assert recovered == tuple(Fraction(v) for v in k)
        assert scale == 3

    def test_random(self):
        rng = make_rng(8)
        for _ in range(5):
            phase = random_two_soliton(rng)
            recovered, scale = reconstruct_two_soliton(phase.theta)
            assert list(recovered) == phase.spec.params['k']
            assert scale == 1

    def test_wrong_term_count(self):
        with pytest.raises(ReconstructionError, match='4 pure exponential'):
            reconstruct_two_soliton(build_preset('fig1_left').theta)

    def test_wrong_coefficients(self):
        theta = two_soliton(-1, -HALF, HALF, 1).theta + wave(-1) * wave(HALF)
        with pytest.raises(ReconstructionError):
            reconstruct_two_soliton(theta)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
