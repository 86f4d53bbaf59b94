import cmath
import csv
import math
from fractions import Fraction

import numpy as np
import pytest

from conetrace import trace_formula
from conetrace.diffraction import diffraction_coefficient_closed
from conetrace.enumeration import chain_from_word
from conetrace.exceptions import GeometricTransitionPresent, InvalidInputError, MissingCoefficient, NonConvergent
from conetrace.objects.cone_graph import ConeGraph
from conetrace.trace_formula import (TRANSFORM_ORACLE_ID, CutoffSpec, SegmentData, SingularityDescriptor,
                                     SymbolDescriptor, assemble_symbol, bump_profile, calibrate_transform_constant,
                                     numeric_symbol_transform, oracle_run_id, predict_singularities,
                                     segment_amplitude, smoothstep_profile, sum_coincident,
                                     time_domain_singularity, transform_constant)


@pytest.fixture
def loop_graph():
    graph = ConeGraph()
    graph.add_cone_point('p', 3 * math.pi)
    graph.add_segment('p', 0.0, 'p', 1.0, 1.5, id='loop')
    return graph


@pytest.fixture
def geometric_graph():
    graph = ConeGraph()
    graph.add_cone_point('p0', 3 * math.pi)
    graph.add_cone_point('p1', 3 * math.pi)
    graph.add_segment('p0', 0.0, 'p1', 0.0, 1.0, id='s0')
    graph.add_segment('p1', math.pi, 'p0', 0.5, 1.0, id='s1')
    return graph


def unit_symbol(s, location=0.0, prefactor=1 + 0j, profile='bump'):
    return SymbolDescriptor(chain_id='unit', location=location, primitive_length=1.0, k=1, n=2,
                            exponent=Fraction(s), prefactor=prefactor, coefficients=[1 + 0j],
                            segments=[segment_amplitude(1.0, 2)], cutoff=CutoffSpec(profile=profile))


class TestCutoff:

    @pytest.mark.parametrize('profile', [bump_profile, smoothstep_profile])
    def test_profile(self, profile):
        values = profile([-1.0, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0])
        assert values[0] == 0 and values[1] == 0
        assert values[-1] == 1 and values[-2] == 1
        assert values[3] == pytest.approx(0.5)
        assert values[2] + values[4] == pytest.approx(1.0)
        assert np.all(np.diff(values) >= 0)

    def test_cutoff_spec(self):
        cutoff = CutoffSpec(lower=1.0, upper=2.0, profile='smoothstep')
        assert cutoff.evaluate([0.5, 1.5, 3.0]) == pytest.approx([0.0, 0.5, 1.0])


class TestExponentLaw:

    @pytest.mark.parametrize('n', [2, 3])
    @pytest.mark.parametrize('k', [1, 2, 3, 4])
    def test_exponent_and_log_flag(self, loop_graph, n, k):
        chain = chain_from_word(loop_graph, (0,) * k)
        symbol = assemble_symbol(chain, n, [1 + 0j] * k)
        assert symbol.exponent == Fraction(k * (n - 1), 2)

        singularity = time_domain_singularity(symbol)
        assert singularity.exponent == Fraction(-1) + Fraction(k * (n - 1), 2)
        assert singularity.log_flag == (k * (n - 1) % 2 == 0)
        assert singularity.k == k and singularity.n == n

    def test_primitive_length_enters(self, loop_graph):
        once = assemble_symbol(chain_from_word(loop_graph, (0,)), 2, [1 + 0j])
        twice = assemble_symbol(chain_from_word(loop_graph, (0, 0)), 2, [1 + 0j, 1 + 0j])
        assert twice.primitive_length == pytest.approx(1.5)
        assert twice.location == pytest.approx(3.0)
        assert abs(once.prefactor) == pytest.approx(1.5 * 2 * math.pi / math.sqrt(1.5))


class TestAssembleSymbol:

    def test_two_point_value(self, two_points):
        chain = chain_from_word(two_points, (0, 1))
        coefficients = [diffraction_coefficient_closed(t.circumference, t.theta_in, t.theta_out)
                        for t in chain.transitions]
        assert coefficients[0].value == pytest.approx(-1j * math.sqrt(3) / (9 * math.pi))
        symbol = assemble_symbol(chain, 2, coefficients)
        assert symbol.prefactor == pytest.approx(8j / 27)
        assert not symbol.vanishing
        assert symbol.evaluate([2.0])[0] == pytest.approx(8j / 27 / 2)
        assert symbol.evaluate([-1.0])[0] == 0

    def test_homogeneous_in_coefficients(self, two_points):
        chain = chain_from_word(two_points, (0, 1))
        base = assemble_symbol(chain, 2, [0.3 + 0.1j, -0.2j])
        scaled = assemble_symbol(chain, 2, [2 * (0.3 + 0.1j), -0.2j])
        assert scaled.prefactor == pytest.approx(2 * base.prefactor)

    def test_conjugation(self, two_points):
        chain = chain_from_word(two_points, (0, 1))
        coefficients = [0.3 + 0.1j, -0.25 + 0.4j]
        phase = cmath.exp(1j * 2 * (2 - 3) * math.pi / 4)
        symbol = assemble_symbol(chain, 2, coefficients)
        conjugate = assemble_symbol(chain, 2, [c.conjugate() for c in coefficients])
        assert conjugate.prefactor / phase == pytest.approx((symbol.prefactor / phase).conjugate())

    def test_vanishing_on_square(self, square):
        chain = chain_from_word(square, (0, 1))
        coefficients = [diffraction_coefficient_closed(t.circumference, t.theta_in, t.theta_out)
                        for t in chain.transitions]
        symbol = assemble_symbol(chain, 2, coefficients)
        assert symbol.vanishing
        assert symbol.prefactor == 0
        assert time_domain_singularity(symbol).coefficient == 0

    def test_geometric_chain(self, geometric_graph):
        chain = chain_from_word(geometric_graph, (0, 2))
        assert chain.geometric
        with pytest.raises(GeometricTransitionPresent):
            assemble_symbol(chain, 2, [1j, 1j])

    def test_missing_coefficients(self, two_points):
        chain = chain_from_word(two_points, (0, 1))
        with pytest.raises(MissingCoefficient):
            assemble_symbol(chain, 2, [1j])
        with pytest.raises(MissingCoefficient):
            assemble_symbol(chain, 2, [1j, None])
        with pytest.raises(MissingCoefficient):
            assemble_symbol(chain, 2, [1j, complex(float('nan'), 0)])

    def test_theta_enters_once(self, two_points, monkeypatch):
        chain = chain_from_word(two_points, (0, 1))
        base = assemble_symbol(chain, 2, [0.3 + 0.1j, -0.2j])

        def focused(segment, n):
            return SegmentData(length=segment.length, theta=4.0, w_factor=segment.length ** (-(n - 1) / 2) / 2)

        monkeypatch.setattr(trace_formula, 'segment_amplitude', focused)
        symbol = assemble_symbol(chain, 2, [0.3 + 0.1j, -0.2j])
        assert symbol.prefactor == pytest.approx(base.prefactor / 4)

    @pytest.mark.parametrize('word, s', [((0, 1), Fraction(1)), ((0, 1, 0, 1), Fraction(2))])
    def test_homogeneity(self, two_points, word, s):
        chain = chain_from_word(two_points, word)
        symbol = assemble_symbol(chain, 2, [0.3 + 0.1j, -0.2j] * (len(word) // 2))
        assert symbol.exponent == s
        low, high = symbol.evaluate([1e3, 2e3])
        assert abs(high / low) == pytest.approx(2.0 ** -float(s), rel=1e-6)

    @pytest.mark.parametrize('s', [Fraction(1, 4), Fraction(1, 2), Fraction(3, 2)])
    def test_homogeneity_unit_symbol(self, s):
        low, high = unit_symbol(s).evaluate([1e3, 2e3])
        assert abs(high / low) == pytest.approx(2.0 ** -float(s), rel=1e-6)

    def test_segment_amplitude(self):
        assert segment_amplitude(4.0, 3).w_factor == pytest.approx(0.25)
        assert segment_amplitude(4.0, 2).w_factor == pytest.approx(0.5)
        with pytest.raises(InvalidInputError):
            segment_amplitude(0.0, 2)

    def test_json(self):
        data = unit_symbol(Fraction(1, 2), prefactor=1 + 2j).model_dump(mode='json')
        assert data['exponent'] == '1/2'
        assert data['prefactor'] == {'re': 1.0, 'im': 2.0}
        assert SymbolDescriptor.model_validate(data).exponent == Fraction(1, 2)


class TestTransformConstant:

    def test_values(self):
        assert transform_constant(Fraction(1, 2)) == pytest.approx(math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4))
        assert transform_constant(1) == pytest.approx(-1)
        assert transform_constant(2) == pytest.approx(-1j)
        assert transform_constant(3) == pytest.approx(0.5)
        assert transform_constant(Fraction(3, 2)) == pytest.approx(-2 * math.sqrt(math.pi) * cmath.exp(-1j * math.pi / 4))

    def test_non_positive(self):
        with pytest.raises(InvalidInputError):
            transform_constant(0)


class TestNumericTransform:

    def test_inverse_square_root(self):
        tau = np.geomspace(1e-7, 1e-5, 9)
        series = numeric_symbol_transform(unit_symbol(Fraction(1, 2)), tau)
        slope = np.polyfit(np.log(tau), np.log(np.abs(series.values)), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.01)

    def test_logarithm(self):
        tau = np.geomspace(1e-4, 1e-2, 9)
        series = numeric_symbol_transform(unit_symbol(1), tau)
        slope = np.polyfit(np.log(tau), series.values.real, 1)[0]
        assert slope == pytest.approx(-1.0, rel=0.02)

    def test_linear_in_prefactor(self):
        t = [0.3, 1.0, 4.0]
        unit = numeric_symbol_transform(unit_symbol(Fraction(1, 2)), t)
        scaled = numeric_symbol_transform(unit_symbol(Fraction(1, 2), prefactor=2 - 1j), t)
        assert scaled.values == pytest.approx((2 - 1j) * unit.values)

    def test_shift_by_location(self):
        near = numeric_symbol_transform(unit_symbol(Fraction(1, 2)), [0.5])
        shifted = numeric_symbol_transform(unit_symbol(Fraction(1, 2), location=3.0), [3.5])
        assert shifted.values[0] == pytest.approx(near.values[0], rel=1e-8)

    def test_at_location(self):
        with pytest.raises(NonConvergent):
            numeric_symbol_transform(unit_symbol(Fraction(1, 2)), [0.0])
        tapered = numeric_symbol_transform(unit_symbol(Fraction(1, 2)), [0.0], taper=1e-3)
        assert np.isfinite(tapered.values[0])
        # above s = 1 the integral converges at t = L
        assert np.isfinite(numeric_symbol_transform(unit_symbol(Fraction(3, 2)), [0.0]).values[0])

    def test_vanishing_symbol(self):
        series = numeric_symbol_transform(unit_symbol(Fraction(1, 2), prefactor=0j), [0.0, 1.0])
        assert np.all(series.values == 0)

    def test_unsupported_cutoff(self):
        symbol = unit_symbol(Fraction(1, 2)).model_copy(update={'cutoff': CutoffSpec(lower=1.0, upper=2.0)})
        with pytest.raises(InvalidInputError):
            numeric_symbol_transform(symbol, [1.0])

    def test_to_csv(self, tmp_path):
        series = numeric_symbol_transform(unit_symbol(Fraction(1, 2)), [0.5, 1.0])
        path = series.to_csv(str(tmp_path / 'series.csv'))
        with open(path) as f:
            rows = list(csv.reader(f))
        assert rows[0] == ['t', 're', 'im', 'abs']
        assert len(rows) == 3
        assert float(rows[1][0]) == 0.5

        path = series.to_csv(str(tmp_path / 'tagged.csv'), manifest_id='abc')
        with open(path) as f:
            assert f.readline() == '# manifest_id: abc\n'


class TestCalibration:

    @pytest.mark.parametrize('s, tolerance', [(Fraction(1, 2), 1e-5), (Fraction(1, 4), 1e-5), (Fraction(1), 1e-4)])
    def test_reproduces_transform_constant(self, s, tolerance):
        record = calibrate_transform_constant(s)
        assert record.relative_error < tolerance
        assert record.run_id == TRANSFORM_ORACLE_ID

    def test_smoothstep_profile(self):
        record = calibrate_transform_constant(Fraction(1, 2), profile='smoothstep')
        assert record.relative_error < 1e-5
        assert record.run_id == oracle_run_id('smoothstep')
        assert record.run_id != TRANSFORM_ORACLE_ID

    @pytest.mark.parametrize('s', [Fraction(1, 4), Fraction(1, 2)])
    def test_leading_coefficient_independent_of_cutoff(self, s):
        bump = calibrate_transform_constant(s, profile='bump')
        smoothstep = calibrate_transform_constant(s, profile='smoothstep')
        assert abs(bump.numeric - smoothstep.numeric) <= 1e-6

    def test_range(self):
        with pytest.raises(InvalidInputError):
            calibrate_transform_constant(Fraction(3, 2))
        with pytest.raises(InvalidInputError):
            calibrate_transform_constant(Fraction(1, 2), taus=[1e-6, 1e-6])


class TestPredictSingularities:

    def test_two_points(self, two_points):
        predictions = predict_singularities(two_points, 2.1)
        assert len(predictions) == 1
        singularity = predictions[0]
        assert singularity.location == pytest.approx(2.0)
        assert singularity.exponent == 0
        assert singularity.log_flag
        assert singularity.coefficient == pytest.approx(-8j / 27)
        assert singularity.chain_ids == ['s0+.s0-']
        assert singularity.multiplicity == 1
        assert singularity.provenance == TRANSFORM_ORACLE_ID

    def test_orientations_and_coincident_lengths(self, triangle_graph):
        predictions = predict_singularities(triangle_graph, 6.1)
        assert [p.location for p in predictions] == pytest.approx([4.0, 6.0])

        bounces, cycle = predictions
        assert bounces.multiplicity == 3
        assert bounces.chain_ids == ['s0+.s0-', 's1+.s1-', 's2+.s2-']
        assert bounces.exponent == 0

        chain = chain_from_word(triangle_graph, (0, 2, 4))
        coefficients = [diffraction_coefficient_closed(t.circumference, t.theta_in, t.theta_out)
                        for t in chain.transitions]
        single = time_domain_singularity(assemble_symbol(chain, 2, coefficients))
        assert cycle.exponent == Fraction(1, 2)
        assert not cycle.log_flag
        assert cycle.multiplicity == 2
        assert cycle.coefficient == pytest.approx(2 * single.coefficient)

    def test_non_diffractive_surface(self, square):
        assert predict_singularities(square, 2.9) == []

    def test_geometric_chains_skipped(self, geometric_graph):
        predictions = predict_singularities(geometric_graph, 2.1)
        assert all('s0+.s1+' not in p.chain_ids for p in predictions)
        assert predictions

    def test_dimension(self, two_points):
        with pytest.raises(InvalidInputError):
            predict_singularities(two_points, 2.1, n=3)


def test_sum_coincident_keeps_orders_apart():
    common = dict(k=2, n=2, provenance='test')
    first = SingularityDescriptor(location=2.0, exponent=Fraction(0), log_flag=True, coefficient=1j,
                                  chain_ids=['a'], **common)
    second = SingularityDescriptor(location=2.0 + 1e-12, exponent=Fraction(0), log_flag=True, coefficient=2j,
                                   chain_ids=['b'], **common)
    third = SingularityDescriptor(location=2.0, exponent=Fraction(1, 2), log_flag=False, coefficient=1,
                                  chain_ids=['c'], **common)
    summed = sum_coincident([third, second, first])
    assert len(summed) == 2
    assert summed[0].coefficient == pytest.approx(3j)
    assert summed[0].chain_ids == ['a', 'b']
    assert summed[0].multiplicity == 2
    assert summed[1].chain_ids == ['c']
