import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cascade_dim.boxdim import occupied_indices
from cascade_dim.errors import DomainError, ResourceError, ShapeError
from cascade_dim.point_sets import (
    PointSetSpec,
    decreasing_gaps,
    enumerate_points,
    eventually_separates,
    parse_set,
    resolution_points,
    sp_exponent,
)


def thyrse_by_definition(alpha, k_max):
    """Binary strings 0^(k-1) 1 j, j of length floor(alpha k), read as dyadic rationals."""
    pts = {0.0}
    for k in range(1, k_max + 1):
        m = math.floor(alpha * k + 1e-9)
        for j in range(1 << m):
            word = "0" * (k - 1) + "1" + format(j, f"0{m}b") if m else "0" * (k - 1) + "1"
            pts.add(sum(int(c) * 2.0 ** -(i + 1) for i, c in enumerate(word)))
    return sorted(pts)


class TestEnumerate:
    def test_power_sequence(self):
        assert enumerate_points(PointSetSpec.power_sequence(1.0, 4)).tolist() == [0, 0.25, 1 / 3, 0.5, 1]

    def test_cantor_depth_one(self):
        assert enumerate_points(PointSetSpec.cantor(1 / 3, 1)) == pytest.approx([0, 1 / 3, 2 / 3, 1])

    @pytest.mark.parametrize("alpha,k_max", [(1.0, 2), (1.0, 6), (0.5, 9), (1.7, 5)])
    def test_thyrse_matches_definition(self, alpha, k_max):
        got = enumerate_points(PointSetSpec.thyrse(alpha, k_max))
        assert got.tolist() == thyrse_by_definition(alpha, k_max)

    def test_thyrse_level_counts(self):
        pts = enumerate_points(PointSetSpec.thyrse(1.3, 8))[1:]
        stem = np.ceil(-np.log2(pts)).astype(int)  # 0^(k-1) 1 ... lies in [2^-k, 2^-(k-1))
        for k in range(1, 9):
            assert np.count_nonzero(stem == k) == 2 ** math.floor(1.3 * k + 1e-9)

    def test_explicit_dedup(self):
        assert enumerate_points(PointSetSpec.explicit([0.5, 0.1, 0.5])).tolist() == [0.1, 0.5]

    @given(st.sampled_from(["seq", "thyrse", "cantor"]), st.floats(0.2, 2.0), st.integers(1, 8))
    def test_sorted_unit_interval(self, kind, param, cutoff):
        spec = {"seq": PointSetSpec.power_sequence(param, 10 * cutoff),
                "thyrse": PointSetSpec.thyrse(param, cutoff),
                "cantor": PointSetSpec.cantor(min(param, 0.5), cutoff)}[kind]
        pts = enumerate_points(spec)
        assert np.all(np.diff(pts) > 0)
        assert pts[0] == 0.0 and pts[-1] <= 1.0

    def test_needs_cutoff(self):
        with pytest.raises(DomainError):
            enumerate_points(PointSetSpec.power_sequence(1.0))

    @pytest.mark.parametrize("ctor", [lambda: PointSetSpec.power_sequence(0),
                                      lambda: PointSetSpec.thyrse(-1),
                                      lambda: PointSetSpec.cantor(0.6),
                                      lambda: PointSetSpec.explicit([1.5])])
    def test_domain(self, ctor):
        with pytest.raises(DomainError):
            ctor()

    def test_guard(self):
        with pytest.raises(ResourceError):
            enumerate_points(PointSetSpec.thyrse(1.0, 30))


class TestResolution:
    @pytest.mark.parametrize("spec,fine", [
        (PointSetSpec.power_sequence(1.0), PointSetSpec.power_sequence(1.0, 1 << 21)),
        (PointSetSpec.power_sequence(0.7), PointSetSpec.power_sequence(0.7, 1 << 22)),
        (PointSetSpec.thyrse(1.0), PointSetSpec.thyrse(1.0, 12)),
        (PointSetSpec.thyrse(0.6), PointSetSpec.thyrse(0.6, 15)),
    ])
    def test_same_occupancy_as_fine_truncation(self, spec, fine):
        depth = 11
        a, b = resolution_points(spec, depth), enumerate_points(fine)
        for n in range(depth + 1):
            assert np.array_equal(occupied_indices(a, n), occupied_indices(b, n))

    def test_cantor_levels(self):
        pts = resolution_points(PointSetSpec.cantor(0.25), 12)
        assert pts.size == 2 * 2**6

    def test_explicit_passthrough(self):
        spec = PointSetSpec.explicit([0.3, 0.2])
        assert resolution_points(spec, 5).tolist() == [0.2, 0.3]


class TestParse:
    @pytest.mark.parametrize("text,spec", [
        ("seq:p=1", PointSetSpec.power_sequence(1.0)),
        ("thyrse:alpha=0.5", PointSetSpec.thyrse(0.5)),
        ("cantor:ratio=0.25", PointSetSpec.cantor(0.25)),
    ])
    def test_families(self, text, spec):
        assert parse_set(text) == spec
        assert parse_set(spec.spec_string()) == spec

    def test_file(self, tmp_path):
        f = tmp_path / "pts.txt"
        f.write_text("0.5\n0.25\n\n1\n")
        assert enumerate_points(parse_set(f"file:{f}")).tolist() == [0.25, 0.5, 1.0]

    @pytest.mark.parametrize("text", ["seq:alpha=1", "dust:p=1", "seq:p=x", "file:/no/such/file"])
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            parse_set(text)


class TestSpExponent:
    def test_pure_power(self):
        n = np.arange(1, 10_001, dtype=float)
        assert sp_exponent(n**-2.0).exponent == pytest.approx(2.0, abs=1e-9)

    def test_perturbed(self):
        n = np.arange(1, 10_001, dtype=float)
        assert abs(sp_exponent(n**-1.0 * (1 + 1 / n)).exponent - 1) < 0.01

    def test_thyrse_bounds(self):
        alpha, k_max = 1.0, 14
        a = enumerate_points(PointSetSpec.thyrse(alpha, k_max))[::-1][:-1]
        est = sp_exponent(a).exponent
        k = k_max
        assert k / ((k + 1) * alpha) <= est <= (k + 1) / math.floor((k - 1) * alpha)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            sp_exponent(np.arange(20, 0, -1.0)[::-1])
        with pytest.raises(ShapeError):
            sp_exponent(np.linspace(1, 0.5, 10))


def brute_separates(a, b, n_max):
    for n in range(1, n_max):
        if not any(a[n] <= x <= a[n - 1] for x in b):
            return False
    return True


class TestSeparation:
    def test_squares_by_reciprocals(self):
        n = np.arange(1, 1001, dtype=float)
        a, b = n**-2, np.arange(1, 1_000_001, dtype=float) ** -1
        assert eventually_separates(a, b) is True
        assert brute_separates(a, b[:2000], 40)

    def test_self(self):
        a = np.arange(1, 200, dtype=float) ** -1.5
        assert eventually_separates(a, a) is True

    def test_reciprocals_by_squares(self):
        n = np.arange(1, 1001, dtype=float)
        assert eventually_separates(n**-1, n**-2, n0=10) is False

    def test_unknown_when_b_runs_out(self):
        a = np.arange(1, 1001, dtype=float) ** -2
        b = np.arange(1, 101, dtype=float) ** -1
        assert eventually_separates(a, b) is None

    @pytest.mark.parametrize("p,q", [(p, q) for p in (0.5, 1.0, 2.0)
                                     for q in (0.25, 0.5, 1.0) if q < p])
    def test_faster_sequence_is_separated(self, p, q):
        n_a = min(300, int(2e6 ** (q / p)))
        a = np.arange(1, n_a + 1, dtype=float) ** -p
        b = np.arange(1, 1 + math.ceil(n_a ** (p / q)) + 10, dtype=float) ** -q
        assert eventually_separates(a, b) is True


class TestGaps:
    def test_examples(self):
        assert decreasing_gaps(np.arange(1, 10_001, dtype=float) ** -2)
        assert not decreasing_gaps([1, 0.9, 0.5, 0.4])
        assert decreasing_gaps(np.linspace(1, 0, 11))

    def test_short(self):
        with pytest.raises(ShapeError):
            decreasing_gaps([1, 0.5])
