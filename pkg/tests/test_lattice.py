"""Nested lattice geometry, coordinates, and the sum representation."""

import math

import numpy as np
import pytest

from relaysec.lattice import (
    NestedLatticePair,
    average_codebook_power,
    codebook_point,
    codebook_rate,
    coords_to_field,
    decode_fine_mod_coarse,
    enumerate_coords,
    in_fundamental_region,
    index_to_coords,
    lattice_add,
    mod_coarse,
    quantize_coarse,
    rate_condition_ok,
    reconstruct_sum,
    represent_sum,
)


def v(*vals):
    return np.array(vals, dtype=float)


# ---------------------------------------------------------------------
# quantize / mod
# ---------------------------------------------------------------------


def test_quantize_examples():
    pair = NestedLatticePair(N=1, q=5)
    assert quantize_coarse(pair, v(7.0))[0] == 5.0
    assert quantize_coarse(pair, v(0.0))[0] == 0.0
    assert quantize_coarse(pair, v(12.0))[0] == 10.0
    # shift property: quantizing x + z for coarse z shifts the result by z
    assert quantize_coarse(pair, v(12.0))[0] == quantize_coarse(pair, v(7.0))[0] + 5.0


def test_mod_examples():
    pair = NestedLatticePair(N=1, q=5)
    assert mod_coarse(pair, v(7.0))[0] == 2.0
    assert mod_coarse(pair, v(-1.0))[0] == -1.0
    assert mod_coarse(pair, v(-1.0 + 5.0))[0] == -1.0


def test_mod_lands_in_half_open_region_including_ties():
    pair = NestedLatticePair(N=1, q=5)
    # boundary: residue of +L/2 must be the negative endpoint
    assert mod_coarse(pair, v(2.5))[0] == -2.5
    assert mod_coarse(pair, v(-2.5))[0] == -2.5
    for x in np.linspace(-12, 12, 241):
        assert in_fundamental_region(pair, mod_coarse(pair, v(x)))


def test_mod_idempotent_and_periodic_randomized():
    rng = np.random.default_rng(5)
    pair = NestedLatticePair(N=3, q=3, alpha=0.5)
    step = pair.coarse_step
    for _ in range(1000):
        x = rng.uniform(-20, 20, size=3)
        m = mod_coarse(pair, x)
        assert np.array_equal(mod_coarse(pair, m), m)
        z = rng.integers(-4, 5, size=3) * step
        assert np.allclose(mod_coarse(pair, x + z), m, rtol=0, atol=1e-9)


def test_quantize_shift_property_randomized():
    rng = np.random.default_rng(6)
    pair = NestedLatticePair(N=2, q=5, alpha=1.25)
    step = pair.coarse_step
    for _ in range(1000):
        x = rng.uniform(-30, 30, size=2)
        z = rng.integers(-3, 4, size=2) * step
        assert np.allclose(
            quantize_coarse(pair, x + z), quantize_coarse(pair, x) + z,
            rtol=0, atol=1e-9,
        )


# ---------------------------------------------------------------------
# codebook points and coordinates
# ---------------------------------------------------------------------


def test_codebook_point_examples():
    pair = NestedLatticePair(N=1, q=3)
    assert codebook_point(pair, [2])[0] == -1.0
    assert codebook_point(pair, [0])[0] == 0.0
    dithered = NestedLatticePair(N=1, q=3, d1=(0.5,))
    assert codebook_point(dithered, [2], dither=1)[0] == -0.5


def test_codebook_points_distinct():
    pair = NestedLatticePair(N=2, q=5, d1=(0.25, -0.75))
    points = {tuple(codebook_point(pair, c, dither=1)) for c in enumerate_coords(pair)}
    assert len(points) == 25


def test_coords_to_field_examples():
    pair = NestedLatticePair(N=1, q=3)
    assert coords_to_field(pair, [2])[0] == 2
    assert coords_to_field(pair, [0])[0] == 0
    pair2 = NestedLatticePair(N=2, q=5)
    assert list(coords_to_field(pair2, [7 % 5, 3])) == [2, 3]


def test_lattice_add_examples():
    p3 = NestedLatticePair(N=1, q=3)
    assert lattice_add(p3, [1], [1])[0] == 2
    assert codebook_point(p3, lattice_add(p3, [1], [1]))[0] == -1.0
    assert np.array_equal(lattice_add(p3, [2], [0]), [2])
    p5 = NestedLatticePair(N=1, q=5)
    assert lattice_add(p5, [3], [4])[0] == 2


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_isomorphism_bijective_and_additive(q, n):
    """Geometric addition of codebook points matches the field image."""
    pair = NestedLatticePair(N=n, q=q)
    coords = list(enumerate_coords(pair))
    images = {tuple(coords_to_field(pair, c)) for c in coords}
    assert len(images) == q**n
    for a in coords:
        pa = codebook_point(pair, a)
        for b in coords:
            s = mod_coarse(pair, pa + codebook_point(pair, b))
            got = decode_fine_mod_coarse(pair, s)
            assert np.array_equal(
                coords_to_field(pair, got),
                (coords_to_field(pair, a) + coords_to_field(pair, b)) % q,
            )


# ---------------------------------------------------------------------
# sum representation
# ---------------------------------------------------------------------


def test_represent_sum_examples():
    p5 = NestedLatticePair(N=1, q=5)
    rep = represent_sum(p5, v(2.0), v(2.0))
    assert rep.sum_mod == (-1.0,) and rep.T == 2
    rep0 = represent_sum(p5, v(0.0), v(0.0))
    assert rep0.sum_mod == (0.0,) and rep0.T == 1
    p52 = NestedLatticePair(N=2, q=5)
    rep2 = represent_sum(p52, v(2.0, 0.0), v(2.0, 0.0))
    assert rep2.sum_mod == (-1.0, 0.0) and rep2.T == 2  # bit 0 least significant


def test_represent_sum_rejects_out_of_region():
    p5 = NestedLatticePair(N=1, q=5)
    with pytest.raises(ValueError):
        represent_sum(p5, v(3.0), v(0.0))


def test_reconstruct_examples():
    p5 = NestedLatticePair(N=1, q=5)
    from relaysec.lattice import SumRepresentation

    assert reconstruct_sum(p5, SumRepresentation((-1.0,), 2))[0] == 4.0
    assert reconstruct_sum(p5, SumRepresentation((0.0,), 1))[0] == 0.0


@pytest.mark.parametrize("q,n", [(5, 1), (5, 2), (2, 1), (2, 2), (2, 3)])
def test_sum_representation_round_trip_exhaustive(q, n):
    pair = NestedLatticePair(N=n, q=q)
    points = [codebook_point(pair, c) for c in enumerate_coords(pair)]
    for u1 in points:
        for u2 in points:
            rep = represent_sum(pair, u1, u2)
            assert 1 <= rep.T <= 2**n
            assert np.array_equal(reconstruct_sum(pair, rep), u1 + u2)


# ---------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------


def test_decode_examples():
    pair = NestedLatticePair(N=1, q=5)
    assert decode_fine_mod_coarse(pair, v(2.2))[0] == 2
    assert decode_fine_mod_coarse(pair, v(2.6))[0] == 3


def test_decode_round_trip_exhaustive_q5():
    for n in (1, 2, 3):
        pair = NestedLatticePair(N=n, q=5, d1=(0.3,) * n)
        for c in enumerate_coords(pair):
            y = codebook_point(pair, c, dither=1)
            assert np.array_equal(
                decode_fine_mod_coarse(pair, y, pair.dither(1)), c
            )


def test_noiseless_aggregate_decode_matches_lattice_add():
    pair = NestedLatticePair(N=2, q=5)
    for a in enumerate_coords(pair):
        for b in enumerate_coords(pair):
            agg = codebook_point(pair, a) + codebook_point(pair, b)
            got = decode_fine_mod_coarse(pair, mod_coarse(pair, agg))
            assert np.array_equal(got, lattice_add(pair, a, b))


# ---------------------------------------------------------------------
# rates and power
# ---------------------------------------------------------------------


def test_codebook_rate_examples():
    assert math.isclose(codebook_rate(NestedLatticePair(N=1, q=5)), 2.321928, abs_tol=1e-4)
    assert codebook_rate(NestedLatticePair(N=3, q=2)) == 1.0
    assert math.isclose(codebook_rate(NestedLatticePair(N=1, q=11)), 3.459432, abs_tol=1e-4)


def test_rate_condition_examples():
    assert rate_condition_ok(NestedLatticePair(N=1, q=2), 7.5) is True
    assert rate_condition_ok(NestedLatticePair(N=1, q=5), 7.5) is False
    # exactly at the threshold the strict inequality fails
    pair = NestedLatticePair(N=1, q=2)
    p_threshold = 2.0 ** (2 * codebook_rate(pair)) - 0.5  # 0.5 + P == 2^(2 R0)
    assert rate_condition_ok(pair, p_threshold) is False


def test_average_power_examples():
    assert math.isclose(
        average_codebook_power(NestedLatticePair(N=1, q=3)), 2.0 / 3.0, rel_tol=1e-12
    )
    assert math.isclose(
        average_codebook_power(NestedLatticePair(N=1, q=5)), 2.0, rel_tol=1e-12
    )


def test_average_power_scales_with_alpha_squared():
    base = average_codebook_power(NestedLatticePair(N=2, q=5))
    for a in (0.5, 0.1, 1e-3, 1e-6):
        scaled = average_codebook_power(NestedLatticePair(N=2, q=5, alpha=a))
        assert math.isclose(scaled, a * a * base, rel_tol=1e-9)
    assert average_codebook_power(NestedLatticePair(N=2, q=5, alpha=1e-9)) < 1e-12


def test_average_power_matches_full_enumeration():
    pair = NestedLatticePair(N=2, q=5, alpha=0.8, d1=(0.3, -0.5))
    total = 0.0
    for c in enumerate_coords(pair):
        p = codebook_point(pair, c, dither=1)
        total += float(np.dot(p, p)) / pair.N
    assert math.isclose(average_codebook_power(pair, 1), total / 25, rel_tol=1e-12)


def test_pair_validation():
    with pytest.raises(ValueError):
        NestedLatticePair(N=1, q=4)  # composite nesting ratio
    with pytest.raises(ValueError):
        NestedLatticePair(N=1, q=1)
    with pytest.raises(ValueError):
        NestedLatticePair(N=1, q=3, alpha=0.0)
    with pytest.raises(ValueError):
        NestedLatticePair(N=1, q=3, d1=(5.0,))  # dither outside the region


def test_index_coords_round_trip():
    pair = NestedLatticePair(N=3, q=3)
    for k in range(27):
        c = index_to_coords(pair, k)
        back = 0
        for digit in reversed(c):
            back = back * 3 + int(digit)
        assert back == k


def test_represent_sum_boundary_endpoint():
    # the negative cell endpoint belongs to the region and round-trips
    pair = NestedLatticePair(N=1, q=3)  # region [-1.5, 1.5)
    u = v(-1.5)
    assert in_fundamental_region(pair, u)
    rep = represent_sum(pair, u, u)  # real sum -3.0 wraps
    assert rep.T == 2
    assert reconstruct_sum(pair, rep)[0] == -3.0


def test_alpha_for_power_targets():
    from relaysec.lattice import alpha_for_power

    assert alpha_for_power(5, 2.0) == pytest.approx(1.0)
    for q, target in [(3, 0.5), (5, 7.0), (11, 1.0)]:
        a = alpha_for_power(q, target)
        got = average_codebook_power(NestedLatticePair(N=1, q=q, alpha=a))
        assert got == pytest.approx(target, rel=1e-12)


def test_dither_accessor_rejects_bad_index():
    pair = NestedLatticePair(N=1, q=3)
    with pytest.raises(ValueError):
        pair.dither(4)
