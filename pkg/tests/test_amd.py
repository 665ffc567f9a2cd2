"""Detection codec: tagging, verification, and the attack oracle."""

import itertools

import numpy as np
import pytest

from relaysec.amd import (
    AmdParams,
    amd_encode,
    amd_rate,
    amd_tag,
    amd_verify,
    exhaustive_attack_success,
    win_bound,
)
from relaysec.fields import ExtField

GF5 = ExtField(5, 1)


def e5(v):
    return GF5.element((v,))


def params5(d=1):
    return AmdParams(field=GF5, d=d)


def test_tag_examples():
    assert amd_tag(params5(1), (e5(2),), e5(3)) == e5(3)  # 27 + 6 = 33 = 3 mod 5
    assert amd_tag(params5(1), (e5(0),), e5(0)) == e5(0)
    assert amd_tag(params5(2), (e5(1), e5(1)), e5(2)) == e5(2)  # 16 + 2 + 4


def test_tag_wrong_length_rejected():
    with pytest.raises(ValueError):
        amd_tag(params5(2), (e5(1),), e5(0))


def test_verify_examples():
    p = params5(1)
    rng = np.random.default_rng(0)
    for _ in range(20):
        cw = amd_encode(p, (GF5.random_element(rng),), rng)
        assert amd_verify(p, cw.s, cw.x, cw.h)
    assert not amd_verify(p, (e5(3),), e5(3), e5(3))
    assert amd_verify(p, (e5(2),), e5(3), e5(3))


def test_honest_verification_never_fails_exhaustive():
    for d in (1, 2):
        p = params5(d)
        for s_vals in itertools.product(range(5), repeat=d):
            s = tuple(e5(v) for v in s_vals)
            for x_val in range(5):
                x = e5(x_val)
                assert amd_verify(p, s, x, amd_tag(p, s, x))


def test_rate_examples():
    assert amd_rate(AmdParams(field=ExtField(11, 1), d=8)) == 0.8
    assert amd_rate(params5(1)) == pytest.approx(1 / 3)
    rates = [d / (d + 2) for d in range(1, 101)]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert rates[-1] > 0.98


def test_win_bound_examples():
    assert win_bound(AmdParams(field=ExtField(5, 2), d=2)) == pytest.approx(0.12)
    assert win_bound(params5(1)) == pytest.approx(0.4)
    # decreasing in r at fixed d, q
    bounds = [win_bound(AmdParams(field=ExtField(5, r), d=2)) for r in (1, 2, 3)]
    assert bounds[0] > bounds[1] > bounds[2]


def test_hypothesis_enforced():
    with pytest.raises(ValueError):
        AmdParams(field=GF5, d=3)  # d + 2 = 5 divisible by q
    with pytest.raises(ValueError):
        AmdParams(field=ExtField(3, 1), d=1)  # d + 2 = 3 divisible by q
    with pytest.raises(ValueError):
        AmdParams(field=GF5, d=0)


def test_attack_success_example():
    p = params5(1)
    success = exhaustive_attack_success(p, (e5(0),), (e5(1),), GF5.zero(), GF5.zero())
    assert success == pytest.approx(1 / 5)  # only x = 0 satisfies x = 0


def test_attack_all_zero_perturbation_rejected():
    p = params5(1)
    with pytest.raises(ValueError):
        exhaustive_attack_success(p, (e5(1),), (e5(1),), GF5.zero(), GF5.zero())


def test_attack_success_bounded_exhaustive_small():
    """Max over every (s, s', dx, dh) stays within (d+1)/q^r at q=5, r=1, d=1."""
    p = params5(1)
    bound = win_bound(p)
    worst = 0.0
    for s_val in range(5):
        s = (e5(s_val),)
        for sp_val in range(5):
            sp = (e5(sp_val),)
            for dx_val in range(5):
                for dh_val in range(5):
                    if sp_val == s_val and dx_val == 0 and dh_val == 0:
                        continue
                    succ = exhaustive_attack_success(
                        p, s, sp, e5(dx_val), e5(dh_val)
                    )
                    worst = max(worst, succ)
                    # detection probability is the complement, per tuple
                    assert succ + (1 - succ) == pytest.approx(1.0)
    assert worst <= bound + 1e-12
