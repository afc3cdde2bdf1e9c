import math
from fractions import Fraction

import numpy as np
import pytest

import refsob


def test_hestenes_k1():
    assert refsob.hestenes_coeffs(1) == [Fraction(-3), Fraction(4)]


def test_hestenes_moments_exact():
    for k in range(7):
        lam = refsob.hestenes_coeffs(k)
        for a in range(k + 1):
            assert sum(l * Fraction(-1, j + 1) ** a for j, l in enumerate(lam)) == 1


def test_cap():
    with pytest.raises(refsob.CapExceeded):
        refsob.hestenes_coeffs(13)


def test_phi_values_and_class_m():
    r = np.array([1e3, 1e9])
    assert np.allclose(refsob.phi("log[1]", r), np.log(r))
    assert refsob.check_class_m("log[1]")["verdict"] == "slowly_varying"


def test_psi_index():
    v = refsob.psi_verdict(0, 1, 2, "log[1]")
    assert v["decision"] == "accepted"
    assert abs(v["index"] - 0.5) <= 0.01
    assert refsob.power_verdict(1.5)["decision"] == "rejected"


def test_single_mode_norm():
    n, k = 32, 3
    x = np.linspace(0, 2 * math.pi, n, endpoint=False)
    w = np.exp(1j * k * x)
    expected = math.sqrt(2 * math.pi) * (1 + k * k) ** 0.75
    got = refsob.norm_refined(w, [0, 2 * math.pi], 1.5, guard=1.0)
    assert got == pytest.approx(expected, rel=1e-12)


def test_parabolicity():
    heat = refsob.check_parabolicity("heat")
    assert heat["sigma0"] == 2
    assert all(heat[c]["pass"] for c in ("cond_i", "cond_ii", "cond_iii"))
    assert not refsob.check_parabolicity("backward-heat")["cond_i"]["pass"]


def test_probe_refuses_backward_heat():
    with pytest.raises(refsob.FailedPrecondition):
        refsob.probe("backward-heat", sizes=(8, 16))


def test_suite_deterministic():
    a = refsob.run_suite("prop44", 7)
    b = refsob.run_suite("prop44", 7)
    assert a[0] and a == b
    assert "all" in refsob.suite_names()
