"""Transfer spectra, pressure, Bowen roots, entropy, partition sums."""

import math

import numpy as np
import pytest

from hypifs.ifs import IfsFamily, affine_map, bernoulli_psi
from hypifs.thermo import (CylinderMeasure, bowen_root,
                           constant_bernoulli_potential, entropy,
                           gibbs_cylinder_measure, log_probability_potential,
                           lyapunov_dimension, lyapunov_exponent,
                           partition_sum, pressure, pressure_drop_check,
                           t_log_derivative_potential, transfer_spectrum,
                           truncate_potential)
from hypifs.words import enumerate_words


@pytest.fixture
def dyadic():
    return IfsFamily((affine_map(0.5, 0.0), affine_map(0.5, 0.5)),
                     (0.0, 1.0), (0.0, 1e-9))


@pytest.fixture
def cantor():
    return IfsFamily((affine_map(1 / 3, 0.0), affine_map(1 / 3, 2 / 3)),
                     (0.0, 1.0), (0.0, 1e-9))


def test_constant_potential_validation():
    with pytest.raises(ValueError):
        constant_bernoulli_potential([0.3, 0.6])
    with pytest.raises(ValueError):
        constant_bernoulli_potential([1.2, -0.2])


def test_truncation_bound_decays(dyadic):
    pot = t_log_derivative_potential(1.0)
    _, b5 = truncate_potential(pot, dyadic, 0.0, 5)
    _, b8 = truncate_potential(pot, dyadic, 0.0, 8)
    assert 0 <= b8 <= b5


def test_spectrum_constant_bernoulli_closed_form(dyadic):
    pot = constant_bernoulli_potential([0.3, 0.7])
    spec = transfer_spectrum(dyadic, pot, 0.0, 5)
    words = enumerate_words(2, 5)
    prod = np.prod(np.where(words == 1, 0.3, 0.7), axis=1)
    assert spec.gamma == pytest.approx(1.0, abs=1e-12)
    assert np.abs(spec.h - 1.0).max() < 1e-12
    assert np.abs(spec.nu - prod).max() < 1e-12


def test_spectrum_normalization(dyadic):
    pot = t_log_derivative_potential(0.7)
    spec = transfer_spectrum(dyadic, pot, 0.0, 6)
    assert spec.nu.sum() == pytest.approx(1.0, abs=1e-12)
    assert float(spec.h @ spec.nu) == pytest.approx(1.0, abs=1e-12)
    assert spec.residual_right < 1e-8 and spec.residual_left < 1e-8


def test_pressure_homogeneous_closed_form(dyadic):
    # P(t) = log(m) + t log(gamma) for equicontractive affine families
    for t in (0.0, 0.5, 1.3):
        p, _ = pressure(dyadic, t, 0.0, "transfer", r=6)
        assert p == pytest.approx(math.log(2) - t * math.log(2), abs=1e-10)


def test_pressure_partition_bracket(cantor):
    mid, bracket = pressure(cantor, 0.8, 0.0, "partition-sum", n=7)
    exact = math.log(2) - 0.8 * math.log(3)
    assert bracket[0] - 1e-12 <= exact <= bracket[1] + 1e-12
    assert mid == pytest.approx(exact, abs=1e-9)


def test_gibbs_measure_consistency(dyadic):
    pot = constant_bernoulli_potential([0.4, 0.6])
    spec = transfer_spectrum(dyadic, pot, 0.0, 6)
    mu = gibbs_cylinder_measure(spec)
    assert mu.total_mass == pytest.approx(1.0, abs=1e-12)
    coarse = mu.coarsen(1)
    assert coarse.weights == pytest.approx([0.4, 0.6], abs=1e-10)


def test_coarsen_range_check(dyadic):
    mu = CylinderMeasure(3, 2, np.full(8, 1 / 8))
    with pytest.raises(ValueError):
        mu.coarsen(4)


def test_entropy_and_lyapunov_bernoulli(dyadic):
    pot = constant_bernoulli_potential([0.3, 0.7])
    spec = transfer_spectrum(dyadic, pot, 0.0, 8)
    h, shannon = entropy(spec, pot, dyadic, 0.0)
    expect = -(0.3 * math.log(0.3) + 0.7 * math.log(0.7))
    assert h == pytest.approx(expect, abs=1e-10)
    assert shannon == pytest.approx(expect, rel=0.2)
    chi = lyapunov_exponent(dyadic, 0.0, gibbs_cylinder_measure(spec))
    assert chi == pytest.approx(math.log(2), abs=1e-10)
    clipped, raw = lyapunov_dimension(h, chi)
    assert raw == pytest.approx(expect / math.log(2), abs=1e-9)
    assert clipped == raw
    assert lyapunov_dimension(1.0, 0.5) == (1.0, 2.0)


def test_bowen_root_exact(dyadic, cantor):
    assert bowen_root(dyadic, 0.0)["s"] == pytest.approx(1.0, abs=1e-8)
    assert bowen_root(cantor, 0.0)["s"] == pytest.approx(
        math.log(2) / math.log(3), abs=1e-8)


def test_bowen_root_bracket_contains_zero(cantor):
    res = bowen_root(cantor, 0.0)
    lo, hi = res["partition_bracket"]
    assert lo - 1e-9 <= 0.0 <= hi + 1e-9


def test_partition_sum_modes(cantor):
    z_inf = partition_sum(cantor, [1, 2], 1.0, 0.0, 4, "inf")
    z_sup = partition_sum(cantor, [1, 2], 1.0, 0.0, 4, "sup")
    assert z_inf == pytest.approx(z_sup)  # affine: derivative is constant
    assert z_inf == pytest.approx((2 / 3) ** 4)
    with pytest.raises(ValueError):
        partition_sum(cantor, [1, 2], 1.0, 0.0, 4, "mid")


def test_pressure_drop_homogeneous_equality(dyadic):
    for t in (0.5, 1.0):
        res = pressure_drop_check(dyadic, t, 0.0, 5)
        assert res["holds"]
        assert res["Z_A"] == pytest.approx(res["rhs"], rel=1e-12)


def test_pressure_drop_strict():
    fam = IfsFamily((affine_map(0.5, 0.0), affine_map(1 / 3, 2 / 3)),
                    (0.0, 1.0), (0.0, 1e-9))
    res = pressure_drop_check(fam, 1.0, 0.0, 5)
    assert res["holds"]
    assert res["Z_A"] > res["rhs"]


def test_place_dependent_potential_audit():
    fam = IfsFamily((bernoulli_psi(0), bernoulli_psi(1)),
                    (-1.0, 1.0), (0.5, 0.66))
    bad = log_probability_potential(
        [lambda lam, x: 0.5 + 0.6 * np.asarray(x, dtype=float),
         lambda lam, x: 0.5 - 0.6 * np.asarray(x, dtype=float)])
    from hypifs.ifs import AuditFailure
    with pytest.raises(AuditFailure):
        transfer_spectrum(fam, bad, 0.6, 4)
