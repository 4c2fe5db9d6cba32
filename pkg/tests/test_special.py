import math
from fractions import Fraction

import numpy as np
import pytest

from zetagram.special import (
    DomainError,
    EvalConfig,
    PoleError,
    ZetaSample,
    delta,
    delta_critical,
    hardy_z,
    log_delta,
    log_gamma,
    rs_psi,
    theta,
    theta_deriv,
    zeta_critical,
    zeta_euler_maclaurin,
)

TWO_PI = 2.0 * math.pi


# ----------------------------------------------------------------------
# independent oracles
# ----------------------------------------------------------------------

def _bernoulli(m: int) -> Fraction:
    row = [Fraction(0)] * (m + 1)
    for j in range(m + 1):
        row[j] = Fraction(1, j + 1)
        for i in range(j, 0, -1):
            row[i - 1] = i * (row[i - 1] - row[i])
    return row[0]


def stirling_log_gamma(s: complex, terms: int = 12, min_mod: float = 24.0) -> complex:
    """Oracle: Stirling series with >= 10 Bernoulli terms plus upward
    recursion, written independently of the library implementation."""
    s = complex(s)
    acc = 0.0 + 0.0j
    while abs(s) < min_mod:
        acc -= np.log(s)
        s = s + 1.0
    out = (s - 0.5) * np.log(s) - s + 0.5 * math.log(TWO_PI)
    for k in range(1, terms + 1):
        b2k = float(_bernoulli(2 * k))
        out += b2k / ((2 * k) * (2 * k - 1) * s ** (2 * k - 1))
    return complex(out + acc)


def theta_oracle(t: float) -> float:
    return (stirling_log_gamma(0.25 + 0.5j * t)).imag - 0.5 * t * math.log(math.pi)


# ----------------------------------------------------------------------
# log_gamma
# ----------------------------------------------------------------------

def test_log_gamma_at_one_and_half():
    assert abs(log_gamma(1.0)) < 1e-14
    assert abs(log_gamma(0.5) - math.log(math.pi) / 2) < 1e-14


def test_log_gamma_matches_stirling_oracle():
    s = 0.25 + 7.0671j  # 1/4 + i*14.1347/2
    assert abs(log_gamma(s) - stirling_log_gamma(s)) < 1e-10


def test_log_gamma_recurrence():
    s = 0.25 + 7.0671j
    assert abs(log_gamma(s + 1) - log_gamma(s) - np.log(complex(s))) < 1e-12


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(0.0)
    with pytest.raises(PoleError):
        log_gamma(-3.0)


# ----------------------------------------------------------------------
# theta and its derivative
# ----------------------------------------------------------------------

def test_theta_zero_at_origin():
    assert theta(0.0) == 0.0


def test_theta_global_minimum_region():
    # theta(2 pi) = -3.530971..., the bottom of the decreasing branch
    val = theta(TWO_PI)
    assert abs(val - theta_oracle(TWO_PI)) < 1e-9
    assert abs(val + 3.5310) < 2e-3


def test_theta_vanishes_at_first_gram_point():
    assert abs(theta(17.8455995405)) < 1e-9


def test_theta_negative_raises():
    with pytest.raises(DomainError):
        theta(-1.0)


def test_theta_branch_overlap():
    # log-Gamma branch vs Stirling branch around the switch at t = 30
    for t in np.linspace(25.0, 35.0, 21):
        assert abs(theta(t) - theta_oracle(t)) < 1e-10


def test_theta_strictly_increasing_above_ten():
    rng = np.random.default_rng(5)
    grid = np.sort(rng.uniform(10.0, 1e5, 1000))
    vals = theta(grid)
    assert np.all(np.diff(vals) > 0.0)


def test_theta_deriv_values():
    assert abs(theta_deriv(TWO_PI)) <= 1e-3
    assert abs(theta_deriv(TWO_PI * math.e) - 0.5) <= 1e-3


def test_theta_deriv_central_difference():
    t, h = 100.0, 1e-4
    fd = (theta(t + h) - theta(t - h)) / (2 * h)
    assert abs(theta_deriv(t) - fd) <= 1e-6


def test_theta_deriv_domain():
    with pytest.raises(DomainError):
        theta_deriv(0.5)


# ----------------------------------------------------------------------
# the functional-equation factor
# ----------------------------------------------------------------------

def test_delta_product_form_equivalence():
    # the log-space form must equal 2^s pi^{s-1} Gamma(1-s) sin(pi s/2)
    from scipy.special import gamma as sc_gamma
    for s in (0.3 + 5j, -0.7 + 2.2j, 0.5 + 11j, 1.4 - 3j):
        direct = 2.0 ** s * math.pi ** (s - 1) * sc_gamma(1 - s) * np.sin(math.pi * s / 2)
        assert abs(delta(s) - direct) <= 1e-12 * abs(direct)


def test_delta_reflection_identity():
    s = 0.3 + 5j
    assert abs(delta(s) * delta(1 - s) - 1.0) <= 1e-10


def test_delta_unimodular_on_line():
    assert abs(abs(delta(0.5 + 50j)) - 1.0) <= 1e-10


def test_delta_argument_is_minus_two_theta():
    t = 30.0
    want = np.exp(-2j * theta(t))
    assert abs(delta(0.5 + 1j * t) - want) <= 1e-8


def test_delta_reflection_on_random_box():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 20:
        s = complex(rng.uniform(-2, 3), rng.uniform(-50, 50))
        if abs(s.imag) < 0.3:
            continue  # stay clear of the real-axis poles/zeros
        assert abs(delta(s) * delta(1 - s) - 1.0) <= 1e-9
        checked += 1


def test_delta_unimodular_randomized():
    rng = np.random.default_rng(23)
    ts = rng.uniform(1.0, 1e5, 1000)
    assert np.max(np.abs(np.abs(delta_critical(ts)) - 1.0)) <= 1e-9


def test_delta_pole_and_zero():
    with pytest.raises(PoleError):
        delta(1.0)
    with pytest.raises(PoleError):
        delta(3.0)
    assert delta(0.0) == 0.0
    assert delta(-2.0) == 0.0
    with pytest.raises(PoleError):
        log_delta(0.0)


# ----------------------------------------------------------------------
# Euler-Maclaurin zeta
# ----------------------------------------------------------------------

def test_zeta_em_basel():
    assert abs(zeta_euler_maclaurin(2.0 + 0j) - math.pi ** 2 / 6) <= 1e-10


def test_zeta_em_half_self_consistency():
    # doubled truncation/terms as the oracle
    loose = zeta_euler_maclaurin(0.5 + 0j, EvalConfig(em_terms=8, abs_tol=1e-9))
    tight = zeta_euler_maclaurin(0.5 + 0j, EvalConfig(em_terms=16, abs_tol=1e-14))
    assert abs(loose - tight) <= 1e-9
    assert abs(tight - (-1.4603545088)) <= 1e-9


def test_zeta_em_first_zero():
    val = zeta_euler_maclaurin(0.5 + 14.134725142j)
    assert abs(val) <= 1e-6
    # the zero is bracketed by a sign change of Z
    assert hardy_z(14.10) * hardy_z(14.17) < 0.0


def test_zeta_em_pole():
    with pytest.raises(PoleError):
        zeta_euler_maclaurin(1.0 + 0j)


def test_zeta_em_laurent_leading_behavior():
    h = 1e-3
    gamma = 0.5772156649015329
    assert abs(zeta_euler_maclaurin(1.0 + h + 0j) - 1.0 / h - gamma) <= 1e-3


def test_functional_equation_closure():
    rng = np.random.default_rng(29)
    pts = [0.3 + 20j]
    while len(pts) < 21:
        s = complex(rng.uniform(-1.0, 2.0), rng.uniform(5.0, 60.0))
        pts.append(s)
    for s in pts:
        lhs = zeta_euler_maclaurin(s)
        rhs = delta(s) * zeta_euler_maclaurin(1 - s)
        assert abs(lhs - rhs) <= 1e-8


# ----------------------------------------------------------------------
# Hardy Z
# ----------------------------------------------------------------------

def test_hardy_z_at_first_zero():
    assert abs(hardy_z(14.134725142)) <= 1e-5


def test_hardy_z_positive_at_first_gram_point():
    val = hardy_z(17.8455995405)
    assert val > 0.0
    em = (np.exp(1j * theta(17.8455995405))
          * zeta_euler_maclaurin(0.5 + 17.8455995405j)).real
    assert abs(val - em) <= 1e-9


def test_hardy_z_cross_validation_at_100():
    em = (np.exp(1j * theta(100.0)) * zeta_euler_maclaurin(0.5 + 100j)).real
    assert abs(hardy_z(100.0) - em) <= 1e-6


def test_hardy_z_cross_validation_grid():
    rng = np.random.default_rng(41)
    ts = rng.uniform(50.0, 500.0, 100)
    zs = hardy_z(ts)
    for t, z in zip(ts, zs):
        em = (np.exp(1j * theta(t)) * zeta_euler_maclaurin(0.5 + 1j * t)).real
        assert abs(z - em) <= 1e-6


def test_hardy_z_near_main_sum_breakpoints():
    # fractional part of sqrt(t/2pi) close to 0 and to 1
    for k in range(2, 9):
        for eps in (1e-4, 0.9995):
            t = TWO_PI * (k + eps) ** 2
            em = (np.exp(1j * theta(t)) * zeta_euler_maclaurin(0.5 + 1j * t)).real
            assert abs(float(hardy_z(t)) - em) <= 1e-9


def test_hardy_z_low_t_routes_through_em():
    for t in (0.0, 3.5, 9.9):
        em = (np.exp(1j * theta(t)) * zeta_euler_maclaurin(0.5 + 1j * t)).real
        assert abs(float(hardy_z(t)) - em) <= 1e-12


def test_hardy_z_negative_raises():
    with pytest.raises(DomainError):
        hardy_z(-1.0)


def test_rs_psi_series_matches_direct_formula():
    ps = np.linspace(0.01, 0.99, 37)
    direct = np.cos(2 * math.pi * (ps * ps - ps - 1.0 / 16.0)) / np.cos(2 * math.pi * ps)
    series = rs_psi(ps)
    # exclude the removable singularities of the direct formula
    ok = np.abs(np.cos(2 * math.pi * ps)) > 1e-2
    assert np.max(np.abs(series[ok] - direct[ok])) < 1e-11


def test_rs_psi_removable_points_are_finite():
    for p in (0.25, 0.75):
        left = rs_psi(p - 1e-5)
        mid = rs_psi(p)
        right = rs_psi(p + 1e-5)
        assert np.isfinite(mid)
        assert abs(mid - 0.5 * (left + right)) < 1e-6


def test_series_remainder_orders():
    """The asymptotic mode: the C0-only error is reproduced by the C1
    term -Psi'''(p) tau^{-1/2} / (96 pi^2), and including it shrinks the
    error by an order of magnitude."""
    cfg0 = EvalConfig(rs_remainder="series", rs_correction_order=0)
    cfg1 = EvalConfig(rs_remainder="series", rs_correction_order=1)
    err0s, err1s = [], []
    for t in np.linspace(3e4, 9e4, 25):
        exact = float(hardy_z(t))
        z0 = float(hardy_z(t, cfg0))
        z1 = float(hardy_z(t, cfg1))
        tau = t / TWO_PI
        a = math.sqrt(tau)
        n = math.floor(a)
        p = a - n
        sgn = (-1.0) ** (n - 1)
        c1_pred = -sgn * tau ** (-0.75) * rs_psi(p, deriv=3) / (96 * math.pi ** 2)
        if abs(c1_pred) > 1e-6:
            # C0-only error is dominated by the C1 term
            assert abs((exact - z0) - c1_pred) < 0.35 * abs(c1_pred)
        err0s.append(abs(exact - z0))
        err1s.append(abs(exact - z1))
    assert np.mean(err1s) < 0.1 * np.mean(err0s)
    assert max(err1s) < 1e-6


# ----------------------------------------------------------------------
# zeta_critical samples
# ----------------------------------------------------------------------

def test_zeta_critical_at_origin():
    sample = zeta_critical(0.0)
    assert abs(sample.zeta - (-1.4603545088)) <= 1e-8
    assert abs(sample.zeta.imag) <= 1e-12


def test_zeta_critical_invariants():
    for t in (0.0, 55.5, 1000.0):
        s = zeta_critical(t)
        assert abs(abs(s.zeta) - abs(s.z)) <= 1e-9 * max(1.0, abs(s.z))
        assert abs(s.zeta.real - math.cos(s.theta) * s.z) <= 1e-9
        assert abs(s.zeta.imag + math.sin(s.theta) * s.z) <= 1e-9


def test_zeta_critical_negative_raises():
    with pytest.raises(DomainError):
        zeta_critical(-0.5)


def test_zeta_sample_rejects_non_finite():
    with pytest.raises(DomainError):
        ZetaSample(t=1.0, theta=float("nan"), z=0.0, zeta=0j)


def test_eval_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        EvalConfig(rs_correction_order=5)
    with pytest.raises(ValueError):
        EvalConfig(rs_remainder="magic")
