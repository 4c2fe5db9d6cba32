"""Discrete moment engines over the Gram points t_n(phi) and their
predicted main terms: the mean values S1/S2 of Dirichlet polynomials,
the cubic moment with its explicit polynomial main term, the rational
lower-bound pipeline, and the signed odd moments / maxima scans.

Every sum runs in fixed index order with exactly rounded (fsum)
reductions, so reports are bit-identical across runs and worker counts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import divisor, grampoints
from .grampoints import Angle, bulk_hardy_z, enumerate_points, solve_gram
from .special import DEFAULT_CONFIG, DomainError, EvalConfig
from .summation import blocked_fsum, fsum

__all__ = [
    "DirichletPolynomial",
    "MomentReport",
    "RationalExponent",
    "PreconditionError",
    "GramSweep",
    "moment_abs_2k",
    "moment_cubed",
    "compute_S1",
    "compute_S2",
    "theorem1_pipeline",
    "Theorem1Report",
    "signed_odd_moment",
    "max_scan",
    "MaxScanResult",
]

TWO_PI = 2.0 * math.pi
REL_EPS = 1e-300


class PreconditionError(ValueError):
    """A stated precondition (polynomial length vs height) is violated."""


@dataclass(frozen=True)
class DirichletPolynomial:
    """Finite sum X(s) = sum_{n <= limit} x_n n^{-s}."""

    coefficients: dict
    limit: int

    def __post_init__(self):
        for n in self.coefficients:
            if not 1 <= n <= self.limit:
                raise ValueError(f"coefficient index {n} outside [1, {self.limit}]")

    @classmethod
    def from_values(cls, values) -> "DirichletPolynomial":
        seq = list(values)
        coeff = {n: complex(v) for n, v in enumerate(seq, start=1) if v != 0}
        return cls(coefficients=coeff, limit=max(len(seq), 1))

    @property
    def x0(self) -> float:
        """max |x_n|"""
        return max((abs(v) for v in self.coefficients.values()), default=0.0)

    @property
    def x1(self) -> float:
        """sum |x_n| / n"""
        return fsum([abs(v) / n for n, v in self.coefficients.items()])

    def _arrays(self):
        ns = np.array(sorted(self.coefficients), dtype=float)
        cs = np.array([self.coefficients[int(n)] for n in ns], dtype=complex)
        return ns, cs

    def evaluate_half_line(self, t: np.ndarray, conj_arg: bool = False) -> np.ndarray:
        """X(1/2 + it), or X(1/2 - it) when conj_arg (no coefficient
        conjugation: exactly the polynomial at the reflected argument)."""
        ns, cs = self._arrays()
        if not ns.size:
            return np.zeros(np.asarray(t).shape, dtype=complex)
        sgn = 1.0 if conj_arg else -1.0
        t = np.asarray(t, dtype=float)
        phases = np.exp(sgn * 1j * np.outer(t, np.log(ns)))
        return phases @ (cs / np.sqrt(ns))


@dataclass(frozen=True)
class RationalExponent:
    """k = p/q >= 1 in lowest terms; kappa = 1/q, r = p - q."""

    p: int
    q: int

    def __post_init__(self):
        if not (self.p >= self.q >= 1):
            raise ValueError("need p >= q >= 1")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p/q must be in lowest terms")

    @property
    def k(self) -> float:
        return self.p / self.q

    @property
    def kappa(self) -> float:
        return 1.0 / self.q

    @property
    def r(self) -> int:
        return self.p - self.q


@dataclass
class MomentReport:
    phi: float
    t_max: float
    kind: str  # abs2k | cubed | S1 | S2 | signed_odd | certificate
    parameter: float
    computed: complex
    predicted: complex
    abs_error: float
    rel_error: float
    n_points: int
    eval_seconds: float = 0.0

    @classmethod
    def build(cls, phi, t_max, kind, parameter, computed, predicted,
              n_points, eval_seconds=0.0) -> "MomentReport":
        computed = complex(computed)
        predicted = complex(predicted)
        abs_err = abs(computed - predicted)
        rel_err = abs_err / max(abs(predicted), REL_EPS)
        return cls(phi=float(phi), t_max=float(t_max), kind=kind,
                   parameter=float(parameter), computed=computed,
                   predicted=predicted, abs_error=abs_err, rel_error=rel_err,
                   n_points=int(n_points), eval_seconds=float(eval_seconds))


class GramSweep:
    """Shared enumeration + Z evaluation for a (phi, t_max, cfg) triple.

    The moment operations accept one of these to amortize the expensive
    part across many verifications; they build their own otherwise.
    """

    def __init__(self, phi, t_max: float, cfg: EvalConfig = DEFAULT_CONFIG,
                 cache_dir: str | None = None, threads: int = 1):
        self.phi = phi if isinstance(phi, Angle) else Angle(float(phi))
        self.t_max = float(t_max)
        self.cfg = cfg
        self.threads = threads
        self.points = enumerate_points(self.phi, self.t_max, cfg, cache_dir)
        self.z = bulk_hardy_z(self.points.t, cfg, threads)
        self.parity = np.where(self.points.n % 2 == 0, 1.0, -1.0)
        self._signed = None
        self._cut = None

    def signed(self):
        if self._signed is None:
            signed_value = self.parity * self.z
            sign = np.where(signed_value >= 0.0, 1,
                            np.where(np.abs(signed_value) < grampoints.NEAR_ZERO, 1, -1))
            self._signed = grampoints.SignedGramPointSet(
                self.points, signed_value, sign.astype(np.int8),
                np.abs(signed_value) < grampoints.NEAR_ZERO)
        return self._signed

    @property
    def cut_height(self) -> float:
        """Midpoint normalization T = (t_nu + t_{nu+1}) / 2 at the cut:
        removes the boundary jitter of stopping between two roots."""
        if self._cut is None:
            if not len(self.points):
                self._cut = self.t_max
            else:
                n_last = int(self.points.n[-1])
                t_next = solve_gram(n_last + 1, self.phi, self.cfg).t
                self._cut = 0.5 * (float(self.points.t[-1]) + t_next)
        return self._cut


def _sweep(phi, t_max, cfg, sweep) -> GramSweep:
    if sweep is not None:
        want = phi.phi if isinstance(phi, Angle) else float(phi)
        if abs(sweep.phi.phi - want) > 1e-12 or sweep.t_max != float(t_max):
            raise ValueError("provided sweep was built for a different "
                             "(phi, t_max) than requested")
        return sweep
    return GramSweep(phi, t_max, cfg)


def _require_height(t_max: float, minimum: float, what: str) -> None:
    if t_max < minimum:
        raise DomainError(f"{what} requires t_max >= {minimum}")


# ----------------------------------------------------------------------
# |zeta|^{2k} and zeta^3
# ----------------------------------------------------------------------

def moment_abs_2k(phi, t_max: float, k: float, cfg: EvalConfig = DEFAULT_CONFIG,
                  sweep: GramSweep | None = None) -> MomentReport:
    """sum |zeta(1/2 + i t_n)|^{2k} against the growth shape
    T (log T)^{k^2+1} / (2 pi).

    The shape carries an unknown constant, so rel_error here is a
    comparator, not an accuracy claim; k = 0 returns the point count.
    """
    _require_height(t_max, 100.0, "moment_abs_2k")
    if k < 0:
        raise ValueError("k must be >= 0")
    start = time.perf_counter()
    sw = _sweep(phi, t_max, cfg, sweep)
    absz = np.abs(sw.z)
    if k == 0:
        computed = float(len(sw.points))
    else:
        logs = np.where(absz < 1e-300, -np.inf, np.log(np.maximum(absz, 1e-300)))
        computed = blocked_fsum(np.where(np.isneginf(logs), 0.0, np.exp(2.0 * k * logs)))
    big_t = sw.cut_height
    predicted = big_t * math.log(big_t) ** (k * k + 1.0) / TWO_PI
    return MomentReport.build(sw.phi.phi, t_max, "abs2k", k, computed, predicted,
                              len(sw.points), time.perf_counter() - start)


def moment_cubed(phi, t_max: float, cfg: EvalConfig = DEFAULT_CONFIG,
                 sweep: GramSweep | None = None) -> MomentReport:
    """sum zeta(1/2 + i t_n)^3 = e^{3 i phi} sum (-1)^n Z(t_n)^3 against
    the main term
    2 e^{3 i phi} cos(phi) (T/2pi) P3(log T/2pi)
      + 2 e^{3 i phi} cos(3 phi) (T/2pi) log(T/2pi e).
    """
    _require_height(t_max, 100.0, "moment_cubed")
    start = time.perf_counter()
    sw = _sweep(phi, t_max, cfg, sweep)
    phase = complex(np.exp(3j * sw.phi.phi))
    computed = phase * blocked_fsum(sw.parity * sw.z ** 3)
    big_t = sw.cut_height
    tau = big_t / TWO_PI
    p3 = divisor.p3_polynomial()
    predicted = (2.0 * phase * math.cos(sw.phi.phi) * tau * p3(math.log(tau))
                 + 2.0 * phase * math.cos(3.0 * sw.phi.phi) * tau * math.log(tau / math.e))
    return MomentReport.build(sw.phi.phi, t_max, "cubed", 3.0, computed, predicted,
                              len(sw.points), time.perf_counter() - start)


# ----------------------------------------------------------------------
# S1 and S2
# ----------------------------------------------------------------------

def _check_limits(t_max: float, *polys: DirichletPolynomial) -> None:
    bound = t_max ** 0.25 * (1.0 + 1e-9)
    for poly in polys:
        if poly.limit > bound:
            raise PreconditionError(
                f"polynomial limit {poly.limit} exceeds t_max^(1/4) = {bound:.3f}")


def s1_predicted_coefficient(phi, x_poly: DirichletPolynomial,
                             y_poly: DirichletPolynomial) -> complex:
    """e^{-2 i phi} sum_{m<=X, mn<=Y} x_m y_{mn}/(mn)
    + sum_{m<=Y, mn<=X} y_m x_{mn}/(mn), exactly over the supports."""
    angle = phi if isinstance(phi, Angle) else Angle(float(phi))

    def double_sum(a: DirichletPolynomial, b: DirichletPolynomial) -> complex:
        out = []
        for m, am in a.coefficients.items():
            for kk, bk in b.coefficients.items():
                if kk % m == 0:
                    out.append(am * bk / kk)
        return complex(fsum(np.real(out)), fsum(np.imag(out))) if out else 0j

    return complex(np.exp(-2j * angle.phi)) * double_sum(x_poly, y_poly) \
        + double_sum(y_poly, x_poly)


def compute_S1(phi, t_max: float, x_poly: DirichletPolynomial,
               y_poly: DirichletPolynomial, cfg: EvalConfig = DEFAULT_CONFIG,
               sweep: GramSweep | None = None,
               enforce_limits: bool = True) -> MomentReport:
    """S1 = sum zeta(1/2 - i t_n) X(1/2 + i t_n) Y(1/2 - i t_n) against
    (T/2pi) log(T/2pi e) times the exact coefficient double sums."""
    _require_height(t_max, 100.0, "compute_S1")
    if enforce_limits:
        _check_limits(t_max, x_poly, y_poly)
    start = time.perf_counter()
    sw = _sweep(phi, t_max, cfg, sweep)
    # zeta(1/2 - it_n) = conj(zeta) = e^{i theta} Z = (-1)^n e^{-i phi} Z
    zeta_conj = sw.parity * complex(np.exp(-1j * sw.phi.phi)) * sw.z
    xs = x_poly.evaluate_half_line(sw.points.t)
    ys = y_poly.evaluate_half_line(sw.points.t, conj_arg=True)
    terms = zeta_conj * xs * ys
    computed = complex(blocked_fsum(terms.real), blocked_fsum(terms.imag))
    big_t = sw.cut_height
    tau = big_t / TWO_PI
    predicted = tau * math.log(tau / math.e) * s1_predicted_coefficient(sw.phi, x_poly, y_poly)
    return MomentReport.build(sw.phi.phi, t_max, "S1", float(x_poly.limit),
                              computed, predicted, len(sw.points),
                              time.perf_counter() - start)


def compute_S2(phi, t_max: float, x_poly: DirichletPolynomial,
               cfg: EvalConfig = DEFAULT_CONFIG,
               sweep: GramSweep | None = None,
               enforce_limits: bool = True) -> MomentReport:
    """S2 = sum |X(1/2 + i t_n)|^2 against
    (T/2pi) log(T/2pi e) sum |x_n|^2 / n."""
    _require_height(t_max, 100.0, "compute_S2")
    if enforce_limits:
        _check_limits(t_max, x_poly)
    start = time.perf_counter()
    sw = _sweep(phi, t_max, cfg, sweep)
    xs = x_poly.evaluate_half_line(sw.points.t)
    computed = blocked_fsum(np.abs(xs) ** 2)
    coeff = fsum([abs(v) ** 2 / n for n, v in x_poly.coefficients.items()])
    big_t = sw.cut_height
    tau = big_t / TWO_PI
    predicted = tau * math.log(tau / math.e) * coeff
    return MomentReport.build(sw.phi.phi, t_max, "S2", float(x_poly.limit),
                              computed, predicted, len(sw.points),
                              time.perf_counter() - start)


# ----------------------------------------------------------------------
# Rational lower-bound pipeline
# ----------------------------------------------------------------------

@dataclass
class Theorem1Report:
    exponent: RationalExponent
    phi: float
    t_max: float
    xi: float
    s1: MomentReport
    s2: MomentReport
    moment: float          # sum |zeta|^{2k}, computed directly
    lower_bound: float     # |S1|^{2k} / S2^{2k-1}
    holder_satisfied: bool
    sigma1: float          # coefficient sum over (m in X-range, mn in Y-range)
    sigma2: float          # coefficient sum over (m in Y-range, mn in X-range)
    n_points: int


def _coefficient_cross_sum(a: divisor.TruncatedCoeffs, b: divisor.TruncatedCoeffs) -> float:
    """sum_{m in supp a, m n in supp b} a_m b_{mn} / (mn)."""
    av = a.values
    bv = b.values
    terms = []
    for m in range(1, av.size):
        am = av[m]
        if am == 0.0:
            continue
        ks = np.arange(m, bv.size, m)
        if ks.size:
            terms.append(am * np.sum(bv[ks] / ks))
    return fsum(terms)


def theorem1_pipeline(kexp: RationalExponent, t_max: float, phi=0.0,
                      cfg: EvalConfig = DEFAULT_CONFIG,
                      sweep: GramSweep | None = None) -> Theorem1Report:
    """Lower-bound construction for sum |zeta|^{2k} with k = p/q.

    Builds the xi-truncated kappa-divisor polynomial D with
    xi = T^{1/(4p)}, sets X = D^p and Y = D^r, computes S1, S2 and the
    direct moment, and checks the Hoelder chain
        sum |zeta|^{2k} >= |S1|^{2k} / S2^{2k-1}
    (an inequality between the actually computed sums, so it must hold
    up to 1e-9 relative slack; a violation raises).
    """
    _require_height(t_max, 100.0, "theorem1_pipeline")
    k = kexp.k
    xi = t_max ** (1.0 / (4.0 * kexp.p))
    x_tr = divisor.convolve_truncated(kexp.kappa, kexp.p, xi)
    y_tr = divisor.convolve_truncated(kexp.kappa, kexp.r, xi)
    x_poly = DirichletPolynomial(
        coefficients={n: complex(v) for n, v in enumerate(x_tr.values[1:].tolist(), 1) if v},
        limit=max(1, x_tr.limit))
    y_poly = DirichletPolynomial(
        coefficients={n: complex(v) for n, v in enumerate(y_tr.values[1:].tolist(), 1) if v},
        limit=max(1, y_tr.limit))
    sw = _sweep(phi, t_max, cfg, sweep)
    s1 = compute_S1(phi, t_max, x_poly, y_poly, cfg, sweep=sw)
    s2 = compute_S2(phi, t_max, x_poly, cfg, sweep=sw)
    m2k = moment_abs_2k(phi, t_max, k, cfg, sweep=sw)
    s1_abs = abs(s1.computed)
    s2_val = s2.computed.real
    lower = s1_abs ** (2.0 * k) / s2_val ** (2.0 * k - 1.0) if s2_val > 0 else 0.0
    moment_val = m2k.computed.real
    holder_ok = moment_val * s2_val ** (2.0 * k - 1.0) >= s1_abs ** (2.0 * k) * (1.0 - 1e-9)
    if not holder_ok:
        raise RuntimeError("Hoelder inequality violated beyond numerical slack")
    sigma1 = _coefficient_cross_sum(x_tr, y_tr)
    sigma2 = _coefficient_cross_sum(y_tr, x_tr)
    return Theorem1Report(
        exponent=kexp, phi=sw.phi.phi, t_max=float(t_max), xi=xi,
        s1=s1, s2=s2, moment=moment_val, lower_bound=lower,
        holder_satisfied=holder_ok, sigma1=sigma1, sigma2=sigma2,
        n_points=len(sw.points))


# ----------------------------------------------------------------------
# Signed odd moments and maxima
# ----------------------------------------------------------------------

def signed_odd_moment(phi, t_max: float, ell: int,
                      cfg: EvalConfig = DEFAULT_CONFIG,
                      sweep: GramSweep | None = None) -> tuple:
    """(plus, minus): sums of |zeta|^{2 ell + 1} over the two sign
    classes, computed both by direct classification and through the
    identity (1/2) sum (|v|^{2l+1} +- v^{2l+1}) with v = (-1)^n Z.
    The two routes must agree to 1e-6 relative.
    """
    _require_height(t_max, 100.0, "signed_odd_moment")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    sw = _sweep(phi, t_max, cfg, sweep)
    signed = sw.signed()
    power = 2 * ell + 1
    absv = np.abs(signed.value) ** power
    plus_direct = blocked_fsum(absv[signed.plus_mask])
    minus_direct = blocked_fsum(absv[signed.minus_mask])
    vpow = signed.value ** power
    plus_ident = 0.5 * (blocked_fsum(absv) + blocked_fsum(vpow))
    minus_ident = 0.5 * (blocked_fsum(absv) - blocked_fsum(vpow))
    scale = max(plus_direct + minus_direct, 1e-300)
    if abs(plus_ident - plus_direct) > 1e-6 * scale or \
            abs(minus_ident - minus_direct) > 1e-6 * scale:
        raise RuntimeError("signed-moment identity route disagrees with direct route")
    return plus_direct, minus_direct


@dataclass
class MaxScanResult:
    max_plus: float | None
    max_minus: float | None
    argmax_plus: float | None
    argmax_minus: float | None


def max_scan(phi, t_max: float, cfg: EvalConfig = DEFAULT_CONFIG,
             sweep: GramSweep | None = None) -> MaxScanResult:
    """Running maxima of |zeta| over each sign class with abscissas."""
    _require_height(t_max, 100.0, "max_scan")
    sw = _sweep(phi, t_max, cfg, sweep)
    signed = sw.signed()
    absz = np.abs(signed.value)

    def best(mask):
        if not mask.any():
            return None, None
        idx = np.nonzero(mask)[0]
        j = idx[np.argmax(absz[idx])]
        return float(absz[j]), float(sw.points.t[j])

    mp, ap = best(signed.plus_mask)
    mm, am = best(signed.minus_mask)
    return MaxScanResult(max_plus=mp, max_minus=mm, argmax_plus=ap, argmax_minus=am)
