"""Generalized Gram points: the positive roots of e^{2 i phi} =
Delta(1/2 + it) on the increasing branch of theta, realized as
theta(t_n) = pi n - phi, together with their sign classification
value = e^{-i phi} zeta(1/2 + i t_n) = (-1)^n Z(t_n).
"""

from __future__ import annotations

import math
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from . import special
from .special import DEFAULT_CONFIG, DomainError, EvalConfig, theta, theta_deriv

__all__ = [
    "Angle",
    "GramPoint",
    "SignedGramPoint",
    "GramPointSet",
    "SignedGramPointSet",
    "OutOfBranchError",
    "solve_gram",
    "enumerate_points",
    "classify",
    "count_estimate",
]

TWO_PI = 2.0 * math.pi

#: theta at its minimum t = 2 pi; targets must clear this plus a buffer
#: to sit safely on the increasing branch.  (A buffer of 0.25 keeps the
#: root theta(t) = -pi at t ~ 9.667 admissible.)
THETA_MIN = float(theta(TWO_PI))
BRANCH_BUFFER = 0.25

#: Bump when the solver or the theta evaluation changes; invalidates caches.
EVALUATOR_VERSION = 1

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 60

#: classification values smaller than this are flagged ambiguous
NEAR_ZERO = 1e-9


class OutOfBranchError(ValueError):
    """Requested index lies below the increasing-branch cutoff."""


@dataclass(frozen=True)
class Angle:
    """Direction phi selecting the target line e^{i phi} R."""

    phi: float

    def __post_init__(self):
        if not 0.0 <= self.phi < math.pi:
            raise DomainError("phi must be in [0, pi)")


@dataclass(frozen=True)
class GramPoint:
    n: int
    phi: Angle
    t: float


@dataclass(frozen=True)
class SignedGramPoint:
    point: GramPoint
    sign: str  # "+" or "-"
    value: float
    ambiguous: bool = False


def _as_angle(phi) -> Angle:
    return phi if isinstance(phi, Angle) else Angle(float(phi))


# ----------------------------------------------------------------------
# Root solving
# ----------------------------------------------------------------------

def _initial_guess(targets: np.ndarray) -> np.ndarray:
    """Invert the leading asymptotic (t/2) log(t/(2 pi e)) = tau + pi/8.

    With y = t/(2 pi e) the equation reads y log y = beta, solved by
    y = beta / W0(beta); the fixed point of the equivalent iteration.
    """
    beta = (targets + math.pi / 8.0) / (math.pi * math.e)
    guess = np.full_like(targets, 8.5)
    ok = beta > -0.3555  # W0 well-conditioned above the -1/e fold
    b = beta[ok]
    y = np.where(np.abs(b) < 1e-12, 1.0, b / np.real(lambertw(b)))
    guess[ok] = TWO_PI * math.e * np.maximum(y, 0.2)
    return np.maximum(guess, TWO_PI + 0.05)


def _solve_targets(targets: np.ndarray) -> np.ndarray:
    """Vectorized safeguarded Newton for theta(t) = tau on t > 2 pi.

    theta' >= (1/2) log(t/2pi) > 0 there, so a bracket plus Newton with
    bisection fallback always converges.  A final ulp-level polish picks
    the representable t minimizing |theta(t) - tau|, which is the best
    achievable residual in binary64.
    """
    targets = np.asarray(targets, dtype=float)
    if np.any(targets < THETA_MIN + BRANCH_BUFFER):
        raise OutOfBranchError(
            "target below the increasing-branch cutoff "
            f"theta(2 pi) + {BRANCH_BUFFER} = {THETA_MIN + BRANCH_BUFFER:.4f}")
    lo = np.full_like(targets, TWO_PI * (1.0 + 1e-12))
    hi = np.maximum(_initial_guess(targets) * 1.6, 24.0)
    for _ in range(80):
        need = theta(hi) <= targets
        if not need.any():
            break
        hi[need] *= 1.7
    t = np.clip(_initial_guess(targets), lo + 0.05, hi)
    for _ in range(NEWTON_MAX_ITER):
        res = theta(t) - targets
        above = res > 0.0
        hi = np.where(above, np.minimum(hi, t), hi)
        lo = np.where(~above, np.maximum(lo, t), lo)
        if np.all(np.abs(res) <= NEWTON_TOL):
            break
        step = res / theta_deriv(t)
        tn = t - step
        bad = ~((tn > lo) & (tn < hi)) | ~np.isfinite(tn)
        tn = np.where(bad, 0.5 * (lo + hi), tn)
        if np.all(np.abs(tn - t) <= 2.0 * np.spacing(t)):
            t = tn
            break
        t = tn
    # ulp polish: among the 5 neighbouring representables, keep the one
    # with the smallest computed residual.
    ulp = np.spacing(t)
    best_t = t.copy()
    best_res = np.abs(theta(t) - targets)
    for k in (-2, -1, 1, 2):
        cand = t + k * ulp
        r = np.abs(theta(cand) - targets)
        better = r < best_res
        best_t = np.where(better, cand, best_t)
        best_res = np.where(better, r, best_res)
    return best_t


def solve_gram(n: int, phi, cfg: EvalConfig = DEFAULT_CONFIG) -> GramPoint:
    """Solve theta(t) = pi n - phi on the canonical branch t > 2 pi."""
    angle = _as_angle(phi)
    target = math.pi * n - angle.phi
    if target < THETA_MIN + BRANCH_BUFFER:
        raise OutOfBranchError(
            f"index n={n} at phi={angle.phi} lies below the canonical branch")
    t = float(_solve_targets(np.array([target]))[0])
    return GramPoint(n=n, phi=angle, t=t)


# ----------------------------------------------------------------------
# Point collections
# ----------------------------------------------------------------------

class GramPointSet(Sequence):
    """Monotone run of Gram points with consecutive indices.

    Keeps bulk (n, t) arrays for the moment engines; indexing yields
    :class:`GramPoint` objects.
    """

    def __init__(self, phi: Angle, n: np.ndarray, t: np.ndarray):
        self.phi = phi
        self.n = np.asarray(n, dtype=np.int64)
        self.t = np.asarray(t, dtype=float)
        if self.n.shape != self.t.shape:
            raise ValueError("index/abscissa length mismatch")

    def __len__(self) -> int:
        return int(self.n.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return GramPointSet(self.phi, self.n[i], self.t[i])
        return GramPoint(n=int(self.n[i]), phi=self.phi, t=float(self.t[i]))

    def residuals(self) -> np.ndarray:
        """theta(t_n) - (pi n - phi) for every point."""
        return theta(self.t) - (math.pi * self.n - self.phi.phi)


class SignedGramPointSet(Sequence):
    """Classification of a GramPointSet: value = (-1)^n Z(t_n)."""

    def __init__(self, points: GramPointSet, value: np.ndarray,
                 sign: np.ndarray, ambiguous: np.ndarray):
        self.points = points
        self.value = np.asarray(value, dtype=float)
        self.sign = np.asarray(sign, dtype=np.int8)
        self.ambiguous = np.asarray(ambiguous, dtype=bool)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return SignedGramPointSet(self.points[i], self.value[i],
                                      self.sign[i], self.ambiguous[i])
        return SignedGramPoint(
            point=self.points[i],
            sign="+" if self.sign[i] > 0 else "-",
            value=float(self.value[i]),
            ambiguous=bool(self.ambiguous[i]),
        )

    @property
    def plus_mask(self) -> np.ndarray:
        return self.sign > 0

    @property
    def minus_mask(self) -> np.ndarray:
        return self.sign < 0


# ----------------------------------------------------------------------
# Enumeration and caching
# ----------------------------------------------------------------------

def _cache_path(cache_dir: str, phi: Angle, t_max: float) -> str:
    key = f"phi{phi.phi!r}_T{t_max!r}_v{EVALUATOR_VERSION}"
    key = key.replace("+", "").replace("-", "m")
    return os.path.join(cache_dir, f"gram_{key}.csv")


def _cache_header(phi: Angle, t_max: float) -> str:
    return (f"# zetagram gram-point cache\n"
            f"# evaluator={EVALUATOR_VERSION} phi={phi.phi!r} t_max={t_max!r}\n"
            f"n,t\n")


def _load_cache(path: str, phi: Angle, t_max: float):
    try:
        with open(path, "r") as fh:
            head = fh.readline() + fh.readline() + fh.readline()
            if head != _cache_header(phi, t_max):
                return None
            n_list, t_list = [], []
            for line in fh:
                a, b = line.split(",")
                n_list.append(int(a))
                t_list.append(float(b))
    except (OSError, ValueError):
        return None
    return GramPointSet(phi, np.array(n_list, dtype=np.int64),
                        np.array(t_list, dtype=float))


def _store_cache(path: str, phi: Angle, t_max: float, pts: GramPointSet) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(_cache_header(phi, t_max))
        for n, t in zip(pts.n.tolist(), pts.t.tolist()):
            fh.write(f"{n},{t!r}\n")
    os.replace(tmp, path)


def enumerate_points(phi, t_max: float, cfg: EvalConfig = DEFAULT_CONFIG,
                     cache_dir: str | None = None) -> GramPointSet:
    """All Gram points t_n(phi) with 0 <= n and t_n <= t_max, ascending.

    Enumeration starts at index 0 (the root of theta = -phi); negative
    indices on the canonical branch remain reachable via solve_gram.
    """
    angle = _as_angle(phi)
    t_max = float(t_max)
    if t_max < 20.0:
        raise DomainError("enumerate_points requires t_max >= 20")
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = _cache_path(cache_dir, angle, t_max)
        cached = _load_cache(path, angle, t_max)
        if cached is not None:
            return cached
    n_max = int(math.floor((theta(t_max) + angle.phi) / math.pi))
    idx = np.arange(0, n_max + 1, dtype=np.int64)
    targets = math.pi * idx - angle.phi
    t = _solve_targets(targets)
    keep = t <= t_max
    pts = GramPointSet(angle, idx[keep], t[keep])
    if np.any(np.diff(pts.t) <= 0.0):
        raise RuntimeError("enumerated abscissas are not strictly increasing")
    if cache_dir:
        _store_cache(path, angle, t_max, pts)
    return pts


def count_estimate(phi, t_max: float) -> float:
    """(theta(t_max) + phi)/pi, the smooth count of points below t_max;
    grows like (t_max/2pi) log(t_max/2pi).  The actual enumeration count
    is floor(estimate) + 1, so |count - estimate| < 1 always."""
    angle = _as_angle(phi)
    if t_max < TWO_PI:
        raise DomainError("count_estimate requires t_max > 2 pi")
    return (float(theta(t_max)) + angle.phi) / math.pi


# ----------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------

def bulk_hardy_z(t: np.ndarray, cfg: EvalConfig = DEFAULT_CONFIG,
                 threads: int = 1) -> np.ndarray:
    """Z(t) over an array, optionally across a thread pool.

    The block layout is fixed, so results are bit-identical for every
    thread count.
    """
    t = np.asarray(t, dtype=float)
    if threads <= 1 or t.size < 4096:
        return special.hardy_z(t, cfg)
    block = 1 << 14
    out = np.empty_like(t)
    spans = [(i, min(i + block, t.size)) for i in range(0, t.size, block)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [(a, b, pool.submit(special.hardy_z, t[a:b], cfg)) for a, b in spans]
        for a, b, fut in futures:
            out[a:b] = fut.result()
    return out


def classify(points: GramPointSet, cfg: EvalConfig = DEFAULT_CONFIG,
             threads: int = 1) -> SignedGramPointSet:
    """Sign classes of e^{-i phi} zeta(1/2 + i t_n) = (-1)^n Z(t_n).

    The identity form (-1)^n Z is exact on the canonical branch; a 1%
    stride is cross-checked against Re(e^{-i phi} e^{-i theta} Z) and a
    mismatch raises.  Near-zero values (|value| < 1e-9) are flagged
    ambiguous and retained with sign "+".
    """
    z = bulk_hardy_z(points.t, cfg, threads)
    parity = np.where(points.n % 2 == 0, 1.0, -1.0)
    value = parity * z
    sign = np.where(value >= 0.0, 1, np.where(np.abs(value) < NEAR_ZERO, 1, -1)).astype(np.int8)
    ambiguous = np.abs(value) < NEAR_ZERO
    if len(points):
        stride = max(1, len(points) // 100)
        samp = np.arange(0, len(points), stride)
        ts = points.t[samp]
        direct = np.exp(-1j * (points.phi.phi + theta(ts))) * z[samp]
        if np.max(np.abs(direct.real - value[samp])) > 1e-6 * max(1.0, np.max(np.abs(value[samp]))):
            raise RuntimeError("sign-classification cross-check failed")
        if np.max(np.abs(direct.imag)) > 1e-6 * max(1.0, float(np.max(np.abs(z[samp])))):
            raise RuntimeError("e^{-i phi} zeta is not numerically real at sampled points")
    return SignedGramPointSet(points, value, sign, ambiguous)
