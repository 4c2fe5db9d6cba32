"""Resonator construction certifying large values of |zeta| on a line
e^{i phi} R through the discrete mean-value ratio |S1| / S2.

The resonator is the multiplicative function f supported on squarefree
products of primes from [L^2, exp((log L)^2)] with L =
exp(sqrt(log X log log X)), prime weight f(p) = L / (p log p), and
Dirichlet coefficients x_n = sqrt(n) f(n).  This prime weight is the
one under which the classical bound sum_n f(n)^2 <= prod_p (1 +
L^2/(p^2 log^2 p)) < e holds; see the notes in the README about the
sqrt(p) variant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .divisor import ConfigurationError, primes_up_to
from .moments import DirichletPolynomial, GramSweep, MomentReport, compute_S1, compute_S2
from .special import DEFAULT_CONFIG, EvalConfig
from .summation import fsum

__all__ = [
    "ResonatorConfig",
    "Resonator",
    "DegenerateResonatorError",
    "build_resonator",
    "resonator_ratio",
    "certify_lower_bound",
    "CertificateReport",
]


class DegenerateResonatorError(ValueError):
    """Resonator has an empty (zero) weight vector."""


@dataclass(frozen=True)
class ResonatorConfig:
    """Derived parameters of the resonator at coefficient cutoff X."""

    X: float
    L: float
    prime_lo: float
    prime_hi: float

    @classmethod
    def for_cutoff(cls, X: float) -> "ResonatorConfig":
        X = float(X)
        if X < 1e3:
            raise ConfigurationError("resonator cutoff X must be >= 1e3")
        loglog = math.log(math.log(X))
        if loglog <= 1.0:
            raise ConfigurationError("need log log X > 1")
        L = math.exp(math.sqrt(math.log(X) * loglog))
        return cls(X=X, L=L, prime_lo=L * L, prime_hi=math.exp(math.log(L) ** 2))

    @property
    def effective_hi(self) -> float:
        """Products must stay <= X, so primes above X never contribute."""
        return min(self.prime_hi, self.X)


@dataclass
class Resonator:
    config: ResonatorConfig
    support: np.ndarray   # squarefree n with f(n) != 0, ascending, includes 1
    weights: np.ndarray   # f(n) on the support
    factors: list         # prime tuple for each support element

    def weight_map(self) -> dict:
        return {int(n): float(w) for n, w in zip(self.support, self.weights)}

    def coefficient_polynomial(self) -> DirichletPolynomial:
        """x_n = sqrt(n) f(n) as a DirichletPolynomial."""
        coeff = {int(n): complex(math.sqrt(float(n)) * w)
                 for n, w in zip(self.support, self.weights) if n >= 1}
        return DirichletPolynomial(coefficients=coeff, limit=int(self.config.X))

    @property
    def sum_f_squared(self) -> float:
        """sum_n f(n)^2; bounded by prod_p (1 + L^2/(p^2 log^2 p)) < e."""
        return fsum(self.weights ** 2)


def _enumerate_support(cfg: ResonatorConfig, plist: list, weights: dict) -> Resonator:
    """Squarefree products of the given primes up to X by bounded DFS."""
    support = [(1, 1.0, ())]

    def extend(start: int, n: int, f: float, used: tuple):
        for i in range(start, len(plist)):
            p = plist[i]
            m = n * p
            if m > cfg.X:
                break
            fp = f * weights[p]
            support.append((m, fp, used + (p,)))
            extend(i + 1, m, fp, used + (p,))

    extend(0, 1, 1.0, ())
    support.sort()
    ns = np.array([s[0] for s in support], dtype=np.int64)
    ws = np.array([s[1] for s in support], dtype=float)
    facs = [s[2] for s in support]
    return Resonator(config=cfg, support=ns, weights=ws, factors=facs)


def build_resonator(X: float) -> Resonator:
    """Enumerate the squarefree resonance support up to X.

    At desk scale the prime window [L^2, min(exp((log L)^2), X)] admits
    only single primes (two-prime products exceed X), but the DFS is
    general.  An empty window (possible just above the X >= 1e3 floor)
    degrades to the trivial resonator supported on {1}, with a warning.
    """
    cfg = ResonatorConfig.for_cutoff(X)
    hi = int(math.floor(cfg.effective_hi))
    lo = int(math.ceil(cfg.prime_lo))
    if lo > hi:
        warnings.warn("resonance prime interval is empty at this cutoff; "
                      "building the trivial resonator", RuntimeWarning)
        primes = np.empty(0, dtype=np.int64)
    else:
        sieve = primes_up_to(hi)
        primes = sieve[sieve >= lo]
    plist = primes.tolist()
    weights = {p: cfg.L / (p * math.log(p)) for p in plist}
    return _enumerate_support(cfg, plist, weights)


def resonator_ratio(res: Resonator) -> float:
    """(sum_{mn<=X} f(m) f(mn)/sqrt(n)) / (sum_{n<=X} f(n)^2).

    The numerator runs over support elements k and their divisors m
    within the support (subset products of k's primes), so the cost is
    linear in the support for the squarefree weight.
    """
    wmap = res.weight_map()
    if not wmap:
        raise DegenerateResonatorError("empty resonator support")
    num_terms = []
    for k, fk, primes in zip(res.support.tolist(), res.weights.tolist(), res.factors):
        # all divisors m of k inside the support: subset products
        divs = [1]
        for p in primes:
            divs += [d * p for d in divs]
        for m in divs:
            fm = wmap.get(m)
            if fm is not None:
                num_terms.append(fm * fk / math.sqrt(k / m))
    denominator = res.sum_f_squared
    if denominator <= 0.0:
        raise DegenerateResonatorError("zero diagonal weight")
    return fsum(num_terms) / denominator


@dataclass
class CertificateReport:
    phi: float
    t_max: float
    cutoff: float
    s1: MomentReport
    s2: MomentReport
    certified_bound: float      # |S1| / S2 <= max |zeta| over the points
    scanned_max: float
    degenerate_direction: bool  # phi = pi/2: the (1 + e^{-2 i phi}) factor vanishes
    cutoff_warning: bool


def certify_lower_bound(phi, t_max: float, res: Resonator,
                        cfg: EvalConfig = DEFAULT_CONFIG,
                        sweep: GramSweep | None = None,
                        epsilon: float = 0.01) -> CertificateReport:
    """Large-value certificate: |S1| <= S2 * max |zeta(1/2 + i t_n)|
    with X = Y = the resonator polynomial, so the scanned maximum must
    dominate |S1|/S2 up to 1e-9 relative slack (raises otherwise).
    """
    sw = sweep if sweep is not None else GramSweep(phi, t_max, cfg)
    poly = res.coefficient_polynomial()
    limit_ok = res.config.X <= t_max ** (0.25 - epsilon)
    if not limit_ok:
        warnings.warn("resonator cutoff exceeds t_max^(1/4 - eps); the bound "
                      "is still computed but the prediction is untrusted",
                      RuntimeWarning)
    s1 = compute_S1(phi, t_max, poly, poly, cfg, sweep=sw, enforce_limits=False)
    s2 = compute_S2(phi, t_max, poly, cfg, sweep=sw, enforce_limits=False)
    s2_val = s2.computed.real
    if s2_val <= 0.0:
        raise DegenerateResonatorError("S2 vanished")
    bound = abs(s1.computed) / s2_val
    scanned = float(np.max(np.abs(sw.z))) if len(sw.points) else 0.0
    if scanned < bound * (1.0 - 1e-9):
        raise RuntimeError("certificate inequality |S1| <= S2 max|zeta| failed")
    degenerate = abs(1.0 + complex(np.exp(-2j * sw.phi.phi))) < 1e-12
    return CertificateReport(
        phi=sw.phi.phi, t_max=float(t_max), cutoff=res.config.X,
        s1=s1, s2=s2, certified_bound=bound, scanned_max=scanned,
        degenerate_direction=degenerate, cutoff_warning=not limit_ok)
