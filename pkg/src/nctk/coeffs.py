"""Scaling functions and closed-form diffusion coefficients.

The three tail regimes of the path-length law fix the absorption/source
scaling theta(eps) and the limit equation's multiplier:

* diffusive tail (alpha > 2):      theta = eps^2,        D1 |xi|^2
* superdiffusive (1 < alpha < 2):  theta = eps^alpha,    D2 |xi|^alpha
* borderline (alpha = 2):          theta = -eps^2 ln eps, D3 |xi|^2

D1 combines an anisotropy part and a tail part,

    D1 = nu1 * m2 + (D0 / 2) * m2,   nu1 = (first moment)^2 mu0 / (1 - mu0),

with m2 the direction second moment (1/3 for n = 3, giving the familiar
nu1/3 + D0/6).  D2 is the fractional coefficient

    D2 = 2 d0 * int_S int_0^inf sin^2(tau (v.e)/2) / tau^(alpha+1) dtau dv,

computed by nested adaptive quadrature (deliberately independent of the
series machinery in symbol.py, so the two provide a dual route).  D3 as
printed equals m2/2; dimensional consistency with the superdiffusive case
requires the tail constant d0 as a prefactor, controlled by the
``d3_includes_d0`` toggle (default on).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .scatter import mean_cosine
from .sphere import second_direction_moment

__all__ = ["Regime", "CoefficientSet", "theta", "compute_coefficients", "d2_fractional"]

DIFFUSIVE = "diffusive"
SUPERDIFFUSIVE = "superdiffusive"
BORDERLINE = "borderline"

_KIND_ALIASES = {"a": DIFFUSIVE, "b": SUPERDIFFUSIVE, "c": BORDERLINE,
                 DIFFUSIVE: DIFFUSIVE, SUPERDIFFUSIVE: SUPERDIFFUSIVE, BORDERLINE: BORDERLINE}


@dataclass(frozen=True)
class Regime:
    """Tail regime of the path-length law.

    kind  : 'diffusive' (alpha > 2), 'superdiffusive' (1 < alpha < 2) or
            'borderline' (alpha = 2); the letters a/b/c are accepted aliases.
    alpha : tail exponent (may be inf for light-tailed families)
    d0    : tail constant for power-law families, else None
    """

    kind: str
    alpha: float
    d0: float = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown regime kind '{self.kind}'")
        object.__setattr__(self, "kind", kind)
        if not self.alpha > 1.0:
            raise ValueError(f"tail exponent must exceed 1, got {self.alpha}")
        ok = {DIFFUSIVE: self.alpha > 2.0,
              SUPERDIFFUSIVE: 1.0 < self.alpha < 2.0,
              BORDERLINE: self.alpha == 2.0}[self.kind]
        if not ok:
            raise ValueError(f"regime '{self.kind}' inconsistent with alpha = {self.alpha}")

    @classmethod
    def from_alpha(cls, alpha, d0=None):
        if alpha > 2.0:
            return cls(DIFFUSIVE, alpha, d0)
        if alpha == 2.0:
            return cls(BORDERLINE, alpha, d0)
        return cls(SUPERDIFFUSIVE, alpha, d0)

    @classmethod
    def for_distribution(cls, dist):
        if dist.tail is not None:
            alpha, d0, _ = dist.tail
            return cls.from_alpha(alpha, d0)
        if dist.tail_asymptotic:
            alpha, d0, _ = dist.tail_asymptotic
            return cls.from_alpha(alpha, d0)
        return cls(DIFFUSIVE, math.inf)

    @property
    def limit_exponent(self):
        """Exponent beta of the limit multiplier D |xi|^beta."""
        return self.alpha if self.kind == SUPERDIFFUSIVE else 2.0


def theta(regime, eps):
    """Absorption/source scaling theta(eps) for the regime; 0 < eps < 1."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if regime.kind == DIFFUSIVE:
        return eps * eps
    if regime.kind == SUPERDIFFUSIVE:
        return eps ** regime.alpha
    return -eps * eps * math.log(eps)


def _d2_inner(b, alpha, tau_cut=1.0e4):
    """int_0^inf sin^2(tau b / 2) / tau^(alpha+1) dtau, adaptive with
    averaged tail beyond tau_cut (sin^2 -> 1/2)."""
    if b == 0.0:
        return 0.0
    f = lambda t: np.sin(t * b / 2.0) ** 2 * t ** (-alpha - 1.0)
    v1, _ = integrate.quad(f, 0.0, 1.0, limit=200)
    v2, _ = integrate.quad(f, 1.0, tau_cut, limit=4000)
    return v1 + v2 + 0.5 / (alpha * tau_cut ** alpha)


def d2_fractional(alpha, d0, dimension=3, e=None):
    """Fractional diffusion coefficient D2 by nested adaptive quadrature.

    The direction integral is reduced to the polar angle measured from e
    (any unit vector gives the same value; e only fixes the reference
    frame), then both the angular and the tau integrals are adaptive.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"D2 requires 1 < alpha < 2, got {alpha}")
    if e is not None:
        e = np.asarray(e, dtype=float)
        if abs(np.linalg.norm(e) - 1.0) > 1e-10:
            raise ValueError("reference direction e must be a unit vector")
    if dimension == 3:
        outer, _ = integrate.quad(lambda mu: _d2_inner(mu, alpha), 0.0, 1.0, limit=200)
    elif dimension == 2:
        outer, _ = integrate.quad(lambda phi: _d2_inner(abs(np.cos(phi)), alpha),
                                  0.0, np.pi / 2.0, limit=200)
        outer *= 2.0 / np.pi
    else:
        raise ValueError(f"unsupported dimension {dimension}")
    return 2.0 * d0 * outer


@dataclass
class CoefficientSet:
    """All closed-form coefficients for one (distribution, kernel) pair.

    Entries that the regime leaves undefined (for example D2 outside the
    superdiffusive window, or the second moment when it diverges) are None.
    """

    regime: Regime
    d0_moment: float            # D0 = second moment of p (None if divergent)
    mean_cosine: float          # mu0
    nu0: float                  # 1 / (1 - mu0)
    nu1: float                  # (first moment)^2 mu0 / (1 - mu0)
    d1: float
    d2: float
    d3: float
    d3_printed: float           # m2/2 without the tail constant
    beta0: float
    first_moment: float
    direction_m2: float
    d3_includes_d0: bool = True
    provenance: dict = field(default_factory=dict)

    def limit_coefficient(self):
        """Coefficient D of the limit multiplier D |xi|^beta for the regime."""
        return {DIFFUSIVE: self.d1, SUPERDIFFUSIVE: self.d2, BORDERLINE: self.d3}[self.regime.kind]

    def as_dict(self):
        out = {
            "regime": self.regime.kind,
            "alpha": self.regime.alpha,
            "tail_d0": self.regime.d0,
            "D0": self.d0_moment,
            "mean_cosine": self.mean_cosine,
            "nu0": self.nu0,
            "nu1": self.nu1,
            "D1": self.d1,
            "D2": self.d2,
            "D3": self.d3,
            "D3_printed": self.d3_printed,
            "beta0": self.beta0,
            "first_moment": self.first_moment,
            "direction_m2": self.direction_m2,
            "d3_includes_d0": self.d3_includes_d0,
        }
        return out


_PROVENANCE = {
    "D0": "second moment of the path-length density",
    "mean_cosine": "kernel-weighted average of v.v' (quadrature)",
    "nu0": "1 / (1 - mean_cosine)",
    "nu1": "(first moment)^2 * mean_cosine / (1 - mean_cosine)",
    "D1": "nu1 * m2 + D0 * m2 / 2 (anisotropy part + tail part; m2/3-form for n=3)",
    "D2": "2 d0 * nested adaptive quadrature of sin^2(tau (v.e)/2) / tau^(alpha+1)",
    "D3": "tail constant d0 times m2/2 (toggle d3_includes_d0)",
    "D3_printed": "m2/2 with no tail prefactor",
    "beta0": "integral of the survival function (= normalized first moment)",
}


def compute_coefficients(dist, kernel, quad, regime, d3_includes_d0=True):
    """Assemble the CoefficientSet for one model.

    Pure function of its inputs; every defined entry is reproducible
    bit-for-bit.  Undefined entries (divergent moments, out-of-regime
    coefficients) are left as None rather than raised, so a single call
    serves every regime.
    """
    mu0 = mean_cosine(kernel, quad)
    nu0 = 1.0 / (1.0 - mu0)
    m1 = dist.moment(1, np.inf)
    nu1 = m1 * m1 * mu0 / (1.0 - mu0)
    m2dir = second_direction_moment(quad)

    d0_moment = None
    d1 = None
    if regime.alpha > 2.0:
        d0_moment = dist.moment(2, np.inf)
        d1 = nu1 * m2dir + 0.5 * d0_moment * m2dir
        if d1 <= 0.0:
            warnings.warn(f"D1 = {d1} is not positive (mean cosine {mu0})", RuntimeWarning, stacklevel=2)
    if mu0 < 0.0:
        warnings.warn(f"mean scattering cosine {mu0} is negative; nu1 < 0", RuntimeWarning, stacklevel=2)

    d2 = None
    if regime.kind == SUPERDIFFUSIVE:
        if regime.d0 is None:
            raise ValueError("superdiffusive regime needs the tail constant d0 for D2")
        d2 = d2_fractional(regime.alpha, regime.d0, quad.dimension)

    d3_printed = 0.5 * m2dir
    d3 = None
    if regime.kind == BORDERLINE:
        if regime.d0 is None:
            raise ValueError("borderline regime needs the tail constant d0 for D3")
        d3 = regime.d0 * d3_printed if d3_includes_d0 else d3_printed

    return CoefficientSet(
        regime=regime,
        d0_moment=d0_moment,
        mean_cosine=mu0,
        nu0=nu0,
        nu1=nu1,
        d1=d1,
        d2=d2,
        d3=d3,
        d3_printed=d3_printed,
        beta0=dist.beta0(),
        first_moment=m1,
        direction_m2=m2dir,
        d3_includes_d0=d3_includes_d0,
        provenance=dict(_PROVENANCE),
    )
