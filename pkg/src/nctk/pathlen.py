"""Path-length distributions p(s) on [0, infinity).

Families:

* ``Exponential(rate)``            -- classical transport, all moments finite.
* ``PowerLawTail(alpha, d0)``      -- p(s) = d0 / s^(alpha+1) exactly for s > 1,
  constant core on [0, 1] chosen so the total mass is one.  Requires
  alpha > 1 (finite mean) and 0 < d0 < alpha (nonnegative core).
* ``LorentzGas2D()``               -- the explicit two-dimensional periodic
  Lorentz gas law.  See the class docstring for an important caveat about
  its normalization.
* ``Tabulated(s, p)``              -- piecewise-linear density from a table,
  renormalized at construction.

Each distribution exposes the density ``pdf``, its antiderivative ``cdf``
(which reaches ``mass``, the total integral of the density as written),
the *probability* layer ``survival``/``sample``/``sigma_t``/``beta0``
(computed from the mass-normalized law so that sampling is well defined
even if the written density is off by a constant), and truncated moments
of the written density.
"""

from __future__ import annotations

import warnings

import numpy as np

__all__ = [
    "PathLengthDistribution",
    "Exponential",
    "PowerLawTail",
    "LorentzGas2D",
    "Tabulated",
    "make_distribution",
]

_GX16, _GW16 = np.polynomial.legendre.leggauss(16)


def _panel_integrate(f, edges):
    """Composite 16-point Gauss integral of f over consecutive [edges] panels."""
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    u = mid[:, None] + half[:, None] * _GX16[None, :]
    return np.sum(half[:, None] * _GW16[None, :] * f(u), axis=1)


class PathLengthDistribution:
    """Base class; concrete families fill in pdf/cdf and the tail metadata.

    Attributes
    ----------
    mass : total integral of the written density (1.0 for a proper law)
    mean : first moment of the written density
    tail : (alpha, d0, s_start) if the density equals d0/s^(alpha+1)
           exactly beyond s_start, else None.  ``tail_asymptotic`` marks a
           tail that only holds asymptotically.
    """

    mass = 1.0
    tail = None
    tail_asymptotic = False

    def pdf(self, s):
        raise NotImplementedError

    def cdf(self, s):
        raise NotImplementedError

    def sample(self, u):
        """Inverse of the normalized CDF; u in (0,1)."""
        raise NotImplementedError

    def moment(self, k, upper=np.inf):
        """Truncated moment of the written density: integral of s^k p(s) over (0, upper)."""
        raise NotImplementedError

    # -- probability layer (normalized by `mass`) -------------------------

    def survival(self, s):
        """Normalized survival 1 - F(s)/mass; equals exp(-int_0^s Sigma_t)."""
        return np.maximum(1.0 - self.cdf(s) / self.mass, 0.0)

    def sigma_t(self, s):
        """Hazard rate of the normalized law, p/(mass * survival)."""
        surv = self.survival(s)
        return np.where(surv > 1e-12, self.pdf(s) / self.mass / np.maximum(surv, 1e-300), np.inf)

    def beta0(self):
        """Integral of the normalized survival function (= normalized mean)."""
        return self.mean / self.mass

    def normalization_error(self):
        return abs(self.mass - 1.0)

    def _validate_u(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0.0) or np.any(u >= 1.0):
            raise ValueError("uniform variate must lie strictly inside (0, 1)")
        return u

    @staticmethod
    def _validate_s(s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0):
            raise ValueError("path length must be nonnegative")
        return s


class Exponential(PathLengthDistribution):
    """p(s) = rate * exp(-rate * s)."""

    def __init__(self, rate):
        if rate <= 0.0:
            raise ValueError(f"exponential rate must be positive, got {rate}")
        self.rate = float(rate)
        self.mean = 1.0 / self.rate

    def pdf(self, s):
        s = self._validate_s(s)
        return self.rate * np.exp(-self.rate * s)

    def cdf(self, s):
        s = self._validate_s(s)
        return -np.expm1(-self.rate * s)

    def sample(self, u):
        u = self._validate_u(u)
        return -np.log1p(-u) / self.rate

    def moment(self, k, upper=np.inf):
        if k not in (1, 2):
            raise ValueError("moment order must be 1 or 2")
        if np.isinf(upper):
            return {1: self.mean, 2: 2.0 / self.rate**2}[k]
        x = self.rate * upper
        if k == 1:
            return (1.0 - (1.0 + x) * np.exp(-x)) / self.rate
        return (2.0 - (x * x + 2.0 * x + 2.0) * np.exp(-x)) / self.rate**2


class PowerLawTail(PathLengthDistribution):
    """Constant core on [0,1], exact power tail d0/s^(alpha+1) for s > 1."""

    def __init__(self, alpha, d0):
        if alpha <= 1.0:
            raise ValueError(f"alpha must exceed 1 (finite mean), got {alpha}")
        if not 0.0 < d0 < alpha:
            raise ValueError(f"need 0 < d0 < alpha for a nonnegative core, got d0={d0}, alpha={alpha}")
        self.alpha = float(alpha)
        self.d0 = float(d0)
        self.core = 1.0 - self.d0 / self.alpha   # tail mass is d0/alpha
        self.tail = (self.alpha, self.d0, 1.0)
        self.mean = self.core / 2.0 + self.d0 / (self.alpha - 1.0)

    def pdf(self, s):
        s = self._validate_s(s)
        return np.where(s <= 1.0, self.core, self.d0 * np.maximum(s, 1.0) ** (-self.alpha - 1.0))

    def cdf(self, s):
        s = self._validate_s(s)
        return np.where(s <= 1.0, self.core * s,
                        1.0 - (self.d0 / self.alpha) * np.maximum(s, 1.0) ** (-self.alpha))

    def sample(self, u):
        u = self._validate_u(u)
        tail_scale = self.d0 / self.alpha
        return np.where(u <= self.core, u / self.core,
                        (tail_scale / np.maximum(1.0 - u, 1e-300)) ** (1.0 / self.alpha))

    def moment(self, k, upper=np.inf):
        if k not in (1, 2):
            raise ValueError("moment order must be 1 or 2")
        a, d0 = self.alpha, self.d0
        if np.isinf(upper):
            if k >= a:
                raise ValueError(f"moment of order {k} diverges for tail exponent alpha={a}")
            return self.core / (k + 1.0) + d0 / (a - k)
        core_part = self.core * min(upper, 1.0) ** (k + 1) / (k + 1.0)
        if upper <= 1.0:
            return core_part
        if abs(a - k) < 1e-12:
            return core_part + d0 * np.log(upper)
        return core_part + d0 * (1.0 - upper ** (k - a)) / (a - k)


class LorentzGas2D(PathLengthDistribution):
    """Explicit path-length law of the 2D periodic Lorentz gas.

    The density is 24/pi^2 on [0, 1/2) and, for s >= 1/2,

        (24/pi^2) * ( 1/(2s) + 2(1-1/(2s))^2 ln|1-1/(2s)|
                      - (1/2)(1-1/s)^2 ln|1-1/s| ),

    with the logarithms taken of absolute values so the expression is real
    on (1/2, 1).  As s -> infinity it behaves like (2/pi^2)/s^3, the
    borderline (alpha = 2) tail.

    Caveat: the written density integrates to 2 (and has first moment 1),
    not to 1 -- the constant core alone already carries mass 12/pi^2 > 1.
    Construction flags this loudly.  ``pdf``/``cdf``/``moment`` report the
    written values; sampling and the survival/hazard layer use the
    mass-normalized law.
    """

    S_CUT = 1.0e4          # beyond this the CDF table switches to the analytic tail
    TAIL_C3 = 2.0 / np.pi**2
    TAIL_C4 = 3.0 / (4.0 * np.pi**2)

    def __init__(self):
        self._build_table()
        self.mean = self.moment(1, np.inf) / 1.0
        self.tail = None
        self.tail_asymptotic = (2.0, self.TAIL_C3, self.S_CUT)
        if self.normalization_error() > 1e-6:
            warnings.warn(
                f"LorentzGas2D density as written integrates to {self.mass:.9f}, not 1; "
                "sampling and survival quantities use the mass-normalized law",
                RuntimeWarning,
                stacklevel=2,
            )

    @staticmethod
    def _branch2(s):
        s = np.asarray(s, dtype=float)
        x = 1.0 - 1.0 / (2.0 * s)
        y = 1.0 - 1.0 / s
        # x^2 ln|x| -> 0 as x -> 0; guard the log
        t2 = 2.0 * np.where(np.abs(x) > 1e-300, x * x * np.log(np.abs(np.where(x == 0, 1.0, x))), 0.0)
        t3 = -0.5 * np.where(np.abs(y) > 1e-300, y * y * np.log(np.abs(np.where(y == 0, 1.0, y))), 0.0)
        return (24.0 / np.pi**2) * (1.0 / (2.0 * s) + t2 + t3)

    def pdf(self, s):
        s = self._validate_s(s)
        flat = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.full_like(flat, 24.0 / np.pi**2)
        hi = flat >= 0.5
        if np.any(hi):
            out[hi] = self._branch2(flat[hi])
        return out if np.ndim(s) else float(out[0])

    def _build_table(self):
        # graded knots: linear near the branch structure, log-spaced in the tail
        knots = np.concatenate([
            np.linspace(0.5, 2.0, 601),
            np.geomspace(2.0, self.S_CUT, 1400)[1:],
        ])
        increments = _panel_integrate(self._branch2, knots)
        cdf = np.concatenate([[12.0 / np.pi**2], 12.0 / np.pi**2 + np.cumsum(increments)])
        self._knots = knots
        self._cdf_knots = cdf
        # analytic remainder beyond S_CUT from the two-term tail expansion
        self._tail_rest = self.TAIL_C3 / (2.0 * self.S_CUT**2) + self.TAIL_C4 / (3.0 * self.S_CUT**3)
        self.mass = float(cdf[-1] + self._tail_rest)

    def cdf(self, s):
        s = self._validate_s(s)
        flat = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.where(flat < 0.5, 24.0 / np.pi**2 * flat, 0.0)
        mid = (flat >= 0.5) & (flat <= self.S_CUT)
        out[mid] = np.interp(flat[mid], self._knots, self._cdf_knots)
        hi = flat > self.S_CUT
        if np.any(hi):
            sh = flat[hi]
            rest = self.TAIL_C3 / (2.0 * sh**2) + self.TAIL_C4 / (3.0 * sh**3)
            out[hi] = self.mass - rest
        return out if np.ndim(s) else float(out[0])

    def sample(self, u):
        u = self._validate_u(u)
        flat = np.atleast_1d(np.asarray(u, dtype=float))
        target = flat * self.mass
        out = np.empty_like(flat)
        lo = target < 12.0 / np.pi**2
        out[lo] = target[lo] / (24.0 / np.pi**2)
        cut_cdf = self._cdf_knots[-1]
        mid = (~lo) & (target <= cut_cdf)
        out[mid] = np.interp(target[mid], self._cdf_knots, self._knots)
        hi = target > cut_cdf
        if np.any(hi):
            # invert mass - C3/(2 s^2) - C4/(3 s^3), leading term then one Newton step
            rest = np.maximum(self.mass - target[hi], 1e-300)
            s0 = np.sqrt(self.TAIL_C3 / (2.0 * rest))
            f = self.TAIL_C3 / (2.0 * s0**2) + self.TAIL_C4 / (3.0 * s0**3) - rest
            df = -self.TAIL_C3 / s0**3 - self.TAIL_C4 / s0**4
            out[hi] = s0 - f / df
        return out if np.ndim(u) else float(out[0])

    def moment(self, k, upper=np.inf):
        if k not in (1, 2):
            raise ValueError("moment order must be 1 or 2")
        if np.isinf(upper) and k == 2:
            raise ValueError("second moment of the Lorentz-gas law diverges (logarithmically)")
        up = float(upper)
        val = 24.0 / np.pi**2 * min(up, 0.5) ** (k + 1) / (k + 1.0)
        if up <= 0.5:
            return val
        seg_hi = min(up, self.S_CUT)
        knots = self._knots[self._knots < seg_hi]
        edges = np.concatenate([knots, [seg_hi]])
        val += float(np.sum(_panel_integrate(lambda s: s**k * self._branch2(s), edges)))
        if up > self.S_CUT:
            if k == 1:
                val += self.TAIL_C3 * (1.0 / self.S_CUT - (0.0 if np.isinf(up) else 1.0 / up)) + \
                    self.TAIL_C4 / 2.0 * (self.S_CUT**-2 - (0.0 if np.isinf(up) else up**-2))
            else:
                val += self.TAIL_C3 * np.log(up / self.S_CUT) + self.TAIL_C4 * (1.0 / self.S_CUT - 1.0 / up)
        return val


class Tabulated(PathLengthDistribution):
    """Piecewise-linear density from a two-column (s, p) table.

    The table must have strictly increasing s >= 0 and nonnegative values;
    it is renormalized at construction so the interpolated density has unit
    mass (the written and normalized layers coincide).
    """

    def __init__(self, s, p):
        s = np.asarray(s, dtype=float)
        p = np.asarray(p, dtype=float)
        if s.ndim != 1 or s.shape != p.shape or len(s) < 2:
            raise ValueError("table must be two columns of equal length >= 2")
        if np.any(np.diff(s) <= 0.0):
            raise ValueError("table s values must be strictly increasing")
        if s[0] < 0.0:
            raise ValueError("table s values must be nonnegative")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)):
            raise ValueError("table densities must be finite and nonnegative")
        raw_mass = np.trapezoid(p, s)
        if not raw_mass > 0.0:
            raise ValueError("table is not normalizable (zero mass)")
        # refine knots so that linear interpolation of the CDF is accurate
        fine = np.unique(np.concatenate([s, 0.5 * (s[1:] + s[:-1]),
                                         0.25 * s[1:] + 0.75 * s[:-1],
                                         0.75 * s[1:] + 0.25 * s[:-1]]))
        self._s = fine
        self._p = np.interp(fine, s, p) / raw_mass
        seg = np.diff(fine) * 0.5 * (self._p[1:] + self._p[:-1])
        self._cdf = np.concatenate([[0.0], np.cumsum(seg)])
        self._cdf /= self._cdf[-1]
        self._p /= np.trapezoid(self._p, fine)
        self.mean = float(np.trapezoid(fine * self._p, fine))

    def pdf(self, s):
        s = self._validate_s(s)
        return np.interp(s, self._s, self._p, left=0.0, right=0.0)

    def cdf(self, s):
        s = self._validate_s(s)
        return np.interp(s, self._s, self._cdf, left=0.0, right=1.0)

    def sample(self, u):
        u = self._validate_u(u)
        return np.interp(u, self._cdf, self._s)

    def moment(self, k, upper=np.inf):
        if k not in (1, 2):
            raise ValueError("moment order must be 1 or 2")
        hi = min(float(upper), self._s[-1])
        grid = self._s[self._s <= hi]
        if len(grid) == 0 or grid[-1] < hi:
            grid = np.concatenate([grid, [hi]])
        return float(np.trapezoid(grid**k * np.interp(grid, self._s, self._p), grid))

    @classmethod
    def from_file(cls, path):
        data = np.loadtxt(path)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError(f"{path}: expected two whitespace-separated columns (s, p)")
        return cls(data[:, 0], data[:, 1])


def make_distribution(kind, **params):
    """Factory used by the config layer; kind is one of
    'exponential', 'powerlaw', 'lorentz', 'table'."""
    kind = kind.lower()
    if kind == "exponential":
        return Exponential(params["rate"])
    if kind == "powerlaw":
        return PowerLawTail(params["alpha"], params["d0"])
    if kind == "lorentz":
        return LorentzGas2D()
    if kind == "table":
        return Tabulated.from_file(params["path"])
    raise ValueError(f"unknown path-length family '{kind}'")
