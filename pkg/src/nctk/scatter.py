"""Angular scattering kernels sigma(v . v') on the unit sphere.

All kernels are normalized against the unit measure: the integral of
sigma(v . v') dv over S^{n-1} equals 1 for every v'.  With that convention
the polar-cosine marginal density is sigma(mu)/2 on [-1, 1] for n = 3 and
sigma(cos phi)/(2 pi) d phi for n = 2.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ScatterKernel",
    "Isotropic",
    "LinearAnisotropic",
    "TabulatedKernel",
    "mean_cosine",
    "kernel_matrix",
    "collapsed_kernel_matrix",
    "sample_direction",
    "make_kernel",
]


class ScatterKernel:
    """Base class.  Subclasses provide sigma(mu) for mu = v . v' in [-1, 1]."""

    def __init__(self, dimension):
        if dimension not in (2, 3):
            raise ValueError(f"unsupported dimension {dimension}")
        self.dimension = dimension

    def sigma(self, mu):
        raise NotImplementedError

    @property
    def sigma_min(self):
        """Lower bound sigma_0 of the kernel over [-1, 1]."""
        grid = np.linspace(-1.0, 1.0, 2001)
        return float(np.min(self.sigma(grid)))

    def sample_mu(self, rng, size=None):
        """Draw polar cosines from the kernel's marginal density."""
        raise NotImplementedError


class Isotropic(ScatterKernel):
    """sigma(mu) = 1 under the unit measure."""

    def sigma(self, mu):
        return np.ones_like(np.asarray(mu, dtype=float))

    def sample_mu(self, rng, size=None):
        if self.dimension == 3:
            return rng.uniform(-1.0, 1.0, size)
        phi = rng.uniform(0.0, 2.0 * np.pi, size)
        return np.cos(phi)


class LinearAnisotropic(ScatterKernel):
    """sigma(mu) = 1 + a * mu with |a| < 1 (keeps sigma > 0).

    For n = 3 the mean scattering cosine is a/3; the linear term is the
    simplest way to exercise the anisotropy correction in the diffusion
    coefficient.
    """

    def __init__(self, a, dimension=3):
        super().__init__(dimension)
        if not abs(a) < 1.0:
            raise ValueError(f"|a| must be < 1 to keep sigma positive, got {a}")
        self.a = float(a)

    def sigma(self, mu):
        return 1.0 + self.a * np.asarray(mu, dtype=float)

    def sample_mu(self, rng, size=None):
        if self.dimension == 3:
            # marginal (1 + a mu)/2 on [-1,1]: invert the quadratic CDF
            u = rng.uniform(0.0, 1.0, size)
            a = self.a
            if abs(a) < 1e-12:
                return 2.0 * u - 1.0
            return (-1.0 + np.sqrt((1.0 - a) ** 2 + 4.0 * a * u)) / a
        # n = 2: rejection against the flat envelope
        size_ = 1 if size is None else int(np.prod(size))
        out = np.empty(size_)
        have = 0
        while have < size_:
            phi = rng.uniform(0.0, 2.0 * np.pi, size_ - have)
            acc = rng.uniform(0.0, 1.0 + abs(self.a), size_ - have) < self.sigma(np.cos(phi))
            got = phi[acc]
            out[have:have + len(got)] = np.cos(got)
            have += len(got)
        return out.reshape(size) if size is not None else float(out[0])


class TabulatedKernel(ScatterKernel):
    """Linear interpolation of a (mu, sigma) table, renormalized at construction."""

    def __init__(self, mu, values, dimension=3):
        super().__init__(dimension)
        mu = np.asarray(mu, dtype=float)
        values = np.asarray(values, dtype=float)
        if mu.ndim != 1 or mu.shape != values.shape or len(mu) < 2:
            raise ValueError("kernel table must be two columns of equal length >= 2")
        if np.any(np.diff(mu) <= 0.0) or mu[0] < -1.0 or mu[-1] > 1.0:
            raise ValueError("kernel table mu must be strictly increasing within [-1, 1]")
        if np.any(values < 0.0):
            raise ValueError("kernel table values must be nonnegative")
        grid = np.linspace(-1.0, 1.0, 4001)
        raw = np.interp(grid, mu, values)
        if self.dimension == 3:
            norm = np.trapezoid(raw, grid) / 2.0
        else:
            phi = np.linspace(0.0, np.pi, 4001)
            norm = np.trapezoid(np.interp(np.cos(phi), mu, values), phi) / np.pi
        if not norm > 0.0:
            raise ValueError("kernel table has zero mass")
        self._mu = mu
        self._val = values / norm
        # cache the mu-marginal inverse CDF for sampling
        dens = np.interp(grid, self._mu, self._val)
        if self.dimension == 3:
            cdf = np.concatenate([[0.0], np.cumsum(np.diff(grid) * 0.5 * (dens[1:] + dens[:-1]))])
        else:
            phi = np.linspace(0.0, np.pi, 4001)
            d = np.interp(np.cos(phi), self._mu, self._val)
            cdf_phi = np.concatenate([[0.0], np.cumsum(np.diff(phi) * 0.5 * (d[1:] + d[:-1]))])
            # fold the angle CDF back to mu = cos(phi), phi uniform-signed
            grid = np.cos(phi)[::-1]
            cdf = (cdf_phi[-1] - cdf_phi)[::-1]
        self._cdf_grid = grid
        self._cdf = cdf / cdf[-1]

    def sigma(self, mu):
        return np.interp(np.asarray(mu, dtype=float), self._mu, self._val)

    def sample_mu(self, rng, size=None):
        u = rng.uniform(0.0, 1.0, size)
        return np.interp(u, self._cdf, self._cdf_grid)

    @classmethod
    def from_file(cls, path, dimension=3):
        data = np.loadtxt(path)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError(f"{path}: expected two whitespace-separated columns (mu, sigma)")
        return cls(data[:, 0], data[:, 1], dimension)


def mean_cosine(kernel, quad):
    """Average scattering cosine: integral of sigma(v . v')(v . v') dv.

    Independent of v' by rotational symmetry; evaluated with the polar axis
    as the reference direction.  Must satisfy |mu0| < 1, which keeps the
    anisotropy factor 1/(1 - mu0) finite.
    """
    if kernel.dimension != quad.dimension:
        raise ValueError("kernel and quadrature dimensions differ")
    e = np.zeros(quad.dimension)
    e[-1] = 1.0
    b = quad.polar_cosines(e)
    mu0 = float(quad.integrate(kernel.sigma(b) * b))
    if not abs(mu0) < 1.0:
        raise ValueError(f"mean scattering cosine {mu0} outside (-1, 1)")
    return mu0


def kernel_matrix(kernel, quad):
    """Discrete kernel operator K_ij = sigma(v_i . v_j) w_j over quadrature nodes."""
    if kernel.dimension != quad.dimension:
        raise ValueError("kernel and quadrature dimensions differ")
    dots = np.clip(quad.nodes @ quad.nodes.T, -1.0, 1.0)
    return kernel.sigma(dots) * quad.weights[None, :]


def collapsed_kernel_matrix(kernel, quad):
    """Azimuth-averaged kernel acting on functions of the polar cosine.

    For n = 3 product quadratures, averaging sigma over the azimuth ring
    maps functions of mu to functions of mu; returns the (order x order)
    matrix including the mu weights.  For n = 2 this is the full matrix.
    """
    if quad.dimension == 2:
        return kernel_matrix(kernel, quad)
    mu = quad.mu
    st = np.sqrt(1.0 - mu**2)
    n_az = 2 * quad.order
    dphi = 2.0 * np.pi * (np.arange(n_az) + 0.5) / n_az
    cosd = np.cos(dphi)
    # sigma(mu_i mu_j + sqrt(1-mu_i^2) sqrt(1-mu_j^2) cos dphi) averaged over dphi
    dots = mu[:, None, None] * mu[None, :, None] + (st[:, None] * st[None, :])[:, :, None] * cosd[None, None, :]
    avg = np.mean(kernel.sigma(np.clip(dots, -1.0, 1.0)), axis=2)
    return avg * quad.mu_weights[None, :]


def _orthonormal_frame(v):
    """Two unit vectors orthogonal to a 3-vector v."""
    t = np.array([0.0, 0.0, 1.0]) if abs(v[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(v, t)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    return e1, e2


def sample_direction(kernel, v_in, rng):
    """Draw an outgoing direction from sigma(v_in . v), rotated into the frame of v_in."""
    v_in = np.asarray(v_in, dtype=float)
    mu = float(kernel.sample_mu(rng))
    if kernel.dimension == 2:
        # rotate v_in by +/- the polar angle with a random sign
        ang = np.arccos(np.clip(mu, -1.0, 1.0)) * (1.0 if rng.uniform() < 0.5 else -1.0)
        c, s = np.cos(ang), np.sin(ang)
        return np.array([c * v_in[0] - s * v_in[1], s * v_in[0] + c * v_in[1]])
    e1, e2 = _orthonormal_frame(v_in)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    st = np.sqrt(max(0.0, 1.0 - mu * mu))
    out = mu * v_in + st * (np.cos(phi) * e1 + np.sin(phi) * e2)
    return out / np.linalg.norm(out)


def make_kernel(kind, dimension=3, **params):
    kind = kind.lower()
    if kind == "isotropic":
        return Isotropic(dimension)
    if kind == "linear":
        return LinearAnisotropic(params["a"], dimension)
    if kind == "table":
        return TabulatedKernel.from_file(params["path"], dimension)
    raise ValueError(f"unknown kernel family '{kind}'")
