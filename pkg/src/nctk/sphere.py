"""Direction sets on the unit sphere S^{n-1} (n = 2, 3).

All angular integrals in this package use the *unit* measure on the sphere,
i.e. integral of the constant 1 equals 1.  A quadrature therefore carries
weights that sum to one.  For n = 3 we use a product rule: Gauss-Legendre
nodes in the polar cosine and a uniform azimuth ring; for n = 2, equispaced
angles on the circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DirectionQuadrature:
    """Quadrature for integrals over S^{n-1} with the unit measure.

    Attributes
    ----------
    dimension : 2 or 3
    nodes     : (m, dimension) array of unit vectors
    weights   : (m,) nonnegative weights summing to 1
    order     : number of polar Gauss nodes (n=3) or angles (n=2)
    mu        : polar cosines of the Gauss rule (n=3) or node cosines
                against the x-axis (n=2); used by reduced radial solves
    mu_weights: weights of the polar rule (sum to 1)
    """

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray
    order: int
    mu: np.ndarray = field(repr=False, default=None)
    mu_weights: np.ndarray = field(repr=False, default=None)

    def integrate(self, values):
        """Integrate node samples against the unit measure."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))

    def polar_cosines(self, e):
        """Dot products of all nodes against a unit vector e."""
        e = np.asarray(e, dtype=float)
        return self.nodes @ e

    @property
    def n_nodes(self):
        return len(self.weights)


def make_quadrature(n, order=16):
    """Build a DirectionQuadrature.

    For n = 3 the rule is a (polar cosine) x (azimuth) product with `order`
    Gauss-Legendre nodes in mu and 2*order uniform azimuths, exact for
    v-polynomials up to degree 2*order - 1.  For n = 2 it is `order`
    equispaced angles, exact for trigonometric polynomials up to degree
    order - 1.
    """
    if n not in (2, 3):
        raise ValueError(f"unsupported dimension {n}; expected 2 or 3")
    if order < 4:
        raise ValueError(f"order must be >= 4 to integrate degree-2 polynomials, got {order}")
    if n == 2:
        phi = 2.0 * np.pi * (np.arange(order) + 0.5) / order
        nodes = np.column_stack([np.cos(phi), np.sin(phi)])
        weights = np.full(order, 1.0 / order)
        return DirectionQuadrature(2, nodes, weights, order,
                                   mu=nodes[:, 0].copy(), mu_weights=weights.copy())
    gmu, gw = np.polynomial.legendre.leggauss(order)
    n_az = 2 * order
    phi = 2.0 * np.pi * (np.arange(n_az) + 0.5) / n_az
    sin_t = np.sqrt(1.0 - gmu**2)
    nodes = np.empty((order * n_az, 3))
    weights = np.empty(order * n_az)
    for i in range(order):
        sl = slice(i * n_az, (i + 1) * n_az)
        nodes[sl, 0] = sin_t[i] * np.cos(phi)
        nodes[sl, 1] = sin_t[i] * np.sin(phi)
        nodes[sl, 2] = gmu[i]
        weights[sl] = 0.5 * gw[i] / n_az
    return DirectionQuadrature(3, nodes, weights, order, mu=gmu, mu_weights=0.5 * gw)


def second_direction_moment(quad, e=None):
    """Quadrature value of the integral of (v . e)^2 dv (1/3 for n=3, 1/2 for n=2)."""
    if e is None:
        e = np.zeros(quad.dimension)
        e[-1] = 1.0
    b = quad.polar_cosines(np.asarray(e) / np.linalg.norm(e))
    return float(quad.integrate(b * b))
