"""Adaptive tensor-product quadrature over axis-aligned boxes.

Jump-measure integrals against smooth finite-activity densities reduce to
integrals over a truncated box in 1 to 3 dimensions.  ``box_quad`` below
subdivides the box adaptively, using a tensor Gauss-Legendre rule of order
15 per cell with an embedded order-7 rule for the error estimate.  The
integrand must be vectorised: it receives an ``(m, d)`` array of points and
returns ``(m,)`` values (real or complex).

scipy's scalar QUADPACK routines stay in use for one-dimensional contour
integrals (see :mod:`levydual.pricing`); this module exists because nested
scalar quadrature in 2-3 dimensions is orders of magnitude slower than a
vectorised tensor rule on the smooth integrands that arise here.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np

from .errors import QuadratureError

_RULE_LO = 7
_RULE_HI = 15


def _tensor_rule(dim: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    # Nodes/weights on [-1, 1]^dim, cached per (dim, order).
    key = (dim, order)
    cached = _RULE_CACHE.get(key)
    if cached is not None:
        return cached
    x, w = np.polynomial.legendre.leggauss(order)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.ones(nodes.shape[0])
    for g in np.meshgrid(*([w] * dim), indexing="ij"):
        weights *= g.ravel()
    _RULE_CACHE[key] = (nodes, weights)
    return nodes, weights


_RULE_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


class _Cell:
    __slots__ = ("lo", "hi", "value", "error")

    def __init__(self, lo, hi, value, error):
        self.lo = lo
        self.hi = hi
        self.value = value
        self.error = error

    def __lt__(self, other):  # inverted so heappop yields the worst cell
        return self.error > other.error


def _eval_cell(f, lo, hi):
    dim = len(lo)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    scale = np.prod(half)
    nodes_hi, w_hi = _tensor_rule(dim, _RULE_HI)
    nodes_lo, w_lo = _tensor_rule(dim, _RULE_LO)
    vals_hi = np.asarray(f(mid + nodes_hi * half))
    vals_lo = np.asarray(f(mid + nodes_lo * half))
    value = scale * (w_hi @ vals_hi)
    rough = scale * (w_lo @ vals_lo)
    return value, float(np.max(np.abs(value - rough)))


def box_quad(f, lo, hi, *, abs_tol: float = 1e-11, max_cells: int = 4000):
    """Integrate a vectorised integrand over the box ``[lo, hi]``.

    Parameters
    ----------
    f : callable
        Maps an ``(m, d)`` array of points to ``(m,)`` values.
    lo, hi : array_like
        Box corners, length ``d`` with ``d`` in ``{1, 2, 3}``.
    abs_tol : float
        Target bound on the summed per-cell error estimates.
    max_cells : int
        Subdivision budget before giving up.

    Raises
    ------
    QuadratureError
        If the error target is not met within the cell budget.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("box corners must be 1-d arrays of equal length")
    if not np.all(hi > lo):
        raise ValueError("box must have positive volume")

    value, error = _eval_cell(f, lo, hi)
    cells = [_Cell(lo, hi, value, error)]
    heapq.heapify(cells)
    total_err = error
    while total_err > abs_tol:
        if len(cells) >= max_cells:
            raise QuadratureError(
                f"box_quad: error {total_err:.3e} above tolerance {abs_tol:.3e} "
                f"after {len(cells)} cells"
            )
        worst = heapq.heappop(cells)
        total_err -= worst.error
        axis = int(np.argmax(worst.hi - worst.lo))
        mid = 0.5 * (worst.lo[axis] + worst.hi[axis])
        for side in range(2):
            lo_s = worst.lo.copy()
            hi_s = worst.hi.copy()
            if side == 0:
                hi_s[axis] = mid
            else:
                lo_s[axis] = mid
            v, e = _eval_cell(f, lo_s, hi_s)
            heapq.heappush(cells, _Cell(lo_s, hi_s, v, e))
            total_err += e
    return sum(c.value for c in cells)


def centred_box(radius: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Corners of the symmetric box ``[-radius, radius]^dim``."""
    r = float(radius)
    if r <= 0:
        raise ValueError("radius must be positive")
    return -r * np.ones(dim), r * np.ones(dim)


def ball_quad(f, radius: float, dim: int, *, abs_tol: float = 1e-11):
    """Integrate a vectorised integrand over the Euclidean ball of ``radius``.

    Truncation-function integrals are supported on a ball, and integrating
    them on a box stalls the adaptive rule on the curved boundary.  Polar
    (2-d) and spherical (3-d) coordinates turn the ball into a box with a
    smooth integrand, which is what :func:`box_quad` expects.
    """
    if dim == 1:
        return box_quad(f, [-radius], [radius], abs_tol=abs_tol)
    if dim == 2:
        def polar(P):
            r, phi = P[:, 0], P[:, 1]
            X = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
            vals = np.asarray(f(X))
            return vals * r if vals.ndim == 1 else vals * r[:, None]

        return box_quad(polar, [0.0, 0.0], [radius, 2.0 * np.pi], abs_tol=abs_tol)
    if dim == 3:
        def spherical(P):
            r, theta, phi = P[:, 0], P[:, 1], P[:, 2]
            st = np.sin(theta)
            X = np.column_stack([
                r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta)])
            vals = np.asarray(f(X))
            jac = r * r * st
            return vals * jac if vals.ndim == 1 else vals * jac[:, None]

        return box_quad(spherical, [0.0, 0.0, 0.0],
                        [radius, np.pi, 2.0 * np.pi], abs_tol=abs_tol)
    raise ValueError("ball_quad supports dimensions 1 to 3")
