"""Constraint-set oracles: lp balls and boxes.

Each set exposes membership, the gauge function, linear optimization,
Euclidean projection, and the curvature constants (lam for strong convexity
of the set, beta for strong convexity of the squared gauge).  Oracles are
stateless; instances are safe for concurrent use.
"""

from __future__ import annotations

import numpy as np

from .core import UnsupportedOperationError, as_point


class ConvexSet:
    """Base constraint set.  Subclasses fill in the geometry."""

    lam = 0.0
    beta = 0.0
    contains_origin = True

    def gauge(self, x) -> float:
        raise NotImplementedError

    def lin_opt(self, c) -> np.ndarray:
        """argmin over the set of <c, x>.  c = 0 returns the documented
        tie-break point (first boundary basis direction for balls, lower
        corner for boxes)."""
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.gauge(x) <= 1.0 + tol

    def diameter(self) -> float:
        raise NotImplementedError

    def sample_dim(self, rng, n: int, dim: int) -> np.ndarray:
        """n points of the set, uniform-ish; used by verification code."""
        raise NotImplementedError


class L2Ball(ConvexSet):
    """Euclidean ball of radius r centered at the origin."""

    def __init__(self, r: float):
        if r <= 0:
            raise ValueError("radius must be positive")
        self.r = float(r)
        self.p = 2.0
        self.lam = 1.0 / self.r
        self.beta = 2.0 / self.r**2

    def __repr__(self):
        return f"L2Ball(r={self.r})"

    def gauge(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float))) / self.r

    def lin_opt(self, c) -> np.ndarray:
        c = as_point(c)
        n = float(np.linalg.norm(c))
        if n == 0.0:
            out = np.zeros_like(c)
            out[0] = self.r
            return out
        return -self.r * c / n

    def project(self, x) -> np.ndarray:
        x = as_point(x)
        n = float(np.linalg.norm(x))
        if n <= self.r:
            return x.copy()
        return self.r * x / n

    def diameter(self) -> float:
        return 2.0 * self.r

    def sample_dim(self, rng, n: int, dim: int) -> np.ndarray:
        g = rng.standard_normal(size=(n, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        radii = self.r * rng.random(size=(n, 1)) ** (1.0 / dim)
        return g * radii


class LpBall(ConvexSet):
    """lp-norm ball {||x||_p <= r} for p in (1, 2].

    Curvature constants: lam = (p-1)/r for the set, beta = 2(p-1)/r^2 for
    the squared gauge (with respect to the lp norm).  p > 2 is rejected:
    the constants are only established on (1, 2].
    """

    def __init__(self, p: float, r: float):
        if not (1.0 < p <= 2.0):
            raise UnsupportedOperationError("LpBall requires p in (1, 2]")
        if r <= 0:
            raise ValueError("radius must be positive")
        self.p = float(p)
        self.r = float(r)
        self.q = self.p / (self.p - 1.0)  # dual exponent
        self.lam = (self.p - 1.0) / self.r
        self.beta = 2.0 * (self.p - 1.0) / self.r**2

    def __repr__(self):
        return f"LpBall(p={self.p}, r={self.r})"

    def _norm(self, x) -> float:
        return float(np.sum(np.abs(x) ** self.p) ** (1.0 / self.p))

    def gauge(self, x) -> float:
        return self._norm(np.asarray(x, dtype=float)) / self.r

    def lin_opt(self, c) -> np.ndarray:
        # Hoelder equality case: |x_i| proportional to |c_i|^(q-1).
        c = as_point(c)
        if not np.any(c):
            out = np.zeros_like(c)
            out[0] = self.r
            return out
        a = np.abs(c)
        dual = float(np.sum(a**self.q) ** (1.0 / self.q))
        x = (a / dual) ** (self.q - 1.0)
        return -self.r * np.sign(c) * x

    def project(self, x) -> np.ndarray:
        """Euclidean projection via bisection on the boundary multiplier.

        On the boundary the KKT system is |x_i| = u_i + mu * p * u_i^(p-1)
        with z_i = sign(x_i) u_i; u(mu) decreases in mu, so an outer
        bisection on mu with an inner coordinate-wise bisection reaches
        absolute tolerance 1e-10 well within the iteration caps.
        """
        x = as_point(x)
        if self._norm(x) <= self.r:
            return x.copy()
        a = np.abs(x)

        def radial(mu):
            lo = np.zeros_like(a)
            hi = a.copy()
            for _ in range(90):
                mid = 0.5 * (lo + hi)
                too_big = mid + mu * self.p * mid ** (self.p - 1.0) > a
                hi = np.where(too_big, mid, hi)
                lo = np.where(too_big, lo, mid)
            return 0.5 * (lo + hi)

        mu_lo, mu_hi = 0.0, 1.0
        while self._norm(radial(mu_hi)) > self.r:
            mu_hi *= 2.0
            if mu_hi > 1e12:
                raise RuntimeError("projection bisection failed to bracket")
        for _ in range(200):
            mu = 0.5 * (mu_lo + mu_hi)
            u = radial(mu)
            if self._norm(u) > self.r:
                mu_lo = mu
            else:
                mu_hi = mu
            if mu_hi - mu_lo < 1e-14 * max(1.0, mu_hi):
                break
        u = radial(0.5 * (mu_lo + mu_hi))
        return np.sign(x) * u

    def diameter(self) -> float:
        # for p <= 2 the extreme l2 distance is attained at +-r e_i
        return 2.0 * self.r

    def sample_dim(self, rng, n: int, dim: int) -> np.ndarray:
        g = rng.standard_normal(size=(n, dim))
        norms = np.sum(np.abs(g) ** self.p, axis=1) ** (1.0 / self.p)
        g = g / norms[:, None]
        return self.r * g * rng.random(size=(n, 1)) ** (1.0 / dim)


class Box(ConvexSet):
    """Axis-aligned box [lower, upper].  Not strongly convex: lam = beta = 0.

    Gauge operations are only defined when the origin is interior.
    """

    def __init__(self, lower, upper):
        self.lower = as_point(lower)
        self.upper = as_point(upper, dim=self.lower.size)
        if np.any(self.lower >= self.upper):
            raise ValueError("box requires lower < upper coordinate-wise")
        self.lam = 0.0
        self.beta = 0.0
        self.contains_origin = bool(np.all(self.lower <= 0) and np.all(self.upper >= 0))
        self._origin_interior = bool(np.all(self.lower < 0) and np.all(self.upper > 0))

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"

    def gauge(self, x) -> float:
        if not self._origin_interior:
            raise UnsupportedOperationError("box gauge needs the origin interior")
        x = as_point(x, dim=self.lower.size)
        ratios = np.where(x > 0, x / self.upper, np.where(x < 0, x / self.lower, 0.0))
        return float(np.max(ratios)) if x.size else 0.0

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_point(x, dim=self.lower.size)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def lin_opt(self, c) -> np.ndarray:
        c = as_point(c, dim=self.lower.size)
        # c_i = 0 resolves to the lower bound, so c = 0 gives the lower corner
        return np.where(c > 0, self.lower, np.where(c < 0, self.upper, self.lower))

    def project(self, x) -> np.ndarray:
        x = as_point(x, dim=self.lower.size)
        return np.clip(x, self.lower, self.upper)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def sample_dim(self, rng, n: int, dim: int) -> np.ndarray:
        if dim != self.lower.size:
            raise ValueError("box dimension is fixed by its bounds")
        u = rng.random(size=(n, dim))
        return self.lower + u * (self.upper - self.lower)


def grid_points(set_, resolution: int, dim: int) -> np.ndarray:
    """Uniform grid over the set's bounding box, filtered by membership.

    Intended for brute-force verification in dimension <= 2.  Returns an
    (n, dim) array including the boundary-box corners that pass the
    membership test.
    """
    if dim > 2:
        raise UnsupportedOperationError("grids are only provided for dims <= 2")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if isinstance(set_, Box):
        axes = [np.linspace(set_.lower[i], set_.upper[i], resolution) for i in range(dim)]
    else:
        axes = [np.linspace(-set_.r, set_.r, resolution) for _ in range(dim)]
    if dim == 1:
        pts = axes[0][:, None]
    else:
        g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([g0.ravel(), g1.ravel()])
    if isinstance(set_, Box):
        return pts
    norms = np.sum(np.abs(pts) ** set_.p, axis=1) ** (1.0 / set_.p)
    return pts[norms <= set_.r * (1.0 + 1e-12)]


def gauge_by_bisection(set_, x, tol: float = 1e-12) -> float:
    """Independent gauge oracle: bisection on c with the membership test."""
    x = as_point(x)
    if not np.any(x):
        return 0.0
    hi = 1.0
    while not set_.contains(x / hi, tol=0.0):
        hi *= 2.0
        if hi > 1e18:
            raise RuntimeError("gauge bisection failed to bracket")
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid > 0 and set_.contains(x / mid, tol=0.0):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def strongly_convex_br_lipschitz_check(set_, p, q, slack: float = 1e-9) -> bool:
    """Check the support-point Lipschitz inequality on a strongly convex set.

    With x_p = argmax <p, x> and x_q = argmax <q, x> over the set, tests
    ||x_p - x_q|| <= 2 ||p - q|| / (lam (||p|| + ||q||)) up to slack.
    """
    if set_.lam <= 0:
        raise UnsupportedOperationError("set is not strongly convex")
    p = as_point(p)
    q = as_point(q)
    np_, nq = float(np.linalg.norm(p)), float(np.linalg.norm(q))
    if np_ == 0.0 or nq == 0.0:
        raise ValueError("inputs must be nonzero")
    xp = set_.lin_opt(-p)
    xq = set_.lin_opt(-q)
    lhs = float(np.linalg.norm(xp - xq))
    rhs = 2.0 * float(np.linalg.norm(p - q)) / (set_.lam * (np_ + nq))
    return lhs <= rhs + slack
