"""Differentiable cost functions with analytic gradients.

The scan statistics (EMS, Kulldorff, EBP) appear in relaxed form
``-F(x) + 0.5 * ||x||^2`` over node weights ``x``; their discrete scores on a
node set S equal ``F`` at the indicator vector of S. Least squares backs the
compressive-sensing use.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, ValidationError

__all__ = [
    "DOMAIN_FLOOR",
    "NodeData",
    "CostFunction",
    "EMS",
    "Kulldorff",
    "EBP",
    "LeastSquares",
    "make_cost",
    "normalize_features",
    "ems_value",
    "ems_gradient",
    "ems_hessian",
    "ems_set_score",
    "kulldorff_value",
    "kulldorff_gradient",
    "kulldorff_set_score",
    "ebp_value",
    "ebp_gradient",
    "ebp_set_score",
    "least_squares_value",
    "least_squares_gradient",
]

DOMAIN_FLOOR = 1e-8
NORMALIZE_MARGIN = 1e-3


@dataclass(frozen=True)
class NodeData:
    """Per-node attributes: a feature for EMS, counts for Poisson scans."""

    feature: np.ndarray = None
    observed: np.ndarray = None
    expected: np.ndarray = None

    def __post_init__(self):
        n = None
        for name in ("feature", "observed", "expected"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.array(arr, dtype=np.float64)
            if arr.ndim != 1:
                raise ValidationError(f"{name} must be one-dimensional")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} has non-finite entries")
            if n is not None and len(arr) != n:
                raise ValidationError("node attribute lengths differ")
            n = len(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.observed is not None and np.any(self.observed < 0):
            raise ValidationError("observed counts must be nonnegative")
        if self.expected is not None and np.any(self.expected <= 0):
            raise ValidationError("expected counts must be positive")

    @property
    def n(self):
        for arr in (self.feature, self.observed, self.expected):
            if arr is not None:
                return len(arr)
        return 0


def normalize_features(raw):
    """Affine map of ``raw`` onto ``[0, 1 - 1e-3]`` preserving order.

    A constant input maps to all zeros.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(raw)):
        raise ValidationError("features must be finite")
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return NodeData(feature=np.zeros_like(raw))
    return NodeData(feature=(raw - lo) / (hi - lo) * (1.0 - NORMALIZE_MARGIN))


def _vec(x):
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DomainError("point has non-finite entries")
    return x


def _indicator(n, s):
    s = list(s)
    if not s:
        raise DomainError("score of an empty node set is undefined")
    x = np.zeros(n)
    x[s] = 1.0
    return x


# -- elevated mean scan ---------------------------------------------------

def _ems_mass(x):
    mass = x.sum()
    if mass <= DOMAIN_FLOOR:
        raise DomainError(f"EMS needs sum(x) > {DOMAIN_FLOOR}, got {mass:.3g}")
    return mass


def ems_value(data, x):
    """``-(c.x)^2 / (1.x) + 0.5 ||x||^2``."""
    x = _vec(x)
    mass = _ems_mass(x)
    cx = data.feature @ x
    return float(-cx * cx / mass + 0.5 * (x @ x))


def ems_gradient(data, x):
    x = _vec(x)
    rho = data.feature @ x / _ems_mass(x)
    return -2.0 * rho * data.feature + rho * rho + x


def ems_hessian(data, x):
    """``I - (2 / 1.x) (c - rho 1)(c - rho 1)^T`` with ``rho = c.x / 1.x``."""
    x = _vec(x)
    mass = _ems_mass(x)
    d = data.feature - data.feature @ x / mass
    return np.eye(len(x)) - (2.0 / mass) * np.outer(d, d)


def ems_set_score(data, s):
    """``(sum_{v in S} c_v)^2 / |S|``."""
    s = list(s)
    if not s:
        raise DomainError("EMS score of an empty set is undefined")
    total = float(data.feature[s].sum())
    return total * total / len(s)


# -- Kulldorff --------------------------------------------------------------

def _poisson_sums(data, x):
    x = _vec(x)
    if np.any(x < -1e-12) or np.any(x > 1.0 + 1e-12):
        raise DomainError("Poisson scan statistics need x in [0, 1]^n")
    inside_c = float(data.observed @ x)
    inside_b = float(data.expected @ x)
    if inside_b <= DOMAIN_FLOOR:
        raise DomainError(f"expected mass inside must exceed {DOMAIN_FLOOR}")
    return x, inside_c, inside_b


def _kulldorff_parts(data, x, boundary_ok=False):
    """``(F, dF/dC, dF/dB)`` of Kulldorff's statistic at ``x``."""
    x, c_in, b_in = _poisson_sums(data, x)
    c_out = float(data.observed.sum()) - c_in
    b_out = float(data.expected.sum()) - b_in
    if b_out <= DOMAIN_FLOOR or c_out <= DOMAIN_FLOOR:
        if boundary_ok and b_out <= DOMAIN_FLOOR:
            return 0.0, 0.0, 0.0
        if boundary_ok:
            return float(xlogy(c_in, c_in / b_in)), np.inf, np.inf
        raise DomainError("Kulldorff statistic needs positive mass outside the set")
    if c_in * b_out <= c_out * b_in:
        return 0.0, 0.0, 0.0
    f = xlogy(c_in, c_in / b_in) + xlogy(c_out, c_out / b_out)
    d_c = np.log(c_in / b_in) - np.log(c_out / b_out)
    d_b = c_out / b_out - c_in / b_in
    return float(f), float(d_c), float(d_b)


def kulldorff_value(data, x):
    x = _vec(x)
    f, _, _ = _kulldorff_parts(data, x)
    return -f + 0.5 * float(x @ x)


def kulldorff_gradient(data, x):
    x = _vec(x)
    _, d_c, d_b = _kulldorff_parts(data, x)
    return -(d_c * data.observed + d_b * data.expected) + x


def kulldorff_set_score(data, s):
    f, _, _ = _kulldorff_parts(data, _indicator(data.n, s), boundary_ok=True)
    return f


# -- expectation-based Poisson ---------------------------------------------

def _ebp_parts(data, x):
    x, c_in, b_in = _poisson_sums(data, x)
    if c_in <= b_in:
        return 0.0, 0.0, 0.0
    f = xlogy(c_in, c_in / b_in) + b_in - c_in
    return float(f), float(np.log(c_in / b_in)), 1.0 - c_in / b_in


def ebp_value(data, x):
    x = _vec(x)
    f, _, _ = _ebp_parts(data, x)
    return -f + 0.5 * float(x @ x)


def ebp_gradient(data, x):
    x = _vec(x)
    _, d_c, d_b = _ebp_parts(data, x)
    return -(d_c * data.observed + d_b * data.expected) + x


def ebp_set_score(data, s):
    f, _, _ = _ebp_parts(data, _indicator(data.n, s))
    return f


# -- least squares -----------------------------------------------------------

def _ls_check(A, y, x):
    A, y = np.asarray(A, dtype=np.float64), np.asarray(y, dtype=np.float64)
    x = _vec(x)
    if A.ndim != 2 or A.shape != (len(y), len(x)):
        raise ValidationError(f"shape mismatch: A {A.shape}, y {y.shape}, x {x.shape}")
    return A, y, x


def least_squares_value(A, y, x):
    """``||y - A x||^2``."""
    A, y, x = _ls_check(A, y, x)
    r = y - A @ x
    return float(r @ r)


def least_squares_gradient(A, y, x):
    """``-2 A^T (y - A x)``."""
    A, y, x = _ls_check(A, y, x)
    return -2.0 * (A.T @ (y - A @ x))


# -- cost-function objects ---------------------------------------------------

class CostFunction:
    """Value and gradient of ``f`` plus a description of its domain.

    ``bounds`` is ``None`` or a ``(lo, hi)`` box that iterates are kept in.
    Subclasses that are undefined at the origin provide
    :meth:`bootstrap_gradient`, used in place of the gradient there.
    """

    name = "cost"
    bounds = None
    n = 0

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def in_domain(self, x):
        try:
            self.value(x)
        except DomainError:
            return False
        return True

    def bootstrap_gradient(self):
        raise DomainError(f"{self.name} has no gradient at the origin")

    def set_score(self, s):
        raise NotImplementedError(f"{self.name} has no discrete score")


class _ScanStatistic(CostFunction):
    bounds = (0.0, 1.0)

    def __init__(self, data):
        self.data = data
        self.n = data.n


class EMS(_ScanStatistic):
    """Elevated mean scan statistic, relaxed and strongly convex."""

    name = "ems"

    def __init__(self, data):
        if data.feature is None:
            raise ValidationError("EMS needs a per-node feature")
        super().__init__(data)

    def value(self, x):
        return ems_value(self.data, x)

    def gradient(self, x):
        return ems_gradient(self.data, x)

    def hessian(self, x):
        return ems_hessian(self.data, x)

    def bootstrap_gradient(self):
        c = self.data.feature
        return -2.0 * c.mean() * c

    def set_score(self, s):
        return ems_set_score(self.data, s)


class _PoissonScan(_ScanStatistic):
    def __init__(self, data):
        if data.observed is None or data.expected is None:
            raise ValidationError(f"{self.name} needs observed and expected counts")
        super().__init__(data)

    def bootstrap_gradient(self):
        # one-sided derivative of -F at the origin along each coordinate
        return -np.array([self._single_slope(i) for i in range(self.n)])


class Kulldorff(_PoissonScan):
    name = "kulldorff"

    def value(self, x):
        return kulldorff_value(self.data, x)

    def gradient(self, x):
        return kulldorff_gradient(self.data, x)

    def set_score(self, s):
        return kulldorff_set_score(self.data, s)

    def _single_slope(self, i):
        o, e = self.data.observed[i], self.data.expected[i]
        ratio = self.data.observed.sum() / self.data.expected.sum()
        if o <= ratio * e:
            return 0.0
        return float(xlogy(o, o / e) - o * np.log(ratio) - o + e * ratio)


class EBP(_PoissonScan):
    name = "ebp"

    def value(self, x):
        return ebp_value(self.data, x)

    def gradient(self, x):
        return ebp_gradient(self.data, x)

    def set_score(self, s):
        return ebp_set_score(self.data, s)

    def _single_slope(self, i):
        o, e = self.data.observed[i], self.data.expected[i]
        if o <= e:
            return 0.0
        return float(xlogy(o, o / e) + e - o)


class LeastSquares(CostFunction):
    """``||y - A x||^2``."""

    name = "ls"

    def __init__(self, A, y):
        A = np.asarray(A, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != len(y):
            raise ValidationError(f"shape mismatch: A {A.shape}, y {y.shape}")
        self.A, self.y = A, y
        self.n = A.shape[1]

    def value(self, x):
        return least_squares_value(self.A, self.y, x)

    def gradient(self, x):
        return least_squares_gradient(self.A, self.y, x)

    def in_domain(self, x):
        return bool(np.all(np.isfinite(x)))

    def set_score(self, s):
        # denoising view (A = I): energy kept on the set
        s = list(s)
        return float(np.sum(self.y[s] ** 2)) if s else 0.0


def make_cost(stat, data):
    """Cost function for a statistic id over node data.

    ``ls`` treats the node feature as a noisy signal observed through the
    identity operator.
    """
    if stat == "ems":
        return EMS(data)
    if stat == "kulldorff":
        return Kulldorff(data)
    if stat == "ebp":
        return EBP(data)
    if stat == "ls":
        if data.feature is None:
            raise ValidationError("ls needs a per-node feature")
        return LeastSquares(np.eye(data.n), data.feature)
    raise ValidationError(f"unknown statistic {stat!r}")
