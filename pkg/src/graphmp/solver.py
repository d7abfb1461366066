"""Graph-structured matching pursuit.

Each iteration takes the gradient at the current estimate, selects a head
support from it, minimizes the cost on the union of that support and the
current one, and prunes the minimizer back onto the model with the tail
oracle.
"""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError, SolverError, ValidationError
from .graph import as_support, support_of
from .objectives import LeastSquares
from .projections import best_forest_support, boost_head, tail_approx

__all__ = [
    "SolverConfig",
    "SolveResult",
    "SubsolverReport",
    "WrscDiagnostics",
    "graph_mp",
    "restricted_minimize",
    "halting_check",
    "readout_support",
    "wrsc_constants_ems",
    "shrinkage_condition",
    "C_HEAD",
    "C_TAIL",
]

C_HEAD = math.sqrt(1.0 / 14.0)
C_TAIL = math.sqrt(7.0)

HALTING_MODES = ("objective_change", "estimate_change")
SUBSOLVERS = ("projected_gradient", "closed_form_least_squares")
INITS = ("bootstrap", "uniform")

ARMIJO = 1e-4
SHRINK = 0.5
MIN_STEP = 1e-20
STALL_ITERS = 200
ROUNDOFF = 4 * np.finfo(float).eps
UNIFORM_START = 1e-3
SNAP_BITS = 20


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 50
    epsilon: float = 0.001
    halting_mode: str = "objective_change"
    subsolver: str = "projected_gradient"
    sub_max_iter: int = 1000
    sub_grad_tol: float = 1e-6
    boost_rounds: int = 1
    support_tol: float = 0.0
    init: str = "bootstrap"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if self.halting_mode not in HALTING_MODES:
            raise ValidationError(f"halting_mode must be one of {HALTING_MODES}")
        if self.subsolver not in SUBSOLVERS:
            raise ValidationError(f"subsolver must be one of {SUBSOLVERS}")
        if self.init not in INITS:
            raise ValidationError(f"init must be one of {INITS}")
        if self.sub_max_iter < 1 or not self.sub_grad_tol > 0:
            raise ValidationError("sub_max_iter >= 1 and sub_grad_tol > 0 required")
        if self.boost_rounds < 1:
            raise ValidationError("boost_rounds must be >= 1")
        if self.support_tol < 0:
            raise ValidationError("support_tol must be nonnegative")


@dataclass
class SubsolverReport:
    iterations: int
    converged: bool
    grad_norm: float
    singular: bool = False


@dataclass
class SolveResult:
    x_star: np.ndarray
    support: tuple
    objective_history: list
    estimate_deltas: list
    iterations: int
    halting_reason: str
    wall_time: float
    model_support: tuple = ()
    iterates: list = field(default_factory=list)
    head_supports: list = field(default_factory=list)
    tail_supports: list = field(default_factory=list)
    sub_reports: list = field(default_factory=list)


def _box_project(cost, z):
    if cost.bounds is None:
        return z
    return np.clip(z, cost.bounds[0], cost.bounds[1])


def _stationarity(cost, z, grad):
    """Projected-gradient residual; the plain gradient when unconstrained."""
    if cost.bounds is None:
        return grad
    return z - _box_project(cost, z - grad)


def restricted_minimize(cost, omega, warm_start, cfg=None, report=False):
    """Minimize ``cost`` over vectors vanishing outside ``omega``.

    Projected gradient with Armijo backtracking and Barzilai-Borwein trial
    steps, or, for least squares in closed-form mode, a least-squares solve
    on the ``omega`` columns. With ``report=True`` also returns a
    :class:`SubsolverReport`.
    """
    cfg = cfg or SolverConfig()
    omega = list(as_support(omega, cost.n))
    if not omega:
        raise ValidationError("restricted minimization needs a nonempty support")
    warm = np.asarray(warm_start, dtype=np.float64)
    if cfg.subsolver == "closed_form_least_squares":
        b, rep = _closed_form(cost, omega)
    else:
        b, rep = _projected_gradient(cost, omega, warm, cfg)
    return (b, rep) if report else b


def _closed_form(cost, omega):
    if not isinstance(cost, LeastSquares):
        raise ValidationError("closed-form subsolver needs a least-squares cost")
    sub = cost.A[:, omega]
    z, _, rank, _ = np.linalg.lstsq(sub, cost.y, rcond=None)
    b = np.zeros(cost.n)
    b[omega] = z
    grad = cost.gradient(b)[omega]
    return b, SubsolverReport(1, True, float(np.linalg.norm(grad)), rank < len(omega))


def _projected_gradient(cost, omega, warm, cfg):
    n = cost.n
    full = np.zeros(n)

    def embed(z):
        full[:] = 0.0
        full[omega] = z
        return full

    def evaluate(z):
        try:
            return cost.value(embed(z))
        except DomainError:
            return math.inf

    z = _box_project(cost, warm[omega].copy())
    fz = evaluate(z)
    if not math.isfinite(fz):
        start = 0.5 * cost.bounds[1] if cost.bounds is not None else 1.0
        z = np.full(len(omega), start)
        fz = evaluate(z)
        if not math.isfinite(fz):
            raise DomainError("no admissible starting point on the support")
    gz = cost.gradient(embed(z))[omega]
    step = 1.0
    it, res = 0, math.inf
    best, since = math.inf, 0
    for it in range(1, cfg.sub_max_iter + 1):
        res = float(np.linalg.norm(_stationarity(cost, z, gz)))
        if res <= cfg.sub_grad_tol:
            return embed(z).copy(), SubsolverReport(it - 1, True, res)
        # residual stuck at roundoff level: further iterations only churn
        if res < best:
            best, since = res, 0
        else:
            since += 1
            if since >= STALL_ITERS:
                return embed(z).copy(), SubsolverReport(it - 1, False, res)
        t = step
        while True:
            zn = _box_project(cost, z - t * gz)
            fn = evaluate(zn)
            # slack of a few ulps keeps progress once decreases hit roundoff
            if fn <= fz + ARMIJO * float(gz @ (zn - z)) + ROUNDOFF * abs(fz):
                break
            t *= SHRINK
            if t < MIN_STEP:
                return embed(z).copy(), SubsolverReport(it, False, res)
        gn = cost.gradient(embed(zn))[omega]
        if not np.all(np.isfinite(gn)):
            raise NumericError("non-finite gradient inside the subsolver")
        s, y = zn - z, gn - gz
        sy = float(s @ y)
        step = min(max(float(s @ s) / sy, 1e-10), 1e10) if sy > 0 else 1.0
        z, fz, gz = zn, fn, gn
    res = float(np.linalg.norm(_stationarity(cost, z, gz)))
    return embed(z).copy(), SubsolverReport(it, res <= cfg.sub_grad_tol, res)


def halting_check(objectives, deltas, cfg):
    """Whether the most recent step meets the configured halting rule.

    ``objectives`` holds cost values of consecutive estimates; ``deltas``
    holds the step norms between them.
    """
    if cfg.halting_mode == "objective_change":
        if len(objectives) < 2:
            return False
        return abs(objectives[-1] - objectives[-2]) <= cfg.epsilon
    if not deltas:
        return False
    return deltas[-1] <= cfg.epsilon


def snap(v, bits=SNAP_BITS):
    """Round ``v`` onto a dyadic grid about ``2**-bits`` times its largest entry.

    Support selection runs on snapped vectors so that iterates differing only
    by roundoff pick the same supports.
    """
    v = np.asarray(v, dtype=np.float64)
    top = float(np.max(np.abs(v))) if v.size else 0.0
    if top == 0.0:
        return v.copy()
    q = 2.0 ** (math.ceil(math.log2(top)) - bits)
    return np.round(v / q) * q


def _head_input(cost, x, at_origin):
    if at_origin and not cost.in_domain(x):
        grad = cost.bootstrap_gradient()
    else:
        grad = cost.gradient(x)
    if not np.all(np.isfinite(grad)):
        raise NumericError("non-finite gradient")
    # only directions that stay inside the box count
    return snap(_stationarity(cost, x, grad))


def graph_mp(cost, graph, model, cfg=None):
    """Run matching pursuit over the sparsity model ``model`` on ``graph``."""
    cfg = cfg or SolverConfig()
    if cost.n != graph.n:
        raise ValidationError(f"cost has {cost.n} coordinates, graph has {graph.n} nodes")
    model.check(graph)
    start = time.perf_counter()

    n = graph.n
    x = np.zeros(n)
    if cfg.init == "uniform" and not cost.in_domain(x):
        x = np.full(n, UNIFORM_START)
    values = [cost.value(x)] if cost.in_domain(x) else []
    result = SolveResult(x, (), [], [], 0, "max_iter", 0.0)

    for it in range(1, cfg.max_iter + 1):
        try:
            head_in = _head_input(cost, x, at_origin=(it == 1))
        except DomainError as exc:
            raise SolverError(str(exc), iteration=it) from exc
        gamma_set = boost_head(graph, head_in, model, cfg.boost_rounds)
        if not gamma_set:
            result.halting_reason = "stationary"
            break
        omega = as_support(gamma_set + support_of(x))
        try:
            b, rep = restricted_minimize(cost, omega, x, cfg, report=True)
        except DomainError as exc:
            raise SolverError(str(exc), iteration=it) from exc
        tail = tail_approx(graph, snap(b), model)
        x_new = np.zeros(n)
        x_new[list(tail)] = b[list(tail)]
        if not np.any(x_new):
            result.halting_reason = "stationary"
            break
        try:
            f_new = cost.value(x_new)
        except DomainError as exc:
            raise SolverError(str(exc), iteration=it) from exc
        if not math.isfinite(f_new):
            raise NumericError("non-finite objective", iteration=it)

        values.append(f_new)
        result.objective_history.append(f_new)
        result.estimate_deltas.append(float(np.linalg.norm(x_new - x)))
        result.iterates.append(x_new)
        result.head_supports.append(gamma_set)
        result.tail_supports.append(tail)
        result.sub_reports.append(rep)
        result.iterations = it
        result.model_support = tail
        x = x_new
        if halting_check(values, result.estimate_deltas, cfg):
            result.halting_reason = cfg.halting_mode
            break

    result.x_star = x
    result.support = support_of(x, cfg.support_tol)
    result.wall_time = time.perf_counter() - start
    return result


def readout_support(graph, x, model):
    """Support of ``x`` cut down to M(k, g) for reporting a detection.

    The solver's own support may hold up to ``5k`` nodes; detections are
    reported at the model size ``k``.
    """
    return best_forest_support(graph, x, model.g, lo=model.k, budget=model.k)


# -- convergence diagnostics -------------------------------------------------

@dataclass(frozen=True)
class WrscDiagnostics:
    xi: float
    delta: float
    eta: float
    alpha: float
    beta: float
    shrinkage_ok: bool
    c_head: float
    c_tail: float
    condition_ok: bool


def shrinkage_condition(c_head, c_tail):
    """``c_H^2 > 1 - 1 / (1 + c_T)^2``, the rate-below-one test at delta = 0."""
    return c_head ** 2 > 1.0 - 1.0 / (1.0 + c_tail) ** 2


def wrsc_constants_ems(c_hat, xi, c_head=C_HEAD, c_tail=C_TAIL):
    """Contraction constants for the EMS objective.

    ``c_hat`` bounds the feature spread so the Hessian lies between
    ``(1 - c_hat^2) I`` and ``I``; ``xi`` is the gradient step parameter.
    ``beta`` is infinite when ``eta <= 0``, where no rate is guaranteed.
    """
    if not 0.0 <= c_hat < 1.0:
        raise DomainError("c_hat must lie in [0, 1)")
    if not 0.0 < xi < 2.0 * (1.0 - c_hat ** 2):
        raise DomainError(f"xi must lie in (0, {2.0 * (1.0 - c_hat ** 2):.6g})")
    delta = math.sqrt(max(1.0 - 2.0 * xi * (1.0 - c_hat ** 2) + xi ** 2, 0.0))
    eta = c_head * (1.0 - delta) - delta
    alpha = (1.0 + c_tail) / (1.0 - delta) * math.sqrt(max(1.0 - eta ** 2, 0.0))
    if 0.0 < eta < 1.0:
        beta = xi * (1.0 + c_tail) / (1.0 - delta) * (
            (1.0 + c_head) / eta + eta * (1.0 + c_head) / math.sqrt(1.0 - eta ** 2) + 1.0)
    else:
        beta = math.inf
    return WrscDiagnostics(xi, delta, eta, alpha, beta, alpha < 1.0,
                           c_head, c_tail, shrinkage_condition(c_head, c_tail))
