"""The three randomized one-step integrators and their piecewise-linear output.

Each scheme advances on the uniform grid t_j = a + j h and evaluates the
noisy oracle at a uniformly random intermediate point theta_j drawn per step
from the oracle's grid stream.  The continuous output is the linear
interpolant of the node values.
"""

from __future__ import annotations

import csv
import dataclasses
import enum

import numpy as np

from .exceptions import ConvergenceError, DomainError, NumericalError
from .noise import NoisyOracle
from .problems import d_exact_solution_A, exact_solution_A, one_norm


class SchemeKind(enum.Enum):
    EXPLICIT_EULER = "ee"
    IMPLICIT_EULER = "ie"
    RUNGE_KUTTA2 = "rk"


SCHEME_NAMES = tuple(k.value for k in SchemeKind)


def scheme_from_name(name: str) -> SchemeKind:
    try:
        return SchemeKind(name.strip().lower())
    except ValueError:
        raise DomainError(f"unknown scheme {name!r}; expected one of {SCHEME_NAMES}") from None


def gamma_of(s: SchemeKind, rho: float) -> float:
    """Convergence exponent of the scheme at time-regularity rho.

    Euler variants: min(rho + 1/2, 1).  Two-stage Runge-Kutta:
    min(rho, 1) + 1/2 (the usable time regularity saturates at 1).
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    if s is SchemeKind.RUNGE_KUTTA2:
        return min(rho, 1.0) + 0.5
    return min(rho + 0.5, 1.0)


@dataclasses.dataclass(frozen=True)
class Grid:
    """Uniform knots plus the random evaluation points of one run."""

    n: int
    h: float
    knots: np.ndarray   # (n+1,)
    thetas: np.ndarray  # (n,), theta_j in [t_{j-1}, t_j)
    taus: np.ndarray    # (n,), theta_j = t_{j-1} + tau_j h


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Node values of one scheme run plus its linear interpolant."""

    scheme: SchemeKind
    grid: Grid
    nodes: np.ndarray   # (n+1, d)
    eval_count: int

    @property
    def a(self) -> float:
        return float(self.grid.knots[0])

    @property
    def b(self) -> float:
        return float(self.grid.knots[-1])

    def at(self, t: float) -> np.ndarray:
        """Interpolant value at one time; exact at knots."""
        if t < self.a or t > self.b:
            raise DomainError(f"t={t} outside [{self.a}, {self.b}]")
        return self.dense(np.array([t]))[0]

    def dense(self, ts) -> np.ndarray:
        """Interpolant values at many times, shape (len(ts), d)."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < self.a or ts.max() > self.b):
            raise DomainError("evaluation time outside the trajectory interval")
        out = np.empty((ts.shape[0], self.nodes.shape[1]))
        for k in range(self.nodes.shape[1]):
            out[:, k] = np.interp(ts, self.grid.knots, self.nodes[:, k])
        return out

    def write_csv(self, path):
        """Write (t_j, node coordinates) rows."""
        d = self.nodes.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"x{k}" for k in range(d)])
            for t, row in zip(self.grid.knots, self.nodes):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def interpolate(tr: Trajectory, t: float) -> np.ndarray:
    """Piecewise-linear value of the run at time t."""
    return tr.at(t)


def _check_finite(x, step):
    if not np.all(np.isfinite(x)):
        raise NumericalError(f"non-finite node value at step {step}", step=step)


def _taus_for(oracle: NoisyOracle, n: int, taus):
    if taus is None:
        return np.array([oracle.draw_tau() for _ in range(n)])
    taus = np.asarray(taus, dtype=float)
    if taus.shape != (n,):
        raise DomainError(f"taus override must have shape ({n},)")
    return taus


def _grid(oracle: NoisyOracle, n: int, taus) -> Grid:
    a, b = oracle.base.a, oracle.base.b
    h = (b - a) / n
    knots = a + h * np.arange(n + 1)
    ts = _taus_for(oracle, n, taus)
    return Grid(n=n, h=h, knots=knots, thetas=knots[:-1] + ts * h, taus=ts)


def run_explicit_euler(oracle: NoisyOracle, n: int, taus=None) -> Trajectory:
    """W_j = W_{j-1} + h f~(theta_j, W_{j-1}); one oracle call per step."""
    if n < 1:
        raise DomainError("n must be >= 1")
    g = _grid(oracle, n, taus)
    d = oracle.base.d
    nodes = np.empty((n + 1, d))
    w = oracle.eta_tilde.copy()
    nodes[0] = w
    for j in range(1, n + 1):
        w = w + g.h * oracle.noisy_eval(g.thetas[j - 1], w)
        _check_finite(w, j)
        nodes[j] = w
    return Trajectory(SchemeKind.EXPLICIT_EULER, g, nodes, oracle.eval_count)


def run_rk2(oracle: NoisyOracle, n: int, taus=None) -> Trajectory:
    """Two-stage step: a tau-scaled stage at t_{j-1}, then the update at theta_j.

    Two oracle calls per step; the stage values are transient.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    g = _grid(oracle, n, taus)
    d = oracle.base.d
    nodes = np.empty((n + 1, d))
    v = oracle.eta_tilde.copy()
    nodes[0] = v
    for j in range(1, n + 1):
        tau = g.taus[j - 1]
        stage = v + g.h * tau * oracle.noisy_eval(g.knots[j - 1], v)
        v = v + g.h * oracle.noisy_eval(g.thetas[j - 1], stage)
        _check_finite(v, j)
        nodes[j] = v
    return Trajectory(SchemeKind.RUNGE_KUTTA2, g, nodes, oracle.eval_count)


def run_implicit_euler(oracle: NoisyOracle, n: int, tol: float = 1e-12,
                       max_iter: int = 100, taus=None) -> Trajectory:
    """U_j = U_{j-1} + h f~(theta_j, U_j), solved by fixed-point iteration.

    Requires the contraction margin h (L + delta) < 1, with L the problem's
    Lipschitz constant.  Iteration starts at U_{j-1} and stops once successive
    iterates differ by at most tol in one-norm, which leaves a residual of at
    most tol (1 + q) / (1 - q) with q = h (L + delta).  Every inner iteration
    is one oracle evaluation.  Note that the per-call-fresh noise classes
    ("ee", "rk") re-randomize the map between iterations and may prevent
    convergence below the noise scale; the "ie" class keeps f~ fixed.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if tol <= 0:
        raise DomainError("tol must be positive")
    h = (oracle.base.b - oracle.base.a) / n
    q = h * (oracle.base.class_params.L + oracle.model.delta)
    if not q < 1.0:
        raise DomainError(f"contraction margin violated: h(L + delta) = {q} >= 1")
    g = _grid(oracle, n, taus)
    d = oracle.base.d
    nodes = np.empty((n + 1, d))
    u = oracle.eta_tilde.copy()
    nodes[0] = u
    for j in range(1, n + 1):
        theta = g.thetas[j - 1]
        base = u
        cur = base
        for _ in range(max_iter):
            nxt = base + h * oracle.noisy_eval(theta, cur)
            _check_finite(nxt, j)
            done = one_norm(nxt - cur) <= tol
            cur = nxt
            if done:
                break
        else:
            raise ConvergenceError(f"fixed point did not converge at step {j}", step=j)
        u = cur
        nodes[j] = u
    return Trajectory(SchemeKind.IMPLICIT_EULER, g, nodes, oracle.eval_count)


def run_scheme(oracle: NoisyOracle, scheme: SchemeKind, n: int, taus=None,
               ie_tol: float = 1e-12, ie_max_iter: int = 100) -> Trajectory:
    if scheme is SchemeKind.EXPLICIT_EULER:
        return run_explicit_euler(oracle, n, taus=taus)
    if scheme is SchemeKind.RUNGE_KUTTA2:
        return run_rk2(oracle, n, taus=taus)
    return run_implicit_euler(oracle, n, tol=ie_tol, max_iter=ie_max_iter, taus=taus)


# ---------------------------------------------------------------------------
# Local quadrature-error diagnostic


@dataclasses.dataclass(frozen=True)
class MartingaleDiagnostic:
    """Monte Carlo summary of the per-step local quadrature error.

    For each step, the error is the exact increment of the solution minus
    h times its derivative at the random evaluation point.  It has
    conditional mean zero, which ``step_means`` estimates; ``max_abs`` is the
    largest magnitude seen across steps and replications.
    """

    n: int
    reps: int
    step_means: np.ndarray
    step_ses: np.ndarray
    max_abs: float

    @property
    def max_standardized(self) -> float:
        with np.errstate(invalid="ignore", divide="ignore"):
            z = np.where(self.step_ses > 0, np.abs(self.step_means) / self.step_ses, 0.0)
        return float(np.max(z))


def martingale_diagnostic(n: int, reps: int, seed, solution=exact_solution_A,
                          derivative=d_exact_solution_A, a: float = 0.0,
                          b: float = 1.0) -> MartingaleDiagnostic:
    """Estimate E[increment - h z'(theta)] per step over fresh theta draws.

    Defaults to test problem A, whose solution and derivative are analytic.
    """
    if n < 1 or reps < 2:
        raise DomainError("need n >= 1 and reps >= 2")
    h = (b - a) / n
    knots = a + h * np.arange(n + 1)
    increments = np.asarray(solution(knots[1:])) - np.asarray(solution(knots[:-1]))
    rng = np.random.default_rng(seed)
    thetas = knots[:-1][None, :] + h * rng.random((reps, n))
    e = increments[None, :] - h * np.asarray(derivative(thetas))
    means = e.mean(axis=0)
    ses = e.std(axis=0, ddof=1) / np.sqrt(reps)
    return MartingaleDiagnostic(n=n, reps=reps, step_means=means, step_ses=ses,
                                max_abs=float(np.max(np.abs(e))))
