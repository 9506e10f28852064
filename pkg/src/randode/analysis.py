"""Sup-norm error measurement and Monte Carlo statistics over scheme runs.

The central object is an :class:`ErrorBatch`: N independent replications of
the sup-norm error of one (scheme, problem, n, noise) cell, sorted ascending.
From a batch we derive the order-statistic multiplier estimate
(:func:`xi_hat`), empirical exceedance curves (:func:`tail_curve`) and
log-log convergence slopes (:func:`convergence_slope`).  Confidence bands
around a single run are built by :func:`confidence_band`.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import hashlib
import json
import math
import os

import numpy as np

from .exceptions import DomainError, NumericalError, ReferenceSolutionError
from .noise import NoiseModel, derive_streams, exact_info, make_oracle
from .problems import IvpSpec, exact_solution_A
from .schemes import SchemeKind, Trajectory, run_scheme

_WILSON_Z = 1.959963984540054  # two-sided 95%


# ---------------------------------------------------------------------------
# Reference solutions


@dataclasses.dataclass(frozen=True)
class ReferenceSolution:
    """Either an analytic map t -> z(t) or a dense cached grid with linear lookup."""

    kind: str  # "analytic" | "cached-dense"
    d: int
    fn: object = None
    vectorized: bool = True
    grid_ts: np.ndarray = None
    grid_values: np.ndarray = None
    provenance: dict = dataclasses.field(default_factory=dict)

    @classmethod
    def analytic(cls, fn, d: int = 1, vectorized: bool = True, provenance=None):
        return cls(kind="analytic", d=d, fn=fn, vectorized=vectorized,
                   provenance=provenance or {})

    @classmethod
    def cached_dense(cls, grid_ts, grid_values, provenance=None):
        grid_values = np.asarray(grid_values, dtype=float)
        if grid_values.ndim == 1:
            grid_values = grid_values[:, None]
        return cls(kind="cached-dense", d=grid_values.shape[1],
                   grid_ts=np.asarray(grid_ts, dtype=float),
                   grid_values=grid_values, provenance=provenance or {})

    def values_at(self, ts) -> np.ndarray:
        """Reference values at the given times, shape (len(ts), d)."""
        ts = np.asarray(ts, dtype=float)
        if self.kind == "analytic":
            if self.vectorized:
                out = np.asarray(self.fn(ts), dtype=float)
            else:
                out = np.asarray([self.fn(t) for t in ts], dtype=float)
            if out.ndim == 1:
                out = out[:, None]
        else:
            lo, hi = self.grid_ts[0], self.grid_ts[-1]
            if ts.size and (ts.min() < lo - 1e-12 or ts.max() > hi + 1e-12):
                raise ReferenceSolutionError(
                    f"reference only covers [{lo}, {hi}]")
            out = np.empty((ts.shape[0], self.d))
            for k in range(self.d):
                out[:, k] = np.interp(ts, self.grid_ts, self.grid_values[:, k])
        if not np.all(np.isfinite(out)):
            raise ReferenceSolutionError("reference produced non-finite values")
        return out


# ---------------------------------------------------------------------------
# Sup-norm error


def _interior_offsets(h: float, subsamples: int) -> np.ndarray:
    return h * np.arange(1, subsamples + 1) / (subsamples + 1)


def _reference_grids(ref: ReferenceSolution, knots: np.ndarray, dt: np.ndarray):
    """Reference values at the knots and at every interior offset."""
    ref_knots = ref.values_at(knots)
    ref_int = np.empty((dt.shape[0], knots.shape[0] - 1, ref_knots.shape[1]))
    for k, off in enumerate(dt):
        ref_int[k] = ref.values_at(knots[:-1] + off)
    return ref_knots, ref_int


def _sup_error_kernel(nodes: np.ndarray, h: float, ref_knots: np.ndarray,
                      ref_int: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """Max one-norm deviation over knots and interior offsets.

    ``nodes`` has shape (M, n+1, d); returns (M,).  This is the frozen
    evaluation rule shared by :func:`sup_error` and the batched runner, so
    the two produce bitwise-identical results.
    """
    slopes = (nodes[:, 1:, :] - nodes[:, :-1, :]) / h
    err = np.sum(np.abs(nodes - ref_knots[None, :, :]), axis=2).max(axis=1)
    for k in range(dt.shape[0]):
        vals = nodes[:, :-1, :] + dt[k] * slopes
        dev = np.sum(np.abs(vals - ref_int[None, k, :, :]), axis=2).max(axis=1)
        err = np.maximum(err, dev)
    return err


def sup_error(tr: Trajectory, ref: ReferenceSolution, subsamples_per_step: int = 8) -> float:
    """Sup over knots and equispaced interior points of ||ref(t) - run(t)||.

    Interior points sit at offsets k/(subsamples_per_step+1) of each
    subinterval, k = 1..subsamples_per_step.
    """
    if subsamples_per_step < 1:
        raise DomainError("subsamples_per_step must be >= 1")
    knots = tr.grid.knots
    dt = _interior_offsets(tr.grid.h, subsamples_per_step)
    ref_knots, ref_int = _reference_grids(ref, knots, dt)
    return float(_sup_error_kernel(tr.nodes[None, :, :], tr.grid.h, ref_knots, ref_int, dt)[0])


# ---------------------------------------------------------------------------
# Monte Carlo batches


@dataclasses.dataclass(frozen=True)
class BatchCell:
    """Labels identifying one Monte Carlo cell."""

    problem: str
    scheme: SchemeKind
    n: int
    noise_kind: str
    delta: float
    delta_label: str = ""


@dataclasses.dataclass(frozen=True)
class ErrorBatch:
    """Sorted sup-norm errors of N independent replications of one cell."""

    cell: BatchCell
    errors: np.ndarray
    master_seed: object
    N: int

    def write_csv(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "error"])
            for i, e in enumerate(self.errors, start=1):
                w.writerow([i, repr(float(e))])


def _noise_lead_draws(noise: NoiseModel, perturb_eta: bool) -> int:
    """Leading draws the oracle consumes before any per-evaluation draw (d=1)."""
    lead = 0
    if perturb_eta and noise.delta > 0.0:
        lead += 1
    if noise.kind == "ie" and noise.delta > 0.0:
        lead += 1
    return lead


def _chunk_errors_vectorized(problem: IvpSpec, scheme: SchemeKind, n: int,
                             noise: NoiseModel, master_seed, lo: int, hi: int,
                             knots, dt, ref_knots, ref_int, perturb_eta: bool) -> np.ndarray:
    """All replication errors in [lo, hi) at once; d = 1, vectorizable rhs only.

    Each replication's draws come from its own streams exactly as in the
    scalar path: the tau tape from the grid stream, the noise tape from the
    noise stream in the frozen consumption order.
    """
    m = hi - lo
    h = (problem.b - problem.a) / n
    evals = n if scheme is SchemeKind.EXPLICIT_EULER else 2 * n
    lead = _noise_lead_draws(noise, perturb_eta)
    per_eval = 1 if (noise.kind in ("ee", "rk") and noise.delta > 0.0) else 0
    tape_len = lead + per_eval * evals

    taus = np.empty((m, n))
    tapes = np.empty((m, tape_len)) if tape_len else None
    for i in range(m):
        g, nz = derive_streams(master_seed, lo + i)
        taus[i] = g.random(n)
        if tape_len:
            tapes[i] = nz.random(tape_len)

    eta = float(problem.eta[0])
    w = np.full(m, eta)
    col = 0
    if perturb_eta and noise.delta > 0.0:
        w = eta + noise.delta * (2.0 * tapes[:, col] - 1.0)
        col += 1
    e0 = None
    if noise.kind == "ie" and noise.delta > 0.0:
        e0 = (2.0 * tapes[:, col] - 1.0) * noise.delta
        col += 1

    rhs = problem.rhs
    delta = noise.delta

    def perturbed(tvals, x):
        nonlocal col
        f = rhs(tvals, x)
        if delta == 0.0 or noise.kind == "exact":
            return f
        if noise.kind == "ie":
            return f + e0 * (1.0 + np.abs(x))
        e = (2.0 * tapes[:, col] - 1.0) * delta
        col += 1
        if noise.kind == "ee":
            return f + e * (1.0 + np.abs(x))
        return f + e

    nodes = np.empty((m, n + 1))
    nodes[:, 0] = w
    for j in range(1, n + 1):
        tj1 = knots[j - 1]
        theta = tj1 + taus[:, j - 1] * h
        if scheme is SchemeKind.EXPLICIT_EULER:
            w = w + h * perturbed(theta, w)
        else:
            stage = w + h * taus[:, j - 1] * perturbed(tj1, w)
            w = w + h * perturbed(theta, stage)
        nodes[:, j] = w

    bad = ~np.isfinite(nodes)
    if bad.any():
        rep = lo + int(np.argwhere(bad.any(axis=1))[0, 0])
        raise NumericalError(f"replication {rep} produced a non-finite node", step=rep)
    return _sup_error_kernel(nodes[:, :, None], h, ref_knots, ref_int, dt)


def _chunk_errors_scalar(problem: IvpSpec, scheme: SchemeKind, n: int,
                         noise: NoiseModel, master_seed, lo: int, hi: int,
                         knots, dt, ref_knots, ref_int, perturb_eta: bool,
                         ie_tol: float, ie_max_iter: int) -> np.ndarray:
    out = np.empty(hi - lo)
    for i in range(lo, hi):
        oracle = make_oracle(problem, noise, master_seed, i, perturb_eta=perturb_eta)
        try:
            tr = run_scheme(oracle, scheme, n, ie_tol=ie_tol, ie_max_iter=ie_max_iter)
        except NumericalError as exc:
            raise NumericalError(f"replication {i} failed: {exc}", step=i) from exc
        out[i - lo] = _sup_error_kernel(tr.nodes[None, :, :], tr.grid.h,
                                        ref_knots, ref_int, dt)[0]
    return out


def _batch_task(args):
    (fast, problem, scheme, n, noise, master_seed, lo, hi, knots, dt,
     ref_knots, ref_int, perturb_eta, ie_tol, ie_max_iter) = args
    if fast:
        return lo, _chunk_errors_vectorized(problem, scheme, n, noise, master_seed,
                                            lo, hi, knots, dt, ref_knots, ref_int,
                                            perturb_eta)
    return lo, _chunk_errors_scalar(problem, scheme, n, noise, master_seed, lo, hi,
                                    knots, dt, ref_knots, ref_int, perturb_eta,
                                    ie_tol, ie_max_iter)


def run_batch(problem: IvpSpec, reference: ReferenceSolution, scheme: SchemeKind,
              n: int, noise: NoiseModel, N: int, master_seed, *,
              parallelism: int = 1, subsamples_per_step: int = 8,
              perturb_eta: bool = False, ie_tol: float = 1e-12,
              ie_max_iter: int = 100, chunk_size: int = 8192,
              delta_label: str = "", force_scalar: bool = False) -> ErrorBatch:
    """N independent replications of the cell's sup-norm error, sorted.

    Replication i draws from streams keyed by (master_seed, i), so the result
    is bitwise-identical for fixed (cell, N, master_seed) at any parallelism
    or chunk partition.  Explicit Euler and Runge-Kutta cells on
    one-dimensional problems with vectorizable right-hand sides run on a
    batched path; everything else runs replication by replication.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if subsamples_per_step < 1:
        raise DomainError("subsamples_per_step must be >= 1")
    h = (problem.b - problem.a) / n
    knots = problem.a + h * np.arange(n + 1)
    dt = _interior_offsets(h, subsamples_per_step)
    ref_knots, ref_int = _reference_grids(reference, knots, dt)

    fast = (not force_scalar
            and scheme in (SchemeKind.EXPLICIT_EULER, SchemeKind.RUNGE_KUTTA2)
            and problem.d == 1 and problem.rhs_vectorized)

    tasks = []
    for lo in range(0, N, chunk_size):
        hi = min(lo + chunk_size, N)
        tasks.append((fast, problem, scheme, n, noise, master_seed, lo, hi, knots,
                      dt, ref_knots, ref_int, perturb_eta, ie_tol, ie_max_iter))

    errors = np.empty(N)
    if parallelism > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            for lo, chunk in pool.map(_batch_task, tasks):
                errors[lo:lo + chunk.shape[0]] = chunk
    else:
        for task in tasks:
            lo, chunk = _batch_task(task)
            errors[lo:lo + chunk.shape[0]] = chunk

    cell = BatchCell(problem=problem.name or "custom", scheme=scheme, n=n,
                     noise_kind=noise.kind, delta=noise.delta,
                     delta_label=delta_label or repr(noise.delta))
    return ErrorBatch(cell=cell, errors=np.sort(errors), master_seed=master_seed, N=N)


# ---------------------------------------------------------------------------
# Quantile statistic, tail curves, bands


@dataclasses.dataclass(frozen=True)
class QuantileEstimate:
    """Order-statistic estimate of the band multiplier at level 1 - epsilon."""

    epsilon: float
    xi_hat: float
    denom: float


def order_statistic_index(epsilon: float, N: int) -> int:
    """1-based index ceil((1 - epsilon) N), guarded against float fuzz."""
    target = (1.0 - epsilon) * N
    return int(math.ceil(target - 1e-9))


def xi_hat(batch: ErrorBatch, epsilon: float, gamma: float) -> QuantileEstimate:
    """r_{ceil((1-eps)N):N} divided by max(n^-gamma, delta)."""
    if batch.N < 1 or batch.errors.size < 1:
        raise DomainError("empty batch")
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    idx = order_statistic_index(epsilon, batch.N)
    if idx < 1 or idx > batch.N:
        raise DomainError(f"order statistic index {idx} out of range [1, {batch.N}]")
    denom = max(float(batch.cell.n) ** -gamma, batch.cell.delta)
    return QuantileEstimate(epsilon=epsilon, xi_hat=float(batch.errors[idx - 1]) / denom,
                            denom=denom)


def wilson_interval(count: int, n: int, z: float = _WILSON_Z):
    """95% Wilson score interval for a binomial proportion."""
    p = count / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclasses.dataclass(frozen=True)
class TailCurve:
    """Empirical P(error > xi * max(h^gamma, delta)) along a xi grid."""

    xis: np.ndarray
    probs: np.ndarray
    N: int
    wilson_low: np.ndarray
    wilson_high: np.ndarray

    def write_csv(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "prob", "wilson_low", "wilson_high"])
            for row in zip(self.xis, self.probs, self.wilson_low, self.wilson_high):
                w.writerow([repr(float(v)) for v in row])


def tail_curve(batch: ErrorBatch, gamma: float, xi_grid) -> TailCurve:
    """Exceedance fraction per xi, with Wilson interval bounds."""
    xis = np.asarray(xi_grid, dtype=float)
    if np.any(np.diff(xis) < 0):
        raise DomainError("xi_grid must be sorted ascending")
    denom = max(float(batch.cell.n) ** -gamma, batch.cell.delta)
    # errors are sorted: count above threshold via binary search
    counts = batch.N - np.searchsorted(batch.errors, xis * denom, side="right")
    probs = counts / batch.N
    lows = np.empty_like(probs)
    highs = np.empty_like(probs)
    for i, c in enumerate(counts):
        lows[i], highs[i] = wilson_interval(int(c), batch.N)
    return TailCurve(xis=xis, probs=probs, N=batch.N, wilson_low=lows, wilson_high=highs)


@dataclasses.dataclass(frozen=True)
class ConfidenceBand:
    """A symmetric band of fixed one-norm radius around one run's interpolant."""

    trajectory: Trajectory
    radius: float
    xi: float
    epsilon: float
    ts: np.ndarray
    center: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def write_csv(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            d = self.center.shape[1]
            cols = ["t"]
            for tag in ("lower", "upper", "center"):
                cols += [f"{tag}{k}" if d > 1 else tag for k in range(d)]
            w.writerow(cols)
            for i, t in enumerate(self.ts):
                row = [repr(float(t))]
                row += [repr(float(v)) for v in self.lower[i]]
                row += [repr(float(v)) for v in self.upper[i]]
                row += [repr(float(v)) for v in self.center[i]]
                w.writerow(row)

    def write_svg(self, path, reference: "ReferenceSolution" = None, title: str = ""):
        """Standalone band plot; optionally overlays a reference curve (d = 1)."""
        from .svgplot import write_band_svg
        ref_vals = reference.values_at(self.ts)[:, 0] if reference is not None else None
        write_band_svg(path, self.ts, self.lower[:, 0], self.upper[:, 0],
                       self.center[:, 0], reference=ref_vals, title=title)


def confidence_band(tr: Trajectory, gamma: float, delta: float, xi_eps: float,
                    grid_points: int = 201, epsilon: float = float("nan")) -> ConfidenceBand:
    """Band of half-width xi_eps * max(h^gamma, delta) around the interpolant."""
    if xi_eps < 0:
        raise DomainError("xi must be nonnegative")
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    radius = xi_eps * max(tr.grid.h ** gamma, delta)
    ts = np.linspace(tr.a, tr.b, grid_points)
    center = tr.dense(ts)
    return ConfidenceBand(trajectory=tr, radius=radius, xi=xi_eps, epsilon=epsilon,
                          ts=ts, center=center, lower=center - radius,
                          upper=center + radius)


# ---------------------------------------------------------------------------
# Convergence slopes


@dataclasses.dataclass(frozen=True)
class SlopeFit:
    """OLS slope of log(mean error) against log(n), with a 95% interval."""

    slope: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float
    ns: tuple
    mean_errors: tuple


def fit_loglog_slope(ns, mean_errors) -> SlopeFit:
    ns = np.asarray(ns, dtype=float)
    means = np.asarray(mean_errors, dtype=float)
    if ns.shape != means.shape or ns.size < 2:
        raise DomainError("need matching arrays of at least two ladder points")
    if np.any(means <= 0):
        raise DomainError("degenerate (zero) errors cannot be fit on a log scale")
    x = np.log(ns)
    y = np.log(means)
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    dof = ns.size - 2
    if dof > 0:
        resid = y - (intercept + slope * x)
        s2 = float(np.sum(resid**2) / dof)
        stderr = math.sqrt(s2 / sxx)
        from scipy.stats import t as _t
        half = float(_t.ppf(0.975, dof)) * stderr
    else:
        stderr, half = 0.0, 0.0
    return SlopeFit(slope=slope, intercept=intercept, stderr=stderr,
                    ci_low=slope - half, ci_high=slope + half,
                    ns=tuple(int(v) for v in ns), mean_errors=tuple(float(v) for v in means))


def convergence_slope(problem: IvpSpec, reference: ReferenceSolution, scheme: SchemeKind,
                      ns, N: int, master_seed, noise: NoiseModel = None,
                      **batch_kwargs) -> SlopeFit:
    """Slope of log(mean sup-error) vs log(n) over a doubling ladder.

    Each ladder point runs its own batch of N replications; cells at
    different n use distinct seed keys derived from the master seed.
    """
    ns = [int(v) for v in ns]
    if len(ns) < 3:
        raise DomainError("need at least 3 ladder points")
    for a, b in zip(ns, ns[1:]):
        if b != 2 * a:
            raise DomainError("ladder points must double")
    noise = noise or exact_info()
    means = []
    for n in ns:
        batch = run_batch(problem, reference, scheme, n, noise, N,
                          derive_cell_seed(master_seed, scheme, problem.name or "custom", n),
                          **batch_kwargs)
        means.append(float(batch.errors.mean()))
    return fit_loglog_slope(ns, means)


_SCHEME_IDS = {SchemeKind.EXPLICIT_EULER: 1, SchemeKind.IMPLICIT_EULER: 2,
               SchemeKind.RUNGE_KUTTA2: 3}
_PROBLEM_IDS = {"A": 1, "B": 2}


def derive_cell_seed(master_seed, scheme: SchemeKind, problem_name: str, n: int) -> int:
    """Stable per-cell seed from (master, scheme, problem, n); delta excluded.

    Excluding delta couples the draws of same-n cells across noise budgets, so
    budget sweeps are variance-reduced and equal-delta columns tie exactly.
    """
    pid = _PROBLEM_IDS.get(problem_name)
    if pid is None:
        pid = int(hashlib.sha256(problem_name.encode()).hexdigest()[:8], 16)
    ss = np.random.SeedSequence(master_seed, spawn_key=(_SCHEME_IDS[scheme], pid, int(n)))
    return int.from_bytes(ss.generate_state(4).tobytes(), "little")


# ---------------------------------------------------------------------------
# Cached dense reference for problem B


REF_MAGIC = b"RANDODE-REF-1\n"
DEFAULT_REF_STEPS = 2_000_000


def _rk4_dense_B(n_ref: int) -> np.ndarray:
    """Classical fourth-order one-step values of problem B on n_ref steps."""
    h = 1.0 / n_ref
    sin = math.sin
    z = 1.0
    out = np.empty(n_ref + 1)
    out[0] = z
    for j in range(n_ref):
        k1 = sin(z * z)
        y = z + 0.5 * h * k1
        k2 = sin(y * y)
        y = z + 0.5 * h * k2
        k3 = sin(y * y)
        y = z + h * k3
        k4 = sin(y * y)
        z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[j + 1] = z
    return out


def _write_reference(path, header: dict, values: np.ndarray):
    payload = values.astype("<f8").tobytes()
    header = dict(header, sha256=hashlib.sha256(payload).hexdigest())
    with open(path, "wb") as fh:
        fh.write(REF_MAGIC)
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(payload)


def _read_reference(path) -> tuple:
    with open(path, "rb") as fh:
        if fh.read(len(REF_MAGIC)) != REF_MAGIC:
            raise ValueError("bad magic")
        header = json.loads(fh.readline().decode())
        payload = fh.read()
    if hashlib.sha256(payload).hexdigest() != header.get("sha256"):
        raise ValueError("checksum mismatch")
    values = np.frombuffer(payload, dtype="<f8")
    return header, values


def build_reference_B(n_ref: int = DEFAULT_REF_STEPS, cache_path="refB.bin") -> ReferenceSolution:
    """Dense deterministic reference for problem B, persisted to cache_path.

    Recomputes (and rewrites the cache) when the file is missing, corrupt, or
    was built with different parameters.
    """
    if n_ref < 100_000:
        raise DomainError("n_ref must be >= 1e5")
    want = {"problem": "B", "method": "rk4", "n_ref": int(n_ref), "a": 0.0, "b": 1.0, "d": 1}
    if cache_path is not None and os.path.exists(cache_path):
        try:
            header, values = _read_reference(cache_path)
            if all(header.get(k) == v for k, v in want.items()) and values.shape == (n_ref + 1,):
                ts = np.linspace(0.0, 1.0, n_ref + 1)
                return ReferenceSolution.cached_dense(ts, values, provenance=header)
        except (ValueError, json.JSONDecodeError, OSError):
            pass  # fall through to recompute
    values = _rk4_dense_B(n_ref)
    if cache_path is not None:
        os.makedirs(os.path.dirname(os.path.abspath(cache_path)), exist_ok=True)
        _write_reference(cache_path, want, values)
        header, values = _read_reference(cache_path)
    else:
        header = want
    ts = np.linspace(0.0, 1.0, n_ref + 1)
    return ReferenceSolution.cached_dense(ts, values, provenance=dict(header))


def reference_for(problem: IvpSpec, cache_path="refB.bin",
                  n_ref: int = DEFAULT_REF_STEPS) -> ReferenceSolution:
    """The canonical reference of a built-in test problem."""
    if problem.name == "A":
        return ReferenceSolution.analytic(exact_solution_A, d=1,
                                          provenance={"problem": "A", "method": "analytic"})
    if problem.name == "B":
        return build_reference_B(n_ref=n_ref, cache_path=cache_path)
    raise DomainError(f"no canonical reference for problem {problem.name!r}")


__all__ = [
    "BatchCell", "ConfidenceBand", "ErrorBatch", "QuantileEstimate",
    "ReferenceSolution", "SlopeFit", "TailCurve", "build_reference_B",
    "confidence_band", "convergence_slope", "derive_cell_seed",
    "fit_loglog_slope", "order_statistic_index",
    "reference_for", "run_batch", "sup_error", "tail_curve", "wilson_interval",
    "xi_hat",
]
