"""Noisy right-hand-side oracles.

A :class:`NoisyOracle` wraps a problem's f into a seeded, evaluation-counted
callable f~(t, x) = f(t, x) + perturbation, where the perturbation respects
one of four noise classes with budget delta:

* ``exact`` - no perturbation (delta = 0),
* ``ee``    - fresh per call, bounded by delta * (1 + ||x||),
* ``ie``    - a single per-trajectory factor e0 ~ U[-delta, delta] applied as
  e0 * (1 + ||x||); this satisfies both the relative growth bound and the
  Lipschitz-in-x bound delta * ||x - y|| required by the implicit scheme,
* ``rk``    - fresh per call, bounded by delta in one-norm.

Randomness contract (frozen): every oracle owns two counter-based child
streams derived from SeedSequence(master_seed, spawn_key=(replication_index, k))
with k = 0 for grid draws (the tau's consumed by the schemes) and k = 1 for
noise draws.  The noise stream is consumed in this order: the initial-value
ball draw (only when ``perturb_eta`` and delta > 0), then the per-trajectory
``ie`` factor (and its direction for d > 1), then one block per noisy
evaluation in call order.  For d = 1 each block is a single uniform u with
perturbation magnitude (2u - 1) * delta.  Two oracles built from the same
(master_seed, replication_index) therefore share identical grid draws
regardless of their noise model, which couples exact and noisy runs.
"""

from __future__ import annotations

import dataclasses
import re

import numpy as np

from .exceptions import DomainError, NumericalError
from .problems import IvpSpec, one_norm

NOISE_KINDS = ("exact", "ee", "ie", "rk")

#: slack for the per-call bound assertion (pure rounding headroom)
_BOUND_RTOL = 1e-12


@dataclasses.dataclass(frozen=True)
class NoiseModel:
    """A noise-class selection with precision budget delta in [0, 1]."""

    kind: str
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise DomainError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError("delta must lie in [0, 1]")
        if self.kind == "exact" and self.delta != 0.0:
            raise DomainError("exact information forces delta = 0")

    def bound(self, x) -> float:
        """The class bound on the perturbation emitted at state x."""
        if self.kind in ("ee", "ie"):
            return self.delta * (1.0 + one_norm(x))
        if self.kind == "rk":
            return self.delta
        return 0.0


def exact_info() -> NoiseModel:
    return NoiseModel("exact", 0.0)


def derive_streams(master_seed, replication_index: int):
    """The two child generators (grid draws, noise draws) of one replication."""
    rep = int(replication_index)

    def child(k):
        seq = np.random.SeedSequence(master_seed, spawn_key=(rep, k))
        return np.random.Generator(np.random.Philox(seq))

    return child(0), child(1)


def _l1_direction(rng, d: int) -> np.ndarray:
    """A unit one-norm direction: simplex point (cone measure) with random signs."""
    e = -np.log(rng.random(d))
    dirs = e / np.sum(e)
    signs = np.where(rng.random(d) < 0.5, -1.0, 1.0)
    return dirs * signs


def _ball_point(rng, center: np.ndarray, radius: float) -> np.ndarray:
    """Uniform draw from the one-norm ball B(center, radius)."""
    d = center.shape[0]
    if radius == 0.0:
        return center.copy()
    if d == 1:
        return center + radius * (2.0 * rng.random() - 1.0)
    r = radius * rng.random() ** (1.0 / d)
    return center + r * _l1_direction(rng, d)


class NoisyOracle:
    """A seeded, counted, perturbed view of one problem's (eta, f).

    Single-threaded: the draw streams and the evaluation counter are mutable.
    Build one oracle per replication; distinct oracles may run concurrently.
    """

    def __init__(self, base: IvpSpec, model: NoiseModel, master_seed, replication_index: int,
                 perturb_eta: bool = False, record_samples: bool = False):
        self.base = base
        self.model = model
        self.master_seed = master_seed
        self.replication_index = int(replication_index)
        self.grid_stream, self.noise_stream = derive_streams(master_seed, replication_index)
        self.eval_count = 0
        self.samples = [] if record_samples else None
        self._record = record_samples

        if perturb_eta and model.delta > 0.0:
            self.eta_tilde = _ball_point(self.noise_stream, base.eta, model.delta)
        else:
            self.eta_tilde = base.eta.copy()

        self._e0 = 0.0
        self._dir0 = None
        if model.kind == "ie" and model.delta > 0.0:
            self._e0 = (2.0 * self.noise_stream.random() - 1.0) * model.delta
            if base.d > 1:
                self._dir0 = _l1_direction(self.noise_stream, base.d)

    def draw_tau(self) -> float:
        """One U(0,1) grid draw from the dedicated grid stream."""
        return self.grid_stream.random()

    def _perturbation(self, x: np.ndarray) -> np.ndarray:
        m = self.model
        d = self.base.d
        if m.kind == "exact" or m.delta == 0.0:
            return np.zeros(d)
        if m.kind == "ie":
            scale = self._e0 * (1.0 + one_norm(x))
            if d == 1:
                return np.array([scale])
            return scale * self._dir0
        # fresh draw per call
        if d == 1:
            e = (2.0 * self.noise_stream.random() - 1.0) * m.delta
            if m.kind == "ee":
                return np.array([e * (1.0 + one_norm(x))])
            return np.array([e])
        mag = self.noise_stream.random() * m.delta
        if m.kind == "ee":
            mag *= 1.0 + one_norm(x)
        return mag * _l1_direction(self.noise_stream, d)

    def __call__(self, t: float, x) -> np.ndarray:
        return self.noisy_eval(t, x)

    def noisy_eval(self, t: float, x) -> np.ndarray:
        """f(t, x) + perturbation; increments the evaluation counter."""
        x = np.asarray(x, dtype=float)
        base = np.atleast_1d(np.asarray(self.base.rhs(t, x), dtype=float))
        if not np.all(np.isfinite(base)):
            raise NumericalError(f"rhs returned a non-finite value at t={t}")
        pert = self._perturbation(x)
        bound = self.model.bound(x)
        assert one_norm(pert) <= bound * (1.0 + _BOUND_RTOL) + 0.0, \
            "emitted perturbation violates its noise-class bound"
        self.eval_count += 1
        if self._record:
            self.samples.append((t, x.copy(), pert.copy()))
        return base + pert


def make_oracle(p: IvpSpec, m: NoiseModel, master_seed, replication_index: int,
                perturb_eta: bool = False, record_samples: bool = False) -> NoisyOracle:
    """Construct the replication's oracle.

    By default the initial value is passed through unperturbed (eta_tilde =
    eta); ``perturb_eta=True`` draws eta_tilde uniformly from the one-norm
    ball B(eta, delta) instead.  Either way eta_tilde lies in B(eta, delta).
    """
    return NoisyOracle(p, m, master_seed, replication_index,
                       perturb_eta=perturb_eta, record_samples=record_samples)


def verify_noise_bound(m: NoiseModel, samples) -> bool:
    """True iff every (t, x, perturbation) sample obeys the model's class bound.

    For the ``ie`` class this additionally checks the pairwise Lipschitz
    condition ||pert(t,x) - pert(t,y)|| <= delta ||x - y|| over same-t pairs.
    """
    samples = list(samples)
    if not samples:
        raise DomainError("samples must be nonempty")
    for t, x, pert in samples:
        if one_norm(pert) > m.bound(x) * (1.0 + _BOUND_RTOL):
            return False
    if m.kind == "ie":
        by_t = {}
        for t, x, pert in samples:
            by_t.setdefault(float(t), []).append((np.asarray(x, float), np.asarray(pert, float)))
        for group in by_t.values():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    xi, pi = group[i]
                    xj, pj = group[j]
                    lhs = one_norm(pi - pj)
                    rhs = m.delta * one_norm(xi - xj)
                    if lhs > rhs * (1.0 + _BOUND_RTOL) + 1e-300:
                        return False
    return True


# ---------------------------------------------------------------------------
# delta rules ("0", a literal, or "n^-p" evaluated per run)

_POWER_RE = re.compile(r"^n\^(-\d+(?:\.\d+)?)$")


@dataclasses.dataclass(frozen=True)
class DeltaRule:
    """A noise budget given literally or as a power rule n^-p."""

    label: str
    power: float | None = None
    value: float | None = None

    def value_for(self, n: int) -> float:
        if self.power is not None:
            return float(n) ** -self.power
        return self.value


def parse_delta_rule(text: str) -> DeltaRule:
    text = text.strip()
    m = _POWER_RE.match(text)
    if m:
        p = -float(m.group(1))
        if p <= 0:
            raise DomainError(f"delta rule {text!r} must have a negative exponent")
        return DeltaRule(label=text, power=p)
    try:
        value = float(text)
    except ValueError:
        raise DomainError(f"cannot parse delta rule {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"literal delta {value} outside [0, 1]")
    return DeltaRule(label=text, value=value)
