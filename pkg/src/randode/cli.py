"""Command-line front end: solve, table, band, tail, diagnose, build-ref.

Configuration comes from an INI file ("key = value" under an [experiment]
section) with command-line flags taking precedence.  Every command that
writes files also writes a manifest.json recording the resolved
configuration, the package version, wall-clock time and a checksum per
output file; re-running with the same inputs reproduces the checksums.

Exit codes: 0 success, 1 failed checks or incomplete tables, 2 usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .analysis import (
    build_reference_B,
    confidence_band,
    convergence_slope,
    derive_cell_seed,
    reference_for,
    run_batch,
    tail_curve,
    xi_hat,
)
from .exceptions import ConvergenceError, DomainError, NumericalError, ReferenceSolutionError
from .noise import NoiseModel, make_oracle, parse_delta_rule, verify_noise_bound
from .problems import make_problem
from .schemes import SchemeKind, gamma_of, martingale_diagnostic, run_scheme, scheme_from_name

DEFAULT_SEED = 12345
DEFAULT_EPSILON = 0.05
DEFAULT_N_LIST = "10 20 50 100 200 500 1000 2000 5000"
EE_DELTA_RULES = "0 n^-1.1 n^-1 n^-0.9 2e-3 1e-4"
RK_DELTA_RULES = "0 n^-1.6 n^-1.5 n^-1.4 2e-3 1e-4"

SLOPE_BANDS = {
    SchemeKind.EXPLICIT_EULER: (-1.15, -0.85),
    SchemeKind.IMPLICIT_EULER: (-1.15, -0.85),
    SchemeKind.RUNGE_KUTTA2: (-1.65, -1.35),
}


class UsageError(Exception):
    pass


def _default_ref_cache(n_ref: int) -> str:
    base = os.environ.get("RANDODE_CACHE_DIR") or os.path.join(
        os.path.expanduser("~"), ".cache", "randode")
    return os.path.join(base, f"refB_rk4_{n_ref}.bin")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class Manifest:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.outputs = {}
        self._t0 = time.monotonic()

    def add(self, path):
        self.outputs[os.path.basename(path)] = _sha256(path)

    def write(self, out_dir):
        doc = {
            "command": self.command,
            "version": __version__,
            "config": self.config,
            "wall_seconds": round(time.monotonic() - self._t0, 3),
            "outputs": self.outputs,
        }
        path = os.path.join(out_dir, "manifest.json")
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _load_config(path) -> dict:
    if not path:
        return {}
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path)
    section = "experiment" if parser.has_section("experiment") else parser.default_section
    return dict(parser[section])


_CONFIG_ALIASES = {
    "seed": ("master_seed",),
    "out": ("output_dir",),
    "subsamples": ("subsamples_per_step",),
}


def _resolve(args, cfg: dict, key: str, default=None, cast=str):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    raw = None
    for name in (key, key.replace("_", "-")) + _CONFIG_ALIASES.get(key, ()):
        raw = cfg.get(name)
        if raw is not None:
            break
    if raw is not None:
        try:
            return cast(raw)
        except ValueError as exc:
            raise UsageError(f"bad config value {key} = {raw!r}: {exc}") from exc
    return default


def _ensure_out(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _resolve_problem(name: str):
    try:
        return make_problem(name)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_scheme(name: str) -> SchemeKind:
    try:
        return scheme_from_name(name)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _noise_for(kind: str, scheme: SchemeKind, delta: float) -> NoiseModel:
    """Noise model for one run; kind 'auto' follows the scheme, delta 0 is exact."""
    if kind in (None, "auto"):
        kind = scheme.value
    if delta == 0.0:
        kind = "exact"
    try:
        return NoiseModel(kind, delta)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _int_list(text: str):
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def _rule_list(text: str):
    try:
        return [parse_delta_rule(v) for v in text.replace(",", " ").split()]
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _reference(problem, ref_cache, n_ref):
    if problem.name == "B":
        return build_reference_B(n_ref=n_ref, cache_path=ref_cache or _default_ref_cache(n_ref))
    return reference_for(problem)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    problem = _resolve_problem(_resolve(args, cfg, "problem", "A"))
    scheme = _resolve_scheme(_resolve(args, cfg, "scheme", "ee"))
    n = _resolve(args, cfg, "n", 10, int)
    seed = _resolve(args, cfg, "seed", DEFAULT_SEED, int)
    out = _ensure_out(_resolve(args, cfg, "out", "out"))
    rule = parse_delta_rule(_resolve(args, cfg, "delta", "0"))
    delta = rule.value_for(n)
    noise = _noise_for(_resolve(args, cfg, "noise", "auto"), scheme, delta)

    taus = None
    if args.force_tau is not None:
        if not 0.0 <= args.force_tau <= 1.0:
            raise UsageError("--force-tau must lie in [0, 1]")
        taus = np.full(n, args.force_tau)

    manifest = Manifest("solve", {"problem": problem.name, "scheme": scheme.value,
                                  "n": n, "noise": noise.kind, "delta": delta,
                                  "seed": seed, "force_tau": args.force_tau})
    oracle = make_oracle(problem, noise, seed, 0)
    tr = run_scheme(oracle, scheme, n, taus=taus)
    path = os.path.join(out, "trajectory.csv")
    tr.write_csv(path)
    manifest.add(path)
    if args.dense:
        ts = np.linspace(problem.a, problem.b, args.dense)
        vals = tr.dense(ts)
        import csv
        dpath = os.path.join(out, "trajectory_dense.csv")
        with open(dpath, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"x{k}" for k in range(vals.shape[1])])
            for t, row in zip(ts, vals):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in row])
        manifest.add(dpath)
    manifest.write(out)
    print(f"wrote {path} ({n + 1} rows), oracle evaluations: {tr.eval_count}")
    return 0


# ---------------------------------------------------------------------------
# table


def _cell_N(n: int, explicit_N) -> int:
    if explicit_N is not None:
        return explicit_N
    return 10_000 if n >= 1000 else 100_000


def cmd_table(args) -> int:
    cfg = _load_config(args.config)
    problem = _resolve_problem(_resolve(args, cfg, "problem", "A"))
    scheme = _resolve_scheme(_resolve(args, cfg, "scheme", "ee"))
    ns = _int_list(_resolve(args, cfg, "n_list", DEFAULT_N_LIST))
    default_rules = RK_DELTA_RULES if scheme is SchemeKind.RUNGE_KUTTA2 else EE_DELTA_RULES
    rules = _rule_list(_resolve(args, cfg, "delta_rules", default_rules))
    epsilon = _resolve(args, cfg, "epsilon", DEFAULT_EPSILON, float)
    explicit_N = _resolve(args, cfg, "N", None, int)
    seed = _resolve(args, cfg, "seed", DEFAULT_SEED, int)
    out = _ensure_out(_resolve(args, cfg, "out", "out"))
    parallelism = _resolve(args, cfg, "parallelism", 1, int)
    subsamples = _resolve(args, cfg, "subsamples", 8, int)
    kind = _resolve(args, cfg, "noise", "auto")

    if explicit_N is not None and explicit_N < 100:
        raise UsageError("table requires N >= 100")
    if explicit_N is not None and explicit_N < 10.0 / epsilon:
        print(f"warning: N = {explicit_N} is below 10/epsilon = {10.0 / epsilon:.0f}; "
              f"the quantile estimate will be coarse", file=sys.stderr)

    gamma = gamma_of(scheme, problem.class_params.rho)
    reference = _reference(problem, args.ref_cache, args.ref_steps)
    manifest = Manifest("table", {
        "problem": problem.name, "scheme": scheme.value, "n_list": ns,
        "delta_rules": [r.label for r in rules], "epsilon": epsilon,
        "N": explicit_N, "seed": seed, "gamma": gamma,
        "parallelism": parallelism, "subsamples": subsamples})

    rows = []
    failures = []
    for n in ns:
        cell_seed = derive_cell_seed(seed, scheme, problem.name, n)
        N = _cell_N(n, explicit_N)
        row = [str(n)]
        for rule in rules:
            delta = rule.value_for(n)
            noise = _noise_for(kind, scheme, delta)
            try:
                batch = run_batch(problem, reference, scheme, n, noise, N, cell_seed,
                                  parallelism=parallelism,
                                  subsamples_per_step=subsamples,
                                  delta_label=rule.label)
                row.append(repr(xi_hat(batch, epsilon, gamma).xi_hat))
            except (NumericalError, ConvergenceError, ReferenceSolutionError,
                    DomainError) as exc:
                failures.append((n, rule.label, str(exc)))
                row.append("NA")
        rows.append(row)
        print(f"n={n:6d} done (N={N})")

    import csv
    path = os.path.join(out, f"table_{scheme.value}_{problem.name}.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n"] + [f"delta={r.label}" for r in rules])
        w.writerows(rows)
    manifest.add(path)
    manifest.write(out)
    print(f"wrote {path}")
    if failures:
        for n, label, msg in failures:
            print(f"cell (n={n}, delta={label}) failed: {msg}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# band


def cmd_band(args) -> int:
    cfg = _load_config(args.config)
    problem = _resolve_problem(_resolve(args, cfg, "problem", "A"))
    scheme = _resolve_scheme(_resolve(args, cfg, "scheme", "ee"))
    n = _resolve(args, cfg, "n", 25, int)
    xi = _resolve(args, cfg, "xi", None, float)
    if xi is None or xi <= 0:
        raise UsageError("band requires --xi > 0")
    epsilon = _resolve(args, cfg, "epsilon", DEFAULT_EPSILON, float)
    seed = _resolve(args, cfg, "seed", DEFAULT_SEED, int)
    out = _ensure_out(_resolve(args, cfg, "out", "out"))
    grid_points = _resolve(args, cfg, "grid_points", 201, int)
    gamma = gamma_of(scheme, problem.class_params.rho)

    delta_text = _resolve(args, cfg, "delta", None)
    if delta_text is None:
        delta = float(n) ** -gamma
        delta_label = f"n^-{gamma:g}"
    else:
        rule = parse_delta_rule(delta_text)
        delta = rule.value_for(n)
        delta_label = rule.label
    noise = _noise_for(_resolve(args, cfg, "noise", "auto"), scheme, delta)
    reference = _reference(problem, args.ref_cache, args.ref_steps)

    manifest = Manifest("band", {"problem": problem.name, "scheme": scheme.value,
                                 "n": n, "xi": xi, "delta": delta,
                                 "delta_label": delta_label, "epsilon": epsilon,
                                 "seed": seed, "gamma": gamma})
    oracle = make_oracle(problem, noise, seed, 0)
    tr = run_scheme(oracle, scheme, n)
    band = confidence_band(tr, gamma, delta, xi, grid_points=grid_points, epsilon=epsilon)
    ref_vals = reference.values_at(band.ts)

    csv_path = os.path.join(out, f"band_{scheme.value}_{problem.name}.csv")
    band.write_csv(csv_path)
    manifest.add(csv_path)
    svg_path = os.path.join(out, f"band_{scheme.value}_{problem.name}.svg")
    band.write_svg(svg_path, reference=reference,
                   title=f"{scheme.value} on {problem.name}: n={n}, "
                         f"radius={band.radius:.4g} (xi={xi:g}, delta={delta_label})")
    manifest.add(svg_path)
    manifest.write(out)
    inside = np.all(np.sum(np.abs(ref_vals - band.center), axis=1) <= band.radius)
    print(f"wrote {csv_path} and {svg_path}; radius={band.radius!r}; "
          f"reference inside band on the grid: {bool(inside)}")
    return 0


# ---------------------------------------------------------------------------
# tail


def cmd_tail(args) -> int:
    cfg = _load_config(args.config)
    problem = _resolve_problem(_resolve(args, cfg, "problem", "A"))
    scheme = _resolve_scheme(_resolve(args, cfg, "scheme", "ee"))
    n = _resolve(args, cfg, "n", 100, int)
    N = _resolve(args, cfg, "N", 100_000, int)
    if N < 100:
        raise UsageError("tail requires N >= 100")
    epsilon = _resolve(args, cfg, "epsilon", DEFAULT_EPSILON, float)
    if N < 10.0 / epsilon:
        print(f"warning: N = {N} is below 10/epsilon = {10.0 / epsilon:.0f}; "
              f"tail probabilities near {epsilon} will be coarse", file=sys.stderr)
    seed = _resolve(args, cfg, "seed", DEFAULT_SEED, int)
    out = _ensure_out(_resolve(args, cfg, "out", "out"))
    parallelism = _resolve(args, cfg, "parallelism", 1, int)
    subsamples = _resolve(args, cfg, "subsamples", 8, int)
    rule = parse_delta_rule(_resolve(args, cfg, "delta", "0"))
    delta = rule.value_for(n)
    noise = _noise_for(_resolve(args, cfg, "noise", "auto"), scheme, delta)
    gamma = gamma_of(scheme, problem.class_params.rho)
    reference = _reference(problem, args.ref_cache, args.ref_steps)

    manifest = Manifest("tail", {"problem": problem.name, "scheme": scheme.value,
                                 "n": n, "N": N, "delta": delta, "seed": seed,
                                 "gamma": gamma})
    batch = run_batch(problem, reference, scheme, n, noise, N,
                      derive_cell_seed(seed, scheme, problem.name, n),
                      parallelism=parallelism, subsamples_per_step=subsamples,
                      delta_label=rule.label)
    denom = max(float(n) ** -gamma, delta)
    xi_max = args.xi_max if args.xi_max is not None else float(batch.errors[-1]) / denom
    grid = np.linspace(0.0, xi_max, args.xi_points)
    curve = tail_curve(batch, gamma, grid)
    path = os.path.join(out, f"tail_{scheme.value}_{problem.name}_n{n}.csv")
    curve.write_csv(path)
    manifest.add(path)
    manifest.write(out)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# diagnose


def cmd_diagnose(args) -> int:
    cfg = _load_config(args.config)
    problem = _resolve_problem(_resolve(args, cfg, "problem", "A"))
    seed = _resolve(args, cfg, "seed", DEFAULT_SEED, int)
    out = _ensure_out(_resolve(args, cfg, "out", "out"))
    reps = _resolve(args, cfg, "reps", 100_000, int)
    slope_N = _resolve(args, cfg, "N", 128, int)
    checks = []

    # conditional mean of the local quadrature error (analytic pair of problem A)
    diag = martingale_diagnostic(10, reps, seed)
    z = diag.max_standardized
    checks.append({"name": "martingale_mean_zero", "passed": bool(z <= 4.0),
                   "max_standardized_mean": z, "reps": reps})

    reference = _reference(problem, args.ref_cache, args.ref_steps)
    ladder = [64, 128, 256, 512, 1024]
    for scheme in (SchemeKind.EXPLICIT_EULER, SchemeKind.RUNGE_KUTTA2):
        fit = convergence_slope(problem, reference, scheme, ladder, slope_N, seed)
        lo, hi = SLOPE_BANDS[scheme]
        checks.append({"name": f"order_slope_{scheme.value}",
                       "passed": bool(lo <= fit.slope <= hi),
                       "slope": fit.slope, "expected": [lo, hi], "N": slope_N})

    rng = np.random.default_rng(seed)
    for kind in ("ee", "ie", "rk"):
        noise = NoiseModel(kind, 0.05)
        oracle = make_oracle(problem, noise, seed, 0, record_samples=True)
        for _ in range(500):
            t = problem.a + (problem.b - problem.a) * rng.random()
            x = problem.eta + rng.normal(size=problem.d)
            oracle.noisy_eval(t, x)
        samples = oracle.samples
        if args.tamper_noise:
            samples = [(t, x, 2.0 * p) for t, x, p in samples]
        ok = verify_noise_bound(noise, samples)
        checks.append({"name": f"noise_bound_{kind}", "passed": bool(ok),
                       "samples": len(samples), "tampered": bool(args.tamper_noise)})

    passed = all(c["passed"] for c in checks)
    report = {"passed": passed, "problem": problem.name, "seed": seed, "checks": checks}
    path = os.path.join(out, "diagnose.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# build-ref


def cmd_build_ref(args) -> int:
    cache = args.ref_cache or _default_ref_cache(args.ref_steps)
    ref = build_reference_B(n_ref=args.ref_steps, cache_path=cache)
    print(f"reference for B at {cache}: {ref.grid_ts.shape[0]} grid values, "
          f"sha256={ref.provenance.get('sha256', '')[:16]}...")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(p, *names):
    if "problem" in names:
        p.add_argument("--problem", help="test problem name (A or B)")
    if "scheme" in names:
        p.add_argument("--scheme", help="integrator: ee, ie or rk")
    if "n" in names:
        p.add_argument("--n", type=int, help="step count")
    if "noise" in names:
        p.add_argument("--noise", choices=["auto", "exact", "ee", "ie", "rk"],
                       help="noise class (default: matches the scheme; exact when delta=0)")
    if "delta" in names:
        p.add_argument("--delta", help="noise budget: literal or n^-p rule")
    if "epsilon" in names:
        p.add_argument("--epsilon", type=float, help="quantile level (default 0.05)")
    if "N" in names:
        p.add_argument("--N", type=int, help="Monte Carlo replications")
    if "seed" in names:
        p.add_argument("--seed", type=int, help="master seed (default 12345)")
    if "out" in names:
        p.add_argument("--out", help="output directory (default ./out)")
    if "parallelism" in names:
        p.add_argument("--parallelism", type=int, help="worker processes (default 1)")
    if "subsamples" in names:
        p.add_argument("--subsamples", type=int,
                       help="interior sup-norm samples per subinterval (default 8)")
    p.add_argument("--ref-cache", help="reference cache file for problem B")
    p.add_argument("--ref-steps", type=int, default=2_000_000,
                   help="reference build steps for problem B (default 2e6)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="randode",
                                 description="Randomized ODE scheme experiments")
    ap.add_argument("--config", help="INI config file ([experiment] section)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one trajectory and write it as CSV")
    _add_common(p, "problem", "scheme", "n", "noise", "delta", "seed", "out")
    p.add_argument("--dense", type=int, help="also write the interpolant on K points")
    p.add_argument("--force-tau", type=float,
                   help="test hook: fix every step's tau to this value")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="quantile multiplier table over (n, delta) cells")
    _add_common(p, "problem", "scheme", "noise", "epsilon", "N", "seed", "out",
                "parallelism", "subsamples")
    p.add_argument("--n-list", dest="n_list", help="step counts, space or comma separated")
    p.add_argument("--delta-rules", dest="delta_rules",
                   help="delta columns, e.g. '0 n^-1 2e-3'")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("band", help="confidence band around one noisy run")
    _add_common(p, "problem", "scheme", "n", "noise", "delta", "epsilon", "seed", "out")
    p.add_argument("--xi", type=float, help="band multiplier (required, > 0)")
    p.add_argument("--grid-points", dest="grid_points", type=int,
                   help="band evaluation grid size (default 201)")
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("tail", help="empirical exceedance curve for one cell")
    _add_common(p, "problem", "scheme", "n", "noise", "delta", "epsilon", "N",
                "seed", "out", "parallelism", "subsamples")
    p.add_argument("--xi-max", type=float, help="largest xi on the grid (default: auto)")
    p.add_argument("--xi-points", type=int, default=41, help="grid size (default 41)")
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("diagnose", help="self checks: mean-zero local errors, "
                                        "order slopes, noise bounds")
    _add_common(p, "problem", "N", "seed", "out")
    p.add_argument("--reps", type=int, help="replications for the mean-zero check")
    p.add_argument("--tamper-noise", action="store_true",
                   help="test hook: double recorded perturbations so the bound check fails")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("build-ref", help="build (or refresh) the problem-B reference cache")
    p.add_argument("--ref-cache", help="cache file (default: user cache dir)")
    p.add_argument("--ref-steps", type=int, default=2_000_000,
                   help="solver steps (default 2e6)")
    p.set_defaults(func=cmd_build_ref)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ConvergenceError, ReferenceSolutionError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
