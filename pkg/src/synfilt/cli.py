"""Command-line entry point: ``synfilt <group> <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 a statistical or identity check
failed, 64 usage error (unknown subcommand or flag).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import context as ctx
from . import dirichlet as diri
from . import filtration as filt
from . import prob
from .realizer import check_realizer_identities
from .simplex import OrderPreservingMap, compose, factorize, check_simplicial_identities, recompose

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CHECK_FAILED = 3
EXIT_USAGE = 64

DEFAULT_SEED = 42
SEED_ENV = "SYNFILT_SEED"
DEFAULT_STATE_FILE = "filtration.json"


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        # prefix matching would make "filt past --s" collide with --seed
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    output_format: str | None = None
    se_threshold: float = diri.DEFAULT_SE_THRESHOLD

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed {self.seed} is not a 64-bit unsigned integer")
        if self.output_format not in (None, "json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return DEFAULT_SEED if raw is None else int(raw)


# -- output helpers ----------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _clean(value):
    """Make a report JSON-safe: non-finite floats become strings."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    return value


def emit_json(report: dict, out) -> None:
    out.write(json.dumps(_clean(report), indent=2, sort_keys=True) + "\n")


def emit_csv(header, rows, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    if header:
        writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


# -- cantor ------------------------------------------------------------------


def cmd_cantor_encode(args, config, out):
    r = ctx.parse_rational(args.rational)
    c = ctx.cantor_expand(r)
    if config.output_format == "json":
        emit_json({"rational": str(r), "digits": list(c.digits)}, out)
    else:
        out.write(str(c) + "\n")
    return EXIT_OK


def cmd_cantor_decode(args, config, out):
    c = ctx.ContextPrefix.parse(args.digits)
    r = ctx.cantor_value(c)
    if config.output_format == "json":
        emit_json({"rational": str(r), "digits": list(c.digits)}, out)
    else:
        out.write(str(r) + "\n")
    return EXIT_OK


# -- simplex -----------------------------------------------------------------


def _identity_report(max_n: int, points: int, seed: int) -> dict:
    morph = check_simplicial_identities(max_n)
    real = check_realizer_identities(max_n, points, np.random.default_rng(seed))
    return {
        "max_n": max_n,
        "seed": seed,
        "morphism": morph,
        "realizer": real,
        "passed": morph["passed"] and real["passed"],
    }


def cmd_simplex_identities(args, config, out):
    report = _identity_report(args.max_n, args.points, config.seed)
    emit_json(report, out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def _word_json(word):
    return [
        {"kind": "face", "n": g.n, "index": g.i} if hasattr(g, "i")
        else {"kind": "degeneracy", "n": g.n, "index": g.j}
        for g in word
    ]


def cmd_simplex_factorize(args, config, out):
    f = OrderPreservingMap.parse(args.map)
    word = factorize(f)
    emit_json(
        {
            "map": str(f),
            "word": _word_json(word),
            "notation": str(word),
            "recomposed": str(recompose(word)),
        },
        out,
    )
    return EXIT_OK


def cmd_simplex_compose(args, config, out):
    g = OrderPreservingMap.parse(args.g)
    f = OrderPreservingMap.parse(args.f)
    emit_json({"g": str(g), "f": str(f), "composite": str(compose(g, f))}, out)
    return EXIT_OK


# -- diri --------------------------------------------------------------------


def cmd_diri_sample(args, config, out):
    params = diri.DirichletParams.parse(args.alpha)
    points = diri.sample(params, config.rng(), args.n_samples)
    if config.output_format == "json":
        emit_json({"alpha": [str(a) for a in params], "seed": config.seed,
                   "samples": points.tolist()}, out)
    else:
        emit_csv([f"x{k}" for k in range(len(params))], points.tolist(), out)
    return EXIT_OK


def cmd_diri_density_grid(args, config, out):
    params = diri.DirichletParams.parse(args.alpha)
    grid = diri.density_grid(params, args.resolution)
    if config.output_format == "json":
        emit_json({"alpha": [str(a) for a in params], "resolution": args.resolution,
                   "points": [{"x": list(x), "density": d} for x, d in grid]}, out)
    else:
        header = [f"x{k}" for k in range(len(params))] + ["density"]
        emit_csv(header, [list(x) + [d] for x, d in grid], out)
    return EXIT_OK


def pushforward_report(alpha: str, face: int | None, n_samples: int, config: RunConfig,
                       workers: int = 1) -> dict:
    params = diri.DirichletParams.parse(alpha)
    if params.n < 1:
        raise ValueError("pushforward along a face needs at least two parameters")
    faces = list(range(params.n + 1)) if face is None else [face]
    if face is not None:
        streams = [config.rng()]
    else:
        streams = diri.spawn_streams(config.seed, len(faces))

    def run(item):
        i, rng = item
        return diri.verify_pushforward_face(params, i, n_samples, rng, config.se_threshold)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(run, zip(faces, streams)))
    return {
        "alpha": [str(a) for a in params],
        "seed": config.seed,
        "n_samples": n_samples,
        "threshold_se": config.se_threshold,
        "checks": [r.to_dict() for r in reports],
        "passed": all(r.passed for r in reports),
    }


def cmd_pushforward(args, config, out):
    report = pushforward_report(args.alpha, args.face, args.n_samples, config, args.workers)
    emit_json(report, out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# -- verify ------------------------------------------------------------------


def tower_report(trials: int, max_outcomes: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    identity_failures = tower_failures = 0
    worst = 0.0
    for _ in range(trials):
        f, phi, psi = prob.random_instance(rng, max_outcomes)
        g = prob.conditional_expectation(f, phi)
        for event in prob.events(phi.target):
            lhs = prob.integrate(g, event)
            rhs = prob.integrate(f, phi.preimage(event))
            worst = max(worst, abs(lhs - rhs))
            if abs(lhs - rhs) > prob.MASS_TOLERANCE:
                identity_failures += 1
                break
        if not prob.verify_tower(f, phi, psi):
            tower_failures += 1
    return {
        "trials": trials,
        "max_outcomes": max_outcomes,
        "seed": seed,
        "tolerance": prob.MASS_TOLERANCE,
        "max_identity_error": worst,
        "identity_failures": identity_failures,
        "tower_failures": tower_failures,
        "passed": identity_failures == 0 and tower_failures == 0,
    }


def cmd_verify_tower(args, config, out):
    report = tower_report(args.trials, args.max_outcomes, config.seed)
    emit_json(report, out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# -- filt --------------------------------------------------------------------


def _load_state(path: str) -> filt.FiltrationState:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ValueError(f"no filtration state at {path}; run 'filt init' first") from None
    return filt.FiltrationState.loads(text)


def _save_state(state: filt.FiltrationState, path: str) -> None:
    Path(path).write_text(json.dumps(state.to_json(), indent=2, sort_keys=True) + "\n")


def _state_report(state: filt.FiltrationState) -> dict:
    doc = state.to_json()
    doc["posterior_mean"] = [str(m) for m in filt.posterior_means(state)]
    doc["next_face_index"] = ctx.context_face_index(state.context, state.anchor_time + 1)
    return doc


def cmd_filt_init(args, config, out):
    if args.context is not None and args.context_rational is not None:
        raise ValueError("give either --context or --context-rational, not both")
    if args.context_rational is not None:
        context = ctx.cantor_expand(ctx.parse_rational(args.context_rational))
    else:
        context = ctx.ContextPrefix.parse(args.context or "")
    params = diri.DirichletParams.parse(args.alpha)
    state = filt.FiltrationState(params.n, params, context)
    _save_state(state, args.state)
    emit_json(_state_report(state), out)
    return EXIT_OK


def cmd_filt_observe(args, config, out):
    state = _load_state(args.state)
    state = filt.bayes_update(state, filt.ObservationEvent(state.anchor_time, args.k))
    _save_state(state, args.state)
    emit_json(_state_report(state), out)
    return EXIT_OK


def cmd_filt_advance(args, config, out):
    state = _load_state(args.state)
    state = filt.advance(state, diri.as_fraction(args.fraction))
    _save_state(state, args.state)
    emit_json(_state_report(state), out)
    return EXIT_OK


def cmd_filt_past(args, config, out):
    state = _load_state(args.state)
    params = filt.state_at(state, args.s)
    emit_json({"s": args.s, "anchor_time": state.anchor_time,
               "alpha": [filt._number_to_json(a) for a in params]}, out)
    return EXIT_OK


def cmd_filt_show(args, config, out):
    emit_json(_state_report(_load_state(args.state)), out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="synfilt", description="Synthetic filtrations toolkit.")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    parser.add_argument("--output", choices=("json", "csv"), default=None)
    parser.add_argument("--se-threshold", type=float, default=diri.DEFAULT_SE_THRESHOLD,
                        help="pass threshold for moment checks, in standard errors")
    groups = parser.add_subparsers(dest="group", required=True)

    cantor = groups.add_parser("cantor", help="factorial-base context encoding")
    sub = cantor.add_subparsers(dest="command", required=True)
    p = sub.add_parser("encode")
    p.add_argument("rational", help="m/n with 0 <= m/n < 1")
    p.set_defaults(func=cmd_cantor_encode)
    p = sub.add_parser("decode")
    p.add_argument("digits", help="comma-separated digits c1,c2,...")
    p.set_defaults(func=cmd_cantor_decode)

    simplex = groups.add_parser("simplex", help="simplex category utilities")
    sub = simplex.add_subparsers(dest="command", required=True)
    p = sub.add_parser("identities")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_simplex_identities)
    p = sub.add_parser("factorize")
    p.add_argument("map", help="n->m:[a0,a1,...]")
    p.set_defaults(func=cmd_simplex_factorize)
    p = sub.add_parser("compose")
    p.add_argument("g")
    p.add_argument("f")
    p.set_defaults(func=cmd_simplex_compose)

    d = groups.add_parser("diri", help="Dirichlet sampling and checks")
    sub = d.add_subparsers(dest="command", required=True)
    p = sub.add_parser("sample")
    p.add_argument("--alpha", required=True)
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_diri_sample)
    p = sub.add_parser("density-grid")
    p.add_argument("--alpha", required=True)
    p.add_argument("--resolution", type=int, default=20)
    p.set_defaults(func=cmd_diri_density_grid)
    p = sub.add_parser("verify-pushforward")
    _pushforward_flags(p)

    v = groups.add_parser("verify", help="verification reports")
    sub = v.add_subparsers(dest="command", required=True)
    p = sub.add_parser("pushforward")
    _pushforward_flags(p)
    p = sub.add_parser("identities")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_simplex_identities)
    p = sub.add_parser("tower")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--max-outcomes", type=int, default=8)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_tower)

    f = groups.add_parser("filt", help="Dirichlet filtration state")
    f.add_argument("--state", default=DEFAULT_STATE_FILE, help="state file path")
    sub = f.add_subparsers(dest="command", required=True)
    state_flag = dict(default=argparse.SUPPRESS, help="state file path")
    p = sub.add_parser("init")
    p.add_argument("--state", **state_flag)
    p.add_argument("--alpha", required=True)
    p.add_argument("--context", default=None, help="digits c1,c2,...")
    p.add_argument("--context-rational", default=None, help="context as m/n")
    p.set_defaults(func=cmd_filt_init)
    p = sub.add_parser("observe")
    p.add_argument("--state", **state_flag)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_filt_observe)
    p = sub.add_parser("advance")
    p.add_argument("--state", **state_flag)
    p.add_argument("--fraction", default="1/2")
    p.set_defaults(func=cmd_filt_advance)
    p = sub.add_parser("past")
    p.add_argument("--state", **state_flag)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_filt_past)
    p = sub.add_parser("show")
    p.add_argument("--state", **state_flag)
    p.set_defaults(func=cmd_filt_show)

    return parser


def _pushforward_flags(p) -> None:
    p.add_argument("--alpha", required=True)
    p.add_argument("--face", type=int, default=None, help="face index (default: all)")
    p.add_argument("--n-samples", "--n", dest="n_samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_pushforward)


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        seed = args.seed if args.seed is not None else default_seed()
        config = RunConfig(seed, args.output, args.se_threshold)
        return args.func(args, config, out)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        print(f"synfilt: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
