"""Command-line entry point: sampling, verification suites, exports, rendering.

Exit codes: 0 success, 1 a verification threshold failed, 2 usage error.
Every run that writes files also writes ``<out>.manifest.json`` next to them.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from .errors import DataError, UsageError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- helpers --------------------------------------------------------------------------


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SORTNET_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SORTNET_SEED must be an integer, got {env!r}") from None


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


class _Run:
    """Collects outputs and writes the manifest on success."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.start = datetime.now(timezone.utc).isoformat()
        self.outputs: list[str] = []

    def emit(self, text: str, path: str | None):
        if path is None or path == "-":
            sys.stdout.write(text)
            return
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
        self.outputs.append(str(p))

    def finish(self, seed=None, manifest_at: str | None = None):
        target = manifest_at or (self.outputs[0] if self.outputs else None)
        if target is None:
            return
        params = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        manifest = {
            "command": self.command,
            "parameters": params,
            "seed": seed,
            "version": __version__,
            "started": self.start,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": self.outputs,
        }
        Path(f"{target}.manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def _report(ok: bool, message: str) -> int:
    print(("PASS " if ok else "FAIL ") + message, file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


# --- sample ---------------------------------------------------------------------------------


def _sample_one(job):
    from .sampler import RandomSource, sample_network

    n, seed, rep = job
    return sample_network(n, RandomSource(seed, rep)).to_text()


def cmd_sample(args) -> int:
    if args.n < 2 or args.reps < 1:
        raise UsageError("need --n >= 2 and --reps >= 1")
    seed = _seed(args)
    run = _Run(args, "sample")
    lines = _map(_sample_one, [(args.n, seed, r) for r in range(args.reps)], args.jobs)
    run.emit("".join(line + "\n" for line in lines), args.out)
    run.finish(seed)
    return EXIT_OK


# --- verify ---------------------------------------------------------------------------------


def _sine_row(job):
    from .sampler import RandomSource, sample_network
    from .trajectories import localization_span, octagon_check, sine_deviations

    n, seed, rep, gammas = job
    net = sample_network(n, RandomSource(seed, rep))
    dev = float(sine_deviations(net)[2].max())
    span = localization_span(net)
    return [rep, dev, span] + [octagon_check(net, g) for g in gammas]


def cmd_verify_sine(args) -> int:
    seed = _seed(args)
    run = _Run(args, "verify sine")
    rows = _map(_sine_row, [(args.n, seed, r, args.gamma) for r in range(args.reps)], args.jobs)
    header = ["replicate", "max_deviation", "localization_span"] + [f"octagon_pass_{g:g}" for g in args.gamma]
    run.emit(_csv_text(header, rows), args.out)
    run.finish(seed)
    devs = np.array([r[1] for r in rows])
    spans = np.array([r[2] for r in rows])
    ok = bool(np.all(spans <= 2 * devs))
    msg = f"span <= 2*deviation in {np.sum(spans <= 2 * devs)}/{len(rows)} replicates"
    if args.n >= 1000:
        ok &= bool(np.median(devs) < 0.25)
        msg += f"; median deviation {np.median(devs):.4f} (< 0.25)"
    return _report(ok, msg)


def _matrix_row(job):
    from .measures import ArchTimeT, grid_discrepancy, permutation_measure, support_hausdorff
    from .sampler import RandomSource, sample_network

    n, t, G, seed, rep = job
    emp = permutation_measure(sample_network(n, RandomSource(seed, rep)), t)
    m = ArchTimeT(t)
    return [rep, grid_discrepancy(emp, m, G), support_hausdorff(emp, m)], emp.atoms


def cmd_verify_matrices(args) -> int:
    seed = _seed(args)
    run = _Run(args, "verify matrices")
    res = _map(_matrix_row, [(args.n, args.t, args.grid, seed, r) for r in range(args.reps)], args.jobs)
    rows = [r for r, _ in res]
    run.emit(_csv_text(["replicate", "discrepancy", "hausdorff"], rows), args.out)
    if args.dump_atoms:
        for (row, atoms) in res:
            run.emit(_csv_text(["x", "y"], atoms.tolist()), str(Path(args.dump_atoms) / f"atoms_{row[0]}.csv"))
    run.finish(seed)
    good = sum(1 for r in rows if r[1] < 0.02 and r[2] < 0.1)
    return _report(good >= 0.95 * len(rows),
                   f"{good}/{len(rows)} replicates with discrepancy < 0.02 and hausdorff < 0.1")


def _circle_row(job):
    from .embedding import circle_distance, fit_great_circle, projection_residual
    from .sampler import RandomSource, sample_network

    n, seed, rep = job
    net = sample_network(n, RandomSource(seed, rep))
    circ = fit_great_circle(net)
    return [rep, circle_distance(net, circ), projection_residual(net, circ), circ.check()]


def cmd_verify_circle(args) -> int:
    seed = _seed(args)
    run = _Run(args, "verify circle")
    rows = _map(_circle_row, [(args.n, seed, r) for r in range(args.reps)], args.jobs)
    run.emit(_csv_text(["replicate", "d_inf_over_n", "projection_residual"], [r[:3] for r in rows]), args.out)
    run.finish(seed)
    med = float(np.median([r[1] for r in rows]))
    ok = all(r[3] for r in rows)
    msg = f"circle invariants hold in {sum(r[3] for r in rows)}/{len(rows)}"
    if args.n >= 1000:
        ok &= med < 0.2
        msg += f"; median d_inf/n {med:.4f} (< 0.2)"
    return _report(ok, msg)


def _subnet_patterns(job):
    from .geometry import subnetwork_patterns
    from .sampler import RandomSource, sample_network

    n, m, seed, rep, per = job
    src = RandomSource(seed, rep)
    net = sample_network(n, src)
    return list(subnetwork_patterns([net], m, per, src.child(0).generator()))


def cmd_verify_subnet(args) -> int:
    from .geometry import geometric_patterns, pattern_distribution, tv_distance
    from .sampler import RandomSource

    if not 2 <= args.m <= min(args.n, 5):
        raise UsageError("need 2 <= m <= min(n, 5)")
    seed = _seed(args)
    run = _Run(args, "verify subnet")
    nets = args.networks or max(1, args.reps // 200)
    per = [args.reps // nets + (1 if r < args.reps % nets else 0) for r in range(nets)]
    chunks = _map(_subnet_patterns, [(args.n, args.m, seed, r, per[r]) for r in range(nets)], args.jobs)
    sub = pattern_distribution(p for c in chunks for p in c)
    geo = pattern_distribution(geometric_patterns(args.m, args.reps, RandomSource(seed, 10**9).generator()))
    tv = tv_distance(sub, geo)
    doc = {
        "n": args.n, "m": args.m, "draws": args.reps, "networks": nets,
        "subnetwork": {" ".join(map(str, k)): v for k, v in sub.items()},
        "geometric": {" ".join(map(str, k)): v for k, v in geo.items()},
        "tv": tv,
    }
    run.emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    run.finish(seed)
    if args.m == 3:
        p = sub.get((1, 2, 1), 0.0)
        return _report(abs(p - 0.5) <= 0.01, f"P(1 2 1) = {p:.4f} (0.5 +- 0.01)")
    return _report(tv < 0.03, f"TV = {tv:.4f} (< 0.03)")


def _height_rows(job):
    from .sampler import RandomSource, sample_network
    from .trajectories import max_heights

    n, seed, rep, per = job
    src = RandomSource(seed, rep)
    net = sample_network(n, src)
    xs = src.child(0).generator().integers(1, n + 1, size=per)
    h = max_heights(net)
    return [[rep, int(x), float(h[x - 1])] for x in xs]


def cmd_verify_height(args) -> int:
    seed = _seed(args)
    run = _Run(args, "verify height")
    nets = -(-args.reps // args.per_network)
    per = [min(args.per_network, args.reps - r * args.per_network) for r in range(nets)]
    chunks = _map(_height_rows, [(args.n, seed, r, per[r]) for r in range(nets)], args.jobs)
    rows = [row for c in chunks for row in c]
    run.emit(_csv_text(["replicate", "particle", "max_height"], rows), args.out)
    run.finish(seed)
    h = np.array([r[2] for r in rows])
    ks = stats.kstest(h, lambda a: 1.0 - np.sqrt(1.0 - np.clip(a, 0.0, 1.0) ** 2)).statistic
    return _report(ks < 0.05, f"KS distance {ks:.4f} (< 0.05)")


# --- flux -----------------------------------------------------------------------------------


def cmd_flux_eval(args) -> int:
    from .flux import FluxPath, flux

    path = FluxPath.from_csv(Path(args.path).read_text())
    value = flux(path)
    lip_r = bool(abs(path.values[0] + path.values[-1]) <= 1e-12)
    run = _Run(args, "flux eval")
    run.emit(json.dumps({"M": path.M, "flux": value, "endpoints_negated": lip_r}) + "\n", args.out)
    run.finish()
    if lip_r:
        return _report(value >= 1 - 1e-6, f"flux {value:.10f} (>= 1 - 1e-6 for h(0) = -h(1))")
    return EXIT_OK


def cmd_flux_minimize(args) -> int:
    from .flux import minimize_flux_multistart, sine_family_distance

    if not abs(args.a) < 1:
        raise UsageError("need |a| < 1")
    seed = _seed(args)
    results = minimize_flux_multistart(args.a, args.grid, args.starts, seed, args.iterations)
    best = min(results, key=lambda r: r.value)
    dist, k = sine_family_distance(best.path, args.a)
    run = _Run(args, "flux minimize")
    run.emit(best.path.to_csv(), args.out)
    summary = {"a": args.a, "M": args.grid, "starts": args.starts, "value": best.value,
               "converged": best.converged, "family_distance": dist, "family_k": k,
               "values": [r.value for r in results]}
    if args.out and args.out != "-":
        run.emit(json.dumps(summary, indent=2) + "\n", f"{args.out}.summary.json")
    else:
        print(json.dumps(summary), file=sys.stderr)
    run.finish(seed)
    ok = all(r.value >= 1 - 1e-6 for r in results) and abs(best.value - 1) < 1e-3 and dist < 0.02
    return _report(ok, f"best flux {best.value:.8f}, distance to sine family {dist:.4f}")


# --- transform ----------------------------------------------------------------------------------


def cmd_transform_check(args) -> int:
    from .transform import identity_residual

    if args.kgrid < 1:
        raise UsageError("--kgrid must be positive")
    ks = np.arange(1, args.kgrid + 1) / (args.kgrid + 1)
    rows = [[float(k), identity_residual(float(k))] for k in ks]
    run = _Run(args, "transform check")
    run.emit(_csv_text(["k", "residual"], rows), args.out)
    run.finish()
    worst = max(r[1] for r in rows)
    return _report(worst < 1e-8, f"max residual {worst:.3e} (< 1e-8)")


def _load_measure(arg: str):
    from .transform import ArcsinePlus, DiscreteMeasure1D

    text = Path(arg).read_text() if Path(arg).exists() else arg
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError("--measure must be a JSON file or JSON text") from None
    if data == "arcsine+" or (isinstance(data, dict) and data.get("kind") == "arcsine+"):
        return ArcsinePlus
    if not isinstance(data, dict) or "locations" not in data or "probs" not in data:
        raise DataError('measure JSON needs "locations" and "probs" (or {"kind": "arcsine+"})')
    return DiscreteMeasure1D(data["locations"], data["probs"])


def cmd_transform_ratio(args) -> int:
    from .transform import ratio_fn

    nu = _load_measure(args.measure)
    xs = np.linspace(0.0, 1.0, args.points)
    rows = [[float(x), float(ratio_fn(nu, x))] for x in xs]
    run = _Run(args, "transform ratio")
    run.emit(_csv_text(["x", "r"], rows), args.out)
    run.finish()
    return EXIT_OK


# --- local ----------------------------------------------------------------------------------------


def cmd_local_rates(args) -> int:
    seed = _seed(args)
    rows = _map(_local_rate_row, [(args.n, args.t, seed, r) for r in range(args.reps)], args.jobs)
    run = _Run(args, "local rates")
    run.emit(_csv_text(["replicate", "W", "Q"], rows), args.out)
    run.finish(seed)
    mw = float(np.mean([r[1] for r in rows]))
    mq = float(np.mean([r[2] for r in rows]))
    tw, tq = 4 * args.t / np.pi, 8 * args.t / np.pi
    ok = abs(mw / tw - 1) <= 0.1 and abs(mq / tq - 1) <= 0.1
    return _report(ok, f"mean W {mw:.3f} vs {tw:.3f}, mean Q {mq:.3f} vs {tq:.3f} (within 10%)")


def _local_rate_row(job):
    from .local import center_rate

    n, t, seed, rep = job
    return [rep, *center_rate(n, t, seed, rep)]


def _speed_rows(job):
    from .local import network_speeds

    n, T, seed, rep, per = job
    centers, speeds = network_speeds(n, T, seed, rep, per)
    return [[rep, int(c), float(s)] for c, s in zip(centers, speeds)]


def cmd_local_speeds(args) -> int:
    from .flux import ArcsineSpeedLaw

    seed = _seed(args)
    nets = -(-args.reps // args.per_network)
    chunks = _map(_speed_rows, [(args.n, args.T, seed, r, args.per_network) for r in range(nets)], args.jobs)
    rows = [row for c in chunks for row in c][:args.reps]
    run = _Run(args, "local speeds")
    run.emit(_csv_text(["replicate", "center", "speed"], rows), args.out)
    run.finish(seed)
    s = np.array([r[2] for r in rows])
    ks = stats.kstest(s, ArcsineSpeedLaw.cdf).statistic
    mean_abs = float(np.mean(np.abs(s)))
    ok = ks < 0.08 and 1.8 <= mean_abs <= 2.2
    return _report(ok, f"KS {ks:.4f} (< 0.08), mean |speed| {mean_abs:.3f} (in [1.8, 2.2])")


# --- render ------------------------------------------------------------------------------------------


def cmd_render(args) -> int:
    from .network import SortingNetwork
    from .render import MAX_N, render_wiring
    from .sampler import RandomSource, sample_network

    if args.input:
        line = Path(args.input).read_text().splitlines()[args.line]
        n = int(line.split()[0])
        if n > MAX_N:
            raise UsageError(f"renderer supports n <= {MAX_N}, got {n}")
        net = SortingNetwork.from_text(line)
        seed = None
    else:
        if args.n is None:
            raise UsageError("render needs --in or --n")
        if args.n > MAX_N:
            raise UsageError(f"renderer supports n <= {MAX_N}, got {args.n}")
        seed = _seed(args)
        net = sample_network(args.n, RandomSource(seed, 0))
    run = _Run(args, "render")
    render_wiring(net, args.out)
    run.outputs.append(str(args.out))
    run.finish(seed)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sortnet", description="Random sorting networks: sampling and limit checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(q, seed=True, jobs=True):
        if seed:
            q.add_argument("--seed", type=int, default=None, help="falls back to $SORTNET_SEED, then 0")
        if jobs:
            q.add_argument("--jobs", type=int, default=1)
        q.add_argument("--out", default=None, help="output file (default: stdout)")

    q = sub.add_parser("sample", help="write uniform random networks, one per line")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--reps", type=int, default=1)
    common(q)
    q.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", help="run a verification suite").add_subparsers(
        dest="suite", required=True, parser_class=_Parser)
    q = v.add_parser("sine")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--reps", type=int, default=10)
    q.add_argument("--gamma", type=float, nargs="+", default=[0.1, 0.3])
    common(q)
    q.set_defaults(func=cmd_verify_sine)

    q = v.add_parser("matrices")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--t", type=float, default=0.5)
    q.add_argument("--reps", type=int, default=10)
    q.add_argument("--grid", type=int, default=10)
    q.add_argument("--dump-atoms", default=None, metavar="DIR")
    common(q)
    q.set_defaults(func=cmd_verify_matrices)

    q = v.add_parser("circle")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--reps", type=int, default=10)
    common(q)
    q.set_defaults(func=cmd_verify_circle)

    q = v.add_parser("subnet")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--reps", type=int, default=10000, help="draws on each side")
    q.add_argument("--networks", type=int, default=None, help="networks to draw subsets from")
    common(q)
    q.set_defaults(func=cmd_verify_subnet)

    q = v.add_parser("height")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--reps", type=int, default=2000, help="(network, particle) draws")
    q.add_argument("--per-network", type=int, default=50)
    common(q)
    q.set_defaults(func=cmd_verify_height)

    f = sub.add_parser("flux", help="particle-flux tools").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    q = f.add_parser("eval")
    q.add_argument("--path", required=True, help="CSV with header t,h")
    common(q, seed=False, jobs=False)
    q.set_defaults(func=cmd_flux_eval)
    q = f.add_parser("minimize")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--grid", type=int, default=100)
    q.add_argument("--starts", type=int, default=5)
    q.add_argument("--iterations", type=int, default=5000)
    common(q, jobs=False)
    q.set_defaults(func=cmd_flux_minimize)

    t = sub.add_parser("transform", help="size-bias transform checks").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    q = t.add_parser("check")
    q.add_argument("--kgrid", type=int, default=99)
    common(q, seed=False, jobs=False)
    q.set_defaults(func=cmd_transform_check)
    q = t.add_parser("ratio")
    q.add_argument("--measure", required=True, help='JSON file or text: {"locations": [...], "probs": [...]}')
    q.add_argument("--points", type=int, default=101)
    common(q, seed=False, jobs=False)
    q.set_defaults(func=cmd_transform_ratio)

    loc = sub.add_parser("local", help="local-window statistics").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    q = loc.add_parser("rates")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--t", type=float, default=5.0)
    q.add_argument("--reps", type=int, default=200)
    common(q)
    q.set_defaults(func=cmd_local_rates)
    q = loc.add_parser("speeds")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--T", type=float, default=10.0)
    q.add_argument("--reps", type=int, default=2000, help="speed samples")
    q.add_argument("--per-network", type=int, default=10)
    common(q)
    q.set_defaults(func=cmd_local_speeds)

    q = sub.add_parser("render", help="draw a wiring diagram as SVG")
    q.add_argument("--in", dest="input", default=None, help="network text file")
    q.add_argument("--line", type=int, default=0, help="which line of --in to draw")
    q.add_argument("--n", type=int, default=None, help="sample a network instead")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_render)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("sortnet: error: --jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DataError) as exc:
        print(f"sortnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
