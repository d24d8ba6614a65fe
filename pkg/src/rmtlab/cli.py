"""Command line front end.

Five subcommands: ``tables`` dumps the exact combinatorial tables,
``enumerate`` lists cycle class representatives, ``oracle`` prints exact
small-case expectations, ``mc`` runs experiments from a JSON config, and
``verify`` runs the acceptance suite. All file output is byte-deterministic
for a given config, seed, and version: rationals are serialized exactly as
"num/den", floats via their shortest round-trip form, and wall-clock
timestamps go to stderr only, never into files.

Exit codes: 0 success, 1 criterion or convergence failure, 2 usage or
config error, 3 resource guard.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .acceptance import DEFAULT_SEED, run_all
from .combinat import (
    catalan,
    first_vertex_count_formula,
    mp_moment_exact,
    narayana_count,
)
from .cycles import (
    dominant_classes,
    exact_wigner_trace_mean,
    exact_wishart_trace_mean,
    mark_edges,
    to_dyck_path,
)
from .errors import ConfigError, ConvergenceError, ResourceGuardError
from .matgen import EntryLaw, RandomSeed, law_profile
from .mcengine import StatSummary, config_from_json, run_experiment
from .spectral import (
    MPParams,
    generating_eq_residual,
    mp_moment_quadrature,
    stieltjes_residual,
)
from .variance import variance_report

_TABLE_COLUMNS = {
    "catalan": ("index", "value"),
    "beta": ("k", "beta", "beta_decimal", "catalan"),
    "variance": (
        "p", "A11", "A12", "A1", "A2_direct", "A2_closed",
        "offdiag_var", "c2_at_1", "c2_at_1.8", "c2_at_3",
    ),
    "narayana": ("p", "i", "count"),
    "fcount": ("l", "t", "count"),
}


def _cell(value) -> str:
    """Render one CSV cell deterministically. Fractions keep exact num/den
    form; floats use shortest round-trip; None becomes empty."""
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        # repr of the builtin float; numpy scalars would otherwise print
        # their wrapped form
        return repr(float(value))
    return str(value)


def _csv_bytes(header: tuple[str, ...], rows: list[tuple]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue().encode()


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode()


def _write_all(out_dir: Path, files: dict[str, bytes]) -> None:
    """Write every staged file at once. Content is fully built before this
    is called, so a failed run never leaves partial results behind."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, payload in files.items():
        (out_dir / name).write_bytes(payload)
        print(f"wrote {out_dir / name}", file=sys.stderr)


def _stamp(label: str) -> None:
    print(f"{label} {datetime.now(timezone.utc).isoformat()}", file=sys.stderr)


def _parse_int_tuple(text: str, arity: int, names: str):
    parts = text.split(",")
    if len(parts) != arity:
        raise argparse.ArgumentTypeError(f"expected {names}, got {text!r}")
    try:
        return tuple(int(part) for part in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers {names}, got {text!r}")


def _parse_beta_arg(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected GAMMA,K, got {text!r}")
    try:
        gamma = Fraction(parts[0])
        k_max = int(parts[1])
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected ratio,integer, got {text!r}")
    return gamma, k_max


def _parse_seed_arg(text: str) -> RandomSeed:
    master, stream = _parse_int_tuple(text, 2, "MASTER,STREAM")
    return RandomSeed(master=master, stream=stream)


def _law_from_args(name: str, b_text: str | None) -> EntryLaw:
    problems = []
    law = None
    if name == "three_point":
        if b_text is None:
            problems.append("law: three_point requires --b")
        else:
            try:
                b_squared = Fraction(b_text) ** 2
            except (ValueError, ZeroDivisionError):
                problems.append(f"b: not a number or fraction: {b_text!r}")
            else:
                try:
                    law = EntryLaw.three_point(b_squared=b_squared)
                except ValueError as err:
                    problems.append(f"b: {err}")
    else:
        if b_text is not None:
            problems.append("b: only three_point takes --b")
        builders = {
            "rademacher": EntryLaw.rademacher,
            "gaussian": EntryLaw.gaussian,
            "uniform": EntryLaw.uniform_symmetric,
        }
        if name in builders:
            law = builders[name]()
        else:
            problems.append(
                f"law: unknown law {name!r}; choose rademacher, gaussian, uniform,"
                " or three_point"
            )
    if problems:
        raise ConfigError(problems)
    return law


def _cmd_tables(args) -> int:
    chosen = [
        name for name in ("catalan", "beta", "variance", "narayana", "fcount")
        if getattr(args, name) is not None
    ]
    if len(chosen) != 1:
        raise ConfigError(["tables: pass exactly one of --catalan, --beta,"
                           " --variance, --narayana, --fcount"])
    table = chosen[0]
    floors = {"catalan": 0, "beta": None, "variance": 2, "narayana": 1, "fcount": 1}
    if floors[table] is not None and getattr(args, table) < floors[table]:
        raise ConfigError([f"{table}: need at least {floors[table]},"
                           f" got {getattr(args, table)}"])
    if table == "beta" and args.beta[1] < 1:
        raise ConfigError([f"beta: need K >= 1, got {args.beta[1]}"])
    rows: list[tuple] = []
    if table == "catalan":
        n = args.catalan
        rows = [(i, catalan(i)) for i in range(n + 1)]
    elif table == "beta":
        gamma, k_max = args.beta
        rows = [
            (k, mp_moment_exact(k, gamma), float(mp_moment_exact(k, gamma)), catalan(k))
            for k in range(1, k_max + 1)
        ]
    elif table == "variance":
        for p in range(2, args.variance + 1):
            report = variance_report(p)
            rows.append(tuple(report[c] for c in _TABLE_COLUMNS["variance"]))
    elif table == "narayana":
        for p in range(1, args.narayana + 1):
            for i in range(p):
                rows.append((p, i, narayana_count(p, i)))
    else:
        for l in range(1, args.fcount + 1):
            for t in range(1, l + 1):
                rows.append((l, t, first_vertex_count_formula(l, t)))
    payload = _csv_bytes(_TABLE_COLUMNS[table], rows)
    _write_all(Path(args.out), {f"{table}.csv": payload})
    sys.stdout.write(payload.decode())
    return 0


def _cmd_enumerate(args) -> int:
    rows = []
    for index, walk in enumerate(dominant_classes(args.l)):
        dyck = "".join("+" if step == 1 else "-" for step in to_dyck_path(mark_edges(walk)))
        rows.append((
            index,
            "-".join(str(v) for v in walk),
            dyck,
            len(set(walk[::2])) - 1,
        ))
    payload = _csv_bytes(("index", "walk", "dyck", "bipartite_index"), rows)
    _write_all(Path(args.out), {f"classes_l{args.l}.csv": payload})
    sys.stdout.write(payload.decode())
    return 0


def _cmd_oracle(args) -> int:
    if (args.wigner is None) == (args.wishart is None):
        raise ConfigError(["oracle: pass exactly one of --wigner or --wishart"])
    law = _law_from_args(args.law, args.b)
    if args.wigner is not None:
        n, p = args.wigner
        profile = law_profile(law, max(2, p))
        mean = exact_wigner_trace_mean(n, p, profile.even_moments)
        row = ("wigner", n, None, p, law.label, mean, float(mean))
    else:
        n, N, p = args.wishart
        profile = law_profile(law, max(2, p))
        mean = exact_wishart_trace_mean(n, N, p, profile.even_moments)
        row = ("wishart", n, N, p, law.label, mean, float(mean))
    payload = _csv_bytes(
        ("matrix", "n", "N", "p", "law", "mean", "mean_decimal"), [row]
    )
    _write_all(Path(args.out), {"oracle.csv": payload})
    print(mean)
    return 0


def _cmd_spectral(args) -> int:
    gamma = args.gamma
    params = MPParams(float(gamma))
    rows: list[tuple] = []
    for k in range(1, 9):
        quad = mp_moment_quadrature(k, params)
        exact = mp_moment_exact(k, gamma)
        rows.append(("moment", f"k={k}", abs(quad - float(exact))))
    for real in (1.0, 2.0, 3.0):
        for imag in (1.0, 2.0):
            z = complex(real, imag)
            rows.append(("stieltjes", f"z={real:g}+{imag:g}i", stieltjes_residual(z, params)))
    x = 0.1 / params.b
    rows.append(("series", f"x={x!r}", generating_eq_residual(x, params, 40)))
    payload = _csv_bytes(("kind", "point", "residual"), rows)
    _write_all(Path(args.out), {"residuals.csv": payload})
    sys.stdout.write(payload.decode())
    return 0


def _load_mc_config(path: Path):
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise ConfigError([f"config: cannot read {path}: {err}"])
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as err:
        raise ConfigError([f"config: invalid JSON: {err}"])
    problems = []
    if not isinstance(obj, dict):
        raise ConfigError(["config: top level must be an object"])
    problems.extend(f"{k}: unknown top-level field" for k in sorted(set(obj) - {"seed", "experiments"}))
    seed = None
    seed_obj = obj.get("seed")
    if not isinstance(seed_obj, dict) or set(seed_obj) != {"master", "stream"}:
        problems.append('seed: need an object {"master": int, "stream": int}')
    else:
        try:
            seed = RandomSeed(master=seed_obj["master"], stream=seed_obj["stream"])
        except (TypeError, ValueError) as err:
            problems.append(f"seed: {err}")
    experiments = obj.get("experiments")
    configs = []
    if not isinstance(experiments, list) or not experiments:
        problems.append("experiments: need a non-empty list")
    else:
        # a bad seed must not hide experiment problems; when it failed to
        # parse, validate against a stand-in (the raise below discards these)
        check_seed = seed if seed is not None else RandomSeed(master=0, stream=0)
        for i, entry in enumerate(experiments):
            try:
                configs.append(config_from_json(entry, check_seed))
            except ConfigError as err:
                problems.extend(f"experiments[{i}].{p}" for p in err.problems)
    if problems:
        raise ConfigError(problems)
    return raw, seed, configs


def _manifest(config_bytes: bytes, seed: RandomSeed, criteria: dict) -> bytes:
    return _json_bytes({
        "config_digest": "sha256:" + hashlib.sha256(config_bytes).hexdigest(),
        "criteria": criteria,
        "seed": {"master": seed.master, "stream": seed.stream},
        "tool_version": __version__,
    })


def _summary_json(summary: StatSummary) -> dict:
    return {name: getattr(summary, name) for name in StatSummary.field_names()}


def _histogram_rows(hist) -> list[tuple]:
    rows = [("underflow", None, None, hist.underflow)]
    for i, count in enumerate(hist.counts):
        rows.append((i, float(hist.edges[i]), float(hist.edges[i + 1]), int(count)))
    rows.append(("overflow", None, None, hist.overflow))
    return rows


def _cmd_mc(args) -> int:
    _stamp("start")
    raw, seed, configs = _load_mc_config(Path(args.config))
    summary_rows = []
    json_experiments = []
    files: dict[str, bytes] = {}
    for i, cfg in enumerate(configs):
        result = run_experiment(cfg, args.workers)
        s = result.summary
        summary_rows.append(tuple(getattr(s, name) for name in StatSummary.field_names()))
        entry = {"summary": _summary_json(s), "rows": result.rows, "histogram": None}
        if result.histogram is not None:
            entry["histogram"] = {
                "edges": [float(e) for e in result.histogram.edges],
                "counts": [int(c) for c in result.histogram.counts],
                "underflow": result.histogram.underflow,
                "overflow": result.histogram.overflow,
            }
            files[f"experiment_{i}_histogram.csv"] = _csv_bytes(
                ("bin", "left", "right", "count"), _histogram_rows(result.histogram)
            )
        json_experiments.append(entry)
        print(f"experiment {i}: {s.kind} n={s.n} p={s.p} law={s.law}"
              f" mean={s.mean!r} variance={s.variance!r}")
    files["results.csv"] = _csv_bytes(tuple(StatSummary.field_names()), summary_rows)
    files["results.json"] = _json_bytes({"experiments": json_experiments})
    files["manifest.json"] = _manifest(raw, seed, {})
    _write_all(Path(args.out), files)
    _stamp("end")
    return 0


def _cmd_verify(args) -> int:
    _stamp("start")
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    results = run_all(seed, args.workers, report=lambda r: print(
        f"criterion {r.index:2d} {'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}",
        flush=True,
    ))
    criteria = {f"{r.index:02d}": r.passed for r in results}
    config_bytes = _json_bytes({"seed": {"master": seed.master, "stream": seed.stream}})
    files = {
        "criteria.csv": _csv_bytes(
            ("index", "name", "passed", "detail"),
            [(r.index, r.name, r.passed, r.detail) for r in results],
        ),
        "manifest.json": _manifest(config_bytes, seed, criteria),
    }
    _write_all(Path(args.out), files)
    _stamp("end")
    failed = [r.index for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} criteria failed:"
              f" {', '.join(str(i) for i in failed)}")
        return 1
    print(f"all {len(results)} criteria passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Exact combinatorial tables, small-case oracles, and"
                    " seeded Monte Carlo checks for random matrix limit laws.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    tables = sub.add_parser("tables", help="dump exact tables as CSV")
    tables.add_argument("--catalan", type=int, metavar="N")
    tables.add_argument("--beta", type=_parse_beta_arg, metavar="GAMMA,K")
    tables.add_argument("--variance", type=int, metavar="P")
    tables.add_argument("--narayana", type=int, metavar="P")
    tables.add_argument("--fcount", type=int, metavar="L")
    tables.add_argument("--out", default=".", metavar="DIR")
    tables.set_defaults(func=_cmd_tables)

    enum = sub.add_parser("enumerate", help="list cycle class representatives")
    enum.add_argument("--l", type=int, required=True, metavar="L")
    enum.add_argument("--out", default=".", metavar="DIR")
    enum.set_defaults(func=_cmd_enumerate)

    oracle = sub.add_parser("oracle", help="exact small-case trace expectations")
    oracle.add_argument("--wigner", type=lambda t: _parse_int_tuple(t, 2, "N,P"),
                        metavar="N,P")
    oracle.add_argument("--wishart", type=lambda t: _parse_int_tuple(t, 3, "N,COLS,P"),
                        metavar="N,COLS,P")
    oracle.add_argument("--law", required=True, metavar="NAME")
    oracle.add_argument("--b", metavar="VALUE",
                        help="three_point level, as integer, fraction, or decimal")
    oracle.add_argument("--out", default=".", metavar="DIR")
    oracle.set_defaults(func=_cmd_oracle)

    spectral = sub.add_parser("spectral", help="quadrature and transform residual tables")
    spectral.add_argument("--gamma", type=Fraction, required=True, metavar="GAMMA")
    spectral.add_argument("--out", default=".", metavar="DIR")
    spectral.set_defaults(func=_cmd_spectral)

    mc = sub.add_parser("mc", help="run Monte Carlo experiments from a JSON config")
    mc.add_argument("--config", required=True, metavar="FILE")
    mc.add_argument("--out", required=True, metavar="DIR")
    mc.add_argument("--workers", type=int, default=None, metavar="W")
    mc.set_defaults(func=_cmd_mc)

    verify = sub.add_parser("verify", help="run the full acceptance suite")
    verify.add_argument("--out", required=True, metavar="DIR")
    verify.add_argument("--seed", type=_parse_seed_arg, default=None,
                        metavar="MASTER,STREAM")
    verify.add_argument("--workers", type=int, default=None, metavar="W")
    verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        for problem in err.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except ResourceGuardError as err:
        print(f"resource guard: {err}", file=sys.stderr)
        return 3
    except ConvergenceError as err:
        print(f"convergence failure: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
