"""Command line front end: ``heisenberg-polymer {evolve,decompose,verify,truncate}``.

Exit codes: 0 success, 1 a verified identity failed, 2 bad arguments,
3 a size cap was exceeded, 4 the state cannot be normalized.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .dynamics import EvolutionConfig, evolve
from .errors import ArgumentError, DegenerateNormalizationError, SizeError
from .lattice import Lattice, build_lattice
from .polymer import PolymerCoefficients, decompose, reconstruct_f, truncation_errors
from .state import (SubsetVector, normalize, popcounts, product_state, random_state,
                    sector_weights, total_sum)
from .verify import all_pass, run_suite

EXIT_IDENTITY_FAILED = 1
EXIT_ARGUMENT = 2
EXIT_SIZE = 3
EXIT_NORMALIZATION = 4


def initial_state(spec: str, n_vertices: int, seed: int | None) -> SubsetVector:
    """Build an initial state from ``single:<v>``, ``set:<mask>``, ``product:<p,...>`` or ``random``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "single":
            v = int(arg)
            if not 0 <= v < n_vertices:
                raise ArgumentError(f"vertex {v} not in 0..{n_vertices - 1}")
            return SubsetVector.basis(n_vertices, 1 << v)
        if kind == "set":
            return SubsetVector.basis(n_vertices, int(arg, 0))
        if kind == "product":
            probs = [float(p) for p in arg.split(",")]
            if len(probs) != n_vertices:
                raise ArgumentError(f"product state needs {n_vertices} probabilities, got {len(probs)}")
            return product_state(probs)
    except ValueError as exc:
        if isinstance(exc, ArgumentError):
            raise
        raise ArgumentError(f"cannot parse initial state {spec!r}: {exc}") from None
    if kind == "random":
        return random_state(n_vertices, np.random.default_rng(seed))
    raise ArgumentError(f"unknown initial state {spec!r}")


def _manifest(args: argparse.Namespace, lat: Lattice) -> dict[str, Any]:
    skip = {"func", "out"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {
        "tool": "heisenberg-polymer",
        "version": __version__,
        "command": args.command,
        "lattice": lat.to_dict(),
        "parameters": params,
    }


def _hash(manifest: dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(manifest, sort_keys=True).encode()).hexdigest()


class Reporter:
    """Writes output files stamped with the manifest hash."""

    def __init__(self, out: str | None, manifest: dict[str, Any]):
        self.out = Path(out) if out else None
        self.manifest = manifest
        self.digest = _hash(manifest)
        self.started = time.perf_counter()
        self.files: list[str] = []
        if self.out:
            self.out.mkdir(parents=True, exist_ok=True)

    def json(self, name: str, payload: dict[str, Any]) -> None:
        if not self.out:
            return
        body = {"manifest_hash": self.digest, **payload}
        (self.out / name).write_text(json.dumps(body, indent=2) + "\n")
        self.files.append(name)

    def csv(self, name: str, header: Sequence[str], rows) -> None:
        if not self.out:
            return
        with open(self.out / name, "w", newline="") as fh:
            fh.write(f"# manifest_hash={self.digest}\n")
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        self.files.append(name)

    def finish(self, summary: dict[str, Any]) -> None:
        elapsed = time.perf_counter() - self.started
        if self.out:
            manifest = {"manifest": self.manifest, "manifest_hash": self.digest,
                        "timings": {"wall_seconds": elapsed}, "outputs": self.files}
            (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        print(json.dumps({"manifest_hash": self.digest, **summary}, indent=2))


def _load_state(args: argparse.Namespace, lat: Lattice) -> SubsetVector:
    if getattr(args, "state", None):
        try:
            f = SubsetVector.load_json(args.state)
        except (OSError, KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ArgumentError):
                raise
            raise ArgumentError(f"cannot read state file {args.state}: {exc}") from None
        if f.n_vertices != lat.n_vertices:
            raise ArgumentError(
                f"state file has {f.n_vertices} vertices, lattice has {lat.n_vertices}")
        return f
    return initial_state(args.init, lat.n_vertices, args.seed)


def _coeff_rows(t: float, f: SubsetVector):
    card = popcounts(f.n_vertices)
    for mask, value in enumerate(f.coeffs):
        yield t, mask, int(card[mask]), repr(float(value))


def cmd_evolve(args: argparse.Namespace) -> int:
    lat = build_lattice(args.dims, args.boundary)
    f0 = _load_state(args, lat)
    cfg = EvolutionConfig(args.t, args.method, args.dt, args.record or [])
    manifest = _manifest(args, lat)
    rep = Reporter(args.out, manifest)
    snaps = evolve(lat, f0, cfg)
    start = total_sum(f0)
    summary_rows = [(t, total_sum(f), total_sum(f) - start) for t, f in snaps]
    rep.csv("summary.csv", ["t", "total_sum", "drift"], summary_rows)
    if args.format == "csv":
        rows = [row for t, f in snaps for row in _coeff_rows(t, f)]
        rep.csv("snapshots.csv", ["t", "mask", "cardinality", "coefficient"], rows)
    else:
        rep.json("snapshots.json", {"lattice": lat.to_dict(), "snapshots": [
            {"t": t, "state": f.to_dict(), "sector_weights": sector_weights(f).tolist()}
            for t, f in snaps]})
    summary: dict[str, Any] = {
        "command": "evolve", "lattice": lat.label(), "method": cfg.method,
        "max_abs_drift": max(abs(d) for *_, d in summary_rows),
        "records": [{"t": t, "total_sum": s} for t, s, _ in summary_rows],
    }
    if not args.out:
        summary["snapshots"] = [{"t": t, "coeffs": f.coeffs.tolist()} for t, f in snaps]
    rep.finish(summary)
    return 0


def _prepare_state(args: argparse.Namespace, lat: Lattice, t: float) -> SubsetVector:
    f = normalize(_load_state(args, lat))
    if t > 0:
        cfg = EvolutionConfig(t, args.method, args.dt)
        f = evolve(lat, f, cfg)[-1][1]
    return f


def _polymer_rows(p: PolymerCoefficients):
    card = popcounts(p.n_vertices)
    for mask in np.flatnonzero(card >= 2).tolist():
        yield mask, int(card[mask]), repr(float(p.weights[mask]))


def cmd_decompose(args: argparse.Namespace) -> int:
    lat = build_lattice(args.dims, args.boundary)
    rep = Reporter(args.out, _manifest(args, lat))
    f = _prepare_state(args, lat, args.t)
    p = decompose(f)
    residual = float(np.max(np.abs(reconstruct_f(p).coeffs - f.coeffs)))
    rep.csv("phi.csv", ["vertex", "phi"], [(i, repr(float(x))) for i, x in enumerate(p.phi)])
    rep.csv("u.csv", ["mask", "cardinality", "value"], _polymer_rows(p))
    rep.json("decomposition.json", {
        "lattice": lat.to_dict(), "t": args.t, "phi": p.phi.tolist(),
        "max_abs_polymer": p.max_polymer(), "roundtrip_residual": residual})
    summary = {"command": "decompose", "lattice": lat.label(), "t": args.t,
               "phi": p.phi.tolist(), "max_abs_polymer": p.max_polymer(),
               "roundtrip_residual": residual}
    rep.finish(summary)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    lat = build_lattice(args.dims, args.boundary)
    rep = Reporter(args.out, _manifest(args, lat))
    results = run_suite(lat, trials=args.trials, seed=args.seed)
    report = [r.as_dict() for r in results]
    rep.json("verify.json", {"lattice": lat.to_dict(), "results": report})
    ok = all_pass(results)
    rep.finish({"command": "verify", "lattice": lat.label(), "all_pass": ok, "results": report})
    return 0 if ok else EXIT_IDENTITY_FAILED


def cmd_truncate(args: argparse.Namespace) -> int:
    lat = build_lattice(args.dims, args.boundary)
    rep = Reporter(args.out, _manifest(args, lat))
    k_values = args.kmax or list(range(1, lat.n_vertices + 1))
    if any(k < 1 for k in k_values):
        raise ArgumentError("--kmax values must be at least 1")
    tables = []
    for t in args.t:
        p = decompose(_prepare_state(args, lat, t))
        rows = truncation_errors(p, k_values)
        tables.append({"t": t, "rows": [r.as_dict() for r in rows]})
    header = ["k_max", "l1_error", "linf_error", "rel_l2_error"]
    if len(tables) == 1:
        rep.csv("truncation.csv", header,
                ([r[h] for h in header] for r in tables[0]["rows"]))
    else:
        rep.csv("truncation.csv", ["t"] + header,
                ([tab["t"]] + [r[h] for h in header] for tab in tables for r in tab["rows"]))
    if args.long:
        rep.csv("truncation_long.csv", ["t", "k_max", "metric", "value"],
                ((tab["t"], r["k_max"], h, r[h]) for tab in tables for r in tab["rows"]
                 for h in header[1:]))
    rep.json("truncation.json", {"lattice": lat.to_dict(), "tables": tables})
    rep.finish({"command": "truncate", "lattice": lat.label(), "tables": tables})
    return 0


def _add_common(p: argparse.ArgumentParser, with_state: bool = True) -> None:
    p.add_argument("--dims", required=True, help="lattice side lengths, e.g. 3x2")
    p.add_argument("--boundary", choices=["open", "periodic"], default="open")
    p.add_argument("--seed", type=int, default=0, help="seed for random states")
    p.add_argument("--out", default=None, help="output directory (files are skipped if omitted)")
    if with_state:
        p.add_argument("--init", default="single:0",
                       help="single:<v> | set:<mask> | product:<p0,p1,...> | random")
        p.add_argument("--state", default=None, help="JSON state file (overrides --init)")
        p.add_argument("--method", choices=["exact", "exact_expm", "rk4"], default="exact")
        p.add_argument("--dt", type=float, default=1e-3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisenberg-polymer",
        description="Heat flow, sector intertwiners and polymer expansion for Heisenberg "
                    "ferromagnet wave functions on small rectangular lattices.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve a state under exp(-Ht)")
    _add_common(p)
    p.add_argument("--t", type=float, required=True, help="final time")
    p.add_argument("--record", type=float, nargs="*", help="record times (default: final time)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("decompose", help="polymer coefficients of a (possibly evolved) state")
    _add_common(p)
    p.add_argument("--t", type=float, default=0.0, help="evolve to this time first")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="run the identity battery on random states")
    _add_common(p, with_state=False)
    p.add_argument("--trials", type=int, default=3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("truncate", help="reconstruction error after dropping large polymers")
    _add_common(p)
    p.add_argument("--t", type=float, nargs="+", default=[1.0], help="one or more times")
    p.add_argument("--kmax", type=int, nargs="*", help="k_max values (default: 1..N)")
    p.add_argument("--long", action="store_true", help="also write a long-format table")
    p.set_defaults(func=cmd_truncate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except DegenerateNormalizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NORMALIZATION


if __name__ == "__main__":
    sys.exit(main())
