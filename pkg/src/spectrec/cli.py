"""Command-line front end.

Every subcommand prints one JSON report and exits 0 on a definite verdict,
2 when a run ends indeterminate, and 1 on bad input or a broken promise.
`SPECTREC_SEED` supplies the default seed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Any

import numpy as np

from . import rng as rng_mod
from .circuit import GateSet, build_unitary, circuit_from_json, decode
from .distinguish import BlackBoxUnitary, DistinguishParams, difference, recognize_device
from .fixtures import device_pair, involutive_family, planted_profile, thermo_levels
from .phase import verify_w_type
from .recognize import RecognitionQuery, recognize_eigenvalue
from .report import QueryCounter
from .structure import SpectrumSpec, find_structure
from .sweeps import (
    difference_scaling,
    fit_loglog_slope,
    recognition_scaling,
    structure_scaling,
)
from .thermo import load_hamiltonian, run_thermo

__all__ = ["main"]


def _default_seed() -> int:
    raw = os.environ.get("SPECTREC_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"SPECTREC_SEED must be an integer, got {raw!r}")


def _matrix_to_json(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def _matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def _load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_matrix_file(path: str) -> np.ndarray:
    doc = _load_json(path)
    rows = doc["matrix"] if isinstance(doc, dict) else doc
    return _matrix_from_json(rows)


def _source_matrix(args) -> tuple[np.ndarray, dict[str, Any]]:
    """Resolve --matrix / --circuit / --planted into a unitary matrix."""
    given = [name for name in ("matrix", "circuit", "planted") if getattr(args, name, None)]
    if len(given) != 1:
        raise SystemExit("exactly one of --matrix, --circuit, --planted is required")
    kind = given[0]
    if kind == "matrix":
        return _load_matrix_file(args.matrix), {}
    if kind == "circuit":
        with open(args.circuit, "r", encoding="utf-8") as fh:
            circ, gs = circuit_from_json(fh.read())
        return build_unitary(circ, gs).matrix, {"gate_set": gs.name}
    doc = _load_json(args.planted)
    meta = {k: doc[k] for k in ("m", "fine", "anchors", "group_dims") if k in doc}
    return _matrix_from_json(doc["matrix"]), meta


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _finish(report, out: str | None) -> int:
    _emit(json.loads(report.to_json()), out)
    return 2 if report.verdict == "indeterminate" else 0


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _cmd_recognize_eigenvalue(args) -> int:
    matrix, meta = _source_matrix(args)
    omega = args.omega
    if omega is None:
        if args.group is None or "anchors" not in meta:
            raise SystemExit("--omega is required unless --planted with --group is given")
        omega = meta["anchors"][args.group] / meta["m"]
    query = RecognitionQuery(
        omega=omega,
        m_coarse=args.m,
        fine=args.fine,
        registers=args.registers,
        copies=args.copies,
        backend=args.backend,
        rest_strategy=args.rest,
    )
    report = recognize_eigenvalue(matrix, query, args.seed)
    return _finish(report, args.out)


def _cmd_verify_rev(args) -> int:
    matrix, _ = _source_matrix(args)
    report = verify_w_type(matrix, args.fine, window=args.window)
    payload = {
        "pipeline": "verify-rev",
        "passed": report.passed,
        "min_mass": report.min_mass,
        "threshold": report.threshold,
        "window": report.window,
        "length": report.length,
        "rows": [
            {"omega": om, "dim": dim, "mass": mass} for om, dim, mass in report.rows
        ],
    }
    _emit(payload, args.out)
    return 0


def _cmd_thermo(args) -> int:
    with open(args.hamiltonian, "r", encoding="utf-8") as fh:
        matrix, e_scale = load_hamiltonian(fh.read())
    if args.escale is not None:
        e_scale = args.escale
    if e_scale is None:
        raise SystemExit("--escale is required when the file does not set one")
    report = run_thermo(
        matrix,
        e_scale,
        _parse_floats(args.kt),
        args.seed,
        m_coarse=args.m,
        fine=args.fine,
        registers=args.registers,
        epsilon=args.epsilon,
    )
    return _finish(report, args.out)


def _cmd_find_structure(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = SpectrumSpec.from_json(fh.read())
    report = find_structure(
        spec,
        GateSet.by_name(args.gate_set),
        args.n,
        args.cap,
        args.seed,
        search_space=args.search_space,
        runs=args.runs,
        retries=args.retries,
    )
    return _finish(report, args.out)


def _cmd_distinguish(args) -> int:
    if args.pair:
        doc = _load_json(args.pair)
        mat_u = _matrix_from_json(doc["matrix_u"])
        mat_v = _matrix_from_json(doc["matrix_v"])
        omega = args.omega if args.omega is not None else doc["omega"]
        d = args.d if args.d is not None else doc["distance"]
        m_coarse = args.m if args.m is not None else doc["m"]
    else:
        if not (args.matrix_u and args.matrix_v):
            raise SystemExit("need --pair or both --matrix-u and --matrix-v")
        mat_u = _load_matrix_file(args.matrix_u)
        mat_v = _load_matrix_file(args.matrix_v)
        if args.omega is None or args.d is None:
            raise SystemExit("--omega and --d are required with explicit matrices")
        omega, d = args.omega, args.d
        m_coarse = args.m if args.m is not None else 4
    counter = QueryCounter()
    params = DistinguishParams(
        m_coarse=m_coarse,
        registers=args.registers,
        turn_bound=args.turn_bound,
        enforce_promise=not args.no_promise_check,
    )
    report = difference(
        BlackBoxUnitary(mat_u, "u", counter),
        BlackBoxUnitary(mat_v, "v", counter),
        omega,
        d,
        args.seed,
        params,
    )
    return _finish(report, args.out)


def _cmd_recognize_device(args) -> int:
    gs = GateSet.by_name(args.gate_set)
    if args.family:
        doc = _load_json(args.family)
        gs = GateSet.by_name(doc["gate_set"])
        n, cap = doc["n"], doc["cap"]
        codes = doc["codes"]
        if args.target is None or not 0 <= args.target < len(codes):
            raise SystemExit("--target must index a family member")
        matrix = build_unitary(decode(codes[args.target], gs, n, cap), gs).matrix
    else:
        if args.matrix is None:
            raise SystemExit("need --family with --target, or --matrix")
        matrix = _load_matrix_file(args.matrix)
        n, cap = args.n, args.cap
    report = recognize_device(
        BlackBoxUnitary(matrix, "target"),
        gs,
        n,
        cap,
        args.d,
        args.seed,
        search_space=args.search_space,
        runs=args.runs,
        retries=args.retries,
    )
    return _finish(report, args.out)


def _cmd_sweep(args) -> int:
    seed = args.seed
    if args.pipeline == "recognition":
        values = _parse_ints(args.values) if args.values else [8, 16, 32, 64]
        rows = recognition_scaling(values, args.trials, seed)
    elif args.pipeline == "structure":
        values = _parse_ints(args.values) if args.values else [4, 16, 64, 256]
        rows = structure_scaling(values, args.trials, seed)
    else:
        values = _parse_floats(args.values) if args.values else [0.5, 0.25, 0.125]
        rows = difference_scaling(values, args.trials, seed)
    slope = fit_loglog_slope(rows)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["x", "queries"])
            writer.writeheader()
            writer.writerows(rows)
    _emit({"pipeline": f"sweep-{args.pipeline}", "rows": rows, "slope": slope}, args.out)
    return 0


def _cmd_fixtures(args) -> int:
    rng = rng_mod.stream(args.seed, "fixtures", args.kind)
    if args.kind == "planted":
        dims = tuple(_parse_ints(args.groups))
        fine = args.fine if args.fine else 16 * args.m
        planted = planted_profile(args.dim, args.m, fine, dims, rng)
        payload = {
            "matrix": _matrix_to_json(planted.unitary.matrix),
            "m": planted.M,
            "fine": planted.L,
            "anchors": list(planted.anchors),
            "group_dims": list(planted.group_dims),
            "frequencies": [float(f) for f in planted.frequencies],
        }
    elif args.kind == "pair":
        fine = args.fine if args.fine else 16 * args.m
        pair = device_pair(args.dim, args.m, fine, args.relation, rng, distance=args.distance)
        payload = {
            "matrix_u": _matrix_to_json(pair.u.matrix),
            "matrix_v": _matrix_to_json(pair.v.matrix),
            "omega": pair.omega,
            "relation": pair.relation,
            "distance": pair.planted_distance,
            "m": pair.profile_m,
            "fine": pair.profile_l,
        }
    elif args.kind == "thermo":
        payload = thermo_levels(args.preset)
    elif args.kind == "family":
        members = involutive_family(rng, count=args.count, n_qubits=args.n, length_cap=args.cap)
        from .circuit import encode

        gs = GateSet.involutive()
        payload = {
            "gate_set": gs.name,
            "n": args.n,
            "cap": args.cap,
            "codes": [encode(circ, gs, args.cap) for circ, _ in members],
        }
    else:
        raise SystemExit(f"unknown fixture kind {args.kind!r}")
    _emit(payload, args.out)
    return 0


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", help="JSON file holding a unitary matrix")
    p.add_argument("--circuit", help="JSON file holding a coded circuit")
    p.add_argument("--planted", help="JSON fixture written by `fixtures --kind planted`")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectrec",
        description="Eigenspace recognition, restoration, counting and comparison pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    p = sub.add_parser("recognize-eigenvalue", help="decide whether a frequency is occupied")
    _add_source(p)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--group", type=int, default=None, help="planted group index instead of --omega")
    p.add_argument("--m", type=int, default=4, help="coarse grid size")
    p.add_argument("--fine", type=int, default=None, help="fine grid size, default 16*m")
    p.add_argument("--registers", type=int, default=32)
    p.add_argument("--copies", type=int, default=2)
    p.add_argument("--backend", choices=["projector", "circuit"], default="projector")
    p.add_argument("--rest", choices=["auto", "turning", "inverse"], default="auto")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_recognize_eigenvalue)

    p = sub.add_parser("verify-rev", help="check reveal mass concentration per eigenvector")
    _add_source(p)
    p.add_argument("--fine", type=int, default=64, help="reveal grid size")
    p.add_argument("--window", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_rev)

    p = sub.add_parser("thermo", help="estimate spectrum and thermodynamic functions")
    p.add_argument("--hamiltonian", required=True, help="JSON file: matrix or levels")
    p.add_argument("--escale", type=float, default=None)
    p.add_argument("--kt", default="0.5,1.0,2.0", help="comma list in units of the energy scale")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--fine", type=int, default=None)
    p.add_argument("--registers", type=int, default=32)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_thermo)

    p = sub.add_parser("find-structure", help="search circuit codes for a spectrum pattern")
    p.add_argument("--spec", required=True, help="JSON spectrum pattern")
    p.add_argument("--gate-set", default="standard")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--search-space", type=int, default=None)
    p.add_argument("--runs", type=int, default=9)
    p.add_argument("--retries", type=int, default=4)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_find_structure)

    p = sub.add_parser("distinguish", help="decide whether two devices share an eigenspace")
    p.add_argument("--pair", help="JSON fixture written by `fixtures --kind pair`")
    p.add_argument("--matrix-u")
    p.add_argument("--matrix-v")
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--d", type=float, default=None, help="promised distance")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--registers", type=int, default=64)
    p.add_argument("--turn-bound", choices=["linear", "sqrt"], default="linear")
    p.add_argument("--no-promise-check", action="store_true")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_distinguish)

    p = sub.add_parser("recognize-device", help="find the coded circuit matching an opaque device")
    p.add_argument("--family", help="JSON fixture written by `fixtures --kind family`")
    p.add_argument("--target", type=int, default=None, help="family member index")
    p.add_argument("--matrix", help="explicit target unitary instead of --family")
    p.add_argument("--gate-set", default="involutive")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--cap", type=int, default=2)
    p.add_argument("--d", type=float, default=0.5)
    p.add_argument("--search-space", type=int, default=None)
    p.add_argument("--runs", type=int, default=9)
    p.add_argument("--retries", type=int, default=4)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_recognize_device)

    p = sub.add_parser("sweep", help="measure query scaling and fit a log-log slope")
    p.add_argument("--pipeline", choices=["recognition", "structure", "difference"], required=True)
    p.add_argument("--values", default=None, help="comma list of sizes or distances")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--csv", default=None)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fixtures", help="generate reproducible test objects")
    p.add_argument("--kind", choices=["planted", "pair", "thermo", "family"], required=True)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--fine", type=int, default=None)
    p.add_argument("--groups", default="2,1", help="comma list of group dimensions")
    p.add_argument("--relation", default="rotated",
                   choices=["equal", "rotated", "dim_up", "dim_down", "empty"])
    p.add_argument("--distance", type=float, default=0.5)
    p.add_argument("--preset", type=int, default=0)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--cap", type=int, default=2)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
