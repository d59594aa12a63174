"""Command-line interface: ``subschmidt {classify,decompose,compare,generate,group}``.

Every report is a JSON document written to standard output (or ``--output``)
with floating-point values rounded to 15 significant digits, so identical
inputs and settings give byte-identical output.

Exit codes: 0 decided/completed, 2 input or usage error, 3 numerical failure.
"""

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import catalog
from .decompose import enumerate_decompositions, min_decomposition
from .errors import (
    DEFAULT_TOL,
    DimensionalityError,
    NumericalError,
    SingularPencilError,
    StateFormatError,
    Tolerances,
)
from .pencil import analyze
from .slocc import equivalent
from .tensor_state import dump_state, load_state, local_supports, relative_decomposition

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


class InputError(Exception):
    """Bad command-line input (mapped to exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    tol: Tolerances = DEFAULT_TOL
    seed: int = 0
    output_path: Optional[str] = None
    pretty: bool = False

    @classmethod
    def from_args(cls, args):
        try:
            tol = DEFAULT_TOL.replace(
                rank=args.tol_rank, cluster=args.tol_cluster, recon=args.tol_recon,
                cert=args.tol_cert, sys=args.tol_sys,
            )
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        return cls(tol, args.seed, args.output, args.pretty)

    def dumps(self, doc):
        return json.dumps(doc, indent=2 if self.pretty else None) + "\n"


def _num(x):
    return float(f"{float(x):.15g}")


def _tolerances(tol):
    return {k: _num(v) for k, v in tol.as_dict().items()}


def _read_state(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return load_state(text)


def _write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _class_name(signature):
    if signature.n == 2:
        return "GHZ" if len(signature.towers) == 2 else "W"
    return signature.name


def classify_report(state, tol=DEFAULT_TOL, seed=0):
    """Classification document for one state (degenerate cases included)."""
    support = local_supports(state, tol.rank)
    doc = {
        "label": state.label,
        "dims": list(state.dims),
        "support_ranks": list(support.ranks),
    }
    try:
        dec = relative_decomposition(state, tol)
    except DimensionalityError as exc:
        doc.update({"class": exc.kind, "detail": str(exc), "tolerances": _tolerances(tol)})
        return doc
    an = analyze(dec, tol, seed)
    best = min_decomposition(state, tol, dec=dec, analysis=an)
    doc.update({
        "class": _class_name(an.signature),
        "n": an.n,
        "family_name": an.family_name,
        "signature": [list(t) for t in an.signature.towers],
        "eigenvalues": [
            {
                "point": p.to_json(),
                "blocks": list(t.blocks),
                "staircase": list(t.staircase),
                "schmidt_rank": t.first_rank,
            }
            for p, t in an.eigenvalues
        ],
        "min_terms": best.term_count,
        "regularization": an.regularization.to_json(),
        "tolerances": _tolerances(tol),
    })
    return doc


def decompose_report(state, tol=DEFAULT_TOL, seed=0, all_pairs=False, limit=None):
    dec = relative_decomposition(state, tol)
    an = analyze(dec, tol, seed)
    if not all_pairs and limit is None:
        doc = {"label": state.label}
        doc.update(min_decomposition(state, tol, dec=dec, analysis=an).to_json())
    else:
        found = enumerate_decompositions(state, limit, tol, dec=dec, analysis=an)
        doc = {"label": state.label, "count": len(found), "decompositions": [d.to_json() for d in found]}
    doc["tolerances"] = _tolerances(tol)
    return doc


def compare_report(psi, psi_prime, tol=DEFAULT_TOL, seed=0):
    decision = equivalent(psi, psi_prime, tol, seed=seed)
    doc = {"labels": [psi.label, psi_prime.label]}
    doc.update(decision.to_json())
    doc["tolerances"] = _tolerances(tol)
    return doc


def parse_param(text):
    """``RE`` or ``RE,IM`` as a complex number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InputError(f"--param expects RE or RE,IM, got {text!r}")


def parse_groups(text):
    """``"0,3;1,4;2"`` as three lists of 0-based factor indices."""
    try:
        groups = [[int(i) for i in g.split(",")] for g in text.split(";")]
    except ValueError as exc:
        raise InputError(f"--groups expects e.g. '0,3;1,4;2', got {text!r}") from exc
    return groups


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _batch(args, config, report):
    src = Path(args.batch)
    if not src.is_dir():
        raise InputError(f"--batch expects a directory, got {src}")
    out_dir = Path(config.output_path) if config.output_path else src
    suffix = f".{args.command}.json"
    # skip reports written by earlier batch runs
    inputs = sorted(
        p for p in src.glob("*.json")
        if not p.name.endswith((".classify.json", ".decompose.json"))
    )

    def work(path):
        target = out_dir / (path.stem + suffix)
        code, text = _guarded(lambda: config.dumps(report(_read_state(path))))
        _write_atomic(target, text)
        return {"input": str(path), "output": str(target), "exit_code": code}

    with ThreadPoolExecutor() as pool:
        results = list(pool.map(work, inputs))
    sys.stdout.write(config.dumps({"files": results}))
    return max([r["exit_code"] for r in results], default=EXIT_OK)


def cmd_classify(args, config):
    report = lambda s: classify_report(s, config.tol, config.seed)
    if args.batch:
        return _batch(args, config, report)
    return _emit(config, report(_read_state(_require(args.input, "input"))))


def cmd_decompose(args, config):
    if args.limit is not None and args.limit < 1:
        raise InputError("--limit must be a positive integer")
    report = lambda s: decompose_report(s, config.tol, config.seed, args.all, args.limit)
    if args.batch:
        return _batch(args, config, report)
    return _emit(config, report(_read_state(_require(args.input, "input"))))


def cmd_compare(args, config):
    psi, psi_prime = _read_state(args.input_a), _read_state(args.input_b)
    try:
        doc = compare_report(psi, psi_prime, config.tol, config.seed)
    except DimensionalityError as exc:
        raise InputError(f"cannot compare: {exc}") from exc
    return _emit(config, doc)


def cmd_generate(args, config):
    param = parse_param(args.param) if args.param is not None else None
    try:
        entry = catalog.named(args.name, param)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc.args[0]) if exc.args else str(exc)) from exc
    state = entry.state
    if args.random_image:
        state = catalog.random_in_class(entry, config.seed)
    return _emit(config, dump_state(state))


def cmd_group(args, config):
    path = Path(args.input)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict) or "factor_dims" not in doc:
        raise InputError("group expects a multi-factor document with 'factor_dims'")
    if args.groups:
        doc = dict(doc, groups=parse_groups(args.groups))
    return _emit(config, dump_state(load_state(doc)))


def _require(value, name):
    if value is None:
        raise InputError(f"missing {name} (or use --batch DIR)")
    return value


def _emit(config, doc):
    text = config.dumps(doc)
    if config.output_path:
        _write_atomic(config.output_path, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _guarded(fn):
    """Run ``fn`` and map failures to ``(exit_code, error document text)``."""
    try:
        return EXIT_OK, fn()
    except (InputError, StateFormatError, DimensionalityError) as exc:
        return EXIT_INPUT, json.dumps({"error": str(exc), "exit_code": EXIT_INPUT}) + "\n"
    except (NumericalError, SingularPencilError, np.linalg.LinAlgError) as exc:
        return EXIT_NUMERICAL, json.dumps({"error": str(exc), "exit_code": EXIT_NUMERICAL}) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, help="relative singular-value threshold (default 1e-9)")
    common.add_argument("--tol-cluster", type=float, help="eigenvalue merge radius (default 1e-6)")
    common.add_argument("--tol-recon", type=float, help="allowed reconstruction infidelity (default 1e-9)")
    common.add_argument("--tol-cert", type=float, help="allowed certificate infidelity (default 1e-8)")
    common.add_argument("--tol-sys", type=float, help="Moebius system null-space threshold (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="seed for random fallbacks and images")
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="subschmidt",
        description="Sub-Schmidt decompositions and SLOCC classes of (n, n, 2) pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="Jordan family, eigenvalues and minimal term count")
    p.add_argument("input", nargs="?", help="state file")
    p.add_argument("--batch", metavar="DIR", help="classify every *.json in DIR concurrently")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("decompose", parents=[common], help="explicit product-state decompositions")
    p.add_argument("input", nargs="?", help="state file")
    p.add_argument("--all", action="store_true", help="emit every pair-based decomposition")
    p.add_argument("--limit", type=int, metavar="N", help="emit at most N decompositions")
    p.add_argument("--batch", metavar="DIR", help="decompose every *.json in DIR concurrently")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compare", parents=[common], help="SLOCC equivalence with certificate")
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", parents=[common], help="write a catalog state")
    p.add_argument("name", help=", ".join(catalog.NAMES))
    p.add_argument("--param", metavar="RE[,IM]", help="parameter a of psi_h4")
    p.add_argument("--random-image", action="store_true", help="apply seeded random invertible local operators")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("group", parents=[common], help="merge a multi-factor state into three subsystems")
    p.add_argument("input", help="multi-factor state file")
    p.add_argument("--groups", metavar="G", help="override groups, e.g. '0,3;1,4;2' (0-based)")
    p.set_defaults(func=cmd_group)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        config = RunConfig.from_args(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, result = _guarded(lambda: args.func(args, config))
    if code != EXIT_OK:
        sys.stderr.write(result)
        return code
    return result


if __name__ == "__main__":
    sys.exit(main())
