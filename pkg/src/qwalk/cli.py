"""
Command-line front end.

    qwalk run      evolve walkers and write the JPD / position distribution
    qwalk compare  indistinguishable vs distinguishable report (JSON)
    qwalk entropy  correlation entropy of a saved JPD
    qwalk validate graph well-formedness report

Every computation is deterministic; the same arguments give byte-identical
output. Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import GRAPH_PRESETS, NETWORK_PRESETS, RunConfig, _parse_graph, parse_config
from .errors import ConfigParseError, QWalkError
from .evolution import lift_and_apply
from .fock import Mode, product_state, state_to_json
from .measurement import (
    JPD,
    correlation_entropy,
    jpd_from_state,
    jpd_two_walker_closed_form,
    l1_distance,
    marginal_to_csv,
    meeting_probability,
    single_click_marginal,
)
from .optical import (
    CoherentField,
    coherent_conditioned_jpd,
    coherent_propagate,
    coherent_separability_check,
    mixed_jpd,
)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- commands --------------------------------------------------------------

def run(cfg: RunConfig, out=None, marginal_out=None, dump_state=None, dump_unitary=None) -> dict:
    """Evolve the configured walkers and emit the requested statistics."""
    U = cfg.unitary(species=cfg.n_species)
    state = lift_and_apply(U, product_state(cfg.walkers))
    positions = U.positions
    species = [w.species for w in cfg.walkers]
    resolved = len(species) > 1 and len(set(species)) == len(species)
    jpd = jpd_from_state(state, positions, species_resolved=resolved)

    result: dict = {"positions": list(positions), "walkers": len(cfg.walkers)}
    if jpd.walkers == 1:
        result["distribution"] = jpd.tensor.tolist()
        table = marginal_to_csv(positions, jpd.tensor)
    else:
        result["kind"] = jpd.kind
        if "jpd" in cfg.outputs:
            result["jpd"] = jpd.tensor.tolist()
        table = jpd.to_csv()
        if jpd.walkers == 2:
            q = single_click_marginal(jpd)
            if "marginal" in cfg.outputs:
                result["marginal"] = q.tolist()
            if "entropy" in cfg.outputs:
                result["entropy"] = correlation_entropy(jpd, cfg.entropy_base)
                result["entropy_base"] = cfg.entropy_base
            if marginal_out:
                write_atomic(marginal_out, marginal_to_csv(positions, q))
        if "meeting" in cfg.outputs:
            result["meeting_probability"] = meeting_probability(jpd)

    if out:
        fmt = "json" if str(out).endswith(".json") else cfg.format
        write_atomic(out, _dumps(result) if fmt == "json" else table)
    if dump_state:
        write_atomic(dump_state, _dumps(state_to_json(state)))
    if dump_unitary:
        write_atomic(dump_unitary, _dumps(U.to_json()))
    return result


def _stats(jpd: JPD, base) -> dict:
    return {
        "kind": jpd.kind,
        "jpd": jpd.tensor.tolist(),
        "total": jpd.total(),
        "marginal": single_click_marginal(jpd).tolist(),
        "meeting_probability": meeting_probability(jpd),
        "entropy": correlation_entropy(jpd, base),
        "separability_residual": coherent_separability_check(jpd),
    }


def compare(cfg: RunConfig) -> dict:
    """Indistinguishable vs distinguishable report for a two-walker configuration."""
    if len(cfg.walkers) != 2:
        raise ConfigParseError("walkers", "compare needs exactly two walkers")
    U = cfg.unitary(species=1)
    x, y = (Mode(w.position, w.coin, 0) for w in cfg.walkers)
    ind = jpd_two_walker_closed_form(U, x, y, "indistinguishable")
    dist = jpd_two_walker_closed_form(U, x, y, "distinguishable")
    report = {
        "positions": list(U.positions),
        "inputs": [[m.position, m.coin] for m in (x, y)],
        "entropy_base": cfg.entropy_base,
        "indistinguishable": _stats(ind, cfg.entropy_base),
        "distinguishable": _stats(dist, cfg.entropy_base),
        "l1_marginals": l1_distance(single_click_marginal(ind), single_click_marginal(dist)),
    }
    if cfg.alpha is not None:
        report["alpha"] = cfg.alpha
        report["mixed"] = _stats(mixed_jpd(U, x, y, cfg.alpha), cfg.entropy_base)
    if cfg.coherent:
        alpha = np.zeros(U.dimension, dtype=complex)
        alpha[U.index(x)] = 1.0
        alpha[U.index(y)] = 1.0
        beta = coherent_propagate(CoherentField(alpha, U.modes), U)
        coh = coherent_conditioned_jpd(beta, 2)
        report["coherent"] = {"input_amplitudes": "unit amplitude on each walker input",
                              **_stats(coh, cfg.entropy_base)}
    return report


# -- argument handling -----------------------------------------------------

def _graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph / network")
    g.add_argument("--config", help="JSON run config; command-line flags override its fields")
    g.add_argument("--preset", choices=GRAPH_PRESETS + NETWORK_PRESETS,
                   help="built-in graph (line, cycle, lattice2d) or network (pyramid)")
    g.add_argument("--half-width", type=int, help="line: vertices -L..L (default 10)")
    g.add_argument("--n-vertices", type=int, help="cycle: number of vertices (default 8)")
    g.add_argument("--width", type=int, help="lattice2d width (default 5)")
    g.add_argument("--height", type=int, help="lattice2d height (default 5)")
    g.add_argument("--levels", type=int, help="pyramid levels (default 4)")
    g.add_argument("--graph", help="graph JSON file")
    g.add_argument("--network", help="beamsplitter network JSON file")


def _walker_args(p: argparse.ArgumentParser) -> None:
    w = p.add_argument_group("walkers")
    w.add_argument("--walker", action="append", metavar="POS:COIN[:SPECIES]",
                   help="add a walker; COIN is the neighbour label (omit for network modes)")
    w.add_argument("--walkers", choices=("indistinguishable", "distinguishable"),
                   help="network shorthand: one photon in each apex input")
    w.add_argument("--steps", type=int, help="coin+step rounds for graph walks (default 0)")
    w.add_argument("--schedule", help="JSON list of per-step coin overrides {vertex: matrix}")
    w.add_argument("--alpha", type=float, help="overlap parameter for partial distinguishability")
    w.add_argument("--base", choices=("2", "e"), help="entropy log base (default 2)")


def _base_config(args) -> dict:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigParseError("config", f"cannot read {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigParseError("config", "must be a JSON object")
    if args.preset in GRAPH_PRESETS:
        params = {"line": ("half_width",), "cycle": ("n_vertices",), "lattice2d": ("width", "height")}
        g = {"preset": args.preset}
        for k in params[args.preset]:
            if getattr(args, k) is not None:
                g[k] = getattr(args, k)
        data.pop("network", None)
        data["graph"] = g
    elif args.preset in NETWORK_PRESETS:
        n = {"preset": args.preset}
        if args.levels is not None:
            n["levels"] = args.levels
        data.pop("graph", None)
        data["network"] = n
    if args.graph:
        data.pop("network", None)
        data["graph"] = {"file": args.graph}
    if args.network:
        data.pop("graph", None)
        data["network"] = {"file": args.network}
    return data


def config_from_args(args) -> RunConfig:
    data = _base_config(args)
    if args.walker:
        data["walkers"] = args.walker
    elif args.walkers:
        data["walkers"] = args.walkers
    for key in ("steps", "schedule", "alpha"):
        if getattr(args, key, None) is not None:
            data[key] = getattr(args, key)
    if getattr(args, "base", None):
        data["entropy_base"] = args.base
    if getattr(args, "format", None):
        data["format"] = args.format
    if getattr(args, "coherent", False):
        data["coherent"] = True
    return parse_config(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Multi-walker discrete-time quantum walks: evolution and detection statistics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evolve walkers and write the JPD or position distribution")
    _graph_args(p)
    _walker_args(p)
    p.add_argument("--out", help="output file (.csv long table or .json); JSON summary to stdout if omitted")
    p.add_argument("--format", choices=("csv", "json"), help="format for --out when the suffix is neither")
    p.add_argument("--marginal-out", help="write single-click marginals (two walkers) as CSV")
    p.add_argument("--dump-state", help="write the final Fock state as JSON")
    p.add_argument("--dump-unitary", help="write the single-walker unitary as JSON")

    p = sub.add_parser("compare", help="indistinguishable vs distinguishable comparison report")
    _graph_args(p)
    _walker_args(p)
    p.add_argument("--coherent", action="store_true",
                   help="add the coherent-light conditioned JPD and separability residuals")
    p.add_argument("--out", help="report file (JSON); stdout if omitted")

    p = sub.add_parser("entropy", help="correlation entropy of a saved two-walker JPD")
    p.add_argument("--jpd", required=True, help="JPD file written by 'run' (.csv or .json)")
    p.add_argument("--base", choices=("2", "e"), default="2", help="log base (default 2)")

    p = sub.add_parser("validate", help="check a graph for well-formedness")
    _graph_args(p)
    return parser


def _load_jpd(path: str) -> JPD:
    text = Path(path).read_text()
    if path.endswith(".json"):
        data = json.loads(text)
        if "tensor" in data:
            return JPD.from_json(data)
        return JPD(np.array(data["jpd"]), tuple(data["positions"]), data.get("kind", "indistinguishable"))
    return JPD.from_csv(text)


def _validate(args) -> dict:
    data = _base_config(args)
    if "graph" not in data:
        raise ConfigParseError("graph", "validate needs a graph (--graph, --preset or --config)")
    try:
        graph = _parse_graph(data["graph"])
    except ConfigParseError as exc:
        raise QWalkError(str(exc)) from None
    dev = max((float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))) for a in graph.coins.values()),
              default=0.0)
    return {
        "valid": True,
        "vertices": graph.n_vertices,
        "directed_edges": len(graph.edges),
        "max_degree": max(graph.degree(v) for v in graph.vertices),
        "max_coin_unitarity_deviation": dev,
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            result = run(config_from_args(args), args.out, args.marginal_out,
                         args.dump_state, args.dump_unitary)
            if not args.out:
                sys.stdout.write(_dumps(result))
        elif args.command == "compare":
            report = compare(config_from_args(args))
            if args.out:
                write_atomic(args.out, _dumps(report))
            else:
                sys.stdout.write(_dumps(report))
        elif args.command == "entropy":
            h = correlation_entropy(_load_jpd(args.jpd), 2 if args.base == "2" else "e")
            print(repr(h))
        elif args.command == "validate":
            try:
                report = _validate(args)
            except QWalkError as exc:
                sys.stdout.write(_dumps({"valid": False, "error": str(exc)}))
                return 1
            sys.stdout.write(_dumps(report))
    except ConfigParseError as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return 2
    except (QWalkError, OSError) as exc:
        print(f"qwalk: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
