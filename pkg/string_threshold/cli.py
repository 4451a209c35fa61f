"""Command line entry point.

Every run writes its outputs and a ``<command>.manifest.json`` into
``--out-dir``; ``replay`` re-runs a manifest and compares output hashes.
Exit codes: 0 success, 1 failed assertion, 2 usage, 3 capacity, 4 input.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from string_threshold import __version__
from string_threshold.admissibility import find_admissible_subgraph, is_eps_admissible
from string_threshold.config import SETTINGS, Settings
from string_threshold.data_structures import (
    CapacityError,
    CurveFileError,
    DenseGraph,
    GeneralPositionError,
    GenerationError,
    as_fraction,
)
from string_threshold.embedding import EmbeddingConfig, EmbeddingParameters, run_embedding_batch
from string_threshold.extremal import measure_biclique_growth
from string_threshold.geometry import (
    crossings,
    intersection_graph,
    random_curves,
    separator_biclique,
)
from string_threshold.serialization import (
    admissibility_witness_from_json,
    arrangement_from_json,
    graph_from_json,
    rows_to_csv,
    serialize,
    weighted_graph_from_json,
)
from string_threshold.simplex import (
    certificate_problems,
    grid_minimum,
    minimize_phi,
    projected_gradient_minimum,
)
from string_threshold.subdivision import partial_subdivisions, realize
from string_threshold.turan import quotient, reduce_weights
from string_threshold.verification import (
    OBSERVATIONS,
    default_family,
    verify_claim_s8,
    verify_clique_partition_bound,
    verify_observations,
    verify_prop_quarter,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_ASSERTION, EXIT_USAGE, EXIT_CAPACITY, EXIT_INPUT = range(5)
GENERATOR = "numpy.random.PCG64"


class UsageError(Exception):
    pass


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    """Enough to reproduce a run: the argument vector, the seed, the tool
    version and the hashes of every input and output file."""

    subcommand: str
    argv: List[str]
    parameters: Dict[str, Any]
    seed: int
    version: str = __version__
    generator: str = GENERATOR
    input_hashes: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    started: str = ""
    finished: str = ""

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunManifest:
        data = json.loads(text)
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in names})


class Run:
    """output sink of one command"""

    def __init__(self, args: argparse.Namespace, argv: Sequence[str]) -> None:
        self.args = args
        self.out_dir = Path(args.out_dir)
        self.settings: Settings = dataclasses.replace(SETTINGS, workers=args.workers)
        parameters = {
            key: str(value) if isinstance(value, Fraction) else value
            for key, value in vars(args).items()
            if key != "handler"
        }
        self.manifest = RunManifest(
            args.command,
            list(argv),
            json.loads(json.dumps(parameters, default=str)),
            args.seed,
            started=_now(),
        )

    def read(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as error:
            raise UsageError(f"cannot read {path}: {error.strerror}") from error
        self.manifest.input_hashes[path] = sha256(data)
        return data.decode()

    def write(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        path.write_text(text)
        self.manifest.outputs[name] = sha256(text.encode())
        logger.info("wrote %s", path)
        return path

    def write_json(self, name: str, value: Any) -> Path:
        return self.write(name, json.dumps(serialize(value), indent=2, sort_keys=True) + "\n")

    def close(self) -> None:
        self.manifest.finished = _now()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / f"{self.args.command}.manifest.json").write_text(
            self.manifest.to_json() + "\n"
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def parse_seeds(text: str) -> List[int]:
    """``"1..10"`` (inclusive), ``"1,4,9"`` or a single seed

    :examples:
        >>> parse_seeds("3..5"), parse_seeds("1,4")
        ([3, 4, 5], [1, 4])
    """
    if ".." in text:
        first, last = text.split("..")
        return list(range(int(first), int(last) + 1))
    return [int(part) for part in text.split(",")]


def parse_ints(text: str) -> List[int]:
    return [int(part) for part in text.split(",")]


def _graph(text: str) -> DenseGraph:
    try:
        return graph_from_json(text)
    except Exception as error:
        raise argparse.ArgumentTypeError(f"{text!r} is not a graph6 string") from error


def _counterexamples(violations: Sequence[str]) -> List[str]:
    """the graph6 strings that end violation messages"""
    found = []
    for violation in violations:
        token = violation.rsplit(" ", 1)[-1]
        try:
            graph_from_json(token)
        except Exception:
            continue
        found.append(token)
    return sorted(set(found))


# commands


def cmd_verify(run: Run) -> int:
    args, workers = run.args, run.settings.workers
    family = default_family(args.t, args.max_vertices)
    if args.scope == "quarter":
        report = verify_prop_quarter(args.s, family, workers)
    elif args.scope == "s8":
        report = verify_claim_s8(family, args.exhaustive, workers)
    elif args.scope == "observations":
        report = verify_observations(args.observations or OBSERVATIONS, family, workers)
    else:
        report = verify_clique_partition_bound(args.clique_t, args.s)
    run.write_json("verify.json", report)
    if not report.passed:
        counterexamples = _counterexamples(report.violations)
        if counterexamples:
            run.write("verify.g6", "".join(g + "\n" for g in counterexamples))
        logger.error("%d violations in %s", len(report.violations), report.scope)
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_enumerate_patterns(run: Run) -> int:
    patterns = partial_subdivisions(run.args.t, run.args.max_vertices)
    if run.args.format == "graph6":
        run.write("patterns.g6", "".join(realize(p).to_graph6() + "\n" for p in patterns))
    else:
        run.write_json("patterns.json", patterns)
    return EXIT_OK


def cmd_admissible(run: Run) -> int:
    args = run.args
    family = [args.H] if args.H is not None else list(default_family(args.t, args.max_vertices))
    if args.weighted:
        R = weighted_graph_from_json(_load_json(run, args.weighted))
        found = find_admissible_subgraph(R, family, eps=args.eps)
    elif args.graph is not None:
        found = find_admissible_subgraph(args.graph, family)
    else:
        raise UsageError("one of --graph and --weighted is required")
    if found is None:
        run.write_json("admissible.json", {"admissible_free": True})
    else:
        subset, H, witness = found
        run.write_json(
            "admissible.json",
            {"admissible_free": False, "subset": subset, "H": H, "witness": witness},
        )
    return EXIT_OK


def cmd_minimize_phi(run: Run) -> int:
    results = []
    status = EXIT_OK
    for graph in run.args.graph:
        result = minimize_phi(graph, run.settings.phi_capacity)
        entry: Dict[str, Any] = {"graph": graph, "minimum": result}
        problems = certificate_problems(graph, result)
        if run.args.oracles:
            descent = projected_gradient_minimum(graph, seed=run.args.seed)
            grid, _ = grid_minimum(graph)
            entry.update(descent=descent, grid=grid)
            if descent < float(result.value) - run.settings.oracle_tolerance:
                problems.append(f"descent found {descent} below the exact minimum")
        entry["problems"] = problems
        if problems:
            status = EXIT_ASSERTION
        results.append(entry)
    run.write_json("minimize-phi.json", results)
    return status


def cmd_reduce_weights(run: Run) -> int:
    R = weighted_graph_from_json(_load_json(run, run.args.weights))
    partition, reduced, trace = reduce_weights(R)
    Q = quotient(partition, reduced)
    violations = trace.violations()
    run.write_json(
        "reduce-weights.json",
        {
            "partition": partition,
            "reduced": reduced,
            "quotient": Q,
            "trace": trace,
            "violations": violations,
        },
    )
    return EXIT_ASSERTION if violations else EXIT_OK


def _load_json(run: Run, path: str) -> Any:
    text = run.read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as error:
        raise UsageError(
            f"{path}: line {error.lineno} column {error.colno}: {error.msg}"
        ) from error


def embedding_config(data: Dict[str, Any]) -> EmbeddingConfig:
    """Config keys: ``reduced`` (weighted graph), ``H`` (graph6, or ``t`` for
    ``K_t``), ``block_size``, optional ``witness``, ``intra_density``,
    ``eps``, ``lam``, ``beta`` and ``delta``. Without a witness, one is
    searched on the whole reduced graph."""
    try:
        R = weighted_graph_from_json(data["reduced"])
        H = DenseGraph.complete(data["H"]) if isinstance(data["H"], int) else graph_from_json(data["H"])
        defaults = EmbeddingParameters()
        eps = as_fraction(data.get("eps", defaults.eps))
        lam = as_fraction(data.get("lam", defaults.lam))
        beta = as_fraction(data.get("beta", defaults.beta))
        delta = as_fraction(data.get("delta", defaults.delta))
        intra = as_fraction(data.get("intra_density", max(beta, Fraction(1, 5))))
        parameters = EmbeddingParameters(eps, lam, beta, delta)
        block_size = int(data["block_size"])
    except (KeyError, TypeError, ValueError) as error:
        raise UsageError(f"invalid embedding config: {error}") from error
    if "witness" in data:
        witness = admissibility_witness_from_json(data["witness"])
    else:
        if R.k != H.n:
            raise UsageError(f"reduced graph has {R.k} vertices, H has {H.n}; give a witness")
        witness = is_eps_admissible(R, H, eps)
        if witness is None:
            raise UsageError("the reduced graph is not admissible for H")
    return EmbeddingConfig(R, H, witness, block_size, intra, parameters)


def cmd_embed(run: Run) -> int:
    data = _load_json(run, run.args.config)
    if not isinstance(data, dict):
        raise UsageError("an embedding config must be a JSON object")
    config = embedding_config(data)
    seeds = list(range(run.args.seed, run.args.seed + run.args.runs))
    rows = run_embedding_batch(config, seeds)
    run.write("embed.csv", rows_to_csv(rows))
    successes = sum(row["success"] for row in rows)
    verified = sum(row["verified"] is True for row in rows)
    run.write_json(
        "embed.json",
        {
            "runs": len(rows),
            "successes": successes,
            "verified": verified,
            "success_rate": successes / len(rows) if rows else 0.0,
        },
    )
    return EXIT_ASSERTION if verified != successes else EXIT_OK


def cmd_geometry(run: Run) -> int:
    args = run.args
    if args.pipeline == "random":
        arrangement = random_curves(
            args.n, args.segments, (args.width, args.height), args.seed, args.step
        )
        run.write_json("curves.json", arrangement)
        return EXIT_OK
    if args.pipeline == "extremal":
        rows = measure_biclique_growth([args.n], args.eps, args.seeds, run.settings.exact_pair_capacity)
        run.write("extremal.csv", rows_to_csv(rows))
        return EXIT_OK
    if args.curves is None:
        raise UsageError(f"the {args.pipeline} pipeline needs --curves")
    arrangement = arrangement_from_json(run.read(args.curves))
    if args.pipeline == "crossings":
        run.write_json("crossings.json", crossings(arrangement))
    elif args.pipeline == "graph":
        graph = intersection_graph(arrangement)
        if args.format == "json":
            run.write_json("graph.json", {"graph6": graph, "edges": graph.edges()})
        else:
            run.write("graph.g6", graph.to_graph6() + "\n")
    else:
        run.write_json("separator.json", separator_biclique(arrangement))
    return EXIT_OK


def cmd_extremal(run: Run) -> int:
    rows = measure_biclique_growth(
        run.args.ns, run.args.eps, run.args.seeds, run.settings.exact_pair_capacity
    )
    run.write("extremal.csv", rows_to_csv(rows))
    return EXIT_OK


def cmd_replay(run: Run) -> int:
    manifest = RunManifest.from_json(run.read(run.args.manifest))
    if manifest.subcommand == "replay":
        raise UsageError("cannot replay a replay")
    with tempfile.TemporaryDirectory() as scratch:
        argv = _with_out_dir(manifest.argv, scratch)
        status = main(argv)
        replayed = RunManifest.from_json(
            (Path(scratch) / f"{manifest.subcommand}.manifest.json").read_text()
        )
    differing = sorted(
        name
        for name in set(manifest.outputs) | set(replayed.outputs)
        if manifest.outputs.get(name) != replayed.outputs.get(name)
    )
    run.write_json("replay.json", {"status": status, "differing_outputs": differing})
    return EXIT_ASSERTION if differing else EXIT_OK


def _with_out_dir(argv: Sequence[str], out_dir: str) -> List[str]:
    out, skip = [], False
    for item in argv:
        if skip:
            skip = False
            continue
        if item == "--out-dir":
            skip = True
            continue
        if item.startswith("--out-dir="):
            continue
        out.append(item)
    return ["--out-dir", out_dir, *out]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="string-threshold", description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--out-dir", default=".")
    parser.add_argument("--format", choices=("json", "csv", "graph6"), default="json")
    parser.add_argument("--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[Run], int], **kwargs: Any) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, **kwargs)
        sub.set_defaults(handler=handler)
        return sub

    def family_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--t", type=int, default=5)
        sub.add_argument("--max-vertices", type=int, default=8)

    verify = command("verify", cmd_verify, help="exhaustive verifications")
    verify.add_argument(
        "scope", choices=("quarter", "s8", "observations", "clique-bound")
    )
    verify.add_argument("--s", type=int, default=5)
    verify.add_argument("--exhaustive", action="store_true")
    verify.add_argument("--observations", nargs="*", choices=OBSERVATIONS)
    verify.add_argument("--clique-t", type=int, default=5)
    family_flags(verify)

    patterns = command("enumerate-patterns", cmd_enumerate_patterns)
    family_flags(patterns)

    admissible = command("admissible", cmd_admissible)
    admissible.add_argument("--graph", type=_graph)
    admissible.add_argument("--weighted")
    admissible.add_argument("--eps", type=as_fraction, default=Fraction(0))
    admissible.add_argument("--H", type=_graph)
    family_flags(admissible)

    phi = command("minimize-phi", cmd_minimize_phi)
    phi.add_argument("--graph", type=_graph, action="append", required=True)
    phi.add_argument("--oracles", action="store_true")

    reduce = command("reduce-weights", cmd_reduce_weights)
    reduce.add_argument("--weights", required=True)

    embed = command("embed", cmd_embed)
    embed.add_argument("--config", required=True)
    embed.add_argument("--runs", type=int, default=1)

    geometry = command("geometry", cmd_geometry)
    geometry.add_argument("pipeline", choices=("crossings", "graph", "separator", "random", "extremal"))
    geometry.add_argument("--curves")
    geometry.add_argument("--n", type=int, default=12)
    geometry.add_argument("--segments", type=int, default=4)
    geometry.add_argument("--width", type=int, default=1000)
    geometry.add_argument("--height", type=int, default=1000)
    geometry.add_argument("--step", type=int)
    geometry.add_argument("--eps", type=as_fraction, default=Fraction(1, 10))
    geometry.add_argument("--seeds", type=parse_seeds, default=[0])

    extremal = command("extremal", cmd_extremal)
    extremal.add_argument("--ns", type=parse_ints, default=[16, 20, 24, 28])
    extremal.add_argument("--eps", type=as_fraction, default=Fraction(1, 10))
    extremal.add_argument("--seeds", type=parse_seeds, default=[0])

    replay = command("replay", cmd_replay)
    replay.add_argument("--manifest", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return EXIT_OK if stop.code == 0 else EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    run = Run(args, argv)
    try:
        status = args.handler(run)
    except UsageError as error:
        logger.error("%s", error)
        return EXIT_USAGE
    except CapacityError as error:
        logger.error("%s", error)
        return EXIT_CAPACITY
    except (CurveFileError, GeneralPositionError, GenerationError, KeyError, ValueError) as error:
        logger.error("%s", error)
        return EXIT_INPUT
    run.close()
    return status


def console() -> None:
    sys.exit(main())
