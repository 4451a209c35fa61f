"""JSON-ready forms of the domain values and the loaders that read them back.

``serialize`` is dispatched on the value type: graphs become graph6
strings, rationals ``"p/q"`` strings, and every composite value a dict of
those. Loaders are explicit, one per type.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Mapping

from multipledispatch import dispatch

from string_threshold.data_structures import (
    AdmissibilityWitness,
    BicliquePair,
    CurveFileError,
    DenseGraph,
    SubdivisionPattern,
    Verdict,
    VertexWeightedGraph,
    WeakSubdivisionWitness,
    WeightedCompleteGraph,
    as_fraction,
    kt_edges,
)
from string_threshold.embedding import Embedding, FailureReport
from string_threshold.geometry import (
    Crossing,
    CurveArrangement,
    Polyline,
    SeparatorPipeline,
)
from string_threshold.simplex import PhiMinimum
from string_threshold.turan import ReductionStep, ReductionTrace
from string_threshold.verification import VerificationReport

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


def _pair_key(x: int, y: int) -> str:
    return f"{x},{y}"


def _parse_pair(key: str) -> tuple:
    x, y = key.split(",")
    return int(x), int(y)


@dispatch(Fraction)
def serialize(obj):
    """
    :examples:
        >>> serialize(Fraction(3, 4)), serialize([Fraction(1), {"a": Fraction(1, 2)}])
        ('3/4', ['1', {'a': '1/2'}])
    """
    return str(obj)


@dispatch(DenseGraph)  # type: ignore
def serialize(obj):  # noqa: F811
    return obj.to_graph6()


@dispatch(BicliquePair)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"A": sorted(obj.A), "B": sorted(obj.B)}


@dispatch(WeightedCompleteGraph)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"k": obj.k, "weights": {_pair_key(x, y): str(w) for (x, y), w in obj.items()}}


@dispatch(VertexWeightedGraph)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"graph": obj.graph.to_graph6(), "phi": [str(p) for p in obj.phi]}


@dispatch(SubdivisionPattern)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"t": obj.t, "k": {f"{i}{j}": count for (i, j), count in obj.k.items()}}


@dispatch(WeakSubdivisionWitness)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "pattern": serialize(obj.pattern),
        "map": {str(label): v for label, v in obj.mapping.items()},
        "extra_edges": [list(edge) for edge in obj.extra_edges],
    }


@dispatch(AdmissibilityWitness)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"order": list(obj.order), "map": {str(x): v for x, v in obj.mapping.items()}}


@dispatch(Verdict)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "holds": obj.holds,
        "conclusive": obj.conclusive,
        "witness": serialize(obj.witness),
    }


@dispatch(ReductionStep)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "kind": obj.kind,
        "changes": [[x, y, str(w)] for (x, y), w in obj.changes],
        "weight_before": str(obj.weight_before),
        "weight_after": str(obj.weight_after),
        "dangerous_before": sorted(list(t) for t in obj.dangerous_before),
        "dangerous_after": sorted(list(t) for t in obj.dangerous_after),
    }


@dispatch(ReductionTrace)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"start": serialize(obj.start), "steps": [serialize(s) for s in obj.steps]}


@dispatch(PhiMinimum)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "value": str(obj.value),
        "phi": [str(p) for p in obj.phi],
        "support": list(obj.support),
        "multiplier": str(obj.multiplier),
    }


@dispatch(VerificationReport)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "scope": obj.scope,
        "graph_count": obj.graph_count,
        "admissible_free_count": obj.admissible_free_count,
        "min_phi": None if obj.min_phi is None else str(obj.min_phi),
        "extremal_graphs": list(obj.extremal_graphs),
        "violations": list(obj.violations),
        "details": serialize(obj.details),
        "passed": obj.passed,
    }


@dispatch(Embedding)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "branch": {str(x): v for x, v in obj.branch.items()},
        "side": {_pair_key(x, y): v for (x, y), v in obj.side.items()},
        "blocks": {str(x): b for x, b in obj.blocks.items()},
        "cases": {_pair_key(x, y): c for (x, y), c in obj.cases.items()},
    }


@dispatch(FailureReport)  # type: ignore
def serialize(obj):  # noqa: F811
    return {"step": obj.step, "cause": obj.cause, "detail": obj.detail}


@dispatch(Polyline)  # type: ignore
def serialize(obj):  # noqa: F811
    return [[[x.numerator, x.denominator], [y.numerator, y.denominator]] for x, y in obj.points]


@dispatch(CurveArrangement)  # type: ignore
def serialize(obj):  # noqa: F811
    return [serialize(curve) for curve in obj.curves]


@dispatch(Crossing)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "curves": [obj.first, obj.second],
        "point": [str(obj.point[0]), str(obj.point[1])],
        "segments": list(obj.segments),
    }


@dispatch(SeparatorPipeline)  # type: ignore
def serialize(obj):  # noqa: F811
    return {
        "separator_size": len(obj.nodes),
        "curves": sorted(obj.curves),
        "pair": serialize(obj.pair),
        "planar_vertices": obj.planar_vertices,
        "crossings": obj.crossings,
        "constant": obj.constant,
    }


@dispatch(dict)  # type: ignore
def serialize(obj):  # noqa: F811
    return {str(key): serialize(value) for key, value in obj.items()}


@dispatch((list, tuple))  # type: ignore
def serialize(obj):  # noqa: F811
    return [serialize(value) for value in obj]


@dispatch((set, frozenset))  # type: ignore
def serialize(obj):  # noqa: F811
    return sorted(serialize(value) for value in obj)


@dispatch(object)  # type: ignore
def serialize(obj):  # noqa: F811
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"{obj} is not json serializable")


def graph_from_json(data: str) -> DenseGraph:
    """graph6, with or without the ``>>graph6<<`` header"""
    return DenseGraph.from_graph6(data.strip().removeprefix(">>graph6<<"))


def weighted_graph_from_json(data: Mapping[str, Any]) -> WeightedCompleteGraph:
    """
    :examples:
        >>> weighted_graph_from_json({"k": 2, "weights": {"0,1": "1/2"}})
        WeightedCompleteGraph(k=2, {01: 1/2})
    """
    weights = {_parse_pair(key): value for key, value in data["weights"].items()}
    return WeightedCompleteGraph(int(data["k"]), weights)


def pattern_from_json(data: Mapping[str, Any]) -> SubdivisionPattern:
    t = int(data["t"])
    keyed = {f"{i}{j}": (i, j) for i, j in kt_edges(t)}
    unknown = sorted(set(data["k"]) - set(keyed))
    if unknown:
        raise ValueError(f"{unknown} are not edges of K_{t}")
    return SubdivisionPattern(t, {keyed[key]: int(v) for key, v in data["k"].items()})


def admissibility_witness_from_json(data: Mapping[str, Any]) -> AdmissibilityWitness:
    return AdmissibilityWitness(
        [int(x) for x in data["order"]], {int(x): int(v) for x, v in data["map"].items()}
    )


def trace_from_json(data: Mapping[str, Any]) -> ReductionTrace:
    """A trace whose stored totals and dangerous sets are taken as written,
    so ``violations`` re-checks them against the replay."""
    steps = [
        ReductionStep(
            step["kind"],
            tuple(((x, y), as_fraction(w)) for x, y, w in step["changes"]),
            as_fraction(step["weight_before"]),
            as_fraction(step["weight_after"]),
            frozenset(tuple(t) for t in step["dangerous_before"]),
            frozenset(tuple(t) for t in step["dangerous_after"]),
        )
        for step in data["steps"]
    ]
    return ReductionTrace(weighted_graph_from_json(data["start"]), steps)


def report_from_json(data: Mapping[str, Any]) -> VerificationReport:
    return VerificationReport(
        data["scope"],
        data["graph_count"],
        data["admissible_free_count"],
        None if data["min_phi"] is None else as_fraction(data["min_phi"]),
        list(data["extremal_graphs"]),
        list(data["violations"]),
        dict(data.get("details", {})),
    )


def embedding_from_json(data: Mapping[str, Any]) -> Embedding:
    return Embedding(
        {int(x): v for x, v in data["branch"].items()},
        {_parse_pair(key): v for key, v in data["side"].items()},
        {int(x): b for x, b in data.get("blocks", {}).items()},
        {_parse_pair(key): c for key, c in data.get("cases", {}).items()},
        [],
    )


def _coordinate(value: Any, where: str) -> Fraction:
    try:
        if isinstance(value, list):
            numerator, denominator = value
            if not isinstance(numerator, int) or not isinstance(denominator, int):
                raise ValueError
            return Fraction(numerator, denominator)
        if isinstance(value, (int, str)) and not isinstance(value, bool):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise CurveFileError(f"{where}: {value!r} is not a rational coordinate")


def curves_from_json(text: str) -> List[Polyline]:
    """Polylines from a curve file: a list of curves, each a list of
    ``[x, y]`` points whose coordinates are integers, ``"p/q"`` strings or
    ``[p, q]`` pairs.

    :examples:
        >>> curves_from_json('[[[0, 0], [[1, 2], 1]]]')
        [Polyline([(0, 0), (1/2, 1)])]
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise CurveFileError(
            f"line {error.lineno} column {error.colno}: {error.msg}"
        ) from error
    if not isinstance(data, list):
        raise CurveFileError("a curve file must hold a list of curves")
    curves = []
    for i, curve in enumerate(data):
        if not isinstance(curve, list):
            raise CurveFileError(f"curve {i}: expected a list of points")
        points = []
        for k, point in enumerate(curve):
            if not isinstance(point, list) or len(point) != 2:
                raise CurveFileError(f"curve {i} point {k}: expected [x, y]")
            where = f"curve {i} point {k}"
            points.append((_coordinate(point[0], where), _coordinate(point[1], where)))
        try:
            curves.append(Polyline(points))
        except ValueError as error:
            raise CurveFileError(f"curve {i}: {error}") from error
    return curves


def arrangement_from_json(text: str) -> CurveArrangement:
    return CurveArrangement(curves_from_json(text))


def dumps(obj: Any) -> str:
    return json.dumps(serialize(obj), indent=2, sort_keys=True)


def rows_to_csv(rows: List[Dict[str, Any]]) -> str:
    """header from the first row, one line per row"""
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(value) for key, value in row.items()})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return " ".join(map(str, value))
    return value
