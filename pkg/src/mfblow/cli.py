"""Command-line front end.

``mfblow <command> -i job.json [-o report.json]`` with commands verify, norm,
blowup, analyze, graph and pipeline.  Exit codes: 0 success, 1 I/O, JSON or
parse error, 2 domain error.  Errors are printed as ``{"error": {...}}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from . import __version__
from .blowup import BlowupChart, blowup_charts
from .errors import DomainError, JobError, MfblowError, NotAMatrixFactorization, ParseError
from .groebner import Ideal, PolyMatrix
from .mf import (
    MatrixFactorization,
    NormChoice,
    an_mf,
    cubic_line_mf,
    fundamental_mf,
    norm_ideal,
    presentation,
    rank_of_coker,
    verify_mf,
)
from .pipeline import analyze_blowup, run_pipeline, worker_count
from .poly import Polynomial, Ring
from .resgraph import (
    DualGraph,
    canonical_cycle,
    contract,
    intersection_matrix,
    is_negative_definite,
)
from .singularity import SingularityReport


COMMANDS = ("verify", "norm", "blowup", "analyze", "graph", "pipeline")
PAYLOADS = ("mf", "builtin", "ideal", "graph")


@dataclass
class Job:
    raw: Dict[str, Any]
    ring: Optional[Ring]
    f: Optional[Polynomial]
    payload: str
    mf: Optional[MatrixFactorization] = None
    ideal: Optional[Ideal] = None
    graph: Optional[DualGraph] = None
    chern: Any = None
    choice: NormChoice = NormChoice()


def _polys(ring: Ring, items, what: str) -> List[Polynomial]:
    if not isinstance(items, list) or not all(isinstance(s, (str, int)) for s in items):
        raise JobError(f"{what} must be a list of polynomial strings")
    return [ring.parse(str(s)) for s in items]


def _matrix(ring: Ring, rows, what: str) -> PolyMatrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise JobError(f"{what} must be a non-empty list of rows")
    if any(len(r) != len(rows) for r in rows):
        raise JobError(f"{what} must be square")
    return PolyMatrix(ring, len(rows), len(rows), [p for r in rows for p in _polys(ring, r, what)])


def _builtin(spec) -> MatrixFactorization:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise JobError('builtin must be one of {"an": {"n", "k"}}, {"fundamental": {}}, {"cubic_line": {}}')
    (name, args), = spec.items()
    if name == "an":
        if not isinstance(args, dict) or not all(isinstance(args.get(key), int) for key in ("n", "k")):
            raise JobError('builtin "an" needs integer fields n and k')
        try:
            return an_mf(args["n"], args["k"])
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
    if name == "fundamental":
        return fundamental_mf()
    if name == "cubic_line":
        return cubic_line_mf()
    raise JobError(f"unknown builtin {name!r}")


def _choice(options: Dict[str, Any], args: argparse.Namespace) -> NormChoice:
    mode = options.get("norm_mode")
    columns = options.get("columns", [])
    seed = options.get("seed", 0)
    if args.columns is not None:
        mode, columns = "columns", args.columns
    if args.seed is not None:
        seed = args.seed
    if mode is None:
        mode = "columns" if columns else "generic"
    if mode not in ("columns", "generic"):
        raise JobError(f"norm_mode must be 'columns' or 'generic', got {mode!r}")
    if not isinstance(columns, list) or not all(isinstance(c, int) for c in columns):
        raise JobError("columns must be a list of integers")
    if not isinstance(seed, int) or seed < 0:
        raise JobError("seed must be a non-negative integer")
    if mode == "columns" and not columns:
        raise JobError("columns mode needs a non-empty column list")
    return NormChoice(mode, tuple(columns), seed)


def load_job(data, args: argparse.Namespace) -> Job:
    if not isinstance(data, dict):
        raise JobError("job file must contain a JSON object")
    present = [p for p in PAYLOADS if p in data]
    if len(present) != 1:
        raise JobError(f"job needs exactly one payload among {list(PAYLOADS)}, found {present}")
    payload = present[0]
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise JobError("options must be an object")
    choice = _choice(options, args)

    if payload == "graph":
        return Job(data, None, None, payload, graph=DualGraph.from_dict(data["graph"]),
                   chern=data.get("chern"), choice=choice)

    if payload == "builtin":
        mf = _builtin(data["builtin"])
        if "ring" in data and tuple(data["ring"]) != mf.ring.vars:
            raise JobError(f"builtin factorizations live in the ring {list(mf.ring.vars)}")
        if "hypersurface" in data and mf.ring.parse(str(data["hypersurface"])) != mf.f:
            raise JobError(f"builtin hypersurface is {mf.f}")
        return Job(data, mf.ring, mf.f, payload, mf=mf, choice=choice)

    if "ring" not in data or "hypersurface" not in data:
        raise JobError("job needs 'ring' and 'hypersurface'")
    names = data["ring"]
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise JobError("ring must be a list of variable names")
    try:
        ring = Ring(tuple(names))
    except ValueError as exc:
        raise JobError(str(exc)) from exc
    f = ring.parse(str(data["hypersurface"]))
    if payload == "mf":
        body = data["mf"]
        if not isinstance(body, dict) or "phi" not in body or "psi" not in body:
            raise JobError("mf payload needs 'phi' and 'psi'")
        mf = MatrixFactorization(f, _matrix(ring, body["phi"], "phi"), _matrix(ring, body["psi"], "psi"))
        return Job(data, ring, f, payload, mf=mf, choice=choice)
    return Job(data, ring, f, payload, ideal=Ideal(ring, _polys(ring, data["ideal"], "ideal")), choice=choice)


# -- report pieces -------------------------------------------------------------

def _strs(polys) -> List[str]:
    return [str(p) for p in polys]


def _echo(job: Job) -> Dict[str, Any]:
    out: Dict[str, Any] = {"payload": job.payload}
    if job.ring is not None:
        out["ring"] = list(job.ring.vars)
        out["hypersurface"] = str(job.f)
    if job.payload == "builtin":
        out["builtin"] = job.raw["builtin"]
    if job.mf is not None:
        out["phi"] = [_strs(r) for r in job.mf.phi.tolist()]
        out["psi"] = [_strs(r) for r in job.mf.psi.tolist()]
    if job.ideal is not None:
        out["ideal"] = _strs(job.ideal.generators)
    if job.graph is not None:
        out["graph"] = job.graph.to_dict()
        if job.chern is not None:
            out["chern"] = job.chern
    return out


def _choice_dict(choice: NormChoice) -> Dict[str, Any]:
    d: Dict[str, Any] = {"norm_mode": choice.mode}
    if choice.mode == "columns":
        d["columns"] = list(choice.columns)
    else:
        d["seed"] = choice.seed
    return d


def _chart_dict(chart: BlowupChart, report: Optional[SingularityReport] = None) -> Dict[str, Any]:
    d: Dict[str, Any] = {
        "index": chart.index,
        "center_generator": str(chart.center_generator),
        "ambient_vars": list(chart.ambient_ring.vars),
        "generators": _strs(chart.chart_ideal.groebner_basis()),
        "dimension": chart.dimension,
    }
    if chart.simplified is not None:
        d["simplified_vars"] = list(chart.simplified.ring.vars)
        d["simplified_generators"] = _strs(chart.simplified.generators)
        d["eliminated"] = [[v, str(p)] for v, p in chart.simplified.eliminated]
    if chart.fiber_relations:
        d["fiber_relations"] = _strs(chart.fiber_relations)
    if report is not None:
        d.update({k: v for k, v in report.to_dict().items() if k != "index"})
    return d


def _need_mf(job: Job, command: str) -> MatrixFactorization:
    if job.mf is None:
        raise JobError(f"{command} needs an 'mf' or 'builtin' payload")
    return job.mf


def cmd_verify(job: Job, args) -> Dict[str, Any]:
    mf = _need_mf(job, "verify")
    check = verify_mf(mf)
    out: Dict[str, Any] = {"verify": check.to_dict()}
    if check.ok:
        out["rank"] = rank_of_coker(mf)
        out["presentation"] = presentation(mf).to_dict()
    else:
        out["error"] = {"code": "not_a_matrix_factorization",
                        "message": "phi*psi and psi*phi must both equal f*Id"}
    return out


def cmd_norm(job: Job, args) -> Dict[str, Any]:
    mf = _need_mf(job, "norm")
    check = verify_mf(mf)
    if not check.ok:
        raise NotAMatrixFactorization("phi*psi and psi*phi must both equal f*Id")
    ideal = norm_ideal(mf, job.choice, full_minors=args.experimental_full_minors)
    out = {
        "verify": check.to_dict(),
        "rank": rank_of_coker(mf),
        "choice": _choice_dict(job.choice),
        "norm_ideal": _strs(ideal.generators),
    }
    if args.experimental_full_minors:
        out["experimental_full_minors"] = True
    return out


def _center(job: Job, args):
    if job.ideal is not None:
        return job.ideal, {}
    head = cmd_norm(job, args)
    center = Ideal(job.ring, [job.ring.parse(s) for s in head["norm_ideal"]])
    return center, head


def cmd_blowup(job: Job, args) -> Dict[str, Any]:
    center, out = _center(job, args)
    charts = blowup_charts(job.f, center, workers=worker_count())
    out = dict(out)
    out["center"] = _strs(center.generators)
    out["charts"] = [_chart_dict(c) for c in charts]
    return out


def cmd_analyze(job: Job, args) -> Dict[str, Any]:
    center, out = _center(job, args)
    res = analyze_blowup(job.f, center, worker_count())
    out = dict(out)
    out["center"] = _strs(center.generators)
    out["charts"] = [_chart_dict(c, r) for c, r in zip(res.charts, res.reports)]
    out["verdict"] = res.verdict.to_dict()
    return out


def cmd_pipeline(job: Job, args) -> Dict[str, Any]:
    mf = _need_mf(job, "pipeline")
    res = run_pipeline(mf, job.choice, full_minors=args.experimental_full_minors, workers=worker_count())
    out: Dict[str, Any] = {
        "verify": res.verify.to_dict(),
        "rank": res.rank,
        "choice": _choice_dict(job.choice),
        "norm_ideal": _strs(res.center.generators),
        "charts": [_chart_dict(c, r) for c, r in zip(res.charts, res.reports)],
    }
    out.update(res.verdict.to_dict())
    return out


def cmd_graph(job: Job, args) -> Dict[str, Any]:
    if job.graph is None:
        raise JobError("graph needs a 'graph' payload")
    g = job.graph
    m = intersection_matrix(g)
    out: Dict[str, Any] = {
        "intersection_matrix": m,
        "negative_definite": is_negative_definite(m),
    }
    if out["negative_definite"]:
        z = canonical_cycle(g)
        out["canonical_cycle"] = z.to_dict()
        out["small_wrt_gorenstein"] = z.nonneg
    if job.chern is not None:
        out["contraction"] = contract(g, job.chern).to_dict()
    return out


HANDLERS = {
    "verify": cmd_verify,
    "norm": cmd_norm,
    "blowup": cmd_blowup,
    "analyze": cmd_analyze,
    "graph": cmd_graph,
    "pipeline": cmd_pipeline,
}


# -- human summary -----------------------------------------------------------

def summary(command: str, report: Dict[str, Any]) -> str:
    lines = [f"mfblow {command}"]
    body = report.get("result", {})
    if "verify" in body:
        lines.append(f"  matrix factorization: {'ok' if body['verify']['ok'] else 'FAILED'}")
    if "rank" in body:
        lines.append(f"  rank of cokernel: {body['rank']}")
    if "norm_ideal" in body:
        lines.append(f"  norm ideal: ({', '.join(body['norm_ideal'])})")
    for chart in body.get("charts", []):
        status = chart.get("status", "computed")
        lines.append(f"  chart {chart['index']}: {status}")
    verdict = body.get("verdict", body)
    if "aggregate" in verdict:
        note = verdict.get("speciality_note")
        lines.append(f"  aggregate: {verdict['aggregate']}" + (f" ({note})" if note else ""))
    if "contraction" in body:
        types = [p["type"] or "?" for p in body["contraction"]["singular_points"]]
        lines.append(f"  singular points after contraction: {types}")
    return "\n".join(lines)


# -- entry point ---------------------------------------------------------------

def _columns(text: str) -> List[int]:
    try:
        return [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--columns expects comma-separated integers, got {text!r}")


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seed expects an integer, got {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("--seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfblow", description="Blow-ups at norm ideals of matrix factorizations.")
    parser.add_argument("--version", action="version", version=f"mfblow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("-i", "--input", required=True, help="job file (JSON); '-' reads standard input")
        p.add_argument("-o", "--output", help="write the JSON report here instead of standard output")
        p.add_argument("--seed", type=_seed, help="seed for the generic norm mode")
        p.add_argument("--columns", type=_columns, help="1-based columns of phi, e.g. 3,4")
        p.add_argument("--verbose", action="store_true", help="log Groebner basis traces to standard error")
        p.add_argument("--experimental-full-minors", action="store_true",
                       help="use all minors of phi for the norm ideal (experimental)")
        p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identical output)")
    return parser


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(exc: Exception, code: str, status: int) -> int:
    obj = exc.to_dict() if isinstance(exc, MfblowError) else {"code": code, "message": str(exc)}
    sys.stdout.write(json.dumps({"error": obj}, indent=2) + "\n")
    print(f"mfblow: {obj['message']}", file=sys.stderr)
    return status


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        if args.input == "-":
            data = json.load(sys.stdin)
        else:
            with open(args.input, encoding="utf-8") as fh:
                data = json.load(fh)
    except OSError as exc:
        return _fail(exc, "io_error", 1)
    except json.JSONDecodeError as exc:
        return _fail(exc, "invalid_json", 1)

    start = time.perf_counter()
    try:
        job = load_job(data, args)
        result = HANDLERS[args.command](job, args)
    except (ParseError, JobError) as exc:
        return _fail(exc, exc.code, 1)
    except MfblowError as exc:
        return _fail(exc, exc.code, 2)

    report: Dict[str, Any] = {
        "command": args.command,
        "version": __version__,
        "input": _echo(job),
        "result": result,
    }
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    text = json.dumps(report, indent=2) + "\n"
    try:
        _emit(text, args.output)
    except OSError as exc:
        return _fail(exc, "io_error", 1)
    if args.output:
        print(summary(args.command, report))
    return 2 if "error" in result else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
