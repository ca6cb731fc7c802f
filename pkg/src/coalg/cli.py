"""Command-line front end.

Inputs are JSON files dispatched by their top-level "kind" field
(set-coalgebra | nlts | convex | signature), or built-in fixtures
addressed as ``gallery:<name>``.  Exit codes are a total function of the
verdict: 0 well-founded/success, 1 not well-founded (cycle found), 2
budget exhausted, 3 parse or validation error.  Identical inputs produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import gallery
from .coalgebras import (
    BudgetExhausted,
    LazyCoalgebra,
    canonical_graph,
    coalgebra_from_json,
    coalgebra_to_json,
    count_algebra,
    induction_algebra,
    unfold_algebra,
)
from .containers import Star
from .convex import convex_from_json, convex_wf_fixpoint
from .errors import (
    AnalysisError,
    CycleError,
    FoundInfinitePathEvidence,
    InputError,
    NotWellFoundedError,
)
from .initial_algebra import (
    Term,
    signature_from_json,
    realize_hstructure,
    term_realization_report,
    unfold_to_term,
)
from .nominal import (
    nlts_from_json,
    nominal_is_well_founded,
    nominal_koenig_extract,
    nominal_wf_labels,
    orbit_graph,
    state_from_text,
)
from .wellfounded import koenig_extract, solve_recursion, well_founded_part

EXIT_OK = 0
EXIT_NOT_WF = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3


@dataclass
class RunConfig:
    fmt: str = "text"
    budget: int = 10000
    depth: int = 4
    length: int = 50
    seed: int = 0
    state: str | None = None
    algebra: str = "count"


def _emit(doc: dict, config: RunConfig, text_lines) -> None:
    if config.fmt == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def load_input(path: str):
    """Returns (kind, object).  ``gallery:<name>`` addresses a fixture."""
    if path.startswith("gallery:"):
        name = path.split(":", 1)[1]
        try:
            entry = gallery.get_entry(name)
        except KeyError:
            raise InputError(
                f"unknown gallery entry {name!r}; try one of {', '.join(gallery.gallery_names())}"
            ) from None
        obj = entry.build()
        kind = "set-coalgebra" if entry.kind == "lazy-coalgebra" else entry.kind
        return kind, obj
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"{path}: expected a JSON object with a 'kind' field")
    kind = doc["kind"]
    if kind == "set-coalgebra":
        return kind, coalgebra_from_json(doc)
    if kind == "nlts":
        return kind, nlts_from_json(doc)
    if kind == "convex":
        return kind, convex_from_json(doc)
    if kind == "signature":
        return kind, signature_from_json(doc)
    raise InputError(f"{path}: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_check_wf_many(paths, config: RunConfig) -> int:
    # independent analyses; reports are serialized per file, and the exit
    # code is the most severe verdict
    codes = []
    for path in paths:
        if len(paths) > 1:
            print(f"=== {path} ===")
        codes.append(cmd_check_wf(path, config))
    return max(codes)


def cmd_check_wf(path: str, config: RunConfig) -> int:
    kind, obj = load_input(path)
    if kind == "set-coalgebra":
        if isinstance(obj, LazyCoalgebra):
            raise InputError("check-wf needs a finite carrier; use koenig for lazy systems")
        report = well_founded_part(obj)
        doc = report.to_json()
        verdict = report.is_well_founded
        detail = f"ranks: {json.dumps(doc['ranks'], sort_keys=True)}"
    elif kind == "nlts":
        verdict = nominal_is_well_founded(obj)
        doc = {"wellFounded": verdict, "wfLabels": sorted(nominal_wf_labels(obj))}
        detail = f"labels without infinite runs: {doc['wfLabels']}"
    elif kind == "convex":
        report = convex_wf_fixpoint(obj)
        verdict = report.is_well_founded
        doc = report.to_json()
        detail = f"ranks: {json.dumps(doc['ranks'], sort_keys=True)}"
    else:
        raise InputError(f"check-wf does not apply to kind {kind!r}")
    _emit(
        doc,
        config,
        [f"{'well-founded' if verdict else 'not well-founded'}", detail],
    )
    return EXIT_OK if verdict else EXIT_NOT_WF


def cmd_koenig(path: str, config: RunConfig) -> int:
    if config.state is None:
        raise InputError("koenig needs --state")
    kind, obj = load_input(path)
    if kind == "set-coalgebra":
        result = koenig_extract(obj, config.state, config.budget)
        if isinstance(result, BudgetExhausted):
            doc = {
                "budgetExhausted": True,
                "budget": result.budget,
                "visited": len(result.visited),
            }
            _emit(
                doc,
                config,
                [
                    f"budget exhausted after visiting {len(result.visited)} states (budget {result.budget}); "
                    "the closure was not confirmed finite"
                ],
            )
            return EXIT_BUDGET
        doc = {"state": config.state, "subcoalgebra": sorted(result), "size": len(result)}
        _emit(
            doc,
            config,
            [f"state {config.state} lies in the finite well-founded subsystem {sorted(result)}"],
        )
        return EXIT_OK
    if kind == "nlts":
        labels = nominal_koenig_extract(obj, state_from_text(config.state))
        doc = {"state": config.state, "labels": sorted(labels)}
        _emit(doc, config, [f"orbit-finite subsystem labels: {sorted(labels)}"])
        return EXIT_OK
    if kind == "convex":
        report = convex_wf_fixpoint(obj)
        if not report.is_well_founded:
            raise NotWellFoundedError(
                f"generators {sorted(report.non_wf)} admit infinite paths"
            )
        doc = {
            "state": config.state,
            "witnessCarrier": "all-generators",
            "ranks": report.to_json()["ranks"],
        }
        _emit(
            doc,
            config,
            ["the full finitely generated carrier is itself the witness subsystem"],
        )
        return EXIT_OK
    raise InputError(f"koenig does not apply to kind {kind!r}")


def _shape_to_jsonable(shape):
    if isinstance(shape, Star):
        return {"star": None}
    if isinstance(shape, Term):
        return str(shape)
    if isinstance(shape, frozenset):
        return {"set": sorted((_shape_to_jsonable(x) for x in shape), key=json.dumps)}
    if isinstance(shape, tuple):
        if len(shape) == 2 and shape[0] in ("inl", "inr"):
            return {shape[0]: _shape_to_jsonable(shape[1])}
        if len(shape) == 3 and shape[0] == "pair":
            return {"pair": [_shape_to_jsonable(shape[1]), _shape_to_jsonable(shape[2])]}
        return [_shape_to_jsonable(x) for x in shape]
    return shape


def cmd_fold(path: str, config: RunConfig) -> int:
    kind, obj = load_input(path)
    if kind != "set-coalgebra" or isinstance(obj, LazyCoalgebra):
        raise InputError("fold needs a finite set-coalgebra input")
    if config.algebra == "induction":
        alg = induction_algebra(obj.container)
    elif config.algebra == "count":
        alg = count_algebra(obj.container)
    elif config.algebra == "term":
        alg = unfold_algebra(obj.container)
    else:
        raise InputError(f"unknown built-in algebra {config.algebra!r}")
    values = solve_recursion(obj, alg)
    doc = {
        "algebra": config.algebra,
        "values": {x: _shape_to_jsonable(values[x]) for x in obj.states},
    }
    _emit(
        doc,
        config,
        [f"{x} = {json.dumps(_shape_to_jsonable(values[x]), sort_keys=True)}" for x in obj.states],
    )
    return EXIT_OK


def _load_term_doc(doc, where: str) -> Term:
    if isinstance(doc, str):
        from .initial_algebra import parse_term

        return parse_term(doc)
    if isinstance(doc, dict) and "op" in doc:
        args = doc.get("args", [])
        if not isinstance(args, list):
            raise InputError(f"{where}.args: expected a list")
        return Term(
            doc["op"],
            tuple(_load_term_doc(a, f"{where}.args[{i}]") for i, a in enumerate(args)),
        )
    raise InputError(f"{where}: expected a term string or {{op, args}}")


def cmd_realize(sig_path: str, structure_path: str, config: RunConfig) -> int:
    kind, sig = load_input(sig_path)
    if kind != "signature":
        raise InputError(f"{sig_path}: expected kind 'signature'")
    try:
        with open(structure_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {structure_path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{structure_path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or "op" not in doc:
        raise InputError(f"{structure_path}: expected {{op, args}}")
    args = [
        _load_term_doc(a, f"$.args[{i}]") for i, a in enumerate(doc.get("args", []))
    ]
    system, state = realize_hstructure(sig, doc["op"], args)
    unfolded = unfold_to_term(sig, system, state)
    out = {
        "coalgebra": coalgebra_to_json(system),
        "state": state,
        "unfolded": str(unfolded),
    }
    _emit(
        out,
        config,
        [
            f"realized at state {state!r} ({len(system.states)} states)",
            f"unfolds to {unfolded}",
        ],
    )
    return EXIT_OK


def cmd_check_52(sig_path: str, config: RunConfig) -> int:
    kind, sig = load_input(sig_path)
    if kind != "signature":
        raise InputError(f"{sig_path}: expected kind 'signature'")
    report = term_realization_report(sig, config.depth)
    doc = report.to_json()
    _emit(
        doc,
        config,
        [
            f"terms up to height {config.depth}: {report.term_count}, realized: {report.realized_ok}",
            f"structures over lower terms: {report.structure_count}, distinct terms: {report.distinct_terms}",
            f"passed: {report.passed}",
        ],
    )
    return EXIT_OK if report.passed else EXIT_NOT_WF


def export_dot(nodes, edges) -> str:
    """Deterministic DOT text: nodes and edges sorted, one edge per line."""

    def quote(s: str) -> str:
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    if not nodes:
        return "digraph G { }"
    lines = ["digraph G {"]
    for n in sorted(nodes):
        lines.append(f"  {quote(n)};")
    for a, b in sorted(edges):
        lines.append(f"  {quote(a)} -> {quote(b)};")
    lines.append("}")
    return "\n".join(lines)


def cmd_export_dot(path: str, config: RunConfig) -> int:
    kind, obj = load_input(path)
    if kind == "set-coalgebra":
        if isinstance(obj, LazyCoalgebra):
            raise InputError("export-dot needs a finite carrier")
        graph = canonical_graph(obj)
        nodes = list(graph.states)
        edges = [(x, s) for x in graph.states for s in sorted(graph.successors(x))]
    elif kind == "nlts":
        og = orbit_graph(obj)
        nodes = list(og)
        edges = [(a, b) for a in og for b in sorted(og[a])]
    else:
        raise InputError(f"export-dot does not apply to kind {kind!r}")
    print(export_dot(nodes, edges))
    return EXIT_OK


def cmd_gallery(name: str, config: RunConfig) -> int:
    if name == "list":
        for entry_name in gallery.gallery_names():
            entry = gallery.GALLERY[entry_name]
            print(f"{entry_name} [{entry.kind}] - {entry.description}")
        return EXIT_OK
    if name == "all":
        all_ok = True
        for entry_name in gallery.gallery_names():
            entry = gallery.GALLERY[entry_name]
            doc, code = entry.demo(config)
            match = code == entry.expected_exit
            all_ok = all_ok and match
            print(f"=== {entry_name} [{entry.kind}] ===")
            print(json.dumps(doc, indent=2, sort_keys=True))
            print(f"exit: {code} (expected {entry.expected_exit}) {'ok' if match else 'MISMATCH'}")
        return EXIT_OK if all_ok else EXIT_NOT_WF
    try:
        entry = gallery.get_entry(name)
    except KeyError:
        raise InputError(
            f"unknown gallery entry {name!r}; try one of {', '.join(gallery.gallery_names())}"
        ) from None
    doc, code = entry.demo(config)
    _emit(doc, config, [json.dumps(doc, indent=2, sort_keys=True)])
    return code


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coalg",
        description="analyze transition systems for well-foundedness, extract "
        "finite well-founded subsystems, and solve structural recursion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--budget", type=int, default=10000)
        p.add_argument("--depth", type=int, default=4)
        p.add_argument("--length", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check-wf", help="decide well-foundedness")
    p.add_argument("input", nargs="+")
    common(p)

    p = sub.add_parser("wf-part", help="report the full well-founded part")
    p.add_argument("input", nargs="+")
    common(p)

    p = sub.add_parser("koenig", help="extract a finite well-founded subsystem")
    p.add_argument("input")
    p.add_argument("--state", required=True)
    common(p)

    p = sub.add_parser("fold", help="solve structural recursion into a built-in algebra")
    p.add_argument("input")
    p.add_argument("--algebra", choices=["term", "induction", "count"], default="count")
    common(p)

    p = sub.add_parser("realize", help="realize a term structure as a finite system")
    p.add_argument("--sig", required=True)
    p.add_argument("--structure", required=True)
    common(p)

    p = sub.add_parser(
        "check-5.2", help="check the closed-term fragment, both directions"
    )
    p.add_argument("--sig", required=True)
    common(p)

    p = sub.add_parser("gallery", help="run a built-in fixture ('list', 'all', or a name)")
    p.add_argument("name")
    common(p)

    p = sub.add_parser("export-dot", help="emit the system graph as DOT")
    p.add_argument("input")
    common(p)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        fmt=args.format,
        budget=args.budget,
        depth=args.depth,
        length=args.length,
        seed=args.seed,
        state=getattr(args, "state", None),
        algebra=getattr(args, "algebra", "count"),
    )
    if config.budget < 1 or config.depth < 0 or config.length < 1:
        print("error: budget and length must be positive, depth nonnegative", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.command in ("check-wf", "wf-part"):
            return cmd_check_wf_many(args.input, config)
        if args.command == "koenig":
            return cmd_koenig(args.input, config)
        if args.command == "fold":
            return cmd_fold(args.input, config)
        if args.command == "realize":
            return cmd_realize(args.sig, args.structure, config)
        if args.command == "check-5.2":
            return cmd_check_52(args.sig, config)
        if args.command == "gallery":
            return cmd_gallery(args.name, config)
        if args.command == "export-dot":
            return cmd_export_dot(args.input, config)
        raise InputError(f"unknown command {args.command!r}")
    except FoundInfinitePathEvidence as exc:
        print(f"not well-founded: {exc}", file=sys.stderr)
        return EXIT_NOT_WF
    except (NotWellFoundedError, CycleError) as exc:
        print(f"not well-founded: {exc}", file=sys.stderr)
        return EXIT_NOT_WF
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
