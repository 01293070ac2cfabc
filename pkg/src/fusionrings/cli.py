"""The ``fusion`` command line tool.

Exit codes: 0 pass, 1 negative mathematical verdict, 2 input error,
3 inconclusive.  ``FUSION_THREADS`` caps enumeration workers; an optional
JSON config file supplies default depths and budgets.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .documents import (
    MODULE_FORMAT,
    RING_FORMAT,
    emit_document,
    load_document,
    module_from_document,
    module_to_document,
    resolve_ring,
    ring_from_document,
    ring_to_document,
    write_document,
)
from .elements import parse_element
from .errors import (
    FusionError,
    MalformedDocumentError,
    NoDimensionFunctionError,
    UnknownLabelError,
)
from .modules import standard_module, verify_module
from .rings import frobenius_perron_dims, fuse, ring_dims, verify_based_ring, verify_lazy_ring
from .spectra import dynkin_classify, export_dot, module_graph, symmetrize
from .torsion import ModuleSearchConfig, dimension_bound, enumerate_modules, is_torsion_free

PASS, NEGATIVE, INPUT_ERROR, INCONCLUSIVE = 0, 1, 2, 3


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            config = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedDocumentError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(config, dict):
        raise MalformedDocumentError("config must be a JSON object")
    return config


def _resolve_any(source: str):
    """A ring or finite module from a builtin URI or a document path."""
    if source.startswith("builtin:"):
        return resolve_ring(source), None
    doc = load_document(source)
    fmt = doc.get("format")
    if fmt == RING_FORMAT:
        return ring_from_document(doc), None
    if fmt == MODULE_FORMAT:
        module = module_from_document(doc)
        return module.ring, module
    raise MalformedDocumentError(f"unknown document format {fmt!r}")


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    depth = args.depth if args.depth is not None else config.get("depth", 8)
    ring, module = _resolve_any(args.path)
    if module is not None:
        report = verify_module(module)
    elif ring.is_lazy:
        report = verify_lazy_ring(ring, depth)
    else:
        report = verify_based_ring(ring)
    print("\n".join(report.lines()))
    if not report.structurally_sound:
        return INPUT_ERROR
    return PASS if report.ok else NEGATIVE


def cmd_fuse(args) -> int:
    ring, module = _resolve_any(args.path)
    if module is not None:
        raise MalformedDocumentError("fuse expects a ring, not a module")

    def resolve(text: str):
        element = parse_element(text)
        return element.map_labels(lambda l: ring.unit if l == "unit" else l)

    x = resolve(args.x)
    y = resolve(args.y)
    print(fuse(ring, x, y).format())
    return PASS


def cmd_dims(args) -> int:
    ring, module = _resolve_any(args.path)
    if module is not None or ring.is_lazy:
        raise MalformedDocumentError("dims expects a finite ring document")
    try:
        dims = ring.dims if ring.dims is not None else frobenius_perron_dims(ring)
    except NoDimensionFunctionError as exc:
        print(f"no dimension function: {exc}")
        return NEGATIVE
    for label in ring.basis:
        print(f"{label}: {dims(label):.10g}")
    print(f"exactness: {dims.exactness}")
    return PASS


def _search_config(args, ring, config: dict) -> ModuleSearchConfig:
    max_size = getattr(args, "max_size", None)
    if max_size is None:
        max_size = config.get("max_size") or dimension_bound(ring)
    budget = getattr(args, "budget", None)
    if budget is None:
        budget = config.get("budget")
    return ModuleSearchConfig(
        max_basis_size=max_size,
        time_budget=budget,
        threads=None,  # picked up from FUSION_THREADS
    )


def cmd_enumerate(args) -> int:
    config = _load_config(args.config)
    ring, module = _resolve_any(args.path)
    if module is not None or ring.is_lazy:
        raise MalformedDocumentError("enumerate expects a finite ring document")
    search = _search_config(args, ring, config)
    result = enumerate_modules(ring, search)
    ring_doc = ring_to_document(ring)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, table in enumerate(result.classes):
            doc = module_to_document(table)
            doc["name"] = f"class_{i:03d}"
            doc["ring"] = ring_doc
            path = os.path.join(args.out, f"module_{i:03d}.json")
            write_document(path, doc)
            print(f"class {i:03d}: size={table.size} -> {path}")
    else:
        for i, table in enumerate(result.classes):
            print(f"class {i:03d}: size={table.size}")
    status = "complete" if result.complete else "inconclusive"
    print(f"classes={len(result.classes)} certified_bound={result.certified_bound} status={status}")
    return PASS if result.complete else INCONCLUSIVE


def cmd_torsion(args) -> int:
    config = _load_config(args.config)
    ring, module = _resolve_any(args.path)
    if module is not None or ring.is_lazy:
        raise MalformedDocumentError("torsion expects a finite ring document")
    search = _search_config(args, ring, config)
    verdict = is_torsion_free(ring, search)
    print(verdict.status)
    if args.out and verdict.witnesses:
        os.makedirs(args.out, exist_ok=True)
        ring_doc = ring_to_document(ring)
        for i, witness in enumerate(verdict.witnesses):
            doc = module_to_document(witness)
            doc["name"] = f"witness_{i:03d}"
            doc["ring"] = ring_doc
            path = os.path.join(args.out, f"witness_{i:03d}.json")
            write_document(path, doc)
            print(f"witness: {path}")
    elif verdict.witnesses:
        for witness in verdict.witnesses:
            print(f"witness: size={witness.size}")
    if verdict.status == "torsion_free_certified":
        return PASS
    if verdict.status == "not_torsion_free":
        return NEGATIVE
    return INCONCLUSIVE


def cmd_product(args) -> int:
    rings = []
    for source in args.paths:
        ring, module = _resolve_any(source)
        if module is not None:
            raise MalformedDocumentError("product expects ring documents")
        rings.append(ring)
    if args.tensor:
        if any(r.is_lazy for r in rings):
            raise MalformedDocumentError("tensor products require finite tables")
        from .constructors import tensor_product

        out = rings[0]
        for other in rings[1:]:
            out = tensor_product(out, other)
        doc = ring_to_document(out)
    else:
        doc = {
            "format": RING_FORMAT,
            "lazy": {
                "kind": "free_product",
                "factors": [ring_to_document(r) for r in rings],
            },
        }
    if args.out:
        write_document(args.out, doc)
        print(args.out)
    else:
        sys.stdout.write(emit_document(doc))
    return PASS


def cmd_graph(args) -> int:
    ring, module = _resolve_any(args.path)
    if module is None:
        if not args.standard:
            raise MalformedDocumentError("a ring document needs --standard to pick its module")
        module = standard_module(ring)
        if ring.is_lazy:
            module = module.truncate(args.depth)
    alpha = args.alpha
    if alpha == "unit":
        alpha = module.ring.unit
    dims = None
    if getattr(module, "dims", None) is not None:
        dims = module.dims
    elif not module.ring.is_lazy:
        try:
            ring_d = ring_dims(module.ring)
            from .modules import dim_vector

            vector = dim_vector(module, ring_d, module.basis[0])
            dims = vector
        except FusionError:
            dims = None
    graph = module_graph(module, alpha, dims=dims)
    text = export_dot(graph)
    if args.dot:
        directory = os.path.dirname(os.path.abspath(args.dot))
        os.makedirs(directory, exist_ok=True)
        with open(args.dot, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        print(args.dot)
    else:
        sys.stdout.write(text)
    verdict = dynkin_classify(symmetrize(graph))
    print(f"verdict: {verdict.describe()}")
    return PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusion",
        description="Exact computations with based rings, fusion rings and their modules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check the defining axioms of a ring or module document")
    p.add_argument("path")
    p.add_argument("--depth", type=int, default=None, help="level truncation for lazy rings")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("fuse", help="multiply two elements given as expressions")
    p.add_argument("path")
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(fn=cmd_fuse)

    p = sub.add_parser("dims", help="print the dimension function of a finite ring")
    p.add_argument("path")
    p.set_defaults(fn=cmd_dims)

    p = sub.add_parser("enumerate", help="enumerate connected based modules up to isomorphism")
    p.add_argument("path")
    p.add_argument("--max-size", dest="max_size", type=int, default=None)
    p.add_argument("--budget", type=float, default=None, help="time budget in seconds")
    p.add_argument("--out", default=None, help="directory for module documents")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("torsion", help="decide torsion-freeness of a finite fusion ring")
    p.add_argument("path")
    p.add_argument("--max-size", dest="max_size", type=int, default=None)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--out", default=None, help="directory for witness documents")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_torsion)

    p = sub.add_parser("product", help="emit a tensor or free product document")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tensor", action="store_true")
    group.add_argument("--free", action="store_true")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_product)

    p = sub.add_parser("graph", help="export a fusion graph as DOT and classify it")
    p.add_argument("path")
    p.add_argument("--alpha", required=True)
    p.add_argument("--standard", action="store_true", help="use the ring's standard module")
    p.add_argument("--depth", type=int, default=8, help="truncation depth for lazy rings")
    p.add_argument("--dot", default=None, help="output file")
    p.set_defaults(fn=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (MalformedDocumentError, UnknownLabelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except FusionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
