"""Command line interface.

Subcommands: validate, construct, classify, jacobian, prym, check,
random, export-dot, compare.  Exit codes: 0 pass, 1 fail, 2 usage.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .graphs import (PreconditionError, is_tree, towers_isomorphic,
                     validate_graph, validate_harmonic)
from .jacprym import (check_bigonal_duality, check_trigonal_prym, jacobian,
                      prym, tower_metrics)
from .metrics import format_length, induce_metric, validate_metric
from .ngonal import (bigonal, classify_bigonal_point, classify_tetragonal_point,
                     ngonal_construct, recillas, tetragonal_split, trigonal)
from .randgen import random_tower
from .towerio import file_to_doc, load, provenance_meta, save, tower_to_doc


def _format_matrix(m) -> str:
    if not m:
        return "  (empty)"
    cells = [[str(Fraction(x)) for x in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    return "\n".join("  [ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)


def cmd_validate(args) -> int:
    loaded = load(args.path)
    issues = list(validate_graph(loaded.base)) + list(validate_metric(loaded.base_metric))
    for i, level in enumerate(loaded.levels):
        issues += [f"level{i}: {x}" for x in validate_graph(level.source)]
        issues += [f"level{i}: {x}" for x in validate_harmonic(level)]
    metric = loaded.base_metric
    for i, level in enumerate(loaded.levels):
        metric = induce_metric(level, metric)
    if issues:
        for issue in issues:
            print(issue)
        return 1
    print(f"OK: base tree={is_tree(loaded.base)}, levels={len(loaded.levels)}, "
          f"degrees={[f.global_degree() for f in loaded.levels]}")
    return 0


def cmd_construct(args) -> int:
    loaded = load(args.path)
    out = args.out or (args.path + f".{args.op}.json")
    if args.op == "bigonal":
        result = bigonal(loaded.tower())
        doc = tower_to_doc(result.tower, loaded.base_metric,
                           meta={"construction": "bigonal",
                                 "points": provenance_meta(result.construction)})
        save(out, doc)
    elif args.op == "trigonal":
        result = trigonal(loaded.tower())
        doc = file_to_doc(loaded.base_metric, [result.quartic],
                          meta={"construction": "trigonal"})
        save(out, doc)
    elif args.op == "recillas":
        result = recillas(loaded.top_cover())
        doc = tower_to_doc(result.tower, loaded.base_metric, meta={"construction": "recillas"})
        save(out, doc)
    elif args.op == "tetragonal-split":
        result = tetragonal_split(loaded.tower())
        for i, tower in enumerate(result.towers, start=1):
            path = out.replace(".json", f".{i}.json") if out.endswith(".json") else f"{out}.{i}"
            save(path, tower_to_doc(tower, loaded.base_metric,
                                    meta={"construction": f"tetragonal-split {i}"}))
            print(f"wrote {path}")
        return 0
    else:  # ngonal
        cons = ngonal_construct(loaded.tower(), args.n)
        doc = file_to_doc(loaded.base_metric, [cons.cover_to_base],
                          meta={"construction": f"ngonal n={args.n}",
                                "points": provenance_meta(cons)})
        save(out, doc)
    print(f"wrote {out}")
    return 0


def cmd_classify(args) -> int:
    loaded = load(args.path)
    if len(loaded.levels) == 2 and loaded.levels[0].global_degree() == 2:
        tower = loaded.tower()
        print("point\ttype (hyperelliptic tower: I-V)")
        for p in loaded.base.points():
            print(f"{p}\t{classify_bigonal_point(tower, p)}")
        return 0
    cover = loaded.top_cover()
    if cover.global_degree() != 4:
        print("classification needs a (2,2) tower or a degree-4 cover", file=sys.stderr)
        return 2
    print("point\ttype (quartic cover: A-C)")
    for p in loaded.base.points():
        print(f"{p}\t{classify_tetragonal_point(cover, p)}")
    return 0


def cmd_jacobian(args) -> int:
    loaded = load(args.path)
    metric = loaded.base_metric
    for level in loaded.levels:
        metric = induce_metric(level, metric)
    jac = jacobian(metric)
    print(f"genus {jac.basis.rank}; Gram matrix of the top curve's Jacobian:")
    print(_format_matrix(jac.torus.pairing))
    return 0


def cmd_prym(args) -> int:
    loaded = load(args.path)
    tower = loaded.tower()
    mid, top = tower_metrics(tower, loaded.base_metric)
    data = prym(tower.pi, top, mid)
    print(f"rank {data.rank}; polarization type {data.type}")
    print("pairing [coker basis x kernel basis]:")
    print(_format_matrix(data.torus.pairing))
    print("principal model Gram:")
    print(_format_matrix(data.principal.polarized.gram()))
    return 0


def cmd_check(args) -> int:
    loaded = load(args.path)
    tower = loaded.tower()
    if args.theorem == "bigonal":
        result = check_bigonal_duality(tower, loaded.base_metric)
        print("pairing table (input tower):")
        print(_format_matrix(result.details.get("pairing", ())))
        print("dual pairing table (constructed tower):")
        print(_format_matrix(result.details.get("dual_pairing", ())))
    else:
        result = check_trigonal_prym(tower, loaded.base_metric)
        print("Prym principal Gram:")
        print(_format_matrix(result.details["prym_gram"]))
        print("Jacobian Gram of the constructed quartic curve:")
        print(_format_matrix(result.details["jacobian_gram"]))
    if result.passed:
        a, b = result.witness
        print("witness (pull):")
        print(_format_matrix(a))
        print("witness (push):")
        print(_format_matrix(b))
        print("PASS")
        return 0
    print(f"FAIL: {result.details.get('reason', 'no isometry found')}")
    return 1


def cmd_random(args) -> int:
    lo, hi = (int(x) for x in args.tree_size.split(","))
    llo, lhi = (int(x) for x in args.length_range.split(","))
    pi_free = True if args.pi_free else (False if args.pi_dilated else None)
    gen = random_tower(args.seed, n=args.n, tree_size=(lo, hi),
                       dilation_probability=Fraction(args.dilation),
                       length_range=(llo, lhi), pi_free=pi_free,
                       generic=args.generic, connected=not args.allow_disconnected)
    save(args.out, tower_to_doc(gen.tower, gen.base_metric,
                                meta={"seed": args.seed, "n": args.n}))
    print(f"wrote {args.out}")
    return 0


def cmd_export_dot(args) -> int:
    loaded = load(args.path)
    lines = ["digraph tower {", "  edge [dir=none];"]
    lines.append("  subgraph cluster_base {")
    lines.append('    label="base";')
    for v in loaded.base.vertices:
        lines.append(f'    base_{v} [label="{v}"];')
    for k in loaded.base.edge_keys():
        u, v = loaded.base.edge_ends(k)
        length = format_length(loaded.base_metric.length[k])
        lines.append(f'    base_{u} -> base_{v} [label="len {length}"];')
    lines.append("  }")
    prefix = "base"
    metric = loaded.base_metric
    for i, level in enumerate(loaded.levels):
        metric = induce_metric(level, metric)
        name = f"level{i}"
        lines.append(f"  subgraph cluster_{name} {{")
        lines.append(f'    label="{name} (degree {level.global_degree()})";')
        for v in level.source.vertices:
            d = level.vertex_degree[v]
            shape = ", penwidth=2" if d > 1 else ""
            lines.append(f'    {name}_{v} [label="{v} (d={d})"{shape}];')
        for k in level.source.edge_keys():
            u, v = level.source.edge_ends(k)
            d = level.half_edge_degree[k]
            length = format_length(metric.length[k])
            pen = ", penwidth=2" if d > 1 else ""
            lines.append(f'    {name}_{u} -> {name}_{v} [label="d={d}, len {length}"{pen}];')
        lines.append("  }")
        for v in sorted(level.source.vertices):
            lines.append(f"  {name}_{v} -> {prefix}_{level.v(v)} [style=dashed, dir=forward, constraint=false];")
        prefix = name
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_compare(args) -> int:
    first, second = load(args.path), load(args.other)
    if len(first.levels) == 2 and len(second.levels) == 2:
        found = towers_isomorphic(first.tower(), second.tower())
    else:
        from .graphs import covers_isomorphic_over_base
        found = covers_isomorphic_over_base(first.top_cover(), second.top_cover())
    if found is not None:
        print("isomorphic")
        return 0
    print("not isomorphic")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropcover",
        description="Exact constructions on harmonic covers of metric graphs: "
                    "degree-n section covers, Jacobians, norm-kernel tori and "
                    "their duality/isomorphism checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a tower file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("construct", help="run a construction on a tower file")
    p.add_argument("path")
    p.add_argument("--op", required=True,
                   choices=["bigonal", "trigonal", "recillas", "tetragonal-split", "ngonal"])
    p.add_argument("--n", type=int, default=2, help="degree for --op ngonal")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify", help="per-point fiber type table")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("jacobian", help="Gram matrix of the top curve's Jacobian")
    p.add_argument("path")
    p.set_defaults(func=cmd_jacobian)

    p = sub.add_parser("prym", help="norm-kernel pairing and polarization type")
    p.add_argument("path")
    p.set_defaults(func=cmd_prym)

    p = sub.add_parser("check", help="run a duality/isomorphism theorem check")
    p.add_argument("path")
    p.add_argument("--theorem", required=True, choices=["bigonal", "trigonal"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("random", help="generate a seeded random tower")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True, choices=[2, 3, 4])
    p.add_argument("--out", required=True)
    p.add_argument("--tree-size", default="2,5")
    p.add_argument("--dilation", default="1/3")
    p.add_argument("--length-range", default="1,6")
    p.add_argument("--pi-free", action="store_true")
    p.add_argument("--pi-dilated", action="store_true")
    p.add_argument("--generic", action="store_true")
    p.add_argument("--allow-disconnected", action="store_true")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("export-dot", help="DOT rendering with dilation as edge labels")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("compare", help="isomorphism of two files over the same base")
    p.add_argument("path")
    p.add_argument("other")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"precondition violated [{exc.condition}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
