"""Canonical JSON serialization of towers of harmonic morphisms.

A file holds a metric base graph and an ordered list of covers, each a
harmonic morphism onto the previous level.  All ids are integers, all
lengths are exact strings ("p/q" or "inf"), key order and id order are
canonical, so serialize(parse(text)) == text for canonical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graphs import (DoubleCover, Graph, GraphError, GraphMorphism,
                     HarmonicMorphism, Tower)
from .metrics import MetricGraph, format_length, parse_length


def _int_key_map(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def _parse_int_map(d: dict) -> dict:
    return {int(k): v for k, v in d.items()}


def graph_to_doc(g: Graph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [[k, g.partner[k]] for k in g.edge_keys()],
        "root": _int_key_map(g.root),
    }


def graph_from_doc(doc: dict) -> Graph:
    root = _parse_int_map(doc["root"])
    partner = {}
    for a, b in doc["edges"]:
        partner[a], partner[b] = b, a
    return Graph(tuple(doc["vertices"]), root, partner)


def level_to_doc(f: HarmonicMorphism, label: str) -> dict:
    g = f.source
    return {
        "label": label,
        "vertices": list(g.vertices),
        "half_edges": list(g.half_edges),
        "root": _int_key_map(g.root),
        "partner": _int_key_map(g.partner),
        "vmap": _int_key_map(f.morphism.vmap),
        "hmap": _int_key_map(f.morphism.hmap),
        "vertex_degree": _int_key_map(f.vertex_degree),
        "half_edge_degree": _int_key_map(f.half_edge_degree),
    }


def level_from_doc(doc: dict, target: Graph) -> HarmonicMorphism:
    g = Graph(tuple(doc["vertices"]), _parse_int_map(doc["root"]), _parse_int_map(doc["partner"]))
    return HarmonicMorphism(
        GraphMorphism(g, target, _parse_int_map(doc["vmap"]), _parse_int_map(doc["hmap"])),
        _parse_int_map(doc["vertex_degree"]),
        _parse_int_map(doc["half_edge_degree"]))


@dataclass(frozen=True)
class LoadedFile:
    base_metric: MetricGraph
    levels: tuple  # HarmonicMorphism, bottom first
    meta: dict

    @property
    def base(self) -> Graph:
        return self.base_metric.graph

    def top_cover(self) -> HarmonicMorphism:
        if not self.levels:
            raise GraphError("file has no cover levels")
        return self.levels[-1]

    def tower(self) -> Tower:
        if len(self.levels) != 2:
            raise GraphError(f"a tower file needs exactly 2 levels, found {len(self.levels)}")
        return Tower(DoubleCover.from_harmonic(self.levels[1]), self.levels[0])


def file_to_doc(base_metric: MetricGraph, levels, meta=None) -> dict:
    doc = {
        "base": dict(graph_to_doc(base_metric.graph),
                     lengths={str(k): format_length(v)
                              for k, v in sorted(base_metric.length.items())}),
        "levels": [level_to_doc(f, f"level{i}") for i, f in enumerate(levels)],
        "meta": meta or {},
    }
    return doc


def doc_to_file(doc: dict) -> LoadedFile:
    base = graph_from_doc(doc["base"])
    lengths = {int(k): parse_length(v) for k, v in doc["base"].get("lengths", {}).items()}
    metric = MetricGraph(base, lengths)
    levels = []
    target = base
    for level_doc in doc.get("levels", []):
        f = level_from_doc(level_doc, target)
        levels.append(f)
        target = f.source
    return LoadedFile(metric, tuple(levels), doc.get("meta", {}))


def tower_to_doc(tower: Tower, base_metric: MetricGraph, meta=None) -> dict:
    return file_to_doc(base_metric, [tower.f, tower.pi.cover], meta)


def dumps_canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def save(path, doc: dict):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(doc))


def load(path) -> LoadedFile:
    with open(path, "r", encoding="utf-8") as fh:
        return doc_to_file(json.load(fh))


def multisection_label(ms) -> str:
    return "+".join(f"{plus}(+{pid})+{minus}(-{pid})" for (pid, plus, minus) in ms)


def provenance_meta(construction) -> dict:
    """Per-point multisection annotations of a constructed cover."""
    return {
        "vertices": {str(i): {"over": v, "multisection": multisection_label(ms)}
                     for i, (v, ms) in sorted(construction.vertex_info.items())},
        "half_edges": {str(i): {"over": h, "multisection": multisection_label(ms)}
                       for i, (h, ms) in sorted(construction.half_edge_info.items())},
    }
