"""Half-edge graphs, harmonic morphisms, double covers and towers.

A graph is a finite set of vertices together with a finite set of
half-edges, a root map sending each half-edge to the vertex it is
attached to, and a fixed-point-free involution pairing half-edges into
edges.  Loops and parallel edges are allowed.  A "point" of a graph is
either a vertex or a half-edge; points are written as tagged pairs
``('v', id)`` / ``('h', id)``.

All objects are immutable values; every operation returns new objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class GraphError(ValueError):
    """Structurally invalid input (bad ids, non-composable maps, ...)."""


class PreconditionError(ValueError):
    """A named hypothesis of an operation is violated."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class NonGenericError(PreconditionError):
    """A dilation profile forbidden by a genericity hypothesis, naming the point."""

    def __init__(self, point, profile):
        super().__init__("generic", f"point {point} has dilation profile {profile}")
        self.point = point
        self.profile = profile


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    where: tuple
    message: str

    def __str__(self):
        return f"[{self.code}] at {self.where}: {self.message}"


def vpoint(v: int) -> tuple:
    return ("v", v)


def hpoint(h: int) -> tuple:
    return ("h", h)


@dataclass(frozen=True)
class Graph:
    """Immutable half-edge graph.

    vertices: vertex ids (any ints, kept sorted).
    root: half-edge id -> vertex id.
    partner: half-edge id -> half-edge id, the edge-pairing involution.
    """

    vertices: tuple
    root: dict
    partner: dict
    _tangent: dict = field(init=False, compare=False, repr=False, default=None)
    _edge_keys: tuple = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        tangent = {v: [] for v in self.vertices}
        for h in sorted(self.root):
            r = self.root[h]
            if r in tangent:
                tangent[r].append(h)
        object.__setattr__(self, "_tangent", {v: tuple(hs) for v, hs in tangent.items()})
        keys = tuple(sorted(h for h in self.partner if h <= self.partner[h] and h in self.root))
        object.__setattr__(self, "_edge_keys", keys)

    @property
    def half_edges(self) -> tuple:
        return tuple(sorted(self.root))

    def edge_keys(self) -> tuple:
        """Canonical edge ids: the smaller half-edge of each pair."""
        return self._edge_keys

    def edge_key(self, h: int) -> int:
        return min(h, self.partner[h])

    def edges(self) -> tuple:
        return tuple((k, self.partner[k]) for k in self._edge_keys)

    def tangent(self, v: int) -> tuple:
        """Half-edges rooted at v (a loop contributes both of its halves)."""
        return self._tangent[v]

    def valence(self, v: int) -> int:
        return len(self._tangent[v])

    def is_loop(self, key: int) -> bool:
        return self.root[key] == self.root[self.partner[key]]

    def edge_ends(self, key: int) -> tuple:
        """(tail, head) with the edge oriented out of its smaller half-edge."""
        return self.root[key], self.root[self.partner[key]]

    def points(self) -> tuple:
        return tuple(vpoint(v) for v in self.vertices) + tuple(hpoint(h) for h in self.half_edges)

    @classmethod
    def from_edges(cls, n_vertices, edge_list):
        """Build a graph from (tail, head) pairs; edge i gets half-edges 2i, 2i+1.

        n_vertices may be an int (vertices 0..n-1) or an explicit iterable.
        Returns (graph, edge_keys) with edge_keys[i] = 2i.
        """
        vertices = tuple(range(n_vertices)) if isinstance(n_vertices, int) else tuple(n_vertices)
        root, partner = {}, {}
        for i, (u, v) in enumerate(edge_list):
            a, b = 2 * i, 2 * i + 1
            root[a], root[b] = u, v
            partner[a], partner[b] = b, a
        return cls(vertices, root, partner), tuple(2 * i for i in range(len(edge_list)))


def validate_graph(g: Graph) -> list:
    """Check the half-edge graph axioms; one issue per violation."""
    issues = []
    vset = set(g.vertices)
    hset = set(g.root)
    for h in sorted(g.root):
        if g.root[h] not in vset:
            issues.append(ValidationIssue("root-missing", hpoint(h), f"root {g.root[h]} is not a vertex"))
    if set(g.partner) != hset:
        issues.append(ValidationIssue("partner-domain", (), "partner map domain differs from half-edge set"))
    for h in sorted(g.partner):
        p = g.partner[h]
        if p == h:
            issues.append(ValidationIssue("partner-fixed-point", hpoint(h), "fixed point of involution"))
        elif g.partner.get(p) != h:
            issues.append(ValidationIssue("partner-not-involution", hpoint(h), f"partner({p}) != {h}"))
    return issues


def connected_components(g: Graph) -> tuple:
    """Vertex partition into connected components, sorted by minimum vertex."""
    seen = {}
    comps = []
    for start in g.vertices:
        if start in seen:
            continue
        comp = set()
        stack = [start]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            for h in g.tangent(v):
                w = g.root[g.partner[h]]
                if w not in comp:
                    stack.append(w)
        for v in comp:
            seen[v] = True
        comps.append(frozenset(comp))
    return tuple(sorted(comps, key=min))


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1


def genus(g: Graph) -> int:
    """First Betti number |E| - |V| + 1 of a connected graph."""
    if not is_connected(g):
        raise PreconditionError("connected", "genus requires connected graph")
    return len(g.edge_keys()) - len(g.vertices) + 1


def is_tree(g: Graph) -> bool:
    return is_connected(g) and genus(g) == 0


@dataclass(frozen=True)
class GraphMorphism:
    """Vertex and half-edge maps commuting with root and partner."""

    source: Graph
    target: Graph
    vmap: dict
    hmap: dict

    def v(self, x):
        return self.vmap[x]

    def h(self, x):
        return self.hmap[x]

    def point(self, p):
        kind, i = p
        return (kind, self.vmap[i] if kind == "v" else self.hmap[i])


def validate_morphism(m: GraphMorphism) -> list:
    issues = []
    s, t = m.source, m.target
    for v in s.vertices:
        if m.vmap.get(v) not in set(t.vertices):
            issues.append(ValidationIssue("vmap", vpoint(v), "vertex image missing"))
    for h in s.half_edges:
        img = m.hmap.get(h)
        if img not in t.root:
            issues.append(ValidationIssue("hmap", hpoint(h), "half-edge image missing"))
            continue
        if m.vmap.get(s.root[h]) != t.root[img]:
            issues.append(ValidationIssue("root-commute", hpoint(h), "does not commute with root"))
        if m.hmap.get(s.partner[h]) != t.partner[img]:
            issues.append(ValidationIssue("partner-commute", hpoint(h), "does not commute with involution"))
    return issues


@dataclass(frozen=True)
class HarmonicMorphism:
    """Graph morphism with positive integer local degrees.

    vertex_degree: vertex id -> degree; half_edge_degree: half-edge id ->
    degree (equal on the two halves of an edge).
    """

    morphism: GraphMorphism
    vertex_degree: dict
    half_edge_degree: dict

    @property
    def source(self) -> Graph:
        return self.morphism.source

    @property
    def target(self) -> Graph:
        return self.morphism.target

    def v(self, x):
        return self.morphism.vmap[x]

    def h(self, x):
        return self.morphism.hmap[x]

    def deg_v(self, v) -> int:
        return self.vertex_degree[v]

    def deg_h(self, h) -> int:
        return self.half_edge_degree[h]

    def deg_edge(self, key) -> int:
        return self.half_edge_degree[key]

    def deg_point(self, p) -> int:
        kind, i = p
        return self.vertex_degree[i] if kind == "v" else self.half_edge_degree[i]

    def fiber_vertices(self, v) -> tuple:
        return tuple(x for x in self.source.vertices if self.morphism.vmap[x] == v)

    def fiber_half_edges(self, h) -> tuple:
        return tuple(x for x in self.source.half_edges if self.morphism.hmap[x] == h)

    def fiber_edges(self, key) -> tuple:
        """Source edge keys over a target edge key."""
        pair = {key, self.target.partner[key]}
        return tuple(k for k in self.source.edge_keys() if self.morphism.hmap[k] in pair)

    def global_degree(self) -> int:
        v0 = self.target.vertices[0]
        return sum(self.vertex_degree[x] for x in self.fiber_vertices(v0))

    def fiber_profile(self, p) -> tuple:
        """Sorted (descending) local degrees over a target point."""
        kind, i = p
        fib = self.fiber_vertices(i) if kind == "v" else self.fiber_half_edges(i)
        return tuple(sorted((self.deg_point((kind, x)) for x in fib), reverse=True))


def validate_harmonic(f: HarmonicMorphism) -> list:
    """Check edge-degree consistency and the local balancing equation.

    For a connected target additionally checks that fiber degree sums
    agree over all points (the global degree).
    """
    issues = list(validate_morphism(f.morphism))
    s, t = f.source, f.target
    for v in s.vertices:
        if f.vertex_degree.get(v, 0) < 1:
            issues.append(ValidationIssue("degree-positive", vpoint(v), "vertex degree must be >= 1"))
    for h in s.half_edges:
        if f.half_edge_degree.get(h, 0) < 1:
            issues.append(ValidationIssue("degree-positive", hpoint(h), "half-edge degree must be >= 1"))
        elif f.half_edge_degree[h] != f.half_edge_degree.get(s.partner[h], 0):
            issues.append(ValidationIssue("edge-degree", hpoint(h), "degrees differ on the two halves"))
    if issues:
        return issues
    for v in s.vertices:
        fv = f.v(v)
        for hprime in t.tangent(fv):
            total = sum(f.half_edge_degree[h] for h in s.tangent(v) if f.h(h) == hprime)
            if total != f.vertex_degree[v]:
                issues.append(ValidationIssue(
                    "local-harmonicity", (vpoint(v), hpoint(hprime)),
                    f"deg(v)={f.vertex_degree[v]} but half-edge degrees over it sum to {total}"))
    if not issues and is_connected(t):
        sums = {}
        for v in t.vertices:
            sums[vpoint(v)] = sum(f.vertex_degree[x] for x in f.fiber_vertices(v))
        for h in t.half_edges:
            sums[hpoint(h)] = sum(f.half_edge_degree[x] for x in f.fiber_half_edges(h))
        values = set(sums.values())
        if len(values) > 1:
            for p, d in sorted(sums.items()):
                issues.append(ValidationIssue("global-degree", p, f"fiber degree sum {d} not constant"))
    return issues


def identity_harmonic(g: Graph) -> HarmonicMorphism:
    return HarmonicMorphism(
        GraphMorphism(g, g, {v: v for v in g.vertices}, {h: h for h in g.half_edges}),
        {v: 1 for v in g.vertices}, {h: 1 for h in g.half_edges})


def compose_harmonic(f: HarmonicMorphism, g: HarmonicMorphism) -> HarmonicMorphism:
    """g after f, with local degrees multiplying pointwise."""
    if f.target != g.source:
        raise GraphError("compose_harmonic: target of first morphism is not source of second")
    vmap = {v: g.v(f.v(v)) for v in f.source.vertices}
    hmap = {h: g.h(f.h(h)) for h in f.source.half_edges}
    vd = {v: f.vertex_degree[v] * g.vertex_degree[f.v(v)] for v in f.source.vertices}
    hd = {h: f.half_edge_degree[h] * g.half_edge_degree[f.h(h)] for h in f.source.half_edges}
    return HarmonicMorphism(GraphMorphism(f.source, g.target, vmap, hmap), vd, hd)


@dataclass(frozen=True)
class DoubleCover:
    """Harmonic morphism of global degree 2 with its sheet-swap involution.

    A target point is free (two degree-1 preimages, swapped) or dilated
    (one degree-2 preimage, fixed).
    """

    cover: HarmonicMorphism
    vertex_invol: dict
    half_edge_invol: dict
    dilated_vertices: frozenset
    dilated_edge_keys: frozenset

    @property
    def source(self) -> Graph:
        return self.cover.source

    @property
    def target(self) -> Graph:
        return self.cover.target

    def is_free(self) -> bool:
        return not self.dilated_vertices and not self.dilated_edge_keys

    def is_point_dilated(self, p) -> bool:
        kind, i = p
        if kind == "v":
            return i in self.dilated_vertices
        return self.target.edge_key(i) in self.dilated_edge_keys

    def invol_point(self, p):
        kind, i = p
        return (kind, self.vertex_invol[i] if kind == "v" else self.half_edge_invol[i])

    @classmethod
    def from_harmonic(cls, f: HarmonicMorphism) -> "DoubleCover":
        issues = validate_harmonic(f)
        if issues:
            raise GraphError(f"double cover is not harmonic: {issues[0]}")
        if f.global_degree() != 2:
            raise GraphError(f"double cover must have global degree 2, got {f.global_degree()}")
        vinv, dil_v = {}, set()
        for v in f.target.vertices:
            fib = f.fiber_vertices(v)
            if len(fib) == 1:
                vinv[fib[0]] = fib[0]
                dil_v.add(v)
            else:
                a, b = fib
                vinv[a], vinv[b] = b, a
        hinv, dil_e = {}, set()
        for h in f.target.half_edges:
            fib = f.fiber_half_edges(h)
            if len(fib) == 1:
                hinv[fib[0]] = fib[0]
                dil_e.add(f.target.edge_key(h))
            else:
                a, b = fib
                hinv[a], hinv[b] = b, a
        cov = cls(f, vinv, hinv, frozenset(dil_v), frozenset(dil_e))
        cov._check_involution()
        return cov

    def _check_involution(self):
        s = self.source
        for h in s.half_edges:
            i = self.half_edge_invol[h]
            if self.vertex_invol[s.root[h]] != s.root[i]:
                raise GraphError("double cover involution does not commute with root")
            if self.half_edge_invol[s.partner[h]] != s.partner[i]:
                raise GraphError("double cover involution does not commute with partner")


@dataclass(frozen=True)
class Tower:
    """A double cover followed by a degree-n harmonic morphism onto a base."""

    pi: DoubleCover
    f: HarmonicMorphism

    def __post_init__(self):
        if self.pi.target != self.f.source:
            raise GraphError("tower: target of double cover is not source of base map")

    @property
    def top(self) -> Graph:
        return self.pi.source

    @property
    def mid(self) -> Graph:
        return self.f.source

    @property
    def base(self) -> Graph:
        return self.f.target

    def composed(self) -> HarmonicMorphism:
        return compose_harmonic(self.pi.cover, self.f)

    def degree(self) -> int:
        return self.f.global_degree()


def validate_tower(t: Tower, require_tree_base=False) -> list:
    issues = validate_harmonic(t.pi.cover) + validate_harmonic(t.f)
    if require_tree_base and not is_tree(t.base):
        issues.append(ValidationIssue("tree-base", (), "base graph is not a tree"))
    return issues


@dataclass(frozen=True)
class DilationData:
    """Dilation subgraph of a double cover's target and its lattice invariants."""

    dilated_vertices: frozenset
    dilated_edge_keys: frozenset
    m_d: int
    n_d: int
    components: int
    A: int
    B: int
    C: int


def dilation_data(c: DoubleCover) -> DilationData:
    """Count the dilation subgraph; A and B control the Prym polarization type.

    For a free cover the convention A = g(target) - 1, B = C = 0 applies.
    """
    if c.cover.global_degree() != 2:
        raise GraphError("dilation_data requires a cover of global degree 2")
    if not is_connected(c.source):
        raise PreconditionError("connected", "dilation_data requires connected source")
    t = c.target
    g_t = genus(t)
    g_s = genus(c.source)
    dil_v = set(c.dilated_vertices)
    dil_e = set(c.dilated_edge_keys)
    if not dil_v and not dil_e:
        return DilationData(frozenset(), frozenset(), 0, 0, 0, g_t - 1, 0, 0)
    m_d, n_d = len(dil_e), len(dil_v)
    parent = {v: v for v in dil_v}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in sorted(dil_e):
        u, v = t.edge_ends(k)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    d = len({find(v) for v in dil_v})
    A = g_t - m_d + n_d - d
    B = d - 1
    C = m_d - n_d + d
    if A + B != g_s - g_t:
        raise GraphError(f"dilation invariants inconsistent: A+B={A + B} but g difference is {g_s - g_t}")
    return DilationData(frozenset(dil_v), frozenset(dil_e), m_d, n_d, d, A, B, C)


@dataclass(frozen=True)
class Contraction:
    morphism: HarmonicMorphism
    source_vertex_map: dict
    target_vertex_map: dict


def contract_edge(f: HarmonicMorphism, key: int) -> Contraction:
    """Contract a target edge and every source edge above it.

    Each connected component of the preimage of the edge (with its two
    endpoints) collapses to one vertex whose degree is the degree of the
    restriction of f to that component.
    """
    t = f.target
    if key not in t.edge_keys():
        raise GraphError(f"{key} is not an edge key of the target")
    u, v = t.edge_ends(key)
    w = min(u, v)
    t_vmap = {x: (w if x in (u, v) else x) for x in t.vertices}
    dead_t = {key, t.partner[key]}
    new_t = Graph(tuple(sorted(set(t_vmap.values()))),
                  {h: t_vmap[t.root[h]] for h in t.half_edges if h not in dead_t},
                  {h: t.partner[h] for h in t.half_edges if h not in dead_t})

    s = f.source
    fiber_keys = set(f.fiber_edges(key))
    fiber_halves = set()
    for k in fiber_keys:
        fiber_halves.add(k)
        fiber_halves.add(s.partner[k])
    # components of the preimage of {u, v, e}
    end_vertices = sorted(x for x in s.vertices if f.v(x) in (u, v))
    parent = {x: x for x in end_vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in sorted(fiber_keys):
        a, b = s.edge_ends(k)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for x in end_vertices:
        groups.setdefault(find(x), []).append(x)
    s_vmap = {x: x for x in s.vertices}
    new_vd = dict(f.vertex_degree)
    for members in groups.values():
        rep = min(members)
        over_u = [x for x in members if f.v(x) == u]
        deg = sum(f.vertex_degree[x] for x in over_u)
        if deg == 0:  # e is a loop at u=v; the restriction degree is the sum over u
            deg = sum(f.vertex_degree[x] for x in members)
        for x in members:
            s_vmap[x] = rep
            new_vd.pop(x, None)
        new_vd[rep] = deg
    new_s = Graph(tuple(sorted(set(s_vmap.values()))),
                  {h: s_vmap[s.root[h]] for h in s.half_edges if h not in fiber_halves},
                  {h: s.partner[h] for h in s.half_edges if h not in fiber_halves})
    new_f = HarmonicMorphism(
        GraphMorphism(new_s, new_t,
                      {x: t_vmap[f.v(x)] for x in new_s.vertices},
                      {h: f.h(h) for h in new_s.half_edges}),
        {x: new_vd[x] for x in new_s.vertices},
        {h: f.half_edge_degree[h] for h in new_s.half_edges})
    issues = validate_harmonic(new_f)
    if issues:
        raise GraphError(f"contraction produced a non-harmonic morphism: {issues[0]}")
    return Contraction(new_f, s_vmap, t_vmap)


@dataclass(frozen=True)
class SpanningTree:
    root_vertex: int
    tree_keys: frozenset
    complement_keys: tuple
    up_half: dict  # child vertex -> half-edge rooted at the child, leading to its parent


def spanning_tree(g: Graph) -> SpanningTree:
    """Deterministic BFS spanning tree from the smallest vertex id.

    Complementary edges are returned sorted by edge key; there are
    exactly genus(g) of them.
    """
    if not g.vertices:
        raise PreconditionError("connected", "spanning tree of the empty graph")
    if not is_connected(g):
        raise PreconditionError("connected", "spanning tree requires connected graph")
    start = g.vertices[0]
    visited = {start}
    up_half = {}
    tree = set()
    queue = [start]
    while queue:
        v = queue.pop(0)
        for h in g.tangent(v):
            w = g.root[g.partner[h]]
            if w not in visited:
                visited.add(w)
                tree.add(g.edge_key(h))
                up_half[w] = g.partner[h]
                queue.append(w)
    comp = tuple(k for k in g.edge_keys() if k not in tree)
    return SpanningTree(start, frozenset(tree), comp, up_half)


def path_from_root(g: Graph, tree: SpanningTree, v: int) -> dict:
    """Edge chain from the tree root to v (boundary v - root)."""
    chain = {}
    while v != tree.root_vertex:
        h = tree.up_half[v]
        k = g.edge_key(h)
        sign = 1 if h == k else -1  # traversing v -> parent
        chain[k] = chain.get(k, 0) - sign
        v = g.root[g.partner[h]]
    return {k: c for k, c in chain.items() if c}


def fundamental_cycles(g: Graph, tree: SpanningTree) -> tuple:
    """One cycle per complementary edge, as edge-key coefficient dicts.

    Each cycle traverses its complementary edge once in the canonical
    orientation and returns through the tree.
    """
    cycles = []
    for k in tree.complement_keys:
        tail, head = g.edge_ends(k)
        chain = {k: 1}
        for kk, c in path_from_root(g, tree, tail).items():
            chain[kk] = chain.get(kk, 0) + c
        for kk, c in path_from_root(g, tree, head).items():
            chain[kk] = chain.get(kk, 0) - c
        cycles.append({kk: c for kk, c in sorted(chain.items()) if c})
    return tuple(cycles)


def chain_boundary(g: Graph, chain: dict) -> dict:
    bd = {}
    for k, c in chain.items():
        tail, head = g.edge_ends(k)
        bd[head] = bd.get(head, 0) + c
        bd[tail] = bd.get(tail, 0) - c
    return {v: c for v, c in bd.items() if c}


def _fiber_signature(f: HarmonicMorphism):
    sig = {}
    for v in f.target.vertices:
        sig[vpoint(v)] = tuple(sorted(f.vertex_degree[x] for x in f.fiber_vertices(v)))
    for h in f.target.half_edges:
        sig[hpoint(h)] = tuple(sorted(f.half_edge_degree[x] for x in f.fiber_half_edges(h)))
    return sig


def iter_cover_isomorphisms(f1: HarmonicMorphism, f2: HarmonicMorphism):
    """All degree-preserving isomorphisms phi with f2 . phi = f1.

    Fiberwise backtracking over half-edges; fibers are tiny so the naive
    search is ample.  Yields (vmap, hmap) pairs.
    """
    if f1.target != f2.target:
        raise GraphError("cover isomorphism requires identical target graphs")
    if _fiber_signature(f1) != _fiber_signature(f2):
        return
    s1, s2 = f1.source, f2.source
    halves1 = sorted(s1.half_edges, key=lambda h: (f1.h(h), h))
    fibers2 = {}
    for h in s2.half_edges:
        fibers2.setdefault(f2.h(h), []).append(h)

    def backtrack(i, vmap, hmap, used_v, used_h):
        if i == len(halves1):
            yield from finish(vmap, hmap)
            return
        h1 = halves1[i]
        r1 = s1.root[h1]
        p1 = s1.partner[h1]
        for h2 in fibers2.get(f1.h(h1), ()):
            if h2 in used_h or f2.deg_h(h2) != f1.deg_h(h1):
                continue
            r2 = s2.root[h2]
            new_v = None
            if r1 in vmap:
                if vmap[r1] != r2:
                    continue
            else:
                if r2 in used_v or f2.deg_v(r2) != f1.deg_v(r1):
                    continue
                new_v = (r1, r2)
            if p1 in hmap and s2.partner[h2] != hmap[p1]:
                continue
            hmap[h1] = h2
            used_h.add(h2)
            if new_v:
                vmap[r1] = r2
                used_v.add(r2)
            yield from backtrack(i + 1, vmap, hmap, used_v, used_h)
            del hmap[h1]
            used_h.discard(h2)
            if new_v:
                del vmap[r1]
                used_v.discard(r2)

    def finish(vmap, hmap):
        # isolated vertices: match within (target vertex, degree) classes
        left = [v for v in s1.vertices if v not in vmap]
        if not left:
            yield dict(vmap), dict(hmap)
            return
        used = set(vmap.values())
        classes = {}
        for v in left:
            classes.setdefault((f1.v(v), f1.deg_v(v)), []).append(v)
        pools = []
        for key, vs in sorted(classes.items()):
            tgt = [x for x in s2.vertices if (f2.v(x), f2.deg_v(x)) == key and x not in used]
            if len(tgt) != len(vs):
                return
            pools.append((vs, tgt))
        for assignment in itertools.product(*[itertools.permutations(t) for _, t in pools]):
            full = dict(vmap)
            for (vs, _), perm in zip(pools, assignment):
                for v, x in zip(vs, perm):
                    full[v] = x
            yield full, dict(hmap)

    yield from backtrack(0, {}, {}, set(), set())


def covers_isomorphic_over_base(f1: HarmonicMorphism, f2: HarmonicMorphism):
    """First source isomorphism commuting with the maps and degrees, or None."""
    for vmap, hmap in iter_cover_isomorphisms(f1, f2):
        _check_cover_iso(f1, f2, vmap, hmap)
        return vmap, hmap
    return None


def _check_cover_iso(f1, f2, vmap, hmap):
    s1 = f1.source
    assert sorted(vmap) == list(s1.vertices) and sorted(vmap.values()) == list(f2.source.vertices)
    for v in s1.vertices:
        assert f2.v(vmap[v]) == f1.v(v) and f2.deg_v(vmap[v]) == f1.deg_v(v)
    for h in s1.half_edges:
        assert f2.h(hmap[h]) == f1.h(h) and f2.deg_h(hmap[h]) == f1.deg_h(h)
        assert hmap[s1.partner[h]] == f2.source.partner[hmap[h]]
        assert vmap[s1.root[h]] == f2.source.root[hmap[h]]


def transport_cover(pi: HarmonicMorphism, vmap: dict, hmap: dict, new_target: Graph) -> HarmonicMorphism:
    """Relabel the target of pi through an isomorphism onto new_target."""
    return HarmonicMorphism(
        GraphMorphism(pi.source, new_target,
                      {x: vmap[pi.v(x)] for x in pi.source.vertices},
                      {h: hmap[pi.h(h)] for h in pi.source.half_edges}),
        dict(pi.vertex_degree), dict(pi.half_edge_degree))


def towers_isomorphic(t1: Tower, t2: Tower):
    """Simultaneous isomorphism at both levels commuting with the maps, or None."""
    if t1.base != t2.base:
        raise GraphError("tower isomorphism requires identical base graphs")
    for vmap, hmap in iter_cover_isomorphisms(t1.f, t2.f):
        moved = transport_cover(t1.pi.cover, vmap, hmap, t2.mid)
        found = covers_isomorphic_over_base(moved, t2.pi.cover)
        if found is not None:
            return (vmap, hmap), found
    return None


@dataclass(frozen=True)
class BuiltDoubleCover:
    """Explicit double cover with the id bookkeeping of its construction.

    vertex_ids / half_ids map (downstairs id, sheet) to the upstairs id;
    dilated points only carry sheet 0.
    """

    cover: DoubleCover
    vertex_ids: dict
    half_ids: dict

    def lift_edge_key(self, key: int, sheet: int) -> int:
        g = self.cover.target
        a = self.half_ids[(key, sheet)]
        b = self.half_ids[(g.partner[key], sheet)]
        return min(a, b)


def build_double_cover(g: Graph, dilated_vertices=(), dilated_edge_keys=(),
                       bits=None) -> BuiltDoubleCover:
    """Double cover of g with prescribed dilation and monodromy.

    Free points get two sheet-labeled preimages; a half-edge h of a free
    edge attaches its sheet-s lift to sheet s xor bits[h] of its root
    (bits default 0).  Dilated edges must end at dilated vertices.
    """
    dil_v = set(dilated_vertices)
    dil_e = set(dilated_edge_keys)
    bits = dict(bits or {})
    for k in dil_e:
        for end in g.edge_ends(k):
            if end not in dil_v:
                raise GraphError(f"dilated edge {k} has a free endpoint {end}")
    vertex_ids = {}
    for v in g.vertices:
        for s in ((0,) if v in dil_v else (0, 1)):
            vertex_ids[(v, s)] = len(vertex_ids)
    half_ids = {}
    for h in g.half_edges:
        for s in ((0,) if g.edge_key(h) in dil_e else (0, 1)):
            half_ids[(h, s)] = len(half_ids)
    root, partner, hmap = {}, {}, {}
    for (h, s), i in half_ids.items():
        r = g.root[h]
        if r in dil_v:
            root[i] = vertex_ids[(r, 0)]
        else:
            root[i] = vertex_ids[(r, s ^ bits.get(h, 0))]
        partner[i] = half_ids[(g.partner[h], s)]
        hmap[i] = h
    source = Graph(tuple(range(len(vertex_ids))), root, partner)
    vdeg = {i: 2 if v in dil_v else 1 for (v, s), i in vertex_ids.items()}
    hdeg = {i: 2 if g.edge_key(h) in dil_e else 1 for (h, s), i in half_ids.items()}
    vmap = {i: v for (v, s), i in vertex_ids.items()}
    cover = DoubleCover.from_harmonic(
        HarmonicMorphism(GraphMorphism(source, g, vmap, hmap), vdeg, hdeg))
    return BuiltDoubleCover(cover, vertex_ids, half_ids)


def harmonic_from_edges(n_vertices, edge_spec, target: Graph, vmap: dict) -> HarmonicMorphism:
    """Harmonic morphism from an edge list (tail, head, target_edge_key, degree).

    Half-edges 2i, 2i+1 of edge i map onto the target halves matching the
    vertex map; vertex degrees are derived from local harmonicity.
    """
    graph, keys = Graph.from_edges(n_vertices, [(u, v) for (u, v, _k, _d) in edge_spec])
    hmap, hdeg = {}, {}
    for i, (u, v, k, d) in enumerate(edge_spec):
        ends = (target.root[k], target.root[target.partner[k]])
        if (vmap[u], vmap[v]) == ends:
            hmap[2 * i], hmap[2 * i + 1] = k, target.partner[k]
        elif (vmap[v], vmap[u]) == ends:
            hmap[2 * i], hmap[2 * i + 1] = target.partner[k], k
        else:
            raise GraphError(f"edge {i} does not lie over target edge {k}")
        hdeg[2 * i] = hdeg[2 * i + 1] = d
    vdeg = {}
    for v in graph.vertices:
        if not graph.tangent(v):
            raise GraphError(f"vertex {v} is isolated; cannot derive its degree")
        h = graph.tangent(v)[0]
        target_half = hmap[h]
        vdeg[v] = sum(hdeg[x] for x in graph.tangent(v) if hmap[x] == target_half)
    out = HarmonicMorphism(GraphMorphism(graph, target, dict(vmap), hmap), vdeg, hdeg)
    issues = validate_harmonic(out)
    if issues:
        raise GraphError(f"edge spec is not harmonic: {issues[0]}")
    return out
