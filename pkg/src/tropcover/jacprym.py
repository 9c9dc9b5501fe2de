"""Cycle bases, Jacobians, transfer maps, Prym varieties, theorem checks.

Homology classes of a graph are edge-coefficient dicts over the
canonical edge orientation (out of the smaller half-edge).  The Jacobian
pairs cycles through exact edge lengths; the Prym variety of a double
cover is the identity component of the norm kernel with its induced
polarization and its canonical principal rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import intlinalg as la
from .graphs import (DoubleCover, Graph, GraphError, GraphMorphism,
                     HarmonicMorphism, PreconditionError, SpanningTree, Tower,
                     chain_boundary, dilation_data, fundamental_cycles, genus,
                     is_connected, is_tree, path_from_root, spanning_tree)
from .metrics import MetricGraph, induce_metric, is_inf, validate_metric_harmonic
from .ngonal import bigonal, classify_bigonal_point, trigonal
from .tori import (IntegralTorus, Polarization, PrincipalModel, TorusHom,
                   dual_polarization, dual_type, induced_polarization,
                   kernel_torus, polarized_isomorphic, pp_rescale)


class NonGenericTower(PreconditionError):
    def __init__(self, point):
        super().__init__("generic", f"point {point} has type V (dilation collapse)")
        self.point = point


@dataclass(frozen=True)
class CycleBasis:
    """Fundamental cycles of a spanning tree; the coordinates of a cycle are
    its coefficients on the complementary edges."""

    graph: Graph
    tree: SpanningTree
    cycles: tuple  # edge-key coefficient dicts

    @property
    def rank(self) -> int:
        return len(self.cycles)

    def coordinates(self, chain: dict) -> tuple:
        if chain_boundary(self.graph, chain):
            raise GraphError("coordinates of a non-closed chain")
        return tuple(chain.get(k, 0) for k in self.tree.complement_keys)

    def from_coordinates(self, coords) -> dict:
        chain = {}
        for c, cyc in zip(coords, self.cycles):
            for k, x in cyc.items():
                chain[k] = chain.get(k, 0) + c * x
        return {k: v for k, v in sorted(chain.items()) if v}


def h1_basis(graph: Graph) -> CycleBasis:
    tree = spanning_tree(graph)
    return CycleBasis(graph, tree, fundamental_cycles(graph, tree))


def cycle_pairing(metric: MetricGraph, a: dict, b: dict) -> Fraction:
    """Integration pairing sum_e a_e b_e len(e)."""
    total = Fraction(0)
    for k, c in a.items():
        other = b.get(k, 0)
        if other:
            length = metric.length[k]
            if is_inf(length):
                raise GraphError("cycle pairing across an infinite edge")
            total += c * other * length
    return total


def pairing_table(metric: MetricGraph, rows, cols) -> tuple:
    return tuple(tuple(cycle_pairing(metric, r, c) for c in cols) for r in rows)


@dataclass(frozen=True)
class Jacobian:
    torus: IntegralTorus
    polarization: Polarization  # the identity map: the pairing is the Gram form
    basis: CycleBasis
    metric: MetricGraph


def jacobian(metric: MetricGraph) -> Jacobian:
    """Principally polarized torus on H1 with the edge-length pairing."""
    if not is_connected(metric.graph):
        raise PreconditionError("connected", "jacobian requires a connected graph")
    basis = h1_basis(metric.graph)
    gram = pairing_table(metric, basis.cycles, basis.cycles)
    torus = IntegralTorus(gram)
    return Jacobian(torus, Polarization(torus, la.identity(basis.rank)), basis, metric)


# ---------------------------------------------------------------------------
# chain-level transfer maps of a double cover


def push_chain(cover: DoubleCover, chain: dict) -> dict:
    """Chain map of the covering projection."""
    f = cover.cover
    out = {}
    for k, c in chain.items():
        img_half = f.h(k)
        key = f.target.edge_key(img_half)
        sign = 1 if img_half == key else -1
        out[key] = out.get(key, 0) + sign * c
    return {k: v for k, v in sorted(out.items()) if v}


def pull_chain(cover: DoubleCover, chain: dict) -> dict:
    """Pullback of 1-forms: a free edge lifts to both preimages, a dilated
    edge to twice its single preimage."""
    f = cover.cover
    pre = {}
    for k in f.source.edge_keys():
        pre.setdefault(f.target.edge_key(f.h(k)), []).append(k)
    out = {}
    for k, c in chain.items():
        for up in pre.get(k, ()):
            sign = 1 if f.h(up) == k else -1
            out[up] = out.get(up, 0) + sign * c * f.deg_edge(up)
    return {k: v for k, v in sorted(out.items()) if v}


def invol_chain(cover: DoubleCover, chain: dict) -> dict:
    g = cover.source
    out = {}
    for k, c in chain.items():
        img_half = cover.half_edge_invol[k]
        key = g.edge_key(img_half)
        sign = 1 if img_half == key else -1
        out[key] = out.get(key, 0) + sign * c
    return {k: v for k, v in sorted(out.items()) if v}


def chain_sum(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in sorted(out.items()) if v}


def chain_scale(c: int, a: dict) -> dict:
    return {k: c * v for k, v in sorted(a.items())} if c else {}


def chain_halve(a: dict) -> dict:
    if any(v % 2 for v in a.values()):
        raise AssertionError("chain is not divisible by 2")
    return {k: v // 2 for k, v in sorted(a.items()) if v}


@dataclass(frozen=True)
class TransferMaps:
    """Pushforward, pullback and involution action on H1 as matrices in the
    chosen cycle bases; pullback @ pushforward = I + involution."""

    pushforward: tuple  # g(target) x g(source)
    pullback: tuple     # g(source) x g(target)
    involution: tuple   # g(source) x g(source)
    source_basis: CycleBasis
    target_basis: CycleBasis


def _cols_to_matrix(cols, nrows):
    return tuple(tuple(col[i] for col in cols) for i in range(nrows))


def transfer_maps(cover: DoubleCover, source_basis=None, target_basis=None) -> TransferMaps:
    if not is_connected(cover.source) or not is_connected(cover.target):
        raise PreconditionError("connected", "transfer maps require connected source and target")
    sb = source_basis or h1_basis(cover.source)
    tb = target_basis or h1_basis(cover.target)
    push = _cols_to_matrix([tb.coordinates(push_chain(cover, c)) for c in sb.cycles], tb.rank)
    pull = _cols_to_matrix([sb.coordinates(pull_chain(cover, c)) for c in tb.cycles], sb.rank)
    invol = _cols_to_matrix([sb.coordinates(invol_chain(cover, c)) for c in sb.cycles], sb.rank)
    composite = la.matmul(pull, push) if tb.rank else la.zeros(sb.rank, sb.rank)
    if not la.mat_equal(composite, la.mat_add(la.identity(sb.rank), invol)):
        raise AssertionError("transfer maps violate pullback @ pushforward = I + involution")
    return TransferMaps(push, pull, invol, sb, tb)


def norm_hom(cover: DoubleCover, source_metric: MetricGraph, target_metric: MetricGraph,
             maps: TransferMaps = None) -> TorusHom:
    """Norm homomorphism Jac(source) -> Jac(target) of a double cover.

    Adjointness for the two Jacobian pairings is the projection formula,
    re-verified exactly by the TorusHom constructor.
    """
    if validate_metric_harmonic(cover.cover, source_metric, target_metric):
        raise GraphError("norm_hom: metrics are not compatible with the cover")
    maps = maps or transfer_maps(cover)
    src = jacobian(source_metric)
    tgt = jacobian(target_metric)
    return TorusHom(src.torus, tgt.torus, maps.pullback, maps.pushforward)


@dataclass(frozen=True)
class PrymData:
    """Norm-kernel torus with its induced polarization and principal model."""

    cover: DoubleCover
    torus: IntegralTorus
    polarization: Polarization
    type: tuple
    principal: PrincipalModel
    kernel: object
    norm: TorusHom
    maps: TransferMaps
    dilation: object

    @property
    def rank(self) -> int:
        return self.torus.rank


def prym(cover: DoubleCover, source_metric: MetricGraph, target_metric: MetricGraph) -> PrymData:
    """Identity component of the norm kernel; polarization type (1^B, 2^A)."""
    if not is_connected(cover.source):
        raise PreconditionError("connected", "prym requires a connected source")
    maps = transfer_maps(cover)
    nm = norm_hom(cover, source_metric, target_metric, maps)
    ker = kernel_torus(nm)
    pol = induced_polarization(ker.inclusion, Polarization(nm.source, la.identity(nm.source.rank)))
    ptype = pol.type()
    dil = dilation_data(cover)
    expected = (1,) * dil.B + (2,) * dil.A
    if ptype != expected:
        raise AssertionError(f"Prym polarization type {ptype} != (1^{dil.B}, 2^{dil.A})")
    if ker.torus.rank != genus(cover.source) - genus(cover.target):
        raise AssertionError("Prym rank differs from the genus difference")
    return PrymData(cover, ker.torus, pol, ptype, pp_rescale(pol), ker, nm, maps, dil)


def tower_metrics(tower: Tower, base_metric: MetricGraph):
    """(mid metric, top metric) induced from the base through the tower."""
    mid = induce_metric(tower.f, base_metric)
    top = induce_metric(tower.pi.cover, mid)
    return mid, top


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    witness: object
    details: dict

    def __bool__(self):
        return self.passed


def check_bigonal_duality(tower: Tower, base_metric: MetricGraph) -> CheckResult:
    """The norm-kernel tori of a generic hyperelliptic-cover tower and of its
    reconstruction are dual polarized tori; verified by complete search."""
    if tower.f.global_degree() != 2:
        raise PreconditionError("degree-2", "tower must be a double cover of a hyperelliptic graph")
    if not is_tree(tower.base):
        raise PreconditionError("tree-base", "base must be a tree")
    for p in tower.base.points():
        if classify_bigonal_point(tower, p) == "V":
            raise NonGenericTower(p)
    if not is_connected(tower.top):
        raise PreconditionError("top-connected", "source curve is disconnected")
    result = bigonal(tower)
    out = result.tower
    if not is_connected(out.top):
        raise PreconditionError(
            "output-connected",
            "constructed curve is disconnected (the input double cover is free)")
    mid1, top1 = tower_metrics(tower, base_metric)
    mid2, top2 = tower_metrics(out, base_metric)
    prym1 = prym(tower.pi, top1, mid1)
    prym2 = prym(out.pi, top2, mid2)
    # the duality exchanges the 1s and 2s of the type; the multiplier is the
    # covering degree 2, which equals a_1 * a_g whenever the type is mixed
    if prym1.type != dual_type(prym2.type, multiplier=2):
        return CheckResult(False, None, {
            "reason": "polarization types are not dual",
            "types": (prym1.type, prym2.type)})
    dual2 = dual_polarization(prym2.polarization, multiplier=2)
    witness = polarized_isomorphic(prym1.polarization, dual2.polarized)
    return CheckResult(witness is not None, witness, {
        "types": (prym1.type, prym2.type),
        "pairing": prym1.torus.pairing,
        "dual_pairing": dual2.dual_torus.pairing,
        "construction": result})


def check_trigonal_prym(tower: Tower, base_metric: MetricGraph) -> CheckResult:
    """Prym(top/mid) == Jac(constructed quartic curve) as principally
    polarized tori, verified by complete isometry search."""
    if tower.f.global_degree() != 3:
        raise PreconditionError("degree-3", "tower must cover a trigonal graph")
    if not tower.pi.is_free():
        raise PreconditionError("free-cover", "double cover must be free")
    if not is_tree(tower.base):
        raise PreconditionError("tree-base", "base must be a tree")
    if not is_connected(tower.top):
        raise PreconditionError("top-connected", "source curve is disconnected")
    tri = trigonal(tower)
    mid_m, top_m = tower_metrics(tower, base_metric)
    prym_data = prym(tower.pi, top_m, mid_m)
    jac = jacobian(induce_metric(tri.quartic, base_metric))
    if jac.torus.rank != prym_data.rank:
        raise AssertionError("dimension mismatch between Jacobian and Prym")
    witness = polarized_isomorphic(prym_data.principal.polarized, jac.polarization)
    return CheckResult(witness is not None, witness, {
        "prym_gram": prym_data.principal.polarized.gram(),
        "jacobian_gram": jac.torus.pairing,
        "quartic": tri})


# ---------------------------------------------------------------------------
# involution-adapted homology bases


@dataclass(frozen=True)
class SymmetricBasis:
    """Homology bases adapted to the involution of a double cover.

    Top cycles: alpha_plus[i] and alpha_minus[i] are swapped by the
    involution and push to alpha[i]; beta[j] are anti-invariant with
    pushforward zero; gamma_top[k] are invariant lifts of the dilation
    cycles gamma[k].  A connected free cover has one gamma pair and no
    betas; a dilated cover has B = (components - 1) betas.
    """

    cover: DoubleCover
    alpha_plus: tuple
    alpha_minus: tuple
    beta: tuple
    gamma_top: tuple
    alpha: tuple
    gamma: tuple

    def verify(self):
        cov = self.cover
        free = cov.is_free()
        for ap, am, a in zip(self.alpha_plus, self.alpha_minus, self.alpha):
            assert invol_chain(cov, ap) == am and invol_chain(cov, am) == ap
            assert push_chain(cov, ap) == a and push_chain(cov, am) == a
            assert pull_chain(cov, a) == chain_sum(ap, am)
        for b in self.beta:
            assert invol_chain(cov, b) == chain_scale(-1, b)
            assert push_chain(cov, b) == {}
        for gt, g in zip(self.gamma_top, self.gamma):
            assert invol_chain(cov, gt) == gt
            if free:
                assert push_chain(cov, gt) == chain_scale(2, g)
                assert pull_chain(cov, g) == gt
            else:
                assert push_chain(cov, gt) == g
                assert pull_chain(cov, g) == chain_scale(2, gt)
        top_basis = h1_basis(cov.source)
        mid_basis = h1_basis(cov.target)
        top = [top_basis.coordinates(c) for c in
               self.alpha_plus + self.alpha_minus + self.beta + self.gamma_top]
        mid = [mid_basis.coordinates(c) for c in self.alpha + self.gamma]
        assert len(top) == top_basis.rank
        assert top_basis.rank == 0 or abs(la.det(la.mat(top))) == 1
        assert len(mid) == mid_basis.rank
        assert mid_basis.rank == 0 or abs(la.det(la.mat(mid))) == 1
        return True


def symmetric_basis(cover: DoubleCover) -> SymmetricBasis:
    """Involution-adapted bases, following the two constructive cases.

    Free: lift a spanning tree to the two sheets, join them by one
    crossing complementary lift; the remaining fundamental cycles give
    the alpha pairs and the invariant gamma.  Dilated: collapse each
    dilation component to a vertex with a loop (lifting to a parallel
    pair), run the free construction there, drop the artificial edges
    and close the alpha chains inside the dilation subgraph.
    """
    basis = _symmetric_basis_free(cover) if cover.is_free() else _symmetric_basis_dilated(cover)
    basis.verify()
    return basis


def _tree_from_keys(g: Graph, keys) -> SpanningTree:
    keys = set(keys)
    start = g.vertices[0]
    up = {}
    visited = {start}
    queue = [start]
    while queue:
        v = queue.pop(0)
        for h in g.tangent(v):
            if g.edge_key(h) not in keys:
                continue
            w = g.root[g.partner[h]]
            if w not in visited:
                visited.add(w)
                up[w] = g.partner[h]
                queue.append(w)
    if len(visited) != len(g.vertices):
        raise AssertionError("edge set does not span the graph")
    comp = tuple(k for k in g.edge_keys() if k not in keys)
    return SpanningTree(start, frozenset(keys), comp, up)


def _fundamental_cycle(g: Graph, tree: SpanningTree, k) -> dict:
    tail, head = g.edge_ends(k)
    chain = {k: 1}
    for kk, c in path_from_root(g, tree, tail).items():
        chain[kk] = chain.get(kk, 0) + c
    for kk, c in path_from_root(g, tree, head).items():
        chain[kk] = chain.get(kk, 0) - c
    return {kk: c for kk, c in sorted(chain.items()) if c}


def _edge_lifts(cover: DoubleCover) -> dict:
    f = cover.cover
    lifts = {k: [] for k in f.target.edge_keys()}
    for kk in f.source.edge_keys():
        lifts[f.target.edge_key(f.h(kk))].append(kk)
    return {k: sorted(v) for k, v in lifts.items()}


def _symmetric_basis_free(cover: DoubleCover) -> SymmetricBasis:
    if not is_connected(cover.source):
        raise PreconditionError("connected", "symmetric basis of a free cover requires a connected source")
    tgt, src = cover.target, cover.source
    tree = spanning_tree(tgt)
    lifts = _edge_lifts(cover)
    tree_lift_keys = set()
    for k in tree.tree_keys:
        tree_lift_keys.update(lifts[k])
    # the tree preimage is two disjoint trees; a crossing lift joins them
    sheets = _key_components(src, tree_lift_keys)
    crossing = None
    for k in tree.complement_keys:
        a, b = (sheets[v] for v in src.edge_ends(lifts[k][0]))
        if a != b:
            crossing = k
            break
    if crossing is None:
        raise AssertionError("connected free cover has no crossing edge")
    src_tree = _tree_from_keys(src, tree_lift_keys | {lifts[crossing][0]})
    gamma_top = _fundamental_cycle(src, src_tree, lifts[crossing][1])
    gamma = chain_halve(push_chain(cover, gamma_top))
    alpha_plus, alpha_minus, alpha = [], [], []
    for k in tree.complement_keys:
        if k == crossing:
            continue
        plus = _fundamental_cycle(src, src_tree, lifts[k][0])
        minus = invol_chain(cover, plus)
        alpha_plus.append(plus)
        alpha_minus.append(minus)
        alpha.append(push_chain(cover, plus))
    return SymmetricBasis(cover, tuple(alpha_plus), tuple(alpha_minus), (),
                          (gamma_top,), tuple(alpha), (gamma,))


def _key_components(g: Graph, keys) -> dict:
    keys = set(keys)
    label = {}
    nxt = 0
    for start in g.vertices:
        if start in label:
            continue
        label[start] = nxt
        queue = [start]
        while queue:
            v = queue.pop(0)
            for h in g.tangent(v):
                if g.edge_key(h) not in keys:
                    continue
                w = g.root[g.partner[h]]
                if w not in label:
                    label[w] = nxt
                    queue.append(w)
        nxt += 1
    return label


def _dilation_blocks(cover: DoubleCover):
    """Connected components of the target dilation subgraph, rep = min vertex."""
    tgt = cover.target
    dil_v = sorted(cover.dilated_vertices)
    parent = {v: v for v in dil_v}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in sorted(cover.dilated_edge_keys):
        a, b = tgt.edge_ends(k)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for v in dil_v:
        groups.setdefault(find(v), []).append(v)
    blocks = {}
    for members in groups.values():
        rep = min(members)
        for v in members:
            blocks[v] = rep
    return blocks


def _symmetric_basis_dilated(cover: DoubleCover) -> SymmetricBasis:
    tgt, src, f = cover.target, cover.source, cover.cover
    if not is_connected(src):
        raise PreconditionError("connected", "symmetric basis requires a connected source")
    blocks = _dilation_blocks(cover)
    reps = sorted(set(blocks.values()))
    dil_keys = set(cover.dilated_edge_keys)

    # collapsed target: each dilation component becomes its rep vertex plus a loop
    t_map = {v: blocks.get(v, v) for v in tgt.vertices}
    keep_t = [h for h in tgt.half_edges if tgt.edge_key(h) not in dil_keys]
    next_h = max(tgt.half_edges, default=-1) + 1
    root_m = {h: t_map[tgt.root[h]] for h in keep_t}
    partner_m = {h: tgt.partner[h] for h in keep_t}
    loop_key = {}
    for rep in reps:
        a, b = next_h, next_h + 1
        next_h += 2
        root_m[a] = root_m[b] = rep
        partner_m[a], partner_m[b] = b, a
        loop_key[rep] = a
    target_m = Graph(tuple(sorted(set(t_map.values()))), root_m, partner_m)

    # collapsed source: the dilated preimage splits into two artificial sheets
    src_dil_vertices = sorted(x for x in src.vertices if f.v(x) in blocks)
    plus_id, minus_id = {}, {}
    next_v = max(src.vertices, default=-1) + 1
    for rep in reps:
        plus_id[rep], minus_id[rep] = next_v, next_v + 1
        next_v += 2
    keep_s = [h for h in src.half_edges if tgt.edge_key(f.h(h)) not in dil_keys]
    root_s, partner_s = {}, {}
    for h in keep_s:
        r = src.root[h]
        if f.v(r) in blocks:
            rep = blocks[f.v(r)]
            mate = cover.half_edge_invol[h]
            side = plus_id if h < mate else minus_id
            root_s[h] = side[rep]
        else:
            root_s[h] = r
        partner_s[h] = src.partner[h]
    next_hs = max(src.half_edges, default=-1) + 1
    pair_keys = {}
    for rep in reps:
        made = []
        for _ in range(2):
            a, b = next_hs, next_hs + 1
            next_hs += 2
            root_s[a], root_s[b] = plus_id[rep], minus_id[rep]
            partner_s[a], partner_s[b] = b, a
            made.append(a)
        pair_keys[rep] = tuple(made)
    free_src_vertices = [x for x in src.vertices if f.v(x) not in blocks]
    source_m = Graph(tuple(sorted(free_src_vertices + list(plus_id.values()) + list(minus_id.values()))),
                     root_s, partner_s)

    vmap_m = {}
    for x in free_src_vertices:
        vmap_m[x] = f.v(x)
    for rep in reps:
        vmap_m[plus_id[rep]] = rep
        vmap_m[minus_id[rep]] = rep
    hmap_m = {h: f.h(h) for h in keep_s}
    for rep in reps:
        k1, k2 = pair_keys[rep]
        la_half, lb_half = loop_key[rep], partner_m[loop_key[rep]]
        hmap_m[k1], hmap_m[partner_s[k1]] = la_half, lb_half
        hmap_m[k2], hmap_m[partner_s[k2]] = lb_half, la_half
    model = DoubleCover.from_harmonic(HarmonicMorphism(
        GraphMorphism(source_m, target_m, vmap_m, hmap_m),
        {x: 1 for x in source_m.vertices}, {h: 1 for h in source_m.half_edges}))

    # free construction over the collapsed target, crossing at the first loop
    # (loops are never BFS tree edges, so all of them are complementary)
    loop_keys_sorted = sorted(loop_key[rep] for rep in reps)
    tree_m = spanning_tree(target_m)
    lifts = _edge_lifts(model)
    tree_lift_keys = set()
    for k in tree_m.tree_keys:
        tree_lift_keys.update(lifts[k])
    crossing = loop_keys_sorted[0]
    src_tree = _tree_from_keys(source_m, tree_lift_keys | {lifts[crossing][0]})

    artificial = {kk for rep in reps for kk in lifts[loop_key[rep]]}

    def drop(chain):
        return {k: c for k, c in chain.items() if k not in artificial}

    beta, alpha_plus, alpha_minus, alpha = [], [], [], []
    for k in tree_m.complement_keys:
        if k == crossing:
            continue
        raw = drop(_fundamental_cycle(source_m, src_tree, lifts[k][0]))
        if k in loop_keys_sorted:
            if chain_boundary(src, raw):
                raise AssertionError("anti-invariant chain is not closed")
            beta.append(raw)
        else:
            plus = _close_in_dilated(cover, raw)
            alpha_plus.append(plus)
            alpha_minus.append(invol_chain(cover, plus))
            alpha.append(push_chain(cover, plus))
    gamma, gamma_top = [], []
    for comp in _dilation_subgraphs(cover):
        if comp.edge_keys() and genus(comp) > 0:
            for cyc in h1_basis(comp).cycles:
                gamma.append(dict(cyc))
                gamma_top.append(_lift_dilated_cycle(cover, cyc))
    return SymmetricBasis(cover, tuple(alpha_plus), tuple(alpha_minus), tuple(beta),
                          tuple(gamma_top), tuple(alpha), tuple(gamma))


def _close_in_dilated(cover: DoubleCover, chain: dict) -> dict:
    """Add a correction chain supported on the dilated preimage (pointwise
    fixed by the involution) making the input closed."""
    src = cover.source
    bd = chain_boundary(src, chain)
    if not bd:
        return dict(sorted(chain.items()))
    allowed = set()
    for h in src.half_edges:
        if cover.target.edge_key(cover.cover.h(h)) in cover.dilated_edge_keys:
            allowed.add(src.edge_key(h))
    work = dict(chain)
    bd = dict(bd)
    while any(c > 0 for c in bd.values()):
        start = min(v for v, c in bd.items() if c > 0)
        targets = {v for v, c in bd.items() if c < 0}
        prev = {start: None}
        queue = [start]
        goal = None
        while queue:
            v = queue.pop(0)
            if v in targets:
                goal = v
                break
            for h in src.tangent(v):
                if src.edge_key(h) not in allowed:
                    continue
                w = src.root[src.partner[h]]
                if w not in prev:
                    prev[w] = h
                    queue.append(w)
        if goal is None:
            raise AssertionError("cannot close chain inside the dilation subgraph")
        v = goal
        while prev[v] is not None:
            h = prev[v]  # half-edge rooted at the previous vertex, leading to v
            kk = src.edge_key(h)
            sign = 1 if h == kk else -1  # traversal root(h) -> other end
            work[kk] = work.get(kk, 0) + sign
            v = src.root[h]
        bd[start] -= 1
        bd[goal] = bd.get(goal, 0) + 1
        bd = {x: c for x, c in bd.items() if c}
    out = {k: c for k, c in sorted(work.items()) if c}
    if chain_boundary(src, out):
        raise AssertionError("correction chain failed to close the cycle")
    return out


def _dilation_subgraphs(cover: DoubleCover):
    tgt = cover.target
    blocks = _dilation_blocks(cover)
    groups = {}
    for v, rep in blocks.items():
        groups.setdefault(rep, set()).add(v)
    out = []
    for rep in sorted(groups):
        vs = groups[rep]
        halves = [h for h in tgt.half_edges
                  if tgt.edge_key(h) in cover.dilated_edge_keys and tgt.root[h] in vs]
        out.append(Graph(tuple(sorted(vs)),
                         {h: tgt.root[h] for h in halves},
                         {h: tgt.partner[h] for h in halves}))
    return out


def _lift_dilated_cycle(cover: DoubleCover, cyc: dict) -> dict:
    f = cover.cover
    lifts = _edge_lifts(cover)
    out = {}
    for k, c in cyc.items():
        ups = lifts[k]
        if len(ups) != 1:
            raise AssertionError("dilated edge must have a unique preimage")
        kk = ups[0]
        sign = 1 if f.h(kk) == k else -1
        out[kk] = sign * c
    return {k: c for k, c in sorted(out.items()) if c}
