from fractions import Fraction

import pytest

from tropcover.gallery import (bigonal_reference, trigonal_expected_table,
                               trigonal_reference)
from tropcover.graphs import (Graph, PreconditionError, build_double_cover,
                              genus)
from tropcover.intlinalg import (identity, mat, mat_equal, mat_scale, matmul,
                                 to_fractions, transpose)
from tropcover.jacprym import (chain_scale, check_bigonal_duality,
                               check_trigonal_prym, cycle_pairing, h1_basis,
                               invol_chain, jacobian, norm_hom, pairing_table,
                               prym, pull_chain, push_chain, symmetric_basis,
                               tower_metrics, transfer_maps)
from tropcover.metrics import MetricGraph, induce_metric
from tropcover.randgen import random_tower
from tropcover.tori import polarized_isomorphic


def loop_cover(connected=True, dilated=False):
    loop = Graph((0,), {0: 0, 1: 0}, {0: 1, 1: 0})
    if dilated:
        return build_double_cover(loop, dilated_vertices={0}, dilated_edge_keys={0}).cover
    return build_double_cover(loop, bits={1: 1} if connected else {}).cover


class TestH1Basis:
    def test_tree_empty(self):
        g, _ = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert h1_basis(g).rank == 0

    def test_loop_single_cycle(self):
        g = Graph((0,), {0: 0, 1: 0}, {0: 1, 1: 0})
        basis = h1_basis(g)
        assert basis.cycles == ({0: 1},)

    def test_theta_two_cycles_share_tree_edge(self):
        g, _ = Graph.from_edges(2, [(0, 1), (0, 1), (0, 1)])
        basis = h1_basis(g)
        assert basis.rank == 2
        shared = set(basis.cycles[0]) & set(basis.cycles[1])
        assert shared


class TestJacobian:
    def test_loop_of_length_three(self):
        g = Graph((0,), {0: 0, 1: 0}, {0: 1, 1: 0})
        jac = jacobian(MetricGraph(g, {0: Fraction(3)}))
        assert jac.torus.pairing == ((Fraction(3),),)

    def test_theta_gram_in_difference_basis(self):
        g, keys = Graph.from_edges(2, [(0, 1), (0, 1), (0, 1)])
        p, q, r = Fraction(2), Fraction(5), Fraction(7)
        metric = MetricGraph(g, {keys[0]: p, keys[1]: q, keys[2]: r})
        c1 = {keys[0]: 1, keys[1]: -1}
        c2 = {keys[1]: 1, keys[2]: -1}
        table = pairing_table(metric, (c1, c2), (c1, c2))
        assert table == ((p + q, -q), (-q, q + r))

    def test_paper_basis_table_for_reference_quartic(self):
        # the Jacobian torus of any choice of basis is isometric to the
        # closed-form table
        from tropcover.ngonal import trigonal
        ref = trigonal_reference((1, 1, 1, 1, 1))
        tri = trigonal(ref.tower)
        jac = jacobian(induce_metric(tri.quartic, ref.base_metric))
        expected = trigonal_expected_table((1, 1, 1, 1, 1))
        from tropcover.tori import IntegralTorus, Polarization
        target = Polarization(IntegralTorus(expected), identity(2))
        assert polarized_isomorphic(jac.polarization, target) is not None

    def test_infinite_edge_in_cycle_rejected(self):
        from tropcover.metrics import INF
        g = Graph((0,), {0: 0, 1: 0}, {0: 1, 1: 0})
        with pytest.raises(Exception):
            jacobian(MetricGraph(g, {0: INF}))


class TestTransferMaps:
    def test_free_loop_cover(self):
        cover = loop_cover()
        maps = transfer_maps(cover)
        assert maps.pushforward in (((2,),), ((-2,),))
        assert maps.pullback in (((1,),), ((-1,),))

    def test_dilated_loop_cover(self):
        cover = loop_cover(dilated=True)
        maps = transfer_maps(cover)
        assert maps.pushforward in (((1,),), ((-1,),))
        assert maps.pullback in (((2,),), ((-2,),))

    def test_identity_plus_involution(self):
        for seed in range(12):
            tower = random_tower(seed, n=2).tower
            maps = transfer_maps(tower.pi)
            lhs = matmul(maps.pullback, maps.pushforward) if maps.target_basis.rank \
                else tuple(tuple(0 for _ in range(maps.source_basis.rank))
                           for _ in range(maps.source_basis.rank))
            from tropcover.intlinalg import mat_add
            assert mat_equal(lhs, mat_add(identity(maps.source_basis.rank), maps.involution))

    def test_involution_commutes_with_push(self):
        tower = random_tower(7, n=2).tower
        cover = tower.pi
        basis = h1_basis(cover.source)
        for cyc in basis.cycles:
            assert push_chain(cover, invol_chain(cover, cyc)) == push_chain(cover, cyc)


class TestNormHom:
    def test_projection_formula_holds(self):
        # the TorusHom constructor verifies adjointness exactly
        for seed in range(10):
            gen = random_tower(seed, n=2)
            mid, top = tower_metrics(gen.tower, gen.base_metric)
            nm = norm_hom(gen.tower.pi, top, mid)
            if nm.source.rank and nm.target.rank:
                lhs = matmul(transpose(to_fractions(nm.pull)), nm.source.pairing)
                rhs = matmul(nm.target.pairing, to_fractions(nm.push))
                assert mat_equal(lhs, rhs)

    def test_free_loop_matrices(self):
        cover = loop_cover()
        tgt_metric = MetricGraph(cover.target, {0: Fraction(2)})
        src_metric = induce_metric(cover.cover, tgt_metric)
        nm = norm_hom(cover, src_metric, tgt_metric)
        assert abs(nm.push[0][0]) == 2 and abs(nm.pull[0][0]) == 1

    def test_dilated_loop_matrices(self):
        cover = loop_cover(dilated=True)
        tgt_metric = MetricGraph(cover.target, {0: Fraction(2)})
        src_metric = induce_metric(cover.cover, tgt_metric)
        nm = norm_hom(cover, src_metric, tgt_metric)
        assert abs(nm.push[0][0]) == 1 and abs(nm.pull[0][0]) == 2


class TestSymmetricBasis:
    def test_free_genus_two(self):
        g, _ = Graph.from_edges(2, [(0, 1), (0, 1), (0, 1)])
        cover = build_double_cover(g, bits={1: 1}).cover
        sb = symmetric_basis(cover)  # verify() runs inside
        assert len(sb.alpha_plus) == genus(g) - 1
        assert len(sb.beta) == 0 and len(sb.gamma_top) == 1

    def test_reference_tower_has_one_alpha_and_one_beta(self):
        ref = bigonal_reference()
        sb = symmetric_basis(ref.tower.pi)
        assert len(sb.alpha_plus) == 1 and len(sb.beta) == 1 and len(sb.gamma_top) == 0
        assert push_chain(ref.tower.pi, sb.beta[0]) == {}

    def test_dilation_cycle_gives_gamma(self):
        # dilated parallel pair: the dilation subgraph has a cycle
        g, keys = Graph.from_edges(2, [(0, 1), (0, 1), (0, 1)])
        cover = build_double_cover(g, dilated_vertices={0, 1},
                                   dilated_edge_keys={0, 2}).cover
        sb = symmetric_basis(cover)
        assert len(sb.gamma_top) == 1
        assert pull_chain(cover, sb.gamma[0]) == chain_scale(2, sb.gamma_top[0])

    def test_random_covers(self):
        for seed in range(25):
            tower = random_tower(seed, n=2, dilation_probability=Fraction(1, 2)).tower
            symmetric_basis(tower.pi)


class TestPrym:
    def test_free_cover_of_genus_two_type(self):
        g, _ = Graph.from_edges(2, [(0, 1), (0, 1), (0, 1)])
        cover = build_double_cover(g, bits={1: 1}).cover
        tgt_metric = MetricGraph(g, {k: Fraction(1) for k in g.edge_keys()})
        data = prym(cover, induce_metric(cover.cover, tgt_metric), tgt_metric)
        assert data.rank == 1 and data.type == (2,)

    def test_reference_tower_rank_two_type_one_two(self):
        ref = bigonal_reference()
        mid, top = tower_metrics(ref.tower, ref.base_metric)
        data = prym(ref.tower.pi, top, mid)
        assert data.rank == 2 and data.type == (1, 2)

    def test_trigonal_reference_paper_basis_table(self):
        for lengths in ((1, 1, 1, 1, 1), (1, 2, 3, 4, 5)):
            ref = trigonal_reference(lengths)
            mid, top = tower_metrics(ref.tower, ref.base_metric)
            table = pairing_table(top, ref.class_reps, ref.kernel_cycles)
            assert table == trigonal_expected_table(lengths)

    def test_pairing_well_defined_on_cosets(self):
        for seed in range(10):
            gen = random_tower(seed, n=2)
            cover = gen.tower.pi
            mid, top = tower_metrics(gen.tower, gen.base_metric)
            data = prym(cover, top, mid)
            src_basis = data.maps.source_basis
            tgt_basis = data.maps.target_basis
            kernel_cols = transpose(data.kernel.kernel_columns) if data.rank else ()
            for gamma in tgt_basis.cycles:
                pulled = pull_chain(cover, gamma)
                for col in kernel_cols:
                    lam = src_basis.from_coordinates(col)
                    assert cycle_pairing(top, pulled, lam) == 0

    def test_gram_positive_definite(self):
        from tropcover.intlinalg import _cholesky
        for seed in range(10):
            gen = random_tower(seed, n=2)
            mid, top = tower_metrics(gen.tower, gen.base_metric)
            data = prym(gen.tower.pi, top, mid)
            if data.rank:
                _cholesky(data.polarization.gram())  # raises if not PD


class TestChecks:
    def test_trigonal_reference_passes(self):
        for lengths in ((1, 1, 1, 1, 1), (1, 2, 3, 4, 5)):
            ref = trigonal_reference(lengths)
            assert check_trigonal_prym(ref.tower, ref.base_metric).passed

    def test_bigonal_reference_passes(self):
        ref = bigonal_reference((1, 2, 3))
        result = check_bigonal_duality(ref.tower, ref.base_metric)
        assert result.passed
        assert result.details["types"] == ((1, 2), (1, 2))

    def test_bigonal_free_input_rejected_by_name(self):
        gen = random_tower(0, n=2, generic=True, pi_free=True)
        with pytest.raises(PreconditionError) as err:
            check_bigonal_duality(gen.tower, gen.base_metric)
        assert err.value.condition == "output-connected"

    def test_rescaling_scales_grams_and_keeps_witness(self):
        ref = trigonal_reference((1, 1, 1, 1, 1))
        scaled = trigonal_reference((3, 3, 3, 3, 3))
        r1 = check_trigonal_prym(ref.tower, ref.base_metric)
        r2 = check_trigonal_prym(scaled.tower, scaled.base_metric)
        assert mat_equal(r2.details["prym_gram"],
                         mat_scale(Fraction(3), r1.details["prym_gram"]))
        assert mat_equal(r2.details["jacobian_gram"],
                         mat_scale(Fraction(3), r1.details["jacobian_gram"]))
        assert r1.witness == r2.witness
