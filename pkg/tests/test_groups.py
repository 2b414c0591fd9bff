"""Matrix groups, the Singer construction, orbits and stabilizers."""
import importlib.resources
import random

import pytest

from qdeza import designs, gf, groups, qgraph
from qdeza.errors import AmbientMismatchError, BudgetExceededError, QdezaError
from qdeza.groups import FullGL, GMatrix


@pytest.fixture(scope="module")
def singer():
    sigma, phi = groups.singer_generators()
    return sigma, phi


@pytest.fixture(scope="module")
def group_k(singer):
    sigma, phi = singer
    return groups.generate_group([sigma * sigma * sigma, phi])


class TestGMatrix:
    def test_singular_rejected(self):
        with pytest.raises(QdezaError):
            GMatrix.from_rows([(1, 0), (1, 0)])

    def test_identity_and_inverse(self):
        m = GMatrix.from_rows([(1, 1, 0), (0, 1, 0), (1, 0, 1)])
        assert m * m.inverse() == GMatrix.identity(3)
        assert m.inverse() * m == GMatrix.identity(3)

    def test_inverse_q3(self):
        m = GMatrix.from_rows([(1, 2, 0), (0, 1, 1), (0, 0, 2)], q=3)
        assert m * m.inverse() == GMatrix.identity(3, 3)

    def test_order(self):
        swap = GMatrix.from_rows([(0, 1), (1, 0)])
        assert swap.order() == 2


class TestAct:
    def test_identity_action(self):
        s = gf.subspace_from_rows([(1, 0, 1, 0)], 4, 2)
        assert groups.act(GMatrix.identity(4), s) == s

    def test_sigma_moves_e1_to_e2(self, singer):
        sigma, _ = singer
        e1 = gf.subspace_from_rows([(1, 0, 0, 0, 0, 0)], 6, 2)
        e2 = gf.subspace_from_rows([(0, 1, 0, 0, 0, 0)], 6, 2)
        assert groups.act(sigma, e1) == e2

    def test_whole_space_fixed(self, singer):
        sigma, _ = singer
        assert groups.act(sigma, gf.full_space(6, 2)) == gf.full_space(6, 2)

    def test_ambient_mismatch(self, singer):
        sigma, _ = singer
        with pytest.raises(AmbientMismatchError):
            groups.act(sigma, gf.subspace_from_rows([(1, 0)], 2, 2))

    def test_right_action_composition(self, singer):
        # act(m1*m2, s) == act(m2, act(m1, s)) for row vectors acted on
        # the right
        sigma, phi = singer
        rng = random.Random(3)
        table = gf.enumerate_subspaces(6, 2, 2)
        for _ in range(25):
            s = rng.choice(table)
            m1 = rng.choice((sigma, phi, sigma * phi))
            m2 = rng.choice((sigma, phi, phi * phi))
            assert groups.act(m1 * m2, s) == groups.act(m2, groups.act(m1, s))


class TestClosure:
    def test_identity_group(self):
        g = groups.generate_group([GMatrix.identity(4)])
        assert g.order == 1

    def test_k_has_order_63(self, group_k):
        assert group_k.order == 63

    def test_printed_pair_generates_order_189(self, singer):
        # the printed pair does NOT reach the full normalizer: phi induces
        # sigma -> sigma^4, an order-3 action, so the closure has order
        # 63 * 3 = 189 (see the singer_normalizer docstring)
        sigma, phi = singer
        assert groups.generate_group([sigma, phi]).order == 189

    def test_normalizer_order_378(self):
        assert groups.singer_normalizer().order == 378

    def test_frobenius_conjugation_relation(self, singer):
        sigma, _ = singer
        F = groups.singer_frobenius()
        assert F * sigma == (sigma * sigma) * F

    def test_phi_inside_normalizer(self, singer):
        _, phi = singer
        assert phi in groups.singer_normalizer().elements

    def test_budget(self, singer):
        sigma, phi = singer
        with pytest.raises(BudgetExceededError):
            groups.generate_group([sigma, phi], budget=10)


class TestSingerGenerators:
    def test_printed_rows(self, singer):
        sigma, phi = singer
        assert sigma.row_coords()[0] == (0, 1, 0, 0, 0, 0)
        assert phi.row_coords()[5] == (1, 0, 1, 0, 1, 1)

    def test_sigma_order_63(self, singer):
        sigma, _ = singer
        assert sigma.order() == 63

    def test_k_transitive_on_points(self, singer, group_k):
        pts = gf.enumerate_subspaces(6, 1, 2)
        orbit = {pts[0]}
        frontier = [pts[0]]
        while frontier:
            nxt = []
            for s in frontier:
                for g in group_k.generators:
                    t = groups.act(g, s)
                    if t not in orbit:
                        orbit.add(t)
                        nxt.append(t)
            frontier = nxt
        assert len(orbit) == 63

    def test_data_file_matches_constants(self, singer):
        text = (
            importlib.resources.files("qdeza.data")
            .joinpath("singer_generators.txt")
            .read_text()
        )
        mats = groups.parse_matrices(text)
        assert mats == singer

    def test_matrix_format_round_trip(self, singer):
        text = groups.format_matrices(singer)
        assert groups.parse_matrices(text) == singer


class TestOrbits:
    def test_k_line_orbit_signature(self, group_k):
        part = groups.orbit_partition(group_k, 2)
        assert part.sizes() == {63: 10, 21: 1}

    def test_trivial_group_orbits(self):
        part = groups.orbit_partition([GMatrix.identity(6)], 1)
        assert part.sizes() == {1: 63}

    def test_orbit_partition_deterministic(self, group_k):
        a = groups.orbit_partition(group_k, 2)
        b = groups.orbit_partition(group_k, 2)
        assert repr(a) == repr(b)

    def test_members_sorted_and_partition(self, group_k):
        part = groups.orbit_partition(group_k, 2)
        seen = set()
        for rep, members in part.orbits:
            assert rep == members[0]
            assert list(members) == sorted(members)
            seen.update(members)
        assert seen == set(range(651))

    def test_sigma_phi_permute_deza_orbit_triple(self, singer, group_k):
        # the three Deza edge sets form one orbit of size 3 under the
        # printed generators
        sigma, phi = singer
        part = groups.orbit_partition(group_k, 2)
        deza_sets = []
        for root, members in part.orbits:
            if len(members) != 63:
                continue
            g = qgraph.QaryGraph.from_edge_ids(6, 2, members)
            try:
                p, _ = designs.classify_deza(g)
            except QdezaError:
                continue
            if (p.v, p.k, p.b, p.a, p.q) == (6, 2, 1, 0, 2):
                deza_sets.append(g.edges)
        assert len(deza_sets) == 3
        start = deza_sets[0]
        orbit = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for es in frontier:
                for gen in (sigma, phi):
                    img = frozenset(groups.act(gen, e) for e in es)
                    if img not in orbit:
                        orbit.add(img)
                        nxt.append(img)
            frontier = nxt
        assert orbit == set(map(frozenset, deza_sets))


class TestRepresentatives:
    def test_first_rep_contains_sum(self):
        reps = groups.deza_orbit_representatives()
        vec = gf.Vector(2, (1, 1, 1, 0, 0, 0))
        assert gf.contains(reps[0], vec)

    def test_orbit_size_and_classification(self, group_k):
        part = groups.orbit_partition(group_k, 2)
        root_of = {}
        for root, members in part.orbits:
            for m in members:
                root_of[m] = root
        for rep in groups.deza_orbit_representatives():
            rid = gf.subspace_id(rep)
            root = root_of[rid]
            members = dict(part.orbits)[root]
            assert len(members) == 63
            g = qgraph.QaryGraph.from_edge_ids(6, 2, members)
            p, c = designs.classify_deza(g)
            assert (p.v, p.k, p.b, p.a, p.q) == (6, 2, 1, 0, 2)


class TestStabilizers:
    def test_full_gl42_fixes_all_planes(self):
        n = groups.setwise_stabilizer_order(
            FullGL(4, 2), list(gf.enumerate_subspaces(4, 2, 2))
        )
        assert n == FullGL(4, 2).order == 20160

    def test_k_stabilizes_its_deza_orbits(self, group_k):
        part = groups.orbit_partition(group_k, 2)
        for root, members in part.orbits:
            if len(members) != 63:
                continue
            g = qgraph.QaryGraph.from_edge_ids(6, 2, members)
            try:
                p, _ = designs.classify_deza(g)
            except QdezaError:
                continue
            if (p.b, p.a) == (1, 0):
                assert groups.setwise_stabilizer_order(group_k, list(g.edges)) == 63

    def test_gl62_refused(self):
        line = gf.subspace_from_rows([(1,) + (0,) * 5, (0, 1) + (0,) * 4], 6, 2)
        with pytest.raises(BudgetExceededError):
            groups.setwise_stabilizer_order(FullGL(6, 2), [line])

    def test_worker_partitioned_sweep_matches(self):
        lineset = list(gf.enumerate_subspaces(4, 2, 2))[:8]
        one = groups.setwise_stabilizer_order(FullGL(4, 2), lineset, workers=1)
        two = groups.setwise_stabilizer_order(FullGL(4, 2), lineset, workers=2)
        assert one == two

    def test_gl52_order(self):
        assert FullGL(5, 2).order == 9_999_360

    def test_default_workers_env(self, monkeypatch):
        monkeypatch.setenv("QGRAPH_WORKERS", "3")
        assert groups.default_workers() == 3
        monkeypatch.setenv("QGRAPH_WORKERS", "junk")
        assert groups.default_workers() >= 1
