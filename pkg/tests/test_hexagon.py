"""Hexagon construction, hyperplane sections, the badex configuration
and the orbit/couples/good-lines pipeline."""
from collections import Counter
from itertools import combinations

import pytest

from qdeza import designs, gf, groups, hexagon, qgraph
from qdeza.errors import ClassificationError, QdezaError


@pytest.fixture(scope="module")
def hx():
    return hexagon.build_split_cayley_hexagon()


@pytest.fixture(scope="module")
def singer_graphs():
    sigma, phi = groups.singer_generators()
    K = groups.generate_group([sigma * sigma * sigma, phi])
    part = groups.orbit_partition(K, 2)
    out = []
    for root, members in part.orbits:
        if len(members) != 63:
            continue
        g = qgraph.QaryGraph.from_edge_ids(6, 2, members)
        try:
            p, _ = designs.classify_deza(g)
        except QdezaError:
            continue
        if (p.v, p.k, p.b, p.a, p.q) == (6, 2, 1, 0, 2):
            out.append(g)
    assert len(out) == 3
    return out


@pytest.fixture(scope="module")
def couples():
    return hexagon.enumerate_couples()


class TestConstruction:
    def test_line_count(self, hx):
        assert len(hx.edges) == 63

    def test_three_coplanar_lines_per_point(self, hx):
        inc = hx._inc
        for pid in range(inc.n):
            assert len(inc.point_edges[pid]) == 3
            hexagon.pi_plane(hx, inc.points[pid])  # raises if not coplanar

    def test_classifies_as_deza(self, hx):
        p, c = designs.classify_deza(hx)
        assert (p.v, p.k, p.b, p.a, p.q) == (6, 2, 1, 0, 2)
        assert (c.n1, c.n2) == (30, 32)

    def test_neighborhood_is_pi_plane(self, hx):
        inc = hx._inc
        pt = inc.points[17]
        nb = qgraph.neighborhood(hx, pt)
        assert nb.closure == hexagon.pi_plane(hx, pt)

    def test_common_neighbors_follow_incidence_distance(self, hx):
        # 1 common neighbor at incidence distance 2 or 4, none at 6
        inc = hx._inc
        for pid in (0, 31):
            base = inc.points[pid]
            census = hexagon.incidence_point_distance_census(hx, base)
            assert census == {0: 1, 2: 6, 4: 24, 6: 32}
            from collections import deque

            adj, n, _ = hexagon._incidence_adj(hx)
            dist = [-1] * len(adj)
            dist[pid] = 0
            dq = deque([pid])
            while dq:
                u = dq.popleft()
                for w in adj[u]:
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        dq.append(w)
            for j in range(n):
                if j == pid:
                    continue
                want = 1 if dist[j] in (2, 4) else 0
                assert qgraph.common_neighbors(hx, base, inc.points[j]) == want


class TestGeneralizedHexagon:
    def test_hexagon_is_gh(self, hx):
        assert hexagon.is_generalized_hexagon(hx)

    def test_singer_orbits_are_not(self, singer_graphs):
        for g in singer_graphs:
            assert not hexagon.is_generalized_hexagon(g)

    def test_complete_q_graph_is_not(self):
        assert not hexagon.is_generalized_hexagon(qgraph.complete_graph(3, 2))

    def test_empty_graph_is_not(self):
        assert not hexagon.is_generalized_hexagon(qgraph.empty_graph(3, 2))


class TestNotStronglyRegular:
    def test_hexagon_and_singer_orbits_are_not_srg(self, hx, singer_graphs):
        assert designs.classify_srg(hx) is None
        for g in singer_graphs:
            assert designs.classify_srg(g) is None


class TestRegularEmbedding:
    def test_hexagon_passes(self, hx):
        assert hexagon.regular_embedding_checks(hx)

    def test_singer_fails(self, singer_graphs):
        assert not hexagon.regular_embedding_checks(singer_graphs[0])

    def test_hexagon_census(self, hx):
        inc = hx._inc
        for pid in (0, 13, 62):
            census = hexagon.incidence_point_distance_census(hx, inc.points[pid])
            assert census == {0: 1, 2: 6, 4: 24, 6: 32}

    def test_singer_census_differs_at_distance_6(self, singer_graphs):
        g = singer_graphs[0]
        inc = g._inc
        censuses = [
            hexagon.incidence_point_distance_census(g, inc.points[pid])
            for pid in range(inc.n)
        ]
        assert any(c.get(6) != 32 for c in censuses)


class TestPiPlanes:
    def test_p_in_own_plane(self, hx):
        inc = hx._inc
        for pid in (0, 30, 62):
            pt = inc.points[pid]
            assert gf.contains(hexagon.pi_plane(hx, pt), pt)

    def test_pi_symmetry_all_pairs(self, hx):
        inc = hx._inc
        planes = [set(hexagon.pi_plane(hx, p).nonzero_words()) for p in inc.points]
        words = [p.rows[0] for p in inc.points]
        for i, j in combinations(range(inc.n), 2):
            assert (words[i] in planes[j]) == (words[j] in planes[i])

    def test_intersection_statistics(self, hx):
        inc = hx._inc
        planes = [set(hexagon.pi_plane(hx, p).nonzero_words()) for p in inc.points]
        base = planes[0]
        hist = Counter()
        for j in range(1, inc.n):
            if inc.points[j].rows[0] in base:
                continue  # the 6 points of the plane itself
            hist[len(base & planes[j])] += 1
        assert hist == {1: 24, 0: 32}


class TestSections:
    def test_all_sections_of_hexagon(self, hx):
        secs = hexagon.all_hyperplane_sections(hx)
        assert len(secs) == 63
        for rep in secs:
            assert len(rep.line_ids) == 15
            assert len(rep.s_points) == 7
            degs = Counter(d for _, d in rep.degrees)
            assert degs == {1: 24, 3: 7}  # x1 + x3 = 31, x1 + 3 x3 = 45

    def test_hexagon_all_pencil(self, hx):
        for rep in hexagon.all_hyperplane_sections(hx):
            assert hexagon.section_case(hx, rep) == "pencil"

    def test_singer_has_badex_sections(self, singer_graphs):
        for g in singer_graphs:
            cases = Counter(
                hexagon.section_case(g, rep)
                for rep in hexagon.all_hyperplane_sections(g)
            )
            assert cases["badex"] >= 1

    def test_badex_section_intersection_sizes(self, singer_graphs):
        g = singer_graphs[0]
        rep = next(
            r
            for r in hexagon.all_hyperplane_sections(g)
            if hexagon.section_case(g, r) == "badex"
        )
        s_set = set(rep.s_points)
        sizes = set()
        for p in rep.s_points:
            pt = gf.subspace_from_words([p], 6)
            sizes.add(len(set(hexagon.pi_plane(g, pt).nonzero_words()) & s_set))
        assert sizes == {3, 4}

    def test_section_by_subspace_argument(self, hx):
        rep_by_dual = hexagon.hyperplane_section(hx, 1)
        rep_by_sub = hexagon.hyperplane_section(hx, rep_by_dual.hyperplane())
        assert rep_by_sub == rep_by_dual

    def test_solid_census_on_sections(self, hx, singer_graphs):
        for g in (hx, singer_graphs[0]):
            for dual in (1, 9, 33):
                rep = hexagon.hyperplane_section(g, dual)
                census = hexagon.solid_census(rep)
                assert len(census) == 31
                assert all(p == l for _, p, l in census)


class TestBadex:
    def test_counts(self):
        cfg = hexagon.build_badex()
        assert len(cfg.line_ids) == 15
        assert len(cfg.q_points) == 7

    def test_cover_25(self):
        cfg = hexagon.build_badex()
        tab = hexagon.line_table(5)
        qset = set(cfg.q_points)
        through = [i for i in cfg.line_ids if set(tab.lines[i]) & qset]
        assert len(through) == 13
        cover = set()
        for i in through:
            cover.update(tab.lines[i])
        assert len(cover) == 25

    def test_solid_census(self):
        cfg = hexagon.build_badex()
        census = hexagon.solid_census(cfg)
        ones = [h for h, p, l in census if l == 1]
        assert len(ones) == 3
        assert tuple(sorted(ones)) == cfg.special_solids

    def test_special_solids_are_printed_spans(self):
        cfg = hexagon.build_badex()
        tab = hexagon.line_table(5)
        P = dict(enumerate(cfg.q_points, start=1))
        m_pts = list(tab.lines[cfg.m_line])
        expected = []
        for extra in ((P[3], P[2] ^ P[4]), (P[4], P[3] ^ P[5]), (P[7], P[3] ^ P[6])):
            s = gf.subspace_from_words(m_pts + list(extra), 5)
            expected.append(frozenset(s.nonzero_words()))
        got = []
        for h in cfg.special_solids:
            got.append(frozenset(p for p in range(1, 32) if bin(p & h).count("1") % 2 == 0))
        assert sorted(expected) == sorted(got)

    def test_ell_and_gamma_disjoint(self):
        cfg = hexagon.build_badex()
        tab = hexagon.line_table(5)
        assert not (set(tab.lines[cfg.ell]) & set(cfg.gamma.nonzero_words()))


class TestOrbitPipeline:
    def test_orbit_size(self):
        assert len(hexagon.badex_orbit()) == 1_666_560

    def test_z_report(self):
        rep = hexagon.badex_orbit_z_report()
        assert rep.orbit_size == 1_666_560
        assert rep.one_line_in_solid == 161_280
        assert rep.with_line_r == 4_608
        assert all(c == 1536 for _, c in rep.bucket_counts)
        assert rep.z == 1536 and rep.agree
        assert hexagon.badex_orbit_z() == 1536

    def test_z_accepts_solid_subspace(self):
        cfg = hexagon.build_badex()
        dual = cfg.special_solids[1]
        pts = [p for p in range(1, 32) if bin(p & dual).count("1") % 2 == 0]
        solid = gf.subspace_from_words(pts, 5)
        assert hexagon.badex_orbit_z(solid) == 1536

    def test_couple_budget_refusal(self):
        from qdeza.errors import BudgetExceededError

        with pytest.raises(BudgetExceededError):
            hexagon.enumerate_couples(budget=1000)

    def test_couples_counts(self, couples):
        assert couples.candidate_pool == 2 * 1536 * 1536
        assert len(couples.retained) == 1120
        assert couples.per_assignment == (560, 560)

    def test_union_invariant_sample(self, couples):
        for c in couples.retained[::97]:
            assert hexagon.couple_union_degrees_ok(c)

    def test_good_line_histogram(self, couples):
        hist = Counter(hexagon.good_lines(c)[1] for c in couples.retained)
        assert max(hist) == 20
        assert hist[20] == 256

    def test_extension_split(self, couples):
        equality = [c for c in couples.retained if hexagon.good_lines(c)[1] == 20]
        tags = Counter()
        failures = 0
        for c in equality:
            try:
                _, tag = hexagon.extend_and_identify(c)
                tags[tag] += 1
            except QdezaError:
                failures += 1
        assert tags == {"singer-type": 192}
        assert failures == 64

    def test_failing_extension_has_three_values(self, couples):
        # the 64 counterexamples to the universal extension claim are
        # 2-regular with a third common-neighbor value 5
        equality = [c for c in couples.retained if hexagon.good_lines(c)[1] == 20]
        failing = None
        for c in equality:
            try:
                hexagon.extend_and_identify(c)
            except ClassificationError as exc:
                failing = (c, exc)
                break
        assert failing is not None
        c, exc = failing
        values = sorted(v for _, v in exc.witnesses)
        assert values == [0, 1, 5]

    def test_extend_rejects_non_equality_couple(self, couples):
        c = next(x for x in couples.retained if hexagon.good_lines(x)[1] < 20)
        with pytest.raises(QdezaError):
            hexagon.extend_and_identify(c)

    def test_real_graph_roundtrip_through_the_pipeline(self, singer_graphs):
        # restrict an actual graph to the three sections through a solid:
        # the couple must be retained, its 20 good lines must be exactly
        # the remaining lines of the graph, and the extension must
        # reproduce the graph
        g = singer_graphs[0]
        g_ids = set(hexagon.graph_line_ids(g))
        rep = next(
            r
            for r in hexagon.all_hyperplane_sections(g)
            if hexagon.section_case(g, r) == "badex"
        )
        tab6 = hexagon.line_table(6)
        h_pts = [p for p in range(1, 64) if bin(p & rep.dual).count("1") % 2 == 0]
        sigma = r_id = None
        seen = set()
        for h2 in range(1, 64):
            if h2 == rep.dual or h2 in seen:
                continue
            seen.add(h2 ^ rep.dual)
            solid_pts = [p for p in h_pts if bin(p & h2).count("1") % 2 == 0]
            inside = [i for i in rep.line_ids if set(tab6.lines[i]) <= set(solid_pts)]
            if len(inside) == 1:
                sigma = gf.subspace_from_words(solid_pts, 6)
                r_id = inside[0]
                break
        assert sigma is not None
        res = hexagon.enumerate_couples(sigma, r_id, rep.line_ids)
        assert len(res.retained) == 1120
        duals = [
            h for h in range(1, 64)
            if all(bin(p & h).count("1") % 2 == 0 for p in sigma.rows) and h != rep.dual
        ]
        own_sections = {
            frozenset(i for i in g_ids if all(bin(p & h).count("1") % 2 == 0
                                              for p in tab6.lines[i][:2]))
            for h in duals
        }
        match = [
            c
            for c in res.retained
            if {frozenset(c.lines_h1), frozenset(c.lines_h2)} == own_sections
        ]
        assert len(match) == 1
        couple = match[0]
        good, count = hexagon.good_lines(couple)
        assert count == 20
        assert set(good) == g_ids - set(couple.union_ids())
        extended, tag = hexagon.extend_and_identify(couple)
        assert tag == "singer-type"
        assert extended.edges == g.edges
