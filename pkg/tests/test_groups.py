import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matched_transforms import (
    GroupAction,
    InputError,
    Permutation,
    closure_enumerate,
    from_generators,
    is_invariant,
    make_boolean,
    make_cyclic,
    make_dihedral,
    make_dyadic_wreath,
    make_hybrid,
    make_product,
    make_trivial,
    make_wreath,
    pair_orbits,
    parse_group_spec,
    parse_permutation,
    random_psd,
    reynolds_project,
)

from helpers import catalog_actions, closure_set

CATALOG = catalog_actions()


class TestPermutation:
    def test_identity_matrix(self):
        assert np.array_equal(Permutation.identity(3).to_matrix().real, np.eye(3))

    def test_swap_matrix(self):
        p = Permutation((1, 0))
        assert np.array_equal(p.to_matrix().real, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_cycle_matrix_column_rule(self):
        # 0 -> 1 -> 2 -> 0: P e_j = e_{images[j]}
        p = Permutation((1, 2, 0))
        mat = p.to_matrix().real
        assert mat[1, 0] == 1 and mat[2, 1] == 1 and mat[0, 2] == 1
        assert np.sum(mat) == 3

    def test_matrix_exactly_unitary(self):
        p = Permutation((3, 1, 0, 2))
        mat = p.to_matrix()
        assert np.array_equal(mat.conj().T @ mat, np.eye(4).astype(complex))

    def test_rejects_non_bijection(self):
        with pytest.raises(InputError):
            Permutation((0, 0, 1))

    def test_cycle_string(self):
        assert Permutation.identity(4).cycle_string() == "()"
        assert Permutation((1, 2, 0, 3)).cycle_string() == "(0 1 2)"
        assert Permutation((1, 0, 3, 2)).cycle_string() == "(0 1)(2 3)"

    @settings(max_examples=50, deadline=None)
    @given(st.permutations(list(range(6))), st.permutations(list(range(6))))
    def test_compose_matches_matrix_product(self, a, b):
        pa, pb = Permutation(tuple(a)), Permutation(tuple(b))
        lhs = pa.compose(pb).to_matrix()
        assert np.array_equal(lhs, pa.to_matrix() @ pb.to_matrix())

    @settings(max_examples=50, deadline=None)
    @given(st.permutations(list(range(7))))
    def test_inverse(self, a):
        p = Permutation(tuple(a))
        assert p.compose(p.inverse()).is_identity()
        assert p.inverse().compose(p).is_identity()


class TestParsePermutation:
    def test_image_list(self):
        assert parse_permutation("1 0 2").images == (1, 0, 2)

    def test_cycles_with_degree(self):
        p = parse_permutation("(0 1)(2 3)", degree=5)
        assert p.images == (1, 0, 3, 2, 4)

    def test_cycle_roundtrip(self):
        p = Permutation((2, 0, 1, 4, 3))
        assert parse_permutation(p.cycle_string(), degree=5) == p

    def test_identity_cycles(self):
        assert parse_permutation("()", degree=3).is_identity()

    def test_bad_input(self):
        with pytest.raises(InputError):
            parse_permutation("(0 1")
        with pytest.raises(InputError):
            parse_permutation("0 0 1")


class TestConstructors:
    def test_cyclic_m1(self):
        act = make_cyclic(1)
        assert act.degree == 1 and act.generators[0].is_identity()

    def test_cyclic_shift_images(self):
        assert make_cyclic(4).generators[0].images == (1, 2, 3, 0)

    def test_cyclic_closure_order(self):
        assert closure_enumerate(make_cyclic(6), cap=100).count == 6

    def test_dihedral_reflection_images(self):
        act = make_dihedral(2)
        sigma = act.generators[1]
        assert sigma.images == (3, 2, 1, 0)

    def test_dihedral_closure_order_4m(self):
        # full dihedral group of the 2M-cycle: order 4M
        assert closure_enumerate(make_dihedral(2), cap=100).count == 8
        assert closure_enumerate(make_dihedral(6), cap=100).count == 24

    def test_dihedral_degree_m_variant(self):
        act = make_dihedral(3, degree_m=True)
        assert act.degree == 3
        assert closure_enumerate(act, cap=100).count == 6

    def test_boolean_n1(self):
        act = make_boolean(1)
        assert act.degree == 2 and act.generators[0].images == (1, 0)

    def test_boolean_xor_images(self):
        assert make_boolean(2).generators[0].images == (1, 0, 3, 2)

    def test_boolean_closure_order(self):
        assert closure_enumerate(make_boolean(3), cap=100).count == 8

    def test_dyadic_wreath_l1(self):
        act = make_dyadic_wreath(1)
        assert act.degree == 2 and len(act.generators) == 1

    def test_dyadic_wreath_l2_order(self):
        act = make_dyadic_wreath(2)
        assert len(act.generators) == 3
        assert closure_enumerate(act, cap=1000).count == 8

    def test_dyadic_wreath_generator_count(self):
        assert len(make_dyadic_wreath(5).generators) == 31

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_dyadic_wreath_order_formula(self, level):
        cap = 1 << (1 << level)
        res = closure_enumerate(make_dyadic_wreath(level), cap=cap)
        assert res.count == 2 ** (2**level - 1)

    def test_dyadic_wreath_l5_overflow(self):
        res = closure_enumerate(make_dyadic_wreath(5), cap=10**6)
        assert res.overflowed and res.elements is None
        assert res.count > 10**6

    def test_wreath_single_level_is_dyadic(self):
        a = make_wreath([(2, "cyclic")])
        b = make_dyadic_wreath(1)
        assert [g.images for g in a.generators] == [g.images for g in b.generators]

    def test_wreath_two_level_order(self):
        assert closure_enumerate(make_wreath([(2, "cyclic"), (2, "cyclic")]), cap=100).count == 8

    def test_wreath_symmetric_pair_orbits(self):
        assert pair_orbits(make_wreath([(3, "symmetric"), (2, "symmetric")])).orbit_count == 3

    def test_hybrid_small_order(self):
        act = make_hybrid(2, 2)
        assert act.degree == 4
        assert closure_enumerate(act, cap=100).count == 8

    def test_hybrid_paper_parameters(self):
        act = make_hybrid(8, 4)
        assert act.degree == 32 and len(act.generators) == 3

    def test_hybrid_pair_orbits(self):
        assert pair_orbits(make_hybrid(4, 3)).orbit_count == 5

    def test_hybrid_closure_order(self):
        # |Z_W wreath S_K| = W^K * K!
        assert closure_enumerate(make_hybrid(4, 3), cap=10**4).count == 4**3 * 6

    def test_product_trivial_blocks(self):
        act = make_product(make_trivial(2), make_cyclic(3))
        images = act.generators[-1].images
        assert images == (1, 2, 0, 4, 5, 3)

    def test_product_closure_order(self):
        assert closure_enumerate(make_product(make_cyclic(2), make_cyclic(2)), cap=10).count == 4

    def test_product_pair_orbits(self):
        act = make_product(make_cyclic(3), make_cyclic(4))
        assert pair_orbits(act).orbit_count == 12

    def test_from_generators_trivial(self):
        act = from_generators([Permutation.identity(4)], "t")
        assert closure_enumerate(act, cap=10).count == 1

    def test_from_generators_cycle(self):
        act = from_generators([Permutation((1, 2, 3, 4, 0))], "c5")
        assert closure_set(act) == closure_set(make_cyclic(5))

    def test_from_generators_degree_mismatch(self):
        with pytest.raises(InputError):
            from_generators([Permutation((1, 0)), Permutation((0, 1, 2))], "bad")

    def test_generators_are_bijections(self):
        for act in CATALOG:
            for g in act.generators:
                assert sorted(g.images) == list(range(act.degree))


class TestPairOrbits:
    def test_trivial_all_singletons(self):
        part = pair_orbits(make_trivial(3))
        assert part.orbit_count == 9

    def test_dyadic_wreath_three_levels(self):
        assert pair_orbits(make_dyadic_wreath(3)).orbit_count == 4

    @pytest.mark.parametrize("level", [1, 2, 4, 5, 6])
    def test_dyadic_wreath_l_plus_1(self, level):
        assert pair_orbits(make_dyadic_wreath(level)).orbit_count == level + 1

    def test_cyclic_lag_classes(self):
        part = pair_orbits(make_cyclic(5))
        assert part.orbit_count == 5
        lag = (np.arange(5)[None, :] - np.arange(5)[:, None]) % 5
        # same lag iff same orbit
        for a in range(5):
            ids = part.orbit_id[lag == a]
            assert len(set(ids.tolist())) == 1

    def test_orbit_ids_first_appearance_order(self):
        part = pair_orbits(make_cyclic(4))
        seen = []
        for i in range(4):
            for j in range(4):
                v = int(part.orbit_id[i, j])
                if v not in seen:
                    seen.append(v)
        assert seen == list(range(part.orbit_count))

    def test_orbit_count_equals_distinct_projected_values(self):
        from matched_transforms.rng import normal_rows

        for act in CATALOG:
            if act.degree > 64:
                continue
            n = act.degree
            generic = normal_rows(13, n, n + (n % 2)).astype(float)[:, :n]
            proj = reynolds_project(generic, act)
            distinct = len(np.unique(np.round(proj.real, 9)))
            assert distinct == pair_orbits(act).orbit_count


class TestReynolds:
    def test_trivial_unchanged(self):
        r = random_psd(4, 1)
        assert np.allclose(reynolds_project(r, make_trivial(4)), r)

    def test_swap_average(self):
        act = from_generators([Permutation((1, 0))], "swap")
        out = reynolds_project(np.diag([1.0, 2.0]), act)
        assert np.allclose(out, np.diag([1.5, 1.5]))

    def test_matches_explicit_group_average(self):
        act = make_dyadic_wreath(2)
        r = random_psd(4, 5)
        elements = closure_enumerate(act, cap=100).elements
        acc = np.zeros_like(r)
        for p in elements:
            mat = p.to_matrix()
            acc += mat @ r @ mat.conj().T
        acc /= len(elements)
        assert np.max(np.abs(acc - reynolds_project(r, act))) <= 1e-12

    @pytest.mark.parametrize("act", CATALOG, ids=lambda a: a.name)
    def test_idempotent_and_invariant(self, act):
        r = random_psd(act.degree, 11)
        once = reynolds_project(r, act)
        twice = reynolds_project(once, act)
        assert np.max(np.abs(once - twice)) <= 1e-12
        assert is_invariant(once, act, 1e-10)

    def test_preserves_hermitian_psd(self):
        act = make_cyclic(6)
        r = random_psd(6, 3)
        out = reynolds_project(r, act)
        assert np.max(np.abs(out - out.conj().T)) < 1e-14
        assert np.min(np.linalg.eigvalsh(out)) >= -1e-12


class TestIsInvariant:
    def test_trivial_always(self):
        assert is_invariant(random_psd(3, 2), make_trivial(3), 1e-12)

    def test_circulant(self):
        r = reynolds_project(random_psd(6, 4), make_cyclic(6))
        assert is_invariant(r, make_cyclic(6), 1e-12)

    def test_diag_swap_false(self):
        act = from_generators([Permutation((1, 0))], "swap")
        assert not is_invariant(np.diag([1.0, 2.0]), act, 1e-6)


class TestCommutantNesting:
    def test_dihedral_invariance_implies_cyclic(self):
        m = 5
        act = make_dihedral(m)
        r = reynolds_project(random_psd(2 * m, 9), act)
        assert is_invariant(r, make_cyclic(2 * m), 1e-10)


class TestClosure:
    def test_partial_overflow_count(self):
        res = closure_enumerate(make_cyclic(10), cap=4)
        assert res.overflowed and res.count == 5 and res.elements is None

    def test_identity_first(self):
        res = closure_enumerate(make_cyclic(5), cap=10)
        assert res.elements[0].is_identity()


class TestGroupSpecLanguage:
    @pytest.mark.parametrize(
        "spec,degree,order",
        [
            ("trivial:3", 3, 1),
            ("cyclic:5", 5, 5),
            ("dihedral:3", 6, 12),
            ("dihedralM:4", 4, 8),
            ("boolean:2", 4, 4),
            ("dyadic-wreath:2", 4, 8),
            ("wreath:2c,2c", 4, 8),
            ("hybrid:2,2", 4, 8),
            ("product:(cyclic:2,cyclic:3)", 6, 6),
        ],
    )
    def test_specs(self, spec, degree, order):
        act = parse_group_spec(spec)
        assert act.degree == degree
        assert closure_enumerate(act, cap=100).count == order

    def test_perms_file(self, tmp_path):
        path = tmp_path / "gens.txt"
        path.write_text("1 0 2\n0 2 1\n")
        act = parse_group_spec(f"perms:{path}")
        assert act.degree == 3
        assert closure_enumerate(act, cap=10).count == 6

    def test_bad_specs(self):
        for spec in ["", "cyclic", "cyclic:", "nope:3", "product:(cyclic:2)", "wreath:2x"]:
            with pytest.raises(InputError):
                parse_group_spec(spec)

    def test_nested_product(self):
        act = parse_group_spec("product:(product:(cyclic:2,cyclic:2),cyclic:2)")
        assert act.degree == 8
        assert closure_enumerate(act, cap=100).count == 8
