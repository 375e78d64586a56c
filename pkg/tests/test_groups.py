import json
import random

import numpy as np
import pytest

from powerdiv.core.catalog import (
    catalog,
    catalog_sweep,
    cyclic,
    dihedral,
    direct_product,
    from_cycles,
    load_cayley,
    parse_group_spec,
    quaternion,
    symmetric,
)
from powerdiv.core.groups import (
    FiniteGroup,
    class_power,
    conjugacy_classes,
    generates,
    h2_check,
    is_cyclic_p_group,
    subgroup_closure,
    union_of_conjugates,
)
from powerdiv.models.schemas import ConjClass
from powerdiv.services.group_service import GroupService
from powerdiv.utils.validation import TooLarge, TrivialGroup, UnknownGroup, ValidationError


def sizes(G):
    return sorted(c.size for c in conjugacy_classes(G))


def singleton(g):
    return ConjClass(representative=g, members=(g,))


class TestConstruction:
    def test_catalog_orders(self):
        assert symmetric(3).order == 6
        assert quaternion(8).order == 8
        assert catalog("alternating", 5).order == 60
        assert catalog("e", 8).order == 8
        assert catalog("elementary_abelian", 3, 2).order == 9
        assert parse_group_spec("cyclic:12 x cyclic:2").order == 24

    def test_product_is_abelian(self):
        G = parse_group_spec("cyclic:12 x cyclic:2")
        assert np.array_equal(G.table, G.table.T)
        assert not is_cyclic_p_group(G)

    def test_permutation_generators(self):
        G = from_cycles(["(1 2)", "(1 2 3)"])
        assert G.order == 6
        assert G.source == "permutation generators"
        assert sizes(G) == [1, 2, 3]

    def test_rejects_bad_tables(self):
        with pytest.raises(ValidationError):
            FiniteGroup([[0, 1], [1, 1]])
        with pytest.raises(ValidationError):
            FiniteGroup([[1, 0], [0, 1]])
        # a Latin square with identity 0 that is not associative
        loop = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
        with pytest.raises(ValidationError):
            FiniteGroup(loop)

    def test_unknown_and_oversized(self):
        with pytest.raises(UnknownGroup):
            catalog("mathieu", 11)
        with pytest.raises(UnknownGroup):
            catalog("symmetric", 7)
        with pytest.raises(TooLarge):
            cyclic(10**4 + 1)
        with pytest.raises(ValidationError):
            parse_group_spec("cyclic:x")

    def test_cayley_file(self, tmp_path):
        path = tmp_path / "c3.json"
        path.write_text(json.dumps({"order": 3, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}))
        G = load_cayley(path)
        assert G.order == 3 and is_cyclic_p_group(G)
        path.write_text(json.dumps({"order": 4, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}))
        with pytest.raises(ValidationError):
            load_cayley(path)


class TestClasses:
    def test_class_sizes(self):
        assert sizes(symmetric(3)) == [1, 2, 3]
        assert sizes(cyclic(6)) == [1] * 6
        assert sizes(quaternion(8)) == [1, 1, 2, 2, 2]
        assert sizes(dihedral(4)) == [1, 1, 2, 2, 2]

    def test_classes_partition_the_group(self):
        for G in [symmetric(4), quaternion(8), dihedral(6)]:
            members = [g for c in conjugacy_classes(G) for g in c.members]
            assert sorted(members) == list(range(G.order))
            assert conjugacy_classes(G)[0].members == (0,)

    def test_quaternion_squares(self):
        G = quaternion(8)
        classes = conjugacy_classes(G)
        center = classes[1]
        assert center.size == 1
        for C in classes[2:]:
            assert class_power(G, C, 2, classes) == center

    def test_power_at_element_order_is_trivial(self):
        G = symmetric(4)
        for C in conjugacy_classes(G):
            assert class_power(G, C, G.element_order(C.representative)).members == (0,)

    def test_odd_power_of_transpositions(self):
        G = symmetric(3)
        transpositions = conjugacy_classes(G)[2]
        assert class_power(G, transpositions, 3) == transpositions

    def test_class_power_is_well_defined(self):
        for G in [symmetric(4), quaternion(8), dihedral(5), catalog("alternating", 4)]:
            classes = conjugacy_classes(G)
            for C in classes:
                for a in range(1, G.exponent + 1):
                    targets = {G.power(g, a) for g in C.members}
                    assert len({frozenset(G.conjugate_orbit(t)) for t in targets}) == 1


class TestGeneration:
    def test_examples(self):
        S3 = symmetric(3)
        assert generates(S3, [conjugacy_classes(S3)[2]])
        C6 = cyclic(6)
        assert generates(C6, [singleton(2), singleton(3)])
        assert not generates(C6, [singleton(2)])
        assert subgroup_closure(C6, [2]) == frozenset({0, 2, 4})

    def test_all_nontrivial_classes_generate(self):
        for _, G in catalog_sweep(12):
            assert generates(G, conjugacy_classes(G)[1:])

    def test_group_is_never_union_of_conjugates_of_proper_subgroup(self):
        for G in [symmetric(4), dihedral(5), quaternion(8), catalog("alternating", 4), cyclic(9)]:
            for g in range(1, G.order):
                H = subgroup_closure(G, [g])
                if len(H) < G.order:
                    assert len(union_of_conjugates(G, H)) < G.order


class TestH2:
    def test_cyclic_p_group_fails(self):
        assert h2_check(cyclic(4)).verdict == "fails"
        assert h2_check(cyclic(8)).verdict == "fails"
        assert h2_check(cyclic(2)).verdict == "fails"

    def test_s3_witness(self):
        G = symmetric(3)
        witness = h2_check(G)
        classes = conjugacy_classes(G)
        assert witness.verdict == "holds"
        assert witness.generating_classes == [classes[2]]
        assert witness.C == classes[1]

    def test_c6_witness(self):
        witness = h2_check(cyclic(6))
        assert witness.verdict == "holds"
        assert witness.generating_classes == [singleton(2), singleton(3)]
        assert witness.C == singleton(1)

    def test_witness_is_sound(self):
        for G in [quaternion(8), dihedral(4), symmetric(4), parse_group_spec("cyclic:3 x cyclic:3")]:
            witness = h2_check(G)
            assert witness.verdict == "holds"
            assert generates(G, witness.generating_classes)
            assert witness.C.members != (0,)
            powers = {class_power(G, Ci, a) for Ci in witness.generating_classes for a in range(1, G.exponent + 1)}
            assert witness.C not in powers

    def test_trivial_group(self):
        with pytest.raises(TrivialGroup):
            h2_check(cyclic(1))

    def test_is_cyclic_p_group(self):
        assert is_cyclic_p_group(cyclic(8))
        assert not is_cyclic_p_group(cyclic(6))
        assert not is_cyclic_p_group(quaternion(8))
        assert not is_cyclic_p_group(direct_product(cyclic(2), cyclic(2)))

    def test_verdict_invariant_under_relabeling(self):
        rng = random.Random(5)
        for G in [symmetric(4), cyclic(9), quaternion(8), dihedral(6), cyclic(16)]:
            perm = [0] + rng.sample(range(1, G.order), G.order - 1)
            assert h2_check(G.relabel(perm)).verdict == h2_check(G).verdict

    def test_small_sweep(self):
        report = GroupService().sweep(12)
        assert report.exceptions == []
        names = {r.group for r in report.reports}
        assert {"quaternion:8", "dihedral:4", "alternating:4", "cyclic:2 x cyclic:4"} <= names

    @pytest.mark.slow
    def test_cyclic_p_group_characterization_to_order_24(self):
        report = GroupService().sweep(24)
        assert report.exceptions == []
        assert {"symmetric:4", "cyclic:3 x cyclic:3"} <= {r.group for r in report.reports}
        for r in report.reports:
            assert (r.witness.verdict == "fails") == r.is_cyclic_p_group
