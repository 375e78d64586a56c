from fractions import Fraction

import pytest

from powerdiv.core.chebmodel import (
    affine_fpf_census,
    build_model,
    count_fixed_point_free,
    fpf_fraction,
    group_axioms_hold,
    is_transitive,
)
from powerdiv.services.chebmodel_service import ChebModelService
from powerdiv.utils.validation import UnsupportedCase


class TestModel:
    def test_cubic_model_is_s3(self):
        model = build_model(2, 3)
        assert model.order == 6
        assert model.provenance == "metacyclic-full"
        assert sorted(model.elements)[0] == (0, 1, 2)
        assert model.validity_checks.capelli_irreducible
        assert model.validity_checks.squarefree

    def test_quadratic_model_is_swap(self):
        model = build_model(2, 2)
        assert model.elements == [(0, 1), (1, 0)]
        assert model.provenance == "cyclic-kummer"

    @pytest.mark.parametrize(
        "t, k",
        [(4, 3), (8, 3), (1, 3), (-1, 5), (0, 2), (2, 4), (2, 6), (4, 2), (9, 2)],
    )
    def test_unsupported_cases(self, t, k):
        with pytest.raises(UnsupportedCase):
            build_model(t, k)

    @pytest.mark.parametrize("t", [2, -2, 3, -3, 5, 6, 7, 10])
    @pytest.mark.parametrize("k", [2, 3, 5, 7])
    def test_models_are_transitive_groups(self, t, k):
        model = build_model(t, k)
        assert group_axioms_hold(model.elements)
        assert is_transitive(model.elements)
        assert (k * (k - 1 if k > 2 else 1)) == model.order
        assert count_fixed_point_free(model.elements) > 0


class TestFixedPointFree:
    @pytest.mark.parametrize("k, expected", [(2, Fraction(1, 2)), (3, Fraction(1, 3)), (5, Fraction(1, 5)), (7, Fraction(1, 7))])
    def test_two_counting_paths_agree(self, k, expected):
        prediction = fpf_fraction(build_model(2, k))
        assert prediction.fpf_fraction == expected
        assert affine_fpf_census(k) == expected

    def test_prediction_serializes_exactly(self):
        data = fpf_fraction(build_model(3, 5)).model_dump(mode="json")
        assert data == {"t": 3, "k": 5, "fpf_fraction": "1/5"}


class TestHarness:
    @pytest.mark.parametrize("t", [2, -2, 3, -3, 5, 6, 7, 10])
    @pytest.mark.parametrize("k", [2, 3, 5, 7])
    def test_existence_matches_witnesses(self, test_settings, t, k):
        report = ChebModelService(test_settings).harness_lemma23(t, k, 5000)
        assert report.existence_check is True
        assert report.n_witnesses > 0

    def test_unsupported_propagates(self, test_settings):
        with pytest.raises(UnsupportedCase):
            ChebModelService(test_settings).harness_lemma23(8, 3, 10**4)

    def test_sieve_only_fallback(self, test_settings):
        report = ChebModelService(test_settings).run(8, 3, 10**5)
        assert report.verdict == "sieve-only"
        assert report.predicted is None
        assert report.n_witnesses == 0

    @pytest.mark.slow
    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_density_harness(self, test_settings, k):
        report = ChebModelService(test_settings).harness_lemma23(2, k, 10**6)
        assert report.verdict == "pass"
        assert report.density_check and report.existence_check
