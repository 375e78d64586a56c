from fractions import Fraction

import pytest

from powerdiv.config.settings import Settings
from powerdiv.core.parser import parse_poly
from powerdiv.services import sieve_service as sieve_module
from powerdiv.services.cache_service import SieveCache, serialize_records
from powerdiv.services.sieve_service import (
    SieveService,
    excluded_primes,
    rational_root_obstruction,
)
from powerdiv.utils.validation import CapExhausted, ValidationError


def witnesses(records):
    return [r.p for r in records if r.is_witness]


def cube_oracle(hi):
    """p = 1 mod 3 with 2^((p-1)/3) != 1 mod p."""
    return [p for p in range(5, hi) if all(p % d for d in range(2, p))
            and p % 3 == 1 and pow(2, (p - 1) // 3, p) != 1]


class TestSieve:
    def test_cube_witnesses_below_forty(self, sieve_service):
        job = sieve_service.make_job(parse_poly("T - 2"), 3, 2, 40)
        assert witnesses(sieve_service.sieve(job)) == [7, 13, 19, 37] == cube_oracle(40)

    def test_cube_witnesses_match_oracle(self, sieve_service):
        job = sieve_service.make_job(parse_poly("T - 2"), 3, 2, 3000)
        assert witnesses(sieve_service.sieve(job)) == cube_oracle(3000)

    def test_perfect_cube_has_no_witness(self, sieve_service):
        job = sieve_service.make_job(parse_poly("T - 8"), 3, 2, 10**5)
        records = sieve_service.sieve(job)
        assert records
        assert witnesses(records) == []

    def test_k_equal_one_has_no_witness(self, sieve_service):
        for text in ["T - 2", "(T-2)*(T-3)", "T^2 - 2"]:
            job = sieve_service.make_job(parse_poly(text), 1, 2, 5000)
            assert witnesses(sieve_service.sieve(job)) == []

    def test_records_skip_excluded_primes_in_order(self, sieve_service):
        job = sieve_service.make_job(parse_poly("T^2 - 5*T + 6"), 6, 2, 2000)
        assert job.excluded == (2, 3)
        ps = [r.p for r in sieve_service.sieve(job)]
        assert ps == sorted(ps)
        assert not set(ps) & set(job.excluded)
        assert ps[0] == 5

    def test_range_validation(self, sieve_service):
        with pytest.raises(ValidationError):
            sieve_service.make_job(parse_poly("T - 2"), 3, 1, 100)
        with pytest.raises(ValidationError):
            sieve_service.make_job(parse_poly("T - 2"), 0, 2, 100)
        with pytest.raises(ValidationError):
            sieve_service.make_job(parse_poly("T - 2"), 3, 2, (1 << 62) + 1)


class TestInvariants:
    @pytest.mark.parametrize("text, k", [("T - 2", 3), ("T^2 - 2", 4), ("(T-2)*(T-3)", 6), ("T^3 - T + 5", 6)])
    def test_implication_rules_hold(self, sieve_service, text, k):
        job = sieve_service.make_job(parse_poly(text), k, 2, 20000)
        assert sieve_service.check_implications(job, sieve_service.sieve(job)) == []

    def test_witnesses_are_prefix_stable(self, sieve_service):
        P = parse_poly("T - 3")
        short = witnesses(sieve_service.sieve(sieve_service.make_job(P, 5, 2, 3000)))
        long = witnesses(sieve_service.sieve(sieve_service.make_job(P, 5, 2, 30000)))
        assert long[: len(short)] == short

    def test_parallel_run_matches_serial(self, tmp_path):
        P = parse_poly("T^2 - 3")
        serial = SieveService(Settings(cache_dir=tmp_path / "a", workers=1, use_cache=False, segment_size=4096))
        parallel = SieveService(Settings(cache_dir=tmp_path / "b", workers=3, use_cache=False, segment_size=4096))
        job = serial.make_job(P, 4, 2, 50000)
        assert serial.sieve(job) == parallel.sieve(job)


class TestCache:
    def test_cache_hit_is_byte_identical(self, test_settings):
        service = SieveService(test_settings)
        job = service.make_job(parse_poly("T - 2"), 3, 2, 5000)
        fresh = service.sieve(job)
        path = SieveCache(test_settings).path_for(job)
        first_bytes = path.read_bytes()
        assert first_bytes == serialize_records(job, fresh).encode("ascii")

        cached = service.sieve(job)
        assert cached == fresh
        uncached = SieveService(test_settings.with_overrides(use_cache=False)).sieve(job)
        assert serialize_records(job, uncached).encode("ascii") == first_bytes

    def test_header_mismatch_is_ignored(self, test_settings):
        service = SieveService(test_settings)
        job = service.make_job(parse_poly("T - 2"), 3, 2, 500)
        service.sieve(job)
        path = SieveCache(test_settings).path_for(job)
        path.write_text("# something else\n7 1 1\n", encoding="ascii")
        assert SieveCache(test_settings).load(job) is None
        assert witnesses(service.sieve(job))[0] == 7


class TestDensity:
    def test_zero_density_for_perfect_cube(self, sieve_service):
        report = sieve_service.witness_count(sieve_service.make_job(parse_poly("T - 8"), 3, 2, 10**5))
        assert report.observed == 0
        assert report.stderr == 0
        assert report.n_primes > 0
        assert report.predicted is None

    def test_report_fields(self, sieve_service):
        report = sieve_service.witness_count(sieve_service.make_job(parse_poly("T - 2"), 3, 2, 40))
        assert report.n_witnesses == 4
        assert report.observed == Fraction(4, report.n_primes)
        assert report.predicted == Fraction(1, 3)
        assert report.implication_violations == 0

    @pytest.mark.slow
    @pytest.mark.parametrize("k, expected", [(2, Fraction(1, 2)), (3, Fraction(1, 3)), (5, Fraction(1, 5))])
    def test_density_below_one_million(self, sieve_service, k, expected):
        report = sieve_service.witness_count(sieve_service.make_job(parse_poly("T - 2"), k, 2, 10**6))
        assert report.predicted == expected
        assert abs(report.observed_float - float(expected)) <= 4 * report.stderr
        assert report.within_tolerance is True
        assert report.implication_violations == 0


class TestFirstWitnesses:
    def test_first_witness(self, sieve_service):
        assert sieve_service.first_witnesses(parse_poly("T - 2"), 3, 1, 100) == [7]

    def test_cap_exhausted_for_perfect_cube(self, sieve_service):
        with pytest.raises(CapExhausted) as info:
            sieve_service.first_witnesses(parse_poly("T - 8"), 3, 1, 10**5)
        assert info.value.partial == []

    def test_cap_exhausted_for_k_one(self, sieve_service):
        with pytest.raises(CapExhausted) as info:
            sieve_service.first_witnesses(parse_poly("(T-2)*(T-3)"), 1, 1, 10**4)
        assert info.value.partial == []

    def test_excluded_set_computed_once(self, tmp_path, monkeypatch):
        calls = []
        real = sieve_module.excluded_primes

        def counting(P, k):
            calls.append((P, k))
            return real(P, k)

        monkeypatch.setattr(sieve_module, "excluded_primes", counting)
        settings = Settings(cache_dir=tmp_path, workers=1, use_cache=False, segment_size=256)
        found = SieveService(settings).first_witnesses(parse_poly("T - 2"), 3, 150, 10**5)
        assert len(calls) == 1
        assert found == cube_oracle(found[-1] + 1)

    def test_one_pool_per_search(self, tmp_path, monkeypatch):
        context = sieve_module._pool_context()
        opened = []

        class CountingContext:
            def Pool(self, *args, **kwargs):
                opened.append(kwargs)
                return context.Pool(*args, **kwargs)

        monkeypatch.setattr(sieve_module, "_pool_context", CountingContext)
        settings = Settings(cache_dir=tmp_path, workers=2, use_cache=False, segment_size=256)
        found = SieveService(settings).first_witnesses(parse_poly("T - 2"), 3, 150, 10**5)
        assert len(opened) == 1
        assert found == cube_oracle(found[-1] + 1)

    def test_partial_results_are_kept(self, sieve_service):
        with pytest.raises(CapExhausted) as info:
            sieve_service.first_witnesses(parse_poly("T - 2"), 3, 10, 40)
        assert info.value.partial == [7, 13, 19, 37]


def test_excluded_primes():
    assert excluded_primes(parse_poly("T - 2"), 3) == (2, 3)
    # disc(T^2 - 2) = 8
    assert excluded_primes(parse_poly("T^2 - 2"), 5) == (2, 5)
    assert excluded_primes(parse_poly("T^2 + T + 1"), 1) == (3,)


def test_rational_root_obstruction():
    assert rational_root_obstruction(parse_poly("T - 8"), 3) is True
    assert rational_root_obstruction(parse_poly("T - 8"), 2) is False
    assert rational_root_obstruction(parse_poly("T^2 - 2"), 2) is False
    assert rational_root_obstruction(parse_poly("(T-4)*(T-3)"), 2) is True
