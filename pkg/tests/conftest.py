import pytest

from powerdiv.config.settings import Settings
from powerdiv.core.parser import parse_poly
from powerdiv.services.ksearch_service import KSearchService
from powerdiv.services.sieve_service import SieveService


@pytest.fixture
def test_settings(tmp_path):
    """Serial settings with a private cache directory."""
    return Settings(cache_dir=tmp_path / "cache", workers=1, use_cache=True)


@pytest.fixture
def sieve_service(test_settings):
    return SieveService(test_settings)


@pytest.fixture
def ksearch_service(test_settings, sieve_service):
    return KSearchService(test_settings, sieve_service)


@pytest.fixture
def poly():
    return parse_poly
