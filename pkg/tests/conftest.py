import pytest

from app.core.config import Settings
from app.services.catalog import CatalogBuilder, load_fixture


@pytest.fixture
def settings(tmp_path):
    return Settings(CACHE_DIR=str(tmp_path / "cache"), CACHE_ENABLED=False, WORKERS=1)


@pytest.fixture(scope="session")
def fixture_rows():
    return load_fixture()


@pytest.fixture(scope="session")
def catalog_builder():
    builder = CatalogBuilder(Settings(CACHE_ENABLED=False, WORKERS=1))
    builder.rows = builder.build(256)
    return builder


@pytest.fixture(scope="session")
def catalog_rows(catalog_builder):
    return catalog_builder.rows
