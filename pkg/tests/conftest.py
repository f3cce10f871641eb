from __future__ import annotations

import pytest

from practice_scope.catalog import Catalog
from practice_scope.sample_data import build_demo_catalog


@pytest.fixture(scope="session")
def demo_catalog(tmp_path_factory: pytest.TempPathFactory) -> Catalog:
    """The bundled demo catalog, generated once per test session."""
    root = tmp_path_factory.mktemp("catalog") / "demo"
    return build_demo_catalog(root)
