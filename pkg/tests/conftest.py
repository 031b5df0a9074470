from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _instances import e1_system, e2_system, e3_system  # noqa: E402

from padyn.systems import save_system  # noqa: E402


@pytest.fixture(scope="session")
def e1_file(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("fixtures") / "e1.json"
    save_system(e1_system(), str(path))
    return str(path)


@pytest.fixture(scope="session")
def e2_file(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("fixtures") / "e2.json"
    save_system(e2_system(), str(path))
    return str(path)


@pytest.fixture(scope="session")
def e3_file(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("fixtures") / "e3.json"
    save_system(e3_system(), str(path))
    return str(path)
