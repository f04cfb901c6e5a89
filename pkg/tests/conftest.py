import os
import sys
import tempfile
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
for _p in (ROOT, ROOT / "src"):
    if str(_p) not in sys.path:
        sys.path.insert(0, str(_p))

# База и каталог данных тестов — во временном каталоге, до импорта backend
_tmp = Path(tempfile.mkdtemp(prefix="steinerkit-tests-"))
os.environ["DATA_DIR"] = str(_tmp)
os.environ["DATABASE_URL"] = f"sqlite:///{_tmp / 'test.db'}"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="запускать долгие проверки")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: долгие проверки (перебор 135135 топологий)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="нужен --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
