import os
import sys

import pytest

from mcfinite.prs import clear_cache


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    """Keep the on-disk detection cache inside a throwaway directory."""
    old = os.environ.get("MCFINITE_CACHE_DIR")
    os.environ["MCFINITE_CACHE_DIR"] = str(tmp_path_factory.mktemp("mcfinite-cache"))
    clear_cache()
    yield
    if old is None:
        os.environ.pop("MCFINITE_CACHE_DIR", None)
    else:
        os.environ["MCFINITE_CACHE_DIR"] = old


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        if mod.RESULTS[number]:
            terminalreporter.write_line(mod.RESULTS[number])
