import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from owx2proto import load_config, parse_owx  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
CLOUD_OWX = FIXTURES / "cloud.owx"
CLOUD_CONFIG = FIXTURES / "cloud.yaml"

# criterion number -> (title, passed)
ACCEPTANCE = {}


def criterion(number, title):
    """Record the outcome of an acceptance test for the terminal summary."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE[number] = (title, False)
                raise
            ACCEPTANCE[number] = (title, ACCEPTANCE.get(number, (title, True))[1])

        return run

    return wrap


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}")


@pytest.fixture
def cloud_bytes():
    return CLOUD_OWX.read_bytes()


@pytest.fixture
def cloud_doc(cloud_bytes):
    doc, _ = parse_owx(cloud_bytes)
    return doc


@pytest.fixture
def cloud_config():
    return load_config(CLOUD_CONFIG)


@pytest.fixture
def ledger_config(cloud_config):
    from dataclasses import replace

    return replace(cloud_config, strategy="ledger")
