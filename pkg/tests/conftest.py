import pytest

from qdolbeault.pipeline import Flag


@pytest.fixture(scope="session")
def gr24():
    return Flag("A3", 2)


@pytest.fixture(scope="session")
def cp1():
    return Flag("A1", 1)


@pytest.fixture(scope="session")
def cp2():
    return Flag("A2", 1)


def pytest_terminal_summary(terminalreporter):
    results = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            name = rep.nodeid.split("::")[-1]
            if not name.startswith("test_criterion_"):
                continue
            if key == "passed" and rep.when != "call":
                continue
            n = int(name.split("_")[2])
            results[n] = results.get(n, True) and key == "passed"
    if results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n, ok in sorted(results.items()):
            terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
