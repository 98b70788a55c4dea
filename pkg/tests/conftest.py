import numpy as np
import pytest

from gmux.model import Design, validate_design


def random_identifiable_design(rng: np.random.Generator, n: int, extra_rows: int = 3) -> Design:
    """Distinct nonzero random rows plus random positive times summing to n."""
    while True:
        m = n + int(rng.integers(0, extra_rows + 1))
        codes = rng.choice(np.arange(1, 2**n), size=min(m, 2**n - 1), replace=False)
        rows = ((codes[:, None] >> np.arange(n)) & 1).astype(int)
        t = rng.uniform(0.2, 2.0, rows.shape[0])
        t *= n / t.sum()
        d = Design(n, rows, t)
        if validate_design(d).identifiable:
            return d


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance.py::test_criterion_" in rep.nodeid:
                name = rep.nodeid.split("::test_criterion_")[1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"criterion {name}: {status}")
