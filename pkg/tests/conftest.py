import collections

import pytest

# criterion id -> list of (check, ok, detail); filled by tests/test_acceptance.py
ACCEPTANCE = collections.OrderedDict()

TITLES = {
    1: "cumulant oracle equivalence",
    2: "spanning tree count of complete graphs",
    3: "tree bound on random dependency graphs",
    4: "mesh total mass",
    5: "sector tail formula vs tilted Monte Carlo (toy model)",
    6: "lattice walk conditional sector masses",
    7: "CUE angular density, Barnes G, exact Laplace transform",
    8: "circle walk covariance",
    9: "Markov chain covariance",
    10: "Erdos-Renyi subgraph counts",
    11: "smoothing kernel suite",
    12: "distance machinery coherence",
    13: "circle walk distance decreases with N/D",
}


@pytest.fixture
def record():
    def _record(cid: int, check: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE.setdefault(cid, []).append((check, bool(ok), detail))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[cid]
        status = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        tr.write_line(f"C{cid:<2} {status}  {TITLES.get(cid, '')}")
        for check, ok, detail in checks:
            tr.write_line(f"      [{'ok' if ok else 'FAIL'}] {check}: {detail}")
    missing = sorted(set(TITLES) - set(ACCEPTANCE))
    for cid in missing:
        tr.write_line(f"C{cid:<2} NOT RUN  {TITLES[cid]}")
