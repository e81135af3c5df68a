from __future__ import annotations

from importlib.resources import files

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qtrap.codes import QcMatrix, hypergraph_product, lift, lifted_product, load_alist, load_qc, random_qc_ldpc
from qtrap.decoders import available_backends, set_backend
from qtrap.gf2 import BinaryMatrix

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

DATA = files("qtrap") / "data"


def data_path(name: str) -> str:
    return str(DATA / name)


def array_code(q: int, rows: int, cols: int) -> BinaryMatrix:
    """Array LDPC code: block (i, j) is the circulant shift x^(i*j) of size q."""
    exps = [[i * j % q for j in range(cols)] for i in range(rows)]
    return lift(QcMatrix.from_exponents(exps, q))


def ones(rows: int, cols: int) -> BinaryMatrix:
    return BinaryMatrix.from_dense(np.ones((rows, cols), dtype=np.uint8))


@pytest.fixture(scope="session")
def tanner_w() -> QcMatrix:
    return load_qc(data_path("tanner_155.qc"))


@pytest.fixture(scope="session")
def tanner_lp(tanner_w):
    return lifted_product(tanner_w, tanner_w)


@pytest.fixture(scope="session")
def tanner_h() -> BinaryMatrix:
    return load_alist(data_path("tanner_155.alist"))


@pytest.fixture(scope="session")
def rep_hp():
    """HP of the 2-bit repetition check with itself: [[5,1]]."""
    return hypergraph_product(BinaryMatrix.from_dense([[1, 1]]), BinaryMatrix.from_dense([[1, 1]]))


@pytest.fixture(scope="session")
def ex2_lp():
    return lifted_product(load_qc(data_path("ex2_w1.qc")), load_qc(data_path("ex2_w2.qc")))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def hp34():
    """4-cycle-free HP code whose generators have 4 VV and 3 CC members.

    VV qubits have degree 3 and CC qubits degree 4 in the Z Tanner graph.
    """
    r = np.random.default_rng(1)
    h1 = lift(random_qc_ldpc(3, 4, 5, r))
    h2 = lift(random_qc_ldpc(3, 4, 5, r))
    return hypergraph_product(h1, h2)


@pytest.fixture(scope="session")
def even_degree_hp():
    """Isolated generator with 6 VV nodes of degree 4 and 4 CC nodes of degree 6."""
    return hypergraph_product(ones(1, 6), ones(4, 1))


@pytest.fixture(params=available_backends())
def backend(request):
    prev = set_backend(request.param)
    yield request.param
    set_backend(prev)


def array_translation(q: int, rows: int, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Check and variable permutations of ``array_code(q, rows, q)`` for the
    affine shift (j, x) -> (j + a, x + b) of the point set Z_q x Z_q.

    Check (i, y) holds the points (j, y + i*j), so it moves to (i, y + b - i*a).
    """
    var = np.array([((j + a) % q) * q + (x + b) % q for j in range(q) for x in range(q)])
    chk = np.array([i * q + (y + b - i * a) % q for i in range(rows) for y in range(q)])
    return chk, var


# --- acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

_VERDICTS: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    if rep.failed and call.excinfo is not None:
        detail = (detail + "; " if detail else "") + str(call.excinfo.value).split("\n")[0]
    _VERDICTS.append((str(mark.args[0]), "PASS" if rep.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, detail in sorted(_VERDICTS, key=lambda v: int(v[0])):
        terminalreporter.write_line(f"{verdict} criterion {num}: {detail}")
