import pytest

from jetcalc import BundleSpec, FiniteGroupAction, OmegaSpec, Poly, parse_expr

import helpers

_ACCEPTANCE_OUTCOMES = {}


def pytest_runtest_logreport(report):
    """Track the acceptance tests so the summary can print one line each."""
    if "test_acceptance.py::" not in report.nodeid:
        return
    if report.when == "call" or report.outcome == "failed":
        _ACCEPTANCE_OUTCOMES[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_OUTCOMES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE_OUTCOMES):
        name = nodeid.split("::")[-1].removeprefix("test_criterion_")
        number, _, label = name.partition("_")
        status = "PASS" if _ACCEPTANCE_OUTCOMES[nodeid] == "passed" else "FAIL"
        terminalreporter.write_line(
            f"ACCEPTANCE {number} {label.replace('_', '-')}: {status}")


@pytest.fixture(scope="session")
def ctx1():
    """One base direction, two fibers."""
    return BundleSpec(("x",), ("u1", "u2"))


@pytest.fixture(scope="session")
def ctx2():
    """Two base directions, two fibers."""
    return BundleSpec(("x", "y"), ("u1", "u2"))


@pytest.fixture(scope="session")
def ctx3():
    """One base direction, three fibers."""
    return BundleSpec(("x",), ("u1", "u2", "u3"))


def constant_skew(ctx):
    one = Poly.const(ctx, 1)
    zero = Poly.zero(ctx)
    return OmegaSpec(ctx, ((zero, one), (one * -1, zero)))


@pytest.fixture(scope="session")
def omega_std(ctx1):
    """The constant skew structure on two fibers."""
    return constant_skew(ctx1)


@pytest.fixture(scope="session")
def omega_so3(ctx3):
    """Linear structure matrix with entries eps^{abc} u_c."""
    rows = (("0", "u3", "-u2"), ("-u3", "0", "u1"), ("u2", "-u1", "0"))
    return OmegaSpec(ctx3, tuple(tuple(parse_expr(s, ctx3) for s in row) for row in rows))


@pytest.fixture(scope="session")
def rot90(ctx1):
    return helpers.rot90(ctx1)


@pytest.fixture(scope="session")
def c4(rot90):
    """The four rotations generated by the quarter turn."""
    return FiniteGroupAction.generated_by(rot90)
