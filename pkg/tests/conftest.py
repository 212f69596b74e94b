"""Shared fixtures: the built-in sources and cached expensive results."""

import math

import pytest

from nonrad.classify import classify
from nonrad.greens import WaveContext
from nonrad.multipole import coeff_table
from nonrad.sources import (
    SOURCE_KINDS,
    default_descriptor,
    dipole_ball_source,
    from_descriptor,
    source_rule,
    source_scale,
)


@pytest.fixture(scope="session")
def ctx1():
    return WaveContext(1.0, 1.0)


@pytest.fixture(scope="session")
def ctx_pi():
    return WaveContext(math.pi, 1.0)


@pytest.fixture(scope="session")
def builtin():
    """kind -> (ctx, src) for the five descriptor kinds at canonical parameters."""
    return {kind: from_descriptor(default_descriptor(kind)) for kind in SOURCE_KINDS}


@pytest.fixture(scope="session")
def sharp_dipole(ctx1):
    return dipole_ball_source(ctx1, rho=1.0, sharp=True)


@pytest.fixture(scope="session")
def tables(builtin):
    """kind -> (table, scale) with the default rule."""
    out = {}
    for kind, (ctx, src) in builtin.items():
        rule = source_rule(src, ctx)
        out[kind] = (coeff_table(src, ctx, rule), source_scale(src, rule))
    return out


@pytest.fixture(scope="session")
def reports(builtin):
    """kind -> ClassificationReport at default parameters."""
    return {kind: classify(src, ctx) for kind, (ctx, src) in builtin.items()}


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """record(criterion, ok, detail): one summary line per acceptance criterion."""

    def record(criterion, ok, detail):
        _ACCEPTANCE[criterion] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"AC{key:<3d} {'PASS' if ok else 'FAIL'}  {detail}")
