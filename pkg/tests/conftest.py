import pytest

_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    ok = report.passed
    prev = _acceptance.get(number)
    _acceptance[number] = (title, ok if prev is None else prev[1] and ok)


_markers = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _markers[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, ok = _acceptance[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def hybrid():
    from partialfix.spaces import make_hybrid_unit

    return make_hybrid_unit()


@pytest.fixture
def counter():
    from partialfix.spaces import make_counterexample

    return make_counterexample()


@pytest.fixture
def max01():
    from partialfix.sets import SetDescriptor
    from partialfix.spaces import make_max_space

    return make_max_space(SetDescriptor.interval(0, 1))


@pytest.fixture
def max_inf():
    import math

    from partialfix.sets import SetDescriptor
    from partialfix.spaces import make_max_space

    return make_max_space(SetDescriptor.interval(0, math.inf))
