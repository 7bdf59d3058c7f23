import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_KEY] = []


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("acceptance")
    if marker and (report.when == "call" or (report.when == "setup" and report.failed)):
        number, title = marker.args
        detail = dict(report.user_properties).get("detail", "")
        if report.failed and not detail:
            detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
        verdict = "PASS" if report.passed else "FAIL"
        item.config.stash[_KEY].append((number, f"[{verdict}] criterion {number:2d}: {title} | {detail}"))
    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
