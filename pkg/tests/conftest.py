import pytest

from wyner_uplink.channel import ChannelProfile


@pytest.fixture
def sho():
    return ChannelProfile.sho(1.0, 0.5)


@pytest.fixture
def flat():
    return ChannelProfile.sho(1.0, 0.0)


_acceptance_lines = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "acceptance" not in report.keywords:
        return
    label = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
    _acceptance_lines.append(f"[{'PASS' if report.passed else 'FAIL'}] {label}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
