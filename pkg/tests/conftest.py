import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


import pytest  # noqa: E402

ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    log = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(num, title, ok, seconds, limit=None):
        timed = limit is None or seconds < limit
        line = (f"{'PASS' if ok and timed else 'FAIL'} criterion {num}: {title} "
                f"[{seconds:.3f}s" + (f" < {limit}s]" if limit else "]"))
        log.append(line)
        print(line)
        return ok and timed

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for line in log:
            terminalreporter.write_line(line)
