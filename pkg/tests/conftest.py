import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        label = getattr(item.function, "_criterion", None)
        if label:
            verdict = "PASS" if rep.passed else "FAIL"
            print(f"\n[{verdict}] {label}")
