import os
from fractions import Fraction

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def mpf_fraction(x):
    from mpmath.libmp import to_rational

    if hasattr(x, "_mpi_"):
        return [Fraction(*map(int, to_rational(v))) for v in x._mpi_]
    return Fraction(*map(int, to_rational(x._mpf_)))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
