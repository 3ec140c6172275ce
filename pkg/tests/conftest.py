from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bostconnes.arith import lcm
from bostconnes.groupoid import HeckeElement

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def hecke_elements(draw, max_height=4, max_level=6, max_terms=3, integral=True):
    """Random elements with Gaussian-integer coefficients, so convolution sums are exact."""
    terms = draw(st.integers(1, max_terms))
    gs = [Fraction(draw(st.integers(1, max_height)), draw(st.integers(1, max_height)))
          for _ in range(terms)]
    level = lcm(draw(st.integers(1, max_level)), *(g.denominator for g in gs))
    entries = {}
    for g in gs:
        r = draw(st.integers(0, level // g.denominator - 1)) * g.denominator
        if integral:
            c = complex(draw(st.integers(-3, 3)), draw(st.integers(-3, 3)))
        else:
            c = complex(draw(st.floats(-1, 1)), draw(st.floats(-1, 1)))
        entries[(g, r)] = c if c != 0 else 1
    return HeckeElement(level, entries)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
