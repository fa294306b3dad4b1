from fractions import Fraction

from hypothesis import settings, strategies as st

from g2daha.poly import O_VARS, Polynomial, var
from g2daha.scalars import QuadTowerScalar

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def tower_scalars(draw, bound=50):
    coords = draw(st.lists(st.fractions(min_value=-bound, max_value=bound, max_denominator=9),
                           min_size=16, max_size=16))
    return QuadTowerScalar(coords)


@st.composite
def polynomials(draw, names=O_VARS[:5], max_terms=4, max_exp=2):
    f = Polynomial()
    for _ in range(draw(st.integers(0, max_terms))):
        term = Polynomial.const(draw(small_fractions))
        for n in names:
            term = term * var(n) ** draw(st.integers(0, max_exp))
        f = f + term
    return f


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
