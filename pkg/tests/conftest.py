from fractions import Fraction

from hypothesis import settings, strategies as st

from niltheta.coadjoint import Covector
from niltheta.lie import GroupElement, LieVector

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_rationals = rationals.filter(lambda x: x != 0)
group_elements = st.builds(GroupElement, rationals, rationals, rationals, rationals, rationals)
lie_vectors = st.builds(LieVector, rationals, rationals, rationals, rationals, rationals)
integers = st.integers(min_value=-6, max_value=6)
lattice_elements = st.builds(
    GroupElement, integers, integers, integers, integers,
    st.integers(min_value=-12, max_value=12).map(lambda n: Fraction(n, 2)),
)
covectors = st.builds(Covector, rationals, rationals, rationals, rationals, rationals)
generic_covectors = st.builds(Covector, rationals, rationals, rationals, rationals, nonzero_rationals)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(results, key=int):
        terminalreporter.write_line(results[cid].line())
