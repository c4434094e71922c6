from fractions import Fraction

import pytest

from logrigid.quadfield import Form, QuadraticField

# Narrow classes of discriminant 689 with their orders, the printed 3-adic
# valuation of the Gross-Stark unit, and its unit part (A, B) meaning
# A + B sqrt(689) modulo 3^41.  [PAPER]
TABLE_689 = {
    "[-20,17,5]": (8, -2, 7283498230698546457, 20427811426324513506),
    "[-10,7,16]": (2, 4, 28799930840163216397, 0),
    "[-10,17,10]": (4, 0, 25613292858296352193, 34405602800800679412),
    "[-5,17,20]": (8, 2, 28389335835840796072, 1041259434467889369),
    "[5,17,-20]": (8, -2, 7283498230698546457, 16045184950846272897),
    "[10,7,-16]": (1, -4, 23094469614450736543, 0),
    "[10,17,-10]": (4, 0, 25613292858296352193, 2067393576370106991),
    "[20,17,-5]": (8, 2, 28389335835840796072, 35431736942702897034),
}
TABLE_PREC = 41
# The printed units are roots of POLY_689 to this many relative digits only.
ROOT_PREC = 23
POLY_689 = [6561, -11340, -882, 4333, 2665, 4333, -882, -11340, 6561]


@pytest.fixture(scope="session")
def f689():
    return QuadraticField(689)


@pytest.fixture(scope="session")
def table_by_class(f689):
    G = f689.class_group
    return {G.class_of_form(Form.parse(k)): (k,) + v for k, v in TABLE_689.items()}


def zeta0_from_table(v: int) -> Fraction:
    return Fraction(v, -2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
