import pytest
from hypothesis import given
from hypothesis import strategies as st

from obstructio.barth import FAMILIES
from obstructio.cohomology import (
    ChiSpec,
    DefectInterval,
    atom_cohomology,
    chi_F,
    chi_FS,
    cohom,
    h0_ideal_options,
    predicted_defect,
    riemann_roch,
)
from obstructio.quadric import Atom, SheafSymbol, symbol


def one(kind, k):
    return SheafSymbol((Atom(kind, k),))


def test_spinor_sections():
    assert cohom(one("S", 1)).h[0] == 4


def test_spinor_square_h1():
    assert cohom(one("SS", 0)).h == (0, 1, 0, 0)
    assert cohom(one("SS", -1)).h == (0, 0, 1, 0)


def test_cubics_on_q():
    assert cohom(one("O", 3)).h[0] == 30


def test_line_bundle_top_cohomology_is_serre_dual():
    # K_Q = O(-3)
    for n in range(-8, 4):
        assert atom_cohomology(Atom("O", n))[3] == atom_cohomology(Atom("O", -3 - n))[0]


def test_direct_sums_are_additive():
    s = symbol(("O", -1), ("S", -1))
    for n in range(-4, 5):
        a, b = cohom(one("O", -1), n).h, cohom(one("S", -1), n).h
        assert cohom(s, n).h == tuple(x + y for x, y in zip(a, b))


@pytest.mark.parametrize("kind", ["O", "S", "SS"])
@pytest.mark.parametrize("n", range(-6, 7))
def test_euler_matches_riemann_roch(kind, n):
    assert cohom(one(kind, 0), n).euler == riemann_roch(one(kind, 0), n)


@given(st.sampled_from(["O", "S", "SS"]), st.integers(-6, 6), st.integers(-6, 6))
def test_cohomology_is_non_negative(kind, k, n):
    assert min(cohom(one(kind, k), n).h) >= 0


def test_unsupported_atom():
    with pytest.raises(ValueError):
        atom_cohomology(Atom("T", 0))


def test_chi_examples():
    assert chi_F(1, ChiSpec(1, 20)) == 0
    assert chi_F(3, ChiSpec(0, 24)) == 24
    assert chi_FS(0, ChiSpec(0, 16)) == 8


@given(st.sampled_from([(0, 16), (0, 20), (0, 24), (1, 12), (1, 20)]), st.integers(-10, 10))
def test_chi_symmetry(spec, n):
    s = ChiSpec(*spec)
    assert chi_F(n, s) == chi_F(s.delta + 1 - n, s)


@pytest.mark.parametrize("delta, nodes", [(0, 18), (1, 16), (2, 8), (1, 8)])
def test_chi_inputs_rejected(delta, nodes):
    with pytest.raises(ValueError):
        ChiSpec(delta, nodes)


@pytest.mark.parametrize("tag, expected", [("E1", 1), ("E2", 0), ("E3", 0), ("O1", 1), ("O2", 0), ("O3", 1)])
def test_predicted_defect(tag, expected):
    d = predicted_defect(FAMILIES[tag])
    assert not isinstance(d, DefectInterval)
    assert d == expected


def test_resolution_forces_a_single_value():
    for fam in FAMILIES.values():
        assert len(h0_ideal_options(fam.bundle, fam.delta)) == 1


def test_interval_membership():
    iv = DefectInterval(0, 2)
    assert 1 in iv and 3 not in iv
