import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkcalc import calculus as ca
from dkcalc import dirac_kahler as dk
from dkcalc.calculus import Form
from dkcalc.complex_core import Copy, LatticeSpec, direction_sets
from dkcalc.dirac_kahler import InhomogeneousForm

TOL = 1e-12
seeds = st.integers(0, 2 ** 32 - 1)

# The sixteen component equations of i(d + delta) Omega, one row per output
# channel; each term is (sign, difference axis, source channel).
DK_ROWS = {
    "x":   "+0:0 -1:1 -2:2 -3:3",
    "0":   "+0:x +1:01 +2:02 +3:03",
    "1":   "+1:x +0:01 +2:12 +3:13",
    "2":   "+2:x +0:02 -1:12 +3:23",
    "3":   "+3:x +0:03 -1:13 -2:23",
    "01":  "+0:1 -1:0 -2:012 -3:013",
    "02":  "+0:2 -2:0 +1:012 -3:023",
    "03":  "+0:3 -3:0 +1:013 +2:023",
    "12":  "+1:2 -2:1 +0:012 -3:123",
    "13":  "+1:3 -3:1 +0:013 +2:123",
    "23":  "+2:3 -3:2 +0:023 -1:123",
    "012": "+0:12 -1:02 +2:01 +3:e",
    "013": "+0:13 -1:03 +3:01 -2:e",
    "023": "+0:23 -2:03 +3:02 +1:e",
    "123": "+1:23 -2:13 +3:12 +0:e",
    "e":   "+0:123 -1:023 +2:013 -3:012",
}


def _channel_of(name):
    if name == "x":
        return ()
    if name == "e":
        return (0, 1, 2, 3)
    return tuple(int(c) for c in name)


def dk_transcribed(omega: InhomogeneousForm) -> InhomogeneousForm:
    diffs = [[ca.difference(p, a) for a in range(4)] for p in omega.parts]
    out = InhomogeneousForm.zeros(omega.lattice, omega.copy)
    for target, row in DK_ROWS.items():
        t = _channel_of(target)
        acc = out.parts[len(t)].coeffs[..., direction_sets(len(t)).index(t)]
        for term in row.split():
            sign = 1 if term[0] == "+" else -1
            axis, src = term[1:].split(":")
            s = _channel_of(src)
            acc += sign * diffs[len(s)][int(axis)][..., direction_sets(len(s)).index(s)]
    return out * 1j


def dist(a: InhomogeneousForm, b: InhomogeneousForm) -> float:
    return float(np.max(np.abs(a.flatten() - b.flatten())))


# ------------------------------------------------------------ containers

def test_reversion_signs():
    assert [dk.reversion_sign(r) for r in range(5)] == [1, 1, -1, -1, 1]


def test_flatten_layout(p2, rng):
    om = InhomogeneousForm.random(p2, rng)
    flat = om.flatten()
    assert flat.shape == (16 * 16,)
    # site (1,1,1,2) is rank 1; the 1-form channel for direction 2 is 1 + 2
    assert flat[16 + 3] == om.parts[1].component((1, 1, 1, 2), (2,))
    back = InhomogeneousForm.from_array(p2, flat)
    assert dist(back, om) == 0


def test_mismatched_parts_rejected(p2):
    parts = list(InhomogeneousForm.zeros(p2).parts)
    parts[2] = Form.zeros(p2, 2, Copy.TILDE)
    with pytest.raises(ValueError):
        InhomogeneousForm(tuple(parts))
    with pytest.raises(ValueError):
        InhomogeneousForm(tuple(parts[:4]))


def test_homogeneous_embedding(p2, rng):
    w = Form.random(p2, 3, rng)
    om = InhomogeneousForm.homogeneous(w)
    assert om.parts[3] is w and np.count_nonzero(om.parts[1].coeffs) == 0


# ------------------------------------------------------------ operator

@pytest.mark.parametrize("mode", ["periodic", "ghost"])
def test_dk_operator_matches_component_equations(mode, rng):
    lat = LatticeSpec((3, 2, 2, 3), mode)
    for _ in range(3):
        om = InhomogeneousForm.random(lat, rng)
        assert dist(dk.dk_operator(om), dk_transcribed(om)) < TOL


def test_dk_residual_of_constant_is_mass_times_norm(p2):
    arr = np.ones(p2.storage_shape + (16,), dtype=complex)
    om = InhomogeneousForm.from_array(p2, arr)
    assert dk.dk_residual(om, 0.0) < TOL
    assert abs(dk.dk_residual(om, 2.0) - 2.0 * om.norm()) < TOL


def test_dk_squared_is_laplacian(rng):
    lat = LatticeSpec.periodic((2, 3, 2, 2))
    om = InhomogeneousForm.random(lat, rng)
    twice = dk.dk_operator(dk.dk_operator(om))
    # (i(d + delta))^2 = -(d delta + delta d) since dd = delta delta = 0
    lap = om.map(ca.laplacian)
    assert dist(twice, lap) < TOL


# ------------------------------------------------------------ chirality

def test_chiral_star_copy_and_degrees(p2, rng):
    om = InhomogeneousForm.random(p2, rng)
    st_ = dk.chiral_star(om)
    assert st_.copy is Copy.TILDE
    assert np.allclose(st_.parts[4].coeffs, 1j * ca.hodge(om.parts[0]).coeffs)
    assert np.allclose(st_.parts[2].coeffs, -1j * ca.hodge(om.parts[2]).coeffs)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_star_involution(seed):
    lat = LatticeSpec.periodic(2)
    om = InhomogeneousForm.random(lat, np.random.default_rng(seed))
    assert dist(dk.chiral_star(dk.chiral_star(om)), om) < TOL
    assert dist(dk.iota_star(dk.iota_star(om)), om) < TOL


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from(["periodic", "ghost"]))
def test_star_anticommutes_with_D(seed, mode):
    lat = LatticeSpec((2, 3, 2, 2), mode)
    om = InhomogeneousForm.random(lat, np.random.default_rng(seed))
    lhs = dk.chiral_star(dk.dk_operator(om)) + dk.dk_operator(dk.chiral_star(om))
    assert float(np.max(np.abs(lhs.flatten()))) < TOL


def test_projectors(p2, rng):
    om = InhomogeneousForm.random(p2, rng)
    parts = dk.chiral_project(om)
    assert dist(parts.plus + parts.minus, om) < TOL
    again = dk.chiral_project(parts.plus)
    assert dist(again.plus, parts.plus) < TOL
    assert float(np.max(np.abs(again.minus.flatten()))) < TOL
    assert dk.is_self_dual(parts.plus) and dk.is_anti_self_dual(parts.minus)
    assert not dk.is_self_dual(om) and not dk.is_anti_self_dual(om)


def test_chiral_project_rejects_tilde(p2, rng):
    with pytest.raises(ValueError):
        dk.chiral_project(InhomogeneousForm.random(p2, rng, Copy.TILDE))


def test_zero_form_is_both_dualities(p2):
    z = InhomogeneousForm.zeros(p2)
    assert dk.is_self_dual(z) and dk.is_anti_self_dual(z)


def test_chirality_flip_check_on_generic_form_is_not_small(p2, rng):
    om = InhomogeneousForm.random(p2, rng)
    a, b = dk.chirality_flip_check(om, 1.0)
    assert a > 1e-3 and b > 1e-3
