"""Deterministic generators and the constructed state families."""

import numpy as np

from cliffordlab import (
    ModeSpace,
    constant_family,
    corner_cone_vectors,
    escaping_mass_family,
    random_element,
    random_real_vector,
    random_selfadjoint,
    random_state,
    scale_family,
    sub_rng,
    two_point_state,
)
from cliffordlab.standard_form import cone_defect


def test_sub_rng_streams_are_reproducible_and_independent():
    a1 = sub_rng(7, 0).standard_normal(4)
    a2 = sub_rng(7, 0).standard_normal(4)
    b = sub_rng(7, 1).standard_normal(4)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)


def test_random_element_determinism(space2):
    x = random_element(space2, sub_rng(3, 5)).coeffs
    y = random_element(space2, sub_rng(3, 5)).coeffs
    assert np.array_equal(x, y)


def test_random_selfadjoint_is_selfadjoint(space3):
    a = random_selfadjoint(space3, sub_rng(4, 0))
    assert a.is_selfadjoint(tol=1e-12)


def test_random_state_is_a_faithful_state(space3):
    phi = random_state(space3, sub_rng(5, 0))
    assert phi.is_state(tol=1e-12)
    assert phi.rho.min_eigenvalue() >= 0.0
    smoothed = random_state(space3, sub_rng(5, 1), smoothing=0.05)
    assert smoothed.is_faithful()


def test_random_real_and_cone_vectors(space3):
    rng = sub_rng(6, 0)
    xi = random_real_vector(space3, rng)
    assert xi.is_real()
    assert abs(xi.norm() - 1.0) <= 1e-12


def test_corner_cone_vectors_live_in_the_cone(space3):
    for v in corner_cone_vectors(space3):
        assert cone_defect(v) <= 1e-10


def test_two_point_state_eigenvalues(space1):
    phi = two_point_state(space1, 1, 0.25)
    w, _ = phi.rho.eigh()
    assert np.allclose(w, [0.75, 1.25], atol=1e-14)
    assert phi.is_state()


def test_scale_family_norms_decay_geometrically(space2):
    fam = scale_family(space2, length=5, ratio=4.0)
    norms = [phi.norm for phi in fam]
    assert np.allclose(norms, [4.0 ** -m for m in range(1, 6)], atol=1e-15)


def test_constant_family_is_constant(space2):
    fam = constant_family(space2, length=4)
    for phi in fam[1:]:
        assert np.array_equal(phi.rho.coeffs, fam[0].rho.coeffs)


def test_escaping_mass_family_shapes(space2):
    members, psi = escaping_mass_family(space2, length=4, psi_weight=1e-6)
    assert psi.is_state(tol=1e-12)
    assert psi.is_faithful()
    # member masses grow: the family cannot be uniformly integrable
    norms = [phi.norm for phi in members]
    assert all(b > a for a, b in zip(norms, norms[1:]))
