"""Energy forms, semigroups, order properties, and the derivation stack."""

import numpy as np
import pytest

from cliffordlab import (
    CliffordElement,
    DerivationStack,
    EnergyForm,
    L2Vector,
    ModeSpace,
    State,
    check_beurling_deny,
    check_leibniz,
    check_markovian,
    check_positivity_preserving,
    check_real,
    clifford_dirichlet_form,
    cone_escape_form,
    degenerate_number_form,
    dirichlet_report,
    number_form,
    second_quantized_form,
    sub_rng,
)
from cliffordlab.sampling import random_real_vector


def test_energy_form_validates_generator(space2):
    with pytest.raises(ValueError):
        EnergyForm(space2, np.zeros((3, 3)))
    upper = np.triu(np.ones((4, 4)), k=1)
    with pytest.raises(ValueError):
        EnergyForm(space2, upper)


def test_number_form_spectrum_is_occupation_numbers(space3):
    form = number_form(space3)
    # oracle: eigenvalue k with multiplicity C(3, k)
    expected = sorted([0, 1, 1, 1, 2, 2, 2, 3])
    assert np.allclose(sorted(form.eigenvalues), expected, atol=1e-13)
    assert form.lambda0 == 0.0
    assert form.degeneracy() == 1


def test_form_value_matches_quadratic_form(space2, rng):
    form = number_form(space2)
    f = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    xi = L2Vector(space2, f)
    expected = float(np.real(np.vdot(f, form.matrix @ f)))
    assert abs(form.value(xi) - expected) <= 1e-12


def test_semigroup_matches_exact_exponential(space2):
    form = second_quantized_form(space2, np.array([[1.0, 0.3], [0.3, 0.5]]))
    w, v = np.linalg.eigh(form.matrix)
    for t in (0.1, 1.0, 3.0):
        exact = (v * np.exp(-t * w)) @ v.conj().T
        assert np.abs(form.semigroup_matrix(t) - exact).max() <= 1e-12


def test_shifted_form_moves_spectrum(space2):
    form = number_form(space2)
    shifted = form.shifted(-1.0)
    assert abs(shifted.lambda0 - (form.lambda0 - 1.0)) <= 1e-13
    xi = random_real_vector(space2, sub_rng(8, 0))
    assert abs(shifted.value(xi) - (form.value(xi) - 1.0)) <= 1e-12


def test_degenerate_number_form_has_two_dimensional_bottom(space3):
    form = degenerate_number_form(space3)
    assert form.lambda0 == 0.0
    assert form.degeneracy() == 2


def test_clifford_dirichlet_form_is_the_number_form(space2):
    assert np.abs(clifford_dirichlet_form(space2).matrix - number_form(space2).matrix).max() == 0.0


# ---------------------------------------------------------------------- #
# order-theoretic checkers


@pytest.mark.parametrize("n", [1, 2, 3])
def test_number_form_satisfies_all_order_properties(n):
    space = ModeSpace(n)
    form = number_form(space)
    assert check_real(form, samples=8)["passed"]
    assert check_positivity_preserving(form, samples=8)["passed"]
    assert check_beurling_deny(form, samples=15)["passed"]
    markov = check_markovian(form, samples=8)
    assert markov["passed"]
    assert markov["form_worst_excess"] <= 1e-10


def test_markovian_detects_a_mismatched_reference(space1):
    # e^{-tN} does not fix the Gibbs vector of e_1, so the interval side fails
    form = number_form(space1)
    e1 = CliffordElement.generator(space1, 1)
    dens = e1.functional_calculus(lambda w: np.exp(-w))
    psi = State(CliffordElement(space1, dens.coeffs / dens.trace().real), check=False)
    report = check_markovian(form, psi=psi, samples=8)
    assert report["interval_worst_defect"] > 1e-6
    assert not report["passed"]


def test_cone_escape_control_fails_positivity_and_contraction(space2):
    form = cone_escape_form(space2)
    assert not check_positivity_preserving(form, samples=10)["passed"]
    assert not check_beurling_deny(form, samples=30)["passed"]


def test_dirichlet_report_bundle(space2):
    rep = dirichlet_report(number_form(space2), samples=8, seed=1)
    assert rep["lambda0"] == 0.0
    assert rep["real"]["passed"]
    assert rep["positivity"]["passed"]
    assert rep["modulus_contraction"]["passed"]
    assert rep["markov"]["passed"]


# ---------------------------------------------------------------------- #
# derivations and the Leibniz rule


def test_derivation_annihilates_identity_and_lowers_generators(space2):
    stack = DerivationStack(space2)
    one = CliffordElement.identity(space2)
    e1 = CliffordElement.generator(space2, 1)
    assert np.abs(stack.apply(1, one).coeffs).max() == 0.0
    assert np.abs(stack.apply(1, e1).coeffs - one.coeffs).max() <= 1e-14
    assert np.abs(stack.apply(2, e1).coeffs).max() == 0.0


def test_leibniz_rule_by_hand_at_generator_pair(space2):
    # delta_1(e1 e1) = delta_1(1) = 0 must equal
    # delta_1(e1) e1 + Gamma(e1) delta_1(e1) = e1 - e1
    stack = DerivationStack(space2)
    e1 = CliffordElement.generator(space2, 1)
    assert stack.leibniz_defect(1, e1, e1) <= 1e-15
    lhs = stack.apply(1, e1 * e1)
    term1 = stack.apply(1, e1) * e1
    term2 = stack.grade(e1) * stack.apply(1, e1)
    assert np.abs(lhs.coeffs - term1.coeffs - term2.coeffs).max() <= 1e-15


def test_leibniz_rule_on_random_pairs(space3):
    assert check_leibniz(space3, samples=25)["passed"]


def test_derivation_squares_sum_to_number_form(space3):
    stack = DerivationStack(space3)
    form = number_form(space3)
    rng = sub_rng(13, 0)
    for _ in range(10):
        f = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        xi = L2Vector(space3, f)
        assert abs(stack.form_value(xi) - form.value(xi)) <= 1e-10


def test_grading_is_parity(space2):
    stack = DerivationStack(space2)
    e1 = CliffordElement.generator(space2, 1)
    e12 = CliffordElement.monomial(space2, [1, 2])
    assert np.abs(stack.grade(e1).coeffs + e1.coeffs).max() == 0.0
    assert np.abs(stack.grade(e12).coeffs - e12.coeffs).max() == 0.0
