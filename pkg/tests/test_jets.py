import pytest
import sympy as sp

from src.errors import BudgetExceeded, OffShellMode
from src.jets.context import OFF_SHELL, JetContext
from src.jets.derivatives import (A_hat, op_A, op_B, to_modified, to_standard, total_dt,
                                  total_dx)
from src.jets.operators import MatrixDiffOperator, frechet, prolonged_action
from src.jets.variational import euler_operator, in_image_of_Ahat, omega_euler, ord
from src.kernel.expression import equals, is_zero
from src.kernel.symbols import jet, omega, r1, r1x, r2, symbolic_omega, w0, w1, x


def test_total_dx_on_jets_and_omegas():
    assert total_dx(r1) == r1x
    assert equals(total_dx(w0), sp.exp(r1 - r2) * w1)
    assert total_dx(x * r1) == r1 + x * r1x


def test_total_dt_substitutes_the_system():
    assert equals(total_dt(r1), -(r1 + r2 + 1) * r1x)
    assert equals(total_dt(w0), -(r1 + r2) * sp.exp(r1 - r2) * w1)


def test_omegas_are_riemann_invariants_of_the_third_field():
    assert is_zero(op_B(symbolic_omega(2)))
    assert equals(op_A(w0), w1)


def test_jet_cap():
    with pytest.raises(BudgetExceeded):
        total_dx(jet(1, 20))
    with pytest.raises(ValueError):
        JetContext(max_order=0)


def test_restricted_dt_refuses_off_shell_context():
    with pytest.raises(OffShellMode):
        total_dt(r1, OFF_SHELL)


def test_coordinate_changes():
    assert equals(to_standard(w1), sp.exp(r2 - r1) * jet(3, 1))
    assert equals(to_modified(jet(3, 1)), sp.exp(r1 - r2) * w1)
    assert equals(to_modified(to_standard(omega(2))), omega(2))


def test_A_hat():
    assert equals(A_hat(w0 * w1), w1 ** 2 + w0 * omega(2))


def test_adjoint_integrates_by_parts():
    operator = MatrixDiffOperator.from_terms([[[(r1, 1)]]])
    expected = MatrixDiffOperator.from_terms([[[(-r1x, 0), (-r1, 1)]]])
    assert operator.adjoint().equals(expected)
    assert operator.adjoint().adjoint().equals(operator)


def test_d_x_is_skew():
    d_x = MatrixDiffOperator.from_terms([[[(1, 1)]]])
    assert d_x.adjoint().equals(-d_x)


def test_operator_shape_checks():
    operator = MatrixDiffOperator.zero(3)
    with pytest.raises(ValueError):
        operator.apply((r1, r2))
    with pytest.raises(OffShellMode):
        MatrixDiffOperator.from_terms([[[(1, 0, 1)]]])


def test_frechet_derivative():
    linear = frechet((r1 * r1x, w1, 0))
    image = linear.apply((x, 0, w0))
    assert equals(image[0], x * r1x + r1)
    assert equals(image[1], w1 - x * w1)
    assert image[2] == 0


def test_prolongation_on_omegas():
    assert equals(prolonged_action((0, 0, w0), w1), w1)
    assert equals(prolonged_action((1, 0, 0), w1), -w1)


def test_euler_operator():
    assert euler_operator(jet(1, 1) ** 2 / 2)[0] == -jet(1, 2)
    divergence = total_dx(r1 * w0)
    assert all(is_zero(component) for component in euler_operator(divergence))


def test_order_function():
    e = jet(1, 3) * omega(2)
    assert ord(e, "r1") == 3
    assert ord(e, "omega") == 2
    assert ord(e, "r2") == float('-inf')
    with pytest.raises(ValueError):
        ord(e, "r4")


def test_image_of_A_hat():
    assert omega_euler(w1) == 0
    assert in_image_of_Ahat(w1 * w0)
    assert not in_image_of_Ahat(w0)


@pytest.mark.parametrize("f", [
    r1 * r1x,
    w0 * w1 * sp.exp(r2 - r1),
    x * r2 ** 2 + r1x * w0,
    symbolic_omega(1) * r1,
], ids=str)
def test_total_derivatives_commute(f):
    assert equals(total_dx(total_dt(f)), total_dt(total_dx(f)))
