"""
Exact solution families, their numeric sampling and finite-difference validation.

Regular family, Psi a Klein-Gordon solution with subscripts for partial derivatives:

    t  = -e^{-(r1-r2)/2} (Psi_1 + Psi_2)
    x  =  e^{-(r1-r2)/2} (2 Psi_1 + Psi - V1 (Psi_1 + Psi_2))
    r3 =  W(e^{(r1-r2)/2} (Psi_1 - Psi_2 - Psi))

Singular families fix one of r1, r2; the ultra-singular family fixes both.
"""
import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from ..errors import DegenerateSeed, Inconclusive, JacobianSingular, NewtonDiverged
from ..jets.derivatives import tidy, to_standard
from ..kernel.expression import diff_partial, zero_test
from ..kernel.grammar import parse, parse_univariate
from ..kernel.symbols import AtomKind, atom_info, jet, r1, r2, t, w0, x
from .conservation import make_current_family1, make_current_family2
from .fields import ConservedCurrent
from .symmetry import kg_residual
from .system import DRIFT_FLUX

logger = logging.getLogger(__name__)

NEWTON_TOLERANCE = 1e-12
NEWTON_MAX_ITERATIONS = 50
JACOBIAN_FLOOR = 1e-14
CERTIFICATE_TOLERANCE = 1e-10
# Largest accepted change of r between neighbouring nodes, in units of the x spacing
BRANCH_JUMP_FACTOR = 10
# Norms below this are reported as exact rather than given a convergence order
EXACT_FLOOR = 1e-12
DEFAULT_GRID_SIZES = (51, 101, 201)

_GAP = r1 - r2
_u = sp.Symbol("u", real=True)


class SolutionFamily(Enum):
    """Families of the complete solution set."""
    REGULAR = "regular"
    SINGULAR_R1 = "singular_r1"  # r1 = c
    SINGULAR_R2 = "singular_r2"  # r2 = c
    ULTRA = "ultra"              # r1 = c1, r2 = c2


def univariate(spec) -> sp.Lambda:
    """A univariate closed form from text, a Lambda or an expression in u."""
    if isinstance(spec, sp.Lambda):
        return spec
    if isinstance(spec, str):
        return parse_univariate(spec)
    return sp.Lambda(_u, sp.sympify(spec))


@dataclass(frozen=True)
class KGSolution:
    """
    Psi(r1, r2) = sum c e^{a r1 + b r2} with a b = -1/4, plus optional extra terms.
    """
    terms: Tuple[Tuple[sp.Expr, sp.Expr, sp.Expr], ...] = ()
    extra: sp.Expr = sp.S.Zero

    def __post_init__(self):
        terms = tuple((sp.nsimplify(c), sp.nsimplify(a), sp.nsimplify(b)) for c, a, b in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "extra", sp.sympify(self.extra))
        for _, a, b in terms:
            if a * b != sp.Rational(-1, 4):
                raise ValueError(f"Exponent pair ({a}, {b}) does not satisfy ab = -1/4")

    @classmethod
    def from_expression(cls, Psi) -> "KGSolution":
        """Split an expression into exponential terms and a remainder."""
        terms, extra = [], sp.S.Zero
        for term in sp.Add.make_args(tidy(Psi)):
            coefficient, exponent = _split_exponential(term)
            if coefficient is not None and not coefficient.free_symbols:
                a, b = exponent.coeff(r1), exponent.coeff(r2)
                if sp.expand(exponent - a * r1 - b * r2) == 0 and a * b == sp.Rational(-1, 4):
                    terms.append((coefficient, a, b))
                    continue
            extra += term
        return cls(tuple(terms), extra)

    @classmethod
    def parse(cls, text: str) -> "KGSolution":
        return cls.from_expression(parse(text))

    def expression(self) -> sp.Expr:
        return tidy(sum((c * sp.exp(a * r1 + b * r2) for c, a, b in self.terms), sp.S.Zero)
                    + self.extra)

    def satisfies_klein_gordon(self, rng: Optional[np.random.Generator] = None) -> bool:
        return bool(zero_test(kg_residual(self.expression()), rng))

    def is_nondegenerate(self) -> bool:
        """Psi outside span{e^{-(r1-r2)/2}, e^{(r1-r2)/2}, (r1+r2) e^{(r1-r2)/2}}."""
        return not _in_degenerate_span(self.expression())


def _split_exponential(term: sp.Expr) -> Tuple[Optional[sp.Expr], sp.Expr]:
    exponent, rest = sp.S.Zero, []
    for factor in sp.Mul.make_args(term):
        if isinstance(factor, sp.exp):
            exponent += factor.args[0]
        else:
            rest.append(factor)
    return sp.Mul(*rest), sp.expand(exponent)


def _in_degenerate_span(Psi: sp.Expr) -> bool:
    groups: Dict[sp.Expr, sp.Expr] = {}
    for term in sp.Add.make_args(tidy(Psi)):
        coefficient, exponent = _split_exponential(term)
        groups[exponent] = groups.get(exponent, sp.S.Zero) + coefficient
    for exponent, coefficient in groups.items():
        coefficient = sp.expand(coefficient)
        if coefficient == 0:
            continue
        if sp.expand(exponent + _GAP / 2) == 0:
            if coefficient.free_symbols:
                return False
        elif sp.expand(exponent - _GAP / 2) == 0:
            if coefficient.free_symbols - {r1, r2}:
                return False
            polynomial = sp.Poly(coefficient, r1, r2)
            if polynomial.total_degree() > 1 or coefficient.coeff(r1) != coefficient.coeff(r2):
                return False
        else:
            return False
    return True


@dataclass
class ImplicitSolution:
    """
    A member of one family with its implicit or explicit defining equations.

    unknowns are solved from equations == 0 at every (t, x); fixed holds the
    values of r1, r2 that are constant on the family, r3 is an expression in
    the unknowns, t and x.
    """
    family: SolutionFamily
    parameters: Dict[str, str]
    unknowns: Tuple[sp.Symbol, ...]
    equations: Tuple[sp.Expr, ...]
    fixed: Dict[sp.Symbol, sp.Expr]
    r3: sp.Expr
    seed: Tuple[float, ...] = ()
    seed_point: Tuple[float, float] = (0.0, 0.0)
    default_t_range: Tuple[float, float] = (0.0, 1.0)
    default_x_range: Tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if len(self.unknowns) != len(self.equations):
            raise ValueError("Need as many defining equations as unknowns")
        if self.unknowns and len(self.seed) != len(self.unknowns):
            raise ValueError("Seed must give a value for every unknown")

    def maps(self) -> Tuple[sp.Expr, sp.Expr]:
        """Explicit (t, x) as functions of (r1, r2) on the regular family."""
        if self.family != SolutionFamily.REGULAR:
            raise ValueError("Only the regular family is given by maps of (r1, r2)")
        return tuple(sp.expand(-e + v) for e, v in zip(self.equations, (t, x)))

    def numeric_system(self):
        symbols = list(self.unknowns) + [t, x]
        residual = sp.lambdify(symbols, list(self.equations), "numpy")
        jacobian = sp.lambdify(symbols, [[sp.diff(e, u) for u in self.unknowns]
                                         for e in self.equations], "numpy")
        return residual, jacobian

    def r3_function(self) -> Callable:
        return sp.lambdify(list(self.unknowns) + [t, x], self.r3, "numpy")


def make_regular(Psi, W="identity", seed: Tuple[float, float] = (-1.85, 4.85)) -> ImplicitSolution:
    kg = Psi if isinstance(Psi, KGSolution) else KGSolution.from_expression(sp.sympify(Psi))
    if not kg.satisfies_klein_gordon():
        raise DegenerateSeed(f"Psi = {kg.expression()} does not solve Psi_r1r2 = -Psi/4")
    if not kg.is_nondegenerate():
        raise DegenerateSeed(f"Psi = {kg.expression()} lies in the degenerate span")
    Psi = kg.expression()
    W = univariate(W)
    V1 = DRIFT_FLUX.velocities[0]
    Psi_1, Psi_2 = diff_partial(Psi, r1), diff_partial(Psi, r2)
    damping = sp.exp(-_GAP / 2)
    t_map = tidy(-damping * (Psi_1 + Psi_2))
    x_map = tidy(damping * (2 * Psi_1 + Psi - V1 * (Psi_1 + Psi_2)))
    r3 = W(tidy(sp.exp(_GAP / 2) * (Psi_1 - Psi_2 - Psi)))
    seed_point = tuple(float(e.subs({r1: seed[0], r2: seed[1]})) for e in (t_map, x_map))
    return ImplicitSolution(SolutionFamily.REGULAR, {"Psi": sp.sstr(Psi), "W": sp.sstr(W.expr)},
                            (r1, r2), (t_map - t, x_map - x), {}, r3, tuple(seed), seed_point,
                            (-1.5, -0.75), (-0.5, 0.5))


def make_singular(side: str, c=0, Theta="exp", W="tanh",
                  seed: Optional[float] = None) -> ImplicitSolution:
    """side 'r1' fixes r1 = c and solves for r2; side 'r2' fixes r2 = c and solves for r1."""
    c = sp.nsimplify(c)
    Theta, W = univariate(Theta), univariate(W)
    if side == "r1":
        free = r2
        Theta_prime = sp.diff(Theta(free), free)
        x_map = (free + c - 1) * t + sp.exp(free) * Theta_prime
        r3 = W(sp.exp(-free) * t - Theta_prime - Theta(free))
        family, fixed = SolutionFamily.SINGULAR_R1, {r1: c}
    elif side == "r2":
        free = r1
        Theta_prime = sp.diff(Theta(free), free)
        x_map = (free + c + 1) * t + sp.exp(-free) * Theta_prime
        r3 = W(sp.exp(free) * t + Theta_prime - Theta(free))
        family, fixed = SolutionFamily.SINGULAR_R2, {r2: c}
    else:
        raise ValueError(f"Singular side must be 'r1' or 'r2', got {side}")
    seed_point = (1.0, 0.0)
    if seed is None:
        seed = _scalar_seed(x_map, free, seed_point)
    return ImplicitSolution(family, {"side": side, "c": sp.sstr(c), "Theta": sp.sstr(Theta.expr),
                                     "W": sp.sstr(W.expr)},
                            (free,), (x_map - x,), fixed, r3, (float(seed),), seed_point,
                            (0.5, 1.5), (-0.5, 0.5))


def _scalar_seed(x_map: sp.Expr, free: sp.Symbol, point: Tuple[float, float]) -> float:
    """A root of x_map = x at the given (t, x), found by bracketing on a coarse scan."""
    f = sp.lambdify(free, x_map.subs(t, point[0]) - point[1], "numpy")
    scan = np.linspace(-5.0, 5.0, 2001)
    with np.errstate(all='ignore'):
        values = f(scan) * np.ones_like(scan)
    changes = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)[0]
    if len(changes) == 0:
        raise JacobianSingular(f"No branch of x = {x_map} through {point}")
    return float(scan[changes[0]])


def make_ultra(c1=sp.Rational(3, 10), c2=sp.Rational(1, 5), W="tanh") -> ImplicitSolution:
    c1, c2 = sp.nsimplify(c1), sp.nsimplify(c2)
    W = univariate(W)
    return ImplicitSolution(SolutionFamily.ULTRA, {"c1": sp.sstr(c1), "c2": sp.sstr(c2),
                                                   "W": sp.sstr(W.expr)},
                            (), (), {r1: c1, r2: c2}, W(x - (c1 + c2) * t), (), (0.5, 0.0),
                            (0.0, 1.0), (-1.0, 1.0))


@dataclass
class GridSpec:
    t_range: Tuple[float, float]
    x_range: Tuple[float, float]
    nt: int = 51
    nx: int = 51

    def __post_init__(self):
        if self.nt < 5 or self.nx < 5:
            raise ValueError("Grids need at least 5 nodes per direction")
        if self.t_range[1] <= self.t_range[0] or self.x_range[1] <= self.x_range[0]:
            raise ValueError("Grid ranges must be increasing")

    @property
    def t_values(self) -> np.ndarray:
        return np.linspace(*self.t_range, self.nt)

    @property
    def x_values(self) -> np.ndarray:
        return np.linspace(*self.x_range, self.nx)

    @classmethod
    def square(cls, solution: ImplicitSolution, n: int) -> "GridSpec":
        return cls(solution.default_t_range, solution.default_x_range, n, n)


@dataclass
class GridField:
    """Values of (r1, r2, r3) on a uniform (t, x) grid, indexed [time, space]."""
    t0: float
    x0: float
    dt: float
    dx: float
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    certificate: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        shapes = {self.r1.shape, self.r2.shape, self.r3.shape}
        if len(shapes) != 1:
            raise ValueError("Field arrays must share one shape")
        for name in ("r1", "r2", "r3"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"Field {name} has non-finite values")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.r1.shape

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.shape[1])

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.t, self.x, indexing="ij")

    def component(self, i: int) -> np.ndarray:
        return (self.r1, self.r2, self.r3)[i - 1]


def _newton(residual, jacobian, guess: np.ndarray, t_values: np.ndarray, x_values: np.ndarray,
            nodes: Sequence[Tuple[int, int]]) -> Tuple[np.ndarray, int]:
    """
    Vectorized damped Newton for len(nodes) independent systems.
    guess has shape (nodes, unknowns).
    """
    z = np.array(guess, dtype=float)
    n = z.shape[1]

    def evaluate(values):
        F = np.array([np.broadcast_to(f, t_values.shape) for f in
                      residual(*values.T, t_values, x_values)], dtype=float).T
        return F

    F = evaluate(z)
    for iteration in range(1, NEWTON_MAX_ITERATIONS + 1):
        J = np.array([[np.broadcast_to(entry, t_values.shape) for entry in row]
                      for row in jacobian(*z.T, t_values, x_values)], dtype=float)
        J = np.moveaxis(J, -1, 0).reshape(len(z), n, n)
        det = np.linalg.det(J)
        singular = np.abs(det) < JACOBIAN_FLOOR
        if np.any(singular):
            node = nodes[int(np.argmax(singular))]
            raise JacobianSingular(f"Jacobian determinant below {JACOBIAN_FLOOR} at node {node}")
        step = np.linalg.solve(J, -F[..., None])[..., 0]
        scale = np.ones(len(z))
        for _ in range(10):
            candidate = z + scale[:, None] * step
            F_candidate = evaluate(candidate)
            worse = np.linalg.norm(F_candidate, axis=1) > np.linalg.norm(F, axis=1) * (1 + 1e-12) + 1e-15
            if not np.any(worse):
                break
            scale = np.where(worse, scale / 2, scale)
        z, F = candidate, F_candidate
        if np.max(np.abs(scale[:, None] * step)) < NEWTON_TOLERANCE:
            return z, iteration
    bad = int(np.argmax(np.linalg.norm(F, axis=1)))
    raise NewtonDiverged(f"No convergence after {NEWTON_MAX_ITERATIONS} iterations", nodes[bad])


def sample_on_grid(solution: ImplicitSolution, grid: GridSpec) -> GridField:
    """
    Inverts the defining equations node by node, continuing from solved neighbours.
    """
    T, X = np.meshgrid(grid.t_values, grid.x_values, indexing="ij")
    values = {}
    certificate = {"max_iterations": 0, "max_implicit_residual": 0.0}
    if solution.unknowns:
        solved = _continue_over_grid(solution, grid, certificate)
        for k, unknown in enumerate(solution.unknowns):
            values[unknown] = solved[..., k]
    for symbol, constant in solution.fixed.items():
        values[symbol] = np.full(T.shape, float(constant))
    r3_function = solution.r3_function()
    r3_values = np.broadcast_to(r3_function(*[values[u] for u in solution.unknowns], T, X), T.shape)
    field_ = GridField(grid.t_range[0], grid.x_range[0], float(grid.t_values[1] - grid.t_values[0]),
                       float(grid.x_values[1] - grid.x_values[0]), values[r1], values[r2],
                       np.array(r3_values, dtype=float), certificate)
    _monitor_nondegeneracy(solution, field_)
    return field_


def _continue_over_grid(solution: ImplicitSolution, grid: GridSpec,
                        certificate: Dict[str, float]) -> np.ndarray:
    residual, jacobian = solution.numeric_system()
    t_values, x_values = grid.t_values, grid.x_values
    n = len(solution.unknowns)
    solved = np.full((grid.nt, grid.nx, n), np.nan)

    # 1. Seed node nearest to the image of the seed
    i0 = int(np.argmin(np.abs(t_values - solution.seed_point[0])))
    j0 = int(np.argmin(np.abs(x_values - solution.seed_point[1])))

    def solve(nodes, guess):
        ts = np.array([t_values[i] for i, _ in nodes])
        xs = np.array([x_values[j] for _, j in nodes])
        z, iterations = _newton(residual, jacobian, guess, ts, xs, nodes)
        certificate["max_iterations"] = max(certificate["max_iterations"], iterations)
        return z

    solved[i0, j0] = solve([(i0, j0)], np.array([solution.seed]))[0]

    # 2. Seed column, sequentially outward from the seed node
    for direction in (1, -1):
        j = j0 + direction
        while 0 <= j < grid.nx:
            solved[i0, j] = solve([(i0, j)], solved[i0, j - direction][None, :])[0]
            j += direction

    # 3. Remaining columns, each vectorized from its solved neighbour
    for direction in (1, -1):
        i = i0 + direction
        while 0 <= i < grid.nt:
            nodes = [(i, j) for j in range(grid.nx)]
            solved[i] = solve(nodes, solved[i - direction])
            i += direction

    # 4. Certificate and branch continuity
    T, X = np.meshgrid(t_values, x_values, indexing="ij")
    F = np.array([np.broadcast_to(f, T.shape) for f in
                  residual(*[solved[..., k] for k in range(n)], T, X)])
    implicit = np.max(np.abs(F), axis=0)
    certificate["max_implicit_residual"] = float(np.max(implicit))
    if certificate["max_implicit_residual"] > CERTIFICATE_TOLERANCE:
        node = tuple(int(i) for i in np.unravel_index(np.argmax(implicit), implicit.shape))
        raise NewtonDiverged(f"Implicit residual {certificate['max_implicit_residual']:.3e} "
                             f"exceeds {CERTIFICATE_TOLERANCE:.0e}", node)
    spacing = float(x_values[1] - x_values[0])
    worst_jump, worst_node = 0.0, (i0, j0)
    for axis in (0, 1):
        jumps = np.max(np.abs(np.diff(solved, axis=axis)), axis=-1)
        index = np.unravel_index(np.argmax(jumps), jumps.shape)
        if jumps[index] > worst_jump:
            worst_jump = float(jumps[index])
            worst_node = tuple(int(i) + (1 if a == axis else 0) for a, i in enumerate(index))
    certificate["max_neighbour_jump"] = worst_jump
    if worst_jump > BRANCH_JUMP_FACTOR * spacing:
        raise NewtonDiverged(f"Branch jump {worst_jump:.3e} exceeds {BRANCH_JUMP_FACTOR} dx = "
                             f"{BRANCH_JUMP_FACTOR * spacing:.3e}", worst_node)
    logger.debug("Newton inversion done, at most %d iterations", certificate["max_iterations"])
    return solved


def _monitor_nondegeneracy(solution: ImplicitSolution, f: GridField) -> None:
    if solution.family != SolutionFamily.REGULAR:
        return
    product = np.abs(np.gradient(f.r1, f.dx, axis=1) * np.gradient(f.r2, f.dx, axis=1))
    f.certificate["min_r1x_r2x"] = float(np.min(product))
    if np.min(product) < 1e-10:
        logger.warning("r1_x r2_x nearly vanishes on the regular sample")


def _interior(a: np.ndarray) -> np.ndarray:
    return a[1:-1, 1:-1]


def _centered_t(a: np.ndarray, dt: float) -> np.ndarray:
    return (a[2:, 1:-1] - a[:-2, 1:-1]) / (2 * dt)


def _centered_x(a: np.ndarray, dx: float) -> np.ndarray:
    return (a[1:-1, 2:] - a[1:-1, :-2]) / (2 * dx)


@dataclass
class ResidualNorms:
    max: Tuple[float, ...]
    l2: Tuple[float, ...]

    def worst(self) -> float:
        return max(self.max)


def _norms(residuals: Sequence[np.ndarray], f: GridField) -> ResidualNorms:
    cell = f.dt * f.dx
    return ResidualNorms(tuple(float(np.max(np.abs(r))) for r in residuals),
                         tuple(float(np.sqrt(np.sum(r ** 2) * cell)) for r in residuals))


def pde_residual(f: GridField) -> ResidualNorms:
    """Centered-difference residual of r^k_t + V^k r^k_x over interior nodes."""
    s = f.r1 + f.r2
    speeds = (s + 1, s - 1, s)
    residuals = [_centered_t(f.component(k), f.dt) + _interior(V) * _centered_x(f.component(k), f.dx)
                 for k, V in zip((1, 2, 3), speeds)]
    return _norms(residuals, f)


def jet_values(f: GridField, order: int = 2) -> Dict[sp.Symbol, np.ndarray]:
    """Restricted jets r^i_k from x-differences of the sampled fields."""
    values = {}
    for i in (1, 2, 3):
        current = f.component(i)
        values[jet(i, 0)] = current
        for k in range(1, order + 1):
            current = np.gradient(current, f.dx, axis=1, edge_order=2)
            values[jet(i, k)] = current
    return values


def evaluate_on_grid(e, f: GridField, jets: Optional[Dict[sp.Symbol, np.ndarray]] = None
                     ) -> np.ndarray:
    """Numeric values of a differential function on the grid."""
    e = to_standard(e)
    if e.atoms(sp.core.function.AppliedUndef):
        raise Inconclusive(f"Cannot evaluate symbolic function symbols on a grid: {e}")
    order = max((atom_info(s).order for s in e.free_symbols
                 if atom_info(s) is not None and atom_info(s).kind == AtomKind.JET), default=0)
    if jets is None or any(jet(i, order) not in jets for i in (1, 2, 3)):
        jets = jet_values(f, max(order, 1))
    T, X = f.mesh()
    symbols = sorted(e.free_symbols, key=str)
    arguments = []
    for s in symbols:
        if s == t:
            arguments.append(T)
        elif s == x:
            arguments.append(X)
        elif s in jets:
            arguments.append(jets[s])
        else:
            raise Inconclusive(f"No grid values for {s}")
    values = sp.lambdify(symbols, e, "numpy")(*arguments)
    return np.broadcast_to(np.asarray(values, dtype=float), T.shape)


def conservation_residual(f: GridField, c: ConservedCurrent) -> ResidualNorms:
    """Centered-difference residual of D_t rho + D_x sigma."""
    jets = jet_values(f, 2)
    density = evaluate_on_grid(c.density, f, jets)
    flux = evaluate_on_grid(c.flux, f, jets)
    return _norms([_centered_t(density, f.dt) + _centered_x(flux, f.dx)], f)


def observed_order(coarse: float, fine: float) -> Optional[float]:
    """log2 of the error ratio; None when both errors are at round-off level."""
    if coarse < EXACT_FLOOR and fine < EXACT_FLOOR:
        return None
    if fine <= 0:
        return math.inf
    return math.log2(coarse / fine)


@dataclass
class ConvergenceRow:
    size: int
    pde_max: Tuple[float, ...]
    conservation_max: Tuple[float, ...]
    newton_iterations: int = 0
    implicit_residual: float = 0.0


@dataclass
class ConvergenceStudy:
    family: str
    rows: List[ConvergenceRow]
    current_labels: List[str]

    def orders(self) -> Dict[str, List[Optional[float]]]:
        """Observed orders between consecutive refinements, per residual."""
        series = {f"pde_{k + 1}": [row.pde_max[k] for row in self.rows] for k in range(3)}
        for k, label in enumerate(self.current_labels):
            series[f"conservation[{label}]"] = [row.conservation_max[k] for row in self.rows]
        return {name: [observed_order(a, b) for a, b in zip(values, values[1:])]
                for name, values in series.items()}

    def to_dict(self) -> Dict:
        return {"family": self.family, "rows": [asdict(row) for row in self.rows],
                "orders": {name: [("exact" if o is None else o) for o in values]
                           for name, values in self.orders().items()}}


def default_currents(solution: ImplicitSolution) -> List[ConservedCurrent]:
    """Two currents checked numerically on each family."""
    momentum = make_current_family2(sp.exp(_GAP / 2) * (r1 + r2 - 1), verify=False)
    if solution.family == SolutionFamily.ULTRA:
        return [make_current_family1(w0, verify=False), make_current_family1(w0 ** 2, verify=False)]
    if solution.family == SolutionFamily.REGULAR:
        return [momentum, make_current_family1(w0, verify=False)]
    return [make_current_family1(w0, verify=False), momentum]


def convergence_study(solution: ImplicitSolution, sizes: Sequence[int] = DEFAULT_GRID_SIZES,
                      currents: Optional[Sequence[ConservedCurrent]] = None) -> ConvergenceStudy:
    currents = list(currents) if currents is not None else default_currents(solution)
    rows = []
    for n in sizes:
        f = sample_on_grid(solution, GridSpec.square(solution, n))
        pde = pde_residual(f)
        conservation = [conservation_residual(f, c) for c in currents]
        rows.append(ConvergenceRow(n, pde.max, tuple(r.max[0] for r in conservation),
                                   int(f.certificate.get("max_iterations", 0)),
                                   float(f.certificate.get("max_implicit_residual", 0.0))))
        logger.info("Grid %dx%d: pde max %s", n, n, ", ".join(f"{v:.3e}" for v in pde.max))
    return ConvergenceStudy(solution.family.value, rows, [c.label for c in currents])


def write_grid_csv(f: GridField, path) -> Path:
    path = Path(path)
    T, X = f.mesh()
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "x", "r1", "r2", "r3"])
        for row in zip(T.ravel(), X.ravel(), f.r1.ravel(), f.r2.ravel(), f.r3.ravel()):
            writer.writerow([repr(float(v)) for v in row])
    logger.info("Wrote %s", path)
    return path


def write_sidecar(path, solution: ImplicitSolution, f: GridField,
                  study: Optional[ConvergenceStudy] = None) -> Path:
    path = Path(path)
    pde = pde_residual(f)
    data = {
        "family": solution.family.value,
        "parameters": solution.parameters,
        "grid": {"t0": f.t0, "x0": f.x0, "dt": f.dt, "dx": f.dx, "nt": f.shape[0], "nx": f.shape[1]},
        "newton_certificate": f.certificate,
        "residual_norms": {"max": list(pde.max), "l2": list(pde.l2)},
        "convergence": study.to_dict() if study is not None else None,
    }
    path.write_text(json.dumps(data, indent=2, default=str))
    logger.info("Wrote %s", path)
    return path
