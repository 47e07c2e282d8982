"""Generic cyclotomic Gaudin layer: Lax matrix assembly from residue
coefficients, coadjoint-orbit dressing, the residue Hamiltonians H_{p,r},
the Lax partners h_r^{(p)}, Lax right-hand sides, and Lagrangian
coefficients.

The Lax matrix is the weight-1 equivariant rational matrix

    L(lambda) = A0_0/lambda + A0_1/lambda^2
              + (1/T) sum_r sum_k sigma^k A_r / (lambda - omega^k zeta_r)
              + Ainf,

with A0_0 of grade 0, A0_1 of grade -1 and Ainf of grade 1.  Hamiltonians
are residues H_{p,0} = Res_0 (lambda^p/(p+1)) Tr L^(p+1) and
H_{p,r} = T Res_{zeta_r} (lambda^p/(p+1)) Tr L^(p+1); their sum over all
points including infinity vanishes by the residue theorem.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .algebra import RootOfUnity, grading_residual, primitive_root, sigma_pow
from .errors import (GradingError, InvalidOrderError, PoleProximityError,
                     StructuralError)
from .jets import JetMatrix, matrix_value
from .ratmat import INF, LaurentSeries, RationalMatrix

_GRADE_TOL = 1e-12
MAX_DEPTH = 3


@dataclass(frozen=True)
class FlowId:
    """Hierarchy time t_p^r: power p >= 1, pole index r in {0..N}."""

    p: int
    r: int

    def __post_init__(self):
        if self.p < 1:
            raise InvalidOrderError(f"flow power must be >= 1, got {self.p}")
        if self.r < 0:
            raise InvalidOrderError(f"pole index must be >= 0, got {self.r}")

    def __str__(self):
        return f"({self.p},{self.r})"


@dataclass(frozen=True)
class PoleConfig:
    """Gamma-orbit pole data: order T and finite nonzero points zeta_r."""

    T: int
    zetas: tuple
    root: RootOfUnity = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "zetas", tuple(complex(z) for z in self.zetas))
        if self.root is None or self.root.order != self.T:
            object.__setattr__(self, "root", primitive_root(self.T))
        for z in self.zetas:
            if abs(z) <= 1e-12:
                raise PoleProximityError("zeta_r must be nonzero")
        for a, za in enumerate(self.zetas):
            for b, zb in enumerate(self.zetas):
                if a == b:
                    continue
                for k in range(self.T):
                    if abs(self.root.power(k) * za - zb) <= 1e-12:
                        raise PoleProximityError(
                            f"Gamma-orbits of zeta_{a+1} and zeta_{b+1} intersect")

    @property
    def N(self) -> int:
        return len(self.zetas)

    def slot_point(self, r: int) -> complex:
        if r == 0:
            return 0j
        return self.zetas[r - 1]


@dataclass
class GaudinCoefficients:
    """Residue data (A0_0, A0_1, A_1..A_N, Ainf) with grading constraints."""

    A0_0: object
    A0_1: object
    A_list: list
    Ainf: object
    T: int
    validate: bool = True    # False skips the grading check (trusted builders)

    def __post_init__(self):
        if not self.validate:
            return
        for name, mat, grade in (("A0_0", self.A0_0, 0), ("A0_1", self.A0_1, -1),
                                 ("Ainf", self.Ainf, 1)):
            res = grading_residual(matrix_value(mat), grade, self.T)
            if res > _GRADE_TOL:
                raise GradingError(f"{name} off grade {grade} by {res:.2e}")


@dataclass
class OrbitData:
    """Fixed orbit representatives Lambda and dressing fields phi.

    The scalar gauge freedom in phi0_0 is resolved by rescaling (phi0_0,
    phi0_1) by det(phi0_0)^(-1/T) at construction, which leaves all
    dressed coefficients unchanged.
    """

    Lam0_0: np.ndarray
    Lam0_1: np.ndarray
    Lam_list: list
    Laminf: np.ndarray
    phi0_0: np.ndarray
    phi0_1: np.ndarray
    phi_list: list
    T: int

    def __post_init__(self):
        self.phi0_0 = np.asarray(self.phi0_0, dtype=complex)
        self.phi0_1 = np.asarray(self.phi0_1, dtype=complex)
        det = np.linalg.det(self.phi0_0)
        if abs(det) < 1e-300 or np.linalg.cond(self.phi0_0) > 1e12:
            raise StructuralError("phi0_0 is (numerically) singular")
        scale = det ** (-1.0 / self.T)
        self.phi0_0 = scale * self.phi0_0
        self.phi0_1 = scale * self.phi0_1
        for name, mat, grade in (("phi0_0", self.phi0_0, 0), ("phi0_1", self.phi0_1, 1)):
            res = grading_residual(mat, grade, self.T)
            if res > _GRADE_TOL:
                raise GradingError(f"{name} off grade {grade} by {res:.2e}")


def dress(O: OrbitData) -> GaudinCoefficients:
    """Coadjoint-orbit dressing of the fixed data Lambda by the fields phi."""
    inv0 = np.linalg.inv(O.phi0_0)
    B = O.phi0_0 @ np.asarray(O.Lam0_1, complex) @ inv0
    A0_1 = B
    W = O.phi0_1 @ inv0
    A0_0 = O.phi0_0 @ np.asarray(O.Lam0_0, complex) @ inv0 + (W @ B - B @ W)
    A_list = []
    for phi, Lam in zip(O.phi_list, O.Lam_list):
        phi = np.asarray(phi, complex)
        if abs(np.linalg.det(phi)) < 1e-300:
            raise StructuralError("singular dressing field phi_r")
        A_list.append(phi @ np.asarray(Lam, complex) @ np.linalg.inv(phi))
    return GaudinCoefficients(A0_0=A0_0, A0_1=A0_1, A_list=A_list,
                              Ainf=np.asarray(O.Laminf, complex), T=O.T)


def assemble_lax(C: GaudinCoefficients, P: PoleConfig) -> RationalMatrix:
    """Build the weight-1 equivariant Lax matrix from its coefficients."""
    if len(C.A_list) != P.N:
        raise StructuralError(f"expected {P.N} orbit coefficients, got {len(C.A_list)}")
    root = P.root
    poles = [(0j, [C.A0_0, C.A0_1])]
    for zr, Ar in zip(P.zetas, C.A_list):
        for k in range(P.T):
            poles.append((root.power(k) * zr, [sigma_pow(Ar, k, root) * (1.0 / P.T)]))
    return RationalMatrix(P.T, [C.Ainf], poles).trim()


def _check_depth(p: int, max_depth: int) -> None:
    if p > max_depth:
        raise InvalidOrderError(f"flow power {p} exceeds configured depth {max_depth}")


def _monomial_series(point, p: int, trunc: int, dim: int) -> LaurentSeries:
    """Exact expansion of the scalar lambda^p at a finite point (or INF),
    zero-padded up to trunc (a polynomial is exact at all orders)."""
    if point == INF:
        coeffs = [1.0 + 0j] + [0j] * (trunc + p)
        return LaurentSeries(dim, INF, -p, coeffs[: trunc + p + 1])
    z = complex(point)
    coeffs = [comb(p, j) * z ** (p - j) if j <= p else 0j for j in range(trunc + 1)]
    return LaurentSeries(dim, z, 0, coeffs)


def _lax_power_series(L: RationalMatrix, P: PoleConfig, point, p: int,
                      extra: int = 2) -> LaurentSeries:
    """Series of lambda^p L(lambda)^p at a slot point, with enough retained
    orders for residue extraction up to exponent +extra."""
    o = max(L.pole_order(point), 1) if point != INF else 1
    K = o * p + extra + 2
    s = L.laurent_expand(point, K).power(p)
    if point != INF and abs(complex(point)) <= 1e-12:
        return s.shift(p)
    mono = _monomial_series(point, p, s.trunc - s.low + p + extra + 2, L.dim)
    return s.mul(mono)


def hamiltonian(f: FlowId, L: RationalMatrix, P: PoleConfig,
                max_depth: int = MAX_DEPTH):
    """H_{p,r} = w_r Res_{slot} (lambda^p/(p+1)) Tr L^(p+1) with w_0 = 1
    and w_r = T for r >= 1."""
    _check_depth(f.p, max_depth)
    if f.r > P.N:
        raise InvalidOrderError(f"pole index {f.r} out of range (N={P.N})")
    p = f.p
    point = P.slot_point(f.r)
    o = max(L.pole_order(point), 1)
    K = o * (p + 1) + 2
    tr = L.laurent_expand(point, K).power(p + 1).trace_series()
    if f.r == 0:
        res = tr.coeff(-1 - p)
        w = 1.0
    else:
        z = complex(point)
        res = 0j
        for j in range(0, p + 1):
            res = res + comb(p, j) * z ** (p - j) * tr.coeff(-1 - j)
        w = float(P.T)
    return w * res / (p + 1)


def hamiltonian_at_infinity(p: int, L: RationalMatrix, P: PoleConfig,
                            max_depth: int = MAX_DEPTH):
    """H_{p,inf} = Res_inf (lambda^p/(p+1)) Tr L^(p+1) dlambda
    = -(1/(p+1)) [coefficient of u^(p+1)] of Tr L^(p+1) at infinity."""
    _check_depth(p, max_depth)
    tr = L.laurent_expand(INF, p + 3).power(p + 1).trace_series()
    return -tr.coeff(p + 1) / (p + 1)


def lax_partner(f: FlowId, L: RationalMatrix, P: PoleConfig,
                max_depth: int = MAX_DEPTH) -> RationalMatrix:
    """The weight-0 equivariant rational h_r^{(p)} whose only singular part
    lies on the Gamma-orbit of the slot and matches the principal part of
    the local expansion of lambda^p L^p there."""
    _check_depth(f.p, max_depth)
    if f.r > P.N:
        raise InvalidOrderError(f"pole index {f.r} out of range (N={P.N})")
    point = P.slot_point(f.r)
    G = _lax_power_series(L, P, point, f.p)
    prin = []  # c_n = coefficient of u^(-1-n)
    n = 0
    while -(n + 1) >= G.low:
        prin.append(G.coeff(-(n + 1)))
        n += 1
    root = P.root
    poles = []
    if f.r == 0:
        if prin:
            poles.append((0j, prin))
    else:
        for k in range(P.T):
            zk = root.power(k) * complex(point)
            cs = [root.power(k * (n + 1)) * sigma_pow(c, k, root)
                  for n, c in enumerate(prin)]
            if cs:
                poles.append((zk, cs))
    return RationalMatrix(L.dim, [], poles, validate=False).trim()


@dataclass
class CoefficientDerivative:
    """Time derivatives of the Lax coefficients along one flow."""

    dA0_0: np.ndarray
    dA0_1: np.ndarray
    dA_list: list
    dAinf: np.ndarray


def lax_rhs(f: FlowId, L: RationalMatrix, P: PoleConfig,
            max_depth: int = MAX_DEPTH, struct_tol: float = 1e-10):
    """-[h_r^{(p)}, L] = [L, h_r^{(p)}] reduced to the pole structure of L.

    Returns (rhs RationalMatrix, CoefficientDerivative).  Any principal
    coefficient beyond the orders present in L larger than struct_tol is a
    structural error (the commutator must close on the coefficient space).
    """
    h = lax_partner(f, L, P, max_depth)
    rhs = L.mul(h) - h.mul(L)
    root = P.root
    # check pole orders do not exceed those of L, then trim the dust
    for z, cs in rhs.poles:
        allowed = L.pole_order(z)
        for k in range(allowed, len(cs)):
            mx = float(np.max(np.abs(matrix_value(cs[k]))))
            if mx > struct_tol:
                raise StructuralError(
                    f"commutator pole at {z} of order {k+1} (magnitude {mx:.2e})")
    for c in rhs.poly:
        if float(np.max(np.abs(matrix_value(c)))) > struct_tol:
            raise StructuralError("commutator has an unexpected polynomial part")
    reduced_poles = []
    for z, cs in rhs.poles:
        cs = cs[: L.pole_order(z)]
        if cs:
            reduced_poles.append((z, cs))
    reduced = RationalMatrix(L.dim, [], reduced_poles, validate=False)
    at0 = reduced.laurent_expand(0j, 0)
    dA0_0 = matrix_value(at0.coeff(-1))
    dA0_1 = matrix_value(at0.coeff(-2))
    dA_list = [P.T * matrix_value(reduced.residue(z)) for z in P.zetas]
    dAinf = np.zeros((L.dim, L.dim), complex)
    return reduced, CoefficientDerivative(dA0_0, dA0_1, dA_list, dAinf)


def lagrangian_coeff(f: FlowId, L: RationalMatrix, P: PoleConfig, kinetic,
                     max_depth: int = MAX_DEPTH):
    """Lagrangian coefficient of the multiform: kinetic part minus H_{p,r}.

    The kinetic part Tr(A0_0 dphi0_0 phi0_0^-1) + sum_r Tr(A_r dphi_r
    phi_r^-1) is supplied by the model realisation; total-derivative terms
    at 0 and infinity are dropped.
    """
    return kinetic - hamiltonian(f, L, P, max_depth)


# ---------------------------------------------------------------------------
# Adjoint gradients: dH_{p,r} = Tr(M_A00 dA0_0) + Tr(M_A01 dA0_1)
#                  + sum_r Tr(M_r dA_r) + Tr(M_inf dAinf)
# via residue convolutions of the series G = lambda^p L^p at the slot.
# ---------------------------------------------------------------------------

def _residue_against_profile(G: LaurentSeries, slot_point, profile) -> np.ndarray:
    """Res_{slot} of rho(lambda) * G(lambda) dlambda for a scalar profile
    rho that is either ("pole", a, m) = 1/(lambda-a)^m or ("const",)."""
    if profile[0] == "const":
        c = G.coeff(-1)
        return matrix_value(c)
    _, a, m = profile
    z0 = complex(slot_point)
    if abs(a - z0) <= 1e-12:
        return matrix_value(G.coeff(m - 1))
    acc = None
    j = 0
    while -(1 + j) >= G.low:
        w = comb(m - 1 + j, j) * (-1) ** j * (z0 - a) ** (-(m + j))
        term = w * matrix_value(G.coeff(-1 - j))
        acc = term if acc is None else acc + term
        j += 1
    if acc is None:
        acc = np.zeros((G.dim, G.dim), complex)
    return acc


def hamiltonian_coefficient_gradients(f: FlowId, L: RationalMatrix,
                                      P: PoleConfig,
                                      max_depth: int = MAX_DEPTH):
    """Exact gradient matrices of H_{p,r} with respect to the Lax
    coefficients (adjoint/residue route; no dual numbers)."""
    _check_depth(f.p, max_depth)
    point = P.slot_point(f.r)
    w = 1.0 if f.r == 0 else float(P.T)
    root = P.root
    G = _lax_power_series(L.values(), P, point, f.p)
    M_A00 = w * _residue_against_profile(G, point, ("pole", 0j, 1))
    M_A01 = w * _residue_against_profile(G, point, ("pole", 0j, 2))
    M_inf = w * _residue_against_profile(G, point, ("const",))
    M_list = []
    for zr in P.zetas:
        acc = np.zeros((L.dim, L.dim), complex)
        for k in range(P.T):
            Gk = G.sigma(-k, root)
            acc += _residue_against_profile(Gk, point,
                                            ("pole", root.power(k) * zr, 1))
        M_list.append(w * acc / P.T)
    return M_A00, M_A01, M_list, M_inf
