"""Concrete realisations of the cyclotomic Gaudin model: the periodic Toda
chain, the DST model, and their coupling.

Canonical coordinates and flow conventions
------------------------------------------
All flows are generated from the residue Hamiltonians H_{p,r} through

    dq_i/dt = -dH/dp_i,      dp_i/dt = +dH/dq_i,
    dx_i/dt = +(1/beta) dH/dX_i,   dX_i/dt = -(1/beta) dH/dx_i,

with beta = 1 for the pure DST model.  This convention reproduces the
printed first-flow equations of all three models (for pure DST, modulo
the scaling-gauge direction (x_i, -X_i) that the rho = 0 gauge choice
removes).  Equivalently, df/dt = {f, H} with the sector brackets
{p_i, q_j} = +delta_ij and {X_i, x_j} = -delta_ij / beta; the relative
sector sign is fixed empirically by the quadratic r-matrix bracket check
and deliberately differs from a uniform +delta_ij convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import primitive_root, sigma_pow
from .errors import AdmissibilityError, StructuralError
from .gaudin import (FlowId, GaudinCoefficients, OrbitData, PoleConfig,
                     assemble_lax, hamiltonian, hamiltonian_coefficient_gradients)
from .jets import JetMatrix
from .ratmat import RationalMatrix

_IMAG_TOL = 1e-9

# sector sign of the canonical bracket {X_i, x_j} relative to {p_i, q_j};
# fixed empirically by requiring the quadratic r-matrix bracket to close
SECTOR_SIGN_PQ = 1.0
SECTOR_SIGN_XX = -1.0


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass
class TodaState:
    """Periodic Toda chain: real canonical pairs (q_i, p_i), i mod T."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise StructuralError("q and p must be equal-length vectors")

    @property
    def T(self) -> int:
        return self.q.size


@dataclass
class DSTState:
    """DST model: complex canonical pairs (x_i, X_i), parameters c_i and
    the pole location zeta_1."""

    x: np.ndarray
    X: np.ndarray
    c: np.ndarray
    zeta1: complex

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=complex)
        self.X = np.asarray(self.X, dtype=complex)
        self.c = np.asarray(self.c, dtype=complex)
        self.zeta1 = complex(self.zeta1)
        if not (self.x.shape == self.X.shape == self.c.shape) or self.x.ndim != 1:
            raise StructuralError("x, X, c must be equal-length vectors")
        if abs(self.zeta1) <= 1e-12:
            raise StructuralError("zeta1 must be nonzero")

    @property
    def T(self) -> int:
        return self.x.size


@dataclass
class CoupledState:
    """Coupled Toda-DST system; (q, p) may drift complex under the coupled
    holomorphic flows, so all four coordinate vectors are complex here."""

    q: np.ndarray
    p: np.ndarray
    x: np.ndarray
    X: np.ndarray
    c: np.ndarray
    zeta1: complex
    beta: float

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=complex)
        self.p = np.asarray(self.p, dtype=complex)
        self.x = np.asarray(self.x, dtype=complex)
        self.X = np.asarray(self.X, dtype=complex)
        self.c = np.asarray(self.c, dtype=complex)
        self.zeta1 = complex(self.zeta1)
        self.beta = float(self.beta)
        if len({self.q.size, self.p.size, self.x.size, self.X.size, self.c.size}) != 1:
            raise StructuralError("all coordinate vectors must share length T")

    @property
    def T(self) -> int:
        return self.q.size


# ---------------------------------------------------------------------------
# elementary matrices
# ---------------------------------------------------------------------------

_SHIFT_CACHE: dict = {}


def _shift_basis(T: int, offset: int) -> np.ndarray:
    """sum_i E_{i, i+offset} with indices mod T (cached, copy-on-return)."""
    M = _SHIFT_CACHE.get((T, offset))
    if M is None:
        M = np.zeros((T, T), complex)
        for i in range(T):
            M[i, (i + offset) % T] = 1.0
        _SHIFT_CACHE[(T, offset)] = M
    return M.copy()


def _toda_a(q: np.ndarray) -> np.ndarray:
    """a_i = exp(q_i - q_{i+1}), cyclically."""
    return np.exp(q - np.roll(q, -1))


def _J_coeffs(q, p, T):
    J00 = np.diag(np.asarray(p, complex))
    a = _toda_a(np.asarray(q, complex))
    J01 = np.zeros((T, T), complex)
    for i in range(T):
        J01[(i + 1) % T, i] = a[i]
    Jinf = _shift_basis(T, 1)
    return J00, J01, Jinf


_CONFIG_CACHE: dict = {}


def config_of(state) -> PoleConfig:
    key = (state.T, ()) if isinstance(state, TodaState) \
        else (state.T, (complex(state.zeta1),))
    cfg = _CONFIG_CACHE.get(key)
    if cfg is None:
        cfg = PoleConfig(key[0], key[1])
        _CONFIG_CACHE[key] = cfg
    return cfg


def coefficients(state) -> GaudinCoefficients:
    """Plain (value) Lax coefficients of the model state."""
    T = state.T
    if isinstance(state, TodaState):
        J00, J01, Jinf = _J_coeffs(state.q, state.p, T)
        return GaudinCoefficients(J00, J01, [], Jinf, T, validate=False)
    if isinstance(state, DSTState):
        K00 = np.diag(state.c)
        K1 = np.outer(state.x, state.X)
        return GaudinCoefficients(K00, np.zeros((T, T), complex), [K1],
                                  _shift_basis(T, 1), T, validate=False)
    if isinstance(state, CoupledState):
        J00, J01, Jinf = _J_coeffs(state.q, state.p, T)
        b = state.beta
        A00 = J00 + b * np.diag(state.c)
        A1 = b * np.outer(state.x, state.X)
        Ainf = (1.0 + b) * _shift_basis(T, 1)
        return GaudinCoefficients(A00, J01, [A1], Ainf, T, validate=False)
    raise AdmissibilityError(f"unknown model state {type(state).__name__}")


def lax(state) -> RationalMatrix:
    return assemble_lax(coefficients(state), config_of(state))


def toda_lax(s: TodaState) -> RationalMatrix:
    return lax(s)


def dst_lax(s: DSTState) -> RationalMatrix:
    return lax(s)


def coupled_lax(s: CoupledState) -> RationalMatrix:
    return lax(s)


# ---------------------------------------------------------------------------
# orbit realisations
# ---------------------------------------------------------------------------

def toda_from_orbit(u: np.ndarray, v: np.ndarray) -> TodaState:
    """q_i = -ln u_i, p_i = v_i/u_i - v_{i-1}/u_{i-1} (so sum p_i = 0)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if np.any(np.abs(u) <= 1e-300):
        raise StructuralError("orbit data u_i must be nonzero")
    q = -np.log(u)
    w = v / u
    p = w - np.roll(w, 1)
    if max(np.max(np.abs(q.imag)), np.max(np.abs(p.imag))) > _IMAG_TOL:
        raise StructuralError("orbit data produces a non-real Toda state")
    return TodaState(q.real, p.real)


def toda_orbit_data(u: np.ndarray, v: np.ndarray) -> OrbitData:
    T = len(u)
    phi01 = np.zeros((T, T), complex)
    for i in range(T):
        phi01[i, (i + 1) % T] = v[i]
    return OrbitData(Lam0_0=np.zeros((T, T), complex),
                     Lam0_1=_shift_basis(T, -1),
                     Lam_list=[], Laminf=_shift_basis(T, 1),
                     phi0_0=np.diag(np.asarray(u, complex)),
                     phi0_1=phi01, phi_list=[], T=T)


def dst_from_orbit(sMat: np.ndarray, c: np.ndarray, zeta1: complex) -> DSTState:
    """x_i = s_{i1}, X_i = (s^-1)_{1i}; Tr K_1 = sum x_i X_i = 1."""
    sMat = np.asarray(sMat, dtype=complex)
    if abs(np.linalg.det(sMat)) < 1e-300:
        raise StructuralError("singular orbit matrix")
    sInv = np.linalg.inv(sMat)
    return DSTState(x=sMat[:, 0].copy(), X=sInv[0, :].copy(), c=c, zeta1=zeta1)


def dst_orbit_data(sMat: np.ndarray, c: np.ndarray, zeta1: complex) -> OrbitData:
    T = len(c)
    E11 = np.zeros((T, T), complex)
    E11[0, 0] = 1.0
    return OrbitData(Lam0_0=np.diag(np.asarray(c, complex)),
                     Lam0_1=np.zeros((T, T), complex),
                     Lam_list=[E11], Laminf=_shift_basis(T, 1),
                     phi0_0=np.eye(T, dtype=complex),
                     phi0_1=np.zeros((T, T), complex),
                     phi_list=[np.asarray(sMat, complex)], T=T)


# ---------------------------------------------------------------------------
# gauge transformation checks
# ---------------------------------------------------------------------------

def toda_gauge_residual(s: TodaState, lam: complex) -> float:
    """Residual of L(lam) = lam^-1 Q Ltilde(lam^T) Q^-1 with the
    symmetric tridiagonal-periodic Lax form and Q = diag(e^{-q_i/2} lam^-i)."""
    if abs(lam) <= 1e-12:
        raise StructuralError("gauge map undefined at lam = 0")
    T = s.T
    a = _toda_a(s.q)
    mu = lam ** T
    Lt = np.diag(np.asarray(s.p, complex))
    ra = np.sqrt(a.astype(complex))
    for i in range(T - 1):
        Lt[i, i + 1] += ra[i]
        Lt[i + 1, i] += ra[i]
    Lt[0, T - 1] += ra[T - 1] / mu
    Lt[T - 1, 0] += ra[T - 1] * mu
    Q = np.diag(np.exp(-s.q / 2.0) * lam ** (-np.arange(1, T + 1, dtype=float)))
    rhs = (Q @ Lt @ np.linalg.inv(Q)) / lam
    return float(np.max(np.abs(lax(s).eval(lam) - rhs)))


def dst_gauge_residual(s: DSTState, lam: complex) -> float:
    """Residual of L(lam) = lam^-1 D Lhat(lam^T) D^-1 with
    D = diag(lam^-1, ..., lam^-T) and the single-pole DST Lax form Lhat."""
    if abs(lam) <= 1e-12:
        raise StructuralError("gauge map undefined at lam = 0")
    T = s.T
    b = s.zeta1
    mu = lam ** T
    if abs(mu - b ** T) <= 1e-10:
        raise StructuralError("lam^T collides with zeta1^T")
    xXt = np.outer(s.x, s.X)
    idx = np.arange(T)
    Lh = np.zeros((T, T), complex)
    Lh += (b ** (T + idx[:, None] - idx[None, :])) * xXt / (mu - b ** T)
    Lh[T - 1, 0] += mu
    lower = idx[:, None] >= idx[None, :]
    Lh += np.where(lower, b ** (idx[:, None] - idx[None, :]) * xXt, 0.0)
    Lh += np.diag(s.c)
    for i in range(T - 1):
        Lh[i, i + 1] += 1.0
    D = np.diag(lam ** (-np.arange(1, T + 1, dtype=float)))
    rhs = (D @ Lh @ np.linalg.inv(D)) / lam
    return float(np.max(np.abs(lax(s).eval(lam) - rhs)))


# ---------------------------------------------------------------------------
# packed coordinates, jets and gradients
# ---------------------------------------------------------------------------

def pack(state) -> np.ndarray:
    if isinstance(state, TodaState):
        return np.concatenate([state.q, state.p])
    if isinstance(state, DSTState):
        return np.concatenate([state.x, state.X])
    return np.concatenate([state.q, state.p, state.x, state.X])


def unpack(template, vec: np.ndarray):
    T = template.T
    if isinstance(template, TodaState):
        v = np.asarray(vec)
        if np.iscomplexobj(v):
            if np.max(np.abs(v.imag)) > _IMAG_TOL:
                raise StructuralError("Toda state drifted off the real locus")
            v = v.real
        return TodaState(v[:T].copy(), v[T:].copy())
    if isinstance(template, DSTState):
        return DSTState(vec[:T].copy(), vec[T:].copy(), template.c, template.zeta1)
    return CoupledState(vec[:T].copy(), vec[T:2 * T].copy(), vec[2 * T:3 * T].copy(),
                        vec[3 * T:].copy(), template.c, template.zeta1, template.beta)


def nvars(state) -> int:
    return 4 * state.T if isinstance(state, CoupledState) else 2 * state.T


def coefficient_jets(state) -> GaudinCoefficients:
    """Lax coefficients as dual-number matrices over the packed coordinates
    (the gradient stacks are the exact coefficient/coordinate Jacobians)."""
    T = state.T
    n = nvars(state)

    def const(M):
        return JetMatrix.const(M, n)

    if isinstance(state, TodaState):
        q_off, p_off = 0, T
        beta = None
    elif isinstance(state, DSTState):
        x_off, X_off = 0, T
    else:
        q_off, p_off, x_off, X_off = 0, T, 2 * T, 3 * T

    if isinstance(state, (TodaState, CoupledState)):
        J00, J01, Jinf = _J_coeffs(state.q, state.p, T)
        a = _toda_a(np.asarray(state.q, complex))
        gJ00 = np.zeros((n, T, T), complex)
        gJ01 = np.zeros((n, T, T), complex)
        for i in range(T):
            gJ00[p_off + i, i, i] = 1.0
            # da_j/dq_i = a_j (delta_{ij} - delta_{i, j+1})
            gJ01[q_off + i, (i + 1) % T, i] += a[i]
            gJ01[q_off + i, i, (i - 1) % T] += -a[(i - 1) % T]
        A00_jet = JetMatrix(J00, gJ00)
        A01_jet = JetMatrix(J01, gJ01)
    if isinstance(state, (DSTState, CoupledState)):
        K1 = np.outer(state.x, state.X)
        gK1 = np.zeros((n, T, T), complex)
        for i in range(T):
            gK1[x_off + i, i, :] = state.X
            gK1[X_off + i, :, i] = state.x
        K1_jet = JetMatrix(K1, gK1)

    if isinstance(state, TodaState):
        return GaudinCoefficients(A00_jet, A01_jet, [], const(Jinf), T)
    if isinstance(state, DSTState):
        return GaudinCoefficients(const(np.diag(state.c)),
                                  const(np.zeros((T, T))), [K1_jet],
                                  const(_shift_basis(T, 1)), T)
    b = state.beta
    A00 = A00_jet + const(b * np.diag(state.c))
    return GaudinCoefficients(A00, A01_jet, [b * K1_jet],
                              const((1.0 + b) * _shift_basis(T, 1)), T)


@dataclass
class JetContext:
    """Jet-valued Lax matrix over the packed coordinates plus the sector
    data of the canonical bracket: (P indices, Q indices, coefficient)."""

    state: object
    config: PoleConfig
    lax: RationalMatrix
    sectors: list
    coeffs: GaudinCoefficients


def jet_context(state) -> JetContext:
    T = state.T
    cfg = config_of(state)
    C = coefficient_jets(state)
    L = assemble_lax(C, cfg)
    idx = np.arange(T)
    if isinstance(state, TodaState):
        sectors = [(T + idx, idx, SECTOR_SIGN_PQ)]
    elif isinstance(state, DSTState):
        sectors = [(T + idx, idx, SECTOR_SIGN_XX)]
    else:
        if state.beta == 0.0:
            raise AdmissibilityError(
                "the (x, X) bracket sector degenerates at beta = 0")
        sectors = [(T + idx, idx, SECTOR_SIGN_PQ),
                   (3 * T + idx, 2 * T + idx, SECTOR_SIGN_XX / state.beta)]
    return JetContext(state, cfg, L, sectors, C)


def admissible_flows(state, depth: int = 3) -> list:
    rmax = 0 if isinstance(state, TodaState) else 1
    return [FlowId(p, r) for p in range(1, depth + 1) for r in range(rmax + 1)]


def _check_flow(state, f: FlowId) -> None:
    rmax = 0 if isinstance(state, TodaState) else 1
    if f.r > rmax:
        raise AdmissibilityError(f"flow {f} not admissible for "
                                 f"{type(state).__name__}")


def hamiltonian_value(state, f: FlowId, max_depth: int = 3):
    _check_flow(state, f)
    return hamiltonian(f, lax(state), config_of(state), max_depth)


def _sector_gradients(state, f: FlowId, max_depth: int = 3):
    """(gq, gp, gx_red, gX_red): dH/dq, dH/dp, and the beta-reduced DST
    sector gradients (1/beta) dH/dx, (1/beta) dH/dX via the adjoint
    residue route."""
    T = state.T
    L = lax(state)
    cfg = config_of(state)
    M00, M01, Ms, _ = hamiltonian_coefficient_gradients(f, L, cfg, max_depth)
    gq = gp = gx = gX = None
    if isinstance(state, (TodaState, CoupledState)):
        a = _toda_a(np.asarray(state.q, complex))
        gp = np.diagonal(M00).copy()
        gq = np.empty(T, complex)
        for i in range(T):
            gq[i] = a[i] * M01[i, (i + 1) % T] - a[(i - 1) % T] * M01[(i - 1) % T, i]
    if isinstance(state, (DSTState, CoupledState)):
        M1 = Ms[0]
        # beta-reduced: gradient w.r.t. the family coefficient (beta K_1)
        gx = M1.T @ state.X   # (1/beta) dH/dx_i = sum_j M1[j,i] X_j
        gX = M1 @ state.x     # (1/beta) dH/dX_i = sum_j x_j M1[i,j]
    return gq, gp, gx, gX


def hamiltonian_gradient(state, f: FlowId, max_depth: int = 3) -> np.ndarray:
    """Full packed gradient dH/d(coords) (including beta factors)."""
    _check_flow(state, f)
    gq, gp, gx, gX = _sector_gradients(state, f, max_depth)
    if isinstance(state, TodaState):
        return np.concatenate([gq, gp])
    if isinstance(state, DSTState):
        return np.concatenate([gx, gX])
    b = state.beta
    return np.concatenate([gq, gp, b * gx, b * gX])


def flow_field(state, f: FlowId, max_depth: int = 3) -> np.ndarray:
    """Packed tangent vector of the flow t_p^r at the state (normative
    convention; exact adjoint gradients)."""
    _check_flow(state, f)
    gq, gp, gx, gX = _sector_gradients(state, f, max_depth)
    if isinstance(state, TodaState):
        v = np.concatenate([-gp, gq])
        if np.max(np.abs(v.imag)) > _IMAG_TOL:
            raise StructuralError("Toda flow field drifted off the real locus")
        return v.real
    if isinstance(state, DSTState):
        return np.concatenate([gX, -gx])
    # coupled: the beta factors of dH/d(x, X) cancel against 1/beta exactly
    return np.concatenate([-gp, gq, gX, -gx])


def printed_flow_field(state, f: FlowId) -> np.ndarray:
    """Literal transcription of the printed first-flow equations."""
    if f.p != 1:
        raise AdmissibilityError("printed equations cover p = 1 only")
    _check_flow(state, f)
    T = state.T
    if isinstance(state, TodaState):
        a = _toda_a(state.q)
        return np.concatenate([-state.p, a - np.roll(a, 1)])
    root = primitive_root(T)
    if isinstance(state, DSTState):
        x, X, c, z1 = state.x, state.X, state.c, state.zeta1
        if f.r == 0:
            return np.zeros(2 * T, complex)
        dx = np.empty(T, complex)
        dX = np.empty(T, complex)
        for i in range(T):
            sx = sum(root.power(k * (j - i)) * X[j] * x[j]
                     for k in range(1, T) for j in range(T))
            sX = sum(root.power(k * (j - i)) * x[j] * X[j]
                     for k in range(1, T) for j in range(T))
            dx[i] = c[i] * x[i] + z1 * x[(i + 1) % T] + sx * x[i] / T
            dX[i] = -c[i] * X[i] - z1 * X[(i - 1) % T] - sX * X[i] / T
        return np.concatenate([dx, dX])
    # coupled system
    q, p, x, X = state.q, state.p, state.x, state.X
    c, z1, b = state.c, state.zeta1, state.beta
    a = _toda_a(q)
    a_m = np.roll(a, 1)        # a_{i-1}
    x_m = np.roll(x, 1)        # x_{i-1}
    X_p = np.roll(X, -1)       # X_{i+1}
    if f.r == 0:
        dq = -p - b * c
        dp = (1.0 + b) * (a - a_m) + (b / z1) * (a_m * x_m * X - a * x * X_p)
        dx = -(1.0 / z1) * a_m * x_m
        dX = (1.0 / z1) * a * X_p
        return np.concatenate([dq, dp, dx, dX])
    dq = -b * x * X
    dp = (b / z1) * (a * x * X_p - a_m * x_m * X)
    dx = np.empty(T, complex)
    dX = np.empty(T, complex)
    for i in range(T):
        s = sum(root.power(k * (j - i)) * X[j] * x[j]
                for k in range(T) for j in range(T))
        dx[i] = (p[i] * x[i] + b * c[i] * x[i] + a_m[i] * x_m[i] / z1
                 + b * s * x[i] / T + (1.0 + b) * z1 * x[(i + 1) % T])
        dX[i] = (-p[i] * X[i] - b * c[i] * X[i] - a[i] * X_p[i] / z1
                 - b * s * X[i] / T - (1.0 + b) * z1 * X[(i - 1) % T])
    return np.concatenate([dq, dp, dx, dX])


# ---------------------------------------------------------------------------
# Lagrangian coefficients and invariants
# ---------------------------------------------------------------------------

def kinetic(state, velocity: np.ndarray):
    """Kinetic part of the Lagrangian coefficient for a given coordinate
    velocity (total-derivative terms at 0 and infinity dropped)."""
    T = state.T
    if isinstance(state, TodaState):
        return complex(-np.dot(state.p, velocity[:T]))
    if isinstance(state, DSTState):
        return complex(np.dot(state.X, velocity[:T]))
    return complex(-np.dot(state.p, velocity[:T])
                   + state.beta * np.dot(state.X, velocity[2 * T:3 * T]))


def lagrangian_coeff(state, f: FlowId, max_depth: int = 3):
    """On-shell Lagrangian coefficient: kinetic(flow velocity) - H_{p,r}."""
    vel = flow_field(state, f, max_depth)
    return kinetic(state, vel) - hamiltonian_value(state, f, max_depth)


def invariants(state) -> dict:
    """Kinematic invariants: sum p_i and prod a_i (Toda sectors),
    Tr K_1 = sum x_i X_i (DST sectors)."""
    out = {}
    if isinstance(state, (TodaState, CoupledState)):
        out["sum_p"] = complex(np.sum(state.p))
        out["prod_a"] = complex(np.prod(_toda_a(np.asarray(state.q, complex))))
    if isinstance(state, (DSTState, CoupledState)):
        out["tr_K1"] = complex(np.dot(state.x, state.X))
    return out


def coefficient_velocity(state, f: FlowId, max_depth: int = 3):
    """Time derivatives of the Lax coefficients induced by the coordinate
    flow field, via the coefficient/coordinate Jacobians (jet stacks)."""
    v = np.asarray(flow_field(state, f, max_depth), complex)
    C = coefficient_jets(state)

    def push(M):
        return np.einsum("nij,n->ij", M.grad, v)

    return (push(C.A0_0), push(C.A0_1), [push(A) for A in C.A_list],
            push(C.Ainf))


# ---------------------------------------------------------------------------
# seeded random states
# ---------------------------------------------------------------------------

def random_toda(T: int, rng: np.random.Generator, scale: float = 0.7) -> TodaState:
    return TodaState(rng.uniform(-scale, scale, T), rng.uniform(-scale, scale, T))


def _random_unit(rng, T):
    return rng.normal(size=(T, T)) + 1j * rng.normal(size=(T, T))


def random_dst(T: int, rng: np.random.Generator, zeta1: complex = None,
               real: bool = False) -> DSTState:
    while True:
        sMat = (rng.normal(size=(T, T)) if real else _random_unit(rng, T))
        if abs(np.linalg.det(sMat)) > 0.1:
            break
    c = rng.uniform(-0.8, 0.8, T) + (0 if real else 1j * rng.uniform(-0.4, 0.4, T))
    if zeta1 is None:
        zeta1 = complex(rng.uniform(0.8, 1.4)
                        * np.exp(2j * np.pi * rng.uniform())) if not real \
            else rng.uniform(0.8, 1.4)
    return dst_from_orbit(sMat, c, zeta1)


def random_coupled(T: int, rng: np.random.Generator, beta: float = 0.7,
                   zeta1: complex = None, real: bool = False) -> CoupledState:
    toda = random_toda(T, rng)
    dst = random_dst(T, rng, zeta1=zeta1, real=real)
    return CoupledState(toda.q.astype(complex), toda.p.astype(complex),
                        dst.x, dst.X, dst.c, dst.zeta1, beta)
