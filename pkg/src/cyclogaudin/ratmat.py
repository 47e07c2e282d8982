"""Matrix-valued rational functions of the spectral parameter in
partial-fraction form, their local Laurent expansions, residues, the
regular/singular splitting, and the residue pairing.

Conventions:
  * A RationalMatrix is poly(lambda) + sum over poles z of
    sum_k coeffs[k-1] / (lambda - z)^k.
  * The point at infinity is the float INF; series there are in
    u = 1/lambda.  The residue of R dlambda at infinity is minus the
    coefficient of u^(+1) of the expansion of R in u.
  * Series coefficients beyond trunc_order are unknown, not zero; asking
    for them raises TruncationError.  All residues are read from series
    data; no numerical contour integration anywhere.
"""
from __future__ import annotations

from math import comb, inf, isinf

import numpy as np

from .algebra import RootOfUnity, sigma_pow
from .errors import (DimensionError, PoleProximityError, StructuralError,
                     TruncationError)
from .jets import Jet, JetMatrix

INF = inf  # distinguished symbol for the point at infinity

_POLE_TOL = 1e-12
_MAX_POLE_ORDER = 8


def _is_inf(point) -> bool:
    return isinstance(point, float) and isinf(point)


def _same_point(a, b) -> bool:
    ia, ib = _is_inf(a), _is_inf(b)
    if ia or ib:
        return ia and ib
    return abs(a - b) <= _POLE_TOL


def _zero_like(c):
    if isinstance(c, JetMatrix):
        return JetMatrix.zeros(c.dim, c.nvars)
    if isinstance(c, Jet):
        return Jet.const(0.0, c.grad.shape[0])
    if isinstance(c, np.ndarray):
        return np.zeros_like(c)
    return 0j


def _is_matrix(c) -> bool:
    return isinstance(c, JetMatrix) or (isinstance(c, np.ndarray) and c.ndim == 2)


def _coef_mul(a, b):
    if _is_matrix(a) and _is_matrix(b):
        return a @ b
    return a * b


def _stack_kind(coeffs):
    """'mat' for a pure plain-matrix list, 'sca' for pure plain scalars,
    None when dual numbers (or a mix) force the generic path."""
    if all(isinstance(c, np.ndarray) and c.ndim == 2 for c in coeffs):
        return "mat"
    if all(not isinstance(c, (np.ndarray, JetMatrix, Jet)) for c in coeffs):
        return "sca"
    return None


def _trace(c):
    if isinstance(c, JetMatrix):
        return c.trace()
    if isinstance(c, np.ndarray):
        return complex(np.trace(c))
    return c


def _max_abs(c) -> float:
    if isinstance(c, JetMatrix):
        g = float(np.max(np.abs(c.grad))) if c.grad.size else 0.0
        return max(float(np.max(np.abs(c.val))), g)
    if isinstance(c, Jet):
        g = float(np.max(np.abs(c.grad))) if c.grad.size else 0.0
        return max(abs(c.val), g)
    if isinstance(c, np.ndarray):
        return float(np.max(np.abs(c)))
    return abs(c)


class LaurentSeries:
    """Truncated Laurent series sum_{n=low}^{trunc} coeffs[n-low] * u^n.

    u is (lambda - base) at a finite base point, or 1/lambda at INF.
    Coefficients are square matrices, JetMatrix, or scalars (for traces).
    """

    __slots__ = ("dim", "base", "low", "coeffs")

    def __init__(self, dim, base, low, coeffs):
        if not coeffs:
            raise ValueError("a Laurent series needs at least one coefficient")
        self.dim = dim
        self.base = base
        self.low = int(low)
        self.coeffs = list(coeffs)

    @property
    def trunc(self) -> int:
        return self.low + len(self.coeffs) - 1

    def coeff(self, n: int):
        if n > self.trunc:
            raise TruncationError(
                f"coefficient u^{n} requested but series truncated at u^{self.trunc}")
        if n < self.low:
            return _zero_like(self.coeffs[0])
        return self.coeffs[n - self.low]

    def _check_compat(self, other: "LaurentSeries") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"series dims {self.dim} vs {other.dim}")
        if not _same_point(self.base, other.base):
            raise ValueError("series base points differ")

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_compat(other)
        low = min(self.low, other.low)
        trunc = min(self.trunc, other.trunc)
        if trunc < low:
            raise TruncationError("sum of series has empty known range")
        coeffs = []
        for n in range(low, trunc + 1):
            a = self.coeffs[n - self.low] if self.low <= n <= self.trunc else None
            b = other.coeffs[n - other.low] if other.low <= n <= other.trunc else None
            if a is None:
                coeffs.append(b)
            elif b is None:
                coeffs.append(a)
            else:
                coeffs.append(a + b)
        return LaurentSeries(self.dim, self.base, low, coeffs)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.dim, self.base, self.low, [-c for c in self.coeffs])

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, a) -> "LaurentSeries":
        return LaurentSeries(self.dim, self.base, self.low, [a * c for c in self.coeffs])

    def mul(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_compat(other)
        low = self.low + other.low
        trunc = min(self.low + other.trunc, other.low + self.trunc)
        if trunc < low:
            raise TruncationError("product of series has empty known range")
        n_out = trunc - low + 1
        ka, kb = _stack_kind(self.coeffs), _stack_kind(other.coeffs)
        if ka is not None and kb is not None:
            # vectorised Cauchy product over stacked plain coefficients
            if ka == "sca" and kb == "sca":
                full = np.convolve(np.asarray(self.coeffs, complex),
                                   np.asarray(other.coeffs, complex))
                return LaurentSeries(self.dim, self.base, low,
                                     list(full[:n_out]))
            A = (np.stack(self.coeffs) if ka == "mat"
                 else np.asarray(self.coeffs, complex))
            B = (np.stack(other.coeffs) if kb == "mat"
                 else np.asarray(other.coeffs, complex))
            C = np.zeros((n_out, self.dim, self.dim), complex)
            for i in range(min(len(A), n_out)):
                m = min(len(B), n_out - i)
                if ka == "mat" and kb == "mat":
                    C[i:i + m] += A[i] @ B[:m]
                elif ka == "mat":
                    C[i:i + m] += A[i][None, :, :] * B[:m, None, None]
                else:
                    C[i:i + m] += A[i] * B[:m]
            return LaurentSeries(self.dim, self.base, low, list(C))
        coeffs = [None] * (trunc - low + 1)
        for i, a in enumerate(self.coeffs):
            ei = self.low + i
            if ei + other.low > trunc:
                break
            for j, b in enumerate(other.coeffs):
                n = ei + other.low + j
                if n > trunc:
                    break
                term = _coef_mul(a, b)
                coeffs[n - low] = term if coeffs[n - low] is None else coeffs[n - low] + term
        z = _zero_like(_coef_mul(self.coeffs[0], other.coeffs[0]))
        coeffs = [z if c is None else c for c in coeffs]
        return LaurentSeries(self.dim, self.base, low, coeffs)

    def power(self, m: int) -> "LaurentSeries":
        if m < 1:
            raise ValueError("power must be >= 1")
        out = self
        for _ in range(m - 1):
            out = out.mul(self)
        return out

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by u^k (exact exponent shift)."""
        return LaurentSeries(self.dim, self.base, self.low + k, self.coeffs)

    def truncated(self, trunc: int) -> "LaurentSeries":
        if trunc < self.low:
            raise TruncationError("cannot truncate below the lowest order")
        keep = min(len(self.coeffs), trunc - self.low + 1)
        return LaurentSeries(self.dim, self.base, self.low, self.coeffs[:keep])

    def trace_series(self) -> "LaurentSeries":
        return LaurentSeries(self.dim, self.base, self.low,
                             [_trace(c) for c in self.coeffs])

    def principal(self) -> list:
        """Coefficients [c_1, c_2, ...] of u^-1, u^-2, ... (may be empty)."""
        out = []
        k = 1
        while -k >= self.low:
            out.append(self.coeff(-k))
            k += 1
        while out and _max_abs(out[-1]) == 0.0:
            out.pop()
        return out

    def eval_sum(self, u: complex):
        """Resum the truncated series at local coordinate u (u != 0)."""
        acc = _zero_like(self.coeffs[0])
        for n in range(self.low, self.trunc + 1):
            acc = acc + self.coeff(n) * (u ** n)
        return acc

    def sigma(self, k: int, root: RootOfUnity) -> "LaurentSeries":
        """Apply sigma^k coefficientwise."""
        return LaurentSeries(self.dim, self.base, self.low,
                             [sigma_pow(c, k, root) for c in self.coeffs])

    def __repr__(self):
        return f"LaurentSeries(base={self.base}, low={self.low}, trunc={self.trunc})"


class RationalMatrix:
    """poly(lambda) + partial fractions.  Immutable by convention."""

    __slots__ = ("dim", "poly", "poles")

    def __init__(self, dim, poly=None, poles=None, validate=True):
        self.dim = int(dim)
        self.poly = list(poly) if poly else []
        # poles: list of (point, [c1, c2, ...]) with c_k the coefficient
        # of (lambda - point)^(-k)
        self.poles = [(complex(z), list(cs)) for z, cs in (poles or [])]
        if validate:
            self._validate()

    def _validate(self) -> None:
        pts = [z for z, _ in self.poles]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i] - pts[j]) <= _POLE_TOL:
                    raise PoleProximityError(
                        f"pole points {pts[i]} and {pts[j]} closer than {_POLE_TOL}")
        for z, cs in self.poles:
            if not cs:
                raise StructuralError(f"pole at {z} with empty principal part")
            if len(cs) > _MAX_POLE_ORDER:
                raise StructuralError(f"pole order {len(cs)} exceeds {_MAX_POLE_ORDER}")

    @classmethod
    def zero(cls, dim: int) -> "RationalMatrix":
        return cls(dim)

    @classmethod
    def constant(cls, mat) -> "RationalMatrix":
        mat = np.asarray(mat, dtype=complex) if not isinstance(mat, JetMatrix) else mat
        d = mat.dim if isinstance(mat, JetMatrix) else mat.shape[0]
        return cls(d, poly=[mat])

    def pole_order(self, point) -> int:
        for z, cs in self.poles:
            if _same_point(z, point):
                return len(cs)
        return 0

    def pole_points(self) -> list:
        return [z for z, _ in self.poles]

    def _template(self):
        if self.poly:
            return self.poly[0]
        if self.poles:
            return self.poles[0][1][0]
        return np.zeros((self.dim, self.dim), complex)

    def eval(self, lam: complex):
        for z, _ in self.poles:
            if abs(lam - z) <= 1e-12:
                raise PoleProximityError(f"evaluation at {lam} too close to pole {z}")
        acc = _zero_like(self._template())
        if self.poly:
            acc = self.poly[-1]
            for c in reversed(self.poly[:-1]):
                acc = acc * lam + c
        for z, cs in self.poles:
            w = 1.0 / (lam - z)
            f = w
            for c in cs:
                acc = acc + c * f
                f *= w
        return acc

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.dim, [-c for c in self.poly],
                              [(z, [-c for c in cs]) for z, cs in self.poles],
                              validate=False)

    def scale(self, a) -> "RationalMatrix":
        return RationalMatrix(self.dim, [a * c for c in self.poly],
                              [(z, [a * c for c in cs]) for z, cs in self.poles],
                              validate=False)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.dim != other.dim:
            raise DimensionError(f"dims {self.dim} vs {other.dim}")
        npoly = list(self.poly)
        for i, c in enumerate(other.poly):
            if i < len(npoly):
                npoly[i] = npoly[i] + c
            else:
                npoly.append(c)
        npoles = [(z, list(cs)) for z, cs in self.poles]
        for z, cs in other.poles:
            for zz, ccs in npoles:
                if _same_point(z, zz):
                    for k, c in enumerate(cs):
                        if k < len(ccs):
                            ccs[k] = ccs[k] + c
                        else:
                            ccs.append(c)
                    break
            else:
                npoles.append((z, list(cs)))
        return RationalMatrix(self.dim, npoly, npoles, validate=False).trim()

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def trim(self, tol: float = 0.0) -> "RationalMatrix":
        """Drop (near-)zero leading poly and highest-order pole coefficients."""
        poly = list(self.poly)
        while poly and _max_abs(poly[-1]) <= tol:
            poly.pop()
        poles = []
        for z, cs in self.poles:
            cs = list(cs)
            while cs and _max_abs(cs[-1]) <= tol:
                cs.pop()
            if cs:
                poles.append((z, cs))
        return RationalMatrix(self.dim, poly, poles, validate=False)

    def residue(self, point) -> "np.ndarray":
        """Coefficient of (lambda - point)^(-1), zero matrix if not a pole."""
        for z, cs in self.poles:
            if _same_point(z, point):
                return cs[0]
        return _zero_like(self._template())

    def _order_at_inf(self):
        """Exact order in u = 1/lambda at infinity, or None for the zero function."""
        if self.poly:
            return -(len(self.poly) - 1)
        if self.poles:
            return 1
        return None

    def laurent_expand(self, point, trunc: int) -> LaurentSeries:
        """Expand at a finite point or at INF (in u = 1/lambda) up to u^trunc."""
        tpl = self._template()
        terms = {}

        def bump(n, c):
            terms[n] = terms[n] + c if n in terms else c

        if _is_inf(point):
            for m, c in enumerate(self.poly):
                if -m <= trunc:
                    bump(-m, c)
            for z, cs in self.poles:
                for k1, c in enumerate(cs):
                    k = k1 + 1
                    for j in range(0, trunc - k + 1):
                        bump(k + j, (comb(k - 1 + j, j) * z ** j) * c)
            low = min(terms) if terms else min(0, trunc)
        else:
            zeta = complex(point)
            low = 0
            for z, cs in self.poles:
                if _same_point(z, zeta):
                    low = -len(cs)
                    for k1, c in enumerate(cs):
                        bump(-(k1 + 1), c)
                else:
                    a = zeta - z
                    for k1, c in enumerate(cs):
                        k = k1 + 1
                        for j in range(0, trunc + 1):
                            bump(j, (comb(k - 1 + j, j) * (-1) ** j / a ** (k + j)) * c)
            for m, c in enumerate(self.poly):
                for j in range(0, min(m, trunc) + 1):
                    bump(j, (comb(m, j) * zeta ** (m - j)) * c)
        if trunc < low:
            raise TruncationError("requested truncation below the lowest order")
        coeffs = [terms.get(n, None) for n in range(low, trunc + 1)]
        coeffs = [_zero_like(tpl) if c is None else c for c in coeffs]
        if not coeffs:
            coeffs = [_zero_like(tpl)]
            low = trunc
        return LaurentSeries(self.dim, INF if _is_inf(point) else complex(point),
                             low, coeffs)

    def mul(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.dim != other.dim:
            raise DimensionError(f"dims {self.dim} vs {other.dim}")
        out_poles = []
        pts = list(self.pole_points())
        for z in other.pole_points():
            if not any(_same_point(z, zz) for zz in pts):
                pts.append(z)
        for z in pts:
            o1, o2 = self.pole_order(z), other.pole_order(z)
            m = o1 + o2
            s1 = self.laurent_expand(z, o2 - 1 if o2 > 0 else 0)
            s2 = other.laurent_expand(z, o1 - 1 if o1 > 0 else 0)
            prod = s1.mul(s2)
            cs = []
            for k in range(1, m + 1):
                cs.append(prod.coeff(-k))
            while cs and _max_abs(cs[-1]) == 0.0:
                cs.pop()
            if cs:
                out_poles.append((z, cs))
        # polynomial part via expansion at infinity
        ov1, ov2 = self._order_at_inf(), other._order_at_inf()
        out_poly = []
        if ov1 is not None and ov2 is not None and ov1 + ov2 <= 0:
            s1 = self.laurent_expand(INF, -ov2)
            s2 = other.laurent_expand(INF, -ov1)
            prod = s1.mul(s2)
            degree = -(ov1 + ov2)
            out_poly = [prod.coeff(-mm) for mm in range(0, degree + 1)]
            while out_poly and _max_abs(out_poly[-1]) == 0.0:
                out_poly.pop()
        return RationalMatrix(self.dim, out_poly, out_poles, validate=False)

    def sigma(self, k: int, root: RootOfUnity) -> "RationalMatrix":
        return RationalMatrix(
            self.dim, [sigma_pow(c, k, root) for c in self.poly],
            [(z, [sigma_pow(c, k, root) for c in cs]) for z, cs in self.poles],
            validate=False)

    def values(self):
        """Copy with plain complex coefficient values (jets stripped)."""
        def v(c):
            return c.val.copy() if isinstance(c, JetMatrix) else np.asarray(c, complex)
        return RationalMatrix(self.dim, [v(c) for c in self.poly],
                              [(z, [v(c) for c in cs]) for z, cs in self.poles],
                              validate=False)

    def __repr__(self):
        ps = ", ".join(f"{z:.3g}^{len(cs)}" for z, cs in self.poles)
        return f"RationalMatrix(dim={self.dim}, deg={len(self.poly)-1}, poles=[{ps}])"


class LocalTuple:
    """One Laurent series per point of S = (0, zeta_1..zeta_N, INF)."""

    __slots__ = ("points", "series")

    def __init__(self, points, series):
        if len(points) != len(series):
            raise DimensionError("points/series length mismatch")
        self.points = list(points)
        self.series = list(series)

    @property
    def dim(self) -> int:
        return self.series[0].dim

    def __sub__(self, other: "LocalTuple") -> "LocalTuple":
        return LocalTuple(self.points, [a - b for a, b in zip(self.series, other.series)])

    def __add__(self, other: "LocalTuple") -> "LocalTuple":
        return LocalTuple(self.points, [a + b for a, b in zip(self.series, other.series)])


def eval_rational(R: RationalMatrix, lam: complex):
    return R.eval(lam)


def add(R1: RationalMatrix, R2: RationalMatrix) -> RationalMatrix:
    return R1 + R2


def mul(R1: RationalMatrix, R2: RationalMatrix) -> RationalMatrix:
    return R1.mul(R2)


def laurent_expand(R: RationalMatrix, point, trunc: int) -> LaurentSeries:
    return R.laurent_expand(point, trunc)


def residue(R: RationalMatrix, point):
    return R.residue(point)


def residue_at_infinity(R: RationalMatrix):
    """Residue of R dlambda at infinity: minus the u^1 series coefficient."""
    return -R.laurent_expand(INF, 1).coeff(1)


def localize(R: RationalMatrix, zetas, trunc: int) -> LocalTuple:
    """Tuple of expansions of R at S = (0, zeta_1..zeta_N, INF)."""
    points = [0j] + [complex(z) for z in zetas] + [INF]
    return LocalTuple(points, [R.laurent_expand(p, trunc) for p in points])


def pi_project(X: LocalTuple, root: RootOfUnity, weight: int = 0) -> RationalMatrix:
    """Rational function carrying the singular data of the tuple X.

    Principal parts at the finite slots are propagated over their full
    Gamma-orbits with the sigma twist appropriate to the declared weight
    (0 for functions, 1 for one-forms); the nonnegative-power part of the
    slot at infinity becomes the polynomial part.
    """
    T = root.order
    dim = X.dim
    poles = []
    poly = []
    for pt, s in zip(X.points, X.series):
        if _is_inf(pt):
            deg = -s.low
            for m in range(0, deg + 1):
                c = s.coeff(-m)
                while len(poly) <= m:
                    poly.append(_zero_like(c))
                poly[m] = poly[m] + c
        elif abs(pt) <= _POLE_TOL:
            prin = s.principal()
            if prin:
                poles.append((0j, prin))
        else:
            prin = s.principal()
            for k in range(T):
                zk = root.power(k) * pt
                cs = []
                for n, c in enumerate(prin):
                    phase = root.power(k * (n + 1 - weight))
                    cs.append(phase * sigma_pow(c, k, root))
                if cs:
                    poles.append((zk, cs))
    return RationalMatrix(dim, poly, poles, validate=False).trim()


def split(R: RationalMatrix, root: RootOfUnity, zetas, weight: int = 0,
          trunc: int = 12):
    """Decompose R into (regular LocalTuple, singular RationalMatrix).

    The singular part is the pi-image rebuilt from the principal parts at
    the slots (full sigma-averaged orbit families plus the polynomial
    part); the regular part is the tuple of Taylor remainders.  Locally at
    each slot, remainder + expansion of singular == expansion of R.
    """
    for z in R.pole_points():
        ok = abs(z) <= _POLE_TOL
        for zr in zetas:
            for k in range(root.order):
                if _same_point(z, root.power(k) * zr):
                    ok = True
        if not ok:
            raise StructuralError(f"pole at {z} outside the declared orbit set")
    X = localize(R, zetas, trunc)
    sing = pi_project(X, root, weight)
    reg = X - localize(sing, zetas, trunc)
    return reg, sing


def check_equivariance(R: RationalMatrix, weight: int, root: RootOfUnity,
                       nprobes: int = 20, seed: int = 2024) -> float:
    """max over probes of |sigma(R(lam)) - omega^weight R(omega lam)|."""
    rng = np.random.default_rng(seed)
    res = 0.0
    count = 0
    while count < nprobes:
        lam = complex(rng.uniform(0.4, 1.8) * np.exp(2j * np.pi * rng.uniform()))
        if any(abs(lam - z) < 5e-2 or abs(root.omega * lam - z) < 5e-2
               for z in R.pole_points()):
            continue
        count += 1
        lhs = sigma_pow(R.eval(lam), 1, root)
        rhs = root.power(weight) * R.eval(root.omega * lam)
        diff = lhs - rhs
        res = max(res, _max_abs(diff if not isinstance(diff, JetMatrix) else diff.val))
    return res


def pair(Y: LocalTuple, X: LocalTuple, T: int):
    """Residue pairing: T * sum over finite nonzero slots of
    Res Tr(Y_r X_r) plus the residues at 0 and infinity.

    Raises TruncationError when the series data cannot determine a residue.
    """
    if len(Y.points) != len(X.points):
        raise DimensionError("index sets differ")
    total = 0j
    for pt, sy, sx in zip(Y.points, Y.series, X.series):
        prod = sy.mul(sx).trace_series()
        if _is_inf(pt):
            r = -prod.coeff(1)
        else:
            r = prod.coeff(-1)
        w = 1.0 if (_is_inf(pt) or abs(pt) <= _POLE_TOL) else float(T)
        total = total + w * r
    return total
