"""Finite-dimensional backbone: gl_T over C, the cyclic automorphism sigma
and its Z_T grading, root-of-unity bookkeeping.

The automorphism acts entrywise, sigma(E_ij) = omega^(j-i) E_ij, where omega
is a fixed primitive T-th root of unity.  Its eigenspaces are the "grades"
g^(n) = span{E_{i,i+n}} with indices mod T.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidOrderError


@dataclass(frozen=True)
class RootOfUnity:
    """Primitive T-th root of unity with a cached power table."""

    order: int
    omega: complex
    powers: np.ndarray  # omega^0 .. omega^(T-1)
    _sigma_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def power(self, k: int) -> complex:
        """omega^k for any integer k (reduced mod order)."""
        return self.powers[k % self.order]

    def _sigma_phase(self, k: int) -> np.ndarray:
        """Entrywise phase matrix of sigma^k: phase[i,j] = omega^(k(j-i))."""
        k = k % self.order
        cached = self._sigma_cache.get(k)
        if cached is None:
            idx = np.arange(self.order)
            grid = (k * (idx[None, :] - idx[:, None])) % self.order
            cached = self.powers[grid]
            self._sigma_cache[k] = cached
        return cached


_ROOT_CACHE: dict = {}


def primitive_root(T: int) -> RootOfUnity:
    """omega = exp(2*pi*i/T) with its power table (cached per order)."""
    if T < 1:
        raise InvalidOrderError(f"root-of-unity order must be >= 1, got {T}")
    root = _ROOT_CACHE.get(T)
    if root is None:
        powers = np.exp(2j * np.pi * np.arange(T) / T)
        root = RootOfUnity(order=T, omega=complex(powers[1] if T > 1 else 1.0),
                           powers=powers)
        _ROOT_CACHE[T] = root
    return root


def _check_dim(X: np.ndarray, T: int) -> None:
    if X.shape != (T, T):
        raise DimensionError(f"expected shape {(T, T)}, got {X.shape}")


def sigma_pow(X, k: int, root: RootOfUnity):
    """Apply sigma^k entrywise: (sigma^k X)_ij = omega^(k(j-i)) X_ij.

    Accepts a plain ndarray or any object with a ``phase_mul`` method
    (e.g. a dual-number matrix).
    """
    phase = root._sigma_phase(k)
    if hasattr(X, "phase_mul"):
        return X.phase_mul(phase)
    X = np.asarray(X)
    _check_dim(X, root.order)
    return X * phase


def grade_component(X, n: int, T: int):
    """Project X onto g^(n) = span{E_{i,i+n}} (indices mod T)."""
    idx = np.arange(T)
    mask = ((idx[None, :] - idx[:, None]) % T == n % T)
    if hasattr(X, "phase_mul"):
        return X.phase_mul(mask.astype(complex))
    X = np.asarray(X)
    _check_dim(X, T)
    return np.where(mask, X, 0.0)


def grading_residual(X: np.ndarray, n: int, T: int) -> float:
    """Max-abs of the part of X outside grade n."""
    return float(np.max(np.abs(np.asarray(X) - grade_component(np.asarray(X), n, T))))
