"""Dense linear-algebra helpers shared across modules.

Everything here is batch-oriented: a trailing (d, d) matrix shape with an
arbitrary leading batch axis, so step unitaries and grid scans can be
vectorized in chunks.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NumericalError

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def dagger(mats: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(mats, -1, -2))


def hermiticity_defect(mats: np.ndarray) -> float:
    """Largest absolute entry of A - A^dagger over the whole batch."""
    return float(np.abs(mats - dagger(mats)).max(initial=0.0))


def opnorm_hermitian(mats: np.ndarray) -> np.ndarray:
    """Operator norm (largest |eigenvalue|) of Hermitian input, batched."""
    return np.abs(np.linalg.eigvalsh(mats)).max(axis=-1)


def opnorm(mats: np.ndarray) -> np.ndarray:
    """Operator norm (largest singular value); no symmetry assumed."""
    return np.linalg.svd(mats, compute_uv=False)[..., 0]


def eigh_batch(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """np.linalg.eigh with a fast path for exactly-real Hermitian input."""
    if np.iscomplexobj(mats) and not mats.imag.any():
        return np.linalg.eigh(mats.real)
    return np.linalg.eigh(mats)


def _expm_i_two_level(mats: np.ndarray, t: float) -> np.ndarray:
    # Closed-form spectral exponential for 2x2 Hermitian input:
    # A = c*I + M0 with traceless M0, M0^2 = r^2 * I, so
    # exp(i t A) = e^{i t c} (cos(t r) I + i sin(t r)/r * M0).
    a = mats[..., 0, 0].real
    d = mats[..., 1, 1].real
    b = mats[..., 0, 1]
    c = 0.5 * (a + d)
    mu = 0.5 * (a - d)
    r = np.sqrt(mu * mu + np.abs(b) ** 2)
    co = np.cos(t * r)
    safe_r = np.where(r > 0.0, r, 1.0)
    f = np.where(r > 0.0, np.sin(t * r) / safe_r, t)  # limit sin(tr)/r -> t
    phase = np.exp(1j * t * c)
    out = np.empty(mats.shape, dtype=complex)
    out[..., 0, 0] = phase * (co + 1j * f * mu)
    out[..., 0, 1] = phase * (1j * f * b)
    out[..., 1, 0] = phase * (1j * f * np.conj(b))
    out[..., 1, 1] = phase * (co - 1j * f * mu)
    return out


def expm_i_hermitian(mats: np.ndarray, t: float) -> np.ndarray:
    """exp(i*t*A) for Hermitian A (batched), by spectral decomposition.

    The 2x2 case uses the analytically diagonalized form; larger matrices
    go through a batched eigendecomposition.  Both are exact up to
    eigensolver precision.
    """
    mats = np.asarray(mats)
    if mats.shape[-1] == 2:
        return _expm_i_two_level(mats, t)
    w, v = eigh_batch(mats)
    phase = np.exp(1j * t * w)
    return (v * phase[..., None, :]) @ dagger(v.astype(complex, copy=False))


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """U_{n-1} @ ... @ U_1 @ U_0 by order-preserving pairwise reduction."""
    if mats.shape[0] == 0:
        raise ValueError("empty product")
    while mats.shape[0] > 1:
        n = mats.shape[0]
        m = n // 2
        paired = np.matmul(mats[1 : 2 * m : 2], mats[0 : 2 * m : 2])
        if n % 2:
            mats = np.concatenate([paired, mats[2 * m :]], axis=0)
        else:
            mats = paired
    return mats[0]


def unitarity_defect(u: np.ndarray) -> float:
    eye = np.eye(u.shape[-1])
    return float(np.abs(dagger(u) @ u - eye).max())


def check_finite(mats: np.ndarray, what: str) -> None:
    if not np.isfinite(mats).all():
        raise NumericalError(f"{what} contains non-finite entries")


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, iters: int = 48
) -> tuple[float, float]:
    """Golden-section search for a local maximum of f on [a, b]."""
    if b <= a:
        return a, f(a)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)
