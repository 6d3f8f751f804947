"""Time-dependent Hermitian Hamiltonians H(s), s in [0, 1].

Each sample is a dense complex Hermitian matrix.  A TimeDependentHamiltonian
bundles the evaluator with first and second derivatives (analytic callables
or second-order finite differences with one-sided stencils at the interval
ends) and the sup-norm quantities max_s ||H(s)||, max_s ||H'(s)||,
max_s ||H''(s)|| consumed by the runtime bound.

Sup norms are approximated on a uniform grid (default 1025 points) followed
by one golden-section refinement around the grid argmax.  Matrices failing
the Hermiticity check are rejected rather than symmetrized, so instance
bugs fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._linalg import (
    check_finite,
    golden_section_max,
    hermiticity_defect,
    opnorm_hermitian,
)
from .errors import DomainError, IntegrityError

HERMITICITY_RTOL = 1e-12
DEFAULT_NORM_GRID = 1025
DEFAULT_FD_STEP = 1e-5

Evaluator = Callable[[float], np.ndarray]
BatchEvaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HermitianOperator:
    """A dense complex square matrix certified Hermitian at construction."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {entries.shape}")
        if entries.shape[0] < 2:
            raise DomainError("matrix dimension must be at least 2")
        check_finite(entries, "matrix")
        scale = float(np.abs(entries).max())
        defect = hermiticity_defect(entries)
        if defect > HERMITICITY_RTOL * scale:
            raise IntegrityError(
                f"matrix is not Hermitian: defect {defect:.3e} exceeds "
                f"{HERMITICITY_RTOL:.0e} * {scale:.3e}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def operator_norm(a: HermitianOperator) -> float:
    """Largest absolute eigenvalue of a Hermitian operator."""
    return float(opnorm_hermitian(a.entries))


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """Sampler for H(s) with derivative access and instance metadata.

    ``evaluator`` must be a pure function of s; all values are immutable
    after construction, so instances are safe to share across threads.
    ``evaluator_batch``, when provided, evaluates a whole array of s values
    at once (shape (n, dim, dim)) and is used by the hot evolution loops.
    """

    dim: int
    evaluator: Evaluator
    derivative_mode: str = "finite_difference"
    d1: Evaluator | None = None
    d2: Evaluator | None = None
    fd_step: float = DEFAULT_FD_STEP
    name: str = ""
    params: dict = field(default_factory=dict)
    evaluator_batch: BatchEvaluator | None = None

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise DomainError("Hamiltonian dimension must be at least 2")
        if self.derivative_mode not in ("analytic", "finite_difference"):
            raise DomainError(
                f"unknown derivative_mode {self.derivative_mode!r}; "
                "expected 'analytic' or 'finite_difference'"
            )
        if self.derivative_mode == "analytic" and (self.d1 is None or self.d2 is None):
            raise DomainError("analytic mode requires both d1 and d2 callables")
        if not (0.0 < self.fd_step <= 0.1):
            raise DomainError("fd_step must lie in (0, 0.1]")


def _check_s(s: float) -> float:
    s = float(s)
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"s={s} lies outside [0, 1]")
    return s


def _raw(h: TimeDependentHamiltonian, s: float) -> np.ndarray:
    mat = np.asarray(h.evaluator(s), dtype=complex)
    if mat.shape != (h.dim, h.dim):
        raise IntegrityError(
            f"evaluator returned shape {mat.shape}, expected {(h.dim, h.dim)}"
        )
    return mat


def eval_at(h: TimeDependentHamiltonian, s: float) -> HermitianOperator:
    """Evaluate H(s), certifying the result Hermitian."""
    return HermitianOperator(_raw(h, _check_s(s)))


def eval_batch(
    h: TimeDependentHamiltonian, s_values: np.ndarray, validate: bool = True
) -> np.ndarray:
    """Evaluate H on an array of s values; returns shape (n, dim, dim).

    Validation checks the Hermiticity of the whole batch in one pass
    (relative to the batch's largest entry).
    """
    s_values = np.asarray(s_values, dtype=float)
    if s_values.size and (s_values.min() < 0.0 or s_values.max() > 1.0):
        raise DomainError("s values must lie in [0, 1]")
    if h.evaluator_batch is not None:
        mats = np.asarray(h.evaluator_batch(s_values), dtype=complex)
        if mats.shape != (s_values.size, h.dim, h.dim):
            raise IntegrityError(
                f"batch evaluator returned shape {mats.shape}, expected "
                f"{(s_values.size, h.dim, h.dim)}"
            )
    else:
        mats = np.stack([_raw(h, float(s)) for s in s_values])
    if validate:
        scale = float(np.abs(mats).max(initial=0.0))
        defect = hermiticity_defect(mats)
        if defect > HERMITICITY_RTOL * scale:
            raise IntegrityError(
                f"evaluator output not Hermitian: defect {defect:.3e} "
                f"(scale {scale:.3e})"
            )
    return mats


def _fd_matrix(h: TimeDependentHamiltonian, s: float, order: int) -> np.ndarray:
    step = h.fd_step
    f = lambda x: _raw(h, x)  # noqa: E731 - local shorthand
    if order == 1:
        if s - step < 0.0:
            return (-3.0 * f(s) + 4.0 * f(s + step) - f(s + 2 * step)) / (2 * step)
        if s + step > 1.0:
            return (3.0 * f(s) - 4.0 * f(s - step) + f(s - 2 * step)) / (2 * step)
        return (f(s + step) - f(s - step)) / (2 * step)
    if s - step < 0.0:
        return (
            2.0 * f(s) - 5.0 * f(s + step) + 4.0 * f(s + 2 * step) - f(s + 3 * step)
        ) / step**2
    if s + step > 1.0:
        return (
            2.0 * f(s) - 5.0 * f(s - step) + 4.0 * f(s - 2 * step) - f(s - 3 * step)
        ) / step**2
    return (f(s + step) - 2.0 * f(s) + f(s - step)) / step**2


def derivative(
    h: TimeDependentHamiltonian, s: float, order: int
) -> HermitianOperator:
    """H'(s) or H''(s): supplied analytically or by finite differences.

    Finite differences are second-order central stencils in the interior
    and second-order one-sided stencils near s = 0 and s = 1, so no
    stencil point ever leaves [0, 1].
    """
    s = _check_s(s)
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    if h.derivative_mode == "analytic":
        fn = h.d1 if order == 1 else h.d2
        mat = np.asarray(fn(s), dtype=complex)  # type: ignore[misc]
        if mat.shape != (h.dim, h.dim):
            raise IntegrityError(
                f"analytic derivative returned shape {mat.shape}, "
                f"expected {(h.dim, h.dim)}"
            )
        return HermitianOperator(mat)
    return HermitianOperator(_fd_matrix(h, s, order))


@dataclass(frozen=True)
class NormBundle:
    """Grid suprema of ||H||, ||H'||, ||H''|| over s in [0, 1]."""

    norm_H: float
    norm_H1: float
    norm_H2: float
    grid_size: int

    def __post_init__(self) -> None:
        for label, value in (
            ("norm_H", self.norm_H),
            ("norm_H1", self.norm_H1),
            ("norm_H2", self.norm_H2),
        ):
            if value < 0.0:
                raise IntegrityError(f"{label} is negative: {value}")

    def to_dict(self) -> dict:
        return {
            "norm_H": self.norm_H,
            "norm_H1": self.norm_H1,
            "norm_H2": self.norm_H2,
            "grid_size": self.grid_size,
        }


def _refined_max(
    values: np.ndarray, grid: np.ndarray, point_fn: Callable[[float], float]
) -> float:
    """Grid max plus one golden-section refinement around the argmax."""
    i = int(np.argmax(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    best = float(values[i])
    if hi > lo:
        _, refined = golden_section_max(point_fn, float(lo), float(hi))
        best = max(best, float(refined))
    return best


def norm_bundle(
    h: TimeDependentHamiltonian, grid_size: int = DEFAULT_NORM_GRID
) -> NormBundle:
    """Measure the sup norms of H, H' and H'' on a uniform grid."""
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_size)

    mats = eval_batch(h, grid)
    vals_h = opnorm_hermitian(mats)
    norm_h = _refined_max(vals_h, grid, lambda s: operator_norm(eval_at(h, s)))

    out = [norm_h]
    for order in (1, 2):
        stacked = np.stack([derivative(h, float(s), order).entries for s in grid])
        vals = opnorm_hermitian(stacked)
        out.append(
            _refined_max(
                vals, grid, lambda s: operator_norm(derivative(h, s, order))
            )
        )
    return NormBundle(out[0], out[1], out[2], grid_size)


def hermitian(entries: np.ndarray) -> HermitianOperator:
    """Convenience constructor used heavily by the instance library."""
    return HermitianOperator(np.asarray(entries, dtype=complex))


__all__ = [
    "HermitianOperator",
    "TimeDependentHamiltonian",
    "NormBundle",
    "eval_at",
    "eval_batch",
    "derivative",
    "operator_norm",
    "norm_bundle",
    "hermitian",
    "DEFAULT_NORM_GRID",
    "DEFAULT_FD_STEP",
    "HERMITICITY_RTOL",
]
