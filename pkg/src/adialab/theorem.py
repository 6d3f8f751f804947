"""Runtime bound evaluation and end-to-end verification.

``required_time_general`` evaluates the sufficient evolution time

    T >= (1e5 / delta^2) * max(||H'||^3 / lambda^4, ||H'|| ||H''|| / lambda^3)

from an instance's raw norms; ``required_time_special`` evaluates the
same expression with constant 1000, valid when the tracked eigenvalue is
identically zero.  ``shift_to_zero_eigenvalue`` produces that zero-eigenvalue
frame, H~(s) = H(s) - gamma(s) I, and ``verify`` composes the whole
pipeline: track the branch, measure gap and norms, shift, evolve
adaptively for the prescribed time and compare against the tracked
endpoint in both the phase-invariant and the gauge-fixed metric.

Identity shifts commute with everything, so evolutions under H and H~
agree up to a global phase; the gauge-fixed l2 distance is therefore
only meaningful in the shifted frame, and the verdict gates on the
phase-invariant distance while reporting both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, FeasibilityError, IntegrityError
from .evolution import (
    DEFAULT_STEP_CEILING,
    distance_l2,
    distance_phase_invariant,
    evolve_adaptive,
)
from .hamiltonians import (
    NormBundle,
    TimeDependentHamiltonian,
    eval_batch,
    norm_bundle,
)
from .spectral import DEFAULT_GRID, DEGENERACY_RTOL, EigenPath, track_eigenpath

GENERAL_CONSTANT = 1.0e5
SPECIAL_CONSTANT = 1000.0
SHIFT_NORM_SLACK = 0.05
MAX_DELTA = math.sqrt(2.0)


@dataclass(frozen=True)
class TheoremInputs:
    """delta, measured norms, spectral gap and which bound applies."""

    delta: float
    norms: NormBundle
    lam: float
    case: str = "general"

    def __post_init__(self) -> None:
        if not (0.0 < self.delta <= MAX_DELTA + 1e-12):
            raise DomainError(f"delta must lie in (0, sqrt(2)], got {self.delta}")
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.case not in ("general", "special"):
            raise DomainError(f"case must be 'general' or 'special', got {self.case!r}")


def _bound_kernel(norms: NormBundle, lam: float) -> float:
    h1, h2 = norms.norm_H1, norms.norm_H2
    return max(h1**3 / lam**4, h1 * h2 / lam**3)


def required_time_general(inputs: TheoremInputs) -> float:
    """Sufficient time with the general-case constant 1e5."""
    if inputs.case != "general":
        raise DomainError("required_time_general expects case='general'")
    return GENERAL_CONSTANT / inputs.delta**2 * _bound_kernel(inputs.norms, inputs.lam)


def required_time_special(inputs: TheoremInputs) -> float:
    """Sufficient time with constant 1000 for the zero-eigenvalue frame."""
    if inputs.case != "special":
        raise DomainError("required_time_special expects case='special'")
    return SPECIAL_CONSTANT / inputs.delta**2 * _bound_kernel(inputs.norms, inputs.lam)


def _shift_and_measure(
    h: TimeDependentHamiltonian,
    path: EigenPath,
    base_norms: NormBundle | None = None,
    lam: float | None = None,
    *,
    norm_grid: int = DEFAULT_GRID,
    validate: bool = True,
) -> tuple[TimeDependentHamiltonian, NormBundle]:
    """Build H~(s) = H(s) - gamma(s) I and measure its norm bundle.

    gamma between grid points is interpolated by a cubic spline (a C^2
    interpolant keeps the ||H~''|| estimate stable).  The postconditions
    checked when ``validate`` is set: the tracked states are null vectors
    of H~ at every grid point, and the shifted norms obey
    ||H~'|| <= 2||H'|| and ||H~''|| <= 2||H''|| + 4||H'||^2/lambda within
    5% slack.
    """
    spline = CubicSpline(path.grid, path.gammas)
    dspline = spline.derivative(1)
    d2spline = spline.derivative(2)
    eye = np.eye(h.dim, dtype=complex)
    base = h

    def evaluate(s: float) -> np.ndarray:
        return base.evaluator(s) - float(spline(s)) * eye

    batch = None
    if base.evaluator_batch is not None:

        def batch(s_values: np.ndarray) -> np.ndarray:
            shifts = np.asarray(spline(s_values), dtype=float)
            return base.evaluator_batch(s_values) - shifts[:, None, None] * eye

    if base.derivative_mode == "analytic":
        d1 = lambda s: base.d1(s) - float(dspline(s)) * eye  # noqa: E731
        d2 = lambda s: base.d2(s) - float(d2spline(s)) * eye  # noqa: E731
        mode = "analytic"
    else:
        d1 = d2 = None
        mode = "finite_difference"

    shifted = TimeDependentHamiltonian(
        dim=base.dim,
        evaluator=evaluate,
        derivative_mode=mode,
        d1=d1,
        d2=d2,
        fd_step=base.fd_step,
        name=(base.name + "_shifted") if base.name else "shifted",
        params={**base.params, "shifted_by": "tracked_eigenvalue"},
        evaluator_batch=batch,
    )
    shifted_norms = norm_bundle(shifted, norm_grid)

    if validate:
        point_norms = np.maximum(np.abs(path.eigenvalues).max(axis=1), 1e-300)
        chunk = max(64, int(2**21 // (h.dim * h.dim)))
        for lo in range(0, path.npoints, chunk):
            hi = min(lo + chunk, path.npoints)
            mats = eval_batch(shifted, path.grid[lo:hi])
            applied = np.einsum("nij,nj->ni", mats, path.states[lo:hi])
            residual = np.linalg.norm(applied, axis=1)
            bad = residual > DEGENERACY_RTOL * point_norms[lo:hi]
            if bad.any():
                j = lo + int(np.argmax(bad))
                raise IntegrityError(
                    f"shifted Hamiltonian does not annihilate the tracked "
                    f"state at s={path.grid[j]:.6g}"
                )
        if base_norms is not None and lam is not None:
            slack = 1.0 + SHIFT_NORM_SLACK
            bound_h1 = 2.0 * base_norms.norm_H1
            bound_h2 = 2.0 * base_norms.norm_H2 + 4.0 * base_norms.norm_H1**2 / lam
            if shifted_norms.norm_H1 > bound_h1 * slack + 1e-12:
                raise IntegrityError(
                    f"shifted ||H'|| = {shifted_norms.norm_H1:.6g} exceeds "
                    f"2||H'|| = {bound_h1:.6g} beyond 5% slack"
                )
            if shifted_norms.norm_H2 > bound_h2 * slack + 1e-12:
                raise IntegrityError(
                    f"shifted ||H''|| = {shifted_norms.norm_H2:.6g} exceeds "
                    f"2||H''|| + 4||H'||^2/lambda = {bound_h2:.6g} beyond 5% slack"
                )
    return shifted, shifted_norms


def shift_to_zero_eigenvalue(
    h: TimeDependentHamiltonian, path: EigenPath, *, validate: bool = True
) -> TimeDependentHamiltonian:
    """Subtract the tracked eigenvalue: H~(s) = H(s) - gamma(s) I."""
    shifted, _ = _shift_and_measure(h, path, validate=validate)
    return shifted


@dataclass(frozen=True)
class TheoremVerdict:
    """Outcome of one verification run, with all inputs echoed."""

    passed: bool
    T_required: float
    T_used: float
    L_used: int
    distance_phase_invariant: float
    distance_gauge_fixed: float
    delta: float
    lam: float
    case: str
    norms: NormBundle
    norms_shifted: NormBundle
    grid_size: int
    disc_tol: float
    instance_name: str
    instance_params: dict

    def __post_init__(self) -> None:
        if self.passed != (self.distance_phase_invariant <= self.delta):
            raise IntegrityError("verdict pass flag inconsistent with distances")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "T_required": self.T_required,
            "T_used": self.T_used,
            "L_used": self.L_used,
            "distance_phase_invariant": self.distance_phase_invariant,
            "distance_gauge_fixed": self.distance_gauge_fixed,
            "delta": self.delta,
            "lambda": self.lam,
            "case": self.case,
            "norms": self.norms.to_dict(),
            "norms_shifted": self.norms_shifted.to_dict(),
            "grid_size": self.grid_size,
            "disc_tol": self.disc_tol,
            "instance": {"name": self.instance_name, "params": self.instance_params},
        }


def verify(
    h: TimeDependentHamiltonian,
    selector="ground",
    delta: float = 0.5,
    *,
    case: str = "general",
    T_override: float | None = None,
    grid_size: int = DEFAULT_GRID,
    disc_tol: float | None = None,
    step_ceiling: int = DEFAULT_STEP_CEILING,
    sign_convention: str = "paper_plus",
) -> TheoremVerdict:
    """Track, bound, evolve for the prescribed time, and compare.

    The evolution runs in the shifted frame from the gauge-fixed initial
    state with disc_tol = delta/100 unless overridden, so discretization
    noise stays two orders below the claim under test.  If the required
    step count exceeds ``step_ceiling`` the run refuses up front and
    reports the largest feasible T instead of silently truncating.
    """
    if not (0.0 < delta <= MAX_DELTA + 1e-12):
        raise DomainError(f"delta must lie in (0, sqrt(2)], got {delta}")
    if disc_tol is None:
        disc_tol = delta / 100.0

    path = track_eigenpath(h, grid_size, selector)
    lam = path.gap
    norms = norm_bundle(h, grid_size)
    shifted, norms_shifted = _shift_and_measure(
        h, path, norms, lam, norm_grid=grid_size
    )

    if case == "general":
        t_required = required_time_general(TheoremInputs(delta, norms, lam, "general"))
    elif case == "special":
        t_required = required_time_special(
            TheoremInputs(delta, norms_shifted, lam, "special")
        )
    else:
        raise DomainError(f"case must be 'general' or 'special', got {case!r}")

    t_used = float(T_override) if T_override is not None else t_required

    psi0 = path.states[0]
    target = path.states[-1]
    if t_used == 0.0:
        final, l_used = psi0, 0
    else:
        l_start = math.ceil(8.0 * t_used * norms_shifted.norm_H)
        if l_start > step_ceiling:
            feasible = step_ceiling / (8.0 * norms_shifted.norm_H)
            raise FeasibilityError(
                f"T={t_used:.6g} needs {l_start} initial steps, beyond the "
                f"ceiling {step_ceiling}; largest feasible T is about "
                f"{feasible:.6g}"
            )
        result = evolve_adaptive(
            shifted,
            psi0,
            t_used,
            disc_tol,
            sign_convention=sign_convention,
            step_ceiling=step_ceiling,
            norm_H=norms_shifted.norm_H,
        )
        final, l_used = result.final_state, result.L_used

    d_phase = distance_phase_invariant(final, target)
    d_gauge = distance_l2(final, target)
    return TheoremVerdict(
        passed=d_phase <= delta,
        T_required=t_required,
        T_used=t_used,
        L_used=l_used,
        distance_phase_invariant=d_phase,
        distance_gauge_fixed=d_gauge,
        delta=delta,
        lam=lam,
        case=case,
        norms=norms,
        norms_shifted=norms_shifted,
        grid_size=grid_size,
        disc_tol=disc_tol,
        instance_name=h.name,
        instance_params=dict(h.params),
    )


__all__ = [
    "TheoremInputs",
    "TheoremVerdict",
    "required_time_general",
    "required_time_special",
    "shift_to_zero_eigenvalue",
    "verify",
    "GENERAL_CONSTANT",
    "SPECIAL_CONSTANT",
]
