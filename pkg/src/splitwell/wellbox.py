"""Eigenbasis of the 1-D infinite square well.

States are stored spectrally: a complex coefficient vector over the
orthonormal eigenfunctions sqrt(2/L) sin(n pi (x - x_left)/L), n = 1, 2, ...
(n = 1 is the ground state).  Position-space evaluation, energies and inner
products are all derived from the coefficients; adaptive quadrature is kept
alongside as an independent cross-check for the closed forms.

Natural units (L = M = hbar = 1, left wall at 0) are the default geometry.
All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import ContractError, DomainError, NumericalError

#: |sum |c_n|^2 - 1| allowed for a state that claims to be normalized.
NORMALIZATION_TOL = 1e-12

#: Default absolute tolerance of the quadrature oracle.
DEFAULT_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class WellGeometry:
    """Position and physical constants of one infinite square well.

    ``width`` is the distance between the two hard walls; ``mass`` and
    ``hbar`` fix the unit system for every derived energy.
    """

    x_left: float = 0.0
    width: float = 1.0
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("x_left", "width", "mass", "hbar"):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(float(value)):
                raise DomainError(f"geometry field {name!r} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.width <= 0.0:
            raise DomainError("well width must be positive")
        if self.mass <= 0.0 or self.hbar <= 0.0:
            raise DomainError("mass and hbar must be positive")

    @property
    def x_right(self) -> float:
        return self.x_left + self.width


@dataclass(frozen=True, eq=False)
class BoxState:
    """Complex amplitudes over the first ``n_max`` eigenmodes of one well.

    The coefficient vector is not required to be normalized: compartment
    states produced by a barrier insertion deliberately carry
    sub-unit norm equal to the compartment probability.
    """

    geometry: WellGeometry
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise DomainError("coefficients must form a nonempty 1-D vector")
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("coefficients must all be finite")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n_max(self) -> int:
        return self.coefficients.size

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def normalized(self) -> tuple["BoxState", float]:
        """Unit-norm copy together with the scale factor that was applied."""
        norm = math.sqrt(self.norm_sq())
        if norm == 0.0:
            raise DomainError("cannot normalize the zero state")
        factor = 1.0 / norm
        return BoxState(self.geometry, self.coefficients * factor), factor

    @classmethod
    def pure(cls, geometry: WellGeometry, n: int, n_max: int | None = None) -> "BoxState":
        """Eigenstate with quantum number ``n`` (n = 1 is the ground state)."""
        if not isinstance(n, numbers.Integral) or n < 1:
            raise DomainError(f"quantum number must be a positive integer, got {n!r}")
        size = int(n) if n_max is None else int(n_max)
        if size < n:
            raise DomainError("n_max must be at least the requested quantum number")
        coeffs = np.zeros(size, dtype=np.complex128)
        coeffs[int(n) - 1] = 1.0
        return cls(geometry, coeffs)

    @classmethod
    def from_weights(cls, geometry: WellGeometry,
                     weights: dict[int, complex], n_max: int | None = None) -> "BoxState":
        """State from a sparse ``{mode: weight}`` mapping, not normalized."""
        if not weights:
            raise DomainError("weights mapping must not be empty")
        for n in weights:
            if not isinstance(n, numbers.Integral) or n < 1:
                raise DomainError(f"mode numbers must be positive integers, got {n!r}")
        size = max(weights) if n_max is None else int(n_max)
        if size < max(weights):
            raise DomainError("n_max must cover the highest mode in the weights")
        coeffs = np.zeros(size, dtype=np.complex128)
        for n, w in weights.items():
            coeffs[int(n) - 1] = w
        return cls(geometry, coeffs)


def eigenenergy(geometry: WellGeometry, n: int) -> float:
    """Energy of mode ``n``: (pi hbar n)^2 / (2 M L^2)."""
    if not isinstance(n, numbers.Integral) or n < 1:
        raise DomainError(f"quantum number must be a positive integer, got {n!r}")
    return (math.pi * geometry.hbar * float(n)) ** 2 / (2.0 * geometry.mass * geometry.width ** 2)


def eigenenergies(geometry: WellGeometry, n_max: int) -> np.ndarray:
    """Vector of the first ``n_max`` eigenenergies."""
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    n = np.arange(1, n_max + 1, dtype=float)
    return (math.pi * geometry.hbar * n) ** 2 / (2.0 * geometry.mass * geometry.width ** 2)


def mode_values(geometry: WellGeometry, n_max: int, x: np.ndarray) -> np.ndarray:
    """Matrix of mode values sqrt(2/L) sin(n pi u), shape (n_max, len(x)).

    Values at the walls are exactly zero, which keeps every state's boundary
    condition exact regardless of floating sin() residues.
    """
    x = np.asarray(x, dtype=float)
    u = (x - geometry.x_left) / geometry.width
    n = np.arange(1, n_max + 1, dtype=float)[:, None]
    values = math.sqrt(2.0 / geometry.width) * np.sin(n * np.pi * u[None, :])
    at_wall = (x == geometry.x_left) | (x == geometry.x_right)
    if np.any(at_wall):
        values[:, at_wall] = 0.0
    return values


def eval_state(state: BoxState, x):
    """Wave function value(s) at position(s) ``x`` inside the well.

    Raises DomainError if any point lies outside [x_left, x_right]; the two
    walls themselves evaluate to exactly 0.
    """
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    geom = state.geometry
    if np.any(xs < geom.x_left) or np.any(xs > geom.x_right):
        raise DomainError(f"position outside the well [{geom.x_left}, {geom.x_right}]")
    values = state.coefficients @ mode_values(geom, state.n_max, xs)
    return complex(values[0]) if scalar else values


def inner_product(a: BoxState, b: BoxState) -> complex:
    """<a|b> from the coefficients; states of unequal length are zero-padded."""
    if a.geometry != b.geometry:
        raise ContractError("inner product requires identical well geometry")
    n = min(a.n_max, b.n_max)
    return complex(np.vdot(a.coefficients[:n], b.coefficients[:n]))


def energy_expectation(state: BoxState) -> float:
    """Mean energy sum |c_n|^2 E_n of a normalized state."""
    if not state.is_normalized():
        raise ContractError(
            f"energy expectation requires a normalized state (norm^2 = {state.norm_sq()!r})")
    weights = np.abs(state.coefficients) ** 2
    return float(weights @ eigenenergies(state.geometry, state.n_max))


def quadrature(f: Callable[[float], float], a: float, b: float,
               tol: float = DEFAULT_QUAD_TOL) -> float:
    """Adaptive quadrature of a bounded real integrand with absolute error <= tol.

    Deterministic for a fixed tolerance.  Raises NumericalError, carrying the
    achieved estimate, when the error estimate exceeds the target.
    """
    if not a < b:
        raise DomainError("integration interval must satisfy a < b")
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    with warnings.catch_warnings():
        # a failed run is reported through NumericalError, not a warning
        warnings.simplefilter("ignore", IntegrationWarning)
        value, abserr = quad(f, a, b, epsabs=tol, epsrel=1.49e-14, limit=512)
    if not math.isfinite(value) or abserr > tol:
        raise NumericalError(
            f"quadrature did not reach tolerance {tol:g}: "
            f"estimate {value!r} with error {abserr:g}",
            estimate=value, achieved_error=abserr)
    return float(value)
