"""Free phase evolution and density-profile snapshots.

Evolution is exact in the spectral representation: c_n(t) = c_n exp(-i E_n t
/ hbar).  After an insertion each compartment evolves with its own spectrum
behind an impenetrable wall, so compartment probabilities are constants of
the motion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .insertion import SplitState
from .wellbox import BoxState, WellGeometry, eigenenergies, mode_values


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """|psi(x, t)|^2 sampled on a uniform grid, one row per time.

    For a split state the grid is the concatenation of one uniform subgrid
    per compartment; ``break_index`` is the first index of the right
    subgrid, and the barrier position appears at both ``break_index - 1``
    and ``break_index``.
    """

    times: np.ndarray
    positions: np.ndarray
    density: np.ndarray
    break_index: int | None = None


def _phases(geometry: WellGeometry, n_max: int, t: float) -> np.ndarray:
    return np.exp(-1j * eigenenergies(geometry, n_max) * t / geometry.hbar)


def evolve(state: BoxState, t: float) -> BoxState:
    """Phase-evolve a normalized state by time ``t``; norm is preserved exactly."""
    if not state.is_normalized():
        raise ContractError("evolve requires a normalized state")
    return BoxState(state.geometry,
                    state.coefficients * _phases(state.geometry, state.n_max, float(t)))


def evolve_split(split_state: SplitState, t: float) -> SplitState:
    """Evolve each compartment with its own eigenenergies."""
    t = float(t)
    left = split_state.left
    right = split_state.right
    return SplitState(
        parent_geometry=split_state.parent_geometry,
        insertion_point=split_state.insertion_point,
        left=BoxState(left.geometry, left.coefficients * _phases(left.geometry, left.n_max, t)),
        right=BoxState(right.geometry, right.coefficients * _phases(right.geometry, right.n_max, t)),
        pre_energy=split_state.pre_energy,
        nodal=split_state.nodal,
        truncation_residual=split_state.truncation_residual,
    )


def _state_density_rows(state: BoxState, times: np.ndarray, xs: np.ndarray) -> np.ndarray:
    modes = mode_values(state.geometry, state.n_max, xs)
    rows = np.empty((times.size, xs.size), dtype=float)
    for i, t in enumerate(times):
        amplitudes = (state.coefficients * _phases(state.geometry, state.n_max, float(t))) @ modes
        rows[i] = np.abs(amplitudes) ** 2
    return rows


def density_grid(state_or_split: BoxState | SplitState, times, n_points: int) -> DensityGrid:
    """Sample |psi(x, t)|^2 for each requested time.

    Splits are sampled compartment by compartment on subgrids of ``n_points``
    each, with the barrier reported as a grid break.
    """
    times = np.asarray(list(times), dtype=float)
    if times.size == 0:
        raise ContractError("density grid requires at least one time")
    if n_points < 2:
        raise DomainError("n_points must be at least 2")

    if isinstance(state_or_split, BoxState):
        geom = state_or_split.geometry
        xs = np.linspace(geom.x_left, geom.x_right, int(n_points))
        return DensityGrid(times=times, positions=xs,
                           density=_state_density_rows(state_or_split, times, xs))

    if isinstance(state_or_split, SplitState):
        sp = state_or_split
        xs_left = np.linspace(sp.parent_geometry.x_left, sp.insertion_point, int(n_points))
        xs_right = np.linspace(sp.insertion_point, sp.parent_geometry.x_right, int(n_points))
        rows = np.hstack([
            _state_density_rows(sp.left, times, xs_left),
            _state_density_rows(sp.right, times, xs_right),
        ])
        return DensityGrid(times=times,
                           positions=np.concatenate([xs_left, xs_right]),
                           density=rows,
                           break_index=int(n_points))

    raise DomainError(f"expected a BoxState or SplitState, got {type(state_or_split)!r}")


def slice_norms(grid: DensityGrid) -> np.ndarray:
    """Trapezoidal integral of every time slice.

    The duplicated barrier point of a split grid forms a zero-width panel, so
    a single pass over the full position vector is exact.
    """
    return np.trapezoid(grid.density, grid.positions, axis=1)
