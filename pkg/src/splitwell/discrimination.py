"""Bayes cost machinery for binary discrimination with an insertion side-channel.

The minimum average error of the plain quantum measurement is the Helstrom
bound C(xi, K) = 1/2 - 1/2 sqrt(1 - 4 xi (1 - xi) K), where K is the squared
overlap of the two candidate states.  Inserting a barrier leaves K unchanged
but makes the insertion energy state-dependent: zero when the barrier lands
on a node, large otherwise.  Reading that energy first and then measuring
Helstrom-optimally on the updated prior gives the combined strategy

    C_combined = sum_outcomes P(outcome) * C(posterior(outcome), K)

which by concavity of C in the prior never exceeds the bare bound, with
equality exactly for uninformative signals.

Hypothesis A is, by convention, the state that is nodal at the insertion
point; detector error rates are defined against the nodal/non-nodal truth:
false_positive = P(detect energy | nodal), false_negative = P(no detection |
non-nodal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy.integrate import quad

from .errors import ContractError, DomainError, NumericalError
from .insertion import SplitState, is_nodal, split
from .wellbox import BoxState, inner_product, quadrature

NODAL = "nodal"
NONNODAL = "nonnodal"
DETECT = "detect"
NO_DETECT = "no_detect"

RAW_HALVES = "raw-halves"
RENORMALIZED_HALVES = "renormalized-halves"

#: Absolute tolerance of the readout integral in the Gaussian branch.
GAUSSIAN_INTEGRAL_TOL = 1e-10

#: Readout window half-width in units of sigma around each mean.
GAUSSIAN_WINDOW_SIGMAS = 8.0

#: |left - right| below which the probe reports balanced side overlaps.
BALANCE_TOL = 1e-9


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or not math.isfinite(value):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class BinaryDetector:
    """Threshold detector for the insertion energy with asymmetric error rates."""

    false_positive: float
    false_negative: float

    def __post_init__(self):
        object.__setattr__(self, "false_positive",
                           _check_probability(self.false_positive, "false_positive"))
        object.__setattr__(self, "false_negative",
                           _check_probability(self.false_negative, "false_negative"))


@dataclass(frozen=True)
class GaussianReadout:
    """Continuous energy readout with hypothesis-dependent mean and fixed noise."""

    mu_nodal: float
    mu_nonnodal: float
    sigma: float

    def __post_init__(self):
        for name in ("mu_nodal", "mu_nonnodal", "sigma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.sigma <= 0.0:
            raise DomainError("sigma must be positive")


SignalModel = Union[BinaryDetector, GaussianReadout]


@dataclass(frozen=True)
class NormalDensity:
    """Gaussian readout density under one hypothesis."""

    mean: float
    sigma: float

    def pdf(self, x: float) -> float:
        z = (float(x) - self.mean) / self.sigma
        return math.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def logpdf(self, x: float) -> float:
        z = (float(x) - self.mean) / self.sigma
        return -0.5 * z * z - math.log(self.sigma * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class Scenario:
    """One discrimination problem: prior, the two candidate states, the barrier."""

    prior: float
    state_a: BoxState
    state_b: BoxState
    insertion_point: float
    signal: SignalModel

    def __post_init__(self):
        object.__setattr__(self, "prior", _check_probability(self.prior, "prior"))
        if self.state_a.geometry != self.state_b.geometry:
            raise ContractError("candidate states must share one well geometry")
        for label, state in (("state_a", self.state_a), ("state_b", self.state_b)):
            if not state.is_normalized():
                raise ContractError(f"{label} must be normalized")
        geom = self.state_a.geometry
        a = float(self.insertion_point)
        if not geom.x_left < a < geom.x_right:
            raise DomainError("insertion point must lie strictly inside the well")
        object.__setattr__(self, "insertion_point", a)


class OutcomeRow(NamedTuple):
    outcome: str | float
    probability: float
    posterior: float
    branch_cost: float


@dataclass(frozen=True)
class CostBreakdown:
    """Helstrom baseline, per-outcome posterior branches, and the combined cost.

    For a Gaussian readout the posterior table is a descriptive binning of the
    continuous outcome; the combined cost itself comes from adaptive
    quadrature, not from the table.
    """

    helstrom_baseline: float
    overlap_sq: float
    posterior_table: tuple[OutcomeRow, ...]
    combined_cost: float
    nodal_flags: tuple[bool, bool]
    overlap_sq_split: float | None = None


class SplitOverlap(NamedTuple):
    total: complex
    left: complex
    right: complex


def helstrom_cost(xi: float, overlap_sq: float) -> float:
    """Minimum error probability 1/2 - 1/2 sqrt(1 - 4 xi (1-xi) K)."""
    xi = _check_probability(xi, "prior")
    overlap_sq = _check_probability(overlap_sq, "overlap_sq")
    discriminant = 1.0 - 4.0 * xi * (1.0 - xi) * overlap_sq
    return 0.5 - 0.5 * math.sqrt(max(0.0, discriminant))


def transition_probability(a: BoxState, b: BoxState) -> float:
    """Squared overlap |<a|b>|^2 of two normalized states."""
    for label, state in (("first", a), ("second", b)):
        if not state.is_normalized():
            raise ContractError(f"{label} state must be normalized")
    return abs(inner_product(a, b)) ** 2


def split_overlap(sa: SplitState, sb: SplitState) -> SplitOverlap:
    """Per-compartment and total overlap of two splits of the same well."""
    if sa.parent_geometry != sb.parent_geometry:
        raise ContractError("split overlap requires the same parent geometry")
    if sa.insertion_point != sb.insertion_point:
        raise ContractError("split overlap requires the same insertion point")
    left = inner_product(sa.left, sb.left)
    right = inner_product(sa.right, sb.right)
    return SplitOverlap(total=left + right, left=left, right=right)


def signal_likelihoods(model: SignalModel, hypothesis: str):
    """Outcome distribution of the side-channel under one hypothesis.

    Binary detectors yield a ``{outcome: probability}`` mapping; the Gaussian
    readout yields the NormalDensity with the hypothesis' mean.
    """
    if hypothesis not in (NODAL, NONNODAL):
        raise DomainError(f"hypothesis must be {NODAL!r} or {NONNODAL!r}, got {hypothesis!r}")
    if isinstance(model, BinaryDetector):
        p_detect = (model.false_positive if hypothesis == NODAL
                    else 1.0 - model.false_negative)
        return {DETECT: p_detect, NO_DETECT: 1.0 - p_detect}
    if isinstance(model, GaussianReadout):
        mean = model.mu_nodal if hypothesis == NODAL else model.mu_nonnodal
        return NormalDensity(mean=mean, sigma=model.sigma)
    raise DomainError(f"unknown signal model {type(model)!r}")


def _stable_sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def posterior_update(xi: float, model: SignalModel, outcome) -> float:
    """Bayes update of the nodal-hypothesis prior given one signal outcome."""
    xi = _check_probability(xi, "prior")
    if isinstance(model, BinaryDetector):
        lik_nodal = signal_likelihoods(model, NODAL)
        lik_nonnodal = signal_likelihoods(model, NONNODAL)
        if outcome not in lik_nodal:
            raise DomainError(f"binary outcome must be {DETECT!r} or {NO_DETECT!r}")
        la, lb = lik_nodal[outcome], lik_nonnodal[outcome]
        if la == 0.0 and lb == 0.0:
            raise DomainError(f"outcome {outcome!r} has probability zero under both hypotheses")
        total = xi * la + (1.0 - xi) * lb
        if total == 0.0:
            raise DomainError(
                f"outcome {outcome!r} has probability zero under the prior mixture")
        return xi * la / total
    if isinstance(model, GaussianReadout):
        if xi in (0.0, 1.0):
            return xi
        log_ratio = (signal_likelihoods(model, NODAL).logpdf(outcome)
                     - signal_likelihoods(model, NONNODAL).logpdf(outcome))
        return _stable_sigmoid(math.log(xi / (1.0 - xi)) + log_ratio)
    raise DomainError(f"unknown signal model {type(model)!r}")


def _hypothesis_labels(scenario: Scenario) -> tuple[bool, bool]:
    nodal_a = is_nodal(scenario.state_a, scenario.insertion_point)
    nodal_b = is_nodal(scenario.state_b, scenario.insertion_point)
    return nodal_a, nodal_b


def _binary_branches(xi: float, model: BinaryDetector,
                     lik_a: dict, lik_b: dict, overlap_sq: float):
    rows = []
    combined = 0.0
    for outcome in (DETECT, NO_DETECT):
        probability = xi * lik_a[outcome] + (1.0 - xi) * lik_b[outcome]
        if probability == 0.0:
            continue
        posterior = xi * lik_a[outcome] / probability
        branch_cost = helstrom_cost(posterior, overlap_sq)
        rows.append(OutcomeRow(outcome, probability, posterior, branch_cost))
        combined += probability * branch_cost
    return rows, combined


def _gaussian_branches(xi: float, density_a: NormalDensity, density_b: NormalDensity,
                       overlap_sq: float, n_bins: int = 160):
    sigma = density_a.sigma
    lo = min(density_a.mean, density_b.mean) - GAUSSIAN_WINDOW_SIGMAS * sigma
    hi = max(density_a.mean, density_b.mean) + GAUSSIAN_WINDOW_SIGMAS * sigma

    def posterior_at(x: float) -> float:
        if xi in (0.0, 1.0):
            return xi
        return _stable_sigmoid(math.log(xi / (1.0 - xi))
                               + density_a.logpdf(x) - density_b.logpdf(x))

    def integrand(x: float) -> float:
        mixture = xi * density_a.pdf(x) + (1.0 - xi) * density_b.pdf(x)
        return mixture * helstrom_cost(posterior_at(x), overlap_sq)

    points = sorted({density_a.mean, density_b.mean})
    combined, abserr = quad(integrand, lo, hi, epsabs=GAUSSIAN_INTEGRAL_TOL,
                            points=points, limit=400)
    if not math.isfinite(combined) or abserr > GAUSSIAN_INTEGRAL_TOL:
        raise NumericalError(
            f"readout integral did not converge: estimate {combined!r}, error {abserr:g}",
            estimate=combined, achieved_error=abserr)

    def mass(density: NormalDensity, x0: float, x1: float) -> float:
        s = density.sigma * math.sqrt(2.0)
        return 0.5 * (math.erf((x1 - density.mean) / s) - math.erf((x0 - density.mean) / s))

    edges = np.linspace(lo, hi, n_bins + 1)
    rows = []
    for x0, x1 in zip(edges[:-1], edges[1:]):
        center = 0.5 * (x0 + x1)
        probability = xi * mass(density_a, x0, x1) + (1.0 - xi) * mass(density_b, x0, x1)
        posterior = posterior_at(center)
        rows.append(OutcomeRow(float(center), float(probability), posterior,
                               helstrom_cost(posterior, overlap_sq)))
    return rows, float(combined)


def combined_cost(scenario: Scenario, n_cut: int) -> CostBreakdown:
    """Expected cost of reading the insertion energy, then measuring Helstrom-optimally.

    The overlap entering every Helstrom branch is the pre-insertion one; the
    insertion leaves it unchanged, which the breakdown records by also
    reporting the truncated split overlap at ``n_cut`` modes per compartment.
    When both states are nodal (or both non-nodal) at the insertion point the
    two likelihoods coincide and the combined cost degrades to the baseline.
    """
    xi = scenario.prior
    overlap_sq = transition_probability(scenario.state_a, scenario.state_b)
    baseline = helstrom_cost(xi, overlap_sq)
    nodal_a, nodal_b = _hypothesis_labels(scenario)
    hyp_a = NODAL if nodal_a else NONNODAL
    hyp_b = NODAL if nodal_b else NONNODAL

    split_a = split(scenario.state_a, scenario.insertion_point, n_cut)
    split_b = split(scenario.state_b, scenario.insertion_point, n_cut)
    overlap_sq_split = abs(split_overlap(split_a, split_b).total) ** 2

    model = scenario.signal
    if isinstance(model, BinaryDetector):
        rows, combined = _binary_branches(
            xi, model,
            signal_likelihoods(model, hyp_a), signal_likelihoods(model, hyp_b),
            overlap_sq)
    elif isinstance(model, GaussianReadout):
        rows, combined = _gaussian_branches(
            xi, signal_likelihoods(model, hyp_a), signal_likelihoods(model, hyp_b),
            overlap_sq)
    else:
        raise DomainError(f"unknown signal model {type(model)!r}")

    return CostBreakdown(
        helstrom_baseline=baseline,
        overlap_sq=overlap_sq,
        posterior_table=tuple(rows),
        combined_cost=combined,
        nodal_flags=(nodal_a, nodal_b),
        overlap_sq_split=overlap_sq_split,
    )


class SweepEntry(NamedTuple):
    xi: float
    epsilon: float
    breakdown: CostBreakdown


def sweep(scenario: Scenario, xi_grid, epsilon_grid, n_cut: int,
          threads: int = 1) -> list[SweepEntry]:
    """Cost breakdowns over a prior grid times a symmetric detector-error grid.

    Rows are ordered lexicographically in the grid indices, independent of
    any parallel evaluation of the entries.
    """
    xi_values = [_check_probability(x, "xi grid entry") for x in xi_grid]
    eps_values = [_check_probability(e, "epsilon grid entry") for e in epsilon_grid]
    points = [(xi, eps) for xi in xi_values for eps in eps_values]

    def entry(point: tuple[float, float]) -> SweepEntry:
        xi, eps = point
        variant = Scenario(prior=xi, state_a=scenario.state_a,
                           state_b=scenario.state_b,
                           insertion_point=scenario.insertion_point,
                           signal=BinaryDetector(eps, eps))
        return SweepEntry(xi, eps, combined_cost(variant, n_cut))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(entry, points))
    return [entry(point) for point in points]


@dataclass(frozen=True)
class MatchedPairReport:
    """Side overlaps of the three-mode candidate against the ground state.

    ``balanced_ratio`` is the gamma/beta that makes the two side overlaps
    equal under the chosen definition (None when the search bracket holds no
    root or beta = 0 makes the ratio meaningless); ``candidate_balances``
    states whether the probed ratio achieves the balance itself.
    """

    definition: str
    weights: tuple[float, float, float]
    full_overlap: float
    left_overlap: float
    right_overlap: float
    sides_balanced: bool
    balanced_ratio: float | None
    candidate_ratio: float | None
    candidate_balances: bool | None
    note: str = ""


def _half_integrals(tol: float = 1e-12) -> dict[tuple[int, int], float]:
    """Left-half overlaps of full-well modes, by quadrature: modes 1, 2, 4."""
    out = {}
    for j, k in ((1, 1), (1, 2), (1, 4), (2, 2), (2, 4), (4, 4)):
        out[(j, k)] = quadrature(
            lambda x, j=j, k=k: 2.0 * math.sin(j * math.pi * x) * math.sin(k * math.pi * x),
            0.0, 0.5, tol)
    return out


def _probe_sides(weights: np.ndarray, integrals: dict, definition: str) -> tuple[float, float, float]:
    alpha, beta, gamma = weights
    left = (alpha * integrals[(1, 1)] + beta * integrals[(1, 2)] + gamma * integrals[(1, 4)])
    full = alpha  # modes 2 and 4 are orthogonal to the reference ground state
    right = full - left
    if definition == RAW_HALVES:
        return left, right, full
    # renormalized: divide by the root product of the compartment probabilities
    p_ref_left = integrals[(1, 1)]
    p_cand_left = (alpha ** 2 * integrals[(1, 1)] + beta ** 2 * integrals[(2, 2)]
                   + gamma ** 2 * integrals[(4, 4)]
                   + 2.0 * (alpha * beta * integrals[(1, 2)]
                            + alpha * gamma * integrals[(1, 4)]
                            + beta * gamma * integrals[(2, 4)]))
    p_ref_right = 1.0 - p_ref_left
    p_cand_right = 1.0 - p_cand_left
    if min(p_cand_left, p_cand_right) <= 0.0:
        raise NumericalError("candidate state has no support in one compartment")
    return (left / math.sqrt(p_ref_left * p_cand_left),
            right / math.sqrt(p_ref_right * p_cand_right),
            full)


def _bisect(f, lo: float, hi: float, tol: float = 1e-10) -> float | None:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def matched_pair_probe(weights: tuple[float, float, float],
                       definition: str = RAW_HALVES,
                       bracket: tuple[float, float] = (-8.0, 8.0)) -> MatchedPairReport:
    """Probe whether a (1, 2, 4)-mode candidate splits its overlap evenly.

    The candidate alpha*mode1 + beta*mode2 + gamma*mode4 is normalized and
    compared against the pure ground state across a midpoint barrier.  The
    probe reports the per-side overlaps of the given weights and solves, by
    bisection on gamma/beta with alpha and beta held fixed, for the ratio
    that equalizes the two sides under the chosen definition.
    """
    if definition not in (RAW_HALVES, RENORMALIZED_HALVES):
        raise DomainError(f"definition must be {RAW_HALVES!r} or {RENORMALIZED_HALVES!r}")
    raw = np.asarray(weights, dtype=float)
    if raw.shape != (3,):
        raise DomainError("weights must be a triple (alpha, beta, gamma)")
    norm = float(np.linalg.norm(raw))
    if norm == 0.0:
        raise DomainError("weights must not all vanish")
    unit = raw / norm

    integrals = _half_integrals()
    left, right, full = _probe_sides(unit, integrals, definition)
    left, right, full = float(left), float(right), float(full)
    unit_weights = tuple(float(w) for w in unit)
    sides_balanced = bool(abs(left - right) <= BALANCE_TOL)

    alpha, beta, gamma = (float(w) for w in raw)
    if beta == 0.0:
        return MatchedPairReport(
            definition=definition, weights=unit_weights, full_overlap=full,
            left_overlap=left, right_overlap=right, sides_balanced=sides_balanced,
            balanced_ratio=None, candidate_ratio=None, candidate_balances=None,
            note="beta = 0: the gamma/beta ratio is undefined")

    def imbalance(ratio: float) -> float:
        trial = np.array([alpha, beta, ratio * beta], dtype=float)
        trial /= np.linalg.norm(trial)
        l, r, _ = _probe_sides(trial, integrals, definition)
        return l - r

    root = _bisect(imbalance, bracket[0], bracket[1])
    candidate_ratio = gamma / beta
    candidate_balances = bool(abs(imbalance(candidate_ratio)) <= BALANCE_TOL)
    note = "" if root is not None else (
        f"no sign change of the side imbalance in the bracket {bracket}")
    return MatchedPairReport(
        definition=definition, weights=unit_weights, full_overlap=full,
        left_overlap=left, right_overlap=right, sides_balanced=sides_balanced,
        balanced_ratio=root, candidate_ratio=candidate_ratio,
        candidate_balances=candidate_balances, note=note)
