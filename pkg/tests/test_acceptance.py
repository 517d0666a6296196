"""Acceptance gates for the whole artifact.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  Expected values are frozen from independent oracles
(quadrature, closed-form series arithmetic, explicit branch arithmetic), not
from the implementation under test.

Known red gate: criterion 2 requires the total probability deficit of the
ground-state midpoint split to stay below 3/(pi^2 N).  The exact deficit of
that split is 8/(pi^2 (2N+1)) + O(N^-3), about 4/(pi^2 N); only each single
compartment stays below the stated bound.  The gate is implemented exactly
as stated and fails by the corresponding factor of ~4/3 at every cutoff.
"""

import math
import subprocess
import sys

import numpy as np

from splitwell import (
    BinaryDetector,
    BoxState,
    Scenario,
    WellGeometry,
    combined_cost,
    evolve,
    helstrom_cost,
    inner_product,
    insertion_energy_diagnostics,
    matched_pair_probe,
    midpoint_coefficients_n1,
    quadrature,
    split,
    split_overlap,
)
from splitwell.discrimination import RAW_HALVES, RENORMALIZED_HALVES

GEOM = WellGeometry()
PHI_N2 = BoxState.pure(GEOM, 2)
PSI_N1 = BoxState.pure(GEOM, 1)
CHI_MIX = BoxState(GEOM, [1 / math.sqrt(2), 1 / math.sqrt(2)])
SQRT2 = math.sqrt(2.0)


def gate(number: int, description: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number:2d} [{status}] {description}{suffix}")
    assert ok, f"criterion {number} failed: {description}{suffix}"


def test_criterion_1_closed_forms_match_quadrature():
    """Midpoint closed forms reproduce quadrature projections for n = 1..64."""
    worst = 0.0
    for n in range(1, 65):
        b_left, b_right = midpoint_coefficients_n1(n)
        quad_left = quadrature(
            lambda x, n=n: SQRT2 * math.sin(math.pi * x) * 2.0 * math.sin(2 * n * math.pi * x),
            0.0, 0.5, 1e-13)
        quad_right = quadrature(
            lambda x, n=n: SQRT2 * math.sin(math.pi * x)
            * 2.0 * math.sin(2 * n * math.pi * (x - 0.5)),
            0.5, 1.0, 1e-13)
        worst = max(worst, abs(b_left - quad_left), abs(b_right - quad_right))
    gate(1, "closed-form coefficients vs quadrature, n = 1..64",
         worst <= 1e-10, f"max abs error {worst:.3e}")


def test_criterion_2_probability_conservation_bound():
    """Total deficit of the ground-state midpoint split vs the 3/(pi^2 N) bound."""
    measured = []
    ok = True
    for n_cut in (100, 1000, 10000):
        deficit = split(PSI_N1, 0.5, n_cut).truncation_residual
        bound = 3.0 / (math.pi ** 2 * n_cut)
        exact = 8.0 / (math.pi ** 2 * (2 * n_cut + 1))
        measured.append(f"N={n_cut}: |deficit|={deficit:.4e} vs bound {bound:.4e} "
                        f"(exact series tail {exact:.4e})")
        ok = ok and deficit <= bound
    gate(2, "probability conservation: total deficit <= 3/(pi^2 N_cut)",
         ok, "; ".join(measured))


def test_criterion_3_nodal_energy_conservation():
    """Nodal split: energy conserved, one coefficient of magnitude 1/sqrt(2) per side."""
    sp = split(PHI_N2, 0.5, 32)
    report = insertion_energy_diagnostics(sp, 32)
    leading_ok = (abs(abs(sp.left.coefficients[0]) - 1 / SQRT2) <= 1e-12
                  and abs(abs(sp.right.coefficients[0]) - 1 / SQRT2) <= 1e-12)
    others_ok = (np.max(np.abs(sp.left.coefficients[1:])) <= 1e-13
                 and np.max(np.abs(sp.right.coefficients[1:])) <= 1e-13)
    gate(3, "nodal midpoint split conserves energy with single 1/sqrt(2) modes",
         report.energy_conservation_gap <= 1e-9 and leading_ok and others_ok,
         f"energy gap {report.energy_conservation_gap:.2e}")


def test_criterion_4_divergence_law():
    """S_N/N -> 4 and fitted intercept near 2 + pi^2/4 for the non-nodal split."""
    report = insertion_energy_diagnostics(split(PSI_N1, 0.5, 1000), 1000)
    target_intercept = 2.0 + math.pi ** 2 / 4.0
    ratio_ok = all(abs(s[-1] / 1000.0 - 4.0) <= 0.05
                   for s in report.energy_partial_sums)
    intercept_ok = all(abs(c - target_intercept) <= 0.05 * target_intercept
                       for c in report.fit_intercepts)
    detail = (f"S_N/N = {report.energy_partial_sums[0][-1] / 1000.0:.6f}, "
              f"intercepts = {report.fit_intercepts[0]:.4f}/{report.fit_intercepts[1]:.4f} "
              f"vs {target_intercept:.4f}")
    gate(4, "linear divergence law of the insertion energy partial sums",
         ratio_ok and intercept_ok and report.divergence_class == "linear-divergent",
         detail)


def test_criterion_5_helstrom_baseline():
    """Closed-form Helstrom values at the reference point and along K = 1."""
    reference_ok = abs(helstrom_cost(0.5, 0.5) - 0.146446609) <= 1e-9
    grid_ok = all(
        abs(helstrom_cost(float(xi), 1.0) - min(float(xi), 1.0 - float(xi))) <= 1e-12
        for xi in np.linspace(0.0, 1.0, 101))
    gate(5, "Helstrom baseline closed form",
         reference_ok and grid_ok,
         f"C(1/2, 1/2) = {helstrom_cost(0.5, 0.5):.12f}")


def test_criterion_6_overlap_invariance():
    """Split overlap of the reference pair reproduces K = 1/2 and the side values."""
    overlap = split_overlap(split(PHI_N2, 0.5, 10000), split(CHI_MIX, 0.5, 10000))
    left_target = (0.5 + 4.0 / (3.0 * math.pi)) / SQRT2
    right_target = (0.5 - 4.0 / (3.0 * math.pi)) / SQRT2
    total_ok = abs(abs(overlap.total) ** 2 - 0.5) <= 2e-3
    sides_ok = (abs(overlap.left - left_target) <= 1e-4
                and abs(overlap.right - right_target) <= 1e-4)
    gate(6, "overlap invariance under insertion",
         total_ok and sides_ok,
         f"|total|^2 = {abs(overlap.total) ** 2:.6f}, "
         f"sides = {overlap.left.real:.7f}/{overlap.right.real:.7f}")


def test_criterion_7_cost_reduction_claim():
    """Side-channel strategy never exceeds the Helstrom bound on the full grid."""
    xis = [round(0.05 * i, 2) for i in range(1, 20)]
    epsilons = [round(0.05 * i, 2) for i in range(0, 11)]
    never_above = True
    equality_only_at_uninformative = True
    for xi in xis:
        for eps in epsilons:
            breakdown = combined_cost(
                Scenario(xi, PHI_N2, CHI_MIX, 0.5, BinaryDetector(eps, eps)), 64)
            gap = breakdown.helstrom_baseline - breakdown.combined_cost
            never_above = never_above and gap >= -1e-12
            if eps == 0.5:
                equality_only_at_uninformative &= abs(gap) <= 1e-9
            else:
                equality_only_at_uninformative &= gap > 1e-9

    # independent branch arithmetic: posteriors 0.1/0.9, both branches cost
    # 1/2 - 1/2 sqrt(1 - 4 * 0.1 * 0.9 * 0.5)
    oracle = 0.5 - 0.5 * math.sqrt(1.0 - 0.18)
    assert abs(oracle - 0.04723074309312916) <= 1e-15
    reference = combined_cost(
        Scenario(0.5, PHI_N2, CHI_MIX, 0.5, BinaryDetector(0.1, 0.1)), 64)
    reference_ok = abs(reference.combined_cost - oracle) <= 1e-8
    gate(7, "cost reduction below the Helstrom bound on the full grid",
         never_above and equality_only_at_uninformative and reference_ok,
         f"combined(xi=0.5, eps=0.1) = {reference.combined_cost:.9f} "
         f"vs branch arithmetic {oracle:.9f}")


def test_criterion_8_unitarity_and_revival():
    """Evolution preserves overlaps; full revival at t = 4 M L^2 / (pi hbar)."""
    rng = np.random.default_rng(41)
    overlaps_ok = True
    for _ in range(4):
        cu = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        cv = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        u = BoxState(GEOM, cu / np.linalg.norm(cu))
        v = BoxState(GEOM, cv / np.linalg.norm(cv))
        for t in (0.3, 2.2, 17.0):
            drift = abs(abs(inner_product(evolve(u, t), evolve(v, t)))
                        - abs(inner_product(u, v)))
            overlaps_ok = overlaps_ok and drift <= 1e-12

    revival_ok = True
    for geom in (GEOM, WellGeometry(x_left=-1.0, width=2.0, mass=3.0, hbar=0.5)):
        t_revival = 4.0 * geom.mass * geom.width ** 2 / (math.pi * geom.hbar)
        state = BoxState(geom, np.array([0.6, 0.0, 0.8j]))
        fidelity = abs(inner_product(state, evolve(state, t_revival))) ** 2
        revival_ok = revival_ok and abs(fidelity - 1.0) <= 1e-12
    gate(8, "unitarity and full-well revival", overlaps_ok and revival_ok)


def test_criterion_9_matched_pair_probe():
    """Raw-halves balance needs gamma/beta = 2.5; the probe reports on -2.1."""
    raw = matched_pair_probe((1.0, 1.0, -2.1), RAW_HALVES)
    renormalized = matched_pair_probe((1.0, 1.0, -2.1), RENORMALIZED_HALVES)
    ratio_ok = raw.balanced_ratio is not None and abs(raw.balanced_ratio - 2.5) <= 1e-9
    reports_ok = (raw.candidate_balances is not None
                  and renormalized.candidate_balances is not None)
    ratio_text = ("none" if raw.balanced_ratio is None
                  else f"{raw.balanced_ratio:.9f}")
    gate(9, "matched-pair probe",
         ratio_ok and reports_ok,
         f"raw balance ratio = {ratio_text}; ratio -2.1 balances: "
         f"raw-halves {raw.candidate_balances}, "
         f"renormalized-halves {renormalized.candidate_balances}")


def test_criterion_10_cli_determinism(tmp_path):
    """Two consecutive CLI runs of paper_baseline emit byte-identical CSVs."""
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        result = subprocess.run(
            [sys.executable, "-m", "splitwell", "run",
             "--config", "paper_baseline", "--out", str(out)],
            capture_output=True, text=True)
        assert result.returncode == 0, result.stderr
        outputs.append(out)
    names = sorted(p.name for p in outputs[0].glob("*.csv"))
    identical = all((outputs[0] / n).read_bytes() == (outputs[1] / n).read_bytes()
                    for n in names)
    gate(10, "CLI determinism across consecutive runs",
         identical and len(names) >= 4, f"{len(names)} CSV files compared")
