"""Weighted-homogeneity weights: recovery, verification, and flow evidence.

A potential is weighted homogeneous with weights c = (c_1, ..., c_n) when
rho(e^{c_1 L} z^1, ..., e^{c_n L} z^n) = |e^L|^2 rho(z) for every complex L.
Because L ranges over all complex numbers, every stored monomial (alpha, beta)
must satisfy both sum_j c_j alpha_j = 1 and sum_j c_j beta_j = 1 - two
equations, not their sum; collapsing them would wrongly accept mixed-bidegree
terms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .foliation import flow_points
from .gradient import DEFAULT_TOL, RealFieldKind, gradient_field
from .potential import evaluate

FEASIBLE_TOL = 1e-9


@dataclass(frozen=True)
class WeightVector:
    """Positive homogeneity weights plus a uniqueness flag."""

    weights: np.ndarray
    unique: bool


@dataclass(frozen=True)
class Equation:
    """One feasibility row: sum_j coeffs[j] * c_j = 1."""

    coeffs: tuple

    @property
    def label(self):
        parts = []
        for j, k in enumerate(self.coeffs):
            if k == 0:
                continue
            parts.append(f"c{j + 1}" if k == 1 else f"{k} c{j + 1}")
        lhs = " + ".join(parts) if parts else "0"
        return f"{lhs} = 1"


@dataclass(frozen=True)
class WeightAnalysis:
    """Full diagnosis of the weight feasibility system."""

    status: str                      # "ok" | "not_positive" | "infeasible"
    weights: np.ndarray | None
    unique: bool
    residual: float
    equations: tuple
    inconsistent_subset: tuple | None


def weight_equations(p):
    """Deduplicated equation rows from every stored monomial, deterministic order."""
    rows = set()
    for (alpha, beta) in p.terms:
        rows.add(tuple(alpha))
        rows.add(tuple(beta))
    ordered = sorted(rows, key=lambda r: (sum(r), tuple(-x for x in r)))
    return tuple(Equation(coeffs=r) for r in ordered)


def _lstsq_residual(rows):
    a = np.array(rows, dtype=float)
    rhs = np.ones(a.shape[0])
    sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
    return sol, float(np.max(np.abs(a @ sol - rhs)))


def _minimal_inconsistent_subset(equations, dim, tol):
    """Smallest inconsistent equation subset by brute force (desk scale).

    An inconsistent system has an irreducible inconsistent subsystem of at
    most rank+1 <= n+1 equations; fall back to the full set if enumeration
    would blow up.
    """
    m = len(equations)
    if m > 14:
        return equations
    rows = [eq.coeffs for eq in equations]
    for size in range(2, min(m, dim + 1) + 1):
        for combo in itertools.combinations(range(m), size):
            _, res = _lstsq_residual([rows[i] for i in combo])
            if res > tol:
                return tuple(equations[i] for i in combo)
    return equations


def analyze_weights(p, tol=FEASIBLE_TOL):
    """Solve the weight feasibility system and report the full diagnosis.

    Feasible underdetermined systems return the minimum-norm solution with
    unique=False. Feasible solutions with a non-positive entry are reported
    as "not_positive" rather than discarded.
    """
    equations = weight_equations(p)
    if not equations:
        return WeightAnalysis(
            status="infeasible",
            weights=None,
            unique=False,
            residual=math.inf,
            equations=equations,
            inconsistent_subset=equations,
        )
    a = np.array([eq.coeffs for eq in equations], dtype=float)
    rhs = np.ones(a.shape[0])
    sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
    residual = float(np.max(np.abs(a @ sol - rhs)))
    if residual > tol:
        return WeightAnalysis(
            status="infeasible",
            weights=None,
            unique=False,
            residual=residual,
            equations=equations,
            inconsistent_subset=_minimal_inconsistent_subset(equations, p.dim, tol),
        )
    unique = int(np.linalg.matrix_rank(a)) == p.dim
    status = "ok" if bool(np.all(sol > 0)) else "not_positive"
    return WeightAnalysis(
        status=status,
        weights=sol,
        unique=unique,
        residual=residual,
        equations=equations,
        inconsistent_subset=None,
    )


def find_weights(p):
    """Positive weight vector when the feasibility system admits one, else None."""
    analysis = analyze_weights(p)
    if analysis.status != "ok":
        return None
    return WeightVector(weights=analysis.weights, unique=analysis.unique)


def _weights_array(c):
    return np.asarray(getattr(c, "weights", c), dtype=float)


def verify_weights(p, c, z_samples, lam_samples):
    """Max relative residual of the homogeneity identity over samples.

    lam_samples should include values with nonzero imaginary part; purely
    real scalings cannot detect alpha/beta asymmetry.
    """
    weights = _weights_array(c)
    pts = np.asarray(z_samples, dtype=complex)
    worst = 0.0
    for lam in lam_samples:
        lam = complex(lam)
        scale = abs(np.exp(lam)) ** 2
        factors = np.exp(weights * lam)
        for z in pts:
            base = evaluate(p, z)
            moved = evaluate(p, factors * z)
            worst = max(worst, abs(moved - scale * base) / abs(base))
    return worst


def default_lambda_samples():
    """Eight scalings mixing real, imaginary and generic complex values."""
    return (
        1.0,
        1j,
        1.0 + 1j,
        -0.5 + 0.25j,
        2j,
        0.3,
        -1.0 + 0.7j,
        0.8 - 1.1j,
    )


def linear_field_agreement(p, c, z_samples, tol=DEFAULT_TOL):
    """Max ||Z(z) - c * z|| over the samples (the linear orbit field)."""
    weights = _weights_array(c)
    pts = np.asarray(z_samples, dtype=complex)
    z_field = gradient_field(p, pts, tol)
    return float(np.max(np.linalg.norm(z_field - weights * pts, axis=1)))


def rescale_to_level(p, z, r, tol=1e-14, max_iter=200):
    """Positive real s with rho(s z) = r, found by bracketing and bisection."""
    z = np.asarray(z, dtype=complex).ravel()
    if evaluate(p, z) <= 0:
        raise ValueError("need rho(z) > 0 to rescale onto a level set")

    def val(s):
        return evaluate(p, s * z) - r

    lo = hi = 1.0
    for _ in range(80):
        if val(hi) >= 0:
            break
        hi *= 2.0
    else:
        raise ValueError("could not bracket the level set from above")
    for _ in range(80):
        if val(lo) <= 0:
            break
        lo /= 2.0
    else:
        raise ValueError("could not bracket the level set from below")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        v = val(mid)
        if abs(v) <= tol * max(1.0, r):
            return mid * z
        if v > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi) * z


def flow_level_map_check(p, r1, r2, boundary_samples, step=1e-3, tol=DEFAULT_TOL):
    """Flow {rho = r1} samples along X for log(r2/r1) and measure the miss.

    Returns max |rho(endpoint) - r2| / r2. Samples must lie on {rho = r1}
    within 1e-8 relative.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("level values must be positive")
    pts = np.asarray(boundary_samples, dtype=complex)
    values = np.array([evaluate(p, z) for z in pts])
    off = np.max(np.abs(values - r1)) / r1
    if off > 1e-8:
        raise ValueError(
            f"samples are not on the level set rho = {r1}: worst relative offset {off:.3e}"
        )
    duration = math.log(r2 / r1)
    ends = flow_points(p, pts, duration, RealFieldKind.X, step=step, tol=tol)
    end_values = np.array([evaluate(p, z) for z in ends])
    return float(np.max(np.abs(end_values - r2)) / r2)
