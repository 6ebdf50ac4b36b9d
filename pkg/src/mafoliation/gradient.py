"""The complex gradient field Z, its least-squares extension, and diagnostics.

Z solves sum_mu Z^mu rho_{mu nubar} = rho_nubar, i.e. H^T Z = conj(grad).
On the full-rank stratum this is a direct solve; across degenerate points the
minimum-norm least-squares solution is used, validated by the achieved system
residual and by the Euler identity Z(rho) = rho.

Real-field conventions (kappa = 1): the flows below use the standard
identification of a (1,0)-field with a real field via zdot = V(z):

* X (real part): zdot = Z/2, so rho grows like e^t along the X flow.
* Y (imaginary part): zdot = iZ/2; preserves rho, and makes the leaf map
  (t, s) -> flow_X(t, flow_Y(s, .)) holomorphic in t + is.
* THETA (level-set orbit field): zdot = iZ, the real field i(Z - Zbar);
  same orbits as Y at twice the speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .levi import (
    DEFAULT_TOL_RANK,
    Stratum,
    fields_at,
    fields_at_many,
    levi_data,
)

DEFAULT_TOL = 1e-8
# SVD cutoff for the minimum-norm solve. Deliberately near machine scale and
# decoupled from the inconsistency tolerance: a hard threshold at 1e-8 would
# zero out consistent small-singular-value directions near the degenerate set
# and create O(|z|) jumps in the extended field.
LSTSQ_RCOND = 1e-12

DIRECT_SOLVE = "direct-solve"
LEAST_SQUARES = "least-squares-extension"


class SingularHessianError(ValueError):
    """Hessian is rank-deficient under the rank tolerance; use extended_gradient."""


class RealFieldKind(Enum):
    """Real vector fields derived from Z, as zdot multipliers on Z."""

    X = "x"
    Y = "y"
    THETA = "theta"

    @property
    def multiplier(self):
        return {"x": 0.5, "y": 0.5j, "theta": 1j}[self.value]


@dataclass(frozen=True)
class GradientSample:
    """Z at a point plus the residuals certifying it."""

    point: np.ndarray
    Z: np.ndarray
    method: str
    euler_residual: float        # |sum Z^mu rho_mu - rho|
    system_residual: float       # ||H^T Z - conj(grad)||
    consistent: bool = True


def _euler_residual(z_field, grad, rho):
    return float(abs(z_field @ grad - rho))


def complex_gradient(p, z, tol_rank=DEFAULT_TOL_RANK):
    """Direct solve of H^T Z = conj(grad); requires the point to be in the
    full-rank stratum under tol_rank."""
    rho, grad, hess = fields_at(p, z)
    eig = np.linalg.eigvalsh(hess)
    scale = max(1.0, float(np.max(np.abs(eig))))
    if np.count_nonzero(np.abs(eig) > tol_rank * scale) < p.dim:
        raise SingularHessianError(
            "Hessian is singular under the rank tolerance; use extended_gradient"
        )
    gbar = grad.conj()
    z_field = np.linalg.solve(hess.T, gbar)
    sys_res = float(np.linalg.norm(hess.T @ z_field - gbar))
    return GradientSample(
        point=np.asarray(z, dtype=complex).ravel(),
        Z=z_field,
        method=DIRECT_SOLVE,
        euler_residual=_euler_residual(z_field, grad, rho),
        system_residual=sys_res,
    )


def extended_gradient(p, z, tol=DEFAULT_TOL):
    """Minimum-norm least-squares Z across the degenerate set. Requires rho > 0.

    The sample is flagged inconsistent when the achieved system residual
    exceeds tol * max(1, ||conj(grad)||).
    """
    rho, grad, hess = fields_at(p, z)
    if rho <= 0:
        raise ValueError(f"rho(z) = {rho} <= 0; outside the domain")
    gbar = grad.conj()
    z_field = np.linalg.lstsq(hess.T, gbar, rcond=LSTSQ_RCOND)[0]
    sys_res = float(np.linalg.norm(hess.T @ z_field - gbar))
    ok = sys_res <= tol * max(1.0, float(np.linalg.norm(gbar)))
    return GradientSample(
        point=np.asarray(z, dtype=complex).ravel(),
        Z=z_field,
        method=LEAST_SQUARES,
        euler_residual=_euler_residual(z_field, grad, rho),
        system_residual=sys_res,
        consistent=ok,
    )


def gradient_vector(p, z, tol=DEFAULT_TOL):
    """Z as a bare array, fast path for flow integration.

    Tries the direct solve and falls back to the least-squares extension when
    the solve fails or leaves a residual; identical values to
    extended_gradient wherever both are defined.
    """
    _, grad, hess = fields_at(p, z)
    gbar = grad.conj()
    try:
        z_field = np.linalg.solve(hess.T, gbar)
        if np.all(np.isfinite(z_field)):
            res = np.linalg.norm(hess.T @ z_field - gbar)
            if res <= tol * max(1.0, np.linalg.norm(gbar)):
                return z_field
    except np.linalg.LinAlgError:
        pass
    return np.linalg.lstsq(hess.T, gbar, rcond=LSTSQ_RCOND)[0]


def gradient_field(p, points, tol=DEFAULT_TOL):
    """Batched Z over an (N, n) array; per-row least-squares fallback on
    singular or inconsistent rows."""
    pts = np.asarray(points, dtype=complex)
    _, grad, hess = fields_at_many(p, pts)
    gbar = grad.conj()
    ht = hess.transpose(0, 2, 1)
    out = np.empty_like(gbar)
    det = np.linalg.det(ht)
    good = det != 0
    bad = ~good
    if np.any(good):
        try:
            out[good] = np.linalg.solve(ht[good], gbar[good][..., None])[..., 0]
            res = np.linalg.norm(
                np.einsum("nij,nj->ni", ht[good], out[good]) - gbar[good], axis=1
            )
            limit = tol * np.maximum(1.0, np.linalg.norm(gbar[good], axis=1))
            retry = np.zeros(len(pts), dtype=bool)
            retry[np.nonzero(good)[0]] = (res > limit) | ~np.isfinite(res)
            bad = bad | retry
        except np.linalg.LinAlgError:
            bad = np.ones(len(pts), dtype=bool)
    for i in np.nonzero(bad)[0]:
        out[i] = np.linalg.lstsq(ht[i], gbar[i], rcond=LSTSQ_RCOND)[0]
    return out


def euler_residual_scan(p, samples):
    """Max |Z(rho) - rho| of the extended gradient over the samples."""
    samples = np.asarray(samples, dtype=complex)
    if samples.size == 0:
        raise ValueError("empty sample set")
    worst = 0.0
    for z in samples:
        worst = max(worst, extended_gradient(p, z).euler_residual)
    return worst


@dataclass
class CrReport:
    """Finite-difference holomorphy scan: max |d Z^mu / d zbar^nu| estimate."""

    max_residual: float
    worst_point: np.ndarray | None
    mixed_stratum_points: list = field(default_factory=list)


def cr_scan(p, samples, h=1e-4, tol=DEFAULT_TOL, tol_rank=DEFAULT_TOL_RANK):
    """Central-difference estimate of the antiholomorphic derivatives of Z.

    Stencil points are always evaluated with the extended gradient; samples
    whose stencil crosses into a different stratum are recorded (flagged, not
    fatal). Stencil points must stay inside {rho > 0}.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim == 1:
        samples = samples[None, :]
    n = p.dim
    report = CrReport(max_residual=0.0, worst_point=None)
    for zpt in samples:
        base_stratum = levi_data(p, zpt, tol_rank).stratum
        mixed = False
        worst_here = 0.0
        for nu in range(n):
            e_nu = np.zeros(n, dtype=complex)
            e_nu[nu] = 1.0
            vals = {}
            for tag, delta in (("xp", h), ("xm", -h), ("yp", 1j * h), ("ym", -1j * h)):
                w = zpt + delta * e_nu
                vals[tag] = extended_gradient(p, w, tol).Z
                if levi_data(p, w, tol_rank).stratum is not base_stratum:
                    mixed = True
            dx = (vals["xp"] - vals["xm"]) / (2 * h)
            dy = (vals["yp"] - vals["ym"]) / (2 * h)
            dzbar = 0.5 * (dx + 1j * dy)
            worst_here = max(worst_here, float(np.max(np.abs(dzbar))))
        if mixed:
            report.mixed_stratum_points.append(np.array(zpt))
        if worst_here > report.max_residual:
            report.max_residual = worst_here
            report.worst_point = np.array(zpt)
    return report


def cr_residual(p, samples, h=1e-4, tol=DEFAULT_TOL):
    """Max over samples, components and directions of the estimated d Z / d zbar."""
    return cr_scan(p, samples, h=h, tol=tol).max_residual


@dataclass
class ThetaOrbitResult:
    """Drift of det(H) and rho along a level-set orbit of the Theta field."""

    skipped: bool
    reason: str
    max_abs_det: float
    max_rho_drift: float


def theta_orbit_det_check(
    p, z0, t_max=5.0, steps=5000, tol=DEFAULT_TOL, tol_rank=DEFAULT_TOL_RANK
):
    """Integrate zdot = iZ(z) from a degenerate point and track |det H| and rho.

    The orbit field is the real vector field i(Z - Zbar); it is tangent to the
    level set of rho, and det H should stay zero along the orbit when it
    starts at a degenerate point. Non-degenerate starting points are reported
    as skipped rather than failed.
    """
    base = levi_data(p, z0, tol_rank)
    if base.rho <= 0:
        raise ValueError(f"rho(z0) = {base.rho} <= 0; outside the domain")
    if base.stratum is Stratum.STRICTLY_PSH:
        return ThetaOrbitResult(
            skipped=True,
            reason="starting point is in the full-rank stratum (det H not small)",
            max_abs_det=abs(base.det_hessian),
            max_rho_drift=0.0,
        )
    h = t_max / steps
    z = np.asarray(z0, dtype=complex).ravel().copy()
    mult = RealFieldKind.THETA.multiplier

    def vel(w):
        return mult * gradient_vector(p, w, tol)

    max_det = abs(base.det_hessian)
    max_drift = 0.0
    rho0 = base.rho
    for _ in range(steps):
        k1 = vel(z)
        k2 = vel(z + 0.5 * h * k1)
        k3 = vel(z + 0.5 * h * k2)
        k4 = vel(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)):
            raise ValueError("integrator step failure: non-finite state")
        rho, _, hess = fields_at(p, z)
        if rho <= 0:
            raise ValueError("orbit exited the domain {rho > 0}")
        max_det = max(max_det, abs(np.linalg.det(hess)))
        max_drift = max(max_drift, abs(rho - rho0))
    return ThetaOrbitResult(
        skipped=False, reason="", max_abs_det=float(max_det), max_rho_drift=float(max_drift)
    )


def zero_field_norms(p, samples, tol=DEFAULT_TOL):
    """||Z|| at each sample; used to probe where the gradient field vanishes."""
    pts = np.asarray(samples, dtype=complex)
    field_vals = gradient_field(p, pts, tol)
    return np.linalg.norm(field_vals, axis=1)
