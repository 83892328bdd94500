"""Linear kinematic and static model of the six-DOF positioner.

Conventions fixed here and used everywhere else:

- task-space pose vectors are length-6 ``[x, y, z, rx, ry, rz]`` with
  translations in micrometers and rotations in microradians;
- actuator vectors are length-6 per-actuator input displacements in
  micrometers (voltage vectors use the same layout, in volts);
- the 6x6 input->output map ("jacobian") has rows in pose order, so rows
  1-3 are um/um and rows 4-6 are urad/um;
- the 6x6 output compliance matrix is in SI units (m/N, rad/N, m/N.m,
  rad/N.m blocks); deflections are converted to um/urad at this boundary;
- wrenches are ``[fx, fy, fz, mx, my, mz]`` in N and N.m.

All functions are pure and all inputs are treated as immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

POSE_LABELS = ("x", "y", "z", "rx", "ry", "rz")
POSE_UNITS = ("um", "um", "um", "urad", "urad", "urad")

# Condition-number bound above which the map is treated as numerically singular.
MAX_CONDITION = 1e6


def as_vector6(v, name="vector"):
    """Validate and return a finite length-6 float array."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (6,):
        raise ValidationError(f"{name} must have shape (6,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def as_matrix6(m, name="matrix"):
    """Validate and return a finite 6x6 float array."""
    arr = np.asarray(m, dtype=float)
    if arr.shape != (6, 6):
        raise ValidationError(f"{name} must have shape (6, 6), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class MobilityParams:
    """Mechanism counts for the mobility criterion.

    motion_space_dim: dimension of the motion space (3 planar, 6 spatial).
    n_links: number of links, including the fixed base.
    joint_dofs: per-joint freedom counts, one entry per joint.
    """

    motion_space_dim: int
    n_links: int
    joint_dofs: tuple[int, ...]

    def __post_init__(self):
        if self.motion_space_dim not in (3, 6):
            raise ValidationError(
                f"motion_space_dim must be 3 or 6, got {self.motion_space_dim}"
            )
        if self.n_links < 2:
            raise ValidationError(f"n_links must be >= 2, got {self.n_links}")
        if len(self.joint_dofs) == 0:
            raise ValidationError("joint_dofs must not be empty")
        for i, m in enumerate(self.joint_dofs):
            if not (1 <= int(m) <= self.motion_space_dim):
                raise ValidationError(
                    f"joint_dofs[{i}] = {m} outside [1, {self.motion_space_dim}]"
                )
        object.__setattr__(self, "joint_dofs", tuple(int(m) for m in self.joint_dofs))


def mobility(params: MobilityParams) -> int:
    """Degree-of-freedom count of the mechanism, exact integer arithmetic."""
    n_joints = len(params.joint_dofs)
    return params.motion_space_dim * (params.n_links - n_joints - 1) + sum(
        params.joint_dofs
    )


def jacobian_condition(jacobian) -> float:
    """2-norm condition number of the input->output map."""
    return float(np.linalg.cond(as_matrix6(jacobian, "jacobian")))


def forward_map(jacobian, inputs):
    """Map actuator displacements (um) to the stage pose (um / urad)."""
    J = as_matrix6(jacobian, "jacobian")
    u = as_vector6(inputs, "inputs")
    return J @ u


def inverse_map(jacobian, target):
    """Actuator displacements that produce ``target`` under the linear map.

    Solves the square system exactly (LAPACK LU with partial pivoting).
    Raises NumericalError when the map's condition number exceeds
    MAX_CONDITION, reporting the condition number in the message.
    """
    J = as_matrix6(jacobian, "jacobian")
    p = as_vector6(target, "target")
    cond = float(np.linalg.cond(J))
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise NumericalError(
            f"jacobian too ill-conditioned to invert (cond = {cond:.3e})"
        )
    return np.linalg.solve(J, p)


@dataclass(frozen=True)
class JacobianFit:
    """Result of the input/output regression.

    jacobian: fitted 6x6 map.
    intercept: per-axis constant term (um / urad); ~0 for a linear plant.
    residual_rms: per-axis RMS of the fit residuals.
    stderr: per-entry standard errors of the jacobian estimate
        (NaN when there are no residual degrees of freedom).
    n_samples: number of (input, output) pairs used.
    """

    jacobian: np.ndarray
    intercept: np.ndarray
    residual_rms: np.ndarray
    stderr: np.ndarray
    n_samples: int


def fit_jacobian(inputs, outputs) -> JacobianFit:
    """Least-squares fit of the 6x6 map from sampled input/output pairs.

    Each output axis is regressed on the six inputs plus an intercept
    column. The intercept is reported separately rather than folded into
    the map so that plant offsets are visible.

    Args:
        inputs: (n, 6) actuator displacement samples, um.
        outputs: (n, 6) measured pose samples, um / urad.

    Raises:
        ValidationError: fewer than 7 samples or mismatched shapes.
        NumericalError: rank-deficient design matrix.
    """
    U = np.asarray(inputs, dtype=float)
    Y = np.asarray(outputs, dtype=float)
    if U.ndim != 2 or U.shape[1] != 6:
        raise ValidationError(f"inputs must have shape (n, 6), got {U.shape}")
    if Y.shape != U.shape:
        raise ValidationError(
            f"outputs shape {Y.shape} does not match inputs shape {U.shape}"
        )
    n = U.shape[0]
    if n < 7:
        raise ValidationError(
            f"need at least 7 samples for a 6-input fit with intercept, got {n}"
        )
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(Y))):
        raise ValidationError("samples contain non-finite entries")

    X = np.hstack([U, np.ones((n, 1))])
    if np.linalg.matrix_rank(X) < 7:
        raise NumericalError(
            "input samples are rank deficient; cannot identify all 36 entries"
        )

    coef, _, _, _ = np.linalg.lstsq(X, Y, rcond=None)
    J = coef[:6, :].T
    intercept = coef[6, :].copy()

    resid = Y - X @ coef
    residual_rms = np.sqrt(np.mean(resid**2, axis=0))

    dof = n - 7
    if dof > 0:
        xtx_inv = np.linalg.inv(X.T @ X)
        sigma2 = np.sum(resid**2, axis=0) / dof  # per output axis
        # stderr[i, j]: uncertainty of entry (output i, input j)
        stderr = np.sqrt(np.outer(sigma2, np.diag(xtx_inv)[:6]))
    else:
        stderr = np.full((6, 6), np.nan)

    return JacobianFit(
        jacobian=J,
        intercept=intercept,
        residual_rms=residual_rms,
        stderr=stderr,
        n_samples=n,
    )


def output_deflection(compliance, wrench):
    """Stage deflection (um / urad) under an applied wrench (N, N.m).

    The compliance matrix is in SI units, so the raw product is in meters
    and radians; both convert to the task-space units by the same 1e6
    factor.
    """
    C = as_matrix6(compliance, "compliance")
    w = as_vector6(wrench, "wrench")
    return (C @ w) * 1e6


def required_actuator_force(input_stiffness_n_per_m: float, displacement_um: float) -> float:
    """Force (N) a single actuator must deliver for a given input displacement."""
    k = float(input_stiffness_n_per_m)
    d = float(displacement_um)
    if not np.isfinite(k) or k <= 0.0:
        raise ValidationError(f"input stiffness must be positive, got {k}")
    if not np.isfinite(d) or d < 0.0:
        raise ValidationError(f"displacement must be >= 0, got {d}")
    return k * d * 1e-6


@dataclass(frozen=True)
class ComplianceReport:
    """Validation summary for an output compliance matrix."""

    max_asymmetry_abs: float
    max_asymmetry_rel: float
    diagonal: np.ndarray
    diagonal_positive: bool
    symmetry_ok: bool
    asymmetry_tol: float

    @property
    def passed(self) -> bool:
        return self.diagonal_positive and self.symmetry_ok


# FEA-extracted compliance matrices show asymmetry in the 4th significant
# digit; 5% relative is the accepted noise band.
COMPLIANCE_ASYMMETRY_TOL = 0.05


def validate_compliance(compliance, asymmetry_tol: float = COMPLIANCE_ASYMMETRY_TOL) -> ComplianceReport:
    """Check symmetry and diagonal positivity of a compliance matrix.

    Asymmetry is measured as max|C_ij - C_ji| relative to the largest
    entry magnitude, tolerating numerically extracted matrices. Failures
    are reported, not raised.
    """
    C = as_matrix6(compliance, "compliance")
    asym = np.abs(C - C.T)
    max_abs = float(np.max(asym))
    scale = float(np.max(np.abs(C)))
    max_rel = max_abs / scale if scale > 0.0 else 0.0
    diag = np.diag(C).copy()
    return ComplianceReport(
        max_asymmetry_abs=max_abs,
        max_asymmetry_rel=max_rel,
        diagonal=diag,
        diagonal_positive=bool(np.all(diag > 0.0)),
        symmetry_ok=bool(max_rel <= asymmetry_tol),
        asymmetry_tol=asymmetry_tol,
    )
