"""Interior values from characteristic data: the integral formulas.

Flat space: the value of a massless field at q inside the cone of p0 is
a single integral over the section sigma(q) of the radial derivative of
the lowest-weight datum plus a rho multiple, against products of the
section frame's iota.  The spin-1/2 unprimed and primed halves use the
zeta_0 and xi^{1'} data columns; spin n/2 uses phi_0 with the (n+1) rho
coefficient.  All spinor accumulation happens in the fixed global frame
(parallel transport is trivial here), and the result is expressed in the
standard spin basis at q.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cone import SphereGrid, build_section
from .errors import GeometryError
from .nulldata import ConeData, radial_derivative as _data_radial_derivative
from .spinor import (DiracSpinorValue, SymSpinorValue, lower_comps,
                     sym_components, to_matrix)

__all__ = ["QuadratureSpec", "ReconstructionResult", "reconstruct_dirac",
           "reconstruct_spin_n", "reconstruct_maxwell",
           "reconstruct_curved_singular", "convergence_study"]

_STD_O = np.array([1.0, 0.0], dtype=complex)
_STD_IOTA = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution and method switches for one reconstruction.

    radial_fd "analytic" defers to the data's own derivative (exact
    callback or its builtin fallback); "richardson" forces a two-level
    central difference of the values with step fd_step, the same code
    path for callback and grid data.  rho_variant selects the
    rho-coefficient in the integrand: "penrose" uses (n+1) rho, the
    "reduced" variant drops one rho (n=1: single rho), kept selectable
    for the normalization audit.
    """

    n_theta: int
    n_phi: int
    chart_mode: str = "double"
    cap: float = 0.0
    radial_fd: str = "analytic"
    fd_step: float = 1e-3
    rho_variant: str = "penrose"

    def __post_init__(self):
        if self.n_theta < 4 or self.n_phi % 2 or self.n_phi < 8:
            raise ValueError("need n_theta >= 4 and even n_phi >= 8")
        if self.radial_fd not in ("analytic", "richardson"):
            raise ValueError(f"unknown radial_fd {self.radial_fd!r}")
        if self.rho_variant not in ("penrose", "reduced"):
            raise ValueError(f"unknown rho_variant {self.rho_variant!r}")

    def grid(self) -> SphereGrid:
        return SphereGrid(self.n_theta, self.n_phi,
                          chart_mode=self.chart_mode, cap=self.cap)

    def halved(self) -> "QuadratureSpec":
        return QuadratureSpec(max(self.n_theta // 2, 4),
                              max(self.n_phi // 2, 8), self.chart_mode,
                              self.cap, self.radial_fd, self.fd_step,
                              self.rho_variant)


@dataclass
class ReconstructionResult:
    value: object                      # DiracSpinorValue or SymSpinorValue
    q: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _radial_derivative(data: ConeData, section, spec: QuadratureSpec):
    if spec.radial_fd == "analytic":
        return data.radial_derivative_on(section)
    h = spec.fd_step

    def central(step):
        up = data.evaluate(section.r0 + step, section.omega, section.o, section.iota)
        dn = data.evaluate(section.r0 - step, section.omega, section.o, section.iota)
        return (up - dn) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def _integrand_weights(section, spec: QuadratureSpec):
    return section.mu_sigma / (2.0 * math.pi * section.r)


def _rho_coefficient(n: int, spec: QuadratureSpec) -> float:
    return float(n + 1 if spec.rho_variant == "penrose" else n)


def _spin_n_tensor(p0, data: ConeData, n: int, q, spec: QuadratureSpec):
    """Rank-n symmetric tensor (global components) and node count."""
    section = build_section(p0, q, spec.grid())
    vals = data.evaluate_on(section)[:, 0]
    dvals = _radial_derivative(data, section, spec)[:, 0]
    coeff = _rho_coefficient(n, spec)
    scal = (dvals - coeff * section.rho * vals) * _integrand_weights(section, spec)
    scal = scal * (-1.0) ** n
    iota_low = lower_comps(section.iota)
    letters = "abcdefgh"[:n]
    subs = "x," + ",".join(f"x{c}" for c in letters) + "->" + letters
    tensor = np.einsum(subs, scal, *([iota_low] * n))
    return tensor, section.n_nodes


def _dirac_pair(p0, data: ConeData, q, spec: QuadratureSpec):
    """(phi_A lower, psi^{A'} upper) global components and node count."""
    section = build_section(p0, q, spec.grid())
    vals = data.evaluate_on(section)
    dvals = _radial_derivative(data, section, spec)
    coeff = _rho_coefficient(1, spec)
    w = _integrand_weights(section, spec)
    sc_zeta = (dvals[:, 0] - coeff * section.rho * vals[:, 0]) * w
    sc_xi = (dvals[:, 1] - coeff * section.rho * vals[:, 1]) * w
    iota_low = lower_comps(section.iota)
    iotabar_up = np.conj(section.iota)
    phi = -np.einsum("x,xa->a", sc_zeta, iota_low)
    psi = np.einsum("x,xa->a", sc_xi, iotabar_up)
    return phi, psi, section.n_nodes


def _order_doubling_estimate(data: ConeData, spec: QuadratureSpec, coarse_fn):
    """Difference against a half-resolution run; 0.0 when no coarser
    evaluation exists (spec at the floor, or data bound to its grid)."""
    if spec.halved() == spec:
        return 0.0
    if not data.is_analytic:
        return 0.0
    return coarse_fn()


def _diagnostics(grid: SphereGrid, n_nodes, estimate):
    return {"n_nodes": int(n_nodes),
            "excluded_solid_angle": grid.excluded_solid_angle,
            "error_estimate": float(estimate)}


def reconstruct_spin_n(p0, data: ConeData, n: int, q,
                       spec: QuadratureSpec) -> ReconstructionResult:
    """Value of the valence-n field at q from phi_0 on the cone of p0.

    Quadrature of (-1)^n (d phi_0/dr0 - (n+1) rho phi_0) iota_A..iota_F
    mu_sigma / (2 pi r) over sigma(q); the result is expressed in the
    standard spin basis at q.  The error estimate in the diagnostics is
    the difference against a half-resolution evaluation.
    """
    if n < 1:
        raise ValueError("valence must be at least 1")
    if data.kind != "spin":
        raise ValueError("spin reconstruction expects phi_0 data")
    q = np.asarray(q, dtype=float)
    tensor, n_nodes = _spin_n_tensor(p0, data, n, q, spec)

    def coarse():
        t, _ = _spin_n_tensor(p0, data, n, q, spec.halved())
        return float(np.max(np.abs(tensor - t)))

    estimate = _order_doubling_estimate(data, spec, coarse)
    value = sym_components(tensor, _STD_O, _STD_IOTA, basis_id="standard")
    return ReconstructionResult(value=value, q=q,
                                diagnostics=_diagnostics(spec.grid(), n_nodes, estimate))


def reconstruct_maxwell(p0, data: ConeData, q,
                        spec: QuadratureSpec) -> ReconstructionResult:
    """Electromagnetic spinor at q: the valence-2 case."""
    return reconstruct_spin_n(p0, data, 2, q, spec)


def reconstruct_dirac(p0, data: ConeData, q,
                      spec: QuadratureSpec) -> ReconstructionResult:
    """4-spinor value at q from the (zeta_0, xi^{1'}) data pair.

    The unprimed half integrates the zeta_0 column against -iota_A, the
    primed half the xi^{1'} column against +iotabar^{A'}, both with the
    2 rho coefficient and 1/(2 pi r) weight.
    """
    if data.kind != "dirac":
        raise ValueError("dirac reconstruction expects (zeta_0, xi^{1'}) data")
    q = np.asarray(q, dtype=float)
    phi, psi, n_nodes = _dirac_pair(p0, data, q, spec)

    def coarse():
        phi_c, psi_c, _ = _dirac_pair(p0, data, q, spec.halved())
        return float(max(np.max(np.abs(phi - phi_c)),
                         np.max(np.abs(psi - psi_c))))

    estimate = _order_doubling_estimate(data, spec, coarse)
    value = DiracSpinorValue(phi=phi, psi=psi)
    return ReconstructionResult(value=value, q=q,
                                diagnostics=_diagnostics(spec.grid(), n_nodes, estimate))


def convergence_study(p0, data: ConeData, q, oracle, specs,
                      kind: str = "spin", n: int = 1):
    """Error vs oracle and runtime for each quadrature spec.

    oracle: DiracSpinorValue for kind "dirac", else component array or
    SymSpinorValue for the valence-n field.  Returns a list of rows
    {n_theta, n_phi, error, runtime_s}; error is the max-abs component
    difference relative to the oracle's max-abs component.
    """
    if kind == "dirac":
        ref = np.concatenate([np.asarray(oracle.phi), np.asarray(oracle.psi)])
    else:
        comps = oracle.components if isinstance(oracle, SymSpinorValue) else oracle
        ref = np.asarray(comps, dtype=complex)
    scale = max(float(np.max(np.abs(ref))), 1e-300)
    rows = []
    for spec in specs:
        t0 = time.perf_counter()
        if kind == "dirac":
            res = reconstruct_dirac(p0, data, q, spec)
            got = np.concatenate([res.value.phi, res.value.psi])
        else:
            res = reconstruct_spin_n(p0, data, n, q, spec)
            got = res.value.components
        dt = time.perf_counter() - t0
        rows.append({"n_theta": spec.n_theta, "n_phi": spec.n_phi,
                     "error": float(np.max(np.abs(got - ref))) / scale,
                     "runtime_s": dt})
    return rows


# -- curved charts -----------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_GL_U = 0.5 * (_GL_NODES + 1.0)


def _omega_batch(chart, pts):
    flat_pts = pts.reshape(-1, 4)
    out = np.array([chart.omega(x) for x in flat_pts])
    return out.reshape(pts.shape[:-1])


def _curved_spin_tensor(chart, p0, data: ConeData, n: int, q,
                        spec: QuadratureSpec):
    """Singular-integral tensor on a conformally flat chart.

    Null geodesics of omega^2 eta are straight coordinate rays, so the
    section geometry is the flat one with relabeled affine parameters:
    r0 integrates omega^2 along the generator (normalized to l^0 = 1 at
    the vertex), the backward radius r and the transport coefficient k
    carry the chord average of omega^2 from q, and the area element
    picks up omega^2 at the section.  The adapted spin frame rescales
    the canonical one so l = o obar holds in orthonormal components;
    its r0-dependence adds -(n/2) dln(omega)/dr0 phi_0 to the radial
    derivative of the phi_0 scalar.
    """
    section = build_section(p0, q, spec.grid())
    inside = np.array([chart.contains(x) for x in section.p])
    if not np.all(inside):
        bad = np.flatnonzero(~inside)
        raise GeometryError(
            f"{bad.size} of {section.n_nodes} generators leave the chart "
            f"domain before the section; first failing direction "
            f"omega = {section.omega[bad[0]]}")
    ell = section.r0
    w_ang = section.mu_sigma / ell ** 2
    om0 = chart.omega(np.asarray(p0, dtype=float))
    omq = chart.omega(np.asarray(q, dtype=float))
    om_p = _omega_batch(chart, section.p)

    # curved affine label of the section along each generator
    rays = (p0[None, None, :]
            + (ell[:, None] * _GL_U[None, :])[:, :, None]
            * section.l[:, None, :])
    om2_ray = _omega_batch(chart, rays) ** 2
    r0_star = ell * (0.5 * om2_ray @ _GL_WEIGHTS) / om0 ** 2

    # chord average of omega^2 from q: van Vleck square root numerator
    chords = (q[None, None, :]
              + _GL_U[None, :, None] * (section.p - q[None, :])[:, None, :])
    om2_chord = _omega_batch(chart, chords) ** 2
    ibar = 0.5 * om2_chord @ _GL_WEIGHTS
    k = ibar / (2.0 * math.pi * om_p * omq)

    r = section.r * ibar * om0 ** 2 / om_p ** 2
    grads = np.array([chart.grad_ln_omega(x) for x in section.p])
    dln_om_dl = np.einsum("ni,ni->n", grads, section.l)
    rho = -(om0 ** 2 / om_p ** 2) * (dln_om_dl + 1.0 / ell)
    mu = om_p ** 2 * ell ** 2 * w_ang

    # adapted frame in orthonormal components: l = o obar along the generator
    o_s = (om0 / np.sqrt(om_p))[:, None] * section.o
    n_frame = (q[None, :] - section.p) * (ibar / (om_p * r))[:, None]
    nmat = to_matrix(n_frame.astype(complex))
    iota_s = np.einsum("nij,nj->ni", nmat, lower_comps(o_s).conj())

    vals = data.evaluate(r0_star, section.omega, o_s, iota_s)[:, 0]
    if spec.radial_fd == "analytic":
        dvals = _data_radial_derivative(data, r0_star, section.omega,
                                        o_s, iota_s)[:, 0]
    else:
        h = spec.fd_step

        def central(step):
            up = data.evaluate(r0_star + step, section.omega, o_s, iota_s)
            dn = data.evaluate(r0_star - step, section.omega, o_s, iota_s)
            return (up - dn) / (2.0 * step)

        dvals = ((4.0 * central(0.5 * h) - central(h)) / 3.0)[:, 0]
    # d/dr0 of the phi_0 scalar carries the frame rescaling
    dr0_ln_om = (om0 ** 2 / om_p ** 2) * dln_om_dl
    dvals = dvals - 0.5 * n * dr0_ln_om * vals

    coeff = _rho_coefficient(n, spec)
    scal = (dvals - coeff * rho * vals) * (-1.0) ** n * k * mu / r
    iota_low = lower_comps(iota_s)
    letters = "abcdefgh"[:n]
    subs = "x," + ",".join(f"x{c}" for c in letters) + "->" + letters
    tensor = np.einsum(subs, scal, *([iota_low] * n))
    extras = {
        "k_deviation": float(np.max(np.abs(k - 1.0 / (2.0 * math.pi)))),
        "area_measure_factor": float(np.median(mu / (k * r ** 2 * w_ang))),
    }
    return tensor, section.n_nodes, extras


def reconstruct_curved_singular(chart, p0, data: ConeData, n: int, q,
                                spec: QuadratureSpec) -> ReconstructionResult:
    """Singular part of the curved-chart value of the spin-n/2 field.

    Same quadrature as reconstruct_spin_n with r0, r, rho, k, the area
    element, and the section frame supplied by the chart geometry; the
    smooth tail of the curved representation is not included, so away
    from the flat chart the result is the two singular integrals only.
    On the flat chart it coincides with reconstruct_spin_n.

    The chart must carry a conformal factor (registry charts "flat" and
    "conformal"); the diagnostics report the largest deviation of k from
    its flat value 1/(2 pi) and the empirical conversion factor between
    the section measure mu_sigma and k r^2 dOmega (pi/2 for an on-axis
    flat configuration).
    """
    if n < 1:
        raise ValueError("valence must be at least 1")
    if data.kind != "spin":
        raise ValueError("spin reconstruction expects phi_0 data")
    if getattr(chart, "omega", None) is None or \
            getattr(chart, "grad_ln_omega", None) is None:
        raise ValueError("curved reconstruction needs a conformally flat "
                         "chart with omega and grad_ln_omega callables")
    p0 = np.asarray(p0, dtype=float)
    q = np.asarray(q, dtype=float)
    chart.require_inside(p0, "cone vertex")
    chart.require_inside(q, "evaluation point")
    tensor, n_nodes, extras = _curved_spin_tensor(chart, p0, data, n, q, spec)

    def coarse():
        t, _, _ = _curved_spin_tensor(chart, p0, data, n, q, spec.halved())
        return float(np.max(np.abs(tensor - t)))

    estimate = _order_doubling_estimate(data, spec, coarse)
    value = sym_components(tensor, _STD_O, _STD_IOTA, basis_id="standard")
    diag = _diagnostics(spec.grid(), n_nodes, estimate)
    diag.update(extras)
    return ReconstructionResult(value=value, q=q, diagnostics=diag)
