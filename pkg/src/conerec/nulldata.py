"""Characteristic data on the cone and its tangential calculus.

ConeData stores the free data of a characteristic problem: the scalar
components phi_0 (optionally phi_0..phi_n for constraint checking), or
the pair (zeta_0, xi^{1'}) for the 4-spinor problem, either as an
analytic callback in (r0, omega) or sampled on a product grid of r0
nodes x sphere directions.  On top of it sit the generator derivative
d/dr0, the weight-lowering angular operator on sections, and the
constraint-relation residuals.

Component values are spin weighted, so every stored or returned array is
understood per node in the node's own chart (see cone.SphereGrid); the
weight (p, q) fixes the transition factor e^{i phi (p-q)} between
charts.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import cone
from .errors import CoverageError
from .cone import ConeSection, SphereGrid, TangentialDerivatives, ETA_DIAG
from .spinor import lower_comps

__all__ = [
    "ConeData", "WeightedScalarField", "radial_derivative", "eth_prime",
    "section_alpha", "section_spin_coefficients", "constraint_residual",
    "save_cone_data", "load_cone_data",
]


@dataclass
class WeightedScalarField:
    """Scalar samples on a section's direction nodes with weight (p, q).

    Under the basis rescaling o -> lam o, iota -> iota/lam the values
    pick up lam^p lambar^q; chart transitions are the special case
    lam = e^{-i phi}.
    """

    values: np.ndarray
    weight: tuple

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        p, q = self.weight
        if int(p) != p or int(q) != q:
            raise ValueError("weights must be integers")
        self.weight = (int(p), int(q))

    @property
    def spin_weight(self):
        return (self.weight[0] - self.weight[1]) / 2.0


class ConeData:
    """Characteristic data for valence n on C+(p0).

    kind "spin": component columns are (phi_0,) or (phi_0 .. phi_n).
    kind "dirac": columns are (zeta_0, xi^{1'}) (valence is 1).

    Analytic source: callbacks fn(r0, omega, o_up, iota_up) -> (N, ncomp)
    and optionally fn_dr0 with the same signature for the exact generator
    derivative; omitted, the derivative falls back to a Richardson
    difference in r0.  Grid source: values of shape
    (len(r0_nodes), n_nodes, ncomp) sampled on `grid`, interpolated along
    each generator by a cubic spline.  Support must stay away from the
    vertex: r0 at or below `r0_min` (grid: outside the node range) is an
    error.

    Grid values are stored in the canonical frame of the on-axis
    sections.  phi_0, zeta_0 and xi^{1'} contract only with o, so they
    read off unchanged in any section-adapted frame; the higher phi_j
    involve iota and are meaningful on the on-axis family, which is where
    the constraint checker samples them.
    """

    def __init__(self, valence, kind="spin", fn=None, fn_dr0=None,
                 grid=None, r0_nodes=None, values=None, r0_min=0.0):
        if valence < 1:
            raise ValueError("valence must be at least 1")
        if kind not in ("spin", "dirac"):
            raise ValueError(f"unknown kind {kind!r}")
        if kind == "dirac" and valence != 1:
            raise ValueError("the 4-spinor data pair is valence 1")
        self.valence = int(valence)
        self.kind = kind
        self.fn = fn
        self.fn_dr0 = fn_dr0
        self.r0_min = float(r0_min)
        if fn is None:
            if grid is None or r0_nodes is None or values is None:
                raise ValueError("grid data needs grid, r0_nodes and values")
            self.grid = grid
            self.r0_nodes = np.asarray(r0_nodes, dtype=float)
            if self.r0_nodes.ndim != 1 or self.r0_nodes.size < 4:
                raise ValueError("need at least 4 increasing r0 nodes")
            if np.any(np.diff(self.r0_nodes) <= 0):
                raise ValueError("r0 nodes must increase")
            if self.r0_nodes[0] <= 0:
                raise ValueError("data support must exclude the vertex")
            th = grid.angles()[0]
            self.values = np.asarray(values, dtype=complex)
            expect = (self.r0_nodes.size, th.size)
            if self.values.shape[:2] != expect:
                raise ValueError(f"values must have shape {expect} + (ncomp,)")
            if self.values.ndim == 2:
                self.values = self.values[:, :, None]
            self._spline = CubicSpline(self.r0_nodes, self.values, axis=0)
        else:
            self.grid = None
            self.r0_nodes = None
            self.values = None
            self._spline = None

    @property
    def is_analytic(self):
        return self.fn is not None

    @property
    def ncomp(self):
        if self.is_analytic:
            return 2 if self.kind == "dirac" else None   # fn decides for spin
        return self.values.shape[2]

    def _check_domain(self, r0, n_points):
        r0 = np.asarray(r0, dtype=float)
        if r0.ndim == 0:
            r0 = np.full(n_points, float(r0))
        if self.is_analytic:
            if np.any(r0 <= self.r0_min):
                raise CoverageError("evaluation point too close to the vertex")
        else:
            if r0.size != self.values.shape[1]:
                raise ValueError("grid data evaluates per direction node; "
                                 f"expected {self.values.shape[1]} radii")
            lo, hi = self.r0_nodes[0], self.r0_nodes[-1]
            if np.any(r0 < lo) or np.any(r0 > hi):
                raise CoverageError("r0 outside the sampled generator range")
        return r0

    def _check_grid(self, grid):
        g = self.grid
        if g is not None and (g.n_theta != grid.n_theta or g.n_phi != grid.n_phi
                              or g.chart_mode != grid.chart_mode
                              or g.cap != grid.cap):
            raise ValueError("section grid does not match the data grid")

    def _spline_eval(self, r0, deriv=False):
        # per-node Horner on the cubic pieces; vectorized over nodes
        idx = np.clip(np.searchsorted(self.r0_nodes, r0) - 1,
                      0, self.r0_nodes.size - 2)
        dx = (r0 - self.r0_nodes[idx])[:, None]
        nodes = np.arange(r0.size)
        c = self._spline.c[:, idx, nodes, :]          # (4, N, ncomp)
        if deriv:
            return (3.0 * c[0] * dx + 2.0 * c[1]) * dx + c[2]
        return ((c[0] * dx + c[1]) * dx + c[2]) * dx + c[3]

    def evaluate(self, r0, omega, o_up, iota_up):
        """Component values at (r0, omega) in the supplied node frame."""
        r0 = self._check_domain(r0, np.asarray(omega).shape[0])
        if self.is_analytic:
            return np.asarray(self.fn(r0, omega, o_up, iota_up), dtype=complex)
        return self._spline_eval(r0)

    def radial_derivative(self, r0, omega, o_up, iota_up):
        """d/dr0 of every component at fixed direction.

        Analytic data uses the exact callback when given, otherwise a
        two-level Richardson central difference; grid data evaluates the
        spline derivative.
        """
        r0 = self._check_domain(r0, np.asarray(omega).shape[0])
        if not self.is_analytic:
            return self._spline_eval(r0, deriv=True)
        if self.fn_dr0 is not None:
            return np.asarray(self.fn_dr0(r0, omega, o_up, iota_up), dtype=complex)
        h = 1e-2 * np.maximum(np.abs(r0), 1.0)
        if np.any(r0 - h <= self.r0_min):
            raise CoverageError("differencing stencil reaches the vertex")

        def central(step):
            up = np.asarray(self.fn(r0 + step, omega, o_up, iota_up), dtype=complex)
            dn = np.asarray(self.fn(r0 - step, omega, o_up, iota_up), dtype=complex)
            return (up - dn) / (2.0 * step[:, None])

        d_h = central(h)
        d_h2 = central(0.5 * h)
        return (4.0 * d_h2 - d_h) / 3.0

    def evaluate_on(self, section: ConeSection):
        """All components on a section (nodes in their own charts)."""
        self._check_grid(section.grid)
        return self.evaluate(section.r0, section.omega, section.o, section.iota)

    def radial_derivative_on(self, section: ConeSection):
        self._check_grid(section.grid)
        return self.radial_derivative(section.r0, section.omega,
                                      section.o, section.iota)


def _frame_from_omega(omega):
    """Canonical on-axis frame at given unit directions (e1 polar)."""
    omega = np.asarray(omega, dtype=float)
    theta = np.arccos(np.clip(omega[..., 0], -1.0, 1.0))
    phi = np.mod(np.arctan2(omega[..., 2], omega[..., 1]), 2.0 * math.pi)
    chart = (theta > math.pi / 2).astype(np.uint8)
    return cone.spin_basis_field(theta, phi, chart)


def radial_derivative(data: ConeData, r0, omega, o_up=None, iota_up=None):
    """Generator derivative of the data at (r0, omega).

    Frame arguments default to the canonical frame at omega.
    """
    if o_up is None or iota_up is None:
        o_up, iota_up = _frame_from_omega(omega)
    return data.radial_derivative(r0, omega, o_up, iota_up)


# ---------------------------------------------------------------------------
# tangential operators


def _chart_pair(values, phi, chart, weight):
    """Both chart representations of per-node own-chart values."""
    p, q = weight
    s = p - q
    if s == 0:
        return values, values
    fac = np.exp(1j * s * phi)
    in_b = chart == 1
    vals_a = np.where(in_b, values * fac, values)
    vals_b = np.where(in_b, values, values / fac)
    return vals_a, vals_b


def _mbar_coefficients(section: ConeSection, td: TangentialDerivatives):
    """(a, b) with mbar = a t_theta + b t_phi per node, plus the tangents."""
    n_nodes = section.n_nodes
    t_th = np.empty((n_nodes, 4))
    t_ph = np.empty((n_nodes, 4))
    for comp in range(4):
        fld = section.p[:, comp].astype(complex)
        t_th[:, comp] = td.d_theta(fld).real
        t_ph[:, comp] = td.d_phi(fld).real
    g11 = -np.einsum("ni,ij,nj->n", t_th, ETA_DIAG, t_th)
    g22 = -np.einsum("ni,ij,nj->n", t_ph, ETA_DIAG, t_ph)
    g12 = -np.einsum("ni,ij,nj->n", t_th, ETA_DIAG, t_ph)
    mbar = np.conj(section.m)
    b1 = -np.einsum("ni,ij,nj->n", t_th, ETA_DIAG, mbar)
    b2 = -np.einsum("ni,ij,nj->n", t_ph, ETA_DIAG, mbar)
    det = g11 * g22 - g12 ** 2
    a = (g22 * b1 - g12 * b2) / det
    b = (g11 * b2 - g12 * b1) / det
    return a, b


class _SectionCalculus:
    """Shared machinery: tangential derivative along mbar on a section."""

    def __init__(self, section: ConeSection):
        self.section = section
        self.td = TangentialDerivatives(section.grid)
        self.a, self.b = _mbar_coefficients(section, self.td)
        self._in_b = section.chart == 1
        self._phi = section.phi

    def _d_own(self, values, weight):
        vals_a, vals_b = _chart_pair(values, self._phi, self.section.chart, weight)
        d_th = np.where(self._in_b, self.td.d_theta(vals_b), self.td.d_theta(vals_a))
        d_ph = np.where(self._in_b, self.td.d_phi(vals_b), self.td.d_phi(vals_a))
        return d_th, d_ph

    def grad_mbar(self, values, weight):
        """mbar^a d_a of per-node own-chart values of the given weight."""
        d_th, d_ph = self._d_own(values, weight)
        return self.a * d_th + self.b * d_ph

    def grad_m(self, values, weight):
        """m^a d_a; m carries the conjugate tangent coefficients."""
        d_th, d_ph = self._d_own(values, weight)
        return np.conj(self.a) * d_th + np.conj(self.b) * d_ph


def section_alpha(section: ConeSection, calculus: _SectionCalculus | None = None):
    """Spin coefficient alpha = iota^A grad_mbar o_A from the section frames.

    The components of o_A are differentiated tangentially as weight (1,0)
    scalars (the flat ambient connection vanishes in these coordinates).
    """
    calc = calculus or _SectionCalculus(section)
    o_low = lower_comps(section.o)
    iota_up = section.iota
    acc = np.zeros(section.n_nodes, dtype=complex)
    for comp in range(2):
        acc += iota_up[:, comp] * calc.grad_mbar(o_low[:, comp], (1, 0))
    return acc


def section_spin_coefficients(section: ConeSection,
                              calculus: _SectionCalculus | None = None):
    """Spin coefficients of the section frame needed by the cone calculus.

    Returns a dict with per-node arrays: rho = o^A grad_mbar o_A is
    computed tangentially, as are alpha, beta = iota^A grad_m o_A and
    sigma' = -iota^A grad_mbar iota_A.  The canonical frame does not
    depend on r0 along a generator, so its kappa = o^A grad_l o_A,
    epsilon = iota^A grad_l o_A and tau' = -iota^A grad_l iota_A vanish
    identically; they are returned as exact zeros rather than differenced
    noise.
    """
    calc = calculus or _SectionCalculus(section)
    o_low = lower_comps(section.o)
    i_low = lower_comps(section.iota)
    n = section.n_nodes
    rho = np.zeros(n, dtype=complex)
    alpha = np.zeros(n, dtype=complex)
    beta = np.zeros(n, dtype=complex)
    sigma_p = np.zeros(n, dtype=complex)
    for comp in range(2):
        d_th, d_ph = calc._d_own(o_low[:, comp], (1, 0))
        d_o = calc.a * d_th + calc.b * d_ph
        d_o_m = np.conj(calc.a) * d_th + np.conj(calc.b) * d_ph
        d_i = calc.grad_mbar(i_low[:, comp], (-1, 0))
        rho += section.o[:, comp] * d_o
        alpha += section.iota[:, comp] * d_o
        beta += section.iota[:, comp] * d_o_m
        sigma_p -= section.iota[:, comp] * d_i
    zeros = np.zeros(n, dtype=complex)
    return {"rho": rho, "alpha": alpha, "beta": beta, "sigma_prime": sigma_p,
            "kappa": zeros, "epsilon": zeros, "tau_prime": zeros.copy()}


def eth_prime(f: WeightedScalarField, section: ConeSection,
              alpha=None, beta=None, calculus: _SectionCalculus | None = None
              ) -> WeightedScalarField:
    """Weight-lowering angular operator on a section.

    eth' f = grad_mbar f - p alpha f - q betabar f for f of weight (p, q);
    the result has weight (p-1, q+1).  betabar = conj(iota^A grad_m o_A)
    is the primed-frame connection coefficient in the mbar direction, the
    choice fixed by requiring exact covariance under constant frame
    rescalings and the vanishing of the total section integral for weight
    (1,-1) arguments.  Both coefficients default to values computed from
    the section's own frame field.
    """
    if section.grid.n_phi < 8:
        raise ValueError("need at least 8 nodes per ring")
    calc = calculus or _SectionCalculus(section)
    p, q = f.weight
    if alpha is None and p != 0:
        alpha = section_alpha(section, calc)
    if beta is None and q != 0:
        o_low = lower_comps(section.o)
        beta = np.zeros(section.n_nodes, dtype=complex)
        for comp in range(2):
            beta += section.iota[:, comp] * calc.grad_m(o_low[:, comp], (1, 0))
    vals = f.values
    out = calc.grad_mbar(vals, f.weight)
    if p != 0:
        out = out - p * alpha * vals
    if q != 0:
        out = out - q * np.conj(beta) * vals
    return WeightedScalarField(out, (p - 1, q + 1))


# ---------------------------------------------------------------------------
# constraint residuals


def constraint_residual(data: ConeData, p0, s_values, grid: SphereGrid | None = None):
    """Max residual of the component relations along the cone, per j.

    The data must carry all components phi_0..phi_n.  On each section
    sigma(p0 + (s,0,0,0)) the relation

      p. phi_j - eth' phi_{j-1} = (j-1) sigma' phi_{j-2} - j tau' phi_{j-1}
                                  + (n-j+1) rho phi_j - (n-j) kappa phi_{j+1}

    is evaluated for j = 1..n with every spin coefficient taken from the
    section frame (p. phi_j = d phi_j/dr0 - (p eps + q epsbar) phi_j with
    the weight (n-2j, 0) of phi_j).  Returns {j: max abs residual over
    all sections}.
    """
    p0 = np.asarray(p0, dtype=float)
    n = data.valence
    if data.kind != "spin":
        raise ValueError("constraint relations apply to the spin components")
    if grid is None:
        grid = data.grid if data.grid is not None else SphereGrid(24, 48)
    worst = {j: 0.0 for j in range(1, n + 1)}
    for s in np.atleast_1d(np.asarray(s_values, dtype=float)):
        q_pt = p0 + np.array([s, 0.0, 0.0, 0.0])
        section = cone.build_section(p0, q_pt, grid)
        vals = data.evaluate_on(section)
        if vals.shape[1] != n + 1:
            raise ValueError("constraint check needs all components phi_0..phi_n")
        dvals = data.radial_derivative_on(section)
        calc = _SectionCalculus(section)
        coef = section_spin_coefficients(section, calc)
        for j in range(1, n + 1):
            p_w, q_w = n - 2 * j, 0
            thorn = dvals[:, j] - (p_w * coef["epsilon"]
                                   + q_w * np.conj(coef["epsilon"])) * vals[:, j]
            eth_val = eth_prime(
                WeightedScalarField(vals[:, j - 1], (n - 2 * (j - 1), 0)),
                section, alpha=coef["alpha"], calculus=calc).values
            rhs = (n - j + 1) * coef["rho"] * vals[:, j] \
                - j * coef["tau_prime"] * vals[:, j - 1]
            if j >= 2:
                rhs = rhs + (j - 1) * coef["sigma_prime"] * vals[:, j - 2]
            if j < n:
                rhs = rhs - (n - j) * coef["kappa"] * vals[:, j + 1]
            res = np.max(np.abs(thorn - eth_val - rhs))
            worst[j] = max(worst[j], float(res))
    return worst


# ---------------------------------------------------------------------------
# file format: JSON descriptor + little-endian complex blob


def save_cone_data(path: str, data: ConeData):
    """Write grid data as <path>.json descriptor + <path>.bin blob.

    Layout: C-order (r0 node, direction node ring-major, component),
    little-endian complex128 pairs.  Analytic data has no serial form.
    """
    if data.is_analytic:
        raise ValueError("only grid data can be saved")
    base = path[:-5] if path.endswith(".json") else path
    blob_name = os.path.basename(base) + ".bin"
    g = data.grid
    desc = {
        "format": "conedata-v1",
        "valence": data.valence,
        "kind": data.kind,
        "n_components": data.ncomp,
        "n_theta": g.n_theta,
        "n_phi": g.n_phi,
        "chart_mode": g.chart_mode,
        "cap": g.cap,
        "r0_nodes": data.r0_nodes.tolist(),
        "r0_min": data.r0_min,
        "blob": blob_name,
        "dtype": "<c16",
        "layout": "r0-major, ring-major directions, component-minor",
    }
    blob = np.ascontiguousarray(data.values.astype("<c16"))
    with open(base + ".bin", "wb") as fh:
        fh.write(blob.tobytes())
    with open(base + ".json", "w") as fh:
        json.dump(desc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_cone_data(path: str) -> ConeData:
    """Read data written by save_cone_data; path names the descriptor."""
    base = path[:-5] if path.endswith(".json") else path
    with open(base + ".json") as fh:
        desc = json.load(fh)
    if desc.get("format") != "conedata-v1":
        raise ValueError("not a cone-data descriptor")
    grid = SphereGrid(desc["n_theta"], desc["n_phi"],
                      chart_mode=desc["chart_mode"], cap=desc["cap"])
    r0_nodes = np.asarray(desc["r0_nodes"], dtype=float)
    n_nodes = grid.angles()[0].size
    shape = (r0_nodes.size, n_nodes, desc["n_components"])
    blob_path = os.path.join(os.path.dirname(base) or ".", desc["blob"])
    raw = np.fromfile(blob_path, dtype="<c16")
    if raw.size != int(np.prod(shape)):
        raise ValueError("blob size does not match the descriptor")
    return ConeData(desc["valence"], kind=desc["kind"], grid=grid,
                    r0_nodes=r0_nodes, values=raw.reshape(shape),
                    r0_min=desc.get("r0_min", 0.0))
