"""Measured quantities: photon number, PFS populations, dissociation, splittings."""

import math
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import (BasisKind, BasisSpec, Variant, refine_crossing,
                          to_pfs_amplitudes)
from .model import crossing_point, diabatic_resonances, evaluate


def _pfs_weights(wp):
    """|<alpha, n_alpha | psi>|^2 integrated over R, shape (2, n_levels)."""
    s = wp.system
    amp = to_pfs_amplitudes(wp.amplitudes, s.basis, s.model, s.grid.R, s.chi, s.omega_c)
    return np.sum(np.abs(amp) ** 2, axis=0) * s.grid.dR


def pfs_populations(wp):
    """rho_n = sum over diabats and R of |<alpha, n_alpha|psi>|^2."""
    return _pfs_weights(wp).sum(axis=0)


def photon_number(wp):
    """<psi| sum_alpha b_alpha^+ b_alpha |psi> (the polarized number operator)."""
    rho = pfs_populations(wp)
    return float(np.dot(np.arange(len(rho)), rho))


def polariton_populations(wp, field_=None):
    """Population of each polariton surface, projecting pointwise onto Phi_j(R)."""
    field_ = wp.system.field if field_ is None else field_
    proj = np.einsum("rcj,rc->rj", field_.states, wp.amplitudes)
    return np.sum(np.abs(proj) ** 2, axis=0) * wp.grid.dR


def dissociation_probability(wp, field_=None, r_cut=None):
    """Population of the lowest polariton surface beyond R_cut (default: R0)."""
    field_ = wp.system.field if field_ is None else field_
    r_cut = crossing_point(wp.system.model) if r_cut is None else r_cut
    R = wp.grid.R
    proj = field_.states[:, :, 0].T  # (n_channels, n_R)
    amp = np.einsum("cr,rc->r", proj, wp.amplitudes)
    return float(np.sum(np.abs(amp[R > r_cut]) ** 2) * wp.grid.dR)


def mean_position(wp):
    w = np.sum(np.abs(wp.amplitudes) ** 2, axis=1)
    return float(np.sum(w * wp.grid.R) * wp.grid.dR)


@dataclass
class ObservableSeries:
    """Time series of named scalar channels sampled at snapshot times."""

    times: list = field(default_factory=list)
    channels: dict = field(default_factory=dict)

    def append(self, t, **values):
        self.times.append(float(t))
        for key, val in values.items():
            self.channels.setdefault(key, []).append(float(val))

    def as_arrays(self):
        return np.asarray(self.times), {k: np.asarray(v) for k, v in self.channels.items()}

    def columns(self):
        return ["time"] + list(self.channels)

    def rows(self):
        keys = list(self.channels)
        for i, t in enumerate(self.times):
            yield [t] + [self.channels[k][i] for k in keys]


def record(series: ObservableSeries, wp, propagator=None, rho_levels=None,
           dissociation=False, polaritons=0):
    """Append the standard observable set of one snapshot to ``series``."""
    rho = pfs_populations(wp)
    vals = {"norm": wp.norm(), "photon_number": float(np.dot(np.arange(len(rho)), rho))}
    if propagator is not None:
        vals["energy"] = propagator.energy(wp.amplitudes)
    n_rho = len(rho) if rho_levels is None else min(rho_levels, len(rho))
    for n in range(n_rho):
        vals[f"rho_{n}"] = rho[n]
    vals["rho_sum"] = float(rho.sum())
    if dissociation:
        vals["dissociation"] = dissociation_probability(wp)
    if polaritons:
        pops = polariton_populations(wp)
        for j in range(min(polaritons, len(pops))):
            vals[f"polariton_{j}"] = pops[j]
    series.append(wp.time, **vals)
    return vals


def half_rise_time(times, values, t_end=None):
    """First time ``values`` climbs halfway from its initial value to its maximum.

    Only samples with t <= t_end enter the maximum, so a later return of
    population does not shift the estimate. Returns nan if nothing rises.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = t <= (t[-1] if t_end is None else t_end)
    t, y = t[keep], y[keep]
    gain = y - y[0]
    top = gain.max()
    if top <= 0:
        return math.nan
    return float(t[np.argmax(gain >= 0.5 * top)])


# -- splittings -----------------------------------------------------------------

@dataclass
class Splitting:
    chi: float
    variant: str
    index: int          # which crossing: R_0, R_1, ...
    r_star: float       # located position, nan when absent
    gap: float          # E_{n+1} - E_n at r_star, nan when absent
    estimate: float     # 2 V_IC(R*) |<n_I|0_C>|
    present: bool


def splitting_estimate(model, omega_c, chi, r, n):
    """2 V_IC(R) |<n_I|0_C>| = 2 V_IC exp(-lam^2/2) lam^n / sqrt(n!)."""
    v = evaluate(model, r)
    lam = chi * (float(v.mu_ionic) - float(v.mu_covalent)) / omega_c
    return float(2.0 * v.v_coupling * np.exp(-0.5 * lam ** 2) * abs(lam) ** n
                 / math.sqrt(math.factorial(n)))


def crossing_windows(model, omega_c, indices):
    """Bracket around each zeroth-order resonance V_C - V_I = n omega_c."""
    n_hi = max(indices) + 1
    centers = {}
    for n in range(0, n_hi + 1):
        r = diabatic_resonances(model, omega_c, n)
        if r:
            centers[n] = r[-1]
    out = {}
    for n in indices:
        if n not in centers:
            continue
        c = centers[n]
        left = centers.get(n + 1, model.window[0])
        right = centers.get(n - 1, model.window[1]) if n > 0 else min(model.window[1], c + 6.0)
        out[n] = (max(model.window[0], c - 0.5 * (c - left)),
                  min(model.window[1], c + 0.5 * (right - c)))
    return out


def splitting_scan(model, omega_c, chi_values, variants=(Variant.PAULI_FIERZ, Variant.RABI),
                   indices=(1, 2, 3), n_fock_pfs=12, n_fock_fock=24):
    """Energy splittings of the light-induced avoided crossings versus chi.

    Crossing R_n is the avoided crossing between ordered surfaces n and n + 1
    near the |C, 0_C> / |I, n_I> resonance. PF values use the PFS basis; Rabi
    and JC use the adiabatic-Fock basis. Entries with no interior gap minimum
    are returned with ``present = False``.
    """
    windows = crossing_windows(model, omega_c, indices)
    rows = []
    for chi in chi_values:
        for variant in variants:
            variant = Variant(variant)
            if variant is Variant.PAULI_FIERZ:
                basis = BasisSpec(BasisKind.DIABATIC_PFS, n_fock_pfs)
            else:
                basis = BasisSpec(BasisKind.ADIABATIC_FOCK, n_fock_fock)
            for n in indices:
                if n not in windows:
                    rows.append(Splitting(chi, variant.value, n, math.nan, math.nan,
                                          math.nan, False))
                    continue
                lo, hi = windows[n]
                found = refine_crossing(model, chi, omega_c, basis, variant, n, n + 1, lo, hi)
                if found is None:
                    rows.append(Splitting(chi, variant.value, n, math.nan, math.nan,
                                          math.nan, False))
                    continue
                r, gap = found
                rows.append(Splitting(chi, variant.value, n, r, gap,
                                      splitting_estimate(model, omega_c, chi, r, n), True))
    return rows
