"""The four batch experiments: surfaces, splittings, downconversion, dissociation.

Each runner takes a validated :class:`~polfock.config.ScenarioConfig` and
returns a :class:`ScenarioResult` holding wide tables (one row per R or time
sample), tidy long-format tables for plotting tools and a JSON-ready summary.
Scans over chi fan out over a process pool; results are gathered in input
order so the output does not depend on ``jobs``.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .dynamics import (Grid, HybridSystem, SplitOperator, initial_state,
                       select_state_by_channel)
from .hamiltonian import BasisSpec, eigensolve_field, refine_crossing
from .model import evaluate
from .observables import (ObservableSeries, crossing_windows, half_rise_time,
                          record, splitting_scan)

log = logging.getLogger(__name__)


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


@dataclass
class ScenarioResult:
    scenario: str
    tables: dict
    long_tables: dict
    summary: dict


def _map(fn, items, jobs):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


class _Bound:
    """Picklable partial: fn(cfg, x)."""

    def __init__(self, fn, cfg):
        self.fn, self.cfg = fn, cfg

    def __call__(self, x):
        return self.fn(self.cfg, x)


def _basis(cfg):
    return BasisSpec(cfg.basis_kind, cfg.n_fock)


# -- surfaces --------------------------------------------------------------------

def cavity_mesh(model, chi, omega_c, R, q):
    """Diabatic cavity surfaces V_alpha(R) + omega^2 (q + q0_alpha(R))^2 / 2.

    q0_alpha = sqrt(2 / omega) chi mu_alpha / omega is the displacement of the
    photon coordinate by the permanent dipole of diabat alpha.
    """
    v = evaluate(model, R)
    RR, QQ = np.meshgrid(R, q, indexing="ij")
    out = []
    for V, mu in ((v.v_ionic, v.mu_ionic), (v.v_covalent, v.mu_covalent)):
        q0 = np.sqrt(2.0 / omega_c) * chi * mu / omega_c
        out.append(V[:, None] + 0.5 * omega_c ** 2 * (QQ + q0[:, None]) ** 2)
    return RR, QQ, out[0], out[1]


def _surfaces_one(cfg: ScenarioConfig, chi):
    s = cfg.surfaces
    model = cfg.model()
    R = np.linspace(s.r_min, s.r_max, s.n_points)
    fld = eigensolve_field(model, R, chi, cfg.omega_c, _basis(cfg), cfg.variant,
                           n_states=s.n_states)
    crossings = {}
    windows = crossing_windows(model, cfg.omega_c, s.crossings)
    for n in s.crossings:
        entry = {"states": [n, n + 1], "r": None, "gap": None}
        if n in windows and n + 1 < fld.n_states:
            lo, hi = windows[n]
            found = refine_crossing(model, chi, cfg.omega_c, _basis(cfg), cfg.variant,
                                    n, n + 1, lo, hi)
            if found is not None:
                entry["r"], entry["gap"] = float(found[0]), float(found[1])
        crossings[f"R{n}"] = entry
    mesh = None
    if s.mesh:
        Rm = np.linspace(s.r_min, s.r_max, s.mesh_points)
        q = np.linspace(s.q_min, s.q_max, s.n_q)
        mesh = cavity_mesh(model, chi, cfg.omega_c, Rm, q)
    return fld.energies, fld.photon_number, crossings, mesh


def run_surfaces(cfg: ScenarioConfig, jobs=1) -> ScenarioResult:
    s = cfg.surfaces
    R = np.linspace(s.r_min, s.r_max, s.n_points)
    k = s.n_states
    wide = Table(["chi", "R"] + [f"E_{j}" for j in range(k)]
                 + [f"N_{j}" for j in range(k)])
    long = Table(["chi", "R", "state", "energy", "photon_number"])
    mesh_t = Table(["chi", "R", "q", "V_ionic", "V_covalent"])
    summary = {"crossings": {}}
    for chi, (E, N, cross, mesh) in zip(cfg.chi_values,
                                        _map(_Bound(_surfaces_one, cfg), cfg.chi_values, jobs)):
        for i, r in enumerate(R):
            wide.rows.append([chi, r] + list(E[i]) + list(N[i]))
            for j in range(k):
                long.rows.append([chi, r, j, E[i, j], N[i, j]])
        summary["crossings"][repr(chi)] = cross
        if mesh is not None:
            RR, QQ, VI, VC = mesh
            for a, b, c, d in zip(RR.ravel(), QQ.ravel(), VI.ravel(), VC.ravel()):
                mesh_t.rows.append([chi, a, b, c, d])
    tables = {"surfaces": wide}
    if mesh_t.rows:
        tables["cavity_mesh"] = mesh_t
    return ScenarioResult("surfaces", tables, {"surfaces_long": long}, summary)


# -- splittings ------------------------------------------------------------------

def _splittings_one(cfg: ScenarioConfig, chi):
    sp = cfg.splittings
    return splitting_scan(cfg.model(), cfg.omega_c, [chi], sp.variants, sp.indices,
                          sp.n_fock_pfs, sp.n_fock_fock)


def run_splittings(cfg: ScenarioConfig, jobs=1) -> ScenarioResult:
    t = Table(["chi", "variant", "crossing", "r_star", "gap", "estimate", "ratio",
               "present"])
    long = Table(["chi", "variant", "crossing", "quantity", "value"])
    summary = {"rows": []}
    for rows in _map(_Bound(_splittings_one, cfg), cfg.chi_values, jobs):
        for r in rows:
            ratio = r.gap / r.estimate if r.present and r.estimate > 0 else math.nan
            t.rows.append([r.chi, r.variant, f"R{r.index}", r.r_star, r.gap,
                           r.estimate, ratio, int(r.present)])
            long.rows.append([r.chi, r.variant, f"R{r.index}", "gap", r.gap])
            long.rows.append([r.chi, r.variant, f"R{r.index}", "estimate", r.estimate])
            summary["rows"].append({"chi": r.chi, "variant": r.variant,
                                    "crossing": f"R{r.index}", "r_star": r.r_star,
                                    "gap": r.gap, "estimate": r.estimate,
                                    "present": r.present})
    return ScenarioResult("splittings", {"splittings": t}, {"splittings_long": long},
                          summary)


# -- dynamics --------------------------------------------------------------------

def build_system(cfg: ScenarioConfig, chi):
    g = cfg.grid
    return HybridSystem(cfg.model(), chi, cfg.omega_c, _basis(cfg),
                        Grid(g.r_min, g.r_max, g.n_points), cfg.variant)


def prepare_state(cfg: ScenarioConfig, system):
    init = cfg.initial_state
    if init.channel is not None:
        j = select_state_by_channel(system, init.r_g, *init.channel)
    else:
        j = init.state
    return initial_state(system, init.r_g, init.alpha, j, condon=init.condon)


def propagate_chi(cfg: ScenarioConfig, chi):
    """One propagation; returns (times, channels dict, info dict)."""
    system = build_system(cfg, chi)
    wp = prepare_state(cfg, system)
    p = cfg.propagation
    prop = SplitOperator(system, p.dt, include_dc=p.derivative_couplings,
                         absorber_width=p.absorber_width)
    series = ObservableSeries()
    log.info("chi = %g: %d steps of %g a.u.", chi, p.n_steps, p.dt)
    for snap in prop.run(wp, p.n_steps, p.stride):
        record(series, snap, prop, rho_levels=cfg.rho_levels,
               dissociation=cfg.dissociation, polaritons=cfg.polaritons)
    t, ch = series.as_arrays()
    e0 = ch["energy"][0]
    info = {
        "chi": chi,
        "initial_state": int(wp.meta.get("state", -1)),
        "max_norm_drift": float(np.max(np.abs(ch["norm"] - ch["norm"][0]))),
        "max_rel_energy_drift": float(np.max(np.abs(ch["energy"] - e0)) / abs(e0)),
        "initial_energy": float(e0),
    }
    return t, ch, info


def _series_tables(cfg, results, keys):
    first = results[0][1]
    cols = [k for k in keys if k in first] + sorted(
        k for k in first if k.startswith(("rho_", "polariton_")) and k not in keys)
    wide = Table(["chi", "time"] + cols)
    long = Table(["chi", "time", "quantity", "value"])
    for chi, (t, ch, _) in zip(cfg.chi_values, results):
        for i, ti in enumerate(t):
            wide.rows.append([chi, ti] + [ch[c][i] for c in cols])
            for c in cols:
                long.rows.append([chi, ti, c, ch[c][i]])
    return wide, long


def run_downconversion(cfg: ScenarioConfig, jobs=1) -> ScenarioResult:
    results = _map(_Bound(propagate_chi, cfg), cfg.chi_values, jobs)
    wide, long = _series_tables(cfg, results, ["photon_number", "norm", "energy",
                                               "rho_sum"])
    per_chi = []
    for t, ch, info in results:
        N = ch["photon_number"]
        i_peak = int(np.argmax(N))
        rises = {}
        for n in range(1, cfg.rho_levels):
            key = f"rho_{n}"
            if key in ch:
                rises[key] = half_rise_time(t, ch[key], t_end=t[i_peak])
        per_chi.append({**info, "peak_photon_number": float(N[i_peak]),
                        "t_peak": float(t[i_peak]), "rise_times": rises})
    return ScenarioResult("downconversion", {"downconversion": wide},
                          {"downconversion_long": long}, {"runs": per_chi})


def run_dissociation(cfg: ScenarioConfig, jobs=1) -> ScenarioResult:
    results = _map(_Bound(propagate_chi, cfg), cfg.chi_values, jobs)
    wide, long = _series_tables(cfg, results, ["dissociation", "photon_number", "norm",
                                               "energy", "rho_sum"])
    per_chi = []
    for t, ch, info in results:
        final = float(ch["dissociation"][-1]) if "dissociation" in ch else math.nan
        per_chi.append({**info, "final_dissociation": final})
    return ScenarioResult("dissociation", {"dissociation": wide},
                          {"dissociation_long": long}, {"runs": per_chi})


RUNNERS = {
    "surfaces": run_surfaces,
    "splittings": run_splittings,
    "downconversion": run_downconversion,
    "dissociation": run_dissociation,
}


def run(cfg: ScenarioConfig, jobs=1) -> ScenarioResult:
    return RUNNERS[cfg.scenario](cfg, jobs)
