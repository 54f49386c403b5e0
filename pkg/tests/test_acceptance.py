"""Acceptance criteria, one test per criterion.

Each test records the measured quantity; the terminal summary prints one
pass/fail line per criterion.
"""

import math

import numpy as np
import pytest

from conftest import OMEGA_15, OMEGA_75
from polfock.config import load_config
from polfock.dynamics import Grid, HybridSystem, initial_state, propagate
from polfock.fock import FockSpace, overlap_matrix
from polfock.hamiltonian import BasisSpec, eigenvalues, minimal_n_fock, refine_crossing
from polfock.model import crossing_point, evaluate
from polfock.observables import half_rise_time, splitting_scan
from polfock.oracle import dense_exact_propagator, dense_hamiltonian, fc_overlap_quadrature
from polfock.scenarios import propagate_chi, run

LAMBDAS = [0.1, 0.5, 1.0, 2.0, 3.0]
SETTINGS = [(0.01, OMEGA_75), (0.007, OMEGA_15)]
SCAN_CHI = [0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007]


@pytest.fixture(scope="module")
def downconversion():
    cfg = load_config("downconversion")
    return cfg, propagate_chi(cfg, 0.007)


@pytest.fixture(scope="module")
def dissociation():
    return run(load_config("dissociation"))


@pytest.fixture(scope="module")
def dissociation_dc():
    return run(load_config("dissociation", overrides=["propagation.derivative_couplings=true"]))


@pytest.fixture(scope="module")
def splittings(lif):
    return splitting_scan(lif, OMEGA_15, SCAN_CHI, variants=["pf", "rabi"], indices=[1, 2, 3])


def test_criterion_01_overlaps_match_quadrature(record_property):
    worst = 0.0
    for lam in LAMBDAS:
        S = overlap_matrix(FockSpace(0.05, 31), lam)
        ref = np.array([[fc_overlap_quadrature(0.05, lam, m, n) for n in range(31)]
                        for m in range(31)])
        worst = max(worst, float(np.max(np.abs(S - ref))))
    record_property("criterion", 1)
    record_property("measured", f"max |S - quadrature| = {worst:.2e} (< 1e-10)")
    assert worst < 1e-10


def test_criterion_02_vacuum_overlap_is_gaussian(record_property):
    worst = max(abs(overlap_matrix(FockSpace(0.05, 4), lam)[0, 0] - math.exp(-0.5 * lam ** 2))
                for lam in LAMBDAS)
    record_property("criterion", 2)
    record_property("measured", f"max |S00 - exp(-lam^2/2)| = {worst:.2e} (< 1e-12)")
    assert worst < 1e-12


def test_criterion_03_bases_agree(lif, record_property):
    R = np.linspace(2.0, 20.0, 20)
    worst = 0.0
    for chi, omega in SETTINGS:
        pfs = eigenvalues(lif, R, chi, omega, BasisSpec("diabatic-pfs", 24), n_states=6)
        af = eigenvalues(lif, R, chi, omega, BasisSpec("adiabatic-fock", 64), n_states=6)
        worst = max(worst, float(np.max(np.abs(pfs - af))))
    record_property("criterion", 3)
    record_property("measured", f"max |E_PFS - E_AF| = {worst:.2e} Ha (< 1e-8)")
    assert worst < 1e-8


def test_criterion_04_pfs_needs_fewer_fock_states(lif, record_property):
    chi, omega = SETTINGS[1]
    R = np.linspace(2.0, 20.0, 20)
    ref = eigenvalues(lif, R, chi, omega, BasisSpec("diabatic-pfs", 64), n_states=6)
    n_pfs = minimal_n_fock(lif, R, chi, omega, "diabatic-pfs", ref, n_states=6)
    n_af = minimal_n_fock(lif, R, chi, omega, "adiabatic-fock", ref, n_states=6)
    record_property("criterion", 4)
    record_property("measured", f"n_fock PFS {n_pfs}, adiabatic-Fock {n_af}, "
                                f"ratio {n_af / n_pfs:.2f} (>= 2)")
    assert n_af >= 2 * n_pfs


def test_criterion_05_splitting_analytics(lif, splittings, record_property):
    r0 = crossing_point(lif)
    worst_r0 = 0.0
    for chi in [0.001, 0.002, 0.003, 0.004, 0.005]:
        r, gap = refine_crossing(lif, chi, OMEGA_75, BasisSpec("diabatic-pfs", 8), "pf",
                                 0, 1, r0 - 3.0, r0 + 3.0)
        v = evaluate(lif, r0)
        lam = chi * float(v.mu_ionic - v.mu_covalent) / OMEGA_75
        est = 2 * float(v.v_coupling) * math.exp(-0.5 * lam ** 2)
        worst_r0 = max(worst_r0, abs(gap / est - 1))
    r2 = [s for s in splittings if s.variant == "pf" and s.index == 2]
    assert len(r2) == len(SCAN_CHI) and all(s.present for s in r2)
    worst_r2 = max(abs(s.gap / s.estimate - 1) for s in r2)
    record_property("criterion", 5)
    record_property("measured", f"R0 max rel dev {worst_r0:.3f} (< 0.05); "
                                f"R2 max rel dev {worst_r2:.3f} (< 0.10)")
    assert worst_r0 < 0.05
    assert worst_r2 < 0.10


def test_criterion_06_rabi_misses_multiphoton_crossings(splittings, record_property):
    def gap(variant, chi, n):
        (s,) = [s for s in splittings if s.variant == variant and s.chi == chi and s.index == n]
        return s.gap if s.present else 0.0

    big, small = max(SCAN_CHI), min(SCAN_CHI)
    r2 = gap("rabi", big, 2) / gap("pf", big, 2)
    r3 = gap("rabi", big, 3) / gap("pf", big, 3)
    r1 = gap("rabi", small, 1) / gap("pf", small, 1)
    record_property("criterion", 6)
    record_property("measured", f"Rabi/PF at chi={big}: R2 {r2:.1e}, R3 {r3:.3f} (< 0.1); "
                                f"R1 at chi={small}: {r1:.3f} (within 0.1 of 1)")
    assert r2 < 0.1 and r3 < 0.1
    assert abs(r1 - 1) < 0.1


def test_criterion_07_split_operator_matches_dense(lif, record_property):
    grid = Grid(1.5, 12.0, 128)
    sys_ = HybridSystem(lif, 0.01, OMEGA_75, BasisSpec("diabatic-pfs", 4), grid)
    assert sys_.basis.n_channels == 8
    wp = initial_state(sys_, 3.01, 19.12, 1)
    *_, last = propagate(wp, 1.0, 1000)
    H = dense_hamiltonian(sys_.potential, grid.dR, lif.mass)
    ref = dense_exact_propagator(H, wp.amplitudes, 1000.0)
    infid = 1 - abs(np.vdot(ref, last.amplitudes) * grid.dR) ** 2
    record_property("criterion", 7)
    record_property("measured", f"1 - fidelity at t = 1000 a.u. = {infid:.2e} (< 1e-8)")
    assert infid < 1e-8


def test_criterion_08_conservation(downconversion, dissociation, dissociation_dc,
                                   record_property):
    infos = [downconversion[1][2]] + dissociation.summary["runs"] + \
        dissociation_dc.summary["runs"]
    norm = max(i["max_norm_drift"] for i in infos)
    energy = max(i["max_rel_energy_drift"] for i in infos)
    record_property("criterion", 8)
    record_property("measured", f"{len(infos)} runs: max norm drift {norm:.1e} (< 1e-10), "
                                f"max rel energy drift {energy:.1e} (< 1e-6)")
    assert norm < 1e-10
    assert energy < 1e-6


def test_criterion_09_downconversion(downconversion, record_property):
    _, (t, ch, _) = downconversion
    N = ch["photon_number"]
    i_peak = int(np.argmax(N))
    rise = {n: half_rise_time(t, ch[f"rho_{n}"], t_end=t[i_peak]) for n in (1, 2, 3)}
    record_property("criterion", 9)
    record_property("measured", f"peak <N> = {N[i_peak]:.3f} at t = {t[i_peak]:g} (> 1.5); "
                                f"half-rise rho_3 {rise[3]:g}, rho_2 {rise[2]:g}, "
                                f"rho_1 {rise[1]:g}")
    assert N[i_peak] > 1.5
    assert rise[3] < rise[2] < rise[1]


def test_criterion_10_dissociation_grows_with_coupling(dissociation, record_property):
    runs = dissociation.summary["runs"]
    chis = [r["chi"] for r in runs]
    p = [r["final_dissociation"] for r in runs]
    record_property("criterion", 10)
    record_property("measured", "P_diss " + ", ".join(f"{c:g}: {x:.4f}" for c, x in zip(chis, p)))
    assert chis == [0.0, 0.004, 0.007, 0.01]
    assert all(b > a for a, b in zip(p, p[1:]))


def test_criterion_11_derivative_couplings_negligible(dissociation, dissociation_dc,
                                                      record_property):
    off = np.array([r["final_dissociation"] for r in dissociation.summary["runs"]])
    on = np.array([r["final_dissociation"] for r in dissociation_dc.summary["runs"]])
    rel = float(np.max(np.abs(on - off) / off))
    record_property("criterion", 11)
    record_property("measured", f"max rel change of final P_diss = {rel:.1e} (< 1e-3)")
    assert rel < 1e-3
