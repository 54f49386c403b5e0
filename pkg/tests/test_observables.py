import math

import numpy as np
import pytest

from conftest import OMEGA_15, OMEGA_75
from polfock.dynamics import Grid, HybridSystem, SplitOperator, channel_state, initial_state
from polfock.hamiltonian import BasisSpec
from polfock.model import evaluate
from polfock.observables import (ObservableSeries, crossing_windows, dissociation_probability,
                                 half_rise_time, mean_position, pfs_populations, photon_number,
                                 polariton_populations, record, splitting_estimate,
                                 splitting_scan)

GRID = Grid(1.5, 12.0, 128)


def system(model, kind="diabatic-pfs", n_fock=6, chi=0.01, omega=OMEGA_75):
    return HybridSystem(model, chi, omega, BasisSpec(kind, n_fock), GRID)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_pfs_channel_state_has_integer_photon_number(lif, n):
    s = system(lif)
    wp = channel_state(s, 3.0, 19.12, n)   # |I, n_I>
    rho = pfs_populations(wp)
    assert rho[n] == pytest.approx(1.0)
    assert photon_number(wp) == pytest.approx(n)


def test_vacuum_fock_state_counts_displaced_photons(lif):
    # |I, 0> in the bare Fock basis has <b_I^+ b_I> = lam_I^2 = (chi R / omega)^2
    chi = 0.05
    s = system(lif, "diabatic-fock", n_fock=20, chi=chi)
    wp = channel_state(s, 3.0, 19.12, 0)
    w = np.abs(wp.amplitudes[:, 0]) ** 2
    mu = evaluate(lif, GRID.R).mu_ionic
    ref = np.sum(w * (chi * mu / OMEGA_75) ** 2) * GRID.dR
    assert photon_number(wp) == pytest.approx(ref, rel=1e-10)
    assert pfs_populations(wp).sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind,n_fock", [("diabatic-pfs", 6), ("diabatic-fock", 24)])
def test_populations_sum_to_one(lif, kind, n_fock):
    s = system(lif, kind, n_fock, chi=0.007, omega=OMEGA_15)
    wp = initial_state(s, 3.01, 19.12, 5, n_pfs=6)
    assert pfs_populations(wp).sum() == pytest.approx(1.0, abs=1e-10)
    assert polariton_populations(wp).sum() == pytest.approx(1.0, abs=1e-6)


def test_photon_number_same_in_both_bases(lif):
    a = initial_state(system(lif, chi=0.05), 3.01, 19.12, 1)
    b = initial_state(system(lif, "diabatic-fock", 24, chi=0.05), 3.01, 19.12, 1, n_pfs=6)
    assert photon_number(a) == pytest.approx(photon_number(b), abs=1e-10)


def test_bound_packet_does_not_dissociate(lif):
    wp = initial_state(system(lif, n_fock=4), 3.01, 19.12, 0)
    assert dissociation_probability(wp) < 1e-12
    assert mean_position(wp) == pytest.approx(3.01, abs=1e-6)


def test_record_collects_standard_set(lif):
    s = system(lif, n_fock=4)
    wp = initial_state(s, 3.01, 19.12, 1)
    prop = SplitOperator(s, 1.0)
    series = ObservableSeries()
    for snap in prop.run(wp, 20, 10):
        record(series, snap, prop, rho_levels=3, dissociation=True, polaritons=2)
    t, ch = series.as_arrays()
    assert list(t) == [0.0, 10.0, 20.0]
    assert {"norm", "photon_number", "energy", "rho_0", "rho_2", "rho_sum",
            "dissociation", "polariton_1"} <= set(ch)
    assert "rho_3" not in ch
    assert series.columns()[0] == "time"
    assert len(list(series.rows())) == 3


def test_half_rise_time():
    t = np.arange(11.0)
    y = np.array([0.1, 0.1, 0.2, 0.4, 0.6, 0.9, 1.1, 1.1, 0.5, 2.0, 2.0])
    assert half_rise_time(t, y, t_end=7.0) == 4.0
    assert half_rise_time(t, y) == 6.0
    assert math.isnan(half_rise_time(t, -t))


def test_splitting_estimate_matches_formula(lif):
    r, n, chi = 5.4, 2, 0.004
    v = evaluate(lif, r)
    lam = chi * r / OMEGA_15
    ref = 2 * v.v_coupling * math.exp(-lam ** 2 / 2) * lam ** 2 / math.sqrt(2)
    assert splitting_estimate(lif, OMEGA_15, chi, r, n) == pytest.approx(ref, rel=1e-12)


def test_crossing_windows_are_disjoint(lif):
    w = crossing_windows(lif, OMEGA_15, [1, 2, 3])
    spans = [w[n] for n in (3, 2, 1)]
    for (lo, hi), (lo2, _) in zip(spans, spans[1:]):
        assert lo < hi <= lo2


def test_splitting_scan_flags_absent_crossings(lif):
    rows = splitting_scan(lif, OMEGA_15, [0.004], variants=["pf", "rabi"], indices=[2])
    pf, rabi = rows
    assert pf.present and pf.gap > 0
    assert pf.gap == pytest.approx(pf.estimate, rel=0.1)
    assert rabi.gap < 1e-6 * pf.gap or not rabi.present
