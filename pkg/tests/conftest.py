import numpy as np
import pytest
from hypothesis import settings

from polfock.model import DiabaticModel, lif_default
from polfock.units import ev_to_hartree

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

OMEGA_15 = ev_to_hartree(1.5)
OMEGA_75 = ev_to_hartree(7.5)


@pytest.fixture(scope="session")
def lif():
    return lif_default()


def flat_model(mass=2000.0, v_ionic=0.0, v_covalent=0.1, coupling=0.0,
               mu_ionic=None, window=(0.0, 100.0)):
    """Constant potentials; handy for free-packet and gauge checks."""
    def const(c):
        return lambda R: np.full_like(np.asarray(R, dtype=float), c)

    mu_i = mu_ionic or (lambda R: np.asarray(R, dtype=float))
    dmu_i = (lambda R: np.ones_like(np.asarray(R, dtype=float))) if mu_ionic is None \
        else (lambda R: np.zeros_like(np.asarray(R, dtype=float)))
    return DiabaticModel(v_ionic=const(v_ionic), v_covalent=const(v_covalent),
                         v_coupling=const(coupling), mu_ionic=mu_i, mu_covalent=const(0.0),
                         dmu_ionic=dmu_i, dmu_covalent=const(0.0), mass=mass,
                         window=window, name="flat")


# -- acceptance report ----------------------------------------------------------

def pytest_terminal_summary(terminalreporter):
    rows = []
    for rep in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", []):
        props = dict(rep.user_properties)
        if "criterion" in props and rep.when == "call":
            rows.append((props["criterion"], rep.outcome.upper(), props.get("measured", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, outcome, measured in sorted(rows):
        terminalreporter.write_line(f"criterion {num:>2}: {outcome:6s} {measured}")
