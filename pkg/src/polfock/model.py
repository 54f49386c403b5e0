"""Two-state ionic/covalent diabatic model of a diatomic molecule.

Everything is in Hartree atomic units. The diabatic states are eigenstates of
the dipole operator and are taken to be strictly R-independent, so there is
no derivative coupling between them.
"""

from dataclasses import dataclass, field, asdict
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .units import LIF_REDUCED_MASS

ArrayFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DiabaticModel:
    """Diabatic potentials, coupling and dipoles as vectorized callables of R."""

    v_ionic: ArrayFunc
    v_covalent: ArrayFunc
    v_coupling: ArrayFunc
    mu_ionic: ArrayFunc
    mu_covalent: ArrayFunc
    dmu_ionic: ArrayFunc
    dmu_covalent: ArrayFunc
    mass: float
    window: tuple = (1.0, 60.0)
    name: str = "custom"
    parameters: dict = field(default_factory=dict)

    def check_domain(self, R):
        R = np.asarray(R, dtype=float)
        lo, hi = self.window
        if not np.all(np.isfinite(R)) or np.any(R < lo) or np.any(R > hi):
            raise DomainError(f"R outside model window [{lo}, {hi}] bohr")
        return R

    def describe(self):
        return {"name": self.name, "mass": self.mass,
                "window": list(self.window), "parameters": dict(self.parameters)}


class ModelValues(NamedTuple):
    v_ionic: np.ndarray
    v_covalent: np.ndarray
    v_coupling: np.ndarray
    mu_ionic: np.ndarray
    mu_covalent: np.ndarray
    dmu_ionic: np.ndarray
    dmu_covalent: np.ndarray


@dataclass(frozen=True)
class AdiabaticSlice:
    """Adiabatic energies and dipole matrix at one R (or a batch of R)."""

    e_ground: np.ndarray
    e_excited: np.ndarray
    mixing_angle: np.ndarray
    mu_gg: np.ndarray
    mu_ee: np.ndarray
    mu_eg: np.ndarray

    def rotation(self):
        """Columns are |g>, |e> expressed in the (I, C) diabatic basis."""
        c, s = np.cos(self.mixing_angle), np.sin(self.mixing_angle)
        U = np.empty(np.shape(c) + (2, 2))
        U[..., 0, 0], U[..., 1, 0] = c, -s
        U[..., 0, 1], U[..., 1, 1] = s, c
        return U

    def dipole_matrix(self):
        M = np.empty(np.shape(self.mu_gg) + (2, 2))
        M[..., 0, 0] = self.mu_gg
        M[..., 1, 1] = self.mu_ee
        M[..., 0, 1] = M[..., 1, 0] = self.mu_eg
        return M


def evaluate(model: DiabaticModel, R) -> ModelValues:
    R = model.check_domain(R)
    return ModelValues(
        np.asarray(model.v_ionic(R), dtype=float),
        np.asarray(model.v_covalent(R), dtype=float),
        np.asarray(model.v_coupling(R), dtype=float),
        np.asarray(model.mu_ionic(R), dtype=float),
        np.asarray(model.mu_covalent(R), dtype=float),
        np.asarray(model.dmu_ionic(R), dtype=float),
        np.asarray(model.dmu_covalent(R), dtype=float),
    )


def adiabatize(model: DiabaticModel, R) -> AdiabaticSlice:
    """Diagonalize the 2x2 electronic Hamiltonian and rotate the dipoles.

    The ground state is cos(t)|I> - sin(t)|C> with
    t = atan2(2 V_IC, V_C - V_I) / 2, which stays continuous in R as long as
    V_IC keeps its sign.
    """
    v = evaluate(model, R)
    theta = 0.5 * np.arctan2(2.0 * v.v_coupling, v.v_covalent - v.v_ionic)
    mean = 0.5 * (v.v_ionic + v.v_covalent)
    half_gap = 0.5 * np.hypot(v.v_covalent - v.v_ionic, 2.0 * v.v_coupling)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    cs = np.sin(theta) * np.cos(theta)
    return AdiabaticSlice(
        e_ground=mean - half_gap,
        e_excited=mean + half_gap,
        mixing_angle=theta,
        mu_gg=v.mu_ionic * c2 + v.mu_covalent * s2,
        mu_ee=v.mu_ionic * s2 + v.mu_covalent * c2,
        mu_eg=(v.mu_ionic - v.mu_covalent) * cs,
    )


def crossing_point(model: DiabaticModel, lo=None, hi=None, n_scan=2000):
    """Location R0 of the single V_I = V_C crossing inside the window."""
    lo = model.window[0] if lo is None else lo
    hi = model.window[1] if hi is None else hi
    R = np.linspace(lo, hi, n_scan)
    v = evaluate(model, R)
    diff = v.v_ionic - v.v_covalent
    idx = np.nonzero(np.sign(diff[1:]) != np.sign(diff[:-1]))[0]
    if len(idx) != 1:
        raise DomainError(f"expected one diabatic crossing, found {len(idx)}")

    def f(r):
        w = evaluate(model, r)
        return float(w.v_ionic - w.v_covalent)

    return brentq(f, R[idx[0]], R[idx[0] + 1], xtol=1e-14, rtol=1e-15)


def diabatic_resonances(model: DiabaticModel, omega_c, n, lo=None, hi=None,
                        n_scan=4000):
    """R values where V_C(R) - V_I(R) = n * omega_c.

    These are the zeroth-order positions of the |C, 0_C> / |I, n_I> crossings
    in the polarized Fock basis (n = 0 is the bare crossing).
    """
    lo = model.window[0] if lo is None else lo
    hi = model.window[1] if hi is None else hi
    R = np.linspace(lo, hi, n_scan)
    v = evaluate(model, R)
    diff = v.v_covalent - v.v_ionic - n * omega_c
    idx = np.nonzero(np.sign(diff[1:]) != np.sign(diff[:-1]))[0]

    def f(r):
        w = evaluate(model, r)
        return float(w.v_covalent - w.v_ionic - n * omega_c)

    return [brentq(f, R[i], R[i + 1], xtol=1e-13) for i in idx]


# -- ionic/covalent functional form ----------------------------------------

@dataclass(frozen=True)
class IonicCovalentParameters:
    """Constants of the ionic/covalent form (atomic units).

    V_I(R)  = A exp(-beta R) - 1/R + ion_offset
    V_C(R)  = A_C exp(-beta_C R)
    V_IC(R) = B exp(-gamma R)
    mu_I(R) = charge R,  mu_C(R) = 0

    ``A`` is fixed by putting the ionic minimum at ``r_eq`` and ``ion_offset``
    by putting the diabatic crossing at ``r_cross``.
    """

    beta: float = 2.8
    r_eq: float = 3.0
    r_cross: float = 13.5
    a_cov: float = 400.0
    beta_cov: float = 3.3
    b_coupling: float = 0.16
    gamma: float = 0.38
    charge: float = 1.0
    mass: float = LIF_REDUCED_MASS
    window: tuple = (1.5, 60.0)

    @property
    def a_ion(self):
        return np.exp(self.beta * self.r_eq) / (self.beta * self.r_eq ** 2)

    @property
    def ion_offset(self):
        rc = self.r_cross
        return (self.a_cov * np.exp(-self.beta_cov * rc)
                - self.a_ion * np.exp(-self.beta * rc) + 1.0 / rc)


def ionic_covalent_model(params: IonicCovalentParameters = None, name="custom",
                         **overrides) -> DiabaticModel:
    p = params or IonicCovalentParameters()
    if overrides:
        p = IonicCovalentParameters(**{**asdict(p), **overrides})
    a_ion, offset = p.a_ion, p.ion_offset

    def v_ionic(R):
        return a_ion * np.exp(-p.beta * R) - 1.0 / R + offset

    def v_covalent(R):
        return p.a_cov * np.exp(-p.beta_cov * R)

    def v_coupling(R):
        return p.b_coupling * np.exp(-p.gamma * R)

    def mu_ionic(R):
        return p.charge * np.asarray(R, dtype=float)

    def zero(R):
        return np.zeros_like(np.asarray(R, dtype=float))

    def dmu_ionic(R):
        return np.full_like(np.asarray(R, dtype=float), p.charge)

    record = asdict(p)
    record["window"] = list(p.window)
    record.update(a_ion=float(a_ion), ion_offset=float(offset))
    return DiabaticModel(
        v_ionic=v_ionic, v_covalent=v_covalent, v_coupling=v_coupling,
        mu_ionic=mu_ionic, mu_covalent=zero,
        dmu_ionic=dmu_ionic, dmu_covalent=zero,
        mass=float(p.mass), window=tuple(p.window), name=name,
        parameters=record,
    )


def lif_default():
    return ionic_covalent_model(name="lif-default")


MODEL_REGISTRY = {
    "lif-default": lif_default,
    "ionic-covalent": lambda **kw: ionic_covalent_model(name="ionic-covalent", **kw),
}


def get_model(name, **constants) -> DiabaticModel:
    try:
        factory = MODEL_REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; known: {sorted(MODEL_REGISTRY)}")
    if name == "lif-default" and constants:
        return ionic_covalent_model(name="lif-default", **constants)
    return factory(**constants)


def register_model(name, factory):
    MODEL_REGISTRY[name] = factory
