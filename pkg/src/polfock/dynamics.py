"""Split-operator propagation of the hybrid wavepacket on a nuclear grid.

The wavefunction is an array psi[R, channel] normalized as sum |psi|^2 dR = 1.
H_pl is time independent, so the channel potential at every grid point is
diagonalized once and its exponentials are cached.

Derivative couplings of the PFS basis, A(R) = c_alpha(R) (b^+ - b) with
c_alpha = -chi mu_alpha'(R) / omega_c, enter the kinetic energy as
(P - i A)^2 / 2M. In the eigenbasis of -i(b^+ - b) (R independent, eigenvalues
kappa_j) this is (P + c_alpha kappa_j)^2 / 2M per channel, which the gauge phase
Phi_j(R) = kappa_j * integral(c_alpha) = -kappa_j chi (mu_alpha(R) - mu_alpha(R_min)) / omega_c
turns into exp(-i Phi) P^2 exp(i Phi). The kinetic step is therefore exact for
any dipole function.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import fock
from .errors import ConfigError, NumericalError
from .hamiltonian import (BasisKind, BasisSpec, Variant, build_hpl,
                          eigensolve_field)
from .model import evaluate


@dataclass(frozen=True)
class Grid:
    r_min: float = 1.5
    r_max: float = 40.0
    n_points: int = 1024

    def __post_init__(self):
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise ConfigError("n_points must be a power of two", "grid.n_points")
        if not self.r_max > self.r_min:
            raise ConfigError("r_max must exceed r_min", "grid.r_max")

    @property
    def dR(self):
        return (self.r_max - self.r_min) / self.n_points

    @property
    def R(self):
        return self.r_min + self.dR * np.arange(self.n_points)

    @property
    def k(self):
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dR)


@dataclass(eq=False)
class HybridSystem:
    """Model, cavity parameters, basis and grid for one propagation."""

    model: object
    chi: float
    omega_c: float
    basis: BasisSpec
    grid: Grid
    variant: Variant = Variant.PAULI_FIERZ

    def __post_init__(self):
        self.variant = Variant(self.variant)
        if self.basis.kind is BasisKind.ADIABATIC_FOCK:
            raise ConfigError(
                "wavepacket dynamics runs in a strictly diabatic basis "
                "(diabatic-fock or diabatic-pfs); the adiabatic basis would need "
                "electronic nonadiabatic couplings", "basis.kind")
        if self.variant is not Variant.PAULI_FIERZ:
            raise ConfigError("dynamics is defined for the Pauli-Fierz variant only",
                              "variant")

    @cached_property
    def potential(self):
        return build_hpl(self.model, self.grid.R, self.chi, self.omega_c,
                         self.basis, self.variant)

    @cached_property
    def field(self):
        return eigensolve_field(self.model, self.grid.R, self.chi, self.omega_c,
                                self.basis, self.variant)

    @cached_property
    def _gauge(self):
        """(W, phases) for the derivative-coupling gauge transform, PFS only."""
        nf = self.basis.n_fock
        b_dag, b, _ = fock.ladder_matrices(fock.FockSpace(self.omega_c, nf))
        kappa, W = np.linalg.eigh(-1j * (b_dag - b))
        v = evaluate(self.model, self.grid.R)
        phases = np.empty((self.grid.n_points, 2, nf))
        for a, mu in enumerate((v.mu_ionic, v.mu_covalent)):
            shift = -(self.chi / self.omega_c) * (mu - mu[0])
            phases[:, a, :] = shift[:, None] * kappa[None, :]
        return W, phases.reshape(self.grid.n_points, -1)

    def describe(self):
        return {
            "model": self.model.describe(),
            "chi": self.chi,
            "omega_c_hartree": self.omega_c,
            "basis": {"kind": self.basis.kind.value, "n_fock": self.basis.n_fock},
            "grid": {"r_min": self.grid.r_min, "r_max": self.grid.r_max,
                     "n_points": self.grid.n_points},
            "variant": self.variant.value,
        }


@dataclass
class Wavepacket:
    amplitudes: np.ndarray   # (n_points, n_channels) complex
    system: HybridSystem
    time: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def basis(self):
        return self.system.basis

    @property
    def grid(self):
        return self.system.grid

    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dR)

    def normalize(self):
        self.amplitudes = self.amplitudes / np.sqrt(self.norm())
        return self

    def copy(self):
        return Wavepacket(self.amplitudes.copy(), self.system, self.time, dict(self.meta))


def gaussian(grid: Grid, r_g, alpha, edge_tol=1e-10):
    """exp(-alpha (R - R_g)^2) on the grid, refusing packets that touch an edge."""
    R = grid.R
    edges = np.exp(-alpha * (np.array([grid.r_min, grid.r_max]) - r_g) ** 2)
    if not grid.r_min < r_g < grid.r_max or np.any(edges > edge_tol):
        raise ConfigError(
            f"Gaussian at R_g = {r_g} with alpha = {alpha} is not contained in "
            f"[{grid.r_min}, {grid.r_max}]", "initial_state")
    return np.exp(-alpha * (R - r_g) ** 2)


def _frozen_pfs_vectors(system: HybridSystem, r_g, n_pfs):
    """Polariton eigenvectors at R_g in the PFS basis, shape (2 * n_pfs, n_states)."""
    basis = BasisSpec(BasisKind.DIABATIC_PFS, n_pfs)
    H = build_hpl(system.model, np.array([r_g]), system.chi, system.omega_c, basis)[0]
    return np.linalg.eigh(H)[1]


def _pfs_to_system(system: HybridSystem, amp_pfs, n_pfs):
    """Map psi[R, (alpha, n_alpha)] onto the channels of ``system``."""
    if system.basis.kind is BasisKind.DIABATIC_PFS:
        return amp_pfs
    v = evaluate(system.model, system.grid.R)
    nf = system.basis.n_fock
    blocks = amp_pfs.reshape(-1, 2, n_pfs)
    out = []
    for a, mu in enumerate((v.mu_ionic, v.mu_covalent)):
        D = fock.displacement_overlaps(-system.chi * mu / system.omega_c, nf, n_pfs)
        out.append(np.einsum("rmn,rn->rm", D, blocks[:, a, :]))
    return np.concatenate(out, axis=1)


def initial_state(system: HybridSystem, r_g, alpha, j, condon=True, n_pfs=None) -> Wavepacket:
    """N exp(-alpha (R - R_g)^2) Phi_j: a vertical excitation onto polariton j.

    With ``condon`` the polariton vector is frozen at R_g, written in the PFS
    basis and carried across the packet. This is basis independent and does not
    pick up a different diabatic character where surface j passes a tiny-gap
    crossing inside the packet. Without it Phi_j(R) is taken pointwise.
    """
    if not condon:
        field_ = system.field
        if not 0 <= j < field_.n_states:
            raise ConfigError(f"state index {j} out of range", "initial_state.state")
        g = gaussian(system.grid, r_g, alpha)
        amp = g[:, None] * field_.states[:, :, j]
        return Wavepacket(amp.astype(complex), system).normalize()
    n_pfs = _default_n_pfs(system) if n_pfs is None else n_pfs
    if not 0 <= j < 2 * n_pfs:
        raise ConfigError(f"state index {j} out of range", "initial_state.state")
    g = gaussian(system.grid, r_g, alpha)
    vec = _frozen_pfs_vectors(system, r_g, n_pfs)[:, j]
    amp = _pfs_to_system(system, g[:, None] * vec[None, :], n_pfs)
    return Wavepacket(amp.astype(complex), system, meta={"state": j}).normalize()


def _default_n_pfs(system):
    nf = system.basis.n_fock
    return nf if system.basis.kind is BasisKind.DIABATIC_PFS else min(nf, 16)


def channel_state(system: HybridSystem, r_g, alpha, channel) -> Wavepacket:
    """Gaussian placed in a single basis channel."""
    g = gaussian(system.grid, r_g, alpha)
    amp = np.zeros((system.grid.n_points, system.basis.n_channels), dtype=complex)
    amp[:, channel] = g
    return Wavepacket(amp, system).normalize()


def select_state_by_channel(system: HybridSystem, r_g, state, n, n_pfs=None):
    """Index of the polariton at R_g with the largest weight on |state, n_state>.

    ``state`` is 0 (ionic) or 1 (covalent); weights are taken in the PFS basis.
    """
    n_pfs = _default_n_pfs(system) if n_pfs is None else n_pfs
    if state not in (0, 1) or not 0 <= n < n_pfs:
        raise ConfigError(f"no channel ({state}, {n}) in a PFS basis of {n_pfs}",
                          "initial_state.channel")
    vecs = _frozen_pfs_vectors(system, r_g, n_pfs)
    return int(np.argmax(np.abs(vecs[state * n_pfs + n, :]) ** 2))


def absorbing_mask(grid: Grid, width):
    """Smooth cos^(1/8) mask over the last ``width`` bohr before R_max."""
    R = grid.R
    start = grid.r_max - width
    mask = np.ones_like(R)
    inside = R > start
    x = (R[inside] - start) / width
    mask[inside] = np.cos(0.5 * np.pi * x) ** 0.125
    return mask


class SplitOperator:
    """Second-order symmetric split-operator propagator.

    One step is exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2); consecutive half
    steps of V are fused between snapshots.
    """

    def __init__(self, system: HybridSystem, dt, include_dc=False, absorber_width=None):
        self.system = system
        self.dt = float(dt)
        self.include_dc = bool(include_dc) and system.basis.kind is BasisKind.DIABATIC_PFS
        self.mask = None if not absorber_width else absorbing_mask(system.grid, absorber_width)
        grid = system.grid
        e, Q = np.linalg.eigh(system.potential)
        self._eig = (e, Q)
        self._v_half = self._expv(0.5 * self.dt)
        self._v_full = self._expv(self.dt)
        self._t_phase = np.exp(-1j * grid.k ** 2 * self.dt / (2.0 * system.model.mass))
        if self.include_dc:
            W, phases = system._gauge
            self._W = W
            self._gauge = np.exp(1j * phases)

    def _expv(self, tau):
        e, Q = self._eig
        return np.einsum("rij,rj,rkj->rik", Q, np.exp(-1j * e * tau), Q.conj())

    @staticmethod
    def _apply(U, psi):
        return np.einsum("rij,rj->ri", U, psi)

    def _rotate(self, psi, inverse=False):
        n = psi.shape[0]
        nf = self._W.shape[0]
        blocks = psi.reshape(n, 2, nf)
        W = self._W if inverse else self._W.conj().T
        return np.einsum("ij,raj->rai", W, blocks).reshape(n, -1)

    def kinetic(self, psi):
        if not self.include_dc:
            return np.fft.ifft(self._t_phase[:, None] * np.fft.fft(psi, axis=0), axis=0)
        phi = self._gauge * self._rotate(psi)
        phi = np.fft.ifft(self._t_phase[:, None] * np.fft.fft(phi, axis=0), axis=0)
        return self._rotate(np.conj(self._gauge) * phi, inverse=True)

    def kinetic_energy(self, psi):
        """<psi| (P - i A)^2 / 2M |psi> (A = 0 unless derivative couplings are on)."""
        grid = self.system.grid
        phi = self._gauge * self._rotate(psi) if self.include_dc else psi
        ft = np.fft.fft(phi, axis=0)
        w = np.sum(np.abs(ft) ** 2, axis=1)
        return float(np.sum(w * grid.k ** 2) / (2.0 * self.system.model.mass)
                     * grid.dR / grid.n_points)

    def potential_energy(self, psi):
        V = self.system.potential
        return float(np.real(np.einsum("ri,rij,rj->", psi.conj(), V, psi)) * self.system.grid.dR)

    def energy(self, psi):
        return self.kinetic_energy(psi) + self.potential_energy(psi)

    def _block(self, psi, n):
        """Advance n full symmetric steps."""
        psi = self._apply(self._v_half, psi)
        for i in range(n):
            psi = self.kinetic(psi)
            psi = self._apply(self._v_full if i < n - 1 else self._v_half, psi)
            if self.mask is not None:
                psi = psi * self.mask[:, None]
        return psi

    def run(self, wp: Wavepacket, n_steps, stride=None, norm_tol=1e-8):
        """Yield snapshots (including the initial one) every ``stride`` steps."""
        stride = n_steps if not stride else int(stride)
        psi = np.array(wp.amplitudes, dtype=complex)
        grid = self.system.grid
        norm0 = float(np.sum(np.abs(psi) ** 2) * grid.dR)
        t0 = wp.time
        yield Wavepacket(psi.copy(), wp.system, t0, dict(wp.meta))
        done = 0
        while done < n_steps:
            n = min(stride, n_steps - done)
            psi = self._block(psi, n)
            done += n
            if self.mask is None:
                drift = abs(float(np.sum(np.abs(psi) ** 2) * grid.dR) - norm0)
                if drift > norm_tol * max(1.0, done / 1000.0):
                    raise NumericalError(
                        f"norm drift {drift:.2e} after {done} steps; reduce dt or "
                        f"enlarge the grid")
            yield Wavepacket(psi.copy(), wp.system, t0 + done * self.dt, dict(wp.meta))


def propagate(wp: Wavepacket, dt, n_steps, stride=None, include_dc=False,
              absorber_width=None):
    """Generator of snapshots from a split-operator run (see :class:`SplitOperator`)."""
    prop = SplitOperator(wp.system, dt, include_dc=include_dc, absorber_width=absorber_width)
    return prop.run(wp, n_steps, stride)


def propagate_with_derivative_couplings(wp: Wavepacket, dt, n_steps, stride=None,
                                        include_dc=True, absorber_width=None):
    return propagate(wp, dt, n_steps, stride, include_dc, absorber_width)


def to_diabatic_fock(wp: Wavepacket, n_fock) -> Wavepacket:
    """Re-express a PFS wavepacket in the diabatic vacuum-Fock basis.

    |n_alpha> = D(-lam_alpha)|n>, so <m|n_alpha> = <m| D(-lam_alpha) |n>.
    """
    sys_ = wp.system
    if sys_.basis.kind is not BasisKind.DIABATIC_PFS:
        raise ValueError("expected a diabatic-pfs wavepacket")
    v = evaluate(sys_.model, sys_.grid.R)
    nf = sys_.basis.n_fock
    blocks = wp.amplitudes.reshape(-1, 2, nf)
    out = []
    for a, mu in enumerate((v.mu_ionic, v.mu_covalent)):
        D = fock.displacement_overlaps(-sys_.chi * mu / sys_.omega_c, n_fock, nf)
        out.append(np.einsum("rmn,rn->rm", D, blocks[:, a, :]))
    new_sys = HybridSystem(sys_.model, sys_.chi, sys_.omega_c,
                           BasisSpec(BasisKind.DIABATIC_FOCK, n_fock), sys_.grid)
    amp = np.concatenate(out, axis=1)
    return Wavepacket(amp, new_sys, wp.time, dict(wp.meta))
