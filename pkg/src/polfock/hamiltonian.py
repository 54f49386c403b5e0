"""Polaritonic Hamiltonian H_pl(R) = H - T_R in three channel bases.

Channels are ordered electronic-state-major: index = state * n_fock + n.

* ``ADIABATIC_FOCK``  |g>, |e> times vacuum Fock states |n>
* ``DIABATIC_FOCK``   |I>, |C> times vacuum Fock states |n>
* ``DIABATIC_PFS``    |I>, |C> times polarized Fock states |n_I>, |n_C>

All builders are vectorized over R and return arrays of shape
R.shape + (2 n_fock, 2 n_fock).
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import fock
from .errors import NumericalError
from .model import DiabaticModel, adiabatize, evaluate


class BasisKind(str, enum.Enum):
    ADIABATIC_FOCK = "adiabatic-fock"
    DIABATIC_FOCK = "diabatic-fock"
    DIABATIC_PFS = "diabatic-pfs"


class Variant(str, enum.Enum):
    PAULI_FIERZ = "pf"
    RABI = "rabi"
    JAYNES_CUMMINGS = "jc"


@dataclass(frozen=True)
class BasisSpec:
    kind: BasisKind
    n_fock: int
    n_electronic: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", BasisKind(self.kind))
        if self.n_fock < 2:
            raise ValueError("n_fock must be at least 2")

    @property
    def n_channels(self):
        return self.n_electronic * self.n_fock

    def channel_labels(self):
        names = {BasisKind.ADIABATIC_FOCK: ("g", "e")}.get(self.kind, ("I", "C"))
        sub = {BasisKind.DIABATIC_PFS: ("_I", "_C")}.get(self.kind, ("", ""))
        return [f"{names[a]},{n}{sub[a]}" for a in range(2) for n in range(self.n_fock)]


def displacements(model: DiabaticModel, R, chi, omega_c):
    """Per-diabat dimensionless displacements chi mu_alpha(R) / omega_c."""
    v = evaluate(model, R)
    return chi * v.mu_ionic / omega_c, chi * v.mu_covalent / omega_c


def _photon_diag(n_fock, omega_c):
    return (np.arange(n_fock) + 0.5) * omega_c


def build_hpl_fock(model, R, chi, omega_c, variant=Variant.PAULI_FIERZ, n_fock=40):
    """H_pl in the adiabatic-Fock basis for the PF, Rabi or JC variant.

    PF keeps the full 2x2 dipole matrix coupled through chi (a^+ + a) and the
    dipole self-energy (chi mu)^2 / omega_c as the square of that matrix.
    Rabi keeps only mu_eg (a^+ + a); JC keeps only mu_eg (sigma^+ a + sigma a^+).
    """
    variant = Variant(variant)
    R = np.asarray(R, dtype=float)
    ad = adiabatize(model, R)
    nf = n_fock
    eye = np.eye(nf)
    H = np.zeros(R.shape + (2 * nf, 2 * nf))
    photon = np.diag(_photon_diag(nf, omega_c))
    H[..., :nf, :nf] = ad.e_ground[..., None, None] * eye + photon
    H[..., nf:, nf:] = ad.e_excited[..., None, None] * eye + photon
    Q = fock.quadrature_matrix(nf)

    if variant is Variant.PAULI_FIERZ:
        M = ad.dipole_matrix()
        M2 = M @ M
        for a in range(2):
            for b in range(2):
                blk = (chi * M[..., a, b])[..., None, None] * Q \
                    + (chi ** 2 / omega_c * M2[..., a, b])[..., None, None] * eye
                H[..., a * nf:(a + 1) * nf, b * nf:(b + 1) * nf] += blk
    elif variant is Variant.RABI:
        blk = (chi * ad.mu_eg)[..., None, None] * Q
        H[..., nf:, :nf] += blk
        H[..., :nf, nf:] += blk
    else:
        b_dag = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), k=-1)
        # sigma^+ a  ->  <e, n| ... |g, m> = mu_eg <n|a|m>
        blk = (chi * ad.mu_eg)[..., None, None] * b_dag.T
        H[..., nf:, :nf] += blk
        H[..., :nf, nf:] += np.swapaxes(blk, -1, -2)
    return H


def build_hpl_diabatic_fock(model, R, chi, omega_c, n_fock=40):
    """PF H_pl in the diabatic (dipole eigenstate) times vacuum-Fock basis."""
    R = np.asarray(R, dtype=float)
    v = evaluate(model, R)
    nf = n_fock
    eye = np.eye(nf)
    Q = fock.quadrature_matrix(nf)
    photon = np.diag(_photon_diag(nf, omega_c))
    H = np.zeros(R.shape + (2 * nf, 2 * nf))
    for a, (V, mu) in enumerate(((v.v_ionic, v.mu_ionic), (v.v_covalent, v.mu_covalent))):
        s = slice(a * nf, (a + 1) * nf)
        H[..., s, s] = ((V + chi ** 2 * mu ** 2 / omega_c)[..., None, None] * eye
                        + photon + (chi * mu)[..., None, None] * Q)
    H[..., :nf, nf:] = v.v_coupling[..., None, None] * eye
    H[..., nf:, :nf] = v.v_coupling[..., None, None] * eye
    return H


def build_hpl_pfs(model, R, chi, omega_c, n_fock=8):
    """PF H_pl in the polarized Fock basis.

    Diagonal blocks are V_alpha(R) + (n + 1/2) omega_c; the ionic/covalent
    block is V_IC(R) <n_I|m_C> with the overlap taken at the relative
    displacement chi (mu_I - mu_C) / omega_c. Permanent dipoles and the
    dipole self-energy are absorbed exactly into the displaced ladders.
    """
    R = np.asarray(R, dtype=float)
    v = evaluate(model, R)
    nf = n_fock
    lam = chi * (v.mu_ionic - v.mu_covalent) / omega_c
    S = fock.displacement_overlaps(lam, nf)
    photon = _photon_diag(nf, omega_c)
    H = np.zeros(R.shape + (2 * nf, 2 * nf))
    idx = np.arange(nf)
    H[..., idx, idx] = v.v_ionic[..., None] + photon
    H[..., nf + idx, nf + idx] = v.v_covalent[..., None] + photon
    blk = v.v_coupling[..., None, None] * S
    H[..., :nf, nf:] = blk
    H[..., nf:, :nf] = np.swapaxes(blk, -1, -2)
    return H


def build_hpl(model, R, chi, omega_c, basis: BasisSpec, variant=Variant.PAULI_FIERZ):
    variant = Variant(variant)
    if basis.kind is BasisKind.ADIABATIC_FOCK:
        return build_hpl_fock(model, R, chi, omega_c, variant, basis.n_fock)
    if variant is not Variant.PAULI_FIERZ:
        raise ValueError(f"variant {variant.value} is only defined in the adiabatic-Fock basis")
    if basis.kind is BasisKind.DIABATIC_FOCK:
        return build_hpl_diabatic_fock(model, R, chi, omega_c, basis.n_fock)
    return build_hpl_pfs(model, R, chi, omega_c, basis.n_fock)


# -- change of representation ------------------------------------------------

def extended_rows(n_fock, lam_max):
    """Number of PFS levels needed to hold a vacuum-Fock vector of size n_fock."""
    return int(n_fock + 30 + 4 * np.ceil(lam_max ** 2) + 8 * np.ceil(lam_max))


def to_pfs_amplitudes(coeffs, basis: BasisSpec, model, R, chi, omega_c, n_out=None):
    """Express channel amplitudes as <alpha, n_alpha | psi> components.

    ``coeffs`` has shape R.shape + (n_channels, ...) (trailing axes, e.g.
    eigenvector index, are carried along). Returns an array with the channel
    axis replaced by (2, n_out). For vacuum-Fock bases ``n_out`` defaults to
    enough levels that the transformation is norm-preserving to roundoff.
    """
    R = np.asarray(R, dtype=float)
    coeffs = np.asarray(coeffs)
    nf = basis.n_fock
    tail = coeffs.shape[R.ndim + 1:]
    c = coeffs.reshape(R.shape + (2, nf) + tail)
    if basis.kind is BasisKind.DIABATIC_PFS:
        if n_out is None or n_out == nf:
            return c
        out = np.zeros(R.shape + (2, n_out) + tail, dtype=c.dtype)
        k = min(n_out, nf)
        sel = (Ellipsis, slice(None), slice(0, k)) + (slice(None),) * len(tail)
        out[sel] = c[sel]
        return out

    if basis.kind is BasisKind.ADIABATIC_FOCK:
        U = adiabatize(model, R).rotation()  # (I, C) x (g, e)
        c = np.einsum("...ab,...bn" + "xyz"[:len(tail)] + "->...an" + "xyz"[:len(tail)], U, c)
    lam_i, lam_c = displacements(model, R, chi, omega_c)
    lam_max = float(max(np.max(np.abs(lam_i)), np.max(np.abs(lam_c))))
    n_out = extended_rows(nf, lam_max) if n_out is None else n_out
    out = []
    for a, lam in enumerate((lam_i, lam_c)):
        # <n_alpha|m> = <n| D(lam_alpha) |m>
        D = fock.displacement_overlaps(lam, n_out, nf)
        sub = c[(Ellipsis, a, slice(None)) + (slice(None),) * len(tail)]
        t = "xyz"[:len(tail)]
        out.append(np.einsum(f"...nm,...m{t}->...n{t}", D, sub))
    return np.stack(out, axis=R.ndim)


# -- eigensolve over a grid ----------------------------------------------------

@dataclass
class PolaritonField:
    grid: np.ndarray
    energies: np.ndarray          # (n_R, n_states)
    states: np.ndarray            # (n_R, n_channels, n_states)
    photon_number: np.ndarray     # (n_R, n_states)
    basis: BasisSpec
    variant: Variant
    chi: float
    omega_c: float
    meta: dict = field(default_factory=dict)

    @property
    def n_states(self):
        return self.energies.shape[1]


def _fix_phases(states, energies, degenerate_tol=1e-12):
    """Make eigenvectors continuous along the grid (in place)."""
    first = states[0]
    big = np.argmax(np.abs(first), axis=0)
    first *= np.sign(first[big, np.arange(first.shape[1])])[None, :]
    for i in range(1, states.shape[0]):
        prev, cur = states[i - 1], states[i]
        e = energies[i]
        j = 0
        n = cur.shape[1]
        while j < n:
            k = j + 1
            while k < n and abs(e[k] - e[k - 1]) < degenerate_tol:
                k += 1
            if k - j > 1:
                # align a degenerate subspace with the previous vectors
                O = prev[:, j:k].T @ cur[:, j:k]
                u, _, vt = np.linalg.svd(O)
                cur[:, j:k] = cur[:, j:k] @ (vt.T @ u.T)
            else:
                s = prev[:, j] @ cur[:, j]
                if s < 0:
                    cur[:, j] = -cur[:, j]
            j = k
    return states


def photon_numbers(states, basis, model, R, chi, omega_c):
    """<Phi| sum_alpha b_alpha^+ b_alpha |Phi> for each column of ``states``."""
    amp = to_pfs_amplitudes(states, basis, model, R, chi, omega_c)
    n = np.arange(amp.shape[-2])
    return np.einsum("n,...anj->...j", n, np.abs(amp) ** 2)


def eigensolve_field(model, grid, chi, omega_c, basis: BasisSpec,
                     variant=Variant.PAULI_FIERZ, n_states=None) -> PolaritonField:
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    H = build_hpl(model, grid, chi, omega_c, basis, variant)
    n_states = basis.n_channels if n_states is None else n_states
    try:
        E, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError:
        for r, h in zip(grid, H):
            try:
                np.linalg.eigh(h)
            except np.linalg.LinAlgError:
                raise NumericalError(f"eigensolver failed at R = {r}")
        raise
    if not np.all(np.isfinite(E)):
        bad = grid[np.nonzero(~np.all(np.isfinite(E), axis=1))[0][0]]
        raise NumericalError(f"non-finite eigenvalues at R = {bad}")
    E, V = E[:, :n_states], V[:, :, :n_states]
    _fix_phases(V, E)
    N = photon_numbers(V, basis, model, grid, chi, omega_c)
    return PolaritonField(grid, E, V, np.maximum(N, 0.0), basis, Variant(variant),
                          chi, omega_c)


def eigenvalues(model, R, chi, omega_c, basis, variant=Variant.PAULI_FIERZ, n_states=None):
    E = np.linalg.eigvalsh(build_hpl(model, R, chi, omega_c, basis, variant))
    return E if n_states is None else E[..., :n_states]


# -- avoided crossings -------------------------------------------------------------

def _gap_minima(R, gap):
    found = []
    for i in range(1, len(R) - 1):
        if gap[i] < gap[i - 1] and gap[i] <= gap[i + 1]:
            x0, x1, x2 = R[i - 1:i + 2]
            y0, y1, y2 = gap[i - 1:i + 2]
            denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
            a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
            b = (x2 ** 2 * (y0 - y1) + x1 ** 2 * (y2 - y0) + x0 ** 2 * (y1 - y2)) / denom
            if a > 0:
                xs = -b / (2 * a)
                c = y1 - a * x1 ** 2 - b * x1
                ys = a * xs ** 2 + b * xs + c
                if x0 <= xs <= x2 and ys >= 0:
                    found.append((float(xs), float(ys)))
                    continue
            found.append((float(x1), float(y1)))
    return found


def find_avoided_crossings(field: PolaritonField, j, k):
    """Local minima of E_k(R) - E_j(R): grid scan plus parabolic refinement."""
    gap = field.energies[:, k] - field.energies[:, j]
    return _gap_minima(field.grid, np.abs(gap))


def refine_crossing(model, chi, omega_c, basis, variant, j, k, lo, hi,
                    n_scan=201, xatol=1e-9):
    """Locate the avoided crossing of surfaces j < k inside [lo, hi].

    A coarse scan picks the smallest interior local minimum of the gap, then a
    bounded scalar minimization polishes it. Returns (R*, gap) or None when
    the gap has no interior minimum in the window.
    """
    def gap(r):
        E = eigenvalues(model, np.asarray(r), chi, omega_c, basis, variant)
        return E[..., k] - E[..., j]

    R = np.linspace(lo, hi, n_scan)
    g = gap(R)
    minima = [i for i in range(1, n_scan - 1) if g[i] <= g[i - 1] and g[i] <= g[i + 1]]
    if not minima:
        return None
    i = min(minima, key=lambda i: g[i])
    res = minimize_scalar(lambda r: float(gap(r)), bounds=(R[i - 1], R[i + 1]),
                          method="bounded", options={"xatol": xatol})
    best = (float(res.x), float(res.fun))
    if g[i] < best[1]:
        best = (float(R[i]), float(g[i]))
    return best


# -- truncation convergence ---------------------------------------------------------

def converge_n_fock(model, grid, chi, omega_c, kind, n_states=6, tol=1e-8,
                    start=4, n_limit=512):
    """Double n_fock until the lowest ``n_states`` eigenvalues move by < tol.

    Returns (n_fock, eigenvalues at that size).
    """
    n = start
    prev = eigenvalues(model, grid, chi, omega_c, BasisSpec(kind, n), n_states=n_states)
    while True:
        n2 = 2 * n
        if n2 > n_limit:
            raise NumericalError(f"no convergence of {kind} up to n_fock = {n_limit}")
        cur = eigenvalues(model, grid, chi, omega_c, BasisSpec(kind, n2), n_states=n_states)
        if np.max(np.abs(cur - prev)) < tol:
            return n2, cur
        n, prev = n2, cur


def minimal_n_fock(model, grid, chi, omega_c, kind, reference, n_states=6,
                   tol=1e-8, n_limit=512):
    """Smallest n_fock whose lowest eigenvalues are within tol of ``reference``.

    The error is required to stay below tol for every larger size up to the
    first hit plus four, which guards against accidental agreement.
    """
    n = max(2, -(-n_states // 2))
    while n <= n_limit:
        E = eigenvalues(model, grid, chi, omega_c, BasisSpec(kind, n), n_states=n_states)
        if np.max(np.abs(E - reference)) < tol:
            ok = all(
                np.max(np.abs(eigenvalues(model, grid, chi, omega_c, BasisSpec(kind, m),
                                          n_states=n_states) - reference)) < tol
                for m in range(n + 1, n + 5))
            if ok:
                return n
        n += 1
    raise NumericalError(f"{kind} did not reach tol {tol} by n_fock = {n_limit}")


# -- nuclear kinetic energy in the PFS basis -------------------------------------------

@dataclass
class KineticBlocks:
    """(P - i A(R))^2 / 2M with A(R) = <m_alpha| d/dR |n_alpha>, block diagonal."""

    coupling: np.ndarray   # (n_R, n_channels, n_channels), real antisymmetric
    mass: float

    def apply(self, psi, k):
        """Return T psi for psi of shape (n_R, n_channels) on momentum grid k."""
        def P(f):
            return np.fft.ifft(k[:, None] * np.fft.fft(f, axis=0), axis=0)

        def A(f):
            return np.einsum("rij,rj->ri", self.coupling, f)

        q = P(psi) - 1j * A(psi)
        return (P(q) - 1j * A(q)) / (2.0 * self.mass)


def nuclear_kinetic_blocks(model, space: fock.FockSpace, grid, chi, omega_c=None):
    """Per-grid-point derivative couplings of the PFS basis.

    Only intra-diabat blocks are nonzero: the diabats are strict, so
    <C, n_C| d/dR |I, m_I> = 0.
    """
    omega_c = space.omega_c if omega_c is None else omega_c
    v = evaluate(model, grid)
    nf = space.n_max
    A = np.zeros(np.shape(grid) + (2 * nf, 2 * nf))
    unit = fock.pfs_derivative_coupling(space, 1.0, chi, omega_c)
    A[..., :nf, :nf] = v.dmu_ionic[..., None, None] * unit
    A[..., nf:, nf:] = v.dmu_covalent[..., None, None] * unit
    return KineticBlocks(A, model.mass)
