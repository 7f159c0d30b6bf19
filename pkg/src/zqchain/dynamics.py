"""Initial states, exact density-operator propagation, sampled observables.

Propagation solves the Liouville-von Neumann equation exactly through one
Hermitian eigendecomposition of the Hamiltonian, reused for every time
sample: rho(t) = exp(-i 2 pi H t) rho(0) exp(+i 2 pi H t) with H in Hz.

Initial states are deviation density operators (traceless, not positive
semidefinite). XY patterns are normalized so each site reads +-1/2, i.e.
the trajectories are per-site polarizations; methylene-chain patterns are
literal signed sums of product-state projectors, so populations read +-1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import _bit
from .spinops import (
    IMAG_RESIDUE_TOL,
    Operator,
    ProductLabel,
    basis_tag,
    hermitian_operator,
    label_index,
    st_vectors,
)

DEFAULT_DT = 0.005     # s
DEFAULT_HORIZON = 20.0  # s


@dataclass(frozen=True)
class InitialPattern:
    """Sites singled out in an initial state (flipped, or carrying a T0)."""

    n: int
    flips: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "flips", frozenset(self.flips))
        bad = [s for s in self.flips if not 1 <= s <= self.n]
        if bad:
            raise ValueError(f"sites {bad} outside 1..{self.n}")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled expectation values, starting at t = 0."""

    dt: float
    values: np.ndarray
    observable_id: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dt


def initial_xy(pattern: InitialPattern) -> Operator:
    """Signed sum of I_z terms, scaled so each site reads +-1/2.

    The raw deviation operator sum_i s_i I_iz (s_i = -1 on flipped sites)
    is scaled by 2^(1-n) so that Tr(I_iz rho0) equals the per-site
    polarization +-1/2; trace remains zero.
    """
    n = pattern.n
    dim = 2 ** n
    diag = np.zeros(dim)
    for idx in range(dim):
        val = 0.0
        for site in range(1, n + 1):
            m = 0.5 - _bit(idx, site, n)
            val += -m if site in pattern.flips else m
        diag[idx] = val
    rho = np.diag(diag.astype(complex)) * 2.0 ** (1 - n)
    return hermitian_operator(rho, basis_tag("ab", n))


def st2_product_vector(label: ProductLabel) -> np.ndarray:
    """Full-space (alpha/beta, 2n spins) vector of a {T0,S0} product label."""
    if label.alphabet != "st2":
        raise ValueError("expected an st2 label")
    _, t0, s0, _ = st_vectors()
    vec = np.array([1.0 + 0j])
    for sym in label.sites:
        vec = np.kron(vec, t0.entries if sym == "T0" else s0.entries)
    return vec


def population_op(label: ProductLabel, full_space: bool = False) -> Operator:
    """Projector |label><label| on a product state; trace one.

    With ``full_space`` a {T0,S0} label is embedded in the 2n-spin
    alpha/beta space, for cross-checking the restricted engine against the
    full one.
    """
    if full_space:
        vec = st2_product_vector(label)
        proj = np.outer(vec, vec.conj())
        return hermitian_operator(proj, basis_tag("ab", 2 * len(label)))
    idx = label_index(label)
    size = _space_dim(label)
    proj = np.zeros((size, size), dtype=complex)
    proj[idx, idx] = 1.0
    return hermitian_operator(proj, basis_tag(label.alphabet, len(label)))


ALPHABET_DIMS = {"ab": 2, "st2": 2, "st4": 4}


def _space_dim(label: ProductLabel) -> int:
    return ALPHABET_DIMS[label.alphabet] ** len(label)


def _t0_label(n: int, t0_site: int) -> ProductLabel:
    sites = tuple("T0" if s == t0_site else "S0" for s in range(1, n + 1))
    return ProductLabel(sites, "st2")


def initial_aliphatic(pattern: InitialPattern, signs,
                      full_space: bool = False) -> Operator:
    """Signed sum of projectors with a single T0 walking the pattern sites.

    ``pattern.flips`` lists the sites that carry the T0 of one projector
    term each (all other pairs are S0); ``signs`` is the parallel list of
    +-1 term signs, ordered by ascending site. The standard inversion
    pattern on n=4 is sites (1,2,3,4) with signs (+,+,+,-).
    """
    sites = sorted(pattern.flips)
    signs = list(signs)
    if len(signs) != len(sites):
        raise ValueError(f"{len(sites)} pattern sites but {len(signs)} signs")
    if any(s not in (1, -1, 1.0, -1.0) for s in signs):
        raise ValueError("signs must be +-1")
    if not sites:
        raise ValueError("aliphatic initial pattern needs at least one site")
    n = pattern.n
    terms = [(population_op(_t0_label(n, site), full_space), float(sign))
             for site, sign in zip(sites, signs)]
    rho = sum(sign * op.entries for op, sign in terms)
    return hermitian_operator(rho, terms[0][0].basis_tag)


class Propagator:
    """One eigendecomposition of H (in Hz), shared across all time samples."""

    def __init__(self, hamiltonian: Operator):
        self.basis_tag = hamiltonian.basis_tag
        self.dim = hamiltonian.dim
        try:
            self.energies, self.modes = np.linalg.eigh(hamiltonian.entries)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ValueError("eigendecomposition failed; Hamiltonian is "
                             "likely not Hermitian") from exc

    def evolve(self, rho0: Operator, t: float) -> Operator:
        """rho(t) for a single time; exact unitary evolution."""
        self._check(rho0)
        phases = np.exp(-2j * np.pi * self.energies * t)
        u = self.modes * phases  # V diag(phases)
        rho_t = u @ (self.modes.conj().T @ rho0.entries @ self.modes) @ u.conj().T
        rho_t = 0.5 * (rho_t + rho_t.conj().T)  # strip roundoff skew
        return hermitian_operator(rho_t, rho0.basis_tag)

    def series(self, rho0: Operator, observable: Operator, dt: float,
               steps: int, observable_id: str = "obs") -> Trajectory:
        """Sampled Tr(O rho(t)) at t = 0, dt, ..., steps*dt.

        Works in the eigenbasis: the signal is a bilinear form in the
        per-level phase vector, so cost per sample is one dim^2 product
        rather than a dim^3 conjugation.
        """
        self._check(rho0)
        self._check(observable)
        if dt <= 0 or steps < 0:
            raise ValueError("need dt > 0 and steps >= 0")
        v = self.modes
        rho_e = v.conj().T @ rho0.entries @ v
        obs_e = v.conj().T @ observable.entries @ v
        bilinear = rho_e * obs_e.T

        out = np.empty(steps + 1)
        chunk = max(1, min(steps + 1, 2 ** 22 // max(self.dim, 1)))
        for start in range(0, steps + 1, chunk):
            tt = np.arange(start, min(start + chunk, steps + 1)) * dt
            phases = np.exp(-2j * np.pi * np.outer(tt, self.energies))
            sig = np.einsum("tj,jk,tk->t", phases, bilinear, phases.conj(),
                            optimize=True)
            residue = float(np.max(np.abs(sig.imag)))
            scale = max(1.0, float(np.max(np.abs(sig.real))))
            if residue > IMAG_RESIDUE_TOL * scale:
                raise ValueError(f"imaginary residue {residue:.3e} in series; "
                                 "non-Hermitian inputs?")
            out[start:start + len(tt)] = sig.real
        return Trajectory(dt, out, observable_id)

    def _check(self, op: Operator):
        if op.basis_tag != self.basis_tag or op.dim != self.dim:
            raise ValueError(f"operator basis {op.basis_tag} (dim {op.dim}) "
                             f"does not match propagator {self.basis_tag}")


def propagate(hamiltonian: Operator, rho0: Operator, t: float) -> Operator:
    return Propagator(hamiltonian).evolve(rho0, t)


def observe_series(hamiltonian: Operator, rho0: Operator, observable: Operator,
                   dt: float = DEFAULT_DT, steps: int | None = None,
                   observable_id: str = "obs") -> Trajectory:
    if steps is None:
        steps = int(round(DEFAULT_HORIZON / dt))
    return Propagator(hamiltonian).series(rho0, observable, dt, steps,
                                          observable_id)


def wavefront_arrival(trajectories, threshold: float) -> list[float | None]:
    """First sampled time each trajectory drops below ``threshold``.

    Thresholds live in the open interval (-1/2, +1/2) of per-site
    polarization readings. Sites that never cross within the horizon are
    reported as None, not as an error.
    """
    if not -0.5 < threshold < 0.5:
        raise ValueError("threshold must lie in (-1/2, +1/2)")
    out: list[float | None] = []
    for traj in trajectories:
        below = np.nonzero(traj.values < threshold)[0]
        out.append(float(below[0] * traj.dt) if len(below) else None)
    return out


def linear_fit_r2(x, y) -> tuple[float, float, float]:
    """Least-squares line fit returning (slope, intercept, R^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def format_trajectory_csv(traj: Trajectory) -> str:
    """Delimiter-separated export: header then one row per sample, 12 digits."""
    lines = ["t_seconds,value"]
    for i, v in enumerate(traj.values):
        lines.append(f"{i * traj.dt:.12g},{v:.12g}")
    return "\n".join(lines) + "\n"
