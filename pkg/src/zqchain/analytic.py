"""Closed-form spectra: tridiagonal Toeplitz eigenpairs and transition tables.

The single-excitation blocks of both chain Hamiltonians are tridiagonal
Toeplitz matrices, whose eigenpairs are standing-wave sinusoids with
closed-form energies E_k = A + 2*Delta*cos(k*pi/(n+1)). Levels are indexed
k = 1..n with E_1 the largest eigenvalue for Delta > 0, so transition
names nu_12, nu_23, ... count down from the top of the block.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import AliphaticParams, build_aliphatic_restricted
from .spinops import StateVector

# below this separation two transitions are reported as coincident
DEGENERACY_TOL_HZ = 1e-6


@dataclass(frozen=True)
class ToeplitzSpec:
    """Real symmetric tridiagonal Toeplitz matrix: diagonal A, off-diagonal Delta."""

    a: float
    delta: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1")


def toeplitz_matrix(spec: ToeplitzSpec) -> np.ndarray:
    """Dense matrix for a ToeplitzSpec (used by oracles and block dumps)."""
    m = spec.a * np.eye(spec.n)
    off = spec.delta * np.ones(spec.n - 1)
    return m + np.diag(off, 1) + np.diag(off, -1)


def toeplitz_eigenvalues(spec: ToeplitzSpec) -> np.ndarray:
    """E_k = A + 2 Delta cos(k pi / (n+1)) for k = 1..n."""
    k = np.arange(1, spec.n + 1)
    return spec.a + 2 * spec.delta * np.cos(k * np.pi / (spec.n + 1))


def toeplitz_eigenvector(k: int, n: int) -> StateVector:
    """Standing-wave eigenvector with wavenumber k; independent of A and Delta."""
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    i = np.arange(1, n + 1)
    vec = np.sqrt(2 / (n + 1)) * np.sin(i * k * np.pi / (n + 1))
    return StateVector(vec)


@dataclass(frozen=True)
class TransitionTable:
    """Level energies (k, E_k) and all pairwise transitions (k, l, nu_kl)."""

    energies: tuple[tuple[int, float], ...]
    transitions: tuple[tuple[int, int, float], ...]

    def frequency(self, k: int, l: int) -> float:
        for kk, ll, nu in self.transitions:
            if (kk, ll) == (k, l):
                return nu
        raise KeyError(f"no transition ({k},{l})")

    def distinct_frequencies(self, tol: float = DEGENERACY_TOL_HZ) -> list[float]:
        """Sorted transition frequencies with degenerate lines merged."""
        out: list[float] = []
        for nu in sorted(abs(t[2]) for t in self.transitions):
            if not out or abs(nu - out[-1]) > tol:
                out.append(nu)
        return out


def transition_table(energies) -> TransitionTable:
    """All pairwise differences nu_kl = E_k - E_l (k < l) of a level list."""
    evals = [float(e) for e in energies]
    if len(evals) < 2:
        raise ValueError("need at least two energies")
    ek = tuple((k + 1, e) for k, e in enumerate(evals))
    trans = tuple((k + 1, l + 1, evals[k] - evals[l])
                  for k in range(len(evals)) for l in range(k + 1, len(evals)))
    return TransitionTable(ek, trans)


def xy_predicted_spectrum(n: int, j: float) -> TransitionTable:
    """Transition table of the XY single-excitation block (A=0, Delta=J/2)."""
    return transition_table(toeplitz_eigenvalues(ToeplitzSpec(0.0, j / 2, n)))


def pt2_splitting_estimate(delta_j: float, j_gem: float) -> float:
    """Closed-form second-order estimate of the type-II line splitting, signed."""
    if j_gem == 0:
        raise ValueError("j_gem must be nonzero")
    return 0.25 * delta_j ** 2 / j_gem


def aliphatic_predicted_spectrum(params: AliphaticParams,
                                 order: int) -> TransitionTable:
    """Predicted zero-quantum transitions of the methylene chain.

    order 0
        The pure Toeplitz table with Delta = delta_j/2 (identical to the XY
        prediction at J = delta_j); type-II mixing ignored.
    order 2
        Frequencies from exact eigenvalues of the restricted Hamiltonian,
        using the n levels dominated by the single-T0 manifold (one central
        triplet walking a chain of singlets, as prepared by the standard
        initial patterns). Captures the type-II level shifts.
    """
    if order == 0:
        spec = ToeplitzSpec(0.0, params.delta_j / 2, params.n)
        return transition_table(toeplitz_eigenvalues(spec))
    if order != 2:
        raise ValueError("order must be 0 or 2")

    n = params.n
    h = build_aliphatic_restricted(params)
    evals, evecs = np.linalg.eigh(h.entries)
    # basis states with n-1 excitations (S0 count) form the single-T0 manifold
    manifold = np.array([bin(i).count("1") == n - 1 for i in range(2 ** n)])
    weights = (np.abs(evecs[manifold, :]) ** 2).sum(axis=0)
    chosen = np.sort(np.argsort(weights)[-n:])
    levels = np.sort(evals[chosen].real)[::-1]
    return transition_table(levels)


def format_transition_table(table: TransitionTable,
                            extra_lines: list[str] | None = None) -> str:
    """Structured text: energies then (k, l, nu_kl) rows, 4 decimals, Hz."""
    lines = ["# energies (Hz)"]
    for k, e in table.energies:
        lines.append(f"  E_{k} = {e:.4f}")
    lines.append("# transitions nu_kl = E_k - E_l (Hz)")
    for k, l, nu in table.transitions:
        lines.append(f"  nu_{k}{l} = {nu:.4f}")
    if extra_lines:
        lines.append("# notes")
        lines.extend(f"  {s}" for s in extra_lines)
    lines.append("")
    return "\n".join(lines)
