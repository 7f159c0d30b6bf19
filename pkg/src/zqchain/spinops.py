"""Spin-1/2 operator algebra on tensor-product spaces.

All operators are dense complex matrices. Conventions shared by the whole
package: site 1 is the leftmost (most significant) Kronecker factor, and the
per-site basis is ordered alpha before beta, so product states enumerate
lexicographically (|aa..a>, |aa..b>, ...).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian

import numpy as np

HERMITICITY_RTOL = 1e-12
UNITARITY_ATOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10

# Site alphabets. "ab" is the single-spin Zeeman basis, "st4" the full
# singlet-triplet basis of one proton pair, "st2" its {T0, S0} restriction.
ALPHABETS = {
    "ab": ("a", "b"),
    "st4": ("T+1", "T0", "S0", "T-1"),
    "st2": ("T0", "S0"),
}


def basis_tag(alphabet: str, n_sites: int) -> str:
    """Canonical tag naming the ordered product basis of a space."""
    return f"{alphabet}:{n_sites}"


@dataclass(frozen=True)
class ProductLabel:
    """One product basis state: a symbol per site over a fixed alphabet."""

    sites: tuple[str, ...]
    alphabet: str

    def __post_init__(self):
        symbols = ALPHABETS.get(self.alphabet)
        if symbols is None:
            raise ValueError(f"unknown alphabet {self.alphabet!r}")
        bad = [s for s in self.sites if s not in symbols]
        if bad:
            raise ValueError(f"symbols {bad} not in alphabet {self.alphabet!r}")
        object.__setattr__(self, "sites", tuple(self.sites))

    def __str__(self) -> str:
        return "".join(self.sites)

    def __len__(self) -> int:
        return len(self.sites)


def product_labels(alphabet: str, n_sites: int) -> list[ProductLabel]:
    """All product labels of a space, lexicographic, site 1 most significant."""
    symbols = ALPHABETS[alphabet]
    return [ProductLabel(s, alphabet) for s in _cartesian(symbols, repeat=n_sites)]


def parse_label(text: str, alphabet: str) -> ProductLabel:
    """Parse a concatenated label such as ``"S0S0S0T0"`` or ``"abba"``."""
    symbols = sorted(ALPHABETS[alphabet], key=len, reverse=True)
    sites = []
    pos = 0
    while pos < len(text):
        for sym in symbols:
            if text.startswith(sym, pos):
                sites.append(sym)
                pos += len(sym)
                break
        else:
            raise ValueError(f"cannot parse {text!r} over alphabet {alphabet!r}")
    return ProductLabel(tuple(sites), alphabet)


def label_index(label: ProductLabel) -> int:
    """Row/column index of a product label in its canonical basis ordering."""
    symbols = ALPHABETS[label.alphabet]
    base = len(symbols)
    idx = 0
    for s in label.sites:
        idx = idx * base + symbols.index(s)
    return idx


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix tagged with the ordered basis it acts in."""

    entries: np.ndarray
    basis_tag: str

    def __post_init__(self):
        mat = np.array(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex column vector; basis states are unit-normalized."""

    entries: np.ndarray

    def __post_init__(self):
        vec = np.array(self.entries, dtype=complex).reshape(-1)
        vec.setflags(write=False)
        object.__setattr__(self, "entries", vec)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def hermitian_operator(entries: np.ndarray, tag: str) -> Operator:
    """Wrap a matrix as an Operator, asserting Hermiticity once at construction."""
    mat = np.asarray(entries, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 1.0)
    dev = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if dev > HERMITICITY_RTOL * scale:
        raise ValueError(f"matrix not Hermitian: max deviation {dev:.3e} "
                         f"(relative tolerance {HERMITICITY_RTOL})")
    return Operator(mat, tag)


# single-spin Cartesian operators, eigenvalues +-1/2 for z
_IX = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
_IY = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex)
_IZ = 0.5 * np.array([[1, 0], [0, -1]], dtype=complex)
_SINGLE = {"x": _IX, "y": _IY, "z": _IZ}


def single_spin_op(axis: str) -> Operator:
    """Cartesian spin-1/2 operator I_x, I_y or I_z on one site."""
    if axis not in _SINGLE:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    return Operator(_SINGLE[axis], basis_tag("ab", 1))


def kron_lift(site_matrix: np.ndarray, site: int, n_sites: int,
              local_dim: int = 2) -> np.ndarray:
    """Embed a single-site matrix at ``site`` with identities elsewhere."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} out of range 1..{n_sites}")
    left = np.eye(local_dim ** (site - 1))
    right = np.eye(local_dim ** (n_sites - site))
    return np.kron(np.kron(left, site_matrix), right)


def lift(op: Operator, site: int, n_sites: int) -> Operator:
    """Kronecker embedding of a one-spin operator into an n-spin space."""
    if op.dim != 2:
        raise ValueError("lift expects a single-spin (2x2) operator")
    return Operator(kron_lift(op.entries, site, n_sites), basis_tag("ab", n_sites))


def total_Iz(n_sites: int) -> Operator:
    """Sum of lifted I_z over all sites; diagonal in the alpha/beta basis."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    dim = 2 ** n_sites
    # popcount of the basis index = number of beta sites
    diag = np.array([0.5 * (n_sites - 2 * bin(i).count("1")) for i in range(dim)])
    return Operator(np.diag(diag.astype(complex)), basis_tag("ab", n_sites))


def st_vectors() -> tuple[StateVector, StateVector, StateVector, StateVector]:
    """Two-spin singlet/triplet states in the order (T+1, T0, S0, T-1).

    Components refer to the two-spin product basis (aa, ab, ba, bb).
    """
    s = 1 / np.sqrt(2)
    tp1 = StateVector([1, 0, 0, 0])
    t0 = StateVector([0, s, s, 0])
    s0 = StateVector([0, s, -s, 0])
    tm1 = StateVector([0, 0, 0, 1])
    for v in (tp1, t0, s0, tm1):
        assert abs(v.norm - 1.0) < 1e-12
    return tp1, t0, s0, tm1


def expectation(op: Operator, rho: Operator) -> float:
    """Tr(O rho) for Hermitian O and rho; the imaginary residue is guarded.

    Raises if dimensions or basis tags differ, or if the imaginary part
    exceeds the residue tolerance (a symptom of non-Hermitian inputs).
    """
    if op.basis_tag != rho.basis_tag:
        raise ValueError(f"basis mismatch: {op.basis_tag} vs {rho.basis_tag}")
    if op.dim != rho.dim:
        raise ValueError(f"dimension mismatch: {op.dim} vs {rho.dim}")
    val = complex(np.einsum("ij,ji->", op.entries, rho.entries))
    guard = IMAG_RESIDUE_TOL * max(1.0, abs(val.real))
    if abs(val.imag) > guard:
        raise ValueError(f"imaginary residue {val.imag:.3e} exceeds tolerance; "
                         "inputs are likely not Hermitian")
    return val.real


def basis_change(op: Operator, unitary: np.ndarray, new_tag: str) -> Operator:
    """Similarity transform U^dag O U into the basis named by ``new_tag``."""
    u = np.asarray(unitary, dtype=complex)
    if u.shape != (op.dim, op.dim):
        raise ValueError(f"unitary shape {u.shape} does not match dim {op.dim}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(op.dim))))
    if dev > UNITARITY_ATOL:
        raise ValueError(f"matrix not unitary: max |U^dag U - 1| = {dev:.3e}")
    return Operator(u.conj().T @ op.entries @ u, new_tag)


def commutator(a: Operator, b: Operator) -> np.ndarray:
    """[A, B] as a plain matrix (anti-Hermitian for Hermitian inputs)."""
    return a.entries @ b.entries - b.entries @ a.entries
