"""Dense linear algebra over labelled photon-mode bases.

Every basis state is a tuple of :class:`ModeLabel` objects, one per photon
slot. Factorisation for partial traces and partial transposes is worked out
from the particle tags carried by the labels, never from positional index
arithmetic, so a basis that does not factor into the requested groups is
rejected instead of being silently mis-traced.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

STRUCT_TOL = 1e-10
EQ_TOL = 1e-12


class StructureError(ValueError):
    """Basis does not factor the way an operation needs it to."""


class Particle(str, enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"
    LOSS = "loss"


class Pol(str, enum.Enum):
    H = "H"
    V = "V"


@dataclass(frozen=True, order=True)
class ModeLabel:
    """One single-photon mode: which particle, which path, which polarisation.

    Path 0 is reserved for the loss modes that absorb the photon lost between
    the two sources.
    """

    particle: Particle
    path: int
    polarization: Pol

    def __post_init__(self):
        object.__setattr__(self, "particle", Particle(self.particle))
        object.__setattr__(self, "polarization", Pol(self.polarization))
        if self.path not in (0, 1, 2):
            raise ValueError(f"path must be 0, 1 or 2, got {self.path}")
        if (self.particle is Particle.LOSS) != (self.path == 0):
            raise ValueError("loss modes live on path 0 and only there")

    def __str__(self):
        tag = {"alpha": "a", "beta": "b", "loss": "0"}[self.particle.value]
        return f"{self.polarization.value}_{tag}{self.path or ''}"


def mode(particle: str, path: int, pol: str) -> ModeLabel:
    return ModeLabel(Particle(particle), path, Pol(pol))


State = tuple  # tuple[ModeLabel, ...]


@dataclass(frozen=True)
class Basis:
    """Ordered list of basis states, each a tuple of mode labels."""

    states: tuple

    def __post_init__(self):
        states = tuple(tuple(s) if not isinstance(s, ModeLabel) else (s,)
                       for s in self.states)
        if len(set(states)) != len(states):
            raise StructureError("duplicate basis states")
        for s in states:
            if len(set(s)) != len(s):
                raise StructureError(f"repeated mode inside state {s}")
        object.__setattr__(self, "states", states)

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        if isinstance(state, ModeLabel):
            state = (state,)
        return self.states.index(tuple(state))

    @classmethod
    def single(cls, modes: Iterable[ModeLabel]) -> "Basis":
        """Single-photon basis from a list of modes."""
        return cls(tuple((m,) for m in modes))

    def product(self, other: "Basis") -> "Basis":
        return Basis(tuple(a + b for a in self.states for b in other.states))

    def labels(self) -> list[str]:
        return [",".join(str(m) for m in s) for s in self.states]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Operator:
    basis: Basis
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _freeze(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructureError(f"operator must be square, got {m.shape}")
        if m.shape[0] != self.basis.dim:
            raise StructureError(
                f"matrix dim {m.shape[0]} does not match basis dim {self.basis.dim}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dag(self) -> "Operator":
        return Operator(self.basis, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def elem(self, bra_state, ket_state) -> complex:
        """Matrix element <bra_state| op |ket_state>."""
        return complex(self.matrix[self.basis.index(bra_state),
                                   self.basis.index(ket_state)])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def is_hermitian(self, tol: float = STRUCT_TOL) -> bool:
        return self.hermiticity_error() < tol

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __matmul__(self, other: "Operator") -> "Operator":
        if other.basis != self.basis:
            raise StructureError("operators live on different bases")
        return Operator(self.basis, self.matrix @ other.matrix)

    def allclose(self, other: "Operator", tol: float = EQ_TOL) -> bool:
        return self.basis == other.basis and bool(
            np.max(np.abs(self.matrix - other.matrix), initial=0.0) < tol)


@dataclass(frozen=True)
class Ket:
    basis: Basis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _freeze(self.amplitudes)
        if v.shape != (self.basis.dim,):
            raise StructureError(
                f"ket of shape {v.shape} does not match basis dim {self.basis.dim}")
        if not np.all(np.isfinite(v)):
            raise ValueError("ket has non-finite amplitudes")
        # sub-normalised kets are fine (loss branches)
        if np.vdot(v, v).real > 1 + STRUCT_TOL:
            raise ValueError("ket norm exceeds 1")
        object.__setattr__(self, "amplitudes", v)

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def projector(self) -> Operator:
        return Operator(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


def basis_ket(basis: Basis, state) -> Ket:
    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index(state)] = 1.0
    return Ket(basis, v)


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product with basis labels concatenated in (a, b) order."""
    return Operator(a.basis.product(b.basis), np.kron(a.matrix, b.matrix))


def _split(basis: Basis, tags: set) -> tuple[list, list, np.ndarray, np.ndarray]:
    """Split every basis state into (tagged part, rest) and check product structure.

    Returns the ordered distinct tagged parts, the ordered distinct rests, and
    for each basis index its position in both lists.
    """
    tagged, rest = [], []
    t_idx = np.empty(basis.dim, dtype=int)
    r_idx = np.empty(basis.dim, dtype=int)
    for i, s in enumerate(basis.states):
        t = tuple(m for m in s if m.particle in tags)
        r = tuple(m for m in s if m.particle not in tags)
        if t not in tagged:
            tagged.append(t)
        if r not in rest:
            rest.append(r)
        t_idx[i] = tagged.index(t)
        r_idx[i] = rest.index(r)
    pairs = set(zip(t_idx.tolist(), r_idx.tolist()))
    if len(pairs) != basis.dim or len(tagged) * len(rest) != basis.dim:
        raise StructureError(
            f"basis of dim {basis.dim} does not factor into "
            f"{sorted(t.value for t in tags)} x rest "
            f"({len(tagged)} x {len(rest)} distinct parts)")
    return tagged, rest, t_idx, r_idx


def _as_tags(tags) -> set:
    if isinstance(tags, (str, Particle)):
        tags = [tags]
    out = {Particle(t) for t in tags}
    if not out:
        raise ValueError("need at least one particle tag")
    return out


def partial_trace(rho: Operator, keep) -> Operator:
    """Trace out every mode whose particle tag is not in ``keep``."""
    keep = _as_tags(keep)
    kept, dropped, k_idx, d_idx = _split(rho.basis, keep)
    nk, nd = len(kept), len(dropped)
    grid = np.zeros((nk, nd, nk, nd), dtype=complex)
    grid[k_idx[:, None], d_idx[:, None], k_idx[None, :], d_idx[None, :]] = rho.matrix
    return Operator(Basis(tuple(kept)), np.einsum("idjd->ij", grid))


def partial_transpose(rho: Operator, subsystem) -> Operator:
    """Transpose the indices belonging to the particles tagged ``subsystem``."""
    tags = _as_tags(subsystem)
    tagged, rest, t_idx, r_idx = _split(rho.basis, tags)
    lookup = {(t, r): i for i, (t, r) in enumerate(zip(t_idx.tolist(), r_idx.tolist()))}
    n = rho.dim
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            # <t r| X^T |t' r'> = <t' r| X |t r'>
            out[i, j] = rho.matrix[lookup[(t_idx[j], r_idx[i])], lookup[(t_idx[i], r_idx[j])]]
    return Operator(rho.basis, out)


def hermitian_eigenvalues(m: Operator, tol: float = STRUCT_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian operator, in descending order."""
    err = m.hermiticity_error()
    if err >= tol:
        raise ValueError(f"operator is not Hermitian (max |A - A^dag| = {err:.3g})")
    h = 0.5 * (m.matrix + m.matrix.conj().T)
    return np.linalg.eigvalsh(h)[::-1]


def min_eigenvalue(m: Operator, tol: float = STRUCT_TOL) -> float:
    return float(hermitian_eigenvalues(m, tol)[-1])


def is_psd(m: Operator, tol: float = STRUCT_TOL) -> bool:
    return min_eigenvalue(m) >= -tol


def density_defects(rho: Operator, tol: float = STRUCT_TOL) -> list[str]:
    """List the ways ``rho`` fails to be a density operator (empty if valid)."""
    problems = []
    herm = rho.hermiticity_error()
    if herm >= tol:
        problems.append(f"not Hermitian (max |rho - rho^dag| = {herm:.3g})")
        return problems
    tr = rho.trace()
    if abs(tr - 1) >= tol:
        problems.append(f"trace is {tr:.12g}, not 1")
    lo = min_eigenvalue(rho)
    if lo < -tol:
        problems.append(f"negative eigenvalue {lo:.3g}")
    return problems


def check_density(rho: Operator, tol: float = STRUCT_TOL) -> Operator:
    problems = density_defects(rho, tol)
    if problems:
        raise ValueError("not a density operator: " + "; ".join(problems))
    return rho


def identity(basis: Basis) -> Operator:
    return Operator(basis, np.eye(basis.dim))


def from_blocks(basis: Basis, entries: dict) -> Operator:
    """Build an operator from ``{(bra_state, ket_state): value}``."""
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for (a, b), v in entries.items():
        m[basis.index(a), basis.index(b)] += v
    return Operator(basis, m)


def embed(op: Operator, basis: Basis) -> Operator:
    """Place ``op`` into a larger basis that contains all of its states."""
    idx = [basis.index(s) for s in op.basis.states]
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    m[np.ix_(idx, idx)] = op.matrix
    return Operator(basis, m)


def restrict(op: Operator, states: Sequence) -> Operator:
    sub = Basis(tuple(states))
    idx = [op.basis.index(s) for s in sub.states]
    return Operator(sub, op.matrix[np.ix_(idx, idx)])
