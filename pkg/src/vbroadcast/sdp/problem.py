"""Standard-form SDP data structures and a symbolic problem builder.

A problem is

    minimize    sum_k <C_k, X_k>
    subject to  sum_k <A_{i,k}, X_k> = b_i      (i = 1..m)
                X_k >= 0,

where every ``X_k`` is a complex Hermitian PSD block (dimension-1 blocks are
plain nonnegative scalars) and all coefficient operators are Hermitian.
Coefficients are stored as canonical sparse triplets ``(i, j, v)`` with
``i <= j``; the mirrored entry ``(j, i, conj(v))`` is implied.

The builder assembles the equality rows of operator-valued constraints by
pairing them against an orthonormal Hermitian basis of the target space, and
turns inequalities into equalities with slack blocks:

* ``<A, X> <= b``        adds a nonnegative scalar slack,
* ``sum terms >= R``     adds a PSD slack block,
* free scalars           are encoded as the difference of two scalar blocks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..linalg import as_hermitian

# Largest realified block dimension accepted without an explicit override;
# keeps accidental huge dense solves from hanging a session.
MAX_REAL_BLOCK_DIM = 260

Triplets = tuple[np.ndarray, np.ndarray, np.ndarray]  # (ii, jj, vv), ii <= jj


@dataclass(frozen=True)
class BlockSpec:
    """One PSD variable block: complex Hermitian of size ``dim`` (1 = scalar)."""

    name: str
    dim: int

    @property
    def real_dim(self) -> int:
        return 1 if self.dim == 1 else 2 * self.dim


@dataclass
class Row:
    """One scalar equality row: sum_k <coeffs[k], X_k> = rhs."""

    coeffs: dict[str, Triplets]
    rhs: float
    label: str = ""


@dataclass
class SdpProblem:
    blocks: list[BlockSpec]
    objective: dict[str, Triplets]
    rows: list[Row]
    allow_large_blocks: bool = False

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def block(self, name: str) -> BlockSpec:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(f"no block named {name!r}")

    def validate(self) -> None:
        names = [b.name for b in self.blocks]
        if len(set(names)) != len(names):
            raise ValueError("duplicate block names")
        for b in self.blocks:
            if b.dim < 1:
                raise ValueError(f"block {b.name!r} has invalid dimension {b.dim}")
            if b.real_dim > MAX_REAL_BLOCK_DIM and not self.allow_large_blocks:
                raise ValueError(
                    f"block {b.name!r} realifies to dimension {b.real_dim} > "
                    f"{MAX_REAL_BLOCK_DIM}; pass allow_large_blocks=True to override")
            if b.real_dim > MAX_REAL_BLOCK_DIM and self.allow_large_blocks:
                warnings.warn(f"block {b.name!r} exceeds the desk-scale guardrail "
                              f"({b.real_dim} realified); expect long solve times",
                              RuntimeWarning)
        known = set(names)
        for which, coeffs in [("objective", self.objective)] + [
                (f"row {i}", r.coeffs) for i, r in enumerate(self.rows)]:
            for name, (ii, jj, vv) in coeffs.items():
                if name not in known:
                    raise ValueError(f"{which} references unknown block {name!r}")
                d = self.block(name).dim
                if ii.size and (ii.min() < 0 or jj.max() >= d):
                    raise ValueError(f"{which} has out-of-range indices for block {name!r}")
                if np.any(ii > jj):
                    raise ValueError(f"{which} has non-canonical triplets for block {name!r}")
                diag = ii == jj
                if np.any(np.abs(vv[diag].imag) > 1e-12):
                    raise ValueError(f"{which} has complex diagonal entries for block {name!r}")

    # -- evaluation helpers used by the certificate checker ------------------

    def constraint_values(self, x_blocks: dict[str, np.ndarray]) -> np.ndarray:
        """Evaluate <A_i, X> for every row."""
        out = np.zeros(len(self.rows))
        for r, row in enumerate(self.rows):
            out[r] = _eval_coeffs(row.coeffs, x_blocks)
        return out

    def objective_value(self, x_blocks: dict[str, np.ndarray]) -> float:
        return _eval_coeffs(self.objective, x_blocks)

    def adjoint(self, y: np.ndarray) -> dict[str, np.ndarray]:
        """Dense Hermitian matrices of A^*(y) = sum_i y_i A_i per block."""
        out = {b.name: np.zeros((b.dim, b.dim), dtype=complex) for b in self.blocks}
        for yi, row in zip(y, self.rows):
            if yi == 0.0:
                continue
            for name, (ii, jj, vv) in row.coeffs.items():
                m = out[name]
                np.add.at(m, (ii, jj), yi * vv)
                off = ii != jj
                np.add.at(m, (jj[off], ii[off]), yi * vv[off].conj())
        return out

    def objective_matrices(self) -> dict[str, np.ndarray]:
        out = {}
        for b in self.blocks:
            m = np.zeros((b.dim, b.dim), dtype=complex)
            if b.name in self.objective:
                ii, jj, vv = self.objective[b.name]
                np.add.at(m, (ii, jj), vv)
                off = ii != jj
                np.add.at(m, (jj[off], ii[off]), vv[off].conj())
            out[b.name] = m
        return out


def _eval_coeffs(coeffs: dict[str, Triplets], x_blocks: dict[str, np.ndarray]) -> float:
    total = 0.0
    for name, (ii, jj, vv) in coeffs.items():
        x = np.asarray(x_blocks[name])
        diag = ii == jj
        total += float(np.sum(vv[diag].real * x[ii[diag], jj[diag]].real))
        off = ~diag
        total += float(2.0 * np.sum((vv[off] * x[jj[off], ii[off]]).real))
    return total


def triplets_from_dense(a: np.ndarray, tol: float = 0.0) -> Triplets:
    """Canonical upper-triangular triplets of a dense Hermitian matrix."""
    a = as_hermitian(np.atleast_2d(np.asarray(a, dtype=complex)))
    ii, jj = np.nonzero(np.abs(np.triu(a)) > tol)
    return ii.astype(np.int64), jj.astype(np.int64), a[ii, jj]


def scalar_triplets(value: float) -> Triplets:
    return (np.array([0]), np.array([0]), np.array([complex(value)]))


def _merge_triplets(parts: list[Triplets]) -> Triplets:
    ii = np.concatenate([p[0] for p in parts])
    jj = np.concatenate([p[1] for p in parts])
    vv = np.concatenate([p[2] for p in parts])
    return ii, jj, vv


# ---------------------------------------------------------------------------
# Hermitian basis of a D-dimensional space, as canonical triplets
# ---------------------------------------------------------------------------

def hermitian_basis_triplets(d: int) -> list[Triplets]:
    """Orthonormal Hermitian basis: diagonal units, then (real, imaginary)
    off-diagonal pairs scaled by 1/sqrt(2)."""
    basis = []
    for i in range(d):
        basis.append((np.array([i]), np.array([i]), np.array([1.0 + 0j])))
    inv = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            basis.append((np.array([i]), np.array([j]), np.array([inv + 0j])))
            basis.append((np.array([i]), np.array([j]), np.array([-1j * inv])))
    return basis


def _triplet_inner(e: Triplets, m: np.ndarray) -> float:
    """<E, M> = Tr[E M] for canonical triplets E and dense Hermitian M."""
    ii, jj, vv = e
    diag = ii == jj
    val = float(np.sum(vv[diag].real * m[ii[diag], jj[diag]].real))
    off = ~diag
    val += float(2.0 * np.sum((vv[off] * m[jj[off], ii[off]]).real))
    return val


# ---------------------------------------------------------------------------
# Operator-valued constraint terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpTerm:
    """One linear term of an operator equation.

    kind = "full":    scale * X_block                  (block matches target)
    kind = "ptrace":  scale * Tr_drop[X_block]         (partial trace of the block)
    kind = "scalar":  scale * x_block * matrix         (scalar block times a
                                                        fixed Hermitian matrix)
    """

    block: str
    kind: str = "full"
    scale: float = 1.0
    dims: tuple[int, ...] = ()
    drop: tuple[int, ...] = ()
    matrix: np.ndarray | None = None


def full_term(block: str, scale: float = 1.0) -> OpTerm:
    return OpTerm(block=block, kind="full", scale=scale)


def ptrace_term(block: str, dims: Sequence[int], drop: Iterable[int],
                scale: float = 1.0) -> OpTerm:
    return OpTerm(block=block, kind="ptrace", scale=scale,
                  dims=tuple(int(d) for d in dims),
                  drop=tuple(sorted(int(i) for i in drop)))


def scalar_term(block: str, matrix: np.ndarray, scale: float = 1.0) -> OpTerm:
    return OpTerm(block=block, kind="scalar", scale=scale,
                  matrix=as_hermitian(matrix))


def _ptrace_embedding(dims: tuple[int, ...], drop: tuple[int, ...]):
    """Precompute flat-index arithmetic for the adjoint of a partial trace.

    The adjoint of Tr_drop places the target operator on the kept factors and
    the identity on the dropped ones.  Returns (kept_dims, base, offsets) with
    flat_block_index = base[kept_flat] + offsets[dropped_flat].
    """
    k = len(dims)
    keep = [i for i in range(k) if i not in drop]
    strides = np.ones(k, dtype=np.int64)
    for i in range(k - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    kept_dims = [dims[i] for i in keep]
    drop_dims = [dims[i] for i in drop]

    def flat_offsets(positions, subdims):
        if not positions:
            return np.zeros(1, dtype=np.int64)
        grids = np.indices(subdims).reshape(len(subdims), -1)
        return sum(grids[a] * strides[p] for a, p in enumerate(positions))

    base = flat_offsets(keep, kept_dims)
    offsets = flat_offsets(list(drop), drop_dims)
    return int(np.prod(kept_dims)) if kept_dims else 1, base, offsets


def _embed_triplets(e: Triplets, base: np.ndarray, offsets: np.ndarray,
                    scale: float) -> Triplets:
    """Triplets of scale * (E on kept factors (x) I on dropped factors)."""
    ii_e, jj_e, vv_e = e
    n_off = offsets.size
    ii = np.repeat(base[ii_e], n_off) + np.tile(offsets, ii_e.size)
    jj = np.repeat(base[jj_e], n_off) + np.tile(offsets, jj_e.size)
    vv = np.repeat(vv_e * scale, n_off)
    swap = ii > jj
    ii2 = np.where(swap, jj, ii)
    jj2 = np.where(swap, ii, jj)
    vv2 = np.where(swap, vv.conj(), vv)
    return ii2, jj2, vv2


class ProblemBuilder:
    """Incremental construction of an :class:`SdpProblem`."""

    def __init__(self, allow_large_blocks: bool = False):
        self._blocks: list[BlockSpec] = []
        self._objective: dict[str, list[Triplets]] = {}
        self._rows: list[Row] = []
        self._free: dict[str, tuple[str, str]] = {}
        self.allow_large_blocks = allow_large_blocks

    # -- variables -----------------------------------------------------------

    def add_psd_block(self, name: str, dim: int) -> str:
        if any(b.name == name for b in self._blocks):
            raise ValueError(f"block {name!r} already declared")
        self._blocks.append(BlockSpec(name=name, dim=int(dim)))
        return name

    def add_scalar(self, name: str) -> str:
        return self.add_psd_block(name, 1)

    def add_free_scalar(self, name: str) -> str:
        """A real scalar of either sign, split into two nonnegative parts."""
        pos = self.add_scalar(f"{name}+")
        neg = self.add_scalar(f"{name}-")
        self._free[name] = (pos, neg)
        return name

    def _scalar_parts(self, name: str) -> list[tuple[str, float]]:
        if name in self._free:
            pos, neg = self._free[name]
            return [(pos, 1.0), (neg, -1.0)]
        return [(name, 1.0)]

    # -- objective -----------------------------------------------------------

    def add_objective(self, block: str, coeff) -> None:
        """Add <coeff, X_block> to the minimization objective."""
        if np.isscalar(coeff):
            for part, sign in self._scalar_parts(block):
                self._objective.setdefault(part, []).append(
                    scalar_triplets(sign * float(coeff)))
        else:
            self._objective.setdefault(block, []).append(triplets_from_dense(coeff))

    def minimize(self, linear: dict[str, float]) -> None:
        for name, w in linear.items():
            self.add_objective(name, w)

    # -- constraints ----------------------------------------------------------

    def add_scalar_eq(self, coeffs: dict[str, float | np.ndarray], rhs: float,
                      label: str = "") -> None:
        parts: dict[str, list[Triplets]] = {}
        for name, c in coeffs.items():
            if np.isscalar(c):
                for part, sign in self._scalar_parts(name):
                    parts.setdefault(part, []).append(scalar_triplets(sign * float(c)))
            else:
                parts.setdefault(name, []).append(triplets_from_dense(c))
        self._rows.append(Row(coeffs={k: _merge_triplets(v) for k, v in parts.items()},
                              rhs=float(rhs), label=label))

    def add_scalar_ineq(self, coeffs: dict[str, float | np.ndarray], rhs: float,
                        label: str = "") -> str:
        """<coeffs, X> <= rhs via a nonnegative slack scalar; returns its name."""
        slack = self.add_scalar(f"_slack{len(self._blocks)}")
        coeffs = dict(coeffs)
        coeffs[slack] = 1.0
        self.add_scalar_eq(coeffs, rhs, label=label or f"ineq<{slack}>")
        return slack

    def add_operator_eq(self, terms: Sequence[OpTerm], rhs: np.ndarray,
                        label: str = "") -> None:
        """sum of terms = rhs, expanded over a Hermitian basis of the target."""
        rhs = as_hermitian(rhs)
        d = rhs.shape[0]
        prepared = []
        for t in terms:
            if t.kind == "full":
                bdim = self._block_dim(t.block)
                if bdim != d:
                    raise ValueError(f"term on {t.block!r} has dimension {bdim}, "
                                     f"target has {d}")
                prepared.append(("full", t.block, t.scale, None))
            elif t.kind == "ptrace":
                bdim = self._block_dim(t.block)
                if int(np.prod(t.dims)) != bdim:
                    raise ValueError(f"layout {t.dims} does not match block "
                                     f"{t.block!r} of dimension {bdim}")
                kept_dim, base, offsets = _ptrace_embedding(t.dims, t.drop)
                if kept_dim != d:
                    raise ValueError(f"partial trace of {t.block!r} has dimension "
                                     f"{kept_dim}, target has {d}")
                prepared.append(("ptrace", t.block, t.scale, (base, offsets)))
            elif t.kind == "scalar":
                if t.matrix.shape[0] != d:
                    raise ValueError("scalar term matrix does not match the target")
                prepared.append(("scalar", t.block, t.scale, t.matrix))
            else:
                raise ValueError(f"unknown term kind {t.kind!r}")

        for r, e in enumerate(hermitian_basis_triplets(d)):
            parts: dict[str, list[Triplets]] = {}
            for kind, block, scale, aux in prepared:
                if kind == "full":
                    ii, jj, vv = e
                    parts.setdefault(block, []).append((ii, jj, vv * scale))
                elif kind == "ptrace":
                    base, offsets = aux
                    parts.setdefault(block, []).append(
                        _embed_triplets(e, base, offsets, scale))
                else:
                    w = scale * _triplet_inner(e, aux)
                    if w != 0.0:
                        for part, sign in self._scalar_parts(block):
                            parts.setdefault(part, []).append(scalar_triplets(sign * w))
            self._rows.append(Row(
                coeffs={k: _merge_triplets(v) for k, v in parts.items()},
                rhs=_triplet_inner(e, rhs),
                label=f"{label}[{r}]" if label else ""))

    def add_operator_ineq(self, terms: Sequence[OpTerm], rhs: np.ndarray,
                          label: str = "") -> str:
        """sum of terms >= rhs via a PSD slack block; returns the slack name."""
        rhs = as_hermitian(rhs)
        d = rhs.shape[0]
        slack = self.add_psd_block(f"_psd_slack{len(self._blocks)}", d)
        self.add_operator_eq(list(terms) + [full_term(slack, -1.0)], rhs,
                             label=label or f"opineq<{slack}>")
        return slack

    def _block_dim(self, name: str) -> int:
        for b in self._blocks:
            if b.name == name:
                return b.dim
        raise KeyError(f"no block named {name!r}")

    def build(self) -> SdpProblem:
        objective = {k: _merge_triplets(v) for k, v in self._objective.items()}
        p = SdpProblem(blocks=list(self._blocks), objective=objective,
                       rows=list(self._rows),
                       allow_large_blocks=self.allow_large_blocks)
        p.validate()
        return p


# ---------------------------------------------------------------------------
# Debug dump
# ---------------------------------------------------------------------------

def dump_problem(problem: SdpProblem, path: str) -> None:
    """Write the assembled problem as documented plain-text sparse triplets.

    Format (one record per line, '#' starts a comment):

        block <index> <name> <complex_dim>
        obj   <block_index> <row> <col> <re> <im>
        con   <constraint_index> <block_index> <row> <col> <re> <im>
        rhs   <constraint_index> <value>

    Only canonical entries with row <= col are listed; the mirrored conjugate
    entry is implied.  Suitable for cross-checking against external solvers.
    """
    index = {b.name: k for k, b in enumerate(problem.blocks)}
    with open(path, "w") as fh:
        fh.write("# vbroadcast SDP dump: minimize sum_k <C_k, X_k> "
                 "s.t. <A_i, X> = b_i, X >= 0\n")
        for k, b in enumerate(problem.blocks):
            fh.write(f"block {k} {b.name} {b.dim}\n")
        for name, (ii, jj, vv) in problem.objective.items():
            for i, j, v in zip(ii, jj, vv):
                fh.write(f"obj {index[name]} {i} {j} {v.real:.17g} {v.imag:.17g}\n")
        for r, row in enumerate(problem.rows):
            for name, (ii, jj, vv) in row.coeffs.items():
                for i, j, v in zip(ii, jj, vv):
                    fh.write(f"con {r} {index[name]} {i} {j} "
                             f"{v.real:.17g} {v.imag:.17g}\n")
        for r, row in enumerate(problem.rows):
            fh.write(f"rhs {r} {row.rhs:.17g}\n")
