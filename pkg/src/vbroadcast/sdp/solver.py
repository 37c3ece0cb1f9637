"""Self-contained primal-dual interior-point solver for small dense SDPs.

The algorithm is a path-following method on the homogeneous self-dual
embedding with Nesterov-Todd scaling and a Mehrotra predictor-corrector step,
the standard recipe for this problem class.  Complex Hermitian blocks are
realified internally: an n x n Hermitian block becomes the real symmetric
2n x 2n block [[Re, -Im], [Im, Re]].  The factor 2 that realification
introduces into inner products is divided out during assembly, so objective
and constraint values agree with the complex-domain problem; eigenvalues of
the realified block are those of the complex block with doubled multiplicity.

The embedding tracks (x, y, s, tau, kappa) with the invariants

    A x - tau b            -> 0
    A^T y + s - tau c      -> 0
    kappa + c.x - b.y      -> 0

and complementarity driven to zero along the central path.  tau -> positive
gives an optimal pair (x, y, s) / tau; tau -> 0 with kappa > 0 yields a Farkas
certificate of primal or dual infeasibility.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..linalg import hermitian_part
from .problem import SdpProblem, Triplets

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITER = "max_iterations"
STATUS_PRIMAL_INFEASIBLE = "primal_infeasible_certificate"
STATUS_DUAL_INFEASIBLE = "dual_infeasible_certificate"
STATUS_NUMERICAL = "numerical_failure"


@dataclass(frozen=True)
class SolverConfig:
    tol_gap: float = 1e-8
    tol_feas: float = 1e-8
    max_iter: int = 200
    step_fraction: float = 0.98
    infeas_tol: float = 1e-8
    preprocess_tol: float = 1e-12
    schur_regularization: float = 1e-12
    verbose: bool = False


@dataclass
class SdpSolution:
    status: str
    x_blocks: dict[str, np.ndarray]
    y: np.ndarray
    s_blocks: dict[str, np.ndarray]
    primal_objective: float
    dual_objective: float
    gap: float
    iterations: int
    diagnostics: dict = field(default_factory=dict)

    def scalar(self, name: str) -> float:
        """Value of a dimension-1 block."""
        return float(self.x_blocks[name][0, 0].real)


# Verification runs can capture every (problem, solution) pair produced while
# a recorder is active; see the acceptance suite.
_ACTIVE_RECORDERS: list[list] = []


@contextmanager
def record_solves():
    log: list = []
    _ACTIVE_RECORDERS.append(log)
    try:
        yield log
    finally:
        _ACTIVE_RECORDERS.remove(log)


# ---------------------------------------------------------------------------
# svec / smat machinery per realified block size
# ---------------------------------------------------------------------------

class _BlockOps:
    """Symmetric vectorization caches for one realified block size."""

    def __init__(self, n: int):
        self.n = n
        p, q = np.triu_indices(n)
        self.p, self.q = p, q
        self.w = np.where(p == q, 1.0, np.sqrt(2.0))
        self.N = p.size
        pos = np.full((n, n), -1, dtype=np.int64)
        pos[p, q] = np.arange(p.size)
        self.pos = pos

    def svec(self, m: np.ndarray) -> np.ndarray:
        return m[..., self.p, self.q] * self.w

    def smat(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(v.shape[:-1] + (self.n, self.n))
        vals = v / self.w
        out[..., self.p, self.q] = vals
        out[..., self.q, self.p] = vals
        return out


_OPS_CACHE: dict[int, _BlockOps] = {}


def _ops(n: int) -> _BlockOps:
    if n not in _OPS_CACHE:
        _OPS_CACHE[n] = _BlockOps(n)
    return _OPS_CACHE[n]


def _realified_svec_entries(trip: Triplets, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """svec coordinates/values of realify(A)/2 for canonical Hermitian triplets.

    For dim == 1 the block is a plain real scalar (no realification, no halving).
    """
    ii, jj, vv = trip
    if dim == 1:
        return np.zeros(ii.size, dtype=np.int64), vv.real.copy()
    n = dim
    ops = _ops(2 * n)
    pos = ops.pos
    s2 = np.sqrt(2.0)
    diag = ii == jj
    di, dv = ii[diag], vv[diag].real / 2.0
    oi, oj, ov = ii[~diag], jj[~diag], vv[~diag]
    re, im = ov.real / 2.0, ov.imag / 2.0
    coords = np.concatenate([
        pos[di, di], pos[n + di, n + di],
        pos[oi, oj], pos[n + oi, n + oj],
        pos[oi, n + oj], pos[oj, n + oi],
    ])
    vals = np.concatenate([dv, dv, s2 * re, s2 * re, -s2 * im, s2 * im])
    return coords, vals


def _extract_complex(y: np.ndarray, dim: int) -> np.ndarray:
    """Undo realification; the projection also absorbs roundoff drift."""
    if dim == 1:
        return np.array([[float(y[0, 0])]])
    n = dim
    re = 0.5 * (y[:n, :n] + y[n:, n:])
    im = 0.5 * (y[n:, :n] - y[:n, n:])
    return hermitian_part(re + 1j * im)


# ---------------------------------------------------------------------------
# Assembly and preprocessing
# ---------------------------------------------------------------------------

def _assemble(problem: SdpProblem):
    problem.validate()
    names = [b.name for b in problem.blocks]
    sizes = [b.real_dim for b in problem.blocks]
    dims = [b.dim for b in problem.blocks]
    m = len(problem.rows)

    a_blocks = []
    for k, b in enumerate(problem.blocks):
        n_sv = _ops(sizes[k]).N if sizes[k] > 1 else 1
        rows_idx, cols_idx, vals = [], [], []
        for r, row in enumerate(problem.rows):
            if b.name in row.coeffs:
                coords, v = _realified_svec_entries(row.coeffs[b.name], b.dim)
                rows_idx.append(np.full(coords.size, r, dtype=np.int64))
                cols_idx.append(coords)
                vals.append(v)
        if rows_idx:
            a = sp.coo_matrix(
                (np.concatenate(vals),
                 (np.concatenate(rows_idx), np.concatenate(cols_idx))),
                shape=(m, n_sv)).tocsr()
        else:
            a = sp.csr_matrix((m, n_sv))
        a_blocks.append(a)

    c_blocks = []
    for k, b in enumerate(problem.blocks):
        n_sv = _ops(sizes[k]).N if sizes[k] > 1 else 1
        c = np.zeros(n_sv)
        if b.name in problem.objective:
            coords, v = _realified_svec_entries(problem.objective[b.name], b.dim)
            np.add.at(c, coords, v)
        c_blocks.append(c)

    b_vec = np.array([row.rhs for row in problem.rows], dtype=float)
    return names, dims, sizes, a_blocks, c_blocks, b_vec


def _select_independent_rows(a_full: sp.csr_matrix, b: np.ndarray, tol_rel: float):
    """Pivoted Cholesky on the row Gram matrix; exact-redundant rows dropped.

    Returns (kept_row_indices, dropped_row_indices, max_inconsistency) where
    the last entry measures how badly any dropped row's right-hand side
    disagrees with the rows that span it (nonzero means infeasible input).
    """
    m = a_full.shape[0]
    gram = np.asarray((a_full @ a_full.T).todense(), dtype=float)
    diag = gram.diagonal().copy()
    scale = max(float(diag.max(initial=0.0)), 1e-300)
    lfac = np.zeros((m, m))
    avail = np.ones(m, dtype=bool)
    d = diag.copy()
    perm: list[int] = []
    for step in range(m):
        masked = np.where(avail, d, -np.inf)
        j = int(np.argmax(masked))
        if masked[j] <= tol_rel * scale:
            break
        col = gram[:, j] - lfac[:, :step] @ lfac[j, :step]
        lfac[:, step] = col / np.sqrt(d[j])
        d = d - lfac[:, step] ** 2
        avail[j] = False
        perm.append(j)

    r = len(perm)
    kept = sorted(perm)
    dropped = [i for i in range(m) if i not in set(perm)]
    inconsistency = 0.0
    if dropped and r:
        lp = lfac[perm, :r]
        w = sla.solve_triangular(lp, b[perm], lower=True)
        for i in dropped:
            pred = float(lfac[i, :r] @ w)
            denom = 1.0 + abs(b[i]) + float(np.linalg.norm(lfac[i, :r])) * float(np.linalg.norm(w))
            inconsistency = max(inconsistency, abs(b[i] - pred) / denom)
    elif dropped:
        inconsistency = max((abs(b[i]) for i in dropped), default=0.0)
    return kept, dropped, inconsistency


# ---------------------------------------------------------------------------
# The HSD engine
# ---------------------------------------------------------------------------

class _Cone:
    """Per-iteration Nesterov-Todd scaling data for the block cone."""

    def __init__(self, sizes: list[int]):
        self.sizes = sizes
        self.ops = [_ops(n) for n in sizes]
        self.offsets = np.cumsum([0] + [op.N for op in self.ops])
        self.total = int(self.offsets[-1])
        self.degree = float(sum(sizes))

    def split(self, v: np.ndarray) -> list[np.ndarray]:
        return [v[self.offsets[k]:self.offsets[k + 1]] for k in range(len(self.sizes))]

    def mats(self, v: np.ndarray) -> list[np.ndarray]:
        return [op.smat(part) for op, part in zip(self.ops, self.split(v))]

    def vec(self, mats: list[np.ndarray]) -> np.ndarray:
        return np.concatenate([op.svec(m) for op, m in zip(self.ops, mats)])


def _chol_with_jitter(m: np.ndarray) -> np.ndarray:
    """Cholesky with a tiny escalating diagonal shift to absorb terminal roundoff."""
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        pass
    base = max(float(np.trace(m)) / m.shape[0], 1.0)
    for expo in (-14, -12, -10):
        try:
            return np.linalg.cholesky(m + (10.0 ** expo) * base * np.eye(m.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError("matrix is not positive definite")


def _max_step(mats_x: list[np.ndarray], chol_x: list[np.ndarray],
              mats_dx: list[np.ndarray]) -> float:
    """Largest alpha with X + alpha dX staying PSD (per block, exact eigenvalue test)."""
    alpha = np.inf
    for lx, dx in zip(chol_x, mats_dx):
        z = sla.solve_triangular(lx, dx, lower=True)
        z = sla.solve_triangular(lx, z.T, lower=True)
        lam_min = float(np.linalg.eigvalsh(0.5 * (z + z.T))[0])
        if lam_min < 0:
            alpha = min(alpha, -1.0 / lam_min)
    return alpha


def _hsd_solve(cone: _Cone, a_blocks: list[sp.csr_matrix], b: np.ndarray,
               c_blocks: list[np.ndarray], cfg: SolverConfig):
    m = b.size
    a_full = sp.hstack(a_blocks, format="csr") if m else sp.csr_matrix((0, cone.total))
    c = np.concatenate(c_blocks)
    norm_b = float(np.linalg.norm(b))
    norm_c = float(np.linalg.norm(c))

    # static per-block dense stacks of constraint matrices (active rows only)
    active, tstacks = [], []
    for k, (ak, op) in enumerate(zip(a_blocks, cone.ops)):
        idx = np.flatnonzero(np.diff(ak.indptr) > 0)
        active.append(idx)
        dense = np.asarray(ak[idx].todense()) if idx.size else np.zeros((0, op.N))
        tstacks.append(op.smat(dense))

    x_mats = [np.eye(n) for n in cone.sizes]
    s_mats = [np.eye(n) for n in cone.sizes]
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0

    best = None
    best_score = np.inf
    stall = 0
    history = []

    def current_metrics(xv, sv, yv, tau_v, kappa_v):
        xhat = xv / tau_v
        shat = sv / tau_v
        yhat = yv / tau_v
        pres = float(np.linalg.norm(a_full @ xhat - b)) / (1.0 + norm_b)
        dres = float(np.linalg.norm(a_full.T @ yhat + shat - c)) / (1.0 + norm_c)
        pobj = float(c @ xhat)
        dobj = float(b @ yhat)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        return pres, dres, relgap, pobj, dobj

    status = STATUS_MAX_ITER
    note = ""
    it = 0
    for it in range(1, cfg.max_iter + 1):
        xv = cone.vec(x_mats)
        sv = cone.vec(s_mats)

        pres, dres, relgap, pobj, dobj = current_metrics(xv, sv, y, tau, kappa)
        score = max(pres, dres, relgap)
        if score < 0.9 * best_score:
            best_score = score
            stall = 0
            best = ([m.copy() for m in x_mats], [m.copy() for m in s_mats],
                    y.copy(), tau, kappa)
        else:
            if score < best_score:
                best_score = score
                best = ([m.copy() for m in x_mats], [m.copy() for m in s_mats],
                        y.copy(), tau, kappa)
            stall += 1
            if stall >= 25:
                status = STATUS_NUMERICAL
                note = f"no progress over {stall} iterations"
                break
        history.append((pres, dres, relgap, pobj, dobj, tau, kappa))
        if cfg.verbose:
            print(f"iter {it:3d}  pres {pres:8.2e}  dres {dres:8.2e} "
                  f"gap {relgap:8.2e}  tau {tau:8.2e}  kappa {kappa:8.2e}")

        if pres <= cfg.tol_feas and dres <= cfg.tol_feas and relgap <= cfg.tol_gap:
            status = STATUS_OPTIMAL
            best = ([m.copy() for m in x_mats], [m.copy() for m in s_mats],
                    y.copy(), tau, kappa)
            break

        # Farkas certificates (scale-free residual ratios)
        by = float(b @ y)
        cx = float(c @ xv)
        if by > 0:
            ratio = float(np.linalg.norm(a_full.T @ y + sv)) / by
            if ratio <= cfg.infeas_tol * (1.0 + norm_c):
                status = STATUS_PRIMAL_INFEASIBLE
                note = f"dual improving ray with residual ratio {ratio:.2e}"
                best = ([m.copy() for m in x_mats], [m.copy() for m in s_mats],
                        y.copy(), tau, kappa)
                break
        if cx < 0:
            ratio = float(np.linalg.norm(a_full @ xv)) / (-cx)
            if ratio <= cfg.infeas_tol * (1.0 + norm_b):
                status = STATUS_DUAL_INFEASIBLE
                note = f"primal improving ray with residual ratio {ratio:.2e}"
                best = ([m.copy() for m in x_mats], [m.copy() for m in s_mats],
                        y.copy(), tau, kappa)
                break

        # Nesterov-Todd scaling point per block
        try:
            chol_x = [_chol_with_jitter(xm) for xm in x_mats]
            chol_s = [_chol_with_jitter(sm) for sm in s_mats]
        except np.linalg.LinAlgError:
            status = STATUS_NUMERICAL
            note = "iterate left the cone (Cholesky failure)"
            break
        g_list, ginv_list, lam_list, w_list = [], [], [], []
        ok = True
        for lx, ls in zip(chol_x, chol_s):
            u, sig, vt = np.linalg.svd(ls.T @ lx)
            if sig.min() <= 0 or not np.all(np.isfinite(sig)):
                ok = False
                break
            g = lx @ vt.T / np.sqrt(sig)
            ginv = (u / np.sqrt(sig)).T @ ls.T
            g_list.append(g)
            ginv_list.append(ginv)
            lam_list.append(sig)
            w_list.append(g @ g.T)
        if not ok:
            status = STATUS_NUMERICAL
            note = "degenerate NT scaling"
            break

        mu = (float(xv @ sv) + tau * kappa) / (cone.degree + 1.0)

        def conj_w(vec_parts_matrix=None, mats=None):
            """Apply P = W . W blockwise; accepts svec vector or matrix list."""
            if mats is None:
                mats = cone.mats(vec_parts_matrix)
            return [w @ mm @ w for w, mm in zip(w_list, mats)]

        # Schur complement M = A P A^T (dense m x m) via batched conjugations
        schur = np.zeros((m, m))
        for k, (ak, op, idx, tk) in enumerate(zip(a_blocks, cone.ops, active, tstacks)):
            if idx.size == 0:
                continue
            w = w_list[k]
            img = op.svec(np.matmul(np.matmul(w, tk), w))
            schur[:, idx] += ak @ img.T
        schur = 0.5 * (schur + schur.T)

        pc_mats = conj_w(c)
        pc = cone.vec(pc_mats)
        apc = a_full @ pc
        cpc = float(c @ pc)

        reg = cfg.schur_regularization * max(1.0, float(schur.diagonal().max(initial=0.0)))
        cho = None
        for attempt in range(4):
            try:
                cho = sla.cho_factor(schur + (reg if attempt else 0.0) * np.eye(m),
                                     lower=True)
                break
            except np.linalg.LinAlgError:
                reg *= 100.0
        if cho is None and m:
            status = STATUS_NUMERICAL
            note = "singular Schur complement"
            break

        def schur_solve(rhs):
            if m == 0:
                return rhs
            sol = sla.cho_solve(cho, rhs)
            sol += sla.cho_solve(cho, rhs - schur @ sol)  # one refinement pass
            return sol

        vb = schur_solve(b)
        vu = schur_solve(apc)
        v1 = vb + vu

        r_p = tau * b - a_full @ xv
        r_d = tau * c - a_full.T @ y - sv
        r_g = kappa + float(c @ xv) - float(b @ y)
        prd_mats = conj_w(r_d)
        prd = cone.vec(prd_mats)
        aprd = a_full @ prd
        cprd = float(c @ prd)

        # the reduced pivot equals b.M^-1.b + c.(P - PA^T M^-1 AP).c + kappa/tau,
        # a sum of nonnegative terms; computing it that way avoids the
        # catastrophic cancellation the naive expression suffers near optimality
        den = (max(float(b @ vb), 0.0) + max(cpc - float(apc @ vu), 0.0)
               + kappa / tau)
        if not np.isfinite(den) or den <= 0:
            status = STATUS_NUMERICAL
            note = f"non-positive reduced pivot {den:.2e}"
            break

        def direction(eta, h, d_tau_rhs):
            rhs_y = eta * r_p - a_full @ h + eta * aprd
            v2 = schur_solve(rhs_y)
            num = (eta * r_g + float(c @ h) - eta * cprd + d_tau_rhs / tau
                   - float((b - apc) @ v2))
            d_tau = num / den
            dy = v1 * d_tau + v2
            ds = eta * r_d - a_full.T @ dy + c * d_tau
            ds_mats = cone.mats(ds)
            pds = cone.vec(conj_w(mats=ds_mats))
            dx = h - pds
            dx_mats = cone.mats(dx)
            d_kappa = (d_tau_rhs - kappa * d_tau) / tau
            return dx, dx_mats, dy, ds, ds_mats, d_tau, d_kappa

        # predictor (affine scaling direction): h = -svec(X), d_tau rhs = -tau*kappa
        h_aff = -xv
        aff = direction(1.0, h_aff, -tau * kappa)
        dx, dx_mats, dy, ds, ds_mats, d_tau, d_kappa = aff

        alpha = min(_max_step(x_mats, chol_x, dx_mats),
                    _max_step(s_mats, chol_s, ds_mats))
        if d_tau < 0:
            alpha = min(alpha, -tau / d_tau)
        if d_kappa < 0:
            alpha = min(alpha, -kappa / d_kappa)
        alpha_aff = min(1.0, alpha)

        mu_aff = ((float((xv + alpha_aff * dx) @ (sv + alpha_aff * ds))
                   + (tau + alpha_aff * d_tau) * (kappa + alpha_aff * d_kappa))
                  / (cone.degree + 1.0))
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3))
        if max(pres, dres) > 10.0 * max(relgap, 1e-14):
            # infeasibility dominates the gap: keep eta = 1 - sigma bounded
            # away from zero so the step keeps attacking the residuals instead
            # of collapsing mu further
            sigma = min(sigma, 0.5)

        # corrector: scaled cross terms from the affine direction
        h_parts = []
        for k, op in enumerate(cone.ops):
            g, ginv, lam = g_list[k], ginv_list[k], lam_list[k]
            dxa = op.smat(cone.split(dx)[k])
            dsa = op.smat(cone.split(ds)[k])
            dx_s = ginv @ dxa @ ginv.T
            ds_s = g.T @ dsa @ g
            cross = 0.5 * (dx_s @ ds_s + ds_s @ dx_s)
            rc = sigma * mu * np.eye(op.n) - np.diag(lam ** 2) - cross
            denom = 0.5 * (lam[:, None] + lam[None, :])
            rtil = rc / denom
            h_parts.append(g @ rtil @ g.T)
        h_comb = cone.vec(h_parts)
        d_tau_rhs = sigma * mu - tau * kappa - d_tau * d_kappa

        eta = 1.0 - sigma
        comb = direction(eta, h_comb, d_tau_rhs)
        dx, dx_mats, dy, ds, ds_mats, d_tau, d_kappa = comb

        alpha = min(_max_step(x_mats, chol_x, dx_mats),
                    _max_step(s_mats, chol_s, ds_mats))
        if d_tau < 0:
            alpha = min(alpha, -tau / d_tau)
        if d_kappa < 0:
            alpha = min(alpha, -kappa / d_kappa)
        alpha = min(1.0, cfg.step_fraction * alpha)
        if not np.isfinite(alpha) or alpha <= 0:
            status = STATUS_NUMERICAL
            note = f"step length collapsed ({alpha})"
            break

        for k in range(len(cone.sizes)):
            x_mats[k] = 0.5 * ((x_mats[k] + alpha * dx_mats[k])
                               + (x_mats[k] + alpha * dx_mats[k]).T)
            s_mats[k] = 0.5 * ((s_mats[k] + alpha * ds_mats[k])
                               + (s_mats[k] + alpha * ds_mats[k]).T)
        y = y + alpha * dy
        tau = tau + alpha * d_tau
        kappa = kappa + alpha * d_kappa
        if not (np.isfinite(tau) and np.isfinite(kappa)) or tau <= 0:
            status = STATUS_NUMERICAL
            note = "tau left the positive ray"
            break

    if best is None:
        best = (x_mats, s_mats, y, tau, kappa)
    x_mats, s_mats, y, tau, kappa = best
    xv = cone.vec(x_mats)
    sv = cone.vec(s_mats)
    pres, dres, relgap, pobj, dobj = current_metrics(xv, sv, y, tau, kappa)
    if (status in (STATUS_MAX_ITER, STATUS_NUMERICAL)
            and pres <= cfg.tol_feas and dres <= cfg.tol_feas
            and relgap <= cfg.tol_gap):
        # a terminal breakdown after the best iterate already met every
        # tolerance does not invalidate that iterate
        note = f"converged before terminal breakdown ({note or status})"
        status = STATUS_OPTIMAL
    return {
        "status": status,
        "note": note,
        "x_mats": x_mats,
        "s_mats": s_mats,
        "y": y,
        "tau": tau,
        "kappa": kappa,
        "iterations": it,
        "pres": pres,
        "dres": dres,
        "relgap": relgap,
        "history": history,
    }


# ---------------------------------------------------------------------------
# Public entry point
# ---------------------------------------------------------------------------

def solve(problem: SdpProblem, config: SolverConfig | None = None) -> SdpSolution:
    """Solve a Hermitian-block SDP; see the module docstring for the method.

    The returned solution carries complex-domain blocks.  On ``optimal`` the
    normalized primal/dual residuals are below ``tol_feas`` and the relative
    duality gap below ``tol_gap``; infeasibility is reported through Farkas
    certificates found by the self-dual embedding.
    """
    cfg = config or SolverConfig()
    t0 = time.perf_counter()
    names, dims, sizes, a_blocks, c_blocks, b_vec = _assemble(problem)

    a_full = sp.hstack(a_blocks, format="csr") if b_vec.size else None
    if b_vec.size:
        kept, dropped, inconsistency = _select_independent_rows(
            a_full, b_vec, cfg.preprocess_tol)
    else:
        kept, dropped, inconsistency = [], [], 0.0

    diagnostics = {
        "dropped_rows": dropped,
        "row_inconsistency": inconsistency,
        "n_rows_original": int(b_vec.size),
        "n_rows_solved": len(kept),
    }

    if inconsistency > 1e-8:
        zero = {n: np.zeros((d, d), dtype=complex) for n, d in zip(names, dims)}
        diagnostics["note"] = ("equality rows are linearly dependent with "
                               f"inconsistent right-hand sides (residual {inconsistency:.2e})")
        solution = SdpSolution(status=STATUS_PRIMAL_INFEASIBLE, x_blocks=zero,
                               y=np.zeros(b_vec.size), s_blocks=zero,
                               primal_objective=np.nan, dual_objective=np.nan,
                               gap=np.nan, iterations=0, diagnostics=diagnostics)
        for log in _ACTIVE_RECORDERS:
            log.append((problem, solution))
        return solution

    cone = _Cone(sizes)
    a_red = [ak[kept] for ak in a_blocks]
    res = _hsd_solve(cone, a_red, b_vec[kept], c_blocks, cfg)

    tau = res["tau"]
    scale = 1.0 / tau if res["status"] == STATUS_OPTIMAL else 1.0
    if res["status"] in (STATUS_MAX_ITER, STATUS_NUMERICAL) and tau > 0:
        scale = 1.0 / tau

    x_blocks, s_blocks = {}, {}
    for k, (name, d) in enumerate(zip(names, dims)):
        xk = _extract_complex(res["x_mats"][k] * scale, d)
        sk = _extract_complex(res["s_mats"][k] * scale, d)
        if d > 1:
            sk = 2.0 * sk  # dual slacks carry the realification half
        x_blocks[name] = xk
        s_blocks[name] = sk

    y_full = np.zeros(b_vec.size)
    y_full[kept] = res["y"] * scale

    pobj = problem.objective_value(x_blocks)
    dobj = float(b_vec @ y_full)
    gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

    diagnostics.update({
        "iterations": res["iterations"],
        "primal_residual": res["pres"],
        "dual_residual": res["dres"],
        "relative_gap": res["relgap"],
        "tau": res["tau"],
        "kappa": res["kappa"],
        "note": res["note"],
        "seconds": time.perf_counter() - t0,
    })

    if res["status"] in (STATUS_PRIMAL_INFEASIBLE, STATUS_DUAL_INFEASIBLE):
        # certificates are rays; report them unscaled
        pobj = np.nan
        dobj = np.nan
        gap = np.nan

    solution = SdpSolution(status=res["status"], x_blocks=x_blocks, y=y_full,
                           s_blocks=s_blocks, primal_objective=pobj,
                           dual_objective=dobj, gap=gap,
                           iterations=res["iterations"], diagnostics=diagnostics)
    for log in _ACTIVE_RECORDERS:
        log.append((problem, solution))
    return solution
