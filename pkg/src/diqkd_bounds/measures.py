"""Entanglement and information measures.

Covers the relative entropy of entanglement (closed forms for the isotropic
and Bell-diagonal families plus a numerical upper-bound optimizer over
product ensembles), conditional mutual information on ccq states, classical
mutual information, and intrinsic-information minimization over Eve
post-processing channels.  Everything is in bits.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import minimize

from .devices import CcqState
from .errors import AlphabetTooLargeError, DimensionMismatchError
from .linalg import clamp_psd_eigenvalues, hermitian_eig
from .states import DensityMatrix, binary_entropy, entropy_of_eigenvalues

TWO_SQRT2 = 2.0 * math.sqrt(2.0)
LN2 = math.log(2.0)

DET_CHANNEL_CAP = 50_000  # enumerate |E|^|E| deterministic maps up to here
MAX_EVE_ALPHABET = 16


def er_isotropic_closed(omega: float) -> float:
    """Relative entropy of entanglement of the isotropic state at CHSH value omega.

    The Phi+ weight is lam = 3*omega/(8*sqrt(2)) + 1/4; the state is separable
    (value 0) for lam <= 1/2 and otherwise E_R = 1 - H(lam).
    """
    if not 0.0 <= omega <= TWO_SQRT2 + 1e-12:
        raise ValueError(f"omega={omega} outside [0, 2*sqrt(2)]")
    lam = 3.0 * omega / (8.0 * math.sqrt(2.0)) + 0.25
    lam = min(lam, 1.0)
    if lam <= 0.5:
        return 0.0
    return 1.0 - binary_entropy(lam)


def er_bell_diagonal_closed(lambda_max: float) -> float:
    """E_R of a Bell-diagonal state with largest Bell weight lambda_max >= 1/2."""
    if not 0.5 <= lambda_max <= 1.0 + 1e-12:
        raise ValueError(f"lambda_max={lambda_max} outside [1/2, 1]")
    return 1.0 - binary_entropy(min(lambda_max, 1.0))


def mutual_info(p: np.ndarray) -> float:
    """I(A:B) of a joint distribution table p[a][b], in bits."""
    t = np.asarray(p, dtype=float)
    if t.min() < -1e-12:
        raise ValueError(f"probability {t.min():.3e} below -1e-12")
    if abs(t.sum() - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {t.sum():.9f}, not 1")
    t = np.clip(t, 0.0, None)
    h_a = entropy_of_eigenvalues(t.sum(axis=1))
    h_b = entropy_of_eigenvalues(t.sum(axis=0))
    h_ab = entropy_of_eigenvalues(t.reshape(-1))
    return max(h_a + h_b - h_ab, 0.0)


def cmi_ccq(c: CcqState) -> float:
    """I(A:B|E) of a ccq state, exploiting the classical block structure.

    S(ABE), S(AE) and S(BE) decompose into entropies of the subnormalized
    Eve blocks because A and B are classical registers.
    """
    ops = c.eve_ops
    n_a, n_b = ops.shape[:2]

    def block_entropy(blocks) -> float:
        total = 0.0
        for op in blocks:
            w = clamp_psd_eigenvalues(hermitian_eig(op).eigenvalues, tol=1e-9)
            total += entropy_of_eigenvalues(w)
        return total

    s_abe = block_entropy(ops[a, b] for a in range(n_a) for b in range(n_b))
    s_ae = block_entropy(ops[a].sum(axis=0) for a in range(n_a))
    s_be = block_entropy(ops[:, b].sum(axis=0) for b in range(n_b))
    s_e = block_entropy([ops.sum(axis=(0, 1))])
    value = s_ae + s_be - s_abe - s_e
    if value < -1e-9:
        raise ValueError(f"conditional mutual information {value:.3e} below -1e-9")
    return max(value, 0.0)


def _classical_cmi(p_abe: np.ndarray) -> float:
    """I(A:B|E) for a fully classical joint p[a][b][e]."""
    h_abe = entropy_of_eigenvalues(p_abe.reshape(-1))
    h_ae = entropy_of_eigenvalues(p_abe.sum(axis=1).reshape(-1))
    h_be = entropy_of_eigenvalues(p_abe.sum(axis=0).reshape(-1))
    h_e = entropy_of_eigenvalues(p_abe.sum(axis=(0, 1)))
    return max(h_ae + h_be - h_abe - h_e, 0.0)


def _reduce_alphabet(p: np.ndarray) -> np.ndarray:
    """Drop zero-probability Eve symbols and merge identical conditionals.

    Both steps are exact: a zero-weight symbol never occurs, and symbols with
    equal conditional distributions p(a,b|e) are interconvertible by
    stochastic maps in either direction, so the intrinsic information is
    unchanged.
    """
    p_e = p.sum(axis=(0, 1))
    keep = np.where(p_e > 1e-15)[0]
    p = p[:, :, keep]
    p_e = p_e[keep]
    conditionals = p / p_e[None, None, :]
    groups: list[list[int]] = []
    for e in range(p.shape[2]):
        for g in groups:
            if np.max(np.abs(conditionals[:, :, e] - conditionals[:, :, g[0]])) < 1e-12:
                g.append(e)
                break
        else:
            groups.append([e])
    if len(groups) == p.shape[2]:
        return p
    merged = np.stack([p[:, :, g].sum(axis=2) for g in groups], axis=2)
    return merged


def _apply_channel_rows(p: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Post-process Eve's symbol through the stochastic matrix ``rows[e, f]``."""
    return np.einsum("abe,ef->abf", p, rows)


def _det_channel_values(p: np.ndarray, maps: np.ndarray) -> np.ndarray:
    """CMI after each deterministic map in ``maps`` (one row per map)."""
    n_e = p.shape[2]
    n_maps = maps.shape[0]
    values = np.empty(n_maps)
    chunk = max(1, 2_000_000 // (p.size * n_e + 1))
    for start in range(0, n_maps, chunk):
        block = maps[start:start + chunk]
        one_hot = np.zeros((block.shape[0], n_e, n_e))
        rows = np.arange(block.shape[0])[:, None]
        one_hot[rows, np.arange(n_e)[None, :], block] = 1.0
        q = np.einsum("abe,mef->mabf", p, one_hot)

        def ent(t):
            flat = t.reshape(t.shape[0], -1)
            safe = np.where(flat > 1e-15, flat, 1.0)
            return -(flat * np.log2(safe)).sum(axis=1)

        h_abe = ent(q)
        h_ae = ent(q.sum(axis=2))
        h_be = ent(q.sum(axis=1))
        h_e = ent(q.sum(axis=(1, 2)))
        values[start:start + block.shape[0]] = h_ae + h_be - h_abe - h_e
    return np.clip(values, 0.0, None)


def intrinsic_info(p_abe: np.ndarray, *, restarts: int = 4, seed: int = 0,
                   det_cap: int = DET_CHANNEL_CAP, refine: bool = True) -> float:
    """Best-found intrinsic information min over Eve channels of I(A:B|E').

    The search space is stochastic maps from Eve's symbol alphabet to an
    output alphabet of at most the same size.  Strategy: exhaustive
    enumeration of deterministic maps when |E|^|E| fits under ``det_cap``
    (otherwise that many seeded random maps, always including the identity),
    followed by Nelder-Mead refinement on the stochastic-matrix
    parametrization from the best deterministic points.  The result is a
    certified upper bound on the true minimum and never exceeds the
    unprocessed I(A:B|E).

    Eve alphabets above 16 symbols are rejected, after an exact reduction
    that drops zero-weight symbols and merges symbols with identical
    conditional distributions.
    """
    p = np.asarray(p_abe, dtype=float)
    if p.ndim != 3:
        raise DimensionMismatchError("p_abe must be indexed [a][b][e]")
    if p.min() < -1e-12:
        raise ValueError(f"probability {p.min():.3e} below -1e-12")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {p.sum():.9f}, not 1")
    p = _reduce_alphabet(np.clip(p, 0.0, None))
    n_e = p.shape[2]
    if n_e > MAX_EVE_ALPHABET:
        raise AlphabetTooLargeError(f"{n_e} Eve symbols exceed the cap {MAX_EVE_ALPHABET}")
    best = _classical_cmi(p)
    if n_e == 1 or best == 0.0:
        return best

    rng = np.random.default_rng(seed)
    if n_e**n_e <= det_cap:
        maps = np.array(list(itertools.product(range(n_e), repeat=n_e)), dtype=int)
    else:
        maps = rng.integers(0, n_e, size=(det_cap, n_e))
        maps[0] = np.arange(n_e)  # keep the identity in the pool
    det_values = _det_channel_values(p, maps)
    best = min(best, float(det_values.min()))
    if not refine:
        return best

    order = np.argsort(det_values)
    starts = [maps[order[i % len(order)]] for i in range(restarts)]

    def objective(theta: np.ndarray) -> float:
        sq = theta.reshape(n_e, n_e) ** 2
        rows = sq / np.clip(sq.sum(axis=1, keepdims=True), 1e-300, None)
        return _classical_cmi(_apply_channel_rows(p, rows))

    for g in starts:
        theta0 = np.zeros((n_e, n_e))
        theta0[np.arange(n_e), g] = 1.0
        theta0 = theta0 + 0.15 * rng.standard_normal((n_e, n_e))
        res = minimize(objective, theta0.reshape(-1), method="Nelder-Mead",
                       options={"maxfev": 4000, "xatol": 1e-10, "fatol": 1e-12})
        best = min(best, float(res.fun))
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# numerical relative entropy of entanglement over product ensembles
# ---------------------------------------------------------------------------

SEP_MIX_EPS = 1e-12  # mixed-in identity weight; keeps sigma separable and full rank


class _ErObjective:
    """D(rho || sigma(theta)) with its exact gradient.

    theta packs ensemble weights (squared-normalized) and unnormalized local
    vectors for each of the k product terms.  sigma is mixed with
    SEP_MIX_EPS * I/d, which is itself separable, so every evaluation is a
    valid upper bound on E_R.
    """

    def __init__(self, rho: DensityMatrix, k: int):
        self.da, self.db = rho.dims
        self.d = self.da * self.db
        self.k = k
        self.rho = rho.matrix
        w = np.clip(hermitian_eig(self.rho).eigenvalues, 0.0, None)
        self.neg_entropy = -entropy_of_eigenvalues(w)  # sum lam log2 lam
        self.best = math.inf

    @property
    def n_params(self) -> int:
        return self.k * (1 + 2 * self.da + 2 * self.db)

    def _unpack(self, theta: np.ndarray):
        k, da, db = self.k, self.da, self.db
        w = theta[:k]
        off = k
        a = theta[off:off + k * da] + 1j * theta[off + k * da:off + 2 * k * da]
        off += 2 * k * da
        b = theta[off:off + k * db] + 1j * theta[off + k * db:off + 2 * k * db]
        return w, a.reshape(k, da), b.reshape(k, db)

    def value_and_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        k, da, db, d = self.k, self.da, self.db, self.d
        w, a_raw, b_raw = self._unpack(theta)
        na = np.linalg.norm(a_raw, axis=1)
        nb = np.linalg.norm(b_raw, axis=1)
        na = np.where(na < 1e-150, 1e-150, na)
        nb = np.where(nb < 1e-150, 1e-150, nb)
        a = a_raw / na[:, None]
        b = b_raw / nb[:, None]
        s = float(np.dot(w, w))
        if s < 1e-300:
            q = np.full(k, 1.0 / k)
        else:
            q = w * w / s
        v = np.einsum("ki,kj->kij", a, b).reshape(k, d)
        sigma = np.einsum("k,ki,kj->ij", q, v, v.conj())
        sigma = (1.0 - SEP_MIX_EPS) * sigma + SEP_MIX_EPS * np.eye(d) / d
        mu, u = np.linalg.eigh((sigma + sigma.conj().T) / 2.0)
        mu = np.clip(mu, 1e-300, None)
        r = u.conj().T @ self.rho @ u
        r_diag = np.clip(np.real(np.diag(r)), 0.0, None)
        value = self.neg_entropy - float(np.dot(r_diag, np.log2(mu)))
        if value < self.best:
            self.best = value

        # gradient of tr(rho log2 sigma) via the divided-difference kernel
        log_mu = np.log(mu)
        diff = mu[:, None] - mu[None, :]
        same = np.abs(diff) < 1e-14 * np.maximum(mu[:, None], mu[None, :])
        denom = np.where(same, 1.0, diff)
        fdd = np.where(same, 1.0 / np.maximum((mu[:, None] + mu[None, :]) / 2.0, 1e-300),
                       (log_mu[:, None] - log_mu[None, :]) / denom)
        g = -(u @ (r * fdd) @ u.conj().T) / LN2  # d value / d sigma
        g = (g + g.conj().T) / 2.0
        scale = 1.0 - SEP_MIX_EPS

        g_q = scale * np.real(np.einsum("ki,ij,kj->k", v.conj(), g, v))
        if s < 1e-300:
            grad_w = np.zeros(k)
        else:
            grad_w = (2.0 * w / s) * (g_q - float(np.dot(q, g_q)))

        g4 = g.reshape(da, db, da, db)
        ga = np.einsum("kj,ijmn,kn->kim", b.conj(), g4, b)
        gb = np.einsum("ki,ijmn,km->kjn", a.conj(), g4, a)
        gaa = np.einsum("kim,km->ki", ga, a)
        gbb = np.einsum("kjn,kn->kj", gb, b)
        quad = np.real(np.einsum("ki,ki->k", a.conj(), gaa))
        h_a = 2.0 * scale * (q / na)[:, None] * (gaa - quad[:, None] * a)
        quad_b = np.real(np.einsum("kj,kj->k", b.conj(), gbb))
        h_b = 2.0 * scale * (q / nb)[:, None] * (gbb - quad_b[:, None] * b)

        grad = np.concatenate([
            grad_w,
            np.real(h_a).reshape(-1), np.imag(h_a).reshape(-1),
            np.real(h_b).reshape(-1), np.imag(h_b).reshape(-1),
        ])
        return value, grad


def er_numeric(rho: DensityMatrix, k: int | None = None, restarts: int = 8,
               seed: int = 0, maxiter: int = 400) -> float:
    """Numerical upper bound on the relative entropy of entanglement.

    Minimizes D(rho || sigma) over separable sigma parametrized as a mixture
    of ``k`` product pure states (weights through squared normalization,
    local vectors through explicit normalization), using seeded multi-start
    quasi-Newton descent with the exact analytic gradient.  Every evaluated
    sigma is separable, so the running minimum is always a valid upper
    bound; identical seeds give identical results.

    Parameters
    ----------
    rho : DensityMatrix
        Bipartite state with total dimension at most 12 (2x2 and 2x3 targeted).
    k : int, optional
        Ensemble size; defaults to 16 for two qubits and 24 otherwise.
    restarts : int
        Number of independent seeded starts.
    seed : int
        Base RNG seed.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError("er_numeric expects a bipartite state")
    if rho.dim > 12:
        raise DimensionMismatchError(f"total dimension {rho.dim} exceeds 12")
    if k is None:
        k = 16 if rho.dim == 4 else 24
    obj = _ErObjective(rho, k)
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, r]))
        theta0 = rng.standard_normal(obj.n_params)
        minimize(obj.value_and_grad, theta0, jac=True, method="L-BFGS-B",
                 options={"maxiter": maxiter, "ftol": 1e-14, "gtol": 1e-10})
    return max(obj.best, 0.0)
