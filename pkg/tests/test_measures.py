import itertools
import math

import numpy as np
import pytest

from diqkd_bounds import (
    AlphabetTooLargeError,
    CcqState,
    DensityMatrix,
    assemble_ccq,
    cmi_ccq,
    er_bell_diagonal_closed,
    er_isotropic_closed,
    er_numeric,
    intrinsic_info,
    kron,
    make_bell_diagonal,
    make_isotropic,
    mutual_info,
    noisy_key_povm,
    observable_povm,
    partial_trace,
    von_neumann_entropy,
)
from diqkd_bounds.measures import TWO_SQRT2, _ErObjective
from diqkd_bounds.states import PAULI_Z
from util import random_density

H = lambda x: 0.0 if x in (0.0, 1.0) else -x * math.log2(x) - (1 - x) * math.log2(1 - x)


# --- closed forms -----------------------------------------------------------

def test_er_isotropic_endpoints():
    assert abs(er_isotropic_closed(TWO_SQRT2) - 1.0) < 1e-12
    lam_half_omega = (0.5 - 0.25) * 8 * math.sqrt(2) / 3  # omega with lam = 1/2
    assert er_isotropic_closed(lam_half_omega) == 0.0
    assert er_isotropic_closed(0.5) == 0.0  # below the separable edge


def test_er_isotropic_at_local_bound():
    lam = 3 * 2.0 / (8 * math.sqrt(2)) + 0.25
    assert abs(lam - 0.780330) < 1e-6
    assert abs(er_isotropic_closed(2.0) - (1 - H(lam))) < 1e-12
    assert abs(er_isotropic_closed(2.0) - 0.240436) < 1e-5


def test_er_isotropic_out_of_range():
    with pytest.raises(ValueError):
        er_isotropic_closed(3.0)


def test_er_bell_diagonal_values():
    assert er_bell_diagonal_closed(1.0) == 0.0 + 1.0
    assert er_bell_diagonal_closed(0.5) == 0.0
    c = math.sqrt(2.5**2 / 4 - 1)
    assert abs(c - 0.75) < 1e-12
    assert abs(er_bell_diagonal_closed((1 + c) / 2) - (1 - H(0.875))) < 1e-12
    with pytest.raises(ValueError):
        er_bell_diagonal_closed(0.3)


# --- numerical E_R ----------------------------------------------------------

def test_er_objective_gradient_matches_finite_differences():
    rho = make_isotropic(0.37)
    obj = _ErObjective(rho, 4)
    rng = np.random.default_rng(5)
    theta = rng.standard_normal(obj.n_params)
    _, grad = obj.value_and_grad(theta)
    eps = 1e-6
    for i in rng.choice(len(theta), size=25, replace=False):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += eps
        tm[i] -= eps
        num = (obj.value_and_grad(tp)[0] - obj.value_and_grad(tm)[0]) / (2 * eps)
        assert abs(num - grad[i]) < 1e-6


def test_er_numeric_bell_state():
    phi = make_bell_diagonal(1.0, 0.0)
    assert abs(er_numeric(phi, seed=0) - 1.0) < 1e-3


def test_er_numeric_matches_isotropic_closed_form():
    omega = 2.4
    rho = make_isotropic(1 - omega / TWO_SQRT2)
    assert abs(er_numeric(rho, seed=0) - er_isotropic_closed(omega)) < 1e-3


def test_er_numeric_product_state_is_zero():
    rng = np.random.default_rng(43)
    a = random_density(rng, (2,))
    b = random_density(rng, (2,))
    rho = DensityMatrix(kron(a.matrix, b.matrix), (2, 2))
    assert er_numeric(rho, seed=0) < 1e-6


def test_er_numeric_reproducible():
    rho = make_isotropic(0.2)
    assert er_numeric(rho, restarts=2, seed=7) == er_numeric(rho, restarts=2, seed=7)


def test_er_numeric_oracle_grid_isotropic():
    # upper-bound property against the closed form on a 20-point family grid
    for omega in np.linspace(0.2, TWO_SQRT2, 20):
        rho = make_isotropic(1 - omega / TWO_SQRT2)
        num = er_numeric(rho, restarts=3, seed=1)
        closed = er_isotropic_closed(float(omega))
        assert num >= closed - 1e-3
        assert num <= closed + 1e-3


def test_er_numeric_oracle_grid_bell_diagonal():
    for lam in np.linspace(0.5, 1.0, 20):
        rho = make_bell_diagonal(float(lam), float(1 - lam))
        num = er_numeric(rho, restarts=3, seed=2)
        closed = er_bell_diagonal_closed(float(lam))
        assert abs(num - closed) < 1e-3


def test_er_numeric_qubit_qutrit_erasure_choi():
    # the erasure Choi state has the known value 1 - p
    from diqkd_bounds import QubitChannel, choi_state
    for p in (0.2, 0.5):
        choi = choi_state(QubitChannel("erasure", p))
        assert choi.dims == (2, 3)
        assert abs(er_numeric(choi, seed=0) - (1 - p)) < 1e-3


def test_er_numeric_rejects_large_dimensions():
    from diqkd_bounds import DimensionMismatchError
    rng = np.random.default_rng(5)
    big = random_density(rng, (4, 4))
    with pytest.raises(DimensionMismatchError):
        er_numeric(big)


# --- conditional mutual information -----------------------------------------

def cmi_oracle(ccq: CcqState) -> float:
    """Independent path: build the full ABE density matrix and use entropies."""
    n_a, n_b = ccq.eve_ops.shape[:2]
    d_e = ccq.eve_dim
    dims = [n_a, n_b, d_e]
    full = np.zeros((n_a * n_b * d_e,) * 2, dtype=complex)
    for a in range(n_a):
        for b in range(n_b):
            ab = np.zeros((n_a * n_b, n_a * n_b))
            ab[a * n_b + b, a * n_b + b] = 1.0
            full += kron(ab, ccq.eve_ops[a, b])
    rho = DensityMatrix(full, tuple(dims))

    def s(keep):
        reduced = partial_trace(full, dims, keep)
        reduced = reduced / np.trace(reduced).real
        return von_neumann_entropy(DensityMatrix(reduced, tuple(dims[k] for k in keep)))

    return s([0, 2]) + s([1, 2]) - s([0, 1, 2]) - s([2])


def test_cmi_trivial_eve_reduces_to_mutual_information():
    phi = make_bell_diagonal(1.0, 0.0)
    ccq = assemble_ccq(phi, (observable_povm(PAULI_Z), observable_povm(PAULI_Z)))
    assert abs(cmi_ccq(ccq) - 1.0) < 1e-10


def test_cmi_eve_with_perfect_copy_is_zero():
    # classically correlated state: Eve's purifier distinguishes the key bit
    rho = DensityMatrix(np.diag([0.5, 0, 0, 0.5]).astype(complex), (2, 2))
    ccq = assemble_ccq(rho, (observable_povm(PAULI_Z), observable_povm(PAULI_Z)))
    assert cmi_ccq(ccq) < 1e-10


def test_cmi_al_attack_at_max_violation():
    sigma = make_bell_diagonal(1.0, 0.0)  # C = 1 at omega = 2*sqrt(2)
    ccq = assemble_ccq(sigma, (observable_povm(PAULI_Z), noisy_key_povm(0.0)))
    assert abs(cmi_ccq(ccq) - 1.0) < 1e-10


def test_cmi_matches_full_density_matrix_oracle():
    rng = np.random.default_rng(47)
    from util import random_projective_family
    for _ in range(8):
        rho = random_density(rng, (2, 2))
        fam = random_projective_family(rng, 1, 1)
        ccq = assemble_ccq(rho, (fam.alice[0], fam.bob[0]))
        assert abs(cmi_ccq(ccq) - cmi_oracle(ccq)) < 1e-9


def test_cmi_fixed_strategy_mixture_is_exactly_affine():
    # flag-extending two ccq states with a classical register averages the CMI
    rng = np.random.default_rng(71)
    from util import random_projective_family
    fam = random_projective_family(rng, 1, 1)
    povm = (fam.alice[0], fam.bob[0])
    c1 = assemble_ccq(random_density(rng, (2, 2)), povm)
    c2 = assemble_ccq(random_density(rng, (2, 2)), povm)
    p = 0.3
    d1, d2 = c1.eve_dim, c2.eve_dim
    blocks = np.zeros((2, 2, d1 + d2, d1 + d2), dtype=complex)
    blocks[:, :, :d1, :d1] = p * c1.eve_ops
    blocks[:, :, d1:, d1:] = (1 - p) * c2.eve_ops
    mixed = CcqState(blocks)
    expected = p * cmi_ccq(c1) + (1 - p) * cmi_ccq(c2)
    assert abs(cmi_ccq(mixed) - expected) < 1e-10


# --- classical mutual information -------------------------------------------

def test_mutual_info_values():
    assert abs(mutual_info(np.array([[0.5, 0.0], [0.0, 0.5]])) - 1.0) < 1e-12
    assert mutual_info(np.outer([0.3, 0.7], [0.6, 0.4])) < 1e-12
    bsc = np.array([[0.445, 0.055], [0.055, 0.445]])
    assert abs(mutual_info(bsc) - (1 - H(0.11))) < 1e-12
    with pytest.raises(ValueError):
        mutual_info(np.array([[0.5, 0.2], [0.1, 0.1]]))


# --- intrinsic information ---------------------------------------------------

def intrinsic_oracle_det(p_abe: np.ndarray) -> float:
    """Brute force over every deterministic channel (any output size)."""
    n_e = p_abe.shape[2]

    def cmi(q):
        flat = lambda t: t.reshape(-1)
        ent = lambda t: -sum(v * math.log2(v) for v in flat(t) if v > 1e-15)
        return (ent(q.sum(axis=1)) + ent(q.sum(axis=0))
                - ent(q) - ent(q.sum(axis=(0, 1))))

    best = math.inf
    for g in itertools.product(range(n_e), repeat=n_e):
        q = np.zeros_like(p_abe)
        for e in range(n_e):
            q[:, :, g[e]] += p_abe[:, :, e]
        best = min(best, cmi(q))
    return max(best, 0.0)


def test_intrinsic_eve_independent():
    joint = np.array([[0.4, 0.1], [0.1, 0.4]])
    p = np.einsum("ab,e->abe", joint, np.array([0.5, 0.5]))
    assert abs(intrinsic_info(p, seed=0) - mutual_info(joint)) < 1e-9


def test_intrinsic_eve_copy_is_zero():
    p = np.zeros((2, 2, 4))
    for a in range(2):
        for b in range(2):
            p[a, b, 2 * a + b] = 0.25
    assert intrinsic_info(p, seed=0) < 1e-12


def test_intrinsic_noisy_copy_matches_brute_force():
    # a, b uniform correlated; e = a xor n with n ~ Bernoulli(1/4)
    p = np.zeros((2, 2, 2))
    for a in range(2):
        for n in range(2):
            p[a, a, a ^ n] = 0.5 * (0.75 if n == 0 else 0.25)
    val = intrinsic_info(p, seed=0)
    assert val <= intrinsic_oracle_det(p) + 1e-12
    assert abs(val - intrinsic_oracle_det(p)) < 1e-6


def test_intrinsic_never_exceeds_unprocessed_cmi():
    rng = np.random.default_rng(53)
    for _ in range(10):
        p = rng.dirichlet(np.ones(2 * 2 * 3)).reshape(2, 2, 3)
        raw = p.sum(axis=(0, 1))
        cond = p / np.where(raw > 0, raw, 1.0)[None, None, :]
        cmi = sum(raw[e] * mutual_info(cond[:, :, e]) for e in range(3) if raw[e] > 0)
        assert intrinsic_info(p, seed=0) <= cmi + 1e-9


def test_intrinsic_alphabet_cap_after_reduction():
    p = np.zeros((2, 2, 40))
    # forty symbols but only four distinct conditionals: reduces and runs
    for e in range(40):
        a, b = e % 2, (e // 2) % 2
        p[a, b, e] = 1.0 / 40
    assert intrinsic_info(p, seed=0) < 1e-12
    rng = np.random.default_rng(61)
    big = rng.dirichlet(np.ones(2 * 2 * 17)).reshape(2, 2, 17)
    with pytest.raises(AlphabetTooLargeError):
        intrinsic_info(big, seed=0)


def test_intrinsic_reproducible():
    rng = np.random.default_rng(67)
    p = rng.dirichlet(np.ones(2 * 2 * 4)).reshape(2, 2, 4)
    assert intrinsic_info(p, seed=3) == intrinsic_info(p, seed=3)
