import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqcknap.errors import SpectralError
from aqcknap.lanczos import lanczos_lowest


def random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


@given(st.integers(0, 2**32 - 1), st.integers(5, 120), st.integers(1, 5))
def test_matches_dense_eigh(seed, n, k):
    rng = np.random.default_rng(seed)
    a = random_symmetric(rng, n)
    res = lanczos_lowest(lambda v: a @ v, n, k, tol=1e-11, basis=min(40, n), seed=seed)
    ref = np.linalg.eigvalsh(a)[:k]
    np.testing.assert_allclose(res.eigenvalues, ref, atol=1e-8)
    vecs = res.eigenvectors
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(len(ref)), atol=1e-8)
    resid = a @ vecs - vecs * res.eigenvalues
    assert np.linalg.norm(resid, axis=0).max() < 1e-5


def test_finds_all_copies_of_degenerate_level():
    diag = np.array([0.0, 0.0, 0.0, 1.0, 1.0] + list(np.linspace(2, 5, 95)))
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((100, 100)))
    a = q @ np.diag(diag) @ q.T
    res = lanczos_lowest(lambda v: a @ v, 100, 5, tol=1e-11, basis=30)
    np.testing.assert_allclose(res.eigenvalues, [0, 0, 0, 1, 1], atol=1e-9)


def test_invariant_start_space():
    # diagonal operator: a single Krylov space from a random vector still spans it
    d = np.arange(8.0)
    res = lanczos_lowest(lambda v: d * v, 8, 3)
    np.testing.assert_allclose(res.eigenvalues, [0, 1, 2], atol=1e-12)


def test_counts_matvecs():
    d = np.arange(50.0)
    calls = []

    def mv(v):
        calls.append(1)
        return d * v

    res = lanczos_lowest(mv, 50, 2, basis=20)
    assert res.matvecs == len(calls) > 0


def test_reports_non_convergence():
    rng = np.random.default_rng(0)
    a = random_symmetric(rng, 400)
    with pytest.raises(SpectralError) as exc:
        lanczos_lowest(lambda v: a @ v, 400, 4, tol=1e-14, basis=6, max_restarts=2)
    assert exc.value.code == "NO_CONVERGENCE"
