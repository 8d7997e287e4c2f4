"""Shared independent oracles and random-instance generators for the tests.

The oracles here deliberately avoid the library's thin-factor code paths:
the full-SVD aligner materializes the dense D x D rotation, and the
orthogonal sampler draws from QR of Gaussian matrices with both
determinant signs.
"""

import numpy as np


def random_orthogonal(rng, n, reflect=None):
    """Orthogonal matrix from QR of a Gaussian; optionally force det sign."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if reflect is None:
        reflect = bool(rng.integers(2))
    if reflect:
        q = q.copy()
        q[:, 0] = -q[:, 0]
    return q


def random_orthogonal_batch(rng, count, n):
    """(count, n, n) orthogonal matrices, both determinant signs mixed in."""
    g = rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.einsum("...ii->...i", r))
    q = q * signs[:, None, :]
    flip = rng.integers(2, size=count).astype(bool)
    q[flip, :, 0] = -q[flip, :, 0]
    return q


def full_svd_rigid_align(zc, zs):
    """Dense-rotation alignment oracle: explicit D x D Q = V_full U_full^T.

    Operates on raw (C, H, W) arrays with channels-as-points and the
    centered scale convention; returns the aligned (C, H*W) block.
    """
    c = zc.shape[0]
    xc = zc.reshape(c, -1)
    xs = zs.reshape(c, -1)
    mu_c = xc.mean(axis=0)
    mu_s = xs.mean(axis=0)
    xc = xc - mu_c
    xs = xs - mu_s
    gamma_c = np.linalg.norm(xc)
    gamma_s = np.linalg.norm(xs)
    a = (xc / gamma_c).T @ (xs / gamma_s)
    u, _, vt = np.linalg.svd(a, full_matrices=True)
    q = vt.T @ u.T
    return ((xs / gamma_s) @ q) * gamma_c + mu_c


def random_feature_pair(rng, c, h, w):
    return (
        rng.standard_normal((c, h, w)),
        rng.standard_normal((c, h, w)),
    )
