"""Independent reference computations used only by the tests.

Nothing here calls the closed-form routines under test.
"""

import numpy as np

OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def eig_symplectic(V):
    """Symplectic eigenvalues from a generic eigensolve of (Omega V)^2.

    Each eigenvalue -nu^2 appears twice; returns (nu_small, nu_big).
    """
    M = OMEGA @ np.asarray(V, dtype=float)
    lam = np.linalg.eigvals(M @ M)
    nu = np.sort(np.sqrt(np.abs(lam.real)))
    return nu[0], nu[2]


def eig_ppt_nu_min(V):
    """PPT eigenvalue via explicit conjugation by diag(1, 1, 1, -1)."""
    F = np.diag([1.0, 1.0, 1.0, -1.0])
    return eig_symplectic(F @ np.asarray(V) @ F)[0]


def explicit_loss(V, t1, t2):
    """Beamsplitter with vacuum: X V X^T + Y written out with matrices."""
    X = np.diag(np.sqrt([t1, t1, t2, t2]))
    Y = np.diag([1 - t1, 1 - t1, 1 - t2, 1 - t2])
    return X @ np.asarray(V) @ X.T + Y


def twin_beam_matrix(pm, pp, qp, qm):
    """Embed written independently: variances of the EPR combinations."""
    # (p1, q1, p2, q2) -> (p_minus, p_plus, q_plus, q_minus), orthogonal map
    U = np.array([[1, 0, -1, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, -1]]) / np.sqrt(2)
    return U.T @ np.diag([pm, pp, qp, qm]) @ U


def closed_form_critical_t(pm, pp, qp, qm):
    """Root of the single-beam-loss polynomial, see the decisions note.

    det V'(T) - Delta'(T) + 1 = T (a + b T) with a = E/2, a + b = Wp * Wbp.
    """
    w_sum, w_bar_sum = pm + qp - 2, pp + qm - 2
    w_prod, w_bar_prod = pm * qp - 1, pp * qm - 1
    e = w_prod * w_bar_sum + w_bar_prod * w_sum
    return e / (e - 2 * w_prod * w_bar_prod)


# ------------------------------------------------------------ random states


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def random_symplectic(rng, max_squeeze=1.0):
    """Product of local rotations, local squeezers and a beamsplitter."""
    def local():
        S = np.zeros((4, 4))
        for k in range(2):
            r = rng.uniform(-max_squeeze, max_squeeze)
            block = rotation(rng.uniform(0, 2 * np.pi)) @ np.diag([np.exp(-r), np.exp(r)]) \
                @ rotation(rng.uniform(0, 2 * np.pi))
            S[2 * k:2 * k + 2, 2 * k:2 * k + 2] = block
        return S

    th = rng.uniform(0, 2 * np.pi)
    c, s = np.cos(th), np.sin(th)
    BS = np.block([[c * np.eye(2), s * np.eye(2)], [-s * np.eye(2), c * np.eye(2)]])
    return local() @ BS @ local()


def random_physical_matrix(rng, max_squeeze=1.0, max_thermal=3.0):
    nu1, nu2 = rng.uniform(1.0, max_thermal, 2)
    S = random_symplectic(rng, max_squeeze)
    V = S @ np.diag([nu1, nu1, nu2, nu2]) @ S.T
    return 0.5 * (V + V.T)


def random_epr_variances(rng, n):
    """Physical twin-beam states of the EPR family (p_plus, q_minus >= 1).

    p_minus and q_plus range over squeezed and anti-squeezed values; the
    conjugate pair sits at or above the vacuum level and respects both
    uncertainty products.
    """
    pm = np.exp(rng.uniform(np.log(0.1), np.log(3.0), n))
    qp = np.exp(rng.uniform(np.log(0.1), np.log(3.0), n))
    pp = np.maximum(1.0, 1.0 / qp) * np.exp(rng.uniform(0, np.log(3.0), n))
    qm = np.maximum(1.0, 1.0 / pm) * np.exp(rng.uniform(0, np.log(3.0), n))
    return np.stack([pm, pp, qp, qm], axis=1)
