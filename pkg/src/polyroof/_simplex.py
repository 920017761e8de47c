"""Compiled Nelder-Mead for the ensemble-average objective.

The objective is a few dozen flops, so the interpreter overhead of a Python
simplex loop would dominate; both the objective and the simplex live here.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def ensemble_objective(x, coeffs, sqrt_lam, kappa, p, dp, m):
    """Average of kappa|P|^p over the ensemble obtained from the m x 2 matrix in x.

    x holds Re V then Im V (row-major). The columns of V are Gram-Schmidt
    orthonormalized before use, which projects onto the isometries.
    """
    d = coeffs.shape[0] - 1
    v0 = np.empty(m, dtype=np.complex128)
    v1 = np.empty(m, dtype=np.complex128)
    for i in range(m):
        v0[i] = complex(x[2 * i], x[2 * m + 2 * i])
        v1[i] = complex(x[2 * i + 1], x[2 * m + 2 * i + 1])
    n0 = 0.0
    for i in range(m):
        n0 += v0[i].real ** 2 + v0[i].imag ** 2
    n0 = np.sqrt(n0)
    if n0 < 1e-12:
        return 1e300
    for i in range(m):
        v0[i] /= n0
    # two projection passes keep the columns orthogonal when they start nearly parallel
    for _ in range(2):
        ov = 0j
        for i in range(m):
            ov += v0[i].conjugate() * v1[i]
        for i in range(m):
            v1[i] -= ov * v0[i]
    n1 = 0.0
    for i in range(m):
        n1 += v1[i].real ** 2 + v1[i].imag ** 2
    n1 = np.sqrt(n1)
    if n1 < 1e-12:
        return 1e300
    total = 0.0
    for i in range(m):
        a = v0[i] * sqrt_lam[0]
        b = v1[i] * sqrt_lam[1] / n1
        w = a.real ** 2 + a.imag ** 2 + b.real ** 2 + b.imag ** 2
        if w < 1e-300:
            continue
        # binary form sum_k c_k a^(d-k) b^k
        val = 0j
        bk = 1.0 + 0j
        apows = np.empty(d + 1, dtype=np.complex128)
        apows[0] = 1.0
        for k in range(1, d + 1):
            apows[k] = apows[k - 1] * a
        for k in range(d + 1):
            val += coeffs[k] * apows[d - k] * bk
            bk *= b
        total += kappa * np.abs(val) ** p * w ** (1.0 - dp / 2.0)
    return total


@njit(cache=True, nogil=True)
def nelder_mead(x0, step, coeffs, sqrt_lam, kappa, p, dp, m, max_evals, xtol):
    """Standard Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2).

    Stops when every vertex lies within ``xtol`` of the best one or after
    ``max_evals`` objective calls. Returns (best x, best value, evaluations).
    """
    n = x0.shape[0]
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    evals = 0
    for i in range(n + 1):
        fs[i] = ensemble_objective(sim[i], coeffs, sqrt_lam, kappa, p, dp, m)
        evals += 1
    centroid = np.empty(n)
    while evals < max_evals:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        diam = 0.0
        for i in range(1, n + 1):
            dist = 0.0
            for j in range(n):
                dist = max(dist, abs(sim[i, j] - sim[0, j]))
            diam = max(diam, dist)
        if diam < xtol:
            break
        for j in range(n):
            s = 0.0
            for i in range(n):
                s += sim[i, j]
            centroid[j] = s / n
        xr = 2.0 * centroid - sim[n]
        fr = ensemble_objective(xr, coeffs, sqrt_lam, kappa, p, dp, m)
        evals += 1
        if fr < fs[0]:
            xe = 3.0 * centroid - 2.0 * sim[n]
            fe = ensemble_objective(xe, coeffs, sqrt_lam, kappa, p, dp, m)
            evals += 1
            if fe < fr:
                sim[n] = xe
                fs[n] = fe
            else:
                sim[n] = xr
                fs[n] = fr
        elif fr < fs[n - 1]:
            sim[n] = xr
            fs[n] = fr
        else:
            if fr < fs[n]:
                xc = 1.5 * centroid - 0.5 * sim[n]
            else:
                xc = 0.5 * centroid + 0.5 * sim[n]
            fc = ensemble_objective(xc, coeffs, sqrt_lam, kappa, p, dp, m)
            evals += 1
            if fc < min(fr, fs[n]):
                sim[n] = xc
                fs[n] = fc
            else:
                for i in range(1, n + 1):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fs[i] = ensemble_objective(sim[i], coeffs, sqrt_lam, kappa, p, dp, m)
                    evals += 1
    best = np.argmin(fs)
    return sim[best].copy(), fs[best], evals
