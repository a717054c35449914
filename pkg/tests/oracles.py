"""Independent reference computations used to check the library.

Nothing here imports the package: KMO runs on exact fractions, everything
else on 50-digit mpmath arithmetic.
"""

from fractions import Fraction

import mpmath as mp

mp.mp.dps = 50


def fraction_inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        pivot = a[c][c]
        a[c] = [x / pivot for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def kmo_exact(r) -> Fraction:
    """KMO on exact rationals; squared partials q_ij^2 / (q_ii q_jj) stay rational."""
    r = [[Fraction(x) for x in row] for row in r]
    q = fraction_inverse(r)
    n = len(r)
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    r2 = sum(r[i][j] ** 2 for i, j in off)
    a2 = sum(q[i][j] ** 2 / (q[i][i] * q[j][j]) for i, j in off)
    return r2 / (r2 + a2)


def haversine_mp(lat1, lon1, lat2, lon2):
    lat1, lon1, lat2, lon2 = (mp.mpf(str(x)) for x in (lat1, lon1, lat2, lon2))
    p1, p2 = mp.radians(lat1), mp.radians(lat2)
    dp, dl = mp.radians(lat2 - lat1), mp.radians(lon2 - lon1)
    h = mp.sin(dp / 2) ** 2 + mp.cos(p1) * mp.cos(p2) * mp.sin(dl / 2) ** 2
    return 2 * 6371 * mp.asin(mp.sqrt(h))


def entropy_weights_mp(columns, benefit):
    n = len(columns[0])
    d = []
    for col, is_benefit in zip(columns, benefit):
        col = [mp.mpf(str(v)) for v in col]
        if not is_benefit:
            top = max(col)
            col = [top - v for v in col]
        lo, hi = min(col), max(col)
        if hi == lo:
            d.append(mp.mpf(0))
            continue
        x = [(v - lo) / (hi - lo) for v in col]
        s = sum(x)
        p = [v / s for v in x]
        e = -sum(v * mp.log(v) for v in p if v > 0) / mp.log(n)
        d.append(1 - e)
    total = sum(d)
    return [di / total for di in d]


def topsis_mp(rows, weights, benefit):
    m, k = len(rows), len(rows[0])
    x = [[mp.mpf(str(v)) for v in row] for row in rows]
    w = [mp.mpf(str(v)) for v in weights]
    norm = [mp.sqrt(sum(x[i][j] ** 2 for i in range(m))) for j in range(k)]
    u = [[w[j] * x[i][j] / norm[j] for j in range(k)] for i in range(m)]
    best = [(max if benefit[j] else min)(u[i][j] for i in range(m)) for j in range(k)]
    worst = [(min if benefit[j] else max)(u[i][j] for i in range(m)) for j in range(k)]
    out = []
    for i in range(m):
        dp = mp.sqrt(sum((u[i][j] - best[j]) ** 2 for j in range(k)))
        dm = mp.sqrt(sum((u[i][j] - worst[j]) ** 2 for j in range(k)))
        out.append(dm / (dp + dm))
    return out


def correlation_mp(rows):
    m, k = len(rows), len(rows[0])
    x = [[mp.mpf(str(v)) for v in row] for row in rows]
    mean = [sum(x[i][j] for i in range(m)) / m for j in range(k)]
    dev = [[x[i][j] - mean[j] for j in range(k)] for i in range(m)]
    ss = [mp.sqrt(sum(dev[i][j] ** 2 for i in range(m))) for j in range(k)]
    return [
        [sum(dev[i][a] * dev[i][b] for i in range(m)) / (ss[a] * ss[b]) for b in range(k)]
        for a in range(k)
    ]


def charpoly_eigenvalues_3x3(r):
    """Roots of det(t I - R) for a symmetric 3x3 matrix, descending."""
    tr = r[0][0] + r[1][1] + r[2][2]
    minors = (
        r[0][0] * r[1][1] - r[0][1] * r[1][0]
        + r[0][0] * r[2][2] - r[0][2] * r[2][0]
        + r[1][1] * r[2][2] - r[1][2] * r[2][1]
    )
    det = mp.det(mp.matrix(r))
    roots = mp.polyroots([1, -tr, minors, -det], maxsteps=200, extraprec=200)
    return sorted((mp.re(z) for z in roots), reverse=True)
