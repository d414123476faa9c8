"""Compiled inner loops.

Everything here works on plain integer/float arrays so the public modules can
stay readable. Swap positions are 1-based (a swap ``k`` exchanges positions
``k`` and ``k + 1``); particle labels are 1-based initial positions; arrays are
0-based, so particle ``x`` lives at index ``x - 1``.
"""

import numpy as np
from numba import njit

SENTINEL = -(2**31) + 1


# --- xoshiro256** -----------------------------------------------------------


@njit(inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(inline="always")
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(inline="always")
def bounded(s, bound):
    """Uniform integer in [0, bound) by masked rejection (exactly unbiased)."""
    mask = np.uint64(bound - 1)
    mask |= mask >> np.uint64(1)
    mask |= mask >> np.uint64(2)
    mask |= mask >> np.uint64(4)
    mask |= mask >> np.uint64(8)
    mask |= mask >> np.uint64(16)
    mask |= mask >> np.uint64(32)
    while True:
        x = next_u64(s) & mask
        if x < np.uint64(bound):
            return np.int64(x)


# --- staircase tableaux -----------------------------------------------------


@njit(cache=True)
def hook_walk(n, s):
    """Uniform standard tableau of staircase shape (n-1, ..., 1).

    Values are placed from N down to 1; each goes to the corner reached by a
    hook walk started at a uniform cell of the remaining shape. ``s`` is the
    xoshiro state and is advanced in place. Cells outside the shape hold 0.
    """
    m = n - 1
    row = np.empty(m, np.int64)
    col = np.empty(m, np.int64)
    for i in range(m):
        row[i] = m - i
        col[i] = m - i
    T = np.zeros((m, m), np.int32)
    nrows = m
    for v in range(n * (n - 1) // 2, 0, -1):
        ncols = row[0]
        while True:
            r = bounded(s, nrows)
            c = bounded(s, ncols)
            if c < row[r]:
                break
        while True:
            arm = row[r] - c - 1
            leg = col[c] - r - 1
            h = arm + leg
            if h == 0:
                break
            j = bounded(s, h) + 1
            if j <= arm:
                c += j
            else:
                r += j - arm
        T[r, c] = v
        row[r] -= 1
        col[c] -= 1
        while nrows > 0 and row[nrows - 1] == 0:
            nrows -= 1
    return T


@njit(cache=True)
def promote(T, n, steps):
    """First ``steps`` swaps read off a staircase tableau by promotion.

    Each round records the row (1-based) of the corner holding the current
    maximum, deletes it, slides the hole to the origin pulling in the larger of
    the up/left neighbours, and puts a new minimum at the origin.

    The tableau is stored by anti-diagonals with sentinel padding, so a cell's
    up and left neighbours are adjacent in memory. Slides are run as a
    wavefront: slide s+1 starts two ticks after slide s and only reads
    diagonals that slide s has finished with, which lets the independent loads
    overlap. The output is identical to running the slides one at a time.
    """
    m = n - 1
    out = np.empty(steps, np.int32)
    if m == 1:
        out[:] = 1
        return out
    base = np.empty(m, np.int64)
    tot = 0
    for d in range(m):
        base[d] = tot
        tot += d + 3
    P = np.full(tot, SENTINEL, np.int32)
    for r in range(m):
        for c in range(m - r):
            P[base[r + c] + r + 1] = T[r, c]
    last = base[m - 1]
    cap = 1
    while cap < m + 4:
        cap <<= 1
    mask = cap - 1
    acur = np.empty(cap, np.int64)
    lo = 0
    hi = 0
    tick = 0
    while lo < steps:
        if hi < steps and (tick & 1) == 0:
            best = P[last + 1]
            br = 0
            for r in range(1, m):
                v = P[last + r + 1]
                if v > best:
                    best = v
                    br = r
            out[hi] = br + 1
            acur[hi & mask] = last + br + 1
            hi += 1
        d0 = m - 1 - tick
        for sid in range(lo, hi):
            k = sid & mask
            cur = acur[k]
            # slide sid sits on diagonal d0 + 2*sid; its neighbours start at b
            b = cur - (d0 + 2 * sid) - 3
            up = P[b]
            left = P[b + 1]
            tu = np.int64(up > left)
            P[cur] = max(up, left)
            acur[k] = b + 1 - tu
        tick += 1
        while lo < hi and m - 1 - tick + 2 * lo == 0:
            P[acur[lo & mask]] = -lo - 1
            lo += 1
    return out


@njit(cache=True)
def promote_reference(T, n, steps):
    """Plain one-slide-at-a-time promotion; used to cross-check ``promote``."""
    m = n - 1
    P = np.full((m + 1, m + 1), SENTINEL, np.int64)
    for r in range(m):
        for c in range(m - r):
            P[r + 1, c + 1] = T[r, c]
    out = np.empty(steps, np.int32)
    for s in range(steps):
        best = P[1, m]
        br = 0
        for r in range(1, m):
            if P[r + 1, m - r] > best:
                best = P[r + 1, m - r]
                br = r
        out[s] = br + 1
        r = br + 1
        c = m - br
        while r > 1 or c > 1:
            if P[r - 1, c] > P[r, c - 1]:
                P[r, c] = P[r - 1, c]
                r -= 1
            else:
                P[r, c] = P[r, c - 1]
                c -= 1
        P[1, 1] = -s - 1
    return out


@njit(cache=True)
def sample_prefixes(n, steps, reps, s):
    out = np.empty((reps, steps), np.int32)
    for i in range(reps):
        T = hook_walk(n, s)
        out[i] = promote(T, n, steps)
    return out


# --- swap sequences ---------------------------------------------------------


@njit(cache=True)
def check_word(swaps, n):
    """Return (code, index): code 0 ok, 1 out of range, 2 non-reducing swap."""
    pos_to_particle = np.arange(1, n + 1)
    for i in range(swaps.size):
        k = swaps[i]
        if k < 1 or k > n - 1:
            return 1, i
        a = pos_to_particle[k - 1]
        b = pos_to_particle[k]
        if a > b:
            return 2, i
        pos_to_particle[k - 1] = b
        pos_to_particle[k] = a
    return 0, -1


@njit(cache=True)
def positions_at(swaps, n, step):
    """particle_pos[x-1] = position of particle x after ``step`` swaps."""
    pos_to_particle = np.arange(1, n + 1)
    for i in range(step):
        k = swaps[i]
        a = pos_to_particle[k - 1]
        pos_to_particle[k - 1] = pos_to_particle[k]
        pos_to_particle[k] = a
    particle_pos = np.empty(n, np.int64)
    for p in range(n):
        particle_pos[pos_to_particle[p] - 1] = p + 1
    return particle_pos


@njit(cache=True)
def swap_events(swaps, n):
    """Per-particle jump steps (1-based swap index) and jump signs.

    In a sorting network each particle swaps exactly n-1 times, so the result
    is two dense (n, n-1) arrays.
    """
    steps = np.empty((n, n - 1), np.int64)
    moves = np.empty((n, n - 1), np.int8)
    count = np.zeros(n, np.int64)
    pos_to_particle = np.arange(n)
    for i in range(swaps.size):
        k = swaps[i]
        a = pos_to_particle[k - 1]
        b = pos_to_particle[k]
        steps[a, count[a]] = i + 1
        moves[a, count[a]] = 1
        count[a] += 1
        steps[b, count[b]] = i + 1
        moves[b, count[b]] = -1
        count[b] += 1
        pos_to_particle[k - 1] = b
        pos_to_particle[k] = a
    return steps, moves


@njit(cache=True)
def pair_swap_times(swaps, n):
    """times[a, b] = 1-based step at which particles a+1 and b+1 swap."""
    times = np.zeros((n, n), np.int32)
    pos_to_particle = np.arange(n)
    for i in range(swaps.size):
        k = swaps[i]
        a = pos_to_particle[k - 1]
        b = pos_to_particle[k]
        times[a, b] = i + 1
        times[b, a] = i + 1
        pos_to_particle[k - 1] = b
        pos_to_particle[k] = a
    return times


# --- sup-norm deviations on the step grid -----------------------------------


@njit(inline="always")
def _sine_range(A, theta, N, lo, hi):
    """Min and max of A*sin(pi*s/N + theta) over integers s in [lo, hi]."""
    w = np.pi / N
    f_lo = A * np.sin(w * lo + theta)
    f_hi = A * np.sin(w * hi + theta)
    fmin = min(f_lo, f_hi)
    fmax = max(f_lo, f_hi)
    # critical points: w*s + theta = pi/2 + j*pi
    j0 = int(np.floor((w * lo + theta - np.pi / 2) / np.pi))
    for j in range(j0, j0 + 4):
        sc = (np.pi / 2 + j * np.pi - theta) / w
        if sc < lo - 1 or sc > hi + 1:
            continue
        for s in (np.floor(sc), np.floor(sc) + 1):
            if lo <= s <= hi:
                f = A * np.sin(w * s + theta)
                fmin = min(fmin, f)
                fmax = max(fmax, f)
    return fmin, fmax


@njit(cache=True)
def segment_sup_deviation(jump_steps, levels, N, A, theta, scale, shift):
    """max over s in [0, N] of |level(s)*scale + shift - A*sin(pi*s/N + theta)|.

    ``levels[k]`` holds on steps [jump_steps[k-1], jump_steps[k] - 1].
    """
    best = 0.0
    nseg = levels.size
    for k in range(nseg):
        lo = 0 if k == 0 else jump_steps[k - 1]
        hi = N if k == nseg - 1 else jump_steps[k] - 1
        if hi < lo:
            continue
        v = levels[k] * scale + shift
        fmin, fmax = _sine_range(A, theta, N, lo, hi)
        best = max(best, abs(v - fmin), abs(v - fmax))
    return best


@njit(cache=True)
def all_sine_deviations(steps, moves, n, N, half):
    """Anchored sine fit for every particle; returns (A, theta, deviation)."""
    amp = np.empty(n)
    phase = np.empty(n)
    dev = np.empty(n)
    levels = np.empty(n, np.int64)
    for x in range(n):
        levels[0] = x + 1
        for k in range(n - 1):
            levels[k + 1] = levels[k] + moves[x, k]
        x0 = 2.0 * levels[0] / n - 1.0
        y0 = 2.0 * levels[_segment_of(steps[x], half)] / n - 1.0
        a = min(np.sqrt(x0 * x0 + y0 * y0), 1.0)
        th = np.arctan2(x0, y0) % (2 * np.pi)
        amp[x] = a
        phase[x] = th
        dev[x] = segment_sup_deviation(steps[x], levels, N, a, th, 2.0 / n, -1.0)
    return amp, phase, dev


@njit(inline="always")
def _segment_of(jumps, step):
    """Index of the constant segment containing ``step``."""
    return np.searchsorted(jumps, step, side="right")


@njit(cache=True)
def octagon_ok(steps, moves, n, N, gamma):
    for x in range(n):
        level = x + 1
        v0 = 2.0 * level / n - 1.0
        v1 = 2.0 * (n - x) / n - 1.0
        for k in range(n):
            lo = 0 if k == 0 else steps[x, k - 1]
            hi = N if k == n - 1 else steps[x, k] - 1
            if k > 0:
                level += moves[x, k - 1]
            if hi < lo:
                continue
            v = 2.0 * level / n - 1.0
            # first bound grows with t: tightest at the segment start
            t = lo / N
            if not abs(v - v0) < 2.0 * np.sqrt(max(2.0 * t - t * t, 0.0)) + gamma:
                return False
            # second bound shrinks with t: tightest at the segment end
            t = hi / N
            if not abs(v - v1) < 2.0 * np.sqrt(max(1.0 - t * t, 0.0)) + gamma:
                return False
    return True


@njit(cache=True)
def max_abs_levels(steps, moves, n):
    out = np.empty(n)
    for x in range(n):
        level = x + 1
        best = abs(2.0 * level / n - 1.0)
        for k in range(n - 1):
            level += moves[x, k]
            best = max(best, abs(2.0 * level / n - 1.0))
        out[x] = best
    return out


# --- localization diameters -------------------------------------------------


@njit(cache=True)
def _hull_diameter(px, py, count):
    """Diameter of a planar point set via monotone-chain hull + brute force."""
    if count <= 1:
        return 0.0
    order = np.argsort(px[:count] + py[:count] * 1e-9)
    # lexicographic sort by (x, y)
    idx = np.empty(count, np.int64)
    for i in range(count):
        idx[i] = order[i]
    for i in range(1, count):
        j = i
        while j > 0 and (px[idx[j - 1]] > px[idx[j]] or (px[idx[j - 1]] == px[idx[j]] and py[idx[j - 1]] > py[idx[j]])):
            tmp = idx[j - 1]
            idx[j - 1] = idx[j]
            idx[j] = tmp
            j -= 1
    hull = np.empty(2 * count + 1, np.int64)
    h = 0
    for ii in range(count):
        i = idx[ii]
        while h >= 2:
            a = hull[h - 2]
            b = hull[h - 1]
            cross = (px[b] - px[a]) * (py[i] - py[a]) - (py[b] - py[a]) * (px[i] - px[a])
            if cross <= 0:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    lower = h + 1
    for ii in range(count - 2, -1, -1):
        i = idx[ii]
        while h >= lower:
            a = hull[h - 2]
            b = hull[h - 1]
            cross = (px[b] - px[a]) * (py[i] - py[a]) - (py[b] - py[a]) * (px[i] - px[a])
            if cross <= 0:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    best = 0.0
    for a in range(h):
        for b in range(a + 1, h):
            dx = px[hull[a]] - px[hull[b]]
            dy = py[hull[a]] - py[hull[b]]
            best = max(best, dx * dx + dy * dy)
    return np.sqrt(best)


@njit(cache=True)
def localization_diameters(steps, moves, n, N, half, max_arc):
    """Diameter of {exp(i*pi*s/N) * (g(s) + i*g(s+half)) : 0 <= s <= half}.

    Between jumps of either coordinate the point moves along a circular arc.
    Every arc contributes its two end points plus interior grid points spaced
    at most ``max_arc`` radians apart, so the returned diameter is exact up to
    twice the largest sagitta (about max_arc**2 / 4).
    """
    out = np.empty(n)
    smax = half
    stride = max(1, int(max_arc * N / np.pi))
    cap = 4 * n + 8 + int(np.pi / 2 / max_arc) * 2 + 16
    px = np.empty(cap)
    py = np.empty(cap)
    levels = np.empty(n, np.int64)
    for x in range(n):
        levels[0] = x + 1
        for k in range(n - 1):
            levels[k + 1] = levels[k] + moves[x, k]
        jumps = steps[x]
        # breakpoints in s where either coordinate changes
        bps = np.empty(2 * n + 2, np.int64)
        nb = 0
        bps[nb] = 0
        nb += 1
        for k in range(n - 1):
            e = jumps[k]
            if 0 < e <= smax:
                bps[nb] = e
                nb += 1
            e2 = jumps[k] - half
            if 0 < e2 <= smax:
                bps[nb] = e2
                nb += 1
        bps[:nb].sort()
        count = 0
        for q in range(nb):
            lo = bps[q]
            if q > 0 and lo == bps[q - 1]:
                continue
            hi = smax
            for q2 in range(q + 1, nb):
                if bps[q2] > lo:
                    hi = bps[q2] - 1
                    break
            a = 2.0 * levels[_segment_of(jumps, lo)] / n - 1.0
            b = 2.0 * levels[_segment_of(jumps, lo + half)] / n - 1.0
            s = lo
            while True:
                if count + 2 > cap:
                    newcap = cap * 2
                    nx = np.empty(newcap)
                    ny = np.empty(newcap)
                    nx[:count] = px[:count]
                    ny[:count] = py[:count]
                    px = nx
                    py = ny
                    cap = newcap
                ang = np.pi * s / N
                c = np.cos(ang)
                sn = np.sin(ang)
                px[count] = c * a - sn * b
                py[count] = sn * a + c * b
                count += 1
                if s == hi:
                    break
                s = min(s + stride, hi)
        out[x] = _hull_diameter(px, py, count)
    return out


# --- circle distance ----------------------------------------------------------


@njit(cache=True)
def circle_sup_distance(steps, moves, n, N, X, W, center):
    """max over steps and particles of |position - C(t)| for C = X cos + W sin + c."""
    best = 0.0
    levels = np.empty(n, np.int64)
    for x in range(n):
        levels[0] = x + 1
        for k in range(n - 1):
            levels[k + 1] = levels[k] + moves[x, k]
        amp = np.sqrt(X[x] * X[x] + W[x] * W[x])
        theta = np.arctan2(X[x], W[x])
        d = segment_sup_deviation(steps[x], levels, N, amp, theta, 1.0, -center)
        best = max(best, d)
    return best
