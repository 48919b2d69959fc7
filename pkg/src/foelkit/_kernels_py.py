"""Pure-Python kernels.  Mirrors ``_kernels.pyx`` line for line."""

import numpy as np


def pair_strands(down):
    """Bracket-match a strand sequence (1 = down, 0 = up).

    Each down is joined to the nearest still-unpaired up on its left.
    Returns the partner of every strand, ``-1`` when unpaired.
    """
    n = len(down)
    partner = np.full(n, -1, dtype=np.int64)
    stack = []
    for i in range(n):
        if down[i]:
            if stack:
                j = stack.pop()
                partner[i] = j
                partner[j] = i
        else:
            stack.append(i)
    return partner


def enumerate_hw_downs(sizes, n_down):
    """All highest-weight down-count vectors with ``n_down`` downs, lexicographic.

    ``sizes[x]`` is the number of strands in block ``x``.  A block's downs come
    first in the block and must each find an unpaired up in earlier blocks.
    """
    sizes = [int(s) for s in sizes]
    L = len(sizes)
    suffix = [0] * (L + 1)
    for x in range(L - 1, -1, -1):
        suffix[x] = suffix[x + 1] + sizes[x]
    rows = []
    if n_down < 0 or 2 * n_down > suffix[0]:
        return np.zeros((0, L), dtype=np.int32)
    cur = [0] * L
    avail = [0] * (L + 1)
    rem = [0] * (L + 1)
    choice = [-1] * (L + 1)
    rem[0] = n_down
    x = 0
    while x >= 0:
        if rem[x] == 0:
            rows.append(cur[:x] + [0] * (L - x))
            x -= 1
            continue
        if x == L or 2 * rem[x] > avail[x] + suffix[x]:
            x -= 1
            continue
        choice[x] += 1
        k = choice[x]
        if k > sizes[x] or k > avail[x] or k > rem[x]:
            x -= 1
            continue
        cur[x] = k
        avail[x + 1] = avail[x] + sizes[x] - 2 * k
        rem[x + 1] = rem[x] - k
        choice[x + 1] = -1
        x += 1
    if not rows:
        return np.zeros((0, L), dtype=np.int32)
    return np.asarray(rows, dtype=np.int32)


def assemble_half(states, couplings):
    """Sector matrix triplets for an all-spin-1/2 Heisenberg chain.

    ``states`` is a C-contiguous uint8 array, one highest-weight diagram per
    row (1 marks the right end of an arc).  Each bond contributes ``2 J`` times
    the cup-cap action: a closed loop gives ``2``, any reconnection ``-1``.
    """
    states = np.ascontiguousarray(states, dtype=np.uint8)
    n, N = states.shape
    index = {states[i].tobytes(): i for i in range(n)}
    rows, cols, vals = [], [], []
    for a in range(n):
        bits = states[a]
        partner = pair_strands(bits)
        diag = 0.0
        for x in range(N - 1):
            p = partner[x]
            q = partner[x + 1]
            if p == x + 1:
                diag += 4.0 * couplings[x]
                continue
            if p < 0 and q < 0:
                continue
            new = bytearray(bits.tobytes())
            new[x] = 0
            new[x + 1] = 1
            if p >= 0 and q >= 0:
                lo, hi = (p, q) if p < q else (q, p)
                new[lo] = 0
                new[hi] = 1
            elif p >= 0:
                new[p] = 0
            else:
                new[q] = 0
            rows.append(index[bytes(new)])
            cols.append(a)
            vals.append(-2.0 * couplings[x])
        if diag != 0.0:
            rows.append(a)
            cols.append(a)
            vals.append(diag)
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.float64),
    )
