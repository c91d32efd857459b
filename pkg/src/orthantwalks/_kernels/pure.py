"""Pure-Python sampling kernels.

Reference implementation of the hot loops; the compiled extension in
``orthantwalks._speedups`` mirrors these semantics exactly, including
the order in which uniforms are consumed, so a fixed seed produces the
same draws on either backend.
"""
from __future__ import annotations

import numpy as np

BACKEND = "pure"


def draw_word(tables, n_max, stream):
    """One free Boltzmann draw; None on oversize abort (> n_max atoms)."""
    nt_alt_start = tables.nt_alt_start
    alt_cum = tables.alt_cum
    alt_sym_start = tables.alt_sym_start
    syms = tables.syms
    out = []
    stack = [tables.start]
    while stack:
        s = stack.pop()
        if s < 0:
            out.append(-s - 1)
            if len(out) > n_max:
                return None
            continue
        u = stream.next()
        a = nt_alt_start[s]
        hi = nt_alt_start[s + 1]
        while a < hi - 1 and u >= alt_cum[a]:
            a += 1
        for i in range(alt_sym_start[a + 1] - 1, alt_sym_start[a] - 1, -1):
            stack.append(int(syms[i]))
    return np.asarray(out, dtype=np.int32)


def run_sampler(tables, n_min, n_max, want, max_draws, stream, orthant, collect):
    """Free draws -> window filter -> (optional) orthant filter.

    Returns (words, endpoints, stats).  ``collect`` chooses whether
    accepted draws are kept as atom-id arrays or only as 3D endpoints.
    """
    words = [] if collect == "words" else None
    endpoints = [] if collect == "endpoints" else None
    stats = {
        "free_draws": 0,
        "oversize": 0,
        "undersize": 0,
        "orthant_rejects": 0,
        "accepted": 0,
    }
    steps = tables.atom_step
    while stats["accepted"] < want and stats["free_draws"] < max_draws:
        stats["free_draws"] += 1
        word = draw_word(tables, n_max, stream)
        if word is None:
            stats["oversize"] += 1
            continue
        if len(word) < n_min:
            stats["undersize"] += 1
            continue
        x = y = z = 0
        if orthant:
            ok = True
            for a in word:
                x += steps[a, 0]
                y += steps[a, 1]
                z += steps[a, 2]
                if x < 0 or y < 0 or z < 0:
                    ok = False
                    break
            if not ok:
                stats["orthant_rejects"] += 1
                continue
        stats["accepted"] += 1
        if words is not None:
            words.append(word)
        if endpoints is not None:
            if not orthant:
                for a in word:
                    x += steps[a, 0]
                    y += steps[a, 1]
                    z += steps[a, 2]
            endpoints.append((int(x), int(y), int(z)))
    if endpoints is not None:
        endpoints = np.asarray(endpoints, dtype=np.int64).reshape(-1, 3)
    return words, endpoints, stats


def run_naive(cum_probs, steps, n, want, max_attempts, stream, collect):
    """I.i.d. weighted step draws with restart on leaving the orthant."""
    walks = [] if collect == "words" else None
    endpoints = [] if collect == "endpoints" else None
    stats = {"attempts": 0, "orthant_rejects": 0, "accepted": 0}
    k = len(cum_probs)
    while stats["accepted"] < want and stats["attempts"] < max_attempts:
        stats["attempts"] += 1
        x = y = z = 0
        seq = []
        ok = True
        for _ in range(n):
            u = stream.next()
            j = 0
            while j < k - 1 and u >= cum_probs[j]:
                j += 1
            x += steps[j, 0]
            y += steps[j, 1]
            z += steps[j, 2]
            if x < 0 or y < 0 or z < 0:
                ok = False
                break
            seq.append(j)
        if not ok:
            stats["orthant_rejects"] += 1
            continue
        stats["accepted"] += 1
        if walks is not None:
            walks.append(np.asarray(seq, dtype=np.int32))
        if endpoints is not None:
            endpoints.append((int(x), int(y), int(z)))
    if endpoints is not None:
        endpoints = np.asarray(endpoints, dtype=np.int64).reshape(-1, 3)
    return walks, endpoints, stats
