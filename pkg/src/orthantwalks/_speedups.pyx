# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled sampling kernels.

Semantics (including the order in which uniforms are consumed) match
``orthantwalks._kernels.pure`` exactly; tests assert stream-for-stream
equality between the two backends.
"""
import numpy as np

cimport numpy as cnp

BACKEND = "compiled"


cdef class _U:
    """Reader over a UniformStream's buffer; syncs position back."""
    cdef object stream
    cdef double[::1] view
    cdef Py_ssize_t pos

    def __cinit__(self, stream):
        self.stream = stream
        self.view = stream.buf
        self.pos = stream.pos

    cdef inline double next(self):
        cdef double v
        if self.pos >= self.view.shape[0]:
            self.stream.refill()
            self.view = self.stream.buf
            self.pos = 0
        v = self.view[self.pos]
        self.pos += 1
        return v

    cdef inline void sync(self):
        self.stream.pos = self.pos


cdef class _Stack:
    cdef object arr
    cdef cnp.int32_t[::1] v
    cdef Py_ssize_t top

    def __cinit__(self, Py_ssize_t cap):
        self.arr = np.empty(cap, dtype=np.int32)
        self.v = self.arr
        self.top = 0

    cdef inline void push(self, cnp.int32_t s):
        if self.top >= self.v.shape[0]:
            self.arr = np.concatenate([self.arr, np.empty(self.v.shape[0], dtype=np.int32)])
            self.v = self.arr
        self.v[self.top] = s
        self.top += 1


cdef Py_ssize_t _draw(cnp.int32_t[::1] nt_alt_start, double[::1] alt_cum,
                      cnp.int32_t[::1] alt_sym_start, cnp.int32_t[::1] syms,
                      int start, Py_ssize_t n_max, cnp.int32_t[::1] out,
                      _U u, _Stack st):
    """One free draw into ``out``; returns the length or -1 on oversize."""
    cdef Py_ssize_t count = 0, a, hi, i
    cdef cnp.int32_t s
    cdef double uu
    st.top = 0
    st.push(start)
    while st.top > 0:
        st.top -= 1
        s = st.v[st.top]
        if s < 0:
            if count >= n_max:
                return -1
            out[count] = -s - 1
            count += 1
            continue
        uu = u.next()
        a = nt_alt_start[s]
        hi = nt_alt_start[s + 1]
        while a < hi - 1 and uu >= alt_cum[a]:
            a += 1
        i = alt_sym_start[a + 1] - 1
        while i >= alt_sym_start[a]:
            st.push(syms[i])
            i -= 1
    return count


def draw_word(tables, n_max, stream):
    cdef cnp.int32_t[::1] nt_alt_start = tables.nt_alt_start
    cdef double[::1] alt_cum = tables.alt_cum
    cdef cnp.int32_t[::1] alt_sym_start = tables.alt_sym_start
    cdef cnp.int32_t[::1] syms = tables.syms
    cdef Py_ssize_t nm = n_max
    out_arr = np.empty(nm + 1, dtype=np.int32)
    cdef cnp.int32_t[::1] out = out_arr
    cdef _U u = _U(stream)
    cdef _Stack st = _Stack(256)
    cdef Py_ssize_t length = _draw(
        nt_alt_start, alt_cum, alt_sym_start, syms, tables.start, nm, out, u, st)
    u.sync()
    if length < 0:
        return None
    return out_arr[:length].copy()


def run_sampler(tables, n_min, n_max, want, max_draws, stream, orthant, collect):
    cdef cnp.int32_t[::1] nt_alt_start = tables.nt_alt_start
    cdef double[::1] alt_cum = tables.alt_cum
    cdef cnp.int32_t[::1] alt_sym_start = tables.alt_sym_start
    cdef cnp.int32_t[::1] syms = tables.syms
    cdef cnp.int32_t[:, ::1] steps = tables.atom_step
    cdef Py_ssize_t nm = n_max, nmin = n_min
    cdef long long free_draws = 0, oversize = 0, undersize = 0
    cdef long long orthant_rejects = 0, accepted = 0
    cdef long long want_c = want, max_draws_c = max_draws
    cdef bint check_orthant = orthant
    cdef bint keep_words = collect == "words"
    cdef bint keep_endpoints = collect == "endpoints"
    out_arr = np.empty(nm + 1, dtype=np.int32)
    cdef cnp.int32_t[::1] out = out_arr
    cdef _U u = _U(stream)
    cdef _Stack st = _Stack(256)
    cdef Py_ssize_t length, i
    cdef long long x, y, z
    cdef cnp.int32_t a
    cdef bint ok
    words = [] if keep_words else None
    endpoints = [] if keep_endpoints else None
    while accepted < want_c and free_draws < max_draws_c:
        free_draws += 1
        length = _draw(nt_alt_start, alt_cum, alt_sym_start, syms,
                       tables.start, nm, out, u, st)
        if length < 0:
            oversize += 1
            continue
        if length < nmin:
            undersize += 1
            continue
        x = 0; y = 0; z = 0
        if check_orthant:
            ok = True
            for i in range(length):
                a = out[i]
                x += steps[a, 0]
                y += steps[a, 1]
                z += steps[a, 2]
                if x < 0 or y < 0 or z < 0:
                    ok = False
                    break
            if not ok:
                orthant_rejects += 1
                continue
        accepted += 1
        if keep_words:
            words.append(out_arr[:length].copy())
        if keep_endpoints:
            if not check_orthant:
                for i in range(length):
                    a = out[i]
                    x += steps[a, 0]
                    y += steps[a, 1]
                    z += steps[a, 2]
            endpoints.append((x, y, z))
    u.sync()
    stats = {
        "free_draws": int(free_draws),
        "oversize": int(oversize),
        "undersize": int(undersize),
        "orthant_rejects": int(orthant_rejects),
        "accepted": int(accepted),
    }
    if keep_endpoints:
        endpoints = np.asarray(endpoints, dtype=np.int64).reshape(-1, 3)
    return words, endpoints, stats


def run_naive(cum_probs, steps_in, n, want, max_attempts, stream, collect):
    cdef double[::1] cum = np.ascontiguousarray(cum_probs, dtype=np.float64)
    cdef cnp.int32_t[:, ::1] steps = np.ascontiguousarray(steps_in, dtype=np.int32)
    cdef Py_ssize_t nn = n, k = cum.shape[0]
    cdef long long attempts = 0, orthant_rejects = 0, accepted = 0
    cdef long long want_c = want, max_attempts_c = max_attempts
    cdef bint keep_words = collect == "words"
    cdef bint keep_endpoints = collect == "endpoints"
    seq_arr = np.empty(max(nn, 1), dtype=np.int32)
    cdef cnp.int32_t[::1] seq = seq_arr
    cdef _U u = _U(stream)
    cdef Py_ssize_t i, j
    cdef long long x, y, z
    cdef double uu
    cdef bint ok
    walks = [] if keep_words else None
    endpoints = [] if keep_endpoints else None
    while accepted < want_c and attempts < max_attempts_c:
        attempts += 1
        x = 0; y = 0; z = 0
        ok = True
        for i in range(nn):
            uu = u.next()
            j = 0
            while j < k - 1 and uu >= cum[j]:
                j += 1
            x += steps[j, 0]
            y += steps[j, 1]
            z += steps[j, 2]
            if x < 0 or y < 0 or z < 0:
                ok = False
                break
            seq[i] = j
        if not ok:
            orthant_rejects += 1
            continue
        accepted += 1
        if keep_words:
            walks.append(seq_arr[:nn].copy())
        if keep_endpoints:
            endpoints.append((x, y, z))
    u.sync()
    stats = {
        "attempts": int(attempts),
        "orthant_rejects": int(orthant_rejects),
        "accepted": int(accepted),
    }
    if keep_endpoints:
        endpoints = np.asarray(endpoints, dtype=np.int64).reshape(-1, 3)
    return walks, endpoints, stats
