"""Generating-function evaluation and the singular Boltzmann sampler.

The grammar induces a polynomial system y_N = Phi_N(x, y) (alternatives
add, sequences multiply, an atom contributes weight * x, the empty word
contributes 1).  Its least nonnegative solution at x is found by
monotone fixed-point iteration with damped Newton acceleration; at the
dominant singularity the solution is a branch point, which the damping
handles.  Sampling expands the start symbol with an explicit stack,
choosing each alternative with probability proportional to its value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import AttemptsExhaustedError, DivergentError, NoConvergenceError
from .grammar import AtomRef, Grammar, NtRef
from .rng import UniformStream

DIVERGE_CAP = 1e12
ABS_TOL = 1e-12  # acceptance threshold on the residual
TARGET_TOL = 1e-15  # keep polishing down to here while progress lasts
WARMUP_ITERS = 100
MAX_ITERS = 10**6
STALL_LIMIT = 50


@dataclass(frozen=True)
class GFEvaluation:
    x0: float
    values: dict  # nonterminal name -> float
    residual: float


@dataclass(frozen=True)
class SampledWord:
    atoms: tuple  # atom ids
    length: int


@dataclass
class WindowStats:
    free_draws: int = 0
    oversize_aborts: int = 0
    undersize_rejects: int = 0


def _system(g: Grammar):
    names = list(g.productions)
    index = {n: i for i, n in enumerate(names)}
    alts = []  # list of (owner_index, [symbol codes]), atom code < 0
    owners = [[] for _ in names]
    for n, prods in g.productions.items():
        for alt in prods:
            syms = []
            for s in alt:
                if isinstance(s, AtomRef):
                    syms.append(-(s.atom_id + 1))
                else:
                    syms.append(index[s.name])
            owners[index[n]].append(len(alts))
            alts.append(syms)
    atom_w = {a.atom_id: a.weight for a in g.atoms.values()}
    return names, index, alts, owners, atom_w


def _phi_and_jac(alts, owners, atom_w, x, y, want_jac):
    n = len(owners)
    phi = np.zeros(n)
    jac = np.zeros((n, n)) if want_jac else None
    for i, alist in enumerate(owners):
        for ai in alist:
            syms = alts[ai]
            prod = 1.0
            for s in syms:
                prod *= atom_w[-s - 1] * x if s < 0 else y[s]
            phi[i] += prod
            if want_jac:
                for k, s in enumerate(syms):
                    if s >= 0:
                        partial = 1.0
                        for k2, s2 in enumerate(syms):
                            if k2 == k:
                                continue
                            partial *= atom_w[-s2 - 1] * x if s2 < 0 else y[s2]
                        jac[i, s] += partial
    return phi, jac


def _scc_order(n, alts, owners):
    """Strongly connected components in dependency order (callees first)."""
    adj = [set() for _ in range(n)]
    for i, alist in enumerate(owners):
        for ai in alist:
            for s in alts[ai]:
                if s >= 0:
                    adj[i].add(s)
    # iterative Tarjan
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list = []
    comp = [None] * n
    comps: list = []
    counter = [0]
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(sorted(adj[root])))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(sorted(adj[w]))))
                    advanced = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                group = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = len(comps)
                    group.append(w)
                    if w == v:
                        break
                comps.append(group)
    # Tarjan emits components in reverse topological order of the
    # condensation, i.e. callees before callers, which is what we want.
    return comps, comp, adj


def _lu_solve(a, b):
    """Gaussian elimination with partial pivoting; numpy's solver does
    not accept longdouble, which the branch-point polish needs."""
    a = a.copy()
    b = b.copy()
    n = len(b)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0:
            raise np.linalg.LinAlgError("singular matrix")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            m = a[i, k] / a[k, k]
            a[i, k + 1 :] -= m * a[k, k + 1 :]
            b[i] -= m * b[k]
    out = np.zeros(n, dtype=a.dtype)
    for i in range(n - 1, -1, -1):
        out[i] = (b[i] - a[i, i + 1 :] @ out[i + 1 :]) / a[i, i]
    return out


def _polish_component(members, alts, owners, atom_w, x, y):
    """Extended-precision Newton polish for a converged block.

    At a branch point the Jacobian of y - Phi is singular, so double
    precision stalls at value errors near sqrt(eps) ~ 1e-8.  A few
    Newton steps in longdouble push that down to ~1e-10, which the
    singular sampler and the documented GF tolerances rely on.
    """
    ld = np.longdouble
    xl = ld(x)
    wl = {aid: ld(w) for aid, w in atom_w.items()}
    yl = y.astype(ld)
    n = len(members)
    idx = {m: k for k, m in enumerate(members)}

    def local(want_jac):
        phi = np.zeros(n, dtype=ld)
        jac = np.zeros((n, n), dtype=ld) if want_jac else None
        for k, m in enumerate(members):
            for ai in owners[m]:
                syms = alts[ai]
                prod = ld(1.0)
                for s in syms:
                    prod = prod * (wl[-s - 1] * xl if s < 0 else yl[s])
                phi[k] += prod
                if want_jac:
                    for pos, s in enumerate(syms):
                        if s >= 0 and s in idx:
                            partial = ld(1.0)
                            for pos2, s2 in enumerate(syms):
                                if pos2 == pos:
                                    continue
                                partial = partial * (
                                    wl[-s2 - 1] * xl if s2 < 0 else yl[s2]
                                )
                            jac[k, idx[s]] += partial
        return phi, jac

    cur = np.array([yl[m] for m in members], dtype=ld)
    resid = None
    for _ in range(60):
        phi, jacm = local(True)
        r = float(np.max(np.abs((phi - cur).astype(np.float64))))
        if resid is not None and r >= resid:
            break
        resid = r
        if r < 1e-22:
            break
        try:
            delta = _lu_solve(np.eye(n, dtype=ld) - jacm, phi - cur)
        except np.linalg.LinAlgError:
            break
        lam = ld(1.0)
        moved = False
        for _ in range(30):
            cand = cur + lam * delta
            if np.all(cand >= 0):
                for k, m in enumerate(members):
                    yl[m] = cand[k]
                cphi, _ = local(False)
                cr = float(np.max(np.abs((cphi - cand).astype(np.float64))))
                if cr < r:
                    cur = cand
                    moved = True
                    break
            lam *= ld(0.5)
        if not moved:
            for k, m in enumerate(members):
                yl[m] = cur[k]
            break
    for k, m in enumerate(members):
        y[m] = float(cur[k])
    return resid if resid is not None else 0.0


def _solve_component(members, alts, owners, atom_w, x, y):
    """Least nonnegative solution for one strongly connected block, with
    every external value in ``y`` already fixed.  Returns the residual,
    or None when the block diverges."""
    idx = {m: k for k, m in enumerate(members)}
    for m in members:
        y[m] = 0.0

    def local_phi(want_jac):
        phi = np.zeros(len(members))
        jac = np.zeros((len(members), len(members))) if want_jac else None
        for k, m in enumerate(members):
            for ai in owners[m]:
                syms = alts[ai]
                prod = 1.0
                for s in syms:
                    prod *= atom_w[-s - 1] * x if s < 0 else y[s]
                phi[k] += prod
                if want_jac:
                    for pos, s in enumerate(syms):
                        if s >= 0 and s in idx:
                            partial = 1.0
                            for pos2, s2 in enumerate(syms):
                                if pos2 == pos:
                                    continue
                                partial *= atom_w[-s2 - 1] * x if s2 < 0 else y[s2]
                            jac[k, idx[s]] += partial
        return phi, jac

    def assign(vec):
        for k, m in enumerate(members):
            y[m] = vec[k]

    cur = np.zeros(len(members))
    resid = float("inf")
    best = float("inf")
    stalled = 0
    for it in range(MAX_ITERS):
        phi, _ = local_phi(False)
        if not np.all(np.isfinite(phi)) or phi.max(initial=0.0) > DIVERGE_CAP:
            return None
        resid = float(np.max(np.abs(phi - cur)))
        cur = phi
        assign(cur)
        if resid <= TARGET_TOL:
            return _polish_component(members, alts, owners, atom_w, x, y)
        if it + 1 >= WARMUP_ITERS:
            # damped Newton on F(v) = v - Phi(x, v); the Jacobian is
            # near-singular at a branch point, hence the halving guard
            phi, jac = local_phi(True)
            resid = float(np.max(np.abs(phi - cur)))
            if resid <= TARGET_TOL:
                return _polish_component(members, alts, owners, atom_w, x, y)
            try:
                delta = np.linalg.solve(np.eye(len(members)) - jac, phi - cur)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None and np.all(np.isfinite(delta)):
                lam = 1.0
                for _ in range(40):
                    cand = cur + lam * delta
                    if np.all(cand >= 0) and cand.max(initial=0.0) < DIVERGE_CAP:
                        assign(cand)
                        cphi, _ = local_phi(False)
                        cres = float(np.max(np.abs(cphi - cand)))
                        if np.all(np.isfinite(cphi)) and cres < resid:
                            cur = cand
                            resid = cres
                            break
                    lam *= 0.5
                assign(cur)
            if resid <= TARGET_TOL:
                return _polish_component(members, alts, owners, atom_w, x, y)
            # stop once double precision refuses to improve further
            if resid >= best * 0.9:
                stalled += 1
                if stalled >= STALL_LIMIT:
                    break
            else:
                stalled = 0
            best = min(best, resid)
    if resid > ABS_TOL and resid > 1e-10 * (1.0 + float(cur.max(initial=0.0))):
        raise NoConvergenceError("GF residual %g above tolerance" % resid, residual=resid)
    return _polish_component(members, alts, owners, atom_w, x, y)


def evaluate_gf(g: Grammar, x: float, require: str | None = None) -> GFEvaluation:
    """Least nonnegative solution of y = Phi(x, y), solved one strongly
    connected component at a time (callees first).

    A component whose iterates blow past the cap is marked infinite
    (e.g. the meander symbols of a zero-drift model exactly at the
    singularity, while the excursion symbols stay finite).  If the
    required nonterminal (default: the start symbol) is infinite,
    DivergentError is raised: x is past its radius of convergence.
    """
    if x <= 0:
        raise ValueError("evaluation point must be positive")
    if require is None:
        require = g.start
    names, index, alts, owners, atom_w = _system(g)
    comps, _, _ = _scc_order(len(names), alts, owners)
    y = np.zeros(len(names))
    infinite = np.zeros(len(names), dtype=bool)
    residual = 0.0
    for members in comps:
        # any alternative touching an infinite callee makes the whole
        # strongly connected block infinite (sums only add mass)
        poisoned = any(
            s >= 0 and infinite[s]
            for m in members
            for ai in owners[m]
            for s in alts[ai]
        )
        if poisoned:
            r = None
        else:
            r = _solve_component(members, alts, owners, atom_w, x, y)
        if r is None:
            for m in members:
                infinite[m] = True
                y[m] = np.inf
        else:
            residual = max(residual, r)
    if infinite[index[require]]:
        raise DivergentError(
            "generating function of %r diverges at x=%r" % (require, x)
        )
    values = {n: float(v) for n, v in zip(names, y)}
    return GFEvaluation(float(x), values, residual)


USABLE_VALUE_CAP = 100.0  # largest GF value the sampler tolerates


def evaluate_gf_near_singularity(g: Grammar, rho: float, bisect_steps: int = 60):
    """Evaluate at rho, backing off below it when needed.

    Backoff triggers in two cases: rho overestimates the true radius
    (rounding in the upstream analysis), or the start symbol genuinely
    diverges at its singularity (zero-drift models, where the meander GF
    has a square-root divergence).  Either way we bisect to the largest
    x that both converges and keeps values below USABLE_VALUE_CAP, so
    alternative probabilities stay far from the rounding floor and free
    draws terminate.  Fixed-size uniformity is unaffected by the choice
    of evaluation point.  Returns the GFEvaluation actually obtained;
    its x0 records the point used.
    """

    def usable(x):
        try:
            ev = evaluate_gf(g, x)
        except (DivergentError, NoConvergenceError):
            return None
        finite = [v for v in ev.values.values() if math.isfinite(v)]
        if max(finite, default=0.0) > USABLE_VALUE_CAP:
            return None
        return ev

    good = usable(rho)
    if good is not None:
        return good
    lo = rho
    for _ in range(bisect_steps):
        lo *= 0.5
        good = usable(lo)
        if good is not None:
            break
    if good is None:
        raise NoConvergenceError("no convergent evaluation point found below rho")
    hi = rho
    for _ in range(bisect_steps):
        mid = 0.5 * (good.x0 + hi)
        ev = usable(mid)
        if ev is not None:
            good = ev
        else:
            hi = mid
    return good


@dataclass
class SamplerTables:
    """Grammar flattened into arrays for the sampling kernels."""

    start: int
    nt_alt_start: np.ndarray  # int32 [n_nt + 1]
    alt_cum: np.ndarray  # float64 per alternative, cumulative within a nonterminal
    alt_sym_start: np.ndarray  # int32 [n_alts + 1]
    syms: np.ndarray  # int32; >= 0 nonterminal index, < 0 atom id -(i+1)
    atom_value: np.ndarray  # int32 per atom id
    atom_step: np.ndarray  # int32 [n_atoms, 3]
    names: list = field(default_factory=list)
    prob_deviation: float = 0.0


def build_sampler_tables(g: Grammar, ev: GFEvaluation) -> SamplerTables:
    names, index, alts, owners, atom_w = _system(g)
    y = np.array([ev.values[n] for n in names])
    nt_alt_start = [0]
    alt_cum: list[float] = []
    alt_syms: list[list[int]] = []
    deviation = 0.0
    for i, alist in enumerate(owners):
        vals = []
        for ai in alist:
            prod = 1.0
            for s in alts[ai]:
                prod *= atom_w[-s - 1] * ev.x0 if s < 0 else y[s]
            vals.append(prod)
            alt_syms.append(alts[ai])
        total = sum(vals)
        if y[i] > 0:
            deviation = max(deviation, abs(total - y[i]) / y[i])
        if total <= 0.0:
            # unreachable nonterminal (value 0): any choice works
            probs = [1.0 / len(vals)] * len(vals)
        else:
            probs = [v / total for v in vals]
        acc = 0.0
        for p in probs:
            acc += p
            alt_cum.append(acc)
        alt_cum[-1] = 1.0
        nt_alt_start.append(len(alt_cum))
    alt_sym_start = [0]
    flat: list[int] = []
    for s in alt_syms:
        flat.extend(s)
        alt_sym_start.append(len(flat))
    n_atoms = max(g.atoms) + 1 if g.atoms else 0
    atom_value = np.zeros(n_atoms, dtype=np.int32)
    atom_step = np.zeros((n_atoms, 3), dtype=np.int32)
    for a in g.atoms.values():
        atom_value[a.atom_id] = a.value
        if a.source is not None:
            atom_step[a.atom_id] = list(a.source)
    return SamplerTables(
        start=index[g.start],
        nt_alt_start=np.asarray(nt_alt_start, dtype=np.int32),
        alt_cum=np.asarray(alt_cum, dtype=np.float64),
        alt_sym_start=np.asarray(alt_sym_start, dtype=np.int32),
        syms=np.asarray(flat, dtype=np.int32),
        atom_value=atom_value,
        atom_step=atom_step,
        names=names,
        prob_deviation=float(deviation),
    )


def sample_word(tables: SamplerTables, n_max: int, stream: UniformStream):
    """One free Boltzmann draw.  Returns a SampledWord, or None the
    moment the atom count exceeds n_max (an oversize abort)."""
    atoms = _kernels.draw_word(tables, n_max, stream)
    if atoms is None:
        return None
    return SampledWord(tuple(int(a) for a in atoms), len(atoms))


def sample_in_window(
    tables: SamplerTables,
    n_min: int,
    n_max: int,
    stream: UniformStream,
    max_attempts: int = 10**7,
):
    """Free draws until the length lands in [n_min, n_max]."""
    if not (0 <= n_min <= n_max):
        raise ValueError("window must satisfy 0 <= n_min <= n_max")
    stats = WindowStats()
    while stats.free_draws < max_attempts:
        stats.free_draws += 1
        word = sample_word(tables, n_max, stream)
        if word is None:
            stats.oversize_aborts += 1
            continue
        if word.length < n_min:
            stats.undersize_rejects += 1
            continue
        return word, stats
    raise AttemptsExhaustedError("no word in window after %d draws" % max_attempts, report=stats)
