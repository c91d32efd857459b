"""Unambiguous grammars for 1D walks that never go below zero.

The construction factors every word at its first passage below a level,
so each word has exactly one derivation.  Nonterminals:

  W        all walks staying >= 0 (the start symbol)
  M{h}     walks starting at height h staying >= 0
  B{t}     nonempty walks whose proper prefixes stay >= 0, ending at -t
  C{j}_{t} walks from height j ending at -t, proper prefixes >= 0
  D        walks staying >= 0 and ending at 0
  T{j}     walks from height j staying >= 0 and ending at 0

Counting is exact (Python big integers) and doubles as the unambiguity
witness: coefficients from the grammar must match the direct dynamic
program for every length tested.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateStepsetError
from .halfspace import Atom1D, StepSet1D


@dataclass(frozen=True)
class AtomRef:
    atom_id: int


@dataclass(frozen=True)
class NtRef:
    name: str


Symbol = "AtomRef | NtRef"
Alternative = "tuple[Symbol, ...]"  # empty tuple derives the empty word


@dataclass(frozen=True)
class Grammar:
    start: str
    productions: dict  # name -> tuple of alternatives
    atoms: dict  # atom_id -> Atom1D

    @property
    def nonterminals(self):
        return tuple(self.productions)

    def num_alternatives(self) -> int:
        return sum(len(alts) for alts in self.productions.values())


def build_meander_grammar(ss: StepSet1D) -> Grammar:
    """Grammar whose start symbol derives the weighted meanders over ss.

    Zero-valued atoms need no special casing: they appear among the
    "nonnegative first step" alternatives with M0 = W and C{0,t} = B{t}.
    Also emits the walks-ending-at-zero nonterminal D (with helpers T{j})
    for testing and for evaluating the system at its singularity.
    """
    has_up = any(a.value > 0 for a in ss.atoms)
    has_down = any(a.value < 0 for a in ss.atoms)
    if not (has_up and has_down):
        raise DegenerateStepsetError("need at least one positive and one negative value")
    m = ss.max_down
    M = ss.max_up
    nonneg = [a for a in ss.atoms if a.value >= 0]

    def m_ref(h: int) -> NtRef:
        return NtRef("W") if h == 0 else NtRef("M%d" % h)

    def b_ref(t: int) -> NtRef:
        return NtRef("B%d" % t)

    def c_ref(j: int, t: int) -> NtRef:
        return b_ref(t) if j == 0 else NtRef("C%d_%d" % (j, t))

    def t_ref(j: int) -> NtRef:
        return NtRef("D") if j == 0 else NtRef("T%d" % j)

    prods: dict = {}
    prods["W"] = tuple([()] + [(AtomRef(a.atom_id), m_ref(a.value)) for a in nonneg])
    for h in range(1, M + 1):
        alts = [(NtRef("W"),)]
        for t in range(1, min(h, m) + 1):
            alts.append((b_ref(t), m_ref(h - t)))
        prods["M%d" % h] = tuple(alts)
    for t in range(1, m + 1):
        alts = []
        for a in ss.atoms:
            if a.value == -t:
                alts.append((AtomRef(a.atom_id),))
        for a in nonneg:
            alts.append((AtomRef(a.atom_id), c_ref(a.value, t)))
        prods["B%d" % t] = tuple(alts)
        for j in range(1, M + 1):
            alts = []
            if j + t <= m:
                alts.append((b_ref(j + t),))
            for r in range(1, min(j, m) + 1):
                alts.append((b_ref(r), c_ref(j - r, t)))
            prods["C%d_%d" % (j, t)] = tuple(alts)
    prods["D"] = tuple([()] + [(AtomRef(a.atom_id), t_ref(a.value)) for a in nonneg])
    for j in range(1, M + 1):
        alts = []
        for r in range(1, min(j, m) + 1):
            alts.append((b_ref(r), t_ref(j - r)))
        prods["T%d" % j] = tuple(alts)
    prods = _prune(prods, roots=("W", "D"))
    return Grammar("W", prods, {a.atom_id: a for a in ss.atoms})


def _prune(prods: dict, roots) -> dict:
    """Drop unproductive nonterminals and anything unreachable from the
    roots.  Models with sparse step values can leave a few C/T helpers
    with no finite derivation."""
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for name, alts in prods.items():
            if name in productive:
                continue
            for alt in alts:
                if all(
                    not isinstance(s, NtRef) or s.name in productive for s in alt
                ):
                    productive.add(name)
                    changed = True
                    break
    kept = {
        name: tuple(
            alt
            for alt in alts
            if all(not isinstance(s, NtRef) or s.name in productive for s in alt)
        )
        for name, alts in prods.items()
        if name in productive
    }
    reachable: set = set()
    stack = [r for r in roots if r in kept]
    while stack:
        name = stack.pop()
        if name in reachable:
            continue
        reachable.add(name)
        for alt in kept[name]:
            for s in alt:
                if isinstance(s, NtRef) and s.name not in reachable:
                    stack.append(s.name)
    return {name: alts for name, alts in kept.items() if name in reachable}


def _nullable_set(g: Grammar) -> set:
    nullable: set = set()
    changed = True
    while changed:
        changed = False
        for name, alts in g.productions.items():
            if name in nullable:
                continue
            for alt in alts:
                if all(isinstance(s, NtRef) and s.name in nullable for s in alt):
                    nullable.add(name)
                    changed = True
                    break
    return nullable


def _same_length_order(g: Grammar, nullable: set) -> list:
    """Topological order of the "reads another nonterminal at the same
    word length" dependency graph.  A cycle would mean the grammar is
    infinitely ambiguous through epsilon loops."""
    deps: dict = {n: set() for n in g.productions}
    for name, alts in g.productions.items():
        for alt in alts:
            for i, sym in enumerate(alt):
                if not isinstance(sym, NtRef):
                    continue
                others = alt[:i] + alt[i + 1 :]
                if all(isinstance(o, NtRef) and o.name in nullable for o in others):
                    deps[name].add(sym.name)
    order: list = []
    mark: dict = {}

    def visit(n):
        state = mark.get(n)
        if state == 2:
            return
        if state == 1:
            raise DegenerateStepsetError("grammar has an epsilon-cycle: %s" % n)
        mark[n] = 1
        for d in deps[n]:
            visit(d)
        mark[n] = 2
        order.append(n)

    for n in g.productions:
        visit(n)
    return order


def grammar_counts(g: Grammar, n_max: int) -> dict:
    """Exact weighted word counts per nonterminal, lengths 0..n_max."""
    nullable = _nullable_set(g)
    order = _same_length_order(g, nullable)
    coeff = {n: [0] * (n_max + 1) for n in g.productions}

    def sym_coeff(sym, n: int) -> int:
        if isinstance(sym, AtomRef):
            return g.atoms[sym.atom_id].weight if n == 1 else 0
        return coeff[sym.name][n]

    def seq_coeff(alt, n: int) -> int:
        if not alt:
            return 1 if n == 0 else 0
        if len(alt) == 1:
            return sym_coeff(alt[0], n)
        # fold on the first symbol; alternatives here are short
        total = 0
        lo = 1 if isinstance(alt[0], AtomRef) else 0
        for j in range(lo, n + 1):
            c = sym_coeff(alt[0], j)
            if c:
                total += c * seq_coeff(alt[1:], n - j)
        return total

    for n in range(n_max + 1):
        for name in order:
            coeff[name][n] = sum(seq_coeff(alt, n) for alt in g.productions[name])
    return coeff


def count_meanders_dp(
    ss: StepSet1D, n_max: int, endpoint: Optional[int] = None
) -> list:
    """Independent counting oracle by direct dynamic programming.

    f(0, 0) = 1;  f(n, h) = sum over atoms of weight * f(n-1, h - value)
    restricted to h - value >= 0.  Returns per-length totals over all
    endpoints (meanders) or at a fixed endpoint (excursions when 0).
    """
    f = {0: 1}
    out = []
    vals = [(a.value, a.weight) for a in ss.atoms]
    for _ in range(n_max + 1):
        if endpoint is None:
            out.append(sum(f.values()))
        else:
            out.append(f.get(endpoint, 0))
        g: dict = {}
        for h, c in f.items():
            for v, w in vals:
                nh = h + v
                if nh >= 0:
                    g[nh] = g.get(nh, 0) + w * c
        f = g
    return out


def reversed_stepset(ss: StepSet1D) -> StepSet1D:
    """All values negated (path-reversal dual)."""
    return StepSet1D(
        tuple(Atom1D(a.atom_id, -a.value, a.weight, a.source) for a in ss.atoms)
    )


def format_grammar(g: Grammar) -> str:
    """Plain-text productions, one nonterminal per line."""

    def fmt_sym(sym) -> str:
        if isinstance(sym, AtomRef):
            a = g.atoms[sym.atom_id]
            return "a%d[%+d,w%d]" % (a.atom_id, a.value, a.weight)
        return sym.name

    lines = []
    for name, alts in g.productions.items():
        rendered = []
        for alt in alts:
            rendered.append(" . ".join(fmt_sym(s) for s in alt) if alt else "eps")
        lines.append("%s = %s" % (name, " + ".join(rendered)))
    return "\n".join(lines)
