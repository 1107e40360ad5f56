"""Independent reference implementations used as test oracles.

Nothing here imports the package under test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

# ---------------------------------------------------------------------------
# sequences


def lcs_length(a, b) -> int:
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def lcs_length_bruteforce(a, b) -> int:
    """Enumerate subsequences of the shorter input (small inputs only)."""
    a, b = list(a), list(b)
    if len(a) > len(b):
        a, b = b, a

    def is_subseq(sub, seq):
        it = iter(seq)
        return all(any(x == y for y in it) for x in sub)

    for k in range(len(a), 0, -1):
        if any(is_subseq([a[i] for i in idx], b) for idx in combinations(range(len(a)), k)):
            return k
    return 0


def edit_distance(a, b) -> int:
    """Plain Wagner-Fischer table."""
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[n][m]


def occurrences(seq, sub) -> int:
    k = len(sub)
    return sum(1 for s in range(len(seq) - k + 1) if list(seq[s : s + k]) == list(sub))


def random_edit(rng: random.Random, tokens: list[str], alphabet: list[str], n_edits: int) -> list[str]:
    """Apply random token-level insertions, deletions and substitutions."""
    out = list(tokens)
    for _ in range(n_edits):
        op = rng.choice(("ins", "del", "sub"))
        if op == "ins" or not out:
            out.insert(rng.randint(0, len(out)), rng.choice(alphabet))
        elif op == "del":
            del out[rng.randrange(len(out))]
        else:
            out[rng.randrange(len(out))] = rng.choice(alphabet)
    return out


# ---------------------------------------------------------------------------
# data flow: program generator + direct interpreter of the flow table


@dataclass
class Occ:
    kind: str  # "in" / "out"
    name: str
    offset: int  # character offset of the occurrence in the generated source
    pattern: str
    sources: tuple[int, ...] = ()


@dataclass
class GeneratedMethod:
    source: str
    events: list[Occ] = field(default_factory=list)  # evaluation order
    statements: int = 0


class MethodGenerator:
    SIMPLE = ("a", "b", "c", "d", "min", "max", "total")
    FIELDS = ("this.f", "this.size")
    METHODS = ("g", "h", "compute")

    def __init__(self, rng: random.Random, max_statements: int = 30, max_depth: int = 2):
        self.rng = rng
        self.max_statements = max_statements
        self.max_depth = max_depth
        self.parts: list[str] = []
        self.pos = 0
        self.count = 0

    def w(self, text: str) -> int:
        start = self.pos
        self.parts.append(text)
        self.pos += len(text)
        return start

    def name(self) -> str:
        pool = self.SIMPLE + self.FIELDS if self.rng.random() < 0.2 else self.SIMPLE
        return self.rng.choice(pool)

    # expressions: return events in evaluation order; ``ctx`` is the input
    # pattern of a bare variable in this slot (None = killed)
    def expr(self, depth: int, ctx: str | None) -> list[Occ]:
        r = self.rng
        kind = r.choice(("var", "lit")) if depth == 0 else r.choice(
            ("var", "var", "lit", "infix", "infix", "prefix", "index", "call", "rcall", "cond", "post")
        )
        if kind == "var":
            n = self.name()
            off = self.w(n)
            return [Occ("in", n, off, ctx)] if ctx else []
        if kind == "lit":
            self.w(r.choice(("0", "1", "42", "null", "true")))
            return []
        if kind == "infix":
            self.w("(")
            ev = self.expr(depth - 1, "InfixExpression")
            self.w(r.choice((" + ", " - ", " * ", " < ", " > ", " == ", " && ")))
            ev += self.expr(depth - 1, "InfixExpression")
            self.w(")")
            return ev
        if kind == "prefix":
            self.w(r.choice(("-(", "!(")))
            ev = self.expr(depth - 1, "PrefixExpression")
            self.w(")")
            return ev
        if kind == "index":
            n = self.name()
            off = self.w(n)
            self.w("[")
            ev = [Occ("in", n, off, "ContainerAccess")] + self.expr(depth - 1, "ContainerAccess")
            self.w("]")
            return ev
        if kind in ("call", "rcall"):
            ev = []
            if kind == "rcall":
                n = r.choice(self.SIMPLE)
                ev.append(Occ("in", n, self.w(n), "MethodInvocation"))
                self.w(".")
            self.w(r.choice(self.METHODS) + "(")
            for i in range(r.randint(0, 2)):
                if i:
                    self.w(", ")
                ev += self.expr(depth - 1, "MethodInvocation")
            self.w(")")
            return ev
        if kind == "cond":
            self.w("(")
            ev = self.expr(depth - 1, "InfixExpression")
            self.w(" ? ")
            ev += self.expr(depth - 1, "InfixExpression")
            self.w(" : ")
            ev += self.expr(depth - 1, "InfixExpression")
            self.w(")")
            return ev
        n = self.name()
        off = self.w(n)
        self.w(r.choice(("++", "--")))
        return [Occ("in", n, off, "PostfixExpression"), Occ("out", n, off, "PostfixExpression")]

    def block(self, budget: int) -> list[Occ]:
        ev = []
        for _ in range(budget):
            if self.count >= self.max_statements:
                break
            ev += self.statement()
        return ev

    def statement(self) -> list[Occ]:
        r = self.rng
        self.count += 1
        d = self.max_depth
        kind = r.choice(("decl", "decl", "bare_decl", "assign", "assign", "store", "post", "pre", "call",
                         "return", "if", "while", "each"))
        if kind == "decl":
            n = r.choice(self.SIMPLE)
            self.w("int ")
            off = self.w(n)
            self.w(" = ")
            rhs = self.expr(d, "Assignment(right-hand)")
            self.w("; ")
            return rhs + [Occ("out", n, off, "Assignment(left-hand)", tuple(e.offset for e in rhs))]
        if kind == "bare_decl":
            self.w(f"int {r.choice(self.SIMPLE)}; ")
            return []
        if kind == "assign":
            n = self.name()
            off = self.w(n)
            self.w(r.choice((" = ", " += ", " -= ")))
            rhs = self.expr(d, "Assignment(right-hand)")
            self.w("; ")
            return rhs + [Occ("out", n, off, "Assignment(left-hand)", tuple(e.offset for e in rhs))]
        if kind == "store":
            n = self.name()
            off = self.w(n)
            self.w("[")
            index = self.expr(d - 1, "ContainerAccess")
            self.w("] = ")
            rhs = self.expr(d, "Assignment(right-hand)")
            self.w("; ")
            return rhs + index + [Occ("out", n, off, "Assignment(left-hand)", tuple(e.offset for e in rhs))]
        if kind == "post":
            n = self.name()
            off = self.w(n)
            self.w(r.choice(("++; ", "--; ")))
            return [Occ("in", n, off, "PostfixExpression"), Occ("out", n, off, "PostfixExpression")]
        if kind == "pre":
            self.w(r.choice(("++", "--")))
            n = self.name()
            off = self.w(n)
            self.w("; ")
            return [Occ("in", n, off, "PrefixExpression")]
        if kind == "call":
            ev = []
            if r.random() < 0.5:
                n = r.choice(self.SIMPLE)
                ev.append(Occ("in", n, self.w(n), "MethodInvocation"))
                self.w(".")
            self.w(r.choice(self.METHODS) + "(")
            for i in range(r.randint(0, 3)):
                if i:
                    self.w(", ")
                ev += self.expr(d, "MethodInvocation")
            self.w("); ")
            return ev
        if kind == "return":
            if r.random() < 0.2:
                self.w("return; ")
                return []
            self.w("return ")
            ev = self.expr(d, "ReturnStatement")
            self.w("; ")
            return ev
        if kind == "if":
            self.w("if (")
            ev = self.expr(d, None)
            self.w(") { ")
            ev += self.block(r.randint(0, 3))
            self.w("} ")
            if r.random() < 0.5:
                self.w("else { ")
                ev += self.block(r.randint(0, 3))
                self.w("} ")
            return ev
        if kind == "while":
            self.w("while (")
            ev = self.expr(d, None)
            self.w(") { ")
            ev += self.block(r.randint(0, 3))
            self.w("} ")
            return ev
        # for-each: the iterable is evaluated first, then the loop variable is bound
        self.w("for (int ")
        n = r.choice(self.SIMPLE)
        off = self.w(n)
        self.w(" : ")
        ev = self.expr(d, None)
        ev.append(Occ("out", n, off, "MethodParameter"))
        self.w(") { ")
        ev += self.block(r.randint(0, 3))
        self.w("} ")
        return ev

    def method(self) -> GeneratedMethod:
        r = self.rng
        params = r.sample(self.SIMPLE, r.randint(0, 3))
        ev = []
        self.w("int m(")
        for i, p in enumerate(params):
            if i:
                self.w(", ")
            self.w("int ")
            ev.append(Occ("out", p, self.w(p), "MethodParameter"))
        self.w(") { ")
        while self.count < self.max_statements and r.random() < 0.93:
            ev += self.statement()
        self.w("}")
        return GeneratedMethod("".join(self.parts), ev, self.count)


def generate_method(seed: int, max_statements: int = 30) -> GeneratedMethod:
    return MethodGenerator(random.Random(seed), max_statements).method()


def interpret_flows(events: list[Occ]) -> set[tuple[int, int]]:
    """Nearest-definition edges by backward scan, plus right-hand -> left-hand edges."""
    edges = set()
    for i, ev in enumerate(events):
        if ev.kind == "in":
            for j in range(i - 1, -1, -1):
                prior = events[j]
                if prior.kind == "out" and prior.name == ev.name:
                    edges.add((prior.offset, ev.offset))
                    break
        else:
            edges.update((s, ev.offset) for s in ev.sources)
    return edges


# ---------------------------------------------------------------------------
# metrics with exact arithmetic


def ngram_counts(tokens, n):
    counts = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i : i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def sari_exact(source, output, reference, order=4) -> Fraction:
    """Single-reference SARI, written out directly from the metric definition (keep F1, delete precision, add F1)."""
    total_keep = total_del = total_add = Fraction(0)
    for n in range(1, order + 1):
        s, o, ref = ngram_counts(source, n), ngram_counts(output, n), ngram_counts(reference, n)
        grams = set(s) | set(o) | set(ref)

        kept_sys = {g: min(s.get(g, 0), o.get(g, 0)) for g in grams if min(s.get(g, 0), o.get(g, 0)) > 0}
        kept_all = {g: min(s.get(g, 0), ref.get(g, 0)) for g in grams if min(s.get(g, 0), ref.get(g, 0)) > 0}
        good = {g: min(kept_sys[g], ref.get(g, 0)) for g in kept_sys}
        kp = sum((Fraction(good[g], kept_sys[g]) for g in kept_sys), Fraction(0)) / len(kept_sys) if kept_sys else Fraction(0)
        kr = sum((Fraction(good[g], kept_all[g]) for g in kept_sys if g in kept_all), Fraction(0)) / len(kept_all) if kept_all else Fraction(0)
        keep = 2 * kp * kr / (kp + kr) if kp + kr else Fraction(0)

        deleted = {g: s[g] - o.get(g, 0) for g in s if s[g] > o.get(g, 0)}
        del_good = {g: max(deleted[g] - ref.get(g, 0), 0) for g in deleted}
        dp = sum((Fraction(del_good[g], deleted[g]) for g in deleted), Fraction(0)) / len(deleted) if deleted else Fraction(0)

        added = {g for g in o if g not in s}
        wanted = {g for g in ref if g not in s}
        ap = Fraction(len(added & wanted), len(added)) if added else Fraction(0)
        ar = Fraction(len(added & wanted), len(wanted)) if wanted else Fraction(0)
        add = 2 * ap * ar / (ap + ar) if ap + ar else Fraction(0)

        total_keep += keep
        total_del += dp
        total_add += add
    return (total_keep + total_del + total_add) / (3 * order)
