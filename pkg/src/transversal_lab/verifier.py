"""Finite-prefix property checks: growth curves, audits, compactness and independence."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import Inconclusive, TooLarge, TransversalLabError, UnsupportedCase, VerificationFailed
from .stabbing import PIERCING_GUARD, min_piercing_number
from .transversal import is_k_dependent, transversal

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GrowthCurve:
    sizes: tuple[int, ...]
    exact: tuple  # int or None per size
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    k: int


@dataclass(frozen=True)
class AuditReport:
    property: str
    params: dict
    verdict: str
    counterexample: tuple | None = None  # ((family, member), ...) 1-based
    unknown: tuple = ()
    coverage: dict = field(default_factory=dict)


def _prefix(source, t: int) -> list:
    return list(source(t)) if callable(source) else list(source[:t])


def _certified_free_subfamily(bodies, k: int) -> list[int]:
    """Greedy subfamily with no k+2 members on one k-flat (certified negatives only)."""
    chosen: list[int] = []
    for i, S in enumerate(bodies):
        ok = True
        for group in itertools.combinations(chosen, k + 1):
            try:
                ans = transversal(k, [bodies[g] for g in group] + [S])
            except TransversalLabError:
                ok = False
                break
            if not ans.certified_empty:
                ok = False
                break
        if ok:
            chosen.append(i)
    return chosen


def _greedy_cover(bodies, k: int) -> int:
    groups: list[list] = []
    for S in bodies:
        for G in groups:
            if len(G) <= k:
                G.append(S)
                break
            try:
                if transversal(k, G + [S]).pierced:
                    G.append(S)
                    break
            except TransversalLabError:
                continue
        else:
            groups.append([S])
    return len(groups)


def piercing_growth(source, sizes: Sequence[int], k: int = 0) -> GrowthCurve:
    """Exact piercing numbers where the solver applies, plus lower/upper bounds, per prefix size."""
    exact, lower, upper = [], [], []
    for t in sizes:
        bodies = _prefix(source, t)
        free = _certified_free_subfamily(bodies, k)
        lo = math.ceil(len(free) / (k + 1)) if bodies else 0
        up = _greedy_cover(bodies, k) if bodies else 0
        ex = None
        if k == 0 and len(bodies) <= PIERCING_GUARD:
            try:
                ex, _ = min_piercing_number(bodies)
            except (TooLarge, UnsupportedCase):
                ex = None
        if ex is not None and not (lo <= ex <= up):
            raise VerificationFailed(f"bounds {lo}..{up} do not bracket exact value {ex}")
        exact.append(ex)
        lower.append(lo)
        upper.append(up)
    ordered = sorted(zip(sizes, exact))
    vals = [e for _, e in ordered if e is not None]
    if any(a > b for a, b in zip(vals, vals[1:])):
        raise VerificationFailed("piercing numbers decreased along the prefixes")
    return GrowthCurve(tuple(sizes), tuple(exact), tuple(lower), tuple(upper), k)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def _judge(selection_bodies, k):
    try:
        cert = is_k_dependent(selection_bodies, k)
    except Inconclusive:
        return INCONCLUSIVE
    return HOLDS if cert is not None else FAILS


def _run_audit(name, params, selections, families, k, coverage, threads):
    """Evaluate selections (tuples of (family, member) 0-based) in order; merge by index."""
    def work(sel):
        return _judge([families[f][j] for f, j in sel], k)

    selections = list(selections)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = list(pool.map(work, selections))
    else:
        verdicts = [work(s) for s in selections]
    unknown = []
    for sel, v in zip(selections, verdicts):
        tag = tuple((f + 1, j + 1) for f, j in sel)
        if v == FAILS:
            return AuditReport(name, params, FAILS, tag, tuple(unknown), coverage)
        if v == INCONCLUSIVE:
            unknown.append(tag)
    verdict = INCONCLUSIVE if unknown else HOLDS
    return AuditReport(name, params, verdict, None, tuple(unknown), coverage)


def audit_strict_heterochromatic(families, k: int, budget: int = 1000, seed: int = 0,
                                 threads: int = 1) -> AuditReport:
    """Every one-member-per-family selection should contain k+2 members on a k-flat."""
    families = [list(f) for f in families]
    L = len(families)
    if L < k + 2:
        raise ValueError("need at least k+2 families")
    total = math.prod(len(f) for f in families)
    params = {"k": k, "families": L}
    if total <= budget:
        sels = [tuple(enumerate(c)) for c in itertools.product(*[range(len(f)) for f in families])]
        coverage = {"mode": "exhaustive", "count": total}
    else:
        rng = np.random.default_rng(seed)
        sels = [tuple((f, int(rng.integers(len(families[f])))) for f in range(L)) for _ in range(budget)]
        coverage = {"mode": "sampled", "count": budget, "seed": seed}
    return _run_audit("strict-heterochromatic", params, sels, families, k, coverage, threads)


def audit_heterochromatic(families, k: int, budget: int = 1000, seed: int = 0, length: int | None = None,
                          threads: int = 1) -> AuditReport:
    """Selections along strictly increasing family subsequences of the given length."""
    families = [list(f) for f in families]
    L = len(families)
    length = L if length is None else length
    if not (k + 2 <= length <= L):
        raise ValueError("length must lie between k+2 and the number of families")
    subseqs = list(itertools.combinations(range(L), length))
    total = sum(math.prod(len(families[f]) for f in s) for s in subseqs)
    params = {"k": k, "families": L, "length": length}
    if total <= budget:
        sels = [
            tuple(zip(s, c))
            for s in subseqs
            for c in itertools.product(*[range(len(families[f])) for f in s])
        ]
        coverage = {"mode": "exhaustive", "count": total}
    else:
        rng = np.random.default_rng(seed)
        sels = []
        for _ in range(budget):
            s = subseqs[int(rng.integers(len(subseqs)))]
            sels.append(tuple((f, int(rng.integers(len(families[f])))) for f in s))
        coverage = {"mode": "sampled", "count": budget, "seed": seed}
    return _run_audit("heterochromatic", params, sels, families, k, coverage, threads)


# ---------------------------------------------------------------------------
# compactness and independence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactnessReport:
    hypothesis_holds: bool  # every t-subset pierceable by m flats
    whole_pierceable: bool | None
    contradiction: bool
    failing_subset: tuple | None = None  # 1-based indices of a t-subset that is not m-pierceable


def _pierceable(bodies, m: int, k: int) -> bool:
    """Certified decision of 'pierceable by m k-flats'; raises Inconclusive otherwise."""
    if len(bodies) <= m:
        return True
    if k == 0:
        if m == 1:
            ans = transversal(0, bodies)
        else:
            count, _ = min_piercing_number(bodies)
            return count <= m
    elif m == 1:
        ans = transversal(k, bodies)
    else:
        raise UnsupportedCase("compactness checks with k >= 1 support m = 1 only")
    if ans.pierced:
        return True
    if ans.certified_empty:
        return False
    raise Inconclusive("transversal undecided", [])


def compactness_check(bodies, t: int, m: int, k: int = 0) -> CompactnessReport:
    bodies = list(bodies)
    failing = None
    for idx in itertools.combinations(range(len(bodies)), min(t, len(bodies))):
        if not _pierceable([bodies[i] for i in idx], m, k):
            failing = tuple(i + 1 for i in idx)
            break
    if failing is not None:
        return CompactnessReport(False, None, False, failing)
    whole = _pierceable(bodies, m, k)
    return CompactnessReport(True, whole, not whole, None)


def independent_certificate_check(sequence, k: int) -> AuditReport:
    """Holds iff every (k+2)-subset is certified to have no common k-flat."""
    seq = list(sequence)
    params = {"k": k, "length": len(seq)}
    if len(seq) < k + 2:
        return AuditReport("independent", params, HOLDS, None, (), {"mode": "exhaustive", "count": 0})
    unknown = []
    count = 0
    for idx in itertools.combinations(range(len(seq)), k + 2):
        count += 1
        ans = transversal(k, [seq[i] for i in idx])
        tag = tuple(i + 1 for i in idx)
        if ans.pierced:
            return AuditReport("independent", params, FAILS, tag, (), {"mode": "exhaustive", "count": count})
        if not ans.certified_empty:
            unknown.append(tag)
    if unknown:
        raise Inconclusive("some subsets are outside the certified procedures", unknown)
    return AuditReport("independent", params, HOLDS, None, (), {"mode": "exhaustive", "count": count})
