"""Greedy and exact solvers for the readout set-cover problem.

The problem is min sum c_j x_j subject to A x >= 1, x binary, where
column j is the Pauli subset reached by candidate readout operation j.
Universe subsets and column subsets are plain Python integers used as
bitsets, which keeps the branch-and-bound node loop allocation-free.

Three lower bounds are available, and the node bound is their max:

* MaxSetSize      -- ceil(|uncovered| / max_j |S_j cap uncovered|);
* WeightStratified -- the same ratio per Pauli-weight class (readout ops
  preserve weight, so each class must be covered within itself);
* Fractional      -- greedy cost divided by H(max residual set size),
  the classic dual-feasible scaling of the greedy prices.

The fractional bound is dominated by the other two except in shallow
endgames, so the search evaluates it only at the root and at nodes whose
residual sets are tiny; the max over fewer terms is still a valid bound.

Exact search is single-threaded depth-first: branch on the uncovered
element lying in the fewest allowed columns, try its columns in
decreasing residual-coverage order, and forbid already-branched columns
in later siblings.  Ties everywhere resolve to the lowest column index,
which makes single runs bit-for-bit reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import inf

from .settings import CoverInstance

DEFAULT_BUDGET = 600.0

# Evaluate the fractional bound at a node only when the largest residual
# set is this small (elsewhere the stratified bound dominates it).
_FRACTIONAL_MAXC = 4

_TIME_CHECK_MASK = 0x1FF  # consult the clock every 512 nodes

OPTIMAL = "Optimal"
FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class CoverSolution:
    """Outcome of a solve.

    ``lower_bound`` is always a proven bound on the optimum and never
    exceeds ``objective``; ``certificate`` names the argument that proved
    it (one of the three bounds, or ``Exhausted`` when the search tree
    was closed).  ``status`` is Optimal only when lower_bound equals
    objective.
    """

    chosen: tuple[str, ...]
    objective: Fraction
    status: str
    lower_bound: Fraction
    certificate: str
    nodes: int
    seconds: float


@dataclass(frozen=True)
class VerifyReport:
    """Feasibility check of an explicit pulse list against an instance."""

    feasible: bool
    covered: int
    universe: int
    missing: tuple[str, ...]
    objective: Fraction


@lru_cache(maxsize=None)
def _harmonic(k: int) -> Fraction:
    if k <= 0:
        return Fraction(0)
    return _harmonic(k - 1) + Fraction(1, k)


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _weight_masks_desc(instance: CoverInstance) -> tuple[int, ...]:
    masks = instance.weight_masks()
    return tuple(masks[w] for w in sorted(masks, reverse=True))


class _Context:
    """Static solve data shared by bounds, greedy, and the search."""

    def __init__(self, instance: CoverInstance):
        self.instance = instance
        self.cols = instance.columns
        self.rows = instance.rows
        self.costs = instance.costs
        self.unit = all(c == 1 for c in instance.costs)
        self.wmasks = _weight_masks_desc(instance)
        self.full_target = (1 << len(instance.universe)) - 1
        self.all_cols = (1 << len(instance.columns)) - 1


def _min_cost(ctx: _Context, allowed: int) -> Fraction:
    return min(ctx.costs[j] for j in _iter_bits(allowed))


def _greedy_run(ctx: _Context, target: int, allowed: int):
    """Greedy cover of ``target`` using ``allowed`` columns.

    Returns (chosen column indices, total cost, max initial residual set
    size) or None when some element is unreachable.  Rule: maximise
    newly-covered count per unit cost; ties break to the lowest index.
    """
    cols, costs = ctx.cols, ctx.costs
    uncovered = target
    chosen: list[int] = []
    total = Fraction(0)
    first_maxc = 0
    first = True
    while uncovered:
        best_j = -1
        best_new = 0
        best_cost = Fraction(1)
        for j in _iter_bits(allowed):
            new = (cols[j] & uncovered).bit_count()
            if new == 0:
                continue
            if first and new > first_maxc:
                first_maxc = new
            # new/cost > best_new/best_cost, exact via cross-multiplication
            if best_j < 0 or new * best_cost > best_new * costs[j]:
                best_j = j
                best_new = new
                best_cost = costs[j]
        first = False
        if best_j < 0:
            return None
        chosen.append(best_j)
        total += costs[best_j]
        uncovered &= ~cols[best_j]
        allowed &= ~(1 << best_j)
    return chosen, total, first_maxc


def _fractional_bound(ctx: _Context, unc: int, allowed: int):
    """Greedy-dual bound: residual greedy cost scaled down by H(max set)."""
    run = _greedy_run(ctx, unc, allowed)
    if run is None:
        return inf
    _, total, maxc = run
    if maxc == 0:
        return inf
    value = total / _harmonic(maxc)
    if ctx.unit:
        num, den = value.numerator, value.denominator
        return -(-num // den)
    return value


def _prefix_need(counts_desc: list[int], demand: int):
    """Fewest sets whose (sorted) per-set caps can sum to ``demand``.

    The ceil(demand / max cap) form of the counting bound is the first
    step of this scan; continuing through the sorted caps is strictly
    stronger once caps are uneven, at the cost of a sort.
    """
    got = 0
    for k, c in enumerate(counts_desc, start=1):
        if c == 0:
            break
        got += c
        if got >= demand:
            return k
    return None  # caps cannot sum to the demand: infeasible


def _node_bound(ctx: _Context, unc: int, allowed: int, threshold, with_fractional: bool):
    """Max of the lower bounds on covering ``unc`` with ``allowed`` columns.

    Stops early once the bound reaches ``threshold`` (the value at which
    the caller prunes anyway).  Returns (value, certificate_tag); the
    value is inf when the residual problem is infeasible.
    """
    cols = ctx.cols
    ucount = unc.bit_count()
    if ucount == 0:
        return 0, "MaxSetSize"

    colunc = []
    counts = []
    for j in _iter_bits(allowed):
        cu = cols[j] & unc
        if cu:
            colunc.append(cu)
            counts.append(cu.bit_count())
    if not counts:
        return inf, "MaxSetSize"
    counts.sort(reverse=True)
    maxc = counts[0]
    cmin = Fraction(1) if ctx.unit else _min_cost(ctx, allowed)

    need = _prefix_need(counts, ucount)
    if need is None:
        return inf, "MaxSetSize"
    best = need * cmin
    tag = "MaxSetSize"
    if best >= threshold:
        return best, tag

    for wmask in ctx.wmasks:
        uw = (unc & wmask).bit_count()
        if uw == 0 or uw * cmin <= best:
            continue  # even one-element-per-set cannot beat the current bound
        wcounts = sorted(((cu & wmask).bit_count() for cu in colunc), reverse=True)
        wneed = _prefix_need(wcounts, uw)
        if wneed is None:
            return inf, "WeightStratified"
        b = wneed * cmin
        if b > best:
            best = b
            tag = "WeightStratified"
            if best >= threshold:
                return best, tag

    if with_fractional or maxc <= _FRACTIONAL_MAXC:
        b = _fractional_bound(ctx, unc, allowed)
        if b > best:
            best = b
            tag = "Fractional"
    return best, tag


def _as_fraction(value) -> Fraction:
    if value is inf:
        raise ValueError("infeasible bound has no finite value")
    return Fraction(value)


def _infeasible(instance: CoverInstance, seconds: float = 0.0) -> CoverSolution:
    return CoverSolution(
        chosen=(),
        objective=Fraction(0),
        status=INFEASIBLE,
        lower_bound=Fraction(0),
        certificate="MaxSetSize",
        nodes=0,
        seconds=seconds,
    )


def greedy(instance: CoverInstance) -> CoverSolution:
    """Greedy cover: repeatedly take the set with the most uncovered
    elements per unit cost (lowest index on ties).  Infeasible instances
    come back with status Infeasible rather than raising."""
    start = time.monotonic()
    ctx = _Context(instance)
    if not instance.coverable:
        return _infeasible(instance, time.monotonic() - start)
    run = _greedy_run(ctx, ctx.full_target, ctx.all_cols)
    chosen, total, _ = run
    lb, tag = _node_bound(ctx, ctx.full_target, ctx.all_cols, inf, with_fractional=True)
    lb = min(_as_fraction(lb), total)
    return CoverSolution(
        chosen=tuple(instance.ops[j].name for j in chosen),
        objective=total,
        status=OPTIMAL if lb == total else FEASIBLE,
        lower_bound=lb,
        certificate=tag,
        nodes=0,
        seconds=time.monotonic() - start,
    )


def _drop_dominated(ctx: _Context, unc: int, allowed: int) -> int:
    """Strip allowed columns that cannot help cover ``unc``.

    A column with no residual coverage is useless; so is one whose
    residual coverage is a subset of another allowed column's at no lower
    cost (equal coverage keeps the lower index).  Returns the pruned
    allowed mask; the subproblem optimum is unchanged.
    """
    cols, costs, unit = ctx.cols, ctx.costs, ctx.unit
    live: list[tuple[int, int]] = []
    for j in _iter_bits(allowed):
        cu = cols[j] & unc
        if cu:
            live.append((j, cu))
    pruned = 0
    count = len(live)
    for a in range(count):
        ja, cua = live[a]
        dominated = False
        for b in range(count):
            if a == b:
                continue
            jb, cub = live[b]
            if cua & ~cub:
                continue  # not a subset
            if not unit and costs[ja] < costs[jb]:
                continue
            if cua == cub and (costs[ja], ja) <= (costs[jb], jb):
                continue  # the tie keeps a, not b
            dominated = True
            break
        if not dominated:
            pruned |= 1 << ja
    return pruned


def _reduce(ctx: _Context):
    """Classic preprocessing; returns (allowed column mask, target row mask).

    * duplicate/dominated columns: drop j when S_j is a subset of S_k and
      c_j >= c_k (equal sets keep the cheaper, then the lower index);
    * dominated rows: drop element s when every column covering element r
      also covers s (covering r then covers s for free).

    Both preserve the optimum.  Row dominance is quadratic in the universe
    and is limited to duplicate-row merging beyond 2048 rows.
    """
    cols, costs, rows = ctx.cols, ctx.costs, ctx.rows
    ncols = len(cols)
    dropped = [False] * ncols
    for a in range(ncols):
        if dropped[a]:
            continue
        for b in range(ncols):
            if a == b or dropped[b]:
                continue
            if cols[a] & ~cols[b]:
                continue  # a not a subset of b
            if cols[a] == cols[b]:
                if costs[b] < costs[a] or (costs[b] == costs[a] and b < a):
                    dropped[a] = True
                    break
            elif costs[a] >= costs[b]:
                dropped[a] = True
                break
    allowed = 0
    for j in range(ncols):
        if not dropped[j]:
            allowed |= 1 << j

    nrows = len(rows)
    active_rows = [rows[k] & allowed for k in range(nrows)]
    target = 0
    if nrows > 2048:
        seen: dict[int, int] = {}
        for k, mask in enumerate(active_rows):
            if mask not in seen:
                seen[mask] = k
                target |= 1 << k
    else:
        order = sorted(range(nrows), key=lambda k: (active_rows[k].bit_count(), k))
        kept: list[int] = []
        for k in order:
            mask = active_rows[k]
            if any(active_rows[r] & ~mask == 0 for r in kept):
                continue  # some kept row dominates k
            kept.append(k)
            target |= 1 << k
    return allowed, target


def solve_exact(
    instance: CoverInstance,
    budget: float = DEFAULT_BUDGET,
    use_reductions: bool = True,
) -> CoverSolution:
    """Exact branch-and-bound solve.

    Returns status Optimal with the true minimum when the search closes
    within ``budget`` seconds; otherwise the best incumbent with status
    Feasible and the strongest proven lower bound.  Single-threaded and
    deterministic: identical inputs give identical chosen lists.
    """
    if budget is None or budget <= 0:
        raise ValueError(f"time budget must be positive, got {budget!r}")
    start = time.monotonic()
    deadline = start + budget
    ctx = _Context(instance)
    if not instance.coverable:
        return _infeasible(instance, time.monotonic() - start)

    if use_reductions:
        allowed0, target = _reduce(ctx)
    else:
        allowed0, target = ctx.all_cols, ctx.full_target

    cols, rows, costs = ctx.cols, ctx.rows, ctx.costs
    unit = ctx.unit
    zero = 0 if unit else Fraction(0)

    # Greedy incumbent over the full universe: always a valid cover.
    g_chosen, g_total, _ = _greedy_run(ctx, ctx.full_target, allowed0)
    best_obj = len(g_chosen) if unit else g_total
    best_chosen = list(g_chosen)

    root_lb, root_tag = _node_bound(ctx, target, allowed0, best_obj, with_fractional=True)
    if root_lb >= best_obj:
        # The greedy solution already meets a proven bound.
        obj = Fraction(best_obj)
        return CoverSolution(
            chosen=tuple(instance.ops[j].name for j in best_chosen),
            objective=obj,
            status=OPTIMAL,
            lower_bound=obj,
            certificate=root_tag,
            nodes=0,
            seconds=time.monotonic() - start,
        )

    nodes = 0
    timed_out = False
    # Stack entries: (uncovered, allowed, cost so far, chosen cols, bound, tag)
    stack = [(target, allowed0, zero, [], root_lb, root_tag)]

    while stack:
        if nodes & _TIME_CHECK_MASK == 0 and time.monotonic() > deadline:
            timed_out = True
            break
        unc, allowed, cost, chosen, lb, _ = stack.pop()
        nodes += 1
        if cost + lb >= best_obj:
            continue

        # Alternate unit propagation with residual column dominance until
        # stable: a column whose residual coverage sits inside another's
        # can never help, and dropping it often leaves some element with a
        # single candidate, forcing further includes.
        dead = False
        pick = -1
        while True:
            if unc == 0:
                if cost < best_obj:
                    best_obj = cost
                    best_chosen = list(chosen)
                dead = True
                break
            pick = -1
            pick_cnt = None
            m = unc
            while m:
                low = m & -m
                e = low.bit_length() - 1
                m ^= low
                cnt = (rows[e] & allowed).bit_count()
                if pick_cnt is None or cnt < pick_cnt:
                    pick, pick_cnt = e, cnt
                    if cnt <= 1:
                        break
            if pick_cnt == 0:
                dead = True
                break
            if pick_cnt == 1:
                j = (rows[pick] & allowed).bit_length() - 1
                cost = cost + (1 if unit else costs[j])
                if cost >= best_obj:
                    dead = True
                    break
                chosen = chosen + [j]
                unc &= ~cols[j]
                allowed &= ~(1 << j)
                continue
            pruned = _drop_dominated(ctx, unc, allowed)
            if pruned == allowed:
                break
            allowed = pruned

        if dead:
            continue

        # Bounds against the current incumbent; unc/allowed may have
        # shrunk since this node was pushed.
        threshold = best_obj - cost
        lb, _ = _node_bound(ctx, unc, allowed, threshold, False)
        if lb >= threshold:
            continue

        branch_cols = sorted(
            _iter_bits(rows[pick] & allowed),
            key=lambda j: (-(cols[j] & unc).bit_count(), j),
        )
        # Push in reverse so the most-covering column is explored first.
        pending = []
        forbidden = 0
        for j in branch_cols:
            child_allowed = allowed & ~forbidden & ~(1 << j)
            forbidden |= 1 << j
            child_cost = cost + (1 if unit else costs[j])
            if child_cost >= best_obj:
                continue
            child_unc = unc & ~cols[j]
            child_threshold = best_obj - child_cost
            clb, ctag = _node_bound(ctx, child_unc, child_allowed, child_threshold, False)
            if clb >= child_threshold:
                continue
            pending.append((child_unc, child_allowed, child_cost, chosen + [j], clb, ctag))
        stack.extend(reversed(pending))

    seconds = time.monotonic() - start
    objective = Fraction(best_obj)
    chosen_names = tuple(instance.ops[j].name for j in best_chosen)

    if not timed_out:
        if root_lb == best_obj:
            cert = root_tag
        else:
            cert = "Exhausted"
        return CoverSolution(
            chosen=chosen_names,
            objective=objective,
            status=OPTIMAL,
            lower_bound=objective,
            certificate=cert,
            nodes=nodes,
            seconds=seconds,
        )

    open_lb = min((c + lb for _, _, c, _, lb, _ in stack), default=best_obj)
    open_tags = [t for _, _, c, _, lb, t in stack if c + lb == open_lb]
    lb_value = max(_as_fraction(root_lb), min(Fraction(open_lb), objective))
    if lb_value == root_lb or not open_tags:
        cert = root_tag
    else:
        cert = open_tags[0]
    return CoverSolution(
        chosen=chosen_names,
        objective=objective,
        status=FEASIBLE,
        lower_bound=min(lb_value, objective),
        certificate=cert,
        nodes=nodes,
        seconds=seconds,
    )


def verify(instance: CoverInstance, names: list[str]) -> VerifyReport:
    """Check an explicit pulse list: which universe elements does it cover?

    Every name must resolve in the instance family (same canonical text
    as the instance ops).  The report lists the missed Pauli strings;
    an empty list means the pulse set is a feasible cover.
    """
    index = {op.name: j for j, op in enumerate(instance.ops)}
    chosen = []
    for name in names:
        if name not in index:
            raise ValueError(
                f"pulse {name!r} does not name a set in the instance family"
            )
        chosen.append(index[name])
    covered_mask = 0
    total = Fraction(0)
    for j in chosen:
        covered_mask |= instance.columns[j]
        total += instance.costs[j]
    full = (1 << len(instance.universe)) - 1
    missing_mask = full & ~covered_mask
    missing = tuple(
        instance.universe[k].letters for k in _iter_bits(missing_mask)
    )
    return VerifyReport(
        feasible=not missing,
        covered=len(instance.universe) - len(missing),
        universe=len(instance.universe),
        missing=missing,
        objective=total,
    )


def _coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return repr(float(c))


def lp_text(instance: CoverInstance) -> str:
    """The instance as a CPLEX-LP-format 0-1 program.

    One binary variable x<j> per candidate op, one >=1 constraint per
    universe element; the header comments map variables back to op names.
    """
    if not instance.coverable:
        missing = ", ".join(p.letters for p in instance.uncoverable[:5])
        raise ValueError(
            f"instance is not coverable (e.g. {missing}); refusing to emit an LP"
        )
    lines = [
        f"\\ Pauli readout cover: n={instance.n}, "
        f"{len(instance.columns)} candidate ops, {len(instance.universe)} elements",
    ]
    for j, op in enumerate(instance.ops):
        lines.append(f"\\ x{j} = {op.name}")
    lines.append("Minimize")
    terms = " + ".join(
        f"{_coeff(instance.costs[j])} x{j}" for j in range(len(instance.columns))
    )
    lines.append(f" obj: {terms}")
    lines.append("Subject To")
    for k in range(len(instance.universe)):
        covering = " + ".join(f"x{j}" for j in _iter_bits(instance.rows[k]))
        lines.append(f" c{k}: {covering} >= 1")
    lines.append("Binary")
    names = [f"x{j}" for j in range(len(instance.columns))]
    for i in range(0, len(names), 12):
        lines.append(" " + " ".join(names[i : i + 12]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(instance: CoverInstance, path) -> tuple[int, int]:
    """Write the LP file; returns (variable count, constraint count)."""
    text = lp_text(instance)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
    return len(instance.columns), len(instance.universe)
