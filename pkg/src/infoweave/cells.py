"""Cell plans and piece-to-cell assignment for the six layout families.

A plan fixes how many cells each row (or star band) holds and in which order
the cells are read. The assignment step then decides which piece occupies
which cell, greedily pulling narratively related pieces into adjacent cells
(proximity principle) without ever doing worse than the input order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import LayoutKind, NarrativeRelationKind, StoryFrame, related_pairs


def grid_columns(n: int) -> int:
    """Column count for grid-like arrangements; wider frames get a third column."""
    return 2 if n <= 6 else 3


def _deal_star_quotas(n: int) -> tuple[int, int, int, int]:
    """Distribute n radial cells clockwise over the top/right/bottom/left bands."""
    quotas = [0, 0, 0, 0]
    for i in range(n):
        quotas[i % 4] += 1
    return tuple(quotas)


@dataclass(frozen=True)
class CellPlan:
    """Cell structure of one layout: reading order plus adjacency."""

    layout: LayoutKind
    n: int
    # Grid-like layouts: rows of cell ids, each row in left-to-right slot
    # order. Portrait is n rows of one; landscape is one row of n.
    rows: tuple[tuple[int, ...], ...]
    # Star only: cell ids per band in clockwise order (top, right, bottom, left).
    star_bands: tuple[tuple[int, ...], ...] | None = None

    def nominal_width_fraction(self, cell: int) -> float:
        """Cell width as a share of the canvas width, before area weighting."""
        if self.layout is LayoutKind.STAR:
            return 1.0 / grid_columns(self.n)
        for row in self.rows:
            if cell in row:
                return 1.0 / len(row)
        raise KeyError(cell)

    def adjacency(self) -> frozenset[frozenset[int]]:
        """Cell pairs considered spatially adjacent for the proximity score."""
        pairs: set[frozenset[int]] = set()
        if self.layout is LayoutKind.STAR:
            order = [cell for band in (self.star_bands or ()) for cell in band]
            for i in range(len(order) - 1):
                pairs.add(frozenset((order[i], order[i + 1])))
            if len(order) > 2:
                pairs.add(frozenset((order[0], order[-1])))
            return frozenset(p for p in pairs if len(p) == 2)

        for row in self.rows:
            for i in range(len(row) - 1):
                pairs.add(frozenset((row[i], row[i + 1])))
        # Vertical neighbors: cells in consecutive rows whose nominal spans overlap.
        for upper, lower in zip(self.rows, self.rows[1:]):
            for i, cell_a in enumerate(upper):
                a0, a1 = i / len(upper), (i + 1) / len(upper)
                for j, cell_b in enumerate(lower):
                    b0, b1 = j / len(lower), (j + 1) / len(lower)
                    if min(a1, b1) - max(a0, b0) > 1e-9:
                        pairs.add(frozenset((cell_a, cell_b)))
        return frozenset(p for p in pairs if len(p) == 2)


def plan_cells(layout: LayoutKind, n: int) -> CellPlan:
    if n < 1:
        raise ValueError("a plan needs at least one piece")

    if layout is LayoutKind.PORTRAIT:
        return CellPlan(layout, n, tuple((i,) for i in range(n)))
    if layout is LayoutKind.LANDSCAPE:
        return CellPlan(layout, n, (tuple(range(n)),))
    if layout is LayoutKind.GRID:
        cols = grid_columns(n)
        rows = tuple(tuple(range(start, min(start + cols, n))) for start in range(0, n, cols))
        return CellPlan(layout, n, rows)
    if layout is LayoutKind.SPIRAL:
        # Same lattice as grid; the curve direction only affects reading order.
        cols = grid_columns(n)
        rows = tuple(tuple(range(start, min(start + cols, n))) for start in range(0, n, cols))
        return CellPlan(layout, n, rows)
    if layout is LayoutKind.PORTRAIT_GRID:
        if n == 1:
            return CellPlan(layout, n, ((0,),))
        cols = grid_columns(n)
        last_single = n >= 4
        middle = list(range(1, n - 1 if last_single else n))
        rows: list[tuple[int, ...]] = [(0,)]
        for start in range(0, len(middle), cols):
            rows.append(tuple(middle[start : start + cols]))
        if last_single:
            rows.append((n - 1,))
        return CellPlan(layout, n, tuple(rows))
    if layout is LayoutKind.STAR:
        quotas = _deal_star_quotas(n)
        bands: list[tuple[int, ...]] = []
        next_id = 0
        for quota in quotas:
            bands.append(tuple(range(next_id, next_id + quota)))
            next_id += quota
        return CellPlan(layout, n, rows=(), star_bands=tuple(bands))
    raise ValueError(f"unknown layout {layout!r}")


def spiral_cell_order(plan: CellPlan) -> tuple[int, ...]:
    """Cell ids along the serpentine curve: even rows left-to-right, odd reversed."""
    order: list[int] = []
    for r, row in enumerate(plan.rows):
        order.extend(row if r % 2 == 0 else tuple(reversed(row)))
    return tuple(order)


def spiral_enclosed_cells(plan: CellPlan) -> frozenset[int]:
    """Cells wrapped by the curve on three sides: the turn-end cell of every
    row that still has a row below it."""
    if len(plan.rows) < 2:
        return frozenset()
    enclosed = []
    for r, row in enumerate(plan.rows[:-1]):
        enclosed.append(row[-1] if r % 2 == 0 else row[0])
    return frozenset(enclosed)


@dataclass(frozen=True)
class CellAssignment:
    plan: CellPlan
    order: tuple[str, ...]  # piece id occupying each cell, indexed by cell id
    adjacent_related: int

    def cell_of(self, piece_id: str) -> int:
        return self.order.index(piece_id)


def _temporal_constraints(frame: StoryFrame) -> list[tuple[str, str]]:
    return [
        (rel.from_id, rel.to_id)
        for rel in frame.relations
        if rel.kind is NarrativeRelationKind.TEMPORAL and rel.from_id != rel.to_id
    ]


def stable_topological_order(ids: tuple[str, ...], constraints: list[tuple[str, str]]) -> tuple[str, ...]:
    """Kahn's algorithm preferring input order; cycles fall back to input order."""
    index = {pid: i for i, pid in enumerate(ids)}
    indegree = {pid: 0 for pid in ids}
    successors: dict[str, list[str]] = {pid: [] for pid in ids}
    for a, b in constraints:
        if a in index and b in index:
            successors[a].append(b)
            indegree[b] += 1

    remaining = set(ids)
    out: list[str] = []
    while remaining:
        ready = sorted((pid for pid in remaining if indegree[pid] == 0), key=index.__getitem__)
        if not ready:
            # Cycle: release the earliest remaining piece and carry on.
            ready = [min(remaining, key=index.__getitem__)]
        pid = ready[0]
        remaining.discard(pid)
        out.append(pid)
        for succ in successors[pid]:
            if succ in remaining:
                indegree[succ] -= 1
    return tuple(out)


def _respects_precedence(order: tuple[str, ...], constraints: list[tuple[str, str]]) -> bool:
    pos = {pid: i for i, pid in enumerate(order)}
    return all(pos[a] < pos[b] for a, b in constraints if a in pos and b in pos)


def count_adjacent_related(
    order: tuple[str, ...],
    adjacency: frozenset[frozenset[int]],
    related: set[frozenset[str]],
) -> int:
    count = 0
    for pair in adjacency:
        i, j = tuple(pair)
        if frozenset((order[i], order[j])) in related:
            count += 1
    return count


def _greedy_order(
    baseline: tuple[str, ...],
    adjacency: frozenset[frozenset[int]],
    related: set[frozenset[str]],
    constraints: list[tuple[str, str]],
) -> tuple[str, ...]:
    n = len(baseline)
    rank = {pid: i for i, pid in enumerate(baseline)}
    must_precede: dict[str, set[str]] = {pid: set() for pid in baseline}
    for a, b in constraints:
        if a in rank and b in rank:
            must_precede[b].add(a)

    placed: list[str] = []
    remaining = list(baseline)
    neighbors_of = {cell: [c for pair in adjacency if cell in pair for c in pair if c != cell] for cell in range(n)}
    partners = {pid: {other for pair in related for other in pair if pid in pair and other != pid} for pid in baseline}

    for cell in range(n):
        filled_neighbors = [placed[c] for c in neighbors_of[cell] if c < cell]
        best = None
        best_score = -1
        for pid in remaining:
            if must_precede[pid] - set(placed):
                continue
            score = sum(1 for other in filled_neighbors if other in partners[pid])
            if score > best_score or (score == best_score and best is not None and rank[pid] < rank[best]):
                best, best_score = pid, score
        if best is None:  # precedence cycle residue: fall back to baseline order
            best = remaining[0]
        placed.append(best)
        remaining.remove(best)
    return tuple(placed)


def _improve_by_swaps(
    order: tuple[str, ...],
    adjacency: frozenset[frozenset[int]],
    related: set[frozenset[str]],
    constraints: list[tuple[str, str]],
) -> tuple[str, ...]:
    current = list(order)
    score = count_adjacent_related(tuple(current), adjacency, related)
    improved = True
    while improved:
        improved = False
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                current[i], current[j] = current[j], current[i]
                candidate = tuple(current)
                new_score = count_adjacent_related(candidate, adjacency, related)
                if new_score > score and _respects_precedence(candidate, constraints):
                    score = new_score
                    improved = True
                else:
                    current[i], current[j] = current[j], current[i]
    return tuple(current)


def assign_sp_cells(frame: StoryFrame, layout: LayoutKind) -> CellAssignment:
    """Assign pieces to cells, keeping related pieces adjacent where possible.

    The baseline is the input piece order (for the spiral: the temporal
    topological order, so the curve follows the story's time axis). The
    greedy construction plus swap refinement never scores below the baseline.
    """
    plan = plan_cells(layout, len(frame.pieces))
    ids = tuple(piece.id for piece in frame.pieces)
    related = related_pairs(frame.relations)

    constraints: list[tuple[str, str]] = []
    baseline = ids
    if layout is LayoutKind.SPIRAL:
        constraints = _temporal_constraints(frame)
        baseline = stable_topological_order(ids, constraints)

    if layout is LayoutKind.SPIRAL:
        # Cell ids along the curve are not 0..n-1 in reading order; map the
        # narrative order onto the curve order.
        curve = spiral_cell_order(plan)
        def to_cells(narrative: tuple[str, ...]) -> tuple[str, ...]:
            order = [""] * len(narrative)
            for position, pid in enumerate(narrative):
                order[curve[position]] = pid
            return tuple(order)

        adjacency = plan.adjacency()
        base_cells = to_cells(baseline)
        base_score = count_adjacent_related(base_cells, adjacency, related)
        # Swap refinement in narrative space keeps the precedence check simple.
        refined = _improve_by_swaps_narrative(baseline, curve, adjacency, related, constraints)
        refined_cells = to_cells(refined)
        refined_score = count_adjacent_related(refined_cells, adjacency, related)
        if refined_score > base_score:
            return CellAssignment(plan, refined_cells, refined_score)
        return CellAssignment(plan, base_cells, base_score)

    adjacency = plan.adjacency()
    base_score = count_adjacent_related(baseline, adjacency, related)
    greedy = _greedy_order(baseline, adjacency, related, constraints)
    greedy = _improve_by_swaps(greedy, adjacency, related, constraints)
    greedy_score = count_adjacent_related(greedy, adjacency, related)
    if greedy_score > base_score:
        return CellAssignment(plan, greedy, greedy_score)
    return CellAssignment(plan, baseline, base_score)


def _improve_by_swaps_narrative(
    narrative: tuple[str, ...],
    curve: tuple[int, ...],
    adjacency: frozenset[frozenset[int]],
    related: set[frozenset[str]],
    constraints: list[tuple[str, str]],
) -> tuple[str, ...]:
    def score(seq: tuple[str, ...]) -> int:
        order = [""] * len(seq)
        for position, pid in enumerate(seq):
            order[curve[position]] = pid
        return count_adjacent_related(tuple(order), adjacency, related)

    current = list(narrative)
    best = score(tuple(current))
    improved = True
    while improved:
        improved = False
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                current[i], current[j] = current[j], current[i]
                candidate = tuple(current)
                if _respects_precedence(candidate, constraints):
                    new_score = score(candidate)
                    if new_score > best:
                        best = new_score
                        improved = True
                        continue
                current[i], current[j] = current[j], current[i]
    return tuple(current)
