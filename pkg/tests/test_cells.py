"""Cell plans and the proximity-driven assignment, against a permutation oracle."""

from __future__ import annotations

import itertools
import random

from conftest import make_frame, make_piece, make_unit, random_frame
from infoweave.cells import (
    assign_sp_cells,
    count_adjacent_related,
    plan_cells,
    spiral_cell_order,
    spiral_enclosed_cells,
    stable_topological_order,
)
from infoweave.model import LayoutKind, NarrativeRelationKind, PieceRelation, related_pairs

REL = NarrativeRelationKind
ALL_LAYOUTS = list(LayoutKind)


class TestPlans:
    def test_grid_four_pieces_is_two_by_two(self):
        plan = plan_cells(LayoutKind.GRID, 4)
        assert plan.rows == ((0, 1), (2, 3))

    def test_grid_grows_a_third_column_past_six(self):
        assert all(len(row) <= 2 for row in plan_cells(LayoutKind.GRID, 6).rows)
        assert max(len(row) for row in plan_cells(LayoutKind.GRID, 7).rows) == 3

    def test_portrait_is_stacked_rows(self):
        plan = plan_cells(LayoutKind.PORTRAIT, 3)
        assert plan.rows == ((0,), (1,), (2,))
        assert plan.adjacency() == frozenset({frozenset({0, 1}), frozenset({1, 2})})

    def test_landscape_is_one_row(self):
        plan = plan_cells(LayoutKind.LANDSCAPE, 4)
        assert plan.rows == ((0, 1, 2, 3),)

    def test_portrait_grid_single_rows_at_top_and_bottom(self):
        plan = plan_cells(LayoutKind.PORTRAIT_GRID, 6)
        assert plan.rows[0] == (0,)
        assert plan.rows[-1] == (5,)
        assert all(1 <= len(row) <= 2 for row in plan.rows[1:-1])

    def test_portrait_grid_small_counts(self):
        assert plan_cells(LayoutKind.PORTRAIT_GRID, 1).rows == ((0,),)
        assert plan_cells(LayoutKind.PORTRAIT_GRID, 2).rows == ((0,), (1,))
        assert plan_cells(LayoutKind.PORTRAIT_GRID, 3).rows == ((0,), (1, 2))

    def test_star_quotas_deal_clockwise(self):
        plan = plan_cells(LayoutKind.STAR, 5)
        assert plan.star_bands == ((0, 1), (2,), (3,), (4,))

    def test_spiral_serpentine_order(self):
        plan = plan_cells(LayoutKind.SPIRAL, 5)
        assert plan.rows == ((0, 1), (2, 3), (4,))
        assert spiral_cell_order(plan) == (0, 1, 3, 2, 4)

    def test_spiral_enclosed_cells_alternate_ends(self):
        plan = plan_cells(LayoutKind.SPIRAL, 6)  # rows (0,1) (2,3) (4,5)
        assert spiral_enclosed_cells(plan) == frozenset({1, 2})

    def test_single_row_spiral_has_no_enclosure(self):
        assert spiral_enclosed_cells(plan_cells(LayoutKind.SPIRAL, 2)) == frozenset()


class TestTopologicalOrder:
    def test_no_constraints_keeps_input_order(self):
        ids = ("a", "b", "c")
        assert stable_topological_order(ids, []) == ids

    def test_reorders_minimal_violation(self):
        assert stable_topological_order(("c", "b", "a"), [("a", "c")]) == ("b", "a", "c")

    def test_cycle_falls_back_to_input_order(self):
        ids = ("a", "b")
        assert stable_topological_order(ids, [("a", "b"), ("b", "a")]) == ids


def _frame_with_relations(n, pairs, kind=REL.SIMILARITY):
    pieces = [make_piece(f"sp-{i}", units=(make_unit(f"sp-{i}-u"),)) for i in range(n)]
    relations = [PieceRelation(f"sp-{a}", f"sp-{b}", kind) for a, b in pairs]
    return make_frame(pieces, relations)


class TestAssignment:
    def test_portrait_keeps_input_order_without_relations(self):
        frame = _frame_with_relations(3, [])
        assignment = assign_sp_cells(frame, LayoutKind.PORTRAIT)
        assert assignment.order == ("sp-0", "sp-1", "sp-2")

    def test_grid_pulls_related_pieces_together(self):
        # Input order separates the related pairs; greedy must do at least as
        # well as the identity and no better than the exhaustive optimum.
        frame = _frame_with_relations(6, [(0, 3), (1, 4)])
        for layout in ALL_LAYOUTS:
            assignment = assign_sp_cells(frame, layout)
            adjacency = assignment.plan.adjacency()
            related = related_pairs(frame.relations)
            identity = tuple(p.id for p in frame.pieces)
            id_score = count_adjacent_related(identity, adjacency, related)
            best = max(
                count_adjacent_related(perm, adjacency, related)
                for perm in itertools.permutations(identity)
            )
            assert id_score <= assignment.adjacent_related <= best

    def test_greedy_never_below_identity_on_random_frames(self):
        rng = random.Random(555)
        for _ in range(120):
            frame = random_frame(rng, n_pieces=rng.randint(2, 6), relation_rate=0.8)
            layout = rng.choice(ALL_LAYOUTS)
            assignment = assign_sp_cells(frame, layout)
            adjacency = assignment.plan.adjacency()
            related = related_pairs(frame.relations)
            ids = tuple(p.id for p in frame.pieces)
            if layout is LayoutKind.SPIRAL:
                constraints = [
                    (r.from_id, r.to_id) for r in frame.relations if r.kind is REL.TEMPORAL and r.from_id != r.to_id
                ]
                narrative = stable_topological_order(ids, constraints)
                baseline_cells = [""] * len(ids)
                for position, pid in enumerate(narrative):
                    baseline_cells[spiral_cell_order(assignment.plan)[position]] = pid
                baseline = tuple(baseline_cells)
            else:
                baseline = ids
            base_score = count_adjacent_related(baseline, adjacency, related)
            best = max(
                count_adjacent_related(perm, adjacency, related) for perm in itertools.permutations(ids)
            )
            assert base_score <= assignment.adjacent_related <= best

    def test_assignment_is_deterministic(self):
        rng = random.Random(9)
        frame = random_frame(rng, n_pieces=6, relation_rate=1.0)
        for layout in ALL_LAYOUTS:
            assert assign_sp_cells(frame, layout) == assign_sp_cells(frame, layout)


class TestSpiralNarrativeOrder:
    def test_temporal_chain_follows_the_curve(self):
        # Input order scrambles a pure temporal chain; the curve order must
        # restore it.
        frame = _frame_with_relations(4, [(2, 0), (0, 3), (3, 1)], kind=REL.TEMPORAL)
        assignment = assign_sp_cells(frame, LayoutKind.SPIRAL)
        curve = spiral_cell_order(assignment.plan)
        along_curve = [assignment.order[cell] for cell in curve]
        assert along_curve == ["sp-2", "sp-0", "sp-3", "sp-1"]

    def test_chain_respected_on_random_chains(self):
        rng = random.Random(17)
        for _ in range(60):
            n = rng.randint(2, 7)
            order = list(range(n))
            rng.shuffle(order)
            chain_pairs = list(zip(order, order[1:]))
            frame = _frame_with_relations(n, chain_pairs, kind=REL.TEMPORAL)
            assignment = assign_sp_cells(frame, LayoutKind.SPIRAL)
            curve = spiral_cell_order(assignment.plan)
            along_curve = [assignment.order[cell] for cell in curve]
            positions = {pid: i for i, pid in enumerate(along_curve)}
            for a, b in chain_pairs:
                assert positions[f"sp-{a}"] < positions[f"sp-{b}"]
