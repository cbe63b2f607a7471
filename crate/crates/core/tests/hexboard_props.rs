use hexagons_core::hexboard::{neighbors, Action, ActionSet, Board, Color, Position, PALETTE};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Tile centers computed from first principles: flat-top hexagons of
/// circumradius 1, odd columns half a tile lower.
fn oracle_center(column: i64, row: i64) -> (f64, f64) {
    let x = 1.5 * (column - 1) as f64;
    let y = 3f64.sqrt() * ((row - 1) as f64 + if column % 2 == 1 { 0.5 } else { 0.0 });
    (x, y)
}

fn oracle_neighbors(p: Position) -> BTreeSet<Position> {
    let (x, y) = oracle_center(p.column() as i64, p.row() as i64);
    let pitch = 3f64.sqrt();
    Position::all()
        .filter(|&q| {
            let (qx, qy) = oracle_center(q.column() as i64, q.row() as i64);
            q != p && ((qx - x).hypot(qy - y) - pitch).abs() < 1e-9
        })
        .collect()
}

#[test]
fn neighbors_match_center_distance_oracle() {
    for p in Position::all() {
        let got: BTreeSet<Position> = neighbors(p).into_iter().collect();
        assert_eq!(got, oracle_neighbors(p), "tile {p}");
        let deg = got.len();
        assert!((2..=6).contains(&deg));
        let interior = p.column() > 1 && p.column() < 18 && p.row() > 1 && p.row() < 10;
        if interior {
            assert_eq!(deg, 6, "interior tile {p}");
        }
        for q in got {
            assert!(neighbors(q).contains(&p), "{p} ~ {q} not symmetric");
        }
    }
}

fn color() -> impl Strategy<Value = Color> {
    prop::sample::select(PALETTE.to_vec())
}

fn position() -> impl Strategy<Value = Position> {
    (1i64..=18, 1i64..=10).prop_map(|(c, r)| Position::new(c, r).unwrap())
}

fn board() -> impl Strategy<Value = Board> {
    prop::collection::vec((position(), color()), 0..60)
        .prop_map(|paints| paints.into_iter().fold(Board::new(), |b, (p, c)| b.paint(p, c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn diff_then_apply_round_trips(prev in board(), next in board()) {
        let d = prev.diff(&next);
        prop_assert_eq!(prev.apply_actions(&d), next.clone());
        for a in d.iter() {
            prop_assert_ne!(prev.get(a.position), a.color);
            prop_assert_eq!(next.get(a.position), a.color);
        }
    }

    #[test]
    fn last_writer_wins(b in board(), p in position(), c1 in color(), c2 in color()) {
        prop_assert_eq!(b.paint(p, c1).paint(p, c2), b.paint(p, c2));
    }

    #[test]
    fn apply_is_order_independent(b in board(), acts in prop::collection::btree_map(position(), color(), 0..30)) {
        let forward: Vec<Action> = acts.iter().map(|(&p, &c)| Action::new(p, c)).collect();
        let set = ActionSet::from_actions(forward.iter().copied()).unwrap();
        let sequential = forward.iter().rev().fold(b.clone(), |acc, a| acc.paint(a.position, a.color));
        prop_assert_eq!(b.apply_actions(&set), sequential);
    }

    #[test]
    fn painted_counts_distinct_non_white_paints(tiles in prop::collection::btree_map(position(), 1usize..8, 0..40)) {
        let b = tiles.iter().fold(Board::new(), |b, (&p, &i)| b.paint(p, PALETTE[i]));
        prop_assert_eq!(b.painted().len(), tiles.len());
    }
}
