use hexagons_core::dsl::*;
use hexagons_core::hexboard::{Board, Color, Direction, Position, PALETTE};
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------------
// Pixel-geometry oracle, independent of the cube arithmetic under test.

fn center(column: i64, row: i64) -> (f64, f64) {
    let x = 1.5 * (column - 1) as f64;
    let y = 3f64.sqrt() * ((row - 1) as f64 + if column.rem_euclid(2) == 1 { 0.5 } else { 0.0 });
    (x, y)
}

fn snap(x: f64, y: f64) -> Option<Position> {
    Position::all().find(|p| {
        let (px, py) = center(p.column() as i64, p.row() as i64);
        (px - x).abs() < 1e-6 && (py - y).abs() < 1e-6
    })
}

fn pixel_step(direction: Direction) -> (f64, f64) {
    let h = 3f64.sqrt();
    match direction {
        Direction::Up => (0.0, -h),
        Direction::Down => (0.0, h),
        Direction::UpRight => (1.5, -h / 2.0),
        Direction::DownRight => (1.5, h / 2.0),
        Direction::UpLeft => (-1.5, -h / 2.0),
        Direction::DownLeft => (-1.5, h / 2.0),
    }
}

/// Tiles of a literal region as pixel centers, clipped to the board.
fn oracle_tiles(region: &Region) -> Vec<Position> {
    let lit = |p: &PosExpr| match &p.base {
        PosBase::Lit(IntExpr::Lit(c), IntExpr::Lit(r)) => center(*c, *r),
        _ => unreachable!(),
    };
    let walk = |start: (f64, f64), direction: Direction, n: i64| -> Vec<(f64, f64)> {
        let (dx, dy) = pixel_step(direction);
        (0..n)
            .map(|i| (start.0 + dx * i as f64, start.1 + dy * i as f64))
            .collect()
    };
    let points = match region {
        Region::Tile(p) => vec![lit(p)],
        Region::Flower(p) => {
            let c = lit(p);
            let mut v = vec![c];
            for d in Direction::ALL {
                v.extend(walk(c, d, 2).into_iter().skip(1));
            }
            v
        }
        Region::Line {
            start,
            direction,
            length: LineLength::Count(IntExpr::Lit(n)),
        } => walk(lit(start), *direction, *n),
        Region::List(items) => items.iter().map(lit).collect(),
        _ => unreachable!(),
    };
    let mut seen = BTreeSet::new();
    points
        .into_iter()
        .filter_map(|(x, y)| snap(x, y))
        .filter(|p| seen.insert(*p))
        .collect()
}

fn nominal_size(region: &Region) -> usize {
    match region {
        Region::Tile(_) => 1,
        Region::Flower(_) => 7,
        Region::Line {
            length: LineLength::Count(IntExpr::Lit(n)),
            ..
        } => *n as usize,
        Region::List(items) => items.iter().map(|p| format!("{p:?}")).collect::<BTreeSet<_>>().len(),
        _ => unreachable!(),
    }
}

fn first_literal(region: &Region) -> (i64, i64) {
    let p = match region {
        Region::Tile(p) | Region::Flower(p) => p,
        Region::Line { start, .. } => start,
        Region::List(items) => &items[0],
        _ => unreachable!(),
    };
    match &p.base {
        PosBase::Lit(IntExpr::Lit(c), IntExpr::Lit(r)) => (*c, *r),
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Strategies.

fn color() -> impl Strategy<Value = Color> {
    prop::sample::select(PALETTE.to_vec())
}

fn position() -> impl Strategy<Value = Position> {
    (1i64..=18, 1i64..=10).prop_map(|(c, r)| Position::new(c, r).unwrap())
}

fn direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

fn delta() -> impl Strategy<Value = Delta> {
    (-3i64..=3, -3i64..=3).prop_map(|(c, r)| Delta::new(c, r))
}

fn lit_pos() -> impl Strategy<Value = PosExpr> {
    (1i64..=18, 1i64..=10).prop_map(|(c, r)| PosExpr::lit(c, r))
}

/// Literal regions that lie fully on the board.
fn shape() -> impl Strategy<Value = Region> {
    prop_oneof![
        lit_pos().prop_map(Region::Tile),
        lit_pos().prop_map(Region::Flower),
        (lit_pos(), direction(), 1i64..=4).prop_map(|(start, direction, n)| Region::Line {
            start,
            direction,
            length: LineLength::Count(IntExpr::Lit(n)),
        }),
        prop::collection::vec(lit_pos(), 1..=3).prop_map(Region::List),
    ]
    .prop_filter("region must fit on the board", |r| {
        oracle_tiles(r).len() == nominal_size(r)
    })
}

fn region_set() -> impl Strategy<Value = BTreeSet<Position>> {
    prop::collection::btree_set(position(), 0..12)
}

fn axis_spec() -> impl Strategy<Value = AxisSpec> {
    prop_oneof![
        Just(AxisSpec::VerticalMidline),
        Just(AxisSpec::HorizontalMidline),
        (1i64..=18).prop_map(AxisSpec::Column),
        position().prop_map(AxisSpec::Rising),
        position().prop_map(AxisSpec::Falling),
    ]
}

fn board() -> impl Strategy<Value = Board> {
    prop::collection::vec((position(), color()), 0..40)
        .prop_map(|paints| paints.into_iter().fold(Board::new(), |b, (p, c)| b.paint(p, c)))
}

// Whole-program generator for the print/parse round trip. Every definition
// has the signature (p: pos, c: color, n: int).

#[derive(Clone)]
struct Ctx {
    definition: Option<String>,
    callable: Vec<String>,
    objects: Vec<String>,
}

impl Ctx {
    fn in_def(&self) -> bool {
        self.definition.is_some()
    }
}

fn g_int(ctx: &Ctx) -> BoxedStrategy<IntExpr> {
    let lit = (0i64..30).prop_map(IntExpr::Lit);
    if ctx.in_def() {
        prop_oneof![
            lit,
            Just(IntExpr::Param("n".into())),
            (-5i64..=5).prop_map(|k| IntExpr::Offset("n".into(), k)),
        ]
        .boxed()
    } else {
        lit.boxed()
    }
}

fn g_pos(ctx: &Ctx) -> BoxedStrategy<PosExpr> {
    let base = if ctx.in_def() {
        prop_oneof![
            (g_int(ctx), g_int(ctx)).prop_map(|(c, r)| PosBase::Lit(c, r)),
            Just(PosBase::Param("p".into())),
        ]
        .boxed()
    } else {
        (g_int(ctx), g_int(ctx)).prop_map(|(c, r)| PosBase::Lit(c, r)).boxed()
    };
    (base, prop::option::of(delta()))
        .prop_map(|(base, shift)| PosExpr { base, shift })
        .boxed()
}

fn g_color(ctx: &Ctx) -> BoxedStrategy<ColorExpr> {
    if ctx.in_def() {
        prop_oneof![color().prop_map(ColorExpr::Lit), Just(ColorExpr::Param("c".into()))].boxed()
    } else {
        color().prop_map(ColorExpr::Lit).boxed()
    }
}

fn g_region(ctx: &Ctx) -> BoxedStrategy<Region> {
    let range = || prop::option::of((g_int(ctx), g_int(ctx)));
    let mut options = vec![
        g_pos(ctx).prop_map(Region::Tile).boxed(),
        (
            g_pos(ctx),
            direction(),
            prop_oneof![Just(LineLength::ToEdge), g_int(ctx).prop_map(LineLength::Count)],
        )
            .prop_map(|(start, direction, length)| Region::Line {
                start,
                direction,
                length,
            })
            .boxed(),
        g_pos(ctx).prop_map(Region::Flower).boxed(),
        g_pos(ctx).prop_map(Region::Neighbors).boxed(),
        (g_int(ctx), range())
            .prop_map(|(column, rows)| Region::Column { column, rows })
            .boxed(),
        (g_int(ctx), range())
            .prop_map(|(row, columns)| Region::Row { row, columns })
            .boxed(),
        prop::collection::vec(g_pos(ctx), 0..3).prop_map(Region::List).boxed(),
        Just(Region::All).boxed(),
    ];
    if !ctx.objects.is_empty() {
        options.push(
            prop::sample::select(ctx.objects.clone())
                .prop_map(Region::Object)
                .boxed(),
        );
    }
    prop::strategy::Union::new(options).boxed()
}

fn g_condition(ctx: &Ctx) -> BoxedStrategy<Condition> {
    let leaf = prop_oneof![
        Just(Condition::Painted),
        Just(Condition::Blank),
        Just(Condition::Edge),
        Just(Condition::EvenColumn),
        Just(Condition::OddColumn),
        Just(Condition::EvenRow),
        Just(Condition::OddRow),
        g_color(ctx).prop_map(Condition::ColorIs),
        g_color(ctx).prop_map(Condition::UntilColor),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|c| Condition::Not(Box::new(c))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Condition::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Condition::Or(Box::new(a), Box::new(b))),
        ]
    })
    .boxed()
}

fn g_axis(ctx: &Ctx) -> BoxedStrategy<Axis> {
    prop_oneof![
        Just(Axis::VerticalMidline),
        Just(Axis::HorizontalMidline),
        g_int(ctx).prop_map(Axis::Column),
        g_pos(ctx).prop_map(Axis::Rising),
        g_pos(ctx).prop_map(Axis::Falling),
    ]
    .boxed()
}

fn g_args(ctx: &Ctx) -> BoxedStrategy<Vec<Arg>> {
    (g_pos(ctx), g_color(ctx), g_int(ctx))
        .prop_map(|(p, c, n)| vec![Arg::Pos(p), Arg::Color(c), Arg::Int(n)])
        .boxed()
}

fn g_leaf(ctx: &Ctx) -> BoxedStrategy<Statement> {
    let mut options = vec![
        (g_region(ctx), g_color(ctx), prop::option::of(g_condition(ctx)))
            .prop_map(|(region, color, filter)| Statement::Paint { region, color, filter })
            .boxed(),
        (g_region(ctx), g_axis(ctx))
            .prop_map(|(region, axis)| Statement::Reflect { region, axis })
            .boxed(),
        (g_region(ctx), g_axis(ctx))
            .prop_map(|(region, axis)| Statement::Mirror { region, axis })
            .boxed(),
        (g_region(ctx), g_pos(ctx), 1i64..=5)
            .prop_map(|(region, center, k)| Statement::Rotate {
                region,
                center,
                sixths: IntExpr::Lit(k),
            })
            .boxed(),
    ];
    if !ctx.callable.is_empty() {
        options.push(
            (prop::sample::select(ctx.callable.clone()), g_args(ctx))
                .prop_map(|(name, args)| Statement::Call { name, args })
                .boxed(),
        );
    }
    if let Some(name) = ctx.definition.clone() {
        options.push(
            (1u32..6, g_args(ctx))
                .prop_map(move |(depth, args)| Statement::Recurse {
                    depth,
                    name: name.clone(),
                    args,
                })
                .boxed(),
        );
    }
    prop::strategy::Union::new(options).boxed()
}

fn g_statement(ctx: &Ctx, depth: u32) -> BoxedStrategy<Statement> {
    if depth == 0 {
        return g_leaf(ctx);
    }
    let body = prop::collection::vec(g_statement(ctx, depth - 1), 0..3);
    prop_oneof![
        3 => g_leaf(ctx),
        1 => (1i64..5, delta(), prop::option::of(g_pos(ctx)), body.clone()).prop_map(|(n, offset, anchor, body)| {
            Statement::Repeat { count: IntExpr::Lit(n), offset, anchor, body }
        }),
        1 => (g_condition(ctx), g_pos(ctx), delta().prop_filter("non-zero", |d| !d.is_zero()), body.clone())
            .prop_map(|(condition, at, offset, body)| Statement::While { condition, at, offset, body }),
        1 => (g_condition(ctx), g_pos(ctx), body.clone(), prop::option::of(body))
            .prop_map(|(condition, at, then_body, else_body)| Statement::If { condition, at, then_body, else_body }),
    ]
    .boxed()
}

fn g_program() -> impl Strategy<Value = Program> {
    (0usize..3, 0usize..3).prop_flat_map(|(n_objects, n_defs)| {
        let objects: Vec<String> = (0..n_objects).map(|i| format!("shape{i}")).collect();
        let top = Ctx {
            definition: None,
            callable: vec![],
            objects: vec![],
        };
        let object_defs = prop::collection::vec(g_region(&top), n_objects).prop_map({
            let objects = objects.clone();
            move |regions| {
                objects
                    .iter()
                    .cloned()
                    .zip(regions)
                    .map(|(name, region)| ObjectDef { name, region })
                    .collect::<Vec<_>>()
            }
        });
        let defs: Vec<BoxedStrategy<Definition>> = (0..n_defs)
            .map(|i| {
                let ctx = Ctx {
                    definition: Some(format!("fig{i}")),
                    callable: (0..i).map(|j| format!("fig{j}")).collect(),
                    objects: objects.clone(),
                };
                prop::collection::vec(g_statement(&ctx, 2), 0..4)
                    .prop_map(move |body| Definition {
                        name: format!("fig{i}"),
                        params: vec![
                            Param {
                                name: "p".into(),
                                ty: ParamType::Pos,
                            },
                            Param {
                                name: "c".into(),
                                ty: ParamType::Color,
                            },
                            Param {
                                name: "n".into(),
                                ty: ParamType::Int,
                            },
                        ],
                        body,
                    })
                    .boxed()
            })
            .collect();
        let main = Ctx {
            definition: None,
            callable: (0..n_defs).map(|j| format!("fig{j}")).collect(),
            objects,
        };
        (object_defs, defs, prop::collection::vec(g_statement(&main, 2), 0..5)).prop_map(
            |(objects, definitions, statements)| Program {
                objects,
                definitions,
                statements,
            },
        )
    })
}

fn paint(region: Region, color: Color) -> Statement {
    Statement::Paint {
        region,
        color: ColorExpr::Lit(color),
        filter: None,
    }
}

fn list(tiles: &BTreeSet<Position>) -> Region {
    Region::List(
        tiles
            .iter()
            .map(|p| PosExpr::lit(p.column() as i64, p.row() as i64))
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_is_a_fixed_point(program in g_program()) {
        let text = print_program(&program);
        let parsed = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&parsed, &program);
        prop_assert_eq!(print_program(&parsed), text);
    }

    #[test]
    fn evaluation_is_deterministic_and_well_formed(program in g_program(), start in board()) {
        let first = eval_program(&program, &start);
        prop_assert_eq!(&first, &eval_program(&program, &start));
        if let Ok(steps) = first {
            prop_assert_eq!(steps.len(), program.statements.len());
            let mut previous = start;
            for step in steps {
                prop_assert_eq!(previous.apply_actions(&step.actions), step.board.clone());
                previous = step.board;
            }
        }
    }

    #[test]
    fn repeat_equals_translate_and_replay(
        body in prop::collection::vec((shape(), color()), 1..4),
        count in 1i64..=4,
        offset in delta(),
        anchor in prop::option::of((1i64..=18, 1i64..=10)),
    ) {
        let statements: Vec<Statement> = body.iter().map(|(r, c)| paint(r.clone(), *c)).collect();
        let program = Program {
            statements: vec![Statement::Repeat {
                count: IntExpr::Lit(count),
                offset,
                anchor: anchor.map(|(c, r)| PosExpr::lit(c, r)),
                body: statements,
            }],
            ..Program::default()
        };
        let result = eval_program(&program, &Board::new());

        let (ac, ar) = anchor.unwrap_or_else(|| first_literal(&body[0].0));
        let origin = center(ac, ar);
        let mut expected: BTreeMap<Position, Color> = BTreeMap::new();
        let mut iteration_empty = false;
        for i in 0..count {
            let target = center(ac + i * offset.columns, ar + i * offset.rows);
            let (dx, dy) = (target.0 - origin.0, target.1 - origin.1);
            for (region, color) in &body {
                let moved: Vec<Position> = oracle_tiles(region)
                    .into_iter()
                    .filter_map(|p| {
                        let (x, y) = center(p.column() as i64, p.row() as i64);
                        snap(x + dx, y + dy)
                    })
                    .collect();
                iteration_empty |= moved.is_empty();
                for p in moved {
                    expected.insert(p, *color);
                }
            }
        }
        match result {
            Ok(steps) => {
                prop_assert!(!iteration_empty);
                let got: BTreeMap<Position, Color> = steps[0].actions.iter().map(|a| (a.position, a.color)).collect();
                prop_assert_eq!(got, expected);
            }
            Err(EvalError::EmptyRegion { .. }) => prop_assert!(iteration_empty),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn reflection_is_an_involution(tiles in region_set(), axis in axis_spec(), start in board()) {
        let once = reflect_region(&tiles, axis).unwrap();
        if once.len() == tiles.len() {
            prop_assert_eq!(reflect_region(&once, axis).unwrap(), tiles.clone());
        }
        // Board level: swapping twice restores the board.
        if !tiles.is_empty() {
            let ast_axis = match axis {
                AxisSpec::VerticalMidline => Axis::VerticalMidline,
                AxisSpec::HorizontalMidline => Axis::HorizontalMidline,
                AxisSpec::Column(k) => Axis::Column(IntExpr::Lit(k)),
                AxisSpec::Rising(p) => Axis::Rising(PosExpr::lit(p.column() as i64, p.row() as i64)),
                AxisSpec::Falling(p) => Axis::Falling(PosExpr::lit(p.column() as i64, p.row() as i64)),
            };
            let reflect = Statement::Reflect { region: list(&tiles), axis: ast_axis };
            let program = Program { statements: vec![reflect.clone(), reflect], ..Program::default() };
            let steps = eval_program(&program, &start).unwrap();
            prop_assert_eq!(&steps[1].board, &start);
        }
    }

    #[test]
    fn exact_axes_agree_with_pixel_mirrors(p in position(), axis in axis_spec()) {
        let (x, y) = center(p.column() as i64, p.row() as i64);
        let mirror = |(ox, oy): (f64, f64), angle: f64| {
            // Reflect (x, y) across the line through (ox, oy) at `angle`.
            let (c, s) = ((2.0 * angle).cos(), (2.0 * angle).sin());
            let (dx, dy) = (x - ox, y - oy);
            (ox + c * dx + s * dy, oy + s * dx - c * dy)
        };
        let expected = match axis {
            // Snap rule: the image column at the same row.
            AxisSpec::VerticalMidline => Position::new(19 - p.column() as i64, p.row() as i64).ok(),
            AxisSpec::HorizontalMidline => {
                let (mx, my) = mirror(center(1, 5), 0.0);
                snap(mx, my)
            }
            AxisSpec::Column(k) => {
                let (mx, my) = mirror(center(k, 1), std::f64::consts::FRAC_PI_2);
                snap(mx, my)
            }
            AxisSpec::Rising(o) => {
                let (mx, my) = mirror(center(o.column() as i64, o.row() as i64), -std::f64::consts::FRAC_PI_6);
                snap(mx, my)
            }
            AxisSpec::Falling(o) => {
                let (mx, my) = mirror(center(o.column() as i64, o.row() as i64), std::f64::consts::FRAC_PI_6);
                snap(mx, my)
            }
        };
        prop_assert_eq!(axis.image(p), expected);
    }

    #[test]
    fn rotation_has_order_six(tiles in region_set(), c in position(), k in 1i64..=5, j in 1i64..=5) {
        let mut orbit = tiles.clone();
        let mut closed = true;
        for _ in 0..6 {
            let next = rotate_region(&orbit, c, 1);
            closed &= next.len() == orbit.len();
            orbit = next;
        }
        if closed {
            prop_assert_eq!(&orbit, &tiles);
        }
        let a = rotate_region(&rotate_region(&tiles, c, k), c, j);
        let b = rotate_region(&tiles, c, (k + j) % 6);
        if a.len() == tiles.len() && b.len() == tiles.len() {
            prop_assert_eq!(a, b);
        }
        prop_assert_eq!(rotate_region(&BTreeSet::from([c]), c, k), BTreeSet::from([c]));
    }

    #[test]
    fn rotation_matches_pixel_rotation(p in position(), c in position(), k in 1i64..=5) {
        let (px, py) = center(p.column() as i64, p.row() as i64);
        let (cx, cy) = center(c.column() as i64, c.row() as i64);
        // Clockwise on screen, where y grows downward.
        let angle = k as f64 * std::f64::consts::FRAC_PI_3;
        let (dx, dy) = (px - cx, py - cy);
        let (rx, ry) = (dx * angle.cos() - dy * angle.sin(), dx * angle.sin() + dy * angle.cos());
        prop_assert_eq!(rotate_position(p, c, k), snap(cx + rx, cy + ry));
    }

    #[test]
    fn recursion_is_bounded(
        depth in 1u32..=10,
        offsets in prop::collection::vec(delta(), 1..4),
        step in delta(),
        start in (1i64..=18, 1i64..=10),
    ) {
        let body_paints: Vec<Statement> = offsets
            .iter()
            .map(|d| paint(
                Region::Tile(PosExpr { base: PosBase::Param("p".into()), shift: Some(*d) }),
                Color::Green,
            ))
            .collect();
        let per_level = body_paints.len();
        let mut body = body_paints;
        body.push(Statement::Recurse {
            depth,
            name: "grow".into(),
            args: vec![Arg::Pos(PosExpr { base: PosBase::Param("p".into()), shift: Some(step) })],
        });
        let program = Program {
            definitions: vec![Definition {
                name: "grow".into(),
                params: vec![Param { name: "p".into(), ty: ParamType::Pos }],
                body,
            }],
            statements: vec![Statement::Call {
                name: "grow".into(),
                args: vec![Arg::Pos(PosExpr::lit(start.0, start.1))],
            }],
            ..Program::default()
        };
        match eval_program(&program, &Board::new()) {
            Ok(steps) => prop_assert!(steps[0].actions.len() <= depth as usize * per_level),
            Err(EvalError::EmptyRegion { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn flowers_are_rotation_invariant(c in position(), k in 1i64..=5) {
        let flower = expand_region(&Program::default(), &Region::Flower(PosExpr::lit(c.column() as i64, c.row() as i64))).unwrap();
        if flower.len() == 7 {
            prop_assert_eq!(rotate_region(&flower, c, k), flower);
        }
    }

    #[test]
    fn concatenated_programs_compose(a in g_program(), b in g_program(), start in board()) {
        let Ok(first) = eval_program(&a, &start) else { return Ok(()) };
        let mid = first.last().map(|s| s.board.clone()).unwrap_or(start.clone());
        let Ok(tail) = eval_program(&b, &mid) else { return Ok(()) };
        if !a.objects.is_empty() || !a.definitions.is_empty() || !b.objects.is_empty() || !b.definitions.is_empty() {
            return Ok(());
        }
        let joined = Program {
            statements: a.statements.iter().chain(&b.statements).cloned().collect(),
            ..Program::default()
        };
        let all = eval_program(&joined, &start).unwrap();
        prop_assert_eq!(all, first.into_iter().chain(tail).collect::<Vec<_>>());
    }
}

#[test]
fn flower_at_the_center_is_rotation_invariant() {
    let c = Position::new(9, 5).unwrap();
    let flower = expand_region(&Program::default(), &Region::Flower(PosExpr::lit(9, 5))).unwrap();
    assert_eq!(flower.len(), 7);
    for k in 1..=5 {
        assert_eq!(rotate_region(&flower, c, k), flower);
    }
}

#[test]
fn documented_examples() {
    let steps = eval_program(
        &parse_program("paint (2,2) yellow; paint neighbors(2,2) red").unwrap(),
        &Board::new(),
    )
    .unwrap();
    assert_eq!(steps[1].actions.len(), 6);
    assert_eq!(steps[1].board.painted().len(), 7);

    let err = parse_program("paint flower(2,2) redd").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnknownColor("redd".into()));

    let one = reflect_region(
        &BTreeSet::from([Position::new(1, 1).unwrap()]),
        AxisSpec::VerticalMidline,
    )
    .unwrap();
    assert_eq!(one, BTreeSet::from([Position::new(18, 1).unwrap()]));
}
