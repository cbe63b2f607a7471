//! Interpreter. Each top-level statement becomes one drawing step.
//!
//! Translation is tracked as a cube vector `shift`: `repeat` and `while`
//! re-run their body with a larger shift, and every literal position is
//! moved by it. A `pos` parameter is moved only by the shift accumulated
//! since the call that bound it.

use super::ast::*;
use super::printer::print_statement;
use super::transform::{rotate_position, AxisSpec};
use crate::hexboard::{ActionSet, Board, Color, Cube, Position};
use std::collections::{BTreeSet, HashMap};

/// Frames deeper than this fail with [`EvalError::DepthExceeded`].
pub const MAX_NESTING: usize = 96;
/// Upper bound on tile assignments per program.
pub const MAX_ASSIGNMENTS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("`{statement}` selects no tiles on the board")]
    EmptyRegion { statement: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown definition `{0}`")]
    UnknownDefinition(String),
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error("{0}")]
    InvalidAxis(String),
    #[error("nesting exceeds {limit} frames")]
    DepthExceeded { limit: usize },
    #[error("program assigns more than {limit} tiles")]
    BudgetExceeded { limit: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// The statement that produced this step, as printed.
    pub source: String,
    pub actions: ActionSet,
    pub board: Board,
}

#[derive(Debug, Clone, Copy)]
enum Value {
    Int(i64),
    Pos(Cube),
    Color(Color),
}

struct Frame {
    values: HashMap<String, Value>,
    /// Shift in effect when the frame was entered.
    base: Cube,
    definition: Option<String>,
    level: u32,
}

impl Frame {
    fn top() -> Frame {
        Frame {
            values: HashMap::new(),
            base: Cube::default(),
            definition: None,
            level: 0,
        }
    }
}

struct Machine<'p> {
    program: &'p Program,
    board: Board,
    actions: ActionSet,
    nesting: usize,
    assignments: usize,
    statement: String,
}

type EResult<T> = Result<T, EvalError>;

pub fn eval_program(program: &Program, board: &Board) -> Result<Vec<Step>, EvalError> {
    let mut machine = Machine {
        program,
        board: board.clone(),
        actions: ActionSet::new(),
        nesting: 0,
        assignments: 0,
        statement: String::new(),
    };
    let frame = Frame::top();
    let mut steps = Vec::with_capacity(program.statements.len());
    let mut previous = board.clone();
    for stmt in &program.statements {
        machine.statement = print_statement(stmt);
        machine.actions = ActionSet::new();
        machine.exec(stmt, &frame, Cube::default())?;
        let next = previous.apply_actions(&machine.actions);
        debug_assert_eq!(next, machine.board);
        steps.push(Step {
            source: machine.statement.clone(),
            actions: std::mem::take(&mut machine.actions),
            board: next.clone(),
        });
        previous = next;
    }
    Ok(steps)
}

/// The tiles a region selects on `board`, evaluated at the top level.
pub fn expand_region(program: &Program, region: &Region) -> Result<BTreeSet<Position>, EvalError> {
    let machine = Machine {
        program,
        board: Board::new(),
        actions: ActionSet::new(),
        nesting: 0,
        assignments: 0,
        statement: String::new(),
    };
    machine.region(region, &Frame::top(), Cube::default())
}

fn offset_step(from: Cube, delta: Delta, times: i64) -> Cube {
    let (c, r) = from.to_offset();
    Cube::from_offset(c + times * delta.columns, r + times * delta.rows)
}

/// The first position written in a block, used as the default `repeat` anchor.
fn first_position(body: &[Statement]) -> Option<&PosExpr> {
    fn in_region(region: &Region) -> Option<&PosExpr> {
        match region {
            Region::Tile(p) | Region::Flower(p) | Region::Neighbors(p) => Some(p),
            Region::Line { start, .. } => Some(start),
            Region::List(items) => items.first(),
            _ => None,
        }
    }
    body.iter().find_map(|stmt| match stmt {
        Statement::Paint { region, .. } | Statement::Reflect { region, .. } | Statement::Mirror { region, .. } => {
            in_region(region)
        }
        Statement::Rotate { region, center, .. } => in_region(region).or(Some(center)),
        Statement::Repeat { anchor, body, .. } => anchor.as_ref().or_else(|| first_position(body)),
        Statement::While { at, .. } | Statement::If { at, .. } => Some(at),
        Statement::Call { args, .. } | Statement::Recurse { args, .. } => args.iter().find_map(|a| match a {
            Arg::Pos(p) => Some(p),
            _ => None,
        }),
    })
}

fn on_board(cells: impl IntoIterator<Item = Cube>) -> BTreeSet<Position> {
    cells.into_iter().filter_map(Cube::to_position).collect()
}

impl Machine<'_> {
    fn empty_region(&self) -> EvalError {
        EvalError::EmptyRegion {
            statement: self.statement.clone(),
        }
    }

    fn lookup(&self, frame: &Frame, name: &str) -> EResult<Value> {
        frame
            .values
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::Unbound(name.to_string()))
    }

    fn int(&self, expr: &IntExpr, frame: &Frame) -> EResult<i64> {
        let param = |name: &str| match self.lookup(frame, name)? {
            Value::Int(n) => Ok(n),
            _ => Err(EvalError::Invalid(format!("`{name}` is not an int"))),
        };
        match expr {
            IntExpr::Lit(n) => Ok(*n),
            IntExpr::Param(name) => param(name),
            IntExpr::Offset(name, k) => Ok(param(name)? + k),
        }
    }

    fn color(&self, expr: &ColorExpr, frame: &Frame) -> EResult<Color> {
        match expr {
            ColorExpr::Lit(c) => Ok(*c),
            ColorExpr::Param(name) => match self.lookup(frame, name)? {
                Value::Color(c) => Ok(c),
                _ => Err(EvalError::Invalid(format!("`{name}` is not a color"))),
            },
        }
    }

    /// A literal `(c, r)` moved by the current shift.
    fn literal(&self, column: i64, row: i64, shift: Cube) -> Cube {
        Cube::from_offset(column, row) + shift
    }

    fn pos(&self, expr: &PosExpr, frame: &Frame, shift: Cube) -> EResult<Cube> {
        let base = match &expr.base {
            PosBase::Lit(c, r) => self.literal(self.int(c, frame)?, self.int(r, frame)?, shift),
            PosBase::Param(name) => match self.lookup(frame, name)? {
                Value::Pos(p) => p + (shift - frame.base),
                _ => return Err(EvalError::Invalid(format!("`{name}` is not a position"))),
            },
        };
        Ok(match expr.shift {
            Some(d) => offset_step(base, d, 1),
            None => base,
        })
    }

    fn region(&self, region: &Region, frame: &Frame, shift: Cube) -> EResult<BTreeSet<Position>> {
        Ok(match region {
            Region::Tile(p) => on_board([self.pos(p, frame, shift)?]),
            Region::Line {
                start,
                direction,
                length,
            } => {
                let start = self.pos(start, frame, shift)?;
                let step = direction.cube();
                match length {
                    LineLength::Count(n) => {
                        let n = self.int(n, frame)?;
                        on_board((0..n.max(0)).map(|i| start + step.scale(i)))
                    }
                    LineLength::ToEdge => {
                        let mut tiles = BTreeSet::new();
                        let mut at = start;
                        while let Some(p) = at.to_position() {
                            tiles.insert(p);
                            at = at + step;
                        }
                        tiles
                    }
                }
            }
            Region::Flower(p) | Region::Neighbors(p) => {
                let center = self.pos(p, frame, shift)?;
                let ring = crate::hexboard::Direction::ALL.iter().map(|d| center + d.cube());
                if matches!(region, Region::Flower(_)) {
                    on_board(ring.chain([center]))
                } else {
                    on_board(ring)
                }
            }
            Region::Column { column, rows } => {
                let column = self.int(column, frame)?;
                let (from, to) = match rows {
                    Some((a, b)) => (self.int(a, frame)?, self.int(b, frame)?),
                    None => (1, crate::hexboard::ROWS as i64),
                };
                let (from, to) = (from.min(to), from.max(to));
                on_board((from..=to).map(|r| self.literal(column, r, shift)))
            }
            Region::Row { row, columns } => {
                let row = self.int(row, frame)?;
                let (from, to) = match columns {
                    Some((a, b)) => (self.int(a, frame)?, self.int(b, frame)?),
                    None => (1, crate::hexboard::COLUMNS as i64),
                };
                let (from, to) = (from.min(to), from.max(to));
                on_board((from..=to).map(|c| self.literal(c, row, shift)))
            }
            Region::List(items) => {
                let mut cells = Vec::with_capacity(items.len());
                for p in items {
                    cells.push(self.pos(p, frame, shift)?);
                }
                on_board(cells)
            }
            Region::Object(name) => {
                let object = self
                    .program
                    .objects
                    .iter()
                    .find(|o| &o.name == name)
                    .ok_or_else(|| EvalError::UnknownObject(name.clone()))?;
                self.region(&object.region, &Frame::top(), shift)?
            }
            Region::All => Position::all().collect(),
        })
    }

    fn condition(&self, cond: &Condition, at: Position, frame: &Frame) -> EResult<bool> {
        let tile = self.board.get(at);
        Ok(match cond {
            Condition::Painted => !tile.is_blank(),
            Condition::Blank => tile.is_blank(),
            Condition::Edge => at.is_edge(),
            Condition::ColorIs(c) => tile == self.color(c, frame)?,
            Condition::UntilColor(c) => tile != self.color(c, frame)?,
            Condition::EvenColumn => at.column().is_multiple_of(2),
            Condition::OddColumn => at.column() % 2 == 1,
            Condition::EvenRow => at.row().is_multiple_of(2),
            Condition::OddRow => at.row() % 2 == 1,
            Condition::Not(inner) => !self.condition(inner, at, frame)?,
            Condition::And(l, r) => self.condition(l, at, frame)? && self.condition(r, at, frame)?,
            Condition::Or(l, r) => self.condition(l, at, frame)? || self.condition(r, at, frame)?,
        })
    }

    fn assign(&mut self, at: Position, color: Color) -> EResult<()> {
        self.assignments += 1;
        if self.assignments > MAX_ASSIGNMENTS {
            return Err(EvalError::BudgetExceeded { limit: MAX_ASSIGNMENTS });
        }
        self.board.set(at, color);
        self.actions.assign(at, color);
        Ok(())
    }

    /// Writes `(target, color)` pairs computed from one snapshot, skipping
    /// tiles that already hold the color.
    fn write_all(&mut self, writes: Vec<(Position, Color)>) -> EResult<()> {
        for (at, color) in writes {
            if self.board.get(at) != color {
                self.assign(at, color)?;
            }
        }
        Ok(())
    }

    fn axis(&self, axis: &Axis, frame: &Frame, shift: Cube) -> EResult<AxisSpec> {
        let spec = match axis {
            Axis::VerticalMidline => AxisSpec::VerticalMidline,
            Axis::HorizontalMidline => AxisSpec::HorizontalMidline,
            Axis::Column(k) => {
                let k = self.int(k, frame)?;
                AxisSpec::Column(self.literal(k, 1, shift).to_offset().0)
            }
            Axis::Rising(p) | Axis::Falling(p) => {
                let at = self.pos(p, frame, shift)?;
                let at = at.to_position().ok_or_else(|| {
                    EvalError::InvalidAxis(format!("axis tile {:?} is off the board", at.to_offset()))
                })?;
                if matches!(axis, Axis::Rising(_)) {
                    AxisSpec::Rising(at)
                } else {
                    AxisSpec::Falling(at)
                }
            }
        };
        spec.validate().map_err(|e| EvalError::InvalidAxis(e.to_string()))
    }

    fn block(&mut self, body: &[Statement], frame: &Frame, shift: Cube) -> EResult<()> {
        body.iter().try_for_each(|stmt| self.exec(stmt, frame, shift))
    }

    fn exec(&mut self, stmt: &Statement, frame: &Frame, shift: Cube) -> EResult<()> {
        match stmt {
            Statement::Paint { region, color, filter } => {
                let tiles = self.region(region, frame, shift)?;
                if tiles.is_empty() {
                    return Err(self.empty_region());
                }
                let color = self.color(color, frame)?;
                let mut selected = Vec::with_capacity(tiles.len());
                for at in tiles {
                    let keep = match filter {
                        Some(cond) => self.condition(cond, at, frame)?,
                        None => true,
                    };
                    if keep {
                        selected.push(at);
                    }
                }
                for at in selected {
                    self.assign(at, color)?;
                }
                Ok(())
            }
            Statement::Repeat {
                count,
                offset,
                anchor,
                body,
            } => {
                let count = self.int(count, frame)?;
                if count < 1 {
                    return Err(EvalError::Invalid(format!("repeat count {count} is not positive")));
                }
                let anchor = match anchor.as_ref().or_else(|| first_position(body)) {
                    Some(p) => self.pos(p, frame, shift)?,
                    None => self.literal(1, 1, shift),
                };
                for i in 0..count {
                    let moved = offset_step(anchor, *offset, i) - anchor;
                    self.block(body, frame, shift + moved)?;
                }
                Ok(())
            }
            Statement::While {
                condition,
                at,
                offset,
                body,
            } => {
                if offset.is_zero() {
                    return Err(EvalError::Invalid("while needs a non-zero offset".into()));
                }
                let start = self.pos(at, frame, shift)?;
                let mut cursor = start;
                while let Some(p) = cursor.to_position() {
                    if !self.condition(condition, p, frame)? {
                        break;
                    }
                    self.block(body, frame, shift + (cursor - start))?;
                    cursor = offset_step(cursor, *offset, 1);
                }
                Ok(())
            }
            Statement::If {
                condition,
                at,
                then_body,
                else_body,
            } => {
                let holds = match self.pos(at, frame, shift)?.to_position() {
                    Some(p) => self.condition(condition, p, frame)?,
                    None => false,
                };
                if holds {
                    self.block(then_body, frame, shift)
                } else if let Some(body) = else_body {
                    self.block(body, frame, shift)
                } else {
                    Ok(())
                }
            }
            Statement::Call { name, args } => self.enter(name, args, frame, shift, 1),
            Statement::Recurse { depth, name, args } => {
                if frame.definition.as_deref() != Some(name.as_str()) {
                    return Err(EvalError::Invalid(format!("`recurse {name}` outside its definition")));
                }
                if frame.level < *depth {
                    self.enter(name, args, frame, shift, frame.level + 1)
                } else {
                    Ok(())
                }
            }
            Statement::Reflect { region, axis } => {
                let axis = self.axis(axis, frame, shift)?;
                let tiles = self.region(region, frame, shift)?;
                if tiles.is_empty() {
                    return Err(self.empty_region());
                }
                let pairs: BTreeSet<(Position, Position)> = tiles
                    .iter()
                    .filter_map(|&p| axis.image(p).map(|m| (p.min(m), p.max(m))))
                    .collect();
                let mut writes = Vec::new();
                for (a, b) in pairs {
                    writes.push((a, self.board.get(b)));
                    writes.push((b, self.board.get(a)));
                }
                self.write_all(writes)
            }
            Statement::Mirror { region, axis } => {
                let axis = self.axis(axis, frame, shift)?;
                let tiles = self.region(region, frame, shift)?;
                if tiles.is_empty() {
                    return Err(self.empty_region());
                }
                let writes = self.copies(&tiles, |p| axis.image(p));
                self.write_all(writes)
            }
            Statement::Rotate { region, center, sixths } => {
                let center = self.pos(center, frame, shift)?;
                let center = center.to_position().ok_or_else(|| {
                    EvalError::Invalid(format!("rotation center {:?} is off the board", center.to_offset()))
                })?;
                let sixths = self.int(sixths, frame)?;
                if !(1..=5).contains(&sixths) {
                    return Err(EvalError::Invalid(format!("rotation by {sixths} sixths")));
                }
                let tiles = self.region(region, frame, shift)?;
                if tiles.is_empty() {
                    return Err(self.empty_region());
                }
                let writes = self.copies(&tiles, |p| rotate_position(p, center, sixths));
                self.write_all(writes)
            }
        }
    }

    /// Painted tiles of `tiles` copied to their images.
    fn copies(
        &self,
        tiles: &BTreeSet<Position>,
        image: impl Fn(Position) -> Option<Position>,
    ) -> Vec<(Position, Color)> {
        tiles
            .iter()
            .filter(|&&p| !self.board.get(p).is_blank())
            .filter_map(|&p| image(p).map(|m| (m, self.board.get(p))))
            .collect()
    }

    fn enter(&mut self, name: &str, args: &[Arg], frame: &Frame, shift: Cube, level: u32) -> EResult<()> {
        let program = self.program;
        let def = program
            .definitions
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| EvalError::UnknownDefinition(name.to_string()))?;
        if def.params.len() != args.len() {
            return Err(EvalError::Invalid(format!(
                "`{name}` takes {} argument(s), got {}",
                def.params.len(),
                args.len()
            )));
        }
        let mut values = HashMap::with_capacity(args.len());
        for (param, arg) in def.params.iter().zip(args) {
            let value = match (param.ty, arg) {
                (ParamType::Int, Arg::Int(e)) => Value::Int(self.int(e, frame)?),
                (ParamType::Pos, Arg::Pos(e)) => Value::Pos(self.pos(e, frame, shift)?),
                (ParamType::Color, Arg::Color(e)) => Value::Color(self.color(e, frame)?),
                _ => {
                    return Err(EvalError::Invalid(format!(
                        "argument `{}` of `{name}` must be a {}",
                        param.name,
                        param.ty.keyword()
                    )))
                }
            };
            values.insert(param.name.clone(), value);
        }
        if self.nesting >= MAX_NESTING {
            return Err(EvalError::DepthExceeded { limit: MAX_NESTING });
        }
        let inner = Frame {
            values,
            base: shift,
            definition: Some(def.name.clone()),
            level,
        };
        self.nesting += 1;
        let result = self.block(&def.body, &inner, shift);
        self.nesting -= 1;
        result
    }
}
