use crate::hexboard::{Color, Direction};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub objects: Vec<ObjectDef>,
    pub definitions: Vec<Definition>,
    pub statements: Vec<Statement>,
}

/// `object name = region`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDef {
    pub name: String,
    pub region: Region,
}

/// `define name(params) { body }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: ParamType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamType {
    Pos,
    Color,
    Int,
}

impl ParamType {
    pub fn keyword(self) -> &'static str {
        match self {
            ParamType::Pos => "pos",
            ParamType::Color => "color",
            ParamType::Int => "int",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntExpr {
    Lit(i64),
    Param(String),
    /// `param + k` or `param - k`.
    Offset(String, i64),
}

/// A column/row displacement in offset coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Delta {
    pub columns: i64,
    pub rows: i64,
}

impl Delta {
    pub fn new(columns: i64, rows: i64) -> Delta {
        Delta { columns, rows }
    }

    pub fn is_zero(self) -> bool {
        self.columns == 0 && self.rows == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosBase {
    Lit(IntExpr, IntExpr),
    Param(String),
}

/// A tile reference, optionally shifted: `(2, 3)`, `p`, `p + (+1, +0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosExpr {
    pub base: PosBase,
    pub shift: Option<Delta>,
}

impl PosExpr {
    pub fn lit(column: i64, row: i64) -> PosExpr {
        PosExpr {
            base: PosBase::Lit(IntExpr::Lit(column), IntExpr::Lit(row)),
            shift: None,
        }
    }

    pub fn param(name: &str) -> PosExpr {
        PosExpr {
            base: PosBase::Param(name.to_string()),
            shift: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColorExpr {
    Lit(Color),
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineLength {
    Count(IntExpr),
    /// Continue until the next tile would leave the board.
    ToEdge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Tile(PosExpr),
    Line {
        start: PosExpr,
        direction: Direction,
        length: LineLength,
    },
    /// A center tile plus its neighbors.
    Flower(PosExpr),
    /// The neighbors without the center.
    Neighbors(PosExpr),
    /// A whole column, or rows `from..=to` of it.
    Column {
        column: IntExpr,
        rows: Option<(IntExpr, IntExpr)>,
    },
    /// A whole row, or columns `from..=to` of it.
    Row {
        row: IntExpr,
        columns: Option<(IntExpr, IntExpr)>,
    },
    List(Vec<PosExpr>),
    Object(String),
    All,
}

/// A predicate over one tile of the current board.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Painted,
    Blank,
    Edge,
    ColorIs(ColorExpr),
    /// Holds until the tile has the given color.
    UntilColor(ColorExpr),
    EvenColumn,
    OddColumn,
    EvenRow,
    OddRow,
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Axis {
    /// Between columns 9 and 10.
    VerticalMidline,
    /// Through the centers of row 5 in odd columns.
    HorizontalMidline,
    /// Vertical, through the centers of one column.
    Column(IntExpr),
    /// Up-right/down-left, through a tile center.
    Rising(PosExpr),
    /// Down-right/up-left, through a tile center.
    Falling(PosExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Int(IntExpr),
    Pos(PosExpr),
    Color(ColorExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    /// `paint region color [where cond]`
    Paint {
        region: Region,
        color: ColorExpr,
        filter: Option<Condition>,
    },
    /// `repeat n offset delta [from pos] { body }`
    Repeat {
        count: IntExpr,
        offset: Delta,
        anchor: Option<PosExpr>,
        body: Vec<Statement>,
    },
    /// `while cond at pos offset delta { body }`
    While {
        condition: Condition,
        at: PosExpr,
        offset: Delta,
        body: Vec<Statement>,
    },
    /// `if cond at pos { then } [else { else }]`
    If {
        condition: Condition,
        at: PosExpr,
        then_body: Vec<Statement>,
        else_body: Option<Vec<Statement>>,
    },
    /// `call name(args)`
    Call { name: String, args: Vec<Arg> },
    /// `reflect region axis a`: swaps colors across the axis.
    Reflect { region: Region, axis: Axis },
    /// `mirror region axis a`: copies colors across the axis.
    Mirror { region: Region, axis: Axis },
    /// `rotate region about pos by k`: copies colors turned k sixths clockwise.
    Rotate {
        region: Region,
        center: PosExpr,
        sixths: IntExpr,
    },
    /// `recurse depth name(args)`: self-call while nesting stays within depth.
    Recurse { depth: u32, name: String, args: Vec<Arg> },
}
