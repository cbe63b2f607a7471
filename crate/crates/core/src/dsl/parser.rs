//! Recursive-descent parser; one token of lookahead. The grammar is in
//! `docs/dsl.md`.

use super::ast::*;
use super::lexer::{lex, Spanned, Tok};
use crate::hexboard::{Color, Direction};
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { found: String, expected: Vec<String> },
    UnknownColor(String),
    UnknownDefinition(String),
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn syntax(line: usize, column: usize, found: String, expected: Vec<String>) -> ParseError {
        ParseError {
            line,
            column,
            kind: ParseErrorKind::Syntax { found, expected },
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax { found, expected } => {
                write!(f, "unexpected {found}, expected {}", expected.join(" or "))
            }
            ParseErrorKind::UnknownColor(c) => write!(f, "unknown color `{c}`"),
            ParseErrorKind::UnknownDefinition(n) => write!(f, "unknown name `{n}`"),
            ParseErrorKind::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for ParseError {}

const RESERVED: &[&str] = &[
    "paint",
    "repeat",
    "while",
    "if",
    "else",
    "call",
    "reflect",
    "mirror",
    "rotate",
    "recurse",
    "define",
    "object",
    "offset",
    "from",
    "at",
    "where",
    "axis",
    "about",
    "by",
    "flower",
    "neighbors",
    "line",
    "column",
    "row",
    "all",
    "to-edge",
    "painted",
    "blank",
    "edge",
    "color",
    "until-color",
    "even-column",
    "odd-column",
    "even-row",
    "odd-row",
    "not",
    "and",
    "or",
    "vertical-midline",
    "horizontal-midline",
    "rising",
    "falling",
    "pos",
    "int",
    "columns",
    "rows",
    "cols",
    "col",
];

fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name) || Color::from_name(name).is_some() || Direction::from_name(name).is_some()
}

pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let mut parser = Parser {
        toks: lex(source)?,
        pos: 0,
        signatures: HashMap::new(),
        objects: HashSet::new(),
        scope: None,
    };
    parser.program()
}

struct Scope {
    definition: String,
    params: HashMap<String, ParamType>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    signatures: HashMap<String, Vec<ParamType>>,
    objects: HashSet<String>,
    scope: Option<Scope>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, kind }
    }

    fn expected(&self, expected: &[&str]) -> ParseError {
        let (line, column) = self.here();
        ParseError::syntax(
            line,
            column,
            self.peek().describe(),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn invalid(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Invalid(msg.into()))
    }

    fn at_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.expected(&[&format!("`{c}`")]))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.expected(&[&format!("`{w}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.expected(&[what])),
        }
    }

    fn fresh_name(&mut self, what: &str) -> PResult<String> {
        let name = self.ident(what)?;
        if is_reserved(&name) {
            self.pos -= 1;
            return Err(self.invalid(format!("`{name}` is a reserved word")));
        }
        Ok(name)
    }

    fn uint(&mut self, what: &str) -> PResult<i64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.expected(&[what])),
        }
    }

    fn param_type(&self, name: &str) -> Option<ParamType> {
        self.scope.as_ref().and_then(|s| s.params.get(name).copied())
    }

    fn skip_separators(&mut self) {
        while self.eat_sym(';') {}
    }

    fn program(&mut self) -> PResult<Program> {
        let mut program = Program::default();
        loop {
            self.skip_separators();
            if *self.peek() == Tok::Eof {
                return Ok(program);
            }
            if self.at_word("define") {
                program.definitions.push(self.definition()?);
            } else if self.at_word("object") {
                program.objects.push(self.object()?);
            } else {
                program.statements.push(self.statement()?);
            }
        }
    }

    fn taken(&self, name: &str) -> bool {
        self.signatures.contains_key(name) || self.objects.contains(name)
    }

    fn object(&mut self) -> PResult<ObjectDef> {
        self.expect_word("object")?;
        let name = self.fresh_name("an object name")?;
        if self.taken(&name) {
            self.pos -= 1;
            return Err(self.invalid(format!("`{name}` is already defined")));
        }
        self.expect_sym('=')?;
        let region = self.region()?;
        self.objects.insert(name.clone());
        Ok(ObjectDef { name, region })
    }

    fn definition(&mut self) -> PResult<Definition> {
        self.expect_word("define")?;
        let name = self.fresh_name("a definition name")?;
        if self.taken(&name) {
            self.pos -= 1;
            return Err(self.invalid(format!("`{name}` is already defined")));
        }
        self.expect_sym('(')?;
        let mut params: Vec<Param> = Vec::new();
        if !self.at_sym(')') {
            loop {
                let pname = self.fresh_name("a parameter name")?;
                if params.iter().any(|p| p.name == pname) || self.taken(&pname) || pname == name {
                    self.pos -= 1;
                    return Err(self.invalid(format!("parameter `{pname}` clashes with another name")));
                }
                self.expect_sym(':')?;
                let ty = match self.peek() {
                    Tok::Ident(s) if s == "pos" => ParamType::Pos,
                    Tok::Ident(s) if s == "color" => ParamType::Color,
                    Tok::Ident(s) if s == "int" => ParamType::Int,
                    _ => return Err(self.expected(&["`pos`", "`color`", "`int`"])),
                };
                self.advance();
                params.push(Param { name: pname, ty });
                if !self.eat_sym(',') {
                    break;
                }
            }
        }
        self.expect_sym(')')?;
        self.signatures
            .insert(name.clone(), params.iter().map(|p| p.ty).collect());
        self.scope = Some(Scope {
            definition: name.clone(),
            params: params.iter().map(|p| (p.name.clone(), p.ty)).collect(),
        });
        let body = self.block();
        self.scope = None;
        Ok(Definition {
            name,
            params,
            body: body?,
        })
    }

    fn block(&mut self) -> PResult<Vec<Statement>> {
        self.expect_sym('{')?;
        let mut body = Vec::new();
        loop {
            self.skip_separators();
            if self.eat_sym('}') {
                return Ok(body);
            }
            body.push(self.statement()?);
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let keyword = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.expected(&["a statement"])),
        };
        match keyword.as_str() {
            "paint" => {
                self.advance();
                let region = self.region()?;
                let color = self.color()?;
                let filter = if self.eat_word("where") {
                    Some(self.condition()?)
                } else {
                    None
                };
                Ok(Statement::Paint { region, color, filter })
            }
            "repeat" => {
                self.advance();
                let count = self.int_expr()?;
                if let IntExpr::Lit(n) = count {
                    if n < 1 {
                        return Err(self.invalid("repeat count must be at least 1"));
                    }
                }
                self.expect_word("offset")?;
                let offset = self.delta()?;
                let anchor = if self.eat_word("from") {
                    Some(self.pos_expr()?)
                } else {
                    None
                };
                let body = self.block()?;
                Ok(Statement::Repeat {
                    count,
                    offset,
                    anchor,
                    body,
                })
            }
            "while" => {
                self.advance();
                let condition = self.condition()?;
                self.expect_word("at")?;
                let at = self.pos_expr()?;
                self.expect_word("offset")?;
                let offset = self.delta()?;
                if offset.is_zero() {
                    return Err(self.invalid("while needs a non-zero offset"));
                }
                let body = self.block()?;
                Ok(Statement::While {
                    condition,
                    at,
                    offset,
                    body,
                })
            }
            "if" => {
                self.advance();
                let condition = self.condition()?;
                self.expect_word("at")?;
                let at = self.pos_expr()?;
                let then_body = self.block()?;
                let else_body = if self.eat_word("else") {
                    Some(self.block()?)
                } else {
                    None
                };
                Ok(Statement::If {
                    condition,
                    at,
                    then_body,
                    else_body,
                })
            }
            "call" => {
                self.advance();
                let name = self.ident("a definition name")?;
                if self.scope.as_ref().is_some_and(|s| s.definition == name) {
                    self.pos -= 1;
                    return Err(self.invalid(format!("`{name}` calls itself; use `recurse <depth> {name}(...)`")));
                }
                let args = self.args(&name)?;
                Ok(Statement::Call { name, args })
            }
            "reflect" | "mirror" => {
                self.advance();
                let region = self.region()?;
                self.expect_word("axis")?;
                let axis = self.axis()?;
                Ok(if keyword == "reflect" {
                    Statement::Reflect { region, axis }
                } else {
                    Statement::Mirror { region, axis }
                })
            }
            "rotate" => {
                self.advance();
                let region = self.region()?;
                self.expect_word("about")?;
                let center = self.pos_expr()?;
                self.expect_word("by")?;
                let sixths = self.int_expr()?;
                if let IntExpr::Lit(k) = sixths {
                    if !(1..=5).contains(&k) {
                        return Err(self.invalid("rotation must be 1 to 5 sixths of a turn"));
                    }
                }
                Ok(Statement::Rotate { region, center, sixths })
            }
            "recurse" => {
                self.advance();
                let depth = self.uint("a depth bound")?;
                if depth < 1 || depth > u32::MAX as i64 {
                    return Err(self.invalid("recursion depth bound must be at least 1"));
                }
                let name = self.ident("a definition name")?;
                match &self.scope {
                    Some(s) if s.definition == name => {}
                    _ => {
                        self.pos -= 1;
                        return Err(self.invalid(format!(
                            "`recurse` may only re-enter the enclosing definition, not `{name}`"
                        )));
                    }
                }
                let args = self.args(&name)?;
                Ok(Statement::Recurse {
                    depth: depth as u32,
                    name,
                    args,
                })
            }
            "define" | "object" => Err(self.invalid(format!("`{keyword}` is only allowed at the top level"))),
            _ => Err(self.expected(&["a statement"])),
        }
    }

    fn args(&mut self, name: &str) -> PResult<Vec<Arg>> {
        let Some(signature) = self.signatures.get(name).cloned() else {
            self.pos -= 1;
            return Err(self.error(ParseErrorKind::UnknownDefinition(name.to_string())));
        };
        self.expect_sym('(')?;
        let mut args = Vec::with_capacity(signature.len());
        for (i, ty) in signature.iter().enumerate() {
            if i > 0 {
                self.expect_sym(',')?;
            }
            args.push(match ty {
                ParamType::Pos => Arg::Pos(self.pos_expr()?),
                ParamType::Color => Arg::Color(self.color()?),
                ParamType::Int => Arg::Int(self.int_expr()?),
            });
        }
        if !self.at_sym(')') {
            return Err(self.invalid(format!("`{name}` takes {} argument(s)", signature.len())));
        }
        self.advance();
        Ok(args)
    }

    fn int_expr(&mut self) -> PResult<IntExpr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(IntExpr::Lit(n))
            }
            Tok::Ident(name) => {
                match self.param_type(&name) {
                    Some(ParamType::Int) => {}
                    Some(_) => return Err(self.invalid(format!("`{name}` is not an int parameter"))),
                    None if is_reserved(&name) => return Err(self.expected(&["a number"])),
                    None => return Err(self.error(ParseErrorKind::UnknownDefinition(name))),
                }
                self.advance();
                let sign = if self.eat_sym('+') {
                    1
                } else if self.eat_sym('-') {
                    -1
                } else {
                    return Ok(IntExpr::Param(name));
                };
                Ok(IntExpr::Offset(name, sign * self.uint("a number")?))
            }
            _ => Err(self.expected(&["a number"])),
        }
    }

    fn color(&mut self) -> PResult<ColorExpr> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if let Some(c) = Color::from_name(&name) {
                    self.advance();
                    return Ok(ColorExpr::Lit(c));
                }
                match self.param_type(&name) {
                    Some(ParamType::Color) => {
                        self.advance();
                        Ok(ColorExpr::Param(name))
                    }
                    Some(_) => Err(self.invalid(format!("`{name}` is not a color parameter"))),
                    None => Err(self.error(ParseErrorKind::UnknownColor(name))),
                }
            }
            _ => Err(self.expected(&["a color"])),
        }
    }

    fn signed(&mut self) -> PResult<i64> {
        let sign = if self.eat_sym('-') {
            -1
        } else {
            self.eat_sym('+');
            1
        };
        Ok(sign * self.uint("a number")?)
    }

    /// `(dc, dr)`, `(+3 columns)`, `(-1 rows, +2 columns)`.
    fn delta(&mut self) -> PResult<Delta> {
        self.expect_sym('(')?;
        let mut delta = Delta::default();
        let mut seen = [false; 2];
        for slot in 0..2 {
            if slot == 1 && !self.eat_sym(',') {
                break;
            }
            let value = self.signed()?;
            let axis = match self.peek() {
                Tok::Ident(s) if matches!(s.as_str(), "columns" | "column" | "cols" | "col") => 0,
                Tok::Ident(s) if matches!(s.as_str(), "rows" | "row") => 1,
                _ => slot,
            };
            if matches!(self.peek(), Tok::Ident(_)) {
                self.advance();
            }
            if seen[axis] {
                return Err(self.invalid("offset names the same axis twice"));
            }
            seen[axis] = true;
            if axis == 0 {
                delta.columns = value;
            } else {
                delta.rows = value;
            }
        }
        self.expect_sym(')')?;
        Ok(delta)
    }

    fn pos_expr(&mut self) -> PResult<PosExpr> {
        let base = match self.peek().clone() {
            Tok::Sym('(') => {
                self.advance();
                let column = self.int_expr()?;
                self.expect_sym(',')?;
                let row = self.int_expr()?;
                self.expect_sym(')')?;
                PosBase::Lit(column, row)
            }
            Tok::Ident(name) => match self.param_type(&name) {
                Some(ParamType::Pos) => {
                    self.advance();
                    PosBase::Param(name)
                }
                Some(_) => return Err(self.invalid(format!("`{name}` is not a pos parameter"))),
                None if is_reserved(&name) => return Err(self.expected(&["a position"])),
                None => return Err(self.error(ParseErrorKind::UnknownDefinition(name))),
            },
            _ => return Err(self.expected(&["a position"])),
        };
        let shift = if self.eat_sym('+') { Some(self.delta()?) } else { None };
        Ok(PosExpr { base, shift })
    }

    /// The argument of `flower(...)`/`neighbors(...)`: either `c, r` or a
    /// position expression.
    fn center_arg(&mut self) -> PResult<PosExpr> {
        let bare_pair = match self.peek() {
            Tok::Int(_) => true,
            Tok::Ident(name) => self.param_type(name) == Some(ParamType::Int),
            _ => false,
        };
        if bare_pair {
            let column = self.int_expr()?;
            self.expect_sym(',')?;
            let row = self.int_expr()?;
            Ok(PosExpr {
                base: PosBase::Lit(column, row),
                shift: None,
            })
        } else {
            self.pos_expr()
        }
    }

    fn int_range(&mut self) -> PResult<Option<(IntExpr, IntExpr)>> {
        if self.eat_sym(',') {
            let from = self.int_expr()?;
            self.expect_sym(',')?;
            let to = self.int_expr()?;
            Ok(Some((from, to)))
        } else {
            Ok(None)
        }
    }

    fn region(&mut self) -> PResult<Region> {
        match self.peek().clone() {
            Tok::Sym('(') => Ok(Region::Tile(self.pos_expr()?)),
            Tok::Sym('[') => {
                self.advance();
                let mut tiles = Vec::new();
                if !self.at_sym(']') {
                    loop {
                        tiles.push(self.pos_expr()?);
                        if !self.eat_sym(',') {
                            break;
                        }
                    }
                }
                self.expect_sym(']')?;
                Ok(Region::List(tiles))
            }
            Tok::Ident(word) => {
                let is_call = *self.peek_at(1) == Tok::Sym('(');
                match word.as_str() {
                    "flower" | "neighbors" if is_call => {
                        self.advance();
                        self.advance();
                        let center = self.center_arg()?;
                        self.expect_sym(')')?;
                        Ok(if word == "flower" {
                            Region::Flower(center)
                        } else {
                            Region::Neighbors(center)
                        })
                    }
                    "line" if is_call => {
                        self.advance();
                        self.advance();
                        let start = self.pos_expr()?;
                        self.expect_sym(',')?;
                        let dname = self.ident("a direction")?;
                        let direction = Direction::from_name(&dname).ok_or_else(|| {
                            self.pos -= 1;
                            self.expected(&["up", "down", "up-right", "down-right", "up-left", "down-left"])
                        })?;
                        self.expect_sym(',')?;
                        let length = if self.eat_word("to-edge") {
                            LineLength::ToEdge
                        } else {
                            LineLength::Count(self.int_expr()?)
                        };
                        self.expect_sym(')')?;
                        Ok(Region::Line {
                            start,
                            direction,
                            length,
                        })
                    }
                    "column" if is_call => {
                        self.advance();
                        self.advance();
                        let column = self.int_expr()?;
                        let rows = self.int_range()?;
                        self.expect_sym(')')?;
                        Ok(Region::Column { column, rows })
                    }
                    "row" if is_call => {
                        self.advance();
                        self.advance();
                        let row = self.int_expr()?;
                        let columns = self.int_range()?;
                        self.expect_sym(')')?;
                        Ok(Region::Row { row, columns })
                    }
                    "all" => {
                        self.advance();
                        Ok(Region::All)
                    }
                    name if self.param_type(name) == Some(ParamType::Pos) => Ok(Region::Tile(self.pos_expr()?)),
                    name if self.objects.contains(name) => {
                        self.advance();
                        Ok(Region::Object(word))
                    }
                    name if is_reserved(name) => Err(self.expected(&["a region"])),
                    _ => Err(self.error(ParseErrorKind::UnknownDefinition(word))),
                }
            }
            _ => Err(self.expected(&["a region"])),
        }
    }

    fn axis(&mut self) -> PResult<Axis> {
        let word = self.ident("an axis")?;
        match word.as_str() {
            "vertical-midline" => Ok(Axis::VerticalMidline),
            "horizontal-midline" => Ok(Axis::HorizontalMidline),
            "column" => Ok(Axis::Column(self.int_expr()?)),
            "rising" => Ok(Axis::Rising(self.pos_expr()?)),
            "falling" => Ok(Axis::Falling(self.pos_expr()?)),
            _ => {
                self.pos -= 1;
                Err(self.expected(&[
                    "vertical-midline",
                    "horizontal-midline",
                    "column <n>",
                    "rising <pos>",
                    "falling <pos>",
                ]))
            }
        }
    }

    fn condition(&mut self) -> PResult<Condition> {
        let mut left = self.and_condition()?;
        while self.eat_word("or") {
            let right = self.and_condition()?;
            left = Condition::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_condition(&mut self) -> PResult<Condition> {
        let mut left = self.not_condition()?;
        while self.eat_word("and") {
            let right = self.not_condition()?;
            left = Condition::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn not_condition(&mut self) -> PResult<Condition> {
        if self.eat_word("not") {
            Ok(Condition::Not(Box::new(self.not_condition()?)))
        } else {
            self.atom_condition()
        }
    }

    fn atom_condition(&mut self) -> PResult<Condition> {
        if self.eat_sym('(') {
            let inner = self.condition()?;
            self.expect_sym(')')?;
            return Ok(inner);
        }
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.expected(&["a condition"])),
        };
        let simple = match word.as_str() {
            "painted" => Some(Condition::Painted),
            "blank" => Some(Condition::Blank),
            "edge" => Some(Condition::Edge),
            "even-column" => Some(Condition::EvenColumn),
            "odd-column" => Some(Condition::OddColumn),
            "even-row" => Some(Condition::EvenRow),
            "odd-row" => Some(Condition::OddRow),
            _ => None,
        };
        if let Some(c) = simple {
            self.advance();
            return Ok(c);
        }
        match word.as_str() {
            "color" => {
                self.advance();
                Ok(Condition::ColorIs(self.color()?))
            }
            "until-color" => {
                self.advance();
                Ok(Condition::UntilColor(self.color()?))
            }
            _ => Err(self.expected(&["a condition"])),
        }
    }
}
