//! Canonical pretty-printer. Objects come first, then definitions, then
//! statements, so printing a parsed program and parsing it again yields the
//! same tree.

use super::ast::*;
use std::fmt::Write;

const INDENT: &str = "  ";

pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for object in &program.objects {
        let _ = writeln!(out, "object {} = {}", object.name, region(&object.region));
    }
    for def in &program.definitions {
        let params: Vec<String> = def
            .params
            .iter()
            .map(|p| format!("{}: {}", p.name, p.ty.keyword()))
            .collect();
        let _ = writeln!(
            out,
            "define {}({}) {}",
            def.name,
            params.join(", "),
            block(&def.body, 0)
        );
    }
    for stmt in &program.statements {
        out.push_str(&statement(stmt, 0));
        out.push('\n');
    }
    out
}

/// One statement at the top level, without a trailing newline.
pub fn print_statement(stmt: &Statement) -> String {
    statement(stmt, 0)
}

fn statement(stmt: &Statement, depth: usize) -> String {
    match stmt {
        Statement::Paint {
            region: r,
            color: c,
            filter,
        } => {
            let mut s = format!("paint {} {}", region(r), color(c));
            if let Some(f) = filter {
                let _ = write!(s, " where {}", condition(f, 0));
            }
            s
        }
        Statement::Repeat {
            count,
            offset,
            anchor,
            body,
        } => {
            let mut s = format!("repeat {} offset {}", int(count), delta(*offset));
            if let Some(a) = anchor {
                let _ = write!(s, " from {}", pos(a));
            }
            let _ = write!(s, " {}", block(body, depth));
            s
        }
        Statement::While {
            condition: c,
            at,
            offset,
            body,
        } => format!(
            "while {} at {} offset {} {}",
            condition(c, 0),
            pos(at),
            delta(*offset),
            block(body, depth)
        ),
        Statement::If {
            condition: c,
            at,
            then_body,
            else_body,
        } => {
            let mut s = format!("if {} at {} {}", condition(c, 0), pos(at), block(then_body, depth));
            if let Some(e) = else_body {
                let _ = write!(s, " else {}", block(e, depth));
            }
            s
        }
        Statement::Call { name, args } => format!("call {}({})", name, arguments(args)),
        Statement::Reflect { region: r, axis: a } => format!("reflect {} axis {}", region(r), axis(a)),
        Statement::Mirror { region: r, axis: a } => format!("mirror {} axis {}", region(r), axis(a)),
        Statement::Rotate {
            region: r,
            center,
            sixths,
        } => {
            format!("rotate {} about {} by {}", region(r), pos(center), int(sixths))
        }
        Statement::Recurse { depth: d, name, args } => format!("recurse {} {}({})", d, name, arguments(args)),
    }
}

fn block(body: &[Statement], depth: usize) -> String {
    if body.is_empty() {
        return "{ }".to_string();
    }
    let mut s = String::from("{\n");
    for stmt in body {
        let _ = writeln!(s, "{}{}", INDENT.repeat(depth + 1), statement(stmt, depth + 1));
    }
    s.push_str(&INDENT.repeat(depth));
    s.push('}');
    s
}

fn arguments(args: &[Arg]) -> String {
    args.iter()
        .map(|a| match a {
            Arg::Int(i) => int(i),
            Arg::Pos(p) => pos(p),
            Arg::Color(c) => color(c),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn int(expr: &IntExpr) -> String {
    match expr {
        IntExpr::Lit(n) => n.to_string(),
        IntExpr::Param(name) => name.clone(),
        IntExpr::Offset(name, k) if *k < 0 => format!("{name} - {}", -k),
        IntExpr::Offset(name, k) => format!("{name} + {k}"),
    }
}

fn delta(d: Delta) -> String {
    format!("({:+}, {:+})", d.columns, d.rows)
}

fn pos(p: &PosExpr) -> String {
    let mut s = match &p.base {
        PosBase::Lit(c, r) => format!("({}, {})", int(c), int(r)),
        PosBase::Param(name) => name.clone(),
    };
    if let Some(d) = p.shift {
        let _ = write!(s, " + {}", delta(d));
    }
    s
}

/// `flower(2, 2)` rather than `flower((2, 2))` when the center is a bare pair.
fn center(p: &PosExpr) -> String {
    match (&p.base, p.shift) {
        (PosBase::Lit(c, r), None) => format!("{}, {}", int(c), int(r)),
        _ => pos(p),
    }
}

fn color(c: &ColorExpr) -> String {
    match c {
        ColorExpr::Lit(c) => c.name().to_string(),
        ColorExpr::Param(name) => name.clone(),
    }
}

fn range(bounds: &Option<(IntExpr, IntExpr)>) -> String {
    match bounds {
        Some((a, b)) => format!(", {}, {}", int(a), int(b)),
        None => String::new(),
    }
}

fn region(r: &Region) -> String {
    match r {
        Region::Tile(p) => pos(p),
        Region::Line {
            start,
            direction,
            length,
        } => {
            let len = match length {
                LineLength::Count(n) => int(n),
                LineLength::ToEdge => "to-edge".to_string(),
            };
            format!("line({}, {}, {})", pos(start), direction.name(), len)
        }
        Region::Flower(p) => format!("flower({})", center(p)),
        Region::Neighbors(p) => format!("neighbors({})", center(p)),
        Region::Column { column, rows } => format!("column({}{})", int(column), range(rows)),
        Region::Row { row, columns } => format!("row({}{})", int(row), range(columns)),
        Region::List(items) => format!("[{}]", items.iter().map(pos).collect::<Vec<_>>().join(", ")),
        Region::Object(name) => name.clone(),
        Region::All => "all".to_string(),
    }
}

fn axis(a: &Axis) -> String {
    match a {
        Axis::VerticalMidline => "vertical-midline".to_string(),
        Axis::HorizontalMidline => "horizontal-midline".to_string(),
        Axis::Column(n) => format!("column {}", int(n)),
        Axis::Rising(p) => format!("rising {}", pos(p)),
        Axis::Falling(p) => format!("falling {}", pos(p)),
    }
}

/// Binding strength: `or` 0, `and` 1, `not` 2, atoms 3.
fn condition(c: &Condition, min: u8) -> String {
    let (prec, text) = match c {
        Condition::Or(l, r) => (0, format!("{} or {}", condition(l, 0), condition(r, 1))),
        Condition::And(l, r) => (1, format!("{} and {}", condition(l, 1), condition(r, 2))),
        Condition::Not(inner) => (2, format!("not {}", condition(inner, 2))),
        Condition::Painted => (3, "painted".into()),
        Condition::Blank => (3, "blank".into()),
        Condition::Edge => (3, "edge".into()),
        Condition::ColorIs(col) => (3, format!("color {}", color(col))),
        Condition::UntilColor(col) => (3, format!("until-color {}", color(col))),
        Condition::EvenColumn => (3, "even-column".into()),
        Condition::OddColumn => (3, "odd-column".into()),
        Condition::EvenRow => (3, "even-row".into()),
        Condition::OddRow => (3, "odd-row".into()),
    };
    if prec < min {
        format!("({text})")
    } else {
        text
    }
}
