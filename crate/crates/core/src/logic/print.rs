//! Concrete syntax printer. The output is accepted by [`super::parse`] and
//! re-parses to the same tree.

use super::ast::{Expr, Field};

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const NOT: u8 = 5;
const CMP: u8 = 6;
const UNION: u8 = 7;
const ARITH: u8 = 8;
const ATOM: u8 = 9;

pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write(e, 0, &mut out);
    out
}

pub fn print_field(f: &Field) -> String {
    let mut out = String::new();
    write_field(f, &mut out);
    out
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Iff(..) => IFF,
        Expr::Forall(..) | Expr::Exists(..) => IFF,
        Expr::Implies(..) => IMPLIES,
        Expr::Or(_) => OR,
        Expr::And(_) => AND,
        Expr::Not(inner) => match inner.as_ref() {
            Expr::Eq(..) | Expr::Member(..) => CMP,
            _ => NOT,
        },
        Expr::Eq(..) | Expr::Lt(..) | Expr::Le(..) | Expr::Member(..) => CMP,
        Expr::Union(..) => UNION,
        Expr::Add(..) | Expr::Sub(..) => ARITH,
        Expr::Int(i) if *i < 0 => ARITH,
        _ => ATOM,
    }
}

fn write(e: &Expr, min: u8, out: &mut String) {
    let own = level(e);
    let paren = own < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Bool(true) => out.push_str("true"),
        Expr::Bool(false) => out.push_str("false"),
        Expr::Null => out.push_str("null"),
        Expr::Int(i) => out.push_str(&i.to_string()),
        Expr::Var(n) => out.push_str(n),
        Expr::EmptySet => out.push_str("{}"),
        Expr::App(Field::Named(f), t) => {
            write(t, ATOM, out);
            out.push_str("..");
            out.push_str(f);
        }
        Expr::App(f, t) => {
            write_field(f, out);
            out.push('(');
            write(t, 0, out);
            out.push(')');
        }
        Expr::Reach(f, a, b) => {
            out.push_str("reach ");
            write_field(f, out);
            out.push(' ');
            write(a, ATOM, out);
            out.push(' ');
            write(b, ATOM, out);
        }
        Expr::Add(a, b) => binary(a, " + ", b, ARITH, ATOM, out),
        Expr::Sub(a, b) => binary(a, " - ", b, ARITH, ATOM, out),
        Expr::Eq(a, b) => binary(a, " = ", b, UNION, UNION, out),
        Expr::Lt(a, b) => binary(a, " < ", b, UNION, UNION, out),
        Expr::Le(a, b) => binary(a, " <= ", b, UNION, UNION, out),
        Expr::Member(a, b) => binary(a, " : ", b, UNION, UNION, out),
        Expr::Union(a, b) => binary(a, " Un ", b, UNION, ARITH, out),
        Expr::Not(inner) => match inner.as_ref() {
            Expr::Eq(a, b) => binary(a, " ~= ", b, UNION, UNION, out),
            Expr::Member(a, b) => binary(a, " ~: ", b, UNION, UNION, out),
            other => {
                out.push('~');
                write(other, NOT, out);
            }
        },
        Expr::And(xs) => join(xs, " & ", AND + 1, out),
        Expr::Or(xs) => join(xs, " | ", OR + 1, out),
        Expr::Implies(a, b) => binary(a, " --> ", b, IMPLIES + 1, IMPLIES, out),
        Expr::Iff(a, b) => binary(a, " <-> ", b, IFF + 1, IFF + 1, out),
        Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
            out.push_str(if matches!(e, Expr::Forall(..)) { "ALL" } else { "EX" });
            for v in vs {
                out.push(' ');
                out.push_str(v);
            }
            out.push_str(". ");
            write(body, 0, out);
        }
        Expr::Compr(w, body) => {
            out.push('{');
            out.push_str(w);
            out.push_str(". ");
            write(body, 0, out);
            out.push('}');
        }
        Expr::Singleton(t) => {
            out.push('{');
            write(t, 0, out);
            out.push('}');
        }
    }
    if paren {
        out.push(')');
    }
}

fn binary(a: &Expr, op: &str, b: &Expr, la: u8, lb: u8, out: &mut String) {
    write(a, la, out);
    out.push_str(op);
    write(b, lb, out);
}

fn join(xs: &[Expr], op: &str, min: u8, out: &mut String) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(op);
        }
        write(x, min, out);
    }
}

fn write_field(f: &Field, out: &mut String) {
    match f {
        Field::Named(n) => out.push_str(n),
        Field::Update(inner, a, b) => {
            write_field(inner, out);
            out.push('[');
            write(a, 0, out);
            out.push_str(" := ");
            write(b, 0, out);
            out.push(']');
        }
    }
}
