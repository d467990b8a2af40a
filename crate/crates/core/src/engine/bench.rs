//! The benchmark file format.
//!
//! ```text
//! boheap 1
//! procedure List.traverse
//! fields next
//! data
//! objects first curr
//! ints
//! sets
//! locals curr
//! requires first ~= null
//! ensures true
//! predicate r track := reach next first v
//! locations entry head exit
//! entry entry
//! exit exit
//! edge entry -> head : curr := first
//! edge head -> head : assume curr ~= null; curr := curr..next
//! edge head -> exit : assume curr = null
//! ```
//!
//! `#` starts a comment. Repeated `requires`/`ensures` lines are conjoined.
//! A predicate may be marked `singleton "reason"` and `track`.

use super::procedure::{Edge, Procedure};
use crate::logic::{parse, parse_field, Expr, GuardedCommand, Predicate, Signature};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

pub const HEADER: &str = "boheap 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct BenchError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, BenchError> {
    Err(BenchError {
        line,
        message: message.into(),
    })
}

pub fn parse_command(sig: &Signature, text: &str) -> Result<GuardedCommand, String> {
    let mut c = GuardedCommand::skip();
    let mut guards = Vec::new();
    for part in text.split(';').map(str::trim) {
        if part == "skip" || part.is_empty() {
            continue;
        }
        if let Some(g) = part.strip_prefix("assume ") {
            if !c.updates.is_empty() || c.havoc.is_some() {
                return Err("`assume` must precede assignments".into());
            }
            guards.push(parse(g).map_err(|e| e.to_string())?);
        } else if let Some(x) = part.strip_prefix("havoc ") {
            if c.havoc.is_some() {
                return Err("at most one `havoc` per command".into());
            }
            c.havoc = Some(x.trim().to_string());
        } else if let Some((lhs, rhs)) = part.split_once(":=") {
            let lhs = lhs.trim();
            if sig.fields.contains(lhs) || sig.data.contains(lhs) {
                c = c.store(lhs, parse_field(rhs.trim()).map_err(|e| e.to_string())?);
            } else {
                c = c.assign(lhs, parse(rhs.trim()).map_err(|e| e.to_string())?);
            }
        } else {
            return Err(format!("cannot read `{part}`"));
        }
    }
    c.guard = Expr::and(guards);
    c.validate(sig).map_err(|e| e.to_string())?;
    Ok(c)
}

fn names(rest: &str) -> Vec<String> {
    rest.split_whitespace().map(str::to_string).collect()
}

pub fn parse_procedure(text: &str) -> Result<Procedure, BenchError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((i, _)) => return err(i, format!("expected header `{HEADER}`")),
        None => return err(0, "empty file"),
    }
    let mut sig = Signature::new();
    let mut name = None;
    let mut locals = BTreeSet::new();
    let mut requires = Vec::new();
    let mut ensures = Vec::new();
    let mut predicates = Vec::new();
    let mut locations: Vec<String> = Vec::new();
    let (mut entry, mut exit) = (None, None);
    let mut edges = Vec::new();
    for (i, line) in lines {
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let declare = |sig: &mut Signature, f: fn(&mut Signature, &str) -> Result<(), _>| {
            for n in names(rest) {
                f(sig, &n).or_else(|e: crate::logic::SortError| err(i, e.to_string()))?;
            }
            Ok(())
        };
        match kw {
            "procedure" => name = Some(rest.to_string()),
            "fields" => declare(&mut sig, Signature::add_field)?,
            "data" => declare(&mut sig, Signature::add_data)?,
            "objects" => declare(&mut sig, Signature::add_obj_var)?,
            "ints" => declare(&mut sig, Signature::add_int_var)?,
            "sets" => declare(&mut sig, Signature::add_set_var)?,
            "locals" => locals.extend(names(rest)),
            "requires" | "ensures" => {
                let f = parse(rest).or_else(|e| err(i, e.to_string()))?;
                sig.check_formula(&f).or_else(|e| err(i, e.to_string()))?;
                if kw == "requires" { &mut requires } else { &mut ensures }.push(f);
            }
            "predicate" => {
                let Some((head, body)) = rest.split_once(":=") else {
                    return err(i, "expected `predicate name := formula`");
                };
                let mut head = head.trim();
                let (pname, tail) = head.split_once(char::is_whitespace).unwrap_or((head, ""));
                let mut p = Predicate::new(pname, parse(body.trim()).or_else(|e| err(i, e.to_string()))?);
                head = tail.trim();
                while !head.is_empty() {
                    if let Some(t) = head.strip_prefix("track") {
                        p.track = true;
                        head = t.trim_start();
                    } else if let Some(t) = head.strip_prefix("singleton") {
                        p.singleton = true;
                        head = t.trim_start();
                        if let Some(t) = head.strip_prefix('"') {
                            let Some((why, t)) = t.split_once('"') else {
                                return err(i, "unterminated justification");
                            };
                            p.justification = Some(why.to_string());
                            head = t.trim_start();
                        }
                    } else {
                        return err(i, format!("unknown predicate flag `{head}`"));
                    }
                }
                predicates.push(p);
            }
            "locations" => locations = names(rest),
            "entry" | "exit" => {
                let Some(l) = locations.iter().position(|x| x == rest) else {
                    return err(i, format!("unknown location `{rest}`"));
                };
                if kw == "entry" {
                    entry = Some(l);
                } else {
                    exit = Some(l);
                }
            }
            "edge" => {
                let Some((ends, cmd)) = rest.split_once(':') else {
                    return err(i, "expected `edge a -> b : command`");
                };
                let Some((a, b)) = ends.split_once("->") else {
                    return err(i, "expected `a -> b`");
                };
                let find = |x: &str| locations.iter().position(|l| l == x.trim());
                let (Some(from), Some(to)) = (find(a), find(b)) else {
                    return err(i, "unknown location in edge");
                };
                let command = parse_command(&sig, cmd).or_else(|e| err(i, e))?;
                edges.push(Edge { from, to, command });
            }
            other => return err(i, format!("unknown keyword `{other}`")),
        }
    }
    let (Some(entry), Some(exit)) = (entry, exit) else {
        return err(0, "missing entry or exit");
    };
    let proc = Procedure {
        name: name.unwrap_or_else(|| "main".into()),
        sig: Arc::new(sig),
        locals,
        requires: Expr::and(requires),
        ensures: Expr::and(ensures),
        predicates,
        locations,
        entry,
        exit,
        edges,
    };
    proc.validate().or_else(|e| err(0, e.to_string()))?;
    Ok(proc)
}

pub fn print_procedure(p: &Procedure) -> String {
    let mut out = String::new();
    let w = &mut out;
    let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
    let _ = writeln!(w, "{HEADER}");
    let _ = writeln!(w, "procedure {}", p.name);
    let _ = writeln!(w, "fields {}", join(&p.sig.fields));
    let _ = writeln!(w, "data {}", join(&p.sig.data));
    let _ = writeln!(w, "objects {}", join(&p.sig.obj_vars));
    let _ = writeln!(w, "ints {}", join(&p.sig.int_vars));
    let _ = writeln!(w, "sets {}", join(&p.sig.set_vars));
    let _ = writeln!(w, "locals {}", join(&p.locals));
    for c in crate::logic::conjuncts(&p.requires) {
        let _ = writeln!(w, "requires {c}");
    }
    for c in crate::logic::conjuncts(&p.ensures) {
        let _ = writeln!(w, "ensures {c}");
    }
    for q in &p.predicates {
        let _ = write!(w, "predicate {}", q.name);
        if q.singleton {
            let _ = write!(w, " singleton");
            if let Some(j) = &q.justification {
                let _ = write!(w, " \"{j}\"");
            }
        }
        if q.track {
            let _ = write!(w, " track");
        }
        let _ = writeln!(w, " := {}", q.formula);
    }
    let _ = writeln!(w, "locations {}", p.locations.join(" "));
    let _ = writeln!(w, "entry {}", p.locations[p.entry]);
    let _ = writeln!(w, "exit {}", p.locations[p.exit]);
    for e in &p.edges {
        let _ = writeln!(w, "edge {} -> {} : {}", p.locations[e.from], p.locations[e.to], e.command);
    }
    out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}
