use super::ast::{Expr, Field, Name};
use std::collections::BTreeMap;

/// Canonical representative of the alpha-equivalence class of `e`, modulo
/// commutativity of `&`, `|`, `<->`, `=` and `Un`.
///
/// Bound variables are renamed after their binding depth (`?0`, `?1`, ...),
/// names the parser never produces, so normal forms cannot collide with
/// user formulas.
pub fn alpha_normalize(e: &Expr) -> Expr {
    norm(e, &mut BTreeMap::new(), 0)
}

fn bound_name(depth: usize) -> Name {
    format!("?{depth}")
}

fn norm(e: &Expr, env: &mut BTreeMap<Name, Vec<Name>>, depth: usize) -> Expr {
    let n = |x: &Expr, env: &mut BTreeMap<Name, Vec<Name>>| Box::new(norm(x, env, depth));
    match e {
        Expr::Bool(_) | Expr::Null | Expr::Int(_) | Expr::EmptySet => e.clone(),
        Expr::Var(v) => match env.get(v).and_then(|s| s.last()) {
            Some(b) => Expr::Var(b.clone()),
            None => e.clone(),
        },
        Expr::App(f, t) => Expr::App(norm_field(f, env, depth), n(t, env)),
        Expr::Reach(f, a, b) => Expr::Reach(norm_field(f, env, depth), n(a, env), n(b, env)),
        Expr::Add(a, b) => Expr::Add(n(a, env), n(b, env)),
        Expr::Sub(a, b) => Expr::Sub(n(a, env), n(b, env)),
        Expr::Lt(a, b) => Expr::Lt(n(a, env), n(b, env)),
        Expr::Le(a, b) => Expr::Le(n(a, env), n(b, env)),
        Expr::Implies(a, b) => Expr::Implies(n(a, env), n(b, env)),
        Expr::Member(a, b) => Expr::Member(n(a, env), n(b, env)),
        Expr::Not(a) => Expr::Not(n(a, env)),
        Expr::Singleton(a) => Expr::Singleton(n(a, env)),
        Expr::Eq(a, b) => {
            let (a, b) = ordered(norm(a, env, depth), norm(b, env, depth));
            Expr::Eq(Box::new(a), Box::new(b))
        }
        Expr::Iff(a, b) => {
            let (a, b) = ordered(norm(a, env, depth), norm(b, env, depth));
            Expr::Iff(Box::new(a), Box::new(b))
        }
        Expr::Union(a, b) => {
            let (a, b) = ordered(norm(a, env, depth), norm(b, env, depth));
            Expr::Union(Box::new(a), Box::new(b))
        }
        Expr::And(xs) => {
            let mut out = Vec::new();
            for x in xs {
                match norm(x, env, depth) {
                    Expr::And(inner) => out.extend(inner),
                    Expr::Bool(true) => {}
                    other => out.push(other),
                }
            }
            out.sort();
            out.dedup();
            match out.len() {
                0 => Expr::Bool(true),
                1 => out.pop().unwrap(),
                _ => Expr::And(out),
            }
        }
        Expr::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                match norm(x, env, depth) {
                    Expr::Or(inner) => out.extend(inner),
                    Expr::Bool(false) => {}
                    other => out.push(other),
                }
            }
            out.sort();
            out.dedup();
            match out.len() {
                0 => Expr::Bool(false),
                1 => out.pop().unwrap(),
                _ => Expr::Or(out),
            }
        }
        Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
            let names: Vec<Name> = (0..vs.len()).map(|i| bound_name(depth + i)).collect();
            for (v, b) in vs.iter().zip(&names) {
                env.entry(v.clone()).or_default().push(b.clone());
            }
            let body = Box::new(norm(body, env, depth + vs.len()));
            for v in vs {
                pop(env, v);
            }
            if matches!(e, Expr::Forall(..)) {
                Expr::Forall(names, body)
            } else {
                Expr::Exists(names, body)
            }
        }
        Expr::Compr(w, body) => {
            let b = bound_name(depth);
            env.entry(w.clone()).or_default().push(b.clone());
            let body = Box::new(norm(body, env, depth + 1));
            pop(env, w);
            Expr::Compr(b, body)
        }
    }
}

fn pop(env: &mut BTreeMap<Name, Vec<Name>>, v: &Name) {
    if let Some(stack) = env.get_mut(v) {
        stack.pop();
        if stack.is_empty() {
            env.remove(v);
        }
    }
}

fn norm_field(f: &Field, env: &mut BTreeMap<Name, Vec<Name>>, depth: usize) -> Field {
    match f {
        Field::Named(_) => f.clone(),
        Field::Update(inner, a, b) => Field::Update(
            Box::new(norm_field(inner, env, depth)),
            Box::new(norm(a, env, depth)),
            Box::new(norm(b, env, depth)),
        ),
    }
}

fn ordered(a: Expr, b: Expr) -> (Expr, Expr) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

/// Top-level conjuncts of `f`; quantifiers and other connectives are left
/// intact.
pub fn conjuncts(f: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    collect(f, &mut out);
    out
}

fn collect(f: &Expr, out: &mut Vec<Expr>) {
    match f {
        Expr::And(xs) => xs.iter().for_each(|x| collect(x, out)),
        other => out.push(other.clone()),
    }
}
