use std::collections::BTreeSet;
use std::fmt;

/// Identifier of a program symbol or bound variable.
pub type Name = String;

/// The distinguished free object variable of abstraction predicates.
pub const FREE_VAR: &str = "v";

/// A field-valued term: a declared field, or a pointwise update of one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Named(Name),
    /// `f[at := to]`
    Update(Box<Field>, Box<Expr>, Box<Expr>),
}

impl Field {
    pub fn named(name: impl Into<Name>) -> Self {
        Field::Named(name.into())
    }

    /// `self[at := to]`
    pub fn update(self, at: Expr, to: Expr) -> Self {
        Field::Update(Box::new(self), Box::new(at), Box::new(to))
    }

    /// Name of the declared field at the bottom of an update chain.
    pub fn base(&self) -> &str {
        match self {
            Field::Named(n) => n,
            Field::Update(inner, _, _) => inner.base(),
        }
    }
}

/// Terms and formulas share one syntax tree; sorts are checked separately
/// against a [`Signature`](super::Signature).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Bool(bool),
    Null,
    Int(i64),
    Var(Name),
    /// Field application `f(t)`, object- or integer-valued.
    App(Field, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Lt(Box<Expr>, Box<Expr>),
    Le(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Forall(Vec<Name>, Box<Expr>),
    Exists(Vec<Name>, Box<Expr>),
    /// Reflexive-transitive closure of the successor relation of a field.
    Reach(Field, Box<Expr>, Box<Expr>),
    Member(Box<Expr>, Box<Expr>),
    /// Set comprehension `{w. F}` over objects.
    Compr(Name, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    Singleton(Box<Expr>),
    EmptySet,
}

pub type Formula = Expr;

impl Expr {
    pub fn var(name: impl Into<Name>) -> Self {
        Expr::Var(name.into())
    }

    pub fn free_var() -> Self {
        Expr::Var(FREE_VAR.to_string())
    }

    pub fn app(field: impl Into<Name>, arg: Expr) -> Self {
        Expr::App(Field::Named(field.into()), Box::new(arg))
    }

    pub fn eq(a: Expr, b: Expr) -> Self {
        Expr::Eq(Box::new(a), Box::new(b))
    }

    pub fn neq(a: Expr, b: Expr) -> Self {
        Expr::not(Expr::eq(a, b))
    }

    pub fn lt(a: Expr, b: Expr) -> Self {
        Expr::Lt(Box::new(a), Box::new(b))
    }

    pub fn le(a: Expr, b: Expr) -> Self {
        Expr::Le(Box::new(a), Box::new(b))
    }

    pub fn member(a: Expr, s: Expr) -> Self {
        Expr::Member(Box::new(a), Box::new(s))
    }

    pub fn reach(field: Field, from: Expr, to: Expr) -> Self {
        Expr::Reach(field, Box::new(from), Box::new(to))
    }

    pub fn not(f: Expr) -> Self {
        Expr::Not(Box::new(f))
    }

    pub fn implies(a: Expr, b: Expr) -> Self {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Expr, b: Expr) -> Self {
        Expr::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(vars: Vec<Name>, body: Expr) -> Self {
        Expr::Forall(vars, Box::new(body))
    }

    pub fn exists(vars: Vec<Name>, body: Expr) -> Self {
        Expr::Exists(vars, Box::new(body))
    }

    /// Conjunction with unit and zero absorption.
    pub fn and(parts: impl IntoIterator<Item = Expr>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Expr::Bool(true) => {}
                Expr::Bool(false) => return Expr::Bool(false),
                Expr::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::Bool(true),
            1 => out.pop().unwrap(),
            _ => Expr::And(out),
        }
    }

    /// Disjunction with unit and zero absorption.
    pub fn or(parts: impl IntoIterator<Item = Expr>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Expr::Bool(false) => {}
                Expr::Bool(true) => return Expr::Bool(true),
                Expr::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::Bool(false),
            1 => out.pop().unwrap(),
            _ => Expr::Or(out),
        }
    }

    /// Negation that folds constants and double negation.
    pub fn negate(f: Expr) -> Self {
        match f {
            Expr::Bool(b) => Expr::Bool(!b),
            Expr::Not(inner) => *inner,
            other => Expr::not(other),
        }
    }

    /// Implication with true/false absorption.
    pub fn implies_simplified(a: Expr, b: Expr) -> Self {
        match (a, b) {
            (Expr::Bool(true), b) => b,
            (Expr::Bool(false), _) => Expr::Bool(true),
            (_, Expr::Bool(true)) => Expr::Bool(true),
            (a, Expr::Bool(false)) => Expr::negate(a),
            (a, b) => Expr::implies(a, b),
        }
    }

    /// Free variables (program variables, `v`, and unbound names).
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Bool(_) | Expr::Null | Expr::Int(_) | Expr::EmptySet => {}
            Expr::Var(n) => {
                if !bound.iter().any(|b| b == n) {
                    out.insert(n.clone());
                }
            }
            Expr::App(f, t) => {
                f.collect_free(bound, out);
                t.collect_free(bound, out);
            }
            Expr::Reach(f, a, b) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Eq(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::Implies(a, b)
            | Expr::Iff(a, b)
            | Expr::Member(a, b)
            | Expr::Union(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Not(a) | Expr::Singleton(a) => a.collect_free(bound, out),
            Expr::And(xs) | Expr::Or(xs) => {
                for x in xs {
                    x.collect_free(bound, out);
                }
            }
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            Expr::Compr(w, body) => {
                bound.push(w.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names of fields (object and data) occurring anywhere.
    pub fn fields(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::App(f, _) | Expr::Reach(f, _, _) => {
                out.insert(f.base().to_string());
            }
            _ => {}
        });
        out
    }

    /// Program symbols: free variables other than `v`, plus field names.
    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.free_vars();
        out.remove(FREE_VAR);
        out.extend(self.fields());
        out
    }

    pub fn mentions_free_var(&self) -> bool {
        self.free_vars().contains(FREE_VAR)
    }

    pub fn has_quantifier(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Forall(..) | Expr::Exists(..)) {
                found = true;
            }
        });
        found
    }

    /// Pre-order traversal over every subexpression, including those nested
    /// inside field updates.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Bool(_) | Expr::Null | Expr::Int(_) | Expr::Var(_) | Expr::EmptySet => {}
            Expr::App(fld, t) => {
                fld.visit_exprs(f);
                t.visit(f);
            }
            Expr::Reach(fld, a, b) => {
                fld.visit_exprs(f);
                a.visit(f);
                b.visit(f);
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Eq(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::Implies(a, b)
            | Expr::Iff(a, b)
            | Expr::Member(a, b)
            | Expr::Union(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Not(a) | Expr::Singleton(a) => a.visit(f),
            Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| x.visit(f)),
            Expr::Forall(_, body) | Expr::Exists(_, body) | Expr::Compr(_, body) => body.visit(f),
        }
    }

    /// Number of nodes; used as a cheap size measure.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

impl Field {
    pub(crate) fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        if let Field::Update(inner, a, b) = self {
            inner.collect_free(bound, out);
            a.collect_free(bound, out);
            b.collect_free(bound, out);
        }
    }

    fn visit_exprs(&self, f: &mut dyn FnMut(&Expr)) {
        if let Field::Update(inner, a, b) = self {
            inner.visit_exprs(f);
            a.visit(f);
            b.visit(f);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print(self))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_field(self))
    }
}
