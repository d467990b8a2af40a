use super::ast::{Expr, Field, Name};
use std::collections::{BTreeMap, BTreeSet};

/// Simultaneous substitution of terms for variables and field terms for
/// field names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    pub vars: BTreeMap<Name, Expr>,
    pub fields: BTreeMap<Name, Field>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(mut self, name: impl Into<Name>, to: Expr) -> Self {
        self.vars.insert(name.into(), to);
        self
    }

    pub fn field(mut self, name: impl Into<Name>, to: Field) -> Self {
        self.fields.insert(name.into(), to);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.fields.is_empty()
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        if self.is_empty() {
            return e.clone();
        }
        self.go(e)
    }

    fn range_free(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for t in self.vars.values() {
            t.collect_free(&mut Vec::new(), &mut out);
        }
        for f in self.fields.values() {
            f.collect_free(&mut Vec::new(), &mut out);
        }
        out
    }

    /// Enters a binder: drops shadowed bindings and renames binders that
    /// would capture a free variable of the substitution's range.
    fn enter(&self, vs: &[Name], body: &Expr) -> (Subst, Vec<Name>) {
        let mut inner = self.clone();
        for v in vs {
            inner.vars.remove(v);
        }
        let danger = inner.range_free();
        let mut avoid: BTreeSet<Name> = danger.clone();
        avoid.extend(body.free_vars());
        avoid.extend(vs.iter().cloned());
        let mut names = Vec::with_capacity(vs.len());
        for v in vs {
            if danger.contains(v) {
                let mut fresh = format!("{v}'");
                while avoid.contains(&fresh) {
                    fresh.push('\'');
                }
                avoid.insert(fresh.clone());
                inner.vars.insert(v.clone(), Expr::Var(fresh.clone()));
                names.push(fresh);
            } else {
                names.push(v.clone());
            }
        }
        (inner, names)
    }

    fn go_field(&self, f: &Field) -> Field {
        match f {
            Field::Named(n) => match self.fields.get(n) {
                Some(to) => to.clone(),
                None => f.clone(),
            },
            Field::Update(inner, a, b) => Field::Update(
                Box::new(self.go_field(inner)),
                Box::new(self.go(a)),
                Box::new(self.go(b)),
            ),
        }
    }

    fn go(&self, e: &Expr) -> Expr {
        let bx = |x: &Expr| Box::new(self.go(x));
        match e {
            Expr::Bool(_) | Expr::Null | Expr::Int(_) | Expr::EmptySet => e.clone(),
            Expr::Var(n) => self.vars.get(n).cloned().unwrap_or_else(|| e.clone()),
            Expr::App(f, t) => Expr::App(self.go_field(f), bx(t)),
            Expr::Reach(f, a, b) => Expr::Reach(self.go_field(f), bx(a), bx(b)),
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Eq(a, b) => Expr::Eq(bx(a), bx(b)),
            Expr::Lt(a, b) => Expr::Lt(bx(a), bx(b)),
            Expr::Le(a, b) => Expr::Le(bx(a), bx(b)),
            Expr::Implies(a, b) => Expr::Implies(bx(a), bx(b)),
            Expr::Iff(a, b) => Expr::Iff(bx(a), bx(b)),
            Expr::Member(a, b) => Expr::Member(bx(a), bx(b)),
            Expr::Union(a, b) => Expr::Union(bx(a), bx(b)),
            Expr::Not(a) => Expr::Not(bx(a)),
            Expr::Singleton(a) => Expr::Singleton(bx(a)),
            Expr::And(xs) => Expr::And(xs.iter().map(|x| self.go(x)).collect()),
            Expr::Or(xs) => Expr::Or(xs.iter().map(|x| self.go(x)).collect()),
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let (inner, names) = self.enter(vs, body);
                let body = Box::new(inner.apply(body));
                if matches!(e, Expr::Forall(..)) {
                    Expr::Forall(names, body)
                } else {
                    Expr::Exists(names, body)
                }
            }
            Expr::Compr(w, body) => {
                let (inner, mut names) = self.enter(std::slice::from_ref(w), body);
                Expr::Compr(names.pop().unwrap(), Box::new(inner.apply(body)))
            }
        }
    }
}

/// Capture-avoiding substitution of terms for free variables.
pub fn substitute(e: &Expr, binding: &BTreeMap<Name, Expr>) -> Expr {
    Subst {
        vars: binding.clone(),
        fields: BTreeMap::new(),
    }
    .apply(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse, parse_field};

    fn sub(src: &str, var: &str, to: &str) -> String {
        Subst::new()
            .var(var, parse(to).unwrap())
            .apply(&parse(src).unwrap())
            .to_string()
    }

    #[test]
    fn plain_substitution() {
        assert_eq!(sub("x = v", "v", "x"), "x = x");
    }

    #[test]
    fn avoids_capture() {
        assert_eq!(sub("ALL w. w = v", "v", "w"), "ALL w'. w' = w");
        assert_eq!(sub("ALL w w'. w = v & w' = v", "v", "w"), "ALL w'' w'. w'' = w & w' = w");
        assert_eq!(sub("{w. w = v}", "v", "w..next"), "{w'. w' = w..next}");
    }

    #[test]
    fn bound_variables_shadow() {
        assert_eq!(sub("ALL v. v = x", "v", "y"), "ALL v. v = x");
        assert_eq!(sub("v = x & (EX v. v = x)", "v", "y"), "y = x & (EX v. v = x)");
    }

    #[test]
    fn field_substitution_inside_updates() {
        let f = parse("reach next[x := y] a v").unwrap();
        let s = Subst::new()
            .field("next", parse_field("next[n := c]").unwrap())
            .var("x", Expr::var("z"));
        assert_eq!(s.apply(&f).to_string(), "reach next[n := c][z := y] a v");
    }
}
