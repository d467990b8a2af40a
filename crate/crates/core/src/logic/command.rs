use super::ast::{Expr, Field, Formula, Name};
use super::sort::{Signature, SortError};
use super::subst::Subst;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Update {
    /// `x := t`
    Var(Name, Expr),
    /// `f := f[a := b]...`
    Field(Name, Field),
}

impl Update {
    pub fn target(&self) -> &str {
        match self {
            Update::Var(n, _) | Update::Field(n, _) => n,
        }
    }
}

/// An assume statement followed by simultaneous assignments, optionally
/// giving one object variable an arbitrary new value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardedCommand {
    pub guard: Formula,
    pub updates: Vec<Update>,
    pub havoc: Option<Name>,
}

impl Default for GuardedCommand {
    fn default() -> Self {
        Self::skip()
    }
}

impl GuardedCommand {
    pub fn skip() -> Self {
        GuardedCommand {
            guard: Expr::Bool(true),
            updates: Vec::new(),
            havoc: None,
        }
    }

    pub fn assume(guard: Formula) -> Self {
        GuardedCommand {
            guard,
            ..Self::skip()
        }
    }

    pub fn assign(mut self, var: impl Into<Name>, to: Expr) -> Self {
        self.updates.push(Update::Var(var.into(), to));
        self
    }

    pub fn store(mut self, field: impl Into<Name>, to: Field) -> Self {
        self.updates.push(Update::Field(field.into(), to));
        self
    }

    pub fn havoc(mut self, var: impl Into<Name>) -> Self {
        self.havoc = Some(var.into());
        self
    }

    /// Variables and fields the command may change.
    pub fn modified(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.updates.iter().map(|u| u.target().to_string()).collect();
        out.extend(self.havoc.iter().cloned());
        out
    }

    /// Symbols read by the guard or by right-hand sides.
    pub fn read(&self) -> BTreeSet<Name> {
        let mut out = self.guard.symbols();
        for u in &self.updates {
            match u {
                Update::Var(_, t) => out.extend(t.symbols()),
                Update::Field(_, f) => out.extend(Expr::App(f.clone(), Box::new(Expr::Null)).symbols()),
            }
        }
        out
    }

    pub fn validate(&self, sig: &Signature) -> Result<(), SortError> {
        sig.check_formula(&self.guard)?;
        let mut seen = BTreeSet::new();
        for u in &self.updates {
            if !seen.insert(u.target().to_string()) {
                return Err(SortError::Duplicate(u.target().to_string()));
            }
            match u {
                Update::Var(x, t) => {
                    let want = sig
                        .var_sort(x)
                        .filter(|_| x != super::ast::FREE_VAR)
                        .ok_or_else(|| SortError::Unknown(x.clone()))?;
                    let found = sig.sort_of(t)?;
                    if found != want {
                        return Err(SortError::Mismatch {
                            expr: t.to_string(),
                            expected: want,
                            found,
                        });
                    }
                }
                Update::Field(f, to) => {
                    let want = sig.field_sort(f).ok_or_else(|| SortError::Unknown(f.clone()))?;
                    let found = sig.check_field(to)?;
                    if found != want {
                        return Err(SortError::Mismatch {
                            expr: to.to_string(),
                            expected: want,
                            found,
                        });
                    }
                }
            }
        }
        if let Some(h) = &self.havoc {
            if seen.contains(h) {
                return Err(SortError::Duplicate(h.clone()));
            }
            if !sig.obj_vars.contains(h) {
                return Err(SortError::Invalid(h.clone(), "only object variables can be havocked"));
            }
        }
        Ok(())
    }

    pub fn subst(&self) -> Subst {
        let mut s = Subst::new();
        for u in &self.updates {
            match u {
                Update::Var(x, t) => {
                    s.vars.insert(x.clone(), t.clone());
                }
                Update::Field(f, to) => {
                    s.fields.insert(f.clone(), to.clone());
                }
            }
        }
        s
    }
}

/// Weakest liberal precondition: `guard --> F[updates]`, with the havocked
/// variable universally quantified.
pub fn wlp(sig: &Signature, c: &GuardedCommand, f: &Formula) -> Result<Formula, SortError> {
    c.validate(sig)?;
    sig.check_formula(f)?;
    let mut s = c.subst();
    let mut fresh = None;
    if let Some(h) = &c.havoc {
        let mut avoid = f.free_vars();
        avoid.extend(c.guard.free_vars());
        for u in &c.updates {
            match u {
                Update::Var(_, t) => avoid.extend(t.free_vars()),
                Update::Field(_, fl) => fl.collect_free(&mut Vec::new(), &mut avoid),
            }
        }
        let mut name = format!("{h}'");
        while avoid.contains(&name) {
            name.push('\'');
        }
        s.vars.insert(h.clone(), Expr::Var(name.clone()));
        fresh = Some(name);
    }
    let mut body = s.apply(f);
    if let Some(name) = fresh {
        if body.free_vars().contains(&name) {
            body = Expr::forall(vec![name], body);
        }
    }
    Ok(Expr::implies_simplified(c.guard.clone(), body))
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Var(x, t) => write!(f, "{x} := {t}"),
            Update::Field(n, to) => write!(f, "{n} := {to}"),
        }
    }
}

impl fmt::Display for GuardedCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.guard != Expr::Bool(true) {
            parts.push(format!("assume {}", self.guard));
        }
        parts.extend(self.updates.iter().map(|u| u.to_string()));
        if let Some(h) = &self.havoc {
            parts.push(format!("havoc {h}"));
        }
        if parts.is_empty() {
            f.write_str("skip")
        } else {
            f.write_str(&parts.join("; "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse, parse_field};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_field("next").unwrap();
        s.add_data("data").unwrap();
        for x in ["x", "y", "n", "curr", "first"] {
            s.add_obj_var(x).unwrap();
        }
        s
    }

    #[test]
    fn assume_only() {
        let c = GuardedCommand::assume(parse("x ~= null").unwrap());
        let f = parse("x = v").unwrap();
        assert_eq!(wlp(&sig(), &c, &f).unwrap().to_string(), "x ~= null --> x = v");
    }

    #[test]
    fn assignment() {
        let c = GuardedCommand::skip().assign("x", Expr::var("y"));
        let f = parse("v = x").unwrap();
        assert_eq!(wlp(&sig(), &c, &f).unwrap(), parse("v = y").unwrap());
    }

    #[test]
    fn field_store_rewrites_reach() {
        let c = GuardedCommand::skip().store("next", parse_field("next[n := curr]").unwrap());
        let f = parse("reach next first v").unwrap();
        assert_eq!(
            wlp(&sig(), &c, &f).unwrap().to_string(),
            "reach next[n := curr] first v"
        );
    }

    #[test]
    fn simultaneous_swap() {
        let c = GuardedCommand::skip()
            .assign("x", Expr::var("y"))
            .assign("y", Expr::var("x"));
        let f = parse("x..next = y").unwrap();
        assert_eq!(wlp(&sig(), &c, &f).unwrap().to_string(), "y..next = x");
    }

    #[test]
    fn havoc_quantifies() {
        let c = GuardedCommand::skip().havoc("x");
        let f = parse("x = v | x = null").unwrap();
        assert_eq!(wlp(&sig(), &c, &f).unwrap().to_string(), "ALL x'. x' = v | x' = null");
    }

    #[test]
    fn ill_sorted_update_is_rejected() {
        let c = GuardedCommand::skip().assign("x", parse("x..data").unwrap());
        assert!(wlp(&sig(), &c, &Expr::Bool(true)).is_err());
        let c = GuardedCommand::skip()
            .assign("x", Expr::Null)
            .assign("x", Expr::Null);
        assert!(c.validate(&sig()).is_err());
    }
}
