use super::ast::{Expr, Formula, Name, FREE_VAR};
use super::sort::{Signature, SortError};
use std::collections::BTreeSet;

/// An abstraction predicate: a formula over program symbols and `v`
/// denoting a set of objects in each state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub name: Name,
    pub formula: Formula,
    pub singleton: bool,
    /// Reason a non-`(x = v)` predicate is declared singleton.
    pub justification: Option<String>,
    /// Keep the predicate relevant everywhere regardless of liveness.
    pub track: bool,
    /// Added automatically rather than declared.
    pub generated: bool,
}

impl Predicate {
    pub fn new(name: impl Into<Name>, formula: Formula) -> Self {
        Predicate {
            name: name.into(),
            formula,
            singleton: false,
            justification: None,
            track: false,
            generated: false,
        }
    }

    /// The singleton predicate `(x = v)`.
    pub fn points_to(var: &str) -> Self {
        Predicate {
            singleton: true,
            generated: true,
            ..Predicate::new(var.to_string(), Expr::eq(Expr::var(var), Expr::free_var()))
        }
    }

    /// The program variable `x` if the formula is `x = v` or `v = x`.
    pub fn pointed_by(&self) -> Option<&str> {
        match &self.formula {
            Expr::Eq(a, b) => match (a.as_ref(), b.as_ref()) {
                (Expr::Var(x), Expr::Var(y)) if y == FREE_VAR && x != FREE_VAR => Some(x),
                (Expr::Var(y), Expr::Var(x)) if y == FREE_VAR && x != FREE_VAR => Some(x),
                _ => None,
            },
            _ => None,
        }
    }

    /// Boolean state fact: `v` does not occur.
    pub fn is_state(&self) -> bool {
        !self.formula.mentions_free_var()
    }

    pub fn symbols(&self) -> BTreeSet<Name> {
        self.formula.symbols()
    }

    pub fn validate(&self, sig: &Signature) -> Result<(), SortError> {
        sig.check_formula(&self.formula)?;
        if self.singleton && self.pointed_by().is_none() && self.justification.is_none() {
            return Err(SortError::Invalid(
                self.name.clone(),
                "singleton predicates must be `x = v` or carry a justification",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    #[test]
    fn points_to_shape() {
        let p = Predicate::points_to("x");
        assert_eq!(p.pointed_by(), Some("x"));
        assert!(p.singleton && !p.is_state());
        let q = Predicate::new("q", parse("v = x").unwrap());
        assert_eq!(q.pointed_by(), Some("x"));
        let s = Predicate::new("s", parse("x = null").unwrap());
        assert!(s.is_state());
    }

    #[test]
    fn singleton_needs_shape_or_reason() {
        let mut sig = Signature::new();
        sig.add_obj_var("x").unwrap();
        sig.add_field("next").unwrap();
        let mut p = Predicate::new("nx", parse("v = x..next").unwrap());
        p.singleton = true;
        assert!(p.validate(&sig).is_err());
        p.justification = Some("image of a single object".into());
        assert!(p.validate(&sig).is_ok());
    }
}
