use super::ast::{Expr, Field, Name, FREE_VAR};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Bool,
    Obj,
    Int,
    Set,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Bool => "bool",
            Sort::Obj => "object",
            Sort::Int => "int",
            Sort::Set => "set",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown symbol `{0}`")]
    Unknown(Name),
    #[error("`{expr}` has sort {found}, expected {expected}")]
    Mismatch {
        expr: String,
        expected: Sort,
        found: Sort,
    },
    #[error("`{0}` compares values of different sorts")]
    Mixed(String),
    #[error("`{0}` is declared more than once")]
    Duplicate(Name),
    #[error("`{0}` is not allowed here: {1}")]
    Invalid(String, &'static str),
}

/// Declared symbols of a procedure. Object fields map objects to objects,
/// data fields map objects to integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub fields: BTreeSet<Name>,
    pub data: BTreeSet<Name>,
    pub obj_vars: BTreeSet<Name>,
    pub int_vars: BTreeSet<Name>,
    pub set_vars: BTreeSet<Name>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn declared(&self, name: &str) -> bool {
        self.fields.contains(name)
            || self.data.contains(name)
            || self.obj_vars.contains(name)
            || self.int_vars.contains(name)
            || self.set_vars.contains(name)
    }

    fn add(&mut self, name: &str, pick: fn(&mut Self) -> &mut BTreeSet<Name>) -> Result<(), SortError> {
        if self.declared(name) || name == FREE_VAR {
            return Err(SortError::Duplicate(name.to_string()));
        }
        pick(self).insert(name.to_string());
        Ok(())
    }

    pub fn add_field(&mut self, name: &str) -> Result<(), SortError> {
        self.add(name, |s| &mut s.fields)
    }

    pub fn add_data(&mut self, name: &str) -> Result<(), SortError> {
        self.add(name, |s| &mut s.data)
    }

    pub fn add_obj_var(&mut self, name: &str) -> Result<(), SortError> {
        self.add(name, |s| &mut s.obj_vars)
    }

    pub fn add_int_var(&mut self, name: &str) -> Result<(), SortError> {
        self.add(name, |s| &mut s.int_vars)
    }

    pub fn add_set_var(&mut self, name: &str) -> Result<(), SortError> {
        self.add(name, |s| &mut s.set_vars)
    }

    /// Sort of a program variable, `None` if undeclared.
    pub fn var_sort(&self, name: &str) -> Option<Sort> {
        if self.obj_vars.contains(name) || name == FREE_VAR {
            Some(Sort::Obj)
        } else if self.int_vars.contains(name) {
            Some(Sort::Int)
        } else if self.set_vars.contains(name) {
            Some(Sort::Set)
        } else {
            None
        }
    }

    /// Result sort of applying a field, `None` if undeclared.
    pub fn field_sort(&self, name: &str) -> Option<Sort> {
        if self.fields.contains(name) {
            Some(Sort::Obj)
        } else if self.data.contains(name) {
            Some(Sort::Int)
        } else {
            None
        }
    }

    pub fn check_formula(&self, e: &Expr) -> Result<(), SortError> {
        self.expect(e, Sort::Bool, &mut Vec::new())
    }

    pub fn sort_of(&self, e: &Expr) -> Result<Sort, SortError> {
        self.infer(e, &mut Vec::new())
    }

    pub fn check_field(&self, f: &Field) -> Result<Sort, SortError> {
        self.field(f, &mut Vec::new())
    }

    fn expect(&self, e: &Expr, want: Sort, bound: &mut Vec<Name>) -> Result<(), SortError> {
        let found = self.infer(e, bound)?;
        if found == want {
            Ok(())
        } else {
            Err(SortError::Mismatch {
                expr: e.to_string(),
                expected: want,
                found,
            })
        }
    }

    fn field(&self, f: &Field, bound: &mut Vec<Name>) -> Result<Sort, SortError> {
        match f {
            Field::Named(n) => self
                .field_sort(n)
                .ok_or_else(|| SortError::Unknown(n.clone())),
            Field::Update(inner, at, to) => {
                let s = self.field(inner, bound)?;
                self.expect(at, Sort::Obj, bound)?;
                self.expect(to, s, bound)?;
                Ok(s)
            }
        }
    }

    fn infer(&self, e: &Expr, bound: &mut Vec<Name>) -> Result<Sort, SortError> {
        Ok(match e {
            Expr::Bool(_) => Sort::Bool,
            Expr::Null => Sort::Obj,
            Expr::Int(_) => Sort::Int,
            Expr::EmptySet => Sort::Set,
            Expr::Var(n) => {
                if bound.iter().any(|b| b == n) {
                    Sort::Obj
                } else {
                    self.var_sort(n).ok_or_else(|| SortError::Unknown(n.clone()))?
                }
            }
            Expr::App(f, t) => {
                self.expect(t, Sort::Obj, bound)?;
                self.field(f, bound)?
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                self.expect(a, Sort::Int, bound)?;
                self.expect(b, Sort::Int, bound)?;
                Sort::Int
            }
            Expr::Lt(a, b) | Expr::Le(a, b) => {
                self.expect(a, Sort::Int, bound)?;
                self.expect(b, Sort::Int, bound)?;
                Sort::Bool
            }
            Expr::Eq(a, b) => {
                let sa = self.infer(a, bound)?;
                let sb = self.infer(b, bound)?;
                if sa != sb {
                    return Err(SortError::Mixed(e.to_string()));
                }
                if sa == Sort::Bool {
                    return Err(SortError::Invalid(e.to_string(), "use <-> for formulas"));
                }
                Sort::Bool
            }
            Expr::Not(a) => {
                self.expect(a, Sort::Bool, bound)?;
                Sort::Bool
            }
            Expr::And(xs) | Expr::Or(xs) => {
                for x in xs {
                    self.expect(x, Sort::Bool, bound)?;
                }
                Sort::Bool
            }
            Expr::Implies(a, b) | Expr::Iff(a, b) => {
                self.expect(a, Sort::Bool, bound)?;
                self.expect(b, Sort::Bool, bound)?;
                Sort::Bool
            }
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                let r = self.expect(body, Sort::Bool, bound);
                bound.truncate(n);
                r?;
                Sort::Bool
            }
            Expr::Reach(f, a, b) => {
                if self.field(f, bound)? != Sort::Obj {
                    return Err(SortError::Invalid(e.to_string(), "reach needs an object field"));
                }
                self.expect(a, Sort::Obj, bound)?;
                self.expect(b, Sort::Obj, bound)?;
                Sort::Bool
            }
            Expr::Member(a, s) => {
                self.expect(a, Sort::Obj, bound)?;
                self.expect(s, Sort::Set, bound)?;
                Sort::Bool
            }
            Expr::Compr(w, body) => {
                bound.push(w.clone());
                let r = self.expect(body, Sort::Bool, bound);
                bound.pop();
                r?;
                Sort::Set
            }
            Expr::Union(a, b) => {
                self.expect(a, Sort::Set, bound)?;
                self.expect(b, Sort::Set, bound)?;
                Sort::Set
            }
            Expr::Singleton(t) => {
                self.expect(t, Sort::Obj, bound)?;
                Sort::Set
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_field("next").unwrap();
        s.add_data("data").unwrap();
        s.add_obj_var("x").unwrap();
        s.add_int_var("i").unwrap();
        s.add_set_var("content").unwrap();
        s
    }

    #[test]
    fn accepts_well_sorted() {
        let s = sig();
        for src in [
            "x..next = null",
            "x..data < i + 1",
            "ALL w. w : content --> w..data <= x..data",
            "content = content Un {x}",
            "reach next[x := null] x v",
        ] {
            s.check_formula(&parse(src).unwrap()).unwrap();
        }
    }

    #[test]
    fn rejects_mixed_sorts() {
        let s = sig();
        for src in ["x = i", "x..data = x", "x < i", "reach data x x", "i : content", "y = x"] {
            assert!(s.check_formula(&parse(src).unwrap()).is_err(), "{src}");
        }
    }

    #[test]
    fn duplicate_declaration() {
        let mut s = sig();
        assert_eq!(s.add_obj_var("next"), Err(SortError::Duplicate("next".into())));
        assert!(s.add_obj_var("v").is_err());
    }
}
