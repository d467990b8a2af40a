use super::ast::{Expr, Field, Formula, Name, FREE_VAR};
use super::sort::Signature;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A finite heap. Objects are `1..=size`, `0` is null. Every object field
/// maps null to null and every data field maps null to 0. Set variables
/// hold bitmasks over non-null objects, and every set-valued term
/// denotes a set of non-null objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConcreteState {
    pub size: u8,
    pub fields: BTreeMap<Name, Vec<u8>>,
    pub data: BTreeMap<Name, Vec<i64>>,
    pub objs: BTreeMap<Name, u8>,
    pub ints: BTreeMap<Name, i64>,
    pub sets: BTreeMap<Name, u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Obj(u8),
    Int(i64),
    Set(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("unknown field `{0}`")]
    UnknownField(Name),
    #[error("ill-sorted subterm `{0}`")]
    Sort(String),
}

impl ConcreteState {
    /// All pointers null, all data 0, all sets empty.
    pub fn new(sig: &Signature, size: u8) -> Self {
        assert!(size < 63, "universe too large for set bitmasks");
        let n = size as usize + 1;
        ConcreteState {
            size,
            fields: sig.fields.iter().map(|f| (f.clone(), vec![0; n])).collect(),
            data: sig.data.iter().map(|d| (d.clone(), vec![0; n])).collect(),
            objs: sig.obj_vars.iter().map(|x| (x.clone(), 0)).collect(),
            ints: sig.int_vars.iter().map(|x| (x.clone(), 0)).collect(),
            sets: sig.set_vars.iter().map(|x| (x.clone(), 0)).collect(),
        }
    }

    /// Objects including null.
    pub fn objects(&self) -> impl Iterator<Item = u8> {
        0..=self.size
    }

    /// Bitmask of all non-null objects.
    pub fn universe_mask(&self) -> u64 {
        ((1u64 << (self.size + 1)) - 1) & !1
    }

    pub fn is_well_formed(&self) -> bool {
        let n = self.size as usize + 1;
        self.fields
            .values()
            .all(|f| f.len() == n && f[0] == 0 && f.iter().all(|&o| o <= self.size))
            && self.data.values().all(|d| d.len() == n && d[0] == 0)
            && self.objs.values().all(|&o| o <= self.size)
            && self.sets.values().all(|&m| m & !self.universe_mask() == 0)
    }

    /// Renames objects by `perm` (indexed by old object, `perm[0] == 0`).
    pub fn permute(&self, perm: &[u8]) -> Self {
        let n = self.size as usize + 1;
        let mut out = self.clone();
        for (name, f) in &self.fields {
            let g = out.fields.get_mut(name).unwrap();
            for o in 0..n {
                g[perm[o] as usize] = perm[f[o] as usize];
            }
        }
        for (name, d) in &self.data {
            let g = out.data.get_mut(name).unwrap();
            for o in 0..n {
                g[perm[o] as usize] = d[o];
            }
        }
        for o in out.objs.values_mut() {
            *o = perm[*o as usize];
        }
        for m in out.sets.values_mut() {
            let mut r = 0;
            for o in 0..n {
                if *m & (1 << o) != 0 {
                    r |= 1 << perm[o];
                }
            }
            *m = r;
        }
        out
    }
}

fn obj_name(o: u8) -> String {
    if o == 0 {
        "null".to_string()
    } else {
        format!("o{o}")
    }
}

impl fmt::Display for ConcreteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "objects: {}", self.size)?;
        for (x, o) in &self.objs {
            write!(f, "; {x} = {}", obj_name(*o))?;
        }
        for (x, i) in &self.ints {
            write!(f, "; {x} = {i}")?;
        }
        for (x, m) in &self.sets {
            let members: Vec<String> = (1..=self.size)
                .filter(|o| m & (1 << o) != 0)
                .map(obj_name)
                .collect();
            write!(f, "; {x} = {{{}}}", members.join(", "))?;
        }
        for (name, g) in &self.fields {
            let cells: Vec<String> = (1..=self.size as usize)
                .map(|o| format!("{}->{}", obj_name(o as u8), obj_name(g[o])))
                .collect();
            write!(f, "; {name}: {}", cells.join(" "))?;
        }
        for (name, d) in &self.data {
            let cells: Vec<String> = (1..=self.size as usize)
                .map(|o| format!("{}={}", obj_name(o as u8), d[o]))
                .collect();
            write!(f, "; {name}: {}", cells.join(" "))?;
        }
        Ok(())
    }
}

enum FieldVal<'a> {
    Obj(std::borrow::Cow<'a, [u8]>),
    Int(std::borrow::Cow<'a, [i64]>),
}

struct Ctx<'s> {
    s: &'s ConcreteState,
    env: Vec<(Name, u8)>,
}

impl<'s> Ctx<'s> {
    fn lookup(&self, n: &str) -> Option<u8> {
        self.env.iter().rev().find(|(b, _)| b == n).map(|(_, o)| *o)
    }

    fn field(&mut self, f: &Field) -> Result<FieldVal<'s>, EvalError> {
        match f {
            Field::Named(n) => {
                if let Some(g) = self.s.fields.get(n) {
                    Ok(FieldVal::Obj(g.as_slice().into()))
                } else if let Some(d) = self.s.data.get(n) {
                    Ok(FieldVal::Int(d.as_slice().into()))
                } else {
                    Err(EvalError::UnknownField(n.clone()))
                }
            }
            Field::Update(inner, at, to) => {
                let base = self.field(inner)?;
                let at = self.obj(at)?;
                match base {
                    FieldVal::Obj(g) => {
                        let to = self.obj(to)?;
                        let mut g = g.into_owned();
                        if at != 0 {
                            g[at as usize] = to;
                        }
                        Ok(FieldVal::Obj(g.into()))
                    }
                    FieldVal::Int(d) => {
                        let to = self.int(to)?;
                        let mut d = d.into_owned();
                        if at != 0 {
                            d[at as usize] = to;
                        }
                        Ok(FieldVal::Int(d.into()))
                    }
                }
            }
        }
    }

    fn obj(&mut self, e: &Expr) -> Result<u8, EvalError> {
        match self.term(e)? {
            Value::Obj(o) => Ok(o),
            _ => Err(EvalError::Sort(e.to_string())),
        }
    }

    fn int(&mut self, e: &Expr) -> Result<i64, EvalError> {
        match self.term(e)? {
            Value::Int(i) => Ok(i),
            _ => Err(EvalError::Sort(e.to_string())),
        }
    }

    fn set(&mut self, e: &Expr) -> Result<u64, EvalError> {
        match self.term(e)? {
            Value::Set(m) => Ok(m),
            _ => Err(EvalError::Sort(e.to_string())),
        }
    }

    fn truth(&mut self, e: &Expr) -> Result<bool, EvalError> {
        match self.term(e)? {
            Value::Bool(b) => Ok(b),
            _ => Err(EvalError::Sort(e.to_string())),
        }
    }

    fn quant(&mut self, vs: &[Name], body: &Expr, universal: bool) -> Result<bool, EvalError> {
        match vs.split_first() {
            None => self.truth(body),
            Some((v, rest)) => {
                for o in self.s.objects() {
                    self.env.push((v.clone(), o));
                    let r = self.quant(rest, body, universal);
                    self.env.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                Ok(universal)
            }
        }
    }

    fn term(&mut self, e: &Expr) -> Result<Value, EvalError> {
        Ok(match e {
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Null => Value::Obj(0),
            Expr::Int(i) => Value::Int(*i),
            Expr::EmptySet => Value::Set(0),
            Expr::Var(n) => {
                if let Some(o) = self.lookup(n) {
                    Value::Obj(o)
                } else if let Some(o) = self.s.objs.get(n) {
                    Value::Obj(*o)
                } else if let Some(i) = self.s.ints.get(n) {
                    Value::Int(*i)
                } else if let Some(m) = self.s.sets.get(n) {
                    Value::Set(*m)
                } else {
                    return Err(EvalError::Unbound(n.clone()));
                }
            }
            Expr::App(Field::Named(n), t) => {
                let o = self.obj(t)? as usize;
                if let Some(g) = self.s.fields.get(n) {
                    Value::Obj(g[o])
                } else if let Some(d) = self.s.data.get(n) {
                    Value::Int(d[o])
                } else {
                    return Err(EvalError::UnknownField(n.clone()));
                }
            }
            Expr::App(f, t) => {
                let o = self.obj(t)? as usize;
                match self.field(f)? {
                    FieldVal::Obj(g) => Value::Obj(g[o]),
                    FieldVal::Int(d) => Value::Int(d[o]),
                }
            }
            Expr::Add(a, b) => Value::Int(self.int(a)?.wrapping_add(self.int(b)?)),
            Expr::Sub(a, b) => Value::Int(self.int(a)?.wrapping_sub(self.int(b)?)),
            Expr::Eq(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                if std::mem::discriminant(&x) != std::mem::discriminant(&y) {
                    return Err(EvalError::Sort(e.to_string()));
                }
                Value::Bool(x == y)
            }
            Expr::Lt(a, b) => Value::Bool(self.int(a)? < self.int(b)?),
            Expr::Le(a, b) => Value::Bool(self.int(a)? <= self.int(b)?),
            Expr::Not(a) => Value::Bool(!self.truth(a)?),
            Expr::And(xs) => {
                for x in xs {
                    if !self.truth(x)? {
                        return Ok(Value::Bool(false));
                    }
                }
                Value::Bool(true)
            }
            Expr::Or(xs) => {
                for x in xs {
                    if self.truth(x)? {
                        return Ok(Value::Bool(true));
                    }
                }
                Value::Bool(false)
            }
            Expr::Implies(a, b) => Value::Bool(!self.truth(a)? || self.truth(b)?),
            Expr::Iff(a, b) => Value::Bool(self.truth(a)? == self.truth(b)?),
            Expr::Forall(vs, body) => Value::Bool(self.quant(vs, body, true)?),
            Expr::Exists(vs, body) => Value::Bool(self.quant(vs, body, false)?),
            Expr::Reach(f, a, b) => {
                let g = match self.field(f)? {
                    FieldVal::Obj(g) => g,
                    FieldVal::Int(_) => return Err(EvalError::Sort(e.to_string())),
                };
                let (mut x, y) = (self.obj(a)?, self.obj(b)?);
                let mut found = x == y;
                for _ in 0..=self.s.size {
                    if found {
                        break;
                    }
                    x = g[x as usize];
                    found = x == y;
                }
                Value::Bool(found)
            }
            Expr::Member(a, s) => {
                let o = self.obj(a)?;
                Value::Bool(self.set(s)? & (1 << o) != 0)
            }
            Expr::Compr(w, body) => {
                let mut m = 0;
                for o in 1..=self.s.size {
                    self.env.push((w.clone(), o));
                    let r = self.truth(body);
                    self.env.pop();
                    if r? {
                        m |= 1 << o;
                    }
                }
                Value::Set(m)
            }
            Expr::Union(a, b) => Value::Set(self.set(a)? | self.set(b)?),
            Expr::Singleton(t) => Value::Set((1 << self.obj(t)?) & !1),
        })
    }
}

/// Truth value of a closed formula.
pub fn eval(s: &ConcreteState, f: &Formula) -> Result<bool, EvalError> {
    Ctx { s, env: Vec::new() }.truth(f)
}

/// Truth value with the free variable `v` bound to object `o`.
pub fn eval_at(s: &ConcreteState, f: &Formula, o: u8) -> Result<bool, EvalError> {
    Ctx {
        s,
        env: vec![(FREE_VAR.to_string(), o)],
    }
    .truth(f)
}

/// Value of a term, with optional extra object bindings.
pub fn eval_term(s: &ConcreteState, e: &Expr, env: &[(Name, u8)]) -> Result<Value, EvalError> {
    Ctx { s, env: env.to_vec() }.term(e)
}
