//! Slot-resolved formulas and their three-valued evaluation over partially
//! assigned cell vectors.

use super::layout::{Layout, UNSET};
use crate::logic::{Expr, Field, Name, FREE_VAR};

#[derive(Debug)]
pub(crate) enum Term {
    Null,
    Int(i64),
    Obj(usize),
    Num(usize),
    SetCell(usize),
    Bound(usize),
    App(Fld, Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Compr(Box<Prop>),
    Union(Box<Term>, Box<Term>),
    Singleton(Box<Term>),
    Empty,
}

#[derive(Debug)]
pub(crate) enum Fld {
    Ptr(usize),
    Data(usize),
    Upd(Box<Fld>, Box<Term>, Box<Term>),
}

#[derive(Debug)]
pub(crate) enum Prop {
    Const(bool),
    Eq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
    All(usize, Box<Prop>),
    Ex(usize, Box<Prop>),
    Reach(Fld, Term, Term),
    Member(Term, Term),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Val {
    O(u8),
    I(i64),
    S(u64),
}

pub(crate) struct Compiler<'a> {
    lay: &'a Layout,
    env: Vec<Name>,
}

impl<'a> Compiler<'a> {
    pub fn new(lay: &'a Layout) -> Self {
        Compiler { lay, env: Vec::new() }
    }

    pub fn prop(&mut self, e: &Expr) -> Result<Prop, String> {
        Ok(match e {
            Expr::Bool(b) => Prop::Const(*b),
            Expr::Eq(a, b) => Prop::Eq(self.term(a)?, self.term(b)?),
            Expr::Lt(a, b) => Prop::Lt(self.term(a)?, self.term(b)?),
            Expr::Le(a, b) => Prop::Le(self.term(a)?, self.term(b)?),
            Expr::Not(a) => Prop::Not(Box::new(self.prop(a)?)),
            Expr::And(xs) => Prop::And(xs.iter().map(|x| self.prop(x)).collect::<Result<_, _>>()?),
            Expr::Or(xs) => Prop::Or(xs.iter().map(|x| self.prop(x)).collect::<Result<_, _>>()?),
            Expr::Implies(a, b) => Prop::Implies(Box::new(self.prop(a)?), Box::new(self.prop(b)?)),
            Expr::Iff(a, b) => Prop::Iff(Box::new(self.prop(a)?), Box::new(self.prop(b)?)),
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let n = self.env.len();
                self.env.extend(vs.iter().cloned());
                let body = self.prop(body);
                self.env.truncate(n);
                let body = Box::new(body?);
                if matches!(e, Expr::Forall(..)) {
                    Prop::All(vs.len(), body)
                } else {
                    Prop::Ex(vs.len(), body)
                }
            }
            Expr::Reach(f, a, b) => Prop::Reach(self.field(f)?, self.term(a)?, self.term(b)?),
            Expr::Member(a, s) => Prop::Member(self.term(a)?, self.term(s)?),
            other => return Err(format!("`{other}` is not a formula")),
        })
    }

    fn field(&mut self, f: &Field) -> Result<Fld, String> {
        Ok(match f {
            Field::Named(n) => {
                if let Some(i) = self.lay.fields.iter().position(|x| x == n) {
                    Fld::Ptr(i)
                } else if let Some(i) = self.lay.data.iter().position(|x| x == n) {
                    Fld::Data(i)
                } else {
                    return Err(format!("unknown field `{n}`"));
                }
            }
            Field::Update(inner, a, b) => Fld::Upd(
                Box::new(self.field(inner)?),
                Box::new(self.term(a)?),
                Box::new(self.term(b)?),
            ),
        })
    }

    fn term(&mut self, e: &Expr) -> Result<Term, String> {
        let b = |c: &mut Self, x: &Expr| c.term(x).map(Box::new);
        Ok(match e {
            Expr::Null => Term::Null,
            Expr::Int(i) => Term::Int(*i),
            Expr::EmptySet => Term::Empty,
            Expr::Var(n) => {
                if let Some(level) = self.env.iter().rposition(|x| x == n) {
                    Term::Bound(level)
                } else if n == FREE_VAR {
                    Term::Obj(self.lay.v_slot())
                } else if let Some(s) = self.lay.obj_slot(n) {
                    Term::Obj(s)
                } else if let Some(s) = self.lay.int_slot(n) {
                    Term::Num(s)
                } else if let Some(s) = self.lay.set_slot(n) {
                    Term::SetCell(s)
                } else {
                    return Err(format!("unknown variable `{n}`"));
                }
            }
            Expr::App(f, t) => Term::App(self.field(f)?, b(self, t)?),
            Expr::Add(x, y) => Term::Add(b(self, x)?, b(self, y)?),
            Expr::Sub(x, y) => Term::Sub(b(self, x)?, b(self, y)?),
            Expr::Union(x, y) => Term::Union(b(self, x)?, b(self, y)?),
            Expr::Singleton(x) => Term::Singleton(b(self, x)?),
            Expr::Compr(w, body) => {
                self.env.push(w.clone());
                let body = self.prop(body);
                self.env.pop();
                Term::Compr(Box::new(body?))
            }
            other => return Err(format!("`{other}` is not a term")),
        })
    }
}

/// Evaluation over `cells` for a universe of `k` objects. `None` means the
/// value depends on unassigned cells.
pub(crate) struct Eval<'a> {
    pub lay: &'a Layout,
    pub cells: &'a [u8],
    pub k: u8,
    pub env: Vec<u8>,
}

fn known(x: Option<bool>, y: Option<bool>, f: impl Fn(bool, bool) -> bool) -> Option<bool> {
    Some(f(x?, y?))
}

impl<'a> Eval<'a> {
    pub fn new(lay: &'a Layout, cells: &'a [u8], k: u8) -> Self {
        Eval {
            lay,
            cells,
            k,
            env: Vec::new(),
        }
    }

    fn cell(&self, slot: usize) -> Option<u8> {
        let c = self.cells[slot];
        (c != UNSET).then_some(c)
    }

    fn obj(&mut self, t: &Term) -> Option<u8> {
        match self.term(t)? {
            Val::O(o) => Some(o),
            _ => None,
        }
    }

    fn app(&mut self, f: &Fld, o: u8) -> Option<Val> {
        match f {
            Fld::Ptr(i) => {
                if o == 0 {
                    Some(Val::O(0))
                } else {
                    self.cell(self.lay.field_slot(*i, o)).map(Val::O)
                }
            }
            Fld::Data(i) => {
                if o == 0 {
                    Some(Val::I(0))
                } else {
                    self.cell(self.lay.data_slot(*i, o)).map(|c| Val::I(c as i64))
                }
            }
            Fld::Upd(inner, at, to) => {
                if o != 0 && self.obj(at)? == o {
                    self.term(to)
                } else {
                    self.app(inner, o)
                }
            }
        }
    }

    pub fn term(&mut self, t: &Term) -> Option<Val> {
        Some(match t {
            Term::Null => Val::O(0),
            Term::Int(i) => Val::I(*i),
            Term::Obj(s) => Val::O(self.cell(*s)?),
            Term::Num(s) => Val::I(self.cell(*s)? as i64),
            Term::SetCell(s) => Val::S(self.cell(*s)? as u64),
            Term::Bound(level) => Val::O(self.env[*level]),
            Term::App(f, x) => {
                let o = self.obj(x)?;
                return self.app(f, o);
            }
            Term::Add(x, y) => match (self.term(x)?, self.term(y)?) {
                (Val::I(a), Val::I(b)) => Val::I(a.wrapping_add(b)),
                _ => return None,
            },
            Term::Sub(x, y) => match (self.term(x)?, self.term(y)?) {
                (Val::I(a), Val::I(b)) => Val::I(a.wrapping_sub(b)),
                _ => return None,
            },
            Term::Compr(body) => {
                let mut m = 0u64;
                for o in 1..=self.k {
                    self.env.push(o);
                    let r = self.prop(body);
                    self.env.pop();
                    if r? {
                        m |= 1 << o;
                    }
                }
                Val::S(m)
            }
            Term::Union(x, y) => match (self.term(x)?, self.term(y)?) {
                (Val::S(a), Val::S(b)) => Val::S(a | b),
                _ => return None,
            },
            Term::Singleton(x) => Val::S((1 << self.obj(x)?) & !1),
            Term::Empty => Val::S(0),
        })
    }

    fn quant(&mut self, n: usize, body: &Prop, universal: bool) -> Option<bool> {
        if n == 0 {
            return self.prop(body);
        }
        let mut unknown = false;
        for o in 0..=self.k {
            self.env.push(o);
            let r = self.quant(n - 1, body, universal);
            self.env.pop();
            match r {
                Some(b) if b != universal => return Some(b),
                None => unknown = true,
                _ => {}
            }
        }
        if unknown {
            None
        } else {
            Some(universal)
        }
    }

    pub fn prop(&mut self, p: &Prop) -> Option<bool> {
        match p {
            Prop::Const(b) => Some(*b),
            Prop::Eq(a, b) => {
                let x = self.term(a);
                let y = self.term(b);
                Some(x? == y?)
            }
            Prop::Lt(a, b) => match (self.term(a)?, self.term(b)?) {
                (Val::I(x), Val::I(y)) => Some(x < y),
                _ => None,
            },
            Prop::Le(a, b) => match (self.term(a)?, self.term(b)?) {
                (Val::I(x), Val::I(y)) => Some(x <= y),
                _ => None,
            },
            Prop::Not(a) => self.prop(a).map(|b| !b),
            Prop::And(xs) => {
                let mut unknown = false;
                for x in xs {
                    match self.prop(x) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Prop::Or(xs) => {
                let mut unknown = false;
                for x in xs {
                    match self.prop(x) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Prop::Implies(a, b) => match self.prop(a) {
                Some(false) => Some(true),
                x => match self.prop(b) {
                    Some(true) => Some(true),
                    y => known(x, y, |a, b| !a || b),
                },
            },
            Prop::Iff(a, b) => {
                let x = self.prop(a);
                let y = self.prop(b);
                known(x, y, |a, b| a == b)
            }
            Prop::All(n, body) => self.quant(*n, body, true),
            Prop::Ex(n, body) => self.quant(*n, body, false),
            Prop::Reach(f, a, b) => {
                let mut x = self.obj(a)?;
                let y = self.obj(b)?;
                for _ in 0..=self.k {
                    if x == y {
                        return Some(true);
                    }
                    x = match self.app(f, x)? {
                        Val::O(o) => o,
                        _ => return None,
                    };
                }
                Some(x == y)
            }
            Prop::Member(a, s) => {
                let o = self.obj(a);
                let m = match self.term(s)? {
                    Val::S(m) => m,
                    _ => return None,
                };
                let o = o?;
                Some(m & (1 << o) != 0)
            }
        }
    }
}
