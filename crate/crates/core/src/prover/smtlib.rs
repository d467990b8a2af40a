//! SMT-LIB v2 export of queries and an external solver backend.
//!
//! Objects form an uninterpreted sort. With a scope, the sort is bounded by
//! `N` constants plus null and `reach` is unrolled `N` steps; without one,
//! queries using `reach` are rejected.

use super::query::{Query, Scope, Verdict};
use crate::logic::{Expr, Field, SortError};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("`reach` needs a bounded scope")]
    UnboundedReach,
    #[error("cannot export `{0}`")]
    Unsupported(String),
}

fn sym(n: &str) -> String {
    format!("|{n}|")
}

struct Tr {
    steps: Option<u8>,
    fresh: usize,
    sets: Vec<String>,
}

impl Tr {
    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("|%z{}|", self.fresh)
    }

    fn app(&mut self, f: &Field, arg: String, env: &BTreeMap<String, String>) -> Result<String, ExportError> {
        Ok(match f {
            Field::Named(n) => format!("({} {arg})", sym(n)),
            Field::Update(inner, a, b) => {
                let a = self.term(a, env)?;
                let b = self.term(b, env)?;
                let rest = self.app(inner, arg.clone(), env)?;
                format!("(ite (and (= {arg} {a}) (not (= {arg} null))) {b} {rest})")
            }
        })
    }

    /// `elem ∈ set` for a set-sorted term.
    fn member(&mut self, elem: String, set: &Expr, env: &BTreeMap<String, String>) -> Result<String, ExportError> {
        Ok(match set {
            Expr::Var(n) => format!("({} {elem})", env.get(n).cloned().unwrap_or_else(|| sym(n))),
            Expr::EmptySet => "false".into(),
            Expr::Singleton(t) => format!("(and (not (= {elem} null)) (= {elem} {}))", self.term(t, env)?),
            Expr::Union(a, b) => format!("(or {} {})", self.member(elem.clone(), a, env)?, self.member(elem, b, env)?),
            Expr::Compr(w, body) => {
                let mut inner = env.clone();
                let z = self.fresh();
                inner.insert(w.clone(), z.clone());
                format!("(and (not (= {elem} null)) (let (({z} {elem})) {}))", self.formula(body, &inner)?)
            }
            other => return Err(ExportError::Unsupported(other.to_string())),
        })
    }

    fn is_set(&self, e: &Expr, env: &BTreeMap<String, String>) -> bool {
        match e {
            Expr::EmptySet | Expr::Singleton(_) | Expr::Union(..) | Expr::Compr(..) => true,
            Expr::Var(n) => !env.contains_key(n) && self.sets.contains(n),
            _ => false,
        }
    }

    fn term(&mut self, e: &Expr, env: &BTreeMap<String, String>) -> Result<String, ExportError> {
        Ok(match e {
            Expr::Null => "null".into(),
            Expr::Int(i) if *i < 0 => format!("(- {})", -i),
            Expr::Int(i) => i.to_string(),
            Expr::Var(n) => env.get(n).cloned().unwrap_or_else(|| sym(n)),
            Expr::App(f, t) => {
                let t = self.term(t, env)?;
                self.app(f, t, env)?
            }
            Expr::Add(a, b) => format!("(+ {} {})", self.term(a, env)?, self.term(b, env)?),
            Expr::Sub(a, b) => format!("(- {} {})", self.term(a, env)?, self.term(b, env)?),
            other => return Err(ExportError::Unsupported(other.to_string())),
        })
    }

    fn formula(&mut self, e: &Expr, env: &BTreeMap<String, String>) -> Result<String, ExportError> {
        let join = |tr: &mut Self, op: &str, xs: &[Expr]| -> Result<String, ExportError> {
            let mut s = format!("({op}");
            for x in xs {
                s.push(' ');
                s.push_str(&tr.formula(x, env)?);
            }
            s.push(')');
            Ok(s)
        };
        Ok(match e {
            Expr::Bool(b) => b.to_string(),
            Expr::Eq(a, b) if self.is_set(a, env) || self.is_set(b, env) => {
                let z = self.fresh();
                format!(
                    "(forall (({z} Obj)) (= {} {}))",
                    self.member(z.clone(), a, env)?,
                    self.member(z.clone(), b, env)?
                )
            }
            Expr::Eq(a, b) => format!("(= {} {})", self.term(a, env)?, self.term(b, env)?),
            Expr::Lt(a, b) => format!("(< {} {})", self.term(a, env)?, self.term(b, env)?),
            Expr::Le(a, b) => format!("(<= {} {})", self.term(a, env)?, self.term(b, env)?),
            Expr::Not(a) => format!("(not {})", self.formula(a, env)?),
            Expr::And(xs) if xs.is_empty() => "true".into(),
            Expr::Or(xs) if xs.is_empty() => "false".into(),
            Expr::And(xs) => join(self, "and", xs)?,
            Expr::Or(xs) => join(self, "or", xs)?,
            Expr::Implies(a, b) => format!("(=> {} {})", self.formula(a, env)?, self.formula(b, env)?),
            Expr::Iff(a, b) => format!("(= {} {})", self.formula(a, env)?, self.formula(b, env)?),
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let mut inner = env.clone();
                let mut binds = String::new();
                for v in vs {
                    let z = self.fresh();
                    let _ = write!(binds, "({z} Obj)");
                    inner.insert(v.clone(), z);
                }
                let q = if matches!(e, Expr::Forall(..)) { "forall" } else { "exists" };
                format!("({q} ({binds}) {})", self.formula(body, &inner)?)
            }
            Expr::Reach(f, a, b) => {
                let steps = self.steps.ok_or(ExportError::UnboundedReach)?;
                let mut x = self.term(a, env)?;
                let y = self.term(b, env)?;
                let mut s = String::from("(or");
                for i in 0..=steps {
                    if i > 0 {
                        x = self.app(f, x, env)?;
                    }
                    let _ = write!(s, " (= {x} {y})");
                }
                s.push(')');
                s
            }
            Expr::Member(a, set) => {
                let a = self.term(a, env)?;
                self.member(a, set, env)?
            }
            other => return Err(ExportError::Unsupported(other.to_string())),
        })
    }
}

/// A script that is `unsat` exactly when the query is valid.
pub fn export_smtlib(q: &Query, scope: Option<Scope>) -> Result<String, ExportError> {
    let sig = &q.sig;
    let formula = q.as_formula();
    sig.check_formula(&formula)?;
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "(set-logic ALL)");
    let _ = writeln!(w, "(declare-sort Obj 0)");
    let _ = writeln!(w, "(declare-const null Obj)");
    if let Some(sc) = scope {
        let mut cases = String::from("(= x null)");
        for i in 1..=sc.objects {
            let _ = writeln!(w, "(declare-const |%o{i}| Obj)");
            let _ = write!(cases, " (= x |%o{i}|)");
        }
        let _ = writeln!(w, "(assert (forall ((x Obj)) (or {cases})))");
    }
    for f in &sig.fields {
        let _ = writeln!(w, "(declare-fun {0} (Obj) Obj)\n(assert (= ({0} null) null))", sym(f));
    }
    let bound = |w: &mut String, t: &str| {
        if let Some(sc) = scope {
            let _ = writeln!(w, "(assert (and (<= 0 {t}) (<= {t} {})))", sc.data_max);
        }
    };
    for d in &sig.data {
        let _ = writeln!(w, "(declare-fun {0} (Obj) Int)\n(assert (= ({0} null) 0))", sym(d));
        if let Some(sc) = scope {
            let _ = writeln!(w, "(assert (forall ((x Obj)) (and (<= 0 ({0} x)) (<= ({0} x) {1}))))", sym(d), sc.data_max);
        }
    }
    for x in &sig.obj_vars {
        let _ = writeln!(w, "(declare-const {} Obj)", sym(x));
    }
    for x in &sig.int_vars {
        let _ = writeln!(w, "(declare-const {} Int)", sym(x));
        bound(w, &sym(x));
    }
    for x in &sig.set_vars {
        let _ = writeln!(w, "(declare-fun {0} (Obj) Bool)\n(assert (not ({0} null)))", sym(x));
    }
    let _ = writeln!(w, "(declare-const |v| Obj)");
    let mut tr = Tr {
        steps: scope.map(|s| s.objects),
        fresh: 0,
        sets: sig.set_vars.iter().cloned().collect(),
    };
    let body = tr.formula(&formula, &BTreeMap::new())?;
    let _ = writeln!(w, "(assert (not {body}))");
    let _ = writeln!(w, "(check-sat)");
    Ok(out)
}

/// Runs an SMT-LIB solver binary on the exported script.
#[derive(Clone, Debug)]
pub struct ExternalSolver {
    pub program: String,
    pub timeout: Duration,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            timeout: Duration::from_secs(30),
        }
    }

    pub fn check(&self, q: &Query, scope: Option<Scope>) -> Verdict {
        let script = match export_smtlib(q, scope) {
            Ok(s) => s,
            Err(e) => return Verdict::Unknown(e.to_string()),
        };
        match self.run(&script) {
            Ok(out) => match out.lines().map(str::trim).find(|l| !l.is_empty()) {
                Some("unsat") => Verdict::Valid,
                Some("sat") => Verdict::NotValid(None),
                other => Verdict::Unknown(format!("solver answered {other:?}")),
            },
            Err(e) => Verdict::Unknown(e),
        }
    }

    fn run(&self, script: &str) -> Result<String, String> {
        if !Path::new(&self.program).exists() {
            return Err(format!("solver `{}` not found", self.program));
        }
        let mut child = Command::new(&self.program)
            .arg("-in")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?;
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(script.as_bytes())
            .map_err(|e| e.to_string())?;
        let start = Instant::now();
        loop {
            match child.try_wait().map_err(|e| e.to_string())? {
                Some(_) => break,
                None if start.elapsed() > self.timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err("solver timed out".into());
                }
                None => std::thread::sleep(Duration::from_millis(5)),
            }
        }
        let out = child.wait_with_output().map_err(|e| e.to_string())?;
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }
}
