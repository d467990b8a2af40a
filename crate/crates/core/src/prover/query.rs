use crate::logic::{ConcreteState, Expr, Formula, Signature};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Objects `1..=objects` plus null; data and integer variables in
/// `[0, data_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scope {
    pub objects: u8,
    pub data_max: i64,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            objects: 3,
            data_max: 7,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} M={}", self.objects, self.data_max)
    }
}

/// Position of a query's context in a sequence of successively weaker
/// contexts: every context at an earlier position entails the later ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainPos {
    pub chain: u64,
    pub pos: u32,
}

/// `context ∧ assumptions ⊨ goal`, universally closed over the free
/// variable `v` and all program symbols.
///
/// `context` holds closed formulas shared by many queries; the first
/// element is the most stable part.
#[derive(Clone, Debug)]
pub struct Query {
    pub sig: Arc<Signature>,
    pub context: Vec<Formula>,
    pub assumptions: Vec<Formula>,
    pub goal: Formula,
    pub chain: Option<ChainPos>,
}

impl Query {
    pub fn new(sig: Arc<Signature>, goal: Formula) -> Self {
        Query {
            sig,
            context: Vec::new(),
            assumptions: Vec::new(),
            goal,
            chain: None,
        }
    }

    pub fn with_context(mut self, context: Vec<Formula>) -> Self {
        self.context = context;
        self
    }

    pub fn assume(mut self, f: Formula) -> Self {
        self.assumptions.push(f);
        self
    }

    pub fn in_chain(mut self, chain: Option<ChainPos>) -> Self {
        self.chain = chain;
        self
    }

    /// The single formula whose validity the query asks for.
    pub fn as_formula(&self) -> Formula {
        let hyps: Vec<Formula> = self.context.iter().chain(&self.assumptions).cloned().collect();
        Expr::implies_simplified(Expr::and(hyps), self.goal.clone())
    }
}

/// A state and object for `v` falsifying a query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub state: ConcreteState,
    pub v: u8,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.v == 0 { "null".to_string() } else { format!("o{}", self.v) };
        write!(f, "{}; v = {v}", self.state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    NotValid(Option<Witness>),
    Unknown(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn is_not_valid(&self) -> bool {
        matches!(self, Verdict::NotValid(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::NotValid(w) => w.as_ref(),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::NotValid(_) => "not-valid",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => f.write_str("valid"),
            Verdict::NotValid(None) => f.write_str("not valid"),
            Verdict::NotValid(Some(w)) => write!(f, "not valid: {w}"),
            Verdict::Unknown(r) => write!(f, "unknown ({r})"),
        }
    }
}
