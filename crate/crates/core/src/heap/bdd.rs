//! A small reduced ordered BDD package: hash-consed nodes in an arena,
//! memoized apply, quantification, renaming and prime-implicant extraction.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

pub type NodeId = u32;

pub const FALSE: NodeId = 0;
pub const TRUE: NodeId = 1;

const TERMINAL: u32 = u32::MAX;

/// Set of BDD variables, bit `i` for variable `i`.
pub type VarSet = u128;

/// A cube over BDD variables: `mask` marks constrained variables, `bits`
/// their values (`bits ⊆ mask`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarCube {
    pub mask: VarSet,
    pub bits: VarSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: NodeId,
    hi: NodeId,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

#[derive(Default)]
struct Inner {
    nodes: Vec<Node>,
    unique: HashMap<Node, NodeId>,
    apply: HashMap<(Op, NodeId, NodeId), NodeId>,
    not: HashMap<NodeId, NodeId>,
    exists: HashMap<(NodeId, VarSet), NodeId>,
    shift: HashMap<NodeId, NodeId>,
    primes: HashMap<NodeId, Rc<Vec<VarCube>>>,
}

/// BDD manager. Single-threaded; all methods take `&self`.
pub struct Bdd {
    inner: RefCell<Inner>,
}

impl Default for Bdd {
    fn default() -> Self {
        Self::new()
    }
}

impl Inner {
    fn node(&self, id: NodeId) -> Node {
        self.nodes[id as usize]
    }

    fn var_of(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].var
    }

    fn mk(&mut self, var: u32, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        let n = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n);
        self.unique.insert(n, id);
        id
    }

    fn cofactors(&self, id: NodeId, var: u32) -> (NodeId, NodeId) {
        let n = self.node(id);
        if n.var == var {
            (n.lo, n.hi)
        } else {
            (id, id)
        }
    }

    fn apply(&mut self, op: Op, a: NodeId, b: NodeId) -> NodeId {
        match op {
            Op::And => {
                if a == FALSE || b == FALSE {
                    return FALSE;
                }
                if a == TRUE {
                    return b;
                }
                if b == TRUE || a == b {
                    return a;
                }
            }
            Op::Or => {
                if a == TRUE || b == TRUE {
                    return TRUE;
                }
                if a == FALSE {
                    return b;
                }
                if b == FALSE || a == b {
                    return a;
                }
            }
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.apply.get(&(op, a, b)) {
            return r;
        }
        let var = self.var_of(a).min(self.var_of(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let lo = self.apply(op, a0, b0);
        let hi = self.apply(op, a1, b1);
        let r = self.mk(var, lo, hi);
        self.apply.insert((op, a, b), r);
        r
    }

    fn not(&mut self, a: NodeId) -> NodeId {
        match a {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.not.get(&a) {
            return r;
        }
        let n = self.node(a);
        let lo = self.not(n.lo);
        let hi = self.not(n.hi);
        let r = self.mk(n.var, lo, hi);
        self.not.insert(a, r);
        r
    }

    fn exists(&mut self, a: NodeId, vars: VarSet) -> NodeId {
        if a <= TRUE || vars == 0 {
            return a;
        }
        let n = self.node(a);
        if vars >> n.var == 0 {
            return a;
        }
        if let Some(&r) = self.exists.get(&(a, vars)) {
            return r;
        }
        let lo = self.exists(n.lo, vars);
        let hi = self.exists(n.hi, vars);
        let r = if vars & (1u128 << n.var) != 0 {
            self.apply(Op::Or, lo, hi)
        } else {
            self.mk(n.var, lo, hi)
        };
        self.exists.insert((a, vars), r);
        r
    }

    /// Renames every odd variable `2i+1` to `2i`. Requires that no even
    /// variable occurs, which keeps the variable order intact.
    fn shift_down(&mut self, a: NodeId) -> NodeId {
        if a <= TRUE {
            return a;
        }
        if let Some(&r) = self.shift.get(&a) {
            return r;
        }
        let n = self.node(a);
        assert!(n.var % 2 == 1, "shift_down applied to a function over even variables");
        let lo = self.shift_down(n.lo);
        let hi = self.shift_down(n.hi);
        let r = self.mk(n.var - 1, lo, hi);
        self.shift.insert(a, r);
        r
    }

    fn primes(&mut self, a: NodeId) -> Rc<Vec<VarCube>> {
        if a == FALSE {
            return Rc::new(Vec::new());
        }
        if a == TRUE {
            return Rc::new(vec![VarCube { mask: 0, bits: 0 }]);
        }
        if let Some(r) = self.primes.get(&a) {
            return r.clone();
        }
        let n = self.node(a);
        let both = self.apply(Op::And, n.lo, n.hi);
        let common = self.primes(both);
        let p0 = self.primes(n.lo);
        let p1 = self.primes(n.hi);
        let bit = 1u128 << n.var;
        let mut out: Vec<VarCube> = common.as_ref().clone();
        for c in p0.iter() {
            if common.binary_search(c).is_err() {
                out.push(VarCube {
                    mask: c.mask | bit,
                    bits: c.bits,
                });
            }
        }
        for c in p1.iter() {
            if common.binary_search(c).is_err() {
                out.push(VarCube {
                    mask: c.mask | bit,
                    bits: c.bits | bit,
                });
            }
        }
        out.sort();
        let r = Rc::new(out);
        self.primes.insert(a, r.clone());
        r
    }

    fn support(&self, a: NodeId, seen: &mut std::collections::HashSet<NodeId>, out: &mut VarSet) {
        if a <= TRUE || !seen.insert(a) {
            return;
        }
        let n = self.node(a);
        *out |= 1u128 << n.var;
        self.support(n.lo, seen, out);
        self.support(n.hi, seen, out);
    }

    fn all_sat(&self, a: NodeId, vars: &[u32], acc: VarSet, out: &mut Vec<VarSet>) {
        if a == FALSE {
            return;
        }
        match vars.split_first() {
            None => {
                debug_assert!(a == TRUE, "function depends on variables outside the enumeration set");
                out.push(acc);
            }
            Some((&v, rest)) => {
                let (lo, hi) = self.cofactors(a, v);
                self.all_sat(lo, rest, acc, out);
                self.all_sat(hi, rest, acc | (1u128 << v), out);
            }
        }
    }
}

impl Bdd {
    pub fn new() -> Self {
        let mut inner = Inner::default();
        let t = Node {
            var: TERMINAL,
            lo: FALSE,
            hi: FALSE,
        };
        inner.nodes.push(t);
        inner.nodes.push(Node {
            var: TERMINAL,
            lo: TRUE,
            hi: TRUE,
        });
        Bdd {
            inner: RefCell::new(inner),
        }
    }

    pub fn node_count(&self) -> usize {
        self.inner.borrow().nodes.len()
    }

    pub fn var(&self, v: u32) -> NodeId {
        self.inner.borrow_mut().mk(v, FALSE, TRUE)
    }

    pub fn literal(&self, v: u32, value: bool) -> NodeId {
        if value {
            self.inner.borrow_mut().mk(v, FALSE, TRUE)
        } else {
            self.inner.borrow_mut().mk(v, TRUE, FALSE)
        }
    }

    pub fn cube(&self, c: VarCube) -> NodeId {
        let mut inner = self.inner.borrow_mut();
        let mut r = TRUE;
        for v in (0..128u32).rev() {
            let bit = 1u128 << v;
            if c.mask & bit != 0 {
                r = if c.bits & bit != 0 {
                    inner.mk(v, FALSE, r)
                } else {
                    inner.mk(v, r, FALSE)
                };
            }
        }
        r
    }

    pub fn and(&self, a: NodeId, b: NodeId) -> NodeId {
        self.inner.borrow_mut().apply(Op::And, a, b)
    }

    pub fn or(&self, a: NodeId, b: NodeId) -> NodeId {
        self.inner.borrow_mut().apply(Op::Or, a, b)
    }

    pub fn not(&self, a: NodeId) -> NodeId {
        self.inner.borrow_mut().not(a)
    }

    /// `a → b` is a tautology.
    pub fn implies(&self, a: NodeId, b: NodeId) -> bool {
        let mut inner = self.inner.borrow_mut();
        let nb = inner.not(b);
        inner.apply(Op::And, a, nb) == FALSE
    }

    pub fn exists(&self, a: NodeId, vars: VarSet) -> NodeId {
        self.inner.borrow_mut().exists(a, vars)
    }

    /// `∃vars. a ∧ b`
    pub fn rel_prod(&self, a: NodeId, b: NodeId, vars: VarSet) -> NodeId {
        let mut inner = self.inner.borrow_mut();
        let c = inner.apply(Op::And, a, b);
        inner.exists(c, vars)
    }

    /// Renames odd (primed) variables to the even variable below them.
    pub fn unprime(&self, a: NodeId) -> NodeId {
        self.inner.borrow_mut().shift_down(a)
    }

    /// All prime implicants, sorted.
    pub fn primes(&self, a: NodeId) -> Rc<Vec<VarCube>> {
        self.inner.borrow_mut().primes(a)
    }

    pub fn support(&self, a: NodeId) -> VarSet {
        let mut out = 0;
        self.inner
            .borrow()
            .support(a, &mut std::collections::HashSet::new(), &mut out);
        out
    }

    /// All satisfying assignments over `vars` (which must cover the
    /// support), in lexicographic order of the variable list.
    pub fn all_sat(&self, a: NodeId, vars: VarSet) -> Vec<VarSet> {
        let list: Vec<u32> = (0..128).filter(|v| vars & (1u128 << v) != 0).collect();
        let mut out = Vec::new();
        self.inner.borrow().all_sat(a, &list, 0, &mut out);
        out
    }

    pub fn eval(&self, a: NodeId, assignment: VarSet) -> bool {
        let inner = self.inner.borrow();
        let mut id = a;
        while id > TRUE {
            let n = inner.node(id);
            id = if assignment & (1u128 << n.var) != 0 { n.hi } else { n.lo };
        }
        id == TRUE
    }
}
