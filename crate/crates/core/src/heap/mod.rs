//! Cubes, Boolean heaps and sets of Boolean heaps.
//!
//! A Boolean heap is kept as the Boolean function `⋁ cubes` in a BDD
//! whose variable `2i` is predicate `i` and `2i+1` its primed copy. Its
//! cube view is the set of all prime implicants, so two heaps are
//! identified exactly when they are equivalent under cube subsumption,
//! and `⊑` on heaps coincides with implication of the functions.

pub mod bdd;
mod dump;

use crate::logic::{Expr, Formula, FREE_VAR};
use bdd::{Bdd, NodeId, VarCube, FALSE, TRUE};
use std::fmt;

pub use dump::{dump_heap, dump_set};

/// Partial assignment of predicates (by index) to truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cube {
    pub mask: u64,
    pub bits: u64,
}

pub const MAX_PREDICATES: usize = 64;

impl Cube {
    /// The empty cube, `[]`.
    pub fn top() -> Self {
        Cube::default()
    }

    pub fn literal(p: usize, value: bool) -> Self {
        Cube::top().with(p, value)
    }

    pub fn with(mut self, p: usize, value: bool) -> Self {
        let bit = 1u64 << p;
        self.mask |= bit;
        if value {
            self.bits |= bit;
        } else {
            self.bits &= !bit;
        }
        self
    }

    pub fn from_literals(lits: &[(usize, bool)]) -> Self {
        lits.iter().fold(Cube::top(), |c, &(p, v)| c.with(p, v))
    }

    pub fn get(&self, p: usize) -> Option<bool> {
        let bit = 1u64 << p;
        (self.mask & bit != 0).then_some(self.bits & bit != 0)
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_complete(&self, over: u64) -> bool {
        self.mask & over == over
    }

    /// `self ⊑ other`: every literal of `other` occurs in `self`.
    pub fn leq(&self, other: &Cube) -> bool {
        other.mask & !self.mask == 0 && (self.bits ^ other.bits) & other.mask == 0
    }

    /// Union of the two assignments, `None` if they disagree somewhere.
    pub fn meet(&self, other: &Cube) -> Option<Cube> {
        let common = self.mask & other.mask;
        if (self.bits ^ other.bits) & common != 0 {
            return None;
        }
        Some(Cube {
            mask: self.mask | other.mask,
            bits: self.bits | other.bits,
        })
    }

    /// Least upper bound: the literals both cubes share.
    pub fn join(&self, other: &Cube) -> Cube {
        let mask = self.mask & other.mask & !(self.bits ^ other.bits);
        Cube {
            mask,
            bits: self.bits & mask,
        }
    }

    /// Restriction to the predicates in `over`.
    pub fn project(&self, over: u64) -> Cube {
        Cube {
            mask: self.mask & over,
            bits: self.bits & over,
        }
    }

    pub fn literals(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        (0..MAX_PREDICATES).filter_map(move |p| self.get(p).map(|v| (p, v)))
    }

    fn vars(&self) -> VarCube {
        VarCube {
            mask: spread(self.mask),
            bits: spread(self.bits),
        }
    }

    fn from_vars(c: &VarCube) -> Cube {
        debug_assert_eq!(c.mask & ODD, 0);
        Cube {
            mask: compact(c.mask),
            bits: compact(c.bits),
        }
    }
}

const ODD: u128 = 0xAAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA;

/// Bit `i` to bit `2i`.
fn spread(m: u64) -> u128 {
    let mut x = m as u128;
    x = (x | (x << 32)) & 0x0000_0000_FFFF_FFFF_0000_0000_FFFF_FFFF;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF_0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF_00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333_3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555_5555_5555_5555_5555;
    x
}

/// Bit `2i` to bit `i`; odd bits are dropped.
fn compact(m: u128) -> u64 {
    let mut x = m & 0x5555_5555_5555_5555_5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333_3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F;
    x = (x | (x >> 4)) & 0x00FF_00FF_00FF_00FF_00FF_00FF_00FF_00FF;
    x = (x | (x >> 8)) & 0x0000_FFFF_0000_FFFF_0000_FFFF_0000_FFFF;
    x = (x | (x >> 16)) & 0x0000_0000_FFFF_FFFF_0000_0000_FFFF_FFFF;
    x = (x | (x >> 32)) & 0xFFFF_FFFF_FFFF_FFFF;
    x as u64
}

/// A Boolean heap; only meaningful together with the [`HeapDomain`] that
/// created it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Heap(NodeId);

/// A relation over unprimed and primed predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Relation(NodeId);

/// A set of Boolean heaps: an antichain under `⊑`, sorted by the cube
/// view of its members.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HeapSet {
    heaps: Vec<Heap>,
}

impl HeapSet {
    pub fn empty() -> Self {
        HeapSet::default()
    }

    pub fn heaps(&self) -> &[Heap] {
        &self.heaps
    }

    pub fn len(&self) -> usize {
        self.heaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heaps.is_empty()
    }
}

/// Owner of the decision diagram that backs heaps over a fixed number of
/// predicates.
pub struct HeapDomain {
    bdd: Bdd,
    n: usize,
}

impl HeapDomain {
    pub fn new(predicates: usize) -> Self {
        assert!(predicates <= MAX_PREDICATES, "at most {MAX_PREDICATES} predicates");
        HeapDomain {
            bdd: Bdd::new(),
            n: predicates,
        }
    }

    pub fn predicates(&self) -> usize {
        self.n
    }

    /// Mask of all predicates.
    pub fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn node_count(&self) -> usize {
        self.bdd.node_count()
    }

    pub fn bottom(&self) -> Heap {
        Heap(FALSE)
    }

    pub fn top(&self) -> Heap {
        Heap(TRUE)
    }

    pub fn is_bottom(&self, h: Heap) -> bool {
        h.0 == FALSE
    }

    pub fn cube_heap(&self, c: &Cube) -> Heap {
        Heap(self.bdd.cube(c.vars()))
    }

    pub fn from_cubes<'a>(&self, cubes: impl IntoIterator<Item = &'a Cube>) -> Heap {
        let mut f = FALSE;
        for c in cubes {
            f = self.bdd.or(f, self.bdd.cube(c.vars()));
        }
        Heap(f)
    }

    /// Canonical cube view: all prime implicants, sorted.
    pub fn cubes(&self, h: Heap) -> Vec<Cube> {
        self.bdd.primes(h.0).iter().map(Cube::from_vars).collect()
    }

    pub fn meet(&self, a: Heap, b: Heap) -> Heap {
        Heap(self.bdd.and(a.0, b.0))
    }

    pub fn join(&self, a: Heap, b: Heap) -> Heap {
        Heap(self.bdd.or(a.0, b.0))
    }

    pub fn complement(&self, a: Heap) -> Heap {
        Heap(self.bdd.not(a.0))
    }

    pub fn leq(&self, a: Heap, b: Heap) -> bool {
        self.bdd.implies(a.0, b.0)
    }

    /// Predicates the heap depends on.
    pub fn support(&self, h: Heap) -> u64 {
        compact(self.bdd.support(h.0))
    }

    /// Complete cubes over `over` that lie below some cube of `h`; `over`
    /// must contain the support of `h`.
    pub fn complete_cubes(&self, h: Heap, over: u64) -> Vec<Cube> {
        debug_assert_eq!(self.support(h) & !over, 0);
        self.bdd
            .all_sat(h.0, spread(over))
            .into_iter()
            .map(|bits| Cube {
                mask: over,
                bits: compact(bits),
            })
            .collect()
    }

    /// `C ∈_c H` for a cube complete over the support of `h`.
    pub fn in_c(&self, c: &Cube, h: Heap) -> bool {
        debug_assert!(c.is_complete(self.support(h)));
        self.bdd.eval(h.0, spread(c.bits))
    }

    /// Join of all cubes of `h`: the literals entailed by the heap, `None`
    /// for the empty heap.
    pub fn hull(&self, h: Heap) -> Option<Cube> {
        let primes = self.bdd.primes(h.0);
        let mut it = primes.iter().map(Cube::from_vars);
        let first = it.next()?;
        Some(it.fold(first, |acc, c| acc.join(&c)))
    }

    /// Removes the predicates in `drop` by existential projection.
    pub fn forget(&self, h: Heap, drop: u64) -> Heap {
        Heap(self.bdd.exists(h.0, spread(drop)))
    }

    // Relations over primed and unprimed predicates.

    pub fn relation_top(&self) -> Relation {
        Relation(TRUE)
    }

    pub fn relation_meet(&self, r: Relation, s: Relation) -> Relation {
        Relation(self.bdd.and(r.0, s.0))
    }

    /// `(p' ∧ ¬W(¬p)) ∨ (¬p' ∧ ¬W(p))`
    pub fn primed_constraint(&self, p: usize, entails_pos: Heap, entails_neg: Heap) -> Relation {
        let v = (2 * p + 1) as u32;
        let pos = self.bdd.and(self.bdd.literal(v, true), self.bdd.not(entails_neg.0));
        let neg = self.bdd.and(self.bdd.literal(v, false), self.bdd.not(entails_pos.0));
        Relation(self.bdd.or(pos, neg))
    }

    /// `∃ unprimed. H ∧ R`, primed renamed to unprimed.
    pub fn relational_product(&self, h: Heap, r: Relation) -> Heap {
        let unprimed = spread(self.all());
        let primed = self.bdd.rel_prod(h.0, r.0, unprimed);
        Heap(self.bdd.unprime(primed))
    }

    /// Cube view of a relation; primed predicate `i` appears as index
    /// `i` of the second component.
    pub fn relation_cubes(&self, r: Relation) -> Vec<(Cube, Cube)> {
        self.bdd
            .primes(r.0)
            .iter()
            .map(|c| {
                (
                    Cube {
                        mask: compact(c.mask),
                        bits: compact(c.bits),
                    },
                    Cube {
                        mask: compact(c.mask >> 1),
                        bits: compact(c.bits >> 1),
                    },
                )
            })
            .collect()
    }

    // Heap sets.

    /// Canonical heap set from arbitrary members: duplicates and heaps
    /// strictly below another member are dropped.
    pub fn canon(&self, heaps: impl IntoIterator<Item = Heap>) -> HeapSet {
        let mut hs: Vec<Heap> = heaps.into_iter().collect();
        hs.sort();
        hs.dedup();
        let keep: Vec<Heap> = hs
            .iter()
            .enumerate()
            .filter(|(i, &h)| {
                !hs.iter()
                    .enumerate()
                    .any(|(j, &g)| *i != j && g != h && self.leq(h, g))
            })
            .map(|(_, &h)| h)
            .collect();
        let mut keyed: Vec<(Vec<Cube>, Heap)> = keep.into_iter().map(|h| (self.cubes(h), h)).collect();
        keyed.sort();
        HeapSet {
            heaps: keyed.into_iter().map(|(_, h)| h).collect(),
        }
    }

    pub fn singleton(&self, h: Heap) -> HeapSet {
        HeapSet { heaps: vec![h] }
    }

    pub fn set_leq(&self, a: &HeapSet, b: &HeapSet) -> bool {
        a.heaps.iter().all(|&h| b.heaps.iter().any(|&g| self.leq(h, g)))
    }

    pub fn set_join(&self, a: &HeapSet, b: &HeapSet) -> HeapSet {
        self.canon(a.heaps.iter().chain(&b.heaps).copied())
    }

    pub fn set_meet(&self, a: &HeapSet, b: &HeapSet) -> HeapSet {
        let mut out = Vec::new();
        for &h in &a.heaps {
            for &g in &b.heaps {
                out.push(self.meet(h, g));
            }
        }
        self.canon(out)
    }

    /// Members of `a` not below any member of `b`.
    pub fn set_difference(&self, a: &HeapSet, b: &HeapSet) -> HeapSet {
        HeapSet {
            heaps: a
                .heaps
                .iter()
                .copied()
                .filter(|&h| !b.heaps.iter().any(|&g| self.leq(h, g)))
                .collect(),
        }
    }

    /// `⊔S`: the single heap joining all members; bottom for `{}`.
    pub fn flatten(&self, s: &HeapSet) -> Heap {
        s.heaps.iter().fold(self.bottom(), |acc, &h| self.join(acc, h))
    }
}

/// `∧ p(v)^C(p)`; the empty cube is `true`.
pub fn gamma_cube(preds: &[Formula], c: &Cube) -> Formula {
    Expr::and(c.literals().map(|(p, v)| {
        if v {
            preds[p].clone()
        } else {
            Expr::negate(preds[p].clone())
        }
    }))
}

/// `∀v. ⋁_{C ∈ H} γ(C)`
pub fn gamma_heap(dom: &HeapDomain, preds: &[Formula], h: Heap) -> Formula {
    let body = Expr::or(dom.cubes(h).iter().map(|c| gamma_cube(preds, c)));
    Expr::forall(vec![FREE_VAR.to_string()], body)
}

/// `⋁_{H ∈ S} γ(H)`; the empty set is `false`.
pub fn gamma_set(dom: &HeapDomain, preds: &[Formula], s: &HeapSet) -> Formula {
    Expr::or(s.heaps.iter().map(|&h| gamma_heap(dom, preds, h)))
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("[]");
        }
        let parts: Vec<String> = self
            .literals()
            .map(|(p, v)| format!("p{}={}", p, v as u8))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}
