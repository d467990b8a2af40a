//! Depth-first model search over cell vectors. Object-valued cells follow
//! the least-number heuristic: an object not yet mentioned is only tried
//! as the next fresh one.

use super::ir::{Eval, Prop};
use super::layout::{CellKind, Layout, UNSET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum NumMode {
    /// Ranks `0..=r` standing for order types; positive ranks in use must
    /// be contiguous.
    Order(u8),
    /// Literal values `0..=m`.
    Full(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Done,
    Stopped,
    Exhausted,
}

pub(crate) struct Space<'a> {
    pub lay: &'a Layout,
    pub k: u8,
    pub order: Vec<usize>,
    pub props: &'a [Prop],
    pub num: NumMode,
    pub node_limit: u64,
    num_after: Vec<usize>,
}

/// A partial assignment of the first cells of a space.
#[derive(Clone, Debug)]
pub(crate) struct Task {
    pub cells: Vec<u8>,
    pub depth: usize,
    pub used: u8,
}

impl<'a> Space<'a> {
    pub fn new(lay: &'a Layout, k: u8, order: Vec<usize>, props: &'a [Prop], num: NumMode, node_limit: u64) -> Self {
        let mut num_after = vec![0; order.len() + 1];
        for j in (0..order.len()).rev() {
            num_after[j] = num_after[j + 1] + (lay.kind(order[j]) == CellKind::Num) as usize;
        }
        Space {
            lay,
            k,
            order,
            props,
            num,
            node_limit,
            num_after,
        }
    }

    fn start(&self) -> Vec<u8> {
        let mut cells = self.lay.blank();
        for &s in &self.order {
            cells[s] = UNSET;
        }
        cells
    }

    fn values(&self, slot: usize, used: u8) -> (Vec<u8>, u8) {
        match self.lay.kind(slot) {
            CellKind::Obj => {
                let used = used.max(self.lay.owner(slot).unwrap_or(0));
                ((0..=(used + 1).min(self.k)).collect(), used)
            }
            CellKind::Num => {
                let top = match self.num {
                    NumMode::Order(r) | NumMode::Full(r) => r,
                };
                ((0..=top).collect(), used)
            }
            CellKind::Set => ((0..(1u16 << self.k)).map(|m| (m << 1) as u8).collect(), used),
        }
    }

    /// Prefixes of the first `split` cells, in search order.
    pub fn tasks(&self, split: usize) -> Vec<Task> {
        let split = split.min(self.order.len());
        let mut out = vec![Task {
            cells: self.start(),
            depth: 0,
            used: 0,
        }];
        for d in 0..split {
            let slot = self.order[d];
            let mut next = Vec::new();
            for t in out {
                let (vals, used) = self.values(slot, t.used);
                for x in vals {
                    let mut cells = t.cells.clone();
                    cells[slot] = x;
                    let u = if self.lay.kind(slot) == CellKind::Obj { used.max(x) } else { used };
                    next.push(Task {
                        cells,
                        depth: d + 1,
                        used: u,
                    });
                }
            }
            out = next;
        }
        out
    }

    /// Runs the search below `task`, calling `visit` on every model; stops
    /// when `visit` returns true.
    pub fn run(&self, task: &Task, visit: &mut dyn FnMut(&[u8]) -> bool) -> Outcome {
        let mut cells = task.cells.clone();
        let pending: Vec<usize> = (0..self.props.len()).collect();
        let mut nodes = 0u64;
        self.node(&mut cells, task.depth, task.used, &pending, &mut nodes, visit)
    }

    fn gaps_ok(&self, cells: &[u8], depth: usize) -> bool {
        if let NumMode::Order(_) = self.num {
            let mut seen = 0u64;
            for &s in &self.order[..depth] {
                if self.lay.kind(s) == CellKind::Num {
                    seen |= 1 << cells[s];
                }
            }
            let pos = seen & !1;
            let top = 64 - pos.leading_zeros() as usize;
            let missing = top.saturating_sub(1) - pos.count_ones() as usize;
            missing <= self.num_after[depth]
        } else {
            true
        }
    }

    fn node(
        &self,
        cells: &mut Vec<u8>,
        depth: usize,
        used: u8,
        pending: &[usize],
        nodes: &mut u64,
        visit: &mut dyn FnMut(&[u8]) -> bool,
    ) -> Outcome {
        *nodes += 1;
        if *nodes > self.node_limit {
            return Outcome::Exhausted;
        }
        if !self.gaps_ok(cells, depth) {
            return Outcome::Done;
        }
        let mut rest = Vec::with_capacity(pending.len());
        {
            let mut ev = Eval::new(self.lay, cells, self.k);
            for &i in pending {
                match ev.prop(&self.props[i]) {
                    Some(false) => return Outcome::Done,
                    Some(true) => {}
                    None => rest.push(i),
                }
            }
        }
        if depth == self.order.len() {
            debug_assert!(rest.is_empty());
            return if visit(cells) { Outcome::Stopped } else { Outcome::Done };
        }
        let slot = self.order[depth];
        let (vals, used) = self.values(slot, used);
        let obj = self.lay.kind(slot) == CellKind::Obj;
        for x in vals {
            cells[slot] = x;
            let u = if obj { used.max(x) } else { used };
            match self.node(cells, depth + 1, u, &rest, nodes, visit) {
                Outcome::Done => {}
                other => {
                    cells[slot] = UNSET;
                    return other;
                }
            }
        }
        cells[slot] = UNSET;
        Outcome::Done
    }
}
