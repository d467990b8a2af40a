use crate::logic::{ConcreteState, Name, Signature};
use std::collections::BTreeSet;

pub(crate) const UNSET: u8 = u8::MAX;

/// Assignment of every symbol of a signature to cells of a flat vector.
/// Object fields and data fields take one cell per non-null object.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub n: u8,
    pub fields: Vec<Name>,
    pub data: Vec<Name>,
    pub obj_vars: Vec<Name>,
    pub int_vars: Vec<Name>,
    pub set_vars: Vec<Name>,
    field_base: usize,
    data_base: usize,
    int_base: usize,
    set_base: usize,
    len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CellKind {
    Obj,
    Num,
    Set,
}

impl Layout {
    pub fn new(sig: &Signature, n: u8) -> Self {
        let v = |s: &BTreeSet<Name>| s.iter().cloned().collect::<Vec<_>>();
        let (fields, data) = (v(&sig.fields), v(&sig.data));
        let (obj_vars, int_vars, set_vars) = (v(&sig.obj_vars), v(&sig.int_vars), v(&sig.set_vars));
        let field_base = obj_vars.len() + 1;
        let data_base = field_base + fields.len() * n as usize;
        let int_base = data_base + data.len() * n as usize;
        let set_base = int_base + int_vars.len();
        let len = set_base + set_vars.len();
        Layout {
            n,
            fields,
            data,
            obj_vars,
            int_vars,
            set_vars,
            field_base,
            data_base,
            int_base,
            set_base,
            len,
        }
    }

    pub fn v_slot(&self) -> usize {
        self.obj_vars.len()
    }

    pub fn obj_slot(&self, name: &str) -> Option<usize> {
        self.obj_vars.iter().position(|x| x == name)
    }

    pub fn int_slot(&self, name: &str) -> Option<usize> {
        self.int_vars.iter().position(|x| x == name).map(|i| self.int_base + i)
    }

    pub fn set_slot(&self, name: &str) -> Option<usize> {
        self.set_vars.iter().position(|x| x == name).map(|i| self.set_base + i)
    }

    pub fn field_slot(&self, field: usize, o: u8) -> usize {
        self.field_base + field * self.n as usize + (o as usize - 1)
    }

    pub fn data_slot(&self, field: usize, o: u8) -> usize {
        self.data_base + field * self.n as usize + (o as usize - 1)
    }

    pub fn kind(&self, slot: usize) -> CellKind {
        if slot < self.data_base {
            CellKind::Obj
        } else if slot < self.set_base {
            CellKind::Num
        } else {
            CellKind::Set
        }
    }

    /// Owner object of a field or data cell.
    pub fn owner(&self, slot: usize) -> Option<u8> {
        if slot >= self.field_base && slot < self.int_base {
            Some(((slot - self.field_base) % self.n as usize) as u8 + 1)
        } else {
            None
        }
    }

    /// Cells to search for a universe of `k` objects, restricted to
    /// `symbols`: object variables, `v` if `with_v`, object fields by
    /// owner, then sets, data and integer variables.
    pub fn order(&self, k: u8, symbols: &BTreeSet<Name>, with_v: bool) -> Vec<usize> {
        let on = |x: &Name| symbols.contains(x);
        let mut out: Vec<usize> = (0..self.obj_vars.len()).filter(|&i| on(&self.obj_vars[i])).collect();
        if with_v {
            out.push(self.v_slot());
        }
        for o in 1..=k {
            for (i, f) in self.fields.iter().enumerate() {
                if on(f) {
                    out.push(self.field_slot(i, o));
                }
            }
        }
        for (i, s) in self.set_vars.iter().enumerate() {
            if on(s) {
                out.push(self.set_base + i);
            }
        }
        for o in 1..=k {
            for (i, d) in self.data.iter().enumerate() {
                if on(d) {
                    out.push(self.data_slot(i, o));
                }
            }
        }
        for (i, x) in self.int_vars.iter().enumerate() {
            if on(x) {
                out.push(self.int_base + i);
            }
        }
        out
    }

    /// Every cell set to null, 0 or the empty set.
    pub fn blank(&self) -> Vec<u8> {
        vec![0; self.len]
    }

    pub fn all_symbols(&self) -> BTreeSet<Name> {
        self.fields
            .iter()
            .chain(&self.data)
            .chain(&self.obj_vars)
            .chain(&self.int_vars)
            .chain(&self.set_vars)
            .cloned()
            .collect()
    }

    pub fn to_state(&self, sig: &Signature, k: u8, cells: &[u8]) -> ConcreteState {
        let mut s = ConcreteState::new(sig, k);
        for (i, f) in self.fields.iter().enumerate() {
            let img = s.fields.get_mut(f).unwrap();
            for o in 1..=k {
                img[o as usize] = cells[self.field_slot(i, o)];
            }
        }
        for (i, d) in self.data.iter().enumerate() {
            let img = s.data.get_mut(d).unwrap();
            for o in 1..=k {
                img[o as usize] = cells[self.data_slot(i, o)] as i64;
            }
        }
        for (i, x) in self.obj_vars.iter().enumerate() {
            s.objs.insert(x.clone(), cells[i]);
        }
        for (i, x) in self.int_vars.iter().enumerate() {
            s.ints.insert(x.clone(), cells[self.int_base + i] as i64);
        }
        for (i, x) in self.set_vars.iter().enumerate() {
            s.sets.insert(x.clone(), cells[self.set_base + i] as u64);
        }
        s
    }
}
