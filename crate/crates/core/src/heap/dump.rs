//! Stable text dump: one cube per line as `name=1 other=0`, the empty cube
//! as `true`, the empty heap as `false`; heaps of a set are separated by
//! blank lines.

use super::{Cube, Heap, HeapDomain, HeapSet};

fn cube_line(names: &[String], c: &Cube) -> String {
    if c.is_empty() {
        return "true".to_string();
    }
    c.literals()
        .map(|(p, v)| format!("{}={}", names[p], v as u8))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn dump_heap(dom: &HeapDomain, names: &[String], h: Heap) -> String {
    let cubes = dom.cubes(h);
    if cubes.is_empty() {
        return "false\n".to_string();
    }
    let mut out = String::new();
    for c in &cubes {
        out.push_str(&cube_line(names, c));
        out.push('\n');
    }
    out
}

pub fn dump_set(dom: &HeapDomain, names: &[String], s: &HeapSet) -> String {
    s.heaps()
        .iter()
        .map(|&h| dump_heap(dom, names, h))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_format() {
        let d = HeapDomain::new(2);
        let names = vec!["p".to_string(), "q".to_string()];
        let h = d.from_cubes(&[Cube::from_literals(&[(0, true), (1, false)])]);
        assert_eq!(dump_heap(&d, &names, h), "p=1 q=0\n");
        let s = d.canon([h, d.cube_heap(&Cube::literal(1, true))]);
        assert_eq!(dump_set(&d, &names, &s), "q=1\n\np=1 q=0\n");
        assert_eq!(dump_heap(&d, &names, d.top()), "true\n");
    }
}
