//! Checking verification conditions and rendering the results.

use super::analysis::{Analysis, Timings};
use crate::heap::dump_set;
use crate::logic::conjuncts;
use crate::prover::{Prover, Scope, Verdict};
use serde_json::json;
use std::fmt;
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Failed,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "VERIFIED",
            Status::Failed => "FAILED",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcResult {
    pub from: String,
    pub to: String,
    pub path: Vec<String>,
    pub conjunct: usize,
    pub conjuncts: usize,
    pub conclusion: String,
    pub verdict: Verdict,
    /// Abstract trace to the start of the path, for failed conditions.
    pub trace: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocationReport {
    pub location: String,
    pub conjuncts: Vec<String>,
    pub heaps: String,
    pub invariant: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub procedure: String,
    pub scope: Scope,
    pub locations: Vec<LocationReport>,
    pub vcs: Vec<VcResult>,
    pub status: Status,
}

/// Counters in the roles of a results table: predicates, checker calls
/// and time per phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Stats {
    pub procedure: String,
    pub predicates: usize,
    pub user_predicates: usize,
    pub calls: u64,
    pub hits: u64,
    pub hit_percent: f64,
    pub backend_calls: u64,
    pub transitions: u64,
    pub nodes: usize,
    pub timings: Timings,
}

pub fn status_of<'v>(verdicts: impl IntoIterator<Item = &'v Verdict>) -> Status {
    let mut status = Status::Verified;
    for v in verdicts {
        match v {
            Verdict::NotValid(_) => return Status::Failed,
            Verdict::Unknown(_) => status = Status::Inconclusive,
            Verdict::Valid => {}
        }
    }
    status
}

impl Analysis<'_> {
    /// Checks every verification condition and assembles the report.
    pub fn check(&mut self, prover: &Prover) -> Result<Report, super::EngineError> {
        let t = Instant::now();
        let p = self.procedure;
        let names = self.predicate_names();
        let vcs = self.vcgen()?;
        let mut results = Vec::with_capacity(vcs.len());
        for vc in &vcs {
            let verdict = prover.check(&vc.query);
            let mut path = vec![p.locations[vc.from].clone()];
            path.extend(vc.edges.iter().map(|&e| p.locations[p.edges[e].to].clone()));
            results.push(VcResult {
                from: p.locations[vc.from].clone(),
                to: p.locations[vc.to].clone(),
                path,
                conjunct: vc.conjunct,
                conjuncts: vc.conjuncts,
                conclusion: vc.conclusion.to_string(),
                trace: verdict.is_not_valid().then(|| self.trace_to(vc.from)).flatten(),
                verdict,
            });
        }
        let locations = self
            .annotated()
            .into_iter()
            .map(|l| LocationReport {
                location: p.locations[l].clone(),
                conjuncts: self.conjuncts.at(l).iter().map(|c| c.to_string()).collect(),
                heaps: dump_set(&self.abstraction.dom, &names, &self.states[l]),
                invariant: self.invariant_at(l).to_string(),
            })
            .collect();
        self.timings.check = t.elapsed();
        Ok(Report {
            procedure: p.name.clone(),
            scope: prover.scope,
            status: status_of(results.iter().map(|r| &r.verdict)),
            locations,
            vcs: results,
        })
    }

    pub fn stats(&self, prover: &Prover) -> Stats {
        let ps = prover.stats();
        Stats {
            procedure: self.procedure.name.clone(),
            predicates: self.abstraction.predicates.len(),
            user_predicates: self.procedure.user_predicate_count(),
            calls: ps.calls,
            hits: ps.hits,
            hit_percent: ps.hit_percent(),
            backend_calls: ps.backend_calls,
            transitions: self.abstraction.stats().transitions,
            nodes: self.nodes.len(),
            timings: self.timings,
        }
    }
}

impl Report {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for r in &self.vcs {
            match r.verdict {
                Verdict::Valid => c.0 += 1,
                Verdict::NotValid(_) => c.1 += 1,
                Verdict::Unknown(_) => c.2 += 1,
            }
        }
        c
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "procedure {}: {} at {}", self.procedure, self.status, self.scope);
        for l in &self.locations {
            let _ = writeln!(w, "\ninvariant at {}:", l.location);
            for c in &l.conjuncts {
                let _ = writeln!(w, "  {c}");
            }
            let _ = writeln!(w, "  heaps:");
            for line in l.heaps.lines() {
                if line.is_empty() {
                    let _ = writeln!(w, "    --");
                } else {
                    let _ = writeln!(w, "    {line}");
                }
            }
        }
        let (valid, bad, unknown) = self.counts();
        let _ = writeln!(
            w,
            "\nverification conditions: {} ({valid} valid, {bad} not valid, {unknown} unknown)",
            self.vcs.len()
        );
        for r in &self.vcs {
            let _ = writeln!(
                w,
                "  {} [{}/{}] {}: {}",
                r.path.join(" -> "),
                r.conjunct,
                r.conjuncts,
                r.verdict.label(),
                r.conclusion
            );
            match &r.verdict {
                Verdict::NotValid(Some(wit)) => {
                    let _ = writeln!(w, "    witness: {}; v = {}", wit.state, wit.v);
                }
                Verdict::Unknown(why) => {
                    let _ = writeln!(w, "    reason: {why}");
                }
                _ => {}
            }
            if let Some(t) = &r.trace {
                let _ = writeln!(w, "    trace: {}", t.join(" -> "));
            }
        }
        out
    }

    /// One JSON object per line: locations, conditions, then a summary.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for l in &self.locations {
            let rec = json!({
                "kind": "location",
                "procedure": self.procedure,
                "location": l.location,
                "conjuncts": l.conjuncts,
                "heaps": l.heaps,
                "invariant": l.invariant,
            });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        for r in &self.vcs {
            let rec = json!({
                "kind": "vc",
                "procedure": self.procedure,
                "path": r.path,
                "conjunct": r.conjunct,
                "conjuncts": r.conjuncts,
                "conclusion": r.conclusion,
                "verdict": r.verdict.label(),
                "detail": r.verdict,
                "trace": r.trace,
            });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        let (valid, bad, unknown) = self.counts();
        let rec = json!({
            "kind": "summary",
            "procedure": self.procedure,
            "status": self.status.to_string(),
            "scope": self.scope.to_string(),
            "valid": valid,
            "not_valid": bad,
            "unknown": unknown,
        });
        out.push_str(&rec.to_string());
        out.push('\n');
        out
    }
}

impl Stats {
    pub const HEADER: &'static str =
        "procedure\tpredicates (user)\tcalls\thit %\tbackend\ttransitions\tnodes\tpropagate s\treach s\tcheck s";

    pub fn row(&self) -> String {
        format!(
            "{}\t{} ({})\t{}\t{:.1}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
            self.procedure,
            self.predicates,
            self.user_predicates,
            self.calls,
            self.hit_percent,
            self.backend_calls,
            self.transitions,
            self.nodes,
            self.timings.propagate.as_secs_f64(),
            self.timings.reach.as_secs_f64(),
            self.timings.check.as_secs_f64()
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": "stats",
            "procedure": self.procedure,
            "predicates": self.predicates,
            "user_predicates": self.user_predicates,
            "calls": self.calls,
            "hits": self.hits,
            "hit_percent": self.hit_percent,
            "backend_calls": self.backend_calls,
            "transitions": self.transitions,
            "nodes": self.nodes,
            "propagate_s": self.timings.propagate.as_secs_f64(),
            "reach_s": self.timings.reach.as_secs_f64(),
            "check_s": self.timings.check.as_secs_f64(),
        })
    }
}

/// Number of top-level conjuncts of a formula, as used to split a
/// condition into queries.
pub fn conjunct_count(f: &crate::logic::Formula) -> usize {
    conjuncts(f).len()
}
