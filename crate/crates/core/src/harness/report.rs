use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{HarnessError, RunResult, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowKind {
    NoFilt,
    SynFilt,
    SemFilt,
    NonVer,
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Problem populations of the table rows. `verified` is the full benchmark;
/// `aind_syn` and `aind_sem` are its filtered subsets.
#[derive(Debug, Clone, Default)]
pub struct Manifests {
    pub verified: Vec<String>,
    pub aind_syn: Vec<String>,
    pub aind_sem: Vec<String>,
    pub nonverified: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub kind: RowKind,
    pub population: usize,
    pub counts: Vec<usize>,
    pub all: usize,
}

/// A counterexample claimed for a problem whose sides agree on every checked input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Anomaly {
    pub id: String,
    pub solver: String,
    pub variant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportTable {
    /// `solver:variant` per method column.
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub anomalies: Vec<Anomaly>,
}

fn subset(
    inner: &BTreeSet<&str>,
    outer: &BTreeSet<&str>,
    names: (&'static str, &'static str),
) -> Result<(), HarnessError> {
    let missing: Vec<String> = inner.difference(outer).map(|s| s.to_string()).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::NotSubset {
            inner: names.0,
            outer: names.1,
            missing,
        })
    }
}

fn set(v: &[String]) -> BTreeSet<&str> {
    v.iter().map(String::as_str).collect()
}

/// Counts proved problems per method and row population.
pub fn aggregate(results: &[RunResult], m: &Manifests) -> Result<ReportTable, HarnessError> {
    let (verified, syn, sem, nonver) = (
        set(&m.verified),
        set(&m.aind_syn),
        set(&m.aind_sem),
        set(&m.nonverified),
    );
    subset(&syn, &verified, ("aind_syn", "the verified set"))?;
    subset(&sem, &syn, ("aind_sem", "aind_syn"))?;

    let orphans: BTreeSet<String> = results
        .iter()
        .filter(|r| !verified.contains(r.id.as_str()) && !nonver.contains(r.id.as_str()))
        .map(|r| r.id.clone())
        .collect();
    if !orphans.is_empty() {
        return Err(HarnessError::Orphans(orphans.into_iter().collect()));
    }

    let mut proved: BTreeMap<(String, String), BTreeSet<&str>> = BTreeMap::new();
    let mut anomalies = BTreeSet::new();
    for r in results {
        let slot = proved
            .entry((r.solver.clone(), r.variant.clone()))
            .or_default();
        match r.verdict {
            Verdict::Proved => {
                slot.insert(r.id.as_str());
            }
            Verdict::CounterSat if verified.contains(r.id.as_str()) => {
                anomalies.insert((r.id.clone(), r.solver.clone(), r.variant.clone()));
            }
            _ => {}
        }
    }

    let populations = [
        (RowKind::NoFilt, &verified),
        (RowKind::SynFilt, &syn),
        (RowKind::SemFilt, &sem),
        (RowKind::NonVer, &nonver),
    ];
    let rows = populations
        .into_iter()
        .map(|(kind, pop)| {
            let counts = proved
                .values()
                .map(|s| s.intersection(pop).count())
                .collect();
            let union: BTreeSet<&str> = proved.values().flatten().copied().collect();
            ReportRow {
                kind,
                population: pop.len(),
                counts,
                all: union.intersection(pop).count(),
            }
        })
        .collect();

    Ok(ReportTable {
        columns: proved.keys().map(|(s, v)| format!("{s}:{v}")).collect(),
        rows,
        anomalies: anomalies
            .into_iter()
            .map(|(id, solver, variant)| Anomaly {
                id,
                solver,
                variant,
            })
            .collect(),
    })
}

impl ReportTable {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["row".to_string(), "problems".to_string()];
        h.extend(self.columns.iter().cloned());
        h.push("All".to_string());
        h
    }

    fn cells(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut c = vec![r.kind.to_string(), r.population.to_string()];
                c.extend(r.counts.iter().map(usize::to_string));
                c.push(r.all.to_string());
                c
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for row in self.cells() {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

impl fmt::Display for ReportTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = self.header();
        let body = self.cells();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                body.iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for line in std::iter::once(&header).chain(&body) {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| {
                    if i == 0 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            writeln!(f, "{}", cells.join("  ").trim_end())?;
        }
        for a in &self.anomalies {
            writeln!(
                f,
                "anomaly: {} reported sat on verified {} ({})",
                a.solver, a.id, a.variant
            )?;
        }
        Ok(())
    }
}
