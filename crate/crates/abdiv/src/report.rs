//! Plain-text reports: `key=value` records and aligned tables.

use std::fmt::{self, Display, Write as _};

use abdiv_core::kernel::{ProbeReport, SpectrumReport, Verdict};
use abdiv_core::DivergenceSpec;

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvRecord {
    entries: Vec<(String, String)>,
}

impl KvRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

impl Display for KvRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Column-aligned text table; the first column is left-aligned, the rest
/// right-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        self.rows.push(cells.into_iter().map(Into::into).collect());
        self
    }
}

impl Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, w) in widths.iter().enumerate().take(cols) {
                let cell = cells.get(i).map_or("", String::as_str);
                if i > 0 {
                    s.push_str("  ");
                }
                if i == 0 {
                    let _ = write!(s, "{cell:<w$}");
                } else {
                    let _ = write!(s, "{cell:>w$}");
                }
            }
            s.trim_end().to_owned()
        };
        writeln!(f, "{}", line(&self.header))?;
        let total: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
        writeln!(f, "{}", "-".repeat(total))?;
        for row in &self.rows {
            writeln!(f, "{}", line(row))?;
        }
        Ok(())
    }
}

/// Canonical text form of a spec, parseable by the CLI.
pub fn spec_string(spec: &DivergenceSpec) -> String {
    match spec {
        DivergenceSpec::Ab(p) => format!("ab:{},{}", p.alpha(), p.beta()),
        DivergenceSpec::Abs(p) => format!("abs:{},{}", p.alpha(), p.beta()),
        DivergenceSpec::Dt(t) => format!("dt:{t}"),
    }
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Psd => "psd",
        Verdict::Indefinite => "indefinite",
    }
}

/// Appends a spectrum report under `prefix`.
pub fn push_spectrum(rec: &mut KvRecord, prefix: &str, r: &SpectrumReport) {
    rec.push(format!("{prefix}order"), r.order)
        .push(format!("{prefix}centered"), r.centered)
        .push(format!("{prefix}min_eig"), format!("{:e}", r.min_eig))
        .push(format!("{prefix}max_eig"), format!("{:e}", r.max_eig))
        .push(format!("{prefix}tol"), r.tol)
        .push(format!("{prefix}verdict"), verdict_str(r.verdict));
}

/// Summary plus one block per trial.
pub fn probe_record(p: &ProbeReport) -> KvRecord {
    let mut rec = KvRecord::new();
    rec.push("spec", spec_string(&p.spec))
        .push("n", p.n)
        .push("atoms", p.atoms)
        .push("trials", p.reports.len())
        .push("seed", p.seed)
        .push("indefinite_trials", p.indefinite_count())
        .push("worst_relative_eig", format!("{:e}", p.worst_relative_eig))
        .push("verdict", if p.all_psd() { "psd" } else { "indefinite" });
    for (i, r) in p.reports.iter().enumerate() {
        push_spectrum(&mut rec, &format!("trial.{i}."), r);
    }
    rec
}
