//! Structured check results.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not evaluated because an earlier entry it depends on failed.
    Skipped,
}

/// A nonzero value of an identity that should vanish, and where it was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub expr: String,
    pub at: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Informational entries are reported but do not enter the verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Entry {
    pub fn pass(id: impl Into<String>) -> Self {
        Entry {
            id: id.into(),
            status: Status::Pass,
            witness: None,
            informational: false,
            note: None,
        }
    }

    pub fn fail(id: impl Into<String>, witness: Witness) -> Self {
        Entry {
            id: id.into(),
            status: Status::Fail,
            witness: Some(witness),
            informational: false,
            note: None,
        }
    }

    pub fn skipped(id: impl Into<String>) -> Self {
        Entry {
            id: id.into(),
            status: Status::Skipped,
            witness: None,
            informational: false,
            note: None,
        }
    }

    /// Pass or fail depending on `witness`.
    pub fn from_witness(id: impl Into<String>, witness: Option<Witness>) -> Self {
        match witness {
            None => Entry::pass(id),
            Some(w) => Entry::fail(id, w),
        }
    }

    /// Pass or fail on a boolean with an explanation used when it fails.
    pub fn from_bool(id: impl Into<String>, ok: bool, expr: impl Into<String>, at: impl Into<String>) -> Self {
        if ok {
            Entry::pass(id)
        } else {
            Entry::fail(
                id,
                Witness {
                    expr: expr.into(),
                    at: at.into(),
                },
            )
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            entries: Vec::new(),
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(&mut self, entry: Entry) {
        self.entries.push(entry);
    }

    /// Appends entries in order; once one fails, the rest are recorded as skipped.
    pub fn push_chain<'a>(&mut self, entries: impl IntoIterator<Item = (String, Box<dyn FnOnce() -> Entry + 'a>)>) {
        let mut failed = false;
        for (id, run) in entries {
            if failed {
                self.entries.push(Entry::skipped(id));
                continue;
            }
            let e = run();
            failed = e.status == Status::Fail;
            self.entries.push(e);
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Conjunction of the non-informational entries.
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .filter(|e| !e.informational)
            .all(|e| e.status != Status::Fail)
    }

    pub fn entry(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// First failing non-informational entry.
    pub fn first_failure(&self) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|e| !e.informational && e.status == Status::Fail)
    }

    /// Adds the entries of `other` with their ids prefixed.
    pub fn absorb(&mut self, prefix: &str, other: &CheckReport, informational: bool) {
        for e in &other.entries {
            let mut e = e.clone();
            e.id = format!("{prefix}.{}", e.id);
            e.informational |= informational;
            self.entries.push(e);
        }
        for n in &other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let status = match e.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            let info = if e.informational { " (info)" } else { "" };
            out.push_str(&format!("  [{status}] {}{info}\n", e.id));
            if let Some(w) = &e.witness {
                out.push_str(&format!("         witness: {}\n         at: {}\n", w.expr, w.at));
            }
            if let Some(n) = &e.note {
                out.push_str(&format!("         note: {n}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}
