//! Structured pass/fail verdicts with witnesses, shared by all checkers and the CLI.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A single offending claim: which check fired and the element tuple involved.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub claim: String,
    pub elements: Vec<String>,
}

/// Verdict plus witnesses. A fail verdict always carries at least one witness;
/// `notes` holds diagnostics that carry no verdict (count profiles, exemptions).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Report {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn pass() -> Report {
        Report {
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn fail(claim: impl Into<String>, elements: Vec<String>) -> Report {
        Report {
            verdict: Verdict::Fail,
            witnesses: vec![Witness {
                claim: claim.into(),
                elements,
            }],
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn add_witness(&mut self, claim: impl Into<String>, elements: Vec<String>) {
        self.verdict = Verdict::Fail;
        self.witnesses.push(Witness {
            claim: claim.into(),
            elements,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Fold `other` into `self`, keeping all witnesses and notes.
    pub fn merge(&mut self, other: Report) {
        if other.verdict == Verdict::Fail {
            self.verdict = Verdict::Fail;
        }
        self.witnesses.extend(other.witnesses);
        self.notes.extend(other.notes);
    }

    /// Keep at most `cap` witnesses; the remainder is summarized into a note.
    pub fn truncate_witnesses(&mut self, cap: usize) {
        if self.witnesses.len() > cap {
            let dropped = self.witnesses.len() - cap;
            self.witnesses.truncate(cap);
            self.notes.push(format!("{dropped} further witnesses omitted"));
        }
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.verdict {
            Verdict::Pass => write!(f, "pass")?,
            Verdict::Fail => {
                write!(f, "fail")?;
                for w in &self.witnesses {
                    write!(f, "\n  {}: ({})", w.claim, w.elements.join(", "))?;
                }
            }
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}
