//! Pass/fail records produced by the verifiers.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

/// One assertion: what was checked, how it went, and the first offending term on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub id: String,
    pub property: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, id: impl Into<String>, property: impl Into<String>, status: Status, witness: Option<String>) {
        self.records.push(Record {
            id: id.into(),
            property: property.into(),
            status,
            witness,
        });
    }

    pub fn pass(&mut self, id: impl Into<String>, property: impl Into<String>) {
        self.push(id, property, Status::Pass, None);
    }

    pub fn fail(&mut self, id: impl Into<String>, property: impl Into<String>, witness: impl Into<String>) {
        self.push(id, property, Status::Fail, Some(witness.into()));
    }

    pub fn skip(&mut self, id: impl Into<String>, property: impl Into<String>, reason: impl Into<String>) {
        self.push(id, property, Status::Skipped, Some(reason.into()));
    }

    /// Records a pass if `witness` is `None`, a failure carrying it otherwise.
    pub fn check(&mut self, id: impl Into<String>, property: impl Into<String>, witness: Option<String>) {
        match witness {
            None => self.pass(id, property),
            Some(w) => self.fail(id, property, w),
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    /// Appends `other` with every id prefixed by `prefix.`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: Report) {
        for mut r in other.records {
            r.id = format!("{prefix}.{}", r.id);
            self.records.push(r);
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn summary(&self) -> String {
        format!(
            "{} pass, {} fail, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        )
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            write!(f, "{} {}: {}", r.status, r.id, r.property)?;
            if let Some(w) = &r.witness {
                write!(f, " [{}]", w)?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", self.summary())
    }
}
