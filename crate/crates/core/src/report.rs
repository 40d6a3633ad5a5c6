//! Verification reports shared by every suite.

use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!("torlab ", env!("CARGO_PKG_VERSION"));
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    WindowClipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub relation_id: String,
    pub params: String,
    pub status: Status,
    /// Number of individual coefficients (or scalar identities) compared.
    pub checked: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Entry {
    pub fn new(relation_id: impl Into<String>, params: impl Into<String>) -> Self {
        Entry { relation_id: relation_id.into(), params: params.into(), status: Status::Pass, checked: 0, witness: None }
    }

    /// Records one comparison; the first failure becomes the witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.status != Status::Fail {
            self.status = Status::Fail;
            self.witness = Some(witness());
        }
    }

    pub fn clip(&mut self, why: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::WindowClipped;
            self.witness = Some(why.into());
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub window_clipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub suite: String,
    pub config: serde_json::Value,
    #[serde(default)]
    pub notes: Vec<String>,
    pub entries: Vec<Entry>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: impl Into<String>, config: serde_json::Value) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            suite: suite.into(),
            config,
            notes: Vec::new(),
            entries: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, es: impl IntoIterator<Item = Entry>) {
        self.entries.extend(es);
    }

    /// Sorts entries and recomputes the summary. A pass that compared
    /// nothing is downgraded to window-clipped.
    pub fn finish(mut self) -> Self {
        for e in &mut self.entries {
            if e.checked == 0 {
                e.clip("nothing to compare on the window");
            }
        }
        self.entries.sort_by(|a, b| (&a.relation_id, &a.params).cmp(&(&b.relation_id, &b.params)));
        let mut s = Summary::default();
        for e in &self.entries {
            match e.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::WindowClipped => s.window_clipped += 1,
            }
        }
        self.summary = s;
        self
    }

    pub fn all_pass(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(Entry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_round_trip() {
        let mut r = Report::new("demo", serde_json::json!({"w": 3}));
        let mut e = Entry::new("rel", "p");
        e.record(true, String::new);
        e.record(false, || "bad".into());
        r.push(e);
        r.push(Entry::new("a", "q"));
        let r = r.finish();
        assert_eq!(r.entries[0].relation_id, "a");
        assert_eq!((r.summary.fail, r.summary.window_clipped), (1, 1));
        let s = r.to_json();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), s);
        assert!(s.contains("\"fail\""));
    }
}
