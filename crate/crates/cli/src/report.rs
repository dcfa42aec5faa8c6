//! Line-oriented reports.

use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unsupported,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unsupported => "unsupported",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Line {
    pub check: String,
    pub status: Status,
    pub witness: Option<String>,
    pub fields: Map<String, Value>,
}

#[derive(Default, Debug)]
pub struct Report {
    pub lines: Vec<Line>,
}

impl Report {
    pub fn push(&mut self, check: &str, status: Status, witness: Option<String>, fields: Vec<(&str, Value)>) {
        debug_assert!(status != Status::Fail || witness.as_deref().is_some_and(|w| w != "0"), "{check}: fail without witness");
        self.lines.push(Line {
            check: check.to_string(),
            status,
            witness,
            fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        });
    }

    pub fn pass(&mut self, check: &str, fields: Vec<(&str, Value)>) {
        self.push(check, Status::Pass, None, fields);
    }

    pub fn fail(&mut self, check: &str, witness: impl ToString, fields: Vec<(&str, Value)>) {
        self.push(check, Status::Fail, Some(witness.to_string()), fields);
    }

    pub fn unsupported(&mut self, check: &str, reason: &str) {
        self.push(check, Status::Unsupported, None, vec![("reason", reason.into())]);
    }

    /// `pass` when `residual` is `None`, otherwise `fail` with it as witness.
    pub fn verdict(&mut self, check: &str, residual: Option<String>, fields: Vec<(&str, Value)>) {
        match residual {
            None => self.pass(check, fields),
            Some(w) => self.fail(check, w, fields),
        }
    }

    pub fn failed(&self) -> bool {
        self.lines.iter().any(|l| l.status == Status::Fail)
    }

    pub fn render_json(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let mut obj = l.fields.clone();
            obj.insert("check".into(), l.check.clone().into());
            obj.insert("status".into(), l.status.as_str().into());
            if let Some(w) = &l.witness {
                obj.insert("witness".into(), w.clone().into());
            }
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let _ = write!(out, "{:<11} {}", l.status.as_str().to_uppercase(), l.check);
            for (k, v) in &l.fields {
                match v {
                    Value::String(s) => {
                        let _ = write!(out, " {k}={s}");
                    }
                    v => {
                        let _ = write!(out, " {k}={v}");
                    }
                }
            }
            if let Some(w) = &l.witness {
                let _ = write!(out, " witness={w}");
            }
            out.push('\n');
        }
        out
    }
}
