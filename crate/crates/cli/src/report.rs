//! Reports rendered as markdown and JSON from one structure.

use serde::Serialize;
use serde_json::{Map, Value};

/// Outcome of one report section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: String,
    pub status: Status,
    pub entries: Map<String, Value>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            status: Status::Info,
            entries: Map::new(),
        }
    }

    pub fn status(mut self, passed: bool) -> Self {
        self.status = if passed { Status::Pass } else { Status::Fail };
        self
    }

    pub fn skipped(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.entries.insert("reason".into(), Value::String(reason.into()));
        self
    }

    pub fn failed(mut self, error: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.entries.insert("error".into(), Value::String(error.into()));
        self
    }

    pub fn entry(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.entries.insert(key.into(), v);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub passed: bool,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            passed: true,
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: Section) {
        if section.status == Status::Fail {
            self.passed = false;
        }
        self.sections.push(section);
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn exit_code(&self) -> u8 {
        u8::from(!self.passed)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}\n\n", self.title);
        out += &format!("Overall: {}\n", if self.passed { "PASS" } else { "FAIL" });
        for s in &self.sections {
            let tag = match s.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIPPED",
                Status::Info => "INFO",
            };
            out += &format!("\n## {} [{tag}]\n\n", s.name);
            for (k, v) in &s.entries {
                out += &format!("- {k}: {}\n", inline(v));
            }
        }
        out
    }
}

/// Compact rendering with fixed float formatting.
fn inline(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f:.6e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(o) => format!(
            "{{{}}}",
            o.iter()
                .map(|(k, v)| format!("{k}: {}", inline(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}
