use sato::matop::MatPsdo;
use sato::render::Render;
use sato::serial::{lambda_poly_to_json, Json};
use sato::superpoly::{DiffPoly, Var};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

pub enum Body {
    Poly(DiffPoly),
    Bracket(DiffPoly),
    Matrix(MatPsdo),
}

pub struct Entry {
    pub text: String,
    pub latex: String,
    pub body: Body,
}

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub violations: Vec<String>,
}

pub struct Report {
    pub command: String,
    pub spec: Map<String, Value>,
    pub entries: Vec<Entry>,
    pub checks: Vec<Check>,
}

pub fn var_latex(v: &Var) -> String {
    DiffPoly::var(*v).latex()
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.into(), spec: Map::new(), entries: Vec::new(), checks: Vec::new() }
    }

    pub fn spec(&mut self, key: &str, v: impl Into<Value>) {
        self.spec.insert(key.into(), v.into());
    }

    pub fn entry(&mut self, text: String, latex: String, body: Body) {
        self.entries.push(Entry { text, latex, body });
    }

    pub fn check(&mut self, name: impl Into<String>, violations: Vec<String>) {
        self.checks.push(Check { name: name.into(), passed: violations.is_empty(), violations });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Latex => self.latex(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("json values always serialize");
                s.push('\n');
                s
            }
        }
    }

    fn header(&self) -> String {
        let spec: Vec<String> = self.spec.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("sato {} {}", self.command, spec.join(" "))
    }

    fn text(&self) -> String {
        let mut out = format!("# {}\n", self.header());
        for e in &self.entries {
            match &e.body {
                Body::Poly(p) | Body::Bracket(p) => out.push_str(&format!("{} = {}\n", e.text, p.text())),
                Body::Matrix(m) => out.push_str(&format!("{} =\n{}", e.text, m.text())),
            }
        }
        for c in &self.checks {
            out.push_str(&format!("{} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name));
            for v in &c.violations {
                out.push_str(&format!("  {v}\n"));
            }
        }
        out
    }

    fn latex(&self) -> String {
        let mut out = format!("% {}\n", self.header());
        for e in &self.entries {
            let body = match &e.body {
                Body::Poly(p) | Body::Bracket(p) => p.latex(),
                Body::Matrix(m) => m.latex(),
            };
            out.push_str(&format!("\\[ {} = {} \\]\n", e.latex, body));
        }
        for c in &self.checks {
            out.push_str(&format!("% {} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name));
        }
        out
    }

    fn json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let value = match &e.body {
                    Body::Poly(p) => p.to_json(),
                    Body::Bracket(p) => lambda_poly_to_json(p),
                    Body::Matrix(m) => m.to_json(),
                };
                json!({ "key": e.text, "value": value })
            })
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "violations": c.violations }))
            .collect();
        json!({
            "command": self.command,
            "spec": self.spec,
            "entries": entries,
            "checks": checks,
            "passed": self.passed(),
        })
    }
}
