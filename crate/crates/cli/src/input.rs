use std::io::Read;

use linrel::Error;
use serde_json::{json, Map, Value};

/// A failed run: exit status plus what goes into the report's `error` field.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 1, kind: "usage", message }
    }

    pub fn io(message: String) -> Self {
        Failure { code: 1, kind: "io", message }
    }

    pub fn internal(message: String) -> Self {
        Failure { code: 2, kind: "internal", message }
    }

    /// The report for this failure and its exit status.
    pub fn report(self, mut env: Map<String, Value>) -> (Value, i32) {
        env.insert("error".into(), json!({ "kind": self.kind, "message": self.message, "exit_code": self.code }));
        (Value::Object(env), self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Shape(_) => "shape",
            Error::Schema(_) => "schema",
            Error::UnknownExample(_) => "unknown_example",
            Error::NonRational(_) => "non_rational",
            Error::Precondition(_) => "precondition",
            Error::NotDimN { .. } => "not_dim_n",
            Error::NonSquare { .. } => "non_square",
            Error::Singular => "singular",
            Error::Numerical(_) => "numerical",
            Error::UnknownAssumptions(_) => "unknown_assumptions",
        };
        Failure { code: e.exit_code(), kind, message: e.to_string() }
    }
}

/// Inline JSON when the argument looks like it, `-` for standard input, else a path.
/// A report written by this tool is unwrapped to its `result`, so outputs chain.
pub fn load(src: &str) -> Result<Value, Failure> {
    let text = if src.trim_start().starts_with(['{', '[']) {
        src.to_string()
    } else if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::io(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(src).map_err(|e| Failure::io(format!("cannot read {src}: {e}")))?
    };
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| Failure::from(Error::Schema(format!("invalid JSON in {}: {e}", short(src)))))?;
    if v.get("command").is_some() {
        if let Some(r) = v.get_mut("result") {
            v = r.take();
        }
    }
    Ok(v)
}

fn short(src: &str) -> &str {
    if src.trim_start().starts_with(['{', '[']) {
        "inline input"
    } else {
        src
    }
}
