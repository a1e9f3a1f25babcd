use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Outcome of one numerical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub measured: f64,
    /// `None` when only finiteness (boundedness) is checked.
    pub reference: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub meta: Map<String, Value>,
}

impl CheckReport {
    /// Passes iff `measured <= reference·(1 + tol)`, or iff `measured` is finite when
    /// there is no reference.
    pub fn new(check: &str, measured: f64, reference: Option<f64>, tol: f64) -> Self {
        let pass = match reference {
            Some(r) => measured <= r * (1.0 + tol),
            None => measured.is_finite(),
        };
        CheckReport {
            check: check.to_string(),
            params: Map::new(),
            measured,
            reference,
            tol,
            pass,
            meta: Map::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    /// Additional condition that must hold for the check to pass.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        self.meta.insert(key.to_string(), Value::Bool(ok));
        self.pass &= ok;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_and_schema() {
        let r = CheckReport::new("x", 1.0, Some(1.0), 1e-6);
        assert!(r.pass);
        assert!(!CheckReport::new("x", 1.1, Some(1.0), 1e-6).pass);
        assert!(CheckReport::new("x", 3.0, None, 0.0).pass);
        assert!(!CheckReport::new("x", f64::INFINITY, None, 0.0).pass);
        let r = r.param("n", 2).meta("level", 16).require("plateau", false);
        assert!(!r.pass);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["check", "params", "measured", "reference", "tol", "pass", "meta"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: CheckReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
