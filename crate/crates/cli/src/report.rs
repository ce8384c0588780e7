//! Line-oriented `key: value` reports.
//!
//! The body lists inputs, measured quantities and one block per check; a
//! trailing `[summary]` block gives the counts and the overall status. Floats
//! are printed as `{:.6e}` so reports diff cleanly between runs.

use std::fmt::Write as _;

use num_complex::Complex64;

pub fn float(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn complex(z: Complex64) -> String {
    format!(
        "{}{}{}i",
        float(z.re),
        if z.im < 0.0 { "-" } else { "+" },
        float(z.im.abs())
    )
}

pub fn list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    let parts: Vec<String> = items.iter().map(f).collect();
    format!("[{}]", parts.join(", "))
}

/// How a check compares its measured value with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.tolerance,
            Bound::AtLeast => self.value >= self.tolerance,
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    body: String,
    checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.field("command", command);
        r
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.body, "{key}: {value}").expect("writing to a String");
    }

    pub fn blank(&mut self) {
        self.body.push('\n');
    }

    pub fn check(&mut self, name: &str, value: f64, bound: Bound, tolerance: f64) {
        let c = Check {
            name: name.to_string(),
            value,
            bound,
            tolerance,
        };
        let op = match bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        self.field(&format!("check.{name}.value"), float(value));
        self.field(
            &format!("check.{name}.bound"),
            format!("{op} {}", float(tolerance)),
        );
        self.field(
            &format!("check.{name}.status"),
            if c.passed() { "pass" } else { "fail" },
        );
        self.checks.push(c);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn finish(mut self) -> (String, bool) {
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.clone())
            .collect();
        let ok = failed.is_empty();
        self.blank();
        self.body.push_str("[summary]\n");
        let total = self.checks.len();
        self.field("checks", total);
        self.field("passed", passed);
        self.field("failed", failed.len());
        if !ok {
            self.field("failed_checks", failed.join(","));
        }
        self.field("status", if ok { "pass" } else { "fail" });
        (self.body, ok)
    }
}
