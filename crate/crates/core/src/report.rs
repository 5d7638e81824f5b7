//! Text serializations shared by the command-line front end.
//!
//! CSV uses `\n` line endings, `.` as the decimal separator and six fixed
//! decimals. JSON documents are built from [`RunReport`], which serializes
//! with any serde backend.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::CurvePoint;
use crate::protocol::{BranchRecord, ProtocolReport};

pub const CURVE_HEADER: &str = "n,xi,E0,E0_exact,EFPT,F";
pub const BRANCH_HEADER: &str = "path,probability,success,distance";

/// Six fixed decimals; values that round to zero print without a sign.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for p in points {
        let row = [p.n, p.xi_opt, p.e0, p.e0_exact, p.e_fpt, p.f].map(fixed6);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `label:outcome` steps joined by `;`, e.g. `a:+;b0b1:B10;correction:I`.
pub fn path_string(branch: &BranchRecord) -> String {
    branch
        .path
        .iter()
        .map(|(label, outcome)| format!("{label}:{outcome}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn branches_csv(report: &ProtocolReport) -> String {
    let mut out = String::new();
    out.push_str(BRANCH_HEADER);
    out.push('\n');
    for b in &report.branches {
        writeln!(
            out,
            "{},{},{},{}",
            path_string(b),
            fixed6(b.probability),
            b.success,
            fixed6(b.distance)
        )
        .expect("writing to a String");
    }
    out
}

/// Top-level document for a single protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport<P: Serialize> {
    pub command: String,
    pub params: P,
    pub branches: Vec<BranchRecord>,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub classical_bits: u32,
}

impl<P: Serialize> RunReport<P> {
    pub fn new(command: &str, params: P, report: &ProtocolReport) -> Self {
        RunReport {
            command: command.to_owned(),
            params,
            branches: report.branches.clone(),
            f: report.success_probability,
            e: report.entanglement,
            classical_bits: report.classical_bits,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed6(0.5), "0.500000");
        assert_eq!(fixed6(-1e-9), "0.000000");
        assert_eq!(fixed6(-0.25), "-0.250000");
        assert_eq!(fixed6(1.2345675), "1.234568");
    }

    #[test]
    fn curve_rows() {
        let p = CurvePoint {
            n: 1.5,
            xi_opt: 0.35,
            e0: 0.97,
            e0_exact: 0.971,
            e_fpt: 0.968,
            f: 0.79,
        };
        let csv = curve_csv(&[p, p]);
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CURVE_HEADER);
        assert_eq!(
            lines[1],
            "1.500000,0.350000,0.970000,0.971000,0.968000,0.790000"
        );
        assert_eq!(lines[3], "");
    }
}
