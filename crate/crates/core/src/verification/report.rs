//! Convergence-report rows and their CSV form.
//!
//! One row per refinement with the error norms at final time, observed
//! orders between consecutive rows, and wall-clock seconds. The CSV
//! round-trips byte-identically: formatting is canonical `{:.6e}`, empty
//! fields encode missing orders (first row, degenerate sweeps) and
//! non-finite entries.

use crate::error::{Result, SolverError};

pub const REPORT_HEADER: &str =
    "param,err_u_linf,err_p_l2,div_linf,q_drift,order_u,order_p,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// Refinement parameter as given on the command line ("1/32", "0.05").
    pub param: String,
    pub param_value: f64,
    pub err_u_linf: f64,
    pub err_p_l2: f64,
    pub div_linf: f64,
    pub q_drift: f64,
    pub order_u: Option<f64>,
    pub order_p: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        String::new()
    }
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.param,
                fmt_opt(row.err_u_linf),
                fmt_opt(row.err_p_l2),
                fmt_opt(row.div_linf),
                fmt_opt(row.q_drift),
                row.order_u.map(fmt_opt).unwrap_or_default(),
                row.order_p.map(fmt_opt).unwrap_or_default(),
                fmt_opt(row.seconds),
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == REPORT_HEADER => {}
            other => {
                return Err(SolverError::Parse(format!(
                    "bad report header: {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(SolverError::Parse(format!(
                    "row {}: expected 8 columns, got {}",
                    lineno + 2,
                    cols.len()
                )));
            }
            let num = |s: &str| -> Result<f64> {
                if s.is_empty() {
                    Ok(f64::NAN)
                } else {
                    s.parse()
                        .map_err(|e| SolverError::Parse(format!("bad number '{s}': {e}")))
                }
            };
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    Ok(Some(num(s)?))
                }
            };
            rows.push(ReportRow {
                param: cols[0].to_string(),
                param_value: parse_param(cols[0])?,
                err_u_linf: num(cols[1])?,
                err_p_l2: num(cols[2])?,
                div_linf: num(cols[3])?,
                q_drift: num(cols[4])?,
                order_u: opt(cols[5])?,
                order_p: opt(cols[6])?,
                seconds: num(cols[7])?,
            });
        }
        Ok(ConvergenceReport { rows })
    }
}

/// Parse a refinement parameter: exact fractions ("1/32") or decimals.
pub fn parse_param(token: &str) -> Result<f64> {
    let token = token.trim();
    if let Some((num, den)) = token.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|e| SolverError::Parse(format!("bad fraction '{token}': {e}")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|e| SolverError::Parse(format!("bad fraction '{token}': {e}")))?;
        if d == 0.0 {
            return Err(SolverError::Parse(format!("zero denominator in '{token}'")));
        }
        Ok(n / d)
    } else {
        token
            .parse()
            .map_err(|e| SolverError::Parse(format!("bad parameter '{token}': {e}")))
    }
}

/// Observed order between two refinements: log(e0/e1) / log(p0/p1).
pub fn pairwise_order(p0: f64, e0: f64, p1: f64, e1: f64) -> Option<f64> {
    if !(e0 > 0.0 && e1 > 0.0 && p0 > 0.0 && p1 > 0.0) || p0 == p1 {
        return None;
    }
    Some((e0 / e1).ln() / (p0 / p1).ln())
}

/// Least-squares slope of log(error) against log(parameter).
pub fn fit_order(params: &[f64], errors: &[f64]) -> f64 {
    assert_eq!(params.len(), errors.len());
    let pts: Vec<(f64, f64)> = params
        .iter()
        .zip(errors)
        .filter(|(p, e)| **p > 0.0 && **e > 0.0)
        .map(|(p, e)| (p.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_byte_identically() {
        let report = ConvergenceReport {
            rows: vec![
                ReportRow {
                    param: "1/4".into(),
                    param_value: 0.25,
                    err_u_linf: 1.94e-3,
                    err_p_l2: 7.22e-2,
                    div_linf: 8.85e-6,
                    q_drift: 3.0e-7,
                    order_u: None,
                    order_p: None,
                    seconds: 0.52,
                },
                ReportRow {
                    param: "1/8".into(),
                    param_value: 0.125,
                    err_u_linf: 9.97e-4,
                    err_p_l2: 3.57e-2,
                    div_linf: 8.78e-6,
                    q_drift: f64::NAN,
                    order_u: Some(0.9604),
                    order_p: Some(1.0161),
                    seconds: 1.04,
                },
            ],
        };
        let csv1 = report.to_csv();
        let parsed = ConvergenceReport::from_csv(&csv1).unwrap();
        let csv2 = parsed.to_csv();
        assert_eq!(csv1, csv2);
    }

    #[test]
    fn fraction_parameters_parse_exactly() {
        assert_eq!(parse_param("1/32").unwrap(), 1.0 / 32.0);
        assert_eq!(parse_param("0.05").unwrap(), 0.05);
        assert!(parse_param("1/0").is_err());
        assert!(parse_param("x").is_err());
    }

    #[test]
    fn order_fit_recovers_exact_power_laws() {
        let params = [0.25, 0.125, 0.0625, 0.03125];
        let errors: Vec<f64> = params.iter().map(|p| 3.0 * p * p).collect();
        assert!((fit_order(&params, &errors) - 2.0).abs() < 1e-12);
        let o = pairwise_order(params[0], errors[0], params[1], errors[1]).unwrap();
        assert!((o - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_single_row_has_no_orders() {
        assert!(fit_order(&[0.1], &[1.0]).is_nan());
        assert!(pairwise_order(0.1, 1.0, 0.1, 0.5).is_none());
    }
}
