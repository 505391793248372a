//! Census rows, CSV/JSON output and the growth-exponent fit.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theory::{predict_all_count, predict_sq_count};

pub const CSV_HEADER: &str = "m,Q,count_all,count_sq,theory_all,theory_sq_lower,theory_sq_upper,ratio_all,ratio_sq,wall_seconds,shard_count";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

/// One `(m, Q)` point. Counts are `None` when that census was not run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub m: u32,
    #[serde(rename = "Q")]
    pub q: f64,
    pub count_all: Option<u64>,
    pub count_sq: Option<u64>,
    pub theory_all: f64,
    pub theory_sq_lower: f64,
    pub theory_sq_upper: f64,
    pub ratio_all: Option<f64>,
    pub ratio_sq: Option<f64>,
    pub wall_seconds: f64,
    pub shard_count: usize,
}

impl CensusRow {
    pub fn new(
        m: u32,
        q: f64,
        count_all: Option<u64>,
        count_sq: Option<u64>,
        wall_seconds: f64,
        shard_count: usize,
    ) -> Result<Self> {
        let sq = predict_sq_count(m, q)?;
        let mut row = CensusRow {
            m,
            q,
            count_all,
            count_sq,
            theory_all: predict_all_count(m, q)?.value,
            theory_sq_lower: sq.lower,
            theory_sq_upper: sq.upper,
            ratio_all: None,
            ratio_sq: None,
            wall_seconds,
            shard_count,
        };
        row.recompute_ratios();
        Ok(row)
    }

    /// Ratios against the main terms; the square-rootable ratio uses the
    /// upper term, which is the main term except in the even-`m` sandwich.
    pub fn recompute_ratios(&mut self) {
        self.ratio_all = self.count_all.map(|c| c as f64 / self.theory_all);
        self.ratio_sq = self.count_sq.map(|c| c as f64 / self.theory_sq_upper);
    }

    pub fn to_csv(&self) -> String {
        let opt_u = |v: Option<u64>| v.map(|c| c.to_string()).unwrap_or_default();
        let opt_f = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
        [
            self.m.to_string(),
            fmt_sig(self.q),
            opt_u(self.count_all),
            opt_u(self.count_sq),
            fmt_sig(self.theory_all),
            fmt_sig(self.theory_sq_lower),
            fmt_sig(self.theory_sq_upper),
            opt_f(self.ratio_all),
            opt_f(self.ratio_sq),
            fmt_sig(self.wall_seconds),
            self.shard_count.to_string(),
        ]
        .join(",")
    }

    fn from_csv(line: &str, lineno: usize) -> Result<Self> {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 11 {
            return Err(Error::parse(
                lineno,
                format!("expected 11 fields, found {}", f.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse()
                .map_err(|_| Error::parse(lineno, format!("bad number {:?}", f[i])))
        };
        let count = |i: usize| -> Result<Option<u64>> {
            if f[i].is_empty() {
                return Ok(None);
            }
            f[i].parse()
                .map(Some)
                .map_err(|_| Error::parse(lineno, format!("bad count {:?}", f[i])))
        };
        let mut row = CensusRow {
            m: f[0].parse().map_err(|_| Error::parse(lineno, "bad m"))?,
            q: num(1)?,
            count_all: count(2)?,
            count_sq: count(3)?,
            theory_all: num(4)?,
            theory_sq_lower: num(5)?,
            theory_sq_upper: num(6)?,
            ratio_all: None,
            ratio_sq: None,
            wall_seconds: num(9)?,
            shard_count: f[10]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad shard count"))?,
        };
        row.recompute_ratios();
        Ok(row)
    }
}

/// Least-squares slope of `ln y` (or `ln(y / ln Q)`) against `ln Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// `count_all` or `count_sq`.
    pub column: String,
    pub log_corrected: bool,
    pub slope: f64,
    pub expected: f64,
    pub deviation: f64,
}

impl SlopeFit {
    /// Fits `column` of `rows`; `None` with fewer than two usable points.
    pub fn fit(rows: &[CensusRow], sq: bool) -> Option<SlopeFit> {
        let m = rows.first()?.m;
        let log_corrected = sq && (m == 3 || m == 4);
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| {
                let c = if sq { r.count_sq } else { r.count_all }?;
                if c == 0 {
                    return None;
                }
                let mut y = c as f64;
                if log_corrected {
                    y /= r.q.ln();
                }
                Some((r.q.ln(), y.ln()))
            })
            .collect();
        let slope = least_squares_slope(&pts)?;
        let expected = if !sq {
            m as f64
        } else if m <= 2 {
            m as f64 / 2.0 + 0.5
        } else {
            m as f64 / 2.0
        };
        Some(SlopeFit {
            column: if sq { "count_sq" } else { "count_all" }.into(),
            log_corrected,
            slope,
            expected,
            deviation: slope - expected,
        })
    }

    fn to_csv_comment(&self) -> String {
        format!(
            "# slope,{},{},{},{},{}",
            self.column,
            self.log_corrected,
            fmt_sig(self.slope),
            fmt_sig(self.expected),
            fmt_sig(self.deviation)
        )
    }
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub rows: Vec<CensusRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub slopes: Vec<SlopeFit>,
}

impl CensusReport {
    /// Header, one line per row, then one `# slope,...` line per fit.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(out, "{}", r.to_csv()).unwrap();
        }
        for s in &self.slopes {
            writeln!(out, "{}", s.to_csv_comment()).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json() + "\n",
        }
    }

    /// Parses CSV output; ratios are recomputed and slope lines ignored.
    pub fn from_csv(text: &str) -> Result<CensusReport> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::parse(0, "missing CSV header")),
        }
        let rows = lines
            .filter(|(_, l)| !l.starts_with('#'))
            .map(|(i, l)| CensusRow::from_csv(l, i + 1))
            .collect::<Result<Vec<_>>>()?;
        Ok(CensusReport {
            rows,
            slopes: Vec::new(),
        })
    }
}

/// Twelve significant digits, trailing zeros dropped, exponent form outside
/// `1e-5 .. 1e12` (as C's `%.12g`).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mant.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1333.333333333333), "1333.33333333");
        assert_eq!(fmt_sig(10.0), "10");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.5e13), "2.5e+13");
        assert_eq!(fmt_sig(1.25e-7), "1.25e-07");
        assert_eq!(fmt_sig(-3.0), "-3");
    }

    #[test]
    fn csv_round_trip_recomputes_ratios() {
        let row = CensusRow::new(1, 10.0, Some(8), Some(8), 0.25, 2).unwrap();
        assert_eq!(row.theory_all, 10.0);
        let report = CensusReport {
            rows: vec![row],
            slopes: vec![],
        };
        let text = report.to_csv();
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.contains("\n1,10,8,8,10,10,10,0.8,0.8,0.25,2\n"));
        // A stale ratio column is ignored on load.
        let stale = text.replace(",0.8,0.8,", ",9,9,");
        let back = CensusReport::from_csv(&stale).unwrap();
        assert_eq!(back.rows[0].ratio_all, Some(0.8));
        assert!(CensusReport::from_csv("m,Q\n").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let rows: Vec<CensusRow> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&q: &f64| CensusRow::new(2, q, Some((2.0 * q * q) as u64), None, 0.0, 1).unwrap())
            .collect();
        let fit = SlopeFit::fit(&rows, false).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert_eq!(fit.expected, 2.0);
        assert!(SlopeFit::fit(&rows, true).is_none());
    }
}
