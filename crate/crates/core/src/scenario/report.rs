use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::format::format_g;
use super::sweep::SweepRow;
use super::table::{Table, Value};
use crate::budget::Scheme;
use crate::error::{Error, Result};

/// One (scheme, altitude, separation, zenith) key-rate sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub scheme: Scheme,
    pub altitude: f64,
    pub separation: f64,
    pub zenith_deg: f64,
    pub rate_hz: f64,
}

impl RatePoint {
    pub fn from_rows(rows: &[SweepRow]) -> Vec<RatePoint> {
        rows.iter()
            .map(|r| RatePoint {
                scheme: r.scheme,
                altitude: r.altitude,
                separation: r.separation,
                zenith_deg: r.zenith_deg,
                rate_hz: r.rate_hz,
            })
            .collect()
    }

    /// Read the points out of a full sweep table or a rate preset table.
    pub fn from_table(table: &Table) -> Result<Vec<RatePoint>> {
        let col = |name: &str| {
            table
                .column(name)
                .ok_or_else(|| Error::Selection(format!("table has no column '{name}'")))
        };
        let (cs, ch, cl, cz, cr) = (
            col("scheme")?,
            col("h_alt")?,
            col("L")?,
            col("zenith_deg")?,
            col("rate_hz")?,
        );
        table
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let bad = || Error::Selection(format!("data row {} is malformed", i + 1));
                let num = |c: usize| row.get(c).and_then(Value::as_number).ok_or_else(bad);
                let scheme = row
                    .get(cs)
                    .and_then(Value::as_text)
                    .ok_or_else(bad)?
                    .parse()?;
                Ok(RatePoint {
                    scheme,
                    altitude: num(ch)?,
                    separation: num(cl)?,
                    zenith_deg: num(cz)?,
                    rate_hz: num(cr)?,
                })
            })
            .collect()
    }
}

/// Worst-case comparison of two schemes for one altitude and separation.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementRow {
    pub altitude: f64,
    pub separation: f64,
    /// Zenith angles where both schemes were evaluated.
    pub compared: usize,
    /// Of those, how many had a zero (or non-finite) baseline rate.
    pub zero_baseline: usize,
    /// Minimum of `100 (target - baseline) / baseline` over the defined points.
    pub min_improvement_pct: Option<f64>,
    pub at_zenith_deg: Option<f64>,
    /// Minimum of `target / baseline` over the defined points.
    pub min_ratio: Option<f64>,
}

impl ImprovementRow {
    pub const COLUMNS: [&'static str; 7] = [
        "h_alt",
        "L",
        "points",
        "zero_baseline",
        "min_improvement_pct",
        "at_zenith_deg",
        "min_ratio",
    ];

    fn cells(&self) -> Vec<Value> {
        let opt = |x: Option<f64>| match x {
            Some(v) => Value::Number(v),
            None => Value::Text("undefined (baseline zero)".into()),
        };
        vec![
            Value::Number(self.altitude),
            Value::Number(self.separation),
            Value::Number(self.compared as f64),
            Value::Number(self.zero_baseline as f64),
            opt(self.min_improvement_pct),
            match self.at_zenith_deg {
                Some(z) => Value::Number(z),
                None => Value::Text("-".into()),
            },
            opt(self.min_ratio),
        ]
    }

    pub fn to_table(rows: &[ImprovementRow]) -> Table {
        let mut t = Table::new(&Self::COLUMNS);
        t.rows = rows.iter().map(Self::cells).collect();
        t
    }

    /// Column-aligned plain-text rendering.
    pub fn render(rows: &[ImprovementRow]) -> String {
        let mut cells: Vec<Vec<String>> =
            vec![Self::COLUMNS.iter().map(|c| c.to_string()).collect()];
        cells.extend(
            rows.iter()
                .map(|r| r.cells().iter().map(Value::to_string).collect()),
        );
        let widths: Vec<usize> = (0..Self::COLUMNS.len())
            .map(|i| cells.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

fn key(p: &RatePoint) -> (String, String) {
    (format_g(p.altitude), format_g(p.separation))
}

/// Per (altitude, separation), the smallest improvement of `target` over
/// `baseline` across zenith angles up to `zenith_max_deg`.
pub fn improvement_report(
    points: &[RatePoint],
    baseline: Scheme,
    target: Scheme,
    zenith_max_deg: f64,
) -> Result<Vec<ImprovementRow>> {
    let within = |p: &&RatePoint| p.zenith_deg <= zenith_max_deg + 1e-9;
    let base: Vec<&RatePoint> = points
        .iter()
        .filter(|p| p.scheme == baseline)
        .filter(within)
        .collect();
    let tgt: Vec<&RatePoint> = points
        .iter()
        .filter(|p| p.scheme == target)
        .filter(within)
        .collect();
    if base.is_empty() || tgt.is_empty() {
        let missing = if base.is_empty() { baseline } else { target };
        return Err(Error::Selection(format!(
            "no {missing} points with zenith <= {zenith_max_deg} deg"
        )));
    }

    let mut baseline_rate = BTreeMap::new();
    for p in &base {
        baseline_rate.insert((key(p), format_g(p.zenith_deg)), p.rate_hz);
    }

    let mut groups: Vec<ImprovementRow> = Vec::new();
    for t in &tgt {
        let Some(&b) = baseline_rate.get(&(key(t), format_g(t.zenith_deg))) else {
            continue;
        };
        let slot = match groups
            .iter()
            .position(|g| (format_g(g.altitude), format_g(g.separation)) == key(t))
        {
            Some(i) => i,
            None => {
                groups.push(ImprovementRow {
                    altitude: t.altitude,
                    separation: t.separation,
                    compared: 0,
                    zero_baseline: 0,
                    min_improvement_pct: None,
                    at_zenith_deg: None,
                    min_ratio: None,
                });
                groups.len() - 1
            }
        };
        let g = &mut groups[slot];
        g.compared += 1;
        if !(b > 0.0) || !b.is_finite() || !t.rate_hz.is_finite() {
            g.zero_baseline += 1;
            continue;
        }
        let ratio = t.rate_hz / b;
        let pct = 100.0 * (t.rate_hz - b) / b;
        if g.min_improvement_pct.is_none_or(|m| pct < m) {
            g.min_improvement_pct = Some(pct);
            g.at_zenith_deg = Some(t.zenith_deg);
        }
        if g.min_ratio.is_none_or(|m| ratio < m) {
            g.min_ratio = Some(ratio);
        }
    }
    if groups.is_empty() {
        return Err(Error::Selection(format!(
            "{baseline} and {target} share no (altitude, separation, zenith) points"
        )));
    }
    groups.sort_by(|a, b| {
        a.altitude
            .total_cmp(&b.altitude)
            .then(a.separation.total_cmp(&b.separation))
    });
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(scheme: Scheme, h: f64, l: f64, z: f64, rate: f64) -> RatePoint {
        RatePoint {
            scheme,
            altitude: h,
            separation: l,
            zenith_deg: z,
            rate_hz: rate,
        }
    }

    #[test]
    fn identical_schemes_give_zero() {
        let pts: Vec<_> = (0..10)
            .map(|z| pt(Scheme::PureTdm, 8e5, 1.0, z as f64, 100.0 + z as f64))
            .collect();
        let rows = improvement_report(&pts, Scheme::PureTdm, Scheme::PureTdm, 75.0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].min_improvement_pct, Some(0.0));
        assert_eq!(rows[0].min_ratio, Some(1.0));
        assert_eq!(rows[0].compared, 10);
    }

    #[test]
    fn minimum_and_cutoff() {
        let mut pts = Vec::new();
        for (z, b, t) in [
            (0.0, 100.0, 150.0),
            (10.0, 100.0, 120.0),
            (20.0, 100.0, 300.0),
            (40.0, 100.0, 50.0),
        ] {
            pts.push(pt(Scheme::PureTdm, 8e5, 5.0, z, b));
            pts.push(pt(Scheme::SpatialPioneer, 8e5, 5.0, z, t));
        }
        let rows = improvement_report(&pts, Scheme::PureTdm, Scheme::SpatialPioneer, 30.0).unwrap();
        assert_eq!(rows[0].compared, 3);
        assert!((rows[0].min_improvement_pct.unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(rows[0].at_zenith_deg, Some(10.0));
        let all = improvement_report(&pts, Scheme::PureTdm, Scheme::SpatialPioneer, 75.0).unwrap();
        assert!((all[0].min_improvement_pct.unwrap() + 50.0).abs() < 1e-12);
    }

    #[test]
    fn zero_baseline_is_undefined() {
        let pts = vec![
            pt(Scheme::PureTdm, 4e5, 5.0, 0.0, 0.0),
            pt(Scheme::SpatialPioneer, 4e5, 5.0, 0.0, 10.0),
        ];
        let rows = improvement_report(&pts, Scheme::PureTdm, Scheme::SpatialPioneer, 30.0).unwrap();
        assert_eq!(rows[0].min_improvement_pct, None);
        assert_eq!(rows[0].zero_baseline, 1);
        let text = ImprovementRow::render(&rows);
        assert!(text.contains("undefined (baseline zero)"));
    }

    #[test]
    fn empty_selection_is_an_error() {
        let pts = vec![pt(Scheme::PureTdm, 4e5, 5.0, 50.0, 1.0)];
        assert!(matches!(
            improvement_report(&pts, Scheme::PureTdm, Scheme::PureTdm, 30.0),
            Err(Error::Selection(_))
        ));
        assert!(improvement_report(&pts, Scheme::PureTdm, Scheme::NoAo, 75.0).is_err());
    }
}
