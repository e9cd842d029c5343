use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::format::format_g;
use crate::budget::Scheme;
use crate::error::{Error, Result};

/// Columns that hold text rather than numbers.
const TEXT_COLUMNS: [&str; 2] = ["scheme", "status"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Number(f64),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            Value::Number(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => f.write_str(s),
            Value::Number(x) => f.write_str(&format_g(*x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.column(name)
            .ok_or_else(|| Error::Selection(format!("table has no column '{name}'")))
    }

    /// Keep `columns` (in that order) of the rows whose scheme is in `schemes`.
    pub fn select(&self, columns: &[&str], schemes: &[Scheme]) -> Result<Table> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| self.require(c))
            .collect::<Result<_>>()?;
        let scheme_col = self.require("scheme")?;
        let mut out = Table::new(columns);
        for row in &self.rows {
            let keep = match row[scheme_col].as_text().map(str::parse::<Scheme>) {
                Some(Ok(s)) => schemes.contains(&s),
                _ => false,
            };
            if keep {
                out.rows.push(idx.iter().map(|&i| row[i].clone()).collect());
            }
        }
        Ok(out)
    }
}

/// Column subsets plotting one quantity against zenith angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Fig10,
        Preset::Fig11,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
            Preset::Fig11 => "fig11",
        }
    }

    pub fn value_column(self) -> &'static str {
        match self {
            Preset::Fig2 => "theta_path",
            Preset::Fig3 => "sigma2_path",
            Preset::Fig4 | Preset::Fig8 => "strehl",
            Preset::Fig5 | Preset::Fig9 => "eta_total",
            Preset::Fig6 | Preset::Fig10 => "E_mu",
            Preset::Fig7 | Preset::Fig11 => "rate_hz",
        }
    }

    pub fn schemes(self) -> &'static [Scheme] {
        use Scheme::*;
        match self {
            Preset::Fig2 | Preset::Fig3 => &[SpatialPioneer, PureTdm],
            Preset::Fig4 | Preset::Fig5 | Preset::Fig6 | Preset::Fig7 => {
                &[SpatialPioneer, PureTdm, PureWdm, NoAo]
            }
            _ => &[WdmPioneer, PureWdm, NoAo],
        }
    }

    pub fn columns(self) -> [&'static str; 5] {
        ["scheme", "h_alt", "L", "zenith_deg", self.value_column()]
    }

    pub fn apply(self, full: &Table) -> Result<Table> {
        full.select(&self.columns(), self.schemes())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown preset '{s}' (expected fig2 ... fig11 or full)"
                ))
            })
    }
}

fn writer<W: std::io::Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn write_into<W: std::io::Write>(table: &Table, w: &mut csv::Writer<W>) -> csv::Result<()> {
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text of `table`: header row, numbers at nine significant digits, LF endings.
pub fn emit_csv(table: &Table) -> String {
    let mut w = writer(Vec::new());
    write_into(table, &mut w).expect("writing to memory cannot fail");
    String::from_utf8(w.into_inner().expect("flushed")).expect("CSV output is UTF-8")
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = writer(std::io::BufWriter::new(file));
    write_into(table, &mut w).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let columns: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let mut row = Vec::with_capacity(record.len());
        for (name, field) in table.columns.iter().zip(record.iter()) {
            if TEXT_COLUMNS.contains(&name.as_str()) {
                row.push(Value::Text(field.to_string()));
            } else {
                let x: f64 = field.parse().map_err(|_| {
                    Error::Invalid(format!(
                        "{}: data row {}: column '{name}': '{field}' is not a number",
                        path.display(),
                        i + 1
                    ))
                })?;
                row.push(Value::Number(x));
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["scheme", "h_alt", "L", "zenith_deg", "rate_hz", "status"]);
        t.rows.push(vec![
            Value::Text("pure_tdm".into()),
            Value::Number(4e5),
            Value::Number(1.0),
            Value::Number(0.0),
            Value::Number(1.0 / 3.0),
            Value::Text("ok".into()),
        ]);
        t.rows.push(vec![
            Value::Text("spatial_pioneer".into()),
            Value::Number(8e5),
            Value::Number(5.0),
            Value::Number(75.0),
            Value::Number(f64::NAN),
            Value::Text("failed: quadrature, \"x\"".into()),
        ]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["scheme", "rate_hz"]);
        assert_eq!(emit_csv(&t), "scheme,rate_hz\n");
    }

    #[test]
    fn lf_and_quoting() {
        let text = emit_csv(&sample());
        assert!(!text.contains('\r'));
        assert!(text.contains("0.333333333"));
        assert!(text.contains("\"failed: quadrature, \"\"x\"\"\""));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn preset_columns_and_filter() {
        let mut t = sample();
        t.columns.push("theta_path".into());
        for row in &mut t.rows {
            row.push(Value::Number(1e-6));
        }
        let fig7 = Preset::Fig7.apply(&t).unwrap();
        assert_eq!(
            fig7.columns,
            ["scheme", "h_alt", "L", "zenith_deg", "rate_hz"]
        );
        assert_eq!(fig7.rows.len(), 2);
        let fig11 = Preset::Fig11.apply(&t).unwrap();
        assert!(fig11.rows.is_empty());
        assert!(Preset::Fig4.apply(&Table::new(&["scheme"])).is_err());
    }

    #[test]
    fn preset_names() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig1".parse::<Preset>().is_err());
        assert_eq!("FIG10".parse::<Preset>().unwrap(), Preset::Fig10);
    }
}
