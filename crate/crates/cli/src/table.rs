use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{Command, Format};
use crate::CliError;

/// Every value is pre-rendered to a string, so byte stability comes down
/// to the formatting helpers below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTable {
    pub meta: BTreeMap<String, String>,
    pub schema: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    pub fn new(schema: &[&str], meta: BTreeMap<String, String>) -> Self {
        ResultTable {
            meta,
            schema: schema.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.schema.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let idx = self.schema.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    pub fn to_csv(&self) -> String {
        let meta = serde_json::to_string(&self.meta).expect("string map serializes");
        let mut out = format!("# {meta}\n{}\n", self.schema.join(","));
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("string table serializes");
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e16)` so tiny errors stay readable.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let a = v.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn format_rational(r: &pqapprox_core::Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn emit(table: &ResultTable, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = table.render(format);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

pub fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

/// A gnuplot script reading `csv`; columns are addressed by header name.
pub fn plot_script(table: &ResultTable, command: Command, csv: &Path) -> String {
    let (x, ys, logscale): (&str, &[&str], &str) = match command {
        Command::Eval => ("x", &["b_r_f", "f"], ""),
        Command::Converge => ("bracket_n", &["sup_error", "bound"], "xy"),
        Command::Voronovskaja => ("n", &["deviation", "scaled_deviation"], "xy"),
        Command::Constants => ("m", &["c_hat", "k_hat"], "y"),
        Command::Moments | Command::RecurrenceCheck => ("n", &[], ""),
    };
    let path = csv.display().to_string().replace('\'', "''");
    let mut s = String::new();
    s.push_str(&format!("# {} {}\n", table.meta.get("command").map_or("", String::as_str), table.meta.get("function").map_or("", String::as_str)));
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str(&format!("set xlabel '{x}'\n"));
    if !logscale.is_empty() {
        s.push_str(&format!("set logscale {logscale}\n"));
    }
    let plots: Vec<String> = ys
        .iter()
        .map(|y| format!("'{path}' using '{x}':'{y}' with linespoints title '{y}'"))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

pub fn write_plot(table: &ResultTable, command: Command, csv: &Path) -> Result<(), CliError> {
    let path = plot_path(csv);
    std::fs::write(&path, plot_script(table, command, csv)).map_err(|source| CliError::Io { path, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pqapprox_core::ratio;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.7e-14, 1e300, -5e-5, 123456.789, std::f64::consts::PI] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_f64(2.7e-14), "2.7e-14");
        assert_eq!(format_f64(-0.0), "0");
        assert_eq!(format_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn rationals_keep_denominator() {
        assert_eq!(format_rational(&ratio(6, 8)), "3/4");
        assert_eq!(format_rational(&ratio(2, 1)), "2/1");
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
    }

    #[test]
    fn csv_and_json_layout() {
        let mut meta = BTreeMap::new();
        meta.insert("b".to_string(), "2".to_string());
        meta.insert("a".to_string(), "1".to_string());
        let mut t = ResultTable::new(&["n", "value"], meta);
        t.push(vec!["1".into(), "0.5".into()]);
        assert_eq!(t.to_csv(), "# {\"a\":\"1\",\"b\":\"2\"}\nn,value\n1,0.5\n");
        let back: ResultTable = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.column("value").unwrap(), vec!["0.5"]);
    }

    #[test]
    fn plot_script_names_the_csv() {
        let t = ResultTable::new(&["n", "sup_error"], BTreeMap::new());
        let s = plot_script(&t, Command::Converge, Path::new("out/run.csv"));
        assert!(s.contains("'out/run.csv'"));
        assert!(s.contains("set datafile separator ','"));
        assert_eq!(plot_path(Path::new("out/run.csv")), PathBuf::from("out/run.gp"));
    }
}
