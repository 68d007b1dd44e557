use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::scenarios::PlotSeries;
use crate::error::{Error, Result};

/// Whitespace-separated columns with a `#` header line.
pub fn format_dat(s: &PlotSeries) -> String {
    let mut out = format!("# {}\n", s.columns.join(" "));
    for row in &s.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Gnuplot script drawing every series against its first column.
pub fn gnuplot_script(series: &[PlotSeries]) -> String {
    let mut out = String::from("set terminal pngcairo size 900,600\nset key top right\n");
    for s in series {
        let _ = writeln!(out, "\nset output '{}.png'", s.name);
        let _ = writeln!(out, "set xlabel '{}'", s.columns[0]);
        out.push_str(if s.log_y { "set logscale y\n" } else { "unset logscale y\n" });
        let curves: Vec<String> = (1..s.columns.len())
            .map(|c| format!("'{}.dat' using 1:{} with lines title '{}'", s.name, c + 1, s.columns[c]))
            .collect();
        let _ = writeln!(out, "plot {}", curves.join(", \\\n     "));
    }
    out
}

/// Writes `<name>.dat` per series and `plot.gp`; returns the written paths.
pub fn write_plots(dir: &Path, series: &[PlotSeries]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for s in series {
        let p = dir.join(format!("{}.dat", s.name));
        std::fs::write(&p, format_dat(s)).map_err(|e| Error::io(&p, e))?;
        written.push(p);
    }
    let p = dir.join("plot.gp");
    std::fs::write(&p, gnuplot_script(series)).map_err(|e| Error::io(&p, e))?;
    written.push(p);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dat_rows_parse_back() {
        let s = PlotSeries {
            name: "q".into(),
            columns: vec!["t".into(), "q".into()],
            rows: vec![vec![0.0, 1.0 / 3.0], vec![0.5, 1e-300]],
            log_y: true,
        };
        let text = format_dat(&s);
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows, s.rows);
        assert!(gnuplot_script(&[s]).contains("'q.dat' using 1:2"));
    }
}
