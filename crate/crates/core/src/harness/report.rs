//! Run directory layout: diagnostics.csv, manifest.json, verdict.json, *.svg.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::diagnostics::DiagnosticsRow;
use super::run::{Manifest, RunOutput};
use super::verdict::Verdict;
use crate::{Error, Result};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const VERDICT_FILE: &str = "verdict.json";

const QUANTITIES: [&str; 7] = ["E", "K", "W", "N_high", "N_low", "sup_grad", "sup_inner"];

pub fn csv_header(m: usize, bins: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for c in 1..=m {
        h.extend(QUANTITIES.iter().map(|q| format!("{q}_{c}")));
    }
    for c in 1..=m {
        h.extend((0..bins).map(|b| format!("cone_{c}_{b}")));
    }
    h
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let (m, bins) = rows.first().map(|r| (r.comps.len(), r.comps.first().map_or(0, |c| c.cone.len()))).unwrap_or((0, 0));
    let mut out = csv_header(m, bins).join(",");
    out.push('\n');
    for r in rows {
        let mut vals = vec![r.t];
        for c in &r.comps {
            vals.extend([c.e, c.k, c.w, c.n_high, c.n_low, c.sup_grad, c.sup_inner]);
        }
        for c in &r.comps {
            vals.extend(c.cone.iter().copied());
        }
        let line: Vec<String> = vals.iter().map(|v| format!("{v:.12e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Column-major table read back from a CSV with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Config("empty csv".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut columns = vec![Vec::new(); header.len()];
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != header.len() {
                return Err(Error::Config(format!("csv row {} has {} cells, header has {}", i + 2, cells.len(), header.len())));
            }
            for (col, cell) in columns.iter_mut().zip(cells) {
                let v = cell.trim().parse::<f64>().map_err(|e| Error::Config(format!("csv row {}: {e}", i + 2)))?;
                col.push(v);
            }
        }
        Ok(Table { header, columns })
    }

    pub fn read(path: &Path) -> Result<Table> {
        Table::parse(&fs::read_to_string(path)?)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Config(format!("no column {name:?}; have {}", self.header.join(","))))
    }

    /// (t, column) pairs.
    pub fn series(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let t = self.column("t")?;
        Ok(t.iter().copied().zip(self.column(name)?.iter().copied()).collect())
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-log line plot. Non-positive samples are skipped.
pub fn loglog_svg(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min).floor();
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi > lo { (lo, hi) } else { (lo, lo + 1.0) }
    };
    let (x0, x1) = bounds(|p| p.0);
    let (y0, y1) = bounds(|p| p.1);
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for d in (x0 as i32)..=(x1 as i32) {
        let x = sx(d as f64);
        let _ = writeln!(svg, r##"<line x1="{x:.1}" y1="{pad}" x2="{x:.1}" y2="{}" stroke="#ddd"/>"##, h - pad);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{}" text-anchor="middle">1e{d}</text>"#, h - pad + 16.0);
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = sy(d as f64);
        let _ = writeln!(svg, r##"<line x1="{pad}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/>"##, w - pad);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"#, pad - 4.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, w / 2.0, h - 12.0);
    for (i, (name, s)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x.log10()), sy(y.log10())))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        let ly = pad + 16.0 * (i as f64 + 1.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{ly:.1}" fill="{colour}" text-anchor="end">{}</text>"#, w - pad - 6.0, escape(name));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One plot per diagnostic quantity, all components overlaid.
pub fn plots(table: &Table) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for q in QUANTITIES {
        let prefix = format!("{q}_");
        let series: Vec<(String, Vec<(f64, f64)>)> = table
            .header
            .iter()
            .filter(|h| h.strip_prefix(&prefix).is_some_and(|rest| rest.parse::<usize>().is_ok()))
            .map(|h| Ok((h.clone(), table.series(h)?)))
            .collect::<Result<_>>()?;
        if !series.is_empty() {
            out.insert(format!("{q}.svg"), loglog_svg(q, &series));
        }
    }
    Ok(out)
}

pub fn write_run_dir(dir: &Path, out: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    let csv = diagnostics_csv(&out.trajectory.rows);
    fs::write(dir.join(DIAGNOSTICS_FILE), &csv)?;
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&out.manifest)?)?;
    fs::write(dir.join(VERDICT_FILE), out.verdict.to_json())?;
    for (name, svg) in plots(&Table::parse(&csv)?)? {
        fs::write(dir.join(name), svg)?;
    }
    if let Some(b) = &out.bootstrap {
        fs::write(dir.join("bootstrap.json"), serde_json::to_string_pretty(b)?)?;
        let s = vec![("functional".to_string(), b.series.clone()), ("bound".to_string(), b.series.iter().map(|p| (p.0, b.bound)).collect())];
        fs::write(dir.join("bootstrap.svg"), loglog_svg("bootstrap functional", &s))?;
    }
    if !out.fits.is_empty() {
        fs::write(dir.join("fits.json"), serde_json::to_string_pretty(&out.fits)?)?;
    }
    Ok(())
}

pub struct RunDir {
    pub table: Table,
    pub manifest: Manifest,
    pub verdict: Verdict,
}

pub fn read_run_dir(dir: &Path) -> Result<RunDir> {
    let table = Table::read(&dir.join(DIAGNOSTICS_FILE))?;
    let manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let verdict = serde_json::from_str(&fs::read_to_string(dir.join(VERDICT_FILE))?)?;
    Ok(RunDir { table, manifest, verdict })
}

/// Plain-text summary and regenerated plots.
pub fn summarize(dir: &Path) -> Result<(String, Verdict)> {
    let rd = read_run_dir(dir)?;
    for (name, svg) in plots(&rd.table)? {
        fs::write(dir.join(name), svg)?;
    }
    let mut s = String::new();
    let _ = writeln!(s, "run {} (config {}, seed {})", dir.display(), &rd.manifest.config_hash[..12.min(rd.manifest.config_hash.len())], rd.manifest.seed);
    let t = rd.table.column("t")?;
    let _ = writeln!(s, "samples {}  t in [{}, {}]  warning {}", t.len(), t.first().unwrap_or(&f64::NAN), t.last().unwrap_or(&f64::NAN), rd.manifest.warning);
    for h in rd.table.header.iter().filter(|h| !h.starts_with("cone_") && *h != "t") {
        let col = rd.table.column(h)?;
        let series = rd.table.series(h)?;
        let rate = super::fit::decay_fit(&series, super::fit::last_octave(&series)).map(|f| format!("{:+.3}", f.exponent)).unwrap_or_else(|_| "n/a".into());
        let _ = writeln!(s, "{h:>10}  first {:.4e}  last {:.4e}  last-octave rate {rate}", col.first().unwrap_or(&f64::NAN), col.last().unwrap_or(&f64::NAN));
    }
    for (id, c) in &rd.verdict.0 {
        if let Some(p) = c.pass {
            let _ = writeln!(s, "{} {id}  value {:?}  bound {:?}", if p { "PASS" } else { "FAIL" }, c.value, c.bound);
        }
    }
    Ok((s, rd.verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ComponentDiagnostics;

    fn row(t: f64) -> DiagnosticsRow {
        let c = ComponentDiagnostics { e: 1.0, k: 1.0 / t, w: 0.5, n_high: 1e-3, n_low: 2e-3, cone: vec![0.1, 0.2], sup_grad: 1.0 / t, sup_inner: 0.0 };
        DiagnosticsRow { t, comps: vec![c.clone(), c] }
    }

    #[test]
    fn csv_round_trip() {
        let rows: Vec<DiagnosticsRow> = (1..5).map(|i| row(i as f64)).collect();
        let csv = diagnostics_csv(&rows);
        let tab = Table::parse(&csv).unwrap();
        assert_eq!(tab.header.len(), 1 + 2 * 7 + 2 * 2);
        assert_eq!(&tab.header[..6], &["t", "E_1", "K_1", "W_1", "N_high_1", "N_low_1"]);
        assert_eq!(tab.column("K_2").unwrap()[3], 0.25);
        assert_eq!(tab.column("sup_grad_1").unwrap()[1], 0.5);
        assert_eq!(tab.column("sup_inner_2").unwrap()[0], 0.0);
        assert!(tab.column("X").is_err());
        let svg = loglog_svg("K", &[("K_1".into(), tab.series("K_1").unwrap())]);
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Table::parse("t,a\n1,2\n3\n").is_err());
    }
}
