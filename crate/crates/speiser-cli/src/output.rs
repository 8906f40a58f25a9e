//! Deterministic output plumbing: configuration headers, CSV with a
//! fixed numeric format, hand-rolled SVG decay plots, and fixture-path
//! resolution for inputs.

use std::path::{Path, PathBuf};

use crate::CliResult;

/// Fixed 12-significant-digit format, '.' decimal, so identical runs
/// produce identical bytes.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub fn opt_sig(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

/// `# key = value` lines naming the subcommand and every resolved
/// setting; both SPG and DOT readers treat '#' lines as comments, so
/// the header rides along in any output format.
pub fn header_block(title: &str, entries: &[(String, String)]) -> String {
    let mut s = format!("# speiser {title}\n");
    for (k, v) in entries {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

pub fn csv(title: &str, entries: &[(String, String)], columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header_block(title, entries);
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Write to the path, or to stdout when no path was given.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Inputs that do not exist as given fall back to the fixture
/// directory: $SPEISER_FIXTURES when set, ./fixtures otherwise.
pub fn resolve_input(raw: &str) -> PathBuf {
    let direct = PathBuf::from(raw);
    if direct.exists() {
        return direct;
    }
    let dir = std::env::var("SPEISER_FIXTURES").unwrap_or_else(|_| "fixtures".to_string());
    let fallback = Path::new(&dir).join(raw);
    if fallback.exists() {
        fallback
    } else {
        direct
    }
}

/// Log-log decay plot of positive (x, y) points as a standalone SVG:
/// a polyline with markers, decade gridlines, and tick labels.
pub fn svg_loglog(title: &str, points: &[(f64, f64)]) -> String {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|&(x, y)| (x.log10(), y.log10()))
        .collect();
    let (w, h, ml, mr, mt, mb) = (640.0, 480.0, 70.0, 20.0, 40.0, 50.0);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        w / 2.0,
        title
    ));
    if pts.is_empty() {
        s.push_str("<text x=\"320\" y=\"240\" text-anchor=\"middle\" font-family=\"monospace\">no positive data</text>\n</svg>\n");
        return s;
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    // pad degenerate ranges so a flat profile still draws
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    // decade gridlines
    for d in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = px(d as f64);
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{mt}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ccc\"/>\n",
            h - mb
        ));
        s.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">1e{d}</text>\n",
            h - mb + 18.0
        ));
    }
    for d in (y0.ceil() as i64)..=(y1.floor() as i64) {
        let y = py(d as f64);
        s.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ccc\"/>\n",
            w - mr
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">1e{d}</text>\n",
            ml - 6.0,
            y + 4.0
        ));
    }
    s.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>\n",
        w - ml - mr,
        h - mt - mb
    ));
    let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
        path.join(" ")
    ));
    for &(x, y) in &pts {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\"/>\n",
            px(x),
            py(y)
        ));
    }
    s.push_str("</svg>\n");
    s
}
