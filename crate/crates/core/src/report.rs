//! CSV and aligned-text renderings of the linguistic and network reports.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::lingstats::format_p;
use crate::netmetrics::{NetworkKind, PartialNetworkMetrics};
use crate::pipeline::{LinguisticReport, NetworkReport};

pub const LINGUISTIC_COLUMNS: [&str; 9] = [
    "category", "t1_pro", "t1_anti", "z1", "p1", "t2_pro", "t2_anti", "z2", "p2",
];

// Debug formatting switches to exponent notation for tiny p-values.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One row per category; proportions in `[0, 1]`, empty cells where a
/// statistic is undefined.
pub fn write_linguistic_csv<W: Write>(report: &LinguisticReport, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(LINGUISTIC_COLUMNS)?;
    for row in &report.rows {
        wtr.write_record([
            row.category_id.clone(),
            num(row.t1_pro),
            num(row.t1_anti),
            opt(row.z1),
            opt(row.p1),
            opt(row.t2_pro),
            opt(row.t2_anti),
            opt(row.z2),
            opt(row.p2),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let mut parts = Vec::new();
        for (i, cell) in cells.enumerate() {
            let pad = widths[i] - cell.chars().count();
            if i == 0 {
                parts.push(format!("{cell}{}", " ".repeat(pad)));
            } else {
                parts.push(format!("{}{cell}", " ".repeat(pad)));
            }
        }
        let _ = writeln!(out, "{}", parts.join(" | ").trim_end());
    };
    line(&mut header.iter().copied(), &mut out);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    let _ = writeln!(out, "{}", rule.join("-+-"));
    for row in rows {
        line(&mut row.iter().map(String::as_str), &mut out);
    }
    out
}

fn pct(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

/// Aligned table: percentages, two-decimal z-scores, `<.001` p-values and
/// `-` for undefined cells. Sub-categories are indented.
pub fn render_linguistic_table(report: &LinguisticReport) -> String {
    let header = [
        "Lexical category",
        "T1 (Pro)",
        "T1 (Anti)",
        "z-score (Z1)",
        "p-value (Z1)",
        "T2 (Pro)",
        "T2 (Anti)",
        "z-score (Z2)",
        "p-value (Z2)",
    ];
    let dash = || "-".to_string();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let name = if r.parent.is_some() {
                format!("  {}", r.display_name)
            } else {
                r.display_name.clone()
            };
            vec![
                name,
                pct(r.t1_pro),
                pct(r.t1_anti),
                r.z1.map_or_else(dash, |z| format!("{z:.2}")),
                r.p1.map_or_else(dash, format_p),
                r.t2_pro.map_or_else(dash, pct),
                r.t2_anti.map_or_else(dash, pct),
                r.z2.map_or_else(dash, |z| format!("{z:.2}")),
                r.p2.map_or_else(dash, format_p),
            ]
        })
        .collect();
    let mut out = format!(
        "{} pro users with {} tweets, {} anti users with {} tweets (alpha = {})\n\n",
        report.pro_users, report.pro_tweets, report.anti_users, report.anti_tweets, report.alpha
    );
    out.push_str(&render_table(&header, &rows));
    out
}

type Measure = (&'static str, fn(&PartialNetworkMetrics) -> Option<f64>);

const MEASURES: [Measure; 7] = [
    ("density", |m| m.density_all),
    ("density_pro", |m| m.density_pro),
    ("density_anti", |m| m.density_anti),
    ("ei_pro", |m| m.ei_pro.map(|e| e.ei)),
    ("ei_anti", |m| m.ei_anti.map(|e| e.ei)),
    ("ec_pro", |m| m.ec_pro),
    ("ec_anti", |m| m.ec_anti),
];

const MEASURE_LABELS: [&str; 7] = [
    "Network Density",
    "Network Density (Pro)",
    "Network Density (Anti)",
    "EI Index (Pro)",
    "EI Index (Anti)",
    "Echo-chamberness (Pro)",
    "Echo-chamberness (Anti)",
];

fn cell(report: &NetworkReport, kind: NetworkKind, measure: usize) -> Option<f64> {
    report.networks.get(&kind).and_then(MEASURES[measure].1)
}

/// Rows are measures, columns are the mention, retweet and reply networks.
pub fn write_network_csv<W: Write>(report: &NetworkReport, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["measure", "mention", "retweet", "reply"])?;
    for (i, (name, _)) in MEASURES.iter().enumerate() {
        let mut record = vec![name.to_string()];
        record.extend(NetworkKind::ALL.iter().map(|&k| opt(cell(report, k, i))));
        wtr.write_record(record)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn render_network_table(report: &NetworkReport) -> String {
    let header = ["Measure", "Mention Network", "Retweet Network", "Reply Network"];
    let rows: Vec<Vec<String>> = MEASURE_LABELS
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let mut row = vec![label.to_string()];
            for kind in NetworkKind::ALL {
                row.push(match cell(report, kind, i) {
                    None => "-".to_string(),
                    Some(v) if i < 3 => format!("{v:.1e}"),
                    Some(v) if i < 5 => format!("{v:.3}"),
                    Some(v) => format!("{v:.10}"),
                });
            }
            row
        })
        .collect();
    render_table(&header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lingstats::CategoryStats;
    use std::collections::BTreeMap;

    fn row(id: &str, parent: Option<&str>) -> CategoryStats {
        CategoryStats {
            category_id: id.into(),
            display_name: id.into(),
            parent: parent.map(str::to_string),
            t1_pro: 0.459,
            t1_anti: 0.506,
            n1_pro: 10,
            n1_anti: 10,
            z1: Some(-36.25),
            p1: Some(1e-200),
            t2_pro: None,
            t2_anti: None,
            sd2_pro: None,
            sd2_anti: None,
            n2_pro: 0,
            n2_anti: 0,
            z2: None,
            p2: None,
            significant_1: true,
            significant_2: false,
        }
    }

    fn report() -> LinguisticReport {
        LinguisticReport {
            pro_users: 1,
            anti_users: 1,
            pro_tweets: 10,
            anti_tweets: 10,
            alpha: 0.05,
            rows: vec![row("intensifiers", None), row("exclamation", Some("intensifiers"))],
        }
    }

    #[test]
    fn linguistic_csv_columns() {
        let mut buf = Vec::new();
        write_linguistic_csv(&report(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "category,t1_pro,t1_anti,z1,p1,t2_pro,t2_anti,z2,p2");
        assert_eq!(lines.next().unwrap(), "intensifiers,0.459,0.506,-36.25,1e-200,,,,");
    }

    #[test]
    fn linguistic_table_layout() {
        let table = render_linguistic_table(&report());
        let header = table.lines().nth(2).unwrap();
        let cols: Vec<&str> = header.split('|').map(str::trim).collect();
        assert_eq!(
            cols,
            vec![
                "Lexical category",
                "T1 (Pro)",
                "T1 (Anti)",
                "z-score (Z1)",
                "p-value (Z1)",
                "T2 (Pro)",
                "T2 (Anti)",
                "z-score (Z2)",
                "p-value (Z2)"
            ]
        );
        let last = table.lines().last().unwrap();
        assert!(last.starts_with("  exclamation"));
        assert!(last.contains("45.90%") && last.contains("-36.25") && last.contains("<.001"));
        assert!(last.trim_end().ends_with('-'));
    }

    #[test]
    fn network_table_rows() {
        let metrics = PartialNetworkMetrics {
            density_all: Some(1.7e-5),
            ..PartialNetworkMetrics::default()
        };
        let report = NetworkReport {
            networks: BTreeMap::from([(NetworkKind::Mention, metrics)]),
        };
        let table = render_network_table(&report);
        let labels: Vec<&str> = table.lines().skip(2).map(|l| l.split('|').next().unwrap().trim()).collect();
        assert_eq!(labels, MEASURE_LABELS.to_vec());
        assert!(table.lines().nth(2).unwrap().contains("1.7e-5"));

        let mut buf = Vec::new();
        write_network_csv(&report, &mut buf).unwrap();
        let csv = String::from_utf8(buf).unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), "density,1.7e-5,,");
    }
}
