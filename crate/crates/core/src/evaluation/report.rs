use std::fmt::Write;

use super::{MseReport, DISPLAY_NAMES};

/// One model column of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelColumn {
    pub name: String,
    pub raw: MseReport,
    pub normalized: MseReport,
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.6e}"),
        None => "absent".to_string(),
    }
}

fn section(out: &mut String, title: &str, columns: &[ModelColumn], pick: fn(&ModelColumn) -> &MseReport) {
    const FIRST: usize = 12;
    const WIDTH: usize = 16;
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:<FIRST$}", "parameter");
    for c in columns {
        let _ = write!(out, "{:>WIDTH$}", c.name);
    }
    out.push('\n');
    for (p, name) in DISPLAY_NAMES.iter().enumerate() {
        let _ = write!(out, "{name:<FIRST$}");
        for c in columns {
            let _ = write!(out, "{:>WIDTH$}", cell(pick(c).per_parameter[p]));
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<FIRST$}", "L");
    for c in columns {
        let r = pick(c);
        let text = match r.combined {
            Some(v) if !r.is_complete() => format!("{v:.6e}*"),
            v => cell(v),
        };
        let _ = write!(out, "{text:>WIDTH$}");
    }
    out.push('\n');
}

/// Text table of MSE values: one row per target parameter, one column per
/// model, once on the raw scale and once on the [1, 10] scale.
pub fn render_table(columns: &[ModelColumn]) -> String {
    let mut out = String::new();
    section(&mut out, "MSE, raw units (GHz², ns²)", columns, |c| &c.raw);
    out.push('\n');
    section(&mut out, "MSE, normalized scale [1, 10]", columns, |c| &c.normalized);
    if columns.iter().any(|c| !c.raw.is_complete()) {
        out.push_str("\n* averaged over the predicted parameters only\n");
    }
    for c in columns {
        let _ = writeln!(out, "{}: {} samples", c.name, c.raw.counts.iter().max().copied().unwrap_or(0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::Scale;

    fn report(scale: Scale, v: [Option<f64>; 4]) -> MseReport {
        let counts = v.map(|x| usize::from(x.is_some()) * 10);
        let present: Vec<f64> = v.iter().flatten().copied().collect();
        let combined = (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64);
        MseReport { scale, per_parameter: v, counts, combined }
    }

    #[test]
    fn four_rows_per_section_and_absent_marks() {
        let cols = vec![
            ModelColumn {
                name: "M1".into(),
                raw: report(Scale::Raw, [Some(0.003), Some(1e-4), Some(4672253.5), Some(2e7)]),
                normalized: report(Scale::Normalized, [Some(0.1), Some(0.2), Some(3.0), Some(4.0)]),
            },
            ModelColumn {
                name: "analytic".into(),
                raw: report(Scale::Raw, [Some(1e-4), Some(2e-5), None, None]),
                normalized: report(Scale::Normalized, [Some(0.01), Some(0.02), None, None]),
            },
        ];
        let text = render_table(&cols);
        for name in DISPLAY_NAMES {
            assert_eq!(text.lines().filter(|l| l.starts_with(name)).count(), 2, "{name}\n{text}");
        }
        assert_eq!(text.matches("absent").count(), 4);
        assert!(text.contains("3.000000e-3"));
        assert!(text.contains("averaged over the predicted parameters only"));
    }
}
