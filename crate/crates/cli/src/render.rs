use std::io::Write;

use serde::Serialize;

use quintiq::ConvexityReport;

use crate::commands::{CheckReport, ExperimentTable, IntegrateReport};
use crate::config::{CommandKind, MethodArg, OutputFormat};
use crate::error::CliError;

fn json<W: Write + ?Sized, S: Serialize>(out: &mut W, value: &S) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::from)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_rows<W: Write + ?Sized>(out: &mut W, rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv_writer(Vec::new());
    for row in rows {
        w.write_record(row).map_err(std::io::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    out.write_all(&bytes)?;
    Ok(())
}

fn class_name(method: MethodArg) -> &'static str {
    match method {
        MethodArg::Quintic => "5-convex or 5-concave",
        MethodArg::Cubic => "3-convex or 3-concave",
    }
}

pub fn integrate<W: Write + ?Sized>(out: &mut W, r: &IntegrateReport, format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => json(out, r),
        OutputFormat::Csv => csv_rows(
            out,
            &[
                ["method", "precision", "value", "n_final", "gap_final", "epsilon", "evaluations"]
                    .map(String::from)
                    .to_vec(),
                vec![
                    format!("{:?}", r.method).to_lowercase(),
                    r.precision.to_string(),
                    r.value.clone(),
                    r.n_final.to_string(),
                    r.gap_final.clone(),
                    r.epsilon.clone(),
                    r.evaluations.to_string(),
                ],
            ],
        ),
        OutputFormat::Human => {
            writeln!(out, "value        {}", r.value)?;
            writeln!(out, "n            {}", r.n_final)?;
            writeln!(out, "gap          {}", r.gap_final)?;
            writeln!(out, "error bound  {}  (if f is {})", r.error_bound, class_name(r.method))?;
            writeln!(out, "evaluations  {}", r.evaluations)?;
            writeln!(out, "method       {}, {} precision", format!("{:?}", r.method).to_lowercase(), r.precision)?;
            if let Some(c) = &r.convexity {
                writeln!(out, "convexity    {}", summary(c))?;
            }
            Ok(())
        }
    }
}

fn summary(c: &ConvexityReport) -> String {
    format!(
        "{:?} (order {}, {} samples: {} positive, {} negative, {} near zero; min {:e})",
        c.verdict, c.order, c.samples_tested, c.positive, c.negative, c.near_zero, c.min_divided_difference
    )
}

pub fn check<W: Write + ?Sized>(out: &mut W, r: &CheckReport, format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => json(out, r),
        OutputFormat::Csv => {
            let header = ["evidence", "order", "samples", "positive", "negative", "near_zero", "min", "max", "verdict"]
                .map(String::from)
                .to_vec();
            let mut rows = vec![header];
            for c in [Some(&r.sampled), r.derivative.as_ref()].into_iter().flatten() {
                rows.push(vec![
                    format!("{:?}", c.evidence),
                    c.order.to_string(),
                    c.samples_tested.to_string(),
                    c.positive.to_string(),
                    c.negative.to_string(),
                    c.near_zero.to_string(),
                    format!("{:e}", c.min_divided_difference),
                    format!("{:e}", c.max_divided_difference),
                    format!("{:?}", c.verdict),
                ]);
            }
            csv_rows(out, &rows)
        }
        OutputFormat::Human => {
            writeln!(out, "divided differences  {}", summary(&r.sampled))?;
            if !r.sampled.witness.is_empty() {
                writeln!(out, "  minimum at          {:?}", r.sampled.witness)?;
            }
            match (&r.derivative, &r.derivative_unavailable) {
                (Some(d), _) => writeln!(out, "derivative {:<9} {}", format!("f^({})", r.order + 1), summary(d))?,
                (None, Some(why)) => writeln!(out, "derivative           unavailable: {why}")?,
                (None, None) => {}
            }
            Ok(())
        }
    }
}

fn count(n: Option<usize>) -> String {
    n.map_or_else(|| "skipped".to_string(), |n| n.to_string())
}

pub fn experiment<W: Write + ?Sized>(out: &mut W, t: &ExperimentTable, format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => json(out, t),
        OutputFormat::Csv => {
            let mut rows = vec![vec![t.label_header.to_string(), "n_quintic".to_string(), "n_cubic".to_string()]];
            rows.extend(t.rows.iter().map(|r| vec![r.label.clone(), count(r.n_quintic), count(r.n_cubic)]));
            csv_rows(out, &rows)
        }
        OutputFormat::Human => {
            let title = match t.experiment {
                CommandKind::Experiment1 => "integral of 1/x over [1, 2]",
                _ => "integral of exp(x) over [0, b], eps = 1e-8",
            };
            writeln!(out, "{title} ({} precision)", t.precision)?;
            writeln!(out, "{:>8}  {:>9}  {:>9}", t.label_header, "quintic", "cubic")?;
            for r in &t.rows {
                match &r.skipped {
                    Some(why) => writeln!(out, "{:>8}  {why}", r.label)?,
                    None => writeln!(out, "{:>8}  {:>9}  {:>9}", r.label, count(r.n_quintic), count(r.n_cubic))?,
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::ExperimentRow;
    use crate::config::{Precision, StrategyArg};

    fn table() -> ExperimentTable {
        ExperimentTable {
            experiment: CommandKind::Experiment1,
            label_header: "epsilon",
            precision: Precision::Double,
            strategy: StrategyArg::Linear,
            rows: vec![
                ExperimentRow { label: "1e-1".into(), n_quintic: Some(1), n_cubic: Some(1), skipped: None },
                ExperimentRow { label: "1e-16".into(), n_quintic: None, n_cubic: None, skipped: Some("x".into()) },
            ],
        }
    }

    #[test]
    fn csv_uses_lf_and_skip_marker() {
        let mut buf = Vec::new();
        experiment(&mut buf, &table(), OutputFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "epsilon,n_quintic,n_cubic\n1e-1,1,1\n1e-16,skipped,skipped\n");
    }

    #[test]
    fn json_has_no_volatile_fields() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        experiment(&mut a, &table(), OutputFormat::Json).unwrap();
        experiment(&mut b, &table(), OutputFormat::Json).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(v["experiment"], "experiment1");
        assert_eq!(v["precision"], "double");
        assert!(v["rows"][1]["n_quintic"].is_null());
    }
}
