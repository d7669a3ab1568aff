//! Result tables in the layout of published benchmark tables: one row per
//! instance, then lower bound, upper bound, status and time per model.

use std::time::Duration;

use super::ParseError;
use crate::engine::{SolveOutcome, Status};
use crate::formulations::ModelKind;

pub const ABSENT: &str = "-";
pub const OPTIMAL_MARK: &str = "*";

/// One model's figures for one instance, in fixed-point units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultEntry {
    pub model: ModelKind,
    pub status: Status,
    pub lower_bound: Option<i64>,
    pub upper_bound: Option<i64>,
    pub time: Duration,
}

impl ResultEntry {
    pub fn from_outcome(model: ModelKind, outcome: &SolveOutcome, time: Duration) -> Self {
        let lower_bound = match outcome.status {
            Status::Infeasible => None,
            _ => Some(outcome.lower_bound),
        };
        Self {
            model,
            status: outcome.status,
            lower_bound,
            upper_bound: outcome.upper_bound,
            time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    pub instance: String,
    pub trucks: usize,
    pub drones: usize,
    /// Fixed-point scale of the instance, used to print original units.
    pub scale: i64,
    pub entries: Vec<ResultEntry>,
}

/// A model's cells read back from a table; bounds are in hundredths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultCell {
    pub model: String,
    pub lower_bound: Option<i64>,
    pub upper_bound: Option<i64>,
    pub status: String,
    pub time: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRow {
    pub instance: String,
    pub trucks: usize,
    pub drones: usize,
    pub cells: Vec<ResultCell>,
}

/// `value / scale` printed with two decimals, rounding half away from zero.
pub fn format_fixed(value: i64, scale: i64) -> String {
    let num = value as i128 * 100;
    let den = scale.max(1) as i128;
    let q = (num.abs() * 2 + den) / (den * 2);
    let sign = if num < 0 && q != 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", q / 100, q % 100)
}

fn status_cell(s: Status) -> String {
    match s {
        Status::Optimal => OPTIMAL_MARK.to_string(),
        other => other.to_string(),
    }
}

fn header(models: &[ModelKind]) -> Vec<String> {
    let mut h = vec!["instance".to_string(), "trucks".to_string(), "drones".to_string()];
    for m in models {
        for col in ["lb", "ub", "status", "time"] {
            h.push(format!("{}_{col}", m.name()));
        }
    }
    h
}

/// CSV with a column group per model in `models`. Models missing from a row
/// are printed as dashes.
pub fn emit_results_table(models: &[ModelKind], rows: &[ResultRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header(models)).expect("in-memory write");
    let opt = |v: Option<i64>, scale| v.map_or_else(|| ABSENT.to_string(), |v| format_fixed(v, scale));
    for row in rows {
        let mut rec = vec![row.instance.clone(), row.trucks.to_string(), row.drones.to_string()];
        for m in models {
            match row.entries.iter().find(|e| e.model == *m) {
                Some(e) => rec.extend([
                    opt(e.lower_bound, row.scale),
                    opt(e.upper_bound, row.scale),
                    status_cell(e.status),
                    format!("{:.2}", e.time.as_secs_f64()),
                ]),
                None => rec.extend(std::iter::repeat(ABSENT.to_string()).take(4)),
            }
        }
        w.write_record(rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn hundredths(line: usize, field: &str, s: &str) -> Result<Option<i64>, ParseError> {
    if s == ABSENT {
        return Ok(None);
    }
    let bad = || ParseError::new(line, field, format!("{s:?} is not a two-decimal value"));
    let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
    let (whole, frac) = body.split_once('.').ok_or_else(bad)?;
    if frac.len() != 2 || whole.is_empty() || !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let v = whole.parse::<i64>().map_err(|_| bad())?.checked_mul(100).ok_or_else(bad)? + frac.parse::<i64>().map_err(|_| bad())?;
    Ok(Some(if neg { -v } else { v }))
}

/// Reads a table written by [`emit_results_table`].
pub fn parse_results_table(text: &str) -> Result<Vec<ParsedRow>, ParseError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let head = r.headers().map_err(|e| ParseError::new(1, "header", e.to_string()))?.clone();
    if head.len() < 3 || (head.len() - 3) % 4 != 0 || &head[0] != "instance" {
        return Err(ParseError::new(1, "header", "unexpected column layout"));
    }
    let models: Vec<String> = (3..head.len())
        .step_by(4)
        .map(|k| head[k].strip_suffix("_lb").unwrap_or(&head[k]).to_string())
        .collect();
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| ParseError::new(line, "record", e.to_string()))?;
        let count = |f: &str, s: &str| s.parse::<usize>().map_err(|_| ParseError::new(line, f, format!("{s:?} is not a count")));
        let mut cells = Vec::new();
        for (m, name) in models.iter().enumerate() {
            let base = 3 + 4 * m;
            cells.push(ResultCell {
                model: name.clone(),
                lower_bound: hundredths(line, &head[base], &rec[base])?,
                upper_bound: hundredths(line, &head[base + 1], &rec[base + 1])?,
                status: rec[base + 2].to_string(),
                time: rec[base + 3].to_string(),
            });
        }
        out.push(ParsedRow {
            instance: rec[0].to_string(),
            trucks: count("trucks", &rec[1])?,
            drones: count("drones", &rec[2])?,
            cells,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(model: ModelKind, status: Status, lb: Option<i64>, ub: Option<i64>) -> ResultEntry {
        ResultEntry {
            model,
            status,
            lower_bound: lb,
            upper_bound: ub,
            time: Duration::from_secs(10),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(emit_results_table(&[], &[]), "instance,trucks,drones\n");
        assert_eq!(
            emit_results_table(&[ModelKind::Mt3Idx], &[]),
            "instance,trucks,drones,mt-3idx_lb,mt-3idx_ub,mt-3idx_status,mt-3idx_time\n"
        );
    }

    #[test]
    fn dashes_and_asterisks() {
        let rows = [ResultRow {
            instance: "a".into(),
            trucks: 2,
            drones: 1,
            scale: 100,
            entries: vec![
                entry(ModelKind::Mt3Idx, Status::Optimal, Some(600), Some(600)),
                entry(ModelKind::Mt2Idx, Status::Unknown, Some(123), None),
            ],
        }];
        let text = emit_results_table(&[ModelKind::Mt3Idx, ModelKind::Mt2Idx], &rows);
        assert_eq!(text.lines().nth(1), Some("a,2,1,6.00,6.00,*,10.00,1.23,-,unknown,10.00"));
        let back = parse_results_table(&text).unwrap();
        assert_eq!(back[0].cells[0].lower_bound, Some(600));
        assert_eq!(back[0].cells[1].upper_bound, None);
        assert_eq!(back[0].cells[1].model, "mt-2idx");
    }

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(format_fixed(299500, 100), "2995.00");
        assert_eq!(format_fixed(5, 1), "5.00");
        assert_eq!(format_fixed(1, 1000), "0.00");
        assert_eq!(format_fixed(5, 1000), "0.01");
        assert_eq!(format_fixed(-250, 100), "-2.50");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_results_table("instance,trucks,drones,x_lb\n").is_err());
        let e = parse_results_table("instance,trucks,drones,m_lb,m_ub,m_status,m_time\na,1,1,1.5,-,*,1.00\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
