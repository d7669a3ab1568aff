//! Line-oriented native instance format.
//!
//! ```text
//! PDSVRP-INSTANCE 1
//! NAME tiny
//! VARIANT MIN_TIME
//! SCALE 100
//! CUSTOMERS 1
//! TRUCKS 1
//! DRONES 1
//! ELIGIBLE 1
//! TRUCK_TIME
//! 0 500
//! 500 0
//! DRONE_TIME 600
//! END
//! ```
//!
//! Min-cost documents add `TRUCK_COST` (a matrix), `DRONE_COST` (aligned with
//! `ELIGIBLE`), `WEIGHT` (customers 1..n), `TRUCK_CAPACITY`, `TRUCK_TIME_LIMIT`
//! and `DRONE_TIME_LIMIT` after `DRONE_TIME`. Any number of
//! `PROVENANCE key value` lines may precede `END`. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::ParseError;
use crate::model::{Instance, InstanceError, InstanceMeta, InstanceParts, Matrix, MinCostParts, Variant};

pub const INSTANCE_HEADER: &str = "PDSVRP-INSTANCE";
pub const FORMAT_VERSION: u32 = 1;

pub(crate) struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self {
            inner: it.peekable(),
            last: 0,
        }
    }

    pub(crate) fn next_line(&mut self, field: &str) -> Result<(usize, &'a str), ParseError> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(ParseError::new(self.last + 1, field, "unexpected end of document")),
        }
    }

    pub(crate) fn peek_keyword(&mut self) -> Option<&'a str> {
        self.inner.peek().map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }

    /// Next line, which must start with `keyword`; returns the rest.
    pub(crate) fn keyword(&mut self, keyword: &str) -> Result<(usize, &'a str), ParseError> {
        let (n, l) = self.next_line(keyword)?;
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        if head != keyword {
            return Err(ParseError::new(n, keyword, format!("expected {keyword}, found {head:?}")));
        }
        Ok((n, rest.trim()))
    }

    pub(crate) fn end(&mut self) -> Result<(), ParseError> {
        let (n, rest) = self.keyword("END")?;
        if !rest.is_empty() {
            return Err(ParseError::new(n, "END", "unexpected text after END"));
        }
        if let Some((n, _)) = self.inner.next() {
            return Err(ParseError::new(n, "END", "content after END"));
        }
        Ok(())
    }
}

pub(crate) fn int_list(line: usize, field: &str, text: &str) -> Result<Vec<i64>, ParseError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| ParseError::new(line, field, format!("{t:?} is not an integer")))
        })
        .collect()
}

fn non_negative(line: usize, field: &str, values: &[i64]) -> Result<(), ParseError> {
    match values.iter().position(|&v| v < 0) {
        Some(k) => Err(ParseError::new(line, field, format!("negative value {} at position {}", values[k], k + 1))),
        None => Ok(()),
    }
}

fn scalar(lines: &mut Lines, field: &str) -> Result<(usize, i64), ParseError> {
    let (n, rest) = lines.keyword(field)?;
    let v = int_list(n, field, rest)?;
    if v.len() != 1 {
        return Err(ParseError::new(n, field, format!("expected one value, found {}", v.len())));
    }
    non_negative(n, field, &v)?;
    Ok((n, v[0]))
}

fn count(lines: &mut Lines, field: &str) -> Result<(usize, usize), ParseError> {
    let (n, v) = scalar(lines, field)?;
    usize::try_from(v).map(|v| (n, v)).map_err(|_| ParseError::new(n, field, "value out of range"))
}

fn aligned(lines: &mut Lines, field: &str, len: usize) -> Result<Vec<i64>, ParseError> {
    let (n, rest) = lines.keyword(field)?;
    let v = int_list(n, field, rest)?;
    if v.len() != len {
        return Err(ParseError::new(n, field, format!("expected {len} values, found {}", v.len())));
    }
    non_negative(n, field, &v)?;
    Ok(v)
}

fn matrix(lines: &mut Lines, field: &str, size: usize) -> Result<(usize, Matrix), ParseError> {
    let (start, rest) = lines.keyword(field)?;
    if !rest.is_empty() {
        return Err(ParseError::new(start, field, "matrix rows start on the next line"));
    }
    let mut rows = Vec::new();
    for r in 0..size {
        let (n, l) = lines.next_line(field)?;
        let row = int_list(n, field, l)?;
        if row.len() != size {
            return Err(ParseError::new(n, field, format!("row {r} has {} values, expected {size}", row.len())));
        }
        non_negative(n, field, &row)?;
        if row[r] != 0 {
            return Err(ParseError::new(n, field, format!("diagonal entry of row {r} must be zero")));
        }
        rows.push(row);
    }
    let m = Matrix::from_rows(rows).map_err(|e| ParseError::new(start, field, e.to_string()))?;
    Ok((start, m))
}

/// Parses a native instance document.
pub fn parse_native(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    let (n, version) = lines.keyword(INSTANCE_HEADER)?;
    if version != FORMAT_VERSION.to_string() {
        return Err(ParseError::new(n, "version", format!("unsupported format version {version:?}")));
    }
    let (_, name) = lines.keyword("NAME")?;
    let (vline, variant) = lines.keyword("VARIANT")?;
    let variant = match variant {
        "MIN_TIME" => Variant::MinTime,
        "MIN_COST" => Variant::MinCost,
        other => return Err(ParseError::new(vline, "VARIANT", format!("unknown variant {other:?}"))),
    };
    let (sline, scale) = scalar(&mut lines, "SCALE")?;
    if scale == 0 {
        return Err(ParseError::new(sline, "SCALE", "scale must be positive"));
    }
    let (cline, customers) = count(&mut lines, "CUSTOMERS")?;
    if customers == 0 {
        return Err(ParseError::new(cline, "CUSTOMERS", "at least one customer is required"));
    }
    let (tline, trucks) = count(&mut lines, "TRUCKS")?;
    if trucks == 0 {
        return Err(ParseError::new(tline, "TRUCKS", "at least one truck is required"));
    }
    let (_, drones) = count(&mut lines, "DRONES")?;

    let (eline, rest) = lines.keyword("ELIGIBLE")?;
    let eligible = int_list(eline, "ELIGIBLE", rest)?;
    for (k, &c) in eligible.iter().enumerate() {
        if c < 1 || c as u64 > customers as u64 {
            return Err(ParseError::new(eline, "ELIGIBLE", format!("{c} is not a customer")));
        }
        if k > 0 && eligible[k - 1] >= c {
            return Err(ParseError::new(eline, "ELIGIBLE", "customers must be strictly increasing"));
        }
    }
    let eligible: Vec<usize> = eligible.into_iter().map(|c| c as usize).collect();

    let nodes = customers.checked_add(1).ok_or_else(|| ParseError::new(cline, "CUSTOMERS", "value out of range"))?;
    let (_, truck_time) = matrix(&mut lines, "TRUCK_TIME", nodes)?;
    let drone_time: BTreeMap<usize, i64> = eligible.iter().copied().zip(aligned(&mut lines, "DRONE_TIME", eligible.len())?).collect();

    let min_cost = match variant {
        Variant::MinTime => None,
        Variant::MinCost => {
            let (_, truck_cost) = matrix(&mut lines, "TRUCK_COST", nodes)?;
            let drone_cost = eligible.iter().copied().zip(aligned(&mut lines, "DRONE_COST", eligible.len())?).collect();
            let mut weight = vec![0];
            weight.extend(aligned(&mut lines, "WEIGHT", customers)?);
            Some(MinCostParts {
                truck_cost,
                drone_cost,
                weight,
                truck_capacity: scalar(&mut lines, "TRUCK_CAPACITY")?.1,
                truck_time_limit: scalar(&mut lines, "TRUCK_TIME_LIMIT")?.1,
                drone_time_limit: scalar(&mut lines, "DRONE_TIME_LIMIT")?.1,
            })
        }
    };

    let mut provenance = Vec::new();
    while lines.peek_keyword() == Some("PROVENANCE") {
        let (n, rest) = lines.keyword("PROVENANCE")?;
        let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        if key.is_empty() {
            return Err(ParseError::new(n, "PROVENANCE", "missing key"));
        }
        provenance.push((key.to_string(), value.trim().to_string()));
    }
    lines.end()?;

    Instance::new(InstanceParts {
        meta: InstanceMeta {
            name: name.to_string(),
            scale,
            provenance,
        },
        truck_count: trucks,
        drone_count: drones,
        truck_time,
        drone_time,
        min_cost,
    })
    .map_err(|e: InstanceError| ParseError::new(cline, "instance", e.to_string()))
}

fn write_matrix(out: &mut String, field: &str, m: &Matrix) {
    let _ = writeln!(out, "{field}");
    for i in 0..m.size() {
        out.push_str(&join(m.row(i).iter()));
        out.push('\n');
    }
}

fn join<T: ToString>(values: impl Iterator<Item = T>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn keyed(field: &str, values: String) -> String {
    if values.is_empty() {
        format!("{field}\n")
    } else {
        format!("{field} {values}\n")
    }
}

/// Canonical text form. Names and provenance keys are expected to be single
/// tokens and provenance values single lines.
pub fn serialize_native(instance: &Instance) -> String {
    let mut out = String::new();
    let variant = match instance.variant() {
        Variant::MinTime => "MIN_TIME",
        Variant::MinCost => "MIN_COST",
    };
    let _ = writeln!(out, "{INSTANCE_HEADER} {FORMAT_VERSION}");
    out.push_str(&keyed("NAME", instance.name().to_string()));
    let _ = writeln!(out, "VARIANT {variant}");
    let _ = writeln!(out, "SCALE {}", instance.scale());
    let _ = writeln!(out, "CUSTOMERS {}", instance.customers());
    let _ = writeln!(out, "TRUCKS {}", instance.truck_count());
    let _ = writeln!(out, "DRONES {}", instance.drone_count());
    let eligible = instance.eligible();
    out.push_str(&keyed("ELIGIBLE", join(eligible.iter())));
    write_matrix(&mut out, "TRUCK_TIME", instance.truck_times());
    out.push_str(&keyed("DRONE_TIME", join(eligible.iter().map(|&c| instance.drone_time(c).unwrap_or(0)))));
    if let Some(mc) = instance.min_cost() {
        write_matrix(&mut out, "TRUCK_COST", mc.truck_cost());
        out.push_str(&keyed("DRONE_COST", join(eligible.iter().map(|&c| mc.drone_cost(c).unwrap_or(0)))));
        out.push_str(&keyed("WEIGHT", join((1..=instance.customers()).map(|c| mc.weight(c)))));
        let _ = writeln!(out, "TRUCK_CAPACITY {}", mc.truck_capacity());
        let _ = writeln!(out, "TRUCK_TIME_LIMIT {}", mc.truck_time_limit());
        let _ = writeln!(out, "DRONE_TIME_LIMIT {}", mc.drone_time_limit());
    }
    for (k, v) in &instance.meta().provenance {
        out.push_str(&keyed("PROVENANCE", format!("{k} {v}").trim_end().to_string()));
    }
    out.push_str("END\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "PDSVRP-INSTANCE 1\nNAME tiny\nVARIANT MIN_TIME\nSCALE 100\nCUSTOMERS 1\nTRUCKS 1\nDRONES 1\nELIGIBLE 1\nTRUCK_TIME\n0 500\n500 0\nDRONE_TIME 600\nEND\n";

    #[test]
    fn minimal_document() {
        let i = parse_native(TINY).unwrap();
        assert_eq!(i.customers(), 1);
        assert_eq!(i.drone_time(1), Some(600));
        assert_eq!(serialize_native(&i), TINY);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = TINY.replace("NAME tiny\n", "\n# note\nNAME tiny\n\n");
        assert_eq!(parse_native(&text).unwrap(), parse_native(TINY).unwrap());
    }

    #[test]
    fn min_cost_without_weight() {
        let text = TINY
            .replace("MIN_TIME", "MIN_COST")
            .replace("END\n", "TRUCK_COST\n0 1\n1 0\nDRONE_COST 2\nTRUCK_CAPACITY 5\nTRUCK_TIME_LIMIT 9\nDRONE_TIME_LIMIT 9\nEND\n");
        let e = parse_native(&text).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (17, "WEIGHT"));
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_native(&TINY.replace("0 500\n", "0 500 3\n")).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (10, "TRUCK_TIME"));
        let e = parse_native(&TINY.replace("DRONE_TIME 600", "DRONE_TIME -6")).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (12, "DRONE_TIME"));
        let e = parse_native(&TINY.replace("INSTANCE 1", "INSTANCE 2")).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (1, "version"));
        let e = parse_native("PDSVRP-INSTANCE 1\nNAME x\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn empty_eligible_and_provenance() {
        let text = TINY
            .replace("ELIGIBLE 1", "ELIGIBLE")
            .replace("DRONE_TIME 600", "DRONE_TIME")
            .replace("END", "PROVENANCE source some file.tsp\nPROVENANCE seed 3\nEND");
        let i = parse_native(&text).unwrap();
        assert!(i.eligible().is_empty());
        assert_eq!(i.meta().provenance[0], ("source".into(), "some file.tsp".into()));
        assert_eq!(serialize_native(&i), text);
    }
}
