//! Solution files: one `TRUCK` line per truck with its closed tour, then one
//! `DRONE` line per drone listing the customers it serves.
//!
//! ```text
//! PDSVRP-SOLUTION 1
//! TRUCK 0 2 3 0
//! TRUCK
//! DRONE 1
//! END
//! ```

use super::native::{int_list, Lines};
use super::ParseError;
use crate::model::Solution;

pub const SOLUTION_HEADER: &str = "PDSVRP-SOLUTION";

fn nodes(line: usize, field: &str, text: &str) -> Result<Vec<usize>, ParseError> {
    int_list(line, field, text)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| ParseError::new(line, field, format!("invalid node {v}"))))
        .collect()
}

/// Parses a solution document. Only the syntax is checked here; whether the
/// tours make sense for an instance is the validator's job.
pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    let mut lines = Lines::new(text);
    let (n, version) = lines.keyword(SOLUTION_HEADER)?;
    if version != "1" {
        return Err(ParseError::new(n, "version", format!("unsupported format version {version:?}")));
    }
    let mut tours = Vec::new();
    while lines.peek_keyword() == Some("TRUCK") {
        let (n, rest) = lines.keyword("TRUCK")?;
        tours.push(nodes(n, "TRUCK", rest)?);
    }
    let mut missions = Vec::new();
    while lines.peek_keyword() == Some("DRONE") {
        let (n, rest) = lines.keyword("DRONE")?;
        missions.push(nodes(n, "DRONE", rest)?);
    }
    lines.end()?;
    Ok(Solution::new(tours, missions))
}

pub fn serialize_solution(solution: &Solution) -> String {
    let mut out = format!("{SOLUTION_HEADER} 1\n");
    let line = |key: &str, v: &[usize]| {
        let mut s = String::from(key);
        for x in v {
            s.push(' ');
            s.push_str(&x.to_string());
        }
        s.push('\n');
        s
    };
    for t in &solution.truck_tours {
        out.push_str(&line("TRUCK", t));
    }
    for m in &solution.drone_missions {
        out.push_str(&line("DRONE", m));
    }
    out.push_str("END\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_idle_vehicles() {
        let s = Solution::new(vec![vec![0, 2, 3, 0], vec![]], vec![vec![], vec![1, 4]]);
        let text = serialize_solution(&s);
        assert_eq!(text, "PDSVRP-SOLUTION 1\nTRUCK 0 2 3 0\nTRUCK\nDRONE\nDRONE 1 4\nEND\n");
        assert_eq!(parse_solution(&text).unwrap(), s);
    }

    #[test]
    fn truncated_file() {
        let e = parse_solution("PDSVRP-SOLUTION 1\nTRUCK 0 1 0\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "END"));
        let e = parse_solution("PDSVRP-SOLUTION 1\nTRUCK 0 x 0\nEND\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn trucks_before_drones() {
        assert!(parse_solution("PDSVRP-SOLUTION 1\nDRONE 1\nTRUCK 0 2 0\nEND\n").is_err());
    }
}
