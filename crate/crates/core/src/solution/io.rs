//! Plain-text solution files.
//!
//! ```text
//! SOLUTION E-n22-k4-s6-17 417.07
//! L1 0 : 1 2 | 1:400 2:100
//! L2 1 : 5 6 7
//! L2 2 : 8 4
//! OPEN 1 2
//! ```
//!
//! Node ids are global (depot 0, satellites from 1, then customers).

use std::fmt::Write as _;

use super::{evaluate, Route, Solution};
use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, DEPOT};
use crate::scalar::Scalar;

pub fn write_solution<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "SOLUTION {} {}", sol.instance_name, evaluate(inst, sol));
    for r in &sol.level1_routes {
        let visits: Vec<String> = r.visits.iter().map(|v| v.to_string()).collect();
        let q: Vec<String> = r
            .visits
            .iter()
            .zip(&r.deliveries)
            .map(|(s, q)| format!("{s}:{q}"))
            .collect();
        let _ = writeln!(out, "L1 {} : {} | {}", r.home, visits.join(" "), q.join(" "));
    }
    for r in &sol.level2_routes {
        let visits: Vec<String> = r.visits.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "L2 {} : {}", r.home, visits.join(" "));
    }
    let open: Vec<String> = sol.open_satellite_nodes().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "OPEN {}", open.join(" "));
    out
}

fn node(tok: &str, ln: usize) -> Result<NodeId> {
    tok.parse()
        .map_err(|_| Error::SolutionFormat(format!("line {ln}: bad node id `{tok}`")))
}

/// Parses a solution file; returns the solution and the cost stated in the
/// header, if any. Node ids are range-checked but feasibility is not.
pub fn parse_solution<T: Scalar>(inst: &Instance<T>, text: &str) -> Result<(Solution<T>, Option<T>)> {
    let mut sol = Solution::empty(inst);
    let mut stated = None;
    let mut header = false;
    let mut open_line = false;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match tag {
            "SOLUTION" => {
                let mut toks: Vec<&str> = rest.split_whitespace().collect();
                if let Some(last) = toks.last() {
                    if let Ok(c) = last.parse::<T>() {
                        stated = Some(c);
                        toks.pop();
                    }
                }
                sol.instance_name = toks.join(" ");
                header = true;
            }
            "L1" | "L2" => {
                let (head, body) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::SolutionFormat(format!("line {ln}: expected `home : visits`")))?;
                let home = node(head.trim(), ln)?;
                let (visits_txt, q_txt) = match body.split_once('|') {
                    Some((v, q)) => (v, Some(q)),
                    None => (body, None),
                };
                let visits = visits_txt
                    .split_whitespace()
                    .map(|t| node(t, ln))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(&bad) = visits.iter().chain([&home]).find(|&&v| v >= inst.n_nodes()) {
                    return Err(Error::SolutionFormat(format!("line {ln}: node {bad} out of range")));
                }
                if tag == "L2" {
                    if q_txt.is_some() {
                        return Err(Error::SolutionFormat(format!(
                            "line {ln}: level-2 routes carry no delivery list"
                        )));
                    }
                    sol.level2_routes.push(Route::level2(inst, home, visits));
                } else {
                    if home != DEPOT {
                        return Err(Error::SolutionFormat(format!(
                            "line {ln}: level-1 routes start at the depot (0)"
                        )));
                    }
                    let mut deliveries = vec![0u64; visits.len()];
                    for pair in q_txt.unwrap_or("").split_whitespace() {
                        let (s, q) = pair.split_once(':').ok_or_else(|| {
                            Error::SolutionFormat(format!("line {ln}: delivery `{pair}` is not s:qty"))
                        })?;
                        let s = node(s, ln)?;
                        let q: u64 = q.parse().map_err(|_| {
                            Error::SolutionFormat(format!("line {ln}: bad quantity in `{pair}`"))
                        })?;
                        let k = visits.iter().position(|&v| v == s).ok_or_else(|| {
                            Error::SolutionFormat(format!(
                                "line {ln}: delivery to {s}, which the route does not visit"
                            ))
                        })?;
                        deliveries[k] += q;
                    }
                    sol.level1_routes.push(Route::level1(visits, deliveries));
                }
            }
            "OPEN" => {
                sol.open_satellites = vec![false; inst.n_satellites()];
                for t in rest.split_whitespace() {
                    let s = node(t, ln)?;
                    if !inst.is_satellite(s) {
                        return Err(Error::SolutionFormat(format!("line {ln}: {s} is not a satellite")));
                    }
                    sol.open_satellites[s - 1] = true;
                }
                open_line = true;
            }
            other => {
                return Err(Error::SolutionFormat(format!("line {ln}: unknown record `{other}`")));
            }
        }
    }
    if !header {
        return Err(Error::SolutionFormat("missing SOLUTION header".into()));
    }
    if !open_line {
        sol.open_satellites = (1..=inst.n_satellites()).map(|s| sol.is_used(s)).collect();
    }
    Ok((sol, stated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, Dialect};
    use crate::solution::check_feasibility;

    const INST: &str = "\
2EVRP io
FLEET 2 100 0 1 3 50 0
DIST euclid 1 1
DEPOT 0 0
SATELLITES 2
3 4 0 0 inf inf
6 8 0 0 inf inf
CUSTOMERS 3
3 5 10
6 9 20
7 8 30
";

    #[test]
    fn round_trip() {
        let inst: Instance<f64> = parse_instance(INST, Dialect::Canonical).unwrap();
        let text = "SOLUTION io 0\nL1 0 : 1 2 | 1:10 2:50\nL2 1 : 3\nL2 2 : 4 5\nOPEN 1 2\n";
        let (sol, stated) = parse_solution(&inst, text).unwrap();
        assert_eq!(stated, Some(0.0));
        assert!(check_feasibility(&inst, &sol).is_empty());
        let written = write_solution(&inst, &sol);
        let (again, cost) = parse_solution(&inst, &written).unwrap();
        assert_eq!(again.level1_routes, sol.level1_routes);
        assert_eq!(again.level2_routes, sol.level2_routes);
        assert_eq!(again.open_satellites, sol.open_satellites);
        assert_eq!(cost, Some(evaluate(&inst, &sol)));
    }

    #[test]
    fn rejects_garbage() {
        let inst: Instance<f64> = parse_instance(INST, Dialect::Canonical).unwrap();
        assert!(parse_solution(&inst, "L2 1 : 3\n").is_err());
        assert!(parse_solution(&inst, "SOLUTION io\nL2 1 : 99\n").is_err());
        assert!(parse_solution(&inst, "SOLUTION io\nL1 0 : 1 | 2:5\n").is_err());
        assert!(parse_solution(&inst, "SOLUTION io\nXX\n").is_err());
    }
}
