//! Line-oriented canonical instance format.
//!
//! ```text
//! 2EVRP E-n22-k4-s6-17
//! FLEET 3 15000 0 1 4 6000 0
//! DIST euclid 1 1
//! DEPOT 145 215
//! SATELLITES 2
//! 151 264 0 0 inf inf
//! 159 261 0 0 inf inf
//! CUSTOMERS 1
//! 130 254 1100
//! ```
//!
//! `FLEET` lists `v1 Q1 f1 mult1 v2 Q2 f2`; satellite rows are
//! `x y h f k vmax`. `inf` marks an unbounded count or capacity. Optional
//! lines: `OBJSCALE s`, `CFLIMIT per-satellite` and `NOTE text`. Blank lines
//! and `#` comments are ignored.

use std::fmt::Write as _;

use super::parse::{tokens_of, Token};
use super::{
    Customer, DistanceConvention, DistanceKind, Fleet, InstanceData, Limit, Point, Satellite,
    Variant,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn write_canonical<T: Scalar>(inst: &InstanceData<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.variant, inst.name);
    let f = &inst.fleet;
    let _ = writeln!(
        out,
        "FLEET {} {} {} {} {} {} {}",
        f.level1_count,
        f.level1_capacity,
        f.level1_fixed_cost,
        f.level1_dist_multiplier,
        f.level2_count,
        f.level2_capacity,
        f.level2_fixed_cost
    );
    let kind = match inst.distance.kind {
        DistanceKind::EuclideanExact => "euclid",
        DistanceKind::CeilScaled => "ceil",
    };
    let _ = writeln!(
        out,
        "DIST {kind} {} {}",
        inst.distance.scale, inst.distance.level1_factor
    );
    if inst.objective_scale != T::one() {
        let _ = writeln!(out, "OBJSCALE {}", inst.objective_scale);
    }
    if inst.per_satellite_cf_limit_active {
        out.push_str("CFLIMIT per-satellite\n");
    }
    for note in &inst.notes {
        let _ = writeln!(out, "NOTE {}", note.replace(['\n', '\r'], " "));
    }
    let _ = writeln!(out, "DEPOT {} {}", inst.depot.x, inst.depot.y);
    let _ = writeln!(out, "SATELLITES {}", inst.satellites.len());
    for s in &inst.satellites {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            s.coord.x, s.coord.y, s.handling_cost, s.opening_cost, s.capacity, s.max_city_freighters
        );
    }
    let _ = writeln!(out, "CUSTOMERS {}", inst.customers.len());
    for c in &inst.customers {
        let _ = writeln!(out, "{} {} {}", c.coord.x, c.coord.y, c.demand);
    }
    out
}

fn limit(t: &Token<'_>, what: &str) -> Result<Limit> {
    if t.text.eq_ignore_ascii_case("inf") {
        Ok(Limit::Unbounded)
    } else {
        t.count(what).map(Limit::Finite)
    }
}

fn expect_len(toks: &[Token<'_>], n: usize, line: usize, what: &str) -> Result<()> {
    if toks.len() != n {
        return Err(Error::malformed(
            line,
            1,
            format!("{what} takes {} fields, found {}", n - 1, toks.len().saturating_sub(1)),
        ));
    }
    Ok(())
}

pub(super) fn parse<T: Scalar>(content: &str) -> Result<InstanceData<T>> {
    let mut lines = content.lines().enumerate().filter_map(|(i, raw)| {
        let l = raw.split('#').next().unwrap_or("").trim_end();
        (!l.trim().is_empty()).then_some((i + 1, l))
    });

    let (hline, header) = lines.next().ok_or_else(|| Error::DialectMismatch {
        dialect: "canonical".into(),
        reason: "empty input".into(),
    })?;
    let header = header.trim_start();
    let (tag, name) = header.split_once(char::is_whitespace).unwrap_or((header, ""));
    let variant = match tag {
        "2EVRP" => Variant::TwoEVrp,
        "2ELRPSD" => Variant::TwoELrpSd,
        _ => {
            return Err(Error::DialectMismatch {
                dialect: "canonical".into(),
                reason: format!("line {hline}: header must start with 2EVRP or 2ELRPSD"),
            })
        }
    };

    let mut fleet = None;
    let mut distance = None;
    let mut depot = None;
    let mut objective_scale = T::one();
    let mut cf_flag = false;
    let mut notes = Vec::new();
    let mut satellites: Option<Vec<Satellite<T>>> = None;
    let mut customers: Option<Vec<Customer<T>>> = None;

    while let Some((ln, line)) = lines.next() {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix("NOTE") {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                notes.push(rest.trim().to_owned());
                continue;
            }
        }
        let toks = tokens_of(line, ln);
        match toks[0].text {
            "FLEET" => {
                expect_len(&toks, 8, ln, "FLEET")?;
                fleet = Some(Fleet {
                    level1_count: limit(&toks[1], "v1")?,
                    level1_capacity: toks[2].count("Q1")?,
                    level1_fixed_cost: toks[3].parse("f1")?,
                    level1_dist_multiplier: toks[4].parse("mult1")?,
                    level2_count: limit(&toks[5], "v2")?,
                    level2_capacity: toks[6].count("Q2")?,
                    level2_fixed_cost: toks[7].parse("f2")?,
                });
            }
            "DIST" => {
                expect_len(&toks, 4, ln, "DIST")?;
                let kind = match toks[1].text {
                    "euclid" => DistanceKind::EuclideanExact,
                    "ceil" => DistanceKind::CeilScaled,
                    other => {
                        return Err(Error::malformed(
                            ln,
                            toks[1].column,
                            format!("unknown distance kind `{other}`"),
                        ))
                    }
                };
                distance = Some(DistanceConvention {
                    kind,
                    scale: toks[2].parse("scale")?,
                    level1_factor: toks[3].parse("level-1 factor")?,
                });
            }
            "OBJSCALE" => {
                expect_len(&toks, 2, ln, "OBJSCALE")?;
                objective_scale = toks[1].parse("objective scale")?;
            }
            "CFLIMIT" => {
                expect_len(&toks, 2, ln, "CFLIMIT")?;
                cf_flag = match toks[1].text {
                    "per-satellite" => true,
                    "total" => false,
                    other => {
                        return Err(Error::malformed(
                            ln,
                            toks[1].column,
                            format!("unknown freighter limit mode `{other}`"),
                        ))
                    }
                };
            }
            "DEPOT" => {
                expect_len(&toks, 3, ln, "DEPOT")?;
                depot = Some(Point::new(toks[1].parse("x")?, toks[2].parse("y")?));
            }
            "SATELLITES" => {
                expect_len(&toks, 2, ln, "SATELLITES")?;
                let n = toks[1].count("satellite count")? as usize;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let (sl, row) = lines
                        .next()
                        .ok_or_else(|| Error::malformed(ln, 1, format!("expected {n} satellite rows")))?;
                    let t = tokens_of(row, sl);
                    if t.len() != 6 {
                        return Err(Error::malformed(sl, 1, "satellite row is `x y h f k vmax`"));
                    }
                    v.push(Satellite {
                        coord: Point::new(t[0].parse("x")?, t[1].parse("y")?),
                        handling_cost: t[2].parse("handling cost")?,
                        opening_cost: t[3].parse("opening cost")?,
                        capacity: limit(&t[4], "capacity")?,
                        max_city_freighters: limit(&t[5], "freighter limit")?,
                    });
                }
                satellites = Some(v);
            }
            "CUSTOMERS" => {
                expect_len(&toks, 2, ln, "CUSTOMERS")?;
                let m = toks[1].count("customer count")? as usize;
                let mut v = Vec::with_capacity(m);
                for _ in 0..m {
                    let (cl, row) = lines
                        .next()
                        .ok_or_else(|| Error::malformed(ln, 1, format!("expected {m} customer rows")))?;
                    let t = tokens_of(row, cl);
                    if t.len() != 3 {
                        return Err(Error::malformed(cl, 1, "customer row is `x y d`"));
                    }
                    v.push(Customer {
                        coord: Point::new(t[0].parse("x")?, t[1].parse("y")?),
                        demand: t[2].count("demand")?,
                    });
                }
                customers = Some(v);
            }
            other => {
                return Err(Error::malformed(
                    ln,
                    toks[0].column,
                    format!("unknown keyword `{other}`"),
                ))
            }
        }
    }

    let missing = |what: &str| Error::DialectMismatch {
        dialect: "canonical".into(),
        reason: format!("missing {what} line"),
    };
    let satellites = satellites.ok_or_else(|| missing("SATELLITES"))?;
    let cf_flag = cf_flag
        || satellites
            .iter()
            .any(|s| s.max_city_freighters != Limit::Unbounded);
    Ok(InstanceData {
        name: name.trim().to_owned(),
        variant,
        depot: depot.ok_or_else(|| missing("DEPOT"))?,
        satellites,
        customers: customers.ok_or_else(|| missing("CUSTOMERS"))?,
        fleet: fleet.ok_or_else(|| missing("FLEET"))?,
        distance: distance.ok_or_else(|| missing("DIST"))?,
        per_satellite_cf_limit_active: cf_flag,
        objective_scale,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, Dialect, Instance};

    #[test]
    fn degenerate_file() {
        let text = "\
2EVRP zero
FLEET 1 10 0 1 1 10 0
DIST euclid 1 1
DEPOT 0 0
SATELLITES 1
0 0 0 0 inf inf  # a comment
CUSTOMERS 1
0 0 1
";
        let inst: Instance<f64> = parse_instance(text, Dialect::Canonical).unwrap();
        assert_eq!(inst.name, "zero");
        assert_eq!(inst.n_satellites(), 1);
        assert_eq!(inst.n_customers(), 1);
        assert_eq!(inst.distance(1, 2, 2).unwrap(), 0.0);
        assert_eq!(inst.distance(0, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_with_extensions() {
        let text = "\
2ELRPSD some name
FLEET inf 5000 100 1 inf 70 50
DIST ceil 100 2
OBJSCALE 100
CFLIMIT per-satellite
NOTE first note
DEPOT 0.1 0.30000000000000004
SATELLITES 2
1 2 0.5 1200 500 inf
3 4 0 900 inf 3
CUSTOMERS 2
5 6 7
-1e-3 8 0
";
        let a: Instance<f64> = parse_instance(text, Dialect::Canonical).unwrap();
        assert_eq!(a.name, "some name");
        assert_eq!(a.notes, vec!["first note".to_owned()]);
        let written = write_canonical(a.data());
        let b: Instance<f64> = parse_instance(&written, Dialect::Canonical).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.depot.y, 0.30000000000000004);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_instance::<f64>("VRP x\n", Dialect::Canonical),
            Err(Error::DialectMismatch { .. })
        ));
        let bad = "2EVRP a\nFLEET 1 10 0 1 1 10\n";
        assert!(matches!(
            parse_instance::<f64>(bad, Dialect::Canonical),
            Err(Error::Malformed { line: 2, .. })
        ));
        let missing = "2EVRP a\nFLEET 1 10 0 1 1 10 0\n";
        assert!(matches!(
            parse_instance::<f64>(missing, Dialect::Canonical),
            Err(Error::DialectMismatch { .. })
        ));
    }
}
