use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::canonical;
use super::{
    Customer, DistanceConvention, Fleet, Instance, InstanceData, Limit, Point, Satellite, Variant,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Input file layouts understood by [`parse_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    Canonical,
    OrlibSet2And3,
    OrlibSet4,
    Set5,
    Set6,
    Prodhon,
    Nguyen,
}

impl Dialect {
    pub const ALL: [Dialect; 7] = [
        Dialect::Canonical,
        Dialect::OrlibSet2And3,
        Dialect::OrlibSet4,
        Dialect::Set5,
        Dialect::Set6,
        Dialect::Prodhon,
        Dialect::Nguyen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dialect::Canonical => "canonical",
            Dialect::OrlibSet2And3 => "orlib-set2-3",
            Dialect::OrlibSet4 => "orlib-set4",
            Dialect::Set5 => "set5",
            Dialect::Set6 => "set6",
            Dialect::Prodhon => "prodhon",
            Dialect::Nguyen => "nguyen",
        }
    }

    /// Best guess from a file name and its content.
    ///
    /// Canonical files are recognised by their header. Comma-separated
    /// sectioned files are taken as OR-Library Set 2/3 (Set 5 shares the
    /// layout). Whitespace-only numeric files are Prodhon, or Nguyen when the
    /// file stem ends in `N`/`Nb` as in `25-5MN`.
    pub fn guess(file_name: &str, content: &str) -> Dialect {
        let first = content
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or("");
        if first.starts_with("2EVRP") || first.starts_with("2ELRPSD") {
            return Dialect::Canonical;
        }
        if content.contains(',') || first.starts_with('!') {
            return Dialect::OrlibSet2And3;
        }
        let stem = Path::new(file_name)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("");
        if stem.ends_with('N') || stem.ends_with("Nb") {
            Dialect::Nguyen
        } else {
            Dialect::Prodhon
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Dialect::ALL
            .into_iter()
            .find(|d| d.name() == key)
            .or(match key.as_str() {
                "orlib" | "set2" | "set3" => Some(Dialect::OrlibSet2And3),
                "set4" => Some(Dialect::OrlibSet4),
                _ => None,
            })
            .ok_or_else(|| Error::Params(format!("unknown dialect `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Instance name; benchmark files carry none, so this is usually the
    /// file stem.
    pub name: Option<String>,
    /// Swap Q¹ and Q² when a Set 2/3 file lists the larger capacity second.
    pub correct_capacity_swap: bool,
    /// Override the per-satellite freighter limit (Set 4a when on, 4b when
    /// off). `None` keeps the dialect default.
    pub per_satellite_cf: Option<bool>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            name: None,
            correct_capacity_swap: true,
            per_satellite_cf: None,
        }
    }
}

pub fn parse_instance<T: Scalar>(content: &str, dialect: Dialect) -> Result<Instance<T>> {
    parse_instance_with(content, dialect, &ParseOptions::default())
}

pub fn parse_instance_with<T: Scalar>(
    content: &str,
    dialect: Dialect,
    opts: &ParseOptions,
) -> Result<Instance<T>> {
    let mut data = match dialect {
        Dialect::Canonical => canonical::parse(content)?,
        Dialect::OrlibSet2And3 | Dialect::OrlibSet4 | Dialect::Set5 | Dialect::Set6 => {
            parse_sectioned(content, dialect, opts)?
        }
        Dialect::Prodhon | Dialect::Nguyen => parse_lrp(content, dialect)?,
    };
    if let Some(name) = &opts.name {
        if dialect != Dialect::Canonical || data.name.is_empty() {
            data.name = name.clone();
        }
    }
    if let Some(flag) = opts.per_satellite_cf {
        data.per_satellite_cf_limit_active = flag;
    }
    Instance::new(data)
}

/// Reads and parses a file; the dialect is guessed when not given and the
/// file stem becomes the instance name for non-canonical dialects.
pub fn load_instance<T: Scalar>(
    path: impl AsRef<Path>,
    dialect: Option<Dialect>,
    per_satellite_cf: Option<bool>,
) -> Result<Instance<T>> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path)?;
    let file_name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
    let dialect = dialect.unwrap_or_else(|| Dialect::guess(file_name, &content));
    let opts = ParseOptions {
        name: path.file_stem().and_then(|s| s.to_str()).map(str::to_owned),
        per_satellite_cf,
        ..ParseOptions::default()
    };
    parse_instance_with(&content, dialect, &opts)
}

#[derive(Debug, Clone, Copy)]
pub(super) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

impl<'a> Token<'a> {
    pub fn parse<V: FromStr>(&self, what: &str) -> Result<V> {
        self.text.parse().map_err(|_| {
            Error::malformed(self.line, self.column, format!("expected {what}, found `{}`", self.text))
        })
    }

    /// Non-negative integer that may be written with a trailing `.0`.
    pub fn count(&self, what: &str) -> Result<u64> {
        if let Ok(v) = self.text.parse::<u64>() {
            return Ok(v);
        }
        match self.text.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
            _ => Err(Error::malformed(
                self.line,
                self.column,
                format!("expected non-negative integer {what}, found `{}`", self.text),
            )),
        }
    }
}

/// Splits a line into tokens separated by whitespace, commas or semicolons.
pub(super) fn tokens_of(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        let sep = ch.is_whitespace() || ch == ',' || ch == ';';
        match (sep, start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    line: line_no,
                    column: s + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            line: line_no,
            column: s + 1,
        });
    }
    out
}

fn mismatch(dialect: Dialect, reason: impl Into<String>) -> Error {
    Error::DialectMismatch {
        dialect: dialect.name().into(),
        reason: reason.into(),
    }
}

/// Comma-separated sectioned layout shared by the 2E-VRP sets:
///
/// ```text
/// !Trucks: count, capacity, cost per distance
/// 2,15000,1
/// !City freighters: max per satellite, total, capacity, cost per distance
/// 3,4,6000,1
/// !Stores: depot x,y then satellites x,y (Set 6: x,y,handling cost)
/// 145,215   151,264   159,261
/// !Customers: x,y,demand
/// 151,264,1100   159,261,700 ...
/// ```
fn parse_sectioned<T: Scalar>(
    content: &str,
    dialect: Dialect,
    opts: &ParseOptions,
) -> Result<InstanceData<T>> {
    let lines: Vec<Vec<Token<'_>>> = content
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('!') && !t.starts_with('#')
        })
        .map(|(i, l)| tokens_of(l, i + 1))
        .filter(|t| !t.is_empty())
        .collect();
    if lines.len() < 4 {
        return Err(mismatch(
            dialect,
            format!("expected trucks, freighters, stores and customers sections, found {} data lines", lines.len()),
        ));
    }
    let trucks = &lines[0];
    let cfs = &lines[1];
    if trucks.len() < 3 {
        return Err(Error::malformed(trucks[0].line, 1, "truck line needs count, capacity, cost"));
    }
    if cfs.len() < 4 {
        return Err(Error::malformed(
            cfs[0].line,
            1,
            "city freighter line needs per-satellite max, count, capacity, cost",
        ));
    }
    let mut notes = Vec::new();
    let v1 = trucks[0].count("truck count")?;
    let mut q1 = trucks[1].count("truck capacity")?;
    let mult1: T = trucks[2].parse("truck cost per distance")?;
    let f1: T = match trucks.get(3) {
        Some(t) => t.parse("truck fixed cost")?,
        None => T::zero(),
    };
    let vmax = cfs[0].count("freighters per satellite")?;
    let v2 = cfs[1].count("freighter count")?;
    let mut q2 = cfs[2].count("freighter capacity")?;
    let mult2: T = cfs[3].parse("freighter cost per distance")?;
    if mult2 != T::one() {
        notes.push(format!(
            "freighter cost per distance {mult2} ignored; level-2 distance is taken at face value"
        ));
    }
    let f2: T = match cfs.get(4) {
        Some(t) => t.parse("freighter fixed cost")?,
        None => T::zero(),
    };
    if dialect == Dialect::OrlibSet2And3 && opts.correct_capacity_swap && q1 < q2 {
        notes.push(format!("swapped capacities: Q1 {q1} and Q2 {q2} were interchanged in the file"));
        std::mem::swap(&mut q1, &mut q2);
    }

    let stores = &lines[2];
    let per_sat = if dialect == Dialect::Set6 { 3 } else { 2 };
    if stores.len() < 2 + per_sat || !(stores.len() - 2).is_multiple_of(per_sat) {
        return Err(Error::malformed(
            stores[0].line,
            1,
            format!("stores line needs depot x,y and groups of {per_sat} values per satellite"),
        ));
    }
    let depot_x: T = stores[0].parse("depot x")?;
    let depot_y: T = stores[1].parse("depot y")?;
    let mut sat_raw = Vec::new();
    for chunk in stores[2..].chunks(per_sat) {
        let x: T = chunk[0].parse("satellite x")?;
        let y: T = chunk[1].parse("satellite y")?;
        let h: T = if per_sat == 3 {
            chunk[2].parse("handling cost")?
        } else {
            T::zero()
        };
        sat_raw.push((x, y, h));
    }

    let cust_tokens: Vec<Token<'_>> = lines[3..].iter().flatten().copied().collect();
    if cust_tokens.is_empty() || !cust_tokens.len().is_multiple_of(3) {
        let t = cust_tokens.last().copied().unwrap_or(stores[0]);
        return Err(Error::malformed(
            t.line,
            t.column,
            format!("customer data must be x,y,demand triplets, found {} values", cust_tokens.len()),
        ));
    }
    let mut cust_raw = Vec::new();
    for c in cust_tokens.chunks(3) {
        let x: T = c[0].parse("customer x")?;
        let y: T = c[1].parse("customer y")?;
        let d = c[2].count("customer demand")?;
        cust_raw.push((x, y, d));
    }

    let mut depot = Point::new(depot_x, depot_y);
    let mut objective_scale = T::one();
    if dialect == Dialect::OrlibSet4 {
        let all = std::iter::once((depot_x, depot_y))
            .chain(sat_raw.iter().map(|&(x, y, _)| (x, y)))
            .chain(cust_raw.iter().map(|&(x, y, _)| (x, y)));
        let (mut min_x, mut min_y) = (T::zero(), T::zero());
        for (x, y) in all {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
        }
        let hundred = T::of_u64(100);
        let tf = |x: T, m: T| ((x - m) * hundred).round();
        depot = Point::new(tf(depot_x, min_x), tf(depot_y, min_y));
        for s in &mut sat_raw {
            s.0 = tf(s.0, min_x);
            s.1 = tf(s.1, min_y);
        }
        for c in &mut cust_raw {
            c.0 = tf(c.0, min_x);
            c.1 = tf(c.1, min_y);
        }
        objective_scale = hundred;
        notes.push(format!(
            "coordinates shifted by ({}, {}) and multiplied by 100",
            -min_x, -min_y
        ));
    }

    Ok(InstanceData {
        name: String::new(),
        variant: Variant::TwoEVrp,
        depot,
        satellites: sat_raw
            .into_iter()
            .map(|(x, y, h)| Satellite {
                coord: Point::new(x, y),
                handling_cost: h,
                opening_cost: T::zero(),
                capacity: Limit::Unbounded,
                max_city_freighters: Limit::Finite(vmax),
            })
            .collect(),
        customers: cust_raw
            .into_iter()
            .map(|(x, y, d)| Customer {
                coord: Point::new(x, y),
                demand: d,
            })
            .collect(),
        fleet: Fleet {
            level1_count: Limit::Finite(v1),
            level1_capacity: q1,
            level1_fixed_cost: f1,
            level1_dist_multiplier: mult1,
            level2_count: Limit::Finite(v2),
            level2_capacity: q2,
            level2_fixed_cost: f2,
        },
        distance: DistanceConvention::EUCLIDEAN,
        per_satellite_cf_limit_active: dialect == Dialect::OrlibSet4,
        objective_scale,
        notes,
    })
}

/// Whitespace-separated location-routing layout:
///
/// ```text
/// m                      customers
/// n                      satellites
/// x y                    depot
/// x y  (n lines)         satellites
/// x y  (m lines)         customers
/// Q1                     truck capacity
/// Q2                     city freighter capacity
/// k_s  (n lines)         satellite capacities
/// d_c  (m lines)         customer demands
/// f_s  (n lines)         satellite opening costs
/// F2                     city freighter fixed cost
/// F1                     truck fixed cost
/// ```
///
/// Anything after F1 is ignored. A file exactly one value short is read as
/// missing Q1, which defaults to 5000.
fn parse_lrp<T: Scalar>(content: &str, dialect: Dialect) -> Result<InstanceData<T>> {
    let toks: Vec<Token<'_>> = content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(i, l)| tokens_of(l, i + 1))
        .collect();
    if toks.len() < 2 {
        return Err(mismatch(dialect, "file too short"));
    }
    if toks.iter().any(|t| t.text.parse::<f64>().is_err()) {
        let t = toks.iter().find(|t| t.text.parse::<f64>().is_err()).unwrap();
        return Err(Error::malformed(t.line, t.column, format!("non-numeric value `{}`", t.text)));
    }
    let m = toks[0].count("customer count")? as usize;
    let n = toks[1].count("satellite count")? as usize;
    if m == 0 || n == 0 {
        return Err(mismatch(dialect, "customer and satellite counts must be positive"));
    }
    let expected = 2 + 2 + 2 * n + 2 * m + 2 + n + m + n + 2;
    let mut notes = Vec::new();
    let q1_missing = match toks.len() {
        l if l >= expected => false,
        l if l + 1 == expected => {
            notes.push("truck capacity missing from file, 5000 assumed".to_owned());
            true
        }
        l => {
            return Err(mismatch(
                dialect,
                format!("expected {expected} values for {m} customers and {n} satellites, found {l}"),
            ))
        }
    };
    let mut pos = 2;
    let mut next = || {
        pos += 1;
        toks[pos - 1]
    };
    let mut point = |what: &str| -> Result<Point<T>> {
        let x: T = next().parse(what)?;
        let y: T = next().parse(what)?;
        Ok(Point::new(x, y))
    };
    let depot = point("depot coordinate")?;
    let mut sat_coords = Vec::with_capacity(n);
    for _ in 0..n {
        sat_coords.push(point("satellite coordinate")?);
    }
    let mut cust_coords = Vec::with_capacity(m);
    for _ in 0..m {
        cust_coords.push(point("customer coordinate")?);
    }
    let q1 = if q1_missing {
        5000
    } else {
        next().count("truck capacity")?
    };
    let q2 = next().count("freighter capacity")?;
    let mut caps = Vec::with_capacity(n);
    for _ in 0..n {
        caps.push(next().count("satellite capacity")?);
    }
    let mut demands = Vec::with_capacity(m);
    for _ in 0..m {
        demands.push(next().count("customer demand")?);
    }
    let mut opening = Vec::with_capacity(n);
    for _ in 0..n {
        opening.push(next().parse::<T>("opening cost")?);
    }
    let f2: T = next().parse("freighter fixed cost")?;
    let f1: T = next().parse("truck fixed cost")?;
    let scale = if dialect == Dialect::Nguyen { 10 } else { 100 };

    Ok(InstanceData {
        name: String::new(),
        variant: Variant::TwoELrpSd,
        depot,
        satellites: sat_coords
            .into_iter()
            .zip(caps)
            .zip(opening)
            .map(|((coord, k), f)| Satellite {
                coord,
                handling_cost: T::zero(),
                opening_cost: f,
                capacity: Limit::Finite(k),
                max_city_freighters: Limit::Unbounded,
            })
            .collect(),
        customers: cust_coords
            .into_iter()
            .zip(demands)
            .map(|(coord, demand)| Customer { coord, demand })
            .collect(),
        fleet: Fleet {
            level1_count: Limit::Unbounded,
            level1_capacity: q1,
            level1_fixed_cost: f1,
            level1_dist_multiplier: T::one(),
            level2_count: Limit::Unbounded,
            level2_capacity: q2,
            level2_fixed_cost: f2,
        },
        distance: DistanceConvention::ceil_scaled(scale, 2),
        per_satellite_cf_limit_active: false,
        objective_scale: T::one(),
        notes,
    })
}
