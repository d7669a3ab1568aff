//! Instances derived from coordinate lists (TSPLIB `NODE_COORD_SECTION`,
//! CVRPLIB coordinates with demands).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::ParseError;
use crate::model::{Instance, InstanceError, InstanceMeta, InstanceParts, Matrix, MinCostParts, DEFAULT_SCALE};

/// How truck distances are turned into integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// TSPLIB `EUC_2D`: nearest integer, then scaled.
    Nearest,
    /// TSPLIB `CEIL_2D`.
    Ceiling,
    /// TSPLIB `ATT` pseudo-Euclidean distance.
    Att,
    /// Euclidean distance multiplied by the scale, rounded once.
    ExactScaled,
}

impl Rounding {
    pub fn name(self) -> &'static str {
        match self {
            Rounding::Nearest => "nearest",
            Rounding::Ceiling => "ceiling",
            Rounding::Att => "att",
            Rounding::ExactScaled => "exact-scaled",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Rounding::Nearest, Rounding::Ceiling, Rounding::Att, Rounding::ExactScaled]
            .into_iter()
            .find(|r| r.name() == s)
    }

    /// Rule implied by a TSPLIB `EDGE_WEIGHT_TYPE`.
    pub fn for_edge_weight_type(kind: &str) -> Option<Self> {
        match kind {
            "EUC_2D" => Some(Rounding::Nearest),
            "CEIL_2D" => Some(Rounding::Ceiling),
            "ATT" => Some(Rounding::Att),
            _ => None,
        }
    }

    /// Scaled integer distance between two points.
    pub fn distance(self, a: (f64, f64), b: (f64, f64), scale: i64) -> i64 {
        let (dx, dy) = (a.0 - b.0, a.1 - b.1);
        let d = dx.hypot(dy);
        match self {
            Rounding::Nearest => (d + 0.5).floor() as i64 * scale,
            Rounding::Ceiling => d.ceil() as i64 * scale,
            Rounding::Att => {
                let r = ((dx * dx + dy * dy) / 10.0).sqrt();
                let t = (r + 0.5).floor();
                (if t < r { t + 1.0 } else { t }) as i64 * scale
            }
            Rounding::ExactScaled => (d * scale as f64).round() as i64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DroneMetric {
    Euclidean,
    SameAsTruck,
}

impl DroneMetric {
    pub fn name(self) -> &'static str {
        match self {
            DroneMetric::Euclidean => "euclidean",
            DroneMetric::SameAsTruck => "same-as-truck",
        }
    }
}

/// Extra data for min-cost instances. Rates multiply scaled times; limits are
/// in source units and get scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct CostParams {
    pub truck_cost_rate: f64,
    pub drone_cost_rate: f64,
    /// Falls back to the source `CAPACITY`.
    pub truck_capacity: Option<f64>,
    pub truck_time_limit: f64,
    pub drone_time_limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverterParams {
    pub eligible_fraction: f64,
    /// Drone speed relative to the truck.
    pub drone_speed: f64,
    pub rounding: Rounding,
    pub drone_metric: DroneMetric,
    pub seed: u64,
    pub trucks: usize,
    pub drones: usize,
    pub scale: i64,
    pub min_cost: Option<CostParams>,
}

impl Default for ConverterParams {
    fn default() -> Self {
        Self {
            eligible_fraction: 0.8,
            drone_speed: 1.0,
            rounding: Rounding::Nearest,
            drone_metric: DroneMetric::Euclidean,
            seed: 0,
            trucks: 1,
            drones: 1,
            scale: DEFAULT_SCALE,
            min_cost: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("need a depot and at least one customer, got {0} points")]
    TooFewPoints(usize),
    #[error("drone speed factor must be positive, got {0}")]
    BadSpeed(f64),
    #[error("eligible fraction must lie in [0, 1], got {0}")]
    BadFraction(f64),
    #[error("min-cost conversion needs customer demands")]
    MissingDemands,
    #[error("min-cost conversion needs a truck capacity")]
    MissingCapacity,
    #[error("non-finite coordinate at point {0}")]
    BadCoordinate(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Coordinates read from a TSPLIB or CVRPLIB file, depot first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoordinateSource {
    pub name: String,
    pub edge_weight_type: Option<String>,
    pub points: Vec<(f64, f64)>,
    /// Customer demands aligned with `points` (depot entry included).
    pub demands: Option<Vec<i64>>,
    pub capacity: Option<i64>,
}

/// Reads the `NODE_COORD_SECTION`, and for CVRPLIB files the
/// `DEMAND_SECTION` and `DEPOT_SECTION`, of a TSPLIB-style file. The depot
/// (first node unless a depot section says otherwise) is moved to index 0.
pub fn parse_coordinates(text: &str) -> Result<CoordinateSource, ParseError> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Coords,
        Demand,
        Depot,
        Other,
    }
    let mut src = CoordinateSource::default();
    let mut section = Section::Header;
    let mut coords: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    let mut demand: BTreeMap<i64, i64> = BTreeMap::new();
    let mut depot: Option<i64> = None;
    let mut dimension: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if l == "EOF" {
            break;
        }
        if l.ends_with("_SECTION") {
            section = match l {
                "NODE_COORD_SECTION" => Section::Coords,
                "DEMAND_SECTION" => Section::Demand,
                "DEPOT_SECTION" => Section::Depot,
                _ => Section::Other,
            };
            continue;
        }
        if let Some((key, value)) = l.split_once(':') {
            if !key.trim().chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "NAME" => src.name = value.to_string(),
                    "EDGE_WEIGHT_TYPE" => src.edge_weight_type = Some(value.to_string()),
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| ParseError::new(line, "DIMENSION", "not a count"))?)
                    }
                    "CAPACITY" => {
                        src.capacity = Some(value.parse().map_err(|_| ParseError::new(line, "CAPACITY", "not an integer"))?)
                    }
                    _ => {}
                }
                section = Section::Header;
                continue;
            }
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let num = |t: &str, field: &str| t.parse::<f64>().map_err(|_| ParseError::new(line, field, format!("{t:?} is not a number")));
        let id = |t: &str, field: &str| t.parse::<i64>().map_err(|_| ParseError::new(line, field, format!("{t:?} is not a node id")));
        match section {
            Section::Coords => {
                if toks.len() < 3 {
                    return Err(ParseError::new(line, "NODE_COORD_SECTION", "expected id x y"));
                }
                let p = (num(toks[1], "NODE_COORD_SECTION")?, num(toks[2], "NODE_COORD_SECTION")?);
                if coords.insert(id(toks[0], "NODE_COORD_SECTION")?, p).is_some() {
                    return Err(ParseError::new(line, "NODE_COORD_SECTION", "duplicate node id"));
                }
            }
            Section::Demand => {
                if toks.len() < 2 {
                    return Err(ParseError::new(line, "DEMAND_SECTION", "expected id demand"));
                }
                demand.insert(id(toks[0], "DEMAND_SECTION")?, id(toks[1], "DEMAND_SECTION")?);
            }
            Section::Depot => {
                for t in toks {
                    let v = id(t, "DEPOT_SECTION")?;
                    if v >= 0 && depot.is_none() {
                        depot = Some(v);
                    }
                }
            }
            Section::Header => {
                return Err(ParseError::new(line, "header", format!("unexpected line {l:?}")));
            }
            Section::Other => {}
        }
    }

    if coords.is_empty() {
        return Err(ParseError::new(text.lines().count() + 1, "NODE_COORD_SECTION", "no coordinates"));
    }
    if let Some(d) = dimension {
        if d != coords.len() {
            return Err(ParseError::new(1, "DIMENSION", format!("declares {d} nodes, found {}", coords.len())));
        }
    }
    let depot = depot.unwrap_or_else(|| *coords.keys().next().expect("non-empty"));
    if !coords.contains_key(&depot) {
        return Err(ParseError::new(1, "DEPOT_SECTION", format!("depot {depot} has no coordinates")));
    }
    let order: Vec<i64> = std::iter::once(depot).chain(coords.keys().copied().filter(|&k| k != depot)).collect();
    src.points = order.iter().map(|k| coords[k]).collect();
    if !demand.is_empty() {
        let mut d = Vec::with_capacity(order.len());
        for k in &order {
            match demand.get(k) {
                Some(&v) => d.push(v),
                None => return Err(ParseError::new(1, "DEMAND_SECTION", format!("no demand for node {k}"))),
            }
        }
        d[0] = 0;
        src.demands = Some(d);
    }
    Ok(src)
}

/// Reads `0.80` out of names like `att48_0_80`.
pub fn eligible_fraction_from_name(name: &str) -> Option<f64> {
    let mut parts = name.rsplitn(3, '_');
    let frac = parts.next()?;
    let whole = parts.next()?;
    parts.next()?;
    if whole.is_empty() || frac.is_empty() || !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    format!("{whole}.{frac}").parse().ok()
}

fn check(points: &[(f64, f64)], params: &ConverterParams) -> Result<(), ConvertError> {
    if points.len() < 2 {
        return Err(ConvertError::TooFewPoints(points.len()));
    }
    if !(params.drone_speed > 0.0 && params.drone_speed.is_finite()) {
        return Err(ConvertError::BadSpeed(params.drone_speed));
    }
    if !(0.0..=1.0).contains(&params.eligible_fraction) {
        return Err(ConvertError::BadFraction(params.eligible_fraction));
    }
    if let Some(k) = points.iter().position(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(ConvertError::BadCoordinate(k));
    }
    Ok(())
}

fn build(points: &[(f64, f64)], demands: Option<&[i64]>, capacity: Option<i64>, params: &ConverterParams) -> Result<Instance, ConvertError> {
    check(points, params)?;
    let n = points.len() - 1;
    let scale = params.scale;
    let truck_time = Matrix::from_fn(n + 1, |i, j| if i == j { 0 } else { params.rounding.distance(points[i], points[j], scale) });

    // Floor with a small allowance so 0.7 * 10 counts as 7.
    let k = ((params.eligible_fraction * n as f64) + 1e-9).floor() as usize;
    let mut customers: Vec<usize> = (1..=n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    customers.shuffle(&mut rng);
    let mut eligible: Vec<usize> = customers[..k.min(n)].to_vec();
    eligible.sort_unstable();

    let drone_time: BTreeMap<usize, i64> = eligible
        .iter()
        .map(|&c| {
            let one_way = match params.drone_metric {
                DroneMetric::Euclidean => {
                    let (dx, dy) = (points[c].0 - points[0].0, points[c].1 - points[0].1);
                    dx.hypot(dy) * scale as f64
                }
                DroneMetric::SameAsTruck => truck_time.get(0, c) as f64,
            };
            (c, (2.0 * one_way / params.drone_speed).round() as i64)
        })
        .collect();

    let mut provenance = vec![
        ("converter".to_string(), "coordinates".to_string()),
        ("rounding".to_string(), params.rounding.name().to_string()),
        ("drone_metric".to_string(), params.drone_metric.name().to_string()),
        ("drone_speed".to_string(), params.drone_speed.to_string()),
        ("eligible_fraction".to_string(), params.eligible_fraction.to_string()),
        ("seed".to_string(), params.seed.to_string()),
    ];

    let min_cost = match &params.min_cost {
        None => None,
        Some(cp) => {
            let demands = demands.ok_or(ConvertError::MissingDemands)?;
            let capacity = cp.truck_capacity.or(capacity.map(|c| c as f64)).ok_or(ConvertError::MissingCapacity)?;
            let scaled = |v: f64| (v * scale as f64).round() as i64;
            provenance.extend([
                ("truck_cost_rate".to_string(), cp.truck_cost_rate.to_string()),
                ("drone_cost_rate".to_string(), cp.drone_cost_rate.to_string()),
                ("truck_capacity".to_string(), capacity.to_string()),
                ("truck_time_limit".to_string(), cp.truck_time_limit.to_string()),
                ("drone_time_limit".to_string(), cp.drone_time_limit.to_string()),
            ]);
            Some(MinCostParts {
                truck_cost: Matrix::from_fn(n + 1, |i, j| (truck_time.get(i, j) as f64 * cp.truck_cost_rate).round() as i64),
                drone_cost: drone_time.iter().map(|(&c, &t)| (c, (t as f64 * cp.drone_cost_rate).round() as i64)).collect(),
                weight: demands.iter().map(|&d| d * scale).collect(),
                truck_capacity: scaled(capacity),
                truck_time_limit: scaled(cp.truck_time_limit),
                drone_time_limit: scaled(cp.drone_time_limit),
            })
        }
    };

    Ok(Instance::new(InstanceParts {
        meta: InstanceMeta {
            name: "converted".to_string(),
            scale,
            provenance,
        },
        truck_count: params.trucks,
        drone_count: params.drones,
        truck_time,
        drone_time,
        min_cost,
    })?)
}

/// Builds an instance from raw points; point 0 is the depot. Min-cost
/// conversion needs demands and so goes through [`convert_source`].
pub fn convert_coordinates(points: &[(f64, f64)], params: &ConverterParams) -> Result<Instance, ConvertError> {
    build(points, None, None, params)
}

/// Builds an instance from a parsed file, keeping its name.
pub fn convert_source(source: &CoordinateSource, params: &ConverterParams) -> Result<Instance, ConvertError> {
    let inst = build(&source.points, source.demands.as_deref(), source.capacity, params)?;
    let mut meta = inst.meta().clone();
    meta.name = if source.name.is_empty() { "converted".into() } else { source.name.clone() };
    meta.provenance.insert(0, ("source".into(), meta.name.clone()));
    Ok(inst.with_meta(meta)?)
}
