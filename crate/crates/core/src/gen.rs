//! Seeded random instances for tests and benchmarks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, InstanceMeta, InstanceParts, Matrix, MinCostParts, DEFAULT_SCALE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub customers: usize,
    pub trucks: usize,
    pub drones: usize,
    /// Probability that a customer is drone-eligible.
    pub eligible: f64,
    /// Side of the square customers are scattered over, in source units.
    pub extent: i64,
}

impl GenParams {
    pub fn new(customers: usize, trucks: usize, drones: usize) -> Self {
        Self {
            customers,
            trucks,
            drones,
            eligible: 0.7,
            extent: 100,
        }
    }
}

fn points(rng: &mut ChaCha8Rng, p: &GenParams) -> Vec<(i64, i64)> {
    let half = p.extent / 2;
    let mut pts = vec![(half, half)];
    pts.extend((0..p.customers).map(|_| (rng.gen_range(0..=p.extent), rng.gen_range(0..=p.extent))));
    pts
}

/// Euclidean distances scaled by [`DEFAULT_SCALE`] and rounded, with a random
/// asymmetric detour added so the triangle inequality does not always hold.
fn travel(rng: &mut ChaCha8Rng, pts: &[(i64, i64)]) -> Matrix {
    let n = pts.len();
    let mut m = Matrix::filled(n, 0);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (dx, dy) = ((pts[i].0 - pts[j].0) as f64, (pts[i].1 - pts[j].1) as f64);
                let d = (dx.hypot(dy) * DEFAULT_SCALE as f64).round() as i64;
                let detour = rng.gen_range(0..=d / 5 + 1);
                m.set(i, j, d + detour);
            }
        }
    }
    m
}

fn drone_times(rng: &mut ChaCha8Rng, p: &GenParams, m: &Matrix) -> BTreeMap<usize, i64> {
    let mut out = BTreeMap::new();
    for i in 1..=p.customers {
        if rng.gen_bool(p.eligible) {
            let speed = rng.gen_range(0.6..1.6);
            let t = ((m.get(0, i) + m.get(i, 0)) as f64 / speed).round() as i64;
            out.insert(i, t.max(1));
        }
    }
    out
}

fn meta(kind: &str, seed: u64) -> InstanceMeta {
    InstanceMeta {
        name: format!("rand-{kind}-{seed}"),
        scale: DEFAULT_SCALE,
        provenance: vec![
            ("generator".into(), "pdsvrp-core gen".into()),
            ("seed".into(), seed.to_string()),
        ],
    }
}

/// Random min-time instance.
pub fn random_min_time(p: &GenParams, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = points(&mut rng, p);
    let truck_time = travel(&mut rng, &pts);
    let drone_time = drone_times(&mut rng, p, &truck_time);
    Instance::new(InstanceParts {
        meta: meta("mt", seed),
        truck_count: p.trucks,
        drone_count: p.drones,
        truck_time,
        drone_time,
        min_cost: None,
    })
    .expect("generated instance is valid")
}

/// Random min-cost instance. Limits are drawn around the size of the data so
/// that a good share of instances have binding capacity or working-time
/// limits and a few have no feasible solution at all.
pub fn random_min_cost(p: &GenParams, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = points(&mut rng, p);
    let truck_time = travel(&mut rng, &pts);
    let drone_time = drone_times(&mut rng, p, &truck_time);
    let n = p.customers;

    let rate = rng.gen_range(1..=3);
    let truck_cost = Matrix::from_fn(n + 1, |i, j| truck_time.get(i, j) * rate);
    let drone_cost: BTreeMap<usize, i64> = drone_time
        .iter()
        .map(|(&i, &t)| (i, (t as f64 * rng.gen_range(0.2..1.2)).round() as i64))
        .collect();
    let mut weight = vec![0];
    weight.extend((0..n).map(|_| rng.gen_range(1..=10) * DEFAULT_SCALE));

    let total_weight: i64 = weight.iter().sum();
    let max_weight = weight.iter().copied().max().unwrap_or(0);
    let per_truck = total_weight / p.trucks.max(1) as i64;
    let capacity = (per_truck as f64 * rng.gen_range(0.6..1.5)).round() as i64;
    let capacity = capacity.max(max_weight / 2);

    let farthest = (1..=n)
        .map(|i| truck_time.get(0, i) + truck_time.get(i, 0))
        .max()
        .unwrap_or(0);
    let truck_time_limit = (farthest as f64 * rng.gen_range(1.1..3.0)).round() as i64;
    let drone_total: i64 = drone_time.values().sum();
    let per_drone = drone_total / p.drones.max(1) as i64;
    let drone_time_limit = (per_drone as f64 * rng.gen_range(0.4..1.3)).round() as i64;

    Instance::new(InstanceParts {
        meta: meta("mc", seed),
        truck_count: p.trucks,
        drone_count: p.drones,
        truck_time,
        drone_time,
        min_cost: Some(MinCostParts {
            truck_cost,
            drone_cost,
            weight,
            truck_capacity: capacity,
            truck_time_limit,
            drone_time_limit,
        }),
    })
    .expect("generated instance is valid")
}

/// Copy of a min-cost instance with every limit lifted.
pub fn relax_limits(instance: &Instance) -> Instance {
    let mut parts = instance.to_parts();
    if let Some(mc) = parts.min_cost.as_mut() {
        mc.truck_capacity = i64::MAX / 8;
        mc.truck_time_limit = i64::MAX / 8;
        mc.drone_time_limit = i64::MAX / 8;
    }
    Instance::new(parts).expect("relaxed instance is valid")
}
