use std::collections::BTreeMap;

use thiserror::Error;

/// Default fixed-point multiplier applied to source times, costs and weights.
pub const DEFAULT_SCALE: i64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance needs at least one customer")]
    NoCustomers,
    #[error("instance needs at least one truck")]
    NoTrucks,
    #[error("scale factor must be positive, got {0}")]
    BadScale(i64),
    #[error("{what} has size {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} holds negative value {value} at {location}")]
    Negative {
        what: &'static str,
        location: String,
        value: i64,
    },
    #[error("truck time from node {0} to itself must be zero")]
    NonZeroDiagonal(usize),
    #[error("{what} references node {node}, which is not a customer")]
    NotACustomer { what: &'static str, node: usize },
    #[error("drone costs must be defined exactly on the drone-eligible customers")]
    DroneCostKeys,
    #[error("the depot must carry zero weight")]
    DepotWeight,
}

/// Dense square matrix indexed by node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    size: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn filled(size: usize, value: i64) -> Self {
        Self {
            size,
            data: vec![value; size * size],
        }
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, InstanceError> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(InstanceError::Dimension {
                    what: "matrix row",
                    expected: size,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { size, data })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        Self { size, data }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.size + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    MinTime,
    MinCost,
}

/// Descriptive header carried along with the numeric data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMeta {
    pub name: String,
    /// Multiplier that was applied to source values to make them integral.
    pub scale: i64,
    /// Free-form key/value pairs describing where the data came from.
    pub provenance: Vec<(String, String)>,
}

impl Default for InstanceMeta {
    fn default() -> Self {
        Self {
            name: String::from("unnamed"),
            scale: DEFAULT_SCALE,
            provenance: Vec::new(),
        }
    }
}

/// Raw ingredients of an [`Instance`], checked by [`Instance::new`].
#[derive(Debug, Clone)]
pub struct InstanceParts {
    pub meta: InstanceMeta,
    pub truck_count: usize,
    pub drone_count: usize,
    /// Node-indexed truck travel times; node 0 is the depot.
    pub truck_time: Matrix,
    /// Round-trip drone time for every drone-eligible customer.
    pub drone_time: BTreeMap<usize, i64>,
    pub min_cost: Option<MinCostParts>,
}

#[derive(Debug, Clone)]
pub struct MinCostParts {
    pub truck_cost: Matrix,
    /// Keys must match the drone-eligible customers.
    pub drone_cost: BTreeMap<usize, i64>,
    /// Node-indexed parcel weights, `weight[0]` must be zero.
    pub weight: Vec<i64>,
    pub truck_capacity: i64,
    pub truck_time_limit: i64,
    pub drone_time_limit: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCostData {
    truck_cost: Matrix,
    drone_cost: Vec<Option<i64>>,
    weight: Vec<i64>,
    truck_capacity: i64,
    truck_time_limit: i64,
    drone_time_limit: i64,
}

impl MinCostData {
    pub fn truck_cost(&self) -> &Matrix {
        &self.truck_cost
    }
    pub fn drone_cost(&self, customer: usize) -> Option<i64> {
        self.drone_cost.get(customer).copied().flatten()
    }
    pub fn weight(&self, node: usize) -> i64 {
        self.weight[node]
    }
    pub fn truck_capacity(&self) -> i64 {
        self.truck_capacity
    }
    pub fn truck_time_limit(&self) -> i64 {
        self.truck_time_limit
    }
    pub fn drone_time_limit(&self) -> i64 {
        self.drone_time_limit
    }
}

/// A parallel drone scheduling routing instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    meta: InstanceMeta,
    truck_count: usize,
    drone_count: usize,
    truck_time: Matrix,
    drone_time: Vec<Option<i64>>,
    eligible: Vec<usize>,
    min_cost: Option<MinCostData>,
}

fn check_matrix(what: &'static str, m: &Matrix, size: usize) -> Result<(), InstanceError> {
    if m.size() != size {
        return Err(InstanceError::Dimension {
            what,
            expected: size,
            found: m.size(),
        });
    }
    for i in 0..size {
        for j in 0..size {
            let v = m.get(i, j);
            if v < 0 {
                return Err(InstanceError::Negative {
                    what,
                    location: format!("({i}, {j})"),
                    value: v,
                });
            }
        }
    }
    Ok(())
}

fn check_customer_map(
    what: &'static str,
    map: &BTreeMap<usize, i64>,
    customers: usize,
) -> Result<(), InstanceError> {
    for (&node, &value) in map {
        if node == 0 || node > customers {
            return Err(InstanceError::NotACustomer { what, node });
        }
        if value < 0 {
            return Err(InstanceError::Negative {
                what,
                location: format!("customer {node}"),
                value,
            });
        }
    }
    Ok(())
}

fn node_indexed(map: &BTreeMap<usize, i64>, nodes: usize) -> Vec<Option<i64>> {
    let mut out = vec![None; nodes];
    for (&k, &v) in map {
        out[k] = Some(v);
    }
    out
}

impl Instance {
    pub fn new(parts: InstanceParts) -> Result<Self, InstanceError> {
        let nodes = parts.truck_time.size();
        if nodes < 2 {
            return Err(InstanceError::NoCustomers);
        }
        if parts.truck_count == 0 {
            return Err(InstanceError::NoTrucks);
        }
        if parts.meta.scale <= 0 {
            return Err(InstanceError::BadScale(parts.meta.scale));
        }
        let customers = nodes - 1;
        check_matrix("truck time", &parts.truck_time, nodes)?;
        if let Some(i) = (0..nodes).find(|&i| parts.truck_time.get(i, i) != 0) {
            return Err(InstanceError::NonZeroDiagonal(i));
        }
        check_customer_map("drone time", &parts.drone_time, customers)?;
        let eligible: Vec<usize> = parts.drone_time.keys().copied().collect();

        let min_cost = match parts.min_cost {
            None => None,
            Some(mc) => {
                check_matrix("truck cost", &mc.truck_cost, nodes)?;
                check_customer_map("drone cost", &mc.drone_cost, customers)?;
                if !mc.drone_cost.keys().eq(eligible.iter()) {
                    return Err(InstanceError::DroneCostKeys);
                }
                if mc.weight.len() != nodes {
                    return Err(InstanceError::Dimension {
                        what: "weight",
                        expected: nodes,
                        found: mc.weight.len(),
                    });
                }
                if mc.weight[0] != 0 {
                    return Err(InstanceError::DepotWeight);
                }
                if let Some((i, &w)) = mc.weight.iter().enumerate().find(|(_, &w)| w < 0) {
                    return Err(InstanceError::Negative {
                        what: "weight",
                        location: format!("customer {i}"),
                        value: w,
                    });
                }
                for (what, v) in [
                    ("truck capacity", mc.truck_capacity),
                    ("truck time limit", mc.truck_time_limit),
                    ("drone time limit", mc.drone_time_limit),
                ] {
                    if v < 0 {
                        return Err(InstanceError::Negative {
                            what,
                            location: String::from("header"),
                            value: v,
                        });
                    }
                }
                Some(MinCostData {
                    drone_cost: node_indexed(&mc.drone_cost, nodes),
                    truck_cost: mc.truck_cost,
                    weight: mc.weight,
                    truck_capacity: mc.truck_capacity,
                    truck_time_limit: mc.truck_time_limit,
                    drone_time_limit: mc.drone_time_limit,
                })
            }
        };

        Ok(Self {
            meta: parts.meta,
            truck_count: parts.truck_count,
            drone_count: parts.drone_count,
            drone_time: node_indexed(&parts.drone_time, nodes),
            truck_time: parts.truck_time,
            eligible,
            min_cost,
        })
    }

    /// Reassembles the parts this instance was built from.
    pub fn to_parts(&self) -> InstanceParts {
        let to_map = |v: &[Option<i64>]| -> BTreeMap<usize, i64> {
            v.iter()
                .enumerate()
                .filter_map(|(i, x)| x.map(|x| (i, x)))
                .collect()
        };
        InstanceParts {
            meta: self.meta.clone(),
            truck_count: self.truck_count,
            drone_count: self.drone_count,
            truck_time: self.truck_time.clone(),
            drone_time: to_map(&self.drone_time),
            min_cost: self.min_cost.as_ref().map(|mc| MinCostParts {
                truck_cost: mc.truck_cost.clone(),
                drone_cost: to_map(&mc.drone_cost),
                weight: mc.weight.clone(),
                truck_capacity: mc.truck_capacity,
                truck_time_limit: mc.truck_time_limit,
                drone_time_limit: mc.drone_time_limit,
            }),
        }
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn scale(&self) -> i64 {
        self.meta.scale
    }

    pub fn variant(&self) -> Variant {
        if self.min_cost.is_some() {
            Variant::MinCost
        } else {
            Variant::MinTime
        }
    }

    /// Number of customers `n`; nodes are `0..=n`.
    pub fn customers(&self) -> usize {
        self.truck_time.size() - 1
    }

    pub fn node_count(&self) -> usize {
        self.truck_time.size()
    }

    pub fn truck_count(&self) -> usize {
        self.truck_count
    }

    pub fn drone_count(&self) -> usize {
        self.drone_count
    }

    pub fn truck_time(&self, i: usize, j: usize) -> i64 {
        self.truck_time.get(i, j)
    }

    pub fn truck_times(&self) -> &Matrix {
        &self.truck_time
    }

    pub fn drone_time(&self, customer: usize) -> Option<i64> {
        self.drone_time.get(customer).copied().flatten()
    }

    pub fn is_eligible(&self, customer: usize) -> bool {
        self.drone_time(customer).is_some()
    }

    /// Drone-eligible customers in ascending order.
    pub fn eligible(&self) -> &[usize] {
        &self.eligible
    }

    pub fn min_cost(&self) -> Option<&MinCostData> {
        self.min_cost.as_ref()
    }

    /// Cost of a truck arc: the travel cost for min-cost instances, the travel
    /// time otherwise.
    pub fn arc_weight(&self, i: usize, j: usize) -> i64 {
        match &self.min_cost {
            Some(mc) => mc.truck_cost.get(i, j),
            None => self.truck_time.get(i, j),
        }
    }

    /// Drone counterpart of [`Instance::arc_weight`].
    pub fn drone_weight(&self, customer: usize) -> Option<i64> {
        match &self.min_cost {
            Some(mc) => mc.drone_cost(customer),
            None => self.drone_time(customer),
        }
    }

    /// Copy of this instance with a different fleet.
    pub fn with_fleet(&self, trucks: usize, drones: usize) -> Result<Self, InstanceError> {
        let mut parts = self.to_parts();
        parts.truck_count = trucks;
        parts.drone_count = drones;
        Self::new(parts)
    }

    /// Copy of this instance with a different header.
    pub fn with_meta(mut self, meta: InstanceMeta) -> Result<Self, InstanceError> {
        if meta.scale <= 0 {
            return Err(InstanceError::BadScale(meta.scale));
        }
        self.meta = meta;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(n: usize) -> InstanceParts {
        InstanceParts {
            meta: InstanceMeta::default(),
            truck_count: 1,
            drone_count: 1,
            truck_time: Matrix::from_fn(n + 1, |i, j| if i == j { 0 } else { 3 }),
            drone_time: BTreeMap::from([(1, 4)]),
            min_cost: None,
        }
    }

    #[test]
    fn min_time_instance_has_no_cost_block() {
        let inst = Instance::new(parts(2)).unwrap();
        assert_eq!(inst.variant(), Variant::MinTime);
        assert_eq!(inst.customers(), 2);
        assert_eq!(inst.eligible(), &[1]);
        assert!(inst.is_eligible(1));
        assert!(!inst.is_eligible(2));
        assert!(inst.min_cost().is_none());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut p = parts(2);
        p.truck_time.set(1, 1, 2);
        assert_eq!(Instance::new(p).unwrap_err(), InstanceError::NonZeroDiagonal(1));

        let mut p = parts(2);
        p.drone_time.insert(0, 1);
        assert!(matches!(
            Instance::new(p),
            Err(InstanceError::NotACustomer { node: 0, .. })
        ));

        let mut p = parts(2);
        p.truck_count = 0;
        assert_eq!(Instance::new(p).unwrap_err(), InstanceError::NoTrucks);

        let mut p = parts(2);
        p.truck_time.set(0, 2, -1);
        assert!(matches!(Instance::new(p), Err(InstanceError::Negative { .. })));
    }

    #[test]
    fn min_cost_requires_consistent_blocks() {
        let mut p = parts(2);
        p.min_cost = Some(MinCostParts {
            truck_cost: Matrix::filled(3, 0),
            drone_cost: BTreeMap::from([(2, 1)]),
            weight: vec![0, 1, 1],
            truck_capacity: 5,
            truck_time_limit: 100,
            drone_time_limit: 100,
        });
        assert_eq!(Instance::new(p).unwrap_err(), InstanceError::DroneCostKeys);
    }
}
