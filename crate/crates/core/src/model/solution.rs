use std::fmt;

/// Truck tours and drone missions for every vehicle of the fleet.
///
/// A used truck tour is written `[0, c1, .., cm, 0]`; an idle truck has an
/// empty tour. Each drone holds the list of customers it serves with
/// individual depot round trips.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Solution {
    pub truck_tours: Vec<Vec<usize>>,
    pub drone_missions: Vec<Vec<usize>>,
}

impl Solution {
    pub fn new(truck_tours: Vec<Vec<usize>>, drone_missions: Vec<Vec<usize>>) -> Self {
        Self {
            truck_tours,
            drone_missions,
        }
    }

    /// Builds a solution from customer sequences, adding the depot endpoints
    /// to each non-empty tour.
    pub fn from_routes(routes: &[Vec<usize>], missions: &[Vec<usize>]) -> Self {
        let truck_tours = routes
            .iter()
            .map(|r| {
                if r.is_empty() {
                    Vec::new()
                } else {
                    let mut t = Vec::with_capacity(r.len() + 2);
                    t.push(0);
                    t.extend_from_slice(r);
                    t.push(0);
                    t
                }
            })
            .collect();
        Self {
            truck_tours,
            drone_missions: missions.to_vec(),
        }
    }

    /// Customers of a tour, without the depot endpoints.
    pub fn tour_customers(tour: &[usize]) -> &[usize] {
        if tour.len() >= 2 {
            &tour[1..tour.len() - 1]
        } else {
            &[]
        }
    }

    /// Canonical form: each mission list sorted ascending and empty tours moved
    /// after the non-empty ones. Tour node order is kept as is.
    pub fn canonicalize(&self) -> Solution {
        let mut tours: Vec<Vec<usize>> = Vec::with_capacity(self.truck_tours.len());
        tours.extend(self.truck_tours.iter().filter(|t| !t.is_empty()).cloned());
        tours.extend(self.truck_tours.iter().filter(|t| t.is_empty()).cloned());
        let missions = self
            .drone_missions
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.sort_unstable();
                m
            })
            .collect();
        Solution {
            truck_tours: tours,
            drone_missions: missions,
        }
    }

    pub fn is_canonical(&self) -> bool {
        let tours_ok = self
            .truck_tours
            .windows(2)
            .all(|w| !(w[0].is_empty() && !w[1].is_empty()));
        tours_ok && self.drone_missions.iter().all(|m| m.windows(2).all(|w| w[0] <= w[1]))
    }
}

/// Free-function form of [`Solution::canonicalize`].
pub fn canonicalize_solution(solution: &Solution) -> Solution {
    solution.canonicalize()
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.truck_tours.iter().enumerate() {
            writeln!(f, "truck {k}: {t:?}")?;
        }
        for (d, m) in self.drone_missions.iter().enumerate() {
            writeln!(f, "drone {d}: {m:?}")?;
        }
        Ok(())
    }
}
