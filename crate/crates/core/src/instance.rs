//! Bin packing and TSP instances, seeded generators, feasibility checks and
//! exhaustive classical oracles.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Largest state space the brute-force oracles will walk.
pub const ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BppInstance {
    #[serde(default)]
    pub seed: u64,
    pub n_items: usize,
    pub n_bins: usize,
    pub weights: Vec<u64>,
    pub capacity: u64,
}

impl BppInstance {
    pub fn new(weights: Vec<u64>, n_bins: usize, capacity: u64) -> Result<Self> {
        let inst = Self {
            seed: 0,
            n_items: weights.len(),
            n_bins,
            weights,
            capacity,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// The three-item, two-bin instance used throughout the benchmarks.
    pub fn reference() -> Self {
        Self::new(vec![25, 25, 30], 2, 100).expect("valid reference instance")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_items == 0 || self.n_bins == 0 {
            return param("bpp instance needs at least one item and one bin");
        }
        if self.weights.len() != self.n_items {
            return param(format!(
                "expected {} weights, got {}",
                self.n_items,
                self.weights.len()
            ));
        }
        if self.weights.contains(&0) {
            return param("item weights must be >= 1");
        }
        if self.capacity == 0 {
            return param("capacity must be >= 1");
        }
        Ok(())
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BppAssignment {
    pub item_to_bin: Vec<usize>,
    pub bins_used: Vec<bool>,
}

impl BppAssignment {
    /// Builds an assignment whose `bins_used` mask is derived from the items.
    pub fn from_items(item_to_bin: Vec<usize>, n_bins: usize) -> Self {
        let mut bins_used = vec![false; n_bins];
        for &j in &item_to_bin {
            if j < n_bins {
                bins_used[j] = true;
            }
        }
        Self {
            item_to_bin,
            bins_used,
        }
    }

    pub fn bin_count(&self) -> usize {
        self.bins_used.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TspInstance {
    #[serde(default)]
    pub seed: u64,
    pub n: usize,
    /// Row-major `n x n` distance matrix; the diagonal is ignored.
    #[serde(rename = "weights")]
    pub weight: Vec<Vec<f64>>,
}

impl TspInstance {
    pub fn new(weight: Vec<Vec<f64>>) -> Result<Self> {
        let inst = Self {
            seed: 0,
            n: weight.len(),
            weight,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Complete graph on `n` vertices with every edge weighing `w`.
    pub fn uniform(n: usize, w: f64) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { w }).collect())
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return param(format!("tsp needs n >= 3, got {}", self.n));
        }
        if self.weight.len() != self.n || self.weight.iter().any(|r| r.len() != self.n) {
            return param(format!("weight matrix must be {0}x{0}", self.n));
        }
        for (i, row) in self.weight.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                if i != j && !(w.is_finite() && w >= 0.0) {
                    return param(format!("weight[{i}][{j}] = {w} is not a finite non-negative value"));
                }
            }
        }
        Ok(())
    }

    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.weight[i][j]
    }

    pub fn max_weight(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.weight[i][j]);
                }
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.weight[i][j] == self.weight[j][i]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspTour {
    pub order: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Bpp(BppAssignment),
    Tsp(TspTour),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSolution {
    pub objective: f64,
    pub witness: Witness,
    pub enumerated_count: u64,
}

/// A problem instance of either supported kind. Serializes to the instance
/// JSON schema with a `"type"` discriminator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Problem {
    Bpp(BppInstance),
    Tsp(TspInstance),
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        match self {
            Problem::Bpp(b) => b.validate(),
            Problem::Tsp(t) => t.validate(),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Bpp(_) => ProblemKind::Bpp,
            Problem::Tsp(_) => ProblemKind::Tsp,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Problem::Bpp(b) => b.seed,
            Problem::Tsp(t) => t.seed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Problem = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    /// Stable content identifier (FNV-1a over the compact JSON form).
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("instances always serialize");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        let tag = match self.kind() {
            ProblemKind::Bpp => "bpp",
            ProblemKind::Tsp => "tsp",
        };
        format!("{tag}-{h:016x}")
    }

    pub fn solve_bruteforce(&self) -> Result<ClassicalSolution> {
        match self {
            Problem::Bpp(b) => solve_bpp_bruteforce(b),
            Problem::Tsp(t) => solve_tsp_bruteforce(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Bpp,
    Tsp,
}

pub fn generate_bpp(
    seed: u64,
    n_items: usize,
    n_bins: usize,
    weight_lo: u64,
    weight_hi: u64,
    capacity: u64,
) -> Result<BppInstance> {
    if n_items == 0 || n_bins == 0 {
        return param("n_items and n_bins must be >= 1");
    }
    if !(1 <= weight_lo && weight_lo <= weight_hi && weight_hi <= capacity) {
        return param(format!(
            "need 1 <= weight_lo ({weight_lo}) <= weight_hi ({weight_hi}) <= capacity ({capacity})"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n_items)
        .map(|_| rng.random_range(weight_lo..=weight_hi))
        .collect();
    Ok(BppInstance {
        seed,
        n_items,
        n_bins,
        weights,
        capacity,
    })
}

pub fn generate_tsp(seed: u64, n: usize, weight_lo: f64, weight_hi: f64, symmetric: bool) -> Result<TspInstance> {
    if n < 3 {
        return param(format!("tsp needs n >= 3, got {n}"));
    }
    if !(0.0 <= weight_lo && weight_lo <= weight_hi && weight_hi.is_finite()) {
        return param(format!("need 0 <= weight_lo ({weight_lo}) <= weight_hi ({weight_hi})"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        if weight_lo == weight_hi {
            weight_lo
        } else {
            rng.random_range(weight_lo..=weight_hi)
        }
    };
    let mut weight = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            weight[i][j] = draw();
        }
    }
    if symmetric {
        for i in 0..n {
            for j in 0..i {
                weight[i][j] = weight[j][i];
            }
        }
    }
    Ok(TspInstance { seed, n, weight })
}

/// Checks the assignment and capacity constraints, including consistency
/// between items and the `bins_used` mask.
pub fn bpp_feasible(inst: &BppInstance, a: &BppAssignment) -> Result<bool> {
    if a.item_to_bin.len() != inst.n_items || a.bins_used.len() != inst.n_bins {
        return param(format!(
            "assignment is {}x{}, instance is {}x{}",
            a.item_to_bin.len(),
            a.bins_used.len(),
            inst.n_items,
            inst.n_bins
        ));
    }
    let mut load = vec![0u64; inst.n_bins];
    for (i, &j) in a.item_to_bin.iter().enumerate() {
        if j >= inst.n_bins {
            return Ok(false);
        }
        load[j] += inst.weights[i];
    }
    Ok(load
        .iter()
        .zip(&a.bins_used)
        .all(|(&l, &used)| l <= if used { inst.capacity } else { 0 }))
}

fn checked_states(base: u64, exp: usize) -> Option<u64> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

/// Minimum number of bins over all `K^N` item placements.
pub fn solve_bpp_bruteforce(inst: &BppInstance) -> Result<ClassicalSolution> {
    inst.validate()?;
    let k = inst.n_bins as u64;
    let total = checked_states(k, inst.n_items)
        .filter(|&t| t <= ENUMERATION_CAP)
        .ok_or_else(|| {
            Error::Size(format!(
                "{}^{} assignments exceed the enumeration cap of {ENUMERATION_CAP}",
                inst.n_bins, inst.n_items
            ))
        })?;

    let decode = |mut idx: u64| -> Vec<usize> {
        (0..inst.n_items)
            .map(|_| {
                let j = (idx % k) as usize;
                idx /= k;
                j
            })
            .collect()
    };

    let best = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let bins = decode(idx);
            let mut load = vec![0u64; inst.n_bins];
            for (i, &j) in bins.iter().enumerate() {
                load[j] += inst.weights[i];
            }
            if load.iter().any(|&l| l > inst.capacity) {
                return None;
            }
            Some((load.iter().filter(|&&l| l > 0).count(), idx))
        })
        .min();

    let (bins, idx) = best.ok_or_else(|| {
        Error::Parameter("no feasible packing exists (an item exceeds the capacity)".into())
    })?;
    Ok(ClassicalSolution {
        objective: bins as f64,
        witness: Witness::Bpp(BppAssignment::from_items(decode(idx), inst.n_bins)),
        enumerated_count: total,
    })
}

fn check_permutation(n: usize, order: &[usize]) -> Result<()> {
    if order.len() != n {
        return param(format!("tour has {} vertices, expected {n}", order.len()));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || seen[v] {
            return param(format!("tour {order:?} is not a permutation of 0..{n}"));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Cost of the closed directed loop visiting `order`.
pub fn tsp_tour_cost(inst: &TspInstance, order: &[usize]) -> Result<f64> {
    check_permutation(inst.n, order)?;
    Ok(closed_cost(inst, order))
}

fn closed_cost(inst: &TspInstance, order: &[usize]) -> f64 {
    let n = order.len();
    (0..n).map(|t| inst.w(order[t], order[(t + 1) % n])).sum()
}

/// Lexicographic successor; returns false once `v` is the last permutation.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Minimum-cost tour over all `(n-1)!` orders starting at vertex 0.
pub fn solve_tsp_bruteforce(inst: &TspInstance) -> Result<ClassicalSolution> {
    inst.validate()?;
    let mut count: u64 = 1;
    for f in 2..inst.n as u64 {
        count = count.saturating_mul(f);
    }
    if count > ENUMERATION_CAP {
        return Err(Error::Size(format!(
            "({}-1)! tours exceed the enumeration cap of {ENUMERATION_CAP}",
            inst.n
        )));
    }
    let mut order: Vec<usize> = (0..inst.n).collect();
    let mut best_order = order.clone();
    let mut best = closed_cost(inst, &order);
    while next_permutation(&mut order[1..]) {
        let c = closed_cost(inst, &order);
        if c.partial_cmp(&best) == Some(Ordering::Less) {
            best = c;
            best_order.copy_from_slice(&order);
        }
    }
    Ok(ClassicalSolution {
        objective: best,
        witness: Witness::Tsp(TspTour {
            order: best_order,
            cost: best,
        }),
        enumerated_count: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_bpp_matches_requested_shape() {
        let inst = generate_bpp(7, 3, 2, 25, 30, 100).unwrap();
        assert_eq!((inst.n_items, inst.n_bins, inst.capacity), (3, 2, 100));
        assert!(inst.weights.iter().all(|w| (25..=30).contains(w)));
        assert_eq!(inst, generate_bpp(7, 3, 2, 25, 30, 100).unwrap());
    }

    #[test]
    fn generate_bpp_degenerate() {
        let inst = generate_bpp(11, 1, 1, 1, 1, 1).unwrap();
        assert_eq!(inst.weights, vec![1]);
        assert_eq!(inst.capacity, 1);
    }

    #[test]
    fn generate_bpp_rejects_bad_ranges() {
        assert!(matches!(generate_bpp(0, 3, 2, 0, 5, 10), Err(Error::Parameter(_))));
        assert!(matches!(generate_bpp(0, 3, 2, 6, 5, 10), Err(Error::Parameter(_))));
        assert!(matches!(generate_bpp(0, 3, 2, 5, 11, 10), Err(Error::Parameter(_))));
        assert!(matches!(generate_bpp(0, 0, 2, 1, 1, 10), Err(Error::Parameter(_))));
    }

    #[test]
    fn generate_tsp_shapes() {
        let t = generate_tsp(3, 3, 1.0, 1.0, true).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(t.w(i, j), 1.0);
                }
            }
        }
        let t = generate_tsp(5, 4, 1.0, 10.0, true).unwrap();
        assert_eq!(t.n, 4);
        assert!(t.is_symmetric());
        assert_eq!(t, generate_tsp(5, 4, 1.0, 10.0, true).unwrap());
        assert!(matches!(generate_tsp(5, 2, 1.0, 10.0, true), Err(Error::Parameter(_))));
    }

    #[test]
    fn feasibility_checks() {
        let inst = BppInstance::reference();
        let all_in_zero = BppAssignment::from_items(vec![0, 0, 0], 2);
        assert!(bpp_feasible(&inst, &all_in_zero).unwrap());

        let heavy = BppInstance::new(vec![60, 60], 2, 100).unwrap();
        assert!(!bpp_feasible(&heavy, &BppAssignment::from_items(vec![0, 0], 2)).unwrap());

        let inconsistent = BppAssignment {
            item_to_bin: vec![0, 0, 1],
            bins_used: vec![true, false],
        };
        assert!(!bpp_feasible(&inst, &inconsistent).unwrap());

        let wrong_dims = BppAssignment::from_items(vec![0, 0], 2);
        assert!(bpp_feasible(&inst, &wrong_dims).is_err());
    }

    #[test]
    fn bpp_oracle_examples() {
        let s = solve_bpp_bruteforce(&BppInstance::reference()).unwrap();
        assert_eq!(s.objective, 1.0);
        assert_eq!(s.enumerated_count, 8);
        let s = solve_bpp_bruteforce(&BppInstance::new(vec![60, 60], 2, 100).unwrap()).unwrap();
        assert_eq!(s.objective, 2.0);
        let s = solve_bpp_bruteforce(&BppInstance::new(vec![1], 1, 1).unwrap()).unwrap();
        assert_eq!(s.objective, 1.0);
    }

    #[test]
    fn bpp_oracle_respects_cap() {
        let inst = BppInstance::new(vec![1; 30], 4, 100).unwrap();
        assert!(matches!(solve_bpp_bruteforce(&inst), Err(Error::Size(_))));
    }

    #[test]
    fn tour_costs() {
        let t = TspInstance::uniform(3, 1.0).unwrap();
        assert_eq!(tsp_tour_cost(&t, &[0, 2, 1]).unwrap(), 3.0);
        let abs = TspInstance::new(
            (0..4)
                .map(|i: i32| (0..4).map(|j: i32| (i - j).abs() as f64).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(tsp_tour_cost(&abs, &[0, 1, 2, 3]).unwrap(), 6.0);
        assert!(tsp_tour_cost(&abs, &[0, 1, 1, 3]).is_err());
        assert!(tsp_tour_cost(&abs, &[0, 1, 2]).is_err());
    }

    #[test]
    fn tsp_oracle_uniform() {
        let s = solve_tsp_bruteforce(&TspInstance::uniform(3, 1.0).unwrap()).unwrap();
        assert_eq!(s.objective, 3.0);
        let s = solve_tsp_bruteforce(&TspInstance::uniform(4, 1.0).unwrap()).unwrap();
        assert_eq!(s.objective, 4.0);
        assert_eq!(s.enumerated_count, 6);
        match s.witness {
            Witness::Tsp(t) => assert_eq!(t.order[0], 0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn permutation_successor_walks_all_orders() {
        let mut v = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(v, vec![3, 2, 1, 0]);
    }

    #[test]
    fn instance_json_round_trip_and_rejects_unknown_fields() {
        let p = Problem::Bpp(BppInstance::reference());
        let back = Problem::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, back);
        let t = Problem::Tsp(generate_tsp(1, 4, 1.0, 5.0, false).unwrap());
        assert_eq!(t, Problem::from_json(&t.to_json().unwrap()).unwrap());

        let bad = r#"{"type":"bpp","seed":1,"n_items":1,"n_bins":1,"weights":[1],"capacity":1,"extra":2}"#;
        assert!(Problem::from_json(bad).is_err());
        let reordered = r#"{"capacity":1,"weights":[1],"n_bins":1,"type":"bpp","n_items":1,"seed":1}"#;
        assert!(Problem::from_json(reordered).is_ok());
        let mismatched = r#"{"type":"bpp","seed":1,"n_items":2,"n_bins":1,"weights":[1],"capacity":1}"#;
        assert!(Problem::from_json(mismatched).is_err());
    }
}
