//! Independent oracles for integration and acceptance tests. Nothing here
//! goes through the NDL interpreter.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use noodle_core::{Assignment, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_OPT: &str = include_str!("../../examples/two_opt.ndl");
pub const LISTING: &str = include_str!("../../examples/listing1.ndl");
pub const SINGLE_SWAP: &str = include_str!("../../examples/single_swap.ndl");
pub const TSP4: &str = include_str!("../../examples/tsp4.json");
pub const TSP6: &str = include_str!("../../examples/tsp6.json");

pub fn tsp4() -> Model {
    Model::from_json_str(TSP4).unwrap()
}

pub fn tsp6() -> Model {
    Model::from_json_str(TSP6).unwrap()
}

/// Brute force: follow successors from every position and demand one cycle
/// of length n through all of them.
pub fn is_single_cycle(values: &[i64]) -> bool {
    let n = values.len();
    if values.iter().any(|&v| v < 1 || v > n as i64) {
        return false;
    }
    (0..n).all(|s| {
        let mut seen = HashSet::new();
        let mut cur = s;
        for _ in 0..n {
            seen.insert(cur);
            cur = (values[cur] - 1) as usize;
        }
        cur == s && seen.len() == n
    })
}

/// City order starting at city 0.
pub fn tour_order(succ: &[i64]) -> Vec<usize> {
    let mut order = vec![0];
    let mut cur = (succ[0] - 1) as usize;
    while cur != 0 {
        order.push(cur);
        cur = (succ[cur] - 1) as usize;
    }
    order
}

pub fn succ_from_order(order: &[usize]) -> Vec<i64> {
    let n = order.len();
    let mut succ = vec![0; n];
    for i in 0..n {
        succ[order[i]] = order[(i + 1) % n] as i64 + 1;
    }
    succ
}

/// Orientation-free identity of a tour: its undirected edge set.
pub fn undirected(succ: &[i64]) -> BTreeSet<(usize, usize)> {
    succ.iter()
        .enumerate()
        .map(|(i, &v)| {
            let j = (v - 1) as usize;
            (i.min(j), i.max(j))
        })
        .collect()
}

/// Classic array 2-opt with city 0 pinned first: reverse positions i..=j,
/// 1 <= i < j <= n-1, skipping the full reversal (same undirected tour).
pub fn two_opt_oracle(succ: &[i64]) -> Vec<Vec<i64>> {
    let order = tour_order(succ);
    let n = order.len();
    let mut out = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            if i == 1 && j == n - 1 {
                continue;
            }
            let mut o = order.clone();
            o[i..=j].reverse();
            out.push(succ_from_order(&o));
        }
    }
    out
}

/// All 3 undirected tours of 4 cities (city 0 first, orientation fixed).
pub fn all_tours(n: usize) -> Vec<Vec<i64>> {
    fn permute(rest: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == rest.len() {
            out.push(rest.clone());
            return;
        }
        for i in k..rest.len() {
            rest.swap(k, i);
            permute(rest, k + 1, out);
            rest.swap(k, i);
        }
    }
    let mut perms = Vec::new();
    permute(&mut (1..n).collect(), 0, &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut order = vec![0];
            order.extend(p);
            succ_from_order(&order)
        })
        .collect()
}

pub fn tour_cost(matrix: &[Vec<f64>], succ: &[i64]) -> f64 {
    succ.iter().enumerate().map(|(i, &v)| matrix[i][(v - 1) as usize]).sum()
}

/// Greedy nearest-neighbor tour from city 0.
pub fn nearest_neighbor(matrix: &[Vec<f64>]) -> Vec<i64> {
    let n = matrix.len();
    let mut order = vec![0];
    let mut used = vec![false; n];
    used[0] = true;
    while order.len() < n {
        let last = *order.last().unwrap();
        let next = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| matrix[last][a].partial_cmp(&matrix[last][b]).unwrap())
            .unwrap();
        used[next] = true;
        order.push(next);
    }
    succ_from_order(&order)
}

/// Every 2-opt local optimum reachable from `start` along strictly improving
/// 2-opt moves, with its cost.
pub fn reachable_two_opt_optima(matrix: &[Vec<f64>], start: &[i64]) -> Vec<(BTreeSet<(usize, usize)>, f64)> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([start.to_vec()]);
    let mut optima = Vec::new();
    while let Some(t) = queue.pop_front() {
        if !seen.insert(undirected(&t)) {
            continue;
        }
        let cost = tour_cost(matrix, &t);
        let better: Vec<_> = two_opt_oracle(&t)
            .into_iter()
            .filter(|n| tour_cost(matrix, n) < cost - 1e-9)
            .collect();
        if better.is_empty() {
            optima.push((undirected(&t), cost));
        }
        queue.extend(better);
    }
    optima
}

/// Uniform points in a 100x100 square, Euclidean distances.
pub fn random_metric_matrix(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect();
    pts.iter()
        .map(|a| {
            pts.iter()
                .map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                .collect()
        })
        .collect()
}

pub fn assignment(values: &[i64]) -> Assignment {
    Assignment::new(values.to_vec())
}
