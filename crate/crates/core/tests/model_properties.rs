mod common;

use std::collections::BTreeSet;

use common::*;
use noodle_core::{Assignment, ConstraintId, ConstraintKind, Model};
use proptest::prelude::*;

fn ring(n: usize) -> Model {
    Model::successor_tsp("ring", vec![vec![1.0; n]; n]).unwrap()
}

fn all_diff_model(n: usize) -> Model {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    Model::from_json_value(serde_json::json!({
        "name": "ad",
        "variables": names.iter().map(|v| serde_json::json!({"name": v, "domain": {"lo": 1, "hi": n}})).collect::<Vec<_>>(),
        "groups": {"g": names},
        "constraints": [{"kind": "all_different", "scope": "g"}]
    }))
    .unwrap()
}

/// Follow relation_pairs as a graph from the first scope variable.
fn pairs_form_one_cycle(pairs: &[(noodle_core::VarId, noodle_core::VarId)], n: usize) -> bool {
    if pairs.len() != n {
        return false;
    }
    let mut next = vec![None; n];
    for &(a, b) in pairs {
        if next[a.index()].replace(b.index()).is_some() {
            return false;
        }
    }
    let mut cur = 0;
    let mut seen = BTreeSet::new();
    for _ in 0..n {
        if !seen.insert(cur) {
            return false;
        }
        match next[cur] {
            Some(c) => cur = c,
            None => return false,
        }
    }
    cur == 0
}

fn successor_values() -> impl Strategy<Value = Vec<i64>> {
    (1usize..=8).prop_flat_map(|n| {
        prop_oneof![
            proptest::collection::vec(1..=n as i64, n),
            Just((1..=n as i64).collect::<Vec<_>>()).prop_shuffle(),
            Just((0..n).collect::<Vec<usize>>())
                .prop_shuffle()
                .prop_map(|order| succ_from_order(&order)),
        ]
    })
}

proptest! {
    #[test]
    fn circuit_check_matches_brute_force(values in successor_values()) {
        let m = ring(values.len());
        let a = Assignment::new(values.clone());
        let holds = m.check(ConstraintId(0), &a).unwrap();
        prop_assert_eq!(holds, is_single_cycle(&values));
        let pairs = m.relation_pairs(ConstraintId(0), &a).unwrap();
        prop_assert_eq!(holds, pairs_form_one_cycle(&pairs, values.len()));
    }

    #[test]
    fn zero_violations_iff_every_check_holds(values in proptest::collection::vec(1i64..=3, 5)) {
        let m = Model::graph_coloring("c5", 5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3)], 3).unwrap();
        let a = Assignment::new(values);
        let all = (0..m.constraints.len()).all(|i| m.check(ConstraintId(i), &a).unwrap());
        prop_assert_eq!(m.violations(&a).total() == 0, all);
    }

    #[test]
    fn all_different_pairs_are_symmetric(values in proptest::collection::vec(1i64..=4, 4)) {
        let m = all_diff_model(4);
        let pairs = m.relation_pairs(ConstraintId(0), &Assignment::new(values)).unwrap();
        let set: BTreeSet<_> = pairs.iter().copied().collect();
        for (a, b) in &pairs {
            prop_assert!(set.contains(&(*b, *a)));
        }
    }

    #[test]
    fn seed_assignment_is_pure(seed in any::<u64>()) {
        let m = tsp6();
        let a = m.seed_assignment(seed).unwrap();
        prop_assert_eq!(&a, &m.seed_assignment(seed).unwrap());
        prop_assert!(m.violations(&a).is_feasible());
    }
}

#[test]
fn four_city_objective_matches_enumeration() {
    let m = tsp4();
    let matrix = match &m.objective {
        noodle_core::model::Objective::NextCost { matrix } => matrix.clone(),
        _ => unreachable!(),
    };
    let tours = all_tours(4);
    // 3 undirected tours, each in both orientations
    assert_eq!(tours.iter().map(|t| undirected(t)).collect::<BTreeSet<_>>().len(), 3);
    let best = tours
        .iter()
        .map(|t| tour_cost(&matrix, t))
        .fold(f64::INFINITY, f64::min);
    assert_eq!(best, 4.0);
    for t in &tours {
        assert_eq!(m.objective(&assignment(t)), tour_cost(&matrix, t));
    }
    assert_eq!(m.objective(&assignment(&[2, 3, 4, 1])), 4.0);
    assert_eq!(m.objective(&assignment(&[3, 4, 2, 1])), 6.0);
}

#[test]
fn next_cost_is_invariant_under_consistent_relabeling() {
    let m = tsp4();
    let matrix = match &m.objective {
        noodle_core::model::Objective::NextCost { matrix } => matrix.clone(),
        _ => unreachable!(),
    };
    let perm = [2usize, 0, 3, 1];
    let relabeled: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| matrix[perm[i]][perm[j]]).collect())
        .collect();
    let m2 = Model::successor_tsp("relabeled", relabeled).unwrap();
    let mut inv = [0usize; 4];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    for t in all_tours(4) {
        // city c of the original is city inv[c] of the relabeled instance
        let mut moved = vec![0i64; 4];
        for c in 0..4 {
            moved[inv[c]] = inv[(t[c] - 1) as usize] as i64 + 1;
        }
        assert_eq!(m.objective(&assignment(&t)), m2.objective(&assignment(&moved)));
    }
}

fn greedy_colors(order: &[usize], edges: &[(usize, usize)]) -> usize {
    let mut color = [0usize; 5];
    for &v in order {
        let taken: BTreeSet<usize> = edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .map(|u| color[u])
            .collect();
        color[v] = (1..).find(|c| !taken.contains(c)).unwrap();
    }
    color.iter().collect::<BTreeSet<_>>().len()
}

#[test]
fn greedy_on_a_path_needs_two_colors_in_connected_orders() {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4)];
    let mut orders = Vec::new();
    let mut p = vec![0, 1, 2, 3, 4];
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k.is_multiple_of(2) {
                p.swap(i, k - 1)
            } else {
                p.swap(0, k - 1)
            }
        }
    }
    heap(5, &mut p, &mut orders);
    assert_eq!(orders.len(), 120);
    let connected = |o: &Vec<usize>| {
        o.iter()
            .enumerate()
            .skip(1)
            .all(|(i, v)| o[..i].iter().any(|u| u.abs_diff(*v) == 1))
    };
    // arbitrary orders can need a third color (e.g. 0, 3, 1, 2, 4) ...
    assert!(orders.iter().any(|o| greedy_colors(o, &edges) == 3));
    // ... orders that grow a connected region never do
    let conn: Vec<_> = orders.iter().filter(|o| connected(o)).collect();
    assert_eq!(conn.len(), 16);
    assert!(conn.iter().all(|o| greedy_colors(o, &edges) <= 2));

    let path = Model::graph_coloring("path5", 5, &[(1, 2), (2, 3), (3, 4), (4, 5)], 5).unwrap();
    for seed in 0..200 {
        let a = path.seed_assignment(seed).unwrap();
        assert!(path.is_feasible(&a));
        assert!(path.objective(&a) <= 2.0, "seed {seed}: {a:?}");
    }
}

#[test]
fn violations_report_every_present_kind() {
    let m = Model::from_json_value(serde_json::json!({
        "name": "mixed",
        "variables": [
            {"name": "a", "domain": {"lo": 1, "hi": 3}},
            {"name": "b", "domain": {"lo": 1, "hi": 3}},
            {"name": "c", "domain": {"lo": 1, "hi": 3}}
        ],
        "groups": {"g": ["a", "b", "c"]},
        "constraints": [
            {"kind": "circuit", "scope": "g"},
            {"kind": "all_different", "scope": "g"},
            {"kind": "not_equal", "scope": ["a", "b"]}
        ],
        "structural": 0
    }))
    .unwrap();
    let v = m.violations(&assignment(&[2, 3, 1]));
    assert_eq!(v.0.keys().copied().collect::<Vec<_>>(), ConstraintKind::ALL.to_vec());
    assert!(v.is_feasible());
    let v = m.violations(&assignment(&[1, 1, 1]));
    assert_eq!(
        (
            v.get(ConstraintKind::Circuit),
            v.get(ConstraintKind::AllDifferent),
            v.get(ConstraintKind::NotEqual)
        ),
        (1, 1, 1)
    );
    let seeded = m.seed_assignment(3).unwrap();
    assert!(m.is_feasible(&seeded));
}
