//! Benchmark fixtures shared by the criterion benches.

use noodle_core::Model;

/// Points on a circle of radius 100, in a scrambled order, as a TSP model.
pub fn circle_tsp(n: usize) -> Model {
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let k = (i * 7) % n;
            let angle = std::f64::consts::TAU * k as f64 / n as f64;
            (100.0 * angle.cos(), 100.0 * angle.sin())
        })
        .collect();
    let matrix = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                .collect()
        })
        .collect();
    Model::successor_tsp(&format!("circle{n}"), matrix).expect("valid model")
}

pub const TWO_OPT: &str =
    "constraint(all_diff_next, t0, t1), iterate(t2 - t3, t1, (swap_values(t0, t1), swap_values(t1, t3)))";
