//! First-improvement hill climbing with random restarts, using an NDL
//! program as the move generator. Infeasible neighbors are filtered here,
//! not in the interpreter.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{Assignment, Model, ModelError};
use crate::ndl::{neighbors, Limits, Program};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("start assignment is infeasible")]
    InfeasibleStart,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_steps: usize,
    pub limits: Limits,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 10,
            max_steps: 10_000,
            limits: Limits::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Climb {
    pub assignment: Assignment,
    pub objective: f64,
    /// Accepted moves.
    pub steps: usize,
    pub neighbors_generated: usize,
    /// No improving feasible neighbor was left when the climb stopped.
    pub local_optimum: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: u64,
    pub steps: usize,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best: Assignment,
    pub best_objective: f64,
    pub traces: Vec<RestartTrace>,
    pub neighbors_generated: usize,
}

fn require_feasible(model: &Model, assignment: &Assignment) -> Result<(), SearchError> {
    model.validate_assignment(assignment)?;
    if !model.is_feasible(assignment) {
        return Err(SearchError::InfeasibleStart);
    }
    Ok(())
}

pub fn hill_climb(
    model: &Model,
    program: &Program,
    start: &Assignment,
    config: &SearchConfig,
    rng: &mut impl Rng,
) -> Result<Climb, SearchError> {
    hill_climb_observed(model, program, start, config, rng, |_, _| {})
}

/// [`hill_climb`], calling `on_move` with every accepted assignment and its
/// objective.
pub fn hill_climb_observed(
    model: &Model,
    program: &Program,
    start: &Assignment,
    config: &SearchConfig,
    rng: &mut impl Rng,
    mut on_move: impl FnMut(&Assignment, f64),
) -> Result<Climb, SearchError> {
    require_feasible(model, start)?;
    let mut current = start.clone();
    let mut cost = model.objective(&current);
    let mut climb = Climb {
        assignment: current.clone(),
        objective: cost,
        steps: 0,
        neighbors_generated: 0,
        local_optimum: false,
    };
    while climb.steps < config.max_steps {
        let mut candidates = neighbors(program, model, &current, config.limits).members;
        climb.neighbors_generated += candidates.len();
        candidates.shuffle(rng);
        let improving = candidates.into_iter().find_map(|c| {
            if !model.is_feasible(&c) {
                return None;
            }
            let c_cost = model.objective(&c);
            (c_cost < cost).then_some((c, c_cost))
        });
        match improving {
            Some((next, next_cost)) => {
                on_move(&next, next_cost);
                current = next;
                cost = next_cost;
                climb.steps += 1;
            }
            None => {
                climb.local_optimum = true;
                break;
            }
        }
    }
    climb.assignment = current;
    climb.objective = cost;
    Ok(climb)
}

/// True iff no feasible neighbor has strictly lower objective.
pub fn is_local_optimum(
    model: &Model,
    program: &Program,
    assignment: &Assignment,
    limits: Limits,
) -> Result<bool, SearchError> {
    require_feasible(model, assignment)?;
    let cost = model.objective(assignment);
    Ok(!neighbors(program, model, assignment, limits)
        .members
        .iter()
        .any(|c| model.is_feasible(c) && model.objective(c) < cost))
}

/// Independent climbs from seeded starts. Restart `i` draws its seeds from
/// the same stream position whatever the restart count, so adding restarts
/// never worsens the result.
pub fn solve(model: &Model, program: &Program, config: &SearchConfig) -> Result<SearchResult, SearchError> {
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<(u64, u64)> = (0..config.restarts).map(|_| (master.gen(), master.gen())).collect();
    let climbs = seeds
        .par_iter()
        .map(|&(start_seed, climb_seed)| {
            let start = model.seed_assignment(start_seed)?;
            hill_climb(
                model,
                program,
                &start,
                config,
                &mut ChaCha8Rng::seed_from_u64(climb_seed),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut result = SearchResult {
        best: model.seed_assignment(seeds.first().map_or(config.seed, |s| s.0))?,
        best_objective: f64::INFINITY,
        traces: Vec::with_capacity(climbs.len()),
        neighbors_generated: 0,
    };
    for (restart, (climb, &(seed, _))) in climbs.into_iter().zip(&seeds).enumerate() {
        result.traces.push(RestartTrace {
            restart,
            seed,
            steps: climb.steps,
            objective: climb.objective,
        });
        result.neighbors_generated += climb.neighbors_generated;
        if climb.objective < result.best_objective {
            result.best_objective = climb.objective;
            result.best = climb.assignment;
        }
    }
    if config.restarts == 0 {
        result.best_objective = model.objective(&result.best);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndl::parse;

    const TWO_OPT: &str =
        "constraint(circuit, t0, t1), iterate(t2 - t3, t1, (swap_values(t0, t1), swap_values(t1, t3)))";

    fn square() -> Model {
        let m = vec![
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![1.0, 2.0, 1.0, 0.0],
        ];
        Model::successor_tsp("square", m).unwrap()
    }

    #[test]
    fn two_opt_fixes_the_crossed_tour() {
        let m = square();
        let p = parse(TWO_OPT).unwrap();
        let start = Assignment::new(vec![3, 4, 2, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let climb = hill_climb(&m, &p, &start, &SearchConfig::default(), &mut rng).unwrap();
        assert_eq!(climb.objective, 4.0);
        assert_eq!(climb.steps, 1);
        assert!(climb.local_optimum);
    }

    #[test]
    fn zero_steps_returns_start() {
        let m = square();
        let p = parse(TWO_OPT).unwrap();
        let start = Assignment::new(vec![3, 4, 2, 1]);
        let config = SearchConfig {
            max_steps: 0,
            ..Default::default()
        };
        let climb = hill_climb(&m, &p, &start, &config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(climb.assignment, start);
        assert_eq!(climb.steps, 0);
    }

    #[test]
    fn empty_neighborhood() {
        let m = square();
        // all_different conflicts never exist on a tour
        let p =
            parse("constraint(all_diff_next, t0, t1), constraint(all_diff_next, t1, t0), swap_values(t0, t1)").unwrap();
        let start = Assignment::new(vec![3, 4, 2, 1]);
        let climb = hill_climb(
            &m,
            &p,
            &start,
            &SearchConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!((climb.assignment.clone(), climb.steps), (start.clone(), 0));
        assert!(is_local_optimum(&m, &p, &start, Limits::default()).unwrap());
    }

    #[test]
    fn local_optimum_checks() {
        let m = square();
        let p = parse(TWO_OPT).unwrap();
        assert!(is_local_optimum(&m, &p, &Assignment::new(vec![2, 3, 4, 1]), Limits::default()).unwrap());
        assert!(!is_local_optimum(&m, &p, &Assignment::new(vec![3, 4, 2, 1]), Limits::default()).unwrap());
    }

    #[test]
    fn infeasible_start_is_an_error() {
        let m = square();
        let p = parse(TWO_OPT).unwrap();
        let bad = Assignment::new(vec![2, 1, 4, 3]);
        assert!(matches!(
            hill_climb(
                &m,
                &p,
                &bad,
                &SearchConfig::default(),
                &mut ChaCha8Rng::seed_from_u64(0)
            ),
            Err(SearchError::InfeasibleStart)
        ));
        assert!(is_local_optimum(&m, &p, &bad, Limits::default()).is_err());
    }

    #[test]
    fn solve_is_deterministic_and_prefix_monotone() {
        let m = square();
        let p = parse(TWO_OPT).unwrap();
        let c5 = SearchConfig {
            restarts: 5,
            seed: 11,
            ..Default::default()
        };
        let c10 = SearchConfig { restarts: 10, ..c5 };
        assert_eq!(solve(&m, &p, &c5).unwrap(), solve(&m, &p, &c5).unwrap());
        let r5 = solve(&m, &p, &c5).unwrap();
        let r10 = solve(&m, &p, &c10).unwrap();
        assert_eq!(r5.traces[..], r10.traces[..5]);
        assert!(r10.best_objective <= r5.best_objective);
    }
}
