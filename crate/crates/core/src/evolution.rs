//! Fitness of candidate operators and the grammatical-evolution loop.
//!
//! A candidate is scored on a handful of feasible sample assignments. Its
//! fitness is lexicographic: tier first, then the number of constraint kinds
//! that no generated neighbor violates, then the smallest per-sample count of
//! feasible neighbors, then (inverted) program size.

use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{derive_grammar, map_genome, Genome, Grammar, MapParams, MappingOutcome};
use crate::model::{Assignment, Model, ModelError};
use crate::ndl::{analyze, neighbors, optimize, Limits, Program};

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tier {
    StaticReject,
    Barren,
    Valid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fitness {
    pub tier: Tier,
    /// Constraint kinds no inspected neighbor violates.
    pub preserved: usize,
    /// Minimum over samples of the feasible-neighbor count.
    pub productivity: usize,
    /// Atom count of the optimized program.
    pub size: usize,
    /// Distinct neighbors inspected, summed over samples.
    pub neighbors: usize,
    /// Feasible neighbors inspected, summed over samples.
    pub feasible: usize,
    pub truncated: bool,
    pub fuel_used: u64,
}

impl Fitness {
    fn rejected(size: usize) -> Self {
        Fitness {
            tier: Tier::StaticReject,
            preserved: 0,
            productivity: 0,
            size,
            neighbors: 0,
            feasible: 0,
            truncated: false,
            fuel_used: 0,
        }
    }

    fn key(&self) -> (Tier, usize, usize, Reverse<usize>) {
        (self.tier, self.preserved, self.productivity, Reverse(self.size))
    }

    /// Ranking order; `Greater` is fitter. Diagnostics do not participate.
    pub fn rank_cmp(&self, other: &Fitness) -> Ordering {
        self.key().cmp(&other.key())
    }

    pub fn better_than(&self, other: &Fitness) -> bool {
        self.rank_cmp(other) == Ordering::Greater
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSettings {
    /// Neighbors inspected per sample.
    pub inspection_cap: usize,
    /// Interpreter fuel per sample.
    pub fuel: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            inspection_cap: 500,
            fuel: 100_000,
        }
    }
}

/// Score a program on feasible `samples`.
pub fn evaluate_program(program: &Program, model: &Model, samples: &[Assignment], settings: EvalSettings) -> Fitness {
    let optimized = optimize(program);
    let size = optimized.atom_count();
    if !analyze(program, model).is_ok() {
        return Fitness::rejected(size);
    }
    let kinds = model.kinds();
    let mut violated = vec![false; kinds.len()];
    let mut fitness = Fitness {
        tier: Tier::Valid,
        preserved: 0,
        productivity: usize::MAX,
        size,
        neighbors: 0,
        feasible: 0,
        truncated: false,
        fuel_used: 0,
    };
    let limits = Limits {
        fuel: settings.fuel,
        cap: settings.inspection_cap,
    };
    for sample in samples {
        let set = neighbors(&optimized, model, sample, limits);
        fitness.fuel_used += set.fuel_used;
        fitness.truncated |= set.truncated;
        fitness.neighbors += set.len();
        if set.is_empty() {
            fitness.tier = Tier::Barren;
        }
        let mut feasible = 0;
        for member in &set.members {
            let viol = model.violations(member);
            if viol.is_feasible() {
                feasible += 1;
            }
            for (flag, kind) in violated.iter_mut().zip(&kinds) {
                *flag |= viol.get(*kind) > 0;
            }
        }
        fitness.feasible += feasible;
        fitness.productivity = fitness.productivity.min(feasible.min(settings.inspection_cap));
    }
    if samples.is_empty() {
        fitness.productivity = 0;
    }
    fitness.preserved = violated.iter().filter(|v| !**v).count();
    fitness
}

/// Score a mapping outcome; invalid mappings are rejected without running.
pub fn evaluate_fitness(
    outcome: &MappingOutcome,
    model: &Model,
    samples: &[Assignment],
    settings: EvalSettings,
) -> Fitness {
    match outcome {
        MappingOutcome::Mapped { program, .. } => evaluate_program(program, model, samples, settings),
        MappingOutcome::Invalid(_) => Fitness::rejected(0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub samples: usize,
    pub inspection_cap: usize,
    pub fuel: u64,
    pub genome_len: usize,
    pub wrap_limit: usize,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        let eval = EvalSettings::default();
        let map = MapParams::default();
        EvolutionConfig {
            population: 200,
            generations: 100,
            tournament: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.05,
            elitism: 1,
            samples: 5,
            inspection_cap: eval.inspection_cap,
            fuel: eval.fuel,
            genome_len: crate::grammar::DEFAULT_GENOME_LEN,
            wrap_limit: map.wrap_limit,
            max_depth: map.max_depth,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(EvolutionError::Config(format!("{name} must lie in [0, 1], got {rate}")));
            }
        }
        for (name, size) in [
            ("population", self.population),
            ("tournament", self.tournament),
            ("elitism", self.elitism),
            ("samples", self.samples),
            ("inspection_cap", self.inspection_cap),
            ("genome_len", self.genome_len),
        ] {
            if size == 0 {
                return Err(EvolutionError::Config(format!("{name} must be at least 1")));
            }
        }
        if self.elitism > self.population {
            return Err(EvolutionError::Config("elitism exceeds population".into()));
        }
        Ok(())
    }

    fn eval_settings(&self) -> EvalSettings {
        EvalSettings {
            inspection_cap: self.inspection_cap,
            fuel: self.fuel,
        }
    }

    fn map_params(&self) -> MapParams {
        MapParams {
            wrap_limit: self.wrap_limit,
            max_depth: self.max_depth,
        }
    }
}

/// Single-point crossover with probability `crossover_rate`, then uniform
/// per-codon resampling with probability `mutation_rate`.
pub fn vary(a: &Genome, b: &Genome, crossover_rate: f64, mutation_rate: f64, rng: &mut impl Rng) -> (Genome, Genome) {
    assert_eq!(a.len(), b.len(), "parents must have equal length");
    let (mut c1, mut c2) = (a.clone(), b.clone());
    if rng.gen::<f64>() < crossover_rate && a.len() >= 2 {
        let point = rng.gen_range(1..a.len());
        c1.codons[point..].swap_with_slice(&mut c2.codons[point..]);
    }
    for child in [&mut c1, &mut c2] {
        for codon in child.codons.iter_mut() {
            if rng.gen::<f64>() < mutation_rate {
                *codon = rng.gen();
            }
        }
    }
    (c1, c2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Individual {
    pub program: Option<String>,
    pub genome: Genome,
    pub fitness: Fitness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationBest {
    pub fitness: Fitness,
    pub program: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: GenerationBest,
    pub mean_preserved: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionReport {
    pub config: EvolutionConfig,
    pub generations: Vec<GenerationStats>,
    /// Best individual over the whole run.
    pub best: Individual,
    pub sample_seeds: Vec<u64>,
    #[serde(skip)]
    pub wall_clock: Duration,
    /// Interpreter fuel spent evaluating the run; not serialized.
    #[serde(skip)]
    pub fuel_used: u64,
}

struct Evaluator<'a> {
    model: &'a Model,
    grammar: Grammar,
    samples: Vec<Assignment>,
    config: &'a EvolutionConfig,
    memo: HashMap<Genome, (Option<String>, Fitness)>,
    fuel_used: u64,
}

impl Evaluator<'_> {
    fn score(&self, genome: &Genome) -> (Option<String>, Fitness) {
        let outcome = map_genome(&self.grammar, genome, self.config.map_params());
        let fitness = evaluate_fitness(&outcome, self.model, &self.samples, self.config.eval_settings());
        let text = match outcome {
            MappingOutcome::Mapped { text, .. } => Some(text),
            MappingOutcome::Invalid(_) => None,
        };
        (text, fitness)
    }

    /// Fitness of every genome, in population order. Distinct genomes are
    /// evaluated once, in parallel; results do not depend on scheduling.
    fn evaluate(&mut self, population: &[Genome]) -> Vec<Fitness> {
        let mut fresh: Vec<&Genome> = Vec::new();
        let mut queued = std::collections::HashSet::new();
        for g in population {
            if !self.memo.contains_key(g) && queued.insert(g) {
                fresh.push(g);
            }
        }
        let scored: Vec<_> = fresh.par_iter().map(|g| ((*g).clone(), self.score(g))).collect();
        for (g, s) in scored {
            self.fuel_used += s.1.fuel_used;
            self.memo.insert(g, s);
        }
        population.iter().map(|g| self.memo[g].1.clone()).collect()
    }
}

fn best_index(fitness: &[Fitness]) -> usize {
    let mut best = 0;
    for (i, f) in fitness.iter().enumerate().skip(1) {
        if f.better_than(&fitness[best]) {
            best = i;
        }
    }
    best
}

fn tournament(fitness: &[Fitness], size: usize, rng: &mut impl Rng) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size {
        let i = rng.gen_range(0..fitness.len());
        if fitness[i].better_than(&fitness[best]) {
            best = i;
        }
    }
    best
}

/// Run grammatical evolution. The report depends only on `(model, config)`.
pub fn evolve(model: &Model, config: &EvolutionConfig) -> Result<EvolutionReport, EvolutionError> {
    config.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sample_seeds: Vec<u64> = (0..config.samples).map(|_| rng.gen()).collect();
    let samples = sample_seeds
        .iter()
        .map(|&s| model.seed_assignment(s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut eval = Evaluator {
        model,
        grammar: derive_grammar(model, model.budget),
        samples,
        config,
        memo: HashMap::new(),
        fuel_used: 0,
    };

    let mut population: Vec<Genome> = (0..config.population)
        .map(|_| Genome::random(config.genome_len, &mut rng))
        .collect();
    let mut generations = Vec::with_capacity(config.generations + 1);
    let mut best: Option<Individual> = None;

    for generation in 0..=config.generations {
        let fitness = eval.evaluate(&population);
        let top = best_index(&fitness);
        let program = eval.memo[&population[top]].0.clone();
        generations.push(GenerationStats {
            generation,
            best: GenerationBest {
                fitness: fitness[top].clone(),
                program: program.clone(),
            },
            mean_preserved: fitness.iter().map(|f| f.preserved as f64).sum::<f64>() / fitness.len() as f64,
        });
        if best.as_ref().is_none_or(|b| fitness[top].better_than(&b.fitness)) {
            best = Some(Individual {
                program,
                genome: population[top].clone(),
                fitness: fitness[top].clone(),
            });
        }
        if generation == config.generations {
            break;
        }

        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[b].rank_cmp(&fitness[a]).then(a.cmp(&b)));
        let mut next: Vec<Genome> = order[..config.elitism].iter().map(|&i| population[i].clone()).collect();
        while next.len() < config.population {
            let a = tournament(&fitness, config.tournament, &mut rng);
            let b = tournament(&fitness, config.tournament, &mut rng);
            let (c1, c2) = vary(
                &population[a],
                &population[b],
                config.crossover_rate,
                config.mutation_rate,
                &mut rng,
            );
            next.push(c1);
            if next.len() < config.population {
                next.push(c2);
            }
        }
        population = next;
    }

    Ok(EvolutionReport {
        config: *config,
        generations,
        best: best.expect("at least one generation is evaluated"),
        sample_seeds,
        wall_clock: started.elapsed(),
        fuel_used: eval.fuel_used,
    })
}
