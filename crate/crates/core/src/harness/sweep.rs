use std::io::{self, Write};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{generate, pulse_bound, verify_outcome, GeneratorSpec};
use crate::simulator::{run, Algorithm, NetworkState, RunConfig, Scheduler};

/// First line of every sweep CSV.
pub const CSV_HEADER_COMMENT: &str = "# pulseforge-sweep v1";

/// Salt mixed into the run seed to draw stabilizing IDs.
const ID_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Path,
    Star,
    CompleteBinary,
    RandomTree,
    RandomAsymmetric,
}

impl Family {
    /// `size` is a vertex count, or the radius for complete binary trees.
    pub fn spec(self, size: usize, seed: u64) -> GeneratorSpec {
        match self {
            Family::Path => GeneratorSpec::Path { n: size },
            Family::Star => GeneratorSpec::Star { n: size },
            Family::CompleteBinary => GeneratorSpec::CompleteBinary { radius: size },
            Family::RandomTree => GeneratorSpec::RandomTree { n: size, seed },
            Family::RandomAsymmetric => GeneratorSpec::RandomAsymmetricTree {
                n: size,
                seed,
                max_retries: 1000,
            },
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(Family::Path),
            "star" => Ok(Family::Star),
            "complete-binary" | "binary" => Ok(Family::CompleteBinary),
            "random" | "random-tree" => Ok(Family::RandomTree),
            "random-asymmetric" | "asymmetric" => Ok(Family::RandomAsymmetric),
            other => Err(format!(
                "unknown generator `{other}` (expected path, star, complete-binary, random-tree or random-asymmetric)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub algorithm: Algorithm,
    /// Number of seeds per size, starting at `base_seed`.
    pub seeds: u64,
    pub base_seed: u64,
    pub budget: u64,
    /// Adds a wall-time column, which makes output irreproducible.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(skip)]
    pub spec: GeneratorSpec,
    pub generator: String,
    pub n: usize,
    pub diameter: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub status: String,
    pub leader_ok: bool,
    pub pulses: u64,
    pub bound: u64,
    pub bound_ok: bool,
    pub checks_ok: bool,
    pub wall_time_us: Option<u128>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<SweepRow>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.checks_ok)
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.checks_ok).count()
    }

    pub fn write_csv<W: Write>(&self, mut out: W, timing: bool) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER_COMMENT}")?;
        let mut csv = csv::Writer::from_writer(out);
        let mut header = vec![
            "generator",
            "n",
            "diameter",
            "algorithm",
            "seed",
            "status",
            "leader_ok",
            "pulses",
            "bound",
            "bound_ok",
            "checks_ok",
        ];
        if timing {
            header.push("wall_time_us");
        }
        csv.write_record(&header)?;
        for r in &self.rows {
            let mut record = vec![
                r.generator.clone(),
                r.n.to_string(),
                r.diameter.to_string(),
                r.algorithm.to_string(),
                r.seed.to_string(),
                r.status.clone(),
                r.leader_ok.to_string(),
                r.pulses.to_string(),
                r.bound.to_string(),
                r.bound_ok.to_string(),
                r.checks_ok.to_string(),
            ];
            if timing {
                record.push(r.wall_time_us.map_or(String::new(), |t| t.to_string()));
            }
            csv.write_record(&record)?;
        }
        csv.flush()
    }
}

/// IDs 1..=n in an order drawn from `seed`.
pub fn seeded_ids(n: usize, seed: u64) -> Vec<u32> {
    let mut ids: Vec<u32> = (1..=n as u32).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ ID_SEED_SALT));
    ids
}

fn failed_row(spec: GeneratorSpec, algorithm: Algorithm, seed: u64, status: String) -> SweepRow {
    SweepRow {
        spec,
        generator: spec.description(),
        n: 0,
        diameter: 0,
        algorithm,
        seed,
        status,
        leader_ok: false,
        pulses: 0,
        bound: 0,
        bound_ok: false,
        checks_ok: false,
        wall_time_us: None,
    }
}

fn run_instance(spec: GeneratorSpec, config: &SweepConfig, seed: u64) -> SweepRow {
    let algorithm = config.algorithm;
    let tree = match generate(spec) {
        Ok(t) => t,
        Err(e) => return failed_row(spec, algorithm, seed, format!("error: {e}")),
    };
    let ids = (algorithm == Algorithm::Stabilizing).then(|| seeded_ids(tree.len(), seed));
    let state = match NetworkState::new(tree.clone(), algorithm, ids.clone()) {
        Ok(s) => s,
        Err(e) => {
            let mut row = failed_row(spec, algorithm, seed, format!("error: {e}"));
            row.n = tree.len();
            row.diameter = tree.diameter();
            return row;
        }
    };
    let started = Instant::now();
    let outcome = run(
        state,
        &mut Scheduler::seeded(seed),
        RunConfig {
            budget: config.budget,
            record_trace: algorithm != Algorithm::Stabilizing,
        },
    );
    let elapsed = started.elapsed().as_micros();
    let report = verify_outcome(&outcome, &tree);
    let leader_check = if algorithm == Algorithm::Stabilizing {
        "unique_leader"
    } else {
        "oracle_leader"
    };
    let bound = pulse_bound(&tree, algorithm, ids.as_deref());
    SweepRow {
        spec,
        generator: spec.description(),
        n: tree.len(),
        diameter: tree.diameter(),
        algorithm,
        seed,
        status: outcome.status.as_str().to_string(),
        leader_ok: report.get(leader_check).is_some_and(|c| c.passed),
        pulses: outcome.total_pulses(),
        bound,
        bound_ok: outcome.total_pulses() <= bound,
        checks_ok: report.passed(),
        wall_time_us: config.timing.then_some(elapsed),
    }
}

/// Runs every (size, seed) instance in parallel and returns rows in a
/// fixed order independent of thread scheduling.
pub fn sweep(config: &SweepConfig) -> ExperimentReport {
    let jobs: Vec<(usize, u64)> = config
        .sizes
        .iter()
        .flat_map(|&size| (0..config.seeds).map(move |i| (size, config.base_seed.wrapping_add(i))))
        .collect();
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(size, seed)| run_instance(config.family.spec(size, seed), config, seed))
        .collect();
    rows.sort_by_key(|r| (r.spec, r.seed));
    ExperimentReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(family: Family, sizes: Vec<usize>, algorithm: Algorithm) -> SweepConfig {
        SweepConfig {
            family,
            sizes,
            algorithm,
            seeds: 5,
            base_seed: 0,
            budget: 100_000,
            timing: false,
        }
    }

    #[test]
    fn binary_even_sweep_passes() {
        let r = sweep(&config(
            Family::CompleteBinary,
            vec![1, 2, 3],
            Algorithm::EvenDiameter,
        ));
        assert_eq!(r.rows.len(), 15);
        assert!(r.passed());
        assert!(r.rows.iter().all(|row| row.bound_ok && row.leader_ok));
    }

    #[test]
    fn csv_is_reproducible() {
        let c = config(Family::RandomAsymmetric, vec![6, 9], Algorithm::GeneralTree);
        let render = || {
            let mut buf = Vec::new();
            sweep(&c).write_csv(&mut buf, false).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render();
        assert_eq!(a, render());
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER_COMMENT));
        assert_eq!(
            lines.next(),
            Some("generator,n,diameter,algorithm,seed,status,leader_ok,pulses,bound,bound_ok,checks_ok")
        );
        assert_eq!(lines.count(), 10);
    }

    #[test]
    fn stabilizing_ids_are_a_permutation() {
        let mut ids = seeded_ids(9, 4);
        assert_eq!(ids, seeded_ids(9, 4));
        ids.sort_unstable();
        assert_eq!(ids, (1..=9).collect::<Vec<_>>());
        let r = sweep(&config(
            Family::RandomTree,
            vec![2, 7],
            Algorithm::Stabilizing,
        ));
        assert!(r.passed(), "{:?}", r.rows.iter().find(|r| !r.checks_ok));
        assert!(r.rows.iter().all(|row| row.bound == 3 * row.n as u64 - 1));
    }

    #[test]
    fn inapplicable_instances_fail_their_row() {
        let r = sweep(&config(Family::Path, vec![4], Algorithm::EvenDiameter));
        assert!(!r.passed());
        assert!(r.rows[0].status.starts_with("error"));
    }
}
