//! Wall-clock comparison of the kernels on seeded uniform data.

use std::io::Write;
use std::time::Instant;

use crate::boxcount::{Algorithm, OpCounters};
use crate::dataset::NormalizedDataset;
use crate::error::Result;
use crate::generators::gen_uniform;
use crate::grid::RadiusSchedule;

pub const CSV_HEADER: &str =
    "algo,n,dim,levels,rep,wall_ms,point_updates,merge_updates,scans,updates_per_point";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub algos: Vec<Algorithm>,
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub levels: Vec<u32>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algos: vec![Algorithm::Fd, Algorithm::Ffd],
            sizes: vec![100_000, 1_000_000],
            dim: 2,
            levels: vec![10],
            reps: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Run(usize),
    Median,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algo: Algorithm,
    pub n: usize,
    pub dim: usize,
    pub levels: u32,
    pub rep: Rep,
    pub wall_ms: f64,
    pub counters: OpCounters,
}

impl BenchRow {
    pub fn updates_per_point(&self) -> f64 {
        self.counters.updates_per_point(self.n)
    }
}

/// Per-repetition rows followed by one median row per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub reps: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn medians(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(|r| r.rep == Rep::Median)
    }

    pub fn median(&self, algo: Algorithm, n: usize, levels: u32) -> Option<&BenchRow> {
        self.medians()
            .find(|r| r.algo == algo && r.n == n && r.levels == levels)
    }

    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "{CSV_HEADER}")?;
        for r in &self.rows {
            let rep = match r.rep {
                Rep::Run(i) => i.to_string(),
                Rep::Median => "median".to_string(),
            };
            writeln!(
                sink,
                "{},{},{},{},{},{:.3},{},{},{},{}",
                r.algo,
                r.n,
                r.dim,
                r.levels,
                rep,
                r.wall_ms,
                r.counters.point_cell_updates,
                r.counters.merge_updates,
                r.counters.dataset_scans,
                r.updates_per_point()
            )?;
        }
        sink.flush()?;
        Ok(())
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Times every algorithm on one uniform dataset per size.
///
/// Each (size, levels) cell gets one untimed warm-up run per algorithm, then
/// `reps` timed rounds in which the algorithms alternate. Data generation
/// happens before any timing.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    assert!(config.reps >= 1, "at least one repetition");
    let mut rows = Vec::new();
    for &n in &config.sizes {
        let raw = gen_uniform(n, config.dim, config.seed);
        let data = NormalizedDataset::from_unit_coords(config.dim, raw.coords().to_vec())?;
        drop(raw);
        for &levels in &config.levels {
            let schedule = RadiusSchedule::new(levels, config.dim)?;
            let mut times = vec![Vec::with_capacity(config.reps); config.algos.len()];
            let mut counters = Vec::with_capacity(config.algos.len());
            for &algo in &config.algos {
                counters.push(algo.run(&data, &schedule)?.counters);
            }
            for rep in 0..config.reps {
                for (a, &algo) in config.algos.iter().enumerate() {
                    let start = Instant::now();
                    let plot = algo.run(&data, &schedule)?;
                    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    debug_assert_eq!(plot.counters, counters[a]);
                    times[a].push(wall_ms);
                    rows.push(BenchRow {
                        algo,
                        n,
                        dim: config.dim,
                        levels,
                        rep: Rep::Run(rep),
                        wall_ms,
                        counters: plot.counters,
                    });
                }
            }
            for (a, &algo) in config.algos.iter().enumerate() {
                rows.push(BenchRow {
                    algo,
                    n,
                    dim: config.dim,
                    levels,
                    rep: Rep::Median,
                    wall_ms: median(&mut times[a]),
                    counters: counters[a],
                });
            }
        }
    }
    Ok(BenchReport {
        reps: config.reps,
        rows,
    })
}
