//! Box-counting kernels.
//!
//! Both kernels produce the sum of squared cell occupancies `S_j` for every
//! level of a [`RadiusSchedule`]:
//!
//! - [`fd`] rescans the whole dataset once per level, coarsest first.
//! - [`ffd`] scans the dataset once at the finest level and derives every
//!   coarser level by adding each occupied cell's count into its parent.
//!
//! Occupancy maps are hash tables keyed by packed cell keys, with cells
//! created on first hit. All sums are exact integers, so the two kernels
//! agree bit for bit.

use std::fmt;
use std::str::FromStr;

use hashbrown::HashMap;

use crate::dataset::NormalizedDataset;
use crate::error::{Error, Result};
use crate::grid::{radius, CellKey, KeyLayout, PackedKey, RadiusSchedule, MAX_LEVEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Algorithm {
    Fd,
    #[default]
    Ffd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fd => "fd",
            Algorithm::Ffd => "ffd",
        }
    }

    pub fn run(self, data: &NormalizedDataset, schedule: &RadiusSchedule) -> Result<BoxCountPlot> {
        match self {
            Algorithm::Fd => fd(data, schedule),
            Algorithm::Ffd => ffd(data, schedule),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fd" => Ok(Algorithm::Fd),
            "ffd" => Ok(Algorithm::Ffd),
            other => Err(format!("unknown algorithm {other:?} (expected fd or ffd)")),
        }
    }
}

/// Cell occupancies `C_i` of one grid level. Only occupied cells are stored.
#[derive(Debug, Clone)]
pub struct OccupancyMap {
    level: u32,
    cells: Cells,
}

/// Keys are packed into `u64` whenever all lanes fit, `u128` otherwise.
#[derive(Debug, Clone)]
enum Cells {
    Narrow(Grid<u64>),
    Wide(Grid<u128>),
}

#[derive(Debug, Clone)]
struct Grid<K> {
    layout: KeyLayout<K>,
    cells: HashMap<K, u64>,
}

macro_rules! with_grid {
    ($cells:expr, $g:ident => $body:expr) => {
        match $cells {
            Cells::Narrow($g) => $body,
            Cells::Wide($g) => $body,
        }
    };
}

impl<K: PackedKey> Grid<K> {
    fn empty(dim: usize, lane_bits: u32, capacity: usize) -> Self {
        Self {
            layout: KeyLayout::new(dim, lane_bits),
            cells: HashMap::with_capacity(capacity),
        }
    }

    fn scan(mut self, data: &NormalizedDataset, level: u32) -> Self {
        for p in data.points() {
            *self
                .cells
                .entry(self.layout.pack_point(p, level))
                .or_insert(0) += 1;
        }
        self
    }

    fn coarsen(&self, capacity: usize) -> Self {
        let layout = self.layout;
        let mut cells = HashMap::with_capacity(capacity);
        for (&key, &count) in &self.cells {
            *cells.entry(layout.parent(key)).or_insert(0) += count;
        }
        Self { layout, cells }
    }
}

impl Cells {
    fn empty(dim: usize, lane_bits: u32, capacity: usize) -> Self {
        if dim as u32 * lane_bits <= u64::BITS {
            Cells::Narrow(Grid::empty(dim, lane_bits, capacity))
        } else {
            Cells::Wide(Grid::empty(dim, lane_bits, capacity))
        }
    }
}

impl OccupancyMap {
    pub fn empty(dim: usize, level: u32) -> Self {
        assert!(
            (1..=MAX_LEVEL).contains(&level),
            "level {level} out of range"
        );
        Self {
            level,
            cells: Cells::empty(dim, level, 0),
        }
    }

    /// Builds a map from explicit `(cell, count)` pairs; repeated cells add up.
    ///
    /// Panics on a zero count or a cell from another level.
    pub fn from_cells<I>(dim: usize, level: u32, cells: I) -> Self
    where
        I: IntoIterator<Item = (CellKey, u64)>,
    {
        let mut map = Self::empty(dim, level);
        for (key, count) in cells {
            assert!(count > 0, "occupancy counts are positive");
            assert_eq!(key.level(), level, "cell from another level");
            assert_eq!(key.dim(), dim, "cell of another dimension");
            with_grid!(&mut map.cells, g => {
                *g.cells.entry(g.layout.pack(&key)).or_insert(0) += count;
            });
        }
        map
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        with_grid!(&self.cells, g => g.layout.dim())
    }

    /// Number of occupied cells.
    pub fn len(&self) -> usize {
        with_grid!(&self.cells, g => g.cells.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of all occupancies; equals N for a map built from a whole dataset.
    pub fn total(&self) -> u64 {
        self.counts().sum()
    }

    pub fn get(&self, key: &CellKey) -> Option<u64> {
        if key.level() != self.level || key.dim() != self.dim() {
            return None;
        }
        with_grid!(&self.cells, g => g.cells.get(&g.layout.pack(key)).copied())
    }

    pub fn counts(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        with_grid!(&self.cells, g => Box::new(g.cells.values().copied()))
    }

    /// Occupied cells in unspecified order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (CellKey, u64)> + '_> {
        let level = self.level;
        with_grid!(&self.cells, g => Box::new(
            g.cells.iter().map(move |(&k, &c)| (g.layout.unpack(k, level), c))
        ))
    }

    /// Occupied cells sorted by key.
    pub fn sorted_cells(&self) -> Vec<(CellKey, u64)> {
        let mut cells: Vec<_> = self.iter().collect();
        cells.sort_unstable();
        cells
    }
}

fn capacity_hint(n: usize, dim: usize, level: u32) -> usize {
    let bits = dim as u32 * level;
    if bits >= usize::BITS - 1 {
        n
    } else {
        n.min(1usize << bits)
    }
}

/// Scans `data` at `level`, packing keys with `lane_bits` bits per axis.
fn scan(data: &NormalizedDataset, level: u32, lane_bits: u32) -> OccupancyMap {
    let capacity = capacity_hint(data.len(), data.dim(), level);
    let cells = match Cells::empty(data.dim(), lane_bits, capacity) {
        Cells::Narrow(g) => Cells::Narrow(g.scan(data, level)),
        Cells::Wide(g) => Cells::Wide(g.scan(data, level)),
    };
    OccupancyMap { level, cells }
}

/// One pass over the dataset, counting points per level-`level` cell.
pub fn occupancies_at_level(data: &NormalizedDataset, level: u32) -> OccupancyMap {
    assert!(
        (1..=MAX_LEVEL).contains(&level),
        "level {level} out of range"
    );
    scan(data, level, level)
}

/// Derives the level `j` map from the level `j+1` map by adding every
/// occupied cell's count into its parent cell.
///
/// Panics on a level-1 map.
pub fn coarsen(fine: &OccupancyMap) -> OccupancyMap {
    assert!(fine.level >= 2, "the coarsest grid has no parent");
    let level = fine.level - 1;
    let capacity = capacity_hint(fine.len(), fine.dim(), level);
    let cells = match &fine.cells {
        Cells::Narrow(g) => Cells::Narrow(g.coarsen(capacity)),
        Cells::Wide(g) => Cells::Wide(g.coarsen(capacity)),
    };
    OccupancyMap { level, cells }
}

/// `S = sum_i C_i^2`, exactly. Overflow is an error, never a wrap.
pub fn sum_squared(map: &OccupancyMap) -> Result<u64> {
    sum_squared_counts(map.counts())
}

pub fn sum_squared_counts<I: IntoIterator<Item = u64>>(counts: I) -> Result<u64> {
    counts.into_iter().try_fold(0u64, |acc, c| {
        c.checked_mul(c)
            .and_then(|sq| acc.checked_add(sq))
            .ok_or(Error::Overflow("sum of squared occupancies"))
    })
}

/// Work done by one kernel run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounters {
    /// Per-point occupancy increments.
    pub point_cell_updates: u64,
    /// Child-to-parent occupancy additions.
    pub merge_updates: u64,
    /// Full passes over the dataset.
    pub dataset_scans: u64,
}

impl OpCounters {
    pub fn total_updates(&self) -> u64 {
        self.point_cell_updates + self.merge_updates
    }

    /// `(point_cell_updates + merge_updates) / N`.
    pub fn updates_per_point(&self, n: usize) -> f64 {
        self.total_updates() as f64 / n as f64
    }
}

/// One point of the box-count plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: u32,
    /// Sum of squared occupancies at this level.
    pub sum_sq: u64,
    /// Occupied cells at this level.
    pub occupied: u64,
}

impl LevelRecord {
    pub fn radius(&self) -> f64 {
        radius(self.level)
    }
}

/// `S_j` for every level, ascending in `j`, plus the work counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCountPlot {
    pub algorithm: Algorithm,
    pub n: usize,
    pub dim: usize,
    pub records: Vec<LevelRecord>,
    pub counters: OpCounters,
}

impl BoxCountPlot {
    pub fn levels(&self) -> u32 {
        self.records.len() as u32
    }

    pub fn sums(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.sum_sq).collect()
    }

    /// Whether two plots carry the same `S_j` at every level.
    pub fn same_sums(&self, other: &BoxCountPlot) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// First level whose `S_j` differs, or whose record is missing on one side.
    pub fn first_mismatch(&self, other: &BoxCountPlot) -> Option<u32> {
        let longest = self.records.len().max(other.records.len());
        (0..longest)
            .find(|&i| {
                self.records.get(i).map(|r| (r.level, r.sum_sq))
                    != other.records.get(i).map(|r| (r.level, r.sum_sq))
            })
            .map(|i| i as u32 + 1)
    }
}

fn check_dims(data: &NormalizedDataset, schedule: &RadiusSchedule) -> Result<()> {
    if data.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch {
            expected: schedule.dim(),
            found: data.dim(),
        });
    }
    Ok(())
}

/// Multi-scan box counting: one full pass over the data per level.
///
/// Only one level's map is alive at a time.
pub fn fd(data: &NormalizedDataset, schedule: &RadiusSchedule) -> Result<BoxCountPlot> {
    check_dims(data, schedule)?;
    let n = data.len();
    let mut counters = OpCounters::default();
    let mut records = Vec::with_capacity(schedule.levels() as usize);
    for level in schedule.level_range() {
        let map = occupancies_at_level(data, level);
        counters.dataset_scans += 1;
        counters.point_cell_updates += n as u64;
        records.push(LevelRecord {
            level,
            sum_sq: sum_squared(&map)?,
            occupied: map.len() as u64,
        });
    }
    Ok(BoxCountPlot {
        algorithm: Algorithm::Fd,
        n,
        dim: data.dim(),
        records,
        counters,
    })
}

/// Single-pass box counting.
///
/// Scans the data once at the finest level, then walks towards the coarsest
/// level, building each grid from the previous one. At most two maps are
/// alive at any moment.
pub fn ffd(data: &NormalizedDataset, schedule: &RadiusSchedule) -> Result<BoxCountPlot> {
    check_dims(data, schedule)?;
    let n = data.len();
    let finest = schedule.levels();
    let mut counters = OpCounters::default();
    let mut records = Vec::with_capacity(finest as usize);

    let mut map = scan(data, finest, finest);
    counters.dataset_scans += 1;
    counters.point_cell_updates += n as u64;
    records.push(LevelRecord {
        level: finest,
        sum_sq: sum_squared(&map)?,
        occupied: map.len() as u64,
    });

    for _ in 1..finest {
        let coarse = coarsen(&map);
        counters.merge_updates += map.len() as u64;
        map = coarse;
        records.push(LevelRecord {
            level: map.level,
            sum_sq: sum_squared(&map)?,
            occupied: map.len() as u64,
        });
    }

    records.reverse();
    Ok(BoxCountPlot {
        algorithm: Algorithm::Ffd,
        n,
        dim: data.dim(),
        records,
        counters,
    })
}
