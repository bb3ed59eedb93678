//! Dyadic grids over the unit cube: the radius schedule, cell keys, the
//! parent relation between consecutive levels and the row-major cell id.
//!
//! Level `j` splits every axis into `2^j` cells of side `r_j = 1/2^j`.
//! Level 1 is the coarsest grid.

use crate::error::{Error, Result};

/// Largest supported level. Per-axis indices are `u64`.
pub const MAX_LEVEL: u32 = 63;

/// Bit budget for a packed cell key (all axes of one cell).
pub const KEY_BITS: u32 = 128;

/// The grid resolutions `r_j = 1/2^j` for `j = 1..=levels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadiusSchedule {
    levels: u32,
    dim: usize,
}

impl RadiusSchedule {
    /// A schedule of `levels` grids for `dim`-dimensional data.
    ///
    /// Rejects fewer than two levels (no slope) and any schedule whose packed
    /// cell keys would not fit in [`KEY_BITS`].
    pub fn new(levels: u32, dim: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 2 levels, got {levels}"
            )));
        }
        if levels > MAX_LEVEL {
            return Err(Error::InvalidSchedule(format!(
                "at most {MAX_LEVEL} levels are supported, got {levels}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidSchedule("dimension must be positive".into()));
        }
        if dim as u128 * levels as u128 > KEY_BITS as u128 {
            return Err(Error::InvalidSchedule(format!(
                "{dim} dimensions x {levels} levels exceeds the {KEY_BITS}-bit cell key"
            )));
        }
        Ok(Self { levels, dim })
    }

    /// Number of resolutions, `|R|`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cell side at level `j`.
    pub fn radius(&self, j: u32) -> f64 {
        radius(j)
    }

    /// Levels from coarsest to finest.
    pub fn level_range(&self) -> std::ops::RangeInclusive<u32> {
        1..=self.levels
    }
}

pub fn radius(j: u32) -> f64 {
    (-(j as f64)).exp2()
}

/// A grid cell: per-axis integer indices at a given level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    level: u32,
    indices: Vec<u64>,
}

impl CellKey {
    /// Panics when an index does not fit the level.
    pub fn new(level: u32, indices: Vec<u64>) -> Self {
        assert!(
            (1..=MAX_LEVEL).contains(&level),
            "level {level} out of range"
        );
        let side = 1u64 << level;
        assert!(
            indices.iter().all(|&i| i < side),
            "cell index out of range for level {level}"
        );
        Self { level, indices }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }
}

/// `floor(x * 2^level)`, with `x = 1.0` clamped into the last cell.
#[inline]
pub(crate) fn axis_index(x: f64, level: u32) -> u64 {
    let side = 1u64 << level;
    // scaling by a power of two is exact, so the floor is exact too
    let scaled = x * (side as f64);
    (scaled as u64).min(side - 1)
}

/// The level-`level` cell containing `point`.
///
/// Panics if a coordinate lies outside [0, 1] or the level is out of range.
pub fn cell_index(point: &[f64], level: u32) -> CellKey {
    assert!(
        (1..=MAX_LEVEL).contains(&level),
        "level {level} out of range"
    );
    assert!(
        point.iter().all(|x| (0.0..=1.0).contains(x)),
        "point is not in the unit cube"
    );
    CellKey {
        level,
        indices: point.iter().map(|&x| axis_index(x, level)).collect(),
    }
}

/// The level-`j-1` cell that contains `key`. Panics on a level-1 key.
pub fn parent_key(key: &CellKey) -> CellKey {
    assert!(key.level >= 2, "the coarsest grid has no parent");
    CellKey {
        level: key.level - 1,
        indices: key.indices.iter().map(|i| i >> 1).collect(),
    }
}

/// Row-major linear id: `sum_d index_d * (2^j)^(E-1-d)`.
///
/// Fails when `E * j` exceeds 64 bits; use the tuple key instead.
pub fn row_major_id(key: &CellKey) -> Result<u64> {
    let bits = key.indices.len() as u64 * key.level as u64;
    if bits > 64 {
        return Err(Error::Overflow("row-major cell id"));
    }
    Ok(key
        .indices
        .iter()
        .fold(0u64, |acc, &i| (acc << key.level) | i))
}

/// Integer types that can hold a packed cell key.
pub(crate) trait PackedKey:
    Copy
    + Eq
    + std::hash::Hash
    + std::fmt::Debug
    + std::ops::Shl<u32, Output = Self>
    + std::ops::Shr<u32, Output = Self>
    + std::ops::BitAnd<Output = Self>
    + std::ops::BitOr<Output = Self>
{
    const BITS: u32;
    const ZERO: Self;
    fn from_index(i: u64) -> Self;
    /// Low 64 bits.
    fn low_u64(self) -> u64;
    /// A value with the low `n` bits set, `n < BITS`.
    fn low_ones(n: u32) -> Self;
}

impl PackedKey for u64 {
    const BITS: u32 = 64;
    const ZERO: Self = 0;
    #[inline]
    fn from_index(i: u64) -> Self {
        i
    }
    #[inline]
    fn low_u64(self) -> u64 {
        self
    }
    #[inline]
    fn low_ones(n: u32) -> Self {
        (1u64 << n) - 1
    }
}

impl PackedKey for u128 {
    const BITS: u32 = 128;
    const ZERO: Self = 0;
    #[inline]
    fn from_index(i: u64) -> Self {
        i as u128
    }
    #[inline]
    fn low_u64(self) -> u64 {
        self as u64
    }
    #[inline]
    fn low_ones(n: u32) -> Self {
        (1u128 << n) - 1
    }
}

/// Fixed-width packing of cell keys into one integer.
///
/// Lanes are at most [`MAX_LEVEL`] bits wide, so every shift stays below the
/// key width.
/// Each axis gets a lane of `lane_bits` bits, axis 0 in the most significant
/// lane. When `lane_bits == j` the packed value is exactly the row-major id.
/// Halving every lane at once is a shift plus a mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct KeyLayout<K> {
    dim: u32,
    lane_bits: u32,
    parent_mask: K,
}

impl<K: PackedKey> KeyLayout<K> {
    pub(crate) fn new(dim: usize, lane_bits: u32) -> Self {
        debug_assert!(dim >= 1 && lane_bits >= 1);
        debug_assert!(dim as u32 * lane_bits <= K::BITS);
        let lane_low = K::low_ones(lane_bits - 1);
        let parent_mask = (0..dim as u32).fold(K::ZERO, |m, d| m | (lane_low << (d * lane_bits)));
        Self {
            dim: dim as u32,
            lane_bits,
            parent_mask,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub(crate) fn pack_point(&self, point: &[f64], level: u32) -> K {
        point.iter().fold(K::ZERO, |acc, &x| {
            (acc << self.lane_bits) | K::from_index(axis_index(x, level))
        })
    }

    #[inline]
    pub(crate) fn parent(&self, packed: K) -> K {
        (packed >> 1) & self.parent_mask
    }

    pub(crate) fn unpack(&self, mut packed: K, level: u32) -> CellKey {
        let lane = K::low_ones(self.lane_bits);
        let mut indices = vec![0u64; self.dim as usize];
        for slot in indices.iter_mut().rev() {
            *slot = (packed & lane).low_u64();
            packed = packed >> self.lane_bits;
        }
        CellKey { level, indices }
    }

    pub(crate) fn pack(&self, key: &CellKey) -> K {
        key.indices.iter().fold(K::ZERO, |acc, &i| {
            (acc << self.lane_bits) | K::from_index(i)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cell_index_examples() {
        assert_eq!(cell_index(&[0.1, 0.6], 2).indices(), &[0, 2]);
        assert_eq!(cell_index(&[1.0, 1.0], 3).indices(), &[7, 7]);
        assert_eq!(cell_index(&[0.5], 1).indices(), &[1]);
        assert_eq!(cell_index(&[0.0], MAX_LEVEL).indices(), &[0]);
        assert_eq!(
            cell_index(&[1.0], MAX_LEVEL).indices(),
            &[(1u64 << MAX_LEVEL) - 1]
        );
    }

    #[test]
    fn parent_key_examples() {
        let p = |ix: [u64; 2]| parent_key(&CellKey::new(3, ix.to_vec())).indices().to_vec();
        assert_eq!(p([5, 3]), vec![2, 1]);
        assert_eq!(p([0, 0]), vec![0, 0]);
        assert_eq!(p([7, 6]), vec![3, 3]);
    }

    #[test]
    #[should_panic(expected = "no parent")]
    fn level_one_has_no_parent() {
        parent_key(&CellKey::new(1, vec![1, 0]));
    }

    #[test]
    #[should_panic(expected = "unit cube")]
    fn cell_index_rejects_points_outside_unit_cube() {
        cell_index(&[1.5], 2);
    }

    #[test]
    fn row_major_id_examples() {
        assert_eq!(row_major_id(&CellKey::new(2, vec![1, 2])).unwrap(), 6);
        assert_eq!(row_major_id(&CellKey::new(5, vec![0, 0, 0])).unwrap(), 0);
        assert_eq!(row_major_id(&CellKey::new(3, vec![5])).unwrap(), 5);
        assert_eq!(
            row_major_id(&CellKey::new(32, vec![u32::MAX as u64, 1])).unwrap(),
            (u32::MAX as u64) << 32 | 1
        );
        assert!(matches!(
            row_major_id(&CellKey::new(33, vec![0, 0])),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn row_major_id_is_a_bijection_on_small_grids() {
        for dim in 1..=3usize {
            for level in 1..=3u32 {
                let side = 1u64 << level;
                let total = side.pow(dim as u32);
                let mut seen = vec![false; total as usize];
                for flat in 0..total {
                    let mut rest = flat;
                    let mut ix = vec![0; dim];
                    for slot in ix.iter_mut().rev() {
                        *slot = rest % side;
                        rest /= side;
                    }
                    let id = row_major_id(&CellKey::new(level, ix)).unwrap();
                    assert!(!seen[id as usize]);
                    seen[id as usize] = true;
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn schedule_guards() {
        assert!(RadiusSchedule::new(1, 2).is_err());
        assert!(RadiusSchedule::new(2, 0).is_err());
        assert!(RadiusSchedule::new(64, 1).is_err());
        assert!(RadiusSchedule::new(32, 4).is_ok());
        assert!(RadiusSchedule::new(33, 4).is_err());
        let s = RadiusSchedule::new(10, 2).unwrap();
        assert_eq!(s.radius(1), 0.5);
        assert_eq!(s.radius(10), 1.0 / 1024.0);
        assert_eq!(s.level_range().count(), 10);
    }

    #[test]
    fn hierarchy_is_consistent_exhaustively_up_to_level_six() {
        // every dyadic cell centre and corner up to level 6, per axis
        let side = 1u64 << 7;
        for a in 0..=side {
            let x = a as f64 / side as f64;
            for j in 2..=6 {
                let fine = cell_index(&[x], j);
                assert_eq!(parent_key(&fine), cell_index(&[x], j - 1), "x={x} j={j}");
            }
        }
    }

    #[test]
    fn packed_layout_matches_row_major_and_parent() {
        let layout = KeyLayout::<u64>::new(2, 2);
        let key = CellKey::new(2, vec![1, 2]);
        assert_eq!(layout.pack(&key), 6);
        assert_eq!(layout.unpack(6, 2), key);

        let wide = KeyLayout::<u128>::new(3, 10);
        let key = CellKey::new(10, vec![1023, 0, 513]);
        let packed = wide.pack(&key);
        assert_eq!(wide.unpack(wide.parent(packed), 9), parent_key(&key));
    }

    fn unit() -> impl Strategy<Value = f64> {
        prop_oneof![0.0..=1.0f64, Just(0.0), Just(1.0), Just(0.5)]
    }

    proptest! {
        #[test]
        fn hierarchy_commutes_with_level_decrement(
            point in proptest::collection::vec(unit(), 1..5),
            j in 2u32..=MAX_LEVEL,
        ) {
            prop_assert_eq!(parent_key(&cell_index(&point, j)), cell_index(&point, j - 1));
        }

        #[test]
        fn cell_index_stays_on_grid(point in proptest::collection::vec(unit(), 1..5), j in 1u32..=MAX_LEVEL) {
            let side = 1u128 << j;
            prop_assert!(cell_index(&point, j).indices().iter().all(|&i| (i as u128) < side));
        }

        #[test]
        fn packed_parent_agrees_with_parent_key(
            point in proptest::collection::vec(unit(), 1..5),
            lane_bits in 2u32..=32,
            drop in 0u32..31,
        ) {
            let level = lane_bits.saturating_sub(drop).max(2);
            let key = cell_index(&point, level);
            let wide = KeyLayout::<u128>::new(point.len(), lane_bits);
            let packed = wide.pack(&key);
            prop_assert_eq!(packed, wide.pack_point(&point, level));
            prop_assert_eq!(wide.unpack(wide.parent(packed), level - 1), parent_key(&key));
            if point.len() as u32 * lane_bits <= 64 {
                let narrow = KeyLayout::<u64>::new(point.len(), lane_bits);
                let packed = narrow.pack(&key);
                prop_assert_eq!(packed, narrow.pack_point(&point, level));
                prop_assert_eq!(narrow.unpack(narrow.parent(packed), level - 1), parent_key(&key));
            }
        }

        #[test]
        fn row_major_id_is_injective(
            a in proptest::collection::vec(0u64..1024, 3),
            b in proptest::collection::vec(0u64..1024, 3),
        ) {
            let ka = CellKey::new(10, a.clone());
            let kb = CellKey::new(10, b.clone());
            prop_assert_eq!(a == b, row_major_id(&ka).unwrap() == row_major_id(&kb).unwrap());
        }
    }
}
