//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weightlab_core::grid::{GridFunction, PolarGrid};

/// Disk grid with the default grading.
pub fn disk_grid(m: usize, k: usize) -> PolarGrid {
    PolarGrid::new(m, k, 1e-4, 1.05).expect("valid grid")
}

/// Node values uniform in `[-1, 1)`.
pub fn random_field(grid: &PolarGrid, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_values(grid, false, values).expect("length matches grid")
}
