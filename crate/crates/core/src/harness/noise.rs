//! Seeded noise of exact norm.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! drawing each entry uniformly from `[−1, 1)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `f + δ z/‖z‖`; a zero draw is replaced by the draw for `seed + 1`.
pub fn add_noise(f: &GridFunction, delta: f64, seed: u64) -> Result<GridFunction> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::domain(format!("delta = {delta} must be >= 0")));
    }
    if delta == 0.0 {
        return Ok(f.clone());
    }
    let mut s = seed;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let z: Vec<f64> = (0..f.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z = GridFunction::new(z, f.norm_kind())?;
        let nz = z.norm();
        if nz > 0.0 {
            return f.lincomb(1.0, &z, delta / nz);
        }
        s = s.wrapping_add(1);
    }
}
