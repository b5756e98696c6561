//! Deterministic random instance generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use cannonball::lattice::{GridRegion, GridVertex, StackingSequence};

use crate::files::InstanceFile;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("inconsistent parameters: {0}")]
    Invalid(String),
}

/// Parameters of one generated instance.
#[derive(Debug, Clone)]
pub struct GenParams {
    /// Number of layers; must equal the stacking length.
    pub layers: usize,
    /// Window width (u coordinates `0..width`).
    pub width: u32,
    /// Window height (v coordinates `0..height`).
    pub height: u32,
    pub stacking: StackingSequence,
    pub max_demand: u32,
    /// Probability that a vertex receives positive demand.
    pub density: f64,
    pub seed: u64,
}

impl GenParams {
    fn validate(&self) -> Result<(), GenError> {
        if self.layers != self.stacking.len() {
            return Err(GenError::Invalid(format!(
                "layers = {} but stacking {} has {} letters",
                self.layers,
                self.stacking,
                self.stacking.len()
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(GenError::Invalid("window must be at least 1x1".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(GenError::Invalid(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        if self.max_demand == 0 {
            return Err(GenError::Invalid("max_demand must be at least 1".into()));
        }
        Ok(())
    }
}

/// Generates an instance fully determined by the seed: every window vertex
/// draws one uniform roll, and those passing the density gate draw a demand
/// uniform in `1..=max_demand`. All window vertices are listed, so the file
/// records the window even where demand is zero.
pub fn generate(params: &GenParams) -> Result<InstanceFile, GenError> {
    params.validate()?;
    let region = GridRegion::new(
        params.stacking.clone(),
        (0, params.width as i32 - 1),
        (0, params.height as i32 - 1),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut vertices: Vec<(GridVertex, u32)> = Vec::with_capacity(region.vertex_count());
    for v in region.vertices() {
        let roll: f64 = rng.random();
        let d = if roll < params.density {
            rng.random_range(1..=params.max_demand)
        } else {
            0
        };
        vertices.push((v, d));
    }
    Ok(InstanceFile::new(params.stacking.clone(), vertices))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(density: f64, seed: u64) -> GenParams {
        GenParams {
            layers: 3,
            width: 5,
            height: 4,
            stacking: StackingSequence::fcc(3),
            max_demand: 9,
            density,
            seed,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&params(0.5, 42)).unwrap();
        let b = generate(&params(0.5, 42)).unwrap();
        assert_eq!(a.to_string_lines(), b.to_string_lines());
        let c = generate(&params(0.5, 43)).unwrap();
        assert_ne!(a.to_string_lines(), c.to_string_lines());
    }

    #[test]
    fn density_extremes() {
        let empty = generate(&params(0.0, 1)).unwrap();
        assert!(empty.vertices.iter().all(|&(_, d)| d == 0));
        assert_eq!(empty.vertices.len(), 3 * 5 * 4);

        let mut p = params(1.0, 1);
        p.max_demand = 1;
        let full = generate(&p).unwrap();
        assert!(full.vertices.iter().all(|&(_, d)| d == 1));
    }

    #[test]
    fn rejects_inconsistent_params() {
        let mut p = params(0.5, 1);
        p.layers = 2;
        assert!(generate(&p).is_err());
        let mut p = params(1.5, 1);
        p.layers = 3;
        assert!(generate(&p).is_err());
        let mut p = params(0.5, 1);
        p.max_demand = 0;
        assert!(generate(&p).is_err());
    }
}
