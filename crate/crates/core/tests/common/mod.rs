//! Seeded random-matrix builders shared by the integration tests.

use opcalc_core::{Cx64, Operator64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Operator64 {
    let entries: Vec<Cx64> = (0..dim * dim)
        .map(|_| {
            Cx64::new(
                rng.gen_range(-1.0..1.0) * scale,
                rng.gen_range(-1.0..1.0) * scale,
            )
        })
        .collect();
    Operator64::from_rows(dim, &entries).expect("finite entries")
}

/// Diagonally dominant, hence comfortably invertible.
pub fn well_conditioned(rng: &mut ChaCha8Rng, dim: usize) -> Operator64 {
    let noise = random_matrix(rng, dim, 0.3);
    let shift = Cx64::new(rng.gen_range(1.5..2.5), rng.gen_range(-0.3..0.3));
    noise.shift(shift)
}

/// `V diag(lambda) V^{-1}` with a mildly perturbed identity eigenbasis and
/// eigenvalues drawn from the disk `|z - center| <= radius`. Keeping the
/// disk well right of the origin makes the spectrum admissible for the
/// principal logarithm and for circumscribed contours.
pub fn diagonalizable(
    rng: &mut ChaCha8Rng,
    dim: usize,
    center: Cx64,
    radius: f64,
) -> (Operator64, Vec<Cx64>) {
    let basis = random_matrix(rng, dim, 0.25).shift(Cx64::new(1.0, 0.0));
    let basis_inv = basis.inverse_default().expect("dominant basis");
    let eigenvalues: Vec<Cx64> = (0..dim)
        .map(|_| {
            let r = radius * rng.gen_range(0.0..1.0f64).sqrt();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            center + Cx64::new(r * phi.cos(), r * phi.sin())
        })
        .collect();
    let m = basis
        .try_mul(&Operator64::from_diagonal(&eigenvalues))
        .unwrap()
        .try_mul(&basis_inv)
        .unwrap();
    (m, eigenvalues)
}
