//! Inputs shared by the benchmarks.

use joints_core::vanishing::{Constraint, VanishingSpec};
use joints_core::{Field, MultiPoly, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` distinct random points of `F_p^n`.
pub fn random_points(field: Field, n: usize, count: usize, seed: u64) -> Vec<Point> {
    let q = field.size().expect("finite field");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = std::collections::BTreeSet::new();
    while pts.len() < count {
        pts.insert(
            (0..n)
                .map(|_| field.from_u64(rng.random_range(0..q)))
                .collect::<Point>(),
        );
    }
    pts.into_iter().collect()
}

/// Simple vanishing at each point.
pub fn point_spec(field: Field, n: usize, points: Vec<Point>, order: u32) -> VanishingSpec {
    let cs = points
        .into_iter()
        .map(|point| Constraint::PointOrder { point, order })
        .collect();
    VanishingSpec::new(field, n, cs).expect("valid spec")
}

/// Product of `factors` random affine forms in `n` variables.
pub fn product_of_forms(field: Field, n: usize, factors: usize, seed: u64) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = MultiPoly::one(field, n);
    for _ in 0..factors {
        let coeffs: Vec<_> = (0..n).map(|_| field.from_i64(rng.random_range(-4..=4))).collect();
        let c = field.from_i64(rng.random_range(-4..=4));
        p = &p * &MultiPoly::affine_form(field, &c, &coeffs);
    }
    p
}
