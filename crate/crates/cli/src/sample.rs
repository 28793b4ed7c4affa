//! Seeded random inputs shared by the verification checks.

use cytower::moduli::ModuliPoint;
use cytower::rational::{qf, Q};
use cytower::SylvesterContext;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn nonzero_q(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let v = qf(rng.gen_range(-12..=12), rng.gen_range(1..=6));
        if !v.is_zero() {
            return v;
        }
    }
}

/// Point of `M_n` whose coordinates are nonzero with probability `density`.
pub fn point(rng: &mut ChaCha8Rng, n: usize, density: f64) -> ModuliPoint {
    let tuples = SylvesterContext::new(n)
        .enumerate_positive(100_000)
        .expect("small level");
    loop {
        let mut coords = Vec::new();
        for t in &tuples {
            if rng.gen_bool(density) {
                coords.push((t.i.clone(), nonzero_q(rng)));
            }
        }
        if let Ok(p) = ModuliPoint::new(n, coords) {
            return p;
        }
    }
}
