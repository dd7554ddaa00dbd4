//! Seed-deterministic random inputs for the verification campaigns.
//!
//! Everything is driven by ChaCha8 streams. A campaign derives one stream
//! per instance from `(seed, instance)`, so instances can be generated in
//! any order or in parallel and still reproduce bit for bit from the seed
//! alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{QSqrt2, Rational, Scalar};
use crate::stepfn::StepFunction;

/// Stream for one instance of a campaign. The multiplier is an odd 64-bit
/// constant, so distinct instances map to distinct seeds.
pub fn rng_for(seed: u64, instance: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(instance.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Rational with numerator in `[-9, 9]` and denominator in `[1, 9]`.
pub fn rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(-9i64..=9);
    let den = rng.gen_range(1i64..=9);
    Rational::new(num, den).expect("denominator is positive")
}

/// Strictly positive rational with numerator and denominator in `[1, 9]`.
pub fn positive_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(1i64..=9);
    let den = rng.gen_range(1i64..=9);
    Rational::new(num, den).expect("denominator is positive")
}

/// Rational scalar, or a Gaussian rational (rational real and imaginary
/// parts) when `complex` is set.
pub fn scalar(rng: &mut ChaCha8Rng, complex: bool) -> Scalar {
    let re = QSqrt2::from_rational(rational(rng));
    let im = if complex {
        QSqrt2::from_rational(rational(rng))
    } else {
        QSqrt2::zero()
    };
    Scalar::new(re, im)
}

pub fn sequence(rng: &mut ChaCha8Rng, len: usize, complex: bool) -> Vec<Scalar> {
    (0..len).map(|_| scalar(rng, complex)).collect()
}

pub fn sequences(rng: &mut ChaCha8Rng, k: usize, len: usize, complex: bool) -> Vec<Vec<Scalar>> {
    (0..k).map(|_| sequence(rng, len, complex)).collect()
}

/// Real-valued step function on the `2^depth`-piece uniform grid of
/// `[0, span)` whose exact mean is zero, built by sampling rationals and
/// subtracting their average.
pub fn mean_zero_grid(rng: &mut ChaCha8Rng, span: u32, depth: u32) -> StepFunction {
    assert!(depth <= 20, "grid too fine");
    let pieces = (span as usize) << depth;
    let samples: Vec<Rational> = (0..pieces).map(|_| rational(rng)).collect();
    let mut mean = Rational::zero();
    for s in &samples {
        mean += s;
    }
    mean = &mean * &Rational::new(1, pieces as i64).expect("pieces is positive");
    let values = samples
        .iter()
        .map(|s| Scalar::from_rational(s - &mean))
        .collect();
    StepFunction::from_grid(Rational::zero(), Rational::pow2(-(depth as i64)), values)
        .expect("uniform grid is strictly increasing")
}
