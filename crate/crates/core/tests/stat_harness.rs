use minwalk::stats::{ks_normal, StreamMoments};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn ks_rejection_rate_is_calibrated() {
    let reps = 2_000;
    let rejected = (0..reps)
        .filter(|&r| ks_normal(&normals(1_000 + r, 500)).unwrap().p_value < 0.05)
        .count();
    let rate = rejected as f64 / reps as f64;
    assert!((rate - 0.05).abs() <= 0.01, "rejection rate {rate}");
}

#[test]
fn ks_on_many_normals() {
    assert!(ks_normal(&normals(2, 100_000)).unwrap().statistic < 0.006);
}

#[test]
fn ks_detects_uniforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u: Vec<f64> = (0..100_000).map(|_| rng.gen()).collect();
    assert!(ks_normal(&u).unwrap().p_value < 1e-6);
}

#[test]
fn point_mass_at_zero() {
    let r = ks_normal(&[0.0; 100]).unwrap();
    assert!((r.statistic - 0.5).abs() < 1e-15);
}

#[test]
fn streaming_moments_of_normals() {
    let acc: StreamMoments = normals(4, 200_000).into_iter().collect();
    assert!(acc.mean().abs() < 4.0 * acc.standard_error());
    assert!((acc.variance() - 1.0).abs() < 0.02);
    assert!(acc.skewness().abs() < 0.03);
    assert!(acc.kurtosis().abs() < 0.06);
}
