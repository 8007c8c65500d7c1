//! Matrix exponential by scaling and squaring of a truncated Taylor series.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub fn expm2(m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    let scaled = m.unscale(2f64.powi(squarings));
    let mut term = Matrix2::<Complex64>::identity();
    let mut sum = term;
    for n in 1..=24 {
        term = term * scaled / Complex64::from(n as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// exp(i A z) through `expm2`.
pub fn transfer_reference(a: &Matrix2<Complex64>, z: f64) -> Matrix2<Complex64> {
    expm2(&(a * Complex64::new(0.0, z)))
}
