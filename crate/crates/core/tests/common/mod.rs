#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fockbell::{OccupationVector, SourceSpec, TransferMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
}

/// Permanent by Ryser's formula.
pub fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for subset in 1u32..(1 << n) {
        let mut prod = Complex64::new(1.0, 0.0);
        for row in m {
            let s: Complex64 = (0..n).filter(|&j| subset & (1 << j) != 0).map(|j| row[j]).sum();
            prod *= s;
        }
        let sign = if (n as u32 - subset.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `⟨m| U |N⟩` from the permanent of the row/column-repeated submatrix,
/// divided by `sqrt(Π m_i! Π N_γ!)`.
pub fn permanent_amplitude(u: &TransferMatrix, s: &SourceSpec, m: &OccupationVector) -> Complex64 {
    let rows: Vec<usize> = m.0.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
    let cols: Vec<usize> = s
        .populations
        .iter()
        .enumerate()
        .flat_map(|(g, &k)| std::iter::repeat_n(g, k as usize))
        .collect();
    let sub: Vec<Vec<Complex64>> = rows.iter().map(|&i| cols.iter().map(|&g| u.get(i, g)).collect()).collect();
    let norm: f64 = m.0.iter().chain(&s.populations).map(|&k| factorial(k)).product();
    permanent(&sub) / norm.sqrt()
}
