use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimize::grid_then_golden;
use crate::output::{fmt_f64, write_rows};

/// Above this particle number the optimum is located on the Gaussian limit
/// `x = ξ√N`, where `cos^N` would underflow.
pub const GAUSSIAN_THRESHOLD: u64 = 10_000;

const GRID_POINTS: usize = 10_000;
const XI_TOL: f64 = 1e-10;

/// Parity correlation of the two-condensate interferometer,
/// `cos^N((ζ+θ)/2)` for equal populations and zero otherwise.
pub fn correlation_closed_form(n_alpha: u32, n_beta: u32, zeta: f64, theta: f64) -> f64 {
    if n_alpha != n_beta {
        return 0.0;
    }
    ((zeta + theta) / 2.0).cos().powi((n_alpha + n_beta) as i32)
}

/// `Q(ξ) = 3 cos^N ξ − cos^N 3ξ`.
pub fn bchsh_q(n: u64, xi: f64) -> f64 {
    let e = |x: f64| x.cos().powf(n as f64);
    3.0 * e(xi) - e(3.0 * xi)
}

/// Large-N limit of `Q` at scaled angle `x = ξ√N`.
pub fn bchsh_q_gaussian(x: f64) -> f64 {
    3.0 * (-x * x / 2.0).exp() - (-9.0 * x * x / 2.0).exp()
}

/// Best angle of the BCHSH family for `N` particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BchshOptimum {
    pub n_particles: u64,
    pub xi_star: f64,
    pub q_max: f64,
    /// `(φ_a, φ_a′, φ_b, φ_b′)` with `φ_b = 0`, `φ_a = ξ`, `φ_a′ = −ξ`,
    /// `φ_b′ = 2ξ`. Shifter angles follow from `ζ = 2φ_a`, `θ = −2φ_b`.
    pub settings: [f64; 4],
}

impl BchshOptimum {
    pub fn violates(&self) -> bool {
        self.q_max > 2.0
    }

    /// Shifter angles `(ζ, ζ′, θ, θ′)` realizing the four settings.
    pub fn shifter_angles(&self) -> [f64; 4] {
        let [a, a2, b, b2] = self.settings;
        [2.0 * a, 2.0 * a2, -2.0 * b, -2.0 * b2]
    }
}

fn settings_for(xi: f64) -> [f64; 4] {
    [xi, -xi, 0.0, 2.0 * xi]
}

/// Global maximum of `Q` over `ξ ∈ (0, π/2)`: dense grid, then golden
/// section. Particle numbers above [`GAUSSIAN_THRESHOLD`] search the scaled
/// variable instead.
pub fn maximize_bchsh(n: u64) -> BchshOptimum {
    let (xi_star, q_max) = if n > GAUSSIAN_THRESHOLD {
        let root = (n as f64).sqrt();
        let hi = (FRAC_PI_2 * root).min(8.0);
        let (x, q) = grid_then_golden(bchsh_q_gaussian, 0.0, hi, GRID_POINTS, XI_TOL * root);
        (x / root, q)
    } else {
        grid_then_golden(|xi| bchsh_q(n, xi), 0.0, FRAC_PI_2, GRID_POINTS, XI_TOL)
    };
    BchshOptimum {
        n_particles: n,
        xi_star,
        q_max,
        settings: settings_for(xi_star),
    }
}

/// `Q(ξ)` on `points` evenly spaced angles of `[lo, hi]`.
pub fn write_bchsh_curve<W: Write>(out: W, n: u64, lo: f64, hi: f64, points: usize) -> Result<()> {
    let rows: Vec<Vec<String>> = (0..points)
        .map(|k| {
            let xi = if points > 1 {
                lo + (hi - lo) * k as f64 / (points - 1) as f64
            } else {
                lo
            };
            vec![fmt_f64(xi), fmt_f64(bchsh_q(n, xi))]
        })
        .collect();
    write_rows(out, &["xi", "q"], &rows)
}

pub fn write_qmax_table<W: Write>(out: W, optima: &[BchshOptimum]) -> Result<()> {
    let rows: Vec<Vec<String>> = optima
        .iter()
        .map(|o| {
            let mut row = vec![o.n_particles.to_string(), fmt_f64(o.xi_star), fmt_f64(o.q_max)];
            row.extend(o.settings.iter().map(|&s| fmt_f64(s)));
            row
        })
        .collect();
    write_rows(
        out,
        &["n", "xi_star", "q_max", "phi_a", "phi_a_prime", "phi_b", "phi_b_prime"],
        &rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        assert_eq!(correlation_closed_form(1, 1, 0.3, -0.3), 1.0);
        assert_eq!(correlation_closed_form(2, 3, 0.3, 0.1), 0.0);
        let v = correlation_closed_form(2, 2, PI / 4.0, PI / 4.0);
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn q_at_zero_is_boundary() {
        for n in [2, 4, 10, 100] {
            assert!((bchsh_q(n, 0.0) - 2.0).abs() < 1e-15);
        }
        assert!((bchsh_q_gaussian(0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_particle_value() {
        let q = bchsh_q(2, PI / 8.0);
        assert!((q - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn settings_satisfy_the_chain() {
        let o = maximize_bchsh(4);
        let [a, a2, b, b2] = o.settings;
        let xi = o.xi_star;
        assert!((a - b - xi).abs() < 1e-15);
        assert!((b - a2 - xi).abs() < 1e-15);
        assert!((b2 - a - xi).abs() < 1e-15);
        assert!((b2 - a2 - 3.0 * xi).abs() < 1e-15);
        assert!((o.q_max - bchsh_q(4, xi)).abs() < 1e-15);
    }

    #[test]
    fn gaussian_optimum_analytic() {
        // dQ/dx = 0 at x² = ln 3 / 4, Q = (8/3)·3^{-1/8}
        let o = maximize_bchsh(1_000_000);
        let x = o.xi_star * 1000.0;
        assert!((x * x - 3f64.ln() / 4.0).abs() < 1e-8);
        assert!((o.q_max - 8.0 / 3.0 * 3f64.powf(-0.125)).abs() < 1e-12);
    }

    #[test]
    fn qmax_decreasing_and_above_limit() {
        let mut prev = f64::INFINITY;
        for n in (2..=40).step_by(2) {
            let q = maximize_bchsh(n).q_max;
            assert!(q < prev, "N={n}");
            assert!(q > 2.3);
            assert!(q <= 2.0 * 2f64.sqrt() + 1e-12);
            prev = q;
        }
    }

    #[test]
    fn curve_csv_shape() {
        let mut buf = Vec::new();
        write_bchsh_curve(&mut buf, 2, 0.0, 1.0, 5).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("xi,q"));
        assert_eq!(text.lines().count(), 6);
    }
}
