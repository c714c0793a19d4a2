//! Characteristic roots of the lattice difference equation
//! `ψ(j+1) + ψ(j−1) = 2σ ψ(j)` in each region.
//!
//! Outside the barrier `σ = ε = cos θ` and the roots `e^{±iθ}` lie on the
//! unit circle; inside `σ = λ = cosh φ` and the roots `e^{±φ}` are real.
//! The gaps `1 − ε` and `λ − 1` are carried alongside so that the angles stay
//! accurate when the lattice is fine and both parameters crowd around 1.

use num_complex::Complex64;
use serde::Serialize;

use crate::units::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionParams {
    pub epsilon: f64,
    pub theta: f64,
    pub lam: f64,
    pub phi: f64,
    /// `1 − ε = mEμ₀²/ħ²`
    pub epsilon_gap: f64,
    /// `λ − 1 = m(V₀−E)μ₀²/ħ²`
    pub lambda_gap: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("dispersion gaps out of range: 1-eps = {epsilon_gap}, lam-1 = {lambda_gap}")]
pub struct GapError {
    pub epsilon_gap: f64,
    pub lambda_gap: f64,
}

pub fn compute_dispersion(p: &PhysicalParams) -> DispersionParams {
    let inertia = p.lattice_inertia();
    let epsilon_gap = inertia * p.energy();
    let lambda_gap = inertia * (p.barrier_height() - p.energy());
    // validated params guarantee 0 < epsilon_gap < 2 and lambda_gap > 0
    DispersionParams::from_gaps_unchecked(epsilon_gap, lambda_gap)
}

/// `arccos(1 − g)` for `0 ≤ g ≤ 2`, via `2·asin(√(g/2))`.
pub fn arccos_one_minus(gap: f64) -> f64 {
    2.0 * (0.5 * gap).sqrt().asin()
}

/// `arccosh(1 + g)` for `g ≥ 0`, via `log1p(g + √(g(2+g)))`.
pub fn arccosh_one_plus(gap: f64) -> f64 {
    (gap + (gap * (2.0 + gap)).sqrt()).ln_1p()
}

impl DispersionParams {
    /// Builds the parameters from the two gaps directly. Requires
    /// `0 < 1 − ε < 2` and `λ − 1 > 0`.
    pub fn from_gaps(epsilon_gap: f64, lambda_gap: f64) -> Result<Self, GapError> {
        let ok = epsilon_gap > 0.0 && epsilon_gap < 2.0 && lambda_gap > 0.0 && lambda_gap.is_finite();
        if !ok {
            return Err(GapError {
                epsilon_gap,
                lambda_gap,
            });
        }
        Ok(Self::from_gaps_unchecked(epsilon_gap, lambda_gap))
    }

    fn from_gaps_unchecked(epsilon_gap: f64, lambda_gap: f64) -> Self {
        DispersionParams {
            epsilon: 1.0 - epsilon_gap,
            theta: arccos_one_minus(epsilon_gap),
            lam: 1.0 + lambda_gap,
            phi: arccosh_one_plus(lambda_gap),
            epsilon_gap,
            lambda_gap,
        }
    }

    /// `√(λ² − 1)`, evaluated without cancellation.
    pub fn sqrt_lam2_minus_1(&self) -> f64 {
        (self.lambda_gap * (2.0 + self.lambda_gap)).sqrt()
    }

    /// `√(1 − ε²) = sin θ`.
    pub fn sqrt_1_minus_eps2(&self) -> f64 {
        (self.epsilon_gap * (2.0 - self.epsilon_gap)).sqrt()
    }

    /// Roots `ε ± i√(1−ε²) = e^{±iθ}` of `r² − 2εr + 1`.
    pub fn free_roots(&self) -> (Complex64, Complex64) {
        let s = self.sqrt_1_minus_eps2();
        (Complex64::new(self.epsilon, s), Complex64::new(self.epsilon, -s))
    }

    /// Roots `λ ± √(λ²−1) = e^{±φ}` of `r² − 2λr + 1`.
    pub fn barrier_roots(&self) -> (f64, f64) {
        let s = self.sqrt_lam2_minus_1();
        // the small root as 1/(λ+s) avoids cancellation
        (self.lam + s, 1.0 / (self.lam + s))
    }
}

/// Region-1 roots exactly as first derived, before simplifying to `ε ± √(ε²−1)`:
/// `(1 − x) ± ½·√(8x(x/2 − 1))` with `x = mEμ₀²/ħ²`.
pub fn free_roots_unsimplified(epsilon_gap: f64) -> (Complex64, Complex64) {
    let x = epsilon_gap;
    let disc = Complex64::new(8.0 * x * (0.5 * x - 1.0), 0.0).sqrt();
    let centre = Complex64::new(1.0 - x, 0.0);
    (centre + 0.5 * disc, centre - 0.5 * disc)
}
