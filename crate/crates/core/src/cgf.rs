//! Tilted generator and the cumulant generating function of the net number
//! of bosons exchanged with the left reservoir.
//!
//! Counting convention: `q` increases by one when the system absorbs a boson
//! from the left reservoir and decreases by one when it emits into it. The
//! generator acts on `(p_occupied, p_empty)`:
//!
//! ```text
//! [ -α_L - α_R        β_L e^{λ} + β_R ]
//! [ α_L e^{-λ} + α_R  -β_L - β_R      ]
//! ```
//!
//! The canonical CGF is its dominant eigenvalue,
//! `S(λ) = ½[-a + √(a² + 4f(λ))]` with `a = α_L+α_R+β_L+β_R` and
//! `f(λ) = α_L β_R (e^{-λ}-1) + α_R β_L (e^{λ}-1)`. Closed forms that drop the
//! ½ are "paper convention" values and carry a factor [`PAPER_SCALE`].

use crate::jets::CountingField;
use crate::model::{make_rates, ModelParams, RateSet, Side};
use crate::{Error, Result};

/// Ratio between paper-convention cumulants and the eigenvalue convention.
pub const PAPER_SCALE: f64 = 2.0;

/// Entries of the counting-field generator, row-major over
/// `(occupied, empty)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedGenerator<T> {
    pub entries: [[T; 2]; 2],
}

impl<T: CountingField> TiltedGenerator<T> {
    pub fn column_sums(&self) -> [T; 2] {
        let [[a, b], [c, d]] = &self.entries;
        [a.clone() + c.clone(), b.clone() + d.clone()]
    }
}

pub fn tilted_generator<T: CountingField>(rates: &RateSet, lambda: &T) -> TiltedGenerator<T> {
    let zero = lambda.clone() * 0.0;
    let up = lambda.exp() * rates.beta_l + rates.beta_r;
    let down = (-lambda.clone()).exp() * rates.alpha_l + rates.alpha_r;
    TiltedGenerator {
        entries: [
            [zero.clone() + (-rates.alpha_l - rates.alpha_r), up],
            [down, zero + (-rates.beta_l - rates.beta_r)],
        ],
    }
}

/// Dominant eigenvalue of the tilted generator, for a scalar or jet `λ`.
pub fn cgf<T: CountingField>(rates: &RateSet, lambda: &T) -> Result<T> {
    let a = rates.total();
    // α_R β_L ± α_L β_R; the odd part is Γ_L Γ_R (N_L - N_R) exactly.
    let even = rates.alpha_r * rates.beta_l + rates.alpha_l * rates.beta_r;
    let odd = rates.gamma_l * rates.gamma_r * (rates.big_n_l - rates.big_n_r);
    let up = lambda.exp_m1();
    let down = (-lambda.clone()).exp_m1();
    let f = (up.clone() + down.clone()) * (0.5 * even) + (up - down) * (0.5 * odd);
    let disc = f.clone() * 4.0 + a * a;
    if !disc.value().is_finite() || disc.value() <= 0.0 {
        return Err(Error::Domain(format!(
            "CGF discriminant a² + 4f(λ) = {} is not positive",
            disc.value()
        )));
    }
    // ½(−a + √D) = 2f / (a + √D), free of cancellation when 4f ≪ a²
    let denom = disc.sqrt_positive() + a;
    Ok(f * 2.0 / denom)
}

/// Thermodynamic affinity A, the conjugate force of `q`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Affinity(pub f64);

impl Affinity {
    pub fn value(self) -> f64 {
        self.0
    }
}

// ln(N/(1+N)) = ln((ñ cosh 2x − 1)/(ñ cosh 2x + 1))
fn half_affinity(big_n: f64) -> Result<f64> {
    if big_n.is_nan() || big_n <= 0.0 {
        return Err(Error::Domain(format!(
            "affinity needs a positive squeezed occupation, got {big_n}"
        )));
    }
    Ok(-(1.0 / big_n).ln_1p())
}

/// `A = ln[(ñ_L c_L − 1)(ñ_R c_R + 1) / ((ñ_L c_L + 1)(ñ_R c_R − 1))]`,
/// `c_ν = cosh 2x_ν`.
pub fn affinity(params: &ModelParams) -> Result<Affinity> {
    affinity_from_rates(&make_rates(params)?)
}

pub fn affinity_from_rates(rates: &RateSet) -> Result<Affinity> {
    Ok(Affinity(
        half_affinity(rates.big_n_l)? - half_affinity(rates.big_n_r)?,
    ))
}

/// Limit of A as the squeezing of `diverging` goes to infinity.
pub fn affinity_saturation(params: &ModelParams, diverging: Side) -> Result<f64> {
    let rates = make_rates(params)?;
    match diverging {
        Side::Left => Ok(-half_affinity(rates.big_n_r)?),
        Side::Right => half_affinity(rates.big_n_l),
    }
}

/// Default λ grid for the symmetry check: 101 points on `[−A−1, 1]`, which
/// is centred on the symmetry axis `−A/2`.
pub fn default_gc_grid(affinity: f64) -> Vec<f64> {
    // keep e^{±λ} far from overflow
    let limit = 600.0;
    let (lo, hi) = {
        let (a, b) = (-affinity - 1.0, 1.0);
        (a.min(b).max(-limit), a.max(b).min(limit))
    };
    linspace(lo, hi, 101)
}

/// `max |S(λ) − S(−λ−A)|` over the grid.
pub fn gc_residual(params: &ModelParams, lambda_grid: &[f64]) -> Result<f64> {
    if lambda_grid.is_empty() {
        return Err(Error::Domain("empty λ grid".into()));
    }
    let rates = make_rates(params)?;
    let a = affinity_from_rates(&rates)?.value();
    lambda_grid.iter().try_fold(0.0f64, |worst, &l| {
        let r = (cgf(&rates, &l)? - cgf(&rates, &(-l - a))?).abs();
        Ok(worst.max(r))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub occupied: f64,
    pub empty: f64,
}

pub fn steady_state(rates: &RateSet) -> SteadyState {
    let a = rates.total();
    SteadyState {
        occupied: (rates.beta_l + rates.beta_r) / a,
        empty: (rates.alpha_l + rates.alpha_r) / a,
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::jets::Jet;

    fn fig2() -> RateSet {
        make_rates(&ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0)).unwrap())
            .unwrap()
    }

    #[test]
    fn generator_entries() {
        let r = fig2();
        let g = tilted_generator(&r, &0.0);
        assert_relative_eq!(g.entries[0][0], -3.1, max_relative = 1e-15);
        assert_relative_eq!(g.entries[0][1], 1.1, max_relative = 1e-15);
        assert_relative_eq!(g.entries[1][0], 3.1, max_relative = 1e-15);
        assert_relative_eq!(g.entries[1][1], -1.1, max_relative = 1e-15);
        assert_eq!(g.column_sums(), [0.0, 0.0]);

        let g = tilted_generator(&r, &1.0);
        assert_eq!(g.entries[0][1], std::f64::consts::E * r.beta_l + r.beta_r);
    }

    #[test]
    fn generator_on_jets_conserves_probability() {
        let g = tilted_generator(&fig2(), &Jet::variable(0.0, 4));
        for s in g.column_sums() {
            assert_eq!(s.value(), 0.0);
        }
    }

    #[test]
    fn cgf_normalisation_and_slope() {
        let r = fig2();
        assert_eq!(cgf(&r, &0.0).unwrap(), 0.0);
        let s = cgf(&r, &Jet::variable(0.0, 2)).unwrap();
        // (α_R β_L − α_L β_R)/a = 0.9/4.2
        assert_relative_eq!(s.derivative(1), 0.9 / 4.2, max_relative = 1e-14);
        let a = affinity_from_rates(&r).unwrap().value();
        assert!(cgf(&r, &-a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn affinity_examples() {
        let eq = ModelParams::from_occupations((1.0, 2.0), (0.7, 0.7), (0.4, 0.4)).unwrap();
        assert_eq!(affinity(&eq).unwrap().value(), 0.0);

        let p = ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0)).unwrap();
        assert_relative_eq!(
            affinity(&p).unwrap().value(),
            5.5f64.ln(),
            max_relative = 1e-14
        );

        let p = ModelParams::from_temperatures(0.5, (1.0, 1.0), (0.7, 0.7), (1.0, 0.0)).unwrap();
        assert_relative_eq!(
            affinity(&p).unwrap().value(),
            0.531_601_193_501_856_6,
            max_relative = 1e-13
        );
    }

    #[test]
    fn unsqueezed_affinity_is_inverse_temperature_difference() {
        let p = ModelParams::from_temperatures(0.5, (1.0, 1.0), (0.7, 0.4), (0.0, 0.0)).unwrap();
        let expected = 0.5 * (1.0 / 0.4 - 1.0 / 0.7);
        assert_relative_eq!(
            affinity(&p).unwrap().value(),
            expected,
            max_relative = 1e-13
        );
    }

    #[test]
    fn affinity_saturation_examples() {
        let p = ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0)).unwrap();
        let sat = affinity_saturation(&p, Side::Left).unwrap();
        assert_relative_eq!(sat, 11f64.ln(), max_relative = 1e-14);
        let large = affinity(&p.with_squeeze(8.0, 0.0)).unwrap().value();
        assert!((large - sat).abs() <= 1e-6);

        let q = ModelParams::from_occupations((1.0, 1.0), (0.5, 0.5), (0.3, 0.3)).unwrap();
        assert_relative_eq!(
            affinity_saturation(&q, Side::Right).unwrap(),
            -affinity_saturation(&q.swapped(), Side::Left).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn gc_residual_on_figure_parameters() {
        for (xl, xr) in [(0.0, 0.0), (1.0, 0.5)] {
            let p = ModelParams::from_temperatures(0.5, (1.0, 1.0), (0.7, 0.4), (xl, xr)).unwrap();
            let a = affinity(&p).unwrap().value();
            let grid = linspace(-a - 1.0, 1.0, 101);
            assert!(gc_residual(&p, &grid).unwrap() <= 1e-12);
            assert!(gc_residual(&p, &[-a / 2.0]).unwrap() <= 1e-15);
        }
        let p = ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0)).unwrap();
        assert!(gc_residual(&p, &[]).is_err());
    }

    #[test]
    fn default_grid_is_centred_on_symmetry_axis() {
        for a in [1.7, -0.3, -4.0] {
            let g = default_gc_grid(a);
            assert_eq!(g.len(), 101);
            assert_relative_eq!(g[50], -a / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn steady_state_examples() {
        let r = fig2();
        let ss = steady_state(&r);
        assert_relative_eq!(ss.occupied, 1.1 / 4.2, max_relative = 1e-15);
        assert_relative_eq!(ss.occupied + ss.empty, 1.0, max_relative = 1e-15);

        let frozen = RateSet::from_raw(2.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(steady_state(&frozen).occupied, 0.0);
    }

    proptest! {
        #[test]
        fn gc_symmetry_holds(
            gl in 0.1f64..5.0, gr in 0.1f64..5.0,
            nl in 0.05f64..3.0, nr in 0.05f64..3.0,
            xl in 0.0f64..2.0, xr in 0.0f64..2.0,
            t in 0.0f64..1.0,
        ) {
            let p = ModelParams::from_occupations((gl, gr), (nl, nr), (xl, xr)).unwrap();
            let r = make_rates(&p).unwrap();
            let a = affinity_from_rates(&r).unwrap().value();
            let bound = a.abs() + 2.0;
            let l = -bound + 2.0 * bound * t;
            let s1 = cgf(&r, &l).unwrap();
            let s2 = cgf(&r, &(-l - a)).unwrap();
            prop_assert!((s1 - s2).abs() <= 1e-12 * s1.abs().max(1.0));
        }

        #[test]
        fn flux_identity(
            gl in 0.1f64..5.0, gr in 0.1f64..5.0,
            nl in 0.05f64..3.0, nr in 0.05f64..3.0,
            xl in 0.0f64..2.0, xr in 0.0f64..2.0,
        ) {
            let p = ModelParams::from_occupations((gl, gr), (nl, nr), (xl, xr)).unwrap();
            let r = make_rates(&p).unwrap();
            let ss = steady_state(&r);
            let current = r.beta_l * ss.empty - r.alpha_l * ss.occupied;
            let slope = cgf(&r, &Jet::variable(0.0, 1)).unwrap().derivative(1);
            prop_assert!((current - slope).abs() <= 1e-13 * r.total());
        }

        #[test]
        fn affinity_antisymmetric_under_exchange(
            n in 0.05f64..3.0, g in 0.1f64..5.0,
            xl in 0.0f64..2.0, xr in 0.0f64..2.0,
        ) {
            let p = ModelParams::from_occupations((g, g), (n, n), (xl, xr)).unwrap();
            let q = p.with_squeeze(xr, xl);
            prop_assert_eq!(affinity(&p).unwrap().value(), -affinity(&q).unwrap().value());
        }
    }
}
