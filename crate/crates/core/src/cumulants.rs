//! Cumulants of the exchanged boson number.
//!
//! The jet engine applied to the eigenvalue CGF is the reference for every
//! order. The closed-form expressions below are evaluated independently in
//! the paper convention (`PAPER_SCALE` × canonical) so they can be compared
//! against it. Several printed forms are known to be inconsistent with the
//! eigenvalue; those are kept as explicit `*AsPrinted` variants and collected
//! by [`errata_report`].
//!
//! Shorthand used below: `ñ = 1 + 2n`, `c = cosh 2x`, `u = ñc = 1 + 2N`,
//! `Γ = Γ_L Γ_R`, `D = Γ_L u_L + Γ_R u_R`.

use crate::cgf::{affinity_from_rates, cgf, PAPER_SCALE};
use crate::jets::Jet;
use crate::model::{make_rates, ModelParams, RateSet, Side};
use crate::{Error, Result};

/// Largest cumulant order accepted by [`cumulants`].
pub const MAX_ORDER: usize = 12;

/// Relative deviation above which a closed form is flagged.
pub const DISAGREEMENT_TOLERANCE: f64 = 1e-6;

/// Canonical cumulant rates `j⁽¹⁾ … j⁽ᴷ⁾`.
pub fn cumulant_rates(rates: &RateSet, order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::Domain("cumulant order must be at least 1".into()));
    }
    let s = cgf(rates, &Jet::variable(0.0, order))?;
    Ok(s.derivatives())
}

/// Paper-convention cumulants for a parameter set.
pub fn paper_cumulants(params: &ModelParams, order: usize) -> Result<Vec<f64>> {
    Ok(cumulant_rates(&make_rates(params)?, order)?
        .into_iter()
        .map(|j| PAPER_SCALE * j)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CumulantReport {
    pub order: usize,
    /// Eigenvalue convention, index 0 holds j⁽¹⁾.
    pub canonical: Vec<f64>,
    pub paper: Vec<f64>,
    /// Canonical cumulants at the same Γ, n with both squeezings off.
    pub unsqueezed: Vec<f64>,
    /// `j⁽ⁿ⁾/j⁽ⁿ⁾₀`; `None` where the unsqueezed cumulant vanishes.
    pub scaled: Vec<Option<f64>>,
    /// `j⁽²⁾/j⁽¹⁾`; `None` at zero flux.
    pub fano: Option<f64>,
    pub affinity: f64,
}

pub fn cumulants(params: &ModelParams, order: usize) -> Result<CumulantReport> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::Domain(format!(
            "cumulant order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    let rates = make_rates(params)?;
    let canonical = cumulant_rates(&rates, order.max(2))?;
    let unsqueezed = cumulant_rates(&make_rates(&params.unsqueezed())?, order)?;
    let fano = (canonical[0] != 0.0).then(|| canonical[1] / canonical[0]);
    let canonical = canonical[..order].to_vec();
    Ok(CumulantReport {
        order,
        paper: canonical.iter().map(|j| PAPER_SCALE * j).collect(),
        scaled: ratios(&canonical, &unsqueezed),
        canonical,
        unsqueezed,
        fano,
        affinity: affinity_from_rates(&rates)?.value(),
    })
}

/// `C⁽ⁿ⁾ = j⁽ⁿ⁾/j⁽ⁿ⁾₀`, independent of the normalisation convention.
pub fn scaled_ratios(params: &ModelParams, order: usize) -> Result<Vec<Option<f64>>> {
    let squeezed = cumulant_rates(&make_rates(params)?, order)?;
    let unsqueezed = cumulant_rates(&make_rates(&params.unsqueezed())?, order)?;
    Ok(ratios(&squeezed, &unsqueezed))
}

fn ratios(num: &[f64], den: &[f64]) -> Vec<Option<f64>> {
    num.iter()
        .zip(den)
        .map(|(&n, &d)| (d != 0.0).then(|| n / d))
        .collect()
}

struct Shorthand {
    gl: f64,
    gr: f64,
    g: f64,
    nl: f64,
    nr: f64,
    tl: f64,
    tr: f64,
    cl: f64,
    cr: f64,
    ul: f64,
    ur: f64,
    /// u_L − u_R = 2(N_L − N_R)
    du: f64,
}

impl Shorthand {
    fn new(params: &ModelParams) -> Result<Self> {
        let rates = make_rates(params)?;
        let (gl, gr) = (rates.gamma_l, rates.gamma_r);
        Ok(Shorthand {
            gl,
            gr,
            g: gl * gr,
            nl: rates.n_l,
            nr: rates.n_r,
            tl: 1.0 + 2.0 * rates.n_l,
            tr: 1.0 + 2.0 * rates.n_r,
            cl: (2.0 * params.left.squeeze).cosh(),
            cr: (2.0 * params.right.squeeze).cosh(),
            ul: 1.0 + 2.0 * rates.big_n_l,
            ur: 1.0 + 2.0 * rates.big_n_r,
            du: 2.0 * (rates.big_n_l - rates.big_n_r),
        })
    }

    fn d(&self) -> f64 {
        self.gl * self.ul + self.gr * self.ur
    }

    fn d0(&self) -> f64 {
        self.gl * self.tl + self.gr * self.tr
    }
}

fn require_symmetric_squeeze(params: &ModelParams) -> Result<()> {
    if params.left.squeeze == params.right.squeeze {
        Ok(())
    } else {
        Err(Error::Constraint(format!(
            "symmetric-squeeze form needs x_L = x_R, got {} and {}",
            params.left.squeeze, params.right.squeeze
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxVariant {
    General,
    /// Squeezing-free form valid whenever x_L = x_R.
    SymmetricSqueeze,
}

/// First cumulant in the paper convention.
pub fn closed_flux(params: &ModelParams, variant: FluxVariant) -> Result<f64> {
    let s = Shorthand::new(params)?;
    Ok(match variant {
        FluxVariant::General => s.g * s.du / s.d(),
        FluxVariant::SymmetricSqueeze => 2.0 * s.g * (s.nl - s.nr) / s.d0(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseVariant {
    General,
    /// x_L = x_R; sign-corrected form that agrees with the eigenvalue.
    SymmetricSqueeze,
    /// x_L = x_R; the form with a leading minus sign as printed.
    SymmetricSqueezeAsPrinted,
    /// Both squeezings off (does not read x).
    Unsqueezed,
    /// Γ_L = Γ_R and n_L = n_R, arbitrary squeezing.
    EqualTempSymmetric,
}

/// Second cumulant in the paper convention.
pub fn closed_noise(params: &ModelParams, variant: NoiseVariant) -> Result<f64> {
    let s = Shorthand::new(params)?;
    let g = s.g;
    match variant {
        NoiseVariant::General => {
            let d = s.d();
            Ok(g * ((s.ul * s.ur - 1.0) * d * d - g * s.du * s.du) / d.powi(3))
        }
        NoiseVariant::SymmetricSqueeze | NoiseVariant::SymmetricSqueezeAsPrinted => {
            require_symmetric_squeeze(params)?;
            let d0 = s.d0();
            let c = s.cl;
            let coupling = (s.gl + s.gr) * (s.gl * s.tl * s.tl + s.gr * s.tr * s.tr);
            let squeezed = s.tl * s.tr * d0 * d0 * c * c;
            let bracket = if variant == NoiseVariant::SymmetricSqueeze {
                squeezed - coupling
            } else {
                -(coupling + squeezed)
            };
            Ok(g * bracket / (c * d0.powi(3)))
        }
        NoiseVariant::Unsqueezed => {
            let d0 = s.d0();
            let dn = s.nl - s.nr;
            Ok(2.0 * g * (2.0 * s.nl * s.nr + s.nl + s.nr) / d0
                - 4.0 * g * g * dn * dn / d0.powi(3))
        }
        NoiseVariant::EqualTempSymmetric => {
            if s.gl != s.gr || s.nl != s.nr {
                return Err(Error::Constraint(format!(
                    "equal-temperature form needs Γ_L = Γ_R and n_L = n_R, got Γ = ({}, {}), n = ({}, {})",
                    s.gl, s.gr, s.nl, s.nr
                )));
            }
            let (cl, cr, t2) = (s.cl, s.cr, s.tr * s.tr);
            let num =
                t2 * cl.powi(3) * cr + t2 * cl * cr.powi(3) + 2.0 * cl * cl * (t2 * cr * cr - 1.0)
                    - 2.0 * cr * cr;
            Ok(s.gl * num / (s.tr * (cl + cr).powi(3)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewnessVariant {
    /// Asymmetric form, evaluated as printed.
    General,
    /// Squeezing-free j⁽³⁾₀ with the Γ² correction in its last term.
    Symmetric,
    /// j⁽³⁾₀ as printed (last term `12Γ(n_L − n_R)²`).
    SymmetricAsPrinted,
}

/// A closed-form third cumulant next to the jet value it is judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewnessCheck {
    pub closed: f64,
    /// `PAPER_SCALE × j⁽³⁾` from the jet engine.
    pub jet: f64,
    pub disagrees: bool,
}

pub fn closed_skewness(params: &ModelParams, variant: SkewnessVariant) -> Result<SkewnessCheck> {
    let s = Shorthand::new(params)?;
    let g = s.g;
    let closed = match variant {
        SkewnessVariant::General => {
            let (nl, nr) = (s.nl, s.nr);
            let (xl, xr) = (params.left.squeeze, params.right.squeeze);
            // shorthand ñ_ν(x) = 1 + 2 n_ν cosh(2x)
            let t = |n: f64, x: f64| 1.0 + 2.0 * n * (2.0 * x).cosh();
            let (tl, tr) = (t(nl, xl), t(nr, xr));
            let tr_at_xl = t(nr, xl);
            let tr_doubled = t(nr, 2.0 * xr);
            let (gl, gr) = (s.gl, s.gr);
            let inner = gl.powi(4) * tl.powi(4)
                + gl.powi(3) * gr * tl.powi(3) * tr_at_xl.powi(3)
                + 3.0 * gl * gl * gr * (gl + gr) * tl * tl
                + 0.5
                    * gr
                    * gr
                    * tr
                    * tr
                    * (6.0 * gl * gl
                        + 6.0 * g
                        + gr * gr * tr_doubled * tr_doubled
                        + gr * gr * s.tr * s.tr)
                + gl * gr.powi(3) * tl * tr.powi(3);
            g * (tl - tr) * inner / (gl * tl + gr * tr).powi(5)
        }
        SkewnessVariant::Symmetric | SkewnessVariant::SymmetricAsPrinted => {
            let d0 = s.d0();
            let dn = s.nl - s.nr;
            let last = if variant == SkewnessVariant::Symmetric {
                12.0 * g * g * dn * dn
            } else {
                12.0 * g * dn * dn
            };
            2.0 * g
                * dn
                * (d0.powi(4) - 6.0 * g * (2.0 * s.nl * s.nr + s.nl + s.nr) * d0 * d0 + last)
                / d0.powi(5)
        }
    };
    let jet = PAPER_SCALE * cumulant_rates(&make_rates(params)?, 3)?[2];
    Ok(SkewnessCheck {
        closed,
        jet,
        disagrees: relative_deviation(closed, jet) > DISAGREEMENT_TOLERANCE,
    })
}

/// Squeezing of `varying` at which the flux reverses, with the other
/// reservoir held fixed: `½ arccosh(ñ_ν cosh(2x_ν)/ñ_ν')`, ν the fixed side.
pub fn switching_point(params: &ModelParams, varying: Side) -> Result<f64> {
    let s = Shorthand::new(params)?;
    let ratio = match varying {
        Side::Left => s.ur / s.tl,
        Side::Right => s.ul / s.tr,
    };
    if ratio < 1.0 {
        return Err(Error::NoSwitch { ratio });
    }
    Ok(0.5 * ratio.acosh())
}

/// Which printed saturation formula a derived limit matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationMatch {
    /// `Γ_ν ñ_ν cosh(2x_ν)`, printed as the odd-order limit.
    OddFormula,
    /// `Γ_ν`, printed as the even-order limit.
    EvenFormula,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationReport {
    pub diverging: Side,
    /// `Γ_ν ñ_ν cosh(2x_ν)` of the non-diverging side.
    pub paper_odd_candidate: f64,
    /// `Γ_ν` of the non-diverging side.
    pub paper_even_candidate: f64,
    /// Paper-convention cumulants with the diverging squeeze at 8 and 10.
    pub at_8: Vec<f64>,
    pub at_10: Vec<f64>,
    /// Richardson extrapolation in `1/cosh(2x)` of the two probes.
    pub derived: Vec<f64>,
    pub matches: Vec<SaturationMatch>,
}

impl SaturationReport {
    pub fn derived_odd(&self) -> f64 {
        self.derived[0]
    }

    pub fn derived_even(&self) -> f64 {
        self.derived[1]
    }

    /// True when odd orders land on the even formula and vice versa.
    pub fn parity_transposed(&self) -> bool {
        self.matches.iter().enumerate().all(|(i, m)| {
            let odd = i % 2 == 0;
            *m == if odd {
                SaturationMatch::EvenFormula
            } else {
                SaturationMatch::OddFormula
            }
        })
    }

    /// `|j(8) − j(10)|/|j(10)|` for order `n` (1-based).
    pub fn plateau_deviation(&self, n: usize) -> f64 {
        relative_deviation(self.at_8[n - 1], self.at_10[n - 1])
    }
}

pub fn saturation_limits(
    params: &ModelParams,
    diverging: Side,
    order: usize,
) -> Result<SaturationReport> {
    let order = order.max(2);
    let fixed = diverging.other();
    let rates = make_rates(params)?;
    let (gamma, u) = match fixed {
        Side::Left => (rates.gamma_l, 1.0 + 2.0 * rates.big_n_l),
        Side::Right => (rates.gamma_r, 1.0 + 2.0 * rates.big_n_r),
    };
    let probe = |x: f64| {
        let mut p = *params;
        p.reservoir_mut(diverging).squeeze = x;
        paper_cumulants(&p, order)
    };
    let at_8 = probe(8.0)?;
    let at_10 = probe(10.0)?;
    let (e8, e10) = (1.0 / 16f64.cosh(), 1.0 / 20f64.cosh());
    let derived: Vec<f64> = at_8
        .iter()
        .zip(&at_10)
        .map(|(j8, j10)| (e8 * j10 - e10 * j8) / (e8 - e10))
        .collect();
    let matches = derived
        .iter()
        .map(|&d| {
            if relative_deviation(d, gamma * u) <= DISAGREEMENT_TOLERANCE {
                SaturationMatch::OddFormula
            } else if relative_deviation(d, gamma) <= DISAGREEMENT_TOLERANCE {
                SaturationMatch::EvenFormula
            } else {
                SaturationMatch::Neither
            }
        })
        .collect();
    Ok(SaturationReport {
        diverging,
        paper_odd_candidate: gamma * u,
        paper_even_candidate: gamma,
        at_8,
        at_10,
        derived,
        matches,
    })
}

/// One printed expression judged against the jet engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Erratum {
    pub item: &'static str,
    pub printed: f64,
    pub reference: f64,
    pub consistent: bool,
}

/// Compares the printed closed forms that are known to be fragile against
/// the jet values at the given parameters.
pub fn errata_report(params: &ModelParams) -> Result<Vec<Erratum>> {
    let j = paper_cumulants(params, 3)?;
    let mut out = Vec::new();
    let mut push = |item, printed: f64, reference: f64| {
        out.push(Erratum {
            item,
            printed,
            reference,
            consistent: relative_deviation(printed, reference) <= DISAGREEMENT_TOLERANCE,
        })
    };
    push(
        "flux (general)",
        closed_flux(params, FluxVariant::General)?,
        j[0],
    );
    push(
        "noise (general)",
        closed_noise(params, NoiseVariant::General)?,
        j[1],
    );
    let sym = params.with_squeeze(params.left.squeeze, params.left.squeeze);
    let j_sym = paper_cumulants(&sym, 3)?;
    push(
        "noise (symmetric squeeze, as printed)",
        closed_noise(&sym, NoiseVariant::SymmetricSqueezeAsPrinted)?,
        j_sym[1],
    );
    push(
        "noise (symmetric squeeze, sign-corrected)",
        closed_noise(&sym, NoiseVariant::SymmetricSqueeze)?,
        j_sym[1],
    );
    let skew = closed_skewness(params, SkewnessVariant::General)?;
    push("skewness (general, as printed)", skew.closed, skew.jet);
    let skew0 = closed_skewness(params, SkewnessVariant::SymmetricAsPrinted)?;
    push("skewness j3_0 (as printed)", skew0.closed, skew0.jet);
    let sat = saturation_limits(params, Side::Left, 4)?;
    push(
        "odd saturation = Γ_ν ñ_ν cosh(2x_ν) (as printed)",
        sat.paper_odd_candidate,
        sat.derived_odd(),
    );
    push(
        "even saturation = Γ_ν (as printed)",
        sat.paper_even_candidate,
        sat.derived_even(),
    );
    Ok(out)
}

pub(crate) fn relative_deviation(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        (value - reference).abs() / reference.abs()
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn fig2(xl: f64, xr: f64) -> ModelParams {
        ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (xl, xr)).unwrap()
    }

    #[test]
    fn equilibrium_has_no_flux() {
        let p = ModelParams::from_occupations((1.0, 3.0), (0.4, 0.4), (0.7, 0.7)).unwrap();
        let r = cumulants(&p, 5).unwrap();
        assert_eq!(r.canonical[0], 0.0);
        assert_eq!(r.canonical[2], 0.0);
        assert_eq!(r.scaled[0], None);
        assert_eq!(r.fano, None);
    }

    #[test]
    fn figure2_values() {
        let r = cumulants(&fig2(0.0, 0.0), 4).unwrap();
        assert_relative_eq!(r.paper[0], 1.8 / 4.2, max_relative = 1e-14);
        // 2.6/4.2 − 3.24/74.088, mpmath
        assert_relative_eq!(r.paper[1], 0.575_315_840_621_963_1, max_relative = 1e-13);
        assert_relative_eq!(
            r.canonical[1],
            0.575_315_840_621_963_1 / 2.0,
            max_relative = 1e-13
        );
        assert!(r.scaled.iter().all(|c| *c == Some(1.0)));
        assert_relative_eq!(r.affinity, 5.5f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn order_bounds() {
        assert!(cumulants(&fig2(0.0, 0.0), 0).is_err());
        assert!(cumulants(&fig2(0.0, 0.0), MAX_ORDER + 1).is_err());
        assert_eq!(cumulants(&fig2(0.0, 0.0), 1).unwrap().canonical.len(), 1);
        assert!(cumulants(&fig2(0.0, 0.0), 1).unwrap().fano.is_some());
    }

    #[test]
    fn flux_forms() {
        for x in [0.0, 0.3, 1.2] {
            let p = fig2(x, x);
            assert_relative_eq!(
                closed_flux(&p, FluxVariant::General).unwrap(),
                closed_flux(&p, FluxVariant::SymmetricSqueeze).unwrap(),
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            closed_flux(&fig2(0.0, 0.0), FluxVariant::General).unwrap(),
            0.428_571_428_571_428_6,
            max_relative = 1e-14
        );
        // (u − 1.2)/(u + 1.2), u = 3 cosh 16, mpmath
        assert_relative_eq!(
            closed_flux(&fig2(8.0, 0.0), FluxVariant::General).unwrap(),
            0.999_999_819_943_736_7,
            max_relative = 1e-14
        );
    }

    #[test]
    fn noise_forms() {
        let p = fig2(0.0, 0.0);
        assert_relative_eq!(
            closed_noise(&p, NoiseVariant::Unsqueezed).unwrap(),
            0.575_315_840_621_963_1,
            max_relative = 1e-13
        );
        let eq = ModelParams::from_occupations((1.0, 1.0), (1.0, 1.0), (0.0, 0.0)).unwrap();
        assert_relative_eq!(
            closed_noise(&eq, NoiseVariant::EqualTempSymmetric).unwrap(),
            4.0 / 3.0,
            max_relative = 1e-14
        );
        let a = eq.with_squeeze(0.3, 1.1);
        let b = eq.with_squeeze(1.1, 0.3);
        assert_relative_eq!(
            closed_noise(&a, NoiseVariant::EqualTempSymmetric).unwrap(),
            closed_noise(&b, NoiseVariant::EqualTempSymmetric).unwrap(),
            max_relative = 1e-14
        );
        assert!(closed_noise(&p, NoiseVariant::EqualTempSymmetric).is_err());
        assert!(closed_noise(&fig2(0.1, 0.2), NoiseVariant::SymmetricSqueeze).is_err());
    }

    #[test]
    fn symmetric_noise_sign() {
        let p = fig2(0.6, 0.6);
        let jet = paper_cumulants(&p, 2).unwrap()[1];
        let fixed = closed_noise(&p, NoiseVariant::SymmetricSqueeze).unwrap();
        let printed = closed_noise(&p, NoiseVariant::SymmetricSqueezeAsPrinted).unwrap();
        assert_relative_eq!(fixed, jet, max_relative = 1e-12);
        assert!(printed < 0.0);
    }

    #[test]
    fn skewness_forms() {
        let p = fig2(0.0, 0.0);
        let sym = closed_skewness(&p, SkewnessVariant::Symmetric).unwrap();
        assert_relative_eq!(sym.closed, sym.jet, max_relative = 1e-10);
        assert!(!sym.disagrees);

        let at_x = closed_skewness(&fig2(0.7, 0.7), SkewnessVariant::Symmetric).unwrap();
        assert_eq!(at_x.closed, sym.closed);

        let general = closed_skewness(&fig2(0.5, 0.2), SkewnessVariant::General).unwrap();
        assert!(general.disagrees);

        // the printed j3_0 is only right when Γ_L Γ_R = 1
        let q = ModelParams::from_occupations((2.0, 0.7), (1.0, 0.1), (0.0, 0.0)).unwrap();
        assert!(
            closed_skewness(&q, SkewnessVariant::SymmetricAsPrinted)
                .unwrap()
                .disagrees
        );
        assert!(
            !closed_skewness(&q, SkewnessVariant::Symmetric)
                .unwrap()
                .disagrees
        );
    }

    #[test]
    fn switching_points() {
        let p = ModelParams::from_occupations((1.0, 1.0), (0.6, 0.6), (0.0, 0.5)).unwrap();
        assert_relative_eq!(
            switching_point(&p, Side::Left).unwrap(),
            0.5,
            max_relative = 1e-14
        );

        // ½ arccosh(1.2 cosh 2 / 3), mpmath
        let x = switching_point(&fig2(0.0, 1.0), Side::Left).unwrap();
        assert_relative_eq!(x, 0.483_387_101_319_372_4, max_relative = 1e-14);
        let before = closed_flux(&fig2(x - 0.01, 1.0), FluxVariant::General).unwrap();
        let after = closed_flux(&fig2(x + 0.01, 1.0), FluxVariant::General).unwrap();
        assert!(before * after < 0.0);

        assert!(matches!(
            switching_point(&fig2(0.0, 0.0), Side::Left),
            Err(Error::NoSwitch { .. })
        ));
    }

    #[test]
    fn saturation_parity() {
        let s = saturation_limits(&fig2(0.0, 0.0), Side::Left, 6).unwrap();
        assert_relative_eq!(s.derived_odd(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(s.derived_even(), 1.2, max_relative = 1e-9);
        assert!(s.plateau_deviation(1) <= 1e-6);
        assert!(s.plateau_deviation(2) <= 1e-6);
        for (d, n) in s.derived.iter().zip(1..) {
            let expected = if n % 2 == 1 { 1.0 } else { 1.2 };
            assert!((d - expected).abs() <= 1e-9 * expected);
        }
        assert!(s.parity_transposed());
    }

    #[test]
    fn scaled_ratio_examples() {
        let c = scaled_ratios(&fig2(0.8, 0.8), 4).unwrap();
        assert_relative_eq!(c[0].unwrap(), 1.0, max_relative = 1e-13);
        assert!(c[1].unwrap() > 1.0);
        // Symmetric squeezing leaves only the flux unchanged. Third derivative
        // of the eigenvalue at cosh(2x) = 2 and 1 (sympy, cross-checked with
        // finite differences of a numerical eigenvalue).
        let x = 2f64.acosh() / 2.0;
        let c = scaled_ratios(&fig2(x, x), 3).unwrap();
        assert_relative_eq!(
            c[2].unwrap(),
            0.093_874_576_069_494_84 / 0.126_227_167_251_740_32,
            max_relative = 1e-12
        );
        let c = scaled_ratios(&fig2(0.4, 1.3), 2).unwrap();
        assert!(c[1].unwrap() > 1.0);
    }

    #[test]
    fn errata_flags() {
        let report = errata_report(&fig2(0.5, 0.2)).unwrap();
        let find = |name: &str| report.iter().find(|e| e.item == name).unwrap().consistent;
        assert!(find("flux (general)"));
        assert!(find("noise (general)"));
        assert!(!find("noise (symmetric squeeze, as printed)"));
        assert!(find("noise (symmetric squeeze, sign-corrected)"));
        assert!(!find("skewness (general, as printed)"));
        assert!(!find("odd saturation = Γ_ν ñ_ν cosh(2x_ν) (as printed)"));
    }
}
