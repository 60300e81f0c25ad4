//! Physical parameters and the squeezed jump rates.
//!
//! A squeezed thermal reservoir enters the Markovian dynamics only through
//! its effective occupation `N = cosh(2x)(n + 1/2) - 1/2`. The emission and
//! absorption rates of reservoir ν are then `α = Γ(1 + N)` and `β = Γ N`.

use std::fmt;

use crate::{Error, Result};

/// Reservoir label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

/// How the thermal state of a reservoir is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thermal {
    /// Temperature in units of energy.
    Temperature(f64),
    /// Bose–Einstein occupation at the site frequency.
    Occupation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    /// Coupling strength Γ (rate).
    pub gamma: f64,
    pub thermal: Thermal,
    /// Squeezing magnitude x ≥ 0.
    pub squeeze: f64,
}

impl ReservoirSpec {
    pub fn new(gamma: f64, thermal: Thermal, squeeze: f64) -> Result<Self> {
        let spec = ReservoirSpec {
            gamma,
            thermal,
            squeeze,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_occupation(gamma: f64, occupation: f64, squeeze: f64) -> Result<Self> {
        Self::new(gamma, Thermal::Occupation(occupation), squeeze)
    }

    pub fn with_temperature(gamma: f64, temperature: f64, squeeze: f64) -> Result<Self> {
        Self::new(gamma, Thermal::Temperature(temperature), squeeze)
    }

    pub fn validate(&self) -> Result<()> {
        positive("gamma", self.gamma)?;
        if !(self.squeeze >= 0.0 && self.squeeze.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "squeeze",
                value: self.squeeze,
                reason: "must be finite and non-negative",
            });
        }
        match self.thermal {
            Thermal::Temperature(t) => positive("temperature", t),
            Thermal::Occupation(n) => positive("occupation", n),
        }
    }

    /// Bose occupation n at the given site frequency.
    pub fn occupation(&self, omega0: f64) -> Result<f64> {
        match self.thermal {
            Thermal::Occupation(n) => Ok(n),
            Thermal::Temperature(t) => bose_occupation(omega0, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Site frequency ω₀.
    pub omega0: f64,
    pub left: ReservoirSpec,
    pub right: ReservoirSpec,
}

impl ModelParams {
    pub fn new(omega0: f64, left: ReservoirSpec, right: ReservoirSpec) -> Result<Self> {
        let params = ModelParams {
            omega0,
            left,
            right,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters given directly by occupations, with ω₀ = 0.5.
    pub fn from_occupations(
        gamma: (f64, f64),
        occupation: (f64, f64),
        squeeze: (f64, f64),
    ) -> Result<Self> {
        Self::new(
            0.5,
            ReservoirSpec::with_occupation(gamma.0, occupation.0, squeeze.0)?,
            ReservoirSpec::with_occupation(gamma.1, occupation.1, squeeze.1)?,
        )
    }

    pub fn from_temperatures(
        omega0: f64,
        gamma: (f64, f64),
        temperature: (f64, f64),
        squeeze: (f64, f64),
    ) -> Result<Self> {
        Self::new(
            omega0,
            ReservoirSpec::with_temperature(gamma.0, temperature.0, squeeze.0)?,
            ReservoirSpec::with_temperature(gamma.1, temperature.1, squeeze.1)?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega0", self.omega0)?;
        self.left.validate()?;
        self.right.validate()
    }

    pub fn reservoir(&self, side: Side) -> &ReservoirSpec {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn reservoir_mut(&mut self, side: Side) -> &mut ReservoirSpec {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// Bose occupations `(n_L, n_R)`.
    pub fn occupations(&self) -> Result<(f64, f64)> {
        Ok((
            self.left.occupation(self.omega0)?,
            self.right.occupation(self.omega0)?,
        ))
    }

    pub fn with_squeeze(mut self, x_left: f64, x_right: f64) -> Self {
        self.left.squeeze = x_left;
        self.right.squeeze = x_right;
        self
    }

    /// The same reservoirs with squeezing switched off.
    pub fn unsqueezed(self) -> Self {
        self.with_squeeze(0.0, 0.0)
    }

    /// Full exchange of the two reservoirs.
    pub fn swapped(self) -> Self {
        ModelParams {
            omega0: self.omega0,
            left: self.right,
            right: self.left,
        }
    }
}

/// Jump rates of the two-state process, together with the quantities they
/// were built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma_l: f64,
    pub gamma_r: f64,
    /// Emission rates (occupied → empty).
    pub alpha_l: f64,
    pub alpha_r: f64,
    /// Absorption rates (empty → occupied).
    pub beta_l: f64,
    pub beta_r: f64,
    /// Bose occupations.
    pub n_l: f64,
    pub n_r: f64,
    /// Squeezed occupations.
    pub big_n_l: f64,
    pub big_n_r: f64,
}

impl RateSet {
    /// Builds a rate set straight from the four jump rates. Occupations are
    /// inferred as `β/(α-β)` and no squeezing is assumed.
    pub fn from_raw(alpha_l: f64, beta_l: f64, alpha_r: f64, beta_r: f64) -> Result<Self> {
        for (name, v) in [("beta_l", beta_l), ("beta_r", beta_r)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite and non-negative",
                });
            }
        }
        if !alpha_l.is_finite() || alpha_l <= beta_l {
            return Err(Error::InvalidParameter {
                name: "alpha_l",
                value: alpha_l,
                reason: "must exceed beta_l",
            });
        }
        if !alpha_r.is_finite() || alpha_r <= beta_r {
            return Err(Error::InvalidParameter {
                name: "alpha_r",
                value: alpha_r,
                reason: "must exceed beta_r",
            });
        }
        let gamma_l = alpha_l - beta_l;
        let gamma_r = alpha_r - beta_r;
        let big_n_l = beta_l / gamma_l;
        let big_n_r = beta_r / gamma_r;
        Ok(RateSet {
            gamma_l,
            gamma_r,
            alpha_l,
            alpha_r,
            beta_l,
            beta_r,
            n_l: big_n_l,
            n_r: big_n_r,
            big_n_l,
            big_n_r,
        })
    }

    /// `a = α_L + α_R + β_L + β_R`, the total relaxation rate.
    pub fn total(&self) -> f64 {
        self.gamma_l * (1.0 + 2.0 * self.big_n_l) + self.gamma_r * (1.0 + 2.0 * self.big_n_r)
    }

    pub fn alpha(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.alpha_l,
            Side::Right => self.alpha_r,
        }
    }

    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.beta_l,
            Side::Right => self.beta_r,
        }
    }
}

/// Bose–Einstein occupation `1/(e^{ω₀/T} - 1)`.
pub fn bose_occupation(omega0: f64, temperature: f64) -> Result<f64> {
    positive("omega0", omega0)?;
    positive("temperature", temperature)?;
    Ok(1.0 / (omega0 / temperature).exp_m1())
}

/// Squeezed occupation `cosh(2x)(n + 1/2) - 1/2`.
pub fn squeezed_occupation(n: f64, x: f64) -> Result<f64> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "occupation",
            value: n,
            reason: "must be finite and non-negative",
        });
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "squeeze",
            value: x,
            reason: "must be finite and non-negative",
        });
    }
    // cosh(2x)(n+½)−½ = n + (cosh(2x)−1)(n+½), written to keep N = n exactly at x = 0
    let excess = 2.0 * x.sinh().powi(2);
    Ok(n + excess * (n + 0.5))
}

pub fn make_rates(params: &ModelParams) -> Result<RateSet> {
    params.validate()?;
    let (n_l, n_r) = params.occupations()?;
    let big_n_l = squeezed_occupation(n_l, params.left.squeeze)?;
    let big_n_r = squeezed_occupation(n_r, params.right.squeeze)?;
    let (gamma_l, gamma_r) = (params.left.gamma, params.right.gamma);
    Ok(RateSet {
        gamma_l,
        gamma_r,
        alpha_l: gamma_l * (1.0 + big_n_l),
        alpha_r: gamma_r * (1.0 + big_n_r),
        beta_l: gamma_l * big_n_l,
        beta_r: gamma_r * big_n_r,
        n_l,
        n_r,
        big_n_l,
        big_n_r,
    })
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
