//! Parameter sweeps, the thermodynamic uncertainty product, flux-reversal
//! root finding and the data behind each figure.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cgf::{affinity_from_rates, cgf, linspace, PAPER_SCALE};
use crate::cumulants::{cumulant_rates, cumulants};
use crate::model::{make_rates, ModelParams, RateSet, Side, Thermal};
use crate::table::{Cell, Table};
use crate::{Error, Result};

/// TUR bound `FA ≥ 2` with `k_B = 1`.
pub const TUR_BOUND: f64 = 2.0;

/// Slack allowed below [`TUR_BOUND`] when flagging a row.
pub const TUR_SLACK: f64 = 1e-12;

/// Grid size for line plots.
pub const LINE_POINTS: usize = 201;

/// Grid size per axis for density plots.
pub const DENSITY_POINTS: usize = 101;

/// A scalar model parameter addressable by its config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Omega0,
    GammaL,
    GammaR,
    TempL,
    TempR,
    OccL,
    OccR,
    XL,
    XR,
}

impl Param {
    pub const ALL: [Param; 9] = [
        Param::Omega0,
        Param::GammaL,
        Param::GammaR,
        Param::TempL,
        Param::TempR,
        Param::OccL,
        Param::OccR,
        Param::XL,
        Param::XR,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::Omega0 => "omega0",
            Param::GammaL => "gamma_l",
            Param::GammaR => "gamma_r",
            Param::TempL => "temp_l",
            Param::TempR => "temp_r",
            Param::OccL => "occ_l",
            Param::OccR => "occ_r",
            Param::XL => "x_l",
            Param::XR => "x_r",
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            Param::Omega0 => None,
            Param::GammaL | Param::TempL | Param::OccL | Param::XL => Some(Side::Left),
            Param::GammaR | Param::TempR | Param::OccR | Param::XR => Some(Side::Right),
        }
    }

    /// Sets the parameter without validating the result.
    pub fn set(self, params: &mut ModelParams, value: f64) {
        let Some(side) = self.side() else {
            params.omega0 = value;
            return;
        };
        let r = params.reservoir_mut(side);
        match self {
            Param::GammaL | Param::GammaR => r.gamma = value,
            Param::TempL | Param::TempR => r.thermal = Thermal::Temperature(value),
            Param::OccL | Param::OccR => r.thermal = Thermal::Occupation(value),
            Param::XL | Param::XR => r.squeeze = value,
            Param::Omega0 => unreachable!(),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Param::ALL
            .into_iter()
            .find(|p| p.key() == key)
            .ok_or_else(|| Error::UnknownParameter(s.to_owned()))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Applies assignments in order and validates the outcome.
pub fn apply(mut params: ModelParams, assignments: &[(Param, f64)]) -> Result<ModelParams> {
    for &(p, v) in assignments {
        p.set(&mut params, v);
    }
    params.validate()?;
    Ok(params)
}

/// One swept parameter and its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub grid: Vec<f64>,
}

impl Axis {
    pub fn new(param: Param, grid: Vec<f64>) -> Result<Axis> {
        if grid.is_empty() {
            return Err(Error::Domain(format!("empty grid for {param}")));
        }
        Ok(Axis { param, grid })
    }

    pub fn linspace(param: Param, lo: f64, hi: f64, points: usize) -> Result<Axis> {
        Axis::new(param, linspace(lo, hi, points))
    }
}

/// `name=start:stop:points` or `name=v1,v2,...`.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Domain(format!("axis `{s}`: {why}"));
        let (name, spec) = s.split_once('=').ok_or_else(|| bad("expected name=grid"))?;
        let param: Param = name.parse()?;
        let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("bad number"));
        if let [lo, hi, n] = spec.split(':').collect::<Vec<_>>()[..] {
            let n: usize = n.trim().parse().map_err(|_| bad("bad point count"))?;
            if n == 0 {
                return Err(bad("point count must be positive"));
            }
            return Axis::linspace(param, number(lo)?, number(hi)?, n);
        }
        let grid = spec.split(',').map(number).collect::<Result<Vec<_>>>()?;
        Axis::new(param, grid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x_l: f64,
    pub x_r: f64,
    pub n_l: f64,
    pub n_r: f64,
    pub gamma_l: f64,
    pub gamma_r: f64,
    pub affinity: f64,
    /// Paper-convention `j⁽¹⁾ … j⁽⁴⁾`.
    pub j: [f64; 4],
    pub scaled: [Option<f64>; 4],
    pub fano: Option<f64>,
    pub fa: Option<f64>,
    /// `FA ≥ 2 − 1e−12`; vacuously true at zero flux.
    pub tur_ok: bool,
}

impl SweepRow {
    pub fn evaluate(params: &ModelParams) -> Result<SweepRow> {
        let rates = make_rates(params)?;
        let report = cumulants(params, 4)?;
        let fa = report
            .fano
            .map(|_| fano_affinity(&rates, report.canonical[1]));
        let pick = |i: usize| report.scaled[i];
        Ok(SweepRow {
            x_l: params.left.squeeze,
            x_r: params.right.squeeze,
            n_l: rates.n_l,
            n_r: rates.n_r,
            gamma_l: rates.gamma_l,
            gamma_r: rates.gamma_r,
            affinity: report.affinity,
            j: [
                report.paper[0],
                report.paper[1],
                report.paper[2],
                report.paper[3],
            ],
            scaled: [pick(0), pick(1), pick(2), pick(3)],
            fano: report.fano,
            fa,
            tur_ok: fa.is_none_or(|v| v >= TUR_BOUND - TUR_SLACK),
        })
    }

    pub const HEADER: [&'static str; 18] = [
        "x_l", "x_r", "n_l", "n_r", "gamma_l", "gamma_r", "A", "j1", "j2", "j3", "j4", "C1", "C2",
        "C3", "C4", "F", "FA", "tur_ok",
    ];

    pub fn header() -> Vec<&'static str> {
        Self::HEADER.to_vec()
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = vec![
            self.x_l.into(),
            self.x_r.into(),
            self.n_l.into(),
            self.n_r.into(),
            self.gamma_l.into(),
            self.gamma_r.into(),
            self.affinity.into(),
        ];
        out.extend(self.j.iter().map(|&v| Cell::from(v)));
        out.extend(self.scaled.iter().map(|&v| Cell::from(v)));
        out.extend([self.fano.into(), self.fa.into(), self.tur_ok.into()]);
        out
    }
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(SweepRow::header());
    for r in rows {
        t.push(r.cells());
    }
    t
}

/// One row per grid point, `axis1` outermost.
pub fn sweep(template: &ModelParams, axis1: &Axis, axis2: Option<&Axis>) -> Result<Vec<SweepRow>> {
    let points = grid_points(template, axis1, axis2)?;
    points.par_iter().map(SweepRow::evaluate).collect()
}

fn grid_points(
    template: &ModelParams,
    axis1: &Axis,
    axis2: Option<&Axis>,
) -> Result<Vec<ModelParams>> {
    for a in [Some(axis1), axis2].into_iter().flatten() {
        if a.grid.is_empty() {
            return Err(Error::Domain(format!("empty grid for {}", a.param)));
        }
    }
    let inner: &[f64] = axis2.map_or(&[f64::NAN], |a| &a.grid);
    let mut out = Vec::with_capacity(axis1.grid.len() * inner.len());
    for &u in &axis1.grid {
        for &v in inner {
            let mut p = *template;
            axis1.param.set(&mut p, u);
            if let Some(a) = axis2 {
                a.param.set(&mut p, v);
            }
            p.validate()?;
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurProduct {
    pub fano: f64,
    pub affinity: f64,
    pub product: f64,
}

impl TurProduct {
    pub fn holds(&self) -> bool {
        self.product >= TUR_BOUND - TUR_SLACK
    }
}

pub fn tur_product(params: &ModelParams) -> Result<TurProduct> {
    let rates = make_rates(params)?;
    let j = cumulant_rates(&rates, 2)?;
    if j[0] == 0.0 {
        return Err(Error::ZeroFlux);
    }
    Ok(TurProduct {
        fano: j[1] / j[0],
        affinity: affinity_from_rates(&rates)?.value(),
        product: fano_affinity(&rates, j[1]),
    })
}

// F·A with the factor N_L − N_R shared by j⁽¹⁾ and A cancelled analytically:
// j⁽¹⁾ = Γ_LΓ_R Δ/a and A = ln(1 + y), y = Δ/(N_R(1+N_L)), so
// FA = j⁽²⁾ a [ln(1+y)/y] / (Γ_LΓ_R N_R (1+N_L)). Stays accurate where the
// flux nearly vanishes.
fn fano_affinity(rates: &RateSet, j2: f64) -> f64 {
    let (nl, nr) = (rates.big_n_l, rates.big_n_r);
    let y = (nl - nr) / (nr * (1.0 + nl));
    let log_ratio = if y == 0.0 { 1.0 } else { y.ln_1p() / y };
    j2 * rates.total() * log_ratio / (rates.gamma_l * rates.gamma_r * nr * (1.0 + nl))
}

/// Bisection tolerance of [`find_flux_zero`].
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Squeezing of `varying` in `bracket` at which the flux vanishes.
pub fn find_flux_zero(params: &ModelParams, varying: Side, bracket: (f64, f64)) -> Result<f64> {
    let flux = |x: f64| -> Result<f64> {
        let mut p = *params;
        p.reservoir_mut(varying).squeeze = x;
        Ok(cumulant_rates(&make_rates(&p)?, 1)?[0])
    };
    let (mut lo, mut hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    let (mut f_lo, f_hi) = (flux(lo)?, flux(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = flux(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Affinity density at equal temperatures.
    Fig1b,
    /// S(λ) against S(−λ−A).
    Fig1cd,
    /// C⁽¹⁾, C⁽²⁾ curves.
    Fig2,
    /// C⁽³⁾, C⁽⁴⁾ curves.
    Fig3,
    /// FA density.
    Fig4,
    /// FA curves for several occupations.
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig1b,
        Figure::Fig1cd,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig1b => "1b",
            Figure::Fig1cd => "1cd",
            Figure::Fig2 => "2",
            Figure::Fig3 => "3",
            Figure::Fig4 => "4",
            Figure::Fig5 => "5",
        }
    }

    /// Default parameters of the figure.
    pub fn defaults(self) -> ModelParams {
        let occ = |nl, nr| {
            ModelParams::from_occupations((1.0, 1.0), (nl, nr), (0.0, 0.0))
                .expect("valid figure defaults")
        };
        let temp = |tl, tr| {
            ModelParams::from_temperatures(0.5, (1.0, 1.0), (tl, tr), (0.0, 0.0))
                .expect("valid figure defaults")
        };
        match self {
            Figure::Fig1b => temp(0.7, 0.7),
            Figure::Fig1cd => temp(0.7, 0.4),
            Figure::Fig2 | Figure::Fig3 | Figure::Fig4 => occ(1.0, 0.1),
            Figure::Fig5 => occ(0.4, 0.3),
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = s.trim().to_ascii_lowercase();
        let id = id.strip_prefix("fig").unwrap_or(&id);
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == id)
            .ok_or_else(|| Error::UnknownFigure(s.to_owned()))
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FigureOptions {
    /// Points per axis; defaults to [`LINE_POINTS`] or [`DENSITY_POINTS`].
    pub points: Option<usize>,
    /// Report S(λ) in the paper convention (figure 1cd only).
    pub paper_convention: bool,
}

/// Squeezing values held fixed along the line-plot families.
pub const FIXED_SQUEEZES: [f64; 3] = [0.0, 0.5, 1.0];

/// Left occupations of the varying-occupation family in figure 5.
pub const FIG5_OCCUPATIONS: [f64; 4] = [0.2, 0.5, 1.0, 2.0];

/// Right occupation of the varying-occupation family in figure 5.
pub const FIG5_RIGHT_OCCUPATION: f64 = 0.1;

/// Data for one figure. `overrides` are applied to the figure defaults;
/// whatever a figure varies or pins per curve takes precedence over them.
pub fn figure_data(
    figure: Figure,
    overrides: &[(Param, f64)],
    options: FigureOptions,
) -> Result<Table> {
    let base = apply(figure.defaults(), overrides)?;
    let line = options.points.unwrap_or(LINE_POINTS);
    let density = options.points.unwrap_or(DENSITY_POINTS);
    if line == 0 {
        return Err(Error::Domain("figure grids need at least one point".into()));
    }
    match figure {
        Figure::Fig1b | Figure::Fig4 => {
            let xl = Axis::linspace(Param::XL, 0.0, 2.0, density)?;
            let xr = Axis::linspace(Param::XR, 0.0, 2.0, density)?;
            let mut curves = Curves::default();
            curves.add("grid", grid_points(&base, &xl, Some(&xr))?);
            curves.table()
        }
        Figure::Fig1cd => gc_panels(&base, line, options.paper_convention),
        Figure::Fig2 | Figure::Fig3 => {
            let mut curves = Curves::default();
            squeeze_families(&mut curves, &base, "", line)?;
            let diagonal = linspace(0.0, 3.0, line)
                .into_iter()
                .map(|x| base.with_squeeze(x, x))
                .collect();
            curves.add("diagonal", diagonal);
            curves.table()
        }
        Figure::Fig5 => {
            let mut curves = Curves::default();
            for n_l in FIG5_OCCUPATIONS {
                let p = apply(
                    base,
                    &[(Param::OccL, n_l), (Param::OccR, FIG5_RIGHT_OCCUPATION)],
                )?;
                let xl = Axis::linspace(Param::XL, 0.0, 3.0, line)?;
                let xr = Axis::linspace(Param::XR, 0.0, 3.0, line)?;
                let tag = format!("n_l={}", fmt_label(n_l));
                curves.add(
                    &format!("a:{tag}"),
                    grid_points(&p.with_squeeze(0.0, 0.0), &xl, None)?,
                );
                curves.add(
                    &format!("b:{tag}"),
                    grid_points(&p.with_squeeze(0.0, 0.0), &xr, None)?,
                );
            }
            squeeze_families(&mut curves, &base, "cd:", line)?;
            curves.table()
        }
    }
}

// Vary one squeezing over [0, 3] with the other pinned at each FIXED_SQUEEZES value.
fn squeeze_families(
    curves: &mut Curves,
    base: &ModelParams,
    prefix: &str,
    points: usize,
) -> Result<()> {
    for (label, varying, pinned) in [("a", Param::XL, Param::XR), ("b", Param::XR, Param::XL)] {
        let axis = Axis::linspace(varying, 0.0, 3.0, points)?;
        for x in FIXED_SQUEEZES {
            let p = apply(*base, &[(pinned, x)])?;
            let name = format!("{prefix}{label}:{pinned}={}", fmt_label(x));
            curves.add(&name, grid_points(&p, &axis, None)?);
        }
    }
    Ok(())
}

fn fmt_label(v: f64) -> String {
    crate::table::format_sig(v, 6)
}

#[derive(Default)]
struct Curves {
    points: Vec<(String, ModelParams)>,
}

impl Curves {
    fn add(&mut self, name: &str, params: Vec<ModelParams>) {
        self.points
            .extend(params.into_iter().map(|p| (name.to_owned(), p)));
    }

    fn table(self) -> Result<Table> {
        let rows: Vec<SweepRow> = self
            .points
            .par_iter()
            .map(|(_, p)| SweepRow::evaluate(p))
            .collect::<Result<_>>()?;
        let mut header = vec!["curve"];
        header.extend(SweepRow::header());
        let mut t = Table::new(header);
        for ((name, _), row) in self.points.iter().zip(&rows) {
            let mut cells = vec![Cell::from(name.as_str())];
            cells.extend(row.cells());
            t.push(cells);
        }
        Ok(t)
    }
}

/// Squeezings of the two symmetry panels.
pub const GC_PANELS: [(&str, f64, f64); 2] = [("c", 0.0, 0.0), ("d", 1.0, 0.5)];

fn gc_panels(base: &ModelParams, points: usize, paper_convention: bool) -> Result<Table> {
    let scale = if paper_convention { PAPER_SCALE } else { 1.0 };
    let mut t = Table::new(["panel", "x_l", "x_r", "A", "lambda", "S", "S_mirror"]);
    for (panel, xl, xr) in GC_PANELS {
        let p = base.with_squeeze(xl, xr);
        let rates = make_rates(&p)?;
        let a = affinity_from_rates(&rates)?.value();
        let lo = (-a - 1.0).min(1.0);
        let hi = (-a - 1.0).max(1.0);
        for l in linspace(lo, hi, points) {
            t.push(vec![
                panel.into(),
                xl.into(),
                xr.into(),
                a.into(),
                l.into(),
                (scale * cgf(&rates, &l)?).into(),
                (scale * cgf(&rates, &(-l - a))?).into(),
            ]);
        }
    }
    Ok(t)
}
