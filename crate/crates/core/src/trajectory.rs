//! Stochastic oracle: exact continuous-time simulation of the two-state jump
//! process behind the Pauli master equation, counting net boson exchange
//! with the left reservoir.
//!
//! Every trajectory draws from its own ChaCha8 stream, selected by
//! `(master_seed, index)`, so ensembles are reproducible regardless of how
//! rayon schedules them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::cgf::{affinity_from_rates, steady_state};
use crate::model::{make_rates, ModelParams, RateSet};
use crate::table::{Cell, Table};
use crate::{Error, Result};

/// Windows simulated per random stream in [`ft_histogram`].
const WINDOWS_PER_STREAM: usize = 10_000;

/// Minimum samples for an FT histogram bin to be used.
pub const MIN_BIN_COUNT: u64 = 100;

/// Distinct well-populated `q` values required by [`ft_histogram`].
pub const MIN_DISTINCT_BINS: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChannelCounts {
    pub absorbed_left: u64,
    pub emitted_left: u64,
    pub absorbed_right: u64,
    pub emitted_right: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub total_time: f64,
    /// Absorptions from L minus emissions to L.
    pub net_count: i64,
    /// Net count per window; windows tile `[0, total_time]`.
    pub window_counts: Vec<i64>,
    /// Whether the system state at the end of each window equals the state
    /// at its start.
    pub window_closed: Vec<bool>,
    pub jumps: ChannelCounts,
    /// Time spent occupied.
    pub time_occupied: f64,
    /// Sum and number of completed dwell periods in the occupied state.
    pub occupied_dwell_total: f64,
    pub occupied_dwell_count: u64,
}

/// The random stream for trajectory `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// One trajectory of length `t_max`, started from the steady state.
pub fn simulate(params: &ModelParams, t_max: f64, seed: u64) -> Result<TrajectoryStats> {
    simulate_rates(&make_rates(params)?, t_max, seed)
}

pub fn simulate_rates(rates: &RateSet, t_max: f64, seed: u64) -> Result<TrajectoryStats> {
    check_positive("t_max", t_max)?;
    Ok(run(rates, t_max, 1, &mut stream(seed, 0), None))
}

/// Like [`simulate_rates`] but with an explicit initial state.
pub fn simulate_from(
    rates: &RateSet,
    t_max: f64,
    occupied: bool,
    seed: u64,
) -> Result<TrajectoryStats> {
    check_positive("t_max", t_max)?;
    Ok(run(rates, t_max, 1, &mut stream(seed, 0), Some(occupied)))
}

/// A trajectory of `n_windows` consecutive windows of length `window`.
pub fn simulate_windows(
    rates: &RateSet,
    window: f64,
    n_windows: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TrajectoryStats> {
    check_positive("window", window)?;
    if n_windows == 0 {
        return Err(Error::Domain("need at least one window".into()));
    }
    Ok(run(rates, window * n_windows as f64, n_windows, rng, None))
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "must be finite and positive",
        })
    }
}

fn run(
    rates: &RateSet,
    t_max: f64,
    n_windows: usize,
    rng: &mut ChaCha8Rng,
    initial: Option<bool>,
) -> TrajectoryStats {
    let window = t_max / n_windows as f64;
    let boundary = |k: usize| {
        if k == n_windows {
            t_max
        } else {
            k as f64 * window
        }
    };

    let mut occupied = match initial {
        Some(s) => s,
        None => rng.random::<f64>() < steady_state(rates).occupied,
    };
    let out_l = |occ: bool| if occ { rates.alpha_l } else { rates.beta_l };
    let out_r = |occ: bool| if occ { rates.alpha_r } else { rates.beta_r };

    let mut stats = TrajectoryStats {
        total_time: t_max,
        net_count: 0,
        window_counts: Vec::with_capacity(n_windows),
        window_closed: Vec::with_capacity(n_windows),
        jumps: ChannelCounts::default(),
        time_occupied: 0.0,
        occupied_dwell_total: 0.0,
        occupied_dwell_count: 0,
    };
    let mut t = 0.0;
    let mut entered = 0.0;
    let mut next_window = 1;
    let mut window_count = 0i64;
    let mut window_start_state = occupied;

    loop {
        let (rate_l, rate_r) = (out_l(occupied), out_r(occupied));
        let total = rate_l + rate_r;
        let next = if total > 0.0 {
            t + rng.sample::<f64, _>(Exp1) / total
        } else {
            f64::INFINITY
        };
        while next_window <= n_windows && next >= boundary(next_window) {
            stats.window_counts.push(window_count);
            stats.window_closed.push(window_start_state == occupied);
            window_count = 0;
            window_start_state = occupied;
            next_window += 1;
        }
        if next >= t_max {
            if occupied {
                stats.time_occupied += t_max - t;
            }
            break;
        }
        if occupied {
            stats.time_occupied += next - t;
            stats.occupied_dwell_total += next - entered;
            stats.occupied_dwell_count += 1;
        }
        let left = rng.random::<f64>() * total < rate_l;
        let step = match (occupied, left) {
            (false, true) => {
                stats.jumps.absorbed_left += 1;
                1
            }
            (true, true) => {
                stats.jumps.emitted_left += 1;
                -1
            }
            (false, false) => {
                stats.jumps.absorbed_right += 1;
                0
            }
            (true, false) => {
                stats.jumps.emitted_right += 1;
                0
            }
        };
        stats.net_count += step;
        window_count += step;
        occupied = !occupied;
        entered = next;
        t = next;
    }
    stats
}

/// Long-time cumulant rates `κ_n(q)/t` estimated from an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCumulants {
    /// Index 0 holds the first cumulant rate.
    pub estimates: Vec<f64>,
    /// Jackknife standard errors, same indexing.
    pub std_errors: Vec<f64>,
    pub n_traj: usize,
    pub horizon: f64,
}

impl EmpiricalCumulants {
    /// `(estimate, standard error)` of order `n` (1-based), if available.
    pub fn get(&self, n: usize) -> Option<(f64, f64)> {
        let i = n.checked_sub(1)?;
        Some((*self.estimates.get(i)?, *self.std_errors.get(i)?))
    }
}

/// Net counts of `n_traj` independent trajectories.
pub fn ensemble_counts(
    rates: &RateSet,
    n_traj: usize,
    t_max: f64,
    master_seed: u64,
) -> Result<Vec<i64>> {
    check_positive("t_max", t_max)?;
    Ok((0..n_traj as u64)
        .into_par_iter()
        .map(|i| run(rates, t_max, 1, &mut stream(master_seed, i), None).net_count)
        .collect())
}

pub fn ensemble_cumulants(
    params: &ModelParams,
    n_traj: usize,
    t_max: f64,
    master_seed: u64,
) -> Result<EmpiricalCumulants> {
    if n_traj < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 trajectories, got {n_traj}"
        )));
    }
    let counts = ensemble_counts(&make_rates(params)?, n_traj, t_max, master_seed)?;
    let samples: Vec<f64> = counts.iter().map(|&q| q as f64).collect();
    let (estimates, std_errors) = jackknife_cumulants(&samples, 4);
    Ok(EmpiricalCumulants {
        estimates: estimates.iter().map(|k| k / t_max).collect(),
        std_errors: std_errors.iter().map(|e| e / t_max).collect(),
        n_traj,
        horizon: t_max,
    })
}

/// k-statistics up to `max_order` (≤ 4) with leave-one-out jackknife errors.
/// Orders needing more samples than available are omitted.
pub fn jackknife_cumulants(samples: &[f64], max_order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len();
    let orders = max_order.min(4).min(n.saturating_sub(1));
    if orders == 0 {
        return (Vec::new(), Vec::new());
    }
    // cumulants of order ≥ 2 are shift invariant; centring keeps power sums small
    let shift = samples.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = samples.iter().map(|x| x - shift).collect();
    let mut sums = [0.0; 4];
    for &y in &centred {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= y;
            *s += p;
        }
    }
    let full = k_statistics(&sums, n as f64);
    let mut loo_mean = [0.0; 4];
    let mut loo: Vec<[f64; 4]> = Vec::with_capacity(n);
    for &y in &centred {
        let reduced = [
            sums[0] - y,
            sums[1] - y * y,
            sums[2] - y.powi(3),
            sums[3] - y.powi(4),
        ];
        let k = k_statistics(&reduced, (n - 1) as f64);
        for m in 0..4 {
            loo_mean[m] += k[m] / n as f64;
        }
        loo.push(k);
    }
    let mut estimates = Vec::with_capacity(orders);
    let mut errors = Vec::with_capacity(orders);
    for m in 0..orders {
        let spread: f64 = loo.iter().map(|k| (k[m] - loo_mean[m]).powi(2)).sum();
        let value = if m == 0 { full[0] + shift } else { full[m] };
        estimates.push(value);
        errors.push(((n as f64 - 1.0) / n as f64 * spread).sqrt());
    }
    (estimates, errors)
}

fn k_statistics(s: &[f64; 4], n: f64) -> [f64; 4] {
    let [s1, s2, s3, s4] = *s;
    let k1 = s1 / n;
    let k2 = (n * s2 - s1 * s1) / (n * (n - 1.0));
    let k3 = (2.0 * s1.powi(3) - 3.0 * n * s1 * s2 + n * n * s3) / (n * (n - 1.0) * (n - 2.0));
    let k4 = (-6.0 * s1.powi(4) + 12.0 * n * s1 * s1 * s2
        - 3.0 * n * (n - 1.0) * s2 * s2
        - 4.0 * n * (n + 1.0) * s1 * s3
        + n * n * (n + 1.0) * s4)
        / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
    [k1, k2, k3, k4]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtBin {
    pub q: i64,
    pub count: u64,
    /// `ln P(q)` among the windows used.
    pub ln_p: f64,
    /// `ln P(q) − ln P(−q)` where both bins are populated.
    pub ln_ratio: Option<f64>,
    /// `q A`.
    pub model: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtHistogram {
    /// Windows that start and end in the same system state, for which
    /// `P(q)/P(−q) = e^{qA}` holds at any window length.
    pub bins: Vec<FtBin>,
    pub slope: f64,
    pub slope_std_error: f64,
    pub affinity: f64,
    pub windows_total: usize,
    pub windows_used: usize,
    /// Slope from all windows regardless of boundary states; carries a
    /// finite-window bias.
    pub unconditioned_slope: Option<f64>,
}

impl FtHistogram {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["q", "count", "ln_ratio", "model_qA"]);
        for b in &self.bins {
            t.push(vec![
                b.q.into(),
                Cell::Int(b.count as i64),
                b.ln_ratio.into(),
                b.model.into(),
            ]);
        }
        t
    }
}

/// Steady-state fluctuation-theorem histogram over `n_windows` windows.
pub fn ft_histogram(
    params: &ModelParams,
    window: f64,
    n_windows: usize,
    master_seed: u64,
) -> Result<FtHistogram> {
    let rates = make_rates(params)?;
    let affinity = affinity_from_rates(&rates)?.value();
    check_positive("window", window)?;
    let chunks: Vec<usize> = (0..n_windows)
        .step_by(WINDOWS_PER_STREAM)
        .map(|start| WINDOWS_PER_STREAM.min(n_windows - start))
        .collect();
    let runs: Vec<TrajectoryStats> = chunks
        .par_iter()
        .enumerate()
        .map(|(i, &len)| simulate_windows(&rates, window, len, &mut stream(master_seed, i as u64)))
        .collect::<Result<_>>()?;

    let mut closed: BTreeMap<i64, u64> = BTreeMap::new();
    let mut all: BTreeMap<i64, u64> = BTreeMap::new();
    for r in &runs {
        for (&q, &same) in r.window_counts.iter().zip(&r.window_closed) {
            *all.entry(q).or_default() += 1;
            if same {
                *closed.entry(q).or_default() += 1;
            }
        }
    }
    let windows_used: u64 = closed.values().sum();
    let populated = closed.values().filter(|&&c| c >= MIN_BIN_COUNT).count();
    if populated < MIN_DISTINCT_BINS {
        return Err(Error::InsufficientData(format!(
            "{populated} distinct q values reached {MIN_BIN_COUNT} samples \
             ({windows_used} of {n_windows} windows usable); need {MIN_DISTINCT_BINS}"
        )));
    }
    let (slope, slope_std_error) = fit_slope(&closed).ok_or_else(|| {
        Error::InsufficientData(format!(
            "no q > 0 with both ±q reaching {MIN_BIN_COUNT} samples"
        ))
    })?;
    let count = |m: &BTreeMap<i64, u64>, q: i64| m.get(&q).copied().unwrap_or(0);
    let bins = closed
        .iter()
        .map(|(&q, &c)| {
            let mirror = count(&closed, -q);
            FtBin {
                q,
                count: c,
                ln_p: (c as f64 / windows_used as f64).ln(),
                ln_ratio: (mirror > 0).then(|| (c as f64 / mirror as f64).ln()),
                model: q as f64 * affinity,
            }
        })
        .collect();
    Ok(FtHistogram {
        bins,
        slope,
        slope_std_error,
        affinity,
        windows_total: n_windows,
        windows_used: windows_used as usize,
        unconditioned_slope: fit_slope(&all).map(|(s, _)| s),
    })
}

// Least squares through the origin of ln[c(q)/c(−q)] against q over q > 0;
// the ratio is odd in q so negative bins carry no extra information.
fn fit_slope(hist: &BTreeMap<i64, u64>) -> Option<(f64, f64)> {
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut var = 0.0;
    for (&q, &c) in hist.range(1..) {
        let mirror = hist.get(&-q).copied().unwrap_or(0);
        if c < MIN_BIN_COUNT || mirror < MIN_BIN_COUNT {
            continue;
        }
        let x = q as f64;
        sxy += x * (c as f64 / mirror as f64).ln();
        sxx += x * x;
        var += x * x * (1.0 / c as f64 + 1.0 / mirror as f64);
    }
    (sxx > 0.0).then(|| (sxy / sxx, var.sqrt() / sxx))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::cgf::steady_state;

    fn fig2() -> ModelParams {
        ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0)).unwrap()
    }

    #[test]
    fn frozen_configuration_never_jumps() {
        let rates = RateSet::from_raw(2.0, 0.0, 1.0, 0.0).unwrap();
        let s = simulate_from(&rates, 100.0, false, 3).unwrap();
        assert_eq!(s.net_count, 0);
        assert_eq!(s.jumps, ChannelCounts::default());
        assert_eq!(s.time_occupied, 0.0);
        // steady state of these rates is the empty level as well
        let s = simulate_rates(&rates, 100.0, 4).unwrap();
        assert_eq!(s.net_count, 0);
    }

    #[test]
    fn counts_are_consistent() {
        let rates = make_rates(&fig2()).unwrap();
        let s = simulate_windows(&rates, 2.5, 400, &mut stream(11, 0)).unwrap();
        let j = s.jumps;
        assert_eq!(s.net_count, j.absorbed_left as i64 - j.emitted_left as i64);
        assert_eq!(s.window_counts.len(), 400);
        assert_eq!(s.window_counts.iter().sum::<i64>(), s.net_count);
        let absorbed = j.absorbed_left + j.absorbed_right;
        let emitted = j.emitted_left + j.emitted_right;
        assert!(absorbed.abs_diff(emitted) <= 1);
        assert!(s.time_occupied > 0.0 && s.time_occupied < s.total_time);
    }

    #[test]
    fn reproducible_per_seed() {
        let a = simulate(&fig2(), 500.0, 42).unwrap();
        let b = simulate(&fig2(), 500.0, 42).unwrap();
        let c = simulate(&fig2(), 500.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(simulate(&fig2(), 0.0, 1).is_err());
    }

    #[test]
    fn dwell_time_and_occupancy() {
        let rates = make_rates(&fig2()).unwrap();
        let s = simulate_rates(&rates, 2e5, 7).unwrap();
        let n = s.occupied_dwell_count as f64;
        let mean = s.occupied_dwell_total / n;
        let expected = 1.0 / (rates.alpha_l + rates.alpha_r);
        // exponential dwell: standard error = mean/√n
        assert!((mean - expected).abs() <= 3.0 * expected / n.sqrt());

        let runs: Vec<f64> = (0..40)
            .map(|i| simulate_rates(&rates, 5e3, 100 + i).unwrap().time_occupied / 5e3)
            .collect();
        let (est, err) = jackknife_cumulants(&runs, 1);
        assert!((est[0] - steady_state(&rates).occupied).abs() <= 3.0 * err[0]);
    }

    #[test]
    fn k_statistics_match_direct_formulas() {
        let xs = [1.0, 4.0, -2.0, 7.0, 0.5, 3.0, 3.0, -1.0];
        let (k, e) = jackknife_cumulants(&xs, 4);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / n;
        assert_relative_eq!(k[0], mean, max_relative = 1e-14);
        assert_relative_eq!(k[1], m(2) * n / (n - 1.0), max_relative = 1e-13);
        assert_relative_eq!(
            k[2],
            m(3) * n * n / ((n - 1.0) * (n - 2.0)),
            max_relative = 1e-12
        );
        let k4 = n * n * ((n + 1.0) * m(4) - 3.0 * (n - 1.0) * m(2).powi(2))
            / ((n - 1.0) * (n - 2.0) * (n - 3.0));
        assert_relative_eq!(k[3], k4, max_relative = 1e-12);
        assert!(e.iter().all(|&x| x > 0.0));
        // jackknife error of the mean is the usual s/√n
        assert_relative_eq!(e[0], (k[1] / n).sqrt(), max_relative = 1e-12);

        assert_eq!(jackknife_cumulants(&[1.0, 2.0], 4).0.len(), 1);
    }

    #[test]
    fn equilibrium_ensemble_has_no_drift() {
        let p = ModelParams::from_occupations((1.0, 1.0), (0.5, 0.5), (0.3, 0.3)).unwrap();
        let e = ensemble_cumulants(&p, 200, 1e3, 9).unwrap();
        let (k1, se) = e.get(1).unwrap();
        assert!(k1.abs() <= 3.0 * se);
        assert!(ensemble_cumulants(&p, 1, 1e3, 9).is_err());
    }

    #[test]
    fn ft_rejects_short_windows() {
        let err = ft_histogram(&fig2(), 0.05, 2000, 1).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn ft_equilibrium_slope_vanishes() {
        let p = ModelParams::from_occupations((1.0, 1.0), (0.8, 0.8), (0.0, 0.0)).unwrap();
        let h = ft_histogram(&p, 4.0, 200_000, 5).unwrap();
        assert_eq!(h.affinity, 0.0);
        assert!(h.slope.abs() <= 2.0 * h.slope_std_error);
    }
}
