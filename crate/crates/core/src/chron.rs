//! Controls and iterated integrals.
//!
//! `Υᵗ(w)` is computed for a prefix-closed set of words by the cascade
//!
//! ```text
//! d/dt Υᵗ(w·d) = u_d(t) Υᵗ(w),   Υ⁰(w) = 0 for w ≠ ε,   Υᵗ(ε) = 1
//! ```
//!
//! integrated with classical RK4. The time grid always contains every point
//! where a control has a jump or a kink, and controls are evaluated on the
//! piece the current step lies in, so no step straddles a discontinuity.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncseries::NcSeries;
use crate::words::{Letter, Word};

/// One control channel `u_d` on `[0, T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Channel {
    /// `values[i]` on `[breakpoints[i-1], breakpoints[i])`, right-continuous.
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    /// `Σ coeffs[k] tᵏ`.
    Polynomial { coeffs: Vec<f64> },
    /// Linear interpolation of `values[k]` at `t = k·dt`.
    Sampled { dt: f64, values: Vec<f64> },
}

impl Channel {
    pub fn constant(v: f64) -> Channel {
        Channel::Polynomial { coeffs: vec![v] }
    }

    fn validate(&self, horizon: f64) -> Result<()> {
        let finite = |v: &[f64], what: &str| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::Input(format!("non-finite {what}")))
            }
        };
        match self {
            Channel::PiecewiseConstant { breakpoints, values } => {
                finite(breakpoints, "breakpoint")?;
                finite(values, "control value")?;
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::Input(format!(
                        "{} breakpoints need {} values, got {}",
                        breakpoints.len(),
                        breakpoints.len() + 1,
                        values.len()
                    )));
                }
                if breakpoints.windows(2).any(|p| p[0] >= p[1]) {
                    return Err(Error::Input("breakpoints must be strictly increasing".into()));
                }
                if breakpoints.iter().any(|&b| b < 0.0 || b > horizon) {
                    return Err(Error::Input(format!("breakpoints must lie in [0, {horizon}]")));
                }
            }
            Channel::Polynomial { coeffs } => {
                finite(coeffs, "polynomial coefficient")?;
            }
            Channel::Sampled { dt, values } => {
                finite(values, "sample")?;
                if !(dt.is_finite() && *dt > 0.0) {
                    return Err(Error::Input("sampling step must be positive".into()));
                }
                if values.len() < 2 {
                    return Err(Error::Input("sampled channels need at least 2 points".into()));
                }
                let span = (values.len() - 1) as f64 * dt;
                if span < horizon * (1.0 - 1e-12) {
                    return Err(Error::Input(format!(
                        "samples cover [0, {span}] but the horizon is {horizon}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Value at `t`, taking the piece that contains `piece_at`.
    fn value_in_piece(&self, t: f64, piece_at: f64) -> f64 {
        match self {
            Channel::PiecewiseConstant { breakpoints, values } => {
                values[breakpoints.partition_point(|&b| b <= piece_at)]
            }
            Channel::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Channel::Sampled { dt, values } => {
                let k = ((piece_at / dt).floor().max(0.0) as usize).min(values.len() - 2);
                let s = t / dt - k as f64;
                values[k] + s * (values[k + 1] - values[k])
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.value_in_piece(t, t)
    }

    /// Interior points of `(0, horizon)` where the channel jumps or has a kink.
    fn kinks(&self, horizon: f64) -> Vec<f64> {
        match self {
            Channel::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            Channel::Polynomial { .. } => Vec::new(),
            Channel::Sampled { dt, values } => (1..values.len()).map(|k| k as f64 * dt).collect(),
        }
        .into_iter()
        .filter(|&t| t > 0.0 && t < horizon)
        .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channels {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Channel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Channel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Channel>,
}

/// Controls `u_a, u_b, u_c` on `[0, T]`. A missing channel is identically zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub channels: Channels,
}

/// Control values at the start, midpoint and end of one grid interval.
#[derive(Clone, Copy, Debug)]
pub struct IntervalControls {
    pub start: [f64; 3],
    pub mid: [f64; 3],
    pub end: [f64; 3],
}

impl ControlSpec {
    pub fn zero(horizon: f64) -> ControlSpec {
        ControlSpec {
            horizon,
            channels: Channels::default(),
        }
    }

    /// Constant controls `(u_a, u_b, u_c)`; zero entries are left out.
    pub fn constant(horizon: f64, u: [f64; 3]) -> ControlSpec {
        let mut spec = ControlSpec::zero(horizon);
        for l in Letter::ALL {
            if u[l.index()] != 0.0 {
                spec = spec.with_channel(l, Channel::constant(u[l.index()]));
            }
        }
        spec
    }

    pub fn with_channel(mut self, l: Letter, ch: Channel) -> ControlSpec {
        *self.slot(l) = Some(ch);
        self
    }

    fn slot(&mut self, l: Letter) -> &mut Option<Channel> {
        match l {
            Letter::A => &mut self.channels.a,
            Letter::B => &mut self.channels.b,
            Letter::C => &mut self.channels.c,
        }
    }

    pub fn channel(&self, l: Letter) -> Option<&Channel> {
        match l {
            Letter::A => self.channels.a.as_ref(),
            Letter::B => self.channels.b.as_ref(),
            Letter::C => self.channels.c.as_ref(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Input(format!("horizon must be positive, got {}", self.horizon)));
        }
        for l in Letter::ALL {
            if let Some(ch) = self.channel(l) {
                ch.validate(self.horizon)
                    .map_err(|e| Error::Input(format!("channel {l}: {e}")))?;
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<ControlSpec> {
        let spec: ControlSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("controls serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ControlSpec> {
        ControlSpec::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn value(&self, l: Letter, t: f64) -> f64 {
        self.channel(l).map_or(0.0, |ch| ch.value(t))
    }

    pub fn values(&self, t: f64) -> [f64; 3] {
        Letter::ALL.map(|l| self.value(l, t))
    }

    /// Values inside the grid interval `[lo, hi]`, using the piece that
    /// contains the interval even at its endpoints.
    pub fn interval_values(&self, lo: f64, hi: f64) -> IntervalControls {
        let mid = 0.5 * (lo + hi);
        let at = |t: f64| Letter::ALL.map(|l| self.channel(l).map_or(0.0, |ch| ch.value_in_piece(t, mid)));
        IntervalControls {
            start: at(lo),
            mid: at(mid),
            end: at(hi),
        }
    }

    /// Sorted interior jump and kink points of all channels.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Letter::ALL
            .iter()
            .filter_map(|&l| self.channel(l))
            .flat_map(|ch| ch.kinks(self.horizon))
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Points closer than this fraction of the horizon are merged.
const MERGE_TOLERANCE: f64 = 1e-9;

/// `0 = t_0 < ⋯ < t_M = T`: the uniform grid with every control kink added.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    kink: Vec<bool>,
}

impl TimeGrid {
    pub fn new(controls: &ControlSpec, steps: usize) -> Result<TimeGrid> {
        TimeGrid::with_times(controls, steps, &[])
    }

    /// The grid with the given times added as nodes.
    pub fn with_times(controls: &ControlSpec, steps: usize, extra: &[f64]) -> Result<TimeGrid> {
        if steps == 0 {
            return Err(Error::Input("steps must be at least 1".into()));
        }
        controls.validate()?;
        let horizon = controls.horizon;
        if let Some(t) = extra.iter().find(|t| !(0.0..=horizon).contains(*t)) {
            return Err(Error::Input(format!("time {t} is outside [0, {horizon}]")));
        }
        let tol = MERGE_TOLERANCE * horizon;
        let mut points: Vec<(f64, bool)> = (0..=steps)
            .map(|k| (horizon * k as f64 / steps as f64, false))
            .chain(extra.iter().map(|&t| (t, false)))
            .chain(controls.kinks().into_iter().map(|t| (t, true)))
            .collect();
        points.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut times: Vec<f64> = Vec::with_capacity(points.len());
        let mut kink: Vec<bool> = Vec::with_capacity(points.len());
        for (t, is_kink) in points {
            match times.last() {
                Some(&last) if t - last < tol => {
                    // keep the endpoints exact, otherwise prefer the kink location
                    let n = times.len();
                    if is_kink && n > 1 && last != horizon {
                        times[n - 1] = t;
                    }
                    kink[n - 1] |= is_kink;
                }
                _ => {
                    times.push(t);
                    kink.push(is_kink);
                }
            }
        }
        let n = times.len();
        times[n - 1] = horizon;
        kink[0] = false;
        kink[n - 1] = false;
        Ok(TimeGrid { times, kink })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Whether the point sits on a control jump or kink.
    pub fn is_kink(&self, i: usize) -> bool {
        self.kink[i]
    }

    /// Index of the grid point at `t`, up to rounding.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let horizon = *self.times.last()?;
        let tol = 1e-12 * horizon.max(1.0);
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }
}

/// A prefix-closed word set sorted by (length, lexicographic), so parents
/// precede children and the children of each node are contiguous.
#[derive(Clone, Debug)]
struct Cascade {
    words: Vec<Word>,
    letter: Vec<u8>,
    children: Vec<(u32, u32)>,
}

impl Cascade {
    fn prefix_closure<I: IntoIterator<Item = Word>>(words: I) -> Cascade {
        let mut set: Vec<Word> = Vec::new();
        let mut seen = rustc_hash::FxHashSet::default();
        seen.insert(Word::EMPTY);
        set.push(Word::EMPTY);
        for w in words {
            let mut p = w;
            while seen.insert(p) {
                set.push(p);
                p = p.prefix(p.len() - 1);
            }
        }
        set.sort();
        let index: FxHashMap<Word, u32> = set.iter().enumerate().map(|(i, w)| (*w, i as u32)).collect();
        let mut letter = vec![0u8; set.len()];
        let mut children = vec![(0u32, 0u32); set.len()];
        for (i, w) in set.iter().enumerate().skip(1) {
            let (p, l) = w.split_last().expect("nonempty");
            letter[i] = l.index() as u8;
            let range = &mut children[index[&p] as usize];
            if range.0 == range.1 {
                *range = (i as u32, i as u32 + 1);
            } else {
                debug_assert_eq!(range.1 as usize, i);
                range.1 += 1;
            }
        }
        Cascade {
            words: set,
            letter,
            children,
        }
    }

    fn all_words(degree: usize) -> Cascade {
        Cascade::prefix_closure(crate::words::words_of_length(degree))
    }

    /// Runs RK4 over the grid, calling `visit(i, state)` at every grid point.
    fn run(&self, controls: &ControlSpec, grid: &TimeGrid, mut visit: impl FnMut(usize, &[f64])) {
        let n = self.words.len();
        // nodes past the last one with children are leaves
        let inner = self.children.iter().rposition(|r| r.0 != r.1).map_or(0, |p| p + 1);
        let mut y = vec![0.0; n];
        y[0] = 1.0;
        let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        visit(0, &y);
        let times = grid.times();
        for step in 0..times.len() - 1 {
            let (t0, t1) = (times[step], times[step + 1]);
            let h = t1 - t0;
            let u = controls.interval_values(t0, t1);
            let stage_u = [u.start, u.mid, u.mid, u.end];
            let stage_h = [0.0, 0.5 * h, 0.5 * h, h];
            for s in 0..4 {
                let (prev, rest) = k.split_at_mut(s);
                let cur = &mut rest[0];
                let us = stage_u[s];
                let hs = stage_h[s];
                for p in 0..inner {
                    let (lo, hi) = self.children[p];
                    let z = match s {
                        0 => y[p],
                        _ => y[p] + hs * prev[s - 1][p],
                    };
                    for i in lo as usize..hi as usize {
                        cur[i] = us[self.letter[i] as usize] * z;
                    }
                }
            }
            let h6 = h / 6.0;
            for i in 1..n {
                y[i] += h6 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
            }
            visit(step + 1, &y);
        }
    }
}

/// Which words a table covers.
#[derive(Clone, Debug)]
pub enum WordSet {
    /// Every word of length at most the degree.
    All(usize),
    /// The given words and their prefixes.
    Closure(Vec<Word>),
}

/// Which grid points a table stores.
#[derive(Clone, Debug)]
pub enum Record {
    Every,
    /// Every `k`-th grid point, plus the last one.
    Stride(usize),
    /// These times, which are added to the grid.
    Times(Vec<f64>),
}

/// Upper bound on stored values (words × recorded times) for one table.
pub const MAX_TABLE_VALUES: usize = 50_000_000;

#[derive(Clone, Debug)]
pub struct IteratedIntegralTable {
    degree: usize,
    grid: TimeGrid,
    recorded: Vec<usize>,
    words: Vec<Word>,
    index: FxHashMap<Word, usize>,
    // recorded.len() rows of words.len() values
    values: Vec<f64>,
}

/// `Υᵗ(w)` for all words of length `<= degree` at every grid time.
pub fn integrate_cascade(controls: &ControlSpec, degree: usize, steps: usize) -> Result<IteratedIntegralTable> {
    integrate_cascade_with(controls, steps, WordSet::All(degree), Record::Every)
}

pub fn integrate_cascade_with(
    controls: &ControlSpec,
    steps: usize,
    words: WordSet,
    record: Record,
) -> Result<IteratedIntegralTable> {
    let grid = match &record {
        Record::Times(ts) => TimeGrid::with_times(controls, steps, ts)?,
        _ => TimeGrid::new(controls, steps)?,
    };
    let cascade = match words {
        WordSet::All(0) => return Err(Error::Input("degree must be at least 1".into())),
        WordSet::All(d) => {
            if d > 20 {
                return Err(Error::Input(format!("degree {d} is too large for a full table")));
            }
            Cascade::all_words(d)
        }
        WordSet::Closure(ws) => Cascade::prefix_closure(ws),
    };
    let degree = cascade.words.last().map_or(0, |w| w.len());
    let mut recorded: Vec<usize> = match record {
        Record::Every => (0..grid.len()).collect(),
        Record::Stride(0) => return Err(Error::Input("stride must be positive".into())),
        Record::Stride(k) => (0..grid.len()).step_by(k).chain([grid.len() - 1]).collect(),
        Record::Times(ts) => ts
            .iter()
            .map(|&t| grid.index_of(t).ok_or(Error::OffGrid { t }))
            .collect::<Result<_>>()?,
    };
    recorded.sort_unstable();
    recorded.dedup();
    let size = recorded.len().saturating_mul(cascade.words.len());
    if size > MAX_TABLE_VALUES {
        return Err(Error::Input(format!(
            "a table of {} words at {} times is too large; restrict the words or the recorded times",
            cascade.words.len(),
            recorded.len()
        )));
    }
    let mut values = Vec::with_capacity(size);
    let mut next = 0;
    cascade.run(controls, &grid, |i, y| {
        if next < recorded.len() && recorded[next] == i {
            values.extend_from_slice(y);
            next += 1;
        }
    });
    let index = cascade.words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    Ok(IteratedIntegralTable {
        degree,
        grid,
        recorded,
        words: cascade.words,
        index,
        values,
    })
}

impl IteratedIntegralTable {
    /// Length of the longest covered word.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Times at which values are stored.
    pub fn times(&self) -> Vec<f64> {
        self.recorded.iter().map(|&i| self.grid.times()[i]).collect()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    fn row(&self, t: f64) -> Result<usize> {
        let i = self.grid.index_of(t).ok_or(Error::OffGrid { t })?;
        self.recorded.binary_search(&i).map_err(|_| Error::OffGrid { t })
    }

    fn column(&self, w: Word) -> Result<usize> {
        self.index
            .get(&w)
            .copied()
            .ok_or_else(|| Error::MissingWord(w.to_string()))
    }

    pub fn value(&self, w: Word, t: f64) -> Result<f64> {
        let r = self.row(t)?;
        Ok(self.values[r * self.words.len() + self.column(w)?])
    }

    fn weights(&self, series: &NcSeries) -> Result<Vec<(usize, f64)>> {
        series
            .terms()
            .into_iter()
            .map(|(w, c)| Ok((self.column(w)?, c.to_f64())))
            .collect()
    }

    /// `Υᵗ(series)` at every recorded time.
    pub fn evaluate_path(&self, series: &NcSeries) -> Result<Vec<f64>> {
        let weights = self.weights(series)?;
        let n = self.words.len();
        Ok((0..self.recorded.len())
            .map(|r| dot(&weights, &self.values[r * n..(r + 1) * n]))
            .collect())
    }
}

fn dot(weights: &[(usize, f64)], state: &[f64]) -> f64 {
    weights.iter().map(|&(i, c)| c * state[i]).sum()
}

/// `Υᵗ(series) = Σ_w coeff(w) Υᵗ(w)`; `t` must be a recorded grid time.
pub fn evaluate(series: &NcSeries, table: &IteratedIntegralTable, t: f64) -> Result<f64> {
    let r = table.row(t)?;
    let n = table.words.len();
    Ok(dot(&table.weights(series)?, &table.values[r * n..(r + 1) * n]))
}

/// `Υᵗ` of several series at every grid time, without storing the word table.
pub fn series_paths(controls: &ControlSpec, series: &[&NcSeries], grid: &TimeGrid) -> Vec<Vec<f64>> {
    let cascade = Cascade::prefix_closure(series.iter().flat_map(|s| s.support().collect::<Vec<_>>()));
    let index: FxHashMap<Word, usize> = cascade.words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let weights: Vec<Vec<(usize, f64)>> = series
        .iter()
        .map(|s| s.terms().into_iter().map(|(w, c)| (index[&w], c.to_f64())).collect())
        .collect();
    let mut out = vec![Vec::with_capacity(grid.len()); series.len()];
    cascade.run(controls, grid, |_, y| {
        for (path, wts) in out.iter_mut().zip(&weights) {
            path.push(dot(wts, y));
        }
    });
    out
}

/// `∫₀ᵗ f` on the grid by the trapezoid rule; `f(lo, hi, t)` is evaluated
/// at an endpoint `t` of the interval `[lo, hi]`.
pub fn cumulative_trapezoid(grid: &TimeGrid, mut f: impl FnMut(usize, f64, f64) -> (f64, f64)) -> Vec<f64> {
    let times = grid.times();
    let mut out = Vec::with_capacity(times.len());
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..times.len() - 1 {
        let (f0, f1) = f(i, times[i], times[i + 1]);
        acc += 0.5 * (times[i + 1] - times[i]) * (f0 + f1);
        out.push(acc);
    }
    out
}

/// `∫₀ᵗ u_c e^{2Υ(S)}` from a path of `Υ(S)` on the grid.
pub fn xi_c_from_path(controls: &ControlSpec, s_path: &[f64], grid: &TimeGrid) -> Vec<f64> {
    assert_eq!(s_path.len(), grid.len());
    cumulative_trapezoid(grid, |i, lo, hi| {
        let u = controls.interval_values(lo, hi);
        let c = Letter::C.index();
        (
            u.start[c] * (2.0 * s_path[i]).exp(),
            u.end[c] * (2.0 * s_path[i + 1]).exp(),
        )
    })
}

/// `Ξ_c(t) = ∫₀ᵗ u_c e^{2Υ(S)}` at every grid time; the table must record
/// every grid point.
pub fn xi_c_direct(controls: &ControlSpec, s_series: &NcSeries, table: &IteratedIntegralTable) -> Result<Vec<f64>> {
    if table.recorded.len() != table.grid.len() {
        return Err(Error::Input(
            "quadrature needs a table recorded at every grid point".into(),
        ));
    }
    let s_path = table.evaluate_path(s_series)?;
    Ok(xi_c_from_path(controls, &s_path, &table.grid))
}

/// Deviation from `Υᵀ(x ⧢ y) = Υᵀ(x) Υᵀ(y)` at the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismError {
    pub lhs: f64,
    pub rhs: f64,
}

impl HomomorphismError {
    pub fn absolute(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// `|lhs - rhs| / |rhs|`, zero when both sides vanish.
    pub fn relative(&self) -> f64 {
        match self.absolute() {
            0.0 => 0.0,
            gap => gap / self.rhs.abs(),
        }
    }
}

pub fn shuffle_homomorphism_error(controls: &ControlSpec, x: Word, y: Word, steps: usize) -> Result<HomomorphismError> {
    let degree = (x.len() + y.len()).max(1);
    let one = crate::rational::Rational::ONE;
    let product = NcSeries::monomial(x, one.clone(), degree).shuffle_mul(&NcSeries::monomial(y, one, degree));
    let words: Vec<Word> = product.support().chain([x, y]).collect();
    let horizon = controls.horizon;
    let table = integrate_cascade_with(controls, steps, WordSet::Closure(words), Record::Times(vec![horizon]))?;
    Ok(HomomorphismError {
        lhs: evaluate(&product, &table, horizon)?,
        rhs: table.value(x, horizon)? * table.value(y, horizon)?,
    })
}

/// Families of random controls bounded by a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlFamily {
    /// Piecewise constant with at most this many pieces per channel.
    PiecewiseConstant(usize),
    /// Polynomials of degree at most 3.
    Smooth,
    /// Each channel picks one of the three channel kinds.
    Mixed,
}

/// Deterministic generator for draw number `index` of a seeded sweep.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_piecewise_constant<R: Rng + ?Sized>(rng: &mut R, horizon: f64, max_pieces: usize, bound: f64) -> Channel {
    let pieces = rng.gen_range(1..=max_pieces.max(1));
    let mut breakpoints: Vec<f64> = (1..pieces).map(|_| rng.gen_range(0.02..0.98) * horizon).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let values = (0..=breakpoints.len()).map(|_| rng.gen_range(-bound..=bound)).collect();
    Channel::PiecewiseConstant { breakpoints, values }
}

/// A cubic with `Σ|c_k| Tᵏ <= bound`, so `|u| <= bound` on `[0, T]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, horizon: f64, bound: f64) -> Channel {
    let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let size: f64 = raw
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * horizon.powi(k as i32))
        .sum();
    let scale = bound * rng.gen_range(0.5..=1.0) / size.max(f64::MIN_POSITIVE);
    Channel::Polynomial {
        coeffs: raw.iter().map(|c| c * scale).collect(),
    }
}

pub fn random_sampled<R: Rng + ?Sized>(rng: &mut R, horizon: f64, samples: usize, bound: f64) -> Channel {
    let samples = samples.max(2);
    Channel::Sampled {
        dt: horizon / (samples - 1) as f64,
        values: (0..samples).map(|_| rng.gen_range(-bound..=bound)).collect(),
    }
}

pub fn random_controls<R: Rng + ?Sized>(rng: &mut R, horizon: f64, bound: f64, family: ControlFamily) -> ControlSpec {
    let mut spec = ControlSpec::zero(horizon);
    for l in Letter::ALL {
        let ch = match family {
            ControlFamily::PiecewiseConstant(k) => random_piecewise_constant(rng, horizon, k, bound),
            ControlFamily::Smooth => random_polynomial(rng, horizon, bound),
            ControlFamily::Mixed => match rng.gen_range(0..3) {
                0 => random_piecewise_constant(rng, horizon, 4, bound),
                1 => random_polynomial(rng, horizon, bound),
                _ => random_sampled(rng, horizon, 11, bound),
            },
        };
        spec = spec.with_channel(l, ch);
    }
    spec
}
