//! Wei–Norman coordinates and the general Riccati equation
//! `ẏ = u_a + 2u_b y - u_c y²`.

pub mod report;
mod sl2;

pub use report::{verify_suite, CheckResult, VerifyConfig, VerifyReport};
pub use sl2::{
    flow_errors, make_sl2_rep, matrix_flow_rk4, verify_flow_factorization, ConventionError, FlowConvention, FlowReport,
    Sl2Rep, MATCHING_CONVENTION,
};

use serde::{Deserialize, Serialize};

use crate::chron::{cumulative_trapezoid, series_paths, xi_c_from_path, ControlSpec, TimeGrid};
use crate::error::{Error, Result};
use crate::hall::{z_series, ZSeries};
use crate::words::Letter;

/// Blow-up threshold on the denominator of the series solution.
pub const DENOMINATOR_GUARD: f64 = 1e-8;
/// Blow-up threshold on `|y|` for the RK4 oracle.
pub const RK4_BLOWUP: f64 = 1e12;

/// `Ξ_d(t) = Υᵗ(Z_d)` on a grid.
#[derive(Clone, Debug)]
pub struct WeiNormanPath {
    pub degree: usize,
    pub grid: TimeGrid,
    pub xi_a: Vec<f64>,
    pub xi_b: Vec<f64>,
    pub xi_c: Vec<f64>,
    /// `Υᵗ(exp⧢(2S))`.
    pub exp_2s: Vec<f64>,
}

impl WeiNormanPath {
    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn coordinates(&self, i: usize) -> [f64; 3] {
        [self.xi_a[i], self.xi_b[i], self.xi_c[i]]
    }
}

/// Evaluates already-built series on a grid.
pub fn wei_norman_path_from(z: &ZSeries, controls: &ControlSpec, grid: &TimeGrid) -> WeiNormanPath {
    let mut paths = series_paths(controls, &[&z.za, &z.s, &z.zc, &z.exp2s], grid).into_iter();
    let mut next = || paths.next().expect("four paths");
    WeiNormanPath {
        degree: z.degree,
        grid: grid.clone(),
        xi_a: next(),
        xi_b: next(),
        xi_c: next(),
        exp_2s: next(),
    }
}

pub fn wei_norman_path(controls: &ControlSpec, degree: usize, steps: usize) -> Result<WeiNormanPath> {
    if degree == 0 {
        return Err(Error::Input("degree must be at least 1".into()));
    }
    let grid = TimeGrid::new(controls, steps)?;
    Ok(wei_norman_path_from(&z_series(degree), controls, &grid))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiccatiPath {
    pub times: Vec<f64>,
    pub y: Vec<f64>,
}

impl RiccatiPath {
    /// Value at a grid time.
    pub fn at(&self, t: f64) -> Result<f64> {
        let tol = 1e-12 * self.times.last().copied().unwrap_or(1.0).max(1.0);
        let i = self.times.partition_point(|&s| s < t - tol);
        match self.times.get(i) {
            Some(&s) if (s - t).abs() <= tol => Ok(self.y[i]),
            _ => Err(Error::OffGrid { t }),
        }
    }

    pub fn max_abs_difference(&self, other: &RiccatiPath) -> f64 {
        assert_eq!(self.times.len(), other.times.len(), "paths on different grids");
        self.y
            .iter()
            .zip(&other.y)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }
}

/// `y(t) = Ξ_a + y₀ e^{2Υ(S)} / (1 + y₀ ∫₀ᵗ u_c e^{2Υ(S)})` from a path.
pub fn riccati_from_path(path: &WeiNormanPath, controls: &ControlSpec, y0: f64) -> Result<RiccatiPath> {
    let integral = xi_c_from_path(controls, &path.xi_b, &path.grid);
    let times = path.times();
    let mut y = Vec::with_capacity(integral.len());
    for (i, &t) in times.iter().enumerate() {
        let denominator = 1.0 + y0 * integral[i];
        // starts at 1, so a zero can fall between nodes
        if denominator < DENOMINATOR_GUARD {
            let escape = if i == 0 {
                t
            } else {
                let before = 1.0 + y0 * integral[i - 1];
                times[i - 1] + (t - times[i - 1]) * before / (before - denominator)
            };
            return Err(Error::BlowUp { t: escape });
        }
        y.push(path.xi_a[i] + y0 * (2.0 * path.xi_b[i]).exp() / denominator);
    }
    Ok(RiccatiPath {
        times: path.times().to_vec(),
        y,
    })
}

/// The Riccati solution from the truncated series.
pub fn riccati_series(controls: &ControlSpec, y0: f64, degree: usize, steps: usize) -> Result<RiccatiPath> {
    riccati_from_path(&wei_norman_path(controls, degree, steps)?, controls, y0)
}

/// RK4 on the scalar equation over the same grid as the series solution.
pub fn riccati_rk4_on(controls: &ControlSpec, y0: f64, grid: &TimeGrid) -> Result<RiccatiPath> {
    let f = |y: f64, u: [f64; 3]| u[0] + 2.0 * u[1] * y - u[2] * y * y;
    let times = grid.times();
    let mut y = y0;
    let mut out = Vec::with_capacity(times.len());
    out.push(y);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let u = controls.interval_values(w[0], w[1]);
        let k1 = f(y, u.start);
        let k2 = f(y + 0.5 * h * k1, u.mid);
        let k3 = f(y + 0.5 * h * k2, u.mid);
        let k4 = f(y + h * k3, u.end);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !y.is_finite() || y.abs() > RK4_BLOWUP {
            return Err(Error::BlowUp { t: w[1] });
        }
        out.push(y);
    }
    Ok(RiccatiPath {
        times: times.to_vec(),
        y: out,
    })
}

pub fn riccati_rk4(controls: &ControlSpec, y0: f64, steps: usize) -> Result<RiccatiPath> {
    riccati_rk4_on(controls, y0, &TimeGrid::new(controls, steps)?)
}

/// Central-difference residuals of the coordinate equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeResidual {
    /// Against `Ξ̇_a = u_a + 2u_b Ξ_a - u_c Ξ_a²`.
    pub xi_a: f64,
    /// Against `Ξ̇_b = u_b - u_c Ξ_a`.
    pub xi_b: f64,
}

impl DerivativeResidual {
    pub fn max(&self) -> f64 {
        self.xi_a.max(self.xi_b)
    }
}

/// Residuals at interior grid points; points on control jumps or kinks are
/// skipped since the derivative is one-sided there.
pub fn verify_riccati_derivative(path: &WeiNormanPath, controls: &ControlSpec) -> Result<DerivativeResidual> {
    let t = path.times();
    if t.len() < 100 {
        return Err(Error::Input(format!(
            "central differences need at least 100 grid points, got {}",
            t.len()
        )));
    }
    let mut res = DerivativeResidual { xi_a: 0.0, xi_b: 0.0 };
    for i in 1..t.len() - 1 {
        if path.grid.is_kink(i) {
            continue;
        }
        let (hm, hp) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        let diff =
            |f: &[f64]| (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) / (hm * hp * (hm + hp));
        let u = controls.values(t[i]);
        let xa = path.xi_a[i];
        let rhs_a = u[0] + 2.0 * u[1] * xa - u[2] * xa * xa;
        let rhs_b = u[1] - u[2] * xa;
        res.xi_a = res.xi_a.max((diff(&path.xi_a) - rhs_a).abs());
        res.xi_b = res.xi_b.max((diff(&path.xi_b) - rhs_b).abs());
    }
    Ok(res)
}

fn max_gap(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// `max |Ξ_b - ∫₀ᵗ (u_b - u_c Ξ_a)|`.
pub fn xi_b_two_route_error(path: &WeiNormanPath, controls: &ControlSpec) -> f64 {
    let (b, c) = (Letter::B.index(), Letter::C.index());
    let direct = cumulative_trapezoid(&path.grid, |i, lo, hi| {
        let u = controls.interval_values(lo, hi);
        (
            u.start[b] - u.start[c] * path.xi_a[i],
            u.end[b] - u.end[c] * path.xi_a[i + 1],
        )
    });
    max_gap(&direct, &path.xi_b)
}

/// `max |Ξ_c - ∫₀ᵗ u_c e^{2Υ(S)}|`.
pub fn xi_c_two_route_error(path: &WeiNormanPath, controls: &ControlSpec) -> f64 {
    max_gap(&xi_c_from_path(controls, &path.xi_b, &path.grid), &path.xi_c)
}

/// `max |e^{2Ξ_b} - Υ(exp⧢(2S))|`.
pub fn exp_identity_error(path: &WeiNormanPath) -> f64 {
    let lhs: Vec<f64> = path.xi_b.iter().map(|x| (2.0 * x).exp()).collect();
    max_gap(&lhs, &path.exp_2s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chron::{draw_rng, random_controls, ControlFamily};

    fn only(l: Letter, v: f64, horizon: f64) -> ControlSpec {
        let mut u = [0.0; 3];
        u[l.index()] = v;
        ControlSpec::constant(horizon, u)
    }

    #[test]
    fn single_channel_paths() {
        for l in Letter::ALL {
            let path = wei_norman_path(&only(l, 1.0, 1.0), 6, 100).unwrap();
            for (i, &t) in path.times().iter().enumerate() {
                let mut want = [0.0; 3];
                want[l.index()] = t;
                let got = path.coordinates(i);
                for k in 0..3 {
                    assert!((got[k] - want[k]).abs() < 1e-14, "{l} {k}: {got:?} at {t}");
                }
            }
            assert_eq!(path.coordinates(0), [0.0; 3]);
        }
    }

    #[test]
    fn closed_form_solutions() {
        let y = riccati_series(&only(Letter::C, 1.0, 1.0), 1.0, 6, 1000).unwrap();
        for (t, v) in y.times.iter().zip(&y.y) {
            assert!((v - 1.0 / (1.0 + t)).abs() < 1e-9);
        }
        let y = riccati_series(&only(Letter::A, 1.0, 1.0), 0.0, 6, 100).unwrap();
        assert!((y.at(0.7).unwrap() - 0.7).abs() < 1e-14);
        let rk = riccati_rk4(&only(Letter::C, 1.0, 1.0), 1.0, 1000).unwrap();
        assert!((rk.at(1.0).unwrap() - 0.5).abs() < 1e-10);
        let rk = riccati_rk4(&only(Letter::B, 1.0, 1.0), 1.0, 1000).unwrap();
        assert!((rk.at(1.0).unwrap() - 2f64.exp()).abs() < 1e-8);
        assert!(matches!(y.at(0.705), Err(Error::OffGrid { .. })));
    }

    #[test]
    fn zero_initial_value_gives_xi_a() {
        let spec = random_controls(&mut draw_rng(5, 0), 0.5, 1.0, ControlFamily::Mixed);
        let path = wei_norman_path(&spec, 6, 200).unwrap();
        let y = riccati_from_path(&path, &spec, 0.0).unwrap();
        assert_eq!(y.y, path.xi_a);
    }

    #[test]
    fn blow_up_is_reported() {
        // ẏ = -y², y₀ = -1 escapes at t = 1
        let spec = only(Letter::C, 1.0, 2.0);
        assert!(matches!(riccati_series(&spec, -1.0, 4, 1000), Err(Error::BlowUp { t }) if (t - 1.0).abs() < 1e-9));
        assert!(matches!(riccati_rk4(&spec, -1.0, 1000), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn blow_up_between_nodes_is_reported() {
        let spec = only(Letter::C, 1.0, 1.5);
        match riccati_series(&spec, -1.0, 4, 997) {
            Err(Error::BlowUp { t }) => assert!((t - 1.0).abs() < 1e-9, "{t}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn derivative_residual_trivial_cases() {
        for l in [Letter::A, Letter::C] {
            let spec = only(l, 1.0, 1.0);
            let path = wei_norman_path(&spec, 6, 200).unwrap();
            assert!(verify_riccati_derivative(&path, &spec).unwrap().max() <= 1e-8);
        }
        let spec = only(Letter::A, 1.0, 1.0);
        let short = wei_norman_path(&spec, 4, 50).unwrap();
        assert!(verify_riccati_derivative(&short, &spec).is_err());
    }

    #[test]
    fn series_agrees_with_oracle_on_a_random_draw() {
        let spec = random_controls(&mut draw_rng(9, 2), 0.5, 1.0, ControlFamily::Mixed);
        let grid = TimeGrid::new(&spec, 2000).unwrap();
        let path = wei_norman_path_from(&z_series(8), &spec, &grid);
        for y0 in [0.0, 0.5, -0.5] {
            let series = riccati_from_path(&path, &spec, y0).unwrap();
            let oracle = riccati_rk4_on(&spec, y0, &grid).unwrap();
            assert!(series.max_abs_difference(&oracle) < 1e-4);
        }
        assert!(xi_b_two_route_error(&path, &spec) < 1e-6);
        assert!(xi_c_two_route_error(&path, &spec) < 1e-6);
        assert!(exp_identity_error(&path) < 1e-5);
    }
}
