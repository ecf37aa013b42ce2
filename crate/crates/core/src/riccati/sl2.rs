//! The 2×2 matrix realization and the three-flow factorization check.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::chron::{ControlSpec, TimeGrid};
use crate::error::{Error, Result};
use crate::words::Letter;

use super::WeiNormanPath;

type IntMatrix = [[i64; 2]; 2];

fn mul(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn commutator(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let (p, q) = (mul(x, y), mul(y, x));
    [
        [p[0][0] - q[0][0], p[0][1] - q[0][1]],
        [p[1][0] - q[1][0], p[1][1] - q[1][1]],
    ]
}

fn scaled(k: i64, x: &IntMatrix) -> IntMatrix {
    x.map(|row| row.map(|v| k * v))
}

/// Matrices `M_a, M_b, M_c` with `[M_a,M_b] = 2M_a`, `[M_a,M_c] = -M_b`,
/// `[M_b,M_c] = 2M_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Rep {
    exact: [IntMatrix; 3],
}

impl Sl2Rep {
    pub fn integer_matrix(&self, l: Letter) -> IntMatrix {
        self.exact[l.index()]
    }

    pub fn matrix(&self, l: Letter) -> Matrix2<f64> {
        let m = self.exact[l.index()];
        Matrix2::new(m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64)
    }

    /// `Σ u_d M_d`.
    pub fn generator(&self, u: [f64; 3]) -> Matrix2<f64> {
        Letter::ALL
            .iter()
            .fold(Matrix2::zeros(), |acc, &l| acc + self.matrix(l) * u[l.index()])
    }

    /// `exp(ξ M_d)` in closed form: unipotent for nilpotent `M_d`,
    /// entrywise for diagonal `M_d`.
    pub fn exp_factor(&self, l: Letter, xi: f64) -> Matrix2<f64> {
        let m = self.exact[l.index()];
        if m[0][1] == 0 && m[1][0] == 0 {
            Matrix2::new((xi * m[0][0] as f64).exp(), 0.0, 0.0, (xi * m[1][1] as f64).exp())
        } else {
            assert_eq!(mul(&m, &m), [[0; 2]; 2], "generator is neither diagonal nor nilpotent");
            Matrix2::identity() + self.matrix(l) * xi
        }
    }

    fn satisfies_relations(m: &[IntMatrix; 3]) -> bool {
        let [a, b, c] = m;
        let traceless = m.iter().all(|x| x[0][0] + x[1][1] == 0);
        traceless
            && commutator(a, b) == scaled(2, a)
            && commutator(a, c) == scaled(-1, b)
            && commutator(b, c) == scaled(2, c)
    }
}

/// Searches `M_a = ±e`, `M_b = ±h`, `M_c = ±f` for a triple satisfying the
/// relations exactly.
pub fn make_sl2_rep() -> Sl2Rep {
    let e: IntMatrix = [[0, 1], [0, 0]];
    let h: IntMatrix = [[1, 0], [0, -1]];
    let f: IntMatrix = [[0, 0], [1, 0]];
    for sa in [1, -1] {
        for sb in [1, -1] {
            for sc in [1, -1] {
                let m = [scaled(sa, &e), scaled(sb, &h), scaled(sc, &f)];
                if Sl2Rep::satisfies_relations(&m) {
                    return Sl2Rep { exact: m };
                }
            }
        }
    }
    unreachable!("the sign search always succeeds")
}

/// How the matrix system realizes the vector fields and in which order the
/// three factors are multiplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowConvention {
    /// `Ẋ = A·X`, `X = e^{Ξ_c M_c} e^{Ξ_b M_b} e^{Ξ_a M_a} X₀`.
    RightInvariantCba,
    /// `Ẋ = X·A`, `X = X₀ e^{Ξ_a M_a} e^{Ξ_b M_b} e^{Ξ_c M_c}`.
    LeftInvariantAbc,
    /// `Ẋ = X·A`, `X = X₀ e^{Ξ_c M_c} e^{Ξ_b M_b} e^{Ξ_a M_a}`.
    LeftInvariantCba,
    /// `Ẋ = A·X`, `X = e^{Ξ_a M_a} e^{Ξ_b M_b} e^{Ξ_c M_c} X₀`.
    RightInvariantAbc,
}

/// The convention the factorization matches on random controls. Constant
/// controls cannot tell left from right invariance, since `A` commutes with
/// `e^{tA}`.
pub const MATCHING_CONVENTION: FlowConvention = FlowConvention::LeftInvariantCba;

impl FlowConvention {
    pub const ALL: [FlowConvention; 4] = [
        FlowConvention::RightInvariantCba,
        FlowConvention::LeftInvariantAbc,
        FlowConvention::LeftInvariantCba,
        FlowConvention::RightInvariantAbc,
    ];

    fn left_invariant(self) -> bool {
        matches!(
            self,
            FlowConvention::LeftInvariantAbc | FlowConvention::LeftInvariantCba
        )
    }

    fn cba(self) -> bool {
        matches!(
            self,
            FlowConvention::RightInvariantCba | FlowConvention::LeftInvariantCba
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowConvention::RightInvariantCba => "right_invariant_cba",
            FlowConvention::LeftInvariantAbc => "left_invariant_abc",
            FlowConvention::LeftInvariantCba => "left_invariant_cba",
            FlowConvention::RightInvariantAbc => "right_invariant_abc",
        }
    }

    /// The product of the three factors at coordinates `(Ξ_a, Ξ_b, Ξ_c)`, with `X₀ = I`.
    pub fn product(self, rep: &Sl2Rep, xi: [f64; 3]) -> Matrix2<f64> {
        let [ea, eb, ec] = Letter::ALL.map(|l| rep.exp_factor(l, xi[l.index()]));
        if self.cba() {
            ec * eb * ea
        } else {
            ea * eb * ec
        }
    }
}

/// Solves the matrix system with RK4 on the grid, `X(0) = I`.
pub fn matrix_flow_rk4(
    rep: &Sl2Rep,
    controls: &ControlSpec,
    grid: &TimeGrid,
    left_invariant: bool,
) -> Vec<Matrix2<f64>> {
    let rhs = |x: &Matrix2<f64>, u: [f64; 3]| {
        let a = rep.generator(u);
        if left_invariant {
            x * a
        } else {
            a * x
        }
    };
    let times = grid.times();
    let mut x = Matrix2::identity();
    let mut out = Vec::with_capacity(times.len());
    out.push(x);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let u = controls.interval_values(w[0], w[1]);
        let k1 = rhs(&x, u.start);
        let k2 = rhs(&(x + k1 * (0.5 * h)), u.mid);
        let k3 = rhs(&(x + k2 * (0.5 * h)), u.mid);
        let k4 = rhs(&(x + k3 * h), u.end);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(x);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionError {
    pub convention: FlowConvention,
    /// Largest Frobenius distance over the grid.
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub errors: Vec<ConventionError>,
    pub tolerance: f64,
    /// Conventions within tolerance.
    pub matching: Vec<FlowConvention>,
}

impl FlowReport {
    /// The convention if exactly one matches.
    pub fn unique_match(&self) -> Option<FlowConvention> {
        match self.matching.as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    pub fn best(&self) -> &ConventionError {
        self.errors
            .iter()
            .min_by(|x, y| x.max_error.total_cmp(&y.max_error))
            .expect("four conventions")
    }
}

/// Compares every convention's factor product with the oracle flow.
pub fn flow_errors(path: &WeiNormanPath, controls: &ControlSpec, tolerance: f64) -> FlowReport {
    let rep = make_sl2_rep();
    let mut errors = Vec::new();
    for left in [false, true] {
        let flow = matrix_flow_rk4(&rep, controls, &path.grid, left);
        for conv in FlowConvention::ALL.into_iter().filter(|c| c.left_invariant() == left) {
            let max_error = flow
                .iter()
                .enumerate()
                .map(|(i, x)| (conv.product(&rep, path.coordinates(i)) - x).norm())
                .fold(0.0, f64::max);
            errors.push(ConventionError {
                convention: conv,
                max_error,
            });
        }
    }
    errors.sort_by_key(|e| FlowConvention::ALL.iter().position(|c| *c == e.convention));
    let matching = errors
        .iter()
        .filter(|e| e.max_error <= tolerance)
        .map(|e| e.convention)
        .collect();
    FlowReport {
        errors,
        tolerance,
        matching,
    }
}

/// The three-flow factorization against RK4 oracles for every convention.
/// Fails when no convention is within `tolerance`.
pub fn verify_flow_factorization(
    controls: &ControlSpec,
    degree: usize,
    steps: usize,
    tolerance: f64,
) -> Result<FlowReport> {
    let path = super::wei_norman_path(controls, degree, steps)?;
    let report = flow_errors(&path, controls, tolerance);
    if report.matching.is_empty() {
        return Err(Error::Factorization {
            best_error: report.best().max_error,
            tolerance,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_hold_exactly() {
        let rep = make_sl2_rep();
        let [a, b, c] = Letter::ALL.map(|l| rep.integer_matrix(l));
        assert_eq!(commutator(&a, &b), scaled(2, &a));
        assert_eq!(commutator(&a, &c), scaled(-1, &b));
        assert_eq!(commutator(&b, &c), scaled(2, &c));
        assert_eq!(a, [[0, 1], [0, 0]]);
        assert_eq!(b, [[-1, 0], [0, 1]]);
        assert_eq!(c, [[0, 0], [1, 0]]);
    }

    #[test]
    fn closed_form_factors_match_series_exponential() {
        let rep = make_sl2_rep();
        for l in Letter::ALL {
            let m = rep.matrix(l) * 0.37;
            let mut term = Matrix2::identity();
            let mut sum = Matrix2::identity();
            for k in 1..30 {
                term = term * m / k as f64;
                sum += term;
            }
            assert!((sum - rep.exp_factor(l, 0.37)).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_controls_match_everywhere() {
        let controls = ControlSpec::zero(0.3);
        let report = verify_flow_factorization(&controls, 4, 30, 1e-12).unwrap();
        assert!(report.errors.iter().all(|e| e.max_error == 0.0));
        assert_eq!(report.matching.len(), 4);
        assert_eq!(report.unique_match(), None);
    }

    #[test]
    fn random_controls_single_out_one_convention() {
        use crate::chron::{draw_rng, random_controls, ControlFamily};
        for i in 0..3 {
            let controls = random_controls(&mut draw_rng(41, i), 0.3, 1.0, ControlFamily::PiecewiseConstant(3));
            let report = verify_flow_factorization(&controls, 8, 600, 1e-4).unwrap();
            assert_eq!(report.unique_match(), Some(MATCHING_CONVENTION), "{report:?}");
        }
    }

    #[test]
    fn single_generator_flows() {
        for l in Letter::ALL {
            let mut u = [0.0; 3];
            u[l.index()] = 1.0;
            let controls = ControlSpec::constant(0.3, u);
            let report = verify_flow_factorization(&controls, 4, 3000, 1e-10).unwrap();
            assert!(report.best().max_error <= 1e-10, "{l}: {:?}", report);
        }
    }
}
