//! Fourier-spectral realization of the worked higher-order examples:
//! `A_1 = D^k` on a periodic grid, where `D` is the spectral
//! differentiation matrix.
//!
//! Two readings of the resulting second/third order equations are
//! evaluated side by side. The operator-family reading (`A_n` from the
//! recurrence, here `D^{kn}`) is the one backed by the recurrence theorem
//! and its residual must vanish; the literal reading treats the mixed
//! `d/dt d/dx` terms as compositions on the solution and its residual is
//! measured and reported, never asserted to vanish. A mode-wise check
//! confirms the substitution identities that close the operator reading.

use crate::error::{Error, Result};
use crate::evolution::{EvolutionFamily, GeneratorFamily};
use crate::hierarchy::recurrence_build;
use crate::linalg::{CVector, Operator};
use crate::scalar::{fl, rf, Cx, RealScalar};
use nalgebra::ComplexField;

/// Uniform periodic grid `x_j = j L / N`.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicGrid<R: RealScalar> {
    n: usize,
    length: R,
}

impl<R: RealScalar> PeriodicGrid<R> {
    pub fn new(n: usize, length: R) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidInput(
                "periodic grid needs an even point count >= 8".into(),
            ));
        }
        if !(length > R::zero()) {
            return Err(Error::InvalidInput("domain length must be positive".into()));
        }
        Ok(Self { n, length })
    }

    /// `2 pi`-periodic default domain.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, R::two_pi())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> R {
        self.length
    }

    pub fn points(&self) -> Vec<R> {
        (0..self.n)
            .map(|j| self.length * rf::<R>(j as f64) / rf::<R>(self.n as f64))
            .collect()
    }

    /// Signed mode index for column `m` of the DFT, with the Nyquist mode
    /// kept at `+N/2` for every derivative order so that spectral
    /// differentiation matrices compose exactly: `D(p) = D(1)^p`.
    fn signed_mode(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Wavenumber of signed mode `m`.
    pub fn wavenumber(&self, m: i64) -> R {
        R::two_pi() * rf::<R>(m as f64) / self.length
    }
}

/// Dense spectral differentiation matrix applying `(d/dx)^p` on the grid:
/// exact (to roundoff) on every resolvable Fourier mode `|m| < N/2`.
pub fn fourier_diff_matrix<R: RealScalar>(grid: &PeriodicGrid<R>, p: usize) -> Operator<R> {
    assert!(p >= 1, "derivative power must be >= 1");
    let n = grid.len();
    let n_r = rf::<R>(n as f64);
    // circulant generator c[delta] = (1/N) sum_m (i k_m)^p e^{2 pi i delta m / N}
    let mut gen = vec![Cx::new(R::zero(), R::zero()); n];
    let two_pi = R::two_pi();
    for (delta, slot) in gen.iter_mut().enumerate() {
        let mut acc = Cx::new(R::zero(), R::zero());
        for m in 0..n {
            let k_m = grid.wavenumber(grid.signed_mode(m));
            let symbol = ComplexField::powi(Cx::new(R::zero(), k_m), p as i32);
            let phase = two_pi * rf::<R>((delta * m) as f64) / n_r;
            acc += symbol * Cx::new(phase.cos(), phase.sin());
        }
        *slot = acc / Cx::new(n_r, R::zero());
    }
    Operator::from_fn(n, |j, l| {
        let delta = (j + n - l) % n;
        gen[delta]
    })
}

/// One worked scenario: first-order generator `D^k`, target order 2 or 3.
#[derive(Debug, Clone)]
pub struct PDEScenario<R: RealScalar> {
    pub grid: PeriodicGrid<R>,
    pub k: usize,
    pub order: usize,
    pub initial: CVector<R>,
    pub horizon: R,
    pub timesteps: usize,
}

impl<R: RealScalar> PDEScenario<R> {
    pub fn new(
        grid: PeriodicGrid<R>,
        k: usize,
        order: usize,
        initial: CVector<R>,
        horizon: R,
        timesteps: usize,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput("spatial power k must be >= 1".into()));
        }
        if !(order == 2 || order == 3) {
            return Err(Error::InvalidInput("target order must be 2 or 3".into()));
        }
        if initial.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: grid.len(),
                right: initial.len(),
            });
        }
        if initial.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("initial data must be finite".into()));
        }
        if !(horizon > R::zero()) || timesteps == 0 {
            return Err(Error::InvalidInput(
                "need a positive horizon and at least one timestep".into(),
            ));
        }
        Ok(Self {
            grid,
            k,
            order,
            initial,
            horizon,
            timesteps,
        })
    }

    /// Initial data from an expression in `x` sampled on the grid.
    pub fn from_expression(
        grid: PeriodicGrid<R>,
        k: usize,
        order: usize,
        initial: &str,
        horizon: R,
        timesteps: usize,
    ) -> Result<Self> {
        let expr = crate::expr::Expr::parse(initial, "x")?;
        let values: Vec<Cx<R>> = grid
            .points()
            .iter()
            .map(|&x| Cx::new(expr.eval(x), R::zero()))
            .collect();
        Self::new(grid, k, order, CVector::from_vec(values), horizon, timesteps)
    }

    /// The first-order generator `D^k` as one spectral matrix.
    pub fn generator_matrix(&self) -> Operator<R> {
        fourier_diff_matrix(&self.grid, self.k)
    }

    fn evolution(&self) -> Result<EvolutionFamily<R>> {
        let gen = GeneratorFamily::constant(self.generator_matrix(), self.horizon)?;
        Ok(EvolutionFamily::new(gen))
    }
}

/// Residual curves of the two readings over the scenario's time grid.
#[derive(Debug, Clone)]
pub struct ExampleReport<R: RealScalar> {
    pub times: Vec<R>,
    pub solution_norms: Vec<R>,
    /// `|d^n u - A_n u|` with `A_n` from the recurrence.
    pub operator_residuals: Vec<R>,
    /// Residual of the equation read with commuting partial derivatives.
    pub literal_residuals: Vec<R>,
    /// `|D^{nk} u|`, the scale the literal discrepancy is predicted to have.
    pub literal_scales: Vec<R>,
}

const BLOWUP_GUARD: f64 = 1e8;

/// Evolve the scenario and evaluate both readings at each time step.
pub fn example_residuals<R: RealScalar>(sc: &PDEScenario<R>) -> Result<ExampleReport<R>> {
    let ev = sc.evolution()?;
    let a = sc.generator_matrix();
    let seq = recurrence_build(ev.generator(), sc.order)?;
    let n_times = sc.timesteps + 1;
    let mut report = ExampleReport {
        times: Vec::with_capacity(n_times),
        solution_norms: Vec::with_capacity(n_times),
        operator_residuals: Vec::with_capacity(n_times),
        literal_residuals: Vec::with_capacity(n_times),
        literal_scales: Vec::with_capacity(n_times),
    };
    for i in 0..n_times {
        let t = sc.horizon * rf::<R>(i as f64) / rf::<R>(sc.timesteps as f64);
        let u = ev.propagate(t, R::zero())?.apply(&sc.initial)?;
        let norm_u = u.norm();
        if norm_u > rf(BLOWUP_GUARD) {
            return Err(Error::IntegrationBlowup {
                norm: fl(norm_u),
                guard: BLOWUP_GUARD,
                t: fl(t),
            });
        }
        // time-derivative ladder d^j u = A^j u
        let du1 = a.apply(&u)?;
        let du2 = a.apply(&du1)?;
        let du3 = a.apply(&du2)?;

        let (lhs, operator_rhs, literal_rhs) = match sc.order {
            2 => {
                let op_rhs = seq.member(2).apply(t, &u)?;
                // d/dt d/dx^k u read as D^k (du/dt), plus D^{2k} u
                let lit = a.apply(&du1)? + a.apply(&a.apply(&u)?)?;
                (du2.clone(), op_rhs, lit)
            }
            3 => {
                let op_rhs = seq.member(3).apply(t, &u)?;
                // D^k(d^2u) + 2 D^{2k}(du) + D^{3k} u
                let term1 = a.apply(&du2)?;
                let term2 = a.apply(&a.apply(&du1)?)? * Cx::new(rf::<R>(2.0), R::zero());
                let term3 = a.apply(&a.apply(&a.apply(&u)?)?)?;
                (du3.clone(), op_rhs, term1 + term2 + term3)
            }
            _ => unreachable!("validated in the constructor"),
        };
        let mut scale_vec = u.clone();
        for _ in 0..(sc.order * sc.k) {
            scale_vec = fourier_diff_matrix(&sc.grid, 1).apply(&scale_vec)?;
        }
        report.times.push(t);
        report.solution_norms.push(norm_u);
        report.operator_residuals.push((&lhs - &operator_rhs).norm());
        report.literal_residuals.push((&lhs - &literal_rhs).norm());
        report.literal_scales.push(scale_vec.norm());
    }
    Ok(report)
}

/// Outcome of the mode-wise substitution identity at one mode.
#[derive(Debug, Clone)]
pub struct ModeCheck<R: RealScalar> {
    pub mode: i64,
    pub amplitude: R,
    /// Amplitude below the division threshold; the remaining fields are
    /// not meaningful.
    pub skipped: bool,
    /// `|u^{-1} du/dt - (i k)^k|`: the measured Cole-Hopf ratio against
    /// the exact spectral symbol.
    pub symbol_error: R,
    /// `|d/dt (u^{-1} du/dt)|` measured through the second derivative;
    /// vanishes because the ratio is constant per mode.
    pub dt_coefficient_residual: R,
    /// Residual of the full n-th order identity under the substitution
    /// reading, relative to the mode scale.
    pub identity_residual: R,
}

/// Report of [`verify_operator_substitution`].
#[derive(Debug, Clone)]
pub struct SubstitutionReport<R: RealScalar> {
    pub time: R,
    pub modes: Vec<ModeCheck<R>>,
    /// Largest identity residual over the active modes.
    pub max_identity_residual: R,
}

const MODE_THRESHOLD: f64 = 1e-12;

/// Per-mode substitution check at time `t`: on each active Fourier mode
/// the solution is a nonzero scalar multiple, the Cole-Hopf ratio
/// `v = u^{-1} du/dt` equals the symbol `(i k)^k`, and the n-th order
/// equation closes exactly under the substitution reading.
pub fn verify_operator_substitution<R: RealScalar>(
    sc: &PDEScenario<R>,
    t: R,
) -> Result<SubstitutionReport<R>> {
    if t < R::zero() || t > sc.horizon {
        return Err(Error::HorizonViolation {
            t: fl(t),
            s: fl(t),
            horizon: fl(sc.horizon),
        });
    }
    let ev = sc.evolution()?;
    let a = sc.generator_matrix();
    let u = ev.propagate(t, R::zero())?.apply(&sc.initial)?;
    let w1 = a.apply(&u)?;
    let w2 = a.apply(&w1)?;
    let w3 = a.apply(&w2)?;

    let n = sc.grid.len();
    let hat = |v: &CVector<R>, m: usize| -> Cx<R> {
        let mut acc = Cx::new(R::zero(), R::zero());
        let two_pi = R::two_pi();
        for (j, &val) in v.iter().enumerate() {
            let phase = -two_pi * rf::<R>((j * m) as f64) / rf::<R>(n as f64);
            acc += val * Cx::new(phase.cos(), phase.sin());
        }
        acc / Cx::new(rf::<R>(n as f64), R::zero())
    };

    let mut max_amp = R::zero();
    let amps: Vec<Cx<R>> = (0..n).map(|m| hat(&sc.initial, m)).collect();
    for z in &amps {
        if z.modulus() > max_amp {
            max_amp = z.modulus();
        }
    }
    let threshold = rf::<R>(MODE_THRESHOLD) * (R::one() + max_amp);

    let mut modes = Vec::with_capacity(n);
    let mut max_identity = R::zero();
    for m in 0..n {
        let signed = sc.grid.signed_mode(m);
        let u_hat = hat(&u, m);
        let amplitude = u_hat.modulus();
        if amps[m].modulus() < threshold || amplitude < threshold {
            modes.push(ModeCheck {
                mode: signed,
                amplitude,
                skipped: true,
                symbol_error: R::zero(),
                dt_coefficient_residual: R::zero(),
                identity_residual: R::zero(),
            });
            continue;
        }
        let w1_hat = hat(&w1, m);
        let w2_hat = hat(&w2, m);
        let w3_hat = hat(&w3, m);
        // Cole-Hopf ratio and exact symbol
        let v = w1_hat / u_hat;
        let symbol =
            ComplexField::powi(Cx::new(R::zero(), sc.grid.wavenumber(signed)), sc.k as i32);
        let symbol_error = (v - symbol).modulus();
        // q = u^{-1} d^2u; the substitution identity gives
        // d/dt v = -v^2 + q, which must vanish since v is constant per mode
        let q = w2_hat / u_hat;
        let dt_v = q - v * v;
        let dt_coefficient_residual = dt_v.modulus();
        // a_2 = dt v + v^2, a_3 = dt a_2 + v a_2 with dt a_2 measured
        let scale = amplitude * (R::one() + symbol.modulus()).powi(sc.order as i32);
        let identity_residual = match sc.order {
            2 => {
                let a2 = dt_v + v * v;
                (a2 * u_hat - w2_hat).modulus() / scale
            }
            3 => {
                let a2 = dt_v + v * v;
                let dt_a2 = w3_hat / u_hat - q * v;
                let a3 = dt_a2 + v * a2;
                (a3 * u_hat - w3_hat).modulus() / scale
            }
            _ => unreachable!(),
        };
        if identity_residual > max_identity {
            max_identity = identity_residual;
        }
        modes.push(ModeCheck {
            mode: signed,
            amplitude,
            skipped: false,
            symbol_error,
            dt_coefficient_residual,
            identity_residual,
        });
    }
    Ok(SubstitutionReport {
        time: t,
        modes,
        max_identity_residual: max_identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Grid = PeriodicGrid<f64>;

    fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> CVector<f64> {
        CVector::from_vec(grid.points().iter().map(|&x| cx(f(x), 0.0)).collect())
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::standard(32).is_ok());
    }

    #[test]
    fn first_derivative_of_sine_is_cosine() {
        let grid = Grid::standard(32).unwrap();
        let d = fourier_diff_matrix(&grid, 1);
        let u = sample(&grid, f64::sin);
        let du = d.apply(&u).unwrap();
        let expected = sample(&grid, f64::cos);
        assert!((du - expected).norm() < 1e-11);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let grid = Grid::standard(16).unwrap();
        for p in 1..=4 {
            let d = fourier_diff_matrix(&grid, p);
            let u = sample(&grid, |_| 3.5);
            assert!(d.apply(&u).unwrap().norm() < 1e-10, "p = {p}");
        }
    }

    #[test]
    fn diff_matrices_compose() {
        for n in [16usize, 64, 128] {
            let grid = Grid::standard(n).unwrap();
            let d1 = fourier_diff_matrix(&grid, 1);
            let d2 = fourier_diff_matrix(&grid, 2);
            let gap = d1
                .try_mul(&d1)
                .unwrap()
                .try_sub(&d2)
                .unwrap()
                .norm_fro();
            assert!(gap < 1e-9, "N={n}: composition gap {gap}");
        }
    }

    #[test]
    fn spectral_exactness_on_resolvable_modes() {
        let grid = Grid::standard(128).unwrap();
        let d = fourier_diff_matrix(&grid, 1);
        for m in [1i32, 5, 20, 63] {
            let u = sample(&grid, |x| (m as f64 * x).sin());
            let du = d.apply(&u).unwrap();
            let expected = sample(&grid, |x| m as f64 * (m as f64 * x).cos());
            let err = (du - expected).norm() / (1.0 + m as f64);
            assert!(err < 1e-10, "mode {m}: error {err}");
        }
    }

    #[test]
    fn nonuniform_length_rescales_wavenumbers() {
        let grid = Grid::new(32, 4.0).unwrap();
        let d = fourier_diff_matrix(&grid, 1);
        let freq = std::f64::consts::PI / 2.0; // one full period over L=4
        let u = sample(&grid, |x| (freq * x).sin());
        let du = d.apply(&u).unwrap();
        let expected = sample(&grid, |x| freq * (freq * x).cos());
        assert!((du - expected).norm() < 1e-10);
    }

    #[test]
    fn wave_scenario_operator_reading_closes() {
        let sc = PDEScenario::from_expression(
            Grid::standard(32).unwrap(),
            1,
            2,
            "sin(x)",
            1.0,
            8,
        )
        .unwrap();
        let report = example_residuals(&sc).unwrap();
        for (i, (&op, &norm)) in report
            .operator_residuals
            .iter()
            .zip(&report.solution_norms)
            .enumerate()
        {
            assert!(op <= 1e-9 * norm.max(1.0), "step {i}: operator residual {op}");
        }
        // literal reading double-counts the second spatial derivative:
        // the residual equals |D^2 u| = |u| for the sine mode
        for (i, (&lit, &scale)) in report
            .literal_residuals
            .iter()
            .zip(&report.literal_scales)
            .enumerate()
        {
            assert!(
                (lit - scale).abs() <= 1e-6 * scale.max(1e-30),
                "step {i}: literal {lit} vs scale {scale}"
            );
        }
    }

    #[test]
    fn constant_initial_data_gives_zero_residuals() {
        let sc = PDEScenario::from_expression(
            Grid::standard(16).unwrap(),
            1,
            2,
            "1",
            1.0,
            4,
        )
        .unwrap();
        let report = example_residuals(&sc).unwrap();
        for (&op, &lit) in report
            .operator_residuals
            .iter()
            .zip(&report.literal_residuals)
        {
            assert!(op < 1e-10);
            assert!(lit < 1e-10);
        }
    }

    #[test]
    fn heat_scenario_decays_and_closes() {
        let sc = PDEScenario::from_expression(
            Grid::standard(32).unwrap(),
            2,
            2,
            "sin(x)",
            1.0,
            8,
        )
        .unwrap();
        let report = example_residuals(&sc).unwrap();
        let first = report.solution_norms[0];
        let last = *report.solution_norms.last().unwrap();
        assert!((last / first - (-1.0f64).exp()).abs() < 1e-9, "decay {last}/{first}");
        for (&op, &norm) in report.operator_residuals.iter().zip(&report.solution_norms) {
            assert!(op <= 1e-9 * norm.max(1.0));
        }
    }

    #[test]
    fn third_order_scenario_closes() {
        let sc = PDEScenario::from_expression(
            Grid::standard(32).unwrap(),
            1,
            3,
            "sin(x) + 0.5*cos(2*x)",
            1.0,
            6,
        )
        .unwrap();
        let report = example_residuals(&sc).unwrap();
        for (&op, &norm) in report.operator_residuals.iter().zip(&report.solution_norms) {
            assert!(op <= 1e-8 * norm.max(1.0), "operator residual {op}");
        }
    }

    #[test]
    fn growing_modes_trip_the_guard() {
        // D^4 has symbol +k^4: rapid growth overflows the propagator
        let sc = PDEScenario::from_expression(
            Grid::standard(16).unwrap(),
            4,
            2,
            "sin(4*x)",
            2.0,
            4,
        )
        .unwrap();
        assert!(matches!(
            example_residuals(&sc),
            Err(Error::IntegrationBlowup { .. })
        ));
    }

    #[test]
    fn substitution_identity_single_mode() {
        let sc = PDEScenario::from_expression(
            Grid::standard(32).unwrap(),
            1,
            2,
            "sin(x)",
            1.0,
            4,
        )
        .unwrap();
        let report = verify_operator_substitution(&sc, 0.5).unwrap();
        let active: Vec<_> = report.modes.iter().filter(|m| !m.skipped).collect();
        assert_eq!(active.len(), 2, "sine occupies modes +1 and -1");
        for mode in active {
            assert!(mode.symbol_error < 1e-10, "symbol error {}", mode.symbol_error);
            assert!(
                mode.dt_coefficient_residual < 1e-10,
                "ratio drift {}",
                mode.dt_coefficient_residual
            );
            assert!(
                mode.identity_residual < 1e-12,
                "identity residual {}",
                mode.identity_residual
            );
        }
    }

    #[test]
    fn substitution_identity_third_order_mode_two() {
        let sc = PDEScenario::from_expression(
            Grid::standard(32).unwrap(),
            1,
            3,
            "sin(2*x)",
            1.0,
            4,
        )
        .unwrap();
        let report = verify_operator_substitution(&sc, 0.7).unwrap();
        assert!(report.max_identity_residual < 1e-10);
        let active = report.modes.iter().filter(|m| !m.skipped).count();
        assert_eq!(active, 2);
    }

    #[test]
    fn zero_modes_are_skipped_not_failed() {
        let sc = PDEScenario::from_expression(
            Grid::standard(16).unwrap(),
            1,
            2,
            "sin(x)",
            1.0,
            2,
        )
        .unwrap();
        let report = verify_operator_substitution(&sc, 0.3).unwrap();
        let skipped = report.modes.iter().filter(|m| m.skipped).count();
        assert_eq!(skipped, 14);
    }

    #[test]
    fn scenario_validation() {
        let grid = Grid::standard(16).unwrap();
        let u0 = sample(&grid, f64::sin);
        assert!(PDEScenario::new(grid, 1, 4, u0.clone(), 1.0, 4).is_err());
        assert!(PDEScenario::new(grid, 0, 2, u0.clone(), 1.0, 4).is_err());
        assert!(PDEScenario::new(grid, 1, 2, u0.clone(), 0.0, 4).is_err());
        let short = CVector::from_vec(vec![cx(1.0, 0.0); 8]);
        assert!(matches!(
            PDEScenario::new(grid, 1, 2, short, 1.0, 4),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
