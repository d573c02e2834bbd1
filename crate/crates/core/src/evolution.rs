//! Two-parameter evolution families `U(t,s)` built from a generator
//! family `t -> A_1(t)`, with time derivatives, the semigroup composition
//! check, growth-bound fitting and the half-plane resolvent estimate.
//!
//! Construction is three-tier by declared structure: a constant generator
//! uses the matrix exponential directly, a commuting family `f(t) B`
//! exponentiates the profile integral, and a general family is integrated
//! as a matrix ODE. Only validated numerics back the non-constant tiers.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{operator_exp, spectrum, Operator};
use crate::numeric::{central_weights, integrate_adaptive};
use crate::scalar::{cxr, fl, rf, Cx, RealScalar};
use nalgebra::ComplexField;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

/// Strictly increasing sample times within a horizon.
#[derive(Debug, Clone)]
pub struct TimeGrid<R: RealScalar> {
    points: Vec<R>,
}

impl<R: RealScalar> TimeGrid<R> {
    pub fn new(points: Vec<R>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("a time grid needs at least 2 points".into()));
        }
        for w in points.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidInput(
                    "time grid points must be strictly increasing".into(),
                ));
            }
        }
        if points[0] < R::zero() {
            return Err(Error::InvalidInput("time grid starts before 0".into()));
        }
        Ok(Self { points })
    }

    pub fn uniform(a: R, b: R, count: usize) -> Result<Self> {
        if count < 2 || !(a < b) {
            return Err(Error::InvalidInput(
                "uniform grid needs count >= 2 and a < b".into(),
            ));
        }
        let step = (b - a) / rf::<R>((count - 1) as f64);
        let points = (0..count)
            .map(|i| {
                if i == count - 1 {
                    b
                } else {
                    a + step * rf::<R>(i as f64)
                }
            })
            .collect();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[R] {
        &self.points
    }

    pub fn first(&self) -> R {
        self.points[0]
    }

    pub fn last(&self) -> R {
        *self.points.last().unwrap()
    }
}

type OpFn<R> = Arc<dyn Fn(R) -> Result<Operator<R>> + Send + Sync>;

/// Declared structure of the generator family.
pub enum Structure<R: RealScalar> {
    /// Time-independent `A`.
    Constant(Operator<R>),
    /// `A(t) = f(t) B`; members commute pairwise by construction and the
    /// profile differentiates symbolically.
    Commuting { profile: Expr, base: Operator<R> },
    /// Arbitrary `t -> A(t)`, optionally with an analytic derivative.
    General {
        eval: OpFn<R>,
        derivative: Option<OpFn<R>>,
    },
}

impl<R: RealScalar> Clone for Structure<R> {
    fn clone(&self) -> Self {
        match self {
            Structure::Constant(a) => Structure::Constant(a.clone()),
            Structure::Commuting { profile, base } => Structure::Commuting {
                profile: profile.clone(),
                base: base.clone(),
            },
            Structure::General { eval, derivative } => Structure::General {
                eval: Arc::clone(eval),
                derivative: derivative.as_ref().map(Arc::clone),
            },
        }
    }
}

impl<R: RealScalar> fmt::Debug for Structure<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Constant(_) => write!(f, "Constant"),
            Structure::Commuting { profile, .. } => write!(f, "Commuting({profile})"),
            Structure::General { .. } => write!(f, "General"),
        }
    }
}

/// Time-parametrized first-order generator family on `[0, T]`.
#[derive(Debug, Clone)]
pub struct GeneratorFamily<R: RealScalar> {
    dim: usize,
    horizon: R,
    structure: Structure<R>,
    /// symbolic profile derivative, precomputed for commuting families
    profile_dt: Option<Expr>,
}

impl<R: RealScalar> GeneratorFamily<R> {
    pub fn constant(a: Operator<R>, horizon: R) -> Result<Self> {
        Self::check_horizon(horizon)?;
        Ok(Self {
            dim: a.dim(),
            horizon,
            structure: Structure::Constant(a),
            profile_dt: None,
        })
    }

    pub fn commuting(profile: Expr, base: Operator<R>, horizon: R) -> Result<Self> {
        Self::check_horizon(horizon)?;
        let profile_dt = profile.derivative()?;
        Ok(Self {
            dim: base.dim(),
            horizon,
            structure: Structure::Commuting { profile, base },
            profile_dt: Some(profile_dt),
        })
    }

    pub fn general(
        eval: impl Fn(R) -> Operator<R> + Send + Sync + 'static,
        dim: usize,
        horizon: R,
    ) -> Result<Self> {
        Self::general_fallible(move |t| Ok(eval(t)), dim, horizon)
    }

    /// General family whose evaluation itself can fail (derived families
    /// built from inverses of other operators).
    pub fn general_fallible(
        eval: impl Fn(R) -> Result<Operator<R>> + Send + Sync + 'static,
        dim: usize,
        horizon: R,
    ) -> Result<Self> {
        Self::check_horizon(horizon)?;
        Ok(Self {
            dim,
            horizon,
            structure: Structure::General {
                eval: Arc::new(eval),
                derivative: None,
            },
            profile_dt: None,
        })
    }

    pub fn general_with_derivative(
        eval: impl Fn(R) -> Operator<R> + Send + Sync + 'static,
        derivative: impl Fn(R) -> Operator<R> + Send + Sync + 'static,
        dim: usize,
        horizon: R,
    ) -> Result<Self> {
        Self::check_horizon(horizon)?;
        Ok(Self {
            dim,
            horizon,
            structure: Structure::General {
                eval: Arc::new(move |t| Ok(eval(t))),
                derivative: Some(Arc::new(move |t| Ok(derivative(t)))),
            },
            profile_dt: None,
        })
    }

    fn check_horizon(horizon: R) -> Result<()> {
        if !(horizon > R::zero()) {
            return Err(Error::InvalidInput("horizon must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> R {
        self.horizon
    }

    pub fn structure(&self) -> &Structure<R> {
        &self.structure
    }

    /// Whether the declared structure makes family members commute.
    pub fn commutation_hypothesis(&self) -> bool {
        matches!(
            self.structure,
            Structure::Constant(_) | Structure::Commuting { .. }
        )
    }

    fn check_time(&self, t: R) -> Result<()> {
        if t < R::zero() || t > self.horizon {
            return Err(Error::HorizonViolation {
                t: fl(t),
                s: fl(t),
                horizon: fl(self.horizon),
            });
        }
        Ok(())
    }

    /// `A_1(t)`.
    pub fn eval(&self, t: R) -> Result<Operator<R>> {
        self.check_time(t)?;
        match &self.structure {
            Structure::Constant(a) => Ok(a.clone()),
            Structure::Commuting { profile, base } => {
                Ok(base.scale(cxr(fl(profile.eval(t)))))
            }
            Structure::General { eval, .. } => {
                let a = eval(t)?;
                if a.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        left: self.dim,
                        right: a.dim(),
                    });
                }
                Ok(a)
            }
        }
    }

    /// `d/dt A_1(t)`: zero for constant, symbolic for commuting, supplied
    /// or finite-differenced for general families.
    pub fn eval_dt(&self, t: R) -> Result<Operator<R>> {
        self.check_time(t)?;
        match &self.structure {
            Structure::Constant(_) => Ok(Operator::zeros(self.dim)),
            Structure::Commuting { base, .. } => {
                let df = self.profile_dt.as_ref().expect("prepared in constructor");
                Ok(base.scale(cxr(fl(df.eval(t)))))
            }
            Structure::General { eval, derivative } => {
                if let Some(d) = derivative {
                    return d(t);
                }
                // 4th-order central stencil on the generator itself
                let h = rf::<R>(1e-4) * (R::one() + self.horizon);
                let (offsets, weights) = central_weights(1);
                let p = rf::<R>(*offsets.last().unwrap() as f64);
                let lo = t - p * h;
                let hi = t + p * h;
                if lo < R::zero() || hi > self.horizon {
                    return Err(Error::StencilOutOfRange {
                        lo: fl(lo),
                        hi: fl(hi),
                        s: 0.0,
                        horizon: fl(self.horizon),
                    });
                }
                let mut acc = Operator::zeros(self.dim);
                for (&o, &w) in offsets.iter().zip(&weights) {
                    let tau = t + rf::<R>(o as f64) * h;
                    acc = acc.try_add(&eval(tau)?.scale(cxr(w)))?;
                }
                Ok(acc.scale(Cx::new(R::one() / h, R::zero())))
            }
        }
    }
}

/// Evolution family construction method; chosen from the declared
/// structure by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method<R: RealScalar> {
    MatrixExp,
    ExpOfIntegral,
    OdeIntegrate { step: R },
}

/// Numerical knobs for propagation and differentiation.
#[derive(Debug, Clone, Copy)]
pub struct EvConfig<R: RealScalar> {
    /// ODE step for general families.
    pub ode_step: R,
    /// Profile-integral tolerance for commuting families.
    pub integral_tol: R,
    /// Finite-difference base step as a fraction of the horizon.
    pub fd_step_factor: R,
    /// Relative step-halving disagreement allowed in FD derivatives.
    pub fd_tol: R,
    /// Norm overflow guard for integration.
    pub blowup_guard: R,
}

impl<R: RealScalar> Default for EvConfig<R> {
    fn default() -> Self {
        Self {
            ode_step: rf(1e-3),
            integral_tol: rf(1e-12),
            fd_step_factor: rf(5e-3),
            fd_tol: rf(1e-5),
            blowup_guard: rf(1e8),
        }
    }
}

impl<R: RealScalar> EvConfig<R> {
    /// FD step for an `m`-th derivative: the base step widened with the
    /// order to balance truncation against roundoff amplification.
    pub fn fd_step(&self, m: usize, horizon: R) -> R {
        let widen = rf::<R>(1.4).powi(m as i32 - 1);
        self.fd_step_factor * horizon * widen
    }
}

/// Cache key wrapper: times are finite by construction, so the partial
/// order is total here.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TimeKey<R: RealScalar>(R, R);

impl<R: RealScalar> Eq for TimeKey<R> {}

impl<R: RealScalar> PartialOrd for TimeKey<R> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<R: RealScalar> Ord for TimeKey<R> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap()
            .then(self.1.partial_cmp(&other.1).unwrap())
    }
}

/// Two-parameter evolution family `(t, s) -> U(t,s)` with a read-through
/// cache and optional fitted growth metadata `(M, omega)`.
#[derive(Debug)]
pub struct EvolutionFamily<R: RealScalar> {
    generator: GeneratorFamily<R>,
    method: Method<R>,
    config: EvConfig<R>,
    cache: RwLock<BTreeMap<TimeKey<R>, Operator<R>>>,
    growth: RwLock<Option<(R, R)>>,
}

impl<R: RealScalar> Clone for EvolutionFamily<R> {
    fn clone(&self) -> Self {
        Self {
            generator: self.generator.clone(),
            method: self.method,
            config: self.config,
            cache: RwLock::new(self.cache.read().unwrap().clone()),
            growth: RwLock::new(*self.growth.read().unwrap()),
        }
    }
}

impl<R: RealScalar> EvolutionFamily<R> {
    /// Construction method keyed to the declared structure.
    pub fn new(generator: GeneratorFamily<R>) -> Self {
        let method = match generator.structure() {
            Structure::Constant(_) => Method::MatrixExp,
            Structure::Commuting { .. } => Method::ExpOfIntegral,
            Structure::General { .. } => Method::OdeIntegrate {
                step: EvConfig::<R>::default().ode_step,
            },
        };
        Self {
            generator,
            method,
            config: EvConfig::default(),
            cache: RwLock::new(BTreeMap::new()),
            growth: RwLock::new(None),
        }
    }

    /// Override the construction method; the method must be defined for
    /// the declared structure.
    pub fn with_method(generator: GeneratorFamily<R>, method: Method<R>) -> Result<Self> {
        let compatible = match (&method, generator.structure()) {
            (Method::MatrixExp, Structure::Constant(_)) => true,
            (Method::ExpOfIntegral, Structure::Constant(_) | Structure::Commuting { .. }) => true,
            (Method::OdeIntegrate { .. }, _) => true,
            _ => false,
        };
        if !compatible {
            return Err(Error::InvalidInput(format!(
                "method {method:?} is undefined for structure {:?}",
                generator.structure()
            )));
        }
        Ok(Self {
            generator,
            method,
            config: EvConfig::default(),
            cache: RwLock::new(BTreeMap::new()),
            growth: RwLock::new(None),
        })
    }

    pub fn with_config(mut self, config: EvConfig<R>) -> Self {
        self.config = config;
        self
    }

    pub fn generator(&self) -> &GeneratorFamily<R> {
        &self.generator
    }

    pub fn config(&self) -> &EvConfig<R> {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn horizon(&self) -> R {
        self.generator.horizon()
    }

    /// Fitted `(M, omega)` if `fit_growth_bound` ran.
    pub fn growth(&self) -> Option<(R, R)> {
        *self.growth.read().unwrap()
    }

    fn check_pair(&self, t: R, s: R) -> Result<()> {
        if s < R::zero() || t < s || t > self.horizon() {
            return Err(Error::HorizonViolation {
                t: fl(t),
                s: fl(s),
                horizon: fl(self.horizon()),
            });
        }
        Ok(())
    }

    /// `U(t,s)` for `0 <= s <= t <= T`; `U(s,s)` is the identity without
    /// computation.
    pub fn propagate(&self, t: R, s: R) -> Result<Operator<R>> {
        self.check_pair(t, s)?;
        if t == s {
            return Ok(Operator::identity(self.dim()));
        }
        let key = TimeKey(t, s);
        if let Some(hit) = self.cache.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = match self.method {
            Method::MatrixExp => {
                let a = match self.generator.structure() {
                    Structure::Constant(a) => a,
                    _ => unreachable!("validated at construction"),
                };
                operator_exp(&a.scale(Cx::new(t - s, R::zero())))
            }
            Method::ExpOfIntegral => match self.generator.structure() {
                Structure::Constant(a) => operator_exp(&a.scale(Cx::new(t - s, R::zero()))),
                Structure::Commuting { profile, base } => {
                    let g = integrate_adaptive(
                        |tau| cxr::<R>(fl(profile.eval(tau))),
                        s,
                        t,
                        self.config.integral_tol,
                    )?;
                    operator_exp(&base.scale(g))
                }
                _ => unreachable!("validated at construction"),
            },
            Method::OdeIntegrate { step } => self.rk4(t, s, step)?,
        };
        if !result.is_finite() {
            return Err(Error::IntegrationBlowup {
                norm: f64::INFINITY,
                guard: fl(self.config.blowup_guard),
                t: fl(t),
            });
        }
        self.cache.write().unwrap().insert(key, result.clone());
        Ok(result)
    }

    /// Classical 4th-order step for the matrix ODE `dU/dt = A(t) U`.
    fn rk4(&self, t: R, s: R, step: R) -> Result<Operator<R>> {
        let span = t - s;
        let steps = (fl(span) / fl(step)).ceil().max(1.0) as usize;
        let h = span / rf::<R>(steps as f64);
        let half = h * rf::<R>(0.5);
        let sixth = h / rf::<R>(6.0);
        let two = cxr::<R>(2.0);
        let mut u = Operator::identity(self.dim());
        for i in 0..steps {
            let tau = s + h * rf::<R>(i as f64);
            let a1 = self.generator.eval(tau.min(self.horizon()))?;
            let a2 = self.generator.eval((tau + half).min(self.horizon()))?;
            let a4 = self.generator.eval((tau + h).min(self.horizon()))?;
            let k1 = a1.try_mul(&u)?;
            let k2 = a2.try_mul(&u.try_add(&k1.scale(Cx::new(half, R::zero())))?)?;
            let k3 = a2.try_mul(&u.try_add(&k2.scale(Cx::new(half, R::zero())))?)?;
            let k4 = a4.try_mul(&u.try_add(&k3.scale(Cx::new(h, R::zero())))?)?;
            let incr = k1
                .try_add(&k2.scale(two))?
                .try_add(&k3.scale(two))?
                .try_add(&k4)?;
            u = u.try_add(&incr.scale(Cx::new(sixth, R::zero())))?;
            let norm = u.norm_fro();
            if norm > self.config.blowup_guard {
                return Err(Error::IntegrationBlowup {
                    norm: fl(norm),
                    guard: fl(self.config.blowup_guard),
                    t: fl(tau + h),
                });
            }
        }
        Ok(u)
    }

    /// `d^m/dt^m U(t,s)`, `1 <= m <= 4`: analytic for constant and
    /// commuting structures, 4th-order central differences with a
    /// step-halving cross-check for general ones.
    pub fn dt_evolution(&self, t: R, s: R, m: usize) -> Result<Operator<R>> {
        if m == 0 {
            return Err(Error::InvalidInput("derivative order must be >= 1".into()));
        }
        if m > 4 {
            return Err(Error::OrderCapExceeded { n: m, cap: 4 });
        }
        self.check_pair(t, s)?;
        match self.generator.structure() {
            Structure::Constant(a) => {
                let u = self.propagate(t, s)?;
                a.power(m).try_mul(&u)
            }
            Structure::Commuting { profile, base } => {
                let u = self.propagate(t, s)?;
                let poly = commuting_derivative_polynomial(profile, m)?;
                let mut acc = Operator::zeros(self.dim());
                let mut base_pow = base.clone();
                for coeff in &poly {
                    acc = acc.try_add(&base_pow.scale(cxr(fl(coeff.eval(t)))))?;
                    base_pow = base_pow.try_mul(base)?;
                }
                acc.try_mul(&u)
            }
            Structure::General { .. } => {
                let h = self.config.fd_step(m, self.horizon());
                let coarse = self.fd_derivative_of_u(t, s, m, h)?;
                let fine = self.fd_derivative_of_u(t, s, m, h * rf::<R>(0.5))?;
                let delta = coarse.try_sub(&fine)?.norm_fro() / (R::one() + fine.norm_fro());
                if delta > self.config.fd_tol {
                    return Err(Error::DerivativeNoise {
                        delta: fl(delta),
                        tol: fl(self.config.fd_tol),
                        order: m,
                    });
                }
                Ok(fine)
            }
        }
    }

    fn fd_derivative_of_u(&self, t: R, s: R, m: usize, h: R) -> Result<Operator<R>> {
        let (offsets, weights) = central_weights(m);
        let p = rf::<R>(*offsets.last().unwrap() as f64);
        let lo = t - p * h;
        let hi = t + p * h;
        if lo < s || hi > self.horizon() {
            return Err(Error::StencilOutOfRange {
                lo: fl(lo),
                hi: fl(hi),
                s: fl(s),
                horizon: fl(self.horizon()),
            });
        }
        let mut acc = Operator::zeros(self.dim());
        for (&o, &w) in offsets.iter().zip(&weights) {
            let tau = t + rf::<R>(o as f64) * h;
            let u = self.propagate(tau, s)?;
            acc = acc.try_add(&u.scale(cxr(w)))?;
        }
        let scale = R::one() / h.powi(m as i32);
        Ok(acc.scale(Cx::new(scale, R::zero())))
    }

    /// `|U(t,r) U(r,s) - U(t,s)|` for `s <= r <= t`.
    pub fn check_semigroup(&self, s: R, r: R, t: R) -> Result<R> {
        self.check_pair(r, s)?;
        self.check_pair(t, r)?;
        let left = self.propagate(t, r)?.try_mul(&self.propagate(r, s)?)?;
        let right = self.propagate(t, s)?;
        Ok(left.try_sub(&right)?.norm_fro())
    }

    /// Least-squares fit of `log |U(t,s)| <= log M + omega (t-s)` over all
    /// ordered grid pairs, intercept lifted so every sample is covered and
    /// `M >= 1`. The fit is stored as the family's growth metadata.
    pub fn fit_growth_bound(&self, grid: &TimeGrid<R>) -> Result<(R, R)> {
        if grid.first() < R::zero() || grid.last() > self.horizon() {
            return Err(Error::HorizonViolation {
                t: fl(grid.last()),
                s: fl(grid.first()),
                horizon: fl(self.horizon()),
            });
        }
        let pts = grid.points();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..pts.len() {
            for j in i..pts.len() {
                let (s, t) = (pts[i], pts[j]);
                let u = self.propagate(t, s)?;
                xs.push(t - s);
                ys.push(ComplexField::ln(u.norm_2()));
            }
        }
        let n = rf::<R>(xs.len() as f64);
        let mean_x = xs.iter().fold(R::zero(), |a, &b| a + b) / n;
        let mean_y = ys.iter().fold(R::zero(), |a, &b| a + b) / n;
        let mut sxx = R::zero();
        let mut sxy = R::zero();
        for (&x, &y) in xs.iter().zip(&ys) {
            sxx += (x - mean_x) * (x - mean_x);
            sxy += (x - mean_x) * (y - mean_y);
        }
        let omega = if sxx > R::zero() { sxy / sxx } else { R::zero() };
        // lift the intercept so the bound covers every sample
        let mut log_m = R::min_value().unwrap();
        for (&x, &y) in xs.iter().zip(&ys) {
            let b = y - omega * x;
            if b > log_m {
                log_m = b;
            }
        }
        if log_m < R::zero() {
            log_m = R::zero();
        }
        let m = ComplexField::exp(log_m);
        *self.growth.write().unwrap() = Some((m, omega));
        Ok((m, omega))
    }
}

/// Coefficient expressions `c_1..c_m` with
/// `d^m/dt^m exp(g(t) B) = (sum_j c_j(t) B^j) U` for `g' = f`:
/// `c` ladder from `P_k = P_{k-1}' + P_{k-1} f B`.
pub(crate) fn commuting_derivative_polynomial(profile: &Expr, m: usize) -> Result<Vec<Expr>> {
    let mut coeffs: Vec<Expr> = vec![profile.clone()];
    for _ in 1..m {
        let mut next: Vec<Expr> = Vec::with_capacity(coeffs.len() + 1);
        for (j, c) in coeffs.iter().enumerate() {
            let mut term = c.derivative()?;
            if j > 0 {
                term = Expr::Add(
                    Box::new(term),
                    Box::new(Expr::Mul(
                        Box::new(profile.clone()),
                        Box::new(coeffs[j - 1].clone()),
                    )),
                );
            }
            next.push(term);
        }
        next.push(Expr::Mul(
            Box::new(profile.clone()),
            Box::new(coeffs.last().unwrap().clone()),
        ));
        coeffs = next;
    }
    Ok(coeffs)
}

/// Per-sample outcome of the half-plane resolvent estimate.
#[derive(Debug, Clone)]
pub struct ResolventSample<R: RealScalar> {
    pub lambda: Cx<R>,
    pub resolvent_norm: R,
    /// `|(lambda I - (t-s) A)^{-1}| * Re(lambda)`; bounded by the fitted
    /// constant when the estimate applies.
    pub ratio: R,
}

/// Result of checking `|(lambda I - (t-s)A)^{-1}| <= C / Re(lambda)`.
#[derive(Debug, Clone)]
pub struct ResolventReport<R: RealScalar> {
    /// Whether `spectrum(A)` lies in the closed left half-plane, the
    /// hypothesis under which the bound is asserted.
    pub applicable: bool,
    pub fitted_c: R,
    pub samples: Vec<ResolventSample<R>>,
}

/// Half-plane resolvent estimate for a constant generator over `[s, t]`.
pub fn resolvent_estimate_check<R: RealScalar>(
    gen: &GeneratorFamily<R>,
    s: R,
    t: R,
    lambda_samples: &[Cx<R>],
) -> Result<ResolventReport<R>> {
    let a = match gen.structure() {
        Structure::Constant(a) => a,
        _ => {
            return Err(Error::InvalidInput(
                "resolvent estimate requires a constant generator".into(),
            ))
        }
    };
    if !(t > s) {
        return Err(Error::InvalidInput("need t > s".into()));
    }
    if lambda_samples.is_empty() {
        return Err(Error::InvalidInput("need at least one lambda sample".into()));
    }
    let span = t - s;
    let info = spectrum(a)?;
    let tol = rf::<R>(1e-12) * (R::one() + info.spectral_radius);
    let applicable = info.eigenvalues.iter().all(|ev| ev.re <= tol);

    let mut samples = Vec::with_capacity(lambda_samples.len());
    let mut fitted_c = R::zero();
    for &lambda in lambda_samples {
        if !(lambda.re > R::zero()) {
            return Err(Error::InvalidInput(
                "lambda samples must have positive real part".into(),
            ));
        }
        // lambda/(t-s) must stay off the spectrum of A
        let target = lambda / Cx::new(span, R::zero());
        let margin = rf::<R>(1e-8) * (R::one() + target.modulus());
        let mut dist = R::max_value().unwrap();
        for &ev in &info.eigenvalues {
            let d = (target - ev).modulus();
            if d < dist {
                dist = d;
            }
        }
        if dist < margin {
            return Err(Error::SpectralProximity {
                re: fl(target.re),
                im: fl(target.im),
                dist: fl(dist),
                margin: fl(margin),
            });
        }
        // |(lambda I - span A)^{-1}| = 1 / sigma_min(lambda I - span A)
        let shifted = a.scale(Cx::new(-span, R::zero())).shift(lambda);
        let sv = shifted.matrix().clone().svd(false, false).singular_values;
        let smin = sv.iter().fold(R::max_value().unwrap(), |acc, &v| acc.min(v));
        let norm = R::one() / smin;
        let ratio = norm * lambda.re;
        if ratio > fitted_c {
            fitted_c = ratio;
        }
        samples.push(ResolventSample {
            lambda,
            resolvent_norm: norm,
            ratio,
        });
    }
    Ok(ResolventReport {
        applicable,
        fitted_c,
        samples,
    })
}
