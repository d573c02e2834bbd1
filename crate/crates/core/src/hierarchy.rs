//! The higher-order generator hierarchy.
//!
//! From a first-order family `A_1(t)` the recurrence
//! `A_n = d/dt A_{n-1} + A_1 A_{n-1}` produces generators of n-th order
//! equations sharing the same solution `psi = U(t,s) u_s`. The same
//! operator factorizes as the ordered product of first-order pieces
//! `(d^{k-1} psi)^{-1} d^k psi`, each of which admits the two logarithmic
//! representations, and a time-independent `A_n` exponentiates through its
//! principal n-th root. Every construction here is paired with residual
//! checks that the one `psi` solves all orders.

use crate::error::{Error, Result};
use crate::evolution::{
    commuting_derivative_polynomial, EvolutionFamily, GeneratorFamily, Structure, TimeGrid,
};
use crate::funcalc::{principal_root, CalcConfig};
use crate::linalg::{operator_exp, CVector, Operator};
use crate::logrep::{recover_generator_alt, recover_generator_original, DerivativeMode};
use crate::numeric::central_weights;
use crate::scalar::{cxr, fl, rf, Cx, RealScalar};
use std::fmt;
use std::sync::Arc;

/// Which construction produced an operator family sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Recurrence,
    Factorization,
    LogProduct,
    AltLogProduct,
}

/// Order cap when finite differences back the derivative chain.
pub const FD_ORDER_CAP: usize = 5;

type FallibleOpFn<R> = Arc<dyn Fn(R) -> Result<Operator<R>> + Send + Sync>;

/// One time-parametrized member `A_k(t)` of a hierarchy.
pub enum TimeOpFamily<R: RealScalar> {
    /// `base^power`, time-independent.
    ConstantPower { base: Operator<R>, power: usize },
    /// `sum_j coeffs[j](t) base^{j+1}` for commuting families.
    BasePoly { base: Operator<R>, coeffs: Vec<crate::expr::Expr> },
    /// Recursively evaluated member of a general family.
    General { dim: usize, eval: FallibleOpFn<R> },
}

impl<R: RealScalar> Clone for TimeOpFamily<R> {
    fn clone(&self) -> Self {
        match self {
            TimeOpFamily::ConstantPower { base, power } => TimeOpFamily::ConstantPower {
                base: base.clone(),
                power: *power,
            },
            TimeOpFamily::BasePoly { base, coeffs } => TimeOpFamily::BasePoly {
                base: base.clone(),
                coeffs: coeffs.clone(),
            },
            TimeOpFamily::General { dim, eval } => TimeOpFamily::General {
                dim: *dim,
                eval: Arc::clone(eval),
            },
        }
    }
}

impl<R: RealScalar> fmt::Debug for TimeOpFamily<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeOpFamily::ConstantPower { power, .. } => write!(f, "ConstantPower({power})"),
            TimeOpFamily::BasePoly { coeffs, .. } => {
                write!(f, "BasePoly(degree {})", coeffs.len())
            }
            TimeOpFamily::General { .. } => write!(f, "General"),
        }
    }
}

impl<R: RealScalar> TimeOpFamily<R> {
    /// `A_k(t)` as a matrix.
    pub fn eval(&self, t: R) -> Result<Operator<R>> {
        match self {
            TimeOpFamily::ConstantPower { base, power } => Ok(base.power(*power)),
            TimeOpFamily::BasePoly { base, coeffs } => {
                let mut acc = Operator::zeros(base.dim());
                let mut pw = base.clone();
                for c in coeffs {
                    acc = acc.try_add(&pw.scale(cxr(fl(c.eval(t)))))?;
                    pw = pw.try_mul(base)?;
                }
                Ok(acc)
            }
            TimeOpFamily::General { eval, .. } => eval(t),
        }
    }

    /// `A_k(t) v`; the constant-power member applies the base repeatedly,
    /// which keeps the action accurate for large-norm bases.
    pub fn apply(&self, t: R, v: &CVector<R>) -> Result<CVector<R>> {
        match self {
            TimeOpFamily::ConstantPower { base, power } => {
                let mut w = v.clone();
                for _ in 0..*power {
                    w = base.apply(&w)?;
                }
                Ok(w)
            }
            other => other.eval(t)?.apply(v),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TimeOpFamily::ConstantPower { base, .. } => base.dim(),
            TimeOpFamily::BasePoly { base, .. } => base.dim(),
            TimeOpFamily::General { dim, .. } => *dim,
        }
    }
}

/// The sequence `A_1 .. A_n` produced by one of the constructions.
#[derive(Debug, Clone)]
pub struct OperatorFamilySeq<R: RealScalar> {
    pub provenance: Provenance,
    members: Vec<TimeOpFamily<R>>,
    dim: usize,
    horizon: R,
}

impl<R: RealScalar> OperatorFamilySeq<R> {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[TimeOpFamily<R>] {
        &self.members
    }

    pub fn member(&self, k: usize) -> &TimeOpFamily<R> {
        &self.members[k - 1]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> R {
        self.horizon
    }
}

/// `A_2(t) = d/dt A_1(t) + A_1(t)^2`, the operator Riccati form.
pub fn miura_second_order<R: RealScalar>(
    gen: &GeneratorFamily<R>,
    t: R,
) -> Result<Operator<R>> {
    let a1 = gen.eval(t)?;
    let da1 = gen.eval_dt(t)?;
    da1.try_add(&a1.try_mul(&a1)?)
}

/// Build `A_1 .. A_n` by the recurrence `A_k = d/dt A_{k-1} + A_1 A_{k-1}`.
///
/// Constant families collapse to exact powers, commuting families carry
/// symbolic coefficient polynomials in the base, and general families
/// chain finite differences (order-capped).
pub fn recurrence_build<R: RealScalar>(
    gen: &GeneratorFamily<R>,
    n: usize,
) -> Result<OperatorFamilySeq<R>> {
    if n < 1 {
        return Err(Error::InvalidInput("hierarchy order must be >= 1".into()));
    }
    let dim = gen.dim();
    let horizon = gen.horizon();
    let members = match gen.structure() {
        Structure::Constant(a) => (1..=n)
            .map(|k| TimeOpFamily::ConstantPower {
                base: a.clone(),
                power: k,
            })
            .collect(),
        Structure::Commuting { profile, base } => {
            let mut members = Vec::with_capacity(n);
            for k in 1..=n {
                members.push(TimeOpFamily::BasePoly {
                    base: base.clone(),
                    coeffs: commuting_derivative_polynomial(profile, k)?,
                });
            }
            members
        }
        Structure::General { .. } => {
            if n > FD_ORDER_CAP {
                return Err(Error::OrderCapExceeded {
                    n,
                    cap: FD_ORDER_CAP,
                });
            }
            let gen = Arc::new(gen.clone());
            let mut members: Vec<TimeOpFamily<R>> = Vec::with_capacity(n);
            let first = Arc::clone(&gen);
            members.push(TimeOpFamily::General {
                dim,
                eval: Arc::new(move |t| first.eval(t)),
            });
            for _ in 2..=n {
                let prev = members.last().unwrap().clone();
                let gen_k = Arc::clone(&gen);
                let h = rf::<R>(1e-2) * (R::one() + horizon);
                let eval = move |t: R| -> Result<Operator<R>> {
                    // d/dt A_{k-1} by a 4th-order central stencil
                    let (offsets, weights) = central_weights(1);
                    let p = rf::<R>(*offsets.last().unwrap() as f64);
                    if t - p * h < R::zero() || t + p * h > gen_k.horizon() {
                        return Err(Error::StencilOutOfRange {
                            lo: fl(t - p * h),
                            hi: fl(t + p * h),
                            s: 0.0,
                            horizon: fl(gen_k.horizon()),
                        });
                    }
                    let mut deriv = Operator::zeros(gen_k.dim());
                    for (&o, &w) in offsets.iter().zip(&weights) {
                        let tau = t + rf::<R>(o as f64) * h;
                        deriv = deriv.try_add(&prev.eval(tau)?.scale(cxr(w)))?;
                    }
                    let deriv = deriv.scale(Cx::new(R::one() / h, R::zero()));
                    let a1 = gen_k.eval(t)?;
                    deriv.try_add(&a1.try_mul(&prev.eval(t)?)?)
                };
                members.push(TimeOpFamily::General {
                    dim,
                    eval: Arc::new(eval),
                });
            }
            members
        }
    };
    Ok(OperatorFamilySeq {
        provenance: Provenance::Recurrence,
        members,
        dim,
        horizon,
    })
}

/// Residual report for the shared-solution property.
#[derive(Debug, Clone)]
pub struct HierarchyReport<R: RealScalar> {
    pub grid: Vec<R>,
    /// `residuals[k-1][i]`: relative residual of order `k` at grid point `i`.
    pub residuals: Vec<Vec<R>>,
    /// Maximum residual per order.
    pub max_residuals: Vec<R>,
    pub kappa: Option<Cx<R>>,
    /// Pairwise distances filled by representation comparisons.
    pub cross_distances: Vec<R>,
    /// Whether the declared structure satisfies the commutation
    /// hypothesis under which the constructions are asserted.
    pub commutation_met: bool,
}

/// Verify that `psi(t) = U(t, 0) seed` satisfies every order:
/// `|d^k psi - A_k psi| / |psi|` per order and grid point. Constant
/// structures use the analytic derivative chain; other structures
/// finite-difference `psi` so the check stays independent of the
/// recurrence that built `A_k` (grid points must then leave stencil
/// room inside `[0, T]`).
pub fn verify_nth_order<R: RealScalar>(
    seq: &OperatorFamilySeq<R>,
    ev: &EvolutionFamily<R>,
    grid: &TimeGrid<R>,
    seed: &CVector<R>,
) -> Result<HierarchyReport<R>> {
    if seq.dim() != ev.dim() {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: ev.dim(),
        });
    }
    let n = seq.order();
    if n > FD_ORDER_CAP && !matches!(ev.generator().structure(), Structure::Constant(_)) {
        return Err(Error::OrderCapExceeded {
            n,
            cap: FD_ORDER_CAP,
        });
    }
    let s0 = R::zero();
    let constant_base = match ev.generator().structure() {
        Structure::Constant(a) => Some(a.clone()),
        _ => None,
    };
    let mut residuals = vec![Vec::with_capacity(grid.points().len()); n];
    for &t in grid.points() {
        let psi = ev.propagate(t, s0)?.apply(seed)?;
        let norm_psi = psi.norm();
        if !(norm_psi > R::zero()) {
            return Err(Error::InvalidInput(
                "solution vanished on the grid; residuals are undefined".into(),
            ));
        }
        for k in 1..=n {
            let dpsi = match &constant_base {
                Some(a) => {
                    let mut w = psi.clone();
                    for _ in 0..k {
                        w = a.apply(&w)?;
                    }
                    w
                }
                None => fd_vector_derivative(ev, seed, t, s0, k)?,
            };
            let apsi = seq.member(k).apply(t, &psi)?;
            let resid = (dpsi - apsi).norm() / norm_psi;
            residuals[k - 1].push(resid);
        }
    }
    let max_residuals = residuals
        .iter()
        .map(|row| row.iter().fold(R::zero(), |a, &b| if b > a { b } else { a }))
        .collect();
    Ok(HierarchyReport {
        grid: grid.points().to_vec(),
        residuals,
        max_residuals,
        kappa: None,
        cross_distances: Vec::new(),
        commutation_met: ev.generator().commutation_hypothesis(),
    })
}

/// `d^k/dt^k [U(t,s0) seed]` by 4th-order central differences on the
/// propagated vector.
fn fd_vector_derivative<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    seed: &CVector<R>,
    t: R,
    s0: R,
    k: usize,
) -> Result<CVector<R>> {
    let h = rf::<R>(2e-3) * (R::one() + ev.horizon()) * rf::<R>(1.3).powi(k as i32 - 1);
    let (offsets, weights) = central_weights(k);
    let p = rf::<R>(*offsets.last().unwrap() as f64);
    if t - p * h < s0 || t + p * h > ev.horizon() {
        return Err(Error::StencilOutOfRange {
            lo: fl(t - p * h),
            hi: fl(t + p * h),
            s: fl(s0),
            horizon: fl(ev.horizon()),
        });
    }
    let mut acc = CVector::<R>::zeros(ev.dim());
    for (&o, &w) in offsets.iter().zip(&weights) {
        let tau = t + rf::<R>(o as f64) * h;
        let u = ev.propagate(tau, s0)?;
        acc += u.apply(seed)? * cxr::<R>(w);
    }
    let scale = R::one() / h.powi(k as i32);
    Ok(acc * Cx::new(scale, R::zero()))
}

/// `d^k/dt^k U(t,s)` with the constant fast path (any order) and the
/// evolution-module derivative elsewhere (order cap 4).
fn dt_u<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    k: usize,
) -> Result<Operator<R>> {
    if k == 0 {
        return ev.propagate(t, s);
    }
    if let Structure::Constant(a) = ev.generator().structure() {
        let u = ev.propagate(t, s)?;
        return a.power(k).try_mul(&u);
    }
    ev.dt_evolution(t, s, k)
}

/// Ordered product `Prod_{k=1..n} (d^{k-1} U)^{-1} (d^k U)` at `(t, s)`,
/// k = 1 leftmost. A singular derivative factor aborts with its index.
pub fn factorize_product<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    n: usize,
    t: R,
    s: R,
) -> Result<Operator<R>> {
    if n < 1 {
        return Err(Error::InvalidInput("factorization order must be >= 1".into()));
    }
    let mut product = Operator::identity(ev.dim());
    let mut prev = dt_u(ev, t, s, 0)?;
    for k in 1..=n {
        let cur = dt_u(ev, t, s, k)?;
        let inv_prev = prev.inverse_default().map_err(|e| match e {
            Error::SingularOperator { cond, .. } => Error::SingularDerivative { k, cond },
            other => other,
        })?;
        let factor = inv_prev.try_mul(&cur)?;
        product = product.try_mul(&factor)?;
        prev = cur;
    }
    Ok(product)
}

/// Evolution family of the k-th first-order piece: the generator is
/// `A_k(t) = [d^k U(t,s)] [d^{k-1} U(t,s)]^{-1}` and `U_k` is the family
/// it generates. For a constant structure this is the constant generator
/// evaluated at `t`; otherwise a derived general family integrated by ODE.
fn derived_factor_family<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    k: usize,
    t: R,
    s: R,
) -> Result<EvolutionFamily<R>> {
    let singularize = move |e: Error| match e {
        Error::SingularOperator { cond, .. } => Error::SingularDerivative { k, cond },
        other => other,
    };
    if matches!(ev.generator().structure(), Structure::Constant(_)) {
        let hi = dt_u(ev, t, s, k)?;
        let lo_inv = dt_u(ev, t, s, k - 1)?
            .inverse_default()
            .map_err(singularize)?;
        let a_k = hi.try_mul(&lo_inv)?;
        let gen = GeneratorFamily::constant(a_k, ev.horizon())?;
        return Ok(EvolutionFamily::new(gen));
    }
    let source = ev.clone();
    let eval = move |tau: R| -> Result<Operator<R>> {
        let hi = dt_u(&source, tau, s, k)?;
        let lo_inv = dt_u(&source, tau, s, k - 1)?
            .inverse_default()
            .map_err(singularize)?;
        hi.try_mul(&lo_inv)
    };
    let gen = GeneratorFamily::general_fallible(eval, ev.dim(), ev.horizon())?;
    Ok(EvolutionFamily::new(gen))
}

/// Product of logarithmic representations:
/// `Prod_{k=1..n} (kappa U_k(s,t) + I) d/dt Log(U_k(t,s) + kappa I)`.
pub fn log_product_representation<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    n: usize,
    t: R,
    s: R,
    kappa: Cx<R>,
    mode: DerivativeMode,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    if n < 1 {
        return Err(Error::InvalidInput("representation order must be >= 1".into()));
    }
    let mut product = Operator::identity(ev.dim());
    for k in 1..=n {
        let fam_k = derived_factor_family(ev, k, t, s)?;
        let factor = recover_generator_original(&fam_k, t, s, kappa, mode, cfg)?;
        product = product.try_mul(&factor)?;
    }
    Ok(product)
}

/// Alternative-generator form of the product:
/// `Prod_{k=1..n} (I - kappa e^{-alpha_k})^{-1} d/dt alpha_k` with
/// `alpha_k = Log(U_k + kappa I)`.
pub fn alt_log_product<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    n: usize,
    t: R,
    s: R,
    kappa: Cx<R>,
    mode: DerivativeMode,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    if n < 1 {
        return Err(Error::InvalidInput("representation order must be >= 1".into()));
    }
    let mut product = Operator::identity(ev.dim());
    for k in 1..=n {
        let fam_k = derived_factor_family(ev, k, t, s)?;
        let factor = recover_generator_alt(&fam_k, t, s, kappa, mode, cfg)?;
        product = product.try_mul(&factor)?;
    }
    Ok(product)
}

/// All four constructions of `A_n(t)` side by side.
#[derive(Debug, Clone)]
pub struct RepresentationComparison<R: RealScalar> {
    pub recurrence: Operator<R>,
    pub factorization: Operator<R>,
    pub log_product: Operator<R>,
    pub alt_log_product: Operator<R>,
    pub max_pairwise_distance: R,
}

/// Evaluate the recurrence, factorization and both log products at one
/// `(t, s)` and measure their pairwise distances.
pub fn compare_representations<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    n: usize,
    t: R,
    s: R,
    kappa: Cx<R>,
    mode: DerivativeMode,
    cfg: &CalcConfig<R>,
) -> Result<RepresentationComparison<R>> {
    let seq = recurrence_build(ev.generator(), n)?;
    let recurrence = seq.member(n).eval(t)?;
    let factorization = factorize_product(ev, n, t, s)?;
    let log_product = log_product_representation(ev, n, t, s, kappa, mode, cfg)?;
    let alt_product = alt_log_product(ev, n, t, s, kappa, mode, cfg)?;
    let all = [&recurrence, &factorization, &log_product, &alt_product];
    let mut max_gap = R::zero();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let gap = all[i].try_sub(all[j])?.norm_fro();
            if gap > max_gap {
                max_gap = gap;
            }
        }
    }
    Ok(RepresentationComparison {
        recurrence,
        factorization,
        log_product,
        alt_log_product: alt_product,
        max_pairwise_distance: max_gap,
    })
}

/// Fractional-power exponential: `U_n(t) = exp(t A_n^{1/n})`, the
/// generation-theorem form of the n-th order equation. The root's power
/// round trip is re-checked before exponentiation.
pub fn hille_yosida_gen<R: RealScalar>(
    a_n: &Operator<R>,
    n: u32,
    t: R,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    let root = principal_root(a_n, n, cfg)?;
    let resid = root.power(n as usize).try_sub(a_n)?.norm_fro();
    let bound = rf::<R>(1e-8) * (R::one() + a_n.norm_fro());
    if resid > bound {
        return Err(Error::QuadratureNonconvergence {
            nodes: cfg.max_nodes,
            delta: fl(resid),
        });
    }
    Ok(operator_exp(&root.scale(Cx::new(t, R::zero()))))
}
