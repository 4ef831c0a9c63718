//! Method-of-lines solvers for fractional-in-space evolution problems on an
//! interval, with backward Euler and classical RK4 in time.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grunwald::{
    grunwald_weights, second_order_scheme, third_order_scheme, Domain, FracOrder, GridFunction,
    Scheme,
};
use crate::oracles::{
    example1_reference, tadjeran_coefficient, tadjeran_exact, tadjeran_source, Example1Reference,
    PowerData,
};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Largest `tau * max row sum` accepted by the explicit RK4 stepper.
pub const RK4_STABILITY_LIMIT: f64 = 2.5;
const CORNER_TOL: f64 = 1e-12;
const MAX_RK4_STEPS: usize = 1 << 22;
/// Coarser of the two density grids behind the Example-1 reference.
pub const EXAMPLE1_FINE_N: usize = 8192;

/// Condition imposed at one end of the interval.
#[derive(Clone)]
pub enum Boundary {
    /// Node is an unknown; stencil entries beyond the grid see zero.
    Free,
    /// Node value `g(t)`, eliminated from the system.
    Dirichlet(ScalarFn),
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Free => write!(f, "Free"),
            Boundary::Dirichlet(_) => write!(f, "Dirichlet(..)"),
        }
    }
}

#[derive(Clone)]
pub enum InitialData {
    Function(ScalarFn),
    /// Pointwise samples, except that a singular power at the left end is
    /// replaced by its average over the first cell.
    Power(PowerData),
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Function(_) => write!(f, "Function(..)"),
            InitialData::Power(p) => write!(f, "Power({p:?})"),
        }
    }
}

/// `u_t = d(x) D^alpha u + s(x, t)` on `[a, b]` with the given end conditions.
#[derive(Clone)]
pub struct ProblemSpec {
    pub scheme: Scheme,
    pub interval: (f64, f64),
    pub coeff: ScalarFn,
    pub source: Option<SpaceTimeFn>,
    pub initial: InitialData,
    pub left: Boundary,
    pub right: Boundary,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("scheme", &self.scheme)
            .field("interval", &self.interval)
            .field("initial", &self.initial)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn alpha(&self) -> f64 {
        self.scheme.alpha()
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
        }
        for (bc, x) in [(&self.left, a), (&self.right, b)] {
            if let Boundary::Dirichlet(g) = bc {
                if let InitialData::Function(u0) = &self.initial {
                    let (gv, uv) = (g(0.0), u0(x));
                    if (gv - uv).abs() > CORNER_TOL * (1.0 + uv.abs()) {
                        return Err(Error::InvalidArgument(format!(
                            "boundary value {gv} disagrees with initial value {uv} at x = {x}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn nodes(&self, nx: usize) -> Vec<f64> {
        let (a, b) = self.interval;
        let h = (b - a) / nx as f64;
        (0..=nx)
            .map(|i| if i == nx { b } else { a + i as f64 * h })
            .collect()
    }

    /// Initial values on the `nx + 1` nodes.
    pub fn initial_samples(&self, nx: usize) -> Vec<f64> {
        let x = self.nodes(nx);
        let a = self.interval.0;
        match &self.initial {
            InitialData::Function(u0) => x.iter().map(|&xi| u0(xi)).collect(),
            InitialData::Power(p) => {
                let singular = p.terms.iter().any(|&(_, beta)| beta < 0.0);
                x.iter()
                    .enumerate()
                    .map(|(i, &xi)| {
                        if i == 0 && singular {
                            p.cell_average(0.0, x[1] - a)
                        } else {
                            p.eval(xi - a)
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Discrete operator on all `nx + 1` nodes of the interval: row `i` holds
/// `sign d(x_i) sum_j b_j (c_j h)^-alpha w_m` at column `i - c_j m + c_j p_j`.
#[derive(Debug, Clone)]
pub struct FracOperatorMatrix {
    pub matrix: DMatrix<f64>,
    pub h: f64,
    pub scheme: Scheme,
    pub coeff: Vec<f64>,
    pub sign: f64,
    pub x: Vec<f64>,
    /// Node indices that are unknowns; the rest carry Dirichlet data.
    pub free: Vec<usize>,
}

impl FracOperatorMatrix {
    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    /// Rows and columns of the unknowns.
    pub fn free_block(&self) -> DMatrix<f64> {
        self.matrix
            .select_rows(&self.free)
            .select_columns(&self.free)
    }

    fn boundary(&self) -> Vec<usize> {
        (0..self.nodes())
            .filter(|i| !self.free.contains(i))
            .collect()
    }

    /// `max_i sum_j |A_ij|` over the unknowns.
    pub fn max_row_sum(&self) -> f64 {
        let a = self.free_block();
        a.row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Builds the operator matrix for `p` on `nx` cells.
pub fn assemble_matrix(p: &ProblemSpec, nx: usize) -> Result<FracOperatorMatrix> {
    if nx < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 cells, got {nx}"
        )));
    }
    p.validate()?;
    let offsets: Vec<(usize, isize)> = p
        .scheme
        .terms()
        .iter()
        .map(|t| t.grid_offsets())
        .collect::<Result<_>>()?;
    let x = p.nodes(nx);
    let n = nx + 1;
    let h = (p.interval.1 - p.interval.0) / nx as f64;
    let alpha = p.alpha();
    let sign = p.scheme.order().sign();
    let max_off = offsets
        .iter()
        .map(|&(_, off)| off)
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let weights = grunwald_weights(alpha, n + max_off);

    let mut matrix = DMatrix::zeros(n, n);
    for (term, &(c, off)) in p.scheme.terms().iter().zip(&offsets) {
        let scale = term.weight * (c as f64 * h).powf(-alpha);
        for i in 0..n {
            let top = i as isize + off;
            if top < 0 {
                continue;
            }
            for m in 0..=(top as usize / c) {
                let j = top - (c * m) as isize;
                if (j as usize) < n {
                    matrix[(i, j as usize)] += scale * weights[m];
                }
            }
        }
    }
    let coeff: Vec<f64> = x.iter().map(|&xi| (p.coeff)(xi)).collect();
    for i in 0..n {
        let d = sign * coeff[i];
        matrix.row_mut(i).scale_mut(d);
    }
    let mut free: Vec<usize> = (0..n).collect();
    if matches!(p.right, Boundary::Dirichlet(_)) {
        free.pop();
    }
    if matches!(p.left, Boundary::Dirichlet(_)) {
        free.remove(0);
    }
    Ok(FracOperatorMatrix {
        matrix,
        h,
        scheme: p.scheme.clone(),
        coeff,
        sign,
        x,
        free,
    })
}

/// `u' = A u + r(t)` on the unknowns, with Dirichlet data folded into `r`.
struct SemiDiscrete {
    a: DMatrix<f64>,
    coupling: DMatrix<f64>,
    x_free: Vec<f64>,
    source: Option<SpaceTimeFn>,
    boundary_fns: Vec<ScalarFn>,
    free: Vec<usize>,
    boundary: Vec<usize>,
    n: usize,
}

impl SemiDiscrete {
    fn new(m: &FracOperatorMatrix, p: &ProblemSpec) -> Self {
        let boundary = m.boundary();
        let mut boundary_fns = Vec::new();
        for &b in &boundary {
            let bc = if b == 0 { &p.left } else { &p.right };
            if let Boundary::Dirichlet(g) = bc {
                boundary_fns.push(g.clone());
            }
        }
        Self {
            a: m.free_block(),
            coupling: m.matrix.select_rows(&m.free).select_columns(&boundary),
            x_free: m.free.iter().map(|&i| m.x[i]).collect(),
            source: p.source.clone(),
            boundary_fns,
            free: m.free.clone(),
            boundary,
            n: m.nodes(),
        }
    }

    fn forcing(&self, t: f64) -> DVector<f64> {
        let mut r = match &self.source {
            Some(s) => {
                DVector::from_iterator(self.x_free.len(), self.x_free.iter().map(|&x| s(x, t)))
            }
            None => DVector::zeros(self.x_free.len()),
        };
        if !self.boundary.is_empty() {
            let g = DVector::from_iterator(
                self.boundary_fns.len(),
                self.boundary_fns.iter().map(|g| g(t)),
            );
            r += &self.coupling * g;
        }
        r
    }

    fn full_state(&self, u: &DVector<f64>, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = u[k];
        }
        for (g, &i) in self.boundary_fns.iter().zip(&self.boundary) {
            out[i] = g(t);
        }
        out
    }

    fn rhs(&self, u: &DVector<f64>, t: f64) -> DVector<f64> {
        &self.a * u + self.forcing(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeMethod {
    BackwardEuler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeStepConfig {
    pub method: TimeMethod,
    pub tau: f64,
    pub n_steps: usize,
    /// Record every `stride`-th state; 0 keeps only the initial and final ones.
    pub stride: usize,
}

impl TimeStepConfig {
    pub fn new(method: TimeMethod, tau: f64, n_steps: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {tau}"
            )));
        }
        Ok(Self {
            method,
            tau,
            n_steps,
            stride: 0,
        })
    }

    /// `n_steps` equal steps to reach `t_end`.
    pub fn to_time(method: TimeMethod, t_end: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidArgument("need at least one step".into()));
        }
        Self::new(method, t_end / n_steps as f64, n_steps)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn t_end(&self) -> f64 {
        self.tau * self.n_steps as f64
    }
}

/// States on all nodes at the recorded times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
}

impl Trajectory {
    pub fn final_state(&self) -> &GridFunction {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory always holds the initial time")
    }
}

struct Recorder<'a> {
    sys: &'a SemiDiscrete,
    m: &'a FracOperatorMatrix,
    domain: Domain,
    stride: usize,
    traj: Trajectory,
}

impl<'a> Recorder<'a> {
    fn new(
        sys: &'a SemiDiscrete,
        m: &'a FracOperatorMatrix,
        p: &ProblemSpec,
        stride: usize,
    ) -> Self {
        let domain = Domain::Interval(p.interval.0, p.interval.1);
        Self {
            sys,
            m,
            domain,
            stride,
            traj: Trajectory {
                times: Vec::new(),
                states: Vec::new(),
            },
        }
    }

    fn push(&mut self, u: &DVector<f64>, t: f64) -> Result<()> {
        let g = GridFunction::new(self.sys.full_state(u, t), self.m.h, 0, self.domain)?;
        self.traj.times.push(t);
        self.traj.states.push(g);
        Ok(())
    }

    fn step(&mut self, k: usize, last: usize, u: &DVector<f64>, t: f64) -> Result<()> {
        if k == last || (self.stride > 0 && k % self.stride == 0) {
            self.push(u, t)?;
        }
        Ok(())
    }
}

fn check_finite(u: &DVector<f64>) -> Result<()> {
    if u.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("solution state".into()))
    }
}

/// Solves `(I - tau A) u_{n+1} = u_n + tau r(t_{n+1})` with one LU factorisation.
pub fn backward_euler_march(
    m: &FracOperatorMatrix,
    p: &ProblemSpec,
    cfg: &TimeStepConfig,
) -> Result<Trajectory> {
    if cfg.method != TimeMethod::BackwardEuler {
        return Err(Error::InvalidArgument(
            "configuration is not for backward Euler".into(),
        ));
    }
    let sys = SemiDiscrete::new(m, p);
    let k = sys.a.nrows();
    let lu = (DMatrix::identity(k, k) - &sys.a * cfg.tau).lu();
    if !lu.is_invertible() {
        return Err(Error::SingularFactorization);
    }
    let init = p.initial_samples(m.nodes() - 1);
    let mut u = DVector::from_iterator(k, sys.free.iter().map(|&i| init[i]));
    let mut rec = Recorder::new(&sys, m, p, cfg.stride);
    rec.push(&u, 0.0)?;
    for n in 1..=cfg.n_steps {
        let t = n as f64 * cfg.tau;
        let rhs = &u + sys.forcing(t) * cfg.tau;
        u = lu.solve(&rhs).ok_or(Error::SingularFactorization)?;
        check_finite(&u)?;
        rec.step(n, cfg.n_steps, &u, t)?;
    }
    Ok(rec.traj)
}

fn rk4_steps(
    sys: &SemiDiscrete,
    u0: DVector<f64>,
    tau: f64,
    n_steps: usize,
    mut each: impl FnMut(usize, &DVector<f64>, f64) -> Result<()>,
) -> Result<DVector<f64>> {
    let mut u = u0;
    for n in 1..=n_steps {
        let t = (n - 1) as f64 * tau;
        let k1 = sys.rhs(&u, t);
        let k2 = sys.rhs(&(&u + &k1 * (0.5 * tau)), t + 0.5 * tau);
        let k3 = sys.rhs(&(&u + &k2 * (0.5 * tau)), t + 0.5 * tau);
        let k4 = sys.rhs(&(&u + &k3 * tau), t + tau);
        u += (k1 + (k2 + k3) * 2.0 + k4) * (tau / 6.0);
        check_finite(&u)?;
        each(n, &u, n as f64 * tau)?;
    }
    Ok(u)
}

fn rk4_guard(m: &FracOperatorMatrix, tau: f64) -> Result<()> {
    let v = tau * m.max_row_sum();
    if v > RK4_STABILITY_LIMIT {
        return Err(Error::StabilityViolation(v));
    }
    Ok(())
}

/// Classical fixed-step RK4 on `u' = A u + r(t)`.
pub fn rk4_march(
    m: &FracOperatorMatrix,
    p: &ProblemSpec,
    cfg: &TimeStepConfig,
) -> Result<Trajectory> {
    if cfg.method != TimeMethod::Rk4 {
        return Err(Error::InvalidArgument(
            "configuration is not for RK4".into(),
        ));
    }
    rk4_guard(m, cfg.tau)?;
    let sys = SemiDiscrete::new(m, p);
    let init = p.initial_samples(m.nodes() - 1);
    let u0 = DVector::from_iterator(sys.free.len(), sys.free.iter().map(|&i| init[i]));
    let mut rec = Recorder::new(&sys, m, p, cfg.stride);
    rec.push(&u0, 0.0)?;
    rk4_steps(&sys, u0, cfg.tau, cfg.n_steps, |n, u, t| {
        rec.step(n, cfg.n_steps, u, t)
    })?;
    Ok(rec.traj)
}

/// Dispatches on `cfg.method`.
pub fn march(m: &FracOperatorMatrix, p: &ProblemSpec, cfg: &TimeStepConfig) -> Result<Trajectory> {
    match cfg.method {
        TimeMethod::BackwardEuler => backward_euler_march(m, p, cfg),
        TimeMethod::Rk4 => rk4_march(m, p, cfg),
    }
}

/// Final state of an RK4 run whose step was halved until the result stopped
/// changing by more than `tol` in the max norm.
#[derive(Debug, Clone)]
pub struct ConvergedRun {
    pub state: GridFunction,
    pub tau: f64,
    pub n_steps: usize,
    pub last_change: f64,
}

pub fn rk4_converged(
    m: &FracOperatorMatrix,
    p: &ProblemSpec,
    t_end: f64,
    tol: f64,
) -> Result<ConvergedRun> {
    if !(t_end > 0.0 && tol > 0.0) {
        return Err(Error::InvalidArgument("need t_end > 0 and tol > 0".into()));
    }
    let sys = SemiDiscrete::new(m, p);
    let init = p.initial_samples(m.nodes() - 1);
    let u0 = DVector::from_iterator(sys.free.len(), sys.free.iter().map(|&i| init[i]));
    let mut n_steps = ((t_end * m.max_row_sum() / 2.0).ceil() as usize).max(4);
    let mut prev = rk4_steps(
        &sys,
        u0.clone(),
        t_end / n_steps as f64,
        n_steps,
        |_, _, _| Ok(()),
    )?;
    loop {
        n_steps *= 2;
        if n_steps > MAX_RK4_STEPS {
            return Err(Error::NonConvergent {
                n: n_steps / 2,
                change: f64::NAN,
            });
        }
        let tau = t_end / n_steps as f64;
        let u = rk4_steps(&sys, u0.clone(), tau, n_steps, |_, _, _| Ok(()))?;
        let change = (&u - &prev).amax();
        if change < tol {
            let state = GridFunction::new(
                sys.full_state(&u, t_end),
                m.h,
                0,
                Domain::Interval(p.interval.0, p.interval.1),
            )?;
            return Ok(ConvergedRun {
                state,
                tau,
                n_steps,
                last_change: change,
            });
        }
        prev = u;
    }
}

/// How a solver reaches its final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeControl {
    Fixed(TimeStepConfig),
    /// RK4 with the step halved until successive results agree to `tol`.
    Converged {
        tol: f64,
    },
}

impl Default for TimeControl {
    fn default() -> Self {
        TimeControl::Converged { tol: 1e-10 }
    }
}

fn final_state(
    m: &FracOperatorMatrix,
    p: &ProblemSpec,
    t_end: f64,
    control: &TimeControl,
) -> Result<GridFunction> {
    match control {
        TimeControl::Fixed(cfg) => {
            if (cfg.t_end() - t_end).abs() > 1e-12 * t_end {
                return Err(Error::InvalidArgument(format!(
                    "steps reach t = {}, expected {t_end}",
                    cfg.t_end()
                )));
            }
            Ok(march(m, p, cfg)?.final_state().clone())
        }
        TimeControl::Converged { tol } => Ok(rk4_converged(m, p, t_end, *tol)?.state),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TadjeranScheme {
    Order2,
    Order3,
}

/// `u_t = Gamma(2.2)/6 x^2.8 D^1.8 u - (1 + x) e^-t x^3` on `[0, 1]` with
/// `u(0, t) = 0` and `u(1, t) = e^-t`.
pub fn tadjeran_problem(kind: TadjeranScheme) -> Result<ProblemSpec> {
    let order = FracOrder::new(1.8)?;
    let scheme = match kind {
        TadjeranScheme::Order2 => second_order_scheme(order)?,
        TadjeranScheme::Order3 => third_order_scheme(order)?,
    };
    Ok(ProblemSpec {
        scheme,
        interval: (0.0, 1.0),
        coeff: Arc::new(tadjeran_coefficient),
        source: Some(Arc::new(tadjeran_source)),
        initial: InitialData::Function(Arc::new(|x| tadjeran_exact(x, 0.0))),
        left: Boundary::Dirichlet(Arc::new(|_| 0.0)),
        right: Boundary::Dirichlet(Arc::new(|t| (-t).exp())),
    })
}

#[derive(Debug, Clone)]
pub struct TadjeranResult {
    pub nx: usize,
    pub max_error: f64,
    pub solution: GridFunction,
}

/// Solves the Tadjeran problem to `t = 1`; the error is the max over nodes.
pub fn solve_tadjeran(
    kind: TadjeranScheme,
    nx: usize,
    control: &TimeControl,
) -> Result<TadjeranResult> {
    let p = tadjeran_problem(kind)?;
    let m = assemble_matrix(&p, nx)?;
    let solution = final_state(&m, &p, 1.0, control)?;
    let max_error = (0..solution.len())
        .map(|i| (solution.samples()[i] - tadjeran_exact(m.x[i], 1.0)).abs())
        .fold(0.0, f64::max);
    Ok(TadjeranResult {
        nx,
        max_error,
        solution,
    })
}

/// Example-1 initial data `x^-0.3`, `x^0.7` and `x^1.7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Example1Data {
    F1,
    F2,
    F3,
}

impl Example1Data {
    pub fn exponent(self) -> f64 {
        match self {
            Example1Data::F1 => -0.3,
            Example1Data::F2 => 0.7,
            Example1Data::F3 => 1.7,
        }
    }

    pub fn data(self) -> PowerData {
        PowerData::power(self.exponent())
    }
}

pub const EXAMPLE1_ALPHA: f64 = 0.8;

/// Source-free evolution with `alpha = 0.8` on `[0, 1]`, zero extension on the
/// left and every node free. Scheme order 1 is the optimal shift, order 2 the
/// two-term combination.
pub fn example1_problem(f: Example1Data, scheme_order: usize) -> Result<ProblemSpec> {
    let order = FracOrder::new(EXAMPLE1_ALPHA)?;
    let scheme = match scheme_order {
        1 => Scheme::first_order(order),
        2 => second_order_scheme(order)?,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "scheme order must be 1 or 2, got {scheme_order}"
            )))
        }
    };
    Ok(ProblemSpec {
        scheme,
        interval: (0.0, 1.0),
        coeff: Arc::new(|_| 1.0),
        source: None,
        initial: InitialData::Power(f.data()),
        left: Boundary::Free,
        right: Boundary::Free,
    })
}

#[derive(Debug, Clone)]
pub struct Example1Result {
    pub nx: usize,
    pub l1_error: f64,
    pub solution: GridFunction,
    pub reference: Vec<f64>,
    pub reference_self_error: f64,
}

/// Solves Example 1 to `t = 1`; the error is `h sum_i |u_i - u(x_i, 1)|`.
pub fn solve_example1(
    f: Example1Data,
    scheme_order: usize,
    nx: usize,
    control: &TimeControl,
) -> Result<Example1Result> {
    let x: Vec<f64> = (0..=nx).map(|i| i as f64 / nx as f64).collect();
    let reference = example1_reference(&f.data(), EXAMPLE1_ALPHA, 1.0, &x, EXAMPLE1_FINE_N)?;
    solve_example1_against(f, scheme_order, nx, control, &reference)
}

/// As [`solve_example1`], reading the exact values from `reference`, whose
/// nodes must be `i / N` with `nx` dividing `N`.
pub fn solve_example1_against(
    f: Example1Data,
    scheme_order: usize,
    nx: usize,
    control: &TimeControl,
    reference: &Example1Reference,
) -> Result<Example1Result> {
    let big_n = reference.x.len().saturating_sub(1);
    if big_n == 0 || big_n % nx != 0 || reference.alpha != EXAMPLE1_ALPHA || reference.t != 1.0 {
        return Err(Error::InvalidArgument(format!(
            "reference on {big_n} cells does not cover a grid of {nx} cells at t = 1"
        )));
    }
    let p = example1_problem(f, scheme_order)?;
    let m = assemble_matrix(&p, nx)?;
    let solution = final_state(&m, &p, 1.0, control)?;
    let stride = big_n / nx;
    let exact: Vec<f64> = (0..=nx).map(|i| reference.values[i * stride]).collect();
    let l1_error = solution
        .samples()
        .iter()
        .zip(&exact)
        .map(|(u, e)| (u - e).abs())
        .sum::<f64>()
        * m.h;
    Ok(Example1Result {
        nx,
        l1_error,
        solution,
        reference: exact,
        reference_self_error: reference.self_error,
    })
}
