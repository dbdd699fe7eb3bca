//! Numeric kernels: fixed-step RK4, Brent root finding, adaptive
//! Gauss–Kronrod quadrature and grid-then-golden-section maximisation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite derivative at (x = {x}, y = {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("root finder hit the {0}-iteration cap")]
    MaxIterations(usize),
    #[error("curve needs at least two strictly increasing knots")]
    BadKnots,
}

/// Sampled function with piecewise-cubic interpolation.
///
/// When slopes are supplied (e.g. the ODE right-hand side at each knot)
/// the interpolant is cubic Hermite; otherwise Fritsch–Carlson monotone
/// slopes are used. Outside the knot range the end values are held.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Curve {
    pub fn with_slopes(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Result<Self, NumericsError> {
        if xs.len() < 2 || ys.len() != xs.len() || slopes.len() != xs.len() {
            return Err(NumericsError::BadKnots);
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericsError::BadKnots);
        }
        Ok(Self { xs, ys, slopes })
    }

    /// Monotone piecewise-cubic interpolant through the knots.
    pub fn monotone(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, NumericsError> {
        if xs.len() < 2 || ys.len() != xs.len() {
            return Err(NumericsError::BadKnots);
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            slopes[i] = if a * b <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                let (w0, w1) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                (w0 + w1) / (w0 / a + w1 / b)
            };
        }
        Self::with_slopes(xs, ys, slopes)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn segment(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.x_range();
        if x < lo || x > hi {
            return None;
        }
        let i = self.xs.partition_point(|&k| k <= x);
        Some(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else {
            return if x < self.xs[0] { self.ys[0] } else { self.ys[self.ys.len() - 1] };
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else {
            return 0.0;
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.ys[i] + d10 * self.slopes[i] + d01 * self.ys[i + 1] + d11 * self.slopes[i + 1]
    }
}

/// Classic fourth-order Runge–Kutta march from `(x0, y0)` to `x_end`.
///
/// The last step is shortened so the final knot lands on `x_end`. Knot
/// slopes are the right-hand side at each knot, so the returned curve is
/// a cubic Hermite interpolant of the march.
pub fn solve_ivp<F>(rhs: F, x0: f64, y0: f64, x_end: f64, step: f64) -> Result<Curve, NumericsError>
where
    F: Fn(f64, f64) -> f64,
{
    if !(step.is_finite() && step > 0.0) {
        return Err(NumericsError::BadStep(step));
    }
    let n_steps = ((x_end - x0) / step).ceil().max(1.0) as usize;
    let grid = (0..=n_steps).map(|i| if i == n_steps { x_end } else { x0 + i as f64 * step });
    march(rhs, grid, y0)
}

/// As [`solve_ivp`], but each step from `x` is at most `max_step(x)`.
/// Useful when the problem is stiff in part of the range.
pub fn solve_ivp_variable<F, S>(rhs: F, x0: f64, y0: f64, x_end: f64, max_step: S) -> Result<Curve, NumericsError>
where
    F: Fn(f64, f64) -> f64,
    S: Fn(f64) -> f64,
{
    let mut grid = vec![x0];
    let mut x = x0;
    while x < x_end {
        let h = max_step(x);
        if !(h.is_finite() && h > 0.0) {
            return Err(NumericsError::BadStep(h));
        }
        x = if x + h >= x_end { x_end } else { x + h };
        grid.push(x);
    }
    march(rhs, grid.into_iter(), y0)
}

fn march<F, I>(rhs: F, mut grid: I, y0: f64) -> Result<Curve, NumericsError>
where
    F: Fn(f64, f64) -> f64,
    I: Iterator<Item = f64>,
{
    let eval = |x: f64, y: f64| {
        let d = rhs(x, y);
        if d.is_finite() {
            Ok(d)
        } else {
            Err(NumericsError::NonFinite { x, y })
        }
    };
    let x0 = grid.next().ok_or(NumericsError::BadStep(0.0))?;
    let (mut x, mut y) = (x0, y0);
    let mut k1 = eval(x, y)?;
    let (mut xs, mut ys, mut slopes) = (vec![x], vec![y], vec![k1]);
    for x_next in grid {
        let h = x_next - x;
        if h <= 0.0 {
            continue;
        }
        let k2 = eval(x + 0.5 * h, y + 0.5 * h * k1)?;
        let k3 = eval(x + 0.5 * h, y + 0.5 * h * k2)?;
        let k4 = eval(x + h, y + h * k3)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x = x_next;
        k1 = eval(x, y)?;
        xs.push(x);
        ys.push(y);
        slopes.push(k1);
    }
    if xs.len() < 2 {
        return Err(NumericsError::BadStep(0.0));
    }
    Curve::with_slopes(xs, ys, slopes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, tol: 1e-13 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

pub const MAX_ROOT_ITERATIONS: usize = 200;

/// Brent's method: bisection safeguarded inverse quadratic / secant steps.
pub fn find_root<G>(mut g: G, bracket: RootBracket) -> Result<f64, NumericsError>
where
    G: FnMut(f64) -> f64,
{
    let RootBracket { lo, hi, tol } = bracket;
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(NumericsError::NoSignChange { lo, hi, g_lo: fa, g_hi: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ROOT_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b.clamp(lo.min(hi), lo.max(hi)));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = g(b);
    }
    Err(NumericsError::MaxIterations(MAX_ROOT_ITERATIONS))
}

/// Result of [`integrate`]. `converged` is false when the subdivision
/// budget ran out before the error estimate fell below the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<H: FnMut(f64) -> f64>(h: &mut H, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = h(centre);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for j in 0..7 {
        let dx = half * GK_NODES[j];
        let pair = h(centre - dx) + h(centre + dx);
        kronrod += KRONROD_WEIGHTS[j] * pair;
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_PANELS: usize = 2000;

/// Globally adaptive 15-point Gauss–Kronrod quadrature of `h` on `[lo, hi]`.
///
/// The rule never samples the interval endpoints, so integrable endpoint
/// singularities (e.g. `x^(-1/2)`) are handled by repeated bisection.
/// `tol` is an absolute error target.
pub fn integrate<H>(mut h: H, lo: f64, hi: f64, tol: f64) -> Quadrature
where
    H: FnMut(f64) -> f64,
{
    if !(hi > lo) {
        return Quadrature { value: 0.0, abs_error: 0.0, evaluations: 0, converged: true };
    }
    let mut evaluations = 15;
    let (value, error) = gauss_kronrod_15(&mut h, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a: lo, b: hi, value, error });
    let mut total_err = error;
    let mut splits = 0usize;
    while total_err > tol && heap.len() < MAX_PANELS {
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine precision
            total_err -= worst.error;
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gauss_kronrod_15(&mut h, worst.a, mid);
        let (v2, e2) = gauss_kronrod_15(&mut h, mid, worst.b);
        evaluations += 30;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        total_err += e1 + e2 - worst.error;
        splits += 1;
        if splits % 64 == 0 {
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    total_err = heap.iter().map(|p| p.error).sum();
    // sum in interval order so the result does not depend on heap layout
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    Quadrature { value, abs_error: total_err, evaluations, converged: total_err <= tol }
}

/// Integrate over `[lo, hi]` split at the given interior breakpoints.
pub fn integrate_piecewise<H>(mut h: H, lo: f64, hi: f64, breaks: &[f64], tol: f64) -> Quadrature
where
    H: FnMut(f64) -> f64,
{
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut edges = Vec::with_capacity(points.len() + 2);
    edges.push(lo);
    edges.extend(points);
    edges.push(hi);
    let pieces = (edges.len() - 1) as f64;
    edges.windows(2).fold(
        Quadrature { value: 0.0, abs_error: 0.0, evaluations: 0, converged: true },
        |acc, w| {
            let q = integrate(&mut h, w[0], w[1], tol / pieces);
            Quadrature {
                value: acc.value + q.value,
                abs_error: acc.abs_error + q.abs_error,
                evaluations: acc.evaluations + q.evaluations,
                converged: acc.converged && q.converged,
            }
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximum {
    pub argmax: f64,
    pub max: f64,
}

pub const MIN_GRID: usize = 16;

/// Coarse grid scan over `[lo, hi]` followed by golden-section refinement
/// around the best grid point. Ties keep the leftmost point, so a flat
/// function returns `lo`.
pub fn maximize_1d<H>(mut h: H, lo: f64, hi: f64, grid_n: usize, refine_tol: f64) -> Maximum
where
    H: FnMut(f64) -> f64,
{
    let n = grid_n.max(MIN_GRID);
    let dx = (hi - lo) / n as f64;
    let mut best = Maximum { argmax: lo, max: h(lo) };
    let mut best_i = 0;
    for i in 1..=n {
        let x = if i == n { hi } else { lo + i as f64 * dx };
        let y = h(x);
        if y > best.max {
            best = Maximum { argmax: x, max: y };
            best_i = i;
        }
    }
    let a = if best_i == 0 { lo } else { lo + (best_i - 1) as f64 * dx };
    let b = if best_i == n { hi } else { lo + (best_i + 1) as f64 * dx };
    let refined = golden_section(&mut h, a, b, refine_tol);
    if refined.max > best.max {
        refined
    } else {
        best
    }
}

fn golden_section<H: FnMut(f64) -> f64>(h: &mut H, mut a: f64, mut b: f64, tol: f64) -> Maximum {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (h(x1), h(x2));
    let mut iterations = 0;
    while (b - a) > tol.max(f64::EPSILON * (a.abs() + b.abs())) && iterations < 200 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = h(x2);
        }
        iterations += 1;
    }
    if f1 >= f2 {
        Maximum { argmax: x1, max: f1 }
    } else {
        Maximum { argmax: x2, max: f2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ivp_constant_rhs() {
        let curve = solve_ivp(|_, _| 1.0, 0.0, 0.0, 1.0, 1e-3).unwrap();
        assert!((curve.eval(1.0) - 1.0).abs() < 1e-12);
        assert_eq!(curve.eval(0.0), 0.0);
    }

    #[test]
    fn ivp_uniform_deposit_ode() {
        let c = 0.15;
        let curve = solve_ivp(|x, y| (x - y) / c, 0.0, 0.0, 1.0, 1e-4).unwrap();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let exact = x - c * (1.0 - (-x / c).exp());
            assert!((curve.eval(x) - exact).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn ivp_exponential_decay() {
        let curve = solve_ivp(|_, y| -y, 0.0, 1.0, 1.0, 1e-4).unwrap();
        assert!((curve.eval(1.0) - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let exact = (-1f64).exp();
        let err = |h: f64| (solve_ivp(|_, y| -y, 0.0, 1.0, 1.0, h).unwrap().eval(1.0) - exact).abs();
        let ratio = err(0.1) / err(0.05);
        assert!((12.0..=20.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn ivp_reports_non_finite() {
        let err = solve_ivp(|x, _| 1.0 / (x - 0.5), 0.0, 0.0, 1.0, 0.25).unwrap_err();
        assert!(matches!(err, NumericsError::NonFinite { x, .. } if x == 0.5));
        assert!(solve_ivp(|_, _| 1.0, 0.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn curve_passes_through_knots() {
        let xs = vec![0.0, 0.3, 0.5, 1.0];
        let ys = vec![0.0, 0.1, 0.7, 0.9];
        let curve = Curve::monotone(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(curve.eval(*x), *y);
        }
        // monotone data stays monotone between knots
        let mut prev = curve.eval(0.0);
        for i in 1..=1000 {
            let y = curve.eval(i as f64 / 1000.0);
            assert!(y >= prev - 1e-15);
            prev = y;
        }
        assert!(Curve::monotone(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn root_examples() {
        let r = find_root(|x| x - 0.5, RootBracket::new(0.0, 1.0)).unwrap();
        assert!((r - 0.5).abs() < 1e-13);
        let r = find_root(|x| x * x * x - 0.22, RootBracket::new(0.0, 1.0)).unwrap();
        assert!((r - 0.22f64.cbrt()).abs() < 1e-12);
        assert!((r - 0.603681).abs() < 1e-6);
        let r = find_root(|x| x.cos() - x, RootBracket::new(0.0, 1.0)).unwrap();
        assert!((r - 0.739085).abs() < 1e-6);
        // fixed-point iteration as an independent check
        let mut x = 0.5f64;
        for _ in 0..200 {
            x = x.cos();
        }
        assert!((r - x).abs() < 1e-12);
    }

    #[test]
    fn root_requires_sign_change() {
        let err = find_root(|x| x * x + 1.0, RootBracket::new(-1.0, 1.0)).unwrap_err();
        assert!(matches!(err, NumericsError::NoSignChange { .. }));
    }

    #[test]
    fn quadrature_examples() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, 1e-12).value - 1.0).abs() < 1e-14);
        assert!((integrate(|x| 2.0 * x, 0.0, 1.0, 1e-12).value - 1.0).abs() < 1e-14);
        let q = integrate(|x| 0.5 / x.sqrt(), 0.0, 1.0, 1e-9);
        assert!(q.converged);
        assert!((q.value - 1.0).abs() < 1e-6, "{}", q.value);
    }

    #[test]
    fn quadrature_flags_unreached_tolerance() {
        // non-integrable spike: the budget runs out
        let q = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(!q.converged);
    }

    #[test]
    fn piecewise_quadrature_handles_jumps() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let q = integrate_piecewise(step, 0.0, 1.0, &[0.3], 1e-12);
        assert!((q.value - (0.3 + 1.4)).abs() < 1e-13);
    }

    #[test]
    fn maximize_examples() {
        let m = maximize_1d(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 16, 1e-10);
        assert!((m.argmax - 0.3).abs() < 1e-6);
        let m = maximize_1d(|x| x * (1.0 - x), 0.0, 1.0, 16, 1e-10);
        assert!((m.argmax - 0.5).abs() < 1e-6);
        assert!((m.max - 0.25).abs() < 1e-12);
        let m = maximize_1d(|_| 3.0, 0.2, 1.0, 32, 1e-10);
        assert_eq!(m.argmax, 0.2);
    }

    proptest! {
        #[test]
        fn root_stays_in_bracket(target in -0.9f64..0.9, lo in -2.0f64..-1.0, hi in 1.0f64..2.0) {
            let r = find_root(|x| x.powi(3) - target, RootBracket::new(lo, hi)).unwrap();
            prop_assert!(r >= lo && r <= hi);
            prop_assert!((r.powi(3) - target).abs() < 1e-10);
        }

        #[test]
        fn maximize_never_below_grid(a in -1.0f64..1.0, b in 0.0f64..20.0) {
            let h = |x: f64| (b * x).sin() + a * x;
            let n = 40;
            let m = maximize_1d(h, 0.0, 1.0, n, 1e-9);
            let grid_best = (0..=n).map(|i| h(i as f64 / n as f64)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m.max >= grid_best);
        }
    }
}
