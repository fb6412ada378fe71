//! Shared numerical kernels: quadrature, interpolation, an embedded
//! Runge-Kutta integrator, and small linear-algebra helpers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// 5-point Gauss-Legendre nodes on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];

/// Matching Gauss-Legendre weights.
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// 5-point Gauss-Legendre quadrature of `f` on `[a, b]` (exact through degree 9).
pub fn gauss_legendre_5<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Weights for composite Newton-Cotes quadrature of uniformly sampled data.
///
/// Uses composite Simpson 1/3 and, when the interval count is odd, a 3/8
/// block on the tail. Two points fall back to the trapezoid rule.
pub fn quadrature_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "quadrature needs at least two samples");
    let mut w = vec![0.0; n];
    if n == 2 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let intervals = n - 1;
    // Simpson 1/3 over an even number of leading intervals.
    let simpson_intervals = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals.saturating_sub(3)
    };
    let third = h / 3.0;
    if simpson_intervals > 0 {
        w[0] += third;
        for (i, wi) in w.iter_mut().enumerate().take(simpson_intervals).skip(1) {
            *wi += if i.is_multiple_of(2) {
                2.0 * third
            } else {
                4.0 * third
            };
        }
        w[simpson_intervals] += third;
    }
    if simpson_intervals < intervals {
        // Remaining three intervals: Simpson 3/8.
        let s = simpson_intervals;
        let c = 3.0 * h / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}

/// Composite quadrature of complex samples on a uniform grid with spacing `h`.
pub fn integrate_samples(values: &[Complex64], h: f64) -> Complex64 {
    let w = quadrature_weights(values.len(), h);
    values
        .iter()
        .zip(w.iter())
        .map(|(v, w)| v * *w)
        .sum::<Complex64>()
}

/// Composite quadrature of real samples on a uniform grid with spacing `h`.
pub fn integrate_samples_real(values: &[f64], h: f64) -> f64 {
    let w = quadrature_weights(values.len(), h);
    values.iter().zip(w.iter()).map(|(v, w)| v * w).sum()
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let mut hm = 1.0;
            let mut hc = 2.0 * x;
            for k in 1..n {
                let hn = 2.0 * x * hc - 2.0 * (k as f64) * hm;
                hm = hc;
                hc = hn;
            }
            hc
        }
    }
}

/// Quintic Hermite interpolation on one panel.
///
/// Matches value, first, and second derivative at both endpoints; the
/// interpolation error is O(h^6) and the derivative of the polynomial
/// approximates the true derivative to O(h^5).
#[derive(Debug, Clone, Copy)]
pub struct QuinticPanel {
    pub t0: f64,
    pub h: f64,
    pub y0: Complex64,
    pub d0: Complex64,
    pub dd0: Complex64,
    pub y1: Complex64,
    pub d1: Complex64,
    pub dd1: Complex64,
}

impl QuinticPanel {
    /// Interpolated value at `t`.
    pub fn value(&self, t: f64) -> Complex64 {
        let s = (t - self.t0) / self.h;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s * s);
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 0.5 * s3 - s4 + 0.5 * s5;
        self.y0 * h0
            + self.d0 * (self.h * h1)
            + self.dd0 * (self.h * self.h * h2)
            + self.y1 * h3
            + self.d1 * (self.h * h4)
            + self.dd1 * (self.h * self.h * h5)
    }

    /// Derivative of the interpolant at `t`.
    pub fn derivative(&self, t: f64) -> Complex64 {
        let s = (t - self.t0) / self.h;
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let h0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let h1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let h2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let h3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let h4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let h5 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        (self.y0 * h0
            + self.d0 * (self.h * h1)
            + self.dd0 * (self.h * self.h * h2)
            + self.y1 * h3
            + self.d1 * (self.h * h4)
            + self.dd1 * (self.h * self.h * h5))
            / self.h
    }
}

/// Monotone cubic (Fritsch-Carlson) slopes for tabulated data.
pub fn pchip_slopes(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    assert!(n >= 2);
    if n == 2 {
        let d = (values[1] - values[0]) / (times[1] - times[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = values
        .windows(2)
        .zip(h.iter())
        .map(|(w, h)| (w[1] - w[0]) / h)
        .collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Cubic Hermite value on one panel given endpoint values and slopes.
pub fn cubic_hermite(t: f64, t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + d0 * h * (s3 - 2.0 * s2 + s)
        + y1 * (-2.0 * s3 + 3.0 * s2)
        + d1 * h * (s3 - s2)
}

/// Derivative of [`cubic_hermite`] at `t`.
pub fn cubic_hermite_deriv(t: f64, t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    (y0 * (6.0 * s2 - 6.0 * s) + y1 * (-6.0 * s2 + 6.0 * s)) / h
        + d0 * (3.0 * s2 - 4.0 * s + 1.0)
        + d1 * (3.0 * s2 - 2.0 * s)
}

/// Index of the panel containing `t` in a sorted node array.
pub fn locate_panel(nodes: &[f64], t: f64) -> usize {
    match nodes.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
        Ok(i) => i.min(nodes.len() - 2),
        Err(i) => i.saturating_sub(1).min(nodes.len() - 2),
    }
}

/// Options for the adaptive Dormand-Prince 5(4) integrator.
#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Cap on the step size; also controls the output node density.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 20_000_000,
        }
    }
}

/// One accepted integrator step with endpoint derivatives.
#[derive(Debug, Clone, Copy)]
pub struct OdeStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub dy0: [f64; N],
    pub dy1: [f64; N],
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and 4th-order weights (error estimator).
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` over `span` with Dormand-Prince 5(4).
///
/// Every accepted step is reported through `on_step` (with FSAL endpoint
/// derivatives), so callers can build dense interpolants or run monitors.
/// Fails if the step controller stalls or `max_steps` is exhausted.
pub fn integrate_dopri5<const N: usize, F, S>(
    rhs: F,
    span: (f64, f64),
    y0: [f64; N],
    opts: &OdeOptions,
    on_step: S,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(&OdeStep<N>) -> Result<()>,
{
    let atol = opts.atol;
    let rtol = opts.rtol;
    integrate_dopri5_scaled(
        rhs,
        span,
        y0,
        opts,
        move |a: &[f64; N], b: &[f64; N]| {
            let mut s = [0.0; N];
            for i in 0..N {
                s[i] = atol + rtol * a[i].abs().max(b[i].abs());
            }
            s
        },
        on_step,
    )
}

/// [`integrate_dopri5`] with caller-supplied error scales.
///
/// `scale(y_old, y_new)` returns the per-component tolerance denominators.
/// Complex systems stored as real pairs should scale both members of a
/// pair by the pair modulus: per-component scaling starves the tolerance
/// whenever one real part crosses zero while its partner is large.
pub fn integrate_dopri5_scaled<const N: usize, F, S, W>(
    mut rhs: F,
    span: (f64, f64),
    y0: [f64; N],
    opts: &OdeOptions,
    scale: W,
    mut on_step: S,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(&OdeStep<N>) -> Result<()>,
    W: Fn(&[f64; N], &[f64; N]) -> [f64; N],
{
    let (t_start, t_end) = span;
    if !(t_end > t_start) {
        return Err(Error::Invalid {
            what: "ode span",
            why: format!("need t_end > t_start, got [{t_start}, {t_end}]"),
        });
    }
    let width = t_end - t_start;
    let mut t = t_start;
    let mut y = y0;
    let mut dy = rhs(t, &y);
    let mut h = (width / 1000.0).min(opts.h_max);
    let mut steps = 0usize;
    let mut rejects = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Accuracy {
                what: "ode step budget",
                value: steps as f64,
                limit: opts.max_steps as f64,
            });
        }
        let last = t + h >= t_end;
        if last {
            // The final clamped step may be roundoff-sized; that is fine.
            h = t_end - t;
        } else if h < 1e-14 * width.max(t.abs()) {
            return Err(Error::Accuracy {
                what: "ode step size",
                value: h,
                limit: 1e-14 * width,
            });
        }

        let mut k = [[0.0; N]; 7];
        k[0] = dy;
        for stage in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = DP_A[stage][j] * h;
                if a != 0.0 {
                    for (ysi, kji) in ys.iter_mut().zip(kj.iter()) {
                        *ysi += a * kji;
                    }
                }
            }
            k[stage] = rhs(t + DP_C[stage] * h, &ys);
        }
        // 5th-order solution is the stage-7 state (FSAL).
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = DP_A[6][j] * h;
            for (yi, kji) in y_new.iter_mut().zip(kj.iter()) {
                *yi += b * kji;
            }
        }

        let mut err_sq = 0.0;
        let scales = scale(&y, &y_new);
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += DP_E[j] * kj[i];
            }
            e *= h;
            err_sq += (e / scales[i]) * (e / scales[i]);
        }
        let err = (err_sq / N as f64).sqrt();

        steps += 1;
        if err <= 1.0 {
            rejects = 0;
            let step = OdeStep {
                t0: t,
                t1: t + h,
                y0: y,
                y1: y_new,
                dy0: dy,
                dy1: k[6],
            };
            on_step(&step)?;
            t += h;
            y = y_new;
            dy = k[6];
            let scale = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * scale).min(opts.h_max);
        } else {
            rejects += 1;
            if rejects > 200 {
                return Err(Error::Accuracy {
                    what: "ode consecutive rejects",
                    value: rejects as f64,
                    limit: 200.0,
                });
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if last && t >= t_end {
            break;
        }
    }
    Ok(y)
}

/// Solve a complex tridiagonal system in place (Thomas algorithm).
///
/// `lower`, `diag`, `upper` describe the matrix rows; `rhs` is overwritten
/// with the solution. `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
    scratch: &mut Vec<Complex64>,
) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    scratch.clear();
    scratch.resize(n, Complex64::new(0.0, 0.0));
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let corr = scratch[i + 1] * rhs[i + 1];
        rhs[i] -= corr;
    }
}

/// Smallest representable angle difference, wrapped into (-pi, pi].
pub fn wrap_angle(delta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut d = delta % two_pi;
    if d > std::f64::consts::PI {
        d -= two_pi;
    } else if d <= -std::f64::consts::PI {
        d += two_pi;
    }
    d
}
