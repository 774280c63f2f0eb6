//! Embedded Dormand–Prince 5(4) integrator with PI step control, dense
//! output and terminal event location.

use crate::error::{GaitError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Event times are located to this width.
    pub event_tol: f64,
    /// Dense-output points emitted per accepted step (1 = step ends only).
    pub refine: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            h_init: None,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 200_000,
            event_tol: 1e-10,
            refine: 1,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for OdeStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub stats: OdeStats,
    /// `(index, time)` of the terminal event that stopped the integration.
    pub event: Option<(usize, f64)>,
}

impl<const N: usize> OdeSolution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }
}

/// `K` zero-crossing conditions evaluated together. Integration stops at the
/// earliest crossing of any of them in its requested direction (`0` accepts
/// both, `1` rising, `-1` falling).
pub struct Events<G, const K: usize> {
    pub g: G,
    pub directions: [i8; K],
}

impl<G> Events<G, 1> {
    pub fn single(g: G, direction: i8) -> Self {
        Events { g, directions: [direction] }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Continuous extension over one accepted step.
struct Dense<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Dense<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        std::array::from_fn(|i| {
            let r = &self.r;
            r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])))
        })
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (which may be below `t0`).
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    integrate_with_events(f, t0, y0, t_end, opts, None::<Events<fn(f64, &[f64; N]) -> [f64; 0], 0>>)
}

pub fn integrate_with_events<const N: usize, const K: usize, F, G>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut event: Option<Events<G, K>>,
) -> Result<OdeSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: FnMut(f64, &[f64; N]) -> [f64; K],
{
    let mut stats = OdeStats::default();
    let mut ts = vec![t0];
    let mut ys = vec![y0];
    let span = t_end - t0;
    if span == 0.0 {
        return Ok(OdeSolution { t: ts, y: ys, stats, event: None });
    }
    let dir = span.signum();
    let scale = |a: &[f64; N], b: &[f64; N], i: usize| opts.atol + opts.rtol * a[i].abs().max(b[i].abs());

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;
    let mut g_prev = event.as_mut().map(|e| (e.g)(t, &y));

    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => initial_step(&mut f, t, &y, &k1, dir, opts, &mut stats)?,
    }
    .min(span.abs())
    .min(opts.h_max);
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;

    for _ in 0..opts.max_steps {
        if h < opts.h_min.max(1e-15 * t.abs()) {
            return Err(GaitError::IntegrationFailure { at: t, reason: format!("step size underflow ({h:e})") });
        }
        let remaining = (t_end - t) * dir;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last { t_end } else { t + hs };
        let k7 = f(t_new, &y_new)?;
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err += (e / scale(&y, &y_new, i)).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            let dense = Dense {
                t0: t,
                h: hs,
                r: {
                    let mut r = [[0.0; N]; 5];
                    for i in 0..N {
                        let dy = y_new[i] - y[i];
                        let bspl = hs * k1[i] - dy;
                        r[0][i] = y[i];
                        r[1][i] = dy;
                        r[2][i] = bspl;
                        r[3][i] = dy - hs * k7[i] - bspl;
                        r[4][i] = hs
                            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                    }
                    r
                },
            };
            stats.accepted += 1;
            if let (Some(ev), Some(g0)) = (event.as_mut(), g_prev) {
                let g1 = (ev.g)(t_new, &y_new);
                let mut first: Option<(usize, f64, [f64; N])> = None;
                for k in 0..K {
                    let d = ev.directions[k];
                    let crossed = (g0[k] < 0.0 && g1[k] >= 0.0 && d >= 0) || (g0[k] > 0.0 && g1[k] <= 0.0 && d <= 0);
                    if crossed {
                        let mut gk = |tt: f64, yy: &[f64; N]| (ev.g)(tt, yy)[k];
                        let (te, ye) = locate(&dense, &mut gk, t, g0[k], t_new, opts.event_tol);
                        if first.is_none_or(|(_, tf, _)| (te - tf) * dir < 0.0) {
                            first = Some((k, te, ye));
                        }
                    }
                }
                if let Some((k, te, ye)) = first {
                    push_dense(&dense, opts.refine, t, te, &mut ts, &mut ys);
                    ts.push(te);
                    ys.push(ye);
                    return Ok(OdeSolution { t: ts, y: ys, stats, event: Some((k, te)) });
                }
                g_prev = Some(g1);
            }
            push_dense(&dense, opts.refine, t, t_new, &mut ts, &mut ys);
            t = t_new;
            y = y_new;
            k1 = k7;
            ts.push(t);
            ys.push(y);
            if last {
                return Ok(OdeSolution { t: ts, y: ys, stats, event: None });
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(opts.h_max);
            err_old = err.max(1e-4);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Err(GaitError::IntegrationFailure { at: t, reason: format!("exceeded {} steps", opts.max_steps) })
}

fn push_dense<const N: usize>(dense: &Dense<N>, refine: usize, a: f64, b: f64, ts: &mut Vec<f64>, ys: &mut Vec<[f64; N]>) {
    for i in 1..refine {
        let t = a + (b - a) * i as f64 / refine as f64;
        ts.push(t);
        ys.push(dense.eval(t));
    }
}

fn locate<const N: usize, G>(
    dense: &Dense<N>,
    g: &mut G,
    mut a: f64,
    mut ga: f64,
    mut b: f64,
    tol: f64,
) -> (f64, [f64; N])
where
    G: FnMut(f64, &[f64; N]) -> f64,
{
    // Illinois-modified regula falsi, falling back to bisection.
    let mut side = 0i8;
    let mut gb = g(b, &dense.eval(b));
    if gb == 0.0 {
        return (b, dense.eval(b));
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut m = (a * gb - b * ga) / (gb - ga);
        let lo = a.min(b);
        let hi = a.max(b);
        if !(m > lo && m < hi) {
            m = 0.5 * (a + b);
        }
        let gm = g(m, &dense.eval(m));
        if gm == 0.0 {
            return (m, dense.eval(m));
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            gb = gm;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    (b, dense.eval(b))
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    dir: f64,
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let sc: [f64; N] = std::array::from_fn(|i| opts.atol + opts.rtol * y[i].abs());
    let norm = |v: &[f64; N]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(k1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, h0 * dir, &[(1.0, k1)]);
    let k2 = f(t + h0 * dir, &y1)?;
    stats.evaluations += 1;
    let diff: [f64; N] = std::array::from_fn(|i| k2[i] - k1[i]);
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = integrate(|_, y: &[f64; 1]| Ok([-y[0]]), 0.0, [1.0], 3.0, &OdeOptions::default()).unwrap();
        let (t, y) = sol.last();
        assert_eq!(t, 3.0);
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let sol = integrate(f, 0.0, [0.0, 1.0], -10.0, &OdeOptions::default()).unwrap();
        let (_, y) = sol.last();
        assert!((y[0] - (-10.0f64).sin()).abs() < 1e-8);
        assert!((y[1] - (-10.0f64).cos()).abs() < 1e-8);
    }

    #[test]
    fn event_located_precisely() {
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let ev = Events::single(|_: f64, y: &[f64; 2]| [y[0] - 0.5], 1);
        let sol = integrate_with_events(f, 0.0, [0.0, 1.0], 10.0, &OdeOptions::default(), Some(ev)).unwrap();
        let (k, te) = sol.event.unwrap();
        assert_eq!(k, 0);
        assert!((te - 0.5f64.asin()).abs() < 1e-9);
        assert!((sol.last().1[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn event_direction_filter() {
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let ev = Events::single(|_: f64, y: &[f64; 2]| [y[0] - 0.5], -1);
        let sol = integrate_with_events(f, 0.0, [0.0, 1.0], 10.0, &OdeOptions::default(), Some(ev)).unwrap();
        let (_, te) = sol.event.unwrap();
        assert!((te - (std::f64::consts::PI - 0.5f64.asin())).abs() < 1e-9);
    }

    #[test]
    fn earliest_of_several_events_wins() {
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let ev = Events { g: |_: f64, y: &[f64; 2]| [y[0] - 0.9, y[0] - 0.5], directions: [1, 1] };
        let sol = integrate_with_events(f, 0.0, [0.0, 1.0], 10.0, &OdeOptions::default(), Some(ev)).unwrap();
        assert_eq!(sol.event.unwrap().0, 1);
    }

    #[test]
    fn refine_adds_accurate_interior_points() {
        let opts = OdeOptions { refine: 4, ..OdeOptions::default() };
        let coarse = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 1.0, &OdeOptions::default()).unwrap();
        let sol = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 1.0, &opts).unwrap();
        assert_eq!(sol.t.len(), 4 * (coarse.t.len() - 1) + 1);
        for (t, y) in sol.t.iter().zip(&sol.y) {
            assert!((y[0] - t.exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn rhs_errors_propagate() {
        let f = |t: f64, _: &[f64; 1]| {
            if t > 0.5 {
                Err(GaitError::IntegrationFailure { at: t, reason: "stop".into() })
            } else {
                Ok([1.0])
            }
        };
        assert!(integrate(f, 0.0, [0.0], 1.0, &OdeOptions::default()).is_err());
    }

    #[test]
    fn step_underflow_reported() {
        let f = |t: f64, _: &[f64; 1]| Ok([1.0 / (1.0 - t)]);
        let err = integrate(f, 0.0, [0.0], 2.0, &OdeOptions::default()).unwrap_err();
        assert!(matches!(err, GaitError::IntegrationFailure { .. }));
    }

    #[test]
    fn zero_span() {
        let sol = integrate(|_, _: &[f64; 1]| Ok([1.0]), 1.0, [2.0], 1.0, &OdeOptions::default()).unwrap();
        assert_eq!(sol.y, vec![[2.0]]);
    }
}
