//! Pontryagin shooting for displacement-maximizing gaits.
//!
//! Only a quarter of the gait is solved, from the diagonal `phi1 = phi2` to
//! the anti-diagonal `phi1 = -phi2`; the rest follows from the swimmer's
//! reflection symmetries.

mod system;

pub use system::{
    bound_multiplier, cost_integrand, initial_costate, initial_lambda3, rhs, singular_control, Control, Local, StateVec,
    BREAKDOWN_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};
use crate::models::ConnectionModel;
use crate::ode::{integrate_with_events, Events, OdeOptions, OdeStats};
use crate::roots::{brent_with_values, sign_changes};
use crate::simulate::{integrate_gait_with, Gait, SpeedProfile};
use crate::types::{BodyPose, ShapePoint};

/// Which extremal to look for: largest positive or largest negative `x` travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Forward,
    Reverse,
}

impl Branch {
    pub fn kappa(self) -> f64 {
        match self {
            Branch::Forward => 1.0,
            Branch::Reverse => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcpState {
    pub phi1: f64,
    pub phi2: f64,
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl From<StateVec> for OcpState {
    fn from(y: StateVec) -> Self {
        OcpState { phi1: y[0], phi2: y[1], theta: y[2], lambda1: y[3], lambda2: y[4], lambda3: y[5] }
    }
}

impl OcpState {
    pub fn to_vec(self) -> StateVec {
        [self.phi1, self.phi2, self.theta, self.lambda1, self.lambda2, self.lambda3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    Singular,
    Bound,
}

/// One arc of the quarter gait.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arc {
    pub kind: ArcKind,
    pub t: Vec<f64>,
    pub states: Vec<OcpState>,
    /// Control direction sign (singular arcs) or the fixed control (bound arcs).
    #[serde(skip)]
    pub control: Option<Control>,
}

impl Arc {
    pub fn t0(&self) -> f64 {
        self.t[0]
    }
    pub fn t1(&self) -> f64 {
        *self.t.last().unwrap()
    }
    pub fn first(&self) -> StateVec {
        self.states[0].to_vec()
    }
    pub fn last(&self) -> StateVec {
        self.states.last().unwrap().to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuarterEnd {
    /// Reached `phi1 + phi2 = 0` with `phi2 > 0`.
    AntiDiagonal,
    /// Reached the anti-diagonal on the wrong side (`phi2 <= 0`).
    WrongSide,
    /// Turned back onto the starting diagonal.
    Diagonal,
    /// A singular arc after the bound arc crossed the bound again.
    BoundViolated,
    /// Never reached a terminal condition within the time budget.
    Timeout,
    /// The bound arc ended on the anti-diagonal.
    OnBound,
    /// The first singular arc ended before reaching the bound.
    NoBound,
}

#[derive(Debug, Clone)]
pub struct QuarterRun {
    pub arcs: Vec<Arc>,
    pub end: QuarterEnd,
    pub stats: OdeStats,
}

impl QuarterRun {
    pub fn terminal(&self) -> StateVec {
        self.arcs.last().unwrap().last()
    }
    pub fn tf(&self) -> f64 {
        self.arcs.last().unwrap().t1()
    }
    pub fn admissible(&self) -> bool {
        matches!(self.end, QuarterEnd::AntiDiagonal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmpOptions {
    pub ode: OdeOptions,
    /// Diagonal scan interval for `phi1(0)`.
    pub scan: (f64, f64),
    pub scan_step: f64,
    /// Residual tolerance of the shooting root finds.
    pub tol: f64,
    /// Time budget of a quarter (unit-speed shape motion).
    pub t_max: f64,
    /// Quarter samples used to build the full gait polyline.
    pub gait_refine: usize,
    /// Scan step for the bound-arc duration.
    pub duration_step: f64,
    pub max_duration: f64,
}

impl Default for PmpOptions {
    fn default() -> Self {
        PmpOptions {
            ode: OdeOptions { rtol: 1e-11, atol: 1e-12, refine: 4, ..OdeOptions::default() },
            scan: (0.02, 3.5),
            scan_step: 0.02,
            tol: 1e-8,
            t_max: 40.0,
            gait_refine: 4,
            duration_step: 0.05,
            max_duration: 8.0,
        }
    }
}

/// Bound-arc plan: first singular arc until `phi2 = b`, then `u = (-1, 0)`
/// for `duration` with the constraint multiplier in the costates, then a
/// singular arc to the anti-diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPlan {
    pub b: f64,
    pub duration: f64,
}

fn to_states(y: &[StateVec]) -> Vec<OcpState> {
    y.iter().copied().map(OcpState::from).collect()
}

/// Sign of the singular control so that it moves along `preferred`.
fn pick_sigma<M: ConnectionModel>(model: &M, kappa: f64, y: &StateVec, t: f64, preferred: [f64; 2]) -> Result<f64> {
    let local = Local::at(model, [y[0], y[1], y[2]], kappa)?;
    let u = singular_control(&local, y, 1.0, t)?;
    Ok(if u[0] * preferred[0] + u[1] * preferred[1] >= 0.0 { 1.0 } else { -1.0 })
}

/// Integrates one quarter from `(d, d)`.
pub fn run_quarter<M: ConnectionModel>(
    model: &M,
    branch: Branch,
    d: f64,
    plan: Option<BoundPlan>,
    opts: &PmpOptions,
) -> Result<QuarterRun> {
    let kappa = branch.kappa();
    let y0 = initial_costate(model, d, kappa)?;
    let mut stats = OdeStats::default();
    let mut arcs = Vec::new();
    // leave the diagonal towards phi2 > phi1
    let sigma = pick_sigma(model, kappa, &y0, 0.0, [-1.0, 1.0])?;
    let control = Control::Singular { sigma };
    let b = plan.map(|p| p.b).unwrap_or(f64::INFINITY);
    let ev = Events {
        g: |_: f64, y: &StateVec| [y[0] + y[1], y[1] - y[0], y[1] - b],
        directions: [-1, -1, 1],
    };
    let sol = integrate_with_events(|t, y| rhs(model, kappa, control, t, y), 0.0, y0, opts.t_max, &opts.ode, Some(ev))?;
    stats += sol.stats;
    let event = sol.event;
    arcs.push(Arc { kind: ArcKind::Singular, t: sol.t, states: to_states(&sol.y), control: Some(control) });
    let classify_end = |y: &StateVec| if y[1] > 0.0 { QuarterEnd::AntiDiagonal } else { QuarterEnd::WrongSide };
    let end = match event {
        None => QuarterEnd::Timeout,
        Some((1, _)) => QuarterEnd::Diagonal,
        Some((0, _)) if plan.is_some() => QuarterEnd::NoBound,
        Some((0, _)) => classify_end(&arcs[0].last()),
        Some(_) => {
            let plan = plan.unwrap();
            let y1 = arcs[0].last();
            let t1 = arcs[0].t1();
            let control = Control::Bound { u1: -1.0 };
            let ev = Events::single(|_: f64, y: &StateVec| [y[0] + y[1]], -1);
            let sol = integrate_with_events(
                |t, y| rhs(model, kappa, control, t, y),
                t1,
                y1,
                t1 + plan.duration,
                &opts.ode,
                Some(ev),
            )?;
            stats += sol.stats;
            let hit_end = sol.event.is_some();
            arcs.push(Arc { kind: ArcKind::Bound, t: sol.t, states: to_states(&sol.y), control: Some(control) });
            if hit_end {
                QuarterEnd::OnBound
            } else {
                let y2 = arcs[1].last();
                let t2 = arcs[1].t1();
                // leave the bound downwards
                let sigma = pick_sigma(model, kappa, &y2, t2, [0.0, -1.0])?;
                let control = Control::Singular { sigma };
                let ev = Events {
                    g: |_: f64, y: &StateVec| [y[0] + y[1], y[1] - b - 1e-9],
                    directions: [-1, 1],
                };
                let sol = integrate_with_events(
                    |t, y| rhs(model, kappa, control, t, y),
                    t2,
                    y2,
                    t2 + opts.t_max,
                    &opts.ode,
                    Some(ev),
                )?;
                stats += sol.stats;
                let event = sol.event;
                arcs.push(Arc { kind: ArcKind::Singular, t: sol.t, states: to_states(&sol.y), control: Some(control) });
                match event {
                    None => QuarterEnd::Timeout,
                    Some((1, _)) => QuarterEnd::BoundViolated,
                    Some(_) => classify_end(&arcs[2].last()),
                }
            }
        }
    };
    Ok(QuarterRun { arcs, end, stats })
}

/// Shooting residual of the unbounded problem: `lambda3(t_f)`.
pub fn unbounded_residual<M: ConnectionModel>(model: &M, branch: Branch, d: f64, opts: &PmpOptions) -> Result<(f64, QuarterRun)> {
    let run = run_quarter(model, branch, d, None, opts)?;
    Ok((run.terminal()[5], run))
}

/// Necessary-condition diagnostics of a quarter solution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest `|H_u|` component over all samples.
    pub max_h_u: f64,
    /// Largest `|psi|` over all singular-arc samples.
    pub max_psi: f64,
    /// Largest deviation of `H` from its arc-initial value, over all arcs.
    pub h_drift: f64,
    /// Largest `|H(tau+) - H(tau-)|` over arc junctions (0 without junctions).
    pub h_jump: f64,
    pub lambda3_tf: f64,
    pub lambda_diff_tf: f64,
    /// Gap between the reconstructed gait's quarter joints (closure check).
    pub closure_gap: f64,
    /// Smallest bound-arc multiplier; optimality needs it non-negative.
    pub min_multiplier: Option<f64>,
}

fn arc_u<M: ConnectionModel>(model: &M, kappa: f64, arc: &Arc, y: &StateVec, t: f64) -> Result<(Local, [f64; 2])> {
    let local = Local::at(model, [y[0], y[1], y[2]], kappa)?;
    let u = arc.control.unwrap().at(&local, y, t)?;
    Ok((local, u))
}

pub fn diagnostics<M: ConnectionModel>(model: &M, branch: Branch, run: &QuarterRun) -> Result<Diagnostics> {
    let kappa = branch.kappa();
    let mut d = Diagnostics::default();
    let mut h_end: Option<f64> = None;
    for arc in &run.arcs {
        let mut h0 = None;
        for (t, s) in arc.t.iter().zip(&arc.states) {
            let y = s.to_vec();
            let (local, u) = arc_u(model, kappa, arc, &y, *t)?;
            let h = local.hamiltonian(&y, u);
            let hu = local.h_u(&y);
            d.max_h_u = d.max_h_u.max(hu[0].abs()).max(hu[1].abs());
            match arc.control.unwrap() {
                Control::Singular { .. } => d.max_psi = d.max_psi.max(local.psi(y[5]).abs()),
                Control::Bound { u1 } => {
                    let mu = bound_multiplier(&local, &y, u1);
                    d.min_multiplier = Some(d.min_multiplier.map_or(mu, |m| m.min(mu)));
                }
            }
            let h0 = *h0.get_or_insert(h);
            d.h_drift = d.h_drift.max((h - h0).abs());
        }
        let y = arc.first();
        let (local, u) = arc_u(model, kappa, arc, &y, arc.t0())?;
        let h_start = local.hamiltonian(&y, u);
        if let Some(he) = h_end {
            d.h_jump = d.h_jump.max((h_start - he).abs());
        }
        let y = arc.last();
        let (local, u) = arc_u(model, kappa, arc, &y, arc.t1())?;
        h_end = Some(local.hamiltonian(&y, u));
    }
    let yf = run.terminal();
    d.lambda3_tf = yf[5];
    d.lambda_diff_tf = yf[3] - yf[4];
    Ok(d)
}

/// Joins the quarter with its symmetric images into a closed gait:
/// `Q`, reversed `S_a Q`, `-Q`, reversed `S_d Q`, where
/// `S_a(a, b) = (-b, -a)` and `S_d(a, b) = (b, a)`.
pub fn reconstruct_gait(quarter: &[ShapePoint]) -> (Vec<ShapePoint>, f64) {
    let sa = |p: ShapePoint| ShapePoint::new(-p.phi2, -p.phi1);
    let sd = |p: ShapePoint| ShapePoint::new(p.phi2, p.phi1);
    let n = quarter.len();
    let mut out = Vec::with_capacity(4 * n);
    out.extend_from_slice(quarter);
    let gap1 = quarter[n - 1].dist(sa(quarter[n - 1]));
    out.extend(quarter.iter().rev().skip(1).map(|&p| sa(p)));
    out.extend(quarter.iter().skip(1).map(|&p| p * -1.0));
    let gap2 = (quarter[n - 1] * -1.0).dist(sd(quarter[n - 1]));
    out.extend(quarter.iter().rev().skip(1).map(|&p| sd(p)));
    // the last point repeats the first one
    let gap3 = out.last().unwrap().dist(out[0]);
    out.pop();
    (out, gap1.max(gap2).max(gap3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: ArcKind,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmpSolution {
    pub branch: Branch,
    pub bound: Option<f64>,
    pub phi1_0: f64,
    pub lambda3_0: f64,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub tf: f64,
    pub segments: Vec<Segment>,
    pub arcs: Vec<Arc>,
    /// Full closed gait (polyline), starting on the diagonal.
    pub gait: Gait,
    pub displacement: BodyPose,
    pub diagnostics: Diagnostics,
    pub stats: OdeStats,
}

impl PmpSolution {
    pub fn quarter(&self) -> Vec<ShapePoint> {
        let mut pts: Vec<ShapePoint> = Vec::new();
        for arc in &self.arcs {
            for s in &arc.states {
                let p = ShapePoint::new(s.phi1, s.phi2);
                if pts.last().is_none_or(|q| q.dist(p) > 1e-12) {
                    pts.push(p);
                }
            }
        }
        pts
    }

    pub fn gait_points(&self) -> Vec<ShapePoint> {
        match &self.gait.shape {
            crate::simulate::GaitShape::Polyline { vertices } => vertices.clone(),
            _ => unreachable!(),
        }
    }
}

fn assemble<M: ConnectionModel>(
    model: &M,
    branch: Branch,
    bound: Option<f64>,
    d: f64,
    run: QuarterRun,
    opts: &PmpOptions,
) -> Result<PmpSolution> {
    let mut diagnostics = diagnostics(model, branch, &run)?;
    let segments: Vec<Segment> = run.arcs.iter().map(|a| Segment { kind: a.kind, t0: a.t0(), t1: a.t1() }).collect();
    let (tau1, tau2) = if run.arcs.len() > 1 { (Some(run.arcs[1].t0()), Some(run.arcs[1].t1())) } else { (None, None) };
    let mut sol = PmpSolution {
        branch,
        bound,
        phi1_0: d,
        lambda3_0: run.arcs[0].states[0].lambda3,
        tau1,
        tau2,
        tf: run.tf(),
        segments,
        arcs: run.arcs,
        gait: Gait::circle(ShapePoint::new(0.0, 0.0), 0.0),
        displacement: BodyPose::IDENTITY,
        diagnostics,
        stats: run.stats,
    };
    let (pts, gap) = reconstruct_gait(&sol.quarter());
    diagnostics.closure_gap = gap;
    sol.diagnostics = diagnostics;
    sol.gait = Gait::polyline(pts)?;
    let sim_opts = OdeOptions { refine: 1, ..opts.ode };
    sol.displacement = integrate_gait_with(model, &sol.gait, SpeedProfile::Uniform, &sim_opts)?.displacement();
    Ok(sol)
}

enum Scan {
    Ok(f64),
    Inadmissible,
    Failed(GaitError),
}

/// Every converged unbounded extremal on the scanned diagonal interval.
///
/// The extremal equations do not depend on the cost sign, so one scan serves
/// both branches. The diagonal is scanned on `opts.scan` for admissible sign
/// changes of `lambda3(t_f)` and each bracket is refined by Brent's method.
/// Solutions come back ordered by `phi1(0)`. When nothing converges the last
/// singular-arc breakdown met during the scan is returned, else `NoBracket`.
pub fn unbounded_candidates<M: ConnectionModel>(model: &M, opts: &PmpOptions) -> Result<Vec<PmpSolution>> {
    let (lo, hi) = opts.scan;
    if !(lo > 0.0 && hi > lo && opts.scan_step > 0.0) {
        return Err(GaitError::InvalidParams(format!("bad scan interval {lo}..{hi}")));
    }
    let branch = Branch::Forward;
    let n = ((hi - lo) / opts.scan_step).round().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let scans: Vec<Scan> = {
        use rayon::prelude::*;
        grid.par_iter()
            .map(|&d| match unbounded_residual(model, branch, d, opts) {
                Ok((r, run)) if run.admissible() && r.is_finite() => Scan::Ok(r),
                Ok(_) => Scan::Inadmissible,
                Err(e) => Scan::Failed(e),
            })
            .collect()
    };
    let values: Vec<f64> = scans.iter().map(|s| if let Scan::Ok(r) = s { *r } else { f64::NAN }).collect();
    let mut found = Vec::new();
    for i in sign_changes(&values) {
        let mut f = |d: f64| -> Result<f64> {
            let (r, run) = unbounded_residual(model, branch, d, opts)?;
            if run.admissible() { Ok(r) } else { Err(GaitError::NoRoot(format!("inadmissible quarter at {d}"))) }
        };
        let Ok(root) = brent_with_values(&mut f, (grid[i], values[i]), (grid[i + 1], values[i + 1]), 1e-13, opts.tol, 200) else {
            continue;
        };
        // a sign change across a pole converges in d but not in the residual
        if !(root.fx.abs() <= opts.tol) {
            continue;
        }
        let (_, run) = unbounded_residual(model, branch, root.x, opts)?;
        found.push(assemble(model, branch, None, root.x, run, opts)?);
    }
    if !found.is_empty() {
        return Ok(found);
    }
    let breakdown = scans.into_iter().rev().find_map(|s| match s {
        Scan::Failed(e @ GaitError::SingularArcBreakdown { .. }) => Some(e),
        _ => None,
    });
    Err(breakdown.unwrap_or(GaitError::NoBracket { lo, hi }))
}

/// Unbounded shooting on `phi1(0)` for `lambda3(t_f) = 0`.
///
/// Among the extremals of [`unbounded_candidates`] the branch picks the one
/// travelling furthest in its direction; extremals moving the other way do
/// not count. With none left the result is `NoBracket`.
pub fn shoot_unbounded<M: ConnectionModel>(model: &M, branch: Branch, opts: &PmpOptions) -> Result<PmpSolution> {
    select_branch(unbounded_candidates(model, opts)?, branch, opts)
}

/// The candidate travelling furthest in the branch direction, with its
/// costates expressed for that branch.
pub fn select_branch(candidates: Vec<PmpSolution>, branch: Branch, opts: &PmpOptions) -> Result<PmpSolution> {
    let k = branch.kappa();
    let best = candidates
        .into_iter()
        .filter(|s| k * s.displacement.x > 0.0)
        .max_by(|a, b| (k * a.displacement.x).total_cmp(&(k * b.displacement.x)));
    let mut sol = best.ok_or(GaitError::NoBracket { lo: opts.scan.0, hi: opts.scan.1 })?;
    if sol.branch != branch {
        // the costates are linear in the cost, so the other branch negates them
        sol.branch = branch;
        sol.lambda3_0 = -sol.lambda3_0;
        for st in sol.arcs.iter_mut().flat_map(|a| a.states.iter_mut()) {
            st.lambda1 = -st.lambda1;
            st.lambda2 = -st.lambda2;
            st.lambda3 = -st.lambda3;
        }
    }
    Ok(sol)
}

/// How a bounded quarter leaves the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    /// Stays on the bound up to the anti-diagonal; the quarter ends in the corner `(-b, b)`.
    Corner,
    /// Leaves at the `k`-th sign change of `psi` along the bound arc.
    Zero(usize),
}

const EXITS: [Exit; 4] = [Exit::Corner, Exit::Zero(0), Exit::Zero(1), Exit::Zero(2)];

/// Bound-arc durations at which `psi` changes sign, by linear interpolation
/// between output samples. The first `skip` of duration is ignored since
/// `psi` starts at zero on entry.
fn psi_zeros<M: ConnectionModel>(model: &M, kappa: f64, arc: &Arc, skip: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for (t, st) in arc.t.iter().zip(&arc.states) {
        let dt = t - arc.t0();
        if dt < skip {
            continue;
        }
        let y = st.to_vec();
        let psi = Local::at(model, [y[0], y[1], y[2]], kappa)?.psi(y[5]);
        if let Some((t0, p0)) = prev {
            if (p0 > 0.0) != (psi > 0.0) {
                out.push(t0 + (dt - t0) * p0 / (p0 - psi));
            }
        }
        prev = Some((dt, psi));
    }
    Ok(out)
}

/// Exit residual `lambda1(t_f) - lambda2(t_f)` of a bounded quarter.
fn exit_residual(run: &QuarterRun) -> f64 {
    let y = run.terminal();
    y[3] - y[4]
}

/// One bounded quarter from `(d, d)` with the given exit structure, or `None`
/// when the structure does not exist there. With `exact` the exit time is
/// refined by Brent's method on the exit residual; otherwise the `psi` sign
/// change is used directly, which agrees with it at a converged solution.
/// The flag reports whether the bound was reached at all.
fn bounded_run<M: ConnectionModel>(
    model: &M,
    branch: Branch,
    b: f64,
    d: f64,
    exit: Exit,
    exact: bool,
    opts: &PmpOptions,
) -> Result<(bool, Option<QuarterRun>)> {
    let full = run_quarter(model, branch, d, Some(BoundPlan { b, duration: opts.max_duration }), opts)?;
    if full.arcs.len() < 2 {
        return Ok((false, None));
    }
    let k = match exit {
        Exit::Corner => return Ok((true, (full.end == QuarterEnd::OnBound).then_some(full))),
        Exit::Zero(k) => k,
    };
    let zeros = psi_zeros(model, branch.kappa(), &full.arcs[1], opts.duration_step)?;
    let Some(&z) = zeros.get(k) else {
        return Ok((true, None));
    };
    let run_at = |tau: f64| run_quarter(model, branch, d, Some(BoundPlan { b, duration: tau }), opts);
    if !exact {
        let run = run_at(z)?;
        return Ok((true, run.admissible().then_some(run)));
    }
    let mut f = |tau: f64| -> Result<f64> {
        let run = run_at(tau)?;
        if run.admissible() {
            Ok(exit_residual(&run))
        } else {
            Err(GaitError::NoRoot(format!("inadmissible bounded quarter at exit {tau}")))
        }
    };
    let mut h = 0.25 * opts.duration_step;
    for _ in 0..4 {
        let (lo, hi) = ((z - h).max(0.5 * opts.duration_step), z + h);
        if let (Ok(flo), Ok(fhi)) = (f(lo), f(hi)) {
            if flo * fhi <= 0.0 {
                let root = brent_with_values(&mut f, (lo, flo), (hi, fhi), 1e-13, opts.tol, 200)?;
                let run = run_at(root.x)?;
                return Ok((true, Some(run)));
            }
        }
        h *= 2.0;
    }
    Ok((true, None))
}

/// Bounded shooting with `phi2 <= b` active on one arc per quarter.
///
/// The quarter runs a singular arc up to `phi2 = b`, follows the bound with
/// `u = (-1, 0)` and the directly adjoined multiplier, then either returns to
/// a singular arc at the exit time `tau2` or stays on the bound up to the
/// corner `(-b, b)`. The exit time solves `lambda1(t_f) = lambda2(t_f)` for
/// each `phi1(0)`, and `phi1(0)` solves `lambda3(t_f) = 0` around it. Among
/// the converged quarters the branch picks the one travelling furthest its
/// way, as in [`shoot_unbounded`].
pub fn shoot_bounded<M: ConnectionModel>(model: &M, b: f64, branch: Branch, opts: &PmpOptions) -> Result<PmpSolution> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(GaitError::InvalidParams(format!("bound must be positive, got {b}")));
    }
    let (lo, hi) = opts.scan;
    if !(lo > 0.0 && hi > lo && opts.scan_step > 0.0) {
        return Err(GaitError::InvalidParams(format!("bad scan interval {lo}..{hi}")));
    }
    let hi = hi.min(b);
    let n = ((hi - lo) / opts.scan_step).round().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let rows: Vec<(bool, [f64; EXITS.len()])> = {
        use rayon::prelude::*;
        grid.par_iter()
            .map(|&d| {
                let mut reached = false;
                let vals = EXITS.map(|exit| match bounded_run(model, branch, b, d, exit, false, opts) {
                    Ok((r, run)) => {
                        reached |= r;
                        run.map_or(f64::NAN, |run| run.terminal()[5])
                    }
                    Err(_) => f64::NAN,
                });
                (reached, vals)
            })
            .collect()
    };
    if !rows.iter().any(|r| r.0) {
        return Err(GaitError::BoundNeverReached(b));
    }
    let k = branch.kappa();
    let mut best: Option<PmpSolution> = None;
    for (e, &exit) in EXITS.iter().enumerate() {
        let values: Vec<f64> = rows.iter().map(|r| r.1[e]).collect();
        for i in sign_changes(&values) {
            let mut f = |d: f64| -> Result<f64> {
                match bounded_run(model, branch, b, d, exit, true, opts)?.1 {
                    Some(run) => Ok(run.terminal()[5]),
                    None => Err(GaitError::NoRoot(format!("exit structure lost at {d}"))),
                }
            };
            let Ok(root) = brent_with_values(&mut f, (grid[i], values[i]), (grid[i + 1], values[i + 1]), 1e-13, opts.tol, 200)
            else {
                continue;
            };
            if !(root.fx.abs() <= opts.tol) {
                continue;
            }
            let Some(run) = bounded_run(model, branch, b, root.x, exit, true, opts)?.1 else {
                continue;
            };
            if !(exit_residual(&run).abs() <= opts.tol.max(1e-6)) {
                continue;
            }
            let sol = assemble(model, branch, Some(b), root.x, run, opts)?;
            if k * sol.displacement.x > 0.0 && best.as_ref().is_none_or(|s| k * sol.displacement.x > k * s.displacement.x) {
                best = Some(sol);
            }
        }
    }
    best.ok_or_else(|| GaitError::NoRoot(format!("bounded shooting with b = {b} did not converge on [{lo:.3}, {hi:.3}]")))
}
