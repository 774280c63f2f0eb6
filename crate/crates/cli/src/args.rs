use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaitforge_core::connection::Window;
use gaitforge_core::geometry::Component;
use gaitforge_core::pmp::Branch;

#[derive(Debug, Parser)]
#[command(name = "gaitforge", version, about = "Displacement-maximizing gaits for three-link swimmers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Net displacement of circle and square gaits over an amplitude range.
    Sweep(SweepArgs),
    /// Height function, zero contours and junctions over a shape window.
    Heightfield(HeightfieldArgs),
    /// Optimal quarter-gait shooting, optionally with a joint bound.
    Pmp(PmpArgs),
    /// PMP gaits matched against the zero contours of the height function.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Swimmer config (TOML); Purcell defaults when omitted.
    #[arg(long, value_name = "PATH")]
    pub model_config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Body frame: middle-link or optimized. Overrides the config.
    #[arg(long)]
    pub frame: Option<String>,
    /// Recorded in the reports; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Circle,
    Square,
    Both,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "both")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.01)]
    pub eps_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eps_step: f64,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Half-width of a square window, or `phi1_lo,phi1_hi,phi2_lo,phi2_hi`.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<Window>,
    /// Grid points per axis (401 up to half-width 3.2, else 601).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HeightfieldArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_parser = parse_component, default_value = "x")]
    pub component: Component,
    /// Gait CSV files with `phi1,phi2` columns to draw over the field.
    #[arg(long, value_name = "CSV")]
    pub overlay: Vec<PathBuf>,
    /// Also dump the exterior derivative, bracket and total curvature.
    #[arg(long)]
    pub curvature: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Diagonal scan for the initial joint angle.
    #[arg(long)]
    pub scan_min: Option<f64>,
    #[arg(long)]
    pub scan_max: Option<f64>,
    #[arg(long)]
    pub scan_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PmpArgs {
    #[command(flatten)]
    pub common: Common,
    /// Joint bound in radians, or `none`.
    #[arg(long, value_parser = parse_bound, default_value = "none")]
    pub bound: Bound,
    #[arg(long, value_parser = parse_branch, default_value = "forward")]
    pub branch: Branch,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Draw the gait over the height function.
    #[arg(long)]
    pub overlay_heightfield: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Bound for an extra bounded reverse run, or `none`.
    #[arg(long, value_parser = parse_bound, default_value = "none")]
    pub bound: Bound,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound(pub Option<f64>);

fn parse_bound(s: &str) -> Result<Bound, String> {
    if s == "none" {
        return Ok(Bound(None));
    }
    match s.parse::<f64>() {
        Ok(b) if b > 0.0 && b.is_finite() => Ok(Bound(Some(b))),
        _ => Err(format!("expected a positive angle or `none`, got {s:?}")),
    }
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s {
        "forward" => Ok(Branch::Forward),
        "reverse" => Ok(Branch::Reverse),
        _ => Err(format!("expected forward or reverse, got {s:?}")),
    }
}

fn parse_component(s: &str) -> Result<Component, String> {
    s.parse().map_err(|e: gaitforge_core::GaitError| e.to_string())
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in window")))
        .collect::<Result<_, _>>()?;
    let w = match v.as_slice() {
        [h] if *h > 0.0 => Window::square(*h),
        [a, b, c, d] => Window { phi1: (*a, *b), phi2: (*c, *d) },
        _ => return Err(format!("window must be a positive half-width or four numbers, got {s:?}")),
    };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_forms() {
        assert_eq!(parse_window("3.2").unwrap(), Window::square(3.2));
        let w = parse_window("-1,2,-3,4").unwrap();
        assert_eq!((w.phi1, w.phi2), ((-1.0, 2.0), (-3.0, 4.0)));
        assert!(parse_window("1,2").is_err());
        assert!(parse_window("2,1,0,1").is_err());
        assert!(parse_window("-3").is_err());
    }

    #[test]
    fn bound_forms() {
        assert_eq!(parse_bound("none").unwrap(), Bound(None));
        assert_eq!(parse_bound("3.2").unwrap(), Bound(Some(3.2)));
        assert!(parse_bound("-1").is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
