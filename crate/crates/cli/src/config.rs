//! Command-line options shared by the solving subcommands, and the run
//! configuration embedded in every output.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gazecut::energy::{BorderPolicy, EnergyParams};
use gazecut::geometry::{cuboid_from_disparity_range, CuboidSpec, GazeWindow};
use gazecut::graphcut::{PushRelabelConfig, SolverConfig, SolverKind};
use gazecut::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    PushRelabel,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Window {
    Centered,
    InImage,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Left image (PPM).
    #[arg(long, required_unless_present = "synthetic")]
    pub left: Option<PathBuf>,
    /// Right image (PPM).
    #[arg(long, required_unless_present = "synthetic")]
    pub right: Option<PathBuf>,
    /// Right-view ground-truth disparity map (PGM, 0 = unknown).
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Ground-truth pixel value per unit of disparity.
    #[arg(long, default_value_t = 8)]
    pub gt_scale: u32,
    /// Generate a seeded synthetic scene of this size (`WxH`) instead of
    /// reading images; its ground truth is used unless --gt is given.
    #[arg(long, value_name = "WxH", conflicts_with_all = ["left", "right"])]
    pub synthetic: Option<String>,
    /// Seed for synthetic inputs.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 10)]
    pub dis_min: i64,
    #[arg(long, default_value_t = 28)]
    pub dis_max: i64,
    /// Extra depth numbers on each side of the disparity range.
    #[arg(long, default_value_t = 7)]
    pub margin: i64,
    #[arg(long, value_enum, default_value_t = Window::Centered)]
    pub window: Window,
    /// Explicit cuboid `g_min,g_extent,y_min,y_extent,d_min,d_extent`;
    /// overrides the disparity range.
    #[arg(long, value_name = "G0,G,Y0,Y,D0,M")]
    pub cuboid: Option<String>,
    /// Explicit offsets `lw,rw,h` with extents `G,Y,M`; overrides the
    /// disparity range.
    #[arg(long, value_name = "LW,RW,H", requires = "extents", conflicts_with = "cuboid")]
    pub offsets: Option<String>,
    #[arg(long, value_name = "G,Y,M")]
    pub extents: Option<String>,
    /// Data cost for cross points outside the images: `clamp` or an integer.
    #[arg(long, default_value = "clamp")]
    pub border: String,
    #[arg(long, default_value_t = 14)]
    pub penalty: i64,
    #[arg(long, default_value_t = 1023)]
    pub inhibit: i64,
    /// Forbid neighbor depth steps beyond one.
    #[arg(long)]
    pub hard_inhibit: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Solver::PushRelabel)]
    pub solver: Solver,
    /// Push-relabel discharge rounds per global relabel.
    #[arg(long, default_value_t = PushRelabelConfig::default().rounds_per_sweep)]
    pub rounds_per_sweep: usize,
    /// Unconfined rounds before block confinement (level 2).
    #[arg(long, default_value_t = PushRelabelConfig::default().wave_rounds)]
    pub wave_rounds: usize,
    #[arg(long, default_value_t = PushRelabelConfig::default().max_sweeps)]
    pub max_sweeps: usize,
    /// Skip the chain saturation warm start.
    #[arg(long)]
    pub no_chain_init: bool,
    /// Skin radius in blocks for levels 1 and 2.
    #[arg(long, default_value_t = 1)]
    pub skin_radius: usize,
    /// Worker threads for cost evaluation (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Include wall times in outputs (makes them run-dependent).
    #[arg(long)]
    pub timings: bool,
}

fn ints(text: &str, n: usize, what: &str) -> Result<Vec<i64>> {
    let v: Vec<i64> = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("{what}: expected {n} comma-separated integers, got '{text}'")))?;
    if v.len() != n {
        return Err(Error::Config(format!("{what}: expected {n} integers, got {}", v.len())));
    }
    Ok(v)
}

pub fn parse_size(text: &str) -> Result<(usize, usize)> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Config(format!("size '{text}' is not WxH")))?;
    let parse = |s: &str| s.parse::<usize>().ok().filter(|&v| v > 0);
    match (parse(w), parse(h)) {
        (Some(w), Some(h)) => Ok((w, h)),
        _ => Err(Error::Config(format!("size '{text}' is not WxH"))),
    }
}

impl ModelArgs {
    pub fn params(&self) -> Result<EnergyParams> {
        let p = EnergyParams {
            penalty: self.penalty,
            inhibit: self.inhibit,
            hard_inhibit: self.hard_inhibit,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn border(&self) -> Result<BorderPolicy> {
        match self.border.as_str() {
            "clamp" => Ok(BorderPolicy::Clamp),
            s => s
                .parse::<i64>()
                .ok()
                .filter(|&c| c >= 0)
                .map(BorderPolicy::Constant)
                .ok_or_else(|| Error::Config(format!("--border must be 'clamp' or a non-negative integer, got '{s}'"))),
        }
    }

    pub fn cuboid(&self, width: usize, height: usize) -> Result<CuboidSpec> {
        let (w, h) = (width as i64, height as i64);
        if let Some(c) = &self.cuboid {
            let v = ints(c, 6, "--cuboid")?;
            return CuboidSpec::new(w, h, (v[0], v[1]), (v[2], v[3]), (v[4], v[5]));
        }
        if let Some(o) = &self.offsets {
            let o = ints(o, 3, "--offsets")?;
            let e = ints(self.extents.as_deref().unwrap_or(""), 3, "--extents")?;
            return CuboidSpec::from_offsets(w, h, (e[0], e[1], e[2]), o[0], o[1], o[2]);
        }
        let window = match self.window {
            Window::Centered => GazeWindow::Centered,
            Window::InImage => GazeWindow::InImage,
        };
        cuboid_from_disparity_range(w, h, self.dis_min, self.dis_max, self.margin, window)
    }
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            kind: match self.solver {
                Solver::PushRelabel => SolverKind::PushRelabel,
                Solver::Reference => SolverKind::Reference,
            },
            push_relabel: PushRelabelConfig {
                rounds_per_sweep: self.rounds_per_sweep,
                wave_rounds: self.wave_rounds,
                max_sweeps: self.max_sweeps,
            },
            chain_init: !self.no_chain_init,
        }
    }
}

/// Ordered `key=value` pairs describing a run.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn from_args(command: &str, input: &InputArgs, model: &ModelArgs, solver: &SolverArgs, cuboid: &CuboidSpec) -> Self {
        let mut rc = RunConfig::default();
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        rc.push("command", command);
        rc.push("left", path(&input.left));
        rc.push("right", path(&input.right));
        rc.push("gt", path(&input.gt));
        rc.push("gt_scale", input.gt_scale);
        rc.push("synthetic", input.synthetic.as_deref().unwrap_or("-"));
        rc.push("seed", input.seed);
        rc.push("dis_min", model.dis_min);
        rc.push("dis_max", model.dis_max);
        rc.push("margin", model.margin);
        rc.push(
            "cuboid",
            format!(
                "{},{},{},{},{},{}",
                cuboid.g_min, cuboid.g_extent, cuboid.y_min, cuboid.y_extent, cuboid.d_min, cuboid.d_extent
            ),
        );
        let o = cuboid.offsets();
        rc.push("offsets", format!("{},{},{}", o.lw_offset, o.rw_offset, o.h_offset));
        rc.push("border", &model.border);
        rc.push("penalty", model.penalty);
        rc.push("inhibit", model.inhibit);
        rc.push("hard_inhibit", model.hard_inhibit);
        rc.push("solver", format!("{:?}", solver.solver));
        rc.push("rounds_per_sweep", solver.rounds_per_sweep);
        rc.push("wave_rounds", solver.wave_rounds);
        rc.push("max_sweeps", solver.max_sweeps);
        rc.push("chain_init", !solver.no_chain_init);
        rc.push("skin_radius", solver.skin_radius);
        rc.push("threads", solver.threads);
        rc
    }

    pub fn comments(&self) -> Vec<String> {
        self.entries.iter().map(|(k, v)| format!("{k}={v}")).collect()
    }

    pub fn to_text(&self) -> String {
        self.comments().iter().map(|c| format!("# {c}\n")).collect()
    }
}
