use lis_hwi::{
    array_gain_closed, array_gain_quadrature, capacity, dzeta_da, effective_noise,
    effective_noise_exact, estimate_effective_noise, snr_loss, snr_loss_low_beta, split_capacity,
    turning_point, Config, Geometry, Hwi, McSettings, NoiseMethod, Quad, Report, Split,
};

use crate::args::{
    CapacityArgs, Common, Domain, McArgs, PointArgs, SnrLossArgs, SplitArgs, SweepVar, TurningArgs,
};
use crate::output::{Cell, Table};
use crate::CliError;

/// A rendered table and the exit code it should finish with.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub code: i32,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, code: 0 }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct Setup {
    cfg: Config,
    model: Hwi,
    method: NoiseMethod,
    quad: Quad,
}

fn setup(c: &Common) -> Result<Setup, CliError> {
    if !(c.quad_tol > 0.0 && c.quad_tol < 1.0) {
        return Err(usage(format!(
            "--quad-tol must lie in (0, 1), got {}",
            c.quad_tol
        )));
    }
    let defaults = Quad::default();
    Ok(Setup {
        cfg: Config::from_db(c.power_db, c.n0, c.z0, c.wavelength)?,
        model: Hwi::new(c.alpha, c.beta)?,
        method: c.method.into(),
        quad: Quad::new(defaults.abs_tol, c.quad_tol, defaults.max_depth)?,
    })
}

/// Grid of `steps` points from `lo` to `hi`, both included.
pub fn sweep_points(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(usage(format!("--steps must be at least 2, got {steps}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(usage(format!("need finite --lo < --hi, got {lo} and {hi}")));
    }
    if log && lo <= 0.0 {
        return Err(usage("--log needs --lo > 0"));
    }
    let last = (steps - 1) as f64;
    let mut points: Vec<f64> = (0..steps)
        .map(|i| {
            let t = i as f64 / last;
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect();
    points[0] = lo;
    points[steps - 1] = hi;
    Ok(points)
}

fn geometry(var: SweepVar, value: f64, z0: f64) -> Result<Geometry, CliError> {
    Ok(match var {
        SweepVar::HalfLength => Geometry::new(value, z0)?,
        SweepVar::Area => Geometry::from_area(value, z0)?,
        SweepVar::Tau => Geometry::from_tau(value, z0)?,
        SweepVar::MUnits => return Err(usage("--var m-units is only valid for split")),
    })
}

impl Domain {
    fn point(&self, z0: f64) -> Result<Option<Geometry>, CliError> {
        let given = [
            (SweepVar::HalfLength, self.half_length),
            (SweepVar::Area, self.area),
            (SweepVar::Tau, self.tau),
        ];
        let mut set = given.iter().filter_map(|(v, x)| x.map(|x| (*v, x)));
        let first = set.next();
        if set.next().is_some() {
            return Err(usage("give only one of --half-length, --area, --tau"));
        }
        first.map(|(v, x)| geometry(v, x, z0)).transpose()
    }

    fn range(&self) -> Result<Vec<f64>, CliError> {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => sweep_points(lo, hi, self.steps, self.log),
            _ => Err(usage(
                "need a surface (--half-length, --area or --tau) or a sweep (--lo and --hi)",
            )),
        }
    }

    fn has_range(&self) -> bool {
        self.lo.is_some() || self.hi.is_some()
    }

    /// Single point or ascending sweep.
    pub fn geometries(&self, z0: f64) -> Result<Vec<Geometry>, CliError> {
        if let Some(g) = self.point(z0)? {
            if self.has_range() {
                return Err(usage("a single surface cannot be combined with --lo/--hi"));
            }
            return Ok(vec![g]);
        }
        self.range()?
            .into_iter()
            .map(|x| geometry(self.var, x, z0))
            .collect()
    }

    fn single(&self, z0: f64) -> Result<Geometry, CliError> {
        match self.point(z0)? {
            Some(g) if !self.has_range() => Ok(g),
            _ => Err(usage("need exactly one of --half-length, --area, --tau")),
        }
    }
}

fn geometry_cells(g: &Geometry) -> [Cell; 3] {
    [
        Cell::Num(g.half_length()),
        Cell::Num(g.tau()),
        Cell::Num(g.area()),
    ]
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

const REPORT_COLUMNS: [&str; 10] = [
    "A",
    "tau",
    "area",
    "zeta",
    "n_eff",
    "sigma",
    "sigma_db",
    "capacity_nat",
    "utility",
    "gamma0",
];

fn report_cells(r: &Report) -> Vec<Cell> {
    let mut row = geometry_cells(&r.geometry).to_vec();
    row.extend([
        Cell::Num(r.zeta),
        Cell::Num(r.noise.total),
        Cell::Num(r.sigma),
        Cell::Num(db(r.sigma)),
        Cell::Num(r.capacity_nat),
        Cell::Num(r.utility),
        Cell::Num(r.utility_upper_bound),
    ]);
    row
}

pub fn zeta(a: &PointArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let mut table = Table::new(vec![
        "A",
        "tau",
        "area",
        "zeta",
        "zeta_quadrature",
        "quadrature_error",
        "dzeta_da",
    ]);
    for g in a.domain.geometries(s.cfg.z0)? {
        let q = array_gain_quadrature(&g, &s.cfg.user(), &s.quad)?;
        let mut row = geometry_cells(&g).to_vec();
        row.extend([
            Cell::Num(array_gain_closed(g.tau())),
            Cell::Num(q.value),
            Cell::Num(q.error_estimate),
            Cell::Num(dzeta_da(g.tau(), s.cfg.z0)),
        ]);
        table.push(row);
    }
    Ok(table.into())
}

pub fn noise(a: &PointArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let mut table = Table::new(vec![
        "A", "tau", "area", "n0", "hwi_term", "n_eff", "sigma", "sigma_db",
    ]);
    for g in a.domain.geometries(s.cfg.z0)? {
        let n = effective_noise(&s.cfg, &g, &s.model, s.method, &s.quad)?;
        let sigma = if s.cfg.n0 > 0.0 {
            n.total / s.cfg.n0
        } else {
            f64::INFINITY
        };
        let mut row = geometry_cells(&g).to_vec();
        row.extend([
            Cell::Num(n.n0),
            Cell::Num(n.hwi_term),
            Cell::Num(n.total),
            Cell::Num(sigma),
            Cell::Num(db(sigma)),
        ]);
        table.push(row);
    }
    Ok(table.into())
}

pub fn capacity_sweep(a: &CapacityArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let mut columns = REPORT_COLUMNS.to_vec();
    if a.bits {
        columns.push("capacity_bits");
    }
    let mut table = Table::new(columns);
    for g in a.domain.geometries(s.cfg.z0)? {
        let r = capacity(&s.cfg, &g, &s.model, s.method, &s.quad)?;
        let mut row = report_cells(&r);
        if a.bits {
            row.push(Cell::Num(r.capacity_bits()));
        }
        table.push(row);
    }
    Ok(table.into())
}

pub fn utility_sweep(a: &PointArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let mut columns = REPORT_COLUMNS.to_vec();
    columns.push("utility_area");
    let mut table = Table::new(columns);
    for g in a.domain.geometries(s.cfg.z0)? {
        let r = capacity(&s.cfg, &g, &s.model, s.method, &s.quad)?;
        let mut row = report_cells(&r);
        row.push(Cell::Num(r.utility_area()));
        table.push(row);
    }
    Ok(table.into())
}

pub fn snr_loss_sweep(a: &SnrLossArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let mut columns = vec!["A", "tau", "area", "n_eff", "sigma", "sigma_db"];
    if a.low_beta {
        columns.extend(["sigma_low_beta", "sigma_low_beta_db"]);
    }
    let mut table = Table::new(columns);
    for g in a.domain.geometries(s.cfg.z0)? {
        let sigma = snr_loss(&s.cfg, &g, &s.model, s.method, &s.quad)?;
        let mut row = geometry_cells(&g).to_vec();
        row.extend([
            Cell::Num(sigma * s.cfg.n0),
            Cell::Num(sigma),
            Cell::Num(db(sigma)),
        ]);
        if a.low_beta {
            let low = snr_loss_low_beta(&s.cfg, &g, &s.model)?;
            row.extend([Cell::Num(low), Cell::Num(db(low))]);
        }
        table.push(row);
    }
    Ok(table.into())
}

pub fn turning(a: &TurningArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let tp = turning_point(&s.cfg, &s.model, s.method, (a.tau_lo, a.tau_hi), &s.quad)?;
    let table = Table::report(
        vec![
            "tau_star",
            "A_star",
            "area_star",
            "tau_lo",
            "tau_hi",
            "iterations",
            "converged",
        ],
        vec![
            Cell::Num(tp.tau_star),
            Cell::Num(tp.tau_star * s.cfg.z0),
            Cell::Num(tp.area_star),
            Cell::Num(tp.bracket.0),
            Cell::Num(tp.bracket.1),
            Cell::Int(tp.iterations as u64),
            Cell::Bool(tp.converged),
        ],
    );
    Ok(Outcome {
        code: if tp.converged { 0 } else { 2 },
        table,
    })
}

fn unit_counts(a: &SplitArgs) -> Result<Vec<u32>, CliError> {
    if a.domain.var != SweepVar::MUnits {
        if a.domain.has_range() {
            return Err(usage("split sweeps only over --var m-units"));
        }
        if a.m_units.is_empty() {
            return Err(usage("--m-units needs at least one value"));
        }
        return Ok(a.m_units.clone());
    }
    let points = a.domain.range()?;
    let mut counts: Vec<u32> = Vec::with_capacity(points.len());
    for x in points {
        let m = x.round();
        if (x - m).abs() > 1e-9 * m.max(1.0) || m < 1.0 || m > u32::MAX as f64 {
            return Err(usage(format!("m-units sweep hits a non-integer point {x}")));
        }
        counts.push(m as u32);
    }
    counts.dedup();
    Ok(counts)
}

pub fn split(a: &SplitArgs) -> Result<Outcome, CliError> {
    let s = setup(&a.common)?;
    let parent = match a.domain.point(s.cfg.z0)? {
        Some(g) => g,
        None => {
            return Err(usage(
                "split needs the parent surface: --half-length, --area or --tau",
            ))
        }
    };
    let mut columns = REPORT_COLUMNS.to_vec();
    columns.extend(["m_units", "hwi_term"]);
    let mut table = Table::new(columns);
    for m in unit_counts(a)? {
        let sc = Split::new(m, parent)?;
        let r = split_capacity(&s.cfg, &sc, &s.model)?;
        let mut row = report_cells(&r);
        row.extend([Cell::Int(m as u64), Cell::Num(r.noise.hwi_term)]);
        table.push(row);
    }
    Ok(table.into())
}

/// Acceptance band of the Monte-Carlo estimate: three standard errors, or
/// 1% of the reference when impairments are present, whichever is wider.
pub fn mc_tolerance(standard_error: f64, reference: f64, impaired: bool) -> f64 {
    let se = 3.0 * standard_error;
    if impaired {
        se.max(0.01 * reference)
    } else {
        se
    }
}

pub fn validate_mc(a: &McArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    let s = setup(c)?;
    let g = a.domain.single(s.cfg.z0)?;
    let settings = McSettings::new(c.trials, c.seed, c.resolution)?.with_symbol(a.symbol.into());
    let est = estimate_effective_noise(&s.cfg, &g, &s.model, &settings)?;
    let reference = effective_noise_exact(&s.cfg, &g, &s.model, &s.quad)?.total;
    let gap = est.noise_density_estimate - reference;
    let tolerance = mc_tolerance(est.standard_error, reference, !s.model.is_impairment_free());
    let pass = gap.abs() <= tolerance;
    let mut row = geometry_cells(&g).to_vec();
    row.extend([
        Cell::Int(c.trials as u64),
        Cell::Int(c.resolution as u64),
        Cell::Int(c.seed),
        Cell::Num(est.noise_density_estimate),
        Cell::Num(est.standard_error),
        Cell::Num(reference),
        Cell::Num(gap),
        Cell::Num(gap / reference),
        Cell::Num(tolerance),
        Cell::Num(est.discretized_density),
        Cell::Num(est.zeta_grid),
        Cell::Num(est.signal_power_estimate),
        Cell::Num(est.cross_covariance),
        Cell::Num(est.cross_covariance_se),
        Cell::Bool(pass),
    ]);
    let table = Table::report(
        vec![
            "A",
            "tau",
            "area",
            "trials",
            "resolution",
            "seed",
            "mc_estimate",
            "standard_error",
            "n_eff_exact",
            "gap",
            "relative_gap",
            "tolerance",
            "grid_density",
            "zeta_grid",
            "signal_power",
            "cross_covariance",
            "cross_covariance_se",
            "within_tolerance",
        ],
        row,
    );
    Ok(Outcome {
        table,
        code: if pass { 0 } else { 2 },
    })
}
