//! The scenarios: each drives the corresponding checks over a batch of seeds.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use riselab_core::lagrangian::{
    ac_modulus, action, comparison_check, d_chi, d_p, finiteness_bound, hardy_littlewood_sup_check,
    least_action_check, path_action, triangle_action_check,
};
use riselab_core::rearrange::merged_breakpoints;
use riselab_core::rise::{
    chord_sandwich_check, conservation_check, contraction_check, flat_compare, flat_compare_strong, monotone_approx,
    pythagoras_check, refinement_levels, rise, rise_of_path, triangle_hlp_check, MeetBound,
};
use riselab_core::toric::pushforward_measure;
use riselab_core::{
    rearrange, Check, ConvexPotential, FenchelFamily, FenchelMember, GeodesicPath, LagrangianSpec, SampledPath,
    StepFunction, WeightedSample, XGrid,
};

use crate::config::{LagrangianChoice, Scenario, ScenarioConfig};
use crate::error::{LabError, LabResult};
use crate::generate::{companion_seed, generate_instance, InstanceKind};
use crate::records::{read_potential, write_json, CheckRecord, PotentialRecord};
use crate::report::{write_report, Figure, RunReport, Series, ValueRecord};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "RISELAB_THREADS";
/// Times at which velocities are compared with the rise.
pub const CONSERVATION_TIMES: [f64; 3] = [0.25, 0.5, 0.75];
/// Pieces of the rectilinear comparison path.
pub const RECTILINEAR_PIECES: usize = 16;
/// Chord used by the chord sandwich.
pub const CHORD: (f64, f64) = (0.25, 0.75);
/// Durations over which norm actions must agree.
pub const DURATIONS: [f64; 3] = [0.5, 1.0, 2.0];
/// Largest instance checked by permutation enumeration.
pub const PERMUTATION_ATOMS: usize = 6;

/// `(σ, s)` probes for the meet bound: five values of `s` and five
/// fractions of each, away from any rational grid.
pub fn meet_probes() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(25);
    for j in 0..5 {
        let s = 0.14 + 0.17 * j as f64;
        for i in 0..5 {
            out.push((s * (0.1 + 0.2 * i as f64), s));
        }
    }
    out
}

/// The x grid used to compare velocities: the covering grid at half spacing.
pub fn velocity_grid(potentials: &[&ConvexPotential]) -> riselab_core::Result<XGrid> {
    let base = XGrid::covering(potentials)?;
    XGrid::new(base.dim(), base.r(), 2 * base.n())
}

/// Everything one seed contributes to a report.
#[derive(Debug, Default)]
struct SeedOutcome {
    checks: Vec<CheckRecord>,
    values: Vec<ValueRecord>,
    figures: Vec<Figure>,
    instances: Vec<ConvexPotential>,
}

impl SeedOutcome {
    fn check(&mut self, seed: u64, c: Check) {
        self.checks.push(CheckRecord::from_check(&c, seed));
    }

    fn named(&mut self, seed: u64, name: String, c: Check) {
        self.checks.push(CheckRecord::named(name, &c, seed));
    }

    fn value(&mut self, seed: u64, variant: impl Into<String>, value: f64, bound: f64, pass: bool) {
        self.values.push(ValueRecord { seed, variant: variant.into(), value, bound, pass });
    }
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    files: Vec<ConvexPotential>,
}

impl Context<'_> {
    fn instance(&self, seed: u64, kind: InstanceKind) -> riselab_core::Result<Vec<ConvexPotential>> {
        self.instance_at(seed, kind, self.config.grid)
    }

    fn instance_at(&self, seed: u64, kind: InstanceKind, m: usize) -> riselab_core::Result<Vec<ConvexPotential>> {
        if !self.files.is_empty() {
            return Ok(self.files.clone());
        }
        generate_instance(seed, self.config.dim, m, kind)
    }

    fn kind(&self, seed: u64) -> InstanceKind {
        self.config.kind.for_seed(seed)
    }

    /// A third potential independent of the pair drawn for `seed`.
    fn third(&self, seed: u64) -> riselab_core::Result<ConvexPotential> {
        if self.files.len() >= 3 {
            return Ok(self.files[2].clone());
        }
        let kind = self.kind(seed);
        Ok(generate_instance(companion_seed(seed, 1), self.config.dim, self.config.grid, kind)?.remove(0))
    }
}

fn threads() -> LabResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(LabError::Config(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Runs a validated configuration without touching the file system beyond
/// reading potential files.
pub fn run(config: &ScenarioConfig) -> LabResult<RunReport> {
    Ok(run_collect(config)?.0)
}

type Instances = Vec<(u64, Vec<ConvexPotential>)>;

fn run_collect(config: &ScenarioConfig) -> LabResult<(RunReport, Instances)> {
    let scenario = config.validate()?;
    let files = config.potentials.iter().map(|p| read_potential(p)).collect::<LabResult<Vec<_>>>()?;
    if let Some(p) = files.iter().find(|p| p.polytope().dim() != config.dim) {
        return Err(LabError::Config(format!(
            "potential files have dimension {}, configuration says {}",
            p.polytope().dim(),
            config.dim
        )));
    }
    let seeds: Vec<u64> = if files.is_empty() {
        (0..config.seeds).map(|k| config.base_seed.wrapping_add(k)).collect()
    } else {
        vec![config.base_seed]
    };
    let ctx = Context { config, files };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads()?)
        .build()
        .map_err(|e| LabError::Config(format!("worker pool: {e}")))?;
    // `collect` keeps seed order whatever order the workers finish in
    let outcomes: Vec<(u64, SeedOutcome)> =
        pool.install(|| seeds.par_iter().map(|&seed| (seed, run_seed(&ctx, scenario, seed))).collect());

    let mut report = RunReport::new(scenario);
    let mut instances = Vec::new();
    for (k, (seed, outcome)) in outcomes.into_iter().enumerate() {
        report.checks.extend(outcome.checks);
        report.values.extend(outcome.values);
        if k == 0 {
            report.figures = outcome.figures;
        }
        instances.push((seed, outcome.instances));
    }
    Ok((report, instances))
}

/// Runs a configuration and writes every artifact to its output directory.
pub fn execute(config: &ScenarioConfig) -> LabResult<RunReport> {
    let (report, instances) = run_collect(config)?;
    let dir = config.out.as_path();
    write_report(&report, config, dir)?;
    if config.write_instances {
        write_instances(dir, &instances)?;
    }
    Ok(report)
}

fn write_instances(dir: &Path, instances: &Instances) -> LabResult<()> {
    let sub = dir.join("instances");
    std::fs::create_dir_all(&sub).map_err(|e| LabError::io(&sub, e))?;
    for (seed, pots) in instances {
        for (k, p) in pots.iter().enumerate() {
            write_json(&sub.join(format!("seed-{seed}-{k}.json")), &PotentialRecord::from(p))?;
        }
    }
    Ok(())
}

fn run_seed(ctx: &Context<'_>, scenario: Scenario, seed: u64) -> SeedOutcome {
    let mut out = SeedOutcome::default();
    let result = match scenario {
        Scenario::Conservation => conservation(ctx, seed, &mut out),
        Scenario::Pythagoras => pythagoras(ctx, seed, &mut out),
        Scenario::Triangle => triangle(ctx, seed, &mut out),
        Scenario::Contraction => contraction(ctx, seed, &mut out),
        Scenario::FlatCompare => flat(ctx, seed, &mut out),
        Scenario::MeetBound => meet_bound(ctx, seed, &mut out),
        Scenario::MonotoneApprox => monotone(ctx, seed, &mut out),
        Scenario::LeastAction => least_action(ctx, seed, &mut out),
        Scenario::MetricTable => metric_table(ctx, seed, &mut out),
        Scenario::LagrangianStructure => lagrangian_structure(ctx, seed, &mut out),
        Scenario::ExploratoryStrongTriangle => strong_triangle(ctx, seed, &mut out),
    };
    if let Err(e) = result {
        // a numerical failure counts against the seed rather than aborting the batch
        eprintln!("{scenario} seed {seed}: {e}");
        out.checks.push(CheckRecord {
            check: format!("{scenario}/error"),
            seed,
            max_violation: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
        });
    }
    out
}

type Step = riselab_core::Result<()>;

fn flat_scale(u: &ConvexPotential, grid: &XGrid) -> f64 {
    u.polytope().diameter() * grid.spacing()
}

fn conservation(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let c = ctx.config;
    let tol = c.tolerances.conservation;
    let pots = ctx.instance(seed, InstanceKind::Smooth)?;
    let grid = velocity_grid(&[&pots[0], &pots[1]])?;
    let path = GeodesicPath::new(pots[0].clone(), pots[1].clone())?;
    let h = pots[0].polytope().h();
    let report = conservation_check(&path, &CONSERVATION_TIMES, c.dt, &grid)?;
    out.check(seed, report.check(tol * (h + c.dt)));

    let target = rise_of_path(&path)?;
    let velocity = path.velocity_finite_difference(0.5, c.dt, &grid)?;
    let observed = rearrange(&pushforward_measure(&path.at(0.5)?, &velocity)?);
    out.figures.push(Figure {
        name: "conservation-profiles".into(),
        title: format!("seed {seed}: rise and rearranged velocity at t = 0.5"),
        x_label: "s".into(),
        series: vec![Series::step("rise", target.as_step()), Series::step("velocity", &observed)],
    });

    // refinement refines the time step with the grid: dt = h/8
    if !c.grid_sweep.is_empty() && ctx.files.is_empty() {
        let mut curve = Vec::new();
        let mut previous: Option<f64> = None;
        let mut decrease = Check::new("conservation/refinement", 0.0);
        for &m in &c.grid_sweep {
            let pots = ctx.instance_at(seed, InstanceKind::Smooth, m)?;
            let grid = velocity_grid(&[&pots[0], &pots[1]])?;
            let path = GeodesicPath::new(pots[0].clone(), pots[1].clone())?;
            let hm = 1.0 / m as f64;
            let dt = hm / 8.0;
            let report = conservation_check(&path, &CONSERVATION_TIMES, dt, &grid)?;
            let dev = report.max_deviation();
            out.named(seed, format!("conservation/m={m}"), report.check(tol * (hm + dt)));
            if let Some(p) = previous {
                decrease.record(dev - p);
                if dev == p {
                    decrease.record(f64::MIN_POSITIVE);
                }
            }
            previous = Some(dev);
            curve.push((m as f64, dev));
        }
        out.check(seed, decrease);
        out.figures.push(Figure {
            name: "conservation-refinement".into(),
            title: format!("seed {seed}: sup deviation under refinement"),
            x_label: "m".into(),
            series: vec![Series { label: "deviation".into(), points: curve }],
        });
    }
    out.instances = pots;
    Ok(())
}

fn pythagoras(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let pots = ctx.instance(seed, ctx.kind(seed))?;
    out.check(seed, pythagoras_check(&pots[0], &pots[1], ctx.config.tolerances.identity)?);
    out.instances = pots;
    Ok(())
}

fn triangle(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let pots = ctx.instance(seed, InstanceKind::Triple)?;
    out.check(seed, triangle_hlp_check(&pots[0], &pots[1], &pots[2], ctx.config.tolerances.inequality)?);
    out.instances = pots;
    Ok(())
}

fn contraction(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let mut pots = ctx.instance(seed, InstanceKind::MonotonePair)?;
    let w = ctx.third(seed)?;
    out.check(seed, contraction_check(&pots[0], &pots[1], &w, ctx.config.tolerances.inequality)?);
    pots.truncate(2);
    pots.push(w);
    out.instances = pots;
    Ok(())
}

fn flat(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let t = &ctx.config.tolerances;
    let pots = ctx.instance(seed, ctx.kind(seed))?;
    let (u, v) = (&pots[0], &pots[1]);
    let grid = XGrid::covering(&[u, v])?;
    let scale = flat_scale(u, &grid);
    let cmp = flat_compare(u, v, &grid)?;
    out.check(seed, cmp.check(t.flat * scale)?);
    let path = GeodesicPath::new(u.clone(), v.clone())?;
    let (a, b) = CHORD;
    out.check(seed, chord_sandwich_check(&path, a, b, &grid, t.flat * scale / (b - a))?);

    let ordered = ctx.instance(companion_seed(seed, 3), InstanceKind::MonotonePair)?;
    if ordered[0].dominates(&ordered[1]) {
        let grid = XGrid::covering(&[&ordered[0], &ordered[1]])?;
        out.check(seed, flat_compare_strong(&ordered[0], &ordered[1], &grid, t.inequality)?);
    }
    out.figures.push(Figure {
        name: "flat-compare".into(),
        title: format!("seed {seed}: lower, rise, upper"),
        x_label: "s".into(),
        series: vec![
            Series::step("lower", &cmp.lower),
            Series::step("rise", cmp.rise.as_step()),
            Series::step("upper", &cmp.upper),
        ],
    });
    out.instances = pots;
    Ok(())
}

fn meet_bound(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let pots = ctx.instance(seed, InstanceKind::Triple)?;
    let grid = XGrid::covering(&[&pots[0], &pots[1], &pots[2]])?;
    let bound = MeetBound::new(&pots[0], &pots[1], &pots[2], &grid)?;
    out.check(seed, bound.check(&meet_probes(), ctx.config.tolerances.flat * flat_scale(&pots[0], &grid))?);
    out.instances = pots;
    Ok(())
}

fn monotone(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let t = &ctx.config.tolerances;
    let pots = ctx.instance(seed, ctx.kind(seed))?;
    let (u, v) = (&pots[0], &pots[1]);
    let levels = refinement_levels(u.polytope());
    // every plane except those of the finest level
    let k = levels[levels.len().saturating_sub(2)].max(2);
    let report = monotone_approx(u, v, k)?;
    out.check(seed, report.decay_check(t.identity));
    let slope = u.slope_bound().max(v.slope_bound());
    out.check(seed, report.final_check(t.monotone * slope * u.polytope().h()));
    let planes: Vec<f64> = report.planes.iter().map(|&j| j as f64).collect();
    let curve = |label: &str, ys: &[f64]| Series { label: label.into(), points: planes.iter().copied().zip(ys.iter().copied()).collect() };
    out.figures.push(Figure {
        name: "monotone-approx".into(),
        title: format!("seed {seed}: deviation against supporting planes"),
        x_label: "planes".into(),
        series: vec![
            curve("first side", &report.first_side),
            curve("second side", &report.second_side),
            curve("joint", &report.joint),
        ],
    });
    out.instances = pots;
    Ok(())
}

/// A decreasing weight on `(0, 1]` with one to four plateaus.
pub fn random_weight(rng: &mut impl Rng) -> riselab_core::Result<StepFunction> {
    let n = rng.gen_range(1..=4);
    let lengths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = lengths.iter().sum();
    let lengths: Vec<f64> = lengths.iter().map(|l| l / total).collect();
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    StepFunction::from_plateaus(&lengths, values)
}

/// A signed Fenchel family of one to three members on total mass `mass`.
pub fn random_fenchel(rng: &mut impl Rng, mass: f64) -> riselab_core::Result<LagrangianSpec> {
    let members = (0..rng.gen_range(1..=3))
        .map(|_| {
            let a = rng.gen_range(-1.0..1.0);
            let values = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(-2.0..2.0)).collect();
            Ok(FenchelMember { a, profile: WeightedSample::uniform(values, mass)? })
        })
        .collect::<riselab_core::Result<Vec<_>>>()?;
    Ok(LagrangianSpec::Fenchel(FenchelFamily::new(members)?))
}

fn lagrangian_for(choice: LagrangianChoice, rng: &mut impl Rng) -> riselab_core::Result<LagrangianSpec> {
    Ok(match choice {
        LagrangianChoice::Linear => LagrangianSpec::Weight(StepFunction::constant(1.0, 1.0)?),
        LagrangianChoice::RandomWeight => LagrangianSpec::Weight(random_weight(rng)?),
        LagrangianChoice::RandomFenchel => random_fenchel(rng, 1.0)?,
        LagrangianChoice::OrliczIntegral(y) => LagrangianSpec::OrliczIntegral(y),
        LagrangianChoice::OrliczNorm(y) => LagrangianSpec::OrliczNorm(y),
    })
}

fn least_action(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let t = &ctx.config.tolerances;
    let mut pots = ctx.instance(seed, ctx.kind(seed))?;
    pots.truncate(2);
    let w = ctx.third(seed)?;
    let (u, v) = (&pots[0], &pots[1]);
    let grid = XGrid::covering(&[u, v])?;
    let comparisons = [SampledPath::rectilinear(u, v, &grid, RECTILINEAR_PIECES)?, SampledPath::meet_detour(u, v)?];
    let geodesic = GeodesicPath::new(u.clone(), v.clone())?;
    let partition: Vec<f64> = (0..=RECTILINEAR_PIECES).map(|k| k as f64 / RECTILINEAR_PIECES as f64).collect();
    let sampled = SampledPath::geodesic(&geodesic, &partition)?;
    let mut rng = ChaCha8Rng::seed_from_u64(companion_seed(seed, 2));
    let choices = ctx.config.lagrangian_choices().expect("validated");
    for choice in choices {
        let label = choice.label();
        let spec = lagrangian_for(choice, &mut rng)?;
        let check = least_action_check(&spec, u, v, &comparisons, t.inequality)?;
        out.named(seed, format!("least-action/{label}"), check);
        let best = action(&spec, u, v, 1.0)?.value;
        let cheapest = comparisons
            .iter()
            .map(|p| path_action(&spec, p))
            .collect::<riselab_core::Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        out.value(seed, label.clone(), best, cheapest, check.passed());

        let tri = triangle_action_check(&spec, u, &w, v, 0.4, 0.6, t.inequality)?;
        out.named(seed, format!("triangle-action/{label}"), tri);

        let mut split = Check::new("partition", t.identity * (1.0 + best.abs()));
        split.equal(path_action(&spec, &sampled)?, best);
        out.named(seed, format!("partition/{label}"), split);

        if let LagrangianSpec::OrliczNorm(_) = spec {
            let mut same = Check::new("duration", t.inequality);
            for d in DURATIONS {
                same.equal(action(&spec, u, v, d)?.value, best);
            }
            out.named(seed, format!("duration/{label}"), same);
        }
    }
    pots.push(w);
    out.instances = pots;
    Ok(())
}

fn metric_table(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let c = ctx.config;
    let t = &c.tolerances;
    let mut pots = ctx.instance(seed, ctx.kind(seed))?;
    if let Some(shift) = c.shift {
        pots[1] = pots[0].lowered(shift);
    }
    let (u, v) = (&pots[0], &pots[1]);
    for &p in &c.p {
        let (there, back) = (d_p(u, v, p)?, d_p(v, u, p)?);
        let mut sym = Check::new("symmetry", t.identity * (1.0 + there));
        sym.equal(there, back);
        out.named(seed, format!("d_p/{p}/symmetry"), sym);
        let bound = match c.shift {
            Some(shift) => {
                let mut exact = Check::new("shift", t.identity * (1.0 + shift.abs()));
                exact.equal(there, shift.abs());
                out.named(seed, format!("d_p/{p}/shift"), exact);
                shift.abs()
            }
            None => back,
        };
        out.value(seed, format!("d_p:{p}"), there, bound, sym.passed());
    }
    for chi in c.radial_weights().expect("validated") {
        let (there, back) = (d_chi(u, v, chi)?, d_chi(v, u, chi)?);
        let mut sym = Check::new("symmetry", t.identity * (1.0 + there));
        sym.equal(there, back);
        out.named(seed, format!("d_chi/{}/symmetry", chi.name()), sym);
        out.value(seed, format!("d_chi:{}", chi.name()), there, back, sym.passed());
    }
    let r = rise(u, v)?;
    out.figures.push(Figure {
        name: "rise".into(),
        title: format!("seed {seed}: rise"),
        x_label: "s".into(),
        series: vec![Series::step("rise", r.as_step())],
    });
    out.instances = pots;
    Ok(())
}

fn lagrangian_structure(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let t = &ctx.config.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // the rearrangement formula against enumeration, every size up to six atoms
    let mut sup = Check::new("hardy-littlewood-sup", t.identity);
    for n in 1..=PERMUTATION_ATOMS {
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let xi = WeightedSample::uniform(xi, 1.0)?;
        let f = WeightedSample::uniform(f, 1.0)?;
        let c = hardy_littlewood_sup_check(&xi, &f, t.identity)?;
        sup.record(c.max_violation);
    }
    out.check(seed, sup);

    // the derived Lagrangians on a weighted sample
    let n = rng.gen_range(1..=8);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let xi = WeightedSample::new(values, weights)?;
    let spec = random_fenchel(&mut rng, xi.total_mass())?;
    out.check(seed, comparison_check(&spec, &xi, t.inequality)?);

    // the modulus decreases to L(0) as δ shrinks
    let lambda = rng.gen_range(0.5..4.0);
    let LagrangianSpec::Fenchel(fam) = &spec else { unreachable!() };
    let peak = fam
        .members()
        .iter()
        .flat_map(|m| m.profile.values().iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let mut decay = Check::new("ac-modulus", t.identity);
    let mass = xi.total_mass();
    let mut delta = mass;
    let mut previous = ac_modulus(&spec, lambda, delta)?;
    let mut full = Check::new("ac-modulus/full", t.identity * (1.0 + previous.abs()));
    full.equal(previous, finiteness_bound(&spec, lambda)?);
    out.check(seed, full);
    for _ in 0..20 {
        delta *= 0.5;
        let c = ac_modulus(&spec, lambda, delta)?;
        decay.le(c, previous);
        previous = c;
    }
    decay.le(previous - fam.offset(), lambda * peak * delta);
    out.check(seed, decay);
    out.value(seed, spec.name(), previous, fam.offset(), decay.passed());
    Ok(())
}

/// `∫₀^λ (ρ[u,v] + ρ[v,w] − ρ[u,w])` at every merged breakpoint; only
/// recorded, never judged.
fn strong_triangle(ctx: &Context<'_>, seed: u64, out: &mut SeedOutcome) -> Step {
    let pots = ctx.instance(seed, InstanceKind::Triple)?;
    let (uv, vw, uw) = (rise(&pots[0], &pots[1])?, rise(&pots[1], &pots[2])?, rise(&pots[0], &pots[2])?);
    let cuts = merged_breakpoints(&[uv.as_step(), vw.as_step(), uw.as_step()]);
    let mut running = 0.0;
    let mut lowest: f64 = 0.0;
    let mut negative_mass = 0.0;
    let mut curve = vec![(0.0, 0.0)];
    for w in cuts.windows(2) {
        let s = 0.5 * (w[0] + w[1]);
        let g = uv.eval(s)? + vw.eval(s)? - uw.eval(s)?;
        running += g * (w[1] - w[0]);
        if g < 0.0 {
            negative_mass += -g * (w[1] - w[0]);
        }
        lowest = lowest.min(running);
        curve.push((w[1], running));
    }
    let mut c = Check::new("strong-triangle", ctx.config.tolerances.inequality);
    c.record(-lowest);
    out.check(seed, c);
    out.value(seed, "min-partial-integral", lowest, 0.0, c.passed());
    out.value(seed, "negative-part-mass", negative_mass, f64::INFINITY, true);
    out.figures.push(Figure {
        name: "strong-triangle".into(),
        title: format!("seed {seed}: partial integrals of the triangle defect"),
        x_label: "lambda".into(),
        series: vec![Series { label: "integral".into(), points: curve }],
    });
    out.instances = pots;
    Ok(())
}
