//! Declarative runs: a TOML config names the pipelines, each pipeline writes self-describing
//! artifacts, and a MANIFEST records hashes, constants and timing.

pub mod checks;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::admissible::ScheduleParams;
use crate::error::{Error, Result};
use crate::fourier::eval::{decay_scan, geometric_grid, max_table_diff, read_decay_csv, write_decay_csv};
use crate::fourier::normality::{normality_diagnostics, NormalityInput};
use crate::geometry::{ball_condition_scan, AlphaPolicy, BallScanOptions};
use crate::ledger::{self, Constants};
use crate::measure::{fmt17, MeasureTree, SigmaRule, Snapshot};
use crate::profile::{exactness_scan, ApproxProfile};

pub const ARTIFACT_SCHEMA: u32 = 1;
pub const MANIFEST: &str = "MANIFEST.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Build,
    VerifyGeometry,
    VerifyFourier,
    ScanBalls,
    DecayScan,
    Exactness,
    Sample,
    Normality,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Build => "build",
            Pipeline::VerifyGeometry => "verify-geometry",
            Pipeline::VerifyFourier => "verify-fourier",
            Pipeline::ScanBalls => "scan-balls",
            Pipeline::DecayScan => "decay-scan",
            Pipeline::Exactness => "exactness",
            Pipeline::Sample => "sample",
            Pipeline::Normality => "normality",
        }
    }

    fn needs_seed(self) -> bool {
        !matches!(self, Pipeline::Build | Pipeline::DecayScan)
    }

    /// Artifact file written by the pipeline.
    pub fn artifact(self) -> &'static str {
        match self {
            Pipeline::Build => "snapshot.json",
            Pipeline::VerifyGeometry => "geometry.json",
            Pipeline::VerifyFourier => "fourier.json",
            Pipeline::ScanBalls => "balls.json",
            Pipeline::DecayScan => "decay.csv",
            Pipeline::Exactness => "exactness.json",
            Pipeline::Sample => "samples.csv",
            Pipeline::Normality => "normality.json",
        }
    }
}

/// Overrides applied on top of the desk schedule parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    pub n: Option<u32>,
    pub m: Option<usize>,
    pub j_blocks: Option<usize>,
    pub epsilon: Option<f64>,
    pub depth_budget: Option<usize>,
    pub min_thinned_mass: Option<f64>,
    pub eta_ratio: Option<f64>,
    pub sigma_rule: Option<SigmaRule>,
    pub enum_budget: Option<usize>,
}

impl ScheduleOverrides {
    pub fn params(&self) -> ScheduleParams {
        let mut p = ScheduleParams::desk();
        p.n = self.n.unwrap_or(p.n);
        p.m = self.m.unwrap_or(p.m);
        p.j_blocks = self.j_blocks.unwrap_or(p.j_blocks);
        p.epsilon = self.epsilon.unwrap_or(p.epsilon);
        p.depth_budget = self.depth_budget.unwrap_or(p.depth_budget);
        p.min_thinned_mass = self.min_thinned_mass.unwrap_or(p.min_thinned_mass);
        p.eta_ratio = self.eta_ratio.unwrap_or(p.eta_ratio);
        p.sigma_rule = self.sigma_rule.unwrap_or(p.sigma_rule);
        p.enum_budget = self.enum_budget.unwrap_or(p.enum_budget);
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildOptions {
    pub depth: usize,
    pub node_limit: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { depth: 12, node_limit: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub encoding_samples: usize,
    pub growth_samples: usize,
    pub vdc_count: u64,
    pub qr_count: u64,
    pub m2_max_members: usize,
    pub diag_boxes: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { encoding_samples: 200, growth_samples: 100, vdc_count: 200, qr_count: 20, m2_max_members: 10, diag_boxes: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallOptions {
    pub depth: usize,
    pub ln_widths: Vec<f64>,
    pub windows_per_width: usize,
    /// Extra elements past the second exceptional level for exponent paths.
    pub path_extra: usize,
    pub paths: usize,
    pub min_prefix: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { depth: 18, ln_widths: vec![-2.0, -4.0, -8.0, -12.0, -16.0], windows_per_width: 20, path_extra: 3, paths: 20, min_prefix: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayOptions {
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
    pub target: f64,
    pub max_depth: usize,
    pub node_limit: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            xi_min: 1e2,
            xi_max: 1e5,
            points: 31,
            target: ledger::DECAY_TARGET,
            max_depth: ledger::DECAY_MAX_DEPTH,
            node_limit: 4_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactnessOptions {
    pub c: f64,
    pub q_threshold: u64,
    /// Elements drawn past the first exceptional quotient.
    pub extra_elements: usize,
    /// Largest denominator scanned; `None` means twice the continuant before `b_1`.
    pub q_max: Option<u64>,
}

impl Default for ExactnessOptions {
    fn default() -> Self {
        ExactnessOptions { c: 0.5, q_threshold: 1 << 20, extra_elements: 12, q_max: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleOptions {
    pub count: usize,
    /// Elements per sample; `None` means one past the first exceptional quotient.
    pub depth: Option<usize>,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { count: 1000, depth: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalityOptions {
    pub count: usize,
    pub bases: Vec<u32>,
    pub digits: usize,
    pub extra_elements: usize,
}

impl Default for NormalityOptions {
    fn default() -> Self {
        NormalityOptions { count: 200, bases: vec![2, 3, 10], digits: 20, extra_elements: 4 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormatOptions {
    pub pretty_json: bool,
}

/// One run, as read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub pipelines: Vec<Pipeline>,
    #[serde(default = "desk_psi")]
    pub psi: ApproxProfile,
    #[serde(default)]
    pub schedule: ScheduleOverrides,
    #[serde(default)]
    pub build: BuildOptions,
    #[serde(default)]
    pub verify: VerifyOptions,
    #[serde(default)]
    pub balls: BallOptions,
    #[serde(default)]
    pub decay: DecayOptions,
    #[serde(default)]
    pub exactness: ExactnessOptions,
    #[serde(default)]
    pub sample: SampleOptions,
    #[serde(default)]
    pub normality: NormalityOptions,
    #[serde(default)]
    pub format: FormatOptions,
}

fn desk_psi() -> ApproxProfile {
    ApproxProfile::power(2.5)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pipelines.is_empty() {
            return Err(Error::Config("no pipelines listed".into()));
        }
        if self.seed.is_none() {
            if let Some(p) = self.pipelines.iter().find(|p| p.needs_seed()) {
                return Err(Error::Config(format!("pipeline {} samples and needs a seed", p.name())));
            }
        }
        self.psi.validate_shape()?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form with the output directory left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let json = serde_json::to_string(&c).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config("seed required".into()))
    }

    pub fn params(&self) -> ScheduleParams {
        self.schedule.params()
    }

    pub fn tree(&self) -> Result<MeasureTree> {
        MeasureTree::build(&self.psi, &self.params())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex(&Sha256::digest(fs::read(path)?)))
}

/// JSON artifact wrapper.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub config_hash: String,
    pub kind: String,
    pub data: T,
}

fn csv_header(kind: &str, hash: &str) -> String {
    format!("cfmeasure {kind} schema={ARTIFACT_SCHEMA} config={hash}")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub config_hash: String,
    pub crate_version: String,
    pub snapshot_schema: u32,
    pub pipelines: Vec<Pipeline>,
    pub constants: Constants,
    /// Artifact name to SHA-256.
    pub artifacts: BTreeMap<String, String>,
    pub failures: Vec<String>,
    /// Seconds per pipeline; the only nondeterministic field.
    pub timing: BTreeMap<String, f64>,
}

impl Manifest {
    /// The manifest with timing removed.
    pub fn without_timing(&self) -> Manifest {
        Manifest { timing: BTreeMap::new(), ..self.clone() }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    dir: &'a Path,
    hash: String,
    tree: MeasureTree,
}

impl Ctx<'_> {
    fn write_json<T: Serialize>(&self, file: &str, kind: &str, data: &T) -> Result<()> {
        let env = Envelope { schema_version: ARTIFACT_SCHEMA, config_hash: self.hash.clone(), kind: kind.into(), data };
        let text = if self.cfg.format.pretty_json { serde_json::to_string_pretty(&env)? } else { serde_json::to_string(&env)? };
        fs::write(self.dir.join(file), text + "\n")?;
        Ok(())
    }
}

/// Outcome of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub dir: PathBuf,
}

/// Runs the configured pipelines in dependency order and writes the MANIFEST. A
/// verification failure stops nothing: remaining pipelines still run and the first
/// failure is returned after the MANIFEST is written.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    run_pipelines(cfg, &cfg.pipelines)
}

/// Same as [`run`] for an explicit list (the CLI subcommands use this).
pub fn run_pipelines(cfg: &RunConfig, pipelines: &[Pipeline]) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut list: Vec<Pipeline> = pipelines.to_vec();
    list.sort();
    list.dedup();
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    let tree = cfg.tree()?;
    let ctx = Ctx { cfg, dir: &dir, hash: cfg.hash(), tree };
    let mut timing = BTreeMap::new();
    let mut failures = Vec::new();
    let mut first_failure = None;
    for p in &list {
        let t0 = Instant::now();
        let r = match p {
            Pipeline::Build => build(&ctx),
            Pipeline::VerifyGeometry => verify_geometry(&ctx),
            Pipeline::VerifyFourier => verify_fourier(&ctx),
            Pipeline::ScanBalls => scan_balls(&ctx),
            Pipeline::DecayScan => decay(&ctx),
            Pipeline::Exactness => exactness(&ctx),
            Pipeline::Sample => sample(&ctx),
            Pipeline::Normality => normality(&ctx),
        };
        timing.insert(p.name().to_string(), t0.elapsed().as_secs_f64());
        match r {
            Ok(()) => {}
            Err(e @ Error::Verification(_)) => {
                failures.push(format!("{}: {e}", p.name()));
                first_failure.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    let mut artifacts = BTreeMap::new();
    for p in Pipeline::ALL {
        let path = dir.join(p.artifact());
        if path.exists() {
            artifacts.insert(p.artifact().to_string(), sha256_file(&path)?);
        }
    }
    let manifest = Manifest {
        schema_version: ARTIFACT_SCHEMA,
        config_hash: ctx.hash.clone(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        snapshot_schema: crate::measure::SNAPSHOT_SCHEMA,
        pipelines: list,
        constants: ledger::frozen(),
        artifacts,
        failures,
        timing,
    };
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)? + "\n")?;
    match first_failure {
        Some(e) => Err(e),
        None => Ok(RunOutcome { manifest, dir }),
    }
}

impl Pipeline {
    pub const ALL: [Pipeline; 8] = [
        Pipeline::Build,
        Pipeline::VerifyGeometry,
        Pipeline::VerifyFourier,
        Pipeline::ScanBalls,
        Pipeline::DecayScan,
        Pipeline::Exactness,
        Pipeline::Sample,
        Pipeline::Normality,
    ];
}

fn build(ctx: &Ctx) -> Result<()> {
    let o = &ctx.cfg.build;
    let snap = ctx.tree.snapshot(o.depth, o.node_limit, o.node_limit)?;
    ctx.write_json(Pipeline::Build.artifact(), "snapshot", &snap)
}

/// Reads a snapshot artifact, accepting either the wrapped or the bare form.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path)?;
    match serde_json::from_str::<Envelope<Snapshot>>(&text) {
        Ok(env) => Ok(env.data),
        Err(_) => Ok(serde_json::from_str(&text)?),
    }
}

#[derive(Serialize)]
struct GeometryArtifact {
    snapshot: checks::SnapshotCheck,
    encoding: checks::EncodingReport,
    partitions: Vec<checks::PartitionSummary>,
    /// Reported for information: at the desk configuration these fall short of the
    /// asymptotic requirements (see README).
    blocks: checks::BlockSummary,
    growth: checks::GrowthSummary,
    schedule_flags: Vec<String>,
}

fn verify_geometry(ctx: &Ctx) -> Result<()> {
    let path = ctx.dir.join(Pipeline::Build.artifact());
    if !path.exists() {
        build(ctx)?;
    }
    let snap = read_snapshot(&path)?;
    let snapshot = checks::verify_snapshot(&ctx.tree, &snap)?;
    let seed = ctx.cfg.seed()?;
    let sched = &ctx.tree.schedule;
    let o = &ctx.cfg.verify;
    let encoding = checks::encoding_check(&ctx.tree, o.encoding_samples, sched.j(1) + 4, seed)?;
    let growth = checks::growth_summary(&ctx.tree, o.growth_samples, sched.j(1) + 4, seed)?;
    let partitions = checks::partition_summaries(&ctx.tree, ledger::DESK_XI)?;
    let art = GeometryArtifact {
        snapshot,
        blocks: checks::block_summary(&ctx.tree),
        schedule_flags: sched.failed_checks().iter().map(|c| c.name.clone()).collect(),
        encoding,
        growth,
        partitions,
    };
    ctx.write_json(Pipeline::VerifyGeometry.artifact(), "geometry", &art)?;
    let e = &art.encoding;
    if e.exceptional_failures > 0 || e.typical_failures > 0 {
        return Err(Error::Verification(format!(
            "invariant encoding violated: {} exceptional and {} typical follow-ups fail",
            e.exceptional_failures, e.typical_failures
        )));
    }
    if let Some(p) = art.partitions.iter().find(|p| p.ratio_failures > 0) {
        return Err(Error::Verification(format!("invariant continuant-ratio violated at alpha = {}", p.alpha)));
    }
    Ok(())
}

#[derive(Serialize)]
struct FourierArtifact {
    vdc: checks::VdcSuite,
    m2: checks::M2Suite,
    qr: checks::QrSuite,
    qr_end_to_end: crate::fourier::qr::QrResult,
    diagnostics: Vec<crate::fourier::diag::ApproxErrorReport>,
}

/// Relative agreement required between the two `m2` computations.
pub const M2_REL_TOL: f64 = 1e-6;

fn verify_fourier(ctx: &Ctx) -> Result<()> {
    let seed = ctx.cfg.seed()?;
    let o = &ctx.cfg.verify;
    let consts = ledger::frozen();
    let art = FourierArtifact {
        vdc: checks::vdc_suite(seed, o.vdc_count, consts.vdc_stationary_k)?,
        m2: checks::m2_suite(&ctx.tree, &consts, o.m2_max_members)?,
        qr: checks::qr_suite(seed, o.qr_count)?,
        qr_end_to_end: checks::qr_end_to_end(&ctx.tree)?,
        diagnostics: checks::diag_suite(&ctx.tree, &consts, o.diag_boxes)?,
    };
    ctx.write_json(Pipeline::VerifyFourier.artifact(), "fourier", &art)?;
    let mut bad = Vec::new();
    if art.vdc.nonstationary_failures + art.vdc.stationary_failures > 0 {
        bad.push("vdc-bounds");
    }
    if art.m2.max_rel_diff > M2_REL_TOL || art.m2.pair_failures > 0 {
        bad.push("m2-decomposition");
    }
    if !art.m2.recovery.pass {
        bad.push("prefix-recovery");
    }
    if art.qr.passed != art.qr.instances || !art.qr_end_to_end.pass {
        bad.push("qr-combination");
    }
    if art.diagnostics.iter().any(|d| !d.weights_identical) {
        bad.push("relative-weights");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(format!("invariant {} violated", bad.join(", "))))
    }
}

#[derive(Serialize)]
struct BallArtifact {
    scan: crate::geometry::BallScan,
    beta_hat_frozen: f64,
    exponent_tol: f64,
}

fn scan_balls(ctx: &Ctx) -> Result<()> {
    let o = &ctx.cfg.balls;
    let opts = BallScanOptions {
        depth: o.depth,
        ln_widths: o.ln_widths.clone(),
        windows_per_width: o.windows_per_width,
        path_depth: ctx.tree.schedule.j(2) + o.path_extra,
        paths: o.paths,
        seed: ctx.cfg.seed()?,
        min_prefix: o.min_prefix,
    };
    let scan = ball_condition_scan(&ctx.tree, &opts)?;
    let c = ledger::frozen();
    let art = BallArtifact { scan, beta_hat_frozen: c.beta_hat, exponent_tol: c.exponent_tol };
    ctx.write_json(Pipeline::ScanBalls.artifact(), "balls", &art)?;
    if art.scan.split_identity_err != 0.0 {
        return Err(Error::Verification(format!(
            "invariant mass-split violated: error {:e}",
            art.scan.split_identity_err
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct DecaySummary {
    pub slope: Option<f64>,
    pub depth: usize,
    pub points: usize,
}

fn decay(ctx: &Ctx) -> Result<()> {
    let o = &ctx.cfg.decay;
    let grid = geometric_grid(o.xi_min, o.xi_max, o.points);
    let scan = decay_scan(&ctx.tree, &grid, AlphaPolicy::Adaptive, o.target, o.max_depth, o.node_limit)?;
    let f = fs::File::create(ctx.dir.join(Pipeline::DecayScan.artifact()))?;
    write_decay_csv(std::io::BufWriter::new(f), &csv_header("decay-scan", &ctx.hash), &scan.rows)?;
    ctx.write_json("decay_summary.json", "decay-summary", &DecaySummary { slope: scan.slope, depth: scan.depth, points: scan.rows.len() })
}

#[derive(Serialize)]
struct ExactnessArtifact {
    x: String,
    q_max: u64,
    c: f64,
    report: crate::profile::ExactnessReport,
}

fn exactness(ctx: &Ctx) -> Result<()> {
    let o = &ctx.cfg.exactness;
    let j1 = ctx.tree.schedule.j(1);
    let x = ctx.tree.sample(j1 + 1 + o.extra_elements, 1, ctx.cfg.seed()?)?.remove(0);
    let q_max = match o.q_max {
        Some(q) => q,
        None => {
            let k = x.prefixes()[j1 - 1].cf.k();
            2 * k.to_u64().ok_or_else(|| Error::Budget("continuant before b_1 exceeds u64".into()))?
        }
    };
    let report = exactness_scan(&x.cf, &ctx.tree.profile, o.c, q_max, o.q_threshold)?;
    let pass = report.verdict_upper && report.verdict_lower;
    let art = ExactnessArtifact { x: x.key(), q_max, c: o.c, report };
    ctx.write_json(Pipeline::Exactness.artifact(), "exactness", &art)?;
    if !pass {
        return Err(Error::Verification("invariant exact-order violated in the scanned range".into()));
    }
    Ok(())
}

fn sample_depth(ctx: &Ctx, depth: Option<usize>) -> usize {
    depth.unwrap_or(ctx.tree.schedule.j(1) + 2)
}

fn sample(ctx: &Ctx) -> Result<()> {
    let o = &ctx.cfg.sample;
    let depth = sample_depth(ctx, o.depth);
    let seqs = ctx.tree.sample(depth, o.count, ctx.cfg.seed()?)?;
    let f = fs::File::create(ctx.dir.join(Pipeline::Sample.artifact()))?;
    let mut w = std::io::BufWriter::new(f);
    use std::io::Write;
    writeln!(w, "# {}", csv_header("sample", &ctx.hash))?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["index", "key", "value", "ln_weight", "ln_cylinder_width"])?;
    for (i, s) in seqs.iter().enumerate() {
        c.write_record([
            i.to_string(),
            s.key(),
            fmt17(s.cf.value_f64()),
            fmt17(ctx.tree.ln_weight(s)?),
            fmt17(s.cf.ln_cylinder_width()),
        ])?;
    }
    c.flush()?;
    Ok(())
}

fn normality(ctx: &Ctx) -> Result<()> {
    let o = &ctx.cfg.normality;
    let depth = ctx.tree.schedule.j(1) + 1 + o.extra_elements;
    let seqs = ctx.tree.sample(depth, o.count, ctx.cfg.seed()?)?;
    let inputs: Vec<NormalityInput> = seqs.into_iter().map(|s| NormalityInput::Cylinder(s.cf)).collect();
    let reports = normality_diagnostics(&inputs, &o.bases, o.digits)?;
    ctx.write_json(Pipeline::Normality.artifact(), "normality", &reports)
}

/// Summary produced by [`report`].
#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    /// Artifacts the MANIFEST promises (or that a full run has) but that are absent.
    pub missing: Vec<String>,
    pub golden_max_diff: Option<f64>,
    pub golden_pass: Option<bool>,
}

/// Per-entry tolerance for golden decay comparisons.
pub const GOLDEN_TOL: f64 = 1e-9;

fn read_envelope(path: &Path) -> Result<Envelope<serde_json::Value>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Tabulates whatever artifacts `dir` holds; with `golden`, compares the decay table
/// against the reference table in that directory (or file).
pub fn report(dir: &Path, golden: Option<&Path>) -> Result<Report> {
    let mut t = String::new();
    let mut missing = Vec::new();
    let manifest: Option<Manifest> = match fs::read_to_string(dir.join(MANIFEST)) {
        Ok(s) => Some(serde_json::from_str(&s)?),
        Err(_) => None,
    };
    let expected: Vec<Pipeline> = match &manifest {
        Some(m) => {
            let _ = writeln!(t, "run {} (config {}, schema {})", dir.display(), &m.config_hash[..12], m.schema_version);
            for f in &m.failures {
                let _ = writeln!(t, "  FAILED {f}");
            }
            m.pipelines.clone()
        }
        None => {
            missing.push(MANIFEST.to_string());
            let _ = writeln!(t, "warning: no {MANIFEST} in {}; partial summary", dir.display());
            Pipeline::ALL.to_vec()
        }
    };
    for p in expected {
        let path = dir.join(p.artifact());
        if !path.exists() {
            missing.push(p.artifact().to_string());
            continue;
        }
        let _ = writeln!(t, "\n[{}]", p.name());
        match p {
            Pipeline::DecayScan => {
                let rows = read_decay_csv(&fs::read_to_string(&path)?)?;
                let xs: Vec<f64> = rows.iter().map(|r| r.xi.ln()).collect();
                let ys: Vec<f64> = rows.iter().map(|r| r.modulus.ln()).collect();
                let slope = crate::fourier::eval::fit_slope(&xs, &ys);
                let _ = writeln!(t, "  points {}  slope {}", rows.len(), slope.map_or("n/a".into(), |s| format!("{s:.6}")));
                let worst = rows.iter().map(|r| r.error_bound).fold(0.0, f64::max);
                let _ = writeln!(t, "  largest error bound {worst:.3e}");
            }
            Pipeline::Sample => {
                let n = fs::read_to_string(&path)?.lines().filter(|l| !l.starts_with('#')).count().saturating_sub(1);
                let _ = writeln!(t, "  samples {n}");
            }
            _ => summarize_json(&mut t, p, &read_envelope(&path)?.data),
        }
    }
    let (mut golden_max_diff, mut golden_pass) = (None, None);
    if let Some(g) = golden {
        let gpath = if g.is_dir() { g.join("golden_decay.csv") } else { g.to_path_buf() };
        let ours = dir.join(Pipeline::DecayScan.artifact());
        let _ = writeln!(t, "\n[golden]");
        if ours.exists() {
            let a = read_decay_csv(&fs::read_to_string(&ours)?)?;
            let b = read_decay_csv(&fs::read_to_string(&gpath)?)?;
            match max_table_diff(&a, &b) {
                Ok(d) => {
                    let _ = writeln!(t, "  decay table max |diff| {d:.3e} (tolerance {GOLDEN_TOL:e})");
                    golden_max_diff = Some(d);
                    golden_pass = Some(d <= GOLDEN_TOL);
                }
                Err(e) => {
                    let _ = writeln!(t, "  decay table mismatch: {e}");
                    golden_pass = Some(false);
                }
            }
        } else {
            let _ = writeln!(t, "  no decay table to compare");
            golden_pass = Some(false);
        }
    }
    if !missing.is_empty() {
        let _ = writeln!(t, "\nmissing: {}", missing.join(", "));
    }
    Ok(Report { text: t, missing, golden_max_diff, golden_pass })
}

fn summarize_json(t: &mut String, p: Pipeline, d: &serde_json::Value) {
    let g = |path: &str| d.pointer(path).cloned().unwrap_or(serde_json::Value::Null);
    let line = match p {
        Pipeline::Build => format!("  nodes {}  depth {}", g("/nodes").as_array().map_or(0, |a| a.len()), g("/depth")),
        Pipeline::VerifyGeometry => format!(
            "  snapshot nodes {}  exceptional follow-ups {} ({} fail)  typical {} ({} fail)\n  growth passed {}/{}  property (a) factor {}  thinned mass {}",
            g("/snapshot/nodes"),
            g("/encoding/exceptional_checked"),
            g("/encoding/exceptional_failures"),
            g("/encoding/typical_checked"),
            g("/encoding/typical_failures"),
            g("/growth/passed"),
            g("/growth/samples"),
            g("/blocks/property_a_factor"),
            g("/blocks/thinned_mass"),
        ),
        Pipeline::VerifyFourier => format!(
            "  vdc failures {}+{}  m2 max rel diff {}  qr {}/{}  end-to-end {}",
            g("/vdc/nonstationary_failures"),
            g("/vdc/stationary_failures"),
            g("/m2/max_rel_diff"),
            g("/qr/passed"),
            g("/qr/instances"),
            g("/qr_end_to_end/pass"),
        ),
        Pipeline::ScanBalls => {
            let kinds = g("/scan/kinds")
                .as_array()
                .map(|ks| {
                    ks.iter()
                        .map(|k| format!("{} {}", k["kind"].as_str().unwrap_or("?"), k["min_exponent"]))
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .unwrap_or_default();
            format!("  beta_hat {} (frozen {})  exponents: {kinds}", g("/scan/beta_hat"), g("/beta_hat_frozen"))
        }
        Pipeline::Exactness => format!(
            "  q_max {}  hits {}  upper {}  lower {}",
            g("/q_max"),
            g("/report/hits"),
            g("/report/verdict_upper"),
            g("/report/verdict_lower")
        ),
        Pipeline::Normality => d
            .as_array()
            .map(|bs| {
                bs.iter()
                    .map(|b| format!("  base {}: digit p {}  digraph p {}", b["base"], b["digit_chi2"]["p_value"], b["digraph_chi2"]["p_value"]))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
            .unwrap_or_default(),
        Pipeline::DecayScan | Pipeline::Sample => String::new(),
    };
    let _ = writeln!(t, "{line}");
}
