//! Configuration files, command dispatch, and JSON/CSV reports.
//!
//! A run is fully determined by its [`AnalysisConfig`]: the same config and
//! tool version produce a byte-identical report. Wall-clock timings are
//! opt-in because they would break that.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use toml::Spanned;

use crate::analysis::{
    approximant, cluster_set, distance_at, extract_limit_point, is_ideal_convergent,
    istar_witness, Convergence, ExtractionReport, WitnessOutcome,
};
use crate::grammar::parse_sequence;
use crate::ideal::{IdealError, IdealKind, IdealModel, MembershipEvidence};
use crate::lab::{
    charge_of, choquet, choquet_riemann, decompose_difference, decomposition_uniqueness_probe,
    norm_identity_check, representation_check, scaled_decomposition, sl_diameter, sl_membership,
    sl_vertices, value_range, FiniteCapacity, FiniteFunctional, GroundSet, ALGEBRAIC_TOL,
};
use crate::seqset::SequenceSpec;
use crate::validate::{self, DEFAULT_SEED};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "ideal-lim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MIN_HORIZON: u64 = 64;
pub const DEFAULT_APPROXIMANTS: u32 = 3;
pub const DEFAULT_MAX_STAGES: u32 = 20;
pub const DEFAULT_RIEMANN_STEP: f64 = 1e-4;

/// A config problem at a 1-based line and column. Command-line overrides
/// report line 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Located {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Located {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub errors: Vec<Located>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Analyze,
    Extract,
    Lab,
    Validate,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Analyze => "analyze",
            CommandKind::Extract => "extract",
            CommandKind::Lab => "lab",
            CommandKind::Validate => "validate",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Analyze, Self::Extract, Self::Lab, Self::Validate]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Membership tolerance for every ideal decision.
    pub membership: f64,
    /// Bisection stopping width, relative to the sequence bound.
    pub resolution: f64,
    /// Cluster grid spacing and neighborhood radius.
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceInput {
    /// Text as written in the config.
    pub source: String,
    pub canonical: SequenceSpec,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeOptions {
    pub approximants: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractOptions {
    /// Target points; `None` extracts every cluster candidate.
    pub etas: Option<Vec<f64>>,
    pub max_stages: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabOptions {
    pub ground: GroundSet,
    pub functional: Option<FiniteFunctional>,
    pub x: Option<Vec<f64>>,
    pub f0: Option<FiniteFunctional>,
    pub scale: Option<f64>,
    pub capacity: Option<FiniteCapacity>,
    pub riemann_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateOptions {
    pub seed: u64,
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub sequence: Option<SequenceInput>,
    pub ideal: Option<IdealModel>,
    pub horizon: u64,
    pub tolerances: Tolerances,
    pub commands: Vec<CommandKind>,
    pub analyze: AnalyzeOptions,
    pub extract: ExtractOptions,
    pub lab: Option<LabOptions>,
    pub validate: ValidateOptions,
}

impl AnalysisConfig {
    /// A config that runs only the validation suites.
    pub fn validate_only(seed: u64, horizon: u64) -> Self {
        Self {
            sequence: None,
            ideal: None,
            horizon,
            tolerances: Tolerances {
                membership: validate::SUITE_TOLERANCE,
                resolution: crate::analysis::BISECTION_RELATIVE_RESOLUTION,
                epsilon: validate::SUITE_EPSILON,
            },
            commands: vec![CommandKind::Validate],
            analyze: AnalyzeOptions {
                approximants: DEFAULT_APPROXIMANTS,
            },
            extract: ExtractOptions {
                etas: None,
                max_stages: DEFAULT_MAX_STAGES,
            },
            lab: None,
            validate: ValidateOptions { seed, horizon },
        }
    }

    /// Applies command-line overrides with the same checks as the file.
    pub fn apply_overrides(
        &mut self,
        horizon: Option<u64>,
        tol: Option<f64>,
        seed: Option<u64>,
    ) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        if let Some(h) = horizon {
            if h < MIN_HORIZON {
                errors.push(cli_error(format!("--horizon must be at least {MIN_HORIZON}, got {h}")));
            } else {
                self.horizon = h;
                self.validate.horizon = h;
            }
        }
        if let Some(t) = tol {
            if unit_open(t) {
                self.tolerances.membership = t;
            } else {
                errors.push(cli_error(format!("--tol must lie in (0, 1), got {t}")));
            }
        }
        if let Some(s) = seed {
            self.validate.seed = s;
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { errors })
        }
    }
}

fn cli_error(message: String) -> Located {
    Located {
        line: 0,
        column: 0,
        message,
    }
}

fn unit_open(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    sequence: Option<Spanned<String>>,
    bound: Option<Spanned<f64>>,
    ideal: Option<Spanned<String>>,
    level_unit: Option<Spanned<f64>>,
    horizon: Spanned<i64>,
    tolerances: RawTolerances,
    commands: Spanned<Vec<Spanned<String>>>,
    analyze: Option<RawAnalyze>,
    extract: Option<RawExtract>,
    lab: Option<Spanned<RawLab>>,
    validate: Option<RawValidate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    membership: Spanned<f64>,
    resolution: Spanned<f64>,
    epsilon: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalyze {
    approximants: Spanned<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExtract {
    etas: Option<Spanned<Vec<f64>>>,
    max_stages: Option<Spanned<u32>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLab {
    size: usize,
    #[serde(default)]
    null: Vec<usize>,
    functional: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    f0: Option<Vec<f64>>,
    scale: Option<f64>,
    capacity: Option<BTreeMap<String, f64>>,
    riemann_step: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidate {
    seed: Option<u64>,
    horizon: Option<Spanned<u64>>,
}

/// Maps byte offsets to 1-based line and column (in characters).
struct Locator<'a> {
    text: &'a str,
    errors: Vec<Located>,
}

impl<'a> Locator<'a> {
    fn at(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        (line, before[line_start..].chars().count() + 1)
    }

    fn push(&mut self, offset: usize, message: impl Into<String>) {
        let (line, column) = self.at(offset);
        self.errors.push(Located {
            line,
            column,
            message: message.into(),
        });
    }

    fn span<T>(&mut self, spanned: &Spanned<T>, message: impl Into<String>) {
        self.push(spanned.span().start, message);
    }
}

/// Parses and fully validates a TOML config. All problems found are
/// reported together, each with its line and column.
pub fn parse_config(text: &str) -> Result<AnalysisConfig, ConfigError> {
    let mut loc = Locator {
        text,
        errors: Vec::new(),
    };
    let raw: RawConfig = match toml::from_str(text) {
        Ok(raw) => raw,
        Err(e) => {
            let span: Range<usize> = e.span().unwrap_or(0..0);
            loc.push(span.start, e.message().trim().to_string());
            return Err(ConfigError { errors: loc.errors });
        }
    };

    let horizon = *raw.horizon.get_ref();
    if horizon < MIN_HORIZON as i64 {
        loc.span(&raw.horizon, format!("horizon must be at least {MIN_HORIZON}, got {horizon}"));
    }
    let horizon = horizon.max(0) as u64;

    let t = &raw.tolerances;
    for (name, v) in [
        ("membership", &t.membership),
        ("resolution", &t.resolution),
        ("epsilon", &t.epsilon),
    ] {
        if !unit_open(*v.get_ref()) {
            loc.span(v, format!("tolerances.{name} must lie in (0, 1), got {}", v.get_ref()));
        }
    }
    let tolerances = Tolerances {
        membership: *t.membership.get_ref(),
        resolution: *t.resolution.get_ref(),
        epsilon: *t.epsilon.get_ref(),
    };

    let mut commands = Vec::new();
    if raw.commands.get_ref().is_empty() {
        loc.span(&raw.commands, "commands must list at least one of analyze, extract, lab, validate");
    }
    for c in raw.commands.get_ref() {
        match CommandKind::parse(c.get_ref()) {
            Some(kind) => commands.push(kind),
            None => loc.span(
                c,
                format!("unknown command {:?} (expected analyze, extract, lab, validate)", c.get_ref()),
            ),
        }
    }
    let needs_sequence = commands
        .iter()
        .any(|c| matches!(c, CommandKind::Analyze | CommandKind::Extract));

    let sequence = parse_sequence_field(&mut loc, raw.sequence.as_ref(), raw.bound.as_ref());
    if needs_sequence && raw.sequence.is_none() {
        loc.span(&raw.commands, "analyze and extract need a `sequence`");
    }
    let ideal = parse_ideal_field(&mut loc, raw.ideal.as_ref(), raw.level_unit.as_ref());
    if needs_sequence && raw.ideal.is_none() {
        loc.span(&raw.commands, "analyze and extract need an `ideal`");
    }

    let analyze = AnalyzeOptions {
        approximants: raw
            .analyze
            .as_ref()
            .map_or(DEFAULT_APPROXIMANTS, |a| *a.approximants.get_ref()),
    };
    let mut extract = ExtractOptions {
        etas: None,
        max_stages: DEFAULT_MAX_STAGES,
    };
    if let Some(e) = &raw.extract {
        if let Some(etas) = &e.etas {
            if etas.get_ref().iter().any(|v| !v.is_finite()) {
                loc.span(etas, "extract.etas must be finite");
            }
            extract.etas = Some(etas.get_ref().clone());
        }
        if let Some(m) = &e.max_stages {
            if *m.get_ref() == 0 {
                loc.span(m, "extract.max_stages must be at least 1");
            }
            extract.max_stages = *m.get_ref();
        }
    }

    let lab = match &raw.lab {
        Some(l) => parse_lab(&mut loc, l),
        None => {
            if commands.contains(&CommandKind::Lab) {
                loc.span(&raw.commands, "the lab command needs a [lab] section");
            }
            None
        }
    };

    let mut validate = ValidateOptions {
        seed: DEFAULT_SEED,
        horizon,
    };
    if let Some(v) = &raw.validate {
        validate.seed = v.seed.unwrap_or(DEFAULT_SEED);
        if let Some(h) = &v.horizon {
            if *h.get_ref() < MIN_HORIZON {
                loc.span(h, format!("validate.horizon must be at least {MIN_HORIZON}"));
            }
            validate.horizon = *h.get_ref();
        }
    }

    if !loc.errors.is_empty() {
        return Err(ConfigError { errors: loc.errors });
    }
    Ok(AnalysisConfig {
        sequence,
        ideal,
        horizon,
        tolerances,
        commands,
        analyze,
        extract,
        lab,
        validate,
    })
}

fn parse_sequence_field(
    loc: &mut Locator<'_>,
    source: Option<&Spanned<String>>,
    bound: Option<&Spanned<f64>>,
) -> Option<SequenceInput> {
    let source = source?;
    let text = source.get_ref();
    let spec = match parse_sequence(text) {
        Ok(spec) => spec,
        Err(e) => {
            // Skip the opening quote of the TOML string.
            loc.push(source.span().start + 1 + e.offset, format!("sequence: {}", e.message));
            return None;
        }
    };
    let spec = match bound {
        Some(b) => match spec.with_bound(*b.get_ref()) {
            Ok(spec) => spec,
            Err(e) => {
                loc.span(b, format!("bound: {e}"));
                return None;
            }
        },
        None => spec,
    };
    Some(SequenceInput {
        source: text.clone(),
        bound: spec.bound(),
        canonical: spec,
    })
}

fn parse_ideal_field(
    loc: &mut Locator<'_>,
    name: Option<&Spanned<String>>,
    unit: Option<&Spanned<f64>>,
) -> Option<IdealModel> {
    let name = name?;
    let ideal = match IdealModel::from_name(name.get_ref()) {
        Ok(ideal) => ideal,
        Err(e) => {
            loc.span(name, format!("ideal: {e}"));
            return None;
        }
    };
    let Some(unit) = unit else {
        return Some(ideal);
    };
    if !matches!(ideal.kind, IdealKind::Summable { .. }) {
        loc.span(unit, "level_unit only applies to summable ideals");
        return None;
    }
    match ideal.with_level_unit(*unit.get_ref()) {
        Ok(ideal) => Some(ideal),
        Err(e) => {
            loc.span(unit, format!("level_unit: {e}"));
            None
        }
    }
}

fn parse_lab(loc: &mut Locator<'_>, lab: &Spanned<RawLab>) -> Option<LabOptions> {
    let before = loc.errors.len();
    let raw = lab.get_ref();
    let ground = match GroundSet::new(raw.size, &raw.null) {
        Ok(g) => g,
        Err(e) => {
            loc.span(lab, format!("lab: {e}"));
            return None;
        }
    };
    let mut vector = |name: &str, v: &Option<Vec<f64>>| -> Option<Vec<f64>> {
        let v = v.as_ref()?;
        if v.len() != raw.size {
            loc.span(lab, format!("lab.{name} has {} entries, expected {}", v.len(), raw.size));
        } else if v.iter().any(|e| !e.is_finite()) {
            loc.span(lab, format!("lab.{name} must be finite"));
        }
        Some(v.clone())
    };
    let functional = vector("functional", &raw.functional).map(FiniteFunctional::new);
    let x = vector("x", &raw.x);
    let f0 = vector("f0", &raw.f0).map(FiniteFunctional::new);
    let capacity = raw.capacity.as_ref().and_then(|table| {
        let mut parsed = BTreeMap::new();
        for (key, &value) in table {
            match key.parse::<u32>() {
                Ok(mask) => {
                    parsed.insert(mask, value);
                }
                Err(_) => loc.span(lab, format!("lab.capacity key {key:?} is not a subset bitmask")),
            }
        }
        match FiniteCapacity::from_table(raw.size, &parsed) {
            Ok(c) => Some(c),
            Err(e) => {
                loc.span(lab, format!("lab.capacity: {e}"));
                None
            }
        }
    });
    let riemann_step = raw.riemann_step.unwrap_or(DEFAULT_RIEMANN_STEP);
    if !(riemann_step > 0.0 && riemann_step.is_finite()) {
        loc.span(lab, "lab.riemann_step must be positive");
    }
    if loc.errors.len() > before {
        return None;
    }
    Some(LabOptions {
        ground,
        functional,
        x,
        f0,
        scale: raw.scale,
        capacity,
        riemann_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Failed,
}

/// Membership evidence behind one verdict in a command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceRecord {
    pub label: String,
    /// Rule text of the decided set, when it is not implied by the label.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(flatten)]
    pub evidence: MembershipEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandReport {
    pub kind: CommandKind,
    pub status: Status,
    pub inputs: Value,
    pub result: Value,
    pub evidence: Vec<EvidenceRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config: AnalysisConfig,
    pub commands: Vec<CommandReport>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock time per command. Off by default so that reports
    /// stay byte-identical across runs.
    pub timings: bool,
}

impl RunReport {
    pub fn success(&self) -> bool {
        self.commands.iter().all(|c| c.status == Status::Ok)
    }

    /// 0 when every command succeeded, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.success() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Score traces, one row per checkpoint.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["command", "label", "set", "verdict", "tolerance", "checkpoint", "score"])
            .expect("in-memory write");
        for c in &self.commands {
            for e in &c.evidence {
                for &(checkpoint, score) in &e.evidence.score_trace {
                    w.write_record([
                        c.kind.name(),
                        &e.label,
                        e.set.as_deref().unwrap_or(""),
                        verdict_name(e.evidence.verdict),
                        &e.evidence.tolerance.to_string(),
                        &checkpoint.to_string(),
                        &score.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn verdict_name(v: crate::ideal::Verdict) -> &'static str {
    match v {
        crate::ideal::Verdict::In => "In",
        crate::ideal::Verdict::NotIn => "NotIn",
        crate::ideal::Verdict::Undecided => "Undecided",
    }
}

/// Runs the configured commands in order. A failing command is recorded
/// in its own entry and never stops the others.
pub fn run(config: &AnalysisConfig, options: RunOptions) -> RunReport {
    let commands = config
        .commands
        .iter()
        .map(|&kind| {
            let started = Instant::now();
            let mut out = Output::new(kind);
            match kind {
                CommandKind::Analyze => run_analyze(config, &mut out),
                CommandKind::Extract => run_extract(config, &mut out),
                CommandKind::Lab => run_lab(config, &mut out),
                CommandKind::Validate => run_validate(config, &mut out),
            }
            let mut report = out.finish();
            if options.timings {
                report.wall_clock_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            report
        })
        .collect();
    RunReport {
        schema_version: SCHEMA_VERSION,
        tool: TOOL_NAME,
        tool_version: TOOL_VERSION,
        config: config.clone(),
        commands,
    }
}

struct Output {
    kind: CommandKind,
    inputs: serde_json::Map<String, Value>,
    result: serde_json::Map<String, Value>,
    evidence: Vec<EvidenceRecord>,
    errors: Vec<String>,
}

impl Output {
    fn new(kind: CommandKind) -> Self {
        Self {
            kind,
            inputs: Default::default(),
            result: Default::default(),
            evidence: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.into(), to_value(value));
    }

    fn set(&mut self, key: &str, value: impl Serialize) {
        self.result.insert(key.into(), to_value(value));
    }

    fn evidence(&mut self, label: impl Into<String>, set: Option<String>, evidence: &MembershipEvidence) {
        self.evidence.push(EvidenceRecord {
            label: label.into(),
            set,
            evidence: evidence.clone(),
        });
    }

    fn fail(&mut self, message: impl fmt::Display) {
        self.errors.push(message.to_string());
    }

    fn finish(self) -> CommandReport {
        CommandReport {
            kind: self.kind,
            status: if self.errors.is_empty() {
                Status::Ok
            } else {
                Status::Failed
            },
            inputs: Value::Object(self.inputs),
            result: Value::Object(self.result),
            evidence: self.evidence,
            errors: self.errors,
            wall_clock_ms: None,
        }
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values serialize")
}

fn sequence_inputs<'c>(
    config: &'c AnalysisConfig,
    out: &mut Output,
) -> Option<(&'c SequenceSpec, &'c IdealModel)> {
    out.input("horizon", config.horizon);
    out.input("tolerances", config.tolerances);
    match (&config.sequence, &config.ideal) {
        (Some(s), Some(i)) => {
            out.input("sequence", &s.canonical);
            out.input("bound", s.bound);
            out.input("ideal", i);
            Some((&s.canonical, i))
        }
        _ => {
            out.fail("this command needs both a sequence and an ideal");
            None
        }
    }
}

fn run_analyze(config: &AnalysisConfig, out: &mut Output) {
    let Some((x, ideal)) = sequence_inputs(config, out) else {
        return;
    };
    let (h, t) = (config.horizon, config.tolerances);
    out.input("approximants", config.analyze.approximants);

    match is_ideal_convergent(x, ideal, h, t.epsilon, t.membership) {
        Ok(conv) => {
            let c = &conv.clusters;
            out.set(
                "clusters",
                json!({
                    "candidates": c.candidates,
                    "run_half_widths": c.run_half_widths,
                    "undecided": c.undecided,
                }),
            );
            for p in &c.grid {
                out.evidence(format!("cluster-grid eta={:?}", p.eta), None, &p.evidence);
            }
            out.set("convergence", &conv.convergence);
            if let Some(ev) = &conv.exceptional {
                out.evidence("exceptional-set", None, ev);
            }
            if let Convergence::Yes { eta } = conv.convergence {
                match istar_witness(x, ideal, eta, None, h, t.membership) {
                    Ok(w) => {
                        let (outcome, witness, ev) = match &w {
                            WitnessOutcome::Found { witness, evidence, .. } => ("found", witness, evidence),
                            WitnessOutcome::Failure { witness, evidence, .. } => ("failure", witness, evidence),
                        };
                        out.set("istar", json!({ "outcome": outcome, "witness": witness.to_string() }));
                        out.evidence("istar-witness", Some(witness.to_string()), ev);
                    }
                    Err(e) => out.fail(format!("istar witness: {e}")),
                }
            }
        }
        Err(e) => out.fail(format!("cluster set: {e}")),
    }

    let d = match distance_at(x, ideal, h, t.membership, t.resolution) {
        Ok(d) => d,
        Err(e) => {
            out.fail(format!("distance: {e}"));
            return;
        }
    };
    out.set("limsup", &d.eta_plus);
    out.set("liminf", &d.eta_minus);
    out.set("distance", &d);

    if d.center_radius().is_none() {
        out.set("approximants", json!([]));
        out.set(
            "approximants_skipped",
            "limsup or liminf is an interval; approximants need point estimates",
        );
        return;
    }
    let mut rows = Vec::new();
    for k in 1..=config.analyze.approximants {
        match approximant(x, ideal, k, &d, h, t.membership) {
            Ok(a) => {
                let set = a.exceptional_set.to_string();
                rows.push(json!({
                    "k": a.k,
                    "achieved": a.achieved,
                    "envelope": a.envelope,
                    "degenerate": a.degenerate,
                    "verdict": a.evidence.verdict,
                    "exceptional_set": set,
                    "sequence": a.sequence.to_string(),
                }));
                out.evidence(format!("approximant k={k}"), Some(set), &a.evidence);
            }
            Err(e) => {
                rows.push(json!({ "k": k, "error": e.to_string() }));
                out.fail(format!("approximant k={k}: {e}"));
            }
        }
    }
    out.set("approximants", rows);
}

fn extraction_value(r: &ExtractionReport) -> Value {
    json!({
        "eta": r.eta,
        "completed_stages": r.completed_stages,
        "stall": r.stall,
        "certified": r.certified(),
        "cutoffs": r.cutoffs,
        "stages": r.stages,
        "blocks": r.blocks.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

fn run_extract(config: &AnalysisConfig, out: &mut Output) {
    let Some((x, ideal)) = sequence_inputs(config, out) else {
        return;
    };
    let (h, t) = (config.horizon, config.tolerances);
    out.input("max_stages", config.extract.max_stages);
    if !ideal.is_f_sigma() {
        let err = IdealError::NotFSigma(ideal.name.clone());
        out.set(
            "rejected",
            json!({ "reason": "not-f-sigma", "ideal": ideal.name, "message": err.to_string() }),
        );
        out.fail(err);
        return;
    }
    let (etas, source) = match &config.extract.etas {
        Some(etas) => (etas.clone(), "config"),
        None => match cluster_set(x, ideal, h, t.epsilon, t.membership) {
            Ok(c) => {
                for p in &c.grid {
                    out.evidence(format!("cluster-grid eta={:?}", p.eta), None, &p.evidence);
                }
                (c.candidates, "cluster-candidates")
            }
            Err(e) => {
                out.fail(format!("cluster set: {e}"));
                return;
            }
        },
    };
    out.input("etas", &etas);
    out.input("eta_source", source);
    let mut runs = Vec::new();
    for eta in etas {
        match extract_limit_point(x, ideal, eta, h, config.extract.max_stages) {
            Ok(r) => runs.push(extraction_value(&r)),
            Err(e) => {
                runs.push(json!({ "eta": eta, "error": e.to_string() }));
                out.fail(format!("extraction at eta={eta:?}: {e}"));
            }
        }
    }
    out.set("runs", runs);
}

/// `Ok` payload or `{"error": ...}`, for lab operations whose refusal is
/// itself an answer (e.g. a functional that violates a precondition).
fn outcome<T: Serialize, E: fmt::Display>(r: Result<T, E>) -> Value {
    match r {
        Ok(v) => to_value(v),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn run_lab(config: &AnalysisConfig, out: &mut Output) {
    let Some(lab) = &config.lab else {
        out.fail("the lab command needs a [lab] section");
        return;
    };
    let g = &lab.ground;
    out.input("lab", lab);
    out.set(
        "ground",
        json!({ "size": g.size(), "null_mask": g.null_mask(), "support": g.support() }),
    );
    out.set("vertices", sl_vertices(g));
    out.set("diameter", sl_diameter(g));
    if let Some(x) = &lab.x {
        out.set("value_range", outcome(value_range(x, g)));
    }
    if let Some(f) = &lab.functional {
        out.set("norm", f.norm());
        out.set("total", f.total());
        out.set("sl_member", sl_membership(f, g));
        out.set("charge_total_variation", charge_of(f).total_variation());
        if f.total().abs() <= ALGEBRAIC_TOL {
            out.set("norm_identity", outcome(norm_identity_check(f)));
        }
        out.set("decomposition", outcome(decompose_difference(f, g, lab.f0.as_ref())));
        out.set("uniqueness", outcome(decomposition_uniqueness_probe(f, g)));
        if let Some(k) = lab.scale {
            out.set("scaled_decomposition", outcome(scaled_decomposition(f, g, k)));
        }
        if let Some(x) = &lab.x {
            out.set("value", outcome(f.apply(x)));
            if sl_membership(f, g) {
                out.set("representation", outcome(representation_check(f, x, g)));
            }
        }
    }
    if let (Some(nu), Some(x)) = (&lab.capacity, &lab.x) {
        out.set(
            "choquet",
            json!({
                "exact": outcome(choquet(x, nu)),
                "riemann": outcome(choquet_riemann(x, nu, lab.riemann_step)),
                "riemann_step": lab.riemann_step,
            }),
        );
    }
}

fn run_validate(config: &AnalysisConfig, out: &mut Output) {
    let v = &config.validate;
    out.input("seed", v.seed);
    out.input("horizon", v.horizon);
    let report = validate::run_all(v.seed, v.horizon);
    for s in report.suites.iter().filter(|s| !s.pass) {
        out.fail(format!("suite {} failed {} of {} checks", s.name, s.failures, s.cases));
    }
    out.set("pass", report.pass);
    out.set("tolerance", report.tolerance);
    out.set("epsilon", report.epsilon);
    out.set("suites", &report.suites);
}

/// Runs `validate` with the given seed and horizon and returns the JSON.
pub fn validate_report(seed: u64, horizon: u64) -> RunReport {
    run(&AnalysisConfig::validate_only(seed, horizon), RunOptions::default())
}
