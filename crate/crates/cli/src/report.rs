use std::fs;

use entropic_core::entropy::TOLERANCE;
use entropic_core::models::a_pow_b;
use entropic_core::{
    build_domain, build_event_index, class_weights, entropic_weight_alt, trace_profile,
    weighted_volume_profile, BoundCheck, ConvergenceProfile, InputInstance, ModelId, TraceLiteral,
    WeightedVolumeProfile,
};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::config::{ProfileKind, RunConfig};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct DomainSummary {
    pub label: String,
    pub n: usize,
    pub alphabet: u32,
    pub size: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// Output values in the order used for preimage indices.
    pub range: Vec<i64>,
    pub preimage_sizes: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRow {
    pub key: String,
    pub literal: String,
    pub size: usize,
    /// Exact measure of the occurrence set.
    pub pr: String,
    pub pr_value: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub first_time: u32,
    pub last_time: u32,
    pub occurrences: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub domain: DomainSummary,
    pub init_time: u32,
    pub classes: Vec<ClassRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace_profiles: Vec<ConvergenceProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<WeightedVolumeProfile>,
    pub checks: Vec<BoundCheck>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `volume.csv` and one `trace-<input>.csv` per trace profile.
    pub fn write_csv(&self, dir: &std::path::Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        if let Some(v) = &self.volume {
            fs::write(dir.join("volume.csv"), v.to_csv()).map_err(io)?;
        }
        for p in &self.trace_profiles {
            fs::write(dir.join(format!("trace-{}.csv", p.input)), p.to_csv()).map_err(io)?;
        }
        Ok(())
    }
}

fn count_check(name: &str, bad: usize) -> BoundCheck {
    BoundCheck::approx(name, bad as f64, 0.0, 0.0)
}

/// Runs the analysis on the calling thread's rayon pool.
pub fn analyze(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let program = config.program()?;
    let model = config.model;
    let dom = build_domain(model, config.n, config.alphabet, config.cap)?;
    let index = build_event_index(&program, &dom, config.filter)?;
    let weights = class_weights(&dom, &index);
    let log_m = (dom.m() as f64).log2();

    let mut classes = Vec::with_capacity(index.len());
    let mut worst_alt: f64 = 0.0;
    let mut misplaced = 0;
    let mut covered = dom.empty_set();
    for c in index.classes() {
        let d = weights.get(&c.key).unwrap_or(0.0);
        worst_alt = worst_alt.max((d - entropic_weight_alt(&dom, &c.occurrence)).abs());
        if let TraceLiteral::Output { value, .. } = &c.literal {
            misplaced += c
                .occurrence
                .difference(&dom.preimage_of_value(*value))
                .count();
            covered.union_with(&c.occurrence);
        }
        let pr = dom.measure(&c.occurrence);
        classes.push(ClassRow {
            key: c.key.clone(),
            literal: c.literal.render(&program),
            size: c.occurrence.count(),
            pr_value: pr.to_f64().unwrap_or(f64::NAN),
            pr: pr.to_string(),
            d,
            first_time: c.first_time,
            last_time: c.last_time,
            occurrences: c.occurrences,
        });
    }
    let max_d = classes.iter().map(|c| c.d).fold(0.0, f64::max);

    let mut checks = vec![
        count_check(
            "outputs-match-oracle",
            misplaced + dom.len() - covered.count(),
        ),
        BoundCheck::approx("weight-forms-agree", worst_alt, 0.0, TOLERANCE),
        BoundCheck::approx("weights-le-log-m", max_d, log_m, TOLERANCE),
    ];

    let digits = model == ModelId::Xor;
    let mut trace_profiles = Vec::new();
    if config.profiles.contains(&ProfileKind::Trace) {
        let inputs: Vec<InputInstance> = if config.inputs.is_empty() {
            vec![a_pow_b(config.n, config.alphabet)]
        } else {
            config
                .inputs
                .iter()
                .map(|s| InputInstance::parse(s, config.alphabet).expect("validated input"))
                .collect()
        };
        for x in &inputs {
            let mut p = trace_profile(&program, &dom, &index, &weights, x)?;
            p.input = x.render(digits);
            let disorder = p.points.windows(2).filter(|w| w[0].t >= w[1].t).count();
            checks.push(count_check(
                &format!("trace-times-increase[{}]", x.render(digits)),
                disorder,
            ));
            trace_profiles.push(p);
        }
    }

    let mut notes = Vec::new();
    let volume = if config.profiles.contains(&ProfileKind::Volume) {
        let v = weighted_volume_profile(&dom, &index, &weights);
        let rises = v
            .points
            .windows(2)
            .filter(|w| w[1].volume > w[0].volume + TOLERANCE)
            .count();
        checks.push(count_check("volume-nonincreasing", rises));
        if model == ModelId::Xor && config.program.is_none() {
            notes.push(xor_volume_note(config.n, &v));
        }
        Some(v)
    } else {
        None
    };
    if model == ModelId::Xor {
        notes.push(
            "prefix classes of the last accumulation fix the whole word, so they weigh 0 rather than 2^-n"
                .to_string(),
        );
    }

    Ok(Report {
        config: config.clone(),
        domain: DomainSummary {
            label: dom.label().to_string(),
            n: dom.n(),
            alphabet: dom.alphabet(),
            size: dom.len(),
            m: dom.m(),
            range: dom.range().to_vec(),
            preimage_sizes: dom.preimage_sizes(),
        },
        init_time: index.init_time(),
        classes,
        trace_profiles,
        volume,
        checks,
        notes,
    })
}

fn xor_volume_note(n: usize, v: &WeightedVolumeProfile) -> String {
    let observed: Vec<String> = (0..=n)
        .map(|k| format!("{}", v.at(2 + 3 * k as u32).unwrap_or(f64::NAN)))
        .collect();
    format!(
        "closed forms for DGamma(2+3k) disagree: the sum form gives n-k+1, n-(t+1)/3 gives n-k-1; \
         computed values for k=0..{n}: [{}]",
        observed.join(", ")
    )
}

/// `analyze` with the configured thread count; the report does not depend
/// on it.
pub fn cmd_analyze(config: &RunConfig) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| analyze(config))
}
