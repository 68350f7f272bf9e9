//! Batch orchestration: generate → featurize → classify → report.
//!
//! A run is driven by a versioned TOML config. Every stage is cached by a
//! digest of the relevant configuration, all randomness flows from the two
//! seeds in the config, and parallel work is index-collected so outputs are
//! byte-identical at any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::areal_baselines::{angular_feature_vector, roughness_surface, Gaussian2DConfig};
use crate::classify::{cross_validate, ClassifierConfig, ClassifierKind, CvReport, FeatureMatrix};
use crate::error::{Error, Result};
use crate::io;
use crate::persistence::{sublevel_pd_image, sublevel_pd_profile, PersistenceDiagram};
use crate::profile_baselines::{
    fft_denoise_mean_line, gaussian_mean_line, peak_feature_vector, roughness_profile_fft,
    roughness_profile_gaussian, PeakConfig,
};
use crate::roughness_params::{areal_parameters, profile_parameters, ArealParams, ProfileParams};
use crate::surface_synth::{extract_profiles, generate_dataset, GeneratorConfig, Profile, RoughnessLabel, SurfaceGrid};
use crate::tda_features::{
    carlsson_coordinates, persistence_image, template_features, PersistenceImageConfig,
    TemplateConfig,
};
use crate::util::fnv1a64;

pub const CONFIG_VERSION: u32 = 1;

/// Which specimens a featurization consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Profile,
    Surface,
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Profile => f.write_str("profile"),
            Target::Surface => f.write_str("surface"),
        }
    }
}

/// Featurization methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Carlsson coordinates of sublevel persistence diagrams.
    Cc,
    /// Persistence images.
    Pi,
    /// Template functions.
    Tf,
    /// Gaussian mean-line roughness profile -> profile parameters.
    GaussProfile,
    /// FFT-thresholded roughness profile -> profile parameters.
    FftDenoise,
    /// FFT/PSD peak coordinates.
    FftPeaks,
    /// Gaussian roughness surface -> areal parameters.
    Gauss2dAreal,
    /// Angular-spectrum features of the areal PSD.
    Fft2dAngular,
}

impl Method {
    fn as_str(&self) -> &'static str {
        match self {
            Method::Cc => "cc",
            Method::Pi => "pi",
            Method::Tf => "tf",
            Method::GaussProfile => "gauss-profile",
            Method::FftDenoise => "fft-denoise",
            Method::FftPeaks => "fft-peaks",
            Method::Gauss2dAreal => "gauss2d-areal",
            Method::Fft2dAngular => "fft2d-angular",
        }
    }

    fn is_tda(&self) -> bool {
        matches!(self, Method::Cc | Method::Pi | Method::Tf)
    }
}

fn default_homology_dims() -> Vec<usize> {
    vec![0]
}
fn default_pi_cols() -> usize {
    PersistenceImageConfig::DEFAULT_GRID_COLS
}
fn default_pi_rows() -> usize {
    PersistenceImageConfig::DEFAULT_GRID_ROWS
}
fn default_mesh() -> usize {
    TemplateConfig::DEFAULT_MESH_SIZE
}
fn default_threshold() -> f64 {
    0.4
}
fn default_prefilter() -> bool {
    true
}
fn default_kernel_size() -> usize {
    21
}

/// One featurization request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturizationSpec {
    pub method: Method,
    pub target: Target,
    /// Homology dimensions for TDA methods; per-dimension vectors are
    /// concatenated (H0 then H1).
    #[serde(default = "default_homology_dims")]
    pub homology_dims: Vec<usize>,
    #[serde(default = "default_pi_cols")]
    pub grid_cols: usize,
    #[serde(default = "default_pi_rows")]
    pub grid_rows: usize,
    #[serde(default = "default_mesh")]
    pub mesh_a: usize,
    #[serde(default = "default_mesh")]
    pub mesh_b: usize,
    /// Normalized spectrum threshold for `fft-denoise`.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Gaussian prefilter for `fft2d-angular`.
    #[serde(default = "default_prefilter")]
    pub prefilter: bool,
    /// Kernel size for the 2-D Gaussian methods.
    #[serde(default = "default_kernel_size")]
    pub kernel_size: usize,
}

impl FeaturizationSpec {
    pub fn new(method: Method, target: Target) -> Self {
        FeaturizationSpec {
            method,
            target,
            homology_dims: default_homology_dims(),
            grid_cols: default_pi_cols(),
            grid_rows: default_pi_rows(),
            mesh_a: default_mesh(),
            mesh_b: default_mesh(),
            threshold: default_threshold(),
            prefilter: default_prefilter(),
            kernel_size: default_kernel_size(),
        }
    }

    pub fn with_dims(mut self, dims: &[usize]) -> Self {
        self.homology_dims = dims.to_vec();
        self
    }

    pub fn with_prefilter(mut self, prefilter: bool) -> Self {
        self.prefilter = prefilter;
        self
    }

    /// Stable identifier used for file names and report rows.
    pub fn id(&self) -> String {
        let mut id = format!("{}-{}", self.target, self.method.as_str());
        if self.method.is_tda() {
            id.push_str("-h");
            for d in &self.homology_dims {
                let _ = write!(id, "{d}");
            }
        }
        if self.method == Method::Fft2dAngular {
            id.push_str(if self.prefilter { "-prefiltered" } else { "-direct" });
        }
        id
    }

    fn validate(&self, index: usize) -> Result<()> {
        let field = |name: &str| format!("featurization[{index}].{name}");
        if self.method.is_tda() {
            if self.homology_dims.is_empty()
                || self.homology_dims.iter().any(|&d| d > 1)
                || self.homology_dims.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(Error::config(format!(
                    "{}: must be a strictly increasing subset of {{0, 1}}",
                    field("homology_dims")
                )));
            }
            if self.target == Target::Profile && self.homology_dims != [0] {
                return Err(Error::config(format!(
                    "{}: profiles only support dimension 0",
                    field("homology_dims")
                )));
            }
        }
        let target_ok = match self.method {
            Method::Cc | Method::Pi | Method::Tf => true,
            Method::GaussProfile | Method::FftDenoise | Method::FftPeaks => {
                self.target == Target::Profile
            }
            Method::Gauss2dAreal | Method::Fft2dAngular => self.target == Target::Surface,
        };
        if !target_ok {
            return Err(Error::config(format!(
                "{}: method {} does not apply to target {}",
                field("target"),
                self.method.as_str(),
                self.target
            )));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::config(format!(
                "{}: must lie in [0, 1]",
                field("threshold")
            )));
        }
        if self.grid_cols == 0 || self.grid_rows == 0 {
            return Err(Error::config(format!(
                "{}: persistence-image grid must be non-empty",
                field("grid_cols/grid_rows")
            )));
        }
        if self.mesh_a < 2 || self.mesh_b < 2 {
            return Err(Error::config(format!(
                "{}: template meshes need >= 2 nodes",
                field("mesh_a/mesh_b")
            )));
        }
        Ok(())
    }
}

/// Classification stage settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifySpec {
    pub classifiers: Vec<ClassifierKind>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    pub seed: u64,
    /// When set, every featurization is additionally classified on its
    /// top-`pca_k` principal components (skipped where `pca_k` is not
    /// smaller than the feature dimension).
    #[serde(default)]
    pub pca_k: Option<usize>,
}

fn default_folds() -> usize {
    10
}

/// Full pipeline configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub version: u32,
    pub dataset: GeneratorConfig,
    #[serde(rename = "featurization")]
    pub featurizations: Vec<FeaturizationSpec>,
    pub classify: ClassifySpec,
    /// Write persistence diagrams next to the feature CSVs.
    #[serde(default)]
    pub dump_diagrams: bool,
    /// Write mean lines / APSD grids for the classical methods.
    #[serde(default)]
    pub dump_intermediates: bool,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(format!(
                "version: expected {CONFIG_VERSION}, got {}",
                self.version
            )));
        }
        self.dataset
            .validate()
            .map_err(|e| Error::config(format!("dataset: {e}")))?;
        if self.featurizations.is_empty() {
            return Err(Error::config(
                "featurization: at least one featurization is required",
            ));
        }
        for (i, spec) in self.featurizations.iter().enumerate() {
            spec.validate(i)?;
        }
        {
            let mut ids: Vec<String> = self.featurizations.iter().map(|s| s.id()).collect();
            ids.sort();
            ids.dedup();
            if ids.len() != self.featurizations.len() {
                return Err(Error::config("featurization: duplicate featurization ids"));
            }
        }
        if self.classify.folds < 2 {
            return Err(Error::config("classify.folds: need at least 2 folds"));
        }
        if self.classify.classifiers.is_empty() {
            return Err(Error::config("classify.classifiers: none requested"));
        }
        Ok(())
    }

    /// Digest of the full config; stable under key reordering in the file
    /// because serialization canonicalizes field order.
    pub fn digest(&self) -> String {
        digest_of(self)
    }
}

fn digest_of<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_value(value).expect("serializable");
    format!("{:016x}", fnv1a64(json.to_string().as_bytes()))
}

/// Paths and provenance of one pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub dataset_dir: PathBuf,
    pub feature_files: Vec<PathBuf>,
    pub report_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
}

/// How far to take the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Generate,
    Featurize,
    Classify,
}

/// Run the pipeline up to `stage` with `jobs` workers (0 = all cores),
/// writing into `out_dir`. Stages reuse cached outputs keyed by config
/// digests, so reruns are idempotent.
pub fn run_stages(
    config: &PipelineConfig,
    out_dir: &Path,
    jobs: usize,
    stage: Stage,
) -> Result<RunManifest> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_stages_inner(config, out_dir, stage))
}

/// Full pipeline: all stages plus the manifest.
pub fn run(config: &PipelineConfig, out_dir: &Path, jobs: usize) -> Result<RunManifest> {
    run_stages(config, out_dir, jobs, Stage::Classify)
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn run_stages_inner(config: &PipelineConfig, out_dir: &Path, stage: Stage) -> Result<RunManifest> {
    let started = now_ms();
    std::fs::create_dir_all(out_dir)?;

    let dataset_dir = out_dir.join("dataset");
    let (surfaces, profiles) = generate_stage(&config.dataset, &dataset_dir)?;

    let mut manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: config.digest(),
        started_unix_ms: started,
        finished_unix_ms: started,
        dataset_dir,
        feature_files: Vec::new(),
        report_files: Vec::new(),
        summary_file: out_dir.join("summary.csv"),
    };

    if stage >= Stage::Featurize {
        let matrices = featurize_stage(config, &surfaces, &profiles, out_dir)?;
        manifest.feature_files = matrices
            .iter()
            .map(|fm| out_dir.join("features").join(format!("{}.csv", fm.featurization_id)))
            .collect();

        if stage >= Stage::Classify {
            let reports = classify_stage(config, &matrices, out_dir)?;
            manifest.report_files = reports
                .iter()
                .map(|r| report_path(out_dir, r))
                .collect();
            write_summary(&manifest.summary_file, &reports)?;
        }
    }

    manifest.finished_unix_ms = now_ms();
    write_atomic(
        &out_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).expect("serializable manifest"),
    )?;
    Ok(manifest)
}

/// Generate (or load the cached) dataset under `dataset_dir`.
pub fn generate_stage(
    dataset: &GeneratorConfig,
    dataset_dir: &Path,
) -> Result<(Vec<SurfaceGrid>, Vec<Profile>)> {
    dataset.validate()?;
    let digest = digest_of(dataset);
    let digest_file = dataset_dir.join("digest.txt");
    let profiles_file = dataset_dir.join("profiles.csv");

    if digest_file.exists() && profiles_file.exists() {
        if std::fs::read_to_string(&digest_file)?.trim() == digest {
            let surfaces: Vec<SurfaceGrid> = (0..dataset.count)
                .map(|i| io::read_surf1(&dataset_dir.join(surf_name(i))))
                .collect::<Result<_>>()?;
            let profiles = io::profiles_from_csv(&std::fs::read_to_string(&profiles_file)?)?;
            return Ok((surfaces, profiles));
        }
    }

    let surfaces = generate_dataset(dataset)?;
    let profiles: Vec<Profile> = surfaces
        .par_iter()
        .map(|s| extract_profiles(s, dataset.profiles_per_direction))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    std::fs::create_dir_all(dataset_dir)?;
    for s in &surfaces {
        io::write_surf1(&dataset_dir.join(surf_name(s.index)), s)?;
    }
    write_atomic(&profiles_file, &io::profiles_to_csv(&profiles)?)?;
    write_atomic(&digest_file, &format!("{digest}\n"))?;
    Ok((surfaces, profiles))
}

fn surf_name(index: usize) -> String {
    format!("surface_{index:04}.surf1")
}

/// Compute (or load cached) feature matrices for every featurization.
pub fn featurize_stage(
    config: &PipelineConfig,
    surfaces: &[SurfaceGrid],
    profiles: &[Profile],
    out_dir: &Path,
) -> Result<Vec<FeatureMatrix>> {
    let features_dir = out_dir.join("features");
    std::fs::create_dir_all(&features_dir)?;
    let dataset_digest = digest_of(&config.dataset);

    let mut matrices = Vec::with_capacity(config.featurizations.len());
    for spec in &config.featurizations {
        let id = spec.id();
        let digest = digest_of(&(&dataset_digest, spec));
        let csv_path = features_dir.join(format!("{id}.csv"));
        let digest_path = features_dir.join(format!("{id}.digest"));

        if csv_path.exists() && digest_path.exists() {
            if std::fs::read_to_string(&digest_path)?.trim() == digest {
                matrices.push(io::features_from_csv(
                    &std::fs::read_to_string(&csv_path)?,
                    &id,
                )?);
                continue;
            }
        }

        let fm = compute_feature_matrix(spec, surfaces, profiles, config, out_dir)?;
        write_atomic(&csv_path, &io::features_to_csv(&fm))?;
        write_atomic(&digest_path, &format!("{digest}\n"))?;
        matrices.push(fm);
    }
    Ok(matrices)
}

/// Cross-validate every featurization x classifier pair and write reports.
pub fn classify_stage(
    config: &PipelineConfig,
    matrices: &[FeatureMatrix],
    out_dir: &Path,
) -> Result<Vec<CvReport>> {
    let reports_dir = out_dir.join("reports");
    std::fs::create_dir_all(&reports_dir)?;

    let mut reports = Vec::new();
    for fm in matrices {
        for &kind in &config.classify.classifiers {
            let clf = ClassifierConfig {
                kind,
                seed: config.classify.seed,
                ..ClassifierConfig::logreg(config.classify.seed)
            };
            reports.push(cross_validate(
                fm,
                &clf,
                config.classify.folds,
                config.classify.seed,
                None,
            )?);
            if let Some(k) = config.classify.pca_k {
                if k < fm.n_cols() {
                    reports.push(cross_validate(
                        fm,
                        &clf,
                        config.classify.folds,
                        config.classify.seed,
                        Some(k),
                    )?);
                }
            }
        }
    }

    for report in &reports {
        let path = report_path(out_dir, report);
        write_atomic(
            &path,
            &serde_json::to_string_pretty(report).expect("serializable report"),
        )?;
    }
    Ok(reports)
}

fn report_path(out_dir: &Path, report: &CvReport) -> PathBuf {
    out_dir
        .join("reports")
        .join(format!("{}__{}.json", report.featurization_id, report.classifier_id))
}

fn write_summary(path: &Path, reports: &[CvReport]) -> Result<()> {
    let mut rows: Vec<&CvReport> = reports.iter().collect();
    rows.sort_by(|a, b| {
        summary_key(a)
            .cmp(&summary_key(b))
    });
    let mut out = String::from("target,featurization,classifier,mean,std,min,q1,median,q3,max\n");
    for r in rows {
        let (target, feat) = split_featurization_id(&r.featurization_id);
        let _ = writeln!(
            out,
            "{target},{feat},{},{},{},{},{},{},{},{}",
            r.classifier_id,
            r.mean,
            r.std,
            r.box_stats.min,
            r.box_stats.q1,
            r.box_stats.median,
            r.box_stats.q3,
            r.box_stats.max
        );
    }
    write_atomic(path, &out)
}

fn summary_key(r: &CvReport) -> (String, String, String) {
    let (target, feat) = split_featurization_id(&r.featurization_id);
    (target.to_string(), feat.to_string(), r.classifier_id.clone())
}

fn split_featurization_id(id: &str) -> (&str, &str) {
    match id.split_once('-') {
        Some((target, rest)) => (target, rest),
        None => ("unknown", id),
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Compute the feature matrix for one featurization spec.
pub fn compute_feature_matrix(
    spec: &FeaturizationSpec,
    surfaces: &[SurfaceGrid],
    profiles: &[Profile],
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<FeatureMatrix> {
    let id = spec.id();
    match spec.target {
        Target::Profile => {
            let labels: Vec<RoughnessLabel> = profiles.iter().map(|p| p.label).collect();
            let (rows, names) = profile_features(spec, profiles, config, out_dir)?;
            FeatureMatrix::new(rows, labels, names, id)
        }
        Target::Surface => {
            let labels: Vec<RoughnessLabel> = surfaces.iter().map(|s| s.label).collect();
            let (rows, names) = surface_features(spec, surfaces, config, out_dir)?;
            FeatureMatrix::new(rows, labels, names, id)
        }
    }
}

fn profile_features(
    spec: &FeaturizationSpec,
    profiles: &[Profile],
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    match spec.method {
        Method::Cc | Method::Pi | Method::Tf => {
            let diagrams: Vec<Vec<PersistenceDiagram>> = profiles
                .par_iter()
                .map(|p| sublevel_pd_profile(p).map(|pd| vec![pd]))
                .collect::<Result<_>>()?;
            if config.dump_diagrams {
                dump_diagrams(out_dir, &spec.id(), &diagrams)?;
            }
            tda_rows(spec, &diagrams, &[0])
        }
        Method::GaussProfile => {
            let rows: Vec<Vec<f64>> = profiles
                .par_iter()
                .map(|p| {
                    let r = roughness_profile_gaussian(p)?;
                    Ok(profile_parameters(&r)?.to_vec())
                })
                .collect::<Result<_>>()?;
            if config.dump_intermediates {
                dump_mean_lines(out_dir, &spec.id(), profiles, |p| {
                    let cutoff = crate::profile_baselines::select_cutoff(p)?;
                    gaussian_mean_line(p, cutoff)
                })?;
            }
            Ok((rows, names_of(&ProfileParams::NAMES)))
        }
        Method::FftDenoise => {
            let rows: Vec<Vec<f64>> = profiles
                .par_iter()
                .map(|p| {
                    let r = roughness_profile_fft(p, spec.threshold)?;
                    Ok(profile_parameters(&r)?.to_vec())
                })
                .collect::<Result<_>>()?;
            if config.dump_intermediates {
                dump_mean_lines(out_dir, &spec.id(), profiles, |p| {
                    fft_denoise_mean_line(p, spec.threshold)
                })?;
            }
            Ok((rows, names_of(&ProfileParams::NAMES)))
        }
        Method::FftPeaks => {
            let rows: Vec<Vec<f64>> = profiles
                .par_iter()
                .map(|p| Ok(peak_feature_vector(p, &PeakConfig::default())?.values))
                .collect::<Result<_>>()?;
            let mut names = Vec::new();
            for spectrum in ["fft", "psd"] {
                for k in 1..=PeakConfig::default().n_peaks {
                    names.push(format!("{spectrum}_f{k}"));
                    names.push(format!("{spectrum}_a{k}"));
                }
            }
            Ok((rows, names))
        }
        _ => Err(Error::config(format!(
            "method {} does not apply to profiles",
            spec.method.as_str()
        ))),
    }
}

fn surface_features(
    spec: &FeaturizationSpec,
    surfaces: &[SurfaceGrid],
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    match spec.method {
        Method::Cc | Method::Pi | Method::Tf => {
            let max_dim = *spec.homology_dims.iter().max().expect("validated nonempty");
            let diagrams: Vec<Vec<PersistenceDiagram>> = surfaces
                .par_iter()
                .map(|s| sublevel_pd_image(&s.grid, max_dim))
                .collect::<Result<_>>()?;
            if config.dump_diagrams {
                dump_diagrams(out_dir, &spec.id(), &diagrams)?;
            }
            tda_rows(spec, &diagrams, &spec.homology_dims)
        }
        Method::Gauss2dAreal => {
            let g2d = Gaussian2DConfig {
                kernel_size: spec.kernel_size,
            };
            let rows: Vec<Vec<f64>> = surfaces
                .par_iter()
                .map(|s| {
                    let r = roughness_surface(s, &g2d)?;
                    Ok(areal_parameters(&r)?.to_vec())
                })
                .collect::<Result<_>>()?;
            Ok((rows, names_of(&ArealParams::NAMES)))
        }
        Method::Fft2dAngular => {
            let g2d = Gaussian2DConfig {
                kernel_size: spec.kernel_size,
            };
            let peaks = PeakConfig::default();
            let rows: Vec<Vec<f64>> = surfaces
                .par_iter()
                .map(|s| Ok(angular_feature_vector(s, spec.prefilter, &g2d, &peaks)?.values))
                .collect::<Result<_>>()?;
            if config.dump_intermediates {
                dump_apsd(out_dir, &spec.id(), surfaces, spec.prefilter, &g2d)?;
            }
            let mut names: Vec<String> = (1..=5).map(|k| format!("ang_p{k}")).collect();
            names.push("zeta_c".into());
            names.push("zeta_d".into());
            Ok((rows, names))
        }
        _ => Err(Error::config(format!(
            "method {} does not apply to surfaces",
            spec.method.as_str()
        ))),
    }
}

/// Build per-specimen TDA feature rows, concatenating the requested
/// homology dimensions. `diagrams[i][d]` is specimen `i`'s dimension-`d`
/// diagram.
fn tda_rows(
    spec: &FeaturizationSpec,
    diagrams: &[Vec<PersistenceDiagram>],
    dims: &[usize],
) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); diagrams.len()];
    let mut names: Vec<String> = Vec::new();

    for &dim in dims {
        let slice: Vec<&PersistenceDiagram> = diagrams.iter().map(|ds| &ds[dim]).collect();
        match spec.method {
            Method::Cc => {
                for (row, pd) in rows.iter_mut().zip(&slice) {
                    row.extend(carlsson_coordinates(pd).to_vec());
                }
                for k in 1..=5 {
                    names.push(format!("cc_h{dim}_f{k}"));
                }
            }
            Method::Pi => {
                let config = PersistenceImageConfig::from_diagrams(
                    slice.iter().copied(),
                    spec.grid_cols,
                    spec.grid_rows,
                )?;
                let vectors: Vec<Vec<f64>> = slice
                    .par_iter()
                    .map(|pd| persistence_image(pd, &config).values)
                    .collect();
                for (row, v) in rows.iter_mut().zip(vectors) {
                    row.extend(v);
                }
                for r in 0..spec.grid_rows {
                    for c in 0..spec.grid_cols {
                        names.push(format!("pi_h{dim}_r{r}c{c}"));
                    }
                }
            }
            Method::Tf => {
                let config = TemplateConfig::from_diagrams(
                    slice.iter().copied(),
                    spec.mesh_a,
                    spec.mesh_b,
                )?;
                let vectors: Vec<Vec<f64>> = slice
                    .par_iter()
                    .map(|pd| template_features(pd, &config).values)
                    .collect();
                for (row, v) in rows.iter_mut().zip(vectors) {
                    row.extend(v);
                }
                for a in 0..spec.mesh_a {
                    for b in 0..spec.mesh_b {
                        names.push(format!("tf_h{dim}_a{a}b{b}"));
                    }
                }
            }
            _ => unreachable!("tda_rows called for non-TDA method"),
        }
    }
    Ok((rows, names))
}

fn names_of(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn dump_diagrams(
    out_dir: &Path,
    id: &str,
    diagrams: &[Vec<PersistenceDiagram>],
) -> Result<()> {
    let dir = out_dir.join("diagnostics").join(id);
    std::fs::create_dir_all(&dir)?;
    for (i, ds) in diagrams.iter().enumerate() {
        for pd in ds {
            let path = dir.join(format!("{i:05}_h{}.csv", pd.dim()));
            write_atomic(&path, &io::diagram_to_csv(pd))?;
        }
    }
    Ok(())
}

fn dump_mean_lines(
    out_dir: &Path,
    id: &str,
    profiles: &[Profile],
    mean_line: impl Fn(&Profile) -> Result<Profile> + Sync,
) -> Result<()> {
    let dir = out_dir.join("diagnostics");
    std::fs::create_dir_all(&dir)?;
    let lines: Vec<Profile> = profiles
        .par_iter()
        .map(&mean_line)
        .collect::<Result<_>>()?;
    write_atomic(
        &dir.join(format!("{id}-mean-lines.csv")),
        &io::profiles_to_csv(&lines)?,
    )
}

fn dump_apsd(
    out_dir: &Path,
    id: &str,
    surfaces: &[SurfaceGrid],
    prefilter: bool,
    g2d: &Gaussian2DConfig,
) -> Result<()> {
    let dir = out_dir.join("diagnostics").join(id);
    std::fs::create_dir_all(&dir)?;
    for s in surfaces {
        let spec = if prefilter {
            crate::areal_baselines::apsd(&roughness_surface(s, g2d)?)
        } else {
            crate::areal_baselines::apsd(s)
        };
        let as_surface = s.with_grid(spec.values);
        io::write_surf1(&dir.join(format!("apsd_{:04}.surf1", s.index)), &as_surface)?;
    }
    Ok(())
}

/// Merge CvReport JSONs from several run directories into one CSV, sorted
/// by (target, featurization, classifier). Missing or corrupt files are
/// skipped with a warning; an empty merge is an error.
pub fn report(run_dirs: &[PathBuf]) -> Result<(String, Vec<String>)> {
    let mut reports: Vec<CvReport> = Vec::new();
    let mut warnings = Vec::new();
    for dir in run_dirs {
        let reports_dir = dir.join("reports");
        let entries = match std::fs::read_dir(&reports_dir) {
            Ok(e) => e,
            Err(e) => {
                warnings.push(format!("skipping {}: {e}", reports_dir.display()));
                continue;
            }
        };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            match std::fs::read_to_string(&path)
                .map_err(Error::from)
                .and_then(|t| {
                    serde_json::from_str::<CvReport>(&t)
                        .map_err(|e| Error::data(e.to_string()))
                }) {
                Ok(r) => reports.push(r),
                Err(e) => warnings.push(format!("skipping {}: {e}", path.display())),
            }
        }
    }
    if reports.is_empty() {
        return Err(Error::data("no readable reports in the given directories"));
    }

    reports.sort_by(|a, b| summary_key(a).cmp(&summary_key(b)));
    let mut out = String::from("target,featurization,classifier,mean,std,min,q1,median,q3,max\n");
    for r in &reports {
        let (target, feat) = split_featurization_id(&r.featurization_id);
        let _ = writeln!(
            out,
            "{target},{feat},{},{},{},{},{},{},{},{}",
            r.classifier_id,
            r.mean,
            r.std,
            r.box_stats.min,
            r.box_stats.q1,
            r.box_stats.median,
            r.box_stats.q3,
            r.box_stats.max
        );
    }
    Ok((out, warnings))
}
