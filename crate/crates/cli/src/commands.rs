use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tabsyn_core::baselines::{fit, grid_search, ClassifierKind, HyperGrid, Params};
use tabsyn_core::eval::{evaluate, render_table, ExperimentConfig, ExperimentReport};
use tabsyn_core::features::{distance_to_nearest_line, evi, ndvi, BandSample, GeoPoint};
use tabsyn_core::gan::{build_condition, train, train_with_encoder, TrainConfig};
use tabsyn_core::mode_norm::{RowEncoder, VgmConfig};
use tabsyn_core::table::{split_train_test, SplitSpec};
use tabsyn_core::{demo, random, ColumnKind, DataTable, Row, Value};

use crate::bundle::{self, Artifact, ClassifierBundle, EncoderBundle, GanBundle};
use crate::csv_io::{parse_cell, parse_polylines, RawTable};
use crate::files::{check_paths, load_schema, load_table, read_json, read_text, save_table, write_atomic, write_json};
use crate::report::{grid_csv, loss_csv, summary_csv, weighted_text};
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "tabsyn", version, about = "Conditional tabular GAN augmentation for small two-class tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble a table from raw columns, deriving vegetation indices and
    /// power-line distance where the schema asks for them
    Ingest(IngestArgs),
    /// Seeded train/test split
    Split(SplitArgs),
    /// Fit mode-specific normalization for every continuous column
    FitModes(FitModesArgs),
    /// Train the conditional GAN
    TrainGan(TrainGanArgs),
    /// Draw synthetic rows from a trained GAN
    Sample(SampleArgs),
    /// Append synthetic rows to a training table
    Augment(AugmentArgs),
    /// Fit one classifier
    Train(TrainArgs),
    /// Cross-validated hyperparameter sweep
    Gridsearch(GridArgs),
    /// Score a fitted classifier on a labeled table
    Evaluate(EvaluateArgs),
    /// Baseline vs augmented comparison over all classifiers
    Experiment(ExperimentArgs),
    /// Render a saved experiment report
    Report(ReportArgs),
    /// Write one of the bundled synthetic datasets and its schema
    DemoData(DemoArgs),
}

#[derive(Debug, Args)]
pub struct TableIn {
    /// Table CSV
    #[arg(long = "in")]
    input: PathBuf,
    /// Schema JSON
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Raw CSV with named columns (a superset of what the schema needs)
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    /// Power lines as `line_id,vertex_order,lat,lon`
    #[arg(long)]
    lines: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long, default_value_t = 0.7)]
    ratio: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_test: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitModesArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    max_modes: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GanFlags {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    noise_dim: Option<usize>,
    #[arg(long)]
    hidden_width: Option<usize>,
    #[arg(long)]
    discriminator_steps: Option<usize>,
    #[arg(long)]
    discriminator_dropout: Option<f64>,
    #[arg(long)]
    max_modes: Option<usize>,
}

impl GanFlags {
    fn apply(&self, mut c: TrainConfig) -> TrainConfig {
        c.epochs = self.epochs.unwrap_or(c.epochs);
        c.batch_size = self.batch_size.unwrap_or(c.batch_size);
        c.learning_rate = self.learning_rate.unwrap_or(c.learning_rate);
        c.noise_dim = self.noise_dim.unwrap_or(c.noise_dim);
        c.hidden_width = self.hidden_width.unwrap_or(c.hidden_width);
        c.discriminator_steps = self.discriminator_steps.unwrap_or(c.discriminator_steps);
        c.discriminator_dropout = self.discriminator_dropout.unwrap_or(c.discriminator_dropout);
        c.vgm.max_modes = self.max_modes.unwrap_or(c.vgm.max_modes);
        c
    }
}

#[derive(Debug, Args)]
pub struct TrainGanArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long)]
    seed: u64,
    /// Reuse a fitted encoder instead of fitting one
    #[arg(long)]
    encoder: Option<PathBuf>,
    #[command(flatten)]
    gan: GanFlags,
    #[arg(long)]
    out: PathBuf,
    /// Per-epoch losses as CSV
    #[arg(long)]
    loss_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// GAN bundle
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    seed: u64,
    /// Fix one discrete column, as `column=category`
    #[arg(long)]
    condition: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long)]
    model: PathBuf,
    /// Synthetic rows to add; defaults to the table's row count
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long, default_value = demo::LABEL)]
    label: String,
    /// dt, rf, gb, svm or nn; default settings unless --params is given
    #[arg(long, value_parser = parse_kind)]
    classifier: ClassifierKind,
    /// Classifier settings as JSON (for example a grid search winner)
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long, default_value = demo::LABEL)]
    label: String,
    #[arg(long, value_parser = parse_kind)]
    classifier: ClassifierKind,
    /// Grid as JSON; the standard grid for the classifier otherwise
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long)]
    seed: u64,
    /// One row per cell
    #[arg(long)]
    out: PathBuf,
    /// Winning settings as JSON, usable with `train --params`
    #[arg(long)]
    best_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    table: TableIn,
    /// Classifier bundle
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = demo::POSITIVE)]
    positive: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    text_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    table: TableIn,
    #[arg(long, default_value = demo::LABEL)]
    label: String,
    #[arg(long, default_value = demo::POSITIVE)]
    positive: String,
    #[arg(long)]
    seed: u64,
    /// Number of repeats; repeat r uses seed + r
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[arg(long, default_value_t = 0.7)]
    ratio: f64,
    /// Comma-separated subset of dt,rf,gb,svm,nn
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    classifiers: Vec<ClassifierKind>,
    /// Synthetic rows per repeat; defaults to the training split size
    #[arg(long)]
    n_syn: Option<usize>,
    #[command(flatten)]
    gan: GanFlags,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    text_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Experiment report JSON
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// blobs, rings, two-mode, small-task or wildfire
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    schema_out: PathBuf,
}

fn parse_kind(s: &str) -> Result<ClassifierKind, String> {
    ClassifierKind::parse(s).ok_or_else(|| format!("unknown classifier `{s}` (expected dt, rf, gb, svm or nn)"))
}

fn load_artifact<T: Artifact>(path: &Path) -> CliResult<T> {
    bundle::from_json(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn save_artifact<T: Artifact>(path: &Path, artifact: &T) -> CliResult<()> {
    write_atomic(path, bundle::to_json(artifact).as_bytes())
}

fn opt(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}

fn paths<'a>(xs: &[Option<&'a Path>]) -> Vec<&'a Path> {
    xs.iter().flatten().copied().collect()
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Split(a) => split(a),
        Command::FitModes(a) => fit_modes(a),
        Command::TrainGan(a) => train_gan(a),
        Command::Sample(a) => sample(a),
        Command::Augment(a) => augment(a),
        Command::Train(a) => train_classifier(a),
        Command::Gridsearch(a) => gridsearch(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Experiment(a) => experiment(a),
        Command::Report(a) => report(a),
        Command::DemoData(a) => demo_data(a),
    }
}

fn load(t: &TableIn) -> CliResult<DataTable> {
    let schema = load_schema(&t.schema)?;
    load_table(&t.input, &schema)
}

/// Schema columns the raw file lacks but that can be computed from
/// other raw columns.
fn derive_cell(raw: &RawTable, row: usize, name: &str, lines: Option<&[tabsyn_core::features::Polyline]>) -> CliResult<Option<f64>> {
    let need = |col: &str| -> CliResult<f64> {
        let c = raw
            .column(col)
            .ok_or_else(|| CliError::Data(format!("column `{name}` is missing and cannot be derived without `{col}`")))?;
        Ok(raw.number(row, c)?)
    };
    let v = match name {
        "ndvi" => ndvi(&BandSample {
            blue: 0.0,
            red: need("red")?,
            nir: need("nir")?,
        })?,
        "evi" => evi(&BandSample {
            blue: need("blue")?,
            red: need("red")?,
            nir: need("nir")?,
        })?,
        "powerline_distance_m" => {
            let lines = lines.ok_or_else(|| CliError::Usage("deriving `powerline_distance_m` needs --lines".into()))?;
            let p = GeoPoint::new(need("lat")?, need("lon")?)?;
            distance_to_nearest_line(p, lines)?
        }
        _ => return Ok(None),
    };
    Ok(Some(v))
}

fn ingest(a: IngestArgs) -> CliResult<()> {
    check_paths(&paths(&[Some(&a.input), Some(&a.schema), opt(&a.lines)]), &[&a.out])?;
    let schema = load_schema(&a.schema)?;
    let raw = RawTable::parse(&read_text(&a.input)?)?;
    let lines = match &a.lines {
        Some(p) => Some(parse_polylines(&read_text(p)?)?),
        None => None,
    };
    let mut rows: Vec<Row> = Vec::with_capacity(raw.rows.len());
    for r in 0..raw.rows.len() {
        let mut row = Vec::with_capacity(schema.len());
        for (c, col) in schema.columns().iter().enumerate() {
            let value = match raw.column(&col.name) {
                Some(i) => parse_cell(&schema, c, &raw.rows[r][i], r + 1)?,
                None => match (&col.kind, derive_cell(&raw, r, &col.name, lines.as_deref())?) {
                    (ColumnKind::Continuous, Some(v)) => Value::Continuous(v),
                    _ => return Err(tabsyn_core::Error::UnknownColumn(col.name.clone()).into()),
                },
            };
            row.push(value);
        }
        rows.push(row);
    }
    save_table(&a.out, &DataTable::new(schema, rows)?)
}

fn split(a: SplitArgs) -> CliResult<()> {
    check_paths(&[&a.table.input, &a.table.schema], &[&a.out_train, &a.out_test])?;
    let table = load(&a.table)?;
    let (train, test) = split_train_test(&table, &SplitSpec::new(a.ratio, a.seed)?)?;
    save_table(&a.out_train, &train)?;
    save_table(&a.out_test, &test)
}

fn fit_modes(a: FitModesArgs) -> CliResult<()> {
    check_paths(&[&a.table.input, &a.table.schema], &[&a.out])?;
    let table = load(&a.table)?;
    let cfg = VgmConfig {
        max_modes: a.max_modes,
        ..VgmConfig::default()
    };
    let encoder = RowEncoder::fit(&table, &cfg, a.seed)?;
    save_artifact(&a.out, &EncoderBundle { encoder })
}

fn train_gan(a: TrainGanArgs) -> CliResult<()> {
    check_paths(
        &paths(&[Some(&a.table.input), Some(&a.table.schema), opt(&a.encoder)]),
        &paths(&[Some(&a.out), opt(&a.loss_out)]),
    )?;
    let table = load(&a.table)?;
    let config = a.gan.apply(TrainConfig {
        seed: a.seed,
        ..TrainConfig::default()
    });
    let (model, history) = match &a.encoder {
        Some(p) => train_with_encoder(&table, load_artifact::<EncoderBundle>(p)?.encoder, &config)?,
        None => train(&table, &config)?,
    };
    if let Some(p) = &a.loss_out {
        write_atomic(p, loss_csv(&history).as_bytes())?;
    }
    save_artifact(&a.out, &GanBundle { config, model, history })
}

fn sample(a: SampleArgs) -> CliResult<()> {
    check_paths(&[&a.model], &[&a.out])?;
    let bundle: GanBundle = load_artifact(&a.model)?;
    let condition = match &a.condition {
        Some(spec) => {
            let (col, cat) = spec
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--condition expects column=category, got `{spec}`")))?;
            Some(build_condition(bundle.model.schema(), col, cat)?)
        }
        None => None,
    };
    let mut rng = random::seeded(a.seed);
    let table = bundle.model.sample_synthetic(a.rows, condition.as_ref(), &mut rng)?;
    save_table(&a.out, &table)
}

fn augment(a: AugmentArgs) -> CliResult<()> {
    check_paths(&[&a.table.input, &a.table.schema, &a.model], &[&a.out])?;
    let table = load(&a.table)?;
    let bundle: GanBundle = load_artifact(&a.model)?;
    let mut rng = random::seeded(a.seed);
    let out = bundle.model.augment(&table, a.rows.unwrap_or(table.len()), &mut rng)?;
    save_table(&a.out, &out)
}

fn train_classifier(a: TrainArgs) -> CliResult<()> {
    check_paths(&paths(&[Some(&a.table.input), Some(&a.table.schema), opt(&a.params)]), &[&a.out])?;
    let table = load(&a.table)?;
    let params: Params = match &a.params {
        Some(p) => read_json(p)?,
        None => a.classifier.default_params(),
    };
    if params.kind() != a.classifier {
        return Err(CliError::Usage(format!(
            "--params holds {} settings but --classifier is {}",
            params.kind().short_name(),
            a.classifier.short_name()
        )));
    }
    let classifier = fit(&table, &a.label, &params, a.seed)?;
    save_artifact(
        &a.out,
        &ClassifierBundle {
            label: a.label,
            params,
            seed: a.seed,
            classifier,
        },
    )
}

fn gridsearch(a: GridArgs) -> CliResult<()> {
    check_paths(
        &paths(&[Some(&a.table.input), Some(&a.table.schema), opt(&a.grid)]),
        &paths(&[Some(&a.out), opt(&a.best_out)]),
    )?;
    let table = load(&a.table)?;
    let grid: HyperGrid = match &a.grid {
        Some(p) => read_json(p)?,
        None => HyperGrid::standard(a.classifier),
    };
    if grid.kind() != a.classifier {
        return Err(CliError::Usage("--grid does not match --classifier".into()));
    }
    let result = grid_search(&grid, &table, &a.label, a.folds, a.seed)?;
    write_atomic(&a.out, grid_csv(&result).as_bytes())?;
    if let Some(p) = &a.best_out {
        write_json(p, result.best_params())?;
    }
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> CliResult<()> {
    check_paths(
        &[&a.table.input, &a.table.schema, &a.model],
        &paths(&[Some(&a.out), opt(&a.text_out)]),
    )?;
    let table = load(&a.table)?;
    let b: ClassifierBundle = load_artifact(&a.model)?;
    let label = table.schema().discrete_index(&b.label)?;
    let positive = table.schema().category_index(label, &a.positive)?;
    let pred = b.classifier.predict(&table)?;
    let report = evaluate(&pred, &table.categories_of(label), &positive)?;
    write_json(&a.out, &report)?;
    if let Some(p) = &a.text_out {
        let names = table.schema().columns()[label].categories().unwrap_or_default();
        let negative = &names[1 - positive];
        write_atomic(p, weighted_text(&report, &a.positive, negative).as_bytes())?;
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> CliResult<()> {
    check_paths(
        &[&a.table.input, &a.table.schema],
        &paths(&[Some(&a.out), opt(&a.text_out)]),
    )?;
    if a.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let table = load(&a.table)?;
    let seeds = (0..a.repeats).map(|r| a.seed.wrapping_add(r)).collect();
    let mut config = ExperimentConfig::new(&a.label, &a.positive, seeds);
    config.train_fraction = a.ratio;
    config.n_syn = a.n_syn;
    config.gan = a.gan.apply(config.gan);
    if !a.classifiers.is_empty() {
        config.classifiers = a.classifiers.iter().map(|k| k.default_params()).collect();
    }
    let report = tabsyn_core::eval::run_experiment(&table, &config)?;
    write_json(&a.out, &report)?;
    if let Some(p) = &a.text_out {
        write_atomic(p, render_table(&report).as_bytes())?;
    }
    Ok(())
}

fn report(a: ReportArgs) -> CliResult<()> {
    check_paths(&[&a.input], &[&a.out])?;
    let report: ExperimentReport = read_json(&a.input)?;
    match a.format {
        ReportFormat::Text => write_atomic(&a.out, render_table(&report).as_bytes()),
        ReportFormat::Csv => write_atomic(&a.out, summary_csv(&report).as_bytes()),
        ReportFormat::Json => write_json(&a.out, &report),
    }
}

fn demo_data(a: DemoArgs) -> CliResult<()> {
    check_paths(&[], &[&a.out, &a.schema_out])?;
    let table = demo::by_name(&a.dataset, a.rows, a.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    write_json(&a.schema_out, table.schema())?;
    save_table(&a.out, &table)
}

