//! One function per stage; each reads its inputs and returns its report
//! files without touching the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{concatenate, Axis};
use serde::Serialize;

use super::config::{AggregateParams, BwmStage, HierarchyStage, PredictStage, SynthParams, SynthStage, ValidateStage};
use super::CliError;
use crate::bwm::{consistency_ratio, solve_weights, validate_instance, BwmDocument, ConsistencyIndexTable, WeightVector};
use crate::cvi::{compute_scale_cvi, RatingMatrix};
use crate::fire::{self, parse_dataset, CalendarEncoding, FireDataset, Scaler, ScalerKind, TargetTransform};
use crate::hierarchy::{aggregate_weights, compute_global_weights, AggregationMethod, LabeledWeights};
use crate::pipeline;
use crate::report::{fixed_width_table, fmt3, to_json, InputDigest, OutputSet, ReportHeader};
use crate::tabgan::{self, RowOrigin};

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn emit<P: Serialize, B: Serialize>(
    out: &mut OutputSet,
    command: &str,
    header: &ReportHeader,
    params: &P,
    result: &B,
    text: String,
) {
    out.add(format!("{command}.json"), to_json(header, params, result));
    out.add(format!("{command}.txt"), format!("{}{}", header.to_text(), text));
}

pub fn validate(stage: &ValidateStage, seed: u64) -> Result<OutputSet, CliError> {
    let bytes = read(&stage.survey)?;
    let text = String::from_utf8_lossy(&bytes);
    let ctx = |e: crate::cvi::CviError| CliError::Input(format!("{}: {e}", stage.survey.display()));
    let matrix = RatingMatrix::from_csv(&text).map_err(ctx)?;
    let report = compute_scale_cvi(&matrix, stage.params.threshold_proportion).map_err(ctx)?;
    let header = ReportHeader::new(
        "validate",
        seed,
        &stage.params,
        vec![InputDigest::new(file_name(&stage.survey), &bytes)],
    );
    let mut out = OutputSet::new();
    emit(&mut out, "validate", &header, &stage.params, &report, report.to_text());
    Ok(out)
}

/// Decision-maker documents at `path`: the file itself, or every `.json` and
/// `.toml` file directly inside the directory, sorted by name.
fn load_panel(path: &Path) -> Result<Vec<(String, BwmDocument, Vec<u8>)>, CliError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| CliError::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "toml")))
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no decision-maker files found",
            path.display()
        )));
    }
    files
        .into_iter()
        .map(|f| {
            let bytes = read(&f)?;
            let text = String::from_utf8_lossy(&bytes);
            let doc: BwmDocument = match f.extension().and_then(|e| e.to_str()) {
                Some("json") => serde_json::from_str(&text).map_err(|e| e.to_string()),
                _ => toml::from_str(&text).map_err(|e| e.to_string()),
            }
            .map_err(|e| CliError::Input(format!("{}: {e}", f.display())))?;
            Ok((file_name(&f), doc, bytes))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct DecisionMakerResult {
    file: String,
    decision_maker: Option<String>,
    best: String,
    worst: String,
    weights: Vec<f64>,
    xi_star: f64,
    consistency_ratio: f64,
    multiple_optima: bool,
}

#[derive(Debug, Serialize)]
struct PanelResult {
    criteria: Vec<String>,
    labels: Vec<String>,
    decision_makers: Vec<DecisionMakerResult>,
    method: AggregationMethod,
    aggregate: WeightVector,
}

fn solve_panel(path: &Path, method: AggregationMethod) -> Result<(PanelResult, Vec<InputDigest>), CliError> {
    let docs = load_panel(path)?;
    let criteria = docs[0].1.criteria.clone();
    let labels = docs[0].1.labels.clone().unwrap_or_else(|| criteria.clone());
    let table = ConsistencyIndexTable::default();
    let mut results = Vec::with_capacity(docs.len());
    let mut vectors = Vec::with_capacity(docs.len());
    let mut digests = Vec::with_capacity(docs.len());
    for (name, doc, bytes) in &docs {
        let at = |e: crate::bwm::BwmError| CliError::from_bwm(&path.join(name), e);
        if doc.criteria != criteria {
            return Err(CliError::Input(format!(
                "{}: criteria {:?} differ from {:?} in {}",
                path.join(name).display(),
                doc.criteria,
                criteria,
                docs[0].0
            )));
        }
        let inst = validate_instance(doc).map_err(at)?;
        let sol = solve_weights(&inst).map_err(at)?;
        let cr = consistency_ratio(sol.weights.xi_star, inst.best_to_worst(), &table).map_err(at)?;
        results.push(DecisionMakerResult {
            file: name.clone(),
            decision_maker: doc.decision_maker.clone(),
            best: criteria[inst.best()].clone(),
            worst: criteria[inst.worst()].clone(),
            weights: sol.weights.weights.clone(),
            xi_star: sol.weights.xi_star,
            consistency_ratio: cr,
            multiple_optima: sol.multiple_optima,
        });
        vectors.push(sol.weights);
        digests.push(InputDigest::new(name.clone(), bytes));
    }
    let aggregate = aggregate_weights(&vectors, method).map_err(|e| CliError::from_bwm(path, e))?;
    Ok((
        PanelResult {
            criteria,
            labels,
            decision_makers: results,
            method,
            aggregate,
        },
        digests,
    ))
}

impl PanelResult {
    fn to_text(&self) -> String {
        let mut headers: Vec<&str> = vec!["Decision-maker", "Best", "Worst"];
        headers.extend(self.criteria.iter().map(String::as_str));
        headers.extend(["xi*", "CR"]);
        let mut rows: Vec<Vec<String>> = self
            .decision_makers
            .iter()
            .map(|d| {
                let mut row = vec![
                    d.decision_maker.clone().unwrap_or_else(|| d.file.clone()),
                    d.best.clone(),
                    d.worst.clone(),
                ];
                row.extend(d.weights.iter().map(|w| fmt3(*w)));
                row.push(fmt3(d.xi_star));
                row.push(fmt3(d.consistency_ratio));
                row
            })
            .collect();
        let mut agg = vec![format!("{:?}", self.method), "-".into(), "-".into()];
        agg.extend(self.aggregate.weights.iter().map(|w| fmt3(*w)));
        agg.push(fmt3(self.aggregate.xi_star));
        agg.push("-".into());
        rows.push(agg);
        fixed_width_table(&headers, &rows)
    }
}

pub fn bwm(stage: &BwmStage, seed: u64) -> Result<OutputSet, CliError> {
    let (result, digests) = solve_panel(&stage.dir, stage.params.aggregate)?;
    let header = ReportHeader::new("bwm", seed, &stage.params, digests);
    let mut out = OutputSet::new();
    let text = result.to_text();
    emit(&mut out, "bwm", &header, &stage.params, &result, text);
    Ok(out)
}

/// Local panel for one dimension: `<locals>/<code>/` or `<locals>/<code>.{toml,json}`.
fn locate_local(locals: &Path, code: &str) -> Result<PathBuf, CliError> {
    let candidates = [
        locals.join(code),
        locals.join(format!("{code}.toml")),
        locals.join(format!("{code}.json")),
    ];
    candidates.into_iter().find(|p| p.exists()).ok_or_else(|| {
        CliError::Input(format!(
            "{}: no local comparisons for dimension {code}",
            locals.display()
        ))
    })
}

fn labeled(panel: &PanelResult) -> LabeledWeights {
    LabeledWeights {
        codes: panel.criteria.clone(),
        labels: panel.labels.clone(),
        weights: panel.aggregate.clone(),
    }
}

pub fn hierarchy(stage: &HierarchyStage, seed: u64) -> Result<OutputSet, CliError> {
    let method = stage.params.aggregate;
    let (dims, mut digests) = solve_panel(&stage.dims, method)?;
    for d in &mut digests {
        d.name = format!("dims/{}", d.name);
    }
    let mut locals = Vec::with_capacity(dims.criteria.len());
    for code in &dims.criteria {
        let path = locate_local(&stage.locals, code)?;
        let (panel, local_digests) = solve_panel(&path, method)?;
        digests.extend(local_digests.into_iter().map(|mut d| {
            d.name = format!("locals/{code}/{}", d.name);
            d
        }));
        locals.push(labeled(&panel));
    }
    let tree = compute_global_weights(&labeled(&dims), &locals).map_err(|e| CliError::from_bwm(&stage.locals, e))?;
    let header = ReportHeader::new("hierarchy", seed, &stage.params, digests);
    let mut out = OutputSet::new();
    let text = tree.to_text();
    emit(&mut out, "hierarchy", &header, &stage.params, &tree, text);
    Ok(out)
}

fn load_dataset(path: &Path) -> Result<(FireDataset, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let ds = parse_dataset(&String::from_utf8_lossy(&bytes), &file_name(path))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((ds, bytes))
}

#[derive(Debug, Serialize)]
struct SynthResult {
    real_rows: usize,
    synthetic_rows: usize,
    epochs: usize,
    columns: Vec<String>,
    /// Column means of the scaled real rows and of the synthetic rows.
    real_mean: Vec<f64>,
    synthetic_mean: Vec<f64>,
    final_d_objective: Option<f64>,
    final_g_objective: Option<f64>,
}

fn column_means(m: &ndarray::Array2<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![0.0; m.ncols()];
    }
    m.mean_axis(Axis(0)).map_or_else(Vec::new, |v| v.to_vec())
}

pub fn synth(stage: &SynthStage, seed: u64) -> Result<OutputSet, CliError> {
    let (ds, bytes) = load_dataset(&stage.train)?;
    let x = ds.feature_matrix(CalendarEncoding::Ordinal);
    let y = ds.targets(TargetTransform::Raw);
    let joint = concatenate![Axis(1), x.view(), y.view().insert_axis(Axis(1))];
    let mut scaler = Scaler::new(ScalerKind::MinMax);
    scaler
        .fit(&joint)
        .map_err(|e| CliError::Input(format!("{}: {e}", stage.train.display())))?;
    let scaled = scaler.transform(&joint).map_err(CliError::internal)?;
    let gan = &stage.params.gan;
    let generator = tabgan::train_gan(&scaled, gan).map_err(|e| CliError::from_gan(&stage.train, e))?;
    let rows = stage.params.rows.unwrap_or(ds.len());
    let augmented = tabgan::augment(&scaled, &generator, rows, gan.seed.wrapping_add(1)).map_err(CliError::internal)?;

    let mut columns = fire::feature_names(CalendarEncoding::Ordinal);
    columns.push("area".into());
    let synthetic = augmented.data.slice(ndarray::s![ds.len().., ..]).to_owned();
    let result = SynthResult {
        real_rows: ds.len(),
        synthetic_rows: rows,
        epochs: generator.loss_history.len(),
        columns: columns.clone(),
        real_mean: column_means(&scaled),
        synthetic_mean: column_means(&synthetic),
        final_d_objective: generator.loss_history.last().map(|r| r.d_objective),
        final_g_objective: generator.loss_history.last().map(|r| r.g_objective),
    };
    let header = ReportHeader::new(
        "synth",
        seed,
        &stage.params,
        vec![InputDigest::new(file_name(&stage.train), &bytes)],
    );
    let origin: Vec<&str> = augmented.origin.iter().map(|o| RowOrigin::as_str(*o)).collect();
    let mut out = OutputSet::new();
    let mean_rows: Vec<Vec<String>> = columns
        .iter()
        .enumerate()
        .map(|(j, c)| vec![c.clone(), fmt3(result.real_mean[j]), fmt3(result.synthetic_mean[j])])
        .collect();
    let text = format!(
        "{} real rows, {} synthetic rows, {} epochs\n{}",
        result.real_rows,
        result.synthetic_rows,
        result.epochs,
        fixed_width_table(&["Column", "Real mean", "Synthetic mean"], &mean_rows)
    );
    emit(&mut out, "synth", &header, &stage.params, &result, text);
    out.add("synth_rows.csv", fire::matrix_to_csv(&columns, &augmented.data, Some(("provenance", &origin))));
    out.add("synth_loss.csv", generator.loss_history_csv());
    Ok(out)
}

pub fn predict(stage: &PredictStage, seed: u64) -> Result<OutputSet, CliError> {
    let (ds, bytes) = load_dataset(&stage.data)?;
    let outcome = pipeline::run(&ds, &stage.params).map_err(|e| CliError::from_pipeline(&stage.data, e))?;
    let header = ReportHeader::new(
        "predict",
        seed,
        &stage.params,
        vec![InputDigest::new(file_name(&stage.data), &bytes)],
    );
    let mut out = OutputSet::new();
    let text = outcome.report.to_text();
    emit(&mut out, "predict", &header, &stage.params, &outcome.report, text);
    if let Some(g) = &outcome.generator {
        out.add("predict_gan_loss.csv", g.loss_history_csv());
    }
    Ok(out)
}

/// Synth parameters shared by the standalone command and `all`.
pub fn synth_params(rows: Option<usize>, gan: crate::tabgan::GanConfig) -> SynthParams {
    SynthParams { rows, gan }
}

pub fn aggregate_params(aggregate: AggregationMethod) -> AggregateParams {
    AggregateParams { aggregate }
}
