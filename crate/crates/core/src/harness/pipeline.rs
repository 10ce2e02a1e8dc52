use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;

use super::io::{
    create_dir, decision_cells, decision_header, num, parse, parse_stats, read_csv, stats_cells, write_csv, write_text,
    STATS_HEADER,
};
use super::plots::{emit_plots, PlotData};
use super::report::{RejectionCounts, RunSummary};
use super::{
    filter_training_set, read_objective_rows, report_runtime_ratio, vet_candidates, write_objective_rows,
    HarnessConfig, HarnessError, Medians, Rejection, ReportRow, RunReport, StageExt, Timings,
};
use crate::cgan::{
    build_label_grid, combine_runs, generate, run_rng, select_candidate_snapshots, train, Experiment,
    GeneratedCandidate, IterationStats, NormalizationSpec, RunKind, TrainingData, LABEL_COUNT,
};
use crate::district::{DecisionVector, ObjectiveTriple, ReferenceModel, FIELD_COUNT, OBJECTIVE_NAMES};
use crate::metrics::{cumulative_hypervolume, extract_best, minmax_scale, Anchors};
use crate::moo::{run_nsga2, SolutionArchive};
use crate::nn::Mlp;

/// Shared context of every stage: settings, output root and evaluator.
#[derive(Clone, Debug)]
pub struct Harness {
    pub config: HarnessConfig,
    pub out_dir: PathBuf,
    pub model: ReferenceModel,
}

impl Harness {
    pub fn new(
        config: HarnessConfig,
        out_dir: impl Into<PathBuf>,
        model: ReferenceModel,
    ) -> Result<Self, HarnessError> {
        config.validate()?;
        Ok(Self { config, out_dir: out_dir.into(), model })
    }

    pub fn archive_path(&self) -> PathBuf {
        self.out_dir.join("archive.csv")
    }

    pub fn experiment_dir(&self, e: Experiment) -> PathBuf {
        self.out_dir.join(e.name())
    }
}

/// A finished GA run.
#[derive(Clone, Debug)]
pub struct GaRun {
    pub archive: SolutionArchive,
    pub seconds: f64,
    /// Hypervolume of the cumulative feasible front after each generation,
    /// scaled by the final archive's extremes.
    pub progress: Vec<f64>,
}

/// Runs the GA and writes `archive.csv`, `ga_timing.csv` and
/// `ga_progress.csv`.
pub fn optimize(h: &Harness) -> Result<GaRun, HarnessError> {
    create_dir(&h.out_dir).stage("optimize")?;
    let cfg = h.config.ga_config();
    let start = Instant::now();
    let archive = run_nsga2(&cfg, &h.model).stage("optimize")?;
    let seconds = start.elapsed().as_secs_f64();
    archive.save(&h.archive_path()).stage("optimize")?;
    write_csv(
        &h.out_dir.join("ga_timing.csv"),
        &["seconds", "evaluations", "population_size", "generations"],
        &[vec![num(seconds), archive.len().to_string(), cfg.population_size.to_string(), cfg.generations.to_string()]],
    )
    .stage("optimize")?;

    let objectives: Vec<ObjectiveTriple> = archive.feasible().map(|(_, o)| o).collect();
    let progress = match Anchors::from_objectives(&objectives) {
        Ok(anchors) => cumulative_hypervolume(&archive, &anchors),
        Err(_) => Vec::new(),
    };
    let rows: Vec<Vec<String>> = progress.iter().enumerate().map(|(g, v)| vec![g.to_string(), num(*v)]).collect();
    write_csv(&h.out_dir.join("ga_progress.csv"), &["generation", "hypervolume"], &rows).stage("optimize")?;
    log::info!("GA: {} evaluations in {seconds:.2} s, {} feasible", archive.len(), objectives.len());
    Ok(GaRun { archive, seconds, progress })
}

/// Reads `archive.csv` and, when present, the GA wall-clock time.
pub fn load_archive(h: &Harness) -> Result<(SolutionArchive, Option<f64>), HarnessError> {
    let archive = SolutionArchive::load(&h.archive_path()).stage("load archive")?;
    let timing = h.out_dir.join("ga_timing.csv");
    let seconds = if timing.exists() {
        let (_, rows) = read_csv(&timing).stage("load archive")?;
        match rows.first() {
            Some(r) => Some(parse::<f64>(&timing, "seconds", &r[0]).stage("load archive")?),
            None => None,
        }
    } else {
        None
    };
    Ok((archive, seconds))
}

/// One trained GAN run, reduced to what generation needs.
#[derive(Clone, Debug)]
pub struct TrainedRun {
    pub kind: RunKind,
    pub stream: u64,
    pub iterations: usize,
    pub history: Vec<IterationStats>,
    /// Snapshot statistics with the generator frozen at that iteration.
    pub snapshots: Vec<(IterationStats, Mlp)>,
    /// Indices into `snapshots` chosen for generation.
    pub selected: Vec<usize>,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct TrainedExperiment {
    pub experiment: Experiment,
    pub training: Vec<(DecisionVector, ObjectiveTriple)>,
    pub medians: Medians,
    pub norm: NormalizationSpec,
    /// Short run first, then long run.
    pub runs: Vec<TrainedRun>,
}

fn experiment_index(e: Experiment) -> u64 {
    Experiment::ALL.iter().position(|&x| x == e).expect("known experiment") as u64
}

/// Random stream of one training run; distinct per experiment and run.
fn run_stream(e: Experiment, kind: RunKind) -> u64 {
    let k = match kind {
        RunKind::Short => 1,
        RunKind::Long => 2,
    };
    ((experiment_index(e) + 1) << 8) | k
}

fn generation_seed(seed: u64, e: Experiment) -> u64 {
    seed ^ (experiment_index(e) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn training_data(norm: &NormalizationSpec, rows: &[(DecisionVector, ObjectiveTriple)]) -> TrainingData {
    let n = rows.len();
    let mut features = Array2::zeros((n, FIELD_COUNT));
    let mut labels = Array2::zeros((n, LABEL_COUNT));
    for (i, (d, o)) in rows.iter().enumerate() {
        for (j, v) in norm.normalize_features(d).into_iter().enumerate() {
            features[[i, j]] = v;
        }
        for (j, v) in norm.normalize_label(o).into_iter().enumerate() {
            labels[[i, j]] = v;
        }
    }
    TrainingData { features, labels }
}

fn write_normalization(path: &Path, norm: &NormalizationSpec) -> Result<(), HarnessError> {
    let mut rows = Vec::new();
    for (name, (lo, hi)) in decision_header().into_iter().zip(norm.feature_ranges) {
        rows.push(vec!["feature".to_string(), name, lo.to_string(), hi.to_string()]);
    }
    for (k, name) in OBJECTIVE_NAMES.iter().enumerate() {
        rows.push(vec!["label".to_string(), name.to_string(), num(norm.label_min[k]), num(norm.label_max[k])]);
    }
    write_csv(path, &["kind", "name", "min", "max"], &rows)
}

fn write_medians(path: &Path, m: &Medians) -> Result<(), HarnessError> {
    write_csv(path, &["lcc", "ghg", "walkscore"], &[vec![num(m.lcc), num(m.ghg), num(m.walkscore)]])
}

fn read_medians(path: &Path) -> Result<Medians, HarnessError> {
    let (_, rows) = read_csv(path)?;
    let r = rows
        .first()
        .ok_or_else(|| HarnessError::Format { path: path.display().to_string(), message: "no medians row".into() })?;
    Ok(Medians {
        lcc: parse(path, "lcc", &r[0])?,
        ghg: parse(path, "ghg", &r[1])?,
        walkscore: parse(path, "walkscore", &r[2])?,
    })
}

fn persist_run(dir: &Path, run: &TrainedRun, discriminator: &Mlp) -> Result<(), HarnessError> {
    create_dir(dir)?;
    let history: Vec<Vec<String>> = run.history.iter().map(stats_cells).collect();
    write_csv(&dir.join("history.csv"), &STATS_HEADER, &history)?;
    let mut header: Vec<&str> = STATS_HEADER.to_vec();
    header.push("selected");
    let rows: Vec<Vec<String>> = run
        .snapshots
        .iter()
        .enumerate()
        .map(|(i, (s, _))| {
            let mut r = stats_cells(s);
            r.push(u8::from(run.selected.contains(&i)).to_string());
            r
        })
        .collect();
    write_csv(&dir.join("snapshots.csv"), &header, &rows)?;
    for (s, g) in &run.snapshots {
        g.save(&dir.join(format!("generator_{}.txt", s.iteration)))?;
    }
    discriminator.save(&dir.join(format!("discriminator_{}.txt", run.iterations)))?;
    write_csv(&dir.join("timing.csv"), &["seconds"], &[vec![num(run.seconds)]])
}

fn load_run(dir: &Path, kind: RunKind, stream: u64) -> Result<TrainedRun, HarnessError> {
    let path = dir.join("history.csv");
    let (_, rows) = read_csv(&path)?;
    let history: Vec<IterationStats> = rows.iter().map(|r| parse_stats(&path, r)).collect::<Result<_, _>>()?;
    let path = dir.join("snapshots.csv");
    let (_, rows) = read_csv(&path)?;
    let mut snapshots = Vec::with_capacity(rows.len());
    let mut selected = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let stats = parse_stats(&path, r)?;
        if r[STATS_HEADER.len()] == "1" {
            selected.push(i);
        }
        snapshots.push((stats, Mlp::load(&dir.join(format!("generator_{}.txt", stats.iteration)))?));
    }
    let path = dir.join("timing.csv");
    let (_, rows) = read_csv(&path)?;
    let seconds = match rows.first() {
        Some(r) => parse(&path, "seconds", &r[0])?,
        None => 0.0,
    };
    Ok(TrainedRun { kind, stream, iterations: history.len(), history, snapshots, selected, seconds })
}

/// Filters the archive, fits the normalization and trains the short and
/// long runs, persisting everything under the experiment directory.
pub fn train_stage(h: &Harness, e: Experiment, archive: &SolutionArchive) -> Result<TrainedExperiment, HarnessError> {
    let dir = h.experiment_dir(e);
    create_dir(&dir).stage("filter")?;
    let (training, medians) = filter_training_set(archive, e).stage("filter")?;
    write_objective_rows(&dir.join("training_set.csv"), &training).stage("filter")?;
    write_medians(&dir.join("medians.csv"), &medians).stage("filter")?;
    log::info!("{e}: {} training rows", training.len());

    let objectives: Vec<ObjectiveTriple> = training.iter().map(|r| r.1).collect();
    let norm = NormalizationSpec::fit(&objectives);
    write_normalization(&dir.join("normalization.csv"), &norm).stage("normalize")?;
    let data = training_data(&norm, &training);

    let mut runs = Vec::with_capacity(2);
    for (kind, iterations) in
        [(RunKind::Short, h.config.short_iterations(e)), (RunKind::Long, h.config.long_iterations(training.len()))]
    {
        let stream = run_stream(e, kind);
        let mut rng = run_rng(h.config.seed, stream);
        let start = Instant::now();
        let trained = train(&h.config.cgan, &data, iterations, &mut rng).stage("train")?;
        let seconds = start.elapsed().as_secs_f64();
        let stats: Vec<IterationStats> = trained.snapshots.iter().map(|s| s.stats).collect();
        let run = TrainedRun {
            kind,
            stream,
            iterations,
            history: trained.history,
            selected: select_candidate_snapshots(&stats),
            snapshots: trained.snapshots.into_iter().map(|s| (s.stats, s.generator)).collect(),
            seconds,
        };
        persist_run(&dir.join(kind.name()), &run, &trained.discriminator).stage("train")?;
        log::info!("{e}: {kind} run, {iterations} iterations in {seconds:.2} s");
        runs.push(run);
    }
    Ok(TrainedExperiment { experiment: e, training, medians, norm, runs })
}

/// Reloads what [`train_stage`] persisted.
pub fn load_trained(h: &Harness, e: Experiment) -> Result<TrainedExperiment, HarnessError> {
    let dir = h.experiment_dir(e);
    let training = read_objective_rows(&dir.join("training_set.csv")).stage("load training")?;
    if training.is_empty() {
        return Err(HarnessError::EmptyTrainingSet { experiment: e.to_string() }).stage("load training");
    }
    let medians = read_medians(&dir.join("medians.csv")).stage("load training")?;
    let objectives: Vec<ObjectiveTriple> = training.iter().map(|r| r.1).collect();
    let norm = NormalizationSpec::fit(&objectives);
    let runs = [RunKind::Short, RunKind::Long]
        .into_iter()
        .map(|k| load_run(&dir.join(k.name()), k, run_stream(e, k)))
        .collect::<Result<Vec<_>, _>>()
        .stage("load training")?;
    Ok(TrainedExperiment { experiment: e, training, medians, norm, runs })
}

/// Samples per label so that the pool reaches `target` across all
/// selected snapshots; at least one.
pub fn count_per_label(target: usize, labels: usize, snapshots: usize) -> usize {
    let slots = labels * snapshots;
    if slots == 0 {
        return 1;
    }
    target.div_ceil(slots).max(1)
}

fn write_label_grid(path: &Path, labels: &[[f64; LABEL_COUNT]], norm: &NormalizationSpec) -> Result<(), HarnessError> {
    let rows: Vec<Vec<String>> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let t = norm.denormalize_label(l);
            vec![i.to_string(), num(l[0]), num(l[1]), num(l[2]), num(t.lcc), num(t.ghg), num(t.walkscore)]
        })
        .collect();
    write_csv(path, &["label_index", "lcc", "ghg", "walkscore", "lcc_target", "ghg_target", "walkscore_target"], &rows)
}

fn write_candidates(
    path: &Path,
    pool: &[GeneratedCandidate],
    rejections: &[Option<Rejection>],
) -> Result<(), HarnessError> {
    let mut header: Vec<String> =
        ["run", "iteration", "label_index", "label_lcc", "label_ghg", "label_walkscore"].map(String::from).to_vec();
    header.extend((0..FIELD_COUNT).map(|f| format!("raw_{f}")));
    header.extend(decision_header());
    header.push("verdict".into());
    let rows: Vec<Vec<String>> = pool
        .iter()
        .zip(rejections)
        .map(|(c, why)| {
            let mut r = vec![c.run.to_string(), c.iteration.to_string(), c.label_index.to_string()];
            r.extend(c.label.iter().map(|&v| num(v)));
            r.extend(c.raw.iter().map(|&v| num(v)));
            r.extend(decision_cells(&c.decision));
            r.push(
                match why {
                    None => "admitted",
                    Some(Rejection::Constraint) => "constraint",
                    Some(Rejection::ArchiveDuplicate) => "archive_duplicate",
                    Some(Rejection::PoolDuplicate) => "pool_duplicate",
                }
                .to_string(),
            );
            r
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// Generates from the selected snapshots, vets the pool and computes the
/// metrics row. `ga_seconds` feeds the runtime ratio.
pub fn generate_stage(
    h: &Harness,
    trained: &TrainedExperiment,
    archive: &SolutionArchive,
    ga_seconds: Option<f64>,
) -> Result<RunReport, HarnessError> {
    let e = trained.experiment;
    let dir = h.experiment_dir(e);
    create_dir(&dir).stage("generate")?;

    let start = Instant::now();
    let grid = build_label_grid(e);
    write_label_grid(&dir.join("label_grid.csv"), &grid.labels, &trained.norm).stage("generate")?;
    let selected: usize = trained.runs.iter().map(|r| r.selected.len()).sum();
    let per_label = count_per_label(h.config.pool_target(e), grid.len(), selected);
    let seed = generation_seed(h.config.seed, e);
    let jobs: Vec<(RunKind, &(IterationStats, Mlp))> =
        trained.runs.iter().flat_map(|r| r.selected.iter().map(move |&i| (r.kind, &r.snapshots[i]))).collect();
    let batches = jobs
        .par_iter()
        .map(|(kind, (stats, g))| generate(g, &grid.labels, per_label, &trained.norm, *kind, stats.iteration, seed))
        .collect::<Result<Vec<_>, _>>()
        .stage("generate")?;
    let (mut short, mut long) = (Vec::new(), Vec::new());
    for ((kind, _), batch) in jobs.iter().zip(batches) {
        match kind {
            RunKind::Short => short.extend(batch),
            RunKind::Long => long.extend(batch),
        }
    }
    let pool = combine_runs(short, long);
    let generate_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let outcome = vet_candidates(&pool, &archive.decisions(), &h.model);
    let vet_seconds = start.elapsed().as_secs_f64();
    write_candidates(&dir.join("candidates.csv"), &pool, &outcome.rejections).stage("vet")?;
    let vetted: Vec<(DecisionVector, ObjectiveTriple)> =
        outcome.admitted.iter().map(|v| (v.decision, v.objectives)).collect();
    let mut header = decision_header();
    header.extend(["lcc", "ghg", "walkscore", "pool_index", "run", "iteration", "label_index"].map(String::from));
    let rows: Vec<Vec<String>> = outcome
        .admitted
        .iter()
        .map(|v| {
            let c = &pool[v.pool_index];
            let mut r = decision_cells(&v.decision);
            r.extend([num(v.objectives.lcc), num(v.objectives.ghg), num(v.objectives.walkscore)]);
            r.extend([v.pool_index.to_string(), c.run.to_string(), c.iteration.to_string(), c.label_index.to_string()]);
            r
        })
        .collect();
    write_csv(&dir.join("vetted.csv"), &header, &rows).stage("vet")?;

    let start = Instant::now();
    let train_points: Vec<ObjectiveTriple> = trained.training.iter().map(|r| r.1).collect();
    let gen_points: Vec<ObjectiveTriple> = vetted.iter().map(|r| r.1).collect();
    let anchors = Anchors::from_objectives(&train_points).stage("metrics")?;
    let train_scaled = minmax_scale(&train_points, &anchors);
    let hv_train = train_scaled.hypervolume();
    let hv_gen = (!gen_points.is_empty()).then(|| minmax_scale(&gen_points, &anchors).hypervolume());
    let train_best = extract_best(&trained.training).stage("metrics")?;
    let gen_best = if vetted.is_empty() { None } else { Some(extract_best(&vetted).stage("metrics")?) };
    let row = ReportRow::new(
        e,
        trained.training.len(),
        pool.len(),
        &train_best,
        gen_best.as_ref(),
        outcome.ratio,
        vetted.len(),
        (hv_train, hv_gen),
    );
    let mut warnings = trained.norm.warnings.clone();
    warnings.extend(train_scaled.warnings.iter().cloned());
    if selected == 0 {
        warnings.push("no snapshots were selected; the pool is empty".into());
    }
    if vetted.is_empty() {
        warnings.push("no generated candidate was admitted".into());
    }
    let metrics_seconds = start.elapsed().as_secs_f64();

    let runs_by_kind = |k: RunKind| trained.runs.iter().find(|r| r.kind == k).map_or(0.0, |r| r.seconds);
    let timings = Timings {
        ga_seconds,
        train_short_seconds: runs_by_kind(RunKind::Short),
        train_long_seconds: runs_by_kind(RunKind::Long),
        generate_seconds,
        vet_seconds,
        metrics_seconds,
    };
    let report = RunReport {
        row,
        seed: h.config.seed,
        generation_seed: seed,
        config_hash: h.config.hash(),
        medians: trained.medians,
        label_count: grid.len(),
        count_per_label: per_label,
        runs: trained
            .runs
            .iter()
            .map(|r| RunSummary {
                run: r.kind.to_string(),
                seed_stream: r.stream,
                iterations: r.iterations,
                selected_iterations: r.selected.iter().map(|&i| r.snapshots[i].0.iteration).collect(),
                history: r.history.clone(),
            })
            .collect(),
        rejections: RejectionCounts {
            constraint: outcome.rejected(Rejection::Constraint),
            archive_duplicate: outcome.rejected(Rejection::ArchiveDuplicate),
            pool_duplicate: outcome.rejected(Rejection::PoolDuplicate),
        },
        train_best,
        gen_best,
        train_points,
        gen_points,
        warnings,
        runtime_ratio: report_runtime_ratio(&timings),
        timings,
    };
    write_report(&dir, &report).stage("report")?;
    Ok(report)
}

fn write_report(dir: &Path, report: &RunReport) -> Result<(), HarnessError> {
    ReportRow::write_csv(std::slice::from_ref(&report.row), &dir.join("report.csv"))?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    write_text(&dir.join("report.json"), &json)?;
    report.timings.write_csv(&dir.join("timings.csv"))?;
    let mut text = report.warnings.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    write_text(&dir.join("warnings.txt"), &text)
}

/// Full experiment: reuses `archive.csv` when present, otherwise runs the
/// GA first. Writes `status.txt` with `ok` or the failing stage.
pub fn run_experiment(h: &Harness, e: Experiment) -> Result<RunReport, HarnessError> {
    let result = (|| -> Result<RunReport, HarnessError> {
        let (archive, ga_seconds) = if h.archive_path().exists() {
            load_archive(h)?
        } else {
            let ga = optimize(h)?;
            (ga.archive, Some(ga.seconds))
        };
        let trained = train_stage(h, e, &archive)?;
        let report = generate_stage(h, &trained, &archive, ga_seconds)?;
        emit_plots(&PlotData::from_report(&report), &h.experiment_dir(e).join("plots")).stage("plots")?;
        Ok(report)
    })();
    let dir = h.experiment_dir(e);
    if create_dir(&dir).is_ok() {
        let status = match &result {
            Ok(_) => "ok\n".to_string(),
            Err(err) => format!("failed at {}: {err}\n", err.stage().unwrap_or("unknown")),
        };
        // status is best effort; the error itself is returned
        let _ = write_text(&dir.join("status.txt"), &status);
    }
    result
}

/// Collects every experiment's `report.csv` into `<out>/report.csv`.
pub fn write_summary(h: &Harness) -> Result<Vec<ReportRow>, HarnessError> {
    let mut rows = Vec::new();
    for e in Experiment::ALL {
        let path = h.experiment_dir(e).join("report.csv");
        if path.exists() {
            rows.extend(ReportRow::read_csv(&path).stage("report")?);
        }
    }
    create_dir(&h.out_dir).stage("report")?;
    ReportRow::write_csv(&rows, &h.out_dir.join("report.csv")).stage("report")?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_per_label_reaches_target() {
        assert_eq!(count_per_label(875, 125, 7), 1);
        assert_eq!(count_per_label(5000, 500, 4), 3);
        assert_eq!(count_per_label(88, 125, 0), 1);
        for (t, l, s) in [(875, 125, 3), (5000, 500, 2), (4000, 500, 9)] {
            assert!(count_per_label(t, l, s) * l * s >= t);
        }
    }

    #[test]
    fn streams_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for e in Experiment::ALL {
            for k in [RunKind::Short, RunKind::Long] {
                assert!(seen.insert(run_stream(e, k)));
            }
        }
    }
}
