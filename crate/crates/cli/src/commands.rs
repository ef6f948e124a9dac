use qek_core::graph::{Dataset, Graph};
use qek_core::pipeline::{
    compute_features, feature_kernel, geometric_proxy, run_analytic_demo, run_benchmark,
    run_noise_study, select_subset, BenchmarkReport, FeatureSet, NoiseStudyReport,
};
use serde::Serialize;

use crate::config::{NoiseGraphs, RunConfig};
use crate::output::{matrix_csv, Csv, OutputDir};

pub struct Context {
    pub config: RunConfig,
    pub out: OutputDir,
    pub emit_plot_data: bool,
}

#[derive(Debug, Serialize)]
struct DatasetInfo {
    name: String,
    raw_samples: usize,
    samples: usize,
    max_nodes: usize,
    /// Original label and count per encoded class.
    classes: Vec<ClassInfo>,
    majority_fraction: f64,
    mean_nodes: f64,
    mean_edges: f64,
}

#[derive(Debug, Serialize)]
struct ClassInfo {
    class: usize,
    label: i64,
    count: usize,
}

pub fn dataset_info(ctx: &Context) -> anyhow::Result<()> {
    let dc = ctx.config.dataset()?;
    let raw = dc.load_raw()?;
    let d = qek_core::graph::preprocess(&raw, dc.max_nodes, dc.keep_classes.as_deref())?;
    let mean = |f: fn(&Graph) -> usize| {
        d.graphs.iter().map(|g| f(g) as f64).sum::<f64>() / d.len() as f64
    };
    let info = DatasetInfo {
        name: d.name.clone(),
        raw_samples: raw.len(),
        samples: d.len(),
        max_nodes: dc.max_nodes,
        classes: d
            .class_counts
            .iter()
            .map(|(&class, &count)| ClassInfo {
                class,
                label: d.class_names[class],
                count,
            })
            .collect(),
        majority_fraction: d.majority_fraction(),
        mean_nodes: mean(Graph::num_nodes),
        mean_edges: mean(Graph::num_edges),
    };
    println!("dataset      {}", info.name);
    println!("samples      {} (of {} before preprocessing)", info.samples, info.raw_samples);
    println!("classes      {}", info.classes.len());
    for c in &info.classes {
        println!("  label {:>4}  {}", c.label, c.count);
    }
    println!("majority     {:.4}", info.majority_fraction);
    println!("mean nodes   {:.2}", info.mean_nodes);
    println!("mean edges   {:.2}", info.mean_edges);
    ctx.out.json("dataset_info.json", &info)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct GraphDistribution<'a> {
    /// Position in the preprocessed dataset.
    index: usize,
    id: usize,
    class: Option<usize>,
    bins: &'a [i64],
    probs: &'a [f64],
}

fn load_features(ctx: &Context) -> anyhow::Result<(Dataset, FeatureSet)> {
    let d = ctx.config.dataset()?.load()?;
    let feats = compute_features(&d.graphs, &ctx.config.features)?;
    if !feats.skipped.is_empty() {
        log::warn!("{} graphs skipped for exceeding the qubit budget", feats.skipped.len());
    }
    Ok((d, feats))
}

fn write_features(ctx: &Context, d: &Dataset, feats: &FeatureSet) -> anyhow::Result<()> {
    let rows: Vec<GraphDistribution> = feats
        .indices
        .iter()
        .zip(&feats.distributions)
        .map(|(&i, p)| GraphDistribution {
            index: i,
            id: d.graphs[i].id,
            class: d.graphs[i].class_label,
            bins: p.bins(),
            probs: p.probs(),
        })
        .collect();
    ctx.out.json(
        "features.json",
        &serde_json::json!({ "skipped": feats.skipped, "graphs": rows }),
    )?;
    let mut csv = Csv::new(&["index", "bin", "probability"]);
    for r in &rows {
        for (b, p) in r.bins.iter().zip(r.probs) {
            csv.row([r.index.to_string(), b.to_string(), p.to_string()]);
        }
    }
    ctx.out.text("features.csv", &csv.finish())?;
    Ok(())
}

pub fn features(ctx: &Context) -> anyhow::Result<()> {
    let (d, feats) = load_features(ctx)?;
    write_features(ctx, &d, &feats)?;
    println!("{} distributions, {} skipped", feats.indices.len(), feats.skipped.len());
    Ok(())
}

#[derive(Debug, Serialize)]
struct KernelSummary {
    size: usize,
    mu: f64,
    skipped: Vec<usize>,
    min_entry: f64,
    max_asymmetry: f64,
    min_eigenvalue: f64,
}

pub fn kernel(ctx: &Context) -> anyhow::Result<()> {
    let (d, feats) = load_features(ctx)?;
    let k = feature_kernel(&feats, ctx.config.mu)?;
    ctx.out.text("kernel.csv", &k.to_csv())?;
    let summary = KernelSummary {
        size: k.len(),
        mu: ctx.config.mu,
        skipped: feats.skipped.clone(),
        min_entry: k.values().iter().copied().fold(f64::INFINITY, f64::min),
        max_asymmetry: k.max_asymmetry(),
        min_eigenvalue: k.min_eigenvalue(),
    };
    ctx.out.json("kernel_summary.json", &summary)?;
    if ctx.emit_plot_data {
        write_features(ctx, &d, &feats)?;
    }
    println!(
        "{0}x{0} kernel, min entry {1:.6}, min eigenvalue {2:.3e}",
        summary.size, summary.min_entry, summary.min_eigenvalue
    );
    Ok(())
}

pub fn benchmark(ctx: &Context) -> anyhow::Result<()> {
    let d = ctx.config.dataset()?.load()?;
    let report_name = "benchmark_report.json";
    let mut write_err = None;
    let result = run_benchmark(&d, &ctx.config.benchmark, |partial| {
        if let Err(e) = ctx.out.json(report_name, partial) {
            write_err.get_or_insert(e);
        }
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    let report = result.inspect_err(|_| {
        log::error!("benchmark aborted; partial results are in {report_name}");
    })?;
    if ctx.emit_plot_data {
        write_benchmark_plot_data(ctx, &report)?;
    }
    println!("{:<6} {:>9} {:>9}  parameter", "kernel", "accuracy", "std");
    if let Some(qe) = &report.qe {
        println!(
            "{:<6} {:>9.4} {:>9.4}  {:?}",
            "QE", qe.cv.mean_accuracy, qe.cv.std_accuracy, qe.sequence
        );
    }
    for b in &report.baselines {
        println!(
            "{:<6} {:>9.4} {:>9.4}  {}",
            b.kernel, b.cv.mean_accuracy, b.cv.std_accuracy, b.parameter
        );
    }
    println!("majority-class baseline {:.4}", report.majority_fraction);
    Ok(())
}

fn write_benchmark_plot_data(ctx: &Context, report: &BenchmarkReport) -> anyhow::Result<()> {
    if let Some(qe) = &report.qe {
        let mut csv = Csv::new(&["iteration", "value", "wall_time_s", "x"]);
        for e in &qe.bo_history {
            let x: Vec<String> = e.x.iter().map(f64::to_string).collect();
            csv.row([
                e.iteration.to_string(),
                e.value.to_string(),
                e.wall_time_s.to_string(),
                x.join(";"),
            ]);
        }
        ctx.out.text("bo_history.csv", &csv.finish())?;
    }
    let mut csv = Csv::new(&["kernel", "repetition", "fold", "c", "accuracy", "flagged"]);
    let runs = report
        .qe
        .iter()
        .map(|q| ("QE", &q.cv))
        .chain(report.baselines.iter().map(|b| (b.kernel.as_str(), &b.cv)));
    for (name, cv) in runs {
        for s in &cv.splits {
            csv.row([
                name.to_string(),
                s.repetition.to_string(),
                s.fold.to_string(),
                s.c.to_string(),
                s.accuracy.to_string(),
                s.flagged.to_string(),
            ]);
        }
    }
    ctx.out.text("cv_splits.csv", &csv.finish())?;
    Ok(())
}

pub fn demo_analytic(ctx: &Context) -> anyhow::Result<()> {
    let r = run_analytic_demo(&ctx.config.demo)?;
    let labels: Vec<String> = r
        .graphs
        .iter()
        .enumerate()
        .map(|(i, g)| format!("g{i}_c{}", g.class))
        .collect();

    let mut header = vec!["t"];
    header.extend(labels.iter().map(String::as_str));
    let mut trace = Csv::new(&header);
    for (j, t) in r.trace_times.iter().enumerate() {
        trace.row(std::iter::once(*t).chain(r.traces.iter().map(|tr| tr[j])));
    }
    ctx.out.text("trace.csv", &trace.finish())?;

    let mut dist = Csv::new(&["graph", "class", "component", "closed_form", "dft"]);
    for (i, (p, q)) in r.distributions.iter().zip(&r.dft_distributions).enumerate() {
        let (bins, a, b) = p.align(q);
        for (k, bin) in bins.iter().enumerate() {
            dist.row([
                i.to_string(),
                r.graphs[i].class.to_string(),
                bin.to_string(),
                a[k].to_string(),
                b[k].to_string(),
            ]);
        }
    }
    ctx.out.text("distributions.csv", &dist.finish())?;
    ctx.out.text("js_matrix.csv", &matrix_csv(&labels, &r.js))?;
    ctx.out.json("demo_report.json", &r)?;
    println!(
        "intra-class JS {:.3e}, inter-class JS {:.3e}, ratio {:.1}",
        r.intra_class_mean,
        r.inter_class_mean,
        r.separation()
    );
    println!("closed form vs DFT max gap {:.2e}", r.max_component_gap);
    Ok(())
}

#[derive(Debug, Serialize)]
struct NoiseOutput<'a> {
    graph_source: &'a NoiseGraphs,
    /// Positions in the raw dataset when graphs were selected from one.
    selection: Option<Vec<usize>>,
    report: &'a NoiseStudyReport,
}

pub fn noise_study(ctx: &Context) -> anyhow::Result<()> {
    let (graphs, selection) = match &ctx.config.noise_graphs {
        NoiseGraphs::Proxy {
            count,
            max_nodes,
            seed,
        } => (geometric_proxy(*count, *max_nodes, *seed), None),
        NoiseGraphs::Dataset {
            max_nodes,
            classes,
            limit,
        } => {
            let raw = ctx.config.dataset()?.load_raw()?;
            let (subset, idx) = select_subset(&raw, *max_nodes, classes, *limit)?;
            (subset.graphs, Some(idx))
        }
    };
    let report = run_noise_study(&graphs, &ctx.config.noise_study)?;
    ctx.out.json(
        "noise_report.json",
        &NoiseOutput {
            graph_source: &ctx.config.noise_graphs,
            selection,
            report: &report,
        },
    )?;
    let mut q = Csv::new(&["quantile", "delta_k"]);
    for (p, v) in &report.quantiles {
        q.row([p, v]);
    }
    ctx.out.text("noise_quantiles.csv", &q.finish())?;
    if ctx.emit_plot_data {
        let mut cdf = Csv::new(&["delta_k", "cumulative_fraction"]);
        for (x, f) in report.cdf() {
            cdf.row([x, f]);
        }
        ctx.out.text("delta_k_cdf.csv", &cdf.finish())?;
    }
    println!("{} graphs, {} pairs", report.graphs, report.pairs.len());
    for (p, v) in &report.quantiles {
        println!("  quantile {p:<6} delta_k {v:.4e}");
    }
    println!("fraction above 0.1: {:.4}", report.fraction_above_10_percent);
    Ok(())
}
