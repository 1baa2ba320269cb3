use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cumcal::binning::{noiseless_diagram, reliability_diagram};
use cumcal::bootstrap::bootstrap_diagrams;
use cumcal::cumulative::{cumulative_curve, noiseless_curve, secant_slope};
use cumcal::data::{read_observations, write_csv};
use cumcal::numeric::{fmt_sig17, sum};
use cumcal::render::{cumulative_svg, reliability_svg};
use cumcal::rng::derive_seed;
use cumcal::{
    BinningKind, BinningScheme, CumulativeCurve, InputFormat, PairedSample, PlotKind, PlotSpec,
    ReliabilityDiagram, SortedDataset, TrueModel,
};

use crate::output::Outputs;
use crate::{Cli, Command, CumulativeArgs, FigureSetArgs, ReliabilityArgs, SimulateArgs};

/// Runs a parsed command line and returns the text for standard output.
pub fn run(cli: &Cli) -> anyhow::Result<String> {
    match &cli.command {
        Command::Cumulative(args) => cmd_cumulative(args),
        Command::Reliability(args) => cmd_reliability(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::FigureSet(args) => cmd_figure_set(args),
    }
}

fn load(path: &Path, seed: u64) -> anyhow::Result<SortedDataset> {
    let obs = read_observations(path, InputFormat::Csv)?;
    Ok(SortedDataset::new(obs.samples, seed)?)
}

fn summary(dataset: &SortedDataset, curve: &CumulativeCurve) -> anyhow::Result<String> {
    let n = dataset.len();
    let full = secant_slope(curve, 0, n)?;
    let mut out = String::new();
    writeln!(out, "n={n}")?;
    writeln!(out, "mean_score={}", fmt_sig17(sum(dataset.scores()) / n as f64))?;
    writeln!(out, "mean_outcome={}", fmt_sig17(sum(dataset.outcomes()) / n as f64))?;
    writeln!(out, "final_diff={}", fmt_sig17(curve.diff_at(n)))?;
    writeln!(out, "triangle_half_height={}", fmt_sig17(curve.triangle_half_height()))?;
    writeln!(out, "full_range_slope={}", fmt_sig17(full.slope))?;
    Ok(out)
}

fn write_cumulative(outputs: &mut Outputs, stem: &str, title: &str, curve: &CumulativeCurve) -> anyhow::Result<()> {
    let svg_name = format!("{stem}.svg");
    let spec = PlotSpec::new(PlotKind::Cumulative, title, outputs.path(&svg_name));
    outputs.write(&svg_name, cumulative_svg(curve, &spec)?)?;
    outputs.write_with(&format!("{stem}.csv"), |buf| curve.write_csv(buf))?;
    Ok(())
}

/// Writes `<stem>.svg`, `<stem>.csv`, and `<stem>_bootstrap.csv` when
/// replicates are requested.
fn write_reliability(
    outputs: &mut Outputs,
    stem: &str,
    title: &str,
    dataset: Option<&SortedDataset>,
    diagram: &ReliabilityDiagram,
    replicates: usize,
    seed: u64,
) -> anyhow::Result<()> {
    let ensemble = match dataset {
        Some(ds) if replicates > 0 => Some(bootstrap_diagrams(ds, diagram.scheme, replicates, seed)?),
        _ => None,
    };
    let svg_name = format!("{stem}.svg");
    let spec = PlotSpec::new(PlotKind::Reliability, title, outputs.path(&svg_name));
    outputs.write(&svg_name, reliability_svg(diagram, ensemble.as_ref(), &spec)?)?;
    outputs.write_with(&format!("{stem}.csv"), |buf| diagram.write_csv(buf))?;
    if let Some(ens) = &ensemble {
        outputs.write_with(&format!("{stem}_bootstrap.csv"), |buf| ens.write_csv(buf))?;
    }
    Ok(())
}

/// `cumulative`: writes `cumulative.svg` and `cumulative.csv`.
pub fn cmd_cumulative(args: &CumulativeArgs) -> anyhow::Result<String> {
    let dataset = load(&args.input, args.seed)?;
    let curve = cumulative_curve(&dataset);
    let mut outputs = Outputs::new(&args.out_dir)?;
    let title = format!("cumulative differences (n = {})", dataset.len());
    write_cumulative(&mut outputs, "cumulative", &title, &curve)?;
    let text = summary(&dataset, &curve)?;
    outputs.commit();
    Ok(text)
}

/// `reliability`: writes `reliability.svg`, `reliability.csv` and, with
/// replicates, `reliability_bootstrap.csv`.
pub fn cmd_reliability(args: &ReliabilityArgs) -> anyhow::Result<String> {
    let dataset = load(&args.input, args.seed)?;
    let scheme = BinningScheme::new(args.scheme.into(), args.bins);
    let diagram = reliability_diagram(&dataset, scheme)?;
    let mut outputs = Outputs::new(&args.out_dir)?;
    let title = format!("reliability diagram ({}, {} bins, n = {})", scheme.kind, scheme.bin_count, dataset.len());
    write_reliability(
        &mut outputs,
        "reliability",
        &title,
        Some(&dataset),
        &diagram,
        args.bootstrap,
        derive_seed(args.seed, 1),
    )?;
    let mut text = String::new();
    writeln!(text, "n={}", dataset.len())?;
    writeln!(text, "scheme={}", scheme.kind)?;
    writeln!(text, "bins={}", diagram.bins.len())?;
    writeln!(text, "bootstrap_replicates={}", args.bootstrap)?;
    outputs.commit();
    Ok(text)
}

fn build_model(model: &crate::ModelArgs) -> anyhow::Result<TrueModel> {
    model.validate()?;
    Ok(TrueModel::new(model.score_family.into(), model.family.into(), model.n, model.params())?)
}

fn model_csv<'a>(model: &'a TrueModel, dataset: &SortedDataset) -> impl FnOnce(&mut Vec<u8>) -> std::io::Result<()> + 'a {
    let samples: Vec<PairedSample> = dataset.samples().to_vec();
    move |buf| write_csv(buf, &samples, Some(model.true_probs()))
}

/// `simulate`: writes `simulated.csv` with columns score,outcome,true_prob.
pub fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<String> {
    let model = build_model(&args.model)?;
    let dataset = model.sample(args.seed);
    let mut outputs = Outputs::new(&args.out_dir)?;
    let path = outputs.write_with("simulated.csv", model_csv(&model, &dataset))?;
    outputs.commit();
    Ok(format!("wrote {}\n", path.display()))
}

/// One panel of a figure set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelEntry {
    pub panel: usize,
    pub role: String,
    pub svg: String,
    pub csv: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bins: Option<usize>,
}

/// Contents of `figure_set.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub family: String,
    pub score_family: String,
    pub n: usize,
    pub seed: u64,
    pub bootstrap_replicates: usize,
    pub data: String,
    pub panels: Vec<PanelEntry>,
}

/// `figure-set`: seven panels plus `data.csv` and `figure_set.json`.
///
/// Panels: (1) sampled cumulative plot, (2) noiseless cumulative plot,
/// (3, 4) sampled reliability diagrams at the finer bin count, equal-width
/// then equal-count, (5, 6) the same at the coarser bin count, (7) the
/// noiseless reliability diagram with one bin per sample, i.e. the points
/// `(P_k, true_k)`.
///
/// Randomness: outcomes (and tie order) come from `derive_seed(seed, 0)`;
/// the bootstrap of panel `p` uses `derive_seed(seed, p)`. Equal-count bin
/// counts are capped at `n`.
pub fn cmd_figure_set(args: &FigureSetArgs) -> anyhow::Result<String> {
    let model = build_model(&args.model)?;
    let n = model.n();
    let dataset = model.sample(derive_seed(args.seed, 0));
    let label = format!("{} / {}, n = {n}", model_family(args), score_family_name(args));

    let mut outputs = Outputs::new(&args.out_dir)?;
    outputs.write_with("data.csv", model_csv(&model, &dataset))?;

    let mut panels = Vec::with_capacity(7);
    write_cumulative(&mut outputs, "cumulative", &format!("cumulative differences ({label})"), &cumulative_curve(&dataset))?;
    panels.push(PanelEntry {
        panel: 1,
        role: "sampled-cumulative".into(),
        svg: "cumulative.svg".into(),
        csv: "cumulative.csv".into(),
        bootstrap_csv: None,
        scheme: None,
        bins: None,
    });
    write_cumulative(
        &mut outputs,
        "cumulative_noiseless",
        &format!("noiseless expectation ({label})"),
        &noiseless_curve(&model),
    )?;
    panels.push(PanelEntry {
        panel: 2,
        role: "noiseless-cumulative".into(),
        svg: "cumulative_noiseless.svg".into(),
        csv: "cumulative_noiseless.csv".into(),
        bootstrap_csv: None,
        scheme: None,
        bins: None,
    });

    let rows = [("fine", args.fine_bins), ("coarse", args.coarse_bins)];
    let kinds = [BinningKind::EqualWidth, BinningKind::EqualCount];
    let mut panel = 3;
    for (row, bins) in rows {
        for kind in kinds {
            let bins = if kind == BinningKind::EqualCount { bins.min(n) } else { bins };
            let scheme = BinningScheme::new(kind, bins);
            let diagram = reliability_diagram(&dataset, scheme)?;
            let stem = format!("reliability_{row}_{}", kind.name().replace('-', "_"));
            write_reliability(
                &mut outputs,
                &stem,
                &format!("{kind}, {bins} bins ({label})"),
                Some(&dataset),
                &diagram,
                args.bootstrap,
                derive_seed(args.seed, panel as u64),
            )?;
            panels.push(PanelEntry {
                panel,
                role: format!("sampled-reliability-{row}-{kind}"),
                svg: format!("{stem}.svg"),
                csv: format!("{stem}.csv"),
                bootstrap_csv: (args.bootstrap > 0).then(|| format!("{stem}_bootstrap.csv")),
                scheme: Some(kind.name().into()),
                bins: Some(bins),
            });
            panel += 1;
        }
    }

    let noiseless = noiseless_diagram(&model, BinningScheme::equal_count(n))?;
    write_reliability(
        &mut outputs,
        "reliability_noiseless",
        &format!("noiseless expectation ({label})"),
        None,
        &noiseless,
        0,
        0,
    )?;
    panels.push(PanelEntry {
        panel: 7,
        role: "noiseless-reliability".into(),
        svg: "reliability_noiseless.svg".into(),
        csv: "reliability_noiseless.csv".into(),
        bootstrap_csv: None,
        scheme: Some(BinningKind::EqualCount.name().into()),
        bins: Some(n),
    });

    let manifest = Manifest {
        family: model_family(args),
        score_family: score_family_name(args).to_string(),
        n,
        seed: args.seed,
        bootstrap_replicates: args.bootstrap,
        data: "data.csv".into(),
        panels,
    };
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    let manifest_path = outputs.write("figure_set.json", json)?;
    outputs.commit();
    Ok(format!("wrote 7 panels; manifest {}\n", manifest_path.display()))
}

fn model_family(args: &FigureSetArgs) -> String {
    cumcal::DeviationFamily::from(args.model.family).name().to_string()
}

fn score_family_name(args: &FigureSetArgs) -> &'static str {
    cumcal::ScoreFamily::from(args.model.score_family).name()
}
